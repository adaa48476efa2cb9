//! The coefficient space of umbilic cubic forms.
//!
//! A cubic form `(1/6)(a x³ + 3b x²y + 3b' xy² + a' y³)` is stored as the row
//! vector `(a, b, b', a')`. Rotating the adapted frame by `theta` acts linearly
//! on the right, `U = u Ω(theta)`. The index form
//! `T(u) = a b' + a' b - b² - b'²` is invariant under this action and its sign
//! gives the index of a transversal umbilic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix4, RowVector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for the transversality test `|T| > tol·‖u‖²`.
pub const DEFAULT_TRANSVERSALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CubicForm {
    pub a: f64,
    pub b: f64,
    pub b_prime: f64,
    pub a_prime: f64,
}

impl CubicForm {
    pub const ZERO: CubicForm = CubicForm::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(a: f64, b: f64, b_prime: f64, a_prime: f64) -> Self {
        Self {
            a,
            b,
            b_prime,
            a_prime,
        }
    }

    pub const fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.b_prime, self.a_prime]
    }

    pub fn from_row(row: &RowVector4<f64>) -> Self {
        Self::new(row[0], row[1], row[2], row[3])
    }

    pub fn to_row(self) -> RowVector4<f64> {
        RowVector4::new(self.a, self.b, self.b_prime, self.a_prime)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Squared Euclidean norm of the coefficient vector.
    pub fn norm_squared(&self) -> f64 {
        self.to_array().iter().map(|c| c * c).sum()
    }

    pub fn max_abs_diff(&self, other: &CubicForm) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// The rotated form `u Ω(theta)`.
    pub fn act(&self, theta: f64) -> CubicForm {
        act(self, theta)
    }

    pub fn index_form(&self) -> f64 {
        index_form(self)
    }

    /// Evaluates the cubic polynomial `a x³ + 3b x²y + 3b' xy² + a' y³`
    /// (without the 1/6 factor).
    pub fn polynomial(&self, x: f64, y: f64) -> f64 {
        self.a * x * x * x
            + 3.0 * self.b * x * x * y
            + 3.0 * self.b_prime * x * y * y
            + self.a_prime * y * y * y
    }
}

impl fmt::Display for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.a, self.b, self.b_prime, self.a_prime
        )
    }
}

impl Add for CubicForm {
    type Output = CubicForm;
    fn add(self, rhs: CubicForm) -> CubicForm {
        CubicForm::new(
            self.a + rhs.a,
            self.b + rhs.b,
            self.b_prime + rhs.b_prime,
            self.a_prime + rhs.a_prime,
        )
    }
}

impl Sub for CubicForm {
    type Output = CubicForm;
    fn sub(self, rhs: CubicForm) -> CubicForm {
        self + (-rhs)
    }
}

impl Neg for CubicForm {
    type Output = CubicForm;
    fn neg(self) -> CubicForm {
        -1.0 * self
    }
}

impl Mul<CubicForm> for f64 {
    type Output = CubicForm;
    fn mul(self, u: CubicForm) -> CubicForm {
        CubicForm::new(
            self * u.a,
            self * u.b,
            self * u.b_prime,
            self * u.a_prime,
        )
    }
}

/// Matrix of the frame rotation by `theta` acting on row vectors.
pub fn omega(theta: f64) -> Matrix4<f64> {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    #[rustfmt::skip]
    let m = Matrix4::new(
        c2 * c,         -s * c2,               s2 * c,                -s2 * s,
        3.0 * c2 * s,   c * (3.0 * c2 - 2.0),  -s * (2.0 - 3.0 * s2), 3.0 * c * s2,
        3.0 * s2 * c,   -s * (3.0 * s2 - 2.0), c * (3.0 * c2 - 2.0),  -3.0 * c2 * s,
        s2 * s,         s2 * c,                c2 * s,                c2 * c,
    );
    m
}

pub fn act(u: &CubicForm, theta: f64) -> CubicForm {
    CubicForm::from_row(&(u.to_row() * omega(theta)))
}

/// `T(u) = a b' + a' b - b² - b'²`.
pub fn index_form(u: &CubicForm) -> f64 {
    u.a * u.b_prime + u.a_prime * u.b - u.b * u.b - u.b_prime * u.b_prime
}

/// Symmetric matrix of the index form, `T(u) = u M_T uᵀ`.
pub fn index_form_matrix() -> Matrix4<f64> {
    #[rustfmt::skip]
    let m = Matrix4::new(
        0.0, 0.0,  0.5,  0.0,
        0.0, -1.0, 0.0,  0.5,
        0.5, 0.0,  -1.0, 0.0,
        0.0, 0.5,  0.0,  0.0,
    );
    m
}

pub fn is_transversal(u: &CubicForm, tol: f64) -> bool {
    index_form(u).abs() > tol * u.norm_squared()
}

/// An umbilic index, stored as twice its (half-integer) value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UmbilicIndex {
    twice: i32,
}

impl UmbilicIndex {
    pub const PLUS_HALF: UmbilicIndex = UmbilicIndex { twice: 1 };
    pub const MINUS_HALF: UmbilicIndex = UmbilicIndex { twice: -1 };

    pub const fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }
}

impl fmt::Display for UmbilicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.twice > 0 { "+" } else { "" };
        if self.twice % 2 == 0 {
            write!(f, "{sign}{}", self.twice / 2)
        } else {
            write!(f, "{sign}{}/2", self.twice)
        }
    }
}

impl Serialize for UmbilicIndex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

/// Index `½ sign(T)` of a transversal umbilic.
pub fn umbilic_index(u: &CubicForm, tol: f64) -> Result<UmbilicIndex> {
    let t = index_form(u);
    if !is_transversal(u, tol) {
        return Err(Error::NonTransversal { t });
    }
    Ok(if t > 0.0 {
        UmbilicIndex::PLUS_HALF
    } else {
        UmbilicIndex::MINUS_HALF
    })
}

/// Coordinates of a cubic form against the reference invariant forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RComponents {
    pub r11: f64,
    pub r12: f64,
    pub r21: f64,
    pub r22: f64,
}

impl RComponents {
    pub fn r1(&self) -> f64 {
        self.r11 * self.r11 + self.r12 * self.r12
    }

    pub fn r2(&self) -> f64 {
        self.r21 * self.r21 + self.r22 * self.r22
    }
}

pub fn r_components(u: &CubicForm) -> RComponents {
    RComponents {
        r11: (u.a + u.b_prime) / 8.0,
        r12: -(u.a_prime + u.b) / 8.0,
        r21: (u.a - 3.0 * u.b_prime) / 24.0,
        r22: (u.a_prime - 3.0 * u.b) / 24.0,
    }
}

/// The index form recovered from the invariant forms, `72 (r1/9 - r2)`.
pub fn t_from_r(u: &CubicForm) -> f64 {
    let r = r_components(u);
    72.0 * (r.r1() / 9.0 - r.r2())
}

/// Spanning vectors of the invariant plane `U1: a = 3b', a' = 3b`.
pub const U1_SPAN: [CubicForm; 2] = [
    CubicForm::new(3.0, 0.0, 1.0, 0.0),
    CubicForm::new(0.0, 1.0, 0.0, 3.0),
];

/// Spanning vectors of the invariant plane `U2: a = -b', a' = -b`.
pub const U2_SPAN: [CubicForm; 2] = [
    CubicForm::new(-1.0, 0.0, 1.0, 0.0),
    CubicForm::new(0.0, 1.0, 0.0, -1.0),
];

/// Residuals `(|a - 3b'|, |a' - 3b|)` measuring distance from `U1`.
pub fn u1_residual(u: &CubicForm) -> f64 {
    (u.a - 3.0 * u.b_prime).abs().max((u.a_prime - 3.0 * u.b).abs())
}

/// Residuals `(|a + b'|, |a' + b|)` measuring distance from `U2`.
pub fn u2_residual(u: &CubicForm) -> f64 {
    (u.a + u.b_prime).abs().max((u.a_prime + u.b).abs())
}

/// Splits `u` along the direct sum `U1 ⊕ U2`.
pub fn decompose(u: &CubicForm) -> (CubicForm, CubicForm) {
    let x1 = (u.a + u.b_prime) / 4.0;
    let x2 = (3.0 * u.b_prime - u.a) / 4.0;
    let y1 = (u.a_prime + u.b) / 4.0;
    let y2 = (3.0 * u.b - u.a_prime) / 4.0;
    let u1 = x1 * U1_SPAN[0] + y1 * U1_SPAN[1];
    let u2 = x2 * U2_SPAN[0] + y2 * U2_SPAN[1];
    (u1, u2)
}
