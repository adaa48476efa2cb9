//! Rotation-invariant metrics on the space of cubic forms.
//!
//! Every invariant positive definite form is `q(u) = u Q uᵀ` with `Q` from the
//! two-parameter family [`q_pattern`]. The invariant planes `U1`, `U2` are
//! `q`-orthogonal, and on each of them `q` is a multiple of the reference
//! forms `r1`, `r2`: `q|U1 = r1 / m1²` and `q|U2 = r2 / m2²`. The asymmetry of
//! the metric is `sigma = m2 / m1`.

use std::f64::consts::PI;

use nalgebra::{Matrix4, RowVector4};
use serde::Serialize;

use crate::cubic_forms::{index_form_matrix, omega, CubicForm, U1_SPAN, U2_SPAN};
use crate::error::{Error, Result};

/// Absolute tolerance used when checking symmetry of an input matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default node count for the trapezoid orbit average.
pub const DEFAULT_AVERAGE_NODES: usize = 64;

/// Imaginary parts of relative eigenvalues below this are discarded.
const EIGEN_IMAGINARY_TOL: f64 = 1e-10;

/// The invariant matrix with parameters `(alpha, beta)`, with no admissibility check.
pub fn q_pattern(alpha: f64, beta: f64) -> Matrix4<f64> {
    let d = 2.0 * alpha / 3.0 + beta / 3.0;
    #[rustfmt::skip]
    let q = Matrix4::new(
        d,     0.0,   alpha, 0.0,
        0.0,   beta,  0.0,   alpha,
        alpha, 0.0,   beta,  0.0,
        0.0,   alpha, 0.0,   d,
    );
    q
}

/// Determinants of the four leading principal submatrices.
pub fn leading_minors(m: &Matrix4<f64>) -> [f64; 4] {
    [
        m[(0, 0)],
        m.fixed_view::<2, 2>(0, 0).determinant(),
        m.fixed_view::<3, 3>(0, 0).determinant(),
        m.determinant(),
    ]
}

/// Checks `beta > 0` and `beta (2 alpha / 3 + beta / 3) - alpha² > 0`.
pub fn check_admissible(alpha: f64, beta: f64) -> Result<()> {
    let reject = |reason| Err(Error::NotAdmissible { alpha, beta, reason });
    if !alpha.is_finite() || !beta.is_finite() {
        return reject("parameters must be finite");
    }
    if beta <= 0.0 {
        return reject("beta must be positive");
    }
    if beta * (2.0 * alpha / 3.0 + beta / 3.0) - alpha * alpha <= 0.0 {
        return reject("requires -beta/3 < alpha < beta");
    }
    Ok(())
}

/// A `q`-orthonormal basis with `v11, v12` spanning `U1` and `v21, v22` spanning `U2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthonormalFrame {
    pub v11: CubicForm,
    pub v12: CubicForm,
    pub v21: CubicForm,
    pub v22: CubicForm,
}

impl OrthonormalFrame {
    pub fn vectors(&self) -> [CubicForm; 4] {
        [self.v11, self.v12, self.v21, self.v22]
    }

    /// The frame vectors stacked as rows.
    pub fn matrix(&self) -> Matrix4<f64> {
        let rows = self.vectors().map(|v| v.to_row());
        Matrix4::from_rows(&rows)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantMetric {
    alpha: f64,
    beta: f64,
    q: Matrix4<f64>,
    m1: f64,
    m2: f64,
    sigma: f64,
    frame: OrthonormalFrame,
    // u * to_coords = frame coordinates of u
    to_coords: Matrix4<f64>,
}

impl InvariantMetric {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_admissible(alpha, beta)?;
        let q = q_pattern(alpha, beta);
        let m1 = 1.0 / (4.0 * (3.0 * alpha + beta).sqrt());
        let m2 = 1.0 / (4.0 * (3.0 * (beta - alpha)).sqrt());
        let sigma = ((3.0 * alpha + beta) / (3.0 * (beta - alpha))).sqrt();
        let frame = build_frame(&q);
        let to_coords = q * frame.matrix().transpose();
        Ok(Self {
            alpha,
            beta,
            q,
            m1,
            m2,
            sigma,
            frame,
            to_coords,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn q_matrix(&self) -> &Matrix4<f64> {
        &self.q
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// `sigma = sqrt((3 alpha + beta) / (3 (beta - alpha)))`, equal to `m2 / m1`.
    pub fn asymmetry(&self) -> f64 {
        self.sigma
    }

    pub fn frame(&self) -> &OrthonormalFrame {
        &self.frame
    }

    /// `q(u) = u Q uᵀ`.
    pub fn evaluate(&self, u: &CubicForm) -> f64 {
        self.inner(u, u)
    }

    pub fn inner(&self, u: &CubicForm, v: &CubicForm) -> f64 {
        (u.to_row() * self.q * v.to_row().transpose())[0]
    }

    pub fn to_frame_coords(&self, u: &CubicForm) -> [f64; 4] {
        let c = u.to_row() * self.to_coords;
        [c[0], c[1], c[2], c[3]]
    }

    pub fn from_frame_coords(&self, coords: [f64; 4]) -> CubicForm {
        let row = RowVector4::from(coords) * self.frame.matrix();
        CubicForm::from_row(&row)
    }

    /// The index form expressed in frame coordinates,
    /// `72 [ (m1/3)² (x² + y²) - m2² (z² + w²) ]`.
    pub fn index_form_in_frame(&self, coords: [f64; 4]) -> f64 {
        let [x, y, z, w] = coords;
        let plus = (self.m1 / 3.0).powi(2) * (x * x + y * y);
        let minus = self.m2 * self.m2 * (z * z + w * w);
        72.0 * (plus - minus)
    }

    /// Eigenvalues of `M_T Q⁻¹`, the index form relative to the metric.
    pub fn relative_eigenvalues(&self) -> Result<RelativeEigenvalues> {
        // Q is positive definite for admissible parameters.
        let q_inv = self
            .q
            .try_inverse()
            .ok_or(Error::NotAdmissible {
                alpha: self.alpha,
                beta: self.beta,
                reason: "singular metric matrix",
            })?;
        let product = index_form_matrix() * q_inv;
        let mut values = [0.0; 4];
        for (slot, z) in values.iter_mut().zip(product.complex_eigenvalues().iter()) {
            let scale = z.re.abs().max(1.0);
            if z.im.abs() > EIGEN_IMAGINARY_TOL * scale {
                return Err(Error::ComplexEigenvalue { imaginary: z.im });
            }
            *slot = z.re;
        }
        values.sort_by(|a, b| b.total_cmp(a));
        if !(values[1] > 0.0 && values[2] < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "relative eigenvalues {values:?} do not split into two positive and two negative"
            )));
        }
        Ok(RelativeEigenvalues {
            plus: 0.5 * (values[0] + values[1]),
            minus: 0.5 * (values[2] + values[3]),
            all: values,
        })
    }

    /// Closed forms `1/(2(3 alpha + beta))` and `-3/(2(beta - alpha))`.
    pub fn relative_eigenvalues_closed_form(&self) -> (f64, f64) {
        (
            1.0 / (2.0 * (3.0 * self.alpha + self.beta)),
            -3.0 / (2.0 * (self.beta - self.alpha)),
        )
    }
}

pub fn metric_from_params(alpha: f64, beta: f64) -> Result<InvariantMetric> {
    InvariantMetric::new(alpha, beta)
}

pub fn asymmetry(q: &InvariantMetric) -> f64 {
    q.asymmetry()
}

pub fn orthonormal_frame(q: &InvariantMetric) -> OrthonormalFrame {
    q.frame
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeEigenvalues {
    /// Mean of the two positive eigenvalues.
    pub plus: f64,
    /// Mean of the two negative eigenvalues.
    pub minus: f64,
    /// All four eigenvalues in descending order.
    pub all: [f64; 4],
}

fn build_frame(q: &Matrix4<f64>) -> OrthonormalFrame {
    let inner = |u: &CubicForm, v: &CubicForm| (u.to_row() * q * v.to_row().transpose())[0];
    let normalize = |u: CubicForm| (1.0 / inner(&u, &u).sqrt()) * u;

    // Gram-Schmidt inside each plane; the planes are already q-orthogonal.
    let v11 = normalize(U1_SPAN[0]);
    let v12 = normalize(U1_SPAN[1] - inner(&U1_SPAN[1], &v11) * v11);
    let v21 = normalize(U2_SPAN[0]);
    let mut v22 = normalize(U2_SPAN[1] - inner(&U2_SPAN[1], &v21) * v21);

    let frame = OrthonormalFrame { v11, v12, v21, v22 };
    if frame.matrix().determinant() < 0.0 {
        v22 = -v22;
    }
    OrthonormalFrame { v11, v12, v21, v22 }
}

/// Result of projecting a symmetric matrix onto the invariant family.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedMatrix {
    pub alpha: f64,
    pub beta: f64,
    pub matrix: Matrix4<f64>,
}

fn check_symmetric(m: &Matrix4<f64>) -> Result<()> {
    let max_asymmetry = (m - m.transpose()).amax();
    // NaN entries fail the check as well
    if max_asymmetry.is_nan() || max_asymmetry > SYMMETRY_TOL * m.amax().max(1.0) {
        return Err(Error::NotSymmetric { max_asymmetry });
    }
    Ok(())
}

/// Orbit average of a symmetric matrix in closed form.
pub fn average(m: &Matrix4<f64>) -> Result<AveragedMatrix> {
    check_symmetric(m)?;
    // 1-based entries m_ij
    let e = |i: usize, j: usize| m[(i - 1, j - 1)];
    let alpha = (6.0 * e(2, 4) + 3.0 * e(1, 1) + 3.0 * e(4, 4) - e(3, 3) - e(2, 2)
        + 6.0 * e(1, 3))
        / 16.0;
    let beta = (-6.0 * e(2, 4) + 9.0 * e(1, 1) + 9.0 * e(4, 4) + 5.0 * e(3, 3) + 5.0 * e(2, 2)
        - 6.0 * e(1, 3))
        / 16.0;
    Ok(AveragedMatrix {
        alpha,
        beta,
        matrix: q_pattern(alpha, beta),
    })
}

/// Orbit average `(1/2π) ∫ Ω(θ) M Ω(θ)ᵀ dθ` by the composite trapezoid rule.
///
/// The integrand is a trigonometric polynomial of degree at most 6, so any
/// node count above 6 integrates it exactly up to rounding.
pub fn average_numeric(m: &Matrix4<f64>, nodes: usize) -> Result<Matrix4<f64>> {
    check_symmetric(m)?;
    if nodes < 16 {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least 16 nodes, got {nodes}"
        )));
    }
    let step = 2.0 * PI / nodes as f64;
    let sum = (0..nodes).fold(Matrix4::zeros(), |acc, k| {
        let w = omega(step * k as f64);
        acc + w * m * w.transpose()
    });
    Ok(sum / nodes as f64)
}
