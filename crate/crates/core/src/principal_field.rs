//! Principal line fields near an umbilic in a Monge chart.
//!
//! The surface is the exact polynomial graph
//! `h(x, y) = (k/2)(x² + y²) + (1/6)(a x³ + 3b x²y + 3b' xy² + a' y³)`, which has
//! an umbilic at the origin with the given cubic form. Principal directions
//! `[dx : dy]` solve `L dy² + M dx dy + N dx² = 0` where
//!
//! ```text
//! L = h_x h_y h_yy - (1 + h_y²) h_xy
//! M = (1 + h_x²) h_yy - (1 + h_y²) h_xx
//! N = (1 + h_x²) h_xy - h_x h_y h_xx
//! ```

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::cubic_forms::{
    index_form, is_transversal, CubicForm, UmbilicIndex, DEFAULT_TRANSVERSALITY_TOL,
};
use crate::error::{Error, Result};

/// Upper bound on circuit refinement in [`winding_index`].
pub const MAX_WINDING_STEPS: usize = 1 << 20;

/// Largest distance (in turns) from a half-integer accepted by [`winding_index`].
pub const SNAP_TOL: f64 = 0.05;

/// Largest heading change accepted per step before refining.
const MAX_INCREMENT: f64 = FRAC_PI_4;

const MIDPOINT_ITERATIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MongeSurface {
    pub k: f64,
    pub cubic: CubicForm,
}

/// Height and partial derivatives up to second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub h: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub h_xx: f64,
    pub h_xy: f64,
    pub h_yy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LmnCoefficients {
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl LmnCoefficients {
    /// `L dy² + M dx dy + N dx²`.
    pub fn quadratic(&self, dx: f64, dy: f64) -> f64 {
        self.l * dy * dy + self.m * dx * dy + self.n * dx * dx
    }

    pub fn discriminant(&self) -> f64 {
        self.m * self.m - 4.0 * self.l * self.n
    }
}

impl MongeSurface {
    pub fn new(k: f64, cubic: CubicForm) -> Self {
        Self { k, cubic }
    }

    pub fn eval(&self, x: f64, y: f64) -> SurfaceJet {
        surface_eval(self, x, y)
    }

    pub fn lmn(&self, x: f64, y: f64) -> LmnCoefficients {
        lmn(self, x, y)
    }
}

pub fn surface_eval(s: &MongeSurface, x: f64, y: f64) -> SurfaceJet {
    let k = s.k;
    let CubicForm {
        a,
        b,
        b_prime: bp,
        a_prime: ap,
    } = s.cubic;
    SurfaceJet {
        h: 0.5 * k * (x * x + y * y) + s.cubic.polynomial(x, y) / 6.0,
        h_x: k * x + 0.5 * (a * x * x + 2.0 * b * x * y + bp * y * y),
        h_y: k * y + 0.5 * (b * x * x + 2.0 * bp * x * y + ap * y * y),
        h_xx: k + a * x + b * y,
        h_xy: b * x + bp * y,
        h_yy: k + bp * x + ap * y,
    }
}

pub fn lmn(s: &MongeSurface, x: f64, y: f64) -> LmnCoefficients {
    let j = surface_eval(s, x, y);
    let (hx2, hy2) = (j.h_x * j.h_x, j.h_y * j.h_y);
    LmnCoefficients {
        l: j.h_x * j.h_y * j.h_yy - (1.0 + hy2) * j.h_xy,
        m: (1.0 + hx2) * j.h_yy - (1.0 + hy2) * j.h_xx,
        n: (1.0 + hx2) * j.h_xy - j.h_x * j.h_y * j.h_xx,
    }
}

/// A unit representative of a projective direction `[dx : dy]`, normalized so
/// that its angle lies in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction {
    pub dx: f64,
    pub dy: f64,
}

impl Direction {
    fn from_vector(dx: f64, dy: f64) -> Self {
        let norm = dx.hypot(dy);
        let (mut dx, mut dy) = (dx / norm, dy / norm);
        if dy < 0.0 || (dy == 0.0 && dx < 0.0) {
            dx = -dx;
            dy = -dy;
        }
        // -0.0 would put the angle at π
        Self { dx: dx + 0.0, dy: dy + 0.0 }
    }

    pub fn angle(&self) -> f64 {
        let a = self.dy.atan2(self.dx);
        if a >= PI {
            a - PI
        } else {
            a
        }
    }
}

/// Wraps an angle difference into `(-π/2, π/2]`, the distance between lines.
fn line_angle_delta(delta: f64) -> f64 {
    let mut d = delta.rem_euclid(PI);
    if d > PI / 2.0 {
        d -= PI;
    }
    d
}

/// The two real roots of `L dy² + M dx dy + N dx² = 0`, ordered by angle.
pub fn principal_directions(c: &LmnCoefficients, tol: f64) -> Result<[Direction; 2]> {
    let LmnCoefficients { l, m, n } = *c;
    if l.abs() <= tol && m.abs() <= tol && n.abs() <= tol {
        return Err(Error::DegeneratePoint);
    }
    let mut disc = c.discriminant();
    if disc < 0.0 {
        if disc < -1e-12 * (m * m + 4.0 * (l * n).abs()) {
            return Err(Error::ComplexRoots { discriminant: disc });
        }
        disc = 0.0;
    }
    // Stable quadratic formula: the roots are q/lead and trail/q.
    let q = -0.5 * (m + m.signum() * disc.sqrt());
    let (first, second) = if l.abs() >= n.abs() {
        // t = dy/dx solves l t² + m t + n = 0
        if q == 0.0 {
            // m = 0 and l n = 0: double root dy = 0
            ((1.0, 0.0), (1.0, 0.0))
        } else {
            ((l, q), (q, n))
        }
    } else {
        // s = dx/dy solves n s² + m s + l = 0
        if q == 0.0 {
            ((0.0, 1.0), (0.0, 1.0))
        } else {
            ((q, n), (l, q))
        }
    };
    let mut dirs = [
        Direction::from_vector(first.0, first.1),
        Direction::from_vector(second.0, second.1),
    ];
    dirs.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
    Ok(dirs)
}

fn degenerate_tol(s: &MongeSurface, radius: f64) -> f64 {
    1e-12 * radius * (1.0 + s.cubic.norm_squared().sqrt())
}

fn require_transversal(s: &MongeSurface) -> Result<()> {
    if !is_transversal(&s.cubic, DEFAULT_TRANSVERSALITY_TOL) {
        return Err(Error::NonTransversal {
            t: index_form(&s.cubic),
        });
    }
    Ok(())
}

/// Picks the direction nearest to `heading` modulo π.
fn nearest_branch(dirs: &[Direction; 2], heading: f64) -> f64 {
    let d0 = line_angle_delta(dirs[0].angle() - heading);
    let d1 = line_angle_delta(dirs[1].angle() - heading);
    if d0.abs() <= d1.abs() {
        heading + d0
    } else {
        heading + d1
    }
}

/// Total rotation (radians) of one principal direction along the circle, or
/// `None` when a single increment exceeds the refinement threshold.
fn walk_circle(s: &MongeSurface, radius: f64, steps: usize) -> Result<Option<f64>> {
    let tol = degenerate_tol(s, radius);
    let at = |j: usize| {
        let phi = 2.0 * PI * j as f64 / steps as f64;
        let (sin, cos) = phi.sin_cos();
        principal_directions(&s.lmn(radius * cos, radius * sin), tol)
    };
    let start = at(0)?[0].angle();
    let mut heading = start;
    for j in 1..=steps {
        let next = nearest_branch(&at(j)?, heading);
        if (next - heading).abs() > MAX_INCREMENT {
            return Ok(None);
        }
        heading = next;
    }
    Ok(Some(heading - start))
}

/// Index of the umbilic at the origin, from the rotation of a principal
/// direction around the circle of the given radius.
pub fn winding_index(s: &MongeSurface, radius: f64, steps: usize) -> Result<UmbilicIndex> {
    require_transversal(s)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if steps < 64 {
        return Err(Error::InvalidArgument(format!("at least 64 steps required, got {steps}")));
    }
    let mut steps = steps;
    loop {
        if let Some(total) = walk_circle(s, radius, steps)? {
            let turns = total / (2.0 * PI);
            let twice = (2.0 * turns).round();
            if (turns - twice / 2.0).abs() <= SNAP_TOL {
                return Ok(UmbilicIndex::from_twice(twice as i32));
            }
            return Err(Error::NoConvergence { turns, steps });
        }
        if steps * 2 > MAX_WINDING_STEPS {
            return Err(Error::NoConvergence { turns: f64::NAN, steps });
        }
        steps *= 2;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// The principal direction with the smaller angle in `[0, π)` at the start point.
    First,
    Second,
}

/// Traces an integral curve of one principal line field by fixed-step
/// (implicit) midpoint stepping.
///
/// A negative `step` traces the curve backwards. Tracing stops early when the
/// next segment would leave the square `[-window, window]²`, come within one
/// step of the umbilic, or cross a degenerate point.
pub fn field_polyline(
    s: &MongeSurface,
    start: [f64; 2],
    family: Family,
    step: f64,
    n_points: usize,
    window: f64,
) -> Result<Vec<[f64; 2]>> {
    require_transversal(s)?;
    let h = step.abs();
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be nonzero, got {step}")));
    }
    if start[0].hypot(start[1]) < h {
        return Err(Error::InvalidArgument(
            "start point lies within one step of the umbilic".into(),
        ));
    }
    let tol = degenerate_tol(s, h);
    let directions = |p: [f64; 2]| principal_directions(&s.lmn(p[0], p[1]), tol);

    let initial = directions(start)?;
    let branch = match family {
        Family::First => initial[0],
        Family::Second => initial[1],
    };
    let sign = step.signum();
    let mut heading = [sign * branch.dx, sign * branch.dy];

    // Oriented direction of the field at p closest to heading.
    let follow = |p: [f64; 2], heading: [f64; 2]| -> Option<[f64; 2]> {
        let dirs = directions(p).ok()?;
        let angle = heading[1].atan2(heading[0]);
        let next = nearest_branch(&dirs, angle);
        if line_angle_delta(next - angle).abs() > MAX_INCREMENT {
            return None;
        }
        Some([next.cos(), next.sin()])
    };

    let mut points = Vec::with_capacity(n_points);
    points.push(start);
    while points.len() < n_points {
        let p = points[points.len() - 1];
        let Some(d1) = follow(p, heading) else { break };
        // Implicit midpoint: the chord direction is the field direction at
        // the chord midpoint.
        let mut d2 = d1;
        let mut lost = false;
        for _ in 0..MIDPOINT_ITERATIONS {
            let mid = [p[0] + 0.5 * h * d2[0], p[1] + 0.5 * h * d2[1]];
            let Some(d) = follow(mid, d2) else {
                lost = true;
                break;
            };
            let change = (d[0] - d2[0]).abs().max((d[1] - d2[1]).abs());
            d2 = d;
            if change <= 1e-15 {
                break;
            }
        }
        if lost {
            break;
        }
        let next = [p[0] + h * d2[0], p[1] + h * d2[1]];
        if next[0].abs() > window || next[1].abs() > window {
            break;
        }
        if segment_distance_to_origin(p, next) < h {
            break;
        }
        points.push(next);
        heading = d2;
    }
    Ok(points)
}

fn segment_distance_to_origin(p: [f64; 2], q: [f64; 2]) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (-(p[0] * d[0] + p[1] * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] + t * d[0]).hypot(p[1] + t * d[1])
}
