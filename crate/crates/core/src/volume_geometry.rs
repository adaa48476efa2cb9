//! Volumes of the index cones inside the unit ball of an invariant metric.
//!
//! In `q`-orthonormal frame coordinates `(x, y, z, w)` the unit ball is the
//! Euclidean one and `T > 0` exactly when `sqrt(z² + w²) / sqrt(x² + y²)` is
//! below `tan(beta0) = m1 / (3 m2)`. Integrating in the polar coordinates of
//! each plane gives `V+ = (π²/2) sin²(beta0)` and `V- = (π²/2) cos²(beta0)`, so
//! `V- / V+ = 9 sigma²`.
//!
//! The Monte Carlo estimators classify samples by the sign of `T` and are
//! deterministic for a fixed seed; see [`crate::stream`] for the chunking.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic_forms::{index_form, CubicForm};
use crate::error::{Error, Result};
use crate::invariant_metrics::InvariantMetric;
use crate::stream::{chunks, substream, CHUNK_SIZE};

/// Volume of the Euclidean unit ball in four dimensions.
pub const UNIT_BALL_VOLUME: f64 = PI * PI / 2.0;

/// Samples with `|T(u)| < DISCARD_TOL * ‖u‖²` are left unclassified.
pub const DISCARD_TOL: f64 = 1e-12;

/// Largest tolerated fraction of unclassified samples.
pub const MAX_DISCARD_FRACTION: f64 = 1e-3;

pub const MIN_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeVolumes {
    pub beta0: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub v_total: f64,
}

impl ConeVolumes {
    pub fn ratio(&self) -> f64 {
        self.v_minus / self.v_plus
    }
}

pub fn cone_volumes(q: &InvariantMetric) -> ConeVolumes {
    let beta0 = (q.m1() / (3.0 * q.m2())).atan();
    let sin2 = beta0.sin().powi(2);
    ConeVolumes {
        beta0,
        v_plus: UNIT_BALL_VOLUME * sin2,
        v_minus: UNIT_BALL_VOLUME * (1.0 - sin2),
        v_total: UNIT_BALL_VOLUME,
    }
}

/// `V- / V+ = 9 sigma²`.
pub fn ratio_closed_form(q: &InvariantMetric) -> f64 {
    9.0 * q.asymmetry().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Uniform on the unit sphere `q = 1`.
    #[default]
    Sphere,
    /// Uniform in the unit ball `q <= 1`.
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub n_discarded: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Standardized deviation from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.estimate - target) / self.std_error
    }
}

fn standard_normal4(rng: &mut impl Rng) -> [f64; 4] {
    std::array::from_fn(|_| StandardNormal.sample(rng))
}

/// Draws a point uniformly from the unit sphere `{q(u) = 1}`.
pub fn sample_unit_sphere(q: &InvariantMetric, rng: &mut impl Rng) -> CubicForm {
    q.from_frame_coords(unit_direction(rng))
}

fn unit_direction(rng: &mut impl Rng) -> [f64; 4] {
    loop {
        let g = standard_normal4(rng);
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return g.map(|x| x / norm);
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct SignCounts {
    negative: u64,
    positive: u64,
    discarded: u64,
}

impl SignCounts {
    fn record(&mut self, u: &CubicForm) {
        let t = index_form(u);
        if t.abs() < DISCARD_TOL * u.norm_squared() || t == 0.0 {
            self.discarded += 1;
        } else if t < 0.0 {
            self.negative += 1;
        } else {
            self.positive += 1;
        }
    }

    fn merge(self, other: SignCounts) -> SignCounts {
        SignCounts {
            negative: self.negative + other.negative,
            positive: self.positive + other.positive,
            discarded: self.discarded + other.discarded,
        }
    }

    fn into_ratio(self, n: u64, seed: u64) -> Result<McEstimate> {
        if self.discarded as f64 > MAX_DISCARD_FRACTION * n as f64 {
            return Err(Error::DegenerateCount {
                discarded: self.discarded,
                n,
            });
        }
        if self.positive == 0 || self.negative == 0 {
            return Err(Error::EmptyCone);
        }
        let (neg, pos) = (self.negative as f64, self.positive as f64);
        let estimate = neg / pos;
        Ok(McEstimate {
            estimate,
            std_error: estimate * (1.0 / neg + 1.0 / pos).sqrt(),
            n_samples: n,
            n_discarded: self.discarded,
            seed,
        })
    }
}

fn check_sample_count(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {n}"
        )));
    }
    Ok(())
}

fn count_signs<F>(n: u64, seed: u64, draw: F) -> SignCounts
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> CubicForm + Sync,
{
    chunks(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(chunk, len)| {
            let mut rng = substream(seed, chunk);
            let mut counts = SignCounts::default();
            for _ in 0..len {
                counts.record(&draw(&mut rng));
            }
            counts
        })
        .reduce(SignCounts::default, SignCounts::merge)
}

/// Estimates `V- / V+` with samples on the unit sphere of `q`.
pub fn mc_ratio(q: &InvariantMetric, n: u64, seed: u64) -> Result<McEstimate> {
    mc_ratio_with_mode(q, n, seed, SamplingMode::Sphere)
}

pub fn mc_ratio_with_mode(
    q: &InvariantMetric,
    n: u64,
    seed: u64,
    mode: SamplingMode,
) -> Result<McEstimate> {
    check_sample_count(n)?;
    let counts = count_signs(n, seed, |rng| {
        let dir = unit_direction(rng);
        match mode {
            SamplingMode::Sphere => q.from_frame_coords(dir),
            SamplingMode::Ball => {
                let radius = rng.random::<f64>().powf(0.25);
                q.from_frame_coords(dir.map(|c| radius * c))
            }
        }
    });
    counts.into_ratio(n, seed)
}

/// Hit-or-miss estimate of the volume of `{q(u) <= 1}` in frame coordinates,
/// sampling the cube `[-1, 1]⁴`.
pub fn mc_ball_volume(q: &InvariantMetric, n: u64, seed: u64) -> Result<McEstimate> {
    check_sample_count(n)?;
    let hits: u64 = chunks(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(chunk, len)| {
            let mut rng = substream(seed, chunk);
            (0..len)
                .filter(|_| {
                    let coords: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
                    q.evaluate(&q.from_frame_coords(coords)) <= 1.0
                })
                .count() as u64
        })
        .sum();
    let p = hits as f64 / n as f64;
    let cube = 16.0;
    Ok(McEstimate {
        estimate: cube * p,
        std_error: cube * (p * (1.0 - p) / n as f64).sqrt(),
        n_samples: n,
        n_discarded: 0,
        seed,
    })
}

/// Negative/positive index ratio over a centered Gaussian ensemble of cubic
/// forms with covariance `Q⁻¹`.
///
/// Coefficients are drawn as `L g` with `L Lᵀ = Q⁻¹` (Cholesky) and `g`
/// standard normal, independently of the orthonormal frame. The Gaussian is
/// rotation-invariant and uniform on each sphere `q = const`, so the ratio
/// matches [`ratio_closed_form`].
pub fn gaussian_census(q: &InvariantMetric, n: u64, seed: u64) -> Result<McEstimate> {
    check_sample_count(n)?;
    let factor = covariance_factor(q)?;
    let counts = count_signs(n, seed, |rng| {
        let g = nalgebra::Vector4::from(standard_normal4(rng));
        let u = factor * g;
        CubicForm::new(u[0], u[1], u[2], u[3])
    });
    counts.into_ratio(n, seed)
}

fn covariance_factor(q: &InvariantMetric) -> Result<Matrix4<f64>> {
    let singular = || Error::NotAdmissible {
        alpha: q.alpha(),
        beta: q.beta(),
        reason: "metric matrix is not positive definite",
    };
    let cov = q.q_matrix().try_inverse().ok_or_else(singular)?;
    // symmetrize away rounding before factoring
    let cov = 0.5 * (cov + cov.transpose());
    Ok(cov.cholesky().ok_or_else(singular)?.l())
}

/// Number of samples per deterministic chunk, exposed for reports.
pub fn chunk_size() -> u64 {
    CHUNK_SIZE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant_metrics::q_pattern;
    use crate::stream::substream;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn metric(alpha: f64, beta: f64) -> InvariantMetric {
        InvariantMetric::new(alpha, beta).unwrap()
    }

    #[test]
    fn cone_volumes_alpha_zero() {
        let v = cone_volumes(&metric(0.0, 3.0));
        assert_relative_eq!(v.beta0, PI / 6.0, epsilon = 1e-15);
        assert_relative_eq!(v.v_plus, PI * PI / 8.0, epsilon = 1e-14);
        assert_relative_eq!(v.v_minus, 3.0 * PI * PI / 8.0, epsilon = 1e-14);
        assert_relative_eq!(v.ratio(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn cone_volumes_balanced_line() {
        let v = cone_volumes(&metric(-0.2, 1.0));
        assert_relative_eq!(v.v_plus, PI * PI / 4.0, epsilon = 1e-12);
        assert_relative_eq!(v.v_minus, PI * PI / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn ratio_examples() {
        assert_relative_eq!(ratio_closed_form(&metric(0.0, 3.0)), 3.0, epsilon = 1e-14);
        assert_relative_eq!(ratio_closed_form(&metric(0.25, 1.75)), 5.0, epsilon = 1e-14);
        assert_relative_eq!(ratio_closed_form(&metric(-0.2, 1.0)), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn volume_identities_on_sweep() {
        for i in 1..100 {
            let beta = 2.0;
            let alpha = -beta / 3.0 + (4.0 * beta / 3.0) * f64::from(i) / 100.0;
            let q = metric(alpha, beta);
            let v = cone_volumes(&q);
            assert!(v.beta0 > 0.0 && v.beta0 < PI / 2.0);
            assert!((v.v_plus + v.v_minus - UNIT_BALL_VOLUME).abs() <= 1e-12);
            let sin2 = v.beta0.sin().powi(2);
            let chain = [
                v.v_minus / v.v_plus,
                (1.0 - sin2) / sin2,
                1.0 / v.beta0.tan().powi(2),
                9.0 * (q.m2() / q.m1()).powi(2),
            ];
            for w in chain.windows(2) {
                assert_relative_eq!(w[0], w[1], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn ratio_increases_with_alpha() {
        let beta = 1.5;
        let ratios: Vec<f64> = (1..=100)
            .map(|i| {
                let alpha = -beta / 3.0 + (4.0 * beta / 3.0) * f64::from(i) / 101.0;
                ratio_closed_form(&metric(alpha, beta))
            })
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sphere_samples() {
        let q = metric(0.25, 1.75);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let mut sums = [0.0f64; 4];
        let mut positive = 0u64;
        for _ in 0..n {
            let u = sample_unit_sphere(&q, &mut rng);
            assert!((q.evaluate(&u) - 1.0).abs() <= 1e-12);
            for (s, c) in sums.iter_mut().zip(q.to_frame_coords(&u)) {
                *s += c;
            }
            if index_form(&u) > 0.0 {
                positive += 1;
            }
        }
        // each coordinate of a uniform unit vector in R⁴ has variance 1/4
        let se = (0.25 / n as f64).sqrt();
        for s in sums {
            assert!((s / n as f64).abs() <= 4.0 * se);
        }
        let expected = cone_volumes(&q).v_plus / UNIT_BALL_VOLUME;
        let frac = positive as f64 / n as f64;
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((frac - expected).abs() <= 4.0 * se, "{frac} vs {expected}");
    }

    #[test]
    fn mc_ratio_matches_closed_form() {
        for (alpha, beta) in [(0.0, 3.0), (0.25, 1.75), (-0.2, 1.0)] {
            let q = metric(alpha, beta);
            let est = mc_ratio(&q, 1_000_000, 42).unwrap();
            let target = ratio_closed_form(&q);
            assert!(est.z_score(target).abs() <= 3.0, "{alpha},{beta}: {est:?}");
            assert_eq!(est.n_samples, 1_000_000);
        }
    }

    #[test]
    fn ball_mode_agrees_with_sphere_mode() {
        let q = metric(0.25, 1.75);
        let sphere = mc_ratio(&q, 200_000, 5).unwrap();
        let ball = mc_ratio_with_mode(&q, 200_000, 6, SamplingMode::Ball).unwrap();
        let combined = (sphere.std_error.powi(2) + ball.std_error.powi(2)).sqrt();
        assert!((sphere.estimate - ball.estimate).abs() <= 3.0 * combined);
        assert!(ball.z_score(5.0).abs() <= 3.0);
    }

    #[test]
    fn mc_ratio_convergence_over_seeds() {
        let q = metric(0.0, 3.0);
        let within = (0..100)
            .filter(|&seed| mc_ratio(&q, 100_000, seed).unwrap().z_score(3.0).abs() <= 3.0)
            .count();
        assert!(within >= 99, "{within}/100 within 3 sigma");
    }

    #[test]
    fn mc_is_deterministic() {
        let q = metric(0.1, 2.0);
        assert_eq!(mc_ratio(&q, 150_000, 9).unwrap(), mc_ratio(&q, 150_000, 9).unwrap());
        assert_eq!(
            mc_ball_volume(&q, 50_000, 9).unwrap(),
            mc_ball_volume(&q, 50_000, 9).unwrap()
        );
        assert_eq!(
            gaussian_census(&q, 50_000, 9).unwrap(),
            gaussian_census(&q, 50_000, 9).unwrap()
        );
        assert_ne!(mc_ratio(&q, 150_000, 9).unwrap(), mc_ratio(&q, 150_000, 10).unwrap());
    }

    #[test]
    fn mc_is_independent_of_thread_count() {
        let q = metric(0.1, 2.0);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_ratio(&q, 300_000, 77).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn too_few_samples() {
        let q = metric(0.0, 3.0);
        assert!(matches!(mc_ratio(&q, 9_999, 1), Err(Error::InvalidArgument(_))));
        assert!(mc_ball_volume(&q, 10, 1).is_err());
        assert!(gaussian_census(&q, 10, 1).is_err());
    }

    #[test]
    fn ball_volume() {
        let estimates: Vec<McEstimate> = [(0.0, 3.0), (0.25, 1.75), (-0.2, 1.0)]
            .iter()
            .map(|&(a, b)| mc_ball_volume(&metric(a, b), 1_000_000, 2024).unwrap())
            .collect();
        for e in &estimates {
            assert!(e.z_score(UNIT_BALL_VOLUME).abs() <= 3.0, "{e:?}");
        }
        for pair in estimates.windows(2) {
            let combined = (pair[0].std_error.powi(2) + pair[1].std_error.powi(2)).sqrt();
            assert!((pair[0].estimate - pair[1].estimate).abs() <= 3.0 * combined);
        }
        let small = mc_ball_volume(&metric(0.0, 3.0), 10_000, 1).unwrap();
        let shrink = small.std_error / estimates[0].std_error;
        assert!((8.0..12.5).contains(&shrink), "{shrink}");
    }

    #[test]
    fn census_matches_closed_form() {
        for (alpha, beta) in [(0.0, 3.0), (-0.2, 1.0)] {
            let q = metric(alpha, beta);
            let est = gaussian_census(&q, 1_000_000, 17).unwrap();
            assert!(est.z_score(ratio_closed_form(&q)).abs() <= 3.0, "{est:?}");
        }
    }

    #[test]
    fn census_covariance_is_inverse_metric() {
        let q = metric(0.3, 1.2);
        let l = covariance_factor(&q).unwrap();
        let prod = l * l.transpose() * q_pattern(0.3, 1.2);
        assert!((prod - Matrix4::identity()).amax() < 1e-12);
    }

    #[test]
    fn discard_accounting() {
        let mut counts = SignCounts::default();
        counts.record(&CubicForm::new(1.0, 0.0, 1.0, 0.0));
        counts.record(&CubicForm::new(3.0, 0.0, 1.0, 0.0));
        assert_eq!((counts.discarded, counts.positive), (1, 1));
        let broken = SignCounts {
            negative: 10,
            positive: 10,
            discarded: 20,
        };
        assert!(matches!(
            broken.into_ratio(10_000, 0),
            Err(Error::DegenerateCount { discarded: 20, .. })
        ));
    }

    #[test]
    fn substream_reuse_reproduces_sample() {
        let q = metric(0.0, 3.0);
        let a = sample_unit_sphere(&q, &mut substream(1, 2));
        let b = sample_unit_sphere(&q, &mut substream(1, 2));
        assert_eq!(a, b);
    }
}
