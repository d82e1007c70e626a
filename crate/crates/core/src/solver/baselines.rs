//! Mean-method and median-method parameterizations, the baselines the
//! maximum-density solver is compared against.

use super::constraint::ScaleConstraint;
use crate::distributions::{beta_exists, BetaParams, DirichletParams, SimplexPoint};
use crate::error::{domain, Error, Result};

/// Dirichlet(α c_1, …, α c_K): the mean equals the target.
pub fn mean_method(c: &SimplexPoint, alpha: f64) -> Result<DirichletParams> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain(format!("concentration must be positive, got {alpha}")));
    }
    DirichletParams::new(c.as_slice().iter().map(|ci| alpha * ci).collect())
}

/// Beta(α c, α (1 − c)).
pub fn mean_method_beta(c: f64, alpha: f64) -> Result<BetaParams> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain(format!("concentration must be positive, got {alpha}")));
    }
    BetaParams::from_mean_concentration(c, alpha)
}

/// The Beta with mean `c` and variance `v`, if one exists.
///
/// Its concentration is α = c (1 − c) / v − 1.
pub fn mean_method_fixed_variance(c: f64, v: f64) -> Result<BetaParams> {
    if !(c > 0.0 && c < 1.0) {
        return Err(domain(format!("target location must lie in (0, 1), got {c}")));
    }
    if !beta_exists(c, v) {
        return Err(Error::NonExistence { mean: c, variance: v });
    }
    let alpha = c * (1.0 - c) / v - 1.0;
    BetaParams::from_mean_concentration(c, alpha)
}

/// Standard deviation min{c, 1 − c, √v_cap} used by the adaptive-variance
/// method.
pub fn adaptive_sd(c: f64, v_cap: f64) -> f64 {
    c.min(1.0 - c).min(v_cap.sqrt())
}

/// Mean `c` with standard deviation min{c, 1 − c, √v_cap}.
pub fn adaptive_variance_method(c: f64, v_cap: f64) -> Result<BetaParams> {
    if !(v_cap > 0.0) {
        return Err(domain(format!("variance cap must be positive, got {v_cap}")));
    }
    let sd = adaptive_sd(c, v_cap);
    mean_method_fixed_variance(c, sd * sd)
}

/// Grid points on the logit scale used to bracket the median root.
const MEDIAN_GRID: usize = 161;
const MEDIAN_LOGIT_SPAN: f64 = 40.0;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisects f on [−span, span] when the endpoints bracket a root.
fn endpoint_bisect(f: &impl Fn(f64) -> f64) -> Option<f64> {
    let (f_lo, f_hi) = (f(-MEDIAN_LOGIT_SPAN), f(MEDIAN_LOGIT_SPAN));
    (f_lo.signum() != f_hi.signum()).then(|| bisect(f, -MEDIAN_LOGIT_SPAN, MEDIAN_LOGIT_SPAN, f_lo))
}

/// Seeds from a grid so a non-monotone curve still gets a valid bracket,
/// then bisects the first sign change.
fn grid_bisect(f: &impl Fn(f64) -> f64) -> Option<f64> {
    let step = 2.0 * MEDIAN_LOGIT_SPAN / (MEDIAN_GRID - 1) as f64;
    let mut prev_z = -MEDIAN_LOGIT_SPAN;
    let mut prev_f = f(prev_z);
    if prev_f == 0.0 {
        return Some(prev_z);
    }
    for i in 1..MEDIAN_GRID {
        let z = -MEDIAN_LOGIT_SPAN + step * i as f64;
        let fz = f(z);
        if fz == 0.0 {
            return Some(z);
        }
        if prev_f.signum() != fz.signum() {
            return Some(bisect(f, prev_z, z, prev_f));
        }
        prev_z = z;
        prev_f = fz;
    }
    None
}

const MEDIAN_TOL: f64 = 1e-8;

/// The Beta with median `c` and the given concentration or variance.
///
/// Concentration α: searches a along a + b = α. Variance v: searches the
/// mean u over the feasible interval (½ − ½√(1−4v), ½ + ½√(1−4v)) with
/// α(u) = u (1 − u) / v − 1.
pub fn median_method(c: f64, constraint: ScaleConstraint) -> Result<BetaParams> {
    if !(c > 0.0 && c < 1.0) {
        return Err(domain(format!("target location must lie in (0, 1), got {c}")));
    }
    constraint.validate(2)?;
    let params_at: Box<dyn Fn(f64) -> Option<BetaParams>> = match constraint {
        ScaleConstraint::Concentration(alpha) => Box::new(move |z: f64| {
            let u = sigmoid(z);
            BetaParams::new(alpha * u, alpha * (1.0 - u)).ok()
        }),
        ScaleConstraint::Variance(v) => {
            let half_width = 0.5 * (1.0 - 4.0 * v).sqrt();
            let (lo, hi) = (0.5 - half_width, 0.5 + half_width);
            Box::new(move |z: f64| {
                let u = lo + (hi - lo) * sigmoid(z);
                let alpha = u * (1.0 - u) / v - 1.0;
                BetaParams::from_mean_concentration(u, alpha).ok()
            })
        }
        ScaleConstraint::MeanCosineError(_) => {
            return Err(Error::InfeasibleConstraint(
                "the median method supports concentration or variance constraints".into(),
            ))
        }
    };
    // Degenerate ends of the curve (shapes underflowing to zero) sit below
    // any interior target on the left and above it on the right.
    let err = |z: f64| match params_at(z) {
        Some(p) => p.median() - c,
        None => z.signum(),
    };
    let accept = |z: f64| params_at(z).filter(|p| (p.median() - c).abs() <= MEDIAN_TOL);
    if let Some(p) = endpoint_bisect(&err).and_then(accept) {
        return Ok(p);
    }
    grid_bisect(&err).and_then(accept).ok_or(Error::ConvergenceFailure { iterations: MEDIAN_GRID, restarts: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mean_method_examples() {
        let c = SimplexPoint::binary(0.2).unwrap();
        let p = mean_method(&c, 10.0).unwrap();
        assert_eq!(p.alpha(), &[2.0, 8.0]);
        assert_eq!(p.mean(), vec![0.2, 0.8]);
        let b = mean_method_beta(0.001, 10.0).unwrap();
        assert!((b.a() - 0.01).abs() < 1e-15 && (b.b() - 9.99).abs() < 1e-12);
    }

    #[test]
    fn fixed_variance_examples() {
        let p = mean_method_fixed_variance(0.5, 0.1).unwrap();
        assert!((p.a() - 0.75).abs() < 1e-14 && (p.b() - 0.75).abs() < 1e-14);
        assert_eq!(mean_method_fixed_variance(0.9, 0.1), Err(Error::NonExistence { mean: 0.9, variance: 0.1 }));
        let p = mean_method_fixed_variance(0.5, 0.25 - 1e-9).unwrap();
        assert!(p.concentration() < 1e-7);
    }

    #[test]
    fn adaptive_variance_examples() {
        let p = adaptive_variance_method(0.5, 0.1).unwrap();
        assert_eq!(p, mean_method_fixed_variance(0.5, 0.1).unwrap());
        assert!(beta_exists(0.001, 1e-6));
        let p = adaptive_variance_method(0.001, 0.1).unwrap();
        assert!((p.mean() - 0.001).abs() < 1e-15);
        assert!((p.variance().sqrt() - 0.001).abs() < 1e-12);
    }

    #[test]
    fn adaptive_variance_always_exists() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let c = rng.random_range(1e-9..1.0 - 1e-9);
            let p = adaptive_variance_method(c, 0.1).unwrap();
            assert!((p.mean() - c).abs() < 1e-12);
        }
    }

    #[test]
    fn median_concentration_symmetric() {
        for alpha in [0.5, 5.0, 40.0] {
            let p = median_method(0.5, ScaleConstraint::Concentration(alpha)).unwrap();
            assert!((p.a() - alpha / 2.0).abs() < 1e-9 * alpha);
        }
    }

    #[test]
    fn median_round_trip() {
        let p = median_method(0.2, ScaleConstraint::Concentration(10.0)).unwrap();
        assert!((p.median() - 0.2).abs() < 1e-8);
        assert!((p.concentration() - 10.0).abs() < 1e-12);
        for c in [1e-4, 0.001, 0.2, 0.7] {
            for alpha in [0.1, 1.0, 50.0] {
                let p = median_method(c, ScaleConstraint::Concentration(alpha)).unwrap();
                assert!((p.median() - c).abs() < 1e-8, "c={c}, α={alpha}");
            }
        }
    }

    #[test]
    fn median_variance_reaches_near_boundary_targets() {
        // Near 0.9 the mean-method interval (0.1127, 0.8873) excludes the
        // target, but a median of 0.9 is still attainable.
        let p = median_method(0.9, ScaleConstraint::Variance(0.1)).unwrap();
        assert!((p.median() - 0.9).abs() < 1e-8);
        assert!((p.variance() / 0.1 - 1.0).abs() < 1e-10);
        assert!(beta_exists(p.mean(), 0.1));
        let p = median_method(0.001, ScaleConstraint::Variance(1e-6)).unwrap();
        assert!((p.median() - 0.001).abs() < 1e-8);
    }

    #[test]
    fn median_is_monotone_along_constraint_curves() {
        for alpha in [0.1, 1.0, 10.0] {
            let mut prev = 0.0;
            for i in 1..200 {
                let u = i as f64 / 200.0;
                let m = BetaParams::new(alpha * u, alpha * (1.0 - u)).unwrap().median();
                assert!(m >= prev);
                prev = m;
            }
        }
        let v = 0.1;
        let hw = 0.5 * (1.0f64 - 4.0 * v).sqrt();
        let mut prev = 0.0;
        for i in 1..200 {
            let u = 0.5 - hw + 2.0 * hw * i as f64 / 200.0;
            let m = BetaParams::from_mean_concentration(u, u * (1.0 - u) / v - 1.0).unwrap().median();
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn median_rejects_cosine_constraint() {
        assert!(median_method(0.3, ScaleConstraint::MeanCosineError(0.1)).is_err());
    }
}
