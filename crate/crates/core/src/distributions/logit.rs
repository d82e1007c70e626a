//! Distance between a draw and the target location on the logit scale.

use rand::Rng;

use super::beta::BetaParams;
use super::dirichlet::{DirichletParams, SimplexPoint};
use super::gamma::{ln_gamma_variate, log_add_exp, log_sum_exp};
use crate::error::{domain, Result};
use crate::special::log_beta_unchecked;

/// ln(1 + e^x) without underflow for x ≪ 0 or overflow for x ≫ 0.
pub fn log1p_exp(x: f64) -> f64 {
    if x < 0.0 {
        x.exp().ln_1p()
    } else {
        (-x).exp().ln_1p() + x
    }
}

pub fn logit(x: f64) -> f64 {
    x.ln() - (-x).ln_1p()
}

/// ln f_Y(y) for Y = |logit(X) − logit(c)|, X ~ Beta(a, b).
///
/// The density has one branch from each side of c. With t the signed offset
/// on the logit scale, x = 1/(1 + e^t) and |dx/dt| = e^t / (1 + e^t)²; both
/// branches are formed as logs and combined with log-sum-exp.
pub fn logit_distance_log_density(p: &BetaParams, c: f64, y: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(domain(format!("target location must lie in (0, 1), got {c}")));
    }
    if !(y > 0.0 && y.is_finite()) {
        return Err(domain(format!("logit distance must be positive, got {y}")));
    }
    let ln_b = log_beta_unchecked(p.a(), p.b());
    let ell = logit(c);
    let branch = |t: f64| {
        let softplus = log1p_exp(t);
        let ln_x = -softplus;
        let ln_1mx = t - softplus;
        let ln_jac = t - 2.0 * softplus;
        (p.a() - 1.0) * ln_x + (p.b() - 1.0) * ln_1mx - ln_b + ln_jac
    };
    Ok(log_add_exp(branch(y - ell), branch(-y - ell)))
}

/// Monte Carlo draws of Y = Σ_i |logit(X_i) − logit(c_i)|, X ~ Dirichlet(a).
///
/// Logits are formed from the log-Gamma variates directly, so coordinates
/// far below `f64::MIN_POSITIVE` still contribute their true distance.
pub fn logit_distance_samples<R: Rng + ?Sized>(
    p: &DirichletParams,
    c: &SimplexPoint,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    p.check_dim(c.len())?;
    let target: Vec<f64> = c.as_slice().iter().map(|&ci| logit(ci)).collect();
    let k = p.len();
    let mut ln_g = vec![0.0; k];
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        for (g, &a) in ln_g.iter_mut().zip(p.alpha()) {
            *g = ln_gamma_variate(a, rng);
        }
        let lse = log_sum_exp(&ln_g);
        let mut y = 0.0;
        for i in 0..k {
            let ln_x = ln_g[i] - lse;
            let ln_rest = if ln_x < -std::f64::consts::LN_2 {
                (-ln_x.exp()).ln_1p()
            } else {
                let others =
                    log_sum_exp(&ln_g.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| *g).collect::<Vec<_>>());
                others - lse
            };
            y += (ln_x - ln_rest - target[i]).abs();
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn log1p_exp_guards_both_tails() {
        assert_eq!(log1p_exp(-800.0), 0.0f64.max((-800f64).exp().ln_1p()));
        assert!((log1p_exp(800.0) - 800.0).abs() < 1e-12);
        assert!((log1p_exp(0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log1p_exp(-40.0) - (-40f64).exp()).abs() < 1e-30);
    }

    #[test]
    fn uniform_at_half_near_zero() {
        let p = BetaParams::new(1.0, 1.0).unwrap();
        let v = logit_distance_log_density(&p, 0.5, 1e-12).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = BetaParams::new(1.0, 1.0).unwrap();
        assert!(logit_distance_log_density(&p, 0.5, 0.0).is_err());
        assert!(logit_distance_log_density(&p, 0.5, -1.0).is_err());
        assert!(logit_distance_log_density(&p, 1.0, 1.0).is_err());
        let d = DirichletParams::new(vec![1.0; 3]).unwrap();
        let c = SimplexPoint::binary(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(logit_distance_samples(&d, &c, 10, &mut rng).is_err());
    }

    #[test]
    fn dirichlet_samples_are_positive() {
        let d = DirichletParams::new(vec![0.01, 0.2, 0.3, 0.1, 0.39]).unwrap();
        let c = SimplexPoint::new(vec![0.01, 0.1, 0.2, 0.3, 0.39]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ys = logit_distance_samples(&d, &c, 5000, &mut rng).unwrap();
        assert!(ys.iter().all(|y| *y > 0.0 && y.is_finite()));
    }
}
