use crate::error::{domain, Error, Result};

/// Sample autocorrelations ρ̂(0..=max_lag) with the biased (1/N),
/// mean-centred autocovariance.
pub fn acf(states: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = states.len();
    if n <= max_lag {
        return Err(domain(format!("need more than {max_lag} states for lag {max_lag}, got {n}")));
    }
    let mean = states.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = states.iter().map(|x| x - mean).collect();
    let gamma0 = centred.iter().map(|d| d * d).sum::<f64>() / n as f64;
    if !(gamma0 > 0.0) {
        return Err(Error::DegenerateSeries("series has zero variance".into()));
    }
    Ok((0..=max_lag)
        .map(|k| {
            let gk: f64 = centred[..n - k].iter().zip(&centred[k..]).map(|(a, b)| a * b).sum();
            gk / n as f64 / gamma0
        })
        .collect())
}

/// sup_x |F̂_N(x) − F(x)| for the empirical CDF of `states` against `cdf`.
pub fn ks_distance_by(states: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if states.is_empty() {
        return Err(domain("KS distance needs at least one state"));
    }
    let mut xs = states.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // Ties form one jump of the empirical CDF.
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alternating_series_has_lag_one_near_minus_one() {
        let s: Vec<f64> = (0..1000).map(|i| 3.0 + if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = acf(&s, 2).unwrap();
        assert_eq!(r[0], 1.0);
        assert!((r[1] + 1.0).abs() < 2e-3);
        assert!((r[2] - 1.0).abs() < 3e-3);
    }

    #[test]
    fn white_noise_stays_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let n = 10_000;
        let s: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let r = acf(&s, 20).unwrap();
        let bound = 3.0 / (n as f64).sqrt();
        assert!(r[1..].iter().all(|x| x.abs() < bound), "{r:?}");
    }

    #[test]
    fn acf_matches_direct_formula() {
        let s = [0.1, 0.5, 0.2, 0.9, 0.4];
        let m = 0.42;
        let d: Vec<f64> = s.iter().map(|x| x - m).collect();
        let g0: f64 = d.iter().map(|x| x * x).sum();
        let g2: f64 = d[0] * d[2] + d[1] * d[3] + d[2] * d[4];
        let r = acf(&s, 2).unwrap();
        assert!((r[2] - g2 / g0).abs() < 1e-14);
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert!(matches!(acf(&[0.5; 10], 3), Err(Error::DegenerateSeries(_))));
        assert!(acf(&[0.1, 0.2], 2).is_err());
    }

    #[test]
    fn point_mass_against_uniform() {
        let d = ks_distance_by(&[0.5; 100], |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quantile_grid_is_close() {
        let n = 999;
        let s: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let d = ks_distance_by(&s, |x| x).unwrap();
        assert!(d <= 1.0 / n as f64);
    }

    #[test]
    fn single_point() {
        assert!((ks_distance_by(&[0.3], |x| x).unwrap() - 0.7).abs() < 1e-15);
        assert!(ks_distance_by(&[], |x| x).is_err());
    }
}
