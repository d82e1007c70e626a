use crate::distributions::BetaParams;
use crate::error::{domain, Result};

/// Shortest interval [lo, hi] holding `level` of the Beta mass.
///
/// a ≤ 1 < b is decreasing: [0, Q(level)]. b ≤ 1 < a is increasing:
/// [Q(1 − level), 1]. a, b ≤ 1 (flat or U-shaped) returns the shorter of
/// those two, ties going to [0, Q(level)]. Otherwise the interval with equal
/// density at both ends, found by bisecting on the lower-tail mass.
pub fn hpd_interval(p: &BetaParams, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(domain(format!("credible level must lie in (0, 1), got {level}")));
    }
    let (a, b) = (p.a(), p.b());
    let lower = || p.quantile(level).map(|q| (0.0, q));
    let upper = || p.quantile(1.0 - level).map(|q| (q, 1.0));
    match (a <= 1.0, b <= 1.0) {
        (true, false) => lower(),
        (false, true) => upper(),
        (true, true) => {
            let (l, u) = (lower()?, upper()?);
            Ok(if l.1 - l.0 <= u.1 - u.0 { l } else { u })
        }
        (false, false) => unimodal(p, level),
    }
}

fn unimodal(p: &BetaParams, level: f64) -> Result<(f64, f64)> {
    let ends = |pl: f64| -> Result<(f64, f64)> { Ok((p.quantile(pl)?, p.quantile(pl + level)?)) };
    // ln f(l) − ln f(u): negative while l sits below the mode side's match.
    let gap = |(l, u): (f64, f64)| {
        let fl = if l > 0.0 { p.log_density_unchecked(l) } else { f64::NEG_INFINITY };
        let fu = if u < 1.0 { p.log_density_unchecked(u) } else { f64::NEG_INFINITY };
        fl - fu
    };
    let (mut lo, mut hi) = (0.0, 1.0 - level);
    let mut best = ends(0.5 * (lo + hi))?;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        best = ends(mid)?;
        let g = gap(best);
        if g.abs() <= 1e-12 {
            break;
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta(a: f64, b: f64) -> BetaParams {
        BetaParams::new(a, b).unwrap()
    }

    #[test]
    fn flat_density_tie_break() {
        let (l, u) = hpd_interval(&beta(1.0, 1.0), 0.95).unwrap();
        assert_eq!(l, 0.0);
        assert!((u - 0.95).abs() < 1e-12);
    }

    #[test]
    fn symmetric_unimodal() {
        let (l, u) = hpd_interval(&beta(2.0, 2.0), 0.95).unwrap();
        assert!((l + u - 1.0).abs() < 1e-8);
        // F(x) = 3x² − 2x³; symmetric interval mass 1 − 2F(l) = 0.95.
        let f = |x: f64| 3.0 * x * x - 2.0 * x * x * x;
        assert!((1.0 - 2.0 * f(l) - 0.95).abs() < 1e-8);
    }

    #[test]
    fn decreasing_density_closed_form() {
        let (l, u) = hpd_interval(&beta(1.0, 101.0), 0.95).unwrap();
        assert_eq!(l, 0.0);
        assert!((u - (1.0 - 0.05f64.powf(1.0 / 101.0))).abs() < 1e-12);
    }

    #[test]
    fn increasing_density() {
        let (l, u) = hpd_interval(&beta(3.0, 0.5), 0.9).unwrap();
        assert_eq!(u, 1.0);
        assert!((beta(3.0, 0.5).cdf(l) - 0.1).abs() < 1e-10);
    }

    #[test]
    fn u_shaped_takes_shorter_side() {
        let p = beta(0.3, 0.6);
        let (l, u) = hpd_interval(&p, 0.8).unwrap();
        let lower = p.quantile(0.8).unwrap();
        let upper = 1.0 - p.quantile(0.2).unwrap();
        assert!((u - l - lower.min(upper)).abs() < 1e-12);
    }

    #[test]
    fn unimodal_mass_and_equal_density() {
        for (a, b) in [(1.5, 30.0), (2.0, 9.0), (50.0, 3.0), (1.01, 1.02), (11.0, 90.0)] {
            let p = beta(a, b);
            let (l, u) = hpd_interval(&p, 0.95).unwrap();
            assert!((p.cdf(u) - p.cdf(l) - 0.95).abs() < 1e-8, "({a},{b})");
            let (fl, fu) = (p.log_density(l).unwrap(), p.log_density(u).unwrap());
            assert!((fl - fu).abs() < 1e-6, "({a},{b}): {fl} vs {fu}");
        }
    }

    #[test]
    fn hpd_is_shortest_among_equal_mass_intervals() {
        let p = beta(2.5, 12.0);
        let (l, u) = hpd_interval(&p, 0.9).unwrap();
        for i in 1..100 {
            let pl = 0.1 * i as f64 / 100.0;
            let w = p.quantile(pl + 0.9).unwrap() - p.quantile(pl).unwrap();
            assert!(w >= u - l - 1e-12);
        }
    }

    #[test]
    fn bad_level() {
        assert!(hpd_interval(&beta(2.0, 2.0), 1.0).is_err());
        assert!(hpd_interval(&beta(2.0, 2.0), 0.0).is_err());
    }
}
