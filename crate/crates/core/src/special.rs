//! Scalar special functions: log-gamma, digamma, trigamma, the log beta
//! function, the regularized incomplete beta function and its inverse, and
//! the binomial log-pmf.
//!
//! Everything here is pure and works in `f64`. Arguments outside the
//! mathematical domain produce [`Error::Domain`] rather than NaN.

use crate::error::{domain, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// ζ(k) for k = 2..=30, used by the Taylor series of ln Γ(1 + z).
const ZETA: [f64; 29] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_37,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926,
    1.000_000_059_608_189,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
];

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} requires a positive finite argument, got {x}")))
    }
}

/// ln Γ(1 + z) for |z| ≤ 0.25 by its Taylor series at 1.
fn ln_gamma_1p_series(z: f64) -> f64 {
    let mut acc = 0.0;
    let mut zk = z;
    for (i, zeta) in ZETA.iter().enumerate() {
        zk *= z;
        let k = (i + 2) as f64;
        let term = zeta * zk / k;
        // (-1)^k
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    -EULER_GAMMA * z + acc
}

/// Stirling series, accurate to ~1e-16 relative for x ≥ 10.
fn ln_gamma_stirling(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    let series = r
        * (1.0 / 12.0
            - r2 * (1.0 / 360.0
                - r2 * (1.0 / 1260.0
                    - r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0 - r2 * (691.0 / 360_360.0 - r2 / 156.0))))));
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if (x - 1.0).abs() <= 0.25 {
        return ln_gamma_1p_series(x - 1.0);
    }
    if (x - 2.0).abs() <= 0.25 {
        let z = x - 2.0;
        return z.ln_1p() + ln_gamma_1p_series(z);
    }
    if x >= 10.0 {
        return ln_gamma_stirling(x);
    }
    // Shift up to x + n >= 10 and divide out the product x (x+1) ... (x+n-1).
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < 10.0 {
        prod *= shifted;
        shifted += 1.0;
    }
    ln_gamma_stirling(shifted) - prod.ln()
}

/// Digamma ψ(x) = d/dx ln Γ(x) for x > 0.
///
/// Upward recurrence ψ(x) = ψ(x + 1) − 1/x until x ≥ 10, then the asymptotic
/// expansion with Bernoulli terms through x^-16.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r2 = 1.0 / (x * x);
    let tail = r2
        * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0
                    - r2 * (1.0 / 240.0
                        - r2 * (1.0 / 132.0 - r2 * (691.0 / 32_760.0 - r2 * (1.0 / 12.0 - r2 * 3617.0 / 8160.0)))))));
    acc + x.ln() - 0.5 / x - tail
}

/// Trigamma ψ′(x) for x > 0, by recurrence to x ≥ 10 and the asymptotic series.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    Ok(trigamma_unchecked(x))
}

pub(crate) fn trigamma_unchecked(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    // 1/x + 1/(2x^2) + sum_k B_2k / x^(2k+1)
    let tail = r
        * r2
        * (1.0 / 6.0
            - r2 * (1.0 / 30.0
                - r2 * (1.0 / 42.0
                    - r2 * (1.0 / 30.0
                        - r2 * (5.0 / 66.0 - r2 * (691.0 / 2730.0 - r2 * (7.0 / 6.0 - r2 * 3617.0 / 510.0)))))));
    acc + r + 0.5 * r2 + tail
}

/// ln B(a, b).
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    check_positive("log_beta", a)?;
    check_positive("log_beta", b)?;
    Ok(log_beta_unchecked(a, b))
}

pub(crate) fn log_beta_unchecked(a: f64, b: f64) -> f64 {
    log_gamma_unchecked(a) + log_gamma_unchecked(b) - log_gamma_unchecked(a + b)
}

const CF_MAX_ITER: usize = 300;
const CF_EPS: f64 = 1e-14;
const CF_TINY: f64 = 1e-300;

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Returns `(I_x(a,b), 1 − I_x(a,b))` with both tails computed directly.
///
/// `y` must equal `1 − x`; passing it separately keeps precision when x is
/// close to 1.
pub(crate) fn beta_inc_pair(x: f64, y: f64, a: f64, b: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if y <= 0.0 {
        return (1.0, 0.0);
    }
    let ln_front = a * x.ln() + b * y.ln() - log_beta_unchecked(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        let lower = (ln_front + beta_cf(x, a, b).ln() - a.ln()).exp().min(1.0);
        (lower, 1.0 - lower)
    } else {
        let upper = (ln_front + beta_cf(y, b, a).ln() - b.ln()).exp().min(1.0);
        (1.0 - upper, upper)
    }
}

/// Regularized incomplete beta function I_x(a, b).
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    check_positive("reg_inc_beta", a)?;
    check_positive("reg_inc_beta", b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("reg_inc_beta requires 0 <= x <= 1, got {x}")));
    }
    Ok(beta_inc_pair(x, 1.0 - x, a, b).0)
}

/// Solves I_x(a, b) = target for x ∈ (0, pivot], working in t = ln x.
///
/// Requires I_pivot(a, b) ≥ target. Safeguarded Newton with a bisection
/// fallback on the bracket in t.
fn lower_tail_root(target: f64, a: f64, b: f64, pivot: f64) -> f64 {
    let ln_b = log_beta_unchecked(a, b);
    let eval = |t: f64| -> (f64, f64) {
        let x = t.exp();
        let y = -t.exp_m1();
        let (i, _) = beta_inc_pair(x, y, a, b);
        // dI/dt = pdf(x) * x
        let log_deriv = a * t + (b - 1.0) * y.ln() - ln_b;
        (i - target, log_deriv.exp())
    };

    let min_t = f64::MIN_POSITIVE.ln();
    let mut hi = pivot.ln();
    // Tail approximation I_x ≈ x^a / (a B(a,b)) seeds the bracket.
    let guess = ((target.ln() + a.ln() + ln_b) / a).min(hi);
    let mut lo = guess - 1.0;
    let mut step = 1.0;
    loop {
        if lo <= min_t {
            lo = min_t;
            if eval(lo).0 >= 0.0 {
                return lo.exp();
            }
            break;
        }
        let (f, _) = eval(lo);
        if f < 0.0 {
            break;
        }
        hi = lo;
        step *= 2.0;
        lo -= step;
    }

    let mut t = guess.clamp(lo, hi);
    if t <= lo || t >= hi {
        t = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let (f, df) = eval(t);
        if f == 0.0 {
            return t.exp();
        }
        if f < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let mut next = t - f / df;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 1e-15 * t.abs().max(1.0) || hi - lo <= 1e-15 * t.abs().max(1.0) {
            return next.exp();
        }
        t = next;
    }
    t.exp()
}

/// Inverse of the regularized incomplete beta function in x.
///
/// Quantiles below the smallest positive `f64` are returned as that value.
pub fn inv_reg_inc_beta(p: f64, a: f64, b: f64) -> Result<f64> {
    check_positive("inv_reg_inc_beta", a)?;
    check_positive("inv_reg_inc_beta", b)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("inv_reg_inc_beta requires 0 < p < 1, got {p}")));
    }
    let m = a / (a + b);
    let (i_m, _) = beta_inc_pair(m, b / (a + b), a, b);
    if p <= i_m {
        Ok(lower_tail_root(p, a, b, m))
    } else {
        // Upper tail: solve I_y(b, a) = 1 − p for y = 1 − x.
        let y = lower_tail_root(1.0 - p, b, a, b / (a + b));
        Ok((1.0 - y).min(1.0 - f64::EPSILON / 2.0))
    }
}

/// ln of the Binomial(n, θ) probability mass at y.
pub fn log_binomial_pmf(y: u64, n: u64, theta: f64) -> Result<f64> {
    if y > n {
        return Err(domain(format!("log_binomial_pmf requires y <= n, got y={y}, n={n}")));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("log_binomial_pmf requires 0 < theta < 1, got {theta}")));
    }
    let (yf, nf) = (y as f64, n as f64);
    let ln_choose = log_gamma_unchecked(nf + 1.0) - log_gamma_unchecked(yf + 1.0) - log_gamma_unchecked(nf - yf + 1.0);
    let success = if y == 0 { 0.0 } else { yf * theta.ln() };
    let failure = if y == n { 0.0 } else { (nf - yf) * (-theta).ln_1p() };
    Ok(ln_choose + success + failure)
}
