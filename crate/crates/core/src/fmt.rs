/// Shortest round-trip decimal for moderate magnitudes, scientific
/// notation outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    let m = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&m) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn round_trips() {
        for x in [0.0, 1.5, -2.0, 1e-4, 3.3e-5, 1e-300, 123456.789, 2e20, f64::MIN_POSITIVE, 0.1 + 0.2] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x, "{}", num(x));
        }
        assert_eq!(num(8.881784197001252e-16), "8.881784197001252e-16");
        assert_eq!(num(0.001), "0.001");
        assert_eq!(num(f64::NAN), "NaN");
    }
}
