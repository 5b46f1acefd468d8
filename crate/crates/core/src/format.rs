/// Formats `x` with `digits` significant digits, `%g` style: fixed notation
/// for moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn sig_digits(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig_digits;

    #[test]
    fn general_format() {
        assert_eq!(sig_digits(0.0, 9), "0");
        assert_eq!(sig_digits(1.0, 9), "1");
        assert_eq!(sig_digits(14.134725141734693, 12), "14.1347251417");
        assert_eq!(sig_digits(1e6, 9), "1000000");
        assert_eq!(sig_digits(1e9, 9), "1e9");
        assert_eq!(sig_digits(-0.000123456789123, 9), "-0.000123456789");
        assert_eq!(sig_digits(1.5e-7, 9), "1.5e-7");
        assert_eq!(sig_digits(9.9999999996, 9), "10");
        assert_eq!(sig_digits(0.1 + 0.2, 9), "0.3");
    }

    #[test]
    fn round_trips_to_requested_precision() {
        for &x in &[std::f64::consts::PI, 123456.789, 2.5e-12, -7.0e15] {
            let s = sig_digits(x, 12);
            let back: f64 = s.parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11, "{x} -> {s}");
        }
    }
}
