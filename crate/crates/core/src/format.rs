/// Decimal rendering with 9 significant digits and trailing zeros trimmed.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-6..16).contains(&exp) {
        return sci;
    }
    let decimals = (8 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Round to 9 significant digits, for values serialized through JSON.
pub fn round9(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.8e}").parse().unwrap()
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(sig9(0.5), "0.5");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(-12345.678912345), "-12345.6789");
        assert_eq!(sig9(0.0335803103694856), "0.0335803104");
        assert_eq!(sig9(9.9999999999), "10");
        assert_eq!(sig9(1e-9), "1.00000000e-9");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(round9(0.0335803103694856), 0.0335803104);
    }
}
