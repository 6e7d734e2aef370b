//! Fixed-point decimal rendering of exact rationals, rounding half to even.
//! Rendering is for reports only; nothing parses these strings back.

use rug::{Integer, Rational};

/// Renders `value` with exactly `digits` digits after the decimal point.
pub fn to_decimal(value: &Rational, digits: usize) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, digits as u32));
    let magnitude = Rational::from(value.abs_ref()) * &scale;
    let (frac, mut whole) = magnitude.fract_floor(Integer::new());
    let half = Rational::from((1, 2));
    if frac > half || (frac == half && whole.is_odd()) {
        whole += 1;
    }
    let mut text = whole.to_string();
    if text.len() <= digits {
        text = format!("{}{}", "0".repeat(digits + 1 - text.len()), text);
    }
    let split = text.len() - digits;
    let mut out = String::new();
    if *value < 0 && whole != 0 {
        out.push('-');
    }
    out.push_str(&text[..split]);
    if digits > 0 {
        out.push('.');
        out.push_str(&text[split..]);
    }
    out
}

/// Renders a non-negative bound as `d.ddde-N` with `sig` significant digits,
/// rounding up so the printed number is never below the exact one.
pub fn upper_scientific(value: &Rational, sig: usize) -> String {
    assert!(*value >= 0, "bounds are non-negative");
    assert!(sig >= 1);
    if *value == 0 {
        return "0".to_string();
    }
    // first guess of floor(log10 value) from digit counts, then correct it
    let digits = |x: &Integer| x.to_string().len() as i64;
    let mut exp = digits(value.numer()) - digits(value.denom());
    let ten = |e: i64| -> Rational {
        let p = Rational::from(Integer::u_pow_u(10, e.unsigned_abs() as u32));
        if e < 0 {
            p.recip()
        } else {
            p
        }
    };
    while ten(exp) > *value {
        exp -= 1;
    }
    while ten(exp + 1) <= *value {
        exp += 1;
    }
    let scaled = Rational::from(value * ten(sig as i64 - 1 - exp));
    let mut mantissa = scaled.ceil().numer().clone();
    if mantissa == Integer::from(Integer::u_pow_u(10, sig as u32)) {
        mantissa = Integer::from(Integer::u_pow_u(10, sig as u32 - 1));
        exp += 1;
    }
    let m = mantissa.to_string();
    let body = if sig > 1 { format!("{}.{}", &m[..1], &m[1..]) } else { m };
    format!("{body}e{exp}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn rounds_half_to_even() {
        assert_eq!(to_decimal(&r(1, 8), 2), "0.12");
        assert_eq!(to_decimal(&r(3, 8), 2), "0.38");
        assert_eq!(to_decimal(&r(5, 2), 0), "2");
        assert_eq!(to_decimal(&r(7, 2), 0), "4");
        assert_eq!(to_decimal(&r(-1, 8), 2), "-0.12");
        assert_eq!(to_decimal(&r(-1, 1000), 2), "0.00");
    }

    #[test]
    fn pads_and_truncates() {
        assert_eq!(to_decimal(&r(1, 3), 5), "0.33333");
        assert_eq!(to_decimal(&r(2, 3), 5), "0.66667");
        assert_eq!(to_decimal(&r(123, 1), 3), "123.000");
        assert_eq!(to_decimal(&r(1, 1), 40).len(), 42);
        assert_eq!(to_decimal(&r(-7, 4), 1), "-1.8");
    }

    #[test]
    fn scientific_bounds_round_up() {
        assert_eq!(upper_scientific(&r(0, 1), 3), "0");
        assert_eq!(upper_scientific(&r(1, 1), 3), "1.00e0");
        assert_eq!(upper_scientific(&r(1, 3), 3), "3.34e-1");
        assert_eq!(upper_scientific(&r(1234, 1), 2), "1.3e3");
        assert_eq!(upper_scientific(&r(9999, 10000), 2), "1.0e0");
        assert_eq!(upper_scientific(&r(1, 1000), 1), "1e-3");
        let tiny = Rational::from((1, Integer::from(Integer::u_pow_u(10, 31))));
        assert_eq!(upper_scientific(&tiny, 2), "1.0e-31");
    }
}
