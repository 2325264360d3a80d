//! Significant-digit formatting for machine-readable outputs.
//!
//! Every number the toolkit writes (CSV cells, JSON values, SVG
//! annotations) goes through these two functions so that independent
//! outputs of the same quantity compare equal character-for-character.

/// Formats `x` with `sig` significant digits, trimming trailing zeros.
///
/// Rendering matches C's `%g` family: positional notation while the
/// decimal exponent lies in `[-4, sig)`, otherwise scientific notation in
/// Rust's style (`1.23e-12`, no padded exponent). Zero renders as `"0"`,
/// negative zero is normalized to it.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // round first, then branch on the exponent of the *rounded* value so
    // carries like 9.99e-5 -> 1e-4 pick the right notation
    let rounded = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp_str) = rounded.split_once('e').expect("{:e} always has an exponent");
    let exp: i32 = exp_str.parse().expect("exponent is an integer");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp < -4 || exp >= sig as i32 {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    } else if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(digits);
    } else {
        let point = exp as usize + 1;
        if digits.len() > point {
            out.push_str(&digits[..point]);
            out.push('.');
            out.push_str(&digits[point..]);
        } else {
            out.push_str(digits);
            for _ in 0..(point - digits.len()) {
                out.push('0');
            }
        }
    }
    out
}

/// Rounds `x` to `sig` significant digits as an `f64`.
///
/// Uses decimal string round-tripping, so the result is exactly the value
/// a reader parsing the formatted output will see.
pub fn round_sig(x: f64, sig: usize) -> f64 {
    assert!(sig >= 1, "need at least one significant digit");
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", sig - 1, x).parse().expect("{:e} output always parses back")
}
