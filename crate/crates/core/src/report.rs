//! Number formatting shared by the JSON and CSV writers.

/// Significant digits kept in every serialized float.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits. Non-finite values
/// pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Formats a float with 12 significant digits; infinities and NaN become
/// `inf`, `-inf` and `nan`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        // shortest round-trip form of the rounded value has at most 12 digits
        format!("{}", round_sig(x))
    }
}

/// JSON value for a float: a number when finite, otherwise the string sentinel.
pub fn json_f64(x: f64) -> serde_json::Value {
    match serde_json::Number::from_f64(round_sig(x)) {
        Some(n) => serde_json::Value::Number(n),
        None => serde_json::Value::String(fmt_f64(x)),
    }
}
