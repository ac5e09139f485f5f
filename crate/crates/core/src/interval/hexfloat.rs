//! Lowercase hexadecimal floating-point literals (`0x1.91eb851eb851fp+1`),
//! used wherever a value must survive a text round trip bit for bit.

use super::IntervalError;

pub fn format(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if raw_exp == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if raw_exp == 0 {
        (0, -1022)
    } else {
        (1, raw_exp - 1023)
    };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let exp_sign = if exp < 0 { "-" } else { "+" };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{exp_sign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{exp_sign}{}", exp.abs())
    }
}

/// Parses a hex-float literal; `inf`/`-inf` are accepted as well.
pub fn parse(text: &str) -> Result<f64, IntervalError> {
    let t = text.trim();
    match t {
        "inf" | "+inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let body = t.strip_prefix(['-', '+']).unwrap_or(t);
    let with_exp = if body.contains(['p', 'P']) {
        t.to_string()
    } else {
        format!("{t}p0")
    };
    hexf_parse::parse_hexf64(&with_exp, false).map_err(|_| IntervalError::Parse(text.to_string()))
}

/// Accepts either a hex-float literal or an ordinary decimal number.
pub fn parse_number(text: &str) -> Result<f64, IntervalError> {
    let t = text.trim();
    let body = t.strip_prefix(['-', '+']).unwrap_or(t);
    if body.starts_with("0x") || body.starts_with("0X") {
        parse(t)
    } else {
        t.parse::<f64>()
            .map_err(|_| IntervalError::Parse(text.to_string()))
    }
}
