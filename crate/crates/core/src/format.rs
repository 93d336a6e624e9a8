//! Text helpers shared by the report writers.

use std::io::{self, Write};

/// C `printf("%.*g")` formatting: `sig` significant digits, trailing zeros
/// stripped, exponent form outside 1e-4..10^sig.
pub fn format_g(x: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // Round first so the exponent reflects carries such as 9.9995 -> 1.000e1.
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `# key=value` lines.
pub fn write_config_block<W: Write, K: AsRef<str>, V: AsRef<str>>(
    mut out: W,
    pairs: &[(K, V)],
) -> io::Result<()> {
    for (k, v) in pairs {
        writeln!(out, "# {}={}", k.as_ref(), v.as_ref())?;
    }
    Ok(())
}

/// Splits `# key=value` lines off the top of a report.
pub fn parse_config_block(text: &str) -> (Vec<(String, String)>, &str) {
    let mut pairs = Vec::new();
    let mut rest = text;
    while let Some(line) = rest.strip_prefix("# ") {
        let (current, tail) = match line.split_once('\n') {
            Some((c, t)) => (c, t),
            None => (line, ""),
        };
        match current.split_once('=') {
            Some((k, v)) => pairs.push((k.to_string(), v.to_string())),
            None => break,
        }
        rest = tail;
    }
    (pairs, rest)
}
