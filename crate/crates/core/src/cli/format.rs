//! Text formats shared by the subcommands.

use super::CliError;

/// Formats `x` with at most 10 significant digits, shortest round-trip form.
///
/// Plain decimal notation for magnitudes in `[1e-5, 1e16)`, exponent
/// notation otherwise. The output never depends on the locale.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.9e}").parse().expect("float formatting round-trips");
    if (1e-5..1e16).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Parses one real per line. Blank lines and `#` comments are skipped.
pub fn parse_observations(text: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| CliError::Data(format!("line {}: not a number: '{line}'", i + 1)))?;
        if !v.is_finite() {
            return Err(CliError::Data(format!("line {}: value is not finite", i + 1)));
        }
        values.push(v);
    }
    Ok(values)
}
