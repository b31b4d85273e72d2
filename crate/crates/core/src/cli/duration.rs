/// Parses a positive duration in seconds: `1.5`, `250ms`, `10us`, `5m`, `2h`, `1d`.
pub fn parse_duration(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let split = if s.parse::<f64>().is_ok() {
        s.len()
    } else {
        s.find(|c: char| c.is_ascii_alphabetic() || c == 'µ').unwrap_or(s.len())
    };
    let (num, unit) = s.split_at(split);
    // sub-second units divide so that e.g. 10us is exactly 1e-5
    let (mul, div) = match unit {
        "" | "s" => (1.0, 1.0),
        "us" | "µs" => (1.0, 1e6),
        "ms" => (1.0, 1e3),
        "m" | "min" => (60.0, 1.0),
        "h" => (3600.0, 1.0),
        "d" => (86400.0, 1.0),
        _ => return Err(format!("unknown duration unit {unit:?} (use us, ms, s, m, h or d)")),
    };
    let x: f64 = num
        .parse()
        .map_err(|_| format!("cannot parse {num:?} as a number"))?;
    let secs = x * mul / div;
    if secs.is_finite() && secs > 0.0 {
        Ok(secs)
    } else {
        Err(format!("duration {s} must be positive and finite"))
    }
}
