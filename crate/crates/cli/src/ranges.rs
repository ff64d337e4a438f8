//! Parsers for the range and weight flags.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    Fixed(u64),
    Full,
    Sweep,
}

pub fn parse_weight(s: &str) -> Result<Weight, String> {
    match s {
        "n" => Ok(Weight::Full),
        "sweep" => Ok(Weight::Sweep),
        _ => s
            .parse()
            .map(Weight::Fixed)
            .map_err(|_| format!("expected a positive integer, `n` or `sweep`, got `{s}`")),
    }
}

pub fn parse_window(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let a: u64 = a
        .parse()
        .map_err(|_| format!("invalid window start `{a}`"))?;
    let b: u64 = b.parse().map_err(|_| format!("invalid window end `{b}`"))?;
    if a < 1 || a > b {
        return Err(format!("window needs 1 <= a <= b, got {a}:{b}"));
    }
    Ok((a, b))
}

/// Evenly spaced reals, each rounded to the decimal places written in the
/// range so that `1:4:0.1` yields exactly `1.3` rather than `1.3000000000000003`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRange {
    pub values: Vec<f64>,
}

fn decimals(s: &str) -> usize {
    s.split_once('.').map_or(0, |(_, frac)| frac.len())
}

pub fn parse_real_range(s: &str) -> Result<RealRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected `start:end:step`, got `{s}`"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format!("invalid number `{t}`"))
        })
        .collect::<Result<_, _>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 || end < start {
        return Err(format!("range needs start <= end and step > 0, got `{s}`"));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("range `{s}` has {count} points, more than 10^6"));
    }
    let places = decimals(parts[0]).max(decimals(parts[2])).min(15) as i32;
    let scale = 10f64.powi(places);
    let values = (0..count)
        .map(|k| ((start + k as f64 * step) * scale).round() / scale)
        .collect();
    Ok(RealRange { values })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub values: Vec<u64>,
}

pub fn parse_int_range(s: &str) -> Result<IntRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("expected `start:end[:step]`, got `{s}`"));
    }
    let nums: Vec<u64> = parts
        .iter()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| format!("invalid integer `{t}`"))
        })
        .collect::<Result<_, _>>()?;
    let step = nums.get(2).copied().unwrap_or(1);
    if step == 0 || nums[0] < 1 || nums[1] < nums[0] {
        return Err(format!(
            "range needs 1 <= start <= end and step >= 1, got `{s}`"
        ));
    }
    Ok(IntRange {
        values: (nums[0]..=nums[1]).step_by(step as usize).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_range_counts_and_rounds() {
        let r = parse_real_range("1:4:0.1").unwrap();
        assert_eq!(r.values.len(), 31);
        assert_eq!(r.values[3], 1.3);
        assert_eq!(r.values[30], 4.0);
        assert!(parse_real_range("4:1:0.1").is_err());
        assert!(parse_real_range("1:2").is_err());
    }

    #[test]
    fn weights_and_windows() {
        assert_eq!(parse_weight("7"), Ok(Weight::Fixed(7)));
        assert_eq!(parse_weight("n"), Ok(Weight::Full));
        assert!(parse_weight("x").is_err());
        assert_eq!(parse_window("3:9"), Ok((3, 9)));
        assert!(parse_window("9:3").is_err());
        assert_eq!(parse_int_range("2:10:4").unwrap().values, vec![2, 6, 10]);
    }
}
