//! Parsing of value lists such as `2,5,10,20`, `1..20` or `1..20:0.5`.

/// Values of a comma list or an inclusive range with optional step (default 1).
pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if let Some((lo, rest)) = text.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, number(step)?),
            None => (rest, 1.0),
        };
        let (lo, hi) = (number(lo)?, number(hi)?);
        if !(step > 0.0) || hi < lo {
            return Err(format!("range {text} needs lo <= hi and a positive step"));
        }
        let count = ((hi - lo) / step * (1.0 + 1e-12)).floor() as usize;
        return Ok((0..=count).map(|i| lo + i as f64 * step).collect());
    }
    let values = text.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("empty list".into());
    }
    Ok(values)
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("not a finite number: {s:?}"));
    }
    Ok(v)
}

/// `points` evenly spaced times from 0 to `t_max` inclusive.
pub fn time_grid(t_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(t_max > 0.0 && t_max.is_finite()) || points < 2 {
        return Err(format!("need tmax > 0 and at least 2 points, got {t_max} and {points}"));
    }
    let step = t_max / (points - 1) as f64;
    Ok((0..points).map(|i| if i + 1 == points { t_max } else { i as f64 * step }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("2,5,10,20").unwrap(), vec![2.0, 5.0, 10.0, 20.0]);
        assert_eq!(parse_list("1..4").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_list("1..2:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_list("0.1..0.3:0.1").unwrap().len(), 3);
        assert!(parse_list("3..1").is_err());
        assert!(parse_list("a,b").is_err());
        assert!(parse_list("1..5:0").is_err());
    }

    #[test]
    fn time_grid_ends_exactly() {
        let g = time_grid(6.0, 121).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 6.0);
        assert!((g[1] - 0.05).abs() < 1e-15);
    }
}
