use nekolab_core::{Error, Result};

pub fn int_list(s: &str) -> Result<Vec<i64>> {
    let parts: Vec<&str> = s
        .split([',', ' ', '\t'])
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(Error::domain(format!("empty integer list {s:?}")));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<i64>()
                .map_err(|_| Error::domain(format!("not an integer: {p:?}")))
        })
        .collect()
}

pub fn float_list(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split([',', ' ']).filter(|p| !p.is_empty()).collect();
    if parts.is_empty() {
        return Err(Error::domain(format!("empty list {s:?}")));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::domain(format!("not a number: {p:?}")))
        })
        .collect()
}

/// Rows given as repeated flags and/or separated by ';'.
pub fn int_rows(args: &[String]) -> Result<Vec<Vec<i64>>> {
    let mut rows = Vec::new();
    for a in args {
        for r in a.split(';').filter(|r| !r.trim().is_empty()) {
            rows.push(int_list(r)?);
        }
    }
    if rows.is_empty() {
        return Err(Error::domain("no rows given"));
    }
    Ok(rows)
}

/// `a..b` (half open) or a comma separated list.
pub fn seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::domain(format!("bad seed list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b <= a {
            return Err(Error::domain("seed range is empty"));
        }
        return Ok((a..b).collect());
    }
    let out: Vec<u64> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::domain("at least one seed is required"));
    }
    Ok(out)
}

/// `key=value` pairs separated by commas.
pub fn synthetic(s: &str) -> Result<(f64, f64, f64)> {
    let (mut a, mut c2, mut c3) = (None, 1.0, 1.0);
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("expected key=value, got {part:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("not a number: {v:?}")))?;
        match k.trim() {
            "a" => a = Some(v),
            "c2" => c2 = v,
            "c3" => c3 = v,
            other => {
                return Err(Error::domain(format!(
                    "unknown synthetic parameter {other:?}"
                )))
            }
        }
    }
    let a = a.ok_or_else(|| Error::domain("synthetic table needs a=<exponent>"))?;
    Ok((a, c2, c3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(int_list("2,3").unwrap(), vec![2, 3]);
        assert_eq!(int_list("0 -6 9").unwrap(), vec![0, -6, 9]);
        assert_eq!(
            int_rows(&["1 2; 3 4".into(), "5,6".into()]).unwrap().len(),
            3
        );
        assert!(int_list("2,x").is_err());
        assert_eq!(seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(seeds("5,9").unwrap(), vec![5, 9]);
        assert!(seeds("3..3").is_err());
        assert_eq!(synthetic("a=0.25").unwrap(), (0.25, 1.0, 1.0));
        assert!(synthetic("b=1").is_err());
    }
}
