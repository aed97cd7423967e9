//! Numeric grid arguments: `start:stop:step` ranges or comma lists.

use crate::{usage, CliResult};

const ENDPOINT_SLACK: f64 = 1e-12;

/// `start:stop:step` with both endpoints included (the stop point within
/// 1e-12), or a comma-separated list.
pub(crate) fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    if !s.contains(':') {
        return parse_list(s);
    }
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| usage(format!("bad grid {s:?}: {p:?} is not a number"))))
        .collect::<CliResult<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(usage(format!("bad grid {s:?}: expected start:stop:step")));
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(usage(format!("bad grid {s:?}: step must be positive and endpoints finite")));
    }
    if start > stop {
        return Err(usage(format!("bad grid {s:?}: start exceeds stop")));
    }
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let x = start + k as f64 * step;
        if x > stop + ENDPOINT_SLACK {
            break;
        }
        out.push(x.min(stop));
        k += 1;
    }
    Ok(out)
}

pub(crate) fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    let out: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| usage(format!("bad list {s:?}: {p:?} is not a number"))))
        .collect::<CliResult<_>>()?;
    if out.iter().any(|x| !x.is_finite()) {
        return Err(usage(format!("bad list {s:?}: values must be finite")));
    }
    Ok(out)
}
