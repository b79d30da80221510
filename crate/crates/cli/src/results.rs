//! Result files: one pattern per line, itemsets separated by ` -1 `,
//! terminated by ` -2 #AUTIL: <value>`. Values are exact (integers
//! bare, non-integers as `numerator/denominator`), so files diff
//! losslessly.

use std::collections::BTreeMap;
use std::io::{self, Write};

use hausp_core::miner::ResultSet;
use hausp_core::model::{Pattern, Rational};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub fn write_results(results: &ResultSet, out: &mut impl Write) -> io::Result<()> {
    for (pattern, au) in results {
        writeln!(out, "{pattern} -2 #AUTIL: {au}")?;
    }
    Ok(())
}

/// Exact value parser: integers, `n/d` fractions, and decimal literals.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let d: i64 = d.parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::new(n.parse().ok()?, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole: i64 = whole.parse().ok()?;
        let scale = 10i64.pow(frac.len() as u32);
        let frac: i64 = frac.parse().ok()?;
        let numer = whole.abs() * scale + frac;
        return Some(Rational::new(if negative { -numer } else { numer }, scale));
    }
    s.parse::<i64>().ok().map(Rational::from_integer)
}

pub fn read_results(src: &str) -> Result<ResultSet, ResultsError> {
    let mut out = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (pattern_part, value_part) =
            line.split_once(" -2 #AUTIL: ")
                .ok_or_else(|| ResultsError::Parse {
                    line: ln + 1,
                    msg: "missing ` -2 #AUTIL: ` separator".into(),
                })?;
        let mut itemsets = Vec::new();
        for chunk in pattern_part.split(" -1 ") {
            let items: Result<Vec<u32>, _> =
                chunk.split_whitespace().map(|t| t.parse::<u32>()).collect();
            itemsets.push(items.map_err(|_| ResultsError::Parse {
                line: ln + 1,
                msg: format!("bad item token in {chunk:?}"),
            })?);
        }
        let pattern = Pattern::new(itemsets).map_err(|e| ResultsError::Parse {
            line: ln + 1,
            msg: e.to_string(),
        })?;
        let au = parse_rational(value_part).ok_or_else(|| ResultsError::Parse {
            line: ln + 1,
            msg: format!("bad value {value_part:?}"),
        })?;
        out.push((pattern, au));
    }
    Ok(out)
}

/// Set comparison of two result files; returns human-readable mismatch
/// descriptions, empty when the sets agree exactly.
pub fn diff(a: &ResultSet, b: &ResultSet) -> Vec<String> {
    let left: BTreeMap<&Pattern, Rational> = a.iter().map(|(p, v)| (p, *v)).collect();
    let right: BTreeMap<&Pattern, Rational> = b.iter().map(|(p, v)| (p, *v)).collect();
    let mut out = Vec::new();
    for (pattern, value) in &left {
        match right.get(pattern) {
            None => out.push(format!("only in left: {pattern} (au {value})")),
            Some(other) if other != value => {
                out.push(format!("value mismatch for {pattern}: {value} vs {other}"))
            }
            _ => {}
        }
    }
    for (pattern, value) in &right {
        if !left.contains_key(pattern) {
            out.push(format!("only in right: {pattern} (au {value})"));
        }
    }
    out
}
