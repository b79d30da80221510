//! Quantitative sequence dataset formats.
//!
//! Two line-oriented input grammars, one sequence per line, itemsets
//! terminated by `-1`, the sequence by `-2`, `#` starting a comment line:
//!
//! * occurrence-utility mode: tokens `item[utility]`, the bracket holding
//!   the occurrence utility directly; an optional `SUtility:<n>` trailer
//!   after `-2` is verified against the recomputed sequence utility;
//! * quantity mode: tokens `item:quantity` plus a sidecar table file with
//!   one `item external-utility` pair per line.
//!
//! Occurrence-utility data carries no separate quantities, so it loads as
//! quantity := utility with a unit external-utility table, which preserves
//! `utility = quantity × eu` and every downstream value exactly.

use std::collections::BTreeMap;

use hausp_core::model::{Database, ExternalUtilities, Item, ModelError};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    OccurrenceUtility,
    QuantityWithTable,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("external-utility table: line {line}: {msg}")]
    Table { line: usize, msg: String },
    #[error("cannot detect the dataset format; pass --format")]
    UnknownFormat,
    #[error("quantity-mode data needs an external-utility table (--eu)")]
    MissingTable,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug)]
pub struct Parsed {
    pub database: Database,
    pub warnings: Vec<String>,
}

/// Guesses the format from the first data token.
pub fn detect_format(src: &str) -> Option<DatasetFormat> {
    for line in src.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            if token == "-1" || token == "-2" {
                continue;
            }
            if token.contains('[') {
                return Some(DatasetFormat::OccurrenceUtility);
            }
            if token.contains(':') && !token.starts_with("SUtility") {
                return Some(DatasetFormat::QuantityWithTable);
            }
        }
    }
    None
}

/// Parses `item external-utility` pairs.
pub fn parse_eu_table(src: &str) -> Result<ExternalUtilities, DatasetError> {
    let mut map = BTreeMap::new();
    for (ln, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(item), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(DatasetError::Table {
                line: ln + 1,
                msg: format!("expected `item utility`, got {line:?}"),
            });
        };
        let item: Item = item.parse().map_err(|_| DatasetError::Table {
            line: ln + 1,
            msg: format!("bad item label {item:?}"),
        })?;
        let value: i64 = value.parse().map_err(|_| DatasetError::Table {
            line: ln + 1,
            msg: format!("bad utility {value:?}"),
        })?;
        if map.insert(item, value).is_some() {
            return Err(DatasetError::Table {
                line: ln + 1,
                msg: format!("duplicate entry for item {item}"),
            });
        }
    }
    Ok(ExternalUtilities::new(map)?)
}

/// Parses a dataset. `eu` is required in quantity mode and ignored in
/// occurrence-utility mode.
pub fn parse_qsdb(
    src: &str,
    format: DatasetFormat,
    eu: Option<&ExternalUtilities>,
) -> Result<Parsed, DatasetError> {
    let mut rows: hausp_core::model::QuantityRows = Vec::new();
    let mut warnings = Vec::new();
    // Occurrence mode: value is the occurrence utility, quantity 1:1.
    let mut items_seen = std::collections::BTreeSet::new();

    for (ln, raw_line) in src.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut itemsets: Vec<Vec<(Item, u32)>> = Vec::new();
        let mut current: Vec<(Item, u32)> = Vec::new();
        let mut closed = false;
        let mut trailer: Option<i64> = None;
        for token in line.split_whitespace() {
            if closed {
                if trailer.is_some() {
                    return Err(DatasetError::Parse {
                        line: line_no,
                        msg: format!("unexpected token {token:?} after the sequence trailer"),
                    });
                }
                let Some(value) = token.strip_prefix("SUtility:") else {
                    return Err(DatasetError::Parse {
                        line: line_no,
                        msg: format!("unexpected token {token:?} after -2"),
                    });
                };
                trailer = Some(value.parse().map_err(|_| DatasetError::Parse {
                    line: line_no,
                    msg: format!("bad SUtility value {value:?}"),
                })?);
                continue;
            }
            match token {
                "-1" => {
                    if current.is_empty() {
                        return Err(DatasetError::Parse {
                            line: line_no,
                            msg: "empty itemset before -1".into(),
                        });
                    }
                    itemsets.push(finish_itemset(
                        std::mem::take(&mut current),
                        line_no,
                        &mut warnings,
                    )?);
                }
                "-2" => {
                    if !current.is_empty() {
                        itemsets.push(finish_itemset(
                            std::mem::take(&mut current),
                            line_no,
                            &mut warnings,
                        )?);
                    }
                    if itemsets.is_empty() {
                        return Err(DatasetError::Parse {
                            line: line_no,
                            msg: "empty sequence".into(),
                        });
                    }
                    closed = true;
                }
                _ => {
                    let (item, value) = parse_pair(token, format, line_no)?;
                    items_seen.insert(item);
                    current.push((item, value));
                }
            }
        }
        if !closed {
            return Err(DatasetError::Parse {
                line: line_no,
                msg: "sequence not terminated by -2".into(),
            });
        }

        if let Some(stated) = trailer {
            let computed = sequence_utility_of(&itemsets, format, eu, line_no)?;
            if stated != computed {
                return Err(DatasetError::Parse {
                    line: line_no,
                    msg: format!("SUtility trailer says {stated} but the line sums to {computed}"),
                });
            }
        }
        rows.push((rows.len() as u32 + 1, itemsets));
    }

    let table = match format {
        DatasetFormat::OccurrenceUtility => {
            ExternalUtilities::new(items_seen.iter().map(|&i| (i, 1)).collect())?
        }
        DatasetFormat::QuantityWithTable => {
            let table = eu.ok_or(DatasetError::MissingTable)?;
            for &item in &items_seen {
                if table.get(item).is_none() {
                    return Err(DatasetError::Parse {
                        line: 0,
                        msg: format!("item {item} has no external-utility entry"),
                    });
                }
            }
            table.clone()
        }
    };
    Ok(Parsed {
        database: Database::new(rows, table)?,
        warnings,
    })
}

fn parse_pair(
    token: &str,
    format: DatasetFormat,
    line: usize,
) -> Result<(Item, u32), DatasetError> {
    let malformed = || DatasetError::Parse {
        line,
        msg: format!("malformed token {token:?}"),
    };
    match format {
        DatasetFormat::OccurrenceUtility => {
            let inner = token.strip_suffix(']').ok_or_else(malformed)?;
            let (item, value) = inner.split_once('[').ok_or_else(malformed)?;
            let item: Item = item.parse().map_err(|_| malformed())?;
            let value: u32 = value.parse().map_err(|_| malformed())?;
            if value == 0 {
                return Err(DatasetError::Parse {
                    line,
                    msg: format!("occurrence utility must be positive in {token:?}"),
                });
            }
            Ok((item, value))
        }
        DatasetFormat::QuantityWithTable => {
            let (item, qty) = token.split_once(':').ok_or_else(malformed)?;
            let item: Item = item.parse().map_err(|_| malformed())?;
            let qty: u32 = qty.parse().map_err(|_| malformed())?;
            if qty == 0 {
                return Err(DatasetError::Parse {
                    line,
                    msg: format!("quantity must be positive in {token:?}"),
                });
            }
            Ok((item, qty))
        }
    }
}

fn finish_itemset(
    mut items: Vec<(Item, u32)>,
    line: usize,
    warnings: &mut Vec<String>,
) -> Result<Vec<(Item, u32)>, DatasetError> {
    if !items.windows(2).all(|w| w[0].0 < w[1].0) {
        items.sort_by_key(|&(item, _)| item);
        if items.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(DatasetError::Parse {
                line,
                msg: "duplicate item within an itemset".into(),
            });
        }
        warnings.push(format!(
            "line {line}: itemset not sorted by item label; sorted"
        ));
    }
    Ok(items)
}

fn sequence_utility_of(
    itemsets: &[Vec<(Item, u32)>],
    format: DatasetFormat,
    eu: Option<&ExternalUtilities>,
    line: usize,
) -> Result<i64, DatasetError> {
    let mut total = 0i64;
    for set in itemsets {
        for &(item, value) in set {
            total += match format {
                DatasetFormat::OccurrenceUtility => value as i64,
                DatasetFormat::QuantityWithTable => {
                    let table = eu.ok_or(DatasetError::MissingTable)?;
                    let unit = table.get(item).ok_or_else(|| DatasetError::Parse {
                        line,
                        msg: format!("item {item} has no external-utility entry"),
                    })?;
                    unit * value as i64
                }
            };
        }
    }
    Ok(total)
}

/// Serializes in occurrence-utility mode with SUtility trailers.
pub fn write_occurrence_format(db: &Database) -> String {
    let mut out = String::new();
    for qs in db.sequences() {
        let mut total = 0;
        for set in &qs.itemsets {
            for occ in &set.occurrences {
                out.push_str(&format!("{}[{}] ", occ.item, occ.utility));
                total += occ.utility;
            }
            out.push_str("-1 ");
        }
        out.push_str(&format!("-2 SUtility:{total}\n"));
    }
    out
}

/// Serializes in quantity mode; returns (data, external-utility table).
pub fn write_quantity_format(db: &Database) -> (String, String) {
    let mut data = String::new();
    for qs in db.sequences() {
        for set in &qs.itemsets {
            for occ in &set.occurrences {
                data.push_str(&format!("{}:{} ", occ.item, occ.quantity));
            }
            data.push_str("-1 ");
        }
        data.push_str("-2\n");
    }
    let mut table = String::new();
    for (item, value) in db.eu().iter() {
        table.push_str(&format!("{item} {value}\n"));
    }
    (data, table)
}

/// `k` concatenated copies of the database with fresh sequence ids.
pub fn duplicate_dataset(db: &Database, k: usize) -> Database {
    assert!(k >= 1);
    let mut rows = Vec::with_capacity(db.sequences().len() * k);
    for _ in 0..k {
        for qs in db.sequences() {
            rows.push((
                rows.len() as u32 + 1,
                qs.itemsets
                    .iter()
                    .map(|s| s.occurrences.iter().map(|o| (o.item, o.quantity)).collect())
                    .collect(),
            ));
        }
    }
    Database::new(rows, db.eu().clone()).expect("copies of a valid database stay valid")
}
