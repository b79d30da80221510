//! Run reports: a line-oriented `key=value` document with stable keys:
//! the configuration echo, the dataset fingerprint, and the mining
//! counters.

use std::io::{self, Write};

use hausp_core::miner::MiningStats;
use hausp_core::model::Database;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub sequences: usize,
    pub distinct_items: usize,
    pub total_utility: i64,
}

pub fn fingerprint(db: &Database) -> Fingerprint {
    Fingerprint {
        sequences: db.sequences().len(),
        distinct_items: db.items().len(),
        total_utility: db.total_utility(),
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub input: String,
    pub xi: String,
    pub strategy: String,
    pub rrs_policy: String,
    pub max_len: Option<usize>,
    pub results_path: Option<String>,
    pub fingerprint: Fingerprint,
    pub stats: MiningStats,
}

pub fn write_stats(report: &RunReport, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "input={}", report.input)?;
    writeln!(out, "xi={}", report.xi)?;
    writeln!(out, "strategy={}", report.strategy)?;
    writeln!(out, "rrs_policy={}", report.rrs_policy)?;
    match report.max_len {
        Some(n) => writeln!(out, "max_len={n}")?,
        None => writeln!(out, "max_len=unlimited")?,
    }
    if let Some(path) = &report.results_path {
        writeln!(out, "results={path}")?;
    }
    writeln!(out, "sequences={}", report.fingerprint.sequences)?;
    writeln!(out, "items={}", report.fingerprint.distinct_items)?;
    writeln!(out, "total_utility={}", report.fingerprint.total_utility)?;
    writeln!(
        out,
        "candidates_generated={}",
        report.stats.candidates_generated
    )?;
    writeln!(out, "hausps_found={}", report.stats.hausps_found)?;
    writeln!(out, "wall_ms={}", report.stats.wall_ms)?;
    writeln!(out, "peak_mem_bytes={}", report.stats.peak_mem_bytes)?;
    writeln!(out, "prunes.peau_node={}", report.stats.prunes.peau_node)?;
    writeln!(
        out,
        "prunes.irrelevant_item={}",
        report.stats.prunes.irrelevant_item
    )?;
    writeln!(
        out,
        "prunes.unpromising_item={}",
        report.stats.prunes.unpromising_item
    )?;
    Ok(())
}
