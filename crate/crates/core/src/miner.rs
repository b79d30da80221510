//! Recursive pattern-growth search with dual pruning.
//!
//! The search seeds one candidate per distinct item, then grows patterns
//! depth-first. At each node the candidate appending items are gathered
//! from the projection; each candidate is gated by the strategy's reduced
//! bound (irrelevant-item pruning) before its projection is evaluated, and
//! each evaluated child is gated by the strategy's node bound before
//! recursing (prefix pruning). The Advance strategy additionally filters
//! remaining-sequence occurrences through the rising-sequence rule
//! (unpromising-item pruning); that filter only changes bound values,
//! never the result set.
//!
//! Children are expanded in ascending item label, I-extensions before
//! S-extensions, and results are emitted in pattern-lexicographic order,
//! so runs are deterministic for a fixed input and configuration.

use std::time::Instant;

use num_traits::Zero;
use thiserror::Error;

use crate::bounds::{self, RrsPolicy, RrsView};
use crate::model::{Database, Pattern, Rational, Threshold};
use crate::projection::{ExtensionKind, ProjectedDb, ProjectionIndex, SeqArrayEntry};

/// Which bound pair drives the two pruning channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyVersion {
    /// PEAU_Ori node bound with RSAU item gating.
    Rsau,
    /// PEAU_Ori node bound with TRSAU item gating.
    Trsau,
    /// VPEAU_Adv node bound with VTRSAU_Adv item gating.
    Advance,
}

impl StrategyVersion {
    pub fn name(self) -> &'static str {
        match self {
            StrategyVersion::Rsau => "rsau",
            StrategyVersion::Trsau => "trsau",
            StrategyVersion::Advance => "advance",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinerConfig {
    /// Threshold fraction ξ ∈ (0, 1].
    pub xi: Rational,
    pub strategy: StrategyVersion,
    pub rrs_policy: RrsPolicy,
    /// Stop growing patterns beyond this length (unlimited by default).
    pub max_pattern_length: Option<usize>,
    /// Collect one bound-annotation line per evaluated candidate.
    pub trace: bool,
    /// Skip the reduced-bound item gate. The result set is unchanged by
    /// construction; only the counters move. Exposed for the pruning
    /// equivalence tests.
    pub disable_irrelevant_pruning: bool,
}

impl MinerConfig {
    pub fn new(xi: Rational, strategy: StrategyVersion) -> Self {
        MinerConfig {
            xi,
            strategy,
            rrs_policy: RrsPolicy::default(),
            max_pattern_length: None,
            trace: false,
            disable_irrelevant_pruning: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum MinerError {
    #[error(transparent)]
    Config(#[from] crate::model::ModelError),
}

/// Prune counters keyed by cause.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PruneCounts {
    /// Children whose node bound failed: no recursion below them.
    pub peau_node: u64,
    /// Candidates whose reduced bound failed: never evaluated.
    pub irrelevant_item: u64,
    /// Remaining-sequence labels excluded from bound numerators by the
    /// rising-sequence rule, accumulated over Advance node evaluations.
    pub unpromising_item: u64,
}

#[derive(Debug, Clone, Default)]
pub struct MiningStats {
    /// Candidate evaluations (one per generated pattern, seeds included).
    pub candidates_generated: u64,
    pub hausps_found: u64,
    pub prunes: PruneCounts,
    pub wall_ms: u64,
    /// Peak live size of the projection structures, in bytes. An
    /// allocation estimate, not a resident-set measurement.
    pub peak_mem_bytes: u64,
    /// One "pattern | au | peau_ori | vpeau_adv | rsau | trsau |
    /// vtrsau_adv" line per evaluated candidate when tracing is on.
    pub trace: Vec<String>,
}

/// Patterns with their database average utility, pattern-lexicographic.
pub type ResultSet = Vec<(Pattern, Rational)>;

struct SearchCtx<'a> {
    minau: Rational,
    cfg: &'a MinerConfig,
    results: ResultSet,
    stats: MiningStats,
    live_bytes: u64,
    peak_bytes: u64,
}

impl SearchCtx<'_> {
    fn enter(&mut self, p: &ProjectedDb<'_>) -> u64 {
        let bytes = (p.entry_count() * std::mem::size_of::<crate::projection::ExtensionEntry>()
            + p.lists.len() * std::mem::size_of::<crate::projection::SeqExtensions>())
            as u64;
        self.live_bytes += bytes;
        self.peak_bytes = self.peak_bytes.max(self.live_bytes);
        bytes
    }

    fn leave(&mut self, bytes: u64) {
        self.live_bytes -= bytes;
    }
}

/// Mines every pattern whose database average utility reaches
/// ξ × u(D), restricted to `max_pattern_length` when set.
pub fn mine(db: &Database, cfg: &MinerConfig) -> Result<(ResultSet, MiningStats), MinerError> {
    let started = Instant::now();
    let threshold = Threshold::new(cfg.xi, db)?;
    let index = ProjectionIndex::build(db);

    let index_bytes: u64 = index
        .arrays
        .iter()
        .map(|a| (a.len() * std::mem::size_of::<SeqArrayEntry>()) as u64)
        .sum();

    let mut ctx = SearchCtx {
        minau: threshold.minau,
        cfg,
        results: Vec::new(),
        stats: MiningStats::default(),
        live_bytes: index_bytes,
        peak_bytes: index_bytes,
    };

    let root = ProjectedDb::root(&index);
    for item in index.items() {
        let child = root.extend(item, ExtensionKind::Sequence);
        evaluate_candidate(&mut ctx, &root, None, child);
    }

    ctx.results.sort_by(|a, b| a.0.cmp(&b.0));
    ctx.stats.wall_ms = started.elapsed().as_millis() as u64;
    ctx.stats.peak_mem_bytes = ctx.peak_bytes;
    Ok((ctx.results, ctx.stats))
}

/// AUCalcu: evaluates one generated pattern, first for membership in
/// the result set, then against the node bound guarding recursion.
fn evaluate_candidate(
    ctx: &mut SearchCtx<'_>,
    parent: &ProjectedDb<'_>,
    parent_rrs: Option<&RrsView>,
    child: ProjectedDb<'_>,
) {
    ctx.stats.candidates_generated += 1;
    if child.lists.is_empty() {
        return;
    }
    let bytes = ctx.enter(&child);

    let au = average_utility(&child);
    if au >= ctx.minau {
        ctx.stats.hausps_found += 1;
        ctx.results.push((child.pattern.clone(), au));
    }

    let child_rrs = match ctx.cfg.strategy {
        StrategyVersion::Advance => {
            let rrs = bounds::compute_rrs(&child, ctx.minau, ctx.cfg.rrs_policy);
            ctx.stats.prunes.unpromising_item += rrs.unpromising_count as u64;
            Some(rrs)
        }
        _ if ctx.cfg.trace => Some(bounds::compute_rrs(&child, ctx.minau, ctx.cfg.rrs_policy)),
        _ => None,
    };

    if ctx.cfg.trace {
        trace_node(ctx, parent, parent_rrs, &child, au, child_rrs.as_ref());
    }

    // The Advance measures are not upper bounds; the published safety
    // argument for pruning on them alone has counterexamples. A subtree
    // is cut only when the certified companion agrees, which preserves
    // exactness while keeping the tighter test in front.
    let expand = match ctx.cfg.strategy {
        StrategyVersion::Rsau | StrategyVersion::Trsau => bounds::peau_ori(&child) >= ctx.minau,
        StrategyVersion::Advance => {
            let rrs = child_rrs.as_ref().expect("computed above");
            bounds::vpeau_adv(&child, rrs) >= ctx.minau
                || bounds::peau_cert(&child, rrs) >= ctx.minau
        }
    };

    if expand {
        grow(ctx, &child, child_rrs.as_ref());
    } else {
        ctx.stats.prunes.peau_node += 1;
    }
    ctx.leave(bytes);
}

/// PGrowth: gathers appending candidates and gates each with the
/// strategy's reduced bound before evaluation.
fn grow(ctx: &mut SearchCtx<'_>, node: &ProjectedDb<'_>, node_rrs: Option<&RrsView>) {
    if let Some(cap) = ctx.cfg.max_pattern_length {
        if node.pattern_len() >= cap {
            return;
        }
    }
    let (ilist, slist) = node.extension_items();
    let candidates = ilist
        .into_iter()
        .map(|i| (i, ExtensionKind::Item))
        .chain(slist.into_iter().map(|i| (i, ExtensionKind::Sequence)));

    for (item, kind) in candidates {
        let child = node.extend(item, kind);
        if !ctx.cfg.disable_irrelevant_pruning {
            let relevant = match ctx.cfg.strategy {
                StrategyVersion::Rsau => bounds::rsau(node, &child) >= ctx.minau,
                StrategyVersion::Trsau => bounds::trsau(node, &child) >= ctx.minau,
                StrategyVersion::Advance => {
                    let rrs = node_rrs.expect("advance keeps the rrs");
                    bounds::vtrsau_adv(node, &child, rrs) >= ctx.minau
                        || bounds::vtrsau_cert(node, &child, rrs) >= ctx.minau
                }
            };
            if !relevant {
                ctx.stats.prunes.irrelevant_item += 1;
                continue;
            }
        }
        evaluate_candidate(ctx, node, node_rrs, child);
    }
}

/// Database average utility of the projected pattern: per sequence the
/// maximal acu, summed, over the pattern length.
fn average_utility(p: &ProjectedDb<'_>) -> Rational {
    if p.lists.is_empty() {
        return Rational::zero();
    }
    let numer: i64 = p
        .lists
        .iter()
        .map(|l| l.entries.iter().map(|e| e.acu).max().unwrap_or(0))
        .sum();
    Rational::new(numer, p.pattern_len() as i64)
}

fn trace_node(
    ctx: &mut SearchCtx<'_>,
    parent: &ProjectedDb<'_>,
    parent_rrs: Option<&RrsView>,
    child: &ProjectedDb<'_>,
    au: Rational,
    child_rrs: Option<&RrsView>,
) {
    let child_rrs = child_rrs.expect("trace computes the rrs");
    let (rsau_v, trsau_v, vtrsau_v) = if parent.is_root() {
        (None, None, None)
    } else {
        let owned;
        let rrs = match parent_rrs {
            Some(r) => r,
            None => {
                owned = bounds::compute_rrs(parent, ctx.minau, ctx.cfg.rrs_policy);
                &owned
            }
        };
        (
            Some(bounds::rsau(parent, child)),
            Some(bounds::trsau(parent, child)),
            Some(bounds::vtrsau_adv(parent, child, rrs)),
        )
    };
    let opt = |v: Option<Rational>| v.map_or_else(|| "-".to_string(), |r| r.to_string());
    ctx.stats.trace.push(format!(
        "{} | {} | {} | {} | {} | {} | {}",
        child.pattern,
        au,
        bounds::peau_ori(child),
        bounds::vpeau_adv(child, child_rrs),
        opt(rsau_v),
        opt(trsau_v),
        opt(vtrsau_v),
    ));
}
