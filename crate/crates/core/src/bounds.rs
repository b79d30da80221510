//! Sorting-free overestimation measures for search-space pruning.
//!
//! Per sequence, every measure is a maximum over extension entries of a
//! numerator divided by a fixed denominator, summed over the sequences of
//! a projection:
//!
//! * `PEAU_Ori`: (acu + ru) / |S|, 0 at entries with an empty remaining
//!   sequence. A true upper bound on the average utility of every proper
//!   extension.
//! * `PEAU_Inc`: same numerator over |S| + 1.
//! * `PEAU_Rev`: (acu + u_rrs) / (|S| + 1), where u_rrs keeps only the
//!   remaining-sequence occurrences admitted by the rising-sequence rule.
//! * `VPEAU_Adv`: (acu + u_rrs) / (|S| + |rrs|_d). Not an upper bound on
//!   average utilities, but a sound pruning test for extensions.
//! * `RSAU`: the parent's per-sequence `PEAU_Ori`, summed over the
//!   sequences that still contain the child.
//! * `TRSAU`: `RSAU` minus the utility of the occurrences skipped
//!   between the parent's last extension occurrence and the child's first
//!   one, applicable when the parent's per-sequence value is attained at
//!   its first instance.
//! * `VTRSAU_Adv`: the same reduction applied to `VPEAU_Adv`, with the
//!   skipped utility filtered by the rising-sequence rule.
//!
//! None of these sorts remaining-sequence items; every computation is a
//! linear scan. [`op_count`] exposes a scan counter so tests can assert
//! the linear growth structurally.

use std::cell::Cell;
use std::collections::BTreeSet;

use num_traits::Zero;

use crate::model::{Item, Rational, Utility};
use crate::projection::{ProjectedDb, SeqExtensions};

thread_local! {
    static OPS: Cell<u64> = const { Cell::new(0) };
}

fn bump_ops(n: u64) {
    OPS.with(|c| c.set(c.get() + n));
}

/// Resets the occurrence-scan counter for the current thread.
pub fn reset_op_count() {
    OPS.with(|c| c.set(0));
}

/// Occurrences scanned by bound computations since the last reset.
pub fn op_count() -> u64 {
    OPS.with(|c| c.get())
}

/// Which remaining-sequence occurrences count as "rising".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RrsPolicy {
    /// A label qualifies when at least one of its occurrences inside the
    /// pattern's remaining sequences reaches `minau`; every occurrence of
    /// a qualified label is then admitted. This is the reading that
    /// reproduces the published worked values.
    #[default]
    ItemGlobal,
    /// Literal per-occurrence rule: an occurrence is admitted exactly when
    /// its own utility reaches `minau`.
    PerOccurrence,
}

/// Remaining-rising-sequence view of one projection at one threshold.
#[derive(Debug, Clone)]
pub struct RrsView {
    /// The rising-label count |rrs|_d entering the Advance denominators.
    ///
    /// A label is counted when one of its occurrences reaches `minau`
    /// inside the remaining sequence of a per-sequence *best* extension
    /// entry (the entry maximizing acu + u_rrs). Counting over all
    /// remaining sequences instead (the looser reading) can inflate the
    /// denominator beyond what the numerators cover and makes the
    /// Advance pruning test unsound, so the count is restricted to the
    /// windows the bound actually uses.
    pub distinct_count: u32,
    /// Rising-label count restricted to windows behind the per-sequence
    /// *last* extension entry. Such a window lies inside the remaining
    /// sequence of every extension occurrence, which is what makes the
    /// certified pruning companions ([`peau_cert`], [`vtrsau_cert`])
    /// provably safe; see the miner for how the two counts divide work.
    pub certified_count: u32,
    /// Labels whose occurrences are admitted into u_rrs numerators.
    pub qualified: BTreeSet<Item>,
    /// Labels present in the remaining sequences that did not qualify
    /// (the "unpromising" items excluded from bound numerators).
    pub unpromising_count: u32,
    /// Threshold the view was computed at.
    pub minau: Rational,
    /// Per projected sequence: suffix sums of admitted occurrence utility,
    /// indexed by occurrence, with one trailing 0 sentinel.
    admitted_suffix: Vec<Vec<Utility>>,
}

impl RrsView {
    /// u_rrs at an extension entry: admitted utility strictly behind it.
    pub fn u_rrs(&self, li: usize, exind: u32) -> Utility {
        self.admitted_suffix[li][exind as usize + 1]
    }

    /// Admitted utility strictly between two occurrences.
    pub fn admitted_between(&self, li: usize, from_exind: u32, to_exind: u32) -> Utility {
        debug_assert!(from_exind < to_exind);
        let s = &self.admitted_suffix[li];
        s[from_exind as usize + 1] - s[to_exind as usize]
    }
}

/// `value >= bound` for an integer utility against an exact rational.
fn utility_reaches(value: Utility, bound: Rational) -> bool {
    // denominators are strictly positive
    i128::from(value) * i128::from(*bound.denom()) >= i128::from(*bound.numer())
}

/// Computes the rising-sequence view of a projection: per extension
/// position the admitted remaining utility, plus the distinct rising-label
/// count. The view is recomputed per pattern node from its own projection.
pub fn compute_rrs(p: &ProjectedDb<'_>, minau: Rational, policy: RrsPolicy) -> RrsView {
    // A sequence's remaining regions are suffixes behind its extension
    // entries; their union is the suffix behind the first entry. A label
    // qualifies for admission when some occurrence of it inside these
    // regions reaches the threshold.
    let mut qualified = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for list in &p.lists {
        let arr = &p.index.arrays[list.si];
        if let Some(first) = list.entries.first() {
            for e in &arr.entries[first.exind as usize + 1..] {
                bump_ops(1);
                seen.insert(e.item);
                if utility_reaches(e.utility, minau) {
                    qualified.insert(e.item);
                }
            }
        }
    }

    let mut admitted_suffix = Vec::with_capacity(p.lists.len());
    for list in &p.lists {
        let arr = &p.index.arrays[list.si];
        let mut suffix = vec![0; arr.len() + 1];
        for k in (0..arr.len()).rev() {
            bump_ops(1);
            let e = &arr.entries[k];
            let admitted = match policy {
                RrsPolicy::ItemGlobal => qualified.contains(&e.item),
                RrsPolicy::PerOccurrence => utility_reaches(e.utility, minau),
            };
            suffix[k] = suffix[k + 1] + if admitted { e.utility } else { 0 };
        }
        admitted_suffix.push(suffix);
    }

    // |rrs|_d: rising labels witnessed behind the per-sequence best entry.
    let mut rising = BTreeSet::new();
    // Certified count: witnesses behind the per-sequence last entry.
    let mut certified = BTreeSet::new();
    for (li, list) in p.lists.iter().enumerate() {
        let arr = &p.index.arrays[list.si];
        let mut best: Option<(Utility, u32)> = None;
        for e in &list.entries {
            bump_ops(1);
            if arr.entries[e.exind as usize].ru > 0 {
                let numer = e.acu + admitted_suffix[li][e.exind as usize + 1];
                if best.is_none_or(|(b, _)| numer > b) {
                    best = Some((numer, e.exind));
                }
            }
        }
        if let Some((_, picked)) = best {
            for e in &arr.entries[picked as usize + 1..] {
                bump_ops(1);
                if utility_reaches(e.utility, minau) {
                    rising.insert(e.item);
                }
            }
        }
        if let Some(last) = list.entries.last() {
            for e in &arr.entries[last.exind as usize + 1..] {
                bump_ops(1);
                if utility_reaches(e.utility, minau) {
                    certified.insert(e.item);
                }
            }
        }
    }

    RrsView {
        distinct_count: rising.len() as u32,
        certified_count: certified.len() as u32,
        unpromising_count: (seen.len() - qualified.len()) as u32,
        qualified,
        minau,
        admitted_suffix,
    }
}

/// Max over entries with a non-empty remaining sequence of `acu + ru`;
/// zero when every extension position is sequence-final.
fn ori_numer_max(p: &ProjectedDb<'_>, li: usize) -> Utility {
    let list = &p.lists[li];
    let arr = &p.index.arrays[list.si];
    let mut best = 0;
    for e in &list.entries {
        bump_ops(1);
        let ru = arr.entries[e.exind as usize].ru;
        if ru > 0 {
            best = best.max(e.acu + ru);
        }
    }
    best
}

/// As [`ori_numer_max`] with the remaining utility filtered by the rrs.
fn rev_numer_max(p: &ProjectedDb<'_>, rrs: &RrsView, li: usize) -> Utility {
    let list = &p.lists[li];
    let arr = &p.index.arrays[list.si];
    let mut best = 0;
    for e in &list.entries {
        bump_ops(1);
        if arr.entries[e.exind as usize].ru > 0 {
            best = best.max(e.acu + rrs.u_rrs(li, e.exind));
        }
    }
    best
}

/// Database-level PEAU_Ori: per-sequence maxima over |S|, summed.
pub fn peau_ori(p: &ProjectedDb<'_>) -> Rational {
    let numer: Utility = (0..p.lists.len()).map(|li| ori_numer_max(p, li)).sum();
    Rational::new(numer, p.pattern_len() as i64)
}

/// PEAU_Ori restricted to one projected sequence.
pub fn peau_ori_seq(p: &ProjectedDb<'_>, li: usize) -> Rational {
    Rational::new(ori_numer_max(p, li), p.pattern_len() as i64)
}

/// Incremental version: the appended item enlarges the denominator.
pub fn peau_inc(p: &ProjectedDb<'_>) -> Rational {
    let numer: Utility = (0..p.lists.len()).map(|li| ori_numer_max(p, li)).sum();
    Rational::new(numer, p.pattern_len() as i64 + 1)
}

/// Revised version: remaining utility restricted to the rising sequence.
pub fn peau_rev(p: &ProjectedDb<'_>, rrs: &RrsView) -> Rational {
    let numer: Utility = (0..p.lists.len()).map(|li| rev_numer_max(p, rrs, li)).sum();
    Rational::new(numer, p.pattern_len() as i64 + 1)
}

/// Advance variant: denominator |S| + |rrs|_d (database-wide count).
pub fn vpeau_adv(p: &ProjectedDb<'_>, rrs: &RrsView) -> Rational {
    let numer: Utility = (0..p.lists.len()).map(|li| rev_numer_max(p, rrs, li)).sum();
    Rational::new(numer, p.pattern_len() as i64 + rrs.distinct_count as i64)
}

/// VPEAU_Adv restricted to one projected sequence.
pub fn vpeau_adv_seq(p: &ProjectedDb<'_>, rrs: &RrsView, li: usize) -> Rational {
    Rational::new(
        rev_numer_max(p, rrs, li),
        p.pattern_len() as i64 + rrs.distinct_count as i64,
    )
}

/// Position of `sid`'s list within a projection, if present.
fn find_list(p: &ProjectedDb<'_>, si: usize) -> Option<usize> {
    p.lists.binary_search_by_key(&si, |l| l.si).ok()
}

/// Reduced sequence average utility of `child`: the parent's per-sequence
/// PEAU_Ori summed over the sequences that contain the child.
pub fn rsau(parent: &ProjectedDb<'_>, child: &ProjectedDb<'_>) -> Rational {
    let mut numer = 0;
    for list in &child.lists {
        let pli = find_list(parent, list.si).expect("child sequences are parent sequences");
        numer += ori_numer_max(parent, pli);
    }
    Rational::new(numer, parent.pattern_len() as i64)
}

/// Last parent extension occurrence strictly before the child's first one.
fn last_parent_entry_before(plist: &SeqExtensions, o_exind: u32) -> u32 {
    let k = plist.entries.partition_point(|e| e.exind < o_exind);
    debug_assert!(k > 0, "the child's first entry has a predecessor");
    plist.entries[k - 1].exind
}

/// Tighter reduced sequence average utility of `child`.
///
/// Per child-containing sequence, when the parent's PEAU_Ori is attained
/// at its first instance, the numerator shrinks to the largest of three
/// covers, each of which dominates every instance of the child and its
/// descendants:
///
/// * the first-entry numerator minus the utility skipped between the
///   parent's last extension occurrence before the child's first one and
///   that first child occurrence (instances routed through parent entries
///   up to the skip can never touch the skipped occurrences);
/// * the plain numerator of any parent entry at or behind the child's
///   first occurrence (instances routed through late entries);
/// * the child's attained utility itself.
///
/// Without the attainment condition the sequence falls back to its RSAU
/// value.
pub fn trsau(parent: &ProjectedDb<'_>, child: &ProjectedDb<'_>) -> Rational {
    let len = parent.pattern_len() as i64;
    let mut total = Rational::zero();
    for list in &child.lists {
        let pli = find_list(parent, list.si).expect("child sequences are parent sequences");
        total += Rational::new(trsau_numer(parent, pli, list), len);
    }
    total
}

/// The per-sequence TRSAU numerator shared by [`trsau`] and
/// [`vtrsau_cert`].
fn trsau_numer(parent: &ProjectedDb<'_>, pli: usize, list: &SeqExtensions) -> Utility {
    let plist = &parent.lists[pli];
    let arr = &parent.index.arrays[plist.si];
    let numer_max = ori_numer_max(parent, pli);
    let first = &plist.entries[0];
    let first_ru = arr.entries[first.exind as usize].ru;
    let attained = first_ru > 0 && first.facu + first_ru == numer_max;
    if attained {
        let o = &list.entries[0];
        let jm = last_parent_entry_before(plist, o.exind);
        let oe = &arr.entries[o.exind as usize];
        let gap = arr.entries[jm as usize].ru - oe.utility - oe.ru;
        debug_assert!(gap >= 0);
        let late = late_numer_max(plist, arr, o.exind, |e| {
            e.acu + arr.entries[e.exind as usize].ru
        });
        let acu_max = list.entries.iter().map(|e| e.acu).max().unwrap_or(0);
        (numer_max - gap).max(late).max(acu_max)
    } else {
        numer_max
    }
}

/// Advance-family tighter reduced bound: the TRSAU reduction applied to
/// the parent's per-sequence VPEAU_Adv numerators, with the skipped
/// utility filtered by the parent's rising-sequence view (the skipped
/// appending occurrence itself is restored at full value). Each sequence
/// is additionally floored at the child's attained average-utility
/// contribution, so a failing test always certifies the child too.
pub fn vtrsau_adv(parent: &ProjectedDb<'_>, child: &ProjectedDb<'_>, rrs: &RrsView) -> Rational {
    let len = parent.pattern_len() as i64;
    let denom = len + rrs.distinct_count as i64;
    let mut total = Rational::zero();
    for list in &child.lists {
        let pli = find_list(parent, list.si).expect("child sequences are parent sequences");
        let plist = &parent.lists[pli];
        let arr = &parent.index.arrays[plist.si];

        let numer_max = rev_numer_max(parent, rrs, pli);
        let first = &plist.entries[0];
        let first_ru = arr.entries[first.exind as usize].ru;
        let attained = first_ru > 0 && first.facu + rrs.u_rrs(pli, first.exind) == numer_max;
        let numer = if attained {
            let o = &list.entries[0];
            let jm = last_parent_entry_before(plist, o.exind);
            let oe = &arr.entries[o.exind as usize];
            // u_rrs at j_m minus the appending occurrence (raw) minus
            // u_rrs behind it; negative when the occurrence is not rising.
            let gap = rrs.u_rrs(pli, jm) - oe.utility - rrs.u_rrs(pli, o.exind);
            let late = late_numer_max(plist, arr, o.exind, |e| e.acu + rrs.u_rrs(pli, e.exind));
            (numer_max - gap).max(late)
        } else {
            numer_max
        };
        let acu_max = list.entries.iter().map(|e| e.acu).max().unwrap_or(0);
        let value = Rational::new(numer, denom).max(Rational::new(acu_max, len + 1));
        total += value;
    }
    total
}

/// Certified Advance node test: the plain PEAU_Ori numerators over
/// |S| + certified_count.
///
/// VPEAU_Adv keeps only rising occurrences in its numerators, which can
/// undercount sub-threshold utility that aggregates across sequences;
/// its published safety argument does not actually hold, and random
/// databases exhibit violations. This companion keeps the full remaining
/// utility (so every extension instance is covered per sequence) and
/// still enlarges the denominator: a rising label witnessed behind the
/// last extension entry lies in every extension's remainder, so when the
/// extension does not use that label its witness is provably unspent
/// slack worth at least minau. The miner prunes an Advance subtree only
/// when both this test and VPEAU_Adv fail.
pub fn peau_cert(p: &ProjectedDb<'_>, rrs: &RrsView) -> Rational {
    let numer: Utility = (0..p.lists.len()).map(|li| ori_numer_max(p, li)).sum();
    Rational::new(numer, p.pattern_len() as i64 + rrs.certified_count as i64)
}

/// Certified Advance item test: the TRSAU numerators restricted to the
/// child's sequences, over |S| + (rising labels witnessed behind both the
/// last parent extension occurrence and the child's first one). The same
/// coverage argument as [`peau_cert`], with the witness windows clipped
/// so they avoid the subtracted skip region.
pub fn vtrsau_cert(parent: &ProjectedDb<'_>, child: &ProjectedDb<'_>, rrs: &RrsView) -> Rational {
    let mut numer = 0;
    let mut witnesses = BTreeSet::new();
    for list in &child.lists {
        let pli = find_list(parent, list.si).expect("child sequences are parent sequences");
        numer += trsau_numer(parent, pli, list);

        let plist = &parent.lists[pli];
        let arr = &parent.index.arrays[plist.si];
        let last = plist.entries.last().expect("non-empty extension list");
        let from = last.exind.max(list.entries[0].exind) as usize + 1;
        for e in &arr.entries[from..] {
            bump_ops(1);
            if utility_reaches(e.utility, rrs.minau) {
                witnesses.insert(e.item);
            }
        }
    }
    Rational::new(numer, parent.pattern_len() as i64 + witnesses.len() as i64)
}

/// Best numerator among parent entries at or behind the child's first
/// extension occurrence (entries with an empty remainder cannot host
/// descendants and are skipped).
fn late_numer_max(
    plist: &SeqExtensions,
    arr: &crate::projection::SeqArray,
    o_exind: u32,
    numer: impl Fn(&crate::projection::ExtensionEntry) -> Utility,
) -> Utility {
    let from = plist.entries.partition_point(|e| e.exind < o_exind);
    let mut best = 0;
    for e in &plist.entries[from..] {
        bump_ops(1);
        if arr.entries[e.exind as usize].ru > 0 {
            best = best.max(numer(e));
        }
    }
    best
}

/// The seven overestimation values of one pattern node. The reduced
/// bounds are relative to the node's growth parent and absent for
/// 1-sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub peau_ori: Rational,
    pub peau_inc: Rational,
    pub peau_rev: Rational,
    pub vpeau_adv: Rational,
    pub rsau: Option<Rational>,
    pub trsau: Option<Rational>,
    pub vtrsau_adv: Option<Rational>,
}

/// Computes every bound of `child` at once (used by traces and by the
/// definitional cross-checks).
pub fn bound_report(
    parent: Option<&ProjectedDb<'_>>,
    child: &ProjectedDb<'_>,
    minau: Rational,
    policy: RrsPolicy,
) -> BoundReport {
    let child_rrs = compute_rrs(child, minau, policy);
    let (rsau_v, trsau_v, vtrsau_v) = match parent {
        Some(parent) if !parent.is_root() => {
            let parent_rrs = compute_rrs(parent, minau, policy);
            (
                Some(rsau(parent, child)),
                Some(trsau(parent, child)),
                Some(vtrsau_adv(parent, child, &parent_rrs)),
            )
        }
        _ => (None, None, None),
    };
    BoundReport {
        peau_ori: peau_ori(child),
        peau_inc: peau_inc(child),
        peau_rev: peau_rev(child, &child_rrs),
        vpeau_adv: vpeau_adv(child, &child_rrs),
        rsau: rsau_v,
        trsau: trsau_v,
        vtrsau_adv: vtrsau_v,
    }
}
