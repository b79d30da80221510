//! Definitional brute-force ground truth for HAUSP mining.
//!
//! Everything here is computed straight from the data model: exhaustive
//! pattern enumeration, instance-by-instance utility maxima, and the
//! overestimation measures re-derived from their definitions by position
//! enumeration. No projections, no pruning, no shared acceleration
//! structures: the only dependency on the mining crate is the core data
//! model (and the bound-report container). Deliberately slow and
//! deliberately duplicated, so it can arbitrate the fast path.

pub mod gen;

use std::collections::{BTreeMap, BTreeSet};

use hausp_core::bounds::{BoundReport, RrsPolicy};
use hausp_core::model::{
    self, instance_utility, itemset_contains, pattern_avg_utility, Database, Item, Pattern,
    QSequence, Rational, Threshold, Utility,
};
use num_traits::Zero;
use thiserror::Error;

/// Hard cap on brute-force enumeration depth.
pub const MAX_ORACLE_LENGTH: usize = 8;

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub xi: Rational,
    /// Required: exhaustive enumeration is exponential in this.
    pub max_pattern_length: usize,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(
        "maximum pattern length {0} exceeds the brute-force cap {MAX_ORACLE_LENGTH}; \
         the oracle exists for desk-scale verification only; lower --max-len or use the miner"
    )]
    LimitExceeded(usize),
    #[error(transparent)]
    Config(#[from] model::ModelError),
}

/// Greedy left-most containment test. This is intentionally a different
/// algorithm from the model's exhaustive instance search; the two act as
/// independent embedding routines.
pub fn contains_pattern(s: &Pattern, qs: &QSequence) -> bool {
    let mut j = 0;
    for set in &s.itemsets {
        loop {
            if j == qs.size() {
                return false;
            }
            if itemset_contains(set, &qs.itemsets[j]) {
                j += 1;
                break;
            }
            j += 1;
        }
    }
    true
}

fn occurs(s: &Pattern, db: &Database) -> bool {
    db.sequences().iter().any(|qs| contains_pattern(s, qs))
}

/// Every distinct pattern of length ≤ `max_len` with at least one
/// instance in the database, in pattern-lexicographic order.
pub fn enumerate_patterns(db: &Database, max_len: usize) -> Result<Vec<Pattern>, OracleError> {
    if max_len > MAX_ORACLE_LENGTH {
        return Err(OracleError::LimitExceeded(max_len));
    }
    let items = db.items();
    let mut out = Vec::new();
    for &item in &items {
        let p = Pattern {
            itemsets: vec![vec![item]],
        };
        if occurs(&p, db) {
            expand(db, &items, p, max_len, &mut out);
        }
    }
    out.sort();
    Ok(out)
}

fn expand(db: &Database, items: &[Item], p: Pattern, max_len: usize, out: &mut Vec<Pattern>) {
    out.push(p.clone());
    if p.len() >= max_len {
        return;
    }
    let last = p.last_item().expect("non-empty pattern");
    for &item in items {
        if item > last {
            let child = p.extended(item, model::ExtensionKind::Item);
            if occurs(&child, db) {
                expand(db, items, child, max_len, out);
            }
        }
    }
    for &item in items {
        let child = p.extended(item, model::ExtensionKind::Sequence);
        if occurs(&child, db) {
            expand(db, items, child, max_len, out);
        }
    }
}

/// Reference result set: all enumerable patterns whose average utility
/// reaches ξ × u(D), via the definitional average only.
pub fn oracle_mine(
    db: &Database,
    cfg: &OracleConfig,
) -> Result<Vec<(Pattern, Rational)>, OracleError> {
    let threshold = Threshold::new(cfg.xi, db)?;
    let mut out = Vec::new();
    for p in enumerate_patterns(db, cfg.max_pattern_length)? {
        let au = pattern_avg_utility(&p, db);
        if au >= threshold.minau {
            out.push((p, au));
        }
    }
    Ok(out)
}

/// Flat occurrence view of one q-sequence, built locally.
struct FlatSeq {
    items: Vec<Item>,
    utils: Vec<Utility>,
    /// Suffix utility behind each occurrence.
    ru: Vec<Utility>,
    /// (1-based itemset index, item) → flat occurrence index.
    by_position: BTreeMap<(usize, Item), usize>,
}

fn flatten(qs: &QSequence) -> FlatSeq {
    let mut items = Vec::new();
    let mut utils = Vec::new();
    let mut by_position = BTreeMap::new();
    for (sind, occ) in qs.flat_occurrences() {
        by_position.insert((sind, occ.item), items.len());
        items.push(occ.item);
        utils.push(occ.utility);
    }
    let mut ru = vec![0; utils.len()];
    for k in (0..utils.len().saturating_sub(1)).rev() {
        ru[k] = ru[k + 1] + utils[k + 1];
    }
    FlatSeq {
        items,
        utils,
        ru,
        by_position,
    }
}

/// Per-sequence instance summary of one pattern.
struct SeqInstances {
    /// Distinct extension occurrences, ascending.
    exts: Vec<usize>,
    /// Max instance utility per extension occurrence.
    acu: BTreeMap<usize, Utility>,
    /// Utility of the lexicographically first instance.
    first_utility: Utility,
    /// Its extension occurrence (the smallest one).
    first_ext: usize,
    /// Max instance utility overall.
    acu_max: Utility,
}

fn seq_instances(s: &Pattern, qs: &QSequence, flat: &FlatSeq) -> Option<SeqInstances> {
    let positions = model::find_instances(s, qs);
    if positions.is_empty() {
        return None;
    }
    let last_item = s.last_item().expect("non-empty pattern");
    let mut acu: BTreeMap<usize, Utility> = BTreeMap::new();
    let mut first: Option<(usize, Utility)> = None;
    let mut acu_max = Utility::MIN;
    for p in &positions {
        let u = instance_utility(s, p, qs).expect("enumerated positions are valid");
        let jm = *p.indices.last().expect("non-empty position");
        let ext = flat.by_position[&(jm, last_item)];
        let best = acu.entry(ext).or_insert(Utility::MIN);
        *best = (*best).max(u);
        acu_max = acu_max.max(u);
        if first.is_none() {
            first = Some((ext, u));
        }
    }
    let (first_ext, first_utility) = first.expect("at least one instance");
    let exts: Vec<usize> = acu.keys().copied().collect();
    debug_assert_eq!(exts[0], first_ext, "the first instance ends earliest");
    Some(SeqInstances {
        exts,
        acu,
        first_utility,
        first_ext,
        acu_max,
    })
}

/// max over extension occurrences with a non-empty remainder of
/// (acu + remainder), where the remainder is drawn from `suffix`.
fn numer_max(info: &SeqInstances, flat: &FlatSeq, suffix: Option<&[Utility]>) -> Utility {
    let mut best = 0;
    for (&ext, &acu) in &info.acu {
        if flat.ru[ext] > 0 {
            let rest = match suffix {
                Some(s) => s[ext + 1],
                None => flat.ru[ext],
            };
            best = best.max(acu + rest);
        }
    }
    best
}

struct RrsInfo {
    /// |rrs|_d restricted to the per-sequence best-entry windows.
    distinct_count: usize,
    /// Per containing sequence: admitted-utility suffix sums (len + 1).
    suffixes: Vec<Vec<Utility>>,
}

fn utility_reaches(value: Utility, bound: Rational) -> bool {
    i128::from(value) * i128::from(*bound.denom()) >= i128::from(*bound.numer())
}

/// Rising-sequence data for one pattern, from its instances alone.
fn rrs_info(
    infos: &[(usize, SeqInstances)],
    flats: &[FlatSeq],
    minau: Rational,
    policy: RrsPolicy,
) -> RrsInfo {
    let mut qualified = BTreeSet::new();
    for (si, info) in infos {
        let flat = &flats[*si];
        for t in info.first_ext + 1..flat.items.len() {
            if utility_reaches(flat.utils[t], minau) {
                qualified.insert(flat.items[t]);
            }
        }
    }
    let mut suffixes = Vec::new();
    for (si, _) in infos {
        let flat = &flats[*si];
        let n = flat.items.len();
        let mut sfx = vec![0; n + 1];
        for t in (0..n).rev() {
            let admitted = match policy {
                RrsPolicy::ItemGlobal => qualified.contains(&flat.items[t]),
                RrsPolicy::PerOccurrence => utility_reaches(flat.utils[t], minau),
            };
            sfx[t] = sfx[t + 1] + if admitted { flat.utils[t] } else { 0 };
        }
        suffixes.push(sfx);
    }

    // Rising labels witnessed behind the per-sequence best extension
    // occurrence (by acu + admitted remainder, earliest among ties).
    let mut rising = BTreeSet::new();
    for (pos, (si, info)) in infos.iter().enumerate() {
        let flat = &flats[*si];
        let mut best: Option<(Utility, usize)> = None;
        for (&ext, &acu) in &info.acu {
            if flat.ru[ext] > 0 {
                let numer = acu + suffixes[pos][ext + 1];
                if best.is_none_or(|(b, _)| numer > b) {
                    best = Some((numer, ext));
                }
            }
        }
        if let Some((_, picked)) = best {
            for t in picked + 1..flat.items.len() {
                if utility_reaches(flat.utils[t], minau) {
                    rising.insert(flat.items[t]);
                }
            }
        }
    }

    RrsInfo {
        distinct_count: rising.len(),
        suffixes,
    }
}

/// Every bound of `s` recomputed from the definitions by position
/// enumeration. The reduced bounds are relative to the unique growth
/// parent of `s` and absent for 1-sequences.
pub fn definitional_bounds(
    db: &Database,
    s: &Pattern,
    t: &Threshold,
    policy: RrsPolicy,
) -> BoundReport {
    let flats: Vec<FlatSeq> = db.sequences().iter().map(flatten).collect();
    let infos: Vec<(usize, SeqInstances)> = db
        .sequences()
        .iter()
        .enumerate()
        .filter_map(|(si, qs)| seq_instances(s, qs, &flats[si]).map(|i| (si, i)))
        .collect();
    let len = s.len() as i64;
    let rrs = rrs_info(&infos, &flats, t.minau, policy);
    let k = rrs.distinct_count as i64;

    let mut ori_sum = 0;
    let mut rev_sum = 0;
    for (pos, (si, info)) in infos.iter().enumerate() {
        ori_sum += numer_max(info, &flats[*si], None);
        rev_sum += numer_max(info, &flats[*si], Some(&rrs.suffixes[pos]));
    }

    let (rsau_v, trsau_v, vtrsau_v) = match s.parent() {
        None => (None, None, None),
        Some((parent, _, _)) => {
            let parent_infos: Vec<(usize, SeqInstances)> = db
                .sequences()
                .iter()
                .enumerate()
                .filter_map(|(si, qs)| seq_instances(&parent, qs, &flats[si]).map(|i| (si, i)))
                .collect();
            let parent_rrs = rrs_info(&parent_infos, &flats, t.minau, policy);
            let pk = parent_rrs.distinct_count as i64;
            let plen = parent.len() as i64;

            let mut rsau_sum = Rational::zero();
            let mut trsau_sum = Rational::zero();
            let mut vtrsau_sum = Rational::zero();
            for (si, child_info) in &infos {
                let flat = &flats[*si];
                let (ppos, parent_info) = parent_infos
                    .iter()
                    .enumerate()
                    .find_map(|(pos, (psi, info))| (psi == si).then_some((pos, info)))
                    .expect("child sequences contain the parent");
                let psfx = &parent_rrs.suffixes[ppos];

                let ori = numer_max(parent_info, flat, None);
                rsau_sum += Rational::new(ori, plen);
                trsau_sum += reduced_ori(parent_info, child_info, flat, ori, plen);

                let rev = numer_max(parent_info, flat, Some(psfx));
                vtrsau_sum += reduced_adv(parent_info, child_info, flat, psfx, rev, plen, pk);
            }
            (Some(rsau_sum), Some(trsau_sum), Some(vtrsau_sum))
        }
    };

    BoundReport {
        peau_ori: Rational::new(ori_sum, len),
        peau_inc: Rational::new(ori_sum, len + 1),
        peau_rev: Rational::new(rev_sum, len + 1),
        vpeau_adv: Rational::new(rev_sum, len + k),
        rsau: rsau_v,
        trsau: trsau_v,
        vtrsau_adv: vtrsau_v,
    }
}

/// Last parent extension occurrence strictly before the child's first.
fn last_ext_before(parent: &SeqInstances, o: usize) -> usize {
    *parent
        .exts
        .iter()
        .rfind(|&&e| e < o)
        .expect("the child's first extension has a parent predecessor")
}

/// Best parent numerator among extension occurrences behind the child's
/// first one.
fn late_numer(parent: &SeqInstances, flat: &FlatSeq, o: usize, sfx: Option<&[Utility]>) -> Utility {
    let mut best = 0;
    for (&ext, &acu) in parent.acu.range(o..) {
        if flat.ru[ext] > 0 {
            let rest = match sfx {
                Some(s) => s[ext + 1],
                None => flat.ru[ext],
            };
            best = best.max(acu + rest);
        }
    }
    best
}

/// Per-sequence tighter reduced value on the plain (PEAU_Ori) scale.
fn reduced_ori(
    parent: &SeqInstances,
    child: &SeqInstances,
    flat: &FlatSeq,
    numer_max: Utility,
    len: i64,
) -> Rational {
    let attained = flat.ru[parent.first_ext] > 0
        && parent.first_utility + flat.ru[parent.first_ext] == numer_max;
    let numer = if attained {
        let o = child.first_ext;
        let jm = last_ext_before(parent, o);
        let gap = flat.ru[jm] - flat.utils[o] - flat.ru[o];
        (numer_max - gap)
            .max(late_numer(parent, flat, o, None))
            .max(child.acu_max)
    } else {
        numer_max
    };
    Rational::new(numer, len)
}

/// Per-sequence tighter reduced value on the Advance scale, floored at
/// the child's attained average-utility contribution.
fn reduced_adv(
    parent: &SeqInstances,
    child: &SeqInstances,
    flat: &FlatSeq,
    sfx: &[Utility],
    numer_max: Utility,
    len: i64,
    k: i64,
) -> Rational {
    let attained = flat.ru[parent.first_ext] > 0
        && parent.first_utility + sfx[parent.first_ext + 1] == numer_max;
    let numer = if attained {
        let o = child.first_ext;
        let jm = last_ext_before(parent, o);
        let gap = sfx[jm + 1] - flat.utils[o] - sfx[o + 1];
        (numer_max - gap).max(late_numer(parent, flat, o, Some(sfx)))
    } else {
        numer_max
    };
    Rational::new(numer, len + k).max(Rational::new(child.acu_max, len + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hausp_core::model::ratio;
    use hausp_core::samples::{sample_database, A, B, C, D, E, F, G};

    fn pat(itemsets: &[&[Item]]) -> Pattern {
        Pattern::new(itemsets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    #[test]
    fn one_item_patterns_of_the_sample() {
        let db = sample_database();
        let ps = enumerate_patterns(&db, 1).unwrap();
        assert_eq!(ps.len(), 7);
    }

    #[test]
    fn enumeration_contains_the_worked_examples() {
        let db = sample_database();
        let ps = enumerate_patterns(&db, 2).unwrap();
        assert!(ps.contains(&pat(&[&[A, C]])));
        assert!(ps.contains(&pat(&[&[A], &[E]])));
    }

    #[test]
    fn empty_database_enumerates_nothing() {
        let eu = hausp_core::model::ExternalUtilities::new(Default::default()).unwrap();
        let db = Database::new(vec![], eu).unwrap();
        assert!(enumerate_patterns(&db, 3).unwrap().is_empty());
    }

    #[test]
    fn limit_is_enforced() {
        let db = sample_database();
        assert!(matches!(
            enumerate_patterns(&db, 9),
            Err(OracleError::LimitExceeded(9))
        ));
    }

    #[test]
    fn oracle_mine_finds_the_g_pattern() {
        let db = sample_database();
        let cfg = OracleConfig {
            xi: ratio(12, 100),
            max_pattern_length: 4,
        };
        let results = oracle_mine(&db, &cfg).unwrap();
        assert!(results.contains(&(pat(&[&[G]]), ratio(40, 1))));
        for (_, au) in &results {
            assert!(*au >= ratio(36, 1));
        }
    }

    #[test]
    fn tiny_threshold_returns_every_enumerated_pattern() {
        let db = sample_database();
        let cfg = OracleConfig {
            xi: ratio(1, 1_000_000),
            max_pattern_length: 3,
        };
        let results = oracle_mine(&db, &cfg).unwrap();
        let all = enumerate_patterns(&db, 3).unwrap();
        assert_eq!(results.len(), all.len());
    }

    #[test]
    fn definitional_bounds_reproduce_the_worked_node() {
        let db = sample_database();
        let t = Threshold::new(ratio(12, 100), &db).unwrap();
        let report = definitional_bounds(&db, &pat(&[&[A, C], &[B]]), &t, RrsPolicy::ItemGlobal);
        assert_eq!(report.peau_ori, ratio(73, 1));
        assert_eq!(report.peau_inc, ratio(219, 4));
        assert_eq!(report.peau_rev, ratio(175, 4));
        assert_eq!(report.vpeau_adv, ratio(35, 1));
    }

    #[test]
    fn definitional_bounds_vanish_at_sequence_end() {
        let db = sample_database();
        let t = Threshold::new(ratio(12, 100), &db).unwrap();
        // <{e},{f}> ends at its only sequence's last occurrence.
        let report = definitional_bounds(&db, &pat(&[&[E], &[F]]), &t, RrsPolicy::ItemGlobal);
        assert_eq!(report.peau_ori, ratio(0, 1));
        assert_eq!(report.peau_rev, ratio(0, 1));
        assert_eq!(report.vpeau_adv, ratio(0, 1));
    }

    #[test]
    fn definitional_reduced_bounds_match_hand_values() {
        let db = sample_database();
        let t = Threshold::new(ratio(12, 100), &db).unwrap();
        let report = definitional_bounds(&db, &pat(&[&[B], &[D]]), &t, RrsPolicy::ItemGlobal);
        assert_eq!(report.rsau, Some(ratio(206, 1)));
        assert_eq!(report.trsau, Some(ratio(155, 1)));
        assert_eq!(report.vtrsau_adv, Some(ratio(271, 6)));

        let report = definitional_bounds(&db, &pat(&[&[B], &[D], &[F]]), &t, RrsPolicy::ItemGlobal);
        assert_eq!(report.rsau, Some(ratio(47, 1)));
        assert_eq!(report.trsau, Some(ratio(26, 1)));
    }

    #[test]
    fn sequence_order_does_not_change_oracle_results() {
        let db = sample_database();
        let eu = db.eu().clone();
        let mut rows: model::QuantityRows = db
            .sequences()
            .iter()
            .map(|qs| {
                (
                    qs.sid,
                    qs.itemsets
                        .iter()
                        .map(|s| s.occurrences.iter().map(|o| (o.item, o.quantity)).collect())
                        .collect(),
                )
            })
            .collect();
        rows.reverse();
        let reversed = Database::new(rows, eu).unwrap();
        let cfg = OracleConfig {
            xi: ratio(12, 100),
            max_pattern_length: 3,
        };
        assert_eq!(
            oracle_mine(&db, &cfg).unwrap(),
            oracle_mine(&reversed, &cfg).unwrap()
        );
    }

    #[test]
    fn both_embedding_routines_agree() {
        let db = sample_database();
        for p in enumerate_patterns(&db, 3).unwrap() {
            for qs in db.sequences() {
                assert_eq!(
                    contains_pattern(&p, qs),
                    !model::find_instances(&p, qs).is_empty()
                );
            }
        }
    }
}
