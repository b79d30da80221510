//! Projected-database machinery.
//!
//! Each q-sequence is flattened once into a *sequence array*: one entry per
//! occurrence carrying its utility, the utility `ru` of the remaining
//! sequence behind it, and the 1-based index `sind` of its itemset. An
//! *item-index head table* maps each label to its occurrence indices.
//!
//! A pattern's projection is a set of per-sequence *extension lists*: one
//! entry per extension occurrence (the occurrence of the pattern's last
//! item at which some instance ends), keeping the maximal instance utility
//! `acu` over instances sharing that occurrence. Collapsing instances per
//! occurrence is lossless for the average-utility semantics and for every
//! bound computed downstream, because all of them depend on an instance
//! only through (utility, extension occurrence).
//!
//! Entries additionally carry `facu`, the utility of the lexicographically
//! first instance ending at the occurrence; the tighter reduced bounds
//! need it to test whether a sequence's best prefix value is attained at
//! the first instance.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Database, Item, Pattern, QSequence, Utility};

pub use crate::model::ExtensionKind;

/// One occurrence in a flattened q-sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeqArrayEntry {
    pub item: Item,
    pub utility: Utility,
    /// Utility of the remaining sequence when this occurrence is the
    /// extension item: `ru[k] = utility[k+1] + ru[k+1]`, 0 for the last.
    pub ru: Utility,
    /// 1-based index of the containing itemset; non-decreasing.
    pub sind: u32,
}

/// Flattened view of one q-sequence plus its item-index head table.
#[derive(Debug, Clone)]
pub struct SeqArray {
    pub sid: u32,
    pub entries: Vec<SeqArrayEntry>,
    /// item label → ascending 0-based occurrence indices.
    pub head: BTreeMap<Item, Vec<u32>>,
}

impl SeqArray {
    /// Number of occurrences in the sequence.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Builds the sequence array and head table of one q-sequence.
pub fn build_seq_array(qs: &QSequence) -> SeqArray {
    let mut entries = Vec::with_capacity(qs.item_count());
    let mut head: BTreeMap<Item, Vec<u32>> = BTreeMap::new();
    for (sind, occ) in qs.flat_occurrences() {
        head.entry(occ.item).or_default().push(entries.len() as u32);
        entries.push(SeqArrayEntry {
            item: occ.item,
            utility: occ.utility,
            ru: 0,
            sind: sind as u32,
        });
    }
    let mut suffix = 0;
    for entry in entries.iter_mut().rev() {
        entry.ru = suffix;
        suffix += entry.utility;
    }
    SeqArray {
        sid: qs.sid,
        entries,
        head,
    }
}

/// Sequence arrays and head tables for a whole database, built once and
/// shared by every projection.
#[derive(Debug, Clone)]
pub struct ProjectionIndex {
    pub arrays: Vec<SeqArray>,
}

impl ProjectionIndex {
    pub fn build(db: &Database) -> Self {
        ProjectionIndex {
            arrays: db.sequences().iter().map(build_seq_array).collect(),
        }
    }

    /// Distinct labels across all head tables, ascending.
    pub fn items(&self) -> Vec<Item> {
        let mut set = BTreeSet::new();
        for arr in &self.arrays {
            set.extend(arr.head.keys().copied());
        }
        set.into_iter().collect()
    }
}

/// One extension occurrence of a pattern in one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionEntry {
    /// 0-based occurrence index of the extension item.
    pub exind: u32,
    /// Maximal instance utility among instances ending here.
    pub acu: Utility,
    /// Utility of the lexicographically first instance ending here.
    pub facu: Utility,
    /// Item count of the remaining sequence behind `exind`.
    pub rlen: u32,
}

/// Extension entries of one sequence, ascending by `exind`.
#[derive(Debug, Clone)]
pub struct SeqExtensions {
    /// Index of the sequence in the projection index.
    pub si: usize,
    pub sid: u32,
    pub entries: Vec<ExtensionEntry>,
}

/// A pattern's projection: shared index plus per-sequence extension lists
/// (only sequences containing the pattern appear).
#[derive(Debug, Clone)]
pub struct ProjectedDb<'a> {
    pub index: &'a ProjectionIndex,
    pub pattern: Pattern,
    pub lists: Vec<SeqExtensions>,
}

impl<'a> ProjectedDb<'a> {
    /// The root projection: empty pattern, no extension lists.
    pub fn root(index: &'a ProjectionIndex) -> Self {
        ProjectedDb {
            index,
            pattern: Pattern { itemsets: vec![] },
            lists: vec![],
        }
    }

    pub fn is_root(&self) -> bool {
        self.pattern.is_empty()
    }

    /// Pattern length |S|.
    pub fn pattern_len(&self) -> usize {
        self.pattern.len()
    }

    /// Sequence ids containing the pattern.
    pub fn sids(&self) -> Vec<u32> {
        self.lists.iter().map(|l| l.sid).collect()
    }

    /// Projects onto `pattern ⊕ item` (I-extension) or `pattern ⊗ item`
    /// (S-extension). Sequences with no compatible occurrence are dropped;
    /// an item absent everywhere yields an empty projection.
    pub fn extend(&self, item: Item, kind: ExtensionKind) -> ProjectedDb<'a> {
        let pattern = if self.is_root() {
            assert!(
                matches!(kind, ExtensionKind::Sequence),
                "root can only be S-extended into a 1-sequence"
            );
            Pattern {
                itemsets: vec![vec![item]],
            }
        } else {
            self.pattern.extended(item, kind)
        };

        let mut lists = Vec::new();
        if self.is_root() {
            for (si, arr) in self.index.arrays.iter().enumerate() {
                let Some(occs) = arr.head.get(&item) else {
                    continue;
                };
                let entries = occs
                    .iter()
                    .map(|&ix| {
                        let u = arr.entries[ix as usize].utility;
                        ExtensionEntry {
                            exind: ix,
                            acu: u,
                            facu: u,
                            rlen: (arr.len() - 1 - ix as usize) as u32,
                        }
                    })
                    .collect();
                lists.push(SeqExtensions {
                    si,
                    sid: arr.sid,
                    entries,
                });
            }
        } else {
            for list in &self.lists {
                let arr = &self.index.arrays[list.si];
                let Some(occs) = arr.head.get(&item) else {
                    continue;
                };
                let entries = match kind {
                    ExtensionKind::Item => extend_within_itemsets(arr, &list.entries, occs),
                    ExtensionKind::Sequence => extend_across_itemsets(arr, &list.entries, occs),
                };
                if !entries.is_empty() {
                    lists.push(SeqExtensions {
                        si: list.si,
                        sid: list.sid,
                        entries,
                    });
                }
            }
        }
        ProjectedDb {
            index: self.index,
            pattern,
            lists,
        }
    }

    /// Candidate appending items: `ilist` are I-extension items (labels
    /// greater than the pattern's last item, co-occurring after an
    /// extension occurrence within its itemset), `slist` are S-extension
    /// items (occurring in any strictly later itemset).
    pub fn extension_items(&self) -> (BTreeSet<Item>, BTreeSet<Item>) {
        assert!(
            !self.is_root(),
            "extension items are defined for non-root patterns"
        );
        let mut ilist = BTreeSet::new();
        let mut slist = BTreeSet::new();
        for list in &self.lists {
            let arr = &self.index.arrays[list.si];
            for entry in &list.entries {
                let sind = arr.entries[entry.exind as usize].sind;
                for e in &arr.entries[entry.exind as usize + 1..] {
                    if e.sind == sind {
                        ilist.insert(e.item);
                    } else {
                        break;
                    }
                }
            }
            // The first entry has the smallest itemset index, so it alone
            // determines which later itemsets exist in this sequence.
            if let Some(first) = list.entries.first() {
                let sind = arr.entries[first.exind as usize].sind;
                for e in &arr.entries[first.exind as usize + 1..] {
                    if e.sind > sind {
                        slist.insert(e.item);
                    }
                }
            }
        }
        (ilist, slist)
    }

    /// Debug dump: one line per extension entry, "sid exind acu rlen" with
    /// a 1-based exind.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for list in &self.lists {
            for e in &list.entries {
                out.push_str(&format!(
                    "{} {} {} {}\n",
                    list.sid,
                    e.exind + 1,
                    e.acu,
                    e.rlen
                ));
            }
        }
        out
    }

    /// Total number of extension entries (memory accounting).
    pub fn entry_count(&self) -> usize {
        self.lists.iter().map(|l| l.entries.len()).sum()
    }
}

/// Remaining-sequence utility at an extension entry: the seqArray `ru`.
pub fn remaining_utility(p: &ProjectedDb<'_>, sid: u32, entry: &ExtensionEntry) -> Utility {
    let list = p
        .lists
        .iter()
        .find(|l| l.sid == sid)
        .expect("entry belongs to a projected sequence");
    p.index.arrays[list.si].entries[entry.exind as usize].ru
}

/// I-extension: the appended occurrence must lie in the same itemset as a
/// predecessor entry, after it. Within one itemset a label occurs at most
/// once, so each itemset holds at most one predecessor.
fn extend_within_itemsets(
    arr: &SeqArray,
    parents: &[ExtensionEntry],
    occs: &[u32],
) -> Vec<ExtensionEntry> {
    let mut out = Vec::new();
    let mut pi = 0;
    for &ix in occs {
        let sind = arr.entries[ix as usize].sind;
        while pi < parents.len() && arr.entries[parents[pi].exind as usize].sind < sind {
            pi += 1;
        }
        if pi < parents.len() {
            let p = &parents[pi];
            let pe = &arr.entries[p.exind as usize];
            if pe.sind == sind && p.exind < ix {
                let u = arr.entries[ix as usize].utility;
                out.push(ExtensionEntry {
                    exind: ix,
                    acu: p.acu + u,
                    facu: p.facu + u,
                    rlen: (arr.len() - 1 - ix as usize) as u32,
                });
            }
        }
    }
    out
}

/// S-extension: the appended occurrence must lie in a strictly later
/// itemset than some predecessor entry; `acu` takes the best predecessor,
/// `facu` the earliest one.
fn extend_across_itemsets(
    arr: &SeqArray,
    parents: &[ExtensionEntry],
    occs: &[u32],
) -> Vec<ExtensionEntry> {
    let mut out = Vec::new();
    let mut pi = 0;
    let mut best_acu: Option<Utility> = None;
    let first_facu = parents
        .first()
        .map(|p| (arr.entries[p.exind as usize].sind, p.facu));
    for &ix in occs {
        let sind = arr.entries[ix as usize].sind;
        while pi < parents.len() && arr.entries[parents[pi].exind as usize].sind < sind {
            let acu = parents[pi].acu;
            best_acu = Some(best_acu.map_or(acu, |b: Utility| b.max(acu)));
            pi += 1;
        }
        if let Some(best) = best_acu {
            let u = arr.entries[ix as usize].utility;
            let (first_sind, ffacu) = first_facu.expect("parents non-empty when best exists");
            debug_assert!(first_sind < sind);
            out.push(ExtensionEntry {
                exind: ix,
                acu: best + u,
                facu: ffacu + u,
                rlen: (arr.len() - 1 - ix as usize) as u32,
            });
        }
    }
    out
}
