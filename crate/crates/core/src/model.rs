//! Quantitative sequence data model and exact utility semantics.
//!
//! A database row is a q-sequence: an ordered list of q-itemsets, each a
//! set of (item, quantity) pairs. Every item has a strictly positive
//! external utility ("unit profit"); the utility of an occurrence is
//! quantity × external utility and is materialized at load time.
//!
//! A pattern embeds into a q-sequence at strictly increasing itemset
//! indices (an *instance*); its average utility in a sequence is the
//! maximum instance utility divided by the pattern length, and its
//! average utility in the database is the sum over containing sequences.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

/// Item identifier. Dense, dataset-scoped.
pub type Item = u32;

/// Exact occurrence/sequence utility.
pub type Utility = i64;

/// Exact average utility (numerator/denominator pair).
pub type Rational = Rational64;

/// Raw database rows: one (sid, itemsets of (item, quantity)) per sequence.
pub type QuantityRows = Vec<(u32, Vec<Vec<(Item, u32)>>)>;

/// Shorthand for an exact fraction.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("item {0} appears in the data but has no external utility entry")]
    MissingExternalUtility(Item),
    #[error("external utility of item {item} must be strictly positive, got {value}")]
    NonPositiveExternalUtility { item: Item, value: i64 },
    #[error("quantity of item {item} in sequence {sid} must be at least 1")]
    ZeroQuantity { item: Item, sid: u32 },
    #[error("sequence {sid} is empty")]
    EmptySequence { sid: u32 },
    #[error("sequence {sid} contains an empty itemset")]
    EmptyItemset { sid: u32 },
    #[error("itemset in sequence {sid} is not strictly increasing by item label")]
    UnsortedItemset { sid: u32 },
    #[error("duplicate sequence id {0}")]
    DuplicateSid(u32),
    #[error("pattern itemsets must be non-empty and strictly increasing by label")]
    MalformedPattern,
    #[error("position {0} is not an instance of the pattern in this sequence")]
    InvalidPosition(Position),
    #[error("threshold fraction must lie in (0, 1], got {0}")]
    XiOutOfRange(Rational),
    #[error("utility of item {item} in sequence {sid} overflows 64 bits")]
    UtilityOverflow { item: Item, sid: u32 },
}

/// External utility table: item label → unit profit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalUtilities {
    map: BTreeMap<Item, Utility>,
}

impl ExternalUtilities {
    pub fn new(map: BTreeMap<Item, Utility>) -> Result<Self, ModelError> {
        for (&item, &value) in &map {
            if value <= 0 {
                return Err(ModelError::NonPositiveExternalUtility { item, value });
            }
        }
        Ok(ExternalUtilities { map })
    }

    pub fn get(&self, item: Item) -> Option<Utility> {
        self.map.get(&item).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Item, Utility)> + '_ {
        self.map.iter().map(|(&i, &u)| (i, u))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// One q-item occurrence; `utility = quantity × eu(item)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QItemOccurrence {
    pub item: Item,
    pub quantity: u32,
    pub utility: Utility,
}

/// A q-itemset: occurrences with strictly increasing item labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QItemset {
    pub occurrences: Vec<QItemOccurrence>,
}

impl QItemset {
    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    /// Occurrence of `item` in this itemset, if present.
    pub fn find(&self, item: Item) -> Option<&QItemOccurrence> {
        self.occurrences
            .binary_search_by_key(&item, |o| o.item)
            .ok()
            .map(|i| &self.occurrences[i])
    }

    pub fn utility(&self) -> Utility {
        self.occurrences.iter().map(|o| o.utility).sum()
    }
}

/// A q-sequence: its identifier plus an ordered list of q-itemsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSequence {
    pub sid: u32,
    pub itemsets: Vec<QItemset>,
}

impl QSequence {
    /// Number of itemsets (the sequence "size").
    pub fn size(&self) -> usize {
        self.itemsets.len()
    }

    /// Total number of q-item occurrences (the sequence "length").
    pub fn item_count(&self) -> usize {
        self.itemsets.iter().map(|s| s.len()).sum()
    }

    /// Occurrences in flat order, with their 1-based itemset index.
    pub fn flat_occurrences(&self) -> impl Iterator<Item = (usize, &QItemOccurrence)> + '_ {
        self.itemsets
            .iter()
            .enumerate()
            .flat_map(|(j, s)| s.occurrences.iter().map(move |o| (j + 1, o)))
    }
}

/// Immutable quantitative sequence database with a cached total utility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    sequences: Vec<QSequence>,
    eu: ExternalUtilities,
    total_utility: Utility,
}

impl Database {
    /// Builds a database from raw (sid, itemsets-of-(item, quantity)) rows,
    /// materializing occurrence utilities. Rows must already be canonical:
    /// non-empty sequences, non-empty itemsets sorted strictly by label.
    pub fn new(rows: QuantityRows, eu: ExternalUtilities) -> Result<Self, ModelError> {
        let mut sequences = Vec::with_capacity(rows.len());
        let mut seen = std::collections::BTreeSet::new();
        for (sid, row) in rows {
            if !seen.insert(sid) {
                return Err(ModelError::DuplicateSid(sid));
            }
            if row.is_empty() {
                return Err(ModelError::EmptySequence { sid });
            }
            let mut itemsets = Vec::with_capacity(row.len());
            for items in row {
                if items.is_empty() {
                    return Err(ModelError::EmptyItemset { sid });
                }
                if !items.windows(2).all(|w| w[0].0 < w[1].0) {
                    return Err(ModelError::UnsortedItemset { sid });
                }
                let mut occurrences = Vec::with_capacity(items.len());
                for (item, quantity) in items {
                    if quantity == 0 {
                        return Err(ModelError::ZeroQuantity { item, sid });
                    }
                    let unit = eu
                        .get(item)
                        .ok_or(ModelError::MissingExternalUtility(item))?;
                    let utility = unit
                        .checked_mul(quantity as Utility)
                        .ok_or(ModelError::UtilityOverflow { item, sid })?;
                    occurrences.push(QItemOccurrence {
                        item,
                        quantity,
                        utility,
                    });
                }
                itemsets.push(QItemset { occurrences });
            }
            sequences.push(QSequence { sid, itemsets });
        }
        let total_utility = sequences.iter().map(sequence_utility).sum();
        Ok(Database {
            sequences,
            eu,
            total_utility,
        })
    }

    pub fn sequences(&self) -> &[QSequence] {
        &self.sequences
    }

    pub fn eu(&self) -> &ExternalUtilities {
        &self.eu
    }

    pub fn total_utility(&self) -> Utility {
        self.total_utility
    }

    /// Distinct item labels occurring in the data, ascending.
    pub fn items(&self) -> Vec<Item> {
        let mut set = std::collections::BTreeSet::new();
        for qs in &self.sequences {
            for (_, occ) in qs.flat_occurrences() {
                set.insert(occ.item);
            }
        }
        set.into_iter().collect()
    }
}

/// A pattern: ordered list of itemsets, each strictly increasing by label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    pub itemsets: Vec<Vec<Item>>,
}

/// How a pattern grows by one item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionKind {
    /// I-extension: append into the last itemset (label must increase).
    Item,
    /// S-extension: open a new itemset.
    Sequence,
}

impl Pattern {
    pub fn new(itemsets: Vec<Vec<Item>>) -> Result<Self, ModelError> {
        if itemsets.is_empty()
            || itemsets
                .iter()
                .any(|s| s.is_empty() || !s.windows(2).all(|w| w[0] < w[1]))
        {
            return Err(ModelError::MalformedPattern);
        }
        Ok(Pattern { itemsets })
    }

    /// Total item count |S|.
    pub fn len(&self) -> usize {
        self.itemsets.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.itemsets.is_empty()
    }

    /// Number of itemsets.
    pub fn size(&self) -> usize {
        self.itemsets.len()
    }

    /// Last item of the last itemset.
    pub fn last_item(&self) -> Option<Item> {
        self.itemsets.last().and_then(|s| s.last()).copied()
    }

    pub fn extended(&self, item: Item, kind: ExtensionKind) -> Pattern {
        let mut itemsets = self.itemsets.clone();
        match kind {
            ExtensionKind::Item => {
                debug_assert!(self.last_item().is_some_and(|last| item > last));
                itemsets.last_mut().expect("non-empty pattern").push(item);
            }
            ExtensionKind::Sequence => itemsets.push(vec![item]),
        }
        Pattern { itemsets }
    }

    /// The unique growth parent (pattern minus its last item), together with
    /// the removed item and the kind of extension that re-creates `self`.
    pub fn parent(&self) -> Option<(Pattern, Item, ExtensionKind)> {
        if self.len() <= 1 {
            return None;
        }
        let mut itemsets = self.itemsets.clone();
        let last = itemsets.last_mut().expect("non-empty pattern");
        let item = last.pop().expect("non-empty itemset");
        if last.is_empty() {
            itemsets.pop();
            Some((Pattern { itemsets }, item, ExtensionKind::Sequence))
        } else {
            Some((Pattern { itemsets }, item, ExtensionKind::Item))
        }
    }
}

impl fmt::Display for Pattern {
    /// Itemsets separated by " -1 ", items space-separated, matching the
    /// result-file grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for set in &self.itemsets {
            if !first {
                write!(f, " -1 ")?;
            }
            first = false;
            let mut first_item = true;
            for item in set {
                if !first_item {
                    write!(f, " ")?;
                }
                first_item = false;
                write!(f, "{item}")?;
            }
        }
        Ok(())
    }
}

/// Itemset indices (1-based, strictly increasing) of one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    pub indices: Vec<usize>,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (k, j) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, ">")
    }
}

/// Minimum average-utility threshold: a fraction of the database utility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    pub xi: Rational,
    pub minau: Rational,
}

impl Threshold {
    pub fn new(xi: Rational, db: &Database) -> Result<Self, ModelError> {
        if xi <= Rational::from_integer(0) || xi > Rational::from_integer(1) {
            return Err(ModelError::XiOutOfRange(xi));
        }
        Ok(Threshold {
            xi,
            minau: xi * Rational::from_integer(db.total_utility()),
        })
    }
}

/// Utility of a q-sequence: sum of its occurrence utilities.
pub fn sequence_utility(qs: &QSequence) -> Utility {
    qs.itemsets.iter().map(|s| s.utility()).sum()
}

/// Overall database utility u(D).
pub fn database_utility(db: &Database) -> Utility {
    db.sequences().iter().map(sequence_utility).sum()
}

/// `x` matches `y` iff the labels coincide element-wise (equal sets).
pub fn itemset_matches(x: &[Item], y: &QItemset) -> bool {
    x.len() == y.len() && x.iter().zip(&y.occurrences).all(|(&i, o)| i == o.item)
}

/// `y` contains `x` iff every label of `x` occurs in `y`.
pub fn itemset_contains(x: &[Item], y: &QItemset) -> bool {
    x.iter().all(|&i| y.find(i).is_some())
}

/// All instances of `s` in `qs`, as 1-based itemset-index vectors in
/// lexicographic order.
pub fn find_instances(s: &Pattern, qs: &QSequence) -> Vec<Position> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(s.size());
    search(s, qs, 0, 0, &mut current, &mut out);
    out
}

fn search(
    s: &Pattern,
    qs: &QSequence,
    depth: usize,
    from: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Position>,
) {
    if depth == s.size() {
        out.push(Position {
            indices: current.clone(),
        });
        return;
    }
    for j in from..qs.size() {
        if itemset_contains(&s.itemsets[depth], &qs.itemsets[j]) {
            current.push(j + 1);
            search(s, qs, depth + 1, j + 1, current, out);
            current.pop();
        }
    }
}

/// Utility of the instance of `s` at position `p` in `qs`: the sum of the
/// matched occurrences' utilities.
pub fn instance_utility(s: &Pattern, p: &Position, qs: &QSequence) -> Result<Utility, ModelError> {
    if p.indices.len() != s.size()
        || !p.indices.windows(2).all(|w| w[0] < w[1])
        || p.indices.iter().any(|&j| j == 0 || j > qs.size())
    {
        return Err(ModelError::InvalidPosition(p.clone()));
    }
    let mut total = 0;
    for (set, &j) in s.itemsets.iter().zip(&p.indices) {
        let itemset = &qs.itemsets[j - 1];
        for &item in set {
            let occ = itemset
                .find(item)
                .ok_or_else(|| ModelError::InvalidPosition(p.clone()))?;
            total += occ.utility;
        }
    }
    Ok(total)
}

/// Average utility of `s` in one q-sequence: the maximum instance utility
/// divided by the pattern length; zero when `s` has no instance.
pub fn pattern_avg_utility_in_seq(s: &Pattern, qs: &QSequence) -> Rational {
    let best = find_instances(s, qs)
        .iter()
        .map(|p| instance_utility(s, p, qs).expect("enumerated positions are valid"))
        .max();
    match best {
        Some(u) => ratio(u, s.len() as i64),
        None => Rational::from_integer(0),
    }
}

/// Average utility of `s` in the database: sum over sequences.
pub fn pattern_avg_utility(s: &Pattern, db: &Database) -> Rational {
    db.sequences()
        .iter()
        .map(|qs| pattern_avg_utility_in_seq(s, qs))
        .sum()
}

/// Whether `s` reaches the minimum average utility (comparison is `>=`).
pub fn is_hausp(s: &Pattern, db: &Database, t: &Threshold) -> bool {
    pattern_avg_utility(s, db) >= t.minau
}
