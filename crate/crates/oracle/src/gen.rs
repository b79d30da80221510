//! Seeded random quantitative sequence databases for property testing
//! and scalability runs.

use std::ops::RangeInclusive;

use hausp_core::model::{Database, ExternalUtilities, Item, Utility};
use rand::seq::index::sample;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct GenParams {
    pub sequences: RangeInclusive<usize>,
    pub itemsets_per_sequence: RangeInclusive<usize>,
    pub items_per_itemset: RangeInclusive<usize>,
    /// Item labels are 1..=alphabet.
    pub alphabet: usize,
    pub quantity: RangeInclusive<u32>,
    pub external_utility: RangeInclusive<Utility>,
}

impl GenParams {
    /// Small databases that brute-force verification can exhaust.
    pub fn desk_scale() -> Self {
        GenParams {
            sequences: 1..=8,
            itemsets_per_sequence: 1..=6,
            items_per_itemset: 1..=4,
            alphabet: 6,
            quantity: 1..=9,
            external_utility: 1..=9,
        }
    }
}

pub fn random_database(rng: &mut impl Rng, params: &GenParams) -> Database {
    let eu_map = (1..=params.alphabet as Item)
        .map(|item| (item, rng.gen_range(params.external_utility.clone())))
        .collect();
    let eu = ExternalUtilities::new(eu_map).expect("generated utilities are positive");

    let n_seq = rng.gen_range(params.sequences.clone());
    let mut rows = Vec::with_capacity(n_seq);
    for sid in 1..=n_seq {
        let n_sets = rng.gen_range(params.itemsets_per_sequence.clone());
        let mut sets = Vec::with_capacity(n_sets);
        for _ in 0..n_sets {
            let k = rng
                .gen_range(params.items_per_itemset.clone())
                .min(params.alphabet);
            let mut labels: Vec<Item> = sample(rng, params.alphabet, k)
                .into_iter()
                .map(|i| i as Item + 1)
                .collect();
            labels.sort_unstable();
            sets.push(
                labels
                    .into_iter()
                    .map(|item| (item, rng.gen_range(params.quantity.clone())))
                    .collect(),
            );
        }
        rows.push((sid as u32, sets));
    }
    Database::new(rows, eu).expect("generated database is well-formed")
}
