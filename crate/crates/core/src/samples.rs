//! A small built-in quantitative sequence database shared by the examples
//! and test suites.

use crate::model::{Database, ExternalUtilities, Item};

/// Labels of the seven items of the sample database. The tests spell
/// patterns with these names.
pub const A: Item = 1;
pub const C: Item = 2;
pub const B: Item = 3;
pub const D: Item = 4;
pub const E: Item = 5;
pub const F: Item = 6;
pub const G: Item = 7;

/// External utilities of the sample items.
pub fn sample_eu() -> ExternalUtilities {
    ExternalUtilities::new(
        [(A, 2), (C, 4), (B, 1), (D, 3), (E, 6), (F, 5), (G, 8)]
            .into_iter()
            .collect(),
    )
    .expect("sample external utilities are positive")
}

/// Three q-sequences of nine occurrences each; total utility 300.
pub fn sample_database() -> Database {
    let rows = vec![
        (
            1,
            vec![
                vec![(A, 2), (C, 8)],
                vec![(A, 1), (B, 4), (E, 5)],
                vec![(C, 1), (D, 1)],
                vec![(E, 1), (F, 1)],
            ],
        ),
        (
            2,
            vec![
                vec![(A, 1), (D, 8)],
                vec![(B, 2), (F, 3)],
                vec![(A, 1), (D, 3), (F, 1)],
                vec![(B, 1), (D, 1)],
            ],
        ),
        (
            3,
            vec![
                vec![(A, 1), (C, 3)],
                vec![(C, 4), (B, 9), (G, 5)],
                vec![(B, 1), (D, 7)],
                vec![(E, 6), (F, 2)],
            ],
        ),
    ];
    Database::new(rows, sample_eu()).expect("sample database is well-formed")
}
