//! Value tables of `nu` on diagonal types and on selected pairs.

use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use tropcount_core::{nu, AbelianType, Result};

/// The `(d1, d2)` rows listed alongside the diagonal columns.
pub const PAIR_TYPES: [(u64, u64); 15] = [
    (2, 4),
    (2, 6),
    (2, 8),
    (2, 10),
    (2, 12),
    (3, 6),
    (3, 9),
    (3, 12),
    (4, 8),
    (4, 12),
    (4, 16),
    (5, 10),
    (5, 15),
    (6, 12),
    (6, 18),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    #[serde(rename = "type")]
    pub label: Vec<u64>,
    #[serde(serialize_with = "tropcount_core::json::ser_bigint")]
    pub value: BigInt,
}

/// Rows `(d, ..., d)` of length `genus` for `d = 2..=max_d`, then the pair
/// rows when asked. Computed in parallel, returned in this order.
pub fn table_rows(genus: usize, max_d: u64, pairs: bool, budget: u128) -> Result<Vec<TableRow>> {
    let mut labels: Vec<Vec<u64>> = (2..=max_d).map(|d| vec![d; genus]).collect();
    if pairs {
        labels.extend(PAIR_TYPES.iter().map(|&(a, b)| vec![a, b]));
    }
    labels
        .into_par_iter()
        .map(|label| {
            let value = nu(&AbelianType::new(label.clone())?, budget)?;
            Ok(TableRow { label, value })
        })
        .collect()
}

/// Two columns, the type written as `d1xd2[xd3]`.
pub fn to_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("type,nu\n");
    for r in rows {
        let label: Vec<String> = r.label.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "{},{}", label.join("x"), r.value);
    }
    out
}

pub fn to_json(rows: &[TableRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}
