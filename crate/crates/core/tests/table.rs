use std::time::Instant;

use num_bigint::BigInt;
use tropcount_core::{nu, AbelianType, DEFAULT_BUDGET};

const DIAG2: [(u64, u64); 15] = [
    (2, 15),
    (3, 40),
    (4, 151),
    (5, 156),
    (6, 600),
    (7, 400),
    (8, 1335),
    (9, 1201),
    (10, 2340),
    (11, 1464),
    (12, 6040),
    (13, 2380),
    (14, 6000),
    (15, 6240),
    (16, 11191),
];

const DIAG3: [(u64, u64); 15] = [
    (2, 135),
    (3, 1120),
    (4, 11287),
    (5, 19656),
    (6, 151200),
    (7, 137600),
    (8, 810135),
    (9, 915853),
    (10, 2653560),
    (11, 1950048),
    (12, 12641440),
    (13, 5231240),
    (14, 18576000),
    (15, 22014720),
    (16, 54681751),
];

const PAIRS: [((u64, u64), u64); 15] = [
    ((2, 4), 39),
    ((2, 6), 60),
    ((2, 8), 87),
    ((2, 10), 90),
    ((2, 12), 156),
    ((3, 6), 120),
    ((3, 9), 148),
    ((3, 12), 280),
    ((4, 8), 375),
    ((4, 12), 604),
    ((4, 16), 823),
    ((5, 10), 468),
    ((5, 15), 624),
    ((6, 12), 1560),
    ((6, 18), 2220),
];

fn nu_of(f: &[u64]) -> BigInt {
    nu(&AbelianType::new(f.to_vec()).unwrap(), DEFAULT_BUDGET).unwrap()
}

#[test]
fn published_table() {
    let start = Instant::now();
    for (d, v) in DIAG2 {
        assert_eq!(nu_of(&[d, d]), v.into(), "nu({d},{d})");
    }
    for (d, v) in DIAG3 {
        assert_eq!(nu_of(&[d, d, d]), v.into(), "nu({d},{d},{d})");
    }
    for ((a, b), v) in PAIRS {
        assert_eq!(nu_of(&[a, b]), v.into(), "nu({a},{b})");
    }
    assert!(
        start.elapsed().as_secs() < 120,
        "table took {:?}",
        start.elapsed()
    );
}
