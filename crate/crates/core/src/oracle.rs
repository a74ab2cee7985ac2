//! Brute-force oracles kept apart from the lattice-based code paths.

use std::collections::{BTreeMap, HashSet};

use crate::abelian::AbelianType;
use crate::error::{Error, Result};

/// Largest group accepted by [`subgroups_by_closure`].
pub const CLOSURE_MAX_ORDER: usize = 1024;

/// Subgroups found by element-wise closure: each subgroup is a bitset over
/// the elements of `G`, indexed in mixed radix.
pub struct ClosureSubgroups {
    pub subgroups: Vec<Vec<u64>>,
}

impl ClosureSubgroups {
    pub fn count(&self) -> usize {
        self.subgroups.len()
    }

    /// Histogram of subgroup orders.
    pub fn order_histogram(&self) -> BTreeMap<u64, usize> {
        let mut h = BTreeMap::new();
        for s in &self.subgroups {
            let o: u64 = s.iter().map(|w| u64::from(w.count_ones())).sum();
            *h.entry(o).or_insert(0) += 1;
        }
        h
    }
}

/// All subgroups of `G`, found by repeatedly adjoining single elements to
/// known subgroups, starting from the trivial one.
pub fn subgroups_by_closure(t: &AbelianType) -> Result<ClosureSubgroups> {
    let order = usize::try_from(&t.order()).unwrap_or(usize::MAX);
    if order > CLOSURE_MAX_ORDER {
        return Err(Error::BudgetExceeded {
            candidates: order as u128,
            budget: CLOSURE_MAX_ORDER as u128,
        });
    }
    let radix: Vec<usize> = t.factors().iter().map(|&d| d as usize).collect();
    let coords: Vec<Vec<usize>> = (0..order)
        .map(|mut x| {
            radix
                .iter()
                .map(|&r| {
                    let c = x % r;
                    x /= r;
                    c
                })
                .collect()
        })
        .collect();
    let encode = |c: &[usize]| -> usize {
        c.iter()
            .zip(&radix)
            .rev()
            .fold(0, |acc, (&ci, &r)| acc * r + ci)
    };
    let add = |a: usize, b: usize| -> usize {
        let c: Vec<usize> = coords[a]
            .iter()
            .zip(&coords[b])
            .zip(&radix)
            .map(|((x, y), r)| (x + y) % r)
            .collect();
        encode(&c)
    };
    // addition table keeps the closure loop cheap
    let table: Vec<Vec<u32>> = (0..order)
        .map(|a| (0..order).map(|b| add(a, b) as u32).collect())
        .collect();
    let words = order.div_ceil(64);
    let contains = |s: &[u64], x: usize| s[x / 64] >> (x % 64) & 1 == 1;

    let mut trivial = vec![0u64; words];
    trivial[0] |= 1;
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(trivial.clone());
    let mut queue = vec![trivial];
    let mut found = Vec::new();
    while let Some(s) = queue.pop() {
        let members: Vec<usize> = (0..order).filter(|&x| contains(&s, x)).collect();
        for x in 0..order {
            if contains(&s, x) {
                continue;
            }
            // <S, x> = union of the cosets S + kx
            let mut next = s.clone();
            let mut shift = x;
            while !contains(&s, shift) {
                for &m in &members {
                    let y = table[m][shift] as usize;
                    next[y / 64] |= 1 << (y % 64);
                }
                shift = table[shift][x] as usize;
            }
            if seen.insert(next.clone()) {
                queue.push(next);
            }
        }
        found.push(s);
    }
    found.sort();
    Ok(ClosureSubgroups { subgroups: found })
}

/// Every invariant-factor chain of order exactly `n` (no leading ones).
pub fn types_of_order(n: u64) -> Vec<AbelianType> {
    // factors are chosen from the top down, each dividing the previous one
    fn rec(remaining: u64, cap: u64, current: &mut Vec<u64>, out: &mut Vec<AbelianType>) {
        if remaining == 1 {
            let v = current.iter().rev().copied().collect();
            out.push(AbelianType::new(v).expect("chain by construction"));
            return;
        }
        for d in (2..=cap.min(remaining)).rev() {
            if remaining.is_multiple_of(d) && cap.is_multiple_of(d) {
                current.push(d);
                rec(remaining / d, d, current, out);
                current.pop();
            }
        }
    }
    if n == 1 {
        return vec![AbelianType::trivial(1)];
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_small_groups() {
        let t = AbelianType::new(vec![2, 2]).unwrap();
        let s = subgroups_by_closure(&t).unwrap();
        assert_eq!(s.count(), 5);
        let t = AbelianType::new(vec![2, 4]).unwrap();
        let s = subgroups_by_closure(&t).unwrap();
        assert_eq!(s.count(), 8);
        let h: Vec<(u64, usize)> = s.order_histogram().into_iter().collect();
        assert_eq!(h, vec![(1, 1), (2, 3), (4, 3), (8, 1)]);
    }

    #[test]
    fn partitions_of_order() {
        let names: Vec<String> = types_of_order(16).iter().map(ToString::to_string).collect();
        assert_eq!(names, vec!["2,2,2,2", "2,2,4", "2,8", "4,4", "16"]);
        assert_eq!(types_of_order(12).len(), 2);
        assert_eq!(types_of_order(1).len(), 1);
        assert_eq!(types_of_order(7).len(), 1);
    }
}
