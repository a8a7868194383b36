//! Brute-force oracle for lattice enumeration.
//!
//! Every finite poset has a natural labeling (a < b implies a < b as ids), so
//! scanning all transitive strictly-upper-triangular relations on 0..n covers
//! every isomorphism class. Classes are then merged by minimizing the join
//! table over all n! relabelings, with no refinement or pruning.

use std::collections::HashSet;

use fraisse_core::{FinLattice, Poset};

/// Join tables of all labeled lattices on `0..n` whose order is naturally
/// labeled, deduplicated by brute-force minimal relabeled table.
pub fn oracle_classes(n: usize, fix_bounds: bool) -> Vec<Vec<usize>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !fix_bounds || (a != 0 && b != n - 1))
        .collect();
    let perms = permutations(n);
    let mut classes = HashSet::new();
    for mask in 0u64..1 << pairs.len() {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
            if fix_bounds {
                row[n - 1] = true;
            }
        }
        if fix_bounds {
            leq[0] = vec![true; n];
        }
        for (bit, &(a, b)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                leq[a][b] = true;
            }
        }
        let transitive =
            (0..n).all(|a| (0..n).all(|b| !leq[a][b] || (0..n).all(|c| !leq[b][c] || leq[a][c])));
        if !transitive {
            continue;
        }
        let Some(join) = sup_table(&leq) else {
            continue;
        };
        if inf_exists(&leq) {
            let key = perms
                .iter()
                .map(|p| relabeled(&join, p))
                .min()
                .expect("n >= 1");
            classes.insert(key);
        }
    }
    let mut v: Vec<_> = classes.into_iter().collect();
    v.sort();
    v
}

fn sup_table(leq: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = leq.len();
    let mut t = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let ubs: Vec<usize> = (0..n).filter(|&c| leq[a][c] && leq[b][c]).collect();
            t[a * n + b] = *ubs.iter().find(|&&c| ubs.iter().all(|&d| leq[c][d]))?;
        }
    }
    Some(t)
}

fn inf_exists(leq: &[Vec<bool>]) -> bool {
    let n = leq.len();
    (0..n).all(|a| {
        (0..n).all(|b| {
            let lbs: Vec<usize> = (0..n).filter(|&c| leq[c][a] && leq[c][b]).collect();
            lbs.iter().any(|&c| lbs.iter().all(|&d| leq[d][c]))
        })
    })
}

fn relabeled(join: &[usize], perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    let mut t = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            t[perm[a] * n + perm[b]] = perm[join[a * n + b]];
        }
    }
    t
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn lattice_of(join: &[usize]) -> FinLattice {
    let n = (join.len() as f64).sqrt() as usize;
    let p = Poset::from_relation(n, |a, b| join[a * n + b] == b).unwrap();
    FinLattice::from_poset(&p).unwrap()
}

/// Oracle counts per size 1..=6, frozen once the oracle below reproduced them.
pub const FROZEN_COUNTS: [usize; 6] = [1, 1, 1, 2, 5, 15];
/// Size-7 count from the bounds-fixed oracle.
pub const FROZEN_COUNT_7: usize = 53;
