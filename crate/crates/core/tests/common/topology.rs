//! Generators for the table-prefix metric and the density witnesses.

use fraisse_core::error::Op;
use fraisse_core::lab::{LabeledPartial, TablePrefix};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::catalog;

pub fn random_prefix(r: &mut ChaCha8Rng, bound: usize) -> TablePrefix {
    let mut p = TablePrefix::unknown(bound);
    for i in 0..=bound {
        for j in 0..=bound {
            for op in [Op::Join, Op::Meet] {
                let v = r.gen_range(0..4u64);
                p.set(op, i, j, (v < 3).then_some(v));
            }
        }
    }
    p
}

/// A copy of `p` with a few entries changed, mostly at large arguments.
pub fn perturbed(r: &mut ChaCha8Rng, p: &TablePrefix) -> TablePrefix {
    let mut q = p.clone();
    for _ in 0..r.gen_range(0..3) {
        let (i, j) = (r.gen_range(0..=p.bound), r.gen_range(0..=p.bound));
        let op = if r.gen_bool(0.5) { Op::Join } else { Op::Meet };
        q.set(op, i.max(j), i.min(j), Some(r.gen_range(0..5)));
    }
    q
}

/// Labels for `n` elements drawn from `0..limit` without repetition.
pub fn random_labels(r: &mut ChaCha8Rng, n: usize, limit: u64) -> Vec<u64> {
    let mut pool: Vec<u64> = (0..limit).collect();
    pool.shuffle(r);
    pool.truncate(n);
    pool
}

/// A partial lattice that weakly embeds into a labeled catalog lattice: a
/// random subset of the carrier and a random subset of the entries closed in it.
pub fn random_weak_partial(r: &mut ChaCha8Rng) -> LabeledPartial {
    let all = catalog(5);
    let l = all.choose(r).unwrap();
    let labels = random_labels(r, l.len(), 10);
    let keep: Vec<usize> = (0..l.len()).filter(|_| r.gen_bool(0.7)).collect();
    let mut entries = Vec::new();
    for &a in &keep {
        for &b in &keep {
            for (op, c) in [(Op::Join, l.join(a, b)), (Op::Meet, l.meet(a, b))] {
                if keep.contains(&c) && a <= b && r.gen_bool(0.6) {
                    entries.push((op, labels[a], labels[b], labels[c]));
                }
            }
        }
    }
    let carrier: Vec<u64> = keep.iter().map(|&x| labels[x]).collect();
    LabeledPartial::from_entries(&carrier, &entries).unwrap()
}
