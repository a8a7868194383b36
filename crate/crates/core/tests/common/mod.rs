//! Brute-force oracles and generators shared by the integration tests. The
//! oracles only use the raw tables and never call the library's searches.
#![allow(dead_code)]

pub mod oracle;
pub mod topology;

use fraisse_core::enumerate::enumerate_lattices_upto;
use fraisse_core::{FinLattice, PartialLattice, Poset};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Whether `map` is an injective join- and meet-preserving map `b -> c`.
pub fn brute_is_embedding(b: &FinLattice, c: &FinLattice, map: &[usize]) -> bool {
    let n = b.len();
    if map.len() != n || map.iter().any(|&x| x >= c.len()) {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            if x != y && map[x] == map[y] {
                return false;
            }
            if map[b.join(x, y)] != c.join(map[x], map[y])
                || map[b.meet(x, y)] != c.meet(map[x], map[y])
            {
                return false;
            }
        }
    }
    true
}

/// Every embedding `b -> c`, in lexicographic order of the image tuples.
pub fn brute_embeddings(b: &FinLattice, c: &FinLattice) -> Vec<Vec<usize>> {
    fn go(b: &FinLattice, c: &FinLattice, map: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if map.len() == b.len() {
            if brute_is_embedding(b, c, map) {
                out.push(map.clone());
            }
            return;
        }
        for v in 0..c.len() {
            if !map.contains(&v) {
                map.push(v);
                go(b, c, map, out);
                map.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(b, c, &mut Vec::new(), &mut out);
    out
}

/// The relative-subalgebra condition for `map: a -> host`: defined operations
/// are preserved, and undefined ones land outside the image.
pub fn brute_is_relative(a: &PartialLattice, host: &FinLattice, map: &[usize]) -> bool {
    let n = a.len();
    if map.len() != n {
        return false;
    }
    let mut sorted = map.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != n {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            for (def, val) in [
                (a.join(x, y), host.join(map[x], map[y])),
                (a.meet(x, y), host.meet(map[x], map[y])),
            ] {
                match def {
                    Some(z) if map[z] != val => return false,
                    None if map.contains(&val) => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

/// Subsets of `0..n` that are down-closed in `order` and closed under the
/// defined joins of `p`, as sorted id lists.
pub fn brute_ideals(p: &PartialLattice, order: &Poset, nonempty: bool) -> Vec<Vec<usize>> {
    let n = p.len();
    let mut out = Vec::new();
    for mask in 0u32..1 << n {
        if nonempty && mask == 0 {
            continue;
        }
        let has = |x: usize| mask >> x & 1 == 1;
        let down = (0..n).all(|x| !has(x) || (0..n).all(|y| !order.leq(y, x) || has(y)));
        let joins =
            (0..n).all(|x| (0..n).all(|y| !(has(x) && has(y)) || p.join(x, y).is_none_or(has)));
        if down && joins {
            out.push((0..n).filter(|&x| has(x)).collect());
        }
    }
    out
}

/// A random order on `0..n`: each pair `i < j` related with probability `density`,
/// then relabeled at random.
pub fn random_poset(r: &mut ChaCha8Rng, n: usize, density: f64) -> Poset {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(r);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(density) {
                pairs.push((perm[i], perm[j]));
            }
        }
    }
    Poset::from_covers(n, &pairs).expect("pairs follow a linear order")
}

/// Lattices of size `1..=max`, one per isomorphism class.
pub fn catalog(max: usize) -> Vec<FinLattice> {
    enumerate_lattices_upto(max).expect("small catalog")
}

/// A randomly relabeled copy of `l`.
pub fn shuffled(r: &mut ChaCha8Rng, l: &FinLattice) -> FinLattice {
    let mut perm: Vec<usize> = (0..l.len()).collect();
    perm.shuffle(r);
    l.relabel(&perm)
}

/// The sublattice generated by a random nonempty subset, as sorted ids.
pub fn random_sublattice(r: &mut ChaCha8Rng, l: &FinLattice) -> Vec<usize> {
    let k = r.gen_range(1..=l.len().min(3));
    let seeds: Vec<usize> = (0..l.len())
        .collect::<Vec<_>>()
        .choose_multiple(r, k)
        .copied()
        .collect();
    l.generated(seeds)
}

/// Whether every distributive-law instance holds, checked on all triples.
pub fn brute_is_distributive(l: &FinLattice) -> bool {
    let n = l.len();
    (0..n).all(|x| {
        (0..n)
            .all(|y| (0..n).all(|z| l.meet(x, l.join(y, z)) == l.join(l.meet(x, y), l.meet(x, z))))
    })
}

/// `A ≤ B1` as a generated sublattice and a random embedding of `A` into `B2`.
pub struct Triple {
    pub a: FinLattice,
    pub b1: FinLattice,
    pub b2: FinLattice,
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
}

/// Samples a triple from shuffled members of `pool`. With `zero_one`, every
/// lattice carries its bounds as constants (so the pool needs at least two
/// elements per member), `A` contains the bounds of `B1` and `f2` keeps them.
pub fn random_triple(r: &mut ChaCha8Rng, pool: &[FinLattice], zero_one: bool) -> Triple {
    loop {
        let (i, j) = (r.gen_range(0..pool.len()), r.gen_range(0..pool.len()));
        let b1 = shuffled(r, &pool[i]);
        let b2 = shuffled(r, &pool[j]);
        let mut ids = random_sublattice(r, &b1);
        if zero_one {
            ids = b1.generated(ids.into_iter().chain([b1.bottom(), b1.top()]));
        }
        let a = b1.sublattice(&ids).expect("generated");
        let (b1, b2, a) = if zero_one {
            (
                b1.with_bounds_as_consts().expect("bounds"),
                b2.with_bounds_as_consts().expect("bounds"),
                a.with_bounds_as_consts().expect("bounds"),
            )
        } else {
            (b1, b2, a)
        };
        let mut maps = brute_embeddings(&a, &b2);
        if let Some((z, o)) = a.consts() {
            let (z2, o2) = b2.consts().expect("both carry constants");
            maps.retain(|m| m[z] == z2 && m[o] == o2);
        }
        if let Some(f2) = maps.choose(r) {
            let f2 = f2.clone();
            return Triple {
                a,
                b1,
                b2,
                f1: ids,
                f2,
            };
        }
    }
}
