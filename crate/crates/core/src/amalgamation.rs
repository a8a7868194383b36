//! Amalgamation and joint embedding of finite lattices.
//!
//! [`amalgamate`] is the ideal-lattice construction: glue `B1` and `B2` along
//! `A`, take the transitive closure of the two orders, and complete the
//! resulting partial lattice by ideals. For growing long chains of stages we
//! also provide an insertion amalgam that adds the points of `B2 \ A` to `B1`
//! one at a time; it is tried first by [`amalgamate_with_inclusion`] and falls
//! back to the ideal lattice when `B2` cannot be built up from `A` by
//! one-point sublattice extensions.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funayama::{complete_from, ideal_closure, ideals_with, Ideal};
use crate::lattice::embedding::check_injective;
use crate::lattice::poset::close_rows;
use crate::lattice::{partial_ops, Embedding, EmbeddingMode, FinLattice, PartialLattice, Poset};
use crate::variety::VarietyTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmalgamStrategy {
    /// Full (optionally pruned) ideal lattice of the glued order.
    IdealLattice,
    /// One point at a time; falls back to the ideal lattice when impossible.
    Insertion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmalgamOptions {
    /// Restrict `D` to the sublattice generated by both images.
    pub prune: bool,
    pub strategy: AmalgamStrategy,
}

impl Default for AmalgamOptions {
    fn default() -> Self {
        AmalgamOptions {
            prune: true,
            strategy: AmalgamStrategy::Insertion,
        }
    }
}

impl AmalgamOptions {
    /// The plain ideal-lattice amalgam, unpruned.
    pub fn ideal() -> Self {
        AmalgamOptions {
            prune: false,
            strategy: AmalgamStrategy::IdealLattice,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AmalgamResult {
    pub d: FinLattice,
    pub g1: Embedding,
    pub g2: Embedding,
    pub square_ok: bool,
    /// Size of `D` before pruning (equal to `d.len()` when not pruned).
    pub unpruned_size: usize,
    /// The construction actually used.
    pub strategy: AmalgamStrategy,
}

/// An amalgam in which `B1` sits inside `D` as ids `0..|B1|`.
#[derive(Debug, Clone)]
pub struct InclusionAmalgam {
    pub d: FinLattice,
    pub incl: Embedding,
    pub b2_prime: Embedding,
    pub unpruned_size: usize,
    pub strategy: AmalgamStrategy,
}

#[derive(Debug, Clone)]
pub struct UnionPoset {
    pub poset: Poset,
    /// Position of each `B1` element (always the identity).
    pub from_b1: Vec<usize>,
    /// Position of each `B2` element.
    pub from_b2: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct JointEmbedding {
    pub c: FinLattice,
    pub e1: Embedding,
    pub e2: Embedding,
}

fn check_leg(a: &FinLattice, b: &FinLattice, f: &Embedding, which: &str) -> Result<()> {
    f.check_total(a, b)
        .map_err(|e| Error::NotASublattice(format!("A into {which}: {e}")))
}

/// The transitive closure of `≤_B1 ∪ ≤_B2` with `f1(a)` and `f2(a)` identified.
///
/// Carrier order: `B1`'s ids first, then `B2 \ f2(A)` in id order.
///
/// Only injectivity of the legs is checked here; legs that are not embeddings
/// of a common sublattice surface as [`Error::AntisymmetryFailure`].
pub fn union_poset(
    a: &FinLattice,
    b1: &FinLattice,
    b2: &FinLattice,
    f1: &Embedding,
    f2: &Embedding,
) -> Result<UnionPoset> {
    check_injective(&f1.map, a.len(), b1.len())?;
    check_injective(&f2.map, a.len(), b2.len())?;
    let n1 = b1.len();
    let mut from_b2 = vec![usize::MAX; b2.len()];
    for x in 0..a.len() {
        from_b2[f2.apply(x)] = f1.apply(x);
    }
    let mut next = n1;
    for slot in from_b2.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let n = next;
    let mut up = vec![FixedBitSet::with_capacity(n); n];
    for (x, row) in up.iter_mut().enumerate().take(n1) {
        for y in b1.order().up(x).ones() {
            row.insert(y);
        }
    }
    for x in 0..b2.len() {
        for y in b2.order().up(x).ones() {
            up[from_b2[x]].insert(from_b2[y]);
        }
    }
    close_rows(&mut up);
    for p in 0..n {
        for q in up[p].ones() {
            if q != p && up[q].contains(p) {
                return Err(Error::AntisymmetryFailure(vec![p, q]));
            }
        }
    }
    Ok(UnionPoset {
        poset: Poset::from_up_rows(up),
        from_b1: (0..n1).collect(),
        from_b2,
    })
}

/// The ideal-lattice amalgam of `B1` and `B2` over `A`.
pub fn amalgamate(
    a: &FinLattice,
    b1: &FinLattice,
    b2: &FinLattice,
    f1: &Embedding,
    f2: &Embedding,
) -> Result<AmalgamResult> {
    amalgamate_with(a, b1, b2, f1, f2, AmalgamOptions::ideal())
}

pub fn amalgamate_with(
    a: &FinLattice,
    b1: &FinLattice,
    b2: &FinLattice,
    f1: &Embedding,
    f2: &Embedding,
    opts: AmalgamOptions,
) -> Result<AmalgamResult> {
    amalgamate_in(VarietyTag::Plain, a, b1, b2, f1, f2, opts)
}

/// Shared implementation for both signatures. In the {0,1} signature only
/// nonempty ideals are used and the legs must preserve the constants.
pub(crate) fn amalgamate_in(
    tag: VarietyTag,
    a: &FinLattice,
    b1: &FinLattice,
    b2: &FinLattice,
    f1: &Embedding,
    f2: &Embedding,
    opts: AmalgamOptions,
) -> Result<AmalgamResult> {
    let zero_one = tag == VarietyTag::ZeroOne;
    if opts.strategy == AmalgamStrategy::Insertion {
        if let Some(r) = insertion_amalgam(a, b1, b2, f1, f2)? {
            let size = r.d.len();
            let g1 = Embedding::new(r.incl.map, mode_for(tag));
            let g2 = Embedding::new(r.b2_prime.map, mode_for(tag));
            let out = AmalgamResult {
                d: r.d,
                g1,
                g2,
                square_ok: false,
                unpruned_size: size,
                strategy: AmalgamStrategy::Insertion,
            };
            return verify(a, b1, b2, f1, f2, out);
        }
    }
    check_leg(a, b1, f1, "B1")?;
    check_leg(a, b2, f2, "B2")?;
    let u = union_poset(a, b1, b2, f1, f2)?;
    let p = partial_ops(&u.poset);
    let extra = u.poset.len() - b1.len();
    let ids = if extra <= SPLIT_LIMIT {
        split_ideals(&p, b1, zero_one)
    } else {
        ideals_with(&p, zero_one)?
    };
    let c = complete_from(&p, ids)?;
    let unpruned_size = c.lattice.len();
    let mut g1: Vec<usize> = u.from_b1.iter().map(|&x| c.embed.map[x]).collect();
    let mut g2: Vec<usize> = u.from_b2.iter().map(|&x| c.embed.map[x]).collect();
    let mut d = c.lattice;
    if opts.prune {
        let keep = d.generated(g1.iter().chain(&g2).copied());
        let mut pos = vec![usize::MAX; d.len()];
        for (i, &x) in keep.iter().enumerate() {
            pos[x] = i;
        }
        d = d.sublattice(&keep)?;
        g1.iter_mut().for_each(|x| *x = pos[*x]);
        g2.iter_mut().for_each(|x| *x = pos[*x]);
    }
    if zero_one {
        let (z, o) = b1.consts().ok_or(Error::ConstantsClash)?;
        d = d
            .with_consts(Some((g1[z], g1[o])))
            .map_err(|e| Error::VerificationFailure(e.to_string()))?;
    }
    let out = AmalgamResult {
        d,
        g1: Embedding::new(g1, mode_for(tag)),
        g2: Embedding::new(g2, mode_for(tag)),
        square_ok: false,
        unpruned_size,
        strategy: AmalgamStrategy::IdealLattice,
    };
    verify(a, b1, b2, f1, f2, out)
}

/// Above this many new points the ideals are enumerated generically.
const SPLIT_LIMIT: usize = 12;

/// Ideals of the glued partial lattice. Every ideal meets `B1` in a principal
/// ideal or nothing (joins of `B1` stay suprema in the glued order), so the
/// ideals are exactly the closures of `(x] ∪ U` with `U` a set of new points.
fn split_ideals(p: &PartialLattice, b1: &FinLattice, nonempty: bool) -> Vec<Ideal> {
    let order = p.order().expect("partial_ops declares the order");
    let (n, n1) = (p.len(), b1.len());
    let extra: Vec<usize> = (n1..n).collect();
    let mut seen = HashSet::new();
    for x in (0..n1).map(Some).chain([None]) {
        for mask in 0u64..1 << extra.len() {
            let mut seed = FixedBitSet::with_capacity(n);
            if let Some(x) = x {
                seed.insert(x);
            }
            for (i, &t) in extra.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    seed.insert(t);
                }
            }
            let c = ideal_closure(p, order, &seed);
            if !(nonempty && c.is_clear()) {
                seen.insert(c);
            }
        }
    }
    let mut out: Vec<Ideal> = seen.into_iter().map(|carrier| Ideal { carrier }).collect();
    out.sort_by_cached_key(|i| (i.len(), i.elements()));
    out
}

fn mode_for(tag: VarietyTag) -> EmbeddingMode {
    match tag {
        VarietyTag::Plain => EmbeddingMode::Total,
        VarietyTag::ZeroOne => EmbeddingMode::Total01,
    }
}

fn verify(
    a: &FinLattice,
    b1: &FinLattice,
    b2: &FinLattice,
    f1: &Embedding,
    f2: &Embedding,
    mut out: AmalgamResult,
) -> Result<AmalgamResult> {
    out.g1
        .check_total(b1, &out.d)
        .map_err(|e| Error::VerificationFailure(format!("g1: {e}")))?;
    out.g2
        .check_total(b2, &out.d)
        .map_err(|e| Error::VerificationFailure(format!("g2: {e}")))?;
    let square = (0..a.len()).all(|x| out.g1.apply(f1.apply(x)) == out.g2.apply(f2.apply(x)));
    if !square {
        return Err(Error::VerificationFailure("square does not commute".into()));
    }
    out.square_ok = true;
    Ok(out)
}

/// Amalgam relabeled so that `B1` keeps its ids; new elements follow in a
/// deterministic order.
pub fn amalgamate_with_inclusion(
    a: &FinLattice,
    b1: &FinLattice,
    b2: &FinLattice,
    f1: &Embedding,
    f2: &Embedding,
    opts: AmalgamOptions,
) -> Result<InclusionAmalgam> {
    inclusion_in(VarietyTag::Plain, a, b1, b2, f1, f2, opts)
}

pub(crate) fn inclusion_in(
    tag: VarietyTag,
    a: &FinLattice,
    b1: &FinLattice,
    b2: &FinLattice,
    f1: &Embedding,
    f2: &Embedding,
    opts: AmalgamOptions,
) -> Result<InclusionAmalgam> {
    let r = amalgamate_in(tag, a, b1, b2, f1, f2, opts)?;
    let n = r.d.len();
    let mut perm = vec![usize::MAX; n];
    for (x, &y) in r.g1.map.iter().enumerate() {
        perm[y] = x;
    }
    let mut next = b1.len();
    for slot in perm.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let d = r.d.relabel(&perm);
    let incl = Embedding::identity(b1.len(), r.g1.mode);
    let b2_prime = Embedding::new(r.g2.map.iter().map(|&y| perm[y]).collect(), r.g2.mode);
    Ok(InclusionAmalgam {
        d,
        incl,
        b2_prime,
        unpruned_size: r.unpruned_size,
        strategy: r.strategy,
    })
}

/// Joint embedding over the shared bounds: a 2-element chain when both
/// lattices have at least two elements, a single point otherwise. In the
/// {0,1} signature this is the initial object.
pub fn joint_embed(b1: &FinLattice, b2: &FinLattice) -> Result<JointEmbedding> {
    joint_in(VarietyTag::Plain, b1, b2, AmalgamOptions::default())
}

pub(crate) fn joint_in(
    tag: VarietyTag,
    b1: &FinLattice,
    b2: &FinLattice,
    opts: AmalgamOptions,
) -> Result<JointEmbedding> {
    let (a, f1, f2) = if b1.len() == 1 || b2.len() == 1 {
        let a = FinLattice::chain(1);
        (a, vec![b1.bottom()], vec![b2.bottom()])
    } else {
        let mut a = FinLattice::chain(2);
        if tag == VarietyTag::ZeroOne {
            a = a.with_consts(Some((0, 1)))?;
        }
        (a, vec![b1.bottom(), b1.top()], vec![b2.bottom(), b2.top()])
    };
    let mode = mode_for(tag);
    let r = inclusion_in(
        tag,
        &a,
        b1,
        b2,
        &Embedding::new(f1, mode),
        &Embedding::new(f2, mode),
        opts,
    )?;
    Ok(JointEmbedding {
        c: r.d,
        e1: r.incl,
        e2: r.b2_prime,
    })
}

/// Order in which the points of `B \ base` can be added so that every
/// intermediate set is a sublattice. `None` if no such order exists.
pub fn insertion_order(b: &FinLattice, base: &[usize]) -> Option<Vec<usize>> {
    let n = b.len();
    let mut set = FixedBitSet::with_capacity(n);
    set.extend(base.iter().copied());
    if !b.is_closed(&set) {
        return None;
    }
    let mut order = Vec::new();
    let mut dead = HashSet::new();
    extend_order(b, &mut set, &mut order, &mut dead).then_some(order)
}

fn extend_order(
    b: &FinLattice,
    set: &mut FixedBitSet,
    order: &mut Vec<usize>,
    dead: &mut HashSet<FixedBitSet>,
) -> bool {
    if set.count_ones(..) == b.len() {
        return true;
    }
    if dead.contains(set) {
        return false;
    }
    for x in 0..b.len() {
        if set.contains(x) {
            continue;
        }
        let closed = set.ones().all(|s| {
            let (j, m) = (b.join(x, s), b.meet(x, s));
            (j == x || set.contains(j)) && (m == x || set.contains(m))
        });
        if closed {
            set.insert(x);
            order.push(x);
            if extend_order(b, set, order, dead) {
                return true;
            }
            order.pop();
            set.set(x, false);
        }
    }
    dead.insert(set.clone());
    false
}

/// Adds the points of `B2 \ f2(A)` to `B1` one at a time. Returns `None` when
/// no one-point insertion order exists.
fn insertion_amalgam(
    a: &FinLattice,
    b1: &FinLattice,
    b2: &FinLattice,
    f1: &Embedding,
    f2: &Embedding,
) -> Result<Option<InclusionAmalgam>> {
    check_leg(a, b1, f1, "B1")?;
    check_leg(a, b2, f2, "B2")?;
    let Some(order) = insertion_order(b2, &f2.map) else {
        return Ok(None);
    };
    let mut m = b1.len();
    let mut join = b1.join_table().to_vec();
    let mut meet = b1.meet_table().to_vec();
    let mut g = vec![usize::MAX; b2.len()];
    let mut placed = FixedBitSet::with_capacity(b2.len());
    for x in 0..a.len() {
        g[f2.apply(x)] = f1.apply(x);
        placed.insert(f2.apply(x));
    }
    for &x in &order {
        let below = b2.join_all(placed.ones().filter(|&s| b2.lt(s, x)));
        let above = b2.meet_all(placed.ones().filter(|&s| b2.lt(x, s)));
        let (j, mt) = insert_point(&join, &meet, m, below.map(|s| g[s]), above.map(|s| g[s]));
        join = j;
        meet = mt;
        g[x] = m;
        m += 1;
        placed.insert(x);
    }
    let d = FinLattice::from_tables_trusted(m, join, meet, b1.consts());
    Ok(Some(InclusionAmalgam {
        d,
        incl: Embedding::identity(b1.len(), EmbeddingMode::Total),
        b2_prime: Embedding::new(g, EmbeddingMode::Total),
        unpruned_size: m,
        strategy: AmalgamStrategy::Insertion,
    }))
}

/// Tables of `D ∪ {x}` where `x` sits strictly between `lo` and `hi`; a
/// missing `lo` makes `x` the new bottom, a missing `hi` the new top.
fn insert_point(
    join: &[u16],
    meet: &[u16],
    m: usize,
    lo: Option<usize>,
    hi: Option<usize>,
) -> (Vec<u16>, Vec<u16>) {
    let n = m + 1;
    let mut nj = vec![0u16; n * n];
    let mut nm = vec![0u16; n * n];
    for r in 0..m {
        nj[r * n..r * n + m].copy_from_slice(&join[r * m..r * m + m]);
        nm[r * n..r * n + m].copy_from_slice(&meet[r * m..r * m + m]);
    }
    let x = m as u16;
    let leq = |a: usize, b: usize| join[a * m + b] as usize == b;
    for y in 0..m {
        let (jv, mv) = match (lo, hi) {
            (None, _) => (y as u16, x),
            (_, None) => (x, y as u16),
            (Some(l), Some(u)) => {
                let jv = if leq(y, l) { x } else { join[u * m + y] };
                let mv = if leq(u, y) { x } else { meet[l * m + y] };
                (jv, mv)
            }
        };
        nj[m * n + y] = jv;
        nj[y * n + m] = jv;
        nm[m * n + y] = mv;
        nm[y * n + m] = mv;
    }
    nj[m * n + m] = x;
    nm[m * n + m] = x;
    (nj, nm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{canonical_form, validate_lattice};

    fn emb(v: &[usize]) -> Embedding {
        Embedding::new(v.to_vec(), EmbeddingMode::Total)
    }

    #[test]
    fn union_of_identical_is_a() {
        let a = FinLattice::n5();
        let id = emb(&[0, 1, 2, 3, 4]);
        let u = union_poset(&a, &a, &a, &id, &id).unwrap();
        assert_eq!(&u.poset, a.order());
    }

    #[test]
    fn union_of_chains_over_bottom() {
        let a = FinLattice::chain(1);
        let b = FinLattice::chain(2);
        let u = union_poset(&a, &b, &b, &emb(&[0]), &emb(&[0])).unwrap();
        assert_eq!(u.poset.len(), 3);
        assert!(!u.poset.comparable(1, 2));
    }

    #[test]
    fn union_of_three_chains_over_bounds() {
        let a = FinLattice::chain(2);
        let b = FinLattice::chain(3);
        let u = union_poset(&a, &b, &b, &emb(&[0, 2]), &emb(&[0, 2])).unwrap();
        assert_eq!(u.poset.len(), 4);
        assert_eq!(u.from_b2, vec![0, 3, 2]);
        assert!(!u.poset.comparable(1, 3));
        assert!(u.poset.leq(0, 3) && u.poset.leq(3, 2));
    }

    #[test]
    fn antisymmetry_failure_detected() {
        // Not embeddings of a common sublattice: order reversed on one side.
        let a = FinLattice::chain(1);
        let b = FinLattice::chain(3);
        let c = FinLattice::chain(3);
        // glue the middle of b to the middle of c, then hand-build an inconsistent union
        let r = union_poset(&a, &b, &c, &emb(&[1]), &emb(&[1]));
        assert!(r.is_ok());
        let bad = union_poset(&FinLattice::chain(2), &b, &c, &emb(&[0, 2]), &emb(&[2, 0]));
        assert!(matches!(bad, Err(Error::AntisymmetryFailure(_))));
    }

    #[test]
    fn trivial_amalgam() {
        let a = FinLattice::chain(1);
        let r = amalgamate(&a, &a, &a, &emb(&[0]), &emb(&[0])).unwrap();
        assert_eq!(r.d.len(), 2);
        assert_eq!(r.g1.map, vec![1]);
        assert!(r.square_ok);
    }

    #[test]
    fn v_poset_amalgam_has_five_elements() {
        let a = FinLattice::chain(1);
        let b = FinLattice::chain(2);
        let r = amalgamate(&a, &b, &b, &emb(&[0]), &emb(&[0])).unwrap();
        assert_eq!(r.d.len(), 5);
        assert!(r.square_ok);
    }

    #[test]
    fn inclusion_keeps_b1_ids() {
        let a = FinLattice::chain(2);
        let b = FinLattice::chain(3);
        for strategy in [AmalgamStrategy::IdealLattice, AmalgamStrategy::Insertion] {
            let opts = AmalgamOptions {
                prune: true,
                strategy,
            };
            let r =
                amalgamate_with_inclusion(&a, &b, &b, &emb(&[0, 2]), &emb(&[0, 2]), opts).unwrap();
            assert_eq!(r.d.len(), 4, "{strategy:?}");
            for x in 0..3 {
                for y in 0..3 {
                    assert_eq!(r.d.join(x, y), b.join(x, y));
                }
            }
            assert_eq!(r.b2_prime.map[0], 0);
            assert_eq!(r.b2_prime.map[2], 2);
            assert_eq!(r.b2_prime.map[1], 3);
        }
    }

    #[test]
    fn a_equal_b2_returns_b1() {
        let b1 = FinLattice::n5();
        let a = FinLattice::chain(2);
        let r = amalgamate_with_inclusion(
            &a,
            &b1,
            &a,
            &emb(&[0, 4]),
            &emb(&[0, 1]),
            AmalgamOptions::default(),
        )
        .unwrap();
        assert_eq!(r.d, b1);
        assert_eq!(r.b2_prime.map, vec![0, 4]);
    }

    #[test]
    fn insertion_matches_validation() {
        let two = FinLattice::chain(2);
        let n5 = FinLattice::n5();
        let m3 = FinLattice::m3();
        let r = amalgamate_with_inclusion(
            &two,
            &n5,
            &m3,
            &emb(&[0, 4]),
            &emb(&[0, 4]),
            AmalgamOptions::default(),
        )
        .unwrap();
        assert_eq!(r.strategy, AmalgamStrategy::Insertion);
        assert_eq!(r.d.len(), 8);
        assert!(validate_lattice(&r.d.to_partial()).is_ok());
    }

    #[test]
    fn joint_embedding_of_two_chains() {
        let b = FinLattice::chain(2);
        let j = joint_embed(&b, &b).unwrap();
        assert!(j.e1.check_total(&b, &j.c).is_ok());
        assert!(j.e2.check_total(&b, &j.c).is_ok());
    }

    #[test]
    fn joint_with_point_is_other() {
        let p = FinLattice::chain(1);
        let n5 = FinLattice::n5();
        let j = joint_embed(&p, &n5).unwrap();
        assert_eq!(canonical_form(&j.c).code, canonical_form(&n5).code);
    }

    #[test]
    fn symmetric_up_to_isomorphism() {
        let a = FinLattice::chain(2);
        let b1 = FinLattice::chain(3);
        let b2 = FinLattice::boolean(2);
        let r1 = amalgamate(&a, &b1, &b2, &emb(&[0, 2]), &emb(&[0, 3])).unwrap();
        let r2 = amalgamate(&a, &b2, &b1, &emb(&[0, 3]), &emb(&[0, 2])).unwrap();
        assert_eq!(canonical_form(&r1.d).code, canonical_form(&r2.d).code);
    }
}
