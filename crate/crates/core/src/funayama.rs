//! Ideals of partial lattices and the ideal-lattice completion.
//!
//! An ideal is a downset of the declared order that is closed under every
//! defined join. Ideals are enumerated with Ganter's NextClosure over the
//! closure operator "smallest ideal containing".

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Op, Result};
use crate::lattice::{
    subalgebra_mode, validate_lattice, Embedding, EmbeddingMode, FinLattice, PartialLattice, Poset,
    SubalgebraMode,
};

/// Products larger than this stay lazy (coordinate-wise queries only).
pub const DEFAULT_PRODUCT_BOUND: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    pub carrier: FixedBitSet,
}

impl Ideal {
    pub fn contains(&self, x: usize) -> bool {
        self.carrier.contains(x)
    }

    pub fn len(&self) -> usize {
        self.carrier.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_clear()
    }

    pub fn elements(&self) -> Vec<usize> {
        self.carrier.ones().collect()
    }
}

#[derive(Debug, Clone)]
pub struct CompletionResult {
    /// The ideal lattice; element `i` is `ideals[i]`.
    pub lattice: FinLattice,
    pub ideals: Vec<Ideal>,
    /// `x ↦ (x]`.
    pub embed: Embedding,
    /// Set when missing constants were adjoined before completing.
    pub adjoined_consts: bool,
}

/// The smallest ideal containing `seed`.
pub fn ideal_closure(p: &PartialLattice, order: &Poset, seed: &FixedBitSet) -> FixedBitSet {
    let n = p.len();
    let mut set = FixedBitSet::with_capacity(n);
    let mut members: Vec<usize> = Vec::new();
    let mut work: Vec<usize> = Vec::new();
    let push_down = |x: usize, set: &mut FixedBitSet, work: &mut Vec<usize>| {
        for d in order.down(x).ones() {
            if !set.put(d) {
                work.push(d);
            }
        }
    };
    for x in seed.ones() {
        push_down(x, &mut set, &mut work);
    }
    while let Some(y) = work.pop() {
        members.push(y);
        for &m in &members {
            if let Some(j) = p.join(y, m) {
                if !set.contains(j) {
                    push_down(j, &mut set, &mut work);
                }
            }
        }
    }
    set
}

/// All ideals of `p` (including the empty one), sorted by size then elements.
pub fn ideals(p: &PartialLattice) -> Result<Vec<Ideal>> {
    ideals_with(p, false)
}

pub(crate) fn ideals_with(p: &PartialLattice, nonempty: bool) -> Result<Vec<Ideal>> {
    let order = p.order().ok_or(Error::NoOrderDeclared)?;
    let n = p.len();
    let close = |s: &FixedBitSet| ideal_closure(p, order, s);
    let mut out = Vec::new();
    let mut cur = close(&FixedBitSet::with_capacity(n));
    loop {
        if !(nonempty && cur.is_clear()) {
            out.push(Ideal {
                carrier: cur.clone(),
            });
        }
        match next_closure(&cur, n, &close) {
            Some(next) => cur = next,
            None => break,
        }
    }
    out.sort_by_cached_key(|i| (i.len(), i.elements()));
    Ok(out)
}

/// The lectically next closed set after `a`, or `None` after the last.
fn next_closure(
    a: &FixedBitSet,
    n: usize,
    close: &dyn Fn(&FixedBitSet) -> FixedBitSet,
) -> Option<FixedBitSet> {
    for i in (0..n).rev() {
        if a.contains(i) {
            continue;
        }
        let mut seed = FixedBitSet::with_capacity(n);
        seed.extend(a.ones().take_while(|&x| x < i));
        seed.insert(i);
        let b = close(&seed);
        if b.ones()
            .take_while(|&x| x < i)
            .eq(a.ones().take_while(|&x| x < i))
        {
            return Some(b);
        }
    }
    None
}

/// Ideal-lattice completion in the plain signature (the empty ideal included).
pub fn fep_complete(p: &PartialLattice) -> Result<CompletionResult> {
    complete_over(p, false)
}

/// Builds the ideal lattice over all (or only nonempty) ideals and the
/// principal-ideal map, and certifies the map's mode.
pub(crate) fn complete_over(p: &PartialLattice, nonempty: bool) -> Result<CompletionResult> {
    let ids = ideals_with(p, nonempty)?;
    complete_from(p, ids)
}

/// Completion over a precomputed, canonically sorted list of ideals.
pub(crate) fn complete_from(p: &PartialLattice, ids: Vec<Ideal>) -> Result<CompletionResult> {
    let order = p.order().ok_or(Error::NoOrderDeclared)?;
    let m = ids.len();
    let index: HashMap<&FixedBitSet, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (&id.carrier, i))
        .collect();
    let mut join = vec![0u16; m * m];
    let mut meet = vec![0u16; m * m];
    for i in 0..m {
        for j in i..m {
            let mut u = ids[i].carrier.clone();
            u.union_with(&ids[j].carrier);
            let jn = index[&ideal_closure(p, order, &u)];
            let mut v = ids[i].carrier.clone();
            v.intersect_with(&ids[j].carrier);
            let mt = *index.get(&v).ok_or_else(|| {
                Error::VerificationFailure("intersection of ideals is not an ideal".into())
            })?;
            for (a, b) in [(i, j), (j, i)] {
                join[a * m + b] = jn as u16;
                meet[a * m + b] = mt as u16;
            }
        }
    }
    let lattice = FinLattice::from_tables_trusted(m, join, meet, None);
    let map: Vec<usize> = (0..p.len())
        .map(|x| {
            let mut s = FixedBitSet::with_capacity(p.len());
            s.insert(x);
            index[&ideal_closure(p, order, &s)]
        })
        .collect();
    let mode = match subalgebra_mode(p, &lattice.to_partial(), &map)? {
        SubalgebraMode::Relative => EmbeddingMode::Relative,
        SubalgebraMode::WeakOnly => EmbeddingMode::Weak,
        SubalgebraMode::NotWeak => {
            return Err(Error::VerificationFailure(
                "principal-ideal map does not preserve the defined operations".into(),
            ))
        }
    };
    Ok(CompletionResult {
        lattice,
        ideals: ids,
        embed: Embedding::new(map, mode),
        adjoined_consts: false,
    })
}

/// The one-point extensions `A_i` used to upgrade weak to relative embeddings.
#[derive(Debug, Clone)]
pub struct OnePointExtensions {
    /// The extra elements `I`, as parent ids in increasing order.
    pub extra: Vec<usize>,
    /// `extensions[k]` has universe `|A| ∪ {extra[k]}`, the new point getting
    /// id `|A|`; it defines exactly the operations of `A` plus those landing on
    /// the new point.
    pub extensions: Vec<PartialLattice>,
}

/// Computes `I = {a ∧ a', a ∨ a'} \ |A|` inside `parent` together with the
/// partial algebras `A_i`. `A` must be a relative subalgebra of `parent`
/// along `into_parent`.
pub fn one_point_extensions(
    a: &PartialLattice,
    parent: &FinLattice,
    into_parent: &[usize],
) -> Result<OnePointExtensions> {
    if subalgebra_mode(a, &parent.to_partial(), into_parent)? != SubalgebraMode::Relative {
        return Err(Error::NotRelative);
    }
    let n = a.len();
    let mut in_a = vec![usize::MAX; parent.len()];
    for (x, &y) in into_parent.iter().enumerate() {
        in_a[y] = x;
    }
    let mut extra = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for v in [
                parent.join(into_parent[x], into_parent[y]),
                parent.meet(into_parent[x], into_parent[y]),
            ] {
                if in_a[v] == usize::MAX {
                    extra.push(v);
                }
            }
        }
    }
    extra.sort_unstable();
    extra.dedup();
    let mut extensions = Vec::with_capacity(extra.len());
    for &i in &extra {
        let mut ext = PartialLattice::new(n + 1);
        for x in 0..n {
            for y in 0..n {
                let (px, py) = (into_parent[x], into_parent[y]);
                let j = a.join(x, y).or((parent.join(px, py) == i).then_some(n));
                let m = a.meet(x, y).or((parent.meet(px, py) == i).then_some(n));
                ext.set_entry(Op::Join, x, y, j);
                ext.set_entry(Op::Meet, x, y, m);
            }
        }
        ext.set_join(n, n, Some(n));
        ext.set_meet(n, n, Some(n));
        let carrier: Vec<usize> = into_parent.iter().copied().chain([i]).collect();
        let ext = ext.with_order(parent.order().restrict(&carrier))?;
        extensions.push(ext);
    }
    Ok(OnePointExtensions { extra, extensions })
}

/// A finite lattice `E_i` together with a weak embedding of `A_i` into it.
#[derive(Debug, Clone)]
pub struct Witness {
    pub lattice: FinLattice,
    pub embed: Vec<usize>,
}

/// Witnesses for every extra element, obtained by completing each `A_i`.
pub fn completion_witnesses(ext: &OnePointExtensions) -> Result<BTreeMap<usize, Witness>> {
    let mut out = BTreeMap::new();
    for (&i, ai) in ext.extra.iter().zip(&ext.extensions) {
        let c = fep_complete(ai)?;
        out.insert(
            i,
            Witness {
                lattice: c.lattice,
                embed: c.embed.map,
            },
        );
    }
    Ok(out)
}

/// The product `∏ E_i` with the diagonal-style map `δ(a) = (ι_i(a))_i`.
#[derive(Debug, Clone)]
pub struct RelativeProduct {
    pub extra: Vec<usize>,
    pub factors: Vec<FinLattice>,
    /// `delta[a]` is the coordinate tuple of `δ(a)`.
    pub delta: Vec<Vec<usize>>,
    /// The product as an explicit lattice with `δ` as ids, when small enough.
    pub materialized: Option<(FinLattice, Embedding)>,
    pub mode: SubalgebraMode,
}

impl RelativeProduct {
    /// Number of elements of the product, saturating.
    pub fn size(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, f| acc.saturating_mul(f.len() as u128))
    }

    pub fn join(&self, x: &[usize], y: &[usize]) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .map(|(k, f)| f.join(x[k], y[k]))
            .collect()
    }

    pub fn meet(&self, x: &[usize], y: &[usize]) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .map(|(k, f)| f.meet(x[k], y[k]))
            .collect()
    }

    /// Mixed-radix id of a tuple, matching [`FinLattice::product`] folded left.
    pub fn tuple_id(&self, t: &[usize]) -> usize {
        self.factors
            .iter()
            .zip(t)
            .fold(0, |acc, (f, &x)| acc * f.len() + x)
    }
}

/// Upgrades `A ≤_r parent` to a relative embedding into a finite product,
/// following the (w,w) ⇒ (r,r) argument. Products above `bound` elements are
/// left lazy.
pub fn weak_to_relative_product(
    a: &PartialLattice,
    parent: &FinLattice,
    into_parent: &[usize],
    witnesses: &BTreeMap<usize, Witness>,
    bound: usize,
) -> Result<RelativeProduct> {
    let ext = one_point_extensions(a, parent, into_parent)?;
    let n = a.len();
    if ext.extra.is_empty() {
        // A is total: it is its own witness.
        let l = validate_lattice(a)?;
        let id = Embedding::identity(n, EmbeddingMode::Relative);
        return Ok(RelativeProduct {
            extra: Vec::new(),
            factors: vec![l.clone()],
            delta: (0..n).map(|x| vec![x]).collect(),
            materialized: Some((l, id)),
            mode: SubalgebraMode::Relative,
        });
    }
    let mut factors = Vec::new();
    let mut iotas = Vec::new();
    for (&i, ai) in ext.extra.iter().zip(&ext.extensions) {
        let w = witnesses.get(&i).ok_or(Error::WitnessMissing(i))?;
        if subalgebra_mode(ai, &w.lattice.to_partial(), &w.embed)? == SubalgebraMode::NotWeak {
            return Err(Error::VerificationFailure(format!(
                "witness for {i} is not a weak extension"
            )));
        }
        factors.push(w.lattice.clone());
        iotas.push(&w.embed);
    }
    let delta: Vec<Vec<usize>> = (0..n)
        .map(|x| iotas.iter().map(|m| m[x]).collect())
        .collect();
    let mut prod = RelativeProduct {
        extra: ext.extra,
        factors,
        delta,
        materialized: None,
        mode: SubalgebraMode::NotWeak,
    };
    prod.mode = classify_product(a, &prod);
    if prod.size() <= bound as u128 {
        let mut it = prod.factors.iter();
        let first = it.next().expect("I is nonempty").clone();
        let lat = it.fold(first, |acc, f| acc.product(f));
        let mode = match prod.mode {
            SubalgebraMode::Relative => EmbeddingMode::Relative,
            _ => EmbeddingMode::Weak,
        };
        let map = prod.delta.iter().map(|t| prod.tuple_id(t)).collect();
        prod.materialized = Some((lat, Embedding::new(map, mode)));
    }
    if prod.mode != SubalgebraMode::Relative {
        return Err(Error::VerificationFailure(
            "product embedding is not relative".into(),
        ));
    }
    Ok(prod)
}

/// Mode of `δ` computed with coordinate-wise queries only.
fn classify_product(a: &PartialLattice, prod: &RelativeProduct) -> SubalgebraMode {
    let image: HashMap<&[usize], usize> = prod
        .delta
        .iter()
        .enumerate()
        .map(|(x, t)| (t.as_slice(), x))
        .collect();
    let mut relative = true;
    for x in 0..a.len() {
        for y in 0..a.len() {
            for op in [Op::Join, Op::Meet] {
                let t = match op {
                    Op::Join => prod.join(&prod.delta[x], &prod.delta[y]),
                    Op::Meet => prod.meet(&prod.delta[x], &prod.delta[y]),
                };
                match a.op(op, x, y) {
                    Some(c) if t != prod.delta[c] => return SubalgebraMode::NotWeak,
                    Some(_) => {}
                    None => relative &= !image.contains_key(t.as_slice()),
                }
            }
        }
    }
    if relative {
        SubalgebraMode::Relative
    } else {
        SubalgebraMode::WeakOnly
    }
}
