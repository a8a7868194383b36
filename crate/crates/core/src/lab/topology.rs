//! Finite views of the space of algebras on the natural numbers: table
//! prefixes, the prefix metric, basic clopen sets and density witnesses.

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::amalgamation::{amalgamate_with_inclusion, AmalgamOptions};
use crate::error::{Error, Law, Op, Result};
use crate::funayama::fep_complete;
use crate::lattice::poset::close_rows;
use crate::lattice::{partial_ops, Embedding, FinLattice, PartialLattice, Poset};

/// The restriction of a pair of binary operations on ℕ to arguments
/// `0..=bound`. Entries may be unknown; known entries are arbitrary naturals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TablePrefix {
    pub bound: usize,
    pub join: Vec<Option<u64>>,
    pub meet: Vec<Option<u64>>,
}

impl TablePrefix {
    pub fn unknown(bound: usize) -> Self {
        let s = (bound + 1) * (bound + 1);
        TablePrefix {
            bound,
            join: vec![None; s],
            meet: vec![None; s],
        }
    }

    /// A fully known prefix from two functions.
    pub fn from_fn(
        bound: usize,
        f: impl Fn(usize, usize) -> u64,
        g: impl Fn(usize, usize) -> u64,
    ) -> Self {
        let mut p = TablePrefix::unknown(bound);
        for i in 0..=bound {
            for j in 0..=bound {
                p.set(Op::Join, i, j, Some(f(i, j)));
                p.set(Op::Meet, i, j, Some(g(i, j)));
            }
        }
        p
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bound + 1) + j
    }

    pub fn get(&self, op: Op, i: usize, j: usize) -> Option<u64> {
        if i > self.bound || j > self.bound {
            return None;
        }
        let k = self.idx(i, j);
        match op {
            Op::Join => self.join[k],
            Op::Meet => self.meet[k],
        }
    }

    pub fn set(&mut self, op: Op, i: usize, j: usize, v: Option<u64>) {
        let k = self.idx(i, j);
        match op {
            Op::Join => self.join[k] = v,
            Op::Meet => self.meet[k] = v,
        }
    }

    /// The prefix of an algebra containing `l` on its labels; entries with an
    /// argument outside the carrier stay unknown.
    pub fn of_labeled(l: &LabeledLattice, bound: usize) -> Result<Self> {
        let mut p = TablePrefix::unknown(bound);
        for &x in &l.labels {
            if x as usize > bound {
                return Err(Error::CarrierOutOfRange { label: x, bound });
            }
        }
        let n = l.lattice.len();
        for a in 0..n {
            for b in 0..n {
                let (la, lb) = (l.labels[a] as usize, l.labels[b] as usize);
                p.set(Op::Join, la, lb, Some(l.labels[l.lattice.join(a, b)]));
                p.set(Op::Meet, la, lb, Some(l.labels[l.lattice.meet(a, b)]));
            }
        }
        Ok(p)
    }

    /// A lattice law failing inside the known region, if any. Such a prefix
    /// has no extension to a lattice on ℕ, and neither does anything near it.
    pub fn law_violation(&self) -> Option<(Law, Vec<u64>)> {
        let b = self.bound as u64;
        let j = |x: u64, y: u64| {
            if x <= b && y <= b {
                self.get(Op::Join, x as usize, y as usize)
            } else {
                None
            }
        };
        let m = |x: u64, y: u64| {
            if x <= b && y <= b {
                self.get(Op::Meet, x as usize, y as usize)
            } else {
                None
            }
        };
        for x in 0..=b {
            for op in [j(x, x), m(x, x)] {
                if matches!(op, Some(v) if v != x) {
                    return Some((Law::Idempotence, vec![x]));
                }
            }
        }
        for x in 0..=b {
            for y in 0..=b {
                let differ =
                    |p: Option<u64>, q: Option<u64>| matches!((p, q), (Some(p), Some(q)) if p != q);
                if differ(j(x, y), j(y, x)) || differ(m(x, y), m(y, x)) {
                    return Some((Law::Commutativity, vec![x, y]));
                }
                let absorb_j = m(x, y).and_then(|v| j(x, v));
                let absorb_m = j(x, y).and_then(|v| m(x, v));
                if matches!(absorb_j, Some(v) if v != x) || matches!(absorb_m, Some(v) if v != x) {
                    return Some((Law::Absorption, vec![x, y]));
                }
                for z in 0..=b {
                    for f in [&j as &dyn Fn(u64, u64) -> Option<u64>, &m] {
                        let l = f(x, y).and_then(|v| f(v, z));
                        let r = f(y, z).and_then(|v| f(x, v));
                        if differ(l, r) {
                            return Some((Law::Associativity, vec![x, y, z]));
                        }
                    }
                }
            }
        }
        None
    }
}

/// `2^-exp`; when `exact` is false, only the upper bound `≤ 2^-exp` is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dyadic {
    pub exp: u32,
    pub exact: bool,
}

impl Dyadic {
    pub fn as_f64(&self) -> f64 {
        0.5f64.powi(self.exp as i32)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        other.exp.cmp(&self.exp).then(self.exact.cmp(&other.exact))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.exact, self.exp) {
            (true, 0) => f.write_str("1"),
            (true, e) => write!(f, "2^-{e}"),
            (false, e) => write!(f, "<= 2^-{e}"),
        }
    }
}

/// `2^-n` for the least `n` such that the prefixes differ at some `i, j ≤ n`
/// (an unknown entry differs from a known one). Identical prefixes give the
/// marker `≤ 2^-(bound+1)`: they agree as far as they are known.
pub fn metric_d(p: &TablePrefix, q: &TablePrefix) -> Result<Dyadic> {
    if p.bound != q.bound {
        return Err(Error::BoundMismatch(p.bound, q.bound));
    }
    for n in 0..=p.bound {
        // entries with max(i, j) = n
        for i in 0..=n {
            for (a, b) in [(i, n), (n, i)] {
                for op in [Op::Join, Op::Meet] {
                    if p.get(op, a, b) != q.get(op, a, b) {
                        return Ok(Dyadic {
                            exp: n as u32,
                            exact: true,
                        });
                    }
                }
            }
        }
    }
    Ok(Dyadic {
        exp: p.bound as u32 + 1,
        exact: false,
    })
}

/// A finite partial lattice whose elements are natural numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPartial {
    /// `labels[i]` is the natural number carried by element `i`.
    pub labels: Vec<u64>,
    pub table: PartialLattice,
}

impl LabeledPartial {
    /// The partial algebra on `carrier` (plus every label an entry mentions)
    /// with the given entries `op(a, b) = c`. Entries are symmetric; two
    /// different values for one entry are rejected.
    pub fn from_entries(carrier: &[u64], entries: &[(Op, u64, u64, u64)]) -> Result<Self> {
        let mut labels: Vec<u64> = carrier.to_vec();
        labels.extend(entries.iter().flat_map(|&(_, a, b, c)| [a, b, c]));
        labels.sort_unstable();
        labels.dedup();
        let pos = |x: u64| labels.binary_search(&x).expect("collected");
        let mut table = PartialLattice::new(labels.len());
        for &(op, a, b, c) in entries {
            let (a, b, c) = (pos(a), pos(b), pos(c));
            match table.op(op, a, b) {
                Some(old) if old != c => {
                    return Err(Error::NotExtendable(format!(
                        "{op}({}, {}) given as both {} and {}",
                        labels[a], labels[b], labels[old], labels[c]
                    )))
                }
                _ => {
                    table.set_entry(op, a, b, Some(c));
                    table.set_entry(op, b, a, Some(c));
                }
            }
        }
        Ok(LabeledPartial { labels, table })
    }

    pub fn empty() -> Self {
        LabeledPartial {
            labels: Vec::new(),
            table: PartialLattice::empty(),
        }
    }

    /// Every defined entry as `(op, a, b, c)` on labels, with `a ≤ b`.
    pub fn entries(&self) -> Vec<(Op, u64, u64, u64)> {
        let n = self.labels.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a..n {
                for op in [Op::Join, Op::Meet] {
                    if let Some(c) = self.table.op(op, a, b) {
                        out.push((op, self.labels[a], self.labels[b], self.labels[c]));
                    }
                }
            }
        }
        out
    }
}

/// A finite lattice whose elements are natural numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledLattice {
    pub labels: Vec<u64>,
    pub lattice: FinLattice,
}

impl LabeledLattice {
    /// Labels elements by their ids.
    pub fn identity(lattice: FinLattice) -> Self {
        LabeledLattice {
            labels: (0..lattice.len() as u64).collect(),
            lattice,
        }
    }

    pub fn max_label(&self) -> u64 {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    pub fn as_partial(&self) -> LabeledPartial {
        let n = self.labels.len();
        let mut entries = Vec::new();
        for a in 0..n {
            for b in 0..n {
                entries.push((
                    Op::Join,
                    self.labels[a],
                    self.labels[b],
                    self.labels[self.lattice.join(a, b)],
                ));
                entries.push((
                    Op::Meet,
                    self.labels[a],
                    self.labels[b],
                    self.labels[self.lattice.meet(a, b)],
                ));
            }
        }
        LabeledPartial::from_entries(&self.labels, &entries).expect("lattice tables are consistent")
    }

    pub fn prefix(&self) -> TablePrefix {
        TablePrefix::of_labeled(self, self.max_label() as usize).expect("bound covers every label")
    }
}

/// Whether `q` lies in the basic clopen set of `p`: every defined entry of
/// `p` is known in `q` with the same value.
pub fn neighborhood_contains(p: &LabeledPartial, q: &TablePrefix) -> Result<bool> {
    if let Some(&x) = p.labels.iter().find(|&&x| x as usize > q.bound) {
        return Err(Error::CarrierOutOfRange {
            label: x,
            bound: q.bound,
        });
    }
    Ok(p.entries().into_iter().all(|(op, a, b, c)| {
        q.get(op, a as usize, b as usize) == Some(c) && q.get(op, b as usize, a as usize) == Some(c)
    }))
}

/// The least order forced by `t`: `a, b ≤ a∨b`, `a∧b ≤ a, b`, and the
/// defined joins and meets being least upper and greatest lower bounds.
/// `extra` lists further required pairs `i ≤ j`.
fn forced_order(t: &PartialLattice, extra: &[(usize, usize)]) -> Result<Poset> {
    let n = t.len();
    let mut up = vec![FixedBitSet::with_capacity(n); n];
    for (x, row) in up.iter_mut().enumerate() {
        row.insert(x);
    }
    for &(x, y) in extra {
        up[x].insert(y);
    }
    let mut joins = Vec::new();
    let mut meets = Vec::new();
    for a in 0..n {
        for b in a..n {
            if let Some(c) = t.join(a, b) {
                up[a].insert(c);
                up[b].insert(c);
                joins.push((a, b, c));
            }
            if let Some(c) = t.meet(a, b) {
                up[c].insert(a);
                up[c].insert(b);
                meets.push((a, b, c));
            }
        }
    }
    loop {
        close_rows(&mut up);
        let mut changed = false;
        for &(a, b, c) in &joins {
            let mut common = up[a].clone();
            common.intersect_with(&up[b]);
            if !common.is_subset(&up[c]) {
                up[c].union_with(&common);
                changed = true;
            }
        }
        for &(a, b, c) in &meets {
            for row in up.iter_mut() {
                if row.contains(a) && row.contains(b) && !row.contains(c) {
                    row.insert(c);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for x in 0..n {
        for y in up[x].ones() {
            if y != x && up[y].contains(x) {
                return Err(Error::NotExtendable(format!(
                    "elements {x} and {y} are forced equal"
                )));
            }
        }
    }
    Ok(Poset::from_up_rows(up))
}

/// A finite lattice `B` on a subset of ℕ with `{0, ..., k} ⊆ |B|` and
/// `P ≤_w B`, so that `[B] ⊆ [P]_w`.
///
/// The labels of `{0..k}` missing from `P` are added as a chain above `P` in
/// increasing order, the least forced order is completed by ideals, and the
/// result is cut down to the sublattice generated by the carrier. Extra
/// elements receive fresh labels above every carrier label.
pub fn density_witness_lk(p: &LabeledPartial, k: u64) -> Result<LabeledLattice> {
    let mut labels = p.labels.clone();
    let fresh: Vec<u64> = (0..=k)
        .filter(|x| p.labels.binary_search(x).is_err())
        .collect();
    labels.extend(&fresh);
    let (n0, n) = (p.labels.len(), labels.len());
    let mut t = PartialLattice::new(n);
    for a in 0..n0 {
        for b in 0..n0 {
            t.set_join(a, b, p.table.join(a, b));
            t.set_meet(a, b, p.table.meet(a, b));
        }
    }
    let mut extra = Vec::new();
    for x in n0..n {
        extra.extend((0..x).map(|y| (y, x)));
    }
    let order = forced_order(&t, &extra)?;
    let q = partial_ops(&order);
    for (a, b) in (0..n0).flat_map(|a| (0..n0).map(move |b| (a, b))) {
        for op in [Op::Join, Op::Meet] {
            if let Some(c) = t.op(op, a, b) {
                if q.op(op, a, b) != Some(c) {
                    return Err(Error::VerificationFailure(format!(
                        "{op}({a}, {b}) is not a bound of the forced order"
                    )));
                }
            }
        }
    }
    let c = fep_complete(&q)?;
    let ids = c.lattice.generated(c.embed.map.iter().copied());
    let lattice = c.lattice.sublattice(&ids)?;
    let mut out = vec![u64::MAX; ids.len()];
    for (x, &img) in c.embed.map.iter().enumerate() {
        out[ids.binary_search(&img).expect("generated from the images")] = labels[x];
    }
    let fresh = labels.iter().copied().max().map_or(0, |m| m + 1)..;
    for (l, next) in out.iter_mut().filter(|l| **l == u64::MAX).zip(fresh) {
        *l = next;
    }
    Ok(LabeledLattice {
        labels: out,
        lattice,
    })
}

/// The witness that `[C]` meets the extension set for `A ≤ B`.
#[derive(Debug, Clone)]
pub struct UabWitness {
    /// `C` keeps its ids and labels inside `D`.
    pub d: LabeledLattice,
    /// The copy `B'` of `B` inside `D`, agreeing with `C` on `A`.
    pub b_prime: Embedding,
}

/// A finite `D ≥ C` containing a copy of `B` over `A`, so that
/// `[D] ⊆ [C]` and `[D]` lies in the extension set of `(A, B)`.
pub fn density_witness_uab(
    c: &LabeledLattice,
    a: &FinLattice,
    b: &FinLattice,
    e_ab: &Embedding,
    e_ac: &Embedding,
) -> Result<UabWitness> {
    e_ac.check_total(a, &c.lattice)?;
    e_ab.check_total(a, b)?;
    let r = amalgamate_with_inclusion(a, &c.lattice, b, e_ac, e_ab, AmalgamOptions::default())?;
    let mut labels = c.labels.clone();
    let mut next = c.max_label() + 1;
    while labels.len() < r.d.len() {
        labels.push(next);
        next += 1;
    }
    let d = LabeledLattice {
        labels,
        lattice: r.d,
    };
    let over = (0..a.len()).all(|x| r.b2_prime.apply(e_ab.apply(x)) == e_ac.apply(x));
    if !over || !neighborhood_contains(&c.as_partial(), &d.prefix())? {
        return Err(Error::VerificationFailure(
            "amalgam does not contain C and B over A".into(),
        ));
    }
    Ok(UabWitness {
        d,
        b_prime: r.b2_prime,
    })
}
