use fixedbitset::FixedBitSet;

use super::poset::Poset;
use crate::error::{Error, Law, Op, Result};

/// Sentinel for an undefined partial-table entry. Never a valid id.
pub(crate) const UNDEF: u16 = u16::MAX;

/// Largest element count the u16 tables can hold.
pub const MAX_ELEMENTS: usize = (u16::MAX - 1) as usize;

/// A finite lattice given by its join and meet tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinLattice {
    n: usize,
    join: Vec<u16>,
    meet: Vec<u16>,
    consts: Option<(usize, usize)>,
    order: Poset,
}

/// A finite partial algebra with partial join/meet tables and an optional
/// declared order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialLattice {
    n: usize,
    join: Vec<u16>,
    meet: Vec<u16>,
    consts: Option<(usize, usize)>,
    order: Option<Poset>,
}

impl FinLattice {
    /// Validates explicit tables (row-major, `n * n` entries each).
    pub fn from_tables(
        n: usize,
        join: &[usize],
        meet: &[usize],
        consts: Option<(usize, usize)>,
    ) -> Result<Self> {
        for t in [join, meet] {
            if t.len() != n * n {
                return Err(Error::TableShape {
                    expected: n * n,
                    got: t.len(),
                });
            }
        }
        let mut p = PartialLattice::new(n);
        for i in 0..n * n {
            p.join[i] = to_u16(join[i], n)?;
            p.meet[i] = to_u16(meet[i], n)?;
        }
        p.consts = consts;
        validate_lattice(&p)
    }

    /// The lattice whose order is `p`, if `p` is a lattice.
    pub fn from_poset(p: &Poset) -> Result<Self> {
        validate_lattice(&partial_ops(p))
    }

    /// Builds a lattice from tables already known to satisfy the laws.
    pub(crate) fn from_tables_trusted(
        n: usize,
        join: Vec<u16>,
        meet: Vec<u16>,
        consts: Option<(usize, usize)>,
    ) -> Self {
        let order = order_from_join(n, &join);
        let l = FinLattice {
            n,
            join,
            meet,
            consts,
            order,
        };
        debug_assert!(n > 60 || validate_lattice(&l.to_partial()).is_ok());
        l
    }

    pub fn chain(n: usize) -> Self {
        Self::from_poset(&Poset::chain(n)).expect("chains are lattices")
    }

    /// Bottom, `m` pairwise incomparable atoms, top. `m = 3` gives M3.
    pub fn antichain_with_bounds(m: usize) -> Self {
        let top = m + 1;
        let mut pairs = Vec::new();
        for i in 1..=m {
            pairs.push((0, i));
            pairs.push((i, top));
        }
        if m == 0 {
            pairs.push((0, 1));
        }
        Self::from_poset(&Poset::from_covers(m + 2, &pairs).expect("acyclic")).expect("lattice")
    }

    /// The pentagon: 0 < a < c < 1 and 0 < b < 1, with ids 0, a=1, b=2, c=3, 1=4.
    pub fn n5() -> Self {
        let p = Poset::from_covers(5, &[(0, 1), (1, 3), (3, 4), (0, 2), (2, 4)]).expect("acyclic");
        Self::from_poset(&p).expect("N5 is a lattice")
    }

    pub fn m3() -> Self {
        Self::antichain_with_bounds(3)
    }

    /// The Boolean lattice of subsets of a `k`-element set; ids are bitmasks.
    pub fn boolean(k: usize) -> Self {
        let n = 1usize << k;
        let join: Vec<usize> = (0..n * n).map(|i| (i / n) | (i % n)).collect();
        let meet: Vec<usize> = (0..n * n).map(|i| (i / n) & (i % n)).collect();
        Self::from_tables(n, &join, &meet, None).expect("Boolean lattice")
    }

    /// Direct product with pairs `(x, y)` numbered `x * other.len() + y`.
    pub fn product(&self, other: &FinLattice) -> Self {
        let (n1, n2) = (self.n, other.n);
        let n = n1 * n2;
        let mut join = vec![0u16; n * n];
        let mut meet = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let (a1, a2, b1, b2) = (a / n2, a % n2, b / n2, b % n2);
                join[a * n + b] = (self.join(a1, b1) * n2 + other.join(a2, b2)) as u16;
                meet[a * n + b] = (self.meet(a1, b1) * n2 + other.meet(a2, b2)) as u16;
            }
        }
        Self::from_tables_trusted(n, join, meet, None)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b] as usize
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b] as usize
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.order.leq(a, b)
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.order.leq(a, b)
    }

    pub fn order(&self) -> &Poset {
        &self.order
    }

    pub fn bottom(&self) -> usize {
        (0..self.n).fold(0, |acc, x| self.meet(acc, x))
    }

    pub fn top(&self) -> usize {
        (0..self.n).fold(0, |acc, x| self.join(acc, x))
    }

    pub fn consts(&self) -> Option<(usize, usize)> {
        self.consts
    }

    /// Attaches `(zero, one)`; they must be the bounds and distinct.
    pub fn with_consts(mut self, consts: Option<(usize, usize)>) -> Result<Self> {
        if let Some(c) = consts {
            check_consts(self.n, c, |a, b| self.leq(a, b))?;
        }
        self.consts = consts;
        Ok(self)
    }

    /// Attaches the bounds as constants.
    pub fn with_bounds_as_consts(self) -> Result<Self> {
        let c = (self.bottom(), self.top());
        self.with_consts(Some(c))
    }

    pub fn join_table(&self) -> &[u16] {
        &self.join
    }

    pub fn meet_table(&self) -> &[u16] {
        &self.meet
    }

    /// Join of a nonempty iterator of elements.
    pub fn join_all(&self, it: impl IntoIterator<Item = usize>) -> Option<usize> {
        it.into_iter().reduce(|a, b| self.join(a, b))
    }

    pub fn meet_all(&self, it: impl IntoIterator<Item = usize>) -> Option<usize> {
        it.into_iter().reduce(|a, b| self.meet(a, b))
    }

    /// Whether `set` is closed under both operations.
    pub fn is_closed(&self, set: &FixedBitSet) -> bool {
        let ids: Vec<usize> = set.ones().collect();
        ids.iter().all(|&a| {
            ids.iter()
                .all(|&b| set.contains(self.join(a, b)) && set.contains(self.meet(a, b)))
        })
    }

    /// The sublattice generated by `seeds`, as sorted ids.
    pub fn generated(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut set = FixedBitSet::with_capacity(self.n);
        let mut members: Vec<usize> = Vec::new();
        let mut work: Vec<usize> = Vec::new();
        for s in seeds {
            if !set.put(s) {
                work.push(s);
            }
        }
        while let Some(x) = work.pop() {
            members.push(x);
            for &y in &members {
                for z in [self.join(x, y), self.meet(x, y)] {
                    if !set.put(z) {
                        work.push(z);
                    }
                }
            }
        }
        set.ones().collect()
    }

    /// The sublattice on `ids`, relabeled so that `ids[i]` becomes `i`.
    ///
    /// Constants are carried over when both lie in `ids`.
    pub fn sublattice(&self, ids: &[usize]) -> Result<FinLattice> {
        let m = ids.len();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &x) in ids.iter().enumerate() {
            if x >= self.n {
                return Err(Error::IdOutOfRange { id: x, n: self.n });
            }
            if pos[x] != usize::MAX {
                return Err(Error::NotInjective(pos[x], i));
            }
            pos[x] = i;
        }
        let mut join = vec![0u16; m * m];
        let mut meet = vec![0u16; m * m];
        for (i, &a) in ids.iter().enumerate() {
            for (j, &b) in ids.iter().enumerate() {
                let (jn, mt) = (pos[self.join(a, b)], pos[self.meet(a, b)]);
                if jn == usize::MAX || mt == usize::MAX {
                    return Err(Error::NotASublattice(format!(
                        "{a} and {b} combine outside the subset"
                    )));
                }
                join[i * m + j] = jn as u16;
                meet[i * m + j] = mt as u16;
            }
        }
        let consts = self.consts.and_then(|(z, o)| {
            (pos[z] != usize::MAX && pos[o] != usize::MAX).then(|| (pos[z], pos[o]))
        });
        if m == 0 {
            return Err(Error::NotASublattice("empty subset".into()));
        }
        Ok(Self::from_tables_trusted(m, join, meet, consts))
    }

    /// Relabels by `perm`, where `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> FinLattice {
        let n = self.n;
        let mut join = vec![0u16; n * n];
        let mut meet = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                join[perm[a] * n + perm[b]] = perm[self.join(a, b)] as u16;
                meet[perm[a] * n + perm[b]] = perm[self.meet(a, b)] as u16;
            }
        }
        let consts = self.consts.map(|(z, o)| (perm[z], perm[o]));
        let order = order_from_join(n, &join);
        FinLattice {
            n,
            join,
            meet,
            consts,
            order,
        }
    }

    /// The same tables viewed as a (total) partial lattice with its order.
    pub fn to_partial(&self) -> PartialLattice {
        PartialLattice {
            n: self.n,
            join: self.join.clone(),
            meet: self.meet.clone(),
            consts: self.consts,
            order: Some(self.order.clone()),
        }
    }

    /// Relative restriction to `ids` (relabeled in the given order): an
    /// operation is defined exactly when its value lies in `ids`. The declared
    /// order is the restricted order.
    pub fn restrict_relative(&self, ids: &[usize]) -> PartialLattice {
        let m = ids.len();
        let mut pos = vec![UNDEF; self.n];
        for (i, &x) in ids.iter().enumerate() {
            pos[x] = i as u16;
        }
        let mut p = PartialLattice::new(m);
        for (i, &a) in ids.iter().enumerate() {
            for (j, &b) in ids.iter().enumerate() {
                p.join[i * m + j] = pos[self.join(a, b)];
                p.meet[i * m + j] = pos[self.meet(a, b)];
            }
        }
        p.consts = self.consts.and_then(|(z, o)| {
            (pos[z] != UNDEF && pos[o] != UNDEF).then(|| (pos[z] as usize, pos[o] as usize))
        });
        p.order = Some(self.order.restrict(ids));
        p
    }
}

impl PartialLattice {
    /// `n` elements with every operation undefined and no declared order.
    pub fn new(n: usize) -> Self {
        PartialLattice {
            n,
            join: vec![UNDEF; n * n],
            meet: vec![UNDEF; n * n],
            consts: None,
            order: None,
        }
    }

    /// The empty partial lattice (plain signature only).
    pub fn empty() -> Self {
        let mut p = Self::new(0);
        p.order = Some(Poset::antichain(0));
        p
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        defined(self.join[a * self.n + b])
    }

    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        defined(self.meet[a * self.n + b])
    }

    pub fn op(&self, op: Op, a: usize, b: usize) -> Option<usize> {
        match op {
            Op::Join => self.join(a, b),
            Op::Meet => self.meet(a, b),
        }
    }

    /// Sets `a ∨ b = b ∨ a = c`.
    pub fn set_join(&mut self, a: usize, b: usize, c: Option<usize>) {
        let v = c.map_or(UNDEF, |c| c as u16);
        self.join[a * self.n + b] = v;
        self.join[b * self.n + a] = v;
    }

    /// Sets `a ∧ b = b ∧ a = c`.
    pub fn set_meet(&mut self, a: usize, b: usize, c: Option<usize>) {
        let v = c.map_or(UNDEF, |c| c as u16);
        self.meet[a * self.n + b] = v;
        self.meet[b * self.n + a] = v;
    }

    /// Sets a single (possibly asymmetric) entry; used to build invalid tables.
    pub fn set_entry(&mut self, op: Op, a: usize, b: usize, c: Option<usize>) {
        let v = c.map_or(UNDEF, |c| c as u16);
        match op {
            Op::Join => self.join[a * self.n + b] = v,
            Op::Meet => self.meet[a * self.n + b] = v,
        }
    }

    pub fn consts(&self) -> Option<(usize, usize)> {
        self.consts
    }

    pub fn set_consts(&mut self, consts: Option<(usize, usize)>) {
        self.consts = consts;
    }

    pub fn order(&self) -> Option<&Poset> {
        self.order.as_ref()
    }

    pub fn with_order(mut self, order: Poset) -> Result<Self> {
        if order.len() != self.n {
            return Err(Error::MapLength {
                expected: self.n,
                got: order.len(),
            });
        }
        self.order = Some(order);
        Ok(self)
    }

    pub fn is_total(&self) -> bool {
        !self.join.contains(&UNDEF) && !self.meet.contains(&UNDEF)
    }

    /// Number of defined entries across both tables.
    pub fn defined_count(&self) -> usize {
        self.join
            .iter()
            .chain(&self.meet)
            .filter(|&&v| v != UNDEF)
            .count()
    }
}

#[inline]
fn defined(v: u16) -> Option<usize> {
    (v != UNDEF).then_some(v as usize)
}

fn to_u16(v: usize, n: usize) -> Result<u16> {
    if v >= n {
        return Err(Error::IdOutOfRange { id: v, n });
    }
    Ok(v as u16)
}

fn order_from_join(n: usize, join: &[u16]) -> Poset {
    let up = (0..n)
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(n);
            for b in 0..n {
                if join[a * n + b] as usize == b {
                    row.insert(b);
                }
            }
            row
        })
        .collect();
    Poset::from_up_rows(up)
}

fn check_consts(
    n: usize,
    (z, o): (usize, usize),
    leq: impl Fn(usize, usize) -> bool,
) -> Result<()> {
    if z >= n || o >= n {
        return Err(Error::InvalidConstants(format!("({z}, {o}) out of range")));
    }
    if z == o {
        return Err(Error::InvalidConstants("0 and 1 coincide".into()));
    }
    if let Some(x) = (0..n).find(|&x| !leq(z, x)) {
        return Err(Error::InvalidConstants(format!("{z} is not below {x}")));
    }
    if let Some(x) = (0..n).find(|&x| !leq(x, o)) {
        return Err(Error::InvalidConstants(format!("{x} is not below {o}")));
    }
    Ok(())
}

/// Partial sup/inf tables of a poset. The poset becomes the declared order.
pub fn partial_ops(p: &Poset) -> PartialLattice {
    let n = p.len();
    let mut out = PartialLattice::new(n);
    for a in 0..n {
        for b in a..n {
            out.set_join(a, b, p.sup(a, b));
            out.set_meet(a, b, p.inf(a, b));
        }
    }
    out.order = Some(p.clone());
    out
}

/// Certifies that a fully defined table pair is a lattice.
pub fn validate_lattice(t: &PartialLattice) -> Result<FinLattice> {
    let n = t.n;
    if n == 0 {
        return Err(Error::Malformed(
            "a lattice needs at least one element".into(),
        ));
    }
    for (op, tab) in [(Op::Join, &t.join), (Op::Meet, &t.meet)] {
        for (i, &v) in tab.iter().enumerate() {
            if v == UNDEF {
                return Err(Error::UndefinedEntry {
                    a: i / n,
                    b: i % n,
                    op,
                });
            }
            if v as usize >= n {
                return Err(Error::IdOutOfRange { id: v as usize, n });
            }
        }
    }
    let j = |a: usize, b: usize| t.join[a * n + b] as usize;
    let m = |a: usize, b: usize| t.meet[a * n + b] as usize;
    let fail = |law, w: &[usize]| {
        Err(Error::LawViolation {
            law,
            witnesses: w.to_vec(),
        })
    };
    for a in 0..n {
        if j(a, a) != a || m(a, a) != a {
            return fail(Law::Idempotence, &[a]);
        }
    }
    for a in 0..n {
        for b in 0..n {
            if j(a, b) != j(b, a) || m(a, b) != m(b, a) {
                return fail(Law::Commutativity, &[a, b]);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if j(a, m(a, b)) != a || m(a, j(a, b)) != a {
                return fail(Law::Absorption, &[a, b]);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let (ab_j, ab_m) = (j(a, b), m(a, b));
            for c in 0..n {
                if j(ab_j, c) != j(a, j(b, c)) || m(ab_m, c) != m(a, m(b, c)) {
                    return fail(Law::Associativity, &[a, b, c]);
                }
            }
        }
    }
    let order = order_from_join(n, &t.join);
    if let Some(c) = t.consts {
        check_consts(n, c, |a, b| order.leq(a, b))?;
    }
    Ok(FinLattice {
        n,
        join: t.join.clone(),
        meet: t.meet.clone(),
        consts: t.consts,
        order,
    })
}
