use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A finite partial order on `0..n`, stored as up-set and down-set rows.
///
/// `up[a]` holds every `b` with `a <= b` (reflexive), `down[a]` the dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    covers: Vec<(usize, usize)>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of the given pairs.
    ///
    /// The pairs need not be covers; redundant comparabilities are fine. A
    /// repeated pair is rejected, as is anything that closes a cycle.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in covers {
            for id in [a, b] {
                if id >= n {
                    return Err(Error::IdOutOfRange { id, n });
                }
            }
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateCover(a, b));
            }
            if a == b {
                return Err(Error::CycleDetected(vec![a]));
            }
            succ[a].push(b);
        }
        if let Some(cycle) = find_cycle(&succ) {
            return Err(Error::CycleDetected(cycle));
        }
        let mut up: Vec<FixedBitSet> = (0..n)
            .map(|a| {
                let mut row = FixedBitSet::with_capacity(n);
                row.insert(a);
                for &b in &succ[a] {
                    row.insert(b);
                }
                row
            })
            .collect();
        close_rows(&mut up);
        Ok(Self::from_up_rows(up))
    }

    /// Builds a poset from an order predicate, checking the partial order axioms.
    pub fn from_relation(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (a, row) in up.iter_mut().enumerate() {
            for b in 0..n {
                if leq(a, b) {
                    row.insert(b);
                }
            }
        }
        for (a, row) in up.iter().enumerate() {
            if !row.contains(a) {
                return Err(Error::Malformed(format!("order is not reflexive at {a}")));
            }
            for b in row.ones() {
                if b != a && up[b].contains(a) {
                    return Err(Error::CycleDetected(vec![a, b]));
                }
                if !up[b].is_subset(row) {
                    return Err(Error::Malformed(format!(
                        "order is not transitive through {a} <= {b}"
                    )));
                }
            }
        }
        Ok(Self::from_up_rows(up))
    }

    /// Trusted constructor: `up` must already be a reflexive, transitive,
    /// antisymmetric relation.
    pub(crate) fn from_up_rows(up: Vec<FixedBitSet>) -> Self {
        let n = up.len();
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (a, row) in up.iter().enumerate() {
            for b in row.ones() {
                down[b].insert(a);
            }
        }
        let covers = reduction(&up);
        Poset {
            n,
            up,
            down,
            covers,
        }
    }

    pub fn chain(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_covers(n, &pairs).expect("chain is acyclic")
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_covers(n, &[]).expect("antichain is acyclic")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Elements above `a`, including `a`.
    pub fn up(&self, a: usize) -> &FixedBitSet {
        &self.up[a]
    }

    /// Elements below `a`, including `a`.
    pub fn down(&self, a: usize) -> &FixedBitSet {
        &self.down[a]
    }

    /// The cover relation (transitive reduction), sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Number of pairs `(a, b)` with `a <= b`.
    pub fn leq_pair_count(&self) -> usize {
        self.up.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Least upper bound of `a` and `b`, if one exists.
    pub fn sup(&self, a: usize, b: usize) -> Option<usize> {
        let mut common = self.up[a].clone();
        common.intersect_with(&self.up[b]);
        least_of(&common, &self.up)
    }

    /// Greatest lower bound of `a` and `b`, if one exists.
    pub fn inf(&self, a: usize, b: usize) -> Option<usize> {
        let mut common = self.down[a].clone();
        common.intersect_with(&self.down[b]);
        least_of(&common, &self.down)
    }

    /// Minimal elements in id order.
    pub fn minimal(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&a| self.down[a].count_ones(..) == 1)
            .collect()
    }

    /// Maximal elements in id order.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&a| self.up[a].count_ones(..) == 1)
            .collect()
    }

    /// Length of the longest chain ending at each element (minimal elements get 0).
    pub fn heights(&self) -> Vec<usize> {
        let order = self.linear_extension();
        let mut h = vec![0; self.n];
        for &b in &order {
            for a in self.down[b].ones() {
                if a != b {
                    h[b] = h[b].max(h[a] + 1);
                }
            }
        }
        h
    }

    /// Length of the longest chain starting at each element.
    pub fn depths(&self) -> Vec<usize> {
        let order = self.linear_extension();
        let mut d = vec![0; self.n];
        for &a in order.iter().rev() {
            for b in self.up[a].ones() {
                if a != b {
                    d[a] = d[a].max(d[b] + 1);
                }
            }
        }
        d
    }

    /// Ids sorted so that every element comes after everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.n).collect();
        ids.sort_by_key(|&a| (self.down[a].count_ones(..), a));
        ids
    }

    /// The induced order on `ids` (in the given order), relabeled to `0..ids.len()`.
    pub fn restrict(&self, ids: &[usize]) -> Poset {
        let m = ids.len();
        let up = ids
            .iter()
            .map(|&a| {
                let mut row = FixedBitSet::with_capacity(m);
                for (j, &b) in ids.iter().enumerate() {
                    if self.leq(a, b) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        Poset::from_up_rows(up)
    }

    /// Whether `set` is closed downward.
    pub fn is_downset(&self, set: &FixedBitSet) -> bool {
        set.ones().all(|a| self.down[a].is_subset(set))
    }
}

fn least_of(set: &FixedBitSet, up: &[FixedBitSet]) -> Option<usize> {
    set.ones().find(|&c| set.is_subset(&up[c]))
}

/// Warshall-style closure over bitset rows.
pub(crate) fn close_rows(up: &mut [FixedBitSet]) {
    let n = up.len();
    for k in 0..n {
        let row_k = up[k].clone();
        for row in up.iter_mut() {
            if row.contains(k) {
                row.union_with(&row_k);
            }
        }
    }
}

fn reduction(up: &[FixedBitSet]) -> Vec<(usize, usize)> {
    let n = up.len();
    let mut out = Vec::new();
    for a in 0..n {
        let mut strict = up[a].clone();
        strict.set(a, false);
        let mut covered = strict.clone();
        for c in strict.ones() {
            let mut above = up[c].clone();
            above.set(c, false);
            covered.difference_with(&above);
        }
        out.extend(covered.ones().map(|b| (a, b)));
    }
    out
}

/// Returns one directed cycle if the successor graph has any.
pub(crate) fn find_cycle(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let n = succ.len();
    let mut state = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(top) = stack.len().checked_sub(1) {
            let (v, next) = stack[top];
            if next < succ[v].len() {
                let w = succ[v][next];
                stack[top].1 += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        parent[w] = v;
                        stack.push((w, 0));
                    }
                    1 => {
                        let mut cycle = vec![w];
                        let mut u = v;
                        while u != w {
                            cycle.push(u);
                            u = parent[u];
                        }
                        cycle[1..].reverse();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}
