//! Backtracking search for lattice embeddings.

use fixedbitset::FixedBitSet;

use super::embedding::{Embedding, EmbeddingMode};
use super::table::FinLattice;

const UNSET: usize = usize::MAX;

/// All total embeddings `g: B -> C` with `g ∘ e_ab = e_ac`, up to `limit`.
///
/// Results come in lexicographic order of `(g(0), g(1), ...)`. An empty list
/// means the exhaustive search found none.
pub fn embeddings_over(
    a: &FinLattice,
    b: &FinLattice,
    c: &FinLattice,
    e_ab: &Embedding,
    e_ac: &Embedding,
    limit: Option<usize>,
) -> Vec<Embedding> {
    debug_assert_eq!(e_ab.len(), a.len());
    debug_assert_eq!(e_ac.len(), a.len());
    let fixed: Vec<(usize, usize)> = (0..a.len())
        .map(|x| (e_ab.apply(x), e_ac.apply(x)))
        .collect();
    find_embeddings(b, c, &fixed, limit)
}

/// All total embeddings `B -> C` extending the given fixed pairs, up to `limit`.
pub fn find_embeddings(
    b: &FinLattice,
    c: &FinLattice,
    fixed: &[(usize, usize)],
    limit: Option<usize>,
) -> Vec<Embedding> {
    let mut s = Searcher::new(b, c);
    let mut out = Vec::new();
    for &(x, y) in fixed {
        if x >= b.len() || y >= c.len() || !s.assign(x, y) {
            return out;
        }
    }
    let limit = limit.unwrap_or(usize::MAX);
    if limit > 0 {
        s.run(&mut |map| {
            out.push(Embedding::new(map.to_vec(), EmbeddingMode::Total));
            out.len() < limit
        });
    }
    out
}

/// The first embedding found, if any.
pub fn first_embedding(
    b: &FinLattice,
    c: &FinLattice,
    fixed: &[(usize, usize)],
) -> Option<Embedding> {
    find_embeddings(b, c, fixed, Some(1)).pop()
}

/// Automorphisms of `l`, identity first.
pub fn automorphisms(l: &FinLattice) -> Vec<Vec<usize>> {
    find_embeddings(l, l, &[], None)
        .into_iter()
        .map(|e| e.map)
        .collect()
}

struct Searcher<'a> {
    b: &'a FinLattice,
    c: &'a FinLattice,
    assign: Vec<usize>,
    used: FixedBitSet,
    trail: Vec<usize>,
}

impl<'a> Searcher<'a> {
    fn new(b: &'a FinLattice, c: &'a FinLattice) -> Self {
        Searcher {
            b,
            c,
            assign: vec![UNSET; b.len()],
            used: FixedBitSet::with_capacity(c.len()),
            trail: Vec::with_capacity(b.len()),
        }
    }

    /// Assigns `x ↦ y` and propagates forced images of joins and meets.
    /// On failure the state is rolled back and `false` returned.
    fn assign(&mut self, x: usize, y: usize) -> bool {
        let mark = self.trail.len();
        let mut queue = vec![(x, y)];
        while let Some((x, y)) = queue.pop() {
            let cur = self.assign[x];
            if cur != UNSET {
                if cur != y {
                    self.undo(mark);
                    return false;
                }
                continue;
            }
            if self.used.contains(y) || !self.order_ok(x, y) {
                self.undo(mark);
                return false;
            }
            self.assign[x] = y;
            self.used.insert(y);
            self.trail.push(x);
            for i in 0..self.trail.len() - 1 {
                let d = self.trail[i];
                let gd = self.assign[d];
                queue.push((self.b.join(x, d), self.c.join(y, gd)));
                queue.push((self.b.meet(x, d), self.c.meet(y, gd)));
            }
        }
        true
    }

    fn order_ok(&self, x: usize, y: usize) -> bool {
        self.trail.iter().all(|&d| {
            let gd = self.assign[d];
            self.b.leq(d, x) == self.c.leq(gd, y) && self.b.leq(x, d) == self.c.leq(y, gd)
        })
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().expect("nonempty");
            self.used.set(self.assign[x], false);
            self.assign[x] = UNSET;
        }
    }

    /// Candidate images for `x` consistent with the order on assigned elements.
    fn candidates(&self, x: usize) -> FixedBitSet {
        let n = self.c.len();
        let mut cand = FixedBitSet::with_capacity(n);
        cand.insert_range(..);
        cand.difference_with(&self.used);
        for &d in &self.trail {
            let gd = self.assign[d];
            let up = self.c.order().up(gd);
            let down = self.c.order().down(gd);
            if self.b.leq(d, x) {
                cand.intersect_with(up);
            } else {
                cand.difference_with(up);
            }
            if self.b.leq(x, d) {
                cand.intersect_with(down);
            } else {
                cand.difference_with(down);
            }
        }
        cand
    }

    /// Depth-first enumeration; `emit` returns false to stop.
    fn run(&mut self, emit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let Some(x) = self.assign.iter().position(|&v| v == UNSET) else {
            return emit(&self.assign);
        };
        for y in self.candidates(x).ones() {
            let mark = self.trail.len();
            if self.assign(x, y) {
                let go_on = self.run(emit);
                self.undo(mark);
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}
