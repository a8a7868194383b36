//! {0,1}-lattices: lattices with the bounds named as constants, 0 ≠ 1.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::amalgamation::{amalgamate_in, AmalgamOptions, AmalgamResult};
use crate::builder::{first_stage, StageChain};
use crate::error::{Error, Result};
use crate::funayama::{complete_over, CompletionResult};
use crate::lattice::{Embedding, FinLattice, PartialLattice, Poset};
use crate::variety::VarietyTag;

/// A finite lattice whose constants are its (distinct) bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice01(FinLattice);

impl Lattice01 {
    pub fn new(l: FinLattice) -> Result<Self> {
        let (z, o) = l
            .consts()
            .ok_or_else(|| Error::InvalidConstants("constants are mandatory".into()))?;
        // with_consts re-checks minimality, maximality and distinctness
        Ok(Lattice01(l.with_consts(Some((z, o)))?))
    }

    /// Names the bounds of `l` as its constants.
    pub fn from_bounds(l: FinLattice) -> Result<Self> {
        Ok(Lattice01(l.with_bounds_as_consts()?))
    }

    pub fn lattice(&self) -> &FinLattice {
        &self.0
    }

    pub fn into_inner(self) -> FinLattice {
        self.0
    }

    pub fn zero(&self) -> usize {
        self.0.consts().expect("invariant").0
    }

    pub fn one(&self) -> usize {
        self.0.consts().expect("invariant").1
    }
}

/// Completion by nonempty ideals, preserving the constants. Missing constants
/// are adjoined as a new bottom and top first (reported in `adjoined_consts`).
pub fn complete01(p: &PartialLattice) -> Result<CompletionResult> {
    let order = p.order().ok_or(Error::NoOrderDeclared)?;
    let n = p.len();
    let (q, (z, o), adjoined) = match p.consts() {
        Some((z, o)) => {
            if z >= n || o >= n || z == o {
                return Err(Error::InvalidConstants(format!("({z}, {o})")));
            }
            if (0..n).any(|x| !order.leq(z, x) || !order.leq(x, o)) {
                return Err(Error::InvalidConstants(
                    "constants are not the bounds of the order".into(),
                ));
            }
            (p.clone(), (z, o), false)
        }
        None => {
            let q = adjoin_bounds(p, order)?;
            (q, (n, n + 1), true)
        }
    };
    let mut c = complete_over(&q, true)?;
    let top = c.lattice.len() - 1;
    debug_assert_eq!(c.ideals[top].len(), q.len());
    let zero_ideal = c.embed.map[z];
    let one_ideal = c.embed.map[o];
    if one_ideal != top || c.ideals[zero_ideal].len() != 1 {
        return Err(Error::VerificationFailure(
            "constants not mapped to the bounds".into(),
        ));
    }
    c.lattice = c.lattice.with_consts(Some((zero_ideal, one_ideal)))?;
    c.adjoined_consts = adjoined;
    Ok(c)
}

fn adjoin_bounds(p: &PartialLattice, order: &Poset) -> Result<PartialLattice> {
    let n = p.len();
    let (z, o) = (n, n + 1);
    let mut q = PartialLattice::new(n + 2);
    for a in 0..n {
        for b in 0..n {
            q.set_join(a, b, p.join(a, b));
            q.set_meet(a, b, p.meet(a, b));
        }
    }
    for x in 0..n + 2 {
        q.set_join(z, x, Some(x));
        q.set_meet(z, x, Some(z));
        q.set_join(o, x, Some(o));
        q.set_meet(o, x, Some(x));
    }
    let up = (0..n + 2)
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(n + 2);
            if a == z {
                row.insert_range(..);
            } else if a == o {
                row.insert(o);
            } else {
                row.extend(order.up(a).ones());
                row.insert(o);
            }
            row
        })
        .collect();
    q.set_consts(Some((z, o)));
    q.with_order(Poset::from_up_rows(up))
}

/// Amalgamation in the {0,1} signature (nonempty ideals, shared constants).
pub fn amalgamate01(
    a: &Lattice01,
    b1: &Lattice01,
    b2: &Lattice01,
    f1: &Embedding,
    f2: &Embedding,
) -> Result<AmalgamResult> {
    amalgamate01_with(a, b1, b2, f1, f2, AmalgamOptions::ideal())
}

pub fn amalgamate01_with(
    a: &Lattice01,
    b1: &Lattice01,
    b2: &Lattice01,
    f1: &Embedding,
    f2: &Embedding,
    opts: AmalgamOptions,
) -> Result<AmalgamResult> {
    for (f, b) in [(f1, b1), (f2, b2)] {
        if f.map.len() != a.0.len() {
            return Err(Error::MapLength {
                expected: a.0.len(),
                got: f.map.len(),
            });
        }
        if f.apply(a.zero()) != b.zero() || f.apply(a.one()) != b.one() {
            return Err(Error::ConstantsClash);
        }
    }
    amalgamate_in(VarietyTag::ZeroOne, &a.0, &b1.0, &b2.0, f1, f2, opts)
}

/// An interval `[a, b]` as a {0,1}-lattice, with the global id of each element.
#[derive(Debug, Clone)]
pub struct Interval01 {
    pub lattice: Lattice01,
    /// `ids[i]` is the element of the ambient lattice with local id `i`.
    pub ids: Vec<usize>,
}

/// The interval `[a, b]` (requires `a < b`) with constants `a` and `b`.
pub fn interval_as_01(l: &FinLattice, a: usize, b: usize) -> Result<Interval01> {
    if a >= l.len() || b >= l.len() || !l.lt(a, b) {
        return Err(Error::NotAnInterval { a, b });
    }
    let ids: Vec<usize> = (0..l.len())
        .filter(|&x| l.leq(a, x) && l.leq(x, b))
        .collect();
    let sub = l.sublattice(&ids)?;
    let z = ids.binary_search(&a).expect("a in interval");
    let o = ids.binary_search(&b).expect("b in interval");
    let lattice = Lattice01::new(sub.with_consts(Some((z, o)))?)?;
    Ok(Interval01 { lattice, ids })
}

/// The least stage whose top is the join of two smaller elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum JoinReducible {
    Found { stage: usize, x: usize, y: usize },
    NotYet,
}

/// Finds the least stage `n` with `x, y < 1` and `x ∨ y = 1` in `C_n`
/// (lexicographically least pair). Only defined for {0,1} chains.
pub fn one_join_reducible_stage(chain: &StageChain) -> Result<JoinReducible> {
    if chain.variety != VarietyTag::ZeroOne {
        return Err(Error::WrongVariety {
            expected: VarietyTag::ZeroOne.to_string(),
            got: chain.variety.to_string(),
        });
    }
    let reducible = |c: &FinLattice| {
        let one = c.top();
        (0..c.len())
            .flat_map(|x| (x + 1..c.len()).map(move |y| (x, y)))
            .find(|&(x, y)| x != one && y != one && c.join(x, y) == one)
    };
    // the top is shared by all stages, so reducibility is monotone
    Ok(
        match first_stage(chain, chain.len(), |c| reducible(c).is_some()) {
            Some(stage) => {
                let (x, y) = reducible(chain.stage(stage)).expect("checked");
                JoinReducible::Found { stage, x, y }
            }
            None => JoinReducible::NotYet,
        },
    )
}
