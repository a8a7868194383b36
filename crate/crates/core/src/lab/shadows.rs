//! Finite checks on built chains: pentagon and diamond copies, collapse of
//! principal congruences, and back-and-forth between intervals.

use serde::{Deserialize, Serialize};

use crate::builder::{
    back_and_forth, first_stage, BackForthReport, PartialIso, StageChain, StageView,
};
use crate::error::{Error, Result};
use crate::lattice::{first_embedding, Embedding, FinLattice};

use super::congruence::principal_congruence;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct N5M3 {
    pub n5: Option<Embedding>,
    pub m3: Option<Embedding>,
}

impl N5M3 {
    /// Neither sublattice occurs, which characterizes distributivity.
    pub fn is_distributive(&self) -> bool {
        self.n5.is_none() && self.m3.is_none()
    }
}

/// The lexicographically first copies of the pentagon and the diamond.
pub fn find_n5_m3(l: &FinLattice) -> N5M3 {
    N5M3 {
        n5: first_embedding(&FinLattice::n5(), l, &[]),
        m3: first_embedding(&FinLattice::m3(), l, &[]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Collapse {
    Found { stage: usize },
    NotYet,
}

/// The least stage below `horizon` in which `Cg(a, b)` relates `x` and `y`.
/// Congruences only grow along the chain, so the first such stage is found by
/// bisection.
pub fn simplicity_collapse_witness(
    chain: &StageChain,
    a: usize,
    b: usize,
    (x, y): (usize, usize),
    horizon: usize,
) -> Result<Collapse> {
    if a == b || x == y {
        return Err(Error::InvalidSeed(
            "both pairs need distinct elements".into(),
        ));
    }
    let n = chain.last().len();
    if let Some(&bad) = [a, b, x, y].iter().find(|&&v| v >= n) {
        return Err(Error::IdOutOfRange { id: bad, n });
    }
    let needed = a.max(b).max(x).max(y);
    let found = first_stage(chain, horizon, |c| {
        needed < c.len() && principal_congruence(c, a, b).relates(x, y)
    });
    Ok(match found {
        Some(stage) => Collapse::Found { stage },
        None => Collapse::NotYet,
    })
}

/// Back-and-forth between the intervals `[a, b]` and `[c, d]`, seeded with
/// the map sending bounds to bounds.
pub fn interval_back_and_forth(
    chain: &StageChain,
    (a, b): (usize, usize),
    (c, d): (usize, usize),
    rounds: usize,
) -> Result<BackForthReport> {
    let left = StageView::interval(chain, a, b)?;
    let right = StageView::interval(chain, c, d)?;
    back_and_forth(&left, &right, &constants_seed(&left, &right), rounds)
}

/// Bottom to bottom and top to top.
pub fn constants_seed(left: &StageView, right: &StageView) -> PartialIso {
    let (l, r) = (&left.lattice, &right.lattice);
    PartialIso::new(vec![(l.bottom(), r.bottom()), (l.top(), r.top())])
}
