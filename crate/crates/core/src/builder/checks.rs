use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    embeddings_over, find_embeddings, first_embedding, validate_lattice, Embedding, FinLattice,
    LatticeCode,
};

use super::chain::StageChain;
use super::schedule::ExtensionCatalog;

/// One probe of the extension property: `B` over the copy of `A` at `a_in_c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct U1Pair {
    pub a: LatticeCode,
    pub b: LatticeCode,
    pub a_in_b: Vec<usize>,
    pub a_in_c: Vec<usize>,
    /// First stage (below the horizon) holding a copy of `B` over `A`.
    pub realized_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct U1Report {
    pub probe_stage: usize,
    pub horizon: usize,
    pub pairs: Vec<U1Pair>,
}

impl U1Report {
    pub fn unrealized(&self) -> impl Iterator<Item = &U1Pair> {
        self.pairs.iter().filter(|p| p.realized_at.is_none())
    }

    pub fn all_realized(&self) -> bool {
        self.unrealized().next().is_none()
    }
}

/// For every `A ≤ B` with `|B| ≤ k` (including `A = B`) and every copy of `A`
/// in the first stage, the first stage among `0..horizon` that contains `B`
/// over that copy.
pub fn check_u1(chain: &StageChain, k: usize, horizon: usize) -> Result<U1Report> {
    check_u1_at(chain, 0, k, horizon)
}

/// [`check_u1`] with the copies of `A` taken in stage `probe_stage` instead.
pub fn check_u1_at(
    chain: &StageChain,
    probe_stage: usize,
    k: usize,
    horizon: usize,
) -> Result<U1Report> {
    if probe_stage >= chain.len() {
        return Err(Error::StagesExhausted {
            reached: chain.len(),
        });
    }
    let catalog = ExtensionCatalog::new(chain.variety, k)?;
    let spec = chain.variety.spec();
    let probe = chain.stage(probe_stage);
    let horizon = horizon.min(chain.len());
    let mode = spec.embedding_mode();
    let mut pairs = Vec::new();
    for (ai, a) in catalog.members.iter().enumerate() {
        let pins = spec.pinned_pairs(&a.lattice, probe);
        let mut images = BTreeSet::new();
        for h in find_embeddings(&a.lattice, probe, &pins, None) {
            let mut img = h.map.clone();
            img.sort_unstable();
            if !images.insert(img) {
                continue;
            }
            let trivial = (a.code.clone(), (0..a.lattice.len()).collect::<Vec<_>>());
            let exts = std::iter::once(trivial).chain(
                catalog.extensions[ai]
                    .iter()
                    .map(|e| (catalog.members[e.b].code.clone(), e.a_in_b.clone())),
            );
            for (b_code, a_in_b) in exts {
                let b = chain.task_lattice(&b_code)?;
                let e_ab = Embedding::new(a_in_b.clone(), mode);
                let realized_at = first_stage_from(chain, probe_stage, horizon, |c| {
                    !embeddings_over(&a.lattice, &b, c, &e_ab, &h, Some(1)).is_empty()
                });
                pairs.push(U1Pair {
                    a: a.code.clone(),
                    b: b_code,
                    a_in_b,
                    a_in_c: h.map.clone(),
                    realized_at,
                });
            }
        }
    }
    Ok(U1Report {
        probe_stage,
        horizon,
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct U2U3Report {
    pub k: usize,
    /// Catalog members with the first stage containing a copy.
    pub embedded: Vec<(LatticeCode, Option<usize>)>,
    /// Stages failing validation as members of the class.
    pub u3_failures: Vec<usize>,
}

impl U2U3Report {
    pub fn coverage(&self) -> (usize, usize) {
        (
            self.embedded.iter().filter(|(_, s)| s.is_some()).count(),
            self.embedded.len(),
        )
    }

    pub fn u2_ok(&self) -> bool {
        self.embedded.iter().all(|(_, s)| s.is_some())
    }

    pub fn u3_ok(&self) -> bool {
        self.u3_failures.is_empty()
    }
}

/// Universality up to `k` and membership of the stages in the class.
///
/// Substructures of a member are sublattices (containing the constants in the
/// {0,1} signature), which are members again; so U3 reduces to re-validating
/// each stage as a lattice of the class.
pub fn check_u2_u3(chain: &StageChain, k: usize) -> Result<U2U3Report> {
    let spec = chain.variety.spec();
    let last = chain.last();
    let mut embedded = Vec::new();
    for m in ExtensionCatalog::new(chain.variety, k)?.members {
        let pins = spec.pinned_pairs(&m.lattice, last);
        let at = first_stage(chain, chain.len(), |c| {
            first_embedding(&m.lattice, c, &pins).is_some()
        });
        embedded.push((m.code, at));
    }
    let u3_failures = chain
        .stages
        .iter()
        .enumerate()
        .filter(|(_, s)| validate_lattice(&s.to_partial()).is_err() || !spec.admits(s))
        .map(|(i, _)| i)
        .collect();
    Ok(U2U3Report {
        k,
        embedded,
        u3_failures,
    })
}

/// The first stage below `horizon` satisfying `holds`, which must be
/// monotone along the chain (true at a stage implies true at every later one).
pub(crate) fn first_stage(
    chain: &StageChain,
    horizon: usize,
    holds: impl Fn(&FinLattice) -> bool,
) -> Option<usize> {
    first_stage_from(chain, 0, horizon, holds)
}

/// [`first_stage`] restricted to the stages `from..horizon`.
fn first_stage_from(
    chain: &StageChain,
    from: usize,
    horizon: usize,
    holds: impl Fn(&FinLattice) -> bool,
) -> Option<usize> {
    let horizon = horizon.min(chain.len());
    if horizon <= from || !holds(chain.stage(horizon - 1)) {
        return None;
    }
    let (mut lo, mut hi) = (from, horizon - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if holds(chain.stage(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}
