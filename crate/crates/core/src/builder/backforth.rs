use serde::{Deserialize, Serialize};

use crate::bounded::interval_as_01;
use crate::error::{Error, Result};
use crate::lattice::{find_embeddings, is_total_embedding, Embedding, EmbeddingMode, FinLattice};

use super::chain::StageChain;

/// A chain seen through its last stage: ids are prefix-stable, so every
/// stage is the initial segment `0..sizes[i]` of `lattice`.
#[derive(Debug, Clone)]
pub struct StageView {
    pub lattice: FinLattice,
    pub sizes: Vec<usize>,
}

impl StageView {
    pub fn of_chain(chain: &StageChain) -> Self {
        StageView {
            lattice: chain.last().clone(),
            sizes: chain.sizes(),
        }
    }

    /// The interval `[a, b]` of every stage containing both ends, as
    /// {0,1}-lattices. Local ids follow the global order, so they stay
    /// prefix-stable.
    pub fn interval(chain: &StageChain, a: usize, b: usize) -> Result<Self> {
        let iv = interval_as_01(chain.last(), a, b)?;
        let first = chain
            .stage_of(a.max(b))
            .expect("ends lie in the last stage");
        let sizes = chain.sizes()[first..]
            .iter()
            .map(|&s| iv.ids.partition_point(|&x| x < s))
            .collect();
        Ok(StageView {
            lattice: iv.lattice.into_inner(),
            sizes,
        })
    }

    /// The first stage containing every id of `ids`.
    pub fn stage_of(&self, ids: impl IntoIterator<Item = usize>) -> usize {
        let m = ids.into_iter().max().unwrap_or(0);
        self.sizes
            .iter()
            .position(|&s| m < s)
            .unwrap_or(self.sizes.len())
    }
}

/// A finite partial isomorphism, kept as pairs sorted by domain element.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialIso {
    pub pairs: Vec<(usize, usize)>,
}

impl PartialIso {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        PartialIso { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn domain(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn range(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.pairs.iter().map(|p| p.1).collect();
        r.sort_unstable();
        r
    }

    pub fn inverse(&self) -> PartialIso {
        PartialIso::new(self.pairs.iter().map(|&(x, y)| (y, x)).collect())
    }

    /// Domain and range are sublattices and the map is a lattice isomorphism
    /// between them.
    pub fn check(&self, left: &FinLattice, right: &FinLattice) -> Result<()> {
        let fail = |m: &str| Error::InvalidSeed(m.into());
        if self
            .pairs
            .iter()
            .any(|&(x, y)| x >= left.len() || y >= right.len())
        {
            return Err(fail("pair out of range"));
        }
        let dom = self.domain();
        if dom.windows(2).any(|w| w[0] == w[1]) {
            return Err(fail("not a function"));
        }
        let range = self.range();
        if range.windows(2).any(|w| w[0] == w[1]) {
            return Err(fail("not injective"));
        }
        let sub = left
            .sublattice(&dom)
            .map_err(|_| fail("domain is not a sublattice"))?;
        let map: Vec<usize> = self.pairs.iter().map(|p| p.1).collect();
        if !is_total_embedding(&sub, right, &map) {
            return Err(fail("map does not preserve the operations"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Forth,
    Back,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackForthStep {
    pub side: Side,
    /// The element the step set out to cover.
    pub target: usize,
    /// Unmatched elements passed over before `target` could be covered.
    pub skipped: usize,
    pub added: usize,
    /// Stages of the two sides reached so far.
    pub stages: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackForthReport {
    pub iso: PartialIso,
    pub steps: Vec<BackForthStep>,
    /// The side on which no unmatched element could be added, if any.
    pub stalled: Option<Side>,
}

impl BackForthReport {
    pub fn grown_by(&self, seed: &PartialIso) -> usize {
        self.iso.len() - seed.len()
    }
}

/// Extends `seed` for `rounds` rounds, each a forth step then a back step.
///
/// A step takes the smallest unmatched element `x` on its side, forms the
/// sublattice generated by the domain and `x`, and looks for an embedding of
/// it into the other side extending the current map. When no copy exists
/// within the built stages the next unmatched element is tried; the skip count
/// is recorded. The map is re-checked as a partial isomorphism after each step.
pub fn back_and_forth(
    left: &StageView,
    right: &StageView,
    seed: &PartialIso,
    rounds: usize,
) -> Result<BackForthReport> {
    seed.check(&left.lattice, &right.lattice)?;
    let mut iso = seed.clone();
    let mut steps = Vec::new();
    for _ in 0..rounds {
        for side in [Side::Forth, Side::Back] {
            let step = match side {
                Side::Forth => extend_once(left, right, &iso)?,
                Side::Back => {
                    extend_once(right, left, &iso.inverse())?.map(|(s, next)| (s, next.inverse()))
                }
            };
            let Some((mut step, next)) = step else {
                return Ok(BackForthReport {
                    iso,
                    steps,
                    stalled: Some(side),
                });
            };
            next.check(&left.lattice, &right.lattice).map_err(|e| {
                Error::VerificationFailure(format!("step broke the partial isomorphism: {e}"))
            })?;
            step.side = side;
            step.stages = (left.stage_of(next.domain()), right.stage_of(next.range()));
            iso = next;
            steps.push(step);
        }
    }
    Ok(BackForthReport {
        iso,
        steps,
        stalled: None,
    })
}

fn extend_once(
    from: &StageView,
    to: &StageView,
    iso: &PartialIso,
) -> Result<Option<(BackForthStep, PartialIso)>> {
    let l = &from.lattice;
    let dom = iso.domain();
    for (skipped, x) in (0..l.len())
        .filter(|x| dom.binary_search(x).is_err())
        .enumerate()
    {
        let ids = l.generated(dom.iter().copied().chain([x]));
        let sub = l.sublattice(&ids)?;
        // positions of the domain inside the generated sublattice
        let fixed: Vec<(usize, usize)> = iso
            .pairs
            .iter()
            .map(|&(d, r)| (ids.binary_search(&d).expect("domain is generated"), r))
            .collect();
        if let Some(e) = find_embeddings(&sub, &to.lattice, &fixed, Some(1)).pop() {
            let next = PartialIso::new(ids.iter().copied().zip(e.map).collect());
            let step = BackForthStep {
                side: Side::Forth,
                target: x,
                skipped,
                added: ids.len() - dom.len(),
                stages: (0, 0),
            };
            return Ok(Some((step, next)));
        }
    }
    Ok(None)
}

/// `A_1 ≤ A_2 ≤ ...` given by the terms and the inclusions between them.
#[derive(Debug, Clone)]
pub struct AscendingChain {
    pub terms: Vec<FinLattice>,
    pub inclusions: Vec<Embedding>,
}

impl AscendingChain {
    pub fn new(terms: Vec<FinLattice>, inclusions: Vec<Embedding>) -> Result<Self> {
        if terms.is_empty() || inclusions.len() + 1 != terms.len() {
            return Err(Error::Malformed(
                "need one inclusion between consecutive terms".into(),
            ));
        }
        for (i, e) in inclusions.iter().enumerate() {
            if !is_total_embedding(&terms[i], &terms[i + 1], &e.map) {
                return Err(Error::NotASublattice(format!(
                    "term {i} does not embed into term {}",
                    i + 1
                )));
            }
        }
        Ok(AscendingChain { terms, inclusions })
    }

    /// The same lattice `depth` times.
    pub fn constant(l: FinLattice, depth: usize) -> Self {
        let n = l.len();
        AscendingChain {
            terms: vec![l; depth.max(1)],
            inclusions: vec![Embedding::identity(n, EmbeddingMode::Total); depth.max(1) - 1],
        }
    }

    /// Chains with `1, 2, ..., depth` elements, each a bottom segment of the next.
    pub fn chains(depth: usize) -> Self {
        let terms: Vec<FinLattice> = (1..=depth.max(1)).map(FinLattice::chain).collect();
        let inclusions = (1..depth.max(1))
            .map(|n| Embedding::identity(n, EmbeddingMode::Total))
            .collect();
        AscendingChain { terms, inclusions }
    }

    /// Antichains of width `1, ..., depth` with a bottom and top adjoined.
    pub fn antichains_with_bounds(depth: usize) -> Self {
        let terms: Vec<FinLattice> = (1..=depth.max(1))
            .map(FinLattice::antichain_with_bounds)
            .collect();
        // bottom 0 stays, atoms 1..=m stay, the top moves from m+1 to m+2
        let inclusions = (1..depth.max(1))
            .map(|m| Embedding::new((0..=m).chain([m + 2]).collect(), EmbeddingMode::Total))
            .collect();
        AscendingChain { terms, inclusions }
    }

    pub fn depth(&self) -> usize {
        self.terms.len()
    }
}

/// Embeds `A_depth` into the view by embedding `A_1` and extending along the
/// inclusions, backtracking over at most `branch` choices per level.
pub fn embed_locally_finite(
    target: &StageView,
    alg: &AscendingChain,
    depth: usize,
    branch: usize,
) -> Result<(Embedding, usize)> {
    let depth = depth.clamp(1, alg.depth());
    let mut steps = 0usize;
    match extend_level(target, alg, 0, depth, None, branch.max(1), &mut steps) {
        Some(map) => {
            let stage = target.stage_of(map.iter().copied());
            Ok((Embedding::new(map, EmbeddingMode::Total), stage))
        }
        None => Err(Error::StagesExhausted { reached: steps }),
    }
}

fn extend_level(
    target: &StageView,
    alg: &AscendingChain,
    level: usize,
    depth: usize,
    prev: Option<&[usize]>,
    branch: usize,
    steps: &mut usize,
) -> Option<Vec<usize>> {
    let fixed: Vec<(usize, usize)> = match prev {
        Some(p) => alg.inclusions[level - 1]
            .map
            .iter()
            .zip(p)
            .map(|(&x, &y)| (x, y))
            .collect(),
        None => Vec::new(),
    };
    for e in find_embeddings(&alg.terms[level], &target.lattice, &fixed, Some(branch)) {
        *steps += 1;
        if level + 1 == depth {
            return Some(e.map);
        }
        if let Some(m) = extend_level(target, alg, level + 1, depth, Some(&e.map), branch, steps) {
            return Some(m);
        }
    }
    None
}
