//! The two classes the builder works over: finite lattices and finite
//! {0,1}-lattices. Each supplies its initial object, completion, amalgamation
//! and catalog of small members.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amalgamation::{
    inclusion_in, joint_in, AmalgamOptions, InclusionAmalgam, JointEmbedding,
};
use crate::bounded::complete01;
use crate::enumerate::enumerate_lattices_upto;
use crate::error::{Error, Result};
use crate::funayama::{fep_complete, CompletionResult};
use crate::lattice::{Embedding, EmbeddingMode, FinLattice, PartialLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarietyTag {
    Plain,
    ZeroOne,
}

impl VarietyTag {
    pub fn spec(self) -> &'static dyn Variety {
        match self {
            VarietyTag::Plain => &PlainLattices,
            VarietyTag::ZeroOne => &ZeroOneLattices,
        }
    }
}

impl fmt::Display for VarietyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarietyTag::Plain => "plain",
            VarietyTag::ZeroOne => "zero_one",
        })
    }
}

impl FromStr for VarietyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(VarietyTag::Plain),
            "zero_one" | "01" => Ok(VarietyTag::ZeroOne),
            _ => Err(Error::Malformed(format!("unknown variety {s:?}"))),
        }
    }
}

/// Hooks a class of finite lattices provides to the builder.
///
/// Implementations must be closed under substructures and have amalgamation
/// and joint embedding; the conformance tests check this on samples.
pub trait Variety: Sync {
    fn tag(&self) -> VarietyTag;

    /// The smallest member, used as the default first stage.
    fn initial(&self) -> FinLattice;

    /// Whether `l` is a member in this signature.
    fn admits(&self, l: &FinLattice) -> bool;

    fn complete(&self, p: &PartialLattice) -> Result<CompletionResult>;

    fn amalgamate_with_inclusion(
        &self,
        a: &FinLattice,
        b1: &FinLattice,
        b2: &FinLattice,
        f1: &Embedding,
        f2: &Embedding,
        opts: AmalgamOptions,
    ) -> Result<InclusionAmalgam> {
        inclusion_in(self.tag(), a, b1, b2, f1, f2, opts)
    }

    fn joint_embed(
        &self,
        b1: &FinLattice,
        b2: &FinLattice,
        opts: AmalgamOptions,
    ) -> Result<JointEmbedding> {
        joint_in(self.tag(), b1, b2, opts)
    }

    /// Members with at most `k` elements, canonical and sorted.
    fn catalog(&self, k: usize) -> Result<Vec<FinLattice>>;

    fn embedding_mode(&self) -> EmbeddingMode;

    /// Pairs every embedding of `b` into `c` must respect (the constants).
    fn pinned_pairs(&self, b: &FinLattice, c: &FinLattice) -> Vec<(usize, usize)>;
}

pub struct PlainLattices;

pub struct ZeroOneLattices;

impl Variety for PlainLattices {
    fn tag(&self) -> VarietyTag {
        VarietyTag::Plain
    }

    fn initial(&self) -> FinLattice {
        FinLattice::chain(1)
    }

    fn admits(&self, l: &FinLattice) -> bool {
        l.consts().is_none()
    }

    fn complete(&self, p: &PartialLattice) -> Result<CompletionResult> {
        fep_complete(p)
    }

    fn catalog(&self, k: usize) -> Result<Vec<FinLattice>> {
        enumerate_lattices_upto(k)
    }

    fn embedding_mode(&self) -> EmbeddingMode {
        EmbeddingMode::Total
    }

    fn pinned_pairs(&self, _b: &FinLattice, _c: &FinLattice) -> Vec<(usize, usize)> {
        Vec::new()
    }
}

impl Variety for ZeroOneLattices {
    fn tag(&self) -> VarietyTag {
        VarietyTag::ZeroOne
    }

    fn initial(&self) -> FinLattice {
        FinLattice::chain(2)
            .with_consts(Some((0, 1)))
            .expect("0 < 1")
    }

    fn admits(&self, l: &FinLattice) -> bool {
        matches!(l.consts(), Some((z, o)) if z == l.bottom() && o == l.top() && z != o)
    }

    fn complete(&self, p: &PartialLattice) -> Result<CompletionResult> {
        complete01(p)
    }

    fn catalog(&self, k: usize) -> Result<Vec<FinLattice>> {
        enumerate_lattices_upto(k)?
            .into_iter()
            .filter(|l| l.len() >= 2)
            .map(|l| l.with_bounds_as_consts())
            .collect()
    }

    fn embedding_mode(&self) -> EmbeddingMode {
        EmbeddingMode::Total01
    }

    fn pinned_pairs(&self, b: &FinLattice, c: &FinLattice) -> Vec<(usize, usize)> {
        match (b.consts(), c.consts()) {
            (Some((z, o)), Some((z2, o2))) => vec![(z, z2), (o, o2)],
            _ => Vec::new(),
        }
    }
}
