use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::amalgamation::AmalgamStrategy;
use crate::error::{Error, Result};
use crate::lattice::{
    embeddings_over, first_embedding, is_total_embedding, Embedding, FinLattice, LatticeCode,
};
use crate::variety::VarietyTag;

/// One obligation of the construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtensionTask {
    /// Realize `B` over the copy of `A` sitting at `a_in_c` in some stage.
    Extension {
        a: LatticeCode,
        b: LatticeCode,
        a_in_b: Vec<usize>,
        a_in_c: Vec<usize>,
    },
    /// Embed some copy of `B`.
    Copy { b: LatticeCode },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TaskStatus {
    Pending,
    /// `witness` embeds `B` into stage `stage` (over `A` for extensions).
    Realized {
        stage: usize,
        witness: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub task: ExtensionTask,
    pub discovered: usize,
    pub status: TaskStatus,
}

/// Order in which a freshly scheduled batch joins the queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskOrder {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMeta {
    pub budget: usize,
    pub stage_cap: usize,
    pub order: TaskOrder,
    pub prune: bool,
    pub strategy: AmalgamStrategy,
}

/// Stages `C_0 ⊆ C_1 ⊆ ...` with prefix-stable ids: stage `i` is the
/// sublattice of stage `i + 1` on ids `0..|C_i|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageChain {
    pub variety: VarietyTag,
    pub k: usize,
    pub stages: Vec<FinLattice>,
    pub ledger: Vec<LedgerEntry>,
    /// Stages whose tasks have been put on the ledger.
    pub scheduled: usize,
    pub meta: ChainMeta,
    pub(crate) keys: HashSet<ExtensionTask>,
}

impl StageChain {
    pub fn new(
        variety: VarietyTag,
        initial: FinLattice,
        k: usize,
        meta: ChainMeta,
    ) -> Result<Self> {
        if !variety.spec().admits(&initial) {
            return Err(Error::WrongVariety {
                expected: variety.to_string(),
                got: "initial lattice outside the class".into(),
            });
        }
        Ok(StageChain {
            variety,
            k,
            stages: vec![initial],
            ledger: Vec::new(),
            scheduled: 0,
            meta,
            keys: HashSet::new(),
        })
    }

    /// Reassembles a chain from stored parts and re-verifies it.
    pub fn from_parts(
        variety: VarietyTag,
        k: usize,
        stages: Vec<FinLattice>,
        ledger: Vec<LedgerEntry>,
        scheduled: usize,
        meta: ChainMeta,
    ) -> Result<Self> {
        let keys = ledger.iter().map(|e| e.task.clone()).collect();
        let c = StageChain {
            variety,
            k,
            stages,
            ledger,
            scheduled,
            meta,
            keys,
        };
        c.verify()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn last(&self) -> &FinLattice {
        self.stages.last().expect("chains have a first stage")
    }

    pub fn stage(&self, i: usize) -> &FinLattice {
        &self.stages[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.stages.iter().map(FinLattice::len).collect()
    }

    /// The first stage containing `id`.
    pub fn stage_of(&self, id: usize) -> Option<usize> {
        self.stages.iter().position(|s| id < s.len())
    }

    /// The first stage containing every id of `ids` (stage 0 for none).
    pub fn stage_of_all(&self, ids: &[usize]) -> Option<usize> {
        match ids.iter().max() {
            Some(&m) => self.stage_of(m),
            None => Some(0),
        }
    }

    /// The inclusion `C_i -> C_{i+1}`.
    pub fn inclusion(&self, i: usize) -> Embedding {
        Embedding::identity(self.stages[i].len(), self.variety.spec().embedding_mode())
    }

    pub fn pending(&self) -> impl Iterator<Item = (usize, &LedgerEntry)> {
        self.ledger
            .iter()
            .enumerate()
            .filter(|(_, e)| e.status == TaskStatus::Pending)
    }

    pub fn oldest_pending(&self) -> Option<usize> {
        self.pending().next().map(|(i, _)| i)
    }

    /// Decodes a task lattice in this chain's signature.
    pub fn task_lattice(&self, code: &LatticeCode) -> Result<FinLattice> {
        let l = code.to_lattice()?;
        match self.variety {
            VarietyTag::Plain => Ok(l),
            VarietyTag::ZeroOne => l.with_bounds_as_consts(),
        }
    }

    /// Looks for a witness of `task` inside stage `stage`.
    pub fn find_witness(&self, task: &ExtensionTask, stage: usize) -> Result<Option<Vec<usize>>> {
        let c = &self.stages[stage];
        match task {
            ExtensionTask::Copy { b } => {
                let b = self.task_lattice(b)?;
                let pins = self.variety.spec().pinned_pairs(&b, c);
                Ok(first_embedding(&b, c, &pins).map(|e| e.map))
            }
            ExtensionTask::Extension {
                a,
                b,
                a_in_b,
                a_in_c,
            } => {
                if a_in_c.iter().any(|&x| x >= c.len()) {
                    return Ok(None);
                }
                let (a, b) = (self.task_lattice(a)?, self.task_lattice(b)?);
                let mode = self.variety.spec().embedding_mode();
                let e_ab = Embedding::new(a_in_b.clone(), mode);
                let e_ac = Embedding::new(a_in_c.clone(), mode);
                Ok(embeddings_over(&a, &b, c, &e_ab, &e_ac, Some(1))
                    .pop()
                    .map(|e| e.map))
            }
        }
    }

    /// Re-checks that a realized witness embeds `B` into its stage over `A`.
    pub fn verify_entry(&self, entry: &LedgerEntry, at_stage: usize) -> Result<()> {
        let TaskStatus::Realized { witness, .. } = &entry.status else {
            return Ok(());
        };
        let fail = |m: &str| Error::Validation {
            stage: at_stage,
            message: m.into(),
        };
        let c = self
            .stages
            .get(at_stage)
            .ok_or_else(|| fail("no such stage"))?;
        let b = match &entry.task {
            ExtensionTask::Copy { b } => b,
            ExtensionTask::Extension { b, .. } => b,
        };
        let b = self.task_lattice(b)?;
        if witness.len() != b.len() || witness.iter().any(|&x| x >= c.len()) {
            return Err(fail("witness does not fit the stage"));
        }
        if !is_total_embedding(&b, c, witness) {
            return Err(fail("witness is not an embedding"));
        }
        for (x, y) in self.variety.spec().pinned_pairs(&b, c) {
            if witness[x] != y {
                return Err(fail("witness moves a constant"));
            }
        }
        if let ExtensionTask::Extension { a_in_b, a_in_c, .. } = &entry.task {
            if a_in_b
                .iter()
                .zip(a_in_c)
                .any(|(&xb, &xc)| witness[xb] != xc)
            {
                return Err(fail("witness does not fix the base"));
            }
        }
        Ok(())
    }

    /// Checks stage validity, prefix inclusions, membership in the class and
    /// every realized witness at its own stage and at the last stage.
    pub fn verify(&self) -> Result<()> {
        let spec = self.variety.spec();
        let last = self
            .stages
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::Malformed("chain has no stages".into()))?;
        for (i, s) in self.stages.iter().enumerate() {
            let fail = |m: &str| Error::Validation {
                stage: i,
                message: m.into(),
            };
            if !spec.admits(s) {
                return Err(fail("stage is not a member of the class"));
            }
            if i > 0 {
                let prev = &self.stages[i - 1];
                let id: Vec<usize> = (0..prev.len()).collect();
                if prev.len() > s.len() || !is_total_embedding(prev, s, &id) {
                    return Err(fail("previous stage is not an initial sublattice"));
                }
                if let (Some(p), Some(q)) = (prev.consts(), s.consts()) {
                    if p != q {
                        return Err(fail("inclusion moves the constants"));
                    }
                }
            }
        }
        for e in &self.ledger {
            if let TaskStatus::Realized { stage, .. } = e.status {
                self.verify_entry(e, stage)?;
                self.verify_entry(e, last)?;
            }
        }
        Ok(())
    }
}
