use serde::{Deserialize, Serialize};

use crate::amalgamation::AmalgamOptions;
use crate::error::Result;
use crate::lattice::{Embedding, FinLattice};
use crate::variety::VarietyTag;

use super::chain::{ChainMeta, ExtensionTask, StageChain, TaskOrder, TaskStatus};
use super::schedule::{schedule_stage, ExtensionCatalog};

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_STAGE_CAP: usize = 200;

#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub variety: VarietyTag,
    /// Size bound for task lattices.
    pub k: usize,
    /// Maximum number of stages.
    pub budget: usize,
    /// Largest admissible stage.
    pub stage_cap: usize,
    pub order: TaskOrder,
    pub amalgam: AmalgamOptions,
    /// First stage; the class's initial object when `None`.
    pub initial: Option<FinLattice>,
}

impl BuildConfig {
    pub fn new(variety: VarietyTag, k: usize, budget: usize) -> Self {
        BuildConfig {
            variety,
            k,
            budget,
            stage_cap: DEFAULT_STAGE_CAP,
            order: TaskOrder::Forward,
            amalgam: AmalgamOptions::default(),
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildStatus {
    /// All stages of the budget were built; tasks may still be pending.
    BudgetExhausted,
    /// The next amalgam would have exceeded the stage cap.
    StageCapReached,
    /// No task is left (only possible for tiny `k`).
    Completed,
}

#[derive(Debug, Clone)]
pub struct BuildReport {
    pub chain: StageChain,
    pub status: BuildStatus,
    /// Tasks found already realized when they reached the head of the queue.
    pub realized_in_place: usize,
    /// Tasks discharged by a new stage.
    pub discharged: usize,
}

/// Builds a chain with the default configuration.
pub fn run_builder(variety: VarietyTag, k: usize, budget: usize) -> Result<BuildReport> {
    run_with(&BuildConfig::new(variety, k, budget))
}

/// FIFO construction: repeatedly take the oldest pending task, mark it
/// realized if the newest stage already contains a witness, and otherwise
/// amalgamate the newest stage with the task lattice to get the next stage.
/// A stage's tasks are put on the ledger only once every earlier task has
/// been handled, which yields the same order as scheduling eagerly.
pub fn run_with(cfg: &BuildConfig) -> Result<BuildReport> {
    let spec = cfg.variety.spec();
    let catalog = ExtensionCatalog::new(cfg.variety, cfg.k)?;
    let meta = ChainMeta {
        budget: cfg.budget,
        stage_cap: cfg.stage_cap,
        order: cfg.order,
        prune: cfg.amalgam.prune,
        strategy: cfg.amalgam.strategy,
    };
    let initial = cfg.initial.clone().unwrap_or_else(|| spec.initial());
    let mut chain = StageChain::new(cfg.variety, initial, cfg.k, meta)?;
    let (mut realized_in_place, mut discharged) = (0, 0);
    let mut cursor = 0;
    let status = loop {
        while cursor < chain.ledger.len() && chain.ledger[cursor].status != TaskStatus::Pending {
            cursor += 1;
        }
        if cursor == chain.ledger.len() {
            if chain.scheduled < chain.len() {
                let n = chain.scheduled;
                schedule_stage(&mut chain, &catalog, n);
                continue;
            }
            break BuildStatus::Completed;
        }
        let last = chain.len() - 1;
        let task = chain.ledger[cursor].task.clone();
        if let Some(witness) = chain.find_witness(&task, last)? {
            let stage = chain
                .stage_of_all(&witness)
                .unwrap_or(last)
                .max(chain.ledger[cursor].discovered);
            chain.ledger[cursor].status = TaskStatus::Realized { stage, witness };
            realized_in_place += 1;
            continue;
        }
        if chain.len() >= cfg.budget {
            break BuildStatus::BudgetExhausted;
        }
        let (d, witness) = discharge(&chain, &task, cfg.amalgam)?;
        if d.len() > cfg.stage_cap {
            break BuildStatus::StageCapReached;
        }
        chain.stages.push(d);
        chain.ledger[cursor].status = TaskStatus::Realized {
            stage: last + 1,
            witness: witness.map,
        };
        discharged += 1;
    };
    Ok(BuildReport {
        chain,
        status,
        realized_in_place,
        discharged,
    })
}

/// The next stage realizing `task`, with the witness for `B`.
fn discharge(
    chain: &StageChain,
    task: &ExtensionTask,
    opts: AmalgamOptions,
) -> Result<(FinLattice, Embedding)> {
    let spec = chain.variety.spec();
    let c = chain.last();
    match task {
        ExtensionTask::Copy { b } => {
            let b = chain.task_lattice(b)?;
            let j = spec.joint_embed(c, &b, opts)?;
            Ok((j.c, j.e2))
        }
        ExtensionTask::Extension {
            a,
            b,
            a_in_b,
            a_in_c,
        } => {
            let (a, b) = (chain.task_lattice(a)?, chain.task_lattice(b)?);
            let mode = spec.embedding_mode();
            let f1 = Embedding::new(a_in_c.clone(), mode);
            let f2 = Embedding::new(a_in_b.clone(), mode);
            let r = spec.amalgamate_with_inclusion(&a, c, &b, &f1, &f2, opts)?;
            Ok((r.d, r.b2_prime))
        }
    }
}
