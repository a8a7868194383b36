//! Staged construction of the limit chain and finite checks of its
//! extension, universality and uniqueness properties.

mod backforth;
mod chain;
mod checks;
mod run;
mod schedule;

pub use backforth::{
    back_and_forth, embed_locally_finite, AscendingChain, BackForthReport, BackForthStep,
    PartialIso, Side, StageView,
};
pub use chain::{ChainMeta, ExtensionTask, LedgerEntry, StageChain, TaskOrder, TaskStatus};
pub use checks::{check_u1, check_u1_at, check_u2_u3, U1Pair, U1Report, U2U3Report};
pub use run::{
    run_builder, run_with, BuildConfig, BuildReport, BuildStatus, DEFAULT_K, DEFAULT_STAGE_CAP,
};
pub use schedule::{schedule, schedule_stage, Extension, ExtensionCatalog, Member};

pub(crate) use checks::first_stage;

/// Back-and-forth between two chains, starting from `seed`.
pub fn back_and_forth_chains(
    a: &StageChain,
    b: &StageChain,
    seed: &PartialIso,
    rounds: usize,
) -> crate::Result<BackForthReport> {
    back_and_forth(
        &StageView::of_chain(a),
        &StageView::of_chain(b),
        seed,
        rounds,
    )
}
