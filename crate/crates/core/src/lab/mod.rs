//! Finite witnesses for properties of the limit: topology of the space of
//! algebras on ℕ, congruences, interpolation and structural probes.

mod congruence;
mod interpolation;
mod shadows;
mod topology;

pub use congruence::{generated_congruence, principal_congruence, Congruence};
pub use interpolation::{
    monotone_interpolation_search, Interpolation, MonotoneTable, Term, DEFAULT_MAX_DEPTH,
};
pub use shadows::{
    constants_seed, find_n5_m3, interval_back_and_forth, simplicity_collapse_witness, Collapse,
    N5M3,
};
pub use topology::{
    density_witness_lk, density_witness_uab, metric_d, neighborhood_contains, Dyadic,
    LabeledLattice, LabeledPartial, TablePrefix, UabWitness,
};
