//! Finite posets, lattices, partial lattices, embeddings and canonical forms.

pub mod canonical;
pub mod embedding;
pub mod poset;
pub mod search;
pub mod table;

pub use canonical::{canonical_copy, canonical_form, poset_code, CanonicalForm, LatticeCode};
pub use embedding::{
    is_total_embedding, subalgebra_mode, Embedding, EmbeddingMode, SubalgebraMode,
};
pub use poset::Poset;
pub use search::{automorphisms, embeddings_over, find_embeddings, first_embedding};
pub use table::{partial_ops, validate_lattice, FinLattice, PartialLattice, MAX_ELEMENTS};
