//! Archives, graph export and the JSON/TOML file formats used by the CLI.

pub mod archive;
pub mod dot;
pub mod files;

pub use archive::{
    deserialize_chain, serialize_chain, stage_checksum, ChainArchive, StageRecord, FORMAT_VERSION,
};
pub use dot::export_hasse;
pub use files::{LatticeFile, PartialLatticeFile};
