//! Chain archives: pretty JSON with sorted keys, integer-only values and LF
//! line endings, so equal chains give equal bytes.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::amalgamation::AmalgamStrategy;
use crate::builder::{ChainMeta, LedgerEntry, StageChain, TaskOrder};
use crate::error::{Error, Result};
use crate::lattice::FinLattice;
use crate::variety::VarietyTag;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageRecord {
    pub n: usize,
    pub covers: Vec<(usize, usize)>,
    pub join: Vec<Vec<usize>>,
    pub meet: Vec<Vec<usize>>,
    pub consts: Option<(usize, usize)>,
}

impl StageRecord {
    pub fn of(l: &FinLattice) -> Self {
        let rows = |t: &[u16]| {
            t.chunks(l.len().max(1))
                .map(|r| r.iter().map(|&v| v as usize).collect())
                .collect()
        };
        StageRecord {
            n: l.len(),
            covers: l.order().covers().to_vec(),
            join: rows(l.join_table()),
            meet: rows(l.meet_table()),
            consts: l.consts(),
        }
    }

    /// Re-validates the tables and checks the stored covers against them.
    pub fn to_lattice(&self, stage: usize) -> Result<FinLattice> {
        let fail = |message: String| Error::Validation { stage, message };
        if self.join.len() != self.n || self.meet.len() != self.n {
            return Err(fail(format!("expected {} table rows", self.n)));
        }
        let join: Vec<usize> = self.join.concat();
        let meet: Vec<usize> = self.meet.concat();
        let l = FinLattice::from_tables(self.n, &join, &meet, self.consts)
            .map_err(|e| fail(e.to_string()))?;
        if l.order().covers() != self.covers.as_slice() {
            return Err(fail("stored covers disagree with the tables".into()));
        }
        Ok(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchiveMeta {
    /// Tie-break policy: the order in which a scheduled batch joins the queue.
    pub tie_break: TaskOrder,
    pub prune: bool,
    pub strategy: AmalgamStrategy,
    pub stage_cap: usize,
    pub scheduled: usize,
    /// SHA-256 of each stage, see [`stage_checksum`].
    pub checksums: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainArchive {
    pub format: u32,
    pub variety: VarietyTag,
    pub k: usize,
    pub budget: usize,
    pub stages: Vec<StageRecord>,
    pub ledger: Vec<LedgerEntry>,
    pub meta: ArchiveMeta,
}

impl ChainArchive {
    pub fn of(chain: &StageChain) -> Self {
        ChainArchive {
            format: FORMAT_VERSION,
            variety: chain.variety,
            k: chain.k,
            budget: chain.meta.budget,
            stages: chain.stages.iter().map(StageRecord::of).collect(),
            ledger: chain.ledger.clone(),
            meta: ArchiveMeta {
                tie_break: chain.meta.order,
                prune: chain.meta.prune,
                strategy: chain.meta.strategy,
                stage_cap: chain.meta.stage_cap,
                scheduled: chain.scheduled,
                checksums: chain.stages.iter().map(stage_checksum).collect(),
            },
        }
    }

    /// Validates every stage, the checksums and the chain itself.
    pub fn into_chain(self) -> Result<StageChain> {
        if self.format != FORMAT_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported archive format {}",
                self.format
            )));
        }
        if self.meta.checksums.len() != self.stages.len() {
            return Err(Error::Malformed("one checksum per stage expected".into()));
        }
        let mut stages = Vec::with_capacity(self.stages.len());
        for (i, (rec, sum)) in self.stages.iter().zip(&self.meta.checksums).enumerate() {
            let l = rec.to_lattice(i)?;
            if stage_checksum(&l) != *sum {
                return Err(Error::Validation {
                    stage: i,
                    message: "checksum mismatch".into(),
                });
            }
            stages.push(l);
        }
        let meta = ChainMeta {
            budget: self.budget,
            stage_cap: self.meta.stage_cap,
            order: self.meta.tie_break,
            prune: self.meta.prune,
            strategy: self.meta.strategy,
        };
        StageChain::from_parts(
            self.variety,
            self.k,
            stages,
            self.ledger,
            self.meta.scheduled,
            meta,
        )
    }
}

/// Hex SHA-256 over the size, both tables (u16 little endian) and the constants.
pub fn stage_checksum(l: &FinLattice) -> String {
    let mut h = Sha256::new();
    h.update((l.len() as u64).to_le_bytes());
    for t in [l.join_table(), l.meet_table()] {
        for v in t {
            h.update(v.to_le_bytes());
        }
    }
    match l.consts() {
        Some((z, o)) => {
            h.update([1]);
            h.update((z as u64).to_le_bytes());
            h.update((o as u64).to_le_bytes());
        }
        None => h.update([0]),
    }
    hex::encode(h.finalize())
}

pub fn serialize_chain(chain: &StageChain) -> String {
    let v = serde_json::to_value(ChainArchive::of(chain)).expect("archives are plain data");
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    out
}

pub fn deserialize_chain(text: &str) -> Result<StageChain> {
    let a: ChainArchive =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("archive: {e}")))?;
    a.into_chain()
}

/// Pretty printer with sorted keys that keeps arrays of scalars on one line.
fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Object(m) if !m.is_empty() => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(&m[*k], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(a) if !a.is_empty() && a.iter().any(|x| x.is_array() || x.is_object()) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Array(a) => {
            let items: Vec<String> = a.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&items.join(", "));
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}
