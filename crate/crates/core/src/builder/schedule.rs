use std::collections::BTreeSet;

use crate::error::Result;
use crate::lattice::{automorphisms, canonical_form, find_embeddings, FinLattice, LatticeCode};
use crate::variety::VarietyTag;

use super::chain::{ExtensionTask, LedgerEntry, StageChain, TaskOrder, TaskStatus};

/// A catalog member with its code.
#[derive(Debug, Clone)]
pub struct Member {
    pub lattice: FinLattice,
    pub code: LatticeCode,
}

/// One strict extension `A ≤ B`, up to isomorphism over `A`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub b: usize,
    pub a_in_b: Vec<usize>,
}

/// Members of size at most `k` and, for each, its strict extensions of size
/// at most `k`. Embeddings `A -> B` are taken modulo automorphisms of `B`.
#[derive(Debug, Clone)]
pub struct ExtensionCatalog {
    pub k: usize,
    pub members: Vec<Member>,
    /// `extensions[i]` lists the extensions of `members[i]`.
    pub extensions: Vec<Vec<Extension>>,
}

impl ExtensionCatalog {
    pub fn new(tag: VarietyTag, k: usize) -> Result<Self> {
        let spec = tag.spec();
        let members: Vec<Member> = spec
            .catalog(k)?
            .into_iter()
            .map(|l| Member {
                code: canonical_form(&l).code,
                lattice: l,
            })
            .collect();
        let autos: Vec<Vec<Vec<usize>>> =
            members.iter().map(|m| automorphisms(&m.lattice)).collect();
        let mut extensions = Vec::with_capacity(members.len());
        for a in &members {
            let mut exts = Vec::new();
            for (bi, b) in members.iter().enumerate() {
                if b.lattice.len() <= a.lattice.len() {
                    continue;
                }
                let pins = spec.pinned_pairs(&a.lattice, &b.lattice);
                let mut reps = BTreeSet::new();
                for e in find_embeddings(&a.lattice, &b.lattice, &pins, None) {
                    let rep = autos[bi]
                        .iter()
                        .map(|s| e.map.iter().map(|&x| s[x]).collect::<Vec<_>>())
                        .min()
                        .expect("identity is an automorphism");
                    reps.insert(rep);
                }
                exts.extend(reps.into_iter().map(|a_in_b| Extension { b: bi, a_in_b }));
            }
            extensions.push(exts);
        }
        Ok(ExtensionCatalog {
            k,
            members,
            extensions,
        })
    }

    pub fn extension_count(&self) -> usize {
        self.extensions.iter().map(Vec::len).sum()
    }
}

/// Puts the tasks of every stage not yet scheduled on the ledger. Returns the
/// number of tasks added.
pub fn schedule(chain: &mut StageChain, catalog: &ExtensionCatalog) -> usize {
    let mut added = 0;
    while chain.scheduled < chain.len() {
        let n = chain.scheduled;
        added += schedule_stage(chain, catalog, n);
    }
    added
}

/// Schedules stage `n`: copy tasks for members not yet
/// embedded, then one extension task per (copy of `A` using an element new to
/// `C_n`, extension of `A`). Tasks already on the ledger are skipped.
pub fn schedule_stage(chain: &mut StageChain, catalog: &ExtensionCatalog, n: usize) -> usize {
    let spec = chain.variety.spec();
    let c = chain.stage(n).clone();
    let fresh_from = if n == 0 { 0 } else { chain.stage(n - 1).len() };
    let mut batch = Vec::new();
    for m in &catalog.members {
        let task = ExtensionTask::Copy { b: m.code.clone() };
        if chain.keys.contains(&task) {
            continue;
        }
        let pins = spec.pinned_pairs(&m.lattice, &c);
        if find_embeddings(&m.lattice, &c, &pins, Some(1)).is_empty() {
            batch.push(task);
        }
    }
    for (ai, a) in catalog.members.iter().enumerate() {
        if catalog.extensions[ai].is_empty() {
            continue;
        }
        let pins = spec.pinned_pairs(&a.lattice, &c);
        let mut images = BTreeSet::new();
        for e in find_embeddings(&a.lattice, &c, &pins, None) {
            if !e.map.iter().any(|&x| x >= fresh_from) {
                continue;
            }
            let mut img = e.map.clone();
            img.sort_unstable();
            // embeddings arrive in lexicographic order, so the first one per
            // image is the canonical choice
            if !images.insert(img) {
                continue;
            }
            for ext in &catalog.extensions[ai] {
                batch.push(ExtensionTask::Extension {
                    a: a.code.clone(),
                    b: catalog.members[ext.b].code.clone(),
                    a_in_b: ext.a_in_b.clone(),
                    a_in_c: e.map.clone(),
                });
            }
        }
    }
    if chain.meta.order == TaskOrder::Reverse {
        batch.reverse();
    }
    let mut added = 0;
    for task in batch {
        if chain.keys.insert(task.clone()) {
            chain.ledger.push(LedgerEntry {
                task,
                discovered: n,
                status: TaskStatus::Pending,
            });
            added += 1;
        }
    }
    if n == chain.scheduled {
        chain.scheduled += 1;
    }
    added
}
