//! JSON inputs: lattices given by covers or by tables, and partial lattices
//! given by their defined entries and an order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{FinLattice, PartialLattice, Poset};

/// A lattice on `0..n`. Tables win over covers when both are present; the
/// covers must then agree with them.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub join: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meet: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consts: Option<(usize, usize)>,
}

impl LatticeFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("lattice file: {e}")))
    }

    /// Covers and constants only.
    pub fn of(l: &FinLattice) -> Self {
        LatticeFile {
            n: l.len(),
            covers: Some(l.order().covers().to_vec()),
            join: None,
            meet: None,
            consts: l.consts(),
        }
    }

    pub fn to_lattice(&self) -> Result<FinLattice> {
        let l = match (&self.join, &self.meet) {
            (Some(j), Some(m)) => {
                if j.len() != self.n || m.len() != self.n {
                    return Err(Error::TableShape {
                        expected: self.n,
                        got: j.len().min(m.len()),
                    });
                }
                let l = FinLattice::from_tables(self.n, &j.concat(), &m.concat(), self.consts)?;
                if let Some(c) = &self.covers {
                    let p = Poset::from_covers(self.n, c)?;
                    if p != *l.order() {
                        return Err(Error::Malformed("covers disagree with the tables".into()));
                    }
                }
                return Ok(l);
            }
            (None, None) => {
                let covers = self
                    .covers
                    .as_deref()
                    .ok_or_else(|| Error::Malformed("need covers or tables".into()))?;
                FinLattice::from_poset(&Poset::from_covers(self.n, covers)?)?
            }
            _ => {
                return Err(Error::Malformed(
                    "join and meet tables come together".into(),
                ))
            }
        };
        l.with_consts(self.consts)
    }
}

/// A partial lattice: the order by generating pairs, and the defined entries
/// as `[a, b, c]` meaning `op(a, b) = op(b, a) = c`. The order used is the one
/// generated by `order` together with the pairs each defined entry implies.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialLatticeFile {
    pub n: usize,
    pub order: Vec<(usize, usize)>,
    #[serde(default)]
    pub join: Vec<(usize, usize, usize)>,
    #[serde(default)]
    pub meet: Vec<(usize, usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consts: Option<(usize, usize)>,
}

impl PartialLatticeFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("partial lattice file: {e}")))
    }

    pub fn to_partial(&self) -> Result<PartialLattice> {
        let n = self.n;
        let mut p = PartialLattice::new(n);
        for (entries, is_join) in [(&self.join, true), (&self.meet, false)] {
            for &(a, b, c) in entries {
                if let Some(&id) = [a, b, c].iter().find(|&&x| x >= n) {
                    return Err(Error::IdOutOfRange { id, n });
                }
                if is_join {
                    p.set_join(a, b, Some(c));
                } else {
                    p.set_meet(a, b, Some(c));
                }
            }
        }
        p.set_consts(self.consts);
        let mut pairs: Vec<(usize, usize)> = self.order.clone();
        pairs.extend(self.join.iter().flat_map(|&(a, b, c)| [(a, c), (b, c)]));
        pairs.extend(self.meet.iter().flat_map(|&(a, b, c)| [(c, a), (c, b)]));
        pairs.retain(|&(x, y)| x != y);
        pairs.sort_unstable();
        pairs.dedup();
        p.with_order(Poset::from_covers(n, &pairs)?)
    }
}
