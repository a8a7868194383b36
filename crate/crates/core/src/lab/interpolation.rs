//! Bounded search for lattice polynomials interpolating a monotone function
//! on a finite sublattice of a stage.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::builder::StageChain;
use crate::error::{Error, Result};
use crate::lattice::FinLattice;

pub const DEFAULT_MAX_DEPTH: usize = 3;
/// Cap on distinct value vectors kept per search.
pub const DEFAULT_MAX_VECTORS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Var(usize),
    /// A constant, given by its id in the chain.
    Const(usize),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
}

impl Term {
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Join(s, t) | Term::Meet(s, t) => 1 + s.depth().max(t.depth()),
        }
    }

    pub fn eval(&self, l: &FinLattice, args: &[usize]) -> usize {
        match self {
            Term::Var(i) => args[*i],
            Term::Const(c) => *c,
            Term::Join(s, t) => l.join(s.eval(l, args), t.eval(l, args)),
            Term::Meet(s, t) => l.meet(s.eval(l, args), t.eval(l, args)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Const(c) => write!(f, "c{c}"),
            Term::Join(s, t) => write!(f, "({s} ∨ {t})"),
            Term::Meet(s, t) => write!(f, "({s} ∧ {t})"),
        }
    }
}

/// A function `A^m -> L` given by its values on the tuples of `domain^m` in
/// lexicographic order (the last coordinate varies fastest).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneTable {
    pub domain: Vec<usize>,
    pub arity: usize,
    pub values: Vec<usize>,
}

impl MonotoneTable {
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..self.arity {
            out = out
                .into_iter()
                .flat_map(|t| {
                    self.domain
                        .iter()
                        .map(move |&d| [t.clone(), vec![d]].concat())
                })
                .collect();
        }
        out
    }

    /// Checks the shape and monotonicity in `l`.
    pub fn check(&self, l: &FinLattice) -> Result<()> {
        let tuples = self.tuples();
        if tuples.len() != self.values.len() {
            return Err(Error::TableShape {
                expected: tuples.len(),
                got: self.values.len(),
            });
        }
        if let Some(&x) = self
            .domain
            .iter()
            .chain(&self.values)
            .find(|&&x| x >= l.len())
        {
            return Err(Error::IdOutOfRange { id: x, n: l.len() });
        }
        for (u, fu) in tuples.iter().zip(&self.values) {
            for (v, fv) in tuples.iter().zip(&self.values) {
                if u.iter().zip(v).all(|(&a, &b)| l.leq(a, b)) && !l.leq(*fu, *fv) {
                    return Err(Error::MonotonicityViolation {
                        lesser: u.clone(),
                        greater: v.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Interpolation {
    Found { stage: usize, term: Term },
    NotFoundWithinBudget,
}

/// Searches the stages below `horizon`, earliest first, for a polynomial of
/// depth at most `max_depth` with constants from the stage that agrees with
/// `f` on every tuple. Within a stage, terms are explored breadth first over
/// their value vectors, so the first hit has minimal depth.
pub fn monotone_interpolation_search(
    chain: &StageChain,
    f: &MonotoneTable,
    horizon: usize,
    max_depth: usize,
) -> Result<Interpolation> {
    f.check(chain.last())?;
    let needed = f.domain.iter().chain(&f.values).copied().max().unwrap_or(0);
    let first = chain
        .stage_of(needed)
        .expect("checked against the last stage");
    for s in first..horizon.min(chain.len()) {
        if let Some(term) = search_stage(chain.stage(s), f, max_depth, DEFAULT_MAX_VECTORS) {
            return Ok(Interpolation::Found { stage: s, term });
        }
    }
    Ok(Interpolation::NotFoundWithinBudget)
}

type Vector = Vec<u16>;

fn search_stage(
    l: &FinLattice,
    f: &MonotoneTable,
    max_depth: usize,
    max_vectors: usize,
) -> Option<Term> {
    let tuples = f.tuples();
    let target: Vector = f.values.iter().map(|&v| v as u16).collect();
    let mut terms: Vec<Term> = Vec::new();
    let mut vectors: Vec<Vector> = Vec::new();
    let mut index: HashMap<Vector, usize> = HashMap::new();
    let mut add = |t: Term, v: Vector, terms: &mut Vec<Term>, vectors: &mut Vec<Vector>| {
        if !index.contains_key(&v) {
            index.insert(v.clone(), terms.len());
            terms.push(t);
            vectors.push(v);
        }
    };
    for i in 0..f.arity {
        add(
            Term::Var(i),
            tuples.iter().map(|t| t[i] as u16).collect(),
            &mut terms,
            &mut vectors,
        );
    }
    for c in 0..l.len() {
        add(
            Term::Const(c),
            vec![c as u16; tuples.len()],
            &mut terms,
            &mut vectors,
        );
    }
    let hit = |vectors: &[Vector]| vectors.iter().position(|v| *v == target);
    if let Some(i) = hit(&vectors) {
        return Some(terms[i].clone());
    }
    let join = |u: &Vector, v: &Vector| -> Vector {
        u.iter()
            .zip(v)
            .map(|(&a, &b)| l.join(a as usize, b as usize) as u16)
            .collect()
    };
    let meet = |u: &Vector, v: &Vector| -> Vector {
        u.iter()
            .zip(v)
            .map(|(&a, &b)| l.meet(a as usize, b as usize) as u16)
            .collect()
    };
    let below = |u: &Vector, v: &Vector| {
        u.iter()
            .zip(v)
            .all(|(&a, &b)| l.leq(a as usize, b as usize))
    };
    let mut level_start = 0;
    for depth in 1..=max_depth {
        let known = vectors.len();
        if depth == max_depth {
            // only combinations producing the target matter now
            let lower: Vec<usize> = (0..known)
                .filter(|&i| below(&vectors[i], &target))
                .collect();
            let upper: Vec<usize> = (0..known)
                .filter(|&i| below(&target, &vectors[i]))
                .collect();
            for (set, is_join) in [(&lower, true), (&upper, false)] {
                for (x, &i) in set.iter().enumerate() {
                    for &j in &set[x..] {
                        if i < level_start && j < level_start {
                            continue;
                        }
                        let v = if is_join {
                            join(&vectors[i], &vectors[j])
                        } else {
                            meet(&vectors[i], &vectors[j])
                        };
                        if v == target {
                            let (s, t) = (Box::new(terms[i].clone()), Box::new(terms[j].clone()));
                            return Some(if is_join {
                                Term::Join(s, t)
                            } else {
                                Term::Meet(s, t)
                            });
                        }
                    }
                }
            }
            return None;
        }
        for i in 0..known {
            for j in i.max(level_start)..known {
                for is_join in [true, false] {
                    let v = if is_join {
                        join(&vectors[i], &vectors[j])
                    } else {
                        meet(&vectors[i], &vectors[j])
                    };
                    if v == target {
                        let (s, t) = (Box::new(terms[i].clone()), Box::new(terms[j].clone()));
                        return Some(if is_join {
                            Term::Join(s, t)
                        } else {
                            Term::Meet(s, t)
                        });
                    }
                    let t = if is_join {
                        Term::Join(Box::new(terms[i].clone()), Box::new(terms[j].clone()))
                    } else {
                        Term::Meet(Box::new(terms[i].clone()), Box::new(terms[j].clone()))
                    };
                    add(t, v, &mut terms, &mut vectors);
                    if vectors.len() >= max_vectors {
                        return None;
                    }
                }
            }
        }
        level_start = known;
    }
    None
}
