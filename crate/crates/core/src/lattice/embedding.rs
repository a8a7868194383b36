use serde::{Deserialize, Serialize};

use super::table::{FinLattice, PartialLattice};
use crate::error::{Error, Op, Result};

/// What an embedding is certified to preserve, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMode {
    Weak,
    Relative,
    Total,
    Total01,
}

/// Outcome of classifying an injective map between partial lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SubalgebraMode {
    NotWeak,
    WeakOnly,
    Relative,
}

/// An injective map on element ids plus the mode it certifies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<usize>,
    pub mode: EmbeddingMode,
}

impl Embedding {
    pub fn new(map: Vec<usize>, mode: EmbeddingMode) -> Self {
        Embedding { map, mode }
    }

    pub fn identity(n: usize, mode: EmbeddingMode) -> Self {
        Embedding {
            map: (0..n).collect(),
            mode,
        }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `next ∘ self`; the mode is the weaker of the two.
    pub fn then(&self, next: &Embedding) -> Embedding {
        Embedding {
            map: self.map.iter().map(|&x| next.map[x]).collect(),
            mode: self.mode.min(next.mode),
        }
    }

    pub fn image(&self) -> Vec<usize> {
        let mut v = self.map.clone();
        v.sort_unstable();
        v
    }

    /// Checks that the map is an injective lattice homomorphism `src -> dst`,
    /// and that constants are preserved when the mode is `Total01`.
    pub fn check_total(&self, src: &FinLattice, dst: &FinLattice) -> Result<()> {
        check_injective(&self.map, src.len(), dst.len())?;
        if let Some((a, b, op)) = first_total_failure(src, dst, &self.map) {
            return Err(Error::NotASublattice(format!(
                "{op}({a}, {b}) is not preserved"
            )));
        }
        if self.mode == EmbeddingMode::Total01 {
            match (src.consts(), dst.consts()) {
                (Some((z, o)), Some((z2, o2))) if self.map[z] == z2 && self.map[o] == o2 => {}
                _ => return Err(Error::ConstantsClash),
            }
        }
        Ok(())
    }
}

pub(crate) fn check_injective(map: &[usize], src_n: usize, dst_n: usize) -> Result<()> {
    if map.len() != src_n {
        return Err(Error::MapLength {
            expected: src_n,
            got: map.len(),
        });
    }
    let mut seen = vec![usize::MAX; dst_n];
    for (i, &x) in map.iter().enumerate() {
        if x >= dst_n {
            return Err(Error::IdOutOfRange { id: x, n: dst_n });
        }
        if seen[x] != usize::MAX {
            return Err(Error::NotInjective(seen[x], i));
        }
        seen[x] = i;
    }
    Ok(())
}

/// Whether `map` is an injective lattice homomorphism.
pub fn is_total_embedding(src: &FinLattice, dst: &FinLattice, map: &[usize]) -> bool {
    check_injective(map, src.len(), dst.len()).is_ok()
        && first_total_failure(src, dst, map).is_none()
}

fn first_total_failure(
    src: &FinLattice,
    dst: &FinLattice,
    map: &[usize],
) -> Option<(usize, usize, Op)> {
    for a in 0..src.len() {
        for b in a..src.len() {
            if map[src.join(a, b)] != dst.join(map[a], map[b]) {
                return Some((a, b, Op::Join));
            }
            if map[src.meet(a, b)] != dst.meet(map[a], map[b]) {
                return Some((a, b, Op::Meet));
            }
        }
    }
    None
}

/// Classifies `small` inside `host` along `map`: weak when every defined
/// operation of `small` is matched in `host`, relative when additionally every
/// host operation on image elements that lands in the image is defined in
/// `small`.
pub fn subalgebra_mode(
    small: &PartialLattice,
    host: &PartialLattice,
    map: &[usize],
) -> Result<SubalgebraMode> {
    check_injective(map, small.len(), host.len())?;
    let mut inv = vec![usize::MAX; host.len()];
    for (i, &x) in map.iter().enumerate() {
        inv[x] = i;
    }
    let mut relative = true;
    for op in [Op::Join, Op::Meet] {
        for a in 0..small.len() {
            for b in 0..small.len() {
                let h = host.op(op, map[a], map[b]);
                match small.op(op, a, b) {
                    Some(c) => {
                        if h != Some(map[c]) {
                            return Ok(SubalgebraMode::NotWeak);
                        }
                    }
                    None => {
                        if matches!(h, Some(y) if inv[y] != usize::MAX) {
                            relative = false;
                        }
                    }
                }
            }
        }
    }
    Ok(if relative {
        SubalgebraMode::Relative
    } else {
        SubalgebraMode::WeakOnly
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erased_n5_is_weak_only() {
        let n5 = FinLattice::n5();
        let small = PartialLattice::new(3);
        assert_eq!(
            subalgebra_mode(&small, &n5.to_partial(), &[0, 1, 2]).unwrap(),
            SubalgebraMode::WeakOnly
        );
    }

    #[test]
    fn erased_join_outside_image_is_still_relative() {
        // {0, a, b} with a∨b undefined: the host value 1 lies outside.
        let n5 = FinLattice::n5();
        let small = n5.restrict_relative(&[0, 1, 2]);
        assert_eq!(
            subalgebra_mode(&small, &n5.to_partial(), &[0, 1, 2]).unwrap(),
            SubalgebraMode::Relative
        );
    }

    #[test]
    fn sublattice_is_relative() {
        let n5 = FinLattice::n5();
        let small = n5.restrict_relative(&[0, 1, 4]);
        assert!(small.is_total());
        assert_eq!(
            subalgebra_mode(&small, &n5.to_partial(), &[0, 1, 4]).unwrap(),
            SubalgebraMode::Relative
        );
    }

    #[test]
    fn disagreement_is_not_weak() {
        let mut small = PartialLattice::new(2);
        small.set_join(0, 1, Some(0));
        let host = FinLattice::chain(2).to_partial();
        assert_eq!(
            subalgebra_mode(&small, &host, &[0, 1]).unwrap(),
            SubalgebraMode::NotWeak
        );
    }

    #[test]
    fn non_injective_rejected() {
        let host = FinLattice::chain(2).to_partial();
        let small = PartialLattice::new(2);
        assert_eq!(
            subalgebra_mode(&small, &host, &[1, 1]),
            Err(Error::NotInjective(0, 1))
        );
    }

    #[test]
    fn total_check() {
        let n5 = FinLattice::n5();
        let c3 = FinLattice::chain(3);
        assert!(Embedding::new(vec![0, 1, 4], EmbeddingMode::Total)
            .check_total(&c3, &n5)
            .is_ok());
        assert!(is_total_embedding(&c3, &n5, &[0, 3, 4]));
        // 0 < b < c is not a chain in N5
        assert!(!is_total_embedding(&c3, &n5, &[0, 2, 3]));
    }
}
