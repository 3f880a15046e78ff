use std::fmt;

use crate::error::{Error, Result};

/// A bijection of `0..n`, stored as the image table `j -> sigma(j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for (j, &s) in images.iter().enumerate() {
            if s >= n {
                return Err(Error::NotPermutation {
                    len: n,
                    detail: format!("image of {j} is {s}"),
                });
            }
            if seen[s] {
                return Err(Error::NotPermutation {
                    len: n,
                    detail: format!("{s} is hit twice"),
                });
            }
            seen[s] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// `j -> j - shift (mod n)`. `shift = 1` is the cyclic operator of the DFT construction.
    pub fn cyclic_shift(n: usize, shift: i64) -> Self {
        let m = n as i64;
        Self((0..m).map(|j| (j - shift).rem_euclid(m) as usize).collect())
    }

    /// Build from disjoint cycles written as forward orbits `a -> b -> c -> a`.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<Option<usize>> = vec![None; n];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                if a >= n || b >= n || images[a].is_some() {
                    return Err(Error::NotPermutation {
                        len: n,
                        detail: format!("cycle {cycle:?} is not disjoint or out of range"),
                    });
                }
                images[a] = Some(b);
            }
        }
        Self::new(
            images
                .into_iter()
                .enumerate()
                .map(|(j, s)| s.unwrap_or(j))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, j: usize) -> usize {
        self.0[j]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (j, &s) in self.0.iter().enumerate() {
            inv[s] = j;
        }
        Self(inv)
    }

    /// `(self o other)(j) = self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(j, &s)| j == s)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![1, 0]).is_ok());
    }

    #[test]
    fn cyclic_shift_moves_labels_down() {
        let p = Permutation::cyclic_shift(4, 1);
        assert_eq!(p.images(), &[3, 0, 1, 2]);
        assert!(p.compose(&Permutation::cyclic_shift(4, -1)).is_identity());
    }

    #[test]
    fn from_cycles_round_trip() {
        let p = Permutation::from_cycles(5, &[vec![0, 2, 1], vec![3, 4]]).unwrap();
        assert_eq!(p.images(), &[2, 0, 1, 4, 3]);
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(Permutation::from_cycles(3, &[vec![0, 1], vec![1, 2]]).is_err());
    }
}
