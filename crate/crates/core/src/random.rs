//! Seeded random test inputs: Haar unitaries, Hermitian generators, sector states.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fock::{FockState, MixedState, ModeLayout, OccupationVector};
use crate::linops::{CMatrix, ModeUnitary};
use crate::metrology::OneBodyGenerator;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed `dim x dim` unitary (QR of a Ginibre matrix with the phase fix on `R`).
pub fn haar_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let z = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar unitary on the spatial modes, lifted as `M (x) I_d`.
pub fn haar_spatial<R: Rng + ?Sized>(rng: &mut R, layout: ModeLayout) -> Result<ModeUnitary> {
    ModeUnitary::from_spatial(layout, haar_matrix(rng, layout.spatial))
}

/// Haar unitary on all `n d` modes.
pub fn haar_general<R: Rng + ?Sized>(rng: &mut R, layout: ModeLayout) -> Result<ModeUnitary> {
    ModeUnitary::general(layout, haar_matrix(rng, layout.modes()))
}

/// Hermitian matrix with Gaussian entries, scaled by `scale`.
pub fn hermitian_generator<R: Rng + ?Sized>(
    rng: &mut R,
    layout: ModeLayout,
    scale: f64,
) -> Result<OneBodyGenerator> {
    let dim = layout.modes();
    let z = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let h = (&z + z.adjoint()) * Complex64::new(0.5 * scale, 0.0);
    OneBodyGenerator::new(layout, h)
}

/// All occupation vectors of `photons` particles in `modes` modes, lexicographic.
pub fn sector_keys(modes: usize, photons: u32) -> Vec<OccupationVector> {
    fn fill(prefix: &mut Vec<u32>, left: u32, modes: usize, out: &mut Vec<OccupationVector>) {
        if prefix.len() + 1 == modes {
            prefix.push(left);
            out.push(OccupationVector::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            fill(prefix, left - c, modes, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if modes > 0 {
        fill(&mut Vec::with_capacity(modes), photons, modes, &mut out);
    }
    out
}

/// Normalized state with Gaussian amplitudes on every key of the `photons` sector.
pub fn sector_state<R: Rng + ?Sized>(
    rng: &mut R,
    layout: ModeLayout,
    photons: u32,
) -> Result<FockState> {
    let terms: Vec<_> = sector_keys(layout.modes(), photons)
        .into_iter()
        .map(|k| (k, gaussian(rng)))
        .collect();
    FockState::from_terms(layout, terms)?.normalize()
}

/// Normalized state supported on `terms` random keys of the `photons` sector.
pub fn sparse_sector_state<R: Rng + ?Sized>(
    rng: &mut R,
    layout: ModeLayout,
    photons: u32,
    terms: usize,
) -> Result<FockState> {
    let keys = sector_keys(layout.modes(), photons);
    let picked: Vec<_> = (0..terms)
        .map(|_| (keys[rng.random_range(0..keys.len())].clone(), gaussian(rng)))
        .collect();
    FockState::from_terms(layout, picked)?.normalize()
}

/// Mixture of `components` random sector states with random weights.
pub fn sector_mixture<R: Rng + ?Sized>(
    rng: &mut R,
    layout: ModeLayout,
    photons: u32,
    components: usize,
) -> Result<MixedState> {
    let raw: Vec<f64> = (0..components).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let parts = raw
        .into_iter()
        .map(|w| Ok((w / total, sector_state(rng, layout, photons)?)))
        .collect::<Result<Vec<_>>>()?;
    MixedState::new(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::unitarity_defect;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary_and_seeded() {
        let a = haar_matrix(&mut ChaCha8Rng::seed_from_u64(3), 5);
        let b = haar_matrix(&mut ChaCha8Rng::seed_from_u64(3), 5);
        assert!(unitarity_defect(&a) < 1e-13);
        assert_eq!(a, b);
    }

    #[test]
    fn sector_key_counts() {
        assert_eq!(sector_keys(4, 2).len(), 10);
        assert_eq!(sector_keys(3, 0).len(), 1);
        let s = sector_state(&mut ChaCha8Rng::seed_from_u64(1), ModeLayout::new(2, 2), 3).unwrap();
        assert!(s.is_normalized());
        assert_eq!(s.len(), 20);
    }
}
