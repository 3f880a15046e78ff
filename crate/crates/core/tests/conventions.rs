//! Frozen sign and ordering conventions. A change here changes published numbers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use homsym_core::detection;
use homsym_core::linops::{dft_matrix, permutation_matrix, CMatrix};
use homsym_core::metrology::{self, OneBodyGenerator};
use homsym_core::oracle::{self, DenseSectorBasis};
use homsym_core::symmetry;
use homsym_core::{Complex64, FockState, ModeLayout, ModeUnitary, OccupationVector, Permutation};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn key(counts: &[u32]) -> OccupationVector {
    OccupationVector::new(counts.to_vec())
}

#[test]
fn evolution_uses_exp_of_plus_i_kappa_h_on_columns() {
    let layout = ModeLayout::new(2, 1);
    // h = [[0, i], [-i, 0]]; a transposed exponential would flip the sign below
    let h = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]);
    let g = OneBodyGenerator::new(layout, h.clone()).unwrap();
    let input = FockState::basis_state(layout, key(&[1, 0])).unwrap();
    let kappa = 0.3;
    let out = metrology::evolve(&input, &g, kappa).unwrap();
    assert!((out.amplitude(&key(&[1, 0])) - c(kappa.cos(), 0.0)).norm() < 1e-14);
    assert!((out.amplitude(&key(&[0, 1])) - c(kappa.sin(), 0.0)).norm() < 1e-14);

    let basis = DenseSectorBasis::sector(layout, 1).unwrap();
    let dense = oracle::dense_expm(&oracle::embed_generator(&h, &basis).unwrap(), kappa)
        * oracle::to_dense(&input, &basis).unwrap();
    let fast = oracle::to_dense(&out, &basis).unwrap();
    assert!((dense - fast).norm() < 1e-14);
}

#[test]
fn two_photon_evolution_matches_dense_reference() {
    let layout = ModeLayout::new(2, 2);
    let h = CMatrix::from_fn(4, 4, |r, col| {
        let base = c((r + 2 * col) as f64 * 0.1, (r as f64 - col as f64) * 0.2);
        if r == col {
            c(base.re, 0.0)
        } else {
            base
        }
    });
    let h = (&h + h.adjoint()) * c(0.5, 0.0);
    let g = OneBodyGenerator::new(layout, h.clone()).unwrap();
    let input = FockState::basis_state(layout, key(&[1, 0, 0, 1])).unwrap();
    let out = metrology::evolve(&input, &g, 0.7).unwrap();
    let basis = DenseSectorBasis::sector(layout, 2).unwrap();
    let dense = oracle::dense_expm(&oracle::embed_generator(&h, &basis).unwrap(), 0.7)
        * oracle::to_dense(&input, &basis).unwrap();
    assert!((dense - oracle::to_dense(&out, &basis).unwrap()).norm() < 1e-12);
}

#[test]
fn cyclic_shift_lowers_spatial_labels() {
    let layout = ModeLayout::new(3, 1);
    let s = FockState::basis_state(layout, key(&[0, 1, 2])).unwrap();
    let shifted = symmetry::cyclic_power(&s, 1);
    // a_j^dag -> a_{j-1}^dag
    assert_eq!(shifted.amplitude(&key(&[1, 2, 0])), c(1.0, 0.0));
    let p = permutation_matrix(&Permutation::cyclic_shift(3, 1));
    assert_eq!(p[(0, 1)], c(1.0, 0.0));
    assert_eq!(p[(2, 0)], c(1.0, 0.0));
}

#[test]
fn dft_sign_and_diagonal_phase() {
    let u = dft_matrix(4);
    let w = Complex64::from_polar(1.0, 2.0 * PI / 4.0);
    assert!((u[(1, 1)] - w * 0.5).norm() < 1e-15);
    let d = ModeUnitary::diagonal_phase(ModeLayout::new(4, 1)).unwrap();
    assert!((d.matrix()[(1, 1)] - w).norm() < 1e-15);
}

#[test]
fn residue_sign_is_minus_j() {
    // a single photon in mode 1 behind the DFT: sum k m_k is uniform, weights uniform
    let layout = ModeLayout::new(3, 1);
    let s = FockState::basis_state(layout, key(&[0, 1, 0])).unwrap();
    for p in detection::modular_sum_probabilities(&s).unwrap() {
        assert!(p.discrepancy() < 1e-14);
    }
    // a P eigenstate with eigenvalue omega^1 lands on sum k m_k = -1 = 2 (mod 3)
    let plane: Vec<FockState> = (0..3)
        .map(|j| {
            let mut counts = vec![0; 3];
            counts[j] = 1;
            FockState::basis_state(layout, counts.into()).unwrap()
        })
        .collect();
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let coeffs: Vec<Complex64> = (0..3).map(|j| w.powu(j as u32) / 3f64.sqrt()).collect();
    let terms: Vec<(Complex64, &FockState)> = coeffs.iter().copied().zip(plane.iter()).collect();
    let eigen = FockState::superpose(&terms).unwrap();
    assert_eq!(symmetry::cyclic_eigenvalue(&eigen, 1e-12), Some(1));
    let probs = detection::modular_sum_probabilities(&eigen).unwrap();
    assert!((probs[1].detection - 1.0).abs() < 1e-12);
    let dist = detection::output_distribution(&eigen, &ModeUnitary::dft(layout).unwrap()).unwrap();
    assert!((dist.weighted_sum_probability(2) - 1.0).abs() < 1e-12);
}

#[test]
fn hadamard_splitter_form() {
    let layout = ModeLayout::new(2, 1);
    let bs = ModeUnitary::beam_splitter(layout, 0.0, 0.0, 0.0).unwrap();
    let h = ModeUnitary::hadamard(layout).unwrap();
    assert!(bs.max_abs_diff(&h) < 1e-16);
    assert!((h.matrix()[(1, 1)] - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
    for &(t, p, tau) in &[(0.0, PI / 2.0, 0.0), (1.0, 2.0, 3.0)] {
        let m = ModeUnitary::beam_splitter(layout, t, p, tau).unwrap();
        for z in m.matrix().iter() {
            assert!((z.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }
}
