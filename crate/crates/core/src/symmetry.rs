//! Permutation symmetries of spatial modes.
//!
//! `S` exchanges the two spatial modes, `P` shifts them cyclically
//! (`a_j^dag -> a_{j-1}^dag`), and `Pi_j = (1/n) sum_l (omega^{-j} P)^l` projects
//! onto the `omega^j` eigenspace of `P`. All of these act on basis keys by integer
//! relabeling, with phases from a cached root-of-unity table, so eigenstates stay
//! eigenstates to the last bit of the amplitudes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockState, MixedState, ModeLayout, OccupationVector};
use crate::linops::{dft_matrix, CMatrix, ModeUnitary};
use crate::numeric::{
    ComplexCompensatedSum, RootsOfUnity, IMAGINARY_RESIDUE_TOLERANCE, PRUNE_THRESHOLD,
};
use crate::permutation::Permutation;

/// Apply `P_sigma` (`a_j^dag(l) -> a_{sigma(j)}^dag(l)`) by relabeling keys.
pub fn permute_spatial(state: &FockState, sigma: &Permutation) -> Result<FockState> {
    let layout = state.layout();
    if sigma.len() != layout.spatial {
        return Err(Error::NotPermutation {
            len: layout.spatial,
            detail: format!("permutation acts on {} labels", sigma.len()),
        });
    }
    let d = layout.internal;
    let terms = state.iter().map(|(key, amp)| {
        let mut counts = vec![0u32; layout.modes()];
        for j in 0..layout.spatial {
            let target = sigma.image(j);
            counts[target * d..(target + 1) * d].copy_from_slice(&key.counts()[j * d..(j + 1) * d]);
        }
        (OccupationVector::new(counts), *amp)
    });
    FockState::from_terms(layout, terms)
}

/// `P^l |psi>`.
pub fn cyclic_power(state: &FockState, l: i64) -> FockState {
    let n = state.layout().spatial;
    permute_spatial(state, &Permutation::cyclic_shift(n, l)).expect("shift matches layout")
}

/// `S |psi>` for two spatial modes.
pub fn exchange(state: &FockState) -> Result<FockState> {
    require_two(&state.layout())?;
    permute_spatial(state, &Permutation::new(vec![1, 0])?)
}

fn require_two(layout: &ModeLayout) -> Result<()> {
    if layout.spatial == 2 {
        Ok(())
    } else {
        Err(Error::SpatialModes {
            required: "exactly 2".into(),
            found: layout.spatial,
        })
    }
}

/// `<psi|P_sigma|psi>`.
pub fn permutation_expectation(state: &FockState, sigma: &Permutation) -> Result<Complex64> {
    let moved = permute_spatial(state, sigma)?;
    FockState::inner_product(state, &moved)
}

/// `<psi|S|psi>`. Real for any state; the imaginary part is checked, not dropped.
pub fn exchange_expectation(state: &FockState) -> Result<Complex64> {
    let value = FockState::inner_product(state, &exchange(state)?)?;
    assert!(
        value.im.abs() < IMAGINARY_RESIDUE_TOLERANCE,
        "exchange expectation has imaginary residue {}",
        value.im
    );
    Ok(value)
}

/// `<P^l>` for `l = 0..n`.
pub fn cyclic_expectations(state: &FockState) -> Vec<Complex64> {
    let n = state.layout().spatial;
    (0..n as i64)
        .map(|l| {
            if l == 0 {
                Complex64::new(state.norm_sqr(), 0.0)
            } else {
                FockState::inner_product(state, &cyclic_power(state, l))
                    .expect("same layout")
            }
        })
        .collect()
}

/// `(1/n) sum_l omega^{-jl} e_l` for each residue `j`, given `e_l = <P^l>` or `tr(rho P^l)`.
pub fn residue_weights_from_expectations(expectations: &[Complex64]) -> Vec<f64> {
    let n = expectations.len();
    let roots = RootsOfUnity::cached(n);
    (0..n)
        .map(|j| {
            let acc: ComplexCompensatedSum = expectations
                .iter()
                .enumerate()
                .map(|(l, e)| roots.pow(-((j * l) as i64)) * e)
                .collect();
            acc.value().re / n as f64
        })
        .collect()
}

/// `Pi_j |psi>`.
pub fn project_residue(state: &FockState, residue: usize) -> FockState {
    let layout = state.layout();
    let n = layout.spatial;
    let roots = RootsOfUnity::cached(n);
    let mut acc: BTreeMap<OccupationVector, ComplexCompensatedSum> = BTreeMap::new();
    for l in 0..n as i64 {
        let phase = roots.pow(-(residue as i64) * l) / n as f64;
        let shifted = cyclic_power(state, l);
        for (key, amp) in shifted.iter() {
            acc.entry(key.clone()).or_default().add(phase * amp);
        }
    }
    FockState::from_terms(
        layout,
        acc.into_iter()
            .map(|(k, s)| (k, s.value()))
            .filter(|(_, a)| a.norm() >= PRUNE_THRESHOLD),
    )
    .expect("keys come from the input layout")
}

/// `<Pi_j>` for every residue, as squared norms of the eigencomponents.
pub fn residue_weights(state: &FockState) -> Vec<f64> {
    (0..state.layout().spatial)
        .map(|j| project_residue(state, j).norm_sqr())
        .collect()
}

/// `(psi + S psi) / 2` and `(psi - S psi) / 2`.
pub fn decompose_exchange(state: &FockState) -> Result<(FockState, FockState)> {
    let swapped = exchange(state)?;
    let half = Complex64::new(0.5, 0.0);
    let sym = FockState::superpose(&[(half, state), (half, &swapped)])?;
    let anti = FockState::superpose(&[(half, state), (-half, &swapped)])?;
    Ok((sym, anti))
}

/// Symmetry probed by parity detection behind the general balanced beam splitter:
/// `[[0, e^{-i(theta+phi)}], [e^{i(theta+phi)}, 0]]`.
pub fn effective_symmetry(layout: ModeLayout, theta: f64, phi: f64) -> Result<ModeUnitary> {
    require_two(&layout)?;
    let zero = Complex64::new(0.0, 0.0);
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            zero,
            Complex64::from_polar(1.0, -(theta + phi)),
            Complex64::from_polar(1.0, theta + phi),
            zero,
        ],
    );
    ModeUnitary::from_spatial(layout, m)
}

/// `tr(rho P_sigma) = sum_j p_j <psi_j|P_sigma|psi_j>`.
pub fn mixed_symmetry_measure(rho: &MixedState, sigma: &Permutation) -> Result<Complex64> {
    let mut acc = ComplexCompensatedSum::new();
    for (p, state) in rho.components() {
        acc.add(permutation_expectation(state, sigma)? * *p);
    }
    Ok(acc.value())
}

/// `tr(rho P^l)` for `l = 0..n`.
pub fn mixed_cyclic_expectations(rho: &MixedState) -> Vec<Complex64> {
    let n = rho.layout().spatial;
    let mut acc = vec![ComplexCompensatedSum::new(); n];
    for (p, state) in rho.components() {
        for (slot, e) in acc.iter_mut().zip(cyclic_expectations(state)) {
            slot.add(e * *p);
        }
    }
    acc.iter().map(ComplexCompensatedSum::value).collect()
}

/// Disjoint cycles as forward orbits `a -> sigma(a) -> ...`, fixed points included,
/// ordered by smallest element.
pub fn cycle_decomposition(sigma: &Permutation) -> Vec<Vec<usize>> {
    let n = sigma.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut j = sigma.image(start);
        while j != start {
            seen[j] = true;
            cycle.push(j);
            j = sigma.image(j);
        }
        cycles.push(cycle);
    }
    cycles
}

/// `V = Q (U_1 (+) ... (+) U_k)` where `Q` lays the cycles out as consecutive
/// blocks and `U_i` is the DFT of cycle length. `V^dag P_sigma V` is diagonal.
pub fn block_dft_diagonalizer(layout: ModeLayout, sigma: &Permutation) -> Result<ModeUnitary> {
    let n = layout.spatial;
    if sigma.len() != n {
        return Err(Error::NotPermutation {
            len: n,
            detail: format!("permutation acts on {} labels", sigma.len()),
        });
    }
    let cycles = cycle_decomposition(sigma);
    let mut v = CMatrix::zeros(n, n);
    let mut offset = 0;
    for cycle in &cycles {
        let block = dft_matrix(cycle.len());
        for (a, &mode) in cycle.iter().enumerate() {
            for b in 0..cycle.len() {
                v[(mode, offset + b)] = block[(a, b)];
            }
        }
        offset += cycle.len();
    }
    ModeUnitary::from_spatial(layout, v)
}

/// `P psi = omega^k psi` within `tol` (norm of the difference), if any `k` fits.
pub fn cyclic_eigenvalue(state: &FockState, tol: f64) -> Option<usize> {
    let n = state.layout().spatial;
    let roots = RootsOfUnity::cached(n);
    let shifted = cyclic_power(state, 1);
    (0..n).find(|&k| {
        shifted
            .add_scaled(-roots.pow(k as i64), state)
            .map(|diff| diff.norm() <= tol)
            .unwrap_or(false)
    })
}

/// Symmetry summary of a state.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    /// `<P>` (equal to `<S>` when `n = 2`).
    pub expectation: Complex64,
    /// Weight of the `+1` eigenspace of `P`.
    pub symmetric_weight: f64,
    /// Weight of the `-1` eigenspace; only defined for even `n`.
    pub antisymmetric_weight: Option<f64>,
    pub residue_weights: Vec<f64>,
    pub cyclic_expectations: Vec<Complex64>,
}

impl SymmetryReport {
    pub fn from_expectations(cyclic_expectations: Vec<Complex64>, residue_weights: Vec<f64>) -> Self {
        let n = residue_weights.len();
        Self {
            expectation: cyclic_expectations[1 % n],
            symmetric_weight: residue_weights[0],
            antisymmetric_weight: n.is_multiple_of(2).then(|| residue_weights[n / 2]),
            residue_weights,
            cyclic_expectations,
        }
    }
}

pub fn symmetry_report(state: &FockState) -> SymmetryReport {
    SymmetryReport::from_expectations(cyclic_expectations(state), residue_weights(state))
}

pub fn mixed_symmetry_report(rho: &MixedState) -> SymmetryReport {
    let n = rho.layout().spatial;
    let mut weights = vec![0.0; n];
    for (p, state) in rho.components() {
        for (w, x) in weights.iter_mut().zip(residue_weights(state)) {
            *w += p * x;
        }
    }
    SymmetryReport::from_expectations(mixed_cyclic_expectations(rho), weights)
}
