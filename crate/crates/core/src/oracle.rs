//! Brute-force dense references.
//!
//! Everything here works on explicit Fock-sector matrices: mode unitaries are
//! embedded through permanents, one-body generators through ladder-operator
//! matrix elements, exponentials through scaling and squaring. None of it calls
//! the sparse fast paths in [`crate::linops`], [`crate::symmetry`] or
//! [`crate::metrology`], so agreement between the two is a real check.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::detection::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::fock::{FockState, MixedState, ModeLayout, OccupationVector};
use crate::linops::{CMatrix, ModeUnitary};
use crate::numeric::factorials;
use crate::permutation::Permutation;

pub type CVector = DVector<Complex64>;

/// Largest dense dimension the oracle will build.
pub const DENSE_CAP: usize = 20_000;

/// Eigenvalue pairs with `lambda_j + lambda_k` below this are skipped in the SLD formula.
pub const SLD_EIGEN_FLOOR: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Enumerated basis of one or more fixed-photon-number sectors.
///
/// Within a sector, occupation vectors are in ascending lexicographic order of
/// their counts; sectors follow in ascending photon number.
#[derive(Debug, Clone)]
pub struct DenseSectorBasis {
    layout: ModeLayout,
    photon_numbers: Vec<u32>,
    states: Vec<OccupationVector>,
    index: HashMap<OccupationVector, usize>,
}

/// `C(N + m - 1, N)`.
pub fn sector_dimension(modes: usize, photons: u32) -> usize {
    let mut acc: u128 = 1;
    for i in 0..photons as u128 {
        acc = acc * (modes as u128 + i) / (i + 1);
    }
    acc.min(usize::MAX as u128) as usize
}

impl DenseSectorBasis {
    pub fn sector(layout: ModeLayout, photons: u32) -> Result<Self> {
        Self::sectors(layout, [photons])
    }

    pub fn sectors<I: IntoIterator<Item = u32>>(layout: ModeLayout, photons: I) -> Result<Self> {
        let mut photon_numbers: Vec<u32> = photons.into_iter().collect();
        photon_numbers.sort_unstable();
        photon_numbers.dedup();
        let dim: usize = photon_numbers
            .iter()
            .map(|&n| sector_dimension(layout.modes(), n))
            .sum();
        if dim > DENSE_CAP {
            return Err(Error::SectorTooLarge {
                dim,
                cap: DENSE_CAP,
            });
        }
        let mut states = Vec::with_capacity(dim);
        for &n in &photon_numbers {
            let mut counts = vec![0u32; layout.modes()];
            enumerate_compositions(n, 0, &mut counts, &mut states);
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            layout,
            photon_numbers,
            states,
            index,
        })
    }

    /// Smallest basis containing every key of `state`.
    pub fn for_state(state: &FockState) -> Result<Self> {
        Self::sectors(state.layout(), state.photon_numbers())
    }

    pub fn for_mixture(rho: &MixedState) -> Result<Self> {
        Self::sectors(rho.layout(), rho.photon_numbers())
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn photon_numbers(&self) -> &[u32] {
        &self.photon_numbers
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &OccupationVector {
        &self.states[i]
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn index_of(&self, occ: &OccupationVector) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

fn enumerate_compositions(
    remaining: u32,
    pos: usize,
    counts: &mut Vec<u32>,
    out: &mut Vec<OccupationVector>,
) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        out.push(OccupationVector::new(counts.clone()));
        counts[pos] = 0;
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        enumerate_compositions(remaining - c, pos + 1, counts, out);
    }
    counts[pos] = 0;
}

pub fn to_dense(state: &FockState, basis: &DenseSectorBasis) -> Result<CVector> {
    state.layout().ensure_same(&basis.layout)?;
    let mut v = CVector::zeros(basis.dim());
    for (key, amp) in state.iter() {
        let i = basis.index_of(key).ok_or_else(|| {
            Error::Precondition(format!("basis key {key} is outside the dense basis"))
        })?;
        v[i] = *amp;
    }
    Ok(v)
}

pub fn from_dense(v: &CVector, basis: &DenseSectorBasis) -> FockState {
    FockState::from_terms(
        basis.layout,
        basis.states.iter().cloned().zip(v.iter().copied()),
    )
    .expect("basis keys match the layout")
}

/// Permanent by Ryser's inclusion-exclusion formula.
pub fn permanent(m: &CMatrix) -> Complex64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "permanent needs a square matrix");
    if n == 0 {
        return ONE;
    }
    let mut total = ZERO;
    for subset in 1u64..(1u64 << n) {
        let mut prod = ONE;
        for r in 0..n {
            let mut row_sum = ZERO;
            for c in 0..n {
                if subset & (1 << c) != 0 {
                    row_sum += m[(r, c)];
                }
            }
            prod *= row_sum;
        }
        let sign = if (n as u32 - subset.count_ones()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += prod * sign;
    }
    total
}

fn repeated_indices(occ: &OccupationVector) -> Vec<usize> {
    occ.counts()
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| std::iter::repeat_n(k, c as usize))
        .collect()
}

/// Dense matrix of the Fock operator induced by `u` on the basis:
/// `<m|U|c> = perm(U[rows(m), cols(c)]) / sqrt(prod m! prod c!)`.
pub fn embed_unitary(u: &ModeUnitary, basis: &DenseSectorBasis) -> Result<CMatrix> {
    u.layout().ensure_same(&basis.layout)?;
    let fact = factorials(*basis.photon_numbers.iter().max().unwrap_or(&0) as usize);
    let mat = u.matrix();
    let dim = basis.dim();
    let rows: Vec<Vec<usize>> = basis.states.iter().map(repeated_indices).collect();
    let norms: Vec<f64> = basis
        .states
        .iter()
        .map(|s| s.counts().iter().map(|&c| fact[c as usize]).product::<f64>())
        .collect();
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        for row in 0..dim {
            let (r_idx, c_idx) = (&rows[row], &rows[col]);
            if r_idx.len() != c_idx.len() {
                continue;
            }
            let sub = CMatrix::from_fn(r_idx.len(), c_idx.len(), |a, b| mat[(r_idx[a], c_idx[b])]);
            out[(row, col)] = permanent(&sub) / (norms[row] * norms[col]).sqrt();
        }
    }
    Ok(out)
}

/// Dense matrix of `sum_{jk} h[j, k] a_j^dag a_k` from ladder-operator matrix elements.
pub fn embed_generator(h: &CMatrix, basis: &DenseSectorBasis) -> Result<CMatrix> {
    let modes = basis.layout.modes();
    if h.shape() != (modes, modes) {
        return Err(Error::Dimension {
            expected: modes,
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let dim = basis.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let input = basis.state(col).counts();
        for k in 0..modes {
            if input[k] == 0 {
                continue;
            }
            // a_k |c> = sqrt(c_k) |c - e_k>
            let lowered = (input[k] as f64).sqrt();
            let mut counts = input.to_vec();
            counts[k] -= 1;
            for j in 0..modes {
                let hjk = h[(j, k)];
                if hjk == ZERO {
                    continue;
                }
                // a_j^dag |c'> = sqrt(c'_j + 1) |c' + e_j>
                let raised = (counts[j] as f64 + 1.0).sqrt();
                counts[j] += 1;
                let row = basis
                    .index_of(&OccupationVector::new(counts.clone()))
                    .expect("one-body operators stay inside a sector");
                counts[j] -= 1;
                out[(row, col)] += hjk * lowered * raised;
            }
        }
    }
    Ok(out)
}

/// Residue projector `(1/n) sum_l (omega^{-j} P)^l` from powers of the dense cyclic shift.
pub fn dense_projector_residue_on(basis: &DenseSectorBasis, residue: usize) -> Result<CMatrix> {
    let layout = basis.layout;
    let n = layout.spatial;
    let shift = ModeUnitary::permutation(layout, &Permutation::cyclic_shift(n, 1))?;
    let p = embed_unitary(&shift, basis)?;
    let dim = basis.dim();
    let step = Complex64::from_polar(
        1.0,
        -2.0 * std::f64::consts::PI * residue as f64 / n as f64,
    );
    let factor = p * step;
    let mut power = CMatrix::identity(dim, dim);
    let mut sum = CMatrix::zeros(dim, dim);
    for _ in 0..n {
        sum += &power;
        power = &factor * &power;
    }
    Ok(sum / Complex64::new(n as f64, 0.0))
}

pub fn dense_projector_residue(
    layout: ModeLayout,
    photons: u32,
    residue: usize,
) -> Result<CMatrix> {
    let basis = DenseSectorBasis::sector(layout, photons)?;
    dense_projector_residue_on(&basis, residue)
}

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|c| m.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(i kappa h)` by scaling and squaring of a truncated Taylor series.
pub fn dense_expm(h: &CMatrix, kappa: f64) -> CMatrix {
    let dim = h.nrows();
    let a = h * Complex64::new(0.0, kappa);
    let norm = one_norm(&a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = &a / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let mut term = CMatrix::identity(dim, dim);
    let mut sum = CMatrix::identity(dim, dim);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
        if one_norm(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn density_matrix(rho: &MixedState, basis: &DenseSectorBasis) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(basis.dim(), basis.dim());
    for (p, state) in rho.components() {
        let v = to_dense(state, basis)?;
        out += (&v * v.adjoint()) * Complex64::new(*p, 0.0);
    }
    Ok(out)
}

pub fn expectation(v: &CVector, op: &CMatrix) -> Complex64 {
    (v.adjoint() * (op * v))[(0, 0)]
}

/// `<v|A^2|v> - <v|A|v>^2` for Hermitian `A`.
pub fn variance(v: &CVector, op: &CMatrix) -> f64 {
    let av = op * v;
    let mean = (v.adjoint() * &av)[(0, 0)].re;
    let second = (av.adjoint() * &av)[(0, 0)].re;
    second - mean * mean
}

/// Mixed-state QFI `2 sum_{jk} |<j|H|k>|^2 (l_j - l_k)^2 / (l_j + l_k)` from the
/// eigendecomposition of `rho`.
pub fn mixed_qfi_sld(rho: &CMatrix, h: &CMatrix) -> Result<f64> {
    let dim = rho.nrows();
    if rho.shape() != (dim, dim) || h.shape() != (dim, dim) {
        return Err(Error::Dimension {
            expected: dim,
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let herm = crate::linops::max_abs_diff(rho, &rho.adjoint());
    if herm > 1e-10 {
        return Err(Error::NotHermitian(herm));
    }
    let trace = rho.trace();
    if (trace - ONE).norm() > 1e-10 {
        return Err(Error::Precondition(format!("density matrix trace is {trace}")));
    }
    let eig = SymmetricEigen::new(rho.clone());
    let lambdas = &eig.eigenvalues;
    if lambdas.iter().any(|&l| l < -1e-10) {
        return Err(Error::Precondition("density matrix is not PSD".into()));
    }
    let v = &eig.eigenvectors;
    let h_eig = v.adjoint() * h * v;
    let mut total = 0.0;
    for j in 0..dim {
        for k in 0..dim {
            let s = lambdas[j] + lambdas[k];
            if s < SLD_EIGEN_FLOOR {
                continue;
            }
            let d = lambdas[j] - lambdas[k];
            total += h_eig[(j, k)].norm_sqr() * d * d / s;
        }
    }
    Ok(2.0 * total)
}

/// Exact output statistics by dense embedding and enumeration, internal modes traced out.
pub fn dense_output_distribution(
    state: &FockState,
    u: &ModeUnitary,
) -> Result<OutcomeDistribution> {
    let basis = DenseSectorBasis::for_state(state)?;
    let v = to_dense(state, &basis)?;
    let out = embed_unitary(u, &basis)? * v;
    let layout = basis.layout;
    let mut entries: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (i, amp) in out.iter().enumerate() {
        let p = amp.norm_sqr();
        if p > 0.0 {
            *entries
                .entry(basis.state(i).spatial_counts(&layout))
                .or_default() += p;
        }
    }
    Ok(OutcomeDistribution::from_entries(layout.spatial, entries))
}
