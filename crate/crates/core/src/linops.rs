//! Linear-optical mode unitaries and their action on Fock states.
//!
//! Index convention: a matrix `M` maps creation operators as
//! `a_j^dag -> sum_k M[(k, j)] a_k^dag`, and the induced Fock operator fixes the
//! vacuum with phase 1. Under this convention `apply(M N) = apply(M) o apply(N)`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeLayout, OccupationVector};
use crate::numeric::{factorials, ComplexCompensatedSum, RootsOfUnity, UNITARITY_TOLERANCE};
use crate::permutation::Permutation;

pub type CMatrix = DMatrix<Complex64>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Whether a unitary acts on spatial labels only (`M (x) I_d`) or on the full mode space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    SpatialOnly,
    General,
}

/// Terms of `(b_j^dag)^m` as `(mode, power)` monomials with coefficients.
type Expansion = Vec<(Vec<(usize, u32)>, Complex64)>;

/// Unitary on the `n * d` single-photon mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    layout: ModeLayout,
    matrix: CMatrix,
    spatial: Option<CMatrix>,
    // column j -> (row, entry) when every column has exactly one nonzero entry
    monomial: Option<Vec<(usize, Complex64)>>,
}

/// Max-norm of `U^dag U - I`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `spatial (x) I_d` in flattened `(spatial, internal)` order.
pub fn lift_spatial(spatial: &CMatrix, internal: usize) -> CMatrix {
    let n = spatial.nrows();
    let dim = n * internal;
    CMatrix::from_fn(dim, dim, |r, c| {
        if r % internal == c % internal {
            spatial[(r / internal, c / internal)]
        } else {
            ZERO
        }
    })
}

fn monomial_columns(m: &CMatrix) -> Option<Vec<(usize, Complex64)>> {
    let dim = m.nrows();
    let mut used = vec![false; dim];
    let mut cols = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut hit = None;
        for k in 0..dim {
            let v = m[(k, j)];
            if v != ZERO {
                if hit.is_some() {
                    return None;
                }
                hit = Some((k, v));
            }
        }
        let (k, v) = hit?;
        if used[k] {
            return None;
        }
        used[k] = true;
        cols.push((k, v));
    }
    Some(cols)
}

impl ModeUnitary {
    /// Lift an `n x n` spatial matrix to `M (x) I_d`.
    pub fn from_spatial(layout: ModeLayout, spatial: CMatrix) -> Result<Self> {
        let n = layout.spatial;
        if spatial.shape() != (n, n) {
            return Err(Error::Dimension {
                expected: n,
                rows: spatial.nrows(),
                cols: spatial.ncols(),
            });
        }
        let defect = unitarity_defect(&spatial);
        if defect > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        let matrix = lift_spatial(&spatial, layout.internal);
        let monomial = monomial_columns(&matrix);
        Ok(Self {
            layout,
            matrix,
            spatial: Some(spatial),
            monomial,
        })
    }

    /// A unitary on the full flattened mode space.
    pub fn general(layout: ModeLayout, matrix: CMatrix) -> Result<Self> {
        let dim = layout.modes();
        if matrix.shape() != (dim, dim) {
            return Err(Error::Dimension {
                expected: dim,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let defect = unitarity_defect(&matrix);
        if defect > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        let monomial = monomial_columns(&matrix);
        Ok(Self {
            layout,
            matrix,
            spatial: None,
            monomial,
        })
    }

    pub fn identity(layout: ModeLayout) -> Self {
        Self::from_spatial(layout, CMatrix::identity(layout.spatial, layout.spatial))
            .expect("identity is unitary")
    }

    /// Balanced beam splitter `(e^{i tau} / sqrt 2) [[e^{i theta}, e^{-i phi}], [e^{i phi}, -e^{-i theta}]]`.
    /// `(0, 0, 0)` is the Hadamard form.
    pub fn beam_splitter(layout: ModeLayout, theta: f64, phi: f64, tau: f64) -> Result<Self> {
        require_spatial(&layout, |n| n == 2, "exactly 2")?;
        let g = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, tau);
        let e = |x: f64| Complex64::from_polar(1.0, x);
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[g * e(theta), g * e(-phi), g * e(phi), -g * e(-theta)],
        );
        Self::from_spatial(layout, m)
    }

    pub fn hadamard(layout: ModeLayout) -> Result<Self> {
        Self::beam_splitter(layout, 0.0, 0.0, 0.0)
    }

    /// DFT interferometer `U[k, l] = omega^{kl} / sqrt(n)`.
    pub fn dft(layout: ModeLayout) -> Result<Self> {
        require_spatial(&layout, |n| n >= 2, "at least 2")?;
        let n = layout.spatial;
        Self::from_spatial(layout, dft_matrix(n))
    }

    /// Mode permutation with `a_j^dag -> a_{sigma(j)}^dag`.
    pub fn permutation(layout: ModeLayout, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != layout.spatial {
            return Err(Error::NotPermutation {
                len: layout.spatial,
                detail: format!("permutation acts on {} labels", sigma.len()),
            });
        }
        Self::from_spatial(layout, permutation_matrix(sigma))
    }

    /// Cyclic shift `a_j^dag -> a_{j-1}^dag`.
    pub fn cyclic_shift(layout: ModeLayout) -> Result<Self> {
        Self::permutation(layout, &Permutation::cyclic_shift(layout.spatial, 1))
    }

    /// `diag(1, omega, ..., omega^{n-1})`.
    pub fn diagonal_phase(layout: ModeLayout) -> Result<Self> {
        require_spatial(&layout, |n| n >= 2, "at least 2")?;
        let n = layout.spatial;
        let roots = RootsOfUnity::cached(n);
        let m = CMatrix::from_fn(n, n, |r, c| if r == c { roots.pow(r as i64) } else { ZERO });
        Self::from_spatial(layout, m)
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// The `n x n` spatial block when the unitary is spatial-only.
    pub fn spatial_matrix(&self) -> Option<&CMatrix> {
        self.spatial.as_ref()
    }

    pub fn structure(&self) -> Structure {
        if self.spatial.is_some() {
            Structure::SpatialOnly
        } else {
            Structure::General
        }
    }

    /// True when application is an exact relabeling with phases.
    pub fn is_monomial(&self) -> bool {
        self.monomial.is_some()
    }

    pub fn adjoint(&self) -> Self {
        let matrix = self.matrix.adjoint();
        let monomial = monomial_columns(&matrix);
        Self {
            layout: self.layout,
            spatial: self.spatial.as_ref().map(|s| s.adjoint()),
            matrix,
            monomial,
        }
    }

    /// Matrix product `self * other`; applying it equals applying `other` first.
    pub fn compose(&self, other: &ModeUnitary) -> Result<Self> {
        self.layout.ensure_same(&other.layout)?;
        let matrix = &self.matrix * &other.matrix;
        let spatial = match (&self.spatial, &other.spatial) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        let monomial = monomial_columns(&matrix);
        Ok(Self {
            layout: self.layout,
            matrix,
            spatial,
            monomial,
        })
    }

    pub fn max_abs_diff(&self, other: &ModeUnitary) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// Image of `state` under the induced Fock-space unitary.
    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        self.layout.ensure_same(&state.layout())?;
        match &self.monomial {
            Some(cols) => Ok(self.apply_relabel(cols, state)),
            None => Ok(self.apply_multinomial(state)),
        }
    }

    fn apply_relabel(&self, cols: &[(usize, Complex64)], state: &FockState) -> FockState {
        let mut out = BTreeMap::new();
        for (key, amp) in state.iter() {
            let mut counts = vec![0u32; cols.len()];
            let mut phase = ONE;
            for (j, &(k, v)) in cols.iter().enumerate() {
                let c = key.get(j);
                if c > 0 {
                    counts[k] = c;
                    if v != ONE {
                        phase *= v.powu(c);
                    }
                }
            }
            out.insert(OccupationVector::new(counts), amp * phase);
        }
        FockState::from_map(state.layout(), out)
    }

    fn apply_multinomial(&self, state: &FockState) -> FockState {
        let dim = self.layout.modes();
        let fact = factorials(state.max_photons() as usize);
        let mut expansions: HashMap<(usize, u32), Expansion> = HashMap::new();
        let mut out: BTreeMap<Vec<u32>, ComplexCompensatedSum> = BTreeMap::new();

        for (key, amp) in state.iter() {
            let input_norm: f64 = key.counts().iter().map(|&c| fact[c as usize]).product();
            let mut partial: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
            partial.insert(vec![0; dim], amp / input_norm.sqrt());

            for j in 0..dim {
                let c = key.get(j);
                if c == 0 {
                    continue;
                }
                let terms = expansions
                    .entry((j, c))
                    .or_insert_with(|| column_power_expansion(&self.matrix, j, c, &fact));
                let mut next: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
                for (mono, coef) in &partial {
                    for (exps, w) in terms.iter() {
                        let mut m = mono.clone();
                        for &(k, r) in exps {
                            m[k] += r;
                        }
                        *next.entry(m).or_default() += coef * w;
                    }
                }
                partial = next;
            }

            for (mono, coef) in partial {
                let out_norm: f64 = mono.iter().map(|&m| fact[m as usize]).product();
                out.entry(mono).or_default().add(coef * out_norm.sqrt());
            }
        }

        let amplitudes = out
            .into_iter()
            .map(|(k, s)| (OccupationVector::new(k), s.value()))
            .collect();
        FockState::from_map(state.layout(), amplitudes)
    }
}

/// Terms of `(sum_k M[k, j] a_k^dag)^c` as (exponents over targets, multinomial weight).
fn column_power_expansion(
    m: &CMatrix,
    j: usize,
    c: u32,
    fact: &[f64],
) -> Vec<(Vec<(usize, u32)>, Complex64)> {
    let targets: Vec<(usize, Complex64)> = (0..m.nrows())
        .filter_map(|k| {
            let v = m[(k, j)];
            (v != ZERO).then_some((k, v))
        })
        .collect();
    let mut out = Vec::new();
    let mut exps = vec![0u32; targets.len()];
    compositions(&targets, c, 0, &mut exps, fact, &mut out);
    out
}

fn compositions(
    targets: &[(usize, Complex64)],
    remaining: u32,
    pos: usize,
    exps: &mut Vec<u32>,
    fact: &[f64],
    out: &mut Vec<(Vec<(usize, u32)>, Complex64)>,
) {
    if pos + 1 == targets.len() {
        exps[pos] = remaining;
        let total: u32 = exps.iter().sum();
        let mut weight = Complex64::new(fact[total as usize], 0.0);
        let mut list = Vec::new();
        for (&(k, v), &r) in targets.iter().zip(exps.iter()) {
            if r > 0 {
                weight *= v.powu(r) / fact[r as usize];
                list.push((k, r));
            }
        }
        out.push((list, weight));
        return;
    }
    for r in 0..=remaining {
        exps[pos] = r;
        compositions(targets, remaining - r, pos + 1, exps, fact, out);
    }
}

fn require_spatial(layout: &ModeLayout, ok: impl Fn(usize) -> bool, what: &str) -> Result<()> {
    if ok(layout.spatial) {
        Ok(())
    } else {
        Err(Error::SpatialModes {
            required: what.to_string(),
            found: layout.spatial,
        })
    }
}

pub fn dft_matrix(n: usize) -> CMatrix {
    let roots = RootsOfUnity::cached(n);
    let scale = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |k, l| roots.pow((k * l) as i64) * scale)
}

/// `P[sigma(j), j] = 1`.
pub fn permutation_matrix(sigma: &Permutation) -> CMatrix {
    let n = sigma.len();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[(sigma.image(j), j)] = ONE;
    }
    m
}

/// Free-function form of [`ModeUnitary::apply`].
pub fn apply_to_state(u: &ModeUnitary, state: &FockState) -> Result<FockState> {
    u.apply(state)
}

/// Free-function form of [`ModeUnitary::compose`].
pub fn compose(a: &ModeUnitary, b: &ModeUnitary) -> Result<ModeUnitary> {
    a.compose(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ModeIndex;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two() -> ModeLayout {
        ModeLayout::new(2, 1)
    }

    #[test]
    fn hadamard_from_zero_parameters() {
        let bs = ModeUnitary::beam_splitter(two(), 0.0, 0.0, 0.0).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]);
        assert!(max_abs_diff(bs.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn beam_splitter_is_balanced_and_unitary() {
        for &(t, p, tau) in &[(0.0, FRAC_PI_2, 0.0), (0.3, -1.2, 2.0), (-3.0, 3.1, -0.7)] {
            let bs = ModeUnitary::beam_splitter(two(), t, p, tau).unwrap();
            assert!(unitarity_defect(bs.matrix()) < 1e-14);
            for v in bs.matrix().iter() {
                assert!((v.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn beam_splitter_needs_two_modes() {
        let err = ModeUnitary::beam_splitter(ModeLayout::new(3, 1), 0.0, 0.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::SpatialModes { found: 3, .. }));
    }

    #[test]
    fn dft_two_is_hadamard() {
        let dft = ModeUnitary::dft(two()).unwrap();
        let had = ModeUnitary::hadamard(two()).unwrap();
        assert!(dft.max_abs_diff(&had) < 1e-15);
        assert!(ModeUnitary::dft(ModeLayout::new(1, 2)).is_err());
    }

    #[test]
    fn dft_three_is_unitary() {
        let dft = ModeUnitary::dft(ModeLayout::new(3, 2)).unwrap();
        assert!(unitarity_defect(dft.matrix()) < 1e-12);
        assert_eq!(dft.structure(), Structure::SpatialOnly);
    }

    #[test]
    fn dft_diagonalizes_cyclic_shift() {
        let layout = ModeLayout::new(4, 1);
        let u = ModeUnitary::dft(layout).unwrap();
        let d = ModeUnitary::diagonal_phase(layout).unwrap();
        let p = ModeUnitary::cyclic_shift(layout).unwrap();
        let udu = u.compose(&d).unwrap().compose(&u.adjoint()).unwrap();
        assert!(udu.max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn permutation_matrices() {
        let id = ModeUnitary::permutation(two(), &Permutation::identity(2)).unwrap();
        assert_eq!(id.matrix(), &CMatrix::identity(2, 2));
        let swap = ModeUnitary::permutation(two(), &Permutation::new(vec![1, 0]).unwrap()).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert_eq!(swap.matrix(), &x);
        let layout = ModeLayout::new(4, 1);
        let pairs = Permutation::from_cycles(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let m = ModeUnitary::permutation(layout, &pairs).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                if r / 2 != col / 2 {
                    assert_eq!(m.matrix()[(r, col)], ZERO);
                }
            }
        }
    }

    #[test]
    fn diagonal_phase_entries() {
        let d2 = ModeUnitary::diagonal_phase(two()).unwrap();
        assert_eq!(d2.matrix()[(0, 0)], ONE);
        assert_eq!(d2.matrix()[(1, 1)], c(-1.0, 0.0));
        let layout = ModeLayout::new(3, 1);
        let d3 = ModeUnitary::diagonal_phase(layout).unwrap();
        let mut acc = ModeUnitary::identity(layout);
        for _ in 0..3 {
            acc = acc.compose(&d3).unwrap();
        }
        assert!(acc.max_abs_diff(&ModeUnitary::identity(layout)) < 1e-14);
        let w = d3.matrix()[(1, 1)];
        assert!((w - Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn non_unitary_is_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            ModeUnitary::from_spatial(two(), m),
            Err(Error::NotUnitary(_))
        ));
        assert!(matches!(
            ModeUnitary::general(two(), CMatrix::identity(3, 3)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn compose_with_adjoint_is_identity() {
        let layout = ModeLayout::new(3, 1);
        let u = ModeUnitary::dft(layout).unwrap();
        let id = u.compose(&u.adjoint()).unwrap();
        assert!(id.max_abs_diff(&ModeUnitary::identity(layout)) < 1e-15);
    }

    #[test]
    fn hadamard_conjugated_parity_is_swap() {
        let h = ModeUnitary::hadamard(two()).unwrap();
        let d = ModeUnitary::diagonal_phase(two()).unwrap();
        let s = h.compose(&d).unwrap().compose(&h.adjoint()).unwrap();
        let swap = ModeUnitary::permutation(two(), &Permutation::new(vec![1, 0]).unwrap()).unwrap();
        assert!(s.max_abs_diff(&swap) < 1e-15);
    }

    #[test]
    fn hom_bunching() {
        let state =
            FockState::from_photons(two(), &[ModeIndex::new(0, 0), ModeIndex::new(1, 0)]).unwrap();
        let out = ModeUnitary::hadamard(two()).unwrap().apply(&state).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out.amplitude(&vec![2, 0].into()) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((out.amplitude(&vec![0, 2].into()) - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert_eq!(out.amplitude(&vec![1, 1].into()), ZERO);
    }

    #[test]
    fn identity_and_vacuum() {
        let layout = ModeLayout::new(3, 2);
        let state = FockState::from_photons(
            layout,
            &[ModeIndex::new(0, 1), ModeIndex::new(2, 0), ModeIndex::new(2, 0)],
        )
        .unwrap();
        assert_eq!(ModeUnitary::identity(layout).apply(&state).unwrap(), state);
        let vac = FockState::vacuum(layout);
        assert_eq!(ModeUnitary::dft(layout).unwrap().apply(&vac).unwrap(), vac);
    }

    #[test]
    fn permutation_is_exact_relabeling() {
        let layout = ModeLayout::new(3, 2);
        let state = FockState::from_terms(
            layout,
            [
                (vec![1, 0, 0, 2, 0, 0].into(), c(0.6, 0.1)),
                (vec![0, 0, 1, 1, 0, 1].into(), c(-0.3, 0.7)),
            ],
        )
        .unwrap();
        let p = ModeUnitary::cyclic_shift(layout).unwrap();
        assert!(p.is_monomial());
        let out = p.apply(&state).unwrap();
        // spatial 0 -> 2, 1 -> 0, 2 -> 1
        assert_eq!(out.amplitude(&vec![0, 2, 0, 0, 1, 0].into()), c(0.6, 0.1));
        assert_eq!(out.amplitude(&vec![1, 1, 0, 1, 0, 0].into()), c(-0.3, 0.7));
    }
}
