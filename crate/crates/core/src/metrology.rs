//! Phase estimation with the two-outcome symmetry protocol.
//!
//! A probe evolves under `V(kappa) = exp(i kappa H)` with a one-body generator
//! `H = sum_jk h_jk a_j^dag a_k`, passes an interferometer, and the detector
//! record is coarse-grained to "residue hit" versus "miss". Near `kappa = 0` the
//! Fisher information of that binary outcome tends to `4 Var(i[H, Pi])`.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockState, MixedState, ModeLayout, OccupationVector, Sector};
use crate::linops::{max_abs_diff, CMatrix, ModeUnitary};
use crate::numeric::{
    CompensatedSum, ComplexCompensatedSum, EIGENSTATE_TOLERANCE, HERMITICITY_TOLERANCE,
    IMAGINARY_RESIDUE_TOLERANCE, NORM_TOLERANCE, PROBABILITY_FLOOR, PRUNE_THRESHOLD,
};
use crate::symmetry;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest `kappa` of the three-level extrapolation towards `kappa = 0`.
pub const RICHARDSON_KAPPA: f64 = 1e-2;

/// Hermitian one-body operator over flattened modes.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBodyGenerator {
    layout: ModeLayout,
    matrix: CMatrix,
}

impl OneBodyGenerator {
    pub fn new(layout: ModeLayout, matrix: CMatrix) -> Result<Self> {
        let dim = layout.modes();
        if matrix.shape() != (dim, dim) {
            return Err(Error::Dimension {
                expected: dim,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let defect = max_abs_diff(&matrix, &matrix.adjoint());
        if defect > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { layout, matrix })
    }

    /// `sum_k w_k n_k`. `weights` has one entry per spatial mode (shared by its
    /// internal modes) or one per flattened mode.
    pub fn mode_phase(layout: ModeLayout, weights: &[f64]) -> Result<Self> {
        let dim = layout.modes();
        let diag: Vec<f64> = if weights.len() == layout.spatial {
            (0..dim).map(|f| weights[f / layout.internal]).collect()
        } else if weights.len() == dim {
            weights.to_vec()
        } else {
            return Err(Error::Precondition(format!(
                "expected {} or {} weights, found {}",
                layout.spatial,
                dim,
                weights.len()
            )));
        };
        let matrix = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            diag.into_iter().map(|w| Complex64::new(w, 0.0)),
        ));
        Self::new(layout, matrix)
    }

    /// Photon number in spatial mode `j`.
    pub fn spatial_number(layout: ModeLayout, j: usize) -> Result<Self> {
        if j >= layout.spatial {
            return Err(Error::Precondition(format!(
                "spatial mode {j} outside layout {layout}"
            )));
        }
        let weights: Vec<f64> = (0..layout.spatial)
            .map(|k| if k == j { 1.0 } else { 0.0 })
            .collect();
        Self::mode_phase(layout, &weights)
    }

    /// `sum_l omega_l` where `omega_l = sum_lambda f_lambda n_l(lambda)`.
    pub fn collective_delay(layout: ModeLayout, frequencies: &[f64]) -> Result<Self> {
        Self::signed_delay(layout, frequencies, |_| 1.0)
    }

    /// `sum_l (-1)^l omega_l`.
    pub fn alternating_delay(layout: ModeLayout, frequencies: &[f64]) -> Result<Self> {
        Self::signed_delay(layout, frequencies, |l| if l % 2 == 0 { 1.0 } else { -1.0 })
    }

    fn signed_delay(layout: ModeLayout, frequencies: &[f64], sign: impl Fn(usize) -> f64) -> Result<Self> {
        if frequencies.len() != layout.internal {
            return Err(Error::Precondition(format!(
                "expected {} frequencies, found {}",
                layout.internal,
                frequencies.len()
            )));
        }
        let weights: Vec<f64> = (0..layout.modes())
            .map(|f| {
                let idx = layout.unflat(f);
                sign(idx.spatial) * frequencies[idx.internal]
            })
            .collect();
        Self::mode_phase(layout, &weights)
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Generator of `M H M^dag`, i.e. `M h M^dag`.
    pub fn conjugate(&self, m: &ModeUnitary) -> Result<Self> {
        self.layout.ensure_same(&m.layout())?;
        let matrix = m.matrix() * &self.matrix * m.matrix().adjoint();
        Ok(Self {
            layout: self.layout,
            matrix: hermitian_part(&matrix),
        })
    }

    /// `P^l h P^{-l}`.
    pub fn cyclic_conjugate(&self, l: usize) -> Result<Self> {
        let p = ModeUnitary::cyclic_shift(self.layout)?;
        let mut out = self.clone();
        for _ in 0..l % self.layout.spatial {
            out = out.conjugate(&p)?;
        }
        Ok(out)
    }

    /// `max |P h P^dag + h|`; zero for generators odd under the cyclic shift.
    pub fn cyclic_antisymmetry_defect(&self) -> Result<f64> {
        let c = self.cyclic_conjugate(1)?;
        Ok(max_abs_diff(c.matrix(), &(-&self.matrix)))
    }

    /// `max |P h P^dag - h|`.
    pub fn cyclic_symmetry_defect(&self) -> Result<f64> {
        let c = self.cyclic_conjugate(1)?;
        Ok(max_abs_diff(c.matrix(), &self.matrix))
    }

    /// `a h + b g`.
    pub fn combine(&self, a: f64, other: &OneBodyGenerator, b: f64) -> Result<Self> {
        self.layout.ensure_same(&other.layout)?;
        Ok(Self {
            layout: self.layout,
            matrix: &self.matrix * Complex64::new(a, 0.0) + &other.matrix * Complex64::new(b, 0.0),
        })
    }

    /// `H |psi>` by one-body ladder action on each basis key.
    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        self.layout.ensure_same(&state.layout())?;
        let dim = self.layout.modes();
        let mut acc: BTreeMap<OccupationVector, ComplexCompensatedSum> = BTreeMap::new();
        for (key, amp) in state.iter() {
            for k in 0..dim {
                let mk = key.get(k);
                if mk == 0 {
                    continue;
                }
                for j in 0..dim {
                    let h = self.matrix[(j, k)];
                    if h == ZERO {
                        continue;
                    }
                    let mut counts = key.counts().to_vec();
                    counts[k] -= 1;
                    counts[j] += 1;
                    let factor = (mk as f64 * counts[j] as f64).sqrt();
                    acc.entry(OccupationVector::new(counts))
                        .or_default()
                        .add(h * amp * factor);
                }
            }
        }
        FockState::from_terms(
            self.layout,
            acc.into_iter()
                .map(|(k, s)| (k, s.value()))
                .filter(|(_, a)| a.norm() >= PRUNE_THRESHOLD),
        )
    }

    pub fn expectation(&self, state: &FockState) -> Result<f64> {
        let value = FockState::inner_product(state, &self.apply(state)?)?;
        check_real(value, "generator expectation")
    }

    /// `<H^2> - <H>^2`, evaluated as `|(H - <H>) psi|^2`.
    pub fn variance(&self, state: &FockState) -> Result<f64> {
        let h_psi = self.apply(state)?;
        let mean = check_real(FockState::inner_product(state, &h_psi)?, "generator expectation")?;
        Ok(h_psi.add_scaled(Complex64::new(-mean, 0.0), state)?.norm_sqr())
    }

    /// Mode unitary `exp(i kappa h)`; its Fock-space lift is `exp(i kappa H)`.
    pub fn unitary(&self, kappa: f64) -> Result<ModeUnitary> {
        if kappa == 0.0 {
            return Ok(ModeUnitary::identity(self.layout));
        }
        let eig = SymmetricEigen::new(self.matrix.clone());
        let v = &eig.eigenvectors;
        let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            v.ncols(),
            eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, kappa * l)),
        ));
        ModeUnitary::general(self.layout, v * phases * v.adjoint())
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn check_real(value: Complex64, what: &str) -> Result<f64> {
    if value.im.abs() > IMAGINARY_RESIDUE_TOLERANCE * value.norm().max(1.0) {
        return Err(Error::Precondition(format!(
            "{what} has imaginary part {}",
            value.im
        )));
    }
    Ok(value.re)
}

/// `exp(i kappa H) |psi>`.
pub fn evolve(state: &FockState, g: &OneBodyGenerator, kappa: f64) -> Result<FockState> {
    g.unitary(kappa)?.apply(state)
}

/// Pure-state quantum Fisher information `4 Var(H)`.
pub fn qfi(state: &FockState, g: &OneBodyGenerator) -> Result<f64> {
    require_normalized(state)?;
    Ok(4.0 * g.variance(state)?)
}

fn require_normalized(state: &FockState) -> Result<()> {
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Precondition(format!(
            "probe must be normalized, found squared norm {norm}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    Pure(FockState),
    Mixed(MixedState),
}

impl Probe {
    pub fn layout(&self) -> ModeLayout {
        match self {
            Probe::Pure(s) => s.layout(),
            Probe::Mixed(r) => r.layout(),
        }
    }

    /// `(weight, state)` pairs; a pure probe is a single component of weight 1.
    pub fn components(&self) -> Vec<(f64, &FockState)> {
        match self {
            Probe::Pure(s) => vec![(1.0, s)],
            Probe::Mixed(r) => r.components().iter().map(|(p, s)| (*p, s)).collect(),
        }
    }
}

/// Relation of the probe to the cyclic shift and to the outcome projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryClass {
    /// `P psi = psi`.
    Symmetric,
    /// `P psi = -psi` (even `n`).
    Antisymmetric,
    /// `P psi = omega^k psi` for some other `k`.
    Eigenstate(usize),
    /// Not a `P` eigenstate, but the outcome projector annihilates the probe.
    ProjectorNull,
    None,
}

/// Probe, generator, interferometer, and the residue `j` that counts as a hit
/// (`sum_k k m_k = -j mod n`).
#[derive(Debug, Clone)]
pub struct EstimationProtocol {
    probe: Probe,
    generator: OneBodyGenerator,
    interferometer: ModeUnitary,
    residue: usize,
    class: SymmetryClass,
    dft_readout: bool,
}

impl EstimationProtocol {
    pub fn new(
        probe: Probe,
        generator: OneBodyGenerator,
        interferometer: ModeUnitary,
        residue: usize,
    ) -> Result<Self> {
        let layout = probe.layout();
        layout.ensure_same(&generator.layout())?;
        layout.ensure_same(&interferometer.layout())?;
        let n = layout.spatial;
        if residue >= n {
            return Err(Error::Precondition(format!("residue {residue} outside 0..{n}")));
        }
        for (_, s) in probe.components() {
            require_normalized(s)?;
        }
        let dft_readout = n >= 2 && interferometer.max_abs_diff(&ModeUnitary::dft(layout)?) < 1e-14;
        let mut protocol = Self {
            probe,
            generator,
            interferometer,
            residue,
            class: SymmetryClass::None,
            dft_readout,
        };
        protocol.class = protocol.classify()?;
        Ok(protocol)
    }

    /// Probe behind the DFT with hit residue 0, the arrangement of the symmetry-adapted formulas.
    pub fn dft(probe: Probe, generator: OneBodyGenerator) -> Result<Self> {
        let u = ModeUnitary::dft(probe.layout())?;
        Self::new(probe, generator, u, 0)
    }

    fn classify(&self) -> Result<SymmetryClass> {
        let n = self.layout().spatial;
        let components = self.probe.components();
        let eigen: Vec<Option<usize>> = components
            .iter()
            .map(|(_, s)| symmetry::cyclic_eigenvalue(s, EIGENSTATE_TOLERANCE))
            .collect();
        if let Some(k) = eigen[0] {
            if eigen.iter().all(|e| *e == Some(k)) {
                return Ok(match k {
                    0 => SymmetryClass::Symmetric,
                    k if 2 * k == n => SymmetryClass::Antisymmetric,
                    k => SymmetryClass::Eigenstate(k),
                });
            }
        }
        for (_, s) in &components {
            if self.project(s)?.norm() > EIGENSTATE_TOLERANCE {
                return Ok(SymmetryClass::None);
            }
        }
        Ok(SymmetryClass::ProjectorNull)
    }

    pub fn layout(&self) -> ModeLayout {
        self.probe.layout()
    }

    pub fn probe(&self) -> &Probe {
        &self.probe
    }

    pub fn generator(&self) -> &OneBodyGenerator {
        &self.generator
    }

    pub fn interferometer(&self) -> &ModeUnitary {
        &self.interferometer
    }

    pub fn residue(&self) -> usize {
        self.residue
    }

    pub fn symmetry_class(&self) -> SymmetryClass {
        self.class
    }

    fn hit_sum(&self) -> u64 {
        let n = self.layout().spatial;
        ((n - self.residue) % n) as u64
    }

    /// The hit projector pulled back to the input, `U^dag Pi_out U`, applied to `psi`.
    /// Behind the DFT this is `Pi_j`.
    pub fn project(&self, state: &FockState) -> Result<FockState> {
        if self.dft_readout {
            return Ok(symmetry::project_residue(state, self.residue));
        }
        let layout = self.layout();
        let n = layout.spatial as u64;
        let target = self.hit_sum();
        let out = self.interferometer.apply(state)?;
        let kept = FockState::from_terms(
            layout,
            out.iter()
                .filter(|(k, _)| k.weighted_spatial_sum(&layout) % n == target)
                .map(|(k, a)| (k.clone(), *a)),
        )?;
        self.interferometer.adjoint().apply(&kept)
    }

    /// Hit and miss probabilities at `kappa`, each summed over its own outcomes.
    pub fn outcome_probabilities(&self, kappa: f64) -> Result<(f64, f64)> {
        let layout = self.layout();
        let n = layout.spatial as u64;
        let target = self.hit_sum();
        let total = self.interferometer.compose(&self.generator.unitary(kappa)?)?;
        let mut hit = CompensatedSum::new();
        let mut miss = CompensatedSum::new();
        for (w, s) in self.probe.components() {
            let out = total.apply(s)?;
            for (k, a) in out.iter() {
                let p = w * a.norm_sqr();
                if k.weighted_spatial_sum(&layout) % n == target {
                    hit.add(p);
                } else {
                    miss.add(p);
                }
            }
        }
        Ok((hit.value(), miss.value()))
    }

    /// Classical Fisher information of the hit/miss record at `kappa`.
    pub fn fisher_at(&self, kappa: f64) -> Result<f64> {
        let step = (kappa.abs() / 10.0).max(1e-4);
        let (p, q) = self.outcome_probabilities(kappa)?;
        if p < PROBABILITY_FLOOR && q < PROBABILITY_FLOOR {
            return Err(Error::DegenerateProbability(kappa));
        }
        // dp = -dq; difference the smaller probability to keep relative precision
        let centered = |h: f64| -> Result<f64> {
            let (p_plus, q_plus) = self.outcome_probabilities(kappa + h)?;
            let (p_minus, q_minus) = self.outcome_probabilities(kappa - h)?;
            Ok(if p <= q {
                (p_plus - p_minus) / (2.0 * h)
            } else {
                -(q_plus - q_minus) / (2.0 * h)
            })
        };
        // nested step h, h/2 cancels the h^2 truncation term
        let slope = (4.0 * centered(step / 2.0)? - centered(step)?) / 3.0;
        let mut fisher = 0.0;
        if p >= PROBABILITY_FLOOR {
            fisher += slope * slope / p;
        }
        if q >= PROBABILITY_FLOOR {
            fisher += slope * slope / q;
        }
        Ok(fisher)
    }

    /// Quantum Fisher information of a pure probe.
    pub fn qfi(&self) -> Result<f64> {
        match &self.probe {
            Probe::Pure(s) => qfi(s, &self.generator),
            Probe::Mixed(_) => Err(Error::Precondition(
                "pure-state QFI requested for a mixed probe".into(),
            )),
        }
    }

    /// `Var(i[H, Pi])` for one probe component.
    fn commutator_variance(&self, state: &FockState) -> Result<f64> {
        let h_pi = self.generator.apply(&self.project(state)?)?;
        let pi_h = self.project(&self.generator.apply(state)?)?;
        let x = h_pi.add_scaled(Complex64::new(-1.0, 0.0), &pi_h)?.scale(Complex64::new(0.0, 1.0));
        let mean = check_real(FockState::inner_product(state, &x)?, "commutator expectation")?;
        Ok(x.add_scaled(Complex64::new(-mean, 0.0), state)?.norm_sqr())
    }

    fn require_projector_eigen(&self, state: &FockState) -> Result<()> {
        let inside = self.project(state)?;
        let stay = inside.add_scaled(Complex64::new(-1.0, 0.0), state)?.norm();
        if inside.norm() > EIGENSTATE_TOLERANCE && stay > EIGENSTATE_TOLERANCE {
            return Err(Error::Precondition(
                "probe must satisfy Pi psi = psi or Pi psi = 0".into(),
            ));
        }
        Ok(())
    }
}

/// Fisher information sample of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherPoint {
    pub kappa: f64,
    pub fisher: f64,
    pub hit_probability: f64,
}

/// Fisher information of the two-outcome record on `grid`.
pub fn fisher_two_outcome(protocol: &EstimationProtocol, grid: &[f64]) -> Result<Vec<FisherPoint>> {
    grid.iter()
        .map(|&kappa| {
            Ok(FisherPoint {
                kappa,
                fisher: protocol.fisher_at(kappa)?,
                hit_probability: protocol.outcome_probabilities(kappa)?.0,
            })
        })
        .collect()
}

/// `kappa -> 0` limit of the two-outcome Fisher information by Richardson
/// extrapolation in `kappa^2` of the even part `(F(k) + F(-k))/2` at
/// `k = k0, k0/2, k0/4`.
pub fn fisher_limit_extrapolated(protocol: &EstimationProtocol) -> Result<f64> {
    let even = |k: f64| -> Result<f64> { Ok(0.5 * (protocol.fisher_at(k)? + protocol.fisher_at(-k)?)) };
    let f0 = even(RICHARDSON_KAPPA)?;
    let f1 = even(RICHARDSON_KAPPA / 2.0)?;
    let f2 = even(RICHARDSON_KAPPA / 4.0)?;
    let r01 = (4.0 * f1 - f0) / 3.0;
    let r12 = (4.0 * f2 - f1) / 3.0;
    Ok((16.0 * r12 - r01) / 15.0)
}

/// `4 Var(i[H, Pi])`, the small-`kappa` limit for probes with `Pi psi = psi` or `Pi psi = 0`.
pub fn fisher_limit_commutator(protocol: &EstimationProtocol) -> Result<f64> {
    let Probe::Pure(state) = protocol.probe() else {
        return Err(Error::Precondition(
            "commutator formula takes a pure probe; use fisher_mixed".into(),
        ));
    };
    protocol.require_projector_eigen(state)?;
    Ok(4.0 * protocol.commutator_variance(state)?)
}

/// Generator whose variance gives the symmetry-adapted Fisher information:
/// `H - (1/n) sum_l P^l H P^-l` for symmetric probes and
/// `(1/n) sum_l (-1)^l P^l H P^-l` for antisymmetric ones.
pub fn effective_generator(
    g: &OneBodyGenerator,
    class: SymmetryClass,
) -> Result<OneBodyGenerator> {
    let layout = g.layout();
    let n = layout.spatial;
    let mut sum = CMatrix::zeros(layout.modes(), layout.modes());
    let p = ModeUnitary::cyclic_shift(layout)?;
    let mut conj = g.clone();
    for l in 0..n {
        let sign = match class {
            SymmetryClass::Symmetric => 1.0,
            SymmetryClass::Antisymmetric => {
                if l % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            _ => {
                return Err(Error::Precondition(
                    "symmetry-adapted formula needs a +1 or -1 eigenstate of P".into(),
                ))
            }
        };
        sum += conj.matrix() * Complex64::new(sign / n as f64, 0.0);
        conj = conj.conjugate(&p)?;
    }
    let matrix = match class {
        SymmetryClass::Symmetric => g.matrix() - sum,
        _ => sum,
    };
    Ok(OneBodyGenerator {
        layout,
        matrix: hermitian_part(&matrix),
    })
}

fn require_symmetry_adapted(protocol: &EstimationProtocol) -> Result<SymmetryClass> {
    if !protocol.dft_readout || protocol.residue != 0 {
        return Err(Error::Precondition(
            "symmetry-adapted formula assumes DFT readout with hit residue 0".into(),
        ));
    }
    match protocol.symmetry_class() {
        c @ (SymmetryClass::Symmetric | SymmetryClass::Antisymmetric) => Ok(c),
        _ => Err(Error::Precondition(
            "probe is not a +1 or -1 eigenstate of P".into(),
        )),
    }
}

/// `(4/n^2) Var(n H - sum_l P^l H P^-l)` for `+1` probes,
/// `(4/n^2) Var(sum_l (-1)^l P^l H P^-l)` for `-1` probes.
pub fn fisher_symmetry_adapted(protocol: &EstimationProtocol) -> Result<f64> {
    let class = require_symmetry_adapted(protocol)?;
    let g = effective_generator(protocol.generator(), class)?;
    let mut total = CompensatedSum::new();
    for (w, s) in protocol.probe().components() {
        total.add(w * 4.0 * g.variance(s)?);
    }
    Ok(total.value())
}

/// `4 sum_j p_j Var_j(i[H, Pi])` for a mixture with `tr(rho Pi)` equal to 0 or 1.
pub fn fisher_mixed(protocol: &EstimationProtocol) -> Result<f64> {
    let components = protocol.probe().components();
    let mut weight_in = CompensatedSum::new();
    for (w, s) in &components {
        weight_in.add(w * protocol.project(s)?.norm_sqr());
    }
    let t = weight_in.value();
    if t.abs() > EIGENSTATE_TOLERANCE && (t - 1.0).abs() > EIGENSTATE_TOLERANCE {
        return Err(Error::Precondition(format!(
            "tr(rho Pi) = {t}, expected 0 or 1"
        )));
    }
    let mut total = CompensatedSum::new();
    for (w, s) in components {
        total.add(w * 4.0 * protocol.commutator_variance(s)?);
    }
    Ok(total.value())
}

/// Send a state with a definite residue `r = sum_k k m_k mod n` through the DFT.
/// The output is a `P` eigenstate with eigenvalue `omega^r`; returns it with `r`.
pub fn symmetrize_by_predft(state: &FockState) -> Result<(FockState, usize)> {
    let layout = state.layout();
    let n = layout.spatial;
    if state.photon_number_sector() == Sector::Zero {
        return Err(Error::ZeroState);
    }
    let mut residues = state
        .iter()
        .map(|(k, _)| (k.weighted_spatial_sum(&layout) % n as u64) as usize);
    let r = residues.next().expect("non-zero state has a key");
    if residues.any(|x| x != r) {
        return Err(Error::Precondition(
            "input has no definite residue sum_k k m_k mod n".into(),
        ));
    }
    let out = ModeUnitary::dft(layout)?.apply(state)?;
    match symmetry::cyclic_eigenvalue(&out, 1e-10 * out.norm().max(1.0)) {
        Some(k) if k == r => Ok((out, r)),
        other => Err(Error::Precondition(format!(
            "DFT output expected in eigenspace {r}, found {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ModeIndex;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn photons(layout: ModeLayout, list: &[(usize, usize)]) -> FockState {
        let idx: Vec<ModeIndex> = list.iter().map(|&(s, i)| ModeIndex::new(s, i)).collect();
        FockState::from_photons(layout, &idx).unwrap()
    }

    #[test]
    fn rejects_non_hermitian() {
        let layout = ModeLayout::new(2, 1);
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(OneBodyGenerator::new(layout, m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn zero_kappa_is_identity() {
        let layout = ModeLayout::new(2, 2);
        let g = OneBodyGenerator::collective_delay(layout, &[1.0, 2.0]).unwrap();
        let s = photons(layout, &[(0, 0), (1, 1)]);
        assert_eq!(evolve(&s, &g, 0.0).unwrap(), s);
    }

    #[test]
    fn number_eigenstate_picks_up_phase() {
        let layout = ModeLayout::new(2, 2);
        let g = OneBodyGenerator::collective_delay(layout, &[1.0, 2.5]).unwrap();
        let s = photons(layout, &[(0, 0), (1, 1)]);
        let out = evolve(&s, &g, 0.3).unwrap();
        let key = s.iter().next().unwrap().0.clone();
        let expected = Complex64::from_polar(1.0, 0.3 * 3.5);
        assert!((out.amplitude(&key) - expected).norm() < 1e-12);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn two_level_qfi() {
        let layout = ModeLayout::new(2, 1);
        let a = photons(layout, &[(0, 0)]);
        let b = photons(layout, &[(1, 0)]);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let s = FockState::superpose(&[(h, &a), (h, &b)]).unwrap();
        let g = OneBodyGenerator::spatial_number(layout, 0).unwrap();
        assert!((qfi(&s, &g).unwrap() - 1.0).abs() < 1e-14);
        assert!(qfi(&a, &g).unwrap().abs() < 1e-15);
    }

    #[test]
    fn delay_generators_under_shift() {
        let layout = ModeLayout::new(4, 2);
        let omega = OneBodyGenerator::collective_delay(layout, &[1.0, -0.5]).unwrap();
        let alt = OneBodyGenerator::alternating_delay(layout, &[1.0, -0.5]).unwrap();
        assert!(omega.cyclic_symmetry_defect().unwrap() < 1e-15);
        assert!(alt.cyclic_antisymmetry_defect().unwrap() < 1e-15);
    }

    #[test]
    fn predft_residues() {
        let two = photons(ModeLayout::new(2, 1), &[(0, 0), (1, 0)]);
        assert_eq!(symmetrize_by_predft(&two).unwrap().1, 1);
        let four = photons(ModeLayout::new(4, 1), &[(0, 0), (1, 0), (2, 0), (3, 0)]);
        assert_eq!(symmetrize_by_predft(&four).unwrap().1, 2);
        let bunched = photons(ModeLayout::new(3, 1), &[(0, 0), (0, 0)]);
        assert_eq!(symmetrize_by_predft(&bunched).unwrap().1, 0);
        let layout = ModeLayout::new(2, 1);
        let mixed = FockState::superpose(&[
            (Complex64::new(FRAC_1_SQRT_2, 0.0), &photons(layout, &[(0, 0)])),
            (Complex64::new(FRAC_1_SQRT_2, 0.0), &photons(layout, &[(1, 0)])),
        ])
        .unwrap();
        assert!(symmetrize_by_predft(&mixed).is_err());
    }

    #[test]
    fn protocol_classes() {
        let layout = ModeLayout::new(2, 2);
        let g = OneBodyGenerator::alternating_delay(layout, &[1.0, 2.0]).unwrap();
        let sym = photons(layout, &[(0, 0), (1, 0)]);
        let p = EstimationProtocol::dft(Probe::Pure(sym), g.clone()).unwrap();
        assert_eq!(p.symmetry_class(), SymmetryClass::Symmetric);
        let dist = photons(layout, &[(0, 0), (1, 1)]);
        let p = EstimationProtocol::dft(Probe::Pure(dist), g).unwrap();
        assert_eq!(p.symmetry_class(), SymmetryClass::None);
    }
}
