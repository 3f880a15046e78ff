//! Photon-number-resolving detection at interferometer outputs.
//!
//! Every closed-form probability is computed twice: once from the output
//! distribution (detection side) and once from symmetry expectations of the
//! input (symmetry side). [`DualProbability`] carries both.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockState, MixedState, ModeLayout, OccupationVector, Sector};
use crate::linops::ModeUnitary;
use crate::numeric::{ComplexCompensatedSum, CompensatedSum, RootsOfUnity, NORM_TOLERANCE};
use crate::symmetry;

/// Probabilities of spatial photon-count vectors, internal modes traced out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    spatial: usize,
    entries: BTreeMap<Vec<u32>, f64>,
}

impl OutcomeDistribution {
    pub fn from_entries(spatial: usize, entries: BTreeMap<Vec<u32>, f64>) -> Self {
        Self { spatial, entries }
    }

    pub fn spatial_modes(&self) -> usize {
        self.spatial
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u32>, f64> {
        &self.entries
    }

    pub fn probability(&self, counts: &[u32]) -> f64 {
        self.entries.get(counts).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().copied().collect::<CompensatedSum>().value()
    }

    /// Summed probability of the outcomes selected by `event`.
    pub fn event_probability<F: Fn(&[u32]) -> bool>(&self, event: F) -> f64 {
        self.entries
            .iter()
            .filter(|(k, _)| event(k))
            .map(|(_, p)| *p)
            .collect::<CompensatedSum>()
            .value()
    }

    /// Probability that `sum_k k m_k = residue (mod n)`.
    pub fn weighted_sum_probability(&self, residue: usize) -> f64 {
        let n = self.spatial as u64;
        self.event_probability(|m| weighted_sum(m) % n == residue as u64 % n)
    }

    /// Probability of an even count in spatial mode 1.
    pub fn parity_even(&self) -> f64 {
        self.event_probability(|m| m[1] % 2 == 0)
    }

    /// `m_0, ..., m_{n-1}, probability` rows, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 0..self.spatial {
            let _ = write!(out, "m{k},");
        }
        out.push_str("probability\n");
        for (counts, p) in &self.entries {
            for c in counts {
                let _ = write!(out, "{c},");
            }
            let _ = writeln!(out, "{p:.11e}");
        }
        out
    }

    /// `count` independent draws from the distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Result<Vec<Vec<u32>>> {
        let keys: Vec<&Vec<u32>> = self.entries.keys().collect();
        let dist = WeightedIndex::new(self.entries.values().copied())
            .map_err(|e| Error::Precondition(format!("cannot sample: {e}")))?;
        Ok((0..count).map(|_| keys[dist.sample(rng)].clone()).collect())
    }
}

fn weighted_sum(m: &[u32]) -> u64 {
    m.iter().enumerate().map(|(k, &c)| k as u64 * c as u64).sum()
}

/// Detection-side and symmetry-side values of the same probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualProbability {
    pub detection: f64,
    pub symmetry: f64,
}

impl DualProbability {
    pub fn discrepancy(&self) -> f64 {
        (self.detection - self.symmetry).abs()
    }
}

fn require_normalized(state: &FockState) -> Result<()> {
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Precondition(format!(
            "state must be normalized, found squared norm {norm}"
        )));
    }
    Ok(())
}

fn require_two(layout: &ModeLayout) -> Result<()> {
    if layout.spatial != 2 {
        return Err(Error::SpatialModes {
            required: "exactly 2".into(),
            found: layout.spatial,
        });
    }
    Ok(())
}

/// Outcome statistics of `u |psi>` with internal modes traced out.
pub fn output_distribution(state: &FockState, u: &ModeUnitary) -> Result<OutcomeDistribution> {
    let layout = state.layout();
    require_normalized(state)?;
    let resolved = output_distribution_resolved(state, u)?;
    let mut acc: BTreeMap<Vec<u32>, CompensatedSum> = BTreeMap::new();
    for (key, p) in resolved {
        acc.entry(key.spatial_counts(&layout)).or_default().add(p);
    }
    Ok(OutcomeDistribution::from_entries(
        layout.spatial,
        acc.into_iter().map(|(k, s)| (k, s.value())).collect(),
    ))
}

/// Outcome statistics resolved in every flattened mode. Diagnostic only: real
/// detectors do not see the internal label.
pub fn output_distribution_resolved(
    state: &FockState,
    u: &ModeUnitary,
) -> Result<BTreeMap<OccupationVector, f64>> {
    let out = u.apply(state)?;
    Ok(out
        .iter()
        .map(|(k, a)| (k.clone(), a.norm_sqr()))
        .collect())
}

/// `P(1,1)` behind the Hadamard beam splitter, and `(1 - <S>)/2`.
pub fn coincidence_probability(state: &FockState) -> Result<DualProbability> {
    let layout = state.layout();
    require_two(&layout)?;
    if state.photon_number_sector() != Sector::Definite(2) {
        return Err(Error::Precondition(
            "coincidence probability needs a two-photon state".into(),
        ));
    }
    let dist = output_distribution(state, &ModeUnitary::hadamard(layout)?)?;
    let s = symmetry::exchange_expectation(state)?;
    Ok(DualProbability {
        detection: dist.probability(&[1, 1]),
        symmetry: (1.0 - s.re) / 2.0,
    })
}

/// Even count in spatial mode 1 behind the Hadamard beam splitter, and `(1 + <S>)/2`.
pub fn parity_even_probability(state: &FockState) -> Result<DualProbability> {
    let layout = state.layout();
    require_two(&layout)?;
    let dist = output_distribution(state, &ModeUnitary::hadamard(layout)?)?;
    let s = symmetry::exchange_expectation(state)?;
    Ok(DualProbability {
        detection: dist.parity_even(),
        symmetry: (1.0 + s.re) / 2.0,
    })
}

/// Parity behind the general balanced beam splitter; the symmetry side is
/// `(1 + <S_eff>)/2` with the effective symmetry of `(theta, phi)`.
pub fn parity_even_probability_bs(
    state: &FockState,
    theta: f64,
    phi: f64,
    tau: f64,
) -> Result<DualProbability> {
    let layout = state.layout();
    require_two(&layout)?;
    let bs = ModeUnitary::beam_splitter(layout, theta, phi, tau)?;
    let dist = output_distribution(state, &bs)?;
    let eff = symmetry::effective_symmetry(layout, theta, phi)?;
    let s = FockState::inner_product(state, &eff.apply(state)?)?;
    Ok(DualProbability {
        detection: dist.parity_even(),
        symmetry: (1.0 + s.re) / 2.0,
    })
}

/// `P[sum_k k m_k = -j (mod n)]` behind the DFT, and `<Pi_j>`.
pub fn modular_sum_probability(state: &FockState, residue: usize) -> Result<DualProbability> {
    let n = state.layout().spatial;
    check_residue(residue, n)?;
    Ok(modular_sum_probabilities(state)?[residue])
}

/// [`modular_sum_probability`] for every residue from one output distribution.
pub fn modular_sum_probabilities(state: &FockState) -> Result<Vec<DualProbability>> {
    let layout = state.layout();
    let n = layout.spatial;
    let dist = output_distribution(state, &ModeUnitary::dft(layout)?)?;
    let weights = symmetry::residue_weights_from_expectations(&symmetry::cyclic_expectations(state));
    Ok((0..n)
        .map(|j| DualProbability {
            detection: dist.weighted_sum_probability((n - j) % n),
            symmetry: weights[j],
        })
        .collect())
}

fn check_residue(residue: usize, n: usize) -> Result<()> {
    if residue >= n {
        return Err(Error::Precondition(format!(
            "residue {residue} outside 0..{n}"
        )));
    }
    Ok(())
}

/// `P[sum_k k m_k = -j (mod n)]` for the mixture `rho` behind `u`.
///
/// The symmetry side is `(1/n) sum_l omega^{jl} tr(rho U^dag D^l U)`, which is
/// `(1/n) sum_l omega^{-jl} tr(rho P^l)` when `u` is the DFT.
pub fn mixed_output_statistics(
    rho: &MixedState,
    u: &ModeUnitary,
    residue: usize,
) -> Result<DualProbability> {
    let layout = rho.layout();
    layout.ensure_same(&u.layout())?;
    let n = layout.spatial;
    check_residue(residue, n)?;
    let target = (n - residue) % n;

    let mut detection = CompensatedSum::new();
    for (p, state) in rho.components() {
        let dist = output_distribution(state, u)?;
        detection.add(p * dist.weighted_sum_probability(target));
    }

    let dft = ModeUnitary::dft(layout)?;
    let expectations = if u.max_abs_diff(&dft) < 1e-14 {
        symmetry::mixed_cyclic_expectations(rho)
            .into_iter()
            .enumerate()
            .map(|(l, e)| if l == 0 { e } else { e.conj() })
            .collect::<Vec<_>>()
    } else {
        effective_diagonal_expectations(rho, u)?
    };
    // expectations[l] = tr(rho U^dag D^l U); for the DFT this is tr(rho P^{-l}).
    let roots = RootsOfUnity::cached(n);
    let sym: ComplexCompensatedSum = expectations
        .iter()
        .enumerate()
        .map(|(l, e)| roots.pow((residue * l) as i64) * e)
        .collect();
    Ok(DualProbability {
        detection: detection.value(),
        symmetry: sym.value().re / n as f64,
    })
}

fn effective_diagonal_expectations(rho: &MixedState, u: &ModeUnitary) -> Result<Vec<Complex64>> {
    let layout = rho.layout();
    let d = ModeUnitary::diagonal_phase(layout)?;
    let mut power = ModeUnitary::identity(layout);
    let mut out = Vec::with_capacity(layout.spatial);
    for _ in 0..layout.spatial {
        let eff = u.adjoint().compose(&power)?.compose(u)?;
        let mut acc = ComplexCompensatedSum::new();
        for (p, state) in rho.components() {
            acc.add(FockState::inner_product(state, &eff.apply(state)?)? * *p);
        }
        out.push(acc.value());
        power = d.compose(&power)?;
    }
    Ok(out)
}
