//! Occupation-number basis over `n` spatial x `d` internal modes, and sparse
//! pure / mixed state containers.
//!
//! A [`FockState`] stores coefficients in the orthonormal Fock basis
//! `|m> = prod_k (a_k^dag)^{m_k} / sqrt(m_k!) |vac>`, so every inner product is a
//! plain conjugated dot product. All factorial bookkeeping happens when states are
//! built from creation operators or transformed by a mode unitary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ComplexCompensatedSum, CompensatedSum, NORM_TOLERANCE, PRUNE_THRESHOLD};

/// Number of spatial modes `n` and internal modes `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeLayout {
    pub spatial: usize,
    pub internal: usize,
}

impl ModeLayout {
    pub fn new(spatial: usize, internal: usize) -> Self {
        assert!(spatial >= 1 && internal >= 1, "mode layout needs n >= 1 and d >= 1");
        Self { spatial, internal }
    }

    /// Total single-photon modes `n * d`.
    pub fn modes(&self) -> usize {
        self.spatial * self.internal
    }

    pub fn flat(&self, index: ModeIndex) -> usize {
        debug_assert!(index.spatial < self.spatial && index.internal < self.internal);
        index.spatial * self.internal + index.internal
    }

    pub fn unflat(&self, flat: usize) -> ModeIndex {
        ModeIndex {
            spatial: flat / self.internal,
            internal: flat % self.internal,
        }
    }

    pub(crate) fn ensure_same(&self, other: &ModeLayout) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::LayoutMismatch {
                expected: *self,
                found: *other,
            })
        }
    }
}

impl fmt::Display for ModeLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} spatial x {} internal", self.spatial, self.internal)
    }
}

/// A (spatial, internal) mode pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    pub spatial: usize,
    pub internal: usize,
}

impl ModeIndex {
    pub fn new(spatial: usize, internal: usize) -> Self {
        Self { spatial, internal }
    }
}

/// Photon counts per flattened mode. Ordering is lexicographic in flattened order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn vacuum(layout: &ModeLayout) -> Self {
        Self(vec![0; layout.modes()])
    }

    /// Counts obtained by placing one photon in each listed mode.
    pub fn from_photons(layout: &ModeLayout, photons: &[ModeIndex]) -> Self {
        let mut counts = vec![0; layout.modes()];
        for &p in photons {
            counts[layout.flat(p)] += 1;
        }
        Self(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, flat: usize) -> u32 {
        self.0[flat]
    }

    /// Photon number per spatial mode, internal modes summed out.
    pub fn spatial_counts(&self, layout: &ModeLayout) -> Vec<u32> {
        self.0
            .chunks(layout.internal)
            .map(|chunk| chunk.iter().sum())
            .collect()
    }

    /// `sum_k k * m_k` over spatial counts.
    pub fn weighted_spatial_sum(&self, layout: &ModeLayout) -> u64 {
        self.spatial_counts(layout)
            .iter()
            .enumerate()
            .map(|(k, &m)| k as u64 * m as u64)
            .sum()
    }

    pub(crate) fn check_len(&self, layout: &ModeLayout) -> Result<()> {
        if self.0.len() == layout.modes() {
            Ok(())
        } else {
            Err(Error::OccupationLength {
                expected: layout.modes(),
                found: self.0.len(),
            })
        }
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ">")
    }
}

/// Result of [`FockState::photon_number_sector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// Every basis key carries this total photon number.
    Definite(u32),
    /// Keys with different totals are present.
    Mixed,
    /// The zero vector has no sector.
    Zero,
}

/// Sparse pure state: coefficients in the orthonormal occupation-number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    layout: ModeLayout,
    amplitudes: BTreeMap<OccupationVector, Complex64>,
}

impl FockState {
    pub fn vacuum(layout: ModeLayout) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(OccupationVector::vacuum(&layout), Complex64::new(1.0, 0.0));
        Self { layout, amplitudes }
    }

    /// The zero vector.
    pub fn zero(layout: ModeLayout) -> Self {
        Self {
            layout,
            amplitudes: BTreeMap::new(),
        }
    }

    /// Unit-norm basis state `prod_k (a_k^dag)^{m_k} / sqrt(m_k!) |vac>`.
    pub fn basis_state(layout: ModeLayout, counts: OccupationVector) -> Result<Self> {
        counts.check_len(&layout)?;
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(counts, Complex64::new(1.0, 0.0));
        Ok(Self { layout, amplitudes })
    }

    /// Normalized state for the multiset of creation operators `photons`.
    pub fn from_photons(layout: ModeLayout, photons: &[ModeIndex]) -> Result<Self> {
        for p in photons {
            if p.spatial >= layout.spatial || p.internal >= layout.internal {
                return Err(Error::Precondition(format!(
                    "mode ({}, {}) outside layout {layout}",
                    p.spatial, p.internal
                )));
            }
        }
        Self::basis_state(layout, OccupationVector::from_photons(&layout, photons))
    }

    /// State with the given basis coefficients; repeated keys are summed. Not normalized.
    pub fn from_terms<I>(layout: ModeLayout, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex64)>,
    {
        let mut amplitudes: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        for (key, amp) in terms {
            key.check_len(&layout)?;
            *amplitudes.entry(key).or_default() += amp;
        }
        Ok(Self::from_map(layout, amplitudes))
    }

    pub(crate) fn from_map(
        layout: ModeLayout,
        mut amplitudes: BTreeMap<OccupationVector, Complex64>,
    ) -> Self {
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        Self { layout, amplitudes }
    }

    /// Linear combination `sum_i c_i |psi_i>`. Not normalized; amplitudes that
    /// cancel below the prune threshold are removed.
    pub fn superpose(terms: &[(Complex64, &FockState)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::EmptySuperposition)?;
        let layout = first.layout;
        let mut acc: BTreeMap<OccupationVector, ComplexCompensatedSum> = BTreeMap::new();
        for (coef, state) in terms {
            layout.ensure_same(&state.layout)?;
            for (key, amp) in &state.amplitudes {
                acc.entry(key.clone()).or_default().add(coef * amp);
            }
        }
        let amplitudes = acc.into_iter().map(|(k, s)| (k, s.value())).collect();
        Ok(Self::from_map(layout, amplitudes))
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn amplitude(&self, key: &OccupationVector) -> Complex64 {
        self.amplitudes.get(key).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.amplitudes.iter()
    }

    /// Number of stored basis keys.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// True when every amplitude was pruned away.
    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `<a|b>`, conjugate-linear in `a`.
    pub fn inner_product(a: &FockState, b: &FockState) -> Result<Complex64> {
        a.layout.ensure_same(&b.layout)?;
        let (small, large, conj_small) = if a.len() <= b.len() {
            (a, b, true)
        } else {
            (b, a, false)
        };
        let mut acc = ComplexCompensatedSum::new();
        for (key, x) in &small.amplitudes {
            if let Some(y) = large.amplitudes.get(key) {
                acc.add(if conj_small { x.conj() * y } else { y.conj() * x });
            }
        }
        Ok(acc.value())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .values()
            .map(|a| a.norm_sqr())
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if self.is_zero() || norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(k, a)| (k.clone(), a * c))
            .collect();
        Self::from_map(self.layout, amplitudes)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &FockState) -> Result<Self> {
        Self::superpose(&[(Complex64::new(1.0, 0.0), self), (c, other)])
    }

    pub fn photon_number_sector(&self) -> Sector {
        let mut totals = self.amplitudes.keys().map(OccupationVector::total);
        match totals.next() {
            None => Sector::Zero,
            Some(first) => {
                if totals.all(|t| t == first) {
                    Sector::Definite(first)
                } else {
                    Sector::Mixed
                }
            }
        }
    }

    /// All total photon numbers present.
    pub fn photon_numbers(&self) -> BTreeSet<u32> {
        self.amplitudes.keys().map(OccupationVector::total).collect()
    }

    pub fn max_photons(&self) -> u32 {
        self.amplitudes
            .keys()
            .map(OccupationVector::total)
            .max()
            .unwrap_or(0)
    }

    /// Largest amplitude difference `max_k |a_k - b_k|` over the union of keys.
    pub fn max_abs_diff(&self, other: &FockState) -> Result<f64> {
        self.layout.ensure_same(&other.layout)?;
        let mut worst: f64 = 0.0;
        for (k, a) in &self.amplitudes {
            worst = worst.max((a - other.amplitude(k)).norm());
        }
        for (k, b) in &other.amplitudes {
            if !self.amplitudes.contains_key(k) {
                worst = worst.max(b.norm());
            }
        }
        Ok(worst)
    }

    /// Expected photon number in one flattened mode.
    pub fn mode_occupation(&self, flat: usize) -> f64 {
        self.amplitudes
            .iter()
            .map(|(k, a)| k.get(flat) as f64 * a.norm_sqr())
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Density operator given by a pure-state decomposition `sum_j p_j |psi_j><psi_j|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    layout: ModeLayout,
    components: Vec<(f64, FockState)>,
}

impl MixedState {
    pub fn new(components: Vec<(f64, FockState)>) -> Result<Self> {
        let layout = components
            .first()
            .map(|(_, s)| s.layout())
            .ok_or_else(|| Error::InvalidMixture("no components".into()))?;
        let mut total = CompensatedSum::new();
        for (i, (p, state)) in components.iter().enumerate() {
            layout.ensure_same(&state.layout())?;
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::InvalidMixture(format!("weight {i} is {p}")));
            }
            if !state.is_normalized() {
                return Err(Error::InvalidMixture(format!(
                    "component {i} has norm^2 {}",
                    state.norm_sqr()
                )));
            }
            total.add(*p);
        }
        if (total.value() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidMixture(format!(
                "weights sum to {}",
                total.value()
            )));
        }
        Ok(Self { layout, components })
    }

    pub fn pure(state: FockState) -> Result<Self> {
        Self::new(vec![(1.0, state)])
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn components(&self) -> &[(f64, FockState)] {
        &self.components
    }

    pub fn photon_numbers(&self) -> BTreeSet<u32> {
        self.components
            .iter()
            .flat_map(|(_, s)| s.photon_numbers())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_mode() -> ModeLayout {
        ModeLayout::new(2, 1)
    }

    #[test]
    fn vacuum_is_normalized() {
        let vac = FockState::basis_state(two_mode(), vec![0, 0].into()).unwrap();
        assert_eq!(vac, FockState::vacuum(two_mode()));
        assert!((vac.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(vac.photon_number_sector(), Sector::Definite(0));
    }

    #[test]
    fn distinct_modes_need_no_factorial() {
        let s = FockState::from_photons(two_mode(), &[ModeIndex::new(0, 0), ModeIndex::new(1, 0)])
            .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude(&vec![1, 1].into()), c(1.0, 0.0));
    }

    #[test]
    fn doubled_mode_has_two_photons() {
        let s = FockState::basis_state(two_mode(), vec![2, 0].into()).unwrap();
        assert!((s.mode_occupation(0) - 2.0).abs() < 1e-15);
        assert!(s.mode_occupation(1).abs() < 1e-15);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let err = FockState::basis_state(two_mode(), vec![1, 0, 0].into()).unwrap_err();
        assert!(matches!(err, Error::OccupationLength { expected: 2, found: 3 }));
    }

    #[test]
    fn superpose_drops_zero_coefficient() {
        let a = FockState::basis_state(two_mode(), vec![1, 0].into()).unwrap();
        let b = FockState::basis_state(two_mode(), vec![0, 1].into()).unwrap();
        let s = FockState::superpose(&[(c(1.0, 0.0), &a), (c(0.0, 0.0), &b)]).unwrap();
        assert_eq!(s, a);
    }

    #[test]
    fn superpose_orthogonal_terms_is_unit_norm() {
        let a = FockState::basis_state(two_mode(), vec![1, 0].into()).unwrap();
        let b = FockState::basis_state(two_mode(), vec![0, 1].into()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = FockState::superpose(&[(c(h, 0.0), &a), (c(h, 0.0), &b)]).unwrap();
        assert!(s.is_normalized());
    }

    #[test]
    fn superpose_cancellation_is_zero() {
        let a = FockState::basis_state(two_mode(), vec![1, 0].into()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = FockState::superpose(&[(c(h, 0.0), &a), (c(-h, 0.0), &a)]).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.photon_number_sector(), Sector::Zero);
        assert_eq!(s.normalize().unwrap_err(), Error::ZeroState);
    }

    #[test]
    fn superpose_rejects_empty_and_mismatch() {
        assert_eq!(FockState::superpose(&[]).unwrap_err(), Error::EmptySuperposition);
        let a = FockState::vacuum(two_mode());
        let b = FockState::vacuum(ModeLayout::new(3, 1));
        assert!(matches!(
            FockState::superpose(&[(c(1.0, 0.0), &a), (c(1.0, 0.0), &b)]),
            Err(Error::LayoutMismatch { .. })
        ));
        assert!(FockState::inner_product(&a, &b).is_err());
    }

    #[test]
    fn inner_products_of_basis_states() {
        let vac = FockState::vacuum(two_mode());
        assert_eq!(FockState::inner_product(&vac, &vac).unwrap(), c(1.0, 0.0));
        let a = FockState::basis_state(two_mode(), vec![1, 0].into()).unwrap();
        let b = FockState::basis_state(two_mode(), vec![0, 1].into()).unwrap();
        assert_eq!(FockState::inner_product(&a, &b).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let a = FockState::from_terms(two_mode(), [(vec![1, 0].into(), c(0.0, 1.0))]).unwrap();
        let b = FockState::basis_state(two_mode(), vec![1, 0].into()).unwrap();
        assert_eq!(FockState::inner_product(&a, &b).unwrap(), c(0.0, -1.0));
        assert_eq!(FockState::inner_product(&b, &a).unwrap(), c(0.0, 1.0));
    }

    #[test]
    fn sectors() {
        let layout = ModeLayout::new(3, 1);
        let one_each = FockState::basis_state(layout, vec![1, 1, 1].into()).unwrap();
        assert_eq!(one_each.photon_number_sector(), Sector::Definite(3));
        let mixed = FockState::from_terms(
            layout,
            [
                (vec![1, 0, 0].into(), c(1.0, 0.0)),
                (vec![1, 1, 0].into(), c(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(mixed.photon_number_sector(), Sector::Mixed);
    }

    #[test]
    fn mixture_validation() {
        let a = FockState::basis_state(two_mode(), vec![1, 0].into()).unwrap();
        let b = FockState::basis_state(two_mode(), vec![0, 1].into()).unwrap();
        assert!(MixedState::new(vec![(0.5, a.clone()), (0.5, b.clone())]).is_ok());
        assert!(MixedState::new(vec![(0.6, a.clone()), (0.5, b.clone())]).is_err());
        assert!(MixedState::new(vec![(-0.5, a.clone()), (1.5, b)]).is_err());
        assert!(MixedState::new(vec![(1.0, a.scale(c(2.0, 0.0)))]).is_err());
        assert!(MixedState::new(vec![]).is_err());
    }

    #[test]
    fn spatial_counts_trace_internal_modes() {
        let layout = ModeLayout::new(3, 2);
        let occ = OccupationVector::from_photons(
            &layout,
            &[ModeIndex::new(0, 1), ModeIndex::new(2, 0), ModeIndex::new(2, 1)],
        );
        assert_eq!(occ.spatial_counts(&layout), vec![1, 0, 2]);
        assert_eq!(occ.weighted_spatial_sum(&layout), 4);
    }
}
