//! Oracle-equivalence suite.
//!
//! Each check draws seeded random inputs, computes a quantity on the sparse
//! fast path and again with the dense oracle (or through an independent
//! identity), and records the worst disagreement against a fixed tolerance.

use num_complex::Complex64;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::detection::{self, DualProbability};
use crate::error::{Error, Result};
use crate::fock::{FockState, MixedState, ModeIndex, ModeLayout};
use crate::linops::{max_abs_diff, unitarity_defect, CMatrix, ModeUnitary};
use crate::metrology::{self, EstimationProtocol, OneBodyGenerator, Probe, SymmetryClass};
use crate::oracle::{self, DenseSectorBasis};
use crate::permutation::Permutation;
use crate::random;
use crate::symmetry;

/// Outcome of one identity check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random cases per randomized identity.
    pub cases: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 2024, cases: 100 }
    }
}

type CheckFn = fn(&mut ChaCha8Rng, usize) -> Result<(usize, f64)>;

/// Name, tolerance, check. Tolerances of the finite-difference checks are relative.
const CHECKS: &[(&str, f64, CheckFn)] = &[
    ("number-operator-expectation", 1e-12, check_number_operator),
    ("inner-product-dense", 1e-12, check_inner_product),
    ("unitary-action-dense", 1e-10, check_unitary_action),
    ("homomorphism", 1e-10, check_homomorphism),
    ("embedding-unitarity", 1e-9, check_embedding_unitarity),
    ("residue-projector-dense", 1e-10, check_residue_projector),
    ("projector-spectrum", 1e-9, check_projector_spectrum),
    ("exchange-decomposition", 1e-12, check_decomposition),
    ("effective-symmetry-equal-occupation", 1e-10, check_effective_symmetry),
    ("extremal-mixture-eigenstates", 1e-8, check_extremal_mixtures),
    ("block-dft-diagonalization", 1e-10, check_block_dft),
    ("output-distribution-dense", 1e-10, check_output_distribution),
    ("parity-four-photon-dense", 1e-10, check_four_photon_parity),
    ("orthogonal-internal-residues", 1e-10, check_orthogonal_internal),
    ("detection-symmetry-duality", 1e-10, check_duality),
    ("mixed-statistics-dense", 1e-10, check_mixed_statistics),
    ("evolve-dense-expm", 1e-9, check_evolve),
    ("expm-group-law", 1e-9, check_expm_group_law),
    ("qfi-dense", 1e-9, check_qfi),
    ("conjugation-covariance", 1e-9, check_conjugation),
    ("commutator-fisher-dense", 1e-9, check_commutator_dense),
    ("symmetry-adapted-vs-commutator", 1e-9, check_adapted_vs_commutator),
    ("fisher-extrapolation", 1e-3, check_extrapolation),
    ("hom-protocol-exchange-variance", 1e-9, check_hom_protocol_exact),
    ("hom-protocol-finite-difference", 1e-3, check_hom_protocol_limit),
    ("alternating-delay-antisymmetric-probe", 1e-9, check_alternating_probe),
    ("mixed-fisher-sld", 1e-6, check_mixed_sld),
    ("sld-convexity", 1e-9, check_sld_convexity),
    ("predft-eigenvalue", 1e-10, check_predft),
];

/// Run every check; a check that returns an error counts as failed.
pub fn run_suite(options: VerifyOptions) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(name, tolerance, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(i as u64));
            match check(&mut rng, options.cases) {
                Ok((cases, max_error)) => CheckResult {
                    name,
                    cases,
                    max_error,
                    tolerance,
                    passed: max_error <= tolerance,
                    error: None,
                },
                Err(e) => CheckResult {
                    name,
                    cases: 0,
                    max_error: f64::NAN,
                    tolerance,
                    passed: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn pick_layout(rng: &mut ChaCha8Rng, spatial: &[usize], internal: &[usize]) -> ModeLayout {
    ModeLayout::new(
        *spatial.choose(rng).expect("non-empty"),
        *internal.choose(rng).expect("non-empty"),
    )
}

fn dense_vector_diff(state: &FockState, v: &oracle::CVector, basis: &DenseSectorBasis) -> Result<f64> {
    let w = oracle::to_dense(state, basis)?;
    Ok((w - v).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Random state projected onto the `omega^k` eigenspace of the cyclic shift.
fn eigen_probe(rng: &mut ChaCha8Rng, layout: ModeLayout, photons: u32, k: usize) -> Result<FockState> {
    for _ in 0..16 {
        let s = random::sector_state(rng, layout, photons)?;
        let p = symmetry::project_residue(&s, k);
        if p.norm() > 1e-3 {
            return p.normalize();
        }
    }
    Err(Error::Precondition(format!(
        "eigenspace {k} of {layout} with {photons} photons looks empty"
    )))
}

fn check_number_operator(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let layout = ModeLayout::new(2, 2);
    let two = FockState::from_photons(layout, &[ModeIndex::new(0, 0), ModeIndex::new(0, 0)])?;
    let mut h = CMatrix::zeros(4, 4);
    h[(0, 0)] = c(1.0);
    let basis = DenseSectorBasis::for_state(&two)?;
    let dense = oracle::expectation(&oracle::to_dense(&two, &basis)?, &oracle::embed_generator(&h, &basis)?);
    let mut worst = (dense - c(2.0)).norm();
    let g = OneBodyGenerator::new(layout, h)?;
    worst = worst.max((g.expectation(&two)? - 2.0).abs());
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2, 3], &[1, 2]);
        let n = rng.random_range(1..=3);
        let s = random::sector_state(rng, layout, n)?;
        let g = random::hermitian_generator(rng, layout, 1.0)?;
        let basis = DenseSectorBasis::for_state(&s)?;
        let dense = oracle::expectation(&oracle::to_dense(&s, &basis)?, &oracle::embed_generator(g.matrix(), &basis)?);
        worst = worst.max((dense.re - g.expectation(&s)?).abs());
    }
    Ok((cases + 1, worst))
}

fn check_inner_product(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2, 3, 4], &[1, 2]);
        let n = rng.random_range(0..=3);
        let a = random::sparse_sector_state(rng, layout, n, 3)?;
        let b = random::sparse_sector_state(rng, layout, n, 3)?;
        let basis = DenseSectorBasis::sector(layout, n)?;
        let dense = (oracle::to_dense(&a, &basis)?.adjoint() * oracle::to_dense(&b, &basis)?)[(0, 0)];
        worst = worst.max((FockState::inner_product(&a, &b)? - dense).norm());
    }
    Ok((cases, worst))
}

fn check_unitary_action(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for i in 0..cases {
        let layout = if i % 2 == 0 { ModeLayout::new(3, 1) } else { pick_layout(rng, &[2, 3], &[2]) };
        let u = if i % 4 == 3 {
            random::haar_general(rng, layout)?
        } else {
            random::haar_spatial(rng, layout)?
        };
        let s = random::sector_state(rng, layout, 2)?;
        let basis = DenseSectorBasis::for_state(&s)?;
        let dense = oracle::embed_unitary(&u, &basis)? * oracle::to_dense(&s, &basis)?;
        worst = worst.max(dense_vector_diff(&u.apply(&s)?, &dense, &basis)?);
    }
    Ok((cases, worst))
}

fn check_homomorphism(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2, 3, 4], &[1, 2]);
        let m = random::haar_spatial(rng, layout)?;
        let n = random::haar_general(rng, layout)?;
        let photons = rng.random_range(1..=3);
        let s = random::sparse_sector_state(rng, layout, photons, 4)?;
        let joint = m.compose(&n)?.apply(&s)?;
        let chained = m.apply(&n.apply(&s)?)?;
        worst = worst.max(joint.max_abs_diff(&chained)?);
    }
    // dense homomorphism of the embedding itself
    for _ in 0..cases / 10 {
        let layout = ModeLayout::new(3, 1);
        let m = random::haar_spatial(rng, layout)?;
        let n = random::haar_spatial(rng, layout)?;
        let basis = DenseSectorBasis::sector(layout, 3)?;
        let lhs = oracle::embed_unitary(&m.compose(&n)?, &basis)?;
        let rhs = oracle::embed_unitary(&m, &basis)? * oracle::embed_unitary(&n, &basis)?;
        worst = worst.max(max_abs_diff(&lhs, &rhs));
    }
    Ok((cases + cases / 10, worst))
}

fn check_embedding_unitarity(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = ModeLayout::new(3, 1);
        let u = random::haar_spatial(rng, layout)?;
        let basis = DenseSectorBasis::sector(layout, 2)?;
        worst = worst.max(unitarity_defect(&oracle::embed_unitary(&u, &basis)?));
    }
    Ok((cases, worst))
}

fn check_residue_projector(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let layout = ModeLayout::new(3, 1);
    let basis = DenseSectorBasis::sector(layout, 2)?;
    let projectors = (0..3)
        .map(|j| oracle::dense_projector_residue_on(&basis, j))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..cases {
        let s = random::sector_state(rng, layout, 2)?;
        let j = i % 3;
        let dense = &projectors[j] * oracle::to_dense(&s, &basis)?;
        worst = worst.max(dense_vector_diff(&symmetry::project_residue(&s, j), &dense, &basis)?);
        let weight = symmetry::residue_weights(&s)[j];
        worst = worst.max((weight - oracle::expectation(&oracle::to_dense(&s, &basis)?, &projectors[j]).re).abs());
    }
    Ok((cases, worst))
}

fn check_projector_spectrum(_: &mut ChaCha8Rng, _: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 2..=4 {
        for photons in 1..=3 {
            let layout = ModeLayout::new(n, 1);
            let basis = DenseSectorBasis::sector(layout, photons)?;
            for j in 0..n {
                let p = oracle::dense_projector_residue_on(&basis, j)?;
                let eig = nalgebra::SymmetricEigen::new(p.clone());
                for &l in eig.eigenvalues.iter() {
                    worst = worst.max(l.abs().min((l - 1.0).abs()));
                }
                worst = worst.max(max_abs_diff(&(&p * &p), &p));
                cases += 1;
            }
        }
    }
    Ok((cases, worst))
}

fn check_decomposition(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2], &[1, 2, 3]);
        let s = random::sector_state(rng, layout, 2)?;
        let (sym, anti) = symmetry::decompose_exchange(&s)?;
        let rebuilt = FockState::superpose(&[(c(1.0), &sym), (c(1.0), &anti)])?;
        worst = worst.max(rebuilt.max_abs_diff(&s)?);
        worst = worst.max(symmetry::exchange(&sym)?.max_abs_diff(&sym)?);
        worst = worst.max(symmetry::exchange(&anti)?.max_abs_diff(&anti.scale(c(-1.0)))?);
        let e = symmetry::exchange_expectation(&s)?.re;
        worst = worst.max((sym.norm_sqr() - (1.0 + e) / 2.0).abs());
        worst = worst.max((anti.norm_sqr() - (1.0 - e) / 2.0).abs());
    }
    Ok((cases, worst))
}

fn check_effective_symmetry(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2], &[1, 2, 3]);
        let photons = 2 * rng.random_range(1..=2);
        let keys: Vec<_> = random::sector_keys(layout.modes(), photons)
            .into_iter()
            .filter(|k| {
                let m = k.spatial_counts(&layout);
                m[0] == m[1]
            })
            .collect();
        let s = FockState::from_terms(
            layout,
            keys.into_iter()
                .map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))),
        )?
        .normalize()?;
        let theta = rng.random_range(-3.0..3.0);
        let phi = rng.random_range(-3.0..3.0);
        let eff = symmetry::effective_symmetry(layout, theta, phi)?;
        let e_eff = FockState::inner_product(&s, &eff.apply(&s)?)?;
        worst = worst.max((e_eff - symmetry::exchange_expectation(&s)?).norm());
    }
    Ok((cases, worst))
}

fn check_extremal_mixtures(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2, 3, 4], &[1, 2]);
        let n = layout.spatial;
        let k = rng.random_range(0..n);
        let parts = (0..3)
            .map(|_| Ok((1.0 / 3.0, eigen_probe(rng, layout, 2, k)?)))
            .collect::<Result<Vec<_>>>()?;
        let rho = MixedState::new(parts)?;
        let t = symmetry::mixed_cyclic_expectations(&rho)[1 % n];
        worst = worst.max((t.norm() - 1.0).abs());
        // |tr(rho P)| = 1 forces each component into the eigenspace of tr(rho P)
        for (_, s) in rho.components() {
            let shifted = symmetry::cyclic_power(s, 1);
            worst = worst.max(shifted.add_scaled(-t, s)?.norm());
        }
    }
    Ok((cases, worst))
}

fn check_block_dft(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.random_range(1..=6);
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        let sigma = Permutation::new(images)?;
        let layout = ModeLayout::new(n, 1);
        let v = symmetry::block_dft_diagonalizer(layout, &sigma)?;
        let p = ModeUnitary::permutation(layout, &sigma)?;
        let d = v.adjoint().compose(&p)?.compose(&v)?;
        for r in 0..n {
            for col in 0..n {
                if r != col {
                    worst = worst.max(d.matrix()[(r, col)].norm());
                }
            }
        }
    }
    Ok((cases, worst))
}

fn distribution_diff(a: &detection::OutcomeDistribution, b: &detection::OutcomeDistribution) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, p) in a.entries() {
        worst = worst.max((p - b.probability(k)).abs());
    }
    for (k, p) in b.entries() {
        worst = worst.max((p - a.probability(k)).abs());
    }
    worst
}

fn check_output_distribution(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for i in 0..cases {
        let layout = if i % 2 == 0 { ModeLayout::new(3, 1) } else { ModeLayout::new(3, 2) };
        let s = random::sector_state(rng, layout, 2)?;
        let u = ModeUnitary::dft(layout)?;
        let fast = detection::output_distribution(&s, &u)?;
        let dense = oracle::dense_output_distribution(&s, &u)?;
        worst = worst.max(distribution_diff(&fast, &dense));
        worst = worst.max((fast.total() - 1.0).abs());
    }
    Ok((cases, worst))
}

fn check_four_photon_parity(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let layout = ModeLayout::new(2, 1);
    let s = FockState::basis_state(layout, vec![2, 2].into())?;
    let dense = oracle::dense_output_distribution(&s, &ModeUnitary::hadamard(layout)?)?;
    let value = detection::parity_even_probability(&s)?;
    let mut worst = (value.detection - dense.parity_even()).abs().max(value.discrepancy());
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2], &[1, 2]);
        let s = random::sector_state(rng, layout, 4)?;
        let dense = oracle::dense_output_distribution(&s, &ModeUnitary::hadamard(layout)?)?;
        let value = detection::parity_even_probability(&s)?;
        worst = worst.max((value.detection - dense.parity_even()).abs());
    }
    Ok((cases + 1, worst))
}

fn check_orthogonal_internal(_: &mut ChaCha8Rng, _: usize) -> Result<(usize, f64)> {
    let layout = ModeLayout::new(3, 2);
    let s = FockState::from_photons(layout, &[ModeIndex::new(0, 0), ModeIndex::new(1, 1)])?;
    let dense = oracle::dense_output_distribution(&s, &ModeUnitary::dft(layout)?)?;
    let fast = detection::modular_sum_probabilities(&s)?;
    let mut worst: f64 = 0.0;
    for (j, d) in fast.iter().enumerate() {
        let oracle_p = dense.weighted_sum_probability((3 - j) % 3);
        for x in [d.detection, d.symmetry, oracle_p] {
            worst = worst.max((x - 1.0 / 3.0).abs());
        }
    }
    let e = symmetry::cyclic_expectations(&s);
    worst = worst.max(e[1].norm()).max(e[2].norm());
    Ok((1, worst))
}

fn check_duality(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 2..=4 {
        for d in 1..=3 {
            for photons in 1..=4 {
                let layout = ModeLayout::new(n, d);
                for _ in 0..cases / 10 {
                    let s = random::sparse_sector_state(rng, layout, photons, 4)?;
                    worst = worst.max(duality_error(&s)?);
                    count += 1;
                }
            }
        }
    }
    Ok((count, worst))
}

/// Largest detection/symmetry disagreement over every closed-form probability of `s`.
pub fn duality_error(s: &FockState) -> Result<f64> {
    let layout = s.layout();
    let mut all: Vec<DualProbability> = detection::modular_sum_probabilities(s)?;
    if layout.spatial == 2 {
        all.push(detection::parity_even_probability(s)?);
        if s.photon_number_sector() == crate::fock::Sector::Definite(2) {
            all.push(detection::coincidence_probability(s)?);
        }
    }
    let mut worst = all.iter().map(DualProbability::discrepancy).fold(0.0, f64::max);
    let sum: f64 = symmetry::residue_weights(s).iter().sum();
    worst = worst.max((sum - 1.0).abs());
    Ok(worst)
}

fn check_mixed_statistics(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for i in 0..cases {
        let layout = pick_layout(rng, &[2, 3], &[1, 2]);
        let rho = random::sector_mixture(rng, layout, 2, 3)?;
        let u = if i % 2 == 0 {
            ModeUnitary::dft(layout)?
        } else {
            random::haar_spatial(rng, layout)?
        };
        let j = rng.random_range(0..layout.spatial);
        let value = detection::mixed_output_statistics(&rho, &u, j)?;
        let target = (layout.spatial - j) % layout.spatial;
        let mut dense = 0.0;
        for (p, s) in rho.components() {
            dense += p * oracle::dense_output_distribution(s, &u)?.weighted_sum_probability(target);
        }
        worst = worst.max((value.detection - dense).abs()).max(value.discrepancy());
    }
    Ok((cases, worst))
}

fn check_evolve(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2, 3], &[1, 2]);
        let g = random::hermitian_generator(rng, layout, 1.0)?;
        let s = random::sector_state(rng, layout, 2)?;
        let basis = DenseSectorBasis::for_state(&s)?;
        let dense = oracle::dense_expm(&oracle::embed_generator(g.matrix(), &basis)?, 0.1)
            * oracle::to_dense(&s, &basis)?;
        worst = worst.max(dense_vector_diff(&metrology::evolve(&s, &g, 0.1)?, &dense, &basis)?);
    }
    Ok((cases, worst))
}

fn check_expm_group_law(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = ModeLayout::new(2, 2);
        let g = random::hermitian_generator(rng, layout, 1.0)?;
        let basis = DenseSectorBasis::sector(layout, 2)?;
        let h = oracle::embed_generator(g.matrix(), &basis)?;
        let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let lhs = oracle::dense_expm(&h, a) * oracle::dense_expm(&h, b);
        worst = worst.max(max_abs_diff(&lhs, &oracle::dense_expm(&h, a + b)));
        worst = worst.max(unitarity_defect(&lhs));
    }
    Ok((cases, worst))
}

fn check_qfi(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2, 3], &[1, 2]);
        let photons = rng.random_range(1..=3);
        let g = random::hermitian_generator(rng, layout, 1.0)?;
        let s = random::sector_state(rng, layout, photons)?;
        let basis = DenseSectorBasis::for_state(&s)?;
        let dense = 4.0 * oracle::variance(&oracle::to_dense(&s, &basis)?, &oracle::embed_generator(g.matrix(), &basis)?);
        worst = worst.max(rel(metrology::qfi(&s, &g)?, dense));
    }
    Ok((cases, worst))
}

fn check_conjugation(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2, 3], &[1, 2]);
        let g = random::hermitian_generator(rng, layout, 1.0)?;
        let l = rng.random_range(0..layout.spatial);
        let basis = DenseSectorBasis::sector(layout, 2)?;
        let p = oracle::embed_unitary(
            &ModeUnitary::permutation(layout, &Permutation::cyclic_shift(layout.spatial, l as i64))?,
            &basis,
        )?;
        let lhs = &p * oracle::embed_generator(g.matrix(), &basis)? * p.adjoint();
        let rhs = oracle::embed_generator(g.cyclic_conjugate(l)?.matrix(), &basis)?;
        worst = worst.max(max_abs_diff(&lhs, &rhs));
    }
    Ok((cases, worst))
}

/// Random probe from a random class together with a random generator.
fn admissible_protocol(rng: &mut ChaCha8Rng) -> Result<EstimationProtocol> {
    let layout = pick_layout(rng, &[2, 3, 4], &[1, 2]);
    let n = layout.spatial;
    let k = if n.is_multiple_of(2) && rng.random_bool(0.5) { n / 2 } else { 0 };
    let photons = if layout.modes() > 6 { 2 } else { rng.random_range(2..=3) };
    let probe = eigen_probe(rng, layout, photons, k)?;
    let g = random::hermitian_generator(rng, layout, 1.0)?;
    EstimationProtocol::dft(Probe::Pure(probe), g)
}

fn check_commutator_dense(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let protocol = admissible_protocol(rng)?;
        let Probe::Pure(s) = protocol.probe() else { unreachable!() };
        let basis = DenseSectorBasis::for_state(s)?;
        let h = oracle::embed_generator(protocol.generator().matrix(), &basis)?;
        let pi = oracle::dense_projector_residue_on(&basis, 0)?;
        let comm = (&h * &pi - &pi * &h) * Complex64::new(0.0, 1.0);
        let dense = 4.0 * oracle::variance(&oracle::to_dense(s, &basis)?, &comm);
        worst = worst.max(rel(metrology::fisher_limit_commutator(&protocol)?, dense));
    }
    Ok((cases, worst))
}

fn check_adapted_vs_commutator(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let protocol = admissible_protocol(rng)?;
        let a = metrology::fisher_symmetry_adapted(&protocol)?;
        let b = metrology::fisher_limit_commutator(&protocol)?;
        worst = worst.max(rel(a, b));
    }
    Ok((cases, worst))
}

fn check_extrapolation(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let protocol = admissible_protocol(rng)?;
        let exact = metrology::fisher_limit_commutator(&protocol)?;
        let limit = metrology::fisher_limit_extrapolated(&protocol)?;
        worst = worst.max((limit - exact).abs() / exact.abs().max(1e-6));
    }
    Ok((cases, worst))
}

fn check_hom_protocol_exact(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    hom_protocol(rng, cases, false)
}

fn check_hom_protocol_limit(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    hom_protocol(rng, cases, true)
}

/// Two-mode protocol with a frequency-antisymmetric biphoton against `Var(H - S H S)`,
/// either through the extrapolated finite-difference FI or the symmetry-adapted formula.
fn hom_protocol(rng: &mut ChaCha8Rng, cases: usize, finite_difference: bool) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let d = rng.random_range(2..=3);
        let layout = ModeLayout::new(2, d);
        // frequency-antisymmetric biphoton: sum over l < m of c_lm (|l,m> - |m,l>)
        let mut terms = Vec::new();
        for l in 0..d {
            for m in (l + 1)..d {
                let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let a = FockState::from_photons(layout, &[ModeIndex::new(0, l), ModeIndex::new(1, m)])?;
                let b = FockState::from_photons(layout, &[ModeIndex::new(0, m), ModeIndex::new(1, l)])?;
                terms.push((amp, a));
                terms.push((-amp, b));
            }
        }
        let refs: Vec<(Complex64, &FockState)> = terms.iter().map(|(a, s)| (*a, s)).collect();
        let probe = FockState::superpose(&refs)?.normalize()?;
        let g = random::hermitian_generator(rng, layout, 1.0)?;
        let swapped = g.cyclic_conjugate(1)?;
        let diff = g.combine(1.0, &swapped, -1.0)?;
        let expected = diff.variance(&probe)?;
        let protocol = EstimationProtocol::dft(Probe::Pure(probe), g)?;
        if protocol.symmetry_class() != SymmetryClass::Antisymmetric {
            return Err(Error::Precondition("biphoton is not antisymmetric".into()));
        }
        let err = if finite_difference {
            let limit = metrology::fisher_limit_extrapolated(&protocol)?;
            (limit - expected).abs() / expected.abs().max(1e-6)
        } else {
            rel(metrology::fisher_symmetry_adapted(&protocol)?, expected)
        };
        worst = worst.max(err);
    }
    Ok((cases, worst))
}

fn check_alternating_probe(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = ModeLayout::new(4, rng.random_range(1..=2));
        let freqs: Vec<f64> = (0..layout.internal).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g = OneBodyGenerator::alternating_delay(layout, &freqs)?;
        let probe = eigen_probe(rng, layout, 2, 2)?;
        let q = metrology::qfi(&probe, &g)?;
        let protocol = EstimationProtocol::dft(Probe::Pure(probe), g)?;
        worst = worst.max(rel(metrology::fisher_symmetry_adapted(&protocol)?, q));
        worst = worst.max(rel(metrology::fisher_limit_commutator(&protocol)?, q));
    }
    Ok((cases, worst))
}

fn check_mixed_sld(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for i in 0..cases {
        let layout = pick_layout(rng, &[2, 4], &[1, 2]);
        let n = layout.spatial;
        let k = if i % 2 == 0 { 0 } else { n / 2 };
        let w = rng.random_range(0.2..0.8);
        let rho = MixedState::new(vec![
            (w, eigen_probe(rng, layout, 2, k)?),
            (1.0 - w, eigen_probe(rng, layout, 2, k)?),
        ])?;
        let g = random::hermitian_generator(rng, layout, 1.0)?;
        let protocol = EstimationProtocol::dft(Probe::Mixed(rho.clone()), g)?;
        let fisher = metrology::fisher_mixed(&protocol)?;
        let adapted = metrology::fisher_symmetry_adapted(&protocol)?;
        let effective = metrology::effective_generator(protocol.generator(), protocol.symmetry_class())?;
        let basis = DenseSectorBasis::for_mixture(&rho)?;
        let sld = oracle::mixed_qfi_sld(
            &oracle::density_matrix(&rho, &basis)?,
            &oracle::embed_generator(effective.matrix(), &basis)?,
        )?;
        worst = worst.max(rel(fisher, sld)).max(rel(adapted, fisher));
    }
    Ok((cases, worst))
}

fn check_sld_convexity(rng: &mut ChaCha8Rng, cases: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let layout = pick_layout(rng, &[2, 3], &[1, 2]);
        let rho = random::sector_mixture(rng, layout, 2, 2)?;
        let g = random::hermitian_generator(rng, layout, 1.0)?;
        let basis = DenseSectorBasis::for_mixture(&rho)?;
        let h = oracle::embed_generator(g.matrix(), &basis)?;
        let sld = oracle::mixed_qfi_sld(&oracle::density_matrix(&rho, &basis)?, &h)?;
        let bound: f64 = rho
            .components()
            .iter()
            .map(|(p, s)| Ok(p * 4.0 * oracle::variance(&oracle::to_dense(s, &basis)?, &h)))
            .sum::<Result<f64>>()?;
        // violation amount; zero when the bound holds
        worst = worst.max(sld - bound);
    }
    Ok((cases, worst))
}

fn check_predft(_: &mut ChaCha8Rng, _: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    for (n, expected) in [(2usize, Complex64::new(-1.0, 0.0)), (3, c(1.0)), (4, Complex64::new(-1.0, 0.0))] {
        let layout = ModeLayout::new(n, 1);
        let s = FockState::basis_state(layout, vec![1; n].into())?;
        let (out, _) = metrology::symmetrize_by_predft(&s)?;
        let e = symmetry::cyclic_expectations(&out);
        worst = worst.max((e[1] - expected).norm());
    }
    Ok((3, worst))
}
