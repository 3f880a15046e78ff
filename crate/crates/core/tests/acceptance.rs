//! Acceptance criteria, one line of output per criterion.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use homsym_core::detection;
use homsym_core::linops::{dft_matrix, max_abs_diff, permutation_matrix, CMatrix};
use homsym_core::metrology::{self, EstimationProtocol, OneBodyGenerator, Probe, SymmetryClass};
use homsym_core::oracle::{self, DenseSectorBasis};
use homsym_core::random;
use homsym_core::symmetry;
use homsym_core::verify::{self, VerifyOptions};
use homsym_core::{
    Complex64, Error, FockState, MixedState, ModeIndex, ModeLayout, ModeUnitary, Permutation,
    Result,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    worst: f64,
    detail: String,
}

fn outcome(worst: f64, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        worst,
        detail: detail.into(),
    })
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn photons(layout: ModeLayout, list: &[(usize, usize)]) -> FockState {
    let idx: Vec<ModeIndex> = list.iter().map(|&(s, i)| ModeIndex::new(s, i)).collect();
    FockState::from_photons(layout, &idx).unwrap()
}

fn eigen_probe(rng: &mut ChaCha8Rng, layout: ModeLayout, n_photons: u32, k: usize) -> Result<FockState> {
    loop {
        let s = random::sector_state(rng, layout, n_photons)?;
        let p = symmetry::project_residue(&s, k);
        if p.norm() > 1e-3 {
            return p.normalize();
        }
    }
}

/// `(1/n) sum_l s^l P^l h P^-l`: cyclic-symmetric part for `s = 1`, odd part for `s = -1`.
fn cyclic_part(g: &OneBodyGenerator, sign: f64) -> Result<OneBodyGenerator> {
    let n = g.layout().spatial;
    let mut acc = g.combine(0.0, g, 0.0)?;
    for l in 0..n {
        let w = sign.powi(l as i32) / n as f64;
        acc = acc.combine(1.0, &g.cyclic_conjugate(l)?, w)?;
    }
    Ok(acc)
}

fn hom_dip() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for d in 1..=3 {
        let layout = ModeLayout::new(2, d);
        let state = photons(layout, &[(0, d - 1), (1, d - 1)]);
        let dist = detection::output_distribution(&state, &ModeUnitary::hadamard(layout)?)?;
        worst = worst
            .max(dist.probability(&[1, 1]))
            .max((dist.probability(&[2, 0]) - 0.5).abs())
            .max((dist.probability(&[0, 2]) - 0.5).abs());
        let coinc = detection::coincidence_probability(&state)?;
        worst = worst.max(coinc.detection).max(coinc.symmetry);
        worst = worst.max((symmetry::exchange_expectation(&state)? - c(1.0)).norm());
    }
    for d in 2..=3 {
        let layout = ModeLayout::new(2, d);
        let a = photons(layout, &[(0, 0), (1, 1)]);
        let b = photons(layout, &[(0, 1), (1, 0)]);
        let anti = FockState::superpose(&[(c(FRAC_1_SQRT_2), &a), (c(-FRAC_1_SQRT_2), &b)])?;
        let coinc = detection::coincidence_probability(&anti)?;
        worst = worst
            .max((coinc.detection - 1.0).abs())
            .max((coinc.symmetry - 1.0).abs());
    }
    outcome(worst, "identical and antisymmetric biphotons, d = 1..3")
}

fn duality() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 2..=4 {
        for d in 1..=3 {
            let layout = ModeLayout::new(n, d);
            for n_photons in 1..=4 {
                let dim = oracle::sector_dimension(layout.modes(), n_photons);
                for _ in 0..100 {
                    let s = if dim <= 120 {
                        random::sector_state(&mut rng, layout, n_photons)?
                    } else {
                        random::sparse_sector_state(&mut rng, layout, n_photons, 8)?
                    };
                    worst = worst.max(verify::duality_error(&s)?);
                    count += 1;
                }
            }
        }
    }
    outcome(worst, format!("{count} random states over 36 configurations"))
}

fn diagonalization() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        let u = dft_matrix(n);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)),
        ));
        let p = permutation_matrix(&Permutation::cyclic_shift(n, 1));
        let err = max_abs_diff(&(&u * d * u.adjoint()), &p);
        if err > 1e-12 {
            return outcome(err, format!("U D U^dag differs from P at n = {n}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..100 {
        let layout = ModeLayout::new(rng.random_range(2..=4), rng.random_range(1..=2));
        let m = random::haar_general(&mut rng, layout)?;
        let n = random::haar_spatial(&mut rng, layout)?;
        let n_photons = rng.random_range(1..=3);
        let s = random::sparse_sector_state(&mut rng, layout, n_photons, 5)?;
        let joint = m.compose(&n)?.apply(&s)?;
        worst = worst.max(joint.max_abs_diff(&m.apply(&n.apply(&s)?)?)?);
    }
    for _ in 0..100 {
        let n = rng.random_range(1..=7);
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(&mut rng);
        let sigma = Permutation::new(images)?;
        let layout = ModeLayout::new(n, 1);
        let v = symmetry::block_dft_diagonalizer(layout, &sigma)?;
        let conj = v.adjoint().compose(&ModeUnitary::permutation(layout, &sigma)?)?.compose(&v)?;
        for r in 0..n {
            for col in 0..n {
                if r != col {
                    worst = worst.max(conj.matrix()[(r, col)].norm());
                }
            }
        }
    }
    outcome(worst, "DFT n = 2..6 within 1e-12; homomorphism and block DFT on 100 random cases each")
}

fn projector_algebra() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for d in 1..=2 {
            for n_photons in 0..=3 {
                let basis = DenseSectorBasis::sector(ModeLayout::new(n, d), n_photons)?;
                let dim = basis.dim();
                let pis = (0..n)
                    .map(|j| oracle::dense_projector_residue_on(&basis, j))
                    .collect::<Result<Vec<_>>>()?;
                let mut sum = CMatrix::zeros(dim, dim);
                for (j, a) in pis.iter().enumerate() {
                    sum += a;
                    worst = worst.max(max_abs_diff(&(a * a), a));
                    worst = worst.max(max_abs_diff(a, &a.adjoint()));
                    for b in &pis[j + 1..] {
                        worst = worst.max(max_abs_diff(&(a * b), &CMatrix::zeros(dim, dim)));
                    }
                }
                worst = worst.max(max_abs_diff(&sum, &CMatrix::identity(dim, dim)));
            }
        }
    }
    outcome(worst, "n <= 4, d <= 2, N <= 3")
}

fn metrology_triangle() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut exact: f64 = 0.0;
    let mut limit: f64 = 0.0;
    let mut count = 0;
    for n in 2..=4 {
        for d in 1..=2 {
            let layout = ModeLayout::new(n, d);
            let classes: &[usize] = if n % 2 == 0 { &[0, n / 2] } else { &[0] };
            for &k in classes {
                for _ in 0..4 {
                    let probe = eigen_probe(&mut rng, layout, 2, k)?;
                    let g = random::hermitian_generator(&mut rng, layout, 1.0)?;
                    let protocol = EstimationProtocol::dft(Probe::Pure(probe.clone()), g.clone())?;
                    let adapted = metrology::fisher_symmetry_adapted(&protocol)?;
                    let commutator = metrology::fisher_limit_commutator(&protocol)?;
                    let extrapolated = metrology::fisher_limit_extrapolated(&protocol)?;
                    exact = exact.max(rel(adapted, commutator));
                    limit = limit.max((extrapolated - commutator).abs() / commutator.abs().max(1e-6));
                    count += 1;

                    if n % 2 == 0 {
                        // antisymmetric generator: optimal
                        let odd = cyclic_part(&g, -1.0)?;
                        if odd.cyclic_antisymmetry_defect()? > 1e-12 {
                            return Err(Error::Precondition("odd part is not antisymmetric".into()));
                        }
                        let q = metrology::qfi(&probe, &odd)?;
                        let p = EstimationProtocol::dft(Probe::Pure(probe.clone()), odd)?;
                        exact = exact
                            .max(rel(metrology::fisher_symmetry_adapted(&p)?, q))
                            .max(rel(metrology::fisher_limit_commutator(&p)?, q));
                        limit = limit.max(rel(metrology::fisher_limit_extrapolated(&p)?, q));
                    }
                    if k == 0 {
                        // cyclic-symmetric generator: blind
                        let even = cyclic_part(&g, 1.0)?;
                        let p = EstimationProtocol::dft(Probe::Pure(probe.clone()), even)?;
                        exact = exact
                            .max(metrology::fisher_symmetry_adapted(&p)?.abs())
                            .max(metrology::fisher_limit_commutator(&p)?.abs())
                            .max(metrology::fisher_limit_extrapolated(&p)?.abs());
                    }
                }
            }
        }
    }
    // collective delay on a symmetric probe
    let layout = ModeLayout::new(3, 2);
    let omega = OneBodyGenerator::collective_delay(layout, &[0.7, -1.3])?;
    let probe = eigen_probe(&mut rng, layout, 3, 0)?;
    let p = EstimationProtocol::dft(Probe::Pure(probe), omega)?;
    exact = exact
        .max(metrology::fisher_limit_commutator(&p)?.abs())
        .max(metrology::fisher_limit_extrapolated(&p)?.abs());
    // two modes: Var(H - S H S)
    let layout = ModeLayout::new(2, 2);
    for k in [0, 1] {
        let probe = eigen_probe(&mut rng, layout, 2, k)?;
        let g = random::hermitian_generator(&mut rng, layout, 1.0)?;
        let diff = g.combine(1.0, &g.cyclic_conjugate(1)?, -1.0)?;
        let expected = diff.variance(&probe)?;
        let p = EstimationProtocol::dft(Probe::Pure(probe), g)?;
        exact = exact.max(rel(metrology::fisher_symmetry_adapted(&p)?, expected));
        limit = limit.max((metrology::fisher_limit_extrapolated(&p)? - expected).abs() / expected.max(1e-6));
    }
    if limit > 1e-3 {
        return outcome(f64::INFINITY, format!("extrapolated limit off by {limit:.3e} relative"));
    }
    outcome(exact, format!("{count} random protocols; extrapolation worst {limit:.2e} relative (tol 1e-3)"))
}

fn fisher_below_qfi() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let grid: Vec<f64> = (1..=25).map(|i| i as f64 * 0.08).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut sweeps = 0;
    for n in 2..=4 {
        let layout = ModeLayout::new(n, 2);
        for case in 0..6 {
            let probe = match case % 3 {
                0 => eigen_probe(&mut rng, layout, 2, 0)?,
                1 => eigen_probe(&mut rng, layout, 2, n / 2 * (n % 2 == 0) as usize)?,
                _ => random::sector_state(&mut rng, layout, 2)?,
            };
            let mut g = random::hermitian_generator(&mut rng, layout, 1.0)?;
            if case >= 3 && n % 2 == 0 {
                g = cyclic_part(&g, -1.0)?;
            }
            let q = metrology::qfi(&probe, &g)?;
            let u = if case == 5 { random::haar_spatial(&mut rng, layout)? } else { ModeUnitary::dft(layout)? };
            let protocol = EstimationProtocol::new(Probe::Pure(probe), g, u, 0)?;
            for point in metrology::fisher_two_outcome(&protocol, &grid)? {
                worst = worst.max(point.fisher - q);
            }
            sweeps += 1;
        }
    }
    outcome(worst.max(0.0), format!("{sweeps} sweeps of {} points; largest FI - QFI = {worst:.2e}", grid.len()))
}

fn mixed_states() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let mut lemma: f64 = 0.0;
    let mut formula: f64 = 0.0;
    let mut sld: f64 = 0.0;
    for n in [2, 3, 4] {
        let layout = ModeLayout::new(n, 2);
        let classes: &[usize] = if n % 2 == 0 { &[0, n / 2] } else { &[0] };
        for &k in classes {
            for _ in 0..5 {
                let parts: Vec<(f64, FockState)> = [0.5, 0.3, 0.2]
                    .iter()
                    .map(|&w| Ok((w, eigen_probe(&mut rng, layout, 2, k)?)))
                    .collect::<Result<_>>()?;
                let rho = MixedState::new(parts)?;
                let t = symmetry::mixed_cyclic_expectations(&rho)[1];
                if (t.norm() - 1.0).abs() < 1e-8 {
                    for (_, s) in rho.components() {
                        let err = symmetry::cyclic_power(s, 1).add_scaled(-t, s)?.norm();
                        lemma = lemma.max(err);
                    }
                } else {
                    lemma = f64::INFINITY;
                }
                let g = random::hermitian_generator(&mut rng, layout, 1.0)?;
                let protocol = EstimationProtocol::dft(Probe::Mixed(rho.clone()), g.clone())?;
                let fisher = metrology::fisher_mixed(&protocol)?;
                let mut direct = 0.0;
                for (p, s) in rho.components() {
                    let pure = EstimationProtocol::dft(Probe::Pure(s.clone()), g.clone())?;
                    direct += p * metrology::fisher_limit_commutator(&pure)?;
                }
                formula = formula
                    .max(rel(fisher, direct))
                    .max(rel(metrology::fisher_symmetry_adapted(&protocol)?, fisher));
                let h_eff = metrology::effective_generator(&g, protocol.symmetry_class())?;
                let basis = DenseSectorBasis::for_mixture(&rho)?;
                let reference = oracle::mixed_qfi_sld(
                    &oracle::density_matrix(&rho, &basis)?,
                    &oracle::embed_generator(h_eff.matrix(), &basis)?,
                )?;
                sld = sld.max(rel(fisher, reference));
            }
        }
    }
    // a mixture of different eigenspaces is not extremal and is rejected by the symmetry-adapted form
    let layout = ModeLayout::new(2, 2);
    let rho = MixedState::new(vec![
        (0.5, eigen_probe(&mut rng, layout, 2, 0)?),
        (0.5, eigen_probe(&mut rng, layout, 2, 1)?),
    ])?;
    let g = random::hermitian_generator(&mut rng, layout, 1.0)?;
    let p = EstimationProtocol::dft(Probe::Mixed(rho), g)?;
    if metrology::fisher_mixed(&p).is_ok() || metrology::fisher_symmetry_adapted(&p).is_ok() {
        return outcome(f64::INFINITY, "non-extremal mixture accepted");
    }
    if sld > 1e-6 || lemma > 1e-8 {
        return outcome(f64::INFINITY, format!("lemma {lemma:.2e}, SLD {sld:.2e}"));
    }
    outcome(formula, format!("lemma {lemma:.2e} (tol 1e-8), SLD {sld:.2e} (tol 1e-6)"))
}

fn predft() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (n, expected, class) in [
        (2, -1.0, SymmetryClass::Antisymmetric),
        (3, 1.0, SymmetryClass::Symmetric),
    ] {
        let layout = ModeLayout::new(n, 2);
        let input = FockState::basis_state(layout, {
            let mut counts = vec![0u32; layout.modes()];
            for j in 0..n {
                counts[j * 2] = 1;
            }
            counts.into()
        })?;
        let (probe, _) = metrology::symmetrize_by_predft(&input)?;
        let shifted = symmetry::cyclic_power(&probe, 1);
        worst = worst.max(shifted.add_scaled(c(-expected), &probe)?.norm());
        let g = OneBodyGenerator::mode_phase(layout, &(0..n).map(|j| j as f64 * 0.4 - 0.3).collect::<Vec<_>>())?;
        let protocol = EstimationProtocol::dft(Probe::Pure(probe), g)?;
        if protocol.symmetry_class() != class {
            return outcome(f64::INFINITY, format!("n = {n}: class {:?}", protocol.symmetry_class()));
        }
        let a = metrology::fisher_symmetry_adapted(&protocol)?;
        let b = metrology::fisher_limit_commutator(&protocol)?;
        if rel(a, b) > 1e-9 {
            return outcome(rel(a, b), format!("n = {n}: formulas disagree"));
        }
    }
    outcome(worst, "n = 2 gives -1, n = 3 gives +1; both probes admissible")
}

fn oracle_suite() -> Result<Outcome> {
    let results = verify::run_suite(VerifyOptions::default());
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        outcome(0.0, format!("{} checks passed", results.len()))
    } else {
        outcome(f64::INFINITY, format!("failed: {}", failed.join(", ")))
    }
}

type Criterion = (&'static str, f64, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 HOM dip", 1e-10, hom_dip),
        ("2 detection/symmetry duality", 1e-10, duality),
        ("3 DFT diagonalization and homomorphism", 1e-10, diagonalization),
        ("4 projector algebra", 1e-9, projector_algebra),
        ("5 metrology consistency triangle", 1e-9, metrology_triangle),
        ("6 FI <= QFI on sweeps", 1e-9, fisher_below_qfi),
        ("7 mixed states", 1e-9, mixed_states),
        ("8 pre-DFT symmetrization", 1e-10, predft),
        ("9 oracle equivalence suite", 0.0, oracle_suite),
    ];
    let mut all = true;
    for (name, tol, run) in criteria {
        let start = Instant::now();
        let (ok, line) = match run() {
            Ok(o) => (o.worst <= tol, format!("worst {:.3e} (tol {tol:.0e}); {}", o.worst, o.detail)),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= ok;
        println!(
            "{} criterion {name}: {line} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
