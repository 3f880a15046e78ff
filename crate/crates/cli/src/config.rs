//! Scenario files: TOML documents describing a layout, a state, optional
//! interferometer and generator, and task parameters.

use std::f64::consts::FRAC_1_SQRT_2;

use homsym_core::linops::CMatrix;
use homsym_core::metrology::{self, OneBodyGenerator};
use homsym_core::{
    Complex64, FockState, MixedState, ModeIndex, ModeLayout, ModeUnitary, OccupationVector,
    Permutation,
};
use serde::{Deserialize, Serialize};

/// Rejected configuration, with the dotted path of the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Symmetry,
    Detect,
    Fisher,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Symmetry => "symmetry",
            Task::Detect => "detect",
            Task::Fisher => "fisher",
            Task::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub task: Option<Task>,
    pub layout: LayoutSpec,
    pub state: StateSpec,
    pub interferometer: Option<InterferometerSpec>,
    pub generator: Option<GeneratorSpec>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSpec {
    pub spatial: usize,
    #[serde(default = "one")]
    pub internal: usize,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateBuilder {
    HomBiphoton,
    AntisymmetricBiphoton,
    OnePhotonPerMode,
    PreDftSymmetrized,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub amp: [f64; 2],
    pub counts: Vec<u32>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub builder: Option<StateBuilder>,
    /// Internal mode used by the single-label builders.
    pub internal: Option<usize>,
    /// Internal modes of the antisymmetric biphoton.
    pub pair: Option<[usize; 2]>,
    pub terms: Option<Vec<TermSpec>>,
    pub mixture: Option<Vec<ComponentSpec>>,
    #[serde(default = "yes")]
    pub normalize: bool,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub weight: f64,
    pub builder: Option<StateBuilder>,
    pub internal: Option<usize>,
    pub pair: Option<[usize; 2]>,
    pub terms: Option<Vec<TermSpec>>,
    #[serde(default = "yes")]
    pub normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterferometerBuilder {
    Identity,
    Dft,
    Hadamard,
    Bs,
    Permutation,
    CyclicShift,
    Phase,
    BlockDft,
}

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerSpec {
    pub builder: Option<InterferometerBuilder>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub tau: Option<f64>,
    pub sigma: Option<Vec<usize>>,
    /// `n x n` (spatial, lifted over internal modes) or `nd x nd`.
    pub matrix: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorBuilder {
    ModePhase,
    CollectiveDelay,
    AlternatingDelay,
    SpatialNumber,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub builder: Option<GeneratorBuilder>,
    pub weights: Option<Vec<f64>>,
    pub frequencies: Option<Vec<f64>>,
    pub mode: Option<usize>,
    pub matrix: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub residue: Option<usize>,
    pub kappa_max: Option<f64>,
    pub points: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub cases: Option<usize>,
}

/// Parse and type-check a scenario document.
pub fn parse(text: &str) -> Result<ScenarioConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::new("", e.message().to_string()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        ConfigError::new(path, e.inner().message().to_string())
    })
}

/// The fully validated in-memory scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub layout: ModeLayout,
    pub state: ScenarioState,
    pub interferometer: Option<ModeUnitary>,
    pub generator: Option<OneBodyGenerator>,
    pub params: Params,
}

#[derive(Debug, Clone)]
pub enum ScenarioState {
    Pure(FockState),
    Mixed(MixedState),
}

impl ScenarioState {
    pub fn as_mixed(&self) -> homsym_core::Result<MixedState> {
        match self {
            ScenarioState::Pure(s) => MixedState::pure(s.clone()),
            ScenarioState::Mixed(r) => Ok(r.clone()),
        }
    }
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<Scenario> {
        let l = &self.layout;
        if l.spatial < 2 {
            return Err(ConfigError::new("layout.spatial", "need at least 2 spatial modes"));
        }
        if l.internal < 1 {
            return Err(ConfigError::new("layout.internal", "need at least 1 internal mode"));
        }
        let layout = ModeLayout::new(l.spatial, l.internal);
        let state = self.state.build(layout)?;
        let interferometer = self
            .interferometer
            .as_ref()
            .map(|i| i.build(layout))
            .transpose()?;
        let generator = self.generator.as_ref().map(|g| g.build(layout)).transpose()?;
        if let Some(j) = self.params.residue {
            if j >= layout.spatial {
                return Err(ConfigError::new("params.residue", format!("must be below {}", layout.spatial)));
            }
        }
        if let Some(k) = self.params.kappa_max {
            if !(k.is_finite() && k > 0.0) {
                return Err(ConfigError::new("params.kappa_max", "must be positive and finite"));
            }
        }
        if self.params.points == Some(0) {
            return Err(ConfigError::new("params.points", "must be at least 1"));
        }
        Ok(Scenario {
            layout,
            state,
            interferometer,
            generator,
            params: self.params.clone(),
        })
    }
}

impl StateSpec {
    fn build(&self, layout: ModeLayout) -> Result<ScenarioState> {
        if let Some(parts) = &self.mixture {
            if self.builder.is_some() || self.terms.is_some() {
                return Err(ConfigError::new("state", "mixture excludes builder and terms"));
            }
            if parts.is_empty() {
                return Err(ConfigError::new("state.mixture", "needs at least one component"));
            }
            let mut comps = Vec::with_capacity(parts.len());
            for (i, p) in parts.iter().enumerate() {
                let path = format!("state.mixture[{i}]");
                let s = build_pure(layout, &path, p.builder, p.internal, p.pair, p.terms.as_deref(), p.normalize)?;
                comps.push((p.weight, s));
            }
            let rho = MixedState::new(comps).map_err(|e| ConfigError::new("state.mixture", e.to_string()))?;
            return Ok(ScenarioState::Mixed(rho));
        }
        build_pure(layout, "state", self.builder, self.internal, self.pair, self.terms.as_deref(), self.normalize)
            .map(ScenarioState::Pure)
    }
}

fn build_pure(
    layout: ModeLayout,
    path: &str,
    builder: Option<StateBuilder>,
    internal: Option<usize>,
    pair: Option<[usize; 2]>,
    terms: Option<&[TermSpec]>,
    normalize: bool,
) -> Result<FockState> {
    let internal_mode = internal.unwrap_or(0);
    if internal_mode >= layout.internal {
        return Err(ConfigError::new(
            format!("{path}.internal"),
            format!("must be below {}", layout.internal),
        ));
    }
    let err = |field: &str, e: homsym_core::Error| ConfigError::new(format!("{path}{field}"), e.to_string());
    let state = match (builder, terms) {
        (Some(StateBuilder::PreDftSymmetrized), terms) => {
            let input = match terms {
                Some(t) => from_terms(layout, path, t, normalize)?,
                None => one_photon_per_mode(layout, internal_mode),
            };
            let (out, _) = metrology::symmetrize_by_predft(&input).map_err(|e| err(".builder", e))?;
            out
        }
        (Some(_), Some(_)) => {
            return Err(ConfigError::new(path, "builder and terms are exclusive"));
        }
        (Some(StateBuilder::HomBiphoton), None) => {
            require_two(layout, path)?;
            FockState::from_photons(
                layout,
                &[ModeIndex::new(0, internal_mode), ModeIndex::new(1, internal_mode)],
            )
            .map_err(|e| err("", e))?
        }
        (Some(StateBuilder::AntisymmetricBiphoton), None) => {
            require_two(layout, path)?;
            let [a, b] = pair.unwrap_or([0, 1]);
            if layout.internal < 2 {
                return Err(ConfigError::new(
                    "layout.internal",
                    "antisymmetric-biphoton needs at least 2 internal modes",
                ));
            }
            if a == b || a >= layout.internal || b >= layout.internal {
                return Err(ConfigError::new(
                    format!("{path}.pair"),
                    format!("need two distinct internal modes below {}", layout.internal),
                ));
            }
            let first = FockState::from_photons(layout, &[ModeIndex::new(0, a), ModeIndex::new(1, b)])
                .map_err(|e| err("", e))?;
            let second = FockState::from_photons(layout, &[ModeIndex::new(0, b), ModeIndex::new(1, a)])
                .map_err(|e| err("", e))?;
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            FockState::superpose(&[(h, &first), (-h, &second)]).map_err(|e| err("", e))?
        }
        (Some(StateBuilder::OnePhotonPerMode), None) => one_photon_per_mode(layout, internal_mode),
        (None, Some(t)) => from_terms(layout, path, t, normalize)?,
        (None, None) => {
            return Err(ConfigError::new(path, "one of builder, terms or mixture is required"));
        }
    };
    Ok(state)
}

fn require_two(layout: ModeLayout, path: &str) -> Result<()> {
    if layout.spatial != 2 {
        return Err(ConfigError::new(
            format!("{path}.builder"),
            "biphoton builders need layout.spatial = 2",
        ));
    }
    Ok(())
}

fn one_photon_per_mode(layout: ModeLayout, internal: usize) -> FockState {
    let photons: Vec<ModeIndex> = (0..layout.spatial).map(|j| ModeIndex::new(j, internal)).collect();
    FockState::from_photons(layout, &photons).expect("modes inside the layout")
}

fn from_terms(layout: ModeLayout, path: &str, terms: &[TermSpec], normalize: bool) -> Result<FockState> {
    if terms.is_empty() {
        return Err(ConfigError::new(format!("{path}.terms"), "needs at least one term"));
    }
    let mut parsed = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        if t.counts.len() != layout.modes() {
            return Err(ConfigError::new(
                format!("{path}.terms[{i}].counts"),
                format!(
                    "expected {} entries (spatial-major, internal-minor), found {}",
                    layout.modes(),
                    t.counts.len()
                ),
            ));
        }
        parsed.push((OccupationVector::new(t.counts.clone()), Complex64::new(t.amp[0], t.amp[1])));
    }
    let state = FockState::from_terms(layout, parsed)
        .map_err(|e| ConfigError::new(format!("{path}.terms"), e.to_string()))?;
    if normalize {
        state
            .normalize()
            .map_err(|e| ConfigError::new(format!("{path}.terms"), e.to_string()))
    } else {
        Ok(state)
    }
}

fn complex_matrix(spec: &MatrixSpec, path: &str) -> Result<CMatrix> {
    let rows = spec.len();
    if rows == 0 || spec.iter().any(|r| r.len() != rows) {
        return Err(ConfigError::new(path, "matrix must be square and non-empty"));
    }
    Ok(CMatrix::from_fn(rows, rows, |r, c| {
        Complex64::new(spec[r][c][0], spec[r][c][1])
    }))
}

impl InterferometerSpec {
    fn build(&self, layout: ModeLayout) -> Result<ModeUnitary> {
        let core = |field: &str, e: homsym_core::Error| {
            ConfigError::new(format!("interferometer{field}"), e.to_string())
        };
        match (self.builder, &self.matrix) {
            (Some(_), Some(_)) => Err(ConfigError::new("interferometer", "builder and matrix are exclusive")),
            (None, None) => Err(ConfigError::new("interferometer", "one of builder or matrix is required")),
            (None, Some(m)) => {
                let m = complex_matrix(m, "interferometer.matrix")?;
                if m.nrows() == layout.spatial {
                    ModeUnitary::from_spatial(layout, m).map_err(|e| core(".matrix", e))
                } else if m.nrows() == layout.modes() {
                    ModeUnitary::general(layout, m).map_err(|e| core(".matrix", e))
                } else {
                    Err(ConfigError::new(
                        "interferometer.matrix",
                        format!("expected {0}x{0} or {1}x{1}", layout.spatial, layout.modes()),
                    ))
                }
            }
            (Some(b), None) => {
                let sigma = || -> Result<Permutation> {
                    let s = self
                        .sigma
                        .clone()
                        .ok_or_else(|| ConfigError::new("interferometer.sigma", "required for this builder"))?;
                    Permutation::new(s).map_err(|e| core(".sigma", e))
                };
                let built = match b {
                    InterferometerBuilder::Identity => Ok(ModeUnitary::identity(layout)),
                    InterferometerBuilder::Dft => ModeUnitary::dft(layout),
                    InterferometerBuilder::Hadamard => ModeUnitary::hadamard(layout),
                    InterferometerBuilder::Bs => ModeUnitary::beam_splitter(
                        layout,
                        self.theta.unwrap_or(0.0),
                        self.phi.unwrap_or(0.0),
                        self.tau.unwrap_or(0.0),
                    ),
                    InterferometerBuilder::Permutation => ModeUnitary::permutation(layout, &sigma()?),
                    InterferometerBuilder::CyclicShift => ModeUnitary::cyclic_shift(layout),
                    InterferometerBuilder::Phase => ModeUnitary::diagonal_phase(layout),
                    InterferometerBuilder::BlockDft => {
                        homsym_core::symmetry::block_dft_diagonalizer(layout, &sigma()?)
                    }
                };
                built.map_err(|e| core(".builder", e))
            }
        }
    }
}

impl GeneratorSpec {
    fn build(&self, layout: ModeLayout) -> Result<OneBodyGenerator> {
        let core = |field: &str, e: homsym_core::Error| ConfigError::new(format!("generator{field}"), e.to_string());
        match (self.builder, &self.matrix) {
            (Some(_), Some(_)) => Err(ConfigError::new("generator", "builder and matrix are exclusive")),
            (None, None) => Err(ConfigError::new("generator", "one of builder or matrix is required")),
            (None, Some(m)) => {
                let m = complex_matrix(m, "generator.matrix")?;
                OneBodyGenerator::new(layout, m).map_err(|e| core(".matrix", e))
            }
            (Some(b), None) => {
                let need = |v: &Option<Vec<f64>>, field: &str| {
                    v.clone()
                        .ok_or_else(|| ConfigError::new(format!("generator.{field}"), "required for this builder"))
                };
                match b {
                    GeneratorBuilder::ModePhase => OneBodyGenerator::mode_phase(layout, &need(&self.weights, "weights")?)
                        .map_err(|e| core(".weights", e)),
                    GeneratorBuilder::CollectiveDelay => {
                        OneBodyGenerator::collective_delay(layout, &need(&self.frequencies, "frequencies")?)
                            .map_err(|e| core(".frequencies", e))
                    }
                    GeneratorBuilder::AlternatingDelay => {
                        OneBodyGenerator::alternating_delay(layout, &need(&self.frequencies, "frequencies")?)
                            .map_err(|e| core(".frequencies", e))
                    }
                    GeneratorBuilder::SpatialNumber => {
                        let mode = self
                            .mode
                            .ok_or_else(|| ConfigError::new("generator.mode", "required for this builder"))?;
                        OneBodyGenerator::spatial_number(layout, mode).map_err(|e| core(".mode", e))
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_field_reports_path() {
        let err = parse("[layout]\nspatial = 2\nbogus = 1\n[state]\nbuilder = \"hom-biphoton\"\n").unwrap_err();
        assert_eq!(err.path, "layout.bogus");
        assert!(err.message.contains("bogus"), "{err}");
    }

    #[test]
    fn wrong_type_reports_nested_path() {
        let text = "[layout]\nspatial = 2\n[state]\nterms = [{ amp = [1, 0], counts = [1, \"x\"] }]\n";
        let err = parse(text).unwrap_err();
        assert!(err.path.starts_with("state.terms"), "{err}");
    }

    #[test]
    fn count_length_is_validated() {
        let text = "[layout]\nspatial = 2\ninternal = 2\n[state]\nterms = [{ amp = [1, 0], counts = [1, 0] }]\n";
        let err = parse(text).unwrap().build().unwrap_err();
        assert_eq!(err.path, "state.terms[0].counts");
    }

    #[test]
    fn builders_build() {
        let text = "[layout]\nspatial = 2\ninternal = 2\n[state]\nbuilder = \"antisymmetric-biphoton\"\n\
                    [interferometer]\nbuilder = \"bs\"\ntheta = 0.3\n[generator]\nbuilder = \"alternating-delay\"\nfrequencies = [1.0, -1.0]\n";
        let s = parse(text).unwrap().build().unwrap();
        assert!(s.interferometer.is_some() && s.generator.is_some());
    }
}
