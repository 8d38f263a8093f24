//! Experiment runner: configuration, engine dispatch and output files.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cgc::{generate_field, FieldParams};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    assemble, build_interaction, demo_fixture, kinetic_terms, resource_estimate, HamiltonianModel, DEMO_M_QUARK,
};
use crate::lattice::{build_lattice, BasisLabel, Color, EncodingLayout, LatticeConfig, LatticeSpec};
use crate::observables::{
    fmt_num, observable_rows, read_observables_csv, relative_deviation, sample_shots, write_observables_csv,
    write_probabilities_csv, Trajectory,
};
use crate::reference::{exact_trajectory, tts_matrix_emulation, OaaAlgebra};
use crate::scalar::Complex;
use crate::trotter::{trotter_evolve, TrotterConfig};
use crate::tts::{evolve_with, TtsConfig};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const PROBABILITIES_FILE: &str = "probabilities.csv";
pub const OBSERVABLES_FILE: &str = "observables.csv";
pub const DEVIATIONS_FILE: &str = "deviations.csv";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Tts,
    Trotter,
    Exact,
    TtsMatrix,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tts" => Ok(Algorithm::Tts),
            "trotter" => Ok(Algorithm::Trotter),
            "exact" => Ok(Algorithm::Exact),
            "tts-matrix" => Ok(Algorithm::TtsMatrix),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Statevector,
    Shots,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "statevector" => Ok(Mode::Statevector),
            "shots" => Ok(Mode::Shots),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldSource {
    #[default]
    Fixture,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeBlock {
    pub n_perp: usize,
    pub l_perp: f64,
    pub n_par: usize,
    pub l_par: f64,
}

impl Default for LatticeBlock {
    fn default() -> Self {
        LatticeBlock { n_perp: 2, l_perp: 5.0, n_par: 1, l_par: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsBlock {
    pub m_quark: f64,
    /// Fixed p⁺ (GeV); `None` keeps the longitudinal register.
    pub p_plus: Option<f64>,
    /// Fixed helicity (±1/2); `None` keeps the helicity qubit.
    pub helicity: Option<f64>,
    pub g: f64,
    pub g2mu: f64,
    pub m_g: f64,
    pub l_eta: f64,
    pub n_eta: usize,
}

impl Default for PhysicsBlock {
    fn default() -> Self {
        let f = FieldParams::demo();
        PhysicsBlock {
            m_quark: DEMO_M_QUARK,
            p_plus: Some(850.0),
            helicity: Some(0.5),
            g: f.g,
            g2mu: f.g2mu,
            m_g: f.m_g,
            l_eta: f.l_eta,
            n_eta: f.n_eta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineBlock {
    pub algorithm: Algorithm,
    pub k_max: usize,
    pub steps: usize,
    /// Trotter step override; every other engine uses τ = ln2/Λ.
    pub tau_prime: Option<f64>,
    pub shots: Option<u64>,
    pub mode: Mode,
    pub oaa: OaaAlgebra,
    /// Initial basis state as a register bitstring; defaults to p⊥ = 0, Red.
    pub initial: Option<String>,
}

impl Default for EngineBlock {
    fn default() -> Self {
        EngineBlock {
            algorithm: Algorithm::Exact,
            k_max: 3,
            steps: 25,
            tau_prime: None,
            shots: None,
            mode: Mode::Statevector,
            oaa: OaaAlgebra::Exact,
            initial: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceBlock {
    pub field: FieldSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: PathBuf::from("out") }
    }
}

/// Full run description; every block defaults to the demo setup.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub lattice: LatticeBlock,
    pub physics: PhysicsBlock,
    pub engine: EngineBlock,
    pub source: SourceBlock,
    pub output: OutputBlock,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn lattice_config(&self) -> LatticeConfig {
        LatticeConfig {
            n_perp: self.lattice.n_perp,
            l_perp: self.lattice.l_perp,
            n_par: self.lattice.n_par,
            l_par: self.lattice.l_par,
            fixed_p_plus: self.physics.p_plus,
            fixed_helicity: self.physics.helicity,
        }
    }

    pub fn field_params(&self) -> FieldParams {
        FieldParams {
            g: self.physics.g,
            g2mu: self.physics.g2mu,
            m_g: self.physics.m_g,
            l_eta: self.physics.l_eta,
            n_eta: self.physics.n_eta,
            seed: self.seed,
        }
    }

    /// Checks everything the engines would otherwise reject mid-run.
    pub fn validate(&self) -> Result<()> {
        let spec = build_lattice::<f64>(&self.lattice_config())?;
        if self.source.field == FieldSource::Fixture {
            let demo = crate::hamiltonian::demo_lattice_config();
            if self.lattice_config() != demo || self.physics.m_quark != DEMO_M_QUARK {
                return Err(Error::Config(
                    "the fixture source requires the demo lattice (N⊥ = 2, L⊥ = 5, one mode at p⁺ = 850, \
                     helicity +1/2, m = 0.02)"
                        .into(),
                ));
            }
        } else {
            self.field_params().validate()?;
        }
        if !(self.physics.m_quark >= 0.0) {
            return Err(Error::Config(format!("quark mass must be non-negative, got {}", self.physics.m_quark)));
        }
        let e = &self.engine;
        if matches!(e.algorithm, Algorithm::Tts | Algorithm::TtsMatrix) && e.k_max == 0 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if let Some(t) = e.tau_prime {
            if e.algorithm != Algorithm::Trotter {
                return Err(Error::Config("tau_prime only applies to the trotter engine".into()));
            }
            if !(t > 0.0) {
                return Err(Error::Config(format!("tau_prime must be positive, got {t}")));
            }
        }
        match (e.mode, e.shots) {
            (Mode::Shots, None) | (Mode::Shots, Some(0)) => {
                return Err(Error::Config("shot mode needs shots ≥ 1".into()))
            }
            (Mode::Statevector, Some(_)) => {
                return Err(Error::Config("shots given but mode is statevector".into()))
            }
            _ => {}
        }
        let layout = EncodingLayout::from_spec(&spec);
        self.initial_index(&layout)?;
        Ok(())
    }

    fn initial_index(&self, layout: &EncodingLayout) -> Result<usize> {
        match &self.engine.initial {
            Some(bits) => layout.index_of(&crate::lattice::decode_basis(bits, layout)?),
            None => layout.index_of(&BasisLabel::transverse(layout, 0, 0, Color::Red)),
        }
    }
}

/// Hamiltonian of a run: the embedded fixture or one built from a sampled
/// field.
pub fn build_model(config: &RunConfig) -> Result<(LatticeSpec<f64>, HamiltonianModel<f64>)> {
    let spec = build_lattice::<f64>(&config.lattice_config())?;
    let model = match config.source.field {
        FieldSource::Fixture => demo_fixture(),
        FieldSource::Sampled => {
            let layout = EncodingLayout::from_spec(&spec);
            let field = generate_field(&config.field_params(), &spec)?;
            let interaction = build_interaction(&field, &spec, config.physics.g)?;
            assemble(kinetic_terms(&spec, &layout, config.physics.m_quark)?, interaction, &layout)?
        }
    };
    Ok((spec, model))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitCounts {
    pub system: usize,
    pub ancilla: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Running,
    Complete,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub status: RunStatus,
    pub config: RunConfig,
    pub units: Units,
    pub lambda: f64,
    pub tau: f64,
    pub steps: usize,
    pub x_plus_final: f64,
    pub k_max: Option<usize>,
    pub qubits: QubitCounts,
    pub terms: usize,
    /// Term order used by every engine (kinetic first).
    pub term_order: Vec<String>,
    pub ancilla_success: Vec<f64>,
    pub wall_clock_seconds: f64,
    pub seed: u64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub energy: String,
    pub time: String,
}

impl Default for Units {
    fn default() -> Self {
        Units { energy: "GeV".into(), time: "GeV^-1".into() }
    }
}

impl RunManifest {
    fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?)
    }
}

fn step_size(config: &RunConfig, lambda: f64) -> f64 {
    match (config.engine.algorithm, config.engine.tau_prime) {
        (Algorithm::Trotter, Some(t)) => t,
        _ => std::f64::consts::LN_2 / lambda,
    }
}

/// Runs one configuration and writes `manifest.json`, `probabilities.csv`
/// and `observables.csv` into the output directory.
pub fn run(config: &RunConfig) -> Result<RunManifest> {
    config.validate()?;
    let start = Instant::now();
    let dir = config.output.dir.clone();
    fs::create_dir_all(&dir)?;
    let (spec, model) = build_model(config)?;
    let layout = EncodingLayout::from_spec(&spec);
    let e = &config.engine;
    let lambda = model.lambda;
    let tau = step_size(config, lambda);
    let qubits = if e.algorithm == Algorithm::Tts {
        let est = resource_estimate(&model, e.k_max, e.steps.max(1))?;
        QubitCounts { system: est.system_qubits, ancilla: est.ancilla_qubits, total: est.total_qubits }
    } else {
        QubitCounts { system: model.n_qubits, ancilla: 0, total: model.n_qubits }
    };
    let mut manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        status: RunStatus::Running,
        config: config.clone(),
        units: Units::default(),
        lambda,
        tau,
        steps: e.steps,
        x_plus_final: tau * e.steps as f64,
        k_max: matches!(e.algorithm, Algorithm::Tts | Algorithm::TtsMatrix).then_some(e.k_max),
        qubits,
        terms: model.len(),
        term_order: model.terms().map(|(t, _)| t.string.to_string()).collect(),
        ancilla_success: Vec::new(),
        wall_clock_seconds: 0.0,
        seed: config.seed,
        error: None,
    };
    manifest.write(&dir)?;

    let outcome = simulate(config, &model, &layout, tau, &mut manifest, &dir).and_then(|traj| {
        let rows = observable_rows(&traj, &spec)?;
        write_observables_csv(&rows, BufWriter::new(fs::File::create(dir.join(OBSERVABLES_FILE))?))?;
        let mut w = BufWriter::new(fs::File::create(dir.join(PROBABILITIES_FILE))?);
        write_probabilities_csv(&traj, &layout, &mut w)?;
        w.flush()?;
        Ok(traj)
    });
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(traj) => {
            manifest.ancilla_success = traj.steps.iter().filter_map(|s| s.ancilla_success).collect();
            manifest.status = RunStatus::Complete;
            manifest.write(&dir)?;
            Ok(manifest)
        }
        Err(err) => {
            manifest.status = RunStatus::Failed;
            manifest.error = Some(err.to_string());
            manifest.write(&dir)?;
            Err(err)
        }
    }
}

fn simulate(
    config: &RunConfig,
    model: &HamiltonianModel<f64>,
    layout: &EncodingLayout,
    tau: f64,
    manifest: &mut RunManifest,
    dir: &Path,
) -> Result<Trajectory<f64>> {
    let e = &config.engine;
    let mut psi = vec![Complex::new(0.0, 0.0); layout.dim()];
    psi[config.initial_index(layout)?] = Complex::new(1.0, 0.0);
    let traj = match e.algorithm {
        Algorithm::Exact => exact_trajectory(&psi, model, tau, e.steps)?,
        Algorithm::Trotter => trotter_evolve(&psi, model, &TrotterConfig { tau_prime: tau, steps: e.steps })?,
        Algorithm::TtsMatrix => tts_matrix_emulation(&psi, model, e.k_max, e.steps, e.oaa)?,
        Algorithm::Tts => {
            let cfg = TtsConfig { k_max: e.k_max, steps: e.steps };
            evolve_with(&psi, model, &cfg, |_, p| {
                manifest.ancilla_success.push(p);
                // Progress is best effort; the final write reports errors.
                let _ = manifest.write(dir);
            })?
        }
    };
    match (e.mode, e.shots) {
        (Mode::Shots, Some(shots)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            sample_shots(&traj, shots, &mut rng)
        }
        _ => Ok(traj),
    }
}

/// Independent runs with seeds `seed, seed + 1, …`, each written to
/// `<dir>/seed-<n>`.
pub fn sweep(config: &RunConfig, count: usize) -> Result<Vec<RunManifest>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut c = config.clone();
            c.seed = config.seed + i;
            c.output.dir = config.output.dir.join(format!("seed-{}", c.seed));
            run(&c)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationRow {
    pub step: usize,
    pub x_plus: f64,
    /// `|a − b|/|b|` for ⟨p⊥²⟩ and the three colour probabilities; `None`
    /// where the reference value is zero.
    pub values: [Option<f64>; 4],
}

pub const DEVIATIONS_HEADER: &str = "step,x_plus,p_perp_sq,P_red,P_green,P_blue";

/// Relative deviation of run `a` against reference run `b`, written to
/// `out` as CSV (empty cells where the reference vanishes).
pub fn compare(dir_a: &Path, dir_b: &Path, out: &Path) -> Result<Vec<DeviationRow>> {
    let read = |d: &Path| -> Result<_> {
        read_observables_csv(BufReader::new(fs::File::open(d.join(OBSERVABLES_FILE))?))
    };
    let (a, b) = (read(dir_a)?, read(dir_b)?);
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} steps against {}", a.len(), b.len())));
    }
    for (ra, rb) in a.iter().zip(&b) {
        let tol = 1e-9 * ra.x_plus.abs().max(rb.x_plus.abs()).max(1.0);
        if ra.step != rb.step || (ra.x_plus - rb.x_plus).abs() > tol {
            return Err(Error::GridMismatch(format!(
                "step {} at x⁺ = {} against step {} at x⁺ = {}",
                ra.step, ra.x_plus, rb.step, rb.x_plus
            )));
        }
    }
    let column = |f: fn(&crate::observables::ObservableRow) -> f64| -> Result<Vec<Option<f64>>> {
        relative_deviation(&a.iter().map(f).collect::<Vec<_>>(), &b.iter().map(f).collect::<Vec<_>>())
    };
    let cols = [
        column(|r| r.p_perp_sq)?,
        column(|r| r.p_red)?,
        column(|r| r.p_green)?,
        column(|r| r.p_blue)?,
    ];
    let rows: Vec<DeviationRow> = a
        .iter()
        .enumerate()
        .map(|(i, r)| DeviationRow {
            step: r.step,
            x_plus: r.x_plus,
            values: [cols[0][i], cols[1][i], cols[2][i], cols[3][i]],
        })
        .collect();
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(fs::File::create(out)?);
    writeln!(w, "{DEVIATIONS_HEADER}")?;
    for r in &rows {
        let cells: Vec<String> = r.values.iter().map(|v| v.map(fmt_num).unwrap_or_default()).collect();
        writeln!(w, "{},{},{}", r.step, fmt_num(r.x_plus), cells.join(","))?;
    }
    w.flush()?;
    Ok(rows)
}
