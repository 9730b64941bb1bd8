//! `qrm` command line: `verify`, `evolve`, `compare`, `spectrum`.
//!
//! A run is described by one JSON [`RunConfig`]; flags override its fields.
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error, 3 cutoff-guard refusal, 4 I/O failure.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    bosonic_propagator, coupling_only_propagator, effective_fermionic_evolve, evolve_spectral,
    photon_number_operator, quadrature_operator, quadrature_signal, DriveFactor, TimeGrid,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::hilbert::{coherent_state, FockSpec, SpinState, StateVector, C64};
use crate::model::{EffectiveKind, Model, ModelKind, ModelParams};
use crate::observables::{compare_models, sigma_x_operator, sigma_z_operator};
use crate::output::{fmt_num, CsvWriter};
use crate::symmetry::{build_symmetry, parity_sectors, verify_model, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            t0: 0.0,
            t1: 2.0 * std::f64::consts::PI,
            steps: 200,
        }
    }
}

/// Everything a run depends on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ModelParams,
    pub cutoff: usize,
    pub grid: GridConfig,
    /// Initial-state label, see [`parse_initial_state`].
    pub initial: String,
    /// Model for `evolve`/`spectrum` and the first model of `compare`.
    pub model: String,
    /// Second model of `compare`.
    pub against: String,
    pub out: Option<PathBuf>,
    pub tolerance: Tolerances,
    pub fermionic_factor: DriveFactor,
    /// Adds `ω/2` to reported energies.
    pub vacuum_energy: bool,
    /// Appends `re_k`/`im_k` amplitude columns to `evolve` output.
    pub dump_states: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            cutoff: 64,
            grid: GridConfig::default(),
            initial: "e0".into(),
            model: "full".into(),
            against: "bosonic".into(),
            out: None,
            tolerance: Tolerances::default(),
            fermionic_factor: DriveFactor::default(),
            vacuum_energy: false,
            dump_states: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn spec(&self) -> Result<FockSpec> {
        FockSpec::new(self.cutoff)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.grid.t0, self.grid.t1, self.grid.steps)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.spec()?;
        self.time_grid()?;
        for t in [self.tolerance.algebraic, self.tolerance.exponential] {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tolerance must be non-negative, got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Models accepted by `evolve`: any spectral kind plus the closed-form
/// propagators and the quadrature-driven two-level track.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolveModel {
    Spectral(ModelKind),
    BosonicClosed,
    CouplingClosed,
    EffectiveFermionic,
}

impl FromStr for EvolveModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bosonic-closed" => Ok(Self::BosonicClosed),
            "coupling-closed" => Ok(Self::CouplingClosed),
            "effective-fermionic" => Ok(Self::EffectiveFermionic),
            other => other.parse().map(Self::Spectral),
        }
    }
}

impl fmt::Display for EvolveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Spectral(kind) => write!(f, "{kind}"),
            Self::BosonicClosed => f.write_str("bosonic-closed"),
            Self::CouplingClosed => f.write_str("coupling-closed"),
            Self::EffectiveFermionic => f.write_str("effective-fermionic"),
        }
    }
}

/// Parses a complex literal such as `0.5`, `-0.2i`, `0.5+0.1i`, `1e-2-3i`.
pub fn parse_complex(text: &str) -> Option<C64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    // The real/imaginary split is the last sign not opening an exponent.
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse().ok()?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().ok()?,
    };
    Some(C64::new(re, im))
}

fn parse_spin(label: &str) -> Option<SpinState> {
    match label {
        "e" => Some(SpinState::Excited),
        "g" => Some(SpinState::Ground),
        "+" => Some(SpinState::Plus),
        "-" => Some(SpinState::Minus),
        _ => None,
    }
}

/// Initial state from a label: `<spin><n>` for a Fock state (`e0`, `g3`,
/// `+0`, `-2`) or `coh:<spin>:<alpha>` for a coherent field
/// (`coh:e:0.5+0.1i`). Spin labels are `e`, `g`, `+`, `-`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialState {
    Fock(SpinState, usize),
    Coherent(SpinState, C64),
}

impl InitialState {
    pub fn spin(&self) -> SpinState {
        match *self {
            Self::Fock(s, _) | Self::Coherent(s, _) => s,
        }
    }

    /// Coherent amplitude carried by the field, for the cutoff guard.
    pub fn amplitude(&self) -> f64 {
        match *self {
            Self::Fock(..) => 0.0,
            Self::Coherent(_, alpha) => alpha.norm(),
        }
    }

    pub fn build(&self, spec: FockSpec) -> Result<StateVector> {
        match *self {
            Self::Fock(spin, n) => StateVector::composite(spec, spin, n),
            Self::Coherent(spin, alpha) => {
                StateVector::product(&StateVector::spin(spin), &coherent_state(alpha, spec)?)
            }
        }
    }
}

pub fn parse_initial_state(label: &str) -> Result<InitialState> {
    let fail = |reason: &str| Error::InitialState {
        spec: label.to_string(),
        reason: reason.to_string(),
    };
    if let Some(rest) = label.strip_prefix("coh:") {
        let (spin, alpha) = rest
            .split_once(':')
            .ok_or_else(|| fail("expected coh:<spin>:<alpha>"))?;
        let spin = parse_spin(spin).ok_or_else(|| fail("spin label must be one of e, g, +, -"))?;
        let alpha = parse_complex(alpha).ok_or_else(|| fail("malformed complex amplitude"))?;
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(fail("amplitude must be finite"));
        }
        return Ok(InitialState::Coherent(spin, alpha));
    }
    let mut chars = label.chars();
    let spin = chars
        .next()
        .and_then(|c| parse_spin(&c.to_string()))
        .ok_or_else(|| fail("spin label must be one of e, g, +, -"))?;
    let n = chars.as_str();
    if n.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) {
        return Err(fail("expected a Fock index after the spin label"));
    }
    let n = n.parse().map_err(|_| fail("Fock index out of range"))?;
    Ok(InitialState::Fock(spin, n))
}

#[derive(Debug, Parser)]
#[command(
    name = "qrm",
    version,
    about = "Quantum Rabi model symmetry checks and dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the operator identity catalogue and write the residual report.
    Verify(CommonArgs),
    /// Propagate an initial state and write observables over time.
    Evolve(CommonArgs),
    /// Fidelity between two models propagating the same initial state.
    Compare(CommonArgs),
    /// Eigenvalues of a Hamiltonian in each parity sector.
    Spectrum(CommonArgs),
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// full, bosonic, fermionic, coupling, transform; `evolve` also takes
    /// bosonic-closed, coupling-closed, effective-fermionic.
    #[arg(long)]
    pub model: Option<String>,
    /// Second model for `compare`.
    #[arg(long)]
    pub against: Option<String>,
    /// e0, g3, +0, -2, coh:e:0.5+0.1i
    #[arg(long, allow_hyphen_values = true)]
    pub initial: Option<String>,
    /// Single threshold replacing both verification tolerances.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// paper_2g or substitution_g
    #[arg(long)]
    pub fermionic_factor: Option<String>,
    #[arg(long)]
    pub vacuum_energy: bool,
    #[arg(long)]
    pub dump_states: bool,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    pub print_config: bool,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path).map_err(|e| match e {
                Error::Io(io) => {
                    Error::InvalidParameter(format!("cannot read {}: {io}", path.display()))
                }
                other => other,
            })?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.cutoff {
            cfg.cutoff = v;
        }
        if let Some(v) = self.omega {
            cfg.params.omega = v;
        }
        if let Some(v) = self.omega0 {
            cfg.params.omega0 = v;
        }
        if let Some(v) = self.g {
            cfg.params.g = v;
        }
        if let Some(v) = self.t1 {
            cfg.grid.t1 = v;
        }
        if let Some(v) = self.steps {
            cfg.grid.steps = v;
        }
        if let Some(v) = &self.model {
            cfg.model = v.clone();
        }
        if let Some(v) = &self.against {
            cfg.against = v.clone();
        }
        if let Some(v) = &self.initial {
            cfg.initial = v.clone();
        }
        if let Some(v) = self.tolerance {
            cfg.tolerance = Tolerances {
                algebraic: v,
                exponential: v,
            };
        }
        if let Some(v) = &self.fermionic_factor {
            cfg.fermionic_factor = serde_json::from_value(serde_json::Value::String(v.clone()))
                .map_err(|_| Error::InvalidParameter(format!("unknown fermionic factor `{v}`")))?;
        }
        cfg.vacuum_energy |= self.vacuum_energy;
        cfg.dump_states |= self.dump_states;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (common, cmd): (&CommonArgs, fn(&RunConfig) -> Result<i32>) = match &cli.command {
        Command::Verify(a) => (a, cmd_verify),
        Command::Evolve(a) => (a, cmd_evolve),
        Command::Compare(a) => (a, cmd_compare),
        Command::Spectrum(a) => (a, cmd_spectrum),
    };
    let result = common.resolve().and_then(|cfg| {
        if common.print_config {
            println!("{}", cfg.to_json());
            Ok(EXIT_OK)
        } else {
            cmd(&cfg)
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CutoffGuard { .. } => EXIT_GUARD,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Writes through `emit` to the configured file, or to stdout.
fn write_output(
    cfg: &RunConfig,
    emit: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            emit(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

/// Human-readable summary: stdout when the CSV went to a file, else stderr.
fn summary(cfg: &RunConfig, line: &str) {
    if cfg.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

/// Largest field displacement a spectral run of `kind` can reach over the
/// grid span `t`, used for the cutoff guard.
fn spectral_amplitude(params: ModelParams, span: f64) -> f64 {
    let kick = params.g * span;
    if params.omega > 0.0 {
        kick.min(2.0 * params.g / params.omega)
    } else {
        kick
    }
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<i32> {
    // Every identity is exact at any cutoff, so no guard applies here.
    let model = Model::new(cfg.params, cfg.spec()?)?;
    let report = verify_model(&model, cfg.tolerance);
    write_output(cfg, |w| report.write_csv(w))?;
    let failed = report.failures().count();
    if let Some(worst) = report.worst() {
        summary(
            cfg,
            &format!(
                "{} identities, {} failed; worst residual {:e} ({})",
                report.len(),
                failed,
                worst.residual,
                worst.identity
            ),
        );
    }
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<i32> {
    let spec = cfg.spec()?;
    let grid = cfg.time_grid()?;
    let params = cfg.params;
    let model_kind: EvolveModel = cfg.model.parse()?;
    let initial = parse_initial_state(&cfg.initial)?;
    if let InitialState::Fock(_, n) = initial {
        if n > spec.cutoff() {
            return Err(Error::InitialState {
                spec: cfg.initial.clone(),
                reason: format!("Fock index exceeds the cutoff {}", spec.cutoff()),
            });
        }
    }
    let t_max = grid.t0().abs().max(grid.t1().abs());
    let amplitude = match model_kind {
        EvolveModel::BosonicClosed => {
            if params.omega == 0.0 {
                return Err(Error::ZeroFrequency);
            }
            2.0 * params.g / params.omega
        }
        EvolveModel::CouplingClosed => params.g * t_max,
        EvolveModel::Spectral(_) | EvolveModel::EffectiveFermionic => {
            spectral_amplitude(params, grid.span())
        }
    };
    spec.check_guard(amplitude + initial.amplitude())?;

    let psi0 = initial.build(spec)?;
    let traj = match model_kind {
        EvolveModel::Spectral(kind) => {
            let model = Model::new(params, spec)?;
            let mut traj = evolve_spectral(model.hamiltonian(kind), &psi0, grid)?;
            record_composite_observables(&mut traj, spec)?;
            traj
        }
        EvolveModel::BosonicClosed | EvolveModel::CouplingClosed => {
            let states = grid
                .times()
                .into_iter()
                .map(|t| {
                    let u = if model_kind == EvolveModel::BosonicClosed {
                        bosonic_propagator(params, spec, t)?
                    } else {
                        coupling_only_propagator(params.g, spec, t)?
                    };
                    u.evolve(&psi0)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut traj = Trajectory::new(grid, Some(states))?;
            record_composite_observables(&mut traj, spec)?;
            traj
        }
        EvolveModel::EffectiveFermionic => {
            // The drive is the light quadrature of the bosonic track.
            let model = Model::new(params, spec)?;
            let bosonic = evolve_spectral(model.effective(EffectiveKind::Bosonic), &psi0, grid)?;
            let x = quadrature_signal(&bosonic)?;
            let spin0 = StateVector::spin(initial.spin());
            effective_fermionic_evolve(params, cfg.fermionic_factor, &x, &spin0, grid)?
        }
    };
    write_output(cfg, |w| traj.write_csv(w, cfg.dump_states))?;
    summary(
        cfg,
        &format!(
            "evolved {} under {model_kind} over {} samples",
            cfg.initial,
            grid.len()
        ),
    );
    Ok(EXIT_OK)
}

fn record_composite_observables(traj: &mut Trajectory, spec: FockSpec) -> Result<()> {
    traj.record_expectation("photon_number", &photon_number_operator(spec))?;
    traj.record_expectation("quadrature", &quadrature_operator(spec))?;
    traj.record_expectation("sigma_z", &sigma_z_operator(spec))?;
    traj.record_expectation("sigma_x", &sigma_x_operator(spec))?;
    traj.record_expectation("parity", &build_symmetry(spec).pi_z)
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<i32> {
    let spec = cfg.spec()?;
    let grid = cfg.time_grid()?;
    let kind_a: ModelKind = cfg.model.parse()?;
    let kind_b: ModelKind = cfg.against.parse()?;
    let initial = parse_initial_state(&cfg.initial)?;
    spec.check_guard(spectral_amplitude(cfg.params, grid.span()) + initial.amplitude())?;
    let model = Model::new(cfg.params, spec)?;
    let psi0 = initial.build(spec)?;
    let curve = compare_models(&model, &psi0, grid, kind_a, kind_b)?;
    write_output(cfg, |w| curve.write_csv(w))?;
    summary(
        cfg,
        &format!(
            "{kind_a} vs {kind_b}: minimum fidelity {}",
            fmt_num(curve.min_fidelity())
        ),
    );
    Ok(EXIT_OK)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<i32> {
    let spec = cfg.spec()?;
    let kind: ModelKind = cfg.model.parse()?;
    let params = cfg.params;
    if params.omega > 0.0 {
        spec.check_guard(2.0 * params.g / params.omega)?;
    }
    let model = Model::new(params, spec)?;
    let sectors = parity_sectors(model.hamiltonian(kind), spec)?;
    let shift = if cfg.vacuum_energy {
        0.5 * params.omega
    } else {
        0.0
    };
    let (plus, minus) = sectors.eigenvalues();
    write_output(cfg, |w| {
        let mut csv = CsvWriter::new(w, &["parity", "index", "energy"])?;
        for (label, values) in [("+1", &plus), ("-1", &minus)] {
            for (k, e) in values.iter().enumerate() {
                csv.record([label.to_string(), k.to_string(), fmt_num(e + shift)])?;
            }
        }
        csv.finish()
    })?;
    summary(
        cfg,
        &format!(
            "{kind}: {} + {} eigenvalues, sector coupling {:e}",
            plus.len(),
            minus.len(),
            sectors.cross_norm
        ),
    );
    Ok(EXIT_OK)
}
