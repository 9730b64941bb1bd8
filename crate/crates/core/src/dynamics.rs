//! Time evolution: a generic spectral propagator plus the closed-form
//! propagators of the bosonic and coupling-only Hamiltonians, the entangled
//! cat state they generate, and the quadrature-driven two-level evolution.

use std::io::{self, Write};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    coherent_state, displacement, fock_ladder, number_operator, on_field, tensor, FockSpec,
    Operator, Space, Spectral, SpinState, StateVector, C64, I,
};
use crate::model::ModelParams;
use crate::output::{fmt_num, CsvWriter};

/// Uniform time grid including both endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if !t0.is_finite() || !t1.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "non-finite endpoints {t0}, {t1}"
            )));
        }
        if steps < 1 {
            return Err(Error::InvalidGrid("at least one step is required".into()));
        }
        if t1 <= t0 {
            return Err(Error::InvalidGrid(format!(
                "t1 = {t1} must exceed t0 = {t0}"
            )));
        }
        Ok(Self { t0, t1, steps })
    }

    /// Degenerate single-sample grid at `t`.
    pub fn point(t: f64) -> Self {
        Self {
            t0: t,
            t1: t,
            steps: 0,
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn span(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn dt(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.span() / self.steps as f64
        }
    }

    pub fn time(&self, k: usize) -> f64 {
        assert!(
            k <= self.steps,
            "sample {k} outside grid of {} steps",
            self.steps
        );
        if k == self.steps {
            self.t1
        } else {
            self.t0 + self.span() * (k as f64 / self.steps as f64)
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

/// Sampled evolution: states (optional) and named real observable series.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Option<Vec<StateVector>>,
    observables: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, states: Option<Vec<StateVector>>) -> Result<Self> {
        if let Some(states) = &states {
            if states.len() != grid.len() {
                return Err(Error::SignalMismatch {
                    expected: grid.len(),
                    found: states.len(),
                });
            }
        }
        Ok(Self {
            grid,
            states,
            observables: Vec::new(),
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn states(&self) -> Option<&[StateVector]> {
        self.states.as_deref()
    }

    pub fn final_state(&self) -> Option<&StateVector> {
        self.states.as_ref().and_then(|s| s.last())
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn observables(&self) -> &[(String, Vec<f64>)] {
        &self.observables
    }

    pub fn add_observable(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.grid.len() {
            return Err(Error::SignalMismatch {
                expected: self.grid.len(),
                found: values.len(),
            });
        }
        self.observables.push((name.into(), values));
        Ok(())
    }

    /// Appends `Re ⟨ψ(t)|A|ψ(t)⟩` as a named series.
    pub fn record_expectation(&mut self, name: impl Into<String>, a: &Operator) -> Result<()> {
        let states = self.states.as_ref().ok_or(Error::MissingStates)?;
        let values = states
            .iter()
            .map(|psi| crate::observables::expectation(a, psi).map(|z| z.re))
            .collect::<Result<Vec<_>>>()?;
        self.add_observable(name, values)
    }

    /// First column `t`, then every observable; with `dump_states`, paired
    /// `re_k`/`im_k` columns for each basis index.
    pub fn write_csv<W: Write>(&self, w: W, dump_states: bool) -> io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(self.observables.iter().map(|(n, _)| n.clone()));
        let dump = match (&self.states, dump_states) {
            (Some(states), true) => Some(states),
            _ => None,
        };
        if let Some(states) = dump {
            for k in 0..states.first().map_or(0, |s| s.dim()) {
                header.push(format!("re_{k}"));
                header.push(format!("im_{k}"));
            }
        }
        let mut csv = CsvWriter::new(w, &header)?;
        for (k, t) in self.grid.times().into_iter().enumerate() {
            let mut row = vec![fmt_num(t)];
            row.extend(self.observables.iter().map(|(_, v)| fmt_num(v[k])));
            if let Some(states) = dump {
                for z in states[k].amplitudes().iter() {
                    row.push(fmt_num(z.re));
                    row.push(fmt_num(z.im));
                }
            }
            csv.record(row)?;
        }
        csv.finish()
    }
}

/// `|ψ(t)⟩ = e^{-iH(t−t0)}|ψ0⟩` from a single eigendecomposition.
pub fn evolve_spectral(h: &Operator, psi0: &StateVector, grid: TimeGrid) -> Result<Trajectory> {
    let spectral = Spectral::new(h)?;
    evolve_with(&spectral, psi0, grid)
}

pub fn evolve_with(spectral: &Spectral, psi0: &StateVector, grid: TimeGrid) -> Result<Trajectory> {
    let states = grid
        .times()
        .into_iter()
        .map(|t| spectral.evolve(psi0, t - grid.t0()))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(grid, Some(states))
}

/// Displacement `β(t) = (g/ω)(1 − e^{iωt})` of the bosonic propagator.
pub fn bosonic_amplitude(params: ModelParams, t: f64) -> Result<C64> {
    if params.omega == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    // 1 − e^{iθ} = −2i sin(θ/2) e^{iθ/2}, free of cancellation at small θ.
    let half = 0.5 * params.omega * t;
    Ok(C64::new(0.0, -2.0 * params.g / params.omega * half.sin()) * C64::from_polar(1.0, half))
}

/// Coherent amplitude actually carried by `U(t)|e,0⟩`: the displacement
/// `β(t)` rotated by the free evolution, `e^{-iωt} β(t)`.
pub fn cat_amplitude(params: ModelParams, t: f64) -> Result<C64> {
    Ok(bosonic_amplitude(params, t)? * C64::from_polar(1.0, -params.omega * t))
}

/// Largest coherent amplitude the bosonic dynamics reaches, `2g/ω`.
pub fn bosonic_max_amplitude(params: ModelParams) -> Result<f64> {
    if params.omega == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    Ok(2.0 * params.g / params.omega)
}

/// Largest Fock index `n` for which the displaced state `D(β)|n⟩` still
/// clears the cutoff guard, `n + |β|² + 8|β|√(n+1) + 20 ≤ N_max`.
pub fn guarded_fock_limit(spec: FockSpec, amplitude: f64) -> Option<usize> {
    let a = amplitude.abs();
    let fits = |n: usize| {
        n as f64 + a * a + 8.0 * a * ((n + 1) as f64).sqrt() + 20.0 <= spec.cutoff() as f64
    };
    (0..=spec.cutoff()).take_while(|&n| fits(n)).last()
}

fn sigma_x_projectors() -> (Operator, Operator) {
    let h = C64::new(0.5, 0.0);
    let plus = Operator::new(
        Space::Spin,
        nalgebra::DMatrix::from_row_slice(2, 2, &[h, h, h, h]),
    )
    .expect("2x2");
    let minus = Operator::new(
        Space::Spin,
        nalgebra::DMatrix::from_row_slice(2, 2, &[h, -h, -h, h]),
    )
    .expect("2x2");
    (plus, minus)
}

/// `exp(β b† − β* b)` for the composite bosons `b = σ_x ⊗ a`, assembled on the
/// σ_x eigenbranches where `b` acts as `±a`.
pub fn composite_displacement(beta: C64, spec: FockSpec) -> Result<Operator> {
    let (plus, minus) = sigma_x_projectors();
    let d_plus = displacement(beta, spec)?;
    let d_minus = displacement(-beta, spec)?;
    Ok(&tensor(&plus, &d_plus)? + &tensor(&minus, &d_minus)?)
}

/// `U(t) = e^{-iωt b†b} D(β(t))`, exact up to a global phase for `H₊`.
pub fn bosonic_propagator(params: ModelParams, spec: FockSpec, t: f64) -> Result<Operator> {
    spec.check_guard(bosonic_max_amplitude(params)?)?;
    let beta = bosonic_amplitude(params, t)?;
    let displaced = composite_displacement(beta, spec)?;
    // b†b = I₂ ⊗ a†a is diagonal.
    let rotation = Operator::diagonal(
        Space::Field(spec),
        (0..spec.field_dim()).map(|n| C64::from_polar(1.0, -params.omega * t * n as f64)),
    )?;
    Ok(&on_field(&rotation)? * &displaced)
}

/// Normalized `(|β₊⟩|e⟩ + |β₋⟩|g⟩)/√2` with `|β_±⟩ = (|α⟩ ± |−α⟩)/√2`,
/// `α = e^{-iωt} β(t)`; equals `U(t)|e,0⟩` up to a global phase.
pub fn cat_state(params: ModelParams, spec: FockSpec, t: f64) -> Result<StateVector> {
    spec.check_guard(bosonic_max_amplitude(params)?)?;
    let alpha = cat_amplitude(params, t)?;
    let pos = coherent_state(alpha, spec)?;
    let neg = coherent_state(-alpha, spec)?;
    let even = pos.amplitudes() + neg.amplitudes();
    let odd = pos.amplitudes() - neg.amplitudes();
    let e = StateVector::spin(SpinState::Excited);
    let g = StateVector::spin(SpinState::Ground);
    let amplitudes: DVector<C64> = e.amplitudes().kronecker(&even) + g.amplitudes().kronecker(&odd);
    StateVector::new(Space::Composite(spec), amplitudes)
}

/// `U_RI(t) = e^{β̄(t)(b + b†)}` with `β̄(t) = −igt`.
pub fn coupling_only_propagator(g: f64, spec: FockSpec, t: f64) -> Result<Operator> {
    if !g.is_finite() || g < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "coupling must be non-negative, got {g}"
        )));
    }
    spec.check_guard(g * t.abs())?;
    composite_displacement(C64::new(0.0, -g * t), spec)
}

/// `x(t) = ⟨ψ(t)|a + a†|ψ(t)⟩` for every stored composite state.
pub fn quadrature_signal(traj: &Trajectory) -> Result<Vec<f64>> {
    let states = traj.states().ok_or(Error::MissingStates)?;
    let Some(first) = states.first() else {
        return Ok(Vec::new());
    };
    let spec = match first.space() {
        Space::Composite(spec) => spec,
        other => {
            return Err(Error::DimensionMismatch {
                expected: "composite".into(),
                found: other.to_string(),
            })
        }
    };
    let x = quadrature_operator(spec);
    states
        .iter()
        .map(|psi| crate::observables::expectation(&x, psi).map(|z| z.re))
        .collect()
}

/// `I₂ ⊗ (a + a†)`
pub fn quadrature_operator(spec: FockSpec) -> Operator {
    let (a, a_dagger) = fock_ladder(spec);
    on_field(&(&a + &a_dagger)).expect("field lift")
}

/// `I₂ ⊗ a†a`
pub fn photon_number_operator(spec: FockSpec) -> Operator {
    on_field(&number_operator(spec)).expect("field lift")
}

/// Coefficient of `x(t) σ_x` in the quadrature-driven two-level Hamiltonian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveFactor {
    /// `2g`; the default.
    #[default]
    #[serde(rename = "paper_2g")]
    TwoG,
    /// `g`, from direct substitution of `⟨a + a†⟩` into `H₋`.
    SubstitutionG,
}

impl DriveFactor {
    pub fn coefficient(self, g: f64) -> f64 {
        match self {
            DriveFactor::TwoG => 2.0 * g,
            DriveFactor::SubstitutionG => g,
        }
    }
}

/// Exact `exp(-i(h_z σ_z + h_x σ_x)τ)` applied to a spinor.
fn spin_step(hz: f64, hx: f64, tau: f64, psi: [C64; 2]) -> [C64; 2] {
    let omega = hz.hypot(hx);
    if omega == 0.0 {
        return psi;
    }
    let (s, c) = (omega * tau).sin_cos();
    let k = -I * (s / omega);
    let u00 = C64::new(c, 0.0) + k * hz;
    let u11 = C64::new(c, 0.0) - k * hz;
    let u01 = k * hx;
    [u00 * psi[0] + u01 * psi[1], u01 * psi[0] + u11 * psi[1]]
}

/// Propagates a spinor under `ω0 s_z + c·g·x(t) σ_x` with the drive held
/// constant on each step at the mean of the two endpoint samples.
///
/// Records `drive_x`, `sigma_x`, `sigma_y`, `sigma_z`.
pub fn effective_fermionic_evolve(
    params: ModelParams,
    factor: DriveFactor,
    x_signal: &[f64],
    psi0_spin: &StateVector,
    grid: TimeGrid,
) -> Result<Trajectory> {
    if psi0_spin.space() != Space::Spin {
        return Err(Error::DimensionMismatch {
            expected: Space::Spin.to_string(),
            found: psi0_spin.space().to_string(),
        });
    }
    if x_signal.len() != grid.len() {
        return Err(Error::SignalMismatch {
            expected: grid.len(),
            found: x_signal.len(),
        });
    }
    let hz = 0.5 * params.omega0;
    let coupling = factor.coefficient(params.g);
    let dt = grid.dt();

    let mut psi = [psi0_spin.amplitudes()[0], psi0_spin.amplitudes()[1]];
    let mut states = Vec::with_capacity(grid.len());
    states.push(psi0_spin.clone());
    for k in 0..grid.steps() {
        let drive = 0.5 * (x_signal[k] + x_signal[k + 1]);
        psi = spin_step(hz, coupling * drive, dt, psi);
        states.push(StateVector::from_parts(
            Space::Spin,
            DVector::from_row_slice(&psi),
        ));
    }

    let bloch: Vec<[f64; 3]> = states
        .iter()
        .map(|s| {
            let (e, g) = (s.amplitudes()[0], s.amplitudes()[1]);
            let coherence = e.conj() * g;
            [
                2.0 * coherence.re,
                2.0 * coherence.im,
                e.norm_sqr() - g.norm_sqr(),
            ]
        })
        .collect();
    let mut traj = Trajectory::new(grid, Some(states))?;
    traj.add_observable("drive_x", x_signal.to_vec())?;
    for (axis, name) in ["sigma_x", "sigma_y", "sigma_z"].iter().enumerate() {
        traj.add_observable(*name, bloch.iter().map(|b| b[axis]).collect())?;
    }
    Ok(traj)
}
