//! Rabi Hamiltonian, its Jaynes-Cummings / anti-Jaynes-Cummings pieces and
//! the effective Hamiltonians derived from duality conjugation.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    fock_ladder, number_operator, on_field, on_spin, spin_ops, tensor, FockSpec, Operator,
};

/// Light-mode frequency `ω`, transition frequency `ω0` and coupling `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            omega0: 0.8,
            g: 0.3,
        }
    }
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, g: f64) -> Result<Self> {
        let params = Self { omega, omega0, g };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("omega0", self.omega0),
            ("g", self.g),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// `δ₊ = ω + ω0`
    pub fn delta_plus(&self) -> f64 {
        self.omega + self.omega0
    }

    /// `δ₋ = ω − ω0`
    pub fn delta_minus(&self) -> f64 {
        self.omega - self.omega0
    }
}

/// Every operator of the model, on the composite space.
#[derive(Clone, Debug)]
pub struct HamiltonianSet {
    pub params: ModelParams,
    pub spec: FockSpec,
    /// `H = H0 + HI`
    pub h: Operator,
    /// `ω a†a + ω0 s_z`
    pub h0: Operator,
    /// `g (a + a†)(s_+ + s_-)`
    pub hi: Operator,
    /// `g (a† s_- + a s_+)`
    pub h_jc_int: Operator,
    /// `g (a s_- + a† s_+)`
    pub h_ajc_int: Operator,
    /// `a†a + s_z`
    pub n_jc: Operator,
    /// `a†a − s_z`
    pub n_ajc: Operator,
    /// `½(δ₊ N_aJC + δ₋ N_JC)`, the duality conjugate of `H0`.
    pub h0_bar: Operator,
}

impl HamiltonianSet {
    /// `H_JC = ½δ₊ N_JC + H_JC_int`
    pub fn h_jc(&self) -> Operator {
        &self.n_jc.scale_real(0.5 * self.params.delta_plus()) + &self.h_jc_int
    }

    /// `H_aJC = ½δ₋ N_aJC + H_aJC_int`
    pub fn h_ajc(&self) -> Operator {
        &self.n_ajc.scale_real(0.5 * self.params.delta_minus()) + &self.h_ajc_int
    }

    /// Symmetric duality conjugate `H̄₊ = H̄0 + HI`.
    pub fn h_bar_plus(&self) -> Operator {
        &self.h0_bar + &self.hi
    }

    /// Antisymmetric duality conjugate `H̄₋ = H̄0 − HI`.
    pub fn h_bar_minus(&self) -> Operator {
        &self.h0_bar - &self.hi
    }
}

pub fn build_qrm(params: ModelParams, spec: FockSpec) -> HamiltonianSet {
    let sp = spin_ops();
    let (a, a_dagger) = fock_ladder(spec);
    let lift = |spin: &Operator, field: &Operator| tensor(spin, field).expect("spin ⊗ field");

    let n = on_field(&number_operator(spec)).expect("field lift");
    let sz = on_spin(&sp.sz, spec).expect("spin lift");
    let n_jc = &n + &sz;
    let n_ajc = &n - &sz;

    let h0 = &n.scale_real(params.omega) + &sz.scale_real(params.omega0);
    let quadrature = &a + &a_dagger;
    let hi = lift(&sp.sigma_x, &quadrature).scale_real(params.g);
    let h_jc_int = (&lift(&sp.s_minus, &a_dagger) + &lift(&sp.s_plus, &a)).scale_real(params.g);
    let h_ajc_int = (&lift(&sp.s_minus, &a) + &lift(&sp.s_plus, &a_dagger)).scale_real(params.g);
    let h0_bar = (&n_ajc.scale_real(params.delta_plus()) + &n_jc.scale_real(params.delta_minus()))
        .scale_real(0.5);
    let h = &h0 + &hi;

    HamiltonianSet {
        params,
        spec,
        h,
        h0,
        hi,
        h_jc_int,
        h_ajc_int,
        n_jc,
        n_ajc,
        h0_bar,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EffectiveKind {
    /// `H₊ = ω a†a + g(a + a†)σ_x`
    Bosonic,
    /// `H₋ = ω0 s_z + g(a + a†)σ_x`
    Fermionic,
    /// `H_RI = HI`
    Coupling,
}

pub fn build_effective(params: ModelParams, spec: FockSpec, kind: EffectiveKind) -> Operator {
    let sp = spin_ops();
    let (a, a_dagger) = fock_ladder(spec);
    let drive = tensor(&sp.sigma_x, &(&a + &a_dagger))
        .expect("spin ⊗ field")
        .scale_real(params.g);
    match kind {
        EffectiveKind::Bosonic => {
            let n = on_field(&number_operator(spec)).expect("field lift");
            &n.scale_real(params.omega) + &drive
        }
        EffectiveKind::Fermionic => {
            let sz = on_spin(&sp.sz, spec).expect("spin lift");
            &sz.scale_real(params.omega0) + &drive
        }
        EffectiveKind::Coupling => drive,
    }
}

/// Composite bosons `b = σ_x ⊗ a`, `b† = σ_x ⊗ a†`.
pub fn composite_bosons(spec: FockSpec) -> (Operator, Operator) {
    let sx = spin_ops().sigma_x;
    let (a, a_dagger) = fock_ladder(spec);
    (
        tensor(&sx, &a).expect("spin ⊗ field"),
        tensor(&sx, &a_dagger).expect("spin ⊗ field"),
    )
}

/// `H̃ = H0 − HI`
pub fn build_transform(params: ModelParams, spec: FockSpec) -> Operator {
    let set = build_qrm(params, spec);
    &set.h0 - &set.hi
}

/// Hamiltonians that can drive a dynamics run or a comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Full,
    Bosonic,
    Fermionic,
    Coupling,
    Transform,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Full,
        ModelKind::Bosonic,
        ModelKind::Fermionic,
        ModelKind::Coupling,
        ModelKind::Transform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Full => "full",
            ModelKind::Bosonic => "bosonic",
            ModelKind::Fermionic => "fermionic",
            ModelKind::Coupling => "coupling",
            ModelKind::Transform => "transform",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Lazily built, cached operators for one `(params, spec)` pair.
#[derive(Debug)]
pub struct Model {
    params: ModelParams,
    spec: FockSpec,
    set: OnceLock<HamiltonianSet>,
    bosonic: OnceLock<Operator>,
    fermionic: OnceLock<Operator>,
    transform: OnceLock<Operator>,
}

impl Model {
    pub fn new(params: ModelParams, spec: FockSpec) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            spec,
            set: OnceLock::new(),
            bosonic: OnceLock::new(),
            fermionic: OnceLock::new(),
            transform: OnceLock::new(),
        })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn spec(&self) -> FockSpec {
        self.spec
    }

    pub fn hamiltonians(&self) -> &HamiltonianSet {
        self.set.get_or_init(|| build_qrm(self.params, self.spec))
    }

    pub fn effective(&self, kind: EffectiveKind) -> &Operator {
        match kind {
            EffectiveKind::Bosonic => self
                .bosonic
                .get_or_init(|| build_effective(self.params, self.spec, kind)),
            EffectiveKind::Fermionic => self
                .fermionic
                .get_or_init(|| build_effective(self.params, self.spec, kind)),
            EffectiveKind::Coupling => &self.hamiltonians().hi,
        }
    }

    pub fn transform(&self) -> &Operator {
        self.transform.get_or_init(|| {
            let set = self.hamiltonians();
            &set.h0 - &set.hi
        })
    }

    pub fn hamiltonian(&self, kind: ModelKind) -> &Operator {
        match kind {
            ModelKind::Full => &self.hamiltonians().h,
            ModelKind::Bosonic => self.effective(EffectiveKind::Bosonic),
            ModelKind::Fermionic => self.effective(EffectiveKind::Fermionic),
            ModelKind::Coupling => self.effective(EffectiveKind::Coupling),
            ModelKind::Transform => self.transform(),
        }
    }
}
