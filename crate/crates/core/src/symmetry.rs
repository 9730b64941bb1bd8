//! Parity and duality symmetry operators `Π_j = σ_j ⊗ 𝒫` and the identity
//! catalogue relating them to the Rabi Hamiltonian and its conjugates.

use std::io::{self, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    hermitian_exp, number_operator, on_field, on_spin, spin_ops, tensor, FockSpec, Operator, Space,
    C64,
};
use crate::model::{composite_bosons, EffectiveKind, Model, ModelParams};
use crate::output::{fmt_num, CsvWriter};

/// Unitarity threshold for [`conjugate`].
pub const UNITARY_TOL: f64 = 1e-10;

/// `𝒫 = e^{iπ a†a} = diag((−1)ⁿ)` on the field space.
pub fn field_parity(spec: FockSpec) -> Operator {
    let signs = (0..spec.field_dim()).map(|n| C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
    Operator::diagonal(Space::Field(spec), signs).expect("field dimension")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    fn ordinal(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Levi-Civita symbol over `(x, y, z)`.
fn levi_civita(j: Axis, k: Axis, l: Axis) -> f64 {
    let (j, k, l) = (j.ordinal(), k.ordinal(), l.ordinal());
    if j == k || k == l || j == l {
        0.0
    } else if (j + 1) % 3 == k && (k + 1) % 3 == l {
        1.0
    } else {
        -1.0
    }
}

/// The parity operator and its duality partners, all on the composite space.
#[derive(Clone, Debug)]
pub struct SymmetrySet {
    /// `I₂ ⊗ 𝒫`
    pub parity: Operator,
    pub pi_z: Operator,
    pub pi_y: Operator,
    pub pi_x: Operator,
    /// `σ_+ 𝒫` with `σ_+ = σ_x + iσ_y`
    pub pi_plus: Operator,
    /// `σ_- 𝒫` with `σ_- = σ_x − iσ_y`
    pub pi_minus: Operator,
}

impl SymmetrySet {
    pub fn pi(&self, axis: Axis) -> &Operator {
        match axis {
            Axis::X => &self.pi_x,
            Axis::Y => &self.pi_y,
            Axis::Z => &self.pi_z,
        }
    }

    /// `Π_yx = Π_y Π_x`
    pub fn pi_yx(&self) -> Operator {
        &self.pi_y * &self.pi_x
    }

    /// `Π_xy = Π_x Π_y`
    pub fn pi_xy(&self) -> Operator {
        &self.pi_x * &self.pi_y
    }
}

pub fn build_symmetry(spec: FockSpec) -> SymmetrySet {
    let sp = spin_ops();
    let p = field_parity(spec);
    let lift = |s: &Operator| tensor(s, &p).expect("spin ⊗ field");
    SymmetrySet {
        parity: on_field(&p).expect("field lift"),
        pi_z: lift(&sp.sigma_z),
        pi_y: lift(&sp.sigma_y),
        pi_x: lift(&sp.sigma_x),
        pi_plus: lift(&sp.sigma_plus()),
        pi_minus: lift(&sp.sigma_minus()),
    }
}

/// Excitation-number style generators whose `θ = π` exponentials give the
/// symmetry operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `N_JC = N_z = a†a + s_z`
    Jc,
    /// `N_aJC = a†a − s_z`
    Ajc,
    /// `N_y = a†a + s_y`
    Y,
    /// `N_x = a†a + s_x`
    X,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::Jc, Generator::Ajc, Generator::Y, Generator::X];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Jc => "N_JC",
            Generator::Ajc => "N_aJC",
            Generator::Y => "N_y",
            Generator::X => "N_x",
        }
    }

    /// The `Π_j` this generator reproduces up to a global phase.
    pub fn target(self) -> Axis {
        match self {
            Generator::Jc | Generator::Ajc => Axis::Z,
            Generator::Y => Axis::Y,
            Generator::X => Axis::X,
        }
    }
}

pub fn generator(which: Generator, spec: FockSpec) -> Operator {
    let sp = spin_ops();
    let n = on_field(&number_operator(spec)).expect("field lift");
    let (sign, spin) = match which {
        Generator::Jc => (1.0, sp.sz.clone()),
        Generator::Ajc => (-1.0, sp.sz.clone()),
        Generator::Y => (1.0, sp.sy()),
        Generator::X => (1.0, sp.sx()),
    };
    &n + &on_spin(&spin, spec).expect("spin lift").scale_real(sign)
}

/// `e^{iπN}` by spectral exponentiation of the chosen generator.
pub fn exp_generator(which: Generator, spec: FockSpec) -> Result<Operator> {
    hermitian_exp(&generator(which, spec), -std::f64::consts::PI)
}

/// Result of comparing two operators modulo a global phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMatch {
    /// Unit-modulus `c` such that `a ≈ c·b`.
    pub phase: C64,
    /// `max |a − c·b|`
    pub residual: f64,
}

/// Finds the global phase relating `a` to `b`, using the ratio of entries at
/// the largest-magnitude entry of `b`.
pub fn match_up_to_phase(a: &Operator, b: &Operator) -> PhaseMatch {
    let (pivot, magnitude) = b
        .matrix()
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (k, z)| {
            if z.norm() > best.1 {
                (k, z.norm())
            } else {
                best
            }
        });
    if magnitude == 0.0 {
        return PhaseMatch {
            phase: C64::new(1.0, 0.0),
            residual: a.max_abs(),
        };
    }
    let ratio = a.matrix().as_slice()[pivot] / b.matrix().as_slice()[pivot];
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    PhaseMatch {
        phase,
        residual: a.max_abs_diff(&b.scale(phase)),
    }
}

/// `U† A U`; `U` must be unitary within [`UNITARY_TOL`].
pub fn conjugate(u: &Operator, a: &Operator) -> Result<Operator> {
    if u.space() != a.space() {
        return Err(Error::DimensionMismatch {
            expected: u.space().to_string(),
            found: a.space().to_string(),
        });
    }
    let residual = u.unitarity_residual();
    if residual.is_nan() || residual > UNITARY_TOL {
        return Err(Error::NotUnitary(residual));
    }
    Ok(conj(u, a))
}

fn conj(u: &Operator, a: &Operator) -> Operator {
    &(&u.adjoint() * a) * u
}

/// Thresholds for the identity catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Finite algebraic identities.
    pub algebraic: f64,
    /// Identities involving a matrix exponential.
    pub exponential: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-12,
            exponential: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualEntry {
    pub identity: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// One row per checked identity; `passed ⇔ residual ≤ tolerance`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualReport {
    entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, identity: impl Into<String>, residual: f64, tolerance: f64) {
        self.entries.push(ResidualEntry {
            identity: identity.into(),
            residual,
            tolerance,
            // NaN residuals fail.
            passed: residual <= tolerance,
        });
    }

    pub fn entries(&self) -> &[ResidualEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, identity: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.identity == identity)
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResidualEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    /// Row with the largest residual relative to its tolerance.
    pub fn worst(&self) -> Option<&ResidualEntry> {
        self.entries.iter().max_by(|a, b| {
            let ra = a.residual / a.tolerance;
            let rb = b.residual / b.tolerance;
            ra.total_cmp(&rb)
        })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut csv = CsvWriter::new(w, &["identity", "residual", "tolerance", "passed"])?;
        for e in &self.entries {
            csv.record([
                e.identity.clone(),
                fmt_num(e.residual),
                fmt_num(e.tolerance),
                e.passed.to_string(),
            ])?;
        }
        csv.finish()
    }

    pub fn to_text(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|e| e.identity.len())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{:<4} {:<width$}  residual {:.3e}  tol {:.0e}\n",
                if e.passed { "ok" } else { "FAIL" },
                e.identity,
                e.residual,
                e.tolerance,
            ));
        }
        out
    }
}

/// Checks the full identity catalogue at default tolerances.
pub fn verify_algebra(params: ModelParams, spec: FockSpec) -> Result<ResidualReport> {
    let model = Model::new(params, spec)?;
    Ok(verify_model(&model, Tolerances::default()))
}

pub fn verify_model(model: &Model, tol: Tolerances) -> ResidualReport {
    let spec = model.spec();
    let set = model.hamiltonians();
    let sym = build_symmetry(spec);
    let sp = spin_ops();
    let composite = Space::Composite(spec);
    let id = Operator::identity(composite);
    let zero = Operator::zeros(composite);
    let params = model.params();
    let alg = tol.algebraic;

    let mut report = ResidualReport::new();
    let mut check = |name: String, lhs: &Operator, rhs: &Operator, tolerance: f64| {
        report.push(name, lhs.max_abs_diff(rhs), tolerance);
    };

    // Construction identities of the model itself.
    check("H = H0 + HI".into(), &set.h, &(&set.h0 + &set.hi), alg);
    let sym_free = (&set.n_jc.scale_real(params.delta_plus())
        + &set.n_ajc.scale_real(params.delta_minus()))
        .scale_real(0.5);
    check(
        "H0 = (d+ N_JC + d- N_aJC)/2".into(),
        &set.h0,
        &sym_free,
        alg,
    );
    check(
        "HI = H_JC_int + H_aJC_int".into(),
        &set.hi,
        &(&set.h_jc_int + &set.h_ajc_int),
        alg,
    );
    check(
        "H = H_JC + H_aJC".into(),
        &set.h,
        &(&set.h_jc() + &set.h_ajc()),
        alg,
    );

    // Closed SU(2) algebra.
    check("P^2 = I".into(), &(&sym.parity * &sym.parity), &id, alg);
    for j in Axis::ALL {
        let pj = sym.pi(j);
        check(
            format!("Pi_{0}^dag = Pi_{0}", j.name()),
            &pj.adjoint(),
            pj,
            alg,
        );
        check(
            format!("Pi_{0}^dag Pi_{0} = I", j.name()),
            &(&pj.adjoint() * pj),
            &id,
            alg,
        );
    }
    for j in Axis::ALL {
        for k in Axis::ALL {
            let (pj, pk) = (sym.pi(j), sym.pi(k));
            let anti_rhs = if j == k {
                id.scale_real(2.0)
            } else {
                zero.clone()
            };
            check(
                format!("{{Pi_{}, Pi_{}}} = 2 delta", j.name(), k.name()),
                &pj.anticommutator(pk),
                &anti_rhs,
                alg,
            );
            let mut comm_rhs = zero.clone();
            for l in Axis::ALL {
                let eps = levi_civita(j, k, l);
                if eps != 0.0 {
                    comm_rhs =
                        &comm_rhs + &(sym.pi(l) * &sym.parity).scale(C64::new(0.0, 2.0 * eps));
                }
            }
            check(
                format!("[Pi_{}, Pi_{}] = 2i eps Pi_l P", j.name(), k.name()),
                &pj.commutator(pk),
                &comm_rhs,
                alg,
            );
        }
    }
    check(
        "[Pi_z, Pi_+] = 2 Pi_+ P".into(),
        &sym.pi_z.commutator(&sym.pi_plus),
        &(&sym.pi_plus * &sym.parity).scale_real(2.0),
        alg,
    );
    check(
        "[Pi_z, Pi_-] = -2 Pi_- P".into(),
        &sym.pi_z.commutator(&sym.pi_minus),
        &(&sym.pi_minus * &sym.parity).scale_real(-2.0),
        alg,
    );
    check(
        "[Pi_+, Pi_-] = 4 Pi_z P".into(),
        &sym.pi_plus.commutator(&sym.pi_minus),
        &(&sym.pi_z * &sym.parity).scale_real(4.0),
        alg,
    );

    // Transformations of the elementary light and spin operators.
    let (a, a_dagger) = crate::hilbert::fock_ladder(spec);
    let a = on_field(&a).expect("field lift");
    let a_dagger = on_field(&a_dagger).expect("field lift");
    let sz = on_spin(&sp.sz, spec).expect("spin lift");
    let s_minus = on_spin(&sp.s_minus, spec).expect("spin lift");
    let s_plus = on_spin(&sp.s_plus, spec).expect("spin lift");
    let elementary: [(&str, &Operator); 5] = [
        ("a", &a),
        ("a^dag", &a_dagger),
        ("s_z", &sz),
        ("s_-", &s_minus),
        ("s_+", &s_plus),
    ];
    // Images of (a, a†, s_z, s_-, s_+) under each Π_j.
    let images: [(Axis, [(&str, Operator); 5]); 3] = [
        (
            Axis::Z,
            [
                ("-a", -&a),
                ("-a^dag", -&a_dagger),
                ("s_z", sz.clone()),
                ("-s_-", -&s_minus),
                ("-s_+", -&s_plus),
            ],
        ),
        (
            Axis::Y,
            [
                ("-a", -&a),
                ("-a^dag", -&a_dagger),
                ("-s_z", -&sz),
                ("-s_+", -&s_plus),
                ("-s_-", -&s_minus),
            ],
        ),
        (
            Axis::X,
            [
                ("-a", -&a),
                ("-a^dag", -&a_dagger),
                ("-s_z", -&sz),
                ("s_+", s_plus.clone()),
                ("s_-", s_minus.clone()),
            ],
        ),
    ];
    for (axis, targets) in &images {
        let pj = sym.pi(*axis);
        for ((src_name, src), (dst_name, dst)) in elementary.iter().zip(targets) {
            check(
                format!("Pi_{0}^dag {src_name} Pi_{0} = {dst_name}", axis.name()),
                &conj(pj, src),
                dst,
                alg,
            );
        }
    }

    // Parity invariance.
    let h_bar_plus = set.h_bar_plus();
    let h_bar_minus = set.h_bar_minus();
    let invariant: [(&str, &Operator); 7] = [
        ("N_JC", &set.n_jc),
        ("N_aJC", &set.n_ajc),
        ("H_JC_int", &set.h_jc_int),
        ("H_aJC_int", &set.h_ajc_int),
        ("H0", &set.h0),
        ("HI", &set.hi),
        ("H", &set.h),
    ];
    for (name, op) in invariant {
        check(
            format!("Pi_z^dag {name} Pi_z = {name}"),
            &conj(&sym.pi_z, op),
            op,
            alg,
        );
    }
    check(
        "[Pi_z, H] = 0".into(),
        &sym.pi_z.commutator(&set.h),
        &zero,
        alg,
    );

    // Duality conjugation of the number operators and the free part.
    for axis in [Axis::Y, Axis::X] {
        let pj = sym.pi(axis);
        let j = axis.name();
        check(
            format!("Pi_{j}^dag N_JC Pi_{j} = N_aJC"),
            &conj(pj, &set.n_jc),
            &set.n_ajc,
            alg,
        );
        check(
            format!("Pi_{j}^dag N_aJC Pi_{j} = N_JC"),
            &conj(pj, &set.n_ajc),
            &set.n_jc,
            alg,
        );
        check(
            format!("Pi_{j}^dag H0 Pi_{j} = H0bar"),
            &conj(pj, &set.h0),
            &set.h0_bar,
            alg,
        );
        check(
            format!("Pi_{j}^dag H0bar Pi_{j} = H0"),
            &conj(pj, &set.h0_bar),
            &set.h0,
            alg,
        );
    }

    // Duality conjugation of the interaction pieces.
    check(
        "Pi_y^dag H_JC_int Pi_y = H_aJC_int".into(),
        &conj(&sym.pi_y, &set.h_jc_int),
        &set.h_ajc_int,
        alg,
    );
    check(
        "Pi_y^dag H_aJC_int Pi_y = H_JC_int".into(),
        &conj(&sym.pi_y, &set.h_ajc_int),
        &set.h_jc_int,
        alg,
    );
    check(
        "Pi_x^dag H_JC_int Pi_x = -H_aJC_int".into(),
        &conj(&sym.pi_x, &set.h_jc_int),
        &-&set.h_ajc_int,
        alg,
    );
    check(
        "Pi_x^dag H_aJC_int Pi_x = -H_JC_int".into(),
        &conj(&sym.pi_x, &set.h_ajc_int),
        &-&set.h_jc_int,
        alg,
    );

    // Symmetric conjugation and the effective bosonic Hamiltonian.
    let h_plus = model.effective(EffectiveKind::Bosonic);
    check(
        "Pi_y^dag HI Pi_y = HI".into(),
        &conj(&sym.pi_y, &set.hi),
        &set.hi,
        alg,
    );
    check(
        "[Pi_y, HI] = 0".into(),
        &sym.pi_y.commutator(&set.hi),
        &zero,
        alg,
    );
    check(
        "Pi_y^dag H Pi_y = Hbar+".into(),
        &conj(&sym.pi_y, &set.h),
        &h_bar_plus,
        alg,
    );
    check(
        "Pi_y^dag Hbar+ Pi_y = H".into(),
        &conj(&sym.pi_y, &h_bar_plus),
        &set.h,
        alg,
    );
    check(
        "H+ = (H + Hbar+)/2".into(),
        h_plus,
        &(&set.h + &h_bar_plus).scale_real(0.5),
        alg,
    );
    check(
        "Pi_y^dag H+ Pi_y = H+".into(),
        &conj(&sym.pi_y, h_plus),
        h_plus,
        alg,
    );
    check(
        "[Pi_y, H+] = 0".into(),
        &sym.pi_y.commutator(h_plus),
        &zero,
        alg,
    );

    let (b, b_dagger) = composite_bosons(spec);
    let mut edge = DMatrix::zeros(spec.field_dim(), spec.field_dim());
    edge[(spec.cutoff(), spec.cutoff())] = C64::new(spec.field_dim() as f64, 0.0);
    let edge = on_field(&Operator::new(Space::Field(spec), edge).expect("field dimension"))
        .expect("field lift");
    check(
        "[b, b^dag] = I - (N+1)|N><N|".into(),
        &b.commutator(&b_dagger),
        &(&id - &edge),
        alg,
    );
    check("[b, b] = 0".into(), &b.commutator(&b), &zero, alg);
    check(
        "[b^dag, b^dag] = 0".into(),
        &b_dagger.commutator(&b_dagger),
        &zero,
        alg,
    );
    let h_plus_bosons =
        &(&b_dagger * &b).scale_real(params.omega) + &(&b + &b_dagger).scale_real(params.g);
    check(
        "H+ = w b^dag b + g(b + b^dag)".into(),
        h_plus,
        &h_plus_bosons,
        alg,
    );

    // Antisymmetric conjugation and the effective fermionic Hamiltonian.
    let h_minus = model.effective(EffectiveKind::Fermionic);
    check(
        "Pi_x^dag HI Pi_x = -HI".into(),
        &conj(&sym.pi_x, &set.hi),
        &-&set.hi,
        alg,
    );
    check(
        "{Pi_x, HI} = 0".into(),
        &sym.pi_x.anticommutator(&set.hi),
        &zero,
        alg,
    );
    check(
        "Pi_x^dag H Pi_x = Hbar-".into(),
        &conj(&sym.pi_x, &set.h),
        &h_bar_minus,
        alg,
    );
    check(
        "Pi_x^dag Hbar- Pi_x = H".into(),
        &conj(&sym.pi_x, &h_bar_minus),
        &set.h,
        alg,
    );
    check(
        "H- = (H - Hbar-)/2".into(),
        h_minus,
        &(&set.h - &h_bar_minus).scale_real(0.5),
        alg,
    );
    check(
        "Pi_x^dag H- Pi_x = -H-".into(),
        &conj(&sym.pi_x, h_minus),
        &-h_minus,
        alg,
    );
    check(
        "{Pi_x, H-} = 0".into(),
        &sym.pi_x.anticommutator(h_minus),
        &zero,
        alg,
    );

    // Product transform and the coupling-only Hamiltonian.
    let h_tilde = model.transform();
    let pi_yx = sym.pi_yx();
    let pi_xy = sym.pi_xy();
    check(
        "Pi_yx^dag H Pi_yx = Htilde".into(),
        &conj(&pi_yx, &set.h),
        h_tilde,
        alg,
    );
    check(
        "Pi_yx^dag Htilde Pi_yx = H".into(),
        &conj(&pi_yx, h_tilde),
        &set.h,
        alg,
    );
    check(
        "Pi_xy^dag H Pi_xy = Htilde".into(),
        &conj(&pi_xy, &set.h),
        h_tilde,
        alg,
    );
    check(
        "Pi_xy^dag Htilde Pi_xy = H".into(),
        &conj(&pi_xy, h_tilde),
        &set.h,
        alg,
    );
    check(
        "Pi_yx^dag H Pi_yx = Pi_xy^dag H Pi_xy".into(),
        &conj(&pi_yx, &set.h),
        &conj(&pi_xy, &set.h),
        alg,
    );
    check(
        "H_RI = (H - Htilde)/2".into(),
        model.effective(EffectiveKind::Coupling),
        &(&set.h - h_tilde).scale_real(0.5),
        alg,
    );

    // Duality conjugation is an involution on every member of the set.
    let members: [(&str, &Operator); 6] = [
        ("H", &set.h),
        ("H0", &set.h0),
        ("HI", &set.hi),
        ("N_JC", &set.n_jc),
        ("H+", h_plus),
        ("H-", h_minus),
    ];
    for (name, op) in members {
        check(
            format!("Pi_y^dag Pi_y^dag {name} Pi_y Pi_y = {name}"),
            &conj(&sym.pi_y, &conj(&sym.pi_y, op)),
            op,
            alg,
        );
    }

    // Generator exponentials, equal to Π_j up to a global phase.
    let mut exps = Vec::new();
    for which in Generator::ALL {
        let name = format!(
            "exp(i pi {}) = c Pi_{}",
            which.name(),
            which.target().name()
        );
        match exp_generator(which, spec) {
            Ok(u) => {
                let m = match_up_to_phase(&u, sym.pi(which.target()));
                report.push(name, m.residual, tol.exponential);
                exps.push(Some(u));
            }
            Err(_) => {
                report.push(name, f64::INFINITY, tol.exponential);
                exps.push(None);
            }
        }
    }
    let jc_vs_ajc = match (&exps[0], &exps[1]) {
        (Some(jc), Some(ajc)) => match_up_to_phase(jc, ajc).residual,
        _ => f64::INFINITY,
    };
    report.push(
        "exp(i pi N_JC) = c exp(i pi N_aJC)",
        jc_vs_ajc,
        tol.exponential,
    );

    report
}

/// `Π_z` eigenvalue of composite basis index `index`.
pub fn parity_eigenvalue(spec: FockSpec, index: usize) -> i8 {
    let d = spec.field_dim();
    let spin_sign: i8 = if index / d == 0 { 1 } else { -1 };
    let fock_sign: i8 = if (index % d).is_multiple_of(2) { 1 } else { -1 };
    spin_sign * fock_sign
}

/// An operator split along the `Π_z = ±1` eigenspaces.
#[derive(Clone, Debug)]
pub struct ParitySectors {
    pub plus_block: DMatrix<C64>,
    pub minus_block: DMatrix<C64>,
    /// Composite indices spanning each sector, ascending.
    pub plus_basis: Vec<usize>,
    pub minus_basis: Vec<usize>,
    /// Max-abs entry of the off-diagonal (sector-mixing) blocks.
    pub cross_norm: f64,
}

impl ParitySectors {
    /// Ascending eigenvalues of the `+1` and `−1` blocks.
    pub fn eigenvalues(&self) -> (Vec<f64>, Vec<f64>) {
        (
            block_eigenvalues(&self.plus_block),
            block_eigenvalues(&self.minus_block),
        )
    }
}

fn block_eigenvalues(block: &DMatrix<C64>) -> Vec<f64> {
    if block.is_empty() {
        return Vec::new();
    }
    let sym = (block + block.adjoint()).map(|z| z * 0.5);
    let mut values: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn parity_sectors(a: &Operator, spec: FockSpec) -> Result<ParitySectors> {
    if a.space() != Space::Composite(spec) {
        return Err(Error::DimensionMismatch {
            expected: Space::Composite(spec).to_string(),
            found: a.space().to_string(),
        });
    }
    let (plus_basis, minus_basis): (Vec<usize>, Vec<usize>) =
        (0..spec.composite_dim()).partition(|&k| parity_eigenvalue(spec, k) > 0);
    let block = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| a.get(rows[r], cols[c]))
    };
    let cross_norm = block(&plus_basis, &minus_basis)
        .iter()
        .chain(block(&minus_basis, &plus_basis).iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(ParitySectors {
        plus_block: block(&plus_basis, &plus_basis),
        minus_block: block(&minus_basis, &minus_basis),
        plus_basis,
        minus_basis,
        cross_norm,
    })
}
