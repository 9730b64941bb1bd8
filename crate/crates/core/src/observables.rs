//! Expectation values, fidelities and model-vs-model comparison curves.

use std::io::{self, Write};

use crate::dynamics::{evolve_with, photon_number_operator, TimeGrid};
use crate::error::{Error, Result};
use crate::hilbert::{on_spin, spin_ops, FockSpec, Operator, Spectral, StateVector, C64};
use crate::model::{Model, ModelKind};
use crate::output::{fmt_num, CsvWriter};

/// `⟨ψ|A|ψ⟩`
pub fn expectation(a: &Operator, psi: &StateVector) -> Result<C64> {
    let a_psi = a.apply(psi)?;
    Ok(psi.amplitudes().dotc(&a_psi))
}

/// `|⟨ψ1|ψ2⟩|²`, blind to global phase.
pub fn fidelity(psi1: &StateVector, psi2: &StateVector) -> Result<f64> {
    Ok(psi1.inner(psi2)?.norm_sqr())
}

/// `σ_z ⊗ I`
pub fn sigma_z_operator(spec: FockSpec) -> Operator {
    on_spin(&spin_ops().sigma_z, spec).expect("spin lift")
}

/// `σ_x ⊗ I`
pub fn sigma_x_operator(spec: FockSpec) -> Operator {
    on_spin(&spin_ops().sigma_x, spec).expect("spin lift")
}

/// Fidelity between two propagations of the same initial state, with
/// `⟨a†a⟩` and `⟨σ_z⟩` under each.
#[derive(Clone, Debug)]
pub struct ComparisonCurve {
    pub grid: TimeGrid,
    pub kinds: (ModelKind, ModelKind),
    pub fidelity: Vec<f64>,
    /// `(name, series under A, series under B)`
    pub pairs: Vec<(String, Vec<f64>, Vec<f64>)>,
}

impl ComparisonCurve {
    pub fn min_fidelity(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn pair(&self, name: &str) -> Option<(&[f64], &[f64])> {
        self.pairs
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, a, b)| (a.as_slice(), b.as_slice()))
    }

    /// Columns `t, fidelity`, then `<obs>_<kindA>` for every pair followed by
    /// `<obs>_<kindB>` for every pair.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let (ka, kb) = self.kinds;
        let mut header = vec!["t".to_string(), "fidelity".to_string()];
        header.extend(
            self.pairs
                .iter()
                .map(|(n, _, _)| format!("{n}_{}", ka.name())),
        );
        header.extend(
            self.pairs
                .iter()
                .map(|(n, _, _)| format!("{n}_{}", kb.name())),
        );
        // Identical kinds would otherwise produce duplicate column names.
        if ka == kb {
            let half = self.pairs.len();
            for (i, col) in header.iter_mut().skip(2).enumerate() {
                col.push_str(if i < half { "_a" } else { "_b" });
            }
        }
        let mut csv = CsvWriter::new(w, &header)?;
        for (k, t) in self.grid.times().into_iter().enumerate() {
            let mut row = vec![t, self.fidelity[k]];
            row.extend(self.pairs.iter().map(|(_, a, _)| a[k]));
            row.extend(self.pairs.iter().map(|(_, _, b)| b[k]));
            csv.record(row.into_iter().map(fmt_num))?;
        }
        csv.finish()
    }
}

/// Propagates `psi0` under both Hamiltonians with the spectral propagator and
/// records fidelity, `⟨a†a⟩` and `⟨σ_z⟩` per sample.
pub fn compare_models(
    model: &Model,
    psi0: &StateVector,
    grid: TimeGrid,
    kind_a: ModelKind,
    kind_b: ModelKind,
) -> Result<ComparisonCurve> {
    let spec = model.spec();
    if psi0.space() != model.hamiltonian(kind_a).space() {
        return Err(Error::DimensionMismatch {
            expected: model.hamiltonian(kind_a).space().to_string(),
            found: psi0.space().to_string(),
        });
    }
    let spectral_a = Spectral::new(model.hamiltonian(kind_a))?;
    let traj_a = evolve_with(&spectral_a, psi0, grid)?;
    let traj_b = if kind_a == kind_b {
        traj_a.clone()
    } else {
        evolve_with(&Spectral::new(model.hamiltonian(kind_b))?, psi0, grid)?
    };
    let (sa, sb) = (
        traj_a.states().ok_or(Error::MissingStates)?,
        traj_b.states().ok_or(Error::MissingStates)?,
    );

    let fidelity = sa
        .iter()
        .zip(sb)
        .map(|(a, b)| fidelity(a, b))
        .collect::<Result<Vec<_>>>()?;

    let series = |op: &Operator, states: &[StateVector]| -> Result<Vec<f64>> {
        states
            .iter()
            .map(|psi| expectation(op, psi).map(|z| z.re))
            .collect()
    };
    let mut pairs = Vec::new();
    for (name, op) in [
        ("photon_number", photon_number_operator(spec)),
        ("sigma_z", sigma_z_operator(spec)),
    ] {
        pairs.push((name.to_string(), series(&op, sa)?, series(&op, sb)?));
    }
    Ok(ComparisonCurve {
        grid,
        kinds: (kind_a, kind_b),
        fidelity,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_spectral;
    use crate::hilbert::{coherent_state, Space, SpinState};
    use crate::model::ModelParams;
    use crate::symmetry::build_symmetry;
    use std::f64::consts::PI;

    fn spec(n: usize) -> FockSpec {
        FockSpec::new(n).unwrap()
    }

    fn model(omega: f64, omega0: f64, g: f64, n: usize) -> Model {
        Model::new(ModelParams::new(omega, omega0, g).unwrap(), spec(n)).unwrap()
    }

    #[test]
    fn number_operator_expectations() {
        let s = spec(4);
        let m = model(1.0, 0.8, 0.3, 4);
        let h = m.hamiltonians();
        let e0 = StateVector::composite(s, SpinState::Excited, 0).unwrap();
        let g0 = StateVector::composite(s, SpinState::Ground, 0).unwrap();
        assert!((expectation(&h.n_jc, &e0).unwrap() - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((expectation(&h.n_ajc, &g0).unwrap() - C64::new(0.5, 0.0)).norm() < 1e-15);
        let id = Operator::identity(Space::Composite(s));
        let psi = StateVector::composite(s, SpinState::Plus, 2).unwrap();
        assert!((expectation(&id, &psi).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hermitian_expectation_is_real() {
        let field = coherent_state(C64::new(0.4, 0.7), spec(30)).unwrap();
        let psi = StateVector::product(&StateVector::spin(SpinState::Plus), &field).unwrap();
        let h = model(1.0, 0.8, 0.3, 30).hamiltonians().h.clone();
        assert!(expectation(&h, &psi).unwrap().im.abs() <= 1e-10);
    }

    #[test]
    fn fidelity_basics() {
        let s = spec(3);
        let e0 = StateVector::composite(s, SpinState::Excited, 0).unwrap();
        let g0 = StateVector::composite(s, SpinState::Ground, 0).unwrap();
        assert!((fidelity(&e0, &e0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&e0, &g0).unwrap(), 0.0);
        assert!((fidelity(&e0, &e0.with_phase(1.234)).unwrap() - 1.0).abs() < 1e-15);
        let spin = StateVector::spin(SpinState::Excited);
        assert!(fidelity(&e0, &spin).is_err());
    }

    #[test]
    fn identical_matrices_give_unit_fidelity() {
        let grid = TimeGrid::new(0.0, 2.0 * PI, 60).unwrap();
        let cases = [
            (
                model(1.0, 0.0, 0.3, 30),
                ModelKind::Full,
                ModelKind::Bosonic,
            ),
            (
                model(0.0, 0.8, 0.3, 30),
                ModelKind::Full,
                ModelKind::Fermionic,
            ),
            (
                model(0.0, 0.0, 0.3, 30),
                ModelKind::Full,
                ModelKind::Coupling,
            ),
            (
                model(1.0, 0.8, 0.0, 30),
                ModelKind::Full,
                ModelKind::Transform,
            ),
        ];
        for (m, a, b) in cases {
            let psi0 = StateVector::composite(m.spec(), SpinState::Excited, 0).unwrap();
            let curve = compare_models(&m, &psi0, grid, a, b).unwrap();
            assert!(
                curve.fidelity.iter().all(|f| (f - 1.0).abs() <= 1e-10),
                "{a} vs {b}"
            );
        }
    }

    #[test]
    fn self_comparison_and_symmetry() {
        let m = model(1.0, 0.8, 0.3, 24);
        let psi0 = StateVector::composite(m.spec(), SpinState::Excited, 0).unwrap();
        let grid = TimeGrid::new(0.0, 3.0, 20).unwrap();
        for kind in ModelKind::ALL {
            let curve = compare_models(&m, &psi0, grid, kind, kind).unwrap();
            assert!(curve.fidelity.iter().all(|f| (f - 1.0).abs() <= 1e-12));
        }
        let ab = compare_models(&m, &psi0, grid, ModelKind::Full, ModelKind::Coupling).unwrap();
        let ba = compare_models(&m, &psi0, grid, ModelKind::Coupling, ModelKind::Full).unwrap();
        for (x, y) in ab.fidelity.iter().zip(&ba.fidelity) {
            assert!((x - y).abs() <= 1e-12);
        }
        assert!(ab
            .fidelity
            .iter()
            .all(|&f| (0.0..=1.0 + 1e-12).contains(&f)));
    }

    #[test]
    fn full_versus_bosonic_regression() {
        let m = model(1.0, 0.8, 0.3, 40);
        let psi0 = StateVector::composite(m.spec(), SpinState::Excited, 0).unwrap();
        let grid = TimeGrid::new(0.0, 2.0 * PI, 200).unwrap();
        let curve = compare_models(&m, &psi0, grid, ModelKind::Full, ModelKind::Bosonic).unwrap();
        let min = curve.min_fidelity();
        assert!(min < 1.0);
        assert!(
            (min - FULL_VS_BOSONIC_MIN).abs() < 1e-9,
            "min fidelity {min:.16}"
        );
    }

    // Minimum fidelity over one period at (ω, ω0, g) = (1, 0.8, 0.3) from |e,0⟩.
    const FULL_VS_BOSONIC_MIN: f64 = 0.1065579193742033;

    #[test]
    fn decoupled_number_operators_are_conserved() {
        let m = model(1.0, 0.8, 0.0, 30);
        let s = m.spec();
        let field = coherent_state(C64::new(0.6, -0.2), s).unwrap();
        let psi0 = StateVector::product(&StateVector::spin(SpinState::Plus), &field).unwrap();
        let grid = TimeGrid::new(0.0, 5.0, 25).unwrap();
        let traj = evolve_spectral(&m.hamiltonians().h, &psi0, grid).unwrap();
        for n in [&m.hamiltonians().n_jc, &m.hamiltonians().n_ajc] {
            let values: Vec<f64> = traj
                .states()
                .unwrap()
                .iter()
                .map(|psi| expectation(n, psi).unwrap().re)
                .collect();
            assert!(values.iter().all(|v| (v - values[0]).abs() <= 1e-12));
        }
    }

    #[test]
    fn parity_is_conserved_along_full_dynamics() {
        let m = model(1.0, 0.8, 0.3, 30);
        let psi0 = StateVector::composite(m.spec(), SpinState::Excited, 0).unwrap();
        let grid = TimeGrid::new(0.0, 2.0 * PI, 50).unwrap();
        let traj = evolve_spectral(&m.hamiltonians().h, &psi0, grid).unwrap();
        let pi_z = build_symmetry(m.spec()).pi_z;
        for psi in traj.states().unwrap() {
            assert!((expectation(&pi_z, psi).unwrap().re - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn csv_columns() {
        let m = model(1.0, 0.8, 0.3, 6);
        let psi0 = StateVector::composite(m.spec(), SpinState::Excited, 0).unwrap();
        let grid = TimeGrid::new(0.0, 1.0, 3).unwrap();
        let curve = compare_models(&m, &psi0, grid, ModelKind::Full, ModelKind::Coupling).unwrap();
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "t,fidelity,photon_number_full,sigma_z_full,photon_number_coupling,sigma_z_coupling"
        );
        assert_eq!(text.lines().count(), 6);
        let same = compare_models(&m, &psi0, grid, ModelKind::Full, ModelKind::Full).unwrap();
        let mut buf = Vec::new();
        same.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .contains("photon_number_full_a"));
    }
}
