//! Truncated Fock space, spin-1/2 operators and the composite spin ⊗ Fock
//! space they act on.
//!
//! Every operator carries a [`Space`] tag so that products between a field
//! operator and a composite one are caught instead of silently multiplying
//! matrices of unrelated bases. Composite indices are spin-major:
//! `index = s·(N_max+1) + n`, `s = 0` for `|e⟩` and `s = 1` for `|g⟩`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Hermiticity threshold used before any spectral exponentiation.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Highest retained Fock index `N_max`; the field space has `N_max + 1` levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpec {
    cutoff: usize,
}

impl FockSpec {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::InvalidCutoff(cutoff));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn field_dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn composite_dim(&self) -> usize {
        2 * (self.cutoff + 1)
    }

    pub fn composite_index(&self, spin: SpinLevel, n: usize) -> usize {
        debug_assert!(n <= self.cutoff);
        spin.index() * self.field_dim() + n
    }

    /// Smallest cutoff satisfying `N_max ≥ |β|² + 8|β| + 20`.
    pub fn required_cutoff(amplitude: f64) -> usize {
        let a = amplitude.abs();
        (a * a + 8.0 * a + 20.0).ceil() as usize
    }

    /// Refuses coherent amplitudes whose Poisson tail would leak past the cutoff.
    pub fn check_guard(&self, amplitude: f64) -> Result<()> {
        let required = Self::required_cutoff(amplitude);
        if !amplitude.is_finite() || self.cutoff < required {
            return Err(Error::CutoffGuard {
                amplitude,
                required,
                cutoff: self.cutoff,
            });
        }
        Ok(())
    }
}

/// Which factor of the composite space an operator or state lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Spin,
    Field(FockSpec),
    Composite(FockSpec),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Spin => 2,
            Space::Field(spec) => spec.field_dim(),
            Space::Composite(spec) => spec.composite_dim(),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Space::Spin => "spin",
            Space::Field(_) => "field",
            Space::Composite(_) => "composite",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.tag(), self.dim())
    }
}

/// Computational spin levels, in basis order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpinLevel {
    Excited,
    Ground,
}

impl SpinLevel {
    pub fn index(self) -> usize {
        match self {
            SpinLevel::Excited => 0,
            SpinLevel::Ground => 1,
        }
    }
}

/// Spin states used as initial conditions: `|e⟩`, `|g⟩` and the σ_x
/// eigenstates `|±⟩ = (|e⟩ ± |g⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpinState {
    Excited,
    Ground,
    Plus,
    Minus,
}

impl SpinState {
    fn amplitudes(self) -> [C64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            SpinState::Excited => [ONE, ZERO],
            SpinState::Ground => [ZERO, ONE],
            SpinState::Plus => [C64::new(h, 0.0), C64::new(h, 0.0)],
            SpinState::Minus => [C64::new(h, 0.0), C64::new(-h, 0.0)],
        }
    }
}

/// Dense square complex matrix tagged with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: Space,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(space: Space, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d} ({space})"),
                found: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(Self { space, matrix })
    }

    pub(crate) fn from_parts(space: Space, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        debug_assert_eq!(matrix.ncols(), space.dim());
        Self { space, matrix }
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self::from_parts(space, DMatrix::identity(d, d))
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self::from_parts(space, DMatrix::zeros(d, d))
    }

    pub fn diagonal(space: Space, entries: impl IntoIterator<Item = C64>) -> Result<Self> {
        let diag: Vec<C64> = entries.into_iter().collect();
        if diag.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} diagonal entries ({space})", space.dim()),
                found: diag.len().to_string(),
            });
        }
        Ok(Self::from_parts(
            space,
            DMatrix::from_diagonal(&DVector::from_vec(diag)),
        ))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.space, self.matrix.adjoint())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_parts(self.space, &self.matrix * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self::from_parts(self.space, self.matrix.map(|z| z * factor))
    }

    /// `self + shift·I`
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.matrix.clone();
        for k in 0..m.nrows() {
            m[(k, k)] += shift;
        }
        Self::from_parts(self.space, m)
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Operator) -> Self {
        &(self * other) + &(other * self)
    }

    /// Chebyshev (max-abs entry) norm.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_same_space(self.space, other.space);
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// Raw matrix-vector product. The result is generally not normalized
    /// (`a|0⟩ = 0`), so it is returned as a plain vector.
    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        if self.space != psi.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.to_string(),
                found: psi.space.to_string(),
            });
        }
        Ok(&self.matrix * &psi.amplitudes)
    }

    /// Propagate a state with a unitary operator.
    pub fn evolve(&self, psi: &StateVector) -> Result<StateVector> {
        let v = self.apply(psi)?;
        Ok(StateVector::from_parts(self.space, v))
    }
}

fn assert_same_space(a: Space, b: Space) {
    assert!(a == b, "operator space mismatch: {a} vs {b}");
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        assert_same_space(self.space, rhs.space);
        Operator::from_parts(self.space, &self.matrix + &rhs.matrix)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        assert_same_space(self.space, rhs.space);
        Operator::from_parts(self.space, &self.matrix - &rhs.matrix)
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        assert_same_space(self.space, rhs.space);
        Operator::from_parts(self.space, &self.matrix * &rhs.matrix)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale_real(rhs)
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

/// Unit-norm complex vector tagged with its space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: Space,
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Normalizes the given amplitudes; zero vectors are rejected.
    pub fn new(space: Space, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} amplitudes ({space})", space.dim()),
                found: amplitudes.len().to_string(),
            });
        }
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            space,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub(crate) fn from_parts(space: Space, amplitudes: DVector<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), space.dim());
        Self { space, amplitudes }
    }

    pub fn basis(space: Space, index: usize) -> Result<Self> {
        let d = space.dim();
        if index >= d {
            return Err(Error::DimensionMismatch {
                expected: format!("index < {d} ({space})"),
                found: index.to_string(),
            });
        }
        let mut v = DVector::zeros(d);
        v[index] = ONE;
        Ok(Self::from_parts(space, v))
    }

    pub fn fock(spec: FockSpec, n: usize) -> Result<Self> {
        Self::basis(Space::Field(spec), n)
    }

    pub fn spin(state: SpinState) -> Self {
        Self::from_parts(Space::Spin, DVector::from_row_slice(&state.amplitudes()))
    }

    /// `|s, n⟩` in the composite space.
    pub fn composite(spec: FockSpec, spin: SpinState, n: usize) -> Result<Self> {
        Self::product(&Self::spin(spin), &Self::fock(spec, n)?)
    }

    /// Tensor product `|spin⟩ ⊗ |field⟩`.
    pub fn product(spin: &StateVector, field: &StateVector) -> Result<Self> {
        let spec = match (spin.space, field.space) {
            (Space::Spin, Space::Field(spec)) => spec,
            (s, f) => {
                return Err(Error::DimensionMismatch {
                    expected: "spin ⊗ field".into(),
                    found: format!("{s} ⊗ {f}"),
                })
            }
        };
        Ok(Self::from_parts(
            Space::Composite(spec),
            spin.amplitudes.kronecker(&field.amplitudes),
        ))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.to_string(),
                found: other.space.to_string(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn with_phase(&self, phi: f64) -> Self {
        Self::from_parts(self.space, &self.amplitudes * C64::from_polar(1.0, phi))
    }
}

/// Annihilation and creation operators on the truncated Fock space.
pub fn fock_ladder(spec: FockSpec) -> (Operator, Operator) {
    let d = spec.field_dim();
    let a = DMatrix::from_fn(d, d, |row, col| {
        if col == row + 1 {
            C64::new((col as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let a = Operator::from_parts(Space::Field(spec), a);
    let a_dagger = a.adjoint();
    (a, a_dagger)
}

/// `a†a = diag(0, 1, …, N_max)`, exact in the truncated space.
pub fn number_operator(spec: FockSpec) -> Operator {
    let d = spec.field_dim();
    Operator::from_parts(
        Space::Field(spec),
        DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                C64::new(r as f64, 0.0)
            } else {
                ZERO
            }
        }),
    )
}

/// Spin-1/2 operators in the `(|e⟩, |g⟩)` basis.
#[derive(Clone, Debug)]
pub struct SpinOps {
    pub sz: Operator,
    pub s_plus: Operator,
    pub s_minus: Operator,
    pub sigma_x: Operator,
    pub sigma_y: Operator,
    pub sigma_z: Operator,
}

impl SpinOps {
    pub fn sx(&self) -> Operator {
        self.sigma_x.scale_real(0.5)
    }

    pub fn sy(&self) -> Operator {
        self.sigma_y.scale_real(0.5)
    }

    /// `σ_+ = σ_x + iσ_y = 2 s_+`
    pub fn sigma_plus(&self) -> Operator {
        &self.sigma_x + &self.sigma_y.scale(I)
    }

    /// `σ_- = σ_x − iσ_y = 2 s_-`
    pub fn sigma_minus(&self) -> Operator {
        &self.sigma_x - &self.sigma_y.scale(I)
    }
}

fn spin_matrix(entries: [[C64; 2]; 2]) -> Operator {
    Operator::from_parts(Space::Spin, DMatrix::from_fn(2, 2, |r, c| entries[r][c]))
}

pub fn spin_ops() -> SpinOps {
    let half = C64::new(0.5, 0.0);
    SpinOps {
        sz: spin_matrix([[half, ZERO], [ZERO, -half]]),
        // s_+|g⟩ = |e⟩
        s_plus: spin_matrix([[ZERO, ONE], [ZERO, ZERO]]),
        s_minus: spin_matrix([[ZERO, ZERO], [ONE, ZERO]]),
        sigma_x: spin_matrix([[ZERO, ONE], [ONE, ZERO]]),
        sigma_y: spin_matrix([[ZERO, -I], [I, ZERO]]),
        sigma_z: spin_matrix([[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// `spin_part ⊗ field_part` with spin-major composite indexing.
pub fn tensor(spin_part: &Operator, field_part: &Operator) -> Result<Operator> {
    let spec = match (spin_part.space, field_part.space) {
        (Space::Spin, Space::Field(spec)) => spec,
        (s, f) => {
            return Err(Error::DimensionMismatch {
                expected: "spin ⊗ field".into(),
                found: format!("{s} ⊗ {f}"),
            })
        }
    };
    Ok(Operator::from_parts(
        Space::Composite(spec),
        spin_part.matrix.kronecker(&field_part.matrix),
    ))
}

/// Lifts a field operator to `I₂ ⊗ A`.
pub fn on_field(field_part: &Operator) -> Result<Operator> {
    tensor(&Operator::identity(Space::Spin), field_part)
}

/// Lifts a spin operator to `A ⊗ I_{N+1}`.
pub fn on_spin(spin_part: &Operator, spec: FockSpec) -> Result<Operator> {
    tensor(spin_part, &Operator::identity(Space::Field(spec)))
}

/// Coherent state `|β⟩` truncated at the cutoff and renormalized.
pub fn coherent_state(beta: C64, spec: FockSpec) -> Result<StateVector> {
    spec.check_guard(beta.norm())?;
    let d = spec.field_dim();
    let mut c = DVector::zeros(d);
    c[0] = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 1..d {
        c[n] = c[n - 1] * beta / (n as f64).sqrt();
    }
    StateVector::new(Space::Field(spec), c)
}

/// Field displacement `D(β) = exp(β a† − β* a)`.
pub fn displacement(beta: C64, spec: FockSpec) -> Result<Operator> {
    spec.check_guard(beta.norm())?;
    let (a, a_dagger) = fock_ladder(spec);
    // D(β) = exp(-i K) with K = i(β a† − β* a) Hermitian.
    let k = (&a_dagger.scale(beta) - &a.scale(beta.conj())).scale(I);
    hermitian_exp(&k, 1.0)
}

/// Eigendecomposition `H = V diag(λ) V†` of a Hermitian operator, with
/// eigenvalues sorted ascending. Reusable for propagators at many times.
#[derive(Clone, Debug)]
pub struct Spectral {
    space: Space,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Spectral {
    pub fn new(h: &Operator) -> Result<Self> {
        let residual = h.hermiticity_residual();
        if residual.is_nan() || residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian(residual));
        }
        let sym = (h.matrix() + h.matrix().adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(sym);
        let d = h.dim();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self {
            space: h.space(),
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    fn phases(&self, tau: f64) -> impl Iterator<Item = C64> + '_ {
        self.eigenvalues
            .iter()
            .map(move |&l| C64::from_polar(1.0, -l * tau))
    }

    /// `e^{-iHτ}`
    pub fn propagator(&self, tau: f64) -> Operator {
        let mut scaled = self.eigenvectors.clone();
        for (mut col, phase) in scaled.column_iter_mut().zip(self.phases(tau)) {
            col *= phase;
        }
        Operator::from_parts(self.space, scaled * self.eigenvectors.adjoint())
    }

    /// `e^{-iHτ}|ψ⟩` without forming the propagator.
    pub fn evolve(&self, psi: &StateVector, tau: f64) -> Result<StateVector> {
        if psi.space() != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.to_string(),
                found: psi.space().to_string(),
            });
        }
        let mut coeffs = self.eigenvectors.adjoint() * psi.amplitudes();
        for (c, phase) in coeffs.iter_mut().zip(self.phases(tau)) {
            *c *= phase;
        }
        Ok(StateVector::from_parts(
            self.space,
            &self.eigenvectors * coeffs,
        ))
    }
}

/// `e^{-iHτ}` by Hermitian eigendecomposition.
pub fn hermitian_exp(h: &Operator, tau: f64) -> Result<Operator> {
    Ok(Spectral::new(h)?.propagator(tau))
}
