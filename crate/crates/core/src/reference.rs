//! Dense classical oracles: the explicit Hamiltonian matrix, exact
//! propagation through its eigendecomposition, and the matrix emulation of
//! the amplified Taylor step.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianModel, PauliString, TermKind};
use crate::observables::Trajectory;
use crate::scalar::{c, Complex, Scalar};
use crate::tts::normalization_factor;

/// Largest register the dense emulation accepts (`2¹²` states).
pub const MAX_DENSE_DIM: usize = 1 << 12;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator { dim, data: vec![c(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c(T::one(), T::zero());
        }
        m
    }

    pub fn from_rows(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::WidthMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(DenseOperator { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, col: usize) -> Complex<T> {
        self.data[r * self.dim + col]
    }

    pub fn set(&mut self, r: usize, col: usize, v: Complex<T>) {
        self.data[r * self.dim + col] = v;
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, factor: Complex<T>) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b * factor;
        }
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        DenseOperator { dim: self.dim, data: self.data.iter().map(|a| *a * factor).collect() }
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(c(T::zero(), T::zero()), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise deviation of `A†A` from the identity.
    pub fn unitarity_error(&self) -> T {
        let p = self.adjoint().matmul(self);
        max_abs_diff(&p, &Self::identity(self.dim))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, a| m.max(a.norm()))
    }

    fn to_nalgebra(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            let a = self.get(i, j);
            Complex::new(a.re.as_f64(), a.im.as_f64())
        })
    }

    fn from_nalgebra(m: &DMatrix<Complex<f64>>) -> Self {
        let n = m.nrows();
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = c(T::lit(m[(i, j)].re), T::lit(m[(i, j)].im));
            }
        }
        out
    }

    /// Spectral norm via the eigenvalues of `A†A`.
    pub fn spectral_norm(&self) -> f64 {
        let m = self.to_nalgebra();
        let g = m.adjoint() * &m;
        SymmetricEigen::new(g).eigenvalues.iter().fold(0.0f64, |a, b| a.max(*b)).sqrt()
    }
}

pub fn max_abs_diff<T: Scalar>(a: &DenseOperator<T>, b: &DenseOperator<T>) -> T {
    a.data.iter().zip(&b.data).fold(T::zero(), |m, (x, y)| m.max((*x - *y).norm()))
}

fn kron<T: Scalar>(a: &DenseOperator<T>, b: &DenseOperator<T>) -> DenseOperator<T> {
    let (n, m) = (a.dim, b.dim);
    let mut out = DenseOperator::zeros(n * m);
    for i in 0..n {
        for j in 0..n {
            let x = a.get(i, j);
            for k in 0..m {
                for l in 0..m {
                    out.set(i * m + k, j * m + l, x * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Dense matrix of a Pauli string; the first character is the most
/// significant qubit.
pub fn pauli_matrix<T: Scalar>(string: &PauliString) -> DenseOperator<T> {
    let (o, z) = (T::one(), T::zero());
    string.chars().fold(DenseOperator::identity(1), |acc, ch| {
        let f = match ch {
            'I' => [c(o, z), c(z, z), c(z, z), c(o, z)],
            'X' => [c(z, z), c(o, z), c(o, z), c(z, z)],
            'Y' => [c(z, z), c(z, -o), c(z, o), c(z, z)],
            _ => [c(o, z), c(z, z), c(z, z), c(-o, z)],
        };
        kron(&acc, &DenseOperator { dim: 2, data: f.to_vec() })
    })
}

/// Transform from momentum to coordinate codes on every QFT block of the
/// model, identity elsewhere. Entries `exp(+2πi·q·n/s)/√s` per block.
pub fn fourier_matrix<T: Scalar>(model: &HamiltonianModel<T>) -> DenseOperator<T> {
    let n_q = model.n_qubits;
    let dim = 1usize << n_q;
    let s = model.qft_sites as i64;
    let half = s / 2;
    let other_mask = !model.qft_blocks.iter().fold(0usize, |m, b| m | b.mask()) & (dim - 1);
    let mut f = DenseOperator::zeros(dim);
    for row in 0..dim {
        for col in 0..dim {
            if row & other_mask != col & other_mask {
                continue;
            }
            let mut v = c(T::one(), T::zero());
            for b in &model.qft_blocks {
                let (rn, cq) = (b.extract(row) as i64, b.extract(col) as i64);
                let factor = if rn < s && cq < s {
                    let (n, q) = (rn - half, cq - half);
                    let angle = 2.0 * std::f64::consts::PI * (q * n) as f64 / s as f64;
                    let norm = 1.0 / (s as f64).sqrt();
                    c(T::lit(angle.cos() * norm), T::lit(angle.sin() * norm))
                } else if rn == cq {
                    c(T::one(), T::zero())
                } else {
                    c(T::zero(), T::zero())
                };
                v = v * factor;
            }
            f.set(row, col, v);
        }
    }
    f
}

/// `H = Σ κ σ_kin + F†(Σ κ σ_int)F`.
pub fn dense_hamiltonian<T: Scalar>(model: &HamiltonianModel<T>) -> DenseOperator<T> {
    let dim = 1usize << model.n_qubits;
    let mut kin = DenseOperator::zeros(dim);
    let mut int = DenseOperator::zeros(dim);
    for (t, kind) in model.terms() {
        let target = match kind {
            TermKind::Kinetic => &mut kin,
            TermKind::Interaction => &mut int,
        };
        target.add_scaled(&pauli_matrix(&t.string), c(t.coeff, T::zero()));
    }
    if model.interaction_terms.is_empty() {
        return kin;
    }
    let f = fourier_matrix(model);
    let conj = f.adjoint().matmul(&int).matmul(&f);
    kin.add_scaled(&conj, c(T::one(), T::zero()));
    kin
}

/// Cached eigendecomposition `H = V·diag(E)·V†` for repeated propagation.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    eigenvalues: DVector<f64>,
    vectors: DMatrix<Complex<f64>>,
}

impl SpectralPropagator {
    pub fn new<T: Scalar>(h: &DenseOperator<T>) -> Result<Self> {
        let herm = h.hermiticity_error().as_f64();
        let scale = h.max_abs().as_f64().max(1.0);
        let tol = if std::mem::size_of::<T>() == 4 { 1e-5 } else { 1e-12 };
        if herm > tol * scale {
            return Err(Error::NotHermitian(herm));
        }
        let eig = SymmetricEigen::new(h.to_nalgebra());
        Ok(SpectralPropagator { eigenvalues: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.as_slice()
    }

    /// `e^{−iHt}`
    pub fn unitary<T: Scalar>(&self, t: f64) -> DenseOperator<T> {
        let phases = DMatrix::from_diagonal(&self.eigenvalues.map(|e| Complex::from_polar(1.0, -e * t)));
        DenseOperator::from_nalgebra(&(&self.vectors * phases * self.vectors.adjoint()))
    }

    pub fn evolve<T: Scalar>(&self, state: &[Complex<T>], t: f64) -> Vec<Complex<T>> {
        let v = DVector::from_iterator(state.len(), state.iter().map(|a| Complex::new(a.re.as_f64(), a.im.as_f64())));
        let mut coeffs = self.vectors.adjoint() * v;
        for (k, e) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *k *= Complex::from_polar(1.0, -e * t);
        }
        (&self.vectors * coeffs).iter().map(|z| c(T::lit(z.re), T::lit(z.im))).collect()
    }
}

pub fn exact_unitary<T: Scalar>(h: &DenseOperator<T>, t: f64) -> Result<DenseOperator<T>> {
    Ok(SpectralPropagator::new(h)?.unitary(t))
}

pub fn exact_evolve<T: Scalar>(state: &[Complex<T>], h: &DenseOperator<T>, t: f64) -> Result<Vec<Complex<T>>> {
    if state.len() != h.dim() {
        return Err(Error::WidthMismatch { expected: h.dim(), found: state.len() });
    }
    Ok(SpectralPropagator::new(h)?.evolve(state, t))
}

/// Exact states at `x⁺ = k·τ` for `k = 0..=steps`.
pub fn exact_trajectory<T: Scalar>(
    initial: &[Complex<T>],
    model: &HamiltonianModel<T>,
    tau: f64,
    steps: usize,
) -> Result<Trajectory<T>> {
    check_dense(model)?;
    let prop = SpectralPropagator::new(&dense_hamiltonian(model))?;
    let mut traj = Trajectory::new(model.n_qubits);
    for k in 0..=steps {
        let t = k as f64 * tau;
        let psi = if k == 0 { initial.to_vec() } else { prop.evolve(initial, t) };
        traj.record_state(k, T::lit(t), &psi, None);
    }
    Ok(traj)
}

/// `U_K(τ) = Σ_{k≤K} (−iτH)^k / k!`
pub fn taylor_polynomial<T: Scalar>(h: &DenseOperator<T>, tau: T, k_max: usize) -> DenseOperator<T> {
    let n = h.dim();
    let step = h.scaled(c(T::zero(), -tau));
    let mut term = DenseOperator::identity(n);
    let mut sum = DenseOperator::identity(n);
    for k in 1..=k_max {
        term = term.matmul(&step).scaled(c(T::one() / T::from_usize_lossy(k), T::zero()));
        sum.add_scaled(&term, c(T::one(), T::zero()));
    }
    sum
}

/// How the amplified step is emulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OaaAlgebra {
    /// `3A − 4AA†A` with `A = U_K/N_K`: what one round of amplification does
    /// to a block encoding of a non-unitary `A`.
    #[default]
    Exact,
    /// `(3/N_K − 4/N_K³)·U_K`, which assumes `U_K` unitary.
    Idealized,
}

/// Dense operator of one amplified Taylor step before renormalization,
/// `Π Q W Π` restricted to the system for the given algebra.
pub fn amplified_step<T: Scalar>(
    h: &DenseOperator<T>,
    tau: T,
    k_max: usize,
    n_k: T,
    algebra: OaaAlgebra,
) -> DenseOperator<T> {
    let u = taylor_polynomial(h, tau, k_max);
    let one = T::one();
    match algebra {
        OaaAlgebra::Exact => {
            let a = u.scaled(c(one / n_k, T::zero()));
            let aada = a.matmul(&a.adjoint()).matmul(&a);
            let mut out = a.scaled(c(T::lit(3.0), T::zero()));
            out.add_scaled(&aada, c(T::lit(-4.0), T::zero()));
            out
        }
        OaaAlgebra::Idealized => {
            let g = T::lit(3.0) / n_k - T::lit(4.0) / (n_k * n_k * n_k);
            u.scaled(c(g, T::zero()))
        }
    }
}

/// Classical emulation of `r` amplified Taylor steps with `τ = ln2/Λ`; the
/// recorded success probability is the squared norm before renormalization.
pub fn tts_matrix_emulation<T: Scalar>(
    initial: &[Complex<T>],
    model: &HamiltonianModel<T>,
    k_max: usize,
    steps: usize,
    algebra: OaaAlgebra,
) -> Result<Trajectory<T>> {
    check_dense(model)?;
    if model.lambda <= T::zero() {
        return Err(Error::Empty("Hamiltonian has zero norm"));
    }
    let ln2 = std::f64::consts::LN_2;
    let tau = T::lit(ln2) / model.lambda;
    let n_k = T::lit(normalization_factor(k_max, ln2));
    let h = dense_hamiltonian(model);
    let m = amplified_step(&h, tau, k_max, n_k, algebra);
    let mut traj = Trajectory::new(model.n_qubits);
    let mut psi = initial.to_vec();
    traj.record_state(0, T::zero(), &psi, None);
    for k in 1..=steps {
        let next = m.apply(&psi);
        let mass: T = next.iter().map(|a| a.norm_sqr()).sum();
        if mass.as_f64() <= crate::statevector::PROJECTION_FLOOR {
            return Err(Error::ProjectionImpossible(mass.as_f64()));
        }
        let inv = T::one() / mass.sqrt();
        psi = next.into_iter().map(|a| a * inv).collect();
        traj.record_state(k, tau * T::from_usize_lossy(k), &psi, Some(mass));
    }
    Ok(traj)
}

fn check_dense<T: Scalar>(model: &HamiltonianModel<T>) -> Result<()> {
    if (1usize << model.n_qubits) > MAX_DENSE_DIM {
        return Err(Error::Config(format!(
            "dense engines are limited to {MAX_DENSE_DIM} basis states, model has 2^{}",
            model.n_qubits
        )));
    }
    Ok(())
}
