//! Truncated Taylor series evolution with oblivious amplitude amplification.
//!
//! Ancilla register above the system (bit 0 is the least significant):
//!
//! ```text
//! [ y0 : K unary qubits ][ y_K ] … [ y_2 ][ y_1 ][ system ]
//! ```
//!
//! Each `y_k` holds a term index `ℓ` on `⌈log₂L⌉` qubits; unary qubit `k`
//! of `y0` sits at `y0.offset + k − 1`. One walk step is `W = P†·S·P`; its
//! `|0⟩` block is `U_K(τ)/N_K`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianModel, TermKind};
use crate::lattice::ceil_log2;
use crate::observables::Trajectory;
use crate::reference::DenseOperator;
use crate::scalar::{c, Complex, Scalar};
use crate::statevector::{i_pow, pauli_into, pauli_masks, shifted_qft_matrix, Block, GateOp, QftDirection, StateVector};

/// Largest register the statevector engine will allocate.
pub const MAX_STATEVECTOR_QUBITS: usize = 30;

/// `Σ_{k≤K} x^k/k!`
pub fn normalization_factor(k_max: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=k_max {
        term *= x / k as f64;
        sum += term;
    }
    sum
}

/// `Σ_{k>K} x^k/k!`, summed directly so small tails keep their digits.
pub fn taylor_tail(k_max: usize, x: f64) -> f64 {
    let mut term = 1.0;
    for k in 1..=k_max {
        term *= x / k as f64;
    }
    let mut sum = 0.0;
    let mut k = k_max + 1;
    loop {
        term *= x / k as f64;
        sum += term;
        if term < 1e-18 * sum.max(1e-300) || k > k_max + 200 {
            return sum;
        }
        k += 1;
    }
}

/// Smallest `K ≥ 1` with `e^{ln2}·(ln2)^{K+1}/(K+1)! < ε/r`, `r = Λx⁺/ln2`.
pub fn truncation_order_for(epsilon: f64, lambda: f64, x_plus: f64) -> Result<usize> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let ln2 = std::f64::consts::LN_2;
    let r = lambda * x_plus / ln2;
    let budget = if r > 0.0 { epsilon / r } else { f64::INFINITY };
    let mut term = ln2; // (ln2)^{K+1}/(K+1)! at K = 0
    for k in 1..200 {
        term *= ln2 / (k + 1) as f64;
        if 2.0 * term < budget {
            return Ok(k);
        }
    }
    Err(Error::Config(format!("no truncation order reaches epsilon {epsilon}")))
}

/// Taylor weights `x^k/k!` with `x = Λτ`, their sum `N_K`, and the `y0`
/// rotation angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorWeights {
    pub k_max: usize,
    pub lambda_tau: f64,
    pub coefficients: Vec<f64>,
    pub n_k: f64,
    /// `θ_k = 2·asin √(1 − w_{k−1}/Σ_{q≥k−1} w_q)` for `k = 1..=K`.
    pub thetas: Vec<f64>,
}

impl TaylorWeights {
    pub fn new(k_max: usize, lambda_tau: f64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::Config("truncation order must be at least 1".into()));
        }
        if !(lambda_tau > 0.0) {
            return Err(Error::Config(format!("Λτ must be positive, got {lambda_tau}")));
        }
        let mut coefficients = vec![1.0];
        for k in 1..=k_max {
            coefficients.push(coefficients[k - 1] * lambda_tau / k as f64);
        }
        let n_k = coefficients.iter().sum();
        let thetas = (1..=k_max)
            .map(|k| {
                let rest: f64 = coefficients[k - 1..].iter().sum();
                let s = (1.0 - coefficients[k - 1] / rest).max(0.0).sqrt();
                2.0 * s.asin()
            })
            .collect();
        Ok(TaylorWeights { k_max, lambda_tau, coefficients, n_k, thetas })
    }

    /// Probability of each unary value `j` after preparation, `w_j/N_K`.
    pub fn unary_probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|w| w / self.n_k).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaLayout {
    pub n_sys: usize,
    pub k_max: usize,
    /// Width of each `y_k` block, `⌈log₂L⌉`.
    pub n_l: usize,
}

impl AncillaLayout {
    pub fn new(n_sys: usize, k_max: usize, n_terms: usize) -> Self {
        AncillaLayout { n_sys, k_max, n_l: ceil_log2(n_terms.max(1)) }
    }

    pub fn y_block(&self, k: usize) -> Block {
        debug_assert!(k >= 1 && k <= self.k_max);
        Block::new(self.n_sys + (k - 1) * self.n_l, self.n_l)
    }

    pub fn y0_block(&self) -> Block {
        Block::new(self.n_sys + self.k_max * self.n_l, self.k_max)
    }

    pub fn unary_qubit(&self, k: usize) -> usize {
        self.y0_block().offset + k - 1
    }

    pub fn n_ancilla(&self) -> usize {
        self.k_max * (self.n_l + 1)
    }

    pub fn n_total(&self) -> usize {
        self.n_sys + self.n_ancilla()
    }

    pub fn ancilla_block(&self) -> Block {
        Block::new(self.n_sys, self.n_ancilla())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtsConfig {
    pub k_max: usize,
    pub steps: usize,
}

/// Unfused `R_y` chain on `y0`: the first rotation is uncontrolled, rotation
/// `k` is controlled on unary qubit `k − 1`.
fn y0_chain<T: Scalar>(offset: usize, thetas: &[f64]) -> Vec<GateOp<T>> {
    thetas
        .iter()
        .enumerate()
        .map(|(i, th)| {
            let ry = GateOp::Ry { qubit: offset + i, theta: T::lit(*th) };
            if i == 0 {
                ry
            } else {
                ry.controlled(vec![(offset + i - 1, true)])
            }
        })
        .collect()
}

/// Unit vector `√(α_ℓ/Σα)` padded to the `y_k` dimension.
fn term_amplitudes<T: Scalar>(weights: &[T], n_l: usize) -> Vec<T> {
    let total: T = weights.iter().copied().sum();
    let mut v = vec![T::zero(); 1 << n_l];
    for (slot, w) in v.iter_mut().zip(weights) {
        *slot = (*w / total).sqrt();
    }
    v
}

/// Preparation `P` as gates: the `y0` rotation chain followed by one
/// amplitude loader per `y_k` block.
pub fn prepare_operator<T: Scalar>(
    weights: &[T],
    taylor: &TaylorWeights,
    layout: &AncillaLayout,
) -> Result<Vec<GateOp<T>>> {
    if weights.is_empty() {
        return Err(Error::Empty("LCU weights"));
    }
    if let Some(w) = weights.iter().find(|w| **w < T::zero()) {
        return Err(Error::NegativeWeight(w.as_f64()));
    }
    if weights.iter().all(|w| *w == T::zero()) {
        return Err(Error::Empty("all LCU weights vanish"));
    }
    let mut ops = y0_chain(layout.y0_block().offset, &taylor.thetas);
    if layout.n_l > 0 {
        let v = term_amplitudes(weights, layout.n_l);
        for k in 1..=layout.k_max {
            ops.push(GateOp::Householder { block: layout.y_block(k), vector: v.clone() });
        }
    }
    Ok(ops)
}

/// Selected unitary of term `ℓ`: `sign·σ`, conjugated by the shifted
/// transform for interaction terms.
fn term_op<T: Scalar>(model: &HamiltonianModel<T>, l: usize) -> Result<GateOp<T>> {
    let (term, kind) = model.term(l).ok_or(Error::IndexOutOfRange { index: l, len: model.len() })?;
    let sign = if term.coeff < T::zero() { -T::one() } else { T::one() };
    let pauli = GateOp::Pauli { block: model.system_block(), string: term.string.clone(), phase: c(sign, T::zero()) };
    Ok(match kind {
        TermKind::Kinetic => pauli,
        TermKind::Interaction if model.qft_blocks.is_empty() => pauli,
        TermKind::Interaction => {
            let qft = |direction| {
                model
                    .qft_blocks
                    .iter()
                    .map(move |b| GateOp::ShiftedQft { block: *b, sites: model.qft_sites, direction })
            };
            let mut seq: Vec<GateOp<T>> = qft(QftDirection::Forward).collect();
            seq.push(pauli);
            seq.extend(qft(QftDirection::Inverse));
            GateOp::Sequence(seq)
        }
    })
}

/// Selection `S` as explicit controlled gates: per slot `k`, an `S†` on
/// unary qubit `k` and, for every `ℓ`, the term unitary controlled on that
/// qubit and on `y_k = ℓ`.
pub fn select_operator<T: Scalar>(model: &HamiltonianModel<T>, layout: &AncillaLayout) -> Result<Vec<GateOp<T>>> {
    let mut ops = Vec::new();
    let minus_i = c(T::zero(), -T::one());
    for k in 1..=layout.k_max {
        let u = layout.unary_qubit(k);
        ops.push(GateOp::Phase { qubit: u, phase: minus_i });
        let y = layout.y_block(k);
        for l in 0..model.len() {
            let mut controls = vec![(u, true)];
            controls.extend((0..y.width).map(|b| (y.offset + b, (l >> b) & 1 == 1)));
            ops.push(term_op(model, l)?.controlled(controls));
        }
    }
    Ok(ops)
}

/// `W = P†·S·P` as one gate sequence.
pub fn walk_operator<T: Scalar>(model: &HamiltonianModel<T>, k_max: usize) -> Result<GateOp<T>> {
    let plan = TtsPlan::new(model, k_max)?;
    let prep = prepare_operator(&model.lcu_weights(), &plan.taylor, &plan.layout)?;
    let mut seq = prep.clone();
    seq.extend(select_operator(model, &plan.layout)?);
    seq.extend(prep.iter().rev().map(|g| g.adjoint()));
    Ok(GateOp::Sequence(seq))
}

#[derive(Clone, Debug)]
struct LocalTerm<T> {
    flip: usize,
    sign: usize,
    phase: Complex<T>,
    interaction: bool,
}

#[derive(Clone, Debug)]
struct LocalQft<T> {
    block: Block,
    forward: Vec<Complex<T>>,
    inverse: Vec<Complex<T>>,
}

/// Precomputed data for applying the walk to a full register.
///
/// The selection is applied chunk by chunk: each run of `2^n_sys`
/// amplitudes shares one ancilla value, so the selected product is known
/// and applied directly, with transforms between consecutive interaction
/// terms fused away.
#[derive(Clone, Debug)]
pub struct TtsPlan<T> {
    pub layout: AncillaLayout,
    pub taylor: TaylorWeights,
    pub tau: T,
    prepare: Vec<GateOp<T>>,
    terms: Vec<LocalTerm<T>>,
    qft: Vec<LocalQft<T>>,
}

impl<T: Scalar> TtsPlan<T> {
    /// Plan with the step fixed by `Λτ = ln 2`.
    pub fn new(model: &HamiltonianModel<T>, k_max: usize) -> Result<Self> {
        if model.is_empty() || model.lambda <= T::zero() {
            return Err(Error::Empty("Hamiltonian has no terms"));
        }
        let ln2 = std::f64::consts::LN_2;
        let taylor = TaylorWeights::new(k_max, ln2)?;
        let layout = AncillaLayout::new(model.n_qubits, k_max, model.len());
        let weights = model.lcu_weights();
        let chain = y0_chain::<T>(0, &taylor.thetas);
        let d0 = 1usize << k_max;
        let mut y0 = vec![Complex::new(T::zero(), T::zero()); d0 * d0];
        for col in 0..d0 {
            let mut sv = StateVector::basis(k_max, k_max, col)?;
            sv.apply_all(&chain)?;
            for (row, a) in sv.amplitudes().iter().enumerate() {
                y0[row * d0 + col] = *a;
            }
        }
        let mut prepare = vec![GateOp::Unitary { block: layout.y0_block(), matrix: y0 }];
        let loaders = prepare_operator(&weights, &taylor, &layout)?;
        prepare.extend(loaders.into_iter().filter(|g| matches!(g, GateOp::Householder { .. })));
        let terms = model
            .terms()
            .map(|(t, kind)| {
                let (flip, sign, ny) = pauli_masks(&t.string);
                let s = if t.coeff < T::zero() { -T::one() } else { T::one() };
                LocalTerm {
                    flip,
                    sign,
                    phase: i_pow::<T>(ny) * s,
                    interaction: kind == TermKind::Interaction && !model.qft_blocks.is_empty(),
                }
            })
            .collect();
        let qft = model
            .qft_blocks
            .iter()
            .map(|b| LocalQft {
                block: *b,
                forward: shifted_qft_matrix(model.qft_sites, b.width, QftDirection::Forward),
                inverse: shifted_qft_matrix(model.qft_sites, b.width, QftDirection::Inverse),
            })
            .collect();
        Ok(TtsPlan { layout, taylor, tau: T::lit(ln2) / model.lambda, prepare, terms, qft })
    }

    pub fn n_total(&self) -> usize {
        self.layout.n_total()
    }

    fn apply_prepare(&self, state: &mut StateVector<T>, adjoint: bool) -> Result<()> {
        if adjoint {
            for g in self.prepare.iter().rev() {
                state.apply(&g.adjoint())?;
            }
            Ok(())
        } else {
            state.apply_all(&self.prepare)
        }
    }

    /// `S` (or `S†`) on the full register.
    pub fn apply_select(&self, state: &mut StateVector<T>, adjoint: bool) -> Result<()> {
        let lay = self.layout;
        if state.n_qubits() != lay.n_total() {
            return Err(Error::WidthMismatch { expected: lay.n_total(), found: state.n_qubits() });
        }
        let n_l = lay.n_l;
        let l_mask = (1usize << n_l) - 1;
        let y0_shift = lay.k_max * n_l;
        let y0_mask = (1usize << lay.k_max) - 1;
        let slot_phase = if adjoint { c(T::zero(), T::one()) } else { c(T::zero(), -T::one()) };
        let d_max = self.qft.iter().map(|q| q.block.dim()).max().unwrap_or(1);
        let sys_dim = 1usize << lay.n_sys;
        let zero = Complex::new(T::zero(), T::zero());
        state.for_each_chunk_with(
            lay.n_sys,
            || (vec![zero; d_max], vec![zero; d_max], vec![zero; sys_dim]),
            |(buf, out, scratch), anc, chunk| {
                let y0 = (anc >> y0_shift) & y0_mask;
                if y0 == 0 || chunk.iter().all(|a| *a == zero) {
                    return;
                }
                let mut phase = c(T::one(), T::zero());
                let mut coordinate = false;
                let mut run = |k: usize| {
                    if (y0 >> (k - 1)) & 1 == 0 {
                        return;
                    }
                    phase = phase * slot_phase;
                    let l = (anc >> ((k - 1) * n_l)) & l_mask;
                    let Some(term) = self.terms.get(l) else { return };
                    if term.interaction != coordinate {
                        let forward = term.interaction;
                        for q in &self.qft {
                            let m = if forward { &q.forward } else { &q.inverse };
                            local_block_matrix(chunk, q.block, m, buf, out);
                        }
                        coordinate = forward;
                    }
                    pauli_into(chunk, scratch, term.flip, term.sign, term.phase);
                    chunk.copy_from_slice(scratch);
                };
                if adjoint {
                    (1..=lay.k_max).rev().for_each(&mut run);
                } else {
                    (1..=lay.k_max).for_each(&mut run);
                }
                if coordinate {
                    for q in &self.qft {
                        local_block_matrix(chunk, q.block, &q.inverse, buf, out);
                    }
                }
                chunk.iter_mut().for_each(|a| *a = *a * phase);
            },
        );
        Ok(())
    }

    /// `W = P†SP`, or `W† = P†S†P`.
    pub fn apply_walk(&self, state: &mut StateVector<T>, adjoint: bool) -> Result<()> {
        self.apply_prepare(state, false)?;
        self.apply_select(state, adjoint)?;
        self.apply_prepare(state, true)
    }

    /// `Q·W = −W R W† R W` with `R = 1 − 2|0⟩⟨0|` on the ancillas, without
    /// the projection.
    pub fn apply_amplified(&self, state: &mut StateVector<T>) -> Result<()> {
        let reflect = GateOp::Reflection { block: self.layout.ancilla_block() };
        self.apply_walk(state, false)?;
        state.apply(&reflect)?;
        self.apply_walk(state, true)?;
        state.apply(&reflect)?;
        self.apply_walk(state, false)?;
        state.apply(&GateOp::GlobalPhase(c(-T::one(), T::zero())))
    }
}

/// `m` on one block of a local `2^n_sys` chunk.
fn local_block_matrix<T: Scalar>(
    chunk: &mut [Complex<T>],
    block: Block,
    m: &[Complex<T>],
    buf: &mut [Complex<T>],
    out: &mut [Complex<T>],
) {
    let d = block.dim();
    let stride = 1usize << block.offset;
    let span = stride * d;
    for base in (0..chunk.len()).step_by(span) {
        for low in 0..stride {
            for (j, b) in buf[..d].iter_mut().enumerate() {
                *b = chunk[base + low + j * stride];
            }
            for (r, o) in out[..d].iter_mut().enumerate() {
                *o = m[r * d..(r + 1) * d]
                    .iter()
                    .zip(&buf[..d])
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + *x * *y);
            }
            for (r, o) in out[..d].iter().enumerate() {
                chunk[base + low + r * stride] = *o;
            }
        }
    }
}

/// One amplified step on a register whose ancillas are `|0⟩`: applies `Q·W`,
/// postselects the ancillas on `|0⟩` and returns the success probability.
pub fn oaa_step<T: Scalar>(state: &mut StateVector<T>, plan: &TtsPlan<T>) -> Result<T> {
    plan.apply_amplified(state)?;
    state.project_and_renormalize(plan.layout.ancilla_block(), 0)
}

fn check_register(plan_qubits: usize) -> Result<()> {
    if plan_qubits > MAX_STATEVECTOR_QUBITS {
        return Err(Error::Config(format!(
            "statevector TTS needs {plan_qubits} qubits, the limit is {MAX_STATEVECTOR_QUBITS}"
        )));
    }
    Ok(())
}

/// `r` amplified steps from a system state, recording the system after each.
pub fn evolve<T: Scalar>(initial: &[Complex<T>], model: &HamiltonianModel<T>, config: &TtsConfig) -> Result<Trajectory<T>> {
    evolve_with(initial, model, config, |_, _| {})
}

/// As [`evolve`], calling `on_step(k, success)` after every step.
pub fn evolve_with<T: Scalar, F: FnMut(usize, T)>(
    initial: &[Complex<T>],
    model: &HamiltonianModel<T>,
    config: &TtsConfig,
    mut on_step: F,
) -> Result<Trajectory<T>> {
    if initial.len() != 1 << model.n_qubits {
        return Err(Error::WidthMismatch { expected: 1 << model.n_qubits, found: initial.len() });
    }
    let plan = TtsPlan::new(model, config.k_max)?;
    let mut traj = Trajectory::new(model.n_qubits);
    traj.record_state(0, T::zero(), initial, None);
    if config.steps == 0 {
        return Ok(traj);
    }
    check_register(plan.n_total())?;
    let mut state = StateVector::zero(plan.n_total(), model.n_qubits);
    state.amplitudes_mut()[..initial.len()].copy_from_slice(initial);
    for k in 1..=config.steps {
        let mass = oaa_step(&mut state, &plan)?;
        traj.record_state(k, plan.tau * T::from_usize_lossy(k), state.system_amplitudes(), Some(mass));
        on_step(k, mass);
    }
    Ok(traj)
}

/// Which system block of the full register to read out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// `⟨0|W|0⟩`
    Walk,
    /// `⟨0|Q·W|0⟩`
    Amplified,
}

/// Dense `⟨0|·|0⟩` block of the walk or the amplified walk, column by column.
pub fn ancilla_zero_block<T: Scalar>(plan: &TtsPlan<T>, kind: BlockKind) -> Result<DenseOperator<T>> {
    check_register(plan.n_total())?;
    let dim = 1usize << plan.layout.n_sys;
    let columns: Vec<Vec<Complex<T>>> = (0..dim)
        .into_par_iter()
        .map(|col| -> Result<Vec<Complex<T>>> {
            let mut sv = StateVector::basis(plan.n_total(), plan.layout.n_sys, col)?;
            match kind {
                BlockKind::Walk => plan.apply_walk(&mut sv, false)?,
                BlockKind::Amplified => plan.apply_amplified(&mut sv)?,
            }
            Ok(sv.system_amplitudes().to_vec())
        })
        .collect::<Result<_>>()?;
    let mut m = DenseOperator::zeros(dim);
    for (col, v) in columns.iter().enumerate() {
        for (row, a) in v.iter().enumerate() {
            m.set(row, col, *a);
        }
    }
    Ok(m)
}
