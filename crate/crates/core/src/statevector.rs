//! Dense statevector simulator.
//!
//! Qubit 0 is the least significant bit of an amplitude index. A [`Block`] is a
//! contiguous run of qubits; within a block the rendered bitstring is
//! most-significant first, so character `i` of a Pauli string acting on a
//! block of width `w` targets qubit `offset + w - 1 - i`.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::PauliString;
use crate::lattice::{ceil_log2, BasisLabel, EncodingLayout};
use crate::scalar::{c, re, Complex, Scalar};

/// Postselection below this probability mass is treated as impossible.
pub const PROJECTION_FLOOR: f64 = 1e-12;

/// Blocks at or above this qubit offset are processed in row tiles.
const TILE_BITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub offset: usize,
    pub width: usize,
}

impl Block {
    pub const fn new(offset: usize, width: usize) -> Self {
        Block { offset, width }
    }

    pub fn dim(&self) -> usize {
        1 << self.width
    }

    pub fn end(&self) -> usize {
        self.offset + self.width
    }

    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.offset
    }

    pub fn extract(&self, index: usize) -> usize {
        (index >> self.offset) & ((1usize << self.width) - 1)
    }

    pub fn insert(&self, index: usize, value: usize) -> usize {
        (index & !self.mask()) | ((value << self.offset) & self.mask())
    }

    /// Qubit addressed by rendered position `i` (0 = most significant).
    pub fn qubit(&self, i: usize) -> usize {
        self.offset + self.width - 1 - i
    }

    pub fn overlaps(&self, other: &Block) -> bool {
        self.mask() & other.mask() != 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QftDirection {
    /// Momentum codes to coordinate codes.
    Forward,
    Inverse,
}

impl QftDirection {
    pub fn reverse(self) -> Self {
        match self {
            QftDirection::Forward => QftDirection::Inverse,
            QftDirection::Inverse => QftDirection::Forward,
        }
    }
}

/// Matrix of the shifted transform over `sites` lattice sites on a register
/// of `1 << width` codes (row-major, `m[row * dim + col]`).
///
/// Forward entries are `exp(+2πi·q·n/sites)/√sites` with `n = row − sites/2`
/// and `q = col − sites/2`; codes at or above `sites` are left untouched.
pub fn shifted_qft_matrix<T: Scalar>(sites: usize, width: usize, direction: QftDirection) -> Vec<Complex<T>> {
    let dim = 1usize << width;
    let half = (sites / 2) as i64;
    let s = sites as i64;
    let norm = T::one() / T::from_usize_lossy(sites).sqrt();
    let sign = match direction {
        QftDirection::Forward => T::one(),
        QftDirection::Inverse => -T::one(),
    };
    let mut m = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    for row in 0..dim {
        for col in 0..dim {
            m[row * dim + col] = if row < sites && col < sites {
                let n = row as i64 - half;
                let q = col as i64 - half;
                let k = (q * n).rem_euclid(s);
                let angle = sign * T::TAU() * T::lit(k as f64) / T::lit(s as f64);
                c(angle.cos() * norm, angle.sin() * norm)
            } else if row == col {
                re(T::one())
            } else {
                re(T::zero())
            };
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateOp<T> {
    /// `phase · σ` for a Pauli string on the block.
    Pauli { block: Block, string: PauliString, phase: Complex<T> },
    /// `exp(−iθσ)`
    PauliRotation { block: Block, string: PauliString, theta: T },
    /// `diag(1, phase)` on one qubit; `phase = −i` is S†.
    Phase { qubit: usize, phase: Complex<T> },
    Ry { qubit: usize, theta: T },
    /// Real Householder reflection sending `|0⟩` to `vector` (unit norm).
    Householder { block: Block, vector: Vec<T> },
    /// Dense block unitary, row-major.
    Unitary { block: Block, matrix: Vec<Complex<T>> },
    ShiftedQft { block: Block, sites: usize, direction: QftDirection },
    /// `1 − 2|0⟩⟨0|` on the block.
    Reflection { block: Block },
    GlobalPhase(Complex<T>),
    /// Applies `op` where every `(qubit, value)` control matches.
    Controlled { controls: Vec<(usize, bool)>, op: Box<GateOp<T>> },
    Sequence(Vec<GateOp<T>>),
}

impl<T: Scalar> GateOp<T> {
    /// Bit mask of the qubits acted on (controls included).
    pub fn support(&self) -> usize {
        match self {
            GateOp::Pauli { block, .. }
            | GateOp::PauliRotation { block, .. }
            | GateOp::Householder { block, .. }
            | GateOp::Unitary { block, .. }
            | GateOp::ShiftedQft { block, .. }
            | GateOp::Reflection { block } => block.mask(),
            GateOp::Phase { qubit, .. } | GateOp::Ry { qubit, .. } => 1 << qubit,
            GateOp::GlobalPhase(_) => 0,
            GateOp::Controlled { controls, op } => {
                controls.iter().fold(op.support(), |m, (q, _)| m | (1 << q))
            }
            GateOp::Sequence(ops) => ops.iter().fold(0, |m, op| m | op.support()),
        }
    }

    pub fn adjoint(&self) -> GateOp<T> {
        match self {
            GateOp::Pauli { block, string, phase } => {
                GateOp::Pauli { block: *block, string: string.clone(), phase: phase.conj() }
            }
            GateOp::PauliRotation { block, string, theta } => {
                GateOp::PauliRotation { block: *block, string: string.clone(), theta: -*theta }
            }
            GateOp::Phase { qubit, phase } => GateOp::Phase { qubit: *qubit, phase: phase.conj() },
            GateOp::Ry { qubit, theta } => GateOp::Ry { qubit: *qubit, theta: -*theta },
            GateOp::Householder { .. } | GateOp::Reflection { .. } => self.clone(),
            GateOp::Unitary { block, matrix } => {
                let d = block.dim();
                let mut adj = matrix.clone();
                for r in 0..d {
                    for col in 0..d {
                        adj[r * d + col] = matrix[col * d + r].conj();
                    }
                }
                GateOp::Unitary { block: *block, matrix: adj }
            }
            GateOp::ShiftedQft { block, sites, direction } => {
                GateOp::ShiftedQft { block: *block, sites: *sites, direction: direction.reverse() }
            }
            GateOp::GlobalPhase(p) => GateOp::GlobalPhase(p.conj()),
            GateOp::Controlled { controls, op } => {
                GateOp::Controlled { controls: controls.clone(), op: Box::new(op.adjoint()) }
            }
            GateOp::Sequence(ops) => GateOp::Sequence(ops.iter().rev().map(|op| op.adjoint()).collect()),
        }
    }

    pub fn controlled(self, controls: Vec<(usize, bool)>) -> GateOp<T> {
        GateOp::Controlled { controls, op: Box::new(self) }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Ctrl {
    mask: usize,
    value: usize,
}

impl Ctrl {
    fn matches(&self, index: usize) -> bool {
        index & self.mask == self.value
    }
}

/// Flip mask, sign mask and the count of `Y` factors of a string placed on a
/// block; `σ|x⟩ = i^ny·(−1)^{popcount(x & sign)}·|x ⊕ flip⟩` in block-local bits.
pub(crate) fn pauli_masks(string: &PauliString) -> (usize, usize, u32) {
    let w = string.width();
    let mut flip = 0;
    let mut sign = 0;
    let mut ny = 0;
    for (i, ch) in string.chars().enumerate() {
        let bit = 1 << (w - 1 - i);
        match ch {
            'X' => flip |= bit,
            'Y' => {
                flip |= bit;
                sign |= bit;
                ny += 1;
            }
            'Z' => sign |= bit,
            _ => {}
        }
    }
    (flip, sign, ny)
}

pub(crate) fn i_pow<T: Scalar>(k: u32) -> Complex<T> {
    let (one, zero) = (T::one(), T::zero());
    match k % 4 {
        0 => c(one, zero),
        1 => c(zero, one),
        2 => c(-one, zero),
        _ => c(zero, -one),
    }
}

/// `out = phase·σ·input` over a block-local buffer.
#[inline]
pub(crate) fn pauli_into<T: Scalar>(
    input: &[Complex<T>],
    out: &mut [Complex<T>],
    flip: usize,
    sign: usize,
    phase: Complex<T>,
) {
    for (x, a) in input.iter().enumerate() {
        let v = *a * phase;
        out[x ^ flip] = if (x & sign).count_ones() & 1 == 1 { -v } else { v };
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
    n_qubits: usize,
    system: Block,
}

impl<T: Scalar> StateVector<T> {
    /// `|0…0⟩` on `n_qubits` qubits, the low `n_system` forming the system block.
    pub fn zero(n_qubits: usize, n_system: usize) -> Self {
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amplitudes[0] = re(T::one());
        StateVector { amplitudes, n_qubits, system: Block::new(0, n_system.min(n_qubits)) }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>, n_system: usize) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_system > n_qubits {
            return Err(Error::WidthMismatch { expected: n_qubits, found: n_system });
        }
        Ok(StateVector { amplitudes, n_qubits, system: Block::new(0, n_system) })
    }

    pub fn basis(n_qubits: usize, n_system: usize, index: usize) -> Result<Self> {
        if index >= 1 << n_qubits {
            return Err(Error::IndexOutOfRange { index, len: 1 << n_qubits });
        }
        let mut s = Self::zero(n_qubits, n_system);
        s.amplitudes[0] = re(T::zero());
        s.amplitudes[index] = re(T::one());
        Ok(s)
    }

    /// Copies the system amplitudes into a register with `n_ancilla` extra
    /// qubits above the system, all ancillas in `|0⟩`.
    pub fn with_ancillas(&self, n_ancilla: usize) -> Self {
        let n_qubits = self.system.width + n_ancilla;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amplitudes[..self.system.dim()].copy_from_slice(&self.amplitudes[..self.system.dim()]);
        StateVector { amplitudes, n_qubits, system: self.system }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn system_block(&self) -> Block {
        self.system
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    /// System amplitudes on the all-zero ancilla subspace.
    pub fn system_amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes[..self.system.dim()]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.par_iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.len() != other.len() {
            return Err(Error::WidthMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn scale(&mut self, factor: Complex<T>) {
        self.amplitudes.par_iter_mut().for_each(|a| *a = *a * factor);
    }

    fn check_block(&self, block: &Block) -> Result<()> {
        if block.end() > self.n_qubits {
            return Err(Error::IndexOutOfRange { index: block.end() - 1, len: self.n_qubits });
        }
        Ok(())
    }

    /// Runs `f(buffer, scratch)` on every gathered block vector whose
    /// surrounding index satisfies the controls.
    fn for_each_block<F>(&mut self, block: Block, ctrl: Ctrl, f: F)
    where
        F: Fn(&mut [Complex<T>], &mut [Complex<T>]) + Sync + Send,
    {
        let d = block.dim();
        let stride = 1usize << block.offset;
        let chunk = stride * d;
        let zero = Complex::new(T::zero(), T::zero());
        self.amplitudes
            .par_chunks_mut(chunk)
            .enumerate()
            .with_min_len((1 << 12) / chunk.min(1 << 12))
            .for_each_init(
                || (vec![zero; d], vec![zero; d]),
                |(buf, scratch), (ci, slice)| {
                    let base = ci * chunk;
                    for low in 0..stride {
                        if !ctrl.matches(base + low) {
                            continue;
                        }
                        for (j, b) in buf.iter_mut().enumerate() {
                            *b = slice[low + j * stride];
                        }
                        f(buf, scratch);
                        for (j, b) in buf.iter().enumerate() {
                            slice[low + j * stride] = *b;
                        }
                    }
                },
            );
    }

    /// Tiled variant for blocks above the low `TILE_BITS` qubits without
    /// controls: `f(rows, tile, scratch)` sees `d` rows of `tile` contiguous
    /// amplitudes, row `j` holding block code `j`.
    fn for_each_block_tiled<F>(&mut self, block: Block, f: F)
    where
        F: Fn(&mut [Complex<T>], usize, &mut [Complex<T>]) + Sync + Send,
    {
        let d = block.dim();
        let stride = 1usize << block.offset;
        let tile = stride.min(1 << TILE_BITS);
        let zero = Complex::new(T::zero(), T::zero());
        self.amplitudes.par_chunks_mut(stride * d).for_each_init(
            || (vec![zero; d * tile], vec![zero; d * tile]),
            |(rows, scratch), slice| {
                for low in (0..stride).step_by(tile) {
                    for j in 0..d {
                        rows[j * tile..(j + 1) * tile].copy_from_slice(&slice[j * stride + low..j * stride + low + tile]);
                    }
                    f(rows, tile, scratch);
                    for j in 0..d {
                        slice[j * stride + low..j * stride + low + tile].copy_from_slice(&rows[j * tile..(j + 1) * tile]);
                    }
                }
            },
        );
    }

    /// Runs `f(state, chunk_index, chunk)` over contiguous chunks of
    /// `1 << width` amplitudes; `init` builds per-task scratch state.
    pub fn for_each_chunk_with<S, I, F>(&mut self, width: usize, init: I, f: F)
    where
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, usize, &mut [Complex<T>]) + Sync + Send,
    {
        let chunk = 1usize << width;
        self.amplitudes
            .par_chunks_mut(chunk)
            .enumerate()
            .with_min_len((1 << 12) / chunk.min(1 << 12))
            .for_each_init(init, |s, (ci, slice)| f(s, ci, slice));
    }

    /// Applies `f(index, amplitude)` to every amplitude passing the controls.
    fn for_each_amplitude<F>(&mut self, ctrl: Ctrl, f: F)
    where
        F: Fn(usize, &mut Complex<T>) + Sync + Send,
    {
        self.amplitudes.par_iter_mut().enumerate().with_min_len(1 << 12).for_each(|(i, a)| {
            if ctrl.matches(i) {
                f(i, a)
            }
        });
    }

    pub fn apply(&mut self, op: &GateOp<T>) -> Result<()> {
        self.apply_ctrl(op, Ctrl::default())
    }

    pub fn apply_all(&mut self, ops: &[GateOp<T>]) -> Result<()> {
        ops.iter().try_for_each(|op| self.apply(op))
    }

    fn apply_ctrl(&mut self, op: &GateOp<T>, ctrl: Ctrl) -> Result<()> {
        match op {
            GateOp::Pauli { block, string, phase } => {
                self.check_block(block)?;
                if string.width() != block.width {
                    return Err(Error::WidthMismatch { expected: block.width, found: string.width() });
                }
                let (flip, sign, ny) = pauli_masks(string);
                let phase = *phase * i_pow::<T>(ny);
                self.for_each_block(*block, ctrl, move |buf, scratch| {
                    pauli_into(buf, scratch, flip, sign, phase);
                    buf.copy_from_slice(scratch);
                });
            }
            GateOp::PauliRotation { block, string, theta } => {
                self.check_block(block)?;
                if string.width() != block.width {
                    return Err(Error::WidthMismatch { expected: block.width, found: string.width() });
                }
                let (flip, sign, ny) = pauli_masks(string);
                // −i·sinθ·σ folded into the Pauli phase
                let phase = i_pow::<T>(ny) * c(T::zero(), -theta.sin());
                let cos = theta.cos();
                self.for_each_block(*block, ctrl, move |buf, scratch| {
                    pauli_into(buf, scratch, flip, sign, phase);
                    for (b, s) in buf.iter_mut().zip(scratch.iter()) {
                        *b = *b * cos + *s;
                    }
                });
            }
            GateOp::Phase { qubit, phase } => {
                let block = Block::new(*qubit, 1);
                self.check_block(&block)?;
                let phase = *phase;
                self.for_each_block(block, ctrl, move |buf, _| buf[1] = buf[1] * phase);
            }
            GateOp::Ry { qubit, theta } => {
                let block = Block::new(*qubit, 1);
                self.check_block(&block)?;
                let half = *theta / T::lit(2.0);
                let (s, co) = (half.sin(), half.cos());
                self.for_each_block(block, ctrl, move |buf, _| {
                    let (a0, a1) = (buf[0], buf[1]);
                    buf[0] = a0 * co - a1 * s;
                    buf[1] = a0 * s + a1 * co;
                });
            }
            GateOp::Householder { block, vector } => {
                self.check_block(block)?;
                if vector.len() != block.dim() {
                    return Err(Error::WidthMismatch { expected: block.dim(), found: vector.len() });
                }
                let mut u: Vec<T> = vector.iter().map(|v| -*v).collect();
                u[0] += T::one();
                let nrm = u.iter().map(|x| *x * *x).sum::<T>().sqrt();
                if nrm <= T::epsilon() {
                    return Ok(());
                }
                u.iter_mut().for_each(|x| *x /= nrm);
                let two = T::lit(2.0);
                if ctrl.mask == 0 && block.offset >= TILE_BITS {
                    let d = block.dim();
                    self.for_each_block_tiled(*block, move |rows, tile, scratch| {
                        if rows.iter().all(|x| x.re == T::zero() && x.im == T::zero()) {
                            return;
                        }
                        let dot = &mut scratch[..tile];
                        dot.iter_mut().for_each(|x| *x = Complex::new(T::zero(), T::zero()));
                        for (j, uj) in u.iter().enumerate() {
                            for (x, r) in dot.iter_mut().zip(&rows[j * tile..(j + 1) * tile]) {
                                *x += *r * *uj;
                            }
                        }
                        for j in 0..d {
                            let f = u[j] * two;
                            for (r, x) in rows[j * tile..(j + 1) * tile].iter_mut().zip(dot.iter()) {
                                *r -= *x * f;
                            }
                        }
                    });
                    return Ok(());
                }
                self.for_each_block(*block, ctrl, move |buf, _| {
                    let dot = u
                        .iter()
                        .zip(buf.iter())
                        .fold(Complex::new(T::zero(), T::zero()), |acc, (u, b)| acc + *b * *u);
                    let dot = dot * two;
                    for (b, u) in buf.iter_mut().zip(u.iter()) {
                        *b = *b - dot * *u;
                    }
                });
            }
            GateOp::Unitary { block, matrix } => {
                self.check_block(block)?;
                let d = block.dim();
                if matrix.len() != d * d {
                    return Err(Error::WidthMismatch { expected: d * d, found: matrix.len() });
                }
                self.apply_matrix(*block, matrix, ctrl);
            }
            GateOp::ShiftedQft { block, sites, direction } => {
                self.check_block(block)?;
                if *sites < 2 || sites % 2 != 0 || ceil_log2(*sites) != block.width {
                    return Err(Error::WidthMismatch { expected: ceil_log2(*sites), found: block.width });
                }
                let m = shifted_qft_matrix::<T>(*sites, block.width, *direction);
                self.apply_matrix(*block, &m, ctrl);
            }
            GateOp::Reflection { block } => {
                self.check_block(block)?;
                let mask = block.mask();
                self.for_each_amplitude(ctrl, move |i, a| {
                    if i & mask == 0 {
                        *a = -*a;
                    }
                });
            }
            GateOp::GlobalPhase(phase) => {
                let phase = *phase;
                self.for_each_amplitude(ctrl, move |_, a| *a = *a * phase);
            }
            GateOp::Controlled { controls, op } => {
                let support = op.support();
                let mut next = ctrl;
                for &(q, v) in controls {
                    if q >= self.n_qubits {
                        return Err(Error::IndexOutOfRange { index: q, len: self.n_qubits });
                    }
                    let bit = 1 << q;
                    if support & bit != 0 || next.mask & bit != 0 {
                        return Err(Error::InvalidGate(format!("control qubit {q} overlaps the gate")));
                    }
                    next.mask |= bit;
                    if v {
                        next.value |= bit;
                    }
                }
                self.apply_ctrl(op, next)?;
            }
            GateOp::Sequence(ops) => {
                for op in ops {
                    self.apply_ctrl(op, ctrl)?;
                }
            }
        }
        Ok(())
    }

    fn apply_matrix(&mut self, block: Block, matrix: &[Complex<T>], ctrl: Ctrl) {
        let d = block.dim();
        if ctrl.mask == 0 && block.offset >= TILE_BITS {
            let real = matrix.iter().all(|m| m.im == T::zero());
            self.for_each_block_tiled(block, move |rows, tile, scratch| {
                if rows.iter().all(|x| x.re == T::zero() && x.im == T::zero()) {
                    return;
                }
                for r in 0..d {
                    let out = &mut scratch[r * tile..(r + 1) * tile];
                    out.iter_mut().for_each(|x| *x = Complex::new(T::zero(), T::zero()));
                    for (j, m) in matrix[r * d..(r + 1) * d].iter().enumerate() {
                        if m.re == T::zero() && m.im == T::zero() {
                            continue;
                        }
                        let src = &rows[j * tile..(j + 1) * tile];
                        if real {
                            for (o, x) in out.iter_mut().zip(src) {
                                *o += *x * m.re;
                            }
                        } else {
                            for (o, x) in out.iter_mut().zip(src) {
                                *o += *x * *m;
                            }
                        }
                    }
                }
                rows.copy_from_slice(scratch);
            });
            return;
        }
        self.for_each_block(block, ctrl, move |buf, scratch| {
            for (r, s) in scratch.iter_mut().enumerate() {
                let row = &matrix[r * d..(r + 1) * d];
                *s = row
                    .iter()
                    .zip(buf.iter())
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (m, b)| acc + *m * *b);
            }
            buf.copy_from_slice(scratch);
        });
    }

    pub fn apply_pauli_string(&mut self, block: Block, string: &PauliString, phase: Complex<T>) -> Result<()> {
        self.apply(&GateOp::Pauli { block, string: string.clone(), phase })
    }

    pub fn apply_controlled(&mut self, controls: &[(usize, bool)], op: &GateOp<T>) -> Result<()> {
        self.apply(&GateOp::Controlled { controls: controls.to_vec(), op: Box::new(op.clone()) })
    }

    pub fn apply_shifted_qft(&mut self, block: Block, sites: usize, direction: QftDirection) -> Result<()> {
        self.apply(&GateOp::ShiftedQft { block, sites, direction })
    }

    /// Marginal distribution of a block, indexed by block code.
    pub fn block_probabilities(&self, block: Block) -> Result<Vec<T>> {
        self.check_block(&block)?;
        let mut p = vec![T::zero(); block.dim()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            p[block.extract(i)] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Draws `shots` multinomial samples of the block marginal. Keys are the
    /// block bitstrings, most significant bit first.
    pub fn measure_block<R: Rng + ?Sized>(
        &self,
        block: Block,
        shots: u64,
        rng: &mut R,
    ) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        let p: Vec<f64> = self.block_probabilities(block)?.into_iter().map(|x| x.as_f64()).collect();
        let counts = multinomial(shots, &p, rng)?;
        Ok(counts
            .into_iter()
            .enumerate()
            .filter(|(_, n)| *n > 0)
            .map(|(code, n)| (render_bits(code, block.width), n))
            .collect())
    }

    /// Zeroes every amplitude whose block code differs from `required`,
    /// renormalizes, and returns the probability mass that was kept.
    pub fn project_and_renormalize(&mut self, block: Block, required: usize) -> Result<T> {
        self.check_block(&block)?;
        let mass: T = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| block.extract(*i) == required)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if mass.as_f64() <= PROJECTION_FLOOR {
            return Err(Error::ProjectionImpossible(mass.as_f64()));
        }
        let inv = T::one() / mass.sqrt();
        let zero = Complex::new(T::zero(), T::zero());
        self.amplitudes.par_iter_mut().enumerate().for_each(|(i, a)| {
            *a = if block.extract(i) == required { *a * inv } else { zero };
        });
        Ok(mass)
    }

    /// Writes `index,re,im` rows.
    pub fn dump_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,re,im")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            writeln!(out, "{i},{:.11e},{:.11e}", a.re.as_f64(), a.im.as_f64())?;
        }
        Ok(())
    }
}

/// Basis state of the system register for a physical label.
pub fn init_basis_state<T: Scalar>(layout: &EncodingLayout, label: &BasisLabel) -> Result<StateVector<T>> {
    let n = layout.total_bits();
    StateVector::basis(n, n, layout.index_of(label)?)
}

pub fn render_bits(code: usize, width: usize) -> String {
    (0..width).rev().map(|b| if (code >> b) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Multinomial draw by sequential conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(shots: u64, p: &[f64], rng: &mut R) -> Result<Vec<u64>> {
    let total: f64 = p.iter().sum();
    if !(total > 0.0) || p.iter().any(|x| *x < 0.0 || !x.is_finite()) {
        return Err(Error::Config("measurement distribution is not a probability vector".into()));
    }
    let mut counts = vec![0u64; p.len()];
    let mut left = shots;
    let mut mass = total;
    for (i, &pi) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == p.len() || pi >= mass {
            counts[i] = left;
            break;
        }
        let q = (pi / mass).clamp(0.0, 1.0);
        let k = Binomial::new(left, q).map_err(|e| Error::Config(e.to_string()))?.sample(rng);
        counts[i] = k;
        left -= k;
        mass -= pi;
    }
    Ok(counts)
}
