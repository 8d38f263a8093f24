//! Observables extracted from recorded trajectories.
//!
//! Everything here works from basis-state probabilities so statevector and
//! shot-sampled trajectories go through the same code.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::lattice::{Color, EncodingLayout, LatticeSpec};
use crate::statevector::{multinomial, Block};
use crate::{Complex, Error, Result, Scalar};

/// Allowed drift of a step's total probability from one.
pub const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<T> {
    pub step: usize,
    /// Light-front time, GeV⁻¹.
    pub x_plus: T,
    /// `|c_β|²` indexed by register value.
    pub probabilities: Vec<T>,
    pub amplitudes: Option<Vec<Complex<T>>>,
    /// Ancilla success probability of the step that produced this state.
    pub ancilla_success: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub n_qubits: usize,
    pub steps: Vec<StepRecord<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(n_qubits: usize) -> Self {
        Trajectory { n_qubits, steps: Vec::new() }
    }

    pub fn record_state(&mut self, step: usize, x_plus: T, amplitudes: &[Complex<T>], success: Option<T>) {
        self.steps.push(StepRecord {
            step,
            x_plus,
            probabilities: amplitudes.iter().map(|a| a.norm_sqr()).collect(),
            amplitudes: Some(amplitudes.to_vec()),
            ancilla_success: success,
        });
    }

    pub fn record_probabilities(&mut self, step: usize, x_plus: T, probabilities: Vec<T>, success: Option<T>) {
        self.steps.push(StepRecord { step, x_plus, probabilities, amplitudes: None, ancilla_success: success });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn x_plus(&self) -> Vec<T> {
        self.steps.iter().map(|s| s.x_plus).collect()
    }

    pub fn last(&self) -> Option<&StepRecord<T>> {
        self.steps.last()
    }

    pub fn ancilla_success(&self) -> Vec<Option<T>> {
        self.steps.iter().map(|s| s.ancilla_success).collect()
    }

    /// Checks non-negativity and unit total probability at every step.
    pub fn check_normalized(&self) -> Result<()> {
        for s in &self.steps {
            if s.probabilities.iter().any(|p| *p < T::zero()) {
                return Err(Error::Config(format!("step {} has a negative probability", s.step)));
            }
            let total: f64 = s.probabilities.iter().map(|p| p.as_f64()).sum();
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::Config(format!("step {} has total probability {total}", s.step)));
            }
        }
        Ok(())
    }
}

/// `|⟨φ_f|ψ(x⁺)⟩|²` for a basis label given as a bitstring.
pub fn transition_probability<T: Scalar>(
    traj: &Trajectory<T>,
    layout: &EncodingLayout,
    target: &str,
) -> Result<Vec<T>> {
    check_layout(traj, layout)?;
    let label = crate::lattice::decode_basis(target, layout)?;
    let index = layout.index_of(&label)?;
    Ok(traj.steps.iter().map(|s| s.probabilities[index]).collect())
}

/// Probabilities of the transverse codes `(code¹, code²)`, flattened as
/// `code¹ · 2^w + code²`, all other blocks traced out.
pub fn transverse_marginal<T: Scalar>(probabilities: &[T], layout: &EncodingLayout) -> Vec<T> {
    let [b1, b2] = layout.transverse_blocks();
    let w = layout.site_bits;
    let mut out = vec![T::zero(); 1 << (2 * w)];
    for (i, p) in probabilities.iter().enumerate() {
        out[(b1.extract(i) << w) | b2.extract(i)] += *p;
    }
    out
}

/// `Σ |c_β|² p⊥²` of one probability vector.
pub fn p_perp_sq_of<T: Scalar>(probabilities: &[T], spec: &LatticeSpec<T>, layout: &EncodingLayout) -> T {
    let w = layout.site_bits;
    let n = spec.n_perp as i64;
    transverse_marginal(probabilities, layout)
        .iter()
        .enumerate()
        .filter(|(code, _)| (code >> w) < 2 * spec.n_perp && (code & ((1 << w) - 1)) < 2 * spec.n_perp)
        .map(|(code, p)| *p * spec.p_perp_sq((code >> w) as i64 - n, (code & ((1 << w) - 1)) as i64 - n))
        .sum()
}

/// `⟨p⊥²⟩` in GeV² at every recorded step.
pub fn p_perp_squared_expectation<T: Scalar>(traj: &Trajectory<T>, spec: &LatticeSpec<T>) -> Result<Vec<T>> {
    let layout = EncodingLayout::from_spec(spec);
    check_layout(traj, &layout)?;
    Ok(traj.steps.par_iter().map(|s| p_perp_sq_of(&s.probabilities, spec, &layout)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColorProbabilities<T> {
    pub red: T,
    pub green: T,
    pub blue: T,
}

impl<T: Scalar> ColorProbabilities<T> {
    pub fn get(&self, color: Color) -> T {
        match color {
            Color::Red => self.red,
            Color::Green => self.green,
            Color::Blue => self.blue,
        }
    }

    pub fn total(&self) -> T {
        self.red + self.green + self.blue
    }
}

pub fn color_probabilities<T: Scalar>(probabilities: &[T]) -> ColorProbabilities<T> {
    let block = Block::new(0, crate::lattice::COLOR_BITS);
    let mut acc = [T::zero(); 4];
    for (i, p) in probabilities.iter().enumerate() {
        acc[block.extract(i)] += *p;
    }
    ColorProbabilities { red: acc[0], green: acc[1], blue: acc[2] }
}

pub fn color_marginal<T: Scalar>(traj: &Trajectory<T>) -> Vec<ColorProbabilities<T>> {
    traj.steps.par_iter().map(|s| color_probabilities(&s.probabilities)).collect()
}

/// `|sim − exact|/|exact|` pointwise; points with `exact = 0` give `None`.
pub fn relative_deviation<T: Scalar>(sim: &[T], exact: &[T]) -> Result<Vec<Option<T>>> {
    if sim.len() != exact.len() {
        return Err(Error::GridMismatch(format!("{} points against {}", sim.len(), exact.len())));
    }
    Ok(sim
        .iter()
        .zip(exact)
        .map(|(s, e)| if *e == T::zero() { None } else { Some(((*s - *e) / *e).abs()) })
        .collect())
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Replaces each step's distribution by a finite-shot estimate.
///
/// A shot reaching step `k` has survived every ancilla postselection up to
/// `k`, so the number of kept shots is binomial in the product of the
/// recorded success probabilities. Frequencies are normalized over the kept
/// shots.
pub fn sample_shots<T: Scalar, R: Rng + ?Sized>(traj: &Trajectory<T>, shots: u64, rng: &mut R) -> Result<Trajectory<T>> {
    let mut out = Trajectory::new(traj.n_qubits);
    let mut survival = 1.0f64;
    for s in &traj.steps {
        if let Some(p) = s.ancilla_success {
            survival *= p.as_f64().clamp(0.0, 1.0);
        }
        let kept = Binomial::new(shots, survival).map_err(|e| Error::Config(e.to_string()))?.sample(rng);
        if kept == 0 {
            return Err(Error::ProjectionImpossible(survival));
        }
        let p: Vec<f64> = s.probabilities.iter().map(|x| x.as_f64()).collect();
        let counts = multinomial(kept, &p, rng)?;
        let inv = 1.0 / kept as f64;
        let freq = counts.iter().map(|n| T::lit(*n as f64 * inv)).collect();
        out.record_probabilities(s.step, s.x_plus, freq, s.ancilla_success);
    }
    Ok(out)
}

fn check_layout<T>(traj: &Trajectory<T>, layout: &EncodingLayout) -> Result<()> {
    if traj.n_qubits != layout.total_bits() {
        return Err(Error::LatticeMismatch(format!(
            "trajectory has {} qubits, layout {}",
            traj.n_qubits,
            layout.total_bits()
        )));
    }
    Ok(())
}

/// Formats with twelve significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// One row of the observables table.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRow {
    pub step: usize,
    pub x_plus: f64,
    pub p_perp_sq: f64,
    pub p_red: f64,
    pub p_green: f64,
    pub p_blue: f64,
}

pub const OBSERVABLES_HEADER: &str = "step,x_plus,p_perp_sq,P_red,P_green,P_blue";
pub const PROBABILITIES_HEADER: &str = "step,x_plus,bitstring,probability";

pub fn observable_rows<T: Scalar>(traj: &Trajectory<T>, spec: &LatticeSpec<T>) -> Result<Vec<ObservableRow>> {
    let p2 = p_perp_squared_expectation(traj, spec)?;
    let colors = color_marginal(traj);
    Ok(traj
        .steps
        .iter()
        .zip(p2)
        .zip(colors)
        .map(|((s, p), c)| ObservableRow {
            step: s.step,
            x_plus: s.x_plus.as_f64(),
            p_perp_sq: p.as_f64(),
            p_red: c.red.as_f64(),
            p_green: c.green.as_f64(),
            p_blue: c.blue.as_f64(),
        })
        .collect())
}

pub fn write_observables_csv<W: Write>(rows: &[ObservableRow], mut out: W) -> Result<()> {
    writeln!(out, "{OBSERVABLES_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.step,
            fmt_num(r.x_plus),
            fmt_num(r.p_perp_sq),
            fmt_num(r.p_red),
            fmt_num(r.p_green),
            fmt_num(r.p_blue)
        )?;
    }
    Ok(())
}

pub fn read_observables_csv<R: BufRead>(input: R) -> Result<Vec<ObservableRow>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != OBSERVABLES_HEADER {
        return Err(Error::Config("missing observables header".into()));
    }
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(Error::Config(format!("malformed observables row: {line}")));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("{s}: {e}")));
        rows.push(ObservableRow {
            step: f[0].trim().parse().map_err(|e| Error::Config(format!("{}: {e}", f[0])))?,
            x_plus: num(f[1])?,
            p_perp_sq: num(f[2])?,
            p_red: num(f[3])?,
            p_green: num(f[4])?,
            p_blue: num(f[5])?,
        });
    }
    Ok(rows)
}

/// Every basis state of every step, unused colour codes included.
pub fn write_probabilities_csv<T: Scalar, W: Write>(traj: &Trajectory<T>, layout: &EncodingLayout, mut out: W) -> Result<()> {
    check_layout(traj, layout)?;
    writeln!(out, "{PROBABILITIES_HEADER}")?;
    for s in &traj.steps {
        let x = fmt_num(s.x_plus.as_f64());
        for (i, p) in s.probabilities.iter().enumerate() {
            writeln!(out, "{},{},{},{}", s.step, x, layout.render(i), fmt_num(p.as_f64()))?;
        }
    }
    Ok(())
}
