//! Acceptance run: one PASS/FAIL line per criterion, every tolerance pinned
//! below. Exits non-zero if any criterion fails.
//!
//! Criterion 7 evolves the 27-qubit register for 25 steps and takes several
//! minutes; its trajectory is reused by criteria 6, 9 and 12.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lfscatter::cgc::{sample_charge_density, saturation_scale, FieldParams, N_COLORS};
use lfscatter::hamiltonian::{
    build_kinetic, demo_fixture, demo_lattice_config, l1_norm, pauli_decompose, resource_estimate, HamiltonianModel,
    PauliTerm, FIXTURE_KINETIC,
};
use lfscatter::lattice::{build_lattice, ceil_log2, EncodingLayout};
use lfscatter::observables::{color_marginal, p_perp_squared_expectation, Trajectory};
use lfscatter::reference::{
    dense_hamiltonian, exact_trajectory, exact_unitary, max_abs_diff, taylor_polynomial, tts_matrix_emulation,
    DenseOperator, OaaAlgebra,
};
use lfscatter::statevector::{Block, QftDirection, StateVector};
use lfscatter::trotter::{trotter_evolve, TrotterConfig};
use lfscatter::tts::{ancilla_zero_block, evolve_with, oaa_step, BlockKind, TtsConfig, TtsPlan};
use lfscatter::Complex;

type C = Complex<f64>;

// Tolerances.
const C01_REL: f64 = 1e-5;
const C02_LAMBDA: f64 = 0.110024;
const C02_LAMBDA_REL: f64 = 1e-5;
const C02_TAU: f64 = 6.3001;
const C02_TAU_REL: f64 = 1e-4;
const C02_XPLUS: f64 = 157.5;
const C02_XPLUS_REL: f64 = 1e-4;
const C04_TOL: f64 = 1e-12;
const C04_TOYS: usize = 24;
const C05_TOL: f64 = 1e-10;
const C05_SUCCESS: f64 = 0.9999;
const C05_SUCCESS_TOL: f64 = 1e-3;
const C07_TOL: f64 = 1e-10;
const C08_SLOPE: (f64, f64) = (0.9, 1.1);
const C09_BLUE: f64 = 1e-12;
const C09_SUM: f64 = 1e-8;
const C09_LATE: f64 = 0.1;
const C10_REALIZATIONS: u64 = 10_000;
const C10_SIGMA: f64 = 3.0;
const C10_QS2: f64 = 0.420;
const C10_QS2_REL: f64 = 5e-3;
const C11_TOL: f64 = 1e-12;
const C12_SHOTS: u64 = 1_000_000;
const C12_SIGMA: f64 = 5.0;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: u32, pass: bool, title: &str, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("criterion {id:02} [{}] {title}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn demo_initial() -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); 64];
    v[0b101000] = C::new(1.0, 0.0);
    v
}

fn distance(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn rel(x: f64, target: f64) -> f64 {
    ((x - target) / target).abs()
}

/// Random models with at most 3 system qubits and 4 terms; diagonal strings
/// go to the kinetic part, the rest to the interaction part, and every
/// other toy conjugates qubit 0 by the two-site transform.
fn toy_models(count: usize, seed: u64) -> Vec<HamiltonianModel<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = ['I', 'X', 'Y', 'Z'];
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=3);
            let l = rng.gen_range(1..=4);
            let mut kinetic = Vec::new();
            let mut interaction = Vec::new();
            for _ in 0..l {
                let s: String = (0..n).map(|_| letters[rng.gen_range(0..4)]).collect();
                let coeff = rng.gen_range(0.05..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let term = PauliTerm::new(coeff, &s).unwrap();
                if term.string.is_diagonal() && rng.gen_bool(0.5) {
                    kinetic.push(term);
                } else {
                    interaction.push(term);
                }
            }
            let mut m = HamiltonianModel {
                n_qubits: n,
                kinetic_terms: kinetic,
                interaction_terms: interaction,
                qft_blocks: if i % 2 == 0 { vec![Block::new(0, 1)] } else { vec![] },
                qft_sites: 2,
                lambda: 0.0,
            };
            m.lambda = l1_norm(&m);
            m
        })
        .collect()
}

fn taylor_over_n(m: &HamiltonianModel<f64>, k: usize) -> (DenseOperator<f64>, f64) {
    // Independent of the circuit: dense Taylor sum with τ = ln2/Λ.
    let tau = LN_2 / m.lambda;
    let n_k: f64 = (0..=k).map(|j| LN_2.powi(j as i32) / (1..=j).product::<usize>() as f64).sum();
    (taylor_polynomial(&dense_hamiltonian(m), tau, k), n_k)
}

fn c01(r: &mut Report) {
    let spec = build_lattice::<f64>(&demo_lattice_config()).unwrap();
    let diag = build_kinetic(&spec, 0.02, 850.0).unwrap();
    let terms = pauli_decompose(&diag).unwrap();
    let mut worst = 0.0f64;
    let mut matched = 0;
    for (value, string) in FIXTURE_KINETIC {
        if let Some(t) = terms.iter().find(|t| t.string.as_str() == string) {
            worst = worst.max(rel(t.coeff * 1e3, value));
            matched += 1;
        } else {
            worst = f64::INFINITY;
        }
    }
    let pass = matched == 7 && terms.len() == 7 && worst < C01_REL;
    r.line(1, pass, "kinetic rebuild", format!("{} terms, max rel err {worst:.2e} (tol {C01_REL:e})", terms.len()));
}

fn c02(r: &mut Report) {
    let m = demo_fixture::<f64>();
    let lambda = l1_norm(&m);
    let tau = LN_2 / lambda;
    let x = 25.0 * tau;
    let pass = rel(lambda, C02_LAMBDA) < C02_LAMBDA_REL && rel(tau, C02_TAU) < C02_TAU_REL && rel(x, C02_XPLUS) < C02_XPLUS_REL;
    r.line(
        2,
        pass,
        "fixture norm",
        format!(
            "Λ = {lambda:.9} GeV (tol {C02_LAMBDA_REL:e} rel), τ = {tau:.6} GeV⁻¹ (tol {C02_TAU_REL:e} rel), x⁺ = {x:.4} GeV⁻¹"
        ),
    );
}

fn c03(r: &mut Report) {
    let m = demo_fixture::<f64>();
    let e = resource_estimate(&m, 3, 25).unwrap();
    let got = (e.system_qubits, e.ancilla_qubits, e.total_qubits, m.l1(), m.l2());
    r.line(
        3,
        got == (6, 21, 27, 7, 32),
        "resource counts",
        format!("N_sys, ancilla, total, L1, L2 = {got:?}"),
    );
}

fn c04(r: &mut Report) {
    let mut worst = 0.0f64;
    for (i, m) in toy_models(C04_TOYS, 4).iter().enumerate() {
        let k = 1 + i % 3;
        let plan = TtsPlan::new(m, k).unwrap();
        let block = ancilla_zero_block(&plan, BlockKind::Walk).unwrap();
        let (u, n_k) = taylor_over_n(m, k);
        worst = worst.max(max_abs_diff(&block, &u.scaled(C::new(1.0 / n_k, 0.0))));
    }
    r.line(4, worst < C04_TOL, "block encoding", format!("{C04_TOYS} toys, max entry err {worst:.2e} (tol {C04_TOL:e})"));
}

fn c05(r: &mut Report) {
    let mut literal = 0.0f64;
    let mut three_a = 0.0f64;
    let mut success_dev = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (i, m) in toy_models(C04_TOYS, 4).iter().enumerate() {
        let k = 1 + i % 3;
        let plan = TtsPlan::new(m, k).unwrap();
        let got = ancilla_zero_block(&plan, BlockKind::Amplified).unwrap();
        let (u, n_k) = taylor_over_n(m, k);
        let g = 3.0 / n_k - 4.0 / n_k.powi(3);
        literal = literal.max(max_abs_diff(&got, &u.scaled(C::new(g, 0.0))));
        let a = u.scaled(C::new(1.0 / n_k, 0.0));
        let mut exact = a.scaled(C::new(3.0, 0.0));
        exact.add_scaled(&a.matmul(&a.adjoint()).matmul(&a), C::new(-4.0, 0.0));
        three_a = three_a.max(max_abs_diff(&got, &exact));
        if k == 3 {
            let dim = 1usize << m.n_qubits;
            let mut psi: Vec<C> = (0..dim).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            psi.iter_mut().for_each(|z| *z /= norm);
            let mut sv = StateVector::zero(plan.n_total(), m.n_qubits);
            sv.amplitudes_mut()[..dim].copy_from_slice(&psi);
            let p = oaa_step(&mut sv, &plan).unwrap();
            success_dev = success_dev.max((p - C05_SUCCESS).abs());
        }
    }
    let pass = literal < C05_TOL && success_dev < C05_SUCCESS_TOL;
    r.line(
        5,
        pass,
        "amplification algebra",
        format!(
            "max |ΠQWΠ − (3/N−4/N³)U_K| = {literal:.2e} (tol {C05_TOL:e}); max |ΠQWΠ − (3A − 4AA†A)| = {three_a:.2e}; \
             K=3 success deviation from {C05_SUCCESS} = {success_dev:.2e} (tol {C05_SUCCESS_TOL:e})"
        ),
    );
}

/// Per-step error of the circuit on toys and of the emulated step on the
/// fixture, plus the K=3 circuit step on the fixture from criterion 7.
fn c06(r: &mut Report, fixture_k3_step: &[C]) {
    let tail = |k: usize| -> f64 {
        let mut t = 0.0;
        let mut term = 1.0;
        for j in 1..60 {
            term *= LN_2 / j as f64;
            if j > k {
                t += term;
            }
        }
        t
    };
    let mut ok = true;
    let mut details = Vec::new();
    // Toys, circuit.
    let mut toy_err = [0.0f64; 3];
    for m in toy_models(8, 6).iter() {
        let dim = 1usize << m.n_qubits;
        let h = dense_hamiltonian(m);
        let tau = LN_2 / m.lambda;
        let mut psi = vec![C::new(0.0, 0.0); dim];
        psi[dim - 1] = C::new(1.0, 0.0);
        let exact = exact_unitary(&h, tau).unwrap().apply(&psi);
        for (slot, k) in [3usize, 4, 5].iter().enumerate() {
            let plan = TtsPlan::new(m, *k).unwrap();
            let mut sv = StateVector::zero(plan.n_total(), m.n_qubits);
            sv.amplitudes_mut()[..dim].copy_from_slice(&psi);
            oaa_step(&mut sv, &plan).unwrap();
            let e = distance(sv.system_amplitudes(), &exact);
            toy_err[slot] = toy_err[slot].max(e);
            ok &= e <= tail(*k);
        }
    }
    details.push(format!("toys K=3,4,5 max err {:.2e}, {:.2e}, {:.2e}", toy_err[0], toy_err[1], toy_err[2]));
    // Fixture: emulated step for K = 3, 4, 5, worst over the exact trajectory states.
    let m = demo_fixture::<f64>();
    let tau = LN_2 / m.lambda;
    let exact = exact_trajectory(&demo_initial(), &m, tau, 25).unwrap();
    let u = exact_unitary(&dense_hamiltonian(&m), tau).unwrap();
    let mut fix_err = [0.0f64; 3];
    for (slot, k) in [3usize, 4, 5].iter().enumerate() {
        for s in &exact.steps[..25] {
            let psi = s.amplitudes.as_ref().unwrap();
            let emu = tts_matrix_emulation(psi, &m, *k, 1, OaaAlgebra::Exact).unwrap();
            let e = distance(emu.steps[1].amplitudes.as_ref().unwrap(), &u.apply(psi));
            fix_err[slot] = fix_err[slot].max(e);
        }
        ok &= fix_err[slot] <= tail(*k);
    }
    let circuit = distance(fixture_k3_step, &u.apply(&demo_initial()));
    ok &= circuit <= tail(3);
    ok &= fix_err[0] > fix_err[1] && fix_err[1] > fix_err[2];
    ok &= toy_err[0] > toy_err[1] && toy_err[1] > toy_err[2];
    details.push(format!(
        "fixture K=3,4,5 max err {:.2e}, {:.2e}, {:.2e}; fixture K=3 circuit step err {circuit:.2e}",
        fix_err[0], fix_err[1], fix_err[2]
    ));
    details.push(format!("bounds {:.4}, {:.2e}, {:.2e}", tail(3), tail(4), tail(5)));
    r.line(6, ok, "truncation bound", details.join("; "));
}

fn c07(r: &mut Report) -> Trajectory<f64> {
    let m = demo_fixture::<f64>();
    let start = Instant::now();
    let circuit = evolve_with(&demo_initial(), &m, &TtsConfig { k_max: 3, steps: 25 }, |k, p| {
        eprintln!("  tts statevector step {k:2}/25, success {p:.8}, {:.0} s", start.elapsed().as_secs_f64());
    })
    .unwrap();
    let emu = tts_matrix_emulation(&demo_initial(), &m, 3, 25, OaaAlgebra::Exact).unwrap();
    let mut worst = 0.0f64;
    for (a, b) in circuit.steps.iter().zip(&emu.steps) {
        for (x, y) in a.amplitudes.as_ref().unwrap().iter().zip(b.amplitudes.as_ref().unwrap()) {
            worst = worst.max((x - y).norm());
        }
    }
    // Diagnostic only: distance to the literal (3/N − 4/N³)·U_K emulation.
    let literal = tts_matrix_emulation(&demo_initial(), &m, 3, 25, OaaAlgebra::Idealized).unwrap();
    let mut literal_worst = 0.0f64;
    for (a, b) in circuit.steps.iter().zip(&literal.steps) {
        for (x, y) in a.amplitudes.as_ref().unwrap().iter().zip(b.amplitudes.as_ref().unwrap()) {
            literal_worst = literal_worst.max((x - y).norm());
        }
    }
    let pass = worst < C07_TOL && circuit.len() == 26;
    r.line(
        7,
        pass,
        "cross-engine oracle",
        format!(
            "27 qubits, 25 steps in {:.0} s, max amplitude diff {worst:.2e} (tol {C07_TOL:e}); \
             against the idealized emulation {literal_worst:.2e}",
            start.elapsed().as_secs_f64()
        ),
    );
    circuit
}

fn c08(r: &mut Report) {
    let m = demo_fixture::<f64>();
    let h = dense_hamiltonian(&m);
    let tau = LN_2 / m.lambda;
    let x = 25.0 * tau;
    let exact = exact_unitary(&h, x).unwrap().apply(&demo_initial());
    let points: Vec<(f64, f64)> = (0..5)
        .map(|j| {
            let steps = 25usize << j;
            let tp = x / steps as f64;
            let t = trotter_evolve(&demo_initial(), &m, &TrotterConfig { tau_prime: tp, steps }).unwrap();
            (tp.ln(), distance(t.steps.last().unwrap().amplitudes.as_ref().unwrap(), &exact).ln())
        })
        .collect();
    let slope = |pts: &[(f64, f64)]| {
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / n, sy / n);
        let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        num / den
    };
    let s4 = slope(&points[..4]);
    let s5 = slope(&points);
    let inside = |s: f64| s >= C08_SLOPE.0 && s <= C08_SLOPE.1;
    r.line(
        8,
        inside(s4) && inside(s5),
        "Trotter convergence",
        format!("slope {s4:.4} over τ..τ/8, {s5:.4} over τ..τ/16 (window {:?})", C08_SLOPE),
    );
}

fn c09(r: &mut Report, tts: &Trajectory<f64>) {
    let m = demo_fixture::<f64>();
    let spec = build_lattice::<f64>(&demo_lattice_config()).unwrap();
    let tau = LN_2 / m.lambda;
    let psi = demo_initial();
    let engines: Vec<(&str, Trajectory<f64>)> = vec![
        ("exact", exact_trajectory(&psi, &m, tau, 25).unwrap()),
        ("trotter", trotter_evolve(&psi, &m, &TrotterConfig { tau_prime: tau, steps: 25 }).unwrap()),
        ("tts-matrix", tts_matrix_emulation(&psi, &m, 3, 25, OaaAlgebra::Exact).unwrap()),
        ("tts", tts.clone()),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (name, traj) in &engines {
        let colors = color_marginal(traj);
        let p2 = p_perp_squared_expectation(traj, &spec).unwrap();
        let blue = colors.iter().map(|c| c.blue.abs()).fold(0.0, f64::max);
        let sum = colors.iter().map(|c| (c.red + c.green - 1.0).abs()).fold(0.0, f64::max);
        let last = colors.last().unwrap();
        let late = (last.red - 0.5).abs().max((last.green - 0.5).abs());
        let p_ok = p2[0].abs() < 1e-15 && *p2.last().unwrap() > 0.0;
        ok &= blue < C09_BLUE && sum < C09_SUM && late < C09_LATE && p_ok && traj.len() == 26;
        details.push(format!(
            "{name}: P_Blue ≤ {blue:.1e}, |P_R+P_G−1| ≤ {sum:.1e}, final P_R {:.4} P_G {:.4}, ⟨p⊥²⟩ {:.3e} → {:.4}",
            last.red,
            last.green,
            p2[0],
            p2.last().unwrap()
        ));
    }
    r.line(9, ok, "physics invariants", details.join("; "));
}

fn c10(r: &mut Report) {
    let spec = build_lattice::<f64>(&demo_lattice_config()).unwrap();
    let params = FieldParams::demo();
    // Discretized two-point target, written out independently of the
    // library: (g²μ)²/g² · N_η / (L_η · a_r²) with a_r = L⊥/N⊥.
    let a_r = 5.0 / 2.0;
    let target = params.g2mu.powi(2) / params.g.powi(2) * params.n_eta as f64 / (params.l_eta * a_r * a_r);
    let sites = 16;
    let mut sum = [[0.0f64; N_COLORS]; N_COLORS];
    let mut sum_sq = [[0.0f64; N_COLORS]; N_COLORS];
    let mut neighbour = 0.0f64;
    let mut neighbour_sq = 0.0f64;
    for seed in 0..C10_REALIZATIONS {
        let p = FieldParams { seed: 1_000_000 + seed, ..params.clone() };
        let rho = sample_charge_density(&p, &spec).unwrap();
        for x in 0..sites {
            for a in 0..N_COLORS {
                let ra = rho.slice(a + 1, 0)[x];
                for b in a..N_COLORS {
                    let v = ra * rho.slice(b + 1, 0)[x];
                    sum[a][b] += v;
                    sum_sq[a][b] += v * v;
                }
            }
            let v = rho.slice(1, 0)[x] * rho.slice(1, 0)[(x + 1) % sites];
            neighbour += v;
            neighbour_sq += v * v;
        }
    }
    let n = (C10_REALIZATIONS * sites as u64) as f64;
    let mut worst_diag = 0.0f64;
    let mut worst_off = 0.0f64;
    for a in 0..N_COLORS {
        for b in a..N_COLORS {
            let mean = sum[a][b] / n;
            let sigma = ((sum_sq[a][b] / n - mean * mean) / n).sqrt();
            if a == b {
                worst_diag = worst_diag.max((mean - target).abs() / sigma);
            } else {
                worst_off = worst_off.max(mean.abs() / sigma);
            }
        }
    }
    let mean_nb = neighbour / n;
    let pull_nb = mean_nb.abs() / ((neighbour_sq / n - mean_nb * mean_nb) / n).sqrt();
    let qs2 = saturation_scale(&params);
    let pass = worst_diag < C10_SIGMA && worst_off < C10_SIGMA && pull_nb < C10_SIGMA && rel(qs2, C10_QS2) < C10_QS2_REL;
    r.line(
        10,
        pass,
        "MV statistics",
        format!(
            "{C10_REALIZATIONS} realizations, diagonal max pull {worst_diag:.2}σ, colour off-diagonal {worst_off:.2}σ, \
             neighbour sites {pull_nb:.2}σ (limit {C10_SIGMA}σ); Q_s² = {qs2:.5} GeV² (tol {C10_QS2_REL:e} rel)"
        ),
    );
}

fn c11(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut worst_id = 0.0f64;
    for n_perp in [1usize, 2, 4] {
        let s = 2 * n_perp;
        let w = ceil_log2(s);
        // One spectator qubit on each side of the block.
        let block = Block::new(1, w);
        let n = w + 2;
        for col in 0..1usize << n {
            let mut sv = StateVector::<f64>::basis(n, n, col).unwrap();
            sv.apply_shifted_qft(block, s, QftDirection::Forward).unwrap();
            let q = ((col >> 1) & ((1 << w) - 1)) as i64 - n_perp as i64;
            for (row, a) in sv.amplitudes().iter().enumerate() {
                let spect = row & !(((1 << w) - 1) << 1);
                let expect = if spect != col & !(((1 << w) - 1) << 1) {
                    C::new(0.0, 0.0)
                } else {
                    let x = ((row >> 1) & ((1 << w) - 1)) as i64 - n_perp as i64;
                    C::from_polar(1.0 / (s as f64).sqrt(), 2.0 * PI * (q * x) as f64 / s as f64)
                };
                worst = worst.max((a - expect).norm());
            }
            sv.apply_shifted_qft(block, s, QftDirection::Inverse).unwrap();
            for (row, a) in sv.amplitudes().iter().enumerate() {
                let e = if row == col { 1.0 } else { 0.0 };
                worst_id = worst_id.max((a - C::new(e, 0.0)).norm());
            }
        }
    }
    r.line(
        11,
        worst < C11_TOL && worst_id < C11_TOL,
        "shifted transform",
        format!("N⊥ ∈ {{1,2,4}}, max entry err {worst:.2e}, max |F†F − 1| {worst_id:.2e} (tol {C11_TOL:e})"),
    );
}

fn c12(r: &mut Report, tts: &Trajectory<f64>) {
    let last = tts.last().unwrap().amplitudes.clone().unwrap();
    let sv = StateVector::from_amplitudes(last, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let counts = sv.measure_block(sv.system_block(), C12_SHOTS, &mut rng).unwrap();
    let layout = EncodingLayout::from_spec(&build_lattice::<f64>(&demo_lattice_config()).unwrap());
    let probs = sv.probabilities();
    let mut worst = 0.0f64;
    let mut ok = true;
    for (i, p) in probs.iter().enumerate() {
        let n = *counts.get(&layout.render(i)).unwrap_or(&0) as f64;
        let f = n / C12_SHOTS as f64;
        let band = C12_SIGMA * (p * (1.0 - p) / C12_SHOTS as f64).sqrt();
        if band > 0.0 {
            worst = worst.max((f - p).abs() / band * C12_SIGMA);
        }
        ok &= (f - p).abs() <= band || (n == 0.0 && *p < 1e-9);
    }
    r.line(12, ok, "shot consistency", format!("{C12_SHOTS} shots, worst deviation {worst:.2}σ (band {C12_SIGMA}σ)"));
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    c01(&mut r);
    c02(&mut r);
    c03(&mut r);
    c04(&mut r);
    c05(&mut r);
    c08(&mut r);
    c10(&mut r);
    c11(&mut r);
    let tts = c07(&mut r);
    c06(&mut r, tts.steps[1].amplitudes.as_ref().unwrap());
    c09(&mut r, &tts);
    c12(&mut r, &tts);
    println!("acceptance: {} of 12 criteria failed", r.failures);
    if r.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
