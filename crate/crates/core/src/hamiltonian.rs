//! The light-front Hamiltonian `H = P⁻/2` as a linear combination of Pauli
//! strings.
//!
//! Kinetic terms are diagonal in the transverse momentum basis. Interaction
//! terms are diagonal in the transverse coordinate basis and act as
//! `F† h F` on the momentum-encoded register, `F` being the shifted Fourier
//! transform on each transverse block (momentum → coordinate).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cgc::ColorField;
use crate::error::{Error, Result};
use crate::lattice::{EncodingLayout, LatticeSpec};
use crate::scalar::{c, Complex, Scalar};
use crate::statevector::Block;

/// Relative threshold below which decomposition coefficients are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString(String);

impl PauliString {
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(bad) = s.chars().find(|ch| !matches!(ch, 'I' | 'X' | 'Y' | 'Z')) {
            return Err(Error::Config(format!("invalid Pauli character {bad:?} in {s:?}")));
        }
        Ok(PauliString(s.to_string()))
    }

    pub fn identity(width: usize) -> Self {
        PauliString("I".repeat(width))
    }

    /// I/Z string whose `Z` positions are the set bits of `mask`
    /// (bit `width − 1 − i` ↔ character `i`).
    pub fn from_z_mask(mask: usize, width: usize) -> Self {
        PauliString((0..width).map(|i| if (mask >> (width - 1 - i)) & 1 == 1 { 'Z' } else { 'I' }).collect())
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn chars(&self) -> std::str::Chars<'_> {
        self.0.chars()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_diagonal(&self) -> bool {
        self.0.chars().all(|ch| ch == 'I' || ch == 'Z')
    }

    pub fn is_identity(&self) -> bool {
        self.0.chars().all(|ch| ch == 'I')
    }

    /// Concatenation; `self` occupies the more significant qubits.
    pub fn tensor(&self, low: &PauliString) -> PauliString {
        PauliString(format!("{}{}", self.0, low.0))
    }
}

impl TryFrom<String> for PauliString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        PauliString::parse(&s)
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm<T> {
    pub coeff: T,
    pub string: PauliString,
}

impl<T: Scalar> PauliTerm<T> {
    pub fn new(coeff: T, string: &str) -> Result<Self> {
        Ok(PauliTerm { coeff, string: PauliString::parse(string)? })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Kinetic,
    Interaction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianModel<T> {
    pub n_qubits: usize,
    pub kinetic_terms: Vec<PauliTerm<T>>,
    pub interaction_terms: Vec<PauliTerm<T>>,
    /// Transverse blocks conjugated by the shifted transform.
    pub qft_blocks: Vec<Block>,
    /// Sites per transverse axis (`2·N⊥`).
    pub qft_sites: usize,
    pub lambda: T,
}

impl<T: Scalar> HamiltonianModel<T> {
    pub fn l1(&self) -> usize {
        self.kinetic_terms.len()
    }

    pub fn l2(&self) -> usize {
        self.interaction_terms.len()
    }

    pub fn len(&self) -> usize {
        self.l1() + self.l2()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Term `ℓ` in LCU order: kinetic terms first, then interaction terms.
    pub fn term(&self, l: usize) -> Option<(&PauliTerm<T>, TermKind)> {
        if l < self.l1() {
            Some((&self.kinetic_terms[l], TermKind::Kinetic))
        } else {
            self.interaction_terms.get(l - self.l1()).map(|t| (t, TermKind::Interaction))
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliTerm<T>, TermKind)> {
        self.kinetic_terms
            .iter()
            .map(|t| (t, TermKind::Kinetic))
            .chain(self.interaction_terms.iter().map(|t| (t, TermKind::Interaction)))
    }

    /// Positive LCU weights `α_ℓ = |coeff_ℓ|`; the sign is carried by the unitary.
    pub fn lcu_weights(&self) -> Vec<T> {
        self.terms().map(|(t, _)| t.coeff.abs()).collect()
    }

    pub fn system_block(&self) -> Block {
        Block::new(0, self.n_qubits)
    }

    pub fn scaled(&self, factor: T) -> Self {
        let scale = |terms: &[PauliTerm<T>]| -> Vec<PauliTerm<T>> {
            terms.iter().map(|t| PauliTerm { coeff: t.coeff * factor, string: t.string.clone() }).collect()
        };
        let mut m = HamiltonianModel {
            kinetic_terms: scale(&self.kinetic_terms),
            interaction_terms: scale(&self.interaction_terms),
            ..self.clone()
        };
        m.lambda = l1_norm(&m);
        m
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            n_qubits: self.n_qubits,
            terms: self
                .terms()
                .map(|(t, kind)| TermDocument { coeff: t.coeff.as_f64(), string: t.string.clone(), kind })
                .collect(),
            qft_blocks: self.qft_blocks.clone(),
            qft_sites: self.qft_sites,
            lambda: self.lambda.as_f64(),
            units: "GeV".into(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        if doc.units != "GeV" {
            return Err(Error::Config(format!("unsupported units {:?}", doc.units)));
        }
        let mut kinetic = Vec::new();
        let mut interaction = Vec::new();
        for t in doc.terms {
            if t.string.width() != doc.n_qubits {
                return Err(Error::WidthMismatch { expected: doc.n_qubits, found: t.string.width() });
            }
            let term = PauliTerm { coeff: T::lit(t.coeff), string: t.string };
            match t.kind {
                TermKind::Kinetic => kinetic.push(term),
                TermKind::Interaction => interaction.push(term),
            }
        }
        let mut model = HamiltonianModel {
            n_qubits: doc.n_qubits,
            kinetic_terms: kinetic,
            interaction_terms: interaction,
            qft_blocks: doc.qft_blocks,
            qft_sites: doc.qft_sites,
            lambda: T::zero(),
        };
        model.lambda = l1_norm(&model);
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct TermDocument {
    coeff: f64,
    string: PauliString,
    kind: TermKind,
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    n_qubits: usize,
    terms: Vec<TermDocument>,
    qft_blocks: Vec<Block>,
    qft_sites: usize,
    lambda: f64,
    units: String,
}

/// Generator `T^a` (`a = 0` is the identity, `1..=8` the Gell-Mann matrices
/// over two) on the two-qubit color block, row-major over codes
/// Red = 00, Green = 01, Blue = 10; code 11 is a zero row and column except
/// for `T⁰`, which is the full identity.
pub fn color_generator<T: Scalar>(a: usize) -> Result<[[Complex<T>; 4]; 4]> {
    let z = c(T::zero(), T::zero());
    let h = T::lit(0.5);
    let mut m = [[z; 4]; 4];
    let set = |m: &mut [[Complex<T>; 4]; 4], r: usize, col: usize, re: T, im: T| {
        m[r][col] = c(re * h, im * h);
        m[col][r] = c(re * h, -im * h);
    };
    let one = T::one();
    match a {
        0 => {
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = c(one, T::zero());
            }
        }
        1 => set(&mut m, 0, 1, one, T::zero()),
        2 => set(&mut m, 0, 1, T::zero(), -one),
        3 => {
            m[0][0] = c(h, T::zero());
            m[1][1] = c(-h, T::zero());
        }
        4 => set(&mut m, 0, 2, one, T::zero()),
        5 => set(&mut m, 0, 2, T::zero(), -one),
        6 => set(&mut m, 1, 2, one, T::zero()),
        7 => set(&mut m, 1, 2, T::zero(), -one),
        8 => {
            let s = h / T::lit(3.0).sqrt();
            m[0][0] = c(s, T::zero());
            m[1][1] = c(s, T::zero());
            m[2][2] = c(-s - s, T::zero());
        }
        _ => return Err(Error::Config(format!("color index {a} outside 0..=8"))),
    }
    Ok(m)
}

/// Two-qubit Pauli expansion `T^a = Σ κ_σ σ` (`κ_σ = Tr(σ T^a)/4`, real).
pub fn color_generator_terms<T: Scalar>(a: usize) -> Result<Vec<(T, PauliString)>> {
    let m = color_generator::<T>(a)?;
    let mut out = Vec::new();
    for s1 in ['I', 'X', 'Y', 'Z'] {
        for s0 in ['I', 'X', 'Y', 'Z'] {
            let sigma = two_qubit_pauli::<T>(s1, s0);
            // Tr(σ M) = Σ_{r,c} σ[r][c] M[c][r]
            let mut tr = c(T::zero(), T::zero());
            for r in 0..4 {
                for col in 0..4 {
                    tr = tr + sigma[r][col] * m[col][r];
                }
            }
            let kappa = tr.re / T::lit(4.0);
            if kappa.abs() > T::lit(PRUNE_RELATIVE) {
                out.push((kappa, PauliString(format!("{s1}{s0}"))));
            }
        }
    }
    Ok(out)
}

fn single_pauli<T: Scalar>(ch: char) -> [[Complex<T>; 2]; 2] {
    let (o, z) = (T::one(), T::zero());
    match ch {
        'I' => [[c(o, z), c(z, z)], [c(z, z), c(o, z)]],
        'X' => [[c(z, z), c(o, z)], [c(o, z), c(z, z)]],
        'Y' => [[c(z, z), c(z, -o)], [c(z, o), c(z, z)]],
        _ => [[c(o, z), c(z, z)], [c(z, z), c(-o, z)]],
    }
}

fn two_qubit_pauli<T: Scalar>(high: char, low: char) -> [[Complex<T>; 4]; 4] {
    let a = single_pauli::<T>(high);
    let b = single_pauli::<T>(low);
    let mut m = [[c(T::zero(), T::zero()); 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            m[r][col] = a[r >> 1][col >> 1] * b[r & 1][col & 1];
        }
    }
    m
}

/// Kinetic energies `(m² + p⊥²)/p⁺` over the transverse momentum codes,
/// indexed `code(q1)·2^w + code(q2)`. Codes beyond the lattice get zero.
pub fn build_kinetic<T: Scalar>(spec: &LatticeSpec<T>, m_quark: T, p_plus: T) -> Result<Vec<T>> {
    if !(p_plus > T::zero()) {
        return Err(Error::Config(format!("p⁺ must be positive, got {p_plus}")));
    }
    let layout = EncodingLayout::from_spec(spec);
    let w = layout.site_bits;
    let n = spec.n_perp as i64;
    let mut diag = vec![T::zero(); 1 << (2 * w)];
    for q1 in -n..n {
        for q2 in -n..n {
            let idx = (((q1 + n) as usize) << w) | (q2 + n) as usize;
            diag[idx] = (m_quark * m_quark + spec.p_perp_sq(q1, q2)) / p_plus;
        }
    }
    Ok(diag)
}

/// Kinetic diagonal over the `[p⁺][p¹][p²]` codes of a layout, with `p⁺`
/// taken from each longitudinal mode.
pub fn build_kinetic_register<T: Scalar>(spec: &LatticeSpec<T>, layout: &EncodingLayout, m_quark: T) -> Result<Vec<T>> {
    let transverse_bits = 2 * layout.site_bits;
    let mut diag = vec![T::zero(); 1 << (layout.p_plus_bits + transverse_bits)];
    for mode in 1..=spec.n_par {
        let block = build_kinetic(spec, m_quark, spec.p_plus(mode))?;
        let base = (mode - 1) << transverse_bits;
        diag[base..base + block.len()].copy_from_slice(&block);
    }
    Ok(diag)
}

/// Interaction `Σ_a g·A⁻_a(x⊥)·T^a` as Pauli terms over the full register
/// (coordinate frame on the transverse blocks, identity on p⁺ and λ).
pub fn build_interaction<T: Scalar>(field: &ColorField<T>, spec: &LatticeSpec<T>, g: T) -> Result<Vec<PauliTerm<T>>> {
    if field.n_perp != spec.n_perp {
        return Err(Error::LatticeMismatch(format!(
            "field has N⊥ = {}, lattice has N⊥ = {}",
            field.n_perp, spec.n_perp
        )));
    }
    let layout = EncodingLayout::from_spec(spec);
    let w = layout.site_bits;
    let sites = 2 * spec.n_perp;
    let high = PauliString::identity(layout.p_plus_bits);
    let mid = PauliString::identity(layout.helicity_bits);
    let mut acc: BTreeMap<PauliString, T> = BTreeMap::new();
    for (a_index, component) in field.a_minus.iter().enumerate() {
        let a = a_index + 1;
        if component.iter().all(|v| *v == T::zero()) {
            continue;
        }
        let mut diag = vec![T::zero(); 1 << (2 * w)];
        for c1 in 0..sites {
            for c2 in 0..sites {
                diag[(c1 << w) | c2] = g * component[c1 * sites + c2];
            }
        }
        let spatial = pauli_decompose(&diag)?;
        for (kappa, color) in color_generator_terms::<T>(a)? {
            for term in &spatial {
                let s = high.tensor(&term.string).tensor(&mid).tensor(&color);
                *acc.entry(s).or_insert(T::zero()) += kappa * term.coeff;
            }
        }
    }
    let max = acc.values().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = max * T::lit(PRUNE_RELATIVE);
    Ok(acc
        .into_iter()
        .filter(|(_, v)| v.abs() > floor)
        .map(|(string, coeff)| PauliTerm { coeff, string })
        .collect())
}

/// Pauli expansion of a diagonal operator via the fast Walsh–Hadamard
/// transform; only I/Z strings arise. Output is sorted by string.
pub fn pauli_decompose<T: Scalar>(diag: &[T]) -> Result<Vec<PauliTerm<T>>> {
    let len = diag.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let n = len.trailing_zeros() as usize;
    let mut k = diag.to_vec();
    let mut h = 1;
    while h < len {
        for i in (0..len).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (k[j], k[j + h]);
                k[j] = a + b;
                k[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = T::one() / T::from_usize_lossy(len);
    k.iter_mut().for_each(|x| *x *= scale);
    let max = k.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = max * T::lit(PRUNE_RELATIVE);
    let mut terms: Vec<PauliTerm<T>> = k
        .into_iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > floor)
        .map(|(mask, coeff)| PauliTerm { coeff, string: PauliString::from_z_mask(mask, n) })
        .collect();
    terms.sort_by(|a, b| a.string.cmp(&b.string));
    Ok(terms)
}

/// Builds the model: all coefficients are multiplied by one half here
/// (`H = P⁻/2`), terms are sorted by string within each kind.
pub fn assemble<T: Scalar>(
    kinetic: Vec<PauliTerm<T>>,
    interaction: Vec<PauliTerm<T>>,
    layout: &EncodingLayout,
) -> Result<HamiltonianModel<T>> {
    let n = layout.total_bits();
    let half = T::lit(0.5);
    let prepare = |terms: Vec<PauliTerm<T>>| -> Result<Vec<PauliTerm<T>>> {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            if t.string.width() != n {
                return Err(Error::WidthMismatch { expected: n, found: t.string.width() });
            }
            out.push(PauliTerm { coeff: t.coeff * half, string: t.string });
        }
        out.sort_by(|a, b| a.string.cmp(&b.string));
        Ok(out)
    };
    let kinetic_terms = prepare(kinetic)?;
    if let Some(t) = kinetic_terms.iter().find(|t| !t.string.is_diagonal()) {
        return Err(Error::Config(format!("kinetic term {} is not diagonal", t.string)));
    }
    let interaction_terms = prepare(interaction)?;
    let mut model = HamiltonianModel {
        n_qubits: n,
        kinetic_terms,
        interaction_terms,
        qft_blocks: layout.transverse_blocks().to_vec(),
        qft_sites: 2 * layout.n_perp,
        lambda: T::zero(),
    };
    model.lambda = l1_norm(&model);
    Ok(model)
}

/// Kinetic Pauli terms over the full register for a lattice (before the ½).
pub fn kinetic_terms<T: Scalar>(spec: &LatticeSpec<T>, layout: &EncodingLayout, m_quark: T) -> Result<Vec<PauliTerm<T>>> {
    let diag = build_kinetic_register(spec, layout, m_quark)?;
    let low = PauliString::identity(layout.helicity_bits + layout.color_bits);
    Ok(pauli_decompose(&diag)?
        .into_iter()
        .map(|t| PauliTerm { coeff: t.coeff, string: t.string.tensor(&low) })
        .collect())
}

/// Kinetic coefficients of the demo, 10⁻³ GeV, strings over `[p¹][p²]`.
pub const FIXTURE_KINETIC: [(f64, &str); 7] = [
    (1.39383, "IIII"),
    (0.232226, "IIIZ"),
    (0.464452, "IIZI"),
    (0.464452, "IIZZ"),
    (0.232226, "IZII"),
    (0.464452, "ZIII"),
    (0.464452, "ZZII"),
];

/// Interaction potential of the demo for the `a = 1` color component,
/// 10⁻³ GeV, strings over `[x¹][x²]`.
pub const FIXTURE_POTENTIAL: [(f64, &str); 16] = [
    (346.525, "IIII"),
    (-0.709063, "IIIZ"),
    (-2.73394, "IIZI"),
    (-6.04144, "IIZZ"),
    (3.56781, "IZII"),
    (-1.50894, "IZIZ"),
    (-1.98356, "IZZI"),
    (-0.209813, "IZZZ"),
    (10.7856, "ZIII"),
    (1.18556, "ZIIZ"),
    (-4.93806, "ZIZI"),
    (8.65394, "ZIZZ"),
    (-28.8128, "ZZII"),
    (2.46544, "ZZIZ"),
    (-8.74144, "ZZZI"),
    (-3.80169, "ZZZZ"),
];

/// Lattice parameters of the demo: N⊥ = 2, L⊥ = 5 GeV⁻¹, one longitudinal
/// mode at p⁺ = 850 GeV, helicity +1/2.
pub fn demo_lattice_config() -> crate::lattice::LatticeConfig {
    crate::lattice::LatticeConfig {
        n_perp: 2,
        l_perp: 5.0,
        n_par: 1,
        l_par: 1.0,
        fixed_p_plus: Some(850.0),
        fixed_helicity: Some(0.5),
    }
}

pub const DEMO_M_QUARK: f64 = 0.02;

/// The printed demo Hamiltonian on six qubits `[p¹][p²][c]`:
/// `H = ½·𝒦 ⊗ T⁰ + ½·F†(W ⊗ T¹)F`.
pub fn demo_fixture<T: Scalar>() -> HamiltonianModel<T> {
    let milli = T::lit(1e-3);
    let kinetic = FIXTURE_KINETIC
        .iter()
        .map(|(k, s)| PauliTerm { coeff: T::lit(*k) * milli, string: PauliString(format!("{s}II")) })
        .collect();
    let t1 = color_generator_terms::<T>(1).expect("T¹ exists");
    let interaction = FIXTURE_POTENTIAL
        .iter()
        .flat_map(|(w, s)| {
            t1.iter().map(move |(kappa, color)| PauliTerm {
                coeff: T::lit(*w) * milli * *kappa,
                string: PauliString(format!("{s}{color}")),
            })
        })
        .collect();
    let spec = crate::lattice::build_lattice::<T>(&demo_lattice_config()).expect("demo lattice");
    let layout = EncodingLayout::from_spec(&spec);
    assemble(kinetic, interaction, &layout).expect("fixture widths")
}

pub fn l1_norm<T: Scalar>(model: &HamiltonianModel<T>) -> T {
    model.terms().map(|(t, _)| t.coeff.abs()).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub system_qubits: usize,
    pub ancilla_qubits: usize,
    pub total_qubits: usize,
    pub terms: usize,
    /// Asymptotic gate count of the r-step evolution with numbers substituted.
    pub gate_count: String,
    /// The bracketed expression evaluated (constant factors dropped).
    pub gate_count_scale: f64,
}

pub fn resource_estimate<T: Scalar>(model: &HamiltonianModel<T>, k_r: usize, r: usize) -> Result<ResourceEstimate> {
    if model.is_empty() {
        return Err(Error::Empty("Hamiltonian has no terms"));
    }
    if k_r == 0 || r == 0 {
        return Err(Error::Config("truncation order and step count must be at least 1".into()));
    }
    let l = model.len();
    let index_bits = crate::lattice::ceil_log2(l);
    let ancilla = k_r + k_r * index_bits;
    let n_sys = model.n_qubits;
    let log_l = (l as f64).log2();
    let scale = r as f64 * k_r as f64 * l as f64 * (n_sys as f64 + log_l) + r as f64 * (n_sys * n_sys) as f64;
    Ok(ResourceEstimate {
        system_qubits: n_sys,
        ancilla_qubits: ancilla,
        total_qubits: ancilla + n_sys,
        terms: l,
        gate_count: format!(
            "O[r·K_r·L·(N_sys + log L) + r·N_sys²] with r = {r}, K_r = {k_r}, L = {l}, N_sys = {n_sys}; \
             equivalently O[Λx⁺·log(Λx⁺/ε)/loglog(Λx⁺/ε)·L·(N_sys + log L) + Λx⁺·N_sys²]"
        ),
        gate_count_scale: scale,
    })
}
