//! Lattice discretization of the light-front basis `|p⁺, p¹, p², λ, c⟩` and
//! the compact binary encoding of its labels into register bitstrings.
//!
//! Register order (most significant first): `[p⁺][p¹][p²][λ][c]`. Blocks for
//! degrees of freedom that are held fixed are omitted from the register but
//! still reported when a bitstring is decoded.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::statevector::Block;

/// Number of bits needed to label `n` values (`⌈log₂ n⌉`, zero for `n ≤ 1`).
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Helicity {
    Minus,
    Plus,
}

impl Helicity {
    pub fn from_half(value: f64) -> Result<Self> {
        if value == 0.5 {
            Ok(Helicity::Plus)
        } else if value == -0.5 {
            Ok(Helicity::Minus)
        } else {
            Err(Error::Config(format!("helicity must be ±1/2, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Helicity::Minus => -0.5,
            Helicity::Plus => 0.5,
        }
    }

    fn bit(self) -> usize {
        match self {
            Helicity::Minus => 0,
            Helicity::Plus => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn code(self) -> usize {
        match self {
            Color::Red => 0,
            Color::Green => 1,
            Color::Blue => 2,
        }
    }

    pub fn from_code(code: usize) -> Option<Self> {
        match code {
            0 => Some(Color::Red),
            1 => Some(Color::Green),
            2 => Some(Color::Blue),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Color::Red => "Red",
            Color::Green => "Green",
            Color::Blue => "Blue",
        };
        f.write_str(s)
    }
}

/// User-facing lattice parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Sites per half transverse axis (`2·n_perp` sites per axis).
    pub n_perp: usize,
    /// Transverse half-extent, GeV⁻¹.
    pub l_perp: f64,
    /// Number of longitudinal modes.
    pub n_par: usize,
    /// Longitudinal half-extent, GeV⁻¹.
    pub l_par: f64,
    /// Fixed longitudinal momentum (GeV); omits the p⁺ block.
    #[serde(default)]
    pub fixed_p_plus: Option<f64>,
    /// Fixed helicity (±1/2); omits the helicity block.
    #[serde(default)]
    pub fixed_helicity: Option<f64>,
}

/// Transverse/longitudinal lattice geometry with derived spacings and cutoffs.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec<T> {
    pub n_perp: usize,
    pub l_perp: T,
    pub a_r_perp: T,
    pub a_p_perp: T,
    pub n_par: usize,
    pub l_par: T,
    pub a_p_par: T,
    pub lambda_uv: T,
    pub lambda_ir: T,
    pub fixed_p_plus: Option<T>,
    pub fixed_helicity: Option<Helicity>,
}

pub fn build_lattice<T: Scalar>(config: &LatticeConfig) -> Result<LatticeSpec<T>> {
    if config.n_perp == 0 || config.n_par == 0 {
        return Err(Error::Config(format!(
            "site counts must be positive (n_perp = {}, n_par = {})",
            config.n_perp, config.n_par
        )));
    }
    if !(config.l_perp > 0.0 && config.l_perp.is_finite()) {
        return Err(Error::Config(format!("l_perp must be positive, got {}", config.l_perp)));
    }
    if !(config.l_par > 0.0 && config.l_par.is_finite()) {
        return Err(Error::Config(format!("l_par must be positive, got {}", config.l_par)));
    }
    if let Some(p) = config.fixed_p_plus {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Config(format!("fixed p⁺ must be positive, got {p}")));
        }
        if config.n_par != 1 {
            return Err(Error::Config(
                "a fixed p⁺ requires a single longitudinal mode (n_par = 1)".into(),
            ));
        }
    }
    let fixed_helicity = config.fixed_helicity.map(Helicity::from_half).transpose()?;

    let pi = T::PI();
    let n = T::from_usize_lossy(config.n_perp);
    let l_perp = T::lit(config.l_perp);
    let l_par = T::lit(config.l_par);
    Ok(LatticeSpec {
        n_perp: config.n_perp,
        l_perp,
        a_r_perp: l_perp / n,
        a_p_perp: pi / l_perp,
        n_par: config.n_par,
        l_par,
        a_p_par: pi / l_par,
        lambda_uv: pi * n / l_perp,
        lambda_ir: pi / l_perp,
        fixed_p_plus: config.fixed_p_plus.map(T::lit),
        fixed_helicity,
    })
}

impl<T: Scalar> LatticeSpec<T> {
    pub fn sites_per_axis(&self) -> usize {
        2 * self.n_perp
    }

    pub fn min_site(&self) -> i64 {
        -(self.n_perp as i64)
    }

    pub fn max_site(&self) -> i64 {
        self.n_perp as i64 - 1
    }

    fn check_site(&self, site: i64) -> Result<()> {
        if site < self.min_site() || site > self.max_site() {
            return Err(Error::SiteOutOfBounds { site, min: self.min_site(), max: self.max_site() });
        }
        Ok(())
    }

    /// Longitudinal momentum of the `mode`-th site (`mode = ⌈q⁺⌉`, 1-based).
    pub fn p_plus(&self, mode: usize) -> T {
        match self.fixed_p_plus {
            Some(p) => p,
            None => (T::from_usize_lossy(mode) - T::lit(0.5)) * self.a_p_par,
        }
    }

    /// Sum of squared transverse momenta at sites `(q1, q2)`.
    pub fn p_perp_sq(&self, q1: i64, q2: i64) -> T {
        let a = self.a_p_perp;
        let q1 = T::lit(q1 as f64);
        let q2 = T::lit(q2 as f64);
        (q1 * q1 + q2 * q2) * a * a
    }
}

/// `p = q · a_p⊥`
pub fn site_to_momentum<T: Scalar>(q: i64, spec: &LatticeSpec<T>) -> Result<T> {
    spec.check_site(q)?;
    Ok(T::lit(q as f64) * spec.a_p_perp)
}

/// `x = n · a_r⊥`
pub fn site_to_coordinate<T: Scalar>(n: i64, spec: &LatticeSpec<T>) -> Result<T> {
    spec.check_site(n)?;
    Ok(T::lit(n as f64) * spec.a_r_perp)
}

/// Physical labels of one basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    /// `⌈q⁺⌉`, i.e. the 1-based longitudinal mode (q⁺ = mode − 1/2).
    pub p_plus_mode: usize,
    pub q1: i64,
    pub q2: i64,
    pub helicity: Helicity,
    pub color: Color,
}

impl BasisLabel {
    /// Label with the transverse sites and color set and the remaining
    /// degrees of freedom taken from the layout's fixed values.
    pub fn transverse(layout: &EncodingLayout, q1: i64, q2: i64, color: Color) -> Self {
        BasisLabel {
            p_plus_mode: 1,
            q1,
            q2,
            helicity: layout.fixed_helicity.unwrap_or(Helicity::Plus),
            color,
        }
    }

    pub fn q_plus(&self) -> f64 {
        self.p_plus_mode as f64 - 0.5
    }
}

/// Register layout of the system: block widths, in register order, plus the
/// values of omitted (fixed) degrees of freedom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingLayout {
    pub n_perp: usize,
    pub n_par: usize,
    pub p_plus_bits: usize,
    pub site_bits: usize,
    pub helicity_bits: usize,
    pub color_bits: usize,
    pub p_plus_omitted: bool,
    pub fixed_helicity: Option<Helicity>,
}

pub const COLOR_BITS: usize = 2;

impl EncodingLayout {
    pub fn from_spec<T: Scalar>(spec: &LatticeSpec<T>) -> Self {
        let p_plus_omitted = spec.fixed_p_plus.is_some();
        EncodingLayout {
            n_perp: spec.n_perp,
            n_par: spec.n_par,
            p_plus_bits: if p_plus_omitted { 0 } else { ceil_log2(spec.n_par) },
            site_bits: ceil_log2(2 * spec.n_perp),
            helicity_bits: if spec.fixed_helicity.is_some() { 0 } else { 1 },
            color_bits: COLOR_BITS,
            p_plus_omitted,
            fixed_helicity: spec.fixed_helicity,
        }
    }

    pub fn total_bits(&self) -> usize {
        self.p_plus_bits + 2 * self.site_bits + self.helicity_bits + self.color_bits
    }

    pub fn dim(&self) -> usize {
        1 << self.total_bits()
    }

    pub fn color_block(&self) -> Block {
        Block::new(0, self.color_bits)
    }

    pub fn helicity_block(&self) -> Block {
        Block::new(self.color_bits, self.helicity_bits)
    }

    pub fn p2_block(&self) -> Block {
        Block::new(self.color_bits + self.helicity_bits, self.site_bits)
    }

    pub fn p1_block(&self) -> Block {
        Block::new(self.color_bits + self.helicity_bits + self.site_bits, self.site_bits)
    }

    pub fn p_plus_block(&self) -> Block {
        Block::new(self.color_bits + self.helicity_bits + 2 * self.site_bits, self.p_plus_bits)
    }

    /// The two transverse blocks, conjugated by the shifted Fourier transform.
    pub fn transverse_blocks(&self) -> [Block; 2] {
        [self.p1_block(), self.p2_block()]
    }

    fn site_code(&self, site: i64) -> Result<usize> {
        let n = self.n_perp as i64;
        if site < -n || site > n - 1 {
            return Err(Error::SiteOutOfBounds { site, min: -n, max: n - 1 });
        }
        Ok((site + n) as usize)
    }

    fn code_site(&self, code: usize) -> Result<i64> {
        if code >= 2 * self.n_perp {
            return Err(Error::Encoding(format!(
                "transverse code {code} exceeds {} sites",
                2 * self.n_perp
            )));
        }
        Ok(code as i64 - self.n_perp as i64)
    }

    /// Register index of a label (bit 0 is the last character of the string).
    pub fn index_of(&self, label: &BasisLabel) -> Result<usize> {
        if label.p_plus_mode == 0 || label.p_plus_mode > self.n_par {
            return Err(Error::Encoding(format!(
                "longitudinal mode {} outside [1, {}]",
                label.p_plus_mode, self.n_par
            )));
        }
        if self.p_plus_omitted && label.p_plus_mode != 1 {
            return Err(Error::Encoding("p⁺ is fixed; mode must be 1".into()));
        }
        if let Some(h) = self.fixed_helicity {
            if label.helicity != h {
                return Err(Error::Encoding(format!("helicity is fixed to {}", h.value())));
            }
        }
        let mut index = 0usize;
        index = self.p_plus_block().insert(index, label.p_plus_mode - 1);
        index = self.p1_block().insert(index, self.site_code(label.q1)?);
        index = self.p2_block().insert(index, self.site_code(label.q2)?);
        if self.helicity_bits > 0 {
            index = self.helicity_block().insert(index, label.helicity.bit());
        }
        index = self.color_block().insert(index, label.color.code());
        Ok(index)
    }

    pub fn label_of(&self, index: usize) -> Result<BasisLabel> {
        if index >= self.dim() {
            return Err(Error::Encoding(format!("index {index} exceeds register dimension")));
        }
        let color_code = self.color_block().extract(index);
        let color = Color::from_code(color_code)
            .ok_or_else(|| Error::UnusedColorCode(self.render(index)))?;
        let p_plus_mode = self.p_plus_block().extract(index) + 1;
        if p_plus_mode > self.n_par {
            return Err(Error::Encoding(format!("longitudinal code {} unused", p_plus_mode - 1)));
        }
        let helicity = match self.fixed_helicity {
            Some(h) => h,
            None if self.helicity_block().extract(index) == 1 => Helicity::Plus,
            None => Helicity::Minus,
        };
        Ok(BasisLabel {
            p_plus_mode,
            q1: self.code_site(self.p1_block().extract(index))?,
            q2: self.code_site(self.p2_block().extract(index))?,
            helicity,
            color,
        })
    }

    /// Bitstring of a register index, most significant bit first.
    pub fn render(&self, index: usize) -> String {
        let n = self.total_bits();
        (0..n).rev().map(|b| if (index >> b) & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn parse(&self, bits: &str) -> Result<usize> {
        if bits.len() != self.total_bits() {
            return Err(Error::WidthMismatch { expected: self.total_bits(), found: bits.len() });
        }
        bits.chars().try_fold(0usize, |acc, ch| match ch {
            '0' => Ok(acc << 1),
            '1' => Ok((acc << 1) | 1),
            other => Err(Error::Encoding(format!("invalid bit character {other:?}"))),
        })
    }
}

pub fn encode_basis(label: &BasisLabel, layout: &EncodingLayout) -> Result<String> {
    Ok(layout.render(layout.index_of(label)?))
}

pub fn decode_basis(bits: &str, layout: &EncodingLayout) -> Result<BasisLabel> {
    let index = layout.parse(bits)?;
    if layout.color_block().extract(index) == 3 {
        return Err(Error::UnusedColorCode(bits.to_string()));
    }
    layout.label_of(index)
}

/// System qubit count of a layout (omitted blocks excluded).
pub fn qubit_count(layout: &EncodingLayout) -> usize {
    layout.total_bits()
}

/// Qubits needed with every block present: `2⌈log₂2N⊥⌉ + ⌈log₂N∥⌉ + 3`.
pub fn full_qubit_count(n_perp: usize, n_par: usize) -> usize {
    2 * ceil_log2(2 * n_perp) + ceil_log2(n_par) + 3
}

/// Every valid label of a layout, in register order.
pub fn all_labels(layout: &EncodingLayout) -> Vec<(usize, BasisLabel)> {
    (0..layout.dim()).filter_map(|i| layout.label_of(i).ok().map(|l| (i, l))).collect()
}
