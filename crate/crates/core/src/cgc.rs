//! McLerran–Venugopalan color charges and the screened Poisson solve for the
//! `A⁻` component of the nuclear color field on the transverse lattice.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::scalar::{Complex, Scalar};

pub const N_COLORS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub g: f64,
    /// `g²μ`, GeV^{3/2}.
    pub g2mu: f64,
    /// Gluon mass, GeV.
    pub m_g: f64,
    /// Longitudinal extent of the medium, GeV⁻¹.
    pub l_eta: f64,
    #[serde(default = "default_n_eta")]
    pub n_eta: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_n_eta() -> usize {
    1
}

impl FieldParams {
    /// Parameters of the demo medium (g = 1, g²μ = 0.407294 GeV^{3/2},
    /// L_η = 50 GeV⁻¹, m_g = 0.1 GeV).
    pub fn demo() -> Self {
        FieldParams { g: 1.0, g2mu: 0.407294, m_g: 0.1, l_eta: 50.0, n_eta: 1, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) {
            return Err(Error::Config(format!("g must be positive, got {}", self.g)));
        }
        if !(self.g2mu >= 0.0) {
            return Err(Error::Config(format!("g²μ must be non-negative, got {}", self.g2mu)));
        }
        if !(self.m_g >= 0.0) {
            return Err(Error::Config(format!("m_g must be non-negative, got {}", self.m_g)));
        }
        if !(self.l_eta > 0.0) {
            return Err(Error::Config(format!("L_η must be positive, got {}", self.l_eta)));
        }
        if self.n_eta == 0 {
            return Err(Error::Config("N_η must be at least 1".into()));
        }
        Ok(())
    }

    /// `g²μ² = (g²μ)²/g²`.
    pub fn g2mu2(&self) -> f64 {
        self.g2mu * self.g2mu / (self.g * self.g)
    }

    /// Per-site, per-slice variance of `ρ_a`: `g²μ²·N_η/(L_η·a_r⊥²)`.
    pub fn site_variance(&self, a_r_perp: f64) -> f64 {
        self.g2mu2() * self.n_eta as f64 / (self.l_eta * a_r_perp * a_r_perp)
    }
}

/// `ρ_a` on each x⁺ slice; flat layout `[a][slice][code1][code2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeDensity<T> {
    pub n_perp: usize,
    pub n_eta: usize,
    pub rho: Vec<T>,
}

impl<T: Scalar> ChargeDensity<T> {
    fn sites(&self) -> usize {
        4 * self.n_perp * self.n_perp
    }

    /// Site values of color `a ∈ 1..=8` on one slice.
    pub fn slice(&self, a: usize, slice: usize) -> &[T] {
        let s = self.sites();
        let start = ((a - 1) * self.n_eta + slice) * s;
        &self.rho[start..start + s]
    }
}

/// `A⁻_a` on the transverse lattice, `a_minus[a − 1][code1·2N⊥ + code2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorField<T> {
    pub n_perp: usize,
    pub a_minus: Vec<Vec<T>>,
}

impl<T: Scalar> ColorField<T> {
    pub fn zeros(n_perp: usize) -> Self {
        ColorField { n_perp, a_minus: vec![vec![T::zero(); 4 * n_perp * n_perp]; N_COLORS] }
    }
}

pub fn sample_charge_density<T: Scalar>(params: &FieldParams, spec: &LatticeSpec<T>) -> Result<ChargeDensity<T>> {
    params.validate()?;
    let sites = 4 * spec.n_perp * spec.n_perp;
    let sd = params.site_variance(spec.a_r_perp.as_f64()).sqrt();
    let normal = Normal::new(0.0, sd).map_err(|e| Error::Config(e.to_string()))?;
    let streams = N_COLORS * params.n_eta;
    let rho: Vec<T> = (0..streams)
        .into_par_iter()
        .flat_map_iter(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(stream as u64);
            (0..sites).map(move |_| T::lit(normal.sample(&mut rng))).collect::<Vec<_>>()
        })
        .collect();
    Ok(ChargeDensity { n_perp: spec.n_perp, n_eta: params.n_eta, rho })
}

/// Lattice frequency of FFT bin `k` on `2N` sites, in `[−N, N−1]`.
fn frequency(k: usize, n: usize) -> i64 {
    if k < n {
        k as i64
    } else {
        k as i64 - 2 * n as i64
    }
}

fn fft_2d<T: Scalar>(data: &mut [Complex<T>], side: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft = if inverse { planner.plan_fft_inverse(side) } else { planner.plan_fft_forward(side) };
    fft.process(data);
    let mut column = vec![Complex::new(T::zero(), T::zero()); side];
    for col in 0..side {
        for r in 0..side {
            column[r] = data[r * side + col];
        }
        fft.process(&mut column);
        for r in 0..side {
            data[r * side + col] = column[r];
        }
    }
}

/// Solves `(m_g² − ∇⊥²)A = ρ` for one color and slice. The Laplacian is
/// spectral on the lattice momenta `p = q·a_p⊥`; modes with
/// `q1² + q2² > N⊥²` are set to zero.
pub fn solve_slice<T: Scalar>(rho: &[T], m_g: T, spec: &LatticeSpec<T>) -> Result<Vec<T>> {
    let n = spec.n_perp;
    let side = 2 * n;
    if rho.len() != side * side {
        return Err(Error::LatticeMismatch(format!("{} charges for a {side}×{side} lattice", rho.len())));
    }
    let mut data: Vec<Complex<T>> = rho.iter().map(|r| Complex::new(*r, T::zero())).collect();
    fft_2d(&mut data, side, false);
    let a2 = spec.a_p_perp * spec.a_p_perp;
    let m2 = m_g * m_g;
    let cut = (n * n) as i64;
    let scale = T::one() / T::from_usize_lossy(side * side);
    for k1 in 0..side {
        for k2 in 0..side {
            let (q1, q2) = (frequency(k1, n), frequency(k2, n));
            let q2sum = q1 * q1 + q2 * q2;
            let idx = k1 * side + k2;
            if q2sum > cut {
                data[idx] = Complex::new(T::zero(), T::zero());
                continue;
            }
            let denom = m2 + a2 * T::lit(q2sum as f64);
            if denom == T::zero() {
                if data[idx].norm() > T::epsilon() * T::from_usize_lossy(side * side) {
                    return Err(Error::SingularMode(data[idx].norm().as_f64()));
                }
                data[idx] = Complex::new(T::zero(), T::zero());
                continue;
            }
            data[idx] = data[idx] * (scale / denom);
        }
    }
    fft_2d(&mut data, side, true);
    Ok(data.into_iter().map(|z| z.re).collect())
}

/// Per-slice fields, one [`ColorField`] for each x⁺ slice.
pub fn solve_poisson<T: Scalar>(
    rho: &ChargeDensity<T>,
    params: &FieldParams,
    spec: &LatticeSpec<T>,
) -> Result<Vec<ColorField<T>>> {
    if rho.n_perp != spec.n_perp || rho.rho.len() != N_COLORS * rho.n_eta * 4 * spec.n_perp * spec.n_perp {
        return Err(Error::LatticeMismatch("charge density shape does not match the lattice".into()));
    }
    let m_g = T::lit(params.m_g);
    (0..rho.n_eta)
        .into_par_iter()
        .map(|slice| {
            let a_minus = (1..=N_COLORS)
                .map(|a| solve_slice(rho.slice(a, slice), m_g, spec))
                .collect::<Result<Vec<_>>>()?;
            Ok(ColorField { n_perp: spec.n_perp, a_minus })
        })
        .collect()
}

/// x⁺ average of the slice fields.
pub fn accumulate_field<T: Scalar>(slices: &[ColorField<T>]) -> Result<ColorField<T>> {
    let first = slices.first().ok_or(Error::Empty("no field slices"))?;
    let mut out = ColorField::zeros(first.n_perp);
    for f in slices {
        if f.n_perp != first.n_perp {
            return Err(Error::LatticeMismatch("slice fields on different lattices".into()));
        }
        for (acc, comp) in out.a_minus.iter_mut().zip(&f.a_minus) {
            for (x, v) in acc.iter_mut().zip(comp) {
                *x += *v;
            }
        }
    }
    let inv = T::one() / T::from_usize_lossy(slices.len());
    out.a_minus.iter_mut().flatten().for_each(|x| *x *= inv);
    Ok(out)
}

/// `Q_s² = (g²μ)²·L_η/(2π²)`, GeV².
pub fn saturation_scale(params: &FieldParams) -> f64 {
    params.g2mu * params.g2mu * params.l_eta / (2.0 * std::f64::consts::PI * std::f64::consts::PI)
}

/// Sample, solve and average in one go.
pub fn generate_field<T: Scalar>(params: &FieldParams, spec: &LatticeSpec<T>) -> Result<ColorField<T>> {
    let rho = sample_charge_density(params, spec)?;
    accumulate_field(&solve_poisson(&rho, params, spec)?)
}

/// Writes `a,slice,n1,n2,value` rows for a charge density.
pub fn write_density_csv<T: Scalar, W: Write>(rho: &ChargeDensity<T>, mut out: W) -> Result<()> {
    writeln!(out, "a,slice,n1,n2,value")?;
    let side = 2 * rho.n_perp;
    let n = rho.n_perp as i64;
    for a in 1..=N_COLORS {
        for slice in 0..rho.n_eta {
            for (i, v) in rho.slice(a, slice).iter().enumerate() {
                let (n1, n2) = ((i / side) as i64 - n, (i % side) as i64 - n);
                writeln!(out, "{a},{slice},{n1},{n2},{:.11e}", v.as_f64())?;
            }
        }
    }
    Ok(())
}

/// Writes `a,slice,n1,n2,value` rows for a list of slice fields.
pub fn write_fields_csv<T: Scalar, W: Write>(fields: &[ColorField<T>], mut out: W) -> Result<()> {
    writeln!(out, "a,slice,n1,n2,value")?;
    for (slice, f) in fields.iter().enumerate() {
        let side = 2 * f.n_perp;
        let n = f.n_perp as i64;
        for (ai, comp) in f.a_minus.iter().enumerate() {
            for (i, v) in comp.iter().enumerate() {
                let (n1, n2) = ((i / side) as i64 - n, (i % side) as i64 - n);
                writeln!(out, "{},{slice},{n1},{n2},{:.11e}", ai + 1, v.as_f64())?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, LatticeConfig};
    use proptest::prelude::*;
    use rand::Rng;

    fn spec(n_perp: usize) -> LatticeSpec<f64> {
        build_lattice(&LatticeConfig {
            n_perp,
            l_perp: 5.0,
            n_par: 1,
            l_par: 1.0,
            fixed_p_plus: None,
            fixed_helicity: None,
        })
        .unwrap()
    }

    /// Applies `(m² − ∇²)` and the UV filter with explicit DFT sums.
    fn forward_operator(a: &[f64], m: f64, spec: &LatticeSpec<f64>, filter_only: bool) -> Vec<f64> {
        let n = spec.n_perp as i64;
        let side = 2 * n;
        let tau = 2.0 * std::f64::consts::PI;
        let mut hat = vec![Complex::new(0.0, 0.0); (side * side) as usize];
        for q1 in -n..n {
            for q2 in -n..n {
                let mut s = Complex::new(0.0, 0.0);
                for n1 in -n..n {
                    for n2 in -n..n {
                        let v = a[((n1 + n) * side + n2 + n) as usize];
                        s += Complex::from_polar(v, -tau * (q1 * n1 + q2 * n2) as f64 / side as f64);
                    }
                }
                let k2 = (q1 * q1 + q2 * q2) as f64 * spec.a_p_perp * spec.a_p_perp;
                let keep = q1 * q1 + q2 * q2 <= n * n;
                let factor = if !keep { 0.0 } else if filter_only { 1.0 } else { m * m + k2 };
                hat[((q1 + n) * side + q2 + n) as usize] = s * factor;
            }
        }
        let mut out = vec![0.0; (side * side) as usize];
        for n1 in -n..n {
            for n2 in -n..n {
                let mut s = Complex::new(0.0, 0.0);
                for q1 in -n..n {
                    for q2 in -n..n {
                        let h = hat[((q1 + n) * side + q2 + n) as usize];
                        s += h * Complex::from_polar(1.0, tau * (q1 * n1 + q2 * n2) as f64 / side as f64);
                    }
                }
                out[((n1 + n) * side + n2 + n) as usize] = s.re / (side * side) as f64;
            }
        }
        out
    }

    #[test]
    fn zero_charge_gives_zero_field() {
        let params = FieldParams { g2mu: 0.0, ..FieldParams::demo() };
        let s = spec(2);
        let rho = sample_charge_density::<f64>(&params, &s).unwrap();
        assert!(rho.rho.iter().all(|x| *x == 0.0));
        let f = generate_field::<f64>(&params, &s).unwrap();
        assert!(f.a_minus.iter().flatten().all(|x| *x == 0.0));
    }

    #[test]
    fn uniform_charge_gives_uniform_field() {
        let s = spec(2);
        let a = solve_slice(&[0.7; 16], 0.1, &s).unwrap();
        for v in a {
            assert!((v - 0.7 / 0.01).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_zero_mode() {
        let s = spec(2);
        assert!(matches!(solve_slice(&[0.7; 16], 0.0, &s), Err(Error::SingularMode(_))));
        // neutral charge is fine without a mass
        let mut rho = [0.0; 16];
        rho[0] = 1.0;
        rho[5] = -1.0;
        assert!(solve_slice(&rho, 0.0, &s).is_ok());
    }

    #[test]
    fn forward_operator_roundtrip() {
        for n_perp in [1usize, 2, 4] {
            let s = spec(n_perp);
            let mut rng = ChaCha8Rng::seed_from_u64(n_perp as u64);
            let rho: Vec<f64> = (0..4 * n_perp * n_perp).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = solve_slice(&rho, 0.1, &s).unwrap();
            let back = forward_operator(&a, 0.1, &s, false);
            let filtered = forward_operator(&rho, 0.1, &s, true);
            let scale = filtered.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (x, y) in back.iter().zip(&filtered) {
                assert!((x - y).abs() < 1e-10 * scale, "N = {n_perp}");
            }
        }
    }

    #[test]
    fn uv_modes_vanish_in_solution() {
        let s = spec(4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = solve_slice(&rho, 0.1, &s).unwrap();
        let filtered = forward_operator(&a, 0.1, &s, true);
        for (x, y) in a.iter().zip(&filtered) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn accumulate_examples() {
        let s = spec(2);
        let params = FieldParams { n_eta: 4, seed: 5, ..FieldParams::demo() };
        let rho = sample_charge_density::<f64>(&params, &s).unwrap();
        let slices = solve_poisson(&rho, &params, &s).unwrap();
        assert_eq!(slices.len(), 4);
        let avg = accumulate_field(&slices).unwrap();
        for a in 0..N_COLORS {
            for i in 0..16 {
                let direct = slices.iter().map(|f| f.a_minus[a][i]).sum::<f64>() / 4.0;
                assert!((avg.a_minus[a][i] - direct).abs() < 1e-14);
            }
        }
        let single = accumulate_field(&slices[..1]).unwrap();
        assert_eq!(single, slices[0]);
        let mut neg = slices[0].clone();
        neg.a_minus.iter_mut().flatten().for_each(|x| *x = -*x);
        let zero = accumulate_field(&[slices[0].clone(), neg]).unwrap();
        assert!(zero.a_minus.iter().flatten().all(|x| *x == 0.0));
        assert!(matches!(accumulate_field::<f64>(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn saturation_scale_examples() {
        assert!((saturation_scale(&FieldParams::demo()) - 0.4202).abs() < 1e-4);
        assert_eq!(saturation_scale(&FieldParams { g2mu: 0.0, ..FieldParams::demo() }), 0.0);
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let p = FieldParams { g2mu: 1.0, l_eta: 2.0 * pi2, ..FieldParams::demo() };
        assert!((saturation_scale(&p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn same_seed_same_density() {
        let s = spec(2);
        let params = FieldParams { n_eta: 3, seed: 42, ..FieldParams::demo() };
        let a = sample_charge_density::<f64>(&params, &s).unwrap();
        let b = sample_charge_density::<f64>(&params, &s).unwrap();
        assert_eq!(a, b);
        let c = sample_charge_density::<f64>(&FieldParams { seed: 43, ..params }, &s).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn csv_dump_shape() {
        let s = spec(1);
        let rho = sample_charge_density::<f64>(&FieldParams::demo(), &s).unwrap();
        let mut out = Vec::new();
        write_density_csv(&rho, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1 + 8 * 4);
        assert!(text.lines().nth(1).unwrap().starts_with("1,0,-1,-1,"));
    }

    proptest! {
        #[test]
        fn poisson_is_linear(seed in any::<u64>(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
            let s = spec(2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r1: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r2: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mix: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| alpha * a + beta * b).collect();
            let a1 = solve_slice(&r1, 0.1, &s).unwrap();
            let a2 = solve_slice(&r2, 0.1, &s).unwrap();
            let am = solve_slice(&mix, 0.1, &s).unwrap();
            let scale = am.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for i in 0..16 {
                prop_assert!((am[i] - alpha * a1[i] - beta * a2[i]).abs() < 1e-12 * scale);
            }
        }
    }
}
