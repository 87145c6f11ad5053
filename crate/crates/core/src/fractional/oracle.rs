//! Brute-force Riemann-Liouville integrals by adaptive Gauss-Kronrod quadrature.
//!
//! These routines never touch the nodal operators; they exist to check them.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Which side the fractional integral accumulates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `int_a^x f(s) (x - s)^{mu - 1} ds / Gamma(mu)`
    Left,
    /// `int_x^b f(s) (s - x)^{mu - 1} ds / Gamma(mu)`
    Right,
}

pub const ORACLE_TOL: f64 = 1e-10;
const MAX_DEPTH: usize = 48;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt(
    f: &mut impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let (val, err) = kronrod15(f, lo, hi);
    if err <= tol || (hi - lo).abs() < 1e-15 * (1.0 + lo.abs()) {
        return Ok(val);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergence { tol, estimate: err });
    }
    let mid = 0.5 * (lo + hi);
    Ok(adapt(f, lo, mid, 0.5 * tol, depth - 1)? + adapt(f, mid, hi, 0.5 * tol, depth - 1)?)
}

/// Adaptively integrates `f` over `[lo, hi]` to absolute tolerance `tol`.
pub fn adaptive_integral(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    adapt(&mut f, lo, hi, tol, MAX_DEPTH)
}

/// Riemann-Liouville integral of order `mu` in (0, 1) of `f` restricted to
/// `domain`, evaluated at `x`, to absolute tolerance [`ORACLE_TOL`].
///
/// The singular endpoint is removed by the substitution `|x - s| = t^{1/mu}`,
/// which turns the kernel into a constant.
pub fn oracle_frac_integral(
    f: impl Fn(f64) -> f64,
    mu: f64,
    x: f64,
    side: Side,
    domain: (f64, f64),
) -> Result<f64> {
    oracle_frac_integral_tol(f, mu, x, side, domain, ORACLE_TOL)
}

pub fn oracle_frac_integral_tol(
    f: impl Fn(f64) -> f64,
    mu: f64,
    x: f64,
    side: Side,
    domain: (f64, f64),
    tol: f64,
) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::Quadrature(format!("oracle order mu = {mu} outside (0, 1)")));
    }
    let (a, b) = domain;
    let inv = 1.0 / mu;
    let g = gamma(mu);
    // s ranges over [near, far], with near the endpoint next to x
    let (near_gap, far_gap) = match side {
        Side::Left => {
            let hi = x.min(b);
            if hi <= a {
                return Ok(0.0);
            }
            (x - hi, x - a)
        }
        Side::Right => {
            let lo = x.max(a);
            if lo >= b {
                return Ok(0.0);
            }
            (lo - x, b - x)
        }
    };
    let sign = if side == Side::Left { -1.0 } else { 1.0 };
    let t_lo = near_gap.powf(mu);
    let t_hi = far_gap.powf(mu);
    let integrand = |t: f64| f(x + sign * t.powf(inv));
    let scaled_tol = tol * mu * g;
    Ok(adaptive_integral(integrand, t_lo, t_hi, scaled_tol)? * inv / g)
}
