//! Standard normal kernels.
//!
//! The cdf is evaluated as `0.5 * erfc(-z / sqrt(2))` using the msun `erfc`
//! (via `libm`), which is accurate to about one ulp across the real line, so
//! both tails keep full relative precision down to `Φ(-37) ~ 1e-300`.
//!
//! The quantile starts from Acklam's rational approximation (relative error
//! below 1.15e-9) and applies one Halley step against the cdf. Measured over
//! `p ∈ [1e-8, 1 - 1e-8]` the round trip `|Φ(Φ⁻¹(p)) - p|` stays below 1e-15.

use crate::error::{Error, Result};

pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(format!("probability must lie in [0, 1], got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Probability::new(v)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Unchecked pdf; `NaN` in, `NaN` out.
#[inline]
pub fn pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Unchecked cdf. Infinite arguments map to 0 or 1.
#[inline]
pub fn cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Unchecked quantile for `p` strictly inside `(0, 1)`. Returns `NaN` otherwise.
pub fn quantile(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return f64::NAN;
    }
    let x = acklam(p);
    // Halley step on Φ(x) - p; the lower tail is handled through symmetry so
    // the residual keeps relative precision.
    let e = if x <= 0.0 { cdf(x) - p } else { (1.0 - p) - cdf(-x) };
    let u = e * SQRT_2PI * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

fn finite(z: f64, what: &str) -> Result<f64> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::domain(format!("{what} requires a finite argument, got {z}")))
    }
}

/// Standard normal density φ(z).
pub fn std_normal_pdf(z: f64) -> Result<f64> {
    finite(z, "std_normal_pdf").map(pdf)
}

/// Standard normal distribution function Φ(z).
pub fn std_normal_cdf(z: f64) -> Result<Probability> {
    finite(z, "std_normal_cdf").map(|z| Probability(cdf(z)))
}

/// Φ⁻¹(p) for `p` strictly inside `(0, 1)`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(quantile(p))
    } else {
        Err(Error::domain(format!(
            "std_normal_quantile requires p in the open interval (0, 1), got {p}"
        )))
    }
}
