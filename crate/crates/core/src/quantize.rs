//! Fixed-point conversion of real-valued vectors.
//!
//! Both sides of the feasibility inequality are homogeneous of degree two in
//! the data, so multiplying every coordinate by the same scale leaves the
//! feasible family unchanged. Rounding to integers is the only approximation;
//! [`real_check`] re-evaluates a subset on the original data to expose it.

use crate::error::{Error, Result};
use crate::format::RealInstance;
use crate::instance::{Alpha, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    /// Round half to even.
    #[default]
    NearestEven,
}

/// Multiply by `10^decimals`, then round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizationSpec {
    decimals: u32,
    pub rounding: Rounding,
}

impl Default for QuantizationSpec {
    /// Two decimal digits (scale 100).
    fn default() -> Self {
        Self {
            decimals: 2,
            rounding: Rounding::NearestEven,
        }
    }
}

impl QuantizationSpec {
    /// `scale` must be a power of ten.
    pub fn new(scale: u64) -> Result<Self> {
        let mut decimals = 0;
        let mut s = scale;
        while s > 1 && s.is_multiple_of(10) {
            s /= 10;
            decimals += 1;
        }
        if s != 1 {
            return Err(Error::InvalidSpec(format!("scale {scale} is not a power of ten")));
        }
        Ok(Self {
            decimals,
            rounding: Rounding::NearestEven,
        })
    }

    pub fn scale(&self) -> u64 {
        10u64.pow(self.decimals)
    }

    /// `round(scale * x)` computed on the shortest decimal representation of
    /// `x`, so ties are decided on the decimal value that was written rather
    /// than on its binary approximation.
    pub fn quantize_value(&self, x: f64) -> Result<i64> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let overflow = || Error::Overflow(format!("{x} at scale {}", self.scale()));
        // `{:e}` yields the shortest round-trip digits, e.g. "-1.5e-1".
        let repr = format!("{x:e}");
        let (mantissa, exp) = repr.split_once('e').expect("exponent form");
        let exp: i32 = exp.parse().expect("integer exponent");
        let negative = mantissa.starts_with('-');
        let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
        let frac_len = mantissa.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
        let m: i128 = digits.parse().map_err(|_| overflow())?;

        let shift = exp - frac_len + self.decimals as i32;
        let magnitude = if shift >= 0 {
            10i128
                .checked_pow(shift as u32)
                .and_then(|p| m.checked_mul(p))
                .ok_or_else(overflow)?
        } else if -shift > 36 {
            0
        } else {
            let div = 10i128.pow((-shift) as u32);
            let (q, r) = (m / div, m % div);
            match (2 * r).cmp(&div) {
                std::cmp::Ordering::Less => q,
                std::cmp::Ordering::Greater => q + 1,
                std::cmp::Ordering::Equal => q + (q & 1),
            }
        };
        let signed = if negative { -magnitude } else { magnitude };
        i64::try_from(signed).map_err(|_| overflow())
    }
}

pub fn quantize(real_vectors: &[Vec<f64>], alpha: Alpha, spec: QuantizationSpec) -> Result<Instance> {
    let vectors = real_vectors
        .iter()
        .map(|v| v.iter().map(|&x| spec.quantize_value(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Instance::new(vectors, alpha, format!("quantized scale={} rounding=nearest-even", spec.scale()))
}

/// Quantizes a parsed real instance, keeping its provenance in `meta`.
pub fn quantize_real(real: &RealInstance, spec: QuantizationSpec) -> Result<Instance> {
    let inst = quantize(&real.vectors, real.alpha, spec)?;
    let meta = if real.meta.is_empty() {
        inst.meta().to_string()
    } else {
        format!("{} {}", real.meta, inst.meta())
    };
    Ok(inst.with_meta(meta))
}

/// Feasibility of a subset re-evaluated in floating point on real data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealCheck {
    /// `||sum_C y||^2 / |C|`
    pub lhs: f64,
    /// `alpha ||sum_Y y||^2 / N`
    pub rhs: f64,
    /// `rhs - lhs`; negative means the subset violates the bound on real data.
    pub slack: f64,
    /// `slack / max(|rhs|, f64::MIN_POSITIVE)`
    pub relative_slack: f64,
}

impl RealCheck {
    pub fn feasible(&self) -> bool {
        self.slack >= 0.0
    }
}

pub fn real_check(real_vectors: &[Vec<f64>], alpha: Alpha, indices: &[usize]) -> Result<RealCheck> {
    if indices.is_empty() {
        return Err(Error::EmptySubset);
    }
    let dim = real_vectors.first().map_or(0, Vec::len);
    let mut total = vec![0.0f64; dim];
    for v in real_vectors {
        for (t, x) in total.iter_mut().zip(v) {
            *t += x;
        }
    }
    let mut sub = vec![0.0f64; dim];
    for &i in indices {
        let v = real_vectors.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: real_vectors.len(),
        })?;
        for (s, x) in sub.iter_mut().zip(v) {
            *s += x;
        }
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let lhs = norm(&sub) / indices.len() as f64;
    let rhs = alpha.to_f64() * norm(&total) / real_vectors.len() as f64;
    let slack = rhs - lhs;
    Ok(RealCheck {
        lhs,
        rhs,
        slack,
        relative_slack: slack / rhs.abs().max(f64::MIN_POSITIVE),
    })
}
