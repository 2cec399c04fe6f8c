//! The I-divergence (generalized Kullback-Leibler divergence).

use crate::error::{Error, Result};

/// One term `u log(u/v) - u + v` with `0 log(0/v) = 0`.
///
/// Returns `+inf` when `u > 0` and `v = 0`.
#[inline]
pub fn i_divergence_term(u: f64, v: f64) -> f64 {
    if u == 0.0 {
        v
    } else if v == 0.0 {
        f64::INFINITY
    } else {
        let r = (v - u) / u;
        if r.abs() < 0.5 {
            // u (r - ln(1 + r)) avoids cancellation when v is close to u
            u * (r - r.ln_1p())
        } else {
            u * (u / v).ln() - u + v
        }
    }
}

/// `I(u || v) = sum_i u_i log(u_i / v_i) - u_i + v_i` for nonnegative vectors.
///
/// The result is `+inf` iff some `u_i > 0` meets `v_i = 0`.
pub fn i_divergence(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::usage(format!(
            "i_divergence: length mismatch ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    Ok(u
        .iter()
        .zip(v)
        .map(|(&a, &b)| i_divergence_term(a, b))
        .sum())
}
