//! Nonnegative signals and observation vectors.
//!
//! A [`Signal`] holds the unknown `x` of length `m + 1`; [`Observations`]
//! holds the data `y` of length `2m + 1` together with the constant
//! `c = sqrt(sum y)`, which every iterate of the solver sums to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_entries(values: &[f64], what: &str) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::data(format!("{what}[{i}] is not finite")));
        }
        if v < 0.0 {
            return Err(Error::data(format!("{what}[{i}] = {v} is negative")));
        }
    }
    Ok(())
}

/// A nonnegative vector `x = (x_0, ..., x_m)`.
///
/// Indices outside `0..=m` read as zero through [`Signal::at`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Signal {
    values: Vec<f64>,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::data("x must have at least one entry"));
        }
        check_entries(&values, "x")?;
        Ok(Signal { values })
    }

    /// Constant signal with every entry equal to `value`.
    pub fn constant(m: usize, value: f64) -> Result<Self> {
        Signal::new(vec![value; m + 1])
    }

    /// Half-support size: the signal has `m + 1` entries.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Entry `i`, or zero when `i` is out of range (including negative).
    pub fn at(&self, i: isize) -> f64 {
        if i < 0 {
            0.0
        } else {
            self.values.get(i as usize).copied().unwrap_or(0.0)
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// Multiplies every entry by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Signal::new(self.values.iter().map(|v| v * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for Signal {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Signal::new(values)
    }
}

impl From<Signal> for Vec<f64> {
    fn from(s: Signal) -> Vec<f64> {
        s.values
    }
}

impl std::ops::Index<usize> for Signal {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Data vector `y` of odd length `2m + 1` with a positive total.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    values: Vec<f64>,
    c: f64,
}

impl Observations {
    /// Builds observations from a vector of odd length.
    ///
    /// Even-length data must go through [`pad_to_odd`] first.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::data("y must not be empty"));
        }
        if values.len().is_multiple_of(2) {
            return Err(Error::usage(format!(
                "y must have odd length 2m+1, got {}",
                values.len()
            )));
        }
        check_entries(&values, "y")?;
        let total: f64 = values.iter().sum();
        if total <= 0.0 {
            return Err(Error::data("y must not be all zero"));
        }
        Ok(Observations {
            values,
            c: total.sqrt(),
        })
    }

    pub fn m(&self) -> usize {
        (self.values.len() - 1) / 2
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// `c = sqrt(sum y)`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub(crate) fn check_signal(&self, x: &Signal) -> Result<()> {
        if x.m() != self.m() {
            return Err(Error::usage(format!(
                "dimension mismatch: y has m = {} (length {}) but x has m = {} (length {})",
                self.m(),
                self.len(),
                x.m(),
                x.len()
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for Observations {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Turns raw data of any length into [`Observations`].
///
/// Odd-length input is taken as is. Even-length input of length `n + 1`
/// gets a single trailing zero so that it reads as `y_0..y_{2m}` with
/// `2m = n + 1`. Returns the observations and whether padding happened.
pub fn pad_to_odd(raw: &[f64]) -> Result<(Observations, bool)> {
    if raw.is_empty() {
        return Err(Error::data("y must not be empty"));
    }
    let mut values = raw.to_vec();
    let padded = values.len().is_multiple_of(2);
    if padded {
        values.push(0.0);
    }
    Ok((Observations::new(values)?, padded))
}

/// Rescales `y` to total mass one. Returns the normalized data and the
/// original total.
///
/// If `x` minimizes `I(y || x*x)` then `x / sqrt(scale)` minimizes the
/// normalized problem, and the solver trajectories correspond in the same way.
pub fn normalize_probability(y: &Observations) -> (Observations, f64) {
    let scale = y.total();
    let values = y.as_slice().iter().map(|v| v / scale).collect();
    let normalized = Observations::new(values).expect("positive total survives division");
    (normalized, scale)
}
