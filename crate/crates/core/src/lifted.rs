//! Lifted formulation in the space of banded matrices.
//!
//! The scalar problem `min_x I(y || x*x)` is lifted to a double
//! minimization of `I(Y || W)` over two sets of `(2m+1) x (m+1)` matrices
//! supported on `{0 <= i - j <= m}`:
//!
//! * `Y` ranges over matrices whose rows sum to the data, `sum_j Y_ij = y_i`;
//! * `W` ranges over the factorized matrices `W_ij = x_{i-j} x_j`.
//!
//! Both partial minimizations have closed forms ([`best_y`], [`best_w`]),
//! each characterized by an exact Pythagorean decomposition of the
//! divergence. Composing them gives back one step of the solver's
//! multiplicative update, which makes this module an independent oracle
//! for it.

use nalgebra::DMatrix;

use crate::divergence::i_divergence_term;
use crate::error::{Error, Result};
use crate::objective::{autoconvolve, data_ratio};
use crate::signal::{Observations, Signal};

/// Dense `(2m+1) x (m+1)` nonnegative matrix with structural zeros
/// outside the band `j <= i <= j + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    m: usize,
    // row-major, (2m+1) rows of (m+1) entries
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(m: usize) -> Self {
        BandedMatrix {
            m,
            data: vec![0.0; (2 * m + 1) * (m + 1)],
        }
    }

    /// Fills the band with `f(i, j)`; off-band entries stay zero.
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(m);
        for j in 0..=m {
            for i in j..=j + m {
                out.data[i * (m + 1) + j] = f(i, j);
            }
        }
        out
    }

    /// Builds from row-major dense rows, checking shape, band support and signs.
    pub fn from_rows(m: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != 2 * m + 1 || rows.iter().any(|r| r.len() != m + 1) {
            return Err(Error::usage(format!(
                "banded matrix for m = {m} must be {} x {}",
                2 * m + 1,
                m + 1
            )));
        }
        let mut out = Self::zeros(m);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::data(format!("entry ({i}, {j}) = {v} is not a nonnegative number")));
                }
                if !Self::in_band(m, i, j) {
                    if v != 0.0 {
                        return Err(Error::data(format!("entry ({i}, {j}) lies outside the band but is {v}")));
                    }
                    continue;
                }
                out.data[i * (m + 1) + j] = v;
            }
        }
        Ok(out)
    }

    pub fn in_band(m: usize, i: usize, j: usize) -> bool {
        j <= m && j <= i && i <= j + m
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> usize {
        2 * self.m + 1
    }

    pub fn cols(&self) -> usize {
        self.m + 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if Self::in_band(self.m, i, j) {
            self.data[i * (self.m + 1) + j]
        } else {
            0.0
        }
    }

    /// Iterates `(i, j, value)` over band positions only.
    pub fn band(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let m = self.m;
        (0..=m).flat_map(move |j| (j..=j + m).map(move |i| (i, j, self.data[i * (m + 1) + j])))
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        let row = &self.data[i * (self.m + 1)..(i + 1) * (self.m + 1)];
        row.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Square matrix `R_ij = M_{i+j, j}`.
    pub fn rectify(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m + 1, self.m + 1, |i, j| self.get(i + j, j))
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows(), self.cols(), &self.data)
    }
}

/// A member of the data-constrained set: a banded matrix with row sums `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedY {
    matrix: BandedMatrix,
    y: Observations,
}

impl LiftedY {
    /// Wraps `matrix`, taking its row sums as the observations.
    pub fn new(matrix: BandedMatrix) -> Result<Self> {
        let sums = (0..matrix.rows()).map(|i| matrix.row_sum(i)).collect();
        let y = Observations::new(sums)?;
        Ok(LiftedY { matrix, y })
    }

    /// Wraps `matrix` after checking its row sums against `y` to `1e-12 (1 + y_i)`.
    pub fn with_observations(matrix: BandedMatrix, y: Observations) -> Result<Self> {
        if matrix.m() != y.m() {
            return Err(Error::usage("lifted matrix and observations disagree on m"));
        }
        for i in 0..matrix.rows() {
            let s = matrix.row_sum(i);
            if (s - y[i]).abs() > 1e-12 * (1.0 + y[i]) {
                return Err(Error::data(format!("row {i} sums to {s}, expected {}", y[i])));
            }
        }
        Ok(LiftedY { matrix, y })
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    pub fn observations(&self) -> &Observations {
        &self.y
    }

    pub fn m(&self) -> usize {
        self.matrix.m()
    }

    /// `Yhat_j`: sum of the `j`-th subdiagonal plus sum of the `j`-th column.
    ///
    /// The diagonal entry `Y_jj` belongs to both and is counted twice.
    pub fn y_hat(&self) -> Vec<f64> {
        let m = self.m();
        (0..=m)
            .map(|j| {
                let subdiag: f64 = (0..=m).map(|i| self.matrix.get(i + j, i)).sum();
                let column: f64 = (j..=j + m).map(|i| self.matrix.get(i, j)).sum();
                subdiag + column
            })
            .collect()
    }
}

/// A member of the factorized set, `W_ij = x_{i-j} x_j` on the band.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedW {
    x: Signal,
}

impl LiftedW {
    pub fn new(x: Signal) -> Self {
        LiftedW { x }
    }

    pub fn x(&self) -> &Signal {
        &self.x
    }

    pub fn matrix(&self) -> BandedMatrix {
        let xs = self.x.as_slice();
        BandedMatrix::from_fn(self.x.m(), |i, j| xs[i - j] * xs[j])
    }
}

/// `I(M || N)` summed over band positions only.
pub fn i_divergence_matrix(lhs: &BandedMatrix, rhs: &BandedMatrix) -> Result<f64> {
    if lhs.m() != rhs.m() {
        return Err(Error::usage(format!(
            "matrix divergence: shape mismatch (m = {} vs {})",
            lhs.m(),
            rhs.m()
        )));
    }
    Ok(lhs
        .band()
        .map(|(i, j, a)| i_divergence_term(a, rhs.get(i, j)))
        .sum())
}

/// Minimizer of `I(Y || W(x))` over the data-constrained set:
/// `Y*_ij = x_{i-j} x_j y_i / (x*x)_i`.
pub fn best_y(x: &Signal, y: &Observations) -> Result<LiftedY> {
    y.check_signal(x)?;
    let conv = autoconvolve(x);
    let ratios = y
        .as_slice()
        .iter()
        .zip(&conv)
        .enumerate()
        .map(|(i, (&yi, &ci))| data_ratio(yi, ci).ok_or(Error::InfeasibleLift { row: i }))
        .collect::<Result<Vec<f64>>>()?;
    let xs = x.as_slice();
    let matrix = BandedMatrix::from_fn(x.m(), |i, j| xs[i - j] * xs[j] * ratios[i]);
    Ok(LiftedY {
        matrix,
        y: y.clone(),
    })
}

/// Minimizer of `I(Y || W)` over the factorized set:
/// `x*_j = Yhat_j / (2 sqrt(sum_i y_i))`.
pub fn best_w(lifted: &LiftedY) -> Result<Signal> {
    let total = lifted.matrix().total();
    if total <= 0.0 {
        return Err(Error::data("lifted matrix must not be all zero"));
    }
    let denom = 2.0 * lifted.observations().c();
    Signal::new(lifted.y_hat().into_iter().map(|v| v / denom).collect())
}

/// The three divergences of a Pythagorean decomposition
/// `total = first + second` and the absolute residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PythagorasReport {
    pub total: f64,
    pub first: f64,
    pub second: f64,
    /// `|total - first - second|`, or `None` when any term is infinite.
    pub residual: Option<f64>,
}

impl PythagorasReport {
    fn new(total: f64, first: f64, second: f64) -> Self {
        let residual = if total.is_finite() && first.is_finite() && second.is_finite() {
            Some((total - first - second).abs())
        } else {
            None
        };
        PythagorasReport {
            total,
            first,
            second,
            residual,
        }
    }

    /// Residual relative to `1 + total`.
    pub fn relative_residual(&self) -> Option<f64> {
        self.residual.map(|r| r / (1.0 + self.total))
    }
}

/// `I(Y || W) = I(Y || Y*) + I(Y* || W)` with `W = W(x)`, `Y* = best_y(x, y)`.
pub fn check_pythagoras_y(lifted: &LiftedY, x: &Signal) -> Result<PythagorasReport> {
    let w = LiftedW::new(x.clone()).matrix();
    let y_star = best_y(x, lifted.observations())?;
    Ok(PythagorasReport::new(
        i_divergence_matrix(lifted.matrix(), &w)?,
        i_divergence_matrix(lifted.matrix(), y_star.matrix())?,
        i_divergence_matrix(y_star.matrix(), &w)?,
    ))
}

/// `I(Y || W) = I(Y || W*) + I(W* || W)` with `W = W(x)`, `W* = W(best_w(Y))`.
pub fn check_pythagoras_w(lifted: &LiftedY, x: &Signal) -> Result<PythagorasReport> {
    if x.m() != lifted.m() {
        return Err(Error::usage("lifted matrix and x disagree on m"));
    }
    let w = LiftedW::new(x.clone()).matrix();
    let w_star = LiftedW::new(best_w(lifted)?).matrix();
    Ok(PythagorasReport::new(
        i_divergence_matrix(lifted.matrix(), &w)?,
        i_divergence_matrix(lifted.matrix(), &w_star)?,
        i_divergence_matrix(&w_star, &w)?,
    ))
}

/// Square rectification `Ybar_ij = Y_{i+j, j}`.
pub fn rectify(lifted: &LiftedY) -> DMatrix<f64> {
    lifted.matrix().rectify()
}

/// Best symmetric rank-one fit `x x^T` to a nonnegative square matrix:
/// `x_i = (colsum_i + rowsum_i) / (2 sqrt(total))`.
pub fn rank_one_x(ybar: &DMatrix<f64>) -> Result<Signal> {
    if !ybar.is_square() || ybar.nrows() == 0 {
        return Err(Error::usage("rank_one_x needs a non-empty square matrix"));
    }
    let total = ybar.sum();
    if !(total > 0.0) {
        return Err(Error::data("matrix total must be positive"));
    }
    let denom = 2.0 * total.sqrt();
    let n = ybar.nrows();
    Signal::new(
        (0..n)
            .map(|i| (ybar.column(i).sum() + ybar.row(i).sum()) / denom)
            .collect(),
    )
}
