//! Autoconvolution, the objective `I(y || x*x)` and its derivatives.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::divergence::i_divergence;
use crate::error::{Error, Result};
use crate::signal::{Observations, Signal};

/// `(x*x)_i = sum_{j=0}^{i} x_{i-j} x_j` for `i = 0..=2m`.
pub fn autoconvolve(x: &Signal) -> Vec<f64> {
    let xs = x.as_slice();
    let n = xs.len();
    let mut out = vec![0.0; 2 * n - 1];
    for (i, &a) in xs.iter().enumerate() {
        for (j, &b) in xs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `I(y || x*x)`; `+inf` when `x*x` vanishes somewhere `y` is positive.
pub fn objective(y: &Observations, x: &Signal) -> Result<f64> {
    y.check_signal(x)?;
    i_divergence(y.as_slice(), &autoconvolve(x))
}

/// `y_k / (x*x)_k`, with `y_k = 0` giving 0 and `y_k > 0 = (x*x)_k` giving `None`.
#[inline]
pub(crate) fn data_ratio(y: f64, conv: f64) -> Option<f64> {
    if y == 0.0 {
        Some(0.0)
    } else if conv == 0.0 {
        None
    } else {
        Some(y / conv)
    }
}

/// Gradient of the objective:
/// `grad_j = 2 sum_l x_l (1 - y_{l+j} / (x*x)_{l+j})`.
///
/// Terms with `x_l = 0` vanish regardless of the ratio.
pub fn gradient(y: &Observations, x: &Signal) -> Result<Vec<f64>> {
    y.check_signal(x)?;
    let conv = autoconvolve(x);
    let (ys, xs) = (y.as_slice(), x.as_slice());
    let n = xs.len();
    let mut grad = vec![0.0; n];
    for (j, g) in grad.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (l, &xl) in xs.iter().enumerate() {
            if xl == 0.0 {
                continue;
            }
            let k = l + j;
            let r = data_ratio(ys[k], conv[k]).ok_or(Error::UndefinedGradient { index: j, k })?;
            acc += xl * (1.0 - r);
        }
        *g = 2.0 * acc;
    }
    Ok(grad)
}

/// The Hessian `H = P + Q` of the objective, with its building blocks.
///
/// * `P = 4 sum_k (y_k / (x*x)_k^2) xi_k xi_k^T` where `xi_k = S^(k) x` and
///   `S^(k)_{ij} = [i + j = k]`, so `(xi_k)_i = x_{k-i}`.
/// * `R_{ij} = y_{i+j} / (x*x)_{i+j}` and `Q = 2 (1 1^T - R)`.
#[derive(Debug, Clone)]
pub struct HessianDecomposition {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub h: DMatrix<f64>,
}

/// Eigenvalue summary of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub positive_definite: bool,
}

impl Spectrum {
    pub fn of(matrix: &DMatrix<f64>) -> Self {
        let eig = matrix.clone().symmetric_eigen();
        let min = eig.eigenvalues.min();
        let max = eig.eigenvalues.max();
        Spectrum {
            min_eigenvalue: min,
            max_eigenvalue: max,
            positive_definite: matrix.clone().cholesky().is_some() && min > 0.0,
        }
    }
}

impl HessianDecomposition {
    /// `x^T Q(x)`, which equals the gradient.
    pub fn gradient_from_q(&self, x: &Signal) -> Vec<f64> {
        let xv = DVector::from_column_slice(x.as_slice());
        (self.q.transpose() * xv).iter().copied().collect()
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(&self.h)
    }

    pub fn p_spectrum(&self) -> Spectrum {
        Spectrum::of(&self.p)
    }
}

pub fn hessian(y: &Observations, x: &Signal) -> Result<HessianDecomposition> {
    y.check_signal(x)?;
    let conv = autoconvolve(x);
    let ys = y.as_slice();
    let n = x.len();

    let mut ratios = Vec::with_capacity(conv.len());
    for (k, (&yk, &ck)) in ys.iter().zip(&conv).enumerate() {
        ratios.push(data_ratio(yk, ck).ok_or(Error::UndefinedHessian { k })?);
    }

    let mut p = DMatrix::zeros(n, n);
    for (k, &ck) in conv.iter().enumerate() {
        if ys[k] == 0.0 {
            continue;
        }
        let weight = 4.0 * ys[k] / (ck * ck);
        let xi = DVector::from_fn(n, |i, _| x.at(k as isize - i as isize));
        p.ger(weight, &xi, &xi, 1.0);
    }

    let r = DMatrix::from_fn(n, n, |i, j| ratios[i + j]);
    let q = r.map(|v| 2.0 * (1.0 - v));
    let h = &p + &q;
    Ok(HessianDecomposition { p, q, r, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    fn obs(v: &[f64]) -> Observations {
        Observations::new(v.to_vec()).unwrap()
    }

    fn brute_autoconv(x: &[f64]) -> Vec<f64> {
        let m = x.len() - 1;
        (0..=2 * m)
            .map(|i| {
                (0..=i)
                    .filter(|&j| j <= m && i - j <= m)
                    .map(|j| x[i - j] * x[j])
                    .sum()
            })
            .collect()
    }

    // Central differences of the objective, step h = 1e-6 (1 + |x_j|).
    fn fd_gradient(y: &Observations, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|j| {
                let h = 1e-6 * (1.0 + x[j].abs());
                let mut up = x.to_vec();
                let mut dn = x.to_vec();
                up[j] += h;
                dn[j] -= h;
                let fu = objective(y, &sig(&up)).unwrap();
                let fd = objective(y, &sig(&dn)).unwrap();
                (fu - fd) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn autoconvolve_examples() {
        assert_eq!(autoconvolve(&sig(&[3.0])), vec![9.0]);
        assert_eq!(autoconvolve(&sig(&[1.0, 1.0])), vec![1.0, 2.0, 1.0]);
        let c = autoconvolve(&sig(&[1.0, 2.0, 3.0]));
        assert_eq!(c, vec![1.0, 4.0, 10.0, 12.0, 9.0]);
        assert_eq!(c, brute_autoconv(&[1.0, 2.0, 3.0]));
        assert_eq!(c.iter().sum::<f64>(), 36.0);
    }

    #[test]
    fn objective_examples() {
        let y = obs(&[1.0, 2.0, 1.0]);
        assert_eq!(objective(&y, &sig(&[1.0, 1.0])).unwrap(), 0.0);
        let v = objective(&y, &sig(&[2.0, 2.0])).unwrap();
        assert!((v - 6.454_822_555_520_437).abs() < 1e-12);
        let y = obs(&[1.0, 0.0, 1.0]);
        assert_eq!(objective(&y, &sig(&[1.0, 0.0])).unwrap(), f64::INFINITY);
    }

    #[test]
    fn objective_dimension_mismatch() {
        let y = obs(&[1.0, 2.0, 1.0]);
        assert!(objective(&y, &sig(&[1.0, 1.0, 1.0])).unwrap_err().is_usage());
    }

    #[test]
    fn gradient_examples() {
        let y = obs(&[1.0, 2.0, 1.0]);
        assert_eq!(gradient(&y, &sig(&[1.0, 1.0])).unwrap(), vec![0.0, 0.0]);
        let g = gradient(&y, &sig(&[2.0, 2.0])).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-14 && (g[1] - 6.0).abs() < 1e-14);
        let fd = fd_gradient(&y, &[2.0, 2.0]);
        assert!((fd[0] - 6.0).abs() < 1e-6);

        let s = 3f64.sqrt() / 2.0;
        let g = gradient(&obs(&[1.0, 1.0, 1.0]), &sig(&[s, s])).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-14), "{g:?}");
    }

    #[test]
    fn gradient_zero_coordinate_conventions() {
        // x = (2, 0), y = (4, 0, 0): (x*x) = (4, 0, 0)
        let g = gradient(&obs(&[4.0, 0.0, 0.0]), &sig(&[2.0, 0.0])).unwrap();
        assert_eq!(g, vec![0.0, 4.0]);
        // y_1 > 0 with (x*x)_1 = 0 and x_0 > 0 contributing
        let err = gradient(&obs(&[4.0, 1.0, 0.0]), &sig(&[2.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::UndefinedGradient { index: 1, k: 1 }));
    }

    #[test]
    fn hessian_example() {
        let hd = hessian(&obs(&[1.0, 2.0, 1.0]), &sig(&[1.0, 1.0])).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[6.0, 2.0, 2.0, 6.0]);
        assert!((&hd.h - &expect).abs().max() < 1e-14);
        assert!(hd.q.abs().max() < 1e-15);
        assert_eq!(hd.p, hd.h);
        assert!(hd.p_spectrum().positive_definite);
    }

    #[test]
    fn hessian_undefined() {
        let err = hessian(&obs(&[1.0, 1.0, 1.0]), &sig(&[1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::UndefinedHessian { k: 1 }));
    }

    #[test]
    fn exact_model_q_vanishes_and_p_is_definite() {
        let x = sig(&[0.5, 1.5, 2.0, 0.25]);
        let y = Observations::new(autoconvolve(&x)).unwrap();
        let hd = hessian(&y, &x).unwrap();
        assert!(hd.q.abs().max() < 1e-14);
        assert!(hd.p_spectrum().min_eigenvalue > 0.0);
    }

    fn positive_instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..=8).prop_flat_map(|m| {
            (
                prop::collection::vec(0.1f64..5.0, 2 * m + 1),
                prop::collection::vec(0.1f64..3.0, m + 1),
            )
        })
    }

    proptest! {
        #[test]
        fn sum_identity(x in prop::collection::vec(0.0f64..10.0, 1..20)) {
            let s: f64 = x.iter().sum();
            let c: f64 = autoconvolve(&sig(&x)).iter().sum();
            prop_assert!((c - s * s).abs() <= 1e-12 * (s * s).max(f64::MIN_POSITIVE));
        }

        #[test]
        fn autoconvolve_matches_brute_force(x in prop::collection::vec(0.0f64..10.0, 1..12)) {
            let fast = autoconvolve(&sig(&x));
            let slow = brute_autoconv(&x);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
            }
        }

        #[test]
        fn gradient_matches_finite_differences((yv, xv) in positive_instance()) {
            let y = obs(&yv);
            let g = gradient(&y, &sig(&xv)).unwrap();
            let fd = fd_gradient(&y, &xv);
            let scale = 1.0 + g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for (a, b) in g.iter().zip(&fd) {
                prop_assert!((a - b).abs() / scale <= 1e-6, "{a} vs {b}");
            }
        }

        #[test]
        fn hessian_matches_finite_differences((yv, xv) in positive_instance()) {
            let y = obs(&yv);
            let hd = hessian(&y, &sig(&xv)).unwrap();
            let n = xv.len();
            let scale = 1.0 + hd.h.abs().max();
            for i in 0..n {
                let h = 1e-6 * (1.0 + xv[i].abs());
                let mut up = xv.clone();
                let mut dn = xv.clone();
                up[i] += h;
                dn[i] -= h;
                let gu = gradient(&y, &sig(&up)).unwrap();
                let gd = gradient(&y, &sig(&dn)).unwrap();
                for j in 0..n {
                    let fd = (gu[j] - gd[j]) / (2.0 * h);
                    prop_assert!((hd.h[(j, i)] - fd).abs() / scale <= 1e-4);
                }
            }
            prop_assert!((&hd.h - &hd.h.transpose()).abs().max() <= 1e-12 * scale);
        }

        #[test]
        fn gradient_equals_x_transpose_q((yv, xv) in positive_instance()) {
            let y = obs(&yv);
            let x = sig(&xv);
            let g = gradient(&y, &x).unwrap();
            let hd = hessian(&y, &x).unwrap();
            let gq = hd.gradient_from_q(&x);
            let tol = 1e-10 * (1.0 + g.iter().fold(0.0f64, |a, v| a.max(v.abs())));
            for (a, b) in g.iter().zip(&gq) {
                prop_assert!((a - b).abs() <= tol);
            }
            prop_assert_eq!(&hd.h, &(&hd.p + &hd.q));
            prop_assert!(hd.p_spectrum().min_eigenvalue >= -1e-9 * (1.0 + hd.p.abs().max()));
        }
    }
}
