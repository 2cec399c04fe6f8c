//! Synthetic data generators for the two reference experiments.
//!
//! * exact model: `x_true` i.i.d. uniform on `[1, 11]`, `y = x_true * x_true`;
//! * random data: `y` i.i.d. uniform on `[0.1, 2]`, generally with no exact
//!   solution.
//!
//! Both are deterministic functions of the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::objective::autoconvolve;
use crate::signal::{Observations, Signal};

pub const EXACT_RANGE: (f64, f64) = (1.0, 11.0);
pub const RANDOM_RANGE: (f64, f64) = (0.1, 2.0);

fn uniform(rng: &mut ChaCha8Rng, n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
}

/// Draws `x_true` of length `m + 1` and returns it with `y = x_true * x_true`.
pub fn exact_model(m: usize, seed: u64) -> (Signal, Observations) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_true = Signal::new(uniform(&mut rng, m + 1, EXACT_RANGE)).expect("positive draws");
    let y = Observations::new(autoconvolve(&x_true)).expect("positive autoconvolution");
    (x_true, y)
}

/// Draws `y` of length `2m + 1`.
pub fn random_data(m: usize, seed: u64) -> Observations {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Observations::new(uniform(&mut rng, 2 * m + 1, RANDOM_RANGE)).expect("positive draws")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_model_shapes() {
        let (x, y) = exact_model(25, 7);
        assert_eq!(x.len(), 26);
        assert_eq!(y.len(), 51);
        assert!(x.as_slice().iter().all(|v| (1.0..11.0).contains(v)));
        assert_eq!(autoconvolve(&x), y.as_slice());
        assert_eq!(exact_model(25, 7).0, x);
    }

    #[test]
    fn random_data_range() {
        let y = random_data(10, 1);
        assert_eq!(y.len(), 21);
        assert!(y.as_slice().iter().all(|v| (0.1..=2.0).contains(v)));
        assert_ne!(random_data(10, 2), y);
    }
}
