use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::dense::{CMatrix, DenseOperator, C64};

/// Haar-random `d x d` unitary from a seed.
pub fn sample_haar_unitary(d: usize, seed: u64) -> DenseOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseOperator::from_matrix(sample_haar_matrix(d, &mut rng)).expect("square")
}

/// Ginibre matrix, QR, then rescale so that R has a positive real diagonal.
/// Skipping the rescale gives a non-Haar distribution.
pub fn sample_haar_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z: CMatrix = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random unit vector in `C^d`.
pub fn sample_haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> nalgebra::DVector<C64> {
    let v = nalgebra::DVector::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let n = v.norm();
    v.unscale(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_and_seed_dependent() {
        for d in [1usize, 2, 3, 8] {
            let u = sample_haar_unitary(d, 11);
            assert!(u.is_unitary(1e-10));
        }
        let a = sample_haar_unitary(4, 1);
        let b = sample_haar_unitary(4, 2);
        assert!(a.max_abs_diff(&b) > 1e-3);
        assert_eq!(sample_haar_unitary(4, 1), a);
    }

    #[test]
    fn first_moment() {
        // E|U_00|^2 = 1/d.
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mean: f64 = (0..n)
            .map(|_| sample_haar_matrix(2, &mut rng)[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn phase_of_diagonal_is_uniform() {
        // Without the R-diagonal correction the (0,0) phase concentrates near 0.
        let n = 20_000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mean: C64 = (0..n)
            .map(|_| {
                let z = sample_haar_matrix(2, &mut rng)[(0, 0)];
                z / z.norm()
            })
            .sum::<C64>()
            / n as f64;
        assert!(mean.norm() < 4.0 / (n as f64).sqrt(), "{mean}");
    }
}
