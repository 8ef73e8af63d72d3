#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use relclock::modes::BogoliubovMap;

/// Exactly symplectic map `exp(K)` from a random generator with entries of
/// size `scale`: anti-Hermitian mixing part, symmetric squeezing part.
pub fn random_symplectic<R: Rng>(rng: &mut R, n: usize, scale: f64) -> BogoliubovMap {
    let mut c = || Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
    let raw_x = DMatrix::from_fn(n, n, |_, _| c());
    let raw_y = DMatrix::from_fn(n, n, |_, _| c());
    let x = (&raw_x - raw_x.adjoint()) * Complex64::new(0.5, 0.0);
    let y = (&raw_y + raw_y.transpose()) * Complex64::new(0.5, 0.0);
    BogoliubovMap::from_generator(&x, &y).unwrap()
}

/// A symplectic map with every coefficient perturbed by up to `noise`.
pub fn near_symplectic<R: Rng>(rng: &mut R, n: usize, scale: f64, noise: f64) -> BogoliubovMap {
    let exact = random_symplectic(rng, n, scale);
    let mut jitter = |m: &DMatrix<Complex64>| {
        m.map(|z| z + Complex64::new(rng.gen_range(-noise..noise), rng.gen_range(-noise..noise)))
    };
    let alpha = jitter(exact.alpha());
    let beta = jitter(exact.beta());
    BogoliubovMap::new(alpha, beta).unwrap()
}
