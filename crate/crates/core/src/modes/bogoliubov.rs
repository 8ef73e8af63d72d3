use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use super::ModeError;

type CMatrix = DMatrix<Complex64>;

/// `second ∘ first`.
pub fn compose(second: &BogoliubovMap, first: &BogoliubovMap) -> Result<BogoliubovMap, ModeError> {
    second.after(first)
}

/// Truncated Bogoliubov transformation `b_m = Σ_n (α*_mn a_n - β*_mn a†_n)`.
///
/// Composition follows the block form `S = [[α, β], [β*, α*]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovMap {
    alpha: CMatrix,
    beta: CMatrix,
}

impl BogoliubovMap {
    pub fn new(alpha: CMatrix, beta: CMatrix) -> Result<Self, ModeError> {
        if !alpha.is_square() {
            return Err(ModeError::DimensionMismatch(alpha.nrows(), alpha.ncols()));
        }
        if beta.shape() != alpha.shape() {
            return Err(ModeError::DimensionMismatch(alpha.nrows(), beta.nrows()));
        }
        if alpha.nrows() == 0 {
            return Err(ModeError::EmptyTruncation);
        }
        Ok(Self { alpha, beta })
    }

    pub fn identity(n_max: usize) -> Self {
        Self {
            alpha: CMatrix::identity(n_max, n_max),
            beta: CMatrix::zeros(n_max, n_max),
        }
    }

    /// Passive map with `α = diag(phases)`.
    pub fn diagonal(phases: &[Complex64]) -> Self {
        let n = phases.len();
        Self {
            alpha: CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(phases)),
            beta: CMatrix::zeros(n, n),
        }
    }

    /// `exp(K)` for `K = [[X, Y], [Y*, X*]]` with `X` anti-Hermitian and `Y`
    /// symmetric, which is exactly symplectic. Scaling and squaring over a
    /// Taylor series.
    pub fn from_generator(x: &CMatrix, y: &CMatrix) -> Result<Self, ModeError> {
        let gen = Self::new(x.clone(), y.clone())?;
        let norm = x
            .iter()
            .chain(y.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            * x.nrows() as f64;
        let squarings = if norm > 0.25 {
            (norm / 0.25).log2().ceil() as u32
        } else {
            0
        };
        let scale = Complex64::new(0.5f64.powi(squarings as i32), 0.0);
        let scaled = Self {
            alpha: &gen.alpha * scale,
            beta: &gen.beta * scale,
        };
        let n = x.nrows();
        let mut sum = Self::identity(n);
        let mut term = Self::identity(n);
        for j in 1..=24 {
            // term <- term * scaled / j in the block algebra
            let next = scaled.compose_unchecked(&term);
            let inv = Complex64::new(1.0 / j as f64, 0.0);
            term = Self {
                alpha: next.alpha * inv,
                beta: next.beta * inv,
            };
            sum.alpha += &term.alpha;
            sum.beta += &term.beta;
        }
        for _ in 0..squarings {
            sum = sum.compose_unchecked(&sum);
        }
        Ok(sum)
    }

    pub fn n_max(&self) -> usize {
        self.alpha.nrows()
    }

    pub fn alpha(&self) -> &CMatrix {
        &self.alpha
    }

    pub fn beta(&self) -> &CMatrix {
        &self.beta
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &BogoliubovMap) -> Result<Self, ModeError> {
        if self.n_max() != first.n_max() {
            return Err(ModeError::DimensionMismatch(self.n_max(), first.n_max()));
        }
        Ok(self.compose_unchecked(first))
    }

    fn compose_unchecked(&self, first: &BogoliubovMap) -> Self {
        let alpha = &self.alpha * &first.alpha + &self.beta * first.beta.conjugate();
        let beta = &self.alpha * &first.beta + &self.beta * first.alpha.conjugate();
        Self { alpha, beta }
    }

    /// Symplectic inverse `α → α†`, `β → -βᵀ`.
    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.alpha.adjoint(),
            beta: -self.beta.transpose(),
        }
    }

    /// `self` applied `times` times, by repeated squaring.
    pub fn power(&self, times: usize) -> Self {
        let mut result = Self::identity(self.n_max());
        let mut base = self.clone();
        let mut k = times;
        let mut first = true;
        while k > 0 {
            if k & 1 == 1 {
                result = if first {
                    base.clone()
                } else {
                    base.compose_unchecked(&result)
                };
                first = false;
            }
            k >>= 1;
            if k > 0 {
                base = base.compose_unchecked(&base);
            }
        }
        result
    }

    /// Drop particle creation: `β = 0` and `α` replaced by the unitary factor
    /// of its polar decomposition.
    pub fn passive_part(&self) -> Self {
        let svd = self.alpha.clone().svd(true, true);
        let u = svd.u.expect("left singular vectors requested");
        let v_t = svd.v_t.expect("right singular vectors requested");
        Self {
            alpha: u * v_t,
            beta: CMatrix::zeros(self.n_max(), self.n_max()),
        }
    }

    /// Conjugation by the mode parity `P = diag((-1)^(n+1))`, i.e. the map
    /// seen in a mirrored cavity.
    pub fn mirrored(&self) -> Self {
        let sign = |i: usize, j: usize| if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let n = self.n_max();
        Self {
            alpha: CMatrix::from_fn(n, n, |i, j| self.alpha[(i, j)] * sign(i, j)),
            beta: CMatrix::from_fn(n, n, |i, j| self.beta[(i, j)] * sign(i, j)),
        }
    }

    /// `(ε₁, ε₂)`: max-norms of `αα† - ββ† - I` and `αβᵀ - βαᵀ` on the
    /// leading `interior × interior` block.
    pub fn symplectic_residual(&self, interior: usize) -> (f64, f64) {
        let k = interior.min(self.n_max());
        let a = self.alpha.rows(0, k);
        let b = self.beta.rows(0, k);
        let mut first = a * a.adjoint() - b * b.adjoint();
        for i in 0..k {
            first[(i, i)] -= Complex64::new(1.0, 0.0);
        }
        let second = a * b.transpose() - b * a.transpose();
        let max_norm = |m: &CMatrix| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        (max_norm(&first), max_norm(&second))
    }

    /// Real 2×2 block `M_mn` acting on `(q, p)` quadratures, 1-based indices.
    pub fn quadrature_block(&self, m: usize, n: usize) -> Matrix2<f64> {
        let a = self.alpha[(m - 1, n - 1)];
        let b = self.beta[(m - 1, n - 1)];
        let minus = a - b;
        let plus = a + b;
        Matrix2::new(minus.re, plus.im, -minus.im, plus.re)
    }

    /// Full real symplectic matrix on `(q₁, p₁, …, q_N, p_N)`.
    pub fn to_real(&self) -> DMatrix<f64> {
        let n = self.n_max();
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        for m in 1..=n {
            for k in 1..=n {
                let block = self.quadrature_block(m, k);
                s.fixed_view_mut::<2, 2>(2 * (m - 1), 2 * (k - 1))
                    .copy_from(&block);
            }
        }
        s
    }

    /// Largest elementwise deviation between two maps of equal size.
    pub fn max_abs_diff(&self, other: &BogoliubovMap) -> f64 {
        self.alpha
            .iter()
            .zip(other.alpha.iter())
            .chain(self.beta.iter().zip(other.beta.iter()))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of `β`.
    pub fn beta_norm(&self) -> f64 {
        self.beta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_generator(n: usize, scale: f64) -> (CMatrix, CMatrix) {
        let raw = CMatrix::from_fn(n, n, |i, j| {
            c(
                ((i * 7 + j * 3) % 5) as f64 - 2.0,
                ((i * 2 + j * 5) % 7) as f64 - 3.0,
            ) * scale
        });
        let x = (&raw - raw.adjoint()) * c(0.5, 0.0);
        let raw2 = CMatrix::from_fn(n, n, |i, j| {
            c(((i + 2 * j) % 3) as f64, (i as f64 - j as f64) * 0.5) * scale
        });
        let y = (&raw2 + raw2.transpose()) * c(0.5, 0.0);
        (x, y)
    }

    #[test]
    fn identity_is_neutral() {
        let (x, y) = sample_generator(4, 0.1);
        let b = BogoliubovMap::from_generator(&x, &y).unwrap();
        let id = BogoliubovMap::identity(4);
        assert_eq!(b.after(&id).unwrap(), b);
        assert_eq!(id.after(&b).unwrap(), b);
        assert_eq!(id.inverse(), id);
        assert_eq!(id.symplectic_residual(4), (0.0, 0.0));
    }

    #[test]
    fn generated_maps_are_symplectic() {
        let (x, y) = sample_generator(5, 0.3);
        let b = BogoliubovMap::from_generator(&x, &y).unwrap();
        let (e1, e2) = b.symplectic_residual(5);
        assert!(e1 < 1e-12 && e2 < 1e-12, "{e1} {e2}");
        assert!(b.beta_norm() > 0.1);
        let back = b.inverse().after(&b).unwrap();
        assert!(back.max_abs_diff(&BogoliubovMap::identity(5)) < 1e-12);
        assert_eq!(b.inverse().inverse(), b);
    }

    #[test]
    fn real_form_is_a_homomorphism() {
        let (x1, y1) = sample_generator(3, 0.2);
        let (x2, y2) = sample_generator(3, -0.15);
        let b1 = BogoliubovMap::from_generator(&x1, &y1).unwrap();
        let b2 = BogoliubovMap::from_generator(&x2, &y2).unwrap();
        let lhs = b2.after(&b1).unwrap().to_real();
        let rhs = b2.to_real() * b1.to_real();
        assert!((lhs - rhs).amax() < 1e-13);
    }

    #[test]
    fn power_matches_iteration() {
        let (x, y) = sample_generator(3, 0.05);
        let b = BogoliubovMap::from_generator(&x, &y).unwrap();
        let mut iter = BogoliubovMap::identity(3);
        for times in 0..12 {
            assert!(
                b.power(times).max_abs_diff(&iter) < 1e-12,
                "times = {times}"
            );
            iter = b.after(&iter).unwrap();
        }
    }

    #[test]
    fn passive_part_is_unitary() {
        let (x, y) = sample_generator(4, 0.2);
        let b = BogoliubovMap::from_generator(&x, &y).unwrap();
        let p = b.passive_part();
        let (e1, e2) = p.symplectic_residual(4);
        assert!(e1 < 1e-12 && e2 == 0.0);
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let a = BogoliubovMap::identity(3);
        let b = BogoliubovMap::identity(4);
        assert_eq!(a.after(&b), Err(ModeError::DimensionMismatch(3, 4)));
        assert!(BogoliubovMap::new(CMatrix::zeros(2, 3), CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn diagonal_phases_add() {
        let p1: Vec<_> = (1..=4)
            .map(|n| Complex64::from_polar(1.0, -0.3 * n as f64))
            .collect();
        let p2: Vec<_> = (1..=4)
            .map(|n| Complex64::from_polar(1.0, -1.1 * n as f64))
            .collect();
        let p12: Vec<_> = (1..=4)
            .map(|n| Complex64::from_polar(1.0, -1.4 * n as f64))
            .collect();
        let lhs = BogoliubovMap::diagonal(&p2)
            .after(&BogoliubovMap::diagonal(&p1))
            .unwrap();
        assert!(lhs.max_abs_diff(&BogoliubovMap::diagonal(&p12)) < 1e-15);
    }
}
