//! Gaussian states in the covariance-matrix picture.
//!
//! Quadratures are `X₂ₙ₋₁ = (aₙ + aₙ†)/2` and `X₂ₙ = -i(aₙ - aₙ†)/2`, so the
//! vacuum covariance is `I/4`. Moments are ordered `(q₁, p₁, q₂, p₂, …)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use thiserror::Error;

use crate::modes::BogoliubovMap;

/// `tanh 2r` beyond which squeezing is reported as clipped.
pub const ARTANH_CLIP: f64 = 1.0 - 1e-15;

/// Number of extra modes beyond `k` that must lie inside the map for `k`
/// to count as an interior mode.
pub const INTERIOR_MARGIN: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("parameter {name} = {value} out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("mode {k} is outside the trusted interior of an n_max = {n_max} map (needs k + {margin} <= n_max)", margin = INTERIOR_MARGIN)]
    OutsideInterior { k: usize, n_max: usize },
    #[error("mode index {0} out of range")]
    ModeOutOfRange(usize),
    #[error("expected a single-mode state, got {0} modes")]
    NotSingleMode(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    first_moments: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(first_moments: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self, GaussError> {
        let dim = first_moments.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(GaussError::DimensionMismatch(dim, covariance.nrows()));
        }
        if covariance.shape() != (dim, dim) {
            return Err(GaussError::DimensionMismatch(dim, covariance.nrows()));
        }
        Ok(Self {
            first_moments,
            covariance,
        })
    }

    pub fn vacuum(mode_count: usize) -> Self {
        Self {
            first_moments: DVector::zeros(2 * mode_count),
            covariance: DMatrix::identity(2 * mode_count, 2 * mode_count) * 0.25,
        }
    }

    /// Coherent state with `⟨a⟩ = A e^{iθ₀}`.
    pub fn coherent(amplitude: f64, phase: f64) -> Result<Self, GaussError> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(GaussError::OutOfRange {
                name: "amplitude",
                value: amplitude,
            });
        }
        let mut s = Self::vacuum(1);
        s.first_moments[0] = amplitude * phase.cos();
        s.first_moments[1] = amplitude * phase.sin();
        Ok(s)
    }

    /// Squeezed vacuum with `⟨N⟩ = sinh² r`. The major axis sits at
    /// `angle/2`, so the extracted squeeze angle equals `angle`.
    pub fn squeezed_vacuum(mean_n: f64, angle: f64) -> Result<Self, GaussError> {
        if !(mean_n >= 0.0) || !mean_n.is_finite() {
            return Err(GaussError::OutOfRange {
                name: "mean_n",
                value: mean_n,
            });
        }
        // e^{±2r} = (√(N+1) ± √N)², the minus branch as a reciprocal, so no
        // entry is formed by cancellation
        let grow = (mean_n.sqrt() + (mean_n + 1.0).sqrt()).powi(2);
        let shrink = 1.0 / grow;
        let (cos, sin) = ((0.5 * angle).cos(), (0.5 * angle).sin());
        let cov = Matrix2::new(
            grow * cos * cos + shrink * sin * sin,
            (grow - shrink) * sin * cos,
            (grow - shrink) * sin * cos,
            grow * sin * sin + shrink * cos * cos,
        ) * 0.25;
        Ok(Self {
            first_moments: DVector::zeros(2),
            covariance: DMatrix::from_iterator(2, 2, cov.iter().copied()),
        })
    }

    pub fn mode_count(&self) -> usize {
        self.first_moments.len() / 2
    }

    pub fn first_moments(&self) -> &DVector<f64> {
        &self.first_moments
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Independent modes side by side.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (d1, d2) = (self.first_moments.len(), other.first_moments.len());
        let mut x = DVector::zeros(d1 + d2);
        x.rows_mut(0, d1).copy_from(&self.first_moments);
        x.rows_mut(d1, d2).copy_from(&other.first_moments);
        let mut cov = DMatrix::zeros(d1 + d2, d1 + d2);
        cov.view_mut((0, 0), (d1, d1)).copy_from(&self.covariance);
        cov.view_mut((d1, d1), (d2, d2))
            .copy_from(&other.covariance);
        GaussianState {
            first_moments: x,
            covariance: cov,
        }
    }

    /// Place a single-mode state at mode `k` (1-based) of an otherwise
    /// vacuum `mode_count`-mode state.
    pub fn embed(&self, k: usize, mode_count: usize) -> Result<GaussianState, GaussError> {
        if self.mode_count() != 1 {
            return Err(GaussError::NotSingleMode(self.mode_count()));
        }
        if k == 0 || k > mode_count {
            return Err(GaussError::ModeOutOfRange(k));
        }
        let mut s = Self::vacuum(mode_count);
        let i = 2 * (k - 1);
        s.first_moments
            .rows_mut(i, 2)
            .copy_from(&self.first_moments);
        s.covariance
            .view_mut((i, i), (2, 2))
            .copy_from(&self.covariance);
        Ok(s)
    }

    /// Reduced state of mode `k` (1-based): drop every other row and column.
    pub fn partial_trace(&self, k: usize) -> Result<GaussianState, GaussError> {
        if k == 0 || k > self.mode_count() {
            return Err(GaussError::ModeOutOfRange(k));
        }
        let i = 2 * (k - 1);
        Ok(GaussianState {
            first_moments: self.first_moments.rows(i, 2).into_owned(),
            covariance: self.covariance.view((i, i), (2, 2)).into_owned(),
        })
    }

    fn single_mode_parts(&self) -> Result<(Vector2<f64>, Matrix2<f64>), GaussError> {
        if self.mode_count() != 1 {
            return Err(GaussError::NotSingleMode(self.mode_count()));
        }
        let x = Vector2::new(self.first_moments[0], self.first_moments[1]);
        let c = &self.covariance;
        Ok((x, Matrix2::new(c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)])))
    }

    fn from_single_mode(x: Vector2<f64>, cov: Matrix2<f64>) -> Self {
        Self {
            first_moments: DVector::from_column_slice(x.as_slice()),
            covariance: DMatrix::from_iterator(2, 2, cov.iter().copied()),
        }
    }

    /// Smallest symplectic eigenvalue minus 1/4; non-negative for physical states.
    pub fn uncertainty_margin(&self) -> f64 {
        let omega = symplectic_form(self.mode_count());
        // K = σ^½ Ω σ^½ is antisymmetric with eigenvalues ±iν, so K² is
        // symmetric with eigenvalues -ν².
        let eig = self.covariance.clone().symmetric_eigen();
        let root_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let root =
            &eig.eigenvectors * DMatrix::from_diagonal(&root_vals) * eig.eigenvectors.transpose();
        let k = &root * omega * &root;
        let k2 = &k * &k;
        let k2 = (&k2 + k2.transpose()) * 0.5;
        let smallest = k2
            .symmetric_eigenvalues()
            .iter()
            .map(|e| (-e).max(0.0).sqrt())
            .fold(f64::INFINITY, f64::min);
        smallest - 0.25
    }
}

fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        omega[(2 * i, 2 * i + 1)] = 1.0;
        omega[(2 * i + 1, 2 * i)] = -1.0;
    }
    omega
}

/// Single-mode update for mode `k` (1-based) when every other mode starts
/// in vacuum, uncorrelated with `k`:
/// `x' = M_kk x`, `σ' = M_kk σ M_kkᵀ + ¼ Σ_{n≠k} M_kn M_knᵀ`.
pub fn apply_reduced(
    map: &BogoliubovMap,
    k: usize,
    state: &GaussianState,
) -> Result<GaussianState, GaussError> {
    let n_max = map.n_max();
    if k == 0 || k > n_max {
        return Err(GaussError::ModeOutOfRange(k));
    }
    if k + INTERIOR_MARGIN > n_max {
        return Err(GaussError::OutsideInterior { k, n_max });
    }
    let (x, cov) = state.single_mode_parts()?;
    let mkk = map.quadrature_block(k, k);
    let mut out_cov = mkk * cov * mkk.transpose();
    for n in (1..=n_max).filter(|&n| n != k) {
        let mkn = map.quadrature_block(k, n);
        out_cov += mkn * mkn.transpose() * 0.25;
    }
    Ok(GaussianState::from_single_mode(mkk * x, out_cov))
}

/// Full symplectic action on every mode: `x' = S x`, `σ' = S σ Sᵀ`.
pub fn apply_full(map: &BogoliubovMap, state: &GaussianState) -> Result<GaussianState, GaussError> {
    if state.mode_count() != map.n_max() {
        return Err(GaussError::DimensionMismatch(
            state.mode_count(),
            map.n_max(),
        ));
    }
    let s = map.to_real();
    let x = &s * &state.first_moments;
    let cov = &s * &state.covariance * s.transpose();
    Ok(GaussianState {
        first_moments: x,
        covariance: cov,
    })
}

/// Displacement, phase, squeezing and purity of a single-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub displacement: f64,
    pub phase: f64,
    pub squeeze_magnitude: f64,
    pub squeeze_angle: f64,
    pub purity: f64,
    /// The artanh argument for `r` had to be clipped below 1.
    pub clipped: bool,
}

impl GaussianParams {
    /// `2θ + φ`, the orientation of the covariance ellipse's major axis
    /// doubled, in (-π, π].
    pub fn ellipse_orientation(&self) -> f64 {
        wrap_angle(2.0 * self.phase + self.squeeze_angle)
    }
}

/// Map an angle into (-π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x.rem_euclid(two_pi);
    if y > PI {
        y -= two_pi;
    }
    y
}

pub fn extract_params(state: &GaussianState) -> Result<GaussianParams, GaussError> {
    let (x, cov) = state.single_mode_parts()?;
    let (s11, s12, s22) = (cov[(0, 0)], 0.5 * (cov[(0, 1)] + cov[(1, 0)]), cov[(1, 1)]);
    let det = s11 * s22 - s12 * s12;
    if !(s11 > 0.0 && s22 > 0.0 && det > 0.0) {
        return Err(GaussError::NotPositiveDefinite);
    }
    let displacement = x[0].hypot(x[1]);
    let phase = wrap_angle(x[1].atan2(x[0]));
    let purity = 1.0 / (4.0 * det.sqrt());

    let diff = s11 - s22;
    let anisotropy = diff.hypot(2.0 * s12);
    let trace = s11 + s22;
    // tanh 2r = anisotropy/trace, and trace² - anisotropy² = 4 det gives
    // sinh 2r = anisotropy/(2√det), which stays well conditioned as tanh 2r → 1.
    let ratio = anisotropy / trace;
    let clipped = ratio > ARTANH_CLIP;
    if clipped {
        log::warn!(
            "tanh 2r = {ratio} exceeds {ARTANH_CLIP}; squeezing is at the limit of resolution"
        );
    }
    let squeeze_magnitude = 0.5 * (anisotropy / (2.0 * det.sqrt())).asinh();
    let squeeze_angle = if anisotropy <= 1e-15 * trace {
        0.0
    } else {
        wrap_angle((2.0 * s12).atan2(diff) - 2.0 * phase)
    };
    Ok(GaussianParams {
        displacement,
        phase,
        squeeze_magnitude,
        squeeze_angle,
        purity,
        clipped,
    })
}
