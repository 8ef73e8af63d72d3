//! Cavity mode bases, the Klein–Gordon inner product on the matching slice,
//! Bogoliubov maps and their composition along a trajectory.
//!
//! Mode normalization is `(1/√(nπ)) sin(nπ s)` with `s ∈ [0, 1]` the
//! fractional position in the cavity (linear in `x` for Minkowski, in
//! `ln χ` for Rindler). All modes carry `exp(-iνt)`.

mod bogoliubov;
mod dump;
mod junction;

pub use bogoliubov::{compose, BogoliubovMap};
pub use dump::{read_dump, write_dump, DumpHeader, CONVENTION_TAG};
pub use junction::{
    free_phase_map, junction_map, trajectory_map, MapOptions, MapVariant, TrajectoryMapper,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::{integrate, QuadratureError, QuadratureOptions};
use crate::trajectory::TrajectoryError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModeError {
    #[error("invalid cavity boundaries ({0}, {1})")]
    InvalidBoundaries(f64, f64),
    #[error("mode index {n} outside 1..={n_max}")]
    ModeOutOfRange { n: usize, n_max: usize },
    #[error("point {0} lies outside the cavity")]
    OutsideCavity(f64),
    #[error("truncation order must be at least 1")]
    EmptyTruncation,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cavity crosses the Rindler horizon: h = {0} must lie in (0, 2)")]
    HorizonCrossing(f64),
    #[error("symplectic residual {residual:e} on the {interior}x{interior} interior block exceeds {threshold:e}")]
    ResidualGate {
        residual: f64,
        threshold: f64,
        interior: usize,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error("malformed map dump: {0}")]
    MalformedDump(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Inertial cavity, time `t`.
    Minkowski,
    /// Uniformly accelerated cavity, Rindler time `η`.
    Rindler,
}

/// Dirichlet mode basis of a cavity between `lower` and `upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBasis {
    kind: BasisKind,
    lower: f64,
    upper: f64,
    n_max: usize,
    /// `x₂ - x₁` (Minkowski) or `ln(χ₂/χ₁)` (Rindler).
    extent: f64,
}

impl ModeBasis {
    pub fn minkowski(x1: f64, x2: f64, n_max: usize) -> Result<Self, ModeError> {
        if !(x1.is_finite() && x2.is_finite()) || x2 <= x1 {
            return Err(ModeError::InvalidBoundaries(x1, x2));
        }
        if n_max == 0 {
            return Err(ModeError::EmptyTruncation);
        }
        Ok(Self {
            kind: BasisKind::Minkowski,
            lower: x1,
            upper: x2,
            n_max,
            extent: x2 - x1,
        })
    }

    pub fn rindler(chi1: f64, chi2: f64, n_max: usize) -> Result<Self, ModeError> {
        if !(chi1.is_finite() && chi2.is_finite()) || chi1 <= 0.0 || chi2 <= chi1 {
            return Err(ModeError::InvalidBoundaries(chi1, chi2));
        }
        if n_max == 0 {
            return Err(ModeError::EmptyTruncation);
        }
        Ok(Self {
            kind: BasisKind::Rindler,
            lower: chi1,
            upper: chi2,
            n_max,
            extent: ((chi2 - chi1) / chi1).ln_1p(),
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn boundaries(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `ω_n = nπ/L` with respect to `t`, or `Ω_n = nπ/ln(χ₂/χ₁)` with respect to `η`.
    pub fn frequency(&self, n: usize) -> f64 {
        n as f64 * PI / self.extent
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (1..=self.n_max).map(|n| self.frequency(n)).collect()
    }

    fn check_index(&self, n: usize) -> Result<(), ModeError> {
        if n == 0 || n > self.n_max {
            Err(ModeError::ModeOutOfRange {
                n,
                n_max: self.n_max,
            })
        } else {
            Ok(())
        }
    }

    /// Fractional position `s ∈ [0, 1]`, given `x - lower`.
    fn fraction_from_offset(&self, offset: f64) -> f64 {
        match self.kind {
            BasisKind::Minkowski => offset / self.extent,
            BasisKind::Rindler => (offset / self.lower).ln_1p() / self.extent,
        }
    }

    fn spatial_from_offset(&self, n: usize, offset: f64) -> f64 {
        let nf = n as f64;
        (nf * PI * self.fraction_from_offset(offset)).sin() / (nf * PI).sqrt()
    }

    /// `x` times the slice-normal frequency: `ω_n x` for Minkowski, `Ω_n` for
    /// Rindler (where `∂_T = χ⁻¹ ∂_η` on the `η = 0` slice).
    fn weighted_frequency(&self, n: usize, x: f64) -> f64 {
        match self.kind {
            BasisKind::Minkowski => self.frequency(n) * x,
            BasisKind::Rindler => self.frequency(n),
        }
    }

    /// Mode function `φ_n` at (`time`, `position`) in the basis' own chart.
    pub fn mode_value(&self, n: usize, time: f64, position: f64) -> Result<Complex64, ModeError> {
        self.check_index(n)?;
        if !(position >= self.lower && position <= self.upper) {
            return Err(ModeError::OutsideCavity(position));
        }
        let spatial = self.spatial_from_offset(n, position - self.lower);
        Ok(Complex64::from_polar(spatial, -self.frequency(n) * time))
    }
}

/// A mode of some basis, optionally complex conjugated.
#[derive(Debug, Clone, Copy)]
pub struct ModeRef<'a> {
    pub basis: &'a ModeBasis,
    pub n: usize,
    pub conjugate: bool,
}

impl<'a> ModeRef<'a> {
    pub fn new(basis: &'a ModeBasis, n: usize) -> Self {
        Self {
            basis,
            n,
            conjugate: false,
        }
    }

    pub fn conj(self) -> Self {
        Self {
            conjugate: !self.conjugate,
            ..self
        }
    }

    fn sign(&self) -> f64 {
        if self.conjugate {
            -1.0
        } else {
            1.0
        }
    }
}

/// Klein–Gordon product `(f, g) = -i ∫ dX [f ∂_T g* - g* ∂_T f]` on the
/// slice `T = 0 = η` where Minkowski `X` and Rindler `χ` coincide.
///
/// Both mode families are real on this slice with `∂_T f = -i ν_f(X) f`, so
/// the product reduces to `∫ s_f s_g (±ν_f ± ν_g) dX` and is real. When a
/// Rindler basis is involved the integral runs over `u = ln(χ/χ₁)`, which
/// turns its modes into plain sines.
pub fn kg_inner_product(
    f: ModeRef<'_>,
    g: ModeRef<'_>,
    opts: &QuadratureOptions,
) -> Result<Complex64, ModeError> {
    f.basis.check_index(f.n)?;
    g.basis.check_index(g.n)?;
    let lo = f.basis.lower.max(g.basis.lower);
    let hi = f.basis.upper.min(g.basis.upper);
    if hi <= lo {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (sf, sg) = (f.sign(), g.sign());
    let oscillations = f.n + g.n + 1;
    let opts = QuadratureOptions {
        initial_panels: opts.initial_panels.max(oscillations),
        ..*opts
    };

    let anchor = [f.basis, g.basis]
        .into_iter()
        .find(|b| b.kind == BasisKind::Rindler)
        .copied();
    let estimate = match anchor {
        Some(r) => {
            // x = r.lower · e^u; offsets relative to each basis' lower edge
            // are formed without subtracting two large positions.
            let shift_f = r.lower - f.basis.lower;
            let shift_g = r.lower - g.basis.lower;
            let u_lo = ((lo - r.lower) / r.lower).ln_1p();
            let u_hi = ((hi - r.lower) / r.lower).ln_1p();
            let integrand = |u: f64| {
                let grow = r.lower * u.exp_m1();
                let x = r.lower + grow;
                let of = (shift_f + grow).clamp(0.0, f.basis.upper - f.basis.lower);
                let og = (shift_g + grow).clamp(0.0, g.basis.upper - g.basis.lower);
                let weight = sf * f.basis.weighted_frequency(f.n, x)
                    + sg * g.basis.weighted_frequency(g.n, x);
                f.basis.spatial_from_offset(f.n, of) * g.basis.spatial_from_offset(g.n, og) * weight
            };
            integrate(integrand, u_lo, u_hi, &opts)?
        }
        None => {
            let integrand = |x: f64| {
                let weight = sf * f.basis.frequency(f.n) + sg * g.basis.frequency(g.n);
                f.basis.spatial_from_offset(f.n, x - f.basis.lower)
                    * g.basis.spatial_from_offset(g.n, x - g.basis.lower)
                    * weight
            };
            integrate(integrand, lo, hi, &opts)?
        }
    };
    Ok(Complex64::new(estimate.value, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values_vanish() {
        let m = ModeBasis::minkowski(0.3, 1.3, 6).unwrap();
        let r = ModeBasis::rindler(0.9, 1.1, 6).unwrap();
        for n in 1..=6 {
            assert!(m.mode_value(n, 0.7, 0.3).unwrap().norm() < 1e-15);
            assert!(r.mode_value(n, 0.7, 1.1).unwrap().norm() < 1e-15);
        }
        let mid = m.mode_value(1, 0.0, 0.8).unwrap();
        assert!((mid.re - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert_eq!(mid.im, 0.0);
    }

    #[test]
    fn mode_value_errors() {
        let m = ModeBasis::minkowski(0.0, 1.0, 3).unwrap();
        assert!(matches!(
            m.mode_value(0, 0.0, 0.5),
            Err(ModeError::ModeOutOfRange { .. })
        ));
        assert!(matches!(
            m.mode_value(4, 0.0, 0.5),
            Err(ModeError::ModeOutOfRange { .. })
        ));
        assert!(matches!(
            m.mode_value(1, 0.0, 1.5),
            Err(ModeError::OutsideCavity(_))
        ));
        assert!(ModeBasis::rindler(0.0, 1.0, 3).is_err());
        assert!(ModeBasis::minkowski(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn frequencies_linear() {
        let r = ModeBasis::rindler(0.9, 1.1, 5).unwrap();
        let w = r.frequencies();
        let step = w[0];
        for (i, wi) in w.iter().enumerate() {
            assert!((wi - step * (i + 1) as f64).abs() < 1e-12);
        }
        assert!((step - PI / (1.1f64 / 0.9).ln()).abs() < 1e-12);
    }

    #[test]
    fn minkowski_orthonormal() {
        let b = ModeBasis::minkowski(0.0, 1.7, 6).unwrap();
        let opts = QuadratureOptions::default();
        for m in 1..=6 {
            for n in 1..=6 {
                let p = kg_inner_product(ModeRef::new(&b, m), ModeRef::new(&b, n), &opts).unwrap();
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((p.re - expected).abs() < 1e-10, "({m},{n}) = {p}");
                let q = kg_inner_product(ModeRef::new(&b, m), ModeRef::new(&b, n).conj(), &opts)
                    .unwrap();
                assert!(q.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rindler_orthonormal() {
        let b = ModeBasis::rindler(2.0, 3.5, 5).unwrap();
        let opts = QuadratureOptions::default();
        for m in 1..=5 {
            for n in 1..=5 {
                let p = kg_inner_product(ModeRef::new(&b, m), ModeRef::new(&b, n), &opts).unwrap();
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((p.re - expected).abs() < 1e-10);
                let c = kg_inner_product(
                    ModeRef::new(&b, m).conj(),
                    ModeRef::new(&b, n).conj(),
                    &opts,
                )
                .unwrap();
                assert!((c.re + expected).abs() < 1e-10);
            }
        }
    }
}
