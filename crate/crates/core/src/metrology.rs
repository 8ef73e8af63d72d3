//! Phase-estimation precision of single-mode Gaussian clocks.

use thiserror::Error;

use crate::gauss::GaussianParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetrologyError {
    /// Zero Fisher information: no finite variance bound exists.
    #[error("quantum Fisher information is zero; the phase cannot be estimated")]
    UnboundedVariance,
    #[error("quantum Fisher information must be non-negative and finite, got {0}")]
    InvalidQfi(f64),
    #[error("at least one measurement is required")]
    NoMeasurements,
    #[error("reference QFI must be positive, got {0}")]
    NonPositiveReference(f64),
}

/// Quantum Fisher information for the phase `θ`:
/// `H = 4α²P[cosh 2r + sinh 2r cos φ] + 4 sinh²(2r)/(1 + P²)`.
pub fn phase_qfi(params: &GaussianParams) -> f64 {
    let two_r = 2.0 * params.squeeze_magnitude;
    let p = params.purity;
    let alpha2 = params.displacement * params.displacement;
    4.0 * alpha2 * p * (two_r.cosh() + two_r.sinh() * params.squeeze_angle.cos())
        + 4.0 * two_r.sinh().powi(2) / (1.0 + p * p)
}

/// Cramér–Rao bound `Δλ = 1/√(M·H)`.
pub fn cramer_rao(qfi: f64, measurements: u64) -> Result<f64, MetrologyError> {
    if !(qfi >= 0.0) || !qfi.is_finite() {
        return Err(MetrologyError::InvalidQfi(qfi));
    }
    if measurements == 0 {
        return Err(MetrologyError::NoMeasurements);
    }
    if qfi == 0.0 {
        return Err(MetrologyError::UnboundedVariance);
    }
    Ok(1.0 / (measurements as f64 * qfi).sqrt())
}

/// `100·(after - before)/before`.
pub fn qfi_change_pct(before: f64, after: f64) -> Result<f64, MetrologyError> {
    if !(before > 0.0) {
        return Err(MetrologyError::NonPositiveReference(before));
    }
    Ok(100.0 * (after - before) / before)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionReport {
    pub qfi: f64,
    pub bound: f64,
    pub measurements: u64,
    pub qfi_change_pct: f64,
}

impl PrecisionReport {
    /// Precision of a state after some transformation, relative to `reference_qfi`.
    pub fn new(
        params: &GaussianParams,
        measurements: u64,
        reference_qfi: f64,
    ) -> Result<Self, MetrologyError> {
        let qfi = phase_qfi(params);
        Ok(Self {
            qfi,
            bound: cramer_rao(qfi, measurements)?,
            measurements,
            qfi_change_pct: qfi_change_pct(reference_qfi, qfi)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{extract_params, GaussianState};

    #[test]
    fn coherent_and_vacuum() {
        let n_bar: f64 = 3.0;
        let p = extract_params(&GaussianState::coherent(n_bar.sqrt(), 0.4).unwrap()).unwrap();
        assert!((phase_qfi(&p) - 4.0 * n_bar).abs() < 1e-12);
        let v = extract_params(&GaussianState::vacuum(1)).unwrap();
        assert_eq!(phase_qfi(&v), 0.0);
    }

    #[test]
    fn squeezed_vacuum_mean_one_is_sixteen() {
        // sinh²(2r) = 4N(N+1) → H = 8N(N+1) for pure states.
        let p = extract_params(&GaussianState::squeezed_vacuum(1.0, 0.0).unwrap()).unwrap();
        assert!((phase_qfi(&p) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn cramer_rao_values() {
        assert_eq!(cramer_rao(4.0, 1).unwrap(), 0.5);
        assert!((cramer_rao(4.0, 500).unwrap() - 1.0 / 2000f64.sqrt()).abs() < 1e-16);
        assert_eq!(cramer_rao(0.0, 3), Err(MetrologyError::UnboundedVariance));
        assert_eq!(cramer_rao(1.0, 0), Err(MetrologyError::NoMeasurements));
        assert!(cramer_rao(-1.0, 1).is_err());
    }

    #[test]
    fn change_percentages() {
        assert_eq!(qfi_change_pct(4.0, 4.0).unwrap(), 0.0);
        assert_eq!(qfi_change_pct(4.0, 2.0).unwrap(), -50.0);
        assert!((qfi_change_pct(16.0, 16.8).unwrap() - 5.0).abs() < 1e-12);
        assert!(qfi_change_pct(0.0, 1.0).is_err());
    }

    #[test]
    fn report_bound_is_exact() {
        let p = extract_params(&GaussianState::squeezed_vacuum(2.0, 0.3).unwrap()).unwrap();
        let r = PrecisionReport::new(&p, 500, 10.0).unwrap();
        assert_eq!(r.bound, 1.0 / (500.0 * r.qfi).sqrt());
    }
}
