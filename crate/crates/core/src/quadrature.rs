//! Globally adaptive Gauss–Kronrod (7/15) quadrature for smooth real integrands.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge: estimate {value}, achieved error {achieved:e}, requested {requested:e}")]
    NotConverged {
        value: f64,
        achieved: f64,
        requested: f64,
    },
    #[error("invalid integration interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
    #[error("integrand returned a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the number of panels kept.
    pub max_panels: usize,
    /// Number of equal panels to start from; set this to roughly the number
    /// of oscillations so the first pass already resolves them.
    pub initial_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_panels: 4096,
            initial_panels: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

// Kronrod abscissae (positive half, descending) and weights; odd indices
// are the 7-point Gauss abscissae.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    abs_mass: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_mass = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs_mass += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        abs_mass: abs_mass * half.abs(),
    }
}

/// Integrate `f` over `[lo, hi]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below `max(abs_tol, rel_tol·|I|)`, or below the rounding
/// floor of the integrand's absolute mass.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    opts: &QuadratureOptions,
) -> Result<Estimate, QuadratureError> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(QuadratureError::InvalidInterval(lo, hi));
    }
    if lo == hi {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let n0 = opts.initial_panels.max(1);
    let width = (hi - lo) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|i| {
            let a = lo + width * i as f64;
            let b = if i + 1 == n0 {
                hi
            } else {
                lo + width * (i + 1) as f64
            };
            kronrod15(&f, a, b)
        })
        .collect();
    let mut evaluations = 15 * n0;

    loop {
        let (value, error, mass) = panels.iter().fold((0.0, 0.0, 0.0), |acc, p| {
            (acc.0 + p.value, acc.1 + p.error, acc.2 + p.abs_mass)
        });
        if !value.is_finite() || !error.is_finite() {
            return Err(QuadratureError::NonFinite);
        }
        let requested = opts
            .abs_tol
            .max(opts.rel_tol * value.abs())
            .max(64.0 * f64::EPSILON * mass);
        if error <= requested {
            return Ok(Estimate {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if panels.len() >= opts.max_panels {
            return Err(QuadratureError::NotConverged {
                value,
                achieved: error,
                requested,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if !(mid > p.lo && mid < p.hi) {
            return Err(QuadratureError::NotConverged {
                value,
                achieved: error,
                requested,
            });
        }
        panels.push(kronrod15(&f, p.lo, mid));
        panels.push(kronrod15(&f, mid, p.hi));
        evaluations += 30;
    }
}
