//! Twin-paradox scenario: clock time and precision of an accelerated
//! cavity clock compared with pointlike proper time.
//!
//! Rob's cavity runs the symmetric round trip built by
//! [`Trajectory::twin`]; Alice stays at rest. Rob's clock time is read from
//! the phase of mode `k` after the whole-trajectory Bogoliubov map, with and
//! without particle creation at the junctions.

use std::f64::consts::PI;

use rayon::prelude::*;
use thiserror::Error;

use crate::gauss::{
    apply_reduced, extract_params, wrap_angle, GaussError, GaussianParams, GaussianState,
    INTERIOR_MARGIN,
};
use crate::metrology::{phase_qfi, qfi_change_pct, MetrologyError};
use crate::modes::{BogoliubovMap, MapOptions, MapVariant, ModeError, TrajectoryMapper};
use crate::quadrature::QuadratureOptions;
use crate::trajectory::{
    log_ratio, rindler_geometry, RindlerGeometry, Trajectory, TrajectoryError,
};
use crate::units::{
    acceleration_to_natural, seconds_to_natural, GRAVITATIONAL_CONSTANT, SPEED_OF_LIGHT,
};

/// Default bound on the junction's symplectic residual.
pub const DEFAULT_RESIDUAL_GATE: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClockError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("cavity crosses the Rindler horizon: h = {0} must be < 2")]
    HorizonCrossing(f64),
    #[error("junction residual {residual:e} on the {interior}x{interior} interior block exceeds the gate {threshold:e}")]
    ResidualGate {
        residual: f64,
        threshold: f64,
        interior: usize,
    },
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("radius {r} m is not outside the Schwarzschild radius {r_s} m")]
    InsideHorizon { r: f64, r_s: f64 },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Metrology(#[from] MetrologyError),
}

impl ClockError {
    /// Failure of a numerical gate rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            ClockError::ResidualGate { .. } | ClockError::Mode(ModeError::Quadrature(_))
        )
    }
}

/// Exact ratio of cavity-clock time to center proper time during uniform
/// acceleration, `h / (2 artanh(h/2))`; `1 - h²/12 + O(h⁴)` for small `h`.
pub fn classical_cavity_ratio(h: f64) -> Result<f64, ClockError> {
    if !(h >= 0.0) {
        return Err(ClockError::InvalidConfig(format!(
            "h = {h} must be non-negative"
        )));
    }
    if h >= 2.0 {
        return Err(ClockError::HorizonCrossing(h));
    }
    if h < 1e-4 {
        let h2 = h * h;
        // series through h⁴; the next term is O(h⁶) < 1e-24
        return Ok(1.0 - h2 / 12.0 - h2 * h2 / 180.0);
    }
    Ok(h / log_ratio(h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// `⟨a⟩ = A e^{iθ₀}`.
    Coherent { amplitude: f64, phase: f64 },
    /// Squeezed vacuum with `⟨N⟩ = mean_n`, rotated by `phase` (the squeeze
    /// angle is `2·phase`).
    SqueezedVacuum { mean_n: f64, phase: f64 },
}

impl InitialState {
    pub fn state(&self) -> Result<GaussianState, GaussError> {
        match *self {
            InitialState::Coherent { amplitude, phase } => {
                GaussianState::coherent(amplitude, phase)
            }
            InitialState::SqueezedVacuum { mean_n, phase } => {
                GaussianState::squeezed_vacuum(mean_n, 2.0 * phase)
            }
        }
    }

    pub fn mean_n(&self) -> f64 {
        match *self {
            InitialState::Coherent { amplitude, .. } => amplitude * amplitude,
            InitialState::SqueezedVacuum { mean_n, .. } => mean_n,
        }
    }

    pub fn phase(&self) -> f64 {
        match *self {
            InitialState::Coherent { phase, .. } | InitialState::SqueezedVacuum { phase, .. } => {
                phase
            }
        }
    }

    /// Same kind of state with a different mean particle number.
    pub fn with_mean_n(&self, mean_n: f64) -> Self {
        match *self {
            InitialState::Coherent { phase, .. } => InitialState::Coherent {
                amplitude: mean_n.max(0.0).sqrt(),
                phase,
            },
            InitialState::SqueezedVacuum { phase, .. } => {
                InitialState::SqueezedVacuum { mean_n, phase }
            }
        }
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        match *self {
            InitialState::Coherent { amplitude, .. } => InitialState::Coherent { amplitude, phase },
            InitialState::SqueezedVacuum { mean_n, .. } => {
                InitialState::SqueezedVacuum { mean_n, phase }
            }
        }
    }

    /// Whether the clock phase is carried by the displacement (period 2π)
    /// or only by the squeezing ellipse (period π).
    fn displaced(&self) -> bool {
        matches!(self, InitialState::Coherent { amplitude, .. } if *amplitude > 0.0)
    }
}

/// Scenario parameters in natural units (times and lengths in meters,
/// acceleration in 1/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub t_a: f64,
    pub t_i: f64,
    pub length: f64,
    pub acceleration: f64,
    pub repetitions: usize,
    /// 1-based clock mode.
    pub clock_mode: usize,
    pub n_max: usize,
    pub initial_state: InitialState,
    pub residual_gate: f64,
    pub enforce_gate: bool,
    pub quadrature: QuadratureOptions,
}

impl ScenarioConfig {
    /// Build from SI inputs (s, m, m/s²).
    #[allow(clippy::too_many_arguments)]
    pub fn from_si(
        t_a_s: f64,
        t_i_s: f64,
        length_m: f64,
        acceleration_mps2: f64,
        repetitions: usize,
        clock_mode: usize,
        n_max: usize,
        initial_state: InitialState,
    ) -> Self {
        Self {
            t_a: seconds_to_natural(t_a_s),
            t_i: seconds_to_natural(t_i_s),
            length: length_m,
            acceleration: acceleration_to_natural(acceleration_mps2),
            repetitions,
            clock_mode,
            n_max,
            initial_state,
            residual_gate: DEFAULT_RESIDUAL_GATE,
            enforce_gate: true,
            quadrature: QuadratureOptions::default(),
        }
    }

    /// `t_a = 1 ns`, `t_i = 0`, `L = 1.1 cm`, `a = 1.7e15 m/s²`, 500
    /// repetitions, mode 1, `n_max = 20`.
    pub fn reference_scenario(initial_state: InitialState) -> Self {
        Self::from_si(1e-9, 0.0, 0.011, 1.7e15, 500, 1, 20, initial_state)
    }

    pub fn h(&self) -> f64 {
        self.acceleration.abs() * self.length
    }

    /// Angular frequency of the clock mode at rest, per unit natural time.
    pub fn clock_frequency(&self) -> f64 {
        self.clock_mode as f64 * PI / self.length
    }

    pub fn validate(&self) -> Result<(), ClockError> {
        let bad = |msg: String| Err(ClockError::InvalidConfig(msg));
        if !(self.length > 0.0) || !self.length.is_finite() {
            return bad(format!("cavity length {} must be positive", self.length));
        }
        if !(self.t_a > 0.0) || !self.t_a.is_finite() {
            return bad(format!("acceleration time {} must be positive", self.t_a));
        }
        if !(self.t_i >= 0.0) || !self.t_i.is_finite() {
            return bad(format!("inertial time {} must be non-negative", self.t_i));
        }
        if !self.acceleration.is_finite() {
            return bad(format!("acceleration {} must be finite", self.acceleration));
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.clock_mode == 0 {
            return bad("clock mode is 1-based".into());
        }
        if self.clock_mode + INTERIOR_MARGIN > self.n_max {
            return bad(format!(
                "clock mode {} needs n_max >= {}, got {}",
                self.clock_mode,
                self.clock_mode + INTERIOR_MARGIN,
                self.n_max
            ));
        }
        if !(self.residual_gate > 0.0) {
            return bad(format!(
                "residual gate {} must be positive",
                self.residual_gate
            ));
        }
        if self.h() >= 2.0 {
            return Err(ClockError::HorizonCrossing(self.h()));
        }
        self.initial_state.state()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioResult {
    pub h: f64,
    pub tau_alice: f64,
    pub tau_rob_pointlike: f64,
    pub tau_rob_classical_extended: f64,
    /// Rob's cavity-clock reading, `θ/ω_k`, with all effects.
    pub tau_rob_clock_full: f64,
    /// Same, with particle creation removed.
    pub tau_rob_clock_mm_only: f64,
    /// Unwrapped phase accrued by Rob's clock during the trip.
    pub theta_full: f64,
    pub theta_mm_only: f64,
    /// `ω_k τ_alice - θ_full`: Alice's cavity at rest accrues `ω_k τ_alice`,
    /// identical to a pointlike clock at rest.
    pub phase_difference_vs_alice: f64,
    /// Share of the twins' time dilation due to particle creation alone, %.
    pub pc_fraction: f64,
    pub qfi_before: f64,
    pub qfi_after: f64,
    pub qfi_after_mm_only: f64,
    /// Symplectic residual `(ε₁, ε₂)` of the junction on the interior block.
    pub junction_residual: (f64, f64),
    pub artanh_clipped: bool,
}

impl ScenarioResult {
    pub fn qfi_change_pct(&self) -> Result<f64, MetrologyError> {
        qfi_change_pct(self.qfi_before, self.qfi_after)
    }

    pub fn qfi_change_pct_mm_only(&self) -> Result<f64, MetrologyError> {
        qfi_change_pct(self.qfi_before, self.qfi_after_mm_only)
    }
}

/// Trajectory maps of a scenario, computed once and reusable across
/// initial states.
#[derive(Debug, Clone)]
pub struct PreparedTwin {
    config: ScenarioConfig,
    trajectory: Trajectory,
    block_full: BogoliubovMap,
    block_mm: BogoliubovMap,
    map_full: BogoliubovMap,
    map_mm: BogoliubovMap,
    junction_residual: (f64, f64),
    tau_alice: f64,
    tau_rob: f64,
    tau_rob_classical: f64,
}

pub fn prepare_twin(config: &ScenarioConfig) -> Result<PreparedTwin, ClockError> {
    config.validate()?;
    let trajectory = Trajectory::twin(
        config.t_a,
        config.t_i,
        config.acceleration,
        config.repetitions,
    )?;
    let (tau_rob, tau_alice) = trajectory.elapsed_times();
    let (accelerated, inertial) = trajectory.split_durations();
    let tau_rob_classical = inertial + accelerated * classical_cavity_ratio(config.h())?;

    let interior = config.clock_mode + INTERIOR_MARGIN;
    let options = |variant| MapOptions {
        quadrature: config.quadrature,
        variant,
    };
    let mut full = TrajectoryMapper::new(config.length, config.n_max, options(MapVariant::Full))?;
    let mut junction_residual = (0.0, 0.0);
    if config.acceleration != 0.0 {
        let junction = full.junction(config.acceleration)?;
        junction_residual = junction.symplectic_residual(interior);
        let worst = junction_residual.0.max(junction_residual.1);
        if worst > config.residual_gate {
            if config.enforce_gate {
                return Err(ClockError::ResidualGate {
                    residual: worst,
                    threshold: config.residual_gate,
                    interior,
                });
            }
            log::warn!(
                "junction residual {worst:e} exceeds gate {:e}; continuing",
                config.residual_gate
            );
        }
    }
    let block_full = full.block_map(&trajectory)?;
    let mut mm = TrajectoryMapper::new(
        config.length,
        config.n_max,
        options(MapVariant::ModeMixingOnly),
    )?;
    let block_mm = mm.block_map(&trajectory)?;
    let reps = trajectory.repetitions();
    Ok(PreparedTwin {
        config: *config,
        map_full: block_full.power(reps),
        map_mm: block_mm.power(reps),
        block_full,
        block_mm,
        trajectory,
        junction_residual,
        tau_alice,
        tau_rob,
        tau_rob_classical,
    })
}

/// Phase read from the clock state, with its ambiguity period.
fn clock_phase(params: &GaussianParams, displaced: bool) -> (f64, f64) {
    if displaced {
        (params.phase, 2.0 * PI)
    } else {
        (0.5 * params.ellipse_orientation(), PI)
    }
}

/// `nominal + δ` with `δ ≡ raw - nominal` reduced into one period.
fn unwrap_near(raw: f64, nominal: f64, period: f64) -> f64 {
    let delta = raw - nominal;
    let reduced = wrap_angle(delta * 2.0 * PI / period) * period / (2.0 * PI);
    nominal + reduced
}

impl PreparedTwin {
    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn map_full(&self) -> &BogoliubovMap {
        &self.map_full
    }

    pub fn map_mode_mixing_only(&self) -> &BogoliubovMap {
        &self.map_mm
    }

    pub fn junction_residual(&self) -> (f64, f64) {
        self.junction_residual
    }

    /// Phase accrued by a classical extended clock over `blocks` blocks.
    fn nominal_phase(&self, blocks: usize) -> f64 {
        let per_block = self.tau_rob_classical / self.trajectory.repetitions() as f64;
        self.config.clock_frequency() * per_block * blocks as f64
    }

    fn accrued_phase(
        &self,
        map: &BogoliubovMap,
        initial: &InitialState,
        blocks: usize,
    ) -> Result<(f64, GaussianParams), ClockError> {
        let k = self.config.clock_mode;
        let start = initial.state()?;
        let (theta0, period) = clock_phase(&extract_params(&start)?, initial.displaced());
        let params = extract_params(&apply_reduced(map, k, &start)?)?;
        let (raw, _) = clock_phase(&params, initial.displaced());
        let theta = unwrap_near(raw - theta0, self.nominal_phase(blocks), period);
        Ok((theta, params))
    }

    pub fn evaluate(&self, initial: &InitialState) -> Result<ScenarioResult, ClockError> {
        let reps = self.trajectory.repetitions();
        let omega = self.config.clock_frequency();
        let before = extract_params(&initial.state()?)?;
        let (theta_full, after) = self.accrued_phase(&self.map_full, initial, reps)?;
        let (theta_mm, after_mm) = self.accrued_phase(&self.map_mm, initial, reps)?;

        let tau_full = theta_full / omega;
        let tau_mm = theta_mm / omega;
        let dilation = self.tau_alice - tau_full;
        let pc_share = tau_mm - tau_full;
        let pc_fraction = if pc_share == 0.0 || dilation == 0.0 {
            0.0
        } else {
            100.0 * pc_share / dilation
        };
        Ok(ScenarioResult {
            h: self.config.h(),
            tau_alice: self.tau_alice,
            tau_rob_pointlike: self.tau_rob,
            tau_rob_classical_extended: self.tau_rob_classical,
            tau_rob_clock_full: tau_full,
            tau_rob_clock_mm_only: tau_mm,
            theta_full,
            theta_mm_only: theta_mm,
            phase_difference_vs_alice: omega * self.tau_alice - theta_full,
            pc_fraction,
            qfi_before: phase_qfi(&before),
            qfi_after: phase_qfi(&after),
            qfi_after_mm_only: phase_qfi(&after_mm),
            junction_residual: self.junction_residual,
            artanh_clipped: before.clipped || after.clipped || after_mm.clipped,
        })
    }

    /// Phase difference to Alice after each of `1..=repetitions` blocks,
    /// by direct iteration of the block map.
    pub fn phase_difference_series(&self, initial: &InitialState) -> Result<Vec<f64>, ClockError> {
        let reps = self.trajectory.repetitions();
        let omega = self.config.clock_frequency();
        let alice_per_block = self.tau_alice / reps as f64;
        let mut map = BogoliubovMap::identity(self.config.n_max);
        let mut out = Vec::with_capacity(reps);
        for r in 1..=reps {
            map = self.block_full.after(&map)?;
            let (theta, _) = self.accrued_phase(&map, initial, r)?;
            out.push(omega * alice_per_block * r as f64 - theta);
        }
        Ok(out)
    }

    /// Block map with or without particle creation.
    pub fn block_map(&self, variant: MapVariant) -> &BogoliubovMap {
        match variant {
            MapVariant::Full => &self.block_full,
            MapVariant::ModeMixingOnly => &self.block_mm,
        }
    }
}

pub fn run_twin(config: &ScenarioConfig) -> Result<ScenarioResult, ClockError> {
    prepare_twin(config)?.evaluate(&config.initial_state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Cavity length at fixed acceleration.
    Length,
    /// `h = aL` at fixed length (acceleration varies).
    H,
    /// Mean particle number of the initial state.
    MeanN,
    /// Initial phase `θ₀`.
    Theta0,
}

impl SweepVariable {
    fn changes_maps(self) -> bool {
        matches!(self, SweepVariable::Length | SweepVariable::H)
    }

    /// `template` with this variable set to `value`.
    pub fn apply(self, template: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut c = *template;
        match self {
            SweepVariable::Length => c.length = value,
            SweepVariable::H => {
                let sign = if template.acceleration < 0.0 {
                    -1.0
                } else {
                    1.0
                };
                c.acceleration = sign * value / template.length;
            }
            SweepVariable::MeanN => c.initial_state = template.initial_state.with_mean_n(value),
            SweepVariable::Theta0 => c.initial_state = template.initial_state.with_phase(value),
        }
        c
    }
}

/// One result per grid point, in grid order. Points are evaluated in
/// parallel; a failing point does not affect the others.
pub fn sweep(
    template: &ScenarioConfig,
    vary: SweepVariable,
    grid: &[f64],
) -> Result<Vec<Result<ScenarioResult, ClockError>>, ClockError> {
    if grid.is_empty() {
        return Err(ClockError::EmptyGrid);
    }
    if vary.changes_maps() {
        return Ok(grid
            .par_iter()
            .map(|&v| run_twin(&vary.apply(template, v)))
            .collect());
    }
    let prepared = prepare_twin(template)?;
    Ok(grid
        .par_iter()
        .map(|&v| {
            let config = vary.apply(template, v);
            config.validate()?;
            prepared.evaluate(&config.initial_state)
        })
        .collect())
}

/// Proper acceleration (m/s²) of a static observer at Schwarzschild radius
/// `r` (m) around mass `mass` (kg).
pub fn schwarzschild_acceleration(mass: f64, r: f64) -> Result<f64, ClockError> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(ClockError::InvalidConfig(format!(
            "mass {mass} must be positive"
        )));
    }
    let r_s = schwarzschild_radius(mass);
    if !(r > r_s) || !r.is_finite() {
        return Err(ClockError::InsideHorizon { r, r_s });
    }
    let f = 1.0 - r_s / r;
    Ok(SPEED_OF_LIGHT * SPEED_OF_LIGHT * r_s / (2.0 * r * r) / f.sqrt())
}

/// `r_s = 2GM/c²`.
pub fn schwarzschild_radius(mass: f64) -> f64 {
    2.0 * GRAVITATIONAL_CONSTANT * mass / (SPEED_OF_LIGHT * SPEED_OF_LIGHT)
}

/// Rindler geometry matching the static observer's acceleration at the
/// cavity center, and `(r - r_s)/r_s` (small means the approximation holds).
pub fn near_horizon_geometry(
    mass: f64,
    r: f64,
    length: f64,
) -> Result<(RindlerGeometry, f64), ClockError> {
    let a = schwarzschild_acceleration(mass, r)?;
    let r_s = schwarzschild_radius(mass);
    let geometry = rindler_geometry(acceleration_to_natural(a), length)?;
    Ok((geometry, (r - r_s) / r_s))
}
