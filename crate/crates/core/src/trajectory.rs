//! Piecewise clock trajectories and the Rindler geometry of a rigid cavity.
//!
//! A trajectory is a list of segments, each either inertial or at constant
//! proper acceleration, with durations measured by a pointlike clock at the
//! cavity center. All quantities are in natural units (see [`crate::units`]).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("segment duration must be non-negative and finite, got {0}")]
    NegativeDuration(f64),
    #[error("inertial segment cannot carry a proper acceleration (got {0})")]
    InertialWithAcceleration(f64),
    #[error("proper acceleration must be finite, got {0}")]
    NonFiniteAcceleration(f64),
    #[error("repetitions must be at least 1")]
    ZeroRepetitions,
    #[error("acceleration segment duration must be positive, got {0}")]
    NonPositiveAccelerationTime(f64),
    #[error("Rindler geometry needs a nonzero acceleration")]
    ZeroAcceleration,
    #[error("cavity length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("cavity crosses the Rindler horizon: h = aL = {0} must be < 2")]
    HorizonCrossing(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    Inertial,
    Accelerated,
}

/// One piece of a trajectory. Durations are center proper time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    kind: SegmentKind,
    proper_duration: f64,
    proper_acceleration: f64,
}

impl Segment {
    pub fn new(
        kind: SegmentKind,
        proper_duration: f64,
        proper_acceleration: f64,
    ) -> Result<Self, TrajectoryError> {
        if !(proper_duration >= 0.0) || !proper_duration.is_finite() {
            return Err(TrajectoryError::NegativeDuration(proper_duration));
        }
        if !proper_acceleration.is_finite() {
            return Err(TrajectoryError::NonFiniteAcceleration(proper_acceleration));
        }
        if kind == SegmentKind::Inertial && proper_acceleration != 0.0 {
            return Err(TrajectoryError::InertialWithAcceleration(
                proper_acceleration,
            ));
        }
        Ok(Self {
            kind,
            proper_duration,
            proper_acceleration,
        })
    }

    pub fn inertial(proper_duration: f64) -> Result<Self, TrajectoryError> {
        Self::new(SegmentKind::Inertial, proper_duration, 0.0)
    }

    pub fn accelerated(proper_duration: f64, acceleration: f64) -> Result<Self, TrajectoryError> {
        Self::new(SegmentKind::Accelerated, proper_duration, acceleration)
    }

    pub fn kind(&self) -> SegmentKind {
        self.kind
    }

    pub fn proper_duration(&self) -> f64 {
        self.proper_duration
    }

    pub fn proper_acceleration(&self) -> f64 {
        self.proper_acceleration
    }

    /// Rapidity gained over the segment.
    pub fn rapidity_change(&self) -> f64 {
        self.proper_acceleration * self.proper_duration
    }
}

/// An ordered block of segments traversed `repetitions` times in a row.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    segments: Vec<Segment>,
    repetitions: usize,
}

impl Trajectory {
    pub fn new(segments: Vec<Segment>, repetitions: usize) -> Result<Self, TrajectoryError> {
        if repetitions == 0 {
            return Err(TrajectoryError::ZeroRepetitions);
        }
        Ok(Self {
            segments,
            repetitions,
        })
    }

    /// Round trip `[+a, t_a] [coast t_i] [-a, 2 t_a] [coast t_i] [+a, t_a]`,
    /// repeated. Zero-length coasts are kept so the segment count is always
    /// five per block.
    pub fn twin(
        t_a: f64,
        t_i: f64,
        acceleration: f64,
        repetitions: usize,
    ) -> Result<Self, TrajectoryError> {
        if !(t_a > 0.0) || !t_a.is_finite() {
            return Err(TrajectoryError::NonPositiveAccelerationTime(t_a));
        }
        let block = vec![
            Segment::accelerated(t_a, acceleration)?,
            Segment::inertial(t_i)?,
            Segment::accelerated(2.0 * t_a, -acceleration)?,
            Segment::inertial(t_i)?,
            Segment::accelerated(t_a, acceleration)?,
        ];
        Self::new(block, repetitions)
    }

    /// Segments of a single block.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    /// Total number of segments with repetitions expanded.
    pub fn segment_count(&self) -> usize {
        self.segments.len() * self.repetitions
    }

    /// Every segment in traversal order, repetitions expanded.
    pub fn expanded(&self) -> impl Iterator<Item = &Segment> + '_ {
        (0..self.repetitions).flat_map(move |_| self.segments.iter())
    }

    /// Same trajectory with a single block (or a different repetition count).
    pub fn with_repetitions(&self, repetitions: usize) -> Result<Self, TrajectoryError> {
        Self::new(self.segments.clone(), repetitions)
    }

    /// `self` followed by `other`, flattened into one block.
    pub fn concat(&self, other: &Trajectory) -> Trajectory {
        let segments = self.expanded().chain(other.expanded()).copied().collect();
        Trajectory {
            segments,
            repetitions: 1,
        }
    }

    /// Proper-time and coordinate-time bookkeeping for the cavity center,
    /// starting at rest at the origin.
    pub fn kinematics(&self) -> Kinematics {
        let mut k = Kinematics::default();
        for seg in self.expanded() {
            k.advance(seg);
        }
        k
    }

    /// `(tau_rob, tau_alice)`: center proper time and the matching
    /// coordinate time of the frame the trajectory starts at rest in.
    pub fn elapsed_times(&self) -> (f64, f64) {
        let k = self.kinematics();
        (k.proper_time, k.coordinate_time)
    }

    /// Total center proper time spent in accelerated and inertial segments.
    pub fn split_durations(&self) -> (f64, f64) {
        let mut accelerated = 0.0;
        let mut inertial = 0.0;
        for seg in &self.segments {
            match seg.kind {
                SegmentKind::Accelerated => accelerated += seg.proper_duration,
                SegmentKind::Inertial => inertial += seg.proper_duration,
            }
        }
        let reps = self.repetitions as f64;
        (accelerated * reps, inertial * reps)
    }

    /// Final rapidity and displacement both vanish within `rel_tol`,
    /// relative to the largest rapidity / path scale encountered.
    pub fn is_closed(&self, rel_tol: f64) -> bool {
        let k = self.kinematics();
        let w_scale = k.max_abs_rapidity.max(f64::MIN_POSITIVE);
        let x_scale = k.coordinate_time.max(f64::MIN_POSITIVE);
        k.rapidity.abs() <= rel_tol * w_scale && k.displacement.abs() <= rel_tol * x_scale
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Kinematics {
    pub proper_time: f64,
    pub coordinate_time: f64,
    pub rapidity: f64,
    pub displacement: f64,
    pub max_abs_rapidity: f64,
}

impl Kinematics {
    fn advance(&mut self, seg: &Segment) {
        let tau = seg.proper_duration;
        let w0 = self.rapidity;
        match seg.kind {
            SegmentKind::Inertial => {
                self.coordinate_time += tau * w0.cosh();
                self.displacement += tau * w0.sinh();
            }
            SegmentKind::Accelerated => {
                // (1/a)[sinh(w0 + a tau) - sinh(w0)] written without the 1/a
                // so that a -> 0 is regular.
                let half = 0.5 * seg.proper_acceleration * tau;
                let mid = w0 + half;
                let span = tau * sinhc(half);
                self.coordinate_time += span * mid.cosh();
                self.displacement += span * mid.sinh();
                self.rapidity = w0 + seg.rapidity_change();
            }
        }
        self.proper_time += tau;
        self.max_abs_rapidity = self.max_abs_rapidity.max(self.rapidity.abs());
    }
}

/// sinh(x)/x, accurate near zero.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// Rindler chart of a rigid cavity whose center has proper acceleration `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RindlerGeometry {
    pub chi_center: f64,
    pub chi_inner: f64,
    pub chi_outer: f64,
    pub h: f64,
}

impl RindlerGeometry {
    /// `ln(chi_outer / chi_inner)`, evaluated stably for small `h`.
    pub fn log_ratio(&self) -> f64 {
        log_ratio(self.h)
    }
}

/// `ln((2 + h)/(2 - h)) = 2 artanh(h/2)`.
pub fn log_ratio(h: f64) -> f64 {
    2.0 * (0.5 * h).atanh()
}

/// Geometry for acceleration `a` (1/m, sign ignored) and proper length `length` (m).
pub fn rindler_geometry(a: f64, length: f64) -> Result<RindlerGeometry, TrajectoryError> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(TrajectoryError::InvalidLength(length));
    }
    if a == 0.0 {
        return Err(TrajectoryError::ZeroAcceleration);
    }
    if !a.is_finite() {
        return Err(TrajectoryError::NonFiniteAcceleration(a));
    }
    let a = a.abs();
    let h = a * length;
    if h >= 2.0 {
        return Err(TrajectoryError::HorizonCrossing(h));
    }
    let chi_center = 1.0 / a;
    Ok(RindlerGeometry {
        chi_center,
        chi_inner: chi_center - 0.5 * length,
        chi_outer: chi_center + 0.5 * length,
        h,
    })
}
