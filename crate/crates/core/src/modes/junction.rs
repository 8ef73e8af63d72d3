use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{kg_inner_product, BogoliubovMap, ModeBasis, ModeError, ModeRef};
use crate::quadrature::QuadratureOptions;
use crate::trajectory::{rindler_geometry, Segment, SegmentKind, Trajectory};

/// Free evolution for `duration` of the basis' own time (`t` or `η`):
/// `α = diag(exp(-iν_n·duration))`, `β = 0`.
pub fn free_phase_map(basis: &ModeBasis, duration: f64) -> BogoliubovMap {
    let phases: Vec<Complex64> = basis
        .frequencies()
        .into_iter()
        .map(|nu| Complex64::from_polar(1.0, -nu * duration))
        .collect();
    BogoliubovMap::diagonal(&phases)
}

/// Minkowski → Rindler basis change for a cavity with `h = aL`, acceleration
/// towards `+x`, on the shared instantaneous-rest slice.
///
/// `α_mn = (ψ_m, φ_n)` and `β_mn = -(ψ_m, φ_n*)` with `ψ` Rindler and `φ`
/// Minkowski modes. Lengths are scaled so that `L = 1`; the result depends
/// on the geometry only through `h`.
pub fn junction_map(
    h: f64,
    n_max: usize,
    opts: &QuadratureOptions,
) -> Result<BogoliubovMap, ModeError> {
    if !(h > 0.0 && h < 2.0) {
        return Err(ModeError::HorizonCrossing(h));
    }
    let chi_center = 1.0 / h;
    let (chi1, chi2) = (chi_center - 0.5, chi_center + 0.5);
    let minkowski = ModeBasis::minkowski(chi1, chi2, n_max)?;
    let rindler = ModeBasis::rindler(chi1, chi2, n_max)?;

    let entries: Vec<Result<(Complex64, Complex64), ModeError>> = (0..n_max * n_max)
        .into_par_iter()
        .map(|idx| {
            let (m, n) = (idx / n_max + 1, idx % n_max + 1);
            let psi = ModeRef::new(&rindler, m);
            let phi = ModeRef::new(&minkowski, n);
            let alpha = kg_inner_product(psi, phi, opts)?;
            let beta = -kg_inner_product(psi, phi.conj(), opts)?;
            Ok((alpha, beta))
        })
        .collect();

    let mut alpha = DMatrix::zeros(n_max, n_max);
    let mut beta = DMatrix::zeros(n_max, n_max);
    for (idx, entry) in entries.into_iter().enumerate() {
        let (a, b) = entry?;
        alpha[(idx / n_max, idx % n_max)] = a;
        beta[(idx / n_max, idx % n_max)] = b;
    }
    BogoliubovMap::new(alpha, beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MapVariant {
    #[default]
    Full,
    /// Junctions reduced to their passive (mode-mixing) part.
    ModeMixingOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MapOptions {
    pub quadrature: QuadratureOptions,
    pub variant: MapVariant,
}

/// Builds whole-trajectory maps for a cavity of fixed proper length,
/// caching one junction per distinct `|a|`.
#[derive(Debug, Clone)]
pub struct TrajectoryMapper {
    length: f64,
    n_max: usize,
    options: MapOptions,
    minkowski: ModeBasis,
    junctions: BTreeMap<u64, (f64, BogoliubovMap)>,
}

impl TrajectoryMapper {
    pub fn new(length: f64, n_max: usize, options: MapOptions) -> Result<Self, ModeError> {
        let minkowski = ModeBasis::minkowski(0.0, length, n_max)?;
        Ok(Self {
            length,
            n_max,
            options,
            minkowski,
            junctions: BTreeMap::new(),
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Junction for acceleration `a` (sign selects the direction).
    pub fn junction(&mut self, a: f64) -> Result<BogoliubovMap, ModeError> {
        let magnitude = a.abs();
        let key = magnitude.to_bits();
        if !self.junctions.contains_key(&key) {
            let geometry = rindler_geometry(magnitude, self.length)?;
            let mut map = junction_map(geometry.h, self.n_max, &self.options.quadrature)?;
            if self.options.variant == MapVariant::ModeMixingOnly {
                map = map.passive_part();
            }
            self.junctions.insert(key, (geometry.h, map));
        }
        let map = &self.junctions[&key].1;
        Ok(if a < 0.0 { map.mirrored() } else { map.clone() })
    }

    /// `(h, junction)` for every acceleration seen so far, in `|a|` order.
    pub fn cached_junctions(&self) -> impl Iterator<Item = (f64, &BogoliubovMap)> + '_ {
        self.junctions.values().map(|(h, m)| (*h, m))
    }

    pub fn segment_map(&mut self, segment: &Segment) -> Result<BogoliubovMap, ModeError> {
        let tau = segment.proper_duration();
        let a = segment.proper_acceleration();
        if segment.kind() == SegmentKind::Inertial || a == 0.0 {
            return Ok(free_phase_map(&self.minkowski, tau));
        }
        let geometry = rindler_geometry(a, self.length)?;
        let rindler = ModeBasis::rindler(geometry.chi_inner, geometry.chi_outer, self.n_max)?;
        let junction = self.junction(a)?;
        let evolve = free_phase_map(&rindler, a.abs() * tau);
        junction.inverse().after(&evolve.after(&junction)?)
    }

    /// Map of a single block. Zero-length segments are skipped and
    /// consecutive segments with equal acceleration are merged.
    pub fn block_map(&mut self, trajectory: &Trajectory) -> Result<BogoliubovMap, ModeError> {
        let mut runs: Vec<(f64, f64)> = Vec::new();
        for seg in trajectory.segments() {
            if seg.proper_duration() == 0.0 {
                continue;
            }
            let a = seg.proper_acceleration();
            match runs.last_mut() {
                Some((last_a, duration)) if *last_a == a => *duration += seg.proper_duration(),
                _ => runs.push((a, seg.proper_duration())),
            }
        }
        let mut total = BogoliubovMap::identity(self.n_max);
        for (a, duration) in runs {
            let seg = if a == 0.0 {
                Segment::inertial(duration)?
            } else {
                Segment::accelerated(duration, a)?
            };
            total = self.segment_map(&seg)?.after(&total)?;
        }
        Ok(total)
    }

    /// Whole-trajectory map: block map raised to the repetition count.
    pub fn map(&mut self, trajectory: &Trajectory) -> Result<BogoliubovMap, ModeError> {
        Ok(self.block_map(trajectory)?.power(trajectory.repetitions()))
    }
}

/// Map for `trajectory` of a cavity with proper length `length` (natural units).
pub fn trajectory_map(
    trajectory: &Trajectory,
    length: f64,
    n_max: usize,
    options: &MapOptions,
) -> Result<BogoliubovMap, ModeError> {
    TrajectoryMapper::new(length, n_max, *options)?.map(trajectory)
}
