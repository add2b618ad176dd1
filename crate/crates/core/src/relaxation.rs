//! Relaxation of Wigner value statistics under a chaotic map, starting from
//! a localized state.

use crate::dynamics::{InitialState, MapConfig, WignerSampler};
use crate::error::{Error, Result};
use crate::stats::{moments_and_excess, StatsSummary};

/// Negative fraction above which negative Wigner values count as
/// established.
pub const NEGATIVE_FRACTION_THRESHOLD: f64 = 0.45;

/// Floor of the excess threshold defining relaxation.
pub const EXCESS_THRESHOLD_FLOOR: f64 = 0.05;

/// `max(0.05, 3 sqrt(24 / n))`: three standard errors of the Gaussian
/// excess estimator over `n` samples, floored.
pub fn excess_threshold(sample_count: usize) -> f64 {
    EXCESS_THRESHOLD_FLOOR.max(3.0 * (24.0 / sample_count as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationPoint {
    pub t: usize,
    pub summary: StatsSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationSeries {
    pub points: Vec<RelaxationPoint>,
    /// First step with `|excess|` below [`excess_threshold`].
    pub t_relax: Option<usize>,
    /// First step with negative fraction above
    /// [`NEGATIVE_FRACTION_THRESHOLD`].
    pub t_negative: Option<usize>,
}

impl RelaxationSeries {
    /// Mean excess over steps `from..=to`.
    pub fn mean_excess(&self, from: usize, to: usize) -> Option<f64> {
        let window: Vec<f64> = self
            .points
            .iter()
            .filter(|p| p.t >= from && p.t <= to)
            .map(|p| p.summary.excess)
            .collect();
        (!window.is_empty()).then(|| window.iter().sum::<f64>() / window.len() as f64)
    }
}

/// Evolves `initial` for `t_max` steps, recording the value statistics of
/// the Wigner function after every step (including `t = 0`).
pub fn relaxation_scan(
    system: &MapConfig,
    initial: &InitialState,
    t_max: usize,
) -> Result<RelaxationSeries> {
    relaxation_scan_with(system, initial, t_max, |_, _| Ok(()))
}

/// As [`relaxation_scan`], additionally handing every state to `visit`.
pub fn relaxation_scan_with(
    system: &MapConfig,
    initial: &InitialState,
    t_max: usize,
    mut visit: impl FnMut(usize, &crate::state::QuantumState) -> Result<()>,
) -> Result<RelaxationSeries> {
    if t_max < 1 {
        return Err(Error::InvalidArgument("t_max must be at least 1".into()));
    }
    let geometry = system.geometry();
    let propagator = system.propagator()?;
    let sampler = WignerSampler::new(geometry)?;
    let mut psi = initial.build(geometry)?;
    let mut points = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            psi = propagator.step(&psi)?;
        }
        visit(t, &psi)?;
        let summary = moments_and_excess(&sampler.samples(&psi)?)?;
        points.push(RelaxationPoint { t, summary });
    }
    let t_relax = points
        .iter()
        .find(|p| p.summary.excess.abs() < excess_threshold(p.summary.sample_count))
        .map(|p| p.t);
    let t_negative = points
        .iter()
        .find(|p| p.summary.negative_fraction > NEGATIVE_FRACTION_THRESHOLD)
        .map(|p| p.t);
    Ok(RelaxationSeries {
        points,
        t_relax,
        t_negative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{Spin, TopParams};
    use crate::torus::TorusMapParams;
    use std::f64::consts::PI;

    #[test]
    fn threshold_floor_and_noise() {
        assert_eq!(excess_threshold(2187 * 2187), 0.05);
        assert!((excess_threshold(100) - 3.0 * 0.24_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sawtooth_relaxes_from_coherent_state() {
        let system = MapConfig::Sawtooth(TorusMapParams::new(0.5, 1, 243).unwrap());
        let init = InitialState::Coherent {
            a: 2.0 * PI / 3.0,
            b: PI / 3.0,
        };
        let series = relaxation_scan(&system, &init, 20).unwrap();
        assert_eq!(series.points.len(), 21);
        let first = series.points[0].summary;
        assert!(first.negative_fraction < 0.2);
        assert!(first.excess > 10.0);
        for p in &series.points {
            assert!((p.summary.mean - 1.0 / 242.0_f64.sqrt()).abs() < 1e-10);
            assert!((p.summary.variance - 1.0).abs() < 1e-10);
        }
        let (tr, tc) = (series.t_relax.unwrap(), series.t_negative.unwrap());
        assert!(tc <= tr, "t_c {tc} t_r {tr}");
    }

    #[test]
    fn kicked_top_moments_stay_exact() {
        let spin = Spin::integer(10).unwrap();
        let system = MapConfig::KickedTop(TopParams::new(10.0, PI / 2.0, spin).unwrap());
        let series =
            relaxation_scan(&system, &InitialState::Coherent { a: 1.0, b: 1.0 }, 5).unwrap();
        for p in &series.points {
            assert!((p.summary.mean - 1.0 / 20.0_f64.sqrt()).abs() < 1e-8);
            assert!((p.summary.variance - 1.0).abs() < 1e-8);
        }
        assert!(relaxation_scan(&system, &InitialState::Basis(0), 0).is_err());
    }
}
