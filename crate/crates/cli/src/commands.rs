//! One function per subcommand, each writing its tables into the output
//! directory.

use std::path::PathBuf;

use rayon::prelude::*;
use wigstat::relaxation::excess_threshold;
use wigstat::sphere::SphereTransform;
use wigstat::stats::{gaussian_reference, histogram_of, value_histogram};
use wigstat::torus::{symmetric_index, torus_mean, TorusTransform};
use wigstat::wfl::{
    discrete_cluster_amplitudes, discrete_cluster_distribution, random_model_variances, torus_line,
    wfl_sphere, ClusterDistribution, TorusLine,
};
use wigstat::{
    autocorrelation_torus, goe_ensemble_excess, moments_and_excess, propagator_matrix,
    random_state, random_wfl, relaxation_scan, structure_statistics, unitary_eigensystem,
    Autocorrelation, ExcessDistribution, Geometry, MapConfig, QuantumState, RngStream, WFLine,
    WignerSampler,
};

use crate::args::{CommandKind, LineSource, SystemKind};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{write_csv, Value};
use crate::row;

/// Collects the files of one run, all sharing the provenance header.
pub struct Sink {
    header: String,
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(config: &ExperimentConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(&config.out_dir)?;
        Ok(Self {
            header: config.provenance(),
            dir: config.out_dir.clone(),
            written: Vec::new(),
        })
    }

    fn write<I>(&mut self, name: &str, columns: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<Value>>,
    {
        let path = self.dir.join(name);
        write_csv(&path, &self.header, columns, rows)?;
        self.written.push(path);
        Ok(())
    }
}

/// Executes the configured subcommand. Returns summary lines for stdout.
pub fn execute(config: &ExperimentConfig, sink: &mut Sink) -> Result<Vec<String>, CliError> {
    match config.command {
        CommandKind::Evolve => evolve(config, sink),
        CommandKind::ValueStats => value_stats(config, sink),
        CommandKind::Relaxation => relaxation(config, sink),
        CommandKind::Autocorr => autocorr(config, sink),
        CommandKind::EigenExcess => eigen_excess(config, sink),
        CommandKind::GoeExcess => goe_excess(config, sink),
        CommandKind::WflStats => wfl_stats(config, sink),
        CommandKind::Clusters => clusters(config, sink),
    }
}

/// Calls `visit` with the evolved state at every step `t_start..=t_max`.
fn for_each_step(
    config: &ExperimentConfig,
    map: &MapConfig,
    mut visit: impl FnMut(usize, &QuantumState) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let propagator = map.propagator()?;
    let mut psi = config.initial_state()?.build(map.geometry())?;
    for t in 0..=config.t_max {
        if t >= config.t_start {
            visit(t, &psi)?;
        }
        if t < config.t_max {
            psi = propagator.step(&psi)?;
        }
    }
    Ok(())
}

/// Independent random states, one substream per member, in a fixed order.
fn random_ensemble(config: &ExperimentConfig) -> Result<Vec<QuantumState>, CliError> {
    let dim = config.geometry().dim();
    let base = RngStream::new(config.seed, 0);
    Ok((0..config.ensemble as u64)
        .into_par_iter()
        .map(|i| random_state(dim, &mut base.substream(i + 1)))
        .collect::<wigstat::Result<Vec<_>>>()?)
}

fn evolve(config: &ExperimentConfig, sink: &mut Sink) -> Result<Vec<String>, CliError> {
    let map = config.required_map()?;
    match map.geometry() {
        Geometry::Torus(n) => {
            let transform = TorusTransform::new(n)?;
            for_each_step(config, &map, |t, psi| {
                let w = transform.wigner(psi)?;
                let rows = (0..n).flat_map(|i| {
                    let w = &w;
                    (0..n).map(move |j| {
                        let (q, p) = w.cell_position(i, j);
                        row![
                            symmetric_index(i, n),
                            symmetric_index(j, n),
                            q,
                            p,
                            w.values()[[i, j]]
                        ]
                    })
                });
                sink.write(
                    &format!("evolve_t{t:04}.csv"),
                    &["n", "k", "q", "p", "w"],
                    rows,
                )
            })?;
        }
        Geometry::Sphere(spin) => {
            let transform = SphereTransform::shared(spin);
            let quadrature = transform.quadrature();
            let weights = quadrature.sample_weights();
            for_each_step(config, &map, |t, psi| {
                let values = transform.grid_values(&transform.coefficients(psi)?)?;
                let rows = values
                    .iter()
                    .zip(&weights)
                    .enumerate()
                    .map(|(i, (&w, &weight))| {
                        let (theta, phi) = quadrature.node(i);
                        row![theta, phi, weight, w]
                    });
                sink.write(
                    &format!("evolve_t{t:04}.csv"),
                    &["theta", "phi", "weight", "w"],
                    rows,
                )
            })?;
        }
    }
    Ok(vec![format!(
        "wrote {} Wigner grids for steps {}..={}",
        sink.written.len(),
        config.t_start,
        config.t_max
    )])
}

fn value_stats(config: &ExperimentConfig, sink: &mut Sink) -> Result<Vec<String>, CliError> {
    let map = config.required_map()?;
    let sampler = WignerSampler::new(map.geometry())?;
    let mut summaries = Vec::new();
    let mut histograms = Vec::new();
    for_each_step(config, &map, |t, psi| {
        let samples = sampler.samples(psi)?;
        let summary = moments_and_excess(&samples)?;
        let hist = value_histogram(&samples, config.bins, None)?;
        let gaussian = gaussian_reference(summary.mean);
        summaries.push(row![
            t,
            summary.mean,
            summary.variance,
            summary.excess,
            summary.negative_fraction
        ]);
        for (center, density) in hist.centers().zip(&hist.densities) {
            histograms.push(row![t, center, *density, gaussian(center)]);
        }
        Ok(())
    })?;
    let steps = summaries.len();
    sink.write(
        "value_stats.csv",
        &["t", "mean", "variance", "excess", "neg_fraction"],
        summaries,
    )?;
    sink.write(
        "value_hist.csv",
        &["t", "w", "density", "gaussian"],
        histograms,
    )?;
    Ok(vec![format!("value statistics for {steps} steps")])
}

fn relaxation(config: &ExperimentConfig, sink: &mut Sink) -> Result<Vec<String>, CliError> {
    let map = config.required_map()?;
    let series = relaxation_scan(&map, &config.initial_state()?, config.t_max)?;
    let rows = series
        .points
        .iter()
        .filter(|p| p.t >= config.t_start)
        .map(|p| row![p.t, p.summary.excess, p.summary.negative_fraction]);
    sink.write("relaxation.csv", &["t", "excess", "neg_fraction"], rows)?;
    let show = |t: Option<usize>| t.map_or_else(|| "none".to_string(), |t| t.to_string());
    let samples = series.points.first().map_or(0, |p| p.summary.sample_count);
    Ok(vec![format!(
        "t_r={} t_c={} excess_threshold={:.4}",
        show(series.t_relax),
        show(series.t_negative),
        excess_threshold(samples)
    )])
}

/// Elementwise mean of autocorrelations of equal dimension.
fn mean_autocorrelation(parts: &[Autocorrelation]) -> Autocorrelation {
    let scale = 1.0 / parts.len() as f64;
    let mut grid = parts[0].grid.clone();
    let mut radial = parts[0].radial.clone();
    for part in &parts[1..] {
        grid += &part.grid;
        for (acc, r) in radial.iter_mut().zip(&part.radial) {
            acc.1 += r.1;
        }
    }
    grid *= scale;
    radial.iter_mut().for_each(|r| r.1 *= scale);
    Autocorrelation { grid, radial }
}

fn autocorr(config: &ExperimentConfig, sink: &mut Sink) -> Result<Vec<String>, CliError> {
    let n = config.geometry().dim();
    let transform = TorusTransform::new(n)?;
    let parts = match config.system {
        SystemKind::RandomModel => random_ensemble(config)?
            .par_iter()
            .map(|psi| Ok(autocorrelation_torus(&transform.wigner(psi)?)))
            .collect::<wigstat::Result<Vec<_>>>()?,
        _ => {
            let mut parts = Vec::new();
            for_each_step(config, &config.required_map()?, |_, psi| {
                parts.push(autocorrelation_torus(&transform.wigner(psi)?));
                Ok(())
            })?;
            parts
        }
    };
    let c = mean_autocorrelation(&parts);
    let half = (n as i64 - 1) / 2;
    let grid_rows = (-half..=half)
        .flat_map(|dn| (-half..=half).map(move |dm| (dn, dm)))
        .map(|(dn, dm)| row![dn, dm, c.at(dn, dm)]);
    sink.write("autocorr_grid.csv", &["dn", "dm", "c"], grid_rows)?;
    let radial_rows = c
        .radial
        .iter()
        .map(|&(r, value, count)| row![r, value, count]);
    sink.write("autocorr_radial.csv", &["r", "c", "count"], radial_rows)?;
    Ok(vec![format!(
        "averaged {} grids: C(0,0)={:.6} mean off-origin C={:.6}",
        parts.len(),
        c.at(0, 0),
        c.off_origin_mean()
    )])
}

fn eigen_excess(config: &ExperimentConfig, sink: &mut Sink) -> Result<Vec<String>, CliError> {
    let map = config.required_map()?;
    let u = propagator_matrix(&map)?;
    let es = unitary_eigensystem(&u)?;
    let sampler = WignerSampler::new(map.geometry())?;
    let excess = es
        .states
        .par_iter()
        .map(|psi| Ok(moments_and_excess(&sampler.samples(psi)?)?.excess))
        .collect::<wigstat::Result<Vec<f64>>>()?;
    let rows = es
        .phases
        .iter()
        .zip(&excess)
        .enumerate()
        .map(|(k, (&omega, &e))| row![k, omega, e]);
    sink.write("eigen_excess.csv", &["k", "omega", "excess"], rows)?;
    let dist = ExcessDistribution::from_values(excess);
    let cdf_rows = dist.cdf.iter().map(|&(e, p)| row![e, p]);
    sink.write("eigen_excess_cdf.csv", &["excess", "cdf"], cdf_rows)?;
    Ok(vec![format!(
        "{} eigenstates, median |excess| {:.4}, eigen residual {:.2e}",
        es.dim(),
        dist.median_abs(),
        es.max_residual(&u)
    )])
}

fn goe_excess(config: &ExperimentConfig, sink: &mut Sink) -> Result<Vec<String>, CliError> {
    let geometry = config.geometry();
    let mut rng = RngStream::new(config.seed, 0);
    let dist = goe_ensemble_excess(geometry.dim(), config.realizations, geometry, &mut rng)?;
    let rows = dist.cdf.iter().map(|&(e, p)| row![e, p]);
    sink.write("goe_excess.csv", &["excess", "cdf"], rows)?;
    Ok(vec![format!(
        "{} eigenvectors from {} matrices, median |excess| {:.4}",
        dist.values.len(),
        config.realizations,
        dist.median_abs()
    )])
}

/// Every fixed-position line of a torus state, or the equator of a
/// sphere state.
fn state_lines(geometry: Geometry, psi: &QuantumState) -> Result<Vec<WFLine>, CliError> {
    Ok(match geometry {
        Geometry::Torus(n) => {
            let w = TorusTransform::new(n)?.wigner(psi)?;
            let half = (n as i64 - 1) / 2;
            (-half..=half)
                .map(|idx| torus_line(&w, TorusLine::FixedPosition(idx)))
                .collect::<wigstat::Result<_>>()?
        }
        Geometry::Sphere(spin) => vec![wfl_sphere(psi, spin)?],
    })
}

fn wfl_lines(config: &ExperimentConfig) -> Result<Vec<WFLine>, CliError> {
    let geometry = config.geometry();
    match (config.system, config.source) {
        (SystemKind::RandomModel, Some(LineSource::States)) => {
            let per_state = random_ensemble(config)?
                .par_iter()
                .map(|psi| state_lines(geometry, psi))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(per_state.concat())
        }
        (SystemKind::RandomModel, _) => {
            let mut rng = RngStream::new(config.seed, 0);
            Ok((0..config.ensemble)
                .map(|_| random_wfl(geometry, &mut rng))
                .collect::<wigstat::Result<_>>()?)
        }
        _ => {
            let mut lines = Vec::new();
            for_each_step(config, &config.required_map()?, |_, psi| {
                lines.extend(state_lines(geometry, psi)?);
                Ok(())
            })?;
            Ok(lines)
        }
    }
}

/// Per-mode second moments of the line coefficients next to the random
/// model variances.
fn mode_rows(config: &ExperimentConfig, lines: &[WFLine]) -> Result<Vec<Vec<Value>>, CliError> {
    let (model_u0, model) = random_model_variances(config.geometry())?;
    let m = lines[0].modes();
    let count = lines.len() as f64;
    let mut su = vec![0.0; m + 1];
    let mut sv = vec![0.0; m + 1];
    for line in lines {
        for (s, u) in su.iter_mut().zip(line.u()) {
            *s += u * u;
        }
        for (s, v) in sv[1..].iter_mut().zip(line.v()) {
            *s += v * v;
        }
    }
    Ok((0..=m)
        .map(|q| {
            let expected = if q == 0 { model_u0 } else { model[q - 1] };
            let expected_v = if q == 0 { 0.0 } else { model[q - 1] };
            row![q, su[q] / count, sv[q] / count, expected, expected_v]
        })
        .collect())
}

fn wfl_stats(config: &ExperimentConfig, sink: &mut Sink) -> Result<Vec<String>, CliError> {
    let lines = wfl_lines(config)?;
    sink.write(
        "wfl_modes.csv",
        &["q", "var_u", "var_v", "model_var_u", "model_var_v"],
        mode_rows(config, &lines)?,
    )?;
    let stats = structure_statistics(&lines, config.oversample)?;
    let spacing = stats.spacing_histogram(config.bins)?;
    let rows = spacing
        .centers()
        .zip(&spacing.densities)
        .map(|(s, &d)| row![s, d]);
    sink.write("wfl_spacing.csv", &["s", "density"], rows)?;
    let amplitude = stats.amplitude_histogram(config.bins)?;
    let rows = amplitude
        .centers()
        .zip(&amplitude.densities)
        .map(|(a, &d)| row![a, d]);
    sink.write("wfl_amplitude.csv", &["a", "density"], rows)?;
    let joint = stats.joint_histogram()?;
    let ybins = joint.y_edges.len() - 1;
    let center = |edges: &[f64], i: usize| 0.5 * (edges[i] + edges[i + 1]);
    let rows = joint.densities.iter().enumerate().map(|(idx, &d)| {
        let (i, j) = (idx / ybins, idx % ybins);
        row![center(&joint.x_edges, i), center(&joint.y_edges, j), d]
    });
    sink.write("wfl_joint.csv", &["s", "a", "density"], rows)?;
    Ok(vec![format!(
        "{} lines with M={} modes: {} zeros, {} arcs",
        lines.len(),
        stats.modes,
        stats.zero_counts.iter().sum::<usize>(),
        stats.pairs.len()
    )])
}

fn clusters(config: &ExperimentConfig, sink: &mut Sink) -> Result<Vec<String>, CliError> {
    let n = config.geometry().dim();
    let transform = TorusTransform::new(n)?;
    let offset = torus_mean(n);
    let analyse = |psi: &QuantumState| -> wigstat::Result<(ClusterDistribution, Vec<f64>)> {
        let w = transform.wigner(psi)?;
        Ok((
            discrete_cluster_distribution(&w, offset),
            discrete_cluster_amplitudes(&w, offset),
        ))
    };
    let parts = match config.system {
        SystemKind::RandomModel => random_ensemble(config)?
            .par_iter()
            .map(analyse)
            .collect::<wigstat::Result<Vec<_>>>()?,
        _ => {
            let mut parts = Vec::new();
            for_each_step(config, &config.required_map()?, |_, psi| {
                parts.push(analyse(psi)?);
                Ok(())
            })?;
            parts
        }
    };
    let mut total = ClusterDistribution::default();
    let mut amplitudes = Vec::new();
    for (dist, amps) in &parts {
        total.merge(dist);
        amplitudes.extend_from_slice(amps);
    }
    let rows = (1..total.counts.len()).map(|s| {
        let p = total.probability(s);
        row![
            s,
            total.counts[s],
            p,
            0.5_f64.powi(s as i32),
            total.standard_error(p)
        ]
    });
    sink.write(
        "clusters.csv",
        &["s", "count", "probability", "expected", "standard_error"],
        rows,
    )?;
    let a = amplitudes.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let hist = histogram_of(&amplitudes, -a, a, config.bins)?;
    let rows = hist
        .centers()
        .zip(&hist.densities)
        .map(|(c, &d)| row![c, d]);
    sink.write("cluster_amplitude.csv", &["a", "density"], rows)?;
    Ok(vec![format!(
        "{} clusters from {} grids",
        total.total(),
        parts.len()
    )])
}
