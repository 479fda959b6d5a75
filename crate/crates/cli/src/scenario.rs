//! Evaluating a validated config: single runs, sweeps and plane profiles.

use rayon::prelude::*;
use weakbeam_core::collimated::{self, CollimatedParams, TwoPortField};
use weakbeam_core::fourier::{self, DivergingGeometry, Plane};
use weakbeam_core::measure::DeflectionReport;
use weakbeam_core::{Grid, SampledField, WeakBeamError};

use crate::config::{Scenario, ScenarioConfig, ScenarioParams};
use crate::error::CliError;

/// One evaluated point; a run without a sweep yields a single row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub scenario: Scenario,
    /// Swept parameter and its value, absent for single runs.
    pub parameter: Option<String>,
    pub value: Option<f64>,
    pub report: DeflectionReport,
    pub grid: Grid,
}

impl SweepRow {
    pub fn abs_error(&self) -> f64 {
        (self.report.measured_centroid - self.report.signed_prediction()).abs()
    }

    /// `None` when the prediction is zero.
    pub fn relative_error(&self) -> Option<f64> {
        (self.report.predicted != 0.0).then(|| self.report.relative_error())
    }
}

/// The grid a point is evaluated on.
pub fn grid_for(config: &ScenarioConfig, params: &ScenarioParams) -> Result<Grid, WeakBeamError> {
    let wf = config.grid.window_factor;
    match params {
        ScenarioParams::Collimated(p) => {
            p.validate()?;
            Grid::centered(
                config.grid.n.unwrap_or(collimated::DEFAULT_SAMPLES),
                wf * p.sigma,
            )
        }
        ScenarioParams::Diverging(g) => match config.grid.n {
            None => g.default_grid(wf),
            Some(n) => {
                g.validate()?;
                let grid = Grid::centered(n, wf * g.detector_radius())?;
                g.check_grid(&grid)?;
                Ok(grid)
            }
        },
    }
}

fn evaluate(
    scenario: Scenario,
    params: &ScenarioParams,
    grid: Grid,
) -> Result<DeflectionReport, WeakBeamError> {
    match (scenario, params) {
        (Scenario::CollimatedClassical, ScenarioParams::Collimated(p)) => {
            Ok(collimated::collimated_report(p, grid)?.classical)
        }
        (Scenario::CollimatedQuantum, ScenarioParams::Collimated(p)) => {
            Ok(collimated::collimated_report(p, grid)?.quantum)
        }
        (Scenario::Diverging, ScenarioParams::Diverging(g)) => fourier::diverging_report(g, grid),
        _ => Err(WeakBeamError::InvalidState(format!(
            "parameters do not match scenario {}",
            scenario.name()
        ))),
    }
}

fn describe(params: &ScenarioParams, point: Option<(&str, f64)>) -> String {
    match point {
        Some((name, value)) => format!("sweep point {name} = {value:e}"),
        None => {
            let names: &[&str] = match params {
                ScenarioParams::Collimated(_) => &["k", "sigma", "phi"],
                ScenarioParams::Diverging(_) => &["k0", "s_i", "a", "l_lm", "l_md", "k", "phi"],
            };
            names
                .iter()
                .map(|n| format!("{n} = {:e}", params.get(n).unwrap_or(f64::NAN)))
                .collect::<Vec<_>>()
                .join(", ")
        }
    }
}

/// Evaluates every point of the config, in parallel for sweeps. Rows come
/// back in sweep order; regime violations are flagged, never dropped.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<SweepRow>, CliError> {
    let points: Vec<(Option<(String, f64)>, ScenarioParams)> = match &config.sweep {
        None => vec![(None, config.params)],
        Some(sweep) => sweep
            .values()
            .into_iter()
            .map(|v| {
                let params = config
                    .params
                    .with(&sweep.parameter, v)
                    .expect("sweep parameter validated against scenario");
                (Some((sweep.parameter.clone(), v)), params)
            })
            .collect(),
    };

    points
        .par_iter()
        .enumerate()
        .map(|(index, (point, params))| {
            let fail = |source| CliError::Numeric {
                scenario: config.scenario.name(),
                at: describe(params, point.as_ref().map(|(n, v)| (n.as_str(), *v))),
                source,
            };
            let grid = grid_for(config, params).map_err(fail)?;
            let report = evaluate(config.scenario, params, grid).map_err(fail)?;
            Ok(SweepRow {
                index,
                scenario: config.scenario,
                parameter: point.as_ref().map(|(n, _)| n.clone()),
                value: point.as_ref().map(|(_, v)| *v),
                report,
                grid,
            })
        })
        .collect()
}

/// Field at `plane` for the config's base parameters (any sweep is ignored).
///
/// Collimated scenarios only expose the detector plane: the classical route
/// gives the dark port of the beamsplitter-mirror-beamsplitter chain for a
/// unit-energy input, the quantum route the displaced Gaussian amplitude.
pub fn emit_profile(config: &ScenarioConfig, plane: Plane) -> Result<SampledField, CliError> {
    let fail = |source| CliError::Numeric {
        scenario: config.scenario.name(),
        at: describe(&config.params, None),
        source,
    };
    let grid = grid_for(config, &config.params).map_err(fail)?;
    match (config.scenario, &config.params) {
        (Scenario::Diverging, ScenarioParams::Diverging(g)) => {
            Ok(diverging_plane(g, grid, plane).map_err(fail)?)
        }
        (scenario, ScenarioParams::Collimated(p)) => {
            if plane != Plane::Detector {
                return Err(CliError::PlaneUnavailable {
                    scenario: scenario.name(),
                    plane: plane_name(plane),
                });
            }
            let field = if scenario == Scenario::CollimatedQuantum {
                collimated::sample_quantum_darkport(p, grid)
            } else {
                classical_dark_port(p, grid)
            };
            field.map_err(fail)
        }
        _ => unreachable!("config validation pairs scenarios with their parameters"),
    }
}

fn classical_dark_port(p: &CollimatedParams, grid: Grid) -> Result<SampledField, WeakBeamError> {
    let input = collimated::input_beam(p, grid);
    let (dark, _) =
        collimated::classical_chain(p, &TwoPortField::single_input(input))?.into_ports();
    Ok(dark)
}

fn diverging_plane(
    g: &DivergingGeometry,
    grid: Grid,
    plane: Plane,
) -> Result<SampledField, WeakBeamError> {
    Ok(fourier::diverging_planes(g, grid)?.plane(plane).clone())
}

pub fn parse_plane(name: &str) -> Option<Plane> {
    match name {
        "lens" => Some(Plane::Lens),
        "mirror" => Some(Plane::Mirror),
        "detector" => Some(Plane::Detector),
        _ => None,
    }
}

pub fn plane_name(plane: Plane) -> &'static str {
    match plane {
        Plane::Lens => "lens",
        Plane::Mirror => "mirror",
        Plane::Detector => "detector",
    }
}
