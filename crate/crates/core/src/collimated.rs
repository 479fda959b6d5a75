//! Collimated-beam Sagnac models.
//!
//! Two closed-form routes to the dark-port profile: the reexponentiated
//! weak-value amplitude and the classical beamsplitter/mirror matrix chain
//! `E_out = B M B E_in`. Both put the dark-port peak at `x = -4 k sigma^2 / phi`.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Result, WeakBeamError};
use crate::field::{Grid, SampledField};
use crate::measure::{self, DeflectionReport, SignConvention};
use crate::wv::{self, WEAK_REGIME_THRESHOLD};

/// Samples per beam radius required by grid-sampled operations.
pub const MIN_SAMPLES_PER_SIGMA: f64 = 16.0;
/// Default sample count of a collimated grid.
pub const DEFAULT_SAMPLES: usize = 4096;
/// Default collimated window, in units of `sigma` (i.e. `+-8 sigma`).
pub const DEFAULT_WINDOW_FACTOR: f64 = 16.0;

const SINGULAR_SINE: f64 = 1e-12;

/// `(k, sigma, phi)` for the collimated scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollimatedParams {
    /// Mirror-induced transverse wavenumber (1/m).
    pub k: f64,
    /// Gaussian beam radius (m); the amplitude is `exp(-x^2 / 4 sigma^2)`.
    pub sigma: f64,
    /// Relative Sagnac phase (rad).
    pub phi: f64,
}

impl CollimatedParams {
    pub fn new(k: f64, sigma: f64, phi: f64) -> Result<Self> {
        let p = Self { k, sigma, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(WeakBeamError::InvalidGrid(format!(
                "beam radius must be positive and finite, got {}",
                self.sigma
            )));
        }
        if !self.k.is_finite() {
            return Err(WeakBeamError::DegenerateGeometry(
                "kick k must be finite".into(),
            ));
        }
        if !self.phi.is_finite() {
            return Err(WeakBeamError::DegeneratePhase { phi: self.phi });
        }
        Ok(())
    }

    /// 4096 samples spanning `+-8 sigma`.
    pub fn default_grid(&self) -> Grid {
        Grid::centered(DEFAULT_SAMPLES, DEFAULT_WINDOW_FACTOR * self.sigma)
            .expect("default collimated grid is valid for positive sigma")
    }

    pub fn weak_regime_margin(&self) -> Result<f64> {
        wv::weak_regime_margin(self.k, self.sigma, self.phi)
    }
}

/// Plain 2x2 complex matrix acting on the (port a, port b) column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self([[one, zero], [zero, one]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest entry of `|M^dagger M - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        let id = Self::identity();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.0[i][j] - id.0[i][j]).norm());
            }
        }
        worst
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// Two-port optical element whose entries may depend on transverse position.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoPortMatrix {
    Constant(Mat2),
    /// `diag(e^{i(-kx + phi/2)}, e^{-i(-kx + phi/2)})`
    MirrorPhase {
        k: f64,
        phi: f64,
    },
    /// Ordered product; the last factor acts first, as in `B M B`.
    Product(Vec<TwoPortMatrix>),
}

impl TwoPortMatrix {
    pub fn at(&self, x: f64) -> Mat2 {
        match self {
            Self::Constant(m) => *m,
            Self::MirrorPhase { k, phi } => {
                let theta = -k * x + phi / 2.0;
                let zero = Complex64::new(0.0, 0.0);
                Mat2([
                    [Complex64::from_polar(1.0, theta), zero],
                    [zero, Complex64::from_polar(1.0, -theta)],
                ])
            }
            Self::Product(factors) => factors
                .iter()
                .fold(Mat2::identity(), |acc, f| acc * f.at(x)),
        }
    }

    pub fn is_unitary_at(&self, x: f64, tolerance: f64) -> bool {
        self.at(x).unitarity_defect() <= tolerance
    }
}

/// The 50/50 beamsplitter `(1/sqrt 2) [[1, i], [i, 1]]`.
pub fn beamsplitter_matrix() -> TwoPortMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let d = Complex64::new(s, 0.0);
    let o = Complex64::new(0.0, s);
    TwoPortMatrix::Constant(Mat2([[d, o], [o, d]]))
}

/// Opposite momentum kicks plus relative Sagnac phase on the two paths.
pub fn mirror_phase_matrix(params: &CollimatedParams) -> TwoPortMatrix {
    TwoPortMatrix::MirrorPhase {
        k: params.k,
        phi: params.phi,
    }
}

/// The full interferometer `B M B`.
pub fn sagnac_matrix(params: &CollimatedParams) -> TwoPortMatrix {
    TwoPortMatrix::Product(vec![
        beamsplitter_matrix(),
        mirror_phase_matrix(params),
        beamsplitter_matrix(),
    ])
}

/// Fields on both interferometer ports, sampled on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortField {
    port_a: SampledField,
    port_b: SampledField,
}

impl TwoPortField {
    pub fn new(port_a: SampledField, port_b: SampledField) -> Result<Self> {
        if !port_a.same_grid(&port_b) {
            return Err(WeakBeamError::GridMismatch);
        }
        Ok(Self { port_a, port_b })
    }

    /// `field` on port a, nothing on port b.
    pub fn single_input(field: SampledField) -> Self {
        let port_b = SampledField::zeros(*field.grid());
        Self {
            port_a: field,
            port_b,
        }
    }

    pub fn port_a(&self) -> &SampledField {
        &self.port_a
    }

    pub fn port_b(&self) -> &SampledField {
        &self.port_b
    }

    pub fn grid(&self) -> &Grid {
        self.port_a.grid()
    }

    pub fn energy(&self) -> f64 {
        self.port_a.energy() + self.port_b.energy()
    }

    pub fn into_ports(self) -> (SampledField, SampledField) {
        (self.port_a, self.port_b)
    }
}

fn check_collimated_grid(params: &CollimatedParams, grid: &Grid) -> Result<()> {
    let per_sigma = params.sigma / grid.dx();
    if per_sigma < MIN_SAMPLES_PER_SIGMA {
        return Err(WeakBeamError::GridTooCoarse(format!(
            "{per_sigma:.2} samples per beam radius, need >= {MIN_SAMPLES_PER_SIGMA}"
        )));
    }
    // at least 16 samples per fringe period 2 pi / k
    if params.k.abs() * grid.dx() > std::f64::consts::PI / 8.0 {
        return Err(WeakBeamError::GridTooCoarse(format!(
            "kick fringe under-resolved: |k| dx = {:.3e}",
            params.k.abs() * grid.dx()
        )));
    }
    Ok(())
}

/// Propagates both ports through `B M B`.
pub fn classical_chain(params: &CollimatedParams, input: &TwoPortField) -> Result<TwoPortField> {
    params.validate()?;
    check_collimated_grid(params, input.grid())?;
    let chain = sagnac_matrix(params);
    let grid = *input.grid();
    let mut a = Vec::with_capacity(grid.n());
    let mut b = Vec::with_capacity(grid.n());
    for (j, (ea, eb)) in input
        .port_a
        .values()
        .iter()
        .zip(input.port_b.values())
        .enumerate()
    {
        let [oa, ob] = chain.at(grid.x(j)).apply([*ea, *eb]);
        a.push(oa);
        b.push(ob);
    }
    Ok(TwoPortField {
        port_a: SampledField::new(grid, a)?,
        port_b: SampledField::new(grid, b)?,
    })
}

/// Closed-form deflection `d_w = 4 k sigma^2 / phi` (signed with k and phi).
pub fn quantum_deflection(params: &CollimatedParams) -> Result<f64> {
    if params.phi == 0.0 {
        return Err(WeakBeamError::DegeneratePhase { phi: params.phi });
    }
    Ok(4.0 * params.k * params.sigma * params.sigma / params.phi)
}

/// Reexponentiated weak-value amplitude `exp[-(x + d_w)^2 / 4 sigma^2]`,
/// proportional to `exp[-x^2/4 sigma^2 - 2kx/phi]` and peaking at 1.
pub fn quantum_darkport_amplitude(params: &CollimatedParams, x: f64) -> Result<Complex64> {
    let d_w = quantum_deflection(params)?;
    let s2 = params.sigma * params.sigma;
    Ok(Complex64::new(
        (-(x + d_w) * (x + d_w) / (4.0 * s2)).exp(),
        0.0,
    ))
}

/// Renormalized exact dark port `sin(-kx + phi/2) / sin(phi/2) exp(-x^2/4 sigma^2)`.
pub fn classical_darkport_exact(params: &CollimatedParams, x: f64) -> Result<f64> {
    let s = (params.phi / 2.0).sin();
    if s.abs() < SINGULAR_SINE {
        return Err(WeakBeamError::DegeneratePhase { phi: params.phi });
    }
    let envelope = (-x * x / (4.0 * params.sigma * params.sigma)).exp();
    Ok((-params.k * x + params.phi / 2.0).sin() / s * envelope)
}

/// First-order expansion `(1 - 2kx/phi) exp(-x^2/4 sigma^2)` of the dark port.
pub fn classical_darkport_small_angle(params: &CollimatedParams, x: f64) -> Result<f64> {
    if params.phi == 0.0 {
        return Err(WeakBeamError::DegeneratePhase { phi: params.phi });
    }
    let envelope = (-x * x / (4.0 * params.sigma * params.sigma)).exp();
    Ok((1.0 - 2.0 * params.k * x / params.phi) * envelope)
}

/// Unit-energy input beam `exp(-x^2 / 4 sigma^2)` on `grid`.
pub fn input_beam(params: &CollimatedParams, grid: Grid) -> SampledField {
    let s2 = params.sigma * params.sigma;
    let raw = SampledField::from_fn(grid, |x| Complex64::new((-x * x / (4.0 * s2)).exp(), 0.0));
    let e = raw.energy();
    raw.scaled(Complex64::new(1.0 / e.sqrt(), 0.0))
}

/// Sampled renormalized dark port.
pub fn sample_classical_darkport(params: &CollimatedParams, grid: Grid) -> Result<SampledField> {
    let values = grid
        .positions()
        .map(|x| classical_darkport_exact(params, x).map(|v| Complex64::new(v, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    SampledField::new(grid, values)
}

pub fn sample_quantum_darkport(params: &CollimatedParams, grid: Grid) -> Result<SampledField> {
    let values = grid
        .positions()
        .map(|x| quantum_darkport_amplitude(params, x))
        .collect::<Result<Vec<_>>>()?;
    SampledField::new(grid, values)
}

/// Quantum and classical views of one collimated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CollimatedReport {
    /// Measured on `|classical_darkport_exact|^2`; the post-selection
    /// probability is the dark-port energy fraction of the `B M B` chain.
    pub classical: DeflectionReport,
    /// Measured on `|quantum_darkport_amplitude|^2`; the post-selection
    /// probability is `|<post|pre>|^2`.
    pub quantum: DeflectionReport,
}

impl CollimatedReport {
    pub fn quantum_centroid(&self) -> f64 {
        self.quantum.measured_centroid
    }
}

/// Compares both collimated routes with the closed form on `grid`.
pub fn collimated_report(params: &CollimatedParams, grid: Grid) -> Result<CollimatedReport> {
    params.validate()?;
    check_collimated_grid(params, &grid)?;
    let predicted = quantum_deflection(params)?;
    let margin = params.weak_regime_margin()?;
    let pps_predicted = wv::postselection_probability(params.phi);

    let mut warnings = Vec::new();
    if margin > WEAK_REGIME_THRESHOLD {
        warnings.push(format!(
            "weak regime violated: margin {margin:.3e} > {WEAK_REGIME_THRESHOLD}"
        ));
    }
    let half = grid.window() / 2.0;
    if half < 6.0 * params.sigma {
        warnings.push(format!(
            "window +-{half:.3e} m truncates the beam (sigma {:.3e} m)",
            params.sigma
        ));
    }

    let input = input_beam(params, grid);
    let chain = classical_chain(params, &TwoPortField::single_input(input.clone()))?;
    let pps_measured = measure::energy_ratio(chain.port_a(), &input)?;

    let classical_field = sample_classical_darkport(params, grid)?;
    let classical_fit = measure::gaussian_fit(&classical_field)?;
    let classical = DeflectionReport {
        measured_centroid: measure::centroid(&classical_field)?,
        fitted_center: classical_fit.center,
        predicted,
        postselection_probability_measured: pps_measured,
        postselection_probability_predicted: pps_predicted,
        weak_regime_margin: margin,
        diffraction_margin: 0.0,
        sign_convention: SignConvention::DetectorAxisNegative,
        warnings: warnings.clone(),
    };

    let mut quantum_warnings = warnings;
    if predicted.abs() + 4.0 * params.sigma > half {
        quantum_warnings.push(format!(
            "displaced quantum-model beam (d_w = {predicted:.3e} m) leaves the window"
        ));
    }
    let quantum_field = sample_quantum_darkport(params, grid)?;
    let quantum_fit = measure::gaussian_fit(&quantum_field)?;
    let ov = wv::overlap(&wv::sagnac_postselect(), &wv::sagnac_preselect(params.phi));
    let quantum = DeflectionReport {
        measured_centroid: measure::centroid(&quantum_field)?,
        fitted_center: quantum_fit.center,
        predicted,
        postselection_probability_measured: ov.norm_sqr(),
        postselection_probability_predicted: pps_predicted,
        weak_regime_margin: margin,
        diffraction_margin: 0.0,
        sign_convention: SignConvention::DetectorAxisNegative,
        warnings: quantum_warnings,
    };

    Ok(CollimatedReport { classical, quantum })
}
