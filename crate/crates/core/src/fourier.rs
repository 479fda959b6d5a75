//! Paraxial Fourier optics on sampled 1-D fields.
//!
//! Conventions: the forward transform kernel is `e^{-ipx}`, the inverse is
//! `e^{+ipx}`, and spectra are scaled by `dx / sqrt(2 pi)` so that
//! `sum |psi|^2 dx == sum |Phi|^2 dp`. Free propagation over `L` multiplies
//! the spectrum by `exp(-i p^2 L / 2 k0)`, a thin lens multiplies the field by
//! `exp(i k0 x^2 / 2 s_i)` and a mirror kick by `exp(i kappa x)`.
//!
//! The same transforms act on a single-photon wavefunction and on a classical
//! field; nothing here distinguishes the two.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, WeakBeamError};
use crate::field::{Grid, SampledField};
use crate::measure::{self, DeflectionReport, SignConvention};
use crate::wv::{self, WEAK_REGIME_THRESHOLD};

/// Smallest sample count chosen by [`DivergingGeometry::default_grid`].
pub const DIVERGING_MIN_SAMPLES: usize = 8192;
/// Default window, in units of the beam radius at the detector.
pub const DIVERGING_WINDOW_FACTOR: f64 = 12.0;
/// Diffraction ratio `lambda s_i / (2 pi a^2)` above which a warning is raised.
pub const DIFFRACTION_THRESHOLD: f64 = 0.02;

const SOURCE_SAMPLES_PER_SIGMA: f64 = 16.0;
const SOURCE_EXTENT_SIGMAS: f64 = 8.0;
/// Spectral support kept unaliased, in momentum standard deviations.
const MOMENTUM_SUPPORT: f64 = 6.0;
/// Relative spectral intensity counted as significant by the aliasing check.
const SIGNIFICANT_SPECTRUM: f64 = 1e-8;

/// Cached forward/inverse transforms for one sample count.
#[derive(Clone)]
pub struct FftPlan {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan").field("n", &self.n).finish()
    }
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, grid: &Grid) {
        assert_eq!(
            grid.n(),
            self.n,
            "FFT plan built for a different sample count"
        );
    }

    /// Spectrum `Phi(p_j)` in FFT bin order (see [`Grid::momentum`]).
    pub fn to_momentum(&self, field: &SampledField) -> Vec<Complex64> {
        self.check(field.grid());
        let mut buf = field.values().to_vec();
        self.forward.process(&mut buf);
        let scale = field.grid().dx() / (2.0 * PI).sqrt();
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }

    /// Inverse of [`FftPlan::to_momentum`].
    pub fn from_momentum(&self, grid: Grid, mut spectrum: Vec<Complex64>) -> Result<SampledField> {
        self.check(&grid);
        self.inverse.process(&mut spectrum);
        // inverse DFT is unnormalized: undo dx/sqrt(2pi) and the factor n
        let scale = (2.0 * PI).sqrt() / (grid.dx() * grid.n() as f64);
        spectrum.iter_mut().for_each(|v| *v *= scale);
        SampledField::new(grid, spectrum)
    }

    /// Free-space propagation over `distance` (m) at optical wavenumber `k0`.
    pub fn propagate(&self, field: &SampledField, distance: f64, k0: f64) -> Result<SampledField> {
        if !(distance >= 0.0) {
            return Err(WeakBeamError::NegativeDistance(distance));
        }
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(WeakBeamError::DegenerateGeometry(format!(
                "optical wavenumber must be positive, got {k0}"
            )));
        }
        if distance == 0.0 {
            return Ok(field.clone());
        }
        let grid = *field.grid();
        let mut spectrum = self.to_momentum(field);
        for (j, v) in spectrum.iter_mut().enumerate() {
            let p = grid.momentum(j);
            *v *= Complex64::from_polar(1.0, -p * p * distance / (2.0 * k0));
        }
        self.from_momentum(grid, spectrum)
    }

    /// Intensity-weighted mean momentum.
    pub fn momentum_centroid(&self, field: &SampledField) -> Result<f64> {
        let spectrum = self.to_momentum(field);
        let grid = field.grid();
        let (mut total, mut first) = (0.0, 0.0);
        for (j, v) in spectrum.iter().enumerate() {
            let w = v.norm_sqr();
            total += w;
            first += grid.momentum(j) * w;
        }
        if !(total > 0.0) {
            return Err(WeakBeamError::NullField);
        }
        Ok(first / total)
    }

    /// Flags propagation whose geometric spread exceeds the half-window.
    pub fn aliasing_risk(
        &self,
        field: &SampledField,
        distance: f64,
        k0: f64,
    ) -> Option<AliasingRisk> {
        let spectrum = self.to_momentum(field);
        let peak = spectrum.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        if !(peak > 0.0) {
            return None;
        }
        let grid = field.grid();
        let max_p = spectrum
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() >= SIGNIFICANT_SPECTRUM * peak)
            .map(|(j, _)| grid.momentum(j).abs())
            .fold(0.0, f64::max);
        let spread = max_p * distance / k0;
        let half_window = grid.window() / 2.0;
        (spread >= half_window).then_some(AliasingRisk {
            distance,
            spread,
            half_window,
        })
    }
}

/// Warning-level diagnostic from [`FftPlan::aliasing_risk`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasingRisk {
    pub distance: f64,
    /// `max |p| L / k0` over the significant spectrum (m).
    pub spread: f64,
    pub half_window: f64,
}

impl std::fmt::Display for AliasingRisk {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "aliasing risk over {:.3e} m: spread {:.3e} m >= half-window {:.3e} m",
            self.distance, self.spread, self.half_window
        )
    }
}

/// Unit-energy Gaussian `exp(-x^2 / 4 sigma^2)` (intensity radius `sigma`).
pub fn gaussian_source(sigma: f64, grid: Grid) -> Result<SampledField> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(WeakBeamError::InvalidGrid(format!(
            "beam radius must be positive, got {sigma}"
        )));
    }
    let per_sigma = sigma / grid.dx();
    if per_sigma < SOURCE_SAMPLES_PER_SIGMA {
        return Err(WeakBeamError::GridTooCoarse(format!(
            "{per_sigma:.2} samples per beam radius, need >= {SOURCE_SAMPLES_PER_SIGMA}"
        )));
    }
    if grid.window() < SOURCE_EXTENT_SIGMAS * sigma {
        return Err(WeakBeamError::GridTooCoarse(format!(
            "window {:.3e} m is narrower than {SOURCE_EXTENT_SIGMAS} beam radii",
            grid.window()
        )));
    }
    let s2 = sigma * sigma;
    let raw = SampledField::from_fn(grid, |x| Complex64::new((-x * x / (4.0 * s2)).exp(), 0.0));
    let e = raw.energy();
    Ok(raw.scaled(Complex64::new(1.0 / e.sqrt(), 0.0)))
}

/// Thin-lens phase `exp(i k0 x^2 / 2 s_i)`; `s_i = inf` is no lens.
pub fn apply_lens(field: &SampledField, s_i: f64, k0: f64) -> Result<SampledField> {
    if s_i == 0.0 || s_i.is_nan() {
        return Err(WeakBeamError::DegenerateImageDistance { s_i });
    }
    let curvature = k0 / (2.0 * s_i);
    if curvature == 0.0 {
        return Ok(field.clone());
    }
    Ok(field
        .clone()
        .modulated(|x| Complex64::from_polar(1.0, curvature * x * x)))
}

/// Free-space propagation; plans a transform for this call only.
pub fn propagate(field: &SampledField, distance: f64, k0: f64) -> Result<SampledField> {
    FftPlan::new(field.grid().n()).propagate(field, distance, k0)
}

/// Transverse momentum kick `exp(i kappa x)`, a spectral shift by `kappa`.
pub fn momentum_kick(field: &SampledField, kappa: f64) -> Result<SampledField> {
    let limit = field.grid().nyquist();
    if !(kappa.abs() < limit) {
        return Err(WeakBeamError::NyquistViolation { kappa, limit });
    }
    if kappa == 0.0 {
        return Ok(field.clone());
    }
    Ok(field
        .clone()
        .modulated(|x| Complex64::from_polar(1.0, kappa * x)))
}

/// Lens, Sagnac loop and detector distances for the diverging-beam setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergingGeometry {
    /// Optical wavenumber `2 pi / lambda` (1/m).
    pub k0: f64,
    /// Image distance of the lens (m). Positive values with the lens phase
    /// `exp(+i k0 x^2 / 2 s_i)` diverge from a virtual point `s_i` before the
    /// lens. `f64::INFINITY` removes the lens.
    pub s_i: f64,
    /// Beam radius at the lens (m).
    pub a: f64,
    /// Lens to mirror (m).
    pub l_lm: f64,
    /// Mirror to detector (m).
    pub l_md: f64,
    /// Mirror kick (1/m).
    pub k: f64,
    /// Sagnac phase (rad).
    pub phi: f64,
}

/// The three planes at which the diverging pipeline exposes its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Lens,
    Mirror,
    Detector,
}

impl DivergingGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.k0 > 0.0 && self.k0.is_finite()) {
            return Err(WeakBeamError::DegenerateGeometry(format!(
                "k0 must be positive and finite, got {}",
                self.k0
            )));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(WeakBeamError::DegenerateGeometry(format!(
                "beam radius a must be positive and finite, got {}",
                self.a
            )));
        }
        for (name, v) in [("l_lm", self.l_lm), ("l_md", self.l_md)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(WeakBeamError::DegenerateGeometry(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        if self.s_i == 0.0 || self.s_i.is_nan() {
            return Err(WeakBeamError::DegenerateImageDistance { s_i: self.s_i });
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

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k0
    }

    /// `1 / s_i`, zero without a lens.
    pub fn inverse_image_distance(&self) -> f64 {
        1.0 / self.s_i
    }

    /// `lambda s_i / (2 pi a^2)`; the paraxial image picture needs this small.
    pub fn diffraction_margin(&self) -> f64 {
        self.s_i.abs() / (self.k0 * self.a * self.a)
    }

    /// Geometric beam radius `z / s_i` times `a` at distance `z` after the lens.
    pub fn geometric_radius(&self, z: f64) -> f64 {
        self.a * (1.0 + z * self.inverse_image_distance()).abs()
    }

    /// Exact Gaussian-beam radius at distance `z` after the lens.
    pub fn beam_radius(&self, z: f64) -> f64 {
        // field exp(i k0 x^2 / 2q); q -> q + z, intensity radius^2 = 1 / (2 k0 Im(1/q))
        let inv_q0 = Complex64::new(0.0, 1.0 / (2.0 * self.k0 * self.a * self.a));
        let inv_q1 = inv_q0 + self.inverse_image_distance();
        let q = 1.0 / inv_q1 + z;
        (1.0 / (2.0 * self.k0 * (1.0 / q).im)).sqrt()
    }

    pub fn plane_distance(&self, plane: Plane) -> f64 {
        match plane {
            Plane::Lens => 0.0,
            Plane::Mirror => self.l_lm,
            Plane::Detector => self.l_lm + self.l_md,
        }
    }

    /// Intensity standard deviation of the beam spectrum after the lens.
    pub fn momentum_spread(&self) -> f64 {
        let envelope = 1.0 / (2.0 * self.a);
        let chirp = self.k0 * self.a * self.inverse_image_distance().abs();
        envelope.hypot(chirp)
    }

    /// `2 |k| sigma_m / |phi|` with `sigma_m` the geometric radius at the mirror.
    pub fn weak_regime_margin(&self) -> Result<f64> {
        wv::weak_regime_margin(self.k, self.geometric_radius(self.l_lm), self.phi)
    }

    /// Default detector-plane radius used to size the window.
    pub fn detector_radius(&self) -> f64 {
        let z = self.l_lm + self.l_md;
        self.geometric_radius(z).max(self.beam_radius(z))
    }

    /// Window `window_factor` detector radii wide and the smallest power of
    /// two >= 8192 samples that passes [`DivergingGeometry::check_grid`].
    pub fn default_grid(&self, window_factor: f64) -> Result<Grid> {
        self.validate()?;
        let window = window_factor * self.detector_radius();
        let p_max = MOMENTUM_SUPPORT * self.momentum_spread() + self.k.abs();
        let by_momentum = (window * p_max / PI).ceil();
        let by_source = (window * SOURCE_SAMPLES_PER_SIGMA / self.a).ceil();
        let needed = by_momentum.max(by_source).max(DIVERGING_MIN_SAMPLES as f64);
        if needed > (1u64 << 26) as f64 {
            return Err(WeakBeamError::GridTooCoarse(format!(
                "geometry needs {needed:.0} samples; refusing to allocate"
            )));
        }
        let grid = Grid::centered((needed as usize).next_power_of_two(), window)?;
        self.check_grid(&grid)?;
        Ok(grid)
    }

    /// Checks that the beam is resolved and contained at lens, mirror and
    /// detector.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        let p_max = MOMENTUM_SUPPORT * self.momentum_spread() + self.k.abs();
        if p_max > grid.nyquist() {
            return Err(WeakBeamError::GridTooCoarse(format!(
                "spectrum reaches {p_max:.3e} 1/m beyond Nyquist {:.3e} 1/m",
                grid.nyquist()
            )));
        }
        for plane in [Plane::Lens, Plane::Mirror, Plane::Detector] {
            let sigma = self.beam_radius(self.plane_distance(plane));
            if grid.window() < SOURCE_EXTENT_SIGMAS * sigma {
                return Err(WeakBeamError::GridTooCoarse(format!(
                    "window {:.3e} m holds fewer than {SOURCE_EXTENT_SIGMAS} beam radii at the {plane:?} plane",
                    grid.window()
                )));
            }
        }
        Ok(())
    }
}

/// Complex propagation length of the arm amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveLength {
    pub l: Complex64,
    /// `lambda s_i / (2 pi a^2)`.
    pub diffraction_ratio: f64,
}

/// `l = l_lm - a^2 s_i / (a^2 + i s_i / 2 k0)`.
pub fn effective_length(geom: &DivergingGeometry) -> Result<EffectiveLength> {
    geom.validate()?;
    let a2 = geom.a * geom.a;
    // a^2 s_i / (a^2 + i s_i/2k0) written with 1/s_i so both limits are finite
    let denom = Complex64::new(a2 * geom.inverse_image_distance(), 1.0 / (2.0 * geom.k0));
    Ok(EffectiveLength {
        l: geom.l_lm - a2 / denom,
        diffraction_ratio: geom.diffraction_margin(),
    })
}

/// Which way an arm is kicked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KickSign {
    Positive,
    Negative,
}

impl KickSign {
    pub fn value(self) -> f64 {
        match self {
            Self::Positive => 1.0,
            Self::Negative => -1.0,
        }
    }
}

/// `exp[(-i k0 x^2 +- 2 i l k x) / 2(l + l_md)]`, unit at `x = 0`.
pub fn arm_amplitude_analytic(
    geom: &DivergingGeometry,
    sign: KickSign,
    x: f64,
) -> Result<Complex64> {
    let l = effective_length(geom)?.l;
    let total = l + geom.l_md;
    if total.norm() == 0.0 {
        return Err(WeakBeamError::DegenerateGeometry("l + l_md = 0".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    let numerator = -i * geom.k0 * x * x + i * 2.0 * sign.value() * l * geom.k * x;
    Ok((numerator / (2.0 * total)).exp())
}

/// Image-to-mirror length `l_lm + s_i`: the virtual image of the diverging
/// lens sits `s_i` before it.
pub fn image_to_mirror_length(geom: &DivergingGeometry) -> f64 {
    geom.l_lm + geom.s_i
}

/// Closed-form `d'_w = (4 k a^2 / phi) l_im (l_im + l_md) / s_i^2`.
pub fn diverging_deflection_formula(geom: &DivergingGeometry, l_im: f64) -> Result<f64> {
    if geom.phi == 0.0 {
        return Err(WeakBeamError::DegeneratePhase { phi: geom.phi });
    }
    if geom.s_i == 0.0 || geom.s_i.is_nan() {
        return Err(WeakBeamError::DegenerateImageDistance { s_i: geom.s_i });
    }
    let inv = geom.inverse_image_distance();
    // l_im = l_lm + s_i with s_i -> inf: l_im / s_i -> 1
    let ratio = if l_im.is_infinite() && geom.s_i.is_infinite() {
        1.0
    } else {
        l_im * inv
    };
    let base = 4.0 * geom.k * geom.a * geom.a / geom.phi;
    Ok(base * ratio * (ratio + geom.l_md * inv))
}

/// Fields along the diverging pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergingFields {
    pub source: SampledField,
    /// Just after the lens.
    pub lens: SampledField,
    /// Incident on the mirror, before the kick.
    pub mirror: SampledField,
    /// Dark port at the detector.
    pub dark: SampledField,
    /// Bright port at the detector.
    pub bright: SampledField,
    pub warnings: Vec<String>,
}

impl DivergingFields {
    pub fn plane(&self, plane: Plane) -> &SampledField {
        match plane {
            Plane::Lens => &self.lens,
            Plane::Mirror => &self.mirror,
            Plane::Detector => &self.dark,
        }
    }
}

/// Runs source -> lens -> `l_lm` -> kick -> `l_md` for both arms and
/// recombines them on the beamsplitter.
///
/// The arm kicked by `-k` carries `e^{+i phi/2}`, as in the collimated mirror
/// matrix, so the dark port is
/// `(1/2)[e^{i phi/2} A(-k) - e^{-i phi/2} A(+k)]`.
pub fn diverging_planes(geom: &DivergingGeometry, grid: Grid) -> Result<DivergingFields> {
    geom.validate()?;
    geom.check_grid(&grid)?;
    let plan = FftPlan::new(grid.n());
    let mut warnings = Vec::new();

    let source = gaussian_source(geom.a, grid)?;
    let lens = apply_lens(&source, geom.s_i, geom.k0)?;
    if let Some(risk) = plan.aliasing_risk(&lens, geom.l_lm, geom.k0) {
        warnings.push(format!("lens->mirror {risk}"));
    }
    let mirror = plan.propagate(&lens, geom.l_lm, geom.k0)?;

    let arm = |kappa: f64| -> Result<(SampledField, Option<AliasingRisk>)> {
        let kicked = momentum_kick(&mirror, kappa)?;
        let risk = plan.aliasing_risk(&kicked, geom.l_md, geom.k0);
        Ok((plan.propagate(&kicked, geom.l_md, geom.k0)?, risk))
    };
    let (minus, plus) = rayon::join(|| arm(-geom.k), || arm(geom.k));
    let (minus, risk_minus) = minus?;
    let (plus, risk_plus) = plus?;
    for risk in [risk_minus, risk_plus].into_iter().flatten() {
        warnings.push(format!("mirror->detector {risk}"));
    }

    let e_plus = Complex64::from_polar(0.5, geom.phi / 2.0);
    let e_minus = Complex64::from_polar(0.5, -geom.phi / 2.0);
    let i = Complex64::new(0.0, 1.0);
    let mut dark = Vec::with_capacity(grid.n());
    let mut bright = Vec::with_capacity(grid.n());
    for (m, p) in minus.values().iter().zip(plus.values()) {
        dark.push(e_plus * m - e_minus * p);
        bright.push(i * (e_plus * m + e_minus * p));
    }

    Ok(DivergingFields {
        source,
        lens,
        mirror,
        dark: SampledField::new(grid, dark)?,
        bright: SampledField::new(grid, bright)?,
        warnings,
    })
}

/// Dark-port field at the detector.
pub fn diverging_pipeline(geom: &DivergingGeometry, grid: Grid) -> Result<SampledField> {
    Ok(diverging_planes(geom, grid)?.dark)
}

/// Measured detector deflection against the closed form.
pub fn diverging_report(geom: &DivergingGeometry, grid: Grid) -> Result<DeflectionReport> {
    let fields = diverging_planes(geom, grid)?;
    let predicted = diverging_deflection_formula(geom, image_to_mirror_length(geom))?;
    let margin = geom.weak_regime_margin()?;
    let diffraction = geom.diffraction_margin();

    let mut warnings = fields.warnings.clone();
    if margin > WEAK_REGIME_THRESHOLD {
        warnings.push(format!(
            "weak regime violated: margin {margin:.3e} > {WEAK_REGIME_THRESHOLD}"
        ));
    }
    if diffraction > DIFFRACTION_THRESHOLD {
        warnings.push(format!(
            "diffraction not negligible: lambda s_i / 2 pi a^2 = {diffraction:.3e}"
        ));
    }
    let fit = measure::gaussian_fit(&fields.dark)?;
    if fit.residual > 0.05 {
        warnings.push(format!(
            "dark port is not Gaussian (fit residual {:.3e})",
            fit.residual
        ));
    }

    Ok(DeflectionReport {
        measured_centroid: measure::centroid(&fields.dark)?,
        fitted_center: fit.center,
        predicted,
        postselection_probability_measured: measure::energy_ratio(&fields.dark, &fields.source)?,
        postselection_probability_predicted: wv::postselection_probability(geom.phi),
        weak_regime_margin: margin,
        diffraction_margin: diffraction,
        sign_convention: SignConvention::DetectorAxisNegative,
        warnings,
    })
}
