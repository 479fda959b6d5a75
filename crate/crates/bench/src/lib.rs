//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use weakbeam_core::fourier::{self, DIVERGING_WINDOW_FACTOR};
use weakbeam_core::{CollimatedParams, DivergingGeometry, Grid, SampledField};

pub const K0_633NM: f64 = 2.0 * PI / 633e-9;

/// Unit-energy Gaussian of radius 0.1 mm on `n` samples spanning 64 radii.
pub fn gaussian_fixture(n: usize) -> SampledField {
    let sigma = 1e-4;
    let grid = Grid::centered(n, 64.0 * sigma).expect("valid grid");
    fourier::gaussian_source(sigma, grid).expect("resolved source")
}

/// Weak-regime collimated point (margin 0.05).
pub fn collimated_fixture() -> CollimatedParams {
    CollimatedParams::new(5.0, 5e-4, 0.1).expect("valid params")
}

/// Weak-kick diverging geometry (margin 0.05, diffraction margin 0.01) and its default grid.
pub fn diverging_fixture() -> (DivergingGeometry, Grid) {
    let mut geom = DivergingGeometry {
        k0: K0_633NM,
        s_i: 0.1,
        a: 1e-3,
        l_lm: 0.1,
        l_md: 0.1,
        k: 0.0,
        phi: 0.1,
    };
    geom.k = 0.05 * geom.phi / (2.0 * geom.geometric_radius(geom.l_lm));
    let grid = geom
        .default_grid(DIVERGING_WINDOW_FACTOR)
        .expect("grid fits");
    (geom, grid)
}
