//! Two-level pre/post-selection algebra.
//!
//! The which-path degree of freedom of a photon in the Sagnac loop is a
//! two-level system. `|+>` is the first vector component and the which-path
//! observable is `sigma_z = diag(+1, -1)`.

use num_complex::Complex64;

use crate::error::{Result, WeakBeamError};

/// Default tolerance on `|<post|pre>|` below which a weak value is refused.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

/// Default ceiling on [`weak_regime_margin`] for the weak regime to hold.
pub const WEAK_REGIME_THRESHOLD: f64 = 0.1;

const NORM_TOLERANCE: f64 = 1e-12;
const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Normalized pure state of the which-path system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    c_plus: Complex64,
    c_minus: Complex64,
}

impl TwoLevelState {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(c_plus: Complex64, c_minus: Complex64) -> Result<Self> {
        let norm = c_plus.norm_sqr() + c_minus.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(WeakBeamError::InvalidState(format!(
                "|c+|^2 + |c-|^2 = {norm}, expected 1"
            )));
        }
        Ok(Self { c_plus, c_minus })
    }

    /// Builds a state by rescaling arbitrary (nonzero) amplitudes.
    pub fn normalized(c_plus: Complex64, c_minus: Complex64) -> Result<Self> {
        let norm = (c_plus.norm_sqr() + c_minus.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(WeakBeamError::InvalidState(
                "amplitudes must be finite and not both zero".into(),
            ));
        }
        Ok(Self {
            c_plus: c_plus / norm,
            c_minus: c_minus / norm,
        })
    }

    pub fn c_plus(&self) -> Complex64 {
        self.c_plus
    }

    pub fn c_minus(&self) -> Complex64 {
        self.c_minus
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_plus.norm_sqr() + self.c_minus.norm_sqr()
    }

    /// Same ray, multiplied by `exp(i theta)`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self {
            c_plus: self.c_plus * phase,
            c_minus: self.c_minus * phase,
        }
    }
}

/// Hermitian 2x2 observable on the which-path system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable2 {
    entries: [[Complex64; 2]; 2],
}

impl Observable2 {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        for i in 0..2 {
            for j in 0..2 {
                let diff = entries[i][j] - entries[j][i].conj();
                if !entries[i][j].is_finite() || diff.norm() > HERMITIAN_TOLERANCE {
                    return Err(WeakBeamError::InvalidObservable(format!(
                        "entry ({i},{j}) is not the conjugate of entry ({j},{i})"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    /// The which-path observable, `diag(+1, -1)`.
    pub fn pauli_z() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            entries: [[one, zero], [zero, -one]],
        }
    }

    pub fn pauli_x() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            entries: [[zero, one], [one, zero]],
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    fn apply(&self, state: &TwoLevelState) -> (Complex64, Complex64) {
        let e = &self.entries;
        (
            e[0][0] * state.c_plus + e[0][1] * state.c_minus,
            e[1][0] * state.c_plus + e[1][1] * state.c_minus,
        )
    }
}

/// Weak value of an observable between a pre- and a post-selected state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueResult {
    /// `<post|A|pre> / <post|pre>`
    pub weak_value: Complex64,
    /// `|weak_value|`, the amplification factor `A_w`.
    pub magnitude: f64,
    /// `<post|pre>`
    pub overlap: Complex64,
}

/// `<post|pre>`.
pub fn overlap(post: &TwoLevelState, pre: &TwoLevelState) -> Complex64 {
    post.c_plus.conj() * pre.c_plus + post.c_minus.conj() * pre.c_minus
}

/// Weak value with the default orthogonality tolerance.
pub fn weak_value(
    post: &TwoLevelState,
    obs: &Observable2,
    pre: &TwoLevelState,
) -> Result<WeakValueResult> {
    weak_value_with_tolerance(post, obs, pre, ORTHOGONALITY_TOLERANCE)
}

pub fn weak_value_with_tolerance(
    post: &TwoLevelState,
    obs: &Observable2,
    pre: &TwoLevelState,
    tolerance: f64,
) -> Result<WeakValueResult> {
    let ov = overlap(post, pre);
    if ov.norm() <= tolerance {
        return Err(WeakBeamError::OrthogonalPostSelection {
            overlap: ov.norm(),
            tolerance,
        });
    }
    let (a_plus, a_minus) = obs.apply(pre);
    let numerator = post.c_plus.conj() * a_plus + post.c_minus.conj() * a_minus;
    let weak_value = numerator / ov;
    Ok(WeakValueResult {
        weak_value,
        magnitude: weak_value.norm(),
        overlap: ov,
    })
}

/// Pre-selected Sagnac state `(e^{-i phi/2}|+> + e^{i phi/2}|->)/sqrt(2)`.
pub fn sagnac_preselect(phi: f64) -> TwoLevelState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    TwoLevelState {
        c_plus: Complex64::from_polar(s, -phi / 2.0),
        c_minus: Complex64::from_polar(s, phi / 2.0),
    }
}

/// Post-selected (dark-port) state `(|+> - |->)/sqrt(2)`.
pub fn sagnac_postselect() -> TwoLevelState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    TwoLevelState {
        c_plus: Complex64::new(s, 0.0),
        c_minus: Complex64::new(-s, 0.0),
    }
}

/// Probability of exiting the dark port, `sin^2(phi/2)`.
pub fn postselection_probability(phi: f64) -> f64 {
    let s = (phi / 2.0).sin();
    s * s
}

/// Ratio `2|k|sigma/|phi|` of the first-order correction to the leading term.
///
/// The reexponentiated (displaced Gaussian) picture holds while this stays
/// well below one; [`WEAK_REGIME_THRESHOLD`] is the default cut.
pub fn weak_regime_margin(k: f64, sigma: f64, phi: f64) -> Result<f64> {
    if phi == 0.0 || !phi.is_finite() {
        return Err(WeakBeamError::DegeneratePhase { phi });
    }
    if !(sigma > 0.0) {
        return Err(WeakBeamError::InvalidGrid(format!(
            "beam radius must be positive, got {sigma}"
        )));
    }
    Ok(2.0 * k.abs() * sigma / phi.abs())
}
