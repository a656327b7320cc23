//! Core types: system parameters, basis conventions, density matrices and
//! detector geometry.

use ndarray::{array, Array2};
use ndarray_linalg::{Eigh, UPLO};

use crate::linalg;
use crate::{Error, Result, C64};

/// Hilbert-space dimension of the two-atom system.
pub const DIM: usize = 4;

pub(crate) const HERMITICITY_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-12;
pub(crate) const POSITIVITY_FLOOR: f64 = -1e-10;
/// Relaxed positivity floor for states sampled from long integrations.
pub(crate) const POSITIVITY_FLOOR_SAMPLED: f64 = -1e-8;

/// Physical inputs. `omega` is the Rabi half-amplitude (the drive Rabi
/// frequency is `2 omega`), `delta` the shift of the doubly excited level,
/// `gamma_s` and `gamma_d` the radiative and non-radiative half-rates.
/// Everything is expressed in units of a common reference rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    omega: f64,
    delta: f64,
    gamma_s: f64,
    gamma_d: f64,
}

impl SystemParams {
    pub fn new(omega: f64, delta: f64, gamma_s: f64, gamma_d: f64) -> Result<Self> {
        let all_finite =
            omega.is_finite() && delta.is_finite() && gamma_s.is_finite() && gamma_d.is_finite();
        if !all_finite {
            return Err(Error::InvalidParams("all rates must be finite".into()));
        }
        if gamma_s < 0.0 || gamma_d < 0.0 {
            return Err(Error::InvalidParams(format!(
                "decay rates must be nonnegative (gamma_s = {gamma_s}, gamma_d = {gamma_d})"
            )));
        }
        if gamma_s + gamma_d <= 0.0 {
            return Err(Error::InvalidParams(
                "total decay rate gamma_s + gamma_d must be positive".into(),
            ));
        }
        Ok(Self { omega, delta, gamma_s, gamma_d })
    }

    /// Build from the dimensionless ratios used on every figure axis:
    /// `omega/gamma`, `delta/gamma` and the radiative fraction
    /// `gamma_s/gamma`, with the total rate normalized to 1.
    pub fn dimensionless(omega: f64, delta: f64, gamma_s_frac: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma_s_frac) {
            return Err(Error::InvalidParams(format!(
                "gamma_s fraction must lie in [0, 1], got {gamma_s_frac}"
            )));
        }
        Self::new(omega, delta, gamma_s_frac, 1.0 - gamma_s_frac)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    pub fn gamma_d(&self) -> f64 {
        self.gamma_d
    }

    /// Total half-width `gamma = gamma_s + gamma_d`.
    pub fn gamma(&self) -> f64 {
        self.gamma_s + self.gamma_d
    }
}

/// Ordering convention for the four two-atom levels.
///
/// `Dicke` orders the collective states `(ee, s, a, gg)` with
/// `s = (eg + ge)/sqrt(2)` symmetric and `a = (eg - ge)/sqrt(2)`
/// antisymmetric. `Product` orders the bare states `(ee, eg, ge, gg)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Dicke,
    Product,
}

impl Basis {
    pub fn labels(self) -> [&'static str; 4] {
        match self {
            Basis::Dicke => ["ee", "s", "a", "gg"],
            Basis::Product => ["ee", "eg", "ge", "gg"],
        }
    }
}

/// Change-of-basis matrix: columns are the Dicke states expressed in the
/// product basis. Real, symmetric and involutory, so it serves both
/// directions of the transform.
pub(crate) fn basis_change_matrix() -> Array2<C64> {
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    array![
        [one, zero, zero, zero],
        [zero, r, r, zero],
        [zero, r, -r, zero],
        [zero, zero, zero, one],
    ]
}

/// A 4x4 Hermitian unit-trace positive-semidefinite matrix tagged with the
/// basis its entries refer to.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    entries: Array2<C64>,
    basis: Basis,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace to 1e-12 and positivity of the
    /// spectrum down to -1e-10.
    pub fn new(entries: Array2<C64>, basis: Basis) -> Result<Self> {
        Self::with_positivity_floor(entries, basis, POSITIVITY_FLOOR)
    }

    pub(crate) fn with_positivity_floor(
        entries: Array2<C64>,
        basis: Basis,
        floor: f64,
    ) -> Result<Self> {
        if entries.dim() != (DIM, DIM) {
            return Err(Error::InvalidParams(format!(
                "density matrix must be {DIM}x{DIM}, got {:?}",
                entries.dim()
            )));
        }
        let herm_dev = linalg::max_abs(&(&entries - &linalg::dagger(&entries)));
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: herm_dev });
        }
        let trace_dev = (linalg::trace(&entries) - C64::new(1.0, 0.0)).norm();
        if trace_dev > TRACE_TOL {
            return Err(Error::TraceNotOne { deviation: trace_dev });
        }
        let spectrum = linalg::hermitize(&entries).eigh(UPLO::Lower)?.0;
        if let Some(&lowest) = spectrum.iter().min_by(|x, y| x.total_cmp(y)) {
            if lowest < floor {
                return Err(Error::NotPositive { eigenvalue: lowest });
            }
        }
        Ok(Self { entries, basis })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[[row, col]]
    }

    /// Re-expresses the state in `target`; a no-op when already there.
    pub fn to_basis(&self, target: Basis) -> DensityMatrix {
        basis_transform(self, target)
    }
}

/// Unitary change between the Dicke and product orderings. Round trips are
/// exact to floating-point rounding; trace and spectrum are untouched.
pub fn basis_transform(rho: &DensityMatrix, target: Basis) -> DensityMatrix {
    if rho.basis == target {
        return rho.clone();
    }
    let u = basis_change_matrix();
    let entries = u.dot(&rho.entries).dot(&u);
    DensityMatrix { entries, basis: target }
}

/// Rank-one projector onto a named basis state of the given convention.
pub fn pure_state(label: &str, basis: Basis) -> Result<DensityMatrix> {
    let idx = basis
        .labels()
        .iter()
        .position(|l| *l == label)
        .ok_or_else(|| Error::UnknownLabel { label: label.to_owned(), basis })?;
    let mut entries: Array2<C64> = Array2::zeros((DIM, DIM));
    entries[[idx, idx]] = C64::new(1.0, 0.0);
    Ok(DensityMatrix { entries, basis })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    First,
    Second,
}

/// Reduced 2x2 state of one atom, ordered `(e, g)`.
pub fn partial_trace(rho: &DensityMatrix, kept: Atom) -> Array2<C64> {
    let p = rho.to_basis(Basis::Product);
    let r = &p.entries;
    match kept {
        Atom::First => array![
            [r[[0, 0]] + r[[1, 1]], r[[0, 2]] + r[[1, 3]]],
            [r[[2, 0]] + r[[3, 1]], r[[2, 2]] + r[[3, 3]]],
        ],
        Atom::Second => array![
            [r[[0, 0]] + r[[2, 2]], r[[0, 1]] + r[[2, 3]]],
            [r[[1, 0]] + r[[3, 2]], r[[1, 1]] + r[[3, 3]]],
        ],
    }
}

/// Detector phases `phi_i = k_L r_i . (x1 - x2)` for the two detection
/// directions. Phases are the primary inputs; positions only ever enter
/// through them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorGeometry {
    pub phi1: f64,
    pub phi2: f64,
}

impl DetectorGeometry {
    pub fn new(phi1: f64, phi2: f64) -> Result<Self> {
        if !phi1.is_finite() || !phi2.is_finite() {
            return Err(Error::InvalidParams("detector phases must be finite".into()));
        }
        Ok(Self { phi1, phi2 })
    }

    /// Phases from detection directions and the atom separation vector,
    /// the latter measured in units of the transition wavelength:
    /// `phi_i = 2 pi (dir_i . separation)` with `dir_i` normalized.
    pub fn from_directions(dir1: [f64; 3], dir2: [f64; 3], separation: [f64; 3]) -> Result<Self> {
        let phi = |dir: [f64; 3]| -> Result<f64> {
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::InvalidParams(
                    "detection direction must be a nonzero finite vector".into(),
                ));
            }
            let dot: f64 = dir.iter().zip(&separation).map(|(d, s)| d * s).sum();
            Ok(2.0 * std::f64::consts::PI * dot / norm)
        };
        Self::new(phi(dir1)?, phi(dir2)?)
    }
}
