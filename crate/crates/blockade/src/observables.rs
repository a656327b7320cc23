//! Scalar readouts: excitation probabilities, Dicke populations and the
//! blockade diagnostic ratio `P_ee / P_e^2`.

use crate::linalg::max_abs;
use crate::model::{partial_trace, Atom, Basis, DensityMatrix, SystemParams};
use crate::steady::{alpha, normalization};
use crate::{Error, Result};

const EXCHANGE_TOL: f64 = 1e-9;

/// Excited-state population of either atom, `<e| tr_1 rho |e>`.
///
/// Defined only for exchange-symmetric states; the two reduced states are
/// compared rather than silently averaged, since a mismatch indicates an
/// upstream bug.
pub fn excitation_probability(rho: &DensityMatrix) -> Result<f64> {
    let r1 = partial_trace(rho, Atom::First);
    let r2 = partial_trace(rho, Atom::Second);
    let deviation = max_abs(&(&r1 - &r2));
    if deviation > EXCHANGE_TOL {
        return Err(Error::AsymmetricState { deviation });
    }
    Ok(r1[[0, 0]].re)
}

/// Probability of finding both atoms excited, the `(ee, ee)` entry.
pub fn double_excitation_probability(rho: &DensityMatrix) -> f64 {
    rho.entry(0, 0).re
}

/// Populations of the four Dicke levels `(ee, s, a, gg)`.
pub fn dicke_populations(rho: &DensityMatrix) -> [f64; 4] {
    let d = rho.to_basis(Basis::Dicke);
    [d.entry(0, 0).re, d.entry(1, 1).re, d.entry(2, 2).re, d.entry(3, 3).re]
}

/// Steady-state ratio `P_ee / P_e^2` in closed form:
///
///   (64 omega^4 + 4 (4 omega^2 + gamma^2) |alpha|^2) / (8 omega^2 + |alpha|^2)^2
///
/// Equal to 1 exactly when the shift vanishes, decreasing in |delta| at
/// fixed drive, and recovering 1 as the drive saturates the pair.
pub fn blockade_ratio_analytic(params: &SystemParams) -> Result<f64> {
    let o2 = params.omega() * params.omega();
    if o2 == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let g2 = params.gamma() * params.gamma();
    let aa = alpha(params).norm_sqr();
    let num = 64.0 * o2 * o2 + 4.0 * (4.0 * o2 + g2) * aa;
    let den = 8.0 * o2 + aa;
    Ok(num / (den * den))
}

/// The same ratio read off a steady-state matrix instead of the closed form.
pub fn blockade_ratio_from_state(rho: &DensityMatrix) -> Result<f64> {
    let pe = excitation_probability(rho)?;
    if pe <= 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(double_excitation_probability(rho) / (pe * pe))
}

/// Single-excitation probability of the steady state in closed form,
/// `omega^2 (8 omega^2 + |alpha|^2) / N`.
pub fn steady_excitation_analytic(params: &SystemParams) -> f64 {
    let o2 = params.omega() * params.omega();
    let aa = alpha(params).norm_sqr();
    o2 * (8.0 * o2 + aa) / normalization(params)
}
