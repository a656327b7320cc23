//! Second-order photon correlations between two point detectors.
//!
//! Each detector sees the superposition of both atoms' emission with a
//! geometry-dependent relative phase `phi`, so its annihilation operator is
//! `D(phi) = S1- + exp(i phi) S2-`. The delayed correlation follows from
//! conditioning the steady state on a first detection and propagating the
//! collapsed, unnormalized state forward.

use ndarray::Array2;

use crate::evolution::{evolve_matrix_samples, IntegratorConfig};
use crate::linalg::{dagger, trace};
use crate::model::{basis_change_matrix, Basis, DetectorGeometry, SystemParams, DIM};
use crate::observables::blockade_ratio_analytic;
use crate::steady::{alpha, normalization, steady_state_analytic};
use crate::{Error, Result, C64};

/// Smallest first-detection weight that still conditions a meaningful state.
const FIRST_PHOTON_FLOOR: f64 = 1e-14;
/// Roundoff negatives below this magnitude are reported as zero.
const NEGATIVE_CLIP: f64 = 1e-10;

/// Collective jump operator seen by a detector with relative phase `phase`
/// between the two atoms' emission paths.
pub fn detector_operator(phase: f64, basis: Basis) -> Array2<C64> {
    let e = C64::from_polar(1.0, phase);
    let one = C64::new(1.0, 0.0);
    let mut d = Array2::zeros((DIM, DIM));
    d[[2, 0]] = one;
    d[[3, 1]] = one;
    d[[1, 0]] = e;
    d[[3, 2]] = e;
    match basis {
        Basis::Product => d,
        Basis::Dicke => {
            let u = basis_change_matrix();
            u.dot(&d).dot(&u)
        }
    }
}

/// Zero-delay cross correlation of the two detectors in the driven steady
/// state.
pub fn g2_zero_analytic(params: &SystemParams, geometry: &DetectorGeometry) -> Result<f64> {
    if params.omega() == 0.0 {
        return Err(Error::NoScattering);
    }
    let o2 = params.omega() * params.omega();
    let aa = alpha(params).norm_sqr();
    let n = normalization(params);
    let half = 0.5 * (geometry.phi1 - geometry.phi2);
    let d1 = 8.0 * o2 + aa * (1.0 + geometry.phi1.cos());
    let d2 = 8.0 * o2 + aa * (1.0 + geometry.phi2.cos());
    Ok(4.0 * n * half.cos().powi(2) / (d1 * d2))
}

/// Zero-delay correlation of a detector pair with quarter-wave phase
/// offsets. That arrangement reads the double-to-single excitation ratio
/// directly, which this checks against the population formula.
pub fn monitor_ratio(params: &SystemParams) -> Result<f64> {
    use std::f64::consts::FRAC_PI_2;
    let geometry = DetectorGeometry::new(FRAC_PI_2, FRAC_PI_2)?;
    let reading = g2_zero_analytic(params, &geometry)?;
    let ratio = blockade_ratio_analytic(params)?;
    debug_assert!((reading - ratio).abs() <= 1e-9 * ratio.abs().max(1.0));
    Ok(reading)
}

/// Steady state conditioned on a click at detector 1, in the product basis,
/// along with the detection weight that normalized it.
fn conditioned_state(params: &SystemParams, phi1: f64) -> Result<(Array2<C64>, f64)> {
    let ss = steady_state_analytic(params).to_basis(Basis::Product);
    let d1 = detector_operator(phi1, Basis::Product);
    let collapsed = d1.dot(ss.entries()).dot(&dagger(&d1));
    let weight = trace(&collapsed).re;
    if weight < FIRST_PHOTON_FLOOR {
        return Err(Error::UndetectableFirstPhoton { weight });
    }
    Ok((collapsed / C64::new(weight, 0.0), weight))
}

/// Delayed cross correlation `g2(tau)` for the given delays, in units of
/// `1/gamma`. Delays may repeat and need not be sorted; each must be finite
/// and nonnegative. The curve is normalized so that it tends to one for
/// delays long against the relaxation time.
pub fn g2(
    params: &SystemParams,
    geometry: &DetectorGeometry,
    taus: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>> {
    if params.omega() == 0.0 {
        return Err(Error::NoScattering);
    }
    for &t in taus {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParams(format!(
                "delays must be finite and nonnegative, got {t}"
            )));
        }
    }
    let (rho_c, _) = conditioned_state(params, geometry.phi1)?;
    let ss = steady_state_analytic(params).to_basis(Basis::Product);
    let d2 = detector_operator(geometry.phi2, Basis::Product);
    let n2 = dagger(&d2).dot(&d2);
    let flux = trace(&n2.dot(ss.entries())).re;

    let mut unique = taus.to_vec();
    unique.sort_by(|a, b| a.partial_cmp(b).expect("delays validated finite"));
    unique.dedup();
    let propagated = evolve_matrix_samples(params, Basis::Product, &rho_c, &unique, cfg)?;
    let values: Vec<f64> = propagated
        .iter()
        .map(|m| {
            let v = trace(&n2.dot(m)).re / flux;
            if v < 0.0 && v > -NEGATIVE_CLIP {
                0.0
            } else {
                v
            }
        })
        .collect();

    Ok(taus
        .iter()
        .map(|t| {
            let k = unique
                .binary_search_by(|u| u.partial_cmp(t).expect("sorted finite"))
                .expect("every delay came from the sorted list");
            values[k]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, SQRT_2};

    fn params(omega: f64, delta: f64) -> SystemParams {
        SystemParams::dimensionless(omega, delta, 1.0).unwrap()
    }

    fn geometry(phi1: f64, phi2: f64) -> DetectorGeometry {
        DetectorGeometry::new(phi1, phi2).unwrap()
    }

    #[test]
    fn in_phase_detector_couples_through_the_symmetric_ladder() {
        let d = detector_operator(0.0, Basis::Dicke);
        assert_abs_diff_eq!(d[[1, 0]].re, SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(d[[3, 1]].re, SQRT_2, epsilon = 1e-14);
        let mut rest = d.clone();
        rest[[1, 0]] = C64::new(0.0, 0.0);
        rest[[3, 1]] = C64::new(0.0, 0.0);
        assert!(crate::linalg::max_abs(&rest) < 1e-14);
    }

    #[test]
    fn opposed_detector_couples_through_the_antisymmetric_ladder() {
        let d = detector_operator(PI, Basis::Dicke);
        assert_abs_diff_eq!(d[[2, 0]].re, -SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(d[[3, 2]].re, SQRT_2, epsilon = 1e-14);
        let mut rest = d.clone();
        rest[[2, 0]] = C64::new(0.0, 0.0);
        rest[[3, 2]] = C64::new(0.0, 0.0);
        assert!(crate::linalg::max_abs(&rest) < 1e-12);
    }

    #[test]
    fn detector_annihilates_the_ground_state() {
        for phi in [0.0, 0.7, FRAC_PI_2, PI, 4.2] {
            for basis in [Basis::Product, Basis::Dicke] {
                let d = detector_operator(phi, basis);
                for i in 0..DIM {
                    assert!(d[[i, 3]].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn pinned_zero_delay_values() {
        let g = |om: f64, de: f64, p1: f64, p2: f64| {
            g2_zero_analytic(&params(om, de), &geometry(p1, p2)).unwrap()
        };
        assert_abs_diff_eq!(g(1.0, 0.0, PI, PI), 2.25, epsilon = 1e-13);
        assert_abs_diff_eq!(g(5.0, 30.0, PI, PI), 10.1304, epsilon = 1e-12);
        assert_relative_eq!(
            g(5.0, 30.0, FRAC_PI_3, -FRAC_PI_3),
            0.0418415157182414,
            max_relative = 1e-12
        );
        // coincident detectors, no path difference
        assert_relative_eq!(g(5.0, 5.0, 0.0, 0.0), 0.7769364821825612, max_relative = 1e-12);
        assert_relative_eq!(g(5.0, 30.0, 0.0, 0.0), 0.1004984047872256, max_relative = 1e-12);
        assert_relative_eq!(g(15.0, 30.0, 0.0, 0.0), 0.49916912896200116, max_relative = 1e-12);
    }

    #[test]
    fn quarter_wave_monitor_reads_the_blockade_ratio() {
        for om in [0.5, 2.0, 5.0, 15.0] {
            for de in [0.0, 1.0, 5.0, 30.0] {
                let p = params(om, de);
                let reading = monitor_ratio(&p).unwrap();
                let ratio = blockade_ratio_analytic(&p).unwrap();
                assert_relative_eq!(reading, ratio, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn no_quiet_monitor_without_drive() {
        let p = params(0.0, 5.0);
        assert!(matches!(monitor_ratio(&p), Err(Error::NoScattering)));
        assert!(matches!(
            g2_zero_analytic(&p, &geometry(0.0, 0.0)),
            Err(Error::NoScattering)
        ));
        assert!(matches!(
            g2(&p, &geometry(0.0, 0.0), &[0.0], &IntegratorConfig::default()),
            Err(Error::NoScattering)
        ));
    }

    #[test]
    fn vanishing_first_click_weight_is_reported() {
        // a detector opposed to nearly dark atoms sees almost nothing
        let p = params(1e-5, 0.0);
        let err = g2(&p, &geometry(PI, 0.0), &[0.1], &IntegratorConfig::default()).unwrap_err();
        match err {
            Error::UndetectableFirstPhoton { weight } => assert!(weight < FIRST_PHOTON_FLOOR),
            other => panic!("expected an undetectable-photon error, got {other}"),
        }
    }

    #[test]
    fn first_click_projects_out_the_excited_populations() {
        let (rho_c, weight) = conditioned_state(&params(5.0, 30.0), 0.0).unwrap();
        let u = basis_change_matrix();
        let dicke = u.dot(&rho_c).dot(&u);
        assert_abs_diff_eq!(dicke[[0, 0]].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dicke[[1, 1]].re, 0.049800796812749, epsilon = 1e-12);
        assert_abs_diff_eq!(dicke[[2, 2]].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dicke[[3, 3]].re, 0.950199203187251, epsilon = 1e-12);
        assert!(weight > 0.0);
    }

    #[test]
    fn zero_delay_matches_the_closed_form() {
        let cfg = IntegratorConfig::default();
        let mut rng = StdRng::seed_from_u64(7);
        for (om, de) in [(5.0, 5.0), (5.0, 30.0), (15.0, 30.0)] {
            let p = params(om, de);
            for _ in 0..6 {
                let phi1 = rng.gen_range(-PI..PI);
                let phi2 = rng.gen_range(-PI..PI);
                let geom = geometry(phi1, phi2);
                let numeric = g2(&p, &geom, &[0.0], &cfg).unwrap()[0];
                let closed = g2_zero_analytic(&p, &geom).unwrap();
                assert_abs_diff_eq!(numeric, closed, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn opposed_detectors_never_fire_together() {
        let p = params(5.0, 30.0);
        let geom = geometry(0.0, PI);
        assert_abs_diff_eq!(g2_zero_analytic(&p, &geom).unwrap(), 0.0, epsilon = 1e-15);
        let numeric = g2(&p, &geom, &[0.0], &IntegratorConfig::default()).unwrap()[0];
        assert!(numeric.abs() < 1e-12);
    }

    #[test]
    fn pinned_delay_curves() {
        let cfg = IntegratorConfig::default();
        let b = g2(&params(5.0, 30.0), &geometry(0.0, 0.0), &[0.2, 0.5], &cfg).unwrap();
        assert_abs_diff_eq!(b[0], 1.6538378418359148, epsilon = 1e-8);
        assert_abs_diff_eq!(b[1], 0.6347144155072805, epsilon = 1e-8);
        let a = g2(&params(5.0, 5.0), &geometry(0.0, 0.0), &[1.0], &cfg).unwrap();
        assert_abs_diff_eq!(a[0], 1.0108214020696895, epsilon = 1e-8);
        let c = g2(&params(15.0, 30.0), &geometry(PI, PI), &[0.3], &cfg).unwrap();
        assert_abs_diff_eq!(c[0], 1.9769221713975456, epsilon = 1e-8);
    }

    #[test]
    fn correlations_factorize_at_long_delay() {
        let cfg = IntegratorConfig::default();
        for (om, de, phi) in [(5.0, 30.0, 0.0), (15.0, 30.0, PI)] {
            let tail = g2(&params(om, de), &geometry(phi, phi), &[50.0], &cfg).unwrap()[0];
            assert!((tail - 1.0).abs() < 1e-6, "tail {tail} at ({om}, {de}, {phi})");
        }
    }

    #[test]
    fn unsorted_and_repeated_delays_are_served_in_order() {
        let p = params(5.0, 30.0);
        let geom = geometry(0.0, 0.0);
        let cfg = IntegratorConfig::default();
        let shuffled = g2(&p, &geom, &[0.5, 0.0, 0.2, 0.5], &cfg).unwrap();
        let sorted = g2(&p, &geom, &[0.0, 0.2, 0.5], &cfg).unwrap();
        assert_abs_diff_eq!(shuffled[0], sorted[2], epsilon = 1e-12);
        assert_abs_diff_eq!(shuffled[1], sorted[0], epsilon = 1e-12);
        assert_abs_diff_eq!(shuffled[2], sorted[1], epsilon = 1e-12);
        assert_abs_diff_eq!(shuffled[3], shuffled[0], epsilon = 0.0);
    }

    #[test]
    fn bad_delays_are_rejected() {
        let p = params(5.0, 30.0);
        let geom = geometry(0.0, 0.0);
        let cfg = IntegratorConfig::default();
        assert!(g2(&p, &geom, &[-0.1], &cfg).is_err());
        assert!(g2(&p, &geom, &[f64::NAN], &cfg).is_err());
    }
}
