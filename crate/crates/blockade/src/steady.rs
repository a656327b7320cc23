//! Steady state of the driven pair, computed two independent ways: the
//! closed-form matrix and the kernel of the vectorized generator.

use ndarray::array;
use ndarray_linalg::SVD;

use crate::linalg::{hermitize, max_abs, trace, unvec_col};
use crate::liouville::{apply_generator, build_superoperator};
use crate::model::{Basis, DensityMatrix, SystemParams, DIM};
use crate::{Error, Result, C64};

/// Complex detuning-width combination `alpha = -(delta + 2 i gamma)`,
/// so `|alpha|^2 = delta^2 + 4 gamma^2`.
pub fn alpha(params: &SystemParams) -> C64 {
    C64::new(-params.delta(), -2.0 * params.gamma())
}

/// Normalization `16 omega^4 + (4 omega^2 + gamma^2) |alpha|^2` shared by
/// the closed-form steady state and its derived quantities.
pub(crate) fn normalization(params: &SystemParams) -> f64 {
    let o2 = params.omega() * params.omega();
    let g = params.gamma();
    let aa = alpha(params).norm_sqr();
    16.0 * o2 * o2 + (4.0 * o2 + g * g) * aa
}

/// Closed-form steady state in the Dicke ordering.
///
/// The antisymmetric state carries population `4 omega^4 / N` and no
/// coherence to any other level; with the drive off the expression
/// collapses to the ground state.
pub fn steady_state_analytic(params: &SystemParams) -> DensityMatrix {
    let o = params.omega();
    let g = params.gamma();
    let a = alpha(params);
    let aa = a.norm_sqr();
    let o2 = o * o;
    let o3 = o2 * o;
    let o4 = o2 * o2;
    let sq2 = std::f64::consts::SQRT_2;
    let i = C64::new(0.0, 1.0);
    let n = C64::new(normalization(params), 0.0);

    let r_ee = C64::new(4.0 * o4, 0.0);
    let r_es = a * 2.0 * sq2 * o3;
    let r_eg = a * (-2.0 * o2 * g) * i;
    let r_ss = C64::new(2.0 * o2 * (2.0 * o2 + aa), 0.0);
    let r_sg = (a * 2.0 * o2 - i * (g * aa)) * (sq2 * o);
    let r_aa = C64::new(4.0 * o4, 0.0);
    let r_gg = C64::new(4.0 * o4 + (2.0 * o2 + g * g) * aa, 0.0);
    let zero = C64::new(0.0, 0.0);

    let m = array![
        [r_ee, r_es, zero, r_eg],
        [r_es.conj(), r_ss, zero, r_sg],
        [zero, zero, r_aa, zero],
        [r_eg.conj(), r_sg.conj(), zero, r_gg],
    ];
    DensityMatrix::new(m / n, Basis::Dicke)
        .expect("closed-form steady state satisfies the state invariants")
}

const KERNEL_GAP_FACTOR: f64 = 1e-8;
const STATIONARITY_TOL: f64 = 1e-11;

/// Steady state from the one-dimensional kernel of the 16x16 generator,
/// via singular value decomposition. Fails if the kernel is degenerate or
/// the recovered state is not stationary to 1e-11.
pub fn steady_state_numeric(params: &SystemParams) -> Result<DensityMatrix> {
    let sop = build_superoperator(params, Basis::Dicke);
    let (_, sv, vt) = sop.entries().svd(false, true)?;
    let vt = vt.expect("requested right singular vectors");

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
    let smallest = sv[order[0]];
    let next = sv[order[1]];
    if next <= KERNEL_GAP_FACTOR * params.gamma() {
        return Err(Error::DegenerateSteadyState { smallest, next });
    }

    // kernel vector = conjugated row of V^H for the smallest singular value
    let kernel = vt.row(order[0]).mapv(|z| z.conj());
    let mut m = unvec_col(&kernel.to_owned(), DIM);
    let tr = trace(&m);
    if tr.norm() < 1e-12 {
        return Err(Error::DegenerateSteadyState { smallest, next });
    }
    m *= tr.conj() / C64::new(tr.norm(), 0.0); // rotate the kernel phase
    m = hermitize(&m);
    let tr = trace(&m).re;
    m /= C64::new(tr, 0.0);

    let rho = DensityMatrix::new(m, Basis::Dicke)?;
    let defect = max_abs(&apply_generator(params, &rho));
    if defect > STATIONARITY_TOL * params.gamma() {
        return Err(Error::DegenerateSteadyState { smallest, next });
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_distance;
    use crate::model::pure_state;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(omega: f64, delta: f64) -> SystemParams {
        SystemParams::dimensionless(omega, delta, 1.0).unwrap()
    }

    #[test]
    fn alpha_matches_hand_values() {
        assert_eq!(alpha(&params(1.0, 0.0)), C64::new(0.0, -2.0));
        assert_relative_eq!(alpha(&params(1.0, 0.0)).norm_sqr(), 4.0);
        assert_eq!(alpha(&params(5.0, 30.0)), C64::new(-30.0, -2.0));
        assert_relative_eq!(alpha(&params(5.0, 30.0)).norm_sqr(), 904.0);
        assert_relative_eq!(alpha(&params(5.0, 5.0)).norm_sqr(), 29.0, max_relative = 1e-14);
    }

    #[test]
    fn undriven_steady_state_is_ground() {
        let rho = steady_state_analytic(&params(0.0, 3.0));
        let gg = pure_state("gg", Basis::Dicke).unwrap();
        assert_abs_diff_eq!(
            frobenius_distance(rho.entries(), gg.entries()),
            0.0,
            epsilon = 1e-15
        );
        let num = steady_state_numeric(&params(0.0, 3.0)).unwrap();
        assert_abs_diff_eq!(
            frobenius_distance(num.entries(), gg.entries()),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn saturation_limit_equalizes_populations() {
        let rho = steady_state_analytic(&params(4000.0, 3.0));
        for k in 0..4 {
            assert_abs_diff_eq!(rho.entry(k, k).re, 0.25, epsilon = 1e-6);
        }
    }

    #[test]
    fn strong_blockade_population_case() {
        // omega = 5, delta = 30: P_ee = 2500/101304
        let rho = steady_state_analytic(&params(5.0, 30.0));
        assert_relative_eq!(rho.entry(0, 0).re, 2500.0 / 101304.0, max_relative = 1e-13);
        assert_relative_eq!(rho.entry(2, 2).re, 2500.0 / 101304.0, max_relative = 1e-13);
        assert_abs_diff_eq!(trace(rho.entries()).re, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn antisymmetric_sector_structure() {
        for (om, de) in [(0.5, 0.0), (2.0, 1.0), (5.0, 5.0), (15.0, 30.0)] {
            let p = params(om, de);
            let rho = steady_state_analytic(&p);
            let o4 = om.powi(4);
            assert_relative_eq!(
                rho.entry(2, 2).re,
                4.0 * o4 / normalization(&p),
                max_relative = 1e-12
            );
            for k in [0usize, 1, 3] {
                assert_abs_diff_eq!(rho.entry(2, k).norm(), 0.0, epsilon = 1e-15);
                assert_abs_diff_eq!(rho.entry(k, 2).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn analytic_state_is_stationary() {
        for (om, de) in [(0.5, 0.0), (5.0, 5.0), (5.0, 30.0), (15.0, 30.0), (10.0, 1.0)] {
            let p = params(om, de);
            let rho = steady_state_analytic(&p);
            let defect = max_abs(&apply_generator(&p, &rho));
            assert!(defect < 1e-12, "stationarity defect {defect:.3e} at ({om}, {de})");
        }
    }

    #[test]
    fn numeric_matches_analytic_on_a_grid() {
        let mut worst = 0.0f64;
        for om in [0.5, 2.0, 5.0, 10.0, 15.0] {
            for de in [0.0, 1.0, 5.0, 10.0, 30.0] {
                let p = params(om, de);
                let a = steady_state_analytic(&p);
                let n = steady_state_numeric(&p).unwrap();
                worst = worst.max(frobenius_distance(a.entries(), n.entries()));
            }
        }
        assert!(worst < 1e-10, "worst Frobenius distance {worst:.3e}");
    }

    #[test]
    fn no_interaction_gives_uncorrelated_excitation() {
        // delta = 0: P_ee equals P_e^2 for the numeric steady state
        use crate::observables::{double_excitation_probability, excitation_probability};
        for om in [0.5, 2.0, 7.0] {
            let rho = steady_state_numeric(&params(om, 0.0)).unwrap();
            let pe = excitation_probability(&rho).unwrap();
            let pee = double_excitation_probability(&rho);
            assert_relative_eq!(pee, pe * pe, max_relative = 1e-10);
        }
    }

    #[test]
    fn numeric_state_passes_validation_in_both_bases() {
        let rho = steady_state_numeric(&params(5.0, 30.0)).unwrap();
        assert_eq!(rho.basis(), Basis::Dicke);
        let prod = rho.to_basis(Basis::Product);
        assert_abs_diff_eq!(trace(prod.entries()).re, 1.0, epsilon = 1e-12);
    }
}
