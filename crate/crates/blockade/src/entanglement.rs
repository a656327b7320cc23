//! Two-qubit concurrence: the general spin-flip construction, a Hermitian
//! reformulation for cross-checking, the closed-form steady-state value and
//! the drive window inside which the steady state stays entangled.

use ndarray::{array, Array2};
use ndarray_linalg::{Eig, Eigh, UPLO};

use crate::linalg::{dagger, hermitize};
use crate::model::{Basis, DensityMatrix, SystemParams};
use crate::steady::{alpha, normalization};
use crate::{Error, Result, C64};

const EIG_NEGATIVE_TOL: f64 = -1e-8;
const EIG_CLAMP: f64 = -1e-10;
/// Values this close to zero are floating-point noise around the
/// separability boundary and are reported as exactly 0.
const BOUNDARY_TIE: f64 = 1e-9;

/// `sigma_y kron sigma_y`, real in the product basis.
fn spin_flip_matrix() -> Array2<C64> {
    let m = C64::new(-1.0, 0.0);
    let p = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    array![[z, z, z, m], [z, z, p, z], [z, p, z, z], [m, z, z, z]]
}

fn flipped(rho_p: &Array2<C64>) -> Array2<C64> {
    let y = spin_flip_matrix();
    y.dot(&rho_p.mapv(|z| z.conj())).dot(&y)
}

fn combine(mut lambdas: Vec<f64>) -> Result<f64> {
    for l in &lambdas {
        if *l < EIG_NEGATIVE_TOL {
            return Err(Error::ConcurrenceEigenvalue { value: *l });
        }
    }
    for l in &mut lambdas {
        if *l < 0.0 && *l >= EIG_CLAMP {
            *l = 0.0;
        }
        *l = l.max(0.0);
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0].sqrt() - lambdas[1].sqrt() - lambdas[2].sqrt() - lambdas[3].sqrt();
    Ok(c.max(0.0))
}

/// Wootters concurrence via the eigenvalues of `R = rho rho_tilde`, where
/// `rho_tilde` is the spin-flipped complex conjugate. Input may carry either
/// basis tag; the computation happens in the product basis. Falls back to
/// the Hermitian route if the general eigensolver fails.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let p = rho.to_basis(Basis::Product);
    let r = p.entries().dot(&flipped(p.entries()));
    let eigenvalues = match r.eig() {
        Ok((vals, _)) => vals,
        Err(_) => return concurrence_hermitian(rho),
    };
    combine(eigenvalues.iter().map(|z| z.re).collect())
}

/// Same spectrum through the Hermitian product
/// `sqrt(rho) rho_tilde sqrt(rho)`, which a symmetric eigensolver handles
/// without spectral-conditioning caveats. Agrees with [`concurrence`]
/// to 1e-9 on valid states.
pub fn concurrence_hermitian(rho: &DensityMatrix) -> Result<f64> {
    let p = rho.to_basis(Basis::Product);
    let (evals, evecs) = hermitize(p.entries()).eigh(UPLO::Lower)?;
    // eigh on a row-major array hands LAPACK the transpose, so the returned
    // columns are eigenvectors of rho*; conjugate to get eigenvectors of rho.
    let vecs = evecs.mapv(|z| z.conj());
    let clamped = evals.mapv(|l| C64::new(l.max(0.0).sqrt(), 0.0));
    let sqrt_rho = vecs.dot(&Array2::from_diag(&clamped)).dot(&dagger(&vecs));
    let m = sqrt_rho.dot(&flipped(p.entries())).dot(&sqrt_rho);
    let lambdas = hermitize(&m).eigh(UPLO::Lower)?.0;
    combine(lambdas.to_vec())
}

/// Steady-state concurrence in closed form:
///
///   C = max{0, (sqrt(2) omega^2 (lam_plus - lam_minus) - 8 omega^4) / N}
///   lam_pm = sqrt(8 omega^4 + delta^2 |alpha|^2
///                 +- delta |alpha| sqrt(16 omega^4 + delta^2 |alpha|^2))
///
/// Both radicands are nonnegative for every parameter choice. Values within
/// 1e-9 of zero collapse to 0.
pub fn steady_concurrence_analytic(params: &SystemParams) -> f64 {
    let o2 = params.omega() * params.omega();
    let o4 = o2 * o2;
    let de = params.delta();
    let aa = alpha(params).norm_sqr();
    let am = aa.sqrt();
    let root = (16.0 * o4 + de * de * aa).sqrt();
    let lam_plus = (8.0 * o4 + de * de * aa + de * am * root).max(0.0).sqrt();
    let lam_minus = (8.0 * o4 + de * de * aa - de * am * root).max(0.0).sqrt();
    let c = (std::f64::consts::SQRT_2 * o2 * (lam_plus - lam_minus) - 8.0 * o4)
        / normalization(params);
    if c.abs() <= BOUNDARY_TIE {
        0.0
    } else {
        c.max(0.0)
    }
}

/// Largest drive amplitude with an entangled steady state,
/// `omega_max = sqrt(delta |alpha|) / 2`; the window is `0 < omega < omega_max`
/// and is empty for `delta <= 0`.
pub fn entanglement_window(delta: f64, gamma: f64) -> f64 {
    if delta <= 0.0 {
        return 0.0;
    }
    let alpha_mag = (delta * delta + 4.0 * gamma * gamma).sqrt();
    (delta * alpha_mag).sqrt() / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pure_state, DensityMatrix, DIM};
    use crate::steady::{steady_state_analytic, steady_state_numeric};
    use crate::testutil::random_density;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use ndarray::Array2;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn params(omega: f64, delta: f64) -> SystemParams {
        SystemParams::dimensionless(omega, delta, 1.0).unwrap()
    }

    #[test]
    fn bell_like_state_is_maximally_entangled() {
        let s = pure_state("s", Basis::Dicke).unwrap();
        assert_relative_eq!(concurrence(&s).unwrap(), 1.0, max_relative = 1e-12);
        let a = pure_state("a", Basis::Dicke).unwrap();
        assert_relative_eq!(concurrence(&a).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn product_and_mixed_states_are_separable() {
        let gg = pure_state("gg", Basis::Dicke).unwrap();
        assert_abs_diff_eq!(concurrence(&gg).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::new(
            Array2::<C64>::eye(DIM) * C64::new(0.25, 0.0),
            Basis::Product,
        )
        .unwrap();
        assert_abs_diff_eq!(concurrence(&mixed).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn concurrence_ignores_the_basis_tag() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..10 {
            let rho = random_density(&mut rng, Basis::Dicke);
            let c1 = concurrence(&rho).unwrap();
            let c2 = concurrence(&rho.to_basis(Basis::Product)).unwrap();
            assert_abs_diff_eq!(c1, c2, epsilon = 1e-11);
        }
    }

    #[test]
    fn general_and_hermitian_routes_agree() {
        let mut rng = StdRng::seed_from_u64(32);
        for _ in 0..25 {
            let rho = random_density(&mut rng, Basis::Product);
            let a = concurrence(&rho).unwrap();
            let b = concurrence_hermitian(&rho).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        for (om, de) in [(0.5, 1.0), (5.0, 30.0), (2.0, 10.0), (15.0, 30.0)] {
            let rho = steady_state_analytic(&params(om, de));
            assert_abs_diff_eq!(
                concurrence(&rho).unwrap(),
                concurrence_hermitian(&rho).unwrap(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn no_shift_means_no_steady_entanglement() {
        for om in [0.3, 1.0, 5.0] {
            assert_eq!(steady_concurrence_analytic(&params(om, 0.0)), 0.0);
            let c = concurrence(&steady_state_analytic(&params(om, 0.0))).unwrap();
            assert_abs_diff_eq!(c, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn pinned_steady_concurrence_values() {
        assert_relative_eq!(
            steady_concurrence_analytic(&params(5.0, 30.0)),
            0.395837174594476,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            steady_concurrence_analytic(&params(15.0, 30.0)),
            5.53401047993e-4,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            steady_concurrence_analytic(&params(2.0, 10.0)),
            0.339843439809707,
            max_relative = 1e-12
        );
        // beyond the window: 4 omega^2 = 1024 > delta |alpha| ~ 902
        assert_eq!(steady_concurrence_analytic(&params(16.0, 30.0)), 0.0);
    }

    #[test]
    fn closed_form_matches_wootters_of_the_steady_state() {
        for om in [0.5, 2.0, 5.0, 10.0, 15.0] {
            for de in [0.0, 1.0, 5.0, 10.0, 30.0] {
                let p = params(om, de);
                let analytic = steady_concurrence_analytic(&p);
                let wootters = concurrence(&steady_state_analytic(&p)).unwrap();
                assert_abs_diff_eq!(analytic, wootters, epsilon = 1e-9);
                let numeric = concurrence(&steady_state_numeric(&p).unwrap()).unwrap();
                assert_abs_diff_eq!(analytic, numeric, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn window_boundary_matches_the_sign_change() {
        for de in [1.0, 4.0, 10.0, 30.0] {
            let om_max = entanglement_window(de, 1.0);
            assert!(steady_concurrence_analytic(&params(0.9 * om_max, de)) > 0.0);
            assert_eq!(steady_concurrence_analytic(&params(1.1 * om_max, de)), 0.0);
        }
        assert_relative_eq!(
            entanglement_window(30.0, 1.0),
            15.01663896068603,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            entanglement_window(10.0, 1.0),
            5.049267032744845,
            max_relative = 1e-12
        );
    }

    #[test]
    fn window_is_empty_without_positive_shift() {
        assert_eq!(entanglement_window(0.0, 1.0), 0.0);
        assert_eq!(entanglement_window(-3.0, 1.0), 0.0);
        for om in [0.2, 1.0, 4.0] {
            assert_eq!(steady_concurrence_analytic(&params(om, -5.0)), 0.0);
        }
    }

    #[test]
    fn concurrence_rejects_clearly_negative_spectra() {
        assert!(matches!(
            super::combine(vec![0.5, 0.3, -0.2, 0.1]),
            Err(Error::ConcurrenceEigenvalue { .. })
        ));
        // tiny negatives clamp instead
        assert!(super::combine(vec![0.5, 0.3, -1e-11, 0.1]).is_ok());
    }
}
