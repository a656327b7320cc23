//! Hamiltonian, dissipator and the vectorized generator of the two-atom
//! master equation
//!
//!   d rho / dt = -i [H, rho] - gamma sum_i (Sp_i Sm_i rho + rho Sp_i Sm_i
//!                                           - 2 Sm_i rho Sp_i)
//!
//! with one lowering operator per atom. Each atom decays at `2 gamma`, the
//! doubly excited level at `4 gamma`, feeding the symmetric and
//! antisymmetric single-excitation states at equal rates.

use ndarray::Array2;

use crate::linalg::{dagger, kron, trace, unvec_col, vec_col};
use crate::model::{basis_change_matrix, Basis, DensityMatrix, SystemParams, DIM};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Drive-plus-shift Hamiltonian in the Dicke ordering `(ee, s, a, gg)`,
/// with the drive phases at both atom positions set to zero:
///
///   H = delta |ee><ee| + sqrt(2) omega (|ee><s| + |s><gg| + h.c.)
///
/// The antisymmetric state is left untouched by the symmetric drive.
pub fn hamiltonian(params: &SystemParams) -> Array2<C64> {
    let sq2 = std::f64::consts::SQRT_2;
    let mut h: Array2<C64> = Array2::zeros((DIM, DIM));
    h[[0, 0]] = C64::new(params.delta(), 0.0);
    let coupling = C64::new(sq2 * params.omega(), 0.0);
    h[[0, 1]] = coupling;
    h[[1, 0]] = coupling;
    h[[1, 3]] = coupling;
    h[[3, 1]] = coupling;
    h
}

/// Single-atom lowering operators in the product ordering `(ee, eg, ge, gg)`.
pub(crate) fn lowering_product() -> [Array2<C64>; 2] {
    let one = C64::new(1.0, 0.0);
    let mut s1: Array2<C64> = Array2::zeros((DIM, DIM));
    s1[[2, 0]] = one; // |ge><ee|
    s1[[3, 1]] = one; // |gg><eg|
    let mut s2: Array2<C64> = Array2::zeros((DIM, DIM));
    s2[[1, 0]] = one; // |eg><ee|
    s2[[3, 2]] = one; // |gg><ge|
    [s1, s2]
}

/// Precomputed operators for repeated right-hand-side evaluations in a
/// fixed basis.
pub(crate) struct Generator {
    h: Array2<C64>,
    jumps: [Array2<C64>; 2],
    numbers: [Array2<C64>; 2],
    gamma: f64,
}

impl Generator {
    pub(crate) fn new(params: &SystemParams, basis: Basis) -> Self {
        let u = basis_change_matrix();
        // H is native to the Dicke ordering, the jumps to the product one
        let h = match basis {
            Basis::Dicke => hamiltonian(params),
            Basis::Product => u.dot(&hamiltonian(params)).dot(&u),
        };
        let jumps = lowering_product().map(|s| match basis {
            Basis::Product => s,
            Basis::Dicke => u.dot(&s).dot(&u),
        });
        let numbers = [
            dagger(&jumps[0]).dot(&jumps[0]),
            dagger(&jumps[1]).dot(&jumps[1]),
        ];
        Self { h, jumps, numbers, gamma: params.gamma() }
    }

    /// Instantaneous derivative of an arbitrary 4x4 matrix.
    pub(crate) fn apply(&self, m: &Array2<C64>) -> Array2<C64> {
        let mut out = (self.h.dot(m) - m.dot(&self.h)) * (-I);
        let g = C64::new(self.gamma, 0.0);
        for (jump, number) in self.jumps.iter().zip(&self.numbers) {
            let sandwich = jump.dot(m).dot(&dagger(jump));
            out = out - (number.dot(m) + m.dot(number) - sandwich * 2.0) * g;
        }
        out
    }
}

/// 16x16 matrix form of the generator acting on column-stacked density
/// matrices: `vec(d rho/dt) = L vec(rho)`.
pub struct Superoperator {
    entries: Array2<C64>,
    basis: Basis,
}

impl Superoperator {
    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Applies the generator through the vectorized form.
    pub fn apply(&self, m: &Array2<C64>) -> Array2<C64> {
        unvec_col(&self.entries.dot(&vec_col(m)), DIM)
    }
}

/// Derivative of a state under the full generator, expressed in the basis
/// the input carries. Traceless and Hermiticity-preserving.
pub fn apply_generator(params: &SystemParams, rho: &DensityMatrix) -> Array2<C64> {
    Generator::new(params, rho.basis()).apply(rho.entries())
}

/// Assembles the vectorized generator using the column-stacking identity
/// `vec(A X B) = (B^T kron A) vec(X)`.
pub fn build_superoperator(params: &SystemParams, basis: Basis) -> Superoperator {
    let gen = Generator::new(params, basis);
    let id: Array2<C64> = Array2::eye(DIM);
    let ht = gen.h.t().to_owned();
    let mut l = (kron(&id, &gen.h) - kron(&ht, &id)) * (-I);
    let g = C64::new(gen.gamma, 0.0);
    for (jump, number) in gen.jumps.iter().zip(&gen.numbers) {
        let nt = number.t().to_owned();
        let jc = jump.mapv(|z| z.conj());
        l = l - (kron(&id, number) + kron(&nt, &id) - kron(&jc, jump) * 2.0) * g;
    }
    Superoperator { entries: l, basis }
}

/// Max-magnitude entry of the derivative; zero exactly at a steady state.
pub fn stationarity_defect(params: &SystemParams, rho: &DensityMatrix) -> f64 {
    crate::linalg::max_abs(&apply_generator(params, rho))
}

#[allow(dead_code)]
pub(crate) fn generator_trace_defect(params: &SystemParams, rho: &DensityMatrix) -> f64 {
    trace(&apply_generator(params, rho)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_distance, hermitize, max_abs};
    use crate::model::pure_state;
    use crate::testutil::{random_density, random_hermitian, random_hermitian_unit_trace};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use ndarray_linalg::SVD;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn params(omega: f64, delta: f64) -> SystemParams {
        SystemParams::dimensionless(omega, delta, 1.0).unwrap()
    }

    #[test]
    fn hamiltonian_with_drive_off_is_the_shift() {
        let h = hamiltonian(&params(0.0, 3.0));
        assert_eq!(h[[0, 0]], C64::new(3.0, 0.0));
        let mut rest = h.clone();
        rest[[0, 0]] = C64::new(0.0, 0.0);
        assert_abs_diff_eq!(max_abs(&rest), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hamiltonian_couplings_carry_sqrt2() {
        let h = hamiltonian(&params(1.0, 0.0));
        let sq2 = std::f64::consts::SQRT_2;
        for (i, j) in [(0, 1), (1, 0), (1, 3), (3, 1)] {
            assert_abs_diff_eq!((h[[i, j]] - C64::new(sq2, 0.0)).norm(), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(h[[0, 0]].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn antisymmetric_state_is_decoupled() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..5 {
            let om = 20.0 * rng.gen_range(-1.0..1.0f64);
            let de = 40.0 * rng.gen_range(-1.0..1.0f64);
            let h = hamiltonian(&params(om, de));
            for k in 0..DIM {
                assert_abs_diff_eq!(h[[2, k]].norm(), 0.0, epsilon = 1e-15);
                assert_abs_diff_eq!(h[[k, 2]].norm(), 0.0, epsilon = 1e-15);
            }
            assert_abs_diff_eq!(max_abs(&(&h - &dagger(&h))), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ground_state_is_stationary_without_drive() {
        let gg = pure_state("gg", Basis::Dicke).unwrap();
        let d = apply_generator(&params(0.0, 2.0), &gg);
        assert_abs_diff_eq!(max_abs(&d), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn doubly_excited_population_decays_at_four_gamma() {
        let ee = pure_state("ee", Basis::Dicke).unwrap();
        let d = apply_generator(&params(0.0, 0.0), &ee);
        assert_abs_diff_eq!(d[[0, 0]].re, -4.0, epsilon = 1e-13);
        // it feeds the symmetric and antisymmetric states at equal rates
        assert_abs_diff_eq!(d[[1, 1]].re, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(d[[2, 2]].re, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(d[[3, 3]].re, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn single_excitation_states_decay_to_ground_at_two_gamma() {
        for label in ["s", "a"] {
            let st = pure_state(label, Basis::Dicke).unwrap();
            let d = apply_generator(&params(0.0, 0.0), &st);
            assert_abs_diff_eq!(d[[3, 3]].re, 2.0, epsilon = 1e-13);
            assert_abs_diff_eq!(d.diag().sum().re, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn generator_output_is_traceless_and_hermitian() {
        let mut rng = StdRng::seed_from_u64(22);
        let p = params(5.0, 30.0);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng);
            let g = Generator::new(&p, Basis::Dicke);
            let d = g.apply(&h);
            assert_abs_diff_eq!(trace(&d).norm(), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(max_abs(&(&d - &dagger(&d))), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn generator_agrees_across_bases() {
        let mut rng = StdRng::seed_from_u64(23);
        let p = params(5.0, 30.0);
        let u = basis_change_matrix();
        for _ in 0..10 {
            let rho = random_density(&mut rng, Basis::Dicke);
            let d_dicke = apply_generator(&p, &rho);
            let d_prod = apply_generator(&p, &rho.to_basis(Basis::Product));
            // conjugate the product-basis derivative back
            let back = u.dot(&d_prod).dot(&u);
            assert_abs_diff_eq!(frobenius_distance(&d_dicke, &back), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn superoperator_matches_direct_application() {
        let mut rng = StdRng::seed_from_u64(24);
        for basis in [Basis::Dicke, Basis::Product] {
            let p = params(5.0, 30.0);
            let sop = build_superoperator(&p, basis);
            let gen = Generator::new(&p, basis);
            for _ in 0..20 {
                let m = random_hermitian_unit_trace(&mut rng);
                let via_sop = sop.apply(&m);
                let direct = gen.apply(&m);
                assert_abs_diff_eq!(frobenius_distance(&via_sop, &direct), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn superoperator_kernel_is_one_dimensional() {
        let sop = build_superoperator(&params(5.0, 30.0), Basis::Dicke);
        let (_, sv, _) = sop.entries().svd(false, false).unwrap();
        let mut s: Vec<f64> = sv.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        assert!(s[14] > 1e-8, "second smallest singular value {} too small", s[14]);
        assert!(s[15] < 1e-12, "kernel singular value {} not negligible", s[15]);
    }

    #[test]
    fn trace_functional_annihilates_superoperator() {
        // row vector of the vectorized trace is exactly the stacked identity
        let sop = build_superoperator(&params(2.0, 7.0), Basis::Dicke);
        let id: Array2<C64> = Array2::eye(DIM);
        let tr_vec = vec_col(&id);
        let residual = tr_vec.dot(sop.entries());
        let worst = residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert_abs_diff_eq!(worst, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn hermitize_helper_sanity() {
        let mut rng = StdRng::seed_from_u64(25);
        let h = random_hermitian(&mut rng);
        assert_abs_diff_eq!(max_abs(&(&hermitize(&h) - &h)), 0.0, epsilon = 1e-15);
    }
}
