/* C interface to the blockade two-atom simulator. */

#ifndef BLOCKADE_H
#define BLOCKADE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. Anything but `Ok` leaves a message for
 * [`blockade_last_error`].
 */
typedef enum BlockadeStatus {
  BLOCKADE_STATUS_OK = 0,
  BLOCKADE_STATUS_NULL_ARGUMENT = 1,
  BLOCKADE_STATUS_INVALID_INPUT = 2,
  BLOCKADE_STATUS_NUMERICAL_FAILURE = 3,
} BlockadeStatus;

typedef struct BlockadeParams BlockadeParams;

typedef struct BlockadeRho BlockadeRho;

typedef struct BlockadeTrajectory BlockadeTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the calling thread's most recent failure. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *blockade_last_error(void);

/**
 * Creates a parameter set from dimensionless ratios: drive `omega` and
 * shift `delta` in units of the total decay rate, and the radiative share
 * `gamma_s_frac` in [0, 1].
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum BlockadeStatus blockade_params_new(double omega,
                                        double delta,
                                        double gamma_s_frac,
                                        struct BlockadeParams **out);

/**
 * Releases a parameter handle. A null pointer is a no-op.
 *
 * # Safety
 * `params` must have come from this library and not been freed before.
 */
void blockade_params_free(struct BlockadeParams *params);

/**
 * Creates the projector onto a pure basis state. Labels: `ee`, `s`, `a`,
 * `gg` (Dicke) or `eg`, `ge` (product).
 *
 * # Safety
 * `label` must be a NUL-terminated string; `out` as in
 * [`blockade_params_new`].
 */
enum BlockadeStatus blockade_rho_pure(const char *label, struct BlockadeRho **out);

/**
 * Releases a state handle. A null pointer is a no-op.
 *
 * # Safety
 * `rho` must have come from this library and not been freed before.
 */
void blockade_rho_free(struct BlockadeRho *rho);

/**
 * Reads one Dicke-basis matrix entry.
 *
 * # Safety
 * `rho` must be a live handle; `re` and `im` must be writable.
 */
enum BlockadeStatus blockade_rho_entry(const struct BlockadeRho *rho,
                                       size_t row,
                                       size_t col,
                                       double *re,
                                       double *im);

/**
 * Writes the four Dicke populations (ee, s, a, gg) to `out`.
 *
 * # Safety
 * `rho` must be a live handle; `out` must have room for four doubles.
 */
enum BlockadeStatus blockade_rho_populations(const struct BlockadeRho *rho, double *out);

/**
 * Excited-state probability of either atom.
 *
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
enum BlockadeStatus blockade_excitation_probability(const struct BlockadeRho *rho, double *out);

/**
 * Probability of finding both atoms excited.
 *
 * # Safety
 * As [`blockade_excitation_probability`].
 */
enum BlockadeStatus blockade_double_excitation_probability(const struct BlockadeRho *rho,
                                                           double *out);

/**
 * Wootters concurrence of the two-atom state.
 *
 * # Safety
 * As [`blockade_excitation_probability`].
 */
enum BlockadeStatus blockade_concurrence(const struct BlockadeRho *rho, double *out);

/**
 * Closed-form steady state.
 *
 * # Safety
 * `params` must be a live handle; `out` as in [`blockade_params_new`].
 */
enum BlockadeStatus blockade_steady_state_analytic(const struct BlockadeParams *params,
                                                   struct BlockadeRho **out);

/**
 * Steady state from the generator's kernel.
 *
 * # Safety
 * As [`blockade_steady_state_analytic`].
 */
enum BlockadeStatus blockade_steady_state_numeric(const struct BlockadeParams *params,
                                                  struct BlockadeRho **out);

/**
 * Largest entry magnitude of the state's time derivative; zero for a
 * steady state.
 *
 * # Safety
 * `params` and `rho` must be live handles; `out` must be writable.
 */
enum BlockadeStatus blockade_stationarity_defect(const struct BlockadeParams *params,
                                                 const struct BlockadeRho *rho,
                                                 double *out);

/**
 * Steady-state ratio `P_ee / P_e^2` in closed form.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum BlockadeStatus blockade_ratio(const struct BlockadeParams *params, double *out);

/**
 * Largest drive (in units of gamma) below which the steady state stays
 * entangled; zero when the shift admits no window.
 */
double blockade_entanglement_window(double delta, double gamma);

/**
 * Zero-delay photon-photon cross correlation for detector phases `phi1`,
 * `phi2`, in closed form.
 *
 * # Safety
 * `params` must be a live handle; `out` must be writable.
 */
enum BlockadeStatus blockade_g2_zero(const struct BlockadeParams *params,
                                     double phi1,
                                     double phi2,
                                     double *out);

/**
 * Delayed photon-photon cross correlation at `len` delays (units of
 * 1/gamma, finite and nonnegative, any order). Writes `len` values.
 *
 * # Safety
 * `params` must be a live handle; `taus` must hold `len` readable doubles
 * and `out` room for `len` writable ones.
 */
enum BlockadeStatus blockade_g2(const struct BlockadeParams *params,
                                double phi1,
                                double phi2,
                                const double *taus,
                                size_t len,
                                double *out);

/**
 * Integrates the master equation from `rho0`, sampling at `len` strictly
 * increasing times within `[0, t_end]` (units of 1/gamma).
 *
 * # Safety
 * `params` and `rho0` must be live handles; `times` must hold `len`
 * readable doubles; `out` as in [`blockade_params_new`].
 */
enum BlockadeStatus blockade_evolve(const struct BlockadeParams *params,
                                    const struct BlockadeRho *rho0,
                                    double t_end,
                                    const double *times,
                                    size_t len,
                                    struct BlockadeTrajectory **out);

/**
 * Number of samples held by a trajectory; zero for a null handle.
 *
 * # Safety
 * `traj` must be a live handle or null.
 */
size_t blockade_trajectory_len(const struct BlockadeTrajectory *traj);

/**
 * Sample time at `index`.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum BlockadeStatus blockade_trajectory_time(const struct BlockadeTrajectory *traj,
                                             size_t index,
                                             double *out);

/**
 * Copies the sampled state at `index` into a fresh handle.
 *
 * # Safety
 * `traj` must be a live handle; `out` as in [`blockade_params_new`].
 */
enum BlockadeStatus blockade_trajectory_state(const struct BlockadeTrajectory *traj,
                                              size_t index,
                                              struct BlockadeRho **out);

/**
 * Releases a trajectory handle. A null pointer is a no-op.
 *
 * # Safety
 * `traj` must have come from this library and not been freed before.
 */
void blockade_trajectory_free(struct BlockadeTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLOCKADE_H */
