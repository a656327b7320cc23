//! Adaptive time integration of the master equation.
//!
//! The stepper is an embedded Dormand-Prince 5(4) pair with fourth-order
//! dense output, applied to the 4x4 density matrix as a flat linear system.
//! A matrix-exponential propagator over the vectorized generator serves as
//! an independent backend for validation.

use ndarray::Array2;

use crate::linalg::{self, hermitize, trace};
use crate::liouville::{build_superoperator, Generator};
use crate::model::{Basis, DensityMatrix, SystemParams, DIM, POSITIVITY_FLOOR_SAMPLED};
use crate::{Error, Result, C64};

/// Tolerances and step bounds for the adaptive integrator. Times are in
/// units of `1/gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-11, max_step: 1.0, initial_step: None }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParams("integrator tolerances must be positive".into()));
        }
        if self.max_step.is_nan() || self.max_step <= 0.0 {
            return Err(Error::InvalidParams("max_step must be positive".into()));
        }
        if let Some(h0) = self.initial_step {
            if !(h0 > 0.0 && h0.is_finite()) {
                return Err(Error::InvalidParams("initial_step must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Time-ordered samples of the evolving state plus the integration defects
/// observed before the per-sample cleanup.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    params: SystemParams,
    trace_defect: f64,
    hermiticity_defect: f64,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// Largest |trace - 1| seen at a sample before renormalization.
    pub fn trace_defect(&self) -> f64 {
        self.trace_defect
    }

    /// Largest Hermiticity deviation seen at a sample before cleanup.
    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the 5th- and embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense-output weights
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 50_000_000;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

type Mat = Array2<C64>;

fn weighted_rms(err: &Mat, y0: &Mat, y1: &Mat, cfg: &IntegratorConfig) -> f64 {
    let n = (DIM * DIM) as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| {
            let scale = cfg.abs_tol + cfg.rel_tol * a.norm().max(b.norm());
            let w = e.norm() / scale;
            w * w
        })
        .sum();
    (sum / n).sqrt()
}

fn rms_over_scale(m: &Mat, reference: &Mat, cfg: &IntegratorConfig) -> f64 {
    let n = (DIM * DIM) as f64;
    let sum: f64 = m
        .iter()
        .zip(reference.iter())
        .map(|(v, r)| {
            let scale = cfg.abs_tol + cfg.rel_tol * r.norm();
            let w = v.norm() / scale;
            w * w
        })
        .sum();
    (sum / n).sqrt()
}

fn initial_step_guess(
    gen: &Generator,
    y0: &Mat,
    f0: &Mat,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> f64 {
    let d0 = rms_over_scale(y0, y0, cfg);
    let d1 = rms_over_scale(f0, y0, cfg);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(t_end);
    let y1 = y0 + &(f0 * C64::new(h0, 0.0));
    let f1 = gen.apply(&y1);
    let d2 = rms_over_scale(&(&f1 - f0), y0, cfg) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(cfg.max_step).min(t_end)
}

/// One accepted step's dense-output polynomial.
struct DenseSegment {
    t0: f64,
    h: f64,
    cont: [Mat; 5],
}

impl DenseSegment {
    fn eval(&self, t: f64) -> Mat {
        let theta = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let th1 = 1.0 - theta;
        // cont1 + theta (cont2 + th1 (cont3 + theta (cont4 + th1 cont5)))
        let mut acc = &self.cont[3] + &(&self.cont[4] * th1);
        acc = &self.cont[2] + &(acc * theta);
        acc = &self.cont[1] + &(acc * th1);
        &self.cont[0] + &(acc * theta)
    }
}

/// Propagates `m0` (any 4x4 complex matrix) under the generator for the
/// given parameters, collecting the solution at each requested time.
/// `sample_times` must be finite, strictly increasing and within
/// `[0, t_end]`. No renormalization is applied.
fn integrate(
    params: &SystemParams,
    basis: Basis,
    m0: &Mat,
    t_end: f64,
    sample_times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Mat>> {
    cfg.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParams(format!("t_end must be positive, got {t_end}")));
    }
    if m0.dim() != (DIM, DIM) {
        return Err(Error::InvalidParams("expected a 4x4 matrix".into()));
    }
    let mut prev = -1.0f64;
    for &t in sample_times {
        if !t.is_finite() || t < 0.0 || t > t_end {
            return Err(Error::InvalidParams(format!(
                "sample time {t} outside [0, {t_end}]"
            )));
        }
        if t <= prev {
            return Err(Error::InvalidParams(
                "sample times must be strictly increasing".into(),
            ));
        }
        prev = t;
    }

    let gen = Generator::new(params, basis);
    let mut samples: Vec<Mat> = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] == 0.0 {
        samples.push(m0.clone());
        next_sample += 1;
    }

    let mut t = 0.0f64;
    let mut y = m0.clone();
    let mut k1 = gen.apply(&y);
    let mut h = match cfg.initial_step {
        Some(h0) => h0.min(cfg.max_step).min(t_end),
        None => initial_step_guess(&gen, &y, &k1, t_end, cfg),
    };
    let mut rejected_last = false;

    for _step in 0..MAX_STEPS {
        if t >= t_end {
            break;
        }
        h = h.min(cfg.max_step);
        let mut last = false;
        if t + h >= t_end {
            h = t_end - t;
            last = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t_reached: t, step: h });
        }

        let hc = |x: f64| C64::new(h * x, 0.0);
        let y2 = &y + &(&k1 * hc(A21));
        let k2 = gen.apply(&y2);
        let y3 = &y + &(&k1 * hc(A31)) + &(&k2 * hc(A32));
        let k3 = gen.apply(&y3);
        let y4 = &y + &(&k1 * hc(A41)) + &(&k2 * hc(A42)) + &(&k3 * hc(A43));
        let k4 = gen.apply(&y4);
        let y5 = &y + &(&k1 * hc(A51)) + &(&k2 * hc(A52)) + &(&k3 * hc(A53)) + &(&k4 * hc(A54));
        let k5 = gen.apply(&y5);
        let y6 = &y
            + &(&k1 * hc(A61))
            + &(&k2 * hc(A62))
            + &(&k3 * hc(A63))
            + &(&k4 * hc(A64))
            + &(&k5 * hc(A65));
        let k6 = gen.apply(&y6);
        let y_next = &y
            + &(&k1 * hc(B1))
            + &(&k3 * hc(B3))
            + &(&k4 * hc(B4))
            + &(&k5 * hc(B5))
            + &(&k6 * hc(B6));
        let k7 = gen.apply(&y_next);

        let err_mat = &(&k1 * hc(E1))
            + &(&k3 * hc(E3))
            + &(&k4 * hc(E4))
            + &(&k5 * hc(E5))
            + &(&k6 * hc(E6))
            + &(&k7 * hc(E7));
        let err = weighted_rms(&err_mat, &y, &y_next, cfg);
        if !err.is_finite() {
            h *= FAC_MIN;
            rejected_last = true;
            continue;
        }

        if err <= 1.0 {
            // serve any samples inside (t, t + h]
            let reached = if last { t_end } else { t + h };
            if next_sample < sample_times.len() && sample_times[next_sample] <= reached {
                let dy = &y_next - &y;
                let cont3 = &(&k1 * C64::new(h, 0.0)) - &dy;
                let cont4 = &dy - &(&k7 * C64::new(h, 0.0)) - &cont3;
                let cont5 = (&(&k1 * D1)
                    + &(&k3 * D3)
                    + &(&k4 * D4)
                    + &(&k5 * D5)
                    + &(&k6 * D6)
                    + &(&k7 * D7))
                    * C64::new(h, 0.0);
                let seg = DenseSegment {
                    t0: t,
                    h,
                    cont: [y.clone(), dy, cont3, cont4, cont5],
                };
                while next_sample < sample_times.len() && sample_times[next_sample] <= reached {
                    samples.push(seg.eval(sample_times[next_sample]));
                    next_sample += 1;
                }
            }

            t = reached;
            y = y_next;
            k1 = k7;
            let fac_max = if rejected_last { 1.0 } else { FAC_MAX };
            let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, fac_max);
            h *= fac;
            rejected_last = false;

            if last {
                // exact endpoint state replaces any dense sample at t_end
                if sample_times.last() == Some(&t_end) && samples.len() == sample_times.len() {
                    *samples.last_mut().expect("nonempty") = y.clone();
                }
                break;
            }
        } else {
            let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            h *= fac;
            rejected_last = true;
        }
    }

    if t < t_end {
        return Err(Error::TooManySteps { t_reached: t, max_steps: MAX_STEPS });
    }
    debug_assert_eq!(samples.len(), sample_times.len());
    Ok(samples)
}

/// Integrates a valid initial state and packages the sampled points as
/// states: each sample is re-Hermitized and trace-renormalized, with the
/// defects recorded on the trajectory. The integration itself is a plain
/// linear solve with no projections.
pub fn evolve(
    params: &SystemParams,
    rho0: &DensityMatrix,
    t_end: f64,
    sample_times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let raw = integrate(params, rho0.basis(), rho0.entries(), t_end, sample_times, cfg)?;
    let mut states = Vec::with_capacity(raw.len());
    let mut trace_defect = 0.0f64;
    let mut herm_defect = 0.0f64;
    for m in raw {
        let tr = trace(&m);
        trace_defect = trace_defect.max((tr - C64::new(1.0, 0.0)).norm());
        herm_defect = herm_defect.max(linalg::max_abs(&(&m - &linalg::dagger(&m))));
        let clean = hermitize(&m) / C64::new(trace(&m).re, 0.0);
        states.push(DensityMatrix::with_positivity_floor(
            clean,
            rho0.basis(),
            POSITIVITY_FLOOR_SAMPLED,
        )?);
    }
    Ok(Trajectory {
        times: sample_times.to_vec(),
        states,
        params: *params,
        trace_defect,
        hermiticity_defect: herm_defect,
    })
}

/// Propagates an arbitrary matrix (conditioned states, operators, scaled
/// states) under the same generator, without renormalization.
pub fn evolve_matrix(
    params: &SystemParams,
    basis: Basis,
    m0: &Array2<C64>,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Array2<C64>> {
    if t_end == 0.0 {
        return Ok(m0.clone());
    }
    let samples = integrate(params, basis, m0, t_end, &[t_end], cfg)?;
    Ok(samples.into_iter().next_back().expect("one sample requested"))
}

/// Multi-sample variant of [`evolve_matrix`] sharing a single integration
/// pass. Used by the correlation routines.
pub(crate) fn evolve_matrix_samples(
    params: &SystemParams,
    basis: Basis,
    m0: &Array2<C64>,
    sample_times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Array2<C64>>> {
    let t_end = match sample_times.last() {
        Some(&t) if t > 0.0 => t,
        _ => {
            // all requested times are zero
            return Ok(sample_times.iter().map(|_| m0.clone()).collect());
        }
    };
    integrate(params, basis, m0, t_end, sample_times, cfg)
}

/// Independent propagation backend: matrix exponential of the vectorized
/// generator applied to the stacked input.
pub fn evolve_matrix_expm(
    params: &SystemParams,
    basis: Basis,
    m0: &Array2<C64>,
    t: f64,
) -> Result<Array2<C64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!("time must be nonnegative, got {t}")));
    }
    let sop = build_superoperator(params, basis);
    let propagator = linalg::expm(&(sop.entries() * C64::new(t, 0.0)))?;
    Ok(linalg::unvec_col(&propagator.dot(&linalg::vec_col(m0)), DIM))
}
