//! Adaptive embedded Runge-Kutta integration of either model over complex
//! states, with conserved-quantity bookkeeping, collision guards, and
//! trajectory records.
//!
//! The stepper is the classic 5(4) embedded pair with a standard controller
//! (safety 0.9, growth clamped to [0.2, 5]). The right-hand sides are smooth
//! rational fields away from collisions, so no stiffness handling is needed;
//! runs that approach a collision terminate with a dedicated reason before
//! the separation floor is violated in recorded samples.

use serde::Serialize;

use crate::conserved::{
    directional_residual, h1, h1_physical, h2_aux, h2_physical_via_transform, select_fundamental,
    Fundamental,
};
use crate::error::ModelError;
use crate::model::{auxiliary_rhs, physical_rhs, to_auxiliary, Couplings, ExtendedPoint, State3};
use crate::C64;

/// Which vector field to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Physical,
    Auxiliary,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Physical => f.write_str("physical"),
            ModelKind::Auxiliary => f.write_str("auxiliary"),
        }
    }
}

/// Integrator configuration. The integration parameter is real; for the
/// auxiliary model it parameterizes the complexified time along the straight
/// line `tau(s) = tau0 + s * direction` with `|direction| = 1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegrationConfig {
    pub rtol: f64,
    pub atol: f64,
    pub t0: f64,
    pub t1: f64,
    /// Optional cap on the step magnitude.
    pub max_step: Option<f64>,
    /// Optional explicit first step; a heuristic is used otherwise.
    pub initial_step: Option<f64>,
    /// Starting complexified time of the auxiliary model.
    pub tau0: C64,
    /// Unit complex direction of the tau line (auxiliary model only).
    pub direction: C64,
    /// Abort threshold on the minimum pairwise separation.
    pub sep_floor: f64,
}

impl IntegrationConfig {
    pub fn new(t0: f64, t1: f64) -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            t0,
            t1,
            max_step: None,
            initial_step: None,
            tau0: C64::new(0.0, 0.0),
            direction: C64::new(1.0, 0.0),
            sep_floor: 1e-8,
        }
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(ModelError::InvalidConfig(
                "rtol and atol must be positive".into(),
            ));
        }
        if self.t1 == self.t0 {
            return Err(ModelError::InvalidConfig("t1 must differ from t0".into()));
        }
        if (self.direction.norm() - 1.0).abs() > 1e-9 {
            return Err(ModelError::InvalidConfig(
                "direction must have unit modulus".into(),
            ));
        }
        if !(self.sep_floor >= 0.0) {
            return Err(ModelError::InvalidConfig(
                "sep_floor must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Why an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Collision,
    StepUnderflow,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Completed => f.write_str("completed"),
            Termination::Collision => f.write_str("collision"),
            Termination::StepUnderflow => f.write_str("step_underflow"),
        }
    }
}

/// One recorded integration sample.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sample {
    /// Integration parameter (real time, or arc length along the tau line).
    pub t: f64,
    pub state: State3,
    /// Linear conserved quantity at the sample.
    pub h1: C64,
    /// Quadratic conserved quantity at the sample (tau bookkeeping included).
    pub h2: C64,
    /// Relative directional residual of the applicable time-independent
    /// first integral; NaN when none applies.
    pub fund_dirres: f64,
}

/// Integration output: every accepted step, step statistics, and the
/// termination reason.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub model: ModelKind,
    pub samples: Vec<Sample>,
    pub accepted: usize,
    pub rejected: usize,
    pub termination: Termination,
}

/// Conserved-quantity drift summary of a trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DriftReport {
    pub samples: usize,
    /// Max absolute drift of the linear integral.
    pub h1_drift: f64,
    /// Max drift of the quadratic integral, relative to its initial size.
    pub h2_rel_drift: f64,
    /// Max relative directional residual of the fundamental integral along
    /// the samples; NaN when none applies.
    pub fund_max_dirres: f64,
}

// Dormand-Prince 5(4) coefficients (the fields are autonomous, so the
// stage abscissae are not needed).
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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// error weights: 5th-order minus embedded 4th-order
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type Vec3 = [C64; 3];

fn axpy(y: &Vec3, h: f64, terms: &[(f64, &Vec3)]) -> Vec3 {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..3 {
            out[i] += h * *coef * k[i];
        }
    }
    out
}

struct Stepper<'a> {
    model: ModelKind,
    params: &'a Couplings,
    direction: C64,
}

impl Stepper<'_> {
    fn rhs(&self, y: &Vec3) -> Result<Vec3, ModelError> {
        let state = State3::from_array(*y);
        let d = match self.model {
            ModelKind::Physical => physical_rhs(&state, self.params)?,
            ModelKind::Auxiliary => auxiliary_rhs(&state, self.params)?.scale(self.direction),
        };
        Ok(d.to_array())
    }

    /// One embedded step from `y` with step `h` and first stage `k1`.
    /// Returns the 5th-order solution, the FSAL stage, and the error vector.
    fn step(&self, y: &Vec3, h: f64, k1: &Vec3) -> Result<(Vec3, Vec3, Vec3), ModelError> {
        let k2 = self.rhs(&axpy(y, h, &[(A21, k1)]))?;
        let k3 = self.rhs(&axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
        let k4 = self.rhs(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = self.rhs(&axpy(
            y,
            h,
            &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        ))?;
        let k6 = self.rhs(&axpy(
            y,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ))?;
        let y5 = axpy(
            y,
            h,
            &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = self.rhs(&y5)?;
        let mut err = [C64::new(0.0, 0.0); 3];
        for i in 0..3 {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        Ok((y5, k7, err))
    }
}

/// Scaled error norm: max over the six real components of
/// `|err| / (atol + rtol max(|y|, |y_new|))`.
fn error_norm(err: &Vec3, y: &Vec3, y_new: &Vec3, rtol: f64, atol: f64) -> f64 {
    let mut norm = 0.0f64;
    for i in 0..3 {
        let pairs = [
            (err[i].re, y[i].re.abs().max(y_new[i].re.abs())),
            (err[i].im, y[i].im.abs().max(y_new[i].im.abs())),
        ];
        for (e, scale) in pairs {
            norm = norm.max(e.abs() / (atol + rtol * scale));
        }
    }
    norm
}

struct Recorder<'a> {
    model: ModelKind,
    params: &'a Couplings,
    fundamental: Fundamental,
    config: IntegrationConfig,
}

impl Recorder<'_> {
    fn sample(&self, t: f64, y: &Vec3) -> Sample {
        let state = State3::from_array(*y);
        let (h1v, h2v, dirres_state) = match self.model {
            ModelKind::Auxiliary => {
                let tau = self.config.tau0 + self.config.direction * t;
                let point = ExtendedPoint::new(tau, state);
                (h1(&state), h2_aux(&point, self.params), state)
            }
            ModelKind::Physical => {
                let h1v = h1_physical(t, &state, self.params);
                let h2v = h2_physical_via_transform(t, &state, self.params)
                    .unwrap_or(C64::new(f64::NAN, f64::NAN));
                let aux_state = to_auxiliary(t, &state, self.params)
                    .map(|p| p.state)
                    .unwrap_or(state);
                (h1v, h2v, aux_state)
            }
        };
        let fund_dirres = match self.fundamental.gradient(&dirres_state) {
            Some(grad) => match auxiliary_rhs(&dirres_state, self.params) {
                Ok(flow) => {
                    let (res, scale) = directional_residual(&grad, &flow);
                    res / scale.max(1e-300)
                }
                Err(_) => f64::NAN,
            },
            None => f64::NAN,
        };
        Sample {
            t,
            state,
            h1: h1v,
            h2: h2v,
            fund_dirres,
        }
    }
}

/// Integrate one model over `[t0, t1]` with adaptive step control.
///
/// Every accepted step is recorded. Collisions (minimum separation at or
/// below the configured floor) and controller underflow terminate the run
/// early with the corresponding reason; the trajectory collected so far is
/// still returned.
pub fn integrate(
    model: ModelKind,
    initial: &State3,
    params: &Couplings,
    config: &IntegrationConfig,
) -> Result<Trajectory, ModelError> {
    config.validate()?;
    if model == ModelKind::Physical && params.omega < 0.0 {
        return Err(ModelError::InvalidOmega(params.omega));
    }
    if initial.min_separation() <= config.sep_floor {
        return Err(ModelError::SeparationTooSmall {
            min_sep: initial.min_separation(),
            threshold: config.sep_floor,
        });
    }

    let stepper = Stepper {
        model,
        params,
        direction: config.direction,
    };
    let recorder = Recorder {
        model,
        params,
        fundamental: select_fundamental(params),
        config: *config,
    };

    let span = config.t1 - config.t0;
    let sign = span.signum();
    let h_min = 1e-14 * span.abs();
    let h_max = config.max_step.unwrap_or(span.abs());
    let mut h = config
        .initial_step
        .map(|s| s.abs())
        .unwrap_or((span.abs() * 1e-3).min(h_max))
        .min(h_max)
        .max(h_min)
        * sign;

    let mut t = config.t0;
    let mut y = initial.to_array();
    let mut samples = vec![recorder.sample(t, &y)];
    let mut accepted = 0usize;
    let mut rejected = 0usize;

    let mut k1 = match stepper.rhs(&y) {
        Ok(k) => k,
        Err(ModelError::SeparationTooSmall { .. }) => {
            return Ok(Trajectory {
                model,
                samples,
                accepted,
                rejected,
                termination: Termination::Collision,
            })
        }
        Err(e) => return Err(e),
    };

    loop {
        if (t - config.t1) * sign >= 0.0 {
            return Ok(Trajectory {
                model,
                samples,
                accepted,
                rejected,
                termination: Termination::Completed,
            });
        }
        // never step past the endpoint
        if (t + h - config.t1) * sign > 0.0 {
            h = config.t1 - t;
        }

        let step_result = stepper.step(&y, h, &k1);
        let (y_new, k_new, err) = match step_result {
            Ok(r) => r,
            Err(ModelError::SeparationTooSmall { .. }) => {
                // a stage hit the singular set; treat it as a collision
                return Ok(Trajectory {
                    model,
                    samples,
                    accepted,
                    rejected,
                    termination: Termination::Collision,
                });
            }
            Err(e) => return Err(e),
        };
        let norm = error_norm(&err, &y, &y_new, config.rtol, config.atol);

        if norm <= 1.0 {
            let new_state = State3::from_array(y_new);
            if new_state.min_separation() <= config.sep_floor {
                return Ok(Trajectory {
                    model,
                    samples,
                    accepted,
                    rejected,
                    termination: Termination::Collision,
                });
            }
            t += h;
            y = y_new;
            k1 = k_new;
            accepted += 1;
            samples.push(recorder.sample(t, &y));
        } else {
            rejected += 1;
        }

        let factor = if norm > 0.0 {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h.abs() > h_max {
            h = h_max * sign;
        }
        if h.abs() < h_min {
            return Ok(Trajectory {
                model,
                samples,
                accepted,
                rejected,
                termination: Termination::StepUnderflow,
            });
        }
    }
}

/// Fixed-step endpoint propagation with the same embedded pair, used for
/// convergence-order measurements.
pub fn integrate_fixed_steps(
    model: ModelKind,
    initial: &State3,
    params: &Couplings,
    config: &IntegrationConfig,
    n_steps: usize,
) -> Result<State3, ModelError> {
    if n_steps == 0 {
        return Err(ModelError::InvalidConfig("n_steps must be positive".into()));
    }
    let stepper = Stepper {
        model,
        params,
        direction: config.direction,
    };
    let h = (config.t1 - config.t0) / n_steps as f64;
    let mut y = initial.to_array();
    let mut k1 = stepper.rhs(&y)?;
    for _ in 0..n_steps {
        let (y_new, k_new, _) = stepper.step(&y, h, &k1)?;
        y = y_new;
        k1 = k_new;
    }
    Ok(State3::from_array(y))
}

/// Summarize conserved-quantity drift over a trajectory.
pub fn drift_report(traj: &Trajectory, _params: &Couplings) -> Result<DriftReport, ModelError> {
    let first = traj.samples.first().ok_or(ModelError::EmptyTrajectory)?;
    let mut h1_drift = 0.0f64;
    let mut h2_drift = 0.0f64;
    let mut fund: f64 = f64::NAN;
    for s in &traj.samples {
        h1_drift = h1_drift.max((s.h1 - first.h1).norm());
        h2_drift = h2_drift.max((s.h2 - first.h2).norm());
        if s.fund_dirres.is_finite() {
            fund = if fund.is_nan() {
                s.fund_dirres
            } else {
                fund.max(s.fund_dirres)
            };
        }
    }
    Ok(DriftReport {
        samples: traj.samples.len(),
        h1_drift,
        h2_rel_drift: h2_drift / first.h2.norm().max(1.0),
        fund_max_dirres: fund,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_symmetric_run(rtol: f64) -> Trajectory {
        let params = Couplings::new(1.0, 1.0, 1.0);
        let config = IntegrationConfig::new(0.0, 0.1).with_tolerances(rtol, rtol * 1e-2);
        integrate(
            ModelKind::Auxiliary,
            &State3::real(2.0, 1.0, 0.0),
            &params,
            &config,
        )
        .unwrap()
    }

    #[test]
    fn linear_invariant_is_exact_to_tolerance() {
        let traj = full_symmetric_run(1e-10);
        assert_eq!(traj.termination, Termination::Completed);
        let report = drift_report(&traj, &Couplings::new(1.0, 1.0, 1.0)).unwrap();
        assert!(report.h1_drift <= 1e-9, "h1 drift {}", report.h1_drift);
        assert!(
            report.h2_rel_drift <= 1e-8,
            "h2 drift {}",
            report.h2_rel_drift
        );
        assert!(report.fund_max_dirres <= 1e-8);
    }

    #[test]
    fn two_body_closed_form() {
        // a = b = 0 makes (u - v)^2 evolve linearly: d0^2 + 4 c s
        let params = Couplings::new(0.0, 0.0, 1.0);
        let config = IntegrationConfig::new(0.0, 0.5).with_tolerances(1e-11, 1e-13);
        let initial = State3::real(1.0, -1.0, 5.0);
        let traj = integrate(ModelKind::Auxiliary, &initial, &params, &config).unwrap();
        assert_eq!(traj.termination, Termination::Completed);
        let d0 = initial.u - initial.v;
        for s in &traj.samples {
            let d = s.state.u - s.state.v;
            let expect = d0 * d0 + 4.0 * params.c * s.t;
            let got = d * d;
            assert!(
                (got - expect).norm() <= 1e-9 * expect.norm().max(1.0),
                "closed form violated at t = {}",
                s.t
            );
            // w is frozen in this case
            assert!((s.state.w - initial.w).norm() < 1e-12);
        }
    }

    #[test]
    fn collision_terminates_before_floor_violation() {
        // (u0 - v0)^2 + 4cs hits zero at s = 1 when aimed backwards
        let params = Couplings::new(0.0, 0.0, 1.0);
        let mut config = IntegrationConfig::new(0.0, -2.0).with_tolerances(1e-9, 1e-11);
        config.sep_floor = 1e-6;
        let initial = State3::real(1.0, -1.0, 5.0);
        let traj = integrate(ModelKind::Auxiliary, &initial, &params, &config).unwrap();
        assert_eq!(traj.termination, Termination::Collision);
        for s in &traj.samples {
            assert!(s.state.min_separation() > config.sep_floor);
        }
        // the run made progress toward the collision at s = -1
        let last_t = traj.samples.last().unwrap().t;
        assert!(last_t < -0.9, "stopped too early: {last_t}");
    }

    #[test]
    fn convergence_order_of_fixed_steps() {
        // integrate toward the collision so the local error is well above
        // the rounding floor on every grid
        let params = Couplings::new(0.0, 0.0, 1.0);
        let config = IntegrationConfig::new(0.0, -0.9);
        let initial = State3::real(1.0, -1.0, 5.0);
        let exact = (C64::new(4.0, 0.0) - 3.6).sqrt();
        let mut errors = Vec::new();
        for n in [10usize, 20, 40] {
            let end =
                integrate_fixed_steps(ModelKind::Auxiliary, &initial, &params, &config, n).unwrap();
            let d = end.u - end.v;
            errors.push((d - exact).norm());
        }
        let order1 = (errors[0] / errors[1]).log2();
        let order2 = (errors[1] / errors[2]).log2();
        assert!(
            order1 >= 4.0 && order2 >= 4.0,
            "observed orders {order1:.2}, {order2:.2} (errors {errors:?})"
        );
    }

    #[test]
    fn time_symmetry_round_trip() {
        let params = Couplings::new(1.0, 1.0, 1.0);
        let rtol = 1e-10;
        let atol = 1e-12;
        let fwd_cfg = IntegrationConfig::new(0.0, 0.2).with_tolerances(rtol, atol);
        let initial = State3::real(2.0, 1.0, 0.0);
        let fwd = integrate(ModelKind::Auxiliary, &initial, &params, &fwd_cfg).unwrap();
        let end = fwd.samples.last().unwrap().state;
        let bwd_cfg = IntegrationConfig::new(0.2, 0.0).with_tolerances(rtol, atol);
        let bwd = integrate(ModelKind::Auxiliary, &end, &params, &bwd_cfg).unwrap();
        let back = bwd.samples.last().unwrap().state;
        let steps = (fwd.accepted + bwd.accepted) as f64;
        let budget = 10.0 * steps * (rtol * 3.0 + atol);
        for (a, b) in back.to_array().iter().zip(initial.to_array().iter()) {
            assert!(
                (a - b).norm() <= budget,
                "round trip error {}",
                (a - b).norm()
            );
        }
    }

    #[test]
    fn physical_model_conserves_transformed_h2() {
        let params = Couplings::with_omega(1.0, 1.0, 1.0, 1.0);
        let config = IntegrationConfig::new(0.0, 0.4).with_tolerances(1e-11, 1e-13);
        let traj = integrate(
            ModelKind::Physical,
            &State3::real(2.0, 1.0, 0.0),
            &params,
            &config,
        )
        .unwrap();
        assert_eq!(traj.termination, Termination::Completed);
        let report = drift_report(&traj, &params).unwrap();
        assert!(report.h1_drift <= 1e-9, "h1 drift {}", report.h1_drift);
        assert!(
            report.h2_rel_drift <= 1e-9,
            "h2 drift {}",
            report.h2_rel_drift
        );
    }

    #[test]
    fn stated_physical_h2_is_not_conserved() {
        let params = Couplings::with_omega(1.0, 1.0, 1.0, 1.0);
        let config = IntegrationConfig::new(0.0, 0.4).with_tolerances(1e-11, 1e-13);
        let traj = integrate(
            ModelKind::Physical,
            &State3::real(2.0, 1.0, 0.0),
            &params,
            &config,
        )
        .unwrap();
        let first = traj.samples.first().unwrap();
        let v0 = crate::conserved::h2_physical_stated(first.t, &first.state, &params);
        let mut drift = 0.0f64;
        for s in &traj.samples {
            let v = crate::conserved::h2_physical_stated(s.t, &s.state, &params);
            drift = drift.max((v - v0).norm());
        }
        assert!(drift > 1e-2, "stated form unexpectedly conserved: {drift}");
    }

    #[test]
    fn empty_trajectory_is_an_error() {
        let traj = Trajectory {
            model: ModelKind::Auxiliary,
            samples: vec![],
            accepted: 0,
            rejected: 0,
            termination: Termination::Completed,
        };
        assert!(matches!(
            drift_report(&traj, &Couplings::new(1.0, 1.0, 1.0)),
            Err(ModelError::EmptyTrajectory)
        ));
    }

    #[test]
    fn invalid_configs_rejected() {
        let params = Couplings::new(1.0, 1.0, 1.0);
        let s = State3::real(2.0, 1.0, 0.0);
        let mut cfg = IntegrationConfig::new(0.0, 0.0);
        assert!(integrate(ModelKind::Auxiliary, &s, &params, &cfg).is_err());
        cfg = IntegrationConfig::new(0.0, 1.0);
        cfg.rtol = -1.0;
        assert!(integrate(ModelKind::Auxiliary, &s, &params, &cfg).is_err());
        let bad_state = State3::real(1.0, 1.0, 0.0);
        let cfg = IntegrationConfig::new(0.0, 1.0);
        assert!(integrate(ModelKind::Auxiliary, &bad_state, &params, &cfg).is_err());
    }

    #[test]
    fn tolerance_refinement_reduces_endpoint_error() {
        let params = Couplings::new(0.0, 0.0, 1.0);
        let initial = State3::real(1.0, -1.0, 5.0);
        let exact_d2 = |s: f64| C64::new(4.0 + 4.0 * s, 0.0);
        let mut errs = Vec::new();
        for rtol in [1e-6, 1e-8, 1e-10] {
            let config = IntegrationConfig::new(0.0, 1.0).with_tolerances(rtol, rtol * 1e-2);
            let traj = integrate(ModelKind::Auxiliary, &initial, &params, &config).unwrap();
            let end = traj.samples.last().unwrap();
            let d = end.state.u - end.state.v;
            errs.push((d * d - exact_d2(end.t)).norm());
        }
        assert!(
            errs[2] < errs[0],
            "no improvement with tighter tolerance: {errs:?}"
        );
        assert!(errs[2] <= 1e-9);
    }
}
