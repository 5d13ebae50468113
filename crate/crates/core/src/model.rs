//! The physical and auxiliary vector fields and the exact transformation
//! between them.
//!
//! The physical model carries a linear rotation `i omega z` on top of the
//! pairwise interactions; the auxiliary model keeps only the interactions and
//! runs in a complexified time `tau`. Both right-hand sides are rational in
//! the state, so evaluation is refused near pairwise collisions instead of
//! returning huge values.

use serde::Serialize;

use crate::error::ModelError;
use crate::C64;

/// Minimum pairwise separation below which vector fields refuse to evaluate.
pub const DEFAULT_SEP_EPS: f64 = 1e-10;

/// Tolerance on `| |2 omega tau| - 1 |` for recognizing a physical-time tau.
pub const TAU_CURVE_TOL: f64 = 1e-9;

/// Coupling constants of the three-body interaction, plus the frequency of
/// the physical model (unused by the auxiliary model).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Couplings {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub omega: f64,
}

impl Couplings {
    /// Couplings with the default frequency `omega = 1`.
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self {
            a,
            b,
            c,
            omega: 1.0,
        }
    }

    pub fn with_omega(a: f64, b: f64, c: f64, omega: f64) -> Self {
        Self { a, b, c, omega }
    }

    /// Sum `a + b + c`, the source strength entering every conservation law.
    pub fn sum(&self) -> f64 {
        self.a + self.b + self.c
    }
}

/// Complex positions of the three particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State3 {
    pub u: C64,
    pub v: C64,
    pub w: C64,
}

impl State3 {
    pub fn new(u: C64, v: C64, w: C64) -> Self {
        Self { u, v, w }
    }

    /// State with real components.
    pub fn real(u: f64, v: f64, w: f64) -> Self {
        Self {
            u: C64::new(u, 0.0),
            v: C64::new(v, 0.0),
            w: C64::new(w, 0.0),
        }
    }

    pub fn from_array(a: [C64; 3]) -> Self {
        Self {
            u: a[0],
            v: a[1],
            w: a[2],
        }
    }

    pub fn to_array(&self) -> [C64; 3] {
        [self.u, self.v, self.w]
    }

    /// Real parts of the components.
    pub fn re(&self) -> [f64; 3] {
        [self.u.re, self.v.re, self.w.re]
    }

    /// True when all imaginary parts are below `tol` in magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        self.u.im.abs() <= tol && self.v.im.abs() <= tol && self.w.im.abs() <= tol
    }

    /// Smallest pairwise distance between the three particles.
    pub fn min_separation(&self) -> f64 {
        let duv = (self.u - self.v).norm();
        let dvw = (self.v - self.w).norm();
        let dwu = (self.w - self.u).norm();
        duv.min(dvw).min(dwu)
    }

    /// Component sum `u + v + w`.
    pub fn sum(&self) -> C64 {
        self.u + self.v + self.w
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            u: self.u * s,
            v: self.v * s,
            w: self.w * s,
        }
    }
}

/// A state together with the complexified time of the auxiliary model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtendedPoint {
    pub tau: C64,
    pub state: State3,
}

impl ExtendedPoint {
    pub fn new(tau: C64, state: State3) -> Self {
        Self { tau, state }
    }
}

/// Smallest pairwise distance of a state.
pub fn min_separation(state: &State3) -> f64 {
    state.min_separation()
}

fn guard_separation(state: &State3) -> Result<(), ModelError> {
    let min_sep = state.min_separation();
    if min_sep < DEFAULT_SEP_EPS {
        return Err(ModelError::SeparationTooSmall {
            min_sep,
            threshold: DEFAULT_SEP_EPS,
        });
    }
    Ok(())
}

/// Right-hand side of the physical model: rotation plus pairwise forces.
///
/// Components are `(i omega x + c/(x-y) + b/(x-z), i omega y + a/(y-z) +
/// c/(y-x), i omega z + b/(z-x) + a/(z-y))`. Evaluation with `omega = 0`
/// gives the rotation-free limit of the interactions.
pub fn physical_rhs(state: &State3, params: &Couplings) -> Result<State3, ModelError> {
    guard_separation(state)?;
    let (x, y, z) = (state.u, state.v, state.w);
    let iw = C64::new(0.0, params.omega);
    Ok(State3 {
        u: iw * x + params.c / (x - y) + params.b / (x - z),
        v: iw * y + params.a / (y - z) + params.c / (y - x),
        w: iw * z + params.b / (z - x) + params.a / (z - y),
    })
}

/// Right-hand side of the auxiliary model: pairwise forces only.
///
/// Homogeneous of degree -1 in the state; its component sum vanishes
/// identically.
pub fn auxiliary_rhs(state: &State3, params: &Couplings) -> Result<State3, ModelError> {
    guard_separation(state)?;
    let (u, v, w) = (state.u, state.v, state.w);
    Ok(State3 {
        u: params.c / (u - v) + params.b / (u - w),
        v: params.a / (v - w) + params.c / (v - u),
        w: params.b / (w - u) + params.a / (w - v),
    })
}

/// Map physical variables `(t, x)` to auxiliary variables `(tau, u)`.
///
/// `u = exp(-i omega t) x` and `tau = -exp(-2 i omega t)/(2 i omega)`; the
/// transformation factors the linear rotation out of the physical flow.
pub fn to_auxiliary(
    t: f64,
    state: &State3,
    params: &Couplings,
) -> Result<ExtendedPoint, ModelError> {
    if params.omega <= 0.0 {
        return Err(ModelError::InvalidOmega(params.omega));
    }
    let phase = (-C64::i() * params.omega * t).exp();
    let tau = -phase * phase / (C64::i() * 2.0 * params.omega);
    Ok(ExtendedPoint {
        tau,
        state: state.scale(phase),
    })
}

/// Invert `to_auxiliary` on the principal time branch.
///
/// `tau` determines `exp(-2 i omega t)` and hence `t` only modulo
/// `pi / omega`; the principal solution in `[0, pi/omega)` is returned.
/// Off-curve inputs (those with `|2 omega tau|` away from 1) are rejected.
pub fn from_auxiliary(
    point: &ExtendedPoint,
    params: &Couplings,
) -> Result<(f64, State3), ModelError> {
    if params.omega <= 0.0 {
        return Err(ModelError::InvalidOmega(params.omega));
    }
    // tau = -exp(-2 i omega t) / (2 i omega)  =>  exp(-2 i omega t) = -2 i omega tau
    let unit = -C64::i() * 2.0 * params.omega * point.tau;
    let modulus = unit.norm();
    if (modulus - 1.0).abs() > TAU_CURVE_TOL {
        return Err(ModelError::TauOffCurve { modulus });
    }
    let period = std::f64::consts::PI / params.omega;
    let mut t = -unit.arg() / (2.0 * params.omega);
    if t < 0.0 {
        t += period;
    }
    if t >= period {
        t -= period;
    }
    let phase = (C64::i() * params.omega * t).exp();
    Ok((t, point.state.scale(phase)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn physical_pure_rotation() {
        let p = Couplings::with_omega(0.0, 0.0, 0.0, 1.0);
        let s = State3::real(1.0, 2.0, 3.0);
        let d = physical_rhs(&s, &p).unwrap();
        assert_eq!(d.u, c(0.0, 1.0));
        assert_eq!(d.v, c(0.0, 2.0));
        assert_eq!(d.w, c(0.0, 3.0));
    }

    #[test]
    fn physical_rotation_free_limit_matches_auxiliary() {
        let p = Couplings::with_omega(1.0, 1.0, 1.0, 0.0);
        let s = State3::real(2.0, 1.0, 0.0);
        let d = physical_rhs(&s, &p).unwrap();
        assert_relative_eq!(d.u.re, 1.5, max_relative = 1e-15);
        assert_relative_eq!(d.v.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(d.w.re, -1.5, max_relative = 1e-15);
        // component sum of the interaction terms cancels pairwise
        let sum = d.u + d.v + d.w;
        assert!(sum.norm() < 1e-14);
    }

    #[test]
    fn auxiliary_direct_substitution() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let s = State3::real(2.0, 1.0, 0.0);
        let d = auxiliary_rhs(&s, &p).unwrap();
        assert_relative_eq!(d.u.re, 1.5, max_relative = 1e-15);
        assert_relative_eq!(d.v.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(d.w.re, -1.5, max_relative = 1e-15);
    }

    #[test]
    fn auxiliary_only_a_terms() {
        let p = Couplings::new(1.0, 0.0, 0.0);
        let s = State3::real(0.0, 2.0, 1.0);
        let d = auxiliary_rhs(&s, &p).unwrap();
        assert_eq!(d.u, c(0.0, 0.0));
        assert_relative_eq!(d.v.re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(d.w.re, -1.0, max_relative = 1e-15);
    }

    #[test]
    fn auxiliary_degree_minus_one() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let s = State3::real(4.0, 2.0, 0.0);
        let d = auxiliary_rhs(&s, &p).unwrap();
        assert_relative_eq!(d.u.re, 0.75, max_relative = 1e-15);
        assert_relative_eq!(d.w.re, -0.75, max_relative = 1e-15);
    }

    #[test]
    fn separation_guard_trips() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let s = State3::real(1.0, 1.0, 0.0);
        assert!(matches!(
            auxiliary_rhs(&s, &p),
            Err(ModelError::SeparationTooSmall { .. })
        ));
        assert!(matches!(
            physical_rhs(&s, &p),
            Err(ModelError::SeparationTooSmall { .. })
        ));
    }

    #[test]
    fn min_separation_examples() {
        assert_relative_eq!(State3::real(2.0, 1.0, 0.0).min_separation(), 1.0);
        assert_relative_eq!(State3::real(1.0, 1.0, 0.0).min_separation(), 0.0);
        let s = State3::new(c(1.0, 1.0), c(1.0, 0.0), c(0.0, 0.0));
        assert_relative_eq!(s.min_separation(), 1.0);
    }

    #[test]
    fn to_auxiliary_at_t_zero() {
        let p = Couplings::with_omega(1.0, 1.0, 1.0, 0.5);
        let s = State3::real(1.0, 2.0, 3.0);
        let e = to_auxiliary(0.0, &s, &p).unwrap();
        assert_eq!(e.state, s);
        assert!((e.tau - c(0.0, 1.0)).norm() < 1e-15);

        let p1 = Couplings::with_omega(1.0, 1.0, 1.0, 1.0);
        let e1 = to_auxiliary(0.0, &s, &p1).unwrap();
        assert!((e1.tau - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn to_auxiliary_rejects_nonpositive_omega() {
        let p = Couplings::with_omega(1.0, 1.0, 1.0, 0.0);
        let s = State3::real(1.0, 2.0, 3.0);
        assert!(matches!(
            to_auxiliary(0.0, &s, &p),
            Err(ModelError::InvalidOmega(_))
        ));
    }

    #[test]
    fn from_auxiliary_round_trip() {
        let p = Couplings::new(1.0, 2.0, 3.0);
        let s = State3::real(1.0, 2.0, 3.0);
        let t = 0.7;
        let e = to_auxiliary(t, &s, &p).unwrap();
        let (t_back, s_back) = from_auxiliary(&e, &p).unwrap();
        assert_relative_eq!(t_back, t, epsilon = 1e-12);
        assert!((s_back.u - s.u).norm() < 1e-12);
        assert!((s_back.v - s.v).norm() < 1e-12);
        assert!((s_back.w - s.w).norm() < 1e-12);
    }

    #[test]
    fn from_auxiliary_principal_time() {
        let p = Couplings::new(0.0, 0.0, 0.0);
        let e = ExtendedPoint::new(c(0.0, 0.5), State3::real(1.0, 2.0, 3.0));
        let (t, _) = from_auxiliary(&e, &p).unwrap();
        assert_relative_eq!(t, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn from_auxiliary_off_curve() {
        let p = Couplings::new(0.0, 0.0, 0.0);
        let e = ExtendedPoint::new(c(1.0, 0.0), State3::real(1.0, 2.0, 3.0));
        match from_auxiliary(&e, &p) {
            Err(ModelError::TauOffCurve { modulus }) => {
                assert_relative_eq!(modulus, 2.0, epsilon = 1e-12)
            }
            other => panic!("expected TauOffCurve, got {other:?}"),
        }
    }

    #[test]
    fn zero_sum_of_auxiliary_rhs() {
        let p = Couplings::new(1.3, -0.7, 2.1);
        let s = State3::new(c(2.0, 0.5), c(-1.0, 1.5), c(0.3, -0.2));
        let d = auxiliary_rhs(&s, &p).unwrap();
        assert!(d.sum().norm() < 1e-15 * 10.0);
    }

    #[test]
    fn physical_sum_is_rotation_of_state_sum() {
        let p = Couplings::with_omega(1.3, -0.7, 2.1, 0.9);
        let s = State3::new(c(2.0, 0.5), c(-1.0, 1.5), c(0.3, -0.2));
        let d = physical_rhs(&s, &p).unwrap();
        let expect = C64::i() * p.omega * s.sum();
        assert!((d.sum() - expect).norm() < 1e-14);
    }

    #[test]
    fn relabel_antisymmetry() {
        // swapping u <-> v together with a <-> b permutes the output
        let p = Couplings::new(1.2, -0.4, 0.8);
        let ps = Couplings::new(-0.4, 1.2, 0.8);
        let s = State3::new(c(2.0, 1.0), c(-1.0, 0.5), c(0.5, -2.0));
        let ss = State3::new(s.v, s.u, s.w);
        let d = auxiliary_rhs(&s, &p).unwrap();
        let ds = auxiliary_rhs(&ss, &ps).unwrap();
        assert!((ds.u - d.v).norm() < 1e-14);
        assert!((ds.v - d.u).norm() < 1e-14);
        assert!((ds.w - d.w).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn homogeneity_degree_minus_one(
            ure in -5.0..5.0f64, uim in -5.0..5.0f64,
            vre in -5.0..5.0f64, vim in -5.0..5.0f64,
            wre in -5.0..5.0f64, wim in -5.0..5.0f64,
            sre in -3.0..3.0f64, sim in -3.0..3.0f64,
        ) {
            let s = State3::new(c(ure, uim), c(vre, vim), c(wre, wim));
            let scale = c(sre, sim);
            prop_assume!(s.min_separation() > 0.05);
            prop_assume!(scale.norm() > 0.1);
            let p = Couplings::new(1.0, 2.0, -0.5);
            let d1 = auxiliary_rhs(&s.scale(scale), &p).unwrap();
            let d0 = auxiliary_rhs(&s, &p).unwrap();
            let expect = d0.scale(1.0 / scale);
            let err = (d1.u - expect.u).norm() + (d1.v - expect.v).norm() + (d1.w - expect.w).norm();
            let mag = d1.u.norm() + d1.v.norm() + d1.w.norm();
            prop_assert!(err <= 1e-12 * mag.max(1e-6));
        }

        #[test]
        fn auxiliary_round_trip_random_time(t in 0.05..3.0f64, om in 0.2..3.0f64) {
            let p = Couplings::with_omega(1.0, 1.0, 1.0, om);
            let s = State3::real(1.0, -2.0, 0.5);
            let e = to_auxiliary(t, &s, &p).unwrap();
            let (tb, sb) = from_auxiliary(&e, &p).unwrap();
            let period = std::f64::consts::PI / om;
            let dt = (tb - t.rem_euclid(period)).abs();
            prop_assert!(dt < 1e-9, "t mismatch: {} vs {}", tb, t);
            if dt < 1e-9 && (t.rem_euclid(period) - t).abs() < 1e-12 {
                prop_assert!((sb.u - s.u).norm() < 1e-9);
            }
        }
    }
}
