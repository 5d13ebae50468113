//! Orthonormal plane coordinates, the reduced planar flow on level sets of
//! the linear integral, the characteristics slope, the conformal factor, and
//! the Liouville-density residuals.

use serde::Serialize;

use crate::error::ModelError;
use crate::model::{Couplings, State3};
use crate::numdiff::fd_step;
use crate::{C64, SQRT3, SQRT6};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Denominator threshold for the reduced flow.
const SINGULAR_EPS: f64 = 1e-10;

/// Orthonormal coordinates `zeta = (u+v+w)/sqrt3`, `eta = (u-v)/sqrt2`,
/// `xi = (u+v-2w)/sqrt6`. The map is linear and norm-preserving, so complex
/// states transform componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanePoint {
    pub zeta: C64,
    pub eta: C64,
    pub xi: C64,
}

impl PlanePoint {
    pub fn real(zeta: f64, eta: f64, xi: f64) -> Self {
        Self {
            zeta: C64::new(zeta, 0.0),
            eta: C64::new(eta, 0.0),
            xi: C64::new(xi, 0.0),
        }
    }

    /// Real parts when all imaginary parts are below `tol`.
    pub fn try_real(&self, tol: f64) -> Option<(f64, f64, f64)> {
        if self.zeta.im.abs() <= tol && self.eta.im.abs() <= tol && self.xi.im.abs() <= tol {
            Some((self.zeta.re, self.eta.re, self.xi.re))
        } else {
            None
        }
    }
}

/// Forward coordinate change.
pub fn to_plane(state: &State3) -> PlanePoint {
    PlanePoint {
        zeta: (state.u + state.v + state.w) / SQRT3,
        eta: (state.u - state.v) / SQRT2,
        xi: (state.u + state.v - 2.0 * state.w) / SQRT6,
    }
}

/// Inverse coordinate change (the transpose of the orthogonal matrix).
pub fn from_plane(p: &PlanePoint) -> State3 {
    State3 {
        u: p.zeta / SQRT3 + p.eta / SQRT2 + p.xi / SQRT6,
        v: p.zeta / SQRT3 - p.eta / SQRT2 + p.xi / SQRT6,
        w: p.zeta / SQRT3 - 2.0 * p.xi / SQRT6,
    }
}

/// The rows of the forward map as a 3x3 matrix (orthogonal).
pub fn plane_matrix() -> [[f64; 3]; 3] {
    [
        [1.0 / SQRT3, 1.0 / SQRT3, 1.0 / SQRT3],
        [1.0 / SQRT2, -1.0 / SQRT2, 0.0],
        [1.0 / SQRT6, 1.0 / SQRT6, -2.0 / SQRT6],
    ]
}

fn reduced_denominators(eta: f64, xi: f64) -> Result<(f64, f64), ModelError> {
    let plus = SQRT3 * xi + eta;
    let minus = SQRT3 * xi - eta;
    if eta.abs() < SINGULAR_EPS {
        return Err(ModelError::ReducedSingular(format!("eta = {eta:e}")));
    }
    if plus.abs() < SINGULAR_EPS {
        return Err(ModelError::ReducedSingular(format!(
            "sqrt3 xi + eta = {plus:e}"
        )));
    }
    if minus.abs() < SINGULAR_EPS {
        return Err(ModelError::ReducedSingular(format!(
            "sqrt3 xi - eta = {minus:e}"
        )));
    }
    Ok((plus, minus))
}

/// Right-hand side of the reduced planar flow on level sets of the linear
/// integral.
pub fn reduced_rhs(eta: f64, xi: f64, params: &Couplings) -> Result<(f64, f64), ModelError> {
    let (plus, minus) = reduced_denominators(eta, xi)?;
    Ok((
        params.c / eta + params.b / plus - params.a / minus,
        SQRT3 * (params.b / plus + params.a / minus),
    ))
}

/// Reduced potential `ln eta^c (sqrt3 xi + eta)^b (sqrt3 xi - eta)^a` on the
/// real branch; all three log arguments must be positive.
pub fn reduced_potential(eta: f64, xi: f64, params: &Couplings) -> Result<f64, ModelError> {
    let plus = SQRT3 * xi + eta;
    let minus = SQRT3 * xi - eta;
    for arg in [eta, plus, minus] {
        if arg <= 0.0 {
            return Err(ModelError::NonPositiveLogArgument(arg));
        }
    }
    Ok(params.c * eta.ln() + params.b * plus.ln() + params.a * minus.ln())
}

/// Analytic Laplacian of the reduced potential.
pub fn laplacian_reduced_potential(
    eta: f64,
    xi: f64,
    params: &Couplings,
) -> Result<f64, ModelError> {
    let (plus, minus) = reduced_denominators(eta, xi)?;
    Ok(-params.c / (eta * eta) - 4.0 * params.b / (plus * plus) - 4.0 * params.a / (minus * minus))
}

/// Slope `d xi / d eta` of the characteristics of the reduced flow.
pub fn characteristic_slope(eta: f64, xi: f64, params: &Couplings) -> Result<f64, ModelError> {
    let (a, b, c) = (params.a, params.b, params.c);
    let num = SQRT3 * (a - b) * eta * eta + 3.0 * (a + b) * eta * xi;
    let den = (a + b + c) * eta * eta + SQRT3 * (a - b) * eta * xi - 3.0 * c * xi * xi;
    let den_scale = (a + b + c).abs() * eta * eta
        + SQRT3 * (a - b).abs() * (eta * xi).abs()
        + 3.0 * c.abs() * xi * xi;
    if den.abs() <= 1e-12 * den_scale.max(1e-300) {
        return Err(ModelError::VerticalSlope(den));
    }
    Ok(-num / den)
}

/// Conformal factor of the equal-couplings case,
/// `1 / (sqrt3 eta (3 xi^2 - eta^2))`.
pub fn conformal_factor_full(eta: f64, xi: f64) -> Result<f64, ModelError> {
    let core = eta * (3.0 * xi * xi - eta * eta);
    let scale = eta.abs() * (3.0 * xi * xi + eta * eta);
    if core.abs() <= 1e-14 * scale.max(1e-300) {
        return Err(ModelError::ConformalSingular(core));
    }
    Ok(1.0 / (SQRT3 * core))
}

/// Left-hand side of the planar volume-density equation
/// `eta' dphi/deta + xi' dphi/dxi + phi lap(F)` for a candidate density
/// `phi`, together with the scale of its terms. Vanishes for an invariant
/// density.
pub fn liouville_residual<F>(
    phi: F,
    eta: f64,
    xi: f64,
    params: &Couplings,
) -> Result<(f64, f64), ModelError>
where
    F: Fn(f64, f64) -> f64,
{
    let (eta_dot, xi_dot) = reduced_rhs(eta, xi, params)?;
    let lap = laplacian_reduced_potential(eta, xi, params)?;
    let he = fd_step(eta);
    let hx = fd_step(xi);
    let dphi_deta = (phi(eta + he, xi) - phi(eta - he, xi)) / (2.0 * he);
    let dphi_dxi = (phi(eta, xi + hx) - phi(eta, xi - hx)) / (2.0 * hx);
    let terms = [eta_dot * dphi_deta, xi_dot * dphi_dxi, phi(eta, xi) * lap];
    let residual = terms.iter().sum::<f64>();
    let scale = terms.iter().map(|t| t.abs()).sum::<f64>();
    Ok((residual, scale))
}

/// Analytic divergence of the auxiliary field at a real state.
pub fn divergence_u(x: &[f64; 3], params: &Couplings) -> Result<f64, ModelError> {
    let (u, v, w) = (x[0], x[1], x[2]);
    let duv = u - v;
    let duw = u - w;
    let dvw = v - w;
    let min_sep = duv.abs().min(duw.abs()).min(dvw.abs());
    if min_sep < SINGULAR_EPS {
        return Err(ModelError::SeparationTooSmall {
            min_sep,
            threshold: SINGULAR_EPS,
        });
    }
    Ok(-2.0 * (params.c / (duv * duv) + params.b / (duw * duw) + params.a / (dvw * dvw)))
}

/// Three-dimensional volume-density residual `U . grad(phi) + phi div U`
/// for a candidate density on real states, with the scale of its terms.
pub fn liouville_residual_3d<F>(
    phi: F,
    x: &[f64; 3],
    params: &Couplings,
) -> Result<(f64, f64), ModelError>
where
    F: Fn(&[f64; 3]) -> f64,
{
    let state = State3::real(x[0], x[1], x[2]);
    let flow = crate::model::auxiliary_rhs(&state, params)?;
    let flow = [flow.u.re, flow.v.re, flow.w.re];
    let div = divergence_u(x, params)?;
    let mut terms = [0.0f64; 4];
    for i in 0..3 {
        let h = fd_step(x[i]);
        let mut xp = *x;
        let mut xm = *x;
        xp[i] += h;
        xm[i] -= h;
        terms[i] = flow[i] * (phi(&xp) - phi(&xm)) / (2.0 * h);
    }
    terms[3] = phi(x) * div;
    let residual = terms.iter().sum::<f64>();
    let scale = terms.iter().map(|t| t.abs()).sum::<f64>();
    Ok((residual, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conserved::h_full;
    use crate::model::auxiliary_rhs;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sector_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
        // eta > 0, sqrt3 xi > eta keeps all log arguments positive
        loop {
            let eta = rng.gen_range(0.2..3.0);
            let xi = rng.gen_range(0.2..3.0);
            if SQRT3 * xi - eta > 0.2 {
                return (eta, xi);
            }
        }
    }

    #[test]
    fn plane_examples() {
        let p = to_plane(&State3::real(1.0, 1.0, 1.0));
        assert_relative_eq!(p.zeta.re, SQRT3, max_relative = 1e-15);
        assert!(p.eta.norm() < 1e-15 && p.xi.norm() < 1e-15);

        let p = to_plane(&State3::real(5.0, 1.0, 0.0));
        assert_relative_eq!(p.zeta.re, 2.0 * SQRT3, max_relative = 1e-14);
        assert_relative_eq!(p.eta.re, 2.0 * SQRT2, max_relative = 1e-14);
        assert_relative_eq!(p.xi.re, SQRT6, max_relative = 1e-14);
    }

    #[test]
    fn plane_matrix_is_orthogonal() {
        let m = plane_matrix();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reduced_rhs_example() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let (ed, xd) = reduced_rhs(1.0, 1.0, &p).unwrap();
        assert!(ed.abs() < 1e-14);
        assert_relative_eq!(xd, 3.0, max_relative = 1e-14);
    }

    #[test]
    fn pushforward_matches_reduced_rhs() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let s = State3::real(5.0, 1.0, 0.0);
        let flow = auxiliary_rhs(&s, &p).unwrap();
        let plane_flow = to_plane(&flow);
        let here = to_plane(&s);
        let (ed, xd) = reduced_rhs(here.eta.re, here.xi.re, &p).unwrap();
        assert!(plane_flow.zeta.norm() < 1e-14, "zeta drift");
        assert_relative_eq!(plane_flow.eta.re, ed, max_relative = 1e-12);
        assert_relative_eq!(plane_flow.xi.re, xd, max_relative = 1e-12);
    }

    #[test]
    fn reduced_potential_example_and_gradient() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let f = reduced_potential(1.0, 1.0, &p).unwrap();
        assert_relative_eq!(f, 2.0f64.ln(), max_relative = 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (eta, xi) = sector_point(&mut rng);
            let (ed, xd) = reduced_rhs(eta, xi, &p).unwrap();
            let de = crate::numdiff::central(|e| reduced_potential(e, xi, &p).unwrap(), eta);
            let dx = crate::numdiff::central(|x| reduced_potential(eta, x, &p).unwrap(), xi);
            assert_relative_eq!(de, ed, max_relative = 1e-7, epsilon = 1e-9);
            assert_relative_eq!(dx, xd, max_relative = 1e-7, epsilon = 1e-9);
        }
    }

    #[test]
    fn reduced_potential_is_zeta_independent() {
        let params = Couplings::new(1.2, 0.7, 0.4);
        let (eta, xi) = (0.8, 1.9);
        let f0 = crate::conserved::potential(&from_plane(&PlanePoint::real(0.0, eta, xi)), &params)
            .unwrap();
        let f1 = crate::conserved::potential(&from_plane(&PlanePoint::real(2.5, eta, xi)), &params)
            .unwrap();
        assert!((f0 - f1).norm() < 1e-13);
    }

    #[test]
    fn slope_examples() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        // equal couplings: slope = -2 eta xi / (eta^2 - xi^2)
        assert_relative_eq!(
            characteristic_slope(1.0, 2.0, &p).unwrap(),
            4.0 / 3.0,
            max_relative = 1e-14
        );
        assert!(matches!(
            characteristic_slope(1.0, 1.0, &p),
            Err(ModelError::VerticalSlope(_))
        ));
    }

    #[test]
    fn slope_equals_flow_ratio() {
        let params = Couplings::new(1.0, 2.0, 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut tested = 0;
        while tested < 100 {
            let eta = rng.gen_range(-3.0..3.0f64);
            let xi = rng.gen_range(-3.0..3.0f64);
            let Ok((ed, xd)) = reduced_rhs(eta, xi, &params) else {
                continue;
            };
            if ed.abs() < 1e-3 {
                continue;
            }
            let Ok(slope) = characteristic_slope(eta, xi, &params) else {
                continue;
            };
            let ratio = xd / ed;
            assert_relative_eq!(slope, ratio, max_relative = 1e-12);
            tested += 1;
        }
    }

    #[test]
    fn slope_is_scale_invariant() {
        let params = Couplings::new(0.9, -0.3, 1.7);
        let (eta, xi) = (1.1, 0.4);
        let base = characteristic_slope(eta, xi, &params).unwrap();
        for s in [2.0, -3.0, 0.5] {
            let scaled = characteristic_slope(s * eta, s * xi, &params).unwrap();
            assert_relative_eq!(scaled, base, max_relative = 1e-12);
        }
    }

    #[test]
    fn conformal_examples() {
        assert_relative_eq!(
            conformal_factor_full(1.0, 1.0).unwrap(),
            1.0 / (2.0 * SQRT3),
            max_relative = 1e-14
        );
        assert!(matches!(
            conformal_factor_full(0.0, 1.0),
            Err(ModelError::ConformalSingular(_))
        ));
    }

    #[test]
    fn symplectic_relation_with_fitted_constant() {
        // grad F = kappa * phi_f * (-d_xi h_f, d_eta h_f) with one constant
        // kappa across points and components
        let p = Couplings::new(1.0, 1.0, 1.0);
        let h_f = |eta: f64, xi: f64| xi * xi * xi - 3.0 * xi * eta * eta;
        let _ = h_f;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut kappas = Vec::new();
        for _ in 0..100 {
            let (eta, xi) = sector_point(&mut rng);
            let Ok(phi) = conformal_factor_full(eta, xi) else {
                continue;
            };
            let (fe, fx) = reduced_rhs(eta, xi, &p).unwrap();
            let dh_deta = -6.0 * xi * eta;
            let dh_dxi = 3.0 * xi * xi - 3.0 * eta * eta;
            let k1 = fe / (-phi * dh_dxi);
            let k2 = fx / (phi * dh_deta);
            assert_relative_eq!(k1, k2, max_relative = 1e-10);
            kappas.push(k1);
        }
        let mean = kappas.iter().sum::<f64>() / kappas.len() as f64;
        assert_relative_eq!(mean, -SQRT3, max_relative = 1e-10);
        for k in kappas {
            assert_relative_eq!(k, mean, max_relative = 1e-9);
        }
    }

    #[test]
    fn liouville_plane_densities() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let invariant = |eta: f64, xi: f64| eta * (3.0 * xi * xi - eta * eta);
        let stated = |eta: f64, xi: f64| 1.0 / (SQRT3 * eta * (3.0 * xi * xi - eta * eta));
        let mut worst_stated: f64 = 0.0;
        for _ in 0..50 {
            let (eta, xi) = sector_point(&mut rng);
            let (res, scale) = liouville_residual(invariant, eta, xi, &p).unwrap();
            assert!(res.abs() <= 1e-6 * scale, "invariant density fails: {res}");
            let (res_s, scale_s) = liouville_residual(stated, eta, xi, &p).unwrap();
            worst_stated = worst_stated.max(res_s.abs() / scale_s);
        }
        assert!(
            worst_stated > 1e-2,
            "the reciprocal density unexpectedly satisfies the equation"
        );
    }

    #[test]
    fn liouville_constant_density_gives_laplacian() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let (res, _) = liouville_residual(|_, _| 1.0, 1.0, 2.0, &p).unwrap();
        let lap = laplacian_reduced_potential(1.0, 2.0, &p).unwrap();
        assert_relative_eq!(res, lap, max_relative = 1e-12);
        assert!(lap.abs() > 1e-3);
    }

    #[test]
    fn liouville_three_dimensional() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let invariant = |x: &[f64; 3]| (x[0] - x[1]) * (x[1] - x[2]) * (x[2] - x[0]);
        let stated = |x: &[f64; 3]| -1.0 / (SQRT6 * (x[0] - x[1]) * (x[1] - x[2]) * (x[2] - x[0]));
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let mut worst_stated: f64 = 0.0;
        let mut tested = 0;
        while tested < 50 {
            let x = [
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            ];
            let s = State3::real(x[0], x[1], x[2]);
            if s.min_separation() < 0.3 {
                continue;
            }
            let (res, scale) = liouville_residual_3d(invariant, &x, &p).unwrap();
            assert!(
                res.abs() <= 1e-6 * scale,
                "invariant 3d density fails: {res}"
            );
            let (res_s, scale_s) = liouville_residual_3d(stated, &x, &p).unwrap();
            worst_stated = worst_stated.max(res_s.abs() / scale_s);
            tested += 1;
        }
        assert!(worst_stated > 1e-2);
    }

    #[test]
    fn h_full_normalization_constant() {
        // h_full(from_plane(0, eta, xi)) = (1/sqrt6) (xi^3 - 3 xi eta^2) k0
        // with a single fitted k0
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut k0s = Vec::new();
        for _ in 0..50 {
            let eta = rng.gen_range(-3.0..3.0f64);
            let xi = rng.gen_range(0.3..3.0f64);
            let plane = xi * xi * xi - 3.0 * xi * eta * eta;
            if plane.abs() < 0.1 {
                continue;
            }
            let full = h_full(&from_plane(&PlanePoint::real(0.0, eta, xi)));
            k0s.push(full.re * SQRT6 / plane);
        }
        let mean = k0s.iter().sum::<f64>() / k0s.len() as f64;
        assert_relative_eq!(mean, SQRT6, max_relative = 1e-10);
        for k in k0s {
            assert_relative_eq!(k, mean, max_relative = 1e-9);
        }
    }

    proptest! {
        #[test]
        fn plane_round_trip(u in -5.0..5.0f64, v in -5.0..5.0f64, w in -5.0..5.0f64,
                            iu in -5.0..5.0f64, iv in -5.0..5.0f64, iw in -5.0..5.0f64) {
            let s = State3::new(C64::new(u, iu), C64::new(v, iv), C64::new(w, iw));
            let back = from_plane(&to_plane(&s));
            prop_assert!((back.u - s.u).norm() < 1e-14 * (1.0 + s.u.norm()));
            prop_assert!((back.v - s.v).norm() < 1e-14 * (1.0 + s.v.norm()));
            prop_assert!((back.w - s.w).norm() < 1e-14 * (1.0 + s.w.norm()));
        }

        #[test]
        fn plane_preserves_norm(u in -5.0..5.0f64, v in -5.0..5.0f64, w in -5.0..5.0f64) {
            let s = State3::real(u, v, w);
            let p = to_plane(&s);
            let n_state = (s.u.norm_sqr() + s.v.norm_sqr() + s.w.norm_sqr()).sqrt();
            let n_plane = (p.zeta.norm_sqr() + p.eta.norm_sqr() + p.xi.norm_sqr()).sqrt();
            prop_assert!((n_state - n_plane).abs() <= 1e-13 * (1.0 + n_state));
        }
    }
}
