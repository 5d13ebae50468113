//! Conserved quantities of both models: the time-dependent Hamiltonians, the
//! logarithmic potential generating the auxiliary flow, and the
//! time-independent first integrals of every coupling case.
//!
//! Conservation of the log-form integrals is always checked through their
//! analytic gradients (logarithmic derivatives are rational), never through
//! values of multivalued logs, so the checks are branch-cut-free. Returned
//! log values use the principal branch and are display-only.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::ModelError;
use crate::model::{to_auxiliary, Couplings, ExtendedPoint, State3, DEFAULT_SEP_EPS};
use crate::roots::{classify, singular_direction_ok, CaseLabel, RootProfile};
use crate::{C64, SQRT3, SQRT6};

/// Linear first integral `u + v + w` of the auxiliary model.
pub fn h1(state: &State3) -> C64 {
    state.sum()
}

/// Quadratic time-dependent integral `u^2 + v^2 + w^2 - 2(a+b+c) tau`.
pub fn h2_aux(point: &ExtendedPoint, params: &Couplings) -> C64 {
    let s = &point.state;
    s.u * s.u + s.v * s.v + s.w * s.w - 2.0 * params.sum() * point.tau
}

/// Symmetric-product integral `uv + uw + vw + (a+b+c) tau`.
pub fn h3_aux(point: &ExtendedPoint, params: &Couplings) -> C64 {
    let s = &point.state;
    s.u * s.v + s.u * s.w + s.v * s.w + params.sum() * point.tau
}

/// Physical-model linear integral `exp(-i omega t)(x + y + z)`.
pub fn h1_physical(t: f64, state: &State3, params: &Couplings) -> C64 {
    (-C64::i() * params.omega * t).exp() * state.sum()
}

/// Physical-model quadratic quantity in its stated form,
/// `exp(-4 i omega t)(x^2+y^2+z^2)/4 - (a+b+c) t`.
///
/// This form is not conserved along the physical flow; see
/// [`h2_physical_via_transform`] for the combination that is.
pub fn h2_physical_stated(t: f64, state: &State3, params: &Couplings) -> C64 {
    let phase = (-C64::i() * 4.0 * params.omega * t).exp();
    let sq = state.u * state.u + state.v * state.v + state.w * state.w;
    0.25 * phase * sq - params.sum() * t
}

/// The quadratic integral pulled back through the time transformation:
/// `exp(-2 i omega t)(x^2+y^2+z^2) + (a+b+c) exp(-2 i omega t)/(i omega)`.
/// Conserved along the physical flow.
pub fn h2_physical_via_transform(
    t: f64,
    state: &State3,
    params: &Couplings,
) -> Result<C64, ModelError> {
    let point = to_auxiliary(t, state, params)?;
    Ok(h2_aux(&point, params))
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

/// Logarithmic potential `ln (v-w)^a (u-w)^b (u-v)^c` (principal branches).
pub fn potential(state: &State3, params: &Couplings) -> Result<C64, ModelError> {
    guard_separation(state)?;
    let (u, v, w) = (state.u, state.v, state.w);
    Ok(params.a * (v - w).ln() + params.b * (u - w).ln() + params.c * (u - v).ln())
}

/// Gradient of the potential; rational, hence branch-free, and identical to
/// the auxiliary right-hand side.
pub fn grad_potential(state: &State3, params: &Couplings) -> Result<[C64; 3], ModelError> {
    guard_separation(state)?;
    let (u, v, w) = (state.u, state.v, state.w);
    Ok([
        params.b / (u - w) + params.c / (u - v),
        params.a / (v - w) - params.c / (u - v),
        -params.a / (v - w) - params.b / (u - w),
    ])
}

/// Cubic first integral of the equal-couplings flow:
/// `(u+v-2w)[(u+v-2w)^2 - 9(u-v)^2] / (6 sqrt 6)`.
pub fn h_full(state: &State3) -> C64 {
    let s = state.u + state.v - 2.0 * state.w;
    let d = state.u - state.v;
    s * (s * s - 9.0 * d * d) / (6.0 * SQRT6)
}

/// Analytic gradient of [`h_full`].
pub fn grad_h_full(state: &State3) -> [C64; 3] {
    let s = state.u + state.v - 2.0 * state.w;
    let d = state.u - state.v;
    let k = 1.0 / (6.0 * SQRT6);
    [
        k * (3.0 * s * s - 9.0 * d * d - 18.0 * s * d),
        k * (3.0 * s * s - 9.0 * d * d + 18.0 * s * d),
        k * (-6.0 * s * s + 18.0 * d * d),
    ]
}

/// Case constant `mu = (2a+c)/(8a+c)` of the equal-pair couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuConstant {
    pub mu: f64,
}

impl MuConstant {
    pub fn new(mu: f64) -> Self {
        Self { mu }
    }

    /// The values 1/4 and 1 are singular for the closed-form integral.
    pub fn is_excluded(&self) -> bool {
        (self.mu - 0.25).abs() <= 1e-9 || (self.mu - 1.0).abs() <= 1e-9
    }

    /// Exponent `2 mu / (1 - mu)` of the leading factor.
    pub fn exponent(&self) -> f64 {
        2.0 * self.mu / (1.0 - self.mu)
    }

    /// Coefficient `3 / (4 mu - 1)` of the quadratic correction.
    pub fn gamma(&self) -> f64 {
        3.0 / (4.0 * self.mu - 1.0)
    }
}

/// Case constant `k = (a+b)/(sqrt3 (a-b))` of the non-interacting pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KConstant {
    pub k: f64,
}

impl KConstant {
    pub fn new(k: f64) -> Self {
        Self { k }
    }

    /// `4k^2 - 1`, the discriminant of the quadratic root pair.
    pub fn disc(&self) -> f64 {
        4.0 * self.k * self.k - 1.0
    }

    /// Principal square root of `4k^2 - 1` (imaginary when negative).
    pub fn sqrt_disc(&self) -> C64 {
        Complex64::new(self.disc(), 0.0).sqrt()
    }
}

/// `mu` from the couplings; requires `a = b` and `8a + c != 0`.
pub fn mu_of(params: &Couplings) -> Result<MuConstant, ModelError> {
    let eq = (params.a - params.b).abs() <= 1e-12 * (params.a.abs() + params.b.abs() + 1.0);
    let denom = 8.0 * params.a + params.c;
    if !eq || denom.abs() <= 1e-12 * (params.a.abs() * 8.0 + params.c.abs() + 1.0) {
        return Err(ModelError::NotSemiSymmetric {
            a: params.a,
            b: params.b,
            c: params.c,
        });
    }
    Ok(MuConstant::new((2.0 * params.a + params.c) / denom))
}

/// `k` from the couplings; requires `a != b`.
pub fn k_of(params: &Couplings) -> Result<KConstant, ModelError> {
    if (params.a - params.b).abs() <= 1e-12 * (params.a.abs() + params.b.abs() + 1.0) {
        return Err(ModelError::EqualCouplings(params.a));
    }
    Ok(KConstant::new(
        (params.a + params.b) / (SQRT3 * (params.a - params.b)),
    ))
}

/// Complex power with a real exponent. Integer exponents use exact integer
/// powers; fractional exponents take the real branch and require a positive
/// real base.
fn cpow_real_exponent(z: C64, e: f64) -> Result<C64, ModelError> {
    let n = e.round();
    if (e - n).abs() <= 1e-12 && n.abs() < 64.0 {
        return Ok(z.powi(n as i32));
    }
    if z.im.abs() <= 1e-12 * z.norm().max(1.0) && z.re > 0.0 {
        Ok(C64::new(z.re.powf(e), 0.0))
    } else {
        Err(ModelError::NegativeBase { base: z.re })
    }
}

/// First integral of the equal-pair case:
/// `(u+v-2w)^{2mu/(1-mu)} [(u+v-2w)^2 - 3/(4mu-1) (u-v)^2]`.
///
/// At `mu = 1/3` this reduces to `6 sqrt6` times [`h_full`].
pub fn h_semi(state: &State3, mu: &MuConstant) -> Result<C64, ModelError> {
    if mu.is_excluded() {
        return Err(ModelError::MuExcluded(mu.mu));
    }
    let s = state.u + state.v - 2.0 * state.w;
    let d = state.u - state.v;
    let lead = cpow_real_exponent(s, mu.exponent())?;
    Ok(lead * (s * s - mu.gamma() * d * d))
}

/// Analytic gradient of [`h_semi`].
pub fn grad_h_semi(state: &State3, mu: &MuConstant) -> Result<[C64; 3], ModelError> {
    if mu.is_excluded() {
        return Err(ModelError::MuExcluded(mu.mu));
    }
    let s = state.u + state.v - 2.0 * state.w;
    let d = state.u - state.v;
    let e = mu.exponent();
    let g = mu.gamma();
    let lead = cpow_real_exponent(s, e - 1.0)?;
    let core = e * (s * s - g * d * d);
    Ok([
        lead * (core + 2.0 * s * s - 2.0 * g * d * s),
        lead * (core + 2.0 * s * s + 2.0 * g * d * s),
        lead * (-2.0 * core - 4.0 * s * s),
    ])
}

/// First integral of the equal-coupling non-interacting pair (`a = b`,
/// `c = 0`): `(u+v-2w)(u-v)^3 / 4`.
pub fn h_noninteracting_equal(state: &State3) -> C64 {
    let s = state.u + state.v - 2.0 * state.w;
    let d = state.u - state.v;
    0.25 * s * d * d * d
}

/// Analytic gradient of [`h_noninteracting_equal`].
pub fn grad_h_noninteracting_equal(state: &State3) -> [C64; 3] {
    let s = state.u + state.v - 2.0 * state.w;
    let d = state.u - state.v;
    let d2 = d * d;
    [
        0.25 * (d * d2 + 3.0 * s * d2),
        0.25 * (d * d2 - 3.0 * s * d2),
        -0.5 * d * d2,
    ]
}

/// Slope variable `theta = (u+v-2w)/(sqrt3 (u-v))`.
fn theta_of(state: &State3) -> Result<C64, ModelError> {
    let d = state.u - state.v;
    if d.norm() < DEFAULT_SEP_EPS {
        return Err(ModelError::SeparationTooSmall {
            min_sep: d.norm(),
            threshold: DEFAULT_SEP_EPS,
        });
    }
    Ok((state.u + state.v - 2.0 * state.w) / (SQRT3 * d))
}

/// Gradient of the slope variable `theta`.
fn grad_theta(state: &State3) -> Result<[C64; 3], ModelError> {
    let d = state.u - state.v;
    if d.norm() < DEFAULT_SEP_EPS {
        return Err(ModelError::SeparationTooSmall {
            min_sep: d.norm(),
            threshold: DEFAULT_SEP_EPS,
        });
    }
    let s = state.u + state.v - 2.0 * state.w;
    let d2 = d * d;
    Ok([
        (d - s) / (SQRT3 * d2),
        (d + s) / (SQRT3 * d2),
        -2.0 / (SQRT3 * d),
    ])
}

/// First integral of the unequal-coupling non-interacting pair (`a != b`,
/// `c = 0`), a three-logarithm combination built on `k`.
pub fn h_noninteracting_general(state: &State3, kc: &KConstant) -> Result<C64, ModelError> {
    let disc = kc.disc();
    if disc.abs() <= 1e-12 * (4.0 * kc.k * kc.k + 1.0) {
        return Err(ModelError::DegenerateRoot(disc));
    }
    let r = kc.sqrt_disc();
    let k = kc.k;
    let theta = theta_of(state)?;
    let d = state.u - state.v;
    Ok(2.0 * r * (d / std::f64::consts::SQRT_2).ln()
        + (r - k) * (theta + 2.0 * k - r).ln()
        + (r + k) * (theta + 2.0 * k + r).ln())
}

/// Analytic (rational) gradient of [`h_noninteracting_general`].
pub fn grad_h_noninteracting_general(
    state: &State3,
    kc: &KConstant,
) -> Result<[C64; 3], ModelError> {
    let disc = kc.disc();
    if disc.abs() <= 1e-12 * (4.0 * kc.k * kc.k + 1.0) {
        return Err(ModelError::DegenerateRoot(disc));
    }
    let r = kc.sqrt_disc();
    let k = kc.k;
    let theta = theta_of(state)?;
    let gt = grad_theta(state)?;
    let d = state.u - state.v;
    let c1 = (r - k) / (theta + 2.0 * k - r);
    let c2 = (r + k) / (theta + 2.0 * k + r);
    let two_r_over_d = 2.0 * r / d;
    Ok([
        two_r_over_d + c1 * gt[0] + c2 * gt[0],
        -two_r_over_d + c1 * gt[1] + c2 * gt[1],
        c1 * gt[2] + c2 * gt[2],
    ])
}

fn general_coefficients(profile: &RootProfile) -> Result<(C64, [C64; 3], [C64; 3]), ModelError> {
    let theta = profile.theta.ok_or(ModelError::ZeroCouplingC)?;
    let num = profile.num_roots.ok_or(ModelError::ZeroCouplingC)?;
    if profile.degenerate {
        return Err(ModelError::DegenerateRoots(
            profile.delta.unwrap_or(0.0).abs(),
        ));
    }
    let [t1, t2, t3] = theta;
    let c_eta = (t1 - t2) * (t2 - t3) * (t3 - t1);
    let mut coeffs = [C64::new(0.0, 0.0); 3];
    for (i, ti) in theta.iter().enumerate() {
        let mut denom = C64::new(1.0, 0.0);
        for (j, tj) in theta.iter().enumerate() {
            if i != j {
                denom *= ti - tj;
            }
        }
        coeffs[i] = (ti - num[0]) * (ti - num[1]) * c_eta / denom;
    }
    Ok((c_eta, coeffs, theta))
}

fn guard_general_state(
    state: &State3,
    profile: &RootProfile,
    theta: C64,
    roots: &[C64; 3],
) -> Result<(), ModelError> {
    for tr in profile.real_thetas() {
        if !singular_direction_ok(state, tr) {
            return Err(ModelError::SingularDirection { theta_real: tr });
        }
    }
    for root in roots {
        if (theta - root).norm() <= 1e-9 * (1.0 + theta.norm()) {
            return Err(ModelError::SingularDirection {
                theta_real: root.re,
            });
        }
    }
    Ok(())
}

/// General time-independent first integral for `c != 0`: a four-term
/// logarithm combination over the cubic denominator roots, with coefficients
/// given by the partial-fraction residues.
pub fn h_general(state: &State3, profile: &RootProfile) -> Result<C64, ModelError> {
    let (c_eta, coeffs, roots) = general_coefficients(profile)?;
    let theta = theta_of(state)?;
    guard_general_state(state, profile, theta, &roots)?;
    let d = state.u - state.v;
    let mut value = c_eta * (d / std::f64::consts::SQRT_2).ln();
    for (coeff, root) in coeffs.iter().zip(roots.iter()) {
        value += coeff * (theta - root).ln();
    }
    Ok(value)
}

/// Analytic (rational) gradient of [`h_general`].
pub fn grad_h_general(state: &State3, profile: &RootProfile) -> Result<[C64; 3], ModelError> {
    let (eta_line, root_lines) = h_general_gradient_parts(state, profile)?;
    Ok([
        eta_line[0] + root_lines[0],
        eta_line[1] + root_lines[1],
        eta_line[2] + root_lines[2],
    ])
}

/// The two gradient pieces of the general integral: the log-eta line and the
/// summed root-log lines. The residue form adds them; the sign-flipped
/// variant (eta line minus root lines) is used by the audit of the stated
/// coefficient pattern.
pub fn h_general_gradient_parts(
    state: &State3,
    profile: &RootProfile,
) -> Result<([C64; 3], [C64; 3]), ModelError> {
    let (c_eta, coeffs, roots) = general_coefficients(profile)?;
    let theta = theta_of(state)?;
    guard_general_state(state, profile, theta, &roots)?;
    let gt = grad_theta(state)?;
    let d = state.u - state.v;
    let eta_line = [c_eta / d, -c_eta / d, C64::new(0.0, 0.0)];
    let mut root_lines = [C64::new(0.0, 0.0); 3];
    for (coeff, root) in coeffs.iter().zip(roots.iter()) {
        let factor = coeff / (theta - root);
        for i in 0..3 {
            root_lines[i] += factor * gt[i];
        }
    }
    Ok((eta_line, root_lines))
}

/// Directional-derivative residual `|grad . flow|` together with its scale
/// `sum_i |grad_i| |flow_i|`.
pub fn directional_residual(grad: &[C64; 3], flow: &State3) -> (f64, f64) {
    let f = flow.to_array();
    let mut dot = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    for i in 0..3 {
        dot += grad[i] * f[i];
        scale += grad[i].norm() * f[i].norm();
    }
    (dot.norm(), scale)
}

/// The time-independent first integral applicable to a choice of couplings.
#[derive(Debug, Clone)]
pub enum Fundamental {
    Full,
    Semi(MuConstant),
    NonintEqual,
    NonintGeneral(KConstant),
    General(Box<RootProfile>),
    None,
}

impl Fundamental {
    pub fn name(&self) -> &'static str {
        match self {
            Fundamental::Full => "h_full",
            Fundamental::Semi(_) => "h_semi",
            Fundamental::NonintEqual => "h_noninteracting_equal",
            Fundamental::NonintGeneral(_) => "h_noninteracting_general",
            Fundamental::General(_) => "h_general",
            Fundamental::None => "none",
        }
    }

    /// Analytic gradient at a state, when the integral applies there.
    pub fn gradient(&self, state: &State3) -> Option<[C64; 3]> {
        match self {
            Fundamental::Full => Some(grad_h_full(state)),
            Fundamental::Semi(mu) => grad_h_semi(state, mu).ok(),
            Fundamental::NonintEqual => Some(grad_h_noninteracting_equal(state)),
            Fundamental::NonintGeneral(k) => grad_h_noninteracting_general(state, k).ok(),
            Fundamental::General(profile) => grad_h_general(state, profile).ok(),
            Fundamental::None => None,
        }
    }
}

/// Select the fundamental first integral for the couplings via the
/// classifier.
pub fn select_fundamental(params: &Couplings) -> Fundamental {
    let profile = classify(params);
    match profile.case_label {
        CaseLabel::FullSymmetric => Fundamental::Full,
        CaseLabel::SemiSymmetric => match profile.mu {
            Some(mu) => {
                let mu = MuConstant::new(mu);
                if mu.is_excluded() {
                    Fundamental::None
                } else {
                    Fundamental::Semi(mu)
                }
            }
            None => Fundamental::None,
        },
        CaseLabel::Noninteracting => {
            if let Some(k) = profile.k {
                Fundamental::NonintGeneral(KConstant::new(k))
            } else {
                Fundamental::NonintEqual
            }
        }
        CaseLabel::Generic => {
            if profile.degenerate {
                Fundamental::None
            } else {
                Fundamental::General(Box::new(profile))
            }
        }
        CaseLabel::Excluded => Fundamental::None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::auxiliary_rhs;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(rng: &mut ChaCha8Rng) -> State3 {
        loop {
            let s = State3::real(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            );
            if s.min_separation() >= 0.1 {
                return s;
            }
        }
    }

    fn random_sector_state(rng: &mut ChaCha8Rng) -> State3 {
        loop {
            let mut xs = [
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            ];
            xs.sort_by(|x, y| y.partial_cmp(x).unwrap());
            let s = State3::real(xs[0], xs[1], xs[2]);
            if s.min_separation() >= 0.1 {
                return s;
            }
        }
    }

    #[test]
    fn h1_examples() {
        assert_eq!(h1(&State3::real(1.0, 2.0, 3.0)), c(6.0, 0.0));
        let s = State3::new(c(1.0, 1.0), c(0.0, 0.0), c(-1.0, -1.0));
        assert!(h1(&s).norm() < 1e-15);
    }

    #[test]
    fn h1_directional_derivative_vanishes() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let s = State3::real(2.0, 1.0, 0.0);
        let flow = auxiliary_rhs(&s, &p).unwrap();
        // the gradient of h1 is (1,1,1); conservation is the zero-sum law
        assert!(flow.sum().norm() < 1e-15);
    }

    #[test]
    fn h2_examples() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let e = ExtendedPoint::new(c(0.0, 0.0), State3::real(2.0, 1.0, 0.0));
        assert_eq!(h2_aux(&e, &p), c(5.0, 0.0));
        let e2 = ExtendedPoint::new(c(1.0, 0.0), State3::real(1.0, 0.0, -1.0));
        assert_eq!(h2_aux(&e2, &p), c(-4.0, 0.0));
    }

    #[test]
    fn h2_total_derivative_vanishes() {
        // d/dtau of h2 along the suspended flow: -2(a+b+c) + 2 sum(u u')
        let p = Couplings::new(1.3, -0.4, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = random_state(&mut rng);
            let flow = auxiliary_rhs(&s, &p).unwrap();
            let total = -2.0 * p.sum() + 2.0 * (s.u * flow.u + s.v * flow.v + s.w * flow.w).re;
            assert!(total.abs() < 1e-12, "residual {total}");
        }
    }

    #[test]
    fn h3_examples_and_relation() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let e = ExtendedPoint::new(c(0.0, 0.0), State3::real(1.0, 1.0, 1.0));
        assert_eq!(h3_aux(&e, &p), c(3.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let s = random_state(&mut rng);
            let tau = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let point = ExtendedPoint::new(tau, s);
            let lhs = h3_aux(&point, &p);
            let h1v = h1(&s);
            let rhs = (h1v * h1v - h2_aux(&point, &p)) / 2.0;
            let scale = lhs.norm() + rhs.norm() + 1.0;
            assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn h3_total_derivative_vanishes() {
        let p = Couplings::new(0.7, 1.9, -0.6);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let s = random_state(&mut rng);
            let flow = auxiliary_rhs(&s, &p).unwrap();
            let h1v = h1(&s);
            let grad_dot = flow.u * (h1v - s.u) + flow.v * (h1v - s.v) + flow.w * (h1v - s.w);
            let total = p.sum() + grad_dot.re;
            assert!(total.abs() < 1e-12, "residual {total}");
        }
    }

    #[test]
    fn h1_physical_conserved_h2_stated_not() {
        let p = Couplings::with_omega(1.0, 1.0, 1.0, 1.0);
        let s = State3::real(2.0, 1.0, 0.0);
        let t = 0.2;
        // analytic total derivative of h1_physical along the physical flow
        let flow = crate::model::physical_rhs(&s, &p).unwrap();
        let phase = (-C64::i() * p.omega * t).exp();
        let d_h1 = phase * (-C64::i() * p.omega * s.sum() + flow.sum());
        assert!(d_h1.norm() < 1e-13);

        // the stated quadratic combination has a visibly nonzero derivative
        let phase4 = (-C64::i() * 4.0 * p.omega * t).exp();
        let sq = s.u * s.u + s.v * s.v + s.w * s.w;
        let sxdot = s.u * flow.u + s.v * flow.v + s.w * flow.w;
        let d_h2_stated = -C64::i() * p.omega * phase4 * sq + 0.5 * phase4 * sxdot - p.sum();
        assert!(d_h2_stated.norm() > 0.1, "stated form looks conserved");
    }

    #[test]
    fn potential_example_and_gradient_identity() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let s = State3::real(2.0, 1.0, 0.0);
        let f = potential(&s, &p).unwrap();
        assert_relative_eq!(f.re, 2.0f64.ln(), max_relative = 1e-14);
        assert!(f.im.abs() < 1e-15);

        let g = grad_potential(&s, &p).unwrap();
        let rhs = auxiliary_rhs(&s, &p).unwrap().to_array();
        for i in 0..3 {
            assert!((g[i] - rhs[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn potential_translation_invariance_and_pde() {
        let p = Couplings::new(1.4, 0.3, -0.8);
        let s = State3::real(2.0, 0.5, -1.0);
        let shift = 0.7;
        let shifted = State3::real(2.0 + shift, 0.5 + shift, -1.0 + shift);
        let f0 = potential(&s, &p).unwrap();
        let f1 = potential(&shifted, &p).unwrap();
        assert!((f0 - f1).norm() < 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let s = random_state(&mut rng);
            let g = grad_potential(&s, &p).unwrap();
            let sum = g[0] + g[1] + g[2];
            assert!(sum.norm() < 1e-13, "pde residual {}", sum.norm());
        }
    }

    #[test]
    fn h_full_examples() {
        assert!(h_full(&State3::real(1.0, 1.0, 1.0)).norm() < 1e-15);
        let val = h_full(&State3::real(5.0, 1.0, 0.0));
        assert_relative_eq!(val.re, -18.0 * 6.0f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn h_full_is_first_integral() {
        let p = Couplings::new(1.0, 1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let s = random_state(&mut rng);
            let g = grad_h_full(&s);
            let flow = auxiliary_rhs(&s, &p).unwrap();
            let (res, scale) = directional_residual(&g, &flow);
            assert!(res <= 1e-10 * scale.max(1e-12), "res {res} scale {scale}");
        }
    }

    #[test]
    fn mu_examples() {
        assert_relative_eq!(
            mu_of(&Couplings::new(1.0, 1.0, 1.0)).unwrap().mu,
            1.0 / 3.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            mu_of(&Couplings::new(1.0, 1.0, 0.0)).unwrap().mu,
            0.25,
            max_relative = 1e-15
        );
        assert!(mu_of(&Couplings::new(1.0, 2.0, 0.0)).is_err());
    }

    #[test]
    fn h_semi_value_and_limit() {
        let mu = MuConstant::new(1.0 / 3.0);
        let s = State3::real(5.0, 1.0, 0.0);
        let val = h_semi(&s, &mu).unwrap();
        assert_relative_eq!(val.re, -648.0, max_relative = 1e-13);

        // mu = 1/3 reproduces 6 sqrt6 h_full everywhere
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let s = random_sector_state(&mut rng);
            let hs = h_semi(&s, &mu).unwrap();
            let hf = h_full(&s) * 6.0 * SQRT6;
            let scale = hs.norm() + hf.norm() + 1.0;
            assert!((hs - hf).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn h_semi_excluded_and_negative_base() {
        let s = State3::real(5.0, 1.0, 0.0);
        assert!(matches!(
            h_semi(&s, &MuConstant::new(0.25)),
            Err(ModelError::MuExcluded(_))
        ));
        // u+v-2w < 0 with a fractional exponent
        let bad = State3::real(0.0, 1.0, 5.0);
        let mu = MuConstant::new(0.4);
        assert!(matches!(
            h_semi(&bad, &mu),
            Err(ModelError::NegativeBase { .. })
        ));
    }

    #[test]
    fn h_semi_is_first_integral() {
        let p = Couplings::new(1.0, 1.0, 2.0);
        let mu = mu_of(&p).unwrap();
        assert_relative_eq!(mu.mu, 0.4, max_relative = 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let s = random_sector_state(&mut rng);
            let g = grad_h_semi(&s, &mu).unwrap();
            let flow = auxiliary_rhs(&s, &p).unwrap();
            let (res, scale) = directional_residual(&g, &flow);
            assert!(res <= 1e-9 * scale.max(1e-12), "res {res} scale {scale}");
        }
    }

    #[test]
    fn h_nonint_equal_examples() {
        let val = h_noninteracting_equal(&State3::real(5.0, 1.0, 0.0));
        assert_relative_eq!(val.re, 96.0, max_relative = 1e-15);
        assert!(h_noninteracting_equal(&State3::real(2.0, 2.0, 0.0)).norm() < 1e-15);

        let p = Couplings::new(1.0, 1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let s = random_state(&mut rng);
            let g = grad_h_noninteracting_equal(&s);
            let flow = auxiliary_rhs(&s, &p).unwrap();
            let (res, scale) = directional_residual(&g, &flow);
            assert!(res <= 1e-10 * scale.max(1e-12));
        }
    }

    #[test]
    fn k_examples() {
        let k = k_of(&Couplings::new(1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(k.k, 1.0 / SQRT3, max_relative = 1e-15);
        assert_relative_eq!(k.sqrt_disc().re, 1.0 / SQRT3, max_relative = 1e-12);
        assert!(k_of(&Couplings::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn k_degenerate_locus() {
        // 4k^2 - 1 = (a^2 + 14ab + b^2) / (3 (a-b)^2) vanishes at
        // b/a = -7 + 4 sqrt3
        let b = -7.0 + 4.0 * SQRT3;
        let k = k_of(&Couplings::new(1.0, b, 0.0)).unwrap();
        assert!(k.disc().abs() < 1e-12);
        let s = State3::real(5.0, 1.0, 0.0);
        assert!(matches!(
            h_noninteracting_general(&s, &k),
            Err(ModelError::DegenerateRoot(_))
        ));
    }

    #[test]
    fn h_nonint_general_is_first_integral() {
        let p = Couplings::new(1.0, 0.0, 0.0);
        let k = k_of(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let mut tested = 0;
        while tested < 50 {
            let s = random_sector_state(&mut rng);
            let g = match grad_h_noninteracting_general(&s, &k) {
                Ok(g) => g,
                Err(_) => continue,
            };
            let flow = auxiliary_rhs(&s, &p).unwrap();
            let (res, scale) = directional_residual(&g, &flow);
            assert!(res <= 1e-9 * scale.max(1e-12), "res {res} scale {scale}");
            tested += 1;
        }
    }

    #[test]
    fn h_general_is_first_integral_full_and_generic() {
        for params in [Couplings::new(1.0, 1.0, 1.0), Couplings::new(1.0, 2.0, 3.0)] {
            let profile = classify(&params);
            let mut rng = ChaCha8Rng::seed_from_u64(53);
            let mut tested = 0;
            while tested < 50 {
                let s = random_state(&mut rng);
                let g = match grad_h_general(&s, &profile) {
                    Ok(g) => g,
                    Err(_) => continue,
                };
                let flow = auxiliary_rhs(&s, &params).unwrap();
                let (res, scale) = directional_residual(&g, &flow);
                assert!(
                    res <= 1e-8 * scale.max(1e-12),
                    "res {res} scale {scale} at {s:?} for {params:?}"
                );
                tested += 1;
            }
        }
    }

    #[test]
    fn h_general_stated_sign_pattern_fails() {
        // flipping the root-log lines (the stated coefficient pattern)
        // destroys conservation
        let params = Couplings::new(1.0, 2.0, 3.0);
        let profile = classify(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let mut worst: f64 = 0.0;
        let mut tested = 0;
        while tested < 20 {
            let s = random_state(&mut rng);
            let (eta_line, root_lines) = match h_general_gradient_parts(&s, &profile) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let stated = [
                eta_line[0] - root_lines[0],
                eta_line[1] - root_lines[1],
                eta_line[2] - root_lines[2],
            ];
            let flow = auxiliary_rhs(&s, &params).unwrap();
            let (res, scale) = directional_residual(&stated, &flow);
            worst = worst.max(res / scale.max(1e-12));
            tested += 1;
        }
        assert!(
            worst > 1e-2,
            "stated pattern unexpectedly conserved: {worst}"
        );
    }

    #[test]
    fn h_general_refuses_singular_direction() {
        let params = Couplings::new(1.0, 1.0, 1.0);
        let profile = classify(&params);
        // theta_real = 0 makes states with u + v - 2w = 0 singular
        let s = State3::real(2.0, 0.0, 1.0);
        assert!(matches!(
            h_general(&s, &profile),
            Err(ModelError::SingularDirection { .. })
        ));
    }

    #[test]
    fn select_fundamental_by_case() {
        assert!(matches!(
            select_fundamental(&Couplings::new(1.0, 1.0, 1.0)),
            Fundamental::Full
        ));
        assert!(matches!(
            select_fundamental(&Couplings::new(1.0, 1.0, 2.0)),
            Fundamental::Semi(_)
        ));
        assert!(matches!(
            select_fundamental(&Couplings::new(1.0, 1.0, 0.0)),
            Fundamental::NonintEqual
        ));
        assert!(matches!(
            select_fundamental(&Couplings::new(1.0, 0.0, 0.0)),
            Fundamental::NonintGeneral(_)
        ));
        assert!(matches!(
            select_fundamental(&Couplings::new(1.0, 2.0, 3.0)),
            Fundamental::General(_)
        ));
        assert!(matches!(
            select_fundamental(&Couplings::new(0.0, 0.0, 1.0)),
            Fundamental::None
        ));
    }
}
