//! Parameter machinery for the general first integral: the (p, q) coupling
//! parameters, the cubic denominator roots via the closed radical formulas,
//! the numerator quadratic roots, discriminants, special coupling loci, and
//! the coupling classifier.
//!
//! The radical formulas pick a cube-root branch by residual minimization over
//! the three candidates; when no branch reproduces the cubic to tolerance the
//! code falls back to a direct cubic solver and flags it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::ModelError;
use crate::model::{Couplings, State3};
use crate::{C64, SQRT3};

/// Relative tolerance used when comparing couplings for case detection.
const COUPLING_EQ_TOL: f64 = 1e-12;

/// Normalized residual above which a cube-root branch is rejected.
const BRANCH_RESIDUAL_TOL: f64 = 1e-10;

/// Normalized discriminant magnitude below which roots count as repeated.
const DEGENERATE_DELTA_TOL: f64 = 1e-12;

/// Coupling-case labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    FullSymmetric,
    SemiSymmetric,
    Noninteracting,
    Generic,
    Excluded,
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseLabel::FullSymmetric => "full_symmetric",
            CaseLabel::SemiSymmetric => "semi_symmetric",
            CaseLabel::Noninteracting => "noninteracting",
            CaseLabel::Generic => "generic",
            CaseLabel::Excluded => "excluded",
        };
        f.write_str(s)
    }
}

/// Roots of the shifted (depressed) cubic, as produced by the radical
/// formulas or the direct solver fallback.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CubicRoots {
    /// Roots in the shifted variable; the first is the distinguished root of
    /// the radical formula, the other two the conjugate-pair formulas.
    pub shifted: [C64; 3],
    /// Worst normalized cubic residual over the three roots.
    pub residual: f64,
    /// Cube-root branch index that was selected (0 when falling back).
    pub branch: usize,
    /// True when the direct solver replaced the radical formulas.
    pub fallback: bool,
}

/// Derived root data for one choice of couplings.
#[derive(Debug, Clone, Serialize)]
pub struct RootProfile {
    pub case_label: CaseLabel,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub lambda: Option<C64>,
    /// Cubic denominator roots in the unshifted slope variable theta.
    pub theta: Option<[C64; 3]>,
    /// Numerator quadratic roots in theta.
    pub num_roots: Option<[C64; 2]>,
    pub delta: Option<f64>,
    /// Worst normalized residual of the produced cubic roots.
    pub root_residual: Option<f64>,
    pub used_fallback: bool,
    /// True when the cubic roots are numerically repeated.
    pub degenerate: bool,
    pub mu: Option<f64>,
    pub k: Option<f64>,
    /// Special coupling loci this parameter point lies on.
    pub locus_hits: Vec<String>,
    pub note: Option<String>,
}

impl RootProfile {
    /// Real roots among the cubic denominator roots (in theta).
    pub fn real_thetas(&self) -> Vec<f64> {
        match &self.theta {
            Some(ts) => ts
                .iter()
                .filter(|t| t.im.abs() <= 1e-9 * (1.0 + t.re.abs()))
                .map(|t| t.re)
                .collect(),
            None => Vec::new(),
        }
    }
}

fn approx_eq(x: f64, y: f64) -> bool {
    (x - y).abs() <= COUPLING_EQ_TOL * (x.abs() + y.abs() + 1.0)
}

/// Shifted-cubic parameters `p = (a-b)/(sqrt(3) c)` and `q = (a+b)/(3c)`.
pub fn pq_of(params: &Couplings) -> Result<(f64, f64), ModelError> {
    if approx_eq(params.c, 0.0) {
        return Err(ModelError::ZeroCouplingC);
    }
    Ok((
        (params.a - params.b) / (SQRT3 * params.c),
        (params.a + params.b) / (3.0 * params.c),
    ))
}

/// Coefficients `(P, Q)` of the depressed cubic `x^3 + P x + Q`.
pub fn depressed_coeffs(p: f64, q: f64) -> (f64, f64) {
    let pp = -(p * p + 12.0 * q + 1.0) / 3.0;
    let qq = -2.0 * p * (p * p + 18.0 * q + 15.0) / 27.0;
    (pp, qq)
}

/// The radical parameter entering the closed root formulas.
pub fn lambda_of(p: f64, q: f64) -> C64 {
    let p2 = p * p;
    let inner =
        27.0 * p2 * p2 + 6.0 * p2 * (6.0 * (13.0 - 3.0 * q) * q + 37.0) - (1.0 + 12.0 * q).powi(3);
    -p * (p2 + 18.0 * q + 15.0) + Complex64::new(inner, 0.0).sqrt()
}

fn cubic_value(x: C64, pp: f64, qq: f64) -> C64 {
    x * x * x + pp * x + qq
}

fn normalized_residual(x: C64, pp: f64, qq: f64) -> f64 {
    let scale = x.norm().powi(3) + pp.abs() * x.norm() + qq.abs();
    cubic_value(x, pp, qq).norm() / scale.max(1.0)
}

/// Roots of the depressed cubic from the radical formulas, with the
/// cube-root branch chosen by residual minimization. Errors when the radical
/// parameter vanishes or no branch reproduces the cubic.
pub fn cubic_roots_formula(p: f64, q: f64) -> Result<CubicRoots, ModelError> {
    let lam = lambda_of(p, q);
    if lam.norm() < 1e-10 {
        return Err(ModelError::NoValidBranch(f64::INFINITY));
    }
    let (pp, qq) = depressed_coeffs(p, q);
    let a_coef = 1.0 + p * p + 12.0 * q;
    let zeta_p = C64::new(1.0, SQRT3);
    let zeta_m = C64::new(1.0, -SQRT3);
    let omega = C64::new(-0.5, SQRT3 / 2.0);
    let l_principal = lam.cbrt();

    let mut best: Option<(usize, [C64; 3], f64)> = None;
    for k in 0..3usize {
        let l3 = l_principal * omega.powu(k as u32);
        let l23 = l3 * l3;
        let th1 = -(l23 + a_coef) / (l3 * 3.0);
        let thp = (zeta_p * a_coef + zeta_m * l23) / (l3 * 6.0);
        let thm = (zeta_m * a_coef + zeta_p * l23) / (l3 * 6.0);
        let roots = [th1, thp, thm];
        let res = roots
            .iter()
            .map(|r| normalized_residual(*r, pp, qq))
            .fold(0.0f64, f64::max);
        if best.is_none_or(|(_, _, b)| res < b) {
            best = Some((k, roots, res));
        }
    }
    let (branch, shifted, residual) = best.unwrap();
    if residual > BRANCH_RESIDUAL_TOL {
        return Err(ModelError::NoValidBranch(residual));
    }
    Ok(CubicRoots {
        shifted,
        residual,
        branch,
        fallback: false,
    })
}

/// Roots of the depressed cubic; falls back to the direct solver when the
/// radical formulas fail, flagging the fallback.
pub fn cubic_roots(p: f64, q: f64) -> CubicRoots {
    match cubic_roots_formula(p, q) {
        Ok(r) => r,
        Err(_) => {
            let (pp, qq) = depressed_coeffs(p, q);
            let shifted = solve_depressed_cubic(pp, qq);
            let residual = shifted
                .iter()
                .map(|r| normalized_residual(*r, pp, qq))
                .fold(0.0f64, f64::max);
            CubicRoots {
                shifted,
                residual,
                branch: 0,
                fallback: true,
            }
        }
    }
}

/// Direct solver for `x^3 + P x + Q = 0` with real coefficients.
///
/// Uses the trigonometric form when all roots are real and a
/// cancellation-safe Cardano form otherwise.
pub fn solve_depressed_cubic(pp: f64, qq: f64) -> [C64; 3] {
    if pp == 0.0 && qq == 0.0 {
        return [C64::new(0.0, 0.0); 3];
    }
    let disc = -4.0 * pp.powi(3) - 27.0 * qq * qq;
    if disc > 0.0 {
        // three distinct real roots; disc > 0 forces pp < 0
        let m = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (pp * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let two_thirds_pi = 2.0 * std::f64::consts::PI / 3.0;
        [
            C64::new(m * phi.cos(), 0.0),
            C64::new(m * (phi - two_thirds_pi).cos(), 0.0),
            C64::new(m * (phi - 2.0 * two_thirds_pi).cos(), 0.0),
        ]
    } else {
        let s = (qq * qq / 4.0 + pp.powi(3) / 27.0).max(0.0).sqrt();
        let t = if qq >= 0.0 {
            -qq / 2.0 - s
        } else {
            -qq / 2.0 + s
        };
        let a = t.cbrt();
        let b = if a != 0.0 { -pp / (3.0 * a) } else { 0.0 };
        let real_root = a + b;
        let re = -real_root / 2.0;
        let im = SQRT3 / 2.0 * (a - b);
        [
            C64::new(real_root, 0.0),
            C64::new(re, im),
            C64::new(re, -im),
        ]
    }
}

/// Smallest max-norm matching distance between two root triples.
pub fn root_set_distance(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS
        .iter()
        .map(|perm| {
            (0..3)
                .map(|i| (a[i] - b[perm[i]]).norm())
                .fold(0.0f64, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Roots of the numerator quadratic, returned in the unshifted theta
/// variable.
pub fn numerator_roots(p: f64, q: f64) -> (C64, C64) {
    // shifted quadratic: x^2 - (p/3) x - (2p^2 + 9q + 3)/9
    let half_b = p / 6.0;
    let c_coef = -(2.0 * p * p + 9.0 * q + 3.0) / 9.0;
    let disc = Complex64::new(half_b * half_b - c_coef, 0.0).sqrt();
    let shift = p / 3.0;
    (half_b + disc + shift, half_b - disc + shift)
}

/// Discriminant of the depressed cubic in the stated closed form.
pub fn discriminant(p: f64, q: f64) -> f64 {
    let p2 = p * p;
    4.0 * (-27.0 * p2 * p2
        + 6.0 * p2 * (-37.0 + 6.0 * q * (-13.0 + 3.0 * q))
        + (1.0 + 12.0 * q).powi(3))
        / 27.0
}

/// The stated discriminant of the cubic discriminant viewed as a quadratic
/// polynomial in `p^2`, evaluated at `q`.
pub fn denp_value(q: f64) -> f64 {
    -16_777_216.0 * (1.0 + 3.0 * q).powi(2) * (7.0 + 3.0 * q).powi(6) * (1.0 + 12.0 * q).powi(3)
        / 177_147.0
}

/// One entry of the special-coupling-locus audit.
#[derive(Debug, Clone, Serialize)]
pub struct SpecialLocus {
    /// The stated special value of q.
    pub q_stated: f64,
    /// The stated linear constraint on the couplings.
    pub constraint: String,
    /// Value of the quadratic-in-`p^2` discriminant at the stated q.
    pub denp_at_q: f64,
    /// True when the stated q actually zeroes that discriminant.
    pub consistent: bool,
    /// Nearby audited zero when the stated value misses.
    pub audited_q: Option<f64>,
    pub audited_constraint: Option<String>,
    /// Stated value of mu for the equal-coupling restriction of the locus.
    pub mu_semi_stated: Option<f64>,
    /// Audited value of mu for the same restriction.
    pub mu_semi_audited: Option<f64>,
    pub note: Option<String>,
}

/// The stated special loci together with the audit of each entry.
pub fn special_loci() -> Vec<SpecialLocus> {
    let zero_tol = 1e-9;
    let mut out = Vec::new();

    let d1 = denp_value(-1.0 / 3.0);
    out.push(SpecialLocus {
        q_stated: -1.0 / 3.0,
        constraint: "a+b+c=0".into(),
        denp_at_q: d1,
        consistent: d1.abs() <= zero_tol,
        audited_q: None,
        audited_constraint: None,
        mu_semi_stated: Some(0.0),
        mu_semi_audited: Some(0.0),
        note: None,
    });

    let d2 = denp_value(-3.0 / 7.0);
    let d2_alt = denp_value(-7.0 / 3.0);
    out.push(SpecialLocus {
        q_stated: -3.0 / 7.0,
        constraint: "7(a+b)+9c=0".into(),
        denp_at_q: d2,
        consistent: d2.abs() <= zero_tol,
        audited_q: Some(-7.0 / 3.0),
        audited_constraint: Some("a+b+7c=0".into()),
        mu_semi_stated: Some(1.0 / 29.0),
        // a = b with 7(a+b) + 9c = 0 gives c = -14a/9 and mu = 4/58
        mu_semi_audited: Some(2.0 / 29.0),
        note: Some(format!(
            "stated q=-3/7 does not zero the discriminant factorization \
             (value {:.3e}); the factor vanishes at q=-7/3 (value {:.3e}); \
             equal couplings on the stated constraint give mu=2/29, not 1/29",
            d2, d2_alt
        )),
    });

    let d3 = denp_value(-1.0 / 12.0);
    out.push(SpecialLocus {
        q_stated: -1.0 / 12.0,
        constraint: "4(a+b)+c=0".into(),
        denp_at_q: d3,
        consistent: d3.abs() <= zero_tol,
        audited_q: None,
        audited_constraint: None,
        // equal couplings on this constraint give 8a + c = 0: mu undefined
        mu_semi_stated: None,
        mu_semi_audited: None,
        note: Some("equal couplings on this locus make mu undefined (8a+c=0)".into()),
    });

    out
}

/// True when the state is safely off the singular direction attached to a
/// real cubic root: its dot product with `(1 - sqrt(3) t, 1 + sqrt(3) t, -2)`
/// is nonzero beyond tolerance.
pub fn singular_direction_ok(state: &State3, theta_real: f64) -> bool {
    let n = [1.0 - SQRT3 * theta_real, 1.0 + SQRT3 * theta_real, -2.0];
    let dot = state.u * n[0] + state.v * n[1] + state.w * n[2];
    let state_norm = (state.u.norm_sqr() + state.v.norm_sqr() + state.w.norm_sqr()).sqrt();
    let n_norm = (n[0] * n[0] + n[1] * n[1] + 4.0).sqrt();
    dot.norm() > 1e-9 * (state_norm * n_norm).max(1e-300)
}

/// Classify couplings and assemble the full root profile.
pub fn classify(params: &Couplings) -> RootProfile {
    let (a, b, c) = (params.a, params.b, params.c);
    let a_eq_b = approx_eq(a, b);
    let c_zero = approx_eq(c, 0.0);
    let all_zero = approx_eq(a, 0.0) && approx_eq(b, 0.0) && c_zero;

    let mu = if a_eq_b && !approx_eq(8.0 * a + c, 0.0) {
        Some((2.0 * a + c) / (8.0 * a + c))
    } else {
        None
    };
    let k = if !a_eq_b {
        Some((a + b) / (SQRT3 * (a - b)))
    } else {
        None
    };

    let mut note = None;
    let case_label = if all_zero {
        note = Some("all couplings vanish; the flow is trivial".into());
        CaseLabel::Excluded
    } else if c_zero {
        if a_eq_b {
            note = Some(
                "mu = 1/4 on this locus; the semi-symmetric first integral is excluded".into(),
            );
        }
        CaseLabel::Noninteracting
    } else if a_eq_b && approx_eq(a, 0.0) {
        note = Some("two-body restriction (a = b = 0, mu = 1); treated as excluded".into());
        CaseLabel::Excluded
    } else if a_eq_b && approx_eq(a, c) {
        CaseLabel::FullSymmetric
    } else if a_eq_b {
        CaseLabel::SemiSymmetric
    } else {
        CaseLabel::Generic
    };

    let mut profile = RootProfile {
        case_label,
        p: None,
        q: None,
        lambda: None,
        theta: None,
        num_roots: None,
        delta: None,
        root_residual: None,
        used_fallback: false,
        degenerate: false,
        mu,
        k,
        locus_hits: Vec::new(),
        note,
    };

    if c_zero {
        return profile;
    }

    let (p, q) = pq_of(params).expect("c != 0 checked above");
    let lam = lambda_of(p, q);
    let roots = cubic_roots(p, q);
    let shift = p / 3.0;
    let theta = [
        roots.shifted[0] + shift,
        roots.shifted[1] + shift,
        roots.shifted[2] + shift,
    ];
    let (n_plus, n_minus) = numerator_roots(p, q);
    let delta = discriminant(p, q);
    let (pp, qq) = depressed_coeffs(p, q);
    let delta_scale = 4.0 * pp.abs().powi(3) + 27.0 * qq * qq;
    let degenerate = delta.abs() < DEGENERATE_DELTA_TOL * delta_scale.max(1.0);

    let locus_tol = 1e-9;
    let mut hits = Vec::new();
    if (q + 1.0 / 3.0).abs() <= locus_tol {
        hits.push("a+b+c=0 (q=-1/3)".to_string());
    }
    if (q + 1.0 / 12.0).abs() <= locus_tol {
        hits.push("4(a+b)+c=0 (q=-1/12)".to_string());
    }
    if (q + 3.0 / 7.0).abs() <= locus_tol {
        hits.push("7(a+b)+9c=0 (q=-3/7, stated special value)".to_string());
    }
    if (q + 7.0 / 3.0).abs() <= locus_tol {
        hits.push("a+b+7c=0 (q=-7/3, audited discriminant zero)".to_string());
    }

    profile.p = Some(p);
    profile.q = Some(q);
    profile.lambda = Some(lam);
    profile.theta = Some(theta);
    profile.num_roots = Some([n_plus, n_minus]);
    profile.delta = Some(delta);
    profile.root_residual = Some(roots.residual);
    profile.used_fallback = roots.fallback;
    profile.degenerate = degenerate;
    profile.locus_hits = hits;
    profile
}

/// Real-root count from the discriminant sign.
pub fn real_root_count_from_delta(delta: f64) -> u32 {
    if delta > 0.0 {
        3
    } else if delta < 0.0 {
        1
    } else {
        2
    }
}
