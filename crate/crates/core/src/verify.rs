//! The verification suites: deterministic sampling plus one structured
//! result per audited identity.
//!
//! Identities are always evaluated as stated first. A failing identity is
//! retried against a fixed list of candidate corrections (index permutation,
//! sign flip, constant rescale); the outcome is reported in the result note
//! rather than silently substituted. Proportionality constants are fitted
//! globally by least squares across all samples, so a non-constant factor
//! shows up as a large residual instead of a false pass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conserved::{
    self, directional_residual, grad_h_full, grad_h_general, grad_h_noninteracting_equal,
    grad_h_semi, grad_potential, h1, h2_aux, h2_physical_stated, h3_aux, h_full,
    h_general_gradient_parts, h_semi, mu_of, select_fundamental, Fundamental, MuConstant,
};
use crate::integrator::{self, IntegrationConfig, ModelKind};
use crate::model::{auxiliary_rhs, Couplings, ExtendedPoint, State3};
use crate::poisson::{
    compatibility_residual, constant_tensor, cross_tensor, extended_hamilton_residual,
    extended_jacobi_residual, extended_lambda, hamilton_residual, jacobi_residual, p_f1, p_f2,
    p_f2_swapped, p_n1, p_n2, p_s1, p_s2, symmetry_commutator_residual, CheckResult, ScalarField3,
    SkewTensor3, TensorField3,
};
use crate::reduction::{
    characteristic_slope, conformal_factor_full, from_plane, liouville_residual,
    liouville_residual_3d, plane_matrix, reduced_rhs, to_plane, PlanePoint,
};
use crate::roots::{
    classify, cubic_roots, cubic_roots_formula, denp_value, depressed_coeffs, discriminant,
    lambda_of, numerator_roots, pq_of, root_set_distance, solve_depressed_cubic, special_loci,
    CaseLabel,
};
use crate::{C64, SQRT3, SQRT6};

/// Which checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Tensors,
    Extended,
    Conserved,
    Reduction,
    Roots,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "tensors" => Ok(Suite::Tensors),
            "extended" => Ok(Suite::Extended),
            "conserved" => Ok(Suite::Conserved),
            "reduction" => Ok(Suite::Reduction),
            "roots" => Ok(Suite::Roots),
            other => Err(format!(
                "unknown suite '{other}' (expected all|tensors|extended|conserved|reduction|roots)"
            )),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Suite::All => "all",
            Suite::Tensors => "tensors",
            Suite::Extended => "extended",
            Suite::Conserved => "conserved",
            Suite::Reduction => "reduction",
            Suite::Roots => "roots",
        };
        f.write_str(s)
    }
}

/// Verification configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    pub box_radius: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            samples: 100,
            seed: 0,
            box_radius: 5.0,
        }
    }
}

/// Full verification report.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suite: Suite,
    pub couplings: Couplings,
    pub samples: usize,
    pub seed: u64,
    pub box_radius: f64,
    pub checks: Vec<CheckResult>,
    /// Every check passed outright.
    pub all_pass: bool,
    /// Every check passed or failed in a documented (noted) way.
    pub all_acceptable: bool,
}

struct Sampler {
    rng: ChaCha8Rng,
    box_radius: f64,
}

const MIN_SAMPLE_SEP: f64 = 0.1;

impl Sampler {
    fn new(seed: u64, box_radius: f64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            box_radius,
        }
    }

    fn uniform(&mut self) -> f64 {
        self.rng.gen_range(-self.box_radius..self.box_radius)
    }

    fn real_state(&mut self) -> [f64; 3] {
        loop {
            let x = [self.uniform(), self.uniform(), self.uniform()];
            if State3::real(x[0], x[1], x[2]).min_separation() >= MIN_SAMPLE_SEP {
                return x;
            }
        }
    }

    /// State ordered `u > v > w`, the sector with all log arguments positive.
    fn ordered_state(&mut self) -> [f64; 3] {
        loop {
            let mut x = [self.uniform(), self.uniform(), self.uniform()];
            x.sort_by(|p, q| q.partial_cmp(p).unwrap());
            if State3::real(x[0], x[1], x[2]).min_separation() >= MIN_SAMPLE_SEP {
                return x;
            }
        }
    }

    fn state3(&mut self) -> State3 {
        let x = self.real_state();
        State3::real(x[0], x[1], x[2])
    }

    fn ordered_state3(&mut self) -> State3 {
        let x = self.ordered_state();
        State3::real(x[0], x[1], x[2])
    }

    fn tau(&mut self) -> f64 {
        self.rng.gen_range(-2.0..2.0)
    }

    fn plane_sector(&mut self) -> (f64, f64) {
        loop {
            let eta = self.rng.gen_range(0.2..3.0);
            let xi = self.rng.gen_range(0.2..3.0);
            if SQRT3 * xi - eta > 0.2 {
                return (eta, xi);
            }
        }
    }

    fn pq(&mut self) -> (f64, f64) {
        (self.rng.gen_range(-2.0..2.0), self.rng.gen_range(-2.0..2.0))
    }
}

/// Tracks the worst residual/scale ratio over a sweep of samples.
#[derive(Default)]
struct Acc {
    max_residual: f64,
    scale: f64,
    worst_ratio: f64,
    n: usize,
}

impl Acc {
    fn push(&mut self, residual: f64, scale: f64) {
        self.n += 1;
        let ratio = residual / scale.max(1e-300);
        if self.n == 1 || ratio > self.worst_ratio {
            self.worst_ratio = ratio;
            self.max_residual = residual;
            self.scale = scale;
        }
    }

    fn check(self, name: &str, tol: f64) -> CheckResult {
        CheckResult::new(name, self.n, self.max_residual, self.scale, tol)
    }
}

// ---------------------------------------------------------------------------
// conserved suite
// ---------------------------------------------------------------------------

fn check_gradient_identity(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    let mut acc = Acc::default();
    for _ in 0..n {
        let state = s.state3();
        let grad = grad_potential(&state, params).expect("separation enforced");
        let flow = auxiliary_rhs(&state, params).expect("separation enforced");
        let f = flow.to_array();
        let mut res = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..3 {
            res = res.max((grad[i] - f[i]).norm());
            scale = scale.max(grad[i].norm() + f[i].norm());
        }
        acc.push(res, scale.max(1.0));
    }
    acc.check("gradient-identity", 1e-12)
}

fn check_potential_pde(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    let mut acc = Acc::default();
    for _ in 0..n {
        let state = s.state3();
        let grad = grad_potential(&state, params).expect("separation enforced");
        let sum = grad[0] + grad[1] + grad[2];
        acc.push(sum.norm(), 1.0);
    }
    acc.check("potential-pde-sum", 1e-13)
}

fn check_conservation_h1(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    let mut acc = Acc::default();
    for _ in 0..n {
        let state = s.state3();
        let flow = auxiliary_rhs(&state, params).expect("separation enforced");
        let f = flow.to_array();
        let scale: f64 = f.iter().map(|x| x.norm()).sum();
        acc.push(flow.sum().norm(), scale.max(1.0));
    }
    acc.check("conservation-h1", 1e-10)
}

fn check_conservation_h2(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    let mut acc = Acc::default();
    for _ in 0..n {
        let state = s.state3();
        let flow = auxiliary_rhs(&state, params).expect("separation enforced");
        let dot = state.u * flow.u + state.v * flow.v + state.w * flow.w;
        let total = -2.0 * params.sum() + 2.0 * dot;
        let scale = 2.0 * params.sum().abs() + 2.0 * dot.norm();
        acc.push(total.norm(), scale.max(1.0));
    }
    acc.check("conservation-h2", 1e-10)
}

fn check_conservation_h3(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    let mut acc = Acc::default();
    for _ in 0..n {
        let state = s.state3();
        let flow = auxiliary_rhs(&state, params).expect("separation enforced");
        let h1v = h1(&state);
        let grad_dot =
            flow.u * (h1v - state.u) + flow.v * (h1v - state.v) + flow.w * (h1v - state.w);
        let total = params.sum() + grad_dot;
        let scale = params.sum().abs() + grad_dot.norm();
        acc.push(total.norm(), scale.max(1.0));
    }
    acc.check("conservation-h3", 1e-10)
}

fn check_relation_h3(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    let mut acc = Acc::default();
    for _ in 0..n {
        let state = s.state3();
        let tau = C64::new(s.tau(), 0.0);
        let point = ExtendedPoint::new(tau, state);
        let h1v = h1(&state);
        let lhs = h3_aux(&point, params);
        let rhs = (h1v * h1v - h2_aux(&point, params)) / 2.0;
        let scale = lhs.norm() + h1v.norm_sqr() + h2_aux(&point, params).norm();
        acc.push((lhs - rhs).norm(), scale.max(1.0));
    }
    acc.check("relation-h3-h1-h2", 1e-12)
}

fn check_relation_coefficient(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    if params.sum().abs() < 1e-12 {
        return CheckResult::skipped(
            "relation-elimination-coefficient",
            "coefficient undetermined when a+b+c = 0",
        );
    }
    // fit kappa in (u-v)^2 + (v-w)^2 + (w-u)^2 = 2 H2 - 2 H3 + kappa (a+b+c) tau
    let mut pts = Vec::with_capacity(n);
    let mut num = 0.0;
    let mut den = 0.0;
    for _ in 0..n {
        let state = s.state3();
        let mut tau = s.tau();
        if tau.abs() < 0.2 {
            tau += 0.5;
        }
        let point = ExtendedPoint::new(C64::new(tau, 0.0), state);
        let lhs = (state.u - state.v) * (state.u - state.v)
            + (state.v - state.w) * (state.v - state.w)
            + (state.w - state.u) * (state.w - state.u);
        let base = 2.0 * h2_aux(&point, params) - 2.0 * h3_aux(&point, params);
        let st = params.sum() * tau;
        num += ((lhs - base) * st).re;
        den += st * st;
        pts.push((lhs, base, st));
    }
    let kappa = num / den;
    let mut acc = Acc::default();
    for (lhs, base, st) in pts {
        let rhs = base + kappa * st;
        let scale = lhs.norm() + base.norm() + (kappa * st).abs();
        acc.push((lhs - rhs).norm(), scale.max(1.0));
    }
    acc.check("relation-elimination-coefficient", 1e-10)
        .with_calibration(kappa)
        .with_note(format!(
            "stated coefficient 4; measured {kappa:.12} (direct expansion gives 6)"
        ))
}

fn check_h2_stated_vs_transformed(params: &Couplings) -> CheckResult {
    let name = "h2-stated-vs-transformed";
    if params.omega <= 0.0 {
        return CheckResult::skipped(name, "requires omega > 0");
    }
    let config = IntegrationConfig::new(0.0, 0.4).with_tolerances(1e-11, 1e-13);
    let initial = State3::real(2.0, 1.0, 0.0);
    let traj = match integrator::integrate(ModelKind::Physical, &initial, params, &config) {
        Ok(t) => t,
        Err(e) => return CheckResult::skipped(name, format!("integration failed: {e}")),
    };
    let first = traj.samples.first().expect("nonempty");
    let stated0 = h2_physical_stated(first.t, &first.state, params);
    let mut transformed_drift = 0.0f64;
    let mut stated_drift = 0.0f64;
    for sample in &traj.samples {
        transformed_drift = transformed_drift.max((sample.h2 - first.h2).norm());
        let stated = h2_physical_stated(sample.t, &sample.state, params);
        stated_drift = stated_drift.max((stated - stated0).norm());
    }
    let scale = first.h2.norm().max(1.0);
    CheckResult::new(name, traj.samples.len(), transformed_drift, scale, 1e-9).with_note(format!(
        "stated quadratic form drifts by {stated_drift:.3e} over the run; \
         the transform-composed combination is the conserved one"
    ))
}

fn check_fundamental(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    let name = "fundamental-first-integral";
    let fundamental = select_fundamental(params);
    if matches!(fundamental, Fundamental::None) {
        return CheckResult::skipped(name, "no fundamental integral for these couplings");
    }
    let mut acc = Acc::default();
    let mut tries = 0;
    while acc.n < n && tries < 200 * n {
        tries += 1;
        let state = match fundamental {
            Fundamental::Semi(_) | Fundamental::NonintGeneral(_) => s.ordered_state3(),
            _ => s.state3(),
        };
        let Some(grad) = fundamental.gradient(&state) else {
            continue;
        };
        let flow = auxiliary_rhs(&state, params).expect("separation enforced");
        let (res, scale) = directional_residual(&grad, &flow);
        acc.push(res, scale.max(1e-12));
    }
    if acc.n == 0 {
        return CheckResult::skipped(name, "no admissible states found");
    }
    acc.check(name, 1e-8)
        .with_note(format!("integral: {}", fundamental.name()))
}

fn check_semi_limit(s: &mut Sampler, n: usize) -> CheckResult {
    let mu = MuConstant::new(1.0 / 3.0);
    let mut acc = Acc::default();
    for _ in 0..n {
        let state = s.ordered_state3();
        let hs = h_semi(&state, &mu).expect("positive base in sector");
        let hf = h_full(&state) * 6.0 * SQRT6;
        acc.push((hs - hf).norm(), (hs.norm() + hf.norm()).max(1.0));
    }
    acc.check("semi-limit-reduces-to-full", 1e-12)
}

fn check_gradient_dependence(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    let name = "gradient-dependence-det";
    let profile = classify(params);
    if profile.case_label != CaseLabel::SemiSymmetric {
        return CheckResult::skipped(name, "defined for the equal-pair case with c != 0");
    }
    let mu = match mu_of(params) {
        Ok(mu) if !mu.is_excluded() => mu,
        _ => return CheckResult::skipped(name, "mu undefined or excluded"),
    };
    let mut acc = Acc::default();
    let mut tries = 0;
    while acc.n < n && tries < 200 * n {
        tries += 1;
        let state = s.ordered_state3();
        let Ok(g1) = grad_h_general(&state, &profile) else {
            continue;
        };
        let Ok(g2) = grad_h_semi(&state, &mu) else {
            continue;
        };
        let g3 = [C64::new(1.0, 0.0); 3];
        // determinant of the three gradients via cofactor expansion
        let det = g1[0] * (g2[1] * g3[2] - g2[2] * g3[1]) - g1[1] * (g2[0] * g3[2] - g2[2] * g3[0])
            + g1[2] * (g2[0] * g3[1] - g2[1] * g3[0]);
        let scale = g1[0].norm() * (g2[1].norm() + g2[2].norm())
            + g1[1].norm() * (g2[0].norm() + g2[2].norm())
            + g1[2].norm() * (g2[0].norm() + g2[1].norm());
        acc.push(det.norm(), scale.max(1e-12));
    }
    if acc.n == 0 {
        return CheckResult::skipped(name, "no admissible states found");
    }
    acc.check(name, 1e-8)
}

fn check_h_general_sign_audit(params: &Couplings, s: &mut Sampler, n: usize) -> CheckResult {
    let name = "h-general-sign-audit";
    let profile = classify(params);
    if profile.theta.is_none() {
        return CheckResult::skipped(name, "requires c != 0");
    }
    if profile.degenerate {
        return CheckResult::skipped(name, "cubic roots are degenerate");
    }
    let mut residue = Acc::default();
    let mut stated_worst: f64 = 0.0;
    let mut tries = 0;
    while residue.n < n && tries < 200 * n {
        tries += 1;
        let state = s.state3();
        let Ok((eta_line, root_lines)) = h_general_gradient_parts(&state, &profile) else {
            continue;
        };
        let flow = auxiliary_rhs(&state, params).expect("separation enforced");
        let residue_grad = [
            eta_line[0] + root_lines[0],
            eta_line[1] + root_lines[1],
            eta_line[2] + root_lines[2],
        ];
        let stated_grad = [
            eta_line[0] - root_lines[0],
            eta_line[1] - root_lines[1],
            eta_line[2] - root_lines[2],
        ];
        let (r, sc) = directional_residual(&residue_grad, &flow);
        residue.push(r, sc.max(1e-12));
        let (rs, scs) = directional_residual(&stated_grad, &flow);
        stated_worst = stated_worst.max(rs / scs.max(1e-300));
    }
    if residue.n == 0 {
        return CheckResult::skipped(name, "no admissible states found");
    }
    residue.check(name, 1e-8).with_note(format!(
        "stated sign pattern of the root-log lines is not conserved \
         (worst relative derivative {stated_worst:.3e}); the partial-fraction \
         residue signs are used"
    ))
}

fn conserved_suite(params: &Couplings, s: &mut Sampler, n: usize, out: &mut Vec<CheckResult>) {
    out.push(check_gradient_identity(params, s, n.max(200)));
    out.push(check_potential_pde(params, s, n));
    out.push(check_conservation_h1(params, s, n));
    out.push(check_conservation_h2(params, s, n));
    out.push(check_conservation_h3(params, s, n));
    out.push(check_relation_h3(params, s, n));
    out.push(check_relation_coefficient(params, s, n));
    out.push(check_h2_stated_vs_transformed(params));
    out.push(check_fundamental(params, s, n));
    out.push(check_semi_limit(s, n));
    out.push(check_gradient_dependence(params, s, n));
    out.push(check_h_general_sign_audit(params, s, n));
}

// ---------------------------------------------------------------------------
// tensors suite
// ---------------------------------------------------------------------------

fn h_full_field() -> ScalarField3 {
    ScalarField3::new("H_f", |x| h_full(&State3::real(x[0], x[1], x[2])).re).with_grad(|x| {
        let g = grad_h_full(&State3::real(x[0], x[1], x[2]));
        [g[0].re, g[1].re, g[2].re]
    })
}

fn h1_field() -> ScalarField3 {
    ScalarField3::new("H1", |x| x[0] + x[1] + x[2]).with_grad(|_| [1.0, 1.0, 1.0])
}

fn h_n_field() -> ScalarField3 {
    ScalarField3::new("H_n", |x| {
        conserved::h_noninteracting_equal(&State3::real(x[0], x[1], x[2])).re
    })
    .with_grad(|x| {
        let g = grad_h_noninteracting_equal(&State3::real(x[0], x[1], x[2]));
        [g[0].re, g[1].re, g[2].re]
    })
}

fn h_s_field(mu: MuConstant) -> ScalarField3 {
    ScalarField3::new("H_s", move |x| {
        h_semi(&State3::real(x[0], x[1], x[2]), &mu)
            .map(|v| v.re)
            .unwrap_or(f64::NAN)
    })
    .with_grad(
        move |x| match grad_h_semi(&State3::real(x[0], x[1], x[2]), &mu) {
            Ok(g) => [g[0].re, g[1].re, g[2].re],
            Err(_) => [f64::NAN; 3],
        },
    )
}

fn jacobi_sweep(
    name: &str,
    tensor: &TensorField3,
    s: &mut Sampler,
    n: usize,
    ordered: bool,
) -> CheckResult {
    let mut acc = Acc::default();
    let mut tries = 0;
    while acc.n < n && tries < 200 * n {
        tries += 1;
        let x = if ordered {
            s.ordered_state()
        } else {
            s.real_state()
        };
        if !tensor.admissible(&x) {
            continue;
        }
        match jacobi_residual(tensor, &x) {
            Ok((res, scale)) => acc.push(res.abs(), scale.max(1e-12)),
            Err(_) => continue,
        }
    }
    if acc.n == 0 {
        return CheckResult::skipped(name, "no admissible states found");
    }
    acc.check(name, 1e-6)
}

struct HamiltonSweep {
    kappa: f64,
    kappa_std: f64,
    result: Acc,
}

fn hamilton_sweep(
    tensor: &TensorField3,
    h: &ScalarField3,
    params: &Couplings,
    s: &mut Sampler,
    n: usize,
    ordered: bool,
) -> Option<HamiltonSweep> {
    let mut samples = Vec::new();
    let mut tries = 0;
    while samples.len() < n && tries < 200 * n {
        tries += 1;
        let x = if ordered {
            s.ordered_state()
        } else {
            s.real_state()
        };
        match hamilton_residual(tensor, h, &x, params) {
            Ok(sample) => samples.push(sample),
            Err(_) => continue,
        }
    }
    if samples.is_empty() {
        return None;
    }
    // global least-squares constant across all samples
    let mut num = 0.0;
    let mut den = 0.0;
    for sm in &samples {
        for i in 0..3 {
            num += sm.product[i] * sm.flow[i];
            den += sm.flow[i] * sm.flow[i];
        }
    }
    let kappa = if den > 0.0 { num / den } else { 0.0 };
    let mut acc = Acc::default();
    let mut mean = 0.0;
    for sm in &samples {
        mean += sm.kappa;
        let mut res = 0.0f64;
        let mut pn = 0.0f64;
        let mut un = 0.0f64;
        for i in 0..3 {
            res += (sm.product[i] - kappa * sm.flow[i]).powi(2);
            pn += sm.product[i] * sm.product[i];
            un += sm.flow[i] * sm.flow[i];
        }
        acc.push(res.sqrt(), (pn.sqrt() + kappa.abs() * un.sqrt()).max(1e-12));
    }
    mean /= samples.len() as f64;
    let var = samples
        .iter()
        .map(|sm| (sm.kappa - mean).powi(2))
        .sum::<f64>()
        / samples.len() as f64;
    Some(HamiltonSweep {
        kappa,
        kappa_std: var.sqrt(),
        result: acc,
    })
}

fn hamilton_check(
    name: &str,
    tensor: &TensorField3,
    h: &ScalarField3,
    params: &Couplings,
    s: &mut Sampler,
    n: usize,
    ordered: bool,
    tol: f64,
) -> CheckResult {
    match hamilton_sweep(tensor, h, params, s, n, ordered) {
        Some(sweep) => {
            let kappa = sweep.kappa;
            let std = sweep.kappa_std;
            sweep
                .result
                .check(name, tol)
                .with_calibration(kappa)
                .with_note(format!("per-sample constant stddev {std:.3e}"))
        }
        None => CheckResult::skipped(name, "no admissible states found"),
    }
}

fn compat_check(
    name: &str,
    p1: &TensorField3,
    p2: &TensorField3,
    s: &mut Sampler,
    n: usize,
    ordered: bool,
) -> CheckResult {
    let mut acc = Acc::default();
    let mut tries = 0;
    while acc.n < n && tries < 200 * n {
        tries += 1;
        let x = if ordered {
            s.ordered_state()
        } else {
            s.real_state()
        };
        if !p1.admissible(&x) || !p2.admissible(&x) {
            continue;
        }
        match compatibility_residual(p1, p2, &x) {
            Ok((res, scale)) => acc.push(res.abs(), scale.max(1e-12)),
            Err(_) => continue,
        }
    }
    if acc.n == 0 {
        return CheckResult::skipped(name, "no admissible states found");
    }
    acc.check(name, 1e-6)
}

fn tensors_suite(params: &Couplings, s: &mut Sampler, n: usize, out: &mut Vec<CheckResult>) {
    let profile = classify(params);
    let full = profile.case_label == CaseLabel::FullSymmetric;
    let semi_like = matches!(
        profile.case_label,
        CaseLabel::SemiSymmetric | CaseLabel::FullSymmetric
    );
    let nonint_equal = profile.case_label == CaseLabel::Noninteracting && profile.k.is_none();

    // equal-couplings pair
    out.push(jacobi_sweep("jacobi-P_f1", &p_f1(), s, n, false));
    out.push(jacobi_sweep("jacobi-P_f2-stated", &p_f2(), s, n, false));
    out.push(jacobi_sweep(
        "jacobi-P_f2-corrected",
        &p_f2_swapped(),
        s,
        n,
        false,
    ));
    if full {
        out.push(hamilton_check(
            "hamilton-P_f1-Hf",
            &p_f1(),
            &h_full_field(),
            params,
            s,
            n,
            false,
            1e-9,
        ));
        let stated = hamilton_check(
            "hamilton-P_f2-H1-stated",
            &p_f2(),
            &h1_field(),
            params,
            s,
            n,
            false,
            1e-9,
        );
        let stated_note = format!(
            "as stated the product equals the flow with its first two \
             components exchanged (fit constant {:.6}, residual {:.3e}); \
             conjugating by the u<->v permutation restores the flow",
            stated.calibration.unwrap_or(f64::NAN),
            stated.max_residual,
        );
        out.push(stated.with_note(stated_note));
        out.push(hamilton_check(
            "hamilton-P_f2-corrected",
            &p_f2_swapped(),
            &h1_field(),
            params,
            s,
            n,
            false,
            1e-9,
        ));
        out.push(compat_check(
            "compat-P_f1-P_f2-corrected",
            &p_f1(),
            &p_f2_swapped(),
            s,
            n,
            false,
        ));
        out.push(compat_check(
            "compat-P_f1-constant",
            &p_f1(),
            &constant_tensor("const", SkewTensor3::new(1.0, -1.0, 1.0)),
            s,
            n,
            false,
        ));
    } else {
        for name in [
            "hamilton-P_f1-Hf",
            "hamilton-P_f2-H1-stated",
            "hamilton-P_f2-corrected",
            "compat-P_f1-P_f2-corrected",
            "compat-P_f1-constant",
        ] {
            out.push(CheckResult::skipped(name, "requires a = b = c"));
        }
    }

    // equal-pair case
    let mu_stuff = if semi_like {
        mu_of(params).ok().filter(|m| !m.is_excluded())
    } else {
        None
    };
    match mu_stuff {
        Some(mu) => {
            let ps1 = p_s1(mu, params.c).expect("mu checked");
            let ps2 = p_s2(mu, params.c).expect("mu checked");
            out.push(jacobi_sweep("jacobi-P_s1", &ps1, s, n, true));
            out.push(jacobi_sweep("jacobi-P_s2", &ps2, s, n, true));
            out.push(hamilton_check(
                "hamilton-P_s1-Hs",
                &ps1,
                &h_s_field(mu),
                params,
                s,
                n,
                true,
                1e-9,
            ));
            out.push(hamilton_check(
                "hamilton-P_s2-H1",
                &ps2,
                &h1_field(),
                params,
                s,
                n,
                true,
                1e-9,
            ));
            out.push(compat_check("compat-P_s1-P_s2", &ps1, &ps2, s, n, true));
            // degenerate-limit coherence at mu = 1/3
            if (mu.mu - 1.0 / 3.0).abs() <= 1e-9 {
                let mut acc = Acc::default();
                let mut ratios = Vec::new();
                for _ in 0..n.min(50) {
                    let x = s.ordered_state();
                    let a = ps1.eval(&x).expect("sector state");
                    let b = p_f1().eval(&x).expect("sector state");
                    let num = a.m12 * b.m12 + a.m13 * b.m13 + a.m23 * b.m23;
                    let den = b.m12 * b.m12 + b.m13 * b.m13 + b.m23 * b.m23;
                    ratios.push((x, a, b, num / den));
                }
                let rho = ratios.iter().map(|r| r.3).sum::<f64>() / ratios.len() as f64;
                for (_, a, b, _) in &ratios {
                    let res = ((a.m12 - rho * b.m12).powi(2)
                        + (a.m13 - rho * b.m13).powi(2)
                        + (a.m23 - rho * b.m23).powi(2))
                    .sqrt();
                    let scale = (a.m12.powi(2) + a.m13.powi(2) + a.m23.powi(2)).sqrt()
                        + rho.abs() * (b.m12.powi(2) + b.m13.powi(2) + b.m23.powi(2)).sqrt();
                    acc.push(res, scale.max(1e-12));
                }
                out.push(
                    acc.check("p_s1-reduces-to-p_f1", 1e-10)
                        .with_calibration(rho)
                        .with_note("proportional at mu = 1/3 with one constant"),
                );
            } else {
                out.push(CheckResult::skipped(
                    "p_s1-reduces-to-p_f1",
                    "defined at mu = 1/3",
                ));
            }
        }
        None => {
            for name in [
                "jacobi-P_s1",
                "jacobi-P_s2",
                "hamilton-P_s1-Hs",
                "hamilton-P_s2-H1",
                "compat-P_s1-P_s2",
                "p_s1-reduces-to-p_f1",
            ] {
                out.push(CheckResult::skipped(
                    name,
                    "requires a = b with c != 0 and mu outside {1/4, 1}",
                ));
            }
        }
    }

    // non-interacting pair
    out.push(jacobi_sweep("jacobi-P_n1", &p_n1(), s, n, false));
    out.push(jacobi_sweep("jacobi-P_n2", &p_n2(), s, n, false));
    if nonint_equal {
        let hn = hamilton_check(
            "hamilton-P_n1-Hn",
            &p_n1(),
            &h_n_field(),
            params,
            s,
            n,
            false,
            1e-9,
        );
        let kappa = hn.calibration.unwrap_or(f64::NAN);
        out.push(hn.with_note(format!(
            "fit constant {kappa:.6}: the product is 3 times the flow at unit \
             coupling, so the tensor prefactor or the Hamiltonian carries an \
             extra factor 3 as stated"
        )));
        out.push(hamilton_check(
            "hamilton-P_n2-H1",
            &p_n2(),
            &h1_field(),
            params,
            s,
            n,
            false,
            1e-9,
        ));
        out.push(compat_check(
            "compat-P_n1-P_n2",
            &p_n1(),
            &p_n2(),
            s,
            n,
            false,
        ));
    } else {
        for name in ["hamilton-P_n1-Hn", "hamilton-P_n2-H1", "compat-P_n1-P_n2"] {
            out.push(CheckResult::skipped(name, "requires a = b != 0 with c = 0"));
        }
    }

    // the cross-product combinator reproduces the first explicit tensor
    let phi = ScalarField3::new("phi_f", |x| {
        -1.0 / (SQRT6 * (x[0] - x[1]) * (x[1] - x[2]) * (x[2] - x[0]))
    });
    let minus_h1 = ScalarField3::new("-H1", |x| -(x[0] + x[1] + x[2]));
    let cross = cross_tensor(phi, minus_h1);
    let reference = p_f1();
    let mut acc = Acc::default();
    for _ in 0..n.min(50) {
        let x = s.real_state();
        let (Ok(a), Ok(b)) = (cross.eval(&x), reference.eval(&x)) else {
            continue;
        };
        let res =
            ((a.m12 - b.m12).powi(2) + (a.m13 - b.m13).powi(2) + (a.m23 - b.m23).powi(2)).sqrt();
        let scale = (b.m12.powi(2) + b.m13.powi(2) + b.m23.powi(2)).sqrt() * 2.0;
        acc.push(res, scale.max(1e-12));
    }
    out.push(acc.check("cross-tensor-reproduces-P_f1", 1e-7));
}

// ---------------------------------------------------------------------------
// extended suite
// ---------------------------------------------------------------------------

fn extended_point(s: &mut Sampler, params: &Couplings, need_h2: bool) -> ExtendedPoint {
    loop {
        let state = s.state3();
        let tau = C64::new(s.tau(), 0.0);
        let point = ExtendedPoint::new(tau, state);
        if !need_h2 || h2_aux(&point, params).norm() >= 1.0 {
            return point;
        }
    }
}

fn extended_suite(params: &Couplings, s: &mut Sampler, n: usize, out: &mut Vec<CheckResult>) {
    let mut jacobi = Acc::default();
    for _ in 0..n {
        let point = extended_point(s, params, false);
        match extended_jacobi_residual(&point, params) {
            Ok((res, scale)) => jacobi.push(res, scale.max(1e-12)),
            Err(_) => continue,
        }
    }
    out.push(jacobi.check("extended-jacobi", 1e-6));

    let mut ham = Acc::default();
    for _ in 0..n {
        let point = extended_point(s, params, true);
        match extended_hamilton_residual(&point, params) {
            Ok((res, scale)) => ham.push(res, scale),
            Err(_) => continue,
        }
    }
    out.push(ham.check("extended-hamilton-H", 1e-10));

    // Hamiltonian vector field of tau: measured against the stated (0, V)
    // with a fitted sign
    let mut pts = Vec::new();
    let mut num = 0.0;
    let mut den = 0.0;
    for _ in 0..n {
        let point = extended_point(s, params, false);
        let Ok(lam) = extended_lambda(&point, params) else {
            continue;
        };
        let alpha = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        let x = lam.apply(&alpha);
        let flow = auxiliary_rhs(&point.state, params)
            .expect("admissible")
            .to_array();
        let e = point.state.to_array();
        let mut v = [C64::new(0.0, 0.0); 3];
        for i in 0..3 {
            v[i] = e[i] - 2.0 * point.tau * flow[i];
        }
        for i in 0..3 {
            num += (x[i + 1] * v[i].conj()).re;
            den += v[i].norm_sqr();
        }
        pts.push((x, v));
    }
    let kappa = if den > 0.0 { num / den } else { 0.0 };
    let mut acc = Acc::default();
    for (x, v) in pts {
        let mut res = x[0].norm();
        let mut scale = 1.0f64;
        for i in 0..3 {
            res = res.max((x[i + 1] - kappa * v[i]).norm());
            scale += x[i + 1].norm() + v[i].norm();
        }
        acc.push(res, scale);
    }
    out.push(
        acc.check("extended-hamilton-tau", 1e-12)
            .with_calibration(kappa)
            .with_note(
                "stated as (0, +V); under the convention that makes the main \
                 Hamilton identity hold with (1, U), the tau field is (0, -V)",
            ),
    );

    // Hamiltonian vector field of H1
    let mut acc1 = Acc::default();
    for _ in 0..n {
        let point = extended_point(s, params, false);
        let Ok(lam) = extended_lambda(&point, params) else {
            continue;
        };
        let one = C64::new(1.0, 0.0);
        let x = lam.apply(&[C64::new(0.0, 0.0), one, one, one]);
        let flow = auxiliary_rhs(&point.state, params)
            .expect("admissible")
            .to_array();
        let h1v = h1(&point.state);
        let mut res = (x[0] - h1v).norm();
        let mut scale = h1v.norm() + 1.0;
        for i in 0..3 {
            res = res.max((x[i + 1] - h1v * flow[i]).norm());
            scale += (h1v * flow[i]).norm();
        }
        acc1.push(res, scale);
    }
    out.push(acc1.check("extended-hamilton-H1", 1e-10));

    // Hamiltonian vector field of H3: fitted against H3 (1, U)
    let mut pts3 = Vec::new();
    let mut num3 = 0.0;
    let mut den3 = 0.0;
    for _ in 0..n {
        let point = extended_point(s, params, false);
        let Ok(lam) = extended_lambda(&point, params) else {
            continue;
        };
        let st = point.state;
        let h1v = h1(&st);
        let alpha = [
            C64::new(params.sum(), 0.0),
            h1v - st.u,
            h1v - st.v,
            h1v - st.w,
        ];
        let x = lam.apply(&alpha);
        let h3v = h3_aux(&point, params);
        let flow = auxiliary_rhs(&st, params).expect("admissible").to_array();
        let target = [h3v, h3v * flow[0], h3v * flow[1], h3v * flow[2]];
        for i in 0..4 {
            num3 += (x[i] * target[i].conj()).re;
            den3 += target[i].norm_sqr();
        }
        pts3.push((x, target));
    }
    let kappa3 = if den3 > 0.0 { num3 / den3 } else { 0.0 };
    let mut acc3 = Acc::default();
    for (x, target) in pts3 {
        let mut res = 0.0f64;
        let mut scale = 1.0f64;
        for i in 0..4 {
            res = res.max((x[i] - kappa3 * target[i]).norm());
            scale += x[i].norm() + target[i].norm();
        }
        acc3.push(res, scale);
    }
    out.push(
        acc3.check("extended-hamilton-H3", 1e-10)
            .with_calibration(kappa3)
            .with_note(
                "stated as -2 H3 U (spatial only); measured as 2 H3 times the \
                 full suspended flow (1, U)",
            ),
    );

    let mut comm = Acc::default();
    for _ in 0..n {
        let point = extended_point(s, params, false);
        match symmetry_commutator_residual(&point, params) {
            Ok((res, scale)) => comm.push(res, scale),
            Err(_) => continue,
        }
    }
    out.push(comm.check("symmetry-commutator", 1e-6));
}

// ---------------------------------------------------------------------------
// reduction suite
// ---------------------------------------------------------------------------

fn reduction_suite(params: &Couplings, s: &mut Sampler, n: usize, out: &mut Vec<CheckResult>) {
    // orthonormality of the coordinate change
    let m = plane_matrix();
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - expect).abs());
        }
    }
    out.push(CheckResult::new(
        "plane-orthonormality",
        1,
        worst,
        1.0,
        1e-14,
    ));

    let mut rt = Acc::default();
    for _ in 0..n {
        let state = s.state3();
        let back = from_plane(&to_plane(&state));
        let res = (back.u - state.u)
            .norm()
            .max((back.v - state.v).norm())
            .max((back.w - state.w).norm());
        let scale = 1.0 + state.u.norm() + state.v.norm() + state.w.norm();
        rt.push(res, scale);
    }
    out.push(rt.check("plane-round-trip", 1e-14));

    let mut push = Acc::default();
    for _ in 0..n {
        let state = s.state3();
        if !state.is_real(0.0) {
            continue;
        }
        let flow = auxiliary_rhs(&state, params).expect("admissible");
        let plane_flow = to_plane(&flow);
        let here = to_plane(&state);
        let (eta, xi) = (here.eta.re, here.xi.re);
        let Ok((ed, xd)) = reduced_rhs(eta, xi, params) else {
            continue;
        };
        let res = plane_flow
            .zeta
            .norm()
            .max((plane_flow.eta - ed).norm())
            .max((plane_flow.xi - xd).norm());
        let scale = 1.0 + ed.abs() + xd.abs();
        push.push(res, scale);
    }
    out.push(push.check("reduction-pushforward", 1e-12));

    // gradient of the potential expressed in plane coordinates matches the
    // reduced flow (two independent code paths)
    let mut grad2 = Acc::default();
    let mut tries = 0;
    while grad2.n < n && tries < 200 * n {
        tries += 1;
        let (eta, xi) = s.plane_sector();
        let zeta = s.uniform();
        let state = from_plane(&PlanePoint::real(zeta, eta, xi));
        let Ok(g3) = grad_potential(&state, params) else {
            continue;
        };
        let g3_state = State3::from_array(g3);
        let gp = to_plane(&g3_state);
        let Ok((ed, xd)) = reduced_rhs(eta, xi, params) else {
            continue;
        };
        let res = gp
            .zeta
            .norm()
            .max((gp.eta - ed).norm())
            .max((gp.xi - xd).norm());
        grad2.push(res, 1.0 + ed.abs() + xd.abs());
    }
    out.push(grad2.check("reduced-gradient", 1e-12));

    let mut zi = Acc::default();
    for _ in 0..n.min(50) {
        let (eta, xi) = s.plane_sector();
        let z1 = s.uniform();
        let z2 = s.uniform();
        let f1 = crate::conserved::potential(&from_plane(&PlanePoint::real(z1, eta, xi)), params);
        let f2 = crate::conserved::potential(&from_plane(&PlanePoint::real(z2, eta, xi)), params);
        let (Ok(f1), Ok(f2)) = (f1, f2) else { continue };
        zi.push((f1 - f2).norm(), f1.norm().max(1.0));
    }
    out.push(zi.check("potential-zeta-independence", 1e-12));

    let mut slope = Acc::default();
    let mut tries = 0;
    while slope.n < n && tries < 200 * n {
        tries += 1;
        let eta = s.uniform();
        let xi = s.uniform();
        let Ok((ed, xd)) = reduced_rhs(eta, xi, params) else {
            continue;
        };
        if ed.abs() < 1e-3 {
            continue;
        }
        let Ok(sl) = characteristic_slope(eta, xi, params) else {
            continue;
        };
        let ratio = xd / ed;
        slope.push((sl - ratio).abs(), sl.abs() + ratio.abs() + 1.0);
    }
    out.push(slope.check("characteristic-slope-ratio", 1e-12));

    let mut homo = Acc::default();
    for _ in 0..n.min(50) {
        let (eta, xi) = s.plane_sector();
        let Ok(base) = characteristic_slope(eta, xi, params) else {
            continue;
        };
        for factor in [2.0, -3.0, 0.5] {
            let Ok(scaled) = characteristic_slope(factor * eta, factor * xi, params) else {
                continue;
            };
            homo.push((scaled - base).abs(), base.abs() + 1.0);
        }
    }
    out.push(homo.check("slope-homogeneity", 1e-12));

    // the remaining reduction checks audit the equal-couplings closed forms
    let fs = Couplings::new(1.0, 1.0, 1.0);

    // symplectic pairing with a fitted constant
    let hf_deta = |eta: f64, xi: f64| -6.0 * xi * eta;
    let hf_dxi = |eta: f64, xi: f64| 3.0 * xi * xi - 3.0 * eta * eta;
    let mut pairs = Vec::new();
    let mut num = 0.0;
    let mut den = 0.0;
    for _ in 0..n {
        let (eta, xi) = s.plane_sector();
        let Ok(phi) = conformal_factor_full(eta, xi) else {
            continue;
        };
        let Ok((fe, fx)) = reduced_rhs(eta, xi, &fs) else {
            continue;
        };
        let target = [-phi * hf_dxi(eta, xi), phi * hf_deta(eta, xi)];
        let lhs = [fe, fx];
        for i in 0..2 {
            num += lhs[i] * target[i];
            den += target[i] * target[i];
        }
        pairs.push((lhs, target));
    }
    let kappa = if den > 0.0 { num / den } else { 0.0 };
    let mut symp = Acc::default();
    for (lhs, target) in pairs {
        for i in 0..2 {
            symp.push(
                (lhs[i] - kappa * target[i]).abs(),
                lhs[i].abs() + (kappa * target[i]).abs() + 1e-6,
            );
        }
    }
    out.push(
        symp.check("symplectic-pairing", 1e-10)
            .with_calibration(kappa)
            .with_note(
                "equal-couplings closed forms; the stated pairing holds up to \
                 the single constant -sqrt(3) across points and components",
            ),
    );

    // plane Liouville densities: the stated factor and its reciprocal
    let stated = |eta: f64, xi: f64| 1.0 / (SQRT3 * eta * (3.0 * xi * xi - eta * eta));
    let reciprocal = |eta: f64, xi: f64| eta * (3.0 * xi * xi - eta * eta);
    let mut inv = Acc::default();
    let mut stated_worst: f64 = 0.0;
    for _ in 0..n.min(50) {
        let (eta, xi) = s.plane_sector();
        let Ok((res, scale)) = liouville_residual(reciprocal, eta, xi, &fs) else {
            continue;
        };
        inv.push(res.abs(), scale.max(1e-12));
        if let Ok((rs, ss)) = liouville_residual(stated, eta, xi, &fs) {
            stated_worst = stated_worst.max(rs.abs() / ss.max(1e-300));
        }
    }
    out.push(inv.check("liouville-plane", 1e-6).with_note(format!(
        "the stated conformal factor fails the density equation (worst \
         relative residual {stated_worst:.3e}); its reciprocal \
         eta (3 xi^2 - eta^2) is the invariant density"
    )));

    let stated3 = |x: &[f64; 3]| -1.0 / (SQRT6 * (x[0] - x[1]) * (x[1] - x[2]) * (x[2] - x[0]));
    let reciprocal3 = |x: &[f64; 3]| (x[0] - x[1]) * (x[1] - x[2]) * (x[2] - x[0]);
    let mut inv3 = Acc::default();
    let mut stated3_worst: f64 = 0.0;
    for _ in 0..n.min(50) {
        let x = s.real_state();
        let Ok((res, scale)) = liouville_residual_3d(reciprocal3, &x, &fs) else {
            continue;
        };
        inv3.push(res.abs(), scale.max(1e-12));
        if let Ok((rs, ss)) = liouville_residual_3d(stated3, &x, &fs) {
            stated3_worst = stated3_worst.max(rs.abs() / ss.max(1e-300));
        }
    }
    out.push(inv3.check("liouville-3d", 1e-6).with_note(format!(
        "the stated volume density fails invariance (worst relative residual \
         {stated3_worst:.3e}); its reciprocal (u-v)(v-w)(w-u) is invariant"
    )));

    // normalization constant between the cubic integral and its plane form
    let mut k0s = Vec::new();
    for _ in 0..n.min(50) {
        let (eta, xi) = s.plane_sector();
        let plane = xi * xi * xi - 3.0 * xi * eta * eta;
        if plane.abs() < 0.1 {
            continue;
        }
        let full = h_full(&from_plane(&PlanePoint::real(0.0, eta, xi)));
        k0s.push(full.re * SQRT6 / plane);
    }
    if k0s.is_empty() {
        out.push(CheckResult::skipped("h-full-normalization", "no samples"));
    } else {
        let k0 = k0s.iter().sum::<f64>() / k0s.len() as f64;
        let mut acc = Acc::default();
        for k in &k0s {
            acc.push((k - k0).abs(), k0.abs().max(1.0));
        }
        out.push(
            acc.check("h-full-normalization", 1e-10)
                .with_calibration(k0)
                .with_note("single fitted constant relating the two closed forms"),
        );
    }
}

// ---------------------------------------------------------------------------
// roots suite
// ---------------------------------------------------------------------------

fn roots_suite(params: &Couplings, s: &mut Sampler, _n: usize, out: &mut Vec<CheckResult>) {
    let pq = pq_of(params);

    // coupling-specific checks
    match pq {
        Ok((p, q)) => {
            match cubic_roots_formula(p, q) {
                Ok(r) => {
                    out.push(CheckResult::new(
                        "radical-roots-residual",
                        3,
                        r.residual,
                        1.0,
                        1e-10,
                    ));
                    let sum: C64 = r.shifted.iter().sum();
                    out.push(CheckResult::new(
                        "root-sum-zero",
                        1,
                        sum.norm(),
                        1.0 + r.shifted.iter().map(|x| x.norm()).sum::<f64>(),
                        1e-10,
                    ));
                }
                Err(_) => {
                    let r = cubic_roots(p, q);
                    out.push(
                        CheckResult::new("radical-roots-residual", 3, r.residual, 1.0, 1e-10)
                            .with_note("radical formulas degenerate; direct solver used"),
                    );
                    let sum: C64 = r.shifted.iter().sum();
                    out.push(CheckResult::new(
                        "root-sum-zero",
                        1,
                        sum.norm(),
                        1.0 + r.shifted.iter().map(|x| x.norm()).sum::<f64>(),
                        1e-10,
                    ));
                }
            }

            // numerator quadratic identity against the unshifted polynomial
            let mut numacc = Acc::default();
            let (np, nm) = numerator_roots(p, q);
            for root in [np, nm] {
                let val = (params.sum() + SQRT3 * (params.a - params.b) * root
                    - 3.0 * params.c * root * root)
                    / (-3.0 * params.c);
                numacc.push(val.norm(), 1.0 + root.norm_sqr());
            }
            out.push(numacc.check("numerator-quadratic-identity", 1e-11));
        }
        Err(_) => {
            for name in [
                "radical-roots-residual",
                "root-sum-zero",
                "numerator-quadratic-identity",
            ] {
                out.push(CheckResult::skipped(
                    name,
                    "cubic parameters require c != 0 for these couplings",
                ));
            }
        }
    }

    // depressed-cubic identity over random couplings (plus the given ones)
    let mut dep = Acc::default();
    let mut coupling_draws: Vec<Couplings> = Vec::new();
    if pq.is_ok() {
        coupling_draws.push(*params);
    }
    while coupling_draws.len() < 20 {
        let c = s.rng.gen_range(-3.0..3.0f64);
        if c.abs() < 0.3 {
            continue;
        }
        coupling_draws.push(Couplings::new(
            s.rng.gen_range(-3.0..3.0),
            s.rng.gen_range(-3.0..3.0),
            c,
        ));
    }
    for cp in &coupling_draws {
        let (p, q) = pq_of(cp).expect("c != 0 by construction");
        let (pp, qq) = depressed_coeffs(p, q);
        for _ in 0..10 {
            let theta = s.rng.gen_range(-2.0..2.0f64);
            let den = SQRT3 * (cp.a - cp.b)
                + (4.0 * cp.a + 4.0 * cp.b + cp.c) * theta
                + SQRT3 * (cp.a - cp.b) * theta * theta
                - 3.0 * cp.c * theta.powi(3);
            let shifted = theta - p / 3.0;
            let depressed = shifted.powi(3) + pp * shifted + qq;
            let scale = (den / (-3.0 * cp.c)).abs() + depressed.abs() + 1.0;
            dep.push((den / (-3.0 * cp.c) - depressed).abs(), scale);
        }
    }
    out.push(dep.check("depressed-cubic-identity", 1e-11));

    // radical roots against the direct solver over a parameter sweep
    let mut sweep = Acc::default();
    let mut drawn = 0;
    while drawn < 500 {
        let (p, q) = s.pq();
        if lambda_of(p, q).norm() < 1e-8 {
            continue;
        }
        let Ok(r) = cubic_roots_formula(p, q) else {
            continue;
        };
        let (pp, qq) = depressed_coeffs(p, q);
        let direct = solve_depressed_cubic(pp, qq);
        sweep.push(root_set_distance(&r.shifted, &direct), 1.0);
        drawn += 1;
    }
    out.push(sweep.check("roots-vs-direct-solver", 1e-9));

    // discriminant identity and sign classification
    let mut disc = Acc::default();
    let mut signs = Acc::default();
    for _ in 0..200 {
        let (p, q) = s.pq();
        let (pp, qq) = depressed_coeffs(p, q);
        let delta = discriminant(p, q);
        let std_disc = -4.0 * pp.powi(3) - 27.0 * qq * qq;
        disc.push(
            (delta - std_disc).abs(),
            4.0 * pp.abs().powi(3) + 27.0 * qq * qq + 1.0,
        );
        if delta.abs() > 1e-6 {
            let roots = solve_depressed_cubic(pp, qq);
            let n_real = roots.iter().filter(|r| r.im.abs() < 1e-9).count();
            let expect = if delta > 0.0 { 3 } else { 1 };
            signs.push(if n_real == expect { 0.0 } else { 1.0 }, 1.0);
        }
    }
    out.push(disc.check("discriminant-identity", 1e-10));
    out.push(signs.check("delta-sign-reality", 1e-12));

    // discriminant-factor zeros and the special-locus audit
    let evals = [
        (-1.0 / 3.0, denp_value(-1.0 / 3.0)),
        (-3.0 / 7.0, denp_value(-3.0 / 7.0)),
        (-1.0 / 12.0, denp_value(-1.0 / 12.0)),
        (-7.0 / 3.0, denp_value(-7.0 / 3.0)),
    ];
    let mismatch = evals[1].1.abs() > 1e3 && evals[3].1.abs() < 1e-6;
    out.push(
        CheckResult::new("denp-zero-audit", evals.len(), 0.0, 1.0, 1.0).with_note(format!(
            "values at q = -1/3, -3/7, -1/12, -7/3: {:.3e}, {:.3e}, {:.3e}, {:.3e}; \
             the stated special value -3/7 is not a zero, -7/3 is{}",
            evals[0].1,
            evals[1].1,
            evals[2].1,
            evals[3].1,
            if mismatch {
                ""
            } else {
                " (unexpected pattern)"
            }
        )),
    );

    let loci = special_loci();
    let inconsistent: Vec<String> = loci
        .iter()
        .filter(|l| !l.consistent)
        .map(|l| {
            format!(
                "q={} ({}): audited zero at q={}, audited mu {} vs stated {}",
                l.q_stated,
                l.constraint,
                l.audited_q.map_or("none".into(), |v| v.to_string()),
                l.mu_semi_audited.map_or("none".into(), |v| v.to_string()),
                l.mu_semi_stated.map_or("none".into(), |v| v.to_string()),
            )
        })
        .collect();
    out.push(
        CheckResult::new("special-loci-audit", loci.len(), 0.0, 1.0, 1.0).with_note(
            if inconsistent.is_empty() {
                "all stated loci consistent".to_string()
            } else {
                inconsistent.join("; ")
            },
        ),
    );

    // full-symmetric reference profile
    let profile = classify(params);
    if profile.case_label == CaseLabel::FullSymmetric {
        let q = profile.q.unwrap();
        let lam = profile.lambda.unwrap();
        let delta = profile.delta.unwrap();
        let theta = profile.theta.unwrap();
        let expect = [
            C64::new(0.0, 0.0),
            C64::new(SQRT3, 0.0),
            C64::new(-SQRT3, 0.0),
        ];
        let res = (q - 2.0 / 3.0)
            .abs()
            .max((lam - C64::new(0.0, 27.0)).norm() / 27.0)
            .max((delta - 108.0).abs() / 108.0)
            .max(root_set_distance(&theta, &expect));
        out.push(CheckResult::new(
            "full-symmetric-profile",
            1,
            res,
            1.0,
            1e-9,
        ));
    } else {
        out.push(CheckResult::skipped(
            "full-symmetric-profile",
            "requires a = b = c",
        ));
    }

    // mu-q relation in the equal-pair case
    match (profile.mu, profile.q) {
        (Some(mu), Some(q)) if (4.0 * mu - 1.0).abs() > 1e-9 => {
            let q_from_mu = (1.0 - mu) / (3.0 * (4.0 * mu - 1.0));
            out.push(CheckResult::new(
                "mu-q-relation",
                1,
                (q - q_from_mu).abs(),
                q.abs() + q_from_mu.abs() + 1.0,
                1e-12,
            ));
        }
        _ => out.push(CheckResult::skipped(
            "mu-q-relation",
            "requires the equal-pair case with c != 0",
        )),
    }
}

/// Run the configured suite and assemble the report.
pub fn run_verify(params: &Couplings, cfg: &VerifyConfig) -> VerifyReport {
    let mut sampler = Sampler::new(cfg.seed, cfg.box_radius);
    let n = cfg.samples.max(1);
    let mut checks = Vec::new();
    match cfg.suite {
        Suite::All => {
            conserved_suite(params, &mut sampler, n, &mut checks);
            tensors_suite(params, &mut sampler, n, &mut checks);
            extended_suite(params, &mut sampler, n, &mut checks);
            reduction_suite(params, &mut sampler, n, &mut checks);
            roots_suite(params, &mut sampler, n, &mut checks);
        }
        Suite::Conserved => conserved_suite(params, &mut sampler, n, &mut checks),
        Suite::Tensors => tensors_suite(params, &mut sampler, n, &mut checks),
        Suite::Extended => extended_suite(params, &mut sampler, n, &mut checks),
        Suite::Reduction => reduction_suite(params, &mut sampler, n, &mut checks),
        Suite::Roots => roots_suite(params, &mut sampler, n, &mut checks),
    }
    let all_pass = checks.iter().all(|c| c.pass);
    let all_acceptable = checks.iter().all(|c| c.acceptable());
    VerifyReport {
        schema_version: 1,
        suite: cfg.suite,
        couplings: *params,
        samples: cfg.samples,
        seed: cfg.seed,
        box_radius: cfg.box_radius,
        checks,
        all_pass,
        all_acceptable,
    }
}
