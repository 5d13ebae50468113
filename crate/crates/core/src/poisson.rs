//! Explicit Poisson tensors of the three-body flow, the time-extended
//! bivector, and the residual engines (Jacobi, Hamilton with calibration,
//! compatibility, commutator) that audit them numerically.
//!
//! Tensors over the real state domain are stored through their three
//! independent entries, so skew-symmetry holds exactly by construction. The
//! Hamilton engine fits one global proportionality constant per tensor /
//! Hamiltonian pair instead of assuming it, which is how stated identities
//! that hold only up to a constant or a permutation get detected and
//! reported.

use serde::Serialize;

use crate::conserved::{h2_aux, MuConstant};
use crate::error::ModelError;
use crate::model::{auxiliary_rhs, Couplings, ExtendedPoint, State3};
use crate::numdiff::fd_step;
use crate::{C64, SQRT6};

/// Minimum pairwise separation for tensor evaluation.
const TENSOR_SEP_EPS: f64 = 1e-10;

/// A 3x3 skew matrix stored by its independent entries `m12 = M[0][1]`,
/// `m13 = M[0][2]`, `m23 = M[1][2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkewTensor3 {
    pub m12: f64,
    pub m13: f64,
    pub m23: f64,
}

impl SkewTensor3 {
    pub fn new(m12: f64, m13: f64, m23: f64) -> Self {
        Self { m12, m13, m23 }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// Hat map: the skew matrix acting as `g -> omega x g`.
    pub fn from_hat(omega: [f64; 3]) -> Self {
        Self::new(-omega[2], omega[1], -omega[0])
    }

    /// Inverse of the hat map.
    pub fn to_axis(&self) -> [f64; 3] {
        [-self.m23, self.m13, -self.m12]
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        [
            [0.0, self.m12, self.m13],
            [-self.m12, 0.0, self.m23],
            [-self.m13, -self.m23, 0.0],
        ]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.to_matrix()[i][j]
    }

    /// Matrix-vector product.
    pub fn apply(&self, g: [f64; 3]) -> [f64; 3] {
        [
            self.m12 * g[1] + self.m13 * g[2],
            -self.m12 * g[0] + self.m23 * g[2],
            -self.m13 * g[0] - self.m23 * g[1],
        ]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.m12 * s, self.m13 * s, self.m23 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.m12 + other.m12,
            self.m13 + other.m13,
            self.m23 + other.m23,
        )
    }

    /// Conjugation by the permutation that swaps the first two coordinates.
    pub fn swap_uv(&self) -> Self {
        Self::new(-self.m12, self.m23, self.m13)
    }
}

/// A scalar field on real states with an optional analytic gradient.
pub struct ScalarField3 {
    pub name: String,
    value: Box<dyn Fn(&[f64; 3]) -> f64>,
    grad: Option<Box<dyn Fn(&[f64; 3]) -> [f64; 3]>>,
}

impl ScalarField3 {
    pub fn new(name: impl Into<String>, value: impl Fn(&[f64; 3]) -> f64 + 'static) -> Self {
        Self {
            name: name.into(),
            value: Box::new(value),
            grad: None,
        }
    }

    pub fn with_grad(mut self, grad: impl Fn(&[f64; 3]) -> [f64; 3] + 'static) -> Self {
        self.grad = Some(Box::new(grad));
        self
    }

    pub fn value(&self, x: &[f64; 3]) -> f64 {
        (self.value)(x)
    }

    /// Analytic gradient when available, otherwise central differences.
    pub fn gradient(&self, x: &[f64; 3]) -> [f64; 3] {
        if let Some(g) = &self.grad {
            return g(x);
        }
        let mut out = [0.0; 3];
        for i in 0..3 {
            let h = fd_step(x[i]);
            let mut xp = *x;
            let mut xm = *x;
            xp[i] += h;
            xm[i] -= h;
            out[i] = ((self.value)(&xp) - (self.value)(&xm)) / (2.0 * h);
        }
        out
    }
}

/// A named skew-tensor field with a domain guard.
pub struct TensorField3 {
    pub name: String,
    eval: Box<dyn Fn(&[f64; 3]) -> Result<SkewTensor3, ModelError>>,
    guard: Box<dyn Fn(&[f64; 3]) -> bool>,
}

fn separation_guard(x: &[f64; 3]) -> bool {
    let s = State3::real(x[0], x[1], x[2]);
    s.min_separation() >= TENSOR_SEP_EPS
}

fn pairwise(x: &[f64; 3]) -> (f64, f64, f64) {
    (x[0] - x[1], x[1] - x[2], x[2] - x[0])
}

impl TensorField3 {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&[f64; 3]) -> Result<SkewTensor3, ModelError> + 'static,
        guard: impl Fn(&[f64; 3]) -> bool + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Box::new(eval),
            guard: Box::new(guard),
        }
    }

    pub fn admissible(&self, x: &[f64; 3]) -> bool {
        (self.guard)(x)
    }

    pub fn eval(&self, x: &[f64; 3]) -> Result<SkewTensor3, ModelError> {
        if !(self.guard)(x) {
            let s = State3::real(x[0], x[1], x[2]);
            return Err(ModelError::SeparationTooSmall {
                min_sep: s.min_separation(),
                threshold: TENSOR_SEP_EPS,
            });
        }
        (self.eval)(x)
    }
}

/// Tensor acting on gradients as `grad G -> phi grad H x grad G`.
pub fn cross_tensor(phi: ScalarField3, h: ScalarField3) -> TensorField3 {
    let name = format!("cross({}, {})", phi.name, h.name);
    TensorField3::new(
        name,
        move |x| {
            let p = phi.value(x);
            let g = h.gradient(x);
            Ok(SkewTensor3::from_hat([p * g[0], p * g[1], p * g[2]]))
        },
        separation_guard,
    )
}

// constant matrices of the explicit tensors
const K_ALT: SkewTensor3 = SkewTensor3 {
    m12: 1.0,
    m13: -1.0,
    m23: 1.0,
};
const K_B: SkewTensor3 = SkewTensor3 {
    m12: -2.0,
    m13: -1.0,
    m23: 1.0,
};
const K_C: SkewTensor3 = SkewTensor3 {
    m12: 0.0,
    m13: 1.0,
    m23: 1.0,
};
const K_L: SkewTensor3 = SkewTensor3 {
    m12: 2.0,
    m13: 1.0,
    m23: -1.0,
};
const K_CM: SkewTensor3 = SkewTensor3 {
    m12: 0.0,
    m13: -1.0,
    m23: -1.0,
};

/// First Poisson tensor of the equal-couplings pair.
pub fn p_f1() -> TensorField3 {
    TensorField3::new(
        "P_f1",
        |x| {
            let (duv, dvw, dwu) = pairwise(x);
            Ok(K_ALT.scale(-1.0 / (SQRT6 * duv * dvw * dwu)))
        },
        separation_guard,
    )
}

/// Second Poisson tensor of the equal-couplings pair, in its stated form.
pub fn p_f2() -> TensorField3 {
    TensorField3::new(
        "P_f2",
        |x| {
            let (duv, dvw, dwu) = pairwise(x);
            let alpha = duv / (dvw * dwu) + 2.0 / duv;
            let beta = 1.0 / dvw - 1.0 / dwu;
            Ok(K_B.scale(alpha / 6.0).add(&K_C.scale(beta / 2.0)))
        },
        separation_guard,
    )
}

/// The candidate correction of [`p_f2`]: pointwise conjugation by the
/// permutation swapping the first two coordinates.
pub fn p_f2_swapped() -> TensorField3 {
    let base = p_f2();
    TensorField3::new(
        "P_f2 (u<->v conjugated)",
        move |x| Ok((base.eval)(x)?.swap_uv()),
        separation_guard,
    )
}

/// First Poisson tensor of the equal-pair case.
pub fn p_s1(mu: MuConstant, c: f64) -> Result<TensorField3, ModelError> {
    if mu.is_excluded() {
        return Err(ModelError::MuExcluded(mu.mu));
    }
    let expo = (1.0 - 3.0 * mu.mu) / (1.0 - mu.mu);
    let fractional = (expo - expo.round()).abs() > 1e-12;
    let negative_power = expo < 0.0;
    Ok(TensorField3::new(
        "P_s1",
        move |x| {
            let (duv, dvw, dwu) = pairwise(x);
            let s = x[0] + x[1] - 2.0 * x[2];
            if fractional && s <= 0.0 {
                return Err(ModelError::NegativeBase { base: s });
            }
            if negative_power && s.abs() < 1e-10 {
                return Err(ModelError::NegativeBase { base: s });
            }
            let lead = if fractional {
                s.powf(expo)
            } else {
                s.powi(expo.round() as i32)
            };
            Ok(K_ALT.scale(-1.5 * c * lead / (duv * dvw * dwu)))
        },
        move |x| {
            let s = x[0] + x[1] - 2.0 * x[2];
            separation_guard(x)
                && (!fractional || s > 0.0)
                && (!negative_power || s.abs() >= 1e-10)
        },
    ))
}

/// Second Poisson tensor of the equal-pair case.
pub fn p_s2(mu: MuConstant, c: f64) -> Result<TensorField3, ModelError> {
    if mu.is_excluded() {
        return Err(ModelError::MuExcluded(mu.mu));
    }
    let m = mu.mu;
    Ok(TensorField3::new(
        "P_s2",
        move |x| {
            let (duv, dvw, dwu) = pairwise(x);
            let t1 = -(c / 12.0) * (dvw / dwu + dwu / dvw - 2.0) / duv;
            let t2 = (c / 12.0) * (3.0 * m / (4.0 * m - 1.0)) * duv / (dvw * dwu);
            let t3 = (c / 4.0) * ((1.0 - m) / (4.0 * m - 1.0)) * (1.0 / dwu - 1.0 / dvw);
            Ok(K_L.scale(t1 + t2).add(&K_CM.scale(t3)))
        },
        separation_guard,
    ))
}

/// First Poisson tensor of the equal-coupling non-interacting pair.
pub fn p_n1() -> TensorField3 {
    TensorField3::new(
        "P_n1",
        |x| {
            let (duv, dvw, dwu) = pairwise(x);
            Ok(K_ALT.scale(2.0 / (duv * duv * dvw * dwu)))
        },
        separation_guard,
    )
}

/// Second Poisson tensor of the equal-coupling non-interacting pair.
pub fn p_n2() -> TensorField3 {
    TensorField3::new(
        "P_n2",
        |x| {
            let (duv, dvw, dwu) = pairwise(x);
            let t1 = duv / (dvw * dwu) / 6.0;
            let t2 = 0.5 * (1.0 / dwu - 1.0 / dvw);
            Ok(K_L.scale(t1).add(&K_CM.scale(t2)))
        },
        separation_guard,
    )
}

/// A constant skew tensor field.
pub fn constant_tensor(name: impl Into<String>, m: SkewTensor3) -> TensorField3 {
    TensorField3::new(name, move |_| Ok(m), |_| true)
}

fn jacobi_of(
    eval: &dyn Fn(&[f64; 3]) -> Result<SkewTensor3, ModelError>,
    x: &[f64; 3],
) -> Result<(f64, f64), ModelError> {
    // d/dl of the three independent entries by central differences
    let mut d = [[0.0f64; 3]; 3]; // d[l] = (d m23/dl, d m31/dl, d m12/dl)
    for l in 0..3 {
        let h = fd_step(x[l]);
        let mut xp = *x;
        let mut xm = *x;
        xp[l] += h;
        xm[l] -= h;
        let tp = eval(&xp)?;
        let tm = eval(&xm)?;
        d[l] = [
            (tp.m23 - tm.m23) / (2.0 * h),
            (-tp.m13 + tm.m13) / (2.0 * h), // m31 = -m13
            (tp.m12 - tm.m12) / (2.0 * h),
        ];
    }
    let m = eval(x)?.to_matrix();
    // sum over l of P^{0l} d_l P^{12'} with the cyclic (23),(31),(12) pattern
    let mut residual = 0.0;
    let mut scale = 0.0;
    for l in 0..3 {
        let terms = [m[0][l] * d[l][0], m[1][l] * d[l][1], m[2][l] * d[l][2]];
        for t in terms {
            residual += t;
            scale += t.abs();
        }
    }
    Ok((residual, scale))
}

/// The single independent 3D Jacobi component of a tensor field at a state,
/// by central differences, together with the scale of its terms.
pub fn jacobi_residual(p: &TensorField3, x: &[f64; 3]) -> Result<(f64, f64), ModelError> {
    if !p.admissible(x) {
        let s = State3::real(x[0], x[1], x[2]);
        return Err(ModelError::SeparationTooSmall {
            min_sep: s.min_separation(),
            threshold: TENSOR_SEP_EPS,
        });
    }
    jacobi_of(&*p.eval, x)
}

/// Jacobi residual of the sum of two tensor fields, the compatibility test
/// for a candidate Poisson pair.
pub fn compatibility_residual(
    p1: &TensorField3,
    p2: &TensorField3,
    x: &[f64; 3],
) -> Result<(f64, f64), ModelError> {
    let sum =
        |y: &[f64; 3]| -> Result<SkewTensor3, ModelError> { Ok((p1.eval)(y)?.add(&(p2.eval)(y)?)) };
    if !p1.admissible(x) || !p2.admissible(x) {
        let s = State3::real(x[0], x[1], x[2]);
        return Err(ModelError::SeparationTooSmall {
            min_sep: s.min_separation(),
            threshold: TENSOR_SEP_EPS,
        });
    }
    jacobi_of(&sum, x)
}

/// One Hamilton-check sample: the best-fit constant `kappa` minimizing
/// `|P grad H - kappa U|` and the corresponding residual and scale.
#[derive(Debug, Clone, Copy)]
pub struct HamiltonSample {
    pub residual: f64,
    pub scale: f64,
    pub kappa: f64,
    /// The tensor-gradient product, for permutation diagnostics.
    pub product: [f64; 3],
    pub flow: [f64; 3],
}

/// Evaluate `P grad H` against the flow at one state, fitting the
/// proportionality constant.
pub fn hamilton_residual(
    p: &TensorField3,
    h: &ScalarField3,
    x: &[f64; 3],
    params: &Couplings,
) -> Result<HamiltonSample, ModelError> {
    let tensor = p.eval(x)?;
    let grad = h.gradient(x);
    let product = tensor.apply(grad);
    let state = State3::real(x[0], x[1], x[2]);
    let flow_c = auxiliary_rhs(&state, params)?;
    let flow = [flow_c.u.re, flow_c.v.re, flow_c.w.re];
    let uu: f64 = flow.iter().map(|f| f * f).sum();
    let pu: f64 = product.iter().zip(&flow).map(|(p, f)| p * f).sum();
    let kappa = if uu > 0.0 { pu / uu } else { 0.0 };
    let mut residual = 0.0f64;
    let mut pnorm = 0.0f64;
    let mut unorm = 0.0f64;
    for i in 0..3 {
        residual += (product[i] - kappa * flow[i]).powi(2);
        pnorm += product[i] * product[i];
        unorm += flow[i] * flow[i];
    }
    Ok(HamiltonSample {
        residual: residual.sqrt(),
        scale: pnorm.sqrt() + kappa.abs() * unorm.sqrt(),
        kappa,
        product,
        flow,
    })
}

/// Structured result of one audited identity.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    /// Build a result; `pass` is derived from `max_residual <= tol * scale`.
    pub fn new(
        name: impl Into<String>,
        samples: usize,
        max_residual: f64,
        scale: f64,
        tol: f64,
    ) -> Self {
        Self {
            name: name.into(),
            samples,
            max_residual,
            scale,
            tol,
            pass: max_residual <= tol * scale,
            calibration: None,
            note: None,
        }
    }

    /// A check that could not run for a documented reason.
    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            samples: 0,
            max_residual: 0.0,
            scale: 0.0,
            tol: 0.0,
            pass: true,
            calibration: None,
            note: Some(format!("skipped: {}", note.into())),
        }
    }

    pub fn with_calibration(mut self, k: f64) -> Self {
        self.calibration = Some(k);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Passing, or failing in a documented (noted) way.
    pub fn acceptable(&self) -> bool {
        self.pass || self.note.is_some()
    }
}

/// The time-extended bivector over coordinates `(tau, u, v, w)`: the first
/// row carries the time-dependent symmetry field `V = E - 2 tau U`, the
/// spatial block the wedge of the flow with the Euler field.
#[derive(Debug, Clone, Copy)]
pub struct ExtendedBivector {
    m: [[C64; 4]; 4],
}

impl ExtendedBivector {
    pub fn matrix(&self) -> [[C64; 4]; 4] {
        self.m
    }

    /// Contraction `X^mu = sum_nu Lambda^{mu nu} alpha_nu`.
    pub fn apply(&self, alpha: &[C64; 4]) -> [C64; 4] {
        let mut out = [C64::new(0.0, 0.0); 4];
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu] += self.m[mu][nu] * alpha[nu];
            }
        }
        out
    }
}

/// Assemble the extended bivector at a point: `Lambda^{0i} = V^i` and
/// `Lambda^{ij} = U^i E^j - E^i U^j`.
pub fn extended_lambda(
    point: &ExtendedPoint,
    params: &Couplings,
) -> Result<ExtendedBivector, ModelError> {
    let flow = auxiliary_rhs(&point.state, params)?;
    let u = flow.to_array();
    let e = point.state.to_array();
    let zero = C64::new(0.0, 0.0);
    let mut m = [[zero; 4]; 4];
    for i in 0..3 {
        let vi = e[i] - 2.0 * point.tau * u[i];
        m[0][i + 1] = vi;
        m[i + 1][0] = -vi;
    }
    for i in 0..3 {
        for j in 0..3 {
            m[i + 1][j + 1] = u[i] * e[j] - e[i] * u[j];
        }
    }
    Ok(ExtendedBivector { m })
}

const EXT_TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

fn lambda_at_with(
    coords: &[C64; 4],
    params: &Couplings,
    tau_coeff: f64,
) -> Result<[[C64; 4]; 4], ModelError> {
    let state = State3::new(coords[1], coords[2], coords[3]);
    let flow = auxiliary_rhs(&state, params)?;
    let u = flow.to_array();
    let e = state.to_array();
    let zero = C64::new(0.0, 0.0);
    let mut m = [[zero; 4]; 4];
    for i in 0..3 {
        let vi = e[i] - tau_coeff * coords[0] * u[i];
        m[0][i + 1] = vi;
        m[i + 1][0] = -vi;
    }
    for i in 0..3 {
        for j in 0..3 {
            m[i + 1][j + 1] = u[i] * e[j] - e[i] * u[j];
        }
    }
    Ok(m)
}

/// Max 4D Jacobi component of the extended bivector over the four
/// independent index triples, by central differences in all four
/// coordinates. Returns the worst residual and its scale.
pub fn extended_jacobi_residual(
    point: &ExtendedPoint,
    params: &Couplings,
) -> Result<(f64, f64), ModelError> {
    extended_jacobi_residual_with(point, params, 2.0)
}

/// Extended Jacobi residual with an adjustable coefficient on `tau U` in the
/// symmetry row; mutation tests use coefficients other than 2.
pub fn extended_jacobi_residual_with(
    point: &ExtendedPoint,
    params: &Couplings,
    tau_coeff: f64,
) -> Result<(f64, f64), ModelError> {
    let base = [point.tau, point.state.u, point.state.v, point.state.w];
    let mut deriv = [[[C64::new(0.0, 0.0); 4]; 4]; 4]; // deriv[sigma][mu][nu]
    for sigma in 0..4 {
        let h = fd_step(base[sigma].norm());
        let mut cp = base;
        let mut cm = base;
        cp[sigma] += h;
        cm[sigma] -= h;
        let lp = lambda_at_with(&cp, params, tau_coeff)?;
        let lm = lambda_at_with(&cm, params, tau_coeff)?;
        for mu in 0..4 {
            for nu in 0..4 {
                deriv[sigma][mu][nu] = (lp[mu][nu] - lm[mu][nu]) / (2.0 * h);
            }
        }
    }
    let lam = lambda_at_with(&base, params, tau_coeff)?;
    let mut worst = (0.0f64, 1.0f64);
    let mut worst_ratio = -1.0f64;
    for [mu, nu, rho] in EXT_TRIPLES {
        let mut total = C64::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for sigma in 0..4 {
            let terms = [
                lam[mu][sigma] * deriv[sigma][nu][rho],
                lam[nu][sigma] * deriv[sigma][rho][mu],
                lam[rho][sigma] * deriv[sigma][mu][nu],
            ];
            for t in terms {
                total += t;
                scale += t.norm();
            }
        }
        let ratio = total.norm() / scale.max(1e-300);
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst = (total.norm(), scale);
        }
    }
    Ok(worst)
}

/// Covector of `H = (1/2) ln H2` at a point (analytic).
pub fn grad_extended_hamiltonian(
    point: &ExtendedPoint,
    params: &Couplings,
) -> Result<[C64; 4], ModelError> {
    let h2 = h2_aux(point, params);
    let s = &point.state;
    let scale = s.u.norm_sqr()
        + s.v.norm_sqr()
        + s.w.norm_sqr()
        + 2.0 * params.sum().abs() * point.tau.norm()
        + 1.0;
    if h2.norm() < 1e-8 * scale {
        return Err(ModelError::VanishingH2);
    }
    Ok([-params.sum() / h2, s.u / h2, s.v / h2, s.w / h2])
}

/// Residual of `Lambda(dH) = (1, U)` with `H = (1/2) ln H2`, together with
/// its scale.
pub fn extended_hamilton_residual(
    point: &ExtendedPoint,
    params: &Couplings,
) -> Result<(f64, f64), ModelError> {
    let lam = extended_lambda(point, params)?;
    let alpha = grad_extended_hamiltonian(point, params)?;
    let x = lam.apply(&alpha);
    let flow = auxiliary_rhs(&point.state, params)?.to_array();
    let expect = [C64::new(1.0, 0.0), flow[0], flow[1], flow[2]];
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..4 {
        residual = residual.max((x[i] - expect[i]).norm());
        scale += x[i].norm() + expect[i].norm();
    }
    Ok((residual, scale.max(1.0)))
}

/// The Hamilton check `Lambda(dH) = (1, U)` at one point, packaged.
pub fn extended_hamilton_check(
    point: &ExtendedPoint,
    params: &Couplings,
) -> Result<CheckResult, ModelError> {
    let (residual, scale) = extended_hamilton_residual(point, params)?;
    Ok(CheckResult::new(
        "extended-hamilton-H",
        1,
        residual,
        scale,
        1e-10,
    ))
}

/// Max component of the 4D Lie bracket of the suspended flow `(1, U)` with
/// the symmetry field `(0, E - 2 tau U)`, by central differences.
pub fn symmetry_commutator_residual(
    point: &ExtendedPoint,
    params: &Couplings,
) -> Result<(f64, f64), ModelError> {
    symmetry_commutator_residual_with(point, params, 2.0)
}

/// Commutator residual with an adjustable coefficient on `tau U`, used by
/// mutation tests (the symmetry requires exactly 2).
pub fn symmetry_commutator_residual_with(
    point: &ExtendedPoint,
    params: &Couplings,
    tau_coeff: f64,
) -> Result<(f64, f64), ModelError> {
    let field_a = |c: &[C64; 4]| -> Result<[C64; 4], ModelError> {
        let state = State3::new(c[1], c[2], c[3]);
        let f = auxiliary_rhs(&state, params)?.to_array();
        Ok([C64::new(1.0, 0.0), f[0], f[1], f[2]])
    };
    let field_b = |c: &[C64; 4]| -> Result<[C64; 4], ModelError> {
        let state = State3::new(c[1], c[2], c[3]);
        let f = auxiliary_rhs(&state, params)?.to_array();
        let e = state.to_array();
        Ok([
            C64::new(0.0, 0.0),
            e[0] - tau_coeff * c[0] * f[0],
            e[1] - tau_coeff * c[0] * f[1],
            e[2] - tau_coeff * c[0] * f[2],
        ])
    };
    let base = [point.tau, point.state.u, point.state.v, point.state.w];
    let a0 = field_a(&base)?;
    let b0 = field_b(&base)?;
    let mut da = [[C64::new(0.0, 0.0); 4]; 4]; // da[nu][mu] = d A^mu / d x^nu
    let mut db = [[C64::new(0.0, 0.0); 4]; 4];
    for nu in 0..4 {
        let h = fd_step(base[nu].norm());
        let mut cp = base;
        let mut cm = base;
        cp[nu] += h;
        cm[nu] -= h;
        let (ap, am) = (field_a(&cp)?, field_a(&cm)?);
        let (bp, bm) = (field_b(&cp)?, field_b(&cm)?);
        for mu in 0..4 {
            da[nu][mu] = (ap[mu] - am[mu]) / (2.0 * h);
            db[nu][mu] = (bp[mu] - bm[mu]) / (2.0 * h);
        }
    }
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    for mu in 0..4 {
        let mut bracket = C64::new(0.0, 0.0);
        for nu in 0..4 {
            let t1 = a0[nu] * db[nu][mu];
            let t2 = b0[nu] * da[nu][mu];
            bracket += t1 - t2;
            scale += t1.norm() + t2.norm();
        }
        residual = residual.max(bracket.norm());
    }
    Ok((residual, scale.max(1e-300)))
}
