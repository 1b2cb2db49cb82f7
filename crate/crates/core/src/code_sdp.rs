//! Code optimization programs for a channel, checks of candidate primal and
//! dual points, and the Horodecki dual certificate.
//!
//! Λ lives on the channel's Choi shape (outputs `B`, then inputs `A'`), ρ on
//! the inputs. The primal maximizes `Tr Nᵀ Λ` subject to `0 ≤ Λ ≤ ρ ⊗ I`,
//! `Tr ρ = 1`, plus `Λ_B = I/K²` (NS), `Λ_B ≤ I/K²` (EA bound) and
//! `-ρ⊗I/K ≤ t_B Λ ≤ ρ⊗I/K` (PPT). The dual minimizes `μ + Tr W / K²`
//! subject to `Nᵀ + t_B Ω ≤ X + I ⊗ W`, `Tr_B(X + |Ω|/K) ≤ μ I`, `X ≥ 0`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use nsppt_sdp::{
    BlockKind, HermitianFunctional, HermitianProgram, RealForm, Relation, Sense, SolverOptions, SolverResult,
};

use crate::channel::{BipartiteChoi, BipartiteClasses, ChannelChoi, RationalChannel, ALICE_IN, ALICE_OUT, BOB_IN, BOB_OUT, IN, OUT};
use crate::class::CodeClass;
use crate::error::{Error, Result};
use crate::operator::{max_entangled, LabeledOperator, Operator, Scalar, SystemShape};

#[derive(Clone, Debug, PartialEq)]
pub struct CodeProblem<T = Complex64> {
    pub channel: ChannelChoi<T>,
    pub size: u64,
    pub class: CodeClass,
}

impl<T: Scalar> CodeProblem<T> {
    pub fn new(channel: ChannelChoi<T>, size: u64, class: CodeClass) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("code size K must be at least 1".into()));
        }
        Ok(Self { channel, size, class })
    }

    fn inv_k(&self) -> T {
        T::from_ratio(1, self.size as i64)
    }

    fn inv_k2(&self) -> T {
        T::from_ratio(1, (self.size * self.size) as i64)
    }

    fn in_shape(&self) -> SystemShape {
        sub_shape(self.channel.choi().shape(), &self.channel.in_labels())
    }

    fn out_shape(&self) -> SystemShape {
        sub_shape(self.channel.choi().shape(), &self.channel.out_labels())
    }
}

fn sub_shape(shape: &SystemShape, labels: &[&str]) -> SystemShape {
    SystemShape::new(shape.systems().iter().filter(|(l, _)| labels.contains(&l.as_str())).cloned())
        .expect("subset of a valid shape")
}

/// Candidate `(Λ, ρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasiblePoint<T = Complex64> {
    pub lambda: LabeledOperator<T>,
    pub rho: LabeledOperator<T>,
}

pub type RationalPoint = FeasiblePoint<BigRational>;

impl<T: Scalar> FeasiblePoint<T> {
    /// `Γ = (ρ ⊗ I − Λ)/(K² − 1)`, the weight on the complement of φ.
    pub fn gamma(&self, k: u64) -> Result<LabeledOperator<T>> {
        if k < 2 {
            return Err(Error::InvalidArgument("Γ is defined for K ≥ 2".into()));
        }
        let rho_id = self.rho.extend_to(self.lambda.shape())?;
        Ok(rho_id.sub(&self.lambda)?.scale(&T::from_ratio(1, (k * k - 1) as i64)))
    }

    /// Moves the point onto `channel`'s subsystem labels, which must have
    /// the same input and output dimensions.
    pub fn reshaped_for(&self, channel: &ChannelChoi<T>) -> Result<Self> {
        let shape = channel.choi().shape();
        Ok(Self {
            lambda: self.lambda.reshape(shape.clone())?,
            rho: self.rho.reshape(sub_shape(shape, &channel.in_labels()))?,
        })
    }
}

/// `Tr Nᵀ Λ`.
pub fn primal_value<T: Scalar>(pt: &FeasiblePoint<T>, channel: &ChannelChoi<T>) -> Result<T> {
    if pt.lambda.shape() != channel.choi().shape() {
        return Err(Error::DimensionMismatch(format!(
            "Λ is on {} but the channel is on {}",
            pt.lambda.shape(),
            channel.choi().shape()
        )));
    }
    channel.choi().transpose().trace_product(&pt.lambda)
}

/// Parts of the primal constraints that are common to both scalar types.
struct PrimalParts<T> {
    dominance: LabeledOperator<T>,
    marginal_gap: Option<LabeledOperator<T>>,
    ppt: Option<(LabeledOperator<T>, LabeledOperator<T>)>,
}

fn primal_parts<T: Scalar>(pt: &FeasiblePoint<T>, p: &CodeProblem<T>) -> Result<PrimalParts<T>> {
    let shape = p.channel.choi().shape();
    if pt.lambda.shape() != shape || pt.rho.shape() != &p.in_shape() {
        return Err(Error::DimensionMismatch(format!(
            "point on ({}, {}) does not fit a channel on {}",
            pt.lambda.shape(),
            pt.rho.shape(),
            shape
        )));
    }
    let rho_id = pt.rho.extend_to(shape)?;
    let dominance = rho_id.sub(&pt.lambda)?;
    let marginal_gap = match p.class {
        CodeClass::Ns | CodeClass::Both | CodeClass::EaBound => {
            let lb = pt.lambda.partial_trace(&p.channel.in_labels())?;
            let target = LabeledOperator::identity(p.out_shape()).scale(&p.inv_k2());
            Some(target.sub(&lb)?)
        }
        CodeClass::Ppt => None,
    };
    let ppt = if p.class.has_ppt() {
        let tb = pt.lambda.partial_transpose(&p.channel.out_labels())?;
        let bound = rho_id.scale(&p.inv_k());
        Some((bound.add(&tb)?, bound.sub(&tb)?))
    } else {
        None
    };
    Ok(PrimalParts { dominance, marginal_gap, ppt })
}

/// Residuals of the primal constraints. Eigenvalue entries are minimum
/// eigenvalues and must be `≥ -tol`; the others must be `≤ tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalReport {
    pub value: f64,
    pub lambda_min_eigenvalue: f64,
    pub dominance_min_eigenvalue: f64,
    pub rho_min_eigenvalue: f64,
    pub trace_residual: f64,
    /// `‖Λ_B − I/K²‖∞` for NS classes, the negative part of the smallest
    /// eigenvalue of `I/K² − Λ_B` for the EA bound.
    pub marginal_residual: Option<f64>,
    pub ppt_min_eigenvalue: Option<f64>,
    pub asymmetry: f64,
    pub passed: bool,
}

pub fn check_primal(pt: &FeasiblePoint, p: &CodeProblem, tol: f64) -> Result<PrimalReport> {
    let parts = primal_parts(pt, p)?;
    let marginal_residual = parts.marginal_gap.map(|g| {
        if p.class == CodeClass::EaBound {
            (-g.min_eigenvalue()).max(0.0)
        } else {
            g.max_abs()
        }
    });
    let ppt_min_eigenvalue = parts.ppt.map(|(a, b)| a.min_eigenvalue().min(b.min_eigenvalue()));
    let mut r = PrimalReport {
        value: primal_value(pt, &p.channel)?.re,
        lambda_min_eigenvalue: pt.lambda.min_eigenvalue(),
        dominance_min_eigenvalue: parts.dominance.min_eigenvalue(),
        rho_min_eigenvalue: pt.rho.min_eigenvalue(),
        trace_residual: (pt.rho.trace() - Complex64::one()).norm(),
        marginal_residual,
        ppt_min_eigenvalue,
        asymmetry: pt.lambda.asymmetry().max(pt.rho.asymmetry()),
        passed: false,
    };
    r.passed = r.lambda_min_eigenvalue >= -tol
        && r.dominance_min_eigenvalue >= -tol
        && r.rho_min_eigenvalue >= -tol
        && r.trace_residual <= tol
        && r.marginal_residual.is_none_or(|m| m <= tol)
        && r.ppt_min_eigenvalue.is_none_or(|m| m >= -tol)
        && r.asymmetry <= tol;
    Ok(r)
}

/// Exact verdicts on each primal constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPrimalReport {
    pub value: BigRational,
    pub lambda_psd: bool,
    pub dominance_psd: bool,
    pub rho_psd: bool,
    pub trace_one: bool,
    pub marginal_holds: Option<bool>,
    pub ppt_holds: Option<bool>,
}

impl ExactPrimalReport {
    pub fn passed(&self) -> bool {
        self.lambda_psd
            && self.dominance_psd
            && self.rho_psd
            && self.trace_one
            && self.marginal_holds != Some(false)
            && self.ppt_holds != Some(false)
    }
}

pub fn check_primal_exact(pt: &RationalPoint, p: &CodeProblem<BigRational>) -> Result<ExactPrimalReport> {
    let parts = primal_parts(pt, p)?;
    let marginal_holds = parts.marginal_gap.map(|g| {
        if p.class == CodeClass::EaBound {
            g.is_psd_exact()
        } else {
            g.is_zero()
        }
    });
    Ok(ExactPrimalReport {
        value: primal_value(pt, &p.channel)?,
        lambda_psd: pt.lambda.is_psd_exact(),
        dominance_psd: parts.dominance.is_psd_exact(),
        rho_psd: pt.rho.is_psd_exact(),
        trace_one: pt.rho.trace().is_one(),
        marginal_holds,
        ppt_holds: parts.ppt.map(|(a, b)| a.is_psd_exact() && b.is_psd_exact()),
    })
}

/// Candidate dual point. `w` lives on the channel outputs, `x` and `omega`
/// on the Choi shape.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPoint<T = Complex64> {
    pub x: LabeledOperator<T>,
    pub w: LabeledOperator<T>,
    pub omega: LabeledOperator<T>,
    pub mu: T,
}

pub type RationalDualPoint = DualPoint<BigRational>;

impl<T: Scalar> DualPoint<T> {
    /// `μ + Tr W / K²`.
    pub fn value(&self, k: u64) -> T {
        self.mu.clone() + self.w.trace() * T::from_ratio(1, (k * k) as i64)
    }
}

pub fn dual_value<T: Scalar>(dp: &DualPoint<T>, k: u64) -> T {
    dp.value(k)
}

struct DualParts<T> {
    constraint: LabeledOperator<T>,
    trace: LabeledOperator<T>,
}

/// `X + I⊗W − Nᵀ − t_B Ω` and `μ I − Tr_B(X + |Ω|/K)`.
fn dual_parts<T: Scalar>(dp: &DualPoint<T>, abs_omega: &LabeledOperator<T>, p: &CodeProblem<T>) -> Result<DualParts<T>> {
    let shape = p.channel.choi().shape();
    if dp.x.shape() != shape || dp.omega.shape() != shape || dp.w.shape() != &p.out_shape() {
        return Err(Error::DimensionMismatch("dual point does not fit the channel".into()));
    }
    let constraint = dp
        .x
        .add(&dp.w.extend_to(shape)?)?
        .sub(&p.channel.choi().transpose())?
        .sub(&dp.omega.partial_transpose(&p.channel.out_labels())?)?;
    let inner = dp.x.add(&abs_omega.scale(&p.inv_k()))?.partial_trace(&p.channel.out_labels())?;
    let trace = LabeledOperator::identity(p.in_shape()).scale(&dp.mu).sub(&inner)?;
    Ok(DualParts { constraint, trace })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualReport {
    pub value: f64,
    pub constraint_min_eigenvalue: f64,
    pub trace_min_eigenvalue: f64,
    pub x_min_eigenvalue: f64,
    /// Smallest eigenvalue of `W`, which must be PSD for the EA bound.
    pub w_min_eigenvalue: Option<f64>,
    /// Largest entry of `W` when the class has no marginal constraint.
    pub w_residual: f64,
    /// Largest entry of `Ω` when the class has no PPT constraint.
    pub omega_residual: f64,
    pub passed: bool,
}

pub fn check_dual(dp: &DualPoint, p: &CodeProblem, tol: f64) -> Result<DualReport> {
    let abs = dp.omega.abs();
    let parts = dual_parts(dp, &abs, p)?;
    let w_min_eigenvalue = (p.class == CodeClass::EaBound).then(|| dp.w.min_eigenvalue());
    let w_residual = if p.class == CodeClass::Ppt { dp.w.max_abs() } else { 0.0 };
    let omega_residual = if p.class.has_ppt() { 0.0 } else { dp.omega.max_abs() };
    let mut r = DualReport {
        value: dp.value(p.size).re,
        constraint_min_eigenvalue: parts.constraint.min_eigenvalue(),
        trace_min_eigenvalue: parts.trace.min_eigenvalue(),
        x_min_eigenvalue: dp.x.min_eigenvalue(),
        w_min_eigenvalue,
        w_residual,
        omega_residual,
        passed: false,
    };
    r.passed = r.constraint_min_eigenvalue >= -tol
        && r.trace_min_eigenvalue >= -tol
        && r.x_min_eigenvalue >= -tol
        && r.w_min_eigenvalue.is_none_or(|m| m >= -tol)
        && r.w_residual <= tol
        && r.omega_residual <= tol
        && dp.mu.im.abs() <= tol;
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactDualReport {
    pub value: BigRational,
    pub constraint_psd: bool,
    pub trace_psd: bool,
    pub x_psd: bool,
    pub w_allowed: bool,
    pub omega_allowed: bool,
}

impl ExactDualReport {
    pub fn passed(&self) -> bool {
        self.constraint_psd && self.trace_psd && self.x_psd && self.w_allowed && self.omega_allowed
    }
}

/// Exact check for points whose `Ω` is semidefinite, so `|Ω| = ±Ω`.
pub fn check_dual_exact(dp: &RationalDualPoint, p: &CodeProblem<BigRational>) -> Result<ExactDualReport> {
    let abs = if dp.omega.is_psd_exact() {
        dp.omega.clone()
    } else {
        let neg = dp.omega.scale(&-BigRational::one());
        if !neg.is_psd_exact() {
            return Err(Error::InvalidArgument("exact dual check needs Ω ≥ 0 or Ω ≤ 0".into()));
        }
        neg
    };
    let parts = dual_parts(dp, &abs, p)?;
    let w_allowed = match p.class {
        CodeClass::Ppt => dp.w.is_zero(),
        CodeClass::EaBound => dp.w.is_psd_exact(),
        CodeClass::Ns | CodeClass::Both => true,
    };
    Ok(ExactDualReport {
        value: dp.value(p.size),
        constraint_psd: parts.constraint.is_psd_exact(),
        trace_psd: parts.trace.is_psd_exact(),
        x_psd: dp.x.is_psd_exact(),
        w_allowed,
        omega_allowed: p.class.has_ppt() || dp.omega.is_zero(),
    })
}

fn horodecki_point<T: Scalar>(channel: &ChannelChoi<T>, k: u64) -> Result<DualPoint<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("code size K must be at least 1".into()));
    }
    let shape = channel.choi().shape().clone();
    let omega = channel.choi().partial_transpose(&channel.in_labels())?.scale(&-T::one());
    Ok(DualPoint {
        x: LabeledOperator::zeros(shape.clone()),
        w: LabeledOperator::zeros(sub_shape(&shape, &channel.out_labels())),
        omega,
        mu: T::from_ratio(1, k as i64),
    })
}

/// `X = 0, W = 0, Ω = −t_in N, μ = 1/K`, feasible for PPT codes whenever
/// the Choi matrix is PPT.
pub fn horodecki_dual_point(channel: &ChannelChoi, k: u64, tol: f64) -> Result<DualPoint> {
    let m = channel.ppt_min_eigenvalue()?;
    if m < -tol {
        return Err(Error::NotHorodecki(m));
    }
    horodecki_point(channel, k)
}

pub fn horodecki_dual_point_exact(channel: &RationalChannel, k: u64) -> Result<RationalDualPoint> {
    if !channel.is_horodecki_exact()? {
        let m = channel.to_complex().ppt_min_eigenvalue()?;
        return Err(Error::NotHorodecki(m));
    }
    horodecki_point(channel, k)
}

fn channel_on_code_labels<T: Scalar>(z: &BipartiteChoi<T>, n: &ChannelChoi<T>) -> Result<LabeledOperator<T>> {
    let (da, db) = (z.dim(ALICE_OUT), z.dim(BOB_IN));
    if n.in_dim() != da || n.out_dim() != db {
        return Err(Error::DimensionMismatch(format!(
            "code sends {da} → {db} but the channel maps {} → {}",
            n.in_dim(),
            n.out_dim()
        )));
    }
    n.flat().relabel(OUT, BOB_IN)?.relabel(IN, ALICE_OUT)
}

fn message_dim<T: Scalar>(z: &BipartiteChoi<T>) -> Result<usize> {
    let k = z.dim(ALICE_IN);
    if z.dim(BOB_OUT) != k {
        return Err(Error::DimensionMismatch(format!(
            "message input has dimension {k} but the decoded output has {}",
            z.dim(BOB_OUT)
        )));
    }
    Ok(k)
}

/// `K⁻¹ Tr[φ_{B'A} Z Nᵀ]`.
pub fn bipartite_fidelity<T: Scalar>(z: &BipartiteChoi<T>, n: &ChannelChoi<T>) -> Result<T> {
    let k = message_dim(z)?;
    let nt = channel_on_code_labels(z, n)?.transpose();
    let phi = max_entangled::<T>(k, BOB_OUT, ALICE_IN)?;
    Ok(phi.matmul(z.choi())?.trace_product(&nt)? * T::from_ratio(1, k as i64))
}

/// Fidelity of the code `z` over `n` and the classes it belongs to.
pub fn code_from_bipartite(z: &BipartiteChoi, n: &ChannelChoi) -> Result<(f64, BipartiteClasses)> {
    Ok((bipartite_fidelity(z, n)?.re, z.classes()?))
}

/// Projects a code onto its `U ⊗ Ū`-invariant part on the message systems
/// and returns the resulting `(Λ, ρ)` on `out ⊗ in` labels.
pub fn twirl_code(z: &BipartiteChoi, tol: f64) -> Result<FeasiblePoint> {
    let gap = z.bob_to_alice_gap()?.max_abs();
    if gap > tol {
        return Err(Error::Signalling(gap));
    }
    twirl_parts(z)
}

pub fn twirl_code_exact(z: &BipartiteChoi<BigRational>) -> Result<RationalPoint> {
    if !z.bob_to_alice_gap()?.is_zero() {
        return Err(Error::Signalling(z.to_complex().bob_to_alice_gap()?.max_abs()));
    }
    twirl_parts(z)
}

fn twirl_parts<T: Scalar>(z: &BipartiteChoi<T>) -> Result<FeasiblePoint<T>> {
    let k = message_dim(z)?;
    let inv_k = T::from_ratio(1, k as i64);
    let phi = max_entangled::<T>(k, BOB_OUT, ALICE_IN)?;
    let lambda = phi
        .matmul(z.choi())?
        .partial_trace(&[BOB_OUT, ALICE_IN])?
        .permute(&[BOB_IN, ALICE_OUT])?
        .relabel(BOB_IN, OUT)?
        .relabel(ALICE_OUT, IN)?
        .scale(&inv_k);
    let db = z.dim(BOB_IN);
    let rho = z
        .choi()
        .partial_trace(&[BOB_OUT, ALICE_IN, BOB_IN])?
        .relabel(ALICE_OUT, IN)?
        .scale(&T::from_ratio(1, (k * db) as i64));
    Ok(FeasiblePoint { lambda, rho })
}

/// Linear maps between blocks, written on flat indices `(b, a)` of the
/// Choi shape with `b` the output and `a` the input index.
#[derive(Clone, Copy, Debug)]
enum Map {
    Ident,
    /// `t_B X`.
    TransposeOut,
    /// `ρ ↦ I_B ⊗ ρ`.
    PadOut,
    /// `W ↦ W ⊗ I_A'`.
    PadIn,
    /// `Tr_B X`, onto the inputs.
    TraceOut,
    /// `Tr_A' X`, onto the outputs.
    TraceIn,
    /// `μ ↦ μ I`.
    Scalar,
    /// `ρ ↦ Tr ρ` for a block of the given side.
    Trace(usize),
}

#[derive(Clone, Copy, Debug)]
struct Dims {
    out: usize,
    inp: usize,
}

impl Dims {
    fn idx(&self, b: usize, a: usize) -> usize {
        b * self.inp + a
    }

    fn split(&self, p: usize) -> (usize, usize) {
        (p / self.inp, p % self.inp)
    }
}

/// Source entries `(r, s)` whose sum is entry `(p, q)` of the image.
fn sources(map: Map, p: usize, q: usize, d: Dims, out: &mut Vec<(usize, usize)>) {
    out.clear();
    match map {
        Map::Ident => out.push((p, q)),
        Map::TransposeOut => {
            let ((b, a), (b2, a2)) = (d.split(p), d.split(q));
            out.push((d.idx(b2, a), d.idx(b, a2)));
        }
        Map::PadOut => {
            let ((b, a), (b2, a2)) = (d.split(p), d.split(q));
            if b == b2 {
                out.push((a, a2));
            }
        }
        Map::PadIn => {
            let ((b, a), (b2, a2)) = (d.split(p), d.split(q));
            if a == a2 {
                out.push((b, b2));
            }
        }
        Map::TraceOut => out.extend((0..d.out).map(|b| (d.idx(b, p), d.idx(b, q)))),
        Map::TraceIn => out.extend((0..d.inp).map(|a| (d.idx(p, a), d.idx(q, a)))),
        Map::Scalar => {
            if p == q {
                out.push((0, 0));
            }
        }
        Map::Trace(n) => out.extend((0..n).map(|i| (i, i))),
    }
}

/// Rows of a matrix equation: for each upper-triangle output entry, the
/// constraint index of its real part and, off the diagonal, its imaginary
/// part.
#[derive(Clone, Debug)]
struct Equation {
    side: usize,
    rows: Vec<(usize, usize, Option<usize>, Option<usize>)>,
}

impl Equation {
    /// Hermitian matrix `M` with `⟨M, ·⟩ = Σ y_i ⟨A_i, ·⟩` over this
    /// equation's rows.
    fn multiplier(&self, y: &[f64]) -> Vec<Complex64> {
        let n = self.side;
        let mut m = vec![Complex64::zero(); n * n];
        for &(p, q, re, im) in &self.rows {
            let yr = re.map_or(0.0, |i| y[i]);
            if p == q {
                m[p * n + p] = Complex64::new(yr, 0.0);
            } else {
                let yi = im.map_or(0.0, |i| y[i]);
                let v = Complex64::new(yr, yi) * 0.5;
                m[p * n + q] = v;
                m[q * n + p] = v.conj();
            }
        }
        m
    }
}

/// `Σ coef · map(block) = rhs` as real and imaginary rows.
fn add_equation(
    prog: &mut HermitianProgram,
    side: usize,
    terms: &[(usize, Map, f64)],
    rhs: impl Fn(usize, usize) -> Complex64,
    dims: Dims,
) -> Equation {
    let mut rows = Vec::with_capacity(side * (side + 1) / 2);
    let mut src = Vec::new();
    for p in 0..side {
        for q in p..side {
            let mut re = HermitianFunctional::new();
            let mut im = HermitianFunctional::new();
            for &(block, map, coef) in terms {
                sources(map, p, q, dims, &mut src);
                for &(r, s) in &src {
                    if r == s {
                        re.push_real(block, r, r, coef);
                    } else {
                        re.push_real(block, r, s, 0.5 * coef);
                        im.push(block, r, s, Complex64::new(0.0, 0.5 * coef));
                    }
                }
            }
            let target = rhs(p, q);
            let re_row = (!re.entries.is_empty() || target.re != 0.0)
                .then(|| prog.add_constraint(re, Relation::Eq, target.re));
            let im_row = (p != q && (!im.entries.is_empty() || target.im != 0.0))
                .then(|| prog.add_constraint(im, Relation::Eq, target.im));
            rows.push((p, q, re_row, im_row));
        }
    }
    Equation { side, rows }
}

fn identity_rhs(scale: f64) -> impl Fn(usize, usize) -> Complex64 {
    move |p, q| if p == q { Complex64::new(scale, 0.0) } else { Complex64::zero() }
}

fn zero_rhs(_: usize, _: usize) -> Complex64 {
    Complex64::zero()
}

fn dims_of(p: &CodeProblem) -> Dims {
    Dims { out: p.channel.out_dim(), inp: p.channel.in_dim() }
}

/// The code primal as a Hermitian program, with the blocks holding Λ and ρ.
#[derive(Clone, Debug)]
pub struct PrimalProgram {
    pub program: HermitianProgram,
    lambda: usize,
    rho: usize,
}

pub fn build_primal(p: &CodeProblem) -> Result<PrimalProgram> {
    p.channel.validate(1e-8)?;
    let dims = dims_of(p);
    let d = dims.out * dims.inp;
    let k = p.size as f64;
    let mut prog = HermitianProgram::new(Sense::Maximize);
    let lambda = prog.add_block("lambda", d, BlockKind::Psd);
    let rho = prog.add_block("rho", dims.inp, BlockKind::Psd);
    let dom = prog.add_block("dominance", d, BlockKind::Psd);
    let n = p.channel.choi().data();
    for r in 0..d {
        for c in r..d {
            prog.objective.push(lambda, r, c, n[c * d + r]);
        }
    }
    add_equation(&mut prog, d, &[(dom, Map::Ident, 1.0), (rho, Map::PadOut, -1.0), (lambda, Map::Ident, 1.0)], zero_rhs, dims);
    if p.class.has_ppt() {
        let plus = prog.add_block("ppt_plus", d, BlockKind::Psd);
        let minus = prog.add_block("ppt_minus", d, BlockKind::Psd);
        for (slack, sign) in [(plus, 1.0), (minus, -1.0)] {
            let terms = [(slack, Map::Ident, 1.0), (rho, Map::PadOut, -1.0 / k), (lambda, Map::TransposeOut, -sign)];
            add_equation(&mut prog, d, &terms, zero_rhs, dims);
        }
    }
    match p.class {
        CodeClass::Ns | CodeClass::Both => {
            add_equation(&mut prog, dims.out, &[(lambda, Map::TraceIn, 1.0)], identity_rhs(1.0 / (k * k)), dims);
        }
        CodeClass::EaBound => {
            let slack = prog.add_block("marginal", dims.out, BlockKind::Psd);
            let terms = [(slack, Map::Ident, 1.0), (lambda, Map::TraceIn, 1.0)];
            add_equation(&mut prog, dims.out, &terms, identity_rhs(1.0 / (k * k)), dims);
        }
        CodeClass::Ppt => {}
    }
    add_equation(&mut prog, 1, &[(rho, Map::Trace(dims.inp), 1.0)], identity_rhs(1.0), dims);
    Ok(PrimalProgram { program: prog, lambda, rho })
}

impl PrimalProgram {
    pub fn point(&self, form: &RealForm, result: &SolverResult, p: &CodeProblem) -> Result<FeasiblePoint> {
        Ok(FeasiblePoint {
            lambda: Operator::hermitian(p.channel.choi().shape().clone(), form.block_value(result, self.lambda))?,
            rho: Operator::hermitian(p.in_shape(), form.block_value(result, self.rho))?,
        })
    }
}

/// The code dual as a Hermitian program. `Ω = Y − V` with `|Ω|` bounded by
/// `Y + V`.
#[derive(Clone, Debug)]
pub struct DualProgram {
    pub program: HermitianProgram,
    x: usize,
    w: Option<usize>,
    omega: Option<(usize, usize)>,
    mu: usize,
    lambda_rows: Equation,
    rho_rows: Equation,
}

pub fn build_dual(p: &CodeProblem) -> Result<DualProgram> {
    p.channel.validate(1e-8)?;
    let dims = dims_of(p);
    let d = dims.out * dims.inp;
    let k = p.size as f64;
    let mut prog = HermitianProgram::new(Sense::Minimize);
    let x = prog.add_block("x", d, BlockKind::Psd);
    let s1 = prog.add_block("constraint_slack", d, BlockKind::Psd);
    let s2 = prog.add_block("trace_slack", dims.inp, BlockKind::Psd);
    let mu = prog.add_block("mu", 1, BlockKind::Free);
    let w = match p.class {
        CodeClass::Ns | CodeClass::Both => Some(prog.add_block("w", dims.out, BlockKind::Free)),
        CodeClass::EaBound => Some(prog.add_block("w", dims.out, BlockKind::Psd)),
        CodeClass::Ppt => None,
    };
    let omega = p
        .class
        .has_ppt()
        .then(|| (prog.add_block("omega_plus", d, BlockKind::Psd), prog.add_block("omega_minus", d, BlockKind::Psd)));
    prog.objective.push_real(mu, 0, 0, 1.0);
    if let Some(w) = w {
        for b in 0..dims.out {
            prog.objective.push_real(w, b, b, 1.0 / (k * k));
        }
    }
    let mut terms = vec![(s1, Map::Ident, 1.0), (x, Map::Ident, -1.0)];
    if let Some(w) = w {
        terms.push((w, Map::PadIn, -1.0));
    }
    if let Some((y, v)) = omega {
        terms.push((y, Map::TransposeOut, 1.0));
        terms.push((v, Map::TransposeOut, -1.0));
    }
    let n = p.channel.choi().data();
    let lambda_rows = add_equation(&mut prog, d, &terms, |r, c| -n[c * d + r], dims);
    let mut terms = vec![(s2, Map::Ident, 1.0), (x, Map::TraceOut, 1.0), (mu, Map::Scalar, -1.0)];
    if let Some((y, v)) = omega {
        terms.push((y, Map::TraceOut, 1.0 / k));
        terms.push((v, Map::TraceOut, 1.0 / k));
    }
    let rho_rows = add_equation(&mut prog, dims.inp, &terms, zero_rhs, dims);
    Ok(DualProgram { program: prog, x, w, omega, mu, lambda_rows, rho_rows })
}

impl DualProgram {
    /// The primal point carried by the equation multipliers.
    pub fn primal_point(&self, form: &RealForm, result: &SolverResult, p: &CodeProblem) -> Result<FeasiblePoint> {
        let y = form.constraint_duals(result);
        let neg = |m: Vec<Complex64>| m.into_iter().map(|v| -v).collect::<Vec<_>>();
        Ok(FeasiblePoint {
            lambda: Operator::hermitian(p.channel.choi().shape().clone(), neg(self.lambda_rows.multiplier(&y)))?,
            rho: Operator::hermitian(p.in_shape(), neg(self.rho_rows.multiplier(&y)))?,
        })
    }

    pub fn dual_point(&self, form: &RealForm, result: &SolverResult, p: &CodeProblem) -> Result<DualPoint> {
        let shape = p.channel.choi().shape().clone();
        let x = Operator::hermitian(shape.clone(), form.block_value(result, self.x))?;
        let w = match self.w {
            Some(w) => Operator::hermitian(p.out_shape(), form.block_value(result, w))?,
            None => Operator::zeros(p.out_shape()),
        };
        let omega = match self.omega {
            Some((y, v)) => Operator::hermitian(shape.clone(), form.block_value(result, y))?
                .sub(&Operator::hermitian(shape, form.block_value(result, v))?)?,
            None => Operator::zeros(shape),
        };
        let mu = Complex64::new(form.block_value(result, self.mu)[0].re, 0.0);
        Ok(DualPoint { x, w, omega, mu })
    }
}

/// Outcome of a numeric solve: the recovered points, their values, and the
/// raw solver result.
#[derive(Clone, Debug)]
pub struct CodeSolution {
    /// Optimal objective reported by the solver for the program solved.
    pub value: f64,
    pub primal: FeasiblePoint,
    pub primal_value: f64,
    pub dual: Option<DualPoint>,
    pub dual_value: Option<f64>,
    pub result: SolverResult,
}

impl CodeSolution {
    /// `dual value − primal value` when both points are available.
    pub fn gap(&self) -> Option<f64> {
        self.dual_value.map(|u| u - self.primal_value)
    }
}

fn require_optimal(result: &SolverResult) -> Result<()> {
    if result.is_optimal() {
        Ok(())
    } else {
        Err(Error::SolverStatus(format!(
            "{:?} after {} iterations (primal infeasibility {:e}, dual infeasibility {:e}, relative gap {:e})",
            result.status, result.iterations, result.primal_infeasibility, result.dual_infeasibility, result.relative_gap
        )))
    }
}

/// Solves the dual program and reads both a primal and a dual point from
/// the result.
pub fn solve(p: &CodeProblem, opts: &SolverOptions) -> Result<CodeSolution> {
    let dual = build_dual(p)?;
    let form = dual.program.to_real()?;
    let result = nsppt_sdp::solve(&form.program, opts)?;
    require_optimal(&result)?;
    let primal = dual.primal_point(&form, &result, p)?;
    let dp = dual.dual_point(&form, &result, p)?;
    Ok(CodeSolution {
        value: result.primal_value,
        primal_value: primal_value(&primal, &p.channel)?.re,
        dual_value: Some(dp.value(p.size).re),
        primal,
        dual: Some(dp),
        result,
    })
}

/// Solves the primal program directly. It has roughly three times as many
/// constraints as the dual, so it hits the solver's size cap sooner.
pub fn solve_primal(p: &CodeProblem, opts: &SolverOptions) -> Result<CodeSolution> {
    let primal = build_primal(p)?;
    let form = primal.program.to_real()?;
    let result = nsppt_sdp::solve(&form.program, opts)?;
    require_optimal(&result)?;
    let pt = primal.point(&form, &result, p)?;
    Ok(CodeSolution {
        value: result.primal_value,
        primal_value: primal_value(&pt, &p.channel)?.re,
        primal: pt,
        dual: None,
        dual_value: None,
        result,
    })
}

/// The trivial code: discard the message, send `ρ`, guess uniformly.
pub fn trivial_point<T: Scalar>(p: &CodeProblem<T>, rho: &LabeledOperator<T>) -> Result<FeasiblePoint<T>> {
    let lambda = rho.extend_to(p.channel.choi().shape())?.scale(&p.inv_k2());
    Ok(FeasiblePoint { lambda, rho: rho.clone() })
}

/// Maximally mixed input for `p`'s channel.
pub fn uniform_input<T: Scalar>(p: &CodeProblem<T>) -> LabeledOperator<T> {
    let shape = p.in_shape();
    let d = shape.total_dim() as i64;
    LabeledOperator::identity(shape).scale(&T::from_ratio(1, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{completely_depolarizing, dephasing, identity_channel, superactivation_z, symmetric_classical, werner_holevo};
    use crate::rational::frac;

    fn wh(d: usize, a: (i64, i64)) -> ChannelChoi {
        werner_holevo(d, &frac(a.0, a.1)).unwrap().to_complex()
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn wh_ppt_five_sixths() {
        let p = CodeProblem::new(wh(3, (1, 1)), 2, CodeClass::Ppt).unwrap();
        let s = solve(&p, &opts()).unwrap();
        assert!((s.value - 5.0 / 6.0).abs() < 1e-6, "{}", s.value);
        assert!(check_primal(&s.primal, &p, 1e-6).unwrap().passed);
        assert!(check_dual(s.dual.as_ref().unwrap(), &p, 1e-6).unwrap().passed);
        assert!(s.gap().unwrap().abs() < 1e-6);
        let d = solve_primal(&p, &opts()).unwrap();
        assert!((d.value - s.value).abs() < 1e-6);
        assert!(check_primal(&d.primal, &p, 1e-6).unwrap().passed);
    }

    #[test]
    fn identity_channel_is_perfect() {
        for class in CodeClass::ALL {
            let p = CodeProblem::new(identity_channel::<Complex64>(2).unwrap(), 2, class).unwrap();
            let s = solve(&p, &opts()).unwrap();
            assert!((s.value - 1.0).abs() < 1e-6, "{class}: {}", s.value);
        }
    }

    #[test]
    fn depolarized_ns_is_guessing() {
        let p = CodeProblem::new(completely_depolarizing::<Complex64>(2).unwrap(), 2, CodeClass::Ns).unwrap();
        let s = solve(&p, &opts()).unwrap();
        assert!((s.value - 0.25).abs() < 1e-6);
        let t = solve_primal(&p, &opts()).unwrap();
        assert!((t.value - 0.25).abs() < 1e-6);
    }

    #[test]
    fn horodecki_certificates() {
        let deph = dephasing::<Complex64>(3).unwrap();
        let dp = horodecki_dual_point(&deph, 2, 1e-12).unwrap();
        let p = CodeProblem::new(deph, 2, CodeClass::Ppt).unwrap();
        let r = check_dual(&dp, &p, 1e-10).unwrap();
        assert!(r.passed && (r.value - 0.5).abs() < 1e-12);

        let w = werner_holevo(3, &frac(1, 2)).unwrap();
        let dp = horodecki_dual_point_exact(&w, 3).unwrap();
        let p = CodeProblem::new(w, 3, CodeClass::Ppt).unwrap();
        let r = check_dual_exact(&dp, &p).unwrap();
        assert!(r.passed());
        assert_eq!(r.value, frac(1, 3));

        let c = symmetric_classical(2, 0.75).unwrap();
        assert!(horodecki_dual_point(&c, 2, 1e-12).is_ok());
        assert!(matches!(horodecki_dual_point(&wh(3, (1, 1)), 2, 1e-9), Err(Error::NotHorodecki(_))));
    }

    #[test]
    fn trivial_code_is_feasible_for_both() {
        let w = werner_holevo(2, &frac(1, 3)).unwrap();
        for k in 1..4 {
            let p = CodeProblem::new(w.clone(), k, CodeClass::Both).unwrap();
            let pt = trivial_point(&p, &uniform_input(&p)).unwrap();
            let r = check_primal_exact(&pt, &p).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.value, frac(1, (k * k) as i64));
        }
    }

    #[test]
    fn zero_lambda_fails_ns() {
        let p = CodeProblem::new(wh(2, (1, 2)), 2, CodeClass::Ns).unwrap();
        let rho = uniform_input(&p);
        let pt = FeasiblePoint { lambda: Operator::zeros(p.channel.choi().shape().clone()), rho };
        let r = check_primal(&pt, &p, 1e-9).unwrap();
        assert!(!r.passed);
        assert!((r.marginal_residual.unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(primal_value(&pt, &p.channel).unwrap(), Complex64::zero());
    }

    /// Encode with the identity, decode with the identity.
    fn identity_code(d: usize) -> BipartiteChoi {
        let phi_a = crate::operator::unnormalized_max_entangled::<Complex64>(d, ALICE_OUT, ALICE_IN).unwrap();
        let phi_b = crate::operator::unnormalized_max_entangled::<Complex64>(d, BOB_OUT, BOB_IN).unwrap();
        let z = phi_a.tensor(&phi_b).unwrap().permute(&[ALICE_OUT, BOB_OUT, ALICE_IN, BOB_IN]).unwrap();
        BipartiteChoi::new(z).unwrap()
    }

    #[test]
    fn identity_code_over_identity_channel() {
        let z = identity_code(2);
        let (f, classes) = code_from_bipartite(&z, &identity_channel(2).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        assert_eq!(classes.holds(1e-12), (true, true, true));
        let pt = twirl_code(&z, 1e-12).unwrap();
        let ch = identity_channel::<Complex64>(2).unwrap();
        assert!((primal_value(&pt, &ch).unwrap().re - 1.0).abs() < 1e-12);
        let p = CodeProblem::new(ch, 2, CodeClass::Ns).unwrap();
        assert!(check_primal(&pt, &p, 1e-12).unwrap().passed);
    }

    #[test]
    fn superactivation_code_classes() {
        let z = superactivation_z();
        let twice = crate::channel::depolarizing_exact(2, &frac(1, 2)).unwrap();
        let f = bipartite_fidelity(&z, &twice).unwrap();
        let pt = twirl_code_exact(&z).unwrap();
        assert_eq!(primal_value(&pt, &twice).unwrap(), f);
        let p = CodeProblem::new(twice, 2, CodeClass::Both).unwrap();
        assert!(check_primal_exact(&pt, &p).unwrap().passed());
    }
}
