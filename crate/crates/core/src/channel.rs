//! Channels and bipartite operations represented by Choi matrices.
//!
//! A channel's Choi matrix lives on `out ⊗ in` and acts by
//! `N(X) = Tr_in[N (I_out ⊗ Xᵀ)]`; the identity channel has Choi matrix
//! `Σ_ij |ii⟩⟨jj|`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::operator::{
    sym_antisym, unnormalized_max_entangled, LabeledOperator, Operator, RationalOperator, Scalar,
    SystemShape,
};
use crate::rational::{frac, int};

pub const OUT: &str = "out";
pub const IN: &str = "in";

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelChoi<T = Complex64> {
    choi: LabeledOperator<T>,
    out_labels: Vec<String>,
    in_labels: Vec<String>,
}

pub type RationalChannel = ChannelChoi<BigRational>;

impl<T: Scalar> ChannelChoi<T> {
    /// `choi` must list the output subsystems first, then the inputs.
    pub fn new(choi: LabeledOperator<T>, out_labels: Vec<String>, in_labels: Vec<String>) -> Result<Self> {
        let expected: Vec<&str> = out_labels.iter().chain(&in_labels).map(String::as_str).collect();
        if choi.shape().labels() != expected {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix on {} does not list outputs {out_labels:?} then inputs {in_labels:?}",
                choi.shape()
            )));
        }
        Ok(Self { choi, out_labels, in_labels })
    }

    /// Single-use channel from a row-major `(out·in)²` matrix.
    pub fn from_matrix(in_dim: usize, out_dim: usize, data: Vec<T>) -> Result<Self> {
        let shape = SystemShape::new([(OUT, out_dim), (IN, in_dim)])?;
        Self::new(LabeledOperator::new(shape, data)?, vec![OUT.into()], vec![IN.into()])
    }

    pub fn choi(&self) -> &LabeledOperator<T> {
        &self.choi
    }

    pub fn out_labels(&self) -> Vec<&str> {
        self.out_labels.iter().map(String::as_str).collect()
    }

    pub fn in_labels(&self) -> Vec<&str> {
        self.in_labels.iter().map(String::as_str).collect()
    }

    pub fn in_dim(&self) -> usize {
        self.in_labels.iter().map(|l| self.choi.shape().dim_of(l).unwrap_or(1)).product()
    }

    pub fn out_dim(&self) -> usize {
        self.out_labels.iter().map(|l| self.choi.shape().dim_of(l).unwrap_or(1)).product()
    }

    /// The Choi matrix on a single `out ⊗ in` pair.
    pub fn flat(&self) -> LabeledOperator<T> {
        let shape = SystemShape::new([(OUT, self.out_dim()), (IN, self.in_dim())])
            .expect("two distinct positive-dimension labels");
        self.choi.reshape(shape).expect("flattening keeps the total dimension")
    }

    pub fn flattened(&self) -> Self {
        Self { choi: self.flat(), out_labels: vec![OUT.into()], in_labels: vec![IN.into()] }
    }

    /// `N/in_dim`, the normalized Choi state.
    pub fn choi_state(&self) -> LabeledOperator<T> {
        self.choi.scale(&T::from_ratio(1, self.in_dim() as i64))
    }

    /// Applies the channel to `x`, which must carry the channel's input
    /// labels; other subsystems of `x` pass through.
    pub fn apply(&self, x: &LabeledOperator<T>) -> Result<LabeledOperator<T>> {
        let ins = self.in_labels();
        for l in &ins {
            let (dx, dc) = (x.shape().dim_of(l)?, self.choi.shape().dim_of(l)?);
            if dx != dc {
                return Err(Error::DimensionMismatch(format!("input {l:?}: {dx} vs {dc}")));
            }
        }
        let xt = x.partial_transpose(&ins)?;
        self.choi.matmul(&xt)?.partial_trace(&ins)
    }

    /// Applies the channel to a plain `in_dim x in_dim` matrix.
    pub fn apply_matrix(&self, x: &[T]) -> Result<Vec<T>> {
        let flat = self.flattened();
        let x = LabeledOperator::new(SystemShape::single(IN, self.in_dim()), x.to_vec())?;
        Ok(flat.apply(&x)?.into_data())
    }

    /// `Tr_out N`, which equals the identity for trace-preserving maps.
    pub fn output_trace(&self) -> Result<LabeledOperator<T>> {
        self.choi.partial_trace(&self.out_labels())
    }

    pub fn tensor_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("tensor power needs at least one use".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let tag = |labels: &[String], i: usize| -> Vec<String> {
            labels.iter().map(|l| format!("{l}.{i}")).collect()
        };
        let copy = |i: usize| -> Result<LabeledOperator<T>> {
            let mut op = self.choi.clone();
            for l in self.out_labels.iter().chain(&self.in_labels) {
                op = op.relabel(l, &format!("{l}.{i}"))?;
            }
            Ok(op)
        };
        let mut acc = copy(1)?;
        for i in 2..=k {
            acc = acc.tensor(&copy(i)?)?;
        }
        let outs: Vec<String> = (1..=k).flat_map(|i| tag(&self.out_labels, i)).collect();
        let ins: Vec<String> = (1..=k).flat_map(|i| tag(&self.in_labels, i)).collect();
        let order: Vec<&str> = outs.iter().chain(&ins).map(String::as_str).collect();
        Self::new(acc.permute(&order)?, outs, ins)
    }

    fn square_dim(&self) -> Result<usize> {
        let (i, o) = (self.in_dim(), self.out_dim());
        if i != o {
            return Err(Error::DimensionMismatch(format!("channel maps dimension {i} to {o}")));
        }
        Ok(i)
    }

    /// `K⁻² ⟨Φ|N|Φ⟩` with `|Φ⟩ = Σ_i |ii⟩`.
    pub fn fidelity(&self) -> Result<T> {
        let k = self.square_dim()?;
        let flat = self.flat();
        let mut acc = T::zero();
        for i in 0..k {
            for j in 0..k {
                acc = acc + flat.get(i * k + i, j * k + j).clone();
            }
        }
        Ok(acc * T::from_ratio(1, (k * k) as i64))
    }

    /// Average probability that a basis state `|k⟩` comes out as `|k⟩`.
    pub fn success_probability(&self) -> Result<T> {
        let k = self.square_dim()?;
        let flat = self.flat();
        let mut acc = T::zero();
        for i in 0..k {
            acc = acc + flat.get(i * k + i, i * k + i).clone();
        }
        Ok(acc * T::from_ratio(1, k as i64))
    }

    /// Choi matrix of `after ∘ self`.
    pub fn then(&self, after: &ChannelChoi<T>) -> Result<Self> {
        if after.in_dim() != self.out_dim() {
            return Err(Error::DimensionMismatch(format!(
                "composing a channel with output {} into one with input {}",
                self.out_dim(),
                after.in_dim()
            )));
        }
        let first = self.flat().relabel(OUT, "mid")?;
        let second = after.flat().relabel(IN, "mid")?;
        let out = second.matmul(&first.partial_transpose(&["mid"])?)?.partial_trace(&["mid"])?;
        Self::new(out.permute(&[OUT, IN])?, vec![OUT.into()], vec![IN.into()])
    }
}

impl ChannelChoi<Complex64> {
    /// Complete positivity and trace preservation within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let asym = self.choi.asymmetry();
        if asym > tol {
            return Err(Error::InvalidChannel(format!("Choi matrix is not Hermitian (asymmetry {asym:e})")));
        }
        let min = self.choi.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidChannel(format!("Choi matrix has eigenvalue {min:e}")));
        }
        let tp = self.trace_preservation_residual()?;
        if tp > tol {
            return Err(Error::InvalidChannel(format!("Tr_out N differs from I_in by {tp:e}")));
        }
        Ok(())
    }

    pub fn trace_preservation_residual(&self) -> Result<f64> {
        let t = self.output_trace()?;
        let id = Operator::identity(t.shape().clone());
        Ok(t.sub(&id)?.max_abs())
    }

    pub fn is_horodecki(&self, tol: f64) -> Result<bool> {
        Ok(self.ppt_min_eigenvalue()? >= -tol)
    }

    pub fn ppt_min_eigenvalue(&self) -> Result<f64> {
        Ok(self.choi.partial_transpose(&self.out_labels())?.min_eigenvalue())
    }

    pub fn fidelity_f64(&self) -> Result<f64> {
        Ok(self.fidelity()?.re)
    }

    pub fn success_probability_f64(&self) -> Result<f64> {
        Ok(self.success_probability()?.re)
    }
}

impl ChannelChoi<BigRational> {
    pub fn to_complex(&self) -> ChannelChoi {
        ChannelChoi {
            choi: self.choi.to_complex(),
            out_labels: self.out_labels.clone(),
            in_labels: self.in_labels.clone(),
        }
    }

    pub fn validate_exact(&self) -> Result<()> {
        if !self.choi.is_psd_exact() {
            return Err(Error::InvalidChannel("Choi matrix is not positive semidefinite".into()));
        }
        let t = self.output_trace()?;
        if t != RationalOperator::identity(t.shape().clone()) {
            return Err(Error::InvalidChannel("Choi matrix is not trace preserving".into()));
        }
        Ok(())
    }

    pub fn is_horodecki_exact(&self) -> Result<bool> {
        Ok(self.choi.partial_transpose(&self.out_labels())?.is_psd_exact())
    }
}

fn single_use<T: Scalar>(op: LabeledOperator<T>) -> ChannelChoi<T> {
    ChannelChoi::new(op, vec![OUT.into()], vec![IN.into()]).expect("constructors label outputs then inputs")
}

fn check_dim(d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(Error::InvalidArgument(format!("dimension must be at least {min}, got {d}")));
    }
    Ok(())
}

pub fn identity_channel<T: Scalar>(d: usize) -> Result<ChannelChoi<T>> {
    check_dim(d, 1)?;
    Ok(single_use(unnormalized_max_entangled(d, OUT, IN)?))
}

/// Replaces every input with `I/d`.
pub fn completely_depolarizing<T: Scalar>(d: usize) -> Result<ChannelChoi<T>> {
    check_dim(d, 1)?;
    let shape = SystemShape::pair(OUT, IN, d)?;
    Ok(single_use(LabeledOperator::identity(shape).scale(&T::from_ratio(1, d as i64))))
}

/// Measures in the computational basis and reprepares the outcome.
pub fn dephasing<T: Scalar>(d: usize) -> Result<ChannelChoi<T>> {
    check_dim(d, 1)?;
    let shape = SystemShape::pair(OUT, IN, d)?;
    Ok(single_use(LabeledOperator::from_fn(shape, |r, c| {
        if r == c && r % (d + 1) == 0 {
            T::one()
        } else {
            T::zero()
        }
    })))
}

/// Choi matrix `d·[(1-α) S/Tr S + α A/Tr A]`.
pub fn werner_holevo(d: usize, alpha: &BigRational) -> Result<RationalChannel> {
    check_dim(d, 2)?;
    if *alpha < BigRational::zero() || *alpha > BigRational::one() {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1]")));
    }
    let (s, a) = sym_antisym::<BigRational>(d, OUT, IN)?;
    let di = d as i64;
    let ws = (int(1) - alpha) * frac(2, di + 1);
    let wa = alpha * frac(2, di - 1);
    Ok(single_use(s.scale(&ws).add(&a.scale(&wa))?))
}

fn mix<T: Scalar>(a: LabeledOperator<T>, b: LabeledOperator<T>, weight: T) -> Result<LabeledOperator<T>> {
    a.scale(&weight).add(&b.scale(&(T::one() - weight)))
}

fn depolarizing_weight_f64(d: usize, f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidArgument(format!("fidelity {f} outside [0, 1]")));
    }
    let d2 = (d * d) as f64;
    Ok(if d == 1 { 1.0 } else { (d2 * f - 1.0) / (d2 - 1.0) })
}

/// The channel `f·id + (1-f)·(twirl complement)` with channel fidelity `f`.
pub fn depolarizing(d: usize, f: f64) -> Result<ChannelChoi> {
    check_dim(d, 1)?;
    let w = depolarizing_weight_f64(d, f)?;
    let op = mix(
        identity_channel::<Complex64>(d)?.choi,
        completely_depolarizing::<Complex64>(d)?.choi,
        Complex64::new(w, 0.0),
    )?;
    Ok(single_use(op))
}

pub fn depolarizing_exact(d: usize, f: &BigRational) -> Result<RationalChannel> {
    check_dim(d, 2)?;
    if *f < BigRational::zero() || *f > BigRational::one() {
        return Err(Error::InvalidArgument(format!("fidelity {f} outside [0, 1]")));
    }
    let d2 = int((d * d) as i64);
    let w = (&d2 * f - int(1)) / (d2 - int(1));
    let op = mix(identity_channel(d)?.choi, completely_depolarizing(d)?.choi, w)?;
    Ok(single_use(op))
}

/// Classical channel keeping each basis message with probability `p` and
/// spreading the rest uniformly.
pub fn symmetric_classical(d: usize, p: f64) -> Result<ChannelChoi> {
    check_dim(d, 2)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("success probability {p} outside [0, 1]")));
    }
    let w = (d as f64 * p - 1.0) / (d as f64 - 1.0);
    let op = mix(
        dephasing::<Complex64>(d)?.choi,
        completely_depolarizing::<Complex64>(d)?.choi,
        Complex64::new(w, 0.0),
    )?;
    Ok(single_use(op))
}

pub fn symmetric_classical_exact(d: usize, p: &BigRational) -> Result<RationalChannel> {
    check_dim(d, 2)?;
    if *p < BigRational::zero() || *p > BigRational::one() {
        return Err(Error::InvalidArgument(format!("success probability {p} outside [0, 1]")));
    }
    let di = int(d as i64);
    let w = (&di * p - int(1)) / (di - int(1));
    let op = mix(dephasing(d)?.choi, completely_depolarizing(d)?.choi, w)?;
    Ok(single_use(op))
}

/// Operator norm of `Choi(N∘𝒰) - Choi(𝒱∘N)` where `𝒰` conjugates by `u`
/// and `𝒱` by `ū`. Vanishes for Werner-Holevo channels.
pub fn covariance_residual(n: &ChannelChoi, u: &[Complex64]) -> Result<f64> {
    let d = n.in_dim();
    if n.out_dim() != d || u.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} unitary for a channel {} -> {}",
            (u.len() as f64).sqrt(),
            (u.len() as f64).sqrt(),
            d,
            n.out_dim()
        )));
    }
    let flat = n.flat();
    let on_in = |m: &dyn Fn(usize, usize) -> Complex64| Operator::from_fn(SystemShape::single(IN, d), m);
    let on_out = |m: &dyn Fn(usize, usize) -> Complex64| Operator::from_fn(SystemShape::single(OUT, d), m);
    let ut = |r: usize, c: usize| u[c * d + r];
    let ubar = |r: usize, c: usize| u[r * d + c].conj();
    let lhs = on_in(&ut).matmul(&flat)?.matmul(&on_in(&ubar))?;
    let rhs = on_out(&ubar).matmul(&flat)?.matmul(&on_out(&ut))?;
    Ok(lhs.sub(&rhs)?.operator_norm())
}

/// Haar-random unitary from the Gram-Schmidt (QR) factor of a complex
/// Gaussian matrix; row-major.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| (0..d).map(|_| gaussian(rng)).collect())
        .collect();
    for j in 0..d {
        for k in 0..j {
            let proj: Complex64 = (0..d).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..d {
                let v = cols[k][i];
                cols[j][i] -= proj * v;
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut out = vec![Complex64::zero(); d * d];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            out[i * d + j] = *v;
        }
    }
    out
}

fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random channel: a Wishart Choi matrix rescaled on the input so that it
/// is trace preserving.
pub fn random_channel<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Result<ChannelChoi> {
    let n = in_dim * out_dim;
    let g: Vec<Complex64> = (0..n * n).map(|_| gaussian(rng)).collect();
    let shape = SystemShape::new([(OUT, out_dim), (IN, in_dim)])?;
    let g = Operator::new(shape, g)?;
    let p = g.matmul(&g.adjoint())?.symmetrized();
    let t = p.partial_trace(&[OUT])?;
    let inv_sqrt = t.spectral_map(|v| 1.0 / v.sqrt());
    let choi = inv_sqrt.matmul(&p)?.matmul(&inv_sqrt)?.permute(&[OUT, IN])?.symmetrized();
    ChannelChoi::new(choi, vec![OUT.into()], vec![IN.into()])
}

pub const ALICE_OUT: &str = "alice_out";
pub const BOB_OUT: &str = "bob_out";
pub const ALICE_IN: &str = "alice_in";
pub const BOB_IN: &str = "bob_in";

/// A bipartite operation with Choi matrix on
/// `alice_out ⊗ bob_out ⊗ alice_in ⊗ bob_in`. As a code, Alice's input is
/// the message, Alice's output feeds the channel, Bob's input is the channel
/// output and Bob's output is the decoded message.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteChoi<T = Complex64> {
    choi: LabeledOperator<T>,
}

pub type RationalBipartite = BipartiteChoi<BigRational>;

/// Residuals of the two non-signalling marginal conditions and of the PPT
/// condition.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteClasses {
    pub bob_to_alice_ns: f64,
    pub alice_to_bob_ns: f64,
    pub ppt_min_eigenvalue: f64,
}

impl BipartiteClasses {
    pub fn holds(&self, tol: f64) -> (bool, bool, bool) {
        (self.bob_to_alice_ns <= tol, self.alice_to_bob_ns <= tol, self.ppt_min_eigenvalue >= -tol)
    }
}

impl<T: Scalar> BipartiteChoi<T> {
    pub fn new(choi: LabeledOperator<T>) -> Result<Self> {
        let labels = choi.shape().labels();
        if labels != [ALICE_OUT, BOB_OUT, ALICE_IN, BOB_IN] {
            return Err(Error::DimensionMismatch(format!(
                "bipartite Choi matrix must be on alice_out ⊗ bob_out ⊗ alice_in ⊗ bob_in, got {}",
                choi.shape()
            )));
        }
        Ok(Self { choi })
    }

    pub fn choi(&self) -> &LabeledOperator<T> {
        &self.choi
    }

    pub fn dim(&self, label: &str) -> usize {
        self.choi.shape().dim_of(label).unwrap_or(0)
    }

    /// Difference between Alice's output marginal and the one obtained by
    /// discarding Bob's input: `Tr_{B'} Z - (Tr_{B'B} Z)/d_B ⊗ I_B`.
    pub fn bob_to_alice_gap(&self) -> Result<LabeledOperator<T>> {
        self.marginal_gap(BOB_OUT, BOB_IN)
    }

    pub fn alice_to_bob_gap(&self) -> Result<LabeledOperator<T>> {
        self.marginal_gap(ALICE_OUT, ALICE_IN)
    }

    fn marginal_gap(&self, out: &str, input: &str) -> Result<LabeledOperator<T>> {
        let partial = self.choi.partial_trace(&[out])?;
        let din = self.dim(input);
        let reduced = partial
            .partial_trace(&[input])?
            .scale(&T::from_ratio(1, din as i64))
            .tensor(&LabeledOperator::identity(SystemShape::single(input, din)))?
            .permute(&partial.shape().labels())?;
        partial.sub(&reduced)
    }

    pub fn bob_transpose(&self) -> Result<LabeledOperator<T>> {
        self.choi.partial_transpose(&[BOB_OUT, BOB_IN])
    }
}

impl BipartiteChoi<Complex64> {
    pub fn classes(&self) -> Result<BipartiteClasses> {
        Ok(BipartiteClasses {
            bob_to_alice_ns: self.bob_to_alice_gap()?.max_abs(),
            alice_to_bob_ns: self.alice_to_bob_gap()?.max_abs(),
            ppt_min_eigenvalue: self.bob_transpose()?.min_eigenvalue(),
        })
    }
}

impl BipartiteChoi<BigRational> {
    pub fn to_complex(&self) -> BipartiteChoi {
        BipartiteChoi { choi: self.choi.to_complex() }
    }
}

/// Two-qubit operation: Bob measures his input getting `b`, sends `b` and a
/// fresh uniform bit `r` to Alice and outputs `r`; Alice applies a Hadamard
/// iff `b = 1`, measures getting `a`, and outputs `a ⊕ r`.
pub fn superactivation_z() -> RationalBipartite {
    // Kraus operators (1/√2)|a⊕r⟩|r⟩ (⟨a|H^b ⊗ ⟨b|). Their Choi vectors
    // have entries (1/√2)·⟨a|H^b|i⟩, so every outer product is rational.
    let shape = SystemShape::new([(ALICE_OUT, 2), (BOB_OUT, 2), (ALICE_IN, 2), (BOB_IN, 2)])
        .expect("four distinct qubit labels");
    let mut z = RationalOperator::zeros(shape);
    let index = |ao: usize, bo: usize, ai: usize, bi: usize| ((ao * 2 + bo) * 2 + ai) * 2 + bi;
    for b in 0..2 {
        for r in 0..2 {
            for a in 0..2 {
                // Squared amplitudes times sign: ⟨a|H^b|i⟩⟨a|H^b|j⟩.
                let amp = |i: usize| -> (i64, bool) {
                    if b == 0 {
                        (if i == a { 1 } else { 0 }, false)
                    } else {
                        (if a & i == 1 { -1 } else { 1 }, true)
                    }
                };
                let row_out = (a ^ r, r);
                for i in 0..2 {
                    for j in 0..2 {
                        let (si, hi) = amp(i);
                        let (sj, _) = amp(j);
                        if si * sj == 0 {
                            continue;
                        }
                        let weight = if hi { frac(si * sj, 4) } else { frac(si * sj, 2) };
                        let ri = index(row_out.0, row_out.1, i, b);
                        let ci = index(row_out.0, row_out.1, j, b);
                        let cur = z.get(ri, ci).clone();
                        z.set(ri, ci, cur + weight);
                    }
                }
            }
        }
    }
    BipartiteChoi { choi: z }
}
