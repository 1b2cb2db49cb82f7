//! Dense operators on tensor products of labeled subsystems.
//!
//! Subsystem order is fixed when an operator is built and row-major flat
//! indices put the first subsystem most significant. Binary operations on
//! operators with different subsystem sets pad each side with identities and
//! reorder into a common order first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;

pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn conj(&self) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
}

impl Scalar for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
}

impl Scalar for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        crate::rational::frac(num, den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemShape {
    systems: Vec<(String, usize)>,
}

impl SystemShape {
    pub fn new<S: Into<String>>(systems: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let systems: Vec<(String, usize)> = systems.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (i, (label, dim)) in systems.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::DimensionMismatch(format!("subsystem {label:?} has dimension 0")));
            }
            if systems[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::LabelCollision(label.clone()));
            }
        }
        Ok(Self { systems })
    }

    pub fn single(label: &str, dim: usize) -> Self {
        Self::new([(label, dim)]).expect("one positive-dimension subsystem is always valid")
    }

    pub fn pair(left: &str, right: &str, dim: usize) -> Result<Self> {
        Self::new([(left, dim), (right, dim)])
    }

    pub fn empty() -> Self {
        Self { systems: Vec::new() }
    }

    pub fn systems(&self) -> &[(String, usize)] {
        &self.systems
    }

    pub fn labels(&self) -> Vec<&str> {
        self.systems.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.systems.iter().map(|(_, d)| *d).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.systems.iter().map(|(_, d)| *d).product()
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.systems.iter().position(|(l, _)| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|p| self.systems[p].1)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn concat(&self, other: &SystemShape) -> Result<SystemShape> {
        SystemShape::new(self.systems.iter().chain(&other.systems).cloned())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.systems.len()];
        for i in (0..self.systems.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.systems[i + 1].1;
        }
        strides
    }

    fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.position(l).ok_or_else(|| Error::UnknownLabel(l.to_string()))?;
            if out.contains(&p) {
                return Err(Error::LabelCollision(l.to_string()));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Flat offsets for every joint index of the subsystems at `positions`,
    /// enumerated with the first listed position most significant.
    fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &p in positions {
            let (dim, stride) = (self.systems[p].1, strides[p]);
            out = out
                .iter()
                .flat_map(|&base| (0..dim).map(move |i| base + i * stride))
                .collect();
        }
        out
    }
}

impl fmt::Display for SystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.systems.iter().map(|(l, d)| format!("{l}:{d}")).collect();
        write!(f, "[{}]", parts.join(" ⊗ "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledOperator<T = Complex64> {
    shape: SystemShape,
    data: Vec<T>,
}

pub type Operator = LabeledOperator<Complex64>;
pub type RationalOperator = LabeledOperator<BigRational>;

impl<T: Scalar> LabeledOperator<T> {
    pub fn new(shape: SystemShape, data: Vec<T>) -> Result<Self> {
        let d = shape.total_dim();
        if data.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {d}x{d} operator on {shape}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn from_fn(shape: SystemShape, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let d = shape.total_dim();
        let mut data = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                data.push(f(r, c));
            }
        }
        Self { shape, data }
    }

    pub fn zeros(shape: SystemShape) -> Self {
        Self::from_fn(shape, |_, _| T::zero())
    }

    pub fn identity(shape: SystemShape) -> Self {
        Self::from_fn(shape, |r, c| if r == c { T::one() } else { T::zero() })
    }

    /// Scalar operator on the empty system.
    pub fn scalar(v: T) -> Self {
        Self { shape: SystemShape::empty(), data: vec![v] }
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.dim() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        let d = self.dim();
        self.data[r * d + c] = v;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LabeledOperator<U> {
        LabeledOperator { shape: self.shape.clone(), data: self.data.iter().map(f).collect() }
    }

    pub fn trace(&self) -> T {
        let d = self.dim();
        (0..d).fold(T::zero(), |acc, i| acc + self.data[i * d + i].clone())
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        Self::from_fn(self.shape.clone(), |r, c| self.data[c * d + r].conj())
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim();
        Self::from_fn(self.shape.clone(), |r, c| self.data[c * d + r].clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        let p = self.shape.position(from).ok_or_else(|| Error::UnknownLabel(from.to_string()))?;
        let mut systems = self.shape.systems.clone();
        systems[p].0 = to.to_string();
        Ok(Self { shape: SystemShape::new(systems)?, data: self.data.clone() })
    }

    /// Replaces the subsystem structure with another of equal total dimension.
    pub fn reshape(&self, shape: SystemShape) -> Result<Self> {
        Self::new(shape, self.data.clone())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let shape = self.shape.concat(&other.shape)?;
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut data = vec![T::zero(); d * d];
        for ar in 0..da {
            for ac in 0..da {
                let a = &self.data[ar * da + ac];
                if a.is_zero() {
                    continue;
                }
                for br in 0..db {
                    let row = (ar * db + br) * d + ac * db;
                    for bc in 0..db {
                        data[row + bc] = a.clone() * other.data[br * db + bc].clone();
                    }
                }
            }
        }
        Ok(Self { shape, data })
    }

    pub fn partial_trace(&self, over: &[&str]) -> Result<Self> {
        let traced = self.shape.positions(over)?;
        let kept: Vec<usize> = (0..self.shape.len()).filter(|p| !traced.contains(p)).collect();
        let off_k = self.shape.offsets(&kept);
        let off_t = self.shape.offsets(&traced);
        let shape = SystemShape { systems: kept.iter().map(|&p| self.shape.systems[p].clone()).collect() };
        let (d, dk) = (self.dim(), off_k.len());
        let mut data = Vec::with_capacity(dk * dk);
        for &a in &off_k {
            for &b in &off_k {
                let mut acc = T::zero();
                for &t in &off_t {
                    acc = acc + self.data[(a + t) * d + b + t].clone();
                }
                data.push(acc);
            }
        }
        Ok(Self { shape, data })
    }

    pub fn partial_transpose(&self, over: &[&str]) -> Result<Self> {
        let pos = self.shape.positions(over)?;
        let rest: Vec<usize> = (0..self.shape.len()).filter(|p| !pos.contains(p)).collect();
        let off_p = self.shape.offsets(&pos);
        let off_q = self.shape.offsets(&rest);
        let d = self.dim();
        let mut data = vec![T::zero(); d * d];
        for &ip in &off_p {
            for &iq in &off_q {
                for &jp in &off_p {
                    for &jq in &off_q {
                        data[(ip + iq) * d + jp + jq] = self.data[(jp + iq) * d + ip + jq].clone();
                    }
                }
            }
        }
        Ok(Self { shape: self.shape.clone(), data })
    }

    /// Reorders subsystems; `order` must list every label exactly once.
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.shape.len() {
            return Err(Error::DimensionMismatch(format!(
                "permutation lists {} of {} subsystems",
                order.len(),
                self.shape.len()
            )));
        }
        let pos = self.shape.positions(order)?;
        if pos.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let map = self.shape.offsets(&pos);
        let shape = SystemShape { systems: pos.iter().map(|&p| self.shape.systems[p].clone()).collect() };
        let d = self.dim();
        let mut data = Vec::with_capacity(d * d);
        for &r in &map {
            for &c in &map {
                data.push(self.data[r * d + c].clone());
            }
        }
        Ok(Self { shape, data })
    }

    /// `self ⊗ I` on every subsystem of `target` that `self` lacks, in
    /// `target`'s order.
    pub fn extend_to(&self, target: &SystemShape) -> Result<Self> {
        for (label, dim) in &self.shape.systems {
            let td = target.dim_of(label)?;
            if td != *dim {
                return Err(Error::DimensionMismatch(format!(
                    "subsystem {label:?} has dimension {dim} here and {td} in the target"
                )));
            }
        }
        let missing = SystemShape {
            systems: target.systems.iter().filter(|(l, _)| !self.shape.contains(l)).cloned().collect(),
        };
        let padded = if missing.is_empty() { self.clone() } else { self.tensor(&Self::identity(missing))? };
        padded.permute(&target.labels())
    }

    /// Subsystems of `self` followed by those only `other` has.
    pub fn union_shape(&self, other: &Self) -> Result<SystemShape> {
        let mut systems = self.shape.systems.clone();
        for (label, dim) in &other.shape.systems {
            match self.shape.position(label) {
                Some(p) if self.shape.systems[p].1 != *dim => {
                    return Err(Error::DimensionMismatch(format!(
                        "subsystem {label:?} has dimensions {} and {dim}",
                        self.shape.systems[p].1
                    )))
                }
                Some(_) => {}
                None => systems.push((label.clone(), *dim)),
            }
        }
        SystemShape::new(systems)
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        if self.shape == other.shape {
            return Ok((self.clone(), other.clone()));
        }
        let shape = self.union_shape(other)?;
        Ok((self.extend_to(&shape)?, other.extend_to(&shape)?))
    }

    /// Operator product, padding with identities where systems differ.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let d = a.dim();
        let mut data = vec![T::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = &a.data[i * d + k];
                if aik.is_zero() {
                    continue;
                }
                let row = &b.data[k * d..(k + 1) * d];
                for (j, bkj) in row.iter().enumerate() {
                    if !bkj.is_zero() {
                        data[i * d + j] = data[i * d + j].clone() + aik.clone() * bkj.clone();
                    }
                }
            }
        }
        Ok(Self { shape: a.shape, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let data = a.data.iter().zip(&b.data).map(|(x, y)| f(x, y)).collect();
        Ok(Self { shape: a.shape, data })
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<T> {
        let (a, b) = self.aligned(other)?;
        let d = a.dim();
        let mut acc = T::zero();
        for r in 0..d {
            for c in 0..d {
                let x = &a.data[r * d + c];
                if !x.is_zero() {
                    acc = acc + x.clone() * b.data[c * d + r].clone();
                }
            }
        }
        Ok(acc)
    }

    /// Largest entrywise absolute difference from `other` after alignment,
    /// measured by `norm`.
    pub fn max_diff_by(&self, other: &Self, norm: impl Fn(&T) -> f64) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.data.iter().map(norm).fold(0.0, f64::max))
    }
}

impl LabeledOperator<Complex64> {
    /// Builds a Hermitian operator, symmetrizing `(X + X†)/2` when the
    /// asymmetry is within `1e-12` of the entry scale.
    pub fn hermitian(shape: SystemShape, data: Vec<Complex64>) -> Result<Self> {
        let op = Self::new(shape, data)?;
        let asym = op.asymmetry();
        if asym > 1e-12 * op.max_abs().max(1.0) {
            return Err(Error::NotHermitian(asym));
        }
        Ok(op.symmetrized())
    }

    pub fn from_real(shape: SystemShape, data: &[f64]) -> Result<Self> {
        Self::new(shape, data.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn symmetrized(&self) -> Self {
        let d = self.dim();
        Self::from_fn(self.shape.clone(), |r, c| {
            (self.data[r * d + c] + self.data[c * d + r].conj()) * 0.5
        })
    }

    pub fn asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.data[r * d + c] - self.data[c * d + r].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|v| v.im == 0.0)
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(self.dim(), &self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// `f` applied to the eigenvalues of the Hermitian part.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let data = linalg::hermitian_function(self.dim(), &self.data, f);
        Self { shape: self.shape.clone(), data }
    }

    /// `|X| = sqrt(X†X)` for Hermitian `X`, clipping eigenvalues within
    /// `1e-12` of zero.
    pub fn abs(&self) -> Self {
        self.spectral_map(|v| if v.abs() <= 1e-12 { 0.0 } else { v.abs() })
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.adjoint().matmul(self).expect("an operator aligns with its adjoint");
        gram.symmetrized().max_eigenvalue().max(0.0).sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl LabeledOperator<BigRational> {
    pub fn to_complex(&self) -> Operator {
        self.map(|v| Complex64::new(crate::rational::to_f64(v), 0.0))
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| (r + 1..d).all(|c| self.data[r * d + c] == self.data[c * d + r]))
    }

    /// Exact positive semidefiniteness by symmetric Gaussian elimination.
    pub fn is_psd_exact(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let d = self.dim();
        let mut a: Vec<Vec<BigRational>> = (0..d).map(|r| self.data[r * d..(r + 1) * d].to_vec()).collect();
        for k in 0..d {
            let pivot = a[k][k].clone();
            if pivot.is_negative() {
                return false;
            }
            if pivot.is_zero() {
                if (k + 1..d).any(|j| !a[k][j].is_zero()) {
                    return false;
                }
                continue;
            }
            for i in k + 1..d {
                if a[i][k].is_zero() {
                    continue;
                }
                let factor = &a[i][k] / &pivot;
                for j in k..d {
                    if !a[k][j].is_zero() {
                        let delta = &factor * &a[k][j];
                        a[i][j] -= delta;
                    }
                }
            }
        }
        true
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

/// Unnormalized `|Φ⟩ = Σ_i |ii⟩` projector `Σ_ij |ii⟩⟨jj|` on `left ⊗ right`.
pub fn unnormalized_max_entangled<T: Scalar>(d: usize, left: &str, right: &str) -> Result<LabeledOperator<T>> {
    let shape = SystemShape::pair(left, right, d)?;
    Ok(LabeledOperator::from_fn(shape, |r, c| {
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            T::one()
        } else {
            T::zero()
        }
    }))
}

/// Maximally entangled state `φ = |Φ⟩⟨Φ| / d`.
pub fn max_entangled<T: Scalar>(d: usize, left: &str, right: &str) -> Result<LabeledOperator<T>> {
    Ok(unnormalized_max_entangled::<T>(d, left, right)?.scale(&T::from_ratio(1, d as i64)))
}

pub fn swap<T: Scalar>(d: usize, left: &str, right: &str) -> Result<LabeledOperator<T>> {
    let shape = SystemShape::pair(left, right, d)?;
    Ok(LabeledOperator::from_fn(shape, |r, c| {
        let (a, b) = (r / d, r % d);
        if c == b * d + a {
            T::one()
        } else {
            T::zero()
        }
    }))
}

/// Projectors onto the symmetric and antisymmetric subspaces of `left ⊗ right`.
pub fn sym_antisym<T: Scalar>(
    d: usize,
    left: &str,
    right: &str,
) -> Result<(LabeledOperator<T>, LabeledOperator<T>)> {
    let id = LabeledOperator::<T>::identity(SystemShape::pair(left, right, d)?);
    let sw = swap::<T>(d, left, right)?;
    let half = T::from_ratio(1, 2);
    let s = id.add(&sw)?.scale(&half);
    let a = id.sub(&sw)?.scale(&half);
    Ok((s, a))
}

/// `true` iff the partial transpose over `side` has no eigenvalue below
/// `-tol`. `side` and its complement must both be nonempty.
pub fn is_ppt(x: &Operator, side: &[&str], tol: f64) -> Result<bool> {
    Ok(ppt_min_eigenvalue(x, side)? >= -tol)
}

pub fn ppt_min_eigenvalue(x: &Operator, side: &[&str]) -> Result<f64> {
    x.shape().positions(side)?;
    if side.is_empty() || side.len() >= x.shape().len() {
        return Err(Error::InvalidArgument("a PPT cut needs two nonempty sides".into()));
    }
    Ok(x.partial_transpose(side)?.min_eigenvalue())
}
