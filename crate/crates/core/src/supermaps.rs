//! Deterministic supermaps on channels: unitary twirl, permutation
//! symmetrization, qudit teleportation and dense coding.
//!
//! Messages of a `d²`-dimensional classical channel are indexed by
//! `m = a·d + b` and paired with the Weyl operator `W_m = X^a Z^b`, where
//! `X|j⟩ = |j+1⟩` and `Z|j⟩ = ω^j |j⟩`.

use std::f64::consts::PI;

use itertools::Itertools;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use crate::channel::{ChannelChoi, IN, OUT};
use crate::error::{Error, Result};
use crate::operator::{max_entangled, LabeledOperator, Scalar, SystemShape};

/// Scalars that can hold the Weyl phases they are asked for.
pub trait WeylScalar: Scalar {
    /// `exp(2πi t/d)`, or `None` if this type cannot represent it.
    fn root_of_unity(t: usize, d: usize) -> Option<Self>;
}

impl WeylScalar for Complex64 {
    fn root_of_unity(t: usize, d: usize) -> Option<Self> {
        let t = t % d;
        Some(match t {
            0 => Complex64::one(),
            _ if 2 * t == d => -Complex64::one(),
            _ => Complex64::from_polar(1.0, 2.0 * PI * t as f64 / d as f64),
        })
    }
}

impl WeylScalar for BigRational {
    fn root_of_unity(t: usize, d: usize) -> Option<Self> {
        let t = t % d;
        match t {
            0 => Some(BigRational::one()),
            _ if 2 * t == d => Some(-BigRational::one()),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Supermap {
    Twirl,
    Permute,
    Teleport,
    DenseCode,
}

impl Supermap {
    pub fn apply<T: WeylScalar>(self, n: &ChannelChoi<T>) -> Result<ChannelChoi<T>> {
        match self {
            Supermap::Twirl => Ok(twirl_channel(n)?.0),
            Supermap::Permute => Ok(permutation_symmetrize(n)?.0),
            Supermap::Teleport => teleport(n),
            Supermap::DenseCode => dense_code(n),
        }
    }
}

fn square_dim<T: Scalar>(n: &ChannelChoi<T>) -> Result<usize> {
    let (i, o) = (n.in_dim(), n.out_dim());
    if i != o {
        return Err(Error::DimensionMismatch(format!("channel maps dimension {i} to {o}")));
    }
    Ok(i)
}

fn message_root(dim: usize) -> Result<usize> {
    let d = (1..=dim).find(|d| d * d >= dim).unwrap_or(1);
    if d * d != dim || d < 2 {
        return Err(Error::DimensionMismatch(format!("{dim} messages are not d² for a qudit d ≥ 2")));
    }
    Ok(d)
}

/// `W_{a,b} = X^a Z^b`, row-major.
pub fn weyl<T: WeylScalar>(d: usize, a: usize, b: usize) -> Result<Vec<T>> {
    let mut w = vec![T::zero(); d * d];
    for j in 0..d {
        let phase = T::root_of_unity(b * j, d).ok_or_else(|| {
            Error::InvalidArgument(format!("phase ω^{} for d = {d} is not representable exactly", b * j % d))
        })?;
        w[((j + a) % d) * d + j] = phase;
    }
    Ok(w)
}

/// Choi matrix of `X ↦ U X U†`.
fn unitary_channel<T: Scalar>(u: &[T], d: usize) -> Result<ChannelChoi<T>> {
    let data = (0..d * d)
        .flat_map(|r| {
            let (i, j) = (r / d, r % d);
            (0..d * d).map(move |c| {
                let (i2, j2) = (c / d, c % d);
                u[i * d + j].clone() * u[i2 * d + j2].conj()
            })
        })
        .collect();
    ChannelChoi::from_matrix(d, d, data)
}

/// `P(j | i)` from the Choi diagonal, indexed `[i][j]`.
fn transition_probabilities<T: Scalar>(n: &ChannelChoi<T>) -> Result<Vec<Vec<T>>> {
    let d = square_dim(n)?;
    let flat = n.flat();
    Ok((0..d).map(|i| (0..d).map(|j| flat.get(j * d + i, j * d + i).clone()).collect()).collect())
}

fn classical_channel<T: Scalar>(p: &[Vec<T>]) -> Result<ChannelChoi<T>> {
    let d = p.len();
    let shape = SystemShape::new([(OUT, d), (IN, d)])?;
    let op = LabeledOperator::from_fn(shape, |r, c| {
        if r == c {
            let (j, i) = (r / d, r % d);
            p[i][j].clone()
        } else {
            T::zero()
        }
    });
    ChannelChoi::new(op, vec![OUT.into()], vec![IN.into()])
}

/// Projects the Choi matrix onto `span{φ, I − φ}`, giving the depolarizing
/// channel with the same channel fidelity `f`, which is returned too.
pub fn twirl_channel<T: Scalar>(n: &ChannelChoi<T>) -> Result<(ChannelChoi<T>, T)> {
    let d = square_dim(n)?;
    let f = n.fidelity()?;
    if d == 1 {
        return Ok((n.flattened(), f));
    }
    let flat = n.flat();
    let phi = max_entangled::<T>(d, OUT, IN)?;
    let rest = LabeledOperator::identity(phi.shape().clone()).sub(&phi)?;
    let on_phi = phi.trace_product(&flat)?;
    let on_rest = rest.trace_product(&flat)? * T::from_ratio(1, (d * d - 1) as i64);
    let op = phi.scale(&on_phi).add(&rest.scale(&on_rest))?;
    Ok((ChannelChoi::new(op, vec![OUT.into()], vec![IN.into()])?, f))
}

/// Dephases input and output and averages over relabelings of the basis,
/// giving the symmetric classical channel with the same success
/// probability `p`, which is returned too.
pub fn permutation_symmetrize<T: Scalar>(n: &ChannelChoi<T>) -> Result<(ChannelChoi<T>, T)> {
    let d = square_dim(n)?;
    let p = n.success_probability()?;
    let probs = transition_probabilities(n)?;
    let averaged: Vec<Vec<T>> = if d <= 5 {
        let perms: Vec<Vec<usize>> = (0..d).permutations(d).collect();
        let weight = T::from_ratio(1, perms.len() as i64);
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let total = perms.iter().fold(T::zero(), |acc, s| acc + probs[s[i]][s[j]].clone());
                        total * weight.clone()
                    })
                    .collect()
            })
            .collect()
    } else {
        let off = (T::one() - p.clone()) * T::from_ratio(1, (d - 1) as i64);
        (0..d).map(|i| (0..d).map(|j| if i == j { p.clone() } else { off.clone() }).collect()).collect()
    };
    Ok((classical_channel(&averaged)?, p))
}

/// Teleports a qudit using `n` (on `d²` messages) to carry the Bell
/// outcome. After outcome `m` and correction for received `m'`, the qudit
/// has undergone `W_{m'} W_m† ∝ W_{m'−m}`.
pub fn teleport<T: WeylScalar>(n: &ChannelChoi<T>) -> Result<ChannelChoi<T>> {
    let dim = square_dim(n)?;
    let d = message_root(dim)?;
    let probs = transition_probabilities(n)?;
    let mut weights = vec![T::zero(); dim];
    for m in 0..dim {
        for m2 in 0..dim {
            let (a, b) = (m / d, m % d);
            let (a2, b2) = (m2 / d, m2 % d);
            let k = ((a2 + d - a) % d) * d + (b2 + d - b) % d;
            weights[k] = weights[k].clone() + probs[m][m2].clone();
        }
    }
    let scale = T::from_ratio(1, dim as i64);
    let shape = SystemShape::new([(OUT, d), (IN, d)])?;
    let mut acc = LabeledOperator::zeros(shape);
    for (k, q) in weights.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let u = unitary_channel(&weyl::<T>(d, k / d, k % d)?, d)?;
        acc = acc.add(&u.choi().scale(&(q.clone() * scale.clone())))?;
    }
    ChannelChoi::new(acc, vec![OUT.into()], vec![IN.into()])
}

/// Sends one of `d²` messages by applying `W_m` to half of a maximally
/// entangled pair, passing that half through `n`, and measuring in the
/// Bell basis `{(W_{m'} ⊗ I)|Φ⟩}`.
pub fn dense_code<T: WeylScalar>(n: &ChannelChoi<T>) -> Result<ChannelChoi<T>> {
    let d = square_dim(n)?;
    let dim = d * d;
    let bells: Vec<ChannelChoi<T>> = (0..dim)
        .map(|m| unitary_channel(&weyl::<T>(d, m / d, m % d)?, d))
        .collect::<Result<_>>()?;
    let flat = n.flattened();
    let norm = T::from_ratio(1, dim as i64);
    let probs: Vec<Vec<T>> = bells
        .iter()
        .map(|encode| {
            let sent = encode.then(&flat)?;
            bells.iter().map(|bell| Ok(bell.choi().trace_product(sent.choi())? * norm.clone())).collect()
        })
        .collect::<Result<_>>()?;
    classical_channel(&probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        dephasing, depolarizing, depolarizing_exact, identity_channel, random_channel, symmetric_classical,
        symmetric_classical_exact, werner_holevo,
    };
    use crate::rational::{frac, int};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = BigRational;

    fn diff(a: &ChannelChoi, b: &ChannelChoi) -> f64 {
        a.flat().max_diff_by(&b.flat(), |v| v.norm()).unwrap()
    }

    #[test]
    fn twirl_fixed_points() {
        let dep = depolarizing_exact(3, &frac(2, 5)).unwrap();
        assert_eq!(twirl_channel(&dep).unwrap(), (dep.clone(), frac(2, 5)));
        let id = identity_channel::<Q>(3).unwrap();
        assert_eq!(twirl_channel(&id).unwrap().0, id);
        let (tw, f) = twirl_channel(&werner_holevo(3, &int(1)).unwrap()).unwrap();
        assert_eq!(f, int(0));
        assert_eq!(tw, depolarizing_exact(3, &int(0)).unwrap());
    }

    #[test]
    fn permutation_fixed_points() {
        let c = dephasing::<Q>(3).unwrap();
        assert_eq!(permutation_symmetrize(&c).unwrap(), (c.clone(), int(1)));
        assert_eq!(permutation_symmetrize(&identity_channel::<Q>(3).unwrap()).unwrap().0, c);
        let f = frac(1, 3);
        let (out, p) = permutation_symmetrize(&depolarizing_exact(2, &f).unwrap()).unwrap();
        let expected = &f + (int(1) - &f) * frac(1, 3);
        assert_eq!(p, expected);
        assert_eq!(out, symmetric_classical_exact(2, &expected).unwrap());
    }

    #[test]
    fn permutation_closed_form_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = random_channel(6, 6, &mut rng).unwrap();
        let (out, p) = permutation_symmetrize(&n).unwrap();
        assert!(diff(&out, &symmetric_classical(6, p.re).unwrap()) < 1e-12);
    }

    #[test]
    fn teleport_identity_exact() {
        for d in [2, 3] {
            let c = symmetric_classical_exact(d * d, &int(1)).unwrap();
            assert_eq!(teleport(&c).unwrap(), identity_channel(d).unwrap());
        }
    }

    #[test]
    fn teleport_then_twirl_is_depolarizing() {
        for lambda in [frac(1, 4), frac(2, 3)] {
            let c = symmetric_classical_exact(4, &lambda).unwrap();
            let (tw, f) = twirl_channel(&teleport(&c).unwrap()).unwrap();
            assert_eq!(f, lambda);
            assert_eq!(tw, depolarizing_exact(2, &lambda).unwrap());
        }
        let c = symmetric_classical(9, 1.0 / 9.0).unwrap();
        let (tw, _) = twirl_channel(&teleport(&c).unwrap()).unwrap();
        assert!(diff(&tw, &depolarizing(3, 1.0 / 9.0).unwrap()) < 1e-12);
    }

    #[test]
    fn dense_coding() {
        let out = dense_code(&identity_channel::<Q>(2).unwrap()).unwrap();
        assert_eq!(out, symmetric_classical_exact(4, &int(1)).unwrap());
        let x = depolarizing_exact(2, &frac(1, 4)).unwrap();
        let (pd, _) = permutation_symmetrize(&dense_code(&x).unwrap()).unwrap();
        assert_eq!(pd, symmetric_classical_exact(4, &frac(1, 4)).unwrap());
        assert!(dense_code(&identity_channel::<Q>(3).unwrap()).is_err());
        let out = dense_code(&identity_channel::<Complex64>(3).unwrap()).unwrap();
        assert!(diff(&out, &symmetric_classical(9, 1.0).unwrap()) < 1e-12);
    }

    #[test]
    fn outputs_are_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let m = random_channel(4, 4, &mut rng).unwrap();
            let n = random_channel(2, 2, &mut rng).unwrap();
            for s in [Supermap::Twirl, Supermap::Permute, Supermap::Teleport] {
                s.apply(&m).unwrap().validate(1e-10).unwrap();
            }
            Supermap::DenseCode.apply(&n).unwrap().validate(1e-10).unwrap();
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        let c = symmetric_classical(3, 0.5).unwrap();
        assert!(matches!(teleport(&c), Err(Error::DimensionMismatch(_))));
    }
}
