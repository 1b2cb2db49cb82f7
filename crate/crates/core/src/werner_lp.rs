//! Exact linear program for the optimal fidelity over `n` uses of a
//! generalized Werner-Holevo channel.
//!
//! Invariance under `U^{⊗n} ⊗ Ū^{⊗n}` and permutations of the uses reduces
//! the code to `Λ = Σ_k x_k E_k`, where `E_k` sums the `n`-fold products of
//! symmetric and antisymmetric projectors with exactly `k` antisymmetric
//! factors. Partial transposition maps `E_j` into the span of the `Υ_i`
//! (products with exactly `i` maximally entangled factors), with matrix `M`,
//! and `g_j` is the trace of one `E_j` factor string over the output side.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::channel::{IN, OUT};
use crate::class::CodeClass;
use crate::code_sdp::RationalPoint;
use crate::error::{Error, Result};
use crate::operator::{max_entangled, sym_antisym, RationalOperator, SystemShape};
use crate::rational::{binomial, floor_pow, ipow, pow};
use crate::simplex::{BasisEntry, PivotRule, RationalLp, RationalLpSolution};

#[derive(Clone, Debug, PartialEq)]
pub struct WernerLp {
    pub d: u64,
    pub n: u64,
    pub alpha: BigRational,
    pub size: BigInt,
    pub class: CodeClass,
    /// Objective weights `c_j` on `x_j`.
    pub objective: Vec<BigRational>,
    pub m: Vec<Vec<BigRational>>,
    pub g: Vec<BigRational>,
    /// Common upper bound `d^{-n}` on every `x_j`.
    pub upper: BigRational,
}

fn two_pow_inv(n: u64) -> BigRational {
    BigRational::new(BigInt::one(), ipow(2, n))
}

/// Partial-transpose expansion matrix; row `i` indexes the `Υ` basis and
/// column `j` the `E` basis.
pub fn m_matrix(n: u64, d: u64) -> Vec<Vec<BigRational>> {
    let scale = two_pow_inv(n);
    let d = d as i64;
    (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for k in 0..=i.min(j) {
                        let term = binomial(n - i, j - k)
                            * binomial(i, k)
                            * ipow(1 + d, i - k)
                            * ipow(1 - d, k);
                        acc += term;
                    }
                    BigRational::from_integer(acc) * &scale
                })
                .collect()
        })
        .collect()
}

pub fn g_vector(n: u64, d: u64) -> Vec<BigRational> {
    let scale = two_pow_inv(n);
    let d = d as i64;
    (0..=n)
        .map(|j| {
            BigRational::from_integer(binomial(n, j) * ipow(d + 1, n - j) * ipow(d - 1, j)) * &scale
        })
        .collect()
}

/// `K_n = floor(c^n)`, the code size at rate `log2 c` after `n` uses.
pub fn rate_schedule(c: &BigRational, n: u64) -> BigInt {
    floor_pow(c, n)
}

pub fn build(d: u64, alpha: &BigRational, n: u64, size: &BigInt, class: CodeClass) -> Result<WernerLp> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {d}")));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("at least one channel use is required".into()));
    }
    if *alpha < BigRational::zero() || *alpha > BigRational::one() {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1]")));
    }
    if *size < BigInt::one() {
        return Err(Error::InvalidArgument(format!("code size must be positive, got {size}")));
    }
    let dn = BigRational::from_integer(ipow(d as i64, n));
    let beta = BigRational::one() - alpha;
    let objective = (0..=n)
        .map(|j| &dn * BigRational::from_integer(binomial(n, j)) * pow(&beta, n - j) * pow(alpha, j))
        .collect();
    Ok(WernerLp {
        d,
        n,
        alpha: alpha.clone(),
        size: size.clone(),
        class,
        objective,
        m: m_matrix(n, d),
        g: g_vector(n, d),
        upper: dn.recip(),
    })
}

impl WernerLp {
    pub fn num_vars(&self) -> usize {
        self.n as usize + 1
    }

    fn k_inv(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.size.clone())
    }

    /// The program exactly as stated, in the variables `x_j`.
    pub fn to_rational_lp(&self) -> RationalLp {
        let mut lp = RationalLp::new(self.objective.clone());
        for j in 0..self.num_vars() {
            lp.set_bounds(j, Some(BigRational::zero()), Some(self.upper.clone()));
        }
        let k_inv = self.k_inv();
        let k2_inv = &k_inv * &k_inv;
        match self.class {
            CodeClass::Ns | CodeClass::Both => {
                lp.add_row(self.g.clone(), Some(k2_inv.clone()), Some(k2_inv))
            }
            CodeClass::EaBound => lp.add_row(self.g.clone(), None, Some(k2_inv)),
            CodeClass::Ppt => {}
        }
        if self.class.has_ppt() {
            let bound = &self.upper * &k_inv;
            for row in &self.m {
                lp.add_row(row.clone(), Some(-bound.clone()), Some(bound.clone()));
            }
        }
        lp
    }

    /// Same program in `u = d^n x` with rows scaled to integer coefficients.
    /// Row `r` of the result is `row_scale[r]` times row `r` of
    /// `to_rational_lp` after substitution.
    fn scaled_lp(&self) -> (RationalLp, Vec<BigRational>) {
        let dn = self.upper.recip();
        let two_n = BigRational::from_integer(ipow(2, self.n));
        let original = self.to_rational_lp();
        let mut lp = RationalLp::new(original.objective.iter().map(|c| c * &self.upper).collect());
        for j in 0..self.num_vars() {
            lp.set_bounds(j, Some(BigRational::zero()), Some(BigRational::one()));
        }
        let mut scales = Vec::with_capacity(original.rows.len());
        for row in &original.rows {
            // Entries are g_j / d^n or M_ij / d^n after substitution.
            let scale = &two_n * &dn;
            let coeffs = row.coeffs.iter().map(|a| a * &self.upper * &scale).collect();
            lp.add_row(
                coeffs,
                row.lower.as_ref().map(|l| l * &scale),
                row.upper.as_ref().map(|u| u * &scale),
            );
            scales.push(scale);
        }
        (lp, scales)
    }

    pub fn solve(&self) -> Result<RationalLpSolution> {
        self.solve_with(PivotRule::Bland)
    }

    pub fn solve_with(&self, rule: PivotRule) -> Result<RationalLpSolution> {
        let (scaled, scales) = self.scaled_lp();
        let sol = scaled.solve_with(rule)?;
        let dn = self.upper.recip();
        let x = sol.x.iter().map(|u| u * &self.upper).collect();
        let row_duals = sol.row_duals.iter().zip(&scales).map(|(y, s)| y * s).collect();
        let reduced_costs = sol.reduced_costs.iter().map(|r| r * &dn).collect();
        Ok(RationalLpSolution {
            x,
            value: sol.value,
            row_duals,
            reduced_costs,
            basis: sol.basis,
            pivots: sol.pivots,
        })
    }

    /// PPT row activities `(M x)_i`.
    pub fn ppt_activity(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.m
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn ns_activity(&self, x: &[BigRational]) -> BigRational {
        self.g.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// Optimal fidelity, exactly.
pub fn wh_fidelity(d: u64, alpha: &BigRational, n: u64, size: &BigInt, class: CodeClass) -> Result<BigRational> {
    Ok(build(d, alpha, n, size, class)?.solve()?.value)
}

pub fn basis_columns(sol: &RationalLpSolution) -> Vec<usize> {
    sol.basis
        .iter()
        .filter_map(|b| match b {
            BasisEntry::Column(j) => Some(*j),
            BasisEntry::Row(_) => None,
        })
        .collect()
}

pub fn trivial_code_point(lp: &WernerLp) -> Vec<BigRational> {
    let k_inv = lp.k_inv();
    vec![&lp.upper * &k_inv * &k_inv; lp.num_vars()]
}

/// Output and input labels of `n` uses, as in `ChannelChoi::tensor_power`.
fn use_labels(n: u64) -> (Vec<String>, Vec<String>) {
    if n == 1 {
        return (vec![OUT.into()], vec![IN.into()]);
    }
    ((1..=n).map(|i| format!("{OUT}.{i}")).collect(), (1..=n).map(|i| format!("{IN}.{i}")).collect())
}

/// Sums, grouped by the number of `second` factors, of the `n`-fold products
/// of `first`/`second` on the pairs `(out.i, in.i)`.
fn product_basis(
    n: u64,
    d: u64,
    factors: impl Fn(&str, &str) -> Result<(RationalOperator, RationalOperator)>,
) -> Result<Vec<RationalOperator>> {
    if n == 0 || n > 4 {
        return Err(Error::InvalidArgument(format!("explicit operators need 1 ≤ n ≤ 4, got {n}")));
    }
    let (outs, ins) = use_labels(n);
    let pairs: Vec<(RationalOperator, RationalOperator)> =
        outs.iter().zip(&ins).map(|(o, i)| factors(o, i)).collect::<Result<_>>()?;
    let order: Vec<&str> = outs.iter().chain(&ins).map(String::as_str).collect();
    let dim = (d as usize).pow(2 * n as u32);
    let shape = SystemShape::new(order.iter().map(|&l| (l, d as usize)))?;
    let mut sums = vec![RationalOperator::zeros(shape); n as usize + 1];
    for mask in 0u32..(1 << n) {
        let mut term: Option<RationalOperator> = None;
        for (i, (first, second)) in pairs.iter().enumerate() {
            let f = if mask >> i & 1 == 1 { second } else { first };
            term = Some(match term {
                None => f.clone(),
                Some(t) => t.tensor(f)?,
            });
        }
        let term = term.expect("n ≥ 1").permute(&order)?;
        debug_assert_eq!(term.dim(), dim);
        let k = mask.count_ones() as usize;
        sums[k] = sums[k].add(&term)?;
    }
    Ok(sums)
}

/// `E_k`: products of `S` and `A` with exactly `k` antisymmetric factors.
pub fn e_basis(n: u64, d: u64) -> Result<Vec<RationalOperator>> {
    product_basis(n, d, |o, i| sym_antisym(d as usize, o, i))
}

/// `Υ_i`: products of `I − φ` and `φ` with exactly `i` factors `φ`.
pub fn upsilon_basis(n: u64, d: u64) -> Result<Vec<RationalOperator>> {
    product_basis(n, d, |o, i| {
        let phi = max_entangled::<BigRational>(d as usize, o, i)?;
        let id = RationalOperator::identity(phi.shape().clone());
        Ok((id.sub(&phi)?, phi))
    })
}

/// The code `Λ = Σ x_k E_k`, `ρ = I/d^n` on the labels of `n` channel uses.
pub fn lambda_from_x(x: &[BigRational], n: u64, d: u64) -> Result<RationalPoint> {
    if x.len() as u64 != n + 1 {
        return Err(Error::DimensionMismatch(format!("{} weights for {} basis operators", x.len(), n + 1)));
    }
    let basis = e_basis(n, d)?;
    let mut lambda = RationalOperator::zeros(basis[0].shape().clone());
    for (xk, ek) in x.iter().zip(&basis) {
        if !xk.is_zero() {
            lambda = lambda.add(&ek.scale(xk))?;
        }
    }
    let (_, ins) = use_labels(n);
    let rho_shape = SystemShape::new(ins.iter().map(|l| (l.as_str(), d as usize)))?;
    let dn = BigRational::from_integer(ipow(d as i64, n));
    let rho = RationalOperator::identity(rho_shape).scale(&dn.recip());
    Ok(RationalPoint { lambda, rho })
}

/// `M` and `g` computed from the explicit operators: `t_out E_j` is
/// expanded in the `Υ_i` and `Tr_in E_j = g_j I`. Fails if either
/// expansion is not exact.
pub fn brute_force_oracle(n: u64, d: u64) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
    let e = e_basis(n, d)?;
    let ups = upsilon_basis(n, d)?;
    let (outs, ins) = use_labels(n);
    let outs: Vec<&str> = outs.iter().map(String::as_str).collect();
    let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
    let norms: Vec<BigRational> = ups.iter().map(|u| u.trace()).collect();
    let mut m = vec![vec![BigRational::zero(); n as usize + 1]; n as usize + 1];
    let mut g = Vec::with_capacity(n as usize + 1);
    for (j, ej) in e.iter().enumerate() {
        let te = ej.partial_transpose(&outs)?;
        let mut rebuilt = RationalOperator::zeros(te.shape().clone());
        for (i, ui) in ups.iter().enumerate() {
            m[i][j] = te.trace_product(ui)? / &norms[i];
            rebuilt = rebuilt.add(&ui.scale(&m[i][j]))?;
        }
        if rebuilt != te {
            return Err(Error::InvalidArgument(format!("t E_{j} is not in the span of the Υ basis")));
        }
        let marginal = ej.partial_trace(&ins)?;
        let gj = marginal.get(0, 0).clone();
        if marginal != RationalOperator::identity(marginal.shape().clone()).scale(&gj) {
            return Err(Error::InvalidArgument(format!("Tr_in E_{j} is not a multiple of the identity")));
        }
        g.push(gj);
    }
    Ok((m, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn q(xs: &[(i64, i64)]) -> Vec<BigRational> {
        xs.iter().map(|&(a, b)| frac(a, b)).collect()
    }

    #[test]
    fn small_matrices() {
        assert_eq!(m_matrix(1, 3), vec![q(&[(1, 2), (1, 2)]), q(&[(2, 1), (-1, 1)])]);
        assert_eq!(
            m_matrix(2, 3),
            vec![
                q(&[(1, 4), (1, 2), (1, 4)]),
                q(&[(1, 1), (1, 2), (-1, 2)]),
                q(&[(4, 1), (-4, 1), (1, 1)]),
            ]
        );
        assert_eq!(g_vector(1, 3), q(&[(2, 1), (1, 1)]));
        assert_eq!(g_vector(2, 3), q(&[(4, 1), (4, 1), (1, 1)]));
    }

    #[test]
    fn first_row_is_scaled_binomials() {
        for n in 1..8 {
            let m = m_matrix(n, 4);
            for j in 0..=n {
                assert_eq!(m[0][j as usize], BigRational::from_integer(binomial(n, j)) / int(1 << n));
            }
        }
    }

    #[test]
    fn g_sums_to_dimension() {
        for n in 1..=20 {
            for d in 2..5u64 {
                let total: BigRational = g_vector(n, d).iter().sum();
                assert_eq!(total, BigRational::from_integer(ipow(d as i64, n)));
            }
        }
    }

    #[test]
    fn one_use_separation() {
        let k = BigInt::from(2);
        let ppt = build(3, &int(1), 1, &k, CodeClass::Ppt).unwrap().solve().unwrap();
        assert_eq!(ppt.value, frac(5, 6));
        assert_eq!(ppt.x, q(&[(1, 18), (5, 18)]));
        let ns = build(3, &int(1), 1, &k, CodeClass::Ns).unwrap().solve().unwrap();
        assert_eq!(ns.value, frac(3, 4));
        assert_eq!(ns.x, q(&[(0, 1), (1, 4)]));
        let both = build(3, &int(1), 1, &k, CodeClass::Both).unwrap().solve().unwrap();
        assert_eq!(both.value, frac(5, 8));
        assert_eq!(both.x, q(&[(1, 48), (5, 24)]));
    }

    #[test]
    fn certificates_verify() {
        for class in CodeClass::ALL {
            for k in 1..5 {
                let lp = build(3, &frac(2, 3), 2, &BigInt::from(k), class).unwrap();
                let sol = lp.solve().unwrap();
                assert!(sol.verify(&lp.to_rational_lp()), "{class} K={k}");
            }
        }
    }

    #[test]
    fn perfect_two_use_code() {
        let lp = build(3, &int(1), 2, &BigInt::from(2), CodeClass::Both).unwrap();
        assert_eq!(lp.solve().unwrap().value, int(1));
        let witness = q(&[(1, 96), (7, 288), (1, 9)]);
        assert!(lp.to_rational_lp().is_feasible(&witness));
        assert_eq!(lp.ns_activity(&witness), frac(1, 4));
        assert_eq!(lp.ppt_activity(&witness)[2], frac(1, 18));
    }

    #[test]
    fn trivial_code_is_feasible() {
        for class in CodeClass::ALL {
            let lp = build(2, &frac(1, 3), 3, &BigInt::from(3), class).unwrap();
            assert!(lp.to_rational_lp().is_feasible(&trivial_code_point(&lp)));
        }
    }

    #[test]
    fn rates() {
        assert_eq!(rate_schedule(&frac(49, 20), 1), BigInt::from(2));
        assert_eq!(rate_schedule(&frac(49, 20), 2), BigInt::from(6));
        assert_eq!(rate_schedule(&frac(99, 40), 4), BigInt::from(37));
    }

    #[test]
    fn oracle_matches_formulas() {
        for (n, d) in [(1, 2), (1, 3), (2, 2)] {
            let (m, g) = brute_force_oracle(n, d).unwrap();
            assert_eq!(m, m_matrix(n, d));
            assert_eq!(g, g_vector(n, d));
        }
    }

    #[test]
    fn example_point_lifts() {
        use crate::channel::werner_holevo;
        use crate::code_sdp::{check_primal_exact, CodeProblem};
        let witness = q(&[(1, 96), (7, 288), (1, 9)]);
        let pt = lambda_from_x(&witness, 2, 3).unwrap();
        let channel = werner_holevo(3, &int(1)).unwrap().tensor_power(2).unwrap();
        let p = CodeProblem::new(channel, 2, CodeClass::Both).unwrap();
        let r = check_primal_exact(&pt, &p).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.value, int(1));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build(1, &int(1), 1, &BigInt::from(2), CodeClass::Ns).is_err());
        assert!(build(3, &frac(3, 2), 1, &BigInt::from(2), CodeClass::Ns).is_err());
        assert!(build(3, &int(1), 1, &BigInt::from(0), CodeClass::Ns).is_err());
    }
}
