//! Exact bounded-variable primal simplex over big rationals.
//!
//! Problems are `maximize c·x` subject to `lo_r <= a_r·x <= hi_r` and
//! `l_j <= x_j <= u_j`, any bound possibly absent. Each row gets a logical
//! variable `s_r = a_r·x` carrying the row range, so the equality system is
//! `A x - s = 0` and every constraint becomes a variable bound.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<BigRational>,
    pub lower: Option<BigRational>,
    pub upper: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalLp {
    pub objective: Vec<BigRational>,
    pub col_lower: Vec<Option<BigRational>>,
    pub col_upper: Vec<Option<BigRational>>,
    pub rows: Vec<LpRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisEntry {
    Column(usize),
    Row(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalLpSolution {
    pub x: Vec<BigRational>,
    pub value: BigRational,
    /// Multipliers `y` with `c - Aᵀy` equal to `reduced_costs`.
    pub row_duals: Vec<BigRational>,
    pub reduced_costs: Vec<BigRational>,
    pub basis: Vec<BasisEntry>,
    pub pivots: usize,
}

/// Row multipliers `y` such that `max over the box of (-Aᵀy)·x` plus
/// `max over the row ranges of y·s` is negative, which rules out `A x = s`.
#[derive(Clone, Debug, PartialEq)]
pub struct FarkasCertificate {
    pub row_multipliers: Vec<BigRational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest eligible index for both entering and leaving variables.
    Bland,
    /// Largest reduced cost, with Bland's rule as a fallback after a run of
    /// degenerate pivots.
    Dantzig,
}

impl RationalLp {
    pub fn new(objective: Vec<BigRational>) -> Self {
        let n = objective.len();
        Self {
            objective,
            col_lower: vec![None; n],
            col_upper: vec![None; n],
            rows: Vec::new(),
        }
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bounds(&mut self, j: usize, lower: Option<BigRational>, upper: Option<BigRational>) {
        self.col_lower[j] = lower;
        self.col_upper[j] = upper;
    }

    pub fn add_row(
        &mut self,
        coeffs: Vec<BigRational>,
        lower: Option<BigRational>,
        upper: Option<BigRational>,
    ) {
        assert_eq!(coeffs.len(), self.num_cols(), "row length must match column count");
        self.rows.push(LpRow { coeffs, lower, upper });
    }

    pub fn objective_value(&self, x: &[BigRational]) -> BigRational {
        dot(&self.objective, x)
    }

    pub fn row_activity(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.rows.iter().map(|r| dot(&r.coeffs, x)).collect()
    }

    /// Exact feasibility of `x` against every bound and row.
    pub fn is_feasible(&self, x: &[BigRational]) -> bool {
        if x.len() != self.num_cols() {
            return false;
        }
        let cols_ok = x.iter().enumerate().all(|(j, v)| {
            within(v, self.col_lower[j].as_ref(), self.col_upper[j].as_ref())
        });
        cols_ok
            && self
                .rows
                .iter()
                .all(|r| within(&dot(&r.coeffs, x), r.lower.as_ref(), r.upper.as_ref()))
    }

    /// Upper bound on the optimum implied by row multipliers `y`.
    /// `None` when the bound is infinite.
    pub fn dual_bound(&self, y: &[BigRational]) -> Option<BigRational> {
        let reduced = self.reduced_costs(y);
        let mut total = BigRational::zero();
        for (j, r) in reduced.iter().enumerate() {
            total += box_max(r, self.col_lower[j].as_ref(), self.col_upper[j].as_ref())?;
        }
        for (row, yr) in self.rows.iter().zip(y) {
            total += box_max(yr, row.lower.as_ref(), row.upper.as_ref())?;
        }
        Some(total)
    }

    pub fn reduced_costs(&self, y: &[BigRational]) -> Vec<BigRational> {
        let mut reduced = self.objective.clone();
        for (row, yr) in self.rows.iter().zip(y) {
            if yr.is_zero() {
                continue;
            }
            for (rj, a) in reduced.iter_mut().zip(&row.coeffs) {
                *rj -= yr * a;
            }
        }
        reduced
    }

    pub fn solve(&self) -> Result<RationalLpSolution> {
        self.solve_with(PivotRule::Bland)
    }

    pub fn solve_with(&self, rule: PivotRule) -> Result<RationalLpSolution> {
        Solver::new(self, rule).run()
    }
}

impl RationalLpSolution {
    /// Checks primal feasibility, the reported value, and that the dual
    /// bound from `row_duals` meets the value exactly.
    pub fn verify(&self, lp: &RationalLp) -> bool {
        lp.is_feasible(&self.x)
            && lp.objective_value(&self.x) == self.value
            && lp.reduced_costs(&self.row_duals) == self.reduced_costs
            && lp.dual_bound(&self.row_duals).as_ref() == Some(&self.value)
    }
}

impl FarkasCertificate {
    pub fn verify(&self, lp: &RationalLp) -> bool {
        if self.row_multipliers.len() != lp.rows.len() {
            return false;
        }
        let mut zero_objective = lp.clone();
        zero_objective.objective = vec![BigRational::zero(); lp.num_cols()];
        match zero_objective.dual_bound(&self.row_multipliers) {
            Some(bound) => bound.is_negative(),
            None => false,
        }
    }
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .filter(|(p, q)| !p.is_zero() && !q.is_zero())
        .fold(BigRational::zero(), |acc, (p, q)| acc + p * q)
}

fn within(v: &BigRational, lo: Option<&BigRational>, hi: Option<&BigRational>) -> bool {
    lo.is_none_or(|l| v >= l) && hi.is_none_or(|h| v <= h)
}

fn box_max(
    coef: &BigRational,
    lo: Option<&BigRational>,
    hi: Option<&BigRational>,
) -> Option<BigRational> {
    if coef.is_zero() {
        Some(BigRational::zero())
    } else if coef.is_positive() {
        hi.map(|h| coef * h)
    } else {
        lo.map(|l| coef * l)
    }
}

/// A tableau row `num / den` sharing one positive denominator, kept with
/// unit content so entries stay as small as their reduced fractions.
#[derive(Clone, Debug)]
struct Row {
    num: Vec<BigInt>,
    den: BigInt,
}

impl Row {
    fn from_rationals(values: &[BigRational]) -> Self {
        let den = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let num = values.iter().map(|v| v.numer() * (&den / v.denom())).collect();
        let mut row = Row { num, den };
        row.reduce();
        row
    }

    fn is_zero_at(&self, k: usize) -> bool {
        self.num[k].is_zero()
    }

    fn get(&self, k: usize) -> BigRational {
        BigRational::new(self.num[k].clone(), self.den.clone())
    }

    fn sign_at(&self, k: usize) -> Sign {
        self.num[k].sign()
    }

    fn reduce(&mut self) {
        let mut g = self.den.clone();
        for v in &self.num {
            if g.is_one() {
                return;
            }
            if !v.is_zero() {
                g = g.gcd(&(v % &g));
            }
        }
        if !g.is_one() {
            for v in self.num.iter_mut() {
                if !v.is_zero() {
                    *v /= &g;
                }
            }
            self.den /= &g;
        }
    }

    /// Rescales so that entry `j` equals one.
    fn normalize_at(&mut self, j: usize) {
        let mut p = self.num[j].clone();
        if p.is_negative() {
            p = -p;
            for v in self.num.iter_mut() {
                *v = -std::mem::take(v);
            }
        }
        self.den = p;
        self.reduce();
    }

    /// `self -= self[j] * pivot` where `pivot[j] = 1`, touching only the
    /// pivot row's nonzero columns.
    fn eliminate(&mut self, pivot: &Row, j: usize, nonzero: &[usize]) {
        if self.num[j].is_zero() {
            return;
        }
        let g = pivot.den.gcd(&self.num[j]);
        let a = &pivot.den / &g;
        let b = &self.num[j] / &g;
        if !a.is_one() {
            for v in self.num.iter_mut() {
                if !v.is_zero() {
                    *v *= &a;
                }
            }
            self.den *= &a;
        }
        for &k in nonzero {
            self.num[k] -= &b * &pivot.num[k];
        }
        self.reduce();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic(usize),
    AtLower,
    AtUpper,
    FreeZero,
}

struct Solver<'a> {
    lp: &'a RationalLp,
    rule: PivotRule,
    n: usize,
    m: usize,
    tableau: Vec<Row>,
    basis: Vec<usize>,
    state: Vec<State>,
    value: Vec<BigRational>,
    lower: Vec<Option<BigRational>>,
    upper: Vec<Option<BigRational>>,
    reduced: Row,
    blocked: Vec<bool>,
    pivots: usize,
}

impl<'a> Solver<'a> {
    fn new(lp: &'a RationalLp, rule: PivotRule) -> Self {
        let n = lp.num_cols();
        let m = lp.rows.len();
        let mut lower: Vec<Option<BigRational>> = lp.col_lower.clone();
        let mut upper: Vec<Option<BigRational>> = lp.col_upper.clone();
        for row in &lp.rows {
            lower.push(row.lower.clone());
            upper.push(row.upper.clone());
        }
        let mut state = Vec::with_capacity(n + m);
        let mut value = Vec::with_capacity(n + m);
        for j in 0..n {
            let (s, v) = initial_position(&lp.objective[j], lower[j].as_ref(), upper[j].as_ref());
            state.push(s);
            value.push(v);
        }
        Self {
            lp,
            rule,
            n,
            m,
            tableau: Vec::new(),
            basis: Vec::new(),
            state,
            value,
            lower,
            upper,
            reduced: Row { num: Vec::new(), den: BigInt::one() },
            blocked: Vec::new(),
            pivots: 0,
        }
    }

    fn run(mut self) -> Result<RationalLpSolution> {
        let (n, m) = (self.n, self.m);
        let x0: Vec<BigRational> = self.value[..n].to_vec();
        let activity = self.lp.row_activity(&x0);

        // Row r reads sign_r * (s_r - a_r·x) = art_r whenever the logical
        // starts outside its range; otherwise the logical is basic.
        let mut artificial_rows = Vec::new();
        let mut art_sign = Vec::new();
        for (r, act) in activity.iter().enumerate() {
            let lo = self.lower[n + r].clone();
            let hi = self.upper[n + r].clone();
            if let Some(l) = lo.filter(|l| act < l) {
                artificial_rows.push(r);
                art_sign.push(1i64);
                self.state.push(State::AtLower);
                self.value.push(l);
            } else if let Some(h) = hi.filter(|h| act > h) {
                artificial_rows.push(r);
                art_sign.push(-1i64);
                self.state.push(State::AtUpper);
                self.value.push(h);
            } else {
                self.state.push(State::Basic(r));
                self.value.push(act.clone());
            }
        }
        let n_art = artificial_rows.len();
        let total = n + m + n_art;
        let mut art_of_row = vec![None; m];
        for (k, &r) in artificial_rows.iter().enumerate() {
            art_of_row[r] = Some(k);
        }

        self.tableau = Vec::with_capacity(m);
        self.basis = Vec::with_capacity(m);
        for (r, row) in self.lp.rows.iter().enumerate() {
            let mut t = vec![BigRational::zero(); total];
            match art_of_row[r] {
                None => {
                    // Basic logical: s_r - a_r·x = 0.
                    for (j, a) in row.coeffs.iter().enumerate() {
                        t[j] = -a.clone();
                    }
                    t[n + r] = BigRational::one();
                    self.basis.push(n + r);
                }
                Some(k) => {
                    let sign = BigRational::from_integer(BigInt::from(art_sign[k]));
                    for (j, a) in row.coeffs.iter().enumerate() {
                        t[j] = &sign * a;
                    }
                    t[n + r] = -sign;
                    t[n + m + k] = BigRational::one();
                    self.basis.push(n + m + k);
                }
            }
            self.tableau.push(Row::from_rationals(&t));
        }
        for (k, &r) in artificial_rows.iter().enumerate() {
            let gap = if art_sign[k] > 0 {
                &self.value[n + r] - &activity[r]
            } else {
                &activity[r] - &self.value[n + r]
            };
            self.state.push(State::Basic(r));
            self.value.push(gap);
            self.lower.push(Some(BigRational::zero()));
            self.upper.push(None);
        }
        self.blocked = vec![false; total];

        if n_art > 0 {
            let mut phase1 = vec![BigRational::zero(); total];
            for c in phase1.iter_mut().skip(n + m) {
                *c = -BigRational::one();
            }
            self.price(&phase1);
            self.iterate()?;
            let residual: BigRational = self.value[n + m..].iter().sum();
            if residual.is_positive() {
                let row_multipliers = (n..n + m).map(|k| self.reduced.get(k)).collect();
                return Err(Error::Infeasible(Box::new(FarkasCertificate { row_multipliers })));
            }
            for k in n + m..total {
                self.upper[k] = Some(BigRational::zero());
                if !matches!(self.state[k], State::Basic(_)) {
                    self.blocked[k] = true;
                }
            }
        }

        let mut phase2 = self.lp.objective.clone();
        phase2.resize(total, BigRational::zero());
        self.price(&phase2);
        self.iterate()?;

        let x = self.value[..n].to_vec();
        let value = self.lp.objective_value(&x);
        let row_duals = (n..n + m).map(|k| self.reduced.get(k)).collect();
        let reduced_costs = (0..n).map(|k| self.reduced.get(k)).collect();
        let basis = self
            .basis
            .iter()
            .filter(|&&v| v < n + m)
            .map(|&v| if v < n { BasisEntry::Column(v) } else { BasisEntry::Row(v - n) })
            .collect();
        Ok(RationalLpSolution {
            x,
            value,
            row_duals,
            reduced_costs,
            basis,
            pivots: self.pivots,
        })
    }

    fn price(&mut self, cost: &[BigRational]) {
        let mut reduced = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            let row = &self.tableau[i];
            for (k, dk) in reduced.iter_mut().enumerate() {
                if !row.is_zero_at(k) {
                    *dk -= cb * row.get(k);
                }
            }
        }
        self.reduced = Row::from_rationals(&reduced);
    }

    fn movable(&self, j: usize) -> (bool, bool) {
        let fixed = matches!((&self.lower[j], &self.upper[j]), (Some(l), Some(u)) if l == u);
        if fixed || self.blocked[j] {
            return (false, false);
        }
        match self.state[j] {
            State::Basic(_) => (false, false),
            State::AtLower => (true, false),
            State::AtUpper => (false, true),
            State::FreeZero => (true, true),
        }
    }

    fn choose_entering(&self, degenerate_run: usize) -> Option<(usize, bool)> {
        let bland = self.rule == PivotRule::Bland || degenerate_run > 50;
        let mut best: Option<(usize, bool)> = None;
        for j in 0..self.reduced.num.len() {
            let dir_up = match self.reduced.sign_at(j) {
                Sign::NoSign => continue,
                Sign::Plus => true,
                Sign::Minus => false,
            };
            let (up, down) = self.movable(j);
            if (dir_up && !up) || (!dir_up && !down) {
                continue;
            }
            if bland {
                return Some((j, dir_up));
            }
            match best {
                Some((b, _)) if self.reduced.num[b].abs() >= self.reduced.num[j].abs() => {}
                _ => best = Some((j, dir_up)),
            }
        }
        best
    }

    fn iterate(&mut self) -> Result<()> {
        let mut degenerate_run = 0usize;
        loop {
            let Some((j, increase)) = self.choose_entering(degenerate_run) else {
                return Ok(());
            };
            // Basic variable of row i moves at rate -T_ij per unit of x_j.
            let mut best: Option<(BigRational, usize, Option<usize>)> = None;
            let mut consider = |t: BigRational, var: usize, row: Option<usize>| {
                let better = match &best {
                    None => true,
                    Some((s, lv, _)) => t < *s || (t == *s && var < *lv),
                };
                if better {
                    best = Some((t, var, row));
                }
            };
            if let (Some(l), Some(u)) = (&self.lower[j], &self.upper[j]) {
                consider(u - l, j, None);
            }
            for i in 0..self.m {
                if self.tableau[i].is_zero_at(j) {
                    continue;
                }
                let tij = self.tableau[i].get(j);
                let b = self.basis[i];
                let rate = if increase { -tij } else { tij };
                let t = if rate.is_negative() {
                    match &self.lower[b] {
                        Some(l) => (&self.value[b] - l) / -rate,
                        None => continue,
                    }
                } else {
                    match &self.upper[b] {
                        Some(u) => (u - &self.value[b]) / rate,
                        None => continue,
                    }
                };
                consider(t, b, Some(i));
            }
            let Some((t, leaving, row)) = best else {
                return Err(Error::Unbounded);
            };
            if t.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            let delta = if increase { t } else { -t };
            if !delta.is_zero() {
                self.value[j] += &delta;
                for i in 0..self.m {
                    if !self.tableau[i].is_zero_at(j) {
                        let b = self.basis[i];
                        self.value[b] -= self.tableau[i].get(j) * &delta;
                    }
                }
            }
            self.pivots += 1;
            match row {
                None => {
                    let (state, bound) = if increase {
                        (State::AtUpper, self.upper[j].clone())
                    } else {
                        (State::AtLower, self.lower[j].clone())
                    };
                    self.state[j] = state;
                    self.value[j] = bound.expect("flip requires a finite bound");
                }
                Some(r) => self.pivot(r, j, leaving),
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize, leaving: usize) {
        let at_lower = self.lower[leaving]
            .as_ref()
            .is_some_and(|l| self.value[leaving] == *l);
        let mut pivot_row = std::mem::replace(
            &mut self.tableau[r],
            Row { num: Vec::new(), den: BigInt::one() },
        );
        pivot_row.normalize_at(j);
        let nonzero: Vec<usize> = (0..pivot_row.num.len())
            .filter(|&k| !pivot_row.is_zero_at(k))
            .collect();
        for (i, row) in self.tableau.iter_mut().enumerate() {
            if i != r {
                row.eliminate(&pivot_row, j, &nonzero);
            }
        }
        self.reduced.eliminate(&pivot_row, j, &nonzero);
        self.tableau[r] = pivot_row;
        let (state, bound) = if at_lower {
            (State::AtLower, self.lower[leaving].clone())
        } else {
            (State::AtUpper, self.upper[leaving].clone())
        };
        self.state[leaving] = state;
        self.value[leaving] = bound.expect("leaving variable sits on a finite bound");
        self.state[j] = State::Basic(r);
        self.basis[r] = j;
    }
}

/// Columns start on the bound their objective coefficient favours.
fn initial_position(
    cost: &BigRational,
    lo: Option<&BigRational>,
    hi: Option<&BigRational>,
) -> (State, BigRational) {
    match (lo, hi) {
        (_, Some(u)) if cost.is_positive() => (State::AtUpper, u.clone()),
        (Some(l), _) => (State::AtLower, l.clone()),
        (None, Some(u)) => (State::AtUpper, u.clone()),
        (None, None) => (State::FreeZero, BigRational::zero()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn v(xs: &[(i64, i64)]) -> Vec<BigRational> {
        xs.iter().map(|&(a, b)| frac(a, b)).collect()
    }

    #[test]
    fn small_bounded_lp() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0.
        let mut lp = RationalLp::new(v(&[(1, 1), (1, 1)]));
        lp.set_bounds(0, Some(int(0)), None);
        lp.set_bounds(1, Some(int(0)), None);
        lp.add_row(v(&[(1, 1), (2, 1)]), None, Some(int(4)));
        lp.add_row(v(&[(3, 1), (1, 1)]), None, Some(int(6)));
        for rule in [PivotRule::Bland, PivotRule::Dantzig] {
            let sol = lp.solve_with(rule).unwrap();
            assert_eq!(sol.value, frac(14, 5));
            assert_eq!(sol.x, v(&[(8, 5), (6, 5)]));
            assert!(sol.verify(&lp));
        }
    }

    #[test]
    fn equality_needs_phase_one() {
        // max x - y s.t. x + y = 1, 0 <= x <= 1/2, y >= 0.
        let mut lp = RationalLp::new(v(&[(1, 1), (-1, 1)]));
        lp.set_bounds(0, Some(int(0)), Some(frac(1, 2)));
        lp.set_bounds(1, Some(int(0)), None);
        lp.add_row(v(&[(1, 1), (1, 1)]), Some(int(1)), Some(int(1)));
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, int(0));
        assert_eq!(sol.x, v(&[(1, 2), (1, 2)]));
        assert!(sol.verify(&lp));
    }

    #[test]
    fn infeasible_yields_certificate() {
        let mut lp = RationalLp::new(v(&[(1, 1)]));
        lp.set_bounds(0, Some(int(0)), Some(int(1)));
        lp.add_row(v(&[(1, 1)]), Some(int(2)), None);
        match lp.solve() {
            Err(Error::Infeasible(cert)) => assert!(cert.verify(&lp)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = RationalLp::new(v(&[(1, 1)]));
        lp.set_bounds(0, Some(int(0)), None);
        assert!(matches!(lp.solve(), Err(Error::Unbounded)));
    }

    #[test]
    fn free_variable() {
        // max -|x - 3| style: max t s.t. t <= x - 3, t <= 3 - x, x free, t free.
        let mut lp = RationalLp::new(v(&[(0, 1), (1, 1)]));
        lp.add_row(v(&[(-1, 1), (1, 1)]), None, Some(int(-3)));
        lp.add_row(v(&[(1, 1), (1, 1)]), None, Some(int(3)));
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, int(0));
        assert_eq!(sol.x[0], int(3));
        assert!(sol.verify(&lp));
    }
}
