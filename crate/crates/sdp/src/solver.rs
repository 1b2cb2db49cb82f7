//! Infeasible-start primal-dual path following with Nesterov-Todd scaling
//! and Mehrotra predictor-corrector steps.
//!
//! Works on the normalized form `min ⟨C, X⟩ s.t. ⟨A_i, X⟩ = b_i`, `X` in a
//! product of PSD cones and a nonnegative orthant (all diagonal blocks),
//! with dual `max bᵀy s.t. C - Σ y_i A_i = Z` in the same cone.

use faer::linalg::solvers::Solve;
use faer::linalg::triangular_solve::solve_lower_triangular_in_place;
use faer::{Mat, Par, Side};

use crate::error::SolverError;
use crate::program::{triangle_index, BlockKind, BlockOrigin, ConicProgram, Sense};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iters: usize,
    /// Cap on the summed side length of all PSD blocks.
    pub max_psd_side: usize,
    /// Cap on the number of equality constraints after normalization.
    pub max_constraints: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { feas_tol: 1e-8, gap_tol: 1e-7, max_iters: 200, max_psd_side: 400, max_constraints: 6000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    MaxIterations,
    NumericalFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult {
    pub status: Status,
    /// Objective at the returned primal iterate.
    pub primal_value: f64,
    /// Objective of the dual iterate; bounds the optimum from the other side.
    pub dual_value: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    /// Primal block values of the original program, dense row-major.
    pub blocks: Vec<Vec<f64>>,
    /// Multipliers of the original constraints, signed so that the dual
    /// objective is `Σ rhs_i y_i`.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl SolverResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

struct PsdData {
    size: usize,
    c: Mat<f64>,
    /// Constraint rows touching this block, with full (both-triangle) entries.
    rows: Vec<(usize, Vec<(usize, usize, f64)>)>,
    block: usize,
}

struct Standard {
    m: usize,
    b: Vec<f64>,
    psd: Vec<PsdData>,
    lp_c: Vec<f64>,
    lp_cols: Vec<Vec<(usize, f64)>>,
    lp_origin: Vec<(usize, usize)>,
}

impl Standard {
    fn new(p: &ConicProgram, sign: f64) -> Self {
        let mut psd_index = vec![usize::MAX; p.blocks.len()];
        let mut lp_offset = vec![usize::MAX; p.blocks.len()];
        let mut psd = Vec::new();
        let mut lp_origin = Vec::new();
        for (bi, b) in p.blocks.iter().enumerate() {
            match b.kind {
                BlockKind::Psd => {
                    psd_index[bi] = psd.len();
                    psd.push(PsdData { size: b.size, c: Mat::zeros(b.size, b.size), rows: Vec::new(), block: bi });
                }
                BlockKind::Diagonal => {
                    lp_offset[bi] = lp_origin.len();
                    lp_origin.extend((0..b.size).map(|k| (bi, k)));
                }
                BlockKind::Free => unreachable!("normalized programs have no free blocks"),
            }
        }
        let mut lp_c = vec![0.0; lp_origin.len()];
        for e in &p.objective.merged().entries {
            if psd_index[e.block] != usize::MAX {
                let c = &mut psd[psd_index[e.block]].c;
                c[(e.row, e.col)] += sign * e.value;
                if e.row != e.col {
                    c[(e.col, e.row)] += sign * e.value;
                }
            } else {
                lp_c[lp_offset[e.block] + e.row] += sign * e.value;
            }
        }
        let mut lp_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp_origin.len()];
        let mut b = Vec::with_capacity(p.constraints.len());
        for (i, con) in p.constraints.iter().enumerate() {
            b.push(con.rhs);
            let f = con.functional.merged();
            let mut start = 0;
            while start < f.entries.len() {
                let blk = f.entries[start].block;
                let mut end = start;
                while end < f.entries.len() && f.entries[end].block == blk {
                    end += 1;
                }
                if psd_index[blk] != usize::MAX {
                    let mut full = Vec::with_capacity(2 * (end - start));
                    for e in &f.entries[start..end] {
                        full.push((e.row, e.col, e.value));
                        if e.row != e.col {
                            full.push((e.col, e.row, e.value));
                        }
                    }
                    psd[psd_index[blk]].rows.push((i, full));
                } else {
                    for e in &f.entries[start..end] {
                        lp_cols[lp_offset[blk] + e.row].push((i, e.value));
                    }
                }
                start = end;
            }
        }
        Self { m: p.constraints.len(), b, psd, lp_c, lp_cols, lp_origin }
    }

    fn nu(&self) -> f64 {
        (self.psd.iter().map(|b| b.size).sum::<usize>() + self.lp_c.len()) as f64
    }

    fn apply(&self, xs: &[Mat<f64>], xl: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (blk, x) in self.psd.iter().zip(xs) {
            for (i, ents) in &blk.rows {
                out[*i] += ents.iter().map(|&(r, c, v)| v * x[(r, c)]).sum::<f64>();
            }
        }
        for (col, &x) in self.lp_cols.iter().zip(xl) {
            for &(i, a) in col {
                out[i] += a * x;
            }
        }
        out
    }

    fn adjoint(&self, y: &[f64]) -> (Vec<Mat<f64>>, Vec<f64>) {
        let mut zs: Vec<Mat<f64>> = self.psd.iter().map(|b| Mat::zeros(b.size, b.size)).collect();
        for (blk, z) in self.psd.iter().zip(zs.iter_mut()) {
            for (i, ents) in &blk.rows {
                for &(r, c, v) in ents {
                    z[(r, c)] += y[*i] * v;
                }
            }
        }
        let zl = self.lp_cols.iter().map(|col| col.iter().map(|&(i, a)| a * y[i]).sum()).collect();
        (zs, zl)
    }
}

fn inner(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for c in 0..n {
        for r in 0..n {
            s += a[(r, c)] * b[(r, c)];
        }
    }
    s
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sym(a: Mat<f64>) -> Mat<f64> {
    let n = a.nrows();
    Mat::from_fn(n, n, |r, c| 0.5 * (a[(r, c)] + a[(c, r)]))
}

fn lower_factor(x: &Mat<f64>) -> Option<Mat<f64>> {
    let l = x.llt(Side::Lower).ok()?;
    Some(l.L().to_owned())
}

/// Largest `α` keeping `X + α Δ` PSD, given the Cholesky factor of `X`.
fn psd_step(l: &Mat<f64>, delta: &Mat<f64>) -> f64 {
    let mut y = delta.clone();
    solve_lower_triangular_in_place(l.as_ref(), y.as_mut(), Par::Seq);
    let mut q = y.transpose().to_owned();
    solve_lower_triangular_in_place(l.as_ref(), q.as_mut(), Par::Seq);
    let q = sym(q);
    let ev = q.self_adjoint_eigenvalues(Side::Lower).unwrap_or_default();
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        -1.0 / min
    } else {
        f64::INFINITY
    }
}

fn lp_step(x: &[f64], dx: &[f64]) -> f64 {
    x.iter()
        .zip(dx)
        .filter(|(_, d)| **d < 0.0)
        .map(|(x, d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

struct Scaling {
    g: Mat<f64>,
    g_inv: Mat<f64>,
    w: Mat<f64>,
    lambda: Vec<f64>,
    lx: Mat<f64>,
    lz: Mat<f64>,
}

fn nt_scaling(x: &Mat<f64>, z: &Mat<f64>) -> Option<Scaling> {
    let lx = lower_factor(x)?;
    let lz = lower_factor(z)?;
    let rl = lz.transpose() * &lx;
    let svd = rl.svd().ok()?;
    let n = x.nrows();
    let s: Vec<f64> = (0..n).map(|i| svd.S().column_vector()[i]).collect();
    if s.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return None;
    }
    let v = svd.V();
    let u = svd.U();
    let lv = &lx * v;
    let g = Mat::from_fn(n, n, |r, c| lv[(r, c)] / s[c].sqrt());
    let ur = u.transpose() * lz.transpose();
    let g_inv = Mat::from_fn(n, n, |r, c| ur[(r, c)] / s[r].sqrt());
    let w = sym(&g * g.transpose());
    Some(Scaling { g, g_inv, w, lambda: s, lx, lz })
}

struct Direction {
    dxs: Vec<Mat<f64>>,
    dzs: Vec<Mat<f64>>,
    dxl: Vec<f64>,
    dzl: Vec<f64>,
    dy: Vec<f64>,
}

fn build_schur(st: &Standard, scal: &[Scaling], xl: &[f64], zl: &[f64]) -> Mat<f64> {
    let m = st.m;
    let mut lower = vec![0.0f64; m * m];
    let mut add = |i: usize, j: usize, v: f64| {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        lower[b * m + a] += v;
    };
    for (blk, sc) in st.psd.iter().zip(scal) {
        let s = blk.size;
        let w: Vec<f64> = (0..s * s).map(|k| sc.w[(k / s, k % s)]).collect();
        let mut p = vec![0.0f64; s * s];
        for (a, (i, ents)) in blk.rows.iter().enumerate() {
            p.iter_mut().for_each(|v| *v = 0.0);
            for &(r, c, v) in ents {
                for t in 0..s {
                    let wtc = v * w[t * s + c];
                    if wtc == 0.0 {
                        continue;
                    }
                    let row = &mut p[t * s..(t + 1) * s];
                    let wr = &w[r * s..(r + 1) * s];
                    for u in 0..s {
                        row[u] += wtc * wr[u];
                    }
                }
            }
            for (j, ents_j) in &blk.rows[a..] {
                let val: f64 = ents_j.iter().map(|&(t, u, v)| v * p[t * s + u]).sum();
                add(*i, *j, val);
            }
        }
    }
    for (k, col) in st.lp_cols.iter().enumerate() {
        let d = xl[k] / zl[k];
        for (p, &(i, a)) in col.iter().enumerate() {
            for &(j, b) in &col[p..] {
                add(i, j, a * b * d);
            }
        }
    }
    Mat::from_fn(m, m, |r, c| if r >= c { lower[c * m + r] } else { lower[r * m + c] })
}

/// Cholesky of the Schur complement, with growing diagonal shifts if needed.
fn factor_schur(m: &Mat<f64>) -> Option<faer::linalg::solvers::Llt<f64>> {
    if let Ok(f) = m.llt(Side::Lower) {
        return Some(f);
    }
    let n = m.nrows();
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(1e-300, f64::max);
    for exp in [-14, -12, -10, -8] {
        let shift = scale * 10f64.powi(exp);
        let shifted = Mat::from_fn(n, n, |r, c| if r == c { m[(r, c)] + shift } else { m[(r, c)] });
        if let Ok(f) = shifted.llt(Side::Lower) {
            return Some(f);
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn direction(
    st: &Standard,
    scal: &[Scaling],
    schur: &faer::linalg::solvers::Llt<f64>,
    rp: &[f64],
    rds: &[Mat<f64>],
    rdl: &[f64],
    targets: &[Mat<f64>],
    rcl: &[f64],
    xl: &[f64],
    zl: &[f64],
) -> Direction {
    let gtg: Vec<Mat<f64>> = scal.iter().zip(targets).map(|(sc, t)| sym(&sc.g * t * sc.g.transpose())).collect();
    let wrw: Vec<Mat<f64>> = scal.iter().zip(rds).map(|(sc, rd)| sym(&sc.w * rd * &sc.w)).collect();
    let diff: Vec<Mat<f64>> = gtg.iter().zip(&wrw).map(|(a, b)| a - b).collect();
    let lp_part: Vec<f64> = (0..xl.len()).map(|k| (rcl[k] - xl[k] * rdl[k]) / zl[k]).collect();
    let a_part = st.apply(&diff, &lp_part);
    let h: Vec<f64> = rp.iter().zip(&a_part).map(|(r, a)| r - a).collect();
    let rhs = Mat::from_fn(st.m, 1, |r, _| h[r]);
    let sol = schur.solve(&rhs);
    let dy: Vec<f64> = (0..st.m).map(|r| sol[(r, 0)]).collect();
    let (aty, atyl) = st.adjoint(&dy);
    let dzs: Vec<Mat<f64>> = rds.iter().zip(&aty).map(|(rd, a)| rd - a).collect();
    let dxs: Vec<Mat<f64>> = scal
        .iter()
        .zip(&gtg)
        .zip(&dzs)
        .map(|((sc, gt), dz)| sym(gt - &sc.w * dz * &sc.w))
        .collect();
    let dzl: Vec<f64> = rdl.iter().zip(&atyl).map(|(r, a)| r - a).collect();
    let dxl: Vec<f64> = (0..xl.len()).map(|k| (rcl[k] - xl[k] * dzl[k]) / zl[k]).collect();
    Direction { dxs, dzs, dxl, dzl, dy }
}

fn step_lengths(scal: &[Scaling], xl: &[f64], zl: &[f64], d: &Direction) -> (f64, f64) {
    let mut ap = lp_step(xl, &d.dxl);
    let mut ad = lp_step(zl, &d.dzl);
    for (sc, (dx, dz)) in scal.iter().zip(d.dxs.iter().zip(&d.dzs)) {
        ap = ap.min(psd_step(&sc.lx, dx));
        ad = ad.min(psd_step(&sc.lz, dz));
    }
    (ap, ad)
}

fn frob(ms: &[Mat<f64>], v: &[f64]) -> f64 {
    (ms.iter().map(|m| inner(m, m)).sum::<f64>() + dot(v, v)).sqrt()
}

pub fn solve(program: &ConicProgram, opts: &SolverOptions) -> Result<SolverResult, SolverError> {
    program.validate()?;
    let side = program.psd_side();
    if side > opts.max_psd_side {
        return Err(SolverError::TooLarge(format!(
            "total PSD side {side} exceeds the cap {}",
            opts.max_psd_side
        )));
    }
    let (norm, origin) = program.normalize();
    if norm.num_constraints() > opts.max_constraints {
        return Err(SolverError::TooLarge(format!(
            "{} constraints exceed the cap {}",
            norm.num_constraints(),
            opts.max_constraints
        )));
    }
    let sign = match program.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let st = Standard::new(&norm, sign);
    let m = st.m;
    let nu = st.nu();

    let tau = 1.0 + st.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut xs: Vec<Mat<f64>> = st.psd.iter().map(|b| Mat::from_fn(b.size, b.size, |r, c| if r == c { tau } else { 0.0 })).collect();
    let mut zs = xs.clone();
    let mut xl = vec![tau; st.lp_c.len()];
    let mut zl = vec![tau; st.lp_c.len()];
    let mut y = vec![0.0; m];

    let b_norm = dot(&st.b, &st.b).sqrt();
    let c_norm = frob(&st.psd.iter().map(|b| b.c.clone()).collect::<Vec<_>>(), &st.lp_c);

    let mut status = Status::MaxIterations;
    let mut iterations = 0;
    let (mut pobj, mut dobj, mut pinf, mut dinf, mut rgap);
    loop {
        let ax = st.apply(&xs, &xl);
        let rp: Vec<f64> = st.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let (aty, atyl) = st.adjoint(&y);
        let rds: Vec<Mat<f64>> = st
            .psd
            .iter()
            .zip(zs.iter().zip(&aty))
            .map(|(blk, (z, a))| sym(&blk.c - z - a))
            .collect();
        let rdl: Vec<f64> = (0..xl.len()).map(|k| st.lp_c[k] - zl[k] - atyl[k]).collect();
        pobj = st.psd.iter().zip(&xs).map(|(b, x)| inner(&b.c, x)).sum::<f64>() + dot(&st.lp_c, &xl);
        dobj = dot(&st.b, &y);
        pinf = dot(&rp, &rp).sqrt() / (1.0 + b_norm);
        dinf = frob(&rds, &rdl) / (1.0 + c_norm);
        rgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf <= opts.feas_tol && dinf <= opts.feas_tol && rgap <= opts.gap_tol {
            status = Status::Optimal;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        let y_max = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let x_size = frob(&xs, &xl);
        if iterations > 5 && (y_max > 1e8 * (1.0 + c_norm + b_norm) || x_size > 1e8 * (1.0 + b_norm + c_norm)) {
            status = Status::Infeasible;
            break;
        }
        iterations += 1;

        let mu = (xs.iter().zip(&zs).map(|(x, z)| inner(x, z)).sum::<f64>() + dot(&xl, &zl)) / nu;
        let scal: Option<Vec<Scaling>> = xs.iter().zip(&zs).map(|(x, z)| nt_scaling(x, z)).collect();
        let Some(scal) = scal else {
            status = Status::NumericalFailure;
            break;
        };
        let schur = build_schur(&st, &scal, &xl, &zl);
        let Some(factor) = factor_schur(&schur) else {
            status = Status::NumericalFailure;
            break;
        };

        let pred_t: Vec<Mat<f64>> = scal
            .iter()
            .map(|sc| {
                let n = sc.lambda.len();
                Mat::from_fn(n, n, |r, c| if r == c { -sc.lambda[r] } else { 0.0 })
            })
            .collect();
        let pred_rc: Vec<f64> = xl.iter().zip(&zl).map(|(x, z)| -x * z).collect();
        let pred = direction(&st, &scal, &factor, &rp, &rds, &rdl, &pred_t, &pred_rc, &xl, &zl);
        let (ap, ad) = step_lengths(&scal, &xl, &zl, &pred);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mu_aff = (xs
            .iter()
            .zip(&zs)
            .zip(pred.dxs.iter().zip(&pred.dzs))
            .map(|((x, z), (dx, dz))| inner(&(x + dx * faer::Scale(ap)), &(z + dz * faer::Scale(ad))))
            .sum::<f64>()
            + (0..xl.len()).map(|k| (xl[k] + ap * pred.dxl[k]) * (zl[k] + ad * pred.dzl[k])).sum::<f64>())
            / nu;
        let sigma = (mu_aff / mu).max(0.0).powi(3).min(1.0);

        let corr_t: Vec<Mat<f64>> = scal
            .iter()
            .zip(pred.dxs.iter().zip(&pred.dzs))
            .map(|(sc, (dx, dz))| {
                let sx = &sc.g_inv * dx * sc.g_inv.transpose();
                let sz = sc.g.transpose() * dz * &sc.g;
                let prod = &sx * &sz;
                let n = sc.lambda.len();
                Mat::from_fn(n, n, |r, c| {
                    let corr = 0.5 * (prod[(r, c)] + prod[(c, r)]);
                    let diag = if r == c { sigma * mu - sc.lambda[r] * sc.lambda[r] } else { 0.0 };
                    2.0 * (diag - corr) / (sc.lambda[r] + sc.lambda[c])
                })
            })
            .collect();
        let corr_rc: Vec<f64> =
            (0..xl.len()).map(|k| sigma * mu - xl[k] * zl[k] - pred.dxl[k] * pred.dzl[k]).collect();
        let dir = direction(&st, &scal, &factor, &rp, &rds, &rdl, &corr_t, &corr_rc, &xl, &zl);
        let (ap, ad) = step_lengths(&scal, &xl, &zl, &dir);
        let gamma = 0.9 + 0.09 * ap.min(ad).min(1.0);
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);

        for (x, dx) in xs.iter_mut().zip(&dir.dxs) {
            *x = sym(&*x + dx * faer::Scale(ap));
        }
        for (z, dz) in zs.iter_mut().zip(&dir.dzs) {
            *z = sym(&*z + dz * faer::Scale(ad));
        }
        for k in 0..xl.len() {
            xl[k] += ap * dir.dxl[k];
            zl[k] += ad * dir.dzl[k];
        }
        for (yi, d) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * d;
        }
    }

    // Back to the blocks of the normalized program, then the original.
    let nsizes = norm.sizes();
    let mut nblocks: Vec<Vec<f64>> = nsizes.iter().map(|s| vec![0.0; s * s]).collect();
    for (blk, x) in st.psd.iter().zip(&xs) {
        let s = blk.size;
        nblocks[blk.block] = (0..s * s).map(|k| x[(k / s, k % s)]).collect();
    }
    for (k, &(b, i)) in st.lp_origin.iter().enumerate() {
        nblocks[b][i * nsizes[b] + i] = xl[k];
    }
    let blocks = origin
        .iter()
        .zip(&program.blocks)
        .map(|(o, blk)| match *o {
            BlockOrigin::Same(nb) => nblocks[nb].clone(),
            BlockOrigin::Split { plus, minus } => {
                let s = blk.size;
                let n = nsizes[plus];
                let mut out = vec![0.0; s * s];
                for r in 0..s {
                    for c in r..s {
                        let k = triangle_index(s, r, c);
                        let v = nblocks[plus][k * n + k] - nblocks[minus][k * n + k];
                        out[r * s + c] = v;
                        out[c * s + r] = v;
                    }
                }
                out
            }
        })
        .collect();
    let primal_value = sign * pobj;
    let dual_value = sign * dobj;
    Ok(SolverResult {
        status,
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
        relative_gap: rgap,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        blocks,
        duals: y.iter().map(|v| sign * v).collect(),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{Functional, Relation};

    #[test]
    fn one_variable_toy() {
        let mut p = ConicProgram::new(Sense::Maximize);
        let x = p.add_block("x", 1, BlockKind::Psd);
        p.objective.push(x, 0, 0, 1.0);
        p.add_constraint(Functional::new().with(x, 0, 0, 1.0), Relation::Le, 1.0);
        let r = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.primal_value - 1.0).abs() < 1e-6, "{r:?}");
        assert!((r.duals[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn max_eigenvalue_program() {
        // max ⟨C, X⟩ s.t. Tr X = 1 is the top eigenvalue of C.
        let mut p = ConicProgram::new(Sense::Maximize);
        let x = p.add_block("x", 2, BlockKind::Psd);
        p.objective.push(x, 0, 0, 2.0);
        p.objective.push(x, 0, 1, 1.0);
        p.objective.push(x, 1, 1, 2.0);
        p.add_constraint(Functional::new().with(x, 0, 0, 1.0).with(x, 1, 1, 1.0), Relation::Eq, 1.0);
        let r = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.primal_value - 3.0).abs() < 1e-6);
        assert!((r.dual_value - 3.0).abs() < 1e-6);
    }

    #[test]
    fn free_and_diagonal_blocks() {
        // min t s.t. t - w >= 1, w = 2 (w free, t diagonal) → t = 3.
        let mut p = ConicProgram::new(Sense::Minimize);
        let t = p.add_block("t", 1, BlockKind::Diagonal);
        let w = p.add_block("w", 1, BlockKind::Free);
        p.objective.push(t, 0, 0, 1.0);
        p.add_constraint(Functional::new().with(t, 0, 0, 1.0).with(w, 0, 0, -1.0), Relation::Ge, 1.0);
        p.add_constraint(Functional::new().with(w, 0, 0, 1.0), Relation::Eq, 2.0);
        let r = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.primal_value - 3.0).abs() < 1e-6);
        assert!((r.blocks[1][0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn too_large_rejected() {
        let mut p = ConicProgram::new(Sense::Maximize);
        p.add_block("x", 500, BlockKind::Psd);
        assert!(matches!(solve(&p, &SolverOptions::default()), Err(SolverError::TooLarge(_))));
    }
}
