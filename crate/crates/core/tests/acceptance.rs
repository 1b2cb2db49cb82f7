//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criterion 4 is listed in `KNOWN_FAILURES`: its 49/20 half cannot hold
//! for this channel (see the README). It still runs and prints FAIL; only
//! an unexpected failure makes the target exit nonzero.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nsppt_core::channel::{
    dephasing, depolarizing, identity_channel, random_channel, superactivation_z, symmetric_classical,
    symmetric_classical_exact, werner_holevo, ChannelChoi,
};
use nsppt_core::code_sdp::{
    self, check_dual, check_dual_exact, check_primal, horodecki_dual_point, horodecki_dual_point_exact, CodeProblem,
};
use nsppt_core::rational::{floor_pow, frac, int, log2};
use nsppt_core::supermaps::Supermap;
use nsppt_core::werner_lp::{self, brute_force_oracle, g_vector, m_matrix, rate_schedule, wh_fidelity};
use nsppt_core::{CodeClass, Result};
use nsppt_sdp::SolverOptions;

const KNOWN_FAILURES: &[u32] = &[4];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn lp(d: u64, alpha: &BigRational, n: u64, k: u64, class: CodeClass) -> Result<BigRational> {
    wh_fidelity(d, alpha, n, &BigInt::from(k), class)
}

fn example1() -> Result<Outcome> {
    let start = Instant::now();
    let value = lp(3, &int(1), 2, 2, CodeClass::Both)?;
    let program = werner_lp::build(3, &int(1), 2, &BigInt::from(2), CodeClass::Both)?;
    let x = vec![frac(1, 96), frac(7, 288), frac(1, 9)];
    let ns = program.ns_activity(&x);
    let row = program.ppt_activity(&x)[2].clone();
    let feasible = program.to_rational_lp().is_feasible(&x);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        value == int(1) && ns == frac(1, 4) && row == frac(1, 18) && feasible && secs < 1.0,
        format!("value {value}, g.x = {ns}, PPT row 2 = {row}, witness feasible {feasible}, {secs:.3} s"),
    )
}

fn zero_error_thresholds() -> Result<Outcome> {
    let start = Instant::now();
    let mut thresholds = Vec::new();
    let mut ok = true;
    for n in 1..=6u64 {
        let t = floor_pow(&frac(5, 3), n);
        let t = u64::try_from(t).expect("small threshold");
        ok &= lp(3, &int(1), n, t, CodeClass::Ppt)? == int(1);
        ok &= lp(3, &int(1), n, t + 1, CodeClass::Ppt)? < int(1);
        thresholds.push(t);
    }
    ok &= thresholds == [1, 2, 4, 7, 12, 21];
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 10.0, format!("thresholds {thresholds:?}, {secs:.2} s"))
}

fn separation_triple() -> Result<Outcome> {
    let ppt = lp(3, &int(1), 1, 2, CodeClass::Ppt)?;
    let ns = lp(3, &int(1), 1, 2, CodeClass::Ns)?;
    let both = lp(3, &int(1), 1, 2, CodeClass::Both)?;
    outcome(
        ppt == frac(5, 6) && ns == frac(3, 4) && both == frac(5, 8),
        format!("PPT {ppt}, NS {ns}, Both {both}"),
    )
}

fn log2_sweep(c: &BigRational) -> Result<Vec<(u64, f64)>> {
    (1..=12u64)
        .map(|i| {
            let n = 10 * i;
            let f = wh_fidelity(3, &int(1), n, &rate_schedule(c, n), CodeClass::Both)?;
            Ok((n, log2(&f)))
        })
        .collect()
}

fn figure4_trends() -> Result<Outcome> {
    let slow = log2_sweep(&frac(49, 20))?;
    let tail: Vec<f64> = slow.iter().filter(|(n, _)| *n >= 60).map(|p| p.1).collect();
    let rising = tail.windows(2).all(|w| w[1] >= w[0]);
    let last = slow.last().expect("12 rows").1;
    let slow_ok = rising && last > -0.5;

    let fast = log2_sweep(&frac(99, 40))?;
    let tail: Vec<f64> = fast.iter().filter(|(n, _)| *n >= 30).map(|p| p.1).collect();
    let steps: Vec<f64> = tail.windows(2).map(|w| w[0] - w[1]).collect();
    let mean = steps.iter().sum::<f64>() / steps.len() as f64;
    let spread = steps.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max);
    let fast_ok = steps.iter().all(|&s| s > 0.0) && spread < 0.5 * mean;

    outcome(
        slow_ok && fast_ok,
        format!(
            "49/20: tail nondecreasing {rising}, log2 F(120) = {last:.3} [{}]; 99/40: mean decrement {mean:.3}, max deviation {spread:.3} [{}]",
            if slow_ok { "ok" } else { "fails" },
            if fast_ok { "ok" } else { "fails" }
        ),
    )
}

fn figure5_orderings() -> Result<Outcome> {
    let v = |k, class| lp(3, &int(1), 2, k, class);
    let ns3 = v(3, CodeClass::Ns)?;
    let (both4, ns4, ppt4) = (v(4, CodeClass::Both)?, v(4, CodeClass::Ns)?, v(4, CodeClass::Ppt)?);
    let strict = both4 < ns4 && both4 < ppt4;
    let mut equal = true;
    for k in [9, 10] {
        equal &= v(k, CodeClass::Both)? == v(k, CodeClass::Ns)?;
    }
    outcome(
        ns3 == int(1) && strict && equal,
        format!("NS(3) = {ns3}; K=4: Both {both4}, NS {ns4}, PPT {ppt4}; Both = NS at K=9,10: {equal}"),
    )
}

fn horodecki_one_over_k() -> Result<Outcome> {
    let opts = SolverOptions::default();
    let mut worst_sdp: f64 = 0.0;
    let mut ok = true;
    let alpha = frac(1, 2);
    let channels: [(&str, ChannelChoi<BigRational>); 2] =
        [("dephasing(3)", dephasing(3)?), ("werner_holevo(3, 1/2)", werner_holevo(3, &alpha)?)];
    for k in [2u64, 3] {
        let target = frac(1, k as i64);
        ok &= lp(3, &alpha, 1, k, CodeClass::Ppt)? == target;
        for (_, ch) in &channels {
            let p = CodeProblem::new(ch.to_complex(), k, CodeClass::Ppt)?;
            let s = code_sdp::solve(&p, &opts)?;
            worst_sdp = worst_sdp.max((s.value - 1.0 / k as f64).abs());
            let dp = horodecki_dual_point(&p.channel, k, 1e-9)?;
            let r = check_dual(&dp, &p, 1e-9)?;
            ok &= r.passed && (r.value - 1.0 / k as f64).abs() <= 1e-12;
            let exact = CodeProblem::new(ch.clone(), k, CodeClass::Ppt)?;
            let r = check_dual_exact(&horodecki_dual_point_exact(ch, k)?, &exact)?;
            ok &= r.passed() && r.value == target;
        }
    }
    outcome(ok && worst_sdp <= 1e-6, format!("K = 2, 3 on dephasing and W(3, 1/2); max SDP error {worst_sdp:.2e}"))
}

fn grid() -> impl Iterator<Item = (u64, u64, u64)> {
    [2u64, 3].into_iter().flat_map(|d| [1u64, 2].into_iter().flat_map(move |n| (1..=4u64).map(move |k| (d, n, k))))
}

fn lp_sdp_cross_validation() -> Result<Outcome> {
    let opts = SolverOptions::default();
    let (mut worst_err, mut worst_gap, mut count, mut checks_ok): (f64, f64, usize, bool) = (0.0, 0.0, 0, true);
    for (d, n, k) in grid() {
        let channel = werner_holevo(d as usize, &int(1))?.to_complex().tensor_power(n as usize)?;
        for class in CodeClass::ALL {
            let exact = werner_lp::build(d, &int(1), n, &BigInt::from(k), class)?.solve()?.value;
            let p = CodeProblem::new(channel.clone(), k, class)?;
            let s = code_sdp::solve(&p, &opts)?;
            worst_err = worst_err.max((s.value - nsppt_core::rational::to_f64(&exact)).abs());
            worst_gap = worst_gap.max(s.gap().map_or(f64::INFINITY, f64::abs));
            checks_ok &= check_primal(&s.primal, &p, 1e-6)?.passed;
            checks_ok &= s.dual.as_ref().is_some_and(|dp| check_dual(dp, &p, 1e-6).is_ok_and(|r| r.passed));
            count += 1;
        }
    }
    outcome(
        worst_err <= 1e-6 && worst_gap <= 1e-6 && checks_ok,
        format!("{count} instances, max |SDP - LP| {worst_err:.2e}, max gap {worst_gap:.2e}, points verified {checks_ok}"),
    )
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut ok = true;
    for (n, d) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
        let (m, g) = brute_force_oracle(n, d)?;
        ok &= m == m_matrix(n, d) && g == g_vector(n, d);
    }
    outcome(ok, "(n, d) in (1,2), (1,3), (2,2), (2,3)")
}

fn diff(a: &ChannelChoi, b: &ChannelChoi) -> Result<f64> {
    a.flat().max_diff_by(&b.flat(), |v| v.norm())
}

fn supermap_identities() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut first, mut second): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let m = random_channel(4, 4, &mut rng)?;
        let p = m.success_probability_f64()?;
        let out = Supermap::Twirl.apply(&Supermap::Teleport.apply(&Supermap::Permute.apply(&m)?)?)?;
        first = first.max(diff(&out, &depolarizing(2, p)?)?);
    }
    for _ in 0..20 {
        let n = random_channel(2, 2, &mut rng)?;
        let f = n.fidelity_f64()?;
        let out = Supermap::Permute.apply(&Supermap::DenseCode.apply(&Supermap::Twirl.apply(&n)?)?)?;
        second = second.max(diff(&out, &symmetric_classical(4, f)?)?);
    }
    let mut teleport_id = true;
    for d in [2usize, 3] {
        teleport_id &= Supermap::Teleport.apply(&symmetric_classical_exact(d * d, &int(1))?)? == identity_channel(d)?;
    }
    outcome(
        first <= 1e-10 && second <= 1e-10 && teleport_id,
        format!("twirl.teleport.permute {first:.1e}, permute.dense.twirl {second:.1e}, teleport of C(1) exact {teleport_id}"),
    )
}

fn superactivation() -> Result<Outcome> {
    let z = superactivation_z();
    let ns = z.bob_to_alice_gap()?.is_zero() && z.alice_to_bob_gap()?.is_zero();
    let min = z.to_complex().bob_transpose()?.min_eigenvalue();
    outcome(ns && min >= -1e-10, format!("marginals exact {ns}, min partial-transpose eigenvalue {min:.1e}"))
}

fn floor_and_monotonicity() -> Result<Outcome> {
    let mut count = 0;
    let mut bad = Vec::new();
    for alpha in [int(1), frac(1, 2), frac(1, 3), int(0)] {
        for (d, n, k) in grid() {
            let v = |class| lp(d, &alpha, n, k, class);
            let (ns, ppt, both, ea) = (v(CodeClass::Ns)?, v(CodeClass::Ppt)?, v(CodeClass::Both)?, v(CodeClass::EaBound)?);
            let floor = frac(1, (k * k) as i64);
            if !(both >= floor && both <= ns && ns <= ea && both <= ppt) {
                bad.push(format!("d={d} alpha={alpha} n={n} K={k}"));
            }
            count += 1;
        }
    }
    outcome(bad.is_empty(), format!("{count} instances, violations {bad:?}"))
}

type Criterion = (u32, &'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "Example 1 exact reproduction", example1),
        (2, "zero-error PPT thresholds", zero_error_thresholds),
        (3, "one-use separation triple", separation_triple),
        (4, "Figure 4 trends", figure4_trends),
        (5, "Figure 5 orderings", figure5_orderings),
        (6, "Horodecki 1/K", horodecki_one_over_k),
        (7, "LP/SDP cross-validation", lp_sdp_cross_validation),
        (8, "formula/oracle equivalence", oracle_equivalence),
        (9, "supermap identities", supermap_identities),
        (10, "superactivation fixture", superactivation),
        (11, "trivial floor and class monotonicity", floor_and_monotonicity),
    ];
    let mut unexpected = Vec::new();
    for (id, title, run) in criteria {
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let verdict = if passed { "PASS" } else { "FAIL" };
        let known = KNOWN_FAILURES.contains(&id);
        let note = match (passed, known) {
            (false, true) => " (known failure)",
            (true, true) => " (listed as a known failure but passed)",
            _ => "",
        };
        println!("criterion {id:>2} {verdict} {title}{note}: {detail} [{:.1} s]", start.elapsed().as_secs_f64());
        if !passed && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
