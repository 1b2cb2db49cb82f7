use clap::ValueEnum;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nsppt_core::channel::{
    dephasing, depolarizing, identity_channel, random_channel, superactivation_z, symmetric_classical,
    symmetric_classical_exact, werner_holevo, ChannelChoi,
};
use nsppt_core::code_sdp::{self, check_dual_exact, check_primal_exact, horodecki_dual_point_exact, CodeProblem};
use nsppt_core::rational::{format_rational, frac, int};
use nsppt_core::supermaps::Supermap;
use nsppt_core::werner_lp::{self, lambda_from_x};
use nsppt_core::CodeClass;
use nsppt_sdp::SolverOptions;

use crate::common::{fail, Coded, Failure, VERIFY_FAILED};
use crate::Globals;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Example1,
    Horodecki,
    Superactivation,
    Supermaps,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(value_enum)]
    pub target: Target,
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct Report {
    target: Target,
    passed: bool,
    checks: Vec<Check>,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    /// Records a check whose evaluation itself failed.
    fn run(&mut self, name: &str, f: impl FnOnce() -> nsppt_core::Result<(bool, String)>) {
        match f() {
            Ok((passed, detail)) => self.add(name, passed, detail),
            Err(e) => self.add(name, false, format!("error: {e}")),
        }
    }
}

pub fn run(args: Args, g: &Globals) -> Result<(), Failure> {
    let mut checks = Checks::default();
    match args.target {
        Target::Example1 => example1(&mut checks),
        Target::Horodecki => horodecki(&mut checks, g.tol),
        Target::Superactivation => superactivation(&mut checks),
        Target::Supermaps => supermaps(&mut checks, g.seed),
    }
    let passed = checks.0.iter().all(|c| c.passed);
    let report = Report { target: args.target, passed, checks: checks.0 };
    println!("{}", serde_json::to_string_pretty(&report).code(VERIFY_FAILED)?);
    if passed {
        Ok(())
    } else {
        Err(fail(VERIFY_FAILED, "verification failed"))
    }
}

fn example1(c: &mut Checks) {
    let witness = vec![frac(1, 96), frac(7, 288), frac(1, 9)];
    let lp = match werner_lp::build(3, &int(1), 2, &BigInt::from(2), CodeClass::Both) {
        Ok(lp) => lp,
        Err(e) => return c.add("lp_build", false, e.to_string()),
    };
    c.run("lp_optimum_is_one", || {
        let v = lp.solve()?.value;
        Ok((v == int(1), format!("value {}", format_rational(&v))))
    });
    let feasible = lp.to_rational_lp().is_feasible(&witness);
    c.add("witness_lp_feasible", feasible, "x = (1/96, 7/288, 1/9)");
    let ns = lp.ns_activity(&witness) - frac(1, 4);
    c.add("ns_equality", ns == int(0), format!("residual {}", format_rational(&ns)));
    let row = &lp.ppt_activity(&witness)[2];
    c.add("ppt_row_2_tight", *row == frac(1, 18), format!("activity {}", format_rational(row)));
    c.run("lifted_point_exact", || {
        let pt = lambda_from_x(&witness, 2, 3)?;
        let channel = werner_holevo(3, &int(1))?.tensor_power(2)?;
        let r = check_primal_exact(&pt, &CodeProblem::new(channel, 2, CodeClass::Both)?)?;
        Ok((r.passed() && r.value == int(1), format!("{r:?}")))
    });
}

fn horodecki(c: &mut Checks, tol: f64) {
    c.run("dephasing_dual_certificate", || {
        let ch = dephasing::<BigRational>(3)?;
        let dp = horodecki_dual_point_exact(&ch, 2)?;
        let r = check_dual_exact(&dp, &CodeProblem::new(ch, 2, CodeClass::Ppt)?)?;
        Ok((r.passed() && r.value == frac(1, 2), format!("value {}", format_rational(&r.value))))
    });
    c.run("dephasing_sdp", || {
        let p = CodeProblem::new(dephasing(3)?, 2, CodeClass::Ppt)?;
        let s = code_sdp::solve(&p, &SolverOptions::default())?;
        let err = (s.value - 0.5).abs();
        Ok((err <= tol, format!("value {}, error {err:e}", s.value)))
    });
    let alpha = frac(1, 2);
    for k in [2u64, 3] {
        c.run(&format!("werner_holevo_lp_k{k}"), || {
            let v = werner_lp::wh_fidelity(3, &alpha, 1, &BigInt::from(k), CodeClass::Ppt)?;
            Ok((v == frac(1, k as i64), format!("value {}", format_rational(&v))))
        });
    }
    c.run("werner_holevo_dual_certificate_k3", || {
        let ch = werner_holevo(3, &alpha)?;
        let dp = horodecki_dual_point_exact(&ch, 3)?;
        let r = check_dual_exact(&dp, &CodeProblem::new(ch, 3, CodeClass::Ppt)?)?;
        Ok((r.passed() && r.value == frac(1, 3), format!("value {}", format_rational(&r.value))))
    });
}

fn superactivation(c: &mut Checks) {
    let z = superactivation_z();
    c.run("bob_to_alice_ns", || {
        let gap = z.bob_to_alice_gap()?;
        Ok((gap.is_zero(), format!("max residual {}", gap.to_complex().max_abs())))
    });
    c.run("alice_to_bob_ns", || {
        let gap = z.alice_to_bob_gap()?;
        Ok((gap.is_zero(), format!("max residual {}", gap.to_complex().max_abs())))
    });
    c.run("ppt", || {
        let exact = z.bob_transpose()?.is_psd_exact();
        let min = z.to_complex().bob_transpose()?.min_eigenvalue();
        Ok((exact && min >= -1e-10, format!("min partial-transpose eigenvalue {min:e}")))
    });
}

const SUPERMAP_TOL: f64 = 1e-10;

fn diff(a: &ChannelChoi, b: &ChannelChoi) -> nsppt_core::Result<f64> {
    a.flat().max_diff_by(&b.flat(), |v| v.norm())
}

fn supermaps(c: &mut Checks, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    c.run("teleport_permute_twirl", || {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let m = random_channel(4, 4, &mut rng)?;
            let p = m.success_probability_f64()?;
            let mut out = Supermap::Permute.apply(&m)?;
            out = Supermap::Teleport.apply(&out)?;
            out = Supermap::Twirl.apply(&out)?;
            worst = worst.max(diff(&out, &depolarizing(2, p)?)?);
        }
        Ok((worst <= SUPERMAP_TOL, format!("max entry error {worst:e} over 20 channels")))
    });
    c.run("twirl_dense_permute", || {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let n = random_channel(2, 2, &mut rng)?;
            let f = n.fidelity_f64()?;
            let mut out = Supermap::Twirl.apply(&n)?;
            out = Supermap::DenseCode.apply(&out)?;
            out = Supermap::Permute.apply(&out)?;
            worst = worst.max(diff(&out, &symmetric_classical(4, f)?)?);
        }
        Ok((worst <= SUPERMAP_TOL, format!("max entry error {worst:e} over 20 channels")))
    });
    for d in [2usize, 3] {
        c.run(&format!("teleport_identity_d{d}"), || {
            let out = Supermap::Teleport.apply(&symmetric_classical_exact(d * d, &int(1))?)?;
            Ok((out == identity_channel(d)?, "exact".to_string()))
        });
    }
}
