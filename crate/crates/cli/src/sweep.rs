use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use nsppt_core::rational::{log2, parse_rational, to_f64};
use nsppt_core::werner_lp::{rate_schedule, wh_fidelity};
use nsppt_core::CodeClass;

use crate::common::{emit, fail, parse_class, sig15, ChannelArgs, Coded, Failure, INPUT_ERROR, SWEEP_FAILED};
use crate::Globals;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Rate base c as "p/q"; row n uses K = floor(c^n).
    #[arg(long, conflicts_with_all = ["k_from", "k_to"])]
    pub rate: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub n_from: u64,
    #[arg(long, default_value_t = 120)]
    pub n_to: u64,
    #[arg(long, default_value_t = 10)]
    pub step: u64,
    /// Without --rate: smallest code size, at the channel's number of uses.
    #[arg(long, default_value_t = 1)]
    pub k_from: u64,
    #[arg(long, default_value_t = 10)]
    pub k_to: u64,
    /// One or more classes, comma separated.
    #[arg(long, value_parser = parse_class, value_delimiter = ',', default_value = "both")]
    pub class: Vec<CodeClass>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Row {
    n: u64,
    k: BigInt,
    class: CodeClass,
}

pub fn run(args: Args, g: &Globals) -> Result<(), Failure> {
    let spec = args.channel.spec()?;
    let (d, alpha) = spec
        .werner_params()
        .code(INPUT_ERROR)?
        .ok_or_else(|| fail(INPUT_ERROR, "sweeps need a werner_holevo channel"))?;
    let mut rows = Vec::new();
    match &args.rate {
        Some(rate) => {
            let c: BigRational = parse_rational(rate).code(INPUT_ERROR)?;
            if c < BigRational::from_integer(1.into()) {
                return Err(fail(INPUT_ERROR, "the rate base c must be at least 1"));
            }
            if args.step == 0 || args.n_from == 0 || args.n_from > args.n_to {
                return Err(fail(INPUT_ERROR, "need 1 ≤ --n-from ≤ --n-to and --step ≥ 1"));
            }
            for n in (args.n_from..=args.n_to).step_by(args.step as usize) {
                let k = rate_schedule(&c, n);
                for &class in &args.class {
                    rows.push(Row { n, k: k.clone(), class });
                }
            }
        }
        None => {
            if args.k_from == 0 || args.k_from > args.k_to {
                return Err(fail(INPUT_ERROR, "need 1 ≤ --k-from ≤ --k-to"));
            }
            let n = spec.uses() as u64;
            for k in args.k_from..=args.k_to {
                for &class in &args.class {
                    rows.push(Row { n, k: k.into(), class });
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(g.jobs).build().code(INPUT_ERROR)?;
    let values: Vec<_> = pool.install(|| {
        rows.par_iter().map(|r| wh_fidelity(d as u64, &alpha, r.n, &r.k, r.class)).collect()
    });
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "K", "class", "fid_num", "fid_den", "fid_float", "log2_fid"]).code(SWEEP_FAILED)?;
    for (r, v) in rows.iter().zip(values) {
        let f = v.map_err(|e| fail(SWEEP_FAILED, format!("row n={} K={} {}: {e}", r.n, r.k, r.class)))?;
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            r.class.to_string(),
            f.numer().to_string(),
            f.denom().to_string(),
            to_f64(&f).to_string(),
            sig15(log2(&f)),
        ])
        .code(SWEEP_FAILED)?;
    }
    let bytes = w.into_inner().map_err(|e| fail(SWEEP_FAILED, e.to_string()))?;
    emit(args.out.as_deref(), &String::from_utf8(bytes).code(SWEEP_FAILED)?)
}
