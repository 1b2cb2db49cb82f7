use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use nsppt_core::channel_spec::ChannelSpec;
use nsppt_core::code_sdp::{self, CodeProblem};
use nsppt_core::rational::{format_rational, log2, to_f64};
use nsppt_core::werner_lp::wh_fidelity;
use nsppt_core::CodeClass;
use nsppt_sdp::SolverOptions;

use crate::common::{emit, fail, parse_class, sig15_value, ChannelArgs, Coded, Failure, INPUT_ERROR, SOLVER_FAILED};
use crate::Globals;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Sdp,
    Both,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Code size K.
    #[arg(long, default_value = "2")]
    pub size: BigInt,
    #[arg(long, value_parser = parse_class, default_value = "both")]
    pub class: CodeClass,
    /// Defaults to exact for Werner-Holevo channels and sdp otherwise.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
pub struct Record {
    pub channel: ChannelSpec,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: serde_json::Value,
    pub class: CodeClass,
    pub method: &'static str,
    pub fidelity_exact: Option<String>,
    pub fidelity_float: f64,
    pub log2_fidelity: Option<f64>,
    pub solver_gap: Option<f64>,
    pub wall_ms: f64,
}

pub fn run(args: Args, g: &Globals) -> Result<(), Failure> {
    let spec = args.channel.spec()?;
    if args.size < BigInt::from(1) {
        return Err(fail(INPUT_ERROR, "--size must be at least 1"));
    }
    let werner = spec.werner_params().code(INPUT_ERROR)?;
    let method = args.method.unwrap_or(if werner.is_some() { Method::Exact } else { Method::Sdp });
    let start = Instant::now();
    let exact = match method {
        Method::Exact | Method::Both => {
            let (d, alpha) = werner.ok_or_else(|| fail(INPUT_ERROR, "the exact method needs a werner_holevo channel"))?;
            Some(wh_fidelity(d as u64, &alpha, spec.uses() as u64, &args.size, args.class).code(SOLVER_FAILED)?)
        }
        Method::Sdp => None,
    };
    let sdp = match method {
        Method::Sdp | Method::Both => {
            let k = args.size.to_u64().ok_or_else(|| fail(INPUT_ERROR, "code size too large for the SDP"))?;
            let channel = spec.channel().code(INPUT_ERROR)?;
            let problem = CodeProblem::new(channel, k, args.class).code(INPUT_ERROR)?;
            Some(code_sdp::solve(&problem, &SolverOptions::default()).code(SOLVER_FAILED)?)
        }
        Method::Exact => None,
    };
    let fidelity_float = match (&sdp, &exact) {
        (Some(s), _) => s.value,
        (None, Some(e)) => to_f64(e),
        (None, None) => unreachable!("some method always runs"),
    };
    if let (Some(s), Some(e)) = (&sdp, &exact) {
        let diff = (s.value - to_f64(e)).abs();
        if diff > g.tol {
            return Err(fail(
                SOLVER_FAILED,
                format!("SDP value {} differs from the exact value {} by {diff:e}", s.value, format_rational(e)),
            ));
        }
    }
    let log2_fidelity = match &exact {
        Some(e) => sig15_value(log2(e)),
        None => sig15_value(fidelity_float.log2()),
    };
    let record = Record {
        n: spec.uses(),
        k: match args.size.to_u64() {
            Some(k) => k.into(),
            None => args.size.to_string().into(),
        },
        class: args.class,
        method: match method {
            Method::Exact => "exact",
            Method::Sdp => "sdp",
            Method::Both => "both",
        },
        fidelity_exact: exact.as_ref().map(format_rational),
        fidelity_float,
        log2_fidelity,
        solver_gap: sdp.as_ref().and_then(|s| s.gap()),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        channel: spec,
    };
    let text = serde_json::to_string_pretty(&record).code(INPUT_ERROR)? + "\n";
    emit(args.out.as_deref(), &text)
}
