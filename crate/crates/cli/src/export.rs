use std::path::PathBuf;

use clap::ValueEnum;
use serde_json::json;

use nsppt_core::code_sdp::{build_dual, build_primal, CodeProblem};
use nsppt_core::CodeClass;
use nsppt_sdp::{sdpa, BlockKind};

use crate::common::{fail, parse_class, ChannelArgs, Coded, Failure, INPUT_ERROR};
use crate::Globals;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Program {
    Primal,
    Dual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Form {
    /// `[[Re, -Im], [Im, Re]]` blocks of twice the side.
    Embed,
    /// Real symmetric blocks; only for real data.
    Restrict,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, default_value_t = 2)]
    pub size: u64,
    #[arg(long, value_parser = parse_class, default_value = "both")]
    pub class: CodeClass,
    #[arg(long, value_enum, default_value = "primal")]
    pub program: Program,
    #[arg(long, value_enum, default_value = "embed")]
    pub form: Form,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: Args, _: &Globals) -> Result<(), Failure> {
    let spec = args.channel.spec()?;
    let channel = spec.channel().code(INPUT_ERROR)?;
    let problem = CodeProblem::new(channel, args.size, args.class).code(INPUT_ERROR)?;
    let hermitian = match args.program {
        Program::Primal => build_primal(&problem).code(INPUT_ERROR)?.program,
        Program::Dual => build_dual(&problem).code(INPUT_ERROR)?.program,
    };
    let real = match args.form {
        Form::Embed => hermitian.real_embed().code(INPUT_ERROR)?,
        Form::Restrict => hermitian
            .real_restriction()
            .code(INPUT_ERROR)?
            .ok_or_else(|| fail(INPUT_ERROR, "the program has complex data; use --form embed"))?,
    };
    let program = real.program.normalized();
    let text = sdpa::export(&program).code(INPUT_ERROR)?;
    std::fs::write(&args.out, text).code(INPUT_ERROR)?;
    let blocks: Vec<_> = program
        .blocks
        .iter()
        .map(|b| {
            let kind = match b.kind {
                BlockKind::Psd => "psd",
                BlockKind::Diagonal => "diagonal",
                BlockKind::Free => "free",
            };
            json!({"name": b.name, "size": b.size, "kind": kind})
        })
        .collect();
    let report = json!({
        "path": args.out.display().to_string(),
        "constraints": program.constraints.len(),
        "blocks": blocks,
    });
    println!("{}", serde_json::to_string_pretty(&report).code(INPUT_ERROR)?);
    Ok(())
}
