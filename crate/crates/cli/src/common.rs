use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::Args;
use nsppt_core::channel_spec::ChannelSpec;
use nsppt_core::rational::parse_rational;
use nsppt_core::CodeClass;

pub const VERIFY_FAILED: i32 = 1;
pub const INPUT_ERROR: i32 = 2;
pub const SOLVER_FAILED: i32 = 3;
pub const SWEEP_FAILED: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

pub trait Coded<T> {
    fn code(self, code: i32) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Coded<T> for Result<T, E> {
    fn code(self, code: i32) -> Result<T, Failure> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

pub fn fail(code: i32, msg: impl Into<String>) -> Failure {
    Failure { code, error: anyhow!(msg.into()) }
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    /// Inline JSON channel spec.
    #[arg(long, conflicts_with_all = ["channel_file", "d"])]
    pub channel: Option<String>,
    /// Path to a JSON channel spec.
    #[arg(long, conflicts_with = "d")]
    pub channel_file: Option<PathBuf>,
    /// Werner-Holevo dimension (shortcut for a werner_holevo spec).
    #[arg(long)]
    pub d: Option<usize>,
    /// Werner-Holevo parameter as "p/q" or an integer.
    #[arg(long, default_value = "1")]
    pub alpha: String,
    /// Number of channel uses; overrides the spec's value.
    #[arg(long)]
    pub uses: Option<usize>,
}

impl ChannelArgs {
    pub fn spec(&self) -> Result<ChannelSpec, Failure> {
        let spec = if let Some(text) = &self.channel {
            ChannelSpec::parse(text).code(INPUT_ERROR)?
        } else if let Some(path) = &self.channel_file {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .code(INPUT_ERROR)?;
            ChannelSpec::parse(&text).code(INPUT_ERROR)?
        } else if let Some(d) = self.d {
            let alpha = parse_rational(&self.alpha).code(INPUT_ERROR)?;
            ChannelSpec::werner(d, &alpha, 1)
        } else {
            return Err(fail(INPUT_ERROR, "give a channel with --channel, --channel-file or --d/--alpha"));
        };
        let spec = match self.uses {
            Some(0) => return Err(fail(INPUT_ERROR, "--uses must be at least 1")),
            Some(n) => spec.with_uses(n),
            None => spec,
        };
        spec.single_use().code(INPUT_ERROR)?;
        Ok(spec)
    }
}

pub fn parse_class(s: &str) -> Result<CodeClass, String> {
    s.parse::<CodeClass>().map_err(|e| e.to_string())
}

/// `v` with 15 significant digits.
pub fn sig15(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = 14 - magnitude;
    if (0..=30).contains(&decimals) {
        format!("{v:.*}", decimals as usize)
    } else {
        format!("{v:.14e}")
    }
}

pub fn sig15_value(v: f64) -> Option<f64> {
    v.is_finite().then(|| sig15(v).parse().unwrap_or(v))
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())).code(INPUT_ERROR),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).code(INPUT_ERROR)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(-0.5), "-0.500000000000000");
        assert_eq!(sig15(-123.06), "-123.060000000000");
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(f64::NEG_INFINITY), "-inf");
    }
}
