//! JSON channel descriptions, e.g.
//! `{"kind":"werner_holevo","d":3,"alpha":"1","uses":2}`,
//! `{"kind":"depolarizing","d":2,"f":0.75}` or
//! `{"kind":"choi","in_dim":2,"out_dim":2,"matrix":[[re,im],...]}`.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::channel::{
    dephasing, depolarizing, identity_channel, symmetric_classical, werner_holevo, ChannelChoi, RationalChannel,
};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

/// Rejection threshold for user-supplied Choi matrices.
pub const SPEC_TOL: f64 = 1e-8;

/// A rational given as `"p/q"` text or a JSON integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalValue {
    Integer(i64),
    Text(String),
}

impl RationalValue {
    pub fn value(&self) -> Result<BigRational> {
        match self {
            RationalValue::Integer(v) => Ok(crate::rational::int(*v)),
            RationalValue::Text(t) => parse_rational(t),
        }
    }
}

fn one_use() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    WernerHolevo {
        d: usize,
        alpha: RationalValue,
        #[serde(default = "one_use")]
        uses: usize,
    },
    Depolarizing {
        d: usize,
        f: f64,
        #[serde(default = "one_use")]
        uses: usize,
    },
    SymmetricClassical {
        d: usize,
        p: f64,
        #[serde(default = "one_use")]
        uses: usize,
    },
    Dephasing {
        d: usize,
        #[serde(default = "one_use")]
        uses: usize,
    },
    Identity {
        d: usize,
        #[serde(default = "one_use")]
        uses: usize,
    },
    Choi {
        in_dim: usize,
        out_dim: usize,
        matrix: Vec<[f64; 2]>,
        #[serde(default = "one_use")]
        uses: usize,
    },
}

impl ChannelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("channel spec: {e}")))?;
        if spec.uses() == 0 {
            return Err(Error::Parse("channel spec: uses must be at least 1".into()));
        }
        Ok(spec)
    }

    pub fn werner(d: usize, alpha: &BigRational, uses: usize) -> Self {
        ChannelSpec::WernerHolevo { d, alpha: RationalValue::Text(format_rational(alpha)), uses }
    }

    pub fn uses(&self) -> usize {
        match self {
            ChannelSpec::WernerHolevo { uses, .. }
            | ChannelSpec::Depolarizing { uses, .. }
            | ChannelSpec::SymmetricClassical { uses, .. }
            | ChannelSpec::Dephasing { uses, .. }
            | ChannelSpec::Identity { uses, .. }
            | ChannelSpec::Choi { uses, .. } => *uses,
        }
    }

    pub fn with_uses(mut self, n: usize) -> Self {
        match &mut self {
            ChannelSpec::WernerHolevo { uses, .. }
            | ChannelSpec::Depolarizing { uses, .. }
            | ChannelSpec::SymmetricClassical { uses, .. }
            | ChannelSpec::Dephasing { uses, .. }
            | ChannelSpec::Identity { uses, .. }
            | ChannelSpec::Choi { uses, .. } => *uses = n,
        }
        self
    }

    /// `(d, α)` for Werner-Holevo specs.
    pub fn werner_params(&self) -> Result<Option<(usize, BigRational)>> {
        match self {
            ChannelSpec::WernerHolevo { d, alpha, .. } => Ok(Some((*d, alpha.value()?))),
            _ => Ok(None),
        }
    }

    /// The single-use channel, validated to [`SPEC_TOL`].
    pub fn single_use(&self) -> Result<ChannelChoi> {
        let ch = match self {
            ChannelSpec::WernerHolevo { d, alpha, .. } => werner_holevo(*d, &alpha.value()?)?.to_complex(),
            ChannelSpec::Depolarizing { d, f, .. } => depolarizing(*d, *f)?,
            ChannelSpec::SymmetricClassical { d, p, .. } => symmetric_classical(*d, *p)?,
            ChannelSpec::Dephasing { d, .. } => dephasing(*d)?,
            ChannelSpec::Identity { d, .. } => identity_channel(*d)?,
            ChannelSpec::Choi { in_dim, out_dim, matrix, .. } => {
                let side = in_dim * out_dim;
                if matrix.len() != side * side {
                    return Err(Error::InvalidChannel(format!(
                        "matrix has {} entries, expected ({in_dim}·{out_dim})² = {}",
                        matrix.len(),
                        side * side
                    )));
                }
                let data = matrix.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                ChannelChoi::from_matrix(*in_dim, *out_dim, data)?
            }
        };
        ch.validate(SPEC_TOL)?;
        Ok(ch)
    }

    /// All uses, as one channel.
    pub fn channel(&self) -> Result<ChannelChoi> {
        self.single_use()?.tensor_power(self.uses())
    }

    /// Exact channel for specs with rational data.
    pub fn exact_channel(&self) -> Result<Option<RationalChannel>> {
        let ch = match self {
            ChannelSpec::WernerHolevo { d, alpha, .. } => werner_holevo(*d, &alpha.value()?)?,
            ChannelSpec::Dephasing { d, .. } => dephasing(*d)?,
            ChannelSpec::Identity { d, .. } => identity_channel(*d)?,
            _ => return Ok(None),
        };
        Ok(Some(ch.tensor_power(self.uses())?))
    }
}
