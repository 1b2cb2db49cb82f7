use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Constraint family a code is optimized over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeClass {
    /// Non-signalling in both directions.
    Ns,
    /// PPT-preserving and Bob-to-Alice non-signalling.
    Ppt,
    /// Both constraint sets at once.
    Both,
    /// The non-signalling marginal equality relaxed to an inequality.
    EaBound,
}

impl CodeClass {
    pub const ALL: [CodeClass; 4] = [CodeClass::Ns, CodeClass::Ppt, CodeClass::Both, CodeClass::EaBound];

    pub fn has_ns_equality(self) -> bool {
        matches!(self, CodeClass::Ns | CodeClass::Both)
    }

    pub fn has_ppt(self) -> bool {
        matches!(self, CodeClass::Ppt | CodeClass::Both)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CodeClass::Ns => "ns",
            CodeClass::Ppt => "ppt",
            CodeClass::Both => "both",
            CodeClass::EaBound => "eabound",
        }
    }
}

impl fmt::Display for CodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "ns" => Ok(CodeClass::Ns),
            "ppt" | "pptp" => Ok(CodeClass::Ppt),
            "both" | "ns+ppt" => Ok(CodeClass::Both),
            "eabound" | "ea" => Ok(CodeClass::EaBound),
            other => Err(Error::Parse(format!("unknown code class {other:?}"))),
        }
    }
}

impl serde::Serialize for CodeClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}
