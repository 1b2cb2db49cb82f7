pub mod channel;
pub mod channel_spec;
pub mod class;
pub mod code_sdp;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod rational;
pub mod simplex;
pub mod supermaps;
pub mod werner_lp;

pub use class::CodeClass;
pub use error::{Error, Result};
pub use operator::{LabeledOperator, Operator, RationalOperator, SystemShape};
