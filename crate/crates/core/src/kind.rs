use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which generating function a computation refers to.
///
/// `Unrestricted` is `P_k` (parts are k-th powers, any multiplicity),
/// `Distinct` is `Q_k` (each k-th power used at most once).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    Unrestricted,
    Distinct,
}

impl PartitionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PartitionKind::Unrestricted => "unrestricted",
            PartitionKind::Distinct => "distinct",
        }
    }
}

impl fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartitionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "unrestricted" | "p" => Ok(PartitionKind::Unrestricted),
            "distinct" | "q" => Ok(PartitionKind::Distinct),
            other => Err(format!("unknown partition kind `{other}`")),
        }
    }
}
