use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::groups::GroupModel;

/// The four sparsity models compared throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SparsityModel {
    Standard,
    Joint,
    Tree,
    Forest,
}

impl SparsityModel {
    pub const ALL: [SparsityModel; 4] = [
        SparsityModel::Standard,
        SparsityModel::Joint,
        SparsityModel::Tree,
        SparsityModel::Forest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SparsityModel::Standard => "standard",
            SparsityModel::Joint => "joint",
            SparsityModel::Tree => "tree",
            SparsityModel::Forest => "forest",
        }
    }

    /// Group model used by the overlapping-group solver, if any.
    pub fn group_model(self) -> Option<GroupModel> {
        match self {
            SparsityModel::Tree => Some(GroupModel::Tree),
            SparsityModel::Forest => Some(GroupModel::Forest),
            _ => None,
        }
    }
}

impl fmt::Display for SparsityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SparsityModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "l1" => Ok(Self::Standard),
            "joint" => Ok(Self::Joint),
            "tree" => Ok(Self::Tree),
            "forest" => Ok(Self::Forest),
            other => Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        }
    }
}

/// Parses a comma-separated model list.
pub fn parse_models(s: &str) -> Result<Vec<SparsityModel>, Error> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect()
}
