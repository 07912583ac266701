use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Subset selection heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    /// Random windows (seeded).
    H1,
    /// Windows in order.
    H2,
    /// Windows ranked by the norm of the first-order moment submatrix.
    H3,
    /// Windows ranked by the norm of the Laplacian submatrix.
    H4,
    /// Windows contained in many maximal cliques first.
    H5,
    /// Windows contained in few maximal cliques first.
    H6,
    H35,
    H45,
    /// The ordered generators attached to each constraint by the problem encoder.
    ProblemSpecific,
}

impl Heuristic {
    pub const ALL_GENERIC: [Heuristic; 8] = [
        Heuristic::H1,
        Heuristic::H2,
        Heuristic::H3,
        Heuristic::H4,
        Heuristic::H5,
        Heuristic::H6,
        Heuristic::H35,
        Heuristic::H45,
    ];

    pub fn needs_moments(self) -> bool {
        matches!(self, Heuristic::H3 | Heuristic::H35)
    }

    pub fn needs_laplacian(self) -> bool {
        matches!(self, Heuristic::H4 | Heuristic::H45)
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Heuristic::H1 => "h1",
            Heuristic::H2 => "h2",
            Heuristic::H3 => "h3",
            Heuristic::H4 => "h4",
            Heuristic::H5 => "h5",
            Heuristic::H6 => "h6",
            Heuristic::H35 => "h35",
            Heuristic::H45 => "h45",
            Heuristic::ProblemSpecific => "auto",
        };
        f.write_str(s)
    }
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "h1" => Heuristic::H1,
            "h2" => Heuristic::H2,
            "h3" => Heuristic::H3,
            "h4" => Heuristic::H4,
            "h5" => Heuristic::H5,
            "h6" => Heuristic::H6,
            "h35" | "h3-5" => Heuristic::H35,
            "h45" | "h4-5" => Heuristic::H45,
            "auto" | "problem" => Heuristic::ProblemSpecific,
            other => return Err(Error::Config(format!("unknown heuristic {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Dense,
    Sparse,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Dense => "dense",
            Mode::Sparse => "sparse",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(Mode::Dense),
            "sparse" => Ok(Mode::Sparse),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// A level or depth: one value for every constraint, or one per constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerOwner {
    Uniform(usize),
    List(Vec<usize>),
}

impl PerOwner {
    pub fn get(&self, owner: usize) -> usize {
        match self {
            PerOwner::Uniform(v) => *v,
            PerOwner::List(vs) => vs.get(owner).copied().unwrap_or(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SublevelConfig {
    /// Base relaxation order `d >= 1`.
    pub order: u32,
    pub level: PerOwner,
    pub depth: PerOwner,
    pub heuristic: Heuristic,
    pub seed: u64,
    pub mode: Mode,
}

impl SublevelConfig {
    pub fn new(order: u32, level: usize, depth: usize) -> Self {
        Self {
            order,
            level: PerOwner::Uniform(level),
            depth: PerOwner::Uniform(depth),
            heuristic: Heuristic::H2,
            seed: 0,
            mode: Mode::Sparse,
        }
    }

    /// Order-`d` relaxation without sublevel blocks (Shor's relaxation when `d = 1`).
    pub fn base(order: u32) -> Self {
        Self::new(order, 0, 0)
    }

    pub fn with_heuristic(mut self, h: Heuristic) -> Self {
        self.heuristic = h;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Effective `(level, depth)` inside a clique of size `tau`: nothing when either is
    /// zero, and the whole clique once at full level.
    pub fn effective(level: usize, depth: usize, tau: usize) -> Option<(usize, usize)> {
        if level == 0 || depth == 0 || tau == 0 {
            None
        } else if level >= tau {
            Some((tau, 1))
        } else {
            Some((level, depth))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_level_collapse() {
        assert_eq!(SublevelConfig::effective(0, 3, 5), None);
        assert_eq!(SublevelConfig::effective(2, 0, 5), None);
        assert_eq!(SublevelConfig::effective(7, 4, 5), Some((5, 1)));
        assert_eq!(SublevelConfig::effective(5, 4, 5), Some((5, 1)));
        assert_eq!(SublevelConfig::effective(3, 4, 5), Some((3, 4)));
    }

    #[test]
    fn heuristic_names_round_trip() {
        for h in Heuristic::ALL_GENERIC {
            assert_eq!(h.to_string().parse::<Heuristic>().unwrap(), h);
        }
        assert_eq!("auto".parse::<Heuristic>().unwrap(), Heuristic::ProblemSpecific);
        assert!("h7".parse::<Heuristic>().is_err());
    }
}
