use serde::{Deserialize, Serialize};

/// How many members a rule part contributes at level `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartSize {
    Level,
    LevelMinusOne,
    /// `⌈l/2⌉`
    HalfUp,
    /// `⌊l/2⌋`
    HalfDown,
    One,
}

impl PartSize {
    pub fn resolve(self, level: usize) -> usize {
        match self {
            PartSize::Level => level,
            PartSize::LevelMinusOne => level.saturating_sub(1),
            PartSize::HalfUp => level.div_ceil(2),
            PartSize::HalfDown => level / 2,
            PartSize::One => 1,
        }
    }
}

/// A cyclic pool of variables from which one part of a subset is drawn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulePart {
    pub pool: Vec<usize>,
    /// Pool member that every subset keeps; the remaining members start `t` steps
    /// after it at depth `t`. Without an anchor the part is the window starting at
    /// pool position `t - 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<usize>,
    pub size: PartSize,
}

impl RulePart {
    pub fn new(pool: Vec<usize>, anchor: Option<usize>, size: PartSize) -> Self {
        Self { pool, anchor, size }
    }

    pub fn members(&self, level: usize, depth: usize) -> Vec<usize> {
        let size = self.size.resolve(level);
        match self.anchor {
            Some(a) => {
                let pos = self.pool.iter().position(|&v| v == a).unwrap_or(0);
                anchored_walk(&self.pool, pos, size, depth)
            }
            None => cyclic_window(&self.pool, depth.saturating_sub(1), size),
        }
    }
}

/// Ordered subset generator attached to a constraint (or an implicit domain
/// constraint) by the problem encoders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubsetRule {
    /// Consecutive windows `{i_t, ..., i_{t+l-1}}` of each containing clique.
    #[default]
    Ordered,
    /// `{i, i_{j(i)+t}, ..., i_{j(i)+t+l-2}}` inside each clique containing `var`.
    Anchored { var: usize },
    /// No sublevel blocks for this constraint.
    Skip,
    /// Union of parts drawn from fixed variable pools.
    Mixed { parts: Vec<RulePart> },
}

/// `size` members of `pool` read cyclically from position `start`.
pub fn cyclic_window(pool: &[usize], start: usize, size: usize) -> Vec<usize> {
    if pool.is_empty() {
        return Vec::new();
    }
    let size = size.min(pool.len());
    let mut out: Vec<usize> = (0..size).map(|k| pool[(start + k) % pool.len()]).collect();
    out.sort_unstable();
    out
}

/// The anchor at `pos` plus the members at `pos + depth, pos + depth + 1, ...`
/// (cyclic) until `size` distinct members are collected.
pub fn anchored_walk(pool: &[usize], pos: usize, size: usize, depth: usize) -> Vec<usize> {
    let len = pool.len();
    if len == 0 || size == 0 {
        return Vec::new();
    }
    let size = size.min(len);
    let mut out = vec![pool[pos]];
    let mut step = depth;
    let mut guard = 0;
    while out.len() < size && guard < 2 * len + depth {
        let v = pool[(pos + step) % len];
        if !out.contains(&v) {
            out.push(v);
        }
        step += 1;
        guard += 1;
    }
    out.sort_unstable();
    out
}
