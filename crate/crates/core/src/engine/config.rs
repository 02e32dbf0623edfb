use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundStrategy;
use crate::error::{KmeansError, Result};
use crate::run::DEFAULT_T_MAX;
use crate::tree::{TreeKind, DEFAULT_CAPACITY};

/// How the engine walks the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexMode {
    /// No index: points are assigned one by one.
    None,
    /// Traverse from the root every iteration, without stored bounds.
    Pure,
    /// Revisit the nodes and points each cluster holds.
    IndexSingle,
    /// Traverse from the root every iteration, with stored bounds.
    IndexMultiple,
    /// Time one root traversal against one cluster traversal and keep the
    /// faster.
    Adaptive,
}

impl IndexMode {
    pub const ALL: [IndexMode; 5] = [
        Self::None,
        Self::Pure,
        Self::IndexSingle,
        Self::IndexMultiple,
        Self::Adaptive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Pure => "pure",
            Self::IndexSingle => "single",
            Self::IndexMultiple => "multiple",
            Self::Adaptive => "adaptive",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "none" => Self::None,
            "pure" => Self::Pure,
            "single" | "index_single" | "index-single" => Self::IndexSingle,
            "multiple" | "index_multiple" | "index-multiple" => Self::IndexMultiple,
            "adaptive" => Self::Adaptive,
            _ => return None,
        })
    }
}

/// Engine configuration.
///
/// String form: `[kd-]<index>[+<bound>][+search]`, plus the shorthands
/// `lloyd`, `search` and `unik` (adaptive traversal with group bounds). A
/// bare bound name means no index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KnobConfig {
    pub index_mode: IndexMode,
    pub index_kind: TreeKind,
    pub bound_strategy: BoundStrategy,
    pub use_search: bool,
    pub capacity: usize,
    pub t_max: usize,
    pub seed: u64,
}

impl Default for KnobConfig {
    fn default() -> Self {
        Self {
            index_mode: IndexMode::None,
            index_kind: TreeKind::Ball,
            bound_strategy: BoundStrategy::None,
            use_search: false,
            capacity: DEFAULT_CAPACITY,
            t_max: DEFAULT_T_MAX,
            seed: 0,
        }
    }
}

impl KnobConfig {
    pub fn new(index_mode: IndexMode, bound_strategy: BoundStrategy) -> Self {
        Self {
            index_mode,
            bound_strategy,
            ..Self::default()
        }
    }

    pub fn lloyd() -> Self {
        Self::default()
    }

    /// Adaptive Ball-tree traversal with group bounds.
    pub fn adaptive_yinyang() -> Self {
        Self::new(IndexMode::Adaptive, BoundStrategy::Yinyang)
    }

    pub fn with_kind(mut self, kind: TreeKind) -> Self {
        self.index_kind = kind;
        self
    }

    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity;
        self
    }

    pub fn with_t_max(mut self, t_max: usize) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn is_lloyd(&self) -> bool {
        self.index_mode == IndexMode::None
            && self.bound_strategy == BoundStrategy::None
            && !self.use_search
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(KmeansError::Config(m.to_string()));
        if self.capacity == 0 {
            return err("capacity must be at least 1");
        }
        if self.t_max == 0 {
            return err("t_max must be at least 1");
        }
        if self.index_mode == IndexMode::Pure && self.bound_strategy != BoundStrategy::None {
            return err("the pure index does not combine with bounds");
        }
        if self.use_search
            && (self.index_mode != IndexMode::None || self.bound_strategy != BoundStrategy::None)
        {
            return err("search pre-assignment runs on its own, without index mode or bounds");
        }
        if self.index_kind == TreeKind::Kd && self.index_mode == IndexMode::None {
            return err("a kd-tree needs an index mode");
        }
        Ok(())
    }
}

impl fmt::Display for KnobConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_lloyd() {
            return f.write_str("lloyd");
        }
        if self.use_search
            && self.index_mode == IndexMode::None
            && self.bound_strategy == BoundStrategy::None
        {
            return f.write_str("search");
        }
        let mut parts: Vec<String> = Vec::new();
        if self.index_mode != IndexMode::None {
            let kd = if self.index_kind == TreeKind::Kd {
                "kd-"
            } else {
                ""
            };
            parts.push(format!("{kd}{}", self.index_mode.name()));
        }
        if self.bound_strategy != BoundStrategy::None {
            parts.push(self.bound_strategy.name().to_string());
        }
        if self.use_search {
            parts.push("search".into());
        }
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for KnobConfig {
    type Err = KmeansError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let mut cfg = Self::default();
        let mut index_set = false;
        let mut bound_set = false;
        for (pos, raw) in s.split('+').enumerate() {
            let mut tok = raw.trim();
            if pos == 0 {
                if let Some(rest) = tok.strip_prefix("kd-") {
                    cfg.index_kind = TreeKind::Kd;
                    tok = rest;
                }
            }
            match tok {
                "lloyd" if pos == 0 => {}
                "search" => cfg.use_search = true,
                "unik" if pos == 0 => {
                    cfg.index_mode = IndexMode::Adaptive;
                    cfg.bound_strategy = BoundStrategy::Yinyang;
                    index_set = true;
                    bound_set = true;
                }
                _ => {
                    if let (0, Some(m)) = (pos, IndexMode::parse(tok)) {
                        cfg.index_mode = m;
                        index_set = true;
                    } else if let Ok(b) = tok.parse::<BoundStrategy>() {
                        if bound_set {
                            return Err(KmeansError::Config(format!(
                                "`{s}` names two bound strategies"
                            )));
                        }
                        cfg.bound_strategy = b;
                        bound_set = true;
                    } else {
                        return Err(KmeansError::Config(format!(
                            "unknown configuration token `{tok}` in `{s}`"
                        )));
                    }
                }
            }
        }
        if cfg.index_kind == TreeKind::Kd && !index_set {
            return Err(KmeansError::Config(format!(
                "`{s}`: kd- prefix needs an index mode"
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_shorthands() {
        assert!("lloyd".parse::<KnobConfig>().unwrap().is_lloyd());
        let s: KnobConfig = "search".parse().unwrap();
        assert!(s.use_search);
        assert_eq!(
            "unik".parse::<KnobConfig>().unwrap(),
            KnobConfig::adaptive_yinyang()
        );
        let h: KnobConfig = "hame".parse().unwrap();
        assert_eq!(
            (h.index_mode, h.bound_strategy),
            (IndexMode::None, BoundStrategy::Hame)
        );
        let k: KnobConfig = "kd-pure".parse().unwrap();
        assert_eq!(
            (k.index_mode, k.index_kind),
            (IndexMode::Pure, TreeKind::Kd)
        );
    }

    #[test]
    fn display_round_trips() {
        for m in IndexMode::ALL {
            for b in BoundStrategy::ALL {
                for kind in [TreeKind::Ball, TreeKind::Kd] {
                    let cfg = KnobConfig::new(m, b).with_kind(kind);
                    if cfg.validate().is_err() {
                        continue;
                    }
                    let back: KnobConfig = cfg.to_string().parse().unwrap();
                    assert_eq!(back, cfg, "{cfg}");
                }
            }
        }
    }

    #[test]
    fn invalid_combinations() {
        assert!("pure+hame".parse::<KnobConfig>().is_err());
        assert!("single+search".parse::<KnobConfig>().is_err());
        assert!("hame+search".parse::<KnobConfig>().is_err());
        assert!("kd-hame".parse::<KnobConfig>().is_err());
        assert!("hame+elka".parse::<KnobConfig>().is_err());
        assert!("bogus".parse::<KnobConfig>().is_err());
        assert!(KnobConfig::lloyd().with_capacity(0).validate().is_err());
    }
}
