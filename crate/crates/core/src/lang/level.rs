use std::fmt;

use serde::{Deserialize, Serialize};

/// A point of the two-element security lattice, ordered `Lo < Hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Lo,
    Hi,
}

impl Level {
    pub const ALL: [Level; 2] = [Level::Lo, Level::Hi];

    /// Lattice order.
    pub fn leq(self, other: Level) -> bool {
        self <= other
    }

    pub fn join(self, other: Level) -> Level {
        self.max(other)
    }

    pub fn meet(self, other: Level) -> Level {
        self.min(other)
    }

    /// Supremum of a family; the empty join is `Lo`.
    pub fn join_all<I: IntoIterator<Item = Level>>(levels: I) -> Level {
        levels.into_iter().fold(Level::Lo, Level::join)
    }

    /// Infimum of a family; the empty meet is `Hi`.
    pub fn meet_all<I: IntoIterator<Item = Level>>(levels: I) -> Level {
        levels.into_iter().fold(Level::Hi, Level::meet)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Level::Lo => "low",
            Level::Hi => "high",
        }
    }
}

/// Free-function form of [`Level::leq`].
pub fn leq(a: Level, b: Level) -> bool {
    a.leq(b)
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Lo => f.write_str("lo"),
            Level::Hi => f.write_str("hi"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order() {
        assert!(leq(Level::Lo, Level::Hi));
        assert!(!leq(Level::Hi, Level::Lo));
        assert!(leq(Level::Hi, Level::Hi));
        assert!(leq(Level::Lo, Level::Lo));
    }

    #[test]
    fn empty_bounds() {
        assert_eq!(Level::join_all([]), Level::Lo);
        assert_eq!(Level::meet_all([]), Level::Hi);
    }

    #[test]
    fn join_meet_are_max_min() {
        for a in Level::ALL {
            for b in Level::ALL {
                assert_eq!(a.join(b), if leq(a, b) { b } else { a });
                assert_eq!(a.meet(b), if leq(a, b) { a } else { b });
            }
        }
    }
}
