//! Names and process variables.
//!
//! A name is a base identifier plus a freshness index. User-written names
//! carry index 0; every fresh name minted by the library gets an index that
//! is unique within the term it was minted for. The concrete syntax spells
//! an indexed name as `base'index` (e.g. `x'3`), which is how indexed names
//! survive a print/parse round trip.

use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    pub base: String,
    pub index: u32,
}

impl Name {
    pub fn user(base: impl Into<String>) -> Name {
        Name { base: base.into(), index: 0 }
    }

    pub fn indexed(base: impl Into<String>, index: u32) -> Name {
        Name { base: base.into(), index }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}'{}", self.base, self.index)
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Recursion variable. Kept separate from `Name`: the two namespaces never
/// mix in the grammar or in substitution.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcVar {
    pub base: String,
    pub index: u32,
}

impl ProcVar {
    pub fn user(base: impl Into<String>) -> ProcVar {
        ProcVar { base: base.into(), index: 0 }
    }
}

impl fmt::Display for ProcVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}'{}", self.base, self.index)
        }
    }
}

impl fmt::Debug for ProcVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Deterministic fresh-name source. Indices are handed out monotonically,
/// so two encodings of the same term pick the same names.
#[derive(Clone, Debug)]
pub struct NameGen {
    next: u32,
}

impl NameGen {
    pub fn new() -> NameGen {
        NameGen { next: 1 }
    }

    pub fn starting_at(next: u32) -> NameGen {
        NameGen { next }
    }

    /// Start above every index already present in `names`, so minted names
    /// cannot collide with existing ones.
    pub fn above<'a>(names: impl IntoIterator<Item = &'a Name>) -> NameGen {
        let max = names.into_iter().map(|n| n.index).max().unwrap_or(0);
        NameGen { next: max + 1 }
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        let n = Name::indexed(base, self.next);
        self.next += 1;
        n
    }
}

impl Default for NameGen {
    fn default() -> Self {
        NameGen::new()
    }
}

/// Smallest index `i` such that `(base, i)` avoids every name in `avoid`.
pub fn fresh_against(base: &str, avoid: &std::collections::BTreeSet<Name>) -> Name {
    let mut i = 0u32;
    loop {
        let cand = Name::indexed(base, i);
        if !avoid.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips_index() {
        assert_eq!(Name::user("x").to_string(), "x");
        assert_eq!(Name::indexed("x", 3).to_string(), "x'3");
    }

    #[test]
    fn gen_above_existing() {
        let names = vec![Name::user("a"), Name::indexed("b", 7)];
        let mut g = NameGen::above(names.iter());
        assert_eq!(g.fresh("k"), Name::indexed("k", 8));
        assert_eq!(g.fresh("k"), Name::indexed("k", 9));
    }
}
