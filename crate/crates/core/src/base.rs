//! Shared ground types: vertex identifiers, labels, color sets, labelings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// A vertex identifier. Ids are positive, unique within a graph, and bounded
/// by the declared id bound `N`, so an id always fits in `ceil(log2 N)` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of palette colors, stored as a bitmask. Colors are 1-based
/// consecutive integers, matching `[k] = {1, ..., k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColorSet(pub u64);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    pub fn singleton(color: u32) -> Self {
        debug_assert!((1..=64).contains(&color));
        ColorSet(1u64 << (color - 1))
    }

    pub fn from_iter<I: IntoIterator<Item = u32>>(colors: I) -> Self {
        let mut s = ColorSet(0);
        for c in colors {
            s = s.with(c);
        }
        s
    }

    pub fn with(self, color: u32) -> Self {
        debug_assert!((1..=64).contains(&color));
        ColorSet(self.0 | (1u64 << (color - 1)))
    }

    pub fn contains(self, color: u32) -> bool {
        (1..=64).contains(&color) && self.0 & (1u64 << (color - 1)) != 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ColorSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = u32> {
        (1..=64u32).filter(move |c| self.contains(*c))
    }

    /// All nonempty subsets of `[palette]` with at most `p` colors, in
    /// lexicographic order of their sorted color lists.
    pub fn subsets_up_to(palette: u32, p: u32) -> Vec<ColorSet> {
        assert!(palette <= 63, "palette too large for bitmask color sets");
        let mut out = Vec::new();
        let full = if palette == 0 { 0 } else { (1u64 << palette) - 1 };
        let mut m = 1u64;
        while m <= full {
            if m & full == m && m.count_ones() <= p && m != 0 {
                out.push(ColorSet(m));
            }
            m += 1;
        }
        out.sort_by_key(|s| {
            let mut key: Vec<u32> = s.iter().collect();
            key.insert(0, s.len());
            key
        });
        out
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// The base symbol of a pipeline-allocated fresh label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FreshBase {
    /// Marks nodes from which the eliminated variable can be witnessed.
    Good,
    /// Marks nodes whose branch (child subtree of the pivot, or tree) holds a
    /// witness candidate; propagated downward so tuple variables can see it.
    BranchGood,
    /// A clamped counter value in `[0, k+1]` (number of good children of the
    /// pivot, or number of active roots).
    Count(u32),
    /// Depth of a forest ancestor adjacent in the host graph.
    Level(u32),
}

/// A vertex label. User labels are symbols from the declared alphabet; the
/// remaining variants are allocated by pipeline stages and never collide
/// across stages thanks to the stage counter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    /// A symbol of the user-declared alphabet.
    Sym(String),
    /// Fresh label namespaced by (stage counter, type index, base symbol).
    Fresh { stage: u32, tidx: u32, base: FreshBase },
    /// Skeleton color recorded as a label when lca predicates are removed.
    Color { stage: u32, color: u32 },
    /// Depth in the decomposition forest of color set `u`, recorded as a
    /// label when lca predicates are removed.
    DepthU { stage: u32, u: ColorSet, depth: u32 },
}

impl Label {
    pub fn sym(s: &str) -> Label {
        Label::Sym(s.to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Sym(s) => write!(f, "{s}"),
            Label::Fresh { stage, tidx, base } => match base {
                FreshBase::Good => write!(f, "good@{stage}.{tidx}"),
                FreshBase::BranchGood => write!(f, "brgood@{stage}.{tidx}"),
                FreshBase::Count(m) => write!(f, "cnt{m}@{stage}.{tidx}"),
                FreshBase::Level(i) => write!(f, "lvl{i}@{stage}.{tidx}"),
            },
            Label::Color { stage, color } => write!(f, "col{color}@{stage}"),
            Label::DepthU { stage, u, depth } => write!(f, "dep{depth}{u}@{stage}"),
        }
    }
}

/// A per-vertex label assignment.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling(pub BTreeMap<VertexId, BTreeSet<Label>>);

impl Labeling {
    pub fn new() -> Self {
        Labeling(BTreeMap::new())
    }

    pub fn get(&self, v: VertexId) -> BTreeSet<Label> {
        self.0.get(&v).cloned().unwrap_or_default()
    }

    pub fn has(&self, v: VertexId, label: &Label) -> bool {
        self.0.get(&v).map_or(false, |s| s.contains(label))
    }

    pub fn add(&mut self, v: VertexId, label: Label) {
        self.0.entry(v).or_default().insert(label);
    }

    /// Pointwise union with another labeling.
    pub fn union_with(&mut self, other: &Labeling) {
        for (v, labels) in &other.0 {
            self.0.entry(*v).or_default().extend(labels.iter().cloned());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colorset_subsets() {
        let subs = ColorSet::subsets_up_to(3, 2);
        assert_eq!(subs.len(), 6); // {1},{2},{3},{1,2},{1,3},{2,3}
        assert_eq!(subs[0], ColorSet::singleton(1));
        assert!(subs[3].len() == 2);
        let all = ColorSet::subsets_up_to(3, 3);
        assert_eq!(all.len(), 7);
    }

    #[test]
    fn colorset_ops() {
        let u = ColorSet::from_iter([1, 3]);
        assert!(u.contains(1) && !u.contains(2) && u.contains(3));
        assert!(ColorSet::singleton(3).is_subset(u));
        assert_eq!(u.to_string(), "{1,3}");
    }
}
