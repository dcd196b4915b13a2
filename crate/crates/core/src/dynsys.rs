//! Finite multivariable dynamical systems.
//!
//! A [`FiniteSystem`] is a point set `0..size` with `arity` total self-maps,
//! stored as lookup tables. Words over the map indices act by composition
//! with the rightmost letter innermost: `σ_w = σ_{w₀} ∘ … ∘ σ_{w_{k-1}}`,
//! which is the order forced by the covariance rule `f s_i = s_i (f ∘ σ_i)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};

/// A finite point set together with `arity` self-maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteSystem {
    size: usize,
    tables: Vec<Vec<usize>>,
}

impl FiniteSystem {
    /// Builds a system from its map tables, `tables[i][x] = σ_i(x)`.
    pub fn new(size: usize, tables: Vec<Vec<usize>>) -> Result<Self> {
        if size == 0 {
            return arg("a system needs at least one point");
        }
        if tables.is_empty() {
            return arg("a system needs at least one map");
        }
        for (i, t) in tables.iter().enumerate() {
            if t.len() != size {
                return arg(format!("map {i} has {} entries, expected {size}", t.len()));
            }
            if let Some((x, &y)) = t.iter().enumerate().find(|(_, &y)| y >= size) {
                return arg(format!("map {i} sends point {x} to {y}, out of range 0..{size}"));
            }
        }
        Ok(Self { size, tables })
    }

    /// The system on `size` points where every one of `arity` maps is the identity.
    pub fn identity(size: usize, arity: usize) -> Result<Self> {
        Self::new(size, vec![(0..size).collect(); arity])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.tables.len()
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }

    /// `σ_i(x)`. Panics on out-of-range indices.
    #[inline]
    pub fn map(&self, i: usize, x: usize) -> usize {
        self.tables[i][x]
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.size {
            return arg(format!("point {x} out of range 0..{}", self.size));
        }
        Ok(())
    }

    fn check_color(&self, i: usize) -> Result<()> {
        if i >= self.arity() {
            return arg(format!("map index {i} out of range 0..{}", self.arity()));
        }
        Ok(())
    }

    pub(crate) fn check_word(&self, w: &Word) -> Result<()> {
        w.letters().iter().try_for_each(|&l| self.check_color(l))
    }

    /// `σ_w(x)`, applying the rightmost letter first.
    pub fn evaluate_word(&self, w: &Word, x: usize) -> Result<usize> {
        self.check_word(w)?;
        self.check_point(x)?;
        Ok(self.eval_unchecked(w, x))
    }

    pub(crate) fn eval_unchecked(&self, w: &Word, x: usize) -> usize {
        w.letters().iter().rev().fold(x, |p, &l| self.tables[l][p])
    }

    /// The image `σ_i(X)`.
    pub fn map_range(&self, i: usize) -> Result<BTreeSet<usize>> {
        self.check_color(i)?;
        Ok(self.tables[i].iter().copied().collect())
    }

    /// The lexicographically least `(i, j, point)` with `i < j` and `point` in
    /// both `σ_i(X)` and `σ_j(X)`, if any.
    pub fn range_overlap(&self) -> Option<RangeOverlap> {
        let ranges: Vec<Vec<bool>> = self
            .tables
            .iter()
            .map(|t| {
                let mut hit = vec![false; self.size];
                t.iter().for_each(|&y| hit[y] = true);
                hit
            })
            .collect();
        for i in 0..self.arity() {
            for j in i + 1..self.arity() {
                if let Some(point) = (0..self.size).find(|&p| ranges[i][p] && ranges[j][p]) {
                    return Some(RangeOverlap { first: i, second: j, point });
                }
            }
        }
        None
    }

    pub fn ranges_pairwise_disjoint(&self) -> bool {
        self.range_overlap().is_none()
    }

    /// Partition of the points into the classes generated by `x ~ z` whenever
    /// `σ_i(x) = σ_j(z)` for some map indices `i, j`. Classes are sorted and
    /// listed by their least element.
    pub fn equivalence_classes(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.size);
        // All points hitting a common image under any map share a class.
        let mut first_hit: Vec<Option<usize>> = vec![None; self.size];
        for t in &self.tables {
            for (x, &y) in t.iter().enumerate() {
                match first_hit[y] {
                    Some(z) => uf.union(x, z),
                    None => first_hit[y] = Some(x),
                }
            }
        }
        uf.classes()
    }

    /// Restricts the system to `subset`; a map stays defined at `x` exactly
    /// when its image lies in `subset`.
    pub fn restrict(&self, subset: &[usize]) -> Result<SubSystem> {
        if subset.is_empty() {
            return arg("cannot restrict to an empty subset");
        }
        let points: Vec<usize> = subset.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        points.iter().try_for_each(|&x| self.check_point(x))?;
        let mut member = vec![false; self.size];
        points.iter().for_each(|&x| member[x] = true);
        let partial = self
            .tables
            .iter()
            .map(|t| points.iter().map(|&x| Some(t[x]).filter(|&y| member[y])).collect())
            .collect();
        Ok(SubSystem { parent_size: self.size, arity: self.arity(), points, member, partial })
    }

    /// The subsystem on `{x} ∪ {σ_i(x)}`, the smallest one seeing every map at `x`.
    pub fn local_subsystem(&self, x: usize) -> Result<SubSystem> {
        self.check_point(x)?;
        let mut pts = vec![x];
        pts.extend(self.tables.iter().map(|t| t[x]));
        self.restrict(&pts)
    }
}

/// Witness that two map ranges meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeOverlap {
    pub first: usize,
    pub second: usize,
    pub point: usize,
}

/// A word in the free semigroup on the map indices. The empty word is the unit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn map_letters(&self, f: impl Fn(usize) -> usize) -> Word {
        Word(self.0.iter().map(|&l| f(l)).collect())
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl<const N: usize> From<[usize; N]> for Word {
    fn from(v: [usize; N]) -> Self {
        Word(v.to_vec())
    }
}

// Shortlex: shorter words first, then lexicographic.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|l| format!("s{l}")).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// A system restricted to a subset, with partially defined maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubSystem {
    parent_size: usize,
    arity: usize,
    points: Vec<usize>,
    member: Vec<bool>,
    // partial[i][k] is the image of points[k] under map i, if it stays inside.
    partial: Vec<Vec<Option<usize>>>,
}

impl SubSystem {
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn parent_size(&self) -> usize {
        self.parent_size
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.parent_size && self.member[x]
    }

    /// Position of `x` within [`points`](Self::points).
    pub fn position(&self, x: usize) -> Option<usize> {
        self.points.binary_search(&x).ok()
    }

    /// The partial map `σ_i` at `x`; `None` when undefined or `x` is outside.
    pub fn image(&self, i: usize, x: usize) -> Option<usize> {
        self.position(x).and_then(|k| self.partial.get(i).and_then(|t| t[k]))
    }

    /// True when every map is defined everywhere on the subset.
    pub fn is_total(&self) -> bool {
        self.partial.iter().all(|t| t.iter().all(Option::is_some))
    }

    /// Relabels a total subsystem as a standalone system on `0..len`.
    pub fn to_system(&self) -> Option<FiniteSystem> {
        if !self.is_total() {
            return None;
        }
        let tables = self
            .partial
            .iter()
            .map(|t| t.iter().map(|y| self.position(y.unwrap()).unwrap()).collect())
            .collect();
        FiniteSystem::new(self.len(), tables).ok()
    }

    /// The edge-colored graph with an edge `x → y` of color `i` whenever `σ_i(x) = y`
    /// inside the subset. Edges are ordered by color, then source.
    pub fn colored_graph(&self) -> EdgeColoredGraph {
        let mut edges = Vec::new();
        for (color, t) in self.partial.iter().enumerate() {
            for (k, img) in t.iter().enumerate() {
                if let Some(target) = *img {
                    edges.push(ColoredEdge { source: self.points[k], target, color });
                }
            }
        }
        EdgeColoredGraph { vertices: self.points.clone(), colors: self.arity, edges }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColoredEdge {
    pub source: usize,
    pub target: usize,
    pub color: usize,
}

/// A finite directed graph whose edges carry one of `colors` colors, with at
/// most one edge of each color leaving any vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoredGraph {
    pub vertices: Vec<usize>,
    pub colors: usize,
    pub edges: Vec<ColoredEdge>,
}

impl EdgeColoredGraph {
    pub fn vertex_position(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&u| u == v)
    }

    /// Edges of one color ending at `v`.
    pub fn in_edges(&self, color: usize, v: usize) -> impl Iterator<Item = (usize, &ColoredEdge)> {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.color == color && e.target == v)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn classes(mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            by_root[r].push(x);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::FiniteSystem;

    pub fn dk_sigma() -> FiniteSystem {
        FiniteSystem::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap()
    }
    pub fn dk_tau() -> FiniteSystem {
        FiniteSystem::new(2, vec![vec![0, 0], vec![1, 1]]).unwrap()
    }
    pub fn duncan() -> FiniteSystem {
        FiniteSystem::new(4, vec![vec![1, 2, 2, 2], vec![1, 3, 3, 3]]).unwrap()
    }
    pub fn p_a() -> FiniteSystem {
        FiniteSystem::new(4, vec![vec![1, 0, 2, 3], vec![0, 1, 3, 2]]).unwrap()
    }
    pub fn p_b() -> FiniteSystem {
        FiniteSystem::new(4, vec![vec![1, 0, 3, 2], vec![0, 1, 2, 3]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteSystem::new(2, vec![vec![0, 2]]).is_err());
        assert!(FiniteSystem::new(2, vec![vec![0]]).is_err());
        assert!(FiniteSystem::new(0, vec![vec![]]).is_err());
        assert!(FiniteSystem::new(1, vec![]).is_err());
    }

    #[test]
    fn word_evaluation() {
        assert_eq!(dk_sigma().evaluate_word(&Word::empty(), 1).unwrap(), 1);
        assert_eq!(dk_sigma().evaluate_word(&Word::from([1, 1]), 0).unwrap(), 0);
        assert_eq!(duncan().evaluate_word(&Word::from([0, 1]), 0).unwrap(), 2);
        assert!(duncan().evaluate_word(&Word::from([2]), 0).is_err());
        assert!(duncan().evaluate_word(&Word::empty(), 4).is_err());
    }

    #[test]
    fn ranges() {
        let du = duncan();
        assert_eq!(du.map_range(0).unwrap(), [1, 2].into());
        assert_eq!(du.map_range(1).unwrap(), [1, 3].into());
        let id = FiniteSystem::identity(3, 1).unwrap();
        assert_eq!(id.map_range(0).unwrap(), [0, 1, 2].into());
        assert_eq!(du.range_overlap(), Some(RangeOverlap { first: 0, second: 1, point: 1 }));
        let restricted = du.restrict(&[1, 2, 3]).unwrap().to_system().unwrap();
        assert!(restricted.ranges_pairwise_disjoint());
        assert!(FiniteSystem::new(3, vec![vec![0, 0, 1]]).unwrap().ranges_pairwise_disjoint());
    }

    #[test]
    fn classes_of_fixtures() {
        assert_eq!(dk_sigma().equivalence_classes(), vec![vec![0, 1]]);
        assert_eq!(p_a().equivalence_classes(), vec![vec![0, 1], vec![2, 3]]);
        let single = FiniteSystem::new(4, vec![vec![0, 0, 2, 3]]).unwrap();
        assert_eq!(single.equivalence_classes(), vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn restriction() {
        let sub = duncan().restrict(&[1, 2, 3]).unwrap();
        for x in [1, 2, 3] {
            assert_eq!(sub.image(0, x), Some(2));
            assert_eq!(sub.image(1, x), Some(3));
        }
        assert!(dk_sigma().restrict(&[0, 1]).unwrap().is_total());
        let tau0 = dk_tau().restrict(&[0]).unwrap();
        assert_eq!(tau0.image(0, 0), Some(0));
        assert_eq!(tau0.image(1, 0), None);
        assert!(dk_tau().restrict(&[]).is_err());
        assert!(dk_tau().restrict(&[2]).is_err());
    }

    #[test]
    fn graphs() {
        let e = |source, target, color| ColoredEdge { source, target, color };
        let g = dk_sigma().restrict(&[0, 1]).unwrap().colored_graph();
        assert_eq!(g.edges, vec![e(0, 0, 0), e(1, 1, 0), e(0, 1, 1), e(1, 0, 1)]);
        let g = dk_tau().restrict(&[0, 1]).unwrap().colored_graph();
        assert_eq!(g.edges, vec![e(0, 0, 0), e(1, 0, 0), e(0, 1, 1), e(1, 1, 1)]);
        let g = FiniteSystem::identity(1, 1).unwrap().restrict(&[0]).unwrap().colored_graph();
        assert_eq!(g.edges, vec![e(0, 0, 0)]);
    }

    pub(crate) fn arb_system(max_size: usize, max_arity: usize) -> impl Strategy<Value = FiniteSystem> {
        (1..=max_size, 1..=max_arity).prop_flat_map(|(size, arity)| {
            proptest::collection::vec(proptest::collection::vec(0..size, size), arity)
                .prop_map(move |t| FiniteSystem::new(size, t).unwrap())
        })
    }

    // Brute-force closure: repeatedly apply C ↦ ∪ σ_i^{-1}(σ_j(C)) until stable.
    fn brute_class(sys: &FiniteSystem, x: usize) -> BTreeSet<usize> {
        let mut class: BTreeSet<usize> = [x].into();
        loop {
            let mut next = class.clone();
            for i in 0..sys.arity() {
                for j in 0..sys.arity() {
                    let targets: BTreeSet<usize> = class.iter().map(|&c| sys.map(j, c)).collect();
                    next.extend(sys.points().filter(|&z| targets.contains(&sys.map(i, z))));
                }
            }
            if next == class {
                return class;
            }
            class = next;
        }
    }

    proptest! {
        #[test]
        fn word_composition(sys in arb_system(5, 3), u in proptest::collection::vec(0usize..3, 0..4),
                            v in proptest::collection::vec(0usize..3, 0..4), x in 0usize..5) {
            let u = Word::from(u.into_iter().map(|l| l % sys.arity()).collect::<Vec<_>>());
            let v = Word::from(v.into_iter().map(|l| l % sys.arity()).collect::<Vec<_>>());
            let x = x % sys.size();
            let lhs = sys.evaluate_word(&u.concat(&v), x).unwrap();
            let rhs = sys.evaluate_word(&u, sys.evaluate_word(&v, x).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn classes_match_brute_force(sys in arb_system(5, 3)) {
            let classes = sys.equivalence_classes();
            for class in &classes {
                let expected = brute_class(&sys, class[0]);
                prop_assert_eq!(class.iter().copied().collect::<BTreeSet<_>>(), expected);
            }
        }

        #[test]
        fn graph_edge_count(sys in arb_system(5, 3), mask in 1u32..32) {
            let subset: Vec<usize> = sys.points().filter(|&x| mask & (1 << x) != 0).collect();
            prop_assume!(!subset.is_empty());
            let sub = sys.restrict(&subset).unwrap();
            let expected: usize = (0..sys.arity())
                .map(|i| subset.iter().filter(|&&x| subset.contains(&sys.map(i, x))).count())
                .sum();
            prop_assert_eq!(sub.colored_graph().edges.len(), expected);
        }
    }
}
