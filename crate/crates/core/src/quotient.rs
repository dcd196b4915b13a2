//! Finite quotients of the semicrossed product and their entry signatures.
//!
//! For a subsystem `X'` the quotient by the ideal generated by functions
//! vanishing on `X'` is modelled as `|X'| × |X'|` matrices whose entries are
//! noncommutative polynomials in one free generator per edge of the colored
//! graph. `s_i` goes to the matrix with the edge `x → y` of color `i` in entry
//! `(y, x)` whenever `σ_i(x) = y` inside `X'`, and `f` goes to `diag(f(x))`.
//!
//! The entry algebra is a free product of noncommutative disc algebras, one
//! factor per row family `{edges of color i into y}`; its isomorphism class is
//! determined by the multiset of family sizes, the [`EntrySignature`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynsys::{EdgeColoredGraph, FiniteSystem, SubSystem};
use crate::error::{arg, Result};
use crate::scalar::Scalar;
use crate::semicrossed::SemicrossedElement;

/// A noncommutative polynomial in the edge generators `S_e`, keyed by edge
/// index into the graph's edge list. A word `[e₁, e₂, …]` is the product
/// `S_{e₁} S_{e₂} ⋯`, so in a nonzero matrix entry each letter's source is the
/// next letter's target.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct FreeEdgePoly(BTreeMap<Vec<usize>, Scalar>);

impl FreeEdgePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(Vec::new(), c)
    }

    pub fn monomial(word: Vec<usize>, c: Scalar) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(word, c);
        }
        Self(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Scalar> {
        &self.0
    }

    fn add_term(&mut self, word: Vec<usize>, c: Scalar) {
        use std::collections::btree_map::Entry;
        match self.0.entry(word) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        other.0.iter().for_each(|(w, c)| out.add_term(w.clone(), c.clone()));
        out
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.0 {
            for (v, b) in &other.0 {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a * b);
            }
        }
        out
    }
}

impl fmt::Debug for FreeEdgePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(w, c)| {
                let word: Vec<String> = w.iter().map(|e| format!("S{e}")).collect();
                if word.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}·{}", word.join(""))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The image of an element under the quotient map, as a matrix over the free
/// edge algebra. Rows and columns follow the subsystem's sorted point order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMatrix {
    pub graph: EdgeColoredGraph,
    pub entries: Vec<Vec<FreeEdgePoly>>,
}

impl QuotientMatrix {
    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    /// Entry in row `y`, column `x`, addressed by point labels.
    pub fn entry(&self, y: usize, x: usize) -> Option<&FreeEdgePoly> {
        let r = self.graph.vertex_position(y)?;
        let c = self.graph.vertex_position(x)?;
        Some(&self.entries[r][c])
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.graph != other.graph {
            return arg("quotient matrices over different graphs");
        }
        let d = self.dimension();
        let entries = (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| {
                        (0..d).fold(FreeEdgePoly::zero(), |acc, k| {
                            acc.add(&self.entries[r][k].multiply(&other.entries[k][c]))
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Self { graph: self.graph.clone(), entries })
    }
}

/// The quotient map onto the subsystem `sub`, applied to `a`.
pub fn quotient_map(sub: &SubSystem, a: &SemicrossedElement) -> Result<QuotientMatrix> {
    let sys = a.system();
    if sys.size() != sub.parent_size() || sys.arity() != sub.arity() {
        return arg("element is not over the subsystem's parent system");
    }
    let graph = sub.colored_graph();
    let pts = sub.points();
    let d = pts.len();
    // edge_at[color][position of source] = edge index
    let mut edge_at = vec![vec![None; d]; sub.arity()];
    for (k, e) in graph.edges.iter().enumerate() {
        edge_at[e.color][sub.position(e.source).unwrap()] = Some(k);
    }
    let mut entries = vec![vec![FreeEdgePoly::zero(); d]; d];
    for (w, f) in a.terms() {
        for (col, &x) in pts.iter().enumerate() {
            let c = f.at(x);
            if c.is_zero() {
                continue;
            }
            // Walk the letters right to left, recording edges outermost-first.
            let mut pos = col;
            let mut path = Vec::with_capacity(w.len());
            let mut alive = true;
            for &l in w.letters().iter().rev() {
                match edge_at[l][pos] {
                    Some(e) => {
                        path.push(e);
                        pos = sub.position(graph.edges[e].target).unwrap();
                    }
                    None => {
                        alive = false;
                        break;
                    }
                }
            }
            if alive {
                path.reverse();
                entries[pos][col].add_term(path, c.clone());
            }
        }
    }
    Ok(QuotientMatrix { graph, entries })
}

/// Sorted multiset of row-family sizes `n_{(i,y)}`: for each color `i` and
/// vertex `y` with at least one incoming edge of that color, the number of
/// such edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntrySignature(Vec<usize>);

impl EntrySignature {
    pub fn from_sizes(mut sizes: Vec<usize>) -> Self {
        sizes.sort_unstable();
        Self(sizes)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for EntrySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub fn entry_signature(sub: &SubSystem) -> EntrySignature {
    graph_signature(&sub.colored_graph())
}

pub fn graph_signature(g: &EdgeColoredGraph) -> EntrySignature {
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for e in &g.edges {
        *counts.entry((e.color, e.target)).or_default() += 1;
    }
    EntrySignature::from_sizes(counts.into_values().collect())
}

/// Signature of the subsystem `{x} ∪ {σ_i(x)}`.
pub fn local_signature(sys: &FiniteSystem, x: usize) -> Result<EntrySignature> {
    Ok(entry_signature(&sys.local_subsystem(x)?))
}

/// Free products of noncommutative disc algebras are completely isometrically
/// isomorphic exactly when their block-size multisets agree.
pub fn signatures_equivalent(a: &EntrySignature, b: &EntrySignature) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugacy::decide_partition;
    use crate::dynsys::fixtures::*;
    use crate::dynsys::Word;
    use crate::semicrossed::testutil::*;
    use crate::semicrossed::{pullback, FunctionCoeff};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn sig(v: &[usize]) -> EntrySignature {
        EntrySignature::from_sizes(v.to_vec())
    }

    #[test]
    fn generator_images() {
        let sys = Arc::new(dk_tau());
        let sub = sys.restrict(&[0, 1]).unwrap();
        let s1 = SemicrossedElement::generator(&sys, 0).unwrap();
        let m = quotient_map(&sub, &s1).unwrap();
        // edges of τ₁: (0→0) index 0, (1→0) index 1
        assert_eq!(m.entries[0][0], FreeEdgePoly::monomial(vec![0], Scalar::one()));
        assert_eq!(m.entries[0][1], FreeEdgePoly::monomial(vec![1], Scalar::one()));
        assert!(m.entries[1][0].is_zero() && m.entries[1][1].is_zero());

        let f = FunctionCoeff::new(vec![Scalar::ratio(2, 3), Scalar::from_int(-5)]);
        let m = quotient_map(&sub, &SemicrossedElement::function(&sys, f).unwrap()).unwrap();
        assert_eq!(m.entries[0][0], FreeEdgePoly::constant(Scalar::ratio(2, 3)));
        assert_eq!(m.entries[1][1], FreeEdgePoly::constant(Scalar::from_int(-5)));
        assert!(m.entries[0][1].is_zero());
    }

    #[test]
    fn columns_vanish_outside() {
        let sys = Arc::new(duncan());
        let sub = sys.restrict(&[0, 1, 3]).unwrap();
        // σ₀(1) = 2 ∉ X', so column of point 1 is zero in π(s₀)
        let m = quotient_map(&sub, &SemicrossedElement::generator(&sys, 0).unwrap()).unwrap();
        for y in sub.points() {
            assert!(m.entry(*y, 1).unwrap().is_zero());
            assert!(m.entry(*y, 3).unwrap().is_zero());
        }
        assert!(!m.entry(1, 0).unwrap().is_zero());
    }

    #[test]
    fn multiplicative_and_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sys = Arc::new(duncan());
        for subset in [vec![0, 1, 2, 3], vec![1, 2, 3], vec![0, 1, 3]] {
            let sub = sys.restrict(&subset).unwrap();
            for _ in 0..25 {
                let a = random_element(&sys, 2, 3, &mut rng);
                let b = random_element(&sys, 2, 3, &mut rng);
                let lhs = quotient_map(&sub, &a.multiply(&b).unwrap()).unwrap();
                let rhs = quotient_map(&sub, &a).unwrap().multiply(&quotient_map(&sub, &b).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
            for x in 0..4 {
                let chi = FunctionCoeff::point_mass(4, x);
                for i in 0..2 {
                    let s = quotient_map(&sub, &SemicrossedElement::generator(&sys, i).unwrap()).unwrap();
                    let f = quotient_map(&sub, &SemicrossedElement::function(&sys, chi.clone()).unwrap()).unwrap();
                    let pulled = pullback(&chi, &Word::letter(i), &sys).unwrap();
                    let g = quotient_map(&sub, &SemicrossedElement::function(&sys, pulled).unwrap()).unwrap();
                    assert_eq!(f.multiply(&s).unwrap(), s.multiply(&g).unwrap());
                }
            }
        }
    }

    #[test]
    fn signatures() {
        assert_eq!(entry_signature(&dk_sigma().restrict(&[0, 1]).unwrap()), sig(&[1, 1, 1, 1]));
        assert_eq!(entry_signature(&dk_tau().restrict(&[0, 1]).unwrap()), sig(&[2, 2]));
        let no_edges = FiniteSystem::new(2, vec![vec![1, 1]]).unwrap().restrict(&[0]).unwrap();
        assert_eq!(entry_signature(&no_edges), sig(&[]));
        assert_eq!(local_signature(&dk_sigma(), 0).unwrap(), sig(&[1, 1, 1, 1]));
        assert_eq!(local_signature(&dk_tau(), 0).unwrap(), sig(&[2, 2]));
        assert_eq!(local_signature(&FiniteSystem::identity(1, 1).unwrap(), 0).unwrap(), sig(&[1]));
        assert!(!signatures_equivalent(&sig(&[1, 1, 1, 1]), &sig(&[2, 2])));
        assert!(signatures_equivalent(&sig(&[2, 1]), &sig(&[1, 2])));
        assert!(local_signature(&dk_tau(), 2).is_err());
    }

    fn random_system(rng: &mut impl Rng, size: usize, arity: usize) -> FiniteSystem {
        FiniteSystem::new(size, (0..arity).map(|_| (0..size).map(|_| rng.gen_range(0..size)).collect()).collect()).unwrap()
    }

    #[test]
    fn signature_total_is_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (size, arity) = (rng.gen_range(1..6), rng.gen_range(1..4));
            let sys = random_system(&mut rng, size, arity);
            let subset: Vec<usize> = sys.points().filter(|_| rng.gen_bool(0.6)).collect();
            if subset.is_empty() {
                continue;
            }
            let sub = sys.restrict(&subset).unwrap();
            assert_eq!(entry_signature(&sub).total(), sub.colored_graph().edges.len());
        }
    }

    #[test]
    fn invariance_under_conjugacy_and_partition_conjugacy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let size = rng.gen_range(1..6);
            let arity = rng.gen_range(1..4);
            let a = random_system(&mut rng, size, arity);
            // relabel by a random bijection
            let mut perm: Vec<usize> = (0..size).collect();
            for k in (1..size).rev() {
                perm.swap(k, rng.gen_range(0..=k));
            }
            let mut inv = vec![0; size];
            perm.iter().enumerate().for_each(|(x, &y)| inv[y] = x);
            let b = FiniteSystem::new(
                size,
                a.tables().iter().map(|t| (0..size).map(|y| perm[t[inv[y]]]).collect()).collect(),
            )
            .unwrap();
            let subset: Vec<usize> = a.points().filter(|_| rng.gen_bool(0.5)).collect();
            if !subset.is_empty() {
                let image: Vec<usize> = subset.iter().map(|&x| perm[x]).collect();
                assert_eq!(
                    entry_signature(&a.restrict(&subset).unwrap()),
                    entry_signature(&b.restrict(&image).unwrap())
                );
            }
            if let Some(w) = decide_partition(&a, &b).unwrap() {
                for x in a.points() {
                    assert_eq!(local_signature(&a, x).unwrap(), local_signature(&b, w.gamma.apply(x)).unwrap());
                }
            }
        }
    }
}
