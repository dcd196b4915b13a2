//! Truncated path-Fock space of an edge-colored graph.
//!
//! Basis: one vacuum per vertex, then every composable path `e_1 e_2 ⋯ e_k`
//! (`s(e_l) = r(e_{l+1})`, `1 ≤ k ≤ D`), ordered by length and then by edge
//! indices. The range of a path is `r(e_1)`, and of a vacuum its vertex.
//! `S_e` prepends `e` to paths with range `s(e)` and kills paths of length `D`.
//! All operators here permute basis vectors partially, so every relation is
//! checked exactly on indices.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::dynsys::EdgeColoredGraph;
use crate::error::{arg, Error, Result};
use crate::semicrossed::SemicrossedElement;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisVector {
    Vacuum(usize),
    /// Edge indices into the graph's edge list, outermost first.
    Path(Vec<usize>),
}

impl BasisVector {
    pub fn len(&self) -> usize {
        match self {
            BasisVector::Vacuum(_) => 0,
            BasisVector::Path(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, BasisVector::Vacuum(_))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CKFamily {
    pub graph: EdgeColoredGraph,
    pub depth: usize,
    pub basis: Vec<BasisVector>,
    /// Range vertex of every basis vector.
    range: Vec<usize>,
    /// `shifts[e][b]` is the index of `S_e b`, if nonzero.
    shifts: Vec<Vec<Option<usize>>>,
}

impl CKFamily {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn range_of(&self, b: usize) -> usize {
        self.range[b]
    }

    pub fn shift(&self, e: usize) -> &[Option<usize>] {
        &self.shifts[e]
    }

    pub fn s_matrix(&self, e: usize) -> Result<ComplexMatrix> {
        if e >= self.shifts.len() {
            return arg(format!("edge {e} out of range"));
        }
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        for (b, img) in self.shifts[e].iter().enumerate() {
            if let Some(t) = img {
                m[(*t, b)] = Complex64::new(1.0, 0.0);
            }
        }
        Ok(m)
    }

    pub fn p_matrix(&self, v: usize) -> Result<ComplexMatrix> {
        if self.graph.vertex_position(v).is_none() {
            return arg(format!("vertex {v} is not in the graph"));
        }
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        for b in 0..self.dim() {
            if self.range[b] == v {
                m[(b, b)] = Complex64::new(1.0, 0.0);
            }
        }
        Ok(m)
    }

    fn is_monochrome(&self, b: usize, color: usize) -> bool {
        match &self.basis[b] {
            BasisVector::Vacuum(_) => false,
            BasisVector::Path(p) => p.iter().all(|&e| self.graph.edges[e].color == color),
        }
    }

    fn outer_color(&self, b: usize) -> Option<usize> {
        match &self.basis[b] {
            BasisVector::Vacuum(_) => None,
            BasisVector::Path(p) => Some(self.graph.edges[p[0]].color),
        }
    }
}

pub fn build_truncated_fock(g: &EdgeColoredGraph, depth: usize) -> Result<CKFamily> {
    if depth == 0 {
        return arg("truncation depth must be at least 1");
    }
    if let Some(e) = g.edges.iter().find(|e| g.vertex_position(e.source).is_none() || g.vertex_position(e.target).is_none()) {
        return arg(format!("edge {e:?} leaves the vertex set"));
    }
    let mut basis: Vec<BasisVector> = g.vertices.iter().map(|&v| BasisVector::Vacuum(v)).collect();
    let mut range: Vec<usize> = g.vertices.clone();
    let mut index = std::collections::HashMap::new();
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &level {
            // extend on the inside: p·e needs s(last of p) = r(e)
            for (e, edge) in g.edges.iter().enumerate() {
                let ok = p.last().is_none_or(|&l| g.edges[l].source == edge.target);
                if ok {
                    let mut q = p.clone();
                    q.push(e);
                    next.push(q);
                }
            }
        }
        next.sort();
        for q in &next {
            index.insert(q.clone(), basis.len());
            range.push(g.edges[q[0]].target);
            basis.push(BasisVector::Path(q.clone()));
        }
        level = next;
    }
    let shifts = g
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            basis
                .iter()
                .enumerate()
                .map(|(b, bv)| {
                    if range[b] != edge.source || bv.len() >= depth {
                        return None;
                    }
                    let mut q = vec![e];
                    if let BasisVector::Path(p) = bv {
                        q.extend_from_slice(p);
                    }
                    Some(index[&q])
                })
                .collect()
        })
        .collect();
    Ok(CKFamily { graph: g.clone(), depth, basis, range, shifts })
}

/// Outcome of one relation family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub passed: bool,
    /// Human-readable description of the first failure.
    pub failure: Option<String>,
}

impl RelationCheck {
    fn from_failure(failure: Option<String>) -> Self {
        Self { passed: failure.is_none(), failure }
    }
}

/// Toeplitz defect `P_v − Σ_{e∈E_i, r(e)=v} S_e S_e*` for one color and vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectEntry {
    pub color: usize,
    pub vertex: usize,
    /// Basis indices spanning the defect.
    pub observed: Vec<usize>,
    /// Vacuum at `v` plus paths ranging in `v` whose outer edge has another color.
    pub predicted: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CkReport {
    pub projections: RelationCheck,
    /// `S_e* S_e = P_{s(e)}` on paths shorter than the depth.
    pub isometry: RelationCheck,
    /// `S_e* S_f = 0` for `e ≠ f`.
    pub orthogonality: RelationCheck,
    /// Per-color Toeplitz inequality with the defect located.
    pub toeplitz: RelationCheck,
    pub defects: Vec<DefectEntry>,
    /// Per-color Cuntz identity on the monochrome non-vacuum paths.
    pub monochrome_cuntz: RelationCheck,
    /// Basis vectors of top length, where `S_e` is truncated to 0.
    pub boundary: Vec<usize>,
}

impl CkReport {
    pub fn passed(&self) -> bool {
        self.projections.passed
            && self.isometry.passed
            && self.orthogonality.passed
            && self.toeplitz.passed
            && self.monochrome_cuntz.passed
    }
}

pub fn check_ck_relations(fam: &CKFamily) -> CkReport {
    let n = fam.dim();
    let g = &fam.graph;
    // Each basis vector lies in exactly one P_v.
    let projections = RelationCheck::from_failure(
        (0..n).find(|&b| g.vertex_position(fam.range[b]).is_none()).map(|b| format!("basis vector {b} has no vertex")),
    );

    // S_e is injective, so S_e*S_e b = b exactly when S_e b ≠ 0.
    let mut isometry = None;
    'outer: for (e, edge) in g.edges.iter().enumerate() {
        for b in 0..n {
            if fam.basis[b].len() >= fam.depth {
                continue;
            }
            let lives = fam.shifts[e][b].is_some();
            if lives != (fam.range[b] == edge.source) {
                isometry = Some(format!("S_{e}* S_{e} differs from P_{} at basis vector {b}", edge.source));
                break 'outer;
            }
        }
    }
    let injective = fam.shifts.iter().enumerate().find_map(|(e, s)| {
        let imgs: Vec<usize> = s.iter().flatten().copied().collect();
        let set: BTreeSet<usize> = imgs.iter().copied().collect();
        (set.len() != imgs.len()).then(|| format!("S_{e} is not a partial isometry"))
    });
    let isometry = RelationCheck::from_failure(isometry.or(injective));

    let images: Vec<BTreeSet<usize>> = fam.shifts.iter().map(|s| s.iter().flatten().copied().collect()).collect();
    let mut orthogonality = None;
    'orth: for e in 0..images.len() {
        for f in e + 1..images.len() {
            if let Some(b) = images[e].intersection(&images[f]).next() {
                orthogonality = Some(format!("S_{e} and S_{f} share range vector {b}"));
                break 'orth;
            }
        }
    }
    let orthogonality = RelationCheck::from_failure(orthogonality);

    let mut defects = Vec::new();
    let mut toeplitz = None;
    let mut cuntz = None;
    for color in 0..g.colors {
        for &v in &g.vertices {
            let incoming: Vec<usize> = g.in_edges(color, v).map(|(e, _)| e).collect();
            if incoming.is_empty() {
                continue;
            }
            let covered: BTreeSet<usize> = incoming.iter().flat_map(|&e| images[e].iter().copied()).collect();
            if let Some(b) = covered.iter().find(|&&b| fam.range[b] != v) {
                toeplitz.get_or_insert(format!("color {color} range projection at {v} leaves P_{v} at {b}"));
            }
            let in_pv: Vec<usize> = (0..n).filter(|&b| fam.range[b] == v).collect();
            let observed: Vec<usize> = in_pv.iter().copied().filter(|b| !covered.contains(b)).collect();
            let predicted: Vec<usize> =
                in_pv.iter().copied().filter(|&b| fam.outer_color(b) != Some(color)).collect();
            if observed != predicted {
                toeplitz.get_or_insert(format!("color {color} defect at {v} is {observed:?}, expected {predicted:?}"));
            }
            if let Some(b) = in_pv.iter().find(|&&b| fam.is_monochrome(b, color) && !covered.contains(&b)) {
                cuntz.get_or_insert(format!("color {color} Cuntz identity fails at {v} on basis vector {b}"));
            }
            defects.push(DefectEntry { color, vertex: v, observed, predicted });
        }
    }
    let boundary = (0..n).filter(|&b| fam.basis[b].len() == fam.depth).collect();
    CkReport {
        projections,
        isometry,
        orthogonality,
        toeplitz: RelationCheck::from_failure(toeplitz),
        defects,
        monochrome_cuntz: RelationCheck::from_failure(cuntz),
        boundary,
    }
}

/// Image of a semicrossed element when the family comes from the colored
/// graph of the whole system: `s_i ↦ Σ_{e ∈ E_i} S_e` and `f ↦ Σ_v f(v) P_v`.
/// Each `s_i` goes to an isometry on paths shorter than the depth.
pub fn semicrossed_image(fam: &CKFamily, a: &SemicrossedElement) -> Result<ComplexMatrix> {
    let sys = a.system();
    let whole = fam.graph.vertices.len() == sys.size()
        && fam.graph.colors == sys.arity()
        && fam.graph.edges.len() == sys.size() * sys.arity()
        && fam.graph.edges.iter().all(|e| e.source < sys.size() && sys.map(e.color, e.source) == e.target);
    if !whole {
        return Err(Error::IncompatibleSystems("family is not built on the graph of this system".into()));
    }
    let n = fam.dim();
    let mut gens = vec![ComplexMatrix::zeros(n, n); sys.arity()];
    for (e, edge) in fam.graph.edges.iter().enumerate() {
        gens[edge.color] += fam.s_matrix(e)?;
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for (w, f) in a.terms() {
        let mut m = ComplexMatrix::identity(n, n);
        for &l in w.letters() {
            m *= &gens[l];
        }
        let diag = (0..n).map(|b| {
            let (re, im) = f.at(fam.range[b]).to_f64_pair();
            Complex64::new(re, im)
        });
        out += m * ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, diag));
    }
    Ok(out)
}

/// The `(y, x)` block `P_y · mat · P_x`, rows ranging in `y`, columns in `x`.
pub fn compress_block(mat: &ComplexMatrix, fam: &CKFamily, x: usize, y: usize) -> Result<ComplexMatrix> {
    if mat.nrows() != fam.dim() || mat.ncols() != fam.dim() {
        return arg(format!("matrix is {}x{}, family has dimension {}", mat.nrows(), mat.ncols(), fam.dim()));
    }
    for v in [x, y] {
        if fam.graph.vertex_position(v).is_none() {
            return arg(format!("vertex {v} is not in the graph"));
        }
    }
    let rows: Vec<usize> = (0..fam.dim()).filter(|&b| fam.range[b] == y).collect();
    let cols: Vec<usize> = (0..fam.dim()).filter(|&b| fam.range[b] == x).collect();
    Ok(ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| mat[(rows[i], cols[j])]))
}
