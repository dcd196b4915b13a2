//! Nest representations `ρ : C(X) ×_σ 𝔽_n⁺ → ℕ_{m+1}`.
//!
//! Given a base point `x` and slots `(x_j, c_j)` with `σ_{c_j}(x_j) = x`,
//!
//! ```text
//! ρ(f)   = diag(f(x), f(x_1), …, f(x_m))
//! ρ(s_k) = Σ_j δ_{c_j k} E_{0j}
//! ```
//!
//! Slots may repeat points. Images are supported on the diagonal and the first
//! row, and any product of two generator images vanishes.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{op_norm, row_norm, ComplexMatrix};
use crate::dynsys::{FiniteSystem, RangeOverlap};
use crate::error::{arg, Error, Result};
use crate::scalar::Scalar;
use crate::semicrossed::{FunctionCoeff, SemicrossedElement};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestRep {
    pub base: usize,
    /// `(x_j, c_j)` per slot.
    pub slots: Vec<(usize, usize)>,
    arity: usize,
    size: usize,
}

impl NestRep {
    pub fn dim(&self) -> usize {
        self.slots.len() + 1
    }

    /// Points along the diagonal: `x, x_1, …, x_m`.
    pub fn diagonal_points(&self) -> Vec<usize> {
        std::iter::once(self.base).chain(self.slots.iter().map(|s| s.0)).collect()
    }

    pub fn function_image(&self, f: &FunctionCoeff) -> Result<ComplexMatrix> {
        if f.len() != self.size {
            return arg(format!("function has {} values, system has {} points", f.len(), self.size));
        }
        let diag: Vec<Complex64> = self.diagonal_points().iter().map(|&p| to_c(f.at(p))).collect();
        Ok(ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }

    pub fn generator_image(&self, k: usize) -> Result<ComplexMatrix> {
        if k >= self.arity {
            return arg(format!("generator {k} out of range for {} maps", self.arity));
        }
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        for (j, &(_, c)) in self.slots.iter().enumerate() {
            if c == k {
                m[(0, j + 1)] = Complex64::new(1.0, 0.0);
            }
        }
        Ok(m)
    }

    pub fn generator_images(&self) -> Vec<ComplexMatrix> {
        (0..self.arity).map(|k| self.generator_image(k).expect("k < arity")).collect()
    }

    /// Whether `m` vanishes off the diagonal and the first row.
    pub fn in_pattern(m: &ComplexMatrix) -> bool {
        (0..m.nrows()).all(|r| (0..m.ncols()).all(|c| r == 0 || r == c || m[(r, c)] == Complex64::default()))
    }
}

fn to_c(s: &Scalar) -> Complex64 {
    let (re, im) = s.to_f64_pair();
    Complex64::new(re, im)
}

/// Builds the nest representation at `x`. With `require_distinct`, slot colors
/// must be pairwise distinct (so `m ≤ n`).
pub fn build_colour_rep(sys: &FiniteSystem, x: usize, slots: &[(usize, usize)], require_distinct: bool) -> Result<NestRep> {
    if x >= sys.size() {
        return arg(format!("base point {x} out of range for {} points", sys.size()));
    }
    for (j, &(p, c)) in slots.iter().enumerate() {
        if p >= sys.size() || c >= sys.arity() || sys.map(c, p) != x {
            return Err(Error::Validation(format!("slot {j} = (point {p}, color {c}) does not map to {x}")));
        }
    }
    if require_distinct {
        let mut colors: Vec<usize> = slots.iter().map(|s| s.1).collect();
        colors.sort_unstable();
        if colors.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("slot colors must be distinct".into()));
        }
    }
    Ok(NestRep { base: x, slots: slots.to_vec(), arity: sys.arity(), size: sys.size() })
}

/// `ρ(a)` for `a = Σ s_w f_w`, computed as `Σ ρ(s_{w_1})⋯ρ(s_{w_k}) ρ(f_w)`.
pub fn rep_apply(r: &NestRep, a: &SemicrossedElement) -> Result<ComplexMatrix> {
    let sys = a.system();
    if sys.size() != r.size || sys.arity() != r.arity {
        return Err(Error::IncompatibleSystems("element is over a different system".into()));
    }
    let gens = r.generator_images();
    let mut out = ComplexMatrix::zeros(r.dim(), r.dim());
    for (w, f) in a.terms() {
        let mut m = ComplexMatrix::identity(r.dim(), r.dim());
        for &l in w.letters() {
            m *= &gens[l];
        }
        out += m * r.function_image(f)?;
    }
    Ok(out)
}

/// Distinct colors `c_j` with `σ_{c_j}(x_j) = x` for every `j`, found as a
/// perfect matching of slots to colors.
pub fn nest_rep_exists(sys: &FiniteSystem, x: usize, xs: &[usize]) -> Option<Vec<usize>> {
    if x >= sys.size() || xs.iter().any(|&p| p >= sys.size()) || xs.len() > sys.arity() {
        return None;
    }
    let allowed: Vec<Vec<usize>> =
        xs.iter().map(|&p| (0..sys.arity()).filter(|&c| sys.map(c, p) == x).collect()).collect();
    // Fix slots in order, each to the least color that still leaves a
    // perfect matching for the rest. The result is the lexicographically
    // least assignment.
    let mut fixed: Vec<usize> = Vec::with_capacity(xs.len());
    for j in 0..xs.len() {
        let choice = allowed[j].iter().copied().find(|&c| {
            !fixed.contains(&c) && {
                let mut trial = fixed.clone();
                trial.push(c);
                completes(&allowed, &trial, sys.arity())
            }
        })?;
        fixed.push(choice);
    }
    Some(fixed)
}

/// Whether slots after `fixed.len()` can be matched to unused colors (Kuhn).
fn completes(allowed: &[Vec<usize>], fixed: &[usize], colors: usize) -> bool {
    fn augment(j: usize, allowed: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &c in &allowed[j] {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            if owner[c].is_none_or(|k| augment(k, allowed, owner, seen)) {
                owner[c] = Some(j);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; colors];
    let mut seen_fixed = vec![false; colors];
    for (j, &c) in fixed.iter().enumerate() {
        owner[c] = Some(j);
        seen_fixed[c] = true;
    }
    (fixed.len()..allowed.len()).all(|j| {
        let mut seen = seen_fixed.clone();
        augment(j, allowed, &mut owner, &mut seen)
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TensorDecision {
    /// Ranges are disjoint; `bumps[i]` is the indicator of `σ_i(X)`.
    Isomorphic { bumps: Vec<FunctionCoeff> },
    /// Two ranges meet at `overlap.point`; `rep` is a contractive
    /// representation of the semicrossed product that is not a row contraction.
    NotIsomorphic { overlap: RangeOverlap, first_preimage: usize, second_preimage: usize, rep: NestRep, row_norm: f64 },
}

impl TensorDecision {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, TensorDecision::Isomorphic { .. })
    }
}

/// The tensor algebra and the semicrossed product agree exactly when the map
/// ranges are pairwise disjoint.
pub fn decide_tensor_vs_semicrossed(sys: &Arc<FiniteSystem>) -> Result<TensorDecision> {
    match sys.range_overlap() {
        None => {
            let bumps = (0..sys.arity())
                .map(|i| {
                    let range: Vec<usize> = sys.map_range(i)?.into_iter().collect();
                    Ok(FunctionCoeff::indicator(sys.size(), &range))
                })
                .collect::<Result<_>>()?;
            Ok(TensorDecision::Isomorphic { bumps })
        }
        Some(overlap) => {
            let pre = |c: usize| sys.points().find(|&p| sys.map(c, p) == overlap.point).expect("point is in the range");
            let (x1, x2) = (pre(overlap.first), pre(overlap.second));
            let rep = build_colour_rep(sys, overlap.point, &[(x1, overlap.first), (x2, overlap.second)], true)?;
            let norm = row_norm(&rep.generator_images())?;
            debug_assert!(rep.generator_images().iter().all(|g| op_norm(g) <= 1.0 + 1e-12));
            Ok(TensorDecision::NotIsomorphic { overlap, first_preimage: x1, second_preimage: x2, rep, row_norm: norm })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::row_norm_via_gram;
    use super::*;
    use crate::dynsys::fixtures::{dk_tau, duncan};
    use crate::dynsys::Word;
    use crate::semicrossed::testutil::{random_element, random_function};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn dk_tau_colour_rep() {
        let r = build_colour_rep(&dk_tau(), 0, &[(0, 0), (1, 0)], false).unwrap();
        let s0 = r.generator_image(0).unwrap();
        assert_eq!((s0[(0, 0)], s0[(0, 1)], s0[(0, 2)]), (Complex64::default(), one(), one()));
        assert!(r.generator_image(1).unwrap().iter().all(|c| *c == Complex64::default()));
        assert!(build_colour_rep(&dk_tau(), 0, &[(0, 0), (1, 0)], true).is_err());
    }

    #[test]
    fn duncan_colour_rep_and_obstruction() {
        let r = build_colour_rep(&duncan(), 1, &[(0, 0), (0, 1)], true).unwrap();
        let (s0, s1) = (r.generator_image(0).unwrap(), r.generator_image(1).unwrap());
        assert_eq!(s0[(0, 1)], one());
        assert_eq!(s0[(0, 2)], Complex64::default());
        assert_eq!(s1[(0, 2)], one());
        let n = row_norm(&[s0.clone(), s1.clone()]).unwrap();
        assert!((n - 2f64.sqrt()).abs() < 1e-12);
        assert!((row_norm_via_gram(&[s0.clone(), s1.clone()]).unwrap() - n).abs() < 1e-12);
        assert!(op_norm(&s0) <= 1.0 + 1e-12 && op_norm(&s1) <= 1.0 + 1e-12);
        assert!(NestRep::in_pattern(&s0) && NestRep::in_pattern(&(&s0 * &s1)));
    }

    #[test]
    fn invalid_slot_rejected() {
        assert!(matches!(build_colour_rep(&duncan(), 2, &[(0, 0)], false), Err(Error::Validation(_))));
    }

    #[test]
    fn empty_slots_give_a_character() {
        let sys = Arc::new(duncan());
        let r = build_colour_rep(&sys, 3, &[], false).unwrap();
        assert_eq!(r.dim(), 1);
        let f = FunctionCoeff::point_mass(4, 3);
        let m = rep_apply(&r, &SemicrossedElement::function(&sys, f).unwrap()).unwrap();
        assert_eq!(m[(0, 0)], one());
    }

    #[test]
    fn rep_apply_is_covariant_and_multiplicative() {
        let sys = Arc::new(duncan());
        let r = build_colour_rep(&sys, 1, &[(0, 0), (0, 1)], true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let f = random_function(4, &mut rng);
            for i in 0..2 {
                let s = SemicrossedElement::generator(&sys, i).unwrap();
                let lhs = SemicrossedElement::function(&sys, f.clone()).unwrap().multiply(&s).unwrap();
                let pulled = crate::semicrossed::pullback(&f, &Word::letter(i), &sys).unwrap();
                let direct = s.mul_function(&pulled).unwrap();
                assert_eq!(rep_apply(&r, &lhs).unwrap(), rep_apply(&r, &direct).unwrap());
            }
        }
        for _ in 0..20 {
            let a = random_element(&sys, 3, 4, &mut rng);
            let b = random_element(&sys, 3, 4, &mut rng);
            let ab = rep_apply(&r, &a.multiply(&b).unwrap()).unwrap();
            let prod = rep_apply(&r, &a).unwrap() * rep_apply(&r, &b).unwrap();
            assert!((ab - &prod).iter().all(|c| c.norm() < 1e-9));
            assert!(NestRep::in_pattern(&prod));
        }
    }

    #[test]
    fn single_first_row_entry() {
        let sys = Arc::new(duncan());
        let r = build_colour_rep(&sys, 1, &[(0, 0), (0, 1)], true).unwrap();
        let a = SemicrossedElement::term(&sys, Word::letter(0), FunctionCoeff::point_mass(4, 0)).unwrap();
        let m = rep_apply(&r, &a).unwrap();
        let nonzero: Vec<(usize, usize)> =
            (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|&(i, j)| m[(i, j)] != Complex64::default()).collect();
        assert_eq!(nonzero, vec![(0, 1)]);
    }

    #[test]
    fn matchings() {
        assert_eq!(nest_rep_exists(&duncan(), 1, &[0, 0]), Some(vec![0, 1]));
        assert_eq!(nest_rep_exists(&duncan(), 2, &[1, 1]), None);
        assert_eq!(nest_rep_exists(&duncan(), 2, &[]), Some(vec![]));
        assert_eq!(nest_rep_exists(&duncan(), 2, &[1, 2, 3]), None);
    }

    #[test]
    fn duncan_tensor_decision() {
        let sys = Arc::new(duncan());
        match decide_tensor_vs_semicrossed(&sys).unwrap() {
            TensorDecision::NotIsomorphic { overlap, first_preimage, second_preimage, row_norm, .. } => {
                assert_eq!(overlap.point, 1);
                assert_eq!((first_preimage, second_preimage), (0, 0));
                assert!((row_norm - 2f64.sqrt()).abs() < 1e-12);
            }
            other => panic!("expected overlap, got {other:?}"),
        }
        let restricted = Arc::new(duncan().restrict(&[1, 2, 3]).unwrap().to_system().unwrap());
        match decide_tensor_vs_semicrossed(&restricted).unwrap() {
            TensorDecision::Isomorphic { bumps } => {
                for (i, f) in bumps.iter().enumerate() {
                    for x in restricted.points() {
                        assert_eq!(f.at(restricted.map(i, x)), &Scalar::one());
                    }
                }
                assert!(bumps[0].pointwise_mul(&bumps[1]).is_zero());
            }
            other => panic!("expected disjoint ranges, got {other:?}"),
        }
        let single = Arc::new(FiniteSystem::new(3, vec![vec![1, 1, 0]]).unwrap());
        assert!(decide_tensor_vs_semicrossed(&single).unwrap().is_isomorphic());
    }
}
