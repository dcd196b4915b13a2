//! Exact arithmetic in the dense part of the semicrossed product `C(X) ×_σ 𝔽_n⁺`.
//!
//! Elements are kept in the normal form `Σ_w s_w f_w` (generators on the left,
//! functions on the right). Products are reduced with the covariance rule
//! `f s_i = s_i (f ∘ σ_i)`, which gives
//!
//! ```text
//! (s_v f)(s_w g) = s_{v·w} (f ∘ σ_w) g
//! ```
//!
//! No norms or adjoints live here; those are only meaningful in concrete
//! representations (see [`crate::reps`]).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use crate::conjugacy::{verify_partition_witness, PartitionWitness};
use crate::dynsys::{FiniteSystem, Word};
use crate::error::{arg, Error, Result};
use crate::scalar::Scalar;

/// A function on the points, i.e. an element of `C(X)` for finite `X`.
#[derive(Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct FunctionCoeff(Vec<Scalar>);

impl FunctionCoeff {
    pub fn new(values: Vec<Scalar>) -> Self {
        Self(values)
    }

    pub fn zero(size: usize) -> Self {
        Self(vec![Scalar::zero(); size])
    }

    pub fn constant(size: usize, c: Scalar) -> Self {
        Self(vec![c; size])
    }

    pub fn one(size: usize) -> Self {
        Self::constant(size, Scalar::one())
    }

    /// The indicator of `set`.
    pub fn indicator(size: usize, set: &[usize]) -> Self {
        let mut v = vec![Scalar::zero(); size];
        set.iter().for_each(|&x| v[x] = Scalar::one());
        Self(v)
    }

    pub fn point_mass(size: usize, x: usize) -> Self {
        Self::indicator(size, &[x])
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn at(&self, x: usize) -> &Scalar {
        &self.0[x]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn pointwise_mul(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self(self.0.iter().map(|a| a * c).collect())
    }

    /// Largest `|f(x)|²` over the points.
    pub fn max_norm_sqr(&self) -> BigRational {
        self.0.iter().map(Scalar::norm_sqr).max().unwrap_or_default()
    }
}

impl fmt::Debug for FunctionCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// `f ∘ σ_w`.
pub fn pullback(f: &FunctionCoeff, w: &Word, sys: &FiniteSystem) -> Result<FunctionCoeff> {
    if f.len() != sys.size() {
        return arg(format!("function has {} values, system has {} points", f.len(), sys.size()));
    }
    sys.check_word(w)?;
    Ok(pullback_unchecked(f, w, sys))
}

fn pullback_unchecked(f: &FunctionCoeff, w: &Word, sys: &FiniteSystem) -> FunctionCoeff {
    if w.is_empty() {
        return f.clone();
    }
    FunctionCoeff(sys.points().map(|x| f.0[sys.eval_unchecked(w, x)].clone()).collect())
}

/// A finite sum `Σ_w s_w f_w` over one system, with no zero coefficients stored.
#[derive(Clone)]
pub struct SemicrossedElement {
    system: Arc<FiniteSystem>,
    terms: BTreeMap<Word, FunctionCoeff>,
}

impl PartialEq for SemicrossedElement {
    fn eq(&self, other: &Self) -> bool {
        same_system(&self.system, &other.system) && self.terms == other.terms
    }
}

impl Eq for SemicrossedElement {}

fn same_system(a: &Arc<FiniteSystem>, b: &Arc<FiniteSystem>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl SemicrossedElement {
    pub fn zero(system: &Arc<FiniteSystem>) -> Self {
        Self { system: Arc::clone(system), terms: BTreeMap::new() }
    }

    /// `s_w f`.
    pub fn term(system: &Arc<FiniteSystem>, w: Word, f: FunctionCoeff) -> Result<Self> {
        system.check_word(&w)?;
        if f.len() != system.size() {
            return arg(format!("function has {} values, system has {} points", f.len(), system.size()));
        }
        let mut e = Self::zero(system);
        if !f.is_zero() {
            e.terms.insert(w, f);
        }
        Ok(e)
    }

    pub fn function(system: &Arc<FiniteSystem>, f: FunctionCoeff) -> Result<Self> {
        Self::term(system, Word::empty(), f)
    }

    pub fn one(system: &Arc<FiniteSystem>) -> Self {
        Self::function(system, FunctionCoeff::one(system.size())).unwrap()
    }

    /// The generator `s_i`.
    pub fn generator(system: &Arc<FiniteSystem>, i: usize) -> Result<Self> {
        Self::term(system, Word::letter(i), FunctionCoeff::one(system.size()))
    }

    pub fn from_terms(system: &Arc<FiniteSystem>, terms: impl IntoIterator<Item = (Word, FunctionCoeff)>) -> Result<Self> {
        let mut e = Self::zero(system);
        for (w, f) in terms {
            e = e.add(&Self::term(system, w, f)?)?;
        }
        Ok(e)
    }

    pub fn system(&self) -> &Arc<FiniteSystem> {
        &self.system
    }

    pub fn terms(&self) -> &BTreeMap<Word, FunctionCoeff> {
        &self.terms
    }

    pub fn coefficient(&self, w: &Word) -> Option<&FunctionCoeff> {
        self.terms.get(w)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Length of the longest word with a nonzero coefficient (0 for the zero element).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if !same_system(&self.system, &other.system) {
            return arg("elements live over different systems");
        }
        Ok(())
    }

    fn insert_add(terms: &mut BTreeMap<Word, FunctionCoeff>, w: Word, f: FunctionCoeff) {
        use std::collections::btree_map::Entry;
        match terms.entry(w) {
            Entry::Vacant(v) => {
                if !f.is_zero() {
                    v.insert(f);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&f);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (w, f) in &other.terms {
            Self::insert_add(&mut terms, w.clone(), f.clone());
        }
        Ok(Self { system: Arc::clone(&self.system), terms })
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(w, f)| (w.clone(), f.scale(c)))
            .filter(|(_, f)| !f.is_zero())
            .collect();
        Self { system: Arc::clone(&self.system), terms }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// The product `self · other` in normal form.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let sys = &*self.system;
        let mut terms = BTreeMap::new();
        for (v, f) in &self.terms {
            for (w, g) in &other.terms {
                let coeff = pullback_unchecked(f, w, sys).pointwise_mul(g);
                Self::insert_add(&mut terms, v.concat(w), coeff);
            }
        }
        Ok(Self { system: Arc::clone(&self.system), terms })
    }

    /// Multiplies by `f ∈ C(X)` on the right.
    pub fn mul_function(&self, f: &FunctionCoeff) -> Result<Self> {
        self.multiply(&Self::function(&self.system, f.clone())?)
    }

    /// Gauge endomorphism `s_w f ↦ (∏ z_{w_k}) s_w f`. Requires `|z_i| ≤ 1`.
    pub fn gauge(&self, z: &[Scalar]) -> Result<Self> {
        if z.len() != self.system.arity() {
            return arg(format!("gauge needs {} parameters, got {}", self.system.arity(), z.len()));
        }
        if let Some(i) = z.iter().position(|zi| zi.norm_sqr() > BigRational::one()) {
            return arg(format!("gauge parameter {i} has modulus > 1"));
        }
        let terms = self
            .terms
            .iter()
            .map(|(w, f)| {
                let c = w.letters().iter().fold(Scalar::one(), |acc, &l| &acc * &z[l]);
                (w.clone(), f.scale(&c))
            })
            .filter(|(_, f)| !f.is_zero())
            .collect();
        Ok(Self { system: Arc::clone(&self.system), terms })
    }

    /// `Φ_k`: the part of the element carried by words of length `k`.
    pub fn fourier_component(&self, k: usize) -> Self {
        let terms = self.terms.iter().filter(|(w, _)| w.len() == k).map(|(w, f)| (w.clone(), f.clone())).collect();
        Self { system: Arc::clone(&self.system), terms }
    }

    /// The Cesàro mean `Σ_{i=0}^{k} (1 − i/k) Φ_i`.
    pub fn cesaro_mean(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return arg("Cesàro mean needs k ≥ 1");
        }
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() < k)
            .map(|(w, f)| (w.clone(), f.scale(&Scalar::ratio((k - w.len()) as i64, k as i64))))
            .collect();
        Ok(Self { system: Arc::clone(&self.system), terms })
    }
}

impl fmt::Debug for SemicrossedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("{w}·{c:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A homomorphism between semicrossed products, given by where it sends the
/// point masses `χ_{x}` and the generators.
#[derive(Clone, Debug)]
pub struct CovariantHom {
    pub source: Arc<FiniteSystem>,
    pub target: Arc<FiniteSystem>,
    pub image_of_point_mass: Vec<FunctionCoeff>,
    pub image_of_generator: Vec<SemicrossedElement>,
}

impl CovariantHom {
    pub fn identity(sys: &Arc<FiniteSystem>) -> Self {
        Self {
            source: Arc::clone(sys),
            target: Arc::clone(sys),
            image_of_point_mass: sys.points().map(|x| FunctionCoeff::point_mass(sys.size(), x)).collect(),
            image_of_generator: (0..sys.arity()).map(|i| SemicrossedElement::generator(sys, i).unwrap()).collect(),
        }
    }

    /// Image of a function `f = Σ_x f(x) χ_{x}`.
    pub fn apply_function(&self, f: &FunctionCoeff) -> FunctionCoeff {
        f.values()
            .iter()
            .zip(&self.image_of_point_mass)
            .fold(FunctionCoeff::zero(self.target.size()), |acc, (c, img)| acc.add(&img.scale(c)))
    }

    /// `h(Σ s_w f_w) = Σ h(s_{w₀})⋯h(s_{w_{k−1}}) h(f_w)`.
    pub fn apply(&self, a: &SemicrossedElement) -> Result<SemicrossedElement> {
        if !same_system(a.system(), &self.source) {
            return arg("element is not over the homomorphism's source system");
        }
        let mut out = SemicrossedElement::zero(&self.target);
        for (w, f) in a.terms() {
            let mut prod = SemicrossedElement::one(&self.target);
            for &l in w.letters() {
                prod = prod.multiply(&self.image_of_generator[l])?;
            }
            prod = prod.mul_function(&self.apply_function(f))?;
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    /// Checks `h(χ)h(s_i) = h(s_i)h(χ ∘ σ_i)` for every point mass `χ` and generator.
    pub fn respects_covariance(&self) -> Result<bool> {
        let src = &*self.source;
        for x in src.points() {
            let chi = FunctionCoeff::point_mass(src.size(), x);
            let h_chi = SemicrossedElement::function(&self.target, self.apply_function(&chi))?;
            for i in 0..src.arity() {
                let h_s = &self.image_of_generator[i];
                let lhs = h_chi.multiply(h_s)?;
                let pulled = pullback_unchecked(&chi, &Word::letter(i), src);
                let rhs = h_s.mul_function(&self.apply_function(&pulled))?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The mutually inverse homomorphisms `φ: C(X)×_σ𝔽_n⁺ → C(Y)×_τ𝔽_n⁺` and
/// `θ` in the other direction built from a partition witness:
///
/// ```text
/// φ(f) = f ∘ γ⁻¹,   φ(s_i) = Σ_j t_j χ_{γ(V_{i,j})}
/// θ(g) = g ∘ γ,     θ(t_j) = Σ_i s_i χ_{V_{i,j}}
/// ```
pub fn partition_isomorphism(
    a: &Arc<FiniteSystem>,
    b: &Arc<FiniteSystem>,
    w: &PartitionWitness,
) -> Result<(CovariantHom, CovariantHom)> {
    let report = verify_partition_witness(a, b, w)?;
    if !report.passed() {
        let failed: Vec<String> = report.failed().map(|c| c.condition.clone()).collect();
        return Err(Error::Validation(format!("witness fails {}", failed.join(", "))));
    }
    let (size, n) = (a.size(), a.arity());
    let gamma = &w.gamma;
    let ginv = gamma.inverse();
    let image_set = |set: Vec<usize>| -> Vec<usize> { set.into_iter().map(|x| gamma.apply(x)).collect() };

    let phi_gens = (0..n)
        .map(|i| {
            SemicrossedElement::from_terms(
                b,
                (0..n).map(|j| (Word::letter(j), FunctionCoeff::indicator(size, &image_set(w.alpha.index_set(i, j))))),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = CovariantHom {
        source: Arc::clone(a),
        target: Arc::clone(b),
        image_of_point_mass: a.points().map(|x| FunctionCoeff::point_mass(size, gamma.apply(x))).collect(),
        image_of_generator: phi_gens,
    };

    let theta_gens = (0..n)
        .map(|j| {
            SemicrossedElement::from_terms(
                a,
                (0..n).map(|i| (Word::letter(i), FunctionCoeff::indicator(size, &w.alpha.index_set(i, j)))),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let theta = CovariantHom {
        source: Arc::clone(b),
        target: Arc::clone(a),
        image_of_point_mass: b.points().map(|y| FunctionCoeff::point_mass(size, ginv.apply(y))).collect(),
        image_of_generator: theta_gens,
    };
    Ok((phi, theta))
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;

    pub fn small_scalar(rng: &mut impl Rng) -> Scalar {
        Scalar::complex_ratio((rng.gen_range(-4..=4), rng.gen_range(1..=3)), (rng.gen_range(-2..=2), rng.gen_range(1..=2)))
    }

    pub fn random_function(size: usize, rng: &mut impl Rng) -> FunctionCoeff {
        FunctionCoeff::new((0..size).map(|_| small_scalar(rng)).collect())
    }

    pub fn random_word(arity: usize, len: usize, rng: &mut impl Rng) -> Word {
        Word::from((0..len).map(|_| rng.gen_range(0..arity)).collect::<Vec<_>>())
    }

    /// Random element with `terms` summands of degree ≤ `max_deg`.
    pub fn random_element(sys: &Arc<FiniteSystem>, max_deg: usize, terms: usize, rng: &mut impl Rng) -> SemicrossedElement {
        let items: Vec<(Word, FunctionCoeff)> = (0..terms)
            .map(|_| {
                let len = rng.gen_range(0..=max_deg);
                (random_word(sys.arity(), len, rng), random_function(sys.size(), rng))
            })
            .collect();
        SemicrossedElement::from_terms(sys, items).unwrap()
    }
}
