//! Free products `*ᵢ 𝔄_{nᵢ}` of noncommutative disc algebras.
//!
//! Polynomials in the block generators `s_{i,j}` ([`FPPoly`]) carry complex
//! floating-point coefficients. Characters are point evaluations on the
//! polyball `×ᵢ 𝔹_{nᵢ}`; the abelianization collapses each word to its
//! multidegree. Automorphisms of the polyball factor as per-block ball
//! automorphisms plus a size-preserving block permutation ([`ball`]), and
//! ball automorphisms lift to noncommutative fractional linear maps ([`lift`]).

pub mod ball;
pub mod lift;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

pub use ball::{frac_linear, mobius_apply, mobius_to_u1n, BallMobius, PolyballAuto, U1nMatrix};
pub use lift::{lift_dual_check, voiculescu_lift, LiftCheck, NCSeries, Variant};

/// Block sizes `(n₁, …, n_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlockSignature(Vec<usize>);

impl BlockSignature {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return arg("block signature needs at least one block and positive sizes");
        }
        Ok(Self(sizes))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn blocks(&self) -> usize {
        self.0.len()
    }

    pub fn generators(&self) -> impl Iterator<Item = Gen> + '_ {
        self.0.iter().enumerate().flat_map(|(block, &n)| (0..n).map(move |index| Gen { block, index }))
    }

    fn contains(&self, g: Gen) -> bool {
        g.block < self.0.len() && g.index < self.0[g.block]
    }

    /// Offset of a generator in the flat enumeration of all generators.
    fn flat_index(&self, g: Gen) -> usize {
        self.0[..g.block].iter().sum::<usize>() + g.index
    }

    fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// The generator `s_{block,index}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gen {
    pub block: usize,
    pub index: usize,
}

impl Gen {
    pub fn new(block: usize, index: usize) -> Self {
        Self { block, index }
    }
}

/// A noncommutative polynomial in the block generators.
#[derive(Debug, Clone, PartialEq)]
pub struct FPPoly {
    signature: BlockSignature,
    terms: BTreeMap<Vec<Gen>, Complex64>,
}

impl FPPoly {
    pub fn zero(signature: &BlockSignature) -> Self {
        Self { signature: signature.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(signature: &BlockSignature, c: Complex64) -> Self {
        Self::monomial(signature, Vec::new(), c).unwrap()
    }

    pub fn one(signature: &BlockSignature) -> Self {
        Self::constant(signature, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(signature: &BlockSignature, word: Vec<Gen>, c: Complex64) -> Result<Self> {
        if let Some(g) = word.iter().find(|g| !signature.contains(**g)) {
            return arg(format!("generator {g:?} outside signature {:?}", signature.sizes()));
        }
        let mut p = Self::zero(signature);
        p.add_term(word, c);
        Ok(p)
    }

    pub fn generator(signature: &BlockSignature, block: usize, index: usize) -> Result<Self> {
        Self::monomial(signature, vec![Gen::new(block, index)], Complex64::new(1.0, 0.0))
    }

    pub fn from_terms(signature: &BlockSignature, terms: impl IntoIterator<Item = (Vec<Gen>, Complex64)>) -> Result<Self> {
        let mut p = Self::zero(signature);
        for (w, c) in terms {
            p = p.add(&Self::monomial(signature, w, c)?)?;
        }
        Ok(p)
    }

    pub fn signature(&self) -> &BlockSignature {
        &self.signature
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Gen>, Complex64> {
        &self.terms
    }

    pub fn coefficient(&self, word: &[Gen]) -> Complex64 {
        self.terms.get(word).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    fn add_term(&mut self, word: Vec<Gen>, c: Complex64) {
        let entry = self.terms.entry(word).or_default();
        *entry += c;
        if *entry == Complex64::default() {
            self.terms.retain(|_, v| *v != Complex64::default());
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.signature != other.signature {
            return arg("polynomials over different block signatures");
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        other.terms.iter().for_each(|(w, c)| out.add_term(w.clone(), *c));
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(&self.signature);
        self.terms.iter().for_each(|(w, v)| out.add_term(w.clone(), v * c));
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Concatenation product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.signature);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a * b);
            }
        }
        Ok(out)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Gauge endomorphism `s_{i,j} ↦ z_{i,j} s_{i,j}`; needs `|z_{i,j}| ≤ 1`.
    pub fn gauge(&self, z: &[Vec<Complex64>]) -> Result<Self> {
        let shape_ok = z.len() == self.signature.blocks()
            && z.iter().zip(self.signature.sizes()).all(|(zi, &n)| zi.len() == n);
        if !shape_ok {
            return arg("gauge parameters must match the block signature");
        }
        if z.iter().flatten().any(|c| c.norm() > 1.0 + 1e-12) {
            return arg("gauge parameters must lie in the closed unit disc");
        }
        let mut out = Self::zero(&self.signature);
        for (w, c) in &self.terms {
            let factor = w.iter().fold(Complex64::new(1.0, 0.0), |acc, g| acc * z[g.block][g.index]);
            out.add_term(w.clone(), c * factor);
        }
        Ok(out)
    }

    /// `Φ_k`: the homogeneous part of degree `k`.
    pub fn fourier_component(&self, k: usize) -> Self {
        Self {
            signature: self.signature.clone(),
            terms: self.terms.iter().filter(|(w, _)| w.len() == k).map(|(w, c)| (w.clone(), *c)).collect(),
        }
    }

    /// `Σ_{i=0}^{k} (1 − i/k) Φ_i`.
    pub fn cesaro_mean(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return arg("Cesàro mean needs k ≥ 1");
        }
        Ok(Self {
            signature: self.signature.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() < k)
                .map(|(w, c)| (w.clone(), c * (1.0 - w.len() as f64 / k as f64)))
                .collect(),
        })
    }
}

/// A point of the closed polyball, one complex vector per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyballPoint {
    blocks: Vec<Vec<Complex64>>,
}

impl PolyballPoint {
    /// Accepts blocks with Euclidean norm ≤ 1 (up to rounding).
    pub fn new(blocks: Vec<Vec<Complex64>>) -> Result<Self> {
        if let Some(i) = blocks.iter().position(|b| vec_norm(b) > 1.0 + 1e-12) {
            return Err(Error::Domain(format!("block {i} lies outside the closed unit ball")));
        }
        Ok(Self { blocks })
    }

    pub fn origin(signature: &BlockSignature) -> Self {
        Self { blocks: signature.sizes().iter().map(|&n| vec![Complex64::default(); n]).collect() }
    }

    pub fn blocks(&self) -> &[Vec<Complex64>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[Complex64] {
        &self.blocks[i]
    }

    pub fn in_open_ball(&self) -> bool {
        self.blocks.iter().all(|b| vec_norm(b) < 1.0)
    }

    fn matches(&self, sig: &BlockSignature) -> bool {
        self.blocks.len() == sig.blocks() && self.blocks.iter().zip(sig.sizes()).all(|(b, &n)| b.len() == n)
    }
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨u, v⟩ = Σ u_k v̄_k`.
pub(crate) fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

/// The character `ρ_λ`, sending `s_{i,j}` to `λ_{i,j}`.
pub fn eval_character(p: &FPPoly, lambda: &PolyballPoint) -> Result<Complex64> {
    if !lambda.matches(p.signature()) {
        return arg("polyball point does not match the block signature");
    }
    Ok(p.terms()
        .iter()
        .map(|(w, c)| w.iter().fold(*c, |acc, g| acc * lambda.blocks[g.block][g.index]))
        .sum())
}

/// A commutative polynomial: multidegree (flat over all generators) to coefficient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommPoly(pub BTreeMap<Vec<u32>, Complex64>);

impl CommPoly {
    /// True when every coefficient has modulus ≤ `tol`.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.0.values().all(|c| c.norm() <= tol)
    }
}

/// Image in the commutative quotient: words collapse to multidegrees.
pub fn abelianize(p: &FPPoly) -> CommPoly {
    let sig = p.signature();
    let mut out: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
    for (w, c) in p.terms() {
        let mut deg = vec![0u32; sig.total()];
        w.iter().for_each(|g| deg[sig.flat_index(*g)] += 1);
        *out.entry(deg).or_default() += c;
    }
    out.retain(|_, c| *c != Complex64::default());
    CommPoly(out)
}

/// The polyball kernel `k_λ(z) = ∏ᵢ 1 / (1 − ⟨zᵢ, λᵢ⟩)`.
pub fn kernel_eval(lambda: &PolyballPoint, z: &PolyballPoint) -> Result<Complex64> {
    if lambda.blocks.len() != z.blocks.len() {
        return arg("kernel arguments have different block counts");
    }
    let mut value = Complex64::new(1.0, 0.0);
    for (i, (l, zz)) in lambda.blocks.iter().zip(&z.blocks).enumerate() {
        if l.len() != zz.len() {
            return arg(format!("block {i} sizes differ"));
        }
        let denom = Complex64::new(1.0, 0.0) - inner(zz, l);
        if denom.norm() < 1e-15 {
            return Err(Error::Domain(format!("kernel denominator vanishes in block {i}")));
        }
        value /= denom;
    }
    Ok(value)
}

/// `φ_α(s_{i,j}) = s_{α(i),j}` for a block permutation with `n_{α(i)} = n_i`.
pub fn permutation_lift(alpha: &[usize], p: &FPPoly) -> Result<FPPoly> {
    let sizes = p.signature().sizes();
    let mut seen = vec![false; sizes.len()];
    let valid = alpha.len() == sizes.len()
        && alpha.iter().all(|&a| a < sizes.len() && !std::mem::replace(&mut seen[a], true))
        && alpha.iter().enumerate().all(|(i, &a)| sizes[a] == sizes[i]);
    if !valid {
        return arg(format!("{alpha:?} is not a size-preserving permutation of the blocks {sizes:?}"));
    }
    FPPoly::from_terms(
        p.signature(),
        p.terms().iter().map(|(w, c)| (w.iter().map(|g| Gen::new(alpha[g.block], g.index)).collect(), *c)),
    )
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;

    pub fn random_poly(sig: &BlockSignature, max_deg: usize, terms: usize, rng: &mut impl Rng) -> FPPoly {
        let gens: Vec<Gen> = sig.generators().collect();
        FPPoly::from_terms(
            sig,
            (0..terms).map(|_| {
                let len = rng.gen_range(0..=max_deg);
                let w = (0..len).map(|_| gens[rng.gen_range(0..gens.len())]).collect();
                (w, Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            }),
        )
        .unwrap()
    }

    pub fn random_ball_vec(n: usize, radius: f64, rng: &mut impl Rng) -> Vec<Complex64> {
        let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let r = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / (2.0 * n as f64));
        let norm = vec_norm(&v).max(1e-300);
        v.into_iter().map(|c| c * (r / norm)).collect()
    }

    pub fn random_point(sig: &BlockSignature, radius: f64, rng: &mut impl Rng) -> PolyballPoint {
        PolyballPoint::new(sig.sizes().iter().map(|&n| random_ball_vec(n, radius, rng)).collect()).unwrap()
    }
}
