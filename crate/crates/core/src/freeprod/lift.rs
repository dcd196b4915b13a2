//! Noncommutative fractional linear maps on the left creation operators.
//!
//! For `X ∈ U(1, n)` the automorphism of the Cuntz–Toeplitz algebra is
//!
//! ```text
//! φ(L_ζ) = (x̄₀ I − L_{η̄₂})⁻¹ (L_{X̄₁ζ} − ⟨ζ, η̄₁⟩ I)
//! ```
//!
//! The resolvent is expanded as the Neumann series
//! `Σ_k x̄₀^{−k−1} L_{η̄₂}^k`, which converges in norm because
//! `q = ‖η₂‖ / |x₀| < 1`. A series of degree `D` has `n^D` words, so
//! [`NCSeries`] keeps the factored form and expands to an [`FPPoly`] only on
//! request.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ball::{frac_linear, j_matrix};
use super::{vec_norm, BlockSignature, FPPoly, Gen, U1nMatrix};
use crate::error::{arg, Result};

/// How the constant `⟨ζ, η̄₁⟩` is read: `Single` is the literal inner product
/// (giving `η₁_j` for `ζ = e_j`), `Double` conjugates once more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EtaPairing {
    Single,
    Double,
}

/// The truncated lift of one generator `L_j`:
/// `x̄₀⁻¹ Σ_{k=0}^{D} (L_r)^k (L_b − β)` with `r = η̄₂ / x̄₀`, `b = X̄₁ e_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NCSeries {
    pub degree: usize,
    scale: Complex64,
    ratio: Vec<Complex64>,
    linear: Vec<Complex64>,
    constant: Complex64,
    /// Bound on the operator norm of the discarded tail.
    pub certified_tail: f64,
}

impl NCSeries {
    pub fn n(&self) -> usize {
        self.ratio.len()
    }

    /// Value of the truncated series under the character `L_i ↦ λ_i`.
    pub fn eval_character(&self, lambda: &[Complex64]) -> Complex64 {
        let r: Complex64 = self.ratio.iter().zip(lambda).map(|(a, b)| a * b).sum();
        let affine: Complex64 = self.linear.iter().zip(lambda).map(|(a, b)| a * b).sum::<Complex64>() + self.constant;
        let mut geometric = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        for _ in 0..=self.degree {
            geometric += power;
            power *= r;
        }
        self.scale * geometric * affine
    }

    /// Value of the untruncated lift under the character.
    pub fn eval_character_exact(&self, lambda: &[Complex64]) -> Complex64 {
        let r: Complex64 = self.ratio.iter().zip(lambda).map(|(a, b)| a * b).sum();
        let affine: Complex64 = self.linear.iter().zip(lambda).map(|(a, b)| a * b).sum::<Complex64>() + self.constant;
        self.scale * affine / (Complex64::new(1.0, 0.0) - r)
    }

    /// Expands into a single-block polynomial. Fails if more than `max_terms`
    /// words would be produced.
    pub fn expand(&self, max_terms: usize) -> Result<FPPoly> {
        let n = self.n();
        let words: usize = (0..=self.degree + 1).map(|k| n.saturating_pow(k as u32)).fold(0usize, usize::saturating_add);
        if words > max_terms {
            return arg(format!("expansion needs up to {words} words, limit is {max_terms}"));
        }
        let sig = BlockSignature::new(vec![n])?;
        let gen = |i: usize| Gen::new(0, i);
        // resolvent words of length k with coefficient scale·∏ r
        let mut level: Vec<(Vec<Gen>, Complex64)> = vec![(Vec::new(), self.scale)];
        let mut terms = Vec::new();
        for k in 0..=self.degree {
            for (w, c) in &level {
                terms.push((w.clone(), c * self.constant));
                for (i, b) in self.linear.iter().enumerate() {
                    let mut word = w.clone();
                    word.push(gen(i));
                    terms.push((word, c * b));
                }
            }
            if k < self.degree {
                level = level
                    .iter()
                    .flat_map(|(w, c)| {
                        self.ratio.iter().enumerate().map(move |(i, r)| {
                            let mut word = w.clone();
                            word.push(gen(i));
                            (word, c * r)
                        })
                    })
                    .collect();
            }
        }
        FPPoly::from_terms(&sig, terms.into_iter().filter(|(_, c)| *c != Complex64::default()))
    }
}

/// Lifts every generator `L_j` through the fractional linear map of `x`,
/// truncating the resolvent at degree `degree`.
pub fn voiculescu_lift(x: &U1nMatrix, degree: usize) -> Vec<NCSeries> {
    voiculescu_lift_with(x, degree, EtaPairing::Single)
}

pub fn voiculescu_lift_with(x: &U1nMatrix, degree: usize, pairing: EtaPairing) -> Vec<NCSeries> {
    let n = x.n();
    let x0c = x.x0().conj();
    let eta1 = x.eta1();
    let eta2 = x.eta2();
    let x1 = x.x1();
    let ratio: Vec<Complex64> = eta2.iter().map(|e| e.conj() / x0c).collect();
    let q = vec_norm(&eta2) / x.x0().norm();
    let geometric_tail = if q == 0.0 { 0.0 } else { q.powi(degree as i32 + 1) / ((1.0 - q) * x.x0().norm()) };
    (0..n)
        .map(|j| {
            let linear: Vec<Complex64> = (0..n).map(|i| x1[(i, j)].conj()).collect();
            let beta = match pairing {
                EtaPairing::Single => eta1[j],
                EtaPairing::Double => eta1[j].conj(),
            };
            let affine_norm = vec_norm(&linear) + beta.norm();
            NCSeries {
                degree,
                scale: Complex64::new(1.0, 0.0) / x0c,
                ratio: ratio.clone(),
                linear,
                constant: -beta,
                certified_tail: geometric_tail * affine_norm,
            }
        })
        .collect()
}

/// Candidate conventions for matching the lift's dual map with a fractional
/// linear map. The first four are the conjugation variants of `X`; the `J*`
/// variants are the same matrices conjugated by `J`, the `JStar` one being `X⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Plain,
    Conjugate,
    Transpose,
    Adjoint,
    JPlain,
    JConjugate,
    JTranspose,
    JAdjoint,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Plain,
        Variant::Conjugate,
        Variant::Transpose,
        Variant::Adjoint,
        Variant::JPlain,
        Variant::JConjugate,
        Variant::JTranspose,
        Variant::JAdjoint,
    ];

    pub fn apply(self, x: &U1nMatrix) -> U1nMatrix {
        let m = x.matrix();
        let base = match self {
            Variant::Plain | Variant::JPlain => m.clone(),
            Variant::Conjugate | Variant::JConjugate => m.map(|c| c.conj()),
            Variant::Transpose | Variant::JTranspose => m.transpose(),
            Variant::Adjoint | Variant::JAdjoint => m.adjoint(),
        };
        let out = match self {
            Variant::JPlain | Variant::JConjugate | Variant::JTranspose | Variant::JAdjoint => {
                let j = j_matrix(x.n());
                &j * base * &j
            }
            _ => base,
        };
        // Every variant of a U(1,n) matrix stays in U(1,n).
        U1nMatrix::new(out).expect("conjugation variants preserve U(1,n)")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftCheck {
    pub variant: Variant,
    pub pairing: EtaPairing,
    pub max_deviation: f64,
    pub certified_tail: f64,
    /// `(variant, pairing, max deviation)` for every convention tried.
    pub all: Vec<(Variant, EtaPairing, f64)>,
}

impl LiftCheck {
    pub fn within_tail(&self, slack: f64) -> bool {
        self.max_deviation <= self.certified_tail + slack
    }
}

/// Evaluates the lifted generators at `ρ_λ` for each sample, and compares the
/// resulting point with the fractional linear image of `λ` under each
/// convention variant. Returns the best-matching convention.
pub fn lift_dual_check(x: &U1nMatrix, degree: usize, samples: &[Vec<Complex64>]) -> Result<LiftCheck> {
    let n = x.n();
    if let Some(s) = samples.iter().find(|s| s.len() != n || vec_norm(s) >= 1.0) {
        return arg(format!("sample {s:?} is not a point of the open {n}-ball"));
    }
    let mut all = Vec::new();
    let mut best: Option<(Variant, EtaPairing, f64, f64)> = None;
    for pairing in [EtaPairing::Single, EtaPairing::Double] {
        let lift = voiculescu_lift_with(x, degree, pairing);
        let tail = lift.iter().map(|s| s.certified_tail).fold(0.0, f64::max);
        let lifted: Vec<Vec<Complex64>> =
            samples.iter().map(|l| lift.iter().map(|s| s.eval_character(l)).collect()).collect();
        for variant in Variant::ALL {
            let y = variant.apply(x);
            let mut dev = 0.0f64;
            for (l, mu) in samples.iter().zip(&lifted) {
                let target = frac_linear(&y, l)?;
                let d = mu.iter().zip(&target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                dev = dev.max(d);
            }
            all.push((variant, pairing, dev));
            if best.is_none_or(|(_, _, b, _)| dev < b) {
                best = Some((variant, pairing, dev, tail));
            }
        }
    }
    let (variant, pairing, max_deviation, certified_tail) = best.expect("at least one variant");
    Ok(LiftCheck { variant, pairing, max_deviation, certified_tail, all })
}

#[cfg(test)]
mod tests {
    use super::super::ball::{mobius_to_u1n, unitary_from_matrix, BallMobius};
    use super::super::testutil::random_ball_vec;
    use super::super::{eval_character, PolyballPoint};
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_lift_is_exact() {
        let lift = voiculescu_lift(&U1nMatrix::identity(2), 4);
        for (j, s) in lift.iter().enumerate() {
            assert_eq!(s.certified_tail, 0.0);
            let p = s.expand(1000).unwrap();
            let expected = FPPoly::generator(&BlockSignature::new(vec![2]).unwrap(), 0, j).unwrap();
            assert_eq!(p, expected);
        }
        let samples = vec![vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.0)]];
        let check = lift_dual_check(&U1nMatrix::identity(2), 4, &samples).unwrap();
        assert!(check.all.iter().all(|(_, p, d)| *p == EtaPairing::Double || *d == 0.0));
        assert_eq!(check.max_deviation, 0.0);
    }

    #[test]
    fn rotation_lift() {
        let mut d = DMatrix::identity(2, 2);
        d[(1, 1)] = Complex64::new(0.0, 1.0);
        let x = U1nMatrix::new(d).unwrap();
        let lift = voiculescu_lift(&x, 5);
        assert_eq!(lift[0].certified_tail, 0.0);
        let p = lift[0].expand(100).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert!((p.terms().values().next().unwrap().norm() - 1.0).abs() < 1e-15);
        let check = lift_dual_check(&x, 5, &[vec![Complex64::new(0.3, 0.0)]]).unwrap();
        assert!(check.max_deviation < 1e-12);
    }

    #[test]
    fn tail_bound_for_half_disc_map() {
        let m = BallMobius::involution(vec![Complex64::new(0.5, 0.0)]).unwrap();
        let x = mobius_to_u1n(&m);
        let lift = voiculescu_lift(&x, 30);
        let q = vec_norm(&x.eta2()) / x.x0().norm();
        assert!((q - 0.5).abs() < 1e-12);
        let affine = lift[0].linear[0].norm() + lift[0].constant.norm();
        let bound = q.powi(31) / ((1.0 - q) * x.x0().norm()) * affine;
        assert!((lift[0].certified_tail - bound).abs() <= 1e-20);
        assert!(lift[0].certified_tail < 1e-8);
    }

    #[test]
    fn expansion_matches_factored_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let u = unitary_from_matrix(DMatrix::from_fn(2, 2, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        let m = BallMobius::new(random_ball_vec(2, 0.5, &mut rng), u).unwrap();
        let x = mobius_to_u1n(&m);
        let lift = voiculescu_lift(&x, 6);
        for s in &lift {
            let p = s.expand(10_000).unwrap();
            for _ in 0..10 {
                let l = random_ball_vec(2, 0.9, &mut rng);
                let via_poly = eval_character(&p, &PolyballPoint::new(vec![l.clone()]).unwrap()).unwrap();
                assert!((via_poly - s.eval_character(&l)).norm() < 1e-12);
                assert!((s.eval_character_exact(&l) - s.eval_character(&l)).norm() <= s.certified_tail + 1e-12);
            }
        }
        assert!(voiculescu_lift(&x, 40)[0].expand(1_000_000).is_err());
    }

    #[test]
    fn dual_map_matches_fractional_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 1..=3 {
            let u = unitary_from_matrix(DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            let m = BallMobius::new(random_ball_vec(n, 0.5, &mut rng), u).unwrap();
            let x = mobius_to_u1n(&m);
            let samples: Vec<Vec<Complex64>> = (0..50).map(|_| random_ball_vec(n, 0.9, &mut rng)).collect();
            let check = lift_dual_check(&x, 25, &samples).unwrap();
            assert!(check.within_tail(1e-10), "{check:?}");
            assert_eq!((check.variant, check.pairing), (Variant::JAdjoint, EtaPairing::Single));
        }
    }
}
