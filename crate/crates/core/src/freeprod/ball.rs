//! Automorphisms of the unit ball and the polyball.
//!
//! A ball automorphism is stored as `λ ↦ U φ_a(λ)` with Rudin's involution
//!
//! ```text
//! φ_a(λ) = (a − P_a λ − s_a Q_a λ) / (1 − ⟨λ, a⟩),   s_a = √(1 − |a|²),
//! ```
//!
//! `P_a` the orthogonal projection onto `span{a}` and `Q_a = I − P_a`. The same
//! map is the fractional linear action of a matrix in `U(1, n)`, the group
//! preserving `J = diag(1, −1, …, −1)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{inner, vec_norm, PolyballPoint};
use crate::error::{arg, Error, Result};

const UNITARY_TOL: f64 = 1e-12;
const U1N_TOL: f64 = 1e-9;

fn cz(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `λ ↦ U φ_a(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMobius {
    a: Vec<Complex64>,
    u: DMatrix<Complex64>,
}

impl BallMobius {
    pub fn new(a: Vec<Complex64>, u: DMatrix<Complex64>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return arg("ball dimension must be positive");
        }
        if vec_norm(&a) >= 1.0 {
            return arg("the point a must lie in the open ball");
        }
        if u.nrows() != n || u.ncols() != n {
            return arg(format!("U must be {n}×{n}"));
        }
        let defect = (u.adjoint() * &u - DMatrix::identity(n, n)).camax();
        if defect > UNITARY_TOL {
            return arg(format!("U is not unitary (defect {defect:.2e})"));
        }
        Ok(Self { a, u })
    }

    /// `φ_a` itself (`U = I`).
    pub fn involution(a: Vec<Complex64>) -> Result<Self> {
        let n = a.len();
        Self::new(a, DMatrix::identity(n, n))
    }

    pub fn identity(n: usize) -> Self {
        // φ_0(λ) = −λ, so U = −I undoes it.
        Self { a: vec![Complex64::default(); n], u: -DMatrix::<Complex64>::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn u(&self) -> &DMatrix<Complex64> {
        &self.u
    }

    /// `P_a + s_a Q_a` as a matrix.
    fn linear_part(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let a = DVector::from_column_slice(&self.a);
        let norm2 = a.norm_squared();
        let s = (1.0 - norm2).sqrt();
        let p = if norm2 == 0.0 { DMatrix::zeros(n, n) } else { &a * a.adjoint() / cz(norm2) };
        let q = DMatrix::identity(n, n) - &p;
        p + q * cz(s)
    }
}

/// `U φ_a(λ)` for `‖λ‖ ≤ 1`.
pub fn mobius_apply(m: &BallMobius, lambda: &[Complex64]) -> Result<Vec<Complex64>> {
    if lambda.len() != m.dim() {
        return arg(format!("point has dimension {}, map has {}", lambda.len(), m.dim()));
    }
    if vec_norm(lambda) > 1.0 + 1e-12 {
        return Err(Error::Domain("point outside the closed unit ball".into()));
    }
    let l = DVector::from_column_slice(lambda);
    let a = DVector::from_column_slice(&m.a);
    let denom = cz(1.0) - inner(lambda, &m.a);
    let num = &a - m.linear_part() * l;
    let image = &m.u * (num / denom);
    Ok(image.iter().copied().collect())
}

/// A matrix `X = [[x₀, η₁*], [η₂, X₁]]` in `U(1, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct U1nMatrix {
    x: DMatrix<Complex64>,
}

pub(crate) fn j_matrix(n: usize) -> DMatrix<Complex64> {
    let mut j = -DMatrix::<Complex64>::identity(n + 1, n + 1);
    j[(0, 0)] = cz(1.0);
    j
}

impl U1nMatrix {
    /// Validates `X* J X = J` (entrywise, scaled by `‖X‖²`).
    pub fn new(x: DMatrix<Complex64>) -> Result<Self> {
        if x.nrows() != x.ncols() || x.nrows() < 2 {
            return Err(Error::Validation("U(1,n) matrix must be square of size n+1 ≥ 2".into()));
        }
        let m = Self { x };
        let scale = m.x.camax().max(1.0).powi(2);
        let defect = m.j_defect();
        if !defect.is_finite() || defect > U1N_TOL * scale {
            return Err(Error::Validation(format!("matrix is not in U(1,n): |X*JX − J| = {defect:.2e}")));
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self { x: DMatrix::identity(n + 1, n + 1) }
    }

    pub fn n(&self) -> usize {
        self.x.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.x
    }

    /// `max |X* J X − J|` entrywise.
    pub fn j_defect(&self) -> f64 {
        let j = j_matrix(self.n());
        (self.x.adjoint() * &j * &self.x - j).camax()
    }

    pub fn x0(&self) -> Complex64 {
        self.x[(0, 0)]
    }

    /// `η₁`, read off the first row `[x₀, η₁*]`.
    pub fn eta1(&self) -> Vec<Complex64> {
        (1..=self.n()).map(|k| self.x[(0, k)].conj()).collect()
    }

    pub fn eta2(&self) -> Vec<Complex64> {
        (1..=self.n()).map(|k| self.x[(k, 0)]).collect()
    }

    pub fn x1(&self) -> DMatrix<Complex64> {
        self.x.view((1, 1), (self.n(), self.n())).into_owned()
    }

    /// `X⁻¹ = J X* J`.
    pub fn inverse(&self) -> Self {
        let j = j_matrix(self.n());
        Self { x: &j * self.x.adjoint() * &j }
    }
}

/// The matrix in `U(1, n)` whose fractional linear action is `λ ↦ U φ_a(λ)`:
/// `X = s_a⁻¹ [[1, −a*], [U a, −U(P_a + s_a Q_a)]]`.
pub fn mobius_to_u1n(m: &BallMobius) -> U1nMatrix {
    let n = m.dim();
    let s = (1.0 - vec_norm(&m.a).powi(2)).sqrt();
    let a = DVector::from_column_slice(&m.a);
    let ua = &m.u * &a;
    let block = -(&m.u * m.linear_part());
    let mut x = DMatrix::<Complex64>::zeros(n + 1, n + 1);
    x[(0, 0)] = cz(1.0);
    for k in 0..n {
        x[(0, k + 1)] = -m.a[k].conj();
        x[(k + 1, 0)] = ua[k];
        for l in 0..n {
            x[(k + 1, l + 1)] = block[(k, l)];
        }
    }
    U1nMatrix { x: x / cz(s) }
}

/// `(X₁λ + η₂) / (x₀ + ⟨λ, η₁⟩)`.
pub fn frac_linear(x: &U1nMatrix, lambda: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.n();
    if lambda.len() != n {
        return arg(format!("point has dimension {}, matrix acts on dimension {n}", lambda.len()));
    }
    if vec_norm(lambda) > 1.0 + 1e-12 {
        return Err(Error::Domain("point outside the closed unit ball".into()));
    }
    let l = DVector::from_column_slice(lambda);
    let denom = x.x0() + inner(lambda, &x.eta1());
    if denom.norm() < 1e-300 {
        return Err(Error::Domain("fractional linear denominator vanishes".into()));
    }
    let num = x.x1() * l + DVector::from_vec(x.eta2());
    Ok((num / denom).iter().copied().collect())
}

/// A polyball automorphism in factored form: block `i` of the image is
/// `block_maps[i]` applied to block `block_perm[i]` of the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyballAuto {
    block_maps: Vec<BallMobius>,
    block_perm: Vec<usize>,
}

impl PolyballAuto {
    pub fn new(block_maps: Vec<BallMobius>, block_perm: Vec<usize>) -> Result<Self> {
        let m = block_maps.len();
        let mut seen = vec![false; m];
        if block_perm.len() != m || !block_perm.iter().all(|&p| p < m && !std::mem::replace(&mut seen[p], true)) {
            return arg("block_perm must be a permutation of the blocks");
        }
        if block_perm.iter().enumerate().any(|(i, &p)| block_maps[p].dim() != block_maps[i].dim()) {
            return arg("block_perm must preserve block sizes");
        }
        Ok(Self { block_maps, block_perm })
    }

    pub fn block_maps(&self) -> &[BallMobius] {
        &self.block_maps
    }

    pub fn block_perm(&self) -> &[usize] {
        &self.block_perm
    }

    pub fn apply(&self, lambda: &PolyballPoint) -> Result<PolyballPoint> {
        if lambda.blocks().len() != self.block_maps.len() {
            return arg("point has the wrong number of blocks");
        }
        let blocks = self
            .block_maps
            .iter()
            .zip(&self.block_perm)
            .map(|(m, &src)| mobius_apply(m, lambda.block(src)))
            .collect::<Result<Vec<_>>>()?;
        PolyballPoint::new(blocks)
    }
}

/// Orthonormalizes the columns of a square matrix (QR with phases fixed so
/// the diagonal of R is positive). Handy for producing test unitaries.
pub fn unitary_from_matrix(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let qr = m.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..q.ncols() {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / cz(d.norm());
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    q
}
