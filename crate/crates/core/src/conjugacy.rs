//! Deciders for conjugacy, piecewise conjugacy and partition conjugacy.
//!
//! Every decider is an exhaustive backtracking search and returns the
//! lexicographically least witness: the bijection `γ` is compared in
//! one-line notation first, then the permutation field `α` point by point.
//! Since points are discrete, clopen sets are arbitrary subsets and the
//! index sets `V_{i,j} = {x : α_x(i) = j}` are read off the field.
//!
//! The intertwining convention throughout is `γ(σ_i(x)) = τ_{α_x(i)}(γ(x))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynsys::FiniteSystem;
use crate::error::{Error, Result};
use crate::quotient::{local_signature, EntrySignature};

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&v| v < p.len() && !std::mem::replace(&mut seen[v], true))
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    p.iter().enumerate().for_each(|(i, &v)| inv[v] = i);
    inv
}

/// A bijection `γ: X → Y` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bijection(Vec<usize>);

impl Bijection {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        if !is_permutation(&mapping) {
            return Err(Error::Validation(format!("{mapping:?} is not a bijection")));
        }
        Ok(Self(mapping))
    }

    pub fn identity(size: usize) -> Self {
        Self((0..size).collect())
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn inverse(&self) -> Bijection {
        Bijection(invert(&self.0))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One permutation `α_x` of the map indices per point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PermutationField(Vec<Vec<usize>>);

impl PermutationField {
    pub fn new(perms: Vec<Vec<usize>>) -> Result<Self> {
        let arity = perms.first().map_or(0, Vec::len);
        for (x, p) in perms.iter().enumerate() {
            if p.len() != arity || !is_permutation(p) {
                return Err(Error::Validation(format!("alpha at point {x} ({p:?}) is not a permutation of 0..{arity}")));
            }
        }
        Ok(Self(perms))
    }

    pub fn identity(size: usize, arity: usize) -> Self {
        Self(vec![(0..arity).collect(); size])
    }

    /// `α_x`.
    pub fn at(&self, x: usize) -> &[usize] {
        &self.0[x]
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.0
    }

    /// The index set `V_{i,j} = {x : α_x(i) = j}`.
    pub fn index_set(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.0.len()).filter(|&x| self.0[x][i] == j).collect()
    }
}

/// `γ` together with a global recoloring `β` when one was needed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyWitness {
    pub gamma: Bijection,
    pub recolor: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseWitness {
    pub gamma: Bijection,
    pub alpha: PermutationField,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionWitness {
    pub gamma: Bijection,
    pub alpha: PermutationField,
}

impl PartitionWitness {
    pub fn identity(sys: &FiniteSystem) -> Self {
        Self { gamma: Bijection::identity(sys.size()), alpha: PermutationField::identity(sys.size(), sys.arity()) }
    }
}

fn check_compatible(a: &FiniteSystem, b: &FiniteSystem) -> Result<()> {
    if a.size() != b.size() || a.arity() != b.arity() {
        return Err(Error::IncompatibleSystems(format!(
            "sizes {} vs {}, arities {} vs {}",
            a.size(),
            b.size(),
            a.arity(),
            b.arity()
        )));
    }
    Ok(())
}

/// Depth-first enumeration of bijections in lexicographic order.
///
/// `admissible(x, y)` filters single assignments `γ(x) = y`; `partial_ok` sees
/// the partial assignment after each extension; `complete` is called on full
/// bijections and stops the search when it returns `Some`.
fn search_bijections<T>(
    size: usize,
    admissible: impl Fn(usize, usize) -> bool,
    partial_ok: impl Fn(&[Option<usize>], usize) -> bool,
    mut complete: impl FnMut(&Bijection) -> Option<T>,
) -> Option<T> {
    let mut assign: Vec<Option<usize>> = vec![None; size];
    let mut used = vec![false; size];
    let mut stack: Vec<usize> = Vec::with_capacity(size); // next candidate per depth
    stack.push(0);
    while let Some(&cand) = stack.last() {
        let x = stack.len() - 1;
        if x == size {
            let gamma = Bijection(assign.iter().map(|v| v.unwrap()).collect());
            if let Some(t) = complete(&gamma) {
                return Some(t);
            }
            stack.pop();
            continue;
        }
        // Undo any previous choice at this depth.
        if let Some(prev) = assign[x].take() {
            used[prev] = false;
        }
        let next = (cand..size).find(|&y| !used[y] && admissible(x, y) && {
            assign[x] = Some(y);
            let ok = partial_ok(&assign, x);
            assign[x] = None;
            ok
        });
        match next {
            Some(y) => {
                assign[x] = Some(y);
                used[y] = true;
                *stack.last_mut().unwrap() = y + 1;
                stack.push(0);
            }
            None => {
                stack.pop();
            }
        }
    }
    None
}

/// For each point `x` whose images are all assigned, the multiset of
/// `γ(σ_i(x))` must equal the multiset of `τ_j(γ(x))`. Only checks the
/// constraints touched by the newest assignment `last`.
fn image_multisets_agree(a: &FiniteSystem, b: &FiniteSystem, assign: &[Option<usize>], last: usize) -> bool {
    let n = a.arity();
    let touched = (0..=last).filter(|&x| x == last || (0..n).any(|i| a.map(i, x) == last));
    let mut lhs = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for x in touched {
        let Some(gx) = assign[x] else { continue };
        lhs.clear();
        let mut complete = true;
        for i in 0..n {
            match assign[a.map(i, x)] {
                Some(v) => lhs.push(v),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if !complete {
            continue;
        }
        rhs.clear();
        rhs.extend((0..n).map(|j| b.map(j, gx)));
        lhs.sort_unstable();
        rhs.sort_unstable();
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Searches for `γ` with `γ ∘ σ_i = τ_i ∘ γ` for all `i`; with `allow_recolor`,
/// also tries `γ ∘ σ_i = τ_{β(i)} ∘ γ` for a single global permutation `β`.
pub fn decide_conjugate(a: &FiniteSystem, b: &FiniteSystem, allow_recolor: bool) -> Result<Option<ConjugacyWitness>> {
    check_compatible(a, b)?;
    let n = a.arity();
    let recolorings = if allow_recolor { permutations(n) } else { vec![(0..n).collect()] };
    let identity: Vec<usize> = (0..n).collect();
    let mut best: Option<ConjugacyWitness> = None;
    for beta in recolorings {
        let found = search_bijections(
            a.size(),
            |_, _| true,
            |assign, last| {
                // Check every constraint involving only assigned points.
                (0..=last).all(|x| {
                    let gx = assign[x].unwrap();
                    (0..n).all(|i| match assign[a.map(i, x)] {
                        Some(v) => v == b.map(beta[i], gx),
                        None => true,
                    })
                })
            },
            |g| Some(g.clone()),
        );
        if let Some(gamma) = found {
            let candidate =
                ConjugacyWitness { gamma, recolor: (beta != identity || allow_recolor).then(|| beta.clone()) };
            if best.as_ref().is_none_or(|w| candidate.gamma < w.gamma) {
                best = Some(candidate);
            }
        }
    }
    Ok(best)
}

/// For a fixed `γ`, the lexicographically least `α_x` with
/// `γ(σ_i(x)) = τ_{α_x(i)}(γ(x))`, if any.
fn pointwise_alphas(a: &FiniteSystem, b: &FiniteSystem, gamma: &Bijection, x: usize, perms: &[Vec<usize>]) -> Vec<usize> {
    let gx = gamma.apply(x);
    (0..perms.len())
        .filter(|&k| {
            let p = &perms[k];
            (0..a.arity()).all(|i| gamma.apply(a.map(i, x)) == b.map(p[i], gx))
        })
        .collect()
}

/// Searches for `γ` and a pointwise field `α` with `γ(σ_i(x)) = τ_{α_x(i)}(γ(x))`.
pub fn decide_piecewise(a: &FiniteSystem, b: &FiniteSystem) -> Result<Option<PiecewiseWitness>> {
    check_compatible(a, b)?;
    let perms = permutations(a.arity());
    Ok(search_bijections(
        a.size(),
        |_, _| true,
        |assign, last| image_multisets_agree(a, b, assign, last),
        |gamma| {
            let mut field = Vec::with_capacity(a.size());
            for x in a.points() {
                let first = *pointwise_alphas(a, b, gamma, x, &perms).first()?;
                field.push(perms[first].clone());
            }
            Some(PiecewiseWitness { gamma: gamma.clone(), alpha: PermutationField(field) })
        },
    ))
}

/// Searches for a partition conjugacy `(γ, α)`.
///
/// Besides pointwise intertwining, the field must respect the pre-image
/// conditions on both sides:
/// `σ_i(x) = σ_i(y) ⇒ α_x(i) = α_y(i)` and
/// `τ_j(γ(x)) = τ_j(γ(y)) ⇒ α_x⁻¹(j) = α_y⁻¹(j)`.
/// Candidate bijections are filtered by local entry signatures, which any
/// partition conjugacy preserves.
pub fn decide_partition(a: &FiniteSystem, b: &FiniteSystem) -> Result<Option<PartitionWitness>> {
    check_compatible(a, b)?;
    let perms = permutations(a.arity());
    let sig_a: Vec<EntrySignature> = a.points().map(|x| local_signature(a, x).unwrap()).collect();
    let sig_b: Vec<EntrySignature> = b.points().map(|x| local_signature(b, x).unwrap()).collect();
    Ok(search_bijections(
        a.size(),
        |x, y| sig_a[x] == sig_b[y],
        |assign, last| image_multisets_agree(a, b, assign, last),
        |gamma| {
            let candidates: Vec<Vec<usize>> =
                a.points().map(|x| pointwise_alphas(a, b, gamma, x, &perms)).collect();
            if candidates.iter().any(Vec::is_empty) {
                return None;
            }
            solve_alpha_field(a, b, gamma, &perms, &candidates)
                .map(|alpha| PartitionWitness { gamma: gamma.clone(), alpha })
        },
    ))
}

fn alpha_compatible(a: &FiniteSystem, b: &FiniteSystem, gamma: &Bijection, x: usize, px: &[usize], y: usize, py: &[usize]) -> bool {
    let n = a.arity();
    let (gx, gy) = (gamma.apply(x), gamma.apply(y));
    for i in 0..n {
        if a.map(i, x) == a.map(i, y) && px[i] != py[i] {
            return false;
        }
    }
    for j in 0..n {
        if b.map(j, gx) == b.map(j, gy) {
            let ix = px.iter().position(|&v| v == j);
            let iy = py.iter().position(|&v| v == j);
            if ix != iy {
                return false;
            }
        }
    }
    true
}

/// Backtracking over points in order, each trying its admissible `α_x` in
/// lexicographic order; the constraints are pairwise so checking each new
/// choice against earlier points is complete.
fn solve_alpha_field(
    a: &FiniteSystem,
    b: &FiniteSystem,
    gamma: &Bijection,
    perms: &[Vec<usize>],
    candidates: &[Vec<usize>],
) -> Option<PermutationField> {
    let size = a.size();
    let mut choice: Vec<usize> = Vec::with_capacity(size); // index into candidates[x]
    let mut next_try = 0usize;
    loop {
        let x = choice.len();
        if x == size {
            let field = choice.iter().enumerate().map(|(x, &c)| perms[candidates[x][c]].clone()).collect();
            return Some(PermutationField(field));
        }
        let found = (next_try..candidates[x].len()).find(|&c| {
            let px = &perms[candidates[x][c]];
            choice
                .iter()
                .enumerate()
                .all(|(y, &cy)| alpha_compatible(a, b, gamma, x, px, y, &perms[candidates[y][cy]]))
        });
        match found {
            Some(c) => {
                choice.push(c);
                next_try = 0;
            }
            None => {
                let prev = choice.pop()?;
                next_try = prev + 1;
            }
        }
    }
}

/// Outcome of one condition in [`verify_partition_witness`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub checks: Vec<ConditionCheck>,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "ok" } else { "FAIL" };
            write!(f, "{status:4} {}", c.condition)?;
            if let Some(ce) = &c.counterexample {
                write!(f, " ({ce})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn check(condition: &str, counterexample: Option<String>) -> ConditionCheck {
    ConditionCheck { condition: condition.to_string(), passed: counterexample.is_none(), counterexample }
}

/// Checks a partition witness against every defining condition, both in the
/// pointwise form used by the decider and in the literal set form
/// `σ_i⁻¹(σ_i(V_{i,j})) = V_{i,j} = γ⁻¹(τ_j⁻¹(τ_j(γ(V_{i,j}))))`.
pub fn verify_partition_witness(a: &FiniteSystem, b: &FiniteSystem, w: &PartitionWitness) -> Result<WitnessReport> {
    check_compatible(a, b)?;
    let (size, n) = (a.size(), a.arity());
    if w.gamma.len() != size || !is_permutation(w.gamma.as_slice()) {
        return Err(Error::Validation(format!("gamma must be a bijection of 0..{size}")));
    }
    if w.alpha.perms().len() != size {
        return Err(Error::Validation(format!("alpha must have one permutation per point ({size})")));
    }
    for (x, p) in w.alpha.perms().iter().enumerate() {
        if p.len() != n || !is_permutation(p) {
            return Err(Error::Validation(format!("alpha at point {x} is not a permutation of 0..{n}")));
        }
    }
    let gamma = &w.gamma;
    let ginv = gamma.inverse();
    let v = |i: usize, j: usize| -> Vec<bool> { (0..size).map(|x| w.alpha.at(x)[i] == j).collect() };

    let mut checks = Vec::new();

    // For each j the sets V_{·,j} partition X, and likewise for each i.
    let mut cover_cols = None;
    let mut cover_rows = None;
    for x in 0..size {
        for k in 0..n {
            let in_col = (0..n).filter(|&i| v(i, k)[x]).count();
            if in_col != 1 && cover_cols.is_none() {
                cover_cols = Some(format!("point {x} lies in {in_col} of the sets V_(i,{k})"));
            }
            let in_row = (0..n).filter(|&j| v(k, j)[x]).count();
            if in_row != 1 && cover_rows.is_none() {
                cover_rows = Some(format!("point {x} lies in {in_row} of the sets V_({k},j)"));
            }
        }
    }
    checks.push(check("cover over i", cover_cols));
    checks.push(check("cover over j", cover_rows));

    let intertwining = (0..size).flat_map(|x| (0..n).map(move |i| (x, i))).find_map(|(x, i)| {
        let j = w.alpha.at(x)[i];
        let lhs = gamma.apply(a.map(i, x));
        let rhs = b.map(j, gamma.apply(x));
        (lhs != rhs).then(|| format!("x={x}, i={i}: gamma(sigma_i(x))={lhs} but tau_{j}(gamma(x))={rhs}"))
    });
    checks.push(check("intertwining", intertwining));

    let mut sigma_pre = None;
    let mut tau_pre = None;
    'outer: for x in 0..size {
        for y in 0..size {
            for i in 0..n {
                if sigma_pre.is_none() && a.map(i, x) == a.map(i, y) && w.alpha.at(x)[i] != w.alpha.at(y)[i] {
                    sigma_pre = Some(format!("sigma_{i}({x}) = sigma_{i}({y}) but alpha differs at {i}"));
                }
                let j = i;
                let (gx, gy) = (gamma.apply(x), gamma.apply(y));
                let inv_x = w.alpha.at(x).iter().position(|&c| c == j);
                let inv_y = w.alpha.at(y).iter().position(|&c| c == j);
                if tau_pre.is_none() && b.map(j, gx) == b.map(j, gy) && inv_x != inv_y {
                    tau_pre = Some(format!("tau_{j}(gamma({x})) = tau_{j}(gamma({y})) but alpha^-1 differs at {j}"));
                }
            }
            if sigma_pre.is_some() && tau_pre.is_some() {
                break 'outer;
            }
        }
    }
    checks.push(check("sigma-side pre-image", sigma_pre));
    checks.push(check("tau-side pre-image", tau_pre));

    // Literal set forms of the pre-image conditions.
    let mut sigma_set = None;
    let mut tau_set = None;
    for i in 0..n {
        for j in 0..n {
            let vij = v(i, j);
            let images: Vec<bool> = {
                let mut hit = vec![false; size];
                (0..size).filter(|&x| vij[x]).for_each(|x| hit[a.map(i, x)] = true);
                hit
            };
            let saturated: Vec<bool> = (0..size).map(|x| images[a.map(i, x)]).collect();
            if saturated != vij && sigma_set.is_none() {
                let x = (0..size).find(|&x| saturated[x] != vij[x]).unwrap();
                sigma_set = Some(format!("sigma_{i}^-1(sigma_{i}(V_({i},{j}))) differs from V_({i},{j}) at {x}"));
            }
            let t_images: Vec<bool> = {
                let mut hit = vec![false; size];
                (0..size).filter(|&x| vij[x]).for_each(|x| hit[b.map(j, gamma.apply(x))] = true);
                hit
            };
            // γ⁻¹(τ_j⁻¹(τ_j(γ(V)))): points x whose γ(x) is sent by τ_j into the image.
            let pulled: Vec<bool> = (0..size).map(|x| t_images[b.map(j, gamma.apply(x))]).collect();
            debug_assert!((0..size).all(|y| pulled[ginv.apply(gamma.apply(y))] == pulled[y]));
            if pulled != vij && tau_set.is_none() {
                let x = (0..size).find(|&x| pulled[x] != vij[x]).unwrap();
                tau_set = Some(format!(
                    "gamma^-1(tau_{j}^-1(tau_{j}(gamma(V_({i},{j}))))) differs from V_({i},{j}) at {x}"
                ));
            }
        }
    }
    checks.push(check("sigma-side set form", sigma_set));
    checks.push(check("tau-side set form", tau_set));

    Ok(WitnessReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::fixtures::*;
    use proptest::prelude::*;

    fn arb_pair_and_witness() -> impl Strategy<Value = (FiniteSystem, FiniteSystem, PartitionWitness)> {
        (1usize..=4).prop_flat_map(|size| {
            let table = proptest::collection::vec(0..size, size);
            let perms = permutations(2);
            (
                proptest::collection::vec(table.clone(), 2),
                proptest::collection::vec(table, 2),
                proptest::sample::select(permutations(size)),
                proptest::collection::vec(proptest::sample::select(perms), size),
            )
                .prop_map(move |(ta, tb, g, alpha)| {
                    (
                        FiniteSystem::new(size, ta).unwrap(),
                        FiniteSystem::new(size, tb).unwrap(),
                        PartitionWitness { gamma: Bijection(g), alpha: PermutationField(alpha) },
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn pointwise_and_set_forms_agree((a, b, w) in arb_pair_and_witness()) {
            let report = verify_partition_witness(&a, &b, &w).unwrap();
            let passed = |name: &str| report.checks.iter().find(|c| c.condition == name).unwrap().passed;
            prop_assert_eq!(passed("sigma-side pre-image"), passed("sigma-side set form"));
            prop_assert_eq!(passed("tau-side pre-image"), passed("tau-side set form"));
        }
    }

    fn field(v: &[&[usize]]) -> PermutationField {
        PermutationField::new(v.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn permutations_are_lexicographic() {
        assert_eq!(permutations(3), vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0]
        ]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn conjugacy_examples() {
        assert_eq!(decide_conjugate(&dk_sigma(), &dk_tau(), false).unwrap(), None);
        assert_eq!(decide_conjugate(&dk_sigma(), &dk_tau(), true).unwrap(), None);
        assert_eq!(decide_conjugate(&p_a(), &p_b(), true).unwrap(), None);
        let w = decide_conjugate(&p_a(), &p_a(), false).unwrap().unwrap();
        assert_eq!(w.gamma, Bijection::identity(4));
        assert_eq!(w.recolor, None);
        let swapped = FiniteSystem::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(decide_conjugate(&dk_sigma(), &swapped, false).unwrap(), None);
        let w = decide_conjugate(&dk_sigma(), &swapped, true).unwrap().unwrap();
        assert_eq!(w.recolor, Some(vec![1, 0]));
        assert!(decide_conjugate(&dk_sigma(), &p_a(), false).is_err());
    }

    #[test]
    fn piecewise_examples() {
        let w = decide_piecewise(&dk_sigma(), &dk_tau()).unwrap().unwrap();
        assert_eq!(w.gamma, Bijection::identity(2));
        assert_eq!(w.alpha, field(&[&[0, 1], &[1, 0]]));
        assert!(decide_piecewise(&p_a(), &p_b()).unwrap().is_some());
        let w = decide_piecewise(&duncan(), &duncan()).unwrap().unwrap();
        assert_eq!(w.gamma, Bijection::identity(4));
        assert_eq!(w.alpha, PermutationField::identity(4, 2));
    }

    #[test]
    fn partition_examples() {
        assert_eq!(decide_partition(&dk_sigma(), &dk_tau()).unwrap(), None);
        let w = decide_partition(&p_a(), &p_b()).unwrap().unwrap();
        assert_eq!(w.gamma, Bijection::identity(4));
        assert_eq!(w.alpha, field(&[&[0, 1], &[0, 1], &[1, 0], &[1, 0]]));
        assert_eq!(w.alpha.index_set(0, 0), vec![0, 1]);
        assert_eq!(w.alpha.index_set(0, 1), vec![2, 3]);
        let w = decide_partition(&duncan(), &duncan()).unwrap().unwrap();
        assert_eq!(w, PartitionWitness::identity(&duncan()));
    }

    #[test]
    fn verifier_reports() {
        let good = PartitionWitness { gamma: Bijection::identity(4), alpha: field(&[&[0, 1], &[0, 1], &[1, 0], &[1, 0]]) };
        assert!(verify_partition_witness(&p_a(), &p_b(), &good).unwrap().passed());

        let dk = PartitionWitness { gamma: Bijection::identity(2), alpha: field(&[&[0, 1], &[1, 0]]) };
        let report = verify_partition_witness(&dk_sigma(), &dk_tau(), &dk).unwrap();
        let failed: Vec<&str> = report.failed().map(|c| c.condition.as_str()).collect();
        assert!(failed.contains(&"tau-side pre-image"), "{report}");
        assert!(failed.contains(&"tau-side set form"), "{report}");
        assert!(!failed.iter().any(|c| *c == "intertwining" || c.contains("sigma-side")), "{report}");

        let id = PartitionWitness::identity(&duncan());
        assert!(verify_partition_witness(&duncan(), &duncan(), &id).unwrap().passed());

        let bad_intertwining = PartitionWitness { gamma: Bijection::identity(4), alpha: PermutationField::identity(4, 2) };
        let report = verify_partition_witness(&p_a(), &p_b(), &bad_intertwining).unwrap();
        assert!(report.failed().any(|c| c.condition == "intertwining"));
    }

    #[test]
    fn verifier_rejects_malformed() {
        let w = PartitionWitness { gamma: Bijection(vec![0, 0]), alpha: PermutationField::identity(2, 2) };
        assert!(matches!(verify_partition_witness(&dk_sigma(), &dk_tau(), &w), Err(Error::Validation(_))));
        let w = PartitionWitness { gamma: Bijection::identity(2), alpha: PermutationField(vec![vec![0, 0], vec![0, 1]]) };
        assert!(matches!(verify_partition_witness(&dk_sigma(), &dk_tau(), &w), Err(Error::Validation(_))));
        assert!(Bijection::new(vec![1, 1]).is_err());
        assert!(PermutationField::new(vec![vec![0, 1], vec![0]]).is_err());
    }
}
