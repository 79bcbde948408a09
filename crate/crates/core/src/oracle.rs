//! Ground truth for the solver: element-level identity checkers, the `T_2`
//! counterexample, the swap-lemma property suite, and a dense eliminator
//! that shares no code with [`crate::solver`].
//!
//! Random trials use `ChaCha8Rng::seed_from_u64(seed ^ trial)`, so a trial
//! can be replayed on its own and parallel runs agree with serial ones.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::algebra::{jordan_product, Algebra, Element};
use crate::error::{Error, Result};
use crate::linmap::{jordan_mult_operator, DerivationTriple};
use crate::scalar::{Scalar, ScalarDomain};
use crate::solver::{ConstraintSystem, Mode};

/// Column budget for dense elimination.
pub const DENSE_MAX_COLS: usize = 300;

/// Which equality a defect measures. Every defect is `rhs - lhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckBranch {
    /// `g(x)y + x h(y) - f(xy)`
    GFirst,
    /// `h(x)y + x g(y) - f(xy)`
    HFirst,
    /// `g(x)∘y + x∘h(y) - f(x∘y)`
    Jordan,
    /// `h(x)x + x g(x) - f(x²)`; the square lemma's conclusion (`y = x`).
    SquareHFirst,
    /// `g(y)x + y h(x) - f(yx)`; first conclusion of the reversal lemma.
    ReversedGFirst,
    /// `h(y)x + y g(x) - f(yx)`; second conclusion of the reversal lemma.
    ReversedHFirst,
    /// `g(x)x + x h(x) - f(x)`; only with `y = x` idempotent.
    Corner,
}

impl CheckBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckBranch::GFirst => "g-first",
            CheckBranch::HFirst => "h-first",
            CheckBranch::Jordan => "jordan",
            CheckBranch::SquareHFirst => "square-h-first",
            CheckBranch::ReversedGFirst => "reversed-g-first",
            CheckBranch::ReversedHFirst => "reversed-h-first",
            CheckBranch::Corner => "corner",
        }
    }
}

/// `rhs - lhs` of the equality named by `branch`, evaluated at `(x, y)`.
pub fn defect(t: &DerivationTriple, x: &Element, y: &Element, branch: CheckBranch) -> Element {
    let ap = |m: &crate::linmap::LinearMap, v: &Element| {
        m.apply(v).expect("element of the triple's algebra")
    };
    let jp = |a: &Element, b: &Element| jordan_product(a, b).expect("same algebra");
    let (f, g, h) = (&t.f, &t.g, &t.h);
    match branch {
        CheckBranch::GFirst => &(&(&ap(g, x) * y) + &(x * &ap(h, y))) - &ap(f, &(x * y)),
        CheckBranch::HFirst => &(&(&ap(h, x) * y) + &(x * &ap(g, y))) - &ap(f, &(x * y)),
        CheckBranch::Jordan => &(&jp(&ap(g, x), y) + &jp(x, &ap(h, y))) - &ap(f, &jp(x, y)),
        CheckBranch::SquareHFirst => &(&(&ap(h, x) * x) + &(x * &ap(g, x))) - &ap(f, &(x * x)),
        CheckBranch::ReversedGFirst => defect(t, y, x, CheckBranch::GFirst),
        CheckBranch::ReversedHFirst => defect(t, y, x, CheckBranch::HFirst),
        CheckBranch::Corner => &(&(&ap(g, x) * x) + &(x * &ap(h, x))) - &ap(f, x),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub x: Element,
    pub y: Element,
    pub branch: CheckBranch,
    pub defect: Element,
}

impl Witness {
    /// Re-evaluates the defect from `(x, y, branch)`.
    pub fn recompute(&self, t: &DerivationTriple) -> Element {
        defect(t, &self.x, &self.y, self.branch)
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("x".into(), self.x.to_json());
        map.insert("y".into(), self.y.to_json());
        map.insert("branch".into(), Value::String(self.branch.as_str().into()));
        map.insert("defect".into(), self.defect.to_json());
        Value::Object(map)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Passed,
    Failed,
    /// No sample met the hypothesis of a conditional check.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub outcome: Outcome,
    pub trials: u64,
    /// Samples whose hypothesis did not hold (conditional checks only).
    pub skipped: u64,
    /// Samples whose hypothesis held (conditional checks only).
    pub qualifying: u64,
    pub seed: u64,
    /// Present exactly when `outcome` is `Failed`.
    pub witness: Option<Witness>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Passed
    }

    fn pass(trials: u64, seed: u64) -> Self {
        CheckReport { outcome: Outcome::Passed, trials, skipped: 0, qualifying: 0, seed, witness: None }
    }

    fn fail(trials: u64, seed: u64, witness: Witness) -> Self {
        CheckReport {
            outcome: Outcome::Failed,
            trials,
            skipped: 0,
            qualifying: 0,
            seed,
            witness: Some(witness),
        }
    }

    /// `{passed, outcome, trials, skipped, qualifying, seed, witness?}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("passed".into(), Value::Bool(self.passed()));
        map.insert(
            "outcome".into(),
            serde_json::to_value(self.outcome).expect("outcome serializes"),
        );
        map.insert("trials".into(), Value::from(self.trials));
        map.insert("skipped".into(), Value::from(self.skipped));
        map.insert("qualifying".into(), Value::from(self.qualifying));
        map.insert("seed".into(), Value::from(self.seed));
        if let Some(w) = &self.witness {
            map.insert("witness".into(), w.to_json());
        }
        Value::Object(map)
    }
}

/// Where a checker looks for violations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckScope {
    /// Every ordered pair of basis elements. Exact, by bilinearity.
    BasisPairs,
    /// Seeded dense random pairs only.
    RandomPairs,
    /// Basis pairs first, then random pairs.
    Both,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ trial)
}

fn random_pair(algebra: &Arc<Algebra>, seed: u64, trial: u64) -> (Element, Element) {
    let mut rng = trial_rng(seed, trial);
    let x = Element::random(algebra, &mut rng);
    let y = Element::random(algebra, &mut rng);
    (x, y)
}

fn check_identity(
    t: &DerivationTriple,
    branches: &[CheckBranch],
    scope: CheckScope,
    trials: u64,
    seed: u64,
) -> CheckReport {
    let alg = t.algebra();
    let probe = |x: &Element, y: &Element| -> Option<Witness> {
        branches.iter().find_map(|&branch| {
            let d = defect(t, x, y, branch);
            (!d.is_zero()).then(|| Witness { x: x.clone(), y: y.clone(), branch, defect: d })
        })
    };
    if scope != CheckScope::RandomPairs {
        for k in 0..alg.dim() {
            for l in 0..alg.dim() {
                if let Some(w) = probe(&Element::basis(alg, k), &Element::basis(alg, l)) {
                    return CheckReport::fail(trials, seed, w);
                }
            }
        }
    }
    if scope != CheckScope::BasisPairs {
        for trial in 0..trials {
            let (x, y) = random_pair(alg, seed, trial);
            if let Some(w) = probe(&x, &y) {
                return CheckReport::fail(trials, seed, w);
            }
        }
    }
    CheckReport::pass(trials, seed)
}

/// Both `{g,h}` equalities, with an explicit scope.
pub fn check_gh(t: &DerivationTriple, scope: CheckScope, trials: u64, seed: u64) -> CheckReport {
    check_identity(t, &[CheckBranch::GFirst, CheckBranch::HFirst], scope, trials, seed)
}

/// The Jordan equality, with an explicit scope.
pub fn check_jordan(t: &DerivationTriple, scope: CheckScope, trials: u64, seed: u64) -> CheckReport {
    check_identity(t, &[CheckBranch::Jordan], scope, trials, seed)
}

/// `f(xy) = g(x)y + x h(y) = h(x)y + x g(y)` on all basis pairs and
/// `trials` random pairs. The first violation found is the witness.
pub fn is_gh_derivation(t: &DerivationTriple, trials: u64, seed: u64) -> CheckReport {
    check_gh(t, CheckScope::Both, trials, seed)
}

/// `f(x∘y) = g(x)∘y + x∘h(y)` on all basis pairs and `trials` random pairs.
pub fn is_jordan_gh_derivation(t: &DerivationTriple, trials: u64, seed: u64) -> CheckReport {
    check_jordan(t, CheckScope::Both, trials, seed)
}

/// `f(e_ii) = g(e_ii)e_ii + e_ii h(e_ii)` for every diagonal unit.
pub fn satisfies_corner(t: &DerivationTriple) -> bool {
    let alg = t.algebra();
    alg.basis().iter().filter(|b| b.is_diagonal()).all(|b| {
        let e = Element::basis(alg, b.ordinal);
        defect(t, &e, &e, CheckBranch::Corner).is_zero()
    })
}

/// `(0, g, -g)` on `T_2` with `g(x) = a∘x`, `a = e11 + e12 + e22`:
/// a Jordan `{g,-g}`-derivation that is not a `{g,-g}`-derivation.
pub fn counterexample_t2(domain: ScalarDomain) -> DerivationTriple {
    let t2 = crate::algebra::build_tn(2, domain).expect("T_2 builds");
    let e = |i, j| Element::unit_matrix(&t2, i, j).expect("label in T_2");
    let a = &(&e(1, 1) + &e(1, 2)) + &e(2, 2);
    let g = jordan_mult_operator(&a);
    DerivationTriple::new(crate::linmap::LinearMap::zero(&t2), g.clone(), -&g)
        .expect("maps share T_2")
}

/// Property suite for the two swap lemmas of a Jordan `{g,h}`-derivation.
///
/// * square: if `f(a²) = g(a)a + a h(a)` then `f(a²) = h(a)a + a g(a)`;
/// * reversal: if `f(ab) = g(a)b + a h(b) = h(a)b + a g(b)` then
///   `f(ba) = g(b)a + b h(a) = h(b)a + b g(a)`.
///
/// Each trial draws `(a, b)` and tests both lemmas. A lemma whose
/// hypothesis fails on the sample is skipped and counted. No qualifying
/// samples at all gives `Inconclusive`.
pub fn check_swap_lemmas(t: &DerivationTriple, trials: u64, seed: u64) -> Result<CheckReport> {
    if !check_jordan(t, CheckScope::BasisPairs, 0, seed).passed() {
        return Err(Error::PreconditionViolated(
            "triple is not a Jordan {g,h}-derivation".into(),
        ));
    }
    let alg = t.algebra();
    let mut skipped = 0;
    let mut qualifying = 0;
    let mut witness = None;
    'trials: for trial in 0..trials {
        let (a, b) = random_pair(alg, seed, trial);

        if defect(t, &a, &a, CheckBranch::GFirst).is_zero() {
            qualifying += 1;
            let d = defect(t, &a, &a, CheckBranch::SquareHFirst);
            if !d.is_zero() {
                witness = Some(Witness { x: a.clone(), y: a.clone(), branch: CheckBranch::SquareHFirst, defect: d });
                break 'trials;
            }
        } else {
            skipped += 1;
        }

        if defect(t, &a, &b, CheckBranch::GFirst).is_zero()
            && defect(t, &a, &b, CheckBranch::HFirst).is_zero()
        {
            qualifying += 1;
            for branch in [CheckBranch::ReversedGFirst, CheckBranch::ReversedHFirst] {
                let d = defect(t, &a, &b, branch);
                if !d.is_zero() {
                    witness = Some(Witness { x: a.clone(), y: b.clone(), branch, defect: d });
                    break 'trials;
                }
            }
        } else {
            skipped += 1;
        }
    }
    let outcome = match (&witness, qualifying) {
        (Some(_), _) => Outcome::Failed,
        (None, 0) => Outcome::Inconclusive,
        (None, _) => Outcome::Passed,
    };
    Ok(CheckReport { outcome, trials, skipped, qualifying, seed, witness })
}

/// Rank of a dense matrix by textbook Gauss-Jordan elimination.
pub fn dense_rank(mut m: Vec<Vec<Scalar>>, n_cols: usize) -> Result<usize> {
    if n_cols > DENSE_MAX_COLS {
        return Err(Error::BudgetExceeded { cols: n_cols, limit: DENSE_MAX_COLS });
    }
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].inv()?;
        for c in 0..n_cols {
            m[rank][c] = &m[rank][c] * &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..n_cols {
                    let sub = &factor * &m[rank][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// Nullity of `system` by dense elimination, ignoring the solver entirely.
pub fn brute_force_null_space_dim(system: &ConstraintSystem) -> Result<usize> {
    let n = system.n_cols();
    if n > DENSE_MAX_COLS {
        return Err(Error::BudgetExceeded { cols: n, limit: DENSE_MAX_COLS });
    }
    let zero = system.algebra().domain().zero();
    let mut dense = vec![vec![zero; n]; system.n_rows()];
    for (r, c, v) in system.triplets() {
        dense[r][c] = v.clone();
    }
    Ok(n - dense_rank(dense, n)?)
}

/// The constraint matrix of `mode`, built column by column from
/// definitions: column `j` is the stacked defect of the triple whose packed
/// vector is the `j`-th unit vector, over all basis pairs and branches.
pub fn naive_constraint_matrix(algebra: &Arc<Algebra>, mode: Mode) -> Result<Vec<Vec<Scalar>>> {
    let dim = algebra.dim();
    let n_cols = 3 * dim * dim;
    if n_cols > DENSE_MAX_COLS {
        return Err(Error::BudgetExceeded { cols: n_cols, limit: DENSE_MAX_COLS });
    }
    let d = algebra.domain();
    let branches: &[CheckBranch] = match mode {
        Mode::Gh => &[CheckBranch::GFirst, CheckBranch::HFirst],
        Mode::Jordan | Mode::JordanWithCorner => &[CheckBranch::Jordan],
    };
    let mut columns = Vec::with_capacity(n_cols);
    for j in 0..n_cols {
        let mut v = vec![d.zero(); n_cols];
        v[j] = d.one();
        let t = DerivationTriple::unpack(&v, algebra)?;
        let mut col = Vec::new();
        for k in 0..dim {
            for l in 0..dim {
                let (x, y) = (Element::basis(algebra, k), Element::basis(algebra, l));
                for &branch in branches {
                    col.extend_from_slice(defect(&t, &x, &y, branch).coeffs());
                }
            }
        }
        if mode == Mode::JordanWithCorner {
            for b in algebra.basis().iter().filter(|b| b.is_diagonal()) {
                let e = Element::basis(algebra, b.ordinal);
                col.extend_from_slice(defect(&t, &e, &e, CheckBranch::Corner).coeffs());
            }
        }
        columns.push(col);
    }
    let n_rows = columns[0].len();
    Ok((0..n_rows).map(|r| columns.iter().map(|c| c[r].clone()).collect()).collect())
}

/// Nullity of the from-definitions matrix for `(algebra, mode)`.
pub fn brute_force_nullity_from_definitions(algebra: &Arc<Algebra>, mode: Mode) -> Result<usize> {
    let m = naive_constraint_matrix(algebra, mode)?;
    let n = 3 * algebra.dim() * algebra.dim();
    Ok(n - dense_rank(m, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_tn;
    use crate::linmap::{inner_derivation, LinearMap};

    fn q() -> ScalarDomain {
        ScalarDomain::rationals()
    }

    #[test]
    fn inner_derivation_is_gh() {
        let t2 = build_tn(2, q()).unwrap();
        let d = inner_derivation(&Element::unit_matrix(&t2, 1, 2).unwrap());
        let t = DerivationTriple::new(d.clone(), d.clone(), d).unwrap();
        assert!(is_gh_derivation(&t, 50, 0).passed());
        assert!(is_jordan_gh_derivation(&t, 50, 0).passed());
        let z = DerivationTriple::zero(&t2);
        assert!(is_gh_derivation(&z, 50, 0).passed());
        assert!(is_jordan_gh_derivation(&z, 50, 0).passed());
    }

    #[test]
    fn counterexample_pattern() {
        let t = counterexample_t2(q());
        assert!(is_jordan_gh_derivation(&t, 200, 0).passed());
        let r = is_gh_derivation(&t, 200, 0);
        assert_eq!(r.outcome, Outcome::Failed);
        let w = r.witness.as_ref().unwrap();
        let alg = t.algebra();
        let e11 = Element::unit_matrix(alg, 1, 1).unwrap();
        let e12 = Element::unit_matrix(alg, 1, 2).unwrap();
        assert_eq!((&w.x, &w.y, w.branch), (&e11, &e11, CheckBranch::GFirst));
        assert_eq!(w.defect, -&e12);
        assert_eq!(w.recompute(&t), w.defect);
    }

    #[test]
    fn counterexample_over_f7() {
        let f7 = ScalarDomain::prime_field(7).unwrap();
        let t = counterexample_t2(f7);
        assert!(is_jordan_gh_derivation(&t, 200, 0).passed());
        let r = is_gh_derivation(&t, 200, 0);
        assert!(!r.passed());
        assert_eq!(r.witness.unwrap().defect.to_string(), "6*e12");
    }

    #[test]
    fn jordan_checker_rejects_symmetric_sign() {
        // (0, g, g) with g = a∘·: at x = y = e11 the defect is
        // g(e11)∘e11 + e11∘g(e11) = 2·((2e11+e12)∘e11) = 2·(4e11 + e12).
        let t0 = counterexample_t2(q());
        let t = DerivationTriple::new(t0.f.clone(), t0.g.clone(), t0.g.clone()).unwrap();
        let r = is_jordan_gh_derivation(&t, 10, 0);
        let w = r.witness.unwrap();
        let alg = t.algebra();
        let e11 = Element::unit_matrix(alg, 1, 1).unwrap();
        let e12 = Element::unit_matrix(alg, 1, 2).unwrap();
        assert_eq!((&w.x, &w.y), (&e11, &e11));
        let expected = &e11.scale(&q().from_i64(8)) + &e12.scale(&q().from_i64(2));
        assert_eq!(w.defect, expected);
    }

    #[test]
    fn swap_lemmas_on_simple_triples() {
        let t2 = build_tn(2, q()).unwrap();
        let d = inner_derivation(&Element::unit_matrix(&t2, 1, 2).unwrap());
        let t = DerivationTriple::new(d.clone(), d.clone(), d).unwrap();
        let r = check_swap_lemmas(&t, 100, 0).unwrap();
        assert!(r.passed());
        assert_eq!((r.qualifying, r.skipped), (200, 0));
        let r = check_swap_lemmas(&DerivationTriple::zero(&t2), 100, 0).unwrap();
        assert_eq!((r.outcome, r.qualifying), (Outcome::Passed, 200));
    }

    #[test]
    fn swap_lemmas_reject_non_jordan() {
        let t2 = build_tn(2, q()).unwrap();
        let t = DerivationTriple::new(
            LinearMap::identity(&t2),
            LinearMap::zero(&t2),
            LinearMap::zero(&t2),
        )
        .unwrap();
        assert!(matches!(check_swap_lemmas(&t, 10, 0), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn dense_rank_examples() {
        let d = q();
        let zero3 = vec![vec![d.zero(); 3]; 2];
        assert_eq!(3 - dense_rank(zero3, 3).unwrap(), 3);
        let id: Vec<Vec<Scalar>> = (0..3)
            .map(|i| (0..3).map(|j| d.from_i64((i == j) as i64)).collect())
            .collect();
        assert_eq!(3 - dense_rank(id, 3).unwrap(), 0);
        assert!(matches!(
            dense_rank(vec![], DENSE_MAX_COLS + 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn budget_guard_on_systems() {
        let t5 = build_tn(5, q()).unwrap();
        let sys = crate::solver::assemble(&t5, Mode::Jordan);
        assert!(matches!(brute_force_null_space_dim(&sys), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn deterministic_reports() {
        let t2 = build_tn(2, q()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = DerivationTriple::random(&t2, &mut rng);
        let a = check_gh(&t, CheckScope::RandomPairs, 20, 99);
        let b = check_gh(&t, CheckScope::RandomPairs, 20, 99);
        assert_eq!(a, b);
        assert_eq!(a.to_json().to_string(), b.to_json().to_string());
        let w = a.witness.unwrap();
        assert_eq!(w.recompute(&t), w.defect);
    }
}
