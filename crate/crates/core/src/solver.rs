//! Linear constraint systems over triple-space and their exact null spaces.
//!
//! Both derivation identities are bilinear in `(x, y)` and linear in
//! `(f, g, h)`, so they hold everywhere iff they hold on every ordered pair
//! of basis elements. Each `(pair, output coordinate, branch)` becomes one
//! row over the `3·dim²` packed unknowns (see [`crate::linmap::PACKING_LAYOUT`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::algebra::{ensure_same, Algebra};
use crate::error::{Error, Result};
use crate::linmap::{packed_index, DerivationTriple};
use crate::scalar::Scalar;

const F: usize = 0;
const G: usize = 1;
const H: usize = 2;

/// Which identity a system encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// `f(xy) = g(x)y + x h(y) = h(x)y + x g(y)`.
    Gh,
    /// `f(x∘y) = g(x)∘y + x∘h(y)`.
    Jordan,
    /// Jordan plus `f(e_ii) = g(e_ii)e_ii + e_ii h(e_ii)` for every diagonal unit.
    JordanWithCorner,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Gh, Mode::Jordan, Mode::JordanWithCorner];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Gh => "gh",
            Mode::Jordan => "jordan",
            Mode::JordanWithCorner => "jordan-corner",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gh" => Ok(Mode::Gh),
            "jordan" => Ok(Mode::Jordan),
            "jordan-corner" => Ok(Mode::JordanWithCorner),
            _ => Err(Error::InvalidMode(s.to_string())),
        }
    }
}

/// The two equalities of the `{g,h}` identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// `f(xy) = g(x)y + x h(y)`
    #[serde(rename = "g-first")]
    GFirst,
    /// `f(xy) = h(x)y + x g(y)`
    #[serde(rename = "h-first")]
    HFirst,
}

/// Provenance of a constraint row. Ordinals index the algebra basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowTag {
    Product { left: usize, right: usize, coord: usize, branch: Branch },
    Jordan { left: usize, right: usize, coord: usize },
    Corner { diagonal: usize, coord: usize },
}

/// Sorted by column, no explicit zeros.
pub type SparseRow = Vec<(usize, Scalar)>;

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    algebra: Arc<Algebra>,
    mode: Mode,
    n_cols: usize,
    rows: Vec<SparseRow>,
    tags: Vec<RowTag>,
}

/// Emits every constraint row for `mode` on `algebra`.
pub fn assemble(algebra: &Arc<Algebra>, mode: Mode) -> ConstraintSystem {
    let dim = algebra.dim();
    let mut tags = Vec::new();
    for left in 0..dim {
        for right in 0..dim {
            for coord in 0..dim {
                match mode {
                    Mode::Gh => {
                        for branch in [Branch::GFirst, Branch::HFirst] {
                            tags.push(RowTag::Product { left, right, coord, branch });
                        }
                    }
                    Mode::Jordan | Mode::JordanWithCorner => {
                        tags.push(RowTag::Jordan { left, right, coord })
                    }
                }
            }
        }
    }
    if mode == Mode::JordanWithCorner {
        for b in algebra.basis().iter().filter(|b| b.is_diagonal()) {
            for coord in 0..dim {
                tags.push(RowTag::Corner { diagonal: b.ordinal, coord });
            }
        }
    }
    let rows = tags.iter().map(|t| generate_row(algebra, t)).collect();
    ConstraintSystem {
        algebra: Arc::clone(algebra),
        mode,
        n_cols: 3 * dim * dim,
        rows,
        tags,
    }
}

/// The coefficients of one constraint row, rebuilt from its tag.
///
/// Every row reads `[lhs - rhs]_coord = 0` where lhs is the `f` term.
pub fn generate_row(algebra: &Algebra, tag: &RowTag) -> SparseRow {
    let dim = algebra.dim();
    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
    let mut push = |col: usize, c: Scalar| {
        let e = acc.entry(col).or_insert_with(|| algebra.domain().zero());
        *e = &*e + &c;
    };
    let c = |k: usize, l: usize, m: usize| algebra.structure_constant(k, l, m);
    match *tag {
        RowTag::Product { left: k, right: l, coord: m, branch } => {
            let (first, second) = match branch {
                Branch::GFirst => (G, H),
                Branch::HFirst => (H, G),
            };
            // f(b_k b_l)
            for (p, s) in algebra.product_terms(k, l) {
                push(packed_index(dim, F, p.to_owned(), m), s.clone());
            }
            for q in 0..dim {
                // first(b_k) b_l
                push(packed_index(dim, first, k, q), -c(q, l, m));
                // b_k second(b_l)
                push(packed_index(dim, second, l, q), -c(k, q, m));
            }
        }
        RowTag::Jordan { left: k, right: l, coord: m } => {
            for (p, s) in algebra.product_terms(k, l).iter().chain(algebra.product_terms(l, k)) {
                push(packed_index(dim, F, *p, m), s.clone());
            }
            for q in 0..dim {
                // g(b_k) ∘ b_l
                push(packed_index(dim, G, k, q), -(&c(q, l, m) + &c(l, q, m)));
                // b_k ∘ h(b_l)
                push(packed_index(dim, H, l, q), -(&c(k, q, m) + &c(q, k, m)));
            }
        }
        RowTag::Corner { diagonal: d, coord: m } => {
            push(packed_index(dim, F, d, m), algebra.domain().one());
            for q in 0..dim {
                push(packed_index(dim, G, d, q), -c(q, d, m));
                push(packed_index(dim, H, d, q), -c(d, q, m));
            }
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

impl ConstraintSystem {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn tags(&self) -> &[RowTag] {
        &self.tags
    }

    /// `(row, col, value)` entries in row order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    /// `A v`, one entry per row.
    pub fn residual(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.n_cols {
            return Err(Error::LengthMismatch { expected: self.n_cols, actual: v.len() });
        }
        let zero = self.algebra.domain().zero();
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.iter().fold(zero.clone(), |acc, (c, a)| &acc + &(a * &v[*c]))
            })
            .collect())
    }

    pub fn is_satisfied_by(&self, v: &[Scalar]) -> Result<bool> {
        Ok(self.residual(v)?.iter().all(Scalar::is_zero))
    }
}

/// Result of exact Gauss-Jordan elimination on a sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    /// Fully reduced pivot rows, each paired with its pivot column; pivot entry is 1.
    pub pivots: Vec<(usize, SparseRow)>,
    pub free_cols: Vec<usize>,
}

impl Reduced {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// One basis vector per free column `j`: 1 at `j`, `-R[r][j]` at each
    /// pivot column, 0 at the other free columns.
    pub fn null_basis(&self, n_cols: usize, zero: &Scalar, one: &Scalar) -> Vec<Vec<Scalar>> {
        let mut slot = vec![usize::MAX; n_cols];
        for (i, &j) in self.free_cols.iter().enumerate() {
            slot[j] = i;
        }
        let mut basis: Vec<Vec<Scalar>> = self
            .free_cols
            .iter()
            .map(|&j| {
                let mut v = vec![zero.clone(); n_cols];
                v[j] = one.clone();
                v
            })
            .collect();
        for (pc, row) in &self.pivots {
            for (c, val) in row {
                if c != pc {
                    basis[slot[*c]][*pc] = -val;
                }
            }
        }
        basis
    }
}

fn leading_col(row: &SparseRow) -> Option<usize> {
    row.first().map(|(c, _)| *c)
}

fn coeff_at(row: &SparseRow, col: usize) -> Option<&Scalar> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1)
}

/// `target - factor * pivot`, merged in column order.
fn sub_scaled(target: &SparseRow, factor: &Scalar, pivot: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(target.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < pivot.len() {
        let ti = target.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let pj = pivot.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ti < pj {
            out.push(target[i].clone());
            i += 1;
        } else if pj < ti {
            out.push((pj, -(factor * &pivot[j].1)));
            j += 1;
        } else {
            let v = &target[i].1 - &(factor * &pivot[j].1);
            if !v.is_zero() {
                out.push((ti, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Exact sparse Gauss-Jordan elimination to reduced row echelon form.
///
/// Columns are processed left to right. Among the remaining rows that lead
/// in the current column, the one with the fewest nonzeros is the pivot,
/// ties broken by lower position. The RREF itself does not depend on the
/// pivot order; the rule only limits fill-in and coefficient growth.
pub fn reduce(rows: &[SparseRow], n_cols: usize) -> Result<Reduced> {
    let mut active: Vec<SparseRow> = rows.iter().filter(|r| !r.is_empty()).cloned().collect();
    if let Some(bad) = active.iter().flat_map(|r| r.iter()).find(|(c, _)| *c >= n_cols) {
        return Err(Error::LengthMismatch { expected: n_cols, actual: bad.0 + 1 });
    }
    let mut pivots: Vec<(usize, SparseRow)> = Vec::new();
    let mut free_cols = Vec::new();
    for col in 0..n_cols {
        let best = active
            .iter()
            .enumerate()
            .filter(|(_, r)| leading_col(r) == Some(col))
            .min_by_key(|(i, r)| (r.len(), *i))
            .map(|(i, _)| i);
        let Some(best) = best else {
            free_cols.push(col);
            continue;
        };
        let raw = active.remove(best);
        let inv = raw[0].1.inv()?;
        let pivot: SparseRow = raw.into_iter().map(|(c, v)| (c, &v * &inv)).collect();

        let mut next = Vec::with_capacity(active.len());
        for row in active.drain(..) {
            if leading_col(&row) == Some(col) {
                let factor = row[0].1.clone();
                let reduced = sub_scaled(&row, &factor, &pivot);
                if !reduced.is_empty() {
                    next.push(reduced);
                }
            } else {
                next.push(row);
            }
        }
        active = next;

        for (_, prow) in pivots.iter_mut() {
            if let Some(factor) = coeff_at(prow, col).cloned() {
                *prow = sub_scaled(prow, &factor, &pivot);
            }
        }
        pivots.push((col, pivot));
    }
    Ok(Reduced { pivots, free_cols })
}

/// A subspace of triple-space given by a canonical basis.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    algebra: Arc<Algebra>,
    mode: Mode,
    n_cols: usize,
    free_cols: Vec<usize>,
    basis: Vec<Vec<Scalar>>,
}

/// Null space of `system`, with the basis read off its RREF.
pub fn null_space(system: &ConstraintSystem) -> SolutionSpace {
    let reduced = reduce(&system.rows, system.n_cols)
        .expect("assembled rows are in range and pivots are nonzero");
    let d = system.algebra.domain();
    let basis = reduced.null_basis(system.n_cols, &d.zero(), &d.one());
    SolutionSpace {
        algebra: Arc::clone(&system.algebra),
        mode: system.mode,
        n_cols: system.n_cols,
        free_cols: reduced.free_cols,
        basis,
    }
}

/// Assemble-then-solve shorthand.
pub fn solve(algebra: &Arc<Algebra>, mode: Mode) -> SolutionSpace {
    null_space(&assemble(algebra, mode))
}

impl SolutionSpace {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn free_cols(&self) -> &[usize] {
        &self.free_cols
    }

    pub fn basis_triples(&self) -> Vec<DerivationTriple> {
        self.basis
            .iter()
            .map(|v| DerivationTriple::unpack(v, &self.algebra).expect("basis has packed length"))
            .collect()
    }

    /// `Σ coeffs[i] · basis[i]`.
    pub fn combine(&self, coeffs: &[Scalar]) -> Result<Vec<Scalar>> {
        if coeffs.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), actual: coeffs.len() });
        }
        let mut out = vec![self.algebra.domain().zero(); self.n_cols];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                if !x.is_zero() {
                    *o = &*o + &(c * x);
                }
            }
        }
        Ok(out)
    }

    /// Span membership. Each basis vector is 1 at its own free column and 0
    /// at the others, so `v` is in the span iff it equals
    /// `Σ v[free_i] · basis[i]`.
    pub fn contains(&self, v: &[Scalar]) -> Result<bool> {
        if v.len() != self.n_cols {
            return Err(Error::LengthMismatch { expected: self.n_cols, actual: v.len() });
        }
        let coeffs: Vec<Scalar> = self.free_cols.iter().map(|&j| v[j].clone()).collect();
        Ok(self.combine(&coeffs)? == v)
    }

    /// `{algebra, field, mode, dim, basis: [triple-json…]}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("algebra".into(), Value::String(self.algebra.spec().to_string()));
        map.insert("field".into(), Value::String(self.algebra.domain().to_string()));
        map.insert("mode".into(), Value::String(self.mode.to_string()));
        map.insert("dim".into(), Value::from(self.dim()));
        map.insert(
            "basis".into(),
            Value::Array(self.basis_triples().iter().map(DerivationTriple::to_json).collect()),
        );
        Value::Object(map)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AStrictSuperset,
    BStrictSuperset,
    Incomparable,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equal => "equal",
            Relation::AStrictSuperset => "a_strict_superset",
            Relation::BStrictSuperset => "b_strict_superset",
            Relation::Incomparable => "incomparable",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub relation: Relation,
    pub dim_a: usize,
    pub dim_b: usize,
    /// A basis vector of the larger side outside the other (for
    /// incomparable spaces: one of `a` outside `b`).
    pub witness: Option<Vec<Scalar>>,
    algebra: Arc<Algebra>,
}

impl ComparisonReport {
    pub fn witness_triple(&self) -> Option<DerivationTriple> {
        self.witness
            .as_ref()
            .map(|v| DerivationTriple::unpack(v, &self.algebra).expect("witness has packed length"))
    }

    /// `{relation, dim_a, dim_b, witness?}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("relation".into(), Value::String(self.relation.to_string()));
        map.insert("dim_a".into(), Value::from(self.dim_a));
        map.insert("dim_b".into(), Value::from(self.dim_b));
        if let Some(t) = self.witness_triple() {
            map.insert("witness".into(), t.to_json());
        }
        Value::Object(map)
    }
}

fn first_outside(from: &SolutionSpace, of: &SolutionSpace) -> Result<Option<Vec<Scalar>>> {
    for v in &from.basis {
        if !of.contains(v)? {
            return Ok(Some(v.clone()));
        }
    }
    Ok(None)
}

/// Decides the containment relation between two subspaces of one triple-space.
pub fn compare(a: &SolutionSpace, b: &SolutionSpace) -> Result<ComparisonReport> {
    ensure_same(&a.algebra, &b.algebra)
        .map_err(|e| Error::LayoutMismatch(e.to_string()))?;
    if a.n_cols != b.n_cols {
        return Err(Error::LayoutMismatch(format!("{} vs {} columns", a.n_cols, b.n_cols)));
    }
    let a_not_in_b = first_outside(a, b)?;
    let b_not_in_a = first_outside(b, a)?;
    let (relation, witness) = match (a_not_in_b, b_not_in_a) {
        (None, None) => (Relation::Equal, None),
        (Some(w), None) => (Relation::AStrictSuperset, Some(w)),
        (None, Some(w)) => (Relation::BStrictSuperset, Some(w)),
        (Some(w), Some(_)) => (Relation::Incomparable, Some(w)),
    };
    Ok(ComparisonReport {
        relation,
        dim_a: a.dim(),
        dim_b: b.dim(),
        witness,
        algebra: Arc::clone(&a.algebra),
    })
}
