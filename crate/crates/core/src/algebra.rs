//! Finite-dimensional unital associative algebras given by structure
//! constants over a labelled matrix-unit basis.
//!
//! Basis ordering is row-major lexicographic on `(i, j)` with 1-based
//! labels. Solver columns, packed triples and every JSON report depend on
//! this ordering; it is identified in reports by [`BASIS_ORDERING`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarDomain};

pub const BASIS_ORDERING: &str = "row-major-lex-(i,j)";

/// Above this dimension associativity is audited on sampled triples.
pub const EXHAUSTIVE_AUDIT_MAX_DIM: usize = 36;
const SAMPLED_AUDIT_TRIPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraKind {
    /// `T_n`: upper-triangular matrices.
    UpperTriangular,
    /// `M_n`: all matrices.
    Full,
}

/// Which builder and size, spelled `tn:<n>` or `mn:<n>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    pub n: usize,
}

impl AlgebraSpec {
    pub fn upper_triangular(n: usize) -> Self {
        AlgebraSpec { kind: AlgebraKind::UpperTriangular, n }
    }

    pub fn full(n: usize) -> Self {
        AlgebraSpec { kind: AlgebraKind::Full, n }
    }

    pub fn build(&self, domain: ScalarDomain) -> Result<Arc<Algebra>> {
        match self.kind {
            AlgebraKind::UpperTriangular => build_tn(self.n, domain),
            AlgebraKind::Full => build_mn(self.n, domain),
        }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlgebraKind::UpperTriangular => write!(f, "tn:{}", self.n),
            AlgebraKind::Full => write!(f, "mn:{}", self.n),
        }
    }
}

impl FromStr for AlgebraSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidAlgebraSpec(s.to_string());
        let (kind, n) = s.trim().split_once(':').ok_or_else(bad)?;
        let kind = match kind {
            "tn" => AlgebraKind::UpperTriangular,
            "mn" => AlgebraKind::Full,
            _ => return Err(bad()),
        };
        let n: usize = n.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok(AlgebraSpec { kind, n })
    }
}

/// A matrix unit `e_(row,col)` and its position in the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub row: usize,
    pub col: usize,
    pub ordinal: usize,
}

impl BasisIndex {
    pub fn label(&self) -> String {
        format!("({},{})", self.row, self.col)
    }

    pub fn is_diagonal(&self) -> bool {
        self.row == self.col
    }
}

/// A unital associative algebra. Immutable once built; shared via `Arc`.
#[derive(Debug)]
pub struct Algebra {
    spec: AlgebraSpec,
    domain: ScalarDomain,
    basis: Vec<BasisIndex>,
    /// `lookup[(i-1)*n + (j-1)]` is the ordinal of `e_ij`, if present.
    lookup: Vec<Option<usize>>,
    /// `products[k*dim + l]` lists the nonzero terms `(m, c)` of `b_k b_l`.
    products: Vec<Vec<(usize, Scalar)>>,
    unit: Vec<Scalar>,
}

/// `T_n` over `domain`: basis `e_ij` with `i <= j`, `dim = n(n+1)/2`.
pub fn build_tn(n: usize, domain: ScalarDomain) -> Result<Arc<Algebra>> {
    Algebra::matrix_units(AlgebraSpec::upper_triangular(n), domain)
}

/// `M_n` over `domain`: all `e_ij`, `dim = n^2`.
pub fn build_mn(n: usize, domain: ScalarDomain) -> Result<Arc<Algebra>> {
    Algebra::matrix_units(AlgebraSpec::full(n), domain)
}

impl Algebra {
    fn matrix_units(spec: AlgebraSpec, domain: ScalarDomain) -> Result<Arc<Algebra>> {
        let n = spec.n;
        if n == 0 {
            return Err(Error::EmptyAlgebra);
        }
        let mut basis = Vec::new();
        let mut lookup = vec![None; n * n];
        for i in 1..=n {
            for j in 1..=n {
                if spec.kind == AlgebraKind::UpperTriangular && i > j {
                    continue;
                }
                lookup[(i - 1) * n + (j - 1)] = Some(basis.len());
                basis.push(BasisIndex { row: i, col: j, ordinal: basis.len() });
            }
        }
        let dim = basis.len();
        let one = domain.one();
        let mut products = vec![Vec::new(); dim * dim];
        for a in &basis {
            for b in &basis {
                // e_ij e_kl = delta_jk e_il
                if a.col == b.row {
                    let m = lookup[(a.row - 1) * n + (b.col - 1)]
                        .expect("product of upper-triangular units stays upper-triangular");
                    products[a.ordinal * dim + b.ordinal].push((m, one.clone()));
                }
            }
        }
        let mut unit = vec![domain.zero(); dim];
        for b in basis.iter().filter(|b| b.is_diagonal()) {
            unit[b.ordinal] = one.clone();
        }
        let algebra = Algebra { spec, domain, basis, lookup, products, unit };
        algebra.audit()?;
        Ok(Arc::new(algebra))
    }

    /// Checks associativity and the unit law on the structure table.
    fn audit(&self) -> Result<()> {
        let dim = self.dim();
        let check = |i: usize, j: usize, k: usize| -> Result<()> {
            let left = self.mul_coeffs(&self.product_coeffs(i, j), &self.basis_coeffs(k));
            let right = self.mul_coeffs(&self.basis_coeffs(i), &self.product_coeffs(j, k));
            if left == right {
                Ok(())
            } else {
                Err(Error::NotAssociative(i, j, k))
            }
        };
        if dim <= EXHAUSTIVE_AUDIT_MAX_DIM {
            for i in 0..dim {
                for j in 0..dim {
                    for k in 0..dim {
                        check(i, j, k)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(dim as u64);
            for _ in 0..SAMPLED_AUDIT_TRIPLES {
                check(rng.gen_range(0..dim), rng.gen_range(0..dim), rng.gen_range(0..dim))?;
            }
        }
        for k in 0..dim {
            let b = self.basis_coeffs(k);
            if self.mul_coeffs(&self.unit, &b) != b || self.mul_coeffs(&b, &self.unit) != b {
                return Err(Error::UnitLawViolated(k));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> AlgebraSpec {
        self.spec
    }

    pub fn kind(&self) -> AlgebraKind {
        self.spec.kind
    }

    /// Matrix size `n`.
    pub fn size(&self) -> usize {
        self.spec.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn domain(&self) -> ScalarDomain {
        self.domain
    }

    pub fn basis(&self) -> &[BasisIndex] {
        &self.basis
    }

    /// Ordinal of `e_ij` (1-based labels).
    pub fn index_of(&self, i: usize, j: usize) -> Result<usize> {
        let n = self.spec.n;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::UnknownBasisLabel(i, j, self.spec.to_string()));
        }
        self.lookup[(i - 1) * n + (j - 1)]
            .ok_or_else(|| Error::UnknownBasisLabel(i, j, self.spec.to_string()))
    }

    /// Nonzero structure constants of `b_k b_l`.
    pub fn product_terms(&self, k: usize, l: usize) -> &[(usize, Scalar)] {
        &self.products[k * self.dim() + l]
    }

    /// Coefficient `c[k][l][m]` of `b_m` in `b_k b_l`.
    pub fn structure_constant(&self, k: usize, l: usize, m: usize) -> Scalar {
        self.product_terms(k, l)
            .iter()
            .find(|(idx, _)| *idx == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.domain.zero())
    }

    pub fn unit_coeffs(&self) -> &[Scalar] {
        &self.unit
    }

    fn basis_coeffs(&self, k: usize) -> Vec<Scalar> {
        let mut v = vec![self.domain.zero(); self.dim()];
        v[k] = self.domain.one();
        v
    }

    fn product_coeffs(&self, k: usize, l: usize) -> Vec<Scalar> {
        let mut v = vec![self.domain.zero(); self.dim()];
        for (m, c) in self.product_terms(k, l) {
            v[*m] = &v[*m] + c;
        }
        v
    }

    /// Bilinear extension of the structure table to coefficient vectors.
    pub(crate) fn mul_coeffs(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let dim = self.dim();
        let mut out = vec![self.domain.zero(); dim];
        for (k, xk) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (l, yl) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let xy = xk * yl;
                for (m, c) in self.product_terms(k, l) {
                    out[*m] = &out[*m] + &(&xy * c);
                }
            }
        }
        out
    }

    /// Two algebras are interchangeable when built by the same builder,
    /// at the same size, over the same domain.
    pub fn same_as(&self, other: &Algebra) -> bool {
        self.spec == other.spec && self.domain == other.domain
    }

    pub fn describe(&self) -> String {
        format!("{} over {}", self.spec, self.domain)
    }
}

pub(crate) fn ensure_same(a: &Algebra, b: &Algebra) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch { left: a.describe(), right: b.describe() })
    }
}

/// An element of an [`Algebra`] as a dense coefficient vector.
///
/// `+`, `-` and `*` (the algebra product) on `&Element` panic if the
/// operands live in different algebras; [`multiply`] and
/// [`jordan_product`] are the checked forms.
#[derive(Clone, Debug)]
pub struct Element {
    algebra: Arc<Algebra>,
    coeffs: Vec<Scalar>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same_as(&other.algebra) && self.coeffs == other.coeffs
    }
}

impl Eq for Element {}

impl Element {
    pub fn zero(algebra: &Arc<Algebra>) -> Element {
        Element {
            algebra: Arc::clone(algebra),
            coeffs: vec![algebra.domain().zero(); algebra.dim()],
        }
    }

    pub fn unit(algebra: &Arc<Algebra>) -> Element {
        Element { algebra: Arc::clone(algebra), coeffs: algebra.unit.clone() }
    }

    /// The basis element with the given ordinal.
    pub fn basis(algebra: &Arc<Algebra>, ordinal: usize) -> Element {
        Element { algebra: Arc::clone(algebra), coeffs: algebra.basis_coeffs(ordinal) }
    }

    /// The matrix unit `e_ij`.
    pub fn unit_matrix(algebra: &Arc<Algebra>, i: usize, j: usize) -> Result<Element> {
        Ok(Element::basis(algebra, algebra.index_of(i, j)?))
    }

    pub fn from_coeffs(algebra: &Arc<Algebra>, coeffs: Vec<Scalar>) -> Result<Element> {
        if coeffs.len() != algebra.dim() {
            return Err(Error::LengthMismatch { expected: algebra.dim(), actual: coeffs.len() });
        }
        if let Some(bad) = coeffs.iter().find(|c| c.domain() != algebra.domain()) {
            return Err(Error::DomainMismatch {
                left: algebra.domain().to_string(),
                right: bad.domain().to_string(),
            });
        }
        Ok(Element { algebra: Arc::clone(algebra), coeffs })
    }

    /// Dense random element with every coordinate drawn by
    /// [`ScalarDomain::sample_small`].
    pub fn random<R: Rng + ?Sized>(algebra: &Arc<Algebra>, rng: &mut R) -> Element {
        let d = algebra.domain();
        Element {
            algebra: Arc::clone(algebra),
            coeffs: (0..algebra.dim()).map(|_| d.sample_small(rng)).collect(),
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, ordinal: usize) -> &Scalar {
        &self.coeffs[ordinal]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        self.map(|c| c * s)
    }

    fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Element {
        Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Element, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Element {
        if let Err(e) = ensure_same(&self.algebra, &other.algebra) {
            panic!("{e}");
        }
        Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// `{"(i,j)": "scalar"}` over the nonzero coordinates, in basis order.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (b, c) in self.algebra.basis().iter().zip(&self.coeffs) {
            if !c.is_zero() {
                map.insert(b.label(), Value::String(c.to_string()));
            }
        }
        Value::Object(map)
    }

    /// Inverse of [`Element::to_json`]; absent labels are zero.
    pub fn from_json(algebra: &Arc<Algebra>, value: &Value) -> Result<Element> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::Json("element must be an object".into()))?;
        let mut coeffs = vec![algebra.domain().zero(); algebra.dim()];
        for (key, v) in map {
            let (i, j) = parse_label(key)?;
            let s = v
                .as_str()
                .ok_or_else(|| Error::Json(format!("coefficient of {key} must be a string")))?;
            coeffs[algebra.index_of(i, j)?] = algebra.domain().parse_scalar(s)?;
        }
        Ok(Element { algebra: Arc::clone(algebra), coeffs })
    }
}

pub(crate) fn parse_label(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Json(format!("bad basis label `{key}`"));
    let inner = key.strip_prefix('(').and_then(|k| k.strip_suffix(')')).ok_or_else(bad)?;
    let (i, j) = inner.split_once(',').ok_or_else(bad)?;
    Ok((i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?))
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .algebra
            .basis()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, c)| {
                let label = format!("e{}{}", b.row, b.col);
                if c.is_one() {
                    label
                } else {
                    format!("{c}*{label}")
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Checked algebra product.
pub fn multiply(x: &Element, y: &Element) -> Result<Element> {
    ensure_same(&x.algebra, &y.algebra)?;
    Ok(Element {
        algebra: Arc::clone(&x.algebra),
        coeffs: x.algebra.mul_coeffs(&x.coeffs, &y.coeffs),
    })
}

/// `x ∘ y = xy + yx`.
pub fn jordan_product(x: &Element, y: &Element) -> Result<Element> {
    Ok(&multiply(x, y)? + &multiply(y, x)?)
}

impl Add for &Element {
    type Output = Element;

    fn add(self, rhs: &Element) -> Element {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;

    fn sub(self, rhs: &Element) -> Element {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &Element {
    type Output = Element;

    fn mul(self, rhs: &Element) -> Element {
        multiply(self, rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Element {
    type Output = Element;

    fn neg(self) -> Element {
        self.map(|c| -c)
    }
}
