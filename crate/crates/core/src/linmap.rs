//! Linear endomorphisms as dense basis-indexed tables, and the
//! `(f, g, h)` triples the derivation identities constrain.

use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use rand::Rng;
use serde_json::{Map, Value};

use crate::algebra::{ensure_same, jordan_product, parse_label, Algebra, Element};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Identifier of the flattening used by [`DerivationTriple::pack`].
pub const PACKING_LAYOUT: &str = "fgh-column-major";

/// A linear map `A -> A`. Column `k` of the table holds the coordinates of
/// the image of `b_k`; storage is column-major, `table[k*dim + m]`.
#[derive(Clone, Debug)]
pub struct LinearMap {
    algebra: Arc<Algebra>,
    table: Vec<Scalar>,
}

impl PartialEq for LinearMap {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same_as(&other.algebra) && self.table == other.table
    }
}

impl Eq for LinearMap {}

impl LinearMap {
    pub fn zero(algebra: &Arc<Algebra>) -> LinearMap {
        let dim = algebra.dim();
        LinearMap {
            algebra: Arc::clone(algebra),
            table: vec![algebra.domain().zero(); dim * dim],
        }
    }

    pub fn identity(algebra: &Arc<Algebra>) -> LinearMap {
        LinearMap::from_fn(algebra, |b| b.clone())
    }

    /// The map sending `b_k` to `images[k]`.
    pub fn from_images(algebra: &Arc<Algebra>, images: &[Element]) -> Result<LinearMap> {
        if images.len() != algebra.dim() {
            return Err(Error::LengthMismatch { expected: algebra.dim(), actual: images.len() });
        }
        let mut table = Vec::with_capacity(algebra.dim() * algebra.dim());
        for img in images {
            ensure_same(algebra, img.algebra())?;
            table.extend_from_slice(img.coeffs());
        }
        Ok(LinearMap { algebra: Arc::clone(algebra), table })
    }

    /// Builds the map from its action on basis elements.
    pub fn from_fn(algebra: &Arc<Algebra>, f: impl Fn(&Element) -> Element) -> LinearMap {
        let images: Vec<Element> =
            (0..algebra.dim()).map(|k| f(&Element::basis(algebra, k))).collect();
        LinearMap::from_images(algebra, &images).expect("images built in the same algebra")
    }

    pub(crate) fn from_table(algebra: &Arc<Algebra>, table: Vec<Scalar>) -> LinearMap {
        debug_assert_eq!(table.len(), algebra.dim() * algebra.dim());
        LinearMap { algebra: Arc::clone(algebra), table }
    }

    pub fn random<R: Rng + ?Sized>(algebra: &Arc<Algebra>, rng: &mut R) -> LinearMap {
        let d = algebra.domain();
        let n = algebra.dim() * algebra.dim();
        LinearMap::from_table(algebra, (0..n).map(|_| d.sample_small(rng)).collect())
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn table(&self) -> &[Scalar] {
        &self.table
    }

    /// Coefficient of `b_m` in the image of `b_k`.
    pub fn entry(&self, k: usize, m: usize) -> &Scalar {
        &self.table[k * self.algebra.dim() + m]
    }

    /// Image of `b_k`.
    pub fn column(&self, k: usize) -> Element {
        let dim = self.algebra.dim();
        Element::from_coeffs(&self.algebra, self.table[k * dim..(k + 1) * dim].to_vec())
            .expect("column has algebra dimension")
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        ensure_same(&self.algebra, x.algebra())?;
        let dim = self.algebra.dim();
        let mut out = vec![self.algebra.domain().zero(); dim];
        for (k, xk) in x.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (m, o) in out.iter_mut().enumerate() {
                let t = self.entry(k, m);
                if !t.is_zero() {
                    *o = &*o + &(xk * t);
                }
            }
        }
        Element::from_coeffs(&self.algebra, out)
    }

    pub fn scale(&self, s: &Scalar) -> LinearMap {
        LinearMap::from_table(&self.algebra, self.table.iter().map(|c| c * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(Scalar::is_zero)
    }

    /// `{"image_of(i,j)": element-json}` for every basis element, in basis order.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for b in self.algebra.basis() {
            map.insert(format!("image_of{}", b.label()), self.column(b.ordinal).to_json());
        }
        Value::Object(map)
    }

    /// Inverse of [`LinearMap::to_json`]; missing images are zero.
    pub fn from_json(algebra: &Arc<Algebra>, value: &Value) -> Result<LinearMap> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::Json("linear map must be an object".into()))?;
        let mut images = vec![Element::zero(algebra); algebra.dim()];
        for (key, v) in map {
            let label = key
                .strip_prefix("image_of")
                .ok_or_else(|| Error::Json(format!("bad map key `{key}`")))?;
            let (i, j) = parse_label(label)?;
            images[algebra.index_of(i, j)?] = Element::from_json(algebra, v)?;
        }
        LinearMap::from_images(algebra, &images)
    }
}

fn zip_maps(a: &LinearMap, b: &LinearMap, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> LinearMap {
    if let Err(e) = ensure_same(&a.algebra, &b.algebra) {
        panic!("{e}");
    }
    LinearMap::from_table(&a.algebra, a.table.iter().zip(&b.table).map(|(x, y)| f(x, y)).collect())
}

impl Add for &LinearMap {
    type Output = LinearMap;

    fn add(self, rhs: &LinearMap) -> LinearMap {
        zip_maps(self, rhs, |a, b| a + b)
    }
}

impl Sub for &LinearMap {
    type Output = LinearMap;

    fn sub(self, rhs: &LinearMap) -> LinearMap {
        zip_maps(self, rhs, |a, b| a - b)
    }
}

impl Neg for &LinearMap {
    type Output = LinearMap;

    fn neg(self) -> LinearMap {
        LinearMap::from_table(&self.algebra, self.table.iter().map(|c| -c).collect())
    }
}

/// `x ↦ a ∘ x`.
pub fn jordan_mult_operator(a: &Element) -> LinearMap {
    LinearMap::from_fn(a.algebra(), |b| {
        jordan_product(a, b).expect("basis element of the same algebra")
    })
}

/// `x ↦ ax - xa`.
pub fn inner_derivation(a: &Element) -> LinearMap {
    LinearMap::from_fn(a.algebra(), |b| &(a * b) - &(b * a))
}

/// An ordered triple `(f, g, h)` of linear maps on one algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTriple {
    pub f: LinearMap,
    pub g: LinearMap,
    pub h: LinearMap,
}

impl DerivationTriple {
    pub fn new(f: LinearMap, g: LinearMap, h: LinearMap) -> Result<DerivationTriple> {
        ensure_same(&f.algebra, &g.algebra)?;
        ensure_same(&f.algebra, &h.algebra)?;
        Ok(DerivationTriple { f, g, h })
    }

    pub fn zero(algebra: &Arc<Algebra>) -> DerivationTriple {
        let z = LinearMap::zero(algebra);
        DerivationTriple { f: z.clone(), g: z.clone(), h: z }
    }

    pub fn random<R: Rng + ?Sized>(algebra: &Arc<Algebra>, rng: &mut R) -> DerivationTriple {
        DerivationTriple {
            f: LinearMap::random(algebra, rng),
            g: LinearMap::random(algebra, rng),
            h: LinearMap::random(algebra, rng),
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.f.algebra
    }

    /// Flattens to `3·dim²` scalars: the f table column-major, then g, then h.
    pub fn pack(&self) -> Vec<Scalar> {
        let mut v = Vec::with_capacity(3 * self.f.table.len());
        v.extend_from_slice(&self.f.table);
        v.extend_from_slice(&self.g.table);
        v.extend_from_slice(&self.h.table);
        v
    }

    pub fn unpack(v: &[Scalar], algebra: &Arc<Algebra>) -> Result<DerivationTriple> {
        let block = algebra.dim() * algebra.dim();
        if v.len() != 3 * block {
            return Err(Error::LengthMismatch { expected: 3 * block, actual: v.len() });
        }
        if let Some(bad) = v.iter().find(|c| c.domain() != algebra.domain()) {
            return Err(Error::DomainMismatch {
                left: algebra.domain().to_string(),
                right: bad.domain().to_string(),
            });
        }
        let part = |i: usize| LinearMap::from_table(algebra, v[i * block..(i + 1) * block].to_vec());
        Ok(DerivationTriple { f: part(0), g: part(1), h: part(2) })
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("f".into(), self.f.to_json());
        map.insert("g".into(), self.g.to_json());
        map.insert("h".into(), self.h.to_json());
        Value::Object(map)
    }

    pub fn from_json(algebra: &Arc<Algebra>, value: &Value) -> Result<DerivationTriple> {
        let part = |name: &str| -> Result<LinearMap> {
            let v = value
                .get(name)
                .ok_or_else(|| Error::Json(format!("triple is missing `{name}`")))?;
            LinearMap::from_json(algebra, v)
        };
        Ok(DerivationTriple { f: part("f")?, g: part("g")?, h: part("h")? })
    }
}

/// Position of table entry `(k, m)` of map `which` (0 = f, 1 = g, 2 = h)
/// in a packed triple vector.
pub fn packed_index(dim: usize, which: usize, k: usize, m: usize) -> usize {
    which * dim * dim + k * dim + m
}
