//! Integer linear algebra over arbitrary-precision integers.
//!
//! Directions of rods are primitive integer vectors up to sign; changes of
//! basis of the 3-torus are unimodular matrices.  Everything here is exact:
//! determinants by cofactor expansion, inverses by the adjugate, and basis
//! completion by induction on dimension.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::fmt;

use crate::{Error, Result};

/// Greatest common divisor of the absolute values of the coordinates.
/// Zero exactly when the vector is zero.
pub fn content(coords: &[BigInt]) -> Result<BigInt> {
    if coords.is_empty() {
        return Err(Error::EmptyVector);
    }
    Ok(coords
        .iter()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c)))
}

fn fmt_coords(coords: &[BigInt]) -> String {
    let inner: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("({})", inner.join(", "))
}

/// A primitive integer vector with canonical sign: the first nonzero
/// coordinate is positive.  Two rods with opposite direction vectors are the
/// same rod, so the sign is fixed here, at the type boundary, and nowhere
/// else.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimitiveVector {
    coords: Vec<BigInt>,
}

impl PrimitiveVector {
    /// Validates primitivity (content 1) and canonicalizes the sign.
    pub fn new(coords: Vec<BigInt>) -> Result<Self> {
        let c = content(&coords)?;
        if c.is_zero() {
            return Err(Error::ZeroVector);
        }
        if !c.is_one() {
            return Err(Error::NotPrimitive(fmt_coords(&coords), c.to_string()));
        }
        let mut coords = coords;
        if let Some(first) = coords.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                for x in &mut coords {
                    *x = -&*x;
                }
            }
        }
        Ok(PrimitiveVector { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The unit vector along the last axis, `(0, ..., 0, 1)`.
    pub fn last_axis(dim: usize) -> Self {
        let mut coords = vec![BigInt::zero(); dim];
        coords[dim - 1] = BigInt::one();
        PrimitiveVector { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Primitive vectors with canonical sign are parallel iff they are equal.
    pub fn is_parallel_to(&self, other: &Self) -> bool {
        self == other
    }
}

impl fmt::Display for PrimitiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_coords(&self.coords))
    }
}

impl fmt::Debug for PrimitiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_coords(&self.coords))
    }
}

/// Serialized as a JSON array; coordinates that fit in an `i64` become
/// numbers, larger ones become decimal strings.
impl Serialize for PrimitiveVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coords.len()))?;
        for c in &self.coords {
            match i64::try_from(c) {
                Ok(n) => seq.serialize_element(&n)?,
                Err(_) => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

fn laplace_det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 1 {
        return rows[0][0].clone();
    }
    if n == 2 {
        return &rows[0][0] * &rows[1][1] - &rows[0][1] * &rows[1][0];
    }
    let mut det = BigInt::zero();
    for (j, a) in rows[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = rows[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = a * laplace_det(&minor);
        if j % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// A square integer matrix with determinant +1 or -1.
#[derive(Clone, PartialEq, Eq)]
pub struct UnimodularMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl UnimodularMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        let det = laplace_det(&rows);
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        Ok(UnimodularMatrix { rows })
    }

    pub fn from_rows_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn from_columns(cols: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = cols.len();
        if n == 0 || cols.iter().any(|c| c.len() != n) {
            return Err(Error::NotSquare);
        }
        let rows = (0..n)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        Self::from_rows(rows)
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        UnimodularMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn determinant(&self) -> BigInt {
        laplace_det(&self.rows)
    }

    pub fn mul_vector(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), v.len()));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let n = self.dim();
        let rows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &self.rows[i][k] * &other.rows[k][j]).sum())
                    .collect()
            })
            .collect();
        Ok(UnimodularMatrix { rows })
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl fmt::Debug for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Returns `(g, u, w)` with `u*a + w*b = g = gcd(a, b) >= 0`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let tmp = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, tmp);
        let tmp = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, tmp);
        let tmp = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, tmp);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Columns of a unimodular completion of the primitive vector `v`, last
/// column equal to `v`, determinant exactly +1.
///
/// Induction on dimension: with head `a` and tail `w`, put `d = gcd(w)`,
/// solve `s*d - t*a = 1` taking the minimal residue of `t` mod `d`, use
/// `(s, (t/d) w)` as the first column, and complete `w/d` in one dimension
/// lower for the middle columns.  A zero tail forces `a = +/-1` and is
/// completed by shifted unit vectors directly.
fn completion_columns(v: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = v.len();
    if n == 1 {
        return vec![vec![v[0].clone()]];
    }
    if n == 2 {
        let (_, u, w) = extended_gcd(&v[0], &v[1]);
        // det [[w, v0], [-u, v1]] = w*v1 + u*v0 = 1
        return vec![vec![w, -u], v.to_vec()];
    }
    let a = &v[0];
    let tail = &v[1..];
    if tail.iter().all(|x| x.is_zero()) {
        // v = (a, 0, ..., 0) with a = +/-1.
        let sign = if (n - 1) % 2 == 0 { a.clone() } else { -a.clone() };
        let mut cols = Vec::with_capacity(n);
        for i in 0..n - 1 {
            let mut col = vec![BigInt::zero(); n];
            col[i + 1] = if i == 0 { sign.clone() } else { BigInt::one() };
            cols.push(col);
        }
        cols.push(v.to_vec());
        return cols;
    }
    let d = content(tail).expect("nonempty tail");
    let (_, u, w) = extended_gcd(a, &d);
    // u*a + w*d = 1, so (s, t) = (w, -u) solves s*d - t*a = 1.
    let (mut s, mut t) = (w, -u);
    // Minimal residue: shift t into [-d/2, d/2) along (s + k*a, t + k*d).
    let mut r = t.mod_floor(&d);
    if BigInt::from(2) * &r >= d {
        r -= &d;
    }
    if r != t {
        let k = (&r - &t).div_floor(&d);
        debug_assert_eq!(&t + &k * &d, r);
        s += &k * a;
        t = r;
    }
    let reduced_tail: Vec<BigInt> = tail.iter().map(|x| x / &d).collect();
    let mut first = Vec::with_capacity(n);
    first.push(s);
    for x in tail {
        first.push(&t * x / &d);
    }
    let sub = completion_columns(&reduced_tail);
    let mut cols = Vec::with_capacity(n);
    cols.push(first);
    for sub_col in sub.iter().take(n - 2) {
        let mut col = Vec::with_capacity(n);
        col.push(BigInt::zero());
        col.extend(sub_col.iter().cloned());
        cols.push(col);
    }
    cols.push(v.to_vec());
    cols
}

/// Completes `v` to a basis of the integer lattice: returns a matrix with
/// determinant exactly +1 whose last column is `v`.
pub fn bezout_complete(v: &PrimitiveVector) -> UnimodularMatrix {
    let cols = completion_columns(v.coords());
    UnimodularMatrix::from_columns(cols)
        .expect("completion of a primitive vector is unimodular")
}

/// Exact inverse via the adjugate; the inverse of a unimodular matrix is
/// again integral and unimodular.
pub fn unimodular_inverse(m: &UnimodularMatrix) -> UnimodularMatrix {
    let n = m.dim();
    let det = m.determinant();
    if n == 1 {
        return UnimodularMatrix { rows: vec![vec![det]] };
    }
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // Entry (i, j) of the inverse: cofactor (j, i) over det.
                    let minor: Vec<Vec<BigInt>> = (0..n)
                        .filter(|&r| r != j)
                        .map(|r| {
                            (0..n)
                                .filter(|&c| c != i)
                                .map(|c| m.rows[r][c].clone())
                                .collect()
                        })
                        .collect();
                    let cof = laplace_det(&minor);
                    let signed = if (i + j) % 2 == 0 { cof } else { -cof };
                    &det * signed
                })
                .collect()
        })
        .collect();
    UnimodularMatrix { rows }
}

/// Applies `m` to each direction and re-canonicalizes.  Unimodular maps
/// preserve primitivity, so this is a bijection on directions.
pub fn transform_directions(
    m: &UnimodularMatrix,
    dirs: &[PrimitiveVector],
) -> Result<Vec<PrimitiveVector>> {
    dirs.iter()
        .map(|v| {
            let image = m.mul_vector(v.coords())?;
            PrimitiveVector::new(image)
                .map_err(|e| Error::Internal(format!("transform broke primitivity: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(coords: &[i64]) -> PrimitiveVector {
        PrimitiveVector::from_i64(coords).unwrap()
    }

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn content_examples() {
        assert_eq!(content(&[b(2), b(4), b(3)]).unwrap(), b(1));
        assert_eq!(content(&[b(0), b(0), b(0)]).unwrap(), b(0));
        assert_eq!(content(&[b(4), b(6)]).unwrap(), b(2));
        assert!(matches!(content(&[]), Err(Error::EmptyVector)));
    }

    #[test]
    fn primitive_vector_canonical_sign() {
        assert_eq!(pv(&[-7, -4, 0]), pv(&[7, 4, 0]));
        assert_eq!(pv(&[0, -1, 3]).coords()[1], b(1));
        assert!(matches!(
            PrimitiveVector::from_i64(&[2, 4, 2]),
            Err(Error::NotPrimitive(_, _))
        ));
        assert!(matches!(
            PrimitiveVector::from_i64(&[0, 0, 0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn bezout_complete_last_axis_is_identity() {
        let m = bezout_complete(&pv(&[0, 0, 1]));
        assert_eq!(m, UnimodularMatrix::identity(3));
    }

    #[test]
    fn bezout_complete_small_examples() {
        // Pinned outputs of the minimal-residue convention.
        let m = bezout_complete(&pv(&[2, 4, 3]));
        assert_eq!(
            m,
            UnimodularMatrix::from_rows_i64(&[&[1, 0, 2], &[0, -1, 4], &[0, -1, 3]]).unwrap()
        );
        let m = bezout_complete(&pv(&[5, 7, 1]));
        assert_eq!(
            m,
            UnimodularMatrix::from_rows_i64(&[&[1, 0, 5], &[0, 1, 7], &[0, 0, 1]]).unwrap()
        );
        let m = bezout_complete(&pv(&[9, 8, 6]));
        assert_eq!(
            m,
            UnimodularMatrix::from_rows_i64(&[&[-4, 0, 9], &[-4, -1, 8], &[-3, -1, 6]]).unwrap()
        );
    }

    #[test]
    fn bezout_complete_zero_tail() {
        for dim in 2..=5 {
            let mut coords = vec![0i64; dim];
            coords[0] = 1;
            let m = bezout_complete(&pv(&coords));
            assert_eq!(m.determinant(), b(1));
            assert_eq!(m.column(dim - 1), pv(&coords).coords().to_vec());
        }
    }

    #[test]
    fn inverse_examples() {
        let m = UnimodularMatrix::from_rows_i64(&[&[1, 0, 5], &[0, 1, 7], &[0, 0, 1]]).unwrap();
        let inv = unimodular_inverse(&m);
        assert_eq!(
            inv,
            UnimodularMatrix::from_rows_i64(&[&[1, 0, -5], &[0, 1, -7], &[0, 0, 1]]).unwrap()
        );
        let m = UnimodularMatrix::from_rows_i64(&[&[1, 0, 2], &[0, -1, 4], &[0, -1, 3]]).unwrap();
        let inv = unimodular_inverse(&m);
        assert_eq!(
            inv,
            UnimodularMatrix::from_rows_i64(&[&[1, -2, 2], &[0, 3, -4], &[0, 1, -1]]).unwrap()
        );
        assert_eq!(m.mul(&inv).unwrap(), UnimodularMatrix::identity(3));
    }

    #[test]
    fn inverse_involution() {
        let m = UnimodularMatrix::from_rows_i64(&[&[-4, 0, 9], &[-4, -1, 8], &[-3, -1, 6]]).unwrap();
        assert_eq!(unimodular_inverse(&unimodular_inverse(&m)), m);
    }

    #[test]
    fn transform_examples() {
        let inv = UnimodularMatrix::from_rows_i64(&[&[1, 0, -5], &[0, 1, -7], &[0, 0, 1]]).unwrap();
        let out = transform_directions(&inv, &[pv(&[5, 7, 1])]).unwrap();
        assert_eq!(out, vec![pv(&[0, 0, 1])]);

        let out =
            transform_directions(&inv, &[pv(&[2, 4, 3]), pv(&[9, 8, 6]), pv(&[0, 0, 1])]).unwrap();
        assert_eq!(out, vec![pv(&[13, 17, -3]), pv(&[21, 34, -6]), pv(&[5, 7, -1])]);
    }

    #[test]
    fn normalization_sends_v_to_last_axis() {
        for coords in [&[2i64, 4, 3][..], &[5, 7, 1], &[9, 8, 6], &[1, 0, 0], &[0, 1, 0]] {
            let v = pv(coords);
            let inv = unimodular_inverse(&bezout_complete(&v));
            let out = transform_directions(&inv, &[v.clone()]).unwrap();
            assert_eq!(out, vec![PrimitiveVector::last_axis(3)], "failed for {v}");
        }
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(
            UnimodularMatrix::from_rows_i64(&[&[2, 0], &[0, 1]]),
            Err(Error::NotUnimodular(_))
        ));
        assert!(matches!(
            UnimodularMatrix::from_rows(vec![vec![b(1), b(0)]]),
            Err(Error::NotSquare)
        ));
    }

    #[test]
    fn content_invariant_under_unimodular() {
        let m = UnimodularMatrix::from_rows_i64(&[&[1, -2, 2], &[0, 3, -4], &[0, 1, -1]]).unwrap();
        for coords in [&[2i64, 4, 6][..], &[1, 1, 1], &[0, 5, 10]] {
            let v: Vec<BigInt> = coords.iter().map(|&c| b(c)).collect();
            let image = m.mul_vector(&v).unwrap();
            assert_eq!(content(&v).unwrap(), content(&image).unwrap());
        }
    }
}
