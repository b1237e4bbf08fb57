//! Rods in the 3-torus and the geometric classification of their
//! complements.
//!
//! A configuration is either a bare list of directions or a *stacked*
//! configuration: horizontal rods (direction `(p, q, 0)`) at distinct
//! heights together with vertical rods (direction `(0, 0, 1)`).  The
//! classifier decides the regimes in which the geometry is determined by the
//! direction data alone, and otherwise reports which pair of rods it cannot
//! resolve.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::Value;
use std::fmt;

use crate::contfrac::Rational;
use crate::intlinalg::PrimitiveVector;
use crate::{Error, Result};

/// Placement data for a rod.  Directions are stored separately; a
/// horizontal rod runs in its height plane, a vertical rod pierces it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Placement {
    Horizontal { z: Rational },
    Vertical { x: Rational, y: Rational },
    Free,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rod {
    direction: PrimitiveVector,
    placement: Placement,
}

impl Rod {
    pub fn new(direction: PrimitiveVector, placement: Placement) -> Result<Self> {
        if direction.dim() != 3 {
            return Err(Error::DimensionMismatch(3, direction.dim()));
        }
        match &placement {
            Placement::Horizontal { .. } if !direction.coords()[2].is_zero() => {
                return Err(Error::Malformed {
                    what: "rod",
                    detail: format!("horizontal rod with direction {direction}"),
                });
            }
            Placement::Vertical { .. } if direction != PrimitiveVector::last_axis(3) => {
                return Err(Error::Malformed {
                    what: "rod",
                    detail: format!("vertical rod with direction {direction}"),
                });
            }
            _ => {}
        }
        Ok(Rod { direction, placement })
    }

    pub fn free(direction: PrimitiveVector) -> Result<Self> {
        Rod::new(direction, Placement::Free)
    }

    pub fn direction(&self) -> &PrimitiveVector {
        &self.direction
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }
}

/// An unordered collection of rods.  Placed rods must have distinct
/// placement data; free rods may repeat a direction.
#[derive(Clone, Debug)]
pub struct RodConfig {
    rods: Vec<Rod>,
}

impl RodConfig {
    pub fn new(rods: Vec<Rod>) -> Result<Self> {
        if rods.is_empty() {
            return Err(Error::Malformed {
                what: "configuration",
                detail: "no rods".into(),
            });
        }
        for (i, a) in rods.iter().enumerate() {
            for b in rods.iter().skip(i + 1) {
                if a.placement != Placement::Free && a.placement == b.placement {
                    return Err(Error::DuplicatePlacement(format!("{:?}", a.placement)));
                }
            }
        }
        Ok(RodConfig { rods })
    }

    pub fn from_directions(dirs: Vec<PrimitiveVector>) -> Result<Self> {
        RodConfig::new(dirs.into_iter().map(Rod::free).collect::<Result<_>>()?)
    }

    pub fn rods(&self) -> &[Rod] {
        &self.rods
    }

    pub fn directions(&self) -> Vec<PrimitiveVector> {
        self.rods.iter().map(|r| r.direction.clone()).collect()
    }
}

/// A horizontal rod of a stacked configuration: primitive pair `(p, q)`
/// with canonical sign, at height `z`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HorizontalRod {
    p: BigInt,
    q: BigInt,
    z: Rational,
}

impl HorizontalRod {
    pub fn pair(&self) -> (&BigInt, &BigInt) {
        (&self.p, &self.q)
    }

    pub fn z(&self) -> &Rational {
        &self.z
    }

    /// The slope `p/q` this rod realizes (the formal 1/0 for `(1, 0)`).
    pub fn slope(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone()).expect("primitive pair is never 0/0")
    }

    pub fn direction(&self) -> PrimitiveVector {
        PrimitiveVector::new(vec![self.p.clone(), self.q.clone(), BigInt::zero()])
            .expect("primitive pair extends to a primitive direction")
    }
}

/// Horizontal rods at strictly decreasing heights (top to bottom) plus
/// vertical rods.  The decreasing order makes the cyclic neighbour relation
/// on horizontal rods well defined.
#[derive(Clone, Debug)]
pub struct StackedConfig {
    horizontal: Vec<HorizontalRod>,
    vertical: Vec<(Rational, Rational)>,
}

fn unit_open(x: &Rational) -> bool {
    let zero = Rational::from_integer(BigInt::zero());
    let one = Rational::from_integer(BigInt::one());
    *x > zero && *x < one
}

fn unit_half_open(x: &Rational) -> bool {
    let zero = Rational::from_integer(BigInt::zero());
    let one = Rational::from_integer(BigInt::one());
    *x >= zero && *x < one
}

impl StackedConfig {
    /// Builds from `(p, q, z)` triples (any order) and vertical positions.
    pub fn new(
        horizontal: Vec<(BigInt, BigInt, Rational)>,
        vertical: Vec<(Rational, Rational)>,
    ) -> Result<Self> {
        if horizontal.is_empty() && vertical.is_empty() {
            return Err(Error::Malformed {
                what: "configuration",
                detail: "no rods".into(),
            });
        }
        let mut rods = Vec::with_capacity(horizontal.len());
        for (p, q, z) in horizontal {
            let pair = PrimitiveVector::new(vec![p, q])?;
            if !unit_open(&z) {
                return Err(Error::OutOfRange {
                    what: "height",
                    value: z.to_string(),
                    range: "the open unit interval",
                });
            }
            let [p, q] = <[BigInt; 2]>::try_from(pair.coords().to_vec()).expect("two coords");
            rods.push(HorizontalRod { p, q, z });
        }
        rods.sort_by(|a, b| b.z.cmp(&a.z));
        for w in rods.windows(2) {
            if w[0].z == w[1].z {
                return Err(Error::DuplicatePlacement(format!("height {}", w[0].z)));
            }
        }
        for (x, y) in &vertical {
            for v in [x, y] {
                if !unit_half_open(v) {
                    return Err(Error::OutOfRange {
                        what: "position",
                        value: v.to_string(),
                        range: "the half-open unit interval",
                    });
                }
            }
        }
        for (i, a) in vertical.iter().enumerate() {
            if vertical.iter().skip(i + 1).any(|b| a == b) {
                return Err(Error::DuplicatePlacement(format!("position ({}, {})", a.0, a.1)));
            }
        }
        Ok(StackedConfig { horizontal: rods, vertical })
    }

    /// Evenly spaced horizontal rods in the given top-to-bottom order, plus
    /// a single vertical rod: the common test-bench shape.
    pub fn standard(pairs: &[(i64, i64)]) -> Result<Self> {
        let n = pairs.len() as i64;
        let horizontal = pairs
            .iter()
            .enumerate()
            .map(|(i, &(p, q))| {
                Ok((
                    BigInt::from(p),
                    BigInt::from(q),
                    Rational::from_i64(n - i as i64, n + 1)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let half = Rational::from_i64(1, 2)?;
        StackedConfig::new(horizontal, vec![(half.clone(), half)])
    }

    pub fn horizontal(&self) -> &[HorizontalRod] {
        &self.horizontal
    }

    pub fn vertical(&self) -> &[(Rational, Rational)] {
        &self.vertical
    }

    pub fn rod_count(&self) -> usize {
        self.horizontal.len() + self.vertical.len()
    }

    pub fn directions(&self) -> Vec<PrimitiveVector> {
        let mut dirs: Vec<PrimitiveVector> =
            self.horizontal.iter().map(|h| h.direction()).collect();
        dirs.extend(std::iter::repeat_n(
            PrimitiveVector::last_axis(3),
            self.vertical.len(),
        ));
        dirs
    }
}

/// A rod configuration in either form.
#[derive(Clone, Debug)]
pub enum Config {
    Free(RodConfig),
    Stacked(StackedConfig),
}

impl Config {
    pub fn directions(&self) -> Vec<PrimitiveVector> {
        match self {
            Config::Free(c) => c.directions(),
            Config::Stacked(c) => c.directions(),
        }
    }

    pub fn rod_count(&self) -> usize {
        match self {
            Config::Free(c) => c.rods().len(),
            Config::Stacked(c) => c.rod_count(),
        }
    }

    pub fn as_stacked(&self) -> Option<&StackedConfig> {
        match self {
            Config::Stacked(c) => Some(c),
            Config::Free(_) => None,
        }
    }
}

fn int_from_value(v: &Value) -> Result<BigInt> {
    let malformed = || Error::Malformed {
        what: "configuration",
        detail: format!("expected an integer, got {v}"),
    };
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else {
                Err(malformed())
            }
        }
        Value::String(s) => s.trim().parse().map_err(|_| malformed()),
        _ => Err(malformed()),
    }
}

fn rational_from_value(v: &Value) -> Result<Rational> {
    let malformed = || Error::Malformed {
        what: "configuration",
        detail: format!("expected a rational, got {v}"),
    };
    match v {
        Value::String(s) => s.parse().map_err(|_| malformed()),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(Rational::from_integer(BigInt::from(i)));
            }
            // Finite decimal literal: recover the exact decimal value.
            let s = n.to_string();
            let (int_part, frac_part) = s.split_once('.').ok_or_else(malformed)?;
            if frac_part.is_empty()
                || frac_part.contains(['e', 'E'])
                || !frac_part.bytes().all(|b| b.is_ascii_digit())
            {
                return Err(malformed());
            }
            let negative = int_part.starts_with('-');
            let whole: BigInt = int_part.parse().map_err(|_| malformed())?;
            let frac: BigInt = frac_part.parse().map_err(|_| malformed())?;
            let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
            let num = &whole * &scale + if negative { -frac } else { frac };
            Rational::new(num, scale)
        }
        _ => Err(malformed()),
    }
}

fn array_of<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Malformed {
        what: "configuration",
        detail: format!("expected an array for {what}, got {v}"),
    })
}

/// Parses a configuration from JSON.  Two forms are accepted:
/// `{"rods":[{"direction":[a,b,c]},...]}` and
/// `{"horizontal":[{"pq":[p,q],"z":...},...],"vertical":[{"xy":[x,y]},...]}`
/// where heights and positions are exact rational strings like `"1/3"` or
/// plain decimal literals.
pub fn parse_config(text: &str) -> Result<Config> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Malformed {
        what: "configuration",
        detail: format!("invalid JSON: {e}"),
    })?;
    let obj = root.as_object().ok_or_else(|| Error::Malformed {
        what: "configuration",
        detail: "top level must be an object".into(),
    })?;
    if let Some(rods) = obj.get("rods") {
        let mut dirs = Vec::new();
        for entry in array_of(rods, "rods")? {
            let dir = entry.get("direction").ok_or_else(|| Error::Malformed {
                what: "configuration",
                detail: format!("rod entry without direction: {entry}"),
            })?;
            let coords = array_of(dir, "direction")?
                .iter()
                .map(int_from_value)
                .collect::<Result<Vec<_>>>()?;
            if coords.len() != 3 {
                return Err(Error::DimensionMismatch(3, coords.len()));
            }
            dirs.push(PrimitiveVector::new(coords)?);
        }
        return Ok(Config::Free(RodConfig::from_directions(dirs)?));
    }
    if obj.contains_key("horizontal") || obj.contains_key("vertical") {
        let mut horizontal = Vec::new();
        if let Some(h) = obj.get("horizontal") {
            for entry in array_of(h, "horizontal")? {
                let pq = entry.get("pq").ok_or_else(|| Error::Malformed {
                    what: "configuration",
                    detail: format!("horizontal entry without pq: {entry}"),
                })?;
                let pq = array_of(pq, "pq")?;
                if pq.len() != 2 {
                    return Err(Error::DimensionMismatch(2, pq.len()));
                }
                let z = entry.get("z").ok_or_else(|| Error::Malformed {
                    what: "configuration",
                    detail: format!("horizontal entry without z: {entry}"),
                })?;
                horizontal.push((
                    int_from_value(&pq[0])?,
                    int_from_value(&pq[1])?,
                    rational_from_value(z)?,
                ));
            }
        }
        let mut vertical = Vec::new();
        if let Some(vs) = obj.get("vertical") {
            for entry in array_of(vs, "vertical")? {
                let xy = entry.get("xy").ok_or_else(|| Error::Malformed {
                    what: "configuration",
                    detail: format!("vertical entry without xy: {entry}"),
                })?;
                let xy = array_of(xy, "xy")?;
                if xy.len() != 2 {
                    return Err(Error::DimensionMismatch(2, xy.len()));
                }
                vertical.push((rational_from_value(&xy[0])?, rational_from_value(&xy[1])?));
            }
        }
        return Ok(Config::Stacked(StackedConfig::new(horizontal, vertical)?));
    }
    Err(Error::Malformed {
        what: "configuration",
        detail: "expected a `rods` key or `horizontal`/`vertical` keys".into(),
    })
}

/// Rank over the rationals of the span of the direction vectors.
pub fn direction_rank(dirs: &[PrimitiveVector]) -> Result<usize> {
    if dirs.is_empty() {
        return Ok(0);
    }
    let dim = dirs[0].dim();
    for d in dirs {
        if d.dim() != dim {
            return Err(Error::DimensionMismatch(dim, d.dim()));
        }
    }
    let mut rows: Vec<Vec<BigInt>> = dirs.iter().map(|d| d.coords().to_vec()).collect();
    let mut rank = 0;
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (pivot_row, rest) = {
            let (head, tail) = rows.split_at_mut(rank + 1);
            (&head[rank], tail)
        };
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let a = row[col].clone();
            let b = pivot_row[col].clone();
            for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                *x = &*x * &b - p * &a;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Ok(rank)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Hyperbolic,
    SeifertFibred,
    Toroidal,
    Unknown,
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GeometryKind::Hyperbolic => "hyperbolic",
            GeometryKind::SeifertFibred => "Seifert fibred",
            GeometryKind::Toroidal => "toroidal",
            GeometryKind::Unknown => "unknown",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Classification {
    pub kind: GeometryKind,
    pub reason: String,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.kind, self.reason)
    }
}

fn first_parallel_pair(dirs: &[PrimitiveVector]) -> Option<(usize, usize)> {
    for (i, a) in dirs.iter().enumerate() {
        for (j, b) in dirs.iter().enumerate().skip(i + 1) {
            if a.is_parallel_to(b) {
                return Some((i, j));
            }
        }
    }
    None
}

fn classify_by_directions(dirs: &[PrimitiveVector]) -> Result<Classification> {
    if dirs.iter().all(|d| d == &dirs[0]) {
        return Ok(Classification {
            kind: GeometryKind::SeifertFibred,
            reason: format!("all rods are parallel to {}", dirs[0]),
        });
    }
    let rank = direction_rank(dirs)?;
    if rank <= 2 {
        return Ok(Classification {
            kind: GeometryKind::Toroidal,
            reason: format!("directions span a rank-{rank} sublattice"),
        });
    }
    match first_parallel_pair(dirs) {
        None => Ok(Classification {
            kind: GeometryKind::Hyperbolic,
            reason: "directions span rank 3 and no two rods are parallel".into(),
        }),
        Some((i, j)) => Ok(Classification {
            kind: GeometryKind::Unknown,
            reason: format!(
                "rods {i} and {j} are parallel ({}); placement data is needed to decide",
                dirs[i]
            ),
        }),
    }
}

/// Decides the geometry of the rod complement where the direction and
/// placement data determine it, in this order: all rods parallel (Seifert
/// fibred); directions of rank at most 2 (toroidal); rank 3 with no two
/// rods parallel (hyperbolic); a stacked configuration with one vertical
/// rod (hyperbolic exactly when consecutive horizontal rods, cyclically in
/// the height order, are never parallel); otherwise unknown, naming an
/// unresolved pair.
pub fn classify(config: &Config) -> Result<Classification> {
    let dirs = config.directions();
    let by_dirs = classify_by_directions(&dirs)?;
    if by_dirs.kind != GeometryKind::Unknown {
        return Ok(by_dirs);
    }
    let Config::Stacked(stacked) = config else {
        return Ok(by_dirs);
    };
    if stacked.vertical.len() != 1 {
        return Ok(Classification {
            kind: GeometryKind::Unknown,
            reason: format!(
                "{} vertical rods; only the single-vertical face structure is decided ({})",
                stacked.vertical.len(),
                by_dirs.reason
            ),
        });
    }
    let h = stacked.horizontal.len();
    for i in 0..h {
        let j = (i + 1) % h;
        if i == j {
            continue;
        }
        let a = &stacked.horizontal[i];
        let b = &stacked.horizontal[j];
        if a.pair() == b.pair() {
            return Ok(Classification {
                kind: GeometryKind::Toroidal,
                reason: format!(
                    "neighbouring horizontal rods at heights {} and {} are parallel ({}, {})",
                    a.z(),
                    b.z(),
                    a.p,
                    a.q
                ),
            });
        }
    }
    Ok(Classification {
        kind: GeometryKind::Hyperbolic,
        reason: "stacked with one vertical rod; cyclically neighbouring horizontal rods are never parallel"
            .into(),
    })
}
