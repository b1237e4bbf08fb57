//! Two-sided volume bounds for hyperbolic rod complements.
//!
//! The general bound normalizes a chosen rod to the vertical axis and
//! charges `8 v_tet` per crossing of the projected link; the lower bound is
//! `n v_tet` per rod.  For stacked configurations built by nested annular
//! Dehn filling there is a sharper pair: `2 v_oct` per filling rod from the
//! octahedral decomposition of the parent, and, when every filling slope is
//! longer than `2 pi`, the same quantity shrunk by the universal Dehn
//! filling factor.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::contfrac::{minimal_cf_default, nicf, ContinuedFraction, Rational};
use crate::dehnfill::{parent_manifold, two_pi_check, ParentManifold};
use crate::intlinalg::{
    bezout_complete, transform_directions, unimodular_inverse, PrimitiveVector, UnimodularMatrix,
};
use crate::rodmodel::{classify, Config, GeometryKind, StackedConfig};
use crate::{Error, Result};

/// Volume of the regular ideal tetrahedron.
pub const V_TET: f64 = 1.0149416064096536;
/// Volume of the regular ideal octahedron.
pub const V_OCT: f64 = 3.6638623767088760;

/// Past this size of `max(|p|, q)` the exhaustive minimal-expansion search
/// is skipped in favour of the nearest-integer expansion.
pub const MINIMAL_SEARCH_CUTOFF: i64 = 10_000;

fn ser_big<S: Serializer>(b: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match i64::try_from(b) {
        Ok(n) => s.serialize_i64(n),
        Err(_) => s.serialize_str(&b.to_string()),
    }
}

fn ser_opt_big<S: Serializer>(
    b: &Option<BigInt>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match b {
        Some(b) => ser_big(b, s),
        None => s.serialize_none(),
    }
}

/// How a reported bound was obtained.  Bounds computed for a configuration
/// whose classification is undecided are stamped as conditional: they are
/// valid only if the complement turns out to be hyperbolic.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "method")]
pub enum BoundMethod {
    GeneralLower {
        n: usize,
        conditional_on_hyperbolicity: bool,
    },
    GeneralUpper {
        chosen: usize,
        conditional_on_hyperbolicity: bool,
    },
    OrthUpper,
    OrthLower {
        #[serde(rename = "C", serialize_with = "ser_big")]
        c: BigInt,
    },
    Inapplicable {
        reason: String,
    },
}

/// A two-sided volume report.  `upper` is `+inf` (serialized as null) when
/// no upper bound applies.  `multiplier_tet` and `multiplier_oct` carry the
/// exact integer multiplier of the respective constant behind whichever
/// bound is a pure multiple of it, preferring the upper bound; the lower
/// bound's multiplier is always recoverable from its method tag.
#[derive(Clone, Debug, Serialize)]
pub struct VolumeBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: BoundMethod,
    pub upper_method: BoundMethod,
    #[serde(serialize_with = "ser_opt_big")]
    pub multiplier_tet: Option<BigInt>,
    #[serde(serialize_with = "ser_opt_big")]
    pub multiplier_oct: Option<BigInt>,
    #[serde(rename = "C", serialize_with = "ser_opt_big")]
    pub c: Option<BigInt>,
    pub sum_m: Option<usize>,
    pub applicable: bool,
}

/// Total geometric intersection number of the projected horizontal rods:
/// crossings between distinct rods plus self-crossings of non-primitive
/// projections.
pub fn intersection_functional(pairs: &[(BigInt, BigInt)]) -> BigInt {
    let mut total = BigInt::zero();
    for (i, (pi, qi)) in pairs.iter().enumerate() {
        for (pj, qj) in &pairs[i + 1..] {
            total += (pi * qj - pj * qi).abs();
        }
        let g = pi.gcd(qi);
        if !g.is_zero() {
            total += g - 1;
        }
    }
    total
}

/// The upper bound obtained from one choice of normalized rod: the bound
/// is `8 v_tet` times the intersection functional of the other rods.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChosenUpperBound {
    pub chosen: usize,
    pub functional: BigInt,
}

impl ChosenUpperBound {
    pub fn multiplier_tet(&self) -> BigInt {
        BigInt::from(8) * &self.functional
    }

    pub fn bound(&self) -> f64 {
        8.0 * V_TET * self.functional.to_f64().unwrap_or(f64::INFINITY)
    }
}

fn is_z_parallel(v: &PrimitiveVector) -> bool {
    v.coords()[0].is_zero() && v.coords()[1].is_zero()
}

/// `general_upper` against an explicit completion of the chosen direction,
/// mainly for verifying that the bound does not depend on which completion
/// `bezout_complete` happens to return.
pub fn general_upper_with_completion(
    dirs: &[PrimitiveVector],
    chosen: usize,
    completion: &UnimodularMatrix,
) -> Result<ChosenUpperBound> {
    if dirs.len() < 3 {
        return Err(Error::Inapplicable(format!(
            "{} rods cannot form a hyperbolic complement",
            dirs.len()
        )));
    }
    if let Some(d) = dirs.iter().find(|d| d.dim() != 3) {
        return Err(Error::DimensionMismatch(3, d.dim()));
    }
    if chosen >= dirs.len() {
        return Err(Error::OutOfRange {
            what: "chosen rod",
            value: chosen.to_string(),
            range: "0..number of rods",
        });
    }
    let normalizer = unimodular_inverse(completion);
    let transformed = transform_directions(&normalizer, dirs)?;
    let pairs: Vec<(BigInt, BigInt)> = transformed
        .iter()
        .filter(|v| !is_z_parallel(v))
        .map(|v| (v.coords()[0].clone(), v.coords()[1].clone()))
        .collect();
    let functional = intersection_functional(&pairs);
    if functional.is_zero() {
        return Err(Error::Inapplicable(
            "projected rods have no crossings; the bound degenerates to 0".into(),
        ));
    }
    Ok(ChosenUpperBound { chosen, functional })
}

/// Upper volume bound from normalizing the `chosen` rod to the vertical
/// axis: `8 v_tet` times the intersection functional of the projections of
/// the remaining rods.
pub fn general_upper(dirs: &[PrimitiveVector], chosen: usize) -> Result<ChosenUpperBound> {
    if chosen >= dirs.len() {
        return Err(Error::OutOfRange {
            what: "chosen rod",
            value: chosen.to_string(),
            range: "0..number of rods",
        });
    }
    general_upper_with_completion(dirs, chosen, &bezout_complete(&dirs[chosen]))
}

/// Lower volume bound `n v_tet` for an n-rod hyperbolic complement.
pub fn general_lower(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Inapplicable(format!(
            "{n} rods cannot form a hyperbolic complement"
        )));
    }
    Ok(n as f64 * V_TET)
}

/// Minimum of `general_upper` over all rod choices; ties go to the first
/// minimizing rod.
pub fn best_general_upper(dirs: &[PrimitiveVector]) -> Result<ChosenUpperBound> {
    let mut best: Option<ChosenUpperBound> = None;
    let mut last_err = None;
    for chosen in 0..dirs.len() {
        match general_upper(dirs, chosen) {
            Ok(b) => {
                if best.as_ref().is_none_or(|cur| b.functional < cur.functional) {
                    best = Some(b);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| {
        last_err.unwrap_or_else(|| Error::Inapplicable("no rods".into()))
    })
}

fn inapplicable_bounds(reason: String) -> VolumeBounds {
    VolumeBounds {
        lower: 0.0,
        upper: f64::INFINITY,
        lower_method: BoundMethod::Inapplicable { reason: reason.clone() },
        upper_method: BoundMethod::Inapplicable { reason },
        multiplier_tet: None,
        multiplier_oct: None,
        c: None,
        sum_m: None,
        applicable: false,
    }
}

/// Two-sided general report for any configuration.  `optimize` minimizes
/// the upper bound over rod choices; otherwise the first rod in the
/// vertical direction (or failing that, the first rod) is normalized, which
/// is where the bound is anchored.
pub fn general_report(config: &Config, optimize: bool) -> Result<VolumeBounds> {
    let classification = classify(config)?;
    let conditional = match classification.kind {
        GeometryKind::Hyperbolic => false,
        GeometryKind::Unknown => true,
        GeometryKind::SeifertFibred | GeometryKind::Toroidal => {
            return Ok(inapplicable_bounds(classification.to_string()));
        }
    };
    let dirs = config.directions();
    let n = dirs.len();
    let upper = if optimize {
        best_general_upper(&dirs)
    } else {
        let chosen = dirs
            .iter()
            .position(|d| *d == PrimitiveVector::last_axis(3))
            .unwrap_or(0);
        general_upper(&dirs, chosen)
    };
    let (upper_value, upper_method, multiplier_tet) = match upper {
        Ok(b) => (
            b.bound(),
            BoundMethod::GeneralUpper {
                chosen: b.chosen,
                conditional_on_hyperbolicity: conditional,
            },
            Some(b.multiplier_tet()),
        ),
        Err(Error::Inapplicable(reason)) => {
            (f64::INFINITY, BoundMethod::Inapplicable { reason }, None)
        }
        Err(e) => return Err(e),
    };
    let (lower_value, lower_method) = match general_lower(n) {
        Ok(b) => (
            b,
            BoundMethod::GeneralLower {
                n,
                conditional_on_hyperbolicity: conditional,
            },
        ),
        Err(Error::Inapplicable(reason)) => (0.0, BoundMethod::Inapplicable { reason }),
        Err(e) => return Err(e),
    };
    let applicable = !matches!(upper_method, BoundMethod::Inapplicable { .. })
        && !matches!(lower_method, BoundMethod::Inapplicable { .. });
    Ok(VolumeBounds {
        lower: lower_value,
        upper: upper_value,
        lower_method,
        upper_method,
        multiplier_tet,
        multiplier_oct: None,
        c: None,
        sum_m: None,
        applicable,
    })
}

/// Sharp bounds for a stacked configuration realized by the given
/// expansions (one per horizontal rod, top to bottom, each evaluating to
/// the rod's slope up to sign).
///
/// The upper bound is `2 v_oct` per continued fraction term.  When the
/// shortest filling slope `C` is at least 6, every slope beats `2 pi` and
/// the lower bound is the upper scaled by `(1 - 4 pi^2 / (C^2+4))^{3/2}`;
/// otherwise the lower bound falls back to `n v_tet`.  `applicable` is
/// false when the parent's octahedral decomposition degenerates (fewer
/// than two filled families, or an unfilled rod breaking alternation).
pub fn orthogonal_bounds(
    config: &StackedConfig,
    cfs: &[ContinuedFraction],
) -> Result<VolumeBounds> {
    let report = parent_manifold(config, cfs)?;
    let manifold = &report.manifold;
    let sum_m = manifold.sum_m();
    let c = manifold
        .slopes
        .iter()
        .map(|s| s.ell().abs())
        .min()
        .ok_or_else(|| {
            Error::Internal("hyperbolic stacked configuration with no filling slopes".into())
        })?;
    let multiplier_oct = BigInt::from(manifold.octahedron_count);
    let upper = 2.0 * V_OCT * sum_m as f64;
    let (lower, lower_method, multiplier_tet) = if c >= BigInt::from(6) {
        let check = two_pi_check(&manifold.slopes)?;
        if !check.passes {
            return Err(Error::Internal(format!(
                "slope floor {c} at least 6 but minimum length {} fails the 2 pi test",
                check.min_length
            )));
        }
        let c_f = c.to_f64().unwrap_or(f64::INFINITY);
        let tau = std::f64::consts::TAU;
        let factor = (1.0 - tau * tau / (c_f * c_f + 4.0)).powf(1.5);
        (factor * upper, BoundMethod::OrthLower { c: c.clone() }, None)
    } else {
        let n = config.rod_count();
        (
            general_lower(n)?,
            BoundMethod::GeneralLower {
                n,
                conditional_on_hyperbolicity: false,
            },
            Some(BigInt::from(n)),
        )
    };
    Ok(VolumeBounds {
        lower,
        upper,
        lower_method,
        upper_method: BoundMethod::OrthUpper,
        multiplier_tet,
        multiplier_oct: Some(multiplier_oct),
        c: Some(c),
        sum_m: Some(sum_m),
        applicable: report.standard_alternation,
    })
}

/// Expansion used for a rod slope when none is given: the minimal
/// expansion at desk scale, the nearest-integer expansion beyond it.
pub fn expansion_for_slope(x: &Rational) -> Result<ContinuedFraction> {
    let size = x.numer().abs().max(x.denom().clone());
    if size <= BigInt::from(MINIMAL_SEARCH_CUTOFF) {
        minimal_cf_default(x)
    } else {
        Ok(nicf(x))
    }
}

/// The same stack with every horizontal `(p, q)` replaced by `(q, p)` and
/// vertical positions `(x, y)` by `(y, x)`: the image under swapping the
/// first two coordinates of the 3-torus, which preserves volume.
pub fn swapped_config(config: &StackedConfig) -> Result<StackedConfig> {
    let horizontal = config
        .horizontal()
        .iter()
        .map(|h| {
            let (p, q) = h.pair();
            (q.clone(), p.clone(), h.z().clone())
        })
        .collect();
    let vertical = config
        .vertical()
        .iter()
        .map(|(x, y)| (y.clone(), x.clone()))
        .collect();
    StackedConfig::new(horizontal, vertical)
}

/// Orthogonal bounds with automatic expansions, including which of the two
/// coordinate readings was used and the parent the bounds came from.
#[derive(Clone, Debug)]
pub struct OrthReport {
    pub bounds: VolumeBounds,
    pub parent: ParentManifold,
    pub cfs: Vec<ContinuedFraction>,
    pub swapped: bool,
}

/// Runs `orthogonal_bounds` with automatically chosen expansions,
/// evaluating both the configuration and its coordinate swap and keeping
/// whichever needs fewer terms (ties keep the original).
pub fn orthogonal_report(config: &StackedConfig) -> Result<OrthReport> {
    let expansions = |c: &StackedConfig| -> Result<Vec<ContinuedFraction>> {
        c.horizontal().iter().map(|h| expansion_for_slope(&h.slope())).collect()
    };
    let default_cfs = expansions(config)?;
    let swapped = swapped_config(config)?;
    let swapped_cfs = expansions(&swapped)?;
    let terms = |cfs: &[ContinuedFraction]| cfs.iter().map(ContinuedFraction::len).sum::<usize>();
    let (config, cfs, swapped) = if terms(&swapped_cfs) < terms(&default_cfs) {
        (&swapped, swapped_cfs, true)
    } else {
        (config, default_cfs, false)
    };
    Ok(OrthReport {
        bounds: orthogonal_bounds(config, &cfs)?,
        parent: parent_manifold(config, &cfs)?.manifold,
        cfs,
        swapped,
    })
}
