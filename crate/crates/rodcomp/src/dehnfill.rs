//! Nested annular Dehn filling.
//!
//! A horizontal `(p, q, 0)`-rod is produced from a coordinate-axis rod by a
//! sequence of annular fillings encoded by a continued fraction expansion of
//! `p/q`.  This module traces that rewriting, composes the filling slopes of
//! all families of a stacked configuration (merging the outermost rods of
//! cyclically adjacent families), and assembles the resulting parent
//! manifold with its octahedron count.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::contfrac::{eval_cf, ContinuedFraction};
use crate::intlinalg::PrimitiveVector;
use crate::rodmodel::{classify, Config, GeometryKind, StackedConfig};
use crate::{Error, Result};

/// One family of nested fillings: the continued fraction determines
/// everything, including which axis rod sits at the core.
#[derive(Clone, Debug)]
pub struct NestedFillingSpec {
    cf: ContinuedFraction,
}

impl NestedFillingSpec {
    pub fn new(cf: ContinuedFraction) -> Self {
        NestedFillingSpec { cf }
    }

    pub fn cf(&self) -> &ContinuedFraction {
        &self.cf
    }

    /// `(1, 0, 0)` for even-length expansions, `(0, 1, 0)` for odd.
    pub fn core_direction(&self) -> PrimitiveVector {
        core_direction(self.cf.len())
    }
}

fn core_direction(terms: usize) -> PrimitiveVector {
    let coords = if terms % 2 == 0 { [1, 0, 0] } else { [0, 1, 0] };
    PrimitiveVector::from_i64(&coords).expect("axis vectors are primitive")
}

/// Direction of the core rod after each stage of nested filling, starting
/// from the bare core and ending at the `(p, q, 0)`-rod with `p/q` the value
/// of the continued fraction (up to sign).  Terms are applied innermost
/// first; odd-position terms add a multiple of `y` to `x`, even-position
/// terms a multiple of `x` to `y`.
pub fn nested_trace(cf: &ContinuedFraction) -> Vec<PrimitiveVector> {
    let m = cf.len();
    let (mut x, mut y) = if m % 2 == 0 {
        (BigInt::from(1), BigInt::from(0))
    } else {
        (BigInt::from(0), BigInt::from(1))
    };
    let as_vector = |x: &BigInt, y: &BigInt| {
        PrimitiveVector::new(vec![x.clone(), y.clone(), BigInt::zero()])
            .expect("coprime pair extends to a primitive direction")
    };
    let mut trace = Vec::with_capacity(m + 1);
    trace.push(as_vector(&x, &y));
    for (i, c) in cf.terms().iter().enumerate().rev() {
        if (i + 1) % 2 == 1 {
            x += c * &y;
        } else {
            y += c * &x;
        }
        trace.push(as_vector(&x, &y));
    }
    trace
}

/// The filling slope `1/ell` carried by one rod of the parent manifold.
/// `index` is the position of the rod in its sandwich (1 = outermost);
/// `ell = 0` encodes the meridional slope 1/0 that arises when adjacent
/// families share a leading term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FillingSlope {
    pub family: usize,
    pub index: usize,
    ell: BigInt,
}

impl FillingSlope {
    pub fn new(family: usize, index: usize, ell: BigInt) -> Self {
        FillingSlope { family, index, ell }
    }

    pub fn ell(&self) -> &BigInt {
        &self.ell
    }

    pub fn is_outermost(&self) -> bool {
        self.index == 1
    }

    pub fn is_meridional(&self) -> bool {
        self.ell.is_zero()
    }
}

impl Serialize for FillingSlope {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FillingSlope", 3)?;
        s.serialize_field("family", &self.family)?;
        s.serialize_field("index", &self.index)?;
        match i64::try_from(&self.ell) {
            Ok(n) => s.serialize_field("ell", &n)?,
            Err(_) => s.serialize_field("ell", &self.ell.to_string())?,
        }
        s.end()
    }
}

/// Slopes of all filled rods of the parent, family by family.  Families
/// with an empty expansion contribute no rods and do not participate in
/// outermost merging.  For each participating family the outermost rod is
/// shared with the previous participating family (cyclically) and carries
/// `1/(c_i1 - c_prev1)`; each inner pair carries `1/c_ij` and `1/(-c_ij)`.
pub fn compose_slopes(cfs: &[ContinuedFraction]) -> Vec<FillingSlope> {
    let participants: Vec<usize> = (0..cfs.len()).filter(|&i| !cfs[i].is_empty()).collect();
    let p = participants.len();
    let mut slopes = Vec::new();
    for (t, &i) in participants.iter().enumerate() {
        let prev = participants[(t + p - 1) % p];
        let lead = cfs[i].head().expect("participants are nonempty");
        let prev_lead = cfs[prev].head().expect("participants are nonempty");
        slopes.push(FillingSlope::new(i, 1, lead - prev_lead));
        for (pos, c) in cfs[i].terms().iter().enumerate().skip(1) {
            slopes.push(FillingSlope::new(i, pos + 1, c.clone()));
            slopes.push(FillingSlope::new(i, pos + 1, -c));
        }
    }
    slopes
}

/// A standard parent manifold: one vertical rod plus alternating
/// coordinate-axis rods, decomposing into regular ideal octahedra.  The
/// exact volume is `volume_units` times the octahedron volume.
#[derive(Clone, Debug, Serialize)]
pub struct ParentManifold {
    #[serde(rename = "E")]
    pub even_families: usize,
    #[serde(rename = "O")]
    pub odd_families: usize,
    pub filling_rod_count: usize,
    pub octahedron_count: usize,
    pub slopes: Vec<FillingSlope>,
    pub volume_units: usize,
}

impl ParentManifold {
    /// Total number of continued fraction terms across all families.
    pub fn sum_m(&self) -> usize {
        self.filling_rod_count / 2
    }
}

/// A parent manifold together with a health flag that is deliberately kept
/// out of the serialized record.  `standard_alternation` is false when the
/// parent degenerates: fewer than two filled families, or an unfilled
/// family whose rod interrupts the alternation of coordinate-axis rods.
/// The octahedron count is still reported from the counting formula, but
/// it is not backed by the decomposition.
#[derive(Clone, Debug)]
pub struct ParentReport {
    pub manifold: ParentManifold,
    pub standard_alternation: bool,
}

/// Builds the parent manifold of a stacked configuration whose horizontal
/// rods are realized by the given continued fractions (one per horizontal
/// rod, in the same top-to-bottom order).  Each expansion must evaluate to
/// the slope of its rod up to sign, and the configuration must classify as
/// hyperbolic.
pub fn parent_manifold(
    config: &StackedConfig,
    cfs: &[ContinuedFraction],
) -> Result<ParentReport> {
    let rods = config.horizontal();
    if cfs.len() != rods.len() {
        return Err(Error::DimensionMismatch(rods.len(), cfs.len()));
    }
    let classification = classify(&Config::Stacked(config.clone()))?;
    if classification.kind != GeometryKind::Hyperbolic {
        return Err(Error::NotHyperbolic(classification.to_string()));
    }
    for (cf, rod) in cfs.iter().zip(rods) {
        let value = eval_cf(cf);
        let slope = rod.slope();
        if value != slope && value != -slope.clone() {
            return Err(Error::CfRodMismatch {
                cf: cf.to_string(),
                value: value.to_string(),
                rod: format!("({}, {})", rod.pair().0, rod.pair().1),
                expected: slope.to_string(),
            });
        }
    }
    let (mut even_families, mut odd_families) = (0, 0);
    let mut sum_m = 0;
    for cf in cfs {
        sum_m += cf.len();
        if !cf.is_empty() {
            if cf.len() % 2 == 0 {
                even_families += 1;
            } else {
                odd_families += 1;
            }
        }
    }
    let participants = cfs.iter().filter(|cf| !cf.is_empty()).count();
    let standard_alternation = participants >= 2 && participants == cfs.len();
    let manifold = ParentManifold {
        even_families,
        odd_families,
        filling_rod_count: 2 * sum_m,
        octahedron_count: 2 * sum_m,
        slopes: compose_slopes(cfs),
        volume_units: 2 * sum_m,
    };
    Ok(ParentReport { manifold, standard_alternation })
}

/// Length on the cusp torus of the slope `1/ell`: the meridian has length
/// 2 and the longitude length 1, so `1/ell` has length `sqrt(ell^2 + 4)`.
pub fn slope_length(ell: &BigInt) -> f64 {
    let l = ell.to_f64().unwrap_or(f64::INFINITY);
    (l * l + 4.0).sqrt()
}

/// Outcome of comparing every filling slope length against 2*pi.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TwoPiCheck {
    pub passes: bool,
    pub min_length: f64,
}

/// Checks that every slope is longer than 2*pi (vacuously true for no
/// slopes).  A meridional slope makes the check inapplicable.
pub fn two_pi_check(slopes: &[FillingSlope]) -> Result<TwoPiCheck> {
    if slopes.iter().any(FillingSlope::is_meridional) {
        return Err(Error::MeridionalSlope);
    }
    let min_length = slopes
        .iter()
        .map(|s| slope_length(&s.ell))
        .fold(f64::INFINITY, f64::min);
    Ok(TwoPiCheck {
        passes: min_length > std::f64::consts::TAU,
        min_length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::Rational;

    fn cf(terms: &[i64]) -> ContinuedFraction {
        ContinuedFraction::from_i64s(terms).unwrap()
    }

    fn pv(coords: &[i64]) -> PrimitiveVector {
        PrimitiveVector::from_i64(coords).unwrap()
    }

    #[test]
    fn trace_three_term_example() {
        assert_eq!(
            nested_trace(&cf(&[1, 1, 2])),
            vec![pv(&[0, 1, 0]), pv(&[2, 1, 0]), pv(&[2, 3, 0]), pv(&[5, 3, 0])]
        );
    }

    #[test]
    fn trace_single_term() {
        for n in 1..=5 {
            assert_eq!(nested_trace(&cf(&[n])), vec![pv(&[0, 1, 0]), pv(&[n, 1, 0])]);
        }
    }

    #[test]
    fn trace_two_terms_canonicalizes() {
        assert_eq!(
            nested_trace(&cf(&[2, -4])),
            vec![pv(&[1, 0, 0]), pv(&[1, -4, 0]), pv(&[7, 4, 0])]
        );
    }

    #[test]
    fn trace_of_empty_is_bare_core() {
        assert_eq!(nested_trace(&ContinuedFraction::empty()), vec![pv(&[1, 0, 0])]);
    }

    #[test]
    fn trace_starts_at_parity_core() {
        for terms in [&[3i64][..], &[3, 2], &[3, 2, 5], &[1, 1, 1, 1]] {
            let filling = NestedFillingSpec::new(cf(terms));
            assert_eq!(nested_trace(filling.cf())[0], filling.core_direction());
        }
    }

    fn slope_matches(v: &PrimitiveVector, value: &Rational) -> bool {
        let (p, q) = (v.coords()[0].clone(), v.coords()[1].clone());
        let got = Rational::new(p, q).unwrap();
        got == *value || got == -value.clone()
    }

    #[test]
    fn trace_ends_at_cf_value() {
        for terms in [&[1i64, 1, 2][..], &[2, -4], &[6, 6, 6], &[0], &[-3, 2, -2, 5]] {
            let c = cf(terms);
            let last = nested_trace(&c).pop().unwrap();
            assert!(slope_matches(&last, &eval_cf(&c)), "cf {c}");
        }
    }

    #[test]
    fn compose_two_families_single_terms() {
        for n in 1..=4 {
            let slopes = compose_slopes(&[cf(&[n]), cf(&[0])]);
            assert_eq!(slopes.len(), 2);
            assert_eq!(slopes[0], FillingSlope::new(0, 1, BigInt::from(n)));
            assert_eq!(slopes[1], FillingSlope::new(1, 1, BigInt::from(-n)));
        }
    }

    #[test]
    fn compose_six_term_family() {
        let slopes = compose_slopes(&[cf(&[6, 6, 6, 6, 6, 6]), cf(&[0])]);
        assert_eq!(slopes.len(), 12);
        let outermost: Vec<i64> = slopes
            .iter()
            .filter(|s| s.is_outermost())
            .map(|s| i64::try_from(s.ell()).unwrap())
            .collect();
        assert_eq!(outermost, vec![6, -6]);
        let inner: Vec<(usize, i64)> = slopes
            .iter()
            .filter(|s| !s.is_outermost())
            .map(|s| (s.index, i64::try_from(s.ell()).unwrap()))
            .collect();
        let expected: Vec<(usize, i64)> =
            (2..=6).flat_map(|j| [(j, 6), (j, -6)]).collect();
        assert_eq!(inner, expected);
        assert!(slopes.iter().all(|s| !s.is_meridional()));
    }

    #[test]
    fn compose_single_family_merges_with_itself() {
        let slopes = compose_slopes(&[cf(&[1, 1, 2])]);
        assert_eq!(slopes.len(), 5);
        assert!(slopes[0].is_outermost() && slopes[0].is_meridional());
        assert!(matches!(two_pi_check(&slopes), Err(Error::MeridionalSlope)));
    }

    #[test]
    fn compose_skips_empty_families() {
        let slopes = compose_slopes(&[ContinuedFraction::empty(), cf(&[0])]);
        assert_eq!(slopes.len(), 1);
        assert_eq!(slopes[0], FillingSlope::new(1, 1, BigInt::zero()));
        assert!(compose_slopes(&[]).is_empty());
    }

    #[test]
    fn parent_eight_term_pair() {
        let value = eval_cf(&cf(&[7, 7, 7, 7, 7, 7, 7]));
        let (p, q) = (
            i64::try_from(value.numer()).unwrap(),
            i64::try_from(value.denom()).unwrap(),
        );
        let config = StackedConfig::standard(&[(p, q), (0, 1)]).unwrap();
        let report = parent_manifold(&config, &[cf(&[7, 7, 7, 7, 7, 7, 7]), cf(&[0])]).unwrap();
        let m = &report.manifold;
        assert_eq!(m.octahedron_count, 16);
        assert_eq!(m.filling_rod_count, 16);
        assert_eq!(m.volume_units, 16);
        assert_eq!((m.even_families, m.odd_families), (0, 2));
        assert!(report.standard_alternation);
    }

    #[test]
    fn parent_single_term_pair() {
        let config = StackedConfig::standard(&[(3, 1), (0, 1)]).unwrap();
        let report = parent_manifold(&config, &[cf(&[3]), cf(&[0])]).unwrap();
        assert_eq!(report.manifold.octahedron_count, 4);
        assert_eq!(report.manifold.slopes.len(), 2);
        assert!(report.standard_alternation);
    }

    #[test]
    fn parent_with_unfilled_family_is_flagged() {
        let config = StackedConfig::standard(&[(1, 0), (0, 1)]).unwrap();
        let report =
            parent_manifold(&config, &[ContinuedFraction::empty(), cf(&[0])]).unwrap();
        let m = &report.manifold;
        assert_eq!(m.sum_m(), 1);
        assert_eq!(m.octahedron_count, 2);
        assert_eq!((m.even_families, m.odd_families), (0, 1));
        assert!(!report.standard_alternation);
    }

    #[test]
    fn parent_rejects_mismatched_cf() {
        let config = StackedConfig::standard(&[(3, 1), (0, 1)]).unwrap();
        let err = parent_manifold(&config, &[cf(&[4]), cf(&[0])]).unwrap_err();
        assert!(matches!(err, Error::CfRodMismatch { .. }), "{err}");
    }

    #[test]
    fn parent_rejects_non_hyperbolic() {
        let config = StackedConfig::standard(&[(1, 0), (1, 0), (0, 1)]).unwrap();
        let err = parent_manifold(
            &config,
            &[ContinuedFraction::empty(), ContinuedFraction::empty(), cf(&[0])],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotHyperbolic(_)), "{err}");
    }

    #[test]
    fn slope_lengths() {
        assert!((slope_length(&BigInt::from(6)) - 40f64.sqrt()).abs() < 1e-12);
        assert_eq!(slope_length(&BigInt::from(0)), 2.0);
        assert!((slope_length(&BigInt::from(1)) - 5f64.sqrt()).abs() < 1e-12);
        assert!((slope_length(&BigInt::from(-6)) - 40f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn two_pi_check_cases() {
        let check = two_pi_check(&[]).unwrap();
        assert!(check.passes);
        assert_eq!(check.min_length, f64::INFINITY);

        let five = [FillingSlope::new(0, 2, BigInt::from(5))];
        let check = two_pi_check(&five).unwrap();
        assert!(!check.passes);
        assert!((check.min_length - 29f64.sqrt()).abs() < 1e-12);

        let six = [
            FillingSlope::new(0, 2, BigInt::from(6)),
            FillingSlope::new(0, 3, BigInt::from(-7)),
        ];
        assert!(two_pi_check(&six).unwrap().passes);
    }
}
