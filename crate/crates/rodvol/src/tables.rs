//! The reproducibility tables: rows are computed in parallel (each is
//! pure) and assembled in input order into CSV text plus a JSON value.

use num_bigint::BigInt;
use rayon::prelude::*;

use rodcomp::contfrac::{eval_cf, ContinuedFraction, Rational};
use rodcomp::intlinalg::PrimitiveVector;
use rodcomp::rodmodel::StackedConfig;
use rodcomp::volbounds::{
    best_general_upper, general_upper, intersection_functional, orthogonal_bounds,
};
use rodcomp::Error;

use crate::{method_text, sig12, Failure};

pub struct Table {
    pub csv: String,
    pub json: serde_json::Value,
}

/// Applies table defaults and keeps the sweep at desk scale.
pub fn range(
    min: Option<i64>,
    max: Option<i64>,
    default_lo: i64,
    default_hi: i64,
) -> Result<(i64, i64), Failure> {
    let lo = min.unwrap_or(default_lo);
    let hi = max.unwrap_or(default_hi);
    if lo < 1 || hi < lo || hi > 10_000 {
        return Err(Failure::input(format!(
            "row range {lo}..={hi} unusable; need 1 <= min <= max <= 10000"
        )));
    }
    Ok((lo, hi))
}

fn csv_from_records(header: &[&str], records: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("csv header to memory");
    for r in records {
        w.write_record(r).expect("csv row to memory");
    }
    String::from_utf8(w.into_inner().expect("csv flush to memory")).expect("csv is utf-8")
}

// The bound multipliers are arbitrary-precision; render as a JSON integer
// when they fit and as a string otherwise.
fn big_value(b: &BigInt) -> serde_json::Value {
    match i64::try_from(b) {
        Ok(n) => serde_json::json!(n),
        Err(_) => serde_json::json!(b.to_string()),
    }
}

/// General upper-bound multiplier for each normalized-rod choice of the
/// four-rod benchmark configuration.
pub fn upper_choices() -> Result<Table, Failure> {
    let dirs: Vec<PrimitiveVector> = [
        [2i64, 4, 3],
        [5, 7, 1],
        [9, 8, 6],
        [0, 0, 1],
    ]
    .iter()
    .map(|c| PrimitiveVector::from_i64(c).expect("benchmark directions are primitive"))
    .collect();
    let choices: Vec<usize> = (0..dirs.len()).collect();
    let rows = choices
        .par_iter()
        .map(|&chosen| general_upper(&dirs, chosen))
        .collect::<Result<Vec<_>, Error>>()?;
    let best = best_general_upper(&dirs)?;

    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|b| {
            vec![
                b.chosen.to_string(),
                dirs[b.chosen].to_string(),
                b.functional.to_string(),
                b.multiplier_tet().to_string(),
                sig12(b.bound()),
            ]
        })
        .collect();
    let json_rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|b| {
            serde_json::json!({
                "chosen": b.chosen,
                "direction": dirs[b.chosen].to_string(),
                "crossings": big_value(&b.functional),
                "multiplier_tet": big_value(&b.multiplier_tet()),
                "upper": b.bound(),
            })
        })
        .collect();
    Ok(Table {
        csv: csv_from_records(
            &["chosen", "direction", "crossings", "multiplier_tet", "upper"],
            &records,
        ),
        json: serde_json::json!({
            "rows": json_rows,
            "best": { "chosen": best.chosen, "crossings": big_value(&best.functional) },
        }),
    })
}

/// The (n,1)-slope family over the vertical rod: the crossing count grows
/// with n while the octahedral upper bound stays at four octahedra.
pub fn constant_upper(lo: i64, hi: i64) -> Result<Table, Failure> {
    let ns: Vec<i64> = (lo..=hi).collect();
    let rows = ns
        .par_iter()
        .map(|&n| -> Result<(i64, String, rodcomp::volbounds::VolumeBounds), Error> {
            let config = StackedConfig::standard(&[(n, 1), (0, 1)])?;
            let cfs = [
                ContinuedFraction::from_i64s(&[n])?,
                ContinuedFraction::from_i64s(&[0])?,
            ];
            let bounds = orthogonal_bounds(&config, &cfs)?;
            let pairs = [(n.into(), 1.into()), (0.into(), 1.into())];
            let crossings = intersection_functional(&pairs);
            Ok((n, crossings.to_string(), bounds))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|(n, crossings, b)| {
            vec![
                n.to_string(),
                crossings.clone(),
                b.sum_m.map_or(String::from("-"), |s| s.to_string()),
                b.multiplier_oct.as_ref().map_or(String::from("-"), |m| m.to_string()),
                sig12(b.upper),
                sig12(b.lower),
                method_text(&b.lower_method),
            ]
        })
        .collect();
    let json_rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|(n, crossings, b)| {
            serde_json::json!({
                "n": n,
                "crossings": crossings,
                "bounds": b,
            })
        })
        .collect();
    Ok(Table {
        csv: csv_from_records(
            &["n", "crossings", "sum_m", "multiplier_oct", "upper", "lower", "lower_method"],
            &records,
        ),
        json: serde_json::json!({ "rows": json_rows }),
    })
}

/// The k-term constant family `[k; k, ..., k]` over the vertical rod: the
/// octahedral lower bound grows linearly in k.
pub fn growing_lower(lo: i64, hi: i64) -> Result<Table, Failure> {
    let ks: Vec<i64> = (lo..=hi).collect();
    let rows = ks
        .par_iter()
        .map(|&k| -> Result<(i64, Rational, rodcomp::volbounds::VolumeBounds), Error> {
            let family = ContinuedFraction::constant_family(k as u32);
            let value = eval_cf(&family);
            let horizontal = vec![
                (
                    value.numer().clone(),
                    value.denom().clone(),
                    Rational::from_i64(2, 3)?,
                ),
                (0.into(), 1.into(), Rational::from_i64(1, 3)?),
            ];
            let half = Rational::from_i64(1, 2)?;
            let config = StackedConfig::new(horizontal, vec![(half.clone(), half)])?;
            let bounds = orthogonal_bounds(&config, &[family, ContinuedFraction::from_i64s(&[0])?])?;
            Ok((k, value, bounds))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|(k, value, b)| {
            let per_term = b.sum_m.map_or(String::from("-"), |s| sig12(b.lower / s as f64));
            vec![
                k.to_string(),
                value.to_string(),
                b.sum_m.map_or(String::from("-"), |s| s.to_string()),
                b.c.as_ref().map_or(String::from("-"), |c| c.to_string()),
                sig12(b.upper),
                sig12(b.lower),
                per_term,
                method_text(&b.lower_method),
            ]
        })
        .collect();
    let json_rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|(k, value, b)| {
            serde_json::json!({
                "k": k,
                "value": value.to_string(),
                "bounds": b,
            })
        })
        .collect();
    Ok(Table {
        csv: csv_from_records(
            &["k", "value", "sum_m", "C", "upper", "lower", "per_term", "lower_method"],
            &records,
        ),
        json: serde_json::json!({ "rows": json_rows }),
    })
}
