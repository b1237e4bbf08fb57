//! Continued fractions with signed integer terms.
//!
//! A continued fraction `[c1; c2, ..., cm]` is `c1 + 1/(c2 + 1/(...))`.
//! Terms after the first are nonzero; we never emit an expansion whose last
//! term is 1 when it has at least two terms (absorb it instead), although the
//! type accepts such a list for evaluation.  The empty continued fraction
//! `[]` denotes the formal infinity 1/0, which is a first-class value here:
//! it is the slope of an unfilled rod.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// An exact rational `p/q` in lowest terms with `q >= 0`.  The pair `(1, 0)`
/// is the formal infinity; `(0, 0)` is rejected.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::ZeroOverZero);
        }
        if den.is_zero() {
            return Ok(Rational { num: BigInt::one(), den });
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Ok(Rational { num, den })
    }

    pub fn from_i64(num: i64, den: i64) -> Result<Self> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_integer(n: BigInt) -> Self {
        Rational { num: n, den: BigInt::one() }
    }

    pub fn infinity() -> Self {
        Rational { num: BigInt::one(), den: BigInt::zero() }
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    /// `q/p` for `p/q`; swaps 0/1 and 1/0.
    pub fn reciprocal(&self) -> Self {
        Rational::new(self.den.clone(), self.num.clone())
            .expect("reciprocal of a valid rational is valid")
    }

    #[cfg(test)]
    fn add_integer(&self, n: &BigInt) -> Self {
        Rational::new(&self.num + n * &self.den, self.den.clone())
            .expect("integer shift of a valid rational is valid")
    }
}

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational::new(-self.num, self.den).expect("negation of a valid rational is valid")
    }
}

/// Finite values in the usual order; the formal infinity compares above
/// every finite value.
impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.num * &other.den).cmp(&(&other.num * &self.den)),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`, with an optional leading sign.
    fn from_str(s: &str) -> Result<Self> {
        let malformed = |detail: &str| Error::Malformed {
            what: "rational",
            detail: format!("{detail}: `{s}`"),
        };
        let t = s.trim();
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| malformed("bad numerator"))?;
        let q: BigInt = q.parse().map_err(|_| malformed("bad denominator"))?;
        Rational::new(p, q)
    }
}

/// A finite list of continued fraction terms.  Terms after the first are
/// nonzero; the list may be empty (the formal infinity).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    terms: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn new(terms: Vec<BigInt>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate().skip(1) {
            if t.is_zero() {
                return Err(Error::ZeroCfTerm(t.to_string(), i + 1));
            }
        }
        Ok(ContinuedFraction { terms })
    }

    pub fn from_i64s(terms: &[i64]) -> Result<Self> {
        Self::new(terms.iter().map(|&t| BigInt::from(t)).collect())
    }

    pub fn empty() -> Self {
        ContinuedFraction { terms: Vec::new() }
    }

    /// `k` copies of the term `k`, the fixed-shape family used for volume
    /// growth experiments.
    pub fn constant_family(k: u32) -> Self {
        ContinuedFraction {
            terms: vec![BigInt::from(k); k as usize],
        }
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading term, if any.
    pub fn head(&self) -> Option<&BigInt> {
        self.terms.first()
    }

    pub fn negated(&self) -> Self {
        ContinuedFraction {
            terms: self.terms.iter().map(|t| -t).collect(),
        }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.terms.split_first() {
            None => write!(f, "[]"),
            Some((head, [])) => write!(f, "[{head}]"),
            Some((head, tail)) => {
                let rest: Vec<String> = tail.iter().map(|t| t.to_string()).collect();
                write!(f, "[{head};{}]", rest.join(","))
            }
        }
    }
}

impl fmt::Debug for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;

    /// Accepts `[]`, `[c1]`, or `[c1;c2,...,cm]` with optional whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let malformed = |detail: &str| Error::Malformed {
            what: "continued fraction",
            detail: format!("{detail}: `{s}`"),
        };
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| malformed("expected [ ... ]"))?
            .trim();
        if inner.is_empty() {
            return Ok(ContinuedFraction::empty());
        }
        let (head, tail) = match inner.split_once(';') {
            Some((head, tail)) => (head, Some(tail)),
            None => (inner, None),
        };
        let mut terms = Vec::new();
        terms.push(
            head.trim()
                .parse::<BigInt>()
                .map_err(|_| malformed("bad leading term"))?,
        );
        if let Some(tail) = tail {
            for part in tail.split(',') {
                terms.push(
                    part.trim()
                        .parse::<BigInt>()
                        .map_err(|_| malformed("bad term"))?,
                );
            }
        }
        ContinuedFraction::new(terms)
    }
}

/// Evaluates a continued fraction by the convergent recurrence.  The
/// recurrence is division-free, so intermediate infinities need no special
/// cases; `[]` evaluates to the formal 1/0.
pub fn eval_cf(cf: &ContinuedFraction) -> Rational {
    let (mut h, mut k) = (BigInt::one(), BigInt::zero());
    let (mut hp, mut kp) = (BigInt::zero(), BigInt::one());
    for c in cf.terms() {
        let nh = c * &h + &hp;
        let nk = c * &k + &kp;
        hp = std::mem::replace(&mut h, nh);
        kp = std::mem::replace(&mut k, nk);
    }
    Rational::new(h, k).expect("convergents are coprime, never 0/0")
}

fn absorb_trailing_one(mut terms: Vec<BigInt>) -> Vec<BigInt> {
    if terms.len() >= 2 && terms.last().map_or(false, |t| t.is_one()) {
        terms.pop();
        let last = terms.last_mut().expect("nonempty after pop");
        *last += 1;
    }
    terms
}

/// Floor-based expansion: every term after the first is positive and the
/// last term is never 1 when there are at least two terms.  The formal
/// infinity expands to `[]`.
pub fn euclidean_cf(x: &Rational) -> ContinuedFraction {
    let (mut p, mut q) = (x.num.clone(), x.den.clone());
    let mut terms = Vec::new();
    while !q.is_zero() {
        let a = p.div_floor(&q);
        let r = &p - &a * &q;
        terms.push(a);
        p = std::mem::replace(&mut q, r);
    }
    ContinuedFraction::new(absorb_trailing_one(terms)).expect("floor quotients after the first are positive")
}

fn round_half_away(p: &BigInt, q: &BigInt) -> BigInt {
    if p.is_negative() {
        -round_half_away(&-p, q)
    } else {
        (BigInt::from(2) * p + q).div_floor(&(BigInt::from(2) * q))
    }
}

/// Nearest-integer expansion, ties rounded away from zero.  Every term after
/// the first has absolute value at least 2.  The formal infinity expands to
/// `[]`.
pub fn nicf(x: &Rational) -> ContinuedFraction {
    let (mut p, mut q) = (x.num.clone(), x.den.clone());
    let mut terms = Vec::new();
    while !q.is_zero() {
        let a = round_half_away(&p, &q);
        let mut r = &p - &a * &q;
        terms.push(a);
        p = std::mem::replace(&mut q, r.clone());
        if r.is_negative() {
            p = -p;
            r = -r;
            q = r;
        }
    }
    ContinuedFraction::new(terms).expect("nearest-integer remainders keep terms nonzero")
}

const SEARCH_NODE_BUDGET: u64 = 4_000_000;

struct MinimalSearch {
    bound: BigInt,
    window: Vec<BigInt>,
    failed: HashSet<(BigInt, BigInt, usize)>,
    nodes: u64,
}

impl MinimalSearch {
    fn new(bound: BigInt, max_len: usize) -> Self {
        // window[r] bounds the denominator of a state that must be consumed
        // by r further terms: continuants of r - 1 bounded terms.
        let mut window = vec![BigInt::one(); max_len + 1];
        for r in 2..=max_len {
            window[r] = &window[r - 1] * (&bound + 1);
        }
        MinimalSearch {
            bound,
            window,
            failed: HashSet::new(),
            nodes: 0,
        }
    }

    fn spend(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > SEARCH_NODE_BUDGET {
            return Err(Error::SearchBudgetExceeded);
        }
        Ok(())
    }

    /// Expands the state `a/b` (with `b > 0`) into exactly `remaining` terms
    /// starting at position `pos`.  Returns the terms in order, or None.
    fn dfs(
        &mut self,
        a: &BigInt,
        b: &BigInt,
        pos: usize,
        remaining: usize,
    ) -> Result<Option<Vec<BigInt>>> {
        self.spend()?;
        if remaining == 1 {
            if !(a % b).is_zero() {
                return Ok(None);
            }
            let c = a / b;
            if pos > 1 && (c.is_one() || c.abs() > self.bound) {
                return Ok(None);
            }
            return Ok(Some(vec![c]));
        }
        let key = (a.clone(), b.clone(), remaining);
        if self.failed.contains(&key) {
            return Ok(None);
        }
        let w = &self.window[remaining - 1];
        let lo = a - w;
        let mut c = lo.div_floor(b) + i32::from(!lo.mod_floor(b).is_zero());
        let c_hi = (a + w).div_floor(b);
        while c <= c_hi {
            self.spend()?;
            let admissible = pos == 1 || (!c.is_zero() && c.abs() <= self.bound);
            if admissible {
                let r = a - &c * b;
                if !r.is_zero() {
                    let (na, nb) = if r.is_negative() { (-b, -r) } else { (b.clone(), r) };
                    if let Some(mut tail) = self.dfs(&na, &nb, pos + 1, remaining - 1)? {
                        let mut terms = vec![c];
                        terms.append(&mut tail);
                        return Ok(Some(terms));
                    }
                }
            }
            c += 1;
        }
        self.failed.insert(key);
        Ok(None)
    }
}

/// Shortest expansion of `x` whose terms after the first are bounded by
/// `bound` in absolute value, found by exhaustive search over lengths.
///
/// The search is capped at the length of the floor or nearest-integer
/// expansion (whichever is admissible and shorter); if nothing is found
/// within the cap the bound is reported as too small rather than guessing.
pub fn minimal_cf(x: &Rational, bound: &BigInt) -> Result<ContinuedFraction> {
    if x.is_infinite() {
        return Ok(ContinuedFraction::empty());
    }
    let admissible = |cf: &ContinuedFraction| cf.terms()[1..].iter().all(|t| t.abs() <= *bound);
    let eu = euclidean_cf(x);
    let ni = nicf(x);
    let cap = match (admissible(&eu), admissible(&ni)) {
        (true, true) => eu.len().min(ni.len()),
        (true, false) => eu.len(),
        (false, true) => ni.len(),
        (false, false) => eu.len().max(ni.len()),
    };
    let mut search = MinimalSearch::new(bound.clone(), cap.max(1));
    for len in 1..=cap {
        if let Some(terms) = search.dfs(&x.num, &x.den, 1, len)? {
            return ContinuedFraction::new(terms);
        }
    }
    Err(Error::BoundTooSmall {
        bound: bound.to_string(),
        max_len: cap,
    })
}

/// `minimal_cf` with the default bound `max(|p|, q)`, which always admits
/// the floor expansion.
pub fn minimal_cf_default(x: &Rational) -> Result<ContinuedFraction> {
    let bound = x.num.abs().max(x.den.clone());
    minimal_cf(x, &bound)
}
