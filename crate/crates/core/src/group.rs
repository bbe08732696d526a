//! Totally ordered abelian groups and the extended truth-value carrier.
//!
//! Groups are written multiplicatively. Two exact backends are provided:
//!
//! - [`Backend::Rat`]: the positive rationals under multiplication, a standard
//!   (archimedean) group.
//! - [`Backend::Lex2`]: pairs of positive rationals with componentwise
//!   multiplication and the lexicographic order, a non-archimedean group.
//!
//! [`TruthValue`] adjoins an absolute falsity `0` below and an absolute truth
//! `inf` above the group. Multiplication is extended by the table
//!
//! | `*`   | `0` | `h`   | `inf` |
//! |-------|-----|-------|-------|
//! | `0`   | `0` | `0`   | `1`   |
//! | `g`   | `0` | `g*h` | `inf` |
//! | `inf` | `1` | `inf` | `inf` |
//!
//! Note that the extended operation is not associative on the whole carrier:
//! `(0 * inf) * g = g` while `0 * (inf * g) = 1`. Associativity holds inside the
//! group only; the table is implemented exactly as stated.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("backend mismatch: {left} vs {right}")]
    BackendMismatch { left: Backend, right: Backend },
    #[error("group elements must be strictly positive, got {0}")]
    NonPositive(String),
    #[error("invalid truth value `{0}`")]
    Parse(String),
}

/// Identifies one of the exact group implementations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Rat,
    Lex2,
}

impl Backend {
    pub fn identity(self) -> GroupElem {
        match self {
            Backend::Rat => GroupElem(Repr::Rat(BigRational::one())),
            Backend::Lex2 => GroupElem(Repr::Lex2(BigRational::one(), BigRational::one())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Rat => "rat",
            Backend::Lex2 => "lex2",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rat" => Ok(Backend::Rat),
            "lex2" => Ok(Backend::Lex2),
            other => Err(GroupError::Parse(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Rat(BigRational),
    Lex2(BigRational, BigRational),
}

/// An element of one of the group backends.
///
/// Payloads are always strictly positive; `BigRational` keeps them in lowest
/// terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElem(Repr);

fn check_positive(r: &BigRational) -> Result<(), GroupError> {
    if r.is_positive() {
        Ok(())
    } else {
        Err(GroupError::NonPositive(r.to_string()))
    }
}

impl GroupElem {
    pub fn rat(value: BigRational) -> Result<Self, GroupError> {
        check_positive(&value)?;
        Ok(GroupElem(Repr::Rat(value)))
    }

    pub fn lex2(first: BigRational, second: BigRational) -> Result<Self, GroupError> {
        check_positive(&first)?;
        check_positive(&second)?;
        Ok(GroupElem(Repr::Lex2(first, second)))
    }

    /// Shorthand for the rational `numer/denom`.
    pub fn ratio(numer: i64, denom: i64) -> Result<Self, GroupError> {
        if denom == 0 {
            return Err(GroupError::Parse(format!("{numer}/0")));
        }
        Self::rat(BigRational::new(numer.into(), denom.into()))
    }

    /// `2^k` in the rational backend.
    pub fn power_of_two(k: &BigInt) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        let value = if k.is_negative() {
            Pow::pow(two, (-k).magnitude().clone()).recip()
        } else {
            Pow::pow(two, k.magnitude().clone())
        };
        GroupElem(Repr::Rat(value))
    }

    pub fn backend(&self) -> Backend {
        match self.0 {
            Repr::Rat(_) => Backend::Rat,
            Repr::Lex2(..) => Backend::Lex2,
        }
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(r) => Some(r),
            Repr::Lex2(..) => None,
        }
    }

    pub fn as_lex2(&self) -> Option<(&BigRational, &BigRational)> {
        match &self.0 {
            Repr::Lex2(a, b) => Some((a, b)),
            Repr::Rat(_) => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.0 {
            Repr::Rat(r) => r.is_one(),
            Repr::Lex2(a, b) => a.is_one() && b.is_one(),
        }
    }

    fn same_backend(&self, other: &GroupElem) -> Result<(), GroupError> {
        if self.backend() == other.backend() {
            Ok(())
        } else {
            Err(GroupError::BackendMismatch {
                left: self.backend(),
                right: other.backend(),
            })
        }
    }

    pub fn mul(&self, other: &GroupElem) -> Result<GroupElem, GroupError> {
        self.same_backend(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => GroupElem(Repr::Rat(a * b)),
            (Repr::Lex2(a1, a2), Repr::Lex2(b1, b2)) => GroupElem(Repr::Lex2(a1 * b1, a2 * b2)),
            _ => unreachable!("backends checked"),
        })
    }

    pub fn inv(&self) -> GroupElem {
        match &self.0 {
            Repr::Rat(a) => GroupElem(Repr::Rat(a.recip())),
            Repr::Lex2(a, b) => GroupElem(Repr::Lex2(a.recip(), b.recip())),
        }
    }

    /// `self^n` for any integer `n` (negative powers invert).
    pub fn pow(&self, n: i64) -> GroupElem {
        let e = n.unsigned_abs();
        let raised = match &self.0 {
            Repr::Rat(a) => GroupElem(Repr::Rat(Pow::pow(a, e))),
            Repr::Lex2(a, b) => GroupElem(Repr::Lex2(Pow::pow(a, e), Pow::pow(b, e))),
        };
        if n < 0 {
            raised.inv()
        } else {
            raised
        }
    }

    /// Group order; errors on mixed backends.
    pub fn compare(&self, other: &GroupElem) -> Result<Ordering, GroupError> {
        self.same_backend(other)?;
        Ok(self.cmp(other))
    }
}

/// Structural total order: backend tag first, then the group order. Within a
/// single backend this is exactly the group's order.
impl Ord for GroupElem {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => a.cmp(b),
            (Repr::Lex2(a1, a2), Repr::Lex2(b1, b2)) => a1.cmp(b1).then_with(|| a2.cmp(b2)),
            (Repr::Rat(_), Repr::Lex2(..)) => Ordering::Less,
            (Repr::Lex2(..), Repr::Rat(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for GroupElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(a) => fmt_rational(a, f),
            Repr::Lex2(a, b) => {
                f.write_str("(")?;
                fmt_rational(a, f)?;
                f.write_str(", ")?;
                fmt_rational(b, f)?;
                f.write_str(")")
            }
        }
    }
}

/// A truth value in `{0} ∪ G ∪ {inf}`.
///
/// The derived order puts `Zero` below every group element and `Inf` above.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruthValue {
    Zero,
    Elem(GroupElem),
    Inf,
}

impl TruthValue {
    pub fn one(backend: Backend) -> TruthValue {
        TruthValue::Elem(backend.identity())
    }

    pub fn ratio(numer: i64, denom: i64) -> Result<TruthValue, GroupError> {
        GroupElem::ratio(numer, denom).map(TruthValue::Elem)
    }

    pub fn backend(&self) -> Option<Backend> {
        match self {
            TruthValue::Elem(g) => Some(g.backend()),
            _ => None,
        }
    }

    pub fn as_elem(&self) -> Option<&GroupElem> {
        match self {
            TruthValue::Elem(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, TruthValue::Inf)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TruthValue::Zero)
    }

    /// Parses the textual value syntax: `0`, `inf`, `p/q` or `p` (rat),
    /// `(p/q, r/s)` (lex2).
    pub fn parse(text: &str) -> Result<TruthValue, GroupError> {
        let s = text.trim();
        match s {
            "0" => return Ok(TruthValue::Zero),
            "inf" => return Ok(TruthValue::Inf),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| GroupError::Parse(s.to_string()))?;
            let a = parse_rational(a.trim()).ok_or_else(|| GroupError::Parse(s.to_string()))?;
            let b = parse_rational(b.trim()).ok_or_else(|| GroupError::Parse(s.to_string()))?;
            return GroupElem::lex2(a, b).map(TruthValue::Elem);
        }
        let r = parse_rational(s).ok_or_else(|| GroupError::Parse(s.to_string()))?;
        GroupElem::rat(r).map(TruthValue::Elem)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let valid = |t: &str| !t.is_empty() && t.bytes().all(|c| c.is_ascii_digit());
    match s.split_once('/') {
        Some((n, d)) => {
            if !valid(n) || !valid(d) {
                return None;
            }
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.parse().ok()?, d))
        }
        None if valid(s) => Some(BigRational::from_integer(s.parse().ok()?)),
        None => None,
    }
}

impl FromStr for TruthValue {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TruthValue::parse(s)
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruthValue::Zero => f.write_str("0"),
            TruthValue::Inf => f.write_str("inf"),
            TruthValue::Elem(g) => g.fmt(f),
        }
    }
}

fn check_pair(a: &TruthValue, b: &TruthValue) -> Result<(), GroupError> {
    match (a.backend(), b.backend()) {
        (Some(l), Some(r)) if l != r => Err(GroupError::BackendMismatch { left: l, right: r }),
        _ => Ok(()),
    }
}

/// Extended multiplication. `backend` supplies the identity for `0 * inf`.
pub fn tv_mul(a: &TruthValue, b: &TruthValue, backend: Backend) -> Result<TruthValue, GroupError> {
    use TruthValue::*;
    check_pair(a, b)?;
    for v in [a, b] {
        if let Some(got) = v.backend() {
            if got != backend {
                return Err(GroupError::BackendMismatch {
                    left: backend,
                    right: got,
                });
            }
        }
    }
    Ok(match (a, b) {
        (Elem(x), Elem(y)) => Elem(x.mul(y)?),
        (Inf, Zero) | (Zero, Inf) => TruthValue::one(backend),
        (Zero, _) | (_, Zero) => Zero,
        (Inf, _) | (_, Inf) => Inf,
    })
}

pub fn tv_inv(a: &TruthValue) -> TruthValue {
    match a {
        TruthValue::Zero => TruthValue::Inf,
        TruthValue::Inf => TruthValue::Zero,
        TruthValue::Elem(g) => TruthValue::Elem(g.inv()),
    }
}

/// `a^n` for `n >= 1`, equal to the left-nested product `a * a * ... * a`.
pub fn tv_pow(a: &TruthValue, n: u32) -> TruthValue {
    match a {
        TruthValue::Elem(g) if n > 0 => TruthValue::Elem(g.pow(n as i64)),
        other => other.clone(),
    }
}

pub fn tv_compare(a: &TruthValue, b: &TruthValue) -> Result<Ordering, GroupError> {
    check_pair(a, b)?;
    Ok(a.cmp(b))
}

pub fn tv_min(a: &TruthValue, b: &TruthValue) -> Result<TruthValue, GroupError> {
    Ok(if tv_compare(a, b)?.is_le() {
        a.clone()
    } else {
        b.clone()
    })
}

pub fn tv_max(a: &TruthValue, b: &TruthValue) -> Result<TruthValue, GroupError> {
    Ok(if tv_compare(a, b)?.is_ge() {
        a.clone()
    } else {
        b.clone()
    })
}

/// Goedel residuum: `inf` if `a <= b`, else `b`.
pub fn tv_resid(a: &TruthValue, b: &TruthValue) -> Result<TruthValue, GroupError> {
    Ok(if tv_compare(a, b)?.is_le() {
        TruthValue::Inf
    } else {
        b.clone()
    })
}

/// `inf` if `a = b`, else `min(a, b)`.
pub fn tv_dmin(a: &TruthValue, b: &TruthValue) -> Result<TruthValue, GroupError> {
    Ok(match tv_compare(a, b)? {
        Ordering::Equal => TruthValue::Inf,
        Ordering::Less => a.clone(),
        Ordering::Greater => b.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> TruthValue {
        TruthValue::ratio(n, d).unwrap()
    }

    fn lex(a: i64, b: i64) -> TruthValue {
        TruthValue::Elem(
            GroupElem::lex2(
                BigRational::from_integer(a.into()),
                BigRational::from_integer(b.into()),
            )
            .unwrap(),
        )
    }

    #[test]
    fn mul_examples() {
        let rat = Backend::Rat;
        assert_eq!(tv_mul(&r(2, 1), &r(3, 1), rat).unwrap(), r(6, 1));
        assert_eq!(
            tv_mul(&TruthValue::Inf, &TruthValue::Zero, rat).unwrap(),
            r(1, 1)
        );
        assert_eq!(
            tv_mul(&r(5, 1), &TruthValue::Inf, rat).unwrap(),
            TruthValue::Inf
        );
    }

    #[test]
    fn inv_examples() {
        assert_eq!(tv_inv(&TruthValue::Zero), TruthValue::Inf);
        assert_eq!(tv_inv(&r(2, 1)), r(1, 2));
        assert_eq!(tv_inv(&TruthValue::Inf), TruthValue::Zero);
    }

    #[test]
    fn resid_and_dmin_examples() {
        assert_eq!(tv_resid(&r(3, 1), &r(2, 1)).unwrap(), r(2, 1));
        assert_eq!(
            tv_resid(&TruthValue::Zero, &TruthValue::Zero).unwrap(),
            TruthValue::Inf
        );
        assert_eq!(tv_resid(&TruthValue::Inf, &r(7, 1)).unwrap(), r(7, 1));
        assert_eq!(tv_dmin(&r(2, 1), &r(2, 1)).unwrap(), TruthValue::Inf);
        assert_eq!(tv_dmin(&r(2, 1), &r(3, 1)).unwrap(), r(2, 1));
        assert_eq!(
            tv_dmin(&TruthValue::Zero, &TruthValue::Inf).unwrap(),
            TruthValue::Zero
        );
    }

    #[test]
    fn mixed_backends_are_rejected() {
        let err = tv_mul(&r(2, 1), &lex(1, 2), Backend::Rat).unwrap_err();
        assert!(matches!(err, GroupError::BackendMismatch { .. }));
        assert!(tv_compare(&r(2, 1), &lex(1, 2)).is_err());
        assert!(tv_mul(&r(2, 1), &TruthValue::Inf, Backend::Lex2).is_err());
        // strata carry no backend
        assert!(tv_compare(&TruthValue::Zero, &lex(1, 2)).is_ok());
    }

    #[test]
    fn extension_breaks_associativity_at_the_strata() {
        let g = r(3, 1);
        let rat = Backend::Rat;
        let left = tv_mul(
            &tv_mul(&TruthValue::Zero, &TruthValue::Inf, rat).unwrap(),
            &g,
            rat,
        )
        .unwrap();
        let right = tv_mul(
            &TruthValue::Zero,
            &tv_mul(&TruthValue::Inf, &g, rat).unwrap(),
            rat,
        )
        .unwrap();
        assert_eq!(left, g);
        assert_eq!(right, r(1, 1));
    }

    #[test]
    fn lex_order_is_lexicographic() {
        assert!(lex(1, 100) < lex(2, 1));
        assert!(lex(2, 1) < lex(2, 3));
        assert_eq!(
            tv_mul(&lex(1, 2), &lex(3, 5), Backend::Lex2).unwrap(),
            lex(3, 10)
        );
    }

    #[test]
    fn parse_and_display() {
        for text in ["0", "inf", "3/2", "7", "(1/2, 3)"] {
            let v = TruthValue::parse(text).unwrap();
            assert_eq!(v.to_string(), text);
        }
        assert_eq!(TruthValue::parse("4/2").unwrap(), r(2, 1));
        assert_eq!(
            TruthValue::parse(" ( 1 , 2/4 ) ").unwrap().to_string(),
            "(1, 1/2)"
        );
        for bad in ["", "-1", "0/1", "1/0", "x", "(1,0)", "(1 2)", "1.5"] {
            assert!(TruthValue::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn pow_matches_repeated_product() {
        let g = r(2, 3);
        let mut acc = g.clone();
        for n in 2..6 {
            acc = tv_mul(&acc, &g, Backend::Rat).unwrap();
            assert_eq!(tv_pow(&g, n), acc);
        }
        assert_eq!(tv_pow(&TruthValue::Zero, 4), TruthValue::Zero);
        assert_eq!(
            GroupElem::power_of_two(&BigInt::from(-3)).to_string(),
            "1/8"
        );
    }
}
