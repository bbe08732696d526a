use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::family::{assignment_index, family_with_last_level, formula_family, FamilyConfig, Member};
use super::subgroup::{coprime_basis, factor_over};
use super::ModelTheoryError;
use crate::group::{GroupElem, TruthValue};
use crate::semantics::{tuples, Structure, StructureBuilder};
use crate::syntax::{Formula, Signature};

/// The value map `T` of an embedding candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueMap {
    Identity,
    /// `g |-> g^r` for a rational `r > 0`, componentwise in LEX2.
    Power(BigRational),
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    (Pow::pow(&r, k) == *n).then_some(r)
}

fn rational_power(q: &BigRational, r: &BigRational) -> Option<BigRational> {
    let a = r.numer().to_u32()?;
    let b = r.denom().to_u32()?;
    let raised = Pow::pow(q, a);
    Some(BigRational::new(
        exact_root(raised.numer(), b)?,
        exact_root(raised.denom(), b)?,
    ))
}

impl ValueMap {
    /// `None` when `T` is undefined at `v` (no exact rational root).
    pub fn apply(&self, v: &TruthValue) -> Option<TruthValue> {
        let ValueMap::Power(r) = self else {
            return Some(v.clone());
        };
        let TruthValue::Elem(g) = v else {
            return Some(v.clone());
        };
        let g = match (g.as_rat(), g.as_lex2()) {
            (Some(q), _) => GroupElem::rat(rational_power(q, r)?).ok()?,
            (_, Some((a, b))) => {
                GroupElem::lex2(rational_power(a, r)?, rational_power(b, r)?).ok()?
            }
            _ => return None,
        };
        Some(TruthValue::Elem(g))
    }

    pub fn inverse(&self) -> ValueMap {
        match self {
            ValueMap::Identity => ValueMap::Identity,
            ValueMap::Power(r) => ValueMap::Power(r.recip()),
        }
    }
}

impl fmt::Display for ValueMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueMap::Identity => f.write_str("identity"),
            ValueMap::Power(r) => write!(f, "g^{r}"),
        }
    }
}

/// An injection `h` of universes (by index) and a value map `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingCandidate {
    pub h: Vec<usize>,
    pub t: ValueMap,
}

impl EmbeddingCandidate {
    pub fn identity(size: usize) -> Self {
        EmbeddingCandidate {
            h: (0..size).collect(),
            t: ValueMap::Identity,
        }
    }

    pub fn describe(&self, m: &Structure, n: &Structure) -> String {
        let pairs: Vec<String> = self
            .h
            .iter()
            .enumerate()
            .map(|(a, &b)| format!("{}->{}", m.element_name(a), n.element_name(b)))
            .collect();
        format!("h: {}; T: {}", pairs.join(", "), self.t)
    }
}

fn same_signature(a: &Signature, b: &Signature) -> bool {
    let preds = |s: &Signature| {
        s.predicates()
            .map(|(p, k)| (p.to_string(), k))
            .collect::<BTreeSet<_>>()
    };
    let funcs = |s: &Signature| {
        s.functions()
            .map(|(p, k)| (p.to_string(), k))
            .collect::<BTreeSet<_>>()
    };
    preds(a) == preds(b) && funcs(a) == funcs(b)
}

fn require_same_signature(m: &Structure, n: &Structure) -> Result<(), ModelTheoryError> {
    if same_signature(m.signature(), n.signature()) {
        Ok(())
    } else {
        Err(ModelTheoryError::SignatureMismatch)
    }
}

fn functions_commute(m: &Structure, n: &Structure, h: &[usize]) -> bool {
    m.signature().functions().all(|(f, arity)| {
        tuples(m.size(), arity).all(|t| {
            let image: Vec<usize> = t.iter().map(|&a| h[a]).collect();
            m.function_value(f, &t).map(|v| h[v]) == n.function_value(f, &image)
        })
    })
}

fn transports(
    family: &[Member],
    m: &Structure,
    n: &Structure,
    cand: &EmbeddingCandidate,
    vars: usize,
) -> bool {
    let (sm, sn) = (m.size(), n.size());
    let images: Vec<usize> = tuples(sm, vars)
        .map(|t| {
            let image: Vec<usize> = t.iter().map(|&a| cand.h[a]).collect();
            (assignment_index(&t, sm), assignment_index(&image, sn))
        })
        .fold(vec![0; sm.pow(vars as u32)], |mut acc, (i, j)| {
            acc[i] = j;
            acc
        });
    family.iter().all(|member| {
        member.tables[0]
            .iter()
            .zip(&images)
            .all(|(v, &j)| cand.t.apply(v).as_ref() == Some(&member.tables[1][j]))
    })
}

fn valid_injection(h: &[usize], m: &Structure, n: &Structure) -> bool {
    h.len() == m.size()
        && h.iter().all(|&b| b < n.size())
        && h.iter().collect::<BTreeSet<_>>().len() == h.len()
}

/// Checks that `h` is injective and commutes with the function symbols, and
/// that `T(phi^M(a)) = phi^N(h(a))` for every formula of nesting depth at
/// most `depth` over `x1 .. xk` (see [`FamilyConfig::new`]).
pub fn check_embedding(
    m: &Structure,
    n: &Structure,
    cand: &EmbeddingCandidate,
    depth: usize,
) -> Result<bool, ModelTheoryError> {
    require_same_signature(m, n)?;
    if m.backend() != n.backend()
        || !valid_injection(&cand.h, m, n)
        || !functions_commute(m, n, &cand.h)
    {
        return Ok(false);
    }
    let config = FamilyConfig::new(m.signature(), depth);
    let family = formula_family(m.signature(), &[m, n], &config)?;
    Ok(transports(&family, m, n, cand, config.vars))
}

fn exponent_ratio(g: &BigRational, h: &BigRational) -> Option<BigRational> {
    let numbers = [
        g.numer().abs(),
        g.denom().clone(),
        h.numer().abs(),
        h.denom().clone(),
    ];
    let basis = coprime_basis(&numbers);
    let u = factor_over(&basis, g)?;
    let v = factor_over(&basis, h)?;
    let i = u.iter().position(|x| !x.is_zero())?;
    let r = BigRational::new(v[i].clone(), u[i].clone());
    let consistent = u.iter().zip(&v).all(|(a, b)| {
        BigRational::from_integer(a.clone()) * &r == BigRational::from_integer(b.clone())
    });
    (consistent && r.is_positive()).then_some(r)
}

/// `T` fixed by the first atomic pair whose source value is not `1`, or
/// `None` when strata disagree or no exponent scaling fits.
fn derive_value_map(m: &Structure, n: &Structure, h: &[usize]) -> Option<ValueMap> {
    let mut ratio: Option<BigRational> = None;
    for (p, arity) in m.signature().predicates() {
        for t in tuples(m.size(), arity) {
            let image: Vec<usize> = t.iter().map(|&a| h[a]).collect();
            let a = m.predicate_value(p, &t)?;
            let b = n.predicate_value(p, &image)?;
            match (a, b) {
                (TruthValue::Zero, TruthValue::Zero) | (TruthValue::Inf, TruthValue::Inf) => {}
                (TruthValue::Elem(x), TruthValue::Elem(y)) => {
                    if ratio.is_none() && !x.is_identity() {
                        ratio = Some(match (x.as_rat(), y.as_rat(), x.as_lex2(), y.as_lex2()) {
                            (Some(x), Some(y), _, _) => exponent_ratio(x, y)?,
                            (_, _, Some((x1, x2)), Some((y1, y2))) => {
                                if x1.is_one() {
                                    exponent_ratio(x2, y2)?
                                } else {
                                    exponent_ratio(x1, y1)?
                                }
                            }
                            _ => return None,
                        });
                    }
                }
                _ => return None,
            }
        }
    }
    Some(match ratio {
        Some(r) if !r.is_one() => ValueMap::Power(r),
        _ => ValueMap::Identity,
    })
}

fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..n {
            if !used[b] {
                used[b] = true;
                cur.push(b);
                go(k, n, cur, used, out);
                cur.pop();
                used[b] = false;
            }
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(k, n, &mut Vec::new(), &mut vec![false; n], &mut out);
    }
    out
}

/// All candidates `(h, T)` passing [`check_embedding`] at `depth`, with `h`
/// in lexicographic order and `T` read off the atomic values.
pub fn search_embeddings(
    m: &Structure,
    n: &Structure,
    depth: usize,
) -> Result<Vec<EmbeddingCandidate>, ModelTheoryError> {
    require_same_signature(m, n)?;
    if m.size() > n.size() || m.backend() != n.backend() {
        return Ok(Vec::new());
    }
    let config = FamilyConfig::new(m.signature(), depth);
    let family = formula_family(m.signature(), &[m, n], &config)?;
    let mut out = Vec::new();
    for h in injections(m.size(), n.size()) {
        if !functions_commute(m, n, &h) {
            continue;
        }
        let Some(t) = derive_value_map(m, n, &h) else {
            continue;
        };
        let cand = EmbeddingCandidate { h, t };
        if transports(&family, m, n, &cand, config.vars) {
            out.push(cand);
        }
    }
    Ok(out)
}

/// First sentence of the depth-bounded family that one structure satisfies
/// and the other does not.
pub fn separating_sentence(
    m: &Structure,
    n: &Structure,
    depth: usize,
) -> Result<Option<Formula>, ModelTheoryError> {
    require_same_signature(m, n)?;
    let config = FamilyConfig::new(m.signature(), depth);
    let family = formula_family(m.signature(), &[m, n], &config)?;
    Ok(family
        .into_iter()
        .find(|s| s.is_sentence() && s.tables[0][0].is_inf() != s.tables[1][0].is_inf())
        .map(|s| s.formula))
}

/// Whether `m` and `n` satisfy the same sentences of nesting depth at most
/// `depth` over `x1 .. xk`.
pub fn bounded_elementary_equiv(
    m: &Structure,
    n: &Structure,
    depth: usize,
) -> Result<bool, ModelTheoryError> {
    Ok(separating_sentence(m, n, depth)?.is_none())
}

/// `m` expanded by a constant `c_a` naming each element `a` (underscores
/// are added until the names are fresh).
pub fn expand_with_constants(m: &Structure) -> Result<(Structure, Vec<String>), ModelTheoryError> {
    let sig = m.signature();
    let mut prefix = String::from("c_");
    let names = loop {
        let names: Vec<String> = m
            .universe()
            .iter()
            .map(|a| format!("{prefix}{a}"))
            .collect();
        if names.iter().all(|c| !sig.contains(c)) {
            break names;
        }
        prefix.push('_');
    };
    let internal = |e: crate::semantics::StructureError| ModelTheoryError::Internal(e.to_string());
    let mut b = StructureBuilder::new(m.backend(), m.universe()).map_err(internal)?;
    for (f, arity) in sig.functions() {
        b.declare_function(f, arity).map_err(internal)?;
        for t in tuples(m.size(), arity) {
            b.set_function_idx(f, &t, m.function_value(f, &t).expect("total"))
                .map_err(internal)?;
        }
    }
    for (i, c) in names.iter().enumerate() {
        b.declare_function(c, 0).map_err(internal)?;
        b.set_function_idx(c, &[], i).map_err(internal)?;
    }
    for (p, arity) in sig.predicates() {
        b.declare_predicate(p, arity).map_err(internal)?;
        for t in tuples(m.size(), arity) {
            b.set_predicate_idx(p, &t, m.predicate_value(p, &t).expect("total").clone())
                .map_err(internal)?;
        }
    }
    if let Some(e) = sig.equality() {
        b.set_equality(e).map_err(internal)?;
    }
    Ok((b.build().map_err(internal)?, names))
}

/// Sentences of the expanded language of nesting depth at most `depth`
/// that `m` satisfies. Below `depth` one representative of each class of
/// equal value is listed; the last connective or quantifier is applied to
/// these representatives in every way.
pub fn bounded_ediag(m: &Structure, depth: usize) -> Result<Vec<Formula>, ModelTheoryError> {
    let (expanded, _) = expand_with_constants(m)?;
    let sig = expanded.signature();
    let config = FamilyConfig::new(sig, depth);
    let family = family_with_last_level(sig, &[&expanded], &config)?;
    Ok(family
        .into_iter()
        .filter(|s| s.is_sentence() && s.tables[0][0].is_inf())
        .map(|s| s.formula)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(text: &str) -> Structure {
        Structure::parse(&format!("backend rat\n{text}")).unwrap()
    }

    #[test]
    fn identity_embeds() {
        let m = st("universe a b\npred P a = 2\npred P b = 1/3\n");
        assert!(check_embedding(&m, &m, &EmbeddingCandidate::identity(2), 2).unwrap());
    }

    #[test]
    fn squaring_transports() {
        let m = st("universe a\npred P = 2\n");
        let n = st("universe b\npred P = 4\n");
        let cand = EmbeddingCandidate {
            h: vec![0],
            t: ValueMap::Power(BigRational::from_integer(2.into())),
        };
        for d in 0..=2 {
            assert!(check_embedding(&m, &n, &cand, d).unwrap());
        }
        assert!(!check_embedding(&m, &n, &EmbeddingCandidate::identity(1), 0).unwrap());
        assert_eq!(search_embeddings(&m, &n, 2).unwrap(), vec![cand]);
    }

    #[test]
    fn order_clash_has_no_embedding() {
        let m = st("universe a\npred P = 2\npred Q = 3\n");
        let n = st("universe b\npred P = 3\npred Q = 2\n");
        assert!(search_embeddings(&m, &n, 1).unwrap().is_empty());
    }

    #[test]
    fn roots_are_exact() {
        let half = ValueMap::Power(BigRational::new(1.into(), 2.into()));
        assert_eq!(
            half.apply(&TruthValue::ratio(4, 9).unwrap()),
            Some(TruthValue::ratio(2, 3).unwrap())
        );
        assert_eq!(half.apply(&TruthValue::ratio(2, 1).unwrap()), None);
        assert_eq!(half.apply(&TruthValue::Inf), Some(TruthValue::Inf));
    }

    #[test]
    fn delta_separates() {
        let m = st("universe a\npred P = 2\n");
        let n = st("universe a\npred P = inf\n");
        assert!(!bounded_elementary_equiv(&m, &n, 1).unwrap());
        assert!(bounded_elementary_equiv(&m, &m, 2).unwrap());
    }

    #[test]
    fn ediag_contains_atoms() {
        let m = st("universe m\npred P m = inf\n");
        let d = bounded_ediag(&m, 0).unwrap();
        assert!(d.iter().any(|f| f.to_string() == "P(c_m)"), "{d:?}");
    }
}
