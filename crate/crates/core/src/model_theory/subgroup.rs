use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ModelTheoryError;
use crate::group::{GroupElem, TruthValue};
use crate::semantics::Structure;

/// Refines `numbers` (all > 1) into pairwise coprime integers > 1 such that
/// every input is a product of powers of them.
pub fn coprime_basis(numbers: &[BigInt]) -> Vec<BigInt> {
    let mut basis: Vec<BigInt> = numbers
        .iter()
        .filter(|n| **n > BigInt::one())
        .cloned()
        .collect();
    basis.sort();
    basis.dedup();
    'outer: loop {
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let g = basis[i].gcd(&basis[j]);
                if g.is_one() {
                    continue;
                }
                let a = &basis[i] / &g;
                let b = &basis[j] / &g;
                basis.swap_remove(j);
                basis.swap_remove(i);
                basis.extend([a, b, g].into_iter().filter(|x| *x > BigInt::one()));
                basis.sort();
                basis.dedup();
                continue 'outer;
            }
        }
        return basis;
    }
}

fn valuation(n: &mut BigInt, b: &BigInt) -> BigInt {
    let mut k = BigInt::zero();
    loop {
        let (q, r) = n.div_rem(b);
        if !r.is_zero() {
            return k;
        }
        *n = q;
        k += 1;
    }
}

/// Exponents of `q` over a coprime basis, or `None` when `q` is not a
/// product of powers of basis elements.
pub fn factor_over(basis: &[BigInt], q: &BigRational) -> Option<Vec<BigInt>> {
    let mut num = q.numer().abs();
    let mut den = q.denom().clone();
    let v: Vec<BigInt> = basis
        .iter()
        .map(|b| valuation(&mut num, b) - valuation(&mut den, b))
        .collect();
    (num.is_one() && den.is_one()).then_some(v)
}

fn rat_of(g: &GroupElem) -> Result<&BigRational, ModelTheoryError> {
    g.as_rat()
        .ok_or_else(|| ModelTheoryError::Unsupported("generated subgroups of LEX2 values".into()))
}

/// A finitely generated subgroup of the positive rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSubgroup {
    generators: Vec<BigRational>,
    basis: Vec<BigInt>,
    /// Echelon rows spanning the exponent lattice of the generators.
    rows: Vec<Vec<BigInt>>,
}

fn echelon(mut rows: Vec<Vec<BigInt>>, width: usize) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    for col in 0..width {
        loop {
            rows.retain(|r| r.iter().any(|x| !x.is_zero()));
            let with: Vec<usize> = (0..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .collect();
            if with.len() <= 1 {
                if let Some(&i) = with.first() {
                    let mut r = rows.swap_remove(i);
                    if r[col].is_negative() {
                        r.iter_mut().for_each(|x| *x = -&*x);
                    }
                    out.push(r);
                }
                break;
            }
            let p = *with
                .iter()
                .min_by_key(|&&i| rows[i][col].abs())
                .expect("nonempty");
            let pivot = rows[p].clone();
            for &i in &with {
                if i != p {
                    let q = rows[i][col].div_floor(&pivot[col]);
                    for (x, y) in rows[i].iter_mut().zip(&pivot) {
                        *x -= &q * y;
                    }
                }
            }
        }
    }
    out
}

impl GeneratedSubgroup {
    pub fn new(generators: &[GroupElem]) -> Result<Self, ModelTheoryError> {
        let gens: Vec<BigRational> = generators
            .iter()
            .map(|g| rat_of(g).cloned())
            .collect::<Result<_, _>>()?;
        let mut numbers = Vec::new();
        for g in &gens {
            numbers.push(g.numer().abs());
            numbers.push(g.denom().clone());
        }
        let basis = coprime_basis(&numbers);
        let vectors = gens
            .iter()
            .map(|g| factor_over(&basis, g).expect("basis covers generators"))
            .collect();
        let rows = echelon(vectors, basis.len());
        Ok(GeneratedSubgroup {
            generators: gens,
            basis,
            rows,
        })
    }

    /// Parses `2, 3, 1/2`.
    pub fn parse(text: &str) -> Result<Self, ModelTheoryError> {
        let mut gens = Vec::new();
        for s in text.split(',') {
            match TruthValue::parse(s).map_err(ModelTheoryError::Group)? {
                TruthValue::Elem(g) => gens.push(g),
                other => {
                    return Err(ModelTheoryError::Unsupported(format!(
                        "generator {other} is not a group element"
                    )))
                }
            }
        }
        Self::new(&gens)
    }

    pub fn generators(&self) -> &[BigRational] {
        &self.generators
    }

    /// Rank of the subgroup (it is free abelian).
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn member(&self, g: &GroupElem) -> Result<bool, ModelTheoryError> {
        let Some(mut v) = factor_over(&self.basis, rat_of(g)?) else {
            return Ok(false);
        };
        let mut rows = self.rows.iter().peekable();
        for col in 0..self.basis.len() {
            match rows.peek() {
                Some(r) if !r[col].is_zero() => {
                    let r = rows.next().expect("peeked");
                    let (q, rem) = v[col].div_rem(&r[col]);
                    if !rem.is_zero() {
                        return Ok(false);
                    }
                    for (x, y) in v.iter_mut().zip(r) {
                        *x -= &q * y;
                    }
                }
                _ => {
                    if !v[col].is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn contains(&self, other: &GeneratedSubgroup) -> Result<bool, ModelTheoryError> {
        for g in &other.generators {
            if !self.member(&GroupElem::rat(g.clone()).expect("positive"))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The subgroup generated by the atomic values of `m`. Over a finite
/// structure every formula value is built from atomic values by `*`, `^-1`
/// and selections among existing values, so this is `Gr(M)`.
pub fn generated_subgroup(m: &Structure) -> Result<GeneratedSubgroup, ModelTheoryError> {
    let mut gens: Vec<GroupElem> = m
        .atomic_values()
        .filter_map(TruthValue::as_elem)
        .cloned()
        .collect();
    gens.sort_by(|a, b| a.compare(b).expect("single backend"));
    gens.dedup();
    GeneratedSubgroup::new(&gens)
}

pub fn member(g: &GeneratedSubgroup, x: &GroupElem) -> Result<bool, ModelTheoryError> {
    g.member(x)
}

/// Whether `ambient` is exactly the subgroup generated by `m`.
pub fn is_exhaustive(m: &Structure, ambient: &GeneratedSubgroup) -> Result<bool, ModelTheoryError> {
    let gr = generated_subgroup(m)?;
    Ok(gr.contains(ambient)? && ambient.contains(&gr)?)
}
