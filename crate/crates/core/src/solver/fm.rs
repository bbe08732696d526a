use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Relation of a row to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Eq,
}

/// `sum coeffs[i] * x_i + constant  rel  0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub coeffs: Vec<BigRational>,
    pub constant: BigRational,
    pub rel: Rel,
}

impl Row {
    pub fn new(coeffs: &[i64], constant: i64, rel: Rel) -> Row {
        Row {
            coeffs: coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
            constant: BigRational::from_integer(constant.into()),
            rel,
        }
    }

    fn lhs(&self, x: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .zip(x)
            .fold(self.constant.clone(), |acc, (a, v)| acc + a * v)
    }

    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        let v = self.lhs(x);
        match self.rel {
            Rel::Lt => v.is_negative(),
            Rel::Le => !v.is_positive(),
            Rel::Eq => v.is_zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub rows: Vec<Row>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        assert_eq!(row.coeffs.len(), self.num_vars, "row width");
        self.rows.push(row);
    }

    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        self.rows.iter().all(|r| r.satisfied_by(x))
    }

    fn is_homogeneous(&self) -> bool {
        self.rows.iter().all(|r| r.constant.is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FmOutcome {
    Sat(Vec<BigRational>),
    /// A contradiction `0 < 0` or `0 <= c < 0` was derived.
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowLimitExceeded {
    pub limit: usize,
}

enum Normal {
    True,
    False,
    Row(Row),
}

fn normalize(mut row: Row) -> Normal {
    let Some(lead) = row.coeffs.iter().find(|c| !c.is_zero()).cloned() else {
        let ok = match row.rel {
            Rel::Lt => row.constant.is_negative(),
            Rel::Le => !row.constant.is_positive(),
            Rel::Eq => row.constant.is_zero(),
        };
        return if ok { Normal::True } else { Normal::False };
    };
    let scale = if row.rel == Rel::Eq {
        lead.recip()
    } else {
        lead.abs().recip()
    };
    for c in row.coeffs.iter_mut() {
        *c *= &scale;
    }
    row.constant *= &scale;
    Normal::Row(row)
}

fn substitute(row: &mut Row, var: usize, expr: &[BigRational], constant: &BigRational) {
    let a = std::mem::take(&mut row.coeffs[var]);
    if a.is_zero() {
        return;
    }
    for (c, e) in row.coeffs.iter_mut().zip(expr) {
        *c += &a * e;
    }
    row.constant += &a * constant;
}

/// Decides a system of strict, non-strict and equality rows over the
/// rationals by Fourier-Motzkin elimination and returns a witness when it
/// is satisfiable.
///
/// Equalities are solved for their highest-index variable and substituted
/// away. Remaining variables are eliminated from the highest index down;
/// the witness is then built from `x_0` upwards: the midpoint between two
/// bounds (or the bound when they meet), `floor(lo) + 1` / `ceil(hi) - 1`
/// past a single strict bound, the bound itself for a single non-strict
/// one, and `0` when unbounded.
pub fn fm_solve(system: &LinearSystem, row_limit: usize) -> Result<FmOutcome, RowLimitExceeded> {
    let n = system.num_vars;
    let mut rows = Vec::new();
    for r in &system.rows {
        match normalize(r.clone()) {
            Normal::True => {}
            Normal::False => return Ok(FmOutcome::Unsat),
            Normal::Row(r) => rows.push(r),
        }
    }

    let mut substitutions: Vec<(usize, Vec<BigRational>, BigRational)> = Vec::new();
    while let Some(pos) = rows.iter().position(|r| r.rel == Rel::Eq) {
        let eq = rows.swap_remove(pos);
        let var = (0..n)
            .rev()
            .find(|&i| !eq.coeffs[i].is_zero())
            .expect("normalized row");
        let a = eq.coeffs[var].clone();
        let expr: Vec<BigRational> = eq
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == var {
                    BigRational::zero()
                } else {
                    -c / &a
                }
            })
            .collect();
        let constant = -&eq.constant / &a;
        let mut next = Vec::with_capacity(rows.len());
        for mut r in rows {
            substitute(&mut r, var, &expr, &constant);
            match normalize(r) {
                Normal::True => {}
                Normal::False => return Ok(FmOutcome::Unsat),
                Normal::Row(r) => next.push(r),
            }
        }
        rows = next;
        substitutions.push((var, expr, constant));
    }

    let mut bounds: Vec<Vec<Row>> = vec![Vec::new(); n];
    for var in (0..n).rev() {
        let (with, without): (Vec<Row>, Vec<Row>) =
            rows.into_iter().partition(|r| !r.coeffs[var].is_zero());
        let (upper, lower): (Vec<&Row>, Vec<&Row>) =
            with.iter().partition(|r| r.coeffs[var].is_positive());
        let mut seen: HashSet<Row> = without.iter().cloned().collect();
        let mut next = without;
        for p in &upper {
            let sp = p.coeffs[var].recip();
            for q in &lower {
                let sq = -q.coeffs[var].recip();
                let combined = Row {
                    coeffs: p
                        .coeffs
                        .iter()
                        .zip(&q.coeffs)
                        .map(|(a, b)| a * &sp + b * &sq)
                        .collect(),
                    constant: &p.constant * &sp + &q.constant * &sq,
                    rel: if p.rel == Rel::Lt || q.rel == Rel::Lt {
                        Rel::Lt
                    } else {
                        Rel::Le
                    },
                };
                match normalize(combined) {
                    Normal::True => {}
                    Normal::False => return Ok(FmOutcome::Unsat),
                    Normal::Row(r) => {
                        if seen.insert(r.clone()) {
                            next.push(r);
                            if next.len() > row_limit {
                                return Err(RowLimitExceeded { limit: row_limit });
                            }
                        }
                    }
                }
            }
        }
        bounds[var] = with;
        rows = next;
    }

    let mut x = vec![BigRational::zero(); n];
    let one = BigRational::one();
    for var in 0..n {
        let mut lo: Option<(BigRational, bool)> = None;
        let mut hi: Option<(BigRational, bool)> = None;
        for r in &bounds[var] {
            let a = &r.coeffs[var];
            let rest = r
                .coeffs
                .iter()
                .zip(&x)
                .enumerate()
                .filter(|(i, _)| *i != var)
                .fold(r.constant.clone(), |acc, (_, (c, v))| acc + c * v);
            let v = -rest / a;
            let strict = r.rel == Rel::Lt;
            if a.is_positive() {
                if hi
                    .as_ref()
                    .is_none_or(|(h, s)| v < *h || (v == *h && strict && !s))
                {
                    hi = Some((v, strict));
                }
            } else if lo
                .as_ref()
                .is_none_or(|(l, s)| v > *l || (v == *l && strict && !s))
            {
                lo = Some((v, strict));
            }
        }
        x[var] = match (lo, hi) {
            (Some((l, _)), Some((h, _))) if l == h => l,
            (Some((l, _)), Some((h, _))) => (l + h) / BigRational::from_integer(2.into()),
            (Some((l, true)), None) => l.floor() + &one,
            (Some((l, false)), None) => l,
            (None, Some((h, true))) => h.ceil() - &one,
            (None, Some((h, false))) => h,
            (None, None) => BigRational::zero(),
        };
    }
    for (var, expr, constant) in substitutions.iter().rev() {
        x[*var] = expr
            .iter()
            .zip(&x)
            .fold(constant.clone(), |acc, (e, v)| acc + e * v);
    }
    debug_assert!(system.satisfied_by(&x), "witness must satisfy the system");
    Ok(FmOutcome::Sat(x))
}

/// Scales a witness of a homogeneous system to integers by the least
/// common multiple of its denominators.
pub fn integer_witness(system: &LinearSystem, x: &[BigRational]) -> Option<Vec<BigInt>> {
    if !system.is_homogeneous() {
        return None;
    }
    let l = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    Some(
        x.iter()
            .map(|v| (v * BigRational::from_integer(l.clone())).to_integer())
            .collect(),
    )
}
