use std::fmt;

use super::ast::{BinOp, Formula, Quantifier, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(name, args) if args.is_empty() => f.write_str(name),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

const QUANT: u8 = 0;
const PREFIX: u8 = 6;
const POSTFIX: u8 = 7;
const PRIMARY: u8 = 8;

fn binop_level(op: BinOp) -> u8 {
    match op {
        BinOp::Iff | BinOp::DArrow | BinOp::DDArrow => 1,
        BinOp::Imp | BinOp::LukImp => 2,
        BinOp::Or => 3,
        BinOp::And => 4,
        BinOp::Tensor => 5,
    }
}

fn right_assoc(op: BinOp) -> bool {
    binop_level(op) <= 2
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Quant(..) => QUANT,
        Formula::Binary(op, ..) => binop_level(*op),
        Formula::Not(_) => PREFIX,
        Formula::Inv(_) | Formula::Power(..) => POSTFIX,
        _ => PRIMARY,
    }
}

fn write_at(f: &Formula, min_level: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min_level {
        out.write_str("(")?;
        write_formula(f, out)?;
        out.write_str(")")
    } else {
        write_formula(f, out)
    }
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Bot => out.write_str("bot"),
        Formula::One => out.write_str("one"),
        Formula::Top => out.write_str("top"),
        Formula::Atom(p, args) => write!(out, "{}", Term::App(p.clone(), args.clone())),
        Formula::Binary(op, l, r) => {
            let lvl = binop_level(*op);
            let (ll, rl) = if right_assoc(*op) {
                (lvl + 1, lvl)
            } else {
                (lvl, lvl + 1)
            };
            write_at(l, ll, out)?;
            write!(out, " {} ", op.token())?;
            write_at(r, rl, out)
        }
        Formula::Not(g) => {
            out.write_str("~")?;
            write_at(g, PREFIX, out)
        }
        Formula::Inv(g) => {
            write_at(g, POSTFIX, out)?;
            out.write_str("^-1")
        }
        Formula::Power(g, n) => {
            write_at(g, POSTFIX, out)?;
            write!(out, "^{n}")
        }
        Formula::Delta(g) => {
            out.write_str("delta(")?;
            write_formula(g, out)?;
            out.write_str(")")
        }
        Formula::Quant(q, v, body) => {
            let kw = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            write!(out, "{kw} {v}. ")?;
            write_formula(body, out)
        }
    }
}

/// Prints in the concrete grammar accepted by [`super::parse`], with the
/// minimum parentheses needed to parse back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_parentheses() {
        let a = || Formula::prop("P");
        let b = || Formula::prop("Q");
        assert_eq!(
            Formula::imp(Formula::imp(a(), b()), a()).to_string(),
            "(P -> Q) -> P"
        );
        assert_eq!(
            Formula::imp(a(), Formula::imp(b(), a())).to_string(),
            "P -> Q -> P"
        );
        assert_eq!(
            Formula::and(Formula::and(a(), b()), a()).to_string(),
            "P /\\ Q /\\ P"
        );
        assert_eq!(
            Formula::and(a(), Formula::and(b(), a())).to_string(),
            "P /\\ (Q /\\ P)"
        );
        assert_eq!(Formula::inv(Formula::not(a())).to_string(), "(~P)^-1");
        assert_eq!(Formula::not(Formula::inv(a())).to_string(), "~P^-1");
        assert_eq!(
            Formula::imp(a(), Formula::forall("x", b())).to_string(),
            "P -> (forall x. Q)"
        );
        assert_eq!(
            Formula::forall("x", Formula::imp(a(), b())).to_string(),
            "forall x. P -> Q"
        );
        assert_eq!(
            Formula::delta(Formula::or(a(), b())).to_string(),
            "delta(P \\/ Q)"
        );
    }
}
