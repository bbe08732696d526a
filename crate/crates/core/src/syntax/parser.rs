//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, tightest first: postfix `^-1` and `^n`, prefix `~`, `*`,
//! `/\`, `\/`, `->` and `->l` (right associative), `<->` `=>` `==>` (right
//! associative), and the quantifiers `forall x.` / `exists x.` whose body
//! extends as far right as possible.

use super::ast::{BinOp, Formula, Quantifier, Term};
use super::signature::{Signature, KEYWORDS};
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Star,
    InvPostfix,
    Caret,
    Op(BinOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Star => "`*`".into(),
            Tok::InvPostfix => "`^-1`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Op(op) => format!("`{}`", op.token()),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let is_ident_char = |c: char| c.is_ascii_alphanumeric() || c == '_';
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start_col = col;
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            (Tok::Int(chars[i..j].iter().collect()), j - i)
        } else if rest.starts_with("==>") {
            (Tok::Op(BinOp::DDArrow), 3)
        } else if rest.starts_with("<->") {
            (Tok::Op(BinOp::Iff), 3)
        } else if rest.starts_with("^-1") {
            (Tok::InvPostfix, 3)
        } else if rest.starts_with("->l") && !chars.get(i + 3).is_some_and(|&c| is_ident_char(c)) {
            (Tok::Op(BinOp::LukImp), 3)
        } else if rest.starts_with("->") {
            (Tok::Op(BinOp::Imp), 2)
        } else if rest.starts_with("=>") {
            (Tok::Op(BinOp::DArrow), 2)
        } else if rest.starts_with("/\\") {
            (Tok::Op(BinOp::And), 2)
        } else if rest.starts_with("\\/") {
            (Tok::Op(BinOp::Or), 2)
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '~' => Tok::Tilde,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                other => {
                    return Err(SyntaxError::Lex {
                        line,
                        column: start_col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            (tok, 1)
        };
        out.push(Spanned {
            tok,
            line,
            column: start_col,
        });
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

enum SigMode<'a> {
    Fixed(&'a Signature),
    Infer(&'a mut Signature),
}

impl SigMode<'_> {
    fn sig(&self) -> &Signature {
        match self {
            SigMode::Fixed(s) => s,
            SigMode::Infer(s) => s,
        }
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: SigMode<'a>,
    bound: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> SyntaxError {
        let (line, column) = self.here();
        SyntaxError::Parse {
            line,
            column,
            message: format!("expected {expected}, found {}", self.peek().describe()),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.imp_level()?;
        match self.peek() {
            Tok::Op(op @ (BinOp::Iff | BinOp::DArrow | BinOp::DDArrow)) => {
                let op = *op;
                self.bump();
                let rhs = self.formula()?;
                Ok(Formula::binary(op, lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn imp_level(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or_level()?;
        match self.peek() {
            Tok::Op(op @ (BinOp::Imp | BinOp::LukImp)) => {
                let op = *op;
                self.bump();
                let rhs = self.imp_level()?;
                Ok(Formula::binary(op, lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn or_level(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.and_level()?;
        while *self.peek() == Tok::Op(BinOp::Or) {
            self.bump();
            let rhs = self.and_level()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_level(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.tensor_level()?;
        while *self.peek() == Tok::Op(BinOp::And) {
            self.bump();
            let rhs = self.tensor_level()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn tensor_level(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.prefix()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.prefix()?;
            lhs = Formula::tensor(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Formula, SyntaxError> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            return Ok(Formula::not(self.prefix()?));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Formula, SyntaxError> {
        let mut f = self.primary()?;
        loop {
            match self.peek() {
                Tok::InvPostfix => {
                    self.bump();
                    f = Formula::inv(f);
                }
                Tok::Caret => {
                    self.bump();
                    let (line, column) = self.here();
                    let n = match self.peek().clone() {
                        Tok::Int(s) => s.parse::<u32>().ok().filter(|&n| n >= 1),
                        _ => None,
                    }
                    .ok_or_else(|| SyntaxError::Parse {
                        line,
                        column,
                        message: format!(
                            "expected a positive exponent or `-1`, found {}",
                            self.peek().describe()
                        ),
                    })?;
                    self.bump();
                    f = Formula::power(f, n);
                }
                _ => return Ok(f),
            }
        }
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        let (line, column) = self.here();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => match name.as_str() {
                "bot" => {
                    self.bump();
                    Ok(Formula::Bot)
                }
                "one" => {
                    self.bump();
                    Ok(Formula::One)
                }
                "top" => {
                    self.bump();
                    Ok(Formula::Top)
                }
                "delta" => {
                    self.bump();
                    self.expect(Tok::LParen, "`(` after `delta`")?;
                    let f = self.formula()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Formula::delta(f))
                }
                "forall" | "exists" => {
                    self.bump();
                    let q = if name == "forall" {
                        Quantifier::Forall
                    } else {
                        Quantifier::Exists
                    };
                    self.quantified(q)
                }
                _ => {
                    self.bump();
                    self.atom(name, line, column)
                }
            },
            _ => Err(self.error("a formula")),
        }
    }

    fn quantified(&mut self, q: Quantifier) -> Result<Formula, SyntaxError> {
        let (line, column) = self.here();
        let var = match self.peek().clone() {
            Tok::Ident(v) if !KEYWORDS.contains(&v.as_str()) => v,
            _ => return Err(self.error("a variable name")),
        };
        if self.sig.sig().contains(&var) {
            return Err(SyntaxError::BindsSymbol {
                name: var,
                line,
                column,
            });
        }
        self.bump();
        self.expect(Tok::Dot, "`.` after quantified variable")?;
        self.bound.push(var.clone());
        let body = self.formula();
        self.bound.pop();
        Ok(Formula::Quant(q, var, Box::new(body?)))
    }

    fn args(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            if *self.peek() == Tok::RParen {
                self.bump();
                return Ok(args);
            }
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.error("`,` or `)`")),
                }
            }
        }
        Ok(args)
    }

    fn atom(&mut self, name: String, line: usize, column: usize) -> Result<Formula, SyntaxError> {
        let args = self.args()?;
        match &mut self.sig {
            SigMode::Fixed(sig) => match sig.predicate_arity(&name) {
                Some(a) if a == args.len() => {}
                Some(a) => {
                    return Err(SyntaxError::ArityMismatch {
                        name,
                        expected: a,
                        found: args.len(),
                        line,
                        column,
                    })
                }
                None => return Err(SyntaxError::UnknownSymbol { name, line, column }),
            },
            SigMode::Infer(sig) => sig
                .add_predicate(&name, args.len())
                .map_err(|e| e.at(line, column))?,
        }
        Ok(Formula::Atom(name, args))
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let (line, column) = self.here();
        let name = match self.peek().clone() {
            Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) => n,
            _ => return Err(self.error("a term")),
        };
        self.bump();
        let has_args = *self.peek() == Tok::LParen;
        if !has_args && self.bound.contains(&name) {
            return Ok(Term::Var(name));
        }
        let args = self.args()?;
        match &mut self.sig {
            SigMode::Fixed(sig) => match sig.function_arity(&name) {
                Some(a) if a == args.len() => Ok(Term::App(name, args)),
                Some(a) => Err(SyntaxError::ArityMismatch {
                    name,
                    expected: a,
                    found: args.len(),
                    line,
                    column,
                }),
                None if has_args => Err(SyntaxError::UnknownSymbol { name, line, column }),
                None if sig.contains(&name) => Err(SyntaxError::NameClash(name)),
                None => Ok(Term::Var(name)),
            },
            SigMode::Infer(sig) => {
                // Unbound bare identifiers are constants when inferring.
                sig.add_function(&name, args.len())
                    .map_err(|e| e.at(line, column))?;
                Ok(Term::App(name, args))
            }
        }
    }
}

fn run(text: &str, sig: SigMode<'_>) -> Result<Formula, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        sig,
        bound: Vec::new(),
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

/// Parses `text` as a formula over `sig`.
///
/// Identifiers in term position are constants or function applications when
/// declared in `sig`, and variables otherwise.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    run(text, SigMode::Fixed(sig))
}

/// Parses `text` while extending `sig` with every symbol it uses.
///
/// In this mode an identifier in term position that is not bound by an
/// enclosing quantifier is taken to be a constant, so the input should be a
/// sentence.
pub fn parse_infer(text: &str, sig: &mut Signature) -> Result<Formula, SyntaxError> {
    let f = run(text, SigMode::Infer(sig))?;
    if let Some(v) = f.bound_vars().into_iter().find(|v| sig.contains(v)) {
        return Err(SyntaxError::NameClash(v));
    }
    Ok(f)
}

/// Parses a theory: one sentence per non-empty line, `#` starts a comment.
pub fn parse_theory(text: &str, sig: &Signature) -> Result<Vec<Formula>, SyntaxError> {
    theory_lines(text)
        .map(|(line, src)| parse(src, sig).map_err(|e| e.on_line(line)))
        .collect()
}

/// Like [`parse_theory`] but infers the signature from the sentences.
pub fn parse_theory_infer(text: &str, sig: &mut Signature) -> Result<Vec<Formula>, SyntaxError> {
    theory_lines(text)
        .map(|(line, src)| parse_infer(src, sig).map_err(|e| e.on_line(line)))
        .collect()
}

fn theory_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let src = raw.split('#').next().unwrap_or("").trim();
        (!src.is_empty()).then_some((i + 1, src))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new()
            .with_predicate("P", 1)
            .with_predicate("Q", 1)
            .with_predicate("R", 2)
            .with_predicate("rho", 0)
            .with_function("f", 2)
            .with_function("c", 0)
    }

    fn p(text: &str) -> Formula {
        parse(text, &sig()).unwrap()
    }

    #[test]
    fn quantifier_scopes_over_implication() {
        let f = p("forall x. P(x) -> Q(x)");
        let expected = Formula::forall(
            "x",
            Formula::imp(
                Formula::atom("P", vec![Term::var("x")]),
                Formula::atom("Q", vec![Term::var("x")]),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn strict_arrow_with_unit() {
        assert_eq!(
            p("one ==> rho"),
            Formula::dd_arrow(Formula::One, Formula::prop("rho"))
        );
    }

    #[test]
    fn truncated_input_reports_column() {
        let err = parse("P(f(x,", &sig()).unwrap_err();
        match err {
            SyntaxError::Parse { line, column, .. } => assert_eq!((line, column), (1, 7)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn distinct_error_kinds() {
        assert!(matches!(
            parse("S(x)", &sig()),
            Err(SyntaxError::UnknownSymbol { .. })
        ));
        assert!(matches!(
            parse("P(x, x)", &sig()),
            Err(SyntaxError::ArityMismatch { .. })
        ));
        assert!(matches!(
            parse("P(x) $ Q(x)", &sig()),
            Err(SyntaxError::Lex { .. })
        ));
        assert!(matches!(
            parse("P(x) Q(x)", &sig()),
            Err(SyntaxError::Parse { .. })
        ));
        assert!(matches!(
            parse("forall c. P(c)", &sig()),
            Err(SyntaxError::BindsSymbol { .. })
        ));
        assert!(matches!(
            parse("P(x)^0", &sig()),
            Err(SyntaxError::Parse { .. })
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        let a = || Formula::prop("rho");
        // postfix binds tighter than prefix, prefix tighter than tensor
        assert_eq!(p("~rho^-1"), Formula::not(Formula::inv(a())));
        assert_eq!(
            p("rho * rho /\\ rho"),
            Formula::and(Formula::tensor(a(), a()), a())
        );
        assert_eq!(
            p("rho -> rho -> rho"),
            Formula::imp(a(), Formula::imp(a(), a()))
        );
        assert_eq!(
            p("rho \\/ rho -> rho <-> rho"),
            Formula::binary(BinOp::Iff, Formula::imp(Formula::or(a(), a()), a()), a())
        );
        assert_eq!(p("rho^3^-1"), Formula::inv(Formula::power(a(), 3)));
        assert_eq!(p("rho ->l rho"), Formula::binary(BinOp::LukImp, a(), a()));
    }

    #[test]
    fn terms_resolve_against_signature() {
        assert_eq!(
            p("R(c, f(x, c))"),
            Formula::atom(
                "R",
                vec![
                    Term::constant("c"),
                    Term::app("f", vec![Term::var("x"), Term::constant("c")])
                ]
            )
        );
    }

    #[test]
    fn inference_collects_symbols() {
        let mut s = Signature::new();
        let f = parse_infer("forall x. P(x) ==> Q(c)", &mut s).unwrap();
        assert_eq!(s.predicate_arity("P"), Some(1));
        assert!(s.is_constant("c"));
        assert_eq!(f.quantifier_depth(), 1);
        assert!(parse_infer("P(x, x)", &mut s).is_err());
    }

    #[test]
    fn theory_lines_skip_comments() {
        let text = "# theory\nrho\n\n  rho -> bot  # trailing\n";
        let t = parse_theory(text, &sig()).unwrap();
        assert_eq!(t.len(), 2);
        let err = parse_theory("rho\nrho ->", &sig()).unwrap_err();
        assert!(matches!(err, SyntaxError::Parse { line: 2, .. }));
    }
}
