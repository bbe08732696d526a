use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::group::{Backend, TruthValue};
use crate::syntax::{Signature, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing `backend` line")]
    MissingBackend,
    #[error("missing or empty `universe`")]
    EmptyUniverse,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("`{symbol}` is partial: no entry for ({tuple})")]
    Partial { symbol: String, tuple: String },
    #[error("`{symbol}` is defined twice at ({tuple})")]
    Redefined { symbol: String, tuple: String },
    #[error("value {value} does not belong to backend {backend}")]
    WrongBackend { value: String, backend: Backend },
    #[error(transparent)]
    Signature(#[from] SyntaxError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct FnTable {
    arity: usize,
    table: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PredTable {
    arity: usize,
    table: Vec<TruthValue>,
}

/// A finite structure: a nonempty universe, total function tables and
/// predicate tables valued in the truth-value carrier of one backend.
///
/// Structures are immutable once built; use [`StructureBuilder`] or
/// [`Structure::parse`] to create them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    backend: Backend,
    universe: Vec<String>,
    index: HashMap<String, usize>,
    signature: Signature,
    functions: BTreeMap<String, FnTable>,
    predicates: BTreeMap<String, PredTable>,
}

pub(crate) fn tuple_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// All tuples in `{0..n}^arity`, in row-major order.
pub fn tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = n.pow(arity as u32);
    (0..count).map(move |mut i| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = i % n;
            i /= n;
        }
        t
    })
}

impl Structure {
    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn element_name(&self, idx: usize) -> &str {
        &self.universe[idx]
    }

    pub fn function_value(&self, name: &str, args: &[usize]) -> Option<usize> {
        let t = self.functions.get(name)?;
        (t.arity == args.len()).then(|| t.table[tuple_index(self.size(), args)])
    }

    pub fn predicate_value(&self, name: &str, args: &[usize]) -> Option<&TruthValue> {
        let t = self.predicates.get(name)?;
        (t.arity == args.len()).then(|| &t.table[tuple_index(self.size(), args)])
    }

    /// Every value occurring in a predicate table, in table order.
    pub fn atomic_values(&self) -> impl Iterator<Item = &TruthValue> {
        self.predicates.values().flat_map(|t| t.table.iter())
    }

    /// Parses the line-oriented structure format:
    ///
    /// ```text
    /// backend rat
    /// universe m1 m2
    /// fn f m1 m2 -> m1
    /// fn c -> m2
    /// pred P m1 = 3/2
    /// pred rho = inf
    /// equality e
    /// ```
    ///
    /// Tables must be total; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Structure, StructureError> {
        let mut backend = None;
        let mut builder: Option<StructureBuilder> = None;
        let mut equality = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let src = raw.split('#').next().unwrap_or("").trim();
            if src.is_empty() {
                continue;
            }
            let err = |message: String| StructureError::Line { line, message };
            let wrap = |e: StructureError| match e {
                StructureError::Line { .. } => e,
                other => StructureError::Line {
                    line,
                    message: other.to_string(),
                },
            };
            let (keyword, rest) = src.split_once(char::is_whitespace).unwrap_or((src, ""));
            let rest = rest.trim();
            match keyword {
                "backend" => {
                    if backend.is_some() {
                        return Err(err("duplicate `backend` line".into()));
                    }
                    backend = Some(rest.parse::<Backend>().map_err(|e| err(e.to_string()))?);
                }
                "universe" => {
                    let b = backend.ok_or(StructureError::MissingBackend)?;
                    if builder.is_some() {
                        return Err(err("duplicate `universe` line".into()));
                    }
                    let names: Vec<&str> = rest.split_whitespace().collect();
                    builder = Some(StructureBuilder::new(b, &names).map_err(wrap)?);
                }
                "fn" => {
                    let b = builder
                        .as_mut()
                        .ok_or_else(|| err("`fn` before `universe`".into()))?;
                    let (lhs, result) = rest
                        .split_once("->")
                        .ok_or_else(|| err(format!("expected `->` in `{src}`")))?;
                    let mut words = lhs.split_whitespace();
                    let name = words
                        .next()
                        .ok_or_else(|| err("missing function name".into()))?;
                    let args: Vec<&str> = words.collect();
                    b.declare_function(name, args.len()).map_err(wrap)?;
                    b.set_function(name, &args, result.trim()).map_err(wrap)?;
                }
                "pred" => {
                    let b = builder
                        .as_mut()
                        .ok_or_else(|| err("`pred` before `universe`".into()))?;
                    let (lhs, value) = rest
                        .split_once('=')
                        .ok_or_else(|| err(format!("expected `=` in `{src}`")))?;
                    let mut words = lhs.split_whitespace();
                    let name = words
                        .next()
                        .ok_or_else(|| err("missing predicate name".into()))?;
                    let args: Vec<&str> = words.collect();
                    let value = TruthValue::parse(value).map_err(|e| err(e.to_string()))?;
                    b.declare_predicate(name, args.len()).map_err(wrap)?;
                    b.set_predicate(name, &args, value).map_err(wrap)?;
                }
                "equality" => equality = Some((line, rest.to_string())),
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        let mut builder = match (backend, builder) {
            (None, _) => return Err(StructureError::MissingBackend),
            (Some(_), None) => return Err(StructureError::EmptyUniverse),
            (Some(_), Some(b)) => b,
        };
        if let Some((line, name)) = equality {
            builder
                .signature
                .set_equality(&name)
                .map_err(|e| StructureError::Line {
                    line,
                    message: e.to_string(),
                })?;
            builder.declare_predicate(&name, 2)?;
        }
        builder.build()
    }
}

impl fmt::Display for Structure {
    /// Writes the format accepted by [`Structure::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "backend {}", self.backend)?;
        writeln!(f, "universe {}", self.universe.join(" "))?;
        let n = self.size();
        for (name, t) in &self.functions {
            for (i, tuple) in tuples(n, t.arity).enumerate() {
                write!(f, "fn {name}")?;
                for a in tuple {
                    write!(f, " {}", self.universe[a])?;
                }
                writeln!(f, " -> {}", self.universe[t.table[i]])?;
            }
        }
        for (name, t) in &self.predicates {
            for (i, tuple) in tuples(n, t.arity).enumerate() {
                write!(f, "pred {name}")?;
                for a in tuple {
                    write!(f, " {}", self.universe[a])?;
                }
                writeln!(f, " = {}", t.table[i])?;
            }
        }
        if let Some(e) = self.signature.equality() {
            writeln!(f, "equality {e}")?;
        }
        Ok(())
    }
}

/// Incremental construction of a [`Structure`]; [`StructureBuilder::build`]
/// rejects partial tables.
#[derive(Debug, Clone)]
pub struct StructureBuilder {
    backend: Backend,
    universe: Vec<String>,
    index: HashMap<String, usize>,
    signature: Signature,
    functions: BTreeMap<String, (usize, Vec<Option<usize>>)>,
    predicates: BTreeMap<String, (usize, Vec<Option<TruthValue>>)>,
}

impl StructureBuilder {
    pub fn new<S: AsRef<str>>(backend: Backend, universe: &[S]) -> Result<Self, StructureError> {
        if universe.is_empty() {
            return Err(StructureError::EmptyUniverse);
        }
        let mut index = HashMap::new();
        let mut names = Vec::new();
        for (i, name) in universe.iter().enumerate() {
            let name = name.as_ref().to_string();
            if index.insert(name.clone(), i).is_some() {
                return Err(StructureError::DuplicateElement(name));
            }
            names.push(name);
        }
        Ok(StructureBuilder {
            backend,
            universe: names,
            index,
            signature: Signature::new(),
            functions: BTreeMap::new(),
            predicates: BTreeMap::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn declare_function(&mut self, name: &str, arity: usize) -> Result<(), StructureError> {
        self.signature.add_function(name, arity)?;
        let slots = self.size().pow(arity as u32);
        self.functions
            .entry(name.to_string())
            .or_insert_with(|| (arity, vec![None; slots]));
        Ok(())
    }

    pub fn declare_predicate(&mut self, name: &str, arity: usize) -> Result<(), StructureError> {
        self.signature.add_predicate(name, arity)?;
        let slots = self.size().pow(arity as u32);
        self.predicates
            .entry(name.to_string())
            .or_insert_with(|| (arity, vec![None; slots]));
        Ok(())
    }

    pub fn set_equality(&mut self, name: &str) -> Result<(), StructureError> {
        self.declare_predicate(name, 2)?;
        self.signature.set_equality(name)?;
        Ok(())
    }

    fn lookup(&self, name: &str) -> Result<usize, StructureError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| StructureError::UnknownElement(name.into()))
    }

    fn tuple_of(&self, args: &[&str]) -> Result<Vec<usize>, StructureError> {
        args.iter().map(|a| self.lookup(a)).collect()
    }

    fn describe(&self, args: &[usize]) -> String {
        args.iter()
            .map(|&a| self.universe[a].as_str())
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn set_function(
        &mut self,
        name: &str,
        args: &[&str],
        result: &str,
    ) -> Result<(), StructureError> {
        let args = self.tuple_of(args)?;
        let result = self.lookup(result)?;
        self.set_function_idx(name, &args, result)
    }

    pub fn set_function_idx(
        &mut self,
        name: &str,
        args: &[usize],
        result: usize,
    ) -> Result<(), StructureError> {
        let n = self.size();
        let describe = self.describe(args);
        if result >= n || args.iter().any(|&a| a >= n) {
            return Err(StructureError::UnknownElement(format!(
                "index out of range in {name}"
            )));
        }
        let (arity, table) =
            self.functions
                .get_mut(name)
                .ok_or_else(|| SyntaxError::UnknownSymbol {
                    name: name.into(),
                    line: 0,
                    column: 0,
                })?;
        if *arity != args.len() {
            return Err(SyntaxError::ArityMismatch {
                name: name.into(),
                expected: *arity,
                found: args.len(),
                line: 0,
                column: 0,
            }
            .into());
        }
        let slot = &mut table[tuple_index(n, args)];
        if slot.is_some() {
            return Err(StructureError::Redefined {
                symbol: name.into(),
                tuple: describe,
            });
        }
        *slot = Some(result);
        Ok(())
    }

    pub fn set_predicate(
        &mut self,
        name: &str,
        args: &[&str],
        value: TruthValue,
    ) -> Result<(), StructureError> {
        let args = self.tuple_of(args)?;
        self.set_predicate_idx(name, &args, value)
    }

    pub fn set_predicate_idx(
        &mut self,
        name: &str,
        args: &[usize],
        value: TruthValue,
    ) -> Result<(), StructureError> {
        if let Some(b) = value.backend() {
            if b != self.backend {
                return Err(StructureError::WrongBackend {
                    value: value.to_string(),
                    backend: self.backend,
                });
            }
        }
        let n = self.size();
        if args.iter().any(|&a| a >= n) {
            return Err(StructureError::UnknownElement(format!(
                "index out of range in {name}"
            )));
        }
        let describe = self.describe(args);
        let (arity, table) =
            self.predicates
                .get_mut(name)
                .ok_or_else(|| SyntaxError::UnknownSymbol {
                    name: name.into(),
                    line: 0,
                    column: 0,
                })?;
        if *arity != args.len() {
            return Err(SyntaxError::ArityMismatch {
                name: name.into(),
                expected: *arity,
                found: args.len(),
                line: 0,
                column: 0,
            }
            .into());
        }
        let slot = &mut table[tuple_index(n, args)];
        if slot.is_some() {
            return Err(StructureError::Redefined {
                symbol: name.into(),
                tuple: describe,
            });
        }
        *slot = Some(value);
        Ok(())
    }

    pub fn build(self) -> Result<Structure, StructureError> {
        let n = self.size();
        let missing = |name: &str, i: usize, arity: usize| StructureError::Partial {
            symbol: name.to_string(),
            tuple: tuples(n, arity)
                .nth(i)
                .map(|t| {
                    t.iter()
                        .map(|&a| self.universe[a].as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                })
                .unwrap_or_default(),
        };
        let mut functions = BTreeMap::new();
        for (name, (arity, table)) in &self.functions {
            let table = table
                .iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| missing(name, i, *arity)))
                .collect::<Result<Vec<_>, _>>()?;
            functions.insert(
                name.clone(),
                FnTable {
                    arity: *arity,
                    table,
                },
            );
        }
        let mut predicates = BTreeMap::new();
        for (name, (arity, table)) in &self.predicates {
            let table = table
                .iter()
                .enumerate()
                .map(|(i, v)| v.clone().ok_or_else(|| missing(name, i, *arity)))
                .collect::<Result<Vec<_>, _>>()?;
            predicates.insert(
                name.clone(),
                PredTable {
                    arity: *arity,
                    table,
                },
            );
        }
        Ok(Structure {
            backend: self.backend,
            universe: self.universe,
            index: self.index,
            signature: self.signature,
            functions,
            predicates,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
backend rat
universe m1 m2
fn f m1 -> m2
fn f m2 -> m1
fn c -> m2
pred P m1 = 3/2
pred P m2 = inf
pred rho = 0
";

    #[test]
    fn parse_and_print_round_trip() {
        let m = Structure::parse(SAMPLE).unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(m.function_value("f", &[0]), Some(1));
        assert_eq!(m.function_value("c", &[]), Some(1));
        assert_eq!(m.predicate_value("P", &[1]), Some(&TruthValue::Inf));
        assert_eq!(m.predicate_value("rho", &[]), Some(&TruthValue::Zero));
        let again = Structure::parse(&m.to_string()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn partial_tables_are_rejected() {
        let text = "backend rat\nuniverse a b\npred P a = 1\n";
        let err = Structure::parse(text).unwrap_err();
        assert_eq!(
            err,
            StructureError::Partial {
                symbol: "P".into(),
                tuple: "b".into()
            }
        );
        let text = "backend rat\nuniverse a b\nfn f a -> a\n";
        assert!(matches!(
            Structure::parse(text),
            Err(StructureError::Partial { .. })
        ));
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(
            Structure::parse("universe a"),
            Err(StructureError::MissingBackend)
        );
        assert_eq!(
            Structure::parse("backend rat"),
            Err(StructureError::EmptyUniverse)
        );
        assert!(Structure::parse("backend rat\nuniverse a a").is_err());
        assert!(Structure::parse("backend rat\nuniverse a\npred P a = (1, 2)").is_err());
        assert!(Structure::parse("backend rat\nuniverse a\npred P z = 1").is_err());
        assert!(Structure::parse("backend rat\nuniverse a\npred P a = 1\npred P a = 2").is_err());
        assert!(Structure::parse("backend rat\nuniverse a\npred P a = 1\npred P = 2").is_err());
        assert!(Structure::parse("backend q\nuniverse a").is_err());
    }

    #[test]
    fn lex_backend_and_equality() {
        let text = "backend lex2\nuniverse a\npred e a a = inf\npred rho = (1, 2)\nequality e\n";
        let m = Structure::parse(text).unwrap();
        assert_eq!(m.backend(), Backend::Lex2);
        assert_eq!(m.signature().equality(), Some("e"));
        assert_eq!(Structure::parse(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn tuple_enumeration_is_row_major() {
        let all: Vec<Vec<usize>> = tuples(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(3, 0).count(), 1);
        for (i, t) in tuples(3, 3).enumerate() {
            assert_eq!(tuple_index(3, &t), i);
        }
    }
}
