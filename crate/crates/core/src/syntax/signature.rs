use std::collections::BTreeMap;
use std::fmt;

use super::SyntaxError;

pub(crate) const KEYWORDS: [&str; 6] = ["bot", "one", "top", "delta", "forall", "exists"];

/// Symbol kind within a [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Function,
    Predicate,
}

/// A first-order language: function and predicate symbols with arities,
/// plus an optional binary predicate playing the role of equality.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    functions: BTreeMap<String, usize>,
    predicates: BTreeMap<String, usize>,
    equality: Option<String>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_new(&self, name: &str, kind: SymbolKind, arity: usize) -> Result<bool, SyntaxError> {
        if !is_identifier(name) || KEYWORDS.contains(&name) {
            return Err(SyntaxError::InvalidName(name.to_string()));
        }
        let (same, other) = match kind {
            SymbolKind::Function => (&self.functions, &self.predicates),
            SymbolKind::Predicate => (&self.predicates, &self.functions),
        };
        if other.contains_key(name) {
            return Err(SyntaxError::NameClash(name.to_string()));
        }
        match same.get(name) {
            Some(&a) if a == arity => Ok(false),
            Some(&a) => Err(SyntaxError::ArityMismatch {
                name: name.to_string(),
                expected: a,
                found: arity,
                line: 0,
                column: 0,
            }),
            None => Ok(true),
        }
    }

    /// Declares a function symbol. Re-declaring with the same arity is a no-op.
    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        if self.check_new(name, SymbolKind::Function, arity)? {
            self.functions.insert(name.to_string(), arity);
        }
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        if self.check_new(name, SymbolKind::Predicate, arity)? {
            self.predicates.insert(name.to_string(), arity);
        }
        Ok(())
    }

    /// Marks `name` as the equality surrogate, declaring it as a binary
    /// predicate if needed.
    pub fn set_equality(&mut self, name: &str) -> Result<(), SyntaxError> {
        self.add_predicate(name, 2)?;
        self.equality = Some(name.to_string());
        Ok(())
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.add_function(name, arity)
            .expect("valid function declaration");
        self
    }

    pub fn with_predicate(mut self, name: &str, arity: usize) -> Self {
        self.add_predicate(name, arity)
            .expect("valid predicate declaration");
        self
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn equality(&self) -> Option<&str> {
        self.equality.as_deref()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.functions.contains_key(name) || self.predicates.contains_key(name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.functions.get(name) == Some(&0)
    }

    pub fn max_predicate_arity(&self) -> usize {
        self.predicates.values().copied().max().unwrap_or(0)
    }

    /// Merges `other` into `self`; symbols must agree on kind and arity.
    pub fn extend(&mut self, other: &Signature) -> Result<(), SyntaxError> {
        for (f, a) in other.functions() {
            self.add_function(f, a)?;
        }
        for (p, a) in other.predicates() {
            self.add_predicate(p, a)?;
        }
        if let Some(e) = other.equality() {
            self.set_equality(e)?;
        }
        Ok(())
    }

    /// Parses the line-oriented declaration format:
    ///
    /// ```text
    /// fn f/2
    /// pred P/1
    /// equality e
    /// ```
    ///
    /// Blank lines and `#` comments are ignored.
    pub fn parse_decls(text: &str) -> Result<Signature, SyntaxError> {
        let mut sig = Signature::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let decl_err = |message: String| SyntaxError::Decl {
                line: line_no,
                message,
            };
            let (keyword, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| decl_err(format!("incomplete declaration `{line}`")))?;
            let rest = rest.trim();
            let with_line = |e: SyntaxError| decl_err(e.to_string());
            match keyword {
                "fn" | "pred" => {
                    let (name, arity) = rest
                        .split_once('/')
                        .ok_or_else(|| decl_err(format!("expected name/arity, got `{rest}`")))?;
                    let arity: usize = arity
                        .trim()
                        .parse()
                        .map_err(|_| decl_err(format!("bad arity in `{rest}`")))?;
                    if keyword == "fn" {
                        sig.add_function(name.trim(), arity).map_err(with_line)?;
                    } else {
                        sig.add_predicate(name.trim(), arity).map_err(with_line)?;
                    }
                }
                "equality" => sig.set_equality(rest).map_err(with_line)?,
                other => return Err(decl_err(format!("unknown declaration `{other}`"))),
            }
        }
        Ok(sig)
    }
}

impl fmt::Display for Signature {
    /// Renders the declaration format accepted by [`Signature::parse_decls`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, arity) in &self.functions {
            writeln!(f, "fn {name}/{arity}")?;
        }
        for (name, arity) in &self.predicates {
            writeln!(f, "pred {name}/{arity}")?;
        }
        if let Some(e) = &self.equality {
            writeln!(f, "equality {e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decl_file_round_trip() {
        let text = "# language\nfn f/2\nfn c/0\npred P/1\n\nequality e\n";
        let sig = Signature::parse_decls(text).unwrap();
        assert_eq!(sig.function_arity("f"), Some(2));
        assert!(sig.is_constant("c"));
        assert_eq!(sig.predicate_arity("e"), Some(2));
        assert_eq!(sig.equality(), Some("e"));
        assert_eq!(Signature::parse_decls(&sig.to_string()).unwrap(), sig);
    }

    #[test]
    fn names_are_unique_across_families() {
        let mut sig = Signature::new().with_function("f", 1);
        assert!(matches!(
            sig.add_predicate("f", 1),
            Err(SyntaxError::NameClash(_))
        ));
        assert!(matches!(
            sig.add_function("f", 2),
            Err(SyntaxError::ArityMismatch { .. })
        ));
        assert!(sig.add_function("f", 1).is_ok());
        assert!(sig.add_predicate("forall", 0).is_err());
    }

    #[test]
    fn equality_must_be_binary() {
        let mut sig = Signature::new().with_predicate("e", 1);
        assert!(sig.set_equality("e").is_err());
        let err = Signature::parse_decls("pred e/3\nequality e").unwrap_err();
        assert!(matches!(err, SyntaxError::Decl { line: 2, .. }));
    }
}
