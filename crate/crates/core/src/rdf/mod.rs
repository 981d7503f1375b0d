//! Ground RDF terms, an indexed triple store, a Turtle subset and
//! basic-graph-pattern matching.

mod bgp;
mod turtle;

pub use bgp::{match_bgp, Binding, PatternTerm, TriplePattern, Variable};
pub use turtle::{parse_turtle, serialize_turtle, TurtleError};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL_NS: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid IRI <{0}>: {1}")]
    InvalidIri(String, &'static str),
    #[error("lexical form {lexical:?} is not a valid {datatype}")]
    InvalidLexical { lexical: String, datatype: Datatype },
}

/// An absolute `http`/`https` IRI.
///
/// Cloning is cheap; the string is shared.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, TermError> {
        let value = value.as_ref();
        if value.is_empty() {
            return Err(TermError::InvalidIri(value.into(), "empty"));
        }
        if value
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || "<>\"{}|^`\\".contains(c))
        {
            return Err(TermError::InvalidIri(value.into(), "illegal character"));
        }
        let rest = value
            .strip_prefix("http://")
            .or_else(|| value.strip_prefix("https://"))
            .ok_or_else(|| TermError::InvalidIri(value.into(), "scheme must be http or https"))?;
        if rest.is_empty() {
            return Err(TermError::InvalidIri(value.into(), "missing authority"));
        }
        Ok(Iri(Arc::from(value)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Splits at the last `#` or `/`; the namespace keeps the separator.
    pub fn split(&self) -> (&str, &str) {
        match self.0.rfind(['#', '/']) {
            Some(i) => (&self.0[..=i], &self.0[i + 1..]),
            None => (&self.0, ""),
        }
    }

    pub fn namespace(&self) -> &str {
        self.split().0
    }

    pub fn local_name(&self) -> &str {
        self.split().1
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    String,
    Integer,
    Double,
    Boolean,
}

impl Datatype {
    pub fn iri(self) -> &'static str {
        match self {
            Datatype::String => "http://www.w3.org/2001/XMLSchema#string",
            Datatype::Integer => "http://www.w3.org/2001/XMLSchema#integer",
            Datatype::Double => "http://www.w3.org/2001/XMLSchema#double",
            Datatype::Boolean => "http://www.w3.org/2001/XMLSchema#boolean",
        }
    }

    pub fn from_iri(iri: &str) -> Option<Self> {
        [
            Datatype::String,
            Datatype::Integer,
            Datatype::Double,
            Datatype::Boolean,
        ]
        .into_iter()
        .find(|d| d.iri() == iri)
    }

    pub fn accepts(self, lexical: &str) -> bool {
        match self {
            Datatype::String => true,
            Datatype::Integer => is_integer_lexical(lexical),
            Datatype::Double => is_double_lexical(lexical),
            Datatype::Boolean => matches!(lexical, "true" | "false"),
        }
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Datatype::String => "xsd:string",
            Datatype::Integer => "xsd:integer",
            Datatype::Double => "xsd:double",
            Datatype::Boolean => "xsd:boolean",
        })
    }
}

pub(crate) fn is_integer_lexical(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Decimal or exponent notation; special values (`INF`, `NaN`) are rejected.
pub(crate) fn is_double_lexical(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let mantissa_ok = (!int_part.is_empty() || !frac_part.is_empty())
        && int_part.bytes().all(|b| b.is_ascii_digit())
        && frac_part.bytes().all(|b| b.is_ascii_digit());
    mantissa_ok && exponent.is_none_or(is_integer_lexical)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Datatype,
}

impl Literal {
    pub fn new(lexical: impl Into<String>, datatype: Datatype) -> Result<Self, TermError> {
        let lexical = lexical.into();
        if !datatype.accepts(&lexical) {
            return Err(TermError::InvalidLexical { lexical, datatype });
        }
        Ok(Literal { lexical, datatype })
    }

    pub fn string(value: impl Into<String>) -> Self {
        Literal {
            lexical: value.into(),
            datatype: Datatype::String,
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal {
            lexical: value.to_string(),
            datatype: Datatype::Integer,
        }
    }

    /// Uses the shortest decimal form that round-trips. Non-finite values
    /// have no lexical form in this subset and panic.
    pub fn double(value: f64) -> Self {
        assert!(value.is_finite(), "double literal must be finite");
        let mut lexical = format!("{value:?}");
        if !is_double_lexical(&lexical) {
            lexical = format!("{value:e}");
        }
        Literal {
            lexical,
            datatype: Datatype::Double,
        }
    }

    pub fn boolean(value: bool) -> Self {
        Literal {
            lexical: value.to_string(),
            datatype: Datatype::Boolean,
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self.datatype {
            Datatype::Integer => self.lexical.parse().ok(),
            _ => None,
        }
    }

    /// Integers widen to doubles.
    pub fn as_f64(&self) -> Option<f64> {
        match self.datatype {
            Datatype::Integer | Datatype::Double => self.lexical.parse().ok(),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.datatype {
            Datatype::Boolean => Some(self.lexical == "true"),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self.datatype {
            Datatype::String => Some(&self.lexical),
            _ => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.datatype {
            Datatype::String => write!(f, "{:?}", self.lexical),
            _ => write!(f, "\"{}\"^^{}", self.lexical, self.datatype),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => write!(f, "<{i}>"),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> <{}> {} .", self.subject, self.predicate, self.object)
    }
}

/// A set of ground triples with subject, predicate and subject+predicate
/// indexes. Prefix registrations only affect serialization.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    prefixes: BTreeMap<String, Iri>,
    by_subject: HashMap<Iri, BTreeSet<Triple>>,
    by_predicate: HashMap<Iri, BTreeSet<Triple>>,
    by_subject_predicate: HashMap<(Iri, Iri), BTreeSet<Triple>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.triples.contains(&triple) {
            return false;
        }
        self.by_subject
            .entry(triple.subject.clone())
            .or_default()
            .insert(triple.clone());
        self.by_predicate
            .entry(triple.predicate.clone())
            .or_default()
            .insert(triple.clone());
        self.by_subject_predicate
            .entry((triple.subject.clone(), triple.predicate.clone()))
            .or_default()
            .insert(triple.clone());
        self.triples.insert(triple)
    }

    pub fn add(&mut self, subject: &Iri, predicate: &Iri, object: impl Into<Term>) -> bool {
        self.insert(Triple::new(subject.clone(), predicate.clone(), object))
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        if !self.triples.remove(triple) {
            return false;
        }
        fn drop_from<K: std::hash::Hash + Eq>(
            map: &mut HashMap<K, BTreeSet<Triple>>,
            key: K,
            triple: &Triple,
        ) {
            if let Some(set) = map.get_mut(&key) {
                set.remove(triple);
                if set.is_empty() {
                    map.remove(&key);
                }
            }
        }
        drop_from(&mut self.by_subject, triple.subject.clone(), triple);
        drop_from(&mut self.by_predicate, triple.predicate.clone(), triple);
        drop_from(
            &mut self.by_subject_predicate,
            (triple.subject.clone(), triple.predicate.clone()),
            triple,
        );
        true
    }

    pub fn extend(&mut self, other: &Graph) {
        for t in other.iter() {
            self.insert(t.clone());
        }
        for (p, ns) in &other.prefixes {
            self.prefixes.entry(p.clone()).or_insert_with(|| ns.clone());
        }
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Iterates in `(subject, predicate, object)` order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn with_subject<'a>(&'a self, subject: &Iri) -> impl Iterator<Item = &'a Triple> {
        self.by_subject.get(subject).into_iter().flatten()
    }

    pub fn with_predicate<'a>(&'a self, predicate: &Iri) -> impl Iterator<Item = &'a Triple> {
        self.by_predicate.get(predicate).into_iter().flatten()
    }

    pub fn with_subject_predicate<'a>(
        &'a self,
        subject: &Iri,
        predicate: &Iri,
    ) -> impl Iterator<Item = &'a Triple> {
        self.by_subject_predicate
            .get(&(subject.clone(), predicate.clone()))
            .into_iter()
            .flatten()
    }

    pub fn objects<'a>(&'a self, subject: &Iri, predicate: &Iri) -> impl Iterator<Item = &'a Term> {
        self.with_subject_predicate(subject, predicate)
            .map(|t| &t.object)
    }

    pub fn object(&self, subject: &Iri, predicate: &Iri) -> Option<&Term> {
        self.objects(subject, predicate).next()
    }

    pub fn subjects_with<'a>(
        &'a self,
        predicate: &Iri,
        object: &'a Term,
    ) -> impl Iterator<Item = &'a Iri> {
        self.with_predicate(predicate)
            .filter(move |t| &t.object == object)
            .map(|t| &t.subject)
    }

    pub fn subjects(&self) -> impl Iterator<Item = &Iri> {
        let mut subjects: Vec<&Iri> = self.by_subject.keys().collect();
        subjects.sort();
        subjects.into_iter()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, Iri> {
        &self.prefixes
    }

    pub fn bind_prefix(&mut self, prefix: impl Into<String>, namespace: Iri) {
        self.prefixes.insert(prefix.into(), namespace);
    }

    /// Triple-set equality; prefix tables are ignored.
    pub fn graph_equal(&self, other: &Graph) -> bool {
        self.triples == other.triples
    }
}

pub fn graph_equal(a: &Graph, b: &Graph) -> bool {
    a.graph_equal(b)
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.graph_equal(other)
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<T: IntoIterator<Item = Triple>>(iter: T) -> Self {
        let mut g = Graph::new();
        for t in iter {
            g.insert(t);
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://ex.org/{s}")).unwrap()
    }

    #[test]
    fn iri_validation() {
        assert!(Iri::new("").is_err());
        assert!(Iri::new("http://ex.org/a b").is_err());
        assert!(Iri::new("urn:x").is_err());
        assert!(Iri::new("https://").is_err());
        let i = Iri::new("https://exekg.example/ds#Task").unwrap();
        assert_eq!(i.split(), ("https://exekg.example/ds#", "Task"));
        assert_eq!(iri("a").local_name(), "a");
    }

    #[test]
    fn literal_lexical_forms() {
        assert!(Literal::new("-12", Datatype::Integer).is_ok());
        assert!(Literal::new("1.5", Datatype::Integer).is_err());
        assert!(Literal::new("1.5e-3", Datatype::Double).is_ok());
        assert!(Literal::new(".5", Datatype::Double).is_ok());
        assert!(Literal::new("NaN", Datatype::Double).is_err());
        assert!(Literal::new("e5", Datatype::Double).is_err());
        assert!(Literal::new("yes", Datatype::Boolean).is_err());
        assert_eq!(Literal::double(0.8).lexical(), "0.8");
        assert_eq!(Literal::double(1.0).lexical(), "1.0");
        assert_eq!(Literal::double(1e300).as_f64(), Some(1e300));
        assert_eq!(Literal::integer(7).as_f64(), Some(7.0));
    }

    #[test]
    fn set_semantics_and_indexes() {
        let mut g = Graph::new();
        assert!(g.add(&iri("a"), &iri("p"), iri("b")));
        assert!(!g.add(&iri("a"), &iri("p"), iri("b")));
        g.add(&iri("a"), &iri("q"), Literal::integer(3));
        g.add(&iri("c"), &iri("p"), iri("b"));
        assert_eq!(g.len(), 3);
        assert_eq!(g.with_subject(&iri("a")).count(), 2);
        assert_eq!(g.with_predicate(&iri("p")).count(), 2);
        assert_eq!(g.objects(&iri("a"), &iri("q")).count(), 1);
        let b = Term::Iri(iri("b"));
        assert_eq!(g.subjects_with(&iri("p"), &b).count(), 2);

        let t = Triple::new(iri("a"), iri("p"), iri("b"));
        assert!(g.remove(&t));
        assert!(!g.remove(&t));
        assert_eq!(g.with_subject(&iri("a")).count(), 1);
        assert_eq!(g.with_predicate(&iri("p")).count(), 1);
    }

    #[test]
    fn equality_ignores_order_and_prefixes() {
        let triples: Vec<Triple> = (0..5)
            .map(|i| Triple::new(iri(&format!("s{i}")), iri("p"), Literal::integer(i)))
            .collect();
        let a: Graph = triples.iter().cloned().collect();
        let mut b: Graph = triples.iter().rev().cloned().collect();
        b.bind_prefix("ex", iri(""));
        assert!(graph_equal(&a, &a));
        assert!(graph_equal(&a, &b));
        b.add(&iri("x"), &iri("p"), iri("y"));
        assert!(!graph_equal(&a, &b));
    }
}
