//! Conjunctive triple-pattern matching.

use std::collections::BTreeMap;
use std::fmt;

use super::{Graph, Iri, Term, TermError, Triple};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(String);

impl Variable {
    /// Names follow identifier rules: a letter or `_`, then letters,
    /// digits or `_`.
    pub fn new(name: impl Into<String>) -> Result<Self, TermError> {
        let name = name.into();
        let mut chars = name.chars();
        let ok = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(Variable(name))
        } else {
            Err(TermError::InvalidIri(name, "invalid variable name"))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternTerm {
    Const(Term),
    Var(Variable),
}

impl PatternTerm {
    /// Panics on an invalid name; intended for names written in source.
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(Variable::new(name).expect("valid variable name"))
    }
}

impl From<Iri> for PatternTerm {
    fn from(i: Iri) -> Self {
        PatternTerm::Const(Term::Iri(i))
    }
}

impl From<&Iri> for PatternTerm {
    fn from(i: &Iri) -> Self {
        PatternTerm::Const(Term::Iri(i.clone()))
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Const(t)
    }
}

impl From<Variable> for PatternTerm {
    fn from(v: Variable) -> Self {
        PatternTerm::Var(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<PatternTerm>,
        predicate: impl Into<PatternTerm>,
        object: impl Into<PatternTerm>,
    ) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }
}

pub type Binding = BTreeMap<Variable, Term>;

fn resolve<'a>(slot: &'a PatternTerm, binding: &'a Binding) -> Option<&'a Term> {
    match slot {
        PatternTerm::Const(t) => Some(t),
        PatternTerm::Var(v) => binding.get(v),
    }
}

fn unify(slot: &PatternTerm, value: &Term, binding: &mut Binding) -> bool {
    match slot {
        PatternTerm::Const(t) => t == value,
        PatternTerm::Var(v) => match binding.get(v) {
            Some(bound) => bound == value,
            None => {
                binding.insert(v.clone(), value.clone());
                true
            }
        },
    }
}

fn candidates<'a>(graph: &'a Graph, pattern: &TriplePattern, binding: &Binding) -> Vec<&'a Triple> {
    let subject = resolve(&pattern.subject, binding);
    let predicate = resolve(&pattern.predicate, binding);
    match (subject, predicate) {
        (Some(Term::Literal(_)), _) | (_, Some(Term::Literal(_))) => Vec::new(),
        (Some(Term::Iri(s)), Some(Term::Iri(p))) => graph.with_subject_predicate(s, p).collect(),
        (Some(Term::Iri(s)), None) => graph.with_subject(s).collect(),
        (None, Some(Term::Iri(p))) => graph.with_predicate(p).collect(),
        (None, None) => graph.iter().collect(),
    }
}

/// All bindings under which every pattern becomes a triple of `graph`,
/// sorted by bound values.
pub fn match_bgp(graph: &Graph, patterns: &[TriplePattern]) -> Vec<Binding> {
    let mut bindings = vec![Binding::new()];
    for pattern in patterns {
        let mut next = Vec::new();
        for binding in &bindings {
            for triple in candidates(graph, pattern, binding) {
                let mut extended = binding.clone();
                let subject = Term::Iri(triple.subject.clone());
                let predicate = Term::Iri(triple.predicate.clone());
                if unify(&pattern.subject, &subject, &mut extended)
                    && unify(&pattern.predicate, &predicate, &mut extended)
                    && unify(&pattern.object, &triple.object, &mut extended)
                {
                    next.push(extended);
                }
            }
        }
        bindings = next;
        if bindings.is_empty() {
            break;
        }
    }
    bindings.sort();
    bindings.dedup();
    bindings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Literal;

    fn ex(s: &str) -> Iri {
        Iri::new(format!("http://ex.org/{s}")).unwrap()
    }

    fn v(s: &str) -> PatternTerm {
        PatternTerm::var(s)
    }

    fn get<'a>(b: &'a Binding, name: &str) -> &'a Term {
        &b[&Variable::new(name).unwrap()]
    }

    #[test]
    fn enumerates_all_matches() {
        let g: Graph = [
            Triple::new(ex("a"), ex("p"), ex("b")),
            Triple::new(ex("c"), ex("p"), ex("d")),
        ]
        .into_iter()
        .collect();
        let out = match_bgp(&g, &[TriplePattern::new(v("x"), ex("p"), v("y"))]);
        assert_eq!(out.len(), 2);
        assert_eq!(get(&out[0], "x"), &Term::Iri(ex("a")));
        assert_eq!(get(&out[0], "y"), &Term::Iri(ex("b")));
        assert_eq!(get(&out[1], "x"), &Term::Iri(ex("c")));
        assert_eq!(get(&out[1], "y"), &Term::Iri(ex("d")));
    }

    #[test]
    fn absent_constant_yields_nothing() {
        let g: Graph = [Triple::new(ex("a"), ex("p"), ex("b"))].into_iter().collect();
        assert!(match_bgp(&g, &[TriplePattern::new(ex("zzz"), ex("p"), v("y"))]).is_empty());
        let lit = Term::Literal(Literal::integer(1));
        assert!(match_bgp(&g, &[TriplePattern::new(lit, ex("p"), v("y"))]).is_empty());
    }

    #[test]
    fn chain_join() {
        let next = ex("hasNextTask");
        let g: Graph = [
            Triple::new(ex("t1"), next.clone(), ex("t2")),
            Triple::new(ex("t2"), next.clone(), ex("t3")),
        ]
        .into_iter()
        .collect();
        let out = match_bgp(
            &g,
            &[
                TriplePattern::new(v("t"), &next, v("u")),
                TriplePattern::new(v("u"), &next, v("v")),
            ],
        );
        assert_eq!(out.len(), 1);
        assert_eq!(get(&out[0], "t"), &Term::Iri(ex("t1")));
        assert_eq!(get(&out[0], "v"), &Term::Iri(ex("t3")));
    }

    #[test]
    fn repeated_variable_within_pattern() {
        let g: Graph = [
            Triple::new(ex("a"), ex("p"), ex("a")),
            Triple::new(ex("a"), ex("p"), ex("b")),
        ]
        .into_iter()
        .collect();
        let out = match_bgp(&g, &[TriplePattern::new(v("x"), ex("p"), v("x"))]);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn empty_pattern_list_has_one_empty_solution() {
        let out = match_bgp(&Graph::new(), &[]);
        assert_eq!(out, vec![Binding::new()]);
    }

    #[test]
    fn variable_names() {
        assert!(Variable::new("task_1").is_ok());
        assert!(Variable::new("1x").is_err());
        assert!(Variable::new("").is_err());
        assert!(Variable::new("a-b").is_err());
    }
}
