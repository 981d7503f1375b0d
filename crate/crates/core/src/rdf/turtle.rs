use std::fmt::Write as _;

use thiserror::Error;

use super::{Datatype, Graph, Iri, Literal, Term, Triple, RDF_TYPE, XSD_NS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TurtleError {
    #[error("syntax error at {line}:{column} near `{token}`: {message}")]
    Syntax {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },
    #[error("unsupported Turtle feature at {line}:{column}: {feature}")]
    Unsupported {
        line: usize,
        column: usize,
        feature: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    PrefixDirective,
    IriRef(String),
    PrefixedName(String, String),
    A,
    Str(String),
    Number(String, Datatype),
    Bool(bool),
    Carets,
    Semicolon,
    Comma,
    Dot,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
    text: String,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn syntax(&self, line: usize, column: usize, token: impl Into<String>, message: impl Into<String>) -> TurtleError {
        TurtleError::Syntax {
            line,
            column,
            token: token.into(),
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.' | '@' | '+') {
                // A trailing dot terminates the statement rather than the name.
                if c == '.' && !self.peek_at(1).is_some_and(is_name_char) {
                    break;
                }
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, TurtleError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else { break };
            let unsupported = |feature| TurtleError::Unsupported {
                line,
                column,
                feature,
            };
            let (tok, text) = match c {
                '<' => {
                    self.bump();
                    let mut iri = String::new();
                    loop {
                        match self.bump() {
                            Some('>') => break,
                            Some(c) if c.is_whitespace() => {
                                return Err(self.syntax(line, column, format!("<{iri}"), "whitespace inside IRI"))
                            }
                            Some(c) => iri.push(c),
                            None => return Err(self.syntax(line, column, format!("<{iri}"), "unterminated IRI")),
                        }
                    }
                    let text = format!("<{iri}>");
                    (Tok::IriRef(iri), text)
                }
                '"' | '\'' => {
                    if self.peek_at(1) == Some(c) && self.peek_at(2) == Some(c) {
                        return Err(unsupported("long string literals"));
                    }
                    self.bump();
                    let s = self.string_body(c, line, column)?;
                    let text = format!("{c}{s}{c}");
                    (Tok::Str(s), text)
                }
                ';' | ',' | '.' if !(c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) => {
                    self.bump();
                    let tok = match c {
                        ';' => Tok::Semicolon,
                        ',' => Tok::Comma,
                        _ => Tok::Dot,
                    };
                    (tok, c.to_string())
                }
                '^' => {
                    self.bump();
                    if self.bump() != Some('^') {
                        return Err(self.syntax(line, column, "^", "expected `^^`"));
                    }
                    (Tok::Carets, "^^".into())
                }
                '[' => return Err(unsupported("blank nodes")),
                '(' => return Err(unsupported("collections")),
                '_' if self.peek_at(1) == Some(':') => return Err(unsupported("blank nodes")),
                '@' => {
                    let w = self.word();
                    match w.as_str() {
                        "@prefix" => (Tok::PrefixDirective, w),
                        "@base" => return Err(unsupported("@base")),
                        _ => return Err(unsupported("language tags")),
                    }
                }
                c if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => {
                    let w = self.word();
                    let dt = if super::is_integer_lexical(&w) {
                        Datatype::Integer
                    } else if super::is_double_lexical(&w) {
                        Datatype::Double
                    } else {
                        return Err(self.syntax(line, column, w, "malformed number"));
                    };
                    (Tok::Number(w.clone(), dt), w)
                }
                c if c.is_alphabetic() || c == ':' || c == '_' => {
                    let w = self.word();
                    let tok = match w.as_str() {
                        "a" => Tok::A,
                        "true" => Tok::Bool(true),
                        "false" => Tok::Bool(false),
                        "PREFIX" | "prefix" => Tok::PrefixDirective,
                        "BASE" | "base" => return Err(unsupported("@base")),
                        _ => match w.split_once(':') {
                            Some((p, l)) => Tok::PrefixedName(p.into(), l.into()),
                            None => return Err(self.syntax(line, column, w, "expected a prefixed name")),
                        },
                    };
                    (tok, w)
                }
                other => {
                    return Err(self.syntax(line, column, other.to_string(), "unexpected character"));
                }
            };
            out.push(Spanned {
                tok,
                line,
                column,
                text,
            });
        }
        Ok(out)
    }

    fn string_body(&mut self, quote: char, line: usize, column: usize) -> Result<String, TurtleError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(self.syntax(line, column, format!("{quote}{s}"), "unterminated string"))
                }
                Some(c) if c == quote => return Ok(s),
                Some('\\') => {
                    let esc = self.bump();
                    match esc {
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        Some('b') => s.push('\u{8}'),
                        Some('f') => s.push('\u{c}'),
                        Some('"') => s.push('"'),
                        Some('\'') => s.push('\''),
                        Some('\\') => s.push('\\'),
                        Some(u @ ('u' | 'U')) => {
                            let n = if u == 'u' { 4 } else { 8 };
                            let hex: String = (0..n).filter_map(|_| self.bump()).collect();
                            let ch = u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32);
                            match ch {
                                Some(ch) if hex.len() == n => s.push(ch),
                                _ => return Err(self.syntax(line, column, format!("\\{u}{hex}"), "bad unicode escape")),
                            }
                        }
                        other => {
                            return Err(self.syntax(
                                line,
                                column,
                                format!("\\{}", other.map(String::from).unwrap_or_default()),
                                "unknown escape",
                            ))
                        }
                    }
                }
                Some(c) => s.push(c),
            }
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.')
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    graph: Graph,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Spanned, TurtleError> {
        let t = self.tokens.get(self.pos).cloned().ok_or(TurtleError::Syntax {
            line: self.eof.0,
            column: self.eof.1,
            token: "<eof>".into(),
            message: "unexpected end of document".into(),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn err(t: &Spanned, message: impl Into<String>) -> TurtleError {
        TurtleError::Syntax {
            line: t.line,
            column: t.column,
            token: t.text.clone(),
            message: message.into(),
        }
    }

    fn expect_dot(&mut self) -> Result<(), TurtleError> {
        let t = self.next()?;
        match t.tok {
            Tok::Dot => Ok(()),
            _ => Err(Self::err(&t, "expected `.`")),
        }
    }

    fn resolve(&self, t: &Spanned) -> Result<Iri, TurtleError> {
        let full = match &t.tok {
            Tok::IriRef(s) => s.clone(),
            Tok::PrefixedName(p, l) => {
                let ns = self
                    .graph
                    .prefixes
                    .get(p)
                    .ok_or_else(|| Self::err(t, format!("undeclared prefix `{p}:`")))?;
                format!("{ns}{l}")
            }
            Tok::A => RDF_TYPE.to_string(),
            _ => return Err(Self::err(t, "expected an IRI")),
        };
        Iri::new(&full).map_err(|e| Self::err(t, e.to_string()))
    }

    fn document(mut self) -> Result<Graph, TurtleError> {
        while let Some(t) = self.peek().cloned() {
            if t.tok == Tok::PrefixDirective {
                self.pos += 1;
                let name = self.next()?;
                let prefix = match &name.tok {
                    Tok::PrefixedName(p, l) if l.is_empty() => p.clone(),
                    _ => return Err(Self::err(&name, "expected `prefix:`")),
                };
                let ns_tok = self.next()?;
                let ns = match &ns_tok.tok {
                    Tok::IriRef(s) => Iri::new(s).map_err(|e| Self::err(&ns_tok, e.to_string()))?,
                    _ => return Err(Self::err(&ns_tok, "expected a namespace IRI")),
                };
                self.graph.bind_prefix(prefix, ns);
                // SPARQL-style PREFIX has no trailing dot.
                if t.text.starts_with('@') {
                    self.expect_dot()?;
                }
            } else {
                self.triples()?;
            }
        }
        Ok(self.graph)
    }

    fn triples(&mut self) -> Result<(), TurtleError> {
        let st = self.next()?;
        if matches!(st.tok, Tok::A) {
            return Err(Self::err(&st, "`a` cannot be a subject"));
        }
        let subject = self.resolve(&st)?;
        loop {
            let pt = self.next()?;
            let predicate = self.resolve(&pt)?;
            loop {
                let object = self.object()?;
                self.graph.insert(Triple::new(subject.clone(), predicate.clone(), object));
                match self.peek().map(|t| &t.tok) {
                    Some(Tok::Comma) => self.pos += 1,
                    _ => break,
                }
            }
            let sep = self.next()?;
            match sep.tok {
                Tok::Dot => return Ok(()),
                Tok::Semicolon => {
                    // Trailing `;` before the final dot is legal.
                    while matches!(self.peek().map(|t| &t.tok), Some(Tok::Semicolon)) {
                        self.pos += 1;
                    }
                    if matches!(self.peek().map(|t| &t.tok), Some(Tok::Dot)) {
                        self.pos += 1;
                        return Ok(());
                    }
                }
                _ => return Err(Self::err(&sep, "expected `;`, `,` or `.`")),
            }
        }
    }

    fn object(&mut self) -> Result<Term, TurtleError> {
        let t = self.next()?;
        Ok(match &t.tok {
            Tok::IriRef(_) | Tok::PrefixedName(..) => Term::Iri(self.resolve(&t)?),
            Tok::Number(lex, dt) => Term::Literal(Literal {
                lexical: lex.clone(),
                datatype: *dt,
            }),
            Tok::Bool(b) => Term::Literal(Literal::boolean(*b)),
            Tok::Str(s) => {
                if matches!(self.peek().map(|t| &t.tok), Some(Tok::Carets)) {
                    self.pos += 1;
                    let dt_tok = self.next()?;
                    let dt_iri = self.resolve(&dt_tok)?;
                    let dt = Datatype::from_iri(dt_iri.as_str()).ok_or_else(|| {
                        Self::err(&dt_tok, format!("unsupported datatype <{dt_iri}>"))
                    })?;
                    Term::Literal(Literal::new(s.clone(), dt).map_err(|e| Self::err(&t, e.to_string()))?)
                } else {
                    Term::Literal(Literal::string(s.clone()))
                }
            }
            _ => return Err(Self::err(&t, "expected an object")),
        })
    }
}

pub fn parse_turtle(text: &str) -> Result<Graph, TurtleError> {
    let lexer = Lexer::new(text);
    let eof = {
        let line = text.matches('\n').count() + 1;
        let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    };
    let tokens = lexer.tokens()?;
    Parser {
        tokens,
        pos: 0,
        graph: Graph::new(),
        eof,
    }
    .document()
}

fn is_plain_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            local.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-'))
        }
        _ => false,
    }
}

fn render_iri(graph: &Graph, iri: &Iri) -> String {
    if iri.as_str() == RDF_TYPE {
        return "a".into();
    }
    render_node(graph, iri)
}

fn render_node(graph: &Graph, iri: &Iri) -> String {
    let best = graph
        .prefixes
        .iter()
        .filter(|(_, ns)| iri.as_str().starts_with(ns.as_str()))
        .max_by_key(|(p, ns)| (ns.as_str().len(), std::cmp::Reverse(p.as_str())));
    if let Some((prefix, ns)) = best {
        let local = &iri.as_str()[ns.as_str().len()..];
        if is_plain_local(local) {
            return format!("{prefix}:{local}");
        }
    }
    format!("<{iri}>")
}

fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn render_term(graph: &Graph, term: &Term) -> String {
    match term {
        Term::Iri(i) => render_node(graph, i),
        Term::Literal(l) => match l.datatype {
            Datatype::String => escape_string(&l.lexical),
            Datatype::Integer | Datatype::Boolean => l.lexical.clone(),
            Datatype::Double => {
                let dt = Iri::new(Datatype::Double.iri()).expect("static IRI");
                let dt = if graph.prefixes.values().any(|ns| ns.as_str() == XSD_NS) {
                    render_node(graph, &dt)
                } else {
                    format!("<{dt}>")
                };
                format!("{}^^{dt}", escape_string(&l.lexical))
            }
        },
    }
}

/// Prefixes first (sorted by name), then one block per subject in IRI
/// order. `rdf:type` leads each block; the rest follow predicate order.
pub fn serialize_turtle(graph: &Graph) -> String {
    let mut out = String::new();
    for (prefix, ns) in &graph.prefixes {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    let rdf_type = Iri::new(RDF_TYPE).expect("static IRI");
    for subject in graph.subjects() {
        let triples: Vec<&Triple> = graph.with_subject(subject).collect();
        let mut predicates: Vec<&Iri> = triples.iter().map(|t| &t.predicate).collect();
        predicates.dedup();
        predicates.sort_by_key(|p| (**p != rdf_type, *p));
        out.push('\n');
        out.push_str(&render_node(graph, subject));
        for (pi, predicate) in predicates.iter().enumerate() {
            if pi > 0 {
                out.push_str(" ;\n   ");
            }
            out.push(' ');
            out.push_str(&render_iri(graph, predicate));
            let objects: Vec<String> = triples
                .iter()
                .filter(|t| &t.predicate == *predicate)
                .map(|t| render_term(graph, &t.object))
                .collect();
            out.push(' ');
            out.push_str(&objects.join(", "));
        }
        out.push_str(" .\n");
    }
    out
}
