//! Graphviz rendering of a pipeline: one node per task, method and data
//! entity; edges for the chain, method links and input/output roles.

use std::fmt::Write as _;

use crate::pipeline::PipelineKG;
use crate::rdf::{Iri, Term, RDF_TYPE};
use crate::schema::Schema;
use crate::vocab::{ds, iri};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n"))
}

/// Nodes come in chain order for tasks, then methods and entities sorted
/// by IRI; edges follow the graph's triple order. Output is deterministic.
pub fn to_dot(schema: &Schema, kg: &PipelineKG) -> String {
    let g = kg.graph();
    let type_p = iri(RDF_TYPE);
    let method_p = iri(ds::HAS_METHOD);
    let next_p = iri(ds::HAS_NEXT_TASK);
    let class_of = |s: &Iri| -> String {
        g.objects(s, &type_p)
            .filter_map(Term::as_iri)
            .map(|c| c.local_name().to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };

    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(kg.pipeline_iri().local_name()));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [fontname=\"sans-serif\", fontsize=10];");
    let _ = writeln!(out, "  edge [fontname=\"sans-serif\", fontsize=9];");
    for t in kg.chain() {
        let _ = writeln!(
            out,
            "  {} [shape=box, style=bold, label={}];",
            quote(t.as_str()),
            quote(&format!("{}\n{}", t.local_name(), class_of(t)))
        );
    }
    let mut methods: Vec<&Iri> = kg
        .chain()
        .iter()
        .filter_map(|t| g.object(t, &method_p).and_then(Term::as_iri))
        .collect();
    methods.sort();
    for m in methods {
        let _ = writeln!(
            out,
            "  {} [shape=ellipse, label={}];",
            quote(m.as_str()),
            quote(&format!("{}\n{}", m.local_name(), class_of(m)))
        );
    }
    let entity = Term::Iri(iri(ds::DATA_ENTITY));
    let mut entities: Vec<&Iri> = g.subjects_with(&type_p, &entity).collect();
    entities.sort();
    for e in entities {
        let structure = g
            .object(e, &iri(ds::HAS_DATA_STRUCTURE))
            .and_then(Term::as_literal)
            .map_or("", |l| l.lexical());
        let _ = writeln!(
            out,
            "  {} [shape=note, label={}];",
            quote(e.as_str()),
            quote(&format!("{}\n{structure}", e.local_name()))
        );
    }
    for t in g.iter() {
        let Some(o) = t.object.as_iri() else { continue };
        let p = &t.predicate;
        let edge = if *p == next_p {
            Some("style=bold")
        } else if *p == method_p {
            Some("style=dashed")
        } else if schema.is_input_role(p) || schema.is_output_role(p) {
            Some("")
        } else {
            None
        };
        let Some(style) = edge else { continue };
        let (from, to) = if schema.is_input_role(p) {
            (o, &t.subject)
        } else {
            (&t.subject, o)
        };
        let sep = if style.is_empty() { "" } else { ", " };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}{sep}{style}];",
            quote(from.as_str()),
            quote(to.as_str()),
            quote(p.local_name())
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn node_and_edge_counts() {
        let kg = samples::stats_pipeline("d.csv").unwrap();
        let dot = to_dot(Schema::builtin(), &kg);
        assert_eq!(dot.matches("shape=box").count(), 3);
        assert_eq!(dot.matches("shape=ellipse").count(), 3);
        // x1, x1_normalized, canvas, plot
        assert_eq!(dot.matches("shape=note").count(), 4);
        assert_eq!(dot.matches("label=\"hasNextTask\"").count(), 2);
        assert_eq!(dot.matches("label=\"hasMethod\"").count(), 3);
        assert_eq!(dot, to_dot(Schema::builtin(), &kg));
        assert!(dot.starts_with("digraph \"stats_pipeline\" {"));
    }

    #[test]
    fn inputs_point_into_tasks() {
        let kg = samples::visu_pipeline("d.csv").unwrap();
        let dot = to_dot(Schema::builtin(), &kg);
        let line = dot.lines().find(|l| l.contains("hasYData")).unwrap();
        let (from, to) = line.trim().split_once(" -> ").unwrap();
        assert!(from.contains("_entity_x1"));
        assert!(to.contains("_task_2"));
    }
}
