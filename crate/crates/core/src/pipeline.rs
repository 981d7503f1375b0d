//! Validated pipeline KGs: whole-graph checks, saving and loading.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::rdf::{parse_turtle, serialize_turtle, Graph, Iri, Literal, Term, TurtleError, RDF_TYPE};
use crate::schema::{DataStructure, RoleBinding, Schema, Violation, ViolationCode};
use crate::vocab::{ds, iri};

/// A pipeline graph that passed validation. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineKG {
    graph: Graph,
    pipeline: Iri,
    start_task: Iri,
    dataset_path: String,
    chain: Vec<Iri>,
}

impl PipelineKG {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn pipeline_iri(&self) -> &Iri {
        &self.pipeline
    }

    pub fn start_task(&self) -> &Iri {
        &self.start_task
    }

    pub fn dataset_path(&self) -> &str {
        &self.dataset_path
    }

    /// Tasks in `ds:hasNextTask` order.
    pub fn chain(&self) -> &[Iri] {
        &self.chain
    }

    pub fn to_turtle(&self) -> String {
        serialize_turtle(&self.graph)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_turtle())
    }
}

/// A non-empty list of violations, printable one per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violations(pub Vec<Violation>);

impl Violations {
    pub fn codes(&self) -> Vec<ViolationCode> {
        self.0.iter().map(|v| v.code).collect()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.0.iter().any(|v| v.code == code)
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Violations {}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] TurtleError),
    #[error("invalid pipeline:\n{0}")]
    Invalid(Violations),
}

pub fn save(kg: &PipelineKG, path: impl AsRef<Path>) -> std::io::Result<()> {
    kg.save(path)
}

pub fn load_pipeline(path: impl AsRef<Path>) -> Result<PipelineKG, LoadError> {
    load_pipeline_with(Schema::builtin(), path)
}

pub fn load_pipeline_with(schema: &Schema, path: impl AsRef<Path>) -> Result<PipelineKG, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pipeline(schema, &text)
}

pub fn parse_pipeline(schema: &Schema, text: &str) -> Result<PipelineKG, LoadError> {
    let graph = parse_turtle(text)?;
    validate_pipeline(schema, graph).map_err(LoadError::Invalid)
}

struct Checker<'a> {
    graph: &'a Graph,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn push(&mut self, code: ViolationCode, iris: Vec<Iri>, message: impl Into<String>) {
        self.out.push(Violation::new(code, iris, message));
    }

    fn iri_objects(&self, s: &Iri, p: &str) -> Vec<Iri> {
        self.graph
            .objects(s, &iri(p))
            .filter_map(|t| t.as_iri().cloned())
            .collect()
    }

    fn types(&self, s: &Iri) -> Vec<Iri> {
        self.iri_objects(s, RDF_TYPE)
    }

    fn string_value(&self, s: &Iri, p: &str) -> Option<String> {
        let values: Vec<&Term> = self.graph.objects(s, &iri(p)).collect();
        match values.as_slice() {
            [Term::Literal(l)] => l.as_str().map(str::to_string),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
struct EntityInfo {
    structure: Option<DataStructure>,
    is_source: bool,
}

/// Runs every whole-graph rule: a single pipeline individual with a
/// dataset path and start task; tasks with one type and one method; a
/// linear, acyclic chain covering every task; per-task schema
/// compatibility; inputs that resolve to dataset entities or to outputs of
/// earlier tasks; uniquely produced outputs; and a closed vocabulary.
pub fn validate_pipeline(schema: &Schema, graph: Graph) -> Result<PipelineKG, Violations> {
    use ViolationCode::*;
    let type_p = iri(RDF_TYPE);
    let mut c = Checker {
        graph: &graph,
        out: Vec::new(),
    };

    // Closed vocabulary and typing.
    for t in graph.iter() {
        if t.predicate != type_p && !schema.is_property(&t.predicate) {
            c.push(
                UnknownProperty,
                vec![t.subject.clone(), t.predicate.clone()],
                format!("{} is not a property of the schema", t.predicate),
            );
        }
        if t.predicate == type_p {
            match t.object.as_iri() {
                Some(class) if schema.is_class(class) => {}
                _ => c.push(
                    MalformedEntity,
                    vec![t.subject.clone()],
                    format!("typed with {}, which is not a schema class", t.object),
                ),
            }
        }
    }

    let pipeline_term = Term::Iri(iri(ds::PIPELINE));
    let pipelines: Vec<Iri> = graph.subjects_with(&type_p, &pipeline_term).cloned().collect();
    let pipeline = match pipelines.as_slice() {
        [] => {
            c.push(MissingPipeline, vec![], "no individual is typed ds:Pipeline");
            return Err(finish(c.out));
        }
        [p] => p.clone(),
        many => {
            c.push(MultiplePipelines, many.to_vec(), "more than one ds:Pipeline individual");
            return Err(finish(c.out));
        }
    };
    let dataset_path = c.string_value(&pipeline, ds::HAS_INPUT_DATA_PATH);
    if dataset_path.is_none() {
        c.push(MissingDataPath, vec![pipeline.clone()], "the pipeline needs exactly one string ds:hasInputDataPath");
    }

    // Tasks are the individuals typed with a schema task type.
    let mut tasks: BTreeMap<Iri, Iri> = BTreeMap::new();
    let mut seen_task_subjects = BTreeSet::new();
    for t in graph.with_predicate(&type_p) {
        if let Some(class) = t.object.as_iri().filter(|cl| schema.is_task_type(cl)) {
            if !seen_task_subjects.insert(t.subject.clone()) {
                c.push(MalformedEntity, vec![t.subject.clone()], "task has more than one task type");
                continue;
            }
            tasks.insert(t.subject.clone(), class.clone());
        }
    }

    let starts = c.iri_objects(&pipeline, ds::HAS_START_TASK);
    let start = match starts.as_slice() {
        [] => {
            if tasks.is_empty() {
                c.push(EmptyPipeline, vec![pipeline.clone()], "the pipeline has no tasks");
            } else {
                c.push(MissingStartTask, vec![pipeline.clone()], "no ds:hasStartTask");
            }
            None
        }
        [s] => Some(s.clone()),
        many => {
            c.push(NonlinearChain, many.to_vec(), "more than one ds:hasStartTask");
            None
        }
    };

    // Chain shape.
    let next_p = iri(ds::HAS_NEXT_TASK);
    let mut incoming: BTreeMap<Iri, usize> = BTreeMap::new();
    for t in graph.with_predicate(&next_p) {
        let Some(target) = t.object.as_iri() else {
            c.push(MalformedEntity, vec![t.subject.clone()], "ds:hasNextTask must point to a task IRI");
            continue;
        };
        for end in [&t.subject, target] {
            if !tasks.contains_key(end) {
                c.push(DanglingReference, vec![end.clone()], "ds:hasNextTask endpoint is not a task");
            }
        }
        *incoming.entry(target.clone()).or_default() += 1;
    }
    let mut linear = true;
    for task in tasks.keys() {
        let out = c.iri_objects(task, ds::HAS_NEXT_TASK).len();
        if out > 1 {
            linear = false;
            c.push(NonlinearChain, vec![task.clone()], format!("task has {out} successors"));
        }
        if let Some(&n) = incoming.get(task).filter(|n| **n > 1) {
            linear = false;
            c.push(NonlinearChain, vec![task.clone()], format!("task has {n} predecessors"));
        }
    }
    let mut chain: Vec<Iri> = Vec::new();
    if let Some(start) = &start {
        if !tasks.contains_key(start) {
            c.push(DanglingReference, vec![start.clone()], "ds:hasStartTask does not point to a task");
        } else {
            let mut visited = BTreeSet::new();
            let mut cur = Some(start.clone());
            while let Some(t) = cur {
                if !visited.insert(t.clone()) {
                    c.push(Cycle, vec![t.clone()], "the ds:hasNextTask chain returns to this task");
                    linear = false;
                    break;
                }
                chain.push(t.clone());
                cur = c.iri_objects(&t, ds::HAS_NEXT_TASK).into_iter().next();
                if cur.as_ref().is_some_and(|n| !tasks.contains_key(n)) {
                    break;
                }
            }
            for task in tasks.keys() {
                if !visited.contains(task) {
                    c.push(UnreachableTask, vec![task.clone()], "not reachable from the start task");
                }
            }
        }
    }

    // Methods.
    let method_p = iri(ds::HAS_METHOD);
    let mut methods: BTreeMap<Iri, (Iri, Iri)> = BTreeMap::new();
    for task in tasks.keys() {
        let ms = c.iri_objects(task, ds::HAS_METHOD);
        let m = match ms.as_slice() {
            [] => {
                c.push(MissingMethod, vec![task.clone()], "task has no ds:hasMethod");
                continue;
            }
            [m] => m.clone(),
            many => {
                c.push(MultipleMethods, many.to_vec(), format!("{} has several methods", task.local_name()));
                continue;
            }
        };
        let mtypes: Vec<Iri> = c.types(&m).into_iter().filter(|t| schema.is_method_type(t)).collect();
        match mtypes.as_slice() {
            [mt] => {
                methods.insert(task.clone(), (m, mt.clone()));
            }
            [] => c.push(MalformedEntity, vec![m], "method individual has no method type"),
            _ => c.push(MalformedEntity, vec![m], "method individual has several method types"),
        }
    }
    for t in graph.with_predicate(&method_p) {
        if !tasks.contains_key(&t.subject) {
            c.push(MalformedEntity, vec![t.subject.clone()], "ds:hasMethod on a non-task subject");
        }
    }

    // Data entities.
    let entity_term = Term::Iri(iri(ds::DATA_ENTITY));
    let mut entities: BTreeMap<Iri, EntityInfo> = BTreeMap::new();
    for e in graph.subjects_with(&type_p, &entity_term) {
        let structure = match c.string_value(e, ds::HAS_DATA_STRUCTURE) {
            None => {
                c.push(MalformedEntity, vec![e.clone()], "entity needs exactly one ds:hasDataStructure");
                None
            }
            Some(tag) => match tag.parse::<DataStructure>() {
                Ok(s) => Some(s),
                Err(err) => {
                    c.push(UnknownStructure, vec![e.clone()], err.to_string());
                    None
                }
            },
        };
        let has_source = graph.object(e, &iri(ds::HAS_SOURCE)).is_some();
        if has_source {
            if c.string_value(e, ds::HAS_SOURCE).is_none() {
                c.push(MalformedEntity, vec![e.clone()], "ds:hasSource must be a single string");
            }
            if c.string_value(e, ds::HAS_DATA_SEMANTICS).is_none() {
                c.push(MalformedEntity, vec![e.clone()], "dataset entity needs one ds:hasDataSemantics string");
            }
        }
        entities.insert(
            e.clone(),
            EntityInfo {
                structure,
                is_source: has_source,
            },
        );
    }

    // Producers of each output entity.
    let mut producer: BTreeMap<Iri, Iri> = BTreeMap::new();
    for task in tasks.keys() {
        for t in graph.with_subject(task) {
            if !schema.is_output_role(&t.predicate) {
                continue;
            }
            let Some(o) = t.object.as_iri() else {
                c.push(MalformedEntity, vec![task.clone()], "output role must point to an entity IRI");
                continue;
            };
            if let Some(prev) = producer.insert(o.clone(), task.clone()) {
                c.push(DuplicateOutput, vec![o.clone(), prev, task.clone()], "entity is produced twice");
            }
            if entities.get(o).is_some_and(|e| e.is_source) {
                c.push(DuplicateOutput, vec![o.clone()], "a dataset entity cannot also be a task output");
            }
        }
    }
    for (e, info) in &entities {
        if !info.is_source && !producer.contains_key(e) {
            c.push(MalformedEntity, vec![e.clone()], "entity has neither ds:hasSource nor a producing task");
        }
    }

    // Per-task compatibility, in chain order when the chain is sound.
    let order: Vec<Iri> = if linear && chain.len() == tasks.len() {
        chain.clone()
    } else {
        tasks.keys().cloned().collect()
    };
    let position: BTreeMap<&Iri, usize> = order.iter().enumerate().map(|(i, t)| (t, i)).collect();
    for task in &order {
        let task_type = &tasks[task];
        let mut bindings = Vec::new();
        for t in graph.with_subject(task) {
            let p = &t.predicate;
            if *p == type_p || *p == next_p || *p == method_p || schema.is_output_role(p) {
                continue;
            }
            if !schema.is_input_role(p) {
                if schema.is_property(p) {
                    c.push(UnknownProperty, vec![task.clone(), p.clone()], "property not allowed on a task");
                }
                continue;
            }
            let Some(e) = t.object.as_iri() else {
                c.push(MalformedEntity, vec![task.clone(), p.clone()], "input role must point to an entity IRI");
                continue;
            };
            let Some(info) = entities.get(e) else {
                c.push(DanglingReference, vec![task.clone(), e.clone()], format!("input {} is not a data entity", e.local_name()));
                continue;
            };
            if !info.is_source {
                let earlier = producer
                    .get(e)
                    .is_some_and(|prod| position.get(prod) < position.get(task));
                if !earlier {
                    c.push(ForwardReference, vec![task.clone(), e.clone()], format!("{} is not produced by an earlier task", e.local_name()));
                }
            }
            if let Some(structure) = info.structure {
                bindings.push(RoleBinding {
                    role: p.clone(),
                    entity: e.clone(),
                    structure,
                });
            }
        }
        let Some((method, method_type)) = methods.get(task) else {
            continue;
        };
        let mut params: Vec<(Iri, Literal)> = Vec::new();
        for t in graph.with_subject(method) {
            if t.predicate == type_p {
                continue;
            }
            match &t.object {
                Term::Literal(l) => params.push((t.predicate.clone(), l.clone())),
                Term::Iri(_) => c.push(MalformedEntity, vec![method.clone(), t.predicate.clone()], "method parameters must be literals"),
            }
        }
        let mut found = schema.check_compatibility(task_type, method_type, &bindings, &params);
        for v in &mut found {
            if !v.iris.contains(task) {
                v.iris.insert(0, task.clone());
            }
        }
        c.out.extend(found);

        // Outputs against the task signature.
        let expected = schema.output_structures(task_type, &bindings);
        let mut bound_outputs = 0;
        for (role, structure) in &expected {
            let outs = c.iri_objects(task, role.property.as_str());
            bound_outputs += outs.len();
            if outs.len() != 1 {
                c.push(OutputArityMismatch, vec![task.clone(), role.property.clone()], format!("expected one {} output, found {}", role.property.local_name(), outs.len()));
                continue;
            }
            let actual = entities.get(&outs[0]).and_then(|e| e.structure);
            if actual.is_none() && !entities.contains_key(&outs[0]) {
                c.push(DanglingReference, vec![task.clone(), outs[0].clone()], "output is not a data entity");
            } else if structure.is_some() && actual.is_some() && actual != *structure {
                c.push(OutputStructureMismatch, vec![task.clone(), outs[0].clone()], format!("output should be a {}", structure.map_or("?", |s| s.as_str())));
            }
        }
        let all_outputs = graph
            .with_subject(task)
            .filter(|t| schema.is_output_role(&t.predicate))
            .count();
        if all_outputs != bound_outputs {
            c.push(OutputArityMismatch, vec![task.clone()], "task has outputs outside its signature");
        }
    }

    if !c.out.is_empty() {
        return Err(finish(c.out));
    }
    Ok(PipelineKG {
        pipeline,
        start_task: start.expect("no violations implies a start task"),
        dataset_path: dataset_path.expect("no violations implies a data path"),
        chain,
        graph,
    })
}

fn finish(mut v: Vec<Violation>) -> Violations {
    v.sort();
    v.dedup();
    Violations(v)
}
