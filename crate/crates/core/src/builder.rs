//! Authoring API for pipeline KGs.
//!
//! ```
//! use exekg::builder::{PipelineBuilder, TaskSpec};
//! use exekg::rdf::Literal;
//! use exekg::schema::DataStructure;
//! use exekg::vocab::visu;
//!
//! let mut b = PipelineBuilder::create_pipeline("demo", "data.csv").unwrap();
//! let x = b.create_data_entity("x", "x", DataStructure::NumericColumn, "feature").unwrap();
//! let canvas = b
//!     .add_task(TaskSpec::new(visu::CANVAS_TASK, visu::CANVAS_METHOD).output("canvas"))
//!     .unwrap();
//! b.add_task(
//!     TaskSpec::new(visu::PLOT_TASK, visu::LINE_PLOT_METHOD)
//!         .input(visu::HAS_CANVAS, &canvas.outputs[0])
//!         .input(visu::HAS_Y_DATA, &x)
//!         .param(visu::HAS_TITLE, Literal::string("x"))
//!         .output("plot"),
//! )
//! .unwrap();
//! let kg = b.finalize().unwrap();
//! assert_eq!(kg.chain().len(), 2);
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

use crate::pipeline::{validate_pipeline, PipelineKG, Violations};
use crate::rdf::{Graph, Iri, Literal, Term, RDF_TYPE, XSD_NS};
use crate::schema::{DataStructure, RoleBinding, Schema, UnknownStructure, Violation, ViolationCode};
use crate::vocab::{ds, iri, ml, stats, visu};

pub const PIPELINE_NS_BASE: &str = "https://exekg.example/pipelines/";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("invalid name `{0}`: use a letter or `_` followed by letters, digits, `_` or `-`")]
    InvalidName(String),
    #[error("an entity named `{0}` already exists")]
    DuplicateEntity(String),
    #[error(transparent)]
    UnknownStructure(#[from] UnknownStructure),
    #[error("`{0}` is not a valid IRI")]
    InvalidIri(String),
    #[error("{0}")]
    Violations(Violations),
}

impl BuildError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            BuildError::Violations(v) => &v.0,
            _ => &[],
        }
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// A data entity of the pipeline: a dataset column or a task output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityRef {
    pub iri: Iri,
    pub structure: DataStructure,
}

impl EntityRef {
    pub fn new(iri: Iri, structure: DataStructure) -> Self {
        EntityRef { iri, structure }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskRef {
    pub iri: Iri,
    pub method: Iri,
    /// In the task signature's output order.
    pub outputs: Vec<EntityRef>,
}

/// Everything needed to add one task: its type and method, role-bound
/// inputs, method parameters and names for the outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    task: String,
    method: String,
    inputs: Vec<(String, EntityRef)>,
    params: Vec<(String, Literal)>,
    outputs: Vec<String>,
}

impl TaskSpec {
    pub fn new(task: impl Into<String>, method: impl Into<String>) -> Self {
        TaskSpec {
            task: task.into(),
            method: method.into(),
            inputs: Vec::new(),
            params: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(mut self, role: impl Into<String>, entity: &EntityRef) -> Self {
        self.inputs.push((role.into(), entity.clone()));
        self
    }

    pub fn param(mut self, property: impl Into<String>, value: Literal) -> Self {
        self.params.push((property.into(), value));
        self
    }

    pub fn output(mut self, name: impl Into<String>) -> Self {
        self.outputs.push(name.into());
        self
    }
}

fn parse_iri(s: &str) -> Result<Iri, BuildError> {
    Iri::new(s).map_err(|_| BuildError::InvalidIri(s.to_string()))
}

#[derive(Debug, Clone)]
pub struct PipelineBuilder<'s> {
    schema: &'s Schema,
    graph: Graph,
    name: String,
    ns: String,
    pipeline: Iri,
    last_task: Option<Iri>,
    task_count: usize,
    entities: BTreeMap<String, EntityRef>,
}

impl PipelineBuilder<'static> {
    /// A builder against the shipped schemata.
    pub fn create_pipeline(name: &str, dataset_path: &str) -> Result<Self, BuildError> {
        PipelineBuilder::with_schema(Schema::builtin(), name, dataset_path)
    }
}

impl<'s> PipelineBuilder<'s> {
    pub fn with_schema(schema: &'s Schema, name: &str, dataset_path: &str) -> Result<Self, BuildError> {
        if !valid_name(name) {
            return Err(BuildError::InvalidName(name.to_string()));
        }
        let ns = format!("{PIPELINE_NS_BASE}{name}#");
        let pipeline = parse_iri(&format!("{ns}{name}"))?;
        let mut graph = Graph::new();
        for (prefix, namespace) in [
            ("ds", ds::NS),
            ("kg", ns.as_str()),
            ("ml", ml::NS),
            ("stats", stats::NS),
            ("visu", visu::NS),
            ("xsd", XSD_NS),
        ] {
            graph.bind_prefix(prefix, iri(namespace));
        }
        graph.add(&pipeline, &iri(RDF_TYPE), iri(ds::PIPELINE));
        graph.add(&pipeline, &iri(ds::HAS_INPUT_DATA_PATH), Literal::string(dataset_path));
        Ok(PipelineBuilder {
            schema,
            graph,
            name: name.to_string(),
            ns,
            pipeline,
            last_task: None,
            task_count: 0,
            entities: BTreeMap::new(),
        })
    }

    pub fn schema(&self) -> &'s Schema {
        self.schema
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn pipeline_iri(&self) -> &Iri {
        &self.pipeline
    }

    pub fn task_count(&self) -> usize {
        self.task_count
    }

    /// Entities created so far, dataset columns and task outputs alike,
    /// keyed by name.
    pub fn entities(&self) -> &BTreeMap<String, EntityRef> {
        &self.entities
    }

    pub fn entity(&self, name: &str) -> Option<&EntityRef> {
        self.entities.get(name)
    }

    fn mint_entity(&self, name: &str) -> Result<Iri, BuildError> {
        if !valid_name(name) {
            return Err(BuildError::InvalidName(name.to_string()));
        }
        if self.entities.contains_key(name) {
            return Err(BuildError::DuplicateEntity(name.to_string()));
        }
        parse_iri(&format!("{}{}_entity_{name}", self.ns, self.name))
    }

    pub fn create_data_entity(
        &mut self,
        name: &str,
        source_column: &str,
        structure: DataStructure,
        semantics: &str,
    ) -> Result<EntityRef, BuildError> {
        let e = self.mint_entity(name)?;
        self.graph.add(&e, &iri(RDF_TYPE), iri(ds::DATA_ENTITY));
        self.graph.add(&e, &iri(ds::HAS_SOURCE), Literal::string(source_column));
        self.graph.add(&e, &iri(ds::HAS_DATA_STRUCTURE), Literal::string(structure.as_str()));
        self.graph.add(&e, &iri(ds::HAS_DATA_SEMANTICS), Literal::string(semantics));
        let r = EntityRef::new(e, structure);
        self.entities.insert(name.to_string(), r.clone());
        Ok(r)
    }

    /// Like [`create_data_entity`](Self::create_data_entity) with the
    /// structure given by its tag, e.g. `"NumericColumn"`.
    pub fn create_data_entity_tagged(
        &mut self,
        name: &str,
        source_column: &str,
        structure: &str,
        semantics: &str,
    ) -> Result<EntityRef, BuildError> {
        let structure = structure.parse::<DataStructure>()?;
        self.create_data_entity(name, source_column, structure, semantics)
    }

    /// Checks `spec` against the schema and, if it is well-formed, appends
    /// the task to the chain. On error the builder is unchanged.
    ///
    /// Whether inputs exist in this pipeline is checked by
    /// [`finalize`](Self::finalize).
    pub fn add_task(&mut self, spec: TaskSpec) -> Result<TaskRef, BuildError> {
        let task_type = parse_iri(&spec.task)?;
        let method_type = parse_iri(&spec.method)?;
        let mut bindings = Vec::new();
        for (role, e) in &spec.inputs {
            bindings.push(RoleBinding {
                role: parse_iri(role)?,
                entity: e.iri.clone(),
                structure: e.structure,
            });
        }
        let mut params = Vec::new();
        for (p, v) in &spec.params {
            params.push((parse_iri(p)?, v.clone()));
        }
        let mut violations = self
            .schema
            .check_compatibility(&task_type, &method_type, &bindings, &params);
        if !violations.is_empty() {
            return Err(BuildError::Violations(Violations(violations)));
        }
        let outputs = self.schema.output_structures(&task_type, &bindings);
        if outputs.len() != spec.outputs.len() {
            violations.push(Violation::new(
                ViolationCode::OutputArityMismatch,
                vec![task_type.clone()],
                format!(
                    "{} produces {} output(s) but {} name(s) were given",
                    task_type.local_name(),
                    outputs.len(),
                    spec.outputs.len()
                ),
            ));
            return Err(BuildError::Violations(Violations(violations)));
        }
        let mut minted = Vec::new();
        for (k, name) in spec.outputs.iter().enumerate() {
            if spec.outputs[..k].contains(name) {
                return Err(BuildError::DuplicateEntity(name.clone()));
            }
            minted.push(self.mint_entity(name)?);
        }

        self.task_count += 1;
        let k = self.task_count;
        let task = parse_iri(&format!("{}{}_task_{k}", self.ns, self.name))?;
        let method = parse_iri(&format!("{}{}_method_{k}", self.ns, self.name))?;
        let type_p = iri(RDF_TYPE);
        let g = &mut self.graph;
        g.add(&task, &type_p, task_type);
        g.add(&task, &iri(ds::HAS_METHOD), method.clone());
        g.add(&method, &type_p, method_type);
        for (p, v) in params {
            g.add(&method, &p, v);
        }
        for b in bindings {
            g.add(&task, &b.role, b.entity);
        }
        let mut out_refs = Vec::new();
        for ((role, structure), (e, name)) in outputs.into_iter().zip(minted.into_iter().zip(&spec.outputs)) {
            let structure = structure.expect("compatible inputs bind every copied role");
            g.add(&task, &role.property, e.clone());
            g.add(&e, &type_p, iri(ds::DATA_ENTITY));
            g.add(&e, &iri(ds::HAS_DATA_STRUCTURE), Literal::string(structure.as_str()));
            let r = EntityRef::new(e, structure);
            self.entities.insert(name.clone(), r.clone());
            out_refs.push(r);
        }
        match &self.last_task {
            None => g.add(&self.pipeline, &iri(ds::HAS_START_TASK), Term::Iri(task.clone())),
            Some(prev) => g.add(prev, &iri(ds::HAS_NEXT_TASK), Term::Iri(task.clone())),
        };
        self.last_task = Some(task.clone());
        Ok(TaskRef {
            iri: task,
            method,
            outputs: out_refs,
        })
    }

    /// Validates the whole graph and returns the frozen pipeline. The
    /// builder is left untouched, so repeated calls agree.
    pub fn finalize(&self) -> Result<PipelineKG, BuildError> {
        if self.task_count == 0 {
            return Err(BuildError::Violations(Violations(vec![Violation::new(
                ViolationCode::EmptyPipeline,
                vec![self.pipeline.clone()],
                "add at least one task before finalizing",
            )])));
        }
        validate_pipeline(self.schema, self.graph.clone()).map_err(BuildError::Violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Triple;

    fn builder() -> PipelineBuilder<'static> {
        PipelineBuilder::create_pipeline("demo", "data.csv").unwrap()
    }

    fn canvas_spec(name: &str) -> TaskSpec {
        TaskSpec::new(visu::CANVAS_TASK, visu::CANVAS_METHOD).output(name)
    }

    #[test]
    fn create_pipeline_records_path() {
        let b = builder();
        let p = iri("https://exekg.example/pipelines/demo#demo");
        assert_eq!(b.pipeline_iri(), &p);
        assert!(b.graph().contains(&Triple::new(p.clone(), iri(RDF_TYPE), iri(ds::PIPELINE))));
        assert!(b
            .graph()
            .contains(&Triple::new(p, iri(ds::HAS_INPUT_DATA_PATH), Literal::string("data.csv"))));
        assert_eq!(b.graph().len(), 2);
        for bad in ["has space", "", "1abc", "a#b"] {
            assert!(matches!(
                PipelineBuilder::create_pipeline(bad, "d.csv"),
                Err(BuildError::InvalidName(_))
            ));
        }
    }

    #[test]
    fn separate_builders_are_independent() {
        let mut a = builder();
        let b = builder();
        a.create_data_entity("x", "x", DataStructure::NumericColumn, "f").unwrap();
        assert_eq!(a.graph().len(), 6);
        assert_eq!(b.graph().len(), 2);
    }

    #[test]
    fn data_entity_adds_four_triples() {
        let mut b = builder();
        let before = b.graph().len();
        let e = b
            .create_data_entity("feat_x", "x", DataStructure::NumericColumn, "feature")
            .unwrap();
        assert_eq!(b.graph().len() - before, 4);
        assert_eq!(e.iri.as_str(), "https://exekg.example/pipelines/demo#demo_entity_feat_x");
        assert!(matches!(
            b.create_data_entity("feat_x", "y", DataStructure::NumericColumn, "f"),
            Err(BuildError::DuplicateEntity(_))
        ));
        assert!(matches!(
            b.create_data_entity_tagged("t", "y", "Tensor5D", "f"),
            Err(BuildError::UnknownStructure(_))
        ));
    }

    #[test]
    fn chain_edges() {
        let mut b = builder();
        let t1 = b.add_task(canvas_spec("c1")).unwrap();
        let has_next = iri(ds::HAS_NEXT_TASK);
        assert!(b.graph().contains(&Triple::new(
            b.pipeline_iri().clone(),
            iri(ds::HAS_START_TASK),
            t1.iri.clone()
        )));
        assert_eq!(b.graph().with_predicate(&has_next).count(), 0);
        let t2 = b.add_task(canvas_spec("c2")).unwrap();
        let edges: Vec<&Triple> = b.graph().with_predicate(&has_next).collect();
        assert_eq!(edges.len(), 1);
        assert_eq!(edges[0], &Triple::new(t1.iri, has_next.clone(), t2.iri));
    }

    #[test]
    fn rejects_incompatible_method_without_side_effects() {
        let mut b = builder();
        let c = b.add_task(canvas_spec("c")).unwrap();
        let x = b.create_data_entity("x", "x", DataStructure::NumericColumn, "f").unwrap();
        let before = b.graph().clone();
        let err = b
            .add_task(
                TaskSpec::new(visu::PLOT_TASK, ml::KNN_TRAIN_METHOD)
                    .input(visu::HAS_CANVAS, &c.outputs[0])
                    .input(visu::HAS_Y_DATA, &x)
                    .output("p"),
            )
            .unwrap_err();
        assert_eq!(err.violations()[0].code, ViolationCode::MethodNotApplicable);
        assert_eq!(b.graph(), &before);
        assert_eq!(b.task_count(), 1);
    }

    #[test]
    fn output_arity_is_checked() {
        let mut b = builder();
        let err = b
            .add_task(TaskSpec::new(visu::CANVAS_TASK, visu::CANVAS_METHOD))
            .unwrap_err();
        assert_eq!(err.violations()[0].code, ViolationCode::OutputArityMismatch);
        let err = b
            .add_task(canvas_spec("a").output("b"))
            .unwrap_err();
        assert_eq!(err.violations()[0].code, ViolationCode::OutputArityMismatch);
    }

    #[test]
    fn missing_required_param() {
        let mut b = builder();
        let x = b.create_data_entity("x", "x", DataStructure::NumericColumn, "f").unwrap();
        let y = b.create_data_entity("y", "y", DataStructure::NumericColumn, "l").unwrap();
        let s = b
            .add_task(
                TaskSpec::new(ml::DATA_SPLITTING_TASK, ml::TRAIN_TEST_SPLIT_METHOD)
                    .input(ml::HAS_FEATURE, &x)
                    .output("split"),
            )
            .unwrap();
        let err = b
            .add_task(
                TaskSpec::new(ml::TRAIN_TASK, ml::KNN_TRAIN_METHOD)
                    .input(ml::HAS_FEATURE, &x)
                    .input(ml::HAS_LABEL, &y)
                    .input(ml::HAS_SPLIT, &s.outputs[0])
                    .output("model"),
            )
            .unwrap_err();
        assert_eq!(err.violations()[0].code, ViolationCode::MissingParam);
    }

    #[test]
    fn finalize_rules() {
        let b = builder();
        assert_eq!(b.finalize().unwrap_err().violations()[0].code, ViolationCode::EmptyPipeline);

        let mut b = builder();
        let c = b.add_task(canvas_spec("c")).unwrap();
        let ghost = EntityRef::new(
            iri("https://exekg.example/pipelines/demo#demo_entity_ghost"),
            DataStructure::NumericColumn,
        );
        b.add_task(
            TaskSpec::new(visu::PLOT_TASK, visu::LINE_PLOT_METHOD)
                .input(visu::HAS_CANVAS, &c.outputs[0])
                .input(visu::HAS_Y_DATA, &ghost)
                .output("p"),
        )
        .unwrap();
        let err = b.finalize().unwrap_err();
        assert!(err.violations().iter().any(|v| v.code == ViolationCode::DanglingReference));
    }

    #[test]
    fn finalize_is_idempotent() {
        let mut b = builder();
        b.add_task(canvas_spec("c")).unwrap();
        let a = b.finalize().unwrap();
        let c = b.finalize().unwrap();
        assert_eq!(a, c);
        assert_eq!(a.to_turtle(), c.to_turtle());
        assert_eq!(a.chain().len(), 1);
        assert_eq!(a.dataset_path(), "data.csv");
    }
}
