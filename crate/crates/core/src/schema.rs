//! The shipped KG schemata and the compatibility rules derived from them.
//!
//! Four Turtle documents are embedded at build time: the upper `ds`
//! schema (pipelines, tasks, methods, data entities) and the bottom-level
//! `visu`, `stats` and `ml` schemata. Task signatures are described in the
//! graph itself: `ds:InputRole` / `ds:OutputRole` individuals give the
//! data entities a task consumes and produces, `ds:Parameter` individuals
//! give each method's datatype properties, and `ds:acceptsMethod` links a
//! task type to the method types that can implement it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::rdf::{
    match_bgp, parse_turtle, Datatype, Graph, Iri, Literal, PatternTerm, Term, TriplePattern,
    TurtleError, Variable, OWL_NS, RDFS_NS, RDF_TYPE,
};
use crate::vocab::{ds, iri};

pub const DOCUMENTS: [(&str, &str); 4] = [
    ("ds.ttl", include_str!("../schemata/ds.ttl")),
    ("visu.ttl", include_str!("../schemata/visu.ttl")),
    ("stats.ttl", include_str!("../schemata/stats.ttl")),
    ("ml.ttl", include_str!("../schemata/ml.ttl")),
];

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("schema document {document} does not parse: {source}")]
    Parse {
        document: String,
        #[source]
        source: TurtleError,
    },
    #[error("corrupt schema: {0}")]
    Corrupt(String),
    #[error("unknown task type <{0}>")]
    UnknownTask(Iri),
}

/// Type tag of a data entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DataStructure {
    NumericColumn,
    CategoricalColumn,
    Table,
    SplitIndices,
    Model,
    Metric,
    Canvas,
}

impl DataStructure {
    pub const ALL: [DataStructure; 7] = [
        DataStructure::NumericColumn,
        DataStructure::CategoricalColumn,
        DataStructure::Table,
        DataStructure::SplitIndices,
        DataStructure::Model,
        DataStructure::Metric,
        DataStructure::Canvas,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DataStructure::NumericColumn => "NumericColumn",
            DataStructure::CategoricalColumn => "CategoricalColumn",
            DataStructure::Table => "Table",
            DataStructure::SplitIndices => "SplitIndices",
            DataStructure::Model => "Model",
            DataStructure::Metric => "Metric",
            DataStructure::Canvas => "Canvas",
        }
    }

    pub fn iri(self) -> Iri {
        iri(&format!("{}{}", ds::NS, self.as_str()))
    }

    fn from_iri(i: &Iri) -> Option<Self> {
        (i.namespace() == ds::NS)
            .then(|| i.local_name().parse().ok())
            .flatten()
    }
}

impl fmt::Display for DataStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown data structure `{0}`")]
pub struct UnknownStructure(pub String);

impl FromStr for DataStructure {
    type Err = UnknownStructure;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DataStructure::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| UnknownStructure(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub property: Iri,
    pub datatype: Datatype,
    pub required: bool,
    pub default: Option<Literal>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputRole {
    pub property: Iri,
    pub position: i64,
    pub min: usize,
    /// `None` is unbounded.
    pub max: Option<usize>,
    pub accepts: Vec<DataStructure>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutputStructure {
    Fixed(DataStructure),
    /// Same structure as the entity bound to this input role.
    SameAs(Iri),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRole {
    pub property: Iri,
    pub position: i64,
    pub structure: OutputStructure,
}

/// Inputs and outputs of a task type, each in `ds:position` order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IoSpec {
    pub inputs: Vec<InputRole>,
    pub outputs: Vec<OutputRole>,
}

impl IoSpec {
    pub fn input(&self, property: &Iri) -> Option<&InputRole> {
        self.inputs.iter().find(|r| &r.property == property)
    }

    pub fn output(&self, property: &Iri) -> Option<&OutputRole> {
        self.outputs.iter().find(|r| &r.property == property)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    UnknownTask,
    UnknownMethod,
    MethodNotApplicable,
    MissingInput,
    TooManyInputs,
    UnknownInputRole,
    InputStructureMismatch,
    MissingParam,
    UnknownParam,
    DuplicateParam,
    ParamTypeMismatch,
    OutputArityMismatch,
    OutputStructureMismatch,
    MissingPipeline,
    MultiplePipelines,
    MissingDataPath,
    MissingStartTask,
    MissingMethod,
    MultipleMethods,
    NonlinearChain,
    Cycle,
    UnreachableTask,
    DanglingReference,
    ForwardReference,
    DuplicateOutput,
    UnknownStructure,
    MalformedEntity,
    UnknownProperty,
    EmptyPipeline,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::UnknownTask => "UNKNOWN_TASK",
            ViolationCode::UnknownMethod => "UNKNOWN_METHOD",
            ViolationCode::MethodNotApplicable => "METHOD_NOT_APPLICABLE",
            ViolationCode::MissingInput => "MISSING_INPUT",
            ViolationCode::TooManyInputs => "TOO_MANY_INPUTS",
            ViolationCode::UnknownInputRole => "UNKNOWN_INPUT_ROLE",
            ViolationCode::InputStructureMismatch => "INPUT_STRUCTURE_MISMATCH",
            ViolationCode::MissingParam => "MISSING_PARAM",
            ViolationCode::UnknownParam => "UNKNOWN_PARAM",
            ViolationCode::DuplicateParam => "DUPLICATE_PARAM",
            ViolationCode::ParamTypeMismatch => "PARAM_TYPE_MISMATCH",
            ViolationCode::OutputArityMismatch => "OUTPUT_ARITY_MISMATCH",
            ViolationCode::OutputStructureMismatch => "OUTPUT_STRUCTURE_MISMATCH",
            ViolationCode::MissingPipeline => "MISSING_PIPELINE",
            ViolationCode::MultiplePipelines => "MULTIPLE_PIPELINES",
            ViolationCode::MissingDataPath => "MISSING_DATA_PATH",
            ViolationCode::MissingStartTask => "MISSING_START_TASK",
            ViolationCode::MissingMethod => "MISSING_METHOD",
            ViolationCode::MultipleMethods => "MULTIPLE_METHODS",
            ViolationCode::NonlinearChain => "NONLINEAR_CHAIN",
            ViolationCode::Cycle => "CYCLE",
            ViolationCode::UnreachableTask => "UNREACHABLE_TASK",
            ViolationCode::DanglingReference => "DANGLING_REFERENCE",
            ViolationCode::ForwardReference => "FORWARD_REFERENCE",
            ViolationCode::DuplicateOutput => "DUPLICATE_OUTPUT",
            ViolationCode::UnknownStructure => "UNKNOWN_STRUCTURE",
            ViolationCode::MalformedEntity => "MALFORMED_ENTITY",
            ViolationCode::UnknownProperty => "UNKNOWN_PROPERTY",
            ViolationCode::EmptyPipeline => "EMPTY_PIPELINE",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub code: ViolationCode,
    pub iris: Vec<Iri>,
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, iris: Vec<Iri>, message: impl Into<String>) -> Self {
        Violation {
            code,
            iris,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)?;
        for i in &self.iris {
            write!(f, " <{i}>")?;
        }
        Ok(())
    }
}

/// An entity bound to an input role, with its declared structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleBinding {
    pub role: Iri,
    pub entity: Iri,
    pub structure: DataStructure,
}

#[derive(Debug, Clone)]
pub struct Schema {
    graph: Graph,
    task_types: BTreeSet<Iri>,
    method_types: BTreeSet<Iri>,
    compat: BTreeMap<Iri, BTreeSet<Iri>>,
    param_specs: BTreeMap<Iri, Vec<ParamSpec>>,
    io_specs: BTreeMap<Iri, IoSpec>,
    properties: BTreeSet<Iri>,
    classes: BTreeSet<Iri>,
}

fn var(name: &str) -> PatternTerm {
    PatternTerm::var(name)
}

fn bound<'a>(b: &'a crate::rdf::Binding, name: &str) -> &'a Term {
    &b[&Variable::new(name).expect("valid variable")]
}

fn corrupt(msg: impl Into<String>) -> SchemaError {
    SchemaError::Corrupt(msg.into())
}

fn int_of(graph: &Graph, subject: &Iri, property: &str) -> Result<Option<i64>, SchemaError> {
    match graph.object(subject, &iri(property)) {
        None => Ok(None),
        Some(t) => t
            .as_literal()
            .and_then(Literal::as_i64)
            .map(Some)
            .ok_or_else(|| corrupt(format!("<{subject}> {property} is not an integer"))),
    }
}

/// Loads the embedded schemata. Each call parses afresh; see
/// [`Schema::builtin`] for a shared instance.
pub fn load_builtin_schemata() -> Result<Schema, SchemaError> {
    let mut graph = Graph::new();
    for (name, text) in DOCUMENTS {
        let g = parse_turtle(text).map_err(|source| SchemaError::Parse {
            document: name.to_string(),
            source,
        })?;
        graph.extend(&g);
    }
    Schema::from_graph(graph)
}

impl Schema {
    /// Process-wide instance of the shipped schemata.
    pub fn builtin() -> &'static Schema {
        static BUILTIN: OnceLock<Schema> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            load_builtin_schemata().unwrap_or_else(|e| panic!("embedded schemata are broken: {e}"))
        })
    }

    pub fn from_graph(graph: Graph) -> Result<Schema, SchemaError> {
        let rdf_type = iri(RDF_TYPE);
        let sub_class = iri(&format!("{RDFS_NS}subClassOf"));
        let sub_property = iri(&format!("{RDFS_NS}subPropertyOf"));
        let owl_class = iri(&format!("{OWL_NS}Class"));

        let subclasses = |parent: &str| -> BTreeSet<Iri> {
            match_bgp(&graph, &[TriplePattern::new(var("c"), &sub_class, iri(parent))])
                .iter()
                .filter_map(|b| bound(b, "c").as_iri().cloned())
                .collect()
        };
        let task_types = subclasses(ds::TASK);
        let method_types = subclasses(ds::METHOD);

        let classes: BTreeSet<Iri> = graph
            .subjects_with(&rdf_type, &Term::Iri(owl_class.clone()))
            .cloned()
            .collect();
        let properties: BTreeSet<Iri> = ["ObjectProperty", "DatatypeProperty", "AnnotationProperty"]
            .iter()
            .flat_map(|k| {
                let kind = Term::Iri(iri(&format!("{OWL_NS}{k}")));
                graph
                    .subjects_with(&rdf_type, &kind)
                    .cloned()
                    .collect::<Vec<_>>()
            })
            .collect();

        let mut compat: BTreeMap<Iri, BTreeSet<Iri>> =
            task_types.iter().map(|t| (t.clone(), BTreeSet::new())).collect();
        for b in match_bgp(
            &graph,
            &[TriplePattern::new(var("t"), iri(ds::ACCEPTS_METHOD), var("m"))],
        ) {
            let (Some(t), Some(m)) = (bound(&b, "t").as_iri(), bound(&b, "m").as_iri()) else {
                return Err(corrupt("ds:acceptsMethod must link two IRIs"));
            };
            let row = compat
                .get_mut(t)
                .ok_or_else(|| corrupt(format!("<{t}> accepts methods but is not a task type")))?;
            if !method_types.contains(m) {
                return Err(corrupt(format!("<{m}> is accepted by <{t}> but is not a method type")));
            }
            row.insert(m.clone());
        }
        for m in &method_types {
            if !compat.values().any(|row| row.contains(m)) {
                return Err(corrupt(format!("method type <{m}> is not accepted by any task")));
            }
        }
        for c in task_types.iter().chain(&method_types) {
            if !classes.contains(c) {
                return Err(corrupt(format!("<{c}> is not declared as owl:Class")));
            }
        }

        let declared = |i: &Iri| graph.with_subject_predicate(i, &rdf_type).next().is_some();
        let is_sub_property = |p: &Iri, parent: &str| {
            graph.contains(&crate::rdf::Triple::new(p.clone(), sub_property.clone(), iri(parent)))
        };

        let mut param_specs: BTreeMap<Iri, Vec<ParamSpec>> =
            method_types.iter().map(|m| (m.clone(), Vec::new())).collect();
        let params = match_bgp(
            &graph,
            &[
                TriplePattern::new(var("s"), &rdf_type, iri(ds::PARAMETER)),
                TriplePattern::new(var("s"), iri(ds::FOR_METHOD), var("m")),
                TriplePattern::new(var("s"), iri(ds::PARAMETER_PROPERTY), var("p")),
                TriplePattern::new(var("s"), iri(ds::IS_REQUIRED), var("r")),
            ],
        );
        let range = iri(&format!("{RDFS_NS}range"));
        for b in &params {
            let spec = bound(b, "s").as_iri().expect("subject");
            let (Some(m), Some(p)) = (bound(b, "m").as_iri(), bound(b, "p").as_iri()) else {
                return Err(corrupt(format!("parameter <{spec}> must reference IRIs")));
            };
            let required = bound(b, "r")
                .as_literal()
                .and_then(Literal::as_bool)
                .ok_or_else(|| corrupt(format!("parameter <{spec}> ds:isRequired is not boolean")))?;
            if !declared(p) || !properties.contains(p) {
                return Err(corrupt(format!("parameter property <{p}> is not declared")));
            }
            let datatype = graph
                .object(p, &range)
                .and_then(Term::as_iri)
                .and_then(|r| Datatype::from_iri(r.as_str()))
                .ok_or_else(|| corrupt(format!("<{p}> has no supported rdfs:range")))?;
            let default = match graph.object(spec, &iri(ds::DEFAULT_VALUE)) {
                None => None,
                Some(Term::Literal(l)) if l.datatype() == datatype => Some(l.clone()),
                Some(other) => {
                    return Err(corrupt(format!("default {other} of <{spec}> is not a {datatype}")))
                }
            };
            let row = param_specs
                .get_mut(m)
                .ok_or_else(|| corrupt(format!("parameter <{spec}> names unknown method <{m}>")))?;
            row.push(ParamSpec {
                property: p.clone(),
                datatype,
                required,
                default,
            });
        }
        for row in param_specs.values_mut() {
            row.sort_by(|a, b| a.property.cmp(&b.property));
        }

        let mut io_specs: BTreeMap<Iri, IoSpec> =
            task_types.iter().map(|t| (t.clone(), IoSpec::default())).collect();
        for (kind, parent) in [(ds::INPUT_ROLE, ds::HAS_INPUT), (ds::OUTPUT_ROLE, ds::HAS_OUTPUT)] {
            let roles = match_bgp(
                &graph,
                &[
                    TriplePattern::new(var("s"), &rdf_type, iri(kind)),
                    TriplePattern::new(var("s"), iri(ds::FOR_TASK), var("t")),
                    TriplePattern::new(var("s"), iri(ds::ROLE_PROPERTY), var("p")),
                    TriplePattern::new(var("s"), iri(ds::POSITION), var("pos")),
                ],
            );
            for b in &roles {
                let spec = bound(b, "s").as_iri().expect("subject");
                let (Some(t), Some(p)) = (bound(b, "t").as_iri(), bound(b, "p").as_iri()) else {
                    return Err(corrupt(format!("role <{spec}> must reference IRIs")));
                };
                let position = bound(b, "pos")
                    .as_literal()
                    .and_then(Literal::as_i64)
                    .ok_or_else(|| corrupt(format!("role <{spec}> position is not an integer")))?;
                if !declared(p) || !is_sub_property(p, parent) {
                    return Err(corrupt(format!(
                        "role property <{p}> must be declared as a sub-property of <{parent}>"
                    )));
                }
                let io = io_specs
                    .get_mut(t)
                    .ok_or_else(|| corrupt(format!("role <{spec}> names unknown task <{t}>")))?;
                let structures = |prop: &str| -> Result<Vec<DataStructure>, SchemaError> {
                    let mut out: Vec<DataStructure> = graph
                        .objects(spec, &iri(prop))
                        .map(|o| {
                            o.as_iri()
                                .filter(|i| declared(i))
                                .and_then(DataStructure::from_iri)
                                .ok_or_else(|| corrupt(format!("role <{spec}> names unknown structure {o}")))
                        })
                        .collect::<Result<_, _>>()?;
                    out.sort();
                    Ok(out)
                };
                if kind == ds::INPUT_ROLE {
                    let min = int_of(&graph, spec, ds::MIN_COUNT)?
                        .ok_or_else(|| corrupt(format!("input role <{spec}> lacks ds:minCount")))?;
                    let max = int_of(&graph, spec, ds::MAX_COUNT)?;
                    let accepts = structures(ds::ACCEPTS_STRUCTURE)?;
                    if min < 0 || max.is_some_and(|m| m < min.max(1)) || accepts.is_empty() {
                        return Err(corrupt(format!("input role <{spec}> is inconsistent")));
                    }
                    io.inputs.push(InputRole {
                        property: p.clone(),
                        position,
                        min: min as usize,
                        max: max.map(|m| m as usize),
                        accepts,
                    });
                } else {
                    let fixed = structures(ds::PRODUCES_STRUCTURE)?;
                    let same: Vec<&Iri> = graph
                        .objects(spec, &iri(ds::SAME_STRUCTURE_AS))
                        .filter_map(Term::as_iri)
                        .collect();
                    let structure = match (fixed.as_slice(), same.as_slice()) {
                        ([s], []) => OutputStructure::Fixed(*s),
                        ([], [p]) => OutputStructure::SameAs((*p).clone()),
                        _ => return Err(corrupt(format!("output role <{spec}> needs exactly one structure"))),
                    };
                    io.outputs.push(OutputRole {
                        property: p.clone(),
                        position,
                        structure,
                    });
                }
            }
        }
        for (t, io) in io_specs.iter_mut() {
            io.inputs.sort_by_key(|r| r.position);
            io.outputs.sort_by_key(|r| r.position);
            for out in &io.outputs {
                if let OutputStructure::SameAs(p) = &out.structure {
                    if io.input(p).is_none() {
                        return Err(corrupt(format!("output of <{t}> copies the structure of non-input <{p}>")));
                    }
                }
            }
            let mut props: Vec<&Iri> = io
                .inputs
                .iter()
                .map(|r| &r.property)
                .chain(io.outputs.iter().map(|r| &r.property))
                .collect();
            let n = props.len();
            props.sort();
            props.dedup();
            if props.len() != n {
                return Err(corrupt(format!("<{t}> uses a role property twice")));
            }
        }
        for s in DataStructure::ALL {
            if !declared(&s.iri()) {
                return Err(corrupt(format!("data structure {s} is not declared")));
            }
        }

        Ok(Schema {
            graph,
            task_types,
            method_types,
            compat,
            param_specs,
            io_specs,
            properties,
            classes,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn task_types(&self) -> &BTreeSet<Iri> {
        &self.task_types
    }

    pub fn method_types(&self) -> &BTreeSet<Iri> {
        &self.method_types
    }

    pub fn is_task_type(&self, i: &Iri) -> bool {
        self.task_types.contains(i)
    }

    pub fn is_method_type(&self, i: &Iri) -> bool {
        self.method_types.contains(i)
    }

    pub fn is_property(&self, i: &Iri) -> bool {
        self.properties.contains(i)
    }

    pub fn is_class(&self, i: &Iri) -> bool {
        self.classes.contains(i)
    }

    pub fn methods_for_task(&self, task: &Iri) -> Result<&BTreeSet<Iri>, SchemaError> {
        self.compat
            .get(task)
            .ok_or_else(|| SchemaError::UnknownTask(task.clone()))
    }

    pub fn io_spec(&self, task: &Iri) -> Option<&IoSpec> {
        self.io_specs.get(task)
    }

    pub fn param_specs(&self, method: &Iri) -> &[ParamSpec] {
        self.param_specs.get(method).map_or(&[], Vec::as_slice)
    }

    pub fn param_spec(&self, method: &Iri, property: &Iri) -> Option<&ParamSpec> {
        self.param_specs(method).iter().find(|s| &s.property == property)
    }

    pub fn label(&self, i: &Iri) -> Option<&str> {
        self.graph
            .object(i, &iri(&format!("{RDFS_NS}label")))
            .and_then(Term::as_literal)
            .and_then(Literal::as_str)
    }

    /// True if `property` is an input role of any task type.
    pub fn is_input_role(&self, property: &Iri) -> bool {
        self.io_specs.values().any(|io| io.input(property).is_some())
    }

    pub fn is_output_role(&self, property: &Iri) -> bool {
        self.io_specs.values().any(|io| io.output(property).is_some())
    }

    /// Structures of the outputs of `task`, in position order, given the
    /// bound inputs. `None` where a copied input role is unbound.
    pub fn output_structures(
        &self,
        task: &Iri,
        inputs: &[RoleBinding],
    ) -> Vec<(OutputRole, Option<DataStructure>)> {
        let Some(io) = self.io_spec(task) else {
            return Vec::new();
        };
        io.outputs
            .iter()
            .map(|out| {
                let s = match &out.structure {
                    OutputStructure::Fixed(s) => Some(*s),
                    OutputStructure::SameAs(p) => {
                        inputs.iter().find(|b| &b.role == p).map(|b| b.structure)
                    }
                };
                (out.clone(), s)
            })
            .collect()
    }

    /// Violations of the schema's rules for one task: method applicability,
    /// input roles and structures, and method parameters. Empty when the
    /// task is well-formed. Order is deterministic.
    pub fn check_compatibility(
        &self,
        task: &Iri,
        method: &Iri,
        inputs: &[RoleBinding],
        params: &[(Iri, Literal)],
    ) -> Vec<Violation> {
        use ViolationCode::*;
        let mut out = Vec::new();
        let Some(io) = self.io_spec(task) else {
            out.push(Violation::new(UnknownTask, vec![task.clone()], "not a task type of the schema"));
            return out;
        };
        let method_known = self.is_method_type(method);
        if !method_known {
            out.push(Violation::new(UnknownMethod, vec![method.clone()], "not a method type of the schema"));
        } else if !self.compat[task].contains(method) {
            out.push(Violation::new(
                MethodNotApplicable,
                vec![task.clone(), method.clone()],
                format!(
                    "method {} cannot implement task {}",
                    method.local_name(),
                    task.local_name()
                ),
            ));
        }

        for b in inputs {
            if io.input(&b.role).is_none() {
                out.push(Violation::new(
                    UnknownInputRole,
                    vec![task.clone(), b.role.clone()],
                    format!("{} is not an input of {}", b.role.local_name(), task.local_name()),
                ));
            }
        }
        for role in &io.inputs {
            let bound: Vec<&RoleBinding> = inputs.iter().filter(|b| b.role == role.property).collect();
            if bound.len() < role.min {
                out.push(Violation::new(
                    MissingInput,
                    vec![task.clone(), role.property.clone()],
                    format!("{} needs at least {} input(s)", role.property.local_name(), role.min),
                ));
            }
            if let Some(max) = role.max.filter(|m| bound.len() > *m) {
                out.push(Violation::new(
                    TooManyInputs,
                    vec![task.clone(), role.property.clone()],
                    format!("{} takes at most {max} input(s)", role.property.local_name()),
                ));
            }
            for b in bound {
                if !role.accepts.contains(&b.structure) {
                    let accepted: Vec<&str> = role.accepts.iter().map(|s| s.as_str()).collect();
                    out.push(Violation::new(
                        InputStructureMismatch,
                        vec![role.property.clone(), b.entity.clone()],
                        format!(
                            "{} is a {} but {} accepts {}",
                            b.entity.local_name(),
                            b.structure,
                            role.property.local_name(),
                            accepted.join("|")
                        ),
                    ));
                }
            }
        }

        if method_known {
            let specs = self.param_specs(method);
            let mut seen = BTreeSet::new();
            for (property, value) in params {
                match specs.iter().find(|s| &s.property == property) {
                    None => out.push(Violation::new(
                        UnknownParam,
                        vec![method.clone(), property.clone()],
                        format!("{} is not a parameter of {}", property.local_name(), method.local_name()),
                    )),
                    Some(spec) => {
                        if !seen.insert(property) {
                            out.push(Violation::new(
                                DuplicateParam,
                                vec![method.clone(), property.clone()],
                                format!("{} given more than once", property.local_name()),
                            ));
                        }
                        if value.datatype() != spec.datatype {
                            out.push(Violation::new(
                                ParamTypeMismatch,
                                vec![method.clone(), property.clone()],
                                format!(
                                    "{} expects {} but got {value}",
                                    property.local_name(),
                                    spec.datatype
                                ),
                            ));
                        }
                    }
                }
            }
            for spec in specs.iter().filter(|s| s.required) {
                if !params.iter().any(|(p, _)| p == &spec.property) {
                    out.push(Violation::new(
                        MissingParam,
                        vec![method.clone(), spec.property.clone()],
                        format!("{} requires {}", method.local_name(), spec.property.local_name()),
                    ));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::{ml, stats, visu};

    fn schema() -> &'static Schema {
        Schema::builtin()
    }

    fn set(items: &[&str]) -> BTreeSet<Iri> {
        items.iter().map(|s| iri(s)).collect()
    }

    #[test]
    fn loads_and_is_idempotent() {
        let a = load_builtin_schemata().unwrap();
        let b = load_builtin_schemata().unwrap();
        assert!(a.graph().graph_equal(b.graph()));
        assert_eq!(a.task_types(), b.task_types());
        assert_eq!(a.task_types().len(), 9);
        assert_eq!(a.method_types().len(), 18);
    }

    #[test]
    fn shipped_task_families() {
        let s = schema();
        assert!(s.is_task_type(&iri(visu::CANVAS_TASK)));
        assert!(s.is_task_type(&iri(visu::PLOT_TASK)));
        assert_eq!(
            s.methods_for_task(&iri(ml::TRAIN_TASK)).unwrap(),
            &set(&[ml::KNN_TRAIN_METHOD, ml::LINREG_TRAIN_METHOD, ml::MLP_TRAIN_METHOD])
        );
        assert_eq!(
            s.methods_for_task(&iri(stats::STATISTIC_TASK)).unwrap(),
            &set(&[stats::MEAN_METHOD, stats::STD_METHOD, stats::IQR_METHOD])
        );
    }

    #[test]
    fn methods_for_task_rows() {
        let s = schema();
        assert_eq!(
            s.methods_for_task(&iri(visu::PLOT_TASK)).unwrap(),
            &set(&[visu::LINE_PLOT_METHOD, visu::SCATTER_PLOT_METHOD, visu::BAR_PLOT_METHOD])
        );
        assert_eq!(
            s.methods_for_task(&iri(ml::DATA_SPLITTING_TASK)).unwrap(),
            &set(&[ml::TRAIN_TEST_SPLIT_METHOD])
        );
        let err = s.methods_for_task(&iri("https://exekg.example/ml#Nope")).unwrap_err();
        assert!(matches!(err, SchemaError::UnknownTask(_)));
    }

    #[test]
    fn every_method_type_reachable_and_params_typed() {
        let s = schema();
        for m in s.method_types() {
            assert!(s.task_types().iter().any(|t| s.methods_for_task(t).unwrap().contains(m)));
            for p in s.param_specs(m) {
                if let Some(d) = &p.default {
                    assert_eq!(d.datatype(), p.datatype);
                }
                assert!(s.graph().with_subject(&p.property).next().is_some());
            }
        }
        let k = s.param_spec(&iri(ml::KNN_TRAIN_METHOD), &iri(ml::HAS_K)).unwrap();
        assert!(k.required);
        assert_eq!(k.datatype, Datatype::Integer);
        let ratio = s
            .param_spec(&iri(ml::TRAIN_TEST_SPLIT_METHOD), &iri(ml::HAS_SPLIT_RATIO))
            .unwrap();
        assert_eq!(ratio.default, Some(Literal::double(0.8)));
    }

    #[test]
    fn io_specs_are_ordered() {
        let io = schema().io_spec(&iri(ml::TEST_TASK)).unwrap();
        let roles: Vec<&str> = io.inputs.iter().map(|r| r.property.local_name()).collect();
        assert_eq!(roles, ["hasModel", "hasFeature", "hasLabel", "hasSplit"]);
        assert_eq!(io.outputs.len(), 2);
        assert_eq!(io.outputs[0].structure, OutputStructure::SameAs(iri(ml::HAS_LABEL)));
    }

    fn binding(role: &str, name: &str, structure: DataStructure) -> RoleBinding {
        RoleBinding {
            role: iri(role),
            entity: iri(&format!("https://exekg.example/pipelines/t#{name}")),
            structure,
        }
    }

    #[test]
    fn method_not_applicable() {
        let v = schema().check_compatibility(
            &iri(visu::PLOT_TASK),
            &iri(ml::KNN_TRAIN_METHOD),
            &[],
            &[],
        );
        assert!(v.iter().any(|v| v.code == ViolationCode::MethodNotApplicable), "{v:?}");
    }

    #[test]
    fn missing_required_param() {
        use DataStructure::*;
        let inputs = [
            binding(ml::HAS_FEATURE, "x", NumericColumn),
            binding(ml::HAS_LABEL, "y", CategoricalColumn),
            binding(ml::HAS_SPLIT, "s", SplitIndices),
        ];
        let v = schema().check_compatibility(&iri(ml::TRAIN_TASK), &iri(ml::KNN_TRAIN_METHOD), &inputs, &[]);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::MissingParam);
        assert_eq!(v[0].iris[1], iri(ml::HAS_K));

        let ok = schema().check_compatibility(
            &iri(ml::TRAIN_TASK),
            &iri(ml::KNN_TRAIN_METHOD),
            &inputs,
            &[(iri(ml::HAS_K), Literal::integer(3))],
        );
        assert!(ok.is_empty(), "{ok:?}");
    }

    #[test]
    fn input_and_param_violations() {
        use DataStructure::*;
        use ViolationCode::*;
        let v = schema().check_compatibility(
            &iri(ml::TRAIN_TASK),
            &iri(ml::KNN_TRAIN_METHOD),
            &[
                binding(ml::HAS_FEATURE, "x", CategoricalColumn),
                binding(ml::HAS_LABEL, "y", NumericColumn),
                binding(ml::HAS_LABEL, "z", NumericColumn),
                binding(visu::HAS_CANVAS, "c", Canvas),
            ],
            &[
                (iri(ml::HAS_K), Literal::double(3.0)),
                (iri(ml::HAS_K), Literal::integer(3)),
                (iri(visu::HAS_SLOT), Literal::integer(0)),
            ],
        );
        let codes: Vec<ViolationCode> = v.iter().map(|v| v.code).collect();
        assert_eq!(
            codes,
            [
                UnknownInputRole,
                InputStructureMismatch,
                TooManyInputs,
                MissingInput,
                ParamTypeMismatch,
                DuplicateParam,
                UnknownParam,
            ]
        );
        let unknown = schema().check_compatibility(
            &iri("https://exekg.example/ml#Nope"),
            &iri(ml::KNN_TRAIN_METHOD),
            &[],
            &[],
        );
        assert_eq!(unknown[0].code, UnknownTask);
    }

    #[test]
    fn structure_tags_round_trip() {
        for s in DataStructure::ALL {
            assert_eq!(s.as_str().parse::<DataStructure>().unwrap(), s);
            assert_eq!(DataStructure::from_iri(&s.iri()), Some(s));
        }
        assert!("Tensor5D".parse::<DataStructure>().is_err());
    }

    #[test]
    fn corrupt_schema_is_rejected() {
        let mut g = Graph::new();
        for (_, text) in DOCUMENTS {
            g.extend(&parse_turtle(text).unwrap());
        }
        let orphan = iri("https://exekg.example/ml#OrphanMethod");
        g.add(&orphan, &iri(&format!("{RDFS_NS}subClassOf")), iri(ds::METHOD));
        g.add(&orphan, &iri(RDF_TYPE), iri(&format!("{OWL_NS}Class")));
        let err = Schema::from_graph(g).unwrap_err();
        assert!(matches!(err, SchemaError::Corrupt(ref m) if m.contains("OrphanMethod")), "{err}");
    }
}
