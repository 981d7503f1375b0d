//! Runs a validated pipeline: walks the `ds:hasNextTask` chain, resolves
//! each task from the graph, and dispatches its method type to the
//! implementation registered for it.

mod builtin;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::methods::ml::{MlError, Model, Metric, SplitIndices};
use crate::methods::stats::StatsError;
use crate::methods::visu::{render_svg, Canvas, VisuError};
use crate::pipeline::PipelineKG;
use crate::rdf::{match_bgp, Graph, Iri, Literal, PatternTerm, Term, TriplePattern, Variable, RDF_TYPE};
use crate::schema::{DataStructure, Schema};
use crate::tabular::{ColumnData, Table, TableError};
use crate::vocab::{ds, iri};

/// A value threaded between tasks.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Table(Arc<Table>),
    Column(ColumnData),
    Split(SplitIndices),
    Model(Model),
    Metric(Metric),
    Canvas(Canvas),
}

impl Value {
    pub fn structure(&self) -> DataStructure {
        match self {
            Value::Table(_) => DataStructure::Table,
            Value::Column(ColumnData::Numeric(_)) => DataStructure::NumericColumn,
            Value::Column(ColumnData::Categorical(_)) => DataStructure::CategoricalColumn,
            Value::Split(_) => DataStructure::SplitIndices,
            Value::Model(_) => DataStructure::Model,
            Value::Metric(_) => DataStructure::Metric,
            Value::Canvas(_) => DataStructure::Canvas,
        }
    }
}

/// Failure reported by a method implementation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MethodError {
    #[error("{0}")]
    Message(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Visu(#[from] VisuError),
}

impl MethodError {
    pub fn msg(m: impl Into<String>) -> Self {
        MethodError::Message(m.into())
    }
}

/// A native implementation of one method type.
///
/// Returns one value per output role of the task, in signature order.
pub trait Method: Send + Sync {
    fn run(&self, call: &MethodCall<'_>) -> Result<Vec<Value>, MethodError>;
}

impl<F> Method for F
where
    F: Fn(&MethodCall<'_>) -> Result<Vec<Value>, MethodError> + Send + Sync,
{
    fn run(&self, call: &MethodCall<'_>) -> Result<Vec<Value>, MethodError> {
        self(call)
    }
}

/// Everything a method sees: its resolved inputs by role, its parameters
/// with schema defaults filled in, and the dataset.
pub struct MethodCall<'a> {
    pub task: &'a ResolvedTask,
    /// Per role, `(entity, value)` pairs ordered by entity IRI.
    pub inputs: BTreeMap<Iri, Vec<(Iri, &'a Value)>>,
    pub params: BTreeMap<Iri, Literal>,
    pub dataset: &'a Table,
}

impl<'a> MethodCall<'a> {
    pub fn inputs(&self, role: &str) -> Vec<&'a Value> {
        self.inputs
            .get(&iri(role))
            .map(|v| v.iter().map(|(_, val)| *val).collect())
            .unwrap_or_default()
    }

    pub fn optional_input(&self, role: &str) -> Option<&'a Value> {
        self.inputs(role).into_iter().next()
    }

    pub fn input(&self, role: &str) -> Result<&'a Value, MethodError> {
        self.optional_input(role)
            .ok_or_else(|| MethodError::msg(format!("missing input {role}")))
    }

    /// Entity IRIs bound to `role`, in the same order as [`inputs`](Self::inputs).
    pub fn input_entities(&self, role: &str) -> Vec<&Iri> {
        self.inputs
            .get(&iri(role))
            .map(|v| v.iter().map(|(e, _)| e).collect())
            .unwrap_or_default()
    }

    pub fn param(&self, property: &str) -> Option<&Literal> {
        self.params.get(&iri(property))
    }

    pub fn param_i64(&self, property: &str) -> Result<i64, MethodError> {
        self.param(property)
            .and_then(Literal::as_i64)
            .ok_or_else(|| MethodError::msg(format!("integer parameter {property} is missing")))
    }

    pub fn param_f64(&self, property: &str) -> Result<f64, MethodError> {
        self.param(property)
            .and_then(Literal::as_f64)
            .ok_or_else(|| MethodError::msg(format!("numeric parameter {property} is missing")))
    }

    pub fn param_str(&self, property: &str) -> Option<&str> {
        self.param(property).and_then(Literal::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("method type <{0}> is already registered")]
    Duplicate(Iri),
}

/// Method type IRI to implementation.
#[derive(Clone, Default)]
pub struct MethodRegistry {
    methods: BTreeMap<Iri, Arc<dyn Method>>,
}

impl fmt::Debug for MethodRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.methods.keys()).finish()
    }
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Implementations for every method type of the shipped schemata.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        builtin::register_all(&mut r);
        r
    }

    pub fn register(&mut self, method_type: Iri, method: impl Method + 'static) -> Result<(), RegistryError> {
        if self.methods.contains_key(&method_type) {
            return Err(RegistryError::Duplicate(method_type));
        }
        self.methods.insert(method_type, Arc::new(method));
        Ok(())
    }

    pub fn unregister(&mut self, method_type: &Iri) -> bool {
        self.methods.remove(method_type).is_some()
    }

    pub fn contains(&self, method_type: &Iri) -> bool {
        self.methods.contains_key(method_type)
    }

    pub fn get(&self, method_type: &Iri) -> Option<&Arc<dyn Method>> {
        self.methods.get(method_type)
    }

    pub fn method_types(&self) -> impl Iterator<Item = &Iri> {
        self.methods.keys()
    }

    /// Method types of `schema` with no registered implementation.
    pub fn missing_for(&self, schema: &Schema) -> Vec<Iri> {
        schema
            .method_types()
            .iter()
            .filter(|m| !self.contains(m))
            .cloned()
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("no implementation registered for method type <{0}>")]
    UnregisteredMethod(Iri),
    #[error("task <{task}> is malformed; missing: {}", missing.join(", "))]
    MalformedTask { task: Iri, missing: Vec<String> },
    #[error("entity <{entity}> reads column `{column}`, which the dataset lacks")]
    MissingColumn { entity: Iri, column: String },
    #[error("entity <{entity}> is declared {expected} but column `{column}` is not numeric")]
    ColumnKind {
        entity: Iri,
        column: String,
        expected: DataStructure,
    },
    #[error("no value for <{entity}> when running task <{task}>")]
    MissingValue { task: Iri, entity: Iri },
    #[error("<{0}> was written twice")]
    Reassigned(Iri),
    #[error("task <{task}> failed: {source}")]
    Task {
        task: Iri,
        #[source]
        source: MethodError,
    },
    #[error("task <{task}> returned {got} value(s) for {expected} output(s)")]
    OutputCount { task: Iri, expected: usize, got: usize },
    #[error("task <{task}> produced a {got} for <{entity}>, declared {expected}")]
    OutputKind {
        task: Iri,
        entity: Iri,
        expected: DataStructure,
        got: DataStructure,
    },
    #[error("cannot render the canvas of task <{task}>: {source}")]
    Render {
        task: Iri,
        #[source]
        source: VisuError,
    },
    #[error("dataset: {0}")]
    Dataset(#[from] TableError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Single-assignment store of computed values.
#[derive(Debug, Default)]
pub struct ExecutionContext {
    values: BTreeMap<Iri, Value>,
    write_log: Vec<Iri>,
}

impl ExecutionContext {
    pub fn insert(&mut self, entity: Iri, value: Value) -> Result<(), ExecError> {
        if self.values.contains_key(&entity) {
            return Err(ExecError::Reassigned(entity));
        }
        self.write_log.push(entity.clone());
        self.values.insert(entity, value);
        Ok(())
    }

    pub fn get(&self, entity: &Iri) -> Option<&Value> {
        self.values.get(entity)
    }

    pub fn values(&self) -> &BTreeMap<Iri, Value> {
        &self.values
    }

    /// Every write, in order.
    pub fn write_log(&self) -> &[Iri] {
        &self.write_log
    }
}

/// A task as read back from the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTask {
    pub iri: Iri,
    pub task_type: Iri,
    pub method: Iri,
    pub method_type: Iri,
    /// `(role, entity)`, sorted.
    pub inputs: Vec<(Iri, Iri)>,
    /// `(property, value)` as stated on the method individual.
    pub params: Vec<(Iri, Literal)>,
    /// `(role, entity)` in signature order.
    pub outputs: Vec<(Iri, Iri)>,
    pub next: Option<Iri>,
}

fn v(name: &str) -> PatternTerm {
    PatternTerm::var(name)
}

fn get<'b>(b: &'b crate::rdf::Binding, name: &str) -> &'b Term {
    &b[&Variable::new(name).expect("valid variable")]
}

/// Reads a task's type, method, inputs, parameters, outputs and successor
/// with graph-pattern queries.
pub fn resolve_task(schema: &Schema, graph: &Graph, task: &Iri) -> Result<ResolvedTask, ExecError> {
    let mut missing = Vec::new();
    let type_p = iri(RDF_TYPE);
    let task_types: Vec<Iri> = match_bgp(graph, &[TriplePattern::new(task, &type_p, v("t"))])
        .iter()
        .filter_map(|b| get(b, "t").as_iri().cloned())
        .filter(|t| schema.is_task_type(t))
        .collect();
    let methods = match_bgp(
        graph,
        &[
            TriplePattern::new(task, iri(ds::HAS_METHOD), v("m")),
            TriplePattern::new(v("m"), &type_p, v("mt")),
        ],
    );
    let method = methods.iter().find_map(|b| {
        let mt = get(b, "mt").as_iri()?;
        schema
            .is_method_type(mt)
            .then(|| (get(b, "m").as_iri().cloned(), mt.clone()))
    });
    if task_types.len() != 1 {
        missing.push(format!("one rdf:type among the task types (found {})", task_types.len()));
    }
    let Some((Some(method), method_type)) = method else {
        missing.push("ds:hasMethod with a typed method individual".to_string());
        return Err(ExecError::MalformedTask {
            task: task.clone(),
            missing,
        });
    };
    if !missing.is_empty() {
        return Err(ExecError::MalformedTask {
            task: task.clone(),
            missing,
        });
    }
    let task_type = task_types.into_iter().next().expect("checked above");

    let mut inputs = Vec::new();
    let mut outputs_by_role: BTreeMap<Iri, Iri> = BTreeMap::new();
    for b in match_bgp(graph, &[TriplePattern::new(task, v("p"), v("o"))]) {
        let (Some(p), Some(o)) = (get(&b, "p").as_iri(), get(&b, "o").as_iri()) else {
            continue;
        };
        if schema.is_input_role(p) {
            inputs.push((p.clone(), o.clone()));
        } else if schema.is_output_role(p) {
            outputs_by_role.insert(p.clone(), o.clone());
        }
    }
    let mut outputs = Vec::new();
    if let Some(io) = schema.io_spec(&task_type) {
        for role in &io.outputs {
            match outputs_by_role.get(&role.property) {
                Some(e) => outputs.push((role.property.clone(), e.clone())),
                None => missing.push(format!("output {}", role.property)),
            }
        }
    }
    if !missing.is_empty() {
        return Err(ExecError::MalformedTask {
            task: task.clone(),
            missing,
        });
    }
    let params = match_bgp(graph, &[TriplePattern::new(&method, v("p"), v("val"))])
        .into_iter()
        .filter_map(|b| {
            let p = get(&b, "p").as_iri()?.clone();
            let l = get(&b, "val").as_literal()?.clone();
            Some((p, l))
        })
        .collect();
    let next = match_bgp(graph, &[TriplePattern::new(task, iri(ds::HAS_NEXT_TASK), v("n"))])
        .first()
        .and_then(|b| get(b, "n").as_iri().cloned());
    Ok(ResolvedTask {
        iri: task.clone(),
        task_type,
        method,
        method_type,
        inputs,
        params,
        outputs,
        next,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRecord {
    pub iri: String,
    pub method: String,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExecutionReport {
    pub tasks: Vec<TaskRecord>,
    /// Keyed by the producing entity's name.
    pub metrics: BTreeMap<String, Metric>,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
}

impl ExecutionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Same report with wall-times zeroed, for comparing runs.
    pub fn without_timings(&self) -> ExecutionReport {
        let mut r = self.clone();
        for t in &mut r.tasks {
            t.millis = 0.0;
        }
        r
    }
}

/// Result of running a pipeline in memory.
#[derive(Debug)]
pub struct Execution {
    pub report: ExecutionReport,
    pub context: ExecutionContext,
    /// Rendered canvases: path relative to the output directory, SVG text.
    pub svgs: Vec<(String, String)>,
}

/// The entity's name within its pipeline: the local name after
/// `_entity_`, or the whole local name.
pub fn entity_name(entity: &Iri) -> &str {
    let local = entity.local_name();
    local.split_once("_entity_").map_or(local, |(_, n)| n)
}

pub struct Executor<'a> {
    schema: &'a Schema,
    registry: &'a MethodRegistry,
}

impl<'a> Executor<'a> {
    pub fn new(schema: &'a Schema, registry: &'a MethodRegistry) -> Self {
        Executor { schema, registry }
    }

    fn bind_dataset(&self, kg: &PipelineKG, data: &Arc<Table>, ctx: &mut ExecutionContext) -> Result<(), ExecError> {
        let g = kg.graph();
        let entity_term = Term::Iri(iri(ds::DATA_ENTITY));
        let sources = iri(ds::HAS_SOURCE);
        for e in g.subjects_with(&iri(RDF_TYPE), &entity_term) {
            let Some(column) = g.object(e, &sources).and_then(Term::as_literal).and_then(Literal::as_str) else {
                continue;
            };
            let structure = g
                .object(e, &iri(ds::HAS_DATA_STRUCTURE))
                .and_then(Term::as_literal)
                .and_then(Literal::as_str)
                .and_then(|s| s.parse::<DataStructure>().ok());
            let value = if structure == Some(DataStructure::Table) && column == "*" {
                Value::Table(Arc::clone(data))
            } else {
                let col = data.column(column).ok_or_else(|| ExecError::MissingColumn {
                    entity: e.clone(),
                    column: column.to_string(),
                })?;
                match (structure, &col.data) {
                    (Some(DataStructure::NumericColumn), ColumnData::Numeric(_)) => Value::Column(col.data.clone()),
                    (Some(DataStructure::CategoricalColumn), ColumnData::Categorical(_)) => {
                        Value::Column(col.data.clone())
                    }
                    // Numeric cells used as class labels.
                    (Some(DataStructure::CategoricalColumn), ColumnData::Numeric(v)) => {
                        Value::Column(ColumnData::Categorical(v.iter().map(|x| x.to_string()).collect()))
                    }
                    (s, _) => {
                        return Err(ExecError::ColumnKind {
                            entity: e.clone(),
                            column: column.to_string(),
                            expected: s.unwrap_or(DataStructure::NumericColumn),
                        })
                    }
                }
            };
            ctx.insert(e.clone(), value)?;
        }
        Ok(())
    }

    /// Runs the chain in memory and renders leaf canvases, without
    /// touching the file system.
    pub fn run(&self, kg: &PipelineKG, data: &Table) -> Result<Execution, ExecError> {
        let g = kg.graph();
        let mut resolved = Vec::new();
        let mut cur = Some(kg.start_task().clone());
        while let Some(t) = cur {
            let r = resolve_task(self.schema, g, &t)?;
            cur = r.next.clone();
            resolved.push(r);
        }
        for r in &resolved {
            if !self.registry.contains(&r.method_type) {
                return Err(ExecError::UnregisteredMethod(r.method_type.clone()));
            }
        }

        let data = Arc::new(data.clone());
        let mut ctx = ExecutionContext::default();
        self.bind_dataset(kg, &data, &mut ctx)?;
        let mut records = Vec::new();
        let mut metrics = BTreeMap::new();
        let mut canvases: Vec<(Iri, Iri)> = Vec::new();
        let mut consumed: BTreeSet<Iri> = BTreeSet::new();

        for task in &resolved {
            let mut inputs: BTreeMap<Iri, Vec<(Iri, &Value)>> = BTreeMap::new();
            for (role, e) in &task.inputs {
                let value = ctx.get(e).ok_or_else(|| ExecError::MissingValue {
                    task: task.iri.clone(),
                    entity: e.clone(),
                })?;
                inputs.entry(role.clone()).or_default().push((e.clone(), value));
                consumed.insert(e.clone());
            }
            let mut params: BTreeMap<Iri, Literal> = task.params.iter().cloned().collect();
            for spec in self.schema.param_specs(&task.method_type) {
                if let Some(d) = &spec.default {
                    params.entry(spec.property.clone()).or_insert_with(|| d.clone());
                }
            }
            let call = MethodCall {
                task,
                inputs,
                params,
                dataset: &data,
            };
            let method = self.registry.get(&task.method_type).expect("checked before running");
            let started = Instant::now();
            let values = method.run(&call).map_err(|source| ExecError::Task {
                task: task.iri.clone(),
                source,
            })?;
            let millis = started.elapsed().as_secs_f64() * 1000.0;
            if values.len() != task.outputs.len() {
                return Err(ExecError::OutputCount {
                    task: task.iri.clone(),
                    expected: task.outputs.len(),
                    got: values.len(),
                });
            }
            for ((_, e), value) in task.outputs.iter().zip(values) {
                let declared = g
                    .object(e, &iri(ds::HAS_DATA_STRUCTURE))
                    .and_then(Term::as_literal)
                    .and_then(Literal::as_str)
                    .and_then(|s| s.parse::<DataStructure>().ok());
                if let Some(expected) = declared.filter(|d| *d != value.structure()) {
                    return Err(ExecError::OutputKind {
                        task: task.iri.clone(),
                        entity: e.clone(),
                        expected,
                        got: value.structure(),
                    });
                }
                match &value {
                    Value::Metric(m) => {
                        metrics.insert(entity_name(e).to_string(), m.clone());
                    }
                    Value::Canvas(_) => canvases.push((task.iri.clone(), e.clone())),
                    _ => {}
                }
                ctx.insert(e.clone(), value)?;
            }
            records.push(TaskRecord {
                iri: task.iri.to_string(),
                method: task.method_type.to_string(),
                millis,
            });
        }

        let mut svgs = Vec::new();
        for (task, e) in canvases {
            if consumed.contains(&e) {
                continue;
            }
            let Some(Value::Canvas(c)) = ctx.get(&e) else { continue };
            if c.is_empty() {
                continue;
            }
            let svg = render_svg(c).map_err(|source| ExecError::Render {
                task: task.clone(),
                source,
            })?;
            svgs.push((format!("plots/{}.svg", task.local_name()), svg));
        }
        let report = ExecutionReport {
            tasks: records,
            metrics,
            artifacts: svgs.iter().map(|(p, _)| p.clone()).collect(),
        };
        Ok(Execution {
            report,
            context: ctx,
            svgs,
        })
    }

    /// Runs the pipeline and writes `plots/*.svg` and `report.json` under
    /// `out_dir`.
    pub fn execute(&self, kg: &PipelineKG, data: &Table, out_dir: &Path) -> Result<ExecutionReport, ExecError> {
        let exec = self.run(kg, data)?;
        let io = |path: &Path, source| ExecError::Io {
            path: path.display().to_string(),
            source,
        };
        let plots = out_dir.join("plots");
        if !exec.svgs.is_empty() {
            std::fs::create_dir_all(&plots).map_err(|e| io(&plots, e))?;
        } else {
            std::fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
        }
        for (rel, svg) in &exec.svgs {
            let path: PathBuf = out_dir.join(rel);
            std::fs::write(&path, svg).map_err(|e| io(&path, e))?;
        }
        let report_path = out_dir.join("report.json");
        std::fs::write(&report_path, exec.report.to_json()).map_err(|e| io(&report_path, e))?;
        Ok(exec.report)
    }
}

/// Runs `kg` with the shipped schemata and `registry`, writing artifacts
/// under `out_dir`.
pub fn execute(
    kg: &PipelineKG,
    data: &Table,
    registry: &MethodRegistry,
    out_dir: &Path,
) -> Result<ExecutionReport, ExecError> {
    Executor::new(Schema::builtin(), registry).execute(kg, data, out_dir)
}
