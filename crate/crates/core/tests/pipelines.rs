use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use exekg::executor::{resolve_task, ExecError, Executor, MethodRegistry, Value};
use exekg::pipeline::{load_pipeline, parse_pipeline, LoadError, PipelineKG};
use exekg::rdf::{graph_equal, parse_turtle, serialize_turtle, Iri, Triple};
use exekg::samples;
use exekg::schema::{Schema, ViolationCode};
use exekg::tabular::{load_csv, ColumnData, Table};
use exekg::vocab::{ds, iri, ml, visu};

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn dataset() -> Table {
    load_csv(examples().join(samples::DATASET_PATH)).unwrap()
}

fn fixture(stem: &str) -> String {
    std::fs::read_to_string(examples().join(format!("{stem}.ttl"))).unwrap()
}

fn run(kg: &PipelineKG) -> exekg::executor::Execution {
    let registry = MethodRegistry::with_defaults();
    Executor::new(Schema::builtin(), &registry).run(kg, &dataset()).unwrap()
}

fn data_layer(svg: &str, tag: &str) -> usize {
    let doc = roxmltree::Document::parse(svg).unwrap();
    doc.descendants()
        .filter(|n| n.attribute("class") == Some("data"))
        .flat_map(|g| g.children())
        .filter(|n| n.has_tag_name(tag))
        .count()
}

#[test]
fn api_builds_match_golden_fixtures() {
    for (stem, kg) in samples::all(samples::DATASET_PATH).unwrap() {
        let text = fixture(stem);
        assert_eq!(kg.to_turtle(), text, "{stem}");
        let loaded = load_pipeline(examples().join(format!("{stem}.ttl"))).unwrap();
        assert!(graph_equal(loaded.graph(), kg.graph()), "{stem}");
        assert_eq!(serialize_turtle(loaded.graph()), text, "{stem}");
        assert_eq!(loaded.chain(), kg.chain());
    }
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (stem, kg) in samples::all("elsewhere.csv").unwrap() {
        let path = dir.path().join(format!("{stem}.ttl"));
        kg.save(&path).unwrap();
        let back = load_pipeline(&path).unwrap();
        assert_eq!(back, kg);
        assert_eq!(back.dataset_path(), "elsewhere.csv");
    }
}

#[test]
fn ml_pipeline_runs_in_chain_order() {
    let kg = samples::ml_pipeline(samples::DATASET_PATH).unwrap();
    let exec = run(&kg);
    let methods: Vec<&str> = exec
        .report
        .tasks
        .iter()
        .map(|t| t.method.rsplit('#').next().unwrap())
        .collect();
    assert_eq!(
        methods,
        [
            "TrainTestSplitMethod",
            "KNNTrainMethod",
            "PredictMethod",
            "PredictionErrorMethod",
            "CanvasMethod",
            "ScatterPlotMethod"
        ]
    );
    let order: Vec<&str> = exec.report.tasks.iter().map(|t| t.iri.as_str()).collect();
    let chain: Vec<&str> = kg.chain().iter().map(Iri::as_str).collect();
    assert_eq!(order, chain);
    assert_eq!(exec.report.artifacts, ["plots/ml_pipeline_task_6.svg"]);
    assert_eq!(exec.svgs.len(), 1);
    // 200 rows at ratio 0.8: 40 test rows, one error marker each.
    assert_eq!(data_layer(&exec.svgs[0].1, "circle"), 40);
    assert_eq!(exec.report.metrics["prediction_error"].values().len(), 40);
}

#[test]
fn knn_on_toy_data_beats_chance() {
    let kg = samples::ml_pipeline(samples::DATASET_PATH).unwrap();
    let exec = run(&kg);
    let errors = exec.report.metrics["prediction_error"].values();
    let correct = errors.iter().filter(|e| **e == 0.0).count();
    assert!(correct >= 30, "{correct}/40");
}

#[test]
fn stats_pipeline_plots_two_series() {
    let exec = run(&samples::stats_pipeline(samples::DATASET_PATH).unwrap());
    let svg = &exec.svgs[0].1;
    assert_eq!(data_layer(svg, "circle"), 400);
    let normalized = exec
        .context
        .values()
        .iter()
        .find(|(k, _)| k.as_str().ends_with("_entity_x1_normalized"))
        .map(|(_, v)| v.clone())
        .unwrap();
    let Value::Column(ColumnData::Numeric(z)) = normalized else { panic!() };
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    assert!(mean.abs() < 1e-9);
    assert!(svg.contains(">x1</text>") && svg.contains(">x1_normalized</text>"));
}

#[test]
fn visu_pipeline_draws_one_line() {
    let exec = run(&samples::visu_pipeline(samples::DATASET_PATH).unwrap());
    let svg = &exec.svgs[0].1;
    assert_eq!(data_layer(svg, "polyline"), 1);
    let doc = roxmltree::Document::parse(svg).unwrap();
    let points = doc
        .descendants()
        .find(|n| n.has_tag_name("polyline"))
        .unwrap()
        .attribute("points")
        .unwrap();
    assert_eq!(points.split(' ').count(), 200);
}

#[test]
fn execute_writes_report_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let kg = samples::ml_pipeline(samples::DATASET_PATH).unwrap();
    let registry = MethodRegistry::with_defaults();
    let report = Executor::new(Schema::builtin(), &registry)
        .execute(&kg, &dataset(), dir.path())
        .unwrap();
    assert!(dir.path().join("plots/ml_pipeline_task_6.svg").is_file());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["tasks"].as_array().unwrap().len(), 6);
    assert!(json["tasks"][0]["millis"].is_number());
    assert_eq!(json["metrics"]["prediction_error"].as_array().unwrap().len(), 40);
    assert_eq!(json["artifacts"][0], "plots/ml_pipeline_task_6.svg");
    assert_eq!(report.tasks.len(), 6);
}

#[test]
fn runs_are_deterministic_and_single_assignment() {
    let kg = samples::ml_pipeline(samples::DATASET_PATH).unwrap();
    let a = run(&kg);
    let b = run(&kg);
    assert_eq!(a.report.without_timings(), b.report.without_timings());
    assert_eq!(a.svgs, b.svgs);
    let log = a.context.write_log();
    let unique: BTreeSet<&Iri> = log.iter().collect();
    assert_eq!(unique.len(), log.len());
}

#[test]
fn resolve_first_and_last_task() {
    let kg = load_pipeline(examples().join("ml_pipeline.ttl")).unwrap();
    let first = resolve_task(Schema::builtin(), kg.graph(), kg.start_task()).unwrap();
    assert_eq!(first.task_type, iri(ml::DATA_SPLITTING_TASK));
    assert_eq!(first.method_type, iri(ml::TRAIN_TEST_SPLIT_METHOD));
    assert_eq!(first.next.as_ref(), Some(&kg.chain()[1]));
    assert_eq!(first.inputs.len(), 3);
    assert_eq!(first.params.len(), 2);
    let last = resolve_task(Schema::builtin(), kg.graph(), kg.chain().last().unwrap()).unwrap();
    assert_eq!(last.next, None);
    assert_eq!(last.method_type, iri(visu::SCATTER_PLOT_METHOD));

    let mut g = kg.graph().clone();
    let t = kg.start_task().clone();
    let m = g.object(&t, &iri(ds::HAS_METHOD)).unwrap().clone();
    g.remove(&Triple::new(t.clone(), iri(ds::HAS_METHOD), m));
    assert!(matches!(
        resolve_task(Schema::builtin(), &g, &t),
        Err(ExecError::MalformedTask { .. })
    ));
}

#[test]
fn unregistered_method_is_named() {
    let kg = samples::visu_pipeline(samples::DATASET_PATH).unwrap();
    let mut registry = MethodRegistry::with_defaults();
    assert!(registry.unregister(&iri(visu::LINE_PLOT_METHOD)));
    let err = Executor::new(Schema::builtin(), &registry)
        .run(&kg, &dataset())
        .unwrap_err();
    match err {
        ExecError::UnregisteredMethod(m) => assert_eq!(m, iri(visu::LINE_PLOT_METHOD)),
        other => panic!("{other}"),
    }
}

#[test]
fn default_registry_covers_the_schema() {
    let r = MethodRegistry::with_defaults();
    assert!(r.missing_for(Schema::builtin()).is_empty());
    for task in Schema::builtin().task_types() {
        for m in Schema::builtin().methods_for_task(task).unwrap() {
            assert!(r.contains(m), "{m}");
        }
    }
}

#[test]
fn missing_dataset_column() {
    let kg = samples::visu_pipeline(samples::DATASET_PATH).unwrap();
    let table = Table::from_reader("other\n1\n".as_bytes()).unwrap();
    let registry = MethodRegistry::with_defaults();
    let err = Executor::new(Schema::builtin(), &registry).run(&kg, &table).unwrap_err();
    assert!(matches!(err, ExecError::MissingColumn { ref column, .. } if column == "x1"), "{err}");
}

#[test]
fn method_errors_carry_the_task() {
    // A constant column is fine for z-scores but a one-row dataset cannot be split.
    let mut b = exekg::builder::PipelineBuilder::create_pipeline("tiny", "t.csv").unwrap();
    let x = b
        .create_data_entity("x", "x", exekg::schema::DataStructure::NumericColumn, "f")
        .unwrap();
    b.add_task(
        exekg::builder::TaskSpec::new(ml::DATA_SPLITTING_TASK, ml::TRAIN_TEST_SPLIT_METHOD)
            .input(ml::HAS_FEATURE, &x)
            .output("s"),
    )
    .unwrap();
    let kg = b.finalize().unwrap();
    let table = Table::from_reader("x\n1\n".as_bytes()).unwrap();
    let registry = MethodRegistry::with_defaults();
    let err = Executor::new(Schema::builtin(), &registry).run(&kg, &table).unwrap_err();
    match err {
        ExecError::Task { task, .. } => assert_eq!(&task, kg.start_task()),
        other => panic!("{other}"),
    }
}

fn reject(text: &str) -> Vec<ViolationCode> {
    match parse_pipeline(Schema::builtin(), text) {
        Err(LoadError::Invalid(v)) => v.codes(),
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("accepted an invalid pipeline"),
    }
}

fn mutate(stem: &str, f: impl FnOnce(&mut exekg::rdf::Graph, &PipelineKG)) -> String {
    let kg = parse_pipeline(Schema::builtin(), &fixture(stem)).unwrap();
    let mut g = kg.graph().clone();
    f(&mut g, &kg);
    serialize_turtle(&g)
}

#[test]
fn hand_edited_pipelines_are_rejected() {
    let next = iri(ds::HAS_NEXT_TASK);
    let two_successors = mutate("ml_pipeline", |g, kg| {
        g.add(&kg.chain()[0], &next, kg.chain()[3].clone());
    });
    assert!(reject(&two_successors).contains(&ViolationCode::NonlinearChain));

    let cycle = mutate("ml_pipeline", |g, kg| {
        g.add(kg.chain().last().unwrap(), &next, kg.chain()[0].clone());
    });
    assert!(reject(&cycle).contains(&ViolationCode::Cycle));

    let no_method = mutate("visu_pipeline", |g, kg| {
        let t = &kg.chain()[1];
        let m = g.object(t, &iri(ds::HAS_METHOD)).unwrap().clone();
        g.remove(&Triple::new(t.clone(), iri(ds::HAS_METHOD), m));
    });
    assert!(reject(&no_method).contains(&ViolationCode::MissingMethod));

    let dangling = mutate("visu_pipeline", |g, kg| {
        let t = &kg.chain()[1];
        let y = iri(visu::HAS_Y_DATA);
        let old = g.object(t, &y).unwrap().clone();
        g.remove(&Triple::new(t.clone(), y.clone(), old));
        g.add(t, &y, iri("https://exekg.example/pipelines/visu_pipeline#nothing"));
    });
    assert!(reject(&dangling).contains(&ViolationCode::DanglingReference));

    let unknown = fixture("visu_pipeline").replace("visu:hasTitle", "visu:hasColour");
    assert!(reject(&unknown).contains(&ViolationCode::UnknownProperty));

    let forward = mutate("stats_pipeline", |g, kg| {
        // The normalization task reads the plot's own output.
        let t = &kg.chain()[0];
        let col = iri(exekg::vocab::stats::HAS_COLUMN);
        let old = g.object(t, &col).unwrap().clone();
        g.remove(&Triple::new(t.clone(), col.clone(), old));
        g.add(t, &col, iri("https://exekg.example/pipelines/stats_pipeline#stats_pipeline_entity_x1_normalized"));
    });
    assert!(reject(&forward).contains(&ViolationCode::ForwardReference));
}

#[test]
fn structural_rejections() {
    assert_eq!(reject(""), [ViolationCode::MissingPipeline]);
    let no_tasks = "@prefix ds: <https://exekg.example/ds#> .\n\
        <https://exekg.example/pipelines/p#p> a ds:Pipeline ; ds:hasInputDataPath \"d.csv\" .";
    assert_eq!(reject(no_tasks), [ViolationCode::EmptyPipeline]);
    let unreachable = mutate("ml_pipeline", |g, kg| {
        g.remove(&Triple::new(kg.chain()[2].clone(), iri(ds::HAS_NEXT_TASK), kg.chain()[3].clone()));
    });
    assert!(reject(&unreachable).contains(&ViolationCode::UnreachableTask));
    assert!(matches!(
        parse_pipeline(Schema::builtin(), "not turtle"),
        Err(LoadError::Parse(_))
    ));
    let g = parse_turtle(&fixture("ml_pipeline")).unwrap();
    assert!(g.len() > 50);
}
