use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use exekg::rdf::{graph_equal, parse_turtle};
use exekg::samples;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/examples")
}

fn exekg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exekg"))
        .current_dir(dir)
        .env_remove("EXEKG_OUT")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const VISU_ANSWERS: &str = "data/toy_dataset.csv
x1:feature
CanvasTask
CanvasMethod




canvas
PlotTask
LinePlotMethod
canvas
x1



x1
plot
done
";

fn build_with(answers: &str, out_name: &str) -> (tempfile::TempDir, Output) {
    let tmp = tempfile::tempdir().unwrap();
    let answers_path = tmp.path().join("answers.txt");
    fs::write(&answers_path, answers).unwrap();
    let out = tmp.path().join(out_name);
    let o = exekg(
        &fixtures(),
        &["build", "--answers", answers_path.to_str().unwrap(), "--output", out.to_str().unwrap()],
    );
    (tmp, o)
}

#[test]
fn scripted_build_reproduces_the_visu_fixture() {
    let (tmp, o) = build_with(VISU_ANSWERS, "visu_pipeline.ttl");
    assert!(o.status.success(), "{}", stderr(&o));
    let written = fs::read_to_string(tmp.path().join("visu_pipeline.ttl")).unwrap();
    let expected = samples::visu_pipeline(samples::DATASET_PATH).unwrap();
    assert!(graph_equal(&parse_turtle(&written).unwrap(), expected.graph()));
    assert_eq!(written, fs::read_to_string(fixtures().join("visu_pipeline.ttl")).unwrap());
}

#[test]
fn invalid_method_is_asked_again() {
    let answers = VISU_ANSWERS.replacen("LinePlotMethod", "NoSuchMethod\n99\nLinePlotMethod", 1);
    let (tmp, o) = build_with(&answers, "visu_pipeline.ttl");
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stderr(&o).matches("is not one of the listed choices").count(), 2);
    let written = fs::read_to_string(tmp.path().join("visu_pipeline.ttl")).unwrap();
    assert_eq!(written, fs::read_to_string(fixtures().join("visu_pipeline.ttl")).unwrap());
}

#[test]
fn invalid_method_then_eof_writes_nothing() {
    let (tmp, o) = build_with("data/toy_dataset.csv\nx1\nCanvasTask\nLinePlotMethod\n", "p.ttl");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("is not one of the listed choices"));
    assert!(!tmp.path().join("p.ttl").exists());
}

#[test]
fn empty_answers_abort_with_exit_2() {
    let (tmp, o) = build_with("", "p.ttl");
    assert_eq!(o.status.code(), Some(2));
    assert!(!tmp.path().join("p.ttl").exists());
    assert!(stdout(&o).is_empty());
}

#[test]
fn bad_inputs_and_params_are_asked_again() {
    let answers = "data/toy_dataset.csv
nope
x1:feature,label
StatisticTask
MeanMethod
label
x9
x1
mean_x1
NormalizationTask
ZScoreMethod
x1
mean_x1
x1_z
done
";
    let (tmp, o) = build_with(answers, "s.ttl");
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("the dataset has no column `nope`"));
    assert!(err.contains("`label` is a CategoricalColumn"));
    assert!(err.contains("no entity named `x9`"));
    assert!(err.contains("an entity named `mean_x1` already exists"));
    let kg = exekg::pipeline::load_pipeline(tmp.path().join("s.ttl")).unwrap();
    assert_eq!(kg.chain().len(), 2);
}

#[test]
fn build_then_run_without_edits() {
    let (tmp, o) = build_with(VISU_ANSWERS, "visu_pipeline.ttl");
    assert!(o.status.success());
    let out = tmp.path().join("out");
    let o = exekg(
        &fixtures(),
        &["run", tmp.path().join("visu_pipeline.ttl").to_str().unwrap(), "--out", out.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("plots/visu_pipeline_task_2.svg").is_file());
}

#[test]
fn run_golden_ml_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let pipeline = fixtures().join("ml_pipeline.ttl");
    // Run from elsewhere so the dataset is found next to the pipeline file.
    let o = exekg(tmp.path(), &["run", pipeline.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("plots/ml_pipeline_task_6.svg").is_file());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["tasks"].as_array().unwrap().len(), 6);
    assert_eq!(report["metrics"]["prediction_error"].as_array().unwrap().len(), 40);
    assert_eq!(report["artifacts"][0], "plots/ml_pipeline_task_6.svg");
    let s = stdout(&o);
    assert!(s.starts_with("pipeline ml_pipeline: 6 tasks"));
    assert!(s.contains("metric prediction_error: 40 values"));
}

#[test]
fn run_uses_exekg_out() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_exekg"))
        .current_dir(fixtures())
        .env("EXEKG_OUT", tmp.path())
        .args(["run", "visu_pipeline.ttl"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(tmp.path().join("report.json").is_file());
}

#[test]
fn run_with_data_override() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("small.csv");
    fs::write(&csv, "x1\n1\n2\n3\n").unwrap();
    let out = tmp.path().join("out");
    let o = exekg(
        &fixtures(),
        &["run", "visu_pipeline.ttl", "--data", csv.to_str().unwrap(), "--out", out.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = fs::read_to_string(out.join("plots/visu_pipeline_task_2.svg")).unwrap();
    assert!(svg.contains("<polyline"));
}

#[test]
fn corrupted_pipeline_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixtures().join("visu_pipeline.ttl")).unwrap();
    let broken = text.replace("    ds:hasMethod kg:visu_pipeline_method_2 ;\n", "");
    assert_ne!(broken, text);
    let p = tmp.path().join("broken.ttl");
    fs::write(&p, broken).unwrap();
    let o = exekg(tmp.path(), &["run", p.to_str().unwrap(), "--out", "out"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("MISSING_METHOD"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    assert!(!tmp.path().join("out").exists());

    fs::write(&p, "this is not turtle").unwrap();
    let o = exekg(tmp.path(), &["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_file_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = exekg(tmp.path(), &["run", "nowhere.ttl"]);
    assert_eq!(o.status.code(), Some(2));
    let o = exekg(&fixtures(), &["run", "visu_pipeline.ttl", "--data", "nowhere.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let o = exekg(tmp.path(), &["run"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn execution_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("other.csv");
    fs::write(&csv, "a,b\n1,2\n").unwrap();
    let o = exekg(
        &fixtures(),
        &["run", "visu_pipeline.ttl", "--data", csv.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("x1"));
}

#[test]
fn viz_three_task_chain() {
    let o = exekg(&fixtures(), &["viz", "stats_pipeline.ttl"]);
    assert!(o.status.success());
    let dot = stdout(&o);
    assert_eq!(dot.matches("shape=box").count(), 3);
    assert_eq!(dot.matches("label=\"hasNextTask\"").count(), 2);
    assert_eq!(dot.matches("label=\"hasMethod\"").count(), 3);
    let again = stdout(&exekg(&fixtures(), &["viz", "stats_pipeline.ttl"]));
    assert_eq!(dot, again);
}

#[test]
fn viz_to_file_and_empty_path() {
    let tmp = tempfile::tempdir().unwrap();
    let dot = tmp.path().join("p.dot");
    let o = exekg(&fixtures(), &["viz", "ml_pipeline.ttl", "--out", dot.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph \"ml_pipeline\""));
    assert_eq!(exekg(&fixtures(), &["viz", ""]).status.code(), Some(2));
    assert_eq!(exekg(&fixtures(), &["viz", "ml_pipeline.ttl", "--out", ""]).status.code(), Some(2));
}

#[test]
fn export_schemas_writes_parseable_documents() {
    let tmp = tempfile::tempdir().unwrap();
    let o = exekg(tmp.path(), &["export-schemas", "--out", "schemata"]);
    assert!(o.status.success());
    for name in ["ds.ttl", "visu.ttl", "stats.ttl", "ml.ttl"] {
        let text = fs::read_to_string(tmp.path().join("schemata").join(name)).unwrap();
        assert!(!parse_turtle(&text).unwrap().is_empty(), "{name}");
    }
}
