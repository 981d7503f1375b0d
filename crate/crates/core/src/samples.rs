//! The three bundled sample pipelines, built through the public API.
//!
//! 1. `ml_pipeline`: split the data, train k-NN, test it, and scatter-plot
//!    the prediction errors.
//! 2. `stats_pipeline`: z-score one column and scatter-plot it before and
//!    after normalization, as two series of one plot.
//! 3. `visu_pipeline`: line-plot one column.
//!
//! All three read the bundled toy dataset (`x1`, `x2`, `x3` numeric, `label`
//! categorical; `x3` holds integer class ids).

use crate::builder::{BuildError, PipelineBuilder, TaskSpec};
use crate::pipeline::PipelineKG;
use crate::rdf::Literal;
use crate::schema::DataStructure::NumericColumn;
use crate::vocab::{ml, stats, visu};

/// Dataset path recorded in the bundled fixtures, relative to their
/// directory.
pub const DATASET_PATH: &str = "data/toy_dataset.csv";

fn canvas(b: &mut PipelineBuilder<'_>) -> Result<crate::builder::EntityRef, BuildError> {
    let t = b.add_task(TaskSpec::new(visu::CANVAS_TASK, visu::CANVAS_METHOD).output("canvas"))?;
    Ok(t.outputs[0].clone())
}

pub fn ml_pipeline(dataset_path: &str) -> Result<PipelineKG, BuildError> {
    let mut b = PipelineBuilder::create_pipeline("ml_pipeline", dataset_path)?;
    let x1 = b.create_data_entity("x1", "x1", NumericColumn, "feature")?;
    let x2 = b.create_data_entity("x2", "x2", NumericColumn, "feature")?;
    let y = b.create_data_entity("x3", "x3", NumericColumn, "label")?;
    let split = b.add_task(
        TaskSpec::new(ml::DATA_SPLITTING_TASK, ml::TRAIN_TEST_SPLIT_METHOD)
            .input(ml::HAS_FEATURE, &x1)
            .input(ml::HAS_FEATURE, &x2)
            .input(ml::HAS_LABEL, &y)
            .param(ml::HAS_SPLIT_RATIO, Literal::double(0.8))
            .param(ml::HAS_SEED, Literal::integer(42))
            .output("split"),
    )?;
    let split = &split.outputs[0];
    let model = b.add_task(
        TaskSpec::new(ml::TRAIN_TASK, ml::KNN_TRAIN_METHOD)
            .input(ml::HAS_FEATURE, &x1)
            .input(ml::HAS_FEATURE, &x2)
            .input(ml::HAS_LABEL, &y)
            .input(ml::HAS_SPLIT, split)
            .param(ml::HAS_K, Literal::integer(3))
            .output("model"),
    )?;
    let test = b.add_task(
        TaskSpec::new(ml::TEST_TASK, ml::PREDICT_METHOD)
            .input(ml::HAS_MODEL, &model.outputs[0])
            .input(ml::HAS_FEATURE, &x1)
            .input(ml::HAS_FEATURE, &x2)
            .input(ml::HAS_LABEL, &y)
            .input(ml::HAS_SPLIT, split)
            .output("prediction")
            .output("truth"),
    )?;
    let error = b.add_task(
        TaskSpec::new(ml::PERFORMANCE_TASK, ml::PREDICTION_ERROR_METHOD)
            .input(ml::HAS_PREDICTION, &test.outputs[0])
            .input(ml::HAS_TRUTH, &test.outputs[1])
            .output("prediction_error"),
    )?;
    let c = canvas(&mut b)?;
    b.add_task(
        TaskSpec::new(visu::PLOT_TASK, visu::SCATTER_PLOT_METHOD)
            .input(visu::HAS_CANVAS, &c)
            .input(visu::HAS_Y_DATA, &error.outputs[0])
            .param(visu::HAS_TITLE, Literal::string("k-NN prediction error"))
            .output("error_plot"),
    )?;
    b.finalize()
}

pub fn stats_pipeline(dataset_path: &str) -> Result<PipelineKG, BuildError> {
    let mut b = PipelineBuilder::create_pipeline("stats_pipeline", dataset_path)?;
    let x1 = b.create_data_entity("x1", "x1", NumericColumn, "feature")?;
    let norm = b.add_task(
        TaskSpec::new(stats::NORMALIZATION_TASK, stats::ZSCORE_METHOD)
            .input(stats::HAS_COLUMN, &x1)
            .output("x1_normalized"),
    )?;
    let c = canvas(&mut b)?;
    b.add_task(
        TaskSpec::new(visu::PLOT_TASK, visu::SCATTER_PLOT_METHOD)
            .input(visu::HAS_CANVAS, &c)
            .input(visu::HAS_Y_DATA, &x1)
            .input(visu::HAS_SECOND_Y_DATA, &norm.outputs[0])
            .param(visu::HAS_TITLE, Literal::string("x1 before and after normalization"))
            .output("plot"),
    )?;
    b.finalize()
}

pub fn visu_pipeline(dataset_path: &str) -> Result<PipelineKG, BuildError> {
    let mut b = PipelineBuilder::create_pipeline("visu_pipeline", dataset_path)?;
    let x1 = b.create_data_entity("x1", "x1", NumericColumn, "feature")?;
    let c = canvas(&mut b)?;
    b.add_task(
        TaskSpec::new(visu::PLOT_TASK, visu::LINE_PLOT_METHOD)
            .input(visu::HAS_CANVAS, &c)
            .input(visu::HAS_Y_DATA, &x1)
            .param(visu::HAS_TITLE, Literal::string("x1"))
            .output("plot"),
    )?;
    b.finalize()
}

/// `(file stem, pipeline)` for each sample.
pub fn all(dataset_path: &str) -> Result<Vec<(&'static str, PipelineKG)>, BuildError> {
    Ok(vec![
        ("ml_pipeline", ml_pipeline(dataset_path)?),
        ("stats_pipeline", stats_pipeline(dataset_path)?),
        ("visu_pipeline", visu_pipeline(dataset_path)?),
    ])
}
