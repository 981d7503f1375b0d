//! Implementations of the shipped method types.

use super::{entity_name, MethodCall, MethodError, MethodRegistry, Value};
use crate::methods::ml::{self, Metric, Model, PerformanceKind, SplitIndices};
use crate::methods::stats;
use crate::methods::visu::{create_canvas, PlotKind, PlotSpec, Series, XValues};
use crate::tabular::ColumnData;
use crate::vocab::{iri, ml as mlv, stats as st, visu as vi};

type Out = Result<Vec<Value>, MethodError>;

pub(super) fn register_all(r: &mut MethodRegistry) {
    let mut add = |m: &str, f: fn(&MethodCall<'_>) -> Out| {
        r.register(iri(m), f).expect("built-in method types are distinct");
    };
    add(vi::CANVAS_METHOD, canvas);
    add(vi::LINE_PLOT_METHOD, |c| plot(c, PlotKind::Line));
    add(vi::SCATTER_PLOT_METHOD, |c| plot(c, PlotKind::Scatter));
    add(vi::BAR_PLOT_METHOD, |c| plot(c, PlotKind::Bar));
    add(st::MEAN_METHOD, |c| scalar(c, stats::mean));
    add(st::STD_METHOD, |c| scalar(c, stats::std));
    add(st::IQR_METHOD, |c| scalar(c, |v| stats::quartiles(v).map(|q| q.iqr)));
    add(st::ZSCORE_METHOD, zscore);
    add(st::IQR_FENCE_METHOD, iqr_fence);
    add(mlv::TRAIN_TEST_SPLIT_METHOD, split);
    add(mlv::KNN_TRAIN_METHOD, train_knn);
    add(mlv::LINREG_TRAIN_METHOD, train_linreg);
    add(mlv::MLP_TRAIN_METHOD, train_mlp);
    add(mlv::PREDICT_METHOD, predict);
    add(mlv::ACCURACY_METHOD, |c| performance(c, PerformanceKind::Accuracy));
    add(mlv::MAE_METHOD, |c| performance(c, PerformanceKind::Mae));
    add(mlv::RMSE_METHOD, |c| performance(c, PerformanceKind::Rmse));
    add(mlv::PREDICTION_ERROR_METHOD, |c| performance(c, PerformanceKind::PredictionError));
}

fn numeric<'v>(v: &'v Value, role: &str) -> Result<&'v [f64], MethodError> {
    match v {
        Value::Column(ColumnData::Numeric(x)) => Ok(x),
        Value::Metric(m) => Ok(m.values()),
        _ => Err(MethodError::msg(format!("{role} must be numeric"))),
    }
}

fn column<'v>(v: &'v Value, role: &str) -> Result<&'v ColumnData, MethodError> {
    match v {
        Value::Column(c) => Ok(c),
        _ => Err(MethodError::msg(format!("{role} must be a column"))),
    }
}

fn count(v: i64, what: &str) -> Result<usize, MethodError> {
    usize::try_from(v)
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| MethodError::msg(format!("{what} must be a positive integer, got {v}")))
}

fn canvas(c: &MethodCall<'_>) -> Out {
    let canvas = create_canvas(
        c.param_i64(vi::HAS_WIDTH)?,
        c.param_i64(vi::HAS_HEIGHT)?,
        c.param_i64(vi::HAS_GRID_ROWS)?,
        c.param_i64(vi::HAS_GRID_COLS)?,
    )?;
    Ok(vec![Value::Canvas(canvas)])
}

fn plot(c: &MethodCall<'_>, kind: PlotKind) -> Out {
    let Value::Canvas(canvas) = c.input(vi::HAS_CANVAS)? else {
        return Err(MethodError::msg("hasCanvas must be a canvas"));
    };
    let x = match c.optional_input(vi::HAS_X_DATA) {
        None => None,
        Some(v) => Some(match column(v, "hasXData")? {
            ColumnData::Numeric(x) => XValues::Numeric(x.clone()),
            ColumnData::Categorical(x) => XValues::Categorical(x.clone()),
        }),
    };
    let mut series = Vec::new();
    for role in [vi::HAS_Y_DATA, vi::HAS_SECOND_Y_DATA] {
        let entities = c.input_entities(role);
        for (e, v) in entities.into_iter().zip(c.inputs(role)) {
            let mut s = Series::new(entity_name(e), numeric(v, role)?.to_vec());
            if let Some(x) = &x {
                s = s.with_x(x.clone());
            }
            series.push(s);
        }
    }
    let spec = PlotSpec::new(kind, c.param_str(vi::HAS_TITLE).map(str::to_string), series)?;
    let filled = canvas.clone().add_plot(c.param_i64(vi::HAS_SLOT)?, spec)?;
    Ok(vec![Value::Canvas(filled)])
}

fn scalar(c: &MethodCall<'_>, f: impl Fn(&[f64]) -> Result<f64, stats::StatsError>) -> Out {
    let v = numeric(c.input(st::HAS_COLUMN)?, "hasColumn")?;
    Ok(vec![Value::Metric(Metric::Scalar(f(v)?))])
}

fn zscore(c: &MethodCall<'_>) -> Out {
    let v = numeric(c.input(st::HAS_COLUMN)?, "hasColumn")?;
    Ok(vec![Value::Column(ColumnData::Numeric(stats::normalize(v)?))])
}

fn iqr_fence(c: &MethodCall<'_>) -> Out {
    let v = numeric(c.input(st::HAS_COLUMN)?, "hasColumn")?;
    let mask = stats::detect_outliers(v)?
        .into_iter()
        .map(|b| if b { 1.0 } else { 0.0 })
        .collect();
    Ok(vec![Value::Column(ColumnData::Numeric(mask))])
}

/// Feature columns as rows, in the call's feature order.
fn feature_rows(c: &MethodCall<'_>) -> Result<Vec<Vec<f64>>, MethodError> {
    let cols: Vec<&[f64]> = c
        .inputs(mlv::HAS_FEATURE)
        .into_iter()
        .map(|v| numeric(v, "hasFeature"))
        .collect::<Result<_, _>>()?;
    let n = cols.first().map_or(0, |c| c.len());
    if cols.iter().any(|c| c.len() != n) {
        return Err(MethodError::msg("feature columns differ in length"));
    }
    Ok((0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect())
}

fn select_rows(rows: &[Vec<f64>], idx: &[usize]) -> Result<Vec<Vec<f64>>, MethodError> {
    idx.iter()
        .map(|&i| {
            rows.get(i)
                .cloned()
                .ok_or_else(|| MethodError::msg(format!("split row {i} is out of range")))
        })
        .collect()
}

fn split_of<'v>(c: &MethodCall<'v>) -> Result<&'v SplitIndices, MethodError> {
    match c.input(mlv::HAS_SPLIT)? {
        Value::Split(s) => Ok(s),
        _ => Err(MethodError::msg("hasSplit must be split indices")),
    }
}

fn label_of<'v>(c: &MethodCall<'v>, rows: usize) -> Result<&'v ColumnData, MethodError> {
    let label = column(c.input(mlv::HAS_LABEL)?, "hasLabel")?;
    if label.len() != rows {
        return Err(MethodError::msg("label and feature columns differ in length"));
    }
    Ok(label)
}

fn split(c: &MethodCall<'_>) -> Out {
    let rows = feature_rows(c)?;
    if let Some(l) = c.optional_input(mlv::HAS_LABEL) {
        if column(l, "hasLabel")?.len() != rows.len() {
            return Err(MethodError::msg("label and feature columns differ in length"));
        }
    }
    let s = ml::train_test_split(rows.len(), c.param_f64(mlv::HAS_SPLIT_RATIO)?, c.param_i64(mlv::HAS_SEED)?)?;
    Ok(vec![Value::Split(s)])
}

struct TrainingData {
    features: Vec<Vec<f64>>,
    labels: ColumnData,
}

fn training_data(c: &MethodCall<'_>) -> Result<TrainingData, MethodError> {
    let rows = feature_rows(c)?;
    let label = label_of(c, rows.len())?;
    let s = split_of(c)?;
    Ok(TrainingData {
        features: select_rows(&rows, &s.train)?,
        labels: label.select(&s.train),
    })
}

fn numeric_targets(labels: &ColumnData) -> Result<&[f64], MethodError> {
    labels
        .as_numeric()
        .ok_or_else(|| MethodError::msg("regression needs a numeric label"))
}

fn train_knn(c: &MethodCall<'_>) -> Out {
    let d = training_data(c)?;
    let k = count(c.param_i64(mlv::HAS_K)?, "k")?;
    Ok(vec![Value::Model(Model::Knn(ml::knn_train(d.features, d.labels, k)?))])
}

fn train_linreg(c: &MethodCall<'_>) -> Out {
    let d = training_data(c)?;
    let m = ml::linreg_fit(&d.features, numeric_targets(&d.labels)?)?;
    Ok(vec![Value::Model(Model::LinReg(m))])
}

fn train_mlp(c: &MethodCall<'_>) -> Out {
    let d = training_data(c)?;
    let epochs = c.param_i64(mlv::HAS_EPOCHS)?;
    let epochs = usize::try_from(epochs)
        .map_err(|_| MethodError::msg(format!("epochs must be non-negative, got {epochs}")))?;
    let m = ml::mlp_fit(
        &d.features,
        numeric_targets(&d.labels)?,
        count(c.param_i64(mlv::HAS_HIDDEN_SIZE)?, "hidden size")?,
        epochs,
        c.param_f64(mlv::HAS_LEARNING_RATE)?,
        c.param_i64(mlv::HAS_SEED)?,
    )?;
    Ok(vec![Value::Model(Model::Mlp(m))])
}

/// Predictions on the test rows and the matching true labels.
fn predict(c: &MethodCall<'_>) -> Out {
    let Value::Model(model) = c.input(mlv::HAS_MODEL)? else {
        return Err(MethodError::msg("hasModel must be a trained model"));
    };
    let rows = feature_rows(c)?;
    let label = label_of(c, rows.len())?;
    let s = split_of(c)?;
    let queries = select_rows(&rows, &s.test)?;
    let truth = label.select(&s.test);
    let mut predictions = model.predict(&queries)?;
    // Keep the prediction column the same kind as the label it estimates.
    if let (ColumnData::Numeric(p), ColumnData::Categorical(_)) = (&predictions, &truth) {
        predictions = ColumnData::Categorical(p.iter().map(|v| v.to_string()).collect());
    }
    Ok(vec![Value::Column(predictions), Value::Column(truth)])
}

fn performance(c: &MethodCall<'_>, kind: PerformanceKind) -> Out {
    let p = column(c.input(mlv::HAS_PREDICTION)?, "hasPrediction")?;
    let t = column(c.input(mlv::HAS_TRUTH)?, "hasTruth")?;
    Ok(vec![Value::Metric(ml::performance(kind, p, t)?)])
}
