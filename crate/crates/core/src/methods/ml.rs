//! From-scratch learners: k-NN classification, ordinary least squares and
//! a one-hidden-layer perceptron, plus splitting and performance helpers.
//!
//! Feature matrices are slices of rows.

use serde::Serialize;
use thiserror::Error;

use super::rng::Lcg64;
use crate::tabular::ColumnData;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlError {
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("split ratio {0} is outside (0, 1)")]
    RatioOutOfRange(f64),
    #[error("k = {k} but only {rows} training rows")]
    KTooLarge { k: usize, rows: usize },
    #[error("k must be at least 1")]
    KZero,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular normal equations (pivot {pivot:e} below 1e-12)")]
    Singular { pivot: f64 },
    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("{0}")]
    WrongKind(&'static str),
    #[error("invalid hyperparameter: {0}")]
    InvalidParameter(String),
}

/// Rows assigned to training and testing; both sorted, disjoint, and
/// together covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffles `0..n` with [`Lcg64`] seeded by `seed`; the first
/// `ceil(ratio * n)` shuffled rows train, clamped so both parts are
/// non-empty.
pub fn train_test_split(n: usize, ratio: f64, seed: i64) -> Result<SplitIndices, MlError> {
    if n < 2 {
        return Err(MlError::TooFewRows { needed: 2, got: n });
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(MlError::RatioOutOfRange(ratio));
    }
    let mut order: Vec<usize> = (0..n).collect();
    Lcg64::new(seed).shuffle(&mut order);
    let n_train = ((ratio * n as f64).ceil() as usize).clamp(1, n - 1);
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}

fn check_rows(rows: &[Vec<f64>]) -> Result<usize, MlError> {
    let d = rows.first().map_or(0, Vec::len);
    for r in rows {
        if r.len() != d {
            return Err(MlError::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    pub features: Vec<Vec<f64>>,
    pub labels: ColumnData,
}

pub fn knn_train(features: Vec<Vec<f64>>, labels: ColumnData, k: usize) -> Result<KnnModel, MlError> {
    check_rows(&features)?;
    if labels.len() != features.len() {
        return Err(MlError::DimensionMismatch {
            expected: features.len(),
            got: labels.len(),
        });
    }
    if k == 0 {
        return Err(MlError::KZero);
    }
    if k > features.len() {
        return Err(MlError::KTooLarge {
            k,
            rows: features.len(),
        });
    }
    Ok(KnnModel { k, features, labels })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the training row whose label wins among the `k` nearest rows.
///
/// Neighbours are ranked by distance, then training-row index. The label
/// with most votes wins; among tied labels the one appearing earliest in
/// that ranking wins, i.e. the one with the closest (then lowest-indexed)
/// member.
fn knn_winner<L: PartialEq>(model_rows: &[Vec<f64>], labels: &[L], k: usize, query: &[f64]) -> usize {
    let mut ranked: Vec<(f64, usize)> = model_rows
        .iter()
        .enumerate()
        .map(|(i, row)| (squared_distance(row, query), i))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let neighbours = &ranked[..k];
    // (representative row, votes) per distinct label, in rank order.
    let mut tally: Vec<(usize, usize)> = Vec::new();
    for &(_, i) in neighbours {
        match tally.iter_mut().find(|(rep, _)| labels[*rep] == labels[i]) {
            Some(entry) => entry.1 += 1,
            None => tally.push((i, 1)),
        }
    }
    let best = tally.iter().map(|t| t.1).max().expect("k >= 1");
    tally.iter().find(|t| t.1 == best).expect("non-empty").0
}

pub fn knn_predict(model: &KnnModel, queries: &[Vec<f64>]) -> Result<ColumnData, MlError> {
    let d = model.features.first().map_or(0, Vec::len);
    for q in queries {
        if q.len() != d {
            return Err(MlError::DimensionMismatch {
                expected: d,
                got: q.len(),
            });
        }
    }
    Ok(match &model.labels {
        ColumnData::Numeric(labels) => ColumnData::Numeric(
            queries
                .iter()
                .map(|q| labels[knn_winner(&model.features, labels, model.k, q)])
                .collect(),
        ),
        ColumnData::Categorical(labels) => ColumnData::Categorical(
            queries
                .iter()
                .map(|q| labels[knn_winner(&model.features, labels, model.k, q)].clone())
                .collect(),
        ),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinRegModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinRegModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }
}

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
pub fn solve_linear_system(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, MlError> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()).then(j.cmp(&i)))
            .expect("non-empty range");
        let pivot = a[pivot_row][col];
        if pivot.abs() < 1e-12 {
            return Err(MlError::Singular { pivot });
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// Ordinary least squares through the normal equations of the design
/// matrix with an appended intercept column.
pub fn linreg_fit(features: &[Vec<f64>], targets: &[f64]) -> Result<LinRegModel, MlError> {
    let d = check_rows(features)?;
    if targets.len() != features.len() {
        return Err(MlError::DimensionMismatch {
            expected: features.len(),
            got: targets.len(),
        });
    }
    if features.len() <= d {
        return Err(MlError::TooFewRows {
            needed: d + 1,
            got: features.len(),
        });
    }
    let p = d + 1;
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, &y) in features.iter().zip(targets) {
        let design = |j: usize| if j < d { row[j] } else { 1.0 };
        for i in 0..p {
            let xi = design(i);
            xty[i] += xi * y;
            for j in 0..p {
                xtx[i][j] += xi * design(j);
            }
        }
    }
    let mut solution = solve_linear_system(xtx, xty)?;
    let intercept = solution.pop().expect("p >= 1");
    Ok(LinRegModel {
        weights: solution,
        intercept,
    })
}

pub fn linreg_predict(model: &LinRegModel, queries: &[Vec<f64>]) -> Result<Vec<f64>, MlError> {
    queries
        .iter()
        .map(|q| {
            if q.len() != model.weights.len() {
                return Err(MlError::DimensionMismatch {
                    expected: model.weights.len(),
                    got: q.len(),
                });
            }
            Ok(model.predict_row(q))
        })
        .collect()
}

/// One tanh hidden layer and a linear output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    /// `hidden x inputs`
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    pub out_weights: Vec<f64>,
    pub out_bias: f64,
}

impl MlpModel {
    /// Uniform draws in `[-0.5, 0.5)` from [`Lcg64`], in the order:
    /// hidden weights (row-major), hidden biases, output weights, output bias.
    pub fn init(inputs: usize, hidden: usize, seed: i64) -> Self {
        let mut rng = Lcg64::new(seed);
        let mut draw = || rng.unit() - 0.5;
        let hidden_weights = (0..hidden)
            .map(|_| (0..inputs).map(|_| draw()).collect())
            .collect();
        let hidden_bias = (0..hidden).map(|_| draw()).collect();
        let out_weights = (0..hidden).map(|_| draw()).collect();
        let out_bias = draw();
        MlpModel {
            hidden_weights,
            hidden_bias,
            out_weights,
            out_bias,
        }
    }

    pub fn zeros(inputs: usize, hidden: usize) -> Self {
        MlpModel {
            hidden_weights: vec![vec![0.0; inputs]; hidden],
            hidden_bias: vec![0.0; hidden],
            out_weights: vec![0.0; hidden],
            out_bias: 0.0,
        }
    }

    pub fn inputs(&self) -> usize {
        self.hidden_weights.first().map_or(0, Vec::len)
    }

    fn hidden_activations(&self, row: &[f64]) -> Vec<f64> {
        self.hidden_weights
            .iter()
            .zip(&self.hidden_bias)
            .map(|(w, b)| (b + w.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()).tanh())
            .collect()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let h = self.hidden_activations(row);
        self.out_bias + self.out_weights.iter().zip(&h).map(|(w, h)| w * h).sum::<f64>()
    }

    fn check_queries(&self, queries: &[Vec<f64>]) -> Result<(), MlError> {
        for q in queries {
            if q.len() != self.inputs() {
                return Err(MlError::DimensionMismatch {
                    expected: self.inputs(),
                    got: q.len(),
                });
            }
        }
        Ok(())
    }
}

/// Gradient of the mean squared error, shaped like [`MlpModel`].
pub type MlpGradient = MlpModel;

/// Mean squared error of `model` on `(features, targets)` and its
/// analytic gradient by backpropagation.
pub fn mlp_loss_and_gradient(
    model: &MlpModel,
    features: &[Vec<f64>],
    targets: &[f64],
) -> Result<(f64, MlpGradient), MlError> {
    model.check_queries(features)?;
    if features.len() != targets.len() {
        return Err(MlError::DimensionMismatch {
            expected: features.len(),
            got: targets.len(),
        });
    }
    let n = features.len();
    if n == 0 {
        return Err(MlError::TooFewRows { needed: 1, got: 0 });
    }
    let mut grad = MlpModel::zeros(model.inputs(), model.hidden_bias.len());
    let mut loss = 0.0;
    for (row, &t) in features.iter().zip(targets) {
        let h = model.hidden_activations(row);
        let y = model.out_bias + model.out_weights.iter().zip(&h).map(|(w, h)| w * h).sum::<f64>();
        let err = y - t;
        loss += err * err;
        let dy = 2.0 * err / n as f64;
        grad.out_bias += dy;
        for j in 0..h.len() {
            grad.out_weights[j] += dy * h[j];
            let dz = dy * model.out_weights[j] * (1.0 - h[j] * h[j]);
            grad.hidden_bias[j] += dz;
            for (g, x) in grad.hidden_weights[j].iter_mut().zip(row) {
                *g += dz * x;
            }
        }
    }
    Ok((loss / n as f64, grad))
}

/// Full-batch gradient descent from `model`.
pub fn mlp_train(
    mut model: MlpModel,
    features: &[Vec<f64>],
    targets: &[f64],
    epochs: usize,
    learning_rate: f64,
) -> Result<MlpModel, MlError> {
    for epoch in 0..epochs {
        let (loss, g) = mlp_loss_and_gradient(&model, features, targets)?;
        if !loss.is_finite() {
            return Err(MlError::NonFiniteLoss { epoch });
        }
        for (w, gw) in model.hidden_weights.iter_mut().zip(&g.hidden_weights) {
            for (w, gw) in w.iter_mut().zip(gw) {
                *w -= learning_rate * gw;
            }
        }
        for (b, gb) in model.hidden_bias.iter_mut().zip(&g.hidden_bias) {
            *b -= learning_rate * gb;
        }
        for (w, gw) in model.out_weights.iter_mut().zip(&g.out_weights) {
            *w -= learning_rate * gw;
        }
        model.out_bias -= learning_rate * g.out_bias;
    }
    if epochs > 0 {
        let (loss, _) = mlp_loss_and_gradient(&model, features, targets)?;
        if !loss.is_finite() {
            return Err(MlError::NonFiniteLoss { epoch: epochs });
        }
    }
    Ok(model)
}

pub fn mlp_fit(
    features: &[Vec<f64>],
    targets: &[f64],
    hidden: usize,
    epochs: usize,
    learning_rate: f64,
    seed: i64,
) -> Result<MlpModel, MlError> {
    if hidden == 0 {
        return Err(MlError::InvalidParameter("hidden size must be at least 1".into()));
    }
    let d = check_rows(features)?;
    mlp_train(MlpModel::init(d, hidden, seed), features, targets, epochs, learning_rate)
}

pub fn mlp_predict(model: &MlpModel, queries: &[Vec<f64>]) -> Result<Vec<f64>, MlError> {
    model.check_queries(queries)?;
    Ok(queries.iter().map(|q| model.predict_row(q)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Knn(KnnModel),
    LinReg(LinRegModel),
    Mlp(MlpModel),
}

impl Model {
    pub fn predict(&self, queries: &[Vec<f64>]) -> Result<ColumnData, MlError> {
        match self {
            Model::Knn(m) => knn_predict(m, queries),
            Model::LinReg(m) => linreg_predict(m, queries).map(ColumnData::Numeric),
            Model::Mlp(m) => mlp_predict(m, queries).map(ColumnData::Numeric),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerformanceKind {
    Accuracy,
    Mae,
    Rmse,
    PredictionError,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Metric {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Metric {
    pub fn values(&self) -> &[f64] {
        match self {
            Metric::Scalar(v) => std::slice::from_ref(v),
            Metric::Vector(v) => v,
        }
    }
}

pub fn performance(
    kind: PerformanceKind,
    predictions: &ColumnData,
    truth: &ColumnData,
) -> Result<Metric, MlError> {
    if predictions.len() != truth.len() {
        return Err(MlError::DimensionMismatch {
            expected: truth.len(),
            got: predictions.len(),
        });
    }
    if truth.is_empty() {
        return Err(MlError::TooFewRows { needed: 1, got: 0 });
    }
    let n = truth.len() as f64;
    if kind == PerformanceKind::Accuracy {
        let matches = match (predictions, truth) {
            (ColumnData::Categorical(p), ColumnData::Categorical(t)) => {
                p.iter().zip(t).filter(|(a, b)| a == b).count()
            }
            (ColumnData::Numeric(p), ColumnData::Numeric(t)) => {
                p.iter().zip(t).filter(|(a, b)| a == b).count()
            }
            _ => return Err(MlError::WrongKind("accuracy compares labels of the same kind")),
        };
        return Ok(Metric::Scalar(matches as f64 / n));
    }
    let (Some(p), Some(t)) = (predictions.as_numeric(), truth.as_numeric()) else {
        return Err(MlError::WrongKind("error metrics need numeric predictions and truth"));
    };
    let deltas = p.iter().zip(t).map(|(p, t)| p - t);
    Ok(match kind {
        PerformanceKind::Mae => Metric::Scalar(deltas.map(f64::abs).sum::<f64>() / n),
        PerformanceKind::Rmse => Metric::Scalar((deltas.map(|d| d * d).sum::<f64>() / n).sqrt()),
        PerformanceKind::PredictionError => Metric::Vector(deltas.collect()),
        PerformanceKind::Accuracy => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rows(v: &[&[f64]]) -> Vec<Vec<f64>> {
        v.iter().map(|r| r.to_vec()).collect()
    }

    fn cats(v: &[&str]) -> ColumnData {
        ColumnData::Categorical(v.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn split_sizes_and_errors() {
        for seed in [-3, 0, 1, 42, 99999] {
            let s = train_test_split(4, 0.75, seed).unwrap();
            assert_eq!((s.train.len(), s.test.len()), (3, 1));
        }
        let s = train_test_split(10, 0.99, 1).unwrap();
        assert_eq!(s.test.len(), 1);
        let s = train_test_split(10, 0.01, 1).unwrap();
        assert_eq!(s.train.len(), 1);
        assert!(matches!(train_test_split(1, 0.5, 0), Err(MlError::TooFewRows { .. })));
        assert!(matches!(train_test_split(5, 1.0, 0), Err(MlError::RatioOutOfRange(_))));
        assert!(matches!(train_test_split(5, 0.0, 0), Err(MlError::RatioOutOfRange(_))));
        assert!(matches!(train_test_split(5, f64::NAN, 0), Err(MlError::RatioOutOfRange(_))));
    }

    // Frozen from an independent reimplementation of the generator and shuffle.
    #[test]
    fn split_reference_values() {
        let s = train_test_split(100, 0.8, 42).unwrap();
        assert_eq!(
            s.test,
            [2, 5, 14, 22, 28, 32, 33, 34, 40, 43, 47, 56, 57, 61, 65, 66, 68, 81, 93, 94]
        );
        assert_eq!(s.train.len(), 80);
        assert_eq!(train_test_split(10, 0.7, -5).unwrap().test, [0, 3, 9]);
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let a = train_test_split(37, 0.7, 5).unwrap();
        let b = train_test_split(37, 0.7, 5).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.train.iter().chain(&a.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
    }

    #[test]
    fn knn_examples() {
        let x = rows(&[&[0.0], &[1.0], &[10.0]]);
        let y = cats(&["A", "A", "B"]);
        let m1 = knn_train(x.clone(), y.clone(), 1).unwrap();
        assert_eq!(knn_predict(&m1, &[vec![2.0]]).unwrap(), cats(&["A"]));
        let m3 = knn_train(x.clone(), y.clone(), 3).unwrap();
        assert_eq!(knn_predict(&m3, &[vec![2.0]]).unwrap(), cats(&["A"]));
        assert_eq!(knn_predict(&m1, &[vec![10.0]]).unwrap(), cats(&["B"]));
        assert!(matches!(knn_train(x.clone(), y.clone(), 4), Err(MlError::KTooLarge { .. })));
        assert!(matches!(knn_train(x, y, 0), Err(MlError::KZero)));
        assert!(matches!(
            knn_predict(&m1, &[vec![1.0, 2.0]]),
            Err(MlError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn knn_tie_breaking() {
        // Equidistant neighbours: the lower row index wins.
        let m = knn_train(rows(&[&[-1.0], &[1.0]]), cats(&["L", "R"]), 1).unwrap();
        assert_eq!(knn_predict(&m, &[vec![0.0]]).unwrap(), cats(&["L"]));
        // Vote tie 1:1 with k=2: the class of the closer neighbour wins.
        let m = knn_train(rows(&[&[0.0], &[3.0]]), cats(&["far", "near"]), 2).unwrap();
        assert_eq!(knn_predict(&m, &[vec![2.0]]).unwrap(), cats(&["near"]));
        // Vote tie 2:2, nearest members equidistant: lower row index wins.
        let m = knn_train(
            rows(&[&[5.0], &[-1.0], &[1.0], &[-5.0]]),
            cats(&["P", "Q", "P", "Q"]),
            4,
        )
        .unwrap();
        assert_eq!(knn_predict(&m, &[vec![0.0]]).unwrap(), cats(&["Q"]));
    }

    #[test]
    fn knn_numeric_labels() {
        let m = knn_train(
            rows(&[&[0.0], &[0.1], &[5.0]]),
            ColumnData::Numeric(vec![2.0, 2.0, 7.0]),
            3,
        )
        .unwrap();
        assert_eq!(knn_predict(&m, &[vec![4.9]]).unwrap(), ColumnData::Numeric(vec![2.0]));
    }

    #[test]
    fn linreg_two_points() {
        let m = linreg_fit(&rows(&[&[0.0], &[1.0]]), &[1.0, 3.0]).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-10);
        assert!((m.intercept - 1.0).abs() < 1e-10);
        assert_eq!(linreg_predict(&m, &[vec![2.0]]).unwrap().len(), 1);
    }

    #[test]
    fn linreg_singular_and_shape_errors() {
        let x = rows(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0], &[4.0, 4.0]]);
        assert!(matches!(linreg_fit(&x, &[1.0, 2.0, 3.0, 4.0]), Err(MlError::Singular { .. })));
        assert!(matches!(
            linreg_fit(&rows(&[&[1.0]]), &[1.0]),
            Err(MlError::TooFewRows { .. })
        ));
        assert!(matches!(
            linreg_fit(&rows(&[&[1.0], &[2.0, 3.0]]), &[1.0, 2.0]),
            Err(MlError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mlp_without_training_is_the_initial_network() {
        let x = rows(&[&[0.5, -1.0], &[2.0, 0.0]]);
        let m = mlp_fit(&x, &[1.0, 2.0], 3, 0, 0.1, 11).unwrap();
        assert_eq!(m, MlpModel::init(2, 3, 11));
        assert_ne!(m, MlpModel::init(2, 3, 12));
        for row in m.hidden_weights.iter().flatten() {
            assert!((-0.5..0.5).contains(row));
        }
    }

    #[test]
    fn zero_network_outputs_its_bias() {
        let mut m = MlpModel::zeros(2, 3);
        m.out_bias = 0.75;
        let p = mlp_predict(&m, &rows(&[&[1.0, 2.0], &[-9.0, 4.0]])).unwrap();
        assert_eq!(p, [0.75, 0.75]);
    }

    #[test]
    fn mlp_learns_and_surfaces_divergence() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 10.0 - 1.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| 0.5 * r[0]).collect();
        let before = mlp_loss_and_gradient(&MlpModel::init(1, 4, 3), &x, &y).unwrap().0;
        let m = mlp_fit(&x, &y, 4, 300, 0.1, 3).unwrap();
        let after = mlp_loss_and_gradient(&m, &x, &y).unwrap().0;
        assert!(after < before * 0.1, "{before} -> {after}");
        let err = mlp_fit(&x, &y, 4, 200, 1e6, 3).unwrap_err();
        assert!(matches!(err, MlError::NonFiniteLoss { .. }), "{err}");
        assert!(matches!(mlp_fit(&x, &y, 0, 1, 0.1, 3), Err(MlError::InvalidParameter(_))));
    }

    #[test]
    fn performance_examples() {
        let acc = performance(PerformanceKind::Accuracy, &cats(&["A", "B", "A"]), &cats(&["A", "A", "A"])).unwrap();
        assert_eq!(acc, Metric::Scalar(2.0 / 3.0));
        let same = ColumnData::Numeric(vec![1.5, -2.0]);
        assert_eq!(performance(PerformanceKind::Mae, &same, &same).unwrap(), Metric::Scalar(0.0));
        assert_eq!(performance(PerformanceKind::Rmse, &same, &same).unwrap(), Metric::Scalar(0.0));
        assert_eq!(
            performance(PerformanceKind::PredictionError, &same, &same).unwrap(),
            Metric::Vector(vec![0.0, 0.0])
        );
        let p = ColumnData::Numeric(vec![1.0, 3.0]);
        let t = ColumnData::Numeric(vec![2.0, 2.0]);
        assert_eq!(performance(PerformanceKind::Mae, &p, &t).unwrap(), Metric::Scalar(1.0));
        assert_eq!(performance(PerformanceKind::Rmse, &p, &t).unwrap(), Metric::Scalar(1.0));
        assert_eq!(
            performance(PerformanceKind::PredictionError, &p, &t).unwrap(),
            Metric::Vector(vec![-1.0, 1.0])
        );
        assert!(matches!(
            performance(PerformanceKind::Mae, &cats(&["a"]), &cats(&["a"])),
            Err(MlError::WrongKind(_))
        ));
        assert!(matches!(
            performance(PerformanceKind::Mae, &p, &ColumnData::Numeric(vec![1.0])),
            Err(MlError::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn rmse_dominates_mae(pairs in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 1..50)) {
            let p = ColumnData::Numeric(pairs.iter().map(|x| x.0).collect());
            let t = ColumnData::Numeric(pairs.iter().map(|x| x.1).collect());
            let mae = performance(PerformanceKind::Mae, &p, &t).unwrap().values()[0];
            let rmse = performance(PerformanceKind::Rmse, &p, &t).unwrap().values()[0];
            prop_assert!(rmse >= mae - 1e-12 * mae.abs().max(1.0));
        }

        #[test]
        fn knn_with_k_equal_n_returns_global_majority(
            labels in prop::collection::vec(0u8..3, 1..50),
            query in -10.0..10.0f64,
        ) {
            let n = labels.len();
            let x: Vec<Vec<f64>> = (0..n).map(|i| vec![(i as f64 * 7.3) % 11.0]).collect();
            let y = ColumnData::Categorical(labels.iter().map(|l| l.to_string()).collect());
            let m = knn_train(x, y, n).unwrap();
            let pred = knn_predict(&m, &[vec![query]]).unwrap();
            let predicted = &pred.as_categorical().unwrap()[0];
            let count = |c: &str| labels.iter().filter(|l| l.to_string() == c).count();
            let best = (0u8..3).map(|c| count(&c.to_string())).max().unwrap();
            prop_assert_eq!(count(predicted), best);
        }

        #[test]
        fn seeded_operations_are_reproducible(seed in any::<i64>(), n in 2usize..300) {
            prop_assert_eq!(train_test_split(n, 0.8, seed).unwrap(), train_test_split(n, 0.8, seed).unwrap());
            prop_assert_eq!(MlpModel::init(3, 4, seed), MlpModel::init(3, 4, seed));
        }
    }
}
