//! IRIs of the shipped schemata.

pub mod ds {
    pub const NS: &str = "https://exekg.example/ds#";

    pub const PIPELINE: &str = "https://exekg.example/ds#Pipeline";
    pub const TASK: &str = "https://exekg.example/ds#Task";
    pub const METHOD: &str = "https://exekg.example/ds#Method";
    pub const DATA_ENTITY: &str = "https://exekg.example/ds#DataEntity";
    pub const DATA_STRUCTURE: &str = "https://exekg.example/ds#DataStructure";

    pub const HAS_START_TASK: &str = "https://exekg.example/ds#hasStartTask";
    pub const HAS_NEXT_TASK: &str = "https://exekg.example/ds#hasNextTask";
    pub const HAS_METHOD: &str = "https://exekg.example/ds#hasMethod";
    pub const HAS_INPUT: &str = "https://exekg.example/ds#hasInput";
    pub const HAS_OUTPUT: &str = "https://exekg.example/ds#hasOutput";
    pub const HAS_INPUT_DATA_PATH: &str = "https://exekg.example/ds#hasInputDataPath";
    pub const HAS_SOURCE: &str = "https://exekg.example/ds#hasSource";
    pub const HAS_DATA_STRUCTURE: &str = "https://exekg.example/ds#hasDataStructure";
    pub const HAS_DATA_SEMANTICS: &str = "https://exekg.example/ds#hasDataSemantics";

    pub const INPUT_ROLE: &str = "https://exekg.example/ds#InputRole";
    pub const OUTPUT_ROLE: &str = "https://exekg.example/ds#OutputRole";
    pub const PARAMETER: &str = "https://exekg.example/ds#Parameter";
    pub const ACCEPTS_METHOD: &str = "https://exekg.example/ds#acceptsMethod";
    pub const FOR_TASK: &str = "https://exekg.example/ds#forTask";
    pub const FOR_METHOD: &str = "https://exekg.example/ds#forMethod";
    pub const ROLE_PROPERTY: &str = "https://exekg.example/ds#roleProperty";
    pub const POSITION: &str = "https://exekg.example/ds#position";
    pub const MIN_COUNT: &str = "https://exekg.example/ds#minCount";
    pub const MAX_COUNT: &str = "https://exekg.example/ds#maxCount";
    pub const ACCEPTS_STRUCTURE: &str = "https://exekg.example/ds#acceptsStructure";
    pub const PRODUCES_STRUCTURE: &str = "https://exekg.example/ds#producesStructure";
    pub const SAME_STRUCTURE_AS: &str = "https://exekg.example/ds#sameStructureAs";
    pub const PARAMETER_PROPERTY: &str = "https://exekg.example/ds#parameterProperty";
    pub const IS_REQUIRED: &str = "https://exekg.example/ds#isRequired";
    pub const DEFAULT_VALUE: &str = "https://exekg.example/ds#defaultValue";
}

pub mod visu {
    pub const NS: &str = "https://exekg.example/visu#";

    pub const CANVAS_TASK: &str = "https://exekg.example/visu#CanvasTask";
    pub const PLOT_TASK: &str = "https://exekg.example/visu#PlotTask";
    pub const CANVAS_METHOD: &str = "https://exekg.example/visu#CanvasMethod";
    pub const LINE_PLOT_METHOD: &str = "https://exekg.example/visu#LinePlotMethod";
    pub const SCATTER_PLOT_METHOD: &str = "https://exekg.example/visu#ScatterPlotMethod";
    pub const BAR_PLOT_METHOD: &str = "https://exekg.example/visu#BarPlotMethod";

    pub const HAS_CANVAS: &str = "https://exekg.example/visu#hasCanvas";
    pub const HAS_Y_DATA: &str = "https://exekg.example/visu#hasYData";
    pub const HAS_SECOND_Y_DATA: &str = "https://exekg.example/visu#hasSecondYData";
    pub const HAS_X_DATA: &str = "https://exekg.example/visu#hasXData";
    pub const PRODUCES_CANVAS: &str = "https://exekg.example/visu#producesCanvas";

    pub const HAS_WIDTH: &str = "https://exekg.example/visu#hasWidth";
    pub const HAS_HEIGHT: &str = "https://exekg.example/visu#hasHeight";
    pub const HAS_GRID_ROWS: &str = "https://exekg.example/visu#hasGridRows";
    pub const HAS_GRID_COLS: &str = "https://exekg.example/visu#hasGridCols";
    pub const HAS_SLOT: &str = "https://exekg.example/visu#hasSlot";
    pub const HAS_TITLE: &str = "https://exekg.example/visu#hasTitle";
}

pub mod stats {
    pub const NS: &str = "https://exekg.example/stats#";

    pub const STATISTIC_TASK: &str = "https://exekg.example/stats#StatisticTask";
    pub const NORMALIZATION_TASK: &str = "https://exekg.example/stats#NormalizationTask";
    pub const OUTLIER_DETECTION_TASK: &str = "https://exekg.example/stats#OutlierDetectionTask";
    pub const MEAN_METHOD: &str = "https://exekg.example/stats#MeanMethod";
    pub const STD_METHOD: &str = "https://exekg.example/stats#StdMethod";
    pub const IQR_METHOD: &str = "https://exekg.example/stats#IQRMethod";
    pub const ZSCORE_METHOD: &str = "https://exekg.example/stats#ZScoreMethod";
    pub const IQR_FENCE_METHOD: &str = "https://exekg.example/stats#IQRFenceMethod";

    pub const HAS_COLUMN: &str = "https://exekg.example/stats#hasColumn";
    pub const PRODUCES_STATISTIC: &str = "https://exekg.example/stats#producesStatistic";
    pub const PRODUCES_NORMALIZED_COLUMN: &str =
        "https://exekg.example/stats#producesNormalizedColumn";
    pub const PRODUCES_OUTLIER_MASK: &str = "https://exekg.example/stats#producesOutlierMask";
}

pub mod ml {
    pub const NS: &str = "https://exekg.example/ml#";

    pub const DATA_SPLITTING_TASK: &str = "https://exekg.example/ml#DataSplittingTask";
    pub const TRAIN_TASK: &str = "https://exekg.example/ml#TrainTask";
    pub const TEST_TASK: &str = "https://exekg.example/ml#TestTask";
    pub const PERFORMANCE_TASK: &str = "https://exekg.example/ml#PerformanceTask";

    pub const TRAIN_TEST_SPLIT_METHOD: &str = "https://exekg.example/ml#TrainTestSplitMethod";
    pub const KNN_TRAIN_METHOD: &str = "https://exekg.example/ml#KNNTrainMethod";
    pub const LINREG_TRAIN_METHOD: &str = "https://exekg.example/ml#LinRegTrainMethod";
    pub const MLP_TRAIN_METHOD: &str = "https://exekg.example/ml#MLPTrainMethod";
    pub const PREDICT_METHOD: &str = "https://exekg.example/ml#PredictMethod";
    pub const ACCURACY_METHOD: &str = "https://exekg.example/ml#AccuracyMethod";
    pub const MAE_METHOD: &str = "https://exekg.example/ml#MAEMethod";
    pub const RMSE_METHOD: &str = "https://exekg.example/ml#RMSEMethod";
    pub const PREDICTION_ERROR_METHOD: &str = "https://exekg.example/ml#PredictionErrorMethod";

    pub const HAS_FEATURE: &str = "https://exekg.example/ml#hasFeature";
    pub const HAS_LABEL: &str = "https://exekg.example/ml#hasLabel";
    pub const HAS_SPLIT: &str = "https://exekg.example/ml#hasSplit";
    pub const HAS_MODEL: &str = "https://exekg.example/ml#hasModel";
    pub const HAS_PREDICTION: &str = "https://exekg.example/ml#hasPrediction";
    pub const HAS_TRUTH: &str = "https://exekg.example/ml#hasTruth";
    pub const PRODUCES_SPLIT: &str = "https://exekg.example/ml#producesSplit";
    pub const PRODUCES_MODEL: &str = "https://exekg.example/ml#producesModel";
    pub const PRODUCES_PREDICTION: &str = "https://exekg.example/ml#producesPrediction";
    pub const PRODUCES_TRUTH: &str = "https://exekg.example/ml#producesTruth";
    pub const PRODUCES_METRIC: &str = "https://exekg.example/ml#producesMetric";

    pub const HAS_SPLIT_RATIO: &str = "https://exekg.example/ml#hasSplitRatio";
    pub const HAS_SEED: &str = "https://exekg.example/ml#hasSeed";
    pub const HAS_K: &str = "https://exekg.example/ml#hasK";
    pub const HAS_HIDDEN_SIZE: &str = "https://exekg.example/ml#hasHiddenSize";
    pub const HAS_EPOCHS: &str = "https://exekg.example/ml#hasEpochs";
    pub const HAS_LEARNING_RATE: &str = "https://exekg.example/ml#hasLearningRate";
}

/// Builds an [`Iri`](crate::rdf::Iri) from one of the constants above.
pub fn iri(s: &str) -> crate::rdf::Iri {
    crate::rdf::Iri::new(s).expect("vocabulary IRIs are valid")
}
