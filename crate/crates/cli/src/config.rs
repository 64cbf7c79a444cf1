//! Experiment configuration: TOML file plus command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use epiforge_core::ensemble::Aggregation;
use epiforge_core::mlmodels::{Hyperparams, HyperGrid, RegressorKind};
use epiforge_core::{ModelSubset, Scenario};

use crate::CliError;

fn date(s: &str) -> NaiveDate {
    s.parse().expect("valid built-in date")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataPaths {
    pub cases: PathBuf,
    pub vaccination: PathBuf,
    pub mobility: PathBuf,
    pub weather: PathBuf,
}

impl Default for DataPaths {
    fn default() -> Self {
        Self {
            cases: "fixtures/cases.csv".into(),
            vaccination: "fixtures/vaccination.csv".into(),
            mobility: "fixtures/mobility.csv".into(),
            weather: "fixtures/weather.csv".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub region: String,
    pub calendar_start: NaiveDate,
    pub calendar_end: NaiveDate,
    /// First day of the validation block.
    pub val_start: NaiveDate,
    /// First forecasted test day.
    pub test_start: NaiveDate,
    pub scenarios: Vec<Scenario>,
    pub models: ModelSubset,
    pub aggregations: Vec<Aggregation>,
    pub seed: u64,
    pub horizon: usize,
    pub exog_lag: usize,
    pub pop_window: usize,
    /// Anchor date splitting the test block into pre/post variant phases.
    pub variant_split: NaiveDate,
    pub include_weekday: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            region: "ES".to_string(),
            calendar_start: date("2021-01-01"),
            calendar_end: date("2021-12-31"),
            val_start: date("2021-09-02"),
            test_start: date("2021-10-02"),
            scenarios: Scenario::ALL.to_vec(),
            models: ModelSubset::All,
            aggregations: Aggregation::ALL.to_vec(),
            seed: 42,
            horizon: 14,
            exog_lag: 14,
            pop_window: 30,
            variant_split: date("2021-11-15"),
            include_weekday: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub charts: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            charts: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainSection {
    pub enabled: bool,
    pub n_permutations: usize,
    /// Attribution rows are subsampled to at most this many instances.
    pub max_rows: usize,
    /// Scenario to attribute; defaults to the largest configured one.
    pub scenario: Option<Scenario>,
}

impl Default for ExplainSection {
    fn default() -> Self {
        Self {
            enabled: true,
            n_permutations: 200,
            max_rows: 120,
            scenario: None,
        }
    }
}

/// Candidate lists for the per-kind grid search. A zero in `rf_max_depth`
/// stands for unlimited depth.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridsSection {
    pub cv_folds: usize,
    pub rf_max_depth: Vec<usize>,
    pub rf_n_estimators: Vec<usize>,
    pub gb_learning_rate: Vec<f64>,
    pub gb_n_estimators: Vec<usize>,
    pub knn_k: Vec<usize>,
    pub krr_alpha: Vec<f64>,
    pub krr_gamma: Vec<f64>,
}

impl Default for GridsSection {
    fn default() -> Self {
        Self {
            cv_folds: 5,
            rf_max_depth: vec![4, 8, 16, 0],
            rf_n_estimators: vec![50, 100, 200],
            gb_learning_rate: vec![0.01, 0.05, 0.1, 0.3],
            gb_n_estimators: vec![50, 100, 200],
            knn_k: (2..=15).collect(),
            krr_alpha: vec![1e-3, 1e-2, 1e-1, 1.0, 10.0],
            krr_gamma: vec![1e-3, 1e-2, 1e-1, 1.0, 10.0],
        }
    }
}

impl GridsSection {
    pub fn grid_for(&self, kind: RegressorKind) -> HyperGrid {
        let candidates = match kind {
            RegressorKind::RandomForest => self
                .rf_max_depth
                .iter()
                .flat_map(|&d| {
                    let depth = (d != 0).then_some(d);
                    self.rf_n_estimators
                        .iter()
                        .map(move |&n| Hyperparams::random_forest(depth, n))
                })
                .collect(),
            RegressorKind::GradientBoosting => self
                .gb_learning_rate
                .iter()
                .flat_map(|&lr| {
                    self.gb_n_estimators
                        .iter()
                        .map(move |&n| Hyperparams::gradient_boosting(lr, n))
                })
                .collect(),
            RegressorKind::Knn => self.knn_k.iter().map(|&k| Hyperparams::knn(k)).collect(),
            RegressorKind::KernelRidge => self
                .krr_alpha
                .iter()
                .flat_map(|&a| self.krr_gamma.iter().map(move |&g| Hyperparams::kernel_ridge(a, g)))
                .collect(),
        };
        HyperGrid::with_folds(candidates, self.cv_folds)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataPaths,
    pub experiment: ExperimentSection,
    pub output: OutputSection,
    pub explain: ExplainSection,
    pub grids: GridsSection,
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub region: Option<String>,
    pub scenarios: Option<Vec<Scenario>>,
    pub models: Option<ModelSubset>,
    pub aggregations: Option<Vec<Aggregation>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        let mut config: ExperimentConfig = toml::from_str(&raw)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // Data paths are relative to the config file's directory.
        if let Some(base) = path.parent() {
            for p in [
                &mut config.data.cases,
                &mut config.data.vaccination,
                &mut config.data.mobility,
                &mut config.data.weather,
            ] {
                if p.is_relative() {
                    *p = base.join(&p);
                }
            }
            if config.output.dir.is_relative() {
                config.output.dir = base.join(&config.output.dir);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, overrides: &Overrides) -> Result<(), CliError> {
        if let Some(region) = &overrides.region {
            self.experiment.region = region.clone();
        }
        if let Some(scenarios) = &overrides.scenarios {
            self.experiment.scenarios = scenarios.clone();
        }
        if let Some(models) = overrides.models {
            self.experiment.models = models;
        }
        if let Some(aggregations) = &overrides.aggregations {
            self.experiment.aggregations = aggregations.clone();
        }
        if let Some(seed) = overrides.seed {
            self.experiment.seed = seed;
        }
        if let Some(out) = &overrides.out {
            self.output.dir = out.clone();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let e = &self.experiment;
        if e.horizon < 1 {
            return Err(CliError::Config("horizon must be at least 1".into()));
        }
        if e.pop_window < 3 {
            return Err(CliError::Config("pop_window must be at least 3".into()));
        }
        if e.scenarios.is_empty() {
            return Err(CliError::Config("at least one scenario is required".into()));
        }
        if e.aggregations.is_empty() {
            return Err(CliError::Config("at least one aggregation is required".into()));
        }
        if e.horizon > e.exog_lag {
            return Err(CliError::Config(format!(
                "horizon {} cannot exceed exog_lag {}: later steps would need future exogenous data",
                e.horizon, e.exog_lag
            )));
        }
        if !(e.calendar_start < e.val_start
            && e.val_start < e.test_start
            && e.test_start <= e.calendar_end)
        {
            return Err(CliError::Config(
                "dates must satisfy calendar_start < val_start < test_start <= calendar_end".into(),
            ));
        }
        if self.grids.cv_folds < 2 {
            return Err(CliError::Config("cv_folds must be at least 2".into()));
        }
        let grids_nonempty = [
            !self.grids.rf_max_depth.is_empty() && !self.grids.rf_n_estimators.is_empty(),
            !self.grids.gb_learning_rate.is_empty() && !self.grids.gb_n_estimators.is_empty(),
            !self.grids.knn_k.is_empty(),
            !self.grids.krr_alpha.is_empty() && !self.grids.krr_gamma.is_empty(),
        ];
        if grids_nonempty.iter().any(|ok| !ok) {
            return Err(CliError::Config("every model grid needs at least one candidate".into()));
        }
        Ok(())
    }

    /// Ordered, deduplicated scenario list.
    pub fn scenarios(&self) -> Vec<Scenario> {
        let set: BTreeMap<u8, Scenario> = self
            .experiment
            .scenarios
            .iter()
            .map(|s| (s.id(), *s))
            .collect();
        set.into_values().collect()
    }

    pub fn wants_ml(&self) -> bool {
        matches!(self.experiment.models, ModelSubset::Ml | ModelSubset::All)
    }

    pub fn wants_pop(&self) -> bool {
        matches!(self.experiment.models, ModelSubset::Pop | ModelSubset::All)
    }

    pub fn explain_scenario(&self) -> Scenario {
        self.explain
            .scenario
            .unwrap_or_else(|| *self.scenarios().last().expect("validated non-empty"))
    }

    /// A starter config pointing at fixture files, serialized as TOML.
    pub fn sample_toml() -> String {
        let config = ExperimentConfig::default();
        toml::to_string_pretty(&config).expect("default config serializes")
    }
}
