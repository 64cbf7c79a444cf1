//! Lagged design matrices for the recurrent one-step regressors.
//!
//! A row targeting day `d` carries the case counts of the 14 preceding
//! days as `lag_1..lag_14` plus, depending on the scenario, the exogenous
//! series sampled 14 days before `d` — exogenous drivers act on the case
//! curve with a two-week delay.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::features::FeatureError;
use crate::ingest::{RegionPanel, Split};

/// Input configuration: which exogenous blocks the models see.
///
/// 1 = cases only, 2 = +vaccination, 3 = +mobility, 4 = +climate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Scenario(u8);

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario(1), Scenario(2), Scenario(3), Scenario(4)];

    pub fn new(id: u8) -> Option<Self> {
        (1..=4).contains(&id).then_some(Self(id))
    }

    pub fn id(self) -> u8 {
        self.0
    }

    pub fn uses_vaccination(self) -> bool {
        self.0 >= 2
    }

    pub fn uses_mobility(self) -> bool {
        self.0 >= 3
    }

    pub fn uses_climate(self) -> bool {
        self.0 >= 4
    }
}

impl TryFrom<u8> for Scenario {
    type Error = String;

    fn try_from(id: u8) -> Result<Self, Self::Error> {
        Scenario::new(id).ok_or_else(|| format!("scenario must be 1..=4, got {id}"))
    }
}

impl From<Scenario> for u8 {
    fn from(s: Scenario) -> u8 {
        s.0
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    pub n_lags: usize,
    pub exog_lag: usize,
    /// Feed the target day's weekday (1..=7) as an extra column. Off by
    /// default: it did not earn its keep as a predictor.
    pub include_weekday: bool,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            n_lags: 14,
            exog_lag: 14,
            include_weekday: false,
        }
    }
}

/// Row-major feature matrix with aligned targets, dates and split labels.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub scenario: Scenario,
    pub column_names: Vec<String>,
    data: Vec<f64>,
    ncols: usize,
    pub targets: Vec<f64>,
    pub target_dates: Vec<NaiveDate>,
    pub splits: Vec<Split>,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.targets.len()
    }

    pub fn n_cols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub(crate) fn set_row(&mut self, r: usize, values: &[f64]) {
        assert_eq!(values.len(), self.ncols);
        self.data[r * self.ncols..(r + 1) * self.ncols].copy_from_slice(values);
    }

    pub fn rows_in_split(&self, split: Split) -> Vec<usize> {
        (0..self.n_rows()).filter(|&r| self.splits[r] == split).collect()
    }

    pub fn rows_owned(&self, indices: &[usize]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let x = indices.iter().map(|&r| self.row(r).to_vec()).collect();
        let y = indices.iter().map(|&r| self.targets[r]).collect();
        (x, y)
    }

    /// Debug dump with named columns plus `target` and `split`.
    pub fn to_csv(&self) -> String {
        let mut out = self.column_names.join(",");
        out.push_str(",target,split\n");
        for r in 0..self.n_rows() {
            for v in self.row(r) {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{},{}\n", self.targets[r], self.splits[r]));
        }
        out
    }
}

fn column_names(scenario: Scenario, opts: &DesignOptions) -> Vec<String> {
    let mut names: Vec<String> = (1..=opts.n_lags).map(|k| format!("lag_{k}")).collect();
    if scenario.uses_vaccination() {
        names.push("vax1".into());
        names.push("vax2".into());
    }
    if scenario.uses_mobility() {
        names.push("mob".into());
    }
    if scenario.uses_climate() {
        names.push("temp".into());
        names.push("precip".into());
    }
    if opts.include_weekday {
        names.push("weekday".into());
    }
    names
}

pub fn build_design_matrix(
    panel: &RegionPanel,
    scenario: Scenario,
    opts: &DesignOptions,
) -> Result<DesignMatrix, FeatureError> {
    let lead = opts.n_lags.max(opts.exog_lag);
    if panel.len() <= lead {
        return Err(FeatureError::InsufficientHistory {
            len: panel.len(),
            min: lead + 1,
        });
    }
    let names = column_names(scenario, opts);
    let ncols = names.len();
    let n_rows = panel.len() - lead;
    let mut data = Vec::with_capacity(n_rows * ncols);
    let mut targets = Vec::with_capacity(n_rows);
    let mut target_dates = Vec::with_capacity(n_rows);
    let mut splits = Vec::with_capacity(n_rows);
    for i in lead..panel.len() {
        for k in 1..=opts.n_lags {
            data.push(panel.cases[i - k]);
        }
        let e = i - opts.exog_lag;
        if scenario.uses_vaccination() {
            data.push(panel.vax_dose1[e]);
            data.push(panel.vax_dose2[e]);
        }
        if scenario.uses_mobility() {
            data.push(panel.mobility[e]);
        }
        if scenario.uses_climate() {
            data.push(panel.temperature[e]);
            data.push(panel.precipitation[e]);
        }
        let date = panel.calendar.date_at(i).expect("index within calendar");
        if opts.include_weekday {
            data.push(date.weekday().number_from_monday() as f64);
        }
        targets.push(panel.cases[i]);
        target_dates.push(date);
        splits.push(panel.splits[i]);
    }
    Ok(DesignMatrix {
        scenario,
        column_names: names,
        data,
        ncols,
        targets,
        target_dates,
        splits,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::test_support::synthetic_panel;

    #[test]
    fn lag_layout_matches_the_shift_rule() {
        // 15 days of cases 1..=15; the single possible row targets day 15.
        let panel = synthetic_panel(15, |i| (i + 1) as f64);
        let m = build_design_matrix(&panel, Scenario::new(1).unwrap(), &DesignOptions::default())
            .unwrap();
        assert_eq!(m.n_rows(), 1);
        assert_eq!(m.targets[0], 15.0);
        let row = m.row(0);
        assert_eq!(row[0], 14.0, "lag_1 is yesterday");
        assert_eq!(row[13], 1.0, "lag_14 is two weeks back");
    }

    #[test]
    fn scenario_column_widths() {
        let panel = synthetic_panel(40, |i| (i * i + 1) as f64);
        let widths: Vec<usize> = Scenario::ALL
            .iter()
            .map(|s| {
                build_design_matrix(&panel, *s, &DesignOptions::default())
                    .unwrap()
                    .n_cols()
            })
            .collect();
        assert_eq!(widths, vec![14, 16, 17, 19]);
    }

    #[test]
    fn exogenous_columns_use_the_two_week_delay() {
        let panel = synthetic_panel(20, |i| (i + 1) as f64);
        let m = build_design_matrix(&panel, Scenario::new(3).unwrap(), &DesignOptions::default())
            .unwrap();
        // First row targets index 14; mobility column = panel.mobility[0].
        let mob_col = m.column_names.iter().position(|n| n == "mob").unwrap();
        assert_eq!(m.row(0)[mob_col], panel.mobility[0]);
        assert_eq!(m.row(5)[mob_col], panel.mobility[5]);
    }

    #[test]
    fn too_short_panel_is_rejected() {
        let panel = synthetic_panel(14, |i| i as f64);
        assert!(matches!(
            build_design_matrix(&panel, Scenario::new(1).unwrap(), &DesignOptions::default()),
            Err(FeatureError::InsufficientHistory { .. })
        ));
    }

    #[test]
    fn no_row_reads_at_or_after_its_target_day() {
        let panel = synthetic_panel(60, |i| (i as f64).sin() * 50.0 + 100.0);
        let opts = DesignOptions::default();
        let m = build_design_matrix(&panel, Scenario::new(4).unwrap(), &opts).unwrap();
        for r in 0..m.n_rows() {
            let target_idx = panel
                .calendar
                .index_of(m.target_dates[r])
                .expect("target inside calendar");
            let row = m.row(r);
            for k in 1..=opts.n_lags {
                assert_eq!(row[k - 1], panel.cases[target_idx - k]);
            }
            let e = target_idx - opts.exog_lag;
            assert_eq!(row[opts.n_lags], panel.vax_dose1[e]);
            assert_eq!(row[opts.n_lags + 4], panel.precipitation[e]);
        }
    }

    #[test]
    fn weekday_column_is_opt_in() {
        let panel = synthetic_panel(20, |i| (i + 1) as f64);
        let opts = DesignOptions {
            include_weekday: true,
            ..DesignOptions::default()
        };
        let m = build_design_matrix(&panel, Scenario::new(1).unwrap(), &opts).unwrap();
        assert_eq!(m.n_cols(), 15);
        let wd = m.row(0)[14];
        assert!((1.0..=7.0).contains(&wd));
    }

    #[test]
    fn scenario_parsing_bounds() {
        assert!(Scenario::new(0).is_none());
        assert!(Scenario::new(5).is_none());
        assert_eq!(Scenario::new(4).unwrap().to_string(), "s4");
    }
}
