//! Raw feed parsing, validation and panel assembly.
//!
//! Four CSV feeds enter the toolkit: daily confirmed cases per region,
//! weekly vaccine doses (national), origin-destination mobility fluxes and
//! per-station weather. `load` validates them row by row; `panel` fuses
//! them into a calendar-aligned [`RegionPanel`] ready for modeling.

mod load;
mod panel;
mod records;

use chrono::NaiveDate;
use thiserror::Error;

use crate::features::FeatureError;
use crate::regions::RegionCode;

pub use load::{
    load_cases, load_dataset, load_mobility, load_vaccination, load_weather, write_cases_csv,
    write_mobility_csv, write_vaccination_csv, write_weather_csv, Dataset, DatasetKind,
};
pub use panel::{build_panel, PanelInputs, RegionPanel, Split, SplitBoundaries};
pub use records::{DoseNumber, FluxRecord, RawCaseRecord, WeatherRecord, WeeklyDoseRecord};

#[cfg(test)]
pub(crate) use panel::test_support;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("ingest: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("ingest: {path}: missing column {column:?}")]
    MissingColumn { path: String, column: &'static str },
    #[error("ingest: {path}: line {line}: column {column:?}: {reason}")]
    UnparsableValue {
        path: String,
        line: u64,
        column: &'static str,
        reason: String,
    },
    #[error("ingest: {path}: line {line}: duplicate key ({key})")]
    DuplicateKey { path: String, line: u64, key: String },
    #[error("ingest: {path}: line {line}: malformed row: {reason}")]
    MalformedRow {
        path: String,
        line: u64,
        reason: String,
    },
    #[error("ingest: cases for {region} have no coverage on {day}")]
    MissingCoverage { region: RegionCode, day: NaiveDate },
    #[error("ingest: no weather observations for {region} on {day}")]
    MissingWeather { region: RegionCode, day: NaiveDate },
    #[error("ingest: unknown region {0:?}")]
    UnknownRegion(RegionCode),
    #[error(
        "ingest: split boundaries must satisfy calendar start < val start < test start <= \
         calendar end; got val {val_start}, test {test_start} inside {cal_start}..{cal_end}"
    )]
    BadSplitBoundaries {
        val_start: NaiveDate,
        test_start: NaiveDate,
        cal_start: NaiveDate,
        cal_end: NaiveDate,
    },
    #[error(transparent)]
    Feature(#[from] FeatureError),
}
