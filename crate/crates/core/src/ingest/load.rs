//! CSV loaders for the four feed schemas, with per-row validation.
//!
//! Every error names the file, line and column it came from. Duplicate
//! keys are a hard error rather than last-wins: a silently overwritten row
//! usually means the upstream feed is corrupt.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;

use crate::calendar::IsoWeek;
use crate::ingest::records::{
    DoseNumber, FluxRecord, RawCaseRecord, WeatherRecord, WeeklyDoseRecord,
};
use crate::ingest::IngestError;
use crate::regions::{RegionCode, RegionRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Cases,
    Vaccination,
    Mobility,
    Weather,
}

impl DatasetKind {
    pub fn header(self) -> &'static [&'static str] {
        match self {
            Self::Cases => &["date", "region", "new_cases"],
            Self::Vaccination => &["iso_week", "dose_number", "doses"],
            Self::Mobility => &["date", "origin", "destination", "flux"],
            Self::Weather => &["date", "region", "station_id", "mean_temp", "precipitation"],
        }
    }
}

/// Validated rows of one feed.
#[derive(Debug, Clone)]
pub enum Dataset {
    Cases(Vec<RawCaseRecord>),
    Vaccination(Vec<WeeklyDoseRecord>),
    Mobility(Vec<FluxRecord>),
    Weather(Vec<WeatherRecord>),
}

pub fn load_dataset(kind: DatasetKind, path: &Path) -> Result<Dataset, IngestError> {
    Ok(match kind {
        DatasetKind::Cases => Dataset::Cases(load_cases(path)?),
        DatasetKind::Vaccination => Dataset::Vaccination(load_vaccination(path)?),
        DatasetKind::Mobility => Dataset::Mobility(load_mobility(path)?),
        DatasetKind::Weather => Dataset::Weather(load_weather(path)?),
    })
}

/// Cursor over one CSV file carrying the context needed for error
/// reporting: path, resolved column indices and the current line.
struct FeedReader {
    path: String,
    reader: csv::Reader<std::fs::File>,
    columns: Vec<usize>,
    names: &'static [&'static str],
    line: u64,
}

impl FeedReader {
    fn open(kind: DatasetKind, path: &Path) -> Result<Self, IngestError> {
        let display = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
            path: display.clone(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(file);
        let headers = reader.headers().map_err(|e| IngestError::MalformedRow {
            path: display.clone(),
            line: 1,
            reason: e.to_string(),
        })?;
        let names = kind.header();
        let mut columns = Vec::with_capacity(names.len());
        for name in names {
            let idx = headers.iter().position(|h| h == *name).ok_or_else(|| {
                IngestError::MissingColumn {
                    path: display.clone(),
                    column: name,
                }
            })?;
            columns.push(idx);
        }
        Ok(Self {
            path: display,
            reader,
            columns,
            names,
            line: 1,
        })
    }

    /// Next record, or None at end of file. `line` then points at the row
    /// just read (header is line 1).
    fn next_row(&mut self) -> Result<Option<csv::StringRecord>, IngestError> {
        let mut record = csv::StringRecord::new();
        self.line += 1;
        match self.reader.read_record(&mut record) {
            Ok(true) => Ok(Some(record)),
            Ok(false) => Ok(None),
            Err(e) => Err(IngestError::MalformedRow {
                path: self.path.clone(),
                line: self.line,
                reason: e.to_string(),
            }),
        }
    }

    fn field<'r>(&self, record: &'r csv::StringRecord, col: usize) -> Result<&'r str, IngestError> {
        record
            .get(self.columns[col])
            .ok_or_else(|| IngestError::MalformedRow {
                path: self.path.clone(),
                line: self.line,
                reason: "row has fewer fields than the header".to_string(),
            })
    }

    fn unparsable(&self, col: usize, reason: impl Into<String>) -> IngestError {
        IngestError::UnparsableValue {
            path: self.path.clone(),
            line: self.line,
            column: self.names[col],
            reason: reason.into(),
        }
    }

    fn duplicate(&self, key: String) -> IngestError {
        IngestError::DuplicateKey {
            path: self.path.clone(),
            line: self.line,
            key,
        }
    }

    fn parse_date(&self, record: &csv::StringRecord, col: usize) -> Result<NaiveDate, IngestError> {
        let raw = self.field(record, col)?;
        raw.parse()
            .map_err(|_| self.unparsable(col, format!("{raw:?} is not an ISO-8601 date")))
    }

    fn parse_count(&self, record: &csv::StringRecord, col: usize) -> Result<u64, IngestError> {
        let raw = self.field(record, col)?;
        raw.parse()
            .map_err(|_| self.unparsable(col, format!("{raw:?} is not a non-negative count")))
    }

    fn parse_f64(&self, record: &csv::StringRecord, col: usize) -> Result<f64, IngestError> {
        let raw = self.field(record, col)?;
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.unparsable(col, format!("{raw:?} is not a finite number")))
    }

    /// A region column: must be a reporting region (the national aggregate
    /// never appears in raw feeds).
    fn parse_region(&self, record: &csv::StringRecord, col: usize) -> Result<RegionCode, IngestError> {
        let raw = self.field(record, col)?;
        let code = RegionCode::new(raw);
        let registry = RegionRegistry::bundled();
        if !registry.is_known(&code) {
            return Err(self.unparsable(col, format!("{raw:?} is not a known region code")));
        }
        if code.is_national() {
            return Err(self.unparsable(col, "the national aggregate cannot appear in a raw feed"));
        }
        Ok(code)
    }
}

pub fn load_cases(path: &Path) -> Result<Vec<RawCaseRecord>, IngestError> {
    let mut feed = FeedReader::open(DatasetKind::Cases, path)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    while let Some(record) = feed.next_row()? {
        let date = feed.parse_date(&record, 0)?;
        let region = feed.parse_region(&record, 1)?;
        let new_cases = feed.parse_count(&record, 2)?;
        if !seen.insert((date, region.clone())) {
            return Err(feed.duplicate(format!("{date}, {region}")));
        }
        out.push(RawCaseRecord {
            date,
            region,
            new_cases,
        });
    }
    Ok(out)
}

pub fn load_vaccination(path: &Path) -> Result<Vec<WeeklyDoseRecord>, IngestError> {
    let mut feed = FeedReader::open(DatasetKind::Vaccination, path)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    while let Some(record) = feed.next_row()? {
        let raw_week = feed.field(&record, 0)?;
        let iso_week = IsoWeek::parse(raw_week)
            .map_err(|e| feed.unparsable(0, e.to_string()))?;
        let dose_raw = feed.parse_count(&record, 1)?;
        let dose_number = u8::try_from(dose_raw)
            .ok()
            .and_then(DoseNumber::from_u8)
            .ok_or_else(|| feed.unparsable(1, format!("dose number must be 1 or 2, got {dose_raw}")))?;
        let doses = feed.parse_count(&record, 2)?;
        if !seen.insert((iso_week, dose_number)) {
            return Err(feed.duplicate(format!("{iso_week}, dose {}", dose_number.as_u8())));
        }
        out.push(WeeklyDoseRecord {
            iso_week,
            dose_number,
            doses,
        });
    }
    Ok(out)
}

pub fn load_mobility(path: &Path) -> Result<Vec<FluxRecord>, IngestError> {
    let mut feed = FeedReader::open(DatasetKind::Mobility, path)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    while let Some(record) = feed.next_row()? {
        let date = feed.parse_date(&record, 0)?;
        let origin = feed.parse_region(&record, 1)?;
        let destination = feed.parse_region(&record, 2)?;
        let flux = feed.parse_count(&record, 3)?;
        if !seen.insert((date, origin.clone(), destination.clone())) {
            return Err(feed.duplicate(format!("{date}, {origin}->{destination}")));
        }
        out.push(FluxRecord {
            date,
            origin,
            destination,
            flux,
        });
    }
    Ok(out)
}

pub fn load_weather(path: &Path) -> Result<Vec<WeatherRecord>, IngestError> {
    let mut feed = FeedReader::open(DatasetKind::Weather, path)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    while let Some(record) = feed.next_row()? {
        let date = feed.parse_date(&record, 0)?;
        let region = feed.parse_region(&record, 1)?;
        let station_id = feed.field(&record, 2)?.to_string();
        let mean_temp = feed.parse_f64(&record, 3)?;
        let precipitation = feed.parse_f64(&record, 4)?;
        if precipitation < 0.0 {
            return Err(feed.unparsable(4, "precipitation cannot be negative"));
        }
        if !seen.insert((date, station_id.clone())) {
            return Err(feed.duplicate(format!("{date}, station {station_id}")));
        }
        out.push(WeatherRecord {
            date,
            region,
            station_id,
            mean_temp,
            precipitation,
        });
    }
    Ok(out)
}

fn io_err(path: &Path, source: std::io::Error) -> IngestError {
    IngestError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_cases_csv(path: &Path, records: &[RawCaseRecord]) -> Result<(), IngestError> {
    let mut out = String::from("date,region,new_cases\n");
    for r in records {
        out.push_str(&format!("{},{},{}\n", r.date, r.region, r.new_cases));
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_vaccination_csv(path: &Path, records: &[WeeklyDoseRecord]) -> Result<(), IngestError> {
    let mut out = String::from("iso_week,dose_number,doses\n");
    for r in records {
        out.push_str(&format!("{},{},{}\n", r.iso_week, r.dose_number.as_u8(), r.doses));
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_mobility_csv(path: &Path, records: &[FluxRecord]) -> Result<(), IngestError> {
    let mut out = String::from("date,origin,destination,flux\n");
    for r in records {
        out.push_str(&format!("{},{},{},{}\n", r.date, r.origin, r.destination, r.flux));
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_weather_csv(path: &Path, records: &[WeatherRecord]) -> Result<(), IngestError> {
    let mut out = String::from("date,region,station_id,mean_temp,precipitation\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.date, r.region, r.station_id, r.mean_temp, r.precipitation
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Write-temp-then-rename so a failed run never leaves a truncated file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IngestError> {
    let tmp = path.with_extension("tmp");
    let mut file = std::fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    file.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
    file.flush().map_err(|e| io_err(&tmp, e))?;
    drop(file);
    std::fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(contents: &str) -> (tempdir::TempDirGuard, std::path::PathBuf) {
        let dir = tempdir::guard();
        let path = dir.path().join("feed.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        (dir, path)
    }

    // Minimal temp-dir helper so core's unit tests avoid extra dev-deps.
    mod tempdir {
        use std::path::{Path, PathBuf};
        use std::sync::atomic::{AtomicU64, Ordering};

        static COUNTER: AtomicU64 = AtomicU64::new(0);

        pub struct TempDirGuard(PathBuf);

        impl TempDirGuard {
            pub fn path(&self) -> &Path {
                &self.0
            }
        }

        impl Drop for TempDirGuard {
            fn drop(&mut self) {
                let _ = std::fs::remove_dir_all(&self.0);
            }
        }

        pub fn guard() -> TempDirGuard {
            let dir = std::env::temp_dir().join(format!(
                "epiforge-core-test-{}-{}",
                std::process::id(),
                COUNTER.fetch_add(1, Ordering::Relaxed)
            ));
            std::fs::create_dir_all(&dir).unwrap();
            TempDirGuard(dir)
        }
    }

    #[test]
    fn parses_cases_rows_in_file_order() {
        let (_g, path) = write_temp("date,region,new_cases\n2021-01-01,CB,120\n2021-01-02,CB,95\n");
        let rows = load_cases(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].new_cases, 120);
        assert_eq!(rows[1].date, "2021-01-02".parse().unwrap());
        assert_eq!(rows[1].region.as_str(), "CB");
    }

    #[test]
    fn missing_column_is_named() {
        let (_g, path) = write_temp("date,new_cases\n2021-01-01,120\n");
        match load_cases(&path).unwrap_err() {
            IngestError::MissingColumn { column, .. } => assert_eq!(column, "region"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dose_number_three_is_unparsable() {
        let (_g, path) = write_temp("iso_week,dose_number,doses\n2021-W02,3,500\n");
        match load_vaccination(&path).unwrap_err() {
            IngestError::UnparsableValue { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, "dose_number");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn intra_mobility_row_accepted() {
        let (_g, path) = write_temp("date,origin,destination,flux\n2021-03-03,CB,CB,4000\n");
        let rows = load_mobility(&path).unwrap();
        assert_eq!(rows[0].origin, rows[0].destination);
        assert_eq!(rows[0].flux, 4000);
    }

    #[test]
    fn duplicate_key_is_a_hard_error() {
        let (_g, path) =
            write_temp("date,region,new_cases\n2021-01-01,CB,120\n2021-01-01,CB,95\n");
        match load_cases(&path).unwrap_err() {
            IngestError::DuplicateKey { line, key, .. } => {
                assert_eq!(line, 3);
                assert!(key.contains("CB"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn negative_count_is_unparsable() {
        let (_g, path) = write_temp("date,region,new_cases\n2021-01-01,CB,-3\n");
        match load_cases(&path).unwrap_err() {
            IngestError::UnparsableValue { column, .. } => assert_eq!(column, "new_cases"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_region_is_rejected() {
        let (_g, path) = write_temp("date,region,new_cases\n2021-01-01,ZZ,3\n");
        assert!(matches!(
            load_cases(&path).unwrap_err(),
            IngestError::UnparsableValue { column: "region", .. }
        ));
        let (_g, path) = write_temp("date,region,new_cases\n2021-01-01,ES,3\n");
        assert!(load_cases(&path).is_err(), "aggregate code must be rejected");
    }

    #[test]
    fn round_trip_is_lossless_for_all_schemas() {
        let dir = tempdir::guard();
        let cases = "date,region,new_cases\n2021-01-01,CB,120\n2021-01-02,MD,95\n";
        let vax = "iso_week,dose_number,doses\n2020-W53,1,700\n2021-W01,2,350\n";
        let mob = "date,origin,destination,flux\n2021-01-03,CB,CB,4000\n2021-01-03,MD,CB,120\n";
        let wx = "date,region,station_id,mean_temp,precipitation\n2021-01-01,CB,S1,10.5,0\n2021-01-01,CB,S2,-2.25,1.75\n";
        for (name, contents) in [("c", cases), ("v", vax), ("m", mob), ("w", wx)] {
            let path = dir.path().join(format!("{name}.csv"));
            std::fs::write(&path, contents).unwrap();
            let rewritten = dir.path().join(format!("{name}2.csv"));
            match name {
                "c" => write_cases_csv(&rewritten, &load_cases(&path).unwrap()).unwrap(),
                "v" => write_vaccination_csv(&rewritten, &load_vaccination(&path).unwrap()).unwrap(),
                "m" => write_mobility_csv(&rewritten, &load_mobility(&path).unwrap()).unwrap(),
                _ => write_weather_csv(&rewritten, &load_weather(&path).unwrap()).unwrap(),
            }
            assert_eq!(
                std::fs::read_to_string(&rewritten).unwrap(),
                contents,
                "{name} round trip"
            );
        }
    }
}
