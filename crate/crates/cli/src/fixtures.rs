//! Deterministic synthetic dataset generation.
//!
//! Produces schema-valid feeds for a year: per-region daily cases built
//! from mixtures of logistic waves with a weekly diagnostic pattern and
//! multiplicative noise, weekly national dose counts, Wednesday/Sunday
//! origin-destination fluxes (starting the week before the calendar so
//! the day-assignment rule has its lookback), and two weather stations
//! per community. Identical seeds yield byte-identical files.

use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate, Weekday};
use rand::Rng;

use epiforge_core::calendar::IsoWeek;
use epiforge_core::ingest::{
    write_cases_csv, write_mobility_csv, write_vaccination_csv, write_weather_csv, DoseNumber,
    FluxRecord, RawCaseRecord, WeatherRecord, WeeklyDoseRecord,
};
use epiforge_core::rng::keyed_rng;

use crate::CliError;

/// Communities generated with full feeds, with a rough size factor.
const COMMUNITIES: [(&str, f64); 5] = [
    ("AN", 8.5),
    ("CB", 0.6),
    ("CT", 7.7),
    ("GA", 2.7),
    ("MD", 6.7),
];

/// The autonomous cities report cases only; they stay out of the mobility
/// and weather aggregates.
const CITIES: [(&str, f64); 1] = [("CE", 0.08)];

// Stream ids for the keyed generator, one per independent series.
const STREAM_CASES: u64 = 0x10;
const STREAM_VAX: u64 = 0x20;
const STREAM_MOBILITY: u64 = 0x30;
const STREAM_WEATHER: u64 = 0x40;

#[derive(Debug, Clone)]
pub struct FixturePaths {
    pub cases: PathBuf,
    pub vaccination: PathBuf,
    pub mobility: PathBuf,
    pub weather: PathBuf,
}

fn d(s: &str) -> NaiveDate {
    s.parse().expect("valid literal date")
}

/// A bell-shaped daily-case pulse: the derivative of a logistic wave of
/// total size `total`, growth rate `rate`, centered at `center`.
fn wave(t: f64, center: f64, rate: f64, total: f64) -> f64 {
    let z = (-rate * (t - center)).exp();
    total * rate * z / ((1.0 + z) * (1.0 + z))
}

fn weekday_factor(day: NaiveDate) -> f64 {
    match day.weekday() {
        Weekday::Sat => 0.82,
        Weekday::Sun => 0.72,
        Weekday::Mon => 0.93,
        _ => 1.0,
    }
}

fn generate_cases(seed: u64, calendar: &[NaiveDate]) -> Vec<RawCaseRecord> {
    let mut records = Vec::new();
    let regions: Vec<(&str, f64)> = COMMUNITIES.iter().chain(CITIES.iter()).copied().collect();
    for (region_idx, (code, size)) in regions.iter().enumerate() {
        let mut rng = keyed_rng(seed, STREAM_CASES + region_idx as u64);
        // Three epidemic waves per region: spring, summer, year-end surge.
        let waves: Vec<(f64, f64, f64)> = [(30.0, 90_000.0), (190.0, 160_000.0), (345.0, 420_000.0)]
            .iter()
            .map(|&(center, total)| {
                (
                    center + rng.gen_range(-12.0..12.0),
                    rng.gen_range(0.055..0.095),
                    total * size * rng.gen_range(0.7..1.3),
                )
            })
            .collect();
        let base = 40.0 * size.max(0.2);
        for (t, day) in calendar.iter().enumerate() {
            let level: f64 = base
                + waves
                    .iter()
                    .map(|&(center, rate, total)| wave(t as f64, center, rate, total))
                    .sum::<f64>();
            let noise = (rng.gen_range(-1.0..1.0_f64) * 0.10).exp();
            let value = (level * weekday_factor(*day) * noise).round().max(1.0);
            records.push(RawCaseRecord {
                date: *day,
                region: (*code).into(),
                new_cases: value as u64,
            });
        }
    }
    records
}

fn generate_vaccination(seed: u64) -> Vec<WeeklyDoseRecord> {
    let mut rng = keyed_rng(seed, STREAM_VAX);
    let mut records = Vec::new();
    // 2020-W52 precedes the calendar; 2021-W52 closes just after it.
    let mut weeks: Vec<IsoWeek> = vec![
        IsoWeek::parse("2020-W52").unwrap(),
        IsoWeek::parse("2020-W53").unwrap(),
    ];
    for w in 1..=52 {
        weeks.push(IsoWeek::parse(&format!("2021-W{w:02}")).unwrap());
    }
    for (i, week) in weeks.iter().enumerate() {
        let t = i as f64;
        // Ramp up, peak around early summer, ebb in autumn.
        let dose1 = 1.6e6 * wave(t, 24.0, 0.22, 54.0) + 30_000.0;
        let dose2 = 1.5e6 * wave(t, 29.0, 0.22, 54.0) + 15_000.0;
        for (dose_number, level) in [(DoseNumber::First, dose1), (DoseNumber::Second, dose2)] {
            let jitter = rng.gen_range(0.92..1.08);
            records.push(WeeklyDoseRecord {
                iso_week: *week,
                dose_number,
                doses: (level * jitter).round().max(0.0) as u64,
            });
        }
    }
    records
}

fn generate_mobility(seed: u64, start: NaiveDate, end: NaiveDate) -> Vec<FluxRecord> {
    let mut rng = keyed_rng(seed, STREAM_MOBILITY);
    // Base fluxes per ordered pair, fixed for the year.
    let n = COMMUNITIES.len();
    let mut base = vec![vec![0.0; n]; n];
    for (i, (_, size_i)) in COMMUNITIES.iter().enumerate() {
        for (j, (_, size_j)) in COMMUNITIES.iter().enumerate() {
            base[i][j] = if i == j {
                2.4e6 * size_i * rng.gen_range(0.8..1.2)
            } else {
                9.0e3 * size_i * size_j * rng.gen_range(0.5..1.5)
            };
        }
    }
    let mut records = Vec::new();
    let mut day = start;
    while day <= end {
        if matches!(day.weekday(), Weekday::Wed | Weekday::Sun) {
            let weekend = if day.weekday() == Weekday::Sun { 0.62 } else { 1.0 };
            let t = (day - start).num_days() as f64;
            let season = 1.0 + 0.18 * (t / 365.0 * std::f64::consts::TAU - 1.2).sin();
            for (j, (origin, _)) in COMMUNITIES.iter().enumerate() {
                for (i, (destination, _)) in COMMUNITIES.iter().enumerate() {
                    let jitter = rng.gen_range(0.93..1.07);
                    let flux = base[j][i] * weekend * season * jitter;
                    records.push(FluxRecord {
                        date: day,
                        origin: (*origin).into(),
                        destination: (*destination).into(),
                        flux: flux.round().max(0.0) as u64,
                    });
                }
            }
        }
        day += chrono::Duration::days(1);
    }
    records
}

fn generate_weather(seed: u64, calendar: &[NaiveDate]) -> Vec<WeatherRecord> {
    let mut records = Vec::new();
    for (region_idx, (code, _)) in COMMUNITIES.iter().enumerate() {
        let mut rng = keyed_rng(seed, STREAM_WEATHER + region_idx as u64);
        let region_offset = rng.gen_range(-3.0..5.0);
        for station in 1..=2 {
            let station_offset = rng.gen_range(-1.5..1.5);
            for (t, day) in calendar.iter().enumerate() {
                // Mid-latitude seasonal cycle: coldest late January.
                let seasonal = 12.0
                    - 9.5 * ((t as f64 - 28.0) / 365.0 * std::f64::consts::TAU).cos();
                let mean_temp = seasonal + region_offset + station_offset
                    + rng.gen_range(-2.2..2.2);
                let wet_season =
                    0.5 + 0.45 * ((t as f64 + 40.0) / 365.0 * std::f64::consts::TAU).cos();
                let shower: f64 = rng.gen_range(0.0..1.0);
                let precipitation = if shower < 0.35 + 0.2 * wet_season {
                    rng.gen_range(0.1..18.0) * wet_season.max(0.1)
                } else {
                    0.0
                };
                records.push(WeatherRecord {
                    date: *day,
                    region: (*code).into(),
                    station_id: format!("{code}-{station:02}"),
                    mean_temp: (mean_temp * 10.0).round() / 10.0,
                    precipitation: (precipitation * 10.0).round() / 10.0,
                });
            }
        }
    }
    records
}

/// Write the four synthetic feeds into `out_dir` and return their paths.
pub fn make_fixtures(seed: u64, out_dir: &Path) -> Result<FixturePaths, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| {
        CliError::Io(format!("cannot create {}: {e}", out_dir.display()))
    })?;
    let calendar: Vec<NaiveDate> = {
        let start = d("2021-01-01");
        let end = d("2021-12-31");
        start.iter_days().take_while(|day| *day <= end).collect()
    };

    let paths = FixturePaths {
        cases: out_dir.join("cases.csv"),
        vaccination: out_dir.join("vaccination.csv"),
        mobility: out_dir.join("mobility.csv"),
        weather: out_dir.join("weather.csv"),
    };
    write_cases_csv(&paths.cases, &generate_cases(seed, &calendar))?;
    write_vaccination_csv(&paths.vaccination, &generate_vaccination(seed))?;
    // Mobility observations start the Wednesday before the calendar.
    write_mobility_csv(
        &paths.mobility,
        &generate_mobility(seed, d("2020-12-23"), d("2021-12-31")),
    )?;
    write_weather_csv(&paths.weather, &generate_weather(seed, &calendar))?;
    Ok(paths)
}
