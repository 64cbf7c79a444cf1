//! Calendar-aligned fusion of the four feeds for one region.

use std::collections::BTreeMap;

use chrono::{NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::calendar::Calendar;
use crate::features;
use crate::ingest::records::{FluxRecord, RawCaseRecord, WeatherRecord, WeeklyDoseRecord};
use crate::ingest::IngestError;
use crate::regions::{RegionCode, RegionKind, RegionRegistry};

/// Which block of the calendar a day belongs to. The three blocks are
/// contiguous and ordered train < val < test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        })
    }
}

/// First day of the validation block and first day of the test block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitBoundaries {
    pub val_start: NaiveDate,
    pub test_start: NaiveDate,
}

impl SplitBoundaries {
    /// The default experiment layout: validation covers the 30 days before
    /// the first forecasted test day, 2021-10-02.
    pub fn default_2021() -> Self {
        Self {
            val_start: NaiveDate::from_ymd_opt(2021, 9, 2).unwrap(),
            test_start: NaiveDate::from_ymd_opt(2021, 10, 2).unwrap(),
        }
    }

    fn validate(&self, calendar: &Calendar) -> Result<(), IngestError> {
        let ok = calendar.start() < self.val_start
            && self.val_start < self.test_start
            && self.test_start <= calendar.end();
        if ok {
            Ok(())
        } else {
            Err(IngestError::BadSplitBoundaries {
                val_start: self.val_start,
                test_start: self.test_start,
                cal_start: calendar.start(),
                cal_end: calendar.end(),
            })
        }
    }

    pub fn split_of(&self, day: NaiveDate) -> Split {
        if day < self.val_start {
            Split::Train
        } else if day < self.test_start {
            Split::Val
        } else {
            Split::Test
        }
    }
}

/// Daily-aligned series for one region (or the national aggregate), with
/// per-day split labels. All series share the calendar length and carry no
/// gaps.
#[derive(Debug, Clone)]
pub struct RegionPanel {
    pub region: RegionCode,
    pub calendar: Calendar,
    pub cases: Vec<f64>,
    pub vax_dose1: Vec<f64>,
    pub vax_dose2: Vec<f64>,
    pub mobility: Vec<f64>,
    pub temperature: Vec<f64>,
    pub precipitation: Vec<f64>,
    pub splits: Vec<Split>,
}

impl RegionPanel {
    pub fn len(&self) -> usize {
        self.calendar.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn split_of(&self, day: NaiveDate) -> Option<Split> {
        self.calendar.index_of(day).map(|i| self.splits[i])
    }

    /// Inclusive index range of a split block, if non-empty.
    pub fn split_range(&self, split: Split) -> Option<(usize, usize)> {
        let first = self.splits.iter().position(|s| *s == split)?;
        let last = self.splits.iter().rposition(|s| *s == split)?;
        Some((first, last))
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        match name {
            "cases" => Some(&self.cases),
            "vax1" => Some(&self.vax_dose1),
            "vax2" => Some(&self.vax_dose2),
            "mob" => Some(&self.mobility),
            "temp" => Some(&self.temperature),
            "precip" => Some(&self.precipitation),
            _ => None,
        }
    }
}

/// Record slices for all four feeds.
#[derive(Debug, Clone, Copy)]
pub struct PanelInputs<'a> {
    pub cases: &'a [RawCaseRecord],
    pub vaccination: &'a [WeeklyDoseRecord],
    pub mobility: &'a [FluxRecord],
    pub weather: &'a [WeatherRecord],
}

/// Assemble the daily panel for `region` over `calendar`.
///
/// The national aggregate sums cases over every reporting region (the
/// autonomous cities included) and mobility over the communities, and
/// averages weather over all community stations. Vaccination data is
/// national by nature and shared across regions.
pub fn build_panel(
    inputs: &PanelInputs<'_>,
    region: &RegionCode,
    calendar: &Calendar,
    boundaries: &SplitBoundaries,
) -> Result<RegionPanel, IngestError> {
    let registry = RegionRegistry::bundled();
    if !registry.is_known(region) {
        return Err(IngestError::UnknownRegion(region.clone()));
    }
    boundaries.validate(calendar)?;

    let cases = assemble_cases(inputs.cases, region, calendar)?;

    // Interpolation may only use weekly totals already known when the
    // training block closes: the last Sunday on or before the final
    // training day.
    let interp_cutoff = Calendar::previous_weekday(
        boundaries.val_start - chrono::Duration::days(1),
        Weekday::Sun,
    );
    let vax = features::daily_vaccination(inputs.vaccination, calendar, interp_cutoff)?;

    let observed_flux = features::regional_flux_by_day(inputs.mobility, region);
    let mobility = features::assign_mobility_days(&observed_flux, calendar)?;

    let (temperature, precipitation) = assemble_weather(inputs.weather, region, calendar)?;

    let splits = calendar.iter().map(|d| boundaries.split_of(d)).collect();

    Ok(RegionPanel {
        region: region.clone(),
        calendar: calendar.clone(),
        cases,
        vax_dose1: vax.dose1_rate,
        vax_dose2: vax.dose2_rate,
        mobility: mobility.flux,
        temperature,
        precipitation,
        splits,
    })
}

fn assemble_cases(
    records: &[RawCaseRecord],
    region: &RegionCode,
    calendar: &Calendar,
) -> Result<Vec<f64>, IngestError> {
    let mut by_day: BTreeMap<NaiveDate, u64> = BTreeMap::new();
    for r in records {
        if region.is_national() || r.region == *region {
            *by_day.entry(r.date).or_insert(0) += r.new_cases;
        }
    }
    calendar
        .iter()
        .map(|day| {
            by_day
                .get(&day)
                .map(|v| *v as f64)
                .ok_or_else(|| IngestError::MissingCoverage {
                    region: region.clone(),
                    day,
                })
        })
        .collect()
}

fn assemble_weather(
    records: &[WeatherRecord],
    region: &RegionCode,
    calendar: &Calendar,
) -> Result<(Vec<f64>, Vec<f64>), IngestError> {
    let registry = RegionRegistry::bundled();
    let mut by_day: BTreeMap<NaiveDate, (f64, f64, usize)> = BTreeMap::new();
    for r in records {
        let matches = if region.is_national() {
            registry
                .get(&r.region)
                .is_some_and(|info| matches!(info.kind, RegionKind::Community))
        } else {
            r.region == *region
        };
        if matches {
            let slot = by_day.entry(r.date).or_insert((0.0, 0.0, 0));
            slot.0 += r.mean_temp;
            slot.1 += r.precipitation;
            slot.2 += 1;
        }
    }
    let mut temp = Vec::with_capacity(calendar.len());
    let mut precip = Vec::with_capacity(calendar.len());
    for day in calendar.iter() {
        let (t, p, n) = by_day
            .get(&day)
            .copied()
            .ok_or_else(|| IngestError::MissingWeather {
                region: region.clone(),
                day,
            })?;
        temp.push(t / n as f64);
        precip.push(p / n as f64);
    }
    let temp = features::rolling_average(&temp, 7)?;
    let precip = features::rolling_average(&precip, 7)?;
    Ok((temp, precip))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::IsoWeek;
    use crate::ingest::DoseNumber;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn toy_inputs(calendar: &Calendar) -> (
        Vec<RawCaseRecord>,
        Vec<WeeklyDoseRecord>,
        Vec<FluxRecord>,
        Vec<WeatherRecord>,
    ) {
        let regions = ["CB", "MD"];
        let mut cases = Vec::new();
        let mut weather = Vec::new();
        for (ri, region) in regions.iter().enumerate() {
            for (i, day) in calendar.iter().enumerate() {
                cases.push(RawCaseRecord {
                    date: day,
                    region: (*region).into(),
                    new_cases: (10 * (ri + 1) + i) as u64,
                });
                weather.push(WeatherRecord {
                    date: day,
                    region: (*region).into(),
                    station_id: format!("{region}-1"),
                    mean_temp: 8.0 + ri as f64,
                    precipitation: 1.0,
                });
            }
        }
        // Weekly doses for every ISO week touching the calendar plus the
        // week before it.
        let mut vaccination = Vec::new();
        for (w, year) in [(52, 2020), (53, 2020)] {
            vaccination.extend(week(year, w, 70));
        }
        for w in 1..=26 {
            vaccination.extend(week(2021, w, 70 * (w as u64 + 1)));
        }
        // Mobility on every Wed/Sun from the week before the calendar.
        let mut mobility = Vec::new();
        let mut day = calendar.start() - chrono::Duration::days(7);
        while day <= calendar.end() {
            if matches!(day.weekday(), Weekday::Wed | Weekday::Sun) {
                for origin in regions {
                    for dest in regions {
                        mobility.push(FluxRecord {
                            date: day,
                            origin: origin.into(),
                            destination: dest.into(),
                            flux: if origin == dest { 1000 } else { 100 },
                        });
                    }
                }
            }
            day += chrono::Duration::days(1);
        }
        (cases, vaccination, mobility, weather)
    }

    fn week(year: i32, w: u32, doses: u64) -> Vec<WeeklyDoseRecord> {
        let iso_week = IsoWeek::parse(&format!("{year}-W{w:02}")).unwrap();
        vec![
            WeeklyDoseRecord {
                iso_week,
                dose_number: DoseNumber::First,
                doses,
            },
            WeeklyDoseRecord {
                iso_week,
                dose_number: DoseNumber::Second,
                doses: doses / 2,
            },
        ]
    }

    use chrono::Datelike;

    #[test]
    fn national_cases_sum_the_regions() {
        let calendar = Calendar::new(d("2021-01-01"), d("2021-03-31")).unwrap();
        let (cases, vaccination, mobility, weather) = toy_inputs(&calendar);
        let inputs = PanelInputs {
            cases: &cases,
            vaccination: &vaccination,
            mobility: &mobility,
            weather: &weather,
        };
        let boundaries = SplitBoundaries {
            val_start: d("2021-02-15"),
            test_start: d("2021-03-01"),
        };
        let cb = build_panel(&inputs, &"CB".into(), &calendar, &boundaries).unwrap();
        let md = build_panel(&inputs, &"MD".into(), &calendar, &boundaries).unwrap();
        let es = build_panel(&inputs, &"ES".into(), &calendar, &boundaries).unwrap();
        for i in 0..calendar.len() {
            assert_eq!(es.cases[i], cb.cases[i] + md.cases[i]);
            assert_eq!(es.mobility[i], cb.mobility[i] + md.mobility[i]);
        }
        // Day 0 cases: CB 10, MD 20.
        assert_eq!(es.cases[0], 30.0);
    }

    #[test]
    fn splits_are_three_contiguous_blocks() {
        let calendar = Calendar::new(d("2021-01-01"), d("2021-03-31")).unwrap();
        let (cases, vaccination, mobility, weather) = toy_inputs(&calendar);
        let inputs = PanelInputs {
            cases: &cases,
            vaccination: &vaccination,
            mobility: &mobility,
            weather: &weather,
        };
        let boundaries = SplitBoundaries {
            val_start: d("2021-02-15"),
            test_start: d("2021-03-01"),
        };
        let panel = build_panel(&inputs, &"CB".into(), &calendar, &boundaries).unwrap();
        assert_eq!(panel.split_of(d("2021-02-14")), Some(Split::Train));
        assert_eq!(panel.split_of(d("2021-02-15")), Some(Split::Val));
        assert_eq!(panel.split_of(d("2021-02-28")), Some(Split::Val));
        assert_eq!(panel.split_of(d("2021-03-01")), Some(Split::Test));
        let (first, last) = panel.split_range(Split::Val).unwrap();
        assert_eq!(last - first + 1, 14);
        // Blocks in order, no interleaving.
        let mut seen = Vec::new();
        for s in &panel.splits {
            if seen.last() != Some(s) {
                seen.push(*s);
            }
        }
        assert_eq!(seen, vec![Split::Train, Split::Val, Split::Test]);
    }

    #[test]
    fn case_gap_is_missing_coverage() {
        let calendar = Calendar::new(d("2021-01-01"), d("2021-03-31")).unwrap();
        let (mut cases, vaccination, mobility, weather) = toy_inputs(&calendar);
        let gap = d("2021-02-03");
        cases.retain(|r| !(r.date == gap && r.region.as_str() == "CB"));
        let inputs = PanelInputs {
            cases: &cases,
            vaccination: &vaccination,
            mobility: &mobility,
            weather: &weather,
        };
        let boundaries = SplitBoundaries {
            val_start: d("2021-02-15"),
            test_start: d("2021-03-01"),
        };
        match build_panel(&inputs, &"CB".into(), &calendar, &boundaries) {
            Err(IngestError::MissingCoverage { day, .. }) => assert_eq!(day, gap),
            other => panic!("unexpected {other:?}"),
        }
        // The national panel still has MD rows covering that day.
        assert!(build_panel(&inputs, &"ES".into(), &calendar, &boundaries).is_ok());
    }

    #[test]
    fn unknown_region_rejected() {
        let calendar = Calendar::new(d("2021-01-01"), d("2021-01-31")).unwrap();
        let (cases, vaccination, mobility, weather) = toy_inputs(&calendar);
        let inputs = PanelInputs {
            cases: &cases,
            vaccination: &vaccination,
            mobility: &mobility,
            weather: &weather,
        };
        let boundaries = SplitBoundaries {
            val_start: d("2021-01-10"),
            test_start: d("2021-01-20"),
        };
        assert!(matches!(
            build_panel(&inputs, &"XX".into(), &calendar, &boundaries),
            Err(IngestError::UnknownRegion(_))
        ));
    }

    #[test]
    fn bad_boundaries_rejected() {
        let calendar = Calendar::new(d("2021-01-01"), d("2021-03-31")).unwrap();
        let (cases, vaccination, mobility, weather) = toy_inputs(&calendar);
        let inputs = PanelInputs {
            cases: &cases,
            vaccination: &vaccination,
            mobility: &mobility,
            weather: &weather,
        };
        for (val, test) in [
            ("2021-01-01", "2021-02-01"), // val2 == calendar start
            ("2021-02-01", "2021-02-01"), // empty val
            ("2021-02-01", "2021-04-05"), // test beyond calendar
        ] {
            let boundaries = SplitBoundaries {
                val_start: d(val),
                test_start: d(test),
            };
            assert!(
                matches!(
                    build_panel(&inputs, &"CB".into(), &calendar, &boundaries),
                    Err(IngestError::BadSplitBoundaries { .. })
                ),
                "{val}/{test}"
            );
        }
    }

    #[test]
    fn deterministic_assembly() {
        let calendar = Calendar::new(d("2021-01-01"), d("2021-02-28")).unwrap();
        let (cases, vaccination, mobility, weather) = toy_inputs(&calendar);
        let inputs = PanelInputs {
            cases: &cases,
            vaccination: &vaccination,
            mobility: &mobility,
            weather: &weather,
        };
        let boundaries = SplitBoundaries {
            val_start: d("2021-02-01"),
            test_start: d("2021-02-15"),
        };
        let a = build_panel(&inputs, &"ES".into(), &calendar, &boundaries).unwrap();
        let b = build_panel(&inputs, &"ES".into(), &calendar, &boundaries).unwrap();
        assert_eq!(a.cases, b.cases);
        assert_eq!(a.vax_dose1, b.vax_dose1);
        assert_eq!(a.mobility, b.mobility);
        assert_eq!(a.temperature, b.temperature);
    }
}
