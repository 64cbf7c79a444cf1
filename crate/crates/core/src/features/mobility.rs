//! Daily mobility from Wednesday/Sunday origin-destination observations.
//!
//! The daily flux assigned to a region is the sum of all incoming fluxes,
//! internal movement included. Observations exist only for Wednesdays and
//! Sundays, so the remaining weekdays borrow the most recent value that
//! was already published on that day: Monday/Tuesday take the previous
//! Wednesday, Thursday/Friday the current Wednesday, Saturday the previous
//! Sunday. This never reads a value that lies in the future of the day
//! being filled.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::Serialize;

use crate::calendar::Calendar;
use crate::features::FeatureError;
use crate::ingest::FluxRecord;
use crate::regions::{RegionCode, RegionKind, RegionRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MobilitySource {
    ObservedWed,
    ObservedSun,
    Assigned,
}

#[derive(Debug, Clone)]
pub struct MobilityDailySeries {
    pub calendar: Calendar,
    pub flux: Vec<f64>,
    pub source: Vec<MobilitySource>,
}

/// Total incoming flux for `region` on `day`: every origin, internal
/// movement included. The national aggregate sums the fluxes of all
/// autonomous communities.
pub fn mobility_flux(
    fluxes: &[FluxRecord],
    region: &RegionCode,
    day: NaiveDate,
) -> Result<f64, FeatureError> {
    let registry = RegionRegistry::bundled();
    let mut total = 0u64;
    let mut seen = false;
    for record in fluxes.iter().filter(|r| r.date == day) {
        let matches = if region.is_national() {
            registry
                .get(&record.destination)
                .is_some_and(|info| matches!(info.kind, RegionKind::Community))
        } else {
            record.destination == *region
        };
        if matches {
            total += record.flux;
            seen = true;
        }
    }
    if !seen {
        return Err(FeatureError::NoFluxData {
            region: region.clone(),
            day,
        });
    }
    Ok(total as f64)
}

/// All observed daily flux totals for `region`, keyed by date. Used to
/// seed the day-assignment rule; dates outside the modeling calendar are
/// kept since leading days borrow from the week before the calendar opens.
pub fn regional_flux_by_day(fluxes: &[FluxRecord], region: &RegionCode) -> BTreeMap<NaiveDate, f64> {
    let registry = RegionRegistry::bundled();
    let mut by_day: BTreeMap<NaiveDate, u64> = BTreeMap::new();
    for record in fluxes {
        let matches = if region.is_national() {
            registry
                .get(&record.destination)
                .is_some_and(|info| matches!(info.kind, RegionKind::Community))
        } else {
            record.destination == *region
        };
        if matches {
            *by_day.entry(record.date).or_insert(0) += record.flux;
        }
    }
    by_day.into_iter().map(|(d, v)| (d, v as f64)).collect()
}

pub fn assign_mobility_days(
    observed: &BTreeMap<NaiveDate, f64>,
    calendar: &Calendar,
) -> Result<MobilityDailySeries, FeatureError> {
    let lookup = |day: NaiveDate| {
        observed
            .get(&day)
            .copied()
            .ok_or(FeatureError::MissingObservation(day))
    };
    let mut flux = Vec::with_capacity(calendar.len());
    let mut source = Vec::with_capacity(calendar.len());
    for day in calendar.iter() {
        let (value, src) = match day.weekday() {
            Weekday::Wed => (lookup(day)?, MobilitySource::ObservedWed),
            Weekday::Sun => (lookup(day)?, MobilitySource::ObservedSun),
            // Previous Wednesday.
            Weekday::Mon => (lookup(day - chrono::Duration::days(5))?, MobilitySource::Assigned),
            Weekday::Tue => (lookup(day - chrono::Duration::days(6))?, MobilitySource::Assigned),
            // Current week's Wednesday, already published by now.
            Weekday::Thu => (lookup(day - chrono::Duration::days(1))?, MobilitySource::Assigned),
            Weekday::Fri => (lookup(day - chrono::Duration::days(2))?, MobilitySource::Assigned),
            // Previous Sunday.
            Weekday::Sat => (lookup(day - chrono::Duration::days(6))?, MobilitySource::Assigned),
        };
        flux.push(value);
        source.push(src);
    }
    Ok(MobilityDailySeries {
        calendar: calendar.clone(),
        flux,
        source,
    })
}
