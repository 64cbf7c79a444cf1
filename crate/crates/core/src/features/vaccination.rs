//! Weekly dose totals to daily dose rates.
//!
//! The weekly total becomes known on the closing Sunday of its week, so
//! each Sunday anchors total/7 doses per day. Days up to the interpolation
//! cutoff (the last training Sunday) are filled with a natural cubic
//! spline through the anchors; later days are filled by forward linear
//! extrapolation that restarts at each newly available anchor, using the
//! last inter-anchor slope. Rates are clamped at zero since a spline can
//! undershoot between sparse anchors.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::calendar::Calendar;
use crate::features::spline::NaturalCubicSpline;
use crate::features::FeatureError;
use crate::ingest::{DoseNumber, WeeklyDoseRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VaxProvenance {
    Anchor,
    Interpolated,
    Extrapolated,
}

/// Daily first- and second-dose rates with per-day provenance.
#[derive(Debug, Clone)]
pub struct DailyVaxSeries {
    pub calendar: Calendar,
    pub dose1_rate: Vec<f64>,
    pub dose2_rate: Vec<f64>,
    pub provenance: Vec<VaxProvenance>,
}

pub fn daily_vaccination(
    weekly: &[WeeklyDoseRecord],
    calendar: &Calendar,
    interp_cutoff: NaiveDate,
) -> Result<DailyVaxSeries, FeatureError> {
    // Union of reported weeks; a week reporting only one of the two doses
    // counts the other as zero administered doses.
    let mut anchors: BTreeMap<NaiveDate, [f64; 2]> = BTreeMap::new();
    for record in weekly {
        let entry = anchors.entry(record.iso_week.sunday()).or_insert([0.0; 2]);
        let slot = match record.dose_number {
            DoseNumber::First => 0,
            DoseNumber::Second => 1,
        };
        entry[slot] = record.doses as f64 / 7.0;
    }

    let dose1 = fill_dose(&anchors, calendar, interp_cutoff, 0)?;
    let dose2 = fill_dose(&anchors, calendar, interp_cutoff, 1)?;

    let provenance = calendar
        .iter()
        .map(|day| {
            if anchors.contains_key(&day) {
                VaxProvenance::Anchor
            } else if day <= interp_cutoff {
                VaxProvenance::Interpolated
            } else {
                VaxProvenance::Extrapolated
            }
        })
        .collect();

    Ok(DailyVaxSeries {
        calendar: calendar.clone(),
        dose1_rate: dose1,
        dose2_rate: dose2,
        provenance,
    })
}

fn fill_dose(
    anchors: &BTreeMap<NaiveDate, [f64; 2]>,
    calendar: &Calendar,
    interp_cutoff: NaiveDate,
    slot: usize,
) -> Result<Vec<f64>, FeatureError> {
    let origin = calendar.start();
    let offset = |day: NaiveDate| (day - origin).num_days() as f64;

    let spline_knots: Vec<(NaiveDate, f64)> = anchors
        .range(..=interp_cutoff)
        .map(|(d, v)| (*d, v[slot]))
        .collect();
    if spline_knots.len() < 3 {
        return Err(FeatureError::InsufficientAnchors(spline_knots.len()));
    }
    let xs: Vec<f64> = spline_knots.iter().map(|(d, _)| offset(*d)).collect();
    let ys: Vec<f64> = spline_knots.iter().map(|(_, v)| *v).collect();
    let spline = NaturalCubicSpline::fit(&xs, &ys)?;

    let mut out = Vec::with_capacity(calendar.len());
    for day in calendar.iter() {
        let value = if let Some(v) = anchors.get(&day) {
            v[slot]
        } else if day <= interp_cutoff {
            spline.eval(offset(day))
        } else {
            // Latest anchor at or before this day; restart the linear
            // extension there with the last inter-anchor slope.
            let (latest_day, latest) = anchors
                .range(..=day)
                .next_back()
                .map(|(d, v)| (*d, v[slot]))
                .expect("spline required three anchors, so one precedes any later day");
            let previous = anchors
                .range(..latest_day)
                .next_back()
                .map(|(_, v)| v[slot])
                .expect("at least two anchors precede the extrapolation region");
            let slope = (latest - previous) / 7.0;
            latest + slope * (day - latest_day).num_days() as f64
        };
        out.push(value.max(0.0));
    }
    Ok(out)
}
