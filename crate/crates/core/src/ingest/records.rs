//! Validated row types for the four raw feeds.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::calendar::IsoWeek;
use crate::regions::RegionCode;

/// One day of confirmed cases for one region, totalled across test
/// techniques.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCaseRecord {
    pub date: NaiveDate,
    pub region: RegionCode,
    pub new_cases: u64,
}

/// First or second dose of the two-shot schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DoseNumber {
    First,
    Second,
}

impl DoseNumber {
    pub fn from_u8(n: u8) -> Option<Self> {
        match n {
            1 => Some(Self::First),
            2 => Some(Self::Second),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Self::First => 1,
            Self::Second => 2,
        }
    }
}

/// Doses administered nationwide during one ISO week.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeeklyDoseRecord {
    pub iso_week: IsoWeek,
    pub dose_number: DoseNumber,
    pub doses: u64,
}

/// Persons moving from `origin` to `destination` on one day. Origin may
/// equal destination: that row carries the intra-region mobility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluxRecord {
    pub date: NaiveDate,
    pub origin: RegionCode,
    pub destination: RegionCode,
    pub flux: u64,
}

/// One station's daily mean temperature and accumulated precipitation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherRecord {
    pub date: NaiveDate,
    pub region: RegionCode,
    pub station_id: String,
    pub mean_temp: f64,
    pub precipitation: f64,
}
