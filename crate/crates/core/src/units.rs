//! Unit conversions used at the CLI and reporting boundary.

pub const METERS_PER_MILE: f64 = 1609.344;
pub const JOULES_PER_KWH: f64 = 3.6e6;
pub const KG_PER_LB: f64 = 0.453_592_37;
pub const LBS_PER_US_TON: f64 = 2000.0;

pub fn mph_to_mps(mph: f64) -> f64 {
    mph * METERS_PER_MILE / 3600.0
}

pub fn mps_to_mph(mps: f64) -> f64 {
    mps * 3600.0 / METERS_PER_MILE
}

pub fn meters_to_miles(m: f64) -> f64 {
    m / METERS_PER_MILE
}

pub fn miles_to_meters(mi: f64) -> f64 {
    mi * METERS_PER_MILE
}

pub fn joules_to_kwh(j: f64) -> f64 {
    j / JOULES_PER_KWH
}

pub fn kg_to_us_tons(kg: f64) -> f64 {
    kg / KG_PER_LB / LBS_PER_US_TON
}
