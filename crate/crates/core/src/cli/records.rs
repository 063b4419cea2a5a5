//! Curve records and their CSV form.
//!
//! Numbers are written in scientific notation with 17 significant digits,
//! which round-trips every `f64`; infinities are written `inf` / `-inf`.

use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CliError;

pub const CSV_HEADER: [&str; 6] = ["curve_id", "model", "rate_nats", "c_nats", "d", "branch"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Printed,
    Oracle,
    Universal,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Printed => "printed",
            Model::Oracle => "oracle",
            Model::Universal => "universal",
        }
    }
}

impl FromStr for Model {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "printed" => Ok(Model::Printed),
            "oracle" => Ok(Model::Oracle),
            "universal" => Ok(Model::Universal),
            other => Err(CliError::Parse(format!("unknown model {other:?}"))),
        }
    }
}

/// Which piece of a curve a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Printed lower boundary, below the rate threshold.
    Boundary,
    /// Distortion set by the rate alone.
    RateLimited,
    /// Rate and label budgets both tight.
    Threshold,
    /// One decoder gain of the single-encoder sweep.
    DecoderSweep,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Boundary => "boundary",
            Branch::RateLimited => "rate_limited",
            Branch::Threshold => "threshold",
            Branch::DecoderSweep => "decoder_sweep",
        }
    }
}

impl FromStr for Branch {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "boundary" => Ok(Branch::Boundary),
            "rate_limited" => Ok(Branch::RateLimited),
            "threshold" => Ok(Branch::Threshold),
            "decoder_sweep" => Ok(Branch::DecoderSweep),
            other => Err(CliError::Parse(format!("unknown branch {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub curve_id: String,
    pub model: Model,
    pub rate_nats: f64,
    pub c_nats: f64,
    pub d: f64,
    pub branch: Branch,
}

/// 17 significant digits, `inf` for infinities.
pub fn format_number(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn parse_number(field: &str) -> Result<f64, CliError> {
    let v: f64 = field.parse().map_err(|_| CliError::Parse(format!("bad number {field:?}")))?;
    if v.is_nan() {
        return Err(CliError::Parse("NaN is not a valid record value".into()));
    }
    Ok(v)
}

pub fn write_curves_csv<W: Write>(out: W, records: &[CurveRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        if r.rate_nats.is_nan() || r.c_nats.is_nan() || r.d.is_nan() {
            return Err(CliError::Parse(format!("record {} holds NaN", r.curve_id)));
        }
        w.write_record([
            r.curve_id.as_str(),
            r.model.as_str(),
            &format_number(r.rate_nats),
            &format_number(r.c_nats),
            &format_number(r.d),
            r.branch.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curves_csv<R: Read>(input: R) -> Result<Vec<CurveRecord>, CliError> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(CSV_HEADER) {
        return Err(CliError::Parse(format!("unexpected CSV header {:?}", rd.headers()?)));
    }
    rd.records()
        .map(|row| {
            let row = row?;
            Ok(CurveRecord {
                curve_id: row[0].to_string(),
                model: row[1].parse()?,
                rate_nats: parse_number(&row[2])?,
                c_nats: parse_number(&row[3])?,
                d: parse_number(&row[4])?,
                branch: row[5].parse()?,
            })
        })
        .collect()
}
