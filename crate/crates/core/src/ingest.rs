//! Reading close series and writing indicator reports.
//!
//! CSV input has a mandatory header whose first two columns are
//! `date,close`; further columns are ignored. Decimals use a dot, with no
//! exponent and no thousands separators. JSON input is either an array of
//! `{"date": .., "close": ..}` objects or a report object with a `rows`
//! array (so reports can be fed back in).
//!
//! Reports list rows oldest first regardless of input orientation, and
//! format every indicator value with six fractional digits.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::indicators::{
    classify_days, crossover_events, ema_series, macd, signal_line, CloseSeries, DayState, IndicatorConfig,
    SignalKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Row order of an input or output file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    OldestFirst,
    YoungestFirst,
}

/// One day of input. `close_text` is the close exactly as it appeared.
#[derive(Debug, Clone, PartialEq)]
pub struct CloseRecord {
    pub label: String,
    pub close: f64,
    pub close_text: String,
}

impl CloseRecord {
    pub fn new(label: impl Into<String>, close_text: impl Into<String>) -> Result<Self> {
        let close_text = close_text.into();
        let close = parse_close(&close_text).map_err(invalid)?;
        Ok(Self { label: label.into(), close, close_text })
    }
}

fn is_plain_decimal(text: &str) -> bool {
    let unsigned = text.strip_prefix(['+', '-']).unwrap_or(text);
    let (int, frac) = match unsigned.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (unsigned, None),
    };
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    match frac {
        None => !int.is_empty() && digits(int),
        Some(f) => digits(int) && digits(f) && !(int.is_empty() && f.is_empty()),
    }
}

/// Parses a finite decimal close, rejecting negatives.
pub fn parse_close(text: &str) -> std::result::Result<f64, String> {
    let text = text.trim();
    if !is_plain_decimal(text) {
        return Err(format!("close {text:?} is not a plain decimal number"));
    }
    let value: f64 = text
        .parse()
        .map_err(|e| format!("close {text:?}: {e}"))?;
    if !value.is_finite() {
        return Err(format!("close {text:?} is not finite"));
    }
    if value < 0.0 {
        return Err(format!("close {text:?} is negative"));
    }
    Ok(value)
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    Error::Parse { line, message: err.to_string() }
}

fn read_csv_records(source: impl Read) -> Result<Vec<CloseRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.len() < 2 || &headers[0] != "date" || &headers[1] != "close" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header starting with `date,close`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let close_text = row[1].to_string();
        let close = parse_close(&close_text).map_err(|message| Error::Parse { line, message })?;
        records.push(CloseRecord { label: row[0].to_string(), close, close_text });
    }
    Ok(records)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonClose {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
struct JsonCloseRow {
    #[serde(alias = "label")]
    date: String,
    close: JsonClose,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonCloses {
    Rows(Vec<JsonCloseRow>),
    Report { rows: Vec<JsonCloseRow> },
}

fn read_json_records(source: impl Read) -> Result<Vec<CloseRecord>> {
    let parsed: JsonCloses = serde_json::from_reader(source).map_err(|e| Error::Parse {
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    let rows = match parsed {
        JsonCloses::Rows(rows) | JsonCloses::Report { rows } => rows,
    };
    rows.into_iter()
        .enumerate()
        .map(|(index, row)| {
            let (close, close_text) = match row.close {
                JsonClose::Number(v) => (v, v.to_string()),
                JsonClose::Text(t) => {
                    let v = parse_close(&t).map_err(|message| Error::Parse {
                        line: 0,
                        message: format!("row {index}: {message}"),
                    })?;
                    (v, t)
                }
            };
            if !close.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if close < 0.0 {
                return Err(Error::NegativeClose { index, value: close });
            }
            Ok(CloseRecord { label: row.date, close, close_text })
        })
        .collect()
}

/// Reads records and returns them oldest first.
pub fn read_records(source: impl Read, format: Format, orientation: Orientation) -> Result<Vec<CloseRecord>> {
    let mut records = match format {
        Format::Csv => read_csv_records(source)?,
        Format::Json => read_json_records(source)?,
    };
    if records.is_empty() {
        return Err(Error::EmptySeries);
    }
    if orientation == Orientation::YoungestFirst {
        records.reverse();
    }
    Ok(records)
}

pub fn records_to_closes(records: &[CloseRecord]) -> Result<CloseSeries> {
    CloseSeries::from_chronological(records.iter().map(|r| r.close).collect())?
        .with_labels(records.iter().map(|r| r.label.clone()).collect())
}

pub fn read_closes(source: impl Read, format: Format, orientation: Orientation) -> Result<CloseSeries> {
    records_to_closes(&read_records(source, format, orientation)?)
}

/// One number per line; blank lines and `#` comments are skipped.
/// Returns values oldest first.
pub fn read_plain_values(source: impl Read, orientation: Orientation) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("{text:?} is not a number"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse { line: line_no, message: format!("{text:?} is not finite") });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if orientation == Orientation::YoungestFirst {
        values.reverse();
    }
    Ok(values)
}

/// Writes oldest-first records back out in the requested orientation.
pub fn write_records(
    records: &[CloseRecord],
    format: Format,
    orientation: Orientation,
    sink: impl Write,
) -> Result<()> {
    let ordered: Vec<&CloseRecord> = match orientation {
        Orientation::OldestFirst => records.iter().collect(),
        Orientation::YoungestFirst => records.iter().rev().collect(),
    };
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(["date", "close"]).map_err(csv_error)?;
            for r in ordered {
                w.write_record([r.label.as_str(), r.close_text.as_str()]).map_err(csv_error)?;
            }
            w.flush().map_err(io_error)
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                date: &'a str,
                close: &'a str,
            }
            let rows: Vec<Row> = ordered
                .iter()
                .map(|r| Row { date: &r.label, close: &r.close_text })
                .collect();
            serde_json::to_writer_pretty(sink, &rows).map_err(|e| invalid(e.to_string()))
        }
    }
}

fn io_error(err: std::io::Error) -> Error {
    invalid(format!("write failed: {err}"))
}

/// Fixed six-digit rendering; negative zero prints as zero.
pub fn format_fixed(value: f64) -> String {
    let s = format!("{value:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn serialize_fixed<S: Serializer>(value: &f64, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    let raw = serde_json::value::RawValue::from_string(format_fixed(*value))
        .map_err(serde::ser::Error::custom)?;
    raw.serialize(serializer)
}

/// One day of the MACD pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub close: f64,
    #[serde(serialize_with = "serialize_fixed")]
    pub ema_short: f64,
    #[serde(serialize_with = "serialize_fixed")]
    pub ema_long: f64,
    #[serde(serialize_with = "serialize_fixed")]
    pub macd: f64,
    #[serde(serialize_with = "serialize_fixed")]
    pub signal_ema: f64,
    pub state: DayState,
    pub event: Option<SignalKind>,
    /// Close as read from the input; echoed by the CSV writer.
    #[serde(skip)]
    pub close_text: Option<String>,
}

/// Per-day MACD pipeline output, rows oldest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub meta: IndicatorConfig,
    pub rows: Vec<ReportRow>,
}

/// Runs EMA, MACD, signal line, classification and crossover detection.
pub fn build_report(records: &[CloseRecord], config: &IndicatorConfig) -> Result<IndicatorReport> {
    config.validate()?;
    let closes = records_to_closes(records)?;
    let short = ema_series(&closes, config.n1, config.rho)?;
    let long = ema_series(&closes, config.n2, config.rho)?;
    let m = macd(&closes, config)?;
    let signal = signal_line(&m, config.n0, config.rho)?;
    let states = classify_days(&m, config.n0, config.rho)?;
    let mut events = vec![None; records.len()];
    for e in crossover_events(&states) {
        events[e.day_index - 1] = Some(e.kind);
    }
    let rows = records
        .iter()
        .enumerate()
        .map(|(i, r)| ReportRow {
            label: r.label.clone(),
            close: r.close,
            ema_short: short.as_chronological()[i],
            ema_long: long.as_chronological()[i],
            macd: m.values().as_chronological()[i],
            signal_ema: signal.as_chronological()[i],
            state: states[i],
            event: events[i],
            close_text: Some(r.close_text.clone()),
        })
        .collect();
    Ok(IndicatorReport { meta: *config, rows })
}

pub fn write_report(report: &IndicatorReport, format: Format, sink: impl Write) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record([
                "date", "close", "ema_short", "ema_long", "macd", "signal_ema", "state", "event",
            ])
            .map_err(csv_error)?;
            for row in &report.rows {
                let close = row.close_text.clone().unwrap_or_else(|| row.close.to_string());
                w.write_record([
                    row.label.as_str(),
                    close.as_str(),
                    &format_fixed(row.ema_short),
                    &format_fixed(row.ema_long),
                    &format_fixed(row.macd),
                    &format_fixed(row.signal_ema),
                    row.state.as_str(),
                    row.event.map_or("", SignalKind::as_str),
                ])
                .map_err(csv_error)?;
            }
            w.flush().map_err(io_error)
        }
        Format::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, report).map_err(|e| invalid(e.to_string()))?;
            sink.write_all(b"\n").map_err(io_error)
        }
    }
}

pub fn report_to_bytes(report: &IndicatorReport, format: Format) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_report(report, format, &mut out)?;
    Ok(out)
}

/// Parses a report previously written as JSON.
pub fn read_report_json(source: impl Read) -> Result<IndicatorReport> {
    serde_json::from_reader(source).map_err(|e| Error::Parse {
        line: e.line() as u64,
        message: e.to_string(),
    })
}
