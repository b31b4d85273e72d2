//! Tick and deal readers (CSV or JSONL) and the tick CSV writer.
//!
//! CSV files carry a header naming `time`, `volume` and exactly one of `value`
//! or `price`. JSONL files carry one object per line with the same keys; every
//! line must use the key set of the first.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::aggregate::Deal;
use crate::error::{Error, Result};
use crate::trade::TradeTick;

/// Which quantity the second column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TickSchema {
    /// `time,value,volume`
    Value,
    /// `time,price,volume`; value is derived as `price * volume`.
    Price,
}

impl TickSchema {
    pub fn column(self) -> &'static str {
        match self {
            TickSchema::Value => "value",
            TickSchema::Price => "price",
        }
    }
}

impl FromStr for TickSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "value" => Ok(TickSchema::Value),
            "price" => Ok(TickSchema::Price),
            _ => Err(Error::Schema(format!("unknown schema {s:?}; expected value or price"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// JSONL for `.jsonl` / `.ndjson`, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

fn parse_field(line: u64, name: &str, raw: &str) -> Result<f64> {
    let x: f64 = raw.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("{name}: cannot parse {raw:?} as a number"),
    })?;
    if !x.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{name}: {raw} is not finite"),
        });
    }
    Ok(x)
}

fn at_line<T>(line: u64, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::Parse {
            line,
            message: other.to_string(),
        },
    })
}

fn build_tick(line: u64, schema: TickSchema, time: f64, second: f64, volume: f64) -> Result<TradeTick> {
    at_line(
        line,
        match schema {
            TickSchema::Value => TradeTick::new(time, second, volume),
            TickSchema::Price => TradeTick::from_price(time, second, volume),
        },
    )
}

/// Resolves the schema from the columns present, checking it against a
/// requested one.
fn resolve_schema(has_value: bool, has_price: bool, requested: Option<TickSchema>) -> Result<TickSchema> {
    let found = match (has_value, has_price) {
        (true, true) => {
            return Err(Error::Schema(
                "both value and price columns present; a file must use exactly one".into(),
            ))
        }
        (true, false) => TickSchema::Value,
        (false, true) => TickSchema::Price,
        (false, false) => return Err(Error::Schema("neither a value nor a price column".into())),
    };
    match requested {
        Some(r) if r != found => Err(Error::Schema(format!(
            "requested {} schema but the input has a {} column",
            r.column(),
            found.column()
        ))),
        _ => Ok(found),
    }
}

/// Streaming tick reader yielding ticks in file order.
pub struct TickReader {
    inner: Inner,
}

enum Inner {
    Csv {
        records: csv::StringRecordsIntoIter<Box<dyn Read + Send>>,
        cols: [usize; 3],
        schema: TickSchema,
    },
    Jsonl {
        lines: io::Lines<BufReader<Box<dyn Read + Send>>>,
        line: u64,
        schema: Option<TickSchema>,
        requested: Option<TickSchema>,
    },
}

impl TickReader {
    pub fn new(source: Box<dyn Read + Send>, format: Format, requested: Option<TickSchema>) -> Result<Self> {
        let inner = match format {
            Format::Csv => {
                let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
                let headers = rdr
                    .headers()
                    .map_err(|e| csv_error(e, 1))?
                    .clone();
                if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
                    return Err(Error::NoTicks);
                }
                let find = |name: &str| headers.iter().position(|h| h == name);
                for h in headers.iter() {
                    if !matches!(h, "time" | "value" | "price" | "volume") {
                        return Err(Error::Schema(format!("unexpected column {h:?}")));
                    }
                }
                let schema = resolve_schema(find("value").is_some(), find("price").is_some(), requested)?;
                let col = |name: &str| {
                    find(name).ok_or_else(|| Error::Schema(format!("missing column {name:?}")))
                };
                let cols = [col("time")?, col(schema.column())?, col("volume")?];
                Inner::Csv {
                    records: rdr.into_records(),
                    cols,
                    schema,
                }
            }
            Format::Jsonl => Inner::Jsonl {
                lines: BufReader::new(source).lines(),
                line: 0,
                schema: None,
                requested,
            },
        };
        Ok(Self { inner })
    }

    /// Opens a file, or standard input for `-`.
    pub fn open(path: &Path, requested: Option<TickSchema>) -> Result<Self> {
        let format = Format::from_path(path);
        Self::new(open_source(path)?, format, requested)
    }

    /// The schema in force; for JSONL it is known after the first record.
    pub fn schema(&self) -> Option<TickSchema> {
        match &self.inner {
            Inner::Csv { schema, .. } => Some(*schema),
            Inner::Jsonl { schema, .. } => *schema,
        }
    }
}

pub(crate) fn open_source(path: &Path) -> Result<Box<dyn Read + Send>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin()));
    }
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(Box::new(f))
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn json_number(line: u64, obj: &serde_json::Map<String, serde_json::Value>, key: &str) -> Result<f64> {
    match obj.get(key) {
        Some(serde_json::Value::Number(n)) => n.as_f64().ok_or_else(|| Error::Parse {
            line,
            message: format!("{key}: not representable as f64"),
        }),
        Some(serde_json::Value::String(s)) => parse_field(line, key, s),
        Some(other) => Err(Error::Parse {
            line,
            message: format!("{key}: expected a number, got {other}"),
        }),
        None => Err(Error::Schema(format!("line {line}: missing key {key:?}"))),
    }
}

fn json_object(line: u64, text: &str) -> Result<serde_json::Map<String, serde_json::Value>> {
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(serde_json::Value::Object(m)) => Ok(m),
        Ok(_) => Err(Error::Parse {
            line,
            message: "expected a JSON object".into(),
        }),
        Err(e) => Err(Error::Parse {
            line,
            message: e.to_string(),
        }),
    }
}

impl Iterator for TickReader {
    type Item = Result<TradeTick>;

    fn next(&mut self) -> Option<Self::Item> {
        match &mut self.inner {
            Inner::Csv {
                records,
                cols,
                schema,
            } => {
                let rec = match records.next()? {
                    Ok(r) => r,
                    Err(e) => return Some(Err(csv_error(e, 0))),
                };
                let line = rec.position().map_or(0, |p| p.line());
                let field = |i: usize, name: &str| parse_field(line, name, &rec[cols[i]]);
                Some((|| {
                    let time = field(0, "time")?;
                    let second = field(1, schema.column())?;
                    let volume = field(2, "volume")?;
                    build_tick(line, *schema, time, second, volume)
                })())
            }
            Inner::Jsonl {
                lines,
                line,
                schema,
                requested,
            } => loop {
                let text = match lines.next()? {
                    Ok(t) => t,
                    Err(e) => {
                        return Some(Err(Error::Parse {
                            line: *line + 1,
                            message: e.to_string(),
                        }))
                    }
                };
                *line += 1;
                if text.trim().is_empty() {
                    continue;
                }
                let n = *line;
                return Some((|| {
                    let obj = json_object(n, &text)?;
                    for k in obj.keys() {
                        if !matches!(k.as_str(), "time" | "value" | "price" | "volume") {
                            return Err(Error::Schema(format!("line {n}: unexpected key {k:?}")));
                        }
                    }
                    let here = resolve_schema(obj.contains_key("value"), obj.contains_key("price"), *requested)
                        .map_err(|e| Error::Schema(format!("line {n}: {e}")))?;
                    match schema {
                        Some(s) if *s != here => {
                            return Err(Error::Schema(format!(
                                "line {n}: {} key where earlier lines use {}",
                                here.column(),
                                s.column()
                            )))
                        }
                        _ => *schema = Some(here),
                    }
                    let time = json_number(n, &obj, "time")?;
                    let second = json_number(n, &obj, here.column())?;
                    let volume = json_number(n, &obj, "volume")?;
                    build_tick(n, here, time, second, volume)
                })());
            },
        }
    }
}

/// Reads all ticks of a file. An input with no tick rows is a
/// [`Error::NoTicks`] error.
pub fn read_ticks(path: &Path, requested: Option<TickSchema>) -> Result<Vec<TradeTick>> {
    let ticks = TickReader::open(path, requested)?.collect::<Result<Vec<_>>>()?;
    if ticks.is_empty() {
        return Err(Error::NoTicks);
    }
    Ok(ticks)
}

/// Parses ticks from an in-memory CSV or JSONL document.
pub fn parse_ticks(text: &str, format: Format, requested: Option<TickSchema>) -> Result<Vec<TradeTick>> {
    let source: Box<dyn Read + Send> = Box::new(io::Cursor::new(text.to_owned()));
    TickReader::new(source, format, requested)?.collect()
}

/// Writes ticks as `time,value,volume` CSV with shortest round-trip floats.
pub fn write_ticks<W: Write>(out: W, ticks: impl IntoIterator<Item = TradeTick>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "value", "volume"])?;
    for t in ticks {
        w.serialize((t.time(), t.value(), t.volume()))?;
    }
    w.flush()
}

/// Writes deals as `time,value,agent` CSV.
pub fn write_deals<'a, W: Write>(out: W, deals: impl IntoIterator<Item = &'a Deal>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "value", "agent"])?;
    for d in deals {
        w.serialize((d.time, d.value, &d.agent))?;
    }
    w.flush()
}

/// Reads deals: columns `time,value` and an optional `agent` label, in CSV or
/// JSONL. Deals without an agent are attributed to `"-"`.
pub fn read_deals(path: &Path) -> Result<Vec<Deal>> {
    let source = open_source(path)?;
    let deals = match Format::from_path(path) {
        Format::Csv => {
            let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
            let headers = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
            for h in headers.iter() {
                if !matches!(h, "time" | "value" | "agent") {
                    return Err(Error::Schema(format!("unexpected column {h:?}")));
                }
            }
            let find = |name: &str| headers.iter().position(|h| h == name);
            let (t, v) = match (find("time"), find("value")) {
                (Some(t), Some(v)) => (t, v),
                _ => return Err(Error::Schema("deal files need time and value columns".into())),
            };
            let a = find("agent");
            let mut out = Vec::new();
            for rec in rdr.into_records() {
                let rec = rec.map_err(|e| csv_error(e, 0))?;
                let line = rec.position().map_or(0, |p| p.line());
                let agent = a.map_or("-", |i| &rec[i]);
                let time = parse_field(line, "time", &rec[t])?;
                let value = parse_field(line, "value", &rec[v])?;
                out.push(at_line(line, Deal::new(agent, time, value))?);
            }
            out
        }
        Format::Jsonl => {
            let mut out = Vec::new();
            for (i, text) in BufReader::new(source).lines().enumerate() {
                let line = i as u64 + 1;
                let text = text.map_err(|e| Error::io(path, e))?;
                if text.trim().is_empty() {
                    continue;
                }
                let obj = json_object(line, &text)?;
                let agent = match obj.get("agent") {
                    None => "-".to_owned(),
                    Some(serde_json::Value::String(s)) => s.clone(),
                    Some(other) => other.to_string(),
                };
                let time = json_number(line, &obj, "time")?;
                let value = json_number(line, &obj, "value")?;
                out.push(at_line(line, Deal::new(agent, time, value))?);
            }
            out
        }
    };
    if deals.is_empty() {
        return Err(Error::NoTicks);
    }
    Ok(deals)
}
