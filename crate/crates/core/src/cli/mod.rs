//! Command-line frontend. The binary only forwards its arguments to [`main_with_args`].
//!
//! Exit codes: 0 success, 2 usage, 3 data error, 4 numeric degeneracy under
//! `--strict`.

mod args;
pub mod duration;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;

pub use args::{
    AggregateArgs, AnalyzeArgs, CheckArgs, CheckKind, Cli, Command, CompositeArgs, OutputArgs,
    SchemaArg, SimulateArgs,
};

use crate::aggregate::{Deal, DealPool};
use crate::analysis::{analyze_pool, analyze_window, composite_report, AnalysisReport, AnalyzeOptions, Provenance};
use crate::composite::monte_carlo_composite_oracle;
use crate::error::{Error, Result};
use crate::io::{load_genspec, read_deals, to_canonical_string, write_deals, write_ticks, CompositeSpec, TickReader};
use crate::rng::GENERATOR_ID;
use crate::stream::WindowStream;
use crate::synth::{agent_pool, Generator};
use crate::trade::{window_index, WindowSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

/// Windows analyzed per parallel batch.
const BATCH: usize = 1024;

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    Data(Error),
    /// Strict mode met a degeneracy.
    Degenerate(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Data(_) => EXIT_DATA,
            Failure::Degenerate(_) => EXIT_DEGENERATE,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Data(e) => write!(f, "{e}"),
            Failure::Degenerate(m) => write!(f, "degenerate (strict mode): {m}"),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let pool = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| run(&cli.command)) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

pub fn run(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Analyze(a) => analyze(a, false),
        Command::Returns(a) => analyze(a, true),
        Command::Aggregate(a) => aggregate(a),
        Command::Composite(a) => composite(a),
        Command::Simulate(a) => simulate(a),
        Command::Check(a) => check(a),
    }
}

/// Where reports go.
enum Sink {
    Stream(Box<dyn Write>, PathBuf),
    Dir(PathBuf),
}

impl Sink {
    fn open(out: &OutputArgs) -> Result<Self> {
        if let Some(dir) = &out.output_dir {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            return Ok(Sink::Dir(dir.clone()));
        }
        Ok(match &out.output {
            Some(p) => {
                let f = File::create(p).map_err(|e| Error::io(p, e))?;
                Sink::Stream(Box::new(BufWriter::new(f)), p.clone())
            }
            None => Sink::Stream(Box::new(BufWriter::new(io::stdout())), PathBuf::from("<stdout>")),
        })
    }

    fn emit(&mut self, name: &str, report: &AnalysisReport) -> Result<()> {
        let text = to_canonical_string(report);
        match self {
            Sink::Stream(w, path) => w.write_all(text.as_bytes()).map_err(|e| Error::io(&*path, e)),
            Sink::Dir(dir) => {
                let path = dir.join(format!("{name}.json"));
                fs::write(&path, text).map_err(|e| Error::io(path, e))
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self {
            Sink::Stream(w, path) => w.flush().map_err(|e| Error::io(&*path, e)),
            Sink::Dir(_) => Ok(()),
        }
    }
}

/// Writes a report, or fails under strict mode when it is degenerate.
fn deliver(sink: &mut Sink, name: &str, report: &AnalysisReport, strict: bool) -> Result<(), Failure> {
    if report.is_degenerate() {
        let what = report.degeneracies.join("; ");
        if strict {
            sink.finish()?;
            let msg = if what.starts_with(name) { what } else { format!("{name}: {what}") };
            return Err(Failure::Degenerate(msg));
        }
        if what.starts_with(name) {
            eprintln!("warning: {what}");
        } else {
            eprintln!("warning: {name}: {what}");
        }
    }
    sink.emit(name, report)?;
    Ok(())
}

fn analyze(a: &AnalyzeArgs, lag_required: bool) -> Result<(), Failure> {
    if lag_required && a.lag.is_none() {
        return Err(Error::Domain("returns needs --lag".into()).into());
    }
    let reader = TickReader::open(&a.input, a.schema.map(Into::into))?;
    let mut stream = WindowStream::new(reader, a.window, a.origin, a.lag)?;
    let opts = AnalyzeOptions { gap: a.gap };
    let provenance = a.seed.map(|seed| Provenance {
        seed: Some(seed),
        generator: Some(GENERATOR_ID.to_owned()),
    });
    let mut sink = Sink::open(&a.out)?;
    let mut windows = 0usize;
    loop {
        let mut batch = Vec::with_capacity(BATCH);
        for job in stream.by_ref().take(BATCH) {
            batch.push(job?);
        }
        if batch.is_empty() {
            break;
        }
        windows += batch.len();
        let reports: Vec<(i64, Result<AnalysisReport>)> = batch
            .par_iter()
            .map(|job| (job.index, analyze_window(job, opts)))
            .collect();
        for (index, r) in reports {
            let mut r = r?;
            r.provenance = provenance.clone();
            deliver(&mut sink, &format!("window-{index}"), &r, a.out.strict)?;
        }
    }
    sink.finish()?;
    if windows == 0 {
        return Err(Error::NoTicks.into());
    }
    Ok(())
}

fn aggregate(a: &AggregateArgs) -> Result<(), Failure> {
    WindowSpec::tumbling(a.origin, a.window, 0)?;
    let deals = read_deals(&a.input)?;
    let mut pools: BTreeMap<i64, Vec<Deal>> = BTreeMap::new();
    for d in deals {
        pools.entry(window_index(d.time, a.window, a.origin)).or_default().push(d);
    }
    let opts = AnalyzeOptions { gap: a.gap };
    let reports: Vec<(i64, Result<AnalysisReport>)> = pools
        .into_par_iter()
        .map(|(k, deals)| {
            let r = WindowSpec::tumbling(a.origin, a.window, k)
                .and_then(|w| DealPool::new(w, deals))
                .and_then(|p| analyze_pool(k, &p, opts));
            (k, r)
        })
        .collect();
    let mut sink = Sink::open(&a.out)?;
    for (k, r) in reports {
        deliver(&mut sink, &format!("window-{k}"), &r?, a.out.strict)?;
    }
    sink.finish()?;
    Ok(())
}

fn composite(a: &CompositeArgs) -> Result<(), Failure> {
    let spec = CompositeSpec::load(&a.spec)?;
    let mut report = composite_report(spec.stats(), || spec.moments())?;
    if let Some(draws) = a.draws {
        let (comps, corr) = spec.resolve()?;
        report.oracle = Some(monte_carlo_composite_oracle(&comps, &corr, draws, a.seed)?);
        report.provenance = Some(Provenance {
            seed: Some(a.seed),
            generator: Some(GENERATOR_ID.to_owned()),
        });
    }
    let mut sink = Sink::open(&a.out)?;
    deliver(&mut sink, "composite", &report, a.out.strict)?;
    sink.finish()?;
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let spec = load_genspec(&a.genspec, a.seed)?;
    let out: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    let path = a.output.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let written = match a.agents {
        Some(n) => {
            let pool = agent_pool(&spec, n, spec.seed)?;
            write_deals(out, pool.deals())
        }
        None => {
            let generator = Generator::new(&spec)?;
            write_ticks(out, generator.stream())
        }
    };
    written.map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn check(a: &CheckArgs) -> Result<(), Failure> {
    let is_toml = a.input.extension().is_some_and(|e| e == "toml");
    let kind = a.kind.unwrap_or(if is_toml { CheckKind::Composite } else { CheckKind::Ticks });
    let summary = match kind {
        CheckKind::Ticks => {
            let reader = TickReader::open(&a.input, a.schema.map(Into::into))?;
            let mut n = 0usize;
            let mut last = f64::NEG_INFINITY;
            for t in reader {
                let t = t?;
                if t.time() < last {
                    return Err(Error::Unsorted { index: n }.into());
                }
                last = t.time();
                n += 1;
            }
            if n == 0 {
                return Err(Error::NoTicks.into());
            }
            format!("{n} ticks")
        }
        CheckKind::Deals => format!("{} deals", read_deals(&a.input)?.len()),
        CheckKind::Composite => {
            let (comps, _) = CompositeSpec::load(&a.input)?.resolve()?;
            format!("composite spec with {} components", comps.len())
        }
        CheckKind::Genspec => {
            let spec = load_genspec(&a.input, None)?;
            Generator::new(&spec)?;
            format!("generator spec for {} ticks", spec.n_ticks)
        }
    };
    println!("ok: {}: {summary}", display(&a.input));
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
