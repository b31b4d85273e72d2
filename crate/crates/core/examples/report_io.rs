//! Read ticks, analyze windows and write canonical JSON reports.

use market_moments::io::{parse_ticks, to_canonical_string, write_ticks, Format};
use market_moments::{analyze_window, AnalyzeOptions, Result, WindowStream};

pub fn run_example() -> Result<()> {
    let csv = "time,price,volume\n0.25,4,3\n0.75,2,1\n1.2,3,2\n1.6,3.5,1\n";
    let ticks = parse_ticks(csv, Format::Csv, None)?;

    let mut out = Vec::new();
    write_ticks(&mut out, ticks.iter().copied()).expect("in-memory write");
    print!("{}", String::from_utf8_lossy(&out));
    assert_eq!(parse_ticks(&String::from_utf8_lossy(&out), Format::Csv, None)?, ticks);

    let jobs = WindowStream::new(ticks.into_iter().map(Ok), 1.0, 0.0, Some(0.5))?;
    for job in jobs {
        let report = analyze_window(&job?, AnalyzeOptions { gap: true })?;
        print!("{}", to_canonical_string(&report));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
