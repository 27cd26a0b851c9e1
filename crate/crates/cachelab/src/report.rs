//! Report rendering: JSON, CSV and an aligned text table.

use std::str::FromStr;

use cachelab_core::SimReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::Table),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

/// Column values in declared field order. Floats get four decimals.
fn cells(r: &SimReport) -> [String; 16] {
    [
        r.label.clone(),
        r.accesses.to_string(),
        r.demand_hits.to_string(),
        r.demand_misses.to_string(),
        r.compulsory_misses.to_string(),
        r.evictions.to_string(),
        r.timer_evictions.to_string(),
        r.halfway_evictions.to_string(),
        r.prefetch_issued.to_string(),
        r.prefetch_useful.to_string(),
        r.prefetch_useless.to_string(),
        r.prefetch_harmful.to_string(),
        r.prefetch_hits.to_string(),
        format!("{:.4}", r.coverage),
        format!("{:.4}", r.hit_ratio),
        r.distinct_keys.to_string(),
    ]
}

pub fn emit_report(reports: &[SimReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(SimReport::FIELDS).expect("in-memory write");
            for r in reports {
                w.write_record(cells(r)).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
        }
        ReportFormat::Table => table(reports),
    }
}

fn table(reports: &[SimReport]) -> String {
    let rows: Vec<[String; 16]> = reports.iter().map(cells).collect();
    let widths: Vec<usize> = (0..16)
        .map(|c| rows.iter().map(|r| r[c].len()).chain([SimReport::FIELDS[c].len()]).max().unwrap())
        .collect();
    let mut out = String::new();
    let mut line = |cols: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cols
            .enumerate()
            .map(|(c, v)| {
                if c == 0 {
                    format!("{v:<w$}", w = widths[c])
                } else {
                    format!("{v:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut SimReport::FIELDS.iter().copied());
    for r in &rows {
        line(&mut r.iter().map(String::as_str));
    }
    out
}

/// Reads reports back from CSV produced by [`emit_report`].
pub fn parse_csv(text: &str) -> Result<Vec<SimReport>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}
