//! Deterministic rendering of every result table.
//!
//! CSV is the canonical format. JSON mirrors it, carrying exact rationals as
//! `{num, den}` objects. Markdown is for reading only. No renderer embeds
//! timestamps or depends on hash-map iteration order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::field::{EsiField, NsfField};
use crate::fit::{FitResult, ResidualReport, Rule};
use crate::indicators::{cpp, Hundredths, IndicatorSet};
use crate::ingest::{self, ResearcherRecord, APPENDIX_HEADER};
use crate::rank::{leader_coverage, MergedList};
use crate::ratio::{display_round, emit_divisor_table, AggregatedVector, DivisorTable};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    Markdown,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Markdown => "md",
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Markdown => "markdown",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(Error::InvalidParameter(format!(
                "unknown output format `{other}`"
            ))),
        }
    }
}

/// A rectangular table of already-formatted cells.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    /// Extra CSV lines after the rows (not part of the rectangular table).
    footer: Vec<Vec<String>>,
}

impl Table {
    fn csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .flexible(true)
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("write");
        for row in self.rows.iter().chain(&self.footer) {
            w.write_record(row).expect("write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn markdown(&self, title: &str) -> String {
        let escape = |s: &str| s.replace('|', "\\|");
        let mut out = format!("## {title}\n\n| {} |\n", self.header.join(" | "));
        out.push_str(&format!("|{}\n", "---|".repeat(self.header.len())));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| escape(c)).collect();
            out.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
        if !self.footer.is_empty() {
            out.push('\n');
            for row in &self.footer {
                out.push_str(&format!("{}\n\n", row.join(": ")));
            }
        }
        out
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn fixed4(x: f64) -> String {
    format!("{x:.4}")
}

fn opt4(x: Option<f64>) -> String {
    x.map(fixed4).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub nsf_field: NsfField,
    pub t_ratio: Option<f64>,
    pub h_level: Option<f64>,
    pub h_ratio: Option<f64>,
}

/// One row per broad field that has any ratio, in field-name order.
pub fn ratio_rows(
    t_ratios: &BTreeMap<NsfField, f64>,
    h_levels: &BTreeMap<NsfField, f64>,
    h_ratios: &BTreeMap<NsfField, f64>,
) -> Vec<RatioRow> {
    let mut fields: Vec<&NsfField> = t_ratios
        .keys()
        .chain(h_levels.keys())
        .chain(h_ratios.keys())
        .collect();
    fields.sort();
    fields.dedup();
    fields
        .into_iter()
        .map(|f| RatioRow {
            nsf_field: f.clone(),
            t_ratio: t_ratios.get(f).copied(),
            h_level: h_levels.get(f).copied(),
            h_ratio: h_ratios.get(f).copied(),
        })
        .collect()
}

/// `nsf_field,t_ratio,h_level,h_ratio`, four fraction digits.
pub fn render_ratios(rows: &[RatioRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv => ratio_table(rows, false).csv(),
        OutputFormat::Markdown => {
            ratio_table(rows, true).markdown("Citation ratios relative to mathematics")
        }
    }
}

fn ratio_table(rows: &[RatioRow], display: bool) -> Table {
    let mut header = vec!["nsf_field", "t_ratio", "h_level", "h_ratio"];
    if display {
        header.extend(["T (rounded)", "H (rounded)"]);
    }
    Table {
        header,
        rows: rows
            .iter()
            .map(|r| {
                let mut row = vec![
                    r.nsf_field.to_string(),
                    opt4(r.t_ratio),
                    opt4(r.h_level),
                    opt4(r.h_ratio),
                ];
                if display {
                    row.push(
                        r.t_ratio
                            .map(|x| display_round(x).to_string())
                            .unwrap_or_default(),
                    );
                    row.push(
                        r.h_ratio
                            .map(|x| display_round(x).to_string())
                            .unwrap_or_default(),
                    );
                }
                row
            })
            .collect(),
        footer: vec![],
    }
}

#[derive(Serialize)]
struct DivisorJson<'a> {
    esi_field: &'a EsiField,
    divisor: Rational,
}

/// `esi_field,divisor_num,divisor_den`.
pub fn render_divisors(table: &DivisorTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => emit_divisor_table(table),
        OutputFormat::Json => json(
            &table
                .iter()
                .map(|(f, d)| DivisorJson {
                    esi_field: f,
                    divisor: *d,
                })
                .collect::<Vec<_>>(),
        ),
        OutputFormat::Markdown => Table {
            header: vec!["esi_field", "divisor"],
            rows: table
                .iter()
                .map(|(f, d)| vec![f.to_string(), d.to_string()])
                .collect(),
            footer: vec![],
        }
        .markdown("Field divisors"),
    }
}

/// `nsf_field,date,position,value`, one row per vector element.
pub fn render_aggregated(vectors: &[AggregatedVector], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(&vectors),
        _ => {
            let table = Table {
                header: vec!["nsf_field", "date", "position", "value"],
                rows: vectors
                    .iter()
                    .flat_map(|v| {
                        v.values.iter().enumerate().map(move |(i, x)| {
                            vec![
                                v.nsf_field.to_string(),
                                v.snapshot_date.format("%Y-%m-%d").to_string(),
                                (i + 1).to_string(),
                                x.to_string(),
                            ]
                        })
                    })
                    .collect(),
                footer: vec![],
            };
            if format == OutputFormat::Csv {
                table.csv()
            } else {
                table.markdown("Aggregated top-k vectors")
            }
        }
    }
}

#[derive(Serialize)]
struct FitJson<'a> {
    rule: Rule,
    alpha: f64,
    alpha_display: String,
    max_abs_residual: f64,
    rows: &'a [crate::fit::ResidualRow],
}

/// `field,T,H,H_pred,residual` with a trailing `alpha,<2 digits>` line. The
/// two-thirds rule adds an `excluded` column.
pub fn render_fit(report: &ResidualReport, format: OutputFormat) -> String {
    let alpha_display = format!("{:.2}", report.alpha);
    match format {
        OutputFormat::Json => json(&FitJson {
            rule: report.rule,
            alpha: report.alpha,
            alpha_display,
            max_abs_residual: report.max_abs_residual,
            rows: &report.rows,
        }),
        _ => {
            let two_thirds = report.rule == Rule::TwoThirds;
            let mut header = vec!["field", "T", "H", "H_pred", "residual"];
            if two_thirds {
                header.push("excluded");
            }
            let rows = report
                .rows
                .iter()
                .map(|r| {
                    let mut row = vec![
                        r.field.clone(),
                        r.t.to_string(),
                        r.h.to_string(),
                        fixed4(r.predicted),
                        fixed4(r.residual),
                    ];
                    if two_thirds {
                        row.push(r.excluded.to_string());
                    }
                    row
                })
                .collect();
            let footer = if two_thirds {
                vec![vec![
                    "max_abs_residual".to_string(),
                    fixed4(report.max_abs_residual),
                ]]
            } else {
                vec![vec!["alpha".to_string(), alpha_display]]
            };
            let table = Table {
                header,
                rows,
                footer,
            };
            if format == OutputFormat::Csv {
                table.csv()
            } else {
                let title = if two_thirds {
                    "Two-thirds rule"
                } else {
                    "Power-law fit"
                };
                table.markdown(title)
            }
        }
    }
}

/// Plot data as `series,x,y`: the observed pairs, the fitted power curve and
/// the two-thirds line, each curve sampled at integer T from 1 to the
/// largest observed T.
pub fn render_plot_data(fit: &FitResult) -> String {
    let max_t = fit
        .pairs_used
        .iter()
        .map(|p| p.t)
        .fold(1.0_f64, f64::max)
        .ceil() as u64;
    let mut rows = Vec::new();
    for p in &fit.pairs_used {
        rows.push(vec![
            "observed".to_string(),
            p.t.to_string(),
            p.h.to_string(),
        ]);
    }
    for t in 1..=max_t {
        rows.push(vec![
            "power".into(),
            t.to_string(),
            fixed4((t as f64).powf(fit.alpha)),
        ]);
    }
    for t in 1..=max_t {
        rows.push(vec![
            "two_thirds".into(),
            t.to_string(),
            fixed4(2.0 * t as f64 / 3.0),
        ]);
    }
    Table {
        header: vec!["series", "x", "y"],
        rows,
        footer: vec![],
    }
    .csv()
}

fn display_cpp(record: &ResearcherRecord) -> Hundredths {
    cpp(record.citations, record.papers).unwrap_or(Hundredths::from_raw(0))
}

#[derive(Serialize)]
struct MergedJson<'a> {
    divisor_preset: &'a str,
    top_per_field: usize,
    cluster_count: u32,
    entries: Vec<MergedEntryJson<'a>>,
}

#[derive(Serialize)]
struct MergedEntryJson<'a> {
    rank: u32,
    name: &'a str,
    normalized: u64,
    normalized_exact: Rational,
    field: &'a EsiField,
    field_rank: u32,
    papers: u64,
    citations: u64,
    cpp: Hundredths,
    cluster_id: u32,
    flags: Vec<&'static str>,
}

/// Merged list in the published list's column layout.
pub fn render_merged(list: &MergedList, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(&MergedJson {
            divisor_preset: &list.divisor_preset,
            top_per_field: list.top_per_field,
            cluster_count: list.cluster_count(),
            entries: list
                .entries
                .iter()
                .map(|e| MergedEntryJson {
                    rank: e.global_rank,
                    name: &e.record.name,
                    normalized: e.normalized_citations,
                    normalized_exact: e.normalized_exact,
                    field: &e.record.esi_field,
                    field_rank: e.record.rank_in_field,
                    papers: e.record.papers,
                    citations: e.record.citations,
                    cpp: display_cpp(&e.record),
                    cluster_id: e.cluster_id,
                    flags: e.flags.iter().map(|f| f.as_str()).collect(),
                })
                .collect(),
        }),
        OutputFormat::Csv => {
            let mut w = ingest::writer();
            w.write_record(APPENDIX_HEADER).expect("write");
            for e in &list.entries {
                w.write_record([
                    e.global_rank.to_string().as_str(),
                    &e.record.name,
                    &e.normalized_citations.to_string(),
                    e.record.esi_field.as_str(),
                    &e.record.rank_in_field.to_string(),
                    &e.record.papers.to_string(),
                    &e.record.citations.to_string(),
                    &display_cpp(&e.record).to_string(),
                ])
                .expect("write");
            }
            ingest::finish(w)
        }
        OutputFormat::Markdown => Table {
            header: vec![
                "rank",
                "name",
                "normalized",
                "field",
                "field_rank",
                "papers",
                "citations",
                "cpp",
                "cluster",
                "flags",
            ],
            rows: list
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.global_rank.to_string(),
                        e.record.name.clone(),
                        e.normalized_citations.to_string(),
                        e.record.esi_field.to_string(),
                        e.record.rank_in_field.to_string(),
                        e.record.papers.to_string(),
                        e.record.citations.to_string(),
                        display_cpp(&e.record).to_string(),
                        e.cluster_id.to_string(),
                        e.flags
                            .iter()
                            .map(|f| f.as_str())
                            .collect::<Vec<_>>()
                            .join(" "),
                    ]
                })
                .collect(),
            footer: vec![],
        }
        .markdown("Multidisciplinary list"),
    }
}

/// Leader counts at the given cut-offs plus the cluster count.
pub fn rank_summary(list: &MergedList, cutoffs: &[u32]) -> String {
    let counts: Vec<String> = cutoffs
        .iter()
        .map(|n| leader_coverage(list, *n).len().to_string())
        .collect();
    let tops: Vec<String> = cutoffs.iter().map(u32::to_string).collect();
    let mut out = format!(
        "{} field leaders in top {}\n",
        counts.join(" / "),
        tops.join(" / ")
    );
    for n in cutoffs {
        let fields: Vec<String> = leader_coverage(list, *n)
            .iter()
            .map(|f| f.to_string())
            .collect();
        out.push_str(&format!("top {n}: {}\n", fields.join("; ")));
    }
    out.push_str(&format!("entries: {}\n", list.entries.len()));
    out.push_str(&format!("clusters: {}\n", list.cluster_count()));
    let flagged = list.entries.iter().filter(|e| !e.flags.is_empty()).count();
    out.push_str(&format!("flagged: {flagged}\n"));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorRow {
    pub name: String,
    pub esi_field: EsiField,
    #[serde(flatten)]
    pub indicators: IndicatorSet,
}

/// `name,esi_field,cpp,h_index,cpmp,papers_per_year,aggregation_flagged`.
pub fn render_indicators(rows: &[IndicatorRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(&rows),
        _ => {
            let table = Table {
                header: vec![
                    "name",
                    "esi_field",
                    "cpp",
                    "h_index",
                    "cpmp",
                    "papers_per_year",
                    "aggregation_flagged",
                ],
                rows: rows
                    .iter()
                    .map(|r| {
                        let i = &r.indicators;
                        vec![
                            r.name.clone(),
                            r.esi_field.to_string(),
                            i.cpp.map(|c| c.to_string()).unwrap_or_default(),
                            i.h_index.map(|h| h.to_string()).unwrap_or_default(),
                            i.cpmp.map(|c| format!("{c:.2}")).unwrap_or_default(),
                            format!("{:.2}", i.papers_per_year),
                            i.aggregation_flagged.to_string(),
                        ]
                    })
                    .collect(),
                footer: vec![],
            };
            if format == OutputFormat::Csv {
                table.csv()
            } else {
                table.markdown("Indicators")
            }
        }
    }
}
