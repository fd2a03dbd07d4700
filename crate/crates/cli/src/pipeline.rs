use std::collections::BTreeMap;

use hcr_core::data;
use hcr_core::fit::{fit_alpha, parse_fit_pairs, residual_report, FitPair};
use hcr_core::indicators::{indicators_for, IndicatorConfig};
use hcr_core::ingest::{
    group_by_field, parse_appendix_fixture, parse_field_totals, parse_mapping,
    parse_paper_profiles, parse_snapshots,
};
use hcr_core::rank::{cluster_groups, merge_rank, MergedList};
use hcr_core::ratio::{
    aggregate_top_vectors, build_divisor_table, compute_h_ratios, compute_t_ratios,
    parse_divisor_table,
};
use hcr_core::report::{self, ratio_rows, IndicatorRow, RatioRow};
use hcr_core::{
    AggregatedVector, CpmpMode, DivisorPreset, DivisorTable, EsiField, FieldMapping, FieldSnapshot,
    FieldUniverse, NsfField, OutputFormat, ResearcherRecord, SnapshotSchema,
};
use serde_json::json;

use crate::args::{Command, CpmpModeArg, Opts};
use crate::io::{invalid, sha256_hex, write_all, Failure, Input};

const SUMMARY_CUTOFFS: [u32; 3] = [10, 50, 100];

/// Every input, read up front so I/O problems surface before any work.
struct Inputs {
    snapshots: Option<Input>,
    totals: Option<Input>,
    mapping: Input,
    divisors: Option<Input>,
    fixture: Option<Input>,
    profiles: Option<Input>,
    pairs: Option<Input>,
}

impl Inputs {
    fn load(opts: &Opts) -> Result<Self, Failure> {
        let pick = |path: &Option<std::path::PathBuf>,
                    bundled: Option<&str>|
         -> Result<Option<Input>, Failure> {
            match (path, bundled) {
                (Some(p), _) => Input::read(p).map(Some),
                (None, Some(content)) if opts.bundled => Ok(Some(Input::bundled(content))),
                _ => Ok(None),
            }
        };
        Ok(Inputs {
            snapshots: pick(&opts.snapshots, Some(data::HRATIO_SNAPSHOTS_CSV))?,
            totals: pick(&opts.totals, Some(data::FIELD_TOTALS_CSV))?,
            mapping: match &opts.mapping {
                Some(p) => Input::read(p)?,
                None => Input::bundled(data::FIELD_MAPPING_CSV),
            },
            divisors: pick(&opts.divisors, None)?,
            fixture: pick(&opts.fixture, Some(data::APPENDIX_CSV))?,
            profiles: pick(&opts.profiles, None)?,
            pairs: pick(&opts.pairs, Some(data::PUBLISHED_PAIRS_CSV))?,
        })
    }

    fn named(&self) -> Vec<(&'static str, &Input)> {
        let mut out = vec![("mapping", &self.mapping)];
        for (name, input) in [
            ("snapshots", &self.snapshots),
            ("totals", &self.totals),
            ("divisors", &self.divisors),
            ("fixture", &self.fixture),
            ("profiles", &self.profiles),
            ("pairs", &self.pairs),
        ] {
            if let Some(i) = input {
                out.push((name, i));
            }
        }
        out.sort_by_key(|(n, _)| *n);
        out
    }
}

struct Run<'a> {
    opts: &'a Opts,
    inputs: Inputs,
    format: OutputFormat,
    esi: FieldUniverse,
    mapping: FieldMapping,
}

fn check_params(opts: &Opts) -> Result<(), Failure> {
    let positive = |name: &str, x: f64| {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(invalid(format!(
                "--{name} must be a positive number, got {x}"
            )))
        }
    };
    positive("agg-threshold", opts.agg_threshold)?;
    positive("window-years", opts.window_years)?;
    if !(opts.epsilon >= 0.0 && opts.epsilon.is_finite()) {
        return Err(invalid(format!(
            "--epsilon must be a non-negative number, got {}",
            opts.epsilon
        )));
    }
    if opts.top_per_field == 0 {
        return Err(invalid("--top-per-field must be at least 1"));
    }
    if opts.top_k == Some(0) {
        return Err(invalid("--top-k must be at least 1"));
    }
    if opts.data_denominator == 0 {
        return Err(invalid("--data-denominator must be at least 1"));
    }
    match (opts.cpmp_mode, opts.cpmp_threshold) {
        (CpmpModeArg::Threshold, None) => {
            return Err(invalid("--cpmp-mode threshold requires --cpmp-threshold"))
        }
        (CpmpModeArg::Threshold, Some(t)) if !(t >= 0.0 && t.is_finite()) => {
            return Err(invalid(format!(
                "--cpmp-threshold must be a non-negative number, got {t}"
            )))
        }
        (CpmpModeArg::HIndex, Some(_)) => {
            return Err(invalid(
                "--cpmp-threshold only applies to --cpmp-mode threshold",
            ))
        }
        _ => {}
    }
    if let Some(p) = &opts.preset {
        p.parse::<DivisorPreset>()
            .map_err(|e| invalid(e.to_string()))?;
    }
    Ok(())
}

/// Runs one command: validates, computes every output in memory, then
/// writes them (or prints the primary one).
pub fn execute(command: &Command) -> Result<(), Failure> {
    let opts = command.opts();
    check_params(opts)?;
    if matches!(command, Command::Report(_)) && opts.out.is_none() {
        return Err(invalid("report writes several files and needs --out <DIR>"));
    }
    let inputs = Inputs::load(opts)?;
    let esi = FieldUniverse::esi_default();
    let mapping = parse_mapping(
        inputs.mapping.bytes.as_slice(),
        &esi,
        &FieldUniverse::nsf_default(),
    )
    .map_err(|e| inputs.mapping.fail(e))?;
    let run = Run {
        opts,
        format: opts.format.into(),
        inputs,
        esi,
        mapping,
    };

    let ext = run.format.extension();
    let mut files: Vec<(String, String)> = Vec::new();
    let mut note = None;
    match command {
        Command::Ratios(_) => {
            if run.inputs.totals.is_none() && run.inputs.snapshots.is_none() {
                return Err(invalid("ratios needs --totals and/or --snapshots"));
            }
            let (rows, _) = run.ratio_rows()?;
            files.push((
                format!("ratios.{ext}"),
                report::render_ratios(&rows, run.format),
            ));
            let divisors = run.divisors()?.0;
            files.push((
                format!("divisors.{ext}"),
                report::render_divisors(&divisors, run.format),
            ));
        }
        Command::Hratios(_) => {
            run.require(&[("snapshots", run.inputs.snapshots.is_some())])?;
            let (aggregated, levels, ratios) = run.h_stage()?.expect("snapshots present");
            let rows = ratio_rows(&BTreeMap::new(), &levels, &ratios);
            files.push((
                format!("hratios.{ext}"),
                report::render_ratios(&rows, run.format),
            ));
            files.push((
                format!("aggregated.{ext}"),
                report::render_aggregated(&aggregated, run.format),
            ));
        }
        Command::Fit(_) => files.extend(run.fit_files()?),
        Command::Rank(_) => {
            let merged = run.merged()?;
            let summary = report::rank_summary(&merged, &SUMMARY_CUTOFFS);
            files.push((
                format!("merged.{ext}"),
                report::render_merged(&merged, run.format),
            ));
            files.push(("rank_summary.txt".into(), summary.clone()));
            note = Some(summary);
        }
        Command::Indicators(_) => {
            files.push((
                format!("indicators.{ext}"),
                report::render_indicators(&run.indicators()?, run.format),
            ));
        }
        Command::Report(_) => {
            run.require(&[
                ("fixture", run.inputs.fixture.is_some()),
                ("snapshots", run.inputs.snapshots.is_some()),
                ("totals", run.inputs.totals.is_some()),
            ])?;
            let (rows, aggregated) = run.ratio_rows()?;
            files.push((
                format!("ratios.{ext}"),
                report::render_ratios(&rows, run.format),
            ));
            files.push((
                format!("aggregated.{ext}"),
                report::render_aggregated(&aggregated.unwrap_or_default(), run.format),
            ));
            files.push((
                format!("divisors.{ext}"),
                report::render_divisors(&run.divisors()?.0, run.format),
            ));
            files.extend(run.fit_files()?);
            let merged = run.merged()?;
            files.push((
                format!("merged.{ext}"),
                report::render_merged(&merged, run.format),
            ));
            files.push((
                "rank_summary.txt".into(),
                report::rank_summary(&merged, &SUMMARY_CUTOFFS),
            ));
            files.push((
                format!("indicators.{ext}"),
                report::render_indicators(&run.indicators()?, run.format),
            ));
            let manifest = run.manifest(command.name(), &files);
            files.push(("manifest.json".into(), manifest));
        }
    }

    match &opts.out {
        Some(dir) => write_all(dir, &files),
        None => {
            print!("{}", files[0].1);
            if let Some(n) = note {
                eprint!("{n}");
            }
            Ok(())
        }
    }
}

impl Run<'_> {
    fn require(&self, needed: &[(&str, bool)]) -> Result<(), Failure> {
        let missing: Vec<String> = needed
            .iter()
            .filter(|(_, present)| !present)
            .map(|(name, _)| format!("--{name}"))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(invalid(format!(
                "missing required input(s): {}",
                missing.join(", ")
            )))
        }
    }

    fn snapshots(&self) -> Result<Option<Vec<FieldSnapshot>>, Failure> {
        let Some(input) = &self.inputs.snapshots else {
            return Ok(None);
        };
        let schema = SnapshotSchema {
            universe: self.esi.clone(),
            window_years: self.opts.window_years,
        };
        parse_snapshots(input.bytes.as_slice(), &schema)
            .map(Some)
            .map_err(|e| input.fail(e))
    }

    fn t_ratios(&self) -> Result<Option<BTreeMap<NsfField, f64>>, Failure> {
        let Some(input) = &self.inputs.totals else {
            return Ok(None);
        };
        let series = parse_field_totals(input.bytes.as_slice(), &FieldUniverse::nsf_default())
            .map_err(|e| input.fail(e))?;
        compute_t_ratios(&series, &NsfField::mathematics())
            .map(Some)
            .map_err(|e| input.fail(e))
    }

    #[allow(clippy::type_complexity)]
    fn h_stage(
        &self,
    ) -> Result<
        Option<(
            Vec<AggregatedVector>,
            BTreeMap<NsfField, f64>,
            BTreeMap<NsfField, f64>,
        )>,
        Failure,
    > {
        let Some(snapshots) = self.snapshots()? else {
            return Ok(None);
        };
        let input = self.inputs.snapshots.as_ref().expect("parsed above");
        let aggregated = aggregate_top_vectors(&snapshots, &self.mapping, self.opts.top_k)
            .map_err(|e| input.fail(e))?;
        let (levels, ratios) =
            compute_h_ratios(&aggregated, &NsfField::mathematics()).map_err(|e| input.fail(e))?;
        Ok(Some((aggregated, levels, ratios)))
    }

    fn ratio_rows(&self) -> Result<(Vec<RatioRow>, Option<Vec<AggregatedVector>>), Failure> {
        let t = self.t_ratios()?.unwrap_or_default();
        let (aggregated, levels, ratios) = match self.h_stage()? {
            Some((a, l, r)) => (Some(a), l, r),
            None => (None, BTreeMap::new(), BTreeMap::new()),
        };
        Ok((ratio_rows(&t, &levels, &ratios), aggregated))
    }

    /// The divisor table and the name recorded with the merged list.
    fn divisors(&self) -> Result<(DivisorTable, String), Failure> {
        if let Some(input) = &self.inputs.divisors {
            let table = parse_divisor_table(input.bytes.as_slice(), &self.esi)
                .map_err(|e| input.fail(e))?;
            return Ok((table, "file".into()));
        }
        let preset: DivisorPreset = match &self.opts.preset {
            Some(p) => p
                .parse()
                .map_err(|e: hcr_core::Error| invalid(e.to_string()))?,
            None => DivisorPreset::Appendix,
        };
        let h = if preset == DivisorPreset::Data {
            match self.h_stage()? {
                Some((_, _, ratios)) => Some(ratios),
                None => return Err(invalid("preset `data` needs --snapshots")),
            }
        } else {
            None
        };
        let table = build_divisor_table(
            preset,
            &self.mapping,
            h.as_ref(),
            self.opts.data_denominator,
        )
        .map_err(|e| invalid(e.to_string()))?;
        Ok((table, preset.as_str().into()))
    }

    fn fit_files(&self) -> Result<Vec<(String, String)>, Failure> {
        let pairs: Vec<FitPair> = match &self.inputs.pairs {
            Some(input) => parse_fit_pairs(input.bytes.as_slice()).map_err(|e| input.fail(e))?,
            None => match (self.t_ratios()?, self.h_stage()?) {
                (Some(t), Some((_, _, h))) => t
                    .iter()
                    .filter_map(|(f, tv)| h.get(f).map(|hv| FitPair::new(f.as_str(), *tv, *hv)))
                    .collect(),
                _ => {
                    return Err(invalid(
                        "missing required input(s): --pairs, or --totals with --snapshots",
                    ))
                }
            },
        };
        let fit = fit_alpha(&pairs).map_err(|e| invalid(e.to_string()))?;
        let ext = self.format.extension();
        Ok(vec![
            (
                format!("fit.{ext}"),
                report::render_fit(&residual_report(&fit, hcr_core::Rule::Power), self.format),
            ),
            (
                format!("two_thirds.{ext}"),
                report::render_fit(
                    &residual_report(&fit, hcr_core::Rule::TwoThirds),
                    self.format,
                ),
            ),
            ("plot.csv".into(), report::render_plot_data(&fit)),
        ])
    }

    /// Researcher records in presentation order: the fixture's global order,
    /// or each field's latest snapshot by field then rank.
    fn records(&self) -> Result<Vec<ResearcherRecord>, Failure> {
        if let Some(input) = &self.inputs.fixture {
            let rows = parse_appendix_fixture(input.bytes.as_slice(), &self.esi)
                .map_err(|e| input.fail(e))?;
            return Ok(rows.into_iter().map(|r| r.record).collect());
        }
        let Some(snapshots) = self.snapshots()? else {
            return Err(invalid(
                "missing required input(s): --fixture or --snapshots",
            ));
        };
        let mut latest: BTreeMap<EsiField, FieldSnapshot> = BTreeMap::new();
        for s in snapshots {
            latest.insert(s.esi_field.clone(), s);
        }
        Ok(latest.into_values().flat_map(|s| s.entries).collect())
    }

    fn merged(&self) -> Result<MergedList, Failure> {
        let mut lists: BTreeMap<EsiField, Vec<ResearcherRecord>> = BTreeMap::new();
        if let Some(input) = &self.inputs.fixture {
            let rows = parse_appendix_fixture(input.bytes.as_slice(), &self.esi)
                .map_err(|e| input.fail(e))?;
            lists = group_by_field(&rows);
        } else {
            for r in self.records()? {
                lists.entry(r.esi_field.clone()).or_default().push(r);
            }
        }
        if let Some(k) = self.opts.top_k {
            for l in lists.values_mut() {
                l.truncate(k);
            }
        }
        let (divisors, name) = self.divisors()?;
        let domain = |e: hcr_core::Error| invalid(e.to_string());
        let merged = merge_rank(lists.values(), &divisors, self.opts.top_per_field, &name)
            .map_err(domain)?;
        let mut merged = cluster_groups(merged, self.opts.epsilon).map_err(domain)?;
        merged
            .flag_aggregation(self.opts.window_years, self.opts.agg_threshold)
            .map_err(domain)?;
        Ok(merged)
    }

    fn indicators(&self) -> Result<Vec<IndicatorRow>, Failure> {
        let records = self.records()?;
        let profiles = match &self.inputs.profiles {
            Some(input) => {
                parse_paper_profiles(input.bytes.as_slice()).map_err(|e| input.fail(e))?
            }
            None => Vec::new(),
        };
        let by_name: BTreeMap<&str, _> = profiles.iter().map(|p| (p.name.as_str(), p)).collect();
        let config = IndicatorConfig {
            cpmp_mode: match self.opts.cpmp_threshold {
                Some(t) => CpmpMode::Threshold(t),
                None => CpmpMode::HIndex,
            },
            aggregation_threshold: self.opts.agg_threshold,
            window_years: self.opts.window_years,
        };
        records
            .iter()
            .map(|r| {
                let indicators = indicators_for(r, by_name.get(r.name.as_str()).copied(), &config)
                    .map_err(|e| invalid(e.to_string()))?;
                Ok(IndicatorRow {
                    name: r.name.clone(),
                    esi_field: r.esi_field.clone(),
                    indicators,
                })
            })
            .collect()
    }

    fn manifest(&self, command: &str, files: &[(String, String)]) -> String {
        let o = self.opts;
        let inputs: serde_json::Map<String, serde_json::Value> = self
            .inputs
            .named()
            .into_iter()
            .map(|(name, i)| {
                (
                    name.to_string(),
                    json!({ "origin": i.origin, "sha256": i.sha256() }),
                )
            })
            .collect();
        let outputs: serde_json::Map<String, serde_json::Value> = files
            .iter()
            .map(|(name, content)| (name.clone(), json!(sha256_hex(content.as_bytes()))))
            .collect();
        let preset = if self.inputs.divisors.is_some() {
            "file".to_string()
        } else {
            o.preset
                .clone()
                .unwrap_or_else(|| DivisorPreset::Appendix.as_str().into())
        };
        let manifest = json!({
            "tool": "hcr",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "inputs": inputs,
            "parameters": {
                "divisor_preset": preset,
                "data_denominator": o.data_denominator,
                "top_k": o.top_k,
                "top_per_field": o.top_per_field,
                "cluster_epsilon": o.epsilon,
                "cpmp_mode": match o.cpmp_mode { CpmpModeArg::HIndex => "h_index", CpmpModeArg::Threshold => "threshold" },
                "cpmp_threshold": o.cpmp_threshold,
                "aggregation_threshold": o.agg_threshold,
                "window_years": o.window_years,
                "format": self.format.to_string(),
            },
            "outputs": outputs,
        });
        let mut s = serde_json::to_string_pretty(&manifest).expect("serializable");
        s.push('\n');
        s
    }
}
