//! `logmin` command-line entry point.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 on usage errors. Report
//! bytes go to stdout (or `--out`); diagnostics go to stderr.

mod args;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use logmin_core::config::parse_kv;
use logmin_core::ingest::{parse_auto_str, to_csv_string, to_jsonl_string};
use logmin_core::reporter::{render_json, render_text};
use logmin_core::synth::{DEFAULT_SPAN_LEN, DEFAULT_SPAN_START};
use logmin_core::{
    calendar_report, eval, frequency_report, gen_synthetic, mine_store, mnp_report, partition, render, summarize,
    tod_report, CalendarView, Format, FrequencyMode, GeneratorProfile, LogStore, MiningConfig, ParamVector, ParseMode,
    PlantedCluster, PrefixTable, Report, TodBand,
};
use serde::Serialize;

use args::{Band, Cli, Command, Common, FreqMode, GenArgs, OutputFormat, ReportCommand, View};

/// Everything resolved from defaults, the config file and flags.
struct Settings {
    mining: MiningConfig,
    provider_table: Option<PathBuf>,
    current_provider: Option<String>,
    country_codes: Option<String>,
    now: Option<i64>,
}

fn resolve_settings(common: &Common) -> Result<Settings> {
    let mut settings = Settings {
        mining: MiningConfig::default(),
        provider_table: None,
        current_provider: None,
        country_codes: None,
        now: None,
    };
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        for (key, value) in parse_kv(&text)? {
            if settings.mining.set(&key, &value)? {
                continue;
            }
            match key.as_str() {
                "provider-table" => settings.provider_table = Some(PathBuf::from(value)),
                "current-provider" => settings.current_provider = Some(value),
                "country-codes" => settings.country_codes = Some(value),
                "now" => settings.now = Some(value.parse().with_context(|| format!("config key `now`: `{value}`"))?),
                other => bail!("unknown config key `{other}`"),
            }
        }
    }

    let m = &mut settings.mining;
    if let Some(v) = common.seed {
        m.seed = v;
    }
    if let Some(v) = common.k {
        m.k = v;
    }
    if let Some(v) = common.tr {
        m.t_r = Some(v);
    }
    if let Some(v) = common.tp {
        m.t_p = v;
    }
    if let Some(v) = common.tf {
        m.t_f = v;
    }
    if let Some(v) = common.epsilon {
        m.epsilon = v;
    }
    if let Some(v) = common.lambda {
        m.lambda = v;
    }
    if let Some(v) = common.threshold {
        m.port_threshold = v;
    }
    if let Some(v) = common.utc_offset {
        m.utc_offset = v;
    }
    if let Some(v) = &common.tod_boundaries {
        m.set("tod-boundaries", v)?;
    }
    m.validate()?;

    if let Some(v) = &common.provider_table {
        settings.provider_table = Some(v.clone());
    }
    if let Some(v) = &common.current_provider {
        settings.current_provider = Some(v.clone());
    }
    if let Some(v) = &common.country_codes {
        settings.country_codes = Some(v.clone());
    }
    if let Some(v) = common.now {
        settings.now = Some(v);
    }
    Ok(settings)
}

impl Settings {
    fn now(&self) -> i64 {
        self.now.unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs() as i64)
        })
    }

    fn table(&self) -> Result<PrefixTable> {
        let mut table = match &self.provider_table {
            Some(path) => PrefixTable::load(path)?,
            None => PrefixTable::new(),
        };
        if let Some(codes) = &self.country_codes {
            table = table.with_country_codes(codes.split(',').map(str::trim).filter(|c| !c.is_empty()));
        }
        if let Some(current) = &self.current_provider {
            table = table.with_self_provider(current.clone());
        }
        Ok(table)
    }
}

fn read_input(common: &Common) -> Result<(String, String)> {
    let path = common.input.as_ref().ok_or_else(|| anyhow!("missing --in PATH"))?;
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading stdin")?;
        Ok((text, "<stdin>".to_owned()))
    } else {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok((text, path.display().to_string()))
    }
}

fn load_store(common: &Common) -> Result<(LogStore, Vec<logmin_core::CallRecord>)> {
    let (text, source) = read_input(common)?;
    let report = parse_auto_str(&text, &source, ParseMode::Strict).with_context(|| format!("parsing {source}"))?;
    for w in &report.warnings {
        eprintln!("warning: {source}: {w}");
    }
    let store = partition(&report.records)?;
    Ok((store, report.records))
}

fn emit(common: &Common, bytes: &[u8]) -> Result<()> {
    match &common.out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn format_of(common: &Common) -> Format {
    match common.format {
        Some(OutputFormat::Text) => Format::Text,
        _ => Format::Json,
    }
}

fn render_reports(reports: &[Report], format: Format) -> Vec<u8> {
    match format {
        Format::Json => render_json(reports),
        Format::Text => reports
            .iter()
            .map(render_text)
            .collect::<Vec<_>>()
            .join("\n")
            .into_bytes(),
    }
}

#[derive(Serialize)]
struct MineDump<'a> {
    config_echo: MiningConfig,
    params: Vec<&'a ParamVector>,
}

fn mine_text(params: &[&ParamVector]) -> String {
    let mut out = String::from("id\tdirection\ttod\tduration\tkey\tfrequency\tprovider\tboundary\tconference\n");
    for p in params {
        let boundary: Vec<String> = p.boundary.iter().map(u64::to_string).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            p.record_id,
            p.direction.short_name(),
            p.tod,
            p.duration,
            p.frequency_key,
            p.frequency,
            p.provider,
            boundary.join(","),
            p.conference_count
        ));
    }
    out
}

fn parse_clusters(spec: &str) -> Result<Vec<PlantedCluster>> {
    spec.split(',')
        .map(|pair| {
            let (center, spread) = pair
                .split_once(':')
                .ok_or_else(|| anyhow!("cluster `{pair}` is not `center:spread`"))?;
            Ok(PlantedCluster {
                center: center
                    .trim()
                    .parse()
                    .with_context(|| format!("cluster center `{center}`"))?,
                spread: spread
                    .trim()
                    .parse()
                    .with_context(|| format!("cluster spread `{spread}`"))?,
            })
        })
        .collect()
}

fn run_gen(common: &Common, settings: &Settings, args: &GenArgs) -> Result<()> {
    let start = args.span_start.unwrap_or(DEFAULT_SPAN_START);
    let len = args.span_days.map_or(DEFAULT_SPAN_LEN, |d| d * 86_400);
    let profile = GeneratorProfile {
        seed: settings.mining.seed,
        n: args.n,
        contacts: args.contacts,
        planted_clusters: args
            .clusters
            .as_deref()
            .map(parse_clusters)
            .transpose()?
            .unwrap_or_default(),
        conference_rate: args.conference_rate,
        missed_rate: args.missed_rate,
        outgoing_rate: args.outgoing_rate,
        time_span: (start, start + len),
    };
    let records = gen_synthetic(&profile)?;
    let jsonl_path = common
        .out
        .as_ref()
        .and_then(|p| p.extension())
        .is_some_and(|e| e == "jsonl" || e == "ndjson");
    let text = if jsonl_path || common.format == Some(OutputFormat::Json) {
        to_jsonl_string(&records)
    } else {
        to_csv_string(&records)
    };
    emit(common, text.as_bytes())
}

fn run(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    let settings = resolve_settings(common)?;
    let format = format_of(common);
    let now = settings.now();
    match &cli.command {
        Command::Ingest => {
            let (_, records) = load_store(common)?;
            let text = match format {
                Format::Json => to_jsonl_string(&records),
                Format::Text => to_csv_string(&records),
            };
            emit(common, text.as_bytes())
        }
        Command::Mine => {
            let (store, records) = load_store(common)?;
            let params = mine_store(&store, &settings.mining, &settings.table()?)?;
            let params: Vec<&ParamVector> = params.values().collect();
            let bytes = match format {
                Format::Json => render_json(&MineDump {
                    config_echo: settings.mining.resolved(&records),
                    params,
                }),
                Format::Text => mine_text(&params).into_bytes(),
            };
            emit(common, &bytes)
        }
        Command::Report(which) => {
            let (store, _) = load_store(common)?;
            let cfg = &settings.mining;
            let bytes = match which {
                ReportCommand::Freq { mode } => {
                    let mode = match mode {
                        FreqMode::Count => FrequencyMode::Count,
                        FreqMode::Cluster => FrequencyMode::Cluster,
                    };
                    render(&frequency_report(&store, cfg, mode, now)?, format)
                }
                ReportCommand::Calendar { view } => {
                    let view = match view {
                        View::Mv => CalendarView::Month,
                        View::Wv => CalendarView::Week,
                        View::Dv => CalendarView::Day,
                    };
                    render(&calendar_report(&store, cfg, view, now)?, format)
                }
                ReportCommand::Tod { band } => {
                    let params = mine_store(&store, cfg, &settings.table()?)?;
                    let mut reports = tod_report(&store, &params, cfg, now)?;
                    match band {
                        None => render_reports(&reports, format),
                        Some(band) => {
                            let band = match band {
                                Band::Mr => TodBand::Morning,
                                Band::Ar => TodBand::Afternoon,
                                Band::Er => TodBand::Evening,
                            };
                            let idx = TodBand::ALL.iter().position(|b| *b == band).expect("band listed");
                            render(&reports.swap_remove(idx), format)
                        }
                    }
                }
                ReportCommand::Mnp => {
                    let current = settings
                        .current_provider
                        .as_deref()
                        .ok_or_else(|| anyhow!("report mnp needs --current-provider NAME"))?;
                    if settings.provider_table.is_none() {
                        bail!("report mnp needs --provider-table PATH");
                    }
                    render(&mnp_report(&store, &settings.table()?, cfg, current, now)?, format)
                }
            };
            emit(common, &bytes)
        }
        Command::Gen(args) => run_gen(common, &settings, args),
        Command::EvalRelevance => {
            let (text, source) = read_input(common)?;
            let sessions = eval::parse_sessions_str(&text).with_context(|| format!("parsing {source}"))?;
            let summary = summarize(&sessions)?;
            let bytes = match format {
                Format::Json => render_json(&summary),
                Format::Text => format!(
                    "sessions    {}\nmean_cri    {:.4}\nmean_pri    {:.4}\nmean_cii    {:.4}\ncumulative  {:.4}\n",
                    summary.sessions, summary.mean_cri, summary.mean_pri, summary.mean_cii, summary.cumulative
                )
                .into_bytes(),
            };
            emit(common, &bytes)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
