//! Benchmark harness.
//!
//! Every spec is instantiated `repeats` times (seed `base + r`), solved by the
//! DP and, for small `N`, by the brute-force oracle. Records go to a
//! tab-separated file; per-point means and standard errors are derived from
//! the records alone, so re-reading the file reproduces the summary exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Deserialize;

use crate::dp::{dp_solve_with, DpOptions};
use crate::error::{parse_err, Error, Result};
use crate::generators::{generate_instance, repeat_seed, GenSpec, Series, DEFAULT_SEED};
use crate::instance::{Alpha, Instance};
use crate::modelgen::emit_model;
use crate::oracle::brute_solve;
use crate::quantize::QuantizationSpec;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub repeats: usize,
    /// Run the oracle on instances with at most this many vectors (0 disables).
    pub oracle_max_n: usize,
    pub timeout: Option<Duration>,
    pub jobs: usize,
    pub dp: DpOptions,
    pub quant: QuantizationSpec,
    /// Write an LP model per instance into this directory.
    pub model_dir: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            repeats: 6,
            oracle_max_n: 15,
            timeout: None,
            jobs: 1,
            dp: DpOptions::default(),
            quant: QuantizationSpec::default(),
            model_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Timeout,
    Exhausted,
}

impl Status {
    fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::Exhausted => "exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub instance_id: String,
    pub series: Series,
    pub n: usize,
    pub q: usize,
    pub alpha: Alpha,
    pub seed: u64,
    /// Value of the swept parameter (N, q or alpha); N for fixed series.
    pub x: f64,
    pub status: Status,
    /// Optimal cardinality, 0 when infeasible or unsolved.
    pub dp_value: usize,
    /// Milliseconds, rounded to microseconds.
    pub dp_ms: f64,
    pub dp_peak_states: u64,
    pub oracle_value: Option<usize>,
    pub model_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub series: Series,
    pub x: f64,
    pub count: usize,
    pub solved: usize,
    pub mean_ms: f64,
    pub sem_ms: f64,
    pub mean_value: f64,
    pub oracle_checked: usize,
    pub oracle_agree: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<SummaryRow>,
}

fn sweep_x(spec: &GenSpec) -> f64 {
    match spec.series {
        Series::SweepQ => spec.q as f64,
        Series::SweepAlpha => spec.alpha.to_f64(),
        _ => spec.n as f64,
    }
}

fn round_us(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

pub fn run_suite(specs: &[GenSpec], config: &BenchConfig) -> Result<BenchReport> {
    for s in specs {
        s.validate()?;
    }
    let jobs: Vec<(usize, GenSpec)> = specs
        .iter()
        .enumerate()
        .flat_map(|(si, s)| {
            (0..config.repeats).map(move |r| (si, s.clone().with_seed(repeat_seed(s.seed, r))))
        })
        .collect();
    if let Some(dir) = &config.model_dir {
        fs::create_dir_all(dir)?;
    }

    // Warm-up, not recorded.
    if let Some((_, s)) = jobs.first() {
        let tiny = s.clone().with_n(s.n.min(5));
        if let Ok(inst) = generate_instance(&tiny, config.quant) {
            let _ = dp_solve_with(&inst, &config.dp);
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let records = pool.install(|| {
        jobs.par_iter()
            .map(|(si, spec)| run_one(*si, spec, config))
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(&records);
    Ok(BenchReport { records, summary })
}

fn run_one(spec_index: usize, spec: &GenSpec, config: &BenchConfig) -> Result<BenchRecord> {
    let inst = generate_instance(spec, config.quant)?;
    let instance_id = format!(
        "{}-{}-n{}-q{}-a{}-s{}",
        spec_index,
        spec.series,
        spec.n,
        spec.q,
        spec.alpha.to_string().replace('/', "_"),
        spec.seed
    );
    let model_path = match &config.model_dir {
        Some(dir) => {
            let path = dir.join(format!("{instance_id}.lp"));
            fs::write(&path, emit_model(&inst).text)?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let mut opts = config.dp.clone();
    if let Some(t) = config.timeout {
        opts = opts.with_timeout(t);
    }
    let start = Instant::now();
    let result = dp_solve_with(&inst, &opts);
    let dp_ms = round_us(start.elapsed());
    let (status, dp_value, dp_peak_states) = match result {
        Ok((out, stats)) => (Status::Ok, out.cardinality(), stats.peak_states),
        Err(Error::Timeout { .. }) => (Status::Timeout, 0, 0),
        Err(Error::ResourceExhausted { .. }) => (Status::Exhausted, 0, 0),
        Err(e) => return Err(e),
    };
    let oracle_value = if inst.len() <= config.oracle_max_n {
        Some(brute_solve(&inst)?.cardinality())
    } else {
        None
    };
    Ok(BenchRecord {
        instance_id,
        series: spec.series,
        n: inst.len(),
        q: inst.dim(),
        alpha: inst.alpha(),
        seed: spec.seed,
        x: sweep_x(spec),
        status,
        dp_value,
        dp_ms,
        dp_peak_states,
        oracle_value,
        model_path,
    })
}

/// Mean and standard error of the mean (sample standard deviation / sqrt n).
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Groups records by series and swept value, in record order of first
/// appearance of each series and ascending `x`.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Series, u64), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        // Order-preserving key for non-negative finite x.
        groups.entry((r.series, r.x.to_bits())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((series, xbits), rs)| {
            let solved: Vec<&&BenchRecord> = rs.iter().filter(|r| r.status == Status::Ok).collect();
            let times: Vec<f64> = solved.iter().map(|r| r.dp_ms).collect();
            let (mean_ms, sem_ms) = mean_sem(&times);
            let values: Vec<f64> = solved.iter().map(|r| r.dp_value as f64).collect();
            let (mean_value, _) = mean_sem(&values);
            let checked: Vec<&&&BenchRecord> =
                solved.iter().filter(|r| r.oracle_value.is_some()).collect();
            SummaryRow {
                series,
                x: f64::from_bits(xbits),
                count: rs.len(),
                solved: solved.len(),
                mean_ms,
                sem_ms,
                mean_value,
                oracle_checked: checked.len(),
                oracle_agree: checked
                    .iter()
                    .filter(|r| r.oracle_value == Some(r.dp_value))
                    .count(),
            }
        })
        .collect()
}

const RECORD_HEADER: &str = "instance_id\tseries\tN\tq\talpha\tseed\tx\tstatus\tdp_value\tdp_ms\tdp_peak_states\toracle_value\tmodel_path";

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

pub fn records_to_tsv(records: &[BenchRecord]) -> String {
    let mut out = format!("{RECORD_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\t{}\t{}",
            r.instance_id,
            r.series,
            r.n,
            r.q,
            r.alpha,
            r.seed,
            r.x,
            r.status.as_str(),
            r.dp_value,
            r.dp_ms,
            r.dp_peak_states,
            opt(&r.oracle_value),
            opt(&r.model_path),
        );
    }
    out
}

pub fn records_from_tsv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RECORD_HEADER => {}
        _ => return Err(parse_err(1, "unexpected record header")),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let ln = i + 1;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 13 {
            return Err(parse_err(ln, format!("expected 13 fields, found {}", f.len())));
        }
        let bad = |what: &str| parse_err(ln, format!("bad {what}"));
        let num = |s: &str, what: &str| s.parse::<u64>().map_err(|_| bad(what));
        let status = match f[7] {
            "ok" => Status::Ok,
            "timeout" => Status::Timeout,
            "exhausted" => Status::Exhausted,
            _ => return Err(bad("status")),
        };
        out.push(BenchRecord {
            instance_id: f[0].to_string(),
            series: f[1].parse()?,
            n: num(f[2], "N")? as usize,
            q: num(f[3], "q")? as usize,
            alpha: f[4].parse()?,
            seed: num(f[5], "seed")?,
            x: f[6].parse().map_err(|_| bad("x"))?,
            status,
            dp_value: num(f[8], "dp_value")? as usize,
            dp_ms: f[9].parse().map_err(|_| bad("dp_ms"))?,
            dp_peak_states: num(f[10], "dp_peak_states")?,
            oracle_value: match f[11] {
                "-" => None,
                v => Some(num(v, "oracle_value")? as usize),
            },
            model_path: match f[12] {
                "-" => None,
                v => Some(v.to_string()),
            },
        });
    }
    Ok(out)
}

pub fn summary_to_tsv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "series\tx\tcount\tsolved\tmean_ms\tsem_ms\tmean_value\toracle_checked\toracle_agree\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{}\t{}",
            r.series, r.x, r.count, r.solved, r.mean_ms, r.sem_ms, r.mean_value, r.oracle_checked, r.oracle_agree
        );
    }
    out
}

/// Plot data for one series: `x mean_ms sem_ms`.
pub fn plot_data(rows: &[SummaryRow], series: Series) -> String {
    let mut out = String::from("x\tmean_ms\tsem_ms\n");
    for r in rows.iter().filter(|r| r.series == series) {
        let _ = writeln!(out, "{}\t{:.3}\t{:.3}", r.x, r.mean_ms, r.sem_ms);
    }
    out
}

/// Writes `records.tsv`, `summary.tsv` and `plot_<series>.tsv` for each
/// series present. Returns the written paths.
pub fn write_report(dir: &Path, report: &BenchReport) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, body)?;
        paths.push(p);
        Ok(())
    };
    put("records.tsv".into(), records_to_tsv(&report.records))?;
    put("summary.tsv".into(), summary_to_tsv(&report.summary))?;
    let mut series: Vec<Series> = report.summary.iter().map(|r| r.series).collect();
    series.dedup();
    for s in series {
        put(format!("plot_{s}.tsv"), plot_data(&report.summary, s))?;
    }
    Ok(paths)
}

/// A suite file (TOML):
///
/// ```toml
/// repeats = 6
/// oracle_max_n = 15
/// timeout_ms = 60000
/// jobs = 2
/// scale = 100
/// emit_models = false
///
/// [[sweep]]
/// series = "sweepN"
/// values = [5, 10, 15]
/// q = 5
///
/// [[spec]]
/// series = "S2"
/// n = 12
/// q = 3
/// alpha = "1/2"
/// ```
///
/// Sweep `values` are N for `sweepN`, q for `sweepQ` and alpha strings for
/// `sweepAlpha`. Unset fields take the series defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub repeats: Option<usize>,
    pub oracle_max_n: Option<usize>,
    pub timeout_ms: Option<u64>,
    pub jobs: Option<usize>,
    pub scale: Option<u64>,
    pub max_states: Option<u64>,
    pub dense_cell_limit: Option<u64>,
    pub emit_models: Option<bool>,
    #[serde(default)]
    pub sweep: Vec<SweepEntry>,
    #[serde(default)]
    pub spec: Vec<SpecEntry>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecEntry {
    pub series: String,
    pub n: Option<usize>,
    pub q: Option<usize>,
    pub alpha: Option<String>,
    pub seed: Option<u64>,
    pub range: Option<(i64, i64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub series: String,
    pub values: Vec<toml::Value>,
    pub n: Option<usize>,
    pub q: Option<usize>,
    pub alpha: Option<String>,
    pub seed: Option<u64>,
    pub range: Option<(i64, i64)>,
}

fn base_spec(
    series: &str,
    n: Option<usize>,
    q: Option<usize>,
    alpha: &Option<String>,
    seed: Option<u64>,
    range: Option<(i64, i64)>,
) -> Result<GenSpec> {
    let mut s = GenSpec::new(series.parse()?, seed.unwrap_or(DEFAULT_SEED));
    if let Some(n) = n {
        s.n = n;
    }
    if let Some(q) = q {
        s.q = q;
    }
    if let Some(a) = alpha {
        s.alpha = a.parse()?;
    }
    if let Some(r) = range {
        s.int_range = r;
    }
    Ok(s)
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn specs(&self) -> Result<Vec<GenSpec>> {
        let mut out = Vec::new();
        for e in &self.spec {
            out.push(base_spec(&e.series, e.n, e.q, &e.alpha, e.seed, e.range)?);
        }
        for e in &self.sweep {
            let base = base_spec(&e.series, e.n, e.q, &e.alpha, e.seed, e.range)?;
            for v in &e.values {
                let bad = || Error::InvalidSpec(format!("bad {} sweep value {v}", base.series));
                let s = match (base.series, v) {
                    (Series::SweepN, toml::Value::Integer(n)) => {
                        base.clone().with_n(usize::try_from(*n).map_err(|_| bad())?)
                    }
                    (Series::SweepQ, toml::Value::Integer(q)) => {
                        base.clone().with_q(usize::try_from(*q).map_err(|_| bad())?)
                    }
                    (Series::SweepAlpha, toml::Value::String(a)) => base.clone().with_alpha(a.parse()?),
                    (Series::SweepAlpha, toml::Value::Float(a)) => {
                        base.clone().with_alpha(a.to_string().parse()?)
                    }
                    _ => return Err(bad()),
                };
                out.push(s);
            }
        }
        Ok(out)
    }

    pub fn bench_config(&self, out_dir: Option<&Path>) -> Result<BenchConfig> {
        let mut c = BenchConfig::default();
        if let Some(r) = self.repeats {
            c.repeats = r;
        }
        if let Some(m) = self.oracle_max_n {
            c.oracle_max_n = m;
        }
        c.timeout = self.timeout_ms.map(Duration::from_millis);
        if let Some(j) = self.jobs {
            c.jobs = j;
        }
        if let Some(s) = self.scale {
            c.quant = QuantizationSpec::new(s)?;
        }
        if let Some(m) = self.max_states {
            c.dp.max_states = m;
        }
        if let Some(m) = self.dense_cell_limit {
            c.dp.dense_cell_limit = m;
        }
        if self.emit_models.unwrap_or(false) {
            c.model_dir = out_dir.map(|d| d.join("models"));
        }
        Ok(c)
    }
}

/// Re-solves nothing: checks that every record with an oracle value agrees.
pub fn oracle_disagreements(records: &[BenchRecord]) -> Vec<&BenchRecord> {
    records
        .iter()
        .filter(|r| r.status == Status::Ok && r.oracle_value.is_some_and(|v| v != r.dp_value))
        .collect()
}

/// Convenience for tests and the CLI: the generated instance behind a record.
pub fn record_instance(spec: &GenSpec, quant: QuantizationSpec) -> Result<Instance> {
    generate_instance(spec, quant)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite() {
        let rep = run_suite(&[], &BenchConfig::default()).unwrap();
        assert!(rep.records.is_empty());
        assert!(rep.summary.is_empty());
    }

    #[test]
    fn mean_and_sem() {
        let (m, s) = mean_sem(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sample sd = sqrt(5/3), sem = sd / 2
        assert!((s - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(mean_sem(&[7.0]), (7.0, 0.0));
        assert!(mean_sem(&[]).0.is_nan());
    }

    #[test]
    fn config_parsing() {
        let text = r#"
            repeats = 2
            oracle_max_n = 12
            [[sweep]]
            series = "sweepN"
            values = [5, 8]
            q = 2
            [[sweep]]
            series = "sweepAlpha"
            values = ["1/10", "9/10", 0.5]
            n = 10
            q = 2
            [[spec]]
            series = "S2"
            n = 6
            q = 1
            alpha = "1/2"
            seed = 3
        "#;
        let cfg = SuiteConfig::parse(text).unwrap();
        let specs = cfg.specs().unwrap();
        assert_eq!(specs.len(), 6);
        assert_eq!(specs[0].series, Series::S2);
        assert_eq!(specs[0].seed, 3);
        assert_eq!(specs[1].n, 5);
        assert_eq!(specs[2].n, 8);
        assert_eq!(specs[5].alpha, Alpha::new(1, 2).unwrap());
        let bc = cfg.bench_config(None).unwrap();
        assert_eq!((bc.repeats, bc.oracle_max_n), (2, 12));

        assert!(SuiteConfig::parse("bogus = 1").is_err());
        let bad = SuiteConfig::parse("[[sweep]]\nseries = \"sweepQ\"\nvalues = [\"x\"]\n").unwrap();
        assert!(bad.specs().is_err());
    }

    #[test]
    fn timeouts_are_recorded() {
        let spec = GenSpec::new(Series::S2, 1).with_n(12).with_q(2);
        let cfg = BenchConfig {
            repeats: 1,
            timeout: Some(Duration::ZERO),
            ..Default::default()
        };
        let rep = run_suite(&[spec], &cfg).unwrap();
        assert_eq!(rep.records[0].status, Status::Timeout);
        assert_eq!(rep.summary[0].solved, 0);
    }
}
