//! Seeded instance families.
//!
//! * `S1`: real coordinates uniform on `[-1, 1]`, quantized before solving.
//! * `S2`: integer coordinates uniform on `[-5, 5]`.
//! * `sweepN`, `sweepQ`, `sweepAlpha`: S2-style data with one parameter
//!   swept (N over `5..=1000`, q over `1..=7`, alpha over `[1/10, 9/10]`);
//!   the others default to `N = 1000`, `q = 5`, `alpha = 1/10`.
//! * `priceIngest`: hourly price profiles, one vector per grid node.
//!
//! Generation is a pure function of the spec: a ChaCha8 stream seeded with
//! `seed` draws coordinates row by row, so equal specs give identical data
//! on every platform, and specs differing only in `alpha` share their vectors.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::format::RealInstance;
use crate::instance::{Alpha, Instance};
use crate::quantize::{quantize_real, QuantizationSpec};

/// Base seed of the benchmark suites unless a config overrides it.
pub const DEFAULT_SEED: u64 = 20160101;

/// Seed of the `r`-th repetition of a spec with base seed `base`.
pub fn repeat_seed(base: u64, r: usize) -> u64 {
    base.wrapping_add(r as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    S1,
    S2,
    SweepN,
    SweepQ,
    SweepAlpha,
    PriceIngest,
}

impl Series {
    pub fn name(&self) -> &'static str {
        match self {
            Series::S1 => "S1",
            Series::S2 => "S2",
            Series::SweepN => "sweepN",
            Series::SweepQ => "sweepQ",
            Series::SweepAlpha => "sweepAlpha",
            Series::PriceIngest => "priceIngest",
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "s1" => Series::S1,
            "s2" => Series::S2,
            "sweepn" | "s4" => Series::SweepN,
            "sweepq" | "s5" => Series::SweepQ,
            "sweepalpha" | "s6" => Series::SweepAlpha,
            "priceingest" | "prices" | "s3" => Series::PriceIngest,
            _ => return Err(Error::InvalidSpec(format!("unknown series `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub series: Series,
    pub n: usize,
    pub q: usize,
    pub alpha: Alpha,
    pub seed: u64,
    /// Coordinate range for integer series.
    pub int_range: (i64, i64),
    /// Coordinate range for `S1`.
    pub real_range: (f64, f64),
}

impl GenSpec {
    /// Full-scale defaults for `series`: `N = 1000`, `q = 5`, `alpha = 1/10`
    /// (prices: 43 nodes over 24 hours).
    pub fn new(series: Series, seed: u64) -> Self {
        let (n, q) = match series {
            Series::PriceIngest => (43, 24),
            _ => (1000, 5),
        };
        Self {
            series,
            n,
            q,
            alpha: Alpha::new(1, 10).expect("valid"),
            seed,
            int_range: (-5, 5),
            real_range: (-1.0, 1.0),
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_q(mut self, q: usize) -> Self {
        self.q = q;
        self
    }

    pub fn with_alpha(mut self, alpha: Alpha) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n == 0 || self.q == 0 {
            return bad("N and q must be positive".into());
        }
        let (lo, hi) = self.int_range;
        if lo > hi {
            return bad(format!("empty integer range [{lo}, {hi}]"));
        }
        let (rlo, rhi) = self.real_range;
        if !(rlo.is_finite() && rhi.is_finite() && rlo <= rhi) {
            return bad(format!("bad real range [{rlo}, {rhi}]"));
        }
        match self.series {
            Series::S1 if rlo < -1.0 || rhi > 1.0 => {
                bad(format!("S1 coordinates must lie in [-1, 1], got [{rlo}, {rhi}]"))
            }
            Series::S2 if lo < -5 || hi > 5 => {
                bad(format!("S2 coordinates must lie in [-5, 5], got [{lo}, {hi}]"))
            }
            Series::SweepN if !(5..=1000).contains(&self.n) => {
                bad(format!("sweepN needs N in 5..=1000, got {}", self.n))
            }
            Series::SweepQ if !(1..=7).contains(&self.q) => {
                bad(format!("sweepQ needs q in 1..=7, got {}", self.q))
            }
            Series::SweepAlpha
                if (self.alpha.num() as u128 * 10) < self.alpha.den() as u128
                    || (self.alpha.num() as u128 * 10) > 9 * self.alpha.den() as u128 =>
            {
                bad(format!("sweepAlpha needs alpha in [1/10, 9/10], got {}", self.alpha))
            }
            _ => Ok(()),
        }
    }

    fn meta(&self) -> String {
        format!(
            "series={} seed={} N={} q={} alpha={}",
            self.series, self.seed, self.n, self.q, self.alpha
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Integer(Instance),
    Real(RealInstance),
}

pub fn generate(spec: &GenSpec) -> Result<Generated> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.series {
        Series::S1 => {
            let (lo, hi) = spec.real_range;
            let vectors = (0..spec.n)
                .map(|_| (0..spec.q).map(|_| rng.random_range(lo..=hi)).collect())
                .collect();
            Ok(Generated::Real(RealInstance::new(vectors, spec.alpha, spec.meta())?))
        }
        Series::PriceIngest => {
            let table = synthetic_price_table(spec.q, spec.n, spec.seed);
            let inst = table.to_instance(spec.alpha, QuantizationSpec::default())?;
            Ok(Generated::Integer(inst.with_meta(spec.meta())))
        }
        _ => {
            let (lo, hi) = spec.int_range;
            let vectors = (0..spec.n)
                .map(|_| (0..spec.q).map(|_| rng.random_range(lo..=hi)).collect())
                .collect();
            Ok(Generated::Integer(Instance::new(vectors, spec.alpha, spec.meta())?))
        }
    }
}

/// Like [`generate`], with real-valued output routed through the quantizer.
pub fn generate_instance(spec: &GenSpec, quant: QuantizationSpec) -> Result<Instance> {
    match generate(spec)? {
        Generated::Integer(i) => Ok(i),
        Generated::Real(r) => quantize_real(&r, quant),
    }
}

/// Hourly prices: one column per node, one row per hour.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    pub nodes: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl PriceTable {
    pub fn hours(&self) -> usize {
        self.rows.len()
    }

    /// Node `m` becomes the vector of its prices over all hours.
    pub fn to_instance(&self, alpha: Alpha, spec: QuantizationSpec) -> Result<Instance> {
        let vectors: Vec<Vec<f64>> = (0..self.nodes.len())
            .map(|m| self.rows.iter().map(|r| r[m]).collect())
            .collect();
        let real = RealInstance::new(vectors, alpha, "")?;
        let inst = quantize_real(&real, spec)?;
        let meta = format!("prices hours={} nodes={} {}", self.hours(), self.nodes.len(), inst.meta());
        Ok(inst.with_meta(meta))
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.nodes.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Reads a price CSV: a header of node identifiers, then one row per hour.
pub fn parse_price_table(text: &str) -> Result<PriceTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let nodes: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if nodes.is_empty() || nodes.iter().all(String::is_empty) {
        return Err(parse_err(1, "missing header of node identifiers"));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != nodes.len() {
            return Err(parse_err(line, format!("expected {} cells, found {}", nodes.len(), rec.len())));
        }
        let row = rec
            .iter()
            .map(|cell| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| parse_err(line, format!("bad price `{cell}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(2, "no price rows"));
    }
    Ok(PriceTable { nodes, rows })
}

/// Parses a price CSV and turns each node's price profile into a vector.
pub fn ingest_prices(csv_text: &str, alpha: Alpha, spec: QuantizationSpec) -> Result<Instance> {
    parse_price_table(csv_text)?.to_instance(alpha, spec)
}

/// Synthetic `hours x nodes` price table: a shared daily shape, a per-node
/// level and noise, rounded to cents.
pub fn synthetic_price_table(hours: usize, nodes: usize, seed: u64) -> PriceTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels: Vec<f64> = (0..nodes).map(|_| rng.random_range(20.0..40.0)).collect();
    let rows = (0..hours)
        .map(|h| {
            let phase = (h as f64 / 24.0) * std::f64::consts::TAU;
            let shape = 8.0 * (phase - 2.0).sin();
            levels
                .iter()
                .map(|&l| {
                    let noise: f64 = rng.random_range(-3.0..3.0);
                    ((l + shape + noise) * 100.0).round() / 100.0
                })
                .collect()
        })
        .collect();
    PriceTable {
        nodes: (1..=nodes).map(|m| format!("node{m}")).collect(),
        rows,
    }
}
