//! Text formats for instances.
//!
//! Integer instance:
//!
//! ```text
//! mcsv 1 <N> <q> <alpha_num>/<alpha_den>
//! <q signed integers>      (N lines)
//! # meta: <free text>      (optional trailer)
//! ```
//!
//! Real-valued vectors use the same layout with the `mcsv-real` tag and
//! decimal coordinates. Only blank lines and `#` comment lines may follow
//! the data rows.

use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::instance::{Alpha, Instance};

const INT_TAG: &str = "mcsv";
const REAL_TAG: &str = "mcsv-real";
const VERSION: &str = "1";

/// Real-valued vectors awaiting quantization.
#[derive(Debug, Clone, PartialEq)]
pub struct RealInstance {
    pub vectors: Vec<Vec<f64>>,
    pub alpha: Alpha,
    pub meta: String,
}

impl RealInstance {
    pub fn new(vectors: Vec<Vec<f64>>, alpha: Alpha, meta: impl Into<String>) -> Result<Self> {
        let dim = vectors.first().map(Vec::len).unwrap_or(0);
        if vectors.is_empty() || dim == 0 {
            return Err(Error::InvalidInstance("need at least one non-empty vector".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidInstance(format!(
                    "vector {i} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            if let Some(&x) = v.iter().find(|x| !x.is_finite()) {
                return Err(Error::NonFinite(x));
            }
        }
        Ok(Self {
            vectors,
            alpha,
            meta: meta.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }
}

struct Parsed<T> {
    rows: Vec<Vec<T>>,
    alpha: Alpha,
    comments: Vec<String>,
}

fn parse_generic<T>(
    text: &str,
    tag: &str,
    parse_coord: impl Fn(&str) -> Option<T>,
) -> Result<Parsed<T>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != tag || fields[1] != VERSION {
        return Err(parse_err(
            1,
            format!("expected header `{tag} {VERSION} <N> <q> <num>/<den>`"),
        ));
    }
    let n: usize = fields[2]
        .parse()
        .map_err(|_| parse_err(1, format!("bad vector count `{}`", fields[2])))?;
    let q: usize = fields[3]
        .parse()
        .map_err(|_| parse_err(1, format!("bad dimension `{}`", fields[3])))?;
    if n == 0 || q == 0 {
        return Err(parse_err(1, "N and q must be positive"));
    }
    let (an, ad) = fields[4]
        .split_once('/')
        .ok_or_else(|| parse_err(1, "alpha must be written as num/den"))?;
    let alpha = match (an.parse::<u64>(), ad.parse::<u64>()) {
        (Ok(a), Ok(b)) => Alpha::new(a, b).map_err(|e| parse_err(1, e.to_string()))?,
        _ => return Err(parse_err(1, format!("bad alpha `{}`", fields[4]))),
    };

    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {n} vectors, found {}", rows.len())))?;
        let row = line
            .split_whitespace()
            .map(|tok| parse_coord(tok).ok_or_else(|| parse_err(ln, format!("bad coordinate `{tok}`"))))
            .collect::<Result<Vec<T>>>()?;
        if row.len() != q {
            return Err(parse_err(ln, format!("expected {q} coordinates, found {}", row.len())));
        }
        rows.push(row);
    }

    let mut comments = Vec::new();
    for (ln, line) in lines {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t.strip_prefix('#') {
            Some(c) => comments.push(c.trim().to_string()),
            None => return Err(parse_err(ln, "trailing data after the last vector")),
        }
    }
    Ok(Parsed {
        rows,
        alpha,
        comments,
    })
}

/// Value of a `# key: value` trailer comment, if present.
pub fn trailer_value<'a>(comments: &'a [String], key: &str) -> Option<&'a str> {
    comments.iter().find_map(|c| {
        let (k, v) = c.split_once(':')?;
        (k.trim() == key).then(|| v.trim())
    })
}

/// Parses an integer instance, returning it with all trailer comments.
pub fn parse_instance_with_comments(text: &str) -> Result<(Instance, Vec<String>)> {
    let p = parse_generic(text, INT_TAG, |t| t.parse::<i64>().ok())?;
    let meta = trailer_value(&p.comments, "meta").unwrap_or("").to_string();
    let inst = Instance::new(p.rows, p.alpha, meta)?;
    Ok((inst, p.comments))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_instance_with_comments(text).map(|(i, _)| i)
}

pub fn write_instance(inst: &Instance) -> String {
    let mut out = format!("{INT_TAG} {VERSION} {} {} {}\n", inst.len(), inst.dim(), inst.alpha());
    for v in inst.vectors() {
        push_row(&mut out, v);
    }
    push_meta(&mut out, inst.meta());
    out
}

pub fn parse_real(text: &str) -> Result<RealInstance> {
    let p = parse_generic(text, REAL_TAG, |t| t.parse::<f64>().ok().filter(|x| x.is_finite()))?;
    let meta = trailer_value(&p.comments, "meta").unwrap_or("").to_string();
    RealInstance::new(p.rows, p.alpha, meta)
}

/// Coordinates are written in shortest round-trip form.
pub fn write_real(real: &RealInstance) -> String {
    let mut out = format!(
        "{REAL_TAG} {VERSION} {} {} {}\n",
        real.vectors.len(),
        real.dim(),
        real.alpha
    );
    for v in &real.vectors {
        push_row(&mut out, v);
    }
    push_meta(&mut out, &real.meta);
    out
}

fn push_row<T: std::fmt::Display>(out: &mut String, row: &[T]) {
    for (j, c) in row.iter().enumerate() {
        if j > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{c}");
    }
    out.push('\n');
}

fn push_meta(out: &mut String, meta: &str) {
    if !meta.is_empty() {
        let flat = meta.replace(['\n', '\r'], " ");
        let _ = writeln!(out, "# meta: {flat}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_canonical_file() {
        let text = "mcsv 1 2 3 1/2\n1 1 1\n-1 -1 -1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.len(), 2);
        assert_eq!(inst.dim(), 3);
        assert_eq!(inst.vector(1), &[-1, -1, -1]);
        assert_eq!(write_instance(&inst), text);
    }

    #[test]
    fn meta_and_comments_survive() {
        let text = "mcsv 1 1 2 1/10\n3 4\n# meta: series=S2 seed=7\n# truth: feasible\n\n";
        let (inst, comments) = parse_instance_with_comments(text).unwrap();
        assert_eq!(inst.meta(), "series=S2 seed=7");
        assert_eq!(trailer_value(&comments, "truth"), Some("feasible"));
        assert_eq!(
            write_instance(&inst),
            "mcsv 1 1 2 1/10\n3 4\n# meta: series=S2 seed=7\n"
        );
    }

    #[test]
    fn rejects_malformed_input() {
        let cases = [
            "",
            "mcsv 2 1 1 1/2\n0\n",
            "mcsv 1 1 1 0.5\n0\n",
            "mcsv 1 1 1 1/1\n0\n",
            "mcsv 1 2 1 1/2\n0\n",
            "mcsv 1 1 2 1/2\n0\n",
            "mcsv 1 1 1 1/2\n0 0\n",
            "mcsv 1 1 1 1/2\nNaN\n",
            "mcsv 1 1 1 1/2\n1.5\n",
            "mcsv 1 1 1 1/2\n0\n7\n",
            "mcsv 1 1 1 1/2\n0\ngarbage # x\n",
            "mcsv 1 0 1 1/2\n",
            "mcsv-real 1 1 1 1/2\n0.5\n",
        ];
        for c in cases {
            assert!(parse_instance(c).is_err(), "accepted {c:?}");
        }
    }

    #[test]
    fn real_roundtrip_and_rejects_nan() {
        let text = "mcsv-real 1 2 2 1/10\n0.25 -0.15\n1 -1\n";
        let r = parse_real(text).unwrap();
        assert_eq!(r.vectors[0], vec![0.25, -0.15]);
        assert_eq!(write_real(&r), text);
        assert!(parse_real("mcsv-real 1 1 1 1/2\nnan\n").is_err());
        assert!(parse_real("mcsv-real 1 1 1 1/2\ninf\n").is_err());
    }
}
