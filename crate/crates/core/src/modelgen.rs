//! Boolean quadratically constrained model in CPLEX LP format.
//!
//! ```text
//! maximize    sum_i x_i
//! subject to  sum_j (sum_i y_i^(j) x_i)^2 <= T sum_i x_i,   T = alpha ||sum Y||^2 / N
//!             x_i in {0, 1}
//! ```
//!
//! Emitted grammar (one model per file):
//!
//! ```text
//! \ comment lines
//! Maximize
//!  obj: x1 + x2 + ... + xN
//! Subject To
//!  spread: <linear terms> + [ <quadratic terms> ] <= 0
//! Binary
//!  x1 x2 ... xN
//! End
//! ```
//!
//! The quadratic part expands the square: `G_ii x_i ^ 2` on the diagonal and
//! `2 G_ik x_i * x_k` for `i < k`, with `G` the Gram matrix of the vectors.
//! The linear part is `-T x_i`. When `T` has a terminating decimal expansion
//! it is written as that decimal; otherwise the whole constraint is multiplied
//! by the denominator of `T` so every coefficient is an integer, and the
//! fraction is recorded in a comment. Long expressions wrap across lines.
//!
//! `x = 0` satisfies the constraint with objective 0, while the empty subset
//! is not a solution of the set formulation; a model optimum of 0 therefore
//! means the instance is infeasible.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{parse_err, Error, Result};
use crate::instance::{Instance, Solution, SolveOutcome};

const WRAP: usize = 78;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFile {
    pub text: String,
    /// `var_names[i]` is the variable for input vector `i`.
    pub var_names: Vec<String>,
}

pub fn var_name(i: usize) -> String {
    format!("x{}", i + 1)
}

/// Exact decimal expansion of `num/den` (den > 0) if it terminates.
fn terminating_decimal(num: i128, den: i128) -> Option<String> {
    let mut d = den;
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return None;
    }
    let places = twos.max(fives);
    let scaled = num.checked_mul(10i128.checked_pow(places)? / den)?;
    if places == 0 {
        return Some(scaled.to_string());
    }
    let digits = format!("{:0>width$}", scaled.unsigned_abs(), width = places as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - places as usize);
    let sign = if scaled < 0 { "-" } else { "" };
    Some(format!("{sign}{int}.{frac}"))
}

struct Wrapped {
    out: String,
    line: usize,
}

impl Wrapped {
    fn push(&mut self, piece: &str) {
        if self.line + piece.len() + 1 > WRAP && self.line > 1 {
            self.out.push_str("\n ");
            self.line = 1;
        }
        self.out.push(' ');
        self.out.push_str(piece);
        self.line += piece.len() + 1;
    }
}

fn signed_term(first: bool, coef: &str, body: &str) -> String {
    let (neg, mag) = match coef.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, coef),
    };
    let sign = match (first, neg) {
        (true, false) => "",
        (true, true) => "- ",
        (false, false) => "+ ",
        (false, true) => "- ",
    };
    if mag == "1" {
        format!("{sign}{body}")
    } else {
        format!("{sign}{mag} {body}")
    }
}

pub fn emit_model(inst: &Instance) -> ModelFile {
    let n = inst.len();
    let names: Vec<String> = (0..n).map(var_name).collect();
    let t = inst.threshold();

    let (lin_coef, quad_scale, note) = match terminating_decimal(t.numerator, t.denominator) {
        Some(dec) => (format!("-{dec}"), 1i128, format!("T = {dec}")),
        None => (
            format!("-{}", t.numerator),
            t.denominator,
            format!(
                "T = {}/{}; constraint multiplied by {}",
                t.numerator, t.denominator, t.denominator
            ),
        ),
    };

    let mut text = String::new();
    let _ = writeln!(text, "\\ Maximum cardinality subset of vectors");
    let _ = writeln!(text, "\\ N = {}, q = {}, alpha = {}", n, inst.dim(), inst.alpha());
    if !inst.meta().is_empty() {
        let _ = writeln!(text, "\\ meta: {}", inst.meta().replace(['\n', '\r'], " "));
    }
    let _ = writeln!(text, "\\ {note}");

    text.push_str("Maximize\n");
    let mut w = Wrapped { out: text, line: 0 };
    w.push("obj:");
    for (i, name) in names.iter().enumerate() {
        w.push(&signed_term(i == 0, "1", name));
    }
    w.out.push_str("\nSubject To\n");
    w.line = 0;
    w.push("spread:");

    let mut first = true;
    if t.numerator != 0 {
        for name in &names {
            w.push(&signed_term(first, &lin_coef, name));
            first = false;
        }
    }
    let mut quad = Vec::new();
    for i in 0..n {
        for k in i..n {
            let g: i128 = inst
                .vector(i)
                .iter()
                .zip(inst.vector(k))
                .map(|(&a, &b)| a as i128 * b as i128)
                .sum();
            let coef = if i == k { g } else { 2 * g } * quad_scale;
            if coef != 0 {
                let body = if i == k {
                    format!("{} ^ 2", names[i])
                } else {
                    format!("{} * {}", names[i], names[k])
                };
                quad.push((coef, body));
            }
        }
    }
    if !quad.is_empty() {
        w.push(if first { "[" } else { "+ [" });
        for (j, (coef, body)) in quad.iter().enumerate() {
            w.push(&signed_term(j == 0, &coef.to_string(), body));
        }
        w.push("]");
        first = false;
    }
    if first {
        w.push(&format!("0 {}", names[0]));
    }
    w.push("<= 0");
    w.out.push_str("\nBinary\n");
    w.line = 0;
    for name in &names {
        w.push(name);
    }
    w.out.push_str("\nEnd\n");

    ModelFile {
        text: w.out,
        var_names: names,
    }
}

/// A model in the emitted LP subset: linear objective, one quadratic
/// constraint `linear + quadratic <= rhs`, binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub objective: BTreeMap<String, BigRational>,
    pub linear: BTreeMap<String, BigRational>,
    pub quadratic: BTreeMap<(String, String), BigRational>,
    pub rhs: BigRational,
    pub binaries: Vec<String>,
}

impl LpModel {
    pub fn objective_value(&self, value: &dyn Fn(&str) -> bool) -> BigRational {
        self.objective
            .iter()
            .filter(|(v, _)| value(v))
            .fold(BigRational::zero(), |acc, (_, c)| acc + c)
    }

    /// Whether the 0/1 assignment satisfies the constraint, exactly.
    pub fn constraint_holds(&self, value: &dyn Fn(&str) -> bool) -> bool {
        let mut lhs = BigRational::zero();
        for (v, c) in &self.linear {
            if value(v) {
                lhs += c;
            }
        }
        for ((a, b), c) in &self.quadratic {
            if value(a) && value(b) {
                lhs += c;
            }
        }
        lhs <= self.rhs
    }
}

fn parse_number(tok: &str, line: usize) -> Result<BigRational> {
    let bad = || parse_err(line, format!("bad coefficient `{tok}`"));
    let (int, frac) = tok.split_once('.').unwrap_or((tok, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(digits, den))
}

fn is_var(tok: &str) -> bool {
    tok.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

/// Reads the LP subset produced by [`emit_model`].
pub fn parse_lp(text: &str) -> Result<LpModel> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Objective,
        Constraint,
        Binary,
        End,
    }
    let mut section = Section::None;
    let mut obj_tokens = Vec::new();
    let mut con_tokens = Vec::new();
    let mut binaries = Vec::new();
    for (ln, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.to_ascii_lowercase().as_str() {
            "maximize" => section = Section::Objective,
            "subject to" => section = Section::Constraint,
            "binary" | "binaries" => section = Section::Binary,
            "end" => section = Section::End,
            _ => {
                let toks = line.split_whitespace().map(|t| (ln, t.to_string()));
                match section {
                    Section::Objective => obj_tokens.extend(toks),
                    Section::Constraint => con_tokens.extend(toks),
                    Section::Binary => binaries.extend(toks.map(|(_, t)| t)),
                    Section::None | Section::End => {
                        return Err(parse_err(ln, "text outside a section"))
                    }
                }
            }
        }
    }
    if section != Section::End {
        return Err(parse_err(0, "missing End"));
    }

    let objective = parse_linear_expr(&obj_tokens, "obj:")?;
    let (ln_rel, rel) = con_tokens
        .iter()
        .rposition(|(_, t)| t == "<=")
        .map(|p| (con_tokens[p].0, p))
        .ok_or_else(|| parse_err(0, "constraint needs `<= rhs`"))?;
    let rhs_toks = &con_tokens[rel + 1..];
    if rhs_toks.len() != 1 {
        return Err(parse_err(ln_rel, "right-hand side must be one number"));
    }
    let rhs_tok = &rhs_toks[0].1;
    let rhs = match rhs_tok.strip_prefix('-') {
        Some(m) => -parse_number(m, ln_rel)?,
        None => parse_number(rhs_tok, ln_rel)?,
    };

    let body = &con_tokens[..rel];
    let open = body.iter().position(|(_, t)| t == "[");
    let close = body.iter().position(|(_, t)| t == "]");
    let (lin_part, quad_part) = match (open, close) {
        (Some(o), Some(c)) if o < c => {
            // A `+` before `[` belongs to the bracket.
            let lin_end = if o > 0 && body[o - 1].1 == "+" { o - 1 } else { o };
            (&body[..lin_end], Some(&body[o + 1..c]))
        }
        (None, None) => (body, None),
        _ => return Err(parse_err(ln_rel, "unbalanced brackets")),
    };
    let linear = parse_linear_expr(lin_part, "spread:")?;
    let mut quadratic = BTreeMap::new();
    if let Some(q) = quad_part {
        for (coef, vars) in parse_terms(q)? {
            let key = match vars.as_slice() {
                [a, b] => (a.clone(), b.clone()),
                _ => return Err(parse_err(ln_rel, "linear term inside brackets")),
            };
            let e = quadratic.entry(key).or_insert_with(BigRational::zero);
            *e += coef;
        }
    }
    Ok(LpModel {
        objective,
        linear,
        quadratic,
        rhs,
        binaries,
    })
}

fn parse_linear_expr(tokens: &[(usize, String)], label: &str) -> Result<BTreeMap<String, BigRational>> {
    let tokens = match tokens.first() {
        Some((_, t)) if t == label => &tokens[1..],
        Some((ln, t)) => return Err(parse_err(*ln, format!("expected `{label}`, found `{t}`"))),
        None => return Err(parse_err(0, format!("missing `{label}`"))),
    };
    let mut out = BTreeMap::new();
    for (coef, vars) in parse_terms(tokens)? {
        if vars.len() != 1 {
            return Err(parse_err(0, "quadratic term outside brackets"));
        }
        let e = out.entry(vars[0].clone()).or_insert_with(BigRational::zero);
        *e += coef;
    }
    Ok(out)
}

/// Terms like `- 3 x1`, `+ x2`, `4 x1 ^ 2`, `- 2 x1 * x3`. Each returns its
/// signed coefficient and one (linear or squared) or two variables.
fn parse_terms(tokens: &[(usize, String)]) -> Result<Vec<(BigRational, Vec<String>)>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let ln = tokens[i].0;
        let mut sign = BigRational::from_integer(BigInt::from(1));
        if tokens[i].1 == "+" || tokens[i].1 == "-" {
            if tokens[i].1 == "-" {
                sign = -sign;
            }
            i += 1;
        }
        let tok = tokens.get(i).ok_or_else(|| parse_err(ln, "dangling sign"))?;
        let coef = if is_var(&tok.1) {
            sign
        } else {
            i += 1;
            sign * parse_number(&tok.1, tok.0)?
        };
        let var = tokens.get(i).ok_or_else(|| parse_err(ln, "coefficient without variable"))?;
        if !is_var(&var.1) {
            return Err(parse_err(var.0, format!("expected variable, found `{}`", var.1)));
        }
        let mut vars = vec![var.1.clone()];
        i += 1;
        match tokens.get(i).map(|t| t.1.as_str()) {
            Some("^") => {
                if tokens.get(i + 1).map(|t| t.1.as_str()) != Some("2") {
                    return Err(parse_err(ln, "only squares are supported"));
                }
                vars.push(var.1.clone());
                i += 2;
            }
            Some("*") => {
                let other = tokens.get(i + 1).ok_or_else(|| parse_err(ln, "dangling `*`"))?;
                vars.push(other.1.clone());
                i += 2;
            }
            _ => {}
        }
        out.push((coef, vars));
    }
    Ok(out)
}

/// Reads variable assignments from a solver's solution output.
///
/// Any line containing a token `x<k>` is taken as an assignment, with the
/// value in the next token (an optional `=` is skipped). This covers
/// `x1 1`, `x1 = 1` and column listings such as `0 x1 1 1`. Lines starting
/// with `#` or `\` are comments. Variables that never appear are 0.
pub fn parse_solver_solution(text: &str, inst: &Instance) -> Result<SolveOutcome> {
    let n = inst.len();
    let mut values: Vec<Option<bool>> = vec![None; n];
    let mut seen_any = false;
    for (ln, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() || line.starts_with('#') || line.starts_with('\\') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(pos) = toks.iter().position(|t| {
            t.strip_prefix('x')
                .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        }) else {
            continue;
        };
        let k: usize = toks[pos][1..]
            .parse()
            .map_err(|_| parse_err(ln, "bad variable index"))?;
        if k == 0 || k > n {
            return Err(parse_err(ln, format!("variable x{k} outside x1..x{n}")));
        }
        let mut vt = pos + 1;
        if toks.get(vt) == Some(&"=") {
            vt += 1;
        }
        let raw = toks
            .get(vt)
            .ok_or_else(|| parse_err(ln, format!("no value for x{k}")))?;
        let v: f64 = raw
            .parse()
            .map_err(|_| parse_err(ln, format!("bad value `{raw}`")))?;
        let bit = if (v - 1.0).abs() <= 1e-6 {
            true
        } else if v.abs() <= 1e-6 {
            false
        } else {
            return Err(parse_err(ln, format!("x{k} = {raw} is not binary")));
        };
        match values[k - 1] {
            Some(prev) if prev != bit => {
                return Err(parse_err(ln, format!("conflicting values for x{k}")))
            }
            _ => values[k - 1] = Some(bit),
        }
        seen_any = true;
    }
    if !seen_any {
        return Err(parse_err(0, "no variable assignments found"));
    }
    let selected: Vec<usize> = (0..n).filter(|&i| values[i] == Some(true)).collect();
    let sol = Solution::new(inst, &selected)?;
    if !inst.sum_is_feasible(sol.sum(), sol.cardinality()) {
        return Err(Error::Solution(format!(
            "assignment of {} vectors violates the bound (solver tolerance?)",
            sol.cardinality()
        )));
    }
    Ok(SolveOutcome::Feasible(sol))
}

/// Checks a model's coefficients against the instance it was built from:
/// the constraint, scaled by its positive factor, must equal
/// `G - T diag(1)` in expanded form.
pub fn model_matches(model: &LpModel, inst: &Instance) -> bool {
    let t = inst.threshold();
    let t = BigRational::new(BigInt::from(t.numerator), BigInt::from(t.denominator));
    let n = inst.len();
    let gram = |i: usize, k: usize| -> BigRational {
        let g: i128 = inst
            .vector(i)
            .iter()
            .zip(inst.vector(k))
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        BigRational::from_integer(BigInt::from(g))
    };
    // Recover the scale from any non-zero coefficient.
    let mut scale: Option<BigRational> = None;
    let mut check = |got: BigRational, want: BigRational| -> bool {
        if want.is_zero() {
            return got.is_zero();
        }
        let s = got / want;
        match &scale {
            None => {
                let ok = s.is_positive();
                scale = Some(s);
                ok
            }
            Some(prev) => *prev == s,
        }
    };
    let zero = BigRational::zero();
    for i in 0..n {
        let name = var_name(i);
        let lin = model.linear.get(&name).cloned().unwrap_or_else(|| zero.clone());
        if !check(lin, -t.clone()) {
            return false;
        }
        for k in i..n {
            let key = if i == k {
                (name.clone(), name.clone())
            } else {
                (name.clone(), var_name(k))
            };
            let got = model.quadratic.get(&key).cloned().unwrap_or_else(|| zero.clone());
            let want = if i == k { gram(i, i) } else { gram(i, k) * BigInt::from(2) };
            if !check(got, want) {
                return false;
            }
        }
    }
    model.rhs.is_zero()
        && model.binaries.len() == n
        && model.objective.len() == n
        && model.objective.values().all(|c| *c == BigRational::from_integer(BigInt::from(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Alpha;

    fn inst(v: Vec<Vec<i64>>, a: (u64, u64)) -> Instance {
        Instance::new(v, Alpha::new(a.0, a.1).unwrap(), "").unwrap()
    }

    #[test]
    fn decimals() {
        assert_eq!(terminating_decimal(5, 2).as_deref(), Some("2.5"));
        assert_eq!(terminating_decimal(0, 1).as_deref(), Some("0"));
        assert_eq!(terminating_decimal(7, 1).as_deref(), Some("7"));
        assert_eq!(terminating_decimal(1, 40).as_deref(), Some("0.025"));
        assert_eq!(terminating_decimal(-3, 8).as_deref(), Some("-0.375"));
        assert_eq!(terminating_decimal(8, 9), None);
    }

    #[test]
    fn zero_vector_model() {
        let m = emit_model(&inst(vec![vec![0]], (1, 2)));
        assert_eq!(
            m.text,
            "\\ Maximum cardinality subset of vectors\n\
             \\ N = 1, q = 1, alpha = 1/2\n\
             \\ T = 0\n\
             Maximize\n obj: x1\n\
             Subject To\n spread: 0 x1 <= 0\n\
             Binary\n x1\n\
             End\n"
        );
        let lp = parse_lp(&m.text).unwrap();
        assert!(lp.constraint_holds(&|_| true));
        assert_eq!(m.var_names, vec!["x1"]);
    }

    #[test]
    fn antipodal_pair_golden() {
        let m = emit_model(&inst(vec![vec![1, 1, 1], vec![-1, -1, -1]], (1, 2)));
        assert_eq!(
            m.text,
            "\\ Maximum cardinality subset of vectors\n\
             \\ N = 2, q = 3, alpha = 1/2\n\
             \\ T = 0\n\
             Maximize\n obj: x1 + x2\n\
             Subject To\n spread: [ 3 x1 ^ 2 - 6 x1 * x2 + 3 x2 ^ 2 ] <= 0\n\
             Binary\n x1 x2\n\
             End\n"
        );
    }

    #[test]
    fn fractional_threshold_is_scaled() {
        // T = 8/9
        let i = inst(vec![vec![1, 0], vec![0, 1], vec![1, 1]], (1, 3));
        let m = emit_model(&i);
        assert!(m.text.contains("\\ T = 8/9; constraint multiplied by 9\n"));
        assert!(m.text.contains(" spread: - 8 x1 - 8 x2 - 8 x3 + [ 9 x1 ^ 2 + 18 x1 * x3"));
        let lp = parse_lp(&m.text).unwrap();
        assert!(model_matches(&lp, &i));
    }

    #[test]
    fn decimal_threshold_is_inline() {
        // T = 5/2
        let i = inst(vec![vec![3, 4]], (1, 10));
        let m = emit_model(&i);
        assert!(m.text.contains(" spread: - 2.5 x1 + [ 25 x1 ^ 2 ] <= 0\n"));
        let lp = parse_lp(&m.text).unwrap();
        assert!(model_matches(&lp, &i));
        assert!(!lp.constraint_holds(&|_| true));
    }

    #[test]
    fn long_models_wrap() {
        let v: Vec<Vec<i64>> = (0..40).map(|i| vec![i % 7 - 3, i % 5 - 2]).collect();
        let i = inst(v, (1, 7));
        let m = emit_model(&i);
        assert!(m.text.lines().all(|l| l.len() <= WRAP + 20));
        assert!(model_matches(&parse_lp(&m.text).unwrap(), &i));
    }

    #[test]
    fn solution_parsing() {
        let i = inst(vec![vec![1, 1, 1], vec![-1, -1, -1]], (1, 2));
        let out = parse_solver_solution("# Objective value = 2\nx1 1\nx2 1\n", &i).unwrap();
        assert_eq!(out.cardinality(), 2);
        let out = parse_solver_solution("x1 = 1.0000000001\nx2 = 0.9999999\n", &i).unwrap();
        assert_eq!(out.cardinality(), 2);
        let out = parse_solver_solution("Optimal - objective value 2\n 0 x1 1 1\n 1 x2 1 1\n", &i).unwrap();
        assert_eq!(out.cardinality(), 2);

        assert!(matches!(
            parse_solver_solution("x1 0\nx2 0\n", &i),
            Err(Error::EmptySubset)
        ));
        assert!(matches!(
            parse_solver_solution("x1 0.5\nx2 1\n", &i),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_solver_solution("x1 1\n", &i),
            Err(Error::Solution(_))
        ));
        assert!(parse_solver_solution("x3 1\n", &i).is_err());
        assert!(parse_solver_solution("x1 1\nx1 0\n", &i).is_err());
        assert!(parse_solver_solution("objective 2\n", &i).is_err());
    }

    #[test]
    fn lp_reader_rejects_garbage() {
        assert!(parse_lp("Maximize\n obj: x1\n").is_err());
        assert!(parse_lp("hello\nEnd\n").is_err());
        assert!(parse_lp("Maximize\n obj: x1\nSubject To\n c: x1 [ x1 ^ 2 <= 0\nEnd\n").is_err());
    }
}
