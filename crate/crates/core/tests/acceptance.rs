//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use mcsv::dp::DpOptions;
use mcsv::generators::{generate_instance, GenSpec, Series, DEFAULT_SEED};
use mcsv::modelgen::{emit_model, parse_lp, var_name};
use mcsv::quantize::QuantizationSpec;
use mcsv::reductions::{certify, random_x3c, reduce_x3c};
use mcsv::*;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHAS: [(u64, u64); 3] = [(1, 10), (1, 2), (9, 10)];

fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, qs: &[usize], b: i64) -> Instance {
    let n = rng.random_range(1..=max_n);
    let q = qs[rng.random_range(0..qs.len())];
    let (an, ad) = ALPHAS[rng.random_range(0..ALPHAS.len())];
    let v = (0..n)
        .map(|_| (0..q).map(|_| rng.random_range(-b..=b)).collect())
        .collect();
    Instance::new(v, Alpha::new(an, ad).unwrap(), "").unwrap()
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    let mut infeasible = 0;
    for _ in 0..500 {
        let inst = random_instance(&mut rng, 15, &[1, 2, 3], 3);
        let dp = dp_solve(&inst).unwrap().0;
        let oracle = brute_solve(&inst).unwrap();
        infeasible += usize::from(!oracle.is_feasible());
        let witness_ok = dp.solution().is_none_or(|s| is_feasible(&inst, s.indices()).unwrap());
        if dp.is_feasible() != oracle.is_feasible() || dp.cardinality() != oracle.cardinality() || !witness_ok {
            bad += 1;
        }
    }
    Outcome {
        ok: bad == 0,
        detail: format!("500 instances, {bad} mismatches, {infeasible} infeasible"),
    }
}

fn reduction_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut total, mut bad, mut covers) = (0, 0, 0);
    for p in 1..=3 {
        for n in 1..=8 {
            for _ in 0..12 {
                let plant = n >= p && rng.random_bool(0.5);
                let x3c = random_x3c(p, n, rng.random(), plant).unwrap();
                let cert = certify(&x3c).unwrap();
                let inst = reduce_x3c(&x3c).unwrap();
                let dp = dp_solve(&inst).unwrap().0.is_feasible();
                total += 1;
                covers += usize::from(cert.truth);
                bad += usize::from(dp != cert.truth);
            }
        }
    }
    Outcome {
        ok: bad == 0 && total >= 100,
        detail: format!("{total} certificates ({covers} with a cover), {bad} mismatches"),
    }
}

fn bench_specs() -> Vec<(GenSpec, QuantizationSpec)> {
    let q10 = QuantizationSpec::new(10).unwrap();
    let q100 = QuantizationSpec::default();
    let mut out = Vec::new();
    for n in [5, 10, 25, 50, 100] {
        out.push((GenSpec::new(Series::SweepN, DEFAULT_SEED).with_n(n).with_q(2), q100));
    }
    for q in 1..=4 {
        out.push((GenSpec::new(Series::SweepQ, DEFAULT_SEED).with_n(16).with_q(q), q100));
    }
    for a in 1..=9 {
        let alpha = Alpha::new(a, 10).unwrap();
        out.push((GenSpec::new(Series::SweepAlpha, DEFAULT_SEED).with_n(40).with_q(2).with_alpha(alpha), q100));
    }
    out.push((GenSpec::new(Series::S1, DEFAULT_SEED).with_n(30).with_q(2), q10));
    out.push((GenSpec::new(Series::S1, DEFAULT_SEED).with_n(200).with_q(1), q100));
    out.push((GenSpec::new(Series::S2, DEFAULT_SEED).with_n(500).with_q(1), q100));
    out.push((GenSpec::new(Series::S2, DEFAULT_SEED).with_n(60).with_q(3), q100));
    out
}

fn state_bound() -> Outcome {
    let (mut solves, mut bad) = (0, 0);
    for (spec, quant) in bench_specs() {
        let inst = generate_instance(&spec, quant).unwrap();
        let b = inst.bound() as u128;
        let q = inst.dim() as u32;
        let (_, stats) = dp_solve(&inst).unwrap();
        solves += 1;
        let layers_ok = stats
            .layer_sizes
            .iter()
            .enumerate()
            .all(|(k, &s)| (s as u128) <= (2 * b * (k as u128 + 1) + 1).pow(q));
        let final_ok = q != 1 || (*stats.layer_sizes.last().unwrap() as u128) <= 2 * b * inst.len() as u128 + 1;
        if !(layers_ok && final_ok) {
            bad += 1;
        }
    }
    Outcome {
        ok: bad == 0,
        detail: format!("{solves} bench solves, {bad} violations"),
    }
}

fn alpha_insensitivity() -> Outcome {
    let spec = GenSpec::new(Series::S2, DEFAULT_SEED).with_n(200).with_q(3);
    let base = generate_instance(&spec, QuantizationSpec::default()).unwrap();
    let mut reference = None;
    let mut same = true;
    let mut peak = 0;
    for a in 1..=9 {
        let inst = base.with_alpha(Alpha::new(a, 10).unwrap()).unwrap();
        let (_, stats) = dp_solve(&inst).unwrap();
        peak = stats.peak_states;
        let key = (stats.peak_states, stats.layer_sizes);
        match &reference {
            None => reference = Some(key),
            Some(r) => same &= *r == key,
        }
    }
    Outcome {
        ok: same,
        detail: format!("N=200 q=3 seed={DEFAULT_SEED}, 9 alphas, peak_states={peak}"),
    }
}

fn formulation_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    for _ in 0..200 {
        let inst = random_instance(&mut rng, 12, &[1, 2, 3], 3);
        let model = parse_lp(&emit_model(&inst).text).unwrap();
        let names: Vec<String> = (0..inst.len()).map(var_name).collect();
        let mut best = 0u32;
        for mask in 1u32..(1 << inst.len()) {
            if mask.count_ones() <= best {
                continue;
            }
            let on = |v: &str| names.iter().position(|n| n == v).is_some_and(|i| mask >> i & 1 == 1);
            if model.constraint_holds(&on) {
                best = mask.count_ones();
            }
        }
        bad += usize::from(best as usize != dp_solve(&inst).unwrap().0.cardinality());
    }
    Outcome {
        ok: bad == 0,
        detail: format!("200 models, {bad} mismatches"),
    }
}

fn identity_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut nonzero = 0;
    for _ in 0..1000 {
        let inst = random_instance(&mut rng, 20, &[1, 2, 3, 4, 5], 50);
        let mut subset: Vec<usize> = (0..inst.len()).filter(|_| rng.random_bool(0.5)).collect();
        if subset.is_empty() {
            subset.push(rng.random_range(0..inst.len()));
        }
        nonzero += usize::from(!spread_identity_check(&inst, &subset).unwrap().is_zero());
    }
    Outcome {
        ok: nonzero == 0,
        detail: format!("1000 pairs, {nonzero} non-zero"),
    }
}

fn scale_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 12, &[1, 2, 3], 3);
        let base = dp_solve(&inst).unwrap().0;
        for c in [2, 10] {
            let s = dp_solve(&inst.scaled(c).unwrap()).unwrap().0;
            bad += usize::from(s.is_feasible() != base.is_feasible() || s.cardinality() != base.cardinality());
        }
    }
    Outcome {
        ok: bad == 0,
        detail: format!("100 instances x c in {{2, 10}}, {bad} mismatches"),
    }
}

/// Not a pass/fail criterion: a full-size Series-2 solve either finishes or
/// stops with a clean resource error.
fn full_scale_note() -> String {
    let spec = GenSpec::new(Series::S2, DEFAULT_SEED);
    let inst = generate_instance(&spec, QuantizationSpec::default()).unwrap();
    let opts = DpOptions::default();
    match dp_solve_with(&inst, &opts) {
        Ok((out, stats)) => format!(
            "N=1000 q=5 solved: cardinality {} peak_states {}",
            out.cardinality(),
            stats.peak_states
        ),
        Err(e @ Error::ResourceExhausted { .. }) => format!("N=1000 q=5 stopped cleanly: {e}"),
        Err(e) => format!("N=1000 q=5 unexpected error: {e}"),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("oracle equivalence", oracle_equivalence),
        ("reduction equivalence", reduction_equivalence),
        ("state bound", state_bound),
        ("alpha insensitivity", alpha_insensitivity),
        ("formulation equivalence", formulation_equivalence),
        ("identity check", identity_check),
        ("scale invariance", scale_invariance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let out = run();
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {} ({:.1}s)", out.detail, t.elapsed().as_secs_f64());
        failed += usize::from(!out.ok);
    }
    let t = Instant::now();
    println!("NOTE full scale: {} ({:.1}s)", full_scale_note(), t.elapsed().as_secs_f64());
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
