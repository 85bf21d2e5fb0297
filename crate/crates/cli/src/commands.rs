//! Subcommand bodies. Each returns the hard-invariant failures it found.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use vilenkin::kernels::{l1_norm, norlund_kernel, t_kernel};
use vilenkin::lab::suites::{
    identity_suite, lemma_suite, max_drift, maximal_suite, random_signal, sharpness_suite, strong_suite,
};
use vilenkin::lab::Family;
use vilenkin::par::{self, Execution};
use vilenkin::summability::{check_conditions, make_weights, sweep_means, ConditionReport, MeanKind, WeightKind};
use vilenkin::transform::{inverse_transform, transform_fast, transform_fast_with, transform_naive};
use vilenkin::{GroupSpec, Signal};

use crate::config::ExperimentConfig;
use crate::output::{slug, Artifacts, Table};
use crate::CliError;

/// Hard-invariant failures; empty means success.
pub type Failures = Vec<String>;

/// Largest order for which the quadratic transform is run as an oracle.
const NAIVE_LIMIT: usize = 4096;
/// Default upper index for kernel tables.
const KERNEL_N_DEFAULT: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Lemmas,
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Sharpness,
}

fn core(e: vilenkin::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn load_signal(spec: &GroupSpec, input: Option<&Path>, seed: u64) -> Result<Signal, CliError> {
    match input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            Signal::from_json(spec, &text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
        }
        None => Ok(random_signal(spec, seed, 0)),
    }
}

fn group_json(spec: &GroupSpec) -> Value {
    json!({ "m": spec.radices(), "order": spec.order() })
}

pub fn transform(cfg: &ExperimentConfig, input: Option<&Path>, art: &mut Artifacts) -> Result<Failures, CliError> {
    let spec = cfg.group()?;
    let f = load_signal(&spec, input, cfg.seed)?;
    let s = transform_fast(&f);
    let roundtrip = inverse_transform(&s).max_abs_diff(&f);
    let naive = (spec.order() <= NAIVE_LIMIT).then(|| transform_naive(&f).max_abs_diff(&s));
    let energy: f64 = f.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / f.len() as f64;
    let spectral: f64 = s.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let parseval = (energy - spectral).abs();

    let tol = cfg.tolerances.identity;
    let mut failures = Vec::new();
    for (name, err) in [("roundtrip", Some(roundtrip)), ("naive", naive), ("parseval", Some(parseval))] {
        if let Some(e) = err.filter(|e| e.is_nan() || *e > tol) {
            failures.push(format!("transform {name} error {e:e} > {tol:e}"));
        }
    }

    let mut spectrum = Table::new("spectrum", &["index", "re", "im"]);
    let mut signal = Table::new("signal", &["index", "re", "im"]);
    for i in 0..spec.order() {
        spectrum.push(vec![i.into(), s[i].re.into(), s[i].im.into()]);
        signal.push(vec![i.into(), f[i].re.into(), f[i].im.into()]);
    }
    art.table(signal);
    art.table(spectrum);
    art.summary(
        "transform",
        json!({
            "group": group_json(&spec),
            "seed": cfg.seed,
            "input": input.map(|p| p.display().to_string()),
            "roundtrip_error": roundtrip,
            "naive_error": naive,
            "parseval_error": parseval,
            "tolerance": tol,
            "passed": failures.is_empty(),
        }),
    );
    Ok(failures)
}

fn natural_kernel(spec: &GroupSpec, kind: WeightKind, w: &vilenkin::summability::WeightSeq, n: usize) -> vilenkin::Result<Signal> {
    match kind.mean_kind() {
        MeanKind::T => t_kernel(spec, w, n),
        MeanKind::Norlund => norlund_kernel(spec, w, n),
    }
}

pub fn kernel(
    cfg: &ExperimentConfig,
    n_max: Option<usize>,
    at: Option<usize>,
    art: &mut Artifacts,
) -> Result<Failures, CliError> {
    let spec = cfg.group()?;
    let n_max = n_max.unwrap_or(KERNEL_N_DEFAULT).min(spec.order());
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be >= 1".into()));
    }
    if let Some(n) = at {
        if n == 0 || n > spec.order() {
            return Err(CliError::Usage(format!("--at {n} outside [1, {}]", spec.order())));
        }
    }
    let mut summary = Vec::new();
    for &kind in &cfg.families {
        let id = Family::natural(kind).id();
        let w = make_weights(kind, spec.order() + 1).map_err(core)?;
        let first = w.first_defined().unwrap_or(1);
        let rows = par::map_range((n_max + 1).saturating_sub(first), |i| {
            let n = first + i;
            natural_kernel(&spec, kind, &w, n).map(|k| (n, l1_norm(&k), k.max_abs()))
        })
        .into_iter()
        .collect::<vilenkin::Result<Vec<_>>>()
        .map_err(core)?;
        let mut t = Table::new(format!("kernel_{}", slug(&id)), &["n", "l1_norm", "max_abs"]);
        for &(n, l1, mx) in &rows {
            t.push(vec![n.into(), l1.into(), mx.into()]);
        }
        art.table(t);
        let (sup_at, sup_l1) = rows
            .iter()
            .fold((0, f64::NEG_INFINITY), |a, r| if r.1 > a.1 { (r.0, r.1) } else { a });
        summary.push(json!({ "family": id, "n_first": first, "n_max": n_max, "sup_l1": sup_l1, "sup_at": sup_at }));
        if let Some(n) = at.filter(|&n| n >= first) {
            let k = natural_kernel(&spec, kind, &w, n).map_err(core)?;
            let mut t = Table::new(format!("kernel_values_{}_n{n}", slug(&id)), &["index", "re", "im"]);
            for (i, z) in k.as_slice().iter().enumerate() {
                t.push(vec![i.into(), z.re.into(), z.im.into()]);
            }
            art.table(t);
        }
    }
    art.summary("kernel", json!({ "group": group_json(&spec), "kernels": summary }));
    Ok(Vec::new())
}

pub fn means(cfg: &ExperimentConfig, input: Option<&Path>, art: &mut Artifacts) -> Result<Failures, CliError> {
    let spec = cfg.group()?;
    let f = load_signal(&spec, input, cfg.seed)?;
    let hi = cfg.cap * spec.order();
    let fv = f.as_slice();
    let mut summary = Vec::new();
    for &kind in &cfg.families {
        let id = Family::natural(kind).id();
        let w = make_weights(kind, hi + 1).map_err(core)?;
        let mut t = Table::new(format!("means_{}", slug(&id)), &["n", "sup_error", "l1_error"]);
        let mut last = (0, f64::NAN, f64::NAN);
        sweep_means(&f, &w, kind.mean_kind(), 1, hi, |n, m| {
            let (mut sup, mut l1) = (0.0f64, 0.0);
            for (a, b) in m.iter().zip(fv) {
                let d = (a - b).norm();
                sup = sup.max(d);
                l1 += d;
            }
            l1 /= m.len() as f64;
            t.push(vec![n.into(), sup.into(), l1.into()]);
            last = (n, sup, l1);
        })
        .map_err(core)?;
        art.table(t);
        summary.push(json!({ "family": id, "n_end": last.0, "sup_error": last.1, "l1_error": last.2 }));
    }
    art.summary(
        "means",
        json!({ "group": group_json(&spec), "seed": cfg.seed, "cap": cfg.cap, "families": summary }),
    );
    Ok(Vec::new())
}

pub fn verify(cfg: &ExperimentConfig, suite: Suite, art: &mut Artifacts) -> Result<Failures, CliError> {
    match suite {
        Suite::Identities => identities(cfg, art),
        Suite::Lemmas => lemmas(cfg, art),
        Suite::Theorem1 => maximal(cfg, Class::NonIncreasing, "theorem1", art),
        Suite::Theorem3 => maximal(cfg, Class::NonDecreasing, "theorem3", art),
        Suite::Theorem2 => strong(cfg, Class::NonIncreasing, "theorem2", art),
        Suite::Theorem4 => strong(cfg, Class::NonDecreasing, "theorem4", art),
        Suite::Sharpness => sharpness(cfg, &[Family::sigma()], None, art),
    }
}

fn identities(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Failures, CliError> {
    let spec = cfg.group()?;
    let mut checks = identity_suite(std::slice::from_ref(&spec), &cfg.families, cfg.seed).map_err(core)?;
    let mut table = Table::new("identities", &["name", "subject", "max_error", "tolerance", "passed"]);
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    let mut failures = Vec::new();
    for c in &mut checks {
        c.tolerance = if c.name == "abel_weight_sum" { cfg.tolerances.weight_sum } else { cfg.tolerances.identity };
        c.passed = c.max_error <= c.tolerance;
        let e = worst.entry(c.name.clone()).or_insert(0.0);
        *e = e.max(c.max_error);
        if !c.passed {
            failures.push(format!("{} [{}] error {:e} > {:e}", c.name, c.subject, c.max_error, c.tolerance));
        }
        table.push(vec![
            c.name.clone().into(),
            c.subject.clone().into(),
            c.max_error.into(),
            c.tolerance.into(),
            c.passed.into(),
        ]);
    }
    art.table(table);
    art.summary(
        "identities",
        json!({
            "group": group_json(&spec),
            "seed": cfg.seed,
            "checks": checks.len(),
            "max_error": worst,
            "failed": failures,
            "passed": failures.is_empty(),
        }),
    );
    Ok(failures)
}

fn lemmas(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Failures, CliError> {
    let reports = lemma_suite(&cfg.levels, &cfg.families).map_err(core)?;
    let mut tables: BTreeMap<String, Table> = BTreeMap::new();
    let mut series: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    let mut constants = Vec::new();
    let mut failures = Vec::new();
    for r in &reports {
        let name = format!("lemmas_{}_N{}", slug(&r.family), r.level);
        let t = tables
            .entry(name.clone())
            .or_insert_with(|| Table::new(name, &["lemma_id", "k", "l", "n", "lhs", "bound_shape", "ratio"]));
        for row in &r.rows {
            t.push(vec![
                r.lemma.id().into(),
                row.k.into(),
                row.l.into(),
                row.n.into(),
                row.lhs.into(),
                row.bound_shape.into(),
                row.ratio.into(),
            ]);
        }
        if !r.constant.is_finite() {
            failures.push(format!("{} {} N={}: non-finite ratio", r.lemma.id(), r.family, r.level));
        }
        series.entry((r.lemma.id().into(), r.family.clone())).or_default().push(r.constant);
        constants.push(json!({ "lemma_id": r.lemma.id(), "family": r.family, "N": r.level, "constant": r.constant }));
    }
    tables.into_values().for_each(|t| art.table(t));
    let drift: Vec<Value> = series
        .iter()
        .map(|((l, f), v)| json!({ "lemma_id": l, "family": f, "constants": v, "drift": max_drift(v) }))
        .collect();
    art.summary(
        "lemmas",
        json!({ "levels": cfg.levels, "constants": constants, "stability": drift, "passed": failures.is_empty() }),
    );
    Ok(failures)
}

#[derive(Clone, Copy)]
enum Class {
    NonIncreasing,
    NonDecreasing,
}

struct Classified {
    keep: Vec<WeightKind>,
    conditions: Vec<ConditionReport>,
    skipped: Vec<String>,
}

/// Splits the configured families into those meeting the class hypotheses and the rest.
fn classify(cfg: &ExperimentConfig, class: Class) -> Result<Classified, CliError> {
    let top = *cfg.levels.iter().max().expect("validated");
    let range_end = cfg.cap << top;
    let (mut keep, mut reports, mut skipped) = (Vec::new(), Vec::new(), Vec::new());
    for &kind in &cfg.families {
        let w = make_weights(kind, range_end + 1).map_err(core)?;
        let r = check_conditions(&w, range_end).map_err(core)?;
        let h = r.hypotheses();
        let ok = match class {
            Class::NonIncreasing => h.non_increasing,
            Class::NonDecreasing => h.non_decreasing_fn01,
        };
        if ok {
            keep.push(kind);
        } else {
            skipped.push(kind.id());
        }
        reports.push(r);
    }
    if keep.is_empty() {
        let what = match class {
            Class::NonIncreasing => "non-increasing",
            Class::NonDecreasing => "non-decreasing with bounded n q_{n-1}/Q_n",
        };
        return Err(CliError::Usage(format!("no configured family has {what} weights")));
    }
    Ok(Classified { keep, conditions: reports, skipped })
}

fn maximal(cfg: &ExperimentConfig, class: Class, name: &str, art: &mut Artifacts) -> Result<Failures, CliError> {
    let Classified { keep: fams, conditions, skipped } = classify(cfg, class)?;
    let grid = cfg.grid();
    let reports = maximal_suite(&grid, &fams).map_err(core)?;
    let mut table = Table::new("maximal", &["family", "p", "N", "seed", "value"]);
    let mut series: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut domination = Vec::new();
    for r in &reports {
        table.push(vec![r.family.clone().into(), r.p.into(), r.levels.into(), r.seed.into(), r.sup.into()]);
        series.entry((r.family.clone(), r.p.to_string())).or_default().push(r.sup);
        if let Some(ex) = r.domination_excess {
            if ex.is_nan() || ex > cfg.tolerances.domination {
                failures.push(format!("{} p={} N={}: domination excess {ex:e}", r.family, r.p, r.levels));
            }
        }
        domination.push(json!({
            "family": r.family, "p": r.p, "N": r.levels,
            "factor": r.domination_factor, "excess": r.domination_excess,
        }));
    }
    art.table(table);
    let stability: Vec<Value> = series
        .iter()
        .map(|((f, p), v)| json!({ "family": f, "p": p.parse::<f64>().ok(), "sup": v, "drift": max_drift(v) }))
        .collect();
    art.summary(
        name,
        json!({
            "grid": grid,
            "families": fams.iter().map(|k| k.id()).collect::<Vec<_>>(),
            "skipped": skipped,
            "conditions": conditions,
            "stability": stability,
            "domination": domination,
            "failed": failures,
            "passed": failures.is_empty(),
        }),
    );
    Ok(failures)
}

fn strong(cfg: &ExperimentConfig, class: Class, name: &str, art: &mut Artifacts) -> Result<Failures, CliError> {
    let Classified { keep: fams, conditions, skipped } = classify(cfg, class)?;
    let grid = cfg.grid();
    let rows = strong_suite(&grid, &fams).map_err(core)?;
    let mut table = Table::new("strong", &["family", "p", "n_end", "partial_sum", "hardy_norm", "ratio"]);
    let mut series: BTreeMap<(String, String), (bool, Vec<f64>)> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut nullity: f64 = 0.0;
    for r in &rows {
        let w = &r.worst;
        table.push(vec![
            r.family.clone().into(),
            r.p.into(),
            r.n_end.into(),
            w.partial_sum.into(),
            w.hardy_norm.into(),
            w.ratio.into(),
        ]);
        let e = series.entry((r.family.clone(), r.p.to_string())).or_insert((r.covered, Vec::new()));
        e.0 &= r.covered;
        e.1.push(w.ratio);
        nullity = nullity.max(r.nullity);
        if r.nullity.is_nan() || r.nullity > cfg.tolerances.nullity {
            failures.push(format!("{} p={} N={}: atom nullity {:e}", r.family, r.p, r.levels, r.nullity));
        }
    }
    art.table(table);
    let stability: Vec<Value> = series
        .iter()
        .map(|((f, p), (covered, v))| {
            json!({ "family": f, "p": p.parse::<f64>().ok(), "covered": covered, "ratio": v, "drift": max_drift(v) })
        })
        .collect();
    art.summary(
        name,
        json!({
            "grid": grid,
            "families": fams.iter().map(|k| k.id()).collect::<Vec<_>>(),
            "skipped": skipped,
            "conditions": conditions,
            "max_nullity": nullity,
            "stability": stability,
            "failed": failures,
            "passed": failures.is_empty(),
        }),
    );
    Ok(failures)
}

/// Largest admissible weakening that still changes the weight visibly.
fn default_eps(p: f64) -> f64 {
    if p >= 0.5 {
        2.0
    } else {
        (0.5f64).min((1.0 / p - 2.0) / 2.0)
    }
}

pub fn sharpness(
    cfg: &ExperimentConfig,
    families: &[Family],
    eps: Option<f64>,
    art: &mut Artifacts,
) -> Result<Failures, CliError> {
    let grid = cfg.grid();
    let cases: Vec<(f64, f64)> = cfg.p.iter().map(|&p| (p, eps.unwrap_or_else(|| default_eps(p)))).collect();
    let mut table = Table::new("sharpness", &["family", "p", "eps", "N", "weighted", "weakened"]);
    let mut summary = Vec::new();
    for &family in families {
        let reports = sharpness_suite(&cases, family, &grid).map_err(core)?;
        for r in &reports {
            for pt in &r.points {
                table.push(vec![
                    r.family.clone().into(),
                    r.p.into(),
                    r.eps.into(),
                    pt.levels.into(),
                    pt.weighted.into(),
                    pt.weakened.into(),
                ]);
            }
            let weighted: Vec<f64> = r.points.iter().map(|p| p.weighted).collect();
            summary.push(json!({
                "family": r.family, "p": r.p, "eps": r.eps,
                "weakened_growth": r.growth,
                "min_weakened_growth": r.growth.iter().copied().fold(f64::INFINITY, f64::min),
                "weighted_ratio": r.weighted_drift,
                "weighted_drift": max_drift(&weighted),
            }));
        }
    }
    art.table(table);
    art.summary("sharpness", json!({ "grid": grid, "series": summary }));
    Ok(Vec::new())
}

/// Smallest per-call time over several batches of at least 20 ms.
fn time_per_call(mut call: impl FnMut()) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let mut reps = 0u32;
        let start = Instant::now();
        while start.elapsed() < Duration::from_millis(20) {
            call();
            reps += 1;
        }
        best = best.min(start.elapsed().as_secs_f64() / reps as f64);
    }
    best
}

pub fn bench(cfg: &ExperimentConfig, from: usize, to: usize, art: &mut Artifacts) -> Result<Failures, CliError> {
    if from == 0 || from > to || to > 22 {
        return Err(CliError::Usage(format!("bench range {from}..={to} must satisfy 1 <= from <= to <= 22")));
    }
    let mut table = Table::new("bench", &["M", "seq_seconds", "par_seconds", "speedup"]);
    let mut rows = Vec::new();
    for level in from..=to {
        let spec = GroupSpec::walsh(level).map_err(core)?;
        let f = random_signal(&spec, cfg.seed, 0);
        let seq = time_per_call(|| {
            std::hint::black_box(transform_fast_with(Execution::Sequential, &f));
        });
        let par = time_per_call(|| {
            std::hint::black_box(transform_fast_with(Execution::default(), &f));
        });
        table.push(vec![spec.order().into(), seq.into(), par.into(), (seq / par).into()]);
        rows.push(json!({ "M": spec.order(), "seq_seconds": seq, "par_seconds": par }));
    }
    art.table(table);
    art.summary(
        "bench",
        json!({ "parallel_feature": cfg!(feature = "parallel"), "threads": threads(), "rows": rows }),
    );
    Ok(Vec::new())
}

#[cfg(feature = "parallel")]
fn threads() -> usize {
    rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
fn threads() -> usize {
    1
}
