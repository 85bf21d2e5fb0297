//! Experiment grids: identities, kernel norms, kernel-integral estimates,
//! maximal operators on atoms, strong-convergence sums, sharpness series and
//! weight conditions. Every runner returns plain serializable rows.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    domination_factor, lemma_integral_check, lp_of, maximal_ops, random_atoms, sharpness_probe,
    strong_convergence_sums, Family, LemmaId, LemmaReport, Probe, SharpnessReport, WeightMode,
};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::kernels::{
    convolve, dirichlet, dirichlet_factored, fejer_dyadic_closed_form, fejer_kernel,
    fejer_kernel_lower, l1_norm, t_kernel, t_kernel_abel,
};
use crate::par;
use crate::signal::Signal;
use crate::summability::{
    check_conditions, make_weights, sweep_means, t_mean, ConditionReport, MeanKind, WeightKind,
    WeightSeq,
};
use crate::transform::VilenkinTable;

/// Absolute tolerance for the exact kernel and mean identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Relative tolerance for the weight-sum identity.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;
/// Nullity tolerance for `T_n a`, relative to `||a||_inf`.
pub const NULLITY_TOLERANCE: f64 = 1e-12;
/// Slack in the pointwise domination check.
pub const DOMINATION_SLACK: f64 = 1e-10;

/// Every implemented weight family with the parameters used by the suites.
pub fn all_families() -> Vec<WeightKind> {
    vec![
        WeightKind::Fejer,
        WeightKind::Riesz,
        WeightKind::Cesaro { alpha: 0.5 },
        WeightKind::U { alpha: 0.5 },
        WeightKind::V { alpha: 0.5 },
        WeightKind::B { alpha: 1.0, beta: 1 },
        WeightKind::NorlundLog,
    ]
}

/// `T`-mean families with non-increasing weights.
pub fn non_increasing_families() -> Vec<WeightKind> {
    vec![
        WeightKind::Fejer,
        WeightKind::Riesz,
        WeightKind::U { alpha: 0.5 },
        WeightKind::V { alpha: 0.5 },
    ]
}

/// `T`-mean families with non-decreasing weights and bounded `n q_{n-1}/Q_n`.
pub fn non_decreasing_families() -> Vec<WeightKind> {
    vec![WeightKind::B { alpha: 1.0, beta: 1 }]
}

/// `max_i |v_{i+1} / v_i - 1|`.
pub fn max_drift(series: &[f64]) -> f64 {
    series
        .windows(2)
        .map(|w| (w[1] / w[0] - 1.0).abs())
        .fold(0.0, f64::max)
}

pub fn spec_label(spec: &GroupSpec) -> String {
    let m: Vec<String> = spec.radices().iter().map(|m| m.to_string()).collect();
    format!("m=({})", m.join(","))
}

/// A random complex signal drawn from a seeded stream.
pub fn random_signal(spec: &GroupSpec, seed: u64, stream: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    Signal::from_fn(spec, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub subject: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, subject: String, max_error: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            subject,
            max_error,
            tolerance,
            passed: max_error <= tolerance,
        }
    }
}

/// Mean-index bound for the `T`-mean Abel identity.
const ABEL_MEAN_RANGE: usize = 200;
/// Index bound for the weight-sum identity.
const WEIGHT_SUM_RANGE: usize = 4096;
/// At most this many indices per spec for the direct convolution check.
const CONVOLUTION_SAMPLES: usize = 64;

fn sampled_indices(first: usize, last: usize, max: usize) -> Vec<usize> {
    if first > last {
        return Vec::new();
    }
    let len = last - first + 1;
    let step = len.div_ceil(max).max(1);
    let mut v: Vec<usize> = (first..=last).step_by(step).collect();
    if *v.last().unwrap() != last {
        v.push(last);
    }
    v
}

/// The exact identities on each spec and weight family.
pub fn identity_suite(specs: &[GroupSpec], families: &[WeightKind], seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for kind in families {
        let w = make_weights(*kind, WEIGHT_SUM_RANGE + 1)?;
        let err = (1..=WEIGHT_SUM_RANGE)
            .filter(|&n| w.Q(n) > 0.0)
            .map(|n| (w.abel_sum(n) - w.Q(n)).abs() / w.Q(n))
            .fold(0.0, f64::max);
        checks.push(Check::new("abel_weight_sum", kind.id(), err, WEIGHT_SUM_TOLERANCE));
    }
    for (si, spec) in specs.iter().enumerate() {
        let label = spec_label(spec);
        let order = spec.order();

        let err = par::map_range(spec.levels() + 1, |l| -> Result<f64> {
            let d = dirichlet(spec, spec.big_m(l))?;
            let step = spec.big_m(l);
            Ok((0..order)
                .map(|x| {
                    let want = if x % step == 0 { step as f64 } else { 0.0 };
                    (d[x] - want).norm()
                })
                .fold(0.0, f64::max))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
        checks.push(Check::new("dirichlet_dyadic", label.clone(), err, IDENTITY_TOLERANCE));

        let err = par::map_range(order, |n| -> Result<f64> {
            Ok(dirichlet(spec, n)?.max_abs_diff(&dirichlet_factored(spec, n)?))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
        checks.push(Check::new("dirichlet_factorization", label.clone(), err, IDENTITY_TOLERANCE));

        let mut err: f64 = 0.0;
        for l in 1..=spec.levels() {
            let closed = fejer_dyadic_closed_form(spec, l)?;
            err = err.max(closed.max_abs_diff(&fejer_kernel_lower(spec, spec.big_m(l))?));
        }
        checks.push(Check::new("fejer_dyadic_closed_form", label.clone(), err, IDENTITY_TOLERANCE));

        if order <= 144 {
            let table = VilenkinTable::new(spec);
            let psis: Vec<Signal> = (0..order).map(|n| table.signal(n)).collect();
            let err = par::map_range(order, |i| {
                (0..order)
                    .map(|j| {
                        let ip: Complex64 = psis[i]
                            .as_slice()
                            .iter()
                            .zip(psis[j].as_slice())
                            .map(|(a, b)| a * b.conj())
                            .sum::<Complex64>()
                            / order as f64;
                        let want = if i == j { 1.0 } else { 0.0 };
                        (ip - want).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .into_iter()
            .fold(0.0, f64::max);
            checks.push(Check::new("orthonormality", label.clone(), err, IDENTITY_TOLERANCE));
        }

        let f = random_signal(spec, seed, si as u64);
        for kind in families {
            let subject = format!("{label} {}", kind.id());
            let w = make_weights(*kind, (4 * order).max(ABEL_MEAN_RANGE) + 1)?;
            let first = w.first_defined().unwrap_or(1).max(1);

            let ns = sampled_indices(first, order, CONVOLUTION_SAMPLES);
            let err = par::map(&ns, |&n| -> Result<f64> {
                let lhs = t_mean(&f, &w, n)?;
                Ok(convolve(&f, &t_kernel(spec, &w, n)?)?.max_abs_diff(&lhs))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
            checks.push(Check::new("convolution_t_kernel", subject.clone(), err, IDENTITY_TOLERANCE));

            let err = par::map_range(order + 1 - first, |i| -> Result<f64> {
                let n = first + i;
                Ok(t_kernel(spec, &w, n)?.max_abs_diff(&t_kernel_abel(spec, &w, n)?))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
            checks.push(Check::new("abel_t_kernel", subject.clone(), err, IDENTITY_TOLERANCE));

            let err = abel_mean_error(&f, &w, ABEL_MEAN_RANGE)?;
            checks.push(Check::new("abel_t_mean", subject, err, IDENTITY_TOLERANCE));
        }
    }
    Ok(checks)
}

/// `max_n |T_n f - (1/Q_n)(sum_{j<n-1} (q_j - q_{j+1}) j sigma_j f + q_{n-1}(n-1) sigma_{n-1} f)|`.
fn abel_mean_error(f: &Signal, w: &WeightSeq, hi: usize) -> Result<f64> {
    let fejer = make_weights(WeightKind::Fejer, hi + 1)?;
    let mut sigmas: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); f.len()]];
    sweep_means(f, &fejer, MeanKind::Norlund, 1, hi, |_, m| sigmas.push(m.to_vec()))?;
    let zero = Complex64::new(0.0, 0.0);
    // acc = sum_{j<n-1} (q_j - q_{j+1}) j sigma_j
    let mut acc = vec![zero; f.len()];
    let mut worst: f64 = 0.0;
    let mut got = Vec::new();
    sweep_means(f, w, MeanKind::T, 1, hi, |n, m| got.push((n, m.to_vec())))?;
    let mut next = 0;
    for n in 1..=hi {
        if n >= 2 {
            let j = n - 2;
            let c = (w.q(j) - w.q(j + 1)) * j as f64;
            for (a, s) in acc.iter_mut().zip(&sigmas[j]) {
                *a += s * c;
            }
        }
        if next < got.len() && got[next].0 == n {
            let q_n = w.Q(n);
            let tail = w.q(n - 1) * (n - 1) as f64;
            for ((a, s), t) in acc.iter().zip(&sigmas[n - 1]).zip(&got[next].1) {
                let rhs = (a + s * tail) / q_n;
                worst = worst.max((rhs - t).norm());
            }
            next += 1;
        }
    }
    Ok(worst)
}

/// `fast == naive` on `count` random signals per spec.
pub fn transform_oracle_suite(specs: &[GroupSpec], count: usize, seed: u64) -> Vec<Check> {
    specs
        .iter()
        .map(|spec| {
            let err = par::map_range(count, |i| {
                let f = random_signal(spec, seed, i as u64);
                let a = crate::transform::transform_fast(&f);
                let b = crate::transform::transform_naive(&f);
                a.max_abs_diff(&b)
            })
            .into_iter()
            .fold(0.0, f64::max);
            Check::new("transform_fast_vs_naive", spec_label(spec), err, IDENTITY_TOLERANCE)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelNormRow {
    pub kernel: String,
    pub levels: usize,
    pub n_max: usize,
    pub sup_l1: f64,
    pub sup_at: usize,
}

/// `sup_{n <= min(n_cap, M_N)} ||K_n||_1` and `||F_n||_1` on Walsh groups.
pub fn kernel_norm_suite(levels: &[usize], families: &[WeightKind], n_cap: usize) -> Result<Vec<KernelNormRow>> {
    let mut rows = Vec::new();
    for &nl in levels {
        let spec = GroupSpec::walsh(nl)?;
        let n_max = n_cap.min(spec.order());
        let mut push = |kernel: String, norms: Vec<(usize, f64)>| {
            let (sup_at, sup_l1) = norms
                .into_iter()
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            rows.push(KernelNormRow { kernel, levels: nl, n_max, sup_l1, sup_at });
        };
        let norms = par::map_range(n_max, |i| -> Result<(usize, f64)> {
            Ok((i + 1, l1_norm(&fejer_kernel(&spec, i + 1)?)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        push("fejer".into(), norms);
        for kind in families {
            let w = make_weights(*kind, n_max + 1)?;
            let first = w.first_defined().unwrap_or(1).max(1);
            let norms = par::map_range(n_max + 1 - first, |i| -> Result<(usize, f64)> {
                let n = first + i;
                Ok((n, l1_norm(&t_kernel(&spec, &w, n)?)))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            push(format!("t_kernel {}", kind.id()), norms);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct MajorantRow {
    pub levels: usize,
    /// `max_{n, x} n |K_n(x)| / sum_{l <= |n|} M_l |K_{M_l}(x)|`.
    pub constant: f64,
    pub at_n: usize,
}

/// Pointwise ratio of `n |K_n|` to its dyadic majorant on Walsh groups.
pub fn fejer_majorant_suite(levels: &[usize]) -> Result<Vec<MajorantRow>> {
    let mut out = Vec::new();
    for &nl in levels {
        let spec = GroupSpec::walsh(nl)?;
        let maj = crate::kernels::fejer_majorants(&spec, nl)?;
        let per_n = par::map_range(spec.order(), |i| -> Result<(f64, usize)> {
            let n = i + 1;
            let top = if n == spec.order() { nl } else { spec.magnitude(n)? };
            let k = fejer_kernel(&spec, n)?;
            let r = k
                .as_slice()
                .iter()
                .zip(&maj[top])
                .map(|(z, d)| n as f64 * z.norm() / d)
                .fold(0.0, f64::max);
            Ok((r, n))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let (constant, at_n) = per_n
            .into_iter()
            .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
        out.push(MajorantRow { levels: nl, constant, at_n });
    }
    Ok(out)
}

/// Every applicable kernel-integral estimate for each family, at each level
/// `N`, on the Walsh group of `N + 2` levels with `n` in `(M_N, 4 M_N]`.
pub fn lemma_suite(levels: &[usize], families: &[WeightKind]) -> Result<Vec<LemmaReport>> {
    let mut out = Vec::new();
    for &nl in levels {
        let spec = GroupSpec::walsh(nl + 2)?;
        let hi = spec.order();
        for kind in families {
            let w = make_weights(*kind, hi + 1)?;
            for lemma in LemmaId::ALL {
                match lemma_integral_check(&spec, &w, lemma, nl, spec.big_m(nl) + 1, hi) {
                    Ok(r) => out.push(r),
                    Err(Error::NotApplicable(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(out)
}

/// One grid cell of the maximal-operator experiment.
#[derive(Debug, Clone, Serialize)]
pub struct MaximalReport {
    pub family: String,
    pub p: f64,
    pub mode: WeightMode,
    pub levels: usize,
    pub seed: u64,
    pub n_max: usize,
    /// `||T~*_p a||_p` per atom.
    pub values: Vec<f64>,
    /// Running maximum of `values`.
    pub sup: f64,
    /// Domination factor `C` and the largest `T~* - C sigma~*` over all atoms.
    pub domination_factor: Option<f64>,
    pub domination_excess: Option<f64>,
}

/// Grid settings shared by the atom experiments.
#[derive(Debug, Clone, Serialize)]
pub struct AtomGrid {
    pub levels: Vec<usize>,
    pub ps: Vec<f64>,
    pub atoms: usize,
    pub seed: u64,
    /// Means are taken for `n <= cap_factor * M_N`.
    pub cap_factor: usize,
}

impl Default for AtomGrid {
    fn default() -> Self {
        AtomGrid {
            levels: vec![5, 6, 7, 8],
            ps: vec![0.25, 0.4, 0.5],
            atoms: 200,
            seed: 2024,
            cap_factor: 4,
        }
    }
}

/// `sup over atoms of ||T~*_p a||_p` on Walsh groups, with the pointwise
/// comparison against `sigma~*_p` for every atom.
pub fn maximal_suite(grid: &AtomGrid, families: &[WeightKind]) -> Result<Vec<MaximalReport>> {
    let mut out = Vec::new();
    for &nl in &grid.levels {
        let spec = GroupSpec::walsh(nl)?;
        let hi = grid.cap_factor * spec.order();
        let fejer = make_weights(WeightKind::Fejer, hi + 1)?;
        for &p in &grid.ps {
            let atoms = random_atoms(&spec, p, grid.atoms, grid.seed)?;
            let probe = [Probe { p, mode: WeightMode::Weighted }];
            let sigma: Vec<Vec<f64>> = par::map(&atoms, |a| {
                maximal_ops(a.values(), &fejer, MeanKind::Norlund, 1, hi, &probe).map(|mut v| v.remove(0))
            })
            .into_iter()
            .collect::<Result<_>>()?;
            for kind in families {
                let w = make_weights(*kind, hi + 1)?;
                let factor = domination_factor(&w, hi);
                let per_atom: Vec<(f64, f64)> = par::map_range(atoms.len(), |i| -> Result<(f64, f64)> {
                    let t = maximal_ops(atoms[i].values(), &w, MeanKind::T, 1, hi, &probe)?.remove(0);
                    let excess = match factor {
                        Some(c) => t
                            .iter()
                            .zip(&sigma[i])
                            .map(|(a, b)| a - c * b)
                            .fold(f64::NEG_INFINITY, f64::max),
                        None => f64::NEG_INFINITY,
                    };
                    Ok((lp_of(&t, p), excess))
                })
                .into_iter()
                .collect::<Result<_>>()?;
                let values: Vec<f64> = per_atom.iter().map(|v| v.0).collect();
                let excess = per_atom.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
                out.push(MaximalReport {
                    family: Family::t(*kind).id(),
                    p,
                    mode: WeightMode::Weighted,
                    levels: nl,
                    seed: grid.seed,
                    n_max: hi,
                    sup: values.iter().copied().fold(0.0, f64::max),
                    values,
                    domination_factor: factor,
                    domination_excess: factor.map(|_| excess),
                });
            }
        }
    }
    Ok(out)
}

/// Worst-atom strong-convergence sums for one grid cell.
#[derive(Debug, Clone, Serialize)]
pub struct StrongRow {
    pub family: String,
    pub p: f64,
    pub levels: usize,
    pub seed: u64,
    pub n_end: usize,
    /// The report of the atom with the largest ratio.
    pub worst: super::StrongConvergenceReport,
    /// `max_atoms max_{n <= M_s} |T_n a| / ||a||_inf`.
    pub nullity: f64,
    /// Whether the family meets the hypotheses of a strong-convergence statement at this `p`.
    pub covered: bool,
}

/// Whether a weight family is covered by a strong-convergence statement at `p`.
///
/// For `p < 1/2`: monotone weights (non-decreasing ones with bounded
/// `n q_{n-1}/Q_n`). At `p = 1/2`: non-increasing weights with
/// `1/Q_n = O(1/n)`, or weights with bounded `n q_{n-1}/Q_n` that are
/// non-increasing or non-decreasing (both readings of the monotonicity class).
pub fn strong_covered(report: &ConditionReport, p: f64) -> bool {
    let h = report.hypotheses();
    if p < 0.5 {
        h.non_increasing || h.non_decreasing_fn01
    } else {
        h.non_increasing_cond0 || h.non_increasing_fn01 || h.non_decreasing_fn01
    }
}

pub fn strong_suite(grid: &AtomGrid, families: &[WeightKind]) -> Result<Vec<StrongRow>> {
    let mut out = Vec::new();
    for &nl in &grid.levels {
        let spec = GroupSpec::walsh(nl)?;
        let n_end = grid.cap_factor * spec.order();
        for kind in families {
            let w = make_weights(*kind, n_end + 1)?;
            let cond = check_conditions(&w, n_end)?;
            for &p in &grid.ps {
                let atoms = random_atoms(&spec, p, grid.atoms, grid.seed)?;
                let per_atom = par::map(&atoms, |a| -> Result<(super::StrongConvergenceReport, f64)> {
                    let r = strong_convergence_sums(a.values(), &w, &[p], n_end)?.remove(0);
                    let null = super::atom_nullity(a, &w)? / a.values().max_abs();
                    Ok((r, null))
                });
                let mut worst: Option<super::StrongConvergenceReport> = None;
                let mut nullity: f64 = 0.0;
                for r in per_atom {
                    let (r, null) = r?;
                    nullity = nullity.max(null);
                    if worst.as_ref().is_none_or(|b| r.ratio > b.ratio) {
                        worst = Some(r);
                    }
                }
                out.push(StrongRow {
                    family: Family::t(*kind).id(),
                    p,
                    levels: nl,
                    seed: grid.seed,
                    n_end,
                    worst: worst.ok_or(Error::EmptyRange)?,
                    nullity,
                    covered: strong_covered(&cond, p),
                });
            }
        }
    }
    Ok(out)
}

/// Sharpness series for each `(p, eps)` pair.
pub fn sharpness_suite(
    cases: &[(f64, f64)],
    family: Family,
    grid: &AtomGrid,
) -> Result<Vec<SharpnessReport>> {
    cases
        .iter()
        .map(|&(p, eps)| sharpness_probe(p, family, eps, &grid.levels, grid.atoms, grid.seed, grid.cap_factor))
        .collect()
}

/// Condition reports over `n <= range_end` for each family.
pub fn conditions_suite(families: &[WeightKind], range_end: usize) -> Result<Vec<ConditionReport>> {
    families
        .iter()
        .map(|k| check_conditions(&make_weights(*k, range_end + 1)?, range_end))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_on_a_small_group() {
        let specs = [GroupSpec::new(vec![2, 3]).unwrap()];
        let fams = [WeightKind::Riesz, WeightKind::V { alpha: 0.5 }];
        let checks = identity_suite(&specs, &fams, 1).unwrap();
        for c in &checks {
            assert!(c.passed, "{} {} {}", c.name, c.subject, c.max_error);
        }
        assert!(checks.iter().any(|c| c.name == "orthonormality"));
    }

    #[test]
    fn weight_sum_identity_is_off_by_the_first_weight() {
        let checks = identity_suite(&[], &[WeightKind::Fejer], 1).unwrap();
        assert!(!checks[0].passed);
        // relative error q_0 / Q_n peaks at n = 1
        assert!((checks[0].max_error - 1.0).abs() < 1e-15);
    }

    #[test]
    fn drift_and_samples() {
        assert!((max_drift(&[1.0, 1.1, 1.1]) - 0.1).abs() < 1e-12);
        assert_eq!(max_drift(&[2.0]), 0.0);
        assert_eq!(sampled_indices(1, 5, 64), vec![1, 2, 3, 4, 5]);
        let s = sampled_indices(1, 1000, 10);
        assert!(s.len() <= 11 && s[0] == 1 && *s.last().unwrap() == 1000);
    }

    #[test]
    fn small_grids_run() {
        let grid = AtomGrid { levels: vec![3, 4], ps: vec![0.4], atoms: 6, seed: 1, cap_factor: 2 };
        let m = maximal_suite(&grid, &[WeightKind::Riesz, WeightKind::B { alpha: 1.0, beta: 1 }]).unwrap();
        assert_eq!(m.len(), 4);
        for r in &m {
            assert_eq!(r.values.len(), 6);
            assert!(r.domination_excess.unwrap() <= DOMINATION_SLACK);
        }
        let s = strong_suite(&grid, &[WeightKind::Fejer]).unwrap();
        assert!(s.iter().all(|r| r.nullity < NULLITY_TOLERANCE && r.covered));
    }
}
