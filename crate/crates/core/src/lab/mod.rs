//! Weighted maximal operators, strong-convergence sums, kernel-integral
//! estimates and the experiment suites built on them.

pub mod suites;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ComplementCell, GroupSpec};
use crate::group::Interval;
use crate::hardy::{dyadic_atom, hardy_quasinorm, lp_power, make_random_atom_stream, PAtom};
use crate::kernels::{dirichlet_tail_kernel, t_kernel};
use crate::par;
use crate::signal::Signal;
use crate::summability::{
    check_conditions, make_weights, sweep_means, sweep_means_spectrum, MeanKind, WeightKind,
    WeightSeq,
};
use crate::transform::{chop_spectrum, rounding_floor, transform_fast};

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("p must lie in (0, 1/2], got {p}")))
    }
}

/// `[1/2 + p]` doubled: `0` for `p < 1/2`, `2` at `p = 1/2`.
fn log_exponent(p: f64) -> f64 {
    2.0 * (0.5 + p).floor()
}

/// `w(n, p) = (n+1)^{1/p-2} log2(n+1)^{2[1/2+p]}`.
pub fn weight(n: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    if n == 0 {
        return Err(Error::Parameter("weight index must be at least 1".into()));
    }
    Ok(WeightMode::Weighted.weight(n, p))
}

/// How `|T_n f|` is normalized before taking the supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WeightMode {
    Weighted,
    Unweighted,
    /// For `p < 1/2` the power drops to `1/p - 2 - eps`; at `p = 1/2` the
    /// log exponent drops to `2 - eps`.
    Weakened { eps: f64 },
}

impl WeightMode {
    pub fn weight(self, n: usize, p: f64) -> f64 {
        let x = (n + 1) as f64;
        let (power, log_power) = match self {
            WeightMode::Unweighted => return 1.0,
            WeightMode::Weighted => (1.0 / p - 2.0, log_exponent(p)),
            WeightMode::Weakened { eps } if log_exponent(p) > 0.0 => {
                (1.0 / p - 2.0, log_exponent(p) - eps)
            }
            WeightMode::Weakened { eps } => (1.0 / p - 2.0 - eps, 0.0),
        };
        let mut w = x.powf(power);
        if log_power != 0.0 {
            w *= x.log2().powf(log_power);
        }
        w
    }

    pub fn id(self) -> String {
        match self {
            WeightMode::Weighted => "weighted".into(),
            WeightMode::Unweighted => "unweighted".into(),
            WeightMode::Weakened { eps } => format!("weakened({eps})"),
        }
    }
}

/// A weight family together with the kind of mean taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub weights: WeightKind,
    pub mean: MeanKind,
}

impl Family {
    pub fn t(weights: WeightKind) -> Self {
        Family { weights, mean: MeanKind::T }
    }

    pub fn natural(weights: WeightKind) -> Self {
        Family { weights, mean: weights.mean_kind() }
    }

    /// The Fejér means `sigma_n`.
    pub fn sigma() -> Self {
        Family::natural(WeightKind::Fejer)
    }

    pub fn id(&self) -> String {
        if self.mean == self.weights.mean_kind() {
            self.weights.id()
        } else {
            let tag = match self.mean {
                MeanKind::T => "t",
                MeanKind::Norlund => "norlund",
            };
            format!("{}_{tag}", self.weights.id())
        }
    }

    pub fn make(&self, len: usize) -> Result<WeightSeq> {
        make_weights(self.weights, len)
    }
}

/// One normalization of the maximal operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probe {
    pub p: f64,
    pub mode: WeightMode,
}

/// Pointwise `max_{lo <= n <= hi} |mean_n f| / w(n)` for several probes at once;
/// the means are swept a single time.
pub fn maximal_ops(
    f: &Signal,
    w: &WeightSeq,
    kind: MeanKind,
    lo: usize,
    hi: usize,
    probes: &[Probe],
) -> Result<Vec<Vec<f64>>> {
    let lo = lo.max(1);
    if lo > hi {
        return Err(Error::EmptyRange);
    }
    for pr in probes {
        if pr.mode != WeightMode::Unweighted {
            check_p(pr.p)?;
        }
    }
    let mut out = vec![vec![0.0f64; f.len()]; probes.len()];
    let mut scratch = vec![0.0f64; f.len()];
    sweep_means(f, w, kind, lo, hi, |n, m| {
        for (s, z) in scratch.iter_mut().zip(m) {
            *s = z.norm();
        }
        for (o, pr) in out.iter_mut().zip(probes) {
            let inv = 1.0 / pr.mode.weight(n, pr.p);
            for (a, s) in o.iter_mut().zip(&scratch) {
                *a = a.max(s * inv);
            }
        }
    })?;
    Ok(out)
}

/// Pointwise `max_{lo <= n <= hi} |mean_n f| / w(n)`.
pub fn maximal_op(
    f: &Signal,
    w: &WeightSeq,
    kind: MeanKind,
    p: f64,
    mode: WeightMode,
    lo: usize,
    hi: usize,
) -> Result<Vec<f64>> {
    Ok(maximal_ops(f, w, kind, lo, hi, &[Probe { p, mode }])?.remove(0))
}

/// `||g||_p` of a nonnegative sample vector.
pub fn lp_of(values: &[f64], p: f64) -> f64 {
    lp_power(values, p).powf(1.0 / p)
}

/// Result of comparing `T~*_p f` with `C sigma~*_p f` pointwise.
#[derive(Debug, Clone, Serialize)]
pub struct DominationReport {
    pub family: String,
    pub p: f64,
    pub n_max: usize,
    /// `C`: `1` for non-increasing weights, otherwise
    /// `max_n (2 q_{n-1}(n-1) - Q_n + q_0) / Q_n` over the range.
    pub factor: f64,
    /// `max_x (T~*(x) - C sigma~*(x))`; negative when strictly dominated.
    pub max_violation: f64,
    /// Points where the excess is above the slack.
    pub violations: usize,
}

/// `C` in `T~*_p <= C sigma~*_p` over `n <= hi`, or `None` for non-monotone weights.
pub fn domination_factor(w: &WeightSeq, hi: usize) -> Option<f64> {
    let mono = w.monotonicity();
    if mono.is_non_increasing() {
        Some(1.0)
    } else if mono.is_non_decreasing() {
        let q0 = w.q(0);
        Some(
            (2..=hi)
                .filter(|&n| w.Q(n) > 0.0)
                .map(|n| (2.0 * w.q(n - 1) * (n - 1) as f64 - w.Q(n) + q0) / w.Q(n))
                .fold(1.0, f64::max),
        )
    } else {
        None
    }
}

/// Checks `T~*_p f <= C sigma~*_p f` for `T` means of monotone weights over `n <= hi`.
pub fn domination_check(f: &Signal, w: &WeightSeq, p: f64, hi: usize, slack: f64) -> Result<DominationReport> {
    check_p(p)?;
    let factor = domination_factor(w, hi).ok_or_else(|| {
        Error::NotApplicable(format!("weights {} are not monotone", w.name()))
    })?;
    let probe = [Probe { p, mode: WeightMode::Weighted }];
    let t = maximal_ops(f, w, MeanKind::T, 1, hi, &probe)?.remove(0);
    let fejer = make_weights(WeightKind::Fejer, hi + 1)?;
    let s = maximal_ops(f, &fejer, MeanKind::Norlund, 1, hi, &probe)?.remove(0);
    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = 0;
    for (a, b) in t.iter().zip(&s) {
        let excess = a - factor * b;
        max_violation = max_violation.max(excess);
        if excess > slack {
            violations += 1;
        }
    }
    Ok(DominationReport {
        family: Family::t(w.kind()).id(),
        p,
        n_max: hi,
        factor,
        max_violation,
        violations,
    })
}

/// Partial strong-convergence sum of `T_k f` against `||f||_{H_p}^p`.
#[derive(Debug, Clone, Serialize)]
pub struct StrongConvergenceReport {
    pub family: String,
    pub p: f64,
    pub n_end: usize,
    /// `sum_{k<=n_end} ||T_k f||_p^p / k^{2-2p}` for `p < 1/2`, and
    /// `(1/log2 n_end) sum_{k<=n_end} ||T_k f||_{1/2}^{1/2} / k` at `p = 1/2`.
    pub partial_sum: f64,
    /// The sum before the `1/log` normalization.
    pub raw_sum: f64,
    pub hardy_norm: f64,
    /// `partial_sum / hardy_norm^p`.
    pub ratio: f64,
    /// Running raw sums at `n = 2^j` and at `n_end`.
    pub checkpoints: Vec<(usize, f64)>,
}

/// Strong-convergence sums for several `p` from one sweep of the `T` means.
pub fn strong_convergence_sums(f: &Signal, w: &WeightSeq, ps: &[f64], n_end: usize) -> Result<Vec<StrongConvergenceReport>> {
    for &p in ps {
        check_p(p)?;
    }
    if n_end < 2 {
        return Err(Error::Parameter("n_end must be at least 2".into()));
    }
    let mut raw = vec![0.0f64; ps.len()];
    let mut checkpoints = vec![Vec::new(); ps.len()];
    let mut abs = vec![0.0f64; f.len()];
    let mut last_seen = 0;
    // Exact zeros (atoms below their level) must not turn into rounding
    // residue, which the p-th power would inflate.
    let spectrum = chop_spectrum(&transform_fast(f), rounding_floor(f));
    sweep_means_spectrum(&spectrum, w, MeanKind::T, 1, n_end, |k, m| {
        for (a, z) in abs.iter_mut().zip(m) {
            *a = z.norm();
        }
        for (i, &p) in ps.iter().enumerate() {
            let exponent = if p < 0.5 { 2.0 - 2.0 * p } else { 1.0 };
            raw[i] += lp_power(&abs, p) / (k as f64).powf(exponent);
            if k.is_power_of_two() || k == n_end {
                checkpoints[i].push((k, raw[i]));
            }
        }
        last_seen = k;
    })?;
    debug_assert!(last_seen == n_end);
    ps.iter()
        .enumerate()
        .map(|(i, &p)| {
            let partial_sum = if p < 0.5 { raw[i] } else { raw[i] / (n_end as f64).log2() };
            let hardy_norm = hardy_quasinorm(f, p)?;
            Ok(StrongConvergenceReport {
                family: Family::t(w.kind()).id(),
                p,
                n_end,
                partial_sum,
                raw_sum: raw[i],
                hardy_norm,
                ratio: partial_sum / hardy_norm.powf(p),
                checkpoints: std::mem::take(&mut checkpoints[i]),
            })
        })
        .collect()
}

pub fn strong_convergence_sum(f: &Signal, w: &WeightSeq, p: f64, n_end: usize) -> Result<StrongConvergenceReport> {
    Ok(strong_convergence_sums(f, w, &[p], n_end)?.remove(0))
}

/// The kernel-integral estimates over complement cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// Tail kernel, non-increasing weights, shape `M_l M_k / M_N^2`.
    TailNonIncreasing,
    /// Tail kernel, non-increasing weights with `1/Q_n = O(1/n)`; shape
    /// `M_l M_k / (n M_N)` for `l < N` and `M_k / M_N` for `l = N`.
    TailNonIncreasingCond0,
    /// As [`LemmaId::TailNonIncreasingCond0`] with shape `M_l M_k / M_N^2`.
    TailNonIncreasingCond0Square,
    /// `F_n`, non-decreasing weights with `q_{n-1}/Q_n = O(1/n)`; shape as
    /// [`LemmaId::TailNonIncreasingCond0`].
    KernelNonDecreasing,
    /// `F_n`, non-decreasing weights, shape `M_l M_k / M_N^2`.
    KernelNonDecreasingSquare,
}

impl LemmaId {
    pub const ALL: [LemmaId; 5] = [
        LemmaId::TailNonIncreasing,
        LemmaId::TailNonIncreasingCond0,
        LemmaId::TailNonIncreasingCond0Square,
        LemmaId::KernelNonDecreasing,
        LemmaId::KernelNonDecreasingSquare,
    ];

    pub fn id(self) -> &'static str {
        match self {
            LemmaId::TailNonIncreasing => "tail_nonincreasing",
            LemmaId::TailNonIncreasingCond0 => "tail_nonincreasing_cond0",
            LemmaId::TailNonIncreasingCond0Square => "tail_nonincreasing_cond0_square",
            LemmaId::KernelNonDecreasing => "kernel_nondecreasing",
            LemmaId::KernelNonDecreasingSquare => "kernel_nondecreasing_square",
        }
    }

    fn uses_tail(self) -> bool {
        matches!(
            self,
            LemmaId::TailNonIncreasing
                | LemmaId::TailNonIncreasingCond0
                | LemmaId::TailNonIncreasingCond0Square
        )
    }

    /// Bound shape without its constant.
    pub fn shape(self, spec: &GroupSpec, level: usize, cell: ComplementCell, n: usize) -> f64 {
        let mk = spec.big_m(cell.k) as f64;
        let ml = spec.big_m(cell.l) as f64;
        let mn = spec.big_m(level) as f64;
        match self {
            LemmaId::TailNonIncreasingCond0 | LemmaId::KernelNonDecreasing => {
                if cell.l < level {
                    ml * mk / (n as f64 * mn)
                } else {
                    mk / mn
                }
            }
            _ => ml * mk / (mn * mn),
        }
    }

    /// Checks the monotonicity class and side condition on `n <= range_end`.
    pub fn applies_to(self, w: &WeightSeq, range_end: usize) -> Result<()> {
        let h = check_conditions(w, range_end)?.hypotheses();
        let ok = match self {
            LemmaId::TailNonIncreasing => h.non_increasing,
            LemmaId::TailNonIncreasingCond0 | LemmaId::TailNonIncreasingCond0Square => {
                h.non_increasing_cond0
            }
            LemmaId::KernelNonDecreasing | LemmaId::KernelNonDecreasingSquare => h.non_decreasing_fn01,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NotApplicable(format!(
                "{} does not cover weights {}",
                self.id(),
                w.name()
            )))
        }
    }
}

/// One `(cell, n)` entry: the largest integral over the points of the cell.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaRow {
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub lhs: f64,
    pub bound_shape: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub family: String,
    pub level: usize,
    pub rows: Vec<LemmaRow>,
    /// Largest ratio over all rows: the empirical constant.
    pub constant: f64,
}

/// `integral_{I_level} |K(x - t)| dmu(t)` for every `x` of the group.
fn local_integrals(kernel: &Signal, level: usize) -> Vec<f64> {
    let spec = kernel.spec();
    let order = spec.order();
    let step = spec.big_m(level);
    let v = kernel.as_slice();
    (0..order)
        .map(|x| {
            (0..order)
                .step_by(step)
                .map(|t| v[spec.sub_indices(x, t)].norm())
                .sum::<f64>()
                / order as f64
        })
        .collect()
}

/// Evaluates a kernel-integral estimate over all complement cells of `I_level`
/// and all `n` in `lo..=hi`. The group must resolve `D_n` for `n <= hi`.
pub fn lemma_integral_check(
    spec: &GroupSpec,
    w: &WeightSeq,
    lemma: LemmaId,
    level: usize,
    lo: usize,
    hi: usize,
) -> Result<LemmaReport> {
    if level == 0 || level >= spec.levels() {
        return Err(crate::error::out_of_range("level", level, format!("[1, {})", spec.levels())));
    }
    let mn = spec.big_m(level);
    let lo = lo.max(mn + 1);
    if lo > hi {
        return Err(Error::EmptyRange);
    }
    lemma.applies_to(w, hi)?;
    // the cell of each point outside I_level
    let cells: Vec<Option<ComplementCell>> = (0..spec.order())
        .map(|x| {
            let k = spec.first_nonzero_digit(x % mn)?;
            let rest = x % mn - spec.digit(x, k) * spec.big_m(k);
            let l = spec.first_nonzero_digit(rest).unwrap_or(level);
            Some(ComplementCell { k, l })
        })
        .collect();
    let all_cells = crate::group::complement_cells(level);
    let per_n: Vec<Result<Vec<LemmaRow>>> = par::map_range(hi - lo + 1, |i| {
        let n = lo + i;
        let kernel = if lemma.uses_tail() {
            dirichlet_tail_kernel(spec, w, n, mn)?
        } else {
            t_kernel(spec, w, n)?
        };
        let lhs = local_integrals(&kernel, level);
        let mut best = vec![0.0f64; all_cells.len()];
        for (x, c) in cells.iter().enumerate() {
            if let Some(c) = c {
                let idx = all_cells.iter().position(|d| d == c).expect("cell listed");
                best[idx] = best[idx].max(lhs[x]);
            }
        }
        Ok(all_cells
            .iter()
            .zip(best)
            .map(|(&c, lhs)| {
                let shape = lemma.shape(spec, level, c, n);
                LemmaRow { k: c.k, l: c.l, n, lhs, bound_shape: shape, ratio: lhs / shape }
            })
            .collect())
    });
    let mut rows = Vec::new();
    for r in per_n {
        rows.extend(r?);
    }
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(LemmaReport {
        lemma,
        family: w.name(),
        level,
        rows,
        constant,
    })
}

/// `count` random extremal atoms; atom `i` sits on level `i mod N` and uses
/// stream `i` of the seed.
pub fn random_atoms(spec: &GroupSpec, p: f64, count: usize, seed: u64) -> Result<Vec<PAtom>> {
    par::map_range(count, |i| {
        make_random_atom_stream(spec, p, i % spec.levels(), seed, i as u64)
    })
    .into_iter()
    .collect()
}

/// The two-level dyadic atoms on `I_s(0)` for every `s < N`.
pub fn dyadic_atoms(spec: &GroupSpec, p: f64) -> Result<Vec<PAtom>> {
    (0..spec.levels())
        .map(|s| dyadic_atom(spec, p, &Interval::at_zero(spec, s)?))
        .collect()
}

/// `max over atoms of ||T~ a||_p` for each probe, with the sup over
/// `n <= hi`.
pub fn worst_atom_norms(
    atoms: &[PAtom],
    family: Family,
    hi: usize,
    probes: &[Probe],
) -> Result<Vec<f64>> {
    let w = family.make(hi + 1)?;
    let per_atom: Vec<Result<Vec<f64>>> = par::map(atoms, |a| {
        let ops = maximal_ops(a.values(), &w, family.mean, 1, hi, probes)?;
        Ok(ops.iter().zip(probes).map(|(o, pr)| lp_of(o, pr.p)).collect())
    });
    let mut best = vec![0.0f64; probes.len()];
    for r in per_atom {
        for (b, v) in best.iter_mut().zip(r?) {
            *b = b.max(v);
        }
    }
    Ok(best)
}

/// One `N` of a sharpness series.
#[derive(Debug, Clone, Serialize)]
pub struct SharpnessPoint {
    pub levels: usize,
    pub weighted: f64,
    pub weakened: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessReport {
    pub family: String,
    pub p: f64,
    pub eps: f64,
    pub points: Vec<SharpnessPoint>,
    /// `weakened(N+1) / weakened(N)` for consecutive `N`.
    pub growth: Vec<f64>,
    /// `weighted(N+1) / weighted(N)`.
    pub weighted_drift: Vec<f64>,
}

/// Worst-atom series with the exact weight and with the weakened weight over
/// Walsh groups of the given sizes. Atoms are the dyadic atoms plus `count`
/// random ones; the mean index runs to `cap_factor * M_N`.
pub fn sharpness_probe(
    p: f64,
    family: Family,
    eps: f64,
    levels: &[usize],
    count: usize,
    seed: u64,
    cap_factor: usize,
) -> Result<SharpnessReport> {
    check_p(p)?;
    if eps < 0.0 || (p < 0.5 && eps >= 1.0 / p - 2.0) {
        return Err(Error::Parameter(format!("eps = {eps} is outside the admissible range for p = {p}")));
    }
    let probes = [
        Probe { p, mode: WeightMode::Weighted },
        Probe { p, mode: WeightMode::Weakened { eps } },
    ];
    let mut points = Vec::new();
    for &n in levels {
        let spec = GroupSpec::walsh(n)?;
        let mut atoms = dyadic_atoms(&spec, p)?;
        atoms.extend(random_atoms(&spec, p, count, seed)?);
        let v = worst_atom_norms(&atoms, family, cap_factor * spec.order(), &probes)?;
        points.push(SharpnessPoint { levels: n, weighted: v[0], weakened: v[1] });
    }
    let ratio = |f: fn(&SharpnessPoint) -> f64| -> Vec<f64> {
        points.windows(2).map(|w| f(&w[1]) / f(&w[0])).collect()
    };
    let growth = ratio(|s| s.weakened);
    let weighted_drift = ratio(|s| s.weighted);
    Ok(SharpnessReport {
        family: family.id(),
        p,
        eps,
        points,
        growth,
        weighted_drift,
    })
}

/// `max |T_n a|` over `n <= M_level` for an atom on `I_level`; zero in exact arithmetic.
pub fn atom_nullity(atom: &PAtom, w: &WeightSeq) -> Result<f64> {
    let hi = atom.values().spec().big_m(atom.support().level());
    let mut worst = 0.0f64;
    sweep_means(atom.values(), w, MeanKind::T, 1, hi, |_, m| {
        for z in m {
            worst = worst.max(z.norm());
        }
    })?;
    Ok(worst)
}
