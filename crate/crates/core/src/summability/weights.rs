use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The weight families implemented by the toolkit.
///
/// `Fejer` (read as `sigma_n`), `Cesaro` and `NorlundLog` generate Nörlund
/// means; every other family generates `T` means. The `T` mean of the
/// constant sequence is `((n-1)/n) sigma_{n-1}` and stays available through
/// [`crate::summability::t_mean`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightKind {
    /// `q_k = 1`.
    Fejer,
    /// `q_0 = 0`, `q_k = 1/k`.
    Riesz,
    /// Nörlund weights `q_j = A_j^{alpha - 1}`.
    Cesaro { alpha: f64 },
    /// `T` weights `q_k = A_k^{alpha - 1}`.
    U { alpha: f64 },
    /// `q_0 = 0`, `q_k = k^{alpha - 1}`.
    V { alpha: f64 },
    /// `q_0 = 0`, `q_k = max(log^(beta)(k^alpha), 0)`.
    B { alpha: f64, beta: u32 },
    /// Nörlund weights `q_0 = 0`, `q_j = 1/j`.
    NorlundLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanKind {
    /// `(1/Q_n) sum_{k<n} q_k S_k f`.
    T,
    /// `(1/Q_n) sum_{k=1}^{n} q_{n-k} S_k f`.
    Norlund,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Constant,
    NonIncreasing,
    NonDecreasing,
    Neither,
}

impl Monotonicity {
    pub fn is_non_increasing(self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::NonIncreasing)
    }

    pub fn is_non_decreasing(self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::NonDecreasing)
    }
}

impl WeightKind {
    pub fn mean_kind(&self) -> MeanKind {
        match self {
            WeightKind::Fejer | WeightKind::Cesaro { .. } | WeightKind::NorlundLog => {
                MeanKind::Norlund
            }
            _ => MeanKind::T,
        }
    }

    /// Short identifier used in reports, e.g. `u(0.5)` or `b(1,1)`.
    pub fn id(&self) -> String {
        match self {
            WeightKind::Fejer => "fejer".into(),
            WeightKind::Riesz => "riesz".into(),
            WeightKind::Cesaro { alpha } => format!("cesaro({alpha})"),
            WeightKind::U { alpha } => format!("u({alpha})"),
            WeightKind::V { alpha } => format!("v({alpha})"),
            WeightKind::B { alpha, beta } => format!("b({alpha},{beta})"),
            WeightKind::NorlundLog => "norlund_log".into(),
        }
    }

    /// Parameter ranges: `0 < alpha < 1` for the Cesàro-type families,
    /// `alpha > 0` and `beta >= 1` for the iterated-logarithm family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightKind::Cesaro { alpha } | WeightKind::U { alpha } | WeightKind::V { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::Parameter(format!(
                        "{}: alpha must lie in (0, 1)",
                        self.id()
                    )));
                }
            }
            WeightKind::B { alpha, beta } => {
                if !(alpha > 0.0 && alpha.is_finite()) || beta == 0 {
                    return Err(Error::Parameter(format!(
                        "{}: need alpha > 0 and beta >= 1",
                        self.id()
                    )));
                }
            }
            WeightKind::Fejer | WeightKind::Riesz | WeightKind::NorlundLog => {}
        }
        Ok(())
    }

    /// `q_0, ..., q_{len-1}`.
    fn generate(&self, len: usize) -> Vec<f64> {
        match *self {
            WeightKind::Fejer => vec![1.0; len],
            WeightKind::Riesz | WeightKind::NorlundLog => (0..len)
                .map(|k| if k == 0 { 0.0 } else { 1.0 / k as f64 })
                .collect(),
            WeightKind::Cesaro { alpha } | WeightKind::U { alpha } => {
                let mut out = Vec::with_capacity(len);
                let mut a = 1.0;
                for k in 0..len {
                    if k > 0 {
                        a *= (k as f64 + alpha - 1.0) / k as f64;
                    }
                    out.push(a);
                }
                out
            }
            WeightKind::V { alpha } => (0..len)
                .map(|k| if k == 0 { 0.0 } else { (k as f64).powf(alpha - 1.0) })
                .collect(),
            WeightKind::B { alpha, beta } => (0..len)
                .map(|k| if k == 0 { 0.0 } else { iterated_log(alpha * (k as f64).ln(), beta - 1) })
                .collect(),
        }
    }
}

/// `log^(extra)` applied to an already-logged value, clamped to zero wherever
/// an intermediate value leaves the domain of the logarithm.
fn iterated_log(mut v: f64, extra: u32) -> f64 {
    for _ in 0..extra {
        if v <= 0.0 {
            return 0.0;
        }
        v = v.ln();
    }
    v.max(0.0)
}

/// `A_n^alpha = (alpha+1)...(alpha+n)/n!`, with `A_0^alpha = 1`.
pub fn a_binom(alpha: f64, n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * (k as f64 + alpha) / k as f64)
}

/// A non-negative weight sequence `q_0, ..., q_{len-1}` with its prefix sums
/// `Q_n = sum_{k<n} q_k` for `n <= len`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSeq {
    kind: WeightKind,
    q: Vec<f64>,
    prefix: Vec<f64>,
    monotonicity: Monotonicity,
}

/// Builds `len` weights of the given family after validating its parameters.
pub fn make_weights(kind: WeightKind, len: usize) -> Result<WeightSeq> {
    kind.validate()?;
    Ok(make_weights_unchecked(kind, len))
}

/// Same as [`make_weights`] without the parameter-range check, for exploration.
pub fn make_weights_unchecked(kind: WeightKind, len: usize) -> WeightSeq {
    let q = kind.generate(len);
    let prefix = neumaier_prefix(&q);
    let monotonicity = classify(&q);
    WeightSeq {
        kind,
        q,
        prefix,
        monotonicity,
    }
}

fn neumaier_prefix(q: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(q.len() + 1);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    out.push(0.0);
    for &v in q {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        out.push(sum + comp);
    }
    out
}

/// Monotonicity over the stored range; a leading `q_0 = 0` is ignored.
fn classify(q: &[f64]) -> Monotonicity {
    let start = usize::from(q.first() == Some(&0.0));
    let tail = &q[start.min(q.len())..];
    let mut up = false;
    let mut down = false;
    for w in tail.windows(2) {
        if w[1] > w[0] {
            up = true;
        } else if w[1] < w[0] {
            down = true;
        }
    }
    match (up, down) {
        (false, false) => Monotonicity::Constant,
        (false, true) => Monotonicity::NonIncreasing,
        (true, false) => Monotonicity::NonDecreasing,
        (true, true) => Monotonicity::Neither,
    }
}

impl WeightSeq {
    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn name(&self) -> String {
        self.kind.id()
    }

    pub fn mean_kind(&self) -> MeanKind {
        self.kind.mean_kind()
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    /// Number of stored weights; `Q_n` is available for `n <= len`.
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn q(&self, k: usize) -> f64 {
        self.q[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.q
    }

    #[allow(non_snake_case)]
    pub fn Q(&self, n: usize) -> f64 {
        self.prefix[n]
    }

    pub fn prefix_sums(&self) -> &[f64] {
        &self.prefix
    }

    /// `Q_n`, failing when it vanishes or `n` exceeds the stored range.
    pub fn checked_q(&self, n: usize) -> Result<f64> {
        if n > self.len() {
            return Err(crate::error::out_of_range(
                "n",
                n,
                format!("[0, {}] for weights {}", self.len(), self.name()),
            ));
        }
        let q = self.prefix[n];
        if q > 0.0 {
            Ok(q)
        } else {
            Err(Error::DegenerateWeights {
                name: self.name(),
                n,
            })
        }
    }

    /// Smallest `n >= 1` with `Q_n > 0`.
    pub fn first_defined(&self) -> Option<usize> {
        (1..=self.len()).find(|&n| self.prefix[n] > 0.0)
    }

    /// Right-hand side of the Abel summation of the weights:
    /// `sum_{j=0}^{n-2} (q_j - q_{j+1}) j + q_{n-1} (n-1)`.
    pub fn abel_sum(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let inner: f64 = (0..n.saturating_sub(1))
            .map(|j| (self.q[j] - self.q[j + 1]) * j as f64)
            .sum();
        inner + self.q[n - 1] * (n - 1) as f64
    }
}

/// Finite-range proxy for an `O(1/n)` condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioDiagnostic {
    /// Supremum of the ratio over the working range.
    pub sup: f64,
    pub sup_at: usize,
    /// Supremum before the last decade `[range_end/10, range_end]`.
    pub sup_before_last_decade: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub family: String,
    pub range_end: usize,
    pub monotonicity: Monotonicity,
    /// `n q_{n-1} / Q_n` bounded.
    pub fn01: RatioDiagnostic,
    /// `n / Q_n` bounded.
    pub cond0: RatioDiagnostic,
    pub q_at_end: f64,
    /// `Q_end / Q_{end/2}`; stays near 1 for non-regular methods.
    pub q_growth_ratio: f64,
}

/// Which theorem hypotheses a weight sequence meets on the checked range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    /// Non-increasing weights (maximal operator, strong sums for `p < 1/2`).
    pub non_increasing: bool,
    /// Non-decreasing weights with `q_{n-1}/Q_n = O(1/n)`.
    pub non_decreasing_fn01: bool,
    /// Non-increasing weights with `1/Q_n = O(1/n)` (strong sum at `p = 1/2`).
    pub non_increasing_cond0: bool,
    /// Non-increasing weights with `q_{n-1}/Q_n = O(1/n)`: the literal reading
    /// of the `p = 1/2` strong-sum statement for non-decreasing families.
    pub non_increasing_fn01: bool,
}

impl ConditionReport {
    pub fn hypotheses(&self) -> Hypotheses {
        Hypotheses {
            non_increasing: self.monotonicity.is_non_increasing(),
            non_decreasing_fn01: self.monotonicity.is_non_decreasing() && self.fn01.satisfied,
            non_increasing_cond0: self.monotonicity.is_non_increasing() && self.cond0.satisfied,
            non_increasing_fn01: self.monotonicity.is_non_increasing() && self.fn01.satisfied,
        }
    }

    /// The family is covered by at least one maximal-operator theorem.
    pub fn meets_theorem_hypotheses(&self) -> bool {
        let h = self.hypotheses();
        h.non_increasing || h.non_decreasing_fn01
    }
}

/// Bound on the finite-range sup for an `O(1/n)` verdict.
pub const CONDITION_SUP_BOUND: f64 = 64.0;

fn ratio_diagnostic(range_end: usize, first: usize, ratio: impl Fn(usize) -> f64) -> RatioDiagnostic {
    let decade = (range_end / 10).max(first);
    let mut sup = f64::NEG_INFINITY;
    let mut sup_at = first;
    let mut before = f64::NEG_INFINITY;
    for n in first..=range_end {
        let r = ratio(n);
        if n < decade {
            before = before.max(r);
        }
        if r > sup {
            sup = r;
            sup_at = n;
        }
    }
    if before == f64::NEG_INFINITY {
        before = sup;
    }
    // The running sup must not grow over the last decade.
    let flat = sup <= before * (1.0 + 1e-12);
    RatioDiagnostic {
        sup,
        sup_at,
        sup_before_last_decade: before,
        satisfied: sup <= CONDITION_SUP_BOUND && flat,
    }
}

/// Evaluates monotonicity and the `O(1/n)` conditions over `n <= range_end`.
///
/// Indices with `Q_n = 0` are skipped.
pub fn check_conditions(w: &WeightSeq, range_end: usize) -> Result<ConditionReport> {
    if range_end < 2 {
        return Err(Error::Parameter("range_end must be at least 2".into()));
    }
    if range_end > w.len() {
        return Err(crate::error::out_of_range(
            "range_end",
            range_end,
            format!("[2, {}]", w.len()),
        ));
    }
    let first = w
        .first_defined()
        .filter(|&n| n <= range_end)
        .ok_or_else(|| Error::DegenerateWeights {
            name: w.name(),
            n: range_end,
        })?;
    let fn01 = ratio_diagnostic(range_end, first, |n| n as f64 * w.q(n - 1) / w.Q(n));
    let cond0 = ratio_diagnostic(range_end, first, |n| n as f64 / w.Q(n));
    let half = (range_end / 2).max(first);
    Ok(ConditionReport {
        family: w.name(),
        range_end,
        monotonicity: classify(&w.weights()[..range_end]),
        fn01,
        cond0,
        q_at_end: w.Q(range_end),
        q_growth_ratio: w.Q(range_end) / w.Q(half),
    })
}
