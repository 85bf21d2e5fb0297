use num_complex::Complex64;

use crate::error::{out_of_range, Result};
use crate::signal::{Signal, Spectrum};
use crate::transform::{inverse_transform, transform_fast, VilenkinTable};

use super::weights::{make_weights, MeanKind, Monotonicity, WeightKind, WeightSeq};

/// Factor multiplying `f^(j) psi_j` in the `n`-th mean.
///
/// `T` means: `(Q_n - Q_{j+1}) / Q_n`. Nörlund means: `Q_{n-j} / Q_n`.
/// Both vanish for `j >= n`.
pub fn multiplier(w: &WeightSeq, kind: MeanKind, n: usize, j: usize, q_n: f64) -> f64 {
    if j >= n {
        return 0.0;
    }
    match kind {
        MeanKind::T => (q_n - w.Q(j + 1)) / q_n,
        MeanKind::Norlund => w.Q(n - j) / q_n,
    }
}

fn apply(spectrum: &Spectrum, w: &WeightSeq, kind: MeanKind, n: usize) -> Result<Signal> {
    if n == 0 {
        return Err(out_of_range("n", n, "n >= 1"));
    }
    let q_n = w.checked_q(n)?;
    let mut s = spectrum.clone();
    for (j, z) in s.as_mut_slice().iter_mut().enumerate() {
        *z *= multiplier(w, kind, n, j, q_n);
    }
    Ok(inverse_transform(&s))
}

/// The `n`-th mean of the given kind, from a precomputed spectrum.
pub fn mean_from_spectrum(spectrum: &Spectrum, w: &WeightSeq, kind: MeanKind, n: usize) -> Result<Signal> {
    apply(spectrum, w, kind, n)
}

/// `T_n f = (1/Q_n) sum_{k=0}^{n-1} q_k S_k f`.
pub fn t_mean(f: &Signal, w: &WeightSeq, n: usize) -> Result<Signal> {
    apply(&transform_fast(f), w, MeanKind::T, n)
}

/// `t_n f = (1/Q_n) sum_{k=1}^{n} q_{n-k} S_k f`.
pub fn norlund_mean(f: &Signal, w: &WeightSeq, n: usize) -> Result<Signal> {
    apply(&transform_fast(f), w, MeanKind::Norlund, n)
}

/// The natural mean of the family (`T` or Nörlund).
pub fn mean(f: &Signal, w: &WeightSeq, n: usize) -> Result<Signal> {
    apply(&transform_fast(f), w, w.mean_kind(), n)
}

fn named(f: &Signal, kind: WeightKind, n: usize) -> Result<Signal> {
    let w = make_weights(kind, n + 1)?;
    mean(f, &w, n)
}

/// `sigma_n f = (1/n) sum_{k=1}^{n} S_k f`.
pub fn fejer_mean(f: &Signal, n: usize) -> Result<Signal> {
    // Fejér means are the Nörlund means of the constant sequence.
    let w = make_weights(WeightKind::Fejer, n + 1)?;
    norlund_mean(f, &w, n)
}

/// `R_n f = (1/l_n) sum_{k=1}^{n-1} S_k f / k`.
pub fn riesz_mean(f: &Signal, n: usize) -> Result<Signal> {
    named(f, WeightKind::Riesz, n)
}

pub fn u_mean(f: &Signal, alpha: f64, n: usize) -> Result<Signal> {
    named(f, WeightKind::U { alpha }, n)
}

pub fn v_mean(f: &Signal, alpha: f64, n: usize) -> Result<Signal> {
    named(f, WeightKind::V { alpha }, n)
}

pub fn b_mean(f: &Signal, alpha: f64, beta: u32, n: usize) -> Result<Signal> {
    named(f, WeightKind::B { alpha, beta }, n)
}

/// `(C, alpha)` means, normalized by the total weight `Q_n = A_{n-1}^alpha`.
pub fn cesaro_mean(f: &Signal, alpha: f64, n: usize) -> Result<Signal> {
    named(f, WeightKind::Cesaro { alpha }, n)
}

/// `L_n f = (1/l_n) sum_{k=1}^{n-1} S_k f / (n - k)`.
pub fn norlund_log_mean(f: &Signal, n: usize) -> Result<Signal> {
    named(f, WeightKind::NorlundLog, n)
}

/// Visits the means of `f` for `n` in `lo..=hi`, in increasing order.
///
/// Indices where `Q_n = 0` (the mean is undefined) are skipped. `T` means are
/// advanced incrementally in `O(M_N)` per index, using `S_k f = f` for
/// `k >= M_N`; Nörlund means cost one inverse transform per index.
pub fn sweep_means<F>(
    f: &Signal,
    w: &WeightSeq,
    kind: MeanKind,
    lo: usize,
    hi: usize,
    visit: F,
) -> Result<()>
where
    F: FnMut(usize, &[Complex64]),
{
    sweep_means_spectrum(&transform_fast(f), w, kind, lo, hi, visit)
}

/// [`sweep_means`] starting from the coefficients.
pub fn sweep_means_spectrum<F>(
    spectrum: &Spectrum,
    w: &WeightSeq,
    kind: MeanKind,
    lo: usize,
    hi: usize,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, &[Complex64]),
{
    if hi > w.len() {
        return Err(out_of_range(
            "n",
            hi,
            format!("[1, {}] for weights {}", w.len(), w.name()),
        ));
    }
    let lo = lo.max(1);
    // Nörlund means of constant weights are sigma_n, which also accumulate.
    let constant = kind == MeanKind::Norlund && w.monotonicity() == Monotonicity::Constant;
    match kind {
        _ if constant => {
            let spec = spectrum.spec();
            let order = spec.order();
            let table = VilenkinTable::new(spec);
            let zero = Complex64::new(0.0, 0.0);
            let mut partial = vec![zero; order];
            let mut acc = vec![zero; order];
            let mut out = vec![zero; order];
            let mut psi = vec![zero; order];
            for n in 1..=hi {
                // S_n f from S_{n-1} f
                if n - 1 < order {
                    let c = spectrum[n - 1];
                    if c != zero {
                        table.fill(n - 1, &mut psi);
                        for (s, p) in partial.iter_mut().zip(&psi) {
                            *s += c * p;
                        }
                    }
                }
                for (a, s) in acc.iter_mut().zip(&partial) {
                    *a += s;
                }
                if n >= lo {
                    let inv = 1.0 / n as f64;
                    for (o, a) in out.iter_mut().zip(&acc) {
                        *o = a * inv;
                    }
                    visit(n, &out);
                }
            }
        }
        MeanKind::T => {
            let spec = spectrum.spec();
            let order = spec.order();
            let table = VilenkinTable::new(spec);
            let zero = Complex64::new(0.0, 0.0);
            let mut partial = vec![zero; order];
            let mut acc = vec![zero; order];
            let mut out = vec![zero; order];
            let mut psi = vec![zero; order];
            for n in 0..=hi {
                let q_n = w.Q(n);
                if n >= lo && q_n > 0.0 {
                    let inv = 1.0 / q_n;
                    for (o, a) in out.iter_mut().zip(&acc) {
                        *o = a * inv;
                    }
                    visit(n, &out);
                }
                if n == hi {
                    break;
                }
                let qn = w.q(n);
                if qn != 0.0 {
                    for (a, s) in acc.iter_mut().zip(&partial) {
                        *a += s * qn;
                    }
                }
                if n < order {
                    let c = spectrum[n];
                    if c != zero {
                        table.fill(n, &mut psi);
                        for (s, p) in partial.iter_mut().zip(&psi) {
                            *s += c * p;
                        }
                    }
                }
            }
        }
        MeanKind::Norlund => {
            for n in lo..=hi {
                if w.Q(n) > 0.0 {
                    let m = apply(spectrum, w, kind, n)?;
                    visit(n, m.as_slice());
                }
            }
        }
    }
    Ok(())
}
