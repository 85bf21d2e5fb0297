//! Dirichlet, Fejér and `T` kernels, their closed forms, group convolution
//! and `L_1` norms.
//!
//! Kernels are materialized as full signals through their spectra: `D_n`
//! has coefficients `1` below `n`, `K_n` has `(n - j)/n`, and the `T` kernel
//! `F_n = (1/Q_n) sum_{k<n} q_k D_k` has `(Q_n - Q_{j+1})/Q_n`. The closed
//! forms below are independent routes used to cross-check those spectra.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::group::GroupSpec;
use crate::par;
use crate::signal::{Signal, Spectrum};
use crate::summability::{MeanKind, WeightSeq};
use crate::transform::{inverse_transform, roots_of_unity, transform_fast, VilenkinTable};

fn from_coeffs(spec: &GroupSpec, coeff: impl Fn(usize) -> f64) -> Signal {
    let s = Spectrum::from_fn(spec, |j| Complex64::new(coeff(j), 0.0));
    inverse_transform(&s)
}

fn check_upto(spec: &GroupSpec, n: usize) -> Result<()> {
    if n > spec.order() {
        Err(out_of_range("n", n, format!("[0, {}]", spec.order())))
    } else {
        Ok(())
    }
}

/// `D_n = sum_{k<n} psi_k`, `0 <= n <= M_N`.
pub fn dirichlet(spec: &GroupSpec, n: usize) -> Result<Signal> {
    check_upto(spec, n)?;
    Ok(from_coeffs(spec, |j| if j < n { 1.0 } else { 0.0 }))
}

/// Right-hand side of the digit factorization of `D_n`:
/// `psi_n * sum_j D_{M_j} * sum_{k=m_j-n_j}^{m_j-1} r_j^k`.
pub fn dirichlet_factored(spec: &GroupSpec, n: usize) -> Result<Signal> {
    spec.check_index(n)?;
    let order = spec.order();
    let table = VilenkinTable::new(spec);
    let psi = table.signal(n);
    let roots: Vec<_> = spec.radices().iter().map(|&m| roots_of_unity(m)).collect();
    let values = (0..order)
        .map(|x| {
            let mut total = Complex64::new(0.0, 0.0);
            for j in 0..spec.levels() {
                let nj = spec.digit(n, j);
                // D_{M_j}(x) = M_j on I_j, zero elsewhere.
                if nj == 0 || x % spec.big_m(j) != 0 {
                    continue;
                }
                let mj = spec.radix(j);
                let xj = spec.digit(x, j);
                let inner: Complex64 = (mj - nj..mj).map(|k| roots[j][(k * xj) % mj]).sum();
                total += inner * spec.big_m(j) as f64;
            }
            psi[x] * total
        })
        .collect();
    Ok(Signal::from_parts(spec.clone(), values))
}

/// `K_n = (1/n) sum_{k=1}^{n} D_k`, `1 <= n <= M_N`.
pub fn fejer_kernel(spec: &GroupSpec, n: usize) -> Result<Signal> {
    if n == 0 {
        return Err(out_of_range("n", 0, format!("[1, {}]", spec.order())));
    }
    check_upto(spec, n)?;
    let nf = n as f64;
    Ok(from_coeffs(spec, |j| if j < n { (n - j) as f64 / nf } else { 0.0 }))
}

/// `(1/n) sum_{k=0}^{n-1} D_k`, the averaging kernel with the lower index
/// range. It equals `((n-1)/n) K_{n-1}` and is the kernel the dyadic closed
/// form of [`fejer_dyadic_closed_form`] describes.
pub fn fejer_kernel_lower(spec: &GroupSpec, n: usize) -> Result<Signal> {
    if n == 0 {
        return Err(out_of_range("n", 0, format!("[1, {}]", spec.order())));
    }
    check_upto(spec, n)?;
    let nf = n as f64;
    Ok(from_coeffs(spec, |j| if j < n { (n - 1 - j) as f64 / nf } else { 0.0 }))
}

/// Closed form at the dyadic index `M_level`:
///
/// * `M_t / (1 - r_t(x))` on `I_t \ I_{t+1}` when `x - x_t e_t` lies in `I_level`,
/// * `(M_level - 1)/2` on `I_level`,
/// * `0` elsewhere.
///
/// This is [`fejer_kernel_lower`] at `M_level`; [`fejer_kernel`] at `M_level`
/// differs from it by `1` on `I_level` only.
pub fn fejer_dyadic_closed_form(spec: &GroupSpec, level: usize) -> Result<Signal> {
    if level > spec.levels() {
        return Err(out_of_range("level", level, format!("[0, {}]", spec.levels())));
    }
    let big = spec.big_m(level);
    let values = (0..spec.order())
        .map(|x| {
            if x % big == 0 {
                return Complex64::new((big as f64 - 1.0) / 2.0, 0.0);
            }
            let t = spec.first_nonzero_digit(x).expect("x outside I_level is nonzero");
            let xt = spec.digit(x, t);
            let rest = x - xt * spec.big_m(t);
            if t < level && rest.is_multiple_of(big) {
                let r = roots_of_unity(spec.radix(t))[xt];
                Complex64::new(spec.big_m(t) as f64, 0.0) / (Complex64::new(1.0, 0.0) - r)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(Signal::from_parts(spec.clone(), values))
}

fn t_kernel_checked(spec: &GroupSpec, w: &WeightSeq, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(out_of_range("n", 0, "n >= 1"));
    }
    check_upto(spec, n)?;
    w.checked_q(n)
}

/// `F_n = (1/Q_n) sum_{k=0}^{n-1} q_k D_k`, so that `T_n f = f * F_n`.
pub fn t_kernel(spec: &GroupSpec, w: &WeightSeq, n: usize) -> Result<Signal> {
    let q_n = t_kernel_checked(spec, w, n)?;
    Ok(from_coeffs(spec, |j| crate::summability::multiplier(w, MeanKind::T, n, j, q_n)))
}

/// Kernel of the Nörlund mean `t_n`, `(1/Q_n) sum_{k=1}^{n} q_{n-k} D_k`.
pub fn norlund_kernel(spec: &GroupSpec, w: &WeightSeq, n: usize) -> Result<Signal> {
    let q_n = t_kernel_checked(spec, w, n)?;
    Ok(from_coeffs(spec, |j| crate::summability::multiplier(w, MeanKind::Norlund, n, j, q_n)))
}

/// `F_n` through Abel summation over Fejér kernels:
/// `(1/Q_n) (sum_{j=0}^{n-2} (q_j - q_{j+1}) j K_j + q_{n-1} (n-1) K_{n-1})`.
///
/// `j K_j` is accumulated directly as `sum_{k=1}^{j} D_k`, so the `j = 0`
/// term is zero without evaluating `K_0`.
pub fn t_kernel_abel(spec: &GroupSpec, w: &WeightSeq, n: usize) -> Result<Signal> {
    let q_n = t_kernel_checked(spec, w, n)?;
    let order = spec.order();
    let table = VilenkinTable::new(spec);
    let zero = Complex64::new(0.0, 0.0);
    let mut d = vec![zero; order]; // D_j
    let mut jk = vec![zero; order]; // j K_j
    let mut psi = vec![zero; order];
    let mut acc = vec![zero; order];
    for j in 0..n {
        // here d = D_j and jk = j K_j
        let c = if j + 1 < n {
            w.q(j) - w.q(j + 1)
        } else {
            w.q(n - 1)
        };
        if c != 0.0 {
            for (a, v) in acc.iter_mut().zip(&jk) {
                *a += v * c;
            }
        }
        table.fill(j, &mut psi);
        for ((dv, p), v) in d.iter_mut().zip(&psi).zip(jk.iter_mut()) {
            *dv += p;
            *v += *dv;
        }
    }
    let inv = 1.0 / q_n;
    Ok(Signal::from_parts(spec.clone(), acc.into_iter().map(|a| a * inv).collect()))
}

/// `(1/Q_n) sum_{j=start}^{n-1} q_j D_j`.
pub fn dirichlet_tail_kernel(spec: &GroupSpec, w: &WeightSeq, n: usize, start: usize) -> Result<Signal> {
    if start >= n {
        return Err(Error::Parameter(format!("tail start {start} must be below n = {n}")));
    }
    let q_n = t_kernel_checked(spec, w, n)?;
    Ok(from_coeffs(spec, |j| {
        if j + 1 >= n {
            0.0
        } else {
            (q_n - w.Q(start.max(j + 1))) / q_n
        }
    }))
}

/// What a [`KernelTable`] holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    Dirichlet,
    Fejer,
    TKernel { weights: String },
    DirichletTail { weights: String, start: usize },
}

/// A materialized kernel with its summary statistics.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub kind: KernelKind,
    pub n: usize,
    pub values: Signal,
}

impl KernelTable {
    pub fn dirichlet(spec: &GroupSpec, n: usize) -> Result<Self> {
        Ok(KernelTable { kind: KernelKind::Dirichlet, n, values: dirichlet(spec, n)? })
    }

    pub fn fejer(spec: &GroupSpec, n: usize) -> Result<Self> {
        Ok(KernelTable { kind: KernelKind::Fejer, n, values: fejer_kernel(spec, n)? })
    }

    pub fn t_kernel(spec: &GroupSpec, w: &WeightSeq, n: usize) -> Result<Self> {
        Ok(KernelTable {
            kind: KernelKind::TKernel { weights: w.name() },
            n,
            values: t_kernel(spec, w, n)?,
        })
    }

    pub fn tail(spec: &GroupSpec, w: &WeightSeq, n: usize, start: usize) -> Result<Self> {
        Ok(KernelTable {
            kind: KernelKind::DirichletTail { weights: w.name(), start },
            n,
            values: dirichlet_tail_kernel(spec, w, n, start)?,
        })
    }

    pub fn l1_norm(&self) -> f64 {
        l1_norm(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.max_abs()
    }
}

/// `(f * g)(x) = integral f(t) g(x - t) dmu(t)`, evaluated directly.
pub fn convolve(f: &Signal, g: &Signal) -> Result<Signal> {
    f.same_group(g)?;
    let spec = f.spec();
    let order = spec.order();
    let fv = f.as_slice();
    let gv = g.as_slice();
    let values = par::map_range(order, |x| {
        let s: Complex64 = (0..order).map(|t| fv[t] * gv[spec.sub_indices(x, t)]).sum();
        s / order as f64
    });
    Ok(Signal::from_parts(spec.clone(), values))
}

/// Convolution through the transform: coefficients multiply.
pub fn convolve_spectral(f: &Signal, g: &Signal) -> Result<Signal> {
    f.same_group(g)?;
    let a = transform_fast(f);
    let b = transform_fast(g);
    let prod = Spectrum::from_parts(
        f.spec().clone(),
        a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).collect(),
    );
    Ok(inverse_transform(&prod))
}

/// `||f||_1 = (1/M_N) sum |f(x)|`.
pub fn l1_norm(f: &Signal) -> f64 {
    f.as_slice().iter().map(|z| z.norm()).sum::<f64>() / f.len() as f64
}

/// `sum_{l=0}^{top} M_l |K_{M_l}(x)|`, the majorant of `n |K_n|` with `top = |n|`.
/// Entry `l` of the result is the partial majorant up to level `l`.
pub fn fejer_majorants(spec: &GroupSpec, top: usize) -> Result<Vec<Vec<f64>>> {
    if top > spec.levels() {
        return Err(out_of_range("level", top, format!("[0, {}]", spec.levels())));
    }
    let mut acc = vec![0.0; spec.order()];
    let mut out = Vec::with_capacity(top + 1);
    for l in 0..=top {
        let k = fejer_kernel(spec, spec.big_m(l))?;
        let ml = spec.big_m(l) as f64;
        for (a, z) in acc.iter_mut().zip(k.as_slice()) {
            *a += ml * z.norm();
        }
        out.push(acc.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Interval;
    use crate::summability::{make_weights, WeightKind};

    fn walsh(n: usize) -> GroupSpec {
        GroupSpec::walsh(n).unwrap()
    }

    /// D_n summed term by term.
    fn dirichlet_direct(spec: &GroupSpec, n: usize) -> Signal {
        let t = VilenkinTable::new(spec);
        let mut acc = Signal::zeros(spec);
        for k in 0..n {
            acc = acc.add_scaled(Complex64::new(1.0, 0.0), &t.signal(k)).unwrap();
        }
        acc
    }

    #[test]
    fn dirichlet_basics() {
        let g = GroupSpec::new(vec![3, 2, 2]).unwrap();
        assert!(dirichlet(&g, 0).unwrap().max_abs() < 1e-15);
        let one = Signal::constant(&g, Complex64::new(1.0, 0.0));
        assert!(dirichlet(&g, 1).unwrap().max_abs_diff(&one) < 1e-14);
        for n in 0..=g.order() {
            let d = dirichlet(&g, n).unwrap();
            assert!((d[0] - n as f64).norm() < 1e-12);
            assert!(d.max_abs_diff(&dirichlet_direct(&g, n)) < 1e-12);
        }
        assert!(dirichlet(&g, 13).is_err());
    }

    #[test]
    fn dyadic_dirichlet_is_scaled_indicator() {
        let g = GroupSpec::new(vec![2, 3, 4]).unwrap();
        for level in 0..=3 {
            let d = dirichlet(&g, g.big_m(level)).unwrap();
            let i = Interval::at_zero(&g, level).unwrap();
            for x in 0..g.order() {
                let want = if i.contains(&g, x) { g.big_m(level) as f64 } else { 0.0 };
                assert!((d[x] - want).norm() < 1e-12);
            }
            assert!((l1_norm(&d) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn factored_dirichlet_pointwise() {
        for m in [vec![2, 2, 2, 2], vec![3, 2, 3], vec![2, 3, 4], vec![5, 3]] {
            let g = GroupSpec::new(m).unwrap();
            for n in 0..g.order() {
                let err = dirichlet(&g, n)
                    .unwrap()
                    .max_abs_diff(&dirichlet_factored(&g, n).unwrap());
                assert!(err < 1e-10, "n={n} err={err}");
            }
        }
    }

    #[test]
    fn fejer_basics() {
        let g = GroupSpec::new(vec![2, 3, 2]).unwrap();
        let one = Signal::constant(&g, Complex64::new(1.0, 0.0));
        assert!(fejer_kernel(&g, 1).unwrap().max_abs_diff(&one) < 1e-14);
        for n in 1..=12 {
            let k = fejer_kernel(&g, n).unwrap();
            assert!((k[0] - (n + 1) as f64 / 2.0).norm() < 1e-12);
            assert!((k.integral() - 1.0).norm() < 1e-12);
        }
        assert!(fejer_kernel(&g, 0).is_err());
    }

    #[test]
    fn dyadic_closed_form_matches() {
        for m in [vec![2, 2, 2, 2], vec![3, 2, 3], vec![2, 3, 4], vec![4, 4, 4, 4]] {
            let g = GroupSpec::new(m).unwrap();
            for level in 1..=g.levels() {
                let closed = fejer_dyadic_closed_form(&g, level).unwrap();
                let lower = fejer_kernel_lower(&g, g.big_m(level)).unwrap();
                assert!(closed.max_abs_diff(&lower) < 1e-10);
                // K_{M_n} itself carries the extra D_{M_n}/M_n = 1 on I_n.
                let k = fejer_kernel(&g, g.big_m(level)).unwrap();
                let i = Interval::at_zero(&g, level).unwrap();
                for x in 0..g.order() {
                    let shift = if i.contains(&g, x) { 1.0 } else { 0.0 };
                    assert!((k[x] - closed[x] - shift).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn walsh_fejer_l1_small_range() {
        let g = walsh(9);
        let worst = (1..=512)
            .map(|n| l1_norm(&fejer_kernel(&g, n).unwrap()))
            .fold(0.0, f64::max);
        assert!(worst <= 2.0 + 1e-9, "{worst}");
    }

    #[test]
    fn l1_of_k_m2_by_brute_force() {
        // m = (2,2,2): K_4 = (D_1 + D_2 + D_3 + D_4) / 4 summed over all 8 points.
        let g = walsh(3);
        let d = |n| dirichlet_direct(&g, n);
        let mut total = 0.0;
        for x in 0..8 {
            let v = (d(1)[x] + d(2)[x] + d(3)[x] + d(4)[x]) / 4.0;
            total += v.norm();
        }
        let brute = total / 8.0;
        assert!((l1_norm(&fejer_kernel(&g, 4).unwrap()) - brute).abs() < 1e-14);
        // K_4 takes 5/2, 1/2, 1, 0 on the four cosets of I_2.
        assert!((brute - 1.0).abs() < 1e-14, "{brute}");
    }

    #[test]
    fn t_kernel_fejer_weights() {
        let g = GroupSpec::new(vec![2, 3, 2]).unwrap();
        let w = make_weights(WeightKind::Fejer, 20).unwrap();
        for n in 2..=12 {
            let f = t_kernel(&g, &w, n).unwrap();
            let k = fejer_kernel(&g, n - 1)
                .unwrap()
                .scaled(Complex64::new((n - 1) as f64 / n as f64, 0.0));
            assert!(f.max_abs_diff(&k) < 1e-12);
        }
    }

    #[test]
    fn t_kernel_abel_form() {
        let g = GroupSpec::new(vec![2, 3, 4]).unwrap();
        for kind in [WeightKind::Riesz, WeightKind::V { alpha: 0.5 }, WeightKind::U { alpha: 0.5 }] {
            let w = make_weights(kind, 30).unwrap();
            for n in w.first_defined().unwrap()..=24 {
                let a = t_kernel(&g, &w, n).unwrap();
                let b = t_kernel_abel(&g, &w, n).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-10, "{} n={n}", kind.id());
            }
        }
        let w = make_weights(WeightKind::Riesz, 30).unwrap();
        assert!(matches!(t_kernel(&g, &w, 1), Err(Error::DegenerateWeights { .. })));
    }

    #[test]
    fn tail_kernel_edges() {
        let g = walsh(4);
        let w = make_weights(WeightKind::Fejer, 20).unwrap();
        for n in 1..=16 {
            let full = t_kernel(&g, &w, n).unwrap();
            assert!(dirichlet_tail_kernel(&g, &w, n, 0).unwrap().max_abs_diff(&full) < 1e-14);
        }
        for n in 2..=16 {
            let single = dirichlet_tail_kernel(&g, &w, n, n - 1).unwrap();
            let want = dirichlet(&g, n - 1).unwrap().scaled(Complex64::new(1.0 / n as f64, 0.0));
            assert!(single.max_abs_diff(&want) < 1e-12);
        }
        assert!(dirichlet_tail_kernel(&g, &w, 4, 4).is_err());
    }

    #[test]
    fn tail_is_kernel_minus_head() {
        let g = GroupSpec::new(vec![3, 2, 2]).unwrap();
        let w = make_weights(WeightKind::Riesz, 20).unwrap();
        for n in 3..=12 {
            for start in 0..n {
                let tail = dirichlet_tail_kernel(&g, &w, n, start).unwrap();
                let mut head = Signal::zeros(&g);
                for j in 0..start {
                    head = head
                        .add_scaled(Complex64::new(w.q(j) / w.Q(n), 0.0), &dirichlet(&g, j).unwrap())
                        .unwrap();
                }
                let want = t_kernel(&g, &w, n).unwrap().add_scaled(Complex64::new(-1.0, 0.0), &head).unwrap();
                assert!(tail.max_abs_diff(&want) < 1e-12);
            }
        }
    }

    #[test]
    fn convolution_routes_agree() {
        let g = GroupSpec::new(vec![3, 4]).unwrap();
        let f = Signal::from_fn(&g, |x| Complex64::new((x as f64).sin(), (x as f64 * 0.3).cos()));
        let h = Signal::from_fn(&g, |x| Complex64::new(1.0 / (1.0 + x as f64), 0.5));
        let a = convolve(&f, &h).unwrap();
        assert!(a.max_abs_diff(&convolve_spectral(&f, &h).unwrap()) < 1e-12);
        assert!(a.max_abs_diff(&convolve(&h, &f).unwrap()) < 1e-12);
        let other = Signal::zeros(&walsh(2));
        assert!(convolve(&f, &other).is_err());
    }

    #[test]
    fn l1_examples() {
        let g = GroupSpec::new(vec![3, 2]).unwrap();
        for n in 0..6 {
            let psi = crate::transform::vilenkin_fn(&g, n).unwrap();
            assert!((l1_norm(&psi) - 1.0).abs() < 1e-14);
        }
        assert_eq!(l1_norm(&Signal::zeros(&g)), 0.0);
    }
}
