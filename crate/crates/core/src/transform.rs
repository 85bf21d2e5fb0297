//! Generalized Rademacher and Vilenkin functions, the Vilenkin–Fourier
//! transform (direct and fast), its inverse, and partial sums.
//!
//! Forward transforms use the normalized Haar integral,
//! `f^(n) = (1/M_N) sum_x f(x) conj(psi_n(x))`; the inverse carries no factor.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{out_of_range, Result};
use crate::group::{GroupSpec, Point};
use crate::par::{self, Execution};
use crate::signal::{Signal, Spectrum};

/// Below this order the fast transform never spawns parallel work.
const PARALLEL_MIN_ORDER: usize = 1 << 14;

/// `exp(2 pi i j / m)` for `j < m`, with the quarter turns exact.
pub fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| {
            if (4 * j) % m == 0 {
                match 4 * j / m {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                }
            } else {
                Complex64::from_polar(1.0, TAU * j as f64 / m as f64)
            }
        })
        .collect()
}

fn root_tables(spec: &GroupSpec) -> Vec<Vec<Complex64>> {
    spec.radices().iter().map(|&m| roots_of_unity(m)).collect()
}

/// `r_k(x) = exp(2 pi i x_k / m_k)`.
pub fn rademacher(spec: &GroupSpec, k: usize, x: &Point) -> Result<Complex64> {
    if k >= spec.levels() {
        return Err(out_of_range("k", k, format!("[0, {})", spec.levels())));
    }
    let idx = x.index(spec)?;
    Ok(roots_of_unity(spec.radix(k))[spec.digit(idx, k)])
}

/// `psi_n(x)` at a single flat index.
pub fn character(spec: &GroupSpec, n: usize, x: usize) -> Complex64 {
    let mut z = Complex64::new(1.0, 0.0);
    for k in 0..spec.levels() {
        let e = (spec.digit(n, k) * spec.digit(x, k)) % spec.radix(k);
        if e != 0 {
            z *= Complex64::from_polar(1.0, TAU * e as f64 / spec.radix(k) as f64);
        }
    }
    z
}

/// Fills `out` with `psi_n`, built level by level in `O(M_N)`.
pub(crate) fn fill_vilenkin(spec: &GroupSpec, roots: &[Vec<Complex64>], n: usize, out: &mut [Complex64]) {
    out[0] = Complex64::new(1.0, 0.0);
    for k in 0..spec.levels() {
        let mk = spec.radix(k);
        let len = spec.big_m(k);
        let nk = spec.digit(n, k);
        for d in (1..mk).rev() {
            let w = roots[k][(nk * d) % mk];
            let (lo, hi) = out.split_at_mut(d * len);
            for (dst, src) in hi[..len].iter_mut().zip(&lo[..len]) {
                *dst = src * w;
            }
        }
    }
}

/// Generates Vilenkin functions for one group, reusing the root tables.
pub struct VilenkinTable {
    spec: GroupSpec,
    roots: Vec<Vec<Complex64>>,
}

impl VilenkinTable {
    pub fn new(spec: &GroupSpec) -> Self {
        VilenkinTable {
            spec: spec.clone(),
            roots: root_tables(spec),
        }
    }

    pub fn fill(&self, n: usize, out: &mut [Complex64]) {
        fill_vilenkin(&self.spec, &self.roots, n, out);
    }

    pub fn signal(&self, n: usize) -> Signal {
        let mut v = vec![Complex64::new(0.0, 0.0); self.spec.order()];
        self.fill(n, &mut v);
        Signal::from_parts(self.spec.clone(), v)
    }
}

/// The Vilenkin function `psi_n = prod_k r_k^{n_k}` as a signal.
pub fn vilenkin_fn(spec: &GroupSpec, n: usize) -> Result<Signal> {
    spec.check_index(n)?;
    Ok(VilenkinTable::new(spec).signal(n))
}

/// Direct `O(M_N^2)` evaluation of the coefficients from their definition.
pub fn transform_naive(f: &Signal) -> Spectrum {
    let spec = f.spec();
    let table = VilenkinTable::new(spec);
    let order = spec.order();
    let coeffs = par::map_range(order, |n| {
        let mut psi = vec![Complex64::new(0.0, 0.0); order];
        table.fill(n, &mut psi);
        let s: Complex64 = f
            .as_slice()
            .iter()
            .zip(&psi)
            .map(|(a, p)| a * p.conj())
            .sum();
        s / order as f64
    });
    Spectrum::from_parts(spec.clone(), coeffs)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

/// One length-`m` DFT along digit `k` for every chunk of length `M_{k+1}`.
fn digit_stage(
    exec: Execution,
    data: &mut [Complex64],
    stride: usize,
    m: usize,
    roots: &[Complex64],
    dir: Direction,
) {
    let block = stride * m;
    let stage = |chunk: &mut [Complex64]| {
        for blk in chunk.chunks_mut(block) {
            if m == 2 {
                let (lo, hi) = blk.split_at_mut(stride);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (s, d) = (*a + *b, *a - *b);
                    *a = s;
                    *b = d;
                }
                continue;
            }
            let mut scratch = vec![Complex64::new(0.0, 0.0); m];
            for i in 0..stride {
                for (j, out) in scratch.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for d in 0..m {
                        let e = (j * d) % m;
                        let w = match dir {
                            Direction::Forward => roots[(m - e) % m],
                            Direction::Inverse => roots[e],
                        };
                        acc += blk[i + d * stride] * w;
                    }
                    *out = acc;
                }
                for (j, v) in scratch.iter().enumerate() {
                    blk[i + j * stride] = *v;
                }
            }
        }
    };
    let blocks = data.len() / block;
    if exec != Execution::Sequential && data.len() >= PARALLEL_MIN_ORDER && blocks >= 2 {
        // Hand each worker a run of whole blocks.
        let per = block * (blocks / 64).max(1);
        par::for_each_chunk_mut(exec, data, per, stage);
    } else {
        stage(data);
    }
}

fn run_stages(exec: Execution, spec: &GroupSpec, data: &mut [Complex64], dir: Direction) {
    let roots = root_tables(spec);
    for k in 0..spec.levels() {
        digit_stage(exec, data, spec.big_m(k), spec.radix(k), &roots[k], dir);
    }
}

/// Fast transform with an explicit execution mode.
pub fn transform_fast_with(exec: Execution, f: &Signal) -> Spectrum {
    let spec = f.spec();
    let mut data = f.as_slice().to_vec();
    run_stages(exec, spec, &mut data, Direction::Forward);
    let scale = 1.0 / spec.order() as f64;
    for z in &mut data {
        *z *= scale;
    }
    Spectrum::from_parts(spec.clone(), data)
}

/// Mixed-radix fast transform: one small DFT per digit, `O(M_N sum_k m_k)`.
pub fn transform_fast(f: &Signal) -> Spectrum {
    transform_fast_with(Execution::default(), f)
}

pub fn inverse_transform_with(exec: Execution, s: &Spectrum) -> Signal {
    let spec = s.spec();
    let mut data = s.as_slice().to_vec();
    run_stages(exec, spec, &mut data, Direction::Inverse);
    Signal::from_parts(spec.clone(), data)
}

/// `f(x) = sum_n f^(n) psi_n(x)`.
pub fn inverse_transform(s: &Spectrum) -> Signal {
    inverse_transform_with(Execution::default(), s)
}

/// Transforms many signals; parallel across signals, sequential within each.
pub fn transform_batch_with(exec: Execution, signals: &[Signal]) -> Vec<Spectrum> {
    par::map_with(exec, signals, |f| transform_fast_with(Execution::Sequential, f))
}

pub fn transform_batch(signals: &[Signal]) -> Vec<Spectrum> {
    transform_batch_with(Execution::default(), signals)
}

/// Keeps the coefficients below `n`.
pub fn truncate_spectrum(s: &Spectrum, n: usize) -> Spectrum {
    let mut c = s.clone();
    for z in &mut c.as_mut_slice()[n.min(s.len())..] {
        *z = Complex64::new(0.0, 0.0);
    }
    c
}

/// Coefficients of magnitude at most `threshold` set to zero.
pub fn chop_spectrum(s: &Spectrum, threshold: f64) -> Spectrum {
    let mut c = s.clone();
    for z in c.as_mut_slice() {
        if z.norm() <= threshold {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    c
}

/// `64 eps ||f||_inf`: the size of rounding residue the fast transform leaves
/// in coefficients that vanish exactly.
pub fn rounding_floor(f: &Signal) -> f64 {
    64.0 * f64::EPSILON * f.max_abs()
}

/// `S_n f = sum_{k<n} f^(k) psi_k`, with `S_0 f = 0`.
pub fn partial_sum(f: &Signal, n: usize) -> Result<Signal> {
    let order = f.spec().order();
    if n > order {
        return Err(out_of_range("n", n, format!("[0, {order}]")));
    }
    Ok(inverse_transform(&truncate_spectrum(&transform_fast(f), n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rademacher_examples() {
        let g = GroupSpec::new(vec![2, 4, 2]).unwrap();
        let x = Point::new(&g, vec![1, 1, 0]).unwrap();
        assert_eq!(rademacher(&g, 0, &x).unwrap(), c(-1.0, 0.0));
        assert_eq!(rademacher(&g, 1, &x).unwrap(), c(0.0, 1.0));
        assert_eq!(rademacher(&g, 2, &x).unwrap(), c(1.0, 0.0));
        assert!(rademacher(&g, 3, &x).is_err());
    }

    #[test]
    fn rademacher_is_root_of_unity() {
        let g = GroupSpec::new(vec![3, 5, 7]).unwrap();
        for x in 0..g.order() {
            let p = Point::from_index(&g, x).unwrap();
            for k in 0..3 {
                let r = rademacher(&g, k, &p).unwrap();
                assert!((r.norm() - 1.0).abs() < 1e-14);
                assert!((r.powu(g.radix(k) as u32) - 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn walsh_paley_is_popcount_sign() {
        let g = GroupSpec::walsh(4).unwrap();
        for n in 0..16usize {
            let psi = vilenkin_fn(&g, n).unwrap();
            for x in 0..16usize {
                let sign = if (n & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(psi[x], c(sign, 0.0));
            }
        }
        assert!(vilenkin_fn(&g, 16).is_err());
    }

    #[test]
    fn table_matches_pointwise_character() {
        let g = GroupSpec::new(vec![3, 2, 5]).unwrap();
        for n in 0..g.order() {
            let psi = vilenkin_fn(&g, n).unwrap();
            for x in 0..g.order() {
                assert!((psi[x] - character(&g, n, x)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn character_property() {
        let g = GroupSpec::new(vec![3, 4]).unwrap();
        for n in 0..g.order() {
            for x in 0..g.order() {
                for y in 0..g.order() {
                    let lhs = character(&g, n, g.add_indices(x, y));
                    let rhs = character(&g, n, x) * character(&g, n, y);
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn walsh_fast_equals_hadamard() {
        let g = GroupSpec::walsh(3).unwrap();
        let f = Signal::from_real(&g, &[1.0, 2.0, -1.0, 0.5, 3.0, 0.0, -2.0, 1.0]).unwrap();
        let s = transform_fast(&f);
        for n in 0..8usize {
            let expected: f64 = (0..8usize)
                .map(|x| {
                    let sign = if (n & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    f[x].re * sign
                })
                .sum::<f64>()
                / 8.0;
            assert!((s[n] - c(expected, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn delta_has_flat_spectrum() {
        let g = GroupSpec::new(vec![2, 3, 4]).unwrap();
        let f = Signal::from_fn(&g, |x| if x == 0 { c(24.0, 0.0) } else { c(0.0, 0.0) });
        for s in [transform_naive(&f), transform_fast(&f)] {
            for n in 0..24 {
                assert!((s[n] - 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_spectrum_inverts_to_constant() {
        let g = GroupSpec::new(vec![3, 3]).unwrap();
        let mut s = Spectrum::zeros(&g);
        s.as_mut_slice()[0] = c(1.0, 0.0);
        let f = inverse_transform(&s);
        assert!(f.max_abs_diff(&Signal::constant(&g, c(1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn partial_sum_edges() {
        let g = GroupSpec::new(vec![2, 3]).unwrap();
        let f = Signal::from_fn(&g, |x| c(x as f64, -(x as f64) / 2.0));
        assert!(partial_sum(&f, 0).unwrap().max_abs() < 1e-15);
        let s1 = partial_sum(&f, 1).unwrap();
        assert!(s1.max_abs_diff(&Signal::constant(&g, f.integral())) < 1e-12);
        assert!(partial_sum(&f, 6).unwrap().max_abs_diff(&f) < 1e-12);
        assert!(partial_sum(&f, 7).is_err());
    }
}
