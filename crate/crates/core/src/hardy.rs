//! `L_p` and weak-`L_p` quasi-norms, the martingale maximal function, the
//! `H_p` quasi-norm and `p`-atoms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::group::{GroupSpec, Interval};
use crate::signal::Signal;
use crate::transform::{inverse_transform, transform_fast, truncate_spectrum};

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("p must be positive, got {p}")))
    }
}

/// `(sum |v|^p / len)`, the `p`-th power of the `L_p` quasi-norm.
pub fn lp_power(values: &[f64], p: f64) -> f64 {
    values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / values.len() as f64
}

/// `||f||_p = (integral |f|^p)^{1/p}`.
pub fn lp_quasinorm(f: &Signal, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(lp_power(&f.abs(), p).powf(1.0 / p))
}

/// `sup_{lambda > 0} lambda mu(|f| > lambda)^{1/p}`, exact over the finite
/// value set: the supremum is approached as `lambda` rises to each value `v`
/// of `|f|`, giving `max_v v^p mu(|f| >= v)`.
pub fn weak_lp_quasinorm(f: &Signal, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut v = f.abs();
    v.sort_by(|a, b| b.total_cmp(a));
    let total = v.len() as f64;
    let mut best: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        // ties: the measure of |f| >= x counts all of them, reached at the last
        if i + 1 < v.len() && v[i + 1] == x {
            continue;
        }
        best = best.max(x.powf(p) * (i + 1) as f64 / total);
    }
    Ok(best.powf(1.0 / p))
}

/// Replaces every value by its average over the level-`n` coset.
pub fn coset_average(f: &Signal, level: usize) -> Result<Signal> {
    let spec = f.spec();
    if level > spec.levels() {
        return Err(out_of_range("level", level, format!("[0, {}]", spec.levels())));
    }
    let step = spec.big_m(level);
    let count = spec.order() / step;
    let mut sums = vec![Complex64::new(0.0, 0.0); step];
    for (x, v) in f.as_slice().iter().enumerate() {
        sums[x % step] += v;
    }
    for s in &mut sums {
        *s /= count as f64;
    }
    Ok(Signal::from_fn(spec, |x| sums[x % step]))
}

/// The tower `f^(n) = S_{M_n} f`, `n = 0..=N`.
#[derive(Debug, Clone)]
pub struct MartingaleView {
    levels: Vec<Signal>,
}

impl MartingaleView {
    /// Builds the tower by truncating the spectrum at each `M_n`.
    pub fn new(f: &Signal) -> Self {
        let spec = f.spec();
        let s = transform_fast(f);
        let levels = (0..=spec.levels())
            .map(|n| inverse_transform(&truncate_spectrum(&s, spec.big_m(n))))
            .collect();
        MartingaleView { levels }
    }

    /// Builds the tower by direct coset averaging.
    pub fn from_coset_averages(f: &Signal) -> Self {
        let levels = (0..=f.spec().levels())
            .map(|n| coset_average(f, n).expect("level in range"))
            .collect();
        MartingaleView { levels }
    }

    pub fn level(&self, n: usize) -> &Signal {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Signal] {
        &self.levels
    }

    /// `f* = max_n |f^(n)|`.
    pub fn maximal(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.levels[0].len()];
        for l in &self.levels {
            for (o, z) in out.iter_mut().zip(l.as_slice()) {
                *o = o.max(z.norm());
            }
        }
        out
    }
}

/// `f*` via partial sums at the levels `M_n`.
pub fn maximal_function(f: &Signal) -> Vec<f64> {
    MartingaleView::new(f).maximal()
}

/// `f*` via coset averages only.
pub fn maximal_function_averaging(f: &Signal) -> Vec<f64> {
    MartingaleView::from_coset_averages(f).maximal()
}

/// `||f||_{H_p} = ||f*||_p`.
///
/// Uses the averaging route, which keeps exact zeros exact; small `p` would
/// otherwise inflate transform rounding residue.
pub fn hardy_quasinorm(f: &Signal, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(lp_power(&maximal_function_averaging(f), p).powf(1.0 / p))
}

/// A `p`-atom supported on an interval.
#[derive(Debug, Clone)]
pub struct PAtom {
    p: f64,
    support: Interval,
    values: Signal,
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    p: f64,
    support_level: usize,
    support_anchor: Vec<usize>,
    values: Vec<[f64; 2]>,
}

/// Relative slack used by [`validate_atom`] on the mean and sup conditions.
pub const ATOM_TOLERANCE: f64 = 1e-12;

impl PAtom {
    /// Checks the three atom conditions and wraps the values.
    pub fn new(p: f64, support: Interval, values: Signal) -> Result<Self> {
        validate_atom(p, &support, &values)?;
        Ok(PAtom { p, support, values })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn support(&self) -> &Interval {
        &self.support
    }

    pub fn values(&self) -> &Signal {
        &self.values
    }

    pub fn into_signal(self) -> Signal {
        self.values
    }

    pub fn to_json(&self) -> String {
        let repr = AtomRepr {
            p: self.p,
            support_level: self.support.level(),
            support_anchor: self.support.anchor().to_vec(),
            values: self.values.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::to_string(&repr).expect("atom serializes")
    }

    pub fn from_json(spec: &GroupSpec, text: &str) -> Result<Self> {
        let repr: AtomRepr =
            serde_json::from_str(text).map_err(|e| Error::InvalidAtom(e.to_string()))?;
        let support = Interval::new(spec, repr.support_level, repr.support_anchor)?;
        let values = Signal::new(
            spec,
            repr.values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
        )?;
        PAtom::new(repr.p, support, values)
    }
}

/// Checks support, mean zero and `||a||_inf <= mu(I)^{-1/p}`.
pub fn validate_atom(p: f64, support: &Interval, values: &Signal) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidAtom(format!("p = {p} outside (0, 1]")));
    }
    let spec = values.spec();
    let bound = (spec.big_m(support.level()) as f64).powf(1.0 / p);
    let mut sum = Complex64::new(0.0, 0.0);
    for (x, v) in values.as_slice().iter().enumerate() {
        if support.contains(spec, x) {
            sum += v;
            if v.norm() > bound * (1.0 + ATOM_TOLERANCE) {
                return Err(Error::InvalidAtom(format!(
                    "|a({x})| = {} exceeds {bound}",
                    v.norm()
                )));
            }
        } else if *v != Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidAtom(format!("nonzero value outside the support at {x}")));
        }
    }
    let mean = sum.norm() / spec.order() as f64;
    if mean > ATOM_TOLERANCE * bound.max(1.0) {
        return Err(Error::InvalidAtom(format!("integral {mean} is not zero")));
    }
    Ok(())
}

fn atom_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A random extremal `p`-atom on `I_level(anchor)`: uniform values on the
/// support, mean removed, rescaled so the sup norm equals `M_level^{1/p}`.
///
/// The anchor is drawn from the same seeded stream.
pub fn make_random_atom(spec: &GroupSpec, p: f64, level: usize, seed: u64) -> Result<PAtom> {
    make_random_atom_stream(spec, p, level, seed, 0)
}

/// As [`make_random_atom`], drawing from stream `stream` of the seed so that
/// parallel shards stay reproducible.
pub fn make_random_atom_stream(
    spec: &GroupSpec,
    p: f64,
    level: usize,
    seed: u64,
    stream: u64,
) -> Result<PAtom> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Parameter(format!("p = {p} outside (0, 1]")));
    }
    if level > spec.levels() {
        return Err(out_of_range("support level", level, format!("[0, {}]", spec.levels())));
    }
    if level == spec.levels() {
        return Err(Error::DegenerateAtom(format!(
            "support level {level} is a single point; a mean-zero atom there vanishes"
        )));
    }
    let mut rng = atom_rng(seed, stream);
    let anchor: Vec<usize> = (0..level).map(|k| rng.random_range(0..spec.radix(k))).collect();
    let support = Interval::new(spec, level, anchor)?;
    let members = support.members(spec);
    let mut raw: Vec<f64> = members.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    for v in &mut raw {
        *v -= mean;
    }
    let peak = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::DegenerateAtom("sampled values are constant".into()));
    }
    let scale = (spec.big_m(level) as f64).powf(1.0 / p) / peak;
    let mut values = vec![Complex64::new(0.0, 0.0); spec.order()];
    for (&x, v) in members.iter().zip(&raw) {
        values[x] = Complex64::new(v * scale, 0.0);
    }
    PAtom::new(p, support, Signal::from_parts(spec.clone(), values))
}

/// `M_s^{1/p} (D_{M_{s+1}} - D_{M_s}) / ((m_s - 1) M_s)`, translated to the
/// interval `I_s(anchor)`: the dyadic two-level atom.
pub fn dyadic_atom(spec: &GroupSpec, p: f64, support: &Interval) -> Result<PAtom> {
    let s = support.level();
    if s >= spec.levels() {
        return Err(Error::DegenerateAtom(format!("support level {s} leaves no finer level")));
    }
    let ms = spec.big_m(s) as f64;
    let scale = ms.powf(1.0 / p) / ((spec.radix(s) - 1) as f64 * ms);
    let base = support.residue(spec);
    let fine = spec.big_m(s + 1);
    let values = Signal::from_fn(spec, |x| {
        if !support.contains(spec, x) {
            return Complex64::new(0.0, 0.0);
        }
        let y = spec.sub_indices(x, base);
        let v = if y.is_multiple_of(fine) {
            (spec.big_m(s + 1) as f64 - ms) * scale
        } else {
            -ms * scale
        };
        Complex64::new(v, 0.0)
    });
    PAtom::new(p, support.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{partial_sum, vilenkin_fn};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn indicator(spec: &GroupSpec, level: usize) -> Signal {
        let i = Interval::at_zero(spec, level).unwrap();
        Signal::from_fn(spec, |x| if i.contains(spec, x) { c(1.0) } else { c(0.0) })
    }

    #[test]
    fn lp_examples() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        let one = Signal::constant(&g, c(1.0));
        for p in [0.25, 0.5, 1.0, 2.0] {
            assert!((lp_quasinorm(&one, p).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!((lp_quasinorm(&indicator(&g, 1), 0.5).unwrap() - 0.25).abs() < 1e-14);
        for n in 0..4 {
            let psi = vilenkin_fn(&g, n).unwrap();
            assert!((lp_quasinorm(&psi, 0.3).unwrap() - 1.0).abs() < 1e-12);
        }
        let f = Signal::from_fn(&g, |x| c(x as f64 - 1.5));
        let a = lp_quasinorm(&f.scaled(c(-3.0)), 0.4).unwrap();
        assert!((a - 3.0 * lp_quasinorm(&f, 0.4).unwrap()).abs() < 1e-12);
        assert!(lp_quasinorm(&f, 0.0).is_err());
    }

    #[test]
    fn weak_lp_examples() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        let one = Signal::constant(&g, c(1.0));
        assert!((weak_lp_quasinorm(&one, 0.5).unwrap() - 1.0).abs() < 1e-14);
        for p in [0.25, 0.5, 1.0] {
            let w = weak_lp_quasinorm(&indicator(&g, 1), p).unwrap();
            assert!((w - 2f64.powf(-1.0 / p)).abs() < 1e-14);
        }
        assert!(weak_lp_quasinorm(&one, -1.0).is_err());
    }

    #[test]
    fn weak_lp_brute_force() {
        // scan lambda just below each value and between values
        let g = GroupSpec::new(vec![3, 2]).unwrap();
        let f = Signal::from_real(&g, &[0.5, 2.0, 2.0, 0.0, 1.0, 3.0]).unwrap();
        let p = 0.5;
        let abs = f.abs();
        let mut best: f64 = 0.0;
        for i in 1..=3000 {
            let lambda = i as f64 * 0.001;
            let mu = abs.iter().filter(|v| **v > lambda).count() as f64 / 6.0;
            best = best.max(lambda.powf(p) * mu);
        }
        let w = weak_lp_quasinorm(&f, p).unwrap().powf(p);
        assert!(w >= best - 1e-12 && w - best < 1e-3, "{w} {best}");
    }

    #[test]
    fn martingale_routes_agree() {
        let g = GroupSpec::new(vec![2, 3, 4]).unwrap();
        let f = Signal::from_fn(&g, |x| Complex64::new((x as f64 * 0.37).sin(), (x as f64).sqrt()));
        let a = MartingaleView::new(&f);
        let b = MartingaleView::from_coset_averages(&f);
        for n in 0..=3 {
            assert!(a.level(n).max_abs_diff(b.level(n)) < 1e-12);
            let s = partial_sum(&f, g.big_m(n)).unwrap();
            assert!(a.level(n).max_abs_diff(&s) < 1e-12);
        }
        let (x, y) = (maximal_function(&f), maximal_function_averaging(&f));
        assert!(x.iter().zip(&y).all(|(u, v)| (u - v).abs() < 1e-12));
        assert!(a.level(3).max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn maximal_examples() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        let k = Signal::constant(&g, Complex64::new(0.0, -2.5));
        assert!(maximal_function(&k).iter().all(|v| (v - 2.5).abs() < 1e-14));
        let psi = vilenkin_fn(&g, 2).unwrap();
        assert!(maximal_function(&psi).iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!((hardy_quasinorm(&Signal::constant(&g, c(1.0)), 0.5).unwrap() - 1.0).abs() < 1e-14);
        for n in 0..4 {
            let psi = vilenkin_fn(&g, n).unwrap();
            assert!((hardy_quasinorm(&psi, 0.5).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn textbook_atom() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        let support = Interval::at_zero(&g, 1).unwrap();
        // 4 (1_{I_2(0,0)} - 1_{I_2(0,1)}): points 0 and 2 in flat index
        let a = Signal::from_real(&g, &[4.0, 0.0, -4.0, 0.0]).unwrap();
        let atom = PAtom::new(0.5, support.clone(), a).unwrap();
        assert_eq!(atom.support().level(), 1);
        let d = dyadic_atom(&g, 0.5, &support).unwrap();
        assert!(d.values().max_abs_diff(atom.values()) < 1e-12);
        let one = Signal::constant(&g, c(1.0));
        assert!(PAtom::new(0.5, Interval::at_zero(&g, 0).unwrap(), one).is_err());
        let too_big = Signal::from_real(&g, &[5.0, 0.0, -5.0, 0.0]).unwrap();
        assert!(PAtom::new(0.5, support.clone(), too_big).is_err());
        let outside = Signal::from_real(&g, &[4.0, 1.0, -4.0, -1.0]).unwrap();
        assert!(PAtom::new(0.5, support, outside).is_err());
    }

    #[test]
    fn random_atoms_validate_and_vanish_outside() {
        let g = GroupSpec::new(vec![2, 3, 2]).unwrap();
        for seed in 0..200 {
            let level = (seed as usize) % 3;
            let a = make_random_atom(&g, 0.4, level, seed).unwrap();
            let peak = a.values().max_abs();
            assert!((peak - (g.big_m(level) as f64).powf(2.5)).abs() < 1e-9 * peak);
            let star = maximal_function(a.values());
            for (x, v) in star.iter().enumerate() {
                if !a.support().contains(&g, x) {
                    assert!(*v < 1e-9);
                }
            }
        }
        assert!(matches!(make_random_atom(&g, 0.5, 3, 1), Err(Error::DegenerateAtom(_))));
        assert!(make_random_atom(&g, 0.5, 4, 1).is_err());
    }

    #[test]
    fn atom_json_round_trip() {
        let g = GroupSpec::new(vec![3, 2, 2]).unwrap();
        let a = make_random_atom(&g, 0.25, 2, 11).unwrap();
        let b = PAtom::from_json(&g, &a.to_json()).unwrap();
        assert_eq!(a.values().as_slice(), b.values().as_slice());
        assert_eq!(a.support(), b.support());
        assert!(PAtom::from_json(&g, "{}").is_err());
    }

    #[test]
    fn seeded_atoms_repeat() {
        let g = GroupSpec::walsh(5).unwrap();
        let a = make_random_atom_stream(&g, 0.5, 2, 7, 3).unwrap();
        let b = make_random_atom_stream(&g, 0.5, 2, 7, 3).unwrap();
        let c = make_random_atom_stream(&g, 0.5, 2, 7, 4).unwrap();
        assert_eq!(a.values().as_slice(), b.values().as_slice());
        assert_ne!(a.values().as_slice(), c.values().as_slice());
    }
}
