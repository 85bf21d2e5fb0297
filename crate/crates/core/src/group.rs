//! Finite model of a bounded Vilenkin group.
//!
//! The group `Z_{m_0} x ... x Z_{m_{N-1}}` is stored through its flat index
//! `x = sum_j x_j M_j`, little-endian in the digits: `x_0` varies fastest.
//! Functions measurable with respect to the level-`N` sigma-algebra live on
//! this truncation without loss, so nothing here is approximate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};

/// Default bound on `sup m_k`.
pub const DEFAULT_RADIX_CAP: usize = 16;

/// The sequence `m` (truncated at level `N`) together with its cumulative
/// products `M_0 = 1, M_{k+1} = m_k M_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupSpecRepr", into = "GroupSpecRepr")]
pub struct GroupSpec {
    radices: Vec<usize>,
    products: Vec<usize>,
    cap: usize,
}

#[derive(Serialize, Deserialize)]
struct GroupSpecRepr {
    m: Vec<usize>,
    #[serde(default = "default_cap")]
    cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_RADIX_CAP
}

impl TryFrom<GroupSpecRepr> for GroupSpec {
    type Error = Error;

    fn try_from(repr: GroupSpecRepr) -> Result<Self> {
        GroupSpec::with_cap(repr.m, repr.cap)
    }
}

impl From<GroupSpec> for GroupSpecRepr {
    fn from(spec: GroupSpec) -> Self {
        GroupSpecRepr {
            m: spec.radices,
            cap: spec.cap,
        }
    }
}

impl GroupSpec {
    pub fn new(radices: impl Into<Vec<usize>>) -> Result<Self> {
        Self::with_cap(radices, DEFAULT_RADIX_CAP)
    }

    pub fn with_cap(radices: impl Into<Vec<usize>>, cap: usize) -> Result<Self> {
        let radices = radices.into();
        if radices.is_empty() {
            return Err(Error::InvalidGroup("truncation level N must be at least 1".into()));
        }
        if let Some((k, &mk)) = radices.iter().enumerate().find(|(_, &mk)| mk < 2) {
            return Err(Error::InvalidGroup(format!("m_{k} = {mk} < 2")));
        }
        if let Some((k, &mk)) = radices.iter().enumerate().find(|(_, &mk)| mk > cap) {
            return Err(Error::InvalidGroup(format!(
                "m_{k} = {mk} exceeds the bounded-group cap {cap}"
            )));
        }
        let mut products = Vec::with_capacity(radices.len() + 1);
        products.push(1usize);
        for &mk in &radices {
            let next = products
                .last()
                .and_then(|p: &usize| p.checked_mul(mk))
                .ok_or_else(|| Error::InvalidGroup("group order overflows usize".into()))?;
            products.push(next);
        }
        Ok(GroupSpec {
            radices,
            products,
            cap,
        })
    }

    /// The Walsh–Paley group `m = (2, 2, ..., 2)` of order `2^levels`.
    pub fn walsh(levels: usize) -> Result<Self> {
        Self::new(vec![2; levels])
    }

    /// Truncation level `N`.
    pub fn levels(&self) -> usize {
        self.radices.len()
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn radix(&self, k: usize) -> usize {
        self.radices[k]
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// `M_k` for `0 <= k <= N`.
    pub fn big_m(&self, k: usize) -> usize {
        self.products[k]
    }

    pub fn products(&self) -> &[usize] {
        &self.products
    }

    /// `M_N`, the number of points of the truncated group.
    pub fn order(&self) -> usize {
        self.products[self.radices.len()]
    }

    /// `|n|`: the unique `k` with `M_k <= n < M_{k+1}`.
    ///
    /// Only decidable for `1 <= n < M_N` since `m_N` is not part of the model.
    pub fn magnitude(&self, n: usize) -> Result<usize> {
        if n == 0 || n >= self.order() {
            return Err(out_of_range("n", n, format!("[1, {})", self.order())));
        }
        Ok(self.products.partition_point(|&mk| mk <= n) - 1)
    }

    /// Digit `k` of the flat index `x`.
    #[inline]
    pub fn digit(&self, x: usize, k: usize) -> usize {
        (x / self.products[k]) % self.radices[k]
    }

    pub fn check_index(&self, n: usize) -> Result<()> {
        if n < self.order() {
            Ok(())
        } else {
            Err(out_of_range("index", n, format!("[0, {})", self.order())))
        }
    }

    /// Coordinatewise sum of two flat indices.
    pub fn add_indices(&self, x: usize, y: usize) -> usize {
        let mut out = 0;
        for (k, &mk) in self.radices.iter().enumerate() {
            let d = (self.digit(x, k) + self.digit(y, k)) % mk;
            out += d * self.products[k];
        }
        out
    }

    /// Coordinatewise difference `x - y` of two flat indices.
    pub fn sub_indices(&self, x: usize, y: usize) -> usize {
        let mut out = 0;
        for (k, &mk) in self.radices.iter().enumerate() {
            let d = (self.digit(x, k) + mk - self.digit(y, k)) % mk;
            out += d * self.products[k];
        }
        out
    }

    /// Group inverse of a flat index.
    pub fn neg_index(&self, x: usize) -> usize {
        self.sub_indices(0, x)
    }

    /// Position of the first nonzero digit among the first `N`, if any.
    pub fn first_nonzero_digit(&self, x: usize) -> Option<usize> {
        (0..self.levels()).find(|&k| self.digit(x, k) != 0)
    }
}

/// Mixed-radix digits of `n`: `n = sum_j digits_j M_j`.
pub fn index_to_digits(spec: &GroupSpec, n: usize) -> Result<Vec<usize>> {
    spec.check_index(n)?;
    Ok((0..spec.levels()).map(|k| spec.digit(n, k)).collect())
}

pub fn digits_to_index(spec: &GroupSpec, digits: &[usize]) -> Result<usize> {
    if digits.len() != spec.levels() {
        return Err(Error::SpecMismatch);
    }
    let mut n = 0;
    for (k, &d) in digits.iter().enumerate() {
        if d >= spec.radix(k) {
            return Err(out_of_range("digit", d, format!("[0, {})", spec.radix(k))));
        }
        n += d * spec.big_m(k);
    }
    Ok(n)
}

/// An element `x = (x_0, ..., x_{N-1})` of the truncated group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    digits: Vec<usize>,
}

impl Point {
    pub fn new(spec: &GroupSpec, digits: Vec<usize>) -> Result<Self> {
        digits_to_index(spec, &digits)?;
        Ok(Point { digits })
    }

    pub fn zero(spec: &GroupSpec) -> Self {
        Point {
            digits: vec![0; spec.levels()],
        }
    }

    pub fn from_index(spec: &GroupSpec, n: usize) -> Result<Self> {
        Ok(Point {
            digits: index_to_digits(spec, n)?,
        })
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn index(&self, spec: &GroupSpec) -> Result<usize> {
        digits_to_index(spec, &self.digits)
    }

    fn check(&self, spec: &GroupSpec) -> Result<()> {
        if self.digits.len() != spec.levels()
            || self.digits.iter().zip(spec.radices()).any(|(&d, &m)| d >= m)
        {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }
}

pub fn group_add(spec: &GroupSpec, x: &Point, y: &Point) -> Result<Point> {
    x.check(spec)?;
    y.check(spec)?;
    let digits = x
        .digits
        .iter()
        .zip(&y.digits)
        .zip(spec.radices())
        .map(|((&a, &b), &m)| (a + b) % m)
        .collect();
    Ok(Point { digits })
}

pub fn group_sub(spec: &GroupSpec, x: &Point, y: &Point) -> Result<Point> {
    x.check(spec)?;
    y.check(spec)?;
    let digits = x
        .digits
        .iter()
        .zip(&y.digits)
        .zip(spec.radices())
        .map(|((&a, &b), &m)| (a + m - b) % m)
        .collect();
    Ok(Point { digits })
}

/// The cylinder `I_n(x)`: points agreeing with the anchor in the first `n` digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    level: usize,
    anchor: Vec<usize>,
}

impl Interval {
    pub fn new(spec: &GroupSpec, level: usize, anchor: Vec<usize>) -> Result<Self> {
        if level > spec.levels() {
            return Err(out_of_range("level", level, format!("[0, {}]", spec.levels())));
        }
        if anchor.len() != level {
            return Err(Error::Parameter(format!(
                "interval of level {level} needs {level} anchor digits, got {}",
                anchor.len()
            )));
        }
        for (k, &d) in anchor.iter().enumerate() {
            if d >= spec.radix(k) {
                return Err(out_of_range("digit", d, format!("[0, {})", spec.radix(k))));
            }
        }
        Ok(Interval { level, anchor })
    }

    /// `I_n := I_n(0)`.
    pub fn at_zero(spec: &GroupSpec, level: usize) -> Result<Self> {
        Self::new(spec, level, vec![0; level])
    }

    /// `I_n(x)` for the point with flat index `x`.
    pub fn containing(spec: &GroupSpec, level: usize, x: usize) -> Result<Self> {
        spec.check_index(x)?;
        let anchor = (0..level.min(spec.levels())).map(|k| spec.digit(x, k)).collect();
        Self::new(spec, level, anchor)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn anchor(&self) -> &[usize] {
        &self.anchor
    }

    /// Flat index of the anchor, i.e. the common residue modulo `M_n`.
    pub fn residue(&self, spec: &GroupSpec) -> usize {
        self.anchor
            .iter()
            .enumerate()
            .map(|(k, &d)| d * spec.big_m(k))
            .sum()
    }

    pub fn contains(&self, spec: &GroupSpec, x: usize) -> bool {
        x % spec.big_m(self.level) == self.residue(spec)
    }

    /// Number of points, `M_N / M_n`.
    pub fn len(&self, spec: &GroupSpec) -> usize {
        spec.order() / spec.big_m(self.level)
    }

    pub fn is_empty(&self, _spec: &GroupSpec) -> bool {
        false
    }

    /// Haar measure, `1 / M_n`.
    pub fn measure(&self, spec: &GroupSpec) -> f64 {
        1.0 / spec.big_m(self.level) as f64
    }

    /// Flat indices of the members in increasing order.
    pub fn members(&self, spec: &GroupSpec) -> Vec<usize> {
        let step = spec.big_m(self.level);
        let r = self.residue(spec);
        (0..self.len(spec)).map(|i| r + i * step).collect()
    }
}

pub fn interval_members(spec: &GroupSpec, interval: &Interval) -> Vec<usize> {
    interval.members(spec)
}

/// A cell `I_N^{k,l}` of the partition of `G \ I_N`.
///
/// For `l < N` the cell holds the points whose first nonzero digit is `x_k`
/// and whose second nonzero digit is `x_l`. For `l = N` it holds the points
/// whose only nonzero digit among the first `N` is `x_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplementCell {
    pub k: usize,
    pub l: usize,
}

impl ComplementCell {
    pub fn new(level: usize, k: usize, l: usize) -> Result<Self> {
        if !(k < l && l <= level) {
            return Err(Error::Parameter(format!(
                "cell needs 0 <= k < l <= N, got k={k}, l={l}, N={level}"
            )));
        }
        Ok(ComplementCell { k, l })
    }

    /// Membership of `x`, judged on its first `level` digits.
    pub fn contains_at(&self, spec: &GroupSpec, level: usize, x: usize) -> bool {
        let mut nonzero = (0..level).filter(|&j| spec.digit(x, j) != 0);
        match (nonzero.next(), nonzero.next()) {
            (Some(first), Some(second)) => first == self.k && second == self.l,
            (Some(first), None) => first == self.k && self.l == level,
            _ => false,
        }
    }

    pub fn contains(&self, spec: &GroupSpec, x: usize) -> bool {
        self.contains_at(spec, spec.levels(), x)
    }

    pub fn members(&self, spec: &GroupSpec) -> Vec<usize> {
        (0..spec.order()).filter(|&x| self.contains(spec, x)).collect()
    }
}

/// All cells `I_N^{k,l}`, `0 <= k < l <= N`, for the lemma level `level`.
pub fn complement_cells(level: usize) -> Vec<ComplementCell> {
    (0..level)
        .flat_map(|k| (k + 1..=level).map(move |l| ComplementCell { k, l }))
        .collect()
}

/// The partition of `G \ I_N` at the full truncation level.
pub fn complement_partition(spec: &GroupSpec) -> Vec<ComplementCell> {
    complement_cells(spec.levels())
}

/// Normalized Haar integral `(1/M_N) sum f`.
pub fn haar_integral(spec: &GroupSpec, values: &[Complex64]) -> Result<Complex64> {
    if values.len() != spec.order() {
        return Err(Error::LengthMismatch {
            expected: spec.order(),
            got: values.len(),
        });
    }
    Ok(values.iter().sum::<Complex64>() / spec.order() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_examples() {
        let g = GroupSpec::new(vec![2, 3, 2]).unwrap();
        assert_eq!(index_to_digits(&g, 7).unwrap(), vec![1, 0, 1]);
        assert_eq!(index_to_digits(&g, 0).unwrap(), vec![0, 0, 0]);
        let g33 = GroupSpec::new(vec![3, 3]).unwrap();
        assert_eq!(index_to_digits(&g33, 8).unwrap(), vec![2, 2]);
        assert!(matches!(
            index_to_digits(&g, 12),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_bad_radices() {
        assert!(GroupSpec::new(vec![]).is_err());
        assert!(GroupSpec::new(vec![2, 1]).is_err());
        assert!(GroupSpec::new(vec![2, 17]).is_err());
        assert!(GroupSpec::with_cap(vec![2, 17], 32).is_ok());
    }

    #[test]
    fn products_and_magnitude() {
        let g = GroupSpec::new(vec![2, 3, 4]).unwrap();
        assert_eq!(g.products(), &[1, 2, 6, 24]);
        assert_eq!(g.magnitude(1).unwrap(), 0);
        assert_eq!(g.magnitude(5).unwrap(), 1);
        assert_eq!(g.magnitude(6).unwrap(), 2);
        assert_eq!(g.magnitude(23).unwrap(), 2);
        assert!(g.magnitude(24).is_err());
    }

    #[test]
    fn add_sub_examples() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        let p = |d: Vec<usize>| Point::new(&g, d).unwrap();
        assert_eq!(group_add(&g, &p(vec![1, 0]), &p(vec![1, 1])).unwrap(), p(vec![0, 1]));
        assert_eq!(group_sub(&g, &p(vec![0, 1]), &p(vec![1, 1])).unwrap(), p(vec![1, 0]));
        let g32 = GroupSpec::new(vec![3, 2]).unwrap();
        let a = Point::new(&g32, vec![2, 1]).unwrap();
        assert_eq!(group_add(&g32, &a, &a).unwrap().digits(), &[1, 0]);
        assert_eq!(group_add(&g32, &a, &Point::zero(&g32)).unwrap(), a);
        assert_eq!(
            group_sub(&g32, &a, &a).unwrap(),
            Point::zero(&g32)
        );
        assert_eq!(group_add(&g, &p(vec![1, 0]), &a), Err(Error::SpecMismatch));
    }

    #[test]
    fn interval_examples() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        assert_eq!(Interval::at_zero(&g, 0).unwrap().members(&g), vec![0, 1, 2, 3]);
        // I_1(0) = {(0,0), (0,1)}
        assert_eq!(Interval::at_zero(&g, 1).unwrap().members(&g), vec![0, 2]);
        let g = GroupSpec::new(vec![2, 3, 4]).unwrap();
        for n in 0..=3 {
            let i = Interval::at_zero(&g, n).unwrap();
            assert_eq!(i.len(&g), 24 / g.big_m(n));
            assert!((i.measure(&g) - 1.0 / g.big_m(n) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn partition_walsh_four_points() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        let cells = complement_partition(&g);
        let pairs: Vec<_> = cells.iter().map(|c| (c.k, c.l)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
        let total: usize = cells.iter().map(|c| c.members(&g).len()).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn cells_with_l_equal_n_have_single_nonzero_digit() {
        let g = GroupSpec::new(vec![3, 2, 3]).unwrap();
        for k in 0..3 {
            let cell = ComplementCell::new(3, k, 3).unwrap();
            for x in cell.members(&g) {
                assert_eq!(g.first_nonzero_digit(x), Some(k));
                assert!((k + 1..3).all(|j| g.digit(x, j) == 0));
            }
        }
    }

    #[test]
    fn haar_examples() {
        let g = GroupSpec::new(vec![2, 2]).unwrap();
        let one = vec![Complex64::new(1.0, 0.0); 4];
        assert!((haar_integral(&g, &one).unwrap() - 1.0).norm() < 1e-15);
        let mut ind = vec![Complex64::new(0.0, 0.0); 4];
        for x in Interval::at_zero(&g, 1).unwrap().members(&g) {
            ind[x] = Complex64::new(1.0, 0.0);
        }
        assert!((haar_integral(&g, &ind).unwrap() - 0.5).norm() < 1e-15);
        assert!(haar_integral(&g, &one[..3]).is_err());
    }
}
