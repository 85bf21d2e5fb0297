//! Point-indexed signals and their Vilenkin–Fourier spectra.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::GroupSpec;

/// A complex function on the truncated group, indexed by flat point index.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    spec: GroupSpec,
    values: Vec<Complex64>,
}

/// Fourier coefficients `f^(0), ..., f^(M_N - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    spec: GroupSpec,
    coeffs: Vec<Complex64>,
}

macro_rules! complex_vector {
    ($ty:ident, $field:ident) => {
        impl $ty {
            pub fn new(spec: &GroupSpec, $field: Vec<Complex64>) -> Result<Self> {
                if $field.len() != spec.order() {
                    return Err(Error::LengthMismatch {
                        expected: spec.order(),
                        got: $field.len(),
                    });
                }
                if $field.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Parameter("non-finite entry".into()));
                }
                Ok($ty {
                    spec: spec.clone(),
                    $field,
                })
            }

            pub(crate) fn from_parts(spec: GroupSpec, $field: Vec<Complex64>) -> Self {
                debug_assert_eq!($field.len(), spec.order());
                $ty { spec, $field }
            }

            pub fn zeros(spec: &GroupSpec) -> Self {
                Self::from_parts(spec.clone(), vec![Complex64::new(0.0, 0.0); spec.order()])
            }

            pub fn from_fn(spec: &GroupSpec, mut f: impl FnMut(usize) -> Complex64) -> Self {
                Self::from_parts(spec.clone(), (0..spec.order()).map(&mut f).collect())
            }

            pub fn from_real(spec: &GroupSpec, values: &[f64]) -> Result<Self> {
                Self::new(spec, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            }

            pub fn spec(&self) -> &GroupSpec {
                &self.spec
            }

            pub fn as_slice(&self) -> &[Complex64] {
                &self.$field
            }

            pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
                &mut self.$field
            }

            pub fn into_vec(self) -> Vec<Complex64> {
                self.$field
            }

            pub fn len(&self) -> usize {
                self.$field.len()
            }

            pub fn is_empty(&self) -> bool {
                self.$field.is_empty()
            }

            pub fn same_group(&self, other: &Self) -> Result<()> {
                if self.spec == other.spec {
                    Ok(())
                } else {
                    Err(Error::SpecMismatch)
                }
            }

            pub fn scaled(&self, c: Complex64) -> Self {
                Self::from_parts(self.spec.clone(), self.$field.iter().map(|z| z * c).collect())
            }

            /// `self + c * other`.
            pub fn add_scaled(&self, c: Complex64, other: &Self) -> Result<Self> {
                self.same_group(other)?;
                let v = self.$field.iter().zip(&other.$field).map(|(a, b)| a + c * b).collect();
                Ok(Self::from_parts(self.spec.clone(), v))
            }

            pub fn max_abs(&self) -> f64 {
                self.$field.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }

            /// Sup-norm distance; `INFINITY` when the groups differ.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                if self.spec != other.spec {
                    return f64::INFINITY;
                }
                self.$field
                    .iter()
                    .zip(&other.$field)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            }

            /// JSON array of `[re, im]` pairs.
            pub fn to_json(&self) -> String {
                let pairs: Vec<[f64; 2]> = self.$field.iter().map(|z| [z.re, z.im]).collect();
                serde_json::to_string(&pairs).expect("finite floats serialize")
            }

            pub fn from_json(spec: &GroupSpec, text: &str) -> Result<Self> {
                let pairs: Vec<[f64; 2]> =
                    serde_json::from_str(text).map_err(|e| Error::Parameter(e.to_string()))?;
                Self::new(spec, pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            }

            /// CSV with header `index,re,im`, 12 significant digits.
            pub fn to_csv(&self) -> String {
                let mut out = String::from("index,re,im\n");
                for (i, z) in self.$field.iter().enumerate() {
                    let _ = writeln!(out, "{i},{},{}", fmt_sig(z.re), fmt_sig(z.im));
                }
                out
            }
        }
    };
}

complex_vector!(Signal, values);
complex_vector!(Spectrum, coeffs);

impl Signal {
    pub fn constant(spec: &GroupSpec, c: Complex64) -> Self {
        Self::from_parts(spec.clone(), vec![c; spec.order()])
    }

    /// Normalized Haar integral.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

impl std::ops::Index<usize> for Signal {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.values[i]
    }
}

impl std::ops::Index<usize> for Spectrum {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.coeffs[i]
    }
}

/// Float formatting used by every table writer: 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}
