//! Experiment configuration read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vilenkin::lab::suites::AtomGrid;
use vilenkin::summability::WeightKind;
use vilenkin::GroupSpec;

use crate::CliError;

/// Largest Walsh level accepted for the atom experiments.
pub const MAX_GRID_LEVEL: usize = 14;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Radices. A single entry is repeated `N` times.
    #[serde(default)]
    pub m: Vec<usize>,
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    /// Walsh levels swept by the atom experiments.
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default = "default_families")]
    pub families: Vec<WeightKind>,
    #[serde(default = "default_ps")]
    pub p: Vec<f64>,
    #[serde(default = "default_atoms")]
    pub atoms: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Means run for `n <= cap * M_N`.
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub identity: f64,
    pub weight_sum: f64,
    pub nullity: f64,
    pub domination: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        use vilenkin::lab::suites::*;
        Tolerances {
            identity: IDENTITY_TOLERANCE,
            weight_sum: WEIGHT_SUM_TOLERANCE,
            nullity: NULLITY_TOLERANCE,
            domination: DOMINATION_SLACK,
        }
    }
}

impl Tolerances {
    /// Applies `key=value`.
    pub fn set(&mut self, item: &str) -> Result<(), CliError> {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--tolerance expects key=value, got `{item}`")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("tolerance `{key}`: `{value}` is not a number")))?;
        let slot = match key.trim() {
            "identity" => &mut self.identity,
            "weight_sum" => &mut self.weight_sum,
            "nullity" => &mut self.nullity,
            "domination" => &mut self.domination,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown tolerance `{other}` (identity, weight_sum, nullity, domination)"
                )))
            }
        };
        *slot = v;
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        for (k, v) in [
            ("identity", self.identity),
            ("weight_sum", self.weight_sum),
            ("nullity", self.nullity),
            ("domination", self.domination),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Usage(format!("tolerance `{k}` must be finite and >= 0")));
            }
        }
        Ok(())
    }
}

fn default_levels() -> Vec<usize> {
    vec![5, 6, 7, 8]
}

fn default_families() -> Vec<WeightKind> {
    vec![
        WeightKind::Fejer,
        WeightKind::Riesz,
        WeightKind::U { alpha: 0.5 },
        WeightKind::V { alpha: 0.5 },
        WeightKind::B { alpha: 1.0, beta: 1 },
    ]
}

fn default_ps() -> Vec<f64> {
    vec![0.25, 0.4, 0.5]
}

fn default_atoms() -> usize {
    200
}

fn default_seed() -> u64 {
    2024
}

fn default_cap() -> usize {
    4
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            m: vec![2],
            n: Some(6),
            levels: default_levels(),
            families: default_families(),
            p: default_ps(),
            atoms: default_atoms(),
            seed: default_seed(),
            cap: default_cap(),
            out: default_out(),
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Usage(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn group(&self) -> Result<GroupSpec, CliError> {
        let radices = match (self.m.len(), self.n) {
            (0, Some(n)) => vec![2; n],
            (0, None) => return Err(CliError::Usage("config needs `m` or `N`".into())),
            (1, Some(n)) => vec![self.m[0]; n],
            (len, Some(n)) if len != n => {
                return Err(CliError::Usage(format!("`m` has {len} radices but N = {n}")))
            }
            _ => self.m.clone(),
        };
        GroupSpec::new(radices).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn grid(&self) -> AtomGrid {
        AtomGrid {
            levels: self.levels.clone(),
            ps: self.p.clone(),
            atoms: self.atoms,
            seed: self.seed,
            cap_factor: self.cap,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.group()?;
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.families.is_empty() {
            return usage("`families` is empty".into());
        }
        for f in &self.families {
            f.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        }
        if self.p.is_empty() {
            return usage("`p` is empty".into());
        }
        if let Some(p) = self.p.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return usage(format!("p = {p} outside (0, 1]"));
        }
        if self.levels.is_empty() {
            return usage("`levels` is empty".into());
        }
        if let Some(l) = self.levels.iter().find(|l| !(1..=MAX_GRID_LEVEL).contains(*l)) {
            return usage(format!("level {l} outside [1, {MAX_GRID_LEVEL}]"));
        }
        if self.atoms == 0 {
            return usage("`atoms` must be >= 1".into());
        }
        if self.cap == 0 {
            return usage("`cap` must be >= 1".into());
        }
        self.tolerances.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config() {
        let cfg = ExperimentConfig::parse(
            r#"
            m = [2]
            N = 8
            p = [0.25, 0.5]
            atoms = 10
            seed = 7
            cap = 2
            out = "results"
            [[families]]
            family = "u"
            alpha = 0.5
            [[families]]
            family = "b"
            alpha = 1.0
            beta = 1
            [tolerances]
            identity = 1e-9
            "#,
        )
        .unwrap();
        assert_eq!(cfg.group().unwrap(), GroupSpec::walsh(8).unwrap());
        assert_eq!(cfg.families[1], WeightKind::B { alpha: 1.0, beta: 1 });
        assert_eq!(cfg.tolerances.identity, 1e-9);
        assert_eq!(cfg.tolerances.nullity, Tolerances::default().nullity);
    }

    #[test]
    fn mixed_radices_without_n() {
        let cfg = ExperimentConfig::parse("m = [3, 2, 4]").unwrap();
        assert_eq!(cfg.group().unwrap().order(), 24);
    }

    #[test]
    fn rejections() {
        for bad in [
            "",
            "m = [2, 2]\nN = 3",
            "m = [1]\nN = 2",
            "N = 3\np = [0.0]",
            "N = 3\nfoo = 1",
            "N = 3\n[[families]]\nfamily = \"u\"",
            "N = 3\n[[families]]\nfamily = \"u\"\nalpha = 1.5",
            "N = 3\nlevels = [40]",
            "N = 3\n[tolerances]\nidentity = -1.0",
        ] {
            assert!(matches!(ExperimentConfig::parse(bad), Err(CliError::Usage(_))), "{bad:?}");
        }
    }

    #[test]
    fn tolerance_override() {
        let mut t = Tolerances::default();
        t.set("nullity=1e-8").unwrap();
        assert_eq!(t.nullity, 1e-8);
        assert!(t.set("nullity").is_err());
        assert!(t.set("other=1").is_err());
    }
}
