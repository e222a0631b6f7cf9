//! TOML input files.
//!
//! A *system file* describes one fast-slow system:
//!
//! ```toml
//! [fast]
//! ratios = ["1", "sqrt(2)"]   # omega_j = ratio_j / epsilon, ascending, first is 1
//! epsilon = 0.01              # optional; scans supply their own
//!
//! [slow]
//! dimension = 1
//!
//! # V(Q, q) = sum coeff * Q^slow * q^fast
//! [[potential]]
//! coeff = "1/2"
//! slow = [2]
//! fast = [0, 0]
//!
//! [initial]                   # optional
//! fast_energy = 1.0           # h_omega at t = 0
//! slow_energy = 0.5           # H_0(P, Q, 0) is sampled on half this level
//! seed = 7
//! # or an explicit state: p, q, slow_p, slow_q
//! ```
//!
//! A *scan file* points at a system file (relative paths resolve against
//! the scan file) and lists the epsilon grid and frequency families:
//!
//! ```toml
//! system = "cubic.toml"
//! epsilons = [0.1, 0.05, 0.02, 0.01]
//! horizon_exponent = 2        # T = epsilon^-N
//! budget = 0.1
//! seed = 1
//! fast_energy = 1.0
//! slow_energy = 0.5
//! max_steps = 100000000
//!
//! [[family]]
//! tag = "sqrt2"
//! ratios = ["1", "sqrt(2)"]
//!
//! [[family]]
//! tag = "random"
//! random = 5                  # ratios uniform in [1, 2], sorted
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::model::{FrequencyVector, FullState, PotentialTerm, SlowHamiltonian};
use crate::number::QuadSurd;

fn parse_ratios(raw: &[String]) -> Result<Vec<QuadSurd>> {
    let ratios = raw
        .iter()
        .map(|s| s.parse::<QuadSurd>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    check_ratios(&ratios)?;
    Ok(ratios)
}

/// Ratios must start at exactly 1 and be non-decreasing, so that oscillator
/// indices in the potential keep their meaning.
pub fn check_ratios(ratios: &[QuadSurd]) -> Result<()> {
    if ratios.first() != Some(&QuadSurd::one()) {
        return Err(ParseError::Config("the first frequency ratio must be 1".into()).into());
    }
    if ratios.windows(2).any(|w| w[0] > w[1]) {
        return Err(ParseError::Config("frequency ratios must be ascending".into()).into());
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FastSection {
    ratios: Vec<String>,
    epsilon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlowSection {
    dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermSection {
    coeff: String,
    slow: Vec<u32>,
    fast: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub fast_energy: Option<f64>,
    pub slow_energy: Option<f64>,
    pub seed: Option<u64>,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub slow_p: Option<Vec<f64>>,
    pub slow_q: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    fast: FastSection,
    slow: SlowSection,
    #[serde(default)]
    potential: Vec<TermSection>,
    #[serde(default)]
    initial: Option<InitialSection>,
}

/// A parsed system file.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub ratios: Vec<QuadSurd>,
    pub epsilon: Option<f64>,
    pub hamiltonian: SlowHamiltonian,
    pub initial: InitialSection,
}

impl SystemConfig {
    pub fn n(&self) -> usize {
        self.ratios.len()
    }

    pub fn d(&self) -> usize {
        self.hamiltonian.d()
    }

    /// Frequencies at `epsilon`, or at the file's own epsilon.
    pub fn frequencies(&self, epsilon: Option<f64>) -> Result<FrequencyVector> {
        let eps = epsilon
            .or(self.epsilon)
            .ok_or_else(|| Error::InvalidArgument("no epsilon given".into()))?;
        FrequencyVector::from_ratios(self.ratios.clone(), eps)
    }

    /// The explicit initial state, if the file gives all four arrays.
    pub fn explicit_state(&self) -> Result<Option<FullState>> {
        let i = &self.initial;
        match (&i.p, &i.q, &i.slow_p, &i.slow_q) {
            (None, None, None, None) => Ok(None),
            (Some(p), Some(q), Some(sp), Some(sq)) => {
                for (want, got) in [(self.n(), p.len()), (self.n(), q.len()), (self.d(), sp.len()), (self.d(), sq.len())] {
                    if want != got {
                        return Err(Error::DimensionMismatch { expected: want, got });
                    }
                }
                Ok(Some(FullState {
                    p: p.clone(),
                    q: q.clone(),
                    slow_p: sp.clone(),
                    slow_q: sq.clone(),
                    t: 0.0,
                }))
            }
            _ => Err(ParseError::Config("an explicit initial state needs p, q, slow_p and slow_q".into()).into()),
        }
    }
}

pub fn parse_system(text: &str) -> Result<SystemConfig> {
    let raw: SystemFile = toml::from_str(text).map_err(|e| ParseError::Config(e.to_string()))?;
    let ratios = parse_ratios(&raw.fast.ratios)?;
    let terms = raw
        .potential
        .into_iter()
        .map(|t| {
            let c: QuadSurd = t.coeff.parse()?;
            let coeff = c
                .as_rational()
                .cloned()
                .ok_or_else(|| ParseError::Config(format!("coefficient `{}` must be rational", t.coeff)))?;
            Ok(PotentialTerm {
                coeff,
                slow_exp: t.slow,
                fast_exp: t.fast,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let hamiltonian = SlowHamiltonian::new(ratios.len(), raw.slow.dimension, terms)?;
    Ok(SystemConfig {
        ratios,
        epsilon: raw.fast.epsilon,
        hamiltonian,
        initial: raw.initial.unwrap_or_default(),
    })
}

pub fn load_system(path: &Path) -> Result<SystemConfig> {
    parse_system(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilySection {
    tag: String,
    ratios: Option<Vec<String>>,
    random: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanFile {
    system: PathBuf,
    epsilons: Vec<f64>,
    horizon_exponent: u32,
    budget: f64,
    seed: u64,
    fast_energy: f64,
    slow_energy: f64,
    max_steps: Option<u64>,
    steps_per_period: Option<f64>,
    output: Option<PathBuf>,
    family: Vec<FamilySection>,
}

/// One entry of a scan's frequency list.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Fixed(Vec<QuadSurd>),
    /// `count` vectors `(1, r_2, ..., r_n)` with `r_j` uniform in `[1, 2]`,
    /// sorted.
    Random { count: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub tag: String,
    pub spec: FamilySpec,
}

/// Default step budget per record.
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub system: SystemConfig,
    pub epsilons: Vec<f64>,
    pub horizon_exponent: u32,
    pub budget: f64,
    pub seed: u64,
    pub fast_energy: f64,
    pub slow_energy: f64,
    pub max_steps: u64,
    pub steps_per_period: f64,
    pub output: Option<PathBuf>,
    pub families: Vec<Family>,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| -> Result<()> { Err(ParseError::Config(m).into()) };
        if self.epsilons.is_empty() {
            return bad("empty epsilon grid".into());
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad("epsilons must be positive".into());
        }
        if self.epsilons.windows(2).any(|w| w[0] <= w[1]) {
            return bad("the epsilon grid must be strictly decreasing".into());
        }
        if self.horizon_exponent == 0 {
            return bad("horizon_exponent must be at least 1".into());
        }
        if !(self.budget > 0.0 && self.budget < 1.0) {
            return bad(format!("budget must lie in (0, 1), got {}", self.budget));
        }
        if !(self.fast_energy > 0.0 && self.slow_energy >= 0.0) {
            return bad("energies must be positive".into());
        }
        if self.max_steps == 0 || self.steps_per_period.is_nan() || self.steps_per_period < 1.0 {
            return bad("max_steps and steps_per_period must be positive".into());
        }
        if self.families.is_empty() {
            return bad("no frequency families".into());
        }
        for f in &self.families {
            if let FamilySpec::Fixed(r) = &f.spec {
                if r.len() != self.system.n() {
                    return Err(Error::DimensionMismatch {
                        expected: self.system.n(),
                        got: r.len(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parses a scan file; `base` resolves a relative system path.
pub fn parse_scan(text: &str, base: &Path) -> Result<ScanConfig> {
    let raw: ScanFile = toml::from_str(text).map_err(|e| ParseError::Config(e.to_string()))?;
    let system_path = if raw.system.is_absolute() {
        raw.system.clone()
    } else {
        base.join(&raw.system)
    };
    let system = load_system(&system_path)?;
    let families = raw
        .family
        .into_iter()
        .map(|f| {
            let spec = match (f.ratios, f.random) {
                (Some(r), None) => FamilySpec::Fixed(parse_ratios(&r)?),
                (None, Some(count)) if count > 0 => FamilySpec::Random { count },
                _ => {
                    return Err(ParseError::Config(format!(
                        "family `{}` needs exactly one of `ratios` or a positive `random`",
                        f.tag
                    ))
                    .into())
                }
            };
            Ok(Family { tag: f.tag, spec })
        })
        .collect::<Result<Vec<_>>>()?;
    let cfg = ScanConfig {
        system,
        epsilons: raw.epsilons,
        horizon_exponent: raw.horizon_exponent,
        budget: raw.budget,
        seed: raw.seed,
        fast_energy: raw.fast_energy,
        slow_energy: raw.slow_energy,
        max_steps: raw.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
        steps_per_period: raw.steps_per_period.unwrap_or(crate::integrator::STEPS_PER_PERIOD),
        output: raw.output.map(|o| if o.is_absolute() { o } else { base.join(o) }),
        families,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_scan(path: &Path) -> Result<ScanConfig> {
    let base = path.parent().unwrap_or(Path::new("."));
    parse_scan(&std::fs::read_to_string(path)?, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBIC: &str = r#"
[fast]
ratios = ["1", "sqrt(2)"]
epsilon = 0.01

[slow]
dimension = 1

[[potential]]
coeff = "1/2"
slow = [2]
fast = [0, 0]

[[potential]]
coeff = "1/2"
slow = [2]
fast = [1, 0]

[[potential]]
coeff = "1/2"
slow = [2]
fast = [0, 1]
"#;

    #[test]
    fn system_file_parses() {
        let sys = parse_system(CUBIC).unwrap();
        assert_eq!(sys.n(), 2);
        assert_eq!(sys.d(), 1);
        assert_eq!(sys.ratios[1], QuadSurd::sqrt_of(2));
        let f = sys.frequencies(None).unwrap();
        assert!((f.omega()[1] - 100.0 * 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(sys.hamiltonian.potential(&[2.0], &[1.0, 1.0]), 2.0 + 2.0 + 2.0);
        assert_eq!(sys.explicit_state().unwrap(), None);
    }

    #[test]
    fn bad_system_files_are_rejected() {
        assert!(parse_system(&CUBIC.replace("\"1\", \"sqrt(2)\"", "\"sqrt(2)\", \"1\"")).is_err());
        assert!(parse_system(&CUBIC.replace("fast = [1, 0]", "fast = [1]")).is_err());
        assert!(parse_system(&CUBIC.replace("\"1/2\"", "\"sqrt(3)\"")).is_err());
        assert!(parse_system(&CUBIC.replace("dimension", "dim")).is_err());
        let partial = format!("{CUBIC}\n[initial]\np = [0.1, 0.2]\n");
        assert!(parse_system(&partial).unwrap().explicit_state().is_err());
    }

    #[test]
    fn scan_file_parses_and_validates() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("cubic.toml"), CUBIC).unwrap();
        let scan = r#"
system = "cubic.toml"
epsilons = [0.1, 0.05]
horizon_exponent = 2
budget = 0.1
seed = 3
fast_energy = 1.0
slow_energy = 0.5

[[family]]
tag = "sqrt2"
ratios = ["1", "sqrt(2)"]

[[family]]
tag = "random"
random = 4
"#;
        let cfg = parse_scan(scan, dir.path()).unwrap();
        assert_eq!(cfg.families.len(), 2);
        assert_eq!(cfg.families[1].spec, FamilySpec::Random { count: 4 });
        assert_eq!(cfg.max_steps, DEFAULT_MAX_STEPS);
        assert!(parse_scan(&scan.replace("[0.1, 0.05]", "[0.05, 0.1]"), dir.path()).is_err());
        assert!(parse_scan(&scan.replace("budget = 0.1", "budget = 1.5"), dir.path()).is_err());
        assert!(parse_scan(&scan.replace("random = 4", "random = 4\nratios = [\"1\"]"), dir.path()).is_err());
    }
}
