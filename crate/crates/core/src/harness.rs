//! Drift scans over epsilon grids and frequency families, exponent fits, and
//! the normal-form certification with its drift budget.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{FamilySpec, ScanConfig, SystemConfig};
use crate::diophantine::{build_resonance_model, ResonanceModel, ResonanceOptions};
use crate::error::{Error, Result};
use crate::integrator::{integrate_streaming, IntegratorConfig, RunStatus};
use crate::model::{FrequencyVector, FullState, SlowHamiltonian};
use crate::normal_form::{normalize, residual_bracket, NormalFormResult, StageReport, TransformChecks};
use crate::number::QuadSurd;
use crate::poisson::GradedPolynomial;
use crate::stats::{linear_fit, LinearFit};

const MAX_REJECTIONS: usize = 100_000;

/// Initial data with `h_omega = fast_energy` split evenly over the
/// oscillators with random phases, and `H_0(P, Q, 0) = slow_energy / 2`
/// sampled by rejection from the box `|Q_k| <= 1 + sqrt(slow_energy)`.
pub fn sample_initial_state<R: Rng>(
    freq: &FrequencyVector,
    spec: &SlowHamiltonian,
    fast_energy: f64,
    slow_energy: f64,
    rng: &mut R,
) -> Result<FullState> {
    let (n, d) = (freq.n(), spec.d());
    let mut s = FullState::zeros(n, d);
    let share = fast_energy / n as f64;
    for j in 0..n {
        let theta = rng.random_range(0.0..2.0 * PI);
        let amp = (2.0 * share).sqrt();
        s.p[j] = amp * theta.cos();
        s.q[j] = amp * theta.sin() / freq.omega()[j];
    }
    if d == 0 {
        return Ok(s);
    }
    let box_side = 1.0 + slow_energy.sqrt();
    let zero_fast = vec![0.0; n];
    for _ in 0..MAX_REJECTIONS {
        let q: Vec<f64> = (0..d).map(|_| rng.random_range(-box_side..=box_side)).collect();
        let kinetic = slow_energy - 2.0 * spec.potential(&q, &zero_fast);
        if kinetic < 0.0 {
            continue;
        }
        let dir: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        s.slow_q = q;
        s.slow_p = dir.iter().map(|x| x / norm * kinetic.sqrt()).collect();
        return Ok(s);
    }
    Err(Error::InvalidArgument(format!(
        "no slow state with H_0(P, Q, 0) = {} found",
        slow_energy / 2.0
    )))
}

/// `(1, r_2, ..., r_n)` with `r_j` uniform in `[1, 2]`, sorted; each float
/// is taken exactly.
pub fn random_ratios<R: Rng>(n: usize, rng: &mut R) -> Vec<QuadSurd> {
    let mut r: Vec<f64> = (1..n).map(|_| rng.random_range(1.0..2.0)).collect();
    r.sort_by(f64::total_cmp);
    std::iter::once(QuadSurd::one())
        .chain(r.into_iter().map(|x| QuadSurd::from_f64(x).expect("finite")))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordStatus {
    Ok,
    BlowUp,
    /// The step budget stopped the run before `epsilon^-N`.
    BudgetExceeded,
}

impl fmt::Display for RecordStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordStatus::Ok => "ok",
            RecordStatus::BlowUp => "blowup",
            RecordStatus::BudgetExceeded => "budget-exceeded",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftRecord {
    pub epsilon: f64,
    pub family: String,
    pub member: usize,
    pub ratios: Vec<QuadSurd>,
    pub omega: Vec<f64>,
    pub horizon_requested: f64,
    pub horizon: f64,
    pub dt: f64,
    pub steps: u64,
    /// `max |h_omega(t) - h_omega(0)| / h_omega(0)`.
    pub drift_fast: f64,
    /// Same for the full Hamiltonian.
    pub drift_total: f64,
    pub wall_seconds: f64,
    pub status: RecordStatus,
}

struct Job {
    epsilon: f64,
    family: usize,
    member: usize,
    ratios: Vec<QuadSurd>,
}

fn jobs(cfg: &ScanConfig) -> Vec<Job> {
    let n = cfg.system.n();
    // Family members are drawn once, so every epsilon sees the same vectors.
    let members: Vec<Vec<Vec<QuadSurd>>> = cfg
        .families
        .iter()
        .enumerate()
        .map(|(fi, fam)| match &fam.spec {
            FamilySpec::Fixed(r) => vec![r.clone()],
            FamilySpec::Random { count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(1 + fi as u64);
                (0..*count).map(|_| random_ratios(n, &mut rng)).collect()
            }
        })
        .collect();
    let mut out = Vec::new();
    for &epsilon in &cfg.epsilons {
        for (fi, list) in members.iter().enumerate() {
            for (mi, ratios) in list.iter().enumerate() {
                out.push(Job {
                    epsilon,
                    family: fi,
                    member: mi,
                    ratios: ratios.clone(),
                });
            }
        }
    }
    out
}

/// Seed stream for the initial condition of one family member; the same
/// at every epsilon.
fn initial_stream(family: usize, member: usize) -> u64 {
    ((family as u64 + 1) << 32) | member as u64
}

fn run_job(cfg: &ScanConfig, job: &Job) -> Result<DriftRecord> {
    let spec = &cfg.system.hamiltonian;
    let freq = FrequencyVector::from_ratios(job.ratios.clone(), job.epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(initial_stream(job.family, job.member));
    let state0 = sample_initial_state(&freq, spec, cfg.fast_energy, cfg.slow_energy, &mut rng)?;
    let requested = job.epsilon.powi(-(cfg.horizon_exponent as i32));
    let dt = 2.0 * PI * job.epsilon / cfg.steps_per_period;
    let mut icfg = IntegratorConfig::new(dt, requested.max(dt));
    let capped = icfg.steps() > cfg.max_steps;
    if capped {
        icfg.horizon = cfg.max_steps as f64 * dt;
    }
    icfg.sample_stride = u64::MAX;
    let start = std::time::Instant::now();
    let summary = integrate_streaming(&state0, &freq, spec, &icfg, |_| {})?;
    let status = match summary.status {
        RunStatus::BlowUp { .. } => RecordStatus::BlowUp,
        RunStatus::Completed if capped => RecordStatus::BudgetExceeded,
        RunStatus::Completed => RecordStatus::Ok,
    };
    Ok(DriftRecord {
        epsilon: job.epsilon,
        family: cfg.families[job.family].tag.clone(),
        member: job.member,
        ratios: job.ratios.clone(),
        omega: freq.omega().to_vec(),
        horizon_requested: requested,
        horizon: summary.steps as f64 * dt,
        dt,
        steps: summary.steps,
        drift_fast: summary.relative_drift_fast(),
        drift_total: summary.relative_drift_total(),
        wall_seconds: start.elapsed().as_secs_f64(),
        status,
    })
}

/// Runs every `(epsilon, family member)` pair in parallel; records come
/// back in configuration order.
pub fn run_drift_scan(cfg: &ScanConfig) -> Result<Vec<DriftRecord>> {
    cfg.validate()?;
    jobs(cfg).par_iter().map(|job| run_job(cfg, job)).collect()
}

/// CSV of the records. Wall time is left out so equal configurations give
/// byte-identical files.
pub fn write_records_csv<W: Write>(records: &[DriftRecord], mut out: W) -> Result<()> {
    writeln!(
        out,
        "epsilon,family,member,ratios,horizon_requested,horizon,dt,steps,drift_fast,drift_total,status"
    )?;
    for r in records {
        let ratios: Vec<String> = r.ratios.iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "{:.16e},{},{},{},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{}",
            r.epsilon,
            r.family,
            r.member,
            ratios.join(";"),
            r.horizon_requested,
            r.horizon,
            r.dt,
            r.steps,
            r.drift_fast,
            r.drift_total,
            r.status
        )?;
    }
    Ok(())
}

/// Least-squares slope of `log drift` against `log epsilon` over the `ok`
/// records of `family` (all families when `None`).
pub fn fit_drift_exponent(records: &[DriftRecord], family: Option<&str>) -> Result<LinearFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.status == RecordStatus::Ok && family.is_none_or(|f| r.family == f))
        .filter(|r| r.drift_fast > 0.0)
        .map(|r| (r.epsilon.ln(), r.drift_fast.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!("{} usable records, need 3", pts.len())));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    linear_fit(&xs, &ys)
}

/// Spread of drift across all records at one epsilon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Uniformity {
    pub max: f64,
    pub min: f64,
    pub ratio: f64,
    pub count: usize,
}

pub fn uniformity(records: &[DriftRecord], epsilon: f64) -> Result<Uniformity> {
    let drifts: Vec<f64> = records
        .iter()
        .filter(|r| r.epsilon == epsilon && r.status == RecordStatus::Ok)
        .map(|r| r.drift_fast)
        .collect();
    if drifts.is_empty() {
        return Err(Error::InsufficientData(format!("no records at epsilon = {epsilon}")));
    }
    let max = drifts.iter().copied().fold(f64::MIN, f64::max);
    let min = drifts.iter().copied().fold(f64::MAX, f64::min);
    Ok(Uniformity {
        max,
        min,
        ratio: max / min,
        count: drifts.len(),
    })
}

/// Plain-text summary of a scan.
pub fn scan_report(cfg: &ScanConfig, records: &[DriftRecord]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "drift scan: {} records, horizon epsilon^-{}\n",
        records.len(),
        cfg.horizon_exponent
    ));
    for r in records {
        s.push_str(&format!(
            "eps={:<8} family={:<10} member={:<3} T={:<12.6e} drift_fast={:.3e} drift_total={:.3e} status={} wall={:.2}s\n",
            r.epsilon, r.family, r.member, r.horizon, r.drift_fast, r.drift_total, r.status, r.wall_seconds
        ));
    }
    for fam in &cfg.families {
        match fit_drift_exponent(records, Some(&fam.tag)) {
            Ok(fit) => s.push_str(&format!(
                "fit {}: slope={:.4} intercept={:.4} r2={:.4}\n",
                fam.tag, fit.slope, fit.intercept, fit.r2
            )),
            Err(e) => s.push_str(&format!("fit {}: {e}\n", fam.tag)),
        }
    }
    for &eps in &cfg.epsilons {
        if let Ok(u) = uniformity(records, eps) {
            s.push_str(&format!(
                "uniformity eps={eps}: max={:.3e} min={:.3e} ratio={:.3}\n",
                u.max, u.min, u.ratio
            ));
        }
    }
    s.push_str(
        "note: exponentially long horizons are out of reach; boundedness over the stated horizon is what is measured\n",
    );
    s
}

/// Inputs of a certification run.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifyConfig {
    pub order: usize,
    pub budget: f64,
    pub epsilon: f64,
    /// `E = h_omega(0)`.
    pub fast_energy: f64,
    /// Bound on `|P_k|` and `|Q_k|` over the run. The default covers
    /// `|P|^2/2 + |Q|^2/2 <= 1`, the slow domain for initial slow energy
    /// below 0.5 when the potential starts with `Q^2/2`.
    pub slow_radius: f64,
    pub options: ResonanceOptions,
}

impl CertifyConfig {
    pub fn new(order: usize, budget: f64, epsilon: f64) -> Self {
        Self {
            order,
            budget,
            epsilon,
            fast_energy: 1.0,
            slow_radius: std::f64::consts::SQRT_2,
            options: ResonanceOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetTerm {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct CertificationReport {
    pub config: CertifyConfig,
    pub model: ResonanceModel,
    pub stages: Vec<StageReport>,
    pub residual_min_order: Option<i64>,
    pub checks: TransformChecks,
    pub generator_norm_product: f64,
    /// The five terms, in units of `h_omega`.
    pub terms: Vec<BudgetTerm>,
    pub total: f64,
    /// `E b`.
    pub limit: f64,
    pub result: NormalFormResult,
}

impl CertificationReport {
    pub fn holds(&self) -> bool {
        self.total <= self.limit && self.checks.hold()
    }
}

/// Upper bound of `|p|` on the real phase-space region
/// `h_omega <= scale^2 E` (that is `sum_j 2 nu_j^2 |x_j|^2 <= eps scale^2 E`)
/// with `|P_k|, |Q_k| <= slow`. Each monomial is replaced by its exact
/// supremum over the ellipsoid, `prod_j (S d_j / (2 nu_j^2 D))^{d_j / 2}`
/// for fast degrees `d_j` summing to `D`.
pub fn majorant(p: &GradedPolynomial, nu: &[QuadSurd], epsilon: f64, scale: f64, energy: f64, slow: f64) -> f64 {
    let bound = epsilon * scale * scale * energy;
    let nu: Vec<f64> = nu.iter().map(QuadSurd::to_f64).collect();
    let sqrt_eps = epsilon.sqrt();
    p.iter()
        .map(|(k, c)| {
            let mut v = c.magnitude() * sqrt_eps.powi(k.sqrt_eps as i32);
            let total = f64::from(k.fast_degree());
            for (j, v_j) in nu.iter().enumerate() {
                let d = f64::from(k.l[j] + k.m[j]);
                if d > 0.0 {
                    v *= (bound * d / (2.0 * v_j * v_j * total)).powf(d / 2.0);
                }
            }
            let slow_deg: u32 = k.u.iter().chain(&k.v).sum();
            v * slow.powi(slow_deg as i32)
        })
        .sum()
}

/// Builds the resonance model, normalizes, and evaluates the five-term
/// drift budget at the configured `E`, `epsilon`. Time is that of the
/// scaled Hamiltonian `h_nu + epsilon H_0` with `|t| <= epsilon^-N`.
pub fn run_certification(system: &SystemConfig, cfg: &CertifyConfig) -> Result<CertificationReport> {
    if !(cfg.budget > 0.0 && cfg.budget < 1.0) {
        return Err(Error::InvalidArgument(format!("b must lie in (0, 1), got {}", cfg.budget)));
    }
    if !(cfg.epsilon > 0.0 && cfg.fast_energy > 0.0 && cfg.slow_radius > 0.0) {
        return Err(Error::InvalidArgument("epsilon, E and the slow radius must be positive".into()));
    }
    let model = build_resonance_model(&system.ratios, cfg.order, cfg.budget, &cfg.options)?;
    let result = normalize(&system.hamiltonian, &model, cfg.order)?;
    let alg = &result.algebra;
    let (eps, e) = (cfg.epsilon, cfg.fast_energy);
    let alpha_over_n = model.alpha_f64() / cfg.order as f64;

    let nu_tilde = model.nu_tilde_surd();
    let h_tilde = alg.h_nu(&nu_tilde);
    let shifted = result
        .generators
        .iter()
        .try_fold(h_tilde.clone(), |acc, g| {
            crate::normal_form::lie_transform(alg, &acc, &g.chi, result.carried_order())
        })?
        .sub(&h_tilde);
    // New variables stay within twice the initial energy ball.
    let transform_shift = majorant(&shifted, alg.nu(), eps, 2.0, e, cfg.slow_radius) / eps;
    let residual = majorant(&residual_bracket(&result), alg.nu(), eps, 2.0, e, cfg.slow_radius);
    // Horizon in the algebra's time s = t / eps.
    let horizon = eps.powi(-(cfg.order as i32));

    let terms = vec![
        BudgetTerm {
            name: "|h_nu - h_nu_tilde| at t",
            value: 4.0 * e * alpha_over_n,
        },
        BudgetTerm {
            name: "|h_nu_tilde - h'_nu_tilde| at t",
            value: transform_shift,
        },
        BudgetTerm {
            name: "|{h_nu_tilde, H o T}| |t|",
            value: residual * horizon / eps,
        },
        BudgetTerm {
            name: "|h'_nu_tilde - h_nu_tilde| at 0",
            value: transform_shift,
        },
        BudgetTerm {
            name: "|h_nu_tilde - h_nu| at 0",
            value: 9.0 * e * alpha_over_n,
        },
    ];
    let total = terms.iter().map(|t| t.value).sum();
    Ok(CertificationReport {
        config: cfg.clone(),
        stages: result.stages.clone(),
        residual_min_order: result.residual_min_order,
        checks: result.checks.clone(),
        generator_norm_product: result.generator_norm_product(),
        terms,
        total,
        limit: e * cfg.budget,
        model,
        result,
    })
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(f, "certification N={} b={} epsilon={} E={} slow_radius={}", c.order, c.budget, c.epsilon, c.fast_energy, c.slow_radius)?;
        writeln!(f, "resonance model: {}", self.model)?;
        writeln!(f, "alpha = {:.6e}  max |nu_tilde - nu| = {:.6e}", self.model.alpha_f64(), self.model.max_frequency_shift())?;
        for s in &self.stages {
            writeln!(
                f,
                "stage {}: order {} resonant {} nonresonant {} |chi| {:.6e}",
                s.stage, s.order, s.resonant_terms, s.nonresonant_terms, s.generator_norm
            )?;
        }
        match self.residual_min_order {
            Some(o) => writeln!(f, "residual bracket min order: {o} (required > {})", 2 * c.order)?,
            None => writeln!(f, "residual bracket vanishes")?,
        }
        writeln!(
            f,
            "transform checks: h_nu_tilde shift order {:?}, epsilon H_0 shift order {:?}: {}",
            self.checks.hnu_tilde_shift_min_order,
            self.checks.h0_shift_min_order,
            if self.checks.hold() { "ok" } else { "FAILED" }
        )?;
        writeln!(f, "generator norm product: {:.6e}", self.generator_norm_product)?;
        writeln!(f, "drift budget (units of h_omega, terms truncated at order {}):", 2 * c.order + 2)?;
        for t in &self.terms {
            writeln!(f, "  {:<34} {:.6e}", t.name, t.value)?;
        }
        writeln!(f, "  total {:.6e} vs E b = {:.6e}", self.total, self.limit)?;
        writeln!(
            f,
            "budget predicate: {}",
            if self.holds() { "holds" } else { "does not hold" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_system, Family};

    const CUBIC: &str = r#"
[fast]
ratios = ["1", "sqrt(2)"]
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

    const FREE: &str = r#"
[fast]
ratios = ["1", "sqrt(2)"]
[slow]
dimension = 1
[[potential]]
coeff = "1/2"
slow = [2]
fast = [0, 0]
"#;

    fn scan(system: &str, epsilons: Vec<f64>, n: u32) -> ScanConfig {
        ScanConfig {
            system: parse_system(system).unwrap(),
            epsilons,
            horizon_exponent: n,
            budget: 0.1,
            seed: 11,
            fast_energy: 1.0,
            slow_energy: 0.5,
            max_steps: 10_000_000,
            steps_per_period: 40.0,
            output: None,
            families: vec![
                Family {
                    tag: "sqrt2".into(),
                    spec: FamilySpec::Fixed(vec![QuadSurd::one(), QuadSurd::sqrt_of(2)]),
                },
                Family {
                    tag: "random".into(),
                    spec: FamilySpec::Random { count: 2 },
                },
            ],
        }
    }

    fn record(eps: f64, drift: f64) -> DriftRecord {
        DriftRecord {
            epsilon: eps,
            family: "f".into(),
            member: 0,
            ratios: vec![QuadSurd::one()],
            omega: vec![1.0 / eps],
            horizon_requested: 1.0,
            horizon: 1.0,
            dt: 0.1,
            steps: 10,
            drift_fast: drift,
            drift_total: 0.0,
            wall_seconds: 0.0,
            status: RecordStatus::Ok,
        }
    }

    #[test]
    fn sampled_state_has_requested_energies() {
        let sys = parse_system(CUBIC).unwrap();
        let freq = sys.frequencies(Some(0.05)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = sample_initial_state(&freq, &sys.hamiltonian, 2.0, 0.5, &mut rng).unwrap();
        let e = crate::model::h_omega(&s.p, &s.q, &freq).unwrap();
        assert!((e - 2.0).abs() < 1e-12);
        let h0 = sys.hamiltonian.energy(&s.slow_p, &s.slow_q, &[0.0, 0.0]);
        assert!((h0 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn decoupled_scan_has_no_drift() {
        let records = run_drift_scan(&scan(FREE, vec![0.1], 1)).unwrap();
        assert_eq!(records.len(), 3);
        for r in &records {
            assert_eq!(r.status, RecordStatus::Ok);
            assert!(r.drift_fast < 1e-13, "{}", r.drift_fast);
        }
    }

    #[test]
    fn scan_csv_is_deterministic() {
        let cfg = scan(CUBIC, vec![0.2, 0.1], 1);
        let csv = |recs: &[DriftRecord]| {
            let mut b = Vec::new();
            write_records_csv(recs, &mut b).unwrap();
            b
        };
        let a = csv(&run_drift_scan(&cfg).unwrap());
        let b = csv(&run_drift_scan(&cfg).unwrap());
        assert_eq!(a, b);
        let serial: Vec<DriftRecord> = jobs(&cfg).iter().map(|j| run_job(&cfg, j).unwrap()).collect();
        assert_eq!(csv(&serial), a);
    }

    #[test]
    fn step_budget_caps_and_flags() {
        let mut cfg = scan(CUBIC, vec![0.1], 3);
        cfg.max_steps = 1000;
        let records = run_drift_scan(&cfg).unwrap();
        assert!(records.iter().all(|r| r.status == RecordStatus::BudgetExceeded && r.steps == 1000));
    }

    #[test]
    fn synthetic_fits() {
        let eps = [0.1, 0.05, 0.02, 0.01];
        let linear: Vec<DriftRecord> = eps.iter().map(|&e| record(e, e)).collect();
        let fit = fit_drift_exponent(&linear, Some("f")).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12 && (fit.r2 - 1.0).abs() < 1e-12);
        let root: Vec<DriftRecord> = eps.iter().map(|&e| record(e, e.sqrt())).collect();
        assert!((fit_drift_exponent(&root, None).unwrap().slope - 0.5).abs() < 1e-12);
        assert!(fit_drift_exponent(&root[..2], None).is_err());
        assert!(fit_drift_exponent(&root, Some("other")).is_err());
    }

    #[test]
    fn decoupled_certification_budget() {
        let sys = parse_system(FREE).unwrap();
        let report = run_certification(&sys, &CertifyConfig::new(2, 0.1, 0.01)).unwrap();
        assert_eq!(report.terms[1].value, 0.0);
        assert_eq!(report.terms[2].value, 0.0);
        assert_eq!(report.terms[3].value, 0.0);
        assert!(report.terms[0].value > 0.0 && report.terms[4].value > 0.0);
        assert!(report.holds());
    }

    #[test]
    fn certification_report_is_deterministic() {
        let sys = parse_system(CUBIC).unwrap();
        let cfg = CertifyConfig::new(2, 0.1, 0.01);
        let a = run_certification(&sys, &cfg).unwrap().to_string();
        let b = run_certification(&sys, &cfg).unwrap().to_string();
        assert_eq!(a, b);
        assert!(a.contains("budget predicate"));
    }

    #[test]
    fn majorant_bounds_evaluation() {
        let sys = parse_system(CUBIC).unwrap();
        let report = run_certification(&sys, &CertifyConfig::new(2, 0.1, 0.01)).unwrap();
        let alg = &report.result.algebra;
        let poly = &report.result.transformed;
        let eps: f64 = 0.01;
        let bound = majorant(poly, alg.nu(), eps, 1.0, 1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            // a physical state with h_omega <= 1, concentrated near the boundary
            let share: f64 = rng.random_range(0.0..1.0);
            let energy = [share, 1.0 - share];
            // nu_j |xi_j|^2 = eps e_j
            let xi: Vec<num_complex::Complex64> = (0..2)
                .map(|j| {
                    let r = (eps * energy[j] / alg.nu()[j].to_f64()).sqrt();
                    num_complex::Complex64::from_polar(r, rng.random_range(0.0..6.3))
                })
                .collect();
            let eta: Vec<_> = xi.iter().map(|z| z.conj()).collect();
            let p = alg.phase_point(&xi, &eta, &[rng.random_range(-1.0..1.0)], &[rng.random_range(-1.0..1.0)], eps);
            let v = poly.evaluate(&p).norm();
            assert!(v <= bound, "{v} > {bound}");
            worst = worst.max(v);
        }
        assert!(worst > 0.1 * bound, "bound is loose: {worst} vs {bound}");
    }
}
