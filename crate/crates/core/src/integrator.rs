//! Long-time integration of `h_omega(p, q) + |P|^2 / 2 + V(Q, q)`.
//!
//! The default scheme is a symmetric splitting: half a kick from `V`, the
//! exact harmonic rotation of every `(p_j, q_j)` together with the free
//! drift `Q += P dt`, then another half kick. The fast rotation being exact
//! keeps step sizes of a fraction of the fastest period usable and makes
//! `h_omega` drift only through the coupling.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{h_omega_unchecked, FrequencyVector, FullState, SlowHamiltonian};

/// Runs abort once any coordinate exceeds this magnitude.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

/// Default number of steps per fastest period.
pub const STEPS_PER_PERIOD: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Kick, exact rotation and drift, kick.
    ExactFastStrang,
    /// Plain kick-drift-kick with the harmonic force in the kicks.
    LeapfrogReference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub horizon: f64,
    pub sample_stride: u64,
    pub scheme: Scheme,
    /// Store the full state with every sample.
    pub keep_snapshots: bool,
    /// Warn when the initial `h_omega` exceeds this.
    pub energy_threshold: Option<f64>,
}

impl IntegratorConfig {
    pub fn new(dt: f64, horizon: f64) -> Self {
        Self {
            dt,
            horizon,
            sample_stride: 1,
            scheme: Scheme::ExactFastStrang,
            keep_snapshots: false,
            energy_threshold: None,
        }
    }

    /// `dt = 2 pi epsilon / 40`.
    pub fn default_dt(freq: &FrequencyVector) -> f64 {
        2.0 * PI * freq.epsilon() / STEPS_PER_PERIOD
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return Err(Error::InvalidArgument(format!(
                "horizon {} must be at least dt {}",
                self.horizon, self.dt
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidArgument("sample stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps; the last one lands on or just past the horizon.
    pub fn steps(&self) -> u64 {
        (self.horizon / self.dt - 1e-9).ceil().max(1.0) as u64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub h_fast: f64,
    pub h_total: f64,
    pub state: Option<FullState>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    Completed,
    /// A coordinate became non-finite or exceeded the threshold.
    BlowUp { t: f64, max_abs: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub status: RunStatus,
    pub steps: u64,
    pub initial_fast: f64,
    pub initial_total: f64,
    pub max_drift_fast: f64,
    pub max_drift_total: f64,
    pub final_state: FullState,
    pub warnings: Vec<String>,
}

impl RunSummary {
    pub fn relative_drift_fast(&self) -> f64 {
        self.max_drift_fast / self.initial_fast.abs()
    }

    pub fn relative_drift_total(&self) -> f64 {
        self.max_drift_total / self.initial_total.abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub summary: RunSummary,
}

/// Reusable force buffers.
struct Forces {
    slow: Vec<f64>,
    fast: Vec<f64>,
}

impl Forces {
    fn new(n: usize, d: usize) -> Self {
        Self {
            slow: vec![0.0; d],
            fast: vec![0.0; n],
        }
    }

    fn kick(&mut self, state: &mut FullState, spec: &SlowHamiltonian, h: f64) {
        spec.gradient(&state.slow_q, &state.q, &mut self.slow, &mut self.fast);
        for (p, g) in state.p.iter_mut().zip(&self.fast) {
            *p -= h * g;
        }
        for (p, g) in state.slow_p.iter_mut().zip(&self.slow) {
            *p -= h * g;
        }
    }
}

fn rotate_and_drift(state: &mut FullState, omega: &[f64], dt: f64) {
    for ((p, q), &w) in state.p.iter_mut().zip(state.q.iter_mut()).zip(omega) {
        let (s, c) = (w * dt).sin_cos();
        let (p0, q0) = (*p, *q);
        *p = c * p0 - w * s * q0;
        *q = c * q0 + s * p0 / w;
    }
    for (q, p) in state.slow_q.iter_mut().zip(&state.slow_p) {
        *q += dt * p;
    }
}

fn leapfrog_kick(state: &mut FullState, omega: &[f64], forces: &mut Forces, spec: &SlowHamiltonian, h: f64) {
    forces.kick(state, spec, h);
    for ((p, q), &w) in state.p.iter_mut().zip(&state.q).zip(omega) {
        *p -= h * w * w * q;
    }
}

fn advance(state: &mut FullState, omega: &[f64], spec: &SlowHamiltonian, dt: f64, scheme: Scheme, forces: &mut Forces) {
    match scheme {
        Scheme::ExactFastStrang => {
            forces.kick(state, spec, 0.5 * dt);
            rotate_and_drift(state, omega, dt);
            forces.kick(state, spec, 0.5 * dt);
        }
        Scheme::LeapfrogReference => {
            leapfrog_kick(state, omega, forces, spec, 0.5 * dt);
            for (q, p) in state.q.iter_mut().zip(&state.p) {
                *q += dt * p;
            }
            for (q, p) in state.slow_q.iter_mut().zip(&state.slow_p) {
                *q += dt * p;
            }
            leapfrog_kick(state, omega, forces, spec, 0.5 * dt);
        }
    }
    state.t += dt;
}

fn check_state(state: &FullState, freq: &FrequencyVector, spec: &SlowHamiltonian) -> Result<()> {
    let dims = [
        (freq.n(), spec.n()),
        (freq.n(), state.p.len()),
        (freq.n(), state.q.len()),
        (spec.d(), state.slow_p.len()),
        (spec.d(), state.slow_q.len()),
    ];
    for (expected, got) in dims {
        if expected != got {
            return Err(Error::DimensionMismatch { expected, got });
        }
    }
    Ok(())
}

/// One step of `scheme`; `dt` may be negative.
pub fn step(state: &FullState, freq: &FrequencyVector, spec: &SlowHamiltonian, dt: f64, scheme: Scheme) -> Result<FullState> {
    check_state(state, freq, spec)?;
    let mut out = state.clone();
    let mut forces = Forces::new(freq.n(), spec.d());
    advance(&mut out, freq.omega(), spec, dt, scheme, &mut forces);
    Ok(out)
}

/// `steps` steps of size `dt`.
pub fn step_many(
    state: &FullState,
    freq: &FrequencyVector,
    spec: &SlowHamiltonian,
    dt: f64,
    steps: u64,
    scheme: Scheme,
) -> Result<FullState> {
    check_state(state, freq, spec)?;
    let mut out = state.clone();
    let mut forces = Forces::new(freq.n(), spec.d());
    for _ in 0..steps {
        advance(&mut out, freq.omega(), spec, dt, scheme, &mut forces);
    }
    Ok(out)
}

fn energies(state: &FullState, omega: &[f64], spec: &SlowHamiltonian) -> (f64, f64) {
    let fast = h_omega_unchecked(&state.p, &state.q, omega);
    (fast, fast + spec.energy(&state.slow_p, &state.slow_q, &state.q))
}

/// Integrates to the horizon, handing every sample to `sink` in time order.
pub fn integrate_streaming(
    state0: &FullState,
    freq: &FrequencyVector,
    spec: &SlowHamiltonian,
    cfg: &IntegratorConfig,
    mut sink: impl FnMut(TrajectorySample),
) -> Result<RunSummary> {
    cfg.validate()?;
    check_state(state0, freq, spec)?;
    let omega = freq.omega();
    let mut warnings = Vec::new();
    let (e0, h0) = energies(state0, omega, spec);
    if let Some(limit) = cfg.energy_threshold {
        if e0 >= limit {
            warnings.push(format!("initial h_omega = {e0} is not below the threshold {limit}"));
        }
    }
    let sample = |state: &FullState, fast: f64, total: f64| TrajectorySample {
        t: state.t,
        h_fast: fast,
        h_total: total,
        state: cfg.keep_snapshots.then(|| state.clone()),
    };
    sink(sample(state0, e0, h0));

    let mut state = state0.clone();
    let mut forces = Forces::new(freq.n(), spec.d());
    let steps = cfg.steps();
    let (mut drift_fast, mut drift_total) = (0.0f64, 0.0f64);
    let mut status = RunStatus::Completed;
    let mut done = 0;
    for k in 1..=steps {
        advance(&mut state, omega, spec, cfg.dt, cfg.scheme, &mut forces);
        state.t = state0.t + k as f64 * cfg.dt;
        done = k;
        let max_abs = state.max_abs();
        if !state.is_finite() || max_abs > BLOWUP_THRESHOLD {
            status = RunStatus::BlowUp { t: state.t, max_abs };
            break;
        }
        let (e, h) = energies(&state, omega, spec);
        drift_fast = drift_fast.max((e - e0).abs());
        drift_total = drift_total.max((h - h0).abs());
        if k % cfg.sample_stride == 0 || k == steps {
            sink(sample(&state, e, h));
        }
    }
    Ok(RunSummary {
        status,
        steps: done,
        initial_fast: e0,
        initial_total: h0,
        max_drift_fast: drift_fast,
        max_drift_total: drift_total,
        final_state: state,
        warnings,
    })
}

pub fn integrate(
    state0: &FullState,
    freq: &FrequencyVector,
    spec: &SlowHamiltonian,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut samples = Vec::new();
    let summary = integrate_streaming(state0, freq, spec, cfg, |s| samples.push(s))?;
    Ok(Trajectory { samples, summary })
}

/// Largest `|h_fast(t) - h_fast(0)|` in a series, absolute and relative to
/// `h_fast(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drift {
    pub absolute: f64,
    pub relative: f64,
}

pub fn max_drift(samples: &[TrajectorySample]) -> Result<Drift> {
    let first = samples.first().ok_or(Error::EmptySeries)?;
    let absolute = samples
        .iter()
        .map(|s| (s.h_fast - first.h_fast).abs())
        .fold(0.0, f64::max);
    Ok(Drift {
        absolute,
        relative: absolute / first.h_fast.abs(),
    })
}

/// CSV with columns `t,h_fast,h_total,drift_fast,drift_total`, 17
/// significant digits.
pub fn write_csv<W: Write>(samples: &[TrajectorySample], mut out: W) -> Result<()> {
    writeln!(out, "t,h_fast,h_total,drift_fast,drift_total")?;
    let Some(first) = samples.first() else {
        return Ok(());
    };
    for s in samples {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t,
            s.h_fast,
            s.h_total,
            s.h_fast - first.h_fast,
            s.h_total - first.h_total
        )?;
    }
    Ok(())
}

/// Classical fourth-order Runge-Kutta on the full vector field, used as an
/// accuracy reference.
pub fn reference_rk4(
    state: &FullState,
    freq: &FrequencyVector,
    spec: &SlowHamiltonian,
    dt: f64,
    steps: u64,
) -> Result<FullState> {
    check_state(state, freq, spec)?;
    let (n, d) = (freq.n(), spec.d());
    let omega = freq.omega().to_vec();
    let pack = |s: &FullState| -> Vec<f64> { s.p.iter().chain(&s.q).chain(&s.slow_p).chain(&s.slow_q).copied().collect() };
    let mut gs = vec![0.0; d];
    let mut gf = vec![0.0; n];
    let mut field = |y: &[f64]| -> Vec<f64> {
        let (p, rest) = y.split_at(n);
        let (q, rest) = rest.split_at(n);
        let (sp, sq) = rest.split_at(d);
        spec.gradient(sq, q, &mut gs, &mut gf);
        let mut f = Vec::with_capacity(y.len());
        f.extend((0..n).map(|j| -omega[j] * omega[j] * q[j] - gf[j]));
        f.extend_from_slice(p);
        f.extend(gs.iter().map(|g| -g));
        f.extend_from_slice(sp);
        f
    };
    let mut y = pack(state);
    let axpy = |y: &[f64], k: &[f64], h: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    for _ in 0..steps {
        let k1 = field(&y);
        let k2 = field(&axpy(&y, &k1, dt / 2.0));
        let k3 = field(&axpy(&y, &k2, dt / 2.0));
        let k4 = field(&axpy(&y, &k3, dt));
        for i in 0..y.len() {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(FullState {
        p: y[..n].to_vec(),
        q: y[n..2 * n].to_vec(),
        slow_p: y[2 * n..2 * n + d].to_vec(),
        slow_q: y[2 * n + d..].to_vec(),
        t: state.t + dt * steps as f64,
    })
}
