//! Falsifiable checks over recorded trajectories.
//!
//! Each check returns a [`CheckReport`] whose `margin` is the signed distance
//! to the bound being checked, normalized as documented per check, so that
//! `margin ≥ 0` exactly when the check passes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Grid;
use crate::integrate::TimeSeries;
use crate::model::{absorbing_radius_and_time, ModelConfig};
use crate::phase::EnergySample;

/// Relative slack on bounds that hold exactly in exact arithmetic.
pub const BOUND_TOL: f64 = 1e-6;
/// Relative tolerance for leaving the absorbing ball after entry.
pub const EXIT_TOL: f64 = 1e-8;
/// Slack factor on the absorbing time.
pub const ENTRY_SLACK: f64 = 2.0;
/// Smallest acceptable observed convergence order.
pub const MIN_ORDER: f64 = 1.9;
/// Threshold below which a tail counts as exactly zero.
pub const QUIET_TOL: f64 = 1e-12;

const MAX_OFFENDERS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The data do not satisfy the check's hypothesis.
    NotApplicable,
    /// The check was called on a run it does not apply to.
    Invalid,
}

/// A sample where the bound was tightest or violated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub t: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    pub passed: bool,
    /// Absent for `Invalid` and `NotApplicable`.
    pub margin: Option<f64>,
    /// Worst samples, most negative margin first.
    pub details: Vec<Offender>,
    /// Measured quantities worth reporting alongside the verdict.
    pub measured: BTreeMap<String, f64>,
    pub config: BTreeMap<String, String>,
    pub message: String,
}

impl CheckReport {
    /// Report whose verdict follows the sign of `margin`.
    pub fn from_margin(name: &str, margin: f64) -> Self {
        let passed = margin >= 0.0;
        CheckReport {
            name: name.to_string(),
            verdict: if passed { Verdict::Pass } else { Verdict::Fail },
            passed,
            margin: Some(margin),
            details: Vec::new(),
            measured: BTreeMap::new(),
            config: BTreeMap::new(),
            message: String::new(),
        }
    }

    pub fn invalid(name: &str, message: impl Into<String>) -> Self {
        CheckReport::without_margin(name, Verdict::Invalid, message)
    }

    pub fn not_applicable(name: &str, message: impl Into<String>) -> Self {
        CheckReport::without_margin(name, Verdict::NotApplicable, message)
    }

    fn without_margin(name: &str, verdict: Verdict, message: impl Into<String>) -> Self {
        CheckReport {
            name: name.to_string(),
            verdict,
            passed: false,
            margin: None,
            details: Vec::new(),
            measured: BTreeMap::new(),
            config: BTreeMap::new(),
            message: message.into(),
        }
    }

    pub fn measure(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.to_string(), value);
        self
    }

    pub fn with_config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = message.into();
        self
    }

    pub fn with_offenders(mut self, margins: impl IntoIterator<Item = (f64, f64)>) -> Self {
        self.details = worst(margins);
        self
    }

    /// One JSON object on a single line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

fn worst(margins: impl IntoIterator<Item = (f64, f64)>) -> Vec<Offender> {
    let mut all: Vec<Offender> = margins.into_iter().map(|(t, margin)| Offender { t, margin }).collect();
    all.sort_by(|a, b| a.margin.total_cmp(&b.margin).then(a.t.total_cmp(&b.t)));
    all.truncate(MAX_OFFENDERS);
    all
}

fn min_margin(margins: &[(f64, f64)]) -> f64 {
    margins.iter().map(|m| m.1).fold(f64::INFINITY, f64::min)
}

/// `E(t) ≤ E(0)e^{−2δt}(1 + 10⁻⁶)` at every sample; margins relative to `E(0)`.
pub fn decay_check(series: &TimeSeries, model: &ModelConfig) -> CheckReport {
    const NAME: &str = "decay";
    if !model.is_homogeneous() {
        return CheckReport::invalid(NAME, "decay bound needs f = 0 and g = 0");
    }
    let Some(first) = series.samples.first() else {
        return CheckReport::invalid(NAME, "empty time series");
    };
    let delta = model.audit_constants().delta;
    let e0 = first.energy;
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    let margins: Vec<(f64, f64)> = series
        .samples
        .iter()
        .map(|s| {
            let bound = e0 * (-2.0 * delta * (s.t - first.t)).exp() * (1.0 + BOUND_TOL);
            (s.t, (bound - s.energy) / scale)
        })
        .collect();
    let margin = if e0 == 0.0 && margins.iter().all(|m| m.1 == 0.0) {
        0.0
    } else {
        min_margin(&margins)
    };
    CheckReport::from_margin(NAME, margin)
        .with_offenders(margins)
        .measure("E0", e0)
        .measure("delta", delta)
        .with_config("model", model.digest())
}

/// Per-step residuals of `dE/dt + 2δE = rate` with endpoint averages:
/// `r_n = (E_{n+1} − E_n)/dt + δ(E_n + E_{n+1}) − (rate_n + rate_{n+1})/2`.
pub fn energy_residuals(series: &TimeSeries, delta: f64) -> Vec<(f64, f64)> {
    series
        .samples
        .windows(2)
        .map(|p| {
            let dt = p[1].t - p[0].t;
            let r = (p[1].energy - p[0].energy) / dt + delta * (p[0].energy + p[1].energy)
                - 0.5 * (p[0].rate() + p[1].rate());
            (p[0].t, r)
        })
        .collect()
}

/// Largest deviation between `E(t)` and the integrated identity
/// `e^{−2δt}E(0) + ∫₀ᵗ e^{−2δ(t−r)} rate(r) dr`, trapezoidal in `r`.
pub fn integrated_energy_defect(series: &TimeSeries, delta: f64) -> f64 {
    let s = &series.samples;
    if s.is_empty() {
        return 0.0;
    }
    let mut predicted = s[0].energy;
    let mut worst: f64 = 0.0;
    for p in s.windows(2) {
        let dt = p[1].t - p[0].t;
        let decay = (-2.0 * delta * dt).exp();
        predicted = decay * predicted + 0.5 * dt * (decay * p[0].rate() + p[1].rate());
        worst = worst.max((p[1].energy - predicted).abs());
    }
    worst
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect()
}

/// Convergence of the energy identity over a sequence of runs whose step is
/// halved each time. Every series must be sampled at every step.
///
/// Passes when the observed orders of both the per-step residual and the
/// integrated defect are at least [`MIN_ORDER`]. Margin: smallest order minus
/// the threshold.
pub fn energy_identity_check(runs: &[TimeSeries], model: &ModelConfig) -> CheckReport {
    const NAME: &str = "energy_identity";
    if runs.len() < 2 {
        return CheckReport::invalid(NAME, "need at least two step sizes");
    }
    let delta = model.audit_constants().delta;
    let mut residuals = Vec::new();
    let mut defects = Vec::new();
    for r in runs {
        if r.samples.len() < 2 {
            return CheckReport::invalid(NAME, "series too short");
        }
        let res = energy_residuals(r, delta);
        residuals.push(res.iter().map(|x| x.1.abs()).fold(0.0, f64::max));
        defects.push(integrated_energy_defect(r, delta));
    }
    let scale = runs[0].samples[0].energy.max(f64::MIN_POSITIVE);
    // Residuals already at round-off cannot show an order; treat as converged.
    let floor = 1e-12 * scale;
    let order_of = |e: &[f64]| -> Vec<f64> {
        if e.iter().all(|x| *x <= floor) {
            vec![f64::INFINITY; e.len() - 1]
        } else {
            orders(e)
        }
    };
    let res_orders = order_of(&residuals);
    let def_orders = order_of(&defects);
    let worst = res_orders
        .iter()
        .chain(&def_orders)
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mut report = CheckReport::from_margin(NAME, worst - MIN_ORDER)
        .with_config("model", model.digest())
        .with_config("runs", runs.len());
    for (i, (r, d)) in residuals.iter().zip(&defects).enumerate() {
        report = report
            .measure(&format!("residual_{i}"), *r)
            .measure(&format!("integrated_defect_{i}"), *d);
    }
    for (i, (a, b)) in res_orders.iter().zip(&def_orders).enumerate() {
        report = report
            .measure(&format!("residual_order_{i}"), *a)
            .measure(&format!("integrated_order_{i}"), *b);
    }
    if let Some(dt) = runs[0].interval() {
        report = report.with_config("dt0", dt);
    }
    report.with_offenders(
        energy_residuals(runs.last().unwrap(), delta)
            .into_iter()
            .map(|(t, r)| (t, -r.abs())),
    )
}

/// Entry into `{‖w‖²_X ≤ M}` with `M = 2‖g‖²/(μα)` for every trajectory, no
/// exit beyond `M(1 + 10⁻⁸)`, entry by `2T₁`.
///
/// Margin: the smaller of the relative entry-time slack `(2T₁ − t)/(2T₁)` and
/// the relative exit slack, minimized over trajectories.
pub fn absorbing_check(series: &[TimeSeries], model: &ModelConfig, radius: f64) -> CheckReport {
    absorbing_check_scaled(series, model, radius, 1.0)
}

/// [`absorbing_check`] against the ball of squared radius `scale · M`.
pub fn absorbing_check_scaled(series: &[TimeSeries], model: &ModelConfig, radius: f64, scale: f64) -> CheckReport {
    const NAME: &str = "absorbing";
    let est = match absorbing_radius_and_time(model, radius) {
        Ok(e) => e,
        Err(e) => return CheckReport::invalid(NAME, e.to_string()),
    };
    if series.is_empty() {
        return CheckReport::invalid(NAME, "no trajectories");
    }
    let m = est.radius_sq * scale;
    let deadline = ENTRY_SLACK * est.entry_time;
    let mut margin = f64::INFINITY;
    let mut offenders = Vec::new();
    let mut latest_entry: f64 = 0.0;
    let mut messages = Vec::new();
    for (i, s) in series.iter().enumerate() {
        let Some(first) = s.samples.first() else {
            return CheckReport::invalid(NAME, format!("trajectory {i} is empty"));
        };
        if first.x2 > radius * radius * (1.0 + 1e-12) {
            return CheckReport::invalid(NAME, format!("trajectory {i} starts outside the radius-{radius} ball"));
        }
        let t0 = first.t;
        match s.samples.iter().position(|x| x.x2 <= m) {
            None => {
                let peak = s.samples.iter().map(|x| x.x2).fold(0.0, f64::max);
                margin = margin.min(-1.0);
                offenders.push((t0, -1.0));
                messages.push(format!(
                    "trajectory {i} never entered; max ‖w‖²_X = {peak:e}, M = {m:e}"
                ));
            }
            Some(k) => {
                let entry = s.samples[k].t - t0;
                latest_entry = latest_entry.max(entry);
                let time_slack = if deadline > 0.0 {
                    (deadline - entry) / deadline
                } else if entry == 0.0 {
                    0.0
                } else {
                    -1.0
                };
                let after = s.samples[k..].iter().map(|x| x.x2).fold(0.0, f64::max);
                let exit_slack = (m * (1.0 + EXIT_TOL) - after) / m;
                let local = time_slack.min(exit_slack);
                offenders.push((s.samples[k].t, local));
                margin = margin.min(local);
            }
        }
    }
    let mut report = CheckReport::from_margin(NAME, margin)
        .with_offenders(offenders)
        .measure("M", m)
        .measure("T1", est.entry_time)
        .measure("T1_mu_lambda", est.entry_time_mu_lambda)
        .measure("latest_entry", latest_entry)
        .with_config("model", model.digest())
        .with_config("R", radius)
        .with_config("trajectories", series.len());
    if scale != 1.0 {
        report = report.with_config("ball_scale", scale);
    }
    report.with_message(messages.join("; "))
}

/// Per-radius summary of a tail ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub k: f64,
    /// Earliest sample time after which the tail stays `≤ ε`; `None` if never.
    pub settle_time: Option<f64>,
    /// Last time before which the tail is below [`QUIET_TOL`] throughout.
    pub quiet_until: f64,
    pub peak: f64,
}

fn suffix_sup(series: &TimeSeries, j: usize) -> Vec<f64> {
    let mut out = vec![0.0; series.samples.len()];
    let mut running: f64 = 0.0;
    for (i, s) in series.samples.iter().enumerate().rev() {
        running = running.max(s.tails[j]);
        out[i] = running;
    }
    out
}

pub fn tail_summaries(series: &TimeSeries, eps: f64) -> Vec<TailSummary> {
    let samples = &series.samples;
    let end = samples.last().map_or(0.0, |s| s.t);
    series
        .tail_radii
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let sup = suffix_sup(series, j);
            let settle_time = sup.iter().position(|&x| x <= eps).map(|i| samples[i].t);
            let quiet_until = samples.iter().find(|s| s.tails[j] > QUIET_TOL).map_or(end, |s| s.t);
            let peak = sup.first().copied().unwrap_or(0.0);
            TailSummary {
                k,
                settle_time,
                quiet_until,
                peak,
            }
        })
        .collect()
}

/// Tail smallness over a ladder of radii.
///
/// Reports per radius the earliest `T` with `sup_{t≥T} tail ≤ ε`, passes when
/// some radius achieves `ε` within the run and the suffix suprema are
/// nonincreasing in `k` at every time. Margin: `(ε − smallest final tail)/ε`, or −1 if
/// the ladder is not monotone.
pub fn tail_check(series: &TimeSeries, grid: &Grid, eps: f64) -> CheckReport {
    const NAME: &str = "tail";
    if series.tail_radii.is_empty() {
        return CheckReport::invalid(NAME, "no tail radii recorded");
    }
    if !(eps > 0.0) {
        return CheckReport::invalid(NAME, format!("ε must be positive, got {eps}"));
    }
    let reach = grid.max_node_radius();
    if let Some(k) = series.tail_radii.iter().find(|&&k| k >= reach) {
        return CheckReport::invalid(
            NAME,
            format!("radius {k} reaches past the box (max node radius {reach})"),
        );
    }
    if series.samples.is_empty() {
        return CheckReport::invalid(NAME, "empty time series");
    }
    let mut order: Vec<usize> = (0..series.tail_radii.len()).collect();
    order.sort_by(|&a, &b| series.tail_radii[a].total_cmp(&series.tail_radii[b]));
    let sups: Vec<Vec<f64>> = order.iter().map(|&j| suffix_sup(series, j)).collect();
    let mut monotone = true;
    let mut offenders = Vec::new();
    for pair in sups.windows(2) {
        for (i, (a, b)) in pair[0].iter().zip(&pair[1]).enumerate() {
            if b > a {
                monotone = false;
                offenders.push((series.samples[i].t, a - b));
            }
        }
    }
    let summaries = tail_summaries(series, eps);
    // some radius settles within the run iff its final tail is at most ε
    let best_final = sups.iter().map(|s| *s.last().unwrap()).fold(f64::INFINITY, f64::min);
    let margin = if monotone { (eps - best_final) / eps } else { -1.0 };
    let mut report = CheckReport::from_margin(NAME, margin)
        .with_offenders(offenders)
        .measure("eps", eps)
        .with_config("radii", format!("{:?}", series.tail_radii));
    for s in &summaries {
        report = report
            .measure(&format!("quiet_until_k{}", s.k), s.quiet_until)
            .measure(&format!("peak_k{}", s.k), s.peak);
        if let Some(t) = s.settle_time {
            report = report.measure(&format!("settle_time_k{}", s.k), t);
        }
    }
    if let Some((k, t)) = summaries
        .iter()
        .filter_map(|s| s.settle_time.map(|t| (s.k, t)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)))
    {
        report = report.measure("T_eps", t).measure("K_eps", k);
    }
    report
}

/// Tail at radius `k` stays below [`QUIET_TOL`] for all sample times `< until`.
/// Margin: `(first noisy time − until)/until`, or 0 when none is noisy.
pub fn quiet_window_check(series: &TimeSeries, k: f64, until: f64) -> CheckReport {
    const NAME: &str = "finite_speed";
    let Some(j) = series.tail_radii.iter().position(|&r| r == k) else {
        return CheckReport::invalid(NAME, format!("radius {k} not recorded"));
    };
    let first_noisy = series
        .samples
        .iter()
        .find(|s| s.t < until && s.tails[j] > QUIET_TOL)
        .map(|s| (s.t, s.tails[j]));
    let margin = match first_noisy {
        None => 0.0,
        Some((t, _)) => (t - until) / until.max(f64::MIN_POSITIVE),
    };
    let mut report = CheckReport::from_margin(NAME, margin)
        .measure("k", k)
        .measure("until", until)
        .measure(
            "max_before",
            series
                .samples
                .iter()
                .filter(|s| s.t < until)
                .map(|s| s.tails[j])
                .fold(0.0, f64::max),
        );
    if let Some((t, v)) = first_noisy {
        report = report.with_offenders([(t, -v)]);
    }
    report
}

/// `y = ‖w‖²_X + 2∫F(u)` from a sample; requires the recorded potential.
fn lyapunov(s: &EnergySample) -> Option<f64> {
    s.extras.map(|e| s.x2 + e.potential)
}

/// The differential inequality `y' ≤ −μy + ‖g‖²/α` in difference form,
/// `(y_{n+1} − y_n)/dt + μ(y_n + y_{n+1})/2 − ‖g‖²/α ≤ dt²·scale_n`, and its
/// integrated form `y(t) ≤ e^{−μt}y(0) + (1 − e^{−μt})‖g‖²/(μα)` with relative
/// slack 10⁻⁶. Margins relative to `max(y(0), ‖g‖²/(μα))`.
pub fn dissipative_inequality_check(series: &TimeSeries, model: &ModelConfig) -> CheckReport {
    const NAME: &str = "dissipative_inequality";
    let ys: Option<Vec<f64>> = series.samples.iter().map(lyapunov).collect();
    let Some(ys) = ys else {
        return CheckReport::invalid(NAME, "samples lack the recorded potential");
    };
    if ys.is_empty() {
        return CheckReport::invalid(NAME, "empty time series");
    }
    let c = model.audit_constants();
    let source = model.forcing_norm_sq() / c.alpha;
    let plateau = source / c.mu;
    let y0 = ys[0];
    let scale = y0.max(plateau).max(f64::MIN_POSITIVE);
    let t0 = series.samples[0].t;
    let mut margins = Vec::with_capacity(2 * ys.len());
    for (n, p) in series.samples.windows(2).enumerate() {
        let dt = p[1].t - p[0].t;
        let (a, b) = (ys[n], ys[n + 1]);
        let defect = (b - a) / dt + 0.5 * c.mu * (a + b) - source;
        let tol = dt * dt * (0.5 * (a + b) + source);
        margins.push((p[0].t, (tol - defect) / scale));
    }
    let zero_data = y0 == 0.0 && source == 0.0;
    for (s, &y) in series.samples.iter().zip(&ys) {
        let e = (-c.mu * (s.t - t0)).exp();
        let bound = (e * y0 + (1.0 - e) * plateau) * (1.0 + BOUND_TOL);
        let m = if zero_data && y == 0.0 {
            0.0
        } else {
            (bound - y) / scale
        };
        margins.push((s.t, m));
    }
    let margin = if zero_data && margins.iter().all(|m| m.1 >= 0.0) {
        0.0
    } else {
        min_margin(&margins)
    };
    CheckReport::from_margin(NAME, margin)
        .with_offenders(margins)
        .measure("mu", c.mu)
        .measure("alpha", c.alpha)
        .measure("y0", y0)
        .with_config("model", model.digest())
}

/// Right side of the integral Gronwall bound on a uniform grid:
/// `y₀ exp(∫₀ᵗ g) + ∫₀ᵗ exp(∫ₛᵗ g) h(s) ds`, trapezoidal in both integrals.
pub fn gronwall_bound(dt: f64, y0: f64, g: &[f64], h: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.len());
    if g.is_empty() {
        return out;
    }
    let mut homogeneous = y0;
    let mut forced = 0.0;
    out.push(y0);
    for n in 0..g.len() - 1 {
        let growth = (0.5 * dt * (g[n] + g[n + 1])).exp();
        homogeneous *= growth;
        forced = growth * forced + 0.5 * dt * (growth * h[n] + h[n + 1]);
        out.push(homogeneous + forced);
    }
    out
}

/// Integral Gronwall conformance for sampled `y`, `g`, `h` with spacing `dt`.
///
/// First checks the hypothesis `y' ≤ gy + h` in trapezoidal difference form
/// with an `O(dt²)` allowance; if it fails the report is `NotApplicable`.
/// Otherwise asserts `y ≤ RHS(1 + 10⁻⁶) + O(dt²)` at every sample. Margins
/// relative to `max(max|y|, max RHS)`. `tightness` records the largest
/// `|y − RHS|` relative to the same scale.
pub fn gronwall_verify(dt: f64, y: &[f64], g: &[f64], h: &[f64]) -> CheckReport {
    const NAME: &str = "gronwall";
    if y.len() != g.len() || y.len() != h.len() {
        return CheckReport::invalid(NAME, "series lengths differ");
    }
    if !(dt > 0.0) {
        return CheckReport::invalid(NAME, format!("sample spacing must be positive, got {dt}"));
    }
    if y.is_empty() {
        return CheckReport::invalid(NAME, "empty series");
    }
    if y.iter().chain(g).chain(h).any(|x| !x.is_finite()) {
        return CheckReport::invalid(NAME, "non-finite sample");
    }
    let gmax = g.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let hmax = h.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let ymax = y.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let allowance = dt * dt * (1.0 + gmax).powi(2) * (ymax + hmax);
    for n in 0..y.len() - 1 {
        let lhs = (y[n + 1] - y[n]) / dt;
        let rhs = 0.5 * (g[n] * y[n] + h[n] + g[n + 1] * y[n + 1] + h[n + 1]);
        if lhs > rhs + allowance {
            return CheckReport::not_applicable(NAME, format!("hypothesis y' ≤ gy + h fails at t = {}", n as f64 * dt))
                .measure("hypothesis_defect", lhs - rhs);
        }
    }
    let bound = gronwall_bound(dt, y[0], g, h);
    let scale = bound
        .iter()
        .map(|x| x.abs())
        .fold(ymax, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut margins = Vec::with_capacity(y.len());
    let mut tightness: f64 = 0.0;
    for (n, (yn, bn)) in y.iter().zip(&bound).enumerate() {
        let t = n as f64 * dt;
        let slack = bn.abs() * BOUND_TOL + allowance * (1.0 + t);
        let m = if *yn == 0.0 && *bn == 0.0 {
            0.0
        } else {
            (bn + slack - yn) / scale
        };
        margins.push((t, m));
        tightness = tightness.max((yn - bn).abs() / scale);
    }
    CheckReport::from_margin(NAME, min_margin(&margins))
        .with_offenders(margins)
        .measure("tightness", tightness)
        .measure("dt", dt)
}

/// Largest `E_{n+1} − E_n` over the series, relative to `E(0)`; nonpositive
/// means the energy never increased.
pub fn max_energy_increase(series: &TimeSeries) -> Result<f64> {
    let s = &series.samples;
    let Some(first) = s.first() else {
        return Err(invalid("series", "empty time series"));
    };
    let scale = first.energy.max(f64::MIN_POSITIVE);
    Ok(s.windows(2)
        .map(|p| (p[1].energy - p[0].energy) / scale)
        .fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(dt: f64, n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|i| f(i as f64 * dt)).collect()
    }

    #[test]
    fn gronwall_saturating_case_is_tight() {
        let dt = 0.01;
        let n = 1001;
        let y = uniform(dt, n, |t| (-t).exp());
        let r = gronwall_verify(dt, &y, &vec![-1.0; n], &vec![0.0; n]);
        assert!(r.passed, "{r:?}");
        assert!(r.measured["tightness"] < 1e-12);
    }

    #[test]
    fn gronwall_forced_case_is_tight() {
        let dt = 0.01;
        let n = 1001;
        let y = uniform(dt, n, |t| 3.0 * (-t).exp() + 1.0 - (-t).exp());
        let r = gronwall_verify(dt, &y, &vec![-1.0; n], &vec![1.0; n]);
        assert!(r.passed, "{r:?}");
        assert!(r.measured["tightness"] < 1e-5);
    }

    #[test]
    fn gronwall_zero_series() {
        let n = 50;
        let r = gronwall_verify(0.1, &vec![0.0; n], &vec![0.0; n], &vec![0.0; n]);
        assert!(r.passed);
        assert_eq!(r.margin, Some(0.0));
    }

    #[test]
    fn gronwall_flags_violated_hypothesis() {
        let dt = 0.01;
        let n = 200;
        let y = uniform(dt, n, |t| (-t).exp());
        let r = gronwall_verify(dt, &y, &vec![-2.0; n], &vec![0.0; n]);
        assert_eq!(r.verdict, Verdict::NotApplicable);
        assert!(!r.passed);
    }

    #[test]
    fn bound_recursion_matches_closed_form() {
        let dt = 1e-3;
        let n = 2001;
        let b = gronwall_bound(dt, 2.0, &vec![-0.5; n], &vec![1.0; n]);
        let t = (n - 1) as f64 * dt;
        let exact = 2.0 * (-0.5 * t).exp() + 2.0 * (1.0 - (-0.5 * t).exp());
        assert!((b[n - 1] - exact).abs() < 1e-6);
    }

    #[test]
    fn report_serializes_to_one_line() {
        let r = CheckReport::from_margin("x", 0.5).measure("a", 1.0);
        let line = r.to_json_line();
        assert!(!line.contains('\n'));
        let back: CheckReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn margin_sign_matches_verdict() {
        for m in [-1.0, -1e-300, 0.0, 2.0] {
            let r = CheckReport::from_margin("m", m);
            assert_eq!(r.passed, m >= 0.0);
        }
    }
}
