//! Equation configuration: variant, damping `λ` and everything derived from
//! it, the forcing `g`, and the nonlinearity catalog.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{DomainKind, Grid, ScalarField};
use crate::phase::State;

/// Which of the two damped wave equations is being solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `u_tt + λu_t − Δu + u + f(u) = g` on a truncated whole space.
    MassTermWholeSpace,
    /// `u_tt + λu_t − Δu + f(u) = g` on a strip bounded in one direction.
    NoMassStrip,
}

impl Variant {
    /// Coefficient of the `u` term in the equation (1 or 0).
    pub fn mass(self) -> f64 {
        match self {
            Variant::MassTermWholeSpace => 1.0,
            Variant::NoMassStrip => 0.0,
        }
    }

    pub fn domain_kind(self) -> DomainKind {
        match self {
            Variant::MassTermWholeSpace => DomainKind::TruncatedWholeSpace,
            Variant::NoMassStrip => DomainKind::Strip,
        }
    }

    pub fn from_domain(kind: DomainKind) -> Variant {
        match kind {
            DomainKind::TruncatedWholeSpace => Variant::MassTermWholeSpace,
            DomainKind::Strip => Variant::NoMassStrip,
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Variant::MassTermWholeSpace => 0,
            Variant::NoMassStrip => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Variant> {
        match tag {
            0 => Some(Variant::MassTermWholeSpace),
            1 => Some(Variant::NoMassStrip),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::MassTermWholeSpace => "mass",
            Variant::NoMassStrip => "strip",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mass" | "MassTermWholeSpace" => Ok(Variant::MassTermWholeSpace),
            "strip" | "NoMassStrip" => Ok(Variant::NoMassStrip),
            other => Err(Error::Config(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub lambda: f64,
    /// Shift in `v = δu + u_t`, `λ / (λ² + 4)`.
    pub delta: f64,
    /// Accretivity margin of the linear operator.
    pub sigma: f64,
    /// Young parameter, `alpha_fraction * σ`.
    pub alpha: f64,
    /// Rate in the dissipative differential inequality.
    pub mu: f64,
    pub nu: f64,
    pub alpha_fraction: f64,
}

impl Constants {
    /// `δ² − λδ + 1`, the `‖u‖²` weight of the quasi-energy.
    pub fn energy_weight(&self) -> f64 {
        self.delta * self.delta - self.lambda * self.delta + 1.0
    }
}

pub fn delta_of(lambda: f64) -> f64 {
    lambda / (lambda * lambda + 4.0)
}

pub fn sigma_of(lambda: f64) -> f64 {
    let r = (lambda * lambda + 4.0).sqrt();
    lambda / (r * (lambda + r))
}

pub fn derive_constants(lambda: f64, nu: f64, alpha_fraction: f64) -> Result<Constants> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(invalid("nu", format!("must be positive, got {nu}")));
    }
    if !(alpha_fraction > 0.0 && alpha_fraction < 1.0) {
        return Err(invalid(
            "alpha_fraction",
            format!("must lie in (0, 1), got {alpha_fraction}"),
        ));
    }
    let delta = delta_of(lambda);
    let sigma = sigma_of(lambda);
    Ok(assemble(lambda, delta, sigma, nu, alpha_fraction))
}

fn assemble(lambda: f64, delta: f64, sigma: f64, nu: f64, alpha_fraction: f64) -> Constants {
    let alpha = alpha_fraction * sigma;
    let mu = (2.0 * (sigma - alpha)).min(delta * nu);
    Constants {
        lambda,
        delta,
        sigma,
        alpha,
        mu,
        nu,
        alpha_fraction,
    }
}

/// Multiplicative corruption of the constants the diagnostics see.
///
/// The integrator always uses the true constants. Checks built on the
/// corrupted values must fail; this is how the suites prove they are not
/// vacuous.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corruption {
    pub delta_scale: f64,
    pub sigma_scale: f64,
    pub flux_scale: f64,
}

impl Default for Corruption {
    fn default() -> Self {
        Corruption {
            delta_scale: 1.0,
            sigma_scale: 1.0,
            flux_scale: 1.0,
        }
    }
}

impl Corruption {
    pub fn is_identity(&self) -> bool {
        *self == Corruption::default()
    }
}

/// Piecewise-linear `f` with a shipped primitive `F` at the table nodes.
///
/// Between nodes `F` is continued by the exact integral of the interpolated
/// `f`; outside the table `f(s)/s` is frozen at its end value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityTable {
    s: Vec<f64>,
    f: Vec<f64>,
    big_f: Vec<f64>,
}

impl NonlinearityTable {
    pub fn new(s: Vec<f64>, f: Vec<f64>, big_f: Vec<f64>) -> Result<Self> {
        if s.len() < 2 || s.len() != f.len() || s.len() != big_f.len() {
            return Err(invalid("table", "need at least two nodes with matching f and F"));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("table", "nodes must be strictly increasing"));
        }
        if s.iter().chain(&f).chain(&big_f).any(|v| !v.is_finite()) {
            return Err(invalid("table", "non-finite entry"));
        }
        let zero = s
            .iter()
            .position(|&x| x == 0.0)
            .ok_or_else(|| invalid("table", "s = 0 must be a node"))?;
        if f[zero] != 0.0 || big_f[zero] != 0.0 {
            return Err(invalid("table", "f(0) and F(0) must vanish"));
        }
        if s[0] >= 0.0 || *s.last().unwrap() <= 0.0 {
            return Err(invalid("table", "table must straddle zero"));
        }
        Ok(NonlinearityTable { s, f, big_f })
    }

    fn locate(&self, x: f64) -> usize {
        match self.s.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.min(self.s.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.s.len() - 2),
        }
    }

    fn f(&self, x: f64) -> f64 {
        let last = self.s.len() - 1;
        if x <= self.s[0] {
            return self.f[0] / self.s[0] * x;
        }
        if x >= self.s[last] {
            return self.f[last] / self.s[last] * x;
        }
        let i = self.locate(x);
        let w = (x - self.s[i]) / (self.s[i + 1] - self.s[i]);
        self.f[i] + w * (self.f[i + 1] - self.f[i])
    }

    fn big_f(&self, x: f64) -> f64 {
        let last = self.s.len() - 1;
        if x <= self.s[0] {
            let r = self.f[0] / self.s[0];
            return self.big_f[0] + 0.5 * r * (x * x - self.s[0] * self.s[0]);
        }
        if x >= self.s[last] {
            let r = self.f[last] / self.s[last];
            return self.big_f[last] + 0.5 * r * (x * x - self.s[last] * self.s[last]);
        }
        let i = self.locate(x);
        let dx = x - self.s[i];
        let slope = (self.f[i + 1] - self.f[i]) / (self.s[i + 1] - self.s[i]);
        self.big_f[i] + self.f[i] * dx + 0.5 * slope * dx * dx
    }

    fn ratio_bound(&self) -> f64 {
        self.s
            .iter()
            .zip(&self.f)
            .filter(|(s, _)| **s != 0.0)
            .map(|(s, f)| (f / s).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NonlinearitySpec {
    Zero,
    /// `f(s) = s³ / (1 + s²)`, `F(s) = (s² − ln(1 + s²)) / 2`.
    SaturatingCubic,
    /// `f(s) = s³`. Violates the linear growth condition; kept as the
    /// canonical rejected candidate for the condition verifier.
    Cubic,
    UserTable(NonlinearityTable),
}

impl NonlinearitySpec {
    pub fn f(&self, s: f64) -> f64 {
        match self {
            NonlinearitySpec::Zero => 0.0,
            NonlinearitySpec::SaturatingCubic => s - s / (1.0 + s * s),
            NonlinearitySpec::Cubic => s * s * s,
            NonlinearitySpec::UserTable(t) => t.f(s),
        }
    }

    /// Primitive `F(s) = ∫₀ˢ f`.
    pub fn big_f(&self, s: f64) -> f64 {
        match self {
            NonlinearitySpec::Zero => 0.0,
            NonlinearitySpec::SaturatingCubic => 0.5 * (s * s - (s * s).ln_1p()),
            NonlinearitySpec::Cubic => 0.25 * s.powi(4),
            NonlinearitySpec::UserTable(t) => t.big_f(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NonlinearitySpec::Zero)
    }

    /// Constant `C` with `|f(s)| ≤ C|s|`; infinite when none exists.
    pub fn linear_bound(&self) -> f64 {
        match self {
            NonlinearitySpec::Zero => 0.0,
            NonlinearitySpec::SaturatingCubic => 1.0,
            NonlinearitySpec::Cubic => f64::INFINITY,
            NonlinearitySpec::UserTable(t) => t.ratio_bound(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NonlinearitySpec::Zero => "zero",
            NonlinearitySpec::SaturatingCubic => "saturating_cubic",
            NonlinearitySpec::Cubic => "cubic",
            NonlinearitySpec::UserTable(_) => "user_table",
        }
    }
}

impl std::str::FromStr for NonlinearitySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(NonlinearitySpec::Zero),
            "saturating_cubic" => Ok(NonlinearitySpec::SaturatingCubic),
            "cubic" => Ok(NonlinearitySpec::Cubic),
            other => Err(Error::Config(format!("unknown nonlinearity `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub variant: Variant,
    constants: Constants,
    pub nonlinearity: NonlinearitySpec,
    g: ScalarField,
    forced: bool,
    /// `C` with `|f(s)| ≤ C|s|`.
    pub f_lin_bound: f64,
    corruption: Corruption,
}

impl ModelConfig {
    pub fn new(
        variant: Variant,
        lambda: f64,
        nu: f64,
        alpha_fraction: f64,
        nonlinearity: NonlinearitySpec,
        g: ScalarField,
    ) -> Result<Self> {
        let constants = derive_constants(lambda, nu, alpha_fraction)?;
        let w = constants.energy_weight();
        if !(w > 0.0 && w < 1.0) {
            return Err(invalid("lambda", format!("energy weight δ²−λδ+1 = {w} outside (0, 1)")));
        }
        if !(lambda - 3.0 * constants.delta > 0.0) {
            return Err(invalid("lambda", "λ − 3δ must be positive"));
        }
        if g.grid().kind() != variant.domain_kind() {
            return Err(Error::Config(format!(
                "variant `{}` needs a {:?} grid, got {:?}",
                variant.name(),
                variant.domain_kind(),
                g.grid().kind()
            )));
        }
        let forced = !g.is_zero();
        Ok(ModelConfig {
            variant,
            constants,
            f_lin_bound: nonlinearity.linear_bound(),
            nonlinearity,
            g,
            forced,
            corruption: Corruption::default(),
        })
    }

    /// Unforced model with a zero forcing field on `grid`.
    pub fn unforced(
        variant: Variant,
        grid: &Arc<Grid>,
        lambda: f64,
        nu: f64,
        nonlinearity: NonlinearitySpec,
    ) -> Result<Self> {
        ModelConfig::new(variant, lambda, nu, 0.5, nonlinearity, ScalarField::zeros(grid))
    }

    pub fn with_corruption(mut self, corruption: Corruption) -> Self {
        self.corruption = corruption;
        self
    }

    pub fn corruption(&self) -> Corruption {
        self.corruption
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.g.grid()
    }

    /// The true constants, used by the integrator.
    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    /// Constants as seen by the diagnostics, after any corruption.
    pub fn audit_constants(&self) -> Constants {
        if self.corruption.is_identity() {
            return self.constants;
        }
        let c = &self.constants;
        assemble(
            c.lambda,
            c.delta * self.corruption.delta_scale,
            c.sigma * self.corruption.sigma_scale,
            c.nu,
            c.alpha_fraction,
        )
    }

    /// Coefficient `k` in the `−2k‖v‖²` term of the flux, after corruption.
    pub fn flux_coefficient(&self) -> f64 {
        let c = self.audit_constants();
        let base = match self.variant {
            Variant::MassTermWholeSpace => c.lambda - 2.0 * c.delta,
            Variant::NoMassStrip => c.lambda - 3.0 * c.delta,
        };
        base * self.corruption.flux_scale
    }

    pub fn forcing(&self) -> &ScalarField {
        &self.g
    }

    pub fn is_forced(&self) -> bool {
        self.forced
    }

    pub fn is_homogeneous(&self) -> bool {
        !self.forced && self.nonlinearity.is_zero()
    }

    pub fn forcing_norm_sq(&self) -> f64 {
        self.g.l2_norm_sq()
    }

    pub fn f_apply(&self, s: f64) -> f64 {
        self.nonlinearity.f(s)
    }

    #[allow(non_snake_case)]
    pub fn F_apply(&self, s: f64) -> f64 {
        self.nonlinearity.big_f(s)
    }

    /// `∫ F(u)` by nodal quadrature.
    pub fn potential(&self, u: &ScalarField) -> f64 {
        if self.nonlinearity.is_zero() {
            return 0.0;
        }
        let sum: f64 = u.values().iter().map(|&s| self.nonlinearity.big_f(s)).sum();
        sum * u.grid().cell_volume()
    }

    /// `R(w) = (0, −f(u) + g)`.
    pub fn rhs(&self, w: &State) -> Result<State> {
        w.u.check_same_grid(&self.g)?;
        let second = self.source(w.u.values());
        State::new(
            ScalarField::zeros(w.u.grid()),
            ScalarField::from_raw(w.u.grid(), second),
            w.t,
        )
    }

    /// Nodal `−f(u) + g`.
    pub(crate) fn source(&self, u: &[f64]) -> Vec<f64> {
        let g = self.g.values();
        match &self.nonlinearity {
            NonlinearitySpec::Zero => g.to_vec(),
            nl => u.iter().zip(g).map(|(&s, &gi)| gi - nl.f(s)).collect(),
        }
    }

    /// Stable digest of everything that determines the dynamics.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update([self.variant.tag()]);
        let c = &self.constants;
        for v in [c.lambda, c.nu, c.alpha_fraction] {
            hasher.update(v.to_le_bytes());
        }
        hasher.update(self.nonlinearity.name().as_bytes());
        if let NonlinearitySpec::UserTable(t) = &self.nonlinearity {
            for v in t.s.iter().chain(&t.f).chain(&t.big_f) {
                hasher.update(v.to_le_bytes());
            }
        }
        for (a, b) in self.grid().extents() {
            hasher.update(a.to_le_bytes());
            hasher.update(b.to_le_bytes());
        }
        for n in self.grid().nodes() {
            hasher.update((*n as u64).to_le_bytes());
        }
        for v in self.g.values() {
            hasher.update(v.to_le_bytes());
        }
        let out = hasher.finalize();
        out.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AbsorbingEstimate {
    /// Bound on `‖w‖²_X` after the entry time: `2‖g‖² / (μα)`.
    pub radius_sq: f64,
    /// `T₁ = ln(μα(R² + C R²/ν) / ‖g‖²) / μ`, clamped at 0.
    pub entry_time: f64,
    /// The same expression with `μλ` in place of `μα`, as printed in the source
    /// derivation; reported for comparison only.
    pub entry_time_mu_lambda: f64,
}

pub fn absorbing_radius_and_time(model: &ModelConfig, r: f64) -> Result<AbsorbingEstimate> {
    if !(r >= 0.0) {
        return Err(invalid("R", format!("initial radius must be nonnegative, got {r}")));
    }
    let g2 = model.forcing_norm_sq();
    if g2 == 0.0 {
        return Err(Error::ZeroForcing);
    }
    let c = model.audit_constants();
    let growth = model.f_lin_bound * model.f_lin_bound;
    let initial = r * r + growth * r * r / c.nu;
    let t1 = |factor: f64| ((factor * initial / g2).ln() / c.mu).max(0.0);
    Ok(AbsorbingEstimate {
        radius_sq: 2.0 / (c.mu * c.alpha) * g2,
        entry_time: t1(c.mu * c.alpha),
        entry_time_mu_lambda: t1(c.mu * c.lambda),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub nonlinearity: String,
    pub nu: f64,
    pub range_lo: f64,
    pub range_hi: f64,
    pub samples: usize,
    pub ratio_cap: f64,
    /// `min f(s)s − νF(s)`.
    pub min_sign_margin: f64,
    /// `min F(s)`.
    pub min_primitive: f64,
    /// `max |f(s)/s|` over nonzero samples.
    pub max_ratio: f64,
    /// Largest `|F_closed − ∫₀ˢ f|` relative to `max(1, |F|)`.
    pub max_primitive_defect: f64,
    pub f_zero_ok: bool,
    pub sign_condition_ok: bool,
    pub growth_condition_ok: bool,
    pub primitive_ok: bool,
    pub passed: bool,
}

pub const CONDITION_TOL: f64 = 1e-12;
pub const PRIMITIVE_TOL: f64 = 1e-10;
pub const DEFAULT_RATIO_CAP: f64 = 10.0;

/// Samples both growth conditions on `range` and cross-checks `F` by adaptive
/// quadrature of `f`.
pub fn verify_growth_conditions(
    spec: &NonlinearitySpec,
    nu: f64,
    range: (f64, f64),
    samples: usize,
    ratio_cap: f64,
) -> Result<ConditionReport> {
    if samples < 1000 {
        return Err(invalid("samples", format!("need at least 1000, got {samples}")));
    }
    let (lo, hi) = range;
    if !(hi > lo) {
        return Err(invalid("range", format!("empty interval [{lo}, {hi}]")));
    }
    let mut min_sign = f64::INFINITY;
    let mut min_prim = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut max_defect: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..samples {
        let s = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let f = spec.f(s);
        let big_f = spec.big_f(s);
        min_sign = min_sign.min(f * s - nu * big_f);
        min_prim = min_prim.min(big_f);
        scale = scale.max((f * s).abs()).max(big_f.abs());
        if s != 0.0 {
            max_ratio = max_ratio.max((f / s).abs());
        }
        let quad = adaptive_simpson(&|x| spec.f(x), 0.0, s, 1e-13 * big_f.abs().max(1.0));
        max_defect = max_defect.max((quad - big_f).abs() / big_f.abs().max(1.0));
    }
    let tol = CONDITION_TOL * scale.max(1.0);
    let f_zero_ok = spec.f(0.0) == 0.0;
    let sign_condition_ok = min_sign >= -tol && min_prim >= -tol;
    let growth_condition_ok = max_ratio.is_finite() && max_ratio <= ratio_cap;
    let primitive_ok = max_defect <= PRIMITIVE_TOL;
    Ok(ConditionReport {
        nonlinearity: spec.name().to_string(),
        nu,
        range_lo: lo,
        range_hi: hi,
        samples,
        ratio_cap,
        min_sign_margin: min_sign,
        min_primitive: min_prim,
        max_ratio,
        max_primitive_defect: max_defect,
        f_zero_ok,
        sign_condition_ok,
        growth_condition_ok,
        primitive_ok,
        passed: f_zero_ok && sign_condition_ok && growth_condition_ok && primitive_ok,
    })
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridConfig;
    use approx::assert_relative_eq;

    #[test]
    fn constants_for_unit_damping() {
        let c = derive_constants(1.0, 2.0, 0.5).unwrap();
        assert_eq!(c.delta, 0.2);
        let sigma = 1.0 / (5f64.sqrt() * (1.0 + 5f64.sqrt()));
        assert_relative_eq!(c.sigma, sigma, max_relative = 1e-15);
        assert_relative_eq!(c.sigma, 0.1381966, epsilon = 1e-7);
        assert_relative_eq!(c.mu, c.sigma, max_relative = 1e-15);
        assert_relative_eq!(c.energy_weight(), 0.84, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(derive_constants(0.0, 1.0, 0.5).is_err());
        assert!(derive_constants(1.0, -1.0, 0.5).is_err());
        assert!(derive_constants(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sampled_constant_inequalities() {
        for i in 1..=1000 {
            let lambda = 10.0 * i as f64 / 1000.0;
            let c = derive_constants(lambda, 1.0, 0.5).unwrap();
            assert!(0.0 < c.sigma && c.sigma < c.delta && c.delta < lambda / 2.0);
            assert!(lambda - 3.0 * c.delta > 0.0);
            let w = c.energy_weight();
            assert!(w > 0.0 && w < 1.0);
            let again = derive_constants(lambda, 1.0, 0.5).unwrap();
            assert_eq!(c, again);
        }
    }

    #[test]
    fn saturating_cubic_values() {
        let nl = NonlinearitySpec::SaturatingCubic;
        assert_relative_eq!(nl.f(1.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(nl.big_f(1.0), (1.0 - 2f64.ln()) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(nl.big_f(1.0), 0.153426, epsilon = 1e-6);
        assert_eq!(nl.f(0.0), 0.0);
    }

    #[test]
    fn growth_conditions() {
        let zero = verify_growth_conditions(&NonlinearitySpec::Zero, 2.0, (-10.0, 10.0), 1000, 10.0).unwrap();
        assert!(zero.passed);
        assert_eq!(zero.min_sign_margin, 0.0);
        assert_eq!(zero.max_ratio, 0.0);

        let sat =
            verify_growth_conditions(&NonlinearitySpec::SaturatingCubic, 2.0, (-100.0, 100.0), 4001, 10.0).unwrap();
        assert!(sat.passed, "{sat:?}");
        assert!(sat.max_ratio < 1.0 && sat.max_ratio > 0.9999);

        let cubic = verify_growth_conditions(&NonlinearitySpec::Cubic, 2.0, (-10.0, 10.0), 1000, 10.0).unwrap();
        assert!(!cubic.growth_condition_ok);
        assert!(!cubic.passed);

        assert!(verify_growth_conditions(&NonlinearitySpec::Zero, 2.0, (-1.0, 1.0), 999, 10.0).is_err());
    }

    #[test]
    fn user_table_roundtrips_through_verifier() {
        // f(s) = s on nodes; F = s²/2 is exactly the integral of the interpolant
        let s: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.5).collect();
        let f = s.clone();
        let big_f: Vec<f64> = s.iter().map(|x| 0.5 * x * x).collect();
        let table = NonlinearitySpec::UserTable(NonlinearityTable::new(s, f, big_f).unwrap());
        let rep = verify_growth_conditions(&table, 2.0, (-30.0, 30.0), 2000, 10.0).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_relative_eq!(table.linear_bound(), 1.0);

        // inconsistent primitive is flagged
        let s: Vec<f64> = vec![-1.0, 0.0, 1.0];
        let bad = NonlinearityTable::new(s, vec![-1.0, 0.0, 1.0], vec![0.7, 0.0, 0.7]).unwrap();
        let rep = verify_growth_conditions(&NonlinearitySpec::UserTable(bad), 1.0, (-2.0, 2.0), 1000, 10.0).unwrap();
        assert!(!rep.primitive_ok);
    }

    #[test]
    fn absorbing_estimate_scaling() {
        let grid = Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -10.0, 10.0, 99)).unwrap();
        let g = ScalarField::from_fn(&grid, |x| (-x[0] * x[0]).exp());
        let model = ModelConfig::new(
            Variant::MassTermWholeSpace,
            1.0,
            2.0,
            0.5,
            NonlinearitySpec::SaturatingCubic,
            g.clone(),
        )
        .unwrap();
        let doubled = ModelConfig::new(
            Variant::MassTermWholeSpace,
            1.0,
            2.0,
            0.5,
            NonlinearitySpec::SaturatingCubic,
            g.scaled(2.0),
        )
        .unwrap();
        let a = absorbing_radius_and_time(&model, 10.0).unwrap();
        let b = absorbing_radius_and_time(&doubled, 10.0).unwrap();
        assert_relative_eq!(b.radius_sq / a.radius_sq, 4.0, max_relative = 1e-14);
        let mu = model.constants().mu;
        let r1 = absorbing_radius_and_time(&model, 100.0).unwrap();
        let r2 = absorbing_radius_and_time(&model, 200.0).unwrap();
        assert_relative_eq!(
            r2.entry_time - r1.entry_time,
            2.0 / mu * 2f64.ln(),
            max_relative = 1e-12
        );

        let unforced =
            ModelConfig::unforced(Variant::MassTermWholeSpace, &grid, 1.0, 2.0, NonlinearitySpec::Zero).unwrap();
        assert!(matches!(
            absorbing_radius_and_time(&unforced, 1.0),
            Err(Error::ZeroForcing)
        ));
    }

    #[test]
    fn variant_grid_conflict() {
        let grid = Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -1.0, 1.0, 9)).unwrap();
        assert!(ModelConfig::unforced(Variant::NoMassStrip, &grid, 1.0, 1.0, NonlinearitySpec::Zero).is_err());
    }
}
