//! Spatial discretization on Dirichlet boxes.
//!
//! A [`Grid`] covers either a truncated copy of the whole space or a strip that
//! is bounded along axis 0. Fields live on interior nodes only; every stencil
//! treats the values outside the box as zero. The discrete gradient is taken
//! edge-wise (forward differences, boundary edges included), which makes
//!
//! ```text
//! grad_inner(f, g) == l2_inner(-laplacian(f), g)
//! ```
//!
//! hold exactly up to round-off. All energy and accretivity identities in the
//! crate rest on that summation-by-parts property.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::solve::ShiftedLaplacian;

/// Shape of the physical domain being discretized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    /// The whole space, truncated to a box.
    TruncatedWholeSpace,
    /// A domain bounded only along axis 0; other axes are truncations.
    Strip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub kind: DomainKind,
    /// Per-axis interval `[a, b]`.
    pub extents: Vec<(f64, f64)>,
    /// Per-axis interior node count.
    pub nodes: Vec<usize>,
}

impl GridConfig {
    pub fn line(kind: DomainKind, a: f64, b: f64, n: usize) -> Self {
        GridConfig {
            kind,
            extents: vec![(a, b)],
            nodes: vec![n],
        }
    }

    pub fn plane(kind: DomainKind, x: (f64, f64), y: (f64, f64), n: (usize, usize)) -> Self {
        GridConfig {
            kind,
            extents: vec![x, y],
            nodes: vec![n.0, n.1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    kind: DomainKind,
    extents: Vec<(f64, f64)>,
    n: Vec<usize>,
    h: Vec<f64>,
}

pub fn build_grid(config: &GridConfig) -> Result<Grid> {
    let dim = config.extents.len();
    if !(dim == 1 || dim == 2) {
        return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
    }
    if config.nodes.len() != dim {
        return Err(Error::InvalidGrid(format!(
            "{} node counts for {dim} axes",
            config.nodes.len()
        )));
    }
    let mut h = Vec::with_capacity(dim);
    for (axis, (&(a, b), &n)) in config.extents.iter().zip(&config.nodes).enumerate() {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidGrid(format!(
                "axis {axis}: extent [{a}, {b}] is not a positive interval"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!(
                "axis {axis}: need at least 3 interior nodes, got {n}"
            )));
        }
        h.push((b - a) / (n as f64 + 1.0));
    }
    Ok(Grid {
        kind: config.kind,
        extents: config.extents.clone(),
        n: config.nodes.clone(),
        h,
    })
}

impl Grid {
    pub fn new(config: &GridConfig) -> Result<Arc<Grid>> {
        build_grid(config).map(Arc::new)
    }

    pub fn config(&self) -> GridConfig {
        GridConfig {
            kind: self.kind,
            extents: self.extents.clone(),
            nodes: self.n.clone(),
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.n
    }

    pub fn extents(&self) -> &[(f64, f64)] {
        &self.extents
    }

    pub fn spacing(&self) -> &[f64] {
        &self.h
    }

    pub fn min_spacing(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Number of interior nodes.
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.h.iter().product()
    }

    /// The bounded direction of a strip. Strips are always bounded along axis 0.
    pub fn bounded_axis(&self) -> Option<usize> {
        match self.kind {
            DomainKind::Strip => Some(0),
            DomainKind::TruncatedWholeSpace => None,
        }
    }

    /// Coordinate of interior node `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.extents[axis].0 + (i as f64 + 1.0) * self.h[axis]
    }

    /// Position of the node with row-major index `index`.
    pub fn position(&self, index: usize) -> [f64; 2] {
        match self.dim() {
            1 => [self.coord(0, index), 0.0],
            _ => {
                let n1 = self.n[1];
                [self.coord(0, index / n1), self.coord(1, index % n1)]
            }
        }
    }

    /// Largest Euclidean distance from the origin of any interior node.
    pub fn max_node_radius(&self) -> f64 {
        let mut r2 = 0.0;
        for axis in 0..self.dim() {
            let a = self.coord(axis, 0).abs();
            let b = self.coord(axis, self.n[axis] - 1).abs();
            r2 += a.max(b).powi(2);
        }
        r2.sqrt()
    }
}

/// Nodal values on the interior of a grid, row-major with axis 0 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "field", index });
        }
        Ok(ScalarField {
            grid: Arc::clone(grid),
            values,
        })
    }

    /// Samples `f(x)` at every interior node.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        ScalarField {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub(crate) fn from_raw(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> ScalarField {
        ScalarField::from_raw(&self.grid, self.values.iter().map(|v| v * factor).collect())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &ScalarField) -> Result<ScalarField> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + factor * b)
            .collect();
        Ok(ScalarField::from_raw(&self.grid, values))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        dot(&self.values, &self.values) * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nodal quadrature of `f * g`.
pub fn l2_inner(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.check_same_grid(g)?;
    Ok(dot(&f.values, &g.values) * f.grid.cell_volume())
}

/// Second-order central difference Laplacian with zero Dirichlet ghosts.
pub fn laplacian_apply(f: &ScalarField) -> ScalarField {
    let mut out = vec![0.0; f.values.len()];
    laplacian_raw(&f.grid, &f.values, &mut out);
    ScalarField::from_raw(&f.grid, out)
}

pub(crate) fn laplacian_raw(grid: &Grid, f: &[f64], out: &mut [f64]) {
    match grid.dim() {
        1 => {
            let n = grid.n[0];
            let ih2 = 1.0 / (grid.h[0] * grid.h[0]);
            for i in 0..n {
                let left = if i > 0 { f[i - 1] } else { 0.0 };
                let right = if i + 1 < n { f[i + 1] } else { 0.0 };
                out[i] = (left - 2.0 * f[i] + right) * ih2;
            }
        }
        _ => {
            let (n0, n1) = (grid.n[0], grid.n[1]);
            let ih0 = 1.0 / (grid.h[0] * grid.h[0]);
            let ih1 = 1.0 / (grid.h[1] * grid.h[1]);
            for i in 0..n0 {
                for j in 0..n1 {
                    let k = i * n1 + j;
                    let up = if i > 0 { f[k - n1] } else { 0.0 };
                    let down = if i + 1 < n0 { f[k + n1] } else { 0.0 };
                    let left = if j > 0 { f[k - 1] } else { 0.0 };
                    let right = if j + 1 < n1 { f[k + 1] } else { 0.0 };
                    out[k] = (up - 2.0 * f[k] + down) * ih0 + (left - 2.0 * f[k] + right) * ih1;
                }
            }
        }
    }
}

/// Edge-wise gradient inner product, boundary edges to the zero ghosts included.
pub fn grad_inner(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.check_same_grid(g)?;
    Ok(grad_inner_raw(&f.grid, &f.values, &g.values))
}

/// `‖∇f‖²` as the sum of squared forward differences times cell volume.
pub fn grad_sq_norm(f: &ScalarField) -> f64 {
    grad_inner_raw(&f.grid, &f.values, &f.values)
}

pub(crate) fn grad_inner_raw(grid: &Grid, f: &[f64], g: &[f64]) -> f64 {
    let mut total = 0.0;
    for_each_edge(grid, f, g, |_, _, df, dg| total += df * dg);
    total * grid.cell_volume()
}

/// Splits the gradient energy onto nodes: each interior edge gives half its
/// weight to both endpoints, a boundary edge gives all of it to its single
/// interior endpoint. Summing the density recovers [`grad_sq_norm`].
pub(crate) fn grad_density_raw(grid: &Grid, f: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    let vol = grid.cell_volume();
    for_each_edge(grid, f, f, |a, b, df, _| {
        let e = df * df * vol;
        match (a, b) {
            (Some(a), Some(b)) => {
                out[a] += 0.5 * e;
                out[b] += 0.5 * e;
            }
            (Some(a), None) | (None, Some(a)) => out[a] += e,
            (None, None) => {}
        }
    });
}

/// Visits every edge with the endpoint indices (None for a ghost) and the
/// scaled forward differences of `f` and `g` across it.
fn for_each_edge(grid: &Grid, f: &[f64], g: &[f64], mut visit: impl FnMut(Option<usize>, Option<usize>, f64, f64)) {
    match grid.dim() {
        1 => {
            let n = grid.n[0];
            let ih = 1.0 / grid.h[0];
            for e in 0..=n {
                let a = e.checked_sub(1);
                let b = (e < n).then_some(e);
                let fa = a.map_or(0.0, |i| f[i]);
                let fb = b.map_or(0.0, |i| f[i]);
                let ga = a.map_or(0.0, |i| g[i]);
                let gb = b.map_or(0.0, |i| g[i]);
                visit(a, b, (fb - fa) * ih, (gb - ga) * ih);
            }
        }
        _ => {
            let (n0, n1) = (grid.n[0], grid.n[1]);
            let ih0 = 1.0 / grid.h[0];
            let ih1 = 1.0 / grid.h[1];
            for e in 0..=n0 {
                for j in 0..n1 {
                    let a = e.checked_sub(1).map(|i| i * n1 + j);
                    let b = (e < n0).then_some(e * n1 + j);
                    let fa = a.map_or(0.0, |k| f[k]);
                    let fb = b.map_or(0.0, |k| f[k]);
                    let ga = a.map_or(0.0, |k| g[k]);
                    let gb = b.map_or(0.0, |k| g[k]);
                    visit(a, b, (fb - fa) * ih0, (gb - ga) * ih0);
                }
            }
            for i in 0..n0 {
                for e in 0..=n1 {
                    let a = e.checked_sub(1).map(|j| i * n1 + j);
                    let b = (e < n1).then_some(i * n1 + e);
                    let fa = a.map_or(0.0, |k| f[k]);
                    let fb = b.map_or(0.0, |k| f[k]);
                    let ga = a.map_or(0.0, |k| g[k]);
                    let gb = b.map_or(0.0, |k| g[k]);
                    visit(a, b, (fb - fa) * ih1, (gb - ga) * ih1);
                }
            }
        }
    }
}

/// Bound on `|θ'|` for the cubic smoothstep.
pub const THETA_SLOPE_BOUND: f64 = 1.5;

/// Cubic smoothstep cutoff: 0 on `[0, 1]`, 1 on `[2, ∞)`, C¹ in between.
pub fn cutoff_theta(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(invalid("s", format!("cutoff argument must be nonnegative, got {s}")));
    }
    Ok(theta(s))
}

pub(crate) fn theta(s: f64) -> f64 {
    if s <= 1.0 {
        0.0
    } else if s >= 2.0 {
        1.0
    } else {
        let t = s - 1.0;
        t * t * (3.0 - 2.0 * t)
    }
}

pub fn cutoff_theta_prime(s: f64) -> f64 {
    if s <= 1.0 || s >= 2.0 {
        0.0
    } else {
        let t = s - 1.0;
        6.0 * t * (1.0 - t)
    }
}

/// Nodal weights `θ(|x|² / k²)`.
pub fn tail_mask(grid: &Arc<Grid>, k: f64) -> Result<ScalarField> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(invalid("k", format!("tail radius must be positive, got {k}")));
    }
    let k2 = k * k;
    Ok(ScalarField::from_fn(grid, |x| theta((x[0] * x[0] + x[1] * x[1]) / k2)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareEstimate {
    /// `1 / sqrt(lambda_min)`.
    pub constant: f64,
    /// Smallest eigenvalue of the discrete Dirichlet `-Δ`.
    pub lambda_min: f64,
    pub iterations: usize,
    /// Set when the grid is a truncated whole space: the constant then
    /// depends on the truncation and carries no continuum meaning.
    pub whole_space_warning: bool,
}

pub const POINCARE_TOL: f64 = 1e-10;

/// Best discrete Poincaré constant by inverse power iteration on `-Δ_h`.
pub fn poincare_constant(grid: &Arc<Grid>, strict: bool) -> Result<PoincareEstimate> {
    let whole_space = grid.kind() == DomainKind::TruncatedWholeSpace;
    if whole_space && strict {
        return Err(Error::Unsupported(
            "strict Poincaré constant requested on a truncated whole-space grid".into(),
        ));
    }
    let solver = ShiftedLaplacian::new(grid, 1.0, 0.0)
        .with_tolerance(1e-13)
        .with_max_iterations(20_000);
    let n = grid.len();
    let vol = grid.cell_volume();
    let mut x = vec![1.0; n];
    let mut rayleigh = f64::NAN;
    let max_iterations = 50_000;
    for it in 1..=max_iterations {
        let (y, _) = solver.solve(&x, None)?;
        let norm = (dot(&y, &y) * vol).sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
        let next = grad_inner_raw(grid, &x, &x) / (dot(&x, &x) * vol);
        // Rayleigh quotients converge monotonically from above; stop once the
        // decrement is far below the requested tolerance.
        if (rayleigh - next).abs() <= 1e-3 * POINCARE_TOL * next {
            return Ok(PoincareEstimate {
                constant: 1.0 / next.sqrt(),
                lambda_min: next,
                iterations: it,
                whole_space_warning: whole_space,
            });
        }
        rayleigh = next;
    }
    Err(Error::SolverDiverged {
        iterations: max_iterations,
        residual: rayleigh,
    })
}

/// Closed-form eigenvalue of the 1D Dirichlet `-Δ_h` for mode `m ≥ 1`.
pub fn dirichlet_eigenvalue_1d(h: f64, n: usize, m: usize) -> f64 {
    let s = (m as f64 * std::f64::consts::PI / (2.0 * (n as f64 + 1.0))).sin();
    4.0 / (h * h) * s * s
}

/// Discrete eigenvalue of `-Δ_h` for the product mode with per-axis indices `modes`.
pub fn dirichlet_eigenvalue(grid: &Grid, modes: &[usize]) -> f64 {
    (0..grid.dim())
        .map(|a| dirichlet_eigenvalue_1d(grid.h[a], grid.n[a], modes[a]))
        .sum()
}

/// Discrete Dirichlet eigenfield `∏ sin(m_a π (i_a + 1) / (n_a + 1))`.
pub fn dirichlet_mode(grid: &Arc<Grid>, modes: &[usize]) -> Result<ScalarField> {
    if modes.len() != grid.dim() {
        return Err(invalid("modes", "one mode index per axis required"));
    }
    for (a, &m) in modes.iter().enumerate() {
        if m == 0 || m > grid.n[a] {
            return Err(invalid("modes", format!("mode {m} out of range on axis {a}")));
        }
    }
    let pi = std::f64::consts::PI;
    let factor = |a: usize, i: usize| (modes[a] as f64 * pi * (i as f64 + 1.0) / (grid.n[a] as f64 + 1.0)).sin();
    let values = match grid.dim() {
        1 => (0..grid.n[0]).map(|i| factor(0, i)).collect(),
        _ => {
            let n1 = grid.n[1];
            (0..grid.len()).map(|k| factor(0, k / n1) * factor(1, k % n1)).collect()
        }
    };
    Ok(ScalarField::from_raw(grid, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line(a: f64, b: f64, n: usize) -> Arc<Grid> {
        Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, a, b, n)).unwrap()
    }

    #[test]
    fn spacing_from_extent() {
        let g = line(-80.0, 80.0, 1599);
        assert_relative_eq!(g.spacing()[0], 0.1, max_relative = 1e-14);
    }

    #[test]
    fn strip_is_bounded_along_axis_zero() {
        let cfg = GridConfig::plane(DomainKind::Strip, (0.0, std::f64::consts::PI), (-40.0, 40.0), (15, 31));
        assert_eq!(build_grid(&cfg).unwrap().bounded_axis(), Some(0));
    }

    #[test]
    fn rejects_bad_grids() {
        let mut cfg = GridConfig::line(DomainKind::TruncatedWholeSpace, 0.0, 1.0, 2);
        assert!(build_grid(&cfg).is_err());
        cfg.nodes = vec![10];
        cfg.extents = vec![(1.0, 1.0)];
        assert!(build_grid(&cfg).is_err());
        let cfg3 = GridConfig {
            kind: DomainKind::TruncatedWholeSpace,
            extents: vec![(0.0, 1.0); 3],
            nodes: vec![5; 3],
        };
        assert!(build_grid(&cfg3).is_err());
    }

    #[test]
    fn laplacian_of_spike() {
        let g = line(0.0, 1.0, 9);
        let h = g.spacing()[0];
        let mut f = ScalarField::zeros(&g);
        f.values_mut()[4] = 1.0;
        let l = laplacian_apply(&f);
        let ih2 = 1.0 / (h * h);
        assert_relative_eq!(l.values()[3], ih2, max_relative = 1e-14);
        assert_relative_eq!(l.values()[4], -2.0 * ih2, max_relative = 1e-14);
        assert_relative_eq!(l.values()[5], ih2, max_relative = 1e-14);
        assert_eq!(l.values()[2], 0.0);
        assert!(laplacian_apply(&ScalarField::zeros(&g)).is_zero());
    }

    #[test]
    fn sine_is_discrete_eigenfield() {
        let len = 3.0;
        let n = 63;
        let g = line(0.0, len, n);
        let h = g.spacing()[0];
        let pi = std::f64::consts::PI;
        let f = ScalarField::from_fn(&g, |x| (pi * x[0] / len).sin());
        let eig = -(4.0 / (h * h)) * (pi * h / (2.0 * len)).sin().powi(2);
        let l = laplacian_apply(&f);
        for (lv, fv) in l.values().iter().zip(f.values()) {
            assert!((lv - eig * fv).abs() < 1e-10);
        }
    }

    #[test]
    fn hat_function_gradient() {
        let g = line(0.0, 1.0, 9);
        let h = g.spacing()[0];
        let mut f = ScalarField::zeros(&g);
        f.values_mut()[4] = 1.0;
        assert_relative_eq!(grad_sq_norm(&f), 2.0 / h, max_relative = 1e-13);
        assert_eq!(grad_sq_norm(&ScalarField::zeros(&g)), 0.0);
    }

    #[test]
    fn gradient_density_sums_to_norm() {
        let g = Grid::new(&GridConfig::plane(
            DomainKind::TruncatedWholeSpace,
            (-1.0, 1.0),
            (-2.0, 2.0),
            (7, 9),
        ))
        .unwrap();
        let f = ScalarField::from_fn(&g, |x| (x[0] * 3.0).sin() + x[1] * x[1]);
        let mut d = vec![0.0; g.len()];
        grad_density_raw(&g, f.values(), &mut d);
        assert_relative_eq!(d.iter().sum::<f64>(), grad_sq_norm(&f), max_relative = 1e-13);
    }

    #[test]
    fn theta_values() {
        assert_eq!(cutoff_theta(0.5).unwrap(), 0.0);
        assert_eq!(cutoff_theta(3.0).unwrap(), 1.0);
        assert_relative_eq!(cutoff_theta(1.5).unwrap(), 0.5);
        assert!(cutoff_theta(-0.1).is_err());
        assert!(cutoff_theta(f64::NAN).is_err());
    }

    #[test]
    fn mask_values() {
        let g = line(-10.0, 10.0, 19);
        // nodes sit on the integers
        let k = 4.0;
        let m = tail_mask(&g, k).unwrap();
        let at = |x: f64| m.values()[(x + 9.0).round() as usize];
        assert_eq!(at(0.0), 0.0);
        assert_eq!(at(8.0), 1.0);
        let k_mid = 2.0 / 1.5f64.sqrt();
        let m2 = tail_mask(&g, k_mid).unwrap();
        assert_relative_eq!(m2.values()[11], 0.5, max_relative = 1e-12);
        assert!(tail_mask(&g, 0.0).is_err());
    }

    #[test]
    fn poincare_on_unit_width_strip() {
        let pi = std::f64::consts::PI;
        let g = Grid::new(&GridConfig::line(DomainKind::Strip, 0.0, pi, 999)).unwrap();
        let h = g.spacing()[0];
        let est = poincare_constant(&g, true).unwrap();
        let closed = 1.0 / ((4.0 / (h * h)) * (h / 2.0).sin().powi(2)).sqrt();
        assert!((est.constant - closed).abs() < 1e-8 * closed);
        assert!((est.constant - 1.0).abs() < 1e-4);
        assert!(!est.whole_space_warning);
    }

    #[test]
    fn poincare_strict_rejects_whole_space() {
        let g = line(-5.0, 5.0, 31);
        assert!(poincare_constant(&g, true).is_err());
        assert!(poincare_constant(&g, false).unwrap().whole_space_warning);
    }
}
