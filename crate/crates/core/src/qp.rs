//! Fixed-time smoothness problem: minimize `Σ_k p_kᵀ Q_k(τ_k) p_k` per axis
//! subject to waypoint pins and joint continuity `A p = b`.
//!
//! The KKT system is assembled in normalized local time `u = t / τ`, where
//! the coefficients are `q_i = p_i τ^i`. Every segment then lives on `[0, 1]`
//! and the linear system stays well scaled across segment durations from
//! milliseconds to tens of seconds. Solutions and multipliers are mapped back
//! to the monomial basis in seconds before they leave this module.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

use crate::course::WaypointCourse;
use crate::error::{Result, TrajError};
use crate::poly::falling_factorial;
use crate::trajectory::{Method, PiecewiseTrajectory, SegmentPolynomial, TrajectoryMeta, MAX_ORDER};

/// Weight per derivative order in the integral cost `∫ Σ_s c_s (P⁽ˢ⁾)² dt`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CostWeights(Vec<f64>);

impl CostWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(TrajError::validation("cost weights must be finite and nonnegative"));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(TrajError::validation("at least one cost weight must be positive"));
        }
        Ok(CostWeights(weights))
    }

    fn single(order: usize) -> Self {
        let mut w = vec![0.0; order + 1];
        w[order] = 1.0;
        CostWeights(w)
    }

    pub fn minimum_jerk() -> Self {
        Self::single(3)
    }

    pub fn minimum_snap() -> Self {
        Self::single(4)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Highest derivative order with a positive weight.
    pub fn minimized_order(&self) -> usize {
        self.0.iter().rposition(|&w| w > 0.0).unwrap()
    }

    fn scaled_for_duration(&self, tau: f64) -> Vec<f64> {
        self.0
            .iter()
            .enumerate()
            .map(|(s, &c)| c * tau.powi(1 - 2 * s as i32))
            .collect()
    }
}

impl TryFrom<Vec<f64>> for CostWeights {
    type Error = TrajError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        CostWeights::new(v)
    }
}

impl From<CostWeights> for Vec<f64> {
    fn from(w: CostWeights) -> Self {
        w.0
    }
}

/// Symmetric `(N+1)×(N+1)` cost matrix of one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix(DMatrix<f64>);

impl CostMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `pᵀ Q p`.
    pub fn quadratic_form(&self, p: &[f64]) -> f64 {
        let p = DVector::from_column_slice(p);
        p.dot(&(&self.0 * &p))
    }
}

/// Closed-form `Q` with `pᵀQp = ∫₀^τ Σ_s c_s (P⁽ˢ⁾(t))² dt`.
pub fn build_cost_matrix(order: usize, weights: &CostWeights, tau: f64) -> Result<CostMatrix> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(TrajError::validation(format!("segment duration must be positive, got {tau}")));
    }
    if weights.minimized_order() > order {
        return Err(TrajError::validation(format!(
            "weight on derivative {} exceeds polynomial order {order}",
            weights.minimized_order()
        )));
    }
    Ok(CostMatrix(cost_matrix_raw(order, weights.as_slice(), tau)))
}

fn cost_matrix_raw(order: usize, weights: &[f64], tau: f64) -> DMatrix<f64> {
    let n = order + 1;
    let mut q = DMatrix::zeros(n, n);
    for (s, &c) in weights.iter().enumerate().take(n) {
        if c == 0.0 {
            continue;
        }
        for i in s..n {
            for j in i..n {
                let power = (i + j - 2 * s + 1) as i32;
                q[(i, j)] += c * falling_factorial(i, s) * falling_factorial(j, s) * tau.powi(power)
                    / power as f64;
            }
        }
    }
    q.fill_lower_triangle_with_upper_triangle();
    q
}

/// Block-diagonal assembly `diag(Q₁, …, Q_K)`.
pub fn block_diagonal(blocks: &[CostMatrix]) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|b| b.0.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let m = b.0.nrows();
        out.view_mut((offset, offset), (m, m)).copy_from(&b.0);
        offset += m;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Start,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintRow {
    /// `P_k⁽ˢ⁾` at the given boundary of segment `k` equals `value`.
    Pin {
        segment: usize,
        boundary: Boundary,
        order: usize,
        axis: usize,
        value: f64,
    },
    /// `P_k⁽ˢ⁾(τ_k) = P_{k+1}⁽ˢ⁾(0)`.
    Continuity { segment: usize, order: usize, axis: usize },
}

impl ConstraintRow {
    fn axis(&self) -> usize {
        match *self {
            ConstraintRow::Pin { axis, .. } | ConstraintRow::Continuity { axis, .. } => axis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RowKey {
    Pin(usize, Boundary, usize, usize),
    Continuity(usize, usize, usize),
}

/// Equality constraints `A p = b`, stored symbolically so the matrices can be
/// materialized for any segment durations.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    segments: usize,
    order: usize,
    axes: usize,
    rows: Vec<ConstraintRow>,
    keys: HashSet<RowKey>,
}

impl ConstraintSet {
    pub fn new(segments: usize, order: usize, axes: usize) -> Self {
        ConstraintSet {
            segments,
            order,
            axes,
            rows: Vec::new(),
            keys: HashSet::new(),
        }
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn axes(&self) -> usize {
        self.axes
    }

    pub fn rows(&self) -> &[ConstraintRow] {
        &self.rows
    }

    pub fn rows_for_axis(&self, axis: usize) -> impl Iterator<Item = &ConstraintRow> {
        self.rows.iter().filter(move |r| r.axis() == axis)
    }

    /// Unknowns per axis, `K (N + 1)`.
    pub fn unknowns(&self) -> usize {
        self.segments * (self.order + 1)
    }

    fn insert(&mut self, key: RowKey, row: ConstraintRow) -> Result<()> {
        if !self.keys.insert(key) {
            return Err(TrajError::validation(format!("duplicate constraint row {row:?}")));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn pin(&mut self, segment: usize, boundary: Boundary, order: usize, axis: usize, value: f64) -> Result<()> {
        if segment >= self.segments || order > self.order || axis >= self.axes || !value.is_finite() {
            return Err(TrajError::validation(format!(
                "invalid pin: segment {segment}, derivative {order}, axis {axis}, value {value}"
            )));
        }
        self.insert(
            RowKey::Pin(segment, boundary, order, axis),
            ConstraintRow::Pin {
                segment,
                boundary,
                order,
                axis,
                value,
            },
        )
    }

    pub fn continuity(&mut self, segment: usize, order: usize, axis: usize) -> Result<()> {
        if segment + 1 >= self.segments || order > self.order || axis >= self.axes {
            return Err(TrajError::validation(format!(
                "invalid continuity row: joint after segment {segment}, derivative {order}, axis {axis}"
            )));
        }
        self.insert(
            RowKey::Continuity(segment, order, axis),
            ConstraintRow::Continuity { segment, order, axis },
        )
    }

    /// `A` and `b` for one axis in the monomial basis with time in seconds.
    pub fn matrix(&self, axis: usize, durations: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
        self.materialize(axis, durations, false)
    }

    fn materialize(&self, axis: usize, durations: &[f64], normalized: bool) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.order + 1;
        let rows: Vec<&ConstraintRow> = self.rows_for_axis(axis).collect();
        let mut a = DMatrix::zeros(rows.len(), self.unknowns());
        let mut b = DVector::zeros(rows.len());
        for (r, row) in rows.iter().enumerate() {
            match **row {
                ConstraintRow::Pin {
                    segment,
                    boundary,
                    order,
                    value,
                    ..
                } => {
                    let tau = durations[segment];
                    let at = match boundary {
                        Boundary::Start => 0.0,
                        Boundary::End => if normalized { 1.0 } else { tau },
                    };
                    for i in order..n {
                        a[(r, segment * n + i)] = falling_factorial(i, order) * at.powi((i - order) as i32);
                    }
                    b[r] = if normalized { value * tau.powi(order as i32) } else { value };
                }
                ConstraintRow::Continuity { segment, order, .. } => {
                    let (left, right) = (durations[segment], durations[segment + 1]);
                    let (wl, wr, end) = if normalized {
                        let mid = (left * right).sqrt();
                        ((mid / left).powi(order as i32), (mid / right).powi(order as i32), 1.0)
                    } else {
                        (1.0, 1.0, left)
                    };
                    for i in order..n {
                        a[(r, segment * n + i)] = wl * falling_factorial(i, order) * end.powi((i - order) as i32);
                    }
                    a[(r, (segment + 1) * n + order)] -= wr * falling_factorial(order, order);
                }
            }
        }
        (a, b)
    }

    /// Row scale applied by the normalized materialization; `b_norm = R b`.
    fn row_scales(&self, axis: usize, durations: &[f64]) -> Vec<f64> {
        self.rows_for_axis(axis)
            .map(|row| match *row {
                ConstraintRow::Pin { segment, order, .. } => durations[segment].powi(order as i32),
                ConstraintRow::Continuity { segment, order, .. } => {
                    (durations[segment] * durations[segment + 1]).sqrt().powi(order as i32)
                }
            })
            .collect()
    }

    /// Rejects row sets whose `A` is rank deficient on any axis.
    pub fn check_rank(&self) -> Result<()> {
        let unit = vec![1.0; self.segments];
        for axis in 0..self.axes {
            let (a, _) = self.materialize(axis, &unit, true);
            if a.nrows() == 0 {
                continue;
            }
            if a.nrows() > a.ncols() {
                return Err(TrajError::validation(format!(
                    "axis {axis}: {} constraint rows exceed {} unknowns",
                    a.nrows(),
                    a.ncols()
                )));
            }
            let sv = a.transpose().svd(false, false).singular_values;
            let max = sv.max();
            let min = sv.min();
            if !(min > 1e-10 * max) {
                return Err(TrajError::validation(format!(
                    "axis {axis}: constraint rows are linearly dependent (singular value ratio {:.3e})",
                    min / max
                )));
            }
        }
        Ok(())
    }
}

/// Waypoint pins and joint continuity for a course of `segments` legs.
///
/// Endpoints pin derivatives `0..=continuity`, zero unless the waypoint
/// carries a velocity or acceleration. Interior waypoints pin position on
/// both adjoining segments; the joint is continuous up to `continuity`.
/// Interior velocity/acceleration, when given, is pinned on the later
/// segment.
pub fn assemble_constraints(
    course: &WaypointCourse,
    segments: usize,
    order: usize,
    continuity: usize,
) -> Result<ConstraintSet> {
    let wps = course.waypoints();
    if wps.len() != segments + 1 {
        return Err(TrajError::validation(format!(
            "{} waypoints cannot define {segments} segments",
            wps.len()
        )));
    }
    if order == 0 || order > MAX_ORDER {
        return Err(TrajError::validation(format!("polynomial order must lie in 1..={MAX_ORDER}")));
    }
    if continuity >= order {
        return Err(TrajError::validation(format!(
            "continuity order {continuity} must be below polynomial order {order}"
        )));
    }
    let axes = if course.has_yaw() { 4 } else { 3 };
    let mut set = ConstraintSet::new(segments, order, axes);
    // rows contributed per waypoint on a single axis, for overload diagnostics
    let mut per_waypoint = Vec::with_capacity(wps.len());

    for (j, w) in wps.iter().enumerate() {
        let before = set.rows.len();
        let target = |s: usize, axis: usize| -> Option<f64> {
            if axis == 3 {
                return if s == 0 { w.yaw } else { None };
            }
            match s {
                0 => Some(w.position[axis]),
                1 => w.velocity.map(|v| v[axis]),
                2 => w.acceleration.map(|v| v[axis]),
                _ => None,
            }
        };
        let endpoint = j == 0 || j == segments;
        for axis in 0..axes {
            if endpoint {
                let (seg, boundary) = if j == 0 { (0, Boundary::Start) } else { (segments - 1, Boundary::End) };
                for s in 0..=continuity {
                    set.pin(seg, boundary, s, axis, target(s, axis).unwrap_or(0.0))?;
                }
                // fixed derivatives beyond the continuity order still apply
                for s in continuity + 1..=2.min(order) {
                    if let Some(v) = target(s, axis) {
                        set.pin(seg, boundary, s, axis, v)?;
                    }
                }
            } else {
                set.pin(j - 1, Boundary::End, 0, axis, target(0, axis).unwrap())?;
                set.pin(j, Boundary::Start, 0, axis, target(0, axis).unwrap())?;
                for s in 1..=continuity {
                    set.continuity(j - 1, s, axis)?;
                }
                for s in 1..=2.min(order) {
                    if let Some(v) = target(s, axis) {
                        set.pin(j, Boundary::Start, s, axis, v)?;
                        if s > continuity {
                            set.pin(j - 1, Boundary::End, s, axis, v)?;
                        }
                    }
                }
            }
        }
        per_waypoint.push((set.rows.len() - before) / axes);
    }

    let unknowns = set.unknowns();
    let total: usize = per_waypoint.iter().sum();
    if total > unknowns {
        let mut cumulative = 0;
        let mut offending = wps.len() - 1;
        for (j, &rows) in per_waypoint.iter().enumerate() {
            cumulative += rows;
            if cumulative > (order + 1) * (j + 1).min(segments) {
                offending = j;
                break;
            }
        }
        return Err(TrajError::validation(format!(
            "over-constrained at waypoint {offending}: {total} constraint rows for {unknowns} unknowns per axis"
        )));
    }
    set.check_rank()?;
    Ok(set)
}

/// Polynomial order and joint continuity for the smoothing solve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmoothConfig {
    pub order: usize,
    /// Defaults to `min(4, (N - 1) / 2)`: 2 for quintics, 4 for N = 9.
    pub continuity: Option<usize>,
}

impl Default for SmoothConfig {
    fn default() -> Self {
        SmoothConfig {
            order: 5,
            continuity: None,
        }
    }
}

impl SmoothConfig {
    pub fn with_order(order: usize) -> Self {
        SmoothConfig {
            order,
            continuity: None,
        }
    }

    pub fn continuity_order(&self) -> usize {
        self.continuity
            .unwrap_or_else(|| 4.min(self.order.saturating_sub(1) / 2))
    }
}

/// Optimal coefficients and multipliers of one axis.
#[derive(Debug, Clone)]
pub struct AxisSolution {
    /// Stacked `[p₁ᵀ … p_Kᵀ]ᵀ` in the monomial basis, seconds.
    pub coefficients: DVector<f64>,
    /// Multipliers `λ` with `2Qp + Aᵀλ = 0`.
    pub multipliers: DVector<f64>,
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct SmoothSolution {
    pub trajectory: PiecewiseTrajectory,
    /// Position axes first, then yaw when present.
    pub axes: Vec<AxisSolution>,
    /// Smoothness cost summed over the three position axes.
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    /// `max_axis ‖2Qp + Aᵀλ‖ / (‖Q‖_F ‖p‖)`.
    pub stationarity: f64,
    /// `max_axis max_row |Ap − b|`.
    pub feasibility: f64,
}

/// A course, weights and constraint structure, ready to be solved for any
/// set of segment durations.
#[derive(Debug, Clone)]
pub struct SmoothProblem {
    course: WaypointCourse,
    weights: CostWeights,
    config: SmoothConfig,
    constraints: ConstraintSet,
}

impl SmoothProblem {
    pub fn new(course: WaypointCourse, weights: CostWeights, config: SmoothConfig) -> Result<Self> {
        if weights.minimized_order() > config.order {
            return Err(TrajError::validation(format!(
                "weight on derivative {} exceeds polynomial order {}",
                weights.minimized_order(),
                config.order
            )));
        }
        let constraints = assemble_constraints(
            &course,
            course.num_segments(),
            config.order,
            config.continuity_order(),
        )?;
        Ok(SmoothProblem {
            course,
            weights,
            config,
            constraints,
        })
    }

    pub fn course(&self) -> &WaypointCourse {
        &self.course
    }

    pub fn weights(&self) -> &CostWeights {
        &self.weights
    }

    pub fn config(&self) -> &SmoothConfig {
        &self.config
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn num_segments(&self) -> usize {
        self.course.num_segments()
    }

    fn check_durations(&self, durations: &[f64]) -> Result<()> {
        if durations.len() != self.num_segments() {
            return Err(TrajError::validation(format!(
                "expected {} segment times, got {}",
                self.num_segments(),
                durations.len()
            )));
        }
        if let Some(k) = durations.iter().position(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(TrajError::validation(format!(
                "segment time {k} must be positive and finite, got {}",
                durations[k]
            )));
        }
        Ok(())
    }

    pub fn solve(&self, durations: &[f64]) -> Result<PiecewiseTrajectory> {
        Ok(self.solve_detailed(durations)?.trajectory)
    }

    /// Smoothness cost `f(τ)` at the optimal coefficients.
    pub fn cost(&self, durations: &[f64]) -> Result<f64> {
        Ok(self.solve_detailed(durations)?.cost)
    }

    pub fn solve_detailed(&self, durations: &[f64]) -> Result<SmoothSolution> {
        self.check_durations(durations)?;
        let axes: Vec<AxisSolution> = (0..self.constraints.axes)
            .map(|axis| self.solve_axis(axis, durations))
            .collect::<Result<_>>()?;

        let n = self.config.order + 1;
        let coeffs = |axis: usize, k: usize| axes[axis].coefficients.rows(k * n, n).iter().copied().collect::<Vec<_>>();
        let segments = durations
            .iter()
            .enumerate()
            .map(|(k, &tau)| {
                let yaw = (axes.len() == 4).then(|| coeffs(3, k));
                SegmentPolynomial::with_yaw([coeffs(0, k), coeffs(1, k), coeffs(2, k)], yaw, tau)
            })
            .collect::<Result<Vec<_>>>()?;
        let meta = TrajectoryMeta {
            minimized_order: Some(self.weights.minimized_order()),
            continuity_order: self.config.continuity_order(),
            method: Method::Fixed,
        };
        let trajectory = PiecewiseTrajectory::new(segments, meta)
            .map_err(|e| TrajError::numerical(format!("solution violates joint continuity: {e}")))?;
        let cost = axes.iter().take(3).map(|a| a.cost).sum();
        Ok(SmoothSolution { trajectory, axes, cost })
    }

    fn solve_axis(&self, axis: usize, durations: &[f64]) -> Result<AxisSolution> {
        let n = self.config.order + 1;
        let unknowns = self.constraints.unknowns();
        let (a, b) = self.constraints.materialize(axis, durations, true);
        let m = a.nrows();

        let mut h = DMatrix::zeros(unknowns, unknowns);
        for (k, &tau) in durations.iter().enumerate() {
            let block = cost_matrix_raw(self.config.order, &self.weights.scaled_for_duration(tau), 1.0);
            h.view_mut((k * n, k * n), (n, n)).copy_from(&block);
        }
        let scale = h.diagonal().max();
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(TrajError::numerical(format!("axis {axis}: degenerate cost matrix")));
        }
        h /= scale;

        let dim = unknowns + m;
        let mut kkt = DMatrix::zeros(dim, dim);
        kkt.view_mut((0, 0), (unknowns, unknowns)).copy_from(&(&h * 2.0));
        kkt.view_mut((unknowns, 0), (m, unknowns)).copy_from(&a);
        kkt.view_mut((0, unknowns), (unknowns, m)).copy_from(&a.transpose());
        let mut rhs = DVector::zeros(dim);
        rhs.rows_mut(unknowns, m).copy_from(&b);

        let eq = equilibrate(&mut kkt);
        rhs.component_mul_assign(&eq);
        let lu = kkt.clone().lu();
        let condition = {
            let u = lu.u();
            let d = u.diagonal().map(f64::abs);
            d.max() / d.min()
        };
        let singular = || {
            TrajError::numerical(format!(
                "axis {axis}: singular KKT system (condition estimate {condition:.3e}) at segment times {durations:?}"
            ))
        };
        let mut z = lu.solve(&rhs).ok_or_else(singular)?;
        for _ in 0..2 {
            let Some(dz) = lu.solve(&(&rhs - &kkt * &z)) else { break };
            z += dz;
        }
        let sol = Some(z.component_mul(&eq))
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .ok_or_else(singular)?;
        let q = sol.rows(0, unknowns).into_owned();
        let mu = sol.rows(unknowns, m).into_owned();

        // per-row backward error: residual against the size of the terms summed
        let residual = &a * &q - &b;
        let violation = (0..m)
            .map(|i| {
                let terms: f64 = a.row(i).iter().zip(q.iter()).map(|(x, y)| (x * y).abs()).sum();
                residual[i].abs() / (1.0 + b[i].abs() + terms)
            })
            .fold(0.0, f64::max);
        if violation > 1e-8 {
            return Err(TrajError::numerical(format!(
                "axis {axis}: relative constraint residual {violation:.3e} after KKT solve (condition estimate {condition:.3e})"
            )));
        }

        let cost = q.dot(&(&h * &q)) * scale;
        let mut p = q;
        for (k, &tau) in durations.iter().enumerate() {
            for i in 0..n {
                p[k * n + i] /= tau.powi(i as i32);
            }
        }
        let row_scales = self.constraints.row_scales(axis, durations);
        let multipliers = DVector::from_iterator(m, mu.iter().zip(&row_scales).map(|(mu, r)| mu * r * scale));
        Ok(AxisSolution {
            coefficients: p,
            multipliers,
            cost,
        })
    }

    /// Optimality and feasibility residuals of `solution` in the original
    /// monomial basis.
    pub fn kkt_residuals(&self, solution: &SmoothSolution) -> Result<KktResiduals> {
        let durations = solution.trajectory.durations();
        let blocks = durations
            .iter()
            .map(|&tau| build_cost_matrix(self.config.order, &self.weights, tau))
            .collect::<Result<Vec<_>>>()?;
        let q = block_diagonal(&blocks);
        let q_norm = q.norm();
        let mut out = KktResiduals {
            stationarity: 0.0,
            feasibility: 0.0,
        };
        for (axis, sol) in solution.axes.iter().enumerate() {
            let (a, b) = self.constraints.matrix(axis, &durations);
            let p = &sol.coefficients;
            let grad = &q * p * 2.0 + a.transpose() * &sol.multipliers;
            let denom = q_norm * p.norm();
            let stationarity = if denom > 0.0 { grad.norm() / denom } else { grad.norm() };
            out.stationarity = out.stationarity.max(stationarity);
            out.feasibility = out.feasibility.max((&a * p - b).amax());
        }
        Ok(out)
    }
}

/// Symmetric Ruiz scaling `K ← S K S` toward unit row maxima; returns `S`.
/// Segments of very different lengths give cost blocks many orders of
/// magnitude apart, which plain LU pivoting cannot absorb.
fn equilibrate(k: &mut DMatrix<f64>) -> DVector<f64> {
    let n = k.nrows();
    let mut total = DVector::from_element(n, 1.0);
    for _ in 0..20 {
        let r = DVector::from_iterator(
            n,
            k.row_iter().map(|row| {
                let m = row.amax();
                if m > 0.0 {
                    1.0 / m.sqrt()
                } else {
                    1.0
                }
            }),
        );
        if r.iter().all(|x| (x - 1.0).abs() < 1e-3) {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] *= r[i] * r[j];
            }
        }
        total.component_mul_assign(&r);
    }
    total
}

/// One-shot smoothing solve for fixed segment times.
pub fn solve_smooth(
    course: &WaypointCourse,
    durations: &[f64],
    weights: &CostWeights,
    config: SmoothConfig,
) -> Result<PiecewiseTrajectory> {
    SmoothProblem::new(course.clone(), weights.clone(), config)?.solve(durations)
}

/// `Σ_k Σ_axis p_kᵀ Q_k p_k` over the position axes of `traj`.
pub fn trajectory_cost(traj: &PiecewiseTrajectory, weights: &CostWeights) -> Result<f64> {
    let mut total = 0.0;
    for seg in traj.segments() {
        let q = build_cost_matrix(seg.order(), weights, seg.duration())?;
        total += (0..3).map(|a| q.quadratic_form(seg.coefficients(a))).sum::<f64>();
    }
    Ok(total)
}
