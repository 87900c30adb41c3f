//! Closed-form Euclidean projection onto a capped rotated second-order cone.
//!
//! The set is
//!
//! ```text
//! X = { (x, y, z) : ||x||^2 <= y*z, y >= 0, 0 <= z <= u }
//! ```
//!
//! Projection splits into seven regions: points already in `X`, points
//! projecting to the origin, to the y-axis, onto the interior of the cap
//! `z = u`, onto the cap-boundary parabola `||x||^2 = u*y`, onto the segment
//! `x = 0, y = 0, 0 <= z <= u`, and the generic case on the cone surface
//! `||x||^2 = y*z` with `0 < z < u`. The generic case reduces to a quartic in
//! `||x||` (or equivalently in the cone multiplier), except on the slice
//! `y_hat = -z_hat` where it collapses to an explicit formula.

use crate::error::{Error, Result};
use crate::roots::{solve_depressed_cubic, solve_quartic, DepressedCubic, QuarticPoly};

/// Tolerance for equality comparisons in the case conditions.
pub const EQ_TOL: f64 = 1e-8;

/// Tolerance for feasibility (membership) checks.
pub const FEAS_TOL: f64 = 1e-12;

/// Residual tolerance passed to the root solvers.
const ROOT_TOL: f64 = 1e-7;

/// Width of the `|y_hat + z_hat|` band inside which an empty quartic
/// candidate set falls back to the symmetric closed form. Near that slice the
/// quartic has a nearly double root and candidate filtering can lose it to
/// rounding; the symmetric formula is the exact limit.
const NEAR_SYMMETRIC_RESCUE: f64 = 1e-6;

/// A point in the ambient space of the cone: block vector `x`, scalars `y`, `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct RsocVector {
    pub x: Vec<f64>,
    pub y: f64,
    pub z: f64,
}

impl RsocVector {
    pub fn new(x: Vec<f64>, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Length of the `x` block.
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x_norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }

    pub fn x_norm(&self) -> f64 {
        self.x_norm_sq().sqrt()
    }

    /// Euclidean norm of the full `(x, y, z)` vector.
    pub fn norm(&self) -> f64 {
        (self.x_norm_sq() + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Euclidean distance to `other` in the full ambient space.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let dx: f64 = self
            .x
            .iter()
            .zip(&other.x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (dx + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.is_finite()) && self.y.is_finite() && self.z.is_finite()
    }
}

/// The capped rotated second-order cone, parametrized by the cap `u > 0` and
/// the `x`-block length `m >= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CappedRsoc {
    pub u: f64,
    pub m: usize,
}

impl CappedRsoc {
    pub fn new(u: f64, m: usize) -> Result<Self> {
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::InvalidArgument(format!("cap must be positive and finite, got {u}")));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("x-block must have length >= 1".into()));
        }
        Ok(Self { u, m })
    }
}

/// Which projection branch produced the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionCase {
    /// The input is already in the set.
    Member,
    /// Projects to `(0, 0, 0)`.
    Origin,
    /// Projects to `(0, y_hat, 0)`.
    YAxis,
    /// Projects straight down onto the cap interior `(x_hat, y_hat, u)`.
    CapInterior,
    /// Projects onto the parabola `||x||^2 = u*y` on the cap.
    CapParabola,
    /// Projects to `(0, 0, z_hat)`.
    ZSegment,
    /// Cone-surface case on the slice `y_hat = -z_hat` (explicit formula).
    ConeBoundarySymmetric,
    /// Generic cone-surface case (quartic candidates).
    ConeBoundaryQuartic,
}

/// Projection output: the projected point, the branch that fired, the cone
/// multiplier (`lambda = ||x_hat||/||x|| - 1` on the cone surface, else 0),
/// and the parabola radius when the cap-parabola branch fired.
#[derive(Clone, Debug)]
pub struct ProjectionResult {
    pub point: RsocVector,
    pub case: ProjectionCase,
    pub multiplier: f64,
    pub tilde_norm: Option<f64>,
}

/// Tolerances used by the case classification.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Equality comparisons between case-boundary expressions.
    pub eq: f64,
    /// Set-membership feasibility slack.
    pub feas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eq: EQ_TOL, feas: FEAS_TOL }
    }
}

fn check_input(v: &RsocVector, set: &CappedRsoc) -> Result<()> {
    if v.dim() != set.m {
        return Err(Error::DimensionMismatch(format!(
            "x block has length {}, set expects {}",
            v.dim(),
            set.m
        )));
    }
    if !v.is_finite() {
        return Err(Error::NonFinite("projection input".into()));
    }
    Ok(())
}

/// Tests `v` for membership in the set within `feas_tol`.
pub fn membership(v: &RsocVector, set: &CappedRsoc, feas_tol: f64) -> Result<bool> {
    check_input(v, set)?;
    Ok(v.x_norm_sq() <= v.y * v.z + feas_tol
        && v.y >= -feas_tol
        && v.z >= -feas_tol
        && v.z <= set.u + feas_tol)
}

/// Radius of the cap-parabola point nearest to `(x_hat, y_hat)`: the unique
/// nonnegative root of `w^3 + (u^2/2 - u*y_hat)*w - u^2*||x_hat||/2 = 0`.
pub fn tilde_x_norm(xhat_norm: f64, yhat: f64, set: &CappedRsoc) -> Result<f64> {
    if !xhat_norm.is_finite() || !yhat.is_finite() {
        return Err(Error::NonFinite("tilde_x_norm input".into()));
    }
    if xhat_norm < 0.0 {
        return Err(Error::InvalidArgument(format!("negative norm {xhat_norm}")));
    }
    if xhat_norm <= 1e-300 {
        return Ok(0.0);
    }
    let u = set.u;
    let cubic = DepressedCubic::new(0.5 * u * u - u * yhat, -0.5 * u * u * xhat_norm);
    let roots = solve_depressed_cubic(cubic, 1e-12)?;
    // by Descartes' rule the cubic has exactly one positive root; it is the
    // largest real root since the root product is positive and the sum zero
    let r = roots.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let scale = 1.0_f64.max(u * u).max(xhat_norm);
    if !(r > -EQ_TOL * scale) || cubic.eval(r).abs() > 1e-9 * scale {
        return Err(Error::Internal(format!(
            "parabola radius cubic produced no valid nonnegative root for \
             xhat_norm={xhat_norm}, yhat={yhat}, u={u}"
        )));
    }
    Ok(r.max(0.0))
}

/// Classifies which projection branch applies to `v`. First match wins in the
/// fixed case order; total for finite inputs.
pub fn classify(v: &RsocVector, set: &CappedRsoc, tols: Tolerances) -> Result<ProjectionCase> {
    Ok(classify_impl(v, set, tols)?.0)
}

/// Classification plus the parabola radius when the cap-parabola branch fired
/// (avoids re-solving the cubic in [`project`]).
fn classify_impl(
    v: &RsocVector,
    set: &CappedRsoc,
    tols: Tolerances,
) -> Result<(ProjectionCase, Option<f64>)> {
    if membership(v, set, tols.feas)? {
        return Ok((ProjectionCase::Member, None));
    }
    let u = set.u;
    let (yh, zh) = (v.y, v.z);
    let xn2 = v.x_norm_sq();
    let xn = xn2.sqrt();

    if yh <= 0.0 && zh <= 0.0 && xn2 <= 4.0 * yh * zh && yh + zh < 0.0 {
        return Ok((ProjectionCase::Origin, None));
    }
    if xn <= tols.eq && yh > 0.0 && zh < 0.0 {
        return Ok((ProjectionCase::YAxis, None));
    }
    if xn2 <= u * yh && zh > u {
        return Ok((ProjectionCase::CapInterior, None));
    }

    let r = tilde_x_norm(xn, yh, set)?;
    let r2u = r * r / u;
    let radial = (r < xn && yh <= r2u) || ((r - xn).abs() <= tols.eq && yh < r2u);
    let height = zh >= u - (r * xn - r * r) / u - (r2u / u) * (yh - r2u);
    if radial && height {
        return Ok((ProjectionCase::CapParabola, Some(r)));
    }

    if xn <= tols.eq && yh < 0.0 && zh > 0.0 && zh < u {
        return Ok((ProjectionCase::ZSegment, None));
    }

    if (yh + zh).abs() <= tols.eq {
        Ok((ProjectionCase::ConeBoundarySymmetric, None))
    } else {
        Ok((ProjectionCase::ConeBoundaryQuartic, None))
    }
}

/// Cone-surface point for a given radius `rho = ||x||`, reconstructed in a
/// form stable near the quartic's double roots.
///
/// On the cone surface the optimality system fixes `y - z` and `y*z = rho^2`;
/// solving those two (taking the larger of `y`, `z` first) avoids the
/// catastrophic cancellation of the direct rational formulas, whose shared
/// denominator vanishes at `rho = ||x_hat||/3`. The unused optimality
/// equation for `y + z` then serves as an independent consistency filter in
/// [`filtered_candidate`].
fn cone_surface_point(rho: f64, xn: f64, yh: f64, zh: f64) -> (f64, f64, f64) {
    let lam = xn / rho - 1.0;
    let a = 2.0 * (yh - zh) / (2.0 + lam);
    let s = a.hypot(2.0 * rho);
    if a >= 0.0 {
        let y = (s + a) / 2.0;
        (y, rho * rho / y, lam)
    } else {
        let z = (s - a) / 2.0;
        (rho * rho / z, z, lam)
    }
}

/// Filters a quartic root into a candidate `(rho, y, z, lambda)` tuple, or
/// rejects it.
fn filtered_candidate(rho: f64, xn: f64, yh: f64, zh: f64, u: f64) -> Option<(f64, f64, f64, f64)> {
    if !(rho > 1e-300) || !rho.is_finite() {
        return None;
    }
    let (y, z, lam) = cone_surface_point(rho, xn, yh, zh);
    if !y.is_finite() || !z.is_finite() {
        return None;
    }
    // consistency with the unused y+z optimality equation rejects spurious
    // quartic roots (they satisfy the squared system, not the original one)
    let sum_residual = ((y + z) * (2.0 - lam) - 2.0 * (yh + zh)).abs();
    if sum_residual > EQ_TOL * 1.0_f64.max(yh.abs() + zh.abs()).max(y + z) {
        return None;
    }
    if y > 0.0 && z > 0.0 && z < u {
        Some((rho, y, z, lam))
    } else {
        None
    }
}

fn symmetric_surface_point(xn: f64, zh: f64) -> (f64, f64, f64) {
    // on the slice y_hat = -z_hat the projection has x = x_hat/3, and
    // y*z = ||x_hat||^2/9 exactly; computing the larger of y, z first and
    // dividing keeps the product exact
    let s = zh.hypot(2.0 * xn / 3.0);
    let prod = xn * xn / 9.0;
    if zh >= 0.0 {
        let z = (zh + s) / 2.0;
        let y = if z > 0.0 { prod / z } else { 0.0 };
        (y, z, 2.0)
    } else {
        let y = (-zh + s) / 2.0;
        let z = if y > 0.0 { prod / y } else { 0.0 };
        (y, z, 2.0)
    }
}

fn materialize(v: &RsocVector, rho: f64, xn: f64, y: f64, z: f64) -> RsocVector {
    let scale = if xn > 0.0 { rho / xn } else { 0.0 };
    RsocVector::new(v.x.iter().map(|xi| scale * xi).collect(), y, z)
}

/// Candidate projections on the cone surface from the quartic in `||x||`.
///
/// On the slice `|y_hat + z_hat| <= EQ_TOL` this is the single symmetric
/// closed-form point. Off it, every positive real quartic root that passes
/// the consistency and bound filters yields one candidate; the list may be
/// empty when all roots fail the filters.
pub fn cone_boundary_candidates(v: &RsocVector, set: &CappedRsoc) -> Result<Vec<RsocVector>> {
    check_input(v, set)?;
    Ok(cone_boundary_tuples(v, set)?
        .into_iter()
        .map(|(rho, y, z, _)| materialize(v, rho, v.x_norm(), y, z))
        .collect())
}

fn cone_boundary_tuples(v: &RsocVector, set: &CappedRsoc) -> Result<Vec<(f64, f64, f64, f64)>> {
    let xn = v.x_norm();
    if xn <= 1e-300 {
        return Err(Error::InvalidArgument(
            "cone-surface candidates need a nonzero x block".into(),
        ));
    }
    let (yh, zh, u) = (v.y, v.z, set.u);
    if (yh + zh).abs() <= EQ_TOL {
        let rho = xn / 3.0;
        let (y, z, lam) = symmetric_surface_point(xn, zh);
        return Ok(vec![(rho, y, z, lam)]);
    }
    let xn2 = xn * xn;
    let quartic = QuarticPoly::new(
        9.0,
        12.0 * xn,
        -2.0 * xn2 + 8.0 * yh * yh - 20.0 * yh * zh + 8.0 * zh * zh,
        -4.0 * xn2 * xn - 8.0 * yh * yh * xn + 8.0 * xn * yh * zh - 8.0 * xn * zh * zh,
        xn2 * xn2 - 4.0 * xn2 * yh * zh,
    );
    let roots = solve_quartic(&quartic, ROOT_TOL)?;
    Ok(roots
        .into_iter()
        .filter_map(|rho| filtered_candidate(rho, xn, yh, zh, u))
        .collect())
}

/// Candidate projections on the cone surface from the quartic in the
/// multiplier `lambda`.
///
/// Covers the same surface case as [`cone_boundary_candidates`] through an
/// independent parametrization (numerically preferable when `||x||` is tiny);
/// [`project`] searches the union of both. Returns an empty list when the
/// leading coefficient degenerates or no root passes the filters.
pub fn lambda_quartic_candidates(v: &RsocVector, set: &CappedRsoc) -> Result<Vec<RsocVector>> {
    check_input(v, set)?;
    Ok(lambda_quartic_tuples(v, set)?
        .into_iter()
        .map(|(rho, y, z, _)| materialize(v, rho, v.x_norm(), y, z))
        .collect())
}

fn lambda_quartic_tuples(v: &RsocVector, set: &CappedRsoc) -> Result<Vec<(f64, f64, f64, f64)>> {
    let xn = v.x_norm();
    if xn <= 1e-300 {
        return Err(Error::InvalidArgument(
            "cone-surface candidates need a nonzero x block".into(),
        ));
    }
    let (yh, zh, u) = (v.y, v.z, set.u);
    let xn2 = xn * xn;
    let c4 = 4.0 * yh * zh - xn2;
    let c3 = 8.0 * (yh * yh + yh * zh + zh * zh);
    let c2 = 4.0 * (2.0 * xn2 + 4.0 * yh * yh + 4.0 * zh * zh + 5.0 * yh * zh);
    let c1 = 8.0 * (yh * yh + 4.0 * yh * zh + zh * zh);
    let c0 = 16.0 * (yh * zh - xn2);
    let max_coef = c4.abs().max(c3.abs()).max(c2.abs()).max(c1.abs()).max(c0.abs());
    if c4.abs() <= 1e-12 * max_coef {
        // degenerate leading coefficient; the ||x||-quartic route covers this
        return Ok(Vec::new());
    }
    let roots = solve_quartic(&QuarticPoly::new(c4, c3, c2, c1, c0), ROOT_TOL)?;
    let mut out = Vec::new();
    for lam in roots {
        if lam < -1e-10 || (lam - 2.0).abs() <= 1e-9 {
            continue;
        }
        let lam = lam.max(0.0);
        let denom = 4.0 - lam * lam;
        let y_screen = (2.0 * zh * lam + 4.0 * yh) / denom;
        let z_screen = (2.0 * yh * lam + 4.0 * zh) / denom;
        let rho = xn / (1.0 + lam);
        // screen with the rational form, then re-derive (y, z) from rho so
        // the emitted point sits on the cone surface to machine precision
        if !(y_screen > 0.0 && z_screen > 0.0 && z_screen < u) {
            continue;
        }
        if (rho * rho - y_screen * z_screen).abs() > EQ_TOL * 1.0_f64.max(xn2) {
            continue;
        }
        if let Some(c) = filtered_candidate(rho, xn, yh, zh, u) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Projects `v` onto the set, reporting the branch, multiplier, and parabola
/// radius. Total for finite inputs of the right dimension.
pub fn project(v: &RsocVector, set: &CappedRsoc) -> Result<ProjectionResult> {
    let tols = Tolerances::default();
    let (case, tilde) = classify_impl(v, set, tols)?;
    let u = set.u;
    let m = set.m;
    let zero_x = || vec![0.0; m];
    let result = match case {
        ProjectionCase::Member => ProjectionResult {
            point: v.clone(),
            case,
            multiplier: 0.0,
            tilde_norm: None,
        },
        ProjectionCase::Origin => ProjectionResult {
            point: RsocVector::new(zero_x(), 0.0, 0.0),
            case,
            multiplier: 0.0,
            tilde_norm: None,
        },
        ProjectionCase::YAxis => ProjectionResult {
            point: RsocVector::new(zero_x(), v.y, 0.0),
            case,
            multiplier: 0.0,
            tilde_norm: None,
        },
        ProjectionCase::CapInterior => ProjectionResult {
            point: RsocVector::new(v.x.clone(), v.y, u),
            case,
            multiplier: 0.0,
            tilde_norm: None,
        },
        ProjectionCase::CapParabola => {
            let r = tilde.expect("classification carries the parabola radius");
            let xn = v.x_norm();
            let point = if xn > 0.0 {
                materialize(v, r, xn, r * r / u, u)
            } else {
                RsocVector::new(zero_x(), 0.0, u)
            };
            ProjectionResult { point, case, multiplier: 0.0, tilde_norm: Some(r) }
        }
        ProjectionCase::ZSegment => ProjectionResult {
            point: RsocVector::new(zero_x(), 0.0, v.z),
            case,
            multiplier: 0.0,
            tilde_norm: None,
        },
        ProjectionCase::ConeBoundarySymmetric => {
            let xn = v.x_norm();
            debug_assert!(xn > EQ_TOL, "zero x block cannot reach the cone-surface case");
            let (y, z, lam) = symmetric_surface_point(xn, v.z);
            ProjectionResult {
                point: materialize(v, xn / 3.0, xn, y, z),
                case,
                multiplier: lam,
                tilde_norm: None,
            }
        }
        ProjectionCase::ConeBoundaryQuartic => {
            let xn = v.x_norm();
            debug_assert!(xn > EQ_TOL, "zero x block cannot reach the cone-surface case");
            let mut candidates = cone_boundary_tuples(v, set)?;
            candidates.extend(lambda_quartic_tuples(v, set)?);
            let best = candidates.into_iter().min_by(|a, b| {
                let da = dist_sq(a, xn, v.y, v.z);
                let db = dist_sq(b, xn, v.y, v.z);
                da.partial_cmp(&db).unwrap()
            });
            let (rho, y, z, lam) = match best {
                Some(c) => c,
                None if (v.y + v.z).abs() <= NEAR_SYMMETRIC_RESCUE => {
                    // filters can reject everything right next to the
                    // symmetric slice; its closed form is the correct limit
                    let (y, z, lam) = symmetric_surface_point(xn, v.z);
                    (xn / 3.0, y, z, lam)
                }
                None => {
                    return Err(Error::Internal(format!(
                        "no cone-surface candidate for ({:?}, {}, {})",
                        v.x, v.y, v.z
                    )));
                }
            };
            ProjectionResult {
                point: materialize(v, rho, xn, y, z),
                case,
                multiplier: lam.max(0.0),
                tilde_norm: None,
            }
        }
    };
    Ok(result)
}

fn dist_sq(c: &(f64, f64, f64, f64), xn: f64, yh: f64, zh: f64) -> f64 {
    let (rho, y, z, _) = *c;
    (rho - xn).powi(2) + (y - yh).powi(2) + (z - zh).powi(2)
}

/// Projects each element of a batch; order preserved, results identical to
/// calling [`project`] elementwise.
pub fn project_cartesian(batch: &[RsocVector], set: &CappedRsoc) -> Result<Vec<ProjectionResult>> {
    batch.iter().map(|v| project(v, set)).collect()
}
