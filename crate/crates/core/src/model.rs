//! The penalized regression problem behind the solvers: least-squares
//! objective with per-feature (or per-group) linear penalties on the conic
//! lifting variables, plus the scalar reduced form.
//!
//! For weights `x` and lifting blocks `(y_i, z_i)` the objective is
//! `x'A'Ax - 2b'Ax + gamma1*sum(z) + gamma2*sum(y)`; the constant `||b||^2`
//! is left out throughout, so objective values can be negative. Partially
//! minimizing the lifting variables for fixed `x` (cap 1) collapses the
//! penalty to a reverse-Huber form, which [`reduced_objective`] evaluates
//! directly.

use crate::error::{Error, Result};
use crate::projection::RsocVector;
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Least-squares data with sparsity and ridge penalty weights.
///
/// `groups`, when present, partition the feature indices `0..n`; each group
/// gets one `(y, z)` lifting pair. Without groups every feature is its own
/// group.
#[derive(Clone, Debug)]
pub struct SparseRegressionProblem {
    pub a: Array2<f64>,
    pub b: Array1<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
    pub groups: Option<Vec<Vec<usize>>>,
    /// Cap on the z variables; the reduced form requires 1.
    pub u: f64,
}

impl SparseRegressionProblem {
    pub fn new(a: Array2<f64>, b: Array1<f64>, gamma1: f64, gamma2: f64) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows, response has length {}",
                a.nrows(),
                b.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("regression data".into()));
        }
        if !(gamma1 >= 0.0) || !(gamma2 >= 0.0) || !gamma1.is_finite() || !gamma2.is_finite() {
            return Err(Error::InvalidArgument("penalty weights must be nonnegative".into()));
        }
        Ok(Self { a, b, gamma1, gamma2, groups: None, u: 1.0 })
    }

    /// Attaches a feature partition; each group becomes one lifting block.
    pub fn with_groups(mut self, groups: Vec<Vec<usize>>) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::InvalidArgument("empty feature group".into()));
            }
            for &i in g {
                if i >= n {
                    return Err(Error::InvalidArgument(format!(
                        "group index {i} out of range for {n} features"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidArgument(format!("feature {i} in two groups")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("groups do not cover all features".into()));
        }
        self.groups = Some(groups);
        Ok(self)
    }

    pub fn t(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// Number of lifting blocks: group count, or `n` when ungrouped.
    pub fn q(&self) -> usize {
        self.groups.as_ref().map_or(self.n(), Vec::len)
    }

    /// The effective partition: declared groups, or singletons.
    pub fn effective_groups(&self) -> Vec<Vec<usize>> {
        match &self.groups {
            Some(g) => g.clone(),
            None => (0..self.n()).map(|i| vec![i]).collect(),
        }
    }
}

/// A solver iterate: feature weights plus one lifting pair per block.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionPoint {
    pub x: Array1<f64>,
    pub y: Array1<f64>,
    pub z: Array1<f64>,
}

impl DecisionPoint {
    pub fn new(x: Array1<f64>, y: Array1<f64>, z: Array1<f64>) -> Self {
        Self { x, y, z }
    }

    pub fn zeros(n: usize, q: usize) -> Self {
        Self { x: Array1::zeros(n), y: Array1::zeros(q), z: Array1::zeros(q) }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.y.iter()).chain(self.z.iter()).all(|v| v.is_finite())
    }
}

fn check_dims(p: &SparseRegressionProblem, w: &DecisionPoint) -> Result<()> {
    if w.x.len() != p.n() || w.y.len() != p.q() || w.z.len() != p.q() {
        return Err(Error::DimensionMismatch(format!(
            "point has shapes ({}, {}, {}), problem expects ({}, {}, {})",
            w.x.len(),
            w.y.len(),
            w.z.len(),
            p.n(),
            p.q(),
            p.q()
        )));
    }
    Ok(())
}

/// Objective `x'A'Ax - 2b'Ax + gamma1*sum(z) + gamma2*sum(y)`.
///
/// The data-fit part omits the constant `||b||^2`, so the value at zero is
/// 0 and optimal values are typically negative.
pub fn objective(p: &SparseRegressionProblem, w: &DecisionPoint) -> Result<f64> {
    check_dims(p, w)?;
    let ax = p.a.dot(&w.x);
    Ok(ax.dot(&ax) - 2.0 * p.b.dot(&ax) + p.gamma1 * w.z.sum() + p.gamma2 * w.y.sum())
}

/// Gradient triple `(2A'Ax - 2A'b, gamma2*1, gamma1*1)`.
pub fn gradient(p: &SparseRegressionProblem, w: &DecisionPoint) -> Result<DecisionPoint> {
    check_dims(p, w)?;
    let residual = p.a.dot(&w.x) - &p.b;
    let gx = 2.0 * p.a.t().dot(&residual);
    let q = p.q();
    Ok(DecisionPoint::new(
        gx,
        Array1::from_elem(q, p.gamma2),
        Array1::from_elem(q, p.gamma1),
    ))
}

/// Estimates the gradient Lipschitz constant `2*sigma_max(A)^2` by power
/// iteration on `A'A` from a seeded start, inflated by a 1% safety factor.
///
/// The lifting parts of the gradient are constant, so only the quadratic
/// term contributes curvature.
pub fn lipschitz_estimate(p: &SparseRegressionProblem, iters: u32, seed: u64) -> Result<f64> {
    if iters < 1 {
        return Err(Error::InvalidArgument("power iteration needs at least one step".into()));
    }
    let n = p.n();
    if n == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Array1<f64> = Array1::from_iter((0..n).map(|_| rng.gen_range(-1.0..1.0)));
    let norm = v.dot(&v).sqrt();
    if norm == 0.0 {
        v[0] = 1.0;
    } else {
        v /= norm;
    }
    let mut lambda = 0.0;
    for _ in 0..iters {
        let w = p.a.t().dot(&p.a.dot(&v));
        let wn = w.dot(&w).sqrt();
        if wn == 0.0 {
            return Ok(0.0);
        }
        lambda = v.dot(&w);
        v = w / wn;
    }
    Ok(1.01 * 2.0 * lambda)
}

/// Reverse-Huber function: `|x|` inside the unit interval, `(x^2+1)/2`
/// outside; even and continuously differentiable at the seam.
pub fn reverse_huber(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        a
    } else {
        (x * x + 1.0) / 2.0
    }
}

/// Minimizes `gamma1*z + gamma2*y` over the cap-1 conic block for a fixed
/// scalar weight, returning the optimal `(y, z)`.
///
/// The minimizer is `z = min(1, sqrt(gamma2/gamma1)*|x|)`, `y = x^2/z`,
/// degenerating to `(0, 0)` at `x = 0`; the attained penalty equals
/// `2*gamma1*B(sqrt(gamma2/gamma1)*x)` with `B` the reverse-Huber function.
pub fn inner_minimize(x: f64, gamma1: f64, gamma2: f64) -> Result<(f64, f64)> {
    if !(gamma1 > 0.0) || !(gamma2 > 0.0) {
        return Err(Error::InvalidArgument("penalty weights must be positive".into()));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("inner minimization input".into()));
    }
    if x == 0.0 {
        return Ok((0.0, 0.0));
    }
    let z = 1.0_f64.min((gamma2 / gamma1).sqrt() * x.abs());
    Ok((x * x / z, z))
}

/// Objective after minimizing out the lifting pairs: the data-fit part plus
/// `2*gamma1 * sum_i B(sqrt(gamma2/gamma1)*x_i)`.
///
/// Defined for ungrouped problems with cap 1 only; matches [`objective`]
/// at the [`inner_minimize`] lift exactly.
pub fn reduced_objective(p: &SparseRegressionProblem, x: &Array1<f64>) -> Result<f64> {
    if p.groups.is_some() {
        return Err(Error::Unsupported("reduced form is only defined ungrouped".into()));
    }
    if p.u != 1.0 {
        return Err(Error::Unsupported("reduced form requires cap 1".into()));
    }
    if !(p.gamma1 > 0.0) || !(p.gamma2 > 0.0) {
        return Err(Error::InvalidArgument("penalty weights must be positive".into()));
    }
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "weights have length {}, problem expects {}",
            x.len(),
            p.n()
        )));
    }
    let ax = p.a.dot(x);
    let fit = ax.dot(&ax) - 2.0 * p.b.dot(&ax);
    let rate = (p.gamma2 / p.gamma1).sqrt();
    let penalty: f64 = x.iter().map(|&xi| reverse_huber(rate * xi)).sum();
    Ok(fit + 2.0 * p.gamma1 * penalty)
}

/// Splits a decision point into per-group conic blocks `(x_G, y_i, z_i)`,
/// ready for blockwise projection.
pub fn group_blocks(p: &SparseRegressionProblem, w: &DecisionPoint) -> Result<Vec<RsocVector>> {
    check_dims(p, w)?;
    let groups = p.effective_groups();
    Ok(groups
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let x: Vec<f64> = g.iter().map(|&j| w.x[j]).collect();
            RsocVector::new(x, w.y[i], w.z[i])
        })
        .collect())
}
