//! Slow, independent checks of the closed-form projection: a grid-search
//! oracle, deterministic feasible-point sampling, and variational-inequality
//! certificates.
//!
//! The oracle exploits rotation symmetry: for a fixed `(y, z)` the optimal
//! x-block is `x_hat` rescaled to radius `r = min(||x_hat||, sqrt(y*z))`, so
//! the problem reduces to a jointly convex objective over the rectangle
//! `(y, z) in [0, y_max] x [0, u]`. A coarse-to-fine grid narrows to the
//! sublevel set of the incumbent, then a nested ternary search polishes the
//! continuous minimizer inside the final window. Nothing here shares code
//! with the closed-form case analysis.

use crate::error::{Error, Result};
use crate::projection::{membership, CappedRsoc, RsocVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grid-search controls for [`oracle_project`].
#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Initial grid resolution per axis; doubles (up to 1024) when a
    /// refinement round fails to shrink the window.
    pub grid_init: usize,
    /// Maximum refinement rounds.
    pub refine_rounds: u32,
    /// Refinement stops once both cell edges are at most this long.
    pub target_cell: f64,
    /// Inflation factor on the derived y search bound.
    pub y_max_factor: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { grid_init: 64, refine_rounds: 8, target_cell: 1e-7, y_max_factor: 2.0 }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<()> {
        if self.grid_init < 16 {
            return Err(Error::InvalidArgument("grid_init must be at least 16".into()));
        }
        if !(self.target_cell > 0.0) || !self.target_cell.is_finite() {
            return Err(Error::InvalidArgument("target_cell must be positive".into()));
        }
        if self.refine_rounds == 0 {
            return Err(Error::InvalidArgument("refine_rounds must be positive".into()));
        }
        if !(self.y_max_factor >= 1.0) || !self.y_max_factor.is_finite() {
            return Err(Error::InvalidArgument("y_max_factor must be at least 1".into()));
        }
        Ok(())
    }
}

/// Squared distance from `(x_hat, y_hat, z_hat)` to the nearest set point
/// with blocks `(y, z)`, after the optimal radial x choice.
fn slice_obj(xn: f64, yh: f64, zh: f64, y: f64, z: f64) -> f64 {
    let r = xn.min((y * z).max(0.0).sqrt());
    (r - xn) * (r - xn) + (y - yh) * (y - yh) + (z - zh) * (z - zh)
}

/// Projects `v` onto `set` by grid search over `(y, z)`, independently of
/// the closed form.
///
/// The returned point is feasible within 1e-12 and within a small multiple
/// of `cfg.target_cell` of the true projection.
pub fn oracle_project(v: &RsocVector, set: &CappedRsoc, cfg: &OracleConfig) -> Result<RsocVector> {
    cfg.validate()?;
    if v.dim() != set.m {
        return Err(Error::DimensionMismatch(format!(
            "x block has length {}, set expects {}",
            v.dim(),
            set.m
        )));
    }
    if !v.is_finite() {
        return Err(Error::NonFinite("oracle input".into()));
    }
    let u = set.u;
    let xn = v.x_norm();
    let (yh, zh) = (v.y, v.z);
    let obj = |y: f64, z: f64| slice_obj(xn, yh, zh, y, z);

    // the projection's y never exceeds max(y_hat, ||x_hat||^2 / u)
    let y_max = cfg.y_max_factor * 1.0_f64.max(yh.abs()).max(xn * xn / u);
    let (mut ylo, mut yhi) = (0.0_f64, y_max);
    let (mut zlo, mut zhi) = (0.0_f64, u);
    let mut g = cfg.grid_init;
    let mut best = (f64::INFINITY, 0.0, 0.0);

    for _ in 0..cfg.refine_rounds {
        let ys: Vec<f64> = (0..=g).map(|i| ylo + (yhi - ylo) * i as f64 / g as f64).collect();
        let zs: Vec<f64> = (0..=g).map(|j| zlo + (zhi - zlo) * j as f64 / g as f64).collect();
        let mut vals = vec![0.0_f64; (g + 1) * (g + 1)];
        let mut gmin = f64::INFINITY;
        let (mut bi, mut bj) = (0usize, 0usize);
        for (i, &y) in ys.iter().enumerate() {
            for (j, &z) in zs.iter().enumerate() {
                let val = obj(y, z);
                vals[i * (g + 1) + j] = val;
                if val < gmin {
                    gmin = val;
                    bi = i;
                    bj = j;
                }
            }
        }
        if gmin < best.0 {
            best = (gmin, ys[bi], zs[bj]);
        }
        let cy = (yhi - ylo) / g as f64;
        let cz = (zhi - zlo) / g as f64;
        if cy.max(cz) <= cfg.target_cell {
            break;
        }
        // window for the next round: bounding box of the sublevel set at
        // the argmin's neighborhood spread, padded by two cells
        let mut spread = 0.0_f64;
        for i in bi.saturating_sub(1)..=(bi + 1).min(g) {
            for j in bj.saturating_sub(1)..=(bj + 1).min(g) {
                spread = spread.max(vals[i * (g + 1) + j] - gmin);
            }
        }
        let (mut i_min, mut i_max, mut j_min, mut j_max) = (g, 0usize, g, 0usize);
        for i in 0..=g {
            for j in 0..=g {
                if vals[i * (g + 1) + j] <= gmin + spread {
                    i_min = i_min.min(i);
                    i_max = i_max.max(i);
                    j_min = j_min.min(j);
                    j_max = j_max.max(j);
                }
            }
        }
        let ylo2 = ylo.max(ys[i_min] - 2.0 * cy);
        let yhi2 = yhi.min(ys[i_max] + 2.0 * cy);
        let zlo2 = zlo.max(zs[j_min] - 2.0 * cz);
        let zhi2 = zhi.min(zs[j_max] + 2.0 * cz);
        let shrink = ((yhi2 - ylo2) / (yhi - ylo).max(1e-300))
            .max((zhi2 - zlo2) / (zhi - zlo).max(1e-300));
        (ylo, yhi, zlo, zhi) = (ylo2, yhi2, zlo2, zhi2);
        if shrink > 1.0 / 3.0 && g < 1024 {
            g *= 2;
        }
    }

    // ternary polish of the continuous objective inside the final window;
    // removes the sqrt amplification a y-lattice suffers near tiny y*
    let inner_min_y = |z: f64| -> (f64, f64) {
        let (mut lo, mut hi) = (ylo, yhi);
        for _ in 0..60 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if obj(m1, z) <= obj(m2, z) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let y = 0.5 * (lo + hi);
        (y, obj(y, z))
    };
    let (mut lo, mut hi) = (zlo, zhi);
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if inner_min_y(m1).1 <= inner_min_y(m2).1 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let z = 0.5 * (lo + hi);
    let (y, val) = inner_min_y(z);
    let (_, mut by, mut bz) = best;
    if val <= obj(by, bz) {
        (by, bz) = (y, z);
    }

    let r = xn.min((by * bz).max(0.0).sqrt());
    let x = if xn > 0.0 {
        v.x.iter().map(|&c| c * (r / xn)).collect()
    } else {
        vec![0.0; set.m]
    };
    let mut out = RsocVector::new(x, by.max(0.0), bz.clamp(0.0, u));
    nudge_feasible(&mut out);
    Ok(out)
}

/// Shrinks the x block by one-ulp steps until `||x||^2 <= y*z` holds
/// exactly in floating point. Construction leaves at most a few ulps of
/// excess; anything the cap cannot absorb is zeroed (still a member).
fn nudge_feasible(v: &mut RsocVector) {
    for _ in 0..64 {
        if v.x_norm_sq() <= v.y * v.z {
            return;
        }
        for c in &mut v.x {
            *c *= 0.999_999_999_999_999_9;
        }
    }
    if v.x_norm_sq() > v.y * v.z {
        v.x.iter_mut().for_each(|c| *c = 0.0);
    }
}

/// Draws `count` deterministic members of `set` (tolerance-zero feasible).
///
/// Each batch leads with the extreme points `(0, 0, 0)`, `(0, y, 0)`,
/// `(0, 0, u)` and a cap-parabola point, then fills with random points
/// `x = dir * sqrt(y*z) * beta`, `beta in [0, 1]`.
pub fn sample_feasible(set: &CappedRsoc, count: usize, seed: u64) -> Vec<RsocVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = set.u;
    let m = set.m;
    let y_span = 4.0 * 1.0_f64.max(u);
    let mut out: Vec<RsocVector> = Vec::with_capacity(count);

    let push = |v: RsocVector, out: &mut Vec<RsocVector>| {
        let mut v = v;
        nudge_feasible(&mut v);
        out.push(v);
    };

    let structured: [RsocVector; 4] = {
        let y = rng.gen_range(0.0..y_span);
        let cap_y = rng.gen_range(0.0..y_span);
        let mut cap_x = random_direction(&mut rng, m);
        let cap_r = (cap_y * u).sqrt();
        for c in &mut cap_x {
            *c *= cap_r;
        }
        [
            RsocVector::new(vec![0.0; m], 0.0, 0.0),
            RsocVector::new(vec![0.0; m], y, 0.0),
            RsocVector::new(vec![0.0; m], 0.0, u),
            RsocVector::new(cap_x, cap_y, u),
        ]
    };
    for v in structured {
        if out.len() == count {
            return out;
        }
        push(v, &mut out);
    }
    while out.len() < count {
        let y = rng.gen_range(0.0..y_span);
        let z = rng.gen_range(0.0..u);
        let beta: f64 = rng.gen_range(0.0..1.0);
        let mut x = random_direction(&mut rng, m);
        let r = (y * z).sqrt() * beta;
        for c in &mut x {
            *c *= r;
        }
        push(RsocVector::new(x, y, z), &mut out);
    }
    out
}

fn random_direction(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 {
            return x.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Largest inner product `(v - p) . (w - p)` over sampled members `w` plus
/// the boundary witnesses used in the optimality proofs.
///
/// A value at numerical-noise level certifies `p` as the projection of `v`
/// (the variational inequality holds); a clearly positive value exhibits a
/// better feasible direction. `p` must be feasible within 1e-9.
pub fn projection_certificate(
    v: &RsocVector,
    p: &RsocVector,
    set: &CappedRsoc,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if v.dim() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "inputs have x lengths {} and {}",
            v.dim(),
            p.dim()
        )));
    }
    if !membership(p, set, 1e-9)? {
        return Err(Error::InvalidArgument("candidate projection is not feasible".into()));
    }
    if !v.is_finite() {
        return Err(Error::NonFinite("certificate input".into()));
    }
    let u = set.u;
    let m = set.m;
    let mut witnesses: Vec<RsocVector> = vec![
        RsocVector::new(vec![0.0; m], 0.0, 0.0),
        RsocVector::new(vec![0.0; m], 1.0, 0.0),
        RsocVector::new(vec![0.0; m], 0.0, u),
    ];
    let xn_sq = v.x_norm_sq();
    witnesses.push(RsocVector::new(v.x.clone(), xn_sq / u, u));
    if v.y.abs() > 1e-12 {
        // cap point maximizing the x-alignment term against y growth
        let t = -u / (2.0 * v.y);
        let x: Vec<f64> = v.x.iter().map(|&c| c * t).collect();
        let y = u * xn_sq / (4.0 * v.y * v.y);
        if y.is_finite() && x.iter().all(|c| c.is_finite()) {
            witnesses.push(RsocVector::new(x, y, u));
        }
    }
    let mut best = f64::NEG_INFINITY;
    let inner = |w: &RsocVector| -> f64 {
        let mut acc = 0.0;
        for i in 0..m {
            acc += (v.x[i] - p.x[i]) * (w.x[i] - p.x[i]);
        }
        acc + (v.y - p.y) * (w.y - p.y) + (v.z - p.z) * (w.z - p.z)
    };
    for w in &mut witnesses {
        nudge_feasible(w);
        best = best.max(inner(w));
    }
    for w in sample_feasible(set, samples, seed) {
        best = best.max(inner(&w));
    }
    Ok(best)
}
