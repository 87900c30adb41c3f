//! Real-root solvers for depressed cubics and general quartics.
//!
//! The cubic solver branches between a trigonometric three-root form and a
//! Cardano one-root form. The quartic solver computes the classical
//! closed-form (resolvent-cubic) solution in complex arithmetic, accepts
//! near-real candidates, Newton-polishes them, and falls back to
//! monotone-interval bisection whenever the closed form hits a degenerate
//! intermediate or a candidate fails its residual check.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Roots closer than this are collapsed into one.
pub const ROOT_MERGE_TOL: f64 = 1e-8;

/// A closed-form candidate whose imaginary part is at most this is real.
pub const COMPLEX_ACCEPT_TOL: f64 = 1e-4;

/// Relative threshold below which a closed-form intermediate counts as
/// degenerate (division would amplify noise) and the numeric fallback runs.
const DEGENERATE_GUARD: f64 = 1e-12;

/// Maximum Newton iterations when polishing a root candidate.
pub const POLISH_MAX_ITERS: u32 = 20;

/// The cubic `w^3 + p*w + q = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepressedCubic {
    pub p_coef: f64,
    pub q_coef: f64,
}

impl DepressedCubic {
    pub fn new(p_coef: f64, q_coef: f64) -> Self {
        Self { p_coef, q_coef }
    }

    pub fn eval(&self, w: f64) -> f64 {
        (w * w + self.p_coef) * w + self.q_coef
    }

    pub fn deriv_eval(&self, w: f64) -> f64 {
        3.0 * w * w + self.p_coef
    }
}

/// Helper quantities of the closed-form cubic solution.
///
/// `d` and `f` decide the branch: three real roots exist iff `f^2 < d^3`.
/// On that branch `theta` is the arccos argument's angle; otherwise the
/// single real root is `g + h` where `g` and `h` are the two real cube
/// roots `(-f ± sqrt(f^2 - d^3))^(1/3)` (`h` stored here, `g = root - h`).
#[derive(Clone, Copy, Debug)]
pub struct CubicIntermediates {
    pub d: f64,
    pub f: f64,
    /// Defined only on the three-real-root branch (`f^2 < d^3`).
    pub theta: Option<f64>,
    /// The second Cardano cube root; 0 on the three-root branch.
    pub h: f64,
}

/// Computes the branch quantities for a depressed cubic.
pub fn cubic_intermediates(c: DepressedCubic) -> CubicIntermediates {
    let d = -c.p_coef / 3.0;
    let f = c.q_coef / 2.0;
    let d3 = d * d * d;
    if f * f < d3 {
        let theta = (f / d3.sqrt()).clamp(-1.0, 1.0).acos();
        CubicIntermediates { d, f, theta: Some(theta), h: 0.0 }
    } else {
        let sq = (f * f - d3).sqrt();
        CubicIntermediates { d, f, theta: None, h: (-f - sq).cbrt() }
    }
}

/// Solves `w^3 + p*w + q = 0` for its real roots.
///
/// Returns three roots (merged if nearly equal) when `f^2 < d^3` in the
/// intermediates, otherwise one. Every root is Newton-polished toward
/// residual `<= tol * max(1, |p|, |q|)`; the output is sorted ascending.
pub fn solve_depressed_cubic(c: DepressedCubic, tol: f64) -> Result<Vec<f64>> {
    if !c.p_coef.is_finite() || !c.q_coef.is_finite() {
        return Err(Error::NonFinite("cubic coefficients".into()));
    }
    let im = cubic_intermediates(c);
    let mut roots = match im.theta {
        Some(theta) => {
            let amp = -2.0 * im.d.sqrt();
            vec![
                amp * (theta / 3.0).cos(),
                amp * ((theta + std::f64::consts::TAU) / 3.0).cos(),
                amp * ((theta - std::f64::consts::TAU) / 3.0).cos(),
            ]
        }
        None => {
            let sq = (im.f * im.f - im.d * im.d * im.d).sqrt();
            let g = (-im.f + sq).cbrt();
            vec![g + im.h]
        }
    };
    let scale = 1.0_f64.max(c.p_coef.abs()).max(c.q_coef.abs());
    for w in &mut roots {
        *w = newton_polish(|x| c.eval(x), |x| c.deriv_eval(x), *w, POLISH_MAX_ITERS, tol * scale);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(merge_close(roots, ROOT_MERGE_TOL))
}

/// A degree-4 polynomial `c4*x^4 + c3*x^3 + c2*x^2 + c1*x + c0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuarticPoly {
    pub c4: f64,
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl QuarticPoly {
    pub fn new(c4: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Self { c4, c3, c2, c1, c0 }
    }

    pub fn coeffs(&self) -> [f64; 5] {
        [self.c4, self.c3, self.c2, self.c1, self.c0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        (((self.c4 * x + self.c3) * x + self.c2) * x + self.c1) * x + self.c0
    }

    pub fn deriv_eval(&self, x: f64) -> f64 {
        ((4.0 * self.c4 * x + 3.0 * self.c3) * x + 2.0 * self.c2) * x + self.c1
    }

    /// Residual scale at `x`: the largest monomial magnitude `|c_i * x^i|`,
    /// floored at the largest coefficient magnitude.
    ///
    /// The floor keeps relative residual checks satisfiable at roots near 0
    /// when the trailing coefficients vanish (there `|q(x)| / |c1*x|` stays
    /// near 1 for every nonzero `x`, so an unfloored scale rejects exact
    /// roots).
    pub fn residual_scale(&self, x: f64) -> f64 {
        let x2 = x * x;
        let coeff_floor = self
            .coeffs()
            .iter()
            .fold(0.0_f64, |acc, c| acc.max(c.abs()));
        (self.c4 * x2 * x2)
            .abs()
            .max((self.c3 * x2 * x).abs())
            .max((self.c2 * x2).abs())
            .max((self.c1 * x).abs())
            .max(self.c0.abs())
            .max(coeff_floor)
    }

    fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }
}

/// Helper chain of the closed-form quartic solution, exposed for tests.
///
/// After normalizing to monic and shifting by `shift = c3/(4*c4)`, the
/// depressed quartic is `t^4 + d*t^2 + f*t + g`. Its resolvent cubic is
/// depressed to `n^3 + l*n + q_res`; `h` is the Cardano discriminant
/// `q_res^2/4 + l^3/27` and `p` the selected cube root. From the resolvent
/// root `m`, the assembly quantities are `k = sqrt(2m)`, `r = -2d - k^2`,
/// `s = 2f/k`, and the roots are `-shift + (±k ± sqrt(r ∓ s))/2`.
#[derive(Clone, Copy, Debug)]
pub struct QuarticIntermediates {
    pub shift: f64,
    pub d: f64,
    pub f: f64,
    pub g: f64,
    pub h: Complex64,
    pub l: f64,
    pub p: Complex64,
    pub k: Complex64,
    pub r: Complex64,
    pub s: Complex64,
}

/// Computes the closed-form helper chain, or `None` when an intermediate is
/// degenerate (tiny `p` or `k`, or a non-finite value) and the caller should
/// use the numeric fallback.
pub fn quartic_intermediates(qp: &QuarticPoly) -> Option<QuarticIntermediates> {
    let a = qp.c3 / qp.c4;
    let b = qp.c2 / qp.c4;
    let c = qp.c1 / qp.c4;
    let e = qp.c0 / qp.c4;
    let shift = a / 4.0;

    let a2 = a * a;
    let d = b - 3.0 * a2 / 8.0;
    let f = c - a * b / 2.0 + a2 * a / 8.0;
    let g = e - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    let scale = 1.0_f64.max(d.abs()).max(f.abs()).max(g.abs());

    // resolvent cubic m^3 + d*m^2 + (d^2/4 - g)*m - f^2/8, depressed by
    // m = n - d/3
    let l = -d * d / 12.0 - g;
    let q_res = -d * d * d / 108.0 + d * g / 3.0 - f * f / 8.0;
    let h = Complex64::new(q_res * q_res / 4.0 + l * l * l / 27.0, 0.0);
    let sq = h.sqrt();
    let arg_plus = Complex64::new(-q_res / 2.0, 0.0) + sq;
    let arg_minus = Complex64::new(-q_res / 2.0, 0.0) - sq;
    let arg = if arg_plus.norm() >= arg_minus.norm() { arg_plus } else { arg_minus };
    let p = arg.cbrt();

    // three resolvent roots; keep the largest for a stable k
    let m = if p.norm() <= DEGENERATE_GUARD * scale {
        Complex64::new(-d / 3.0, 0.0)
    } else {
        let omega = Complex64::new(-0.5, 0.75_f64.sqrt());
        (0..3)
            .map(|j| {
                let pj = p * omega.powu(j);
                pj - Complex64::new(l / 3.0, 0.0) / pj - Complex64::new(d / 3.0, 0.0)
            })
            .max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap())
            .unwrap()
    };

    let k = (2.0 * m).sqrt();
    if k.norm() <= DEGENERATE_GUARD * scale.sqrt() {
        return None;
    }
    let r = Complex64::new(-2.0 * d, 0.0) - 2.0 * m;
    let s = Complex64::new(2.0 * f, 0.0) / k;
    let im = QuarticIntermediates { shift, d, f, g, h, l, p, k, r, s };
    let finite = [im.p, im.k, im.r, im.s]
        .iter()
        .all(|v| v.re.is_finite() && v.im.is_finite());
    finite.then_some(im)
}

/// Solves a quartic for its real roots via the closed form, with automatic
/// numeric fallback.
///
/// Candidates whose imaginary part is within [`COMPLEX_ACCEPT_TOL`] are taken
/// as real and Newton-polished. If any polished candidate still violates
/// `|qp(x)| <= tol * scale(x)` the whole solve reruns through
/// [`numeric_quartic_fallback`]. Output is sorted and merged at
/// [`ROOT_MERGE_TOL`]; it may be empty (no real roots).
pub fn solve_quartic(qp: &QuarticPoly, tol: f64) -> Result<Vec<f64>> {
    if !qp.is_finite() {
        return Err(Error::NonFinite("quartic coefficients".into()));
    }
    if qp.c4 == 0.0 {
        return Err(Error::InvalidArgument("leading quartic coefficient is zero".into()));
    }
    let closed = quartic_intermediates(qp).map(|im| {
        let mut out = Vec::with_capacity(4);
        for eps in [-1.0, 1.0] {
            let branch = (im.r - eps * im.s).sqrt();
            for delta in [-1.0, 1.0] {
                let t = (eps * im.k + delta * branch) / 2.0;
                let x = t - im.shift;
                if x.im.abs() <= COMPLEX_ACCEPT_TOL && x.re.is_finite() {
                    out.push(x.re);
                }
            }
        }
        out
    });
    let accepted = match closed {
        Some(cands) => {
            let polished: Vec<f64> = cands
                .into_iter()
                .map(|x| polish_root(qp, x, POLISH_MAX_ITERS))
                .collect();
            let all_ok = polished
                .iter()
                .all(|&x| qp.eval(x).abs() <= tol * qp.residual_scale(x));
            all_ok.then_some(polished)
        }
        None => None,
    };
    let mut roots = match accepted {
        Some(r) => r,
        None => numeric_quartic_fallback(qp)?,
    };
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(merge_close(roots, ROOT_MERGE_TOL))
}

/// Newton-polishes a root candidate of `qp`, returning the lowest-residual
/// point visited (never worse than `x0`).
pub fn polish_root(qp: &QuarticPoly, x0: f64, max_iters: u32) -> f64 {
    newton_polish(|x| qp.eval(x), |x| qp.deriv_eval(x), x0, max_iters, 0.0)
}

fn newton_polish<F, D>(eval: F, deriv: D, x0: f64, max_iters: u32, target: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x0;
    let mut best = x0;
    let mut best_res = eval(x0).abs();
    if !best_res.is_finite() {
        return x0;
    }
    for _ in 0..max_iters {
        if best_res <= target {
            break;
        }
        let fx = eval(x);
        let dfx = deriv(x);
        if dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let step = fx / dfx;
        let next = x - step;
        if !next.is_finite() {
            break;
        }
        let res = eval(next).abs();
        if res < best_res {
            best = next;
            best_res = res;
        }
        if step.abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
        x = next;
    }
    best
}

/// Finds all real roots of a quartic by monotone-interval bisection,
/// independently of the closed form.
///
/// The derivative's real roots split the Cauchy root bound into intervals
/// on which the quartic is strictly monotone, so each interval holds at
/// most one root, bracketed by a sign change and bisected to float
/// resolution. A critical point whose own value sits at residual level is
/// a multiple root. Every root is polished and kept only if its residual
/// is at most `1e-10 * residual_scale(x)`; the method is total (bisection
/// cannot stall) and deterministic.
pub fn numeric_quartic_fallback(qp: &QuarticPoly) -> Result<Vec<f64>> {
    if !qp.is_finite() {
        return Err(Error::NonFinite("quartic coefficients".into()));
    }
    if qp.c4 == 0.0 {
        return Err(Error::InvalidArgument("leading quartic coefficient is zero".into()));
    }
    let a = qp.c3 / qp.c4;
    let b = qp.c2 / qp.c4;
    let c = qp.c1 / qp.c4;
    let e = qp.c0 / qp.c4;
    if ![a, b, c, e].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument(
            "leading quartic coefficient too small to normalize".into(),
        ));
    }
    // |root| < 1 + max|monic coefficient|, strictly, so the endpoints of
    // the cut list are never roots and every sign flip is interior
    let bound = 1.0 + a.abs().max(b.abs()).max(c.abs()).max(e.abs());

    // critical points: roots of the derivative, as a monic depressed cubic
    let aa = 0.75 * a;
    let bb = 0.5 * b;
    let cc = 0.25 * c;
    let cubic = DepressedCubic::new(
        bb - aa * aa / 3.0,
        2.0 * aa * aa * aa / 27.0 - aa * bb / 3.0 + cc,
    );
    let mut cuts = vec![-bound];
    for w in solve_depressed_cubic(cubic, 1e-12)? {
        let x = w - aa / 3.0;
        if x > -bound && x < bound {
            cuts.push(x);
        }
    }
    cuts.push(bound);
    cuts.sort_by(|u, v| u.partial_cmp(v).unwrap());

    let mut roots: Vec<f64> = Vec::new();
    // multiple roots sit on critical points and produce no sign flip
    for &x in &cuts[1..cuts.len() - 1] {
        if qp.eval(x).abs() <= 1e-10 * qp.residual_scale(x) {
            roots.push(x);
        }
    }
    for pair in cuts.windows(2) {
        let (mut lo, mut hi) = (pair[0], pair[1]);
        let flo = qp.eval(lo);
        if flo.signum() * qp.eval(hi).signum() >= 0.0 {
            continue;
        }
        let mut sign_lo = flo.signum();
        // halving a finite float bracket reaches adjacent floats in
        // bounded steps, so the loop always terminates
        for _ in 0..4096 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fmid = qp.eval(mid);
            if fmid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fmid.signum() == sign_lo {
                lo = mid;
                sign_lo = fmid.signum();
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }

    let mut roots: Vec<f64> = roots
        .into_iter()
        .map(|x| polish_root(qp, x, POLISH_MAX_ITERS))
        .filter(|&x| qp.eval(x).abs() <= 1e-10 * qp.residual_scale(x))
        .collect();
    roots.sort_by(|u, v| u.partial_cmp(v).unwrap());
    Ok(merge_close(roots, ROOT_MERGE_TOL))
}

fn merge_close(sorted: Vec<f64>, tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(sorted.len());
    for x in sorted {
        match out.last() {
            Some(&prev) if (x - prev).abs() <= tol => {}
            _ => out.push(x),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_roots(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len(), "got {got:?}, want {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn cubic_single_root() {
        let r = solve_depressed_cubic(DepressedCubic::new(0.0, -1.0), 1e-12).unwrap();
        assert_roots(&r, &[1.0], 1e-12);
        let r = solve_depressed_cubic(DepressedCubic::new(1.0, -2.0), 1e-12).unwrap();
        assert_roots(&r, &[1.0], 1e-12);
    }

    #[test]
    fn cubic_three_roots() {
        let r = solve_depressed_cubic(DepressedCubic::new(-1.0, 0.0), 1e-12).unwrap();
        assert_roots(&r, &[-1.0, 0.0, 1.0], 1e-12);
        // roots are -phi, phi - 1, 1 for w^3 - 2w + 1
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let r = solve_depressed_cubic(DepressedCubic::new(-2.0, 1.0), 1e-12).unwrap();
        assert_roots(&r, &[-phi, phi - 1.0, 1.0], 1e-12);
    }

    #[test]
    fn cubic_one_root_branch_values() {
        let r = solve_depressed_cubic(DepressedCubic::new(0.5, 0.25), 1e-12).unwrap();
        assert_roots(&r, &[-0.385458498529624], 1e-12);
    }

    #[test]
    fn cubic_boundary_discriminant_takes_single_branch() {
        // f^2 == d^3 exactly: the single-root branch fires and returns the
        // simple root, not the double root
        let r = solve_depressed_cubic(DepressedCubic::new(-0.75, 0.25), 1e-12).unwrap();
        assert_roots(&r, &[-1.0], 1e-9);
    }

    #[test]
    fn cubic_branch_matches_root_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let p: f64 = rng.gen_range(-4.0..4.0);
            let q: f64 = rng.gen_range(-4.0..4.0);
            let c = DepressedCubic::new(p, q);
            let roots = solve_depressed_cubic(c, 1e-9).unwrap();
            let scale = 1.0_f64.max(p.abs()).max(q.abs());
            for &w in &roots {
                assert!(c.eval(w).abs() <= 1e-9 * scale, "residual at {w} for p={p}, q={q}");
            }
            // fallback count check through the quartic machinery: multiply by
            // an extra far-away factor (w - 10) to make it a quartic
            let qp = QuarticPoly::new(1.0, -10.0, p, q - 10.0 * p, -10.0 * q);
            let quartic_roots = numeric_quartic_fallback(&qp).unwrap();
            let cubic_roots_of_quartic: Vec<f64> =
                quartic_roots.into_iter().filter(|x| (x - 10.0).abs() > 1e-3).collect();
            let im = cubic_intermediates(c);
            // skip near-boundary discriminants where branch choice is knife-edge
            let d3 = im.d * im.d * im.d;
            if (im.f * im.f - d3).abs() > 1e-6 * (1.0 + d3.abs()) {
                assert_eq!(
                    roots.len(),
                    cubic_roots_of_quartic.len(),
                    "branch mismatch at p={p}, q={q}"
                );
            }
        }
    }

    #[test]
    fn quartic_biquadratic() {
        let qp = QuarticPoly::new(1.0, 0.0, -5.0, 0.0, 4.0);
        let r = solve_quartic(&qp, 1e-9).unwrap();
        assert_roots(&r, &[-2.0, -1.0, 1.0, 2.0], 1e-10);
    }

    #[test]
    fn quartic_distinct_integer_roots() {
        let qp = QuarticPoly::new(1.0, -10.0, 35.0, -50.0, 24.0);
        let r = solve_quartic(&qp, 1e-9).unwrap();
        assert_roots(&r, &[1.0, 2.0, 3.0, 4.0], 1e-9);
        let qp = QuarticPoly::new(2.0, -4.0, -22.0, 24.0, 0.0);
        let r = solve_quartic(&qp, 1e-9).unwrap();
        assert_roots(&r, &[-3.0, 0.0, 1.0, 4.0], 1e-9);
    }

    #[test]
    fn quartic_no_real_roots() {
        let qp = QuarticPoly::new(1.0, 0.0, 1.0, 0.0, 1.0);
        assert!(solve_quartic(&qp, 1e-9).unwrap().is_empty());
        assert!(numeric_quartic_fallback(&qp).unwrap().is_empty());
    }

    #[test]
    fn quartic_double_root_case() {
        // double root at -1 plus simple roots 4/15 and 2/5
        let qp = QuarticPoly::new(9.0, 12.0, -2.04, -4.08, 0.96);
        let r = solve_quartic(&qp, 1e-7).unwrap();
        assert_roots(&r, &[-1.0, 4.0 / 15.0, 0.4], 1e-6);
    }

    #[test]
    fn quartic_quadruple_root() {
        let qp = QuarticPoly::new(1.0, 4.0, 6.0, 4.0, 1.0);
        let r = solve_quartic(&qp, 1e-7).unwrap();
        assert!(!r.is_empty());
        for x in r {
            assert!((x + 1.0).abs() <= 2e-4, "root {x} too far from -1");
        }
    }

    #[test]
    fn fallback_examples() {
        let qp = QuarticPoly::new(1.0, 0.0, -5.0, 0.0, 4.0);
        let r = numeric_quartic_fallback(&qp).unwrap();
        assert_roots(&r, &[-2.0, -1.0, 1.0, 2.0], 1e-10);
        let qp = QuarticPoly::new(3.0, 0.0, 0.0, 0.0, -48.0);
        let r = numeric_quartic_fallback(&qp).unwrap();
        assert_roots(&r, &[-2.0, 2.0], 1e-10);
    }

    #[test]
    fn polish_improves_or_keeps() {
        let qp = QuarticPoly::new(1.0, 0.0, -5.0, 0.0, 4.0);
        assert!((polish_root(&qp, 1.001, POLISH_MAX_ITERS) - 1.0).abs() <= 1e-12);
        assert_eq!(polish_root(&qp, 1.0, POLISH_MAX_ITERS), 1.0);
        // stationary start: derivative zero, returns input
        let x0 = (2.5_f64).sqrt();
        assert_eq!(polish_root(&qp, x0, POLISH_MAX_ITERS), x0);
    }

    #[test]
    fn plant_and_recover() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            // quantized well-separated roots to stay off multiple-root cliffs
            let mut planted = [0.0_f64; 4];
            'draw: loop {
                for r in &mut planted {
                    *r = -2.0 + 0.125 * rng.gen_range(0..33) as f64;
                }
                for i in 0..4 {
                    for j in 0..i {
                        if (planted[i] - planted[j]).abs() < 0.1 {
                            continue 'draw;
                        }
                    }
                }
                break;
            }
            let c4 = rng.gen_range(0.5..2.0);
            let [r1, r2, r3, r4] = planted;
            let qp = QuarticPoly::new(
                c4,
                -c4 * (r1 + r2 + r3 + r4),
                c4 * (r1 * r2 + r1 * r3 + r1 * r4 + r2 * r3 + r2 * r4 + r3 * r4),
                -c4 * (r1 * r2 * r3 + r1 * r2 * r4 + r1 * r3 * r4 + r2 * r3 * r4),
                c4 * r1 * r2 * r3 * r4,
            );
            let mut want = planted.to_vec();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let closed = solve_quartic(&qp, 1e-8).unwrap();
            assert_roots(&closed, &want, 1e-8);
            let numeric = numeric_quartic_fallback(&qp).unwrap();
            assert_roots(&numeric, &want, 1e-8);
        }
    }

    #[test]
    fn closed_and_fallback_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let qp = QuarticPoly::new(
                loop {
                    let c: f64 = rng.gen_range(-10.0..10.0);
                    if c.abs() >= 0.1 {
                        break c;
                    }
                },
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
            );
            let a = solve_quartic(&qp, 1e-8).unwrap();
            let b = numeric_quartic_fallback(&qp).unwrap();
            assert!(hausdorff(&a, &b) <= 1e-7, "{qp:?}: closed {a:?} vs numeric {b:?}");
        }
    }

    #[test]
    fn reconstruction_from_four_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        // only ~4.4% of draws from this box have four real roots
        for _ in 0..6000 {
            let qp = QuarticPoly::new(
                rng.gen_range(0.5..3.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            );
            let roots = solve_quartic(&qp, 1e-8).unwrap();
            if roots.len() != 4 {
                continue;
            }
            checked += 1;
            let [r1, r2, r3, r4] = [roots[0], roots[1], roots[2], roots[3]];
            let monic = [
                1.0,
                -(r1 + r2 + r3 + r4),
                r1 * r2 + r1 * r3 + r1 * r4 + r2 * r3 + r2 * r4 + r3 * r4,
                -(r1 * r2 * r3 + r1 * r2 * r4 + r1 * r3 * r4 + r2 * r3 * r4),
                r1 * r2 * r3 * r4,
            ];
            let want = [
                1.0,
                qp.c3 / qp.c4,
                qp.c2 / qp.c4,
                qp.c1 / qp.c4,
                qp.c0 / qp.c4,
            ];
            for (m, w) in monic.iter().zip(&want) {
                assert!((m - w).abs() <= 1e-6 * (1.0 + w.abs()), "{qp:?}");
            }
        }
        assert!(checked > 100, "too few 4-root samples: {checked}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_quartic(&QuarticPoly::new(0.0, 1.0, 1.0, 1.0, 1.0), 1e-9).is_err());
        assert!(solve_quartic(&QuarticPoly::new(f64::NAN, 1.0, 1.0, 1.0, 1.0), 1e-9).is_err());
        assert!(solve_depressed_cubic(DepressedCubic::new(f64::INFINITY, 0.0), 1e-9).is_err());
    }

    fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
        if a.is_empty() && b.is_empty() {
            return 0.0;
        }
        if a.is_empty() || b.is_empty() {
            return f64::INFINITY;
        }
        let one_way = |from: &[f64], to: &[f64]| {
            from.iter()
                .map(|x| to.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        one_way(a, b).max(one_way(b, a))
    }
}
