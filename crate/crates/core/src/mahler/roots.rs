//! Simultaneous (Aberth) root finding on the sparse form, with Newton-polygon
//! starting circles and companion-matrix eigenvalues as a restart.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{MeasureDetail, MeasureResult, Method};
use crate::error::{Error, Result};
use crate::sparse_poly::{ComplexCoeff, SparseUniPoly};

const MAX_ABERTH_ITERATIONS: usize = 400;
/// Companion restarts are only attempted up to this degree (cubic cost).
const COMPANION_RESTART_DEGREE: usize = 512;
/// Acceptance bound on the backward error `|p(z)| / sum |c_n| |z|^{m_n}`.
const RESIDUAL_BOUND: f64 = 1e-10;
/// Two roots are merged when they are closer than this multiple of the sum of
/// their Newton error radii.
const CLUSTER_FACTOR: f64 = 10.0;
/// A merged `k`-cluster is kept only if its members lie within
/// `CLUSTER_REACH + k / 20` times the scatter that rounding alone would
/// produce around a `k`-fold zero; otherwise its members stay separate roots.
const CLUSTER_REACH: f64 = 1.5;

/// All roots of the normalized polynomial with the leading coefficient.
/// Multiple roots appear once per multiplicity (as the cluster centroid).
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<ComplexCoeff>,
    pub leading_coeff: ComplexCoeff,
    pub degree: usize,
    /// Error radius of each reported root.
    pub uncertainty: Vec<f64>,
    /// Backward error of each reported root.
    pub residuals: Vec<f64>,
    /// Number of merged clusters of size at least two.
    pub clusters: usize,
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Evaluates `p`, `p'` and the absolute-value scale at a point, switching to
/// the reversed polynomial outside the unit disc. For `|z| > 1` all three
/// values are divided by `z^d`.
pub(super) struct Evaluator {
    forward: Vec<(u64, Complex64)>,
    reversed: Vec<(u64, Complex64)>,
    degree: u64,
}

pub(super) struct Evaluation {
    pub(super) value: Complex64,
    pub(super) slope: Complex64,
    pub(super) scale: f64,
}

impl Evaluation {
    fn relative_residual(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.value.norm() / self.scale
        }
    }
}

fn cpow(mut base: Complex64, mut exp: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

fn horner(terms: &[(u64, Complex64)], z: Complex64) -> Evaluation {
    let n = terms.len();
    let az = z.norm();
    let mut b = terms[n - 1].1;
    let mut db = Complex64::new(0.0, 0.0);
    let mut s = b.norm();
    for k in (0..n - 1).rev() {
        let delta = terms[k + 1].0 - terms[k].0;
        let zp1 = cpow(z, delta - 1);
        let zp = zp1 * z;
        db = db * zp + b * (delta as f64) * zp1;
        b = b * zp + terms[k].1;
        s = s * az.powf(delta as f64) + terms[k].1.norm();
    }
    // the lowest exponent is zero in both orientations
    Evaluation { value: b, slope: db, scale: s }
}

impl Evaluator {
    pub(super) fn new(p: &SparseUniPoly) -> Self {
        let q = p.normalize();
        let degree = q.max_exponent();
        Self {
            forward: q.terms().to_vec(),
            reversed: q.reverse().terms().to_vec(),
            degree,
        }
    }

    pub(super) fn eval(&self, z: Complex64) -> Evaluation {
        if z.norm() <= 1.0 {
            horner(&self.forward, z)
        } else {
            let w = z.inv();
            let e = horner(&self.reversed, w);
            // p'(z) / z^d = w (d q(w) - w q'(w))
            let slope = w * (e.value * self.degree as f64 - w * e.slope);
            Evaluation { value: e.value, slope, scale: e.scale }
        }
    }
}

/// Starting points on the circles given by the upper convex hull of
/// `(m_n, log |c_n|)`.
fn newton_polygon_start(terms: &[(u64, Complex64)], degree: u64) -> Vec<Complex64> {
    let pts: Vec<(f64, f64)> = terms
        .iter()
        .map(|&(m, c)| (m as f64, c.norm().ln()))
        .collect();
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        while hull.len() >= 2 {
            let a = pts[hull[hull.len() - 2]];
            let b = pts[hull[hull.len() - 1]];
            let c = pts[i];
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut start = Vec::with_capacity(degree as usize);
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let count = terms[j].0 - terms[i].0;
        let radius = ((pts[i].1 - pts[j].1) / count as f64).exp();
        let offset = TAU * terms[i].0 as f64 / degree as f64 + 0.7;
        for l in 0..count {
            let angle = TAU * l as f64 / count as f64 + offset;
            start.push(Complex64::from_polar(radius, angle));
        }
    }
    start
}

fn companion_start(terms: &[(u64, Complex64)], degree: usize) -> Option<Vec<Complex64>> {
    let lead = terms[terms.len() - 1].1;
    let mut m = DMatrix::<Complex64>::zeros(degree, degree);
    for i in 1..degree {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for &(e, c) in &terms[..terms.len() - 1] {
        m[(e as usize, degree - 1)] = -c / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-14, 10_000)?;
    let (_, t) = schur.unpack();
    Some((0..degree).map(|i| t[(i, i)]).collect())
}

/// Runs Jacobi-style Aberth iterations from `z`; returns whether every root
/// reached the backward-error floor.
fn aberth(eval: &Evaluator, z: &mut [Complex64], floor: f64) -> bool {
    let d = z.len();
    let mut active = vec![true; d];
    for _ in 0..MAX_ABERTH_ITERATIONS {
        let mut updates = Vec::new();
        for i in 0..d {
            if !active[i] {
                continue;
            }
            let e = eval.eval(z[i]);
            if e.relative_residual() <= floor {
                updates.push((i, None));
                continue;
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let diff = z[i] - zj;
                    if diff.norm() > 0.0 {
                        repulsion += diff.inv();
                    }
                }
            }
            let step = (e.slope / e.value - repulsion).inv();
            updates.push((i, Some(step)));
        }
        if updates.is_empty() {
            return true;
        }
        for (i, step) in updates {
            match step {
                None => active[i] = false,
                Some(w) if w.is_finite() => {
                    z[i] -= w;
                    if w.norm() <= 4.0 * f64::EPSILON * z[i].norm() {
                        active[i] = false;
                    }
                }
                Some(_) => {}
            }
        }
        if active.iter().all(|a| !a) {
            return true;
        }
    }
    false
}

/// Refines the center of a `k`-fold cluster as the nearby simple root of
/// `p^{(k-1)}`. Returns the center and its Newton error radius.
fn refine_cluster_center(
    q: &SparseUniPoly,
    k: usize,
    start: Complex64,
    spread: f64,
    floor: f64,
) -> (Complex64, f64) {
    let mut d = q.clone();
    for _ in 1..k {
        match d.derivative() {
            Ok(next) => d = next,
            Err(_) => return (start, spread),
        }
    }
    if d.sparsity() == 0 && d.min_exponent() == 0 {
        return (start, spread);
    }
    let eval = Evaluator::new(&d);
    let mut z = start;
    let mut best = eval.eval(z).relative_residual();
    for _ in 0..60 {
        let e = eval.eval(z);
        if e.slope.norm() == 0.0 || e.value.norm() == 0.0 {
            break;
        }
        let candidate = z - e.value / e.slope;
        let res = eval.eval(candidate).relative_residual();
        if !(res < best) || (candidate - start).norm() > 2.0 * spread + f64::EPSILON {
            break;
        }
        z = candidate;
        best = res;
    }
    let e = eval.eval(z);
    let radius = if e.slope.norm() > 0.0 {
        e.value.norm().max(floor * e.scale) / e.slope.norm()
    } else {
        spread
    };
    (z, radius.min(spread.max(f64::EPSILON * z.norm())))
}

/// Radius within which rounding noise at `center` scatters the roots of a
/// `k`-fold zero: `(noise / |p^{(k)}(center) / k!|)^{1/k}`.
fn rounding_cluster_radius(
    q: &SparseUniPoly,
    eval: &Evaluator,
    k: usize,
    center: Complex64,
    floor: f64,
) -> f64 {
    let noise = floor * eval.eval(center).scale;
    let mut d = q.clone();
    let mut factorial = 1.0;
    for j in 1..=k {
        match d.derivative() {
            Ok(next) => d = next,
            Err(_) => return f64::INFINITY,
        }
        factorial *= j as f64;
    }
    let taylor = d.terms().iter().map(|&(m, c)| c * cpow(center, m)).sum::<Complex64>().norm() / factorial;
    if taylor == 0.0 {
        return f64::INFINITY;
    }
    (noise / taylor).powf(1.0 / k as f64)
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut i = i;
    while parent[i] != r {
        let next = parent[i];
        parent[i] = r;
        i = next;
    }
    r
}

/// Finds every root of `normalize(p)`.
///
/// Fails with [`Error::DegreeCapExceeded`] when the normalized degree is above
/// `degree_cap`, and with [`Error::ConvergenceFailure`] when some root cannot be
/// brought below a backward error of `1e-10`.
pub fn find_roots(p: &SparseUniPoly, degree_cap: u64) -> Result<RootSet> {
    let q = p.normalize();
    let degree = q.max_exponent();
    if degree > degree_cap {
        return Err(Error::DegreeCapExceeded { degree, cap: degree_cap });
    }
    let lead = q.leading_coeff();
    if degree == 0 {
        return Ok(RootSet {
            roots: vec![],
            leading_coeff: lead,
            degree: 0,
            uncertainty: vec![],
            residuals: vec![],
            clusters: 0,
        });
    }
    let eval = Evaluator::new(&q);
    let d = degree as usize;
    let floor = 2.0 * f64::EPSILON * q.terms().len() as f64;

    let mut z = newton_polygon_start(q.terms(), degree);
    let converged = aberth(&eval, &mut z, floor);
    let worst = |z: &[Complex64]| {
        z.iter()
            .map(|&r| eval.eval(r).relative_residual())
            .fold(0.0, f64::max)
    };
    if !converged && worst(&z) > RESIDUAL_BOUND && d <= COMPANION_RESTART_DEGREE {
        if let Some(mut restart) = companion_start(q.terms(), d) {
            aberth(&eval, &mut restart, floor);
            if worst(&restart) < worst(&z) {
                z = restart;
            }
        }
    }

    // one Newton polishing step, kept only when it lowers the residual
    for r in z.iter_mut() {
        let e = eval.eval(*r);
        if e.value.norm() == 0.0 || e.slope.norm() == 0.0 {
            continue;
        }
        let candidate = *r - e.value / e.slope;
        if eval.eval(candidate).relative_residual() < e.relative_residual() {
            *r = candidate;
        }
    }

    let residual = worst(&z);
    if !(residual <= RESIDUAL_BOUND) {
        return Err(Error::ConvergenceFailure { residual });
    }

    // Newton error radius with the residual floored at rounding level
    let radius: Vec<f64> = z
        .iter()
        .map(|&r| {
            let e = eval.eval(r);
            let noise = e.value.norm().max(floor * e.scale);
            let slope = e.slope.norm();
            if slope > 0.0 {
                noise / slope
            } else {
                f64::INFINITY
            }
        })
        .collect();

    let mut parent: Vec<usize> = (0..d).collect();
    for i in 0..d {
        for j in (i + 1)..d {
            if (z[i] - z[j]).norm() <= CLUSTER_FACTOR * (radius[i] + radius[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..d {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }

    let mut roots = Vec::with_capacity(d);
    let mut uncertainty = Vec::with_capacity(d);
    let mut residuals = Vec::with_capacity(d);
    let mut clusters = 0;
    for members in groups.values() {
        let k = members.len();
        let merged = if k == 1 {
            None
        } else {
            let mean = members.iter().map(|&i| z[i]).sum::<Complex64>() / k as f64;
            let spread = members
                .iter()
                .map(|&i| (z[i] - mean).norm())
                .fold(0.0, f64::max);
            let (center, u) = refine_cluster_center(&q, k, mean, spread, floor);
            let reach = members
                .iter()
                .map(|&i| (z[i] - center).norm())
                .fold(0.0, f64::max);
            let explained = rounding_cluster_radius(&q, &eval, k, center, floor);
            (reach <= (CLUSTER_REACH + k as f64 / 20.0) * explained).then_some((center, u))
        };
        match merged {
            Some((center, u)) => {
                clusters += 1;
                let res = eval.eval(center).relative_residual();
                for _ in 0..k {
                    roots.push(center);
                    uncertainty.push(u);
                    residuals.push(res);
                }
            }
            None => {
                for &i in members {
                    roots.push(z[i]);
                    uncertainty.push(radius[i]);
                    residuals.push(eval.eval(z[i]).relative_residual());
                }
            }
        }
    }

    Ok(RootSet {
        roots,
        leading_coeff: lead,
        degree: d,
        uncertainty,
        residuals,
        clusters,
    })
}

/// `|c_N| prod max(1, |alpha_n|)`, accumulated in log space.
pub fn mahler_roots(p: &SparseUniPoly, degree_cap: u64) -> Result<MeasureResult> {
    let set = find_roots(p, degree_cap)?;
    let mut log_value = set.leading_coeff.norm().ln();
    let mut log_error = 0.0;
    for (root, &u) in set.roots.iter().zip(&set.uncertainty) {
        let modulus = root.norm();
        log_value += modulus.ln().max(0.0);
        if modulus + u > 1.0 {
            log_error += (u / modulus).min(1.0);
        }
    }
    let value = log_value.exp();
    Ok(MeasureResult {
        value,
        log_value,
        method: Method::RootProduct,
        error_estimate: value * log_error.exp_m1(),
        detail: MeasureDetail::Roots {
            root_count: set.degree,
            clusters: set.clusters,
            max_residual: set.max_residual(),
        },
    })
}
