//! Uniform-grid averaging of `log |p(e(t))|` with grid doubling.
//!
//! The polynomial is first deflated (`z^g -> z` for the gcd `g` of the
//! exponent gaps) and the grid always exceeds twice the deflated degree, so the
//! samples never alias the polynomial itself. Samples where `|p|` falls below
//! `1e-13` times the coefficient scale are replaced by a refined local value:
//! the mean of `log |p|` at `t +- h/4`, plus `s log(2/pi)` where the local zero
//! order `s` is read off the ratio between the `h/4` and `h/8` sub-samples.
//! That is the punctured-trapezoid correction for an `s`-fold logarithmic
//! singularity sitting on a grid node.
//!
//! On `G` nodes the average of `log |p|` exceeds `log M(p)` by exactly
//! `(1/G) sum log |1 - beta^G|` over the roots, with `beta` the root or its
//! reciprocal, whichever lies in the closed disc. Roots within a few hundred
//! grid spacings of the circle make this decay only like `1/G`. When doubling
//! stalls, those roots are located by Newton iteration from the local minima of
//! `|p|` on the grid and their terms are subtracted from every level.
//!
//! Nested power-of-two grids all alias the Fourier modes of `log |p|` at
//! multiples of the largest grid identically, which sparse exponents can hit
//! exactly; acceptance therefore also requires agreement with a `3G/4` grid.

use std::f64::consts::{FRAC_2_PI, LN_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use super::roots::Evaluator;
use super::{MeasureDetail, MeasureResult, Method};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::sparse_poly::{rational_character, SparseUniPoly};

/// Largest grid used before giving up.
pub const MAX_CIRCLE_GRID: u64 = 1 << 22;
const NEAR_ZERO: f64 = 1e-13;
/// Samples per block; phases are recomputed exactly at every block start.
const BLOCK: u64 = 256;
/// Root location starts once the grid holds this many nodes per unit of degree.
const LOCATE_OVERSAMPLING: u64 = 8;
/// Roots closer to the circle than this many grid spacings are located.
const NEAR_ROOT_SPACINGS: f64 = 128.0;
const NEWTON_STEPS: usize = 60;

struct CircleSampler<'a> {
    poly: &'a SparseUniPoly,
    threshold: f64,
}

struct LevelSum {
    sum: f64,
    singular: Vec<u64>,
}

impl CircleSampler<'_> {
    /// Values at `j = first + (start + i) * stride` for `i < len`.
    fn block_values(&self, grid: u64, first: u64, stride: u64, start: u64, len: usize) -> Vec<Complex64> {
        let mut values = vec![Complex64::new(0.0, 0.0); len];
        let j0 = first + start * stride;
        for &(m, c) in self.poly.terms() {
            let m = m % grid;
            let mut w = c * rational_character(((m as u128 * j0 as u128) % grid as u128) as u64, grid);
            let step = rational_character(((m as u128 * stride as u128) % grid as u128) as u64, grid);
            for v in values.iter_mut() {
                *v += w;
                w *= step;
            }
        }
        values
    }

    /// Sums `log |p(e(j / grid))|` over `j = first, first + stride, ...` below
    /// `grid`, collecting the indices of near-zero samples.
    fn sweep(&self, grid: u64, first: u64, stride: u64) -> LevelSum {
        let count = (grid - first).div_ceil(stride);
        let blocks = count.div_ceil(BLOCK);
        let partial: Vec<(f64, Vec<u64>)> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * BLOCK;
                let len = BLOCK.min(count - start) as usize;
                let mut sum = 0.0;
                let mut singular = Vec::new();
                for (i, v) in self.block_values(grid, first, stride, start, len).iter().enumerate() {
                    let modulus = v.norm();
                    if modulus < self.threshold {
                        singular.push(first + (start + i as u64) * stride);
                    } else {
                        sum += modulus.ln();
                    }
                }
                (sum, singular)
            })
            .collect();
        let mut total = NeumaierSum::default();
        let mut singular = Vec::new();
        for (s, mut z) in partial {
            total.add(s);
            singular.append(&mut z);
        }
        LevelSum { sum: total.value(), singular }
    }

    fn log_abs(&self, t: f64) -> f64 {
        self.poly.evaluate(t).norm().max(f64::MIN_POSITIVE).ln()
    }

    /// Replacement value for a near-zero sample at `t = j / grid`.
    fn singular_value(&self, j: u64, grid: u64) -> f64 {
        let t = j as f64 / grid as f64;
        let h = 1.0 / grid as f64;
        let quarter = 0.5 * (self.log_abs(t + 0.25 * h) + self.log_abs(t - 0.25 * h));
        let eighth = 0.5 * (self.log_abs(t + 0.125 * h) + self.log_abs(t - 0.125 * h));
        let order = ((quarter - eighth) / LN_2).round().max(0.0);
        quarter + order * FRAC_2_PI.ln()
    }

    /// Average of `log |p|` over a single grid, singular samples included.
    fn single_level(&self, grid: u64) -> f64 {
        let level = self.sweep(grid, 0, 1);
        let mut acc = NeumaierSum::default();
        acc.add(level.sum);
        for &j in &level.singular {
            acc.add(self.singular_value(j, grid));
        }
        acc.value() / grid as f64
    }

    /// Roots within `NEAR_ROOT_SPACINGS / grid` of the circle, found by Newton
    /// iteration from every local minimum of `|p|` on the grid.
    fn locate_near_roots(&self, grid: u64) -> Vec<Complex64> {
        let moduli: Vec<f64> = (0..grid.div_ceil(BLOCK))
            .into_par_iter()
            .flat_map_iter(|b| {
                let start = b * BLOCK;
                let len = BLOCK.min(grid - start) as usize;
                self.block_values(grid, 0, 1, start, len).into_iter().map(|v| v.norm())
            })
            .collect();
        let n = moduli.len();
        let minima: Vec<usize> = (0..n)
            .filter(|&j| moduli[j] < moduli[(j + n - 1) % n] && moduli[j] <= moduli[(j + 1) % n])
            .collect();
        let eval = Evaluator::new(self.poly);
        let reach = NEAR_ROOT_SPACINGS / grid as f64;
        let mut found: Vec<Complex64> = minima
            .par_iter()
            .filter_map(|&j| {
                let node = rational_character(j as u64, grid);
                let mut z = node;
                for _ in 0..NEWTON_STEPS {
                    let e = eval.eval(z);
                    if e.value.norm() == 0.0 {
                        break;
                    }
                    let step = e.value / e.slope;
                    if !step.is_finite() {
                        return None;
                    }
                    z -= step;
                    if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
                        break;
                    }
                }
                let near = (z.norm() - 1.0).abs() < reach;
                let local = (z / z.norm() - node).norm() < 8.0 * TAU / grid as f64;
                (near && local).then_some(z)
            })
            .collect();
        found.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        found.dedup_by(|a, b| (*a - *b).norm() < 1e-10);
        found
    }
}

/// `(1/G) sum log |1 - beta^G|`: the excess of the `G`-node average over the
/// integral contributed by the given roots.
fn trapezoid_defect(roots: &[Complex64], grid: u64) -> f64 {
    let mut acc = NeumaierSum::default();
    for &r in roots {
        let beta = if r.norm() > 1.0 { r.inv() } else { r };
        let power = beta.powu(grid as u32);
        acc.add((Complex64::new(1.0, 0.0) - power).norm().max(f64::MIN_POSITIVE).ln());
    }
    acc.value() / grid as f64
}

/// Approximates `exp(int_0^1 log |p(e(t))| dt)` on grids `G, 2G, 4G, ...`
/// starting from `max(grid_start, 2 * deflated degree)`, stopping once two
/// consecutive inter-grid differences both fall below `tol` and a grid of
/// `3G/4` nodes, which is not nested in the others, agrees to within `tol`.
///
/// Fails with [`Error::NonConvergence`] if the grid reaches [`MAX_CIRCLE_GRID`]
/// with a last difference above `10 * tol`.
pub fn mahler_quadrature(p: &SparseUniPoly, grid_start: u64, tol: f64) -> Result<MeasureResult> {
    if !(grid_start >= 64 && grid_start.is_power_of_two()) {
        return Err(Error::InvalidArgument(
            "grid_start must be a power of two >= 64".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    if p.sparsity() == 0 {
        return Ok(MeasureResult::exact(p.leading_coeff().norm(), Method::CircleQuadrature));
    }
    let q = p.deflate_exponents();
    let degree = q.max_exponent();
    let alias_free = (2 * degree + 2).next_power_of_two();
    if alias_free > MAX_CIRCLE_GRID {
        return Err(Error::DegreeCapExceeded {
            degree,
            cap: MAX_CIRCLE_GRID / 2 - 1,
        });
    }
    let sampler = CircleSampler {
        poly: &q,
        threshold: NEAR_ZERO * q.coeff_scale(),
    };
    let locate_from = (LOCATE_OVERSAMPLING * alias_free).min(MAX_CIRCLE_GRID);

    let mut grid = grid_start.max(alias_free);
    let first = sampler.sweep(grid, 0, 1);
    let mut regular = first.sum;
    let mut singular = first.singular;
    let estimate = |grid: u64, regular: f64, singular: &[u64]| {
        let mut acc = NeumaierSum::default();
        acc.add(regular);
        for &j in singular {
            acc.add(sampler.singular_value(j, grid));
        }
        acc.value() / grid as f64
    };
    let mut raw = vec![(grid, estimate(grid, regular, &singular))];
    let mut located: Option<Vec<Complex64>> = None;
    loop {
        let finer = grid * 2;
        let odd = sampler.sweep(finer, 1, 2);
        regular += odd.sum;
        singular = singular.iter().map(|j| 2 * j).chain(odd.singular).collect();
        singular.sort_unstable();
        raw.push((finer, estimate(finer, regular, &singular)));
        grid = finer;

        let corrected = |roots: &[Complex64]| -> Vec<f64> {
            raw.iter().map(|&(g, v)| v - trapezoid_defect(roots, g)).collect()
        };
        let mut values = corrected(located.as_deref().unwrap_or(&[]));
        let last_difference = |v: &[f64]| (v[v.len() - 1] - v[v.len() - 2]).abs();
        if located.is_none() && grid >= locate_from && singular.is_empty() && last_difference(&values) >= tol {
            let roots = sampler.locate_near_roots(grid);
            values = corrected(&roots);
            located = Some(roots);
        }
        let n = values.len();
        let difference = last_difference(&values);
        let spread = if n >= 3 {
            difference.max((values[n - 2] - values[n - 3]).abs())
        } else {
            f64::INFINITY
        };
        let at_cap = grid >= MAX_CIRCLE_GRID;
        if spread < tol || at_cap {
            let current = values[n - 1];
            let roots = located.as_deref().unwrap_or(&[]);
            let cross = (sampler.single_level(3 * grid / 4) - trapezoid_defect(roots, 3 * grid / 4) - current).abs();
            if spread < tol && cross < tol || at_cap {
                if at_cap && difference.max(cross) > 10.0 * tol {
                    return Err(Error::NonConvergence { grid, difference: difference.max(cross) });
                }
                let error = cross.max(if spread.is_finite() { spread } else { difference });
                return Ok(MeasureResult::from_log(
                    current,
                    Method::CircleQuadrature,
                    current.exp() * error.exp_m1(),
                    MeasureDetail::Grid {
                        grid,
                        levels: n,
                        singular_samples: singular.len(),
                        located_roots: roots.len(),
                    },
                ));
            }
        }
    }
}
