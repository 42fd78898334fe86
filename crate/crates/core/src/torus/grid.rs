//! Tensor-grid average of `log |F|` over the torus for `M <= 3`.
//!
//! Samples sit at `j / G`, so every phase `k . j / G` is an exact residue
//! mod `G` looked up in a root-of-unity table. Levels double `G`; a final
//! level at `3G/4` guards against Fourier modes at multiples of a large power
//! of two, which every nested level aliases identically.
//! Near-zero samples are replaced by a one-dimensional refinement along the
//! first axis on which the neighbouring samples are regular, using the same
//! correction as the circle engine.

use std::f64::consts::{FRAC_2_PI, LN_2};

use num_complex::Complex64;
use rayon::prelude::*;

use super::TorusPoly;
use crate::error::{Error, Result};
use crate::mahler::{mahler_quadrature, MeasureDetail, MeasureResult, Method};
use crate::numeric::NeumaierSum;
use crate::sparse_poly::rational_character;

pub const MAX_TORUS_DIM: usize = 3;
/// Largest number of samples on a single grid level.
pub const MAX_TORUS_POINTS: u64 = 1 << 26;
const NEAR_ZERO: f64 = 1e-13;

struct Level {
    mean: f64,
    singular: usize,
}

struct Sampler<'a> {
    f: &'a TorusPoly,
    threshold: f64,
}

impl Sampler<'_> {
    fn log_abs(&self, x: &[f64]) -> f64 {
        self.f.eval_torus(x).map(|v| v.norm()).unwrap_or(0.0).max(f64::MIN_POSITIVE).ln()
    }

    fn refined(&self, node: &[u64], grid: u64) -> f64 {
        let h = 1.0 / grid as f64;
        let base: Vec<f64> = node.iter().map(|&j| j as f64 * h).collect();
        let shifted = |axis: usize, delta: f64| {
            let mut x = base.clone();
            x[axis] += delta;
            x
        };
        let pair = |axis: usize, delta: f64| {
            0.5 * (self.log_abs(&shifted(axis, delta)) + self.log_abs(&shifted(axis, -delta)))
        };
        let floor = self.threshold.ln();
        for axis in 0..base.len() {
            let left = self.log_abs(&shifted(axis, -0.25 * h));
            let right = self.log_abs(&shifted(axis, 0.25 * h));
            if left.min(right) > floor {
                let quarter = 0.5 * (left + right);
                let eighth = pair(axis, 0.125 * h);
                let order = ((quarter - eighth) / LN_2).round().max(0.0);
                return quarter + order * FRAC_2_PI.ln();
            }
        }
        // Zero along every axis direction: fall back to the diagonal neighbours.
        let diag: Vec<f64> = base.iter().map(|x| x + 0.25 * h).collect();
        self.log_abs(&diag)
    }

    fn level(&self, grid: u64) -> Level {
        let dim = self.f.dim();
        let table: Vec<Complex64> = (0..grid).map(|r| rational_character(r, grid)).collect();
        let residues: Vec<[u64; 3]> = self
            .f
            .terms()
            .iter()
            .map(|(k, _)| {
                let mut r = [0u64; 3];
                for (slot, &c) in r.iter_mut().zip(k.coords()) {
                    *slot = (c as i128).rem_euclid(grid as i128) as u64;
                }
                r
            })
            .collect();
        let coeffs: Vec<Complex64> = self.f.terms().iter().map(|(_, c)| *c).collect();
        let inner = if dim == 3 { grid } else { 1 };

        let rows: Vec<(f64, Vec<[u64; 3]>)> = (0..grid)
            .into_par_iter()
            .map(|j0| {
                let mut sum = NeumaierSum::default();
                let mut singular = Vec::new();
                let mut cur = vec![0u64; coeffs.len()];
                for j2 in 0..inner {
                    for (c, r) in cur.iter_mut().zip(&residues) {
                        *c = (r[0] * j0 + r[2] * j2) % grid;
                    }
                    for j1 in 0..grid {
                        let mut v = Complex64::new(0.0, 0.0);
                        for ((c, r), coeff) in cur.iter_mut().zip(&residues).zip(&coeffs) {
                            v += coeff * table[*c as usize];
                            *c += r[1];
                            if *c >= grid {
                                *c -= grid;
                            }
                        }
                        let modulus = v.norm();
                        if modulus < self.threshold {
                            singular.push([j0, j1, j2]);
                        } else {
                            sum.add(modulus.ln());
                        }
                    }
                }
                (sum.value(), singular)
            })
            .collect();

        let mut total = NeumaierSum::default();
        let mut singular_count = 0;
        for (s, nodes) in rows {
            total.add(s);
            for node in nodes {
                singular_count += 1;
                total.add(self.refined(&node[..dim], grid));
            }
        }
        Level {
            mean: total.value() / grid.pow(dim as u32) as f64,
            singular: singular_count,
        }
    }
}

/// Approximates `exp(int log |F| dx)` on tensor grids `G^M, (2G)^M, ...`
/// until two consecutive differences of the log-averages both fall below
/// `tol`; a single small difference can be a coincidence of two coarse grids.
pub fn mahler_torus_grid(f: &TorusPoly, grid_start: u64, tol: f64) -> Result<MeasureResult> {
    let dim = f.dim();
    if dim > MAX_TORUS_DIM {
        return Err(Error::DimensionTooLarge(dim));
    }
    if !(grid_start >= 2 && grid_start.is_power_of_two()) {
        return Err(Error::InvalidArgument("grid_start must be a power of two".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    if f.terms().len() == 1 {
        return Ok(MeasureResult::exact(f.terms()[0].1.norm(), Method::TorusGrid));
    }
    if dim == 1 {
        let p = f.specialize(&crate::lattice::LatticePoint::new(vec![1])?)?;
        return mahler_quadrature(&p, grid_start.max(64), tol);
    }

    let points = |g: u64| g.checked_pow(dim as u32).unwrap_or(u64::MAX);
    let mut grid = grid_start.max((2 * f.support_norm() + 2).next_power_of_two());
    if points(grid) > MAX_TORUS_POINTS {
        return Err(Error::DegreeCapExceeded { degree: f.support_norm(), cap: MAX_TORUS_POINTS });
    }
    let sampler = Sampler { f, threshold: NEAR_ZERO * f.coeff_scale() };
    let mut levels = 1;
    let mut current = sampler.level(grid);
    let mut previous_diff = f64::INFINITY;
    loop {
        let next_grid = grid * 2;
        if points(next_grid) > MAX_TORUS_POINTS {
            return Err(Error::NonConvergence { grid, difference: previous_diff });
        }
        let next = sampler.level(next_grid);
        levels += 1;
        let diff = (next.mean - current.mean).abs();
        grid = next_grid;
        current = next;
        let spread = diff.max(previous_diff);
        previous_diff = diff;
        let at_cap = points(grid * 2) > MAX_TORUS_POINTS;
        if spread < tol || at_cap {
            let cross = (sampler.level(3 * grid / 4).mean - current.mean).abs();
            let error = cross.max(if spread.is_finite() { spread } else { diff });
            if spread < tol && cross < tol || at_cap {
                if at_cap && diff.max(cross) > 10.0 * tol {
                    return Err(Error::NonConvergence { grid, difference: diff.max(cross) });
                }
                return Ok(MeasureResult::from_log(
                    current.mean,
                    Method::TorusGrid,
                    current.mean.exp() * error.exp_m1(),
                    MeasureDetail::Grid { grid, levels, singular_samples: current.singular, located_roots: 0 },
                ));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse_poly::SparseUniPoly;
    use crate::torus::tests::one_plus_x_plus_y;

    #[test]
    fn constant_is_exact() {
        let f = TorusPoly::from_real(2, &[(&[3, -1], -2.5)]).unwrap();
        assert_eq!(mahler_torus_grid(&f, 64, 1e-6).unwrap().value, 2.5);
    }

    #[test]
    fn one_plus_x_plus_y_value() {
        let m = mahler_torus_grid(&one_plus_x_plus_y(), 256, 1e-6).unwrap();
        assert!((m.value - 1.3813564445).abs() < 1e-5, "{}", m.value);
    }

    #[test]
    fn separable_product_has_measure_one() {
        // (1 + e(x1)) (1 + e(x2)): both zero lines pass through grid nodes
        let f = TorusPoly::from_real(2, &[(&[0, 0], 1.0), (&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], 1.0)]).unwrap();
        let m = mahler_torus_grid(&f, 64, 1e-6).unwrap();
        assert!((m.value - 1.0).abs() < 1e-4, "{}", m.value);
    }

    #[test]
    fn agrees_with_univariate_engine() {
        let p = SparseUniPoly::from_real(&[(0, 0.5), (2, -1.0), (3, 2.0)]).unwrap();
        let expected = crate::mahler::mahler_roots(&p, 4096).unwrap().value;
        for axis in 0..3 {
            let f = TorusPoly::from_univariate(&p, 3, axis).unwrap();
            let m = mahler_torus_grid(&f, 64, 1e-8).unwrap();
            assert!((m.value - expected).abs() < 1e-7 * expected, "axis {axis}: {}", m.value);
        }
        let f1 = TorusPoly::from_univariate(&p, 1, 0).unwrap();
        assert!((mahler_torus_grid(&f1, 64, 1e-9).unwrap().value - expected).abs() < 1e-8);
    }

    #[test]
    fn three_variables() {
        let zeta3 = 1.202_056_903_159_594_f64;
        let expected = (7.0 * zeta3 / (2.0 * std::f64::consts::PI.powi(2))).exp();
        let f = TorusPoly::from_real(3, &[(&[0, 0, 0], 1.0), (&[1, 0, 0], 1.0), (&[0, 1, 0], 1.0), (&[0, 0, 1], 1.0)]).unwrap();
        let m = mahler_torus_grid(&f, 64, 1e-4).unwrap();
        assert!((m.value - expected).abs() < 1e-3, "{} vs {expected}", m.value);
    }

    #[test]
    fn dimension_guard() {
        let f = TorusPoly::from_real(4, &[(&[0, 0, 0, 0], 1.0), (&[1, 0, 0, 0], 1.0)]).unwrap();
        assert_eq!(mahler_torus_grid(&f, 64, 1e-6), Err(Error::DimensionTooLarge(4)));
    }
}
