use nalgebra::{linalg::Schur, DMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of the companion matrix of `coeffs` (lowest degree first).
pub fn companion_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for (i, c) in coeffs[..d].iter().enumerate() {
        m[(i, d - 1)] = -c / coeffs[d];
    }
    let (_, t) = Schur::try_new(m, 1e-15, 10_000)?.unpack();
    Some((0..d).map(|i| t[(i, i)]).collect())
}

/// A dense polynomial with uniform complex coefficients whose roots all stay
/// at least `gap` away from the unit circle, or `None` if the draw misses.
pub fn dense_off_circle(rng: &mut ChaCha8Rng, max_degree: usize, gap: f64) -> Option<Vec<Complex64>> {
    let degree = rng.random_range(1..=max_degree);
    let coeffs: Vec<Complex64> = (0..=degree)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    if coeffs[0].norm() < 1e-3 || coeffs[degree].norm() < 1e-3 {
        return None;
    }
    let roots = companion_roots(&coeffs)?;
    roots.iter().all(|r| (r.norm() - 1.0).abs() >= gap).then_some(coeffs)
}
