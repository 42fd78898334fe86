//! Compensated arithmetic helpers.

/// Neumaier's improved Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Error-free product: `a * b = p + e` exactly.
pub fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Dot product of an integer vector with a real vector, accumulated with
/// error-free transformations (Ogita-Rump-Oishi `Dot2`).
pub fn compensated_dot(k: &[i64], alpha: &[f64]) -> f64 {
    let mut sum = NeumaierSum::default();
    let mut tail = 0.0;
    for (&ki, &ai) in k.iter().zip(alpha) {
        let (p, e) = two_product(ki as f64, ai);
        sum.add(p);
        tail += e;
    }
    sum.value() + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let mut s = NeumaierSum::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn compensated_dot_is_exact_on_cancellation() {
        let v = compensated_dot(&[1, -1, 1], &[1e16, 1e16, 1.0]);
        assert_eq!(v, 1.0);
    }
}
