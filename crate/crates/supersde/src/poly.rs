//! Dense real polynomials, constant term first.

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn new(coeffs: &[f64]) -> Self {
        let mut c = coeffs.to_vec();
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Self(c)
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        c[degree] = 1.0;
        Self(c)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn deriv(&self) -> Self {
        if self.0.len() <= 1 {
            return Self(vec![]);
        }
        Self(self.0.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Self(vec![]);
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Polynomial::new(&[1.0]);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// (coefficient, degree) pairs for the nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.0.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(d, &c)| (c, d))
    }
}
