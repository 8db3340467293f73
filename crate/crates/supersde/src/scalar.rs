//! Real scalar functions of time carrying analytic derivatives.
//!
//! A `ScalarFn` is a closure `(order, t) -> d^order f / dt^order (t)`.
//! Combinators (sum, product, composition) propagate derivatives
//! recursively, so no symbolic engine or finite differencing is involved.

use std::sync::Arc;

#[derive(Clone)]
pub struct ScalarFn(Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>);

impl std::fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ScalarFn")
    }
}

impl ScalarFn {
    pub fn new(f: impl Fn(usize, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.0)(0, t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        (self.0)(1, t)
    }

    pub fn deriv_n(&self, order: usize, t: f64) -> f64 {
        (self.0)(order, t)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |n, _| if n == 0 { c } else { 0.0 })
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn identity() -> Self {
        Self::poly(&[0.0, 1.0])
    }

    /// Polynomial with dense coefficients, constant term first.
    pub fn poly(coeffs: &[f64]) -> Self {
        let c = coeffs.to_vec();
        Self::new(move |n, t| {
            let mut acc = 0.0;
            for (k, &ck) in c.iter().enumerate().skip(n) {
                let mut fall = 1.0;
                for j in 0..n {
                    fall *= (k - j) as f64;
                }
                acc += ck * fall * t.powi((k - n) as i32);
            }
            acc
        })
    }

    /// a·e^{bt}
    pub fn exp_scaled(a: f64, b: f64) -> Self {
        Self::new(move |n, t| a * b.powi(n as i32) * (b * t).exp())
    }

    pub fn exp() -> Self {
        Self::exp_scaled(1.0, 1.0)
    }

    /// a·cos(bt); derivatives cycle through ±sin/±cos.
    pub fn cos_scaled(a: f64, b: f64) -> Self {
        Self::new(move |n, t| {
            let s = a * b.powi(n as i32);
            match n % 4 {
                0 => s * (b * t).cos(),
                1 => -s * (b * t).sin(),
                2 => -s * (b * t).cos(),
                _ => s * (b * t).sin(),
            }
        })
    }

    /// a·tanh(bt). The n-th derivative is P_n(tanh(bt)) with the
    /// polynomials built by P_{n+1} = P_n'·(1 − u²), precomputed for the
    /// orders that matter so evaluation stays cheap in inner loops.
    pub fn tanh_scaled(a: f64, b: f64) -> Self {
        let mut table = vec![vec![0.0, 1.0]]; // P_0(u) = u
        for n in 0..12 {
            let next = tanh_step(&table[n]);
            table.push(next);
        }
        Self::new(move |n, t| {
            let u = (b * t).tanh();
            let value = if n < table.len() {
                poly_eval(&table[n], u)
            } else {
                let mut p = table.last().unwrap().clone();
                for _ in table.len() - 1..n {
                    p = tanh_step(&p);
                }
                poly_eval(&p, u)
            };
            a * b.powi(n as i32) * value
        })
    }

    /// e^{-(t-c)²/w²}; the n-th derivative is p_n(t)·e^{-(t-c)²/w²} with
    /// p_{n+1} = p_n' + p_n·q' for the exponent q, precomputed likewise.
    pub fn gaussian(c: f64, w: f64) -> Self {
        let w2 = w * w;
        // q(t) = −(t−c)²/w², q'(t) as dense coefficients
        let dq = [2.0 * c / w2, -2.0 / w2];
        let mut table: Vec<Vec<f64>> = vec![vec![1.0]];
        let step = move |p: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; p.len() + 1];
            for (k, &ck) in p.iter().enumerate() {
                if k > 0 {
                    out[k - 1] += ck * k as f64;
                }
                out[k] += ck * dq[0];
                out[k + 1] += ck * dq[1];
            }
            out
        };
        for n in 0..12 {
            let next = step(&table[n]);
            table.push(next);
        }
        Self::new(move |n, t| {
            let body = (-(t - c) * (t - c) / w2).exp();
            let value = if n < table.len() {
                poly_eval(&table[n], t)
            } else {
                let mut p = table.last().unwrap().clone();
                for _ in table.len() - 1..n {
                    p = step(&p);
                }
                poly_eval(&p, t)
            };
            value * body
        })
    }

    /// Smooth even bump exp(1 − 1/(1 − (t/T)²)) on |t| < T, zero outside,
    /// with value 1 at t = 0. All derivatives vanish at |t| ≥ T.
    pub fn bump(support: f64) -> Self {
        let big = support;
        // inner(t) = 1 − 1/(1 − (t/T)²) composed under exp; near the
        // boundary the exponent drops below −700 and everything underflows,
        // so cut there to avoid inf·0 intermediates.
        let q = ScalarFn::poly(&[1.0, 0.0, -1.0 / (big * big)]);
        let inner = ScalarFn::constant(1.0).add_scale(&ScalarFn::reciprocal().compose(&q), -1.0);
        let body = ScalarFn::exp().compose(&inner);
        let q2 = ScalarFn::poly(&[1.0, 0.0, -1.0 / (big * big)]);
        Self::new(move |n, t| {
            let qv = q2.eval(t);
            if qv <= 1.0 / 700.0 {
                0.0
            } else {
                body.deriv_n(n, t)
            }
        })
    }

    /// 1/x with the closed-form n-th derivative (−1)^n n! x^{−n−1}.
    pub fn reciprocal() -> Self {
        Self::new(move |n, t| {
            let mut fact = 1.0;
            for k in 1..=n {
                fact *= k as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * fact * t.powi(-(n as i32) - 1)
        })
    }

    pub fn add_scale(&self, other: &ScalarFn, c: f64) -> Self {
        let a = self.clone();
        let b = other.clone();
        Self::new(move |n, t| a.deriv_n(n, t) + c * b.deriv_n(n, t))
    }

    pub fn add(&self, other: &ScalarFn) -> Self {
        self.add_scale(other, 1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        let a = self.clone();
        Self::new(move |n, t| c * a.deriv_n(n, t))
    }

    /// Product with Leibniz-rule derivatives.
    pub fn mul(&self, other: &ScalarFn) -> Self {
        let a = self.clone();
        let b = other.clone();
        Self::new(move |n, t| {
            let mut acc = 0.0;
            let mut binom = 1.0;
            for k in 0..=n {
                acc += binom * a.deriv_n(k, t) * b.deriv_n(n - k, t);
                binom *= (n - k) as f64 / (k + 1) as f64;
            }
            acc
        })
    }

    /// View with derivative orders shifted by `k` (the k-th derivative as
    /// a function in its own right).
    pub fn shift(&self, k: usize) -> Self {
        let a = self.clone();
        Self::new(move |n, t| a.deriv_n(n + k, t))
    }

    /// self ∘ inner, derivatives by the recursion
    /// (f∘g)^{(n)} = d^{n−1}/dt^{n−1} [ (f'∘g)·g' ].
    pub fn compose(&self, inner: &ScalarFn) -> Self {
        let f = self.clone();
        let g = inner.clone();
        Self::new(move |n, t| compose_deriv(&f, &g, n, t))
    }
}

fn compose_deriv(f: &ScalarFn, g: &ScalarFn, n: usize, t: f64) -> f64 {
    if n == 0 {
        return f.deriv_n(0, g.eval(t));
    }
    let chained = f.shift(1).compose(g).mul(&g.shift(1));
    chained.deriv_n(n - 1, t)
}

fn tanh_step(p: &[f64]) -> Vec<f64> {
    // P'·(1 − u²)
    let mut dp = vec![0.0; p.len().max(1) - 1];
    for (k, &c) in p.iter().enumerate().skip(1) {
        dp[k - 1] = c * k as f64;
    }
    let mut out = vec![0.0; dp.len() + 2];
    for (k, &c) in dp.iter().enumerate() {
        out[k] += c;
        out[k + 2] -= c;
    }
    out
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}
