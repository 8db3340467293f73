//! Calculus of superfunctions F(t, θ, θ̄) over two odd generators:
//! supersymmetric lifts, smooth composition, the generators Q and Q̄,
//! and the dimensional-reduction formula.
//!
//! Component signs of Q, Q̄ and of compositions are produced by the
//! Grassmann engine (left-derivative convention), not hand-coded; the
//! closed-form components used for derivative propagation are checked
//! against the engine route in the tests.

use crate::grassmann::{GeneratorId, GrassmannElement};
use crate::quad::{self, QuadError};
use crate::scalar::ScalarFn;

/// Generator index of θ in this module's two-generator algebra.
pub const GEN_THETA: GeneratorId = 0;
/// Generator index of θ̄.
pub const GEN_THETABAR: GeneratorId = 1;

#[derive(Debug, thiserror::Error)]
pub enum SuperFunctionError {
    #[error("input is not supersymmetric on (-inf, {k}]: max component violation {violation:e}")]
    NotSupersymmetric { k: f64, violation: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// F = F_∅ + F_θ θ + F_θ̄ θ̄ + F_θθ̄ θθ̄ with scalar component functions.
#[derive(Clone, Debug)]
pub struct SuperFunction {
    pub f_empty: ScalarFn,
    pub f_theta: ScalarFn,
    pub f_thetabar: ScalarFn,
    pub f_thetathetabar: ScalarFn,
}

impl SuperFunction {
    pub fn new(
        f_empty: ScalarFn,
        f_theta: ScalarFn,
        f_thetabar: ScalarFn,
        f_thetathetabar: ScalarFn,
    ) -> Self {
        Self { f_empty, f_theta, f_thetabar, f_thetathetabar }
    }

    pub fn zero() -> Self {
        Self::new(ScalarFn::zero(), ScalarFn::zero(), ScalarFn::zero(), ScalarFn::zero())
    }

    /// Evaluation at time t as a Grassmann element over (θ, θ̄).
    pub fn eval_at(&self, t: f64) -> GrassmannElement {
        self.eval_order(0, t)
    }

    /// Evaluation with every component replaced by its n-th derivative.
    pub fn eval_order(&self, n: usize, t: f64) -> GrassmannElement {
        let mut e = GrassmannElement::scalar(self.f_empty.deriv_n(n, t));
        e = e.add(&GrassmannElement::monomial(&[GEN_THETA], self.f_theta.deriv_n(n, t)));
        e = e.add(&GrassmannElement::monomial(&[GEN_THETABAR], self.f_thetabar.deriv_n(n, t)));
        e = e.add(&GrassmannElement::monomial(
            &[GEN_THETA, GEN_THETABAR],
            self.f_thetathetabar.deriv_n(n, t),
        ));
        e
    }

    pub fn components_at(&self, t: f64) -> [f64; 4] {
        [
            self.f_empty.eval(t),
            self.f_theta.eval(t),
            self.f_thetabar.eval(t),
            self.f_thetathetabar.eval(t),
        ]
    }

    pub fn add_scale(&self, other: &SuperFunction, c: f64) -> Self {
        Self::new(
            self.f_empty.add_scale(&other.f_empty, c),
            self.f_theta.add_scale(&other.f_theta, c),
            self.f_thetabar.add_scale(&other.f_thetabar, c),
            self.f_thetathetabar.add_scale(&other.f_thetathetabar, c),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(
            self.f_empty.scale(c),
            self.f_theta.scale(c),
            self.f_thetabar.scale(c),
            self.f_thetathetabar.scale(c),
        )
    }
}

/// f(t + 2θθ̄) = f(t) + 2f′(t)θθ̄.
pub fn lift_supersymmetric(f: &ScalarFn) -> SuperFunction {
    SuperFunction::new(f.clone(), ScalarFn::zero(), ScalarFn::zero(), f.shift(1).scale(2.0))
}

/// Coefficient of θθ̄ in (θ + θ̄)², computed by the engine. This is the
/// cross-term sign entering the second-order piece of `compose`; for real
/// commuting components the two orderings cancel.
fn compose_cross_sign() -> f64 {
    let th = GrassmannElement::generator(GEN_THETA);
    let tb = GrassmannElement::generator(GEN_THETABAR);
    let x = th.add(&tb);
    x.mul(&x).coeff(&[GEN_THETA, GEN_THETABAR])
}

/// Nilpotent Taylor expansion H(F∅) + H′(F∅)(F − F∅) + ½H″(F∅)(F − F∅)².
pub fn compose(h: &ScalarFn, f: &SuperFunction) -> SuperFunction {
    let hp = h.shift(1);
    let hpp = h.shift(2);
    let h0 = h.compose(&f.f_empty);
    let h1 = hp.compose(&f.f_empty);
    let h2 = hpp.compose(&f.f_empty);
    let cross = compose_cross_sign();
    let top = h1
        .mul(&f.f_thetathetabar)
        .add(&h2.mul(&f.f_theta).mul(&f.f_thetabar).scale(0.5 * cross));
    SuperFunction::new(h0, h1.mul(&f.f_theta), h1.mul(&f.f_thetabar), top)
}

/// Direct engine evaluation of H∘F at one time, used as the reference
/// route for `compose`.
pub fn compose_eval_engine(h: &ScalarFn, f: &SuperFunction, t: f64) -> GrassmannElement {
    let f0 = f.f_empty.eval(t);
    let nil = f.eval_at(t).add_scale(&GrassmannElement::scalar(f0), -1.0);
    let mut acc = GrassmannElement::scalar(h.eval(f0));
    let mut pow = GrassmannElement::one();
    let mut fact = 1.0;
    for k in 1..=2usize {
        pow = pow.mul(&nil);
        fact *= k as f64;
        acc = acc.add(&pow.scale(h.deriv_n(k, f0) / fact));
    }
    acc
}

/// Q and Q̄ acting on a Grassmann element with given time derivative:
/// QE = 2θ·(∂_t E) + ∂_θ̄ E, Q̄E = 2θ̄·(∂_t E) − ∂_θ E, with the engine's
/// graded left derivative.
pub fn q_engine(e: &GrassmannElement, de: &GrassmannElement) -> GrassmannElement {
    GrassmannElement::generator(GEN_THETA)
        .mul(de)
        .scale(2.0)
        .add(&e.left_derivative(GEN_THETABAR))
}

pub fn qbar_engine(e: &GrassmannElement, de: &GrassmannElement) -> GrassmannElement {
    GrassmannElement::generator(GEN_THETABAR)
        .mul(de)
        .scale(2.0)
        .add_scale(&e.left_derivative(GEN_THETA), -1.0)
}

fn component(e: &GrassmannElement, idx: usize) -> f64 {
    match idx {
        0 => e.coeff(&[]),
        1 => e.coeff(&[GEN_THETA]),
        2 => e.coeff(&[GEN_THETABAR]),
        _ => e.coeff(&[GEN_THETA, GEN_THETABAR]),
    }
}

fn graded_apply(
    f: &SuperFunction,
    op: fn(&GrassmannElement, &GrassmannElement) -> GrassmannElement,
) -> SuperFunction {
    // Q and Q̄ are linear with constant coefficients in the component
    // derivatives, so the n-th derivative of each output component is the
    // same combination taken at shifted orders.
    let comp = |idx: usize| {
        let f = f.clone();
        ScalarFn::new(move |n, t| {
            let e = f.eval_order(n, t);
            let de = f.eval_order(n + 1, t);
            component(&op(&e, &de), idx)
        })
    };
    SuperFunction::new(comp(0), comp(1), comp(2), comp(3))
}

/// Q = 2θ∂_t + ∂_θ̄.
pub fn apply_q(f: &SuperFunction) -> SuperFunction {
    graded_apply(f, q_engine)
}

/// Q̄ = 2θ̄∂_t − ∂_θ.
pub fn apply_qbar(f: &SuperFunction) -> SuperFunction {
    graded_apply(f, qbar_engine)
}

/// True iff |F_θ|, |F_θ̄| and |F_θθ̄ − 2F_∅′| stay within `tol` on `grid`.
pub fn is_supersymmetric(f: &SuperFunction, grid: &[f64], tol: f64) -> bool {
    supersymmetry_violation(f, grid) <= tol
}

pub fn supersymmetry_violation(f: &SuperFunction, grid: &[f64]) -> f64 {
    grid.iter().fold(0.0f64, |m, &t| {
        m.max(f.f_theta.eval(t).abs())
            .max(f.f_thetabar.eval(t).abs())
            .max((f.f_thetathetabar.eval(t) - 2.0 * f.f_empty.deriv(t)).abs())
    })
}

/// τ(b, b̄) = exp(bQ̄ + b̄Q). The series terminates after the linear term
/// because Q² = Q̄² = {Q, Q̄} = 0, so no extra odd variable is needed for
/// real parameters.
pub fn tau_transform(f: &SuperFunction, b: f64, bbar: f64) -> SuperFunction {
    f.add_scale(&apply_qbar(f), b).add_scale(&apply_q(f), bbar)
}

/// Both sides of the reduction formula on (−∞, K]: the Berezin-integrated
/// superspace integral against −2·T_∅(K)·F_∅(K).
pub fn reduce_integral(
    t_fn: &SuperFunction,
    f_fn: &SuperFunction,
    k: f64,
    tol: f64,
) -> Result<(f64, f64), SuperFunctionError> {
    let grid: Vec<f64> = (0..40).map(|i| k - 0.25 * i as f64).collect();
    for s in [t_fn, f_fn] {
        let v = supersymmetry_violation(s, &grid);
        if v > 1e-8 {
            return Err(SuperFunctionError::NotSupersymmetric { k, violation: v });
        }
    }
    let integrand = |t: f64| {
        t_fn.eval_at(t)
            .mul(&f_fn.eval_at(t))
            .berezin(&[GEN_THETA, GEN_THETABAR])
            .expect("distinct generators")
            .scalar_part()
    };
    let lhs = quad::integrate_left_tail(integrand, k, tol, 1e-16, 400.0)?;
    let rhs = -2.0 * t_fn.f_empty.eval(k) * f_fn.f_empty.eval(k);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> Vec<f64> {
        (-20..=5).map(|i| i as f64 * 0.4).collect()
    }

    fn assert_sf_zero(f: &SuperFunction, tol: f64) {
        for &t in &grid() {
            for c in f.components_at(t) {
                assert!(c.abs() <= tol, "component {c} at t={t}");
            }
        }
    }

    #[test]
    fn lift_examples() {
        // identity lifts to t + 2θθ̄
        let f = lift_supersymmetric(&ScalarFn::identity());
        let e = f.eval_at(3.0);
        assert_relative_eq!(e.scalar_part(), 3.0);
        assert_relative_eq!(e.coeff(&[GEN_THETA, GEN_THETABAR]), 2.0);
        // constants lift to themselves
        let c = lift_supersymmetric(&ScalarFn::constant(1.0));
        assert_relative_eq!(c.eval_at(0.3).coeff(&[GEN_THETA, GEN_THETABAR]), 0.0);
        // exp lifts with F_θθ̄ = 2e^t
        let g = lift_supersymmetric(&ScalarFn::exp());
        assert_relative_eq!(g.f_thetathetabar.eval(1.0), 2.0 * 1f64.exp());
    }

    #[test]
    fn q_examples() {
        // Q annihilates every supersymmetric lift
        let f = lift_supersymmetric(&ScalarFn::exp());
        assert_sf_zero(&apply_q(&f), 1e-12);
        assert_sf_zero(&apply_qbar(&f), 1e-12);
        // Q(t) = 2θ
        let t_fn = SuperFunction::new(
            ScalarFn::identity(),
            ScalarFn::zero(),
            ScalarFn::zero(),
            ScalarFn::zero(),
        );
        let qt = apply_q(&t_fn);
        assert_relative_eq!(qt.f_theta.eval(0.7), 2.0);
        assert_relative_eq!(qt.f_empty.eval(0.7), 0.0);
        assert_relative_eq!(qt.f_thetathetabar.eval(0.7), 0.0);
        // Q(θ̄) = 1
        let tb = SuperFunction::new(
            ScalarFn::zero(),
            ScalarFn::zero(),
            ScalarFn::constant(1.0),
            ScalarFn::zero(),
        );
        assert_relative_eq!(apply_q(&tb).f_empty.eval(0.0), 1.0);
    }

    fn random_sf(seed: u64) -> SuperFunction {
        // smooth components with distinct shapes
        let a = (seed % 7) as f64 * 0.3 + 0.2;
        SuperFunction::new(
            ScalarFn::cos_scaled(1.0, a),
            ScalarFn::poly(&[0.5, -a, 0.25]),
            ScalarFn::exp_scaled(0.3, -a),
            ScalarFn::poly(&[1.0, 0.1 * a, 0.0, -0.05]),
        )
    }

    #[test]
    fn q_squared_zero_and_anticommutator() {
        for seed in 0..6 {
            let f = random_sf(seed);
            assert_sf_zero(&apply_q(&apply_q(&f)), 1e-10);
            assert_sf_zero(&apply_qbar(&apply_qbar(&f)), 1e-10);
            let anti = apply_q(&apply_qbar(&f)).add_scale(&apply_qbar(&apply_q(&f)), 1.0);
            assert_sf_zero(&anti, 1e-10);
        }
    }

    #[test]
    fn classification_matches_is_supersymmetric() {
        let g = grid();
        // lifted functions pass, and Q/Q̄ vanish
        let f = lift_supersymmetric(&ScalarFn::bump(3.0));
        assert!(is_supersymmetric(&f, &g, 1e-10));
        assert_sf_zero(&apply_q(&f), 1e-10);
        // F = θ fails both ways
        let th = SuperFunction::new(
            ScalarFn::zero(),
            ScalarFn::constant(1.0),
            ScalarFn::zero(),
            ScalarFn::zero(),
        );
        assert!(!is_supersymmetric(&th, &g, 1e-10));
        // missing factor 2 fails
        let half = SuperFunction::new(
            ScalarFn::exp(),
            ScalarFn::zero(),
            ScalarFn::zero(),
            ScalarFn::exp(),
        );
        assert!(!is_supersymmetric(&half, &g, 1e-10));
        // fuzzed: Q and Q̄ vanishing on the grid implies the component test
        for seed in 0..6 {
            let f = random_sf(seed);
            let qv = supersymmetry_violation(&f, &g) <= 1e-10;
            let qz = grid().iter().all(|&t| {
                apply_q(&f).eval_at(t).max_abs_coeff() <= 1e-10
                    && apply_qbar(&f).eval_at(t).max_abs_coeff() <= 1e-10
            });
            assert_eq!(qv, qz);
        }
    }

    #[test]
    fn compose_matches_engine_route() {
        let hs = [ScalarFn::exp(), ScalarFn::poly(&[0.0, 0.0, 1.0]), ScalarFn::cos_scaled(1.0, 1.0)];
        for h in &hs {
            for seed in 0..4 {
                let f = random_sf(seed);
                let c = compose(h, &f);
                for &t in &[-1.0, 0.0, 0.4, 2.0] {
                    let a = c.eval_at(t);
                    let b = compose_eval_engine(h, &f, t);
                    assert!(a.approx_eq(&b, 1e-10), "mismatch at t={t}");
                }
            }
        }
    }

    #[test]
    fn compose_examples() {
        // identity H leaves F unchanged
        let f = random_sf(1);
        let c = compose(&ScalarFn::identity(), &f);
        for &t in &grid() {
            for (a, b) in c.components_at(t).iter().zip(f.components_at(t)) {
                assert_relative_eq!(*a, b, epsilon = 1e-12);
            }
        }
        // H = x², F = t + θθ̄ → t² + 2tθθ̄
        let f = SuperFunction::new(
            ScalarFn::identity(),
            ScalarFn::zero(),
            ScalarFn::zero(),
            ScalarFn::constant(1.0),
        );
        let c = compose(&ScalarFn::poly(&[0.0, 0.0, 1.0]), &f);
        assert_relative_eq!(c.f_empty.eval(3.0), 9.0);
        assert_relative_eq!(c.f_thetathetabar.eval(3.0), 6.0);
        // H = exp, F = θθ̄ → 1 + θθ̄
        let f = SuperFunction::new(
            ScalarFn::zero(),
            ScalarFn::zero(),
            ScalarFn::zero(),
            ScalarFn::constant(1.0),
        );
        let c = compose(&ScalarFn::exp(), &f);
        assert_relative_eq!(c.f_empty.eval(0.2), 1.0);
        assert_relative_eq!(c.f_thetathetabar.eval(0.2), 1.0);
    }

    #[test]
    fn compose_chain_rule_consistency() {
        // compose(H, lift(f)) = lift(H∘f) in components
        let h = ScalarFn::cos_scaled(1.0, 1.0);
        let f = ScalarFn::exp_scaled(0.5, 0.7);
        let a = compose(&h, &lift_supersymmetric(&f));
        let b = lift_supersymmetric(&h.compose(&f));
        for &t in &grid() {
            for (x, y) in a.components_at(t).iter().zip(b.components_at(t)) {
                assert_relative_eq!(*x, y, epsilon = 1e-10, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn tau_properties() {
        let g = grid();
        // τ fixes supersymmetric functions
        let f = lift_supersymmetric(&ScalarFn::gaussian(0.0, 2.0));
        let tf = tau_transform(&f, 0.7, -1.3);
        for &t in &g {
            for (a, b) in tf.components_at(t).iter().zip(f.components_at(t)) {
                assert_relative_eq!(*a, b, epsilon = 1e-10);
            }
        }
        // τ(0,0) = id
        let f = random_sf(3);
        let t0 = tau_transform(&f, 0.0, 0.0);
        for &t in &g {
            for (a, b) in t0.components_at(t).iter().zip(f.components_at(t)) {
                assert_relative_eq!(*a, b, epsilon = 1e-12);
            }
        }
        // one-parameter group law in (a, c)
        let (b, bb) = (0.8, -0.4);
        let (aa, cc) = (0.5, 1.1);
        let lhs = tau_transform(&tau_transform(&f, cc * b, cc * bb), aa * b, aa * bb);
        let rhs = tau_transform(&f, (aa + cc) * b, (aa + cc) * bb);
        for &t in &g {
            for (x, y) in lhs.components_at(t).iter().zip(rhs.components_at(t)) {
                assert_relative_eq!(*x, y, epsilon = 1e-9, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn reduction_exponential_pair() {
        // T∅ = F∅ = e^t, K = 0: ∫_{-∞}^0 −4e^{2t} dt = −2
        let t_fn = lift_supersymmetric(&ScalarFn::exp());
        let f_fn = lift_supersymmetric(&ScalarFn::exp());
        let (lhs, rhs) = reduce_integral(&t_fn, &f_fn, 0.0, 1e-10).unwrap();
        assert_relative_eq!(rhs, -2.0);
        assert!((lhs - rhs).abs() <= 1e-8, "lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn reduction_zero_function() {
        let t_fn = lift_supersymmetric(&ScalarFn::exp());
        let (lhs, rhs) = reduce_integral(&t_fn, &SuperFunction::zero(), 0.0, 1e-10).unwrap();
        assert_eq!(rhs, 0.0);
        assert!(lhs.abs() <= 1e-10);
    }

    #[test]
    fn reduction_gaussian_family() {
        let k = 1.0;
        let base = ScalarFn::gaussian(k, 1.0).mul(&ScalarFn::exp());
        let t_fn = lift_supersymmetric(&base);
        let f_fn = lift_supersymmetric(&base);
        let (lhs, rhs) = reduce_integral(&t_fn, &f_fn, k, 1e-10).unwrap();
        assert_relative_eq!(rhs, -2.0 * base.eval(k) * base.eval(k));
        assert!((lhs - rhs).abs() <= 1e-8, "lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn reduction_rejects_non_supersymmetric() {
        let bad = SuperFunction::new(
            ScalarFn::exp(),
            ScalarFn::constant(1.0),
            ScalarFn::zero(),
            ScalarFn::exp().scale(2.0),
        );
        let good = lift_supersymmetric(&ScalarFn::exp());
        assert!(matches!(
            reduce_integral(&bad, &good, 0.0, 1e-10),
            Err(SuperFunctionError::NotSupersymmetric { .. })
        ));
    }

    #[test]
    fn berezin_sign_forces_minus_two() {
        // ∫θθ̄ dθdθ̄ = −1 pins the −2 in the reduction formula
        let th = GrassmannElement::generator(GEN_THETA);
        let tb = GrassmannElement::generator(GEN_THETABAR);
        let v = th.mul(&tb).berezin(&[GEN_THETA, GEN_THETABAR]).unwrap();
        assert_eq!(v.scalar_part(), -1.0);
    }
}
