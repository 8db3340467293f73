//! Gaussian super-Wick calculus for the fields (φ, ψ, ψ̄, ω): covariances,
//! expectations of superfield monomials with fermionic signs, the fermionic
//! determinant, and the nested simplex integrals behind the localization
//! identities.

use crate::grassmann::{GeneratorId, GrassmannElement};
use crate::poly::Polynomial;
use crate::quad::{self, QuadError};
use crate::scalar::ScalarFn;

#[derive(Debug, thiserror::Error)]
pub enum WickError {
    #[error("total degree {0} exceeds the combinatorial guard (20)")]
    DegreeTooHigh(usize),
    #[error("pair index {0} used by more than one insertion")]
    DuplicatePairIndex(u32),
    #[error("simplex depth {0} not supported (max 3)")]
    DepthTooHigh(usize),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Mass and equal-time conventions; the single source of truth for all
/// Wick pairings. The kernel is one-sided with the symmetric-mollifier
/// value 1/2 at coincidence; the φ covariance at coincidence is the
/// stationary variance 1/(2m²).
#[derive(Clone, Copy, Debug)]
pub struct CovarianceSpec {
    pub m: f64,
}

impl CovarianceSpec {
    pub fn new(m: f64) -> Self {
        assert!(m > 0.0, "mass must be positive");
        Self { m }
    }

    /// 𝒢(t) = e^{−m²t} for t > 0, 0 for t < 0, 1/2 at t = 0.
    pub fn kernel_g(&self, t: f64) -> f64 {
        if t > 0.0 {
            (-self.m * self.m * t).exp()
        } else if t < 0.0 {
            0.0
        } else {
            0.5
        }
    }

    /// ⟨φ(t)φ(s)⟩ = e^{−m²|t−s|}/(2m²), including coincidence.
    pub fn phi_cov(&self, t: f64, s: f64) -> f64 {
        (-self.m * self.m * (t - s).abs()).exp() / (2.0 * self.m * self.m)
    }

    pub fn phi_variance(&self) -> f64 {
        1.0 / (2.0 * self.m * self.m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Phi,
    Omega,
    Psi,
    PsiBar,
}

impl FieldKind {
    pub fn is_fermionic(self) -> bool {
        matches!(self, FieldKind::Psi | FieldKind::PsiBar)
    }
}

/// One field operator in an ordered product.
#[derive(Clone, Copy, Debug)]
pub struct FieldSymbol {
    pub kind: FieldKind,
    pub time: f64,
}

impl FieldSymbol {
    pub fn new(kind: FieldKind, time: f64) -> Self {
        Self { kind, time }
    }
}

/// Ordered two-point function ⟨a b⟩ for adjacent operators.
fn contraction(spec: &CovarianceSpec, a: &FieldSymbol, b: &FieldSymbol) -> f64 {
    use FieldKind::*;
    match (a.kind, b.kind) {
        (Phi, Phi) => spec.phi_cov(a.time, b.time),
        (Phi, Omega) => spec.kernel_g(a.time - b.time),
        (Omega, Phi) => spec.kernel_g(b.time - a.time),
        (Omega, Omega) => 0.0,
        (PsiBar, Psi) => spec.kernel_g(a.time - b.time),
        (Psi, PsiBar) => -spec.kernel_g(b.time - a.time),
        _ => 0.0,
    }
}

/// Wick expectation of an ordered operator product. Pairings are
/// enumerated by first-element pairing; each fermionic pair picks up
/// (−1)^{number of fermionic operators it jumps over}.
pub fn wick_expectation_ops(spec: &CovarianceSpec, ops: &[FieldSymbol]) -> Result<f64, WickError> {
    if ops.len() > 20 {
        return Err(WickError::DegreeTooHigh(ops.len()));
    }
    if ops.len() % 2 == 1 {
        return Ok(0.0);
    }
    let fermion_count = ops.iter().filter(|o| o.kind.is_fermionic()).count();
    if fermion_count % 2 == 1 {
        return Ok(0.0);
    }
    let mut cov = vec![0.0; ops.len() * ops.len()];
    for i in 0..ops.len() {
        for j in (i + 1)..ops.len() {
            cov[i * ops.len() + j] = contraction(spec, &ops[i], &ops[j]);
        }
    }
    let idx: Vec<usize> = (0..ops.len()).collect();
    Ok(pairings(&cov, ops, &idx))
}

fn pairings(cov: &[f64], ops: &[FieldSymbol], remaining: &[usize]) -> f64 {
    if remaining.is_empty() {
        return 1.0;
    }
    let n = ops.len();
    let first = remaining[0];
    let mut total = 0.0;
    for (pos, &j) in remaining.iter().enumerate().skip(1) {
        let c = cov[first * n + j];
        if c == 0.0 {
            continue;
        }
        let sign = if ops[first].kind.is_fermionic() {
            let jumped = remaining[1..pos]
                .iter()
                .filter(|&&k| ops[k].kind.is_fermionic())
                .count();
            if jumped % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        } else {
            1.0
        };
        let rest: Vec<usize> = remaining[1..]
            .iter()
            .copied()
            .filter(|&k| k != j)
            .collect();
        total += sign * c * pairings(cov, ops, &rest);
    }
    total
}

/// Isserlis moment ⟨∏ φ(t_i)^{e_i}⟩ for the commutative field φ.
pub fn gaussian_moment(spec: &CovarianceSpec, times: &[(f64, u32)]) -> Result<f64, WickError> {
    let degree: usize = times.iter().map(|&(_, e)| e as usize).sum();
    if degree > 20 {
        return Err(WickError::DegreeTooHigh(degree));
    }
    let mut ops = Vec::with_capacity(degree);
    for &(t, e) in times {
        for _ in 0..e {
            ops.push(FieldSymbol::new(FieldKind::Phi, t));
        }
    }
    wick_expectation_ops(spec, &ops)
}

/// Superfield covariance ⟨Φ(t,θ,θ̄)Φ(s,θ′,θ̄′)⟩ over generators
/// (θ, θ̄, θ′, θ̄′) = (0, 1, 2, 3).
pub fn super_cov(spec: &CovarianceSpec, t: f64, s: f64) -> GrassmannElement {
    let gts = spec.kernel_g(t - s);
    let gst = spec.kernel_g(s - t);
    let mut e = GrassmannElement::scalar(spec.phi_cov(t, s));
    // 𝒢(t−s)(θ′−θ)θ̄′
    e = e.add(&GrassmannElement::monomial(&[2, 3], gts));
    e = e.add(&GrassmannElement::monomial(&[0, 3], -gts));
    // −𝒢(s−t)(θ′−θ)θ̄
    e = e.add(&GrassmannElement::monomial(&[2, 1], -gst));
    e = e.add(&GrassmannElement::monomial(&[0, 1], gst));
    e
}

/// One factor P(Φ(τ, θ_p, θ̄_p))^power inside an expectation. The pair
/// index p selects the generator pair (2p, 2p+1).
#[derive(Clone, Debug)]
pub struct SuperInsertion {
    pub time: f64,
    pub pair_index: u32,
    pub power: usize,
    pub poly: Polynomial,
}

impl SuperInsertion {
    /// Plain monomial Φ^n.
    pub fn phi_power(time: f64, pair_index: u32, n: usize) -> Self {
        Self { time, pair_index, power: n, poly: Polynomial::monomial(1) }
    }

    pub fn with_poly(time: f64, pair_index: u32, poly: Polynomial) -> Self {
        Self { time, pair_index, power: 1, poly }
    }

    pub fn theta_gen(&self) -> GeneratorId {
        2 * self.pair_index
    }

    pub fn thetabar_gen(&self) -> GeneratorId {
        2 * self.pair_index + 1
    }

    /// Effective polynomial P^power (Φ is even, so polynomial evaluation
    /// on it is a ring homomorphism).
    fn effective_poly(&self) -> Polynomial {
        self.poly.pow(self.power)
    }
}

#[derive(Clone)]
struct WickTerm {
    coeff: f64,
    ops: Vec<FieldSymbol>,
    gens: Vec<GeneratorId>,
}

impl WickTerm {
    fn unit() -> Self {
        Self { coeff: 1.0, ops: vec![], gens: vec![] }
    }

    /// Append a factor whose operators stand to the left of its generators.
    /// Moving the factor's operators past the generators already collected
    /// costs a sign per (fermion, generator) swap.
    fn extend(&self, coeff: f64, ops: &[FieldSymbol], gens: &[GeneratorId]) -> Self {
        let fermions = ops.iter().filter(|o| o.kind.is_fermionic()).count();
        let sign = if (fermions * self.gens.len()) % 2 == 0 { 1.0 } else { -1.0 };
        let mut t = self.clone();
        t.coeff *= sign * coeff;
        t.ops.extend_from_slice(ops);
        t.gens.extend_from_slice(gens);
        t
    }
}

/// Expand one insertion into its (coefficient, operators, generators)
/// sectors, from Φ^d = φ^d + dφ^{d−1}(ψ̄θ + ψθ̄) + (dφ^{d−1}ω +
/// d(d−1)φ^{d−2}ψψ̄)θθ̄ extended linearly to polynomials.
fn insertion_sectors(ins: &SuperInsertion) -> Vec<(f64, Vec<FieldSymbol>, Vec<GeneratorId>)> {
    let tau = ins.time;
    let p = ins.effective_poly();
    let dp = p.deriv();
    let ddp = dp.deriv();
    let phi = |d: usize| -> Vec<FieldSymbol> {
        (0..d).map(|_| FieldSymbol::new(FieldKind::Phi, tau)).collect()
    };
    let mut out = Vec::new();
    for (c, d) in p.terms() {
        out.push((c, phi(d), vec![]));
    }
    for (c, d) in dp.terms() {
        let mut ops = phi(d);
        ops.push(FieldSymbol::new(FieldKind::PsiBar, tau));
        out.push((c, ops, vec![ins.theta_gen()]));
        let mut ops = phi(d);
        ops.push(FieldSymbol::new(FieldKind::Psi, tau));
        out.push((c, ops, vec![ins.thetabar_gen()]));
        let mut ops = phi(d);
        ops.push(FieldSymbol::new(FieldKind::Omega, tau));
        out.push((c, ops, vec![ins.theta_gen(), ins.thetabar_gen()]));
    }
    for (c, d) in ddp.terms() {
        let mut ops = phi(d);
        ops.push(FieldSymbol::new(FieldKind::Psi, tau));
        ops.push(FieldSymbol::new(FieldKind::PsiBar, tau));
        out.push((c, ops, vec![ins.theta_gen(), ins.thetabar_gen()]));
    }
    out
}

/// Expectation of ∏_j φ(t_j)^{e_j} · ∏_i P_i(Φ(τ_i, θ_i, θ̄_i))^{n_i} as a
/// Grassmann element over all involved generator pairs.
pub fn wick_super_expectation(
    spec: &CovarianceSpec,
    insertions: &[SuperInsertion],
    prefactor: &[(f64, u32)],
) -> Result<GrassmannElement, WickError> {
    for (i, ins) in insertions.iter().enumerate() {
        if insertions[..i].iter().any(|o| o.pair_index == ins.pair_index) {
            return Err(WickError::DuplicatePairIndex(ins.pair_index));
        }
    }
    let mut base = WickTerm::unit();
    for &(t, e) in prefactor {
        for _ in 0..e {
            base.ops.push(FieldSymbol::new(FieldKind::Phi, t));
        }
    }
    let mut terms = vec![base];
    for ins in insertions {
        let sectors = insertion_sectors(ins);
        let mut next = Vec::with_capacity(terms.len() * sectors.len());
        for t in &terms {
            for (c, ops, gens) in &sectors {
                next.push(t.extend(*c, ops, gens));
            }
        }
        terms = next;
    }
    let mut out = GrassmannElement::zero();
    for term in &terms {
        let val = wick_expectation_ops(spec, &term.ops)?;
        if val != 0.0 {
            out = out.add(&GrassmannElement::monomial(&term.gens, term.coeff * val));
        }
    }
    Ok(out)
}

/// 𝔊_n = det(G) with G_{i,j} = 𝒢(t_j − t_i) off the diagonal and 1/2 on it.
pub fn fermionic_det(spec: &CovarianceSpec, times: &[f64]) -> f64 {
    let n = times.len();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = if i == j { 0.5 } else { spec.kernel_g(times[j] - times[i]) };
        }
    }
    determinant(&mut a, n)
}

fn determinant(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap())
            .unwrap();
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        det *= a[col * n + col];
        for row in (col + 1)..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
        }
    }
    det
}

/// Berezin-integrate every generator pair of `e` (innermost dθ first per
/// pair), yielding the scalar that remains.
fn berezin_all_pairs(e: &GrassmannElement, pairs: &[u32]) -> f64 {
    let mut cur = e.clone();
    for &p in pairs {
        cur = cur.berezin(&[2 * p, 2 * p + 1]).expect("distinct generators");
    }
    cur.scalar_part()
}

/// The nested simplex integral 𝓗_{ℓ,P} over −∞ < τ_ℓ < ⋯ < τ_1 < t_k of
/// the Berezin-integrated expectation with weights g(τ_i) + 2g′(τ_i)θ_iθ̄_i.
/// Integration is confined to the compact support of g.
#[allow(clippy::too_many_arguments)]
pub fn localization_lhs(
    spec: &CovarianceSpec,
    prefactor: &[(f64, u32)],
    g: &ScalarFn,
    g_support: f64,
    p: &Polynomial,
    ell: usize,
    quad_tol: f64,
) -> Result<f64, WickError> {
    if ell > 3 {
        return Err(WickError::DepthTooHigh(ell));
    }
    if ell == 0 {
        return gaussian_moment(spec, prefactor);
    }
    let t_k = prefactor.last().map(|&(t, _)| t).unwrap_or(0.0);
    let lower = -g_support;
    let upper = t_k.min(g_support);
    let pairs: Vec<u32> = (0..ell as u32).collect();
    let integrand = |taus: &[f64]| -> Result<f64, WickError> {
        let insertions: Vec<SuperInsertion> = taus
            .iter()
            .enumerate()
            .map(|(i, &tau)| SuperInsertion::with_poly(tau, i as u32, p.clone()))
            .collect();
        let mut e = wick_super_expectation(spec, &insertions, prefactor)?;
        for (i, &tau) in taus.iter().enumerate() {
            let pair = i as u32;
            let weight = GrassmannElement::scalar(g.eval(tau)).add(&GrassmannElement::monomial(
                &[2 * pair, 2 * pair + 1],
                2.0 * g.deriv(tau),
            ));
            e = e.mul(&weight);
        }
        Ok(berezin_all_pairs(&e, &pairs))
    };
    nested_simplex(&integrand, lower, upper, ell, quad_tol)
}

/// Recursive τ_1 > τ_2 > ⋯ quadrature; errors from inner levels surface
/// through a captured slot because the integrand signature is plain f64.
fn nested_simplex(
    integrand: &dyn Fn(&[f64]) -> Result<f64, WickError>,
    lower: f64,
    upper: f64,
    depth: usize,
    tol: f64,
) -> Result<f64, WickError> {
    use std::cell::RefCell;
    fn level(
        integrand: &dyn Fn(&[f64]) -> Result<f64, WickError>,
        fixed: &mut Vec<f64>,
        lower: f64,
        upper: f64,
        remaining: usize,
        tol: f64,
        err_slot: &RefCell<Option<WickError>>,
    ) -> f64 {
        if remaining == 0 {
            return match integrand(fixed) {
                Ok(v) => v,
                Err(e) => {
                    if err_slot.borrow().is_none() {
                        *err_slot.borrow_mut() = Some(e);
                    }
                    0.0
                }
            };
        }
        if upper <= lower {
            return 0.0;
        }
        let f = |tau: f64| {
            let mut fixed2 = fixed.clone();
            fixed2.push(tau);
            level(integrand, &mut fixed2, lower, tau, remaining - 1, tol * 0.2, err_slot)
        };
        match quad::integrate(f, lower, upper, tol) {
            Ok(v) => v,
            Err(e) => {
                if err_slot.borrow().is_none() {
                    *err_slot.borrow_mut() = Some(WickError::Quad(e));
                }
                0.0
            }
        }
    }
    let err_slot = RefCell::new(None);
    let mut fixed = Vec::new();
    let v = level(integrand, &mut fixed, lower, upper, depth, tol, &err_slot);
    match err_slot.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// (−2 g(t_k))^ℓ / ℓ! · ⟨∏ φ(t_j)^{m_j} P(φ(t_k))^ℓ⟩.
pub fn localization_rhs(
    spec: &CovarianceSpec,
    prefactor: &[(f64, u32)],
    g: &ScalarFn,
    p: &Polynomial,
    ell: usize,
) -> Result<f64, WickError> {
    let t_k = prefactor.last().map(|&(t, _)| t).unwrap_or(0.0);
    let mut fact = 1.0;
    for k in 1..=ell {
        fact *= k as f64;
    }
    let scale = (-2.0 * g.eval(t_k)).powi(ell as i32) / fact;
    let q = p.pow(ell);
    let mut moment = 0.0;
    for (c, d) in q.terms() {
        let mut times = prefactor.to_vec();
        times.push((t_k, d as u32));
        moment += c * gaussian_moment(spec, &times)?;
    }
    Ok(scale * moment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec1() -> CovarianceSpec {
        CovarianceSpec::new(1.0)
    }

    #[test]
    fn kernel_values() {
        let s = spec1();
        assert_relative_eq!(s.kernel_g(1.0), (-1.0f64).exp());
        assert_eq!(s.kernel_g(-1.0), 0.0);
        assert_eq!(s.kernel_g(0.0), 0.5);
    }

    #[test]
    fn phi_cov_values() {
        let s = spec1();
        assert_relative_eq!(s.phi_cov(2.0, 2.0), 0.5);
        assert_relative_eq!(s.phi_cov(1.0, 0.0), 0.5 * (-1.0f64).exp());
        assert_relative_eq!(CovarianceSpec::new(2.0).phi_cov(0.0, 0.0), 0.125);
    }

    #[test]
    fn gaussian_moment_examples() {
        let s = spec1();
        assert_relative_eq!(gaussian_moment(&s, &[(0.0, 2)]).unwrap(), 0.5);
        assert_relative_eq!(gaussian_moment(&s, &[(0.0, 4)]).unwrap(), 0.75);
        assert_relative_eq!(
            gaussian_moment(&s, &[(0.0, 1), (1.0, 1)]).unwrap(),
            0.5 * (-1.0f64).exp()
        );
        assert_eq!(gaussian_moment(&s, &[(0.0, 3)]).unwrap(), 0.0);
        assert!(matches!(
            gaussian_moment(&s, &[(0.0, 22)]),
            Err(WickError::DegreeTooHigh(22))
        ));
    }

    #[test]
    fn gaussian_moment_matches_recursion_oracle() {
        // independent oracle: Isserlis recursion ⟨x1⋯xn⟩ = Σ_j C(1,j)⟨rest⟩
        fn oracle(s: &CovarianceSpec, times: &[f64]) -> f64 {
            if times.is_empty() {
                return 1.0;
            }
            if times.len() % 2 == 1 {
                return 0.0;
            }
            let mut total = 0.0;
            for j in 1..times.len() {
                let mut rest: Vec<f64> = times[1..].to_vec();
                rest.remove(j - 1);
                total += s.phi_cov(times[0], times[j]) * oracle(s, &rest);
            }
            total
        }
        let s = CovarianceSpec::new(1.3);
        let times = [0.0, -0.4, -0.4, 1.2, 0.3, 0.0];
        let grouped: Vec<(f64, u32)> = times.iter().map(|&t| (t, 1)).collect();
        assert_relative_eq!(
            gaussian_moment(&s, &grouped).unwrap(),
            oracle(&s, &times),
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_insertion_vanishes() {
        let s = spec1();
        let e =
            wick_super_expectation(&s, &[SuperInsertion::phi_power(0.3, 0, 1)], &[]).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn phi_squared_cancellation() {
        // ⟨Φ(τ)²⟩ = 1/(2m²): the θθ̄ bracket 2⟨φω⟩ + 2⟨ψψ̄⟩-side cancels
        let s = spec1();
        let e =
            wick_super_expectation(&s, &[SuperInsertion::phi_power(0.7, 0, 2)], &[]).unwrap();
        assert_relative_eq!(e.scalar_part(), 0.5);
        assert_relative_eq!(e.coeff(&[0, 1]), 0.0);
    }

    #[test]
    fn two_point_matches_super_cov() {
        let s = spec1();
        for &(t, tim) in &[(0.5, -0.3), (0.0, 0.0), (-1.0, 2.0), (1.0, 0.0)] {
            let e = wick_super_expectation(
                &s,
                &[SuperInsertion::phi_power(t, 0, 1), SuperInsertion::phi_power(tim, 1, 1)],
                &[],
            )
            .unwrap();
            let c = super_cov(&s, t, tim);
            assert!(e.approx_eq(&c, 1e-12), "t={t} s={tim}:\n{e:?}\nvs\n{c:?}");
        }
    }

    #[test]
    fn phi_prefactor_against_super_cov_structure() {
        // ⟨φ(0)Φ(s,θ,θ̄)⟩ = (1/2m²)𝒢(|s|) + 𝒢(−s)θθ̄
        let s = spec1();
        for &tim in &[-0.7, 0.0, 0.4] {
            let e = wick_super_expectation(
                &s,
                &[SuperInsertion::phi_power(tim, 0, 1)],
                &[(0.0, 1)],
            )
            .unwrap();
            assert_relative_eq!(e.scalar_part(), s.phi_cov(0.0, tim), epsilon = 1e-12);
            assert_relative_eq!(e.coeff(&[0, 1]), s.kernel_g(-tim), epsilon = 1e-12);
        }
    }

    #[test]
    fn correlation_with_phi_is_supersymmetric_for_t_geq_s() {
        use crate::superfunction::{is_supersymmetric, SuperFunction};
        // C^Φ(t, s, θ, θ̄) = ⟨φ(t)Φ(s, θ, θ̄)⟩ as a superfunction of s
        let s = spec1();
        for &dt in &[0.0, 0.1, 1.0, 5.0] {
            for &t in &[0.0, 0.8] {
                let m2 = s.m * s.m;
                let f = SuperFunction::new(
                    ScalarFn::exp_scaled(1.0 / (2.0 * m2) * (-m2 * t).exp(), m2),
                    ScalarFn::zero(),
                    ScalarFn::zero(),
                    ScalarFn::exp_scaled((-m2 * t).exp(), m2),
                );
                // grid stays at or below t (where the closed form is valid)
                let grid: Vec<f64> = (0..10).map(|i| t - dt - 0.3 * i as f64).collect();
                assert!(is_supersymmetric(&f, &grid, 1e-10));
                // closed form agrees with the wick engine on the grid
                for &sv in &grid {
                    let e = wick_super_expectation(
                        &s,
                        &[SuperInsertion::phi_power(sv, 0, 1)],
                        &[(t, 1)],
                    )
                    .unwrap();
                    assert_relative_eq!(e.scalar_part(), f.f_empty.eval(sv), epsilon = 1e-12);
                    assert_relative_eq!(
                        e.coeff(&[0, 1]),
                        if sv == t { 0.5 } else { f.f_thetathetabar.eval(sv) },
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn fermionic_det_examples() {
        let s = spec1();
        assert_relative_eq!(fermionic_det(&s, &[0.3]), 0.5);
        assert_relative_eq!(fermionic_det(&s, &[0.3, -1.0]), 0.25);
        let times = [0.11, -0.7, 2.3, 1.4, -2.2];
        assert_relative_eq!(fermionic_det(&s, &times), 0.03125, epsilon = 1e-12);
    }

    #[test]
    fn fermionic_det_matches_wick_engine() {
        // ⟨∏ ψ̄(t_i)ψ(t_i)⟩ via the pairing engine equals the determinant
        let s = spec1();
        for times in [vec![0.4], vec![0.4, -0.2], vec![0.4, -0.2, 1.1], vec![0.0, 0.5, -0.5, 1.5]]
        {
            let mut ops = Vec::new();
            for &t in &times {
                ops.push(FieldSymbol::new(FieldKind::PsiBar, t));
                ops.push(FieldSymbol::new(FieldKind::Psi, t));
            }
            let via_engine = wick_expectation_ops(&s, &ops).unwrap();
            assert_relative_eq!(via_engine, fermionic_det(&s, &times), epsilon = 1e-12);
            assert_relative_eq!(via_engine, 0.5f64.powi(times.len() as i32), epsilon = 1e-12);
        }
    }

    #[test]
    fn bosonic_reduction_to_gaussian_moment() {
        // no fermionic/ω content: the super expectation is the Isserlis moment
        let s = CovarianceSpec::new(0.8);
        let pre = [(0.0, 2), (-0.5, 2)];
        let e = wick_super_expectation(&s, &[], &pre).unwrap();
        assert_relative_eq!(e.scalar_part(), gaussian_moment(&s, &pre).unwrap());
    }

    #[test]
    fn localization_single_level() {
        // ℓ=1, k=0, P=x²: lhs = −2g(0)⟨φ(0)²⟩ = −1 at m=1
        let s = spec1();
        let g = ScalarFn::bump(1.0);
        let p = Polynomial::monomial(2);
        let lhs = localization_lhs(&s, &[], &g, 1.0, &p, 1, 1e-8).unwrap();
        let rhs = localization_rhs(&s, &[], &g, &p, 1).unwrap();
        assert_relative_eq!(rhs, -1.0, epsilon = 1e-12);
        assert!((lhs - rhs).abs() < 1e-6, "lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn localization_odd_polynomial_vanishes() {
        let s = spec1();
        let g = ScalarFn::bump(1.0);
        let p = Polynomial::monomial(1);
        let lhs = localization_lhs(&s, &[], &g, 1.0, &p, 1, 1e-8).unwrap();
        assert!(lhs.abs() < 1e-8);
        assert_eq!(localization_rhs(&s, &[], &g, &p, 1).unwrap(), 0.0);
    }

    #[test]
    fn localization_exchange_symmetry() {
        // relabeling the insertion pair indices leaves the value unchanged
        let s = spec1();
        let g = ScalarFn::bump(1.0);
        let p = Polynomial::new(&[0.0, 1.0, 1.0]);
        let taus = [-0.2, -0.6];
        let pre = [(0.0, 2)];
        let build = |pairs: [u32; 2]| {
            let ins: Vec<SuperInsertion> = taus
                .iter()
                .zip(pairs)
                .map(|(&tau, pr)| SuperInsertion::with_poly(tau, pr, p.clone()))
                .collect();
            let mut e = wick_super_expectation(&s, &ins, &pre).unwrap();
            for (i, &tau) in taus.iter().enumerate() {
                let pr = pairs[i];
                let w = GrassmannElement::scalar(g.eval(tau)).add(&GrassmannElement::monomial(
                    &[2 * pr, 2 * pr + 1],
                    2.0 * g.deriv(tau),
                ));
                e = e.mul(&w);
            }
            let mut cur = e;
            for pr in pairs {
                cur = cur.berezin(&[2 * pr, 2 * pr + 1]).unwrap();
            }
            cur.scalar_part()
        };
        assert_relative_eq!(build([0, 1]), build([1, 0]), epsilon = 1e-12);
    }

    #[test]
    fn duplicate_pair_rejected() {
        let s = spec1();
        let r = wick_super_expectation(
            &s,
            &[SuperInsertion::phi_power(0.0, 0, 1), SuperInsertion::phi_power(1.0, 0, 1)],
            &[],
        );
        assert!(matches!(r, Err(WickError::DuplicatePairIndex(0))));
    }
}
