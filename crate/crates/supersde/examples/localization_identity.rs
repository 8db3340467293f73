//! Supersymmetric localization: nested superspace integrals of cutoff
//! insertions collapse to one-point Gaussian moments,
//! ∫…∫ ⟨∏ P(Φ(τ_i))G(τ_i)⟩ = (−2g(t_k))^ℓ/ℓ! · ⟨prefactor · P(φ(t_k))^ℓ⟩.
//!
//!     cargo run --example localization_identity

use supersde::poly::Polynomial;
use supersde::scalar::ScalarFn;
use supersde::superwick::{localization_lhs, localization_rhs, CovarianceSpec};

fn main() {
    let spec = CovarianceSpec::new(1.0);
    let g = ScalarFn::bump(1.0);
    let quad_tol = 1e-6;

    // Insertion polynomials P and bosonic prefactors ∏φ(t_i)^{d_i}.
    let polys = [
        ("x", Polynomial::monomial(1)),
        ("x^2", Polynomial::monomial(2)),
        ("x^2+x", Polynomial::new(&[0.0, 1.0, 1.0])),
    ];
    let prefactors: [(&str, Vec<(f64, u32)>); 3] = [
        ("1", vec![]),
        ("phi(0)", vec![(0.0, 1)]),
        ("phi(0.5)phi(0)", vec![(0.5, 1), (0.0, 1)]),
    ];

    for ell in 1..=2 {
        for (pname, p) in &polys {
            for (fname, pre) in &prefactors {
                let lhs = localization_lhs(&spec, pre, &g, 1.0, p, ell, quad_tol).unwrap();
                let rhs = localization_rhs(&spec, pre, &g, p, ell).unwrap();
                println!(
                    "ell={ell}  P={pname:6}  prefactor={fname:15}  \
                     nested = {lhs:+.9}  collapsed = {rhs:+.9}  diff = {:.2e}",
                    (lhs - rhs).abs()
                );
            }
        }
    }
}
