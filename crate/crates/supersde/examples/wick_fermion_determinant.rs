//! Gaussian Wick expectations for the bosonic pair (φ, ω) and the
//! fermionic pair (ψ, ψ̄), and the determinant collapse ⟨∏ψ̄ψ⟩ = 2^{−n}.
//!
//!     cargo run --example wick_fermion_determinant

use supersde::superwick::{
    fermionic_det, wick_expectation_ops, CovarianceSpec, FieldKind, FieldSymbol,
};

fn main() {
    let spec = CovarianceSpec::new(1.0);

    // Two-point functions. The mixed ⟨φω⟩ kernel is one-sided in time.
    let phi = |t| FieldSymbol::new(FieldKind::Phi, t);
    let omega = |t| FieldSymbol::new(FieldKind::Omega, t);
    let psi = |t| FieldSymbol::new(FieldKind::Psi, t);
    let psibar = |t| FieldSymbol::new(FieldKind::PsiBar, t);

    let pairs: [(&str, [FieldSymbol; 2]); 5] = [
        ("<phi(0.3) phi(0.8)>", [phi(0.3), phi(0.8)]),
        ("<phi(0.8) omega(0.3)>", [phi(0.8), omega(0.3)]),
        ("<phi(0.3) omega(0.8)>", [phi(0.3), omega(0.8)]),
        ("<psibar(0.3) psi(0.8)>", [psibar(0.3), psi(0.8)]),
        ("<psi(0.3) psibar(0.8)>", [psi(0.3), psibar(0.8)]),
    ];
    for (label, ops) in &pairs {
        println!("{label:24} = {:+.12}", wick_expectation_ops(&spec, ops).unwrap());
    }

    // A four-point bosonic moment via the pairing recursion.
    let ops = [phi(0.0), phi(0.2), phi(0.5), phi(0.9)];
    println!(
        "<phi phi phi phi>        = {:+.12}",
        wick_expectation_ops(&spec, &ops).unwrap()
    );

    // Equal-time fermionic products: each ψ̄ψ insertion contributes a
    // factor ½ regardless of where the times sit, because the kernel
    // matrix is triangular up to its ½ diagonal.
    for n in 1..=6 {
        let times: Vec<f64> = (0..n).map(|i| -0.7 + 0.41 * i as f64).collect();
        let det = fermionic_det(&spec, &times);
        println!("n = {n}: det = {det:.15}  (2^-{n} = {})", (0.5f64).powi(n as i32));
    }

    // The same number out of the generic Wick engine with explicit signs.
    let mut ops = Vec::new();
    for &t in &[0.1, -0.4, 0.7] {
        ops.push(psibar(t));
        ops.push(psi(t));
    }
    println!(
        "wick engine, n = 3:      {:+.15}",
        wick_expectation_ops(&spec, &ops).unwrap()
    );
}
