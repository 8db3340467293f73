//! Localization at the path-estimator level: Monte Carlo averages of
//! superspace insertions over OU paths land on the closed-form one-point
//! moments from the symbolic engine.
//!
//!     cargo run --release --example estimator_localization

use supersde::poly::Polynomial;
use supersde::sde::{
    gaussian_expectation, super_expectation_estimate, super_poly_expectation_estimate,
    Observable, SimConfig,
};
use supersde::superfunction::lift_supersymmetric;
use supersde::superwick::{localization_lhs, CovarianceSpec};

fn main() {
    let mut config = SimConfig::standard();
    config.n_paths = 20_000;
    let spec = CovarianceSpec::new(config.m);

    // Exponential insertion: ⟨cos(φ(0)) e^{∫G·(−V)(Φ)}⟩ must equal the
    // stationary Gaussian average of cos(x)·e^{−2V(x)} (unnormalized).
    let g_sf = lift_supersymmetric(&config.f);
    let est = super_expectation_estimate(&config, Observable::Cos, &g_sf, &config.v).unwrap();
    let v = config.v.clone();
    let reference = gaussian_expectation(
        config.m,
        &|x| x.cos() * (-2.0 * v.eval(x)).exp(),
        &[],
        1e-9,
    )
    .unwrap();
    println!("exponential insertion, F = cos:");
    println!("  estimator = {:.6} +- {:.6}", est.mean, est.std_err);
    println!("  reference = {reference:.6}");

    // Polynomial insertions X^k with P = x²: the reference is
    // k! · (nested superspace integral), by the localization identity.
    let p = Polynomial::monomial(2);
    for (p0, k) in [(0u32, 1usize), (0, 2), (2, 1)] {
        let est = super_poly_expectation_estimate(&config, p0, &p, k).unwrap();
        let prefactor: Vec<(f64, u32)> = if p0 > 0 { vec![(0.0, p0)] } else { vec![] };
        let mut fact = 1.0;
        for j in 1..=k {
            fact *= j as f64;
        }
        let lhs = localization_lhs(
            &spec,
            &prefactor,
            &config.f,
            config.t_support,
            &p,
            k,
            1e-6,
        )
        .unwrap();
        println!("polynomial insertion phi(0)^{p0} * X^{k} with P = x^2:");
        println!("  estimator = {:.6} +- {:.6}", est.mean, est.std_err);
        println!("  reference = {:.6}", fact * lhs);
    }
}
