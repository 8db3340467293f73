//! Wong–Zakai-style consistency: replace white noise and the path by
//! mollified versions and watch the discretized integral
//! ∫ f(t)V′(φ_ε(t)) ω_ε(t) dt converge to the Stratonovich reference as
//! the mollifier width ε shrinks.
//!
//!     cargo run --release --example mollified_noise

use supersde::sde::{wong_zakai_check, SimConfig};

fn main() {
    let mut config = SimConfig::standard();
    config.h = (2.0f64).powi(-8);

    let epsilons = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let rows = wong_zakai_check(&config, &epsilons).unwrap();
    println!("{:>8}  {:>14}", "eps", "|I_eps - I|");
    for (eps, err) in &rows {
        println!("{eps:>8}  {err:>14.6e}");
    }
    let decreasing = rows.windows(2).all(|w| w[1].1 <= w[0].1);
    println!("monotone decrease along the ladder: {decreasing}");
}
