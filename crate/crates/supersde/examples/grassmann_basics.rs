//! Anticommuting generators, canonical form, and Berezin integration.
//!
//!     cargo run --example grassmann_basics

use supersde::grassmann::GrassmannElement;

fn main() {
    // θ and θ̄ are generators 0 and 1.
    let theta = GrassmannElement::generator(0);
    let thetabar = GrassmannElement::generator(1);

    // Anticommutation: θθ̄ = −θ̄θ, θ² = 0.
    let tt = theta.mul(&thetabar);
    let reversed = thetabar.mul(&theta);
    println!("theta*thetabar coeff on [0,1]: {:+}", tt.coeff(&[0, 1]));
    println!("thetabar*theta coeff on [0,1]: {:+}", reversed.coeff(&[0, 1]));
    println!("theta^2 is zero: {}", theta.mul(&theta).is_zero());

    // A general even element: a + b·θθ̄.
    let e = GrassmannElement::scalar(2.0).add(&tt.scale(3.0));
    println!("scalar part of 2 + 3*theta*thetabar: {}", e.scalar_part());

    // Products expand and re-sort with signs. (1 + θ)(1 + θ̄):
    let a = GrassmannElement::one().add(&theta);
    let b = GrassmannElement::one().add(&thetabar);
    let prod = a.mul(&b);
    for (key, c) in prod.iter() {
        println!("  coeff on {key:?}: {c:+}");
    }

    // Berezin integration picks out the top coefficient; the convention
    // here makes the double integral of θθ̄ equal −1.
    let integrated = tt.berezin(&[0, 1]).unwrap();
    println!(
        "berezin integral of theta*thetabar over (theta, thetabar): {}",
        integrated.scalar_part()
    );

    // Graded left derivative: ∂_θ(θθ̄) = θ̄.
    let d = tt.left_derivative(0);
    println!("d/dtheta of theta*thetabar -> coeff on [1]: {}", d.coeff(&[1]));
}
