//! Inseparability certificates for x^2 + y^3 + z y^2 over F2: the origin and
//! (0, 0, 1) carry equivalent jets, and the linear system for a logarithmic
//! derivation in direction (0, 0, 1) is infeasible at several truncations.

use isosing::contact::ContactElement;
use isosing::derlog::inseparability_certificate;
use isosing::parse::parse_poly;
use isosing::scalar::Field;
use isosing::trunc::{PolySystem, Ring};

fn main() {
    let ring = Ring::new(3, 5, &Field::parse("F2").unwrap()).unwrap();
    let k = ring.field().clone();
    let p = |s: &str| parse_poly(s, &ring, false).unwrap();
    let f = PolySystem::single(p("x^2 + y^3 + z*y^2"));
    let g = ContactElement::from_automorphism(&ring, 1, vec![p("x + y"), p("y"), p("z")]).unwrap();
    let a = vec![k.zero(), k.zero(), k.one()];
    for beta_work in 3..=5 {
        let cert = inseparability_certificate(&f, &a, &g, beta_work).unwrap();
        let weights: Vec<String> = cert
            .proof
            .entries(&k)
            .iter()
            .map(|e| format!("{}*[eq {}, {}]", e.weight, e.component, e.monomial))
            .collect();
        println!("beta_work {beta_work}: verified {}; combination {}", cert.verify().unwrap(), weights.join(" + "));
    }
}
