//! Orbit tangent spaces and fingerprints of a few plane curve jets.

use isosing::parse::parse_poly;
use isosing::scalar::Field;
use isosing::tangent::{fingerprint, orbit_tangent_space, tangent_complement};
use isosing::trunc::{PolySystem, Ring};

fn main() {
    let ring = Ring::new(2, 5, &Field::rationals()).unwrap();
    for s in ["x", "x^2 + y^2", "x^2 + y^3", "x^2 + y^4", "x^3 + y^3", "x^2*y + y^4"] {
        let f = PolySystem::single(parse_poly(s, &ring, false).unwrap());
        let t = orbit_tangent_space(&f);
        let fp = fingerprint(&f);
        let basis: Vec<String> = tangent_complement(&f).iter().map(|&(_, m)| ring.format_monomial(m)).collect();
        println!("{s:<12} codim {:<2} hilbert {:?} orders {:?} complement [{}]", t.codim(), fp.hilbert, fp.orders, basis.join(", "));
    }
    let f = PolySystem::single(parse_poly("x^2 + y^3", &ring, false).unwrap());
    println!("{}", serde_json::to_string(&fingerprint(&f)).unwrap());
}
