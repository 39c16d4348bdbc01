//! The umbrella x^2 + y^2 z in characteristic p: the jets at every point of
//! the z-axis are contact equivalent, yet no logarithmic derivation moves the
//! origin along the axis. In characteristic 7 the fingerprints separate the
//! origin from the rest of the axis; in characteristic 2 they do not.

use isosing::contact::{verify_equivalence_witness, ContactElement};
use isosing::derlog::{solvable_directions, solve_log_derivation, LogDerResult};
use isosing::parse::parse_poly;
use isosing::scalar::{Field, Scalar};
use isosing::tangent::fingerprint;
use isosing::trunc::{PolySystem, Ring, TruncPoly};

fn shift(ring: &Ring, s: &Scalar) -> ContactElement {
    let x = &TruncPoly::var(ring, 0) + &TruncPoly::var(ring, 1).scale(s);
    ContactElement::from_automorphism(ring, 1, vec![x, TruncPoly::var(ring, 1), TruncPoly::var(ring, 2)]).unwrap()
}

fn main() {
    for (field, p, f_text) in [("F2", 2, "x^2 + y^2*z"), ("F7", 7, "x^7 + y^7*z")] {
        let ring = Ring::new(3, p + 1, &Field::parse(field).unwrap()).unwrap();
        let k = ring.field().clone();
        let f = PolySystem::single(parse_poly(f_text, &ring, false).unwrap());
        let origin = vec![k.zero(); 3];
        println!("{f_text} over {field}:");
        for t in k.elements() {
            // x -> x + t^(1/p) y carries the origin jet to the jet at (0, 0, t)
            let s = k.pth_root(&t).unwrap();
            let a = vec![k.zero(), k.zero(), t.clone()];
            let ok = verify_equivalence_witness(&f, &origin, &a, &shift(&ring, &s)).unwrap();
            println!("  (0,0,{}) witness x -> x + {}*y verified: {ok}", k.format(&t), k.format(&s));
        }
        match solve_log_derivation(&f, &[k.zero(), k.zero(), k.one()], p + 1).unwrap() {
            LogDerResult::Feasible { .. } => println!("  direction (0,0,1): a logarithmic derivation exists"),
            LogDerResult::Infeasible { proof } => {
                println!("  direction (0,0,1): infeasible, certificate with {} nonzero weights", proof.entries(&k).len())
            }
        }
    }

    let umbrella = "x^2 + y^2*z";
    for field in ["F7", "F2"] {
        let ring = Ring::new(3, 3, &Field::parse(field).unwrap()).unwrap();
        let k = ring.field().clone();
        let f = PolySystem::single(parse_poly(umbrella, &ring, false).unwrap());
        let at = |c: i64| fingerprint(&f.taylor_shift(&[k.zero(), k.zero(), k.from_int(c)]).unwrap());
        let dirs = solvable_directions(&f, 3).unwrap();
        println!(
            "{umbrella} over {field}: fingerprints at (0,0,0) and (0,0,1) equal: {}; solvable directions dim {}",
            at(0) == at(1),
            dirs.dim()
        );
    }
}
