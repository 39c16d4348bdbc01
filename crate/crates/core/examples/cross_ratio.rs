//! j-invariants of the tangent cones of x y (x + y)(x + z y) along the
//! z-axis: four lines through the origin whose cross-ratio varies with z.

use isosing::parse::parse_poly;
use isosing::scalar::Field;
use isosing::tangent::{quartic_j_invariant, tangent_cone};
use isosing::trunc::{PolySystem, Ring};

fn main() {
    let ring = Ring::new(3, 5, &Field::rationals()).unwrap();
    let k = ring.field().clone();
    let f = PolySystem::single(parse_poly("x*y*(x+y)*(x+z*y)", &ring, false).unwrap());
    for a in -2..=4 {
        let shifted = f.taylor_shift(&[k.zero(), k.zero(), k.from_int(a)]).unwrap();
        let cone = tangent_cone(shifted.get(0)).unwrap();
        match quartic_j_invariant(&cone) {
            Ok(j) => println!("z = {a:>2}: cone {cone}, j = {}", k.format(&j)),
            Err(e) => println!("z = {a:>2}: cone {cone}, no j-invariant ({e})"),
        }
    }
}
