//! Over Q a regular logarithmic derivation straightens to a coordinate
//! vector field, splitting off a smooth factor.

use isosing::contact::PolyMatrix;
use isosing::derlog::{split_smooth_factors, straighten_and_split, Derivation};
use isosing::parse::parse_poly;
use isosing::scalar::Field;
use isosing::trunc::{PolySystem, Ring};

fn main() {
    let ring = Ring::new(3, 4, &Field::rationals()).unwrap();
    let p = |s: &str| parse_poly(s, &ring, false).unwrap();
    let f = PolySystem::single(p("(x + z^2)^2 + y^2"));

    // d = -2z d/dx + d/dz kills f
    let d = Derivation::new(vec![p("-2*z"), p("0"), p("1")], PolyMatrix::zeros(&ring, 1, 1), 4);
    println!("f = {f}; d(f) - M f = {:?}", d.residual(&f).unwrap().iter().map(|r| r.to_string()).collect::<Vec<_>>());
    let split = straighten_and_split(&f, &d).unwrap();
    let psi: Vec<String> = split.psi.iter().map(|q| q.to_string()).collect();
    println!("psi = ({}), residual {} (exact through degree {})", psi.join(", "), split.residual, split.precision);

    // the derivations can also be found automatically
    let big = Ring::new(3, 6, &Field::rationals()).unwrap();
    let g = PolySystem::single(parse_poly("(x + y*z)^2 + (y - z^2)^3", &big, false).unwrap());
    let multi = split_smooth_factors(&g, 6).unwrap();
    let names: Vec<&str> = multi.variables.iter().map(|&v| ring.names()[v].as_str()).collect();
    println!("g = {g}: split off {:?}, residual {} (exact through degree {})", names, multi.residual, multi.precision);
}
