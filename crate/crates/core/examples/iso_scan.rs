//! Classifying the points of a variety by the fingerprints of their jets.

use isosing::isoscan::{scan, Domain, DEFAULT_DOMAIN_CAP};
use isosing::parse::parse_poly;
use isosing::scalar::Field;
use isosing::trunc::{PolySystem, Ring};
use num_bigint::BigInt;
use num_rational::BigRational;

fn report(label: &str, f: &PolySystem, domain: Domain) {
    let k = f.field().clone();
    let out = scan(f, &domain, DEFAULT_DOMAIN_CAP).unwrap();
    println!("{label}: {} points, {} classes (field relative: {})", out.points.len(), out.classes.len(), out.field_relative());
    for (i, class) in out.classes.iter().enumerate() {
        let pts: Vec<String> = out
            .class_points(i)
            .iter()
            .map(|a| format!("({})", a.iter().map(|c| k.format(c)).collect::<Vec<_>>().join(",")))
            .collect();
        let smooth = out.points[class.members[0]].smooth;
        let js: Vec<String> = class.j_invariants.iter().map(|j| k.format(j)).collect();
        println!("  class {i}: smooth {smooth}, hilbert {:?}, j {js:?}, points {}", class.fingerprint.hilbert, pts.join(" "));
    }
}

fn main() {
    for field in ["F2", "F7"] {
        let ring = Ring::new(3, 3, &Field::parse(field).unwrap()).unwrap();
        let f = PolySystem::single(parse_poly("x^2 + y^2*z", &ring, false).unwrap());
        report(&format!("x^2 + y^2 z over {field}"), &f, Domain::AllPoints);
    }
    let ring = Ring::new(3, 5, &Field::rationals()).unwrap();
    let f = PolySystem::single(parse_poly("x*y*(x+y)*(x+z*y)", &ring, false).unwrap());
    let int = |n: i64| BigRational::from_integer(BigInt::from(n));
    let domain = Domain::RationalBox { lower: int(-1), upper: int(1), max_denominator: 1 };
    report("x y (x + y)(x + z y) over Q, integer points in [-1, 1]^3", &f, domain);
}
