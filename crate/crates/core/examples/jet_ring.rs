//! Truncated power series: products, inverses, substitution, Taylor shifts
//! and the exactness flag.

use isosing::parse::parse_poly;
use isosing::scalar::Field;
use isosing::trunc::{PolySystem, Ring};

fn main() {
    let ring = Ring::new(2, 4, &Field::rationals()).unwrap();
    let p = |s: &str| parse_poly(s, &ring, false).unwrap();

    let u = p("1 + x - y");
    println!("ring: {} variables, beta {}, dimension {}", ring.nvars(), ring.beta(), ring.dim());
    println!("(1 + x - y)^-1 = {}", u.inverse().unwrap());
    println!("(1 + x - y) * (1 + x - y)^-1 = {}", &u * &u.inverse().unwrap());
    println!("d/dx (x^2*y + y^3) = {}", p("x^2*y + y^3").derivative(0).unwrap());
    println!("(x^2 - y^3) o (x + y^2, y) = {}", p("x^2 - y^3").compose(&[p("x + y^2"), p("y")]).unwrap());

    let f = PolySystem::single(p("x^2 + y^3 - 1"));
    let a = vec![ring.field().from_int(1), ring.field().from_int(0)];
    println!("x^2 + y^3 - 1 shifted to (1, 0): {}", f.taylor_shift(&a).unwrap());

    // terms above beta are an error unless truncation is requested
    assert!(parse_poly("x^5", &ring, false).is_err());
    let t = parse_poly("x + x^5", &ring, true).unwrap();
    println!("x + x^5 truncated: {t} (exact: {})", t.is_exact());
}
