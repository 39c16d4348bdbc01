//! The contact group acting on jets: action, composition, inverses and the
//! matrix complement used to complete a cofactor to an invertible matrix.

use isosing::contact::{mather_complement, ContactElement, PolyMatrix};
use isosing::linalg::Matrix;
use isosing::parse::parse_poly;
use isosing::scalar::Field;
use isosing::trunc::{PolySystem, Ring};

fn main() {
    let ring = Ring::new(2, 3, &Field::parse("F3").unwrap()).unwrap();
    let p = |s: &str| parse_poly(s, &ring, false).unwrap();
    let f = PolySystem::new(&ring, vec![p("x^2 + y^3"), p("x*y")]).unwrap();

    let m = PolyMatrix::from_rows(&ring, vec![vec![p("1 + x"), p("y")], vec![p("0"), p("2")]]).unwrap();
    let g = ContactElement::new(m, vec![p("x + y^2"), p("y + x*y")]).unwrap();
    let h = ContactElement::from_automorphism(&ring, 2, vec![p("y"), p("x")]).unwrap();

    println!("f       = {f}");
    println!("g . f   = {}", g.act(&f).unwrap());
    let gh = g.group_mul(&h).unwrap();
    assert_eq!(gh.act(&f).unwrap(), g.act(&h.act(&f).unwrap()).unwrap());
    println!("(g h) . f = g . (h . f) = {}", gh.act(&f).unwrap());
    let inv = g.invert().unwrap();
    assert!(inv.group_mul(&g).unwrap().is_identity());
    println!("g^-1 . (g . f) = {}", inv.act(&g.act(&f).unwrap()).unwrap());

    let k = Field::parse("F5").unwrap();
    let rows = |v: [[i64; 2]; 2]| v.iter().map(|r| r.iter().map(|&c| k.from_int(c)).collect()).collect();
    let a = Matrix::from_rows(&k, 2, rows([[1, 2], [3, 4]])).unwrap();
    let b = Matrix::from_rows(&k, 2, rows([[1, 0], [0, 0]])).unwrap();
    let c = mather_complement(&a, &b).unwrap();
    let d = c.mul(&Matrix::identity(&k, 2).sub(&a.mul(&b).unwrap())).unwrap().add(&b);
    println!("F5: C = {:?}, det(C(1 - AB) + B) = {}", fmt(&k, &c), k.format(&d.determinant().unwrap()));
}

fn fmt(k: &Field, m: &Matrix) -> Vec<Vec<String>> {
    m.row_vecs().iter().map(|r| r.iter().map(|c| k.format(c)).collect()).collect()
}
