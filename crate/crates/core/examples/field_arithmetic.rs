//! Exact arithmetic over Q, a prime field and a non-prime finite field.

use isosing::scalar::Field;

fn main() {
    let q = Field::parse("Q").unwrap();
    let a = q.parse_scalar("3/4").unwrap();
    let b = q.parse_scalar("-5/6").unwrap();
    println!("Q: (3/4) * (-5/6) = {}", q.format(&q.mul(&a, &b)));
    println!("Q: 1 / (-5/6) = {}", q.format(&q.inv(&b).unwrap()));

    let f7 = Field::parse("F7").unwrap();
    let three = f7.from_int(3);
    println!("F7: 3^-1 = {}, 3^6 = {}", f7.format(&f7.inv(&three).unwrap()), f7.format(&f7.pow(&three, 6)));

    // F4 = F2[t]/(t^2 + t + 1); every element is a square
    let f4 = Field::parse("F4").unwrap();
    println!("F4: characteristic {}, degree {}, modulus {:?}", f4.characteristic(), f4.degree(), f4.modulus().unwrap());
    for x in f4.elements() {
        let root = f4.pth_root(&x).unwrap();
        assert_eq!(f4.pow(&root, 2), x);
        println!("  x = {:<6} x^-1 = {:<6} sqrt(x) = {}", f4.format(&x), f4.inv(&x).map(|y| f4.format(&y)).unwrap_or("-".into()), f4.format(&root));
    }
}
