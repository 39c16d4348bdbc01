//! Contact orbits of all 2-jets in one variable over F3, found by exhaustive
//! search, compared with the fingerprint classes.

use std::collections::BTreeMap;

use isosing::isoscan::{brute_force_equiv, equiv_check, Verdict};
use isosing::parse::parse_poly;
use isosing::scalar::{Field, Scalar};
use isosing::tangent::fingerprint;
use isosing::trunc::{PolySystem, Ring, TruncPoly};

fn main() {
    let ring = Ring::new(1, 2, &Field::parse("F3").unwrap()).unwrap();
    let k = ring.field().clone();
    let elems: Vec<Scalar> = k.elements().collect();
    let mut jets = Vec::new();
    for a in &elems {
        for b in &elems {
            for c in &elems {
                jets.push(PolySystem::single(TruncPoly::from_coeffs(&ring, vec![a.clone(), b.clone(), c.clone()])));
            }
        }
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for (i, f) in jets.iter().enumerate() {
        match orbits.iter_mut().find(|o| brute_force_equiv(&jets[o[0]], f).unwrap().is_some()) {
            Some(o) => o.push(i),
            None => orbits.push(vec![i]),
        }
    }
    let mut by_fingerprint: BTreeMap<String, usize> = BTreeMap::new();
    for o in &orbits {
        let fp = fingerprint(&jets[o[0]]);
        *by_fingerprint.entry(format!("{:?} {:?}", fp.orders, fp.hilbert)).or_default() += 1;
        let members: Vec<String> = o.iter().map(|&i| jets[i].get(0).to_string()).collect();
        println!("orbit of size {:>2}: {}", o.len(), members.join(", "));
    }
    println!("{} orbits, {} fingerprint classes", orbits.len(), by_fingerprint.len());

    let p = |s: &str| PolySystem::single(parse_poly(s, &ring, false).unwrap());
    for (a, b) in [("x^2", "2*x^2"), ("x", "x + x^2"), ("x^2", "x")] {
        let verdict = match equiv_check(&p(a), &p(b), None).unwrap().verdict {
            Verdict::Equivalent { tier, .. } => format!("equivalent ({tier:?})"),
            Verdict::Inequivalent { by } => format!("inequivalent ({by:?})"),
        };
        println!("{a} vs {b}: {verdict}");
    }
}
