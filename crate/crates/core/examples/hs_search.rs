//! Searching for Hasse-Schmidt derivations tangent to the umbrella over F2.
//! Level by level the constraints are linear in the new unknowns, so the
//! search branches only over parameters that appear in a constraint.

use isosing::hs::{hs_search, hs_verify, HsDerivation, HsOutcome, SearchMode};
use isosing::parse::parse_poly;
use isosing::scalar::Field;
use isosing::trunc::{PolySystem, Ring};

fn main() {
    let ring = Ring::new(3, 3, &Field::parse("F2").unwrap()).unwrap();
    let p = |s: &str| parse_poly(s, &ring, false).unwrap();
    let f = PolySystem::single(p("x^2 + y^2*z"));

    for (r, mode) in [(1, SearchMode::Any), (1, SearchMode::Regular), (2, SearchMode::Regular)] {
        let out = hs_search(&f, r, 2, mode).unwrap();
        let result = match &out.outcome {
            HsOutcome::Found(d) => format!("found {:?}", d.levels().iter().map(|l| l.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
            HsOutcome::Exhausted => "exhausted".to_string(),
        };
        println!("order {r} {mode:?}: {result} ({} nodes, {} of {} parameters enumerated)", out.nodes, out.enumerated, out.parameters);
    }

    // why (0,0,1) fails: the first t-coefficient leaves y^2 behind
    for levels in [vec![vec!["0", "0", "1"]], vec![vec!["1", "1", "0"], vec!["0", "0", "1"]]] {
        let d = HsDerivation::new(&ring, levels.iter().map(|l| l.iter().map(|s| p(s)).collect()).collect()).unwrap();
        let report = hs_verify(&f, &d, 2).unwrap();
        match report.violation {
            Some(v) => println!("{levels:?}: fails at t^{} with residue {}", v.t_order, v.residue),
            None => println!("{levels:?}: passes"),
        }
    }
}
