//! Point scans of `V(f)` classified by contact fingerprints of the recentred
//! jets, and an exhaustive orbit oracle for very small jet spaces.
//!
//! Fingerprints only refute: two points in different classes have
//! inequivalent `beta`-jets, two points in one class are merely candidates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::contact::{ContactElement, ContactError, PolyMatrix};
use crate::linalg::Matrix;
use crate::scalar::{Field, Scalar};
use crate::tangent::{fingerprint, quartic_j_invariant, tangent_cone, Fingerprint};
use crate::trunc::{PolySystem, TruncError, TruncPoly};

pub const DEFAULT_DOMAIN_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("domain has {candidates} candidate points, above the cap {cap}")]
    DomainTooLarge { candidates: String, cap: u64 },
    #[error("domain does not fit the field: {0}")]
    DomainMismatch(String),
    #[error("point is not on the variety: {0}")]
    NotOnVariety(String),
    #[error("brute-force search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("exhaustive search needs a finite field")]
    FieldNotFinite,
    #[error("systems live over different rings")]
    SpecMismatch,
    #[error(transparent)]
    Trunc(#[from] TruncError),
    #[error(transparent)]
    Contact(#[from] ContactError),
}

/// Jet order used when none is given: twice the total degree. This is a
/// heuristic, not a determinacy bound.
pub fn default_beta(total_degree: usize) -> usize {
    (2 * total_degree).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// Every point of `F_q^N`.
    AllPoints,
    /// Points with every coordinate `p/q` in `[lower, upper]` with `q <= max_denominator`.
    RationalBox { lower: BigRational, upper: BigRational, max_denominator: u64 },
}

/// Sorted coordinate values of a rational box.
fn box_values(lower: &BigRational, upper: &BigRational, max_denominator: u64, cap: u64) -> Result<Vec<BigRational>, ScanError> {
    if max_denominator == 0 || lower > upper {
        return Err(ScanError::DomainMismatch("empty rational box".into()));
    }
    let mut values = Vec::new();
    for den in 1..=max_denominator {
        let d = BigInt::from(den);
        let lo = (lower * BigRational::from_integer(d.clone())).ceil().to_integer();
        let hi = (upper * BigRational::from_integer(d.clone())).floor().to_integer();
        if &hi - &lo + 1 > BigInt::from(cap) {
            return Err(ScanError::DomainTooLarge { candidates: format!(">{cap}"), cap });
        }
        let mut num = lo;
        while num <= hi {
            if num.gcd(&d).is_one() {
                values.push(BigRational::new(num.clone(), d.clone()));
            }
            num += 1;
        }
        if values.len() as u64 > cap {
            return Err(ScanError::DomainTooLarge { candidates: format!(">{cap}"), cap });
        }
    }
    values.sort();
    Ok(values)
}

/// All points of `domain` where every equation vanishes, in lexicographic
/// order of the canonical element order.
pub fn enumerate_points(f: &PolySystem, domain: &Domain, cap: u64) -> Result<Vec<Vec<Scalar>>, ScanError> {
    let k = f.field().clone();
    let nvars = f.ring().nvars();
    let values: Vec<Scalar> = match domain {
        Domain::AllPoints => {
            if !k.is_finite() {
                return Err(ScanError::DomainMismatch("all points of an infinite field".into()));
            }
            k.elements().collect()
        }
        Domain::RationalBox { lower, upper, max_denominator } => {
            if k.is_finite() {
                return Err(ScanError::DomainMismatch(format!("rational box over {k}")));
            }
            box_values(lower, upper, *max_denominator, cap)?.into_iter().map(Scalar::Rational).collect()
        }
    };
    let total = BigInt::from(values.len()).pow(nvars as u32);
    if total > BigInt::from(cap) {
        return Err(ScanError::DomainTooLarge { candidates: total.to_string(), cap });
    }
    let total = total.to_usize().expect("below cap");
    let candidates: Vec<Vec<Scalar>> = (0..total)
        .map(|mut code| {
            let mut point = vec![k.zero(); nvars];
            for slot in point.iter_mut().rev() {
                *slot = values[code % values.len()].clone();
                code /= values.len();
            }
            point
        })
        .collect();
    let keep: Vec<bool> = candidates.par_iter().map(|a| f.vanishes_at(a)).collect::<Result<_, _>>()?;
    Ok(candidates.into_iter().zip(keep).filter_map(|(a, k)| k.then_some(a)).collect())
}

#[derive(Debug, Clone)]
pub struct PointReport {
    pub point: Vec<Scalar>,
    pub fingerprint: Fingerprint,
    /// Jacobian rank at the point equals the number of equations.
    pub smooth: bool,
    /// Index into [`ScanReport::classes`].
    pub class: usize,
    /// j-invariant of the tangent cone when it is a binary quartic with four
    /// distinct rational lines.
    pub j_invariant: Option<Scalar>,
}

#[derive(Debug, Clone)]
pub struct ScanClass {
    pub fingerprint: Fingerprint,
    pub members: Vec<usize>,
    /// Distinct j-invariants among the members, in order of first appearance.
    pub j_invariants: Vec<Scalar>,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub system: PolySystem,
    pub points: Vec<PointReport>,
    pub classes: Vec<ScanClass>,
}

impl ScanReport {
    /// Over a non-closed field the classes describe rational points only.
    pub fn field_relative(&self) -> bool {
        !self.system.field().is_finite()
    }

    pub fn class_points(&self, class: usize) -> Vec<&[Scalar]> {
        self.classes[class].members.iter().map(|&i| self.points[i].point.as_slice()).collect()
    }
}

fn format_point(k: &Field, a: &[Scalar]) -> String {
    format!("({})", a.iter().map(|c| k.format(c)).collect::<Vec<_>>().join(", "))
}

/// Fingerprints `f(x + a)` at every point and partitions by equality.
pub fn classify(f: &PolySystem, points: &[Vec<Scalar>]) -> Result<ScanReport, ScanError> {
    let k = f.field().clone();
    let analysed: Vec<(Fingerprint, bool, Option<Scalar>)> = points
        .par_iter()
        .map(|a| {
            if !f.vanishes_at(a)? {
                return Err(ScanError::NotOnVariety(format_point(&k, a)));
            }
            let shifted = f.taylor_shift(a)?;
            let smooth = f.jacobian_at(a)?.rank() == f.len();
            let j = match shifted.polys() {
                [g] => tangent_cone(g).and_then(|c| quartic_j_invariant(&c)).ok(),
                _ => None,
            };
            Ok((fingerprint(&shifted), smooth, j))
        })
        .collect::<Result<_, ScanError>>()?;
    let mut classes: Vec<ScanClass> = Vec::new();
    let mut reports = Vec::with_capacity(points.len());
    for (i, (fp, smooth, j)) in analysed.into_iter().enumerate() {
        let class = match classes.iter().position(|c| c.fingerprint == fp) {
            Some(c) => c,
            None => {
                classes.push(ScanClass { fingerprint: fp.clone(), members: Vec::new(), j_invariants: Vec::new() });
                classes.len() - 1
            }
        };
        classes[class].members.push(i);
        if let Some(j) = &j {
            if !classes[class].j_invariants.contains(j) {
                classes[class].j_invariants.push(j.clone());
            }
        }
        reports.push(PointReport { point: points[i].clone(), fingerprint: fp, smooth, class, j_invariant: j });
    }
    Ok(ScanReport { system: f.clone(), points: reports, classes })
}

/// [`enumerate_points`] followed by [`classify`].
pub fn scan(f: &PolySystem, domain: &Domain, cap: u64) -> Result<ScanReport, ScanError> {
    classify(f, &enumerate_points(f, domain, cap)?)
}

fn check_brute_force_limits(f: &PolySystem) -> Result<u32, ScanError> {
    let ring = f.ring();
    let q = f.field().order().ok_or(ScanError::FieldNotFinite)?;
    let too_large = |what: String| Err(ScanError::SearchSpaceTooLarge(what));
    if ring.nvars() > 2 {
        return too_large(format!("{} variables (at most 2)", ring.nvars()));
    }
    if f.len() != 1 {
        return too_large(format!("{} equations (exactly 1)", f.len()));
    }
    if ring.beta() > 2 {
        return too_large(format!("beta = {} (at most 2)", ring.beta()));
    }
    if q > 3 {
        return too_large(format!("q = {q} (at most 3)"));
    }
    Ok(q)
}

/// Exhaustive search for `g0` in the contact group with `g0 . f = g`.
///
/// Layer `d` fixes the degree-`d` parts of the unit `M` and of `phi`. The
/// degree-`d` part of `M (f o phi)` depends only on layers `<= d` and is
/// affine in layer `d` with one independent equation per monomial, so each
/// layer is enumerated monomial by monomial.
pub fn brute_force_equiv(f: &PolySystem, g: &PolySystem) -> Result<Option<ContactElement>, ScanError> {
    if f.ring() != g.ring() || f.len() != g.len() {
        return Err(ScanError::SpecMismatch);
    }
    check_brute_force_limits(f)?;
    let ring = f.ring().clone();
    let k = ring.field().clone();
    let search = Layers {
        k: &k,
        elements: k.elements().collect(),
        f: f.get(0).clone(),
        g: g.get(0).clone(),
    };
    let mut m = TruncPoly::zero(&ring);
    let mut phi = vec![TruncPoly::zero(&ring); ring.nvars()];
    let found = search.elements.iter().filter(|c| !k.is_zero(c)).any(|m0| {
        if k.mul(m0, search.f.constant_term()) != *search.g.constant_term() {
            return false;
        }
        m.set_coeff(0, m0.clone());
        search.descend(1, &mut m, &mut phi).expect("layer arithmetic")
    });
    if !found {
        return Ok(None);
    }
    let witness = ContactElement::new(PolyMatrix::from_rows(&ring, vec![vec![m]])?, phi)?;
    assert_eq!(witness.act(f)?, *g, "brute-force witness must map f to g");
    Ok(Some(witness))
}

struct Layers<'a> {
    k: &'a Field,
    elements: Vec<Scalar>,
    f: TruncPoly,
    g: TruncPoly,
}

impl Layers<'_> {
    fn descend(&self, d: usize, m: &mut TruncPoly, phi: &mut [TruncPoly]) -> Result<bool, TruncError> {
        let ring = m.ring().clone();
        if d > ring.beta() {
            return Ok(true);
        }
        let k = self.k;
        let nvars = ring.nvars();
        let base = (&*m * &self.f.compose(phi)?).homogeneous_part(d);
        let f0 = self.f.constant_term().clone();
        let m0 = m.constant_term().clone();
        let grad: Vec<Scalar> = (0..nvars).map(|j| self.f.coeff(1 + j).clone()).collect();
        // per monomial: f0 a + m0 sum_j grad_j b_j = g_m - base_m
        let monomials: Vec<usize> = ring.degree_range(d).collect();
        let q = self.elements.len();
        let width = nvars + 1;
        let mut choices: Vec<Vec<Vec<Scalar>>> = Vec::with_capacity(monomials.len());
        for &mono in &monomials {
            let rhs = k.sub(self.g.coeff(mono), base.coeff(mono));
            let mut sols = Vec::new();
            for code in 0..q.pow(width as u32) {
                let mut c = code;
                let tuple: Vec<Scalar> = (0..width)
                    .map(|_| {
                        let e = self.elements[c % q].clone();
                        c /= q;
                        e
                    })
                    .collect();
                let mut lhs = k.mul(&f0, &tuple[0]);
                for j in 0..nvars {
                    lhs = k.add(&lhs, &k.mul(&m0, &k.mul(&grad[j], &tuple[1 + j])));
                }
                if lhs == rhs {
                    sols.push(tuple);
                }
            }
            if sols.is_empty() {
                return Ok(false);
            }
            choices.push(sols);
        }
        let mut index = vec![0usize; monomials.len()];
        loop {
            for (slot, &mono) in monomials.iter().enumerate() {
                let tuple = &choices[slot][index[slot]];
                m.set_coeff(mono, tuple[0].clone());
                for j in 0..nvars {
                    phi[j].set_coeff(mono, tuple[1 + j].clone());
                }
            }
            let admissible = d != 1 || linear_determinant(k, phi, nvars) != k.zero();
            if admissible && self.descend(d + 1, m, phi)? {
                return Ok(true);
            }
            // odometer over the per-monomial solution lists
            let mut slot = 0;
            loop {
                if slot == index.len() {
                    for &mono in &monomials {
                        m.set_coeff(mono, k.zero());
                        for p in phi.iter_mut() {
                            p.set_coeff(mono, k.zero());
                        }
                    }
                    return Ok(false);
                }
                index[slot] += 1;
                if index[slot] < choices[slot].len() {
                    break;
                }
                index[slot] = 0;
                slot += 1;
            }
        }
    }
}

fn linear_determinant(k: &Field, phi: &[TruncPoly], nvars: usize) -> Scalar {
    let rows = phi.iter().map(|p| (0..nvars).map(|j| p.coeff(1 + j).clone()).collect()).collect();
    Matrix::from_rows(k, nvars, rows).expect("square").determinant().expect("square")
}

/// Confidence of a positive equivalence report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    /// An explicit contact element was checked.
    Witnessed,
    /// Found by exhaustive search of the contact group.
    Exhaustive,
    /// Fingerprints agree; nothing more is known.
    Candidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refutation {
    Fingerprint,
    Exhaustive,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Equivalent { tier: Tier, witness: Option<ContactElement> },
    /// Definitive at the ring's `beta`.
    Inequivalent { by: Refutation },
}

#[derive(Debug, Clone)]
pub struct EquivReport {
    pub verdict: Verdict,
    /// Outcome of checking a supplied witness, if one was given.
    pub supplied_witness_valid: Option<bool>,
}

/// Decides `beta`-jet contact equivalence as far as the tools allow:
/// a valid supplied witness, then fingerprints, then brute force when the
/// space is small enough.
pub fn equiv_check(f: &PolySystem, g: &PolySystem, witness: Option<&ContactElement>) -> Result<EquivReport, ScanError> {
    if f.ring() != g.ring() || f.len() != g.len() {
        return Err(ScanError::SpecMismatch);
    }
    let supplied_witness_valid = witness.map(|w| w.act(f).map(|h| h == *g)).transpose()?;
    if supplied_witness_valid == Some(true) {
        let verdict = Verdict::Equivalent { tier: Tier::Witnessed, witness: witness.cloned() };
        return Ok(EquivReport { verdict, supplied_witness_valid });
    }
    let verdict = if fingerprint(f) != fingerprint(g) {
        Verdict::Inequivalent { by: Refutation::Fingerprint }
    } else if check_brute_force_limits(f).is_ok() {
        match brute_force_equiv(f, g)? {
            Some(w) => Verdict::Equivalent { tier: Tier::Exhaustive, witness: Some(w) },
            None => Verdict::Inequivalent { by: Refutation::Exhaustive },
        }
    } else {
        Verdict::Equivalent { tier: Tier::Candidate, witness: None }
    };
    Ok(EquivReport { verdict, supplied_witness_valid })
}

/// Parses `a/b` or `a` as a rational bound.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::one()),
    };
    (!den.is_zero()).then(|| BigRational::new(num, den))
}

/// Number of values in a rational box coordinate, for reporting.
pub fn box_size(lower: &BigRational, upper: &BigRational, max_denominator: u64) -> Option<usize> {
    box_values(lower, upper, max_denominator, u64::MAX).ok().map(|v| v.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::verify_equivalence_witness;
    use crate::parse::parse_poly;
    use crate::trunc::Ring;

    fn ring(n: usize, beta: usize, field: &str) -> Ring {
        Ring::new(n, beta, &Field::parse(field).unwrap()).unwrap()
    }

    fn sys(r: &Ring, s: &str) -> PolySystem {
        PolySystem::single(parse_poly(s, r, false).unwrap())
    }

    fn pt(k: &Field, c: &[i64]) -> Vec<Scalar> {
        c.iter().map(|&v| k.from_int(v)).collect()
    }

    /// All jets of a one-equation system over a finite field.
    fn all_jets(r: &Ring) -> Vec<PolySystem> {
        let k = r.field();
        let elems: Vec<Scalar> = k.elements().collect();
        let q = elems.len();
        (0..q.pow(r.dim() as u32))
            .map(|mut code| {
                let coeffs = (0..r.dim())
                    .map(|_| {
                        let e = elems[code % q].clone();
                        code /= q;
                        e
                    })
                    .collect();
                PolySystem::single(TruncPoly::from_coeffs(r, coeffs))
            })
            .collect()
    }

    #[test]
    fn enumerate_examples() {
        let r = ring(3, 3, "F2");
        let k = r.field().clone();
        let pts = enumerate_points(&sys(&r, "x^2+y^2*z"), &Domain::AllPoints, DEFAULT_DOMAIN_CAP).unwrap();
        assert_eq!(pts, vec![pt(&k, &[0, 0, 0]), pt(&k, &[0, 0, 1]), pt(&k, &[0, 1, 0]), pt(&k, &[1, 1, 1])]);

        let r = ring(1, 1, "F3");
        assert_eq!(enumerate_points(&sys(&r, "x"), &Domain::AllPoints, 10).unwrap(), vec![pt(r.field(), &[0])]);

        let r = ring(1, 2, "Q");
        let bx = Domain::RationalBox { lower: parse_rational("-2").unwrap(), upper: parse_rational("2").unwrap(), max_denominator: 3 };
        assert!(enumerate_points(&sys(&r, "x^2+1"), &bx, 100).unwrap().is_empty());
    }

    #[test]
    fn rational_box_contents() {
        let r = ring(1, 2, "Q");
        let bx = Domain::RationalBox { lower: parse_rational("-1").unwrap(), upper: parse_rational("1").unwrap(), max_denominator: 2 };
        let roots = enumerate_points(&sys(&r, "4*x^2-1"), &bx, 100).unwrap();
        let k = r.field();
        let shown: Vec<String> = roots.iter().map(|p| k.format(&p[0])).collect();
        assert_eq!(shown, vec!["-1/2", "1/2"]);
        assert_eq!(box_size(&parse_rational("-1").unwrap(), &parse_rational("1").unwrap(), 2), Some(5));
    }

    #[test]
    fn domain_cap() {
        let r = ring(3, 2, "F7");
        let err = enumerate_points(&sys(&r, "x"), &Domain::AllPoints, 100).unwrap_err();
        assert!(matches!(err, ScanError::DomainTooLarge { .. }));
        let r = ring(1, 2, "Q");
        assert!(matches!(enumerate_points(&sys(&r, "x"), &Domain::AllPoints, 100), Err(ScanError::DomainMismatch(_))));
    }

    #[test]
    fn umbrella_classes_over_f2() {
        let r = ring(3, 3, "F2");
        let k = r.field().clone();
        let report = scan(&sys(&r, "x^2+y^2*z"), &Domain::AllPoints, DEFAULT_DOMAIN_CAP).unwrap();
        assert_eq!(report.classes.len(), 2);
        assert_eq!(report.class_points(0), vec![&pt(&k, &[0, 0, 0])[..], &pt(&k, &[0, 0, 1])[..]]);
        assert_eq!(report.class_points(1), vec![&pt(&k, &[0, 1, 0])[..], &pt(&k, &[1, 1, 1])[..]]);
        let smooth: Vec<bool> = report.points.iter().map(|p| p.smooth).collect();
        assert_eq!(smooth, vec![false, false, true, true]);
        assert!(!report.field_relative());
    }

    #[test]
    fn umbrella_z_axis_separates_over_f7() {
        let r = ring(3, 3, "F7");
        let k = r.field().clone();
        let report = classify(&sys(&r, "x^2+y^2*z"), &[pt(&k, &[0, 0, 0]), pt(&k, &[0, 0, 1])]).unwrap();
        assert_ne!(report.points[0].fingerprint, report.points[1].fingerprint);
        assert_eq!(report.classes.len(), 2);
    }

    #[test]
    fn smooth_parabola_is_one_class() {
        let r = ring(2, 4, "F5");
        let report = scan(&sys(&r, "x-y^2"), &Domain::AllPoints, DEFAULT_DOMAIN_CAP).unwrap();
        assert_eq!(report.points.len(), 5);
        assert_eq!(report.classes.len(), 1);
        assert!(report.points.iter().all(|p| p.smooth));
    }

    #[test]
    fn cross_ratio_column() {
        let r = ring(3, 5, "Q");
        let k = r.field().clone();
        let f = sys(&r, "x*y*(x+y)*(x+z*y)");
        let report = classify(&f, &[pt(&k, &[0, 0, 2]), pt(&k, &[0, 0, 3])]).unwrap();
        let js: Vec<String> = report.points.iter().map(|p| k.format(p.j_invariant.as_ref().unwrap())).collect();
        assert_eq!(js, vec!["1728", "21952/9"]);
        assert!(report.field_relative());
    }

    #[test]
    fn off_variety_points_are_rejected() {
        let r = ring(2, 2, "F3");
        let k = r.field().clone();
        assert!(matches!(classify(&sys(&r, "x"), &[pt(&k, &[1, 0])]), Err(ScanError::NotOnVariety(_))));
    }

    #[test]
    fn shift_consistency() {
        let r = ring(2, 4, "F3");
        let k = r.field().clone();
        for f in ["x^2-y^3", "x*y*(x+y)", "x^2+y^2-x*y^2"] {
            let f = sys(&r, f);
            for c in [[1, 0], [2, 1], [0, 2]] {
                let c = pt(&k, &c);
                let g = f.taylor_shift(&c).unwrap();
                let a = classify(&f, &enumerate_points(&f, &Domain::AllPoints, 100).unwrap()).unwrap();
                let pts_g = enumerate_points(&g, &Domain::AllPoints, 100).unwrap();
                let b = classify(&g, &pts_g).unwrap();
                assert_eq!(a.points.len(), b.points.len());
                for pb in &b.points {
                    let moved: Vec<Scalar> = pb.point.iter().zip(&c).map(|(x, y)| k.add(x, y)).collect();
                    let pa = a.points.iter().find(|p| p.point == moved).expect("translated point");
                    assert_eq!(pa.fingerprint, pb.fingerprint);
                }
            }
        }
    }

    #[test]
    fn witnessed_points_share_a_class() {
        let r = ring(3, 3, "F2");
        let k = r.field().clone();
        let f = sys(&r, "x^2+y^2*z");
        let phi = vec![parse_poly("x+y", &r, false).unwrap(), TruncPoly::var(&r, 1), TruncPoly::var(&r, 2)];
        let g = ContactElement::from_automorphism(&r, 1, phi).unwrap();
        let (a1, a2) = (pt(&k, &[0, 0, 0]), pt(&k, &[0, 0, 1]));
        assert!(verify_equivalence_witness(&f, &a1, &a2, &g).unwrap());
        let report = classify(&f, &[a1, a2]).unwrap();
        assert_eq!(report.points[0].class, report.points[1].class);
    }

    #[test]
    fn brute_force_examples() {
        let r = ring(1, 2, "F2");
        let f = sys(&r, "x^2");
        assert!(brute_force_equiv(&f, &f).unwrap().is_some());
        assert!(brute_force_equiv(&f, &sys(&r, "x")).unwrap().is_none());
        let truncated = PolySystem::single(parse_poly("x^2+x^3", &r, true).unwrap());
        assert!(brute_force_equiv(&f, &truncated).unwrap().is_some());
        let big = ring(3, 2, "F2");
        assert!(matches!(brute_force_equiv(&sys(&big, "x"), &sys(&big, "x")), Err(ScanError::SearchSpaceTooLarge(_))));
        let q = ring(1, 2, "Q");
        assert_eq!(brute_force_equiv(&sys(&q, "x"), &sys(&q, "x")).unwrap_err(), ScanError::FieldNotFinite);
    }

    /// Orbits by closing under every group element, independent of the
    /// layered search.
    fn orbit_partition_by_group(r: &Ring) -> Vec<usize> {
        let jets = all_jets(r);
        let k = r.field();
        let units: Vec<TruncPoly> = all_jets(r).into_iter().map(|s| s.get(0).clone()).filter(|p| p.is_unit()).collect();
        let linear_free: Vec<TruncPoly> =
            all_jets(r).into_iter().map(|s| s.get(0).clone()).filter(|p| k.is_zero(p.constant_term())).collect();
        let mut group = Vec::new();
        for u in &units {
            for phi in &linear_free {
                if let Ok(g) = ContactElement::new(PolyMatrix::from_rows(r, vec![vec![u.clone()]]).unwrap(), vec![phi.clone()]) {
                    group.push(g);
                }
            }
        }
        let index = |s: &PolySystem| jets.iter().position(|t| t == s).unwrap();
        let mut label = vec![usize::MAX; jets.len()];
        for i in 0..jets.len() {
            if label[i] == usize::MAX {
                for g in &group {
                    label[index(&g.act(&jets[i]).unwrap())] = i;
                }
            }
        }
        label
    }

    #[test]
    fn brute_force_matches_orbit_closure_n1() {
        for field in ["F2", "F3"] {
            let r = ring(1, 2, field);
            let jets = all_jets(&r);
            let label = orbit_partition_by_group(&r);
            for (i, f) in jets.iter().enumerate() {
                for (j, g) in jets.iter().enumerate() {
                    let found = brute_force_equiv(f, g).unwrap();
                    assert_eq!(found.is_some(), label[i] == label[j], "{f} vs {g} over {field}");
                    if found.is_some() {
                        assert_eq!(fingerprint(f), fingerprint(g));
                    }
                }
            }
        }
    }

    #[test]
    fn brute_force_is_an_equivalence_relation_n2() {
        let r = ring(2, 2, "F2");
        let jets = all_jets(&r);
        let sample: Vec<&PolySystem> = jets.iter().step_by(3).collect();
        let rel: Vec<Vec<Option<ContactElement>>> =
            sample.iter().map(|f| sample.iter().map(|g| brute_force_equiv(f, g).unwrap()).collect()).collect();
        for i in 0..sample.len() {
            assert!(rel[i][i].is_some());
            for j in 0..sample.len() {
                if let Some(w) = &rel[i][j] {
                    assert_eq!(w.invert().unwrap().act(sample[j]).unwrap(), *sample[i]);
                    assert!(rel[j][i].is_some());
                    assert_eq!(fingerprint(sample[i]), fingerprint(sample[j]));
                    for l in 0..sample.len() {
                        if let Some(v) = &rel[j][l] {
                            assert_eq!(v.group_mul(w).unwrap().act(sample[i]).unwrap(), *sample[l]);
                            assert!(rel[i][l].is_some());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn equivalence_tiers() {
        let r = ring(1, 2, "F3");
        let f = sys(&r, "x^2");
        let g = sys(&r, "2*x^2");
        let report = equiv_check(&f, &g, None).unwrap();
        assert!(matches!(report.verdict, Verdict::Equivalent { tier: Tier::Exhaustive, witness: Some(_) }));
        let w = ContactElement::new(PolyMatrix::from_rows(&r, vec![vec![TruncPoly::constant(&r, r.field().from_int(2))]]).unwrap(), vec![TruncPoly::var(&r, 0)]).unwrap();
        let report = equiv_check(&f, &g, Some(&w)).unwrap();
        assert!(matches!(report.verdict, Verdict::Equivalent { tier: Tier::Witnessed, .. }));
        assert_eq!(report.supplied_witness_valid, Some(true));
        let report = equiv_check(&f, &sys(&r, "x"), Some(&w)).unwrap();
        assert!(matches!(report.verdict, Verdict::Inequivalent { by: Refutation::Fingerprint }));
        assert_eq!(report.supplied_witness_valid, Some(false));

        let big = ring(3, 3, "F2");
        let u = sys(&big, "x^2+y^2*z");
        let shifted = u.taylor_shift(&pt(big.field(), &[0, 0, 1])).unwrap();
        let report = equiv_check(&u, &shifted, None).unwrap();
        assert!(matches!(report.verdict, Verdict::Equivalent { tier: Tier::Candidate, witness: None }));
    }
}
