//! Positively oriented rigid motions of the plane, the map from distance
//! quadruples to motions, and the coordinates that turn the motion curves
//! S_pq into straight lines in 3-space.
//!
//! A non-translation is stored as (fixed point, z) where z parametrizes
//! the rotation angle through cos = (z^2-1)/(z^2+1), sin = -2z/(z^2+1);
//! z equals the third coordinate of the line parametrization below, and
//! the whole pipeline stays rational because the angle itself never
//! appears.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::error::Error;
use crate::geom::{P2, P3, V2, V3};
use crate::lines::Line3;
use crate::num::{fmt_rat, Rat};
use crate::points::PointSet2;
use crate::poly::MultiPoly;

/// Orientation-preserving rigid motion of the plane.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RigidMotion {
    /// Translation by a vector (the identity is `Translation(0)`).
    Translation(V2),
    /// Rotation by a nonzero angle about `center`; `z` ranges over all of
    /// the rationals and excludes the identity by construction.
    Rotational { center: P2, z: Rat },
}

/// Ordered distance quadruple: d(p1,p2) = d(p3,p4) != 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadruple {
    pub p1: P2,
    pub p2: P2,
    pub p3: P2,
    pub p4: P2,
}

impl Quadruple {
    pub fn new(p1: P2, p2: P2, p3: P2, p4: P2) -> Result<Self, Error> {
        let d12 = p1.dist2(&p2);
        let d34 = p3.dist2(&p4);
        if d12.is_zero() || d12 != d34 {
            return Err(Error::InvalidInput(
                "quadruple must satisfy d(p1,p2) = d(p3,p4) != 0".into(),
            ));
        }
        Ok(Quadruple { p1, p2, p3, p4 })
    }
}

impl RigidMotion {
    /// Exact cosine and sine of the rotation angle.
    pub fn cos_sin(z: &Rat) -> (Rat, Rat) {
        let z2 = z * z;
        let den = &z2 + Rat::one();
        let cos = (&z2 - Rat::one()) / &den;
        let sin = -(z + z) / &den;
        (cos, sin)
    }

    /// Apply the motion to a point; squared distances are preserved
    /// exactly.
    pub fn apply(&self, x: &P2) -> P2 {
        match self {
            RigidMotion::Translation(v) => x + v,
            RigidMotion::Rotational { center, z } => {
                let (cos, sin) = Self::cos_sin(z);
                let dx = &x.x - &center.x;
                let dy = &x.y - &center.y;
                P2::new(
                    &center.x + &(&cos * &dx - &sin * &dy),
                    &center.y + &(&sin * &dx + &cos * &dy),
                )
            }
        }
    }

    /// Canonical text encoding for report files.
    pub fn encode(&self) -> String {
        match self {
            RigidMotion::Translation(v) => format!("T:{},{}", fmt_rat(&v.x), fmt_rat(&v.y)),
            RigidMotion::Rotational { center, z } => format!(
                "R:{},{},{}",
                fmt_rat(&center.x),
                fmt_rat(&center.y),
                fmt_rat(z)
            ),
        }
    }

    pub fn is_translation(&self) -> bool {
        matches!(self, RigidMotion::Translation(_))
    }
}

/// The unique positively oriented rigid motion carrying (p1, p2) to
/// (p3, p4). The result is verified against both image conditions before
/// being returned.
pub fn elekes_map(q: &Quadruple) -> RigidMotion {
    let g = solve_motion(q);
    // Postcondition check: cheap, and catches any convention slip.
    assert_eq!(g.apply(&q.p1), q.p3, "motion must map p1 to p3");
    assert_eq!(g.apply(&q.p2), q.p4, "motion must map p2 to p4");
    g
}

fn solve_motion(q: &Quadruple) -> RigidMotion {
    let v13 = &q.p3 - &q.p1;
    let v24 = &q.p4 - &q.p2;
    if v13 == v24 {
        return RigidMotion::Translation(v13);
    }
    // Non-translation: a motion mapping p -> q traces the line
    //   ((p+q)/2, 0) + z * ((q_y-p_y)/2, (p_x-q_x)/2, 1)
    // in (fixed point, z) coordinates. Intersect the two lines for
    // (p1,p3) and (p2,p4); the x-coordinates give
    //   A_x + z B_x = 0 with B = 0 exactly in the translation case.
    let two = Rat::one() + Rat::one();
    let ax = (&q.p1.x + &q.p3.x - &q.p2.x - &q.p4.x) / &two;
    let bx = (&q.p3.y - &q.p1.y - &q.p4.y + &q.p2.y) / &two;
    let ay = (&q.p1.y + &q.p3.y - &q.p2.y - &q.p4.y) / &two;
    let by = (&q.p1.x - &q.p3.x - &q.p2.x + &q.p4.x) / &two;
    let z = if !bx.is_zero() {
        -&ax / &bx
    } else {
        -&ay / &by
    };
    debug_assert!((&ax + &z * &bx).is_zero() && (&ay + &z * &by).is_zero());
    let cx = (&q.p1.x + &q.p3.x) / &two + &z * &((&q.p3.y - &q.p1.y) / &two);
    let cy = (&q.p1.y + &q.p3.y) / &two + &z * &((&q.p1.x - &q.p3.x) / &two);
    RigidMotion::Rotational {
        center: P2::new(cx, cy),
        z,
    }
}

/// Coordinates of a non-translation: (fixed point, z). Translations have
/// no image and are rejected.
pub fn rho(g: &RigidMotion) -> Result<P3, Error> {
    match g {
        RigidMotion::Translation(_) => Err(Error::InvalidInput(
            "rho is defined on non-translations only".into(),
        )),
        RigidMotion::Rotational { center, z } => {
            Ok(P3::new(center.x.clone(), center.y.clone(), z.clone()))
        }
    }
}

/// Exact two-sided inverse of `rho`.
pub fn rho_inverse(x: &P3) -> RigidMotion {
    RigidMotion::Rotational {
        center: P2::new(x.x.clone(), x.y.clone()),
        z: x.z.clone(),
    }
}

/// The line of motions carrying p to q, in (fixed point, z) coordinates:
/// base ((p+q)/2, 0), direction ((q_y-p_y)/2, (p_x-q_x)/2, 1). For p = q
/// this is the vertical line of all rotations about p.
pub fn line_for_pair(p: &P2, q: &P2) -> Line3 {
    let two = Rat::one() + Rat::one();
    let base = P3::new(
        (&p.x + &q.x) / &two,
        (&p.y + &q.y) / &two,
        Rat::zero(),
    );
    let dir = V3::new(
        (&q.y - &p.y) / &two,
        (&p.x - &q.x) / &two,
        Rat::one(),
    );
    Line3::new(base, dir).expect("direction has unit z-component")
}

/// Given p and a point x in motion coordinates, the unique q such that x
/// lies on `line_for_pair(p, q)`, together with the value at x of the
/// tangent vector field of the line family through p.
pub fn recover_q(p: &P2, x: &P3) -> (P2, V3) {
    let z = &x.z;
    let two = Rat::one() + Rat::one();
    let det = z * z + Rat::one();
    // [[1, z], [-z, 1]] (q_x, q_y)^T = a, det = 1 + z^2 > 0
    let a1 = &two * &x.x - &p.x + z * &p.y;
    let a2 = &two * &x.y - &p.y - z * &p.x;
    let qx = (&a1 - &(z * &a2)) / &det;
    let qy = (&(z * &a1) + &a2) / &det;
    let q = P2::new(qx, qy);
    let v = V3::new(
        &det * &((&q.y - &p.y) / &two),
        &det * &((&p.x - &q.x) / &two),
        det.clone(),
    );
    (q, v)
}

/// The tangent field of the family of lines through p, as polynomials in
/// (x, y, z). Entries have degree <= 2 and the third entry is z^2 + 1, so
/// the field never vanishes.
pub fn tangent_field(p: &P2) -> [MultiPoly; 3] {
    let term = |c: Rat, e: [u16; 3]| (e.to_vec(), c);
    // V1 = xz + y - p_x z - p_y
    let v1 = MultiPoly::from_terms(
        3,
        [
            term(Rat::one(), [1, 0, 1]),
            term(Rat::one(), [0, 1, 0]),
            term(-&p.x, [0, 0, 1]),
            term(-&p.y, [0, 0, 0]),
        ],
    );
    // V2 = yz - x + p_x - p_y z
    let v2 = MultiPoly::from_terms(
        3,
        [
            term(Rat::one(), [0, 1, 1]),
            term(-Rat::one(), [1, 0, 0]),
            term(p.x.clone(), [0, 0, 0]),
            term(-&p.y, [0, 0, 1]),
        ],
    );
    // V3 = z^2 + 1
    let v3 = MultiPoly::from_terms(3, [term(Rat::one(), [0, 0, 2]), term(Rat::one(), [0, 0, 0])]);
    [v1, v2, v3]
}

/// Image of the Elekes map over all of Q(P): motion -> fiber size.
///
/// Quadruples are enumerated by grouping ordered pairs by squared
/// distance, so the total work is sum of n_i^2 rather than N^4.
pub fn elekes_image(set: &PointSet2) -> Result<BTreeMap<RigidMotion, u64>, Error> {
    let pts = set.points();
    if pts.len() < 2 {
        return Err(Error::InvalidInput(
            "elekes image needs at least 2 points".into(),
        ));
    }
    let mut classes: BTreeMap<Rat, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            classes
                .entry(pts[i].dist2(&pts[j]))
                .or_default()
                .push((i, j));
        }
    }
    let mut image: BTreeMap<RigidMotion, u64> = BTreeMap::new();
    for pairs in classes.values() {
        for &(i1, j1) in pairs {
            for &(i2, j2) in pairs {
                let q = Quadruple {
                    p1: pts[i1].clone(),
                    p2: pts[j1].clone(),
                    p3: pts[i2].clone(),
                    p4: pts[j2].clone(),
                };
                *image.entry(elekes_map(&q)).or_insert(0) += 1;
            }
        }
    }
    Ok(image)
}

/// |P intersect gP|.
pub fn overlap_count(set: &PointSet2, g: &RigidMotion) -> usize {
    let members: BTreeSet<&P2> = set.points().iter().collect();
    set.points()
        .iter()
        .filter(|p| members.contains(&g.apply(p)))
        .count()
}

/// Size of G_k(P) for each k, from the Elekes image: the number of
/// motions g with |P intersect gP| >= k, the overlap recovered from the
/// fiber size 2*C(m,2) = m(m-1).
pub fn gk_table(image: &BTreeMap<RigidMotion, u64>, n: usize) -> Vec<(usize, u64)> {
    let mut by_overlap: BTreeMap<usize, u64> = BTreeMap::new();
    for &fiber in image.values() {
        let m = fiber_overlap(fiber);
        *by_overlap.entry(m).or_insert(0) += 1;
    }
    (2..=n)
        .map(|k| {
            let count: u64 = by_overlap.range(k..).map(|(_, c)| c).sum();
            (k, count)
        })
        .collect()
}

/// Recover m from a fiber of size m(m-1); panics when the size is not of
/// that form, which would mean the fiber lemma failed.
pub fn fiber_overlap(fiber: u64) -> usize {
    let mut m = (fiber as f64).sqrt() as u64;
    while m * (m + 1) <= fiber {
        m += 1;
    }
    while m * (m.saturating_sub(1)) > fiber {
        m -= 1;
    }
    assert_eq!(m * (m - 1), fiber, "fiber size must be m(m-1)");
    m as usize
}

/// Result of translation-symmetry counting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationSymmetries {
    /// |G^trans_k(P)|: translations v with |P intersect (P+v)| >= k.
    pub count_at_least_k: u64,
    /// Total quadruples mapping to translations: sum of 2*C(m,2).
    pub quadruples_through_translations: u64,
}

/// Count translation partial symmetries. Candidate translations are the
/// differences b - a over pairs of points (every translation with overlap
/// >= 1 arises this way, including the identity).
pub fn translation_partial_symmetries(
    set: &PointSet2,
    k: usize,
) -> Result<TranslationSymmetries, Error> {
    let n = set.len();
    if k < 2 || k > n {
        return Err(Error::InvalidInput(format!(
            "k must satisfy 2 <= k <= N = {n}, got {k}"
        )));
    }
    let members: BTreeSet<&P2> = set.points().iter().collect();
    let mut candidates: BTreeSet<V2> = BTreeSet::new();
    for a in set.points() {
        for b in set.points() {
            candidates.insert(b - a);
        }
    }
    let mut count_at_least_k = 0u64;
    let mut quads = 0u64;
    for v in &candidates {
        let m = set
            .points()
            .iter()
            .filter(|p| members.contains(&(*p + v)))
            .count() as u64;
        if m as usize >= k {
            count_at_least_k += 1;
        }
        quads += m * m.saturating_sub(1);
    }
    let n3 = (n as u64).pow(3);
    assert!(
        quads <= n3,
        "quadruples through translations exceeded N^3: {quads} > {n3}"
    );
    Ok(TranslationSymmetries {
        count_at_least_k,
        quadruples_through_translations: quads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{p2, p3};
    use crate::num::{rat, ratio};
    use crate::points::{quadruple_count, PointSet2};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn apply_translation() {
        let g = RigidMotion::Translation(V2::new(rat(1), rat(2)));
        assert_eq!(g.apply(&p2(0, 0)), p2(1, 2));
    }

    #[test]
    fn apply_quarter_turn() {
        // z = -1 is the 90 degree counter-clockwise rotation:
        // cos = 0, sin = 1 from the convention formulas.
        let g = RigidMotion::Rotational {
            center: p2(0, 0),
            z: rat(-1),
        };
        assert_eq!(g.apply(&p2(1, 0)), p2(0, 1));
        // squared distances preserved
        let a = p2(3, 4);
        let b = p2(-1, 2);
        assert_eq!(g.apply(&a).dist2(&g.apply(&b)), a.dist2(&b));
    }

    #[test]
    fn rotation_fixes_center() {
        let g = RigidMotion::Rotational {
            center: p2(1, 1),
            z: ratio(7, 3),
        };
        assert_eq!(g.apply(&p2(1, 1)), p2(1, 1));
    }

    #[test]
    fn elekes_map_rotation_example() {
        let q = Quadruple::new(p2(0, 0), p2(1, 0), p2(0, 0), p2(0, 1)).unwrap();
        let g = elekes_map(&q);
        assert_eq!(
            g,
            RigidMotion::Rotational {
                center: p2(0, 0),
                z: rat(-1)
            }
        );
    }

    #[test]
    fn elekes_map_translation_examples() {
        let q = Quadruple::new(p2(0, 0), p2(1, 0), p2(2, 3), p2(3, 3)).unwrap();
        assert_eq!(
            elekes_map(&q),
            RigidMotion::Translation(V2::new(rat(2), rat(3)))
        );
        let id = Quadruple::new(p2(0, 0), p2(1, 0), p2(0, 0), p2(1, 0)).unwrap();
        assert_eq!(
            elekes_map(&id),
            RigidMotion::Translation(V2::new(rat(0), rat(0)))
        );
    }

    #[test]
    fn quadruple_invariant_enforced() {
        assert!(Quadruple::new(p2(0, 0), p2(1, 0), p2(0, 0), p2(2, 0)).is_err());
        assert!(Quadruple::new(p2(0, 0), p2(0, 0), p2(1, 1), p2(1, 1)).is_err());
    }

    #[test]
    fn rho_round_trip_and_translation_rejection() {
        let g = RigidMotion::Rotational {
            center: p2(0, 0),
            z: rat(-1),
        };
        assert_eq!(rho(&g).unwrap(), p3(0, 0, -1));
        assert_eq!(rho_inverse(&p3(0, 0, -1)), g);
        let t = RigidMotion::Translation(V2::new(rat(1), rat(0)));
        assert!(rho(&t).is_err());
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..1000 {
            let x = P3::new(
                ratio(rng.gen_range(-50..50), rng.gen_range(1..9)),
                ratio(rng.gen_range(-50..50), rng.gen_range(1..9)),
                ratio(rng.gen_range(-50..50), rng.gen_range(1..9)),
            );
            assert_eq!(rho(&rho_inverse(&x)).unwrap(), x);
        }
    }

    #[test]
    fn line_for_pair_matches_parametrization() {
        let l = line_for_pair(&p2(1, 0), &p2(0, 1));
        let expect = Line3::new(
            P3::new(ratio(1, 2), ratio(1, 2), rat(0)),
            V3::new(ratio(1, 2), ratio(1, 2), rat(1)),
        )
        .unwrap();
        assert_eq!(l, expect);
        // p = q: vertical line
        let v = line_for_pair(&p2(1, 1), &p2(1, 1));
        assert!(v.contains(&p3(1, 1, 5)) && v.contains(&p3(1, 1, -3)));
    }

    #[test]
    fn param_point_maps_p_to_q() {
        // t = -1 on the line for (1,0) -> (0,1) sits at (0,0,-1); the
        // motion there must map p to q. This pins the sign convention.
        let g = rho_inverse(&p3(0, 0, -1));
        assert_eq!(g.apply(&p2(1, 0)), p2(0, 1));
    }

    #[test]
    fn recover_q_examples() {
        let (q, v) = recover_q(&p2(0, 0), &p3(0, 0, 5));
        assert_eq!(q, p2(0, 0));
        assert_eq!(v, V3::new(rat(0), rat(0), rat(26)));
        let (q, _) = recover_q(&p2(1, 0), &p3(0, 0, -1));
        assert_eq!(q, p2(0, 1));
    }

    #[test]
    fn recover_q_defines_incident_line() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let p = P2::new(
                ratio(rng.gen_range(-20..20), rng.gen_range(1..7)),
                ratio(rng.gen_range(-20..20), rng.gen_range(1..7)),
            );
            let x = P3::new(
                ratio(rng.gen_range(-20..20), rng.gen_range(1..7)),
                ratio(rng.gen_range(-20..20), rng.gen_range(1..7)),
                ratio(rng.gen_range(-20..20), rng.gen_range(1..7)),
            );
            let (q, v) = recover_q(&p, &x);
            let l = line_for_pair(&p, &q);
            assert!(l.contains(&x));
            assert!(l.dir().parallel(&v));
        }
    }

    #[test]
    fn tangent_field_shape() {
        let p = p2(3, -2);
        let [v1, v2, v3] = tangent_field(&p);
        assert!(v1.degree() <= 2 && v2.degree() <= 2);
        let expect_v3 =
            MultiPoly::from_terms(3, [(vec![0, 0, 2], rat(1)), (vec![0, 0, 0], rat(1))]);
        assert_eq!(v3, expect_v3);
        // field values agree with recover_q's V
        let x = P3::new(ratio(5, 2), rat(-1), ratio(1, 3));
        let (_, v) = recover_q(&p, &x);
        assert_eq!(v1.eval_p3(&x), v.x);
        assert_eq!(v2.eval_p3(&x), v.y);
        assert_eq!(v3.eval_p3(&x), v.z);
    }

    #[test]
    fn fiber_sizes_match_overlap_for_small_sets() {
        let set = PointSet2::new(vec![p2(0, 0), p2(1, 0), p2(0, 1), p2(1, 1)]).unwrap();
        let image = elekes_image(&set).unwrap();
        let total: u64 = image.values().sum();
        assert_eq!(total, quadruple_count(&set).unwrap());
        for (g, &fiber) in &image {
            let m = overlap_count(&set, g);
            assert_eq!(fiber as usize, m * (m - 1), "fiber mismatch for {g:?}");
            assert_eq!(fiber_overlap(fiber), m);
        }
    }

    #[test]
    fn quadformula_identity_on_unit_square() {
        let set = PointSet2::new(vec![p2(0, 0), p2(1, 0), p2(0, 1), p2(1, 1)]).unwrap();
        let image = elekes_image(&set).unwrap();
        let table = gk_table(&image, set.len());
        let q: u64 = table.iter().map(|&(k, gk)| (2 * k as u64 - 2) * gk).sum();
        assert_eq!(q, quadruple_count(&set).unwrap());
    }

    #[test]
    fn translation_symmetries_unit_square() {
        let set = PointSet2::new(vec![p2(0, 0), p2(1, 0), p2(0, 1), p2(1, 1)]).unwrap();
        let t = translation_partial_symmetries(&set, 2).unwrap();
        // brute force over the 16 candidate vectors: identity overlaps 4;
        // the four unit steps overlap 2 each; the two diagonals overlap 1;
        // every overlap >= 2 candidate: (0,0), (+-1,0), (0,+-1).
        assert_eq!(t.count_at_least_k, 5);
        // quadruples: identity 4*3 = 12, four unit steps 2*1 each = 8
        assert_eq!(t.quadruples_through_translations, 20);
        let tn = translation_partial_symmetries(&set, 4).unwrap();
        assert_eq!(tn.count_at_least_k, 1); // identity only
        assert!(translation_partial_symmetries(&set, 1).is_err());
        assert!(translation_partial_symmetries(&set, 5).is_err());
    }

    #[test]
    fn encode_forms() {
        assert_eq!(
            RigidMotion::Translation(V2::new(ratio(1, 2), rat(-3))).encode(),
            "T:1/2,-3"
        );
        assert_eq!(
            RigidMotion::Rotational {
                center: p2(0, 2),
                z: ratio(-5, 7)
            }
            .encode(),
            "R:0,2,-5/7"
        );
    }
}
