//! Algebraic surface machinery: vanishing-polynomial interpolation,
//! critical and flat point/line tests, pointwise flecnode certificates,
//! and the shared-line Bezout bound for factored polynomials.
//!
//! Polynomials that arise as products are kept in tracked-factor form:
//! factoring multivariate polynomials is out of scope, so products are
//! never expanded and refactored.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::Error;
use crate::geom::{P3, V3};
use crate::lines::Line3;
use crate::num::{rat, Rat};
use crate::poly::{determinant, nullspace, Bound, MultiPoly, UniPoly};

/// Monomial exponents of total degree <= d in 3 variables, in the order
/// used by every interpolation matrix in this module (plain lexicographic
/// on the exponent tuple). The count is C(d+3, 3).
pub fn monomials_up_to(d: usize) -> Vec<[u16; 3]> {
    let mut out = Vec::new();
    for a in 0..=d as u16 {
        for b in 0..=(d as u16 - a) {
            for c in 0..=(d as u16 - a - b) {
                out.push([a, b, c]);
            }
        }
    }
    out.sort();
    out
}

/// C(d+3, 3): the dimension of the space of degree <= d polynomials.
pub fn monomial_count(d: usize) -> usize {
    (d + 1) * (d + 2) * (d + 3) / 6
}

fn lift_row(x: &P3, monomials: &[[u16; 3]]) -> Vec<Rat> {
    monomials
        .iter()
        .map(|e| {
            let mut t = Rat::from_integer(1.into());
            for (i, coord) in x.coords().iter().enumerate() {
                for _ in 0..e[i] {
                    t *= *coord;
                }
            }
            t
        })
        .collect()
}

/// Basis of the space of degree <= d polynomials vanishing on all the
/// points, in canonical (reduced, primitive) form, ordered by the free
/// monomial each vector corresponds to.
pub fn vanishing_basis(points: &[P3], d: usize) -> Result<Vec<MultiPoly>, Error> {
    if points.is_empty() {
        return Err(Error::InvalidInput("no interpolation points".into()));
    }
    let monomials = monomials_up_to(d);
    let matrix: Vec<Vec<Rat>> = points.iter().map(|x| lift_row(x, &monomials)).collect();
    let basis = nullspace(&matrix)?;
    Ok(basis
        .into_iter()
        .map(|v| {
            MultiPoly::from_terms(
                3,
                monomials
                    .iter()
                    .zip(v)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(e, c)| (e.to_vec(), c)),
            )
        })
        .collect())
}

/// A nonzero polynomial of degree <= d vanishing on every input point:
/// the canonical element of the interpolation nullspace. Requires
/// #points < C(d+3,3) so that existence is guaranteed by dimension count.
pub fn fit_vanishing_polynomial(points: &[P3], d: usize) -> Result<MultiPoly, Error> {
    if points.len() >= monomial_count(d) {
        return Err(Error::InvalidInput(format!(
            "{} points do not guarantee a degree-{d} vanishing polynomial (need < {})",
            points.len(),
            monomial_count(d)
        )));
    }
    let basis = vanishing_basis(points, d)?;
    // The dimension count guarantees nullity >= 1.
    Ok(basis.into_iter().next().expect("nonempty nullspace"))
}

/// Restrictions of p and its three gradient components to a line.
fn critical_restrictions(p: &MultiPoly, line: &Line3) -> [UniPoly; 4] {
    let [px, py, pz] = p.gradient();
    let r = |q: &MultiPoly| {
        q.restrict_to_line(line.base(), line.dir())
            .expect("line direction is nonzero")
    };
    [r(p), r(&px), r(&py), r(&pz)]
}

/// True when the line lies in the zero set and the whole gradient
/// vanishes along it.
pub fn is_critical_line(p: &MultiPoly, line: &Line3) -> bool {
    assert!(!p.is_zero(), "surface polynomial must be nonzero");
    critical_restrictions(p, line).iter().all(|r| r.is_zero())
}

/// Number of distinct line parameters at which p and its gradient all
/// vanish; `Infinite` exactly for critical lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CriticalPointCount {
    Finite(usize),
    Infinite,
}

pub fn critical_points_on_line(p: &MultiPoly, line: &Line3) -> CriticalPointCount {
    assert!(!p.is_zero(), "surface polynomial must be nonzero");
    let restrictions = critical_restrictions(p, line);
    let nonzero: Vec<&UniPoly> = restrictions.iter().filter(|r| !r.is_zero()).collect();
    if nonzero.is_empty() {
        return CriticalPointCount::Infinite;
    }
    let mut g = nonzero[0].square_free();
    for r in &nonzero[1..] {
        g = g.gcd(&r.square_free());
    }
    if g.degree() == Some(0) {
        return CriticalPointCount::Finite(0);
    }
    CriticalPointCount::Finite(
        g.count_real_roots(&Bound::NegInf, &Bound::PosInf)
            .expect("gcd of nonzero polynomials is nonzero"),
    )
}

fn cross_polys(a: &[MultiPoly; 3], b: &[MultiPoly; 3]) -> [MultiPoly; 3] {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

/// The nine flatness polynomials: for each coordinate direction e_j, the
/// three components of (grad_{e_j x grad p} grad p) x grad p. All nine
/// vanish identically when p is linear, and at every flat point of the
/// surface; each has degree <= 3 deg(p).
pub fn flat_polynomials(p: &MultiPoly) -> [MultiPoly; 9] {
    assert!(!p.is_zero(), "surface polynomial must be nonzero");
    let grad = p.gradient();
    let zero = MultiPoly::zero(3);
    let basis: [[MultiPoly; 3]; 3] = [
        [
            MultiPoly::constant(3, rat(1)),
            zero.clone(),
            zero.clone(),
        ],
        [
            zero.clone(),
            MultiPoly::constant(3, rat(1)),
            zero.clone(),
        ],
        [zero.clone(), zero.clone(), MultiPoly::constant(3, rat(1))],
    ];
    let mut out: Vec<MultiPoly> = Vec::with_capacity(9);
    for e in &basis {
        let w = cross_polys(e, &grad);
        // directional derivative of the gradient field along w
        let mut dgrad: [MultiPoly; 3] = [zero.clone(), zero.clone(), zero.clone()];
        for (k, dg) in dgrad.iter_mut().enumerate() {
            let mut acc = MultiPoly::zero(3);
            for (l, wl) in w.iter().enumerate() {
                acc = acc.add(&wl.mul(&grad[k].partial(l)));
            }
            *dg = acc;
        }
        out.extend(cross_polys(&dgrad, &grad));
    }
    out.try_into().expect("nine components")
}

/// Classification of a point relative to the surface p = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfacePointClass {
    Critical,
    RegularFlat,
    RegularNonFlat,
    NotOnSurface,
}

pub fn classify_point(p: &MultiPoly, x: &P3) -> SurfacePointClass {
    assert!(!p.is_zero(), "surface polynomial must be nonzero");
    if !p.eval_p3(x).is_zero() {
        return SurfacePointClass::NotOnSurface;
    }
    if p.gradient_at(x).is_zero() {
        return SurfacePointClass::Critical;
    }
    let flat = flat_polynomials(p);
    if flat.iter().all(|q| q.eval_p3(x).is_zero()) {
        SurfacePointClass::RegularFlat
    } else {
        SurfacePointClass::RegularNonFlat
    }
}

/// A flat line: contained in the surface, not critical, with all nine
/// flatness restrictions identically zero.
pub fn is_flat_line(p: &MultiPoly, line: &Line3) -> bool {
    assert!(!p.is_zero(), "surface polynomial must be nonzero");
    let on_surface = p
        .restrict_to_line(line.base(), line.dir())
        .expect("line direction is nonzero")
        .is_zero();
    if !on_surface || is_critical_line(p, line) {
        return false;
    }
    flat_polynomials(p).iter().all(|q| {
        q.restrict_to_line(line.base(), line.dir())
            .expect("line direction is nonzero")
            .is_zero()
    })
}

/// The three direction forms of p at x: homogeneous polynomials in the
/// direction variables of degrees 1, 2, 3.
fn direction_forms_at(p: &MultiPoly, x: &P3) -> Result<[MultiPoly; 3], Error> {
    if p.degree() < 3 {
        return Err(Error::InvalidInput(
            "flecnode tests need degree >= 3 (the third direction form degenerates)".into(),
        ));
    }
    if !p.eval_p3(x).is_zero() {
        return Err(Error::InvalidInput(
            "flecnode tests are defined at surface points only".into(),
        ));
    }
    Ok([
        p.directional_form(1).substitute_point(x),
        p.directional_form(2).substitute_point(x),
        p.directional_form(3).substitute_point(x),
    ])
}

/// Value of the 15x15 Macaulay determinant of the three direction forms
/// at x. A nonzero value certifies that no direction through x agrees
/// with the surface to order three; a zero value alone is inconclusive
/// (the determinant carries an extraneous factor), which is why
/// `is_flecnode` decides via the root-search certificate instead.
pub fn flecnode_eval(p: &MultiPoly, x: &P3) -> Result<Rat, Error> {
    let forms = direction_forms_at(p, x)?;
    let degrees = [1u16, 2, 3];
    // Columns: monomials in v of total degree 4 = sum(d_i - 1) + 1.
    let t = 4u16;
    let mut columns: Vec<[u16; 3]> = Vec::new();
    for a in 0..=t {
        for b in 0..=(t - a) {
            columns.push([a, b, t - a - b]);
        }
    }
    columns.sort();
    let col_index: BTreeMap<[u16; 3], usize> = columns
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    // One row per degree-t monomial: assign it to the first form f_j with
    // alpha_j >= deg(f_j) and use the multiplier v^alpha / v_j^{deg f_j}.
    let mut matrix = Vec::with_capacity(columns.len());
    for alpha in &columns {
        let j = (0..3)
            .find(|&j| alpha[j] >= degrees[j])
            .expect("every degree-4 monomial admits a multiplier");
        let mut mult = *alpha;
        mult[j] -= degrees[j];
        let mut row = vec![Rat::zero(); columns.len()];
        for (e, c) in forms[j].terms() {
            let target = [mult[0] + e[0], mult[1] + e[1], mult[2] + e[2]];
            row[col_index[&target]] = c.clone();
        }
        matrix.push(row);
    }
    determinant(&matrix)
}

/// Exact decision: does some direction through x solve all three
/// direction forms over the complex numbers? Decided by parametrizing
/// the kernel of the linear form and reducing to binary-form gcds.
pub fn is_flecnode(p: &MultiPoly, x: &P3) -> Result<bool, Error> {
    let [f1, f2, f3] = direction_forms_at(p, x)?;
    if f1.is_zero() {
        // Critical point: the quadric and cubic forms always share a
        // projective root (two plane curves intersect), and when either
        // vanishes identically the other still has roots.
        return Ok(true);
    }
    // Kernel of the linear form, spanned by two rational directions.
    let coeff = |e: [u16; 3]| {
        f1.terms()
            .find(|(exp, _)| exp.as_slice() == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    };
    let row = vec![vec![coeff([1, 0, 0]), coeff([0, 1, 0]), coeff([0, 0, 1])]];
    let kernel = nullspace(&row)?;
    assert_eq!(kernel.len(), 2, "nonzero linear form has a plane kernel");
    let u = V3::new(kernel[0][0].clone(), kernel[0][1].clone(), kernel[0][2].clone());
    let w = V3::new(kernel[1][0].clone(), kernel[1][1].clone(), kernel[1][2].clone());
    let g2 = binary_form(&f2, &u, &w, 2);
    let g3 = binary_form(&f3, &u, &w, 3);
    Ok(binary_forms_share_root(&g2, &g3))
}

/// Coefficients (s^0 t^deg ... s^deg t^0) of f(s u + t w) for a
/// homogeneous 3-variable form f.
fn binary_form(f: &MultiPoly, u: &V3, w: &V3, deg: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); deg + 1];
    let su = [&u.x, &u.y, &u.z];
    let sw = [&w.x, &w.y, &w.z];
    for (e, c) in f.terms() {
        // expand prod_i (s u_i + t w_i)^{e_i} as a dense vector in s
        let mut acc = vec![c.clone()];
        for i in 0..3 {
            for _ in 0..e[i] {
                let mut next = vec![Rat::zero(); acc.len() + 1];
                for (k, a) in acc.iter().enumerate() {
                    next[k + 1] += a * su[i];
                    next[k] += a * sw[i];
                }
                acc = next;
            }
        }
        for (k, a) in acc.into_iter().enumerate() {
            out[k] += a;
        }
    }
    out
}

/// Common projective root of two binary forms (possibly zero forms).
fn binary_forms_share_root(g2: &[Rat], g3: &[Rat]) -> bool {
    let z2 = g2.iter().all(|c| c.is_zero());
    let z3 = g3.iter().all(|c| c.is_zero());
    if z2 || z3 {
        // a nonzero form of positive degree always has projective roots
        return true;
    }
    // root at t = 0, i.e. (s : t) = (1 : 0): both top coefficients vanish
    if g2.last().unwrap().is_zero() && g3.last().unwrap().is_zero() {
        return true;
    }
    // otherwise a common root has t != 0: dehomogenize in s
    let p2 = UniPoly::from_coeffs(g2.to_vec());
    let p3 = UniPoly::from_coeffs(g3.to_vec());
    p2.gcd(&p3).degree().map(|d| d >= 1).unwrap_or(false)
}

/// Result of a flecnode scan over sampled surface points.
#[derive(Clone, Debug)]
pub struct RulednessScan {
    pub samples: usize,
    pub flecnodes: usize,
    /// sample points that are certified non-flecnodes (witnesses that the
    /// surface is not ruled)
    pub witnesses: Vec<P3>,
}

impl RulednessScan {
    /// Every sample was a flecnode: consistent with a ruled surface.
    pub fn all_flecnodes(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Evaluate the flecnode certificate at each sample point. Every sample
/// must lie on the surface.
pub fn ruledness_scan(p: &MultiPoly, samples: &[P3]) -> Result<RulednessScan, Error> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no sample points supplied".into()));
    }
    let results: Result<Vec<(P3, bool)>, Error> = samples
        .par_iter()
        .map(|x| is_flecnode(p, x).map(|b| (x.clone(), b)))
        .collect();
    let results = results?;
    let witnesses: Vec<P3> = results
        .iter()
        .filter(|(_, b)| !b)
        .map(|(x, _)| x.clone())
        .collect();
    Ok(RulednessScan {
        samples: samples.len(),
        flecnodes: results.len() - witnesses.len(),
        witnesses,
    })
}

/// Classification tag carried by each tracked factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceTag {
    Plane,
    Regulus,
    RuledOther,
    Unruled,
    Unknown,
}

impl SurfaceTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceTag::Plane => "plane",
            SurfaceTag::Regulus => "regulus",
            SurfaceTag::RuledOther => "ruled-other",
            SurfaceTag::Unruled => "unruled",
            SurfaceTag::Unknown => "unknown",
        }
    }
}

/// Polynomial kept as a tracked product of factors; the expanded product
/// is cached. Factors must be pairwise non-proportional.
#[derive(Clone, Debug)]
pub struct FactoredPoly {
    factors: Vec<(MultiPoly, u32, SurfaceTag)>,
    product: MultiPoly,
}

impl FactoredPoly {
    pub fn new(factors: Vec<(MultiPoly, u32, SurfaceTag)>) -> Result<Self, Error> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("factored polynomial needs factors".into()));
        }
        for (f, m, _) in &factors {
            if f.is_zero() || *m == 0 {
                return Err(Error::InvalidInput(
                    "factors must be nonzero with positive multiplicity".into(),
                ));
            }
        }
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                if factors[i].0.proportional(&factors[j].0) {
                    return Err(Error::InvalidInput(
                        "factors must be pairwise non-proportional".into(),
                    ));
                }
            }
        }
        let mut product = MultiPoly::constant(3, rat(1));
        for (f, m, _) in &factors {
            for _ in 0..*m {
                product = product.mul(f);
            }
        }
        Ok(FactoredPoly { factors, product })
    }

    /// Single factor with multiplicity 1.
    pub fn irreducible(p: MultiPoly, tag: SurfaceTag) -> Result<Self, Error> {
        Self::new(vec![(p, 1, tag)])
    }

    pub fn factors(&self) -> &[(MultiPoly, u32, SurfaceTag)] {
        &self.factors
    }

    pub fn product(&self) -> &MultiPoly {
        &self.product
    }

    pub fn degree(&self) -> usize {
        self.product.degree()
    }

    /// True when some factor of self is proportional to a factor of
    /// other.
    pub fn shares_factor_with(&self, other: &FactoredPoly) -> bool {
        self.factors
            .iter()
            .any(|(f, _, _)| other.factors.iter().any(|(g, _, _)| f.proportional(g)))
    }
}

/// Count candidate lines contained in both zero sets and check the
/// Bezout bound deg(p) * deg(q). The factorizations must not share a
/// factor (checked structurally), otherwise infinitely many shared lines
/// are possible and the bound is vacuous.
pub fn shared_lines_bound_check(
    p: &FactoredPoly,
    q: &FactoredPoly,
    candidates: &[Line3],
) -> Result<(usize, usize), Error> {
    if p.shares_factor_with(q) {
        return Err(Error::InvalidInput(
            "polynomials share a factor; the shared-line bound does not apply".into(),
        ));
    }
    let in_both = |l: &Line3| {
        let rp = p
            .product()
            .restrict_to_line(l.base(), l.dir())
            .expect("line direction nonzero");
        if !rp.is_zero() {
            return false;
        }
        q.product()
            .restrict_to_line(l.base(), l.dir())
            .expect("line direction nonzero")
            .is_zero()
    };
    let shared = crate::lines::dedup_lines(candidates)
        .iter()
        .filter(|l| in_both(l))
        .count();
    let bound = p.degree() * q.degree();
    assert!(
        shared <= bound,
        "shared line count {shared} exceeded the Bezout bound {bound}"
    );
    Ok((shared, bound))
}

/// Named library surfaces for reproducible runs.
pub fn library_surface(name: &str) -> Option<MultiPoly> {
    let poly = |terms: &[(i64, [u16; 3])]| {
        MultiPoly::from_terms(3, terms.iter().map(|(c, e)| (e.to_vec(), rat(*c))))
    };
    match name {
        // double cone about the z-axis
        "cone" => Some(poly(&[(1, [2, 0, 0]), (1, [0, 2, 0]), (-1, [0, 0, 2])])),
        // doubly-ruled quadric z = xy
        "regulus" => Some(poly(&[(1, [0, 0, 1]), (-1, [1, 1, 0])])),
        // singly-ruled cubic x^2 = y^2 z (Whitney umbrella)
        "whitney" => Some(poly(&[(1, [2, 0, 0]), (-1, [0, 2, 1])])),
        // Fermat cubic x^3 + y^3 + z^3 = 1 (not ruled)
        "fermat3" => Some(poly(&[
            (1, [3, 0, 0]),
            (1, [0, 3, 0]),
            (1, [0, 0, 3]),
            (-1, [0, 0, 0]),
        ])),
        _ => None,
    }
}

/// Deterministic rational sample points on a named library surface.
/// Returns an error for names without a rational parametrization of the
/// needed size.
pub fn library_samples(name: &str, count: usize) -> Result<Vec<P3>, Error> {
    let mut out = Vec::with_capacity(count);
    match name {
        "whitney" => {
            // (ts, t, s^2) sweeps the surface x^2 = y^2 z
            let mut k = 0i64;
            'outer: for s in 1.. {
                for t in -(s as i64)..=(s as i64) {
                    let sv = rat(s as i64);
                    let tv = rat(t);
                    out.push(P3::new(&tv * &sv, tv.clone(), &sv * &sv));
                    k += 1;
                    if k as usize >= count {
                        break 'outer;
                    }
                }
            }
        }
        "regulus" => {
            'outer: for a in 0i64.. {
                for b in -a..=a {
                    out.push(P3::new(rat(a), rat(b), rat(a * b)));
                    if out.len() >= count {
                        break 'outer;
                    }
                }
            }
        }
        "cone" => {
            // Pythagorean parametrization (m^2-n^2, 2mn, m^2+n^2)
            'outer: for m in 1i64.. {
                for n in 0..m {
                    out.push(P3::new(rat(m * m - n * n), rat(2 * m * n), rat(m * m + n * n)));
                    if out.len() >= count {
                        break 'outer;
                    }
                }
            }
        }
        "fermat3" => {
            // the rational lines (1, t, -t), (t, 1, -t), (t, -t, 1), plus
            // the isolated rational point (9, 10, -12)
            out.push(P3::new(rat(9), rat(10), rat(-12)));
            let mut t = 0i64;
            while out.len() < count {
                out.push(P3::new(rat(1), rat(t), rat(-t)));
                if out.len() < count {
                    out.push(P3::new(rat(t), rat(1), rat(-t)));
                }
                if out.len() < count {
                    out.push(P3::new(rat(t), rat(-t), rat(1)));
                }
                t += 1;
            }
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "no sampler for surface `{name}`"
            )))
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{p3, v3};
    use crate::poly::rank;

    fn line(b: (i64, i64, i64), d: (i64, i64, i64)) -> Line3 {
        Line3::new(p3(b.0, b.1, b.2), v3(d.0, d.1, d.2)).unwrap()
    }

    fn poly(terms: &[(i64, [u16; 3])]) -> MultiPoly {
        MultiPoly::from_terms(3, terms.iter().map(|(c, e)| (e.to_vec(), rat(*c))))
    }

    #[test]
    fn fit_plane_through_three_points() {
        let pts = [p3(0, 0, 0), p3(1, 0, 0), p3(0, 1, 0)];
        let p = fit_vanishing_polynomial(&pts, 1).unwrap();
        assert!(p.proportional(&poly(&[(1, [0, 0, 1])])));
    }

    #[test]
    fn fit_quadric_through_skew_line_samples() {
        // 3 points on each of three rulings of z = xy pin the regulus
        let rulings = [
            line((0, 0, 0), (1, 0, 0)),
            line((0, 1, 0), (1, 0, 1)),
            line((0, 2, 0), (1, 0, 2)),
        ];
        let mut pts = Vec::new();
        for l in &rulings {
            for t in 0..3 {
                pts.push(l.at(&rat(t)));
            }
        }
        let p = fit_vanishing_polynomial(&pts, 2).unwrap();
        assert!(p.proportional(&poly(&[(1, [0, 0, 1]), (-1, [1, 1, 0])])));
        // and it vanishes on the full lines, not just the samples
        for l in &rulings {
            assert!(p.restrict_to_line(l.base(), l.dir()).unwrap().is_zero());
        }
    }

    #[test]
    fn fit_collinear_points_is_deterministic() {
        let pts = [p3(0, 0, 0), p3(1, 0, 0), p3(2, 0, 0)];
        let basis = vanishing_basis(&pts, 1).unwrap();
        assert_eq!(basis.len(), 2);
        let again = fit_vanishing_polynomial(&pts, 1).unwrap();
        assert_eq!(again, basis[0].clone());
    }

    #[test]
    fn fit_rejects_too_many_points() {
        let pts: Vec<P3> = (0..4).map(|i| p3(i, 0, 0)).collect();
        assert!(fit_vanishing_polynomial(&pts, 1).is_err());
    }

    #[test]
    fn critical_line_of_circular_cylinder_pair() {
        // p = x^2 + y^2: gradient (2x, 2y, 0) vanishes on the z-axis
        let p = poly(&[(1, [2, 0, 0]), (1, [0, 2, 0])]);
        let zaxis = line((0, 0, 0), (0, 0, 1));
        assert!(is_critical_line(&p, &zaxis));
        assert_eq!(
            critical_points_on_line(&p, &zaxis),
            CriticalPointCount::Infinite
        );
    }

    #[test]
    fn cone_ruling_has_one_critical_point() {
        let cone = library_surface("cone").unwrap();
        let ruling = line((0, 0, 0), (1, 0, 1));
        assert!(!is_critical_line(&cone, &ruling));
        assert_eq!(
            critical_points_on_line(&cone, &ruling),
            CriticalPointCount::Finite(1)
        );
    }

    #[test]
    fn plane_is_not_critical() {
        let p = poly(&[(1, [0, 0, 1])]);
        let xaxis = line((0, 0, 0), (1, 0, 0));
        assert!(!is_critical_line(&p, &xaxis));
        assert_eq!(
            critical_points_on_line(&p, &xaxis),
            CriticalPointCount::Finite(0)
        );
    }

    #[test]
    fn plane_flat_polynomials_vanish() {
        let p = poly(&[(1, [1, 0, 0])]); // x
        assert!(flat_polynomials(&p).iter().all(|q| q.is_zero()));
        assert_eq!(classify_point(&p, &p3(0, 3, -1)), SurfacePointClass::RegularFlat);
        // degree bound is structural
        let w = library_surface("whitney").unwrap();
        for q in flat_polynomials(&w) {
            assert!(q.degree() <= 3 * w.degree());
        }
    }

    #[test]
    fn cone_classification() {
        let cone = library_surface("cone").unwrap();
        assert_eq!(classify_point(&cone, &p3(1, 0, 1)), SurfacePointClass::RegularNonFlat);
        assert_eq!(classify_point(&cone, &p3(0, 0, 0)), SurfacePointClass::Critical);
        assert_eq!(classify_point(&cone, &p3(5, 5, 5)), SurfacePointClass::NotOnSurface);
    }

    #[test]
    fn regulus_is_nowhere_flat() {
        let r = library_surface("regulus").unwrap();
        assert_eq!(classify_point(&r, &p3(0, 0, 0)), SurfacePointClass::RegularNonFlat);
    }

    #[test]
    fn flat_lines_of_a_plane() {
        let p = poly(&[(1, [0, 0, 1])]);
        assert!(is_flat_line(&p, &line((0, 0, 0), (1, 0, 0))));
        assert!(!is_flat_line(&p, &line((0, 0, 1), (1, 0, 0))));
        // cone rulings are not flat
        let cone = library_surface("cone").unwrap();
        assert!(!is_flat_line(&cone, &line((0, 0, 0), (1, 0, 1))));
    }

    #[test]
    fn critflat_dichotomy_on_triple_line_configurations() {
        // three planes through the z-axis: points of the axis are critical
        let p = poly(&[(1, [1, 0, 0])])
            .mul(&poly(&[(1, [0, 1, 0])]))
            .mul(&poly(&[(1, [1, 0, 0]), (-1, [0, 1, 0])]));
        assert_eq!(classify_point(&p, &p3(0, 0, 1)), SurfacePointClass::Critical);
        // cone apex on three rulings
        let cone = library_surface("cone").unwrap();
        assert_eq!(classify_point(&cone, &p3(0, 0, 0)), SurfacePointClass::Critical);
        // plane with three concurrent lines: flat
        let z = poly(&[(1, [0, 0, 1])]);
        assert_eq!(classify_point(&z, &p3(0, 0, 0)), SurfacePointClass::RegularFlat);
    }

    #[test]
    fn whitney_points_are_flecnodes() {
        let w = library_surface("whitney").unwrap();
        let x = p3(2, 1, 4);
        assert!(is_flecnode(&w, &x).unwrap());
        assert!(flecnode_eval(&w, &x).unwrap().is_zero());
        // the ruling direction solves all three forms by hand
        let forms = [
            w.directional_form(1).substitute_point(&x),
            w.directional_form(2).substitute_point(&x),
            w.directional_form(3).substitute_point(&x),
        ];
        let dir = [rat(2), rat(1), rat(0)];
        for f in &forms {
            assert!(f.eval(&dir).is_zero());
        }
    }

    #[test]
    fn fermat_cubic_flecnode_certificates() {
        let f = library_surface("fermat3").unwrap();
        // (9,10,-12) lies on the surface but on none of its lines
        let off = p3(9, 10, -12);
        assert!(!is_flecnode(&f, &off).unwrap());
        assert!(!flecnode_eval(&f, &off).unwrap().is_zero());
        // (1,0,0) lies on the line (1, t, -t)
        let on = p3(1, 0, 0);
        assert!(is_flecnode(&f, &on).unwrap());
        assert!(flecnode_eval(&f, &on).unwrap().is_zero());
    }

    #[test]
    fn flecnode_preconditions() {
        let r = library_surface("regulus").unwrap();
        assert!(is_flecnode(&r, &p3(0, 0, 0)).is_err()); // degree 2
        let f = library_surface("fermat3").unwrap();
        assert!(is_flecnode(&f, &p3(5, 5, 5)).is_err()); // off surface
    }

    #[test]
    fn ruledness_scan_whitney_all_flecnodes() {
        let w = library_surface("whitney").unwrap();
        let samples = library_samples("whitney", 50).unwrap();
        for s in &samples {
            assert!(w.eval_p3(s).is_zero(), "sampler left the surface at {s:?}");
        }
        let scan = ruledness_scan(&w, &samples).unwrap();
        assert!(scan.all_flecnodes());
        assert_eq!(scan.flecnodes, 50);
    }

    #[test]
    fn ruledness_scan_fermat_finds_witness() {
        let f = library_surface("fermat3").unwrap();
        let samples = library_samples("fermat3", 20).unwrap();
        for s in &samples {
            assert!(f.eval_p3(s).is_zero());
        }
        let scan = ruledness_scan(&f, &samples).unwrap();
        assert!(!scan.all_flecnodes());
        assert!(scan.witnesses.contains(&p3(9, 10, -12)));
    }

    #[test]
    fn shared_lines_two_plane_products() {
        // p = x*y, q = z*(x+y+z): the four pairwise plane intersections
        let p = FactoredPoly::new(vec![
            (poly(&[(1, [1, 0, 0])]), 1, SurfaceTag::Plane),
            (poly(&[(1, [0, 1, 0])]), 1, SurfaceTag::Plane),
        ])
        .unwrap();
        let q = FactoredPoly::new(vec![
            (poly(&[(1, [0, 0, 1])]), 1, SurfaceTag::Plane),
            (
                poly(&[(1, [1, 0, 0]), (1, [0, 1, 0]), (1, [0, 0, 1])]),
                1,
                SurfaceTag::Plane,
            ),
        ])
        .unwrap();
        let candidates = vec![
            // x=0 & z=0: the y-axis; x=0 & x+y+z=0; y=0 & z=0; y=0 & x+y+z=0
            line((0, 0, 0), (0, 1, 0)),
            line((0, 0, 0), (0, 1, -1)),
            line((0, 0, 0), (1, 0, 0)),
            line((0, 0, 0), (1, 0, -1)),
        ];
        let (shared, bound) = shared_lines_bound_check(&p, &q, &candidates).unwrap();
        assert_eq!((shared, bound), (4, 4));
    }

    #[test]
    fn shared_lines_regulus_pair() {
        // z - xy and z + xy share exactly the two coordinate axes
        let p = FactoredPoly::irreducible(
            poly(&[(1, [0, 0, 1]), (-1, [1, 1, 0])]),
            SurfaceTag::Regulus,
        )
        .unwrap();
        let q = FactoredPoly::irreducible(
            poly(&[(1, [0, 0, 1]), (1, [1, 1, 0])]),
            SurfaceTag::Regulus,
        )
        .unwrap();
        let candidates = vec![
            line((0, 0, 0), (1, 0, 0)),
            line((0, 0, 0), (0, 1, 0)),
            line((0, 1, 0), (1, 0, 1)),  // ruling of z = xy only
            line((0, 1, 0), (1, 0, -1)), // ruling of z = -xy only
        ];
        let (shared, bound) = shared_lines_bound_check(&p, &q, &candidates).unwrap();
        assert_eq!((shared, bound), (2, 4));
    }

    #[test]
    fn shared_lines_rejects_common_factor() {
        let p = FactoredPoly::irreducible(poly(&[(1, [1, 0, 0])]), SurfaceTag::Plane).unwrap();
        let q = FactoredPoly::new(vec![
            (poly(&[(-2, [1, 0, 0])]), 1, SurfaceTag::Plane),
            (poly(&[(1, [0, 1, 0])]), 1, SurfaceTag::Plane),
        ])
        .unwrap();
        assert!(shared_lines_bound_check(&p, &q, &[]).is_err());
    }

    #[test]
    fn plane_products_critical_lines() {
        // k distinct planes through the z-axis: the axis is critical, and
        // so is every pairwise intersection (all equal to the axis here).
        let planes = [
            poly(&[(1, [1, 0, 0])]),
            poly(&[(1, [0, 1, 0])]),
            poly(&[(1, [1, 0, 0]), (1, [0, 1, 0])]),
            poly(&[(1, [1, 0, 0]), (-2, [0, 1, 0])]),
        ];
        let mut prod = MultiPoly::constant(3, rat(1));
        for pl in &planes {
            prod = prod.mul(pl);
        }
        let axis = line((0, 0, 0), (0, 0, 1));
        assert!(is_critical_line(&prod, &axis));
        // d^2 = 16 comfortably bounds the single critical line
        assert!(1 <= prod.degree() * prod.degree());
    }

    #[test]
    fn factored_poly_invariants() {
        let x = poly(&[(1, [1, 0, 0])]);
        assert!(FactoredPoly::new(vec![
            (x.clone(), 1, SurfaceTag::Plane),
            (x.scale(&rat(3)), 1, SurfaceTag::Plane)
        ])
        .is_err());
        let fp = FactoredPoly::new(vec![
            (x.clone(), 2, SurfaceTag::Plane),
            (poly(&[(1, [0, 1, 0])]), 1, SurfaceTag::Plane),
        ])
        .unwrap();
        assert_eq!(fp.degree(), 3);
        assert_eq!(fp.product(), &poly(&[(1, [2, 1, 0])]));
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomial_count(1), 4);
        assert_eq!(monomial_count(2), 10);
        assert_eq!(monomials_up_to(2).len(), 10);
        // lift rows of distinct points are independent for small sets
        let pts = [p3(0, 0, 0), p3(1, 2, 3), p3(-1, 1, 0)];
        let monos = monomials_up_to(1);
        let rows: Vec<Vec<Rat>> = pts.iter().map(|x| lift_row(x, &monos)).collect();
        assert_eq!(rank(&rows).unwrap(), 3);
    }
}
