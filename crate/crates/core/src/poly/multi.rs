//! Sparse multivariate polynomials over the rationals.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so iteration
//! order (plain lexicographic on exponents) is deterministic and every
//! canonicalization built on top of it is reproducible.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::geom::{P3, V3};
use crate::num::{fmt_rat, parse_rat, Rat};
use crate::poly::UniPoly;

/// Exponent vector; length equals the polynomial's arity.
pub type Expo = Vec<u16>;

/// Sparse multivariate polynomial with rational coefficients and a fixed
/// number of variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Expo, Rat>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        MultiPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Rat) -> Self {
        let mut p = Self::zero(arity);
        if !c.is_zero() {
            p.terms.insert(vec![0; arity], c);
        }
        p
    }

    /// The monomial `x_i` (zero-based variable index).
    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity, "variable index out of range");
        let mut e = vec![0u16; arity];
        e[i] = 1;
        let mut p = Self::zero(arity);
        p.terms.insert(e, Rat::one());
        p
    }

    /// Build from (exponent, coefficient) pairs; zero coefficients are
    /// dropped and repeated exponents accumulate.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Expo, Rat)>) -> Self {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent arity mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Rat)> {
        self.terms.iter()
    }

    fn add_term(&mut self, e: Expo, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c);
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rat) -> MultiPoly {
        if s.is_zero() {
            return Self::zero(self.arity);
        }
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let mut out = Self::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Expo = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> MultiPoly {
        assert!(i < self.arity, "variable index out of range");
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * Rat::from_integer(BigInt::from(e[i])));
        }
        out
    }

    pub fn eval(&self, at: &[Rat]) -> Rat {
        assert_eq!(at.len(), self.arity, "evaluation arity mismatch");
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    t *= &at[i];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_p3(&self, x: &P3) -> Rat {
        assert_eq!(self.arity, 3, "eval_p3 needs a 3-variable polynomial");
        self.eval(&[x.x.clone(), x.y.clone(), x.z.clone()])
    }

    /// Gradient of a 3-variable polynomial.
    pub fn gradient(&self) -> [MultiPoly; 3] {
        assert_eq!(self.arity, 3, "gradient needs a 3-variable polynomial");
        [self.partial(0), self.partial(1), self.partial(2)]
    }

    pub fn gradient_at(&self, x: &P3) -> V3 {
        let [gx, gy, gz] = self.gradient();
        V3::new(gx.eval_p3(x), gy.eval_p3(x), gz.eval_p3(x))
    }

    /// Restriction of a 3-variable polynomial to the parametrized line
    /// `base + t * dir`; the result is a univariate polynomial in `t` of
    /// degree at most `deg(self)`, identically zero exactly when the line
    /// lies in the zero set.
    pub fn restrict_to_line(&self, base: &P3, dir: &V3) -> Result<UniPoly, Error> {
        assert_eq!(self.arity, 3, "restriction needs a 3-variable polynomial");
        if dir.is_zero() {
            return Err(Error::InvalidInput(
                "restrict_to_line: zero direction".into(),
            ));
        }
        // Per-variable powers of (base_i + t dir_i), computed once.
        let lin = [
            UniPoly::from_coeffs(vec![base.x.clone(), dir.x.clone()]),
            UniPoly::from_coeffs(vec![base.y.clone(), dir.y.clone()]),
            UniPoly::from_coeffs(vec![base.z.clone(), dir.z.clone()]),
        ];
        let mut maxe = [0u16; 3];
        for e in self.terms.keys() {
            for i in 0..3 {
                maxe[i] = maxe[i].max(e[i]);
            }
        }
        let mut pows: [Vec<UniPoly>; 3] = [vec![], vec![], vec![]];
        for i in 0..3 {
            let mut cur = UniPoly::constant(Rat::one());
            pows[i].push(cur.clone());
            for _ in 0..maxe[i] {
                cur = cur.mul(&lin[i]);
                pows[i].push(cur.clone());
            }
        }
        let mut acc = UniPoly::zero();
        for (e, c) in &self.terms {
            let mut t = pows[0][e[0] as usize].clone();
            t = t.mul(&pows[1][e[1] as usize]);
            t = t.mul(&pows[2][e[2] as usize]);
            acc = acc.add(&t.scale(c));
        }
        Ok(acc)
    }

    /// r-th directional derivative form of a 3-variable polynomial: a
    /// 6-variable polynomial in (x, y, z, v1, v2, v3), homogeneous of
    /// degree `r` in the direction variables,
    ///
    ///   sum over |alpha| = r of (r!/alpha!) * d^alpha p * v^alpha.
    ///
    /// Identically zero when `r` exceeds `deg(self)`.
    pub fn directional_form(&self, r: usize) -> MultiPoly {
        assert_eq!(self.arity, 3, "directional form needs 3 variables");
        assert!((1..=3).contains(&r), "order must be 1, 2, or 3");
        let mut out = MultiPoly::zero(6);
        // Enumerate alpha = (a1, a2, a3) with a1+a2+a3 = r.
        for a1 in 0..=r {
            for a2 in 0..=(r - a1) {
                let a3 = r - a1 - a2;
                // multinomial r!/(a1! a2! a3!)
                let coef = factorial(r) / (factorial(a1) * factorial(a2) * factorial(a3));
                let mut d = self.clone();
                for _ in 0..a1 {
                    d = d.partial(0);
                }
                for _ in 0..a2 {
                    d = d.partial(1);
                }
                for _ in 0..a3 {
                    d = d.partial(2);
                }
                if d.is_zero() {
                    continue;
                }
                let coef = Rat::from_integer(BigInt::from(coef));
                for (e, c) in &d.terms {
                    let exp = vec![e[0], e[1], e[2], a1 as u16, a2 as u16, a3 as u16];
                    out.add_term(exp, c * &coef);
                }
            }
        }
        out
    }

    /// Substitute fixed rational values for the first three variables of a
    /// 6-variable form, leaving a 3-variable polynomial in (v1, v2, v3).
    pub fn substitute_point(&self, x: &P3) -> MultiPoly {
        assert_eq!(self.arity, 6, "substitute_point needs a 6-variable form");
        let vals = [&x.x, &x.y, &x.z];
        let mut out = MultiPoly::zero(3);
        for (e, c) in &self.terms {
            let mut coef = c.clone();
            for i in 0..3 {
                for _ in 0..e[i] {
                    coef *= vals[i];
                }
            }
            out.add_term(vec![e[3], e[4], e[5]], coef);
        }
        out
    }

    /// Multiply coefficients by the positive rational that makes them
    /// coprime integers; then flip signs so the first term (in exponent
    /// order) is positive. Identity on the zero polynomial.
    pub fn canonicalize(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        let scale = Rat::new(den_lcm, num_gcd);
        let mut out = self.scale(&scale.abs());
        if out.terms.values().next().unwrap().is_negative() {
            out = out.neg();
        }
        out
    }

    /// True when the two polynomials differ by a nonzero rational factor.
    pub fn proportional(&self, other: &MultiPoly) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.canonicalize() == other.canonicalize()
    }

    /// Report form: one `coef:e1,...,en` string per term.
    pub fn term_strings(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(e, c)| {
                let exps: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                format!("{}:{}", fmt_rat(c), exps.join(","))
            })
            .collect()
    }

    /// Parse the report form: whitespace-separated `coef:e1,...,en` terms.
    pub fn parse_terms(arity: usize, s: &str) -> Result<MultiPoly, Error> {
        let mut p = Self::zero(arity);
        for tok in s.split_whitespace() {
            let (c, es) = tok
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("term `{tok}` missing `:`")))?;
            let c = parse_rat(c)?;
            let e: Result<Expo, Error> = es
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u16>()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))
                })
                .collect();
            let e = e?;
            if e.len() != arity {
                return Err(Error::Parse(format!(
                    "term `{tok}` has {} exponents, expected {arity}",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z", "v1", "v2", "v3"];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut s = fmt_rat(c);
                for (i, &exp) in e.iter().enumerate() {
                    if exp == 0 {
                        continue;
                    }
                    let name = names.get(i).copied().unwrap_or("w");
                    if exp == 1 {
                        s.push_str(&format!("*{name}"));
                    } else {
                        s.push_str(&format!("*{name}^{exp}"));
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Test constructor: p = sum of c * x^a y^b z^c terms.
#[cfg(test)]
pub(crate) fn poly3(terms: &[(i64, [u16; 3])]) -> MultiPoly {
    MultiPoly::from_terms(
        3,
        terms
            .iter()
            .map(|(c, e)| (e.to_vec(), Rat::from_integer(BigInt::from(*c)))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{p3, v3};
    use crate::num::rat;
    use proptest::prelude::*;

    fn sphere() -> MultiPoly {
        // x^2 + y^2 + z^2 - 1
        poly3(&[(1, [2, 0, 0]), (1, [0, 2, 0]), (1, [0, 0, 2]), (-1, [0, 0, 0])])
    }

    #[test]
    fn restrict_sphere_to_x_axis() {
        let q = sphere()
            .restrict_to_line(&p3(0, 0, 0), &v3(1, 0, 0))
            .unwrap();
        // t^2 - 1
        assert_eq!(q, UniPoly::from_coeffs(vec![rat(-1), rat(0), rat(1)]));
    }

    #[test]
    fn restrict_ruled_surface_along_ruling_vanishes() {
        // x^2 - y^2 z restricted to {(2t, t, 4)}: (2t)^2 - t^2*4 = 0.
        let p = poly3(&[(1, [2, 0, 0]), (-1, [0, 2, 1])]);
        let q = p.restrict_to_line(&p3(0, 0, 4), &v3(2, 1, 0)).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn restrict_plane_to_contained_line() {
        let p = poly3(&[(1, [0, 0, 1])]); // z
        let q = p.restrict_to_line(&p3(5, -3, 0), &v3(1, 7, 0)).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn restrict_rejects_zero_direction() {
        assert!(sphere().restrict_to_line(&p3(0, 0, 0), &v3(0, 0, 0)).is_err());
    }

    #[test]
    fn directional_form_first_order() {
        // p = x^2, r = 1 -> 2 x v1
        let p = poly3(&[(1, [2, 0, 0])]);
        let f = p.directional_form(1);
        let expect = MultiPoly::from_terms(6, [(vec![1, 0, 0, 1, 0, 0], rat(2))]);
        assert_eq!(f, expect);
    }

    #[test]
    fn directional_form_second_order_hand_oracle() {
        // p = xyz, r = 2 -> 2(z v1 v2 + y v1 v3 + x v2 v3), by hand
        // differentiation of each mixed partial.
        let p = poly3(&[(1, [1, 1, 1])]);
        let f = p.directional_form(2);
        let expect = MultiPoly::from_terms(
            6,
            [
                (vec![0, 0, 1, 1, 1, 0], rat(2)),
                (vec![0, 1, 0, 1, 0, 1], rat(2)),
                (vec![1, 0, 0, 0, 1, 1], rat(2)),
            ],
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn directional_form_third_order_of_quadratic_vanishes() {
        assert!(sphere().directional_form(3).is_zero());
    }

    #[test]
    fn substitute_point_keeps_direction_variables() {
        // grad_v of x^2 - y^2 z at (2,1,4): (2x, -2yz, -y^2).v = 4 v1 - 8 v2 - v3
        let p = poly3(&[(1, [2, 0, 0]), (-1, [0, 2, 1])]);
        let f = p.directional_form(1).substitute_point(&p3(2, 1, 4));
        let expect = MultiPoly::from_terms(
            3,
            [
                (vec![1, 0, 0], rat(4)),
                (vec![0, 1, 0], rat(-8)),
                (vec![0, 0, 1], rat(-1)),
            ],
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn canonicalize_scales_to_primitive_integer() {
        let p = MultiPoly::from_terms(
            3,
            [
                (vec![1, 0, 0], crate::num::ratio(-2, 3)),
                (vec![0, 1, 0], crate::num::ratio(-4, 3)),
            ],
        );
        let c = p.canonicalize();
        let expect = MultiPoly::from_terms(3, [(vec![1, 0, 0], rat(1)), (vec![0, 1, 0], rat(2))]);
        assert_eq!(c, expect);
        assert!(p.proportional(&expect));
        assert!(!p.proportional(&sphere()));
    }

    #[test]
    fn term_strings_round_trip() {
        let p = poly3(&[(1, [2, 0, 0]), (-1, [0, 2, 1])]);
        let s = p.term_strings().join(" ");
        assert_eq!(MultiPoly::parse_terms(3, &s).unwrap(), p);
    }

    fn arb_poly3(max_deg: u16) -> impl Strategy<Value = MultiPoly> {
        proptest::collection::vec(
            (
                (0..=max_deg, 0..=max_deg, 0..=max_deg),
                -20i64..20,
            ),
            0..8,
        )
        .prop_map(move |terms| {
            MultiPoly::from_terms(
                3,
                terms.into_iter().filter_map(|((a, b, c), coef)| {
                    if (a + b + c) <= max_deg {
                        Some((vec![a, b, c], rat(coef)))
                    } else {
                        None
                    }
                }),
            )
        })
    }

    proptest! {
        // Restriction is a ring homomorphism.
        #[test]
        fn restriction_commutes_with_ring_ops(
            p in arb_poly3(3),
            q in arb_poly3(3),
            base in (-5i64..5, -5i64..5, -5i64..5),
            dir in (1i64..5, -5i64..5, -5i64..5),
        ) {
            let b = p3(base.0, base.1, base.2);
            let d = v3(dir.0, dir.1, dir.2);
            let rp = p.restrict_to_line(&b, &d).unwrap();
            let rq = q.restrict_to_line(&b, &d).unwrap();
            let rsum = p.add(&q).restrict_to_line(&b, &d).unwrap();
            let rprod = p.mul(&q).restrict_to_line(&b, &d).unwrap();
            prop_assert_eq!(rsum, rp.add(&rq));
            prop_assert_eq!(rprod, rp.mul(&rq));
        }

        // First directional form specialized to v = e_j equals d p / d x_j.
        #[test]
        fn directional_form_specializes_to_partials(p in arb_poly3(5)) {
            let f = p.directional_form(1);
            for j in 0..3 {
                let mut out = MultiPoly::zero(3);
                for (e, c) in f.terms() {
                    if e[3 + j] == 1 && (0..3).all(|i| e[3 + i] == u16::from(i == j)) {
                        out = out.add(&MultiPoly::from_terms(
                            3,
                            [(vec![e[0], e[1], e[2]], c.clone())],
                        ));
                    }
                }
                prop_assert_eq!(out, p.partial(j));
            }
        }
    }
}
