//! Dense univariate polynomials over the rationals, with exact gcd,
//! Sturm sequences, real-root counting, and root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::num::{fmt_rat, Rat};

/// Univariate polynomial, coefficients lowest-degree first. The zero
/// polynomial stores no coefficients; otherwise the leading coefficient
/// is nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

/// Interval end for root counting.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    NegInf,
    Finite(Rat),
    PosInf,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = UniPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::from_coeffs(out)
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rat) -> UniPoly {
        if s.is_zero() {
            return Self::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        // Horner
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Quotient and remainder; divisor must be nonzero.
    pub fn divrem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dn = divisor.coeffs.len();
        if self.coeffs.len() < dn {
            return (Self::zero(), self.clone());
        }
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len() - dn + 1];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dn - 1] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let t = d * &c;
                rem[i + j] -= t;
            }
            quot[i] = c;
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Scale by the positive rational that makes coefficients coprime
    /// integers. Sign pattern is preserved, which is what Sturm chains
    /// need.
    pub fn primitive(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        self.scale(&Rat::new(den_lcm, num_gcd).abs())
    }

    /// Monic gcd via the Euclidean algorithm with primitive-part
    /// normalization at each step to keep coefficients small.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.primitive();
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading().unwrap().clone();
        a.scale(&(Rat::one() / lead))
    }

    /// Square-free part: self / gcd(self, self').
    pub fn square_free(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        let (q, r) = self.divrem(&g);
        debug_assert!(r.is_zero());
        q
    }

    fn sign_at(&self, b: &Bound) -> i8 {
        match b {
            Bound::Finite(x) => crate::num::sign(&self.eval(x)),
            Bound::PosInf => self.leading().map_or(0, |c| crate::num::sign(c)),
            Bound::NegInf => self.leading().map_or(0, |c| {
                let s = crate::num::sign(c);
                if (self.coeffs.len() - 1) % 2 == 0 {
                    s
                } else {
                    -s
                }
            }),
        }
    }

    /// Sturm chain of the square-free part, primitive-normalized.
    fn sturm_chain(square_free: &UniPoly) -> Vec<UniPoly> {
        let mut chain = vec![square_free.primitive()];
        let d = square_free.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(d.primitive());
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().primitive());
        }
        chain
    }

    fn sign_variations(chain: &[UniPoly], at: &Bound) -> usize {
        let mut prev = 0i8;
        let mut v = 0;
        for p in chain {
            let s = p.sign_at(at);
            if s == 0 {
                continue;
            }
            if prev != 0 && s != prev {
                v += 1;
            }
            prev = s;
        }
        v
    }

    /// Number of distinct real roots in the closed interval `[lo, hi]`
    /// (the whole line with infinite bounds). Errors on the zero
    /// polynomial: the caller must test for identical vanishing first.
    pub fn count_real_roots(&self, lo: &Bound, hi: &Bound) -> Result<usize, Error> {
        if self.is_zero() {
            return Err(Error::InvalidInput(
                "count_real_roots: zero polynomial".into(),
            ));
        }
        if let (Bound::Finite(a), Bound::Finite(b)) = (lo, hi) {
            if a > b {
                return Err(Error::InvalidInput(
                    "count_real_roots: empty interval".into(),
                ));
            }
        }
        let sf = self.square_free();
        if sf.degree() == Some(0) {
            return Ok(0);
        }
        let chain = Self::sturm_chain(&sf);
        // Sturm counts roots in (lo, hi]; add the left endpoint when it
        // is itself a root.
        let mut n =
            Self::sign_variations(&chain, lo).saturating_sub(Self::sign_variations(&chain, hi));
        if let Bound::Finite(a) = lo {
            if sf.eval(a).is_zero() {
                n += 1;
            }
        }
        Ok(n)
    }

    /// A bound B with every real root in (-B, B).
    fn root_bound(&self) -> Rat {
        let lead = self.leading().expect("root_bound of zero polynomial");
        let mut m = Rat::zero();
        for c in &self.coeffs {
            let a = (c / lead).abs();
            if a > m {
                m = a;
            }
        }
        m + Rat::one() + Rat::one()
    }

    /// Rational sample points, one in each connected component of the
    /// complement of the real roots, ordered left to right. For a
    /// root-free polynomial this is a single point.
    pub fn component_samples(&self) -> Result<Vec<Rat>, Error> {
        if self.is_zero() {
            return Err(Error::InvalidInput(
                "component_samples: zero polynomial".into(),
            ));
        }
        let sf = self.square_free();
        if sf.degree() == Some(0) {
            return Ok(vec![Rat::zero()]);
        }
        let chain = Self::sturm_chain(&sf);
        let bound = sf.root_bound();
        let neg = Bound::Finite(-bound.clone());
        let pos = Bound::Finite(bound.clone());
        let total = Self::sign_variations(&chain, &neg) - Self::sign_variations(&chain, &pos);
        if total == 0 {
            return Ok(vec![Rat::zero()]);
        }
        // Isolate roots in (a, b] intervals by bisection on variation
        // counts, then shrink until intervals are pairwise disjoint.
        let mut stack = vec![(-bound.clone(), bound.clone(), total)];
        let mut isolated: Vec<(Rat, Rat)> = Vec::new();
        while let Some((a, b, count)) = stack.pop() {
            if count == 0 {
                continue;
            }
            if count == 1 {
                isolated.push((a, b));
                continue;
            }
            let mid = (&a + &b) / crate::num::rat(2);
            let vm = Self::sign_variations(&chain, &Bound::Finite(mid.clone()));
            let left = Self::sign_variations(&chain, &Bound::Finite(a.clone())) - vm;
            stack.push((a, mid.clone(), left));
            stack.push((mid, b, count - left));
        }
        isolated.sort_by(|p, q| p.0.cmp(&q.0));
        // Shrink each interval until the right end of one sits strictly
        // left of the next interval's left end.
        let two = crate::num::rat(2);
        for i in 0..isolated.len() {
            loop {
                let disjoint_prev = i == 0 || isolated[i - 1].1 < isolated[i].0;
                if disjoint_prev {
                    break;
                }
                // halve the wider of the two overlapping intervals
                let (j, _) = if (&isolated[i - 1].1 - &isolated[i - 1].0)
                    >= (&isolated[i].1 - &isolated[i].0)
                {
                    (i - 1, ())
                } else {
                    (i, ())
                };
                let (a, b) = isolated[j].clone();
                let mid = (&a + &b) / &two;
                let in_left = Self::sign_variations(&chain, &Bound::Finite(a.clone()))
                    - Self::sign_variations(&chain, &Bound::Finite(mid.clone()))
                    == 1;
                isolated[j] = if in_left { (a, mid) } else { (mid, b) };
            }
        }
        let mut samples = Vec::with_capacity(isolated.len() + 1);
        samples.push(-sf.root_bound());
        for w in isolated.windows(2) {
            samples.push((&w[0].1 + &w[1].0) / &two);
        }
        samples.push(sf.root_bound());
        // Every sample must be off the root set.
        debug_assert!(samples.iter().all(|s| !sf.eval(s).is_zero()));
        Ok(samples)
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => fmt_rat(c),
                1 => format!("{}*t", fmt_rat(c)),
                _ => format!("{}*t^{}", fmt_rat(c), i),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
