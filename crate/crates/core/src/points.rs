//! Planar point sets, their distance statistics, and the
//! Cauchy--Schwarz link between the number of distinct distances and the
//! number of distance quadruples.
//!
//! Distances are kept as exact squared distances throughout: two segments
//! have the same length exactly when their squared lengths agree as
//! rationals, so no square roots ever appear.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::Error;
use crate::geom::P2;
use crate::num::{parse_rat, rat, Rat};

/// Finite set of distinct planar points with exact coordinates.
#[derive(Clone, Debug)]
pub struct PointSet2 {
    points: Vec<P2>,
}

/// Counts of ordered pairs per squared distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceHistogram {
    /// squared distance (> 0) -> number of ordered pairs at that distance
    pub entries: BTreeMap<Rat, u64>,
}

impl PointSet2 {
    /// Build from a point list; duplicates are rejected, not silently
    /// dropped, because every N-dependent identity downstream would be
    /// corrupted by dedup.
    pub fn new(points: Vec<P2>) -> Result<Self, Error> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point set must be non-empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in &points {
            if !seen.insert(p.clone()) {
                return Err(Error::InvalidInput(format!("duplicate point {p:?}")));
            }
        }
        Ok(PointSet2 { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees N >= 1
    }

    pub fn points(&self) -> &[P2] {
        &self.points
    }

    pub fn contains(&self, p: &P2) -> bool {
        self.points.iter().any(|q| q == p)
    }

    /// Parse the CSV point format: one `x,y` per line, rationals as
    /// decimal integers or `num/den`, `#` starts a comment line.
    pub fn parse_csv(text: &str) -> Result<Self, Error> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',');
            let (Some(x), Some(y), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected `x,y`, got `{line}`",
                    lineno + 1
                )));
            };
            points.push(P2::new(parse_rat(x)?, parse_rat(y)?));
        }
        Self::new(points)
    }

    /// Serialize to the CSV point format.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format!(
                "{},{}\n",
                crate::num::fmt_rat(&p.x),
                crate::num::fmt_rat(&p.y)
            ));
        }
        out
    }
}

/// Histogram of squared distances over all ordered pairs of distinct
/// points. Requires N >= 2.
pub fn distance_histogram(set: &PointSet2) -> Result<DistanceHistogram, Error> {
    let pts = set.points();
    let n = pts.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "distance histogram needs at least 2 points".into(),
        ));
    }
    // Unordered pairs, each contributing 2 ordered pairs; data-parallel
    // over the first index with mergeable partial histograms.
    let entries = (0..n)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<Rat, u64>, i| {
            for j in i + 1..n {
                let d2 = pts[i].dist2(&pts[j]);
                *acc.entry(d2).or_insert(0) += 2;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(DistanceHistogram { entries })
}

impl DistanceHistogram {
    /// Number of distinct distances |d(P)|.
    pub fn distinct_count(&self) -> usize {
        self.entries.len()
    }

    /// Total ordered pairs; always N^2 - N.
    pub fn total_pairs(&self) -> u64 {
        self.entries.values().sum()
    }

    /// |Q(P)| = sum of n_i^2 over the histogram.
    pub fn quadruple_count(&self) -> u64 {
        self.entries.values().map(|&n| n * n).sum()
    }
}

/// |Q(P)|: the number of ordered quadruples (p1,p2,p3,p4) with
/// d(p1,p2) = d(p3,p4) != 0, computed as sum n_i^2.
pub fn quadruple_count(set: &PointSet2) -> Result<u64, Error> {
    Ok(distance_histogram(set)?.quadruple_count())
}

/// Lower bound on |d(P)|: (N^2 - N)^2 / |Q(P)| (the sharp form of the
/// Cauchy--Schwarz argument). The caller-visible invariant is
/// |d(P)| >= this value.
pub fn cs_lower_bound(set: &PointSet2) -> Result<Rat, Error> {
    let h = distance_histogram(set)?;
    let n = set.len() as i64;
    let pairs = rat(n * n - n);
    let q = h.quadruple_count();
    debug_assert!(q > 0);
    Ok(&pairs * &pairs / Rat::from_integer(BigInt::from(q)))
}

/// Integer grid {(x, y) : |x| <= 2S, |y| <= 2S}, N = (4S+1)^2.
///
/// The side bound is 2S rather than S so that the lattice line family at
/// heights 0 and 1 (see `grid`) stays inside the set.
pub fn generate_grid(s: u32) -> Result<PointSet2, Error> {
    if s < 1 {
        return Err(Error::InvalidInput("grid parameter must be >= 1".into()));
    }
    let m = 2 * s as i64;
    let mut points = Vec::with_capacity(((4 * s + 1) * (4 * s + 1)) as usize);
    for x in -m..=m {
        for y in -m..=m {
            points.push(P2::new(rat(x), rat(y)));
        }
    }
    PointSet2::new(points)
}

/// Brute-force |Q(P)| by four nested loops; the independent oracle for
/// `quadruple_count`, kept free of the histogram code path.
pub fn quadruple_count_brute_force(set: &PointSet2) -> u64 {
    let pts = set.points();
    let mut count = 0u64;
    for p1 in pts {
        for p2 in pts {
            let d12 = p1.dist2(p2);
            if d12.is_zero() {
                continue;
            }
            for p3 in pts {
                for p4 in pts {
                    if d12 == p3.dist2(p4) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}
