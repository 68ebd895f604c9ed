//! The square-grid line family between the planes z = 0 and z = 1: exact
//! structured rich-point counting by lattice arithmetic, scaling-law
//! reports, totient sums, and quadruple growth across grid sizes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::geom::{P2, P3, V3};
use crate::lines::{IncidenceHistogram, Line3};
use crate::num::{rat, ratio, Rat};
use crate::points::{distance_histogram, generate_grid};

/// Grid parameter and its derived sizes.
#[derive(Clone, Copy, Debug)]
pub struct GridConfig {
    pub s: u32,
}

impl GridConfig {
    pub fn new(s: u32) -> Result<Self, Error> {
        if s < 1 {
            return Err(Error::InvalidInput("grid parameter must be >= 1".into()));
        }
        Ok(GridConfig { s })
    }

    /// Point count of the ambient grid, (4S+1)^2.
    pub fn n(&self) -> u64 {
        let m = 4 * self.s as u64 + 1;
        m * m
    }

    /// Number of lattice lines between the unit-height planes, S^4.
    pub fn l0_count(&self) -> u64 {
        (self.s as u64).pow(4)
    }
}

/// The planar pair (p, q) whose motion line passes through (a,b,0) and
/// (c,d,1): p = (a+d-b, b-c+a), q = (a-d+b, b+c-a).
pub fn lattice_line_pair(a: i64, b: i64, c: i64, d: i64) -> (P2, P2) {
    (
        P2::new(rat(a + d - b), rat(b - c + a)),
        P2::new(rat(a - d + b), rat(b + c - a)),
    )
}

/// The S^4 lines joining (a,b,0) to (c,d,1) for 1 <= a,b,c,d <= S. Each
/// is also the motion line of a pair of ambient grid points; a sample of
/// that identity is cross-checked here, the full check lives in tests.
pub fn build_l0(s: u32) -> Result<Vec<Line3>, Error> {
    let cfg = GridConfig::new(s)?;
    let s = cfg.s as i64;
    let mut lines = Vec::with_capacity((s * s * s * s) as usize);
    for a in 1..=s {
        for b in 1..=s {
            for c in 1..=s {
                for d in 1..=s {
                    let base = P3::new(rat(a), rat(b), Rat::zero());
                    let dir = V3::new(rat(c - a), rat(d - b), Rat::one());
                    lines.push(Line3::new(base, dir)?);
                }
            }
        }
    }
    // spot-check the pair identity on one corner
    let (p, q) = lattice_line_pair(1, 1, 1, 1);
    debug_assert_eq!(crate::motions::line_for_pair(&p, &q), lines[0]);
    Ok(lines)
}

/// Per-height slice data at z = p/q.
#[derive(Clone, Debug)]
pub struct SliceRecord {
    pub p: u32,
    pub q: u32,
    pub height: Rat,
    /// scaled first-coordinate offset m = a(q-p) + c p -> number of (a,c)
    /// pairs landing there; the x1 of an incidence is m/q
    pub offset_counts: BTreeMap<i64, u64>,
    /// largest two-coordinate overlap (max count squared)
    pub max_overlap: u64,
    /// number of slice points whose pre-image meets the middle subgrid
    pub x_size: u64,
}

/// Exact per-coordinate lattice-intersection counting at height p/q.
pub fn fx_overlap(p: u32, q: u32, s: u32) -> Result<SliceRecord, Error> {
    if p == 0 || p >= q {
        return Err(Error::InvalidInput(
            "slice height needs 0 < p < q".into(),
        ));
    }
    if num_integer::gcd(p, q) != 1 {
        return Err(Error::InvalidInput("p and q must be coprime".into()));
    }
    GridConfig::new(s)?;
    let (p64, q64, s64) = (p as i64, q as i64, s as i64);
    let mut offset_counts: BTreeMap<i64, u64> = BTreeMap::new();
    // base-plane point a maps toward top-plane point c; the image offset
    // stays integral exactly on the residue class a(q-p) + c p
    for a in 1..=s64 {
        for c in 1..=s64 {
            *offset_counts.entry(a * (q64 - p64) + c * p64).or_insert(0) += 1;
        }
    }
    let max_per_coord = offset_counts.values().copied().max().unwrap_or(0);
    // middle-subgrid variant for |X(p,q)|
    let lo = (s64 + 3) / 4; // ceil(S/4)
    let hi = (3 * s64) / 4;
    let mut middle: std::collections::BTreeSet<i64> = std::collections::BTreeSet::new();
    for a in lo..=hi {
        for c in 1..=s64 {
            middle.insert(a * (q64 - p64) + c * p64);
        }
    }
    let x_per_coord = middle.len() as u64;
    Ok(SliceRecord {
        p,
        q,
        height: ratio(p as i64, q as i64),
        offset_counts,
        max_overlap: max_per_coord * max_per_coord,
        x_size: x_per_coord * x_per_coord,
    })
}

/// Heights that can carry rich points: p/q in lowest terms with
/// p <= S-1 and q-p <= S-1 (a repeated offset forces p to divide a
/// nonzero base-plane difference and q-p a top-plane one).
fn rich_heights(s: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let s = s as i64;
    for q in 2..=(2 * (s - 1)).max(0) {
        for p in 1..q {
            if num_integer::gcd(p, q) == 1 && p <= s - 1 && q - p <= s - 1 {
                out.push((p as u32, q as u32));
            }
        }
    }
    out
}

/// Exact multiplicity histogram (multiplicity -> point count) of the
/// rich points of the lattice line family within the closed slab
/// 0 <= z <= 1, including the boundary points of multiplicity S^2. Never
/// enumerates lines; scales to S of a few dozen.
pub fn slab_multiplicity_histogram(s: u32) -> Result<BTreeMap<u64, u64>, Error> {
    GridConfig::new(s)?;
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for (p, q) in rich_heights(s) {
        let rec = fx_overlap(p, q, s)?;
        // group the per-coordinate offsets by their count value
        let mut value_hist: BTreeMap<u64, u64> = BTreeMap::new();
        for &c in rec.offset_counts.values() {
            *value_hist.entry(c).or_insert(0) += 1;
        }
        for (&v1, &h1) in &value_hist {
            for (&v2, &h2) in &value_hist {
                let mult = v1 * v2;
                if mult >= 2 {
                    *hist.entry(mult).or_insert(0) += h1 * h2;
                }
            }
        }
    }
    // boundary planes: each of the 2 S^2 endpoints lies on S^2 lines
    let s2 = (s as u64) * (s as u64);
    if s2 >= 2 {
        *hist.entry(s2).or_insert(0) += 2 * s2;
    }
    Ok(hist)
}

/// Materialized slab histogram with exact rational rich points; used to
/// compare against brute-force pair enumeration at small S.
pub fn slab_histogram_oracle(s: u32) -> Result<IncidenceHistogram, Error> {
    GridConfig::new(s)?;
    if s > 12 {
        return Err(Error::BudgetExceeded(
            "materialized slab oracle is limited to S <= 12; use the multiplicity histogram"
                .into(),
        ));
    }
    let mut points: BTreeMap<P3, usize> = BTreeMap::new();
    for (p, q) in rich_heights(s) {
        let rec = fx_overlap(p, q, s)?;
        let qi = rat(q as i64);
        let z = rec.height.clone();
        for (&m1, &n1) in &rec.offset_counts {
            for (&m2, &n2) in &rec.offset_counts {
                let mult = n1 * n2;
                if mult >= 2 {
                    let pt = P3::new(rat(m1) / &qi, rat(m2) / &qi, z.clone());
                    points.insert(pt, mult as usize);
                }
            }
        }
    }
    let s2 = (s as usize) * (s as usize);
    if s2 >= 2 {
        for a in 1..=s as i64 {
            for b in 1..=s as i64 {
                points.insert(P3::new(rat(a), rat(b), Rat::zero()), s2);
                points.insert(P3::new(rat(a), rat(b), Rat::one()), s2);
            }
        }
    }
    Ok(IncidenceHistogram::from_multiplicities(points))
}

/// Restrict a brute-force histogram to the closed slab 0 <= z <= 1.
pub fn restrict_to_slab(hist: &IncidenceHistogram) -> IncidenceHistogram {
    let points: BTreeMap<P3, usize> = hist
        .rich_points
        .iter()
        .filter(|(p, _)| !p.z.is_negative() && p.z <= Rat::one())
        .map(|(p, m)| (p.clone(), *m))
        .collect();
    IncidenceHistogram::from_multiplicities(points)
}

/// One row of the scaling report.
#[derive(Clone, Debug)]
pub struct ScalingRow {
    pub k: u64,
    pub s_k: u64,
    /// s_k * k^2 / S^6, the constant the scaling law predicts is bounded
    pub ratio: Rat,
}

#[derive(Clone, Debug)]
pub struct ScalingReport {
    pub s: u32,
    pub rows: Vec<ScalingRow>,
    /// least-squares slope of log s_k against log k (convenience value)
    pub slope_approx: f64,
}

/// Exact |S_k| over a k range from the slab oracle, with the fitted
/// log-log slope.
pub fn scaling_report(s: u32, k_lo: u64, k_hi: u64) -> Result<ScalingReport, Error> {
    if k_lo < 2 || k_lo > k_hi {
        return Err(Error::InvalidInput(
            "scaling report needs a k range with 2 <= k_lo <= k_hi".into(),
        ));
    }
    let hist = slab_multiplicity_histogram(s)?;
    let s6 = BigInt::from(s).pow(6);
    let mut rows = Vec::new();
    for k in k_lo..=k_hi {
        let s_k: u64 = hist.range(k..).map(|(_, c)| c).sum();
        let ratio = Rat::new(BigInt::from(s_k) * BigInt::from(k) * BigInt::from(k), s6.clone());
        rows.push(ScalingRow { k, s_k, ratio });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.s_k > 0)
        .map(|r| ((r.k as f64).ln(), (r.s_k as f64).ln()))
        .collect();
    let slope_approx = least_squares_slope(&pts);
    Ok(ScalingReport {
        s,
        rows,
        slope_approx,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// 3/pi^2 as a frozen rational, accurate to 5e-51 (the comparison
/// tolerance downstream is 0.5%, so the constant's own error is
/// negligible).
pub fn three_over_pi_squared() -> Rat {
    let num: BigInt = "30396355092701331433163838962918291671307632401674"
        .parse()
        .unwrap();
    Rat::new(num, BigInt::from(10u8).pow(50))
}

/// Euler totients 0..=x by sieve.
pub fn totient_sieve(x: u64) -> Vec<u64> {
    let n = x as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    phi
}

#[derive(Clone, Debug)]
pub struct TotientCheck {
    pub x: u64,
    pub sum: u64,
    /// (3/pi^2) x^2 as an exact rational
    pub expected: Rat,
    /// |sum - expected| / x^2
    pub relative_error: Rat,
}

/// Exact totient sum against the quadratic asymptotic.
pub fn totient_sum_check(x: u64) -> Result<TotientCheck, Error> {
    if x < 1 {
        return Err(Error::InvalidInput("totient check needs x >= 1".into()));
    }
    let phi = totient_sieve(x);
    let sum: u64 = phi[1..].iter().sum();
    let x2 = Rat::from_integer(BigInt::from(x) * BigInt::from(x));
    let expected = three_over_pi_squared() * &x2;
    let diff = (Rat::from_integer(BigInt::from(sum)) - &expected).abs();
    Ok(TotientCheck {
        x,
        sum,
        expected,
        relative_error: diff / x2,
    })
}

/// One row of the quadruple-growth table.
#[derive(Clone, Debug)]
pub struct QpGrowthRow {
    pub s: u32,
    pub n: u64,
    pub quadruples: u64,
    /// |Q| / (N^3 ln N), for bounded-ratio inspection
    pub ratio_approx: f64,
}

/// Exact |Q(P)| for each grid size, with the normalized growth ratio.
pub fn qp_growth_report(s_values: &[u32]) -> Result<Vec<QpGrowthRow>, Error> {
    if s_values.is_empty() {
        return Err(Error::InvalidInput("no grid sizes requested".into()));
    }
    let mut rows = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let grid = generate_grid(s)?;
        let hist = distance_histogram(&grid)?;
        let quadruples = hist.quadruple_count();
        let n = grid.len() as u64;
        let denom = (n as f64).powi(3) * (n as f64).ln();
        rows.push(QpGrowthRow {
            s,
            n,
            quadruples,
            ratio_approx: quadruples as f64 / denom,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lines::{dedup_lines, incidence_histogram};
    use crate::motions::line_for_pair;

    #[test]
    fn l0_size_one_is_the_diagonal_pair_line() {
        let lines = build_l0(1).unwrap();
        assert_eq!(lines.len(), 1);
        let (p, q) = lattice_line_pair(1, 1, 1, 1);
        assert_eq!(p, crate::geom::p2(1, 1));
        assert_eq!(q, crate::geom::p2(1, 1));
        assert_eq!(lines[0], line_for_pair(&p, &q));
    }

    #[test]
    fn l0_lines_are_distinct_and_match_pair_formulas() {
        let lines = build_l0(2).unwrap();
        assert_eq!(lines.len(), 16);
        assert_eq!(dedup_lines(&lines).len(), 16);
        let grid = generate_grid(2).unwrap();
        let mut idx = 0;
        for a in 1..=2i64 {
            for b in 1..=2i64 {
                for c in 1..=2i64 {
                    for d in 1..=2i64 {
                        let (p, q) = lattice_line_pair(a, b, c, d);
                        assert_eq!(lines[idx], line_for_pair(&p, &q));
                        assert!(grid.contains(&p) && grid.contains(&q));
                        idx += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn appendix_formula_sample() {
        // (a,b,c,d) = (1,2,3,1) gives p = (0,0), q = (2,4)
        let (p, q) = lattice_line_pair(1, 2, 3, 1);
        assert_eq!(p, crate::geom::p2(0, 0));
        assert_eq!(q, crate::geom::p2(2, 4));
        let l = Line3::new(crate::geom::p3(1, 2, 0), crate::geom::v3(2, -1, 1)).unwrap();
        assert_eq!(line_for_pair(&p, &q), l);
    }

    #[test]
    fn fx_overlap_validation() {
        assert!(fx_overlap(2, 4, 3).is_err()); // not coprime
        assert!(fx_overlap(0, 2, 3).is_err());
        assert!(fx_overlap(3, 2, 3).is_err());
        let rec = fx_overlap(1, 2, 4).unwrap();
        assert_eq!(rec.height, ratio(1, 2));
        // total pre-images: S^2 pairs distributed over the offsets
        let total: u64 = rec.offset_counts.values().sum();
        assert_eq!(total, 16);
    }

    #[test]
    fn midheight_slices_have_large_overlap() {
        // at height 1/2 the image grid has spacing (q-p)/p = 1, so
        // overlaps near S^2/4 appear; the bound 4 min(S^2/(q-p)^2, S^2/p^2)
        // must hold per slice
        for s in 2..=5u32 {
            let rec = fx_overlap(1, 2, s).unwrap();
            let s2 = (s as u64) * (s as u64);
            assert!(rec.max_overlap >= (s2 / 2 - 1) * (s2 / 2 - 1) / s2);
            for (p, q) in rich_heights(s) {
                // per-coordinate counts are progression-in-interval sizes:
                // at most 1 + (S-1)/p and 1 + (S-1)/(q-p)
                let r = fx_overlap(p, q, s).unwrap();
                let per = r.offset_counts.values().copied().max().unwrap();
                assert!(per <= 1 + (s as u64 - 1) / p as u64);
                assert!(per <= 1 + (s as u64 - 1) / (q - p) as u64);
            }
        }
    }

    #[test]
    fn boundary_points_carry_s_squared_lines() {
        let s = 3u32;
        let oracle = slab_histogram_oracle(s).unwrap();
        let s2 = (s as usize) * (s as usize);
        for a in 1..=s as i64 {
            for b in 1..=s as i64 {
                assert_eq!(oracle.rich_points[&crate::geom::p3(a, b, 0)], s2);
                assert_eq!(oracle.rich_points[&crate::geom::p3(a, b, 1)], s2);
            }
        }
    }

    #[test]
    fn oracle_matches_brute_force_small() {
        for s in 2..=3u32 {
            let oracle = slab_histogram_oracle(s).unwrap();
            let brute = restrict_to_slab(&incidence_histogram(&build_l0(s).unwrap()));
            assert_eq!(oracle.rich_points, brute.rich_points, "S = {s}");
            assert_eq!(oracle.s_counts, brute.s_counts, "S = {s}");
        }
    }

    #[test]
    fn multiplicity_histogram_agrees_with_materialized() {
        for s in 2..=4u32 {
            let grouped = slab_multiplicity_histogram(s).unwrap();
            let oracle = slab_histogram_oracle(s).unwrap();
            let mut from_points: BTreeMap<u64, u64> = BTreeMap::new();
            for &m in oracle.rich_points.values() {
                *from_points.entry(m as u64).or_insert(0) += 1;
            }
            assert_eq!(grouped, from_points, "S = {s}");
        }
    }

    #[test]
    fn scaling_rows_are_monotone() {
        let rep = scaling_report(4, 2, 16).unwrap();
        for w in rep.rows.windows(2) {
            assert!(w[0].s_k >= w[1].s_k);
        }
        // k = S^2 = 16: the 2 S^2 = 32 boundary points are exactly that rich
        let row16 = rep.rows.iter().find(|r| r.k == 16).unwrap();
        assert!(row16.s_k >= 32);
        // k beyond the maximum multiplicity
        let rep_hi = scaling_report(2, 2, 50).unwrap();
        assert_eq!(rep_hi.rows.last().unwrap().s_k, 0);
        assert!(scaling_report(4, 2, 1).is_err());
    }

    #[test]
    fn totient_checks() {
        let t = totient_sum_check(10).unwrap();
        assert_eq!(t.sum, 32);
        // 3/pi^2 * 100 is about 30.4
        assert!(t.expected > rat(30) && t.expected < rat(31));
        assert_eq!(totient_sum_check(1).unwrap().sum, 1);
        assert!(totient_sum_check(0).is_err());
    }

    #[test]
    fn totient_sieve_matches_gcd_counting() {
        let phi = totient_sieve(500);
        for n in 1..=500u64 {
            let direct = (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u64;
            assert_eq!(phi[n as usize], direct, "phi({n})");
        }
    }

    #[test]
    fn qp_growth_small() {
        let rows = qp_growth_report(&[1]).unwrap();
        assert_eq!(rows[0].n, 25);
        let grid = generate_grid(1).unwrap();
        assert_eq!(
            rows[0].quadruples,
            crate::points::quadruple_count(&grid).unwrap()
        );
        assert!(rows[0].ratio_approx.is_finite() && rows[0].ratio_approx > 0.0);
        assert!(qp_growth_report(&[]).is_err());
    }

    #[test]
    fn slab_restriction_drops_outside_points() {
        // two lines meeting below the slab
        let l1 = Line3::new(crate::geom::p3(0, 0, -1), crate::geom::v3(1, 0, 1)).unwrap();
        let l2 = Line3::new(crate::geom::p3(0, 0, -1), crate::geom::v3(0, 1, 1)).unwrap();
        let hist = incidence_histogram(&[l1, l2]);
        assert_eq!(hist.rich_points.len(), 1);
        assert!(restrict_to_slab(&hist).rich_points.is_empty());
    }

    #[test]
    fn x_size_counts_middle_preimages() {
        let rec = fx_overlap(1, 2, 8).unwrap();
        assert!(rec.x_size > 0);
        // middle offsets are a subset of all offsets
        let rec_full_points = rec.offset_counts.len() as u64;
        assert!(rec.x_size <= rec_full_points * rec_full_points);
    }
}
