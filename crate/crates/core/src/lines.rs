//! Exact lines in 3-space and their incidence structure: pairwise
//! intersection classification, rich-point histograms, coplanar and
//! regulus clusters, generic projection to the plane, and the two-way
//! consistency check between line incidences and partial symmetries.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::Error;
use crate::geom::{P2, P3, V3};
use crate::num::{fmt_rat, parse_rat, Rat};
use crate::points::PointSet2;
use crate::poly::MultiPoly;

/// Line in 3-space, stored in canonical point-direction form.
///
/// Canonical form: the direction is scaled so its first nonzero
/// coordinate is 1 (the pivot), and the base is slid along the line so
/// its pivot coordinate is 0. Two lines are equal as sets exactly when
/// their canonical forms are equal, exactly when their Pluecker tuples
/// are proportional.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line3 {
    base: P3,
    dir: V3,
}

/// Exact classification of a pair of lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Point(P3),
    Coincident,
    ParallelDisjoint,
    Skew,
}

impl Line3 {
    pub fn new(base: P3, dir: V3) -> Result<Self, Error> {
        if dir.is_zero() {
            return Err(Error::InvalidInput("line direction must be nonzero".into()));
        }
        // Scale the direction by its pivot coordinate.
        let pivot = [&dir.x, &dir.y, &dir.z]
            .iter()
            .position(|c| !c.is_zero())
            .unwrap();
        let pc = [&dir.x, &dir.y, &dir.z][pivot].clone();
        let dir = V3::new(&dir.x / &pc, &dir.y / &pc, &dir.z / &pc);
        // Slide the base so its pivot coordinate vanishes.
        let t = -[&base.x, &base.y, &base.z][pivot].clone();
        let base = &base + &dir.scale(&t);
        Ok(Line3 { base, dir })
    }

    pub fn base(&self) -> &P3 {
        &self.base
    }

    pub fn dir(&self) -> &V3 {
        &self.dir
    }

    /// Point at parameter t.
    pub fn at(&self, t: &Rat) -> P3 {
        &self.base + &self.dir.scale(t)
    }

    pub fn contains(&self, x: &P3) -> bool {
        (x - &self.base).cross(&self.dir).is_zero()
    }

    /// Pluecker coordinates (dir, base x dir) of the canonical form.
    pub fn plucker(&self) -> [Rat; 6] {
        let m = (&self.base - &P3::new(Rat::zero(), Rat::zero(), Rat::zero())).cross(&self.dir);
        [
            self.dir.x.clone(),
            self.dir.y.clone(),
            self.dir.z.clone(),
            m.x,
            m.y,
            m.z,
        ]
    }

    /// Reciprocal Pluecker product; zero exactly when the lines are
    /// coplanar (intersecting or parallel).
    pub fn side(&self, other: &Line3) -> Rat {
        let m1 = (&self.base - &P3::new(Rat::zero(), Rat::zero(), Rat::zero())).cross(&self.dir);
        let m2 = (&other.base - &P3::new(Rat::zero(), Rat::zero(), Rat::zero())).cross(&other.dir);
        self.dir.dot(&m2) + other.dir.dot(&m1)
    }

    /// Exact intersection classification.
    pub fn intersect(&self, other: &Line3) -> Intersection {
        if self == other {
            return Intersection::Coincident;
        }
        let cross = self.dir.cross(&other.dir);
        if cross.is_zero() {
            return Intersection::ParallelDisjoint;
        }
        if !self.side(other).is_zero() {
            return Intersection::Skew;
        }
        // Coplanar, non-parallel: unique intersection point.
        let w = &other.base - &self.base;
        let t = w.cross(&other.dir).dot(&cross) / cross.dot(&cross);
        let p = self.at(&t);
        debug_assert!(other.contains(&p));
        Intersection::Point(p)
    }

    /// Parse the CSV line format: `bx,by,bz,dx,dy,dz` per row, rationals
    /// as integers or `num/den`, `#` comments.
    pub fn parse_csv(text: &str) -> Result<Vec<Line3>, Error> {
        let mut lines = Vec::new();
        for (lineno, row) in text.lines().enumerate() {
            let row = row.trim();
            if row.is_empty() || row.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = row.split(',').collect();
            if fields.len() != 6 {
                return Err(Error::Parse(format!(
                    "line {}: expected 6 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let v: Result<Vec<Rat>, Error> = fields.iter().map(|f| parse_rat(f)).collect();
            let v = v?;
            lines.push(Line3::new(
                P3::new(v[0].clone(), v[1].clone(), v[2].clone()),
                V3::new(v[3].clone(), v[4].clone(), v[5].clone()),
            )?);
        }
        Ok(lines)
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            fmt_rat(&self.base.x),
            fmt_rat(&self.base.y),
            fmt_rat(&self.base.z),
            fmt_rat(&self.dir.x),
            fmt_rat(&self.dir.y),
            fmt_rat(&self.dir.z)
        )
    }
}

/// Rich points of a line configuration and the derived S_k counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceHistogram {
    /// point -> number of distinct lines through it (always >= 2)
    pub rich_points: BTreeMap<P3, usize>,
    /// k -> number of points lying on at least k lines, for 2 <= k <= max
    pub s_counts: BTreeMap<usize, u64>,
    /// number of unordered line pairs meeting in a point
    pub intersecting_pairs: u64,
}

impl IncidenceHistogram {
    /// Assemble from per-point line sets; multiplicity is the recounted
    /// number of distinct lines through the point, never inferred from
    /// pair counts.
    fn from_point_lines(point_lines: HashMap<P3, BTreeSet<usize>>, pairs: u64) -> Self {
        let rich_points: BTreeMap<P3, usize> =
            point_lines.into_iter().map(|(p, s)| (p, s.len())).collect();
        let mut s_counts = BTreeMap::new();
        if let Some(&max) = rich_points.values().max() {
            for k in 2..=max {
                let c = rich_points.values().filter(|&&m| m >= k).count() as u64;
                s_counts.insert(k, c);
            }
        }
        IncidenceHistogram {
            rich_points,
            s_counts,
            intersecting_pairs: pairs,
        }
    }

    /// |S_k|: points on at least k lines.
    pub fn s_count(&self, k: usize) -> u64 {
        if k < 2 {
            return *self.s_counts.get(&2).unwrap_or(&0);
        }
        *self.s_counts.get(&k).unwrap_or(&0)
    }

    /// Build directly from a point -> multiplicity map (used by the
    /// structured grid oracle).
    pub fn from_multiplicities(rich_points: BTreeMap<P3, usize>) -> Self {
        let pairs = rich_points
            .values()
            .map(|&m| (m as u64) * (m as u64 - 1) / 2)
            .sum();
        let mut s_counts = BTreeMap::new();
        if let Some(&max) = rich_points.values().max() {
            for k in 2..=max {
                let c = rich_points.values().filter(|&&m| m >= k).count() as u64;
                s_counts.insert(k, c);
            }
        }
        IncidenceHistogram {
            rich_points,
            s_counts,
            intersecting_pairs: pairs,
        }
    }
}

/// Deduplicate lines by canonical form, preserving first occurrence
/// order.
pub fn dedup_lines(lines: &[Line3]) -> Vec<Line3> {
    let mut seen = BTreeSet::new();
    lines
        .iter()
        .filter(|l| seen.insert((*l).clone()))
        .cloned()
        .collect()
}

/// Enumerate all pairs, collect intersection points, and recount the
/// multiplicity of each point as the number of distinct lines through it.
///
/// An optional direction-bucketing pre-pass is subsumed here by the
/// parallel classification itself: parallel pairs short-circuit before
/// any point solve.
pub fn incidence_histogram(lines: &[Line3]) -> IncidenceHistogram {
    let lines = dedup_lines(lines);
    let n = lines.len();
    let (point_lines, pairs) = (0..n)
        .into_par_iter()
        .fold(
            || (HashMap::<P3, BTreeSet<usize>>::new(), 0u64),
            |(mut acc, mut pairs), i| {
                for j in i + 1..n {
                    if let Intersection::Point(p) = lines[i].intersect(&lines[j]) {
                        let e = acc.entry(p).or_default();
                        e.insert(i);
                        e.insert(j);
                        pairs += 1;
                    }
                }
                (acc, pairs)
            },
        )
        .reduce(
            || (HashMap::new(), 0u64),
            |(mut a, pa), (b, pb)| {
                for (k, v) in b {
                    a.entry(k).or_default().extend(v);
                }
                (a, pa + pb)
            },
        );
    IncidenceHistogram::from_point_lines(point_lines, pairs)
}

/// Outcome of the coplanar cluster search.
#[derive(Clone, Debug)]
pub struct CoplanarCluster {
    /// Degree-1 polynomial cutting out the plane; None when every pair is
    /// skew and the max cluster is a single line.
    pub plane: Option<MultiPoly>,
    pub count: usize,
}

fn plane_key(normal: &V3, offset: &Rat) -> Vec<Rat> {
    let v = vec![
        normal.x.clone(),
        normal.y.clone(),
        normal.z.clone(),
        offset.clone(),
    ];
    crate::poly::nullspace_normalize(v)
}

/// The plane spanned by a coplanar, non-coincident pair.
fn spanned_plane(a: &Line3, b: &Line3) -> (V3, Rat) {
    let cross = a.dir().cross(b.dir());
    let normal = if cross.is_zero() {
        a.dir().cross(&(b.base() - a.base()))
    } else {
        cross
    };
    let offset = normal.dot(&(a.base() - &P3::new(Rat::zero(), Rat::zero(), Rat::zero())));
    (normal, offset)
}

fn line_in_plane(l: &Line3, normal: &V3, offset: &Rat) -> bool {
    normal.dot(l.dir()).is_zero()
        && normal.dot(&(l.base() - &P3::new(Rat::zero(), Rat::zero(), Rat::zero()))) == *offset
}

/// Find a plane containing the largest number of input lines, by hashing
/// the canonical plane of every coplanar pair.
pub fn max_coplanar_cluster(lines: &[Line3]) -> Result<CoplanarCluster, Error> {
    let lines = dedup_lines(lines);
    if lines.len() < 2 {
        return Err(Error::InvalidInput(
            "coplanar cluster needs at least 2 lines".into(),
        ));
    }
    let n = lines.len();
    let clusters = (0..n)
        .into_par_iter()
        .fold(
            HashMap::<Vec<Rat>, (V3, Rat, BTreeSet<usize>)>::new,
            |mut acc, i| {
                for j in i + 1..n {
                    match lines[i].intersect(&lines[j]) {
                        Intersection::Point(_) | Intersection::ParallelDisjoint => {
                            let (normal, offset) = spanned_plane(&lines[i], &lines[j]);
                            let key = plane_key(&normal, &offset);
                            let e = acc
                                .entry(key)
                                .or_insert_with(|| (normal, offset, BTreeSet::new()));
                            e.2.insert(i);
                            e.2.insert(j);
                        }
                        _ => {}
                    }
                }
                acc
            },
        )
        .reduce(HashMap::new, |mut a, b| {
            for (k, (n0, c0, s)) in b {
                a.entry(k).or_insert_with(|| (n0, c0, BTreeSet::new())).2.extend(s);
            }
            a
        });
    let best = clusters
        .into_iter()
        .max_by(|(ka, (_, _, sa)), (kb, (_, _, sb))| sa.len().cmp(&sb.len()).then(kb.cmp(ka)));
    match best {
        None => Ok(CoplanarCluster {
            plane: None,
            count: 1,
        }),
        Some((_, (normal, offset, members))) => {
            debug_assert!(members
                .iter()
                .all(|&i| line_in_plane(&lines[i], &normal, &offset)));
            let plane = MultiPoly::from_terms(
                3,
                [
                    (vec![1, 0, 0], normal.x.clone()),
                    (vec![0, 1, 0], normal.y.clone()),
                    (vec![0, 0, 1], normal.z.clone()),
                    (vec![0, 0, 0], -offset),
                ],
            )
            .canonicalize();
            Ok(CoplanarCluster {
                plane: Some(plane),
                count: members.len(),
            })
        }
    }
}

/// Fit the quadric through three pairwise skew lines (three sample points
/// per line pin a degree-2 surface on each full line) and count input
/// lines contained in it.
pub fn regulus_line_count(
    lines: &[Line3],
    l1: &Line3,
    l2: &Line3,
    l3: &Line3,
) -> Result<(MultiPoly, usize), Error> {
    for (a, b) in [(l1, l2), (l1, l3), (l2, l3)] {
        if a.intersect(b) != Intersection::Skew {
            return Err(Error::InvalidInput(
                "regulus seeds must be pairwise skew".into(),
            ));
        }
    }
    let mut samples = Vec::with_capacity(9);
    for l in [l1, l2, l3] {
        for t in 0..3 {
            samples.push(l.at(&crate::num::rat(t)));
        }
    }
    let basis = crate::surfaces::vanishing_basis(&samples, 2)?;
    if basis.len() != 1 {
        return Err(Error::Degenerate(format!(
            "expected a unique quadric through the samples, nullity {}",
            basis.len()
        )));
    }
    let quadric = basis.into_iter().next().unwrap();
    let count = lines
        .iter()
        .filter(|l| {
            quadric
                .restrict_to_line(l.base(), l.dir())
                .map(|r| r.is_zero())
                .unwrap_or(false)
        })
        .count();
    Ok((quadric, count))
}

/// Line in the plane in canonical implicit form a x + b y = c with
/// primitive integer (a, b, c) and positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Line2 {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl Line2 {
    fn through(point: &P2, dir: &(Rat, Rat)) -> Line2 {
        let a = -dir.1.clone();
        let b = dir.0.clone();
        let c = &a * &point.x + &b * &point.y;
        let v = crate::poly::nullspace_normalize(vec![a, b, c]);
        Line2 {
            a: v[0].clone(),
            b: v[1].clone(),
            c: v[2].clone(),
        }
    }

    pub fn contains(&self, p: &P2) -> bool {
        &self.a * &p.x + &self.b * &p.y == self.c
    }
}

/// Result of a generic projection to the z = 0 plane.
#[derive(Clone, Debug)]
pub struct ProjectedConfig {
    pub lines: Vec<Line2>,
    /// images of the 3D rich points, pairwise distinct
    pub rich_points: Vec<P2>,
}

/// Project the configuration along `dir` onto z = 0 and verify the
/// projection is generic: no line parallel to `dir`, image lines pairwise
/// distinct, and rich points mapping to pairwise distinct plane points.
pub fn project_generic(lines: &[Line3], dir: &V3) -> Result<ProjectedConfig, Error> {
    if dir.z.is_zero() {
        return Err(Error::GenericityFailure(
            "projection direction must be transverse to z = 0".into(),
        ));
    }
    let lines = dedup_lines(lines);
    let project = |p: &P3| -> P2 {
        let t = -&p.z / &dir.z;
        P2::new(&p.x + &(&dir.x * &t), &p.y + &(&dir.y * &t))
    };
    let mut images = Vec::with_capacity(lines.len());
    for l in &lines {
        if l.dir().parallel(dir) {
            return Err(Error::GenericityFailure(format!(
                "direction is parallel to line {}",
                l.to_csv_row()
            )));
        }
        let b = project(l.base());
        let tip = l.at(&Rat::one());
        let tip = project(&tip);
        let d = (&tip.x - &b.x, &tip.y - &b.y);
        images.push(Line2::through(&b, &d));
    }
    let distinct: BTreeSet<&Line2> = images.iter().collect();
    if distinct.len() != images.len() {
        return Err(Error::GenericityFailure(
            "two lines project to the same image".into(),
        ));
    }
    let hist = incidence_histogram(&lines);
    let mut rich_points = Vec::with_capacity(hist.rich_points.len());
    let mut seen = BTreeSet::new();
    for p in hist.rich_points.keys() {
        let img = project(p);
        if !seen.insert(img.clone()) {
            return Err(Error::GenericityFailure(
                "two rich points project to the same plane point".into(),
            ));
        }
        rich_points.push(img);
    }
    Ok(ProjectedConfig {
        lines: images,
        rich_points,
    })
}

/// Build the full line family {L_pq} for a point set; the N^2 lines are
/// pairwise distinct.
pub fn motion_lines(set: &PointSet2) -> Vec<Line3> {
    let mut lines = Vec::with_capacity(set.len() * set.len());
    for p in set.points() {
        for q in set.points() {
            lines.push(crate::motions::line_for_pair(p, q));
        }
    }
    lines
}

/// Count G'_k two ways: as rich points of the line family and as
/// non-translation Elekes images with overlap >= k. The counts are equal
/// by construction; a mismatch would mean an invariant violation, so it
/// aborts loudly.
pub fn cross_check_gk(set: &PointSet2, k: usize) -> Result<(u64, u64), Error> {
    const MAX_N: usize = 12;
    if set.len() > MAX_N {
        return Err(Error::BudgetExceeded(format!(
            "cross-check enumerates all quadruples; N must be <= {MAX_N}, got {}",
            set.len()
        )));
    }
    if k < 2 {
        return Err(Error::InvalidInput("k must be >= 2".into()));
    }
    let lines = motion_lines(set);
    let deduped = dedup_lines(&lines);
    assert_eq!(
        deduped.len(),
        set.len() * set.len(),
        "the N^2 motion lines must be pairwise distinct"
    );
    let hist = incidence_histogram(&deduped);
    let via_lines = hist.s_count(k);
    let image = crate::motions::elekes_image(set)?;
    let via_motions = image
        .iter()
        .filter(|(g, &fiber)| {
            !g.is_translation() && crate::motions::fiber_overlap(fiber) >= k
        })
        .count() as u64;
    assert_eq!(
        via_lines, via_motions,
        "line-incidence and motion-overlap counts must agree"
    );
    Ok((via_lines, via_motions))
}
