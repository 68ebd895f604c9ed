//! Discrete polynomial ham-sandwich cuts and the iterated sign-vector
//! cell decomposition, with every claimed property verified exactly.
//!
//! Two engines produce cut polynomials. The exact engine enumerates
//! candidate hyperplanes through lifted input points: if any polynomial
//! bisects the sets, some candidate orthogonal to M = C(d+3,3)-1
//! independent lifted points does too (sliding a bisecting coefficient
//! vector to an extreme ray of its sign cone only moves point values to
//! zero, which never breaks bisection), so the search is complete. The
//! heuristic engine does randomized descent with exact one-parameter
//! pencil sweeps; anything it returns has been verified exactly, and
//! failure is a value carrying the best margins reached.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;

use crate::error::Error;
use crate::geom::P3;
use crate::num::{rat, sign, Rat};
use crate::poly::{nullspace, nullspace_normalize, rank, MultiPoly};
use crate::surfaces::{monomial_count, monomials_up_to};

/// Budget for the exhaustive engine; the candidate enumeration is
/// combinatorial in the point count and the lifted dimension.
#[derive(Clone, Debug)]
pub struct ExactBudget {
    pub max_points: usize,
    pub max_m: usize,
}

impl Default for ExactBudget {
    fn default() -> Self {
        ExactBudget {
            max_points: 60,
            max_m: 4,
        }
    }
}

/// Tuning knobs for the heuristic engine.
#[derive(Clone, Debug)]
pub struct HeuristicParams {
    /// total screened pencil sweeps before giving up
    pub max_sweeps: usize,
    /// consecutive non-improving sweeps before a restart
    pub stall_limit: usize,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            max_sweeps: 400_000,
            stall_limit: 12_000,
        }
    }
}

/// Cut engine selection.
#[derive(Clone, Debug)]
pub enum Engine {
    Exact(ExactBudget),
    Heuristic(HeuristicParams),
}

/// Per-set margins of a candidate: strictly positive points, strictly
/// negative points, and the allowed maximum floor(|S_i|/2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetMargins {
    pub positive: usize,
    pub negative: usize,
    pub allowed: usize,
}

impl SetMargins {
    pub fn balanced(&self) -> bool {
        self.positive <= self.allowed && self.negative <= self.allowed
    }
}

/// Exact bisection check: per-set sign counts of p on the sets.
pub fn bisection_margins(sets: &[Vec<P3>], p: &MultiPoly) -> Vec<SetMargins> {
    sets.iter()
        .map(|s| {
            let mut positive = 0;
            let mut negative = 0;
            for x in s {
                match sign(&p.eval_p3(x)) {
                    1 => positive += 1,
                    -1 => negative += 1,
                    _ => {}
                }
            }
            SetMargins {
                positive,
                negative,
                allowed: s.len() / 2,
            }
        })
        .collect()
}

/// True when p simultaneously bisects every set: at most half of each
/// set strictly positive, at most half strictly negative.
pub fn bisects(sets: &[Vec<P3>], p: &MultiPoly) -> bool {
    !p.is_zero() && bisection_margins(sets, p).iter().all(SetMargins::balanced)
}

fn poly_from_coeffs(monomials: &[[u16; 3]], coeffs: &[Rat]) -> MultiPoly {
    MultiPoly::from_terms(
        3,
        monomials
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e.to_vec(), c.clone())),
    )
}

fn lift(x: &P3, monomials: &[[u16; 3]]) -> Vec<Rat> {
    monomials
        .iter()
        .map(|e| {
            let mut t = rat(1);
            for (i, coord) in x.coords().iter().enumerate() {
                for _ in 0..e[i] {
                    t *= *coord;
                }
            }
            t
        })
        .collect()
}

fn distinct_points(sets: &[Vec<P3>]) -> Vec<P3> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for s in sets {
        for x in s {
            if seen.insert(x.clone()) {
                out.push(x.clone());
            }
        }
    }
    out
}

/// Exhaustive exact engine: returns a verified simultaneous bisector of
/// degree <= d, searching hyperplanes spanned by lifted input points.
pub fn bisect_exact(sets: &[Vec<P3>], d: usize, budget: &ExactBudget) -> Result<MultiPoly, Error> {
    let m = monomial_count(d) - 1;
    if sets.len() > m {
        return Err(Error::InvalidInput(format!(
            "{} sets exceed the degree-{d} capacity M = {m}",
            sets.len()
        )));
    }
    let total: usize = sets.iter().map(Vec::len).sum();
    if total > budget.max_points || m > budget.max_m {
        return Err(Error::BudgetExceeded(format!(
            "exact engine limited to {} points and M <= {} (got {} points, M = {m}); \
             use the heuristic engine",
            budget.max_points, budget.max_m, total
        )));
    }
    if total == 0 {
        // nothing to bisect; any nonzero polynomial works
        return Ok(MultiPoly::constant(3, rat(1)));
    }
    let monomials = monomials_up_to(d);
    let dim = monomials.len();
    let points = distinct_points(sets);
    let lifts: Vec<Vec<Rat>> = points.iter().map(|x| lift(x, &monomials)).collect();

    // Degenerate case: the lifted points do not span. The canonical
    // global nullspace vector vanishes on every point and bisects
    // trivially.
    if rank(&lifts)? < dim {
        let basis = nullspace(&lifts)?;
        let p = poly_from_coeffs(&monomials, &basis[0]);
        debug_assert!(bisects(sets, &p));
        return Ok(p);
    }

    // Enumerate M-subsets in deterministic order; rank-M subsets give a
    // one-dimensional nullspace, i.e. one candidate each.
    let n = points.len();
    let mut subset: Vec<usize> = (0..m).collect();
    loop {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| lifts[i].clone()).collect();
        let basis = nullspace(&rows)?;
        if basis.len() == 1 {
            let p = poly_from_coeffs(&monomials, &basis[0]);
            if bisects(sets, &p) {
                return Ok(p);
            }
        }
        // next M-combination of 0..n in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                return Err(Error::EngineFailure(
                    "exhaustive search found no verified cut; this contradicts the \
                     existence guarantee"
                        .into(),
                ));
            }
            i -= 1;
            if subset[i] != i + n - m {
                subset[i] += 1;
                for j in i + 1..m {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Failure value of the heuristic engine: the best candidate's margins.
#[derive(Clone, Debug)]
pub struct HeuristicFailure {
    pub best_margins: Vec<SetMargins>,
    pub sweeps_used: usize,
}

/// Outcome of the heuristic engine.
#[derive(Clone, Debug)]
pub enum HeuristicOutcome {
    /// Exactly verified simultaneous bisector.
    Cut(MultiPoly),
    Failure(HeuristicFailure),
}

struct SweepState {
    /// lifted coordinates per point
    lifts: Vec<Vec<Rat>>,
    /// set index per point
    owner: Vec<usize>,
    /// floor(|S_i|/2) per set
    allowed: Vec<usize>,
}

impl SweepState {
    fn imbalance_of_values(&self, values: &[Rat]) -> usize {
        let nsets = self.allowed.len();
        let mut pos = vec![0usize; nsets];
        let mut neg = vec![0usize; nsets];
        for (j, v) in values.iter().enumerate() {
            match sign(v) {
                1 => pos[self.owner[j]] += 1,
                -1 => neg[self.owner[j]] += 1,
                _ => {}
            }
        }
        (0..nsets)
            .map(|i| {
                pos[i].saturating_sub(self.allowed[i]) + neg[i].saturating_sub(self.allowed[i])
            })
            .sum()
    }

}


/// Robust float approximation of a rational: shifts numerator and
/// denominator together so the conversion never hits infinity, and maps
/// exact zero to exactly 0.0.
fn approx_f64(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    if x.is_zero() {
        return 0.0;
    }
    let nb = x.numer().bits();
    let db = x.denom().bits();
    let shift = nb.max(db).saturating_sub(500);
    let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift).to_f64().unwrap_or(0.0);
    if d == 0.0 {
        return if n >= 0.0 { 1e300 } else { -1e300 };
    }
    if n == 0.0 {
        // magnitude underflows the shifted window; the sign is gone but
        // the exact recount downstream never trusts floats anyway
        return 0.0;
    }
    n / d
}

/// Candidate location found by a float sweep along a pencil.
#[derive(Clone, Copy, Debug)]
enum SweepSpot {
    /// at the crossing value of this point index (pins it)
    Crossing(usize),
    /// strictly between the crossings of these two point indices
    Between(usize, usize),
    /// left of the first crossing / right of the last crossing
    LeftOf(usize),
    RightOf(usize),
}

/// Randomized-restart descent engine. Every returned cut has been
/// verified exactly; `Failure` carries the best margins achieved.
///
/// The search walks coefficient space along one-parameter pencils
/// c + lambda * g with directions g drawn from the subspace of
/// polynomials vanishing on the currently pinned points, so pinned
/// surface points survive every move. Pencils are screened with a cheap
/// float sweep over the crossing values; only predicted improvements are
/// re-derived in exact arithmetic, and a candidate is committed only
/// after an exact recount confirms it. The direction basis is rebuilt
/// from the pin lifts (small integers) whenever the pin set grows.
pub fn bisect_heuristic<R: Rng>(
    sets: &[Vec<P3>],
    d: usize,
    params: &HeuristicParams,
    rng: &mut R,
) -> Result<HeuristicOutcome, Error> {
    let m = monomial_count(d) - 1;
    if sets.len() > m {
        return Err(Error::InvalidInput(format!(
            "{} sets exceed the degree-{d} capacity M = {m}",
            sets.len()
        )));
    }
    let monomials = monomials_up_to(d);
    let dim = monomials.len();
    let mut lifts = Vec::new();
    let mut owner = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        for x in s {
            lifts.push(lift(x, &monomials));
            owner.push(i);
        }
    }
    if lifts.is_empty() {
        return Ok(HeuristicOutcome::Cut(MultiPoly::constant(3, rat(1))));
    }
    let state = SweepState {
        lifts,
        owner,
        allowed: sets.iter().map(|s| s.len() / 2).collect(),
    };
    let npoints = state.lifts.len();
    let nsets = state.allowed.len();

    // exact direction basis of the pinned subspace, with exact values at
    // every point and a float view of those values
    struct BasisVec {
        coeffs: Vec<Rat>,
        values: Vec<Rat>,
        fvalues: Vec<f64>,
    }
    let make_basis_vec = |coeffs: Vec<Rat>| -> BasisVec {
        let values: Vec<Rat> = state
            .lifts
            .iter()
            .map(|l| l.iter().zip(&coeffs).map(|(a, b)| a * b).sum())
            .collect();
        let fvalues = values.iter().map(approx_f64).collect();
        BasisVec {
            coeffs,
            values,
            fvalues,
        }
    };
    let identity_basis = || -> Vec<BasisVec> {
        (0..dim)
            .map(|b| {
                let coeffs: Vec<Rat> = (0..dim)
                    .map(|i| if i == b { rat(1) } else { Rat::zero() })
                    .collect();
                make_basis_vec(coeffs)
            })
            .collect()
    };
    let basis_for_pins = |pinned: &[bool]| -> Result<Option<Vec<BasisVec>>, Error> {
        let rows: Vec<Vec<Rat>> = (0..npoints)
            .filter(|&j| pinned[j])
            .map(|j| state.lifts[j].clone())
            .collect();
        if rows.is_empty() {
            return Ok(Some(identity_basis()));
        }
        let kernel = nullspace(&rows)?;
        if kernel.len() < 2 {
            return Ok(None);
        }
        Ok(Some(kernel.into_iter().map(make_basis_vec).collect()))
    };

    // current candidate, exact and float
    struct Candidate {
        coeffs: Vec<Rat>,
        values: Vec<Rat>,
        fvalues: Vec<f64>,
    }
    let candidate_from = |coeffs: Vec<Rat>| -> Candidate {
        let coeffs = nullspace_normalize(coeffs);
        let values: Vec<Rat> = state
            .lifts
            .iter()
            .map(|l| l.iter().zip(&coeffs).map(|(a, b)| a * b).sum())
            .collect();
        let fvalues = values.iter().map(approx_f64).collect();
        Candidate {
            coeffs,
            values,
            fvalues,
        }
    };
    let random_coeffs = |rng: &mut R, basis: &[BasisVec]| -> Vec<Rat> {
        loop {
            let mut out = vec![Rat::zero(); dim];
            let mut nonzero = false;
            for b in basis {
                let w = rng.gen_range(-5i64..=5);
                if w == 0 {
                    continue;
                }
                nonzero = true;
                let w = rat(w);
                for (o, c) in out.iter_mut().zip(&b.coeffs) {
                    *o += &w * c;
                }
            }
            if nonzero && out.iter().any(|c| !c.is_zero()) {
                return out;
            }
        }
    };

    // float sweep along fv + lambda * gv: returns the predicted best
    // imbalance and where it occurs
    let float_sweep = |fv: &[f64], gv: &[f64]| -> Option<(usize, SweepSpot)> {
        let mut crossings: Vec<(f64, usize)> = Vec::new();
        for j in 0..npoints {
            if gv[j] != 0.0 {
                crossings.push((-fv[j] / gv[j], j));
            }
        }
        if crossings.is_empty() {
            return None;
        }
        crossings.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut pos = vec![0usize; nsets];
        let mut neg = vec![0usize; nsets];
        let mut cur = vec![0i8; npoints];
        for j in 0..npoints {
            let s = if gv[j] != 0.0 {
                if gv[j] > 0.0 {
                    -1
                } else {
                    1
                }
            } else if fv[j] > 0.0 {
                1
            } else if fv[j] < 0.0 {
                -1
            } else {
                0
            };
            cur[j] = s;
            match s {
                1 => pos[owner_of(&state, j)] += 1,
                -1 => neg[owner_of(&state, j)] += 1,
                _ => {}
            }
        }
        let imb = |pos: &[usize], neg: &[usize]| -> usize {
            (0..nsets)
                .map(|i| {
                    pos[i].saturating_sub(state.allowed[i])
                        + neg[i].saturating_sub(state.allowed[i])
                })
                .sum()
        };
        let mut best = imb(&pos, &neg);
        let mut best_at = SweepSpot::LeftOf(crossings[0].1);
        let mut k = 0;
        while k < crossings.len() {
            // group equal float crossing values
            let mut kk = k;
            while kk < crossings.len() && crossings[kk].0 == crossings[k].0 {
                kk += 1;
            }
            let group = &crossings[k..kk];
            for &(_, j) in group {
                match cur[j] {
                    1 => pos[owner_of(&state, j)] -= 1,
                    -1 => neg[owner_of(&state, j)] -= 1,
                    _ => {}
                }
            }
            let at = imb(&pos, &neg);
            if at < best {
                best = at;
                best_at = SweepSpot::Crossing(group[0].1);
            }
            for &(_, j) in group {
                cur[j] = if gv[j] > 0.0 { 1 } else { -1 };
                match cur[j] {
                    1 => pos[owner_of(&state, j)] += 1,
                    -1 => neg[owner_of(&state, j)] += 1,
                    _ => {}
                }
            }
            let after = imb(&pos, &neg);
            if after < best {
                best = after;
                best_at = match crossings.get(kk) {
                    Some(&(_, r)) => SweepSpot::Between(group[0].1, r),
                    None => SweepSpot::RightOf(group[0].1),
                };
            }
            k = kk;
        }
        Some((best, best_at))
    };

    let mut basis = identity_basis();
    let mut pinned = vec![false; npoints];
    let mut current = candidate_from(random_coeffs(rng, &basis));
    let mut imbalance = state.imbalance_of_values(&current.values);
    let mut best_margins: Option<(usize, Vec<SetMargins>)> = None;
    let mut stall = 0usize;
    let mut sweeps = 0usize;

    while sweeps < params.max_sweeps && imbalance > 0 {
        sweeps += 1;
        // small-integer weights over the basis
        let mut weights = vec![0i64; basis.len()];
        loop {
            for w in weights.iter_mut() {
                *w = rng.gen_range(-5..=5);
            }
            if weights.iter().any(|&w| w != 0) {
                break;
            }
        }
        let mut gv = vec![0.0f64; npoints];
        for (b, &w) in basis.iter().zip(&weights) {
            if w != 0 {
                let wf = w as f64;
                for (g, v) in gv.iter_mut().zip(&b.fvalues) {
                    *g += wf * v;
                }
            }
        }
        let Some((predicted, spot)) = float_sweep(&current.fvalues, &gv) else {
            stall += 1;
            continue;
        };
        let sideways = predicted == imbalance && rng.gen_bool(0.05);
        if predicted > imbalance || (predicted == imbalance && !sideways) {
            stall += 1;
            if stall >= params.stall_limit {
                let p = poly_from_coeffs(&monomials, &current.coeffs);
                if best_margins.as_ref().map_or(true, |(b, _)| imbalance < *b) {
                    best_margins = Some((imbalance, bisection_margins(sets, &p)));
                }
                if rng.gen_bool(0.5) && basis.len() >= 2 && basis.len() < dim {
                    // soft restart: keep pins, reshuffle within their
                    // complement
                    current = candidate_from(random_coeffs(rng, &basis));
                } else {
                    basis = identity_basis();
                    pinned = vec![false; npoints];
                    current = candidate_from(random_coeffs(rng, &basis));
                }
                imbalance = state.imbalance_of_values(&current.values);
                stall = 0;
            }
            continue;
        }
        // exact re-derivation of the chosen lambda
        let exact_dir_value = |j: usize| -> Rat {
            basis
                .iter()
                .zip(&weights)
                .filter(|(_, &w)| w != 0)
                .map(|(b, &w)| rat(w) * &b.values[j])
                .sum()
        };
        let exact_lambda_at = |j: usize| -> Option<Rat> {
            let g = exact_dir_value(j);
            if g.is_zero() {
                None
            } else {
                Some(-&current.values[j] / g)
            }
        };
        let lambda = match spot {
            SweepSpot::Crossing(j) => exact_lambda_at(j),
            SweepSpot::Between(l, r) => match (exact_lambda_at(l), exact_lambda_at(r)) {
                (Some(a), Some(b)) => Some((&a + &b) / rat(2)),
                _ => None,
            },
            SweepSpot::LeftOf(j) => exact_lambda_at(j).map(|a| a - rat(1)),
            SweepSpot::RightOf(j) => exact_lambda_at(j).map(|a| a + rat(1)),
        };
        let Some(lambda) = lambda else {
            stall += 1;
            continue;
        };
        let mut cand_coeffs = current.coeffs.clone();
        for (b, &w) in basis.iter().zip(&weights) {
            if w != 0 {
                let f = rat(w) * &lambda;
                for (c, bc) in cand_coeffs.iter_mut().zip(&b.coeffs) {
                    *c += &f * bc;
                }
            }
        }
        if cand_coeffs.iter().all(|c| c.is_zero()) {
            stall += 1;
            continue;
        }
        let cand = candidate_from(cand_coeffs);
        let cand_imbalance = state.imbalance_of_values(&cand.values);
        // commit only what the exact recount confirms
        if cand_imbalance > imbalance || (cand_imbalance == imbalance && !sideways) {
            stall += 1;
            continue;
        }
        if cand_imbalance < imbalance {
            stall = 0;
        } else {
            stall += 1;
        }
        current = cand;
        imbalance = cand_imbalance;
        // pin newly vanished points; rebuild the basis from the pin
        // lifts so basis entries stay minor-sized
        let new_pins: Vec<usize> = (0..npoints)
            .filter(|&j| !pinned[j] && current.values[j].is_zero())
            .collect();
        if !new_pins.is_empty() && imbalance > 0 {
            for &j in &new_pins {
                pinned[j] = true;
            }
            match basis_for_pins(&pinned)? {
                Some(b) => basis = b,
                None => {
                    // out of freedom: drop the pins but keep the candidate
                    basis = identity_basis();
                    pinned = vec![false; npoints];
                }
            }
        }
    }

    let p = poly_from_coeffs(&monomials, &current.coeffs).canonicalize();
    if imbalance == 0 && bisects(sets, &p) {
        return Ok(HeuristicOutcome::Cut(p));
    }
    let final_margins = bisection_margins(sets, &p);
    let best = match best_margins {
        Some((b, margins)) if b < imbalance => margins,
        _ => final_margins,
    };
    Ok(HeuristicOutcome::Failure(HeuristicFailure {
        best_margins: best,
        sweeps_used: sweeps,
    }))
}

fn owner_of(state: &SweepState, j: usize) -> usize {
    state.owner[j]
}

/// The iterated decomposition: cut polynomials, their product, and the
/// verified assignment of points to sign-vector cells.
#[derive(Clone, Debug)]
pub struct CellDecomposition {
    pub cut_polys: Vec<MultiPoly>,
    pub product: MultiPoly,
    /// sign vector (one '+'/'-' per step) -> indices into `points`
    pub cells: BTreeMap<String, Vec<usize>>,
    /// indices of points lying on some cut surface
    pub surface_points: Vec<usize>,
    pub points: Vec<P3>,
}

/// Error value of a failed build: the step that failed and the
/// decomposition of the completed steps.
#[derive(Debug)]
pub struct PartitionFailure {
    pub failed_step: usize,
    pub partial: CellDecomposition,
    pub failure: Option<HeuristicFailure>,
    pub message: String,
}

impl From<PartitionFailure> for Error {
    fn from(f: PartitionFailure) -> Error {
        Error::EngineFailure(format!("step {}: {}", f.failed_step, f.message))
    }
}

/// Smallest degree whose polynomial space can bisect `sets` sets:
/// min d with C(d+3,3) - 1 >= sets.
pub fn degree_for_sets(sets: usize) -> usize {
    let mut d = 1;
    while monomial_count(d) - 1 < sets {
        d += 1;
    }
    d
}

fn assemble(
    points: &[P3],
    cut_polys: Vec<MultiPoly>,
    cells: BTreeMap<String, Vec<usize>>,
    surface_points: Vec<usize>,
) -> CellDecomposition {
    let mut product = MultiPoly::constant(3, rat(1));
    for p in &cut_polys {
        product = product.mul(p);
    }
    CellDecomposition {
        cut_polys,
        product,
        cells,
        surface_points,
        points: points.to_vec(),
    }
}

/// Build the J-step decomposition. Step j bisects all current cells
/// simultaneously with one polynomial of the minimal feasible degree;
/// every step's bisection property and the final cell-size bound
/// |cell| <= 2^-J * S are verified exactly.
pub fn build_partition<R: Rng>(
    points: &[P3],
    j_steps: usize,
    engine: &Engine,
    rng: &mut R,
) -> Result<CellDecomposition, PartitionFailure> {
    assert!(j_steps >= 1, "J must be at least 1");
    let mut cells: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    cells.insert(String::new(), (0..points.len()).collect());
    let mut surface_points: Vec<usize> = Vec::new();
    let mut cut_polys: Vec<MultiPoly> = Vec::new();
    for j in 1..=j_steps {
        let d = degree_for_sets(1 << (j - 1));
        let keys: Vec<String> = cells.keys().cloned().collect();
        let sets: Vec<Vec<P3>> = keys
            .iter()
            .map(|k| cells[k].iter().map(|&i| points[i].clone()).collect())
            .collect();
        let nonempty: Vec<Vec<P3>> = sets.iter().filter(|s| !s.is_empty()).cloned().collect();
        let cut = match engine {
            Engine::Exact(budget) => bisect_exact(&nonempty, d, budget).map_err(|e| {
                PartitionFailure {
                    failed_step: j,
                    partial: assemble(points, cut_polys.clone(), cells.clone(), surface_points.clone()),
                    failure: None,
                    message: e.to_string(),
                }
            })?,
            Engine::Heuristic(params) => {
                match bisect_heuristic(&nonempty, d, params, rng) {
                    Ok(HeuristicOutcome::Cut(p)) => p,
                    Ok(HeuristicOutcome::Failure(f)) => {
                        return Err(PartitionFailure {
                            failed_step: j,
                            partial: assemble(
                                points,
                                cut_polys.clone(),
                                cells.clone(),
                                surface_points.clone(),
                            ),
                            failure: Some(f),
                            message: format!("heuristic engine gave up at step {j}"),
                        })
                    }
                    Err(e) => {
                        return Err(PartitionFailure {
                            failed_step: j,
                            partial: assemble(
                                points,
                                cut_polys.clone(),
                                cells.clone(),
                                surface_points.clone(),
                            ),
                            failure: None,
                            message: e.to_string(),
                        })
                    }
                }
            }
        };
        assert!(
            bisects(&nonempty, &cut),
            "engine returned an unverified cut"
        );
        assert!(cut.degree() <= d, "cut degree exceeds the step schedule");
        // split each cell by the sign of the new cut
        let mut next: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for key in keys {
            let members = cells.remove(&key).unwrap();
            let before = members.len();
            let mut plus = Vec::new();
            let mut minus = Vec::new();
            for idx in members {
                match sign(&cut.eval_p3(&points[idx])) {
                    1 => plus.push(idx),
                    -1 => minus.push(idx),
                    _ => surface_points.push(idx),
                }
            }
            // halving chain, exact
            assert!(plus.len() <= before / 2 && minus.len() <= before / 2);
            next.insert(format!("{key}+"), plus);
            next.insert(format!("{key}-"), minus);
        }
        cells = next;
        cut_polys.push(cut);
    }
    // final exact checks: partition property and the 2^-J bound
    let assigned: usize = cells.values().map(Vec::len).sum::<usize>() + surface_points.len();
    assert_eq!(assigned, points.len(), "cells and surface must partition the input");
    let total = points.len();
    for members in cells.values() {
        assert!(
            members.len() * (1 << j_steps) <= total,
            "cell size bound violated"
        );
    }
    surface_points.sort_unstable();
    let decomp = assemble(points, cut_polys, cells, surface_points);
    let expected_degree: usize = decomp.cut_polys.iter().map(MultiPoly::degree).sum();
    assert_eq!(decomp.product.degree(), expected_degree);
    Ok(decomp)
}

impl CellDecomposition {
    pub fn steps(&self) -> usize {
        self.cut_polys.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.cut_polys.iter().map(MultiPoly::degree).collect()
    }

    /// Histogram: cell size -> number of cells of that size.
    pub fn cell_size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for v in self.cells.values() {
            *h.entry(v.len()).or_insert(0) += 1;
        }
        h
    }
}

/// Outcome of the line-crossing count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellsMet {
    /// the line lies inside the zero set of the product
    ContainedInZ,
    /// number of distinct open cells the line passes through
    Count(usize),
}

/// Count the open cells met by a line: restrict the product to the line,
/// take one rational sample in each root-free component, and read off
/// the sign vectors. The count never exceeds deg(product) + 1.
pub fn cells_met_by_line(decomp: &CellDecomposition, line: &crate::lines::Line3) -> CellsMet {
    let restriction = decomp
        .product
        .restrict_to_line(line.base(), line.dir())
        .expect("line direction nonzero");
    if restriction.is_zero() {
        return CellsMet::ContainedInZ;
    }
    let samples = restriction
        .component_samples()
        .expect("restriction is nonzero");
    let mut visited = std::collections::BTreeSet::new();
    for t in &samples {
        let x = line.at(t);
        let key: String = decomp
            .cut_polys
            .iter()
            .map(|p| match sign(&p.eval_p3(&x)) {
                1 => '+',
                -1 => '-',
                _ => unreachable!("sample points avoid the zero set of the product"),
            })
            .collect();
        visited.insert(key);
    }
    let count = visited.len();
    assert!(
        count <= decomp.product.degree() + 1,
        "crossing bound violated: {count} cells, degree {}",
        decomp.product.degree()
    );
    CellsMet::Count(count)
}
