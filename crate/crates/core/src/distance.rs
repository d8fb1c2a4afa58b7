//! The quantum indel distance and the code-capability verdicts built on it.
//!
//! `d(ρ₁, ρ₂)` is the least `s + t` with `D^s(ρ₁) ∩ D^t(ρ₂) ≠ ∅`. Because
//! `n − s = m − t` is forced, each total `k` fixes a single `(s, t)` and the
//! search is a walk along one line.

use serde::Serialize;

use crate::channels::{deletion_sphere, IndexSet, SphereSet};
use crate::error::{Error, Result};
use crate::feasibility::{member_del_ins, FeasibilityOptions, FeasibilityStatus, PairOutcome};
use crate::linalg::Tolerance;
use crate::state::{DensityMatrix, QuditShape};

/// Minimum `s + t` together with a pair of deletions realizing it.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceResult {
    pub value: usize,
    pub s: usize,
    pub t: usize,
    /// Deleted positions of the first state.
    pub p: IndexSet,
    /// Deleted positions of the second state.
    pub q: IndexSet,
    /// `D_P(ρ₁)`, equal to `D_Q(ρ₂)` within tolerance.
    pub common: DensityMatrix,
}

impl DistanceResult {
    /// Re-checks `D_P(ρ₁) ≈ D_Q(ρ₂)`.
    pub fn verify(&self, a: &DensityMatrix, b: &DensityMatrix, tol: &Tolerance) -> Result<bool> {
        let left = crate::channels::delete(a, &self.p)?;
        let right = crate::channels::delete(b, &self.q)?;
        Ok(left.approx_eq(&right, tol) && left.approx_eq(&self.common, tol))
    }
}

/// All deletion spheres `D^0(ρ), ..., D^n(ρ)` of one state, computed once.
#[derive(Debug, Clone)]
pub struct SphereCache {
    state: DensityMatrix,
    spheres: Vec<SphereSet>,
}

impl SphereCache {
    pub fn new(state: &DensityMatrix, tol: &Tolerance) -> Result<Self> {
        let spheres = (0..=state.length())
            .map(|s| deletion_sphere(state, s, tol))
            .collect::<Result<_>>()?;
        Ok(SphereCache {
            state: state.clone(),
            spheres,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn sphere(&self, s: usize) -> &SphereSet {
        &self.spheres[s]
    }
}

/// Distance between two cached states.
pub fn cached_distance(a: &SphereCache, b: &SphereCache, tol: &Tolerance) -> Result<DistanceResult> {
    let (x, y) = (a.state(), b.state());
    if x.level() != y.level() {
        return Err(Error::LevelMismatch {
            left: x.level(),
            right: y.level(),
        });
    }
    let (n, m) = (x.length(), y.length());
    // s - t = n - m, s <= n, t <= m; k = s + t runs over |n - m|, |n - m| + 2, ...
    let mut k = n.abs_diff(m);
    while k <= n + m {
        // k >= m - n keeps this nonnegative; k ≡ n - m (mod 2) makes it exact.
        let s = (k + n - m) / 2;
        let t = k - s;
        if let Some((pa, pb)) = a.sphere(s).intersection(b.sphere(t), tol) {
            let result = DistanceResult {
                value: k,
                s,
                t,
                p: pa.index_set.clone(),
                q: pb.index_set.clone(),
                common: pa.state.clone(),
            };
            assert!(n != m || result.value.is_multiple_of(2), "equal-length distance must be even");
            return Ok(result);
        }
        k += 2;
    }
    // Full deletion of both sides always meets at the trivial state.
    unreachable!("deleting every qudit of both states yields a common state")
}

/// Quantum indel distance with a witness.
pub fn indel_distance(a: &DensityMatrix, b: &DensityMatrix, tol: &Tolerance) -> Result<DistanceResult> {
    if a.level() != b.level() {
        return Err(Error::LevelMismatch {
            left: a.level(),
            right: b.level(),
        });
    }
    cached_distance(&SphereCache::new(a, tol)?, &SphereCache::new(b, tol)?, tol)
}

/// Finite set of codewords of a common shape, pairwise distinct within
/// tolerance.
#[derive(Debug, Clone)]
pub struct CodeSample {
    states: Vec<DensityMatrix>,
    labels: Vec<String>,
    dropped: usize,
}

impl CodeSample {
    /// Builds a sample, keeping the first of any states equal within
    /// `eq_tol`. Labels default to the index when fewer are given.
    pub fn new(states: Vec<DensityMatrix>, labels: Vec<String>, tol: &Tolerance) -> Result<Self> {
        let shape: Option<QuditShape> = states.first().map(DensityMatrix::shape);
        let mut kept: Vec<DensityMatrix> = Vec::with_capacity(states.len());
        let mut kept_labels = Vec::with_capacity(states.len());
        let mut dropped = 0;
        for (i, state) in states.into_iter().enumerate() {
            let shape = shape.expect("non-empty");
            if state.level() != shape.level() {
                return Err(Error::LevelMismatch {
                    left: shape.level(),
                    right: state.level(),
                });
            }
            if state.length() != shape.length() {
                return Err(Error::ShapeMismatch {
                    expected: format!("{} qudits", shape.length()),
                    actual: format!("{} qudits", state.length()),
                });
            }
            if kept.iter().any(|k| k.approx_eq(&state, tol)) {
                dropped += 1;
                continue;
            }
            kept_labels.push(labels.get(i).cloned().unwrap_or_else(|| format!("#{i}")));
            kept.push(state);
        }
        Ok(CodeSample {
            states: kept,
            labels: kept_labels,
            dropped,
        })
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of inputs discarded as duplicates.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    fn require_pair(&self) -> Result<()> {
        if self.states.len() < 2 {
            return Err(Error::TooFewStates(self.states.len()));
        }
        Ok(())
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.states.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }
}

/// A pair of codewords and the distance between them.
#[derive(Debug, Clone, Serialize)]
pub struct PairDistance {
    pub first: String,
    pub second: String,
    pub indices: (usize, usize),
    pub distance: DistanceResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinDistance {
    pub value: usize,
    /// First pair (in index order) achieving the minimum.
    pub argmin: PairDistance,
    pub pairs_checked: usize,
}

/// Minimum pairwise indel distance; ties go to the earliest pair.
pub fn min_distance(code: &CodeSample, tol: &Tolerance) -> Result<MinDistance> {
    code.require_pair()?;
    let caches: Vec<SphereCache> = code
        .states()
        .iter()
        .map(|s| SphereCache::new(s, tol))
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, usize, DistanceResult)> = None;
    let mut pairs_checked = 0;
    for (i, j) in code.pairs() {
        let d = cached_distance(&caches[i], &caches[j], tol)?;
        pairs_checked += 1;
        if best.as_ref().is_none_or(|(_, _, b)| d.value < b.value) {
            best = Some((i, j, d));
        }
    }
    let (i, j, distance) = best.expect("at least one pair");
    Ok(MinDistance {
        value: distance.value,
        argmin: PairDistance {
            first: code.labels()[i].clone(),
            second: code.labels()[j].clone(),
            indices: (i, j),
            distance,
        },
        pairs_checked,
    })
}

/// Closest approach between `D^s` spheres of distinct codewords.
#[derive(Debug, Clone, Serialize)]
pub struct SphereSeparation {
    pub s: usize,
    pub distance: f64,
    pub indices: (usize, usize),
}

pub fn sphere_separation(code: &CodeSample, s: usize, tol: &Tolerance) -> Result<SphereSeparation> {
    code.require_pair()?;
    let spheres: Vec<SphereSet> = code
        .states()
        .iter()
        .map(|st| deletion_sphere(st, s, tol))
        .collect::<Result<_>>()?;
    let mut best = SphereSeparation {
        s,
        distance: f64::INFINITY,
        indices: (0, 1),
    };
    for (i, j) in code.pairs() {
        if let Some((_, _, d)) = spheres[i].closest_pair(&spheres[j]) {
            if d < best.distance {
                best.distance = d;
                best.indices = (i, j);
            }
        }
    }
    Ok(best)
}

/// `true` iff the `D^t` spheres of all distinct codewords are disjoint.
pub fn spheres_disjoint(code: &CodeSample, t: usize, tol: &Tolerance) -> Result<bool> {
    let spheres: Vec<SphereSet> = code
        .states()
        .iter()
        .map(|st| deletion_sphere(st, t, tol))
        .collect::<Result<_>>()?;
    Ok(code.pairs().all(|(i, j)| !spheres[i].intersects(&spheres[j], tol)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "t")]
pub enum ErrorSpec {
    /// Exactly `t` deletions.
    Deletions(usize),
    /// Any mix of deletions and insertions totalling `t`.
    TotalIndel(usize),
}

impl ErrorSpec {
    pub fn t(&self) -> usize {
        match *self {
            ErrorSpec::Deletions(t) | ErrorSpec::TotalIndel(t) => t,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrectionVerdict {
    pub errors: ErrorSpec,
    pub verdict: Verdict,
    pub min_distance: usize,
    /// `2t + 1`.
    pub required: usize,
    /// Closest pair and its deletion witness.
    pub evidence: PairDistance,
}

/// Whether `code` corrects `errors`.
///
/// For `t` deletions this is `d_min ≥ 2t + 1`. The same bound is sufficient
/// for any mix of `t` insertions and deletions; it is also necessary, since
/// pure deletions are one such mix and intersecting `D^t` spheres already
/// defeat correction.
pub fn corrects(code: &CodeSample, errors: ErrorSpec, tol: &Tolerance) -> Result<CorrectionVerdict> {
    let t = errors.t();
    if t == 0 {
        return Err(Error::CountOutOfRange { count: 0, max: usize::MAX });
    }
    let md = min_distance(code, tol)?;
    let required = 2 * t + 1;
    Ok(CorrectionVerdict {
        errors,
        verdict: Verdict::from_bool(md.value >= required),
        min_distance: md.value,
        required,
        evidence: md.argmin,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InsertionPair {
    pub first: String,
    pub second: String,
    pub indices: (usize, usize),
    pub status: FeasibilityStatus,
    /// Smallest gap estimate over the `(P, Q)` pairs tried.
    pub min_gap: f64,
    /// The Feasible (or first Inconclusive) `(P, Q)` outcome, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<PairOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InsertionVerdict {
    pub t: usize,
    pub verdict: Verdict,
    pub pairs: Vec<InsertionPair>,
}

impl InsertionVerdict {
    /// First pair responsible for a non-true verdict.
    pub fn offending(&self) -> Option<&InsertionPair> {
        self.pairs.iter().find(|p| p.status == FeasibilityStatus::Feasible).or_else(|| {
            self.pairs
                .iter()
                .find(|p| p.status == FeasibilityStatus::Inconclusive)
        })
    }
}

/// Whether the `I^t` spheres of all codeword pairs are disjoint.
///
/// `I^t(ρ₁) ∩ I^t(ρ₂) ≠ ∅` iff `ρ₁ ∈ D^t ∘ I^t(ρ₂)`, decided per pair by the
/// feasibility solver. Any Feasible pair gives `False`; otherwise any
/// Inconclusive pair gives `Unknown`.
pub fn corrects_insertions(
    code: &CodeSample,
    t: usize,
    opts: &FeasibilityOptions,
    tol: &Tolerance,
) -> Result<InsertionVerdict> {
    if t == 0 {
        return Err(Error::CountOutOfRange { count: 0, max: usize::MAX });
    }
    code.require_pair()?;
    let mut pairs = Vec::new();
    for (i, j) in code.pairs() {
        let report = member_del_ins(&code.states()[i], &code.states()[j], t, t, opts, tol)?;
        let evidence = report
            .feasible_pair()
            .or_else(|| {
                report
                    .pairs
                    .iter()
                    .find(|o| o.report.status == FeasibilityStatus::Inconclusive)
            })
            .cloned();
        pairs.push(InsertionPair {
            first: code.labels()[i].clone(),
            second: code.labels()[j].clone(),
            indices: (i, j),
            status: report.status,
            min_gap: report.min_gap(),
            evidence,
        });
    }
    let verdict = if pairs.iter().any(|p| p.status == FeasibilityStatus::Feasible) {
        Verdict::False
    } else if pairs.iter().any(|p| p.status == FeasibilityStatus::Inconclusive) {
        Verdict::Unknown
    } else {
        Verdict::True
    };
    Ok(InsertionVerdict { t, verdict, pairs })
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricViolation {
    pub triple: usize,
    pub axiom: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub triples: usize,
    pub distances_computed: usize,
    /// Every equal-length distance came out even.
    pub all_even: bool,
    pub violations: Vec<MetricViolation>,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.all_even && self.violations.is_empty()
    }
}

/// Checks identity of indiscernibles, symmetry and the triangle inequality on
/// each triple.
pub fn metric_check(triples: &[[DensityMatrix; 3]], tol: &Tolerance) -> Result<MetricReport> {
    let mut violations = Vec::new();
    let mut distances_computed = 0;
    let mut all_even = true;
    for (k, triple) in triples.iter().enumerate() {
        let caches: Vec<SphereCache> = triple
            .iter()
            .map(|s| SphereCache::new(s, tol))
            .collect::<Result<_>>()?;
        let mut d = [[0usize; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let r = cached_distance(&caches[i], &caches[j], tol)?;
                distances_computed += 1;
                if triple[i].length() == triple[j].length() && r.value % 2 != 0 {
                    all_even = false;
                }
                d[i][j] = r.value;
            }
        }
        let mut fail = |axiom: &str, detail: String| {
            violations.push(MetricViolation {
                triple: k,
                axiom: axiom.to_string(),
                detail,
            })
        };
        for i in 0..3 {
            for j in 0..3 {
                let same = triple[i].approx_eq(&triple[j], tol);
                if (d[i][j] == 0) != same {
                    fail("identity", format!("d({i},{j}) = {} but equal = {same}", d[i][j]));
                }
                if d[i][j] != d[j][i] {
                    fail("symmetry", format!("d({i},{j}) = {} != d({j},{i}) = {}", d[i][j], d[j][i]));
                }
                for m in 0..3 {
                    if d[i][m] > d[i][j] + d[j][m] {
                        fail(
                            "triangle",
                            format!("d({i},{m}) = {} > d({i},{j}) + d({j},{m}) = {}", d[i][m], d[i][j] + d[j][m]),
                        );
                    }
                }
            }
        }
    }
    Ok(MetricReport {
        triples: triples.len(),
        distances_computed,
        all_even,
        violations,
    })
}
