//! Evidential-reasoning fusion of several node rankings.
//!
//! Each criterion's ranking is encoded as a belief distribution over a frame
//! of ordinal grades (one grade per rank position): the node's own rank
//! receives belief `β` and the remaining `1 - β` is left unassigned. The
//! distributions of all criteria are merged with the recursive
//! evidential-reasoning rule, and the merged assessment is collapsed to a
//! utility interval whose midpoint orders the nodes.

use serde::Serialize;

use crate::centrality::{Criterion, NodeScoreVector};
use crate::{Error, Result};

/// Tolerance for belief sums slightly above one from rounding.
const MASS_TOLERANCE: f64 = 1e-12;

/// Ordered evaluation grades `S_1..S_N`; `S_1` is the best.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GradeFrame {
    grade_count: usize,
}

impl GradeFrame {
    pub fn new(grade_count: usize) -> Result<Self> {
        if grade_count < 2 {
            return Err(Error::Domain(format!(
                "a grade frame needs at least 2 grades, got {grade_count}"
            )));
        }
        Ok(Self { grade_count })
    }

    pub fn grade_count(&self) -> usize {
        self.grade_count
    }

    /// `u(S_n) = (N - n) / N` for the 1-based grade `n`.
    pub fn utility(&self, grade: usize) -> f64 {
        (self.grade_count - grade) as f64 / self.grade_count as f64
    }
}

/// Degrees of belief over the grades of a frame. Whatever is not assigned
/// to a grade is uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefDistribution {
    beliefs: Vec<f64>,
}

impl BeliefDistribution {
    pub fn new(beliefs: Vec<f64>) -> Result<Self> {
        if beliefs.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(Error::Domain("degrees of belief must be non-negative".into()));
        }
        let total: f64 = beliefs.iter().sum();
        if total > 1.0 + MASS_TOLERANCE {
            return Err(Error::Domain(format!(
                "degrees of belief sum to {total}, more than 1"
            )));
        }
        Ok(Self { beliefs })
    }

    pub fn beliefs(&self) -> &[f64] {
        &self.beliefs
    }

    pub fn grade_count(&self) -> usize {
        self.beliefs.len()
    }

    pub fn uncertainty(&self) -> f64 {
        (1.0 - self.beliefs.iter().sum::<f64>()).max(0.0)
    }
}

/// Positive attribute weights, normalised to sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeWeights {
    weights: Vec<f64>,
}

impl AttributeWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("at least one attribute weight is required".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Domain("attribute weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        Ok(Self {
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn equal(count: usize) -> Result<Self> {
        Self::new(vec![1.0; count])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Result of combining all attributes: a belief per grade plus the
/// remaining uncertainty `δ_S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedAssessment {
    pub combined_beliefs: Vec<f64>,
    pub residual_uncertainty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UtilityTriple {
    pub u_min: f64,
    pub u_max: f64,
    pub u_avg: f64,
}

/// Quasi-one-hot encoding: the grade equal to the node's rank receives
/// `belief_level`, all other grades zero.
pub fn encode_ranking(
    ranks: &[usize],
    frame: GradeFrame,
    belief_level: f64,
) -> Result<Vec<BeliefDistribution>> {
    check_belief_level(belief_level)?;
    let n = frame.grade_count();
    ranks
        .iter()
        .map(|&rank| {
            if rank == 0 || rank > n {
                return Err(Error::Domain(format!("rank {rank} outside 1..={n}")));
            }
            let mut beliefs = vec![0.0; n];
            beliefs[rank - 1] = belief_level;
            Ok(BeliefDistribution { beliefs })
        })
        .collect()
}

pub(crate) fn check_belief_level(belief_level: f64) -> Result<()> {
    if belief_level > 0.0 && belief_level <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "belief level must lie in (0, 1], got {belief_level}"
        )))
    }
}

/// Probability masses of a partially combined set of attributes.
#[derive(Debug, Clone)]
struct Masses {
    grades: Vec<f64>,
    /// Uncertainty caused by the attribute weights (`ē_S`).
    weight_residual: f64,
    /// Uncertainty caused by incomplete assessments (`ẽ_S`).
    incompleteness: f64,
}

impl Masses {
    fn of(dist: &BeliefDistribution, weight: f64) -> Self {
        Self {
            grades: dist.beliefs.iter().map(|b| weight * b).collect(),
            weight_residual: 1.0 - weight,
            incompleteness: weight * dist.uncertainty(),
        }
    }

    fn unassigned(&self) -> f64 {
        self.weight_residual + self.incompleteness
    }

    /// One step of the recursive combination.
    fn combine(&self, next: &Masses) -> Result<Masses> {
        let total_self: f64 = self.grades.iter().sum();
        let total_next: f64 = next.grades.iter().sum();
        let agreeing: f64 = self.grades.iter().zip(&next.grades).map(|(a, b)| a * b).sum();
        // Σ_t Σ_{k≠t} e_t e_k
        let conflict = total_self * total_next - agreeing;
        let denom = 1.0 - conflict;
        if denom <= f64::EPSILON {
            return Err(Error::Conflict);
        }
        let k = 1.0 / denom;
        let (h_self, h_next) = (self.unassigned(), next.unassigned());
        let grades = self
            .grades
            .iter()
            .zip(&next.grades)
            .map(|(a, b)| k * (a * b + h_self * b + a * h_next))
            .collect();
        let incompleteness = k
            * (self.incompleteness * next.incompleteness
                + self.weight_residual * next.incompleteness
                + self.incompleteness * next.weight_residual);
        let weight_residual = k * self.weight_residual * next.weight_residual;
        Ok(Masses {
            grades,
            weight_residual,
            incompleteness,
        })
    }
}

/// Recursive evidential-reasoning combination of one distribution per
/// attribute.
pub fn combine_evidence(
    distributions: &[BeliefDistribution],
    weights: &AttributeWeights,
) -> Result<CombinedAssessment> {
    combine_raw(distributions, weights.as_slice())
}

fn combine_raw(distributions: &[BeliefDistribution], weights: &[f64]) -> Result<CombinedAssessment> {
    let first = distributions
        .first()
        .ok_or_else(|| Error::Domain("no distributions to combine".into()))?;
    if distributions.len() != weights.len() {
        return Err(Error::Domain(format!(
            "{} distributions but {} weights",
            distributions.len(),
            weights.len()
        )));
    }
    let n = first.grade_count();
    if distributions.iter().any(|d| d.grade_count() != n) {
        return Err(Error::Domain("distributions use different grade frames".into()));
    }
    let mut acc = Masses::of(first, weights[0]);
    for (dist, &w) in distributions.iter().zip(weights).skip(1) {
        acc = acc.combine(&Masses::of(dist, w))?;
    }
    let norm = 1.0 - acc.weight_residual;
    if norm <= f64::EPSILON {
        return Err(Error::Conflict);
    }
    Ok(CombinedAssessment {
        combined_beliefs: acc.grades.iter().map(|m| m / norm).collect(),
        residual_uncertainty: acc.incompleteness / norm,
    })
}

/// Utility interval obtained by giving the residual uncertainty to the
/// worst grade (`u_min`) or the best grade (`u_max`).
pub fn evaluate_utility(assessment: &CombinedAssessment) -> UtilityTriple {
    let n = assessment.combined_beliefs.len();
    let u = |grade: usize| (n - grade) as f64 / n as f64;
    let expected: f64 = assessment
        .combined_beliefs
        .iter()
        .enumerate()
        .map(|(i, b)| b * u(i + 1))
        .sum();
    let u_min = expected + assessment.residual_uncertainty * u(n);
    let u_max = expected + assessment.residual_uncertainty * u(1);
    UtilityTriple {
        u_min,
        u_max,
        u_avg: (u_min + u_max) / 2.0,
    }
}

/// Comprehensive ranking with the per-node fusion detail.
#[derive(Debug, Clone, Serialize)]
pub struct ComprehensiveRanking {
    pub ranking: NodeScoreVector,
    pub assessments: Vec<CombinedAssessment>,
    pub utilities: Vec<UtilityTriple>,
}

/// Encodes each criterion's ranks, fuses them per node, and ranks nodes by
/// average utility.
pub fn comprehensive_rank(
    score_vectors: &[NodeScoreVector],
    weights: &AttributeWeights,
    belief_level: f64,
) -> Result<ComprehensiveRanking> {
    let first = score_vectors
        .first()
        .ok_or_else(|| Error::Domain("no criteria to fuse".into()))?;
    if score_vectors.iter().any(|v| v.ids != first.ids) {
        return Err(Error::Domain("criteria are defined over different node sets".into()));
    }
    if weights.len() != score_vectors.len() {
        return Err(Error::Domain(format!(
            "{} criteria but {} weights",
            score_vectors.len(),
            weights.len()
        )));
    }
    let frame = GradeFrame::new(first.len())?;
    let encoded = score_vectors
        .iter()
        .map(|v| encode_ranking(&v.ranks, frame, belief_level))
        .collect::<Result<Vec<_>>>()?;

    let mut assessments = Vec::with_capacity(first.len());
    let mut utilities = Vec::with_capacity(first.len());
    for node in 0..first.len() {
        let per_attribute: Vec<BeliefDistribution> =
            encoded.iter().map(|e| e[node].clone()).collect();
        let combined = combine_evidence(&per_attribute, weights)?;
        utilities.push(evaluate_utility(&combined));
        assessments.push(combined);
    }
    let ranking = NodeScoreVector::from_scores(
        Criterion::Comprehensive,
        first.ids.clone(),
        utilities.iter().map(|u| u.u_avg).collect(),
    );
    Ok(ComprehensiveRanking {
        ranking,
        assessments,
        utilities,
    })
}
