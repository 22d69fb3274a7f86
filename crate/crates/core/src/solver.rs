//! Sentence selection by weighted concept coverage under a word budget.
//!
//! Selecting a sentence set S covers concept i by `z_i = min(1, sum_{j in S}
//! A_ij)`; the goal is maximizing `sum_i w_i * z_i` subject to `sum_{j in S}
//! l_j <= L`. With non-negative weights this is budgeted monotone submodular
//! maximization, which admits an exact branch-and-bound solver with a
//! fractional-greedy upper bound. A subset-enumeration solver serves as the
//! exactness oracle on small instances, and a greedy heuristic supplies the
//! initial incumbent.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Domain of the concept variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZMode {
    /// Concepts are covered or not; requires a 0/1 matrix.
    Binary,
    /// Concepts may be partially covered, saturating at 1.
    Continuous,
}

/// Maximum sentence count accepted by [`solve_brute_force`].
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Default node budget for [`solve_exact`].
pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

/// Objective gaps at or below this are treated as ties and resolved by the
/// (fewer words, lexicographically smaller index set) rule.
const TIE_EPS: f64 = 1e-12;

/// One selection instance: an N×M concept-sentence matrix restricted to the
/// target document's columns, concept weights, sentence word lengths, and
/// the summary word budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemRepr", into = "ProblemRepr")]
pub struct SelectionProblem {
    matrix: DMatrix<f64>,
    weights: Vec<f64>,
    lengths: Vec<usize>,
    word_budget: usize,
    z_mode: ZMode,
}

/// JSON shape for problem fixtures: the matrix as a list of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProblemRepr {
    matrix: Vec<Vec<f64>>,
    weights: Vec<f64>,
    lengths: Vec<usize>,
    word_budget: usize,
    z_mode: ZMode,
}

impl TryFrom<ProblemRepr> for SelectionProblem {
    type Error = Error;

    fn try_from(repr: ProblemRepr) -> Result<Self> {
        let n = repr.matrix.len();
        let m = repr.matrix.first().map_or(0, Vec::len);
        if repr.matrix.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidInput(
                "matrix rows have unequal lengths".into(),
            ));
        }
        let matrix = DMatrix::from_fn(n, m, |i, j| repr.matrix[i][j]);
        SelectionProblem::new(
            matrix,
            repr.weights,
            repr.lengths,
            repr.word_budget,
            repr.z_mode,
        )
    }
}

impl From<SelectionProblem> for ProblemRepr {
    fn from(problem: SelectionProblem) -> Self {
        let rows = (0..problem.matrix.nrows())
            .map(|i| problem.matrix.row(i).iter().copied().collect())
            .collect();
        ProblemRepr {
            matrix: rows,
            weights: problem.weights,
            lengths: problem.lengths,
            word_budget: problem.word_budget,
            z_mode: problem.z_mode,
        }
    }
}

impl SelectionProblem {
    pub fn new(
        matrix: DMatrix<f64>,
        weights: Vec<f64>,
        lengths: Vec<usize>,
        word_budget: usize,
        z_mode: ZMode,
    ) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::InvalidInput(
                "selection matrix must be non-empty".into(),
            ));
        }
        if weights.len() != matrix.nrows() {
            return Err(Error::InvalidInput(format!(
                "{} weights for {} concepts",
                weights.len(),
                matrix.nrows()
            )));
        }
        if lengths.len() != matrix.ncols() {
            return Err(Error::InvalidInput(format!(
                "{} lengths for {} sentences",
                lengths.len(),
                matrix.ncols()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput(
                "weights must be finite and >= 0".into(),
            ));
        }
        if lengths.contains(&0) {
            return Err(Error::InvalidInput("sentence lengths must be >= 1".into()));
        }
        if matrix.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput(
                "matrix values must lie in [0, 1]".into(),
            ));
        }
        if z_mode == ZMode::Binary && matrix.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidInput(
                "binary mode requires a 0/1 matrix".into(),
            ));
        }
        Ok(SelectionProblem {
            matrix,
            weights,
            lengths,
            word_budget,
            z_mode,
        })
    }

    pub fn n_concepts(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_sentences(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn word_budget(&self) -> usize {
        self.word_budget
    }

    pub fn z_mode(&self) -> ZMode {
        self.z_mode
    }
}

/// A selected sentence set with its concept coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// Selected sentence indices, ascending.
    pub selected: Vec<usize>,
    /// Per-concept coverage values; empty for methods without concepts.
    pub concept_values: Vec<f64>,
    pub objective_value: f64,
    pub total_words: usize,
    /// True iff produced by a solver with an optimality guarantee.
    pub exact: bool,
}

impl Summary {
    /// A summary selecting nothing (also used by non-concept methods).
    pub fn empty() -> Self {
        Summary {
            selected: Vec::new(),
            concept_values: Vec::new(),
            objective_value: 0.0,
            total_words: 0,
            exact: false,
        }
    }
}

/// Evaluate a fixed selection: per-concept coverage values and the weighted
/// objective. Errors when the selection busts the budget.
pub fn value_of_selection(
    problem: &SelectionProblem,
    selected: &[usize],
) -> Result<(f64, Vec<f64>)> {
    let mut indices = selected.to_vec();
    indices.sort_unstable();
    indices.dedup();
    for &j in &indices {
        if j >= problem.n_sentences() {
            return Err(Error::InvalidInput(format!(
                "sentence index {j} out of range for {} sentences",
                problem.n_sentences()
            )));
        }
    }
    let words: usize = indices.iter().map(|&j| problem.lengths[j]).sum();
    if words > problem.word_budget {
        return Err(Error::BudgetExceeded {
            used: words,
            budget: problem.word_budget,
        });
    }
    Ok(evaluate_sorted(problem, &indices))
}

/// Core evaluation on a deduplicated ascending index list. Summation runs in
/// concept-index order so identical selections give bit-identical objectives.
fn evaluate_sorted(problem: &SelectionProblem, indices: &[usize]) -> (f64, Vec<f64>) {
    let n = problem.n_concepts();
    let mut z = vec![0.0f64; n];
    match problem.z_mode {
        ZMode::Binary => {
            for (i, zi) in z.iter_mut().enumerate() {
                if indices.iter().any(|&j| problem.matrix[(i, j)] == 1.0) {
                    *zi = 1.0;
                }
            }
        }
        ZMode::Continuous => {
            for (i, zi) in z.iter_mut().enumerate() {
                let sum: f64 = indices.iter().map(|&j| problem.matrix[(i, j)]).sum();
                *zi = sum.min(1.0);
            }
        }
    }
    let objective = z.iter().zip(&problem.weights).map(|(zi, wi)| wi * zi).sum();
    (objective, z)
}

fn build_summary(problem: &SelectionProblem, mut indices: Vec<usize>, exact: bool) -> Summary {
    indices.sort_unstable();
    let (objective_value, concept_values) = evaluate_sorted(problem, &indices);
    let total_words = indices.iter().map(|&j| problem.lengths[j]).sum();
    Summary {
        selected: indices,
        concept_values,
        objective_value,
        total_words,
        exact,
    }
}

/// Candidate solution under the deterministic tie-break ordering.
#[derive(Debug, Clone)]
struct Candidate {
    objective: f64,
    words: usize,
    indices: Vec<usize>,
}

impl Candidate {
    fn from_indices(problem: &SelectionProblem, mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        let (objective, _) = evaluate_sorted(problem, &indices);
        let words = indices.iter().map(|&j| problem.lengths[j]).sum();
        Candidate {
            objective,
            words,
            indices,
        }
    }

    /// Higher objective wins; near-equal objectives fall back to fewer
    /// words, then the lexicographically smaller index set.
    fn better_than(&self, other: &Candidate) -> bool {
        if self.objective > other.objective + TIE_EPS {
            return true;
        }
        if other.objective > self.objective + TIE_EPS {
            return false;
        }
        if self.words != other.words {
            return self.words < other.words;
        }
        self.indices < other.indices
    }
}

/// Exhaustively enumerate all feasible subsets. Limited to
/// [`BRUTE_FORCE_LIMIT`] sentences.
pub fn solve_brute_force(problem: &SelectionProblem) -> Result<Summary> {
    let m = problem.n_sentences();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManySentences {
            m,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best = Candidate::from_indices(problem, Vec::new());
    for mask in 1u32..(1u32 << m) {
        let mut words = 0usize;
        let mut indices = Vec::new();
        for (j, &length) in problem.lengths.iter().enumerate() {
            if mask & (1 << j) != 0 {
                words += length;
                indices.push(j);
            }
        }
        if words > problem.word_budget {
            continue;
        }
        let candidate = Candidate::from_indices(problem, indices);
        if candidate.better_than(&best) {
            best = candidate;
        }
    }
    let mut summary = build_summary(problem, best.indices, true);
    summary.exact = true;
    Ok(summary)
}

/// Greedily add the sentence with the highest marginal gain per word among
/// those that fit the residual budget, until nothing fits.
pub fn solve_greedy(problem: &SelectionProblem) -> Summary {
    let m = problem.n_sentences();
    let mut coverage = vec![0.0f64; problem.n_concepts()];
    let mut selected = vec![false; m];
    let mut indices = Vec::new();
    let mut residual = problem.word_budget;
    loop {
        let mut best: Option<(f64, usize)> = None;
        for (j, taken) in selected.iter().enumerate().take(m) {
            if *taken || problem.lengths[j] > residual {
                continue;
            }
            let density = marginal_gain(problem, &coverage, j) / problem.lengths[j] as f64;
            let improves = match best {
                None => true,
                Some((best_density, _)) => density > best_density + TIE_EPS,
            };
            if improves {
                best = Some((density, j));
            }
        }
        match best {
            Some((_, j)) => {
                apply_column(problem, &mut coverage, j);
                selected[j] = true;
                indices.push(j);
                residual -= problem.lengths[j];
            }
            None => break,
        }
    }
    build_summary(problem, indices, false)
}

fn marginal_gain(problem: &SelectionProblem, coverage: &[f64], j: usize) -> f64 {
    let mut gain = 0.0;
    for (i, c) in coverage.iter().enumerate() {
        let before = c.min(1.0);
        let after = (c + problem.matrix[(i, j)]).min(1.0);
        gain += problem.weights[i] * (after - before);
    }
    gain
}

fn apply_column(problem: &SelectionProblem, coverage: &mut [f64], j: usize) {
    for (i, c) in coverage.iter_mut().enumerate() {
        *c += problem.matrix[(i, j)];
    }
}

fn remove_column(problem: &SelectionProblem, coverage: &mut [f64], j: usize) {
    for (i, c) in coverage.iter_mut().enumerate() {
        *c -= problem.matrix[(i, j)];
    }
}

struct BranchAndBound<'a> {
    problem: &'a SelectionProblem,
    /// Sentence indices in branch order (descending root density).
    order: Vec<usize>,
    coverage: Vec<f64>,
    path: Vec<usize>,
    words: usize,
    objective: f64,
    best: Candidate,
    nodes: u64,
    node_limit: u64,
    limit_hit: bool,
}

impl BranchAndBound<'_> {
    /// Admissible upper bound: current objective plus the fractional-greedy
    /// packing of remaining marginal gains into the residual budget.
    /// Submodularity makes each gain an upper bound on the item's future
    /// contribution, and the fractional relaxation dominates any integral
    /// completion.
    fn upper_bound(&self, pos: usize) -> f64 {
        let residual = self.problem.word_budget - self.words;
        let mut items: Vec<(f64, usize)> = Vec::new();
        for &j in &self.order[pos..] {
            let length = self.problem.lengths[j];
            if length > residual {
                continue;
            }
            let gain = marginal_gain(self.problem, &self.coverage, j);
            if gain > 0.0 {
                items.push((gain, length));
            }
        }
        items.sort_by(|a, b| {
            let da = a.0 / a.1 as f64;
            let db = b.0 / b.1 as f64;
            db.partial_cmp(&da).unwrap()
        });
        let mut bound = self.objective;
        let mut room = residual;
        for (gain, length) in items {
            if length <= room {
                bound += gain;
                room -= length;
            } else {
                bound += gain * room as f64 / length as f64;
                break;
            }
        }
        bound
    }

    fn consider_current(&mut self) {
        let candidate = Candidate::from_indices(self.problem, self.path.clone());
        if candidate.better_than(&self.best) {
            self.best = candidate;
        }
    }

    fn explore(&mut self, pos: usize) {
        if self.limit_hit {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.limit_hit = true;
            return;
        }
        if pos == self.order.len() {
            return;
        }
        if self.upper_bound(pos) < self.best.objective - TIE_EPS {
            return;
        }

        let j = self.order[pos];
        if self.problem.lengths[j] <= self.problem.word_budget - self.words {
            self.path.push(j);
            self.words += self.problem.lengths[j];
            apply_column(self.problem, &mut self.coverage, j);
            self.objective = coverage_objective(self.problem, &self.coverage);
            self.consider_current();
            self.explore(pos + 1);
            self.path.pop();
            self.words -= self.problem.lengths[j];
            remove_column(self.problem, &mut self.coverage, j);
            self.objective = coverage_objective(self.problem, &self.coverage);
        }
        self.explore(pos + 1);
    }
}

fn coverage_objective(problem: &SelectionProblem, coverage: &[f64]) -> f64 {
    coverage
        .iter()
        .zip(&problem.weights)
        .map(|(c, w)| w * c.min(1.0))
        .sum()
}

/// Exact solver: branch and bound over sentence inclusion with a greedy
/// incumbent. Returns `exact = false` only when the node limit is hit, in
/// which case the best solution found so far is returned.
pub fn solve_exact(problem: &SelectionProblem) -> Result<Summary> {
    solve_exact_with_limit(problem, DEFAULT_NODE_LIMIT)
}

pub fn solve_exact_with_limit(problem: &SelectionProblem, node_limit: u64) -> Result<Summary> {
    let m = problem.n_sentences();
    let mut order: Vec<usize> = (0..m).collect();
    let empty_coverage = vec![0.0f64; problem.n_concepts()];
    let mut densities: Vec<f64> = Vec::with_capacity(m);
    for j in 0..m {
        densities.push(marginal_gain(problem, &empty_coverage, j) / problem.lengths[j] as f64);
    }
    order.sort_by(|&a, &b| {
        densities[b]
            .partial_cmp(&densities[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let greedy = solve_greedy(problem);
    let greedy_candidate = Candidate::from_indices(problem, greedy.selected);
    let empty_candidate = Candidate::from_indices(problem, Vec::new());
    let best = if greedy_candidate.better_than(&empty_candidate) {
        greedy_candidate
    } else {
        empty_candidate
    };

    let mut search = BranchAndBound {
        problem,
        order,
        coverage: empty_coverage,
        path: Vec::new(),
        words: 0,
        objective: 0.0,
        best,
        nodes: 0,
        node_limit,
        limit_hit: false,
    };
    search.explore(0);

    let exact = !search.limit_hit;
    let summary = build_summary(problem, search.best.indices.clone(), exact);
    Ok(summary)
}
