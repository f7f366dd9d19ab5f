//! Discrete probability algebra: product and sum rules, Bayesian updating,
//! Shannon and relative entropy, and a maximum-entropy solver for moment
//! constraints.
//!
//! All logarithms are natural. `0 · log 0` is taken as zero.

use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;

/// Tolerance on the total mass of a [`Distribution`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A finite probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl Distribution {
    /// Validating constructor: weights must be non-negative and sum to one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("distribution needs at least one outcome"));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::domain(format!("weight {i} is {w}, must be finite and >= 0")));
        }
        let total = pairwise_sum(&weights);
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Self {
            weights,
            labels: None,
        })
    }

    /// Normalizes arbitrary non-negative masses.
    pub fn from_masses(masses: &[f64]) -> Result<Self> {
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::domain("masses must be finite and non-negative"));
        }
        let total = pairwise_sum(masses);
        if total <= 0.0 {
            return Err(Error::domain("masses sum to zero"));
        }
        Ok(Self {
            weights: masses.iter().map(|m| m / total).collect(),
            labels: None,
        })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self {
            weights: vec![1.0 / n as f64; n],
            labels: None,
        }
    }

    pub fn delta(n: usize, at: usize) -> Self {
        assert!(at < n);
        let mut weights = vec![0.0; n];
        weights[at] = 1.0;
        Self {
            weights,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.weights.len() {
            return Err(Error::Shape(format!(
                "{} labels for {} outcomes",
                labels.len(),
                self.weights.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Expectation of a per-outcome feature.
    pub fn expectation(&self, feature: &[f64]) -> f64 {
        let terms: Vec<f64> = self.weights.iter().zip(feature).map(|(p, f)| p * f).collect();
        pairwise_sum(&terms)
    }
}

/// Likelihood table: `rows[j][i] = P(evidence j | hypothesis i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    rows: Vec<Vec<f64>>,
}

impl ConditionalTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if width == 0 {
            return Err(Error::domain("likelihood table is empty"));
        }
        for (j, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Shape(format!(
                    "likelihood row {j} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::domain(format!("likelihood entry {v} outside [0, 1]")));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn hypotheses(&self) -> usize {
        self.rows[0].len()
    }
}

/// One expectation constraint `Σ p_i f_i = target`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentConstraint {
    pub feature: Vec<f64>,
    pub target: f64,
}

impl MomentConstraint {
    pub fn new(feature: Vec<f64>, target: f64) -> Self {
        Self { feature, target }
    }
}

fn check_unit(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

/// `p(ab|c) = p(a|c) p(b|ac)`.
pub fn product_rule(p_a_given_c: f64, p_b_given_ac: f64) -> Result<f64> {
    check_unit("p(a|c)", p_a_given_c)?;
    check_unit("p(b|ac)", p_b_given_ac)?;
    Ok(p_a_given_c * p_b_given_ac)
}

/// `p(a + b) = p(a) + p(b) − p(ab)`.
pub fn sum_rule(p_a: f64, p_b: f64, p_ab: f64) -> Result<f64> {
    check_unit("p(a)", p_a)?;
    check_unit("p(b)", p_b)?;
    check_unit("p(ab)", p_ab)?;
    if p_ab > p_a.min(p_b) {
        return Err(Error::Inconsistent(format!(
            "p(ab) = {p_ab} exceeds min(p(a), p(b)) = {}",
            p_a.min(p_b)
        )));
    }
    let s = p_a + p_b - p_ab;
    if !(0.0..=1.0 + 1e-15).contains(&s) {
        return Err(Error::Inconsistent(format!("p(a or b) = {s} outside [0, 1]")));
    }
    Ok(s.min(1.0))
}

/// Scalar form of Bayes' theorem when the evidence marginal is known.
pub fn bayes_theorem(prior: f64, likelihood: f64, evidence: f64) -> Result<f64> {
    check_unit("prior", prior)?;
    check_unit("likelihood", likelihood)?;
    check_unit("evidence", evidence)?;
    if evidence == 0.0 {
        return Err(Error::UndefinedPosterior);
    }
    let post = prior * likelihood / evidence;
    if post > 1.0 + 1e-12 {
        return Err(Error::Inconsistent(format!("posterior {post} exceeds one")));
    }
    Ok(post)
}

fn check_table(prior: &Distribution, likelihood: &ConditionalTable, observed: usize) -> Result<()> {
    if likelihood.hypotheses() != prior.len() {
        return Err(Error::Shape(format!(
            "likelihood covers {} hypotheses, prior has {}",
            likelihood.hypotheses(),
            prior.len()
        )));
    }
    if observed >= likelihood.rows().len() {
        return Err(Error::domain(format!(
            "evidence index {observed} out of range ({} rows)",
            likelihood.rows().len()
        )));
    }
    Ok(())
}

/// Marginal probability of the observed evidence by total probability.
pub fn evidence_probability(
    prior: &Distribution,
    likelihood: &ConditionalTable,
    observed: usize,
) -> Result<f64> {
    check_table(prior, likelihood, observed)?;
    Ok(prior.expectation(&likelihood.rows()[observed]))
}

/// Posterior over hypotheses after observing evidence row `observed`.
pub fn bayes_update(
    prior: &Distribution,
    likelihood: &ConditionalTable,
    observed: usize,
) -> Result<Distribution> {
    check_table(prior, likelihood, observed)?;
    let row = &likelihood.rows()[observed];
    let joint: Vec<f64> = prior.weights().iter().zip(row).map(|(p, l)| p * l).collect();
    let marginal = pairwise_sum(&joint);
    if marginal <= 0.0 {
        return Err(Error::UndefinedPosterior);
    }
    let mut post = Distribution::from_masses(&joint)?;
    post.labels = prior.labels.clone();
    Ok(post)
}

/// `S[p] = −k Σ p_i log p_i`.
pub fn shannon_entropy(p: &Distribution, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::domain(format!("entropy constant k = {k} must be positive")));
    }
    let terms: Vec<f64> = p
        .weights()
        .iter()
        .map(|&w| if w > 0.0 { w * w.ln() } else { 0.0 })
        .collect();
    Ok(-k * pairwise_sum(&terms))
}

/// `K[p, q] = Σ p_i log(p_i / q_i)`.
pub fn relative_entropy(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!("{} vs {} outcomes", p.len(), q.len())));
    }
    let mut terms = Vec::with_capacity(p.len());
    for (i, (&pi, &qi)) in p.weights().iter().zip(q.weights()).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::domain(format!(
                    "outcome {i} has p = {pi} but q = 0 (support violation)"
                )));
            }
            terms.push(pi * (pi / qi).ln());
        }
    }
    Ok(pairwise_sum(&terms).max(0.0))
}

/// Solver settings for [`maxent_solve_with`].
#[derive(Debug, Clone, Copy)]
pub struct MaxEntOptions {
    pub max_iterations: usize,
    pub gradient_tol: f64,
}

impl Default for MaxEntOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-12,
        }
    }
}

/// Result of a MaxEnt update.
#[derive(Debug, Clone)]
pub struct MaxEntSolution {
    pub distribution: Distribution,
    /// Multipliers λ_k with `p_i ∝ q_i exp(−Σ_k λ_k f_{k,i})`.
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    /// Largest absolute moment mismatch at exit.
    pub residual: f64,
}

/// Maximizes `−K[p, q]` subject to the moment constraints.
pub fn maxent_solve(prior: &Distribution, constraints: &[MomentConstraint]) -> Result<Distribution> {
    maxent_solve_with(prior, constraints, MaxEntOptions::default()).map(|s| s.distribution)
}

struct Dual<'a> {
    prior: &'a Distribution,
    constraints: &'a [MomentConstraint],
}

impl Dual<'_> {
    /// Returns (dual objective, tilted distribution) at λ.
    fn evaluate(&self, lambda: &[f64]) -> (f64, Vec<f64>) {
        let q = self.prior.weights();
        let exponents: Vec<f64> = (0..q.len())
            .map(|i| {
                if q[i] > 0.0 {
                    q[i].ln()
                        - self
                            .constraints
                            .iter()
                            .zip(lambda)
                            .map(|(c, l)| l * c.feature[i])
                            .sum::<f64>()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let max = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let shifted: Vec<f64> = exponents.iter().map(|e| (e - max).exp()).collect();
        let z = pairwise_sum(&shifted);
        let log_z = max + z.ln();
        let p: Vec<f64> = shifted.iter().map(|s| s / z).collect();
        let linear: f64 = self
            .constraints
            .iter()
            .zip(lambda)
            .map(|(c, l)| l * c.target)
            .sum();
        (log_z + linear, p)
    }
}

fn moments(p: &[f64], constraints: &[MomentConstraint]) -> Vec<f64> {
    constraints
        .iter()
        .map(|c| pairwise_sum(&p.iter().zip(&c.feature).map(|(a, b)| a * b).collect::<Vec<_>>()))
        .collect()
}

/// Solves `a x = b` for a small dense system by Gaussian elimination with
/// partial pivoting. Returns `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-300_f64.max(scale * 1e-15) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (r, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *r -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Damped Newton iteration on the convex dual
/// `L(λ) = log Σ q_i exp(−λ·f_i) + λ·F`.
pub fn maxent_solve_with(
    prior: &Distribution,
    constraints: &[MomentConstraint],
    options: MaxEntOptions,
) -> Result<MaxEntSolution> {
    if constraints.is_empty() {
        return Ok(MaxEntSolution {
            distribution: prior.clone(),
            multipliers: Vec::new(),
            iterations: 0,
            residual: 0.0,
        });
    }
    for (k, c) in constraints.iter().enumerate() {
        if c.feature.len() != prior.len() {
            return Err(Error::Shape(format!(
                "constraint {k} has {} feature values for {} outcomes",
                c.feature.len(),
                prior.len()
            )));
        }
        let support = prior
            .weights()
            .iter()
            .zip(&c.feature)
            .filter(|(q, _)| **q > 0.0)
            .map(|(_, f)| *f);
        let (lo, hi) = support.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
            (lo.min(f), hi.max(f))
        });
        if !(c.target > lo && c.target < hi) {
            return Err(Error::Infeasible(format!(
                "constraint {k}: target {} not strictly inside feature range [{lo}, {hi}]",
                c.target
            )));
        }
    }

    let dual = Dual { prior, constraints };
    let dim = constraints.len();
    let mut lambda = vec![0.0; dim];
    let (mut objective, mut p) = dual.evaluate(&lambda);
    let mut residual = f64::INFINITY;

    for iteration in 0..=options.max_iterations {
        let m = moments(&p, constraints);
        let grad: Vec<f64> = constraints.iter().zip(&m).map(|(c, mk)| c.target - mk).collect();
        residual = grad.iter().fold(0.0, |acc: f64, g| acc.max(g.abs()));
        if residual <= options.gradient_tol {
            return Ok(MaxEntSolution {
                distribution: Distribution::from_masses(&p)?,
                multipliers: lambda,
                iterations: iteration,
                residual,
            });
        }
        if iteration == options.max_iterations {
            break;
        }
        // Hessian of the dual is the covariance of the features under p.
        let hess: Vec<Vec<f64>> = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| {
                        let terms: Vec<f64> = p
                            .iter()
                            .enumerate()
                            .map(|(i, pi)| {
                                pi * (constraints[a].feature[i] - m[a])
                                    * (constraints[b].feature[i] - m[b])
                            })
                            .collect();
                        pairwise_sum(&terms)
                    })
                    .collect()
            })
            .collect();
        let step = match solve_dense(hess, grad.iter().map(|g| -g).collect()) {
            Some(s) => s,
            None => break,
        };
        let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = lambda.iter().zip(&step).map(|(l, s)| l + t * s).collect();
            let (obj, trial_p) = dual.evaluate(&trial);
            if obj.is_finite() && obj <= objective + 1e-4 * t * slope + 1e-15 * objective.abs() {
                lambda = trial;
                objective = obj;
                p = trial_p;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // Line search stalls only at round-off level; take the full step
            // if it still reduces the moment mismatch.
            let trial: Vec<f64> = lambda.iter().zip(&step).map(|(l, s)| l + s).collect();
            let (obj, trial_p) = dual.evaluate(&trial);
            let trial_res = moments(&trial_p, constraints)
                .iter()
                .zip(constraints)
                .fold(0.0_f64, |acc, (mk, c)| acc.max((c.target - mk).abs()));
            if !(trial_res < residual) {
                break;
            }
            lambda = trial;
            objective = obj;
            p = trial_p;
        }
    }
    Err(Error::Convergence {
        iterations: options.max_iterations,
        residual,
    })
}

/// Joint table over (slit, detector bin): `joint[s][x] = p(slit s ∧ x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    rows: Vec<Vec<f64>>,
}

impl JointTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(Error::Shape("joint table must be a non-empty rectangle".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        if flat.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain("joint table entries must be non-negative"));
        }
        let total = pairwise_sum(&flat);
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("joint table sums to {total}, not 1")));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// `p(x | both open) = Σ_s p(s ∧ x)`: mutually exclusive paths add.
pub fn slit_decomposition_demo(joint: &JointTable) -> Vec<f64> {
    let width = joint.rows[0].len();
    (0..width)
        .map(|x| joint.rows.iter().map(|r| r[x]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn product_rule_cases() {
        assert_eq!(product_rule(1.0, 0.37).unwrap(), 0.37);
        assert_eq!(product_rule(0.0, 0.37).unwrap(), 0.0);
        assert!(close(product_rule(0.5, 0.4).unwrap(), 0.2, 1e-15));
        assert!(matches!(product_rule(1.2, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn sum_rule_cases() {
        assert!(close(sum_rule(0.3, 0.7, 0.0).unwrap(), 1.0, 1e-15));
        assert!(close(sum_rule(0.3, 0.3, 0.3).unwrap(), 0.3, 1e-15));
        assert!(close(sum_rule(0.5, 0.4, 0.1).unwrap(), 0.8, 1e-15));
        assert!(matches!(sum_rule(0.9, 0.9, 0.1), Err(Error::Inconsistent(_))));
        assert!(matches!(sum_rule(0.2, 0.3, 0.25), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn german_blue_eyes() {
        // Direct form with the quoted marginal.
        let p = bayes_theorem(0.0114, 0.53, 0.08).unwrap();
        assert!(close(p, 0.075, 1e-3), "{p}");
        // Table form: P(B|not G) chosen so that the marginal is 8%.
        let not_g = (0.08 - 0.0114 * 0.53) / (1.0 - 0.0114);
        let prior = Distribution::new(vec![0.0114, 1.0 - 0.0114]).unwrap();
        let table = ConditionalTable::new(vec![vec![0.53, not_g], vec![0.47, 1.0 - not_g]]).unwrap();
        assert!(close(evidence_probability(&prior, &table, 0).unwrap(), 0.08, 1e-15));
        let post = bayes_update(&prior, &table, 0).unwrap();
        assert!(close(post.weights()[0], p, 1e-14));
    }

    #[test]
    fn disease_test() {
        let prior = Distribution::new(vec![0.0005, 0.9995]).unwrap();
        let table = ConditionalTable::new(vec![vec![0.99, 0.01], vec![0.01, 0.99]]).unwrap();
        let marginal = evidence_probability(&prior, &table, 0).unwrap();
        assert!(close(marginal, 0.0105, 1e-4));
        let post = bayes_update(&prior, &table, 0).unwrap();
        assert!(close(post.weights()[0], 0.047, 5e-4), "{}", post.weights()[0]);
    }

    #[test]
    fn uninformative_evidence_leaves_prior() {
        let prior = Distribution::uniform(4);
        let table = ConditionalTable::new(vec![vec![0.3; 4], vec![0.7; 4]]).unwrap();
        let post = bayes_update(&prior, &table, 1).unwrap();
        for (a, b) in post.weights().iter().zip(prior.weights()) {
            assert!(close(*a, *b, 1e-15));
        }
    }

    #[test]
    fn certain_evidence_gives_delta() {
        let prior = Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
        let table = ConditionalTable::new(vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]]).unwrap();
        let post = bayes_update(&prior, &table, 0).unwrap();
        assert_eq!(post.weights(), Distribution::delta(3, 1).weights());
    }

    #[test]
    fn zero_evidence_is_rejected() {
        let prior = Distribution::new(vec![1.0, 0.0]).unwrap();
        let table = ConditionalTable::new(vec![vec![0.0, 1.0]]).unwrap();
        assert!(matches!(bayes_update(&prior, &table, 0), Err(Error::UndefinedPosterior)));
    }

    #[test]
    fn entropy_cases() {
        for n in 1..10 {
            let s = shannon_entropy(&Distribution::uniform(n), 1.0).unwrap();
            assert!(close(s, (n as f64).ln(), 1e-14));
        }
        assert_eq!(shannon_entropy(&Distribution::delta(5, 2), 1.0).unwrap(), 0.0);
        let s = shannon_entropy(&Distribution::new(vec![0.25, 0.75]).unwrap(), 1.0).unwrap();
        let oracle = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert!(close(s, oracle, 1e-15));
        assert!(close(s, 0.562_335_144_618_808_6, 1e-15));
        assert!(shannon_entropy(&Distribution::uniform(2), 0.0).is_err());
    }

    #[test]
    fn uniform_entropy_increases_with_n() {
        let mut prev = -1.0;
        for n in 1..50 {
            let s = shannon_entropy(&Distribution::uniform(n), 1.0).unwrap();
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn relative_entropy_cases() {
        let p = Distribution::new(vec![0.1, 0.6, 0.3]).unwrap();
        assert_eq!(relative_entropy(&p, &p).unwrap(), 0.0);
        let k = relative_entropy(&p, &Distribution::uniform(3)).unwrap();
        let s = shannon_entropy(&p, 1.0).unwrap();
        assert!(close(k, 3f64.ln() - s, 1e-14));
        let k = relative_entropy(&Distribution::delta(2, 0), &Distribution::uniform(2)).unwrap();
        assert!(close(k, 2f64.ln(), 1e-15));
        assert!(relative_entropy(&Distribution::uniform(2), &Distribution::delta(2, 0)).is_err());
    }

    #[test]
    fn maxent_trivial_cases() {
        let q = Distribution::uniform(6);
        assert_eq!(maxent_solve(&q, &[]).unwrap(), q);
        let faces: Vec<f64> = (1..=6).map(f64::from).collect();
        let p = maxent_solve(&q, &[MomentConstraint::new(faces, 3.5)]).unwrap();
        for w in p.weights() {
            assert!(close(*w, 1.0 / 6.0, 1e-12));
        }
    }

    /// Brute-force scan over λ ∈ [−5, 5] in steps of 1e−6.
    fn lambda_scan(target: f64) -> Vec<f64> {
        let gibbs = |l: f64| {
            let m: Vec<f64> = (1..=6).map(|f| (-l * f as f64).exp()).collect();
            let z: f64 = m.iter().sum();
            m.into_iter().map(|v| v / z).collect::<Vec<_>>()
        };
        let mean = |l: f64| {
            gibbs(l)
                .iter()
                .enumerate()
                .map(|(i, p)| p * (i + 1) as f64)
                .sum::<f64>()
        };
        let steps = 10_000_000;
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=steps {
            let l = -5.0 + 1e-6 * k as f64;
            let err = (mean(l) - target).abs();
            if err < best.0 {
                best = (err, l);
            }
        }
        gibbs(best.1)
    }

    #[test]
    fn maxent_matches_lambda_scan() {
        let q = Distribution::uniform(6);
        let faces: Vec<f64> = (1..=6).map(f64::from).collect();
        let sol = maxent_solve_with(&q, &[MomentConstraint::new(faces.clone(), 4.5)], Default::default())
            .unwrap();
        assert!(sol.residual <= 1e-10);
        assert!(close(sol.distribution.expectation(&faces), 4.5, 1e-10));
        let oracle = lambda_scan(4.5);
        for (a, b) in sol.distribution.weights().iter().zip(&oracle) {
            assert!(close(*a, *b, 1e-6), "{a} vs {b}");
        }
    }

    #[test]
    fn maxent_rejects_infeasible_targets() {
        let q = Distribution::uniform(6);
        let faces: Vec<f64> = (1..=6).map(f64::from).collect();
        assert!(matches!(
            maxent_solve(&q, &[MomentConstraint::new(faces.clone(), 6.0)]),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            maxent_solve(&q, &[MomentConstraint::new(faces, 0.5)]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn maxent_reports_non_convergence() {
        let q = Distribution::uniform(6);
        let faces: Vec<f64> = (1..=6).map(f64::from).collect();
        let opts = MaxEntOptions {
            max_iterations: 1,
            gradient_tol: 1e-12,
        };
        match maxent_solve_with(&q, &[MomentConstraint::new(faces, 5.9)], opts) {
            Err(Error::Convergence { residual, .. }) => assert!(residual > 0.0),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn maxent_two_constraints_beats_random_feasible_perturbations() {
        let q = Distribution::new(vec![0.05, 0.1, 0.2, 0.25, 0.15, 0.1, 0.1, 0.05]).unwrap();
        let f1: Vec<f64> = (0..8).map(f64::from).collect();
        let f2: Vec<f64> = (0..8).map(|i| ((i as f64) - 3.0).powi(2)).collect();
        let cons = vec![MomentConstraint::new(f1.clone(), 4.2), MomentConstraint::new(f2.clone(), 5.0)];
        let sol = maxent_solve_with(&q, &cons, Default::default()).unwrap();
        let p = sol.distribution.weights().to_vec();
        for c in &cons {
            assert!(close(sol.distribution.expectation(&c.feature), c.target, 1e-10));
        }
        let k_star = relative_entropy(&sol.distribution, &q).unwrap();

        // Basis of the null space of [1; f1; f2] by Gram-Schmidt projection.
        let rows = [vec![1.0; 8], f1, f2];
        let mut ortho: Vec<Vec<f64>> = Vec::new();
        for r in rows.iter() {
            let mut v = r.clone();
            for o in &ortho {
                let d: f64 = v.iter().zip(o).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(o).for_each(|(a, b)| *a -= d * b);
            }
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= n);
            ortho.push(v);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut accepted = 0;
        while accepted < 10_000 {
            let scale = 10f64.powf(rng.random_range(-4.0..-1.0));
            let mut d: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            for o in &ortho {
                let dot: f64 = d.iter().zip(o).map(|(a, b)| a * b).sum();
                d.iter_mut().zip(o).for_each(|(a, b)| *a -= dot * b);
            }
            let trial: Vec<f64> = p.iter().zip(&d).map(|(a, b)| a + scale * b).collect();
            if trial.iter().any(|v| *v < 0.0) {
                continue;
            }
            accepted += 1;
            let dist = Distribution::from_masses(&trial).unwrap();
            let k = relative_entropy(&dist, &q).unwrap();
            assert!(k - k_star >= -1e-9, "perturbation lowered K by {}", k_star - k);
        }
    }

    #[test]
    fn slit_totals() {
        let only_a = JointTable::new(vec![vec![0.25, 0.5, 0.25], vec![0.0; 3]]).unwrap();
        assert_eq!(slit_decomposition_demo(&only_a), vec![0.25, 0.5, 0.25]);
        let sym = JointTable::new(vec![vec![0.1, 0.2, 0.1, 0.1], vec![0.1, 0.1, 0.2, 0.1]]).unwrap();
        let t = slit_decomposition_demo(&sym);
        assert!(close(t[1], t[2], 1e-15) && close(t[0], t[3], 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let rows: Vec<Vec<f64>> = raw.chunks(8).map(|c| c.iter().map(|v| v / total).collect()).collect();
        let table = JointTable::new(rows.clone()).unwrap();
        let totals = slit_decomposition_demo(&table);
        for x in 0..8 {
            let mut by_enumeration = 0.0;
            for row in &rows {
                by_enumeration += row[x];
            }
            assert!(close(totals[x], by_enumeration, 1e-15));
        }
    }

    fn arb_distribution(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 2..max_n).prop_filter_map("zero mass", |v| {
            let s: f64 = v.iter().sum();
            (s > 1e-3).then(|| v.iter().map(|x| x / s).collect())
        })
    }

    proptest! {
        #[test]
        fn grouping_property(p in arb_distribution(12), cut in 1usize..11) {
            let dist = Distribution::from_masses(&p).unwrap();
            let cut = cut.min(p.len() - 1);
            let groups = [&dist.weights()[..cut], &dist.weights()[cut..]];
            let masses: Vec<f64> = groups.iter().map(|g| g.iter().sum()).collect();
            let mut rhs = shannon_entropy(&Distribution::from_masses(&masses).unwrap(), 1.0).unwrap();
            for (g, m) in groups.iter().zip(&masses) {
                if *m > 0.0 {
                    let inner = Distribution::from_masses(g).unwrap();
                    rhs += m * shannon_entropy(&inner, 1.0).unwrap();
                }
            }
            let lhs = shannon_entropy(&dist, 1.0).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn relative_entropy_is_nonnegative(p in arb_distribution(10), q in arb_distribution(10)) {
            let n = p.len().min(q.len());
            let p = Distribution::from_masses(&p[..n]).ok();
            let q = Distribution::from_masses(&q[..n]).ok();
            if let (Some(p), Some(q)) = (p, q) {
                if q.weights().iter().all(|w| *w > 0.0) {
                    let k = relative_entropy(&p, &q).unwrap();
                    prop_assert!(k >= 0.0);
                    prop_assert!(relative_entropy(&p, &p).unwrap().abs() < 1e-12);
                    if k < 1e-12 {
                        for (a, b) in p.weights().iter().zip(q.weights()) {
                            prop_assert!((a - b).abs() < 1e-5);
                        }
                    }
                }
            }
        }

        #[test]
        fn posterior_is_a_distribution(prior in arb_distribution(8), seed in 0u64..1000) {
            let n = prior.len();
            let prior = Distribution::from_masses(&prior).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let row: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let other: Vec<f64> = row.iter().map(|v| 1.0 - v).collect();
            let table = ConditionalTable::new(vec![row, other]).unwrap();
            let post = bayes_update(&prior, &table, 0).unwrap();
            prop_assert!(Distribution::new(post.weights().to_vec()).is_ok());
        }
    }
}
