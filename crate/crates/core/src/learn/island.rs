use crate::error::{Error, Result};

/// One parameter set estimated from weighted soft observations under a Dirichlet prior.
///
/// Observations whose λ vector is constant are interchangeable with neutral evidence:
/// they contribute `log Σθ = 0` to the objective. Their total weight is kept separately
/// in `neutral`, where it only enters the update denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct Island {
    pub psi: Vec<f64>,
    /// `(weight, λ)` pairs.
    pub observations: Vec<(f64, Vec<f64>)>,
    pub neutral: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IslandSolution {
    pub theta: Vec<f64>,
    pub iterations: usize,
    /// False when the iteration cap was hit before the tolerance was met.
    pub converged: bool,
}

impl Island {
    /// An island over `n` examples, of which `lambdas` are the first; the rest are neutral.
    pub fn new(psi: &[f64], lambdas: &[Vec<f64>], n: usize) -> Result<Self> {
        if n < lambdas.len() {
            return Err(Error::InvalidConfig(format!(
                "island has {} observations but n = {n}",
                lambdas.len()
            )));
        }
        if let Some(l) = lambdas.iter().find(|l| l.len() != psi.len()) {
            return Err(Error::InvalidConfig(format!(
                "λ vector of length {} for a parameter set of size {}",
                l.len(),
                psi.len()
            )));
        }
        Ok(Island {
            psi: psi.to_vec(),
            observations: lambdas.iter().map(|l| (1.0, l.clone())).collect(),
            neutral: (n - lambdas.len()) as f64,
        })
    }

    pub fn cardinality(&self) -> usize {
        self.psi.len()
    }

    /// Total example weight N.
    pub fn total(&self) -> f64 {
        self.neutral + self.observations.iter().map(|(w, _)| w).sum::<f64>()
    }

    /// Σ_x (ψ_x − 1) log θ_x + Σ_i w_i log Σ_x λ^i_x θ_x, up to a constant.
    pub fn log_objective(&self, theta: &[f64]) -> f64 {
        let prior: f64 = self
            .psi
            .iter()
            .zip(theta)
            .filter(|(&p, _)| p != 1.0)
            .map(|(&p, &t)| (p - 1.0) * t.ln())
            .sum();
        let data: f64 = self.observations.iter().map(|(w, l)| w * dot(l, theta).ln()).sum();
        prior + data
    }

    /// One synchronous fixed-point update of θ.
    pub fn local_update(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let mut next: Vec<f64> = self
            .psi
            .iter()
            .zip(theta)
            .map(|(&p, &t)| p - 1.0 + self.neutral * t)
            .collect();
        for (w, l) in &self.observations {
            let mix = dot(l, theta);
            if !(mix > 0.0) {
                return Err(Error::ZeroIslandMixture);
            }
            let scale = w / mix;
            for ((n, &lx), &t) in next.iter_mut().zip(l).zip(theta) {
                *n += scale * lx * t;
            }
        }
        // Analytically the numerators sum to ψ_X − |X| + N; dividing by their actual sum
        // keeps the result on the simplex to the last bit.
        let total: f64 = next.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidPrior(
                "parameter set with no data needs Dirichlet exponents > 1".into(),
            ));
        }
        next.iter_mut().for_each(|n| *n /= total);
        Ok(next)
    }

    /// Iterates [`Island::local_update`] from `theta0` until no entry moves by `tolerance`.
    pub fn solve(&self, theta0: &[f64], tolerance: f64, max_iterations: usize) -> Result<IslandSolution> {
        let mut theta = theta0.to_vec();
        for it in 1..=max_iterations {
            let next = self.local_update(&theta)?;
            let change = max_abs_change(&next, &theta);
            theta = next;
            if change < tolerance {
                return Ok(IslandSolution {
                    theta,
                    iterations: it,
                    converged: true,
                });
            }
        }
        Ok(IslandSolution {
            theta,
            iterations: max_iterations,
            converged: false,
        })
    }
}

/// One local update on an island of `n` examples; `lambdas` beyond those listed are neutral.
pub fn edml_local_update(theta: &[f64], lambdas: &[Vec<f64>], psi: &[f64], n: usize) -> Result<Vec<f64>> {
    Island::new(psi, lambdas, n)?.local_update(theta)
}

pub fn solve_island(
    theta0: &[f64],
    lambdas: &[Vec<f64>],
    psi: &[f64],
    n: usize,
    tolerance: f64,
    max_iterations: usize,
) -> Result<IslandSolution> {
    Island::new(psi, lambdas, n)?.solve(theta0, tolerance, max_iterations)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn max_abs_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neutral_evidence_reaches_dirichlet_mode() {
        let lambdas = vec![vec![1.0, 1.0]; 5];
        let s = solve_island(&[0.1, 0.9], &lambdas, &[3.0, 2.0], 5, 1e-13, 10_000).unwrap();
        assert!(s.converged);
        assert!((s.theta[0] - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn hard_evidence_gives_map_counts() {
        let theta = [0.2, 0.3, 0.5];
        let hard = |x: usize| {
            let mut l = vec![0.0; 3];
            l[x] = 1.0 / theta[x];
            l
        };
        let lambdas = vec![hard(0), hard(0), hard(2), hard(0), vec![1.0; 3]];
        let psi = [2.0, 2.0, 2.0];
        let next = edml_local_update(&theta, &lambdas, &psi, 6).unwrap();
        // one neutral observation is listed and one more is implied by n = 6; neutral
        // observations move the update but not its fixed point, whose denominator counts
        // only the 4 examples that reach this parameter set
        let s = solve_island(&theta, &lambdas, &psi, 6, 1e-14, 100_000).unwrap();
        let expected = [(1.0 + 3.0) / 7.0, 1.0 / 7.0, 2.0 / 7.0];
        for (t, e) in s.theta.iter().zip(expected) {
            assert!((t - e).abs() < 1e-12, "{:?}", s.theta);
        }
        assert!((next.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn already_converged_takes_one_iteration() {
        let s = solve_island(&[0.5, 0.5], &[vec![1.0, 1.0]], &[2.0, 2.0], 1, 1e-8, 512).unwrap();
        assert_eq!(s.iterations, 1);
        assert_eq!(s.theta, vec![0.5, 0.5]);
    }

    #[test]
    fn objective_never_decreases() {
        let island = Island {
            psi: vec![1.5, 3.0, 2.2],
            observations: vec![
                (1.0, vec![0.3, 2.0, 0.1]),
                (2.0, vec![4.0, 0.0, 1.0]),
                (1.0, vec![0.0, 0.0, 5.0]),
            ],
            neutral: 3.0,
        };
        let mut theta = vec![0.6, 0.2, 0.2];
        let mut last = island.log_objective(&theta);
        for _ in 0..200 {
            theta = island.local_update(&theta).unwrap();
            let now = island.log_objective(&theta);
            assert!(now >= last - 1e-12);
            last = now;
        }
    }

    #[test]
    fn zero_mixture_is_an_error() {
        let err = edml_local_update(&[1.0, 0.0], &[vec![0.0, 1.0]], &[2.0, 2.0], 1).unwrap_err();
        assert!(matches!(err, Error::ZeroIslandMixture));
    }
}
