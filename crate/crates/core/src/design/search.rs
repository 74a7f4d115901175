//! Randomized hill climbing on `λ_min`, used as a stand-in for the unknown
//! E-optimal value when measuring efficiency.
//!
//! Schedule, per shard:
//! 1. evaluate the start design;
//! 2. evaluate up to `restarts` random designs (uniform points, flat
//!    Dirichlet masses) and keep the best;
//! 3. spend the rest of the budget on single-coordinate proposals, half
//!    moving one point, half moving one mass, with step
//!    `σ_t = 0.1 · (1e-4)^{t/(T-1)}` relative to the interval half-width.
//!
//! A proposal is accepted only if it strictly increases `λ_min`. Every
//! `λ_min` evaluation counts against the budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{fisher_from_parts, tcheb_design, Design};
use crate::error::{Error, Result};
use crate::tcheb::{approx_tcheb_function, TchebOptions};
use crate::weight::WeightFn;

const SIGMA_START: f64 = 0.1;
const SIGMA_END: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Total number of `λ_min` evaluations across all shards.
    pub budget: u64,
    pub seed: u64,
    /// Random initial designs tried per shard.
    pub restarts: usize,
    /// Independent search streams; shard `i` is seeded with `seed + i`.
    pub shards: usize,
    /// Threads used to run the shards. Does not affect the result.
    pub workers: usize,
}

impl SearchConfig {
    pub fn new(budget: u64, seed: u64) -> Self {
        Self {
            budget,
            seed,
            ..Self::default()
        }
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: 200_000,
            seed: 1,
            restarts: 16,
            shards: 4,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub design: Design,
    pub lambda_min: f64,
    /// Evaluations actually spent.
    pub evaluations: u64,
}

/// Searches from the approximate Tchebycheff design of `w` on `interval`.
pub fn random_search_baseline(
    m: usize,
    w: &WeightFn,
    interval: (f64, f64),
    budget: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    let kappa = approx_tcheb_function(m, w, interval, TchebOptions::default())?;
    let start = tcheb_design(&kappa, kappa.points())?.design;
    random_search_from(&start, m, w, interval, &SearchConfig::new(budget, seed))
}

/// Runs the sharded search starting from `start`.
pub fn random_search_from(
    start: &Design,
    m: usize,
    w: &WeightFn,
    interval: (f64, f64),
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    let (a, b) = interval;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
    }
    if config.budget == 0 {
        return Err(Error::Domain("search budget must be at least 1".into()));
    }
    if m == 0 || start.is_empty() {
        return Err(Error::Domain("empty model or design".into()));
    }
    let shards = config.shards.max(1);
    let budgets: Vec<u64> = (0..shards as u64)
        .map(|i| config.budget / shards as u64 + u64::from(i < config.budget % shards as u64))
        .collect();

    let run = |i: usize| -> Result<Option<Candidate>> {
        if budgets[i] == 0 {
            return Ok(None);
        }
        let problem = Problem { m, w, a, b };
        problem
            .run_shard(
                start,
                budgets[i],
                config.seed.wrapping_add(i as u64),
                config.restarts,
            )
            .map(Some)
    };

    let workers = config.workers.clamp(1, shards);
    let results: Vec<Result<Option<Candidate>>> = if workers == 1 {
        (0..shards).map(run).collect()
    } else {
        let mut slots: Vec<Option<Result<Option<Candidate>>>> = (0..shards).map(|_| None).collect();
        std::thread::scope(|scope| {
            let run = &run;
            let handles: Vec<_> = (0..workers)
                .map(|worker| {
                    scope.spawn(move || {
                        (worker..shards)
                            .step_by(workers)
                            .map(|i| (i, run(i)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for handle in handles {
                for (i, r) in handle.join().expect("search worker panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("every shard ran"))
            .collect()
    };

    let mut best: Option<Candidate> = None;
    let mut evaluations = 0;
    for r in results {
        let Some(c) = r? else { continue };
        evaluations += c.evaluations;
        best = Some(match best {
            Some(cur) if !c.beats(&cur) => cur,
            _ => c,
        });
    }
    let best = best.expect("shard 0 always has budget");
    Ok(SearchOutcome {
        design: best.design,
        lambda_min: best.lambda,
        evaluations,
    })
}

struct Candidate {
    design: Design,
    lambda: f64,
    evaluations: u64,
}

impl Candidate {
    /// Larger `λ_min` wins; ties go to the lexicographically smaller support.
    fn beats(&self, other: &Candidate) -> bool {
        let lexicographic = |x: &[f64], y: &[f64]| {
            x.iter()
                .zip(y)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or_else(|| x.len().cmp(&y.len()))
        };
        self.lambda
            .total_cmp(&other.lambda)
            .then_with(|| lexicographic(other.design.support(), self.design.support()))
            .then_with(|| lexicographic(other.design.masses(), self.design.masses()))
            .is_gt()
    }
}

struct Problem<'a> {
    m: usize,
    w: &'a WeightFn,
    a: f64,
    b: f64,
}

/// Working state: unsorted points, masses and cached weights.
#[derive(Clone)]
struct State {
    points: Vec<f64>,
    masses: Vec<f64>,
    weights: Vec<f64>,
}

impl Problem<'_> {
    fn lambda(&self, s: &State) -> f64 {
        let value = fisher_from_parts(&s.points, &s.masses, &s.weights, self.m).min_eigenvalue();
        if value.is_finite() {
            value
        } else {
            f64::NEG_INFINITY
        }
    }

    fn weight(&self, x: f64) -> Option<f64> {
        self.w.eval(x).ok().filter(|v| v.is_finite() && *v >= 0.0)
    }

    fn state(&self, points: Vec<f64>, masses: Vec<f64>) -> Option<State> {
        let weights = points
            .iter()
            .map(|&x| self.weight(x))
            .collect::<Option<Vec<_>>>()?;
        Some(State {
            points,
            masses,
            weights,
        })
    }

    fn random_state(&self, rng: &mut ChaCha8Rng, n: usize) -> Option<State> {
        let points: Vec<f64> = (0..n).map(|_| rng.random_range(self.a..=self.b)).collect();
        let mut masses: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = masses.iter().sum();
        masses.iter_mut().for_each(|r| *r /= total);
        self.state(points, masses)
    }

    fn run_shard(
        &self,
        start: &Design,
        budget: u64,
        seed: u64,
        restarts: usize,
    ) -> Result<Candidate> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut current = self
            .state(start.support().to_vec(), start.masses().to_vec())
            .ok_or_else(|| Error::Domain("weight is not usable at the start design".into()))?;
        let mut current_lambda = self.lambda(&current);
        let mut used = 1u64;
        let mut improved = false;

        let n = current.points.len().max(self.m);
        for _ in 0..restarts {
            if used >= budget {
                break;
            }
            used += 1;
            if let Some(s) = self.random_state(&mut rng, n) {
                let l = self.lambda(&s);
                if l > current_lambda {
                    current = s;
                    current_lambda = l;
                    improved = true;
                }
            }
        }

        let steps = budget - used;
        let half = 0.5 * (self.b - self.a);
        let decay = (SIGMA_END / SIGMA_START).ln();
        for t in 0..steps {
            let frac = if steps > 1 {
                t as f64 / (steps - 1) as f64
            } else {
                0.0
            };
            let sigma = SIGMA_START * (decay * frac).exp();
            let z: f64 = rng.sample(StandardNormal);
            let i = rng.random_range(0..current.points.len());
            let mut proposal = current.clone();
            if rng.random_bool(0.5) {
                let x = (current.points[i] + sigma * half * z).clamp(self.a, self.b);
                let Some(wx) = self.weight(x) else { continue };
                proposal.points[i] = x;
                proposal.weights[i] = wx;
            } else {
                proposal.masses[i] += sigma * z;
                project_to_simplex(&mut proposal.masses);
            }
            let l = self.lambda(&proposal);
            if l > current_lambda {
                current = proposal;
                current_lambda = l;
                improved = true;
            }
        }

        let design = if improved {
            Design::from_unsorted(&current.points, &current.masses)?
        } else {
            start.clone()
        };
        // recompute on the canonical form so every caller sees the same value
        let canonical = self
            .state(design.support().to_vec(), design.masses().to_vec())
            .expect("weights were finite at these points");
        let lambda = if improved {
            self.lambda(&canonical)
        } else {
            current_lambda
        };
        Ok(Candidate {
            design,
            lambda,
            evaluations: budget,
        })
    }
}

/// Euclidean projection onto the probability simplex.
fn project_to_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
}
