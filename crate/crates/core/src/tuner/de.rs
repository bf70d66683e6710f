//! DE/rand/1/bin over mixed real, integer and boolean spaces.

use rand::Rng;
use rayon::prelude::*;

use super::space::{Candidate, DimensionKind, ParamSpace};
use crate::error::{Error, Result};
use crate::util;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeConfig {
    pub np: usize,
    /// Differential weight.
    pub f: f64,
    /// Crossover rate.
    pub cr: f64,
    pub generations: usize,
    pub seed: u64,
}

impl DeConfig {
    /// `np = 10·dims`, `f = 0.8`, `cr = 0.9`.
    pub fn for_space(space: &ParamSpace, generations: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            np: np_for(space)?,
            f: 0.8,
            cr: 0.9,
            generations,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.np < 4 {
            return Err(Error::invalid("DE needs a population of at least 4"));
        }
        if !(0.0..=1.0).contains(&self.cr) || !self.f.is_finite() {
            return Err(Error::invalid("DE needs cr in [0, 1] and a finite f"));
        }
        Ok(())
    }
}

pub fn np_for(space: &ParamSpace) -> Result<usize> {
    if space.is_empty() {
        return Err(Error::invalid("empty parameter space"));
    }
    Ok(10 * space.len())
}

/// Builds a trial from target `x` and donors `a`, `b`, `c`.
///
/// Each dimension is replaced with probability `cr` (one randomly chosen
/// dimension always is): numerics take `a + f·(b − c)`, booleans flip `x`.
/// The trial is then clipped and rounded into the space.
pub fn mutate<R: Rng + ?Sized>(
    space: &ParamSpace,
    x: &[f64],
    a: &[f64],
    b: &[f64],
    c: &[f64],
    f: f64,
    cr: f64,
    rng: &mut R,
) -> Vec<f64> {
    let forced = rng.gen_range(0..space.len());
    space
        .dims()
        .iter()
        .enumerate()
        .map(|(k, dim)| {
            let fire = rng.gen::<f64>() < cr || k == forced;
            if !fire {
                return x[k];
            }
            let y = match dim.kind {
                DimensionKind::Boolean => 1.0 - x[k],
                _ => a[k] + f * (b[k] - c[k]),
            };
            dim.repair(y)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeOutcome {
    pub best: Candidate,
    /// Best fitness so far after initialisation and after each generation.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

fn better(new: f64, old: f64) -> bool {
    let key = |v: f64| if v.is_nan() { f64::NEG_INFINITY } else { v };
    key(new) > key(old)
}

/// Maximises `fitness` over `space`.
///
/// `seeds` (repaired into the space) fill the first population slots; the
/// rest is sampled uniformly and scored in parallel. Each generation then
/// walks the population in order: a trial is built from three distinct other
/// members and replaces its parent at once if it strictly beats it, so later
/// members already see the improvement. NaN fitness counts as the worst
/// possible value. The returned candidate is the best ever seen.
pub fn de_optimize<F>(space: &ParamSpace, fitness: F, cfg: &DeConfig, seeds: &[Vec<f64>]) -> Result<DeOutcome>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if space.is_empty() {
        return Err(Error::invalid("empty parameter space"));
    }
    let mut rng = util::rng(cfg.seed);
    let mut pop: Vec<Vec<f64>> = Vec::with_capacity(cfg.np);
    for s in seeds.iter().take(cfg.np) {
        if s.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                got: s.len(),
            });
        }
        let mut v = s.clone();
        space.repair(&mut v);
        pop.push(v);
    }
    while pop.len() < cfg.np {
        pop.push(space.sample(&mut rng));
    }
    let mut scores: Vec<f64> = pop.par_iter().map(|c| fitness(c)).collect::<Result<_>>()?;
    let mut evaluations = pop.len();
    let mut best = 0;
    for i in 1..pop.len() {
        if better(scores[i], scores[best]) {
            best = i;
        }
    }
    let mut best_ever = Candidate {
        values: pop[best].clone(),
        fitness: Some(scores[best]),
    };
    let mut trace = vec![scores[best]];

    for _ in 0..cfg.generations {
        for i in 0..cfg.np {
            let [a, b, c] = pick_three(cfg.np, i, &mut rng);
            let trial = mutate(space, &pop[i], &pop[a], &pop[b], &pop[c], cfg.f, cfg.cr, &mut rng);
            let s = fitness(&trial)?;
            evaluations += 1;
            if better(s, scores[i]) {
                if better(s, best_ever.fitness.unwrap_or(f64::NAN)) {
                    best_ever = Candidate {
                        values: trial.clone(),
                        fitness: Some(s),
                    };
                }
                pop[i] = trial;
                scores[i] = s;
            }
        }
        trace.push(best_ever.fitness.unwrap_or(f64::NAN));
    }
    Ok(DeOutcome {
        best: best_ever,
        trace,
        evaluations,
    })
}

fn pick_three<R: Rng + ?Sized>(np: usize, skip: usize, rng: &mut R) -> [usize; 3] {
    let mut out = [0usize; 3];
    let mut n = 0;
    while n < 3 {
        let j = rng.gen_range(0..np);
        if j != skip && !out[..n].contains(&j) {
            out[n] = j;
            n += 1;
        }
    }
    out
}

/// Best of `budget` uniform samples; the yardstick DE is compared against.
pub fn random_search<F>(space: &ParamSpace, fitness: F, budget: usize, seed: u64) -> Result<Candidate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut rng = util::rng(seed);
    let mut best = Candidate {
        values: Vec::new(),
        fitness: None,
    };
    for _ in 0..budget {
        let v = space.sample(&mut rng);
        let s = fitness(&v)?;
        if best.fitness.is_none_or(|b| better(s, b)) {
            best = Candidate {
                values: v,
                fitness: Some(s),
            };
        }
    }
    Ok(best)
}
