//! Global-best particle swarm optimisation (minimisation).
//!
//! Each iteration evaluates every particle, refreshes personal and global
//! bests, then moves the particles with the inertia-weight rule
//!
//! ```text
//! v <- w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x)
//! x <- x + v
//! ```
//!
//! with `r1`, `r2` drawn uniformly from `[0, 1)` per dimension per step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_PARTICLES: usize = 100;

/// Velocity limit, applied componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocityClamp {
    Off,
    Absolute(f64),
    /// Fraction of each dimension's data range.
    RangeFraction(f64),
}

impl Default for VelocityClamp {
    fn default() -> Self {
        VelocityClamp::RangeFraction(0.2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub n_particles: usize,
    pub max_iter: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub v_max: VelocityClamp,
    /// Stop early after this many iterations without a strict gbest improvement.
    pub patience: Option<usize>,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            n_particles: 20,
            max_iter: 100,
            inertia: 0.72,
            cognitive: 1.49,
            social: 1.49,
            v_max: VelocityClamp::default(),
            patience: None,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 || self.n_particles > MAX_PARTICLES {
            return Err(Error::contract(format!(
                "n_particles must be in 1..={MAX_PARTICLES}, got {}",
                self.n_particles
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::contract("max_iter must be at least 1"));
        }
        if ![self.inertia, self.cognitive, self.social]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::contract("w, c1 and c2 must be finite"));
        }
        match self.v_max {
            VelocityClamp::Absolute(v) | VelocityClamp::RangeFraction(v)
                if !(v > 0.0 && v.is_finite()) =>
            {
                Err(Error::contract("v_max must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Per-dimension velocity limits for data with the given per-dimension span.
    pub(crate) fn limits(&self, span: &[f64]) -> Vec<f64> {
        match self.v_max {
            VelocityClamp::Off => vec![f64::INFINITY; span.len()],
            VelocityClamp::Absolute(v) => vec![v; span.len()],
            VelocityClamp::RangeFraction(f) => span.iter().map(|s| f * s).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_fitness: f64,
    pub current_fitness: f64,
}

/// Per-dimension `max - min` over a set of points.
pub fn span_of(points: &[Vec<f64>]) -> Vec<f64> {
    let dim = points[0].len();
    (0..dim)
        .map(|d| {
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[d]), hi.max(p[d]))
                });
            hi - lo
        })
        .collect()
}

/// One velocity update for a single particle, clamped to `limits`.
pub(crate) fn velocity_step<R: Rng>(
    velocity: &mut [f64],
    position: &[f64],
    pbest: &[f64],
    gbest: &[f64],
    cfg: &PsoConfig,
    limits: &[f64],
    rng: &mut R,
) {
    for d in 0..velocity.len() {
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let v = cfg.inertia * velocity[d]
            + cfg.cognitive * r1 * (pbest[d] - position[d])
            + cfg.social * r2 * (gbest[d] - position[d]);
        velocity[d] = v.clamp(-limits[d], limits[d]);
    }
}

#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub gbest_position: Vec<f64>,
    pub gbest_fitness: f64,
    /// Completed evaluate/update cycles.
    pub iteration: usize,
    /// gbest fitness after each iteration.
    pub trace: Vec<f64>,
    cfg: PsoConfig,
    limits: Vec<f64>,
    rng: ChaCha8Rng,
    stale: usize,
}

impl Swarm {
    /// Seeds a swarm at `init`. Velocity limits come from `span` when given,
    /// otherwise from the spread of the initial positions.
    pub fn new(init: Vec<Vec<f64>>, cfg: &PsoConfig, span: Option<&[f64]>) -> Result<Swarm> {
        cfg.validate()?;
        if init.is_empty() {
            return Err(Error::contract("no initial positions"));
        }
        if init.len() != cfg.n_particles {
            return Err(Error::contract(format!(
                "{} initial positions for {} particles",
                init.len(),
                cfg.n_particles
            )));
        }
        let dim = init[0].len();
        if dim == 0 || init.iter().any(|p| p.len() != dim) {
            return Err(Error::contract("initial positions differ in dimension"));
        }
        let span = match span {
            Some(s) if s.len() != dim => return Err(Error::contract("span dimension mismatch")),
            Some(s) => s.to_vec(),
            None => span_of(&init),
        };
        let limits = cfg.limits(&span);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        // Initial velocities are uniform within the clamp, or within a fifth
        // of the span when clamping is off.
        let init_scale: Vec<f64> = limits
            .iter()
            .zip(&span)
            .map(|(l, s)| if l.is_finite() { *l } else { 0.2 * s })
            .collect();
        let particles = init
            .into_iter()
            .map(|position| {
                let velocity = init_scale
                    .iter()
                    .map(|s| s * (2.0 * rng.random::<f64>() - 1.0))
                    .collect();
                Particle {
                    pbest_position: position.clone(),
                    position,
                    velocity,
                    pbest_fitness: f64::INFINITY,
                    current_fitness: f64::INFINITY,
                }
            })
            .collect();
        Ok(Swarm {
            particles,
            gbest_position: vec![0.0; dim],
            gbest_fitness: f64::INFINITY,
            iteration: 0,
            trace: Vec::new(),
            cfg: cfg.clone(),
            limits,
            rng,
            stale: 0,
        })
    }

    pub fn config(&self) -> &PsoConfig {
        &self.cfg
    }

    /// True once `max_iter` iterations have run or patience ran out.
    pub fn finished(&self) -> bool {
        self.iteration >= self.cfg.max_iter || self.cfg.patience.is_some_and(|p| self.stale >= p)
    }

    /// Evaluates every particle, updates pbest/gbest, then moves the swarm.
    pub fn step<F: FnMut(&[f64]) -> f64>(&mut self, fitness: &mut F) -> Result<()> {
        let iteration = self.iteration + 1;
        let before = self.gbest_fitness;
        for (idx, p) in self.particles.iter_mut().enumerate() {
            let f = fitness(&p.position);
            if !f.is_finite() {
                return Err(Error::NonFiniteFitness {
                    particle: idx,
                    iteration,
                });
            }
            p.current_fitness = f;
            if f < p.pbest_fitness {
                p.pbest_fitness = f;
                p.pbest_position.clone_from(&p.position);
            }
            if f < self.gbest_fitness {
                self.gbest_fitness = f;
                self.gbest_position.clone_from(&p.position);
            }
        }
        for p in &mut self.particles {
            velocity_step(
                &mut p.velocity,
                &p.position,
                &p.pbest_position,
                &self.gbest_position,
                &self.cfg,
                &self.limits,
                &mut self.rng,
            );
            p.position
                .iter_mut()
                .zip(&p.velocity)
                .for_each(|(x, v)| *x += v);
        }
        self.stale = if self.gbest_fitness < before {
            0
        } else {
            self.stale + 1
        };
        self.iteration = iteration;
        self.trace.push(self.gbest_fitness);
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PsoOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub swarm: Swarm,
}

impl PsoOutcome {
    pub fn trace(&self) -> &[f64] {
        &self.swarm.trace
    }
}

pub fn pso_optimize<F: FnMut(&[f64]) -> f64>(
    fitness: F,
    init: Vec<Vec<f64>>,
    cfg: &PsoConfig,
) -> Result<PsoOutcome> {
    pso_optimize_with_span(fitness, init, cfg, None)
}

pub fn pso_optimize_with_span<F: FnMut(&[f64]) -> f64>(
    mut fitness: F,
    init: Vec<Vec<f64>>,
    cfg: &PsoConfig,
    span: Option<&[f64]>,
) -> Result<PsoOutcome> {
    let mut swarm = Swarm::new(init, cfg, span)?;
    while !swarm.finished() {
        swarm.step(&mut fitness)?;
    }
    Ok(PsoOutcome {
        best_position: swarm.gbest_position.clone(),
        best_fitness: swarm.gbest_fitness,
        swarm,
    })
}

/// Renders a gbest trace as `iteration,gbest_fitness` CSV.
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,gbest_fitness\n");
    for (i, f) in trace.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, f));
    }
    out
}
