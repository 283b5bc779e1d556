//! Binary particle swarm biclustering of a sequence × amino-acid matrix.
//!
//! A particle is a membership bit per row followed by a bit per column. The
//! swarm starts from the cross product of PSO k-means partitions of the rows
//! and of the columns. Bits are resampled each step with probability
//! `sigmoid(v)` of being set, and every particle is scored by
//!
//! ```text
//! msr(I, J) - lambda * |I||J| / (n_rows * n_cols)
//! ```

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics::msr;
use crate::pso::{velocity_step, PsoConfig, MAX_PARTICLES};
use crate::psokmeans::{pso_kmeans, PsoKMeansConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bicluster {
    /// Sorted row (sequence) indices.
    pub rows: Vec<usize>,
    /// Sorted column (amino-acid) indices.
    pub cols: Vec<usize>,
    pub msr: f64,
    pub volume: usize,
}

impl Bicluster {
    pub fn new(matrix: &Matrix, mut rows: Vec<usize>, mut cols: Vec<usize>) -> Result<Bicluster> {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::contract(
                "bicluster needs at least one row and one column",
            ));
        }
        if rows.last().is_some_and(|&r| r >= matrix.nrows())
            || cols.last().is_some_and(|&c| c >= matrix.ncols())
        {
            return Err(Error::contract("bicluster index out of range"));
        }
        let msr = msr(matrix, &rows, &cols);
        let volume = rows.len() * cols.len();
        Ok(Bicluster {
            rows,
            cols,
            msr,
            volume,
        })
    }

    fn from_bits(matrix: &Matrix, bits: &[bool]) -> Bicluster {
        let n = matrix.nrows();
        let rows: Vec<usize> = (0..n).filter(|&i| bits[i]).collect();
        let cols: Vec<usize> = (0..matrix.ncols()).filter(|&j| bits[n + j]).collect();
        let msr = msr(matrix, &rows, &cols);
        let volume = rows.len() * cols.len();
        Bicluster {
            rows,
            cols,
            msr,
            volume,
        }
    }

    fn to_bits(&self, matrix: &Matrix) -> Vec<bool> {
        let n = matrix.nrows();
        let mut bits = vec![false; n + matrix.ncols()];
        self.rows.iter().for_each(|&i| bits[i] = true);
        self.cols.iter().for_each(|&j| bits[n + j] = true);
        bits
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BiclusterConfig {
    /// Inertia, acceleration coefficients, iteration budget and seed. The
    /// particle count here is ignored unless `n_particles` is set.
    pub pso: PsoConfig,
    /// Swarm size; defaults to one particle per seed (capped at 100). Extra
    /// particles cycle through the seeds.
    pub n_particles: Option<usize>,
    /// Volume reward weight; defaults to a tenth of the full-matrix MSR.
    pub lambda: Option<f64>,
    /// Symmetric velocity clamp for the bit velocities.
    pub velocity_limit: f64,
}

impl Default for BiclusterConfig {
    fn default() -> Self {
        BiclusterConfig {
            pso: PsoConfig::default(),
            n_particles: None,
            lambda: None,
            velocity_limit: 4.0,
        }
    }
}

impl BiclusterConfig {
    pub fn resolve_lambda(&self, matrix: &Matrix) -> f64 {
        self.lambda.unwrap_or_else(|| {
            let all_rows: Vec<usize> = (0..matrix.nrows()).collect();
            let all_cols: Vec<usize> = (0..matrix.ncols()).collect();
            0.1 * msr(matrix, &all_rows, &all_cols)
        })
    }
}

pub fn bicluster_fitness(matrix: &Matrix, bic: &Bicluster, lambda: f64) -> f64 {
    bic.msr - lambda * bic.volume as f64 / (matrix.nrows() * matrix.ncols()) as f64
}

fn check_matrix(matrix: &Matrix) -> Result<()> {
    if matrix.nrows() < 2 || matrix.ncols() < 2 {
        return Err(Error::contract(format!(
            "degenerate {}×{} matrix; biclustering needs at least 2 rows and 2 columns",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if matrix.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("matrix contains non-finite values"));
    }
    Ok(())
}

/// Seeds: PSO k-means on the row vectors and on the column vectors, crossed.
///
/// Row cluster `i` × column cluster `j` yields one bicluster; pairs involving
/// an empty cluster are skipped. The column run uses `seed + 1`.
pub fn seed_biclusters(
    matrix: &Matrix,
    k_rows: usize,
    k_cols: usize,
    cfg: &PsoKMeansConfig,
) -> Result<Vec<Bicluster>> {
    check_matrix(matrix)?;
    if k_rows > matrix.nrows() || k_cols > matrix.ncols() {
        return Err(Error::contract("k_rows/k_cols exceed the matrix shape"));
    }
    let row_groups = pso_kmeans(&matrix.row_vectors(), k_rows, cfg)?
        .clusters
        .members();
    let mut col_cfg = cfg.clone();
    col_cfg.pso.seed = cfg.pso.seed.wrapping_add(1);
    let col_groups = pso_kmeans(&matrix.column_vectors(), k_cols, &col_cfg)?
        .clusters
        .members();
    let mut seeds = Vec::with_capacity(k_rows * k_cols);
    for rows in row_groups.iter().filter(|g| !g.is_empty()) {
        for cols in col_groups.iter().filter(|g| !g.is_empty()) {
            seeds.push(Bicluster::new(matrix, rows.clone(), cols.clone())?);
        }
    }
    Ok(seeds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryParticle {
    pub bits: Vec<bool>,
    pub velocity: Vec<f64>,
    pub pbest_bits: Vec<bool>,
    pub pbest_fitness: f64,
    pub current_fitness: f64,
}

#[derive(Debug, Clone)]
pub struct BiclusterOutcome {
    /// gbest first, then the remaining distinct personal bests by fitness.
    pub biclusters: Vec<Bicluster>,
    /// Objective value of each entry in `biclusters`.
    pub fitness: Vec<f64>,
    /// gbest objective after each iteration.
    pub trace: Vec<f64>,
    pub lambda: f64,
    pub particles: Vec<BinaryParticle>,
}

impl BiclusterOutcome {
    pub fn gbest(&self) -> &Bicluster {
        &self.biclusters[0]
    }
}

#[inline]
fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Forces the highest-velocity bit of an all-zero half on (lowest index on ties).
fn repair_half(bits: &mut [bool], velocity: &[f64]) {
    if bits.iter().any(|&b| b) {
        return;
    }
    let mut best = 0;
    for i in 1..velocity.len() {
        if velocity[i] > velocity[best] {
            best = i;
        }
    }
    bits[best] = true;
}

pub fn pso_bicluster(
    matrix: &Matrix,
    cfg: &BiclusterConfig,
    seeds: &[Bicluster],
) -> Result<BiclusterOutcome> {
    check_matrix(matrix)?;
    if seeds.is_empty() {
        return Err(Error::contract("biclustering needs at least one seed"));
    }
    for s in seeds {
        Bicluster::new(matrix, s.rows.clone(), s.cols.clone())?;
    }
    let n_particles = cfg.n_particles.unwrap_or(seeds.len().min(MAX_PARTICLES));
    let pso = PsoConfig {
        n_particles,
        ..cfg.pso.clone()
    };
    pso.validate()?;
    if !(cfg.velocity_limit > 0.0 && cfg.velocity_limit.is_finite()) {
        return Err(Error::contract("velocity limit must be positive"));
    }
    let lambda = cfg.resolve_lambda(matrix);
    if !lambda.is_finite() {
        return Err(Error::contract("lambda must be finite"));
    }

    let n = matrix.nrows();
    let dim = n + matrix.ncols();
    let limits = vec![cfg.velocity_limit; dim];
    let mut rng = ChaCha8Rng::seed_from_u64(pso.seed);

    // Velocities start random but signed toward the seed's bits, so the first
    // move perturbs the seeds rather than erasing them.
    let mut particles: Vec<BinaryParticle> = (0..n_particles)
        .map(|p| {
            let bits = seeds[p % seeds.len()].to_bits(matrix);
            let velocity = bits
                .iter()
                .map(|&b| {
                    let mag = cfg.velocity_limit * rng.random::<f64>();
                    if b {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect();
            BinaryParticle {
                pbest_bits: bits.clone(),
                bits,
                velocity,
                pbest_fitness: f64::INFINITY,
                current_fitness: f64::INFINITY,
            }
        })
        .collect();

    let mut gbest_bits = particles[0].bits.clone();
    let mut gbest_fitness = f64::INFINITY;
    let mut trace = Vec::with_capacity(pso.max_iter);
    let mut stale = 0;
    let mut position = vec![0.0; dim];
    let mut pbest_pos = vec![0.0; dim];
    let mut gbest_pos = vec![0.0; dim];

    for iteration in 1..=pso.max_iter {
        let before = gbest_fitness;
        for (idx, p) in particles.iter_mut().enumerate() {
            let f = bicluster_fitness(matrix, &Bicluster::from_bits(matrix, &p.bits), lambda);
            if !f.is_finite() {
                return Err(Error::NonFiniteFitness {
                    particle: idx,
                    iteration,
                });
            }
            p.current_fitness = f;
            if f < p.pbest_fitness {
                p.pbest_fitness = f;
                p.pbest_bits.clone_from(&p.bits);
            }
            if f < gbest_fitness {
                gbest_fitness = f;
                gbest_bits.clone_from(&p.bits);
            }
        }
        trace.push(gbest_fitness);
        stale = if gbest_fitness < before { 0 } else { stale + 1 };
        if iteration == pso.max_iter || pso.patience.is_some_and(|limit| stale >= limit) {
            break;
        }

        for (g, &b) in gbest_pos.iter_mut().zip(&gbest_bits) {
            *g = b as u8 as f64;
        }
        for p in &mut particles {
            for d in 0..dim {
                position[d] = p.bits[d] as u8 as f64;
                pbest_pos[d] = p.pbest_bits[d] as u8 as f64;
            }
            velocity_step(
                &mut p.velocity,
                &position,
                &pbest_pos,
                &gbest_pos,
                &pso,
                &limits,
                &mut rng,
            );
            for d in 0..dim {
                p.bits[d] = rng.random::<f64>() < sigmoid(p.velocity[d]);
            }
            let (row_bits, col_bits) = p.bits.split_at_mut(n);
            let (row_vel, col_vel) = p.velocity.split_at(n);
            repair_half(row_bits, row_vel);
            repair_half(col_bits, col_vel);
        }
    }

    let mut order: Vec<usize> = (0..particles.len()).collect();
    order.sort_by(|&a, &b| {
        particles[a]
            .pbest_fitness
            .total_cmp(&particles[b].pbest_fitness)
    });
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut biclusters = vec![Bicluster::from_bits(matrix, &gbest_bits)];
    let mut fitness = vec![gbest_fitness];
    seen.insert(gbest_bits);
    for i in order {
        let p = &particles[i];
        if seen.insert(p.pbest_bits.clone()) {
            biclusters.push(Bicluster::from_bits(matrix, &p.pbest_bits));
            fitness.push(p.pbest_fitness);
        }
    }
    Ok(BiclusterOutcome {
        biclusters,
        fitness,
        trace,
        lambda,
        particles,
    })
}

/// Jaccard index of two index sets.
pub fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let a: HashSet<_> = a.iter().collect();
    let b: HashSet<_> = b.iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}
