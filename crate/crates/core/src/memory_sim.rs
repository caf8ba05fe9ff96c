//! Thermal memory lifetimes from local error dynamics.
//!
//! Each defect sector is simulated on its own. Starting from the error-free
//! configuration, every step picks a uniformly random spin and flips it with
//! Metropolis acceptance for the defect energy `2JΦ`. Whenever the syndrome
//! is empty the winding parities of the error chain against flat
//! representatives of the logical classes are read off; memory is lost at
//! the first such instant with a nonzero winding.
//!
//! The B-defect sector of T^(D,k) uses X-errors on k-cells against the
//! plaquettes at `T/μ`. The A-defect sector is the B-defect sector of the
//! dual model T^(D,D-k) at `T/λ`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge_mc::{chain_rng, GaugeSystem};
use crate::homology::flat_cycle;
use crate::lattice::{binomial, CellId, Lattice, LatticeSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorKind {
    /// Plaquette defects of T^(D,k); threatens the X̄ eigenvalues.
    BDefect,
    /// Star defects of T^(D,k), run as plaquette defects of T^(D,D-k).
    ADefect,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub kind: SectorKind,
    /// `T/μ` for B-defects, `T/λ` for A-defects.
    pub temperature: f64,
}

impl SectorSpec {
    pub fn beta(&self) -> Result<f64> {
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::arg(
                "temperature",
                format!("must be positive and finite, got {}", self.temperature),
            ));
        }
        Ok(1.0 / self.temperature)
    }

    /// Spin dimension of the simulated model.
    pub fn spin_dim(&self, dim: usize, k: usize) -> usize {
        match self.kind {
            SectorKind::BDefect => k,
            SectorKind::ADefect => dim - k,
        }
    }
}

/// Flat j-cycle through the origin, translated by `shift` along `axis`.
pub fn shifted_flat_cycle(lattice: &Lattice, j: usize, mask: u8, axis: usize, shift: usize) -> Vec<usize> {
    flat_cycle(lattice, j, mask)
        .into_iter()
        .map(|c| {
            let cell = lattice.cell(j, c);
            let mut base = *cell.base();
            base[axis] = ((base[axis] as usize + shift) % lattice.size()) as u16;
            lattice.index_of(&CellId::from_mask(base, cell.dirs()))
        })
        .collect()
}

/// One step of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub step: u64,
    /// Syndrome weight after the step.
    pub phi: usize,
    /// Winding parities, bit α for class α; only defined when `phi == 0`.
    pub winding: Option<u128>,
}

/// Error dynamics of one sector on one lattice.
#[derive(Clone, Debug)]
pub struct SectorSimulator {
    system: GaugeSystem,
    /// Bit α set when the spin lies on representative α.
    membership: Vec<u128>,
    classes: usize,
    beta: f64,
    errors: Vec<bool>,
    signs: Vec<i8>,
    phi: usize,
    winding: u128,
    step: u64,
}

impl SectorSimulator {
    pub fn new(dim: usize, k: usize, size: usize, sector: SectorSpec) -> Result<Self> {
        if k == 0 || k >= dim {
            return Err(Error::arg("k", format!("need 1 <= k <= D-1, got k={k} with D={dim}")));
        }
        let lattice = Lattice::new(LatticeSpec::new(dim, size)?);
        let j = sector.spin_dim(dim, k);
        let reps = lattice.masks(j).iter().map(|&m| flat_cycle(&lattice, j, m)).collect();
        Self::with_representatives(&lattice, j, sector, reps)
    }

    /// Uses the given j-cycles as logical representatives instead of the
    /// flat ones through the origin.
    pub fn with_representatives(
        lattice: &Lattice,
        j: usize,
        sector: SectorSpec,
        reps: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let beta = sector.beta()?;
        if reps.len() > 128 {
            return Err(Error::arg("representatives", "at most 128 logical classes supported"));
        }
        let system = GaugeSystem::from_defect_matrix(&lattice.coboundary_matrix(j)?);
        let mut membership = vec![0u128; system.num_spins()];
        for (a, rep) in reps.iter().enumerate() {
            for &c in rep {
                membership[c] ^= 1 << a;
            }
        }
        Ok(SectorSimulator {
            membership,
            classes: reps.len(),
            beta,
            errors: vec![false; system.num_spins()],
            signs: vec![1; system.num_terms()],
            phi: 0,
            winding: 0,
            step: 0,
            system,
        })
    }

    pub fn num_spins(&self) -> usize {
        self.system.num_spins()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn errors(&self) -> &[bool] {
        &self.errors
    }

    /// Flips one spin unconditionally.
    pub fn flip(&mut self, spin: usize) {
        self.errors[spin] = !self.errors[spin];
        self.winding ^= self.membership[spin];
        for &t in self.system.terms_of(spin) {
            let s = &mut self.signs[t as usize];
            if *s > 0 {
                self.phi += 1;
            } else {
                self.phi -= 1;
            }
            *s = -*s;
        }
    }

    pub fn record(&self) -> TrajectoryRecord {
        TrajectoryRecord {
            step: self.step,
            phi: self.phi,
            winding: (self.phi == 0).then_some(self.winding),
        }
    }

    /// One attempted flip: accepted with `min(1, e^{-2βJ ΔΦ})`.
    pub fn step<R: Rng>(&mut self, rng: &mut R) -> TrajectoryRecord {
        let spin = rng.random_range(0..self.system.num_spins());
        let sum: i64 = self
            .system
            .terms_of(spin)
            .iter()
            .map(|&t| self.signs[t as usize] as i64)
            .sum();
        // ΔΦ = (number of satisfied terms) - (number of violated terms) = sum.
        let accept = sum <= 0 || rng.random::<f64>() < (-2.0 * self.beta * sum as f64).exp();
        if accept {
            self.flip(spin);
        }
        self.step += 1;
        self.record()
    }
}

/// Full trajectory of `max_steps` attempted flips.
pub fn sector_trajectory<R: Rng>(sim: &mut SectorSimulator, max_steps: u64, rng: &mut R) -> Vec<TrajectoryRecord> {
    (0..max_steps).map(|_| sim.step(rng)).collect()
}

/// First step at which the syndrome is empty and some winding is odd.
pub fn first_flip_time<R: Rng>(sim: &mut SectorSimulator, max_steps: u64, rng: &mut R) -> Option<u64> {
    for _ in 0..max_steps {
        let r = sim.step(rng);
        if r.winding.is_some_and(|w| w != 0) {
            return Some(r.step);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifetimeParams {
    pub dim: usize,
    pub k: usize,
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Censoring budget in sweeps; each size gets `max_sweeps · N` steps.
    pub max_sweeps: f64,
    pub seed: u64,
}

impl LifetimeParams {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 20 {
            return Err(Error::arg(
                "trials",
                format!("need at least 20 trials per size, got {}", self.trials),
            ));
        }
        if self.sizes.is_empty() {
            return Err(Error::arg("sizes", "size list is empty"));
        }
        if self.sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("sizes", "sizes must be strictly increasing"));
        }
        if !(self.max_sweeps.is_finite() && self.max_sweeps > 0.0) {
            return Err(Error::arg("max_sweeps", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Lifetime at one size, in sweeps (attempted flips per spin).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifetimePoint {
    pub size: usize,
    pub trials: usize,
    pub censored: usize,
    /// Censored mean: censored trials count as `max_steps`.
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Set when any trial was censored; `mean` is then a lower bound.
    pub lower_bound: bool,
    /// Per-trial first-flip times in sweeps, `None` when censored.
    pub times: Vec<Option<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    NotIncreasing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifetimeReport {
    pub sector: SectorSpec,
    pub points: Vec<LifetimePoint>,
    pub trend: Trend,
}

fn summarize(size: usize, times: Vec<Option<f64>>, cap: f64) -> LifetimePoint {
    let vals: Vec<f64> = times.iter().map(|t| t.unwrap_or(cap)).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let half = 1.96 * sd / n.sqrt();
    let censored = times.iter().filter(|t| t.is_none()).count();
    LifetimePoint {
        size,
        trials: times.len(),
        censored,
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        lower_bound: censored > 0,
        times,
    }
}

/// Increasing when the censored means rise along the size list and the
/// largest size clears the smallest beyond both confidence intervals.
/// Inconclusive when every trial at every size is censored.
pub fn trend(points: &[LifetimePoint]) -> Trend {
    if points.iter().all(|p| p.censored == p.trials) {
        return Trend::Inconclusive;
    }
    let (first, last) = (&points[0], &points[points.len() - 1]);
    let rising = points.windows(2).all(|w| w[1].mean > w[0].mean);
    if points.len() >= 2 && rising && last.ci_low > first.ci_high {
        Trend::Increasing
    } else {
        Trend::NotIncreasing
    }
}

pub fn lifetime_estimate(sector: SectorSpec, params: &LifetimeParams) -> Result<LifetimeReport> {
    params.validate()?;
    sector.beta()?;
    // Separate streams per sector, so self-dual models do not replay one run.
    let salt = match sector.kind {
        SectorKind::BDefect => 0,
        SectorKind::ADefect => 1 << 16,
    };
    let mut points = Vec::new();
    for (li, &size) in params.sizes.iter().enumerate() {
        let template = SectorSimulator::new(params.dim, params.k, size, sector)?;
        let n = template.num_spins() as f64;
        let max_steps = (params.max_sweeps * n).ceil() as u64;
        let times: Vec<Option<f64>> = (0..params.trials)
            .into_par_iter()
            .map(|t| {
                let mut sim = template.clone();
                let mut rng = chain_rng(params.seed, salt | li, t);
                first_flip_time(&mut sim, max_steps, &mut rng).map(|s| s as f64 / n)
            })
            .collect();
        points.push(summarize(size, times, max_steps as f64 / n));
    }
    let trend = trend(&points);
    Ok(LifetimeReport { sector, points, trend })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryLabel {
    Quantum,
    Classical,
    None,
    Inconclusive,
}

/// Both sectors protected → quantum; exactly one → classical; neither →
/// none. An inconclusive sector makes the label inconclusive.
pub fn memory_classification(a_sector: Trend, b_sector: Trend) -> MemoryLabel {
    use Trend::*;
    match (a_sector, b_sector) {
        (Inconclusive, _) | (_, Inconclusive) => MemoryLabel::Inconclusive,
        (Increasing, Increasing) => MemoryLabel::Quantum,
        (Increasing, NotIncreasing) | (NotIncreasing, Increasing) => MemoryLabel::Classical,
        (NotIncreasing, NotIncreasing) => MemoryLabel::None,
    }
}

/// Number of logical classes per sector, `binom(D,k)`.
pub fn logical_classes(dim: usize, k: usize) -> usize {
    binomial(dim, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: SectorKind, temperature: f64) -> SectorSpec {
        SectorSpec { kind, temperature }
    }

    #[test]
    fn cold_trajectory_is_frozen() {
        let mut sim = SectorSimulator::new(2, 1, 4, spec(SectorKind::BDefect, 0.02)).unwrap();
        let mut rng = chain_rng(1, 0, 0);
        let tr = sector_trajectory(&mut sim, 100_000, &mut rng);
        assert!(tr.iter().all(|r| r.phi == 0 && r.winding == Some(0)));
    }

    #[test]
    fn flip_and_reverse() {
        let mut sim = SectorSimulator::new(2, 1, 4, spec(SectorKind::BDefect, 1.0)).unwrap();
        sim.flip(3);
        assert_eq!(sim.record().phi, 2);
        assert_eq!(sim.record().winding, None);
        sim.flip(3);
        assert_eq!(sim.record().winding, Some(0));
    }

    #[test]
    fn cocycle_error_winds() {
        // A full column of parallel edges crossing a cycle is syndrome-free
        // and nontrivial.
        let l = Lattice::new(LatticeSpec::new(2, 4).unwrap());
        let mut sim = SectorSimulator::new(2, 1, 4, spec(SectorKind::BDefect, 1.0)).unwrap();
        for c in crate::homology::flat_cocycle(&l, 1, 0b01) {
            sim.flip(c);
        }
        let r = sim.record();
        assert_eq!(r.phi, 0);
        assert_eq!(r.winding.unwrap().count_ones(), 1);
    }

    #[test]
    fn classification_table() {
        use Trend::*;
        assert_eq!(memory_classification(Increasing, Increasing), MemoryLabel::Quantum);
        assert_eq!(memory_classification(NotIncreasing, Increasing), MemoryLabel::Classical);
        assert_eq!(memory_classification(Increasing, NotIncreasing), MemoryLabel::Classical);
        assert_eq!(memory_classification(NotIncreasing, NotIncreasing), MemoryLabel::None);
        assert_eq!(
            memory_classification(Inconclusive, Increasing),
            MemoryLabel::Inconclusive
        );
    }

    #[test]
    fn all_censored_is_inconclusive() {
        let p = LifetimeParams {
            dim: 2,
            k: 1,
            sizes: vec![4, 6],
            trials: 20,
            max_sweeps: 0.1,
            seed: 0,
        };
        let r = lifetime_estimate(spec(SectorKind::BDefect, 0.05), &p).unwrap();
        assert_eq!(r.trend, Trend::Inconclusive);
        assert!(r.points.iter().all(|p| p.lower_bound));
        let mut bad = p.clone();
        bad.trials = 5;
        assert!(lifetime_estimate(spec(SectorKind::BDefect, 0.5), &bad).is_err());
    }

    #[test]
    fn dual_sector_uses_complementary_cells() {
        let s = SectorSimulator::new(3, 1, 3, spec(SectorKind::ADefect, 1.0)).unwrap();
        assert_eq!(s.num_spins(), 3 * 27);
        assert_eq!(s.classes(), logical_classes(3, 2));
    }
}
