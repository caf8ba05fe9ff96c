//! Metropolis sampling of the gauge theories GT^(D,k).
//!
//! Spins live on k-cells and every (k+1)-cell carries a term `B = ±1`. A
//! configuration has weight `e^{βμ M}`, `M = Σ B`. Sampling runs over all
//! spin configurations: gauge orbits have equal size, so gauge-invariant
//! observables are unbiased.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVec, Gf2Matrix, SpanBasis};
use crate::lattice::{CellId, DualCellId, Lattice, LatticeSpec, MAX_DIM};
use crate::partitions::PartitionEntry;
use crate::stats::{binning, jackknife, linear_fit, variance, LinearFit};

/// Sparse spin-term incidence.
#[derive(Clone, Debug)]
pub struct GaugeSystem {
    n_spins: usize,
    n_terms: usize,
    offsets: Vec<u32>,
    terms: Vec<u32>,
    max_degree: usize,
}

impl GaugeSystem {
    /// Rows of `defect` are terms, columns are spins.
    pub fn from_defect_matrix(defect: &Gf2Matrix) -> Self {
        let t = defect.transpose();
        let mut offsets = vec![0u32];
        let mut terms = Vec::new();
        let mut max_degree = 0;
        for s in 0..t.rows() {
            let row = t.row_vec(s);
            let before = terms.len();
            terms.extend(row.iter_ones().map(|r| r as u32));
            max_degree = max_degree.max(terms.len() - before);
            offsets.push(terms.len() as u32);
        }
        GaugeSystem {
            n_spins: defect.cols(),
            n_terms: defect.rows(),
            offsets,
            terms,
            max_degree,
        }
    }

    pub fn num_spins(&self) -> usize {
        self.n_spins
    }

    pub fn num_terms(&self) -> usize {
        self.n_terms
    }

    pub fn terms_of(&self, spin: usize) -> &[u32] {
        &self.terms[self.offsets[spin] as usize..self.offsets[spin + 1] as usize]
    }
}

/// A spin configuration with its term signs and magnetization cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinConfig {
    spins: Vec<bool>,
    signs: Vec<i8>,
    magnetization: i64,
}

impl SpinConfig {
    /// The unflipped configuration: every term satisfied.
    pub fn new(system: &GaugeSystem) -> Self {
        SpinConfig {
            spins: vec![false; system.n_spins],
            signs: vec![1; system.n_terms],
            magnetization: system.n_terms as i64,
        }
    }

    pub fn from_spins(system: &GaugeSystem, spins: &[bool]) -> Result<Self> {
        if spins.len() != system.n_spins {
            return Err(Error::arg(
                "state",
                format!("expected {} spins, got {}", system.n_spins, spins.len()),
            ));
        }
        let mut c = SpinConfig::new(system);
        for (s, &on) in spins.iter().enumerate() {
            if on {
                c.flip(system, s);
            }
        }
        Ok(c)
    }

    pub fn flip(&mut self, system: &GaugeSystem, spin: usize) {
        self.spins[spin] = !self.spins[spin];
        for &t in system.terms_of(spin) {
            let sg = &mut self.signs[t as usize];
            self.magnetization -= 2 * *sg as i64;
            *sg = -*sg;
        }
    }

    pub fn spins(&self) -> &[bool] {
        &self.spins
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn magnetization(&self) -> i64 {
        self.magnetization
    }

    /// Terms with `B = -1`.
    pub fn defects(&self) -> BitVec {
        BitVec::from_bools(&self.signs.iter().map(|&s| s < 0).collect::<Vec<_>>())
    }
}

/// One Metropolis sweep: `N` single-spin updates at uniformly random sites.
/// Flipping a spin changes `M` by `-2 Σ B` over its terms and is accepted
/// with `min(1, e^{βμ ΔM})`. A fixed visiting order would make the βμ = 0
/// dynamics deterministic. Returns the number of accepted flips.
pub fn mc_sweep<R: Rng>(system: &GaugeSystem, state: &mut SpinConfig, beta_mu: f64, rng: &mut R) -> usize {
    let deg = system.max_degree as i64;
    let table: Vec<f64> = (-deg..=deg)
        .map(|s| (-2.0 * beta_mu * s as f64).exp().min(1.0))
        .collect();
    let mut accepted = 0;
    for _ in 0..system.n_spins {
        let spin = rng.random_range(0..system.n_spins);
        let sum: i64 = system
            .terms_of(spin)
            .iter()
            .map(|&t| state.signs[t as usize] as i64)
            .sum();
        let p = table[(sum + deg) as usize];
        if p >= 1.0 || rng.random::<f64>() < p {
            state.flip(system, spin);
            accepted += 1;
        }
    }
    accepted
}

/// Run parameters. `sweeps` counts thermalization sweeps too.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McParams {
    pub seed: u64,
    pub sweeps: usize,
    pub thermalization: usize,
    pub stride: usize,
    pub beta_mu: Vec<f64>,
    pub chains: usize,
}

impl McParams {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps <= self.thermalization {
            return Err(Error::arg("sweeps", "must exceed the thermalization sweeps"));
        }
        if self.stride == 0 {
            return Err(Error::arg("stride", "must be at least 1"));
        }
        if self.chains == 0 {
            return Err(Error::arg("chains", "must be at least 1"));
        }
        if self.beta_mu.is_empty() {
            return Err(Error::arg("beta_mu", "grid is empty"));
        }
        if self.beta_mu.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::arg("beta_mu", "couplings must be finite and >= 0"));
        }
        if self.beta_mu.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("beta_mu", "grid must be strictly increasing"));
        }
        Ok(())
    }

    pub fn samples_per_chain(&self) -> usize {
        (self.sweeps - self.thermalization) / self.stride
    }
}

/// Independent stream for grid point `grid` and replica `chain`.
pub fn chain_rng(seed: u64, grid: usize, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((grid as u64) << 32) | chain as u64);
    rng
}

/// GT^(D,k) on a periodic lattice.
#[derive(Clone, Debug)]
pub struct GaugeModel {
    lattice: Lattice,
    k: usize,
    system: GaugeSystem,
    /// Coboundary on (k+1)-cells, for the closedness check.
    closure: Option<Gf2Matrix>,
}

impl GaugeModel {
    pub fn new(dim: usize, k: usize, size: usize) -> Result<Self> {
        let lattice = Lattice::new(LatticeSpec::new(dim, size)?);
        if k == 0 || k >= dim {
            return Err(Error::arg("k", format!("need 1 <= k <= D-1, got k={k} with D={dim}")));
        }
        let system = GaugeSystem::from_defect_matrix(&lattice.coboundary_matrix(k)?);
        let closure = if k + 1 < dim {
            Some(lattice.coboundary_matrix(k + 1)?)
        } else {
            None
        };
        Ok(GaugeModel {
            lattice,
            k,
            system,
            closure,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn system(&self) -> &GaugeSystem {
        &self.system
    }

    fn box_cells(&self, sides: &[usize]) -> Result<Vec<Vec<usize>>> {
        let d = self.lattice.dim();
        let l = self.lattice.size();
        if sides.iter().any(|&r| r == 0 || 2 * r > l) {
            return Err(Error::arg(
                "loop",
                format!("box sides {sides:?} must lie in 1..=L/2 = {}", l / 2),
            ));
        }
        let mut out = Vec::new();
        for &mask in self.lattice.masks(self.k + 1) {
            let axes: Vec<usize> = (0..d).filter(|a| mask >> a & 1 == 1).collect();
            for v in 0..self.lattice.num_vertices() {
                let origin = self.lattice.vertex_coords(v);
                let mut cells = Vec::new();
                let total: usize = sides.iter().product();
                for code in 0..total {
                    let mut base: [u16; MAX_DIM] = origin;
                    let mut rest = code;
                    for (i, &a) in axes.iter().enumerate() {
                        let off = rest % sides[i];
                        rest /= sides[i];
                        base[a] = ((origin[a] as usize + off) % l) as u16;
                    }
                    cells.push(self.lattice.index_of(&CellId::from_mask(base, mask)));
                }
                out.push(cells);
            }
        }
        Ok(out)
    }
}

/// Flipped (k+1)-cells, read as a (D-k-1)-chain of the dual lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectChain {
    pub cells: BitVec,
    pub dual_dim: usize,
}

impl DefectChain {
    pub fn is_empty(&self) -> bool {
        self.cells.is_zero()
    }

    pub fn len(&self) -> usize {
        self.cells.count_ones()
    }

    pub fn dual_cells(&self, lattice: &Lattice, k: usize) -> Vec<DualCellId> {
        self.cells
            .iter_ones()
            .map(|i| lattice.dual_cell(&lattice.cell(k + 1, i)))
            .collect()
    }
}

/// The flipped chain of a configuration. It is closed in the dual lattice,
/// i.e. every (k+2)-cell has an even number of flipped faces.
pub fn defect_chain(model: &GaugeModel, state: &SpinConfig) -> Result<DefectChain> {
    let cells = state.defects();
    if let Some(m) = &model.closure {
        if !m.mul_vec(&cells).is_zero() {
            return Err(Error::Invariant("flipped chain has a nonzero dual boundary".into()));
        }
    }
    Ok(DefectChain {
        cells,
        dual_dim: model.lattice.dim() - model.k - 1,
    })
}

/// Decides, for one partition entry, whether a defect chain avoids the
/// interface and, if so, whether its restriction to `D` is a boundary there.
#[derive(Clone, Debug)]
pub struct FractionProbe {
    interior: Vec<usize>,
    interface: Vec<usize>,
    boundaries: SpanBasis,
}

impl FractionProbe {
    pub fn new(lattice: &Lattice, k: usize, entry: &PartitionEntry) -> Result<Self> {
        let in_c = entry.region_c.mask();
        let n_top = lattice.num_cells(k + 1);
        let mut class = vec![0u8; n_top];
        let mut interior = Vec::new();
        let mut interface = Vec::new();
        let mut buf = Vec::new();
        for (c, cl) in class.iter_mut().enumerate() {
            buf.clear();
            lattice.cell_vertices(k + 1, c, &mut buf);
            let inside_d = buf.iter().filter(|&&v| !in_c[v]).count();
            if inside_d == buf.len() {
                *cl = 1;
                interior.push(c);
            } else if inside_d > 0 {
                interface.push(c);
            }
        }
        let mut pos = vec![usize::MAX; n_top];
        for (i, &c) in interior.iter().enumerate() {
            pos[c] = i;
        }
        let mut cols = Vec::new();
        let mut faces = Vec::new();
        for s in 0..lattice.num_cells(k) {
            faces.clear();
            lattice.coface_indices(k, s, &mut faces);
            if faces.iter().all(|&f| class[f] == 1) {
                let idx: Vec<usize> = faces.iter().map(|&f| pos[f]).collect();
                cols.push(BitVec::from_indices(interior.len(), &idx));
            }
        }
        Ok(FractionProbe {
            boundaries: SpanBasis::from_vectors(interior.len(), &cols),
            interior,
            interface,
        })
    }

    pub fn interface_len(&self) -> usize {
        self.interface.len()
    }

    pub fn interior_len(&self) -> usize {
        self.interior.len()
    }

    /// `None` when the chain touches the interface; otherwise whether its
    /// restriction to `D` is topologically nontrivial there.
    pub fn classify(&self, defects: &BitVec) -> Option<bool> {
        if self.interface.iter().any(|&c| defects.get(c)) {
            return None;
        }
        Some(!self.boundaries.contains(&defects.gather(&self.interior)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectFraction {
    pub total: usize,
    pub admissible: usize,
    pub nontrivial: usize,
    /// Undefined when no sample is admissible.
    pub fraction: Option<f64>,
    pub error: Option<f64>,
}

/// Fraction of admissible samples whose defects are nontrivial in `D`.
pub fn topological_defect_fraction(indicators: &[Option<bool>]) -> DefectFraction {
    let kept: Vec<f64> = indicators
        .iter()
        .flatten()
        .map(|&b| if b { 1.0 } else { 0.0 })
        .collect();
    let nontrivial = kept.iter().filter(|&&x| x > 0.0).count();
    let (fraction, error) = if kept.is_empty() {
        (None, None)
    } else {
        let p = nontrivial as f64 / kept.len() as f64;
        let err = match binning(&kept) {
            Ok(b) => b.error,
            Err(_) => (p * (1.0 - p) / kept.len() as f64).sqrt(),
        };
        (Some(p), Some(err))
    };
    DefectFraction {
        total: indicators.len(),
        admissible: kept.len(),
        nontrivial,
        fraction,
        error,
    }
}

/// What to record besides the magnetization.
#[derive(Clone, Debug, Default)]
pub struct MeasurementPlan {
    /// Box sides for Wilson loops (k=1) or flat brane boxes (k>1).
    pub wilson_sizes: Vec<usize>,
    pub fraction: Option<FractionProbe>,
}

/// Raw samples of one chain.
#[derive(Clone, Debug)]
pub struct ChainSamples {
    pub beta_mu: f64,
    pub grid_index: usize,
    pub chain: usize,
    pub acceptance: f64,
    pub magnetization: Vec<f64>,
    /// Per size: translation- and orientation-averaged box product per sample.
    pub wilson: Vec<Vec<f64>>,
    /// Same with one side shortened by one, for Creutz ratios.
    pub wilson_short: Vec<Vec<f64>>,
    pub fraction: Vec<Option<bool>>,
}

fn box_average(boxes: &[Vec<usize>], signs: &[i8]) -> f64 {
    let total: i64 = boxes
        .iter()
        .map(|cells| cells.iter().map(|&c| signs[c] as i64).product::<i64>())
        .sum();
    total as f64 / boxes.len() as f64
}

pub fn run_chain(
    model: &GaugeModel,
    params: &McParams,
    grid_index: usize,
    chain: usize,
    plan: &MeasurementPlan,
) -> Result<ChainSamples> {
    params.validate()?;
    let beta_mu = *params
        .beta_mu
        .get(grid_index)
        .ok_or_else(|| Error::arg("grid_index", "outside the coupling grid"))?;
    let kp1 = model.k + 1;
    let mut boxes = Vec::new();
    let mut short = Vec::new();
    for &r in &plan.wilson_sizes {
        boxes.push(model.box_cells(&vec![r; kp1])?);
        let mut s = vec![r; kp1];
        s[kp1 - 1] = r - 1;
        short.push(if r > 1 { model.box_cells(&s)? } else { Vec::new() });
    }
    let mut rng = chain_rng(params.seed, grid_index, chain);
    let sys = &model.system;
    let mut state = SpinConfig::new(sys);
    let mut accepted = 0usize;
    let n = params.samples_per_chain();
    let mut out = ChainSamples {
        beta_mu,
        grid_index,
        chain,
        acceptance: 0.0,
        magnetization: Vec::with_capacity(n),
        wilson: vec![Vec::with_capacity(n); boxes.len()],
        wilson_short: vec![Vec::with_capacity(n); boxes.len()],
        fraction: Vec::new(),
    };
    for sweep in 0..params.sweeps {
        let a = mc_sweep(sys, &mut state, beta_mu, &mut rng);
        if sweep < params.thermalization {
            continue;
        }
        accepted += a;
        if !(sweep - params.thermalization + 1).is_multiple_of(params.stride) {
            continue;
        }
        out.magnetization.push(state.magnetization as f64);
        for (i, b) in boxes.iter().enumerate() {
            out.wilson[i].push(box_average(b, &state.signs));
            if !short[i].is_empty() {
                out.wilson_short[i].push(box_average(&short[i], &state.signs));
            }
        }
        if let Some(p) = &plan.fraction {
            out.fraction.push(p.classify(&state.defects()));
        }
    }
    out.acceptance = accepted as f64 / ((params.sweeps - params.thermalization) * sys.n_spins) as f64;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyObservables {
    /// `-⟨M⟩/N` in units of μ.
    pub energy_per_term: f64,
    pub energy_error: f64,
    /// `(βμ)² var(M) / N`.
    pub specific_heat: f64,
    pub specific_heat_error: f64,
    pub tau_int: f64,
}

pub fn energy_observables(beta_mu: f64, magnetization: &[f64], n_terms: usize) -> Result<EnergyObservables> {
    let b = binning(magnetization)?;
    let n = n_terms as f64;
    let (c, c_err) = jackknife(magnetization, 32, |xs| beta_mu * beta_mu * variance(xs) / n)?;
    Ok(EnergyObservables {
        energy_per_term: -b.mean / n,
        energy_error: b.error / n,
        specific_heat: c,
        specific_heat_error: c_err,
        tau_int: b.tau_int,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LawPreference {
    Area,
    Perimeter,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilsonLadder {
    pub sizes: Vec<usize>,
    pub means: Vec<f64>,
    pub errors: Vec<f64>,
    /// Creutz-style ratio `-ln(W(R)W(R-1) / W(R,R-1)²)` for `R >= 2`.
    pub creutz: Vec<Option<f64>>,
    pub area_fit: Option<LinearFit>,
    pub perimeter_fit: Option<LinearFit>,
    pub preferred: LawPreference,
}

/// Wilson-loop ladder with area- and perimeter-law fits compared by AIC.
/// For k-branes the box volume `R^{k+1}` and surface `2(k+1)R^k` play the
/// roles of area and perimeter.
pub fn wilson_estimator(k: usize, samples: &ChainSamples, sizes: &[usize]) -> Result<WilsonLadder> {
    let mut means = Vec::new();
    let mut errors = Vec::new();
    for series in &samples.wilson {
        let b = binning(series)?;
        means.push(b.mean);
        errors.push(b.error);
    }
    let creutz = sizes
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if r < 2 || i == 0 || sizes[i - 1] != r - 1 {
                return None;
            }
            let short = crate::stats::mean(&samples.wilson_short[i]);
            let v = means[i] * means[i - 1] / (short * short);
            (v > 0.0).then(|| -v.ln())
        })
        .collect();
    let kp1 = (k + 1) as i32;
    let pos: Vec<usize> = (0..sizes.len()).filter(|&i| means[i] > 0.0).collect();
    let (area_fit, perimeter_fit, preferred) = if pos.len() >= 3 {
        let y: Vec<f64> = pos.iter().map(|&i| means[i].ln()).collect();
        let area: Vec<f64> = pos.iter().map(|&i| (sizes[i] as f64).powi(kp1)).collect();
        let per: Vec<f64> = pos
            .iter()
            .map(|&i| 2.0 * (k + 1) as f64 * (sizes[i] as f64).powi(kp1 - 1))
            .collect();
        let a = linear_fit(&area, &y)?;
        let p = linear_fit(&per, &y)?;
        let pref = if p.aic() < a.aic() {
            LawPreference::Perimeter
        } else {
            LawPreference::Area
        };
        (Some(a), Some(p), pref)
    } else {
        (None, None, LawPreference::Undetermined)
    };
    Ok(WilsonLadder {
        sizes: sizes.to_vec(),
        means,
        errors,
        creutz,
        area_fit,
        perimeter_fit,
        preferred,
    })
}

/// One (βμ, chain) row of analysed observables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableRow {
    pub beta_mu: f64,
    pub chain: usize,
    pub samples: usize,
    pub acceptance: f64,
    pub energy: EnergyObservables,
    pub wilson: Option<WilsonLadder>,
    pub defect_fraction: Option<DefectFraction>,
}

/// Runs every (grid point, chain) pair and analyses it. Rows come back in
/// grid-major order regardless of scheduling.
pub fn simulate(model: &GaugeModel, params: &McParams, plan: &MeasurementPlan) -> Result<Vec<ObservableRow>> {
    params.validate()?;
    let jobs: Vec<(usize, usize)> = (0..params.beta_mu.len())
        .flat_map(|g| (0..params.chains).map(move |c| (g, c)))
        .collect();
    jobs.par_iter()
        .map(|&(g, c)| {
            let s = run_chain(model, params, g, c, plan)?;
            let energy = energy_observables(s.beta_mu, &s.magnetization, model.system.n_terms)?;
            let wilson = if plan.wilson_sizes.is_empty() {
                None
            } else {
                Some(wilson_estimator(model.k, &s, &plan.wilson_sizes)?)
            };
            let defect_fraction = plan.fraction.as_ref().map(|_| topological_defect_fraction(&s.fraction));
            Ok(ObservableRow {
                beta_mu: s.beta_mu,
                chain: c,
                samples: s.magnetization.len(),
                acceptance: s.acceptance,
                energy,
                wilson,
                defect_fraction,
            })
        })
        .collect()
}

/// Chain-averaged specific heat per grid point, with errors combined in
/// quadrature.
pub fn specific_heat_curve(rows: &[ObservableRow], grid: &[f64]) -> Vec<(f64, f64, f64)> {
    grid.iter()
        .map(|&b| {
            let r: Vec<&ObservableRow> = rows.iter().filter(|r| r.beta_mu == b).collect();
            let n = r.len() as f64;
            let c = r.iter().map(|x| x.energy.specific_heat).sum::<f64>() / n;
            let e = r
                .iter()
                .map(|x| x.energy.specific_heat_error.powi(2))
                .sum::<f64>()
                .sqrt()
                / n;
            (b, c, e)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub beta_mu_crit: f64,
    pub bracket: (f64, f64),
    /// Peak at the edge of the grid.
    pub inconclusive: bool,
    /// `k = D-1`: deconfined down to zero temperature, no sampling done.
    pub by_rule: bool,
}

/// Specific-heat peak over the grid; `k = D-1` sectors return 0 (in `t`,
/// i.e. `βμ = ∞`) without sampling.
pub fn locate_transition(model: &GaugeModel, params: &McParams) -> Result<TransitionEstimate> {
    if model.k + 1 == model.lattice.dim() {
        return Ok(TransitionEstimate::DECONFINED);
    }
    let rows = simulate(model, params, &MeasurementPlan::default())?;
    Ok(transition_from_rows(model, &rows, &params.beta_mu))
}

/// Transition estimate from already simulated rows.
pub fn transition_from_rows(model: &GaugeModel, rows: &[ObservableRow], grid: &[f64]) -> TransitionEstimate {
    if model.k + 1 == model.lattice.dim() {
        return TransitionEstimate::DECONFINED;
    }
    let curve = specific_heat_curve(rows, grid);
    let (imax, _) = curve.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, &(_, c, _))| if c > acc.1 { (i, c) } else { acc },
    );
    let g = grid;
    let lo = g[imax.saturating_sub(1)];
    let hi = g[(imax + 1).min(g.len() - 1)];
    // Vertex of the parabola through the peak and its neighbours.
    let mut est = g[imax];
    if imax > 0 && imax + 1 < g.len() {
        let (x0, y0) = (g[imax - 1], curve[imax - 1].1);
        let (x1, y1) = (g[imax], curve[imax].1);
        let (x2, y2) = (g[imax + 1], curve[imax + 1].1);
        let den = (x0 - x1) * (x0 - x2) * (x1 - x2);
        let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
        let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
        if a < 0.0 {
            est = (-b / (2.0 * a)).clamp(lo, hi);
        }
    }
    TransitionEstimate {
        beta_mu_crit: est,
        bracket: (lo, hi),
        inconclusive: imax == 0 || imax + 1 == g.len(),
        by_rule: false,
    }
}

/// `t_crit = T/μ` at the transition; 0 for deconfined-at-zero-temperature
/// sectors.
impl TransitionEstimate {
    const DECONFINED: TransitionEstimate = TransitionEstimate {
        beta_mu_crit: f64::INFINITY,
        bracket: (f64::INFINITY, f64::INFINITY),
        inconclusive: false,
        by_rule: true,
    };

    pub fn t_crit(&self) -> f64 {
        1.0 / self.beta_mu_crit
    }
}
