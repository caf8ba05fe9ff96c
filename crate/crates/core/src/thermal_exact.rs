//! Exact finite-temperature quantities on micro lattices.
//!
//! A *sector* is one family of commuting terms: a defect map from spin
//! flips to violated terms, plus the generators of the gauge group that
//! leaves the state invariant. The plaquette sector of T^(D,k) has defect
//! map `∂_{k+1}^T` and gauge generators the stars; the star sector swaps the
//! two. A configuration `f` with `Φ(f)` violated terms has magnetization
//! `M(f) = N - 2Φ(f)` and Boltzmann weight `e^{βJ M(f)}`; sums are carried
//! out with the scaled weight `x^{Φ(f)}`, `x = e^{-2βJ}`.
//!
//! Every enumeration is gated by [`ENUMERATION_BUDGET_LOG2`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{for_each_in_span, weight_distribution, BitVec, Gf2Matrix, SpanBasis};
use crate::lattice::Lattice;
use crate::partitions::PartitionScheme;
use crate::stabilizer::{generators, ModelSpec};

/// Largest log2 size of any exact enumeration.
pub const ENUMERATION_BUDGET_LOG2: usize = 25;

fn budget(what: &'static str, log2_size: usize) -> Result<()> {
    if log2_size > ENUMERATION_BUDGET_LOG2 {
        return Err(Error::Budget {
            what,
            measured: log2_size,
            budget: ENUMERATION_BUDGET_LOG2,
        });
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::arg(
            "beta",
            format!("inverse temperature must be finite and >= 0, got {beta}"),
        ));
    }
    Ok(())
}

/// `ln Σ exp(v)` over a slice, stable for large magnitudes.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Σ_w counts[w] x^w.
fn eval_poly(counts: &[u64], x: f64) -> f64 {
    counts.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
}

/// One family of commuting terms.
#[derive(Clone, Debug)]
pub struct Sector {
    /// Rows: defect cells; columns: spins.
    pub defect: Gf2Matrix,
    /// Rows: gauge generators; columns: spins.
    pub gauge: Gf2Matrix,
    /// Energy scale J of each term.
    pub coupling: f64,
}

impl Sector {
    /// Plaquette terms of T^(D,k) with coupling μ; the stars are the gauge.
    pub fn plaquette(lattice: &Lattice, k: usize, mu: f64) -> Result<Self> {
        let g = generators(lattice, k)?;
        Sector::new(g.plaquette, g.star, mu)
    }

    /// Star terms of T^(D,k) with coupling λ; the plaquettes are the gauge.
    pub fn star(lattice: &Lattice, k: usize, lambda: f64) -> Result<Self> {
        let g = generators(lattice, k)?;
        Sector::new(g.star, g.plaquette, lambda)
    }

    pub fn new(defect: Gf2Matrix, gauge: Gf2Matrix, coupling: f64) -> Result<Self> {
        if defect.cols() != gauge.cols() {
            return Err(Error::arg(
                "sector",
                "defect map and gauge generators act on different spin sets",
            ));
        }
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(Error::arg(
                "coupling",
                format!("must be positive and finite, got {coupling}"),
            ));
        }
        Ok(Sector {
            defect,
            gauge,
            coupling,
        })
    }

    pub fn num_spins(&self) -> usize {
        self.defect.cols()
    }

    pub fn num_terms(&self) -> usize {
        self.defect.rows()
    }

    /// Achievable defect patterns: a basis of the image of the defect map.
    pub fn syndrome_basis(&self) -> Vec<BitVec> {
        self.defect.column_space_basis()
    }

    /// Number of achievable defect patterns of each weight.
    pub fn weight_enumerator(&self) -> Result<Vec<u64>> {
        let basis = self.syndrome_basis();
        budget("defect-pattern enumeration", basis.len())?;
        weight_distribution(self.num_terms(), &basis, ENUMERATION_BUDGET_LOG2)
    }

    fn x(&self, beta: f64) -> f64 {
        (-2.0 * beta * self.coupling).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionFunction {
    pub ln_z: f64,
}

impl PartitionFunction {
    pub fn value(&self) -> f64 {
        self.ln_z.exp()
    }
}

/// `ln Σ_{s ∈ im} e^{βJ(N - 2|s|)}` for one sector.
fn ln_syndrome_sum(sector: &Sector, beta: f64) -> Result<f64> {
    let counts = sector.weight_enumerator()?;
    let n = sector.num_terms() as f64;
    let terms: Vec<f64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(w, &c)| (c as f64).ln() + beta * sector.coupling * (n - 2.0 * w as f64))
        .collect();
    Ok(log_sum_exp(&terms))
}

/// Gauge-theory partition function `(1/|G|) Σ_f e^{βJ M(f)}`.
pub fn gauge_partition_function(sector: &Sector, beta: f64) -> Result<PartitionFunction> {
    check_beta(beta)?;
    let r_def = sector.defect.rank();
    let r_gauge = sector.gauge.rank();
    let mult = (sector.num_spins() as f64 - r_def as f64 - r_gauge as f64) * std::f64::consts::LN_2;
    Ok(PartitionFunction {
        ln_z: mult + ln_syndrome_sum(sector, beta)?,
    })
}

/// Full-code `Tr e^{-βH}` with `H = -λ Σ A - μ Σ B`, assembled from the
/// two syndrome groups with uniform multiplicity `2^{n - rA - rB}`.
pub fn full_partition_function(
    lattice: &Lattice,
    k: usize,
    beta: f64,
    lambda: f64,
    mu: f64,
) -> Result<PartitionFunction> {
    check_beta(beta)?;
    let a = Sector::star(lattice, k, lambda)?;
    let b = Sector::plaquette(lattice, k, mu)?;
    let ra = a.defect.rank();
    let rb = b.defect.rank();
    let mult = (lattice.num_cells(k) as f64 - ra as f64 - rb as f64) * std::f64::consts::LN_2;
    Ok(PartitionFunction {
        ln_z: mult + ln_syndrome_sum(&a, beta)? + ln_syndrome_sum(&b, beta)?,
    })
}

/// Thermal mean of `-M/N` (energy per term in units of J) in the gauge theory.
pub fn exact_energy_per_term(sector: &Sector, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let counts = sector.weight_enumerator()?;
    let n = sector.num_terms() as f64;
    let logs: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(w, &c)| {
            let m = n - 2.0 * w as f64;
            ((c as f64).ln() + beta * sector.coupling * m, m)
        })
        .collect();
    let top = logs.iter().map(|l| l.0).fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (l, m) in logs {
        let w = (l - top).exp();
        num += w * m;
        den += w;
    }
    Ok(-num / den / n)
}

/// `W = Σ_{f ∈ F/𝒢} x^{Φ(f)}`, one term per achievable defect pattern.
pub fn exact_w(sector: &Sector, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(eval_poly(&sector.weight_enumerator()?, sector.x(beta)))
}

/// Closed form of the (2,1) weight enumerator, `((1+x)^N + (1-x)^N)/2`,
/// as integer coefficients.
pub fn even_subset_enumerator(n: usize) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row.iter()
        .enumerate()
        .map(|(w, &c)| if w % 2 == 0 { c } else { 0 })
        .collect()
}

fn split(mask: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let c = (0..mask.len()).filter(|&i| mask[i]).collect();
    let d = (0..mask.len()).filter(|&i| !mask[i]).collect();
    (c, d)
}

fn check_region(sector: &Sector, spins_c: &[bool]) -> Result<()> {
    if spins_c.len() != sector.num_spins() {
        return Err(Error::arg(
            "region",
            format!("expected a mask over {} spins", sector.num_spins()),
        ));
    }
    Ok(())
}

/// Gray-code walk over all subsets of `coords`, yielding the running
/// defect pattern (XOR of the defect columns of the chosen spins).
fn walk_subsets<F: FnMut(&BitVec, usize)>(columns: &[BitVec], coords: &[usize], start: &BitVec, mut f: F) {
    let mut cur = start.clone();
    f(&cur, 0);
    let total = 1u64 << coords.len();
    let mut gray = 0u64;
    for i in 1..total {
        let bit = i.trailing_zeros() as usize;
        gray ^= 1 << bit;
        cur.xor_assign(&columns[coords[bit]]);
        f(&cur, gray as usize);
    }
}

fn defect_columns(sector: &Sector) -> Vec<BitVec> {
    let t = sector.defect.transpose();
    (0..sector.num_spins()).map(|c| t.row_vec(c)).collect()
}

/// One element of `F_i` with its replica weight.
#[derive(Clone, Debug)]
pub struct QEntry {
    /// The flip, as a spin vector supported in `C`.
    pub flip: BitVec,
    /// `ln q_i(f)` with `q_i(f) = Σ_{e ∈ E_i} e^{βJ M(fe)}`.
    pub ln_q: f64,
    /// `p_i(f) = q_i(f) / (|G| Z)`.
    pub p: f64,
}

/// `q_i` and `p_i` over all flips supported in `C`.
pub fn q_distribution(sector: &Sector, spins_c: &[bool], beta: f64) -> Result<Vec<QEntry>> {
    check_beta(beta)?;
    check_region(sector, spins_c)?;
    budget("spin-flip enumeration", sector.num_spins())?;
    let (c, d) = split(spins_c);
    let cols = defect_columns(sector);
    let x = sector.x(beta);
    let n_terms = sector.num_terms();
    let pow: Vec<f64> = (0..=n_terms).map(|w| x.powi(w as i32)).collect();
    let zero = BitVec::zeros(n_terms);
    let mut scaled = vec![0.0f64; 1 << c.len()];
    walk_subsets(&cols, &c, &zero, |s_f, code| {
        let mut acc = 0.0;
        walk_subsets(&cols, &d, s_f, |s, _| acc += pow[s.count_ones()]);
        scaled[code] = acc;
    });
    let total: f64 = scaled.iter().sum();
    let shift = beta * sector.coupling * n_terms as f64;
    Ok(scaled
        .iter()
        .enumerate()
        .map(|(code, &q)| {
            let ones: Vec<usize> = (0..c.len()).filter(|b| code >> b & 1 == 1).map(|b| c[b]).collect();
            QEntry {
                flip: BitVec::from_indices(sector.num_spins(), &ones),
                ln_q: q.ln() + shift,
                p: q / total,
            }
        })
        .collect())
}

/// `log2 |G_i|`: gauge transformations supported in `C`.
pub fn log2_gauge_in_region(sector: &Sector, spins_c: &[bool]) -> usize {
    let (_, d) = split(spins_c);
    sector.gauge.rank() - sector.gauge.select_cols(&d).rank()
}

fn shannon(ps: impl IntoIterator<Item = f64>) -> f64 {
    ps.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

/// Entanglement entropy (nats) of `C` in the thermal gauge-theory state,
/// `-ln|G_i| + ln(|G|Z) - Σ q ln q / (|G|Z) = -ln|G_i| - Σ p ln p`.
pub fn gauge_entanglement_entropy(sector: &Sector, spins_c: &[bool], beta: f64) -> Result<f64> {
    let inside = spins_c.iter().filter(|&&b| b).count();
    if inside == 0 || inside == spins_c.len() {
        return Err(Error::arg("region", "region must be a nonempty proper subset"));
    }
    let q = q_distribution(sector, spins_c, beta)?;
    let log_gi = log2_gauge_in_region(sector, spins_c) as f64 * std::f64::consts::LN_2;
    Ok(-log_gi + shannon(q.iter().map(|e| e.p)))
}

/// Coset data of one bipartition.
#[derive(Clone, Debug)]
pub struct CosetTables {
    pub log2_f: usize,
    pub log2_f_i: usize,
    pub log2_e_i: usize,
    /// `𝒢`: flips leaving every term invariant.
    pub log2_gauge_full: usize,
    /// `𝓗_i = 𝒢 ∩ E_i`.
    pub log2_h_i: usize,
    /// `K_i`: flips in `C` completable inside `D` to an element of `𝒢`.
    pub log2_k_i: usize,
    /// Representatives of `F_i / K_i`, supported in `C`.
    pub f_tilde_i: Vec<BitVec>,
    /// Representatives of `E_i / 𝓗_i`, supported in `D`.
    pub e_tilde_i: Vec<BitVec>,
}

impl CosetTables {
    pub fn log2_f_tilde(&self) -> usize {
        self.log2_f - self.log2_gauge_full
    }
}

fn non_pivot_subsets(coords: &[usize], pivots: &[usize], n: usize) -> Vec<BitVec> {
    let free: Vec<usize> = (0..coords.len())
        .filter(|i| !pivots.contains(i))
        .map(|i| coords[i])
        .collect();
    (0..1u64 << free.len())
        .map(|code| {
            let ones: Vec<usize> = (0..free.len())
                .filter(|b| code >> b & 1 == 1)
                .map(|b| free[b])
                .collect();
            BitVec::from_indices(n, &ones)
        })
        .collect()
}

pub fn coset_tables(sector: &Sector, spins_c: &[bool]) -> Result<CosetTables> {
    check_region(sector, spins_c)?;
    let n = sector.num_spins();
    let (c, d) = split(spins_c);
    let kernel = sector.defect.kernel_basis();
    let restricted: Vec<BitVec> = kernel.iter().map(|g| g.gather(&c)).collect();
    let k_span = SpanBasis::from_vectors(c.len(), &restricted);
    let log2_k_i = k_span.dim();
    // Combinations of kernel vectors that vanish on C span 𝒢 ∩ E_i.
    let combos = Gf2Matrix::from_cols(c.len(), &restricted).kernel_basis();
    let h_vectors: Vec<BitVec> = combos
        .iter()
        .map(|comb| {
            let mut v = BitVec::zeros(n);
            for j in comb.iter_ones() {
                v.xor_assign(&kernel[j]);
            }
            v.gather(&d)
        })
        .collect();
    let h_span = SpanBasis::from_vectors(d.len(), &h_vectors);
    let log2_h_i = h_span.dim();
    let log2_f_i_tilde = c.len() - log2_k_i;
    let log2_e_i_tilde = d.len() - log2_h_i;
    budget("coset representatives", log2_f_i_tilde.max(log2_e_i_tilde))?;
    Ok(CosetTables {
        log2_f: n,
        log2_f_i: c.len(),
        log2_e_i: d.len(),
        log2_gauge_full: kernel.len(),
        log2_h_i,
        log2_k_i,
        f_tilde_i: non_pivot_subsets(&c, k_span.pivots(), n),
        e_tilde_i: non_pivot_subsets(&d, h_span.pivots(), n),
    })
}

/// `Σ_{f ∈ F̃_i} p̃ ln p̃` from coset representatives (spin route), and the
/// normalization `W` it implies.
fn coset_entropy_term(sector: &Sector, tables: &CosetTables, beta: f64) -> (f64, f64) {
    let x = sector.x(beta);
    let pow: Vec<f64> = (0..=sector.num_terms()).map(|w| x.powi(w as i32)).collect();
    let e_syn: Vec<BitVec> = tables.e_tilde_i.iter().map(|e| sector.defect.mul_vec(e)).collect();
    let sums: Vec<f64> = tables
        .f_tilde_i
        .iter()
        .map(|f| {
            let sf = sector.defect.mul_vec(f);
            e_syn
                .iter()
                .map(|se| {
                    let mut s = sf.clone();
                    s.xor_assign(se);
                    pow[s.count_ones()]
                })
                .sum()
        })
        .collect();
    let w: f64 = sums.iter().sum();
    let ent: f64 = sums
        .iter()
        .map(|&q| q / w)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum();
    (ent, w)
}

fn check_scheme(sector: &Sector, scheme: &PartitionScheme) -> Result<()> {
    for e in &scheme.entries {
        check_region(sector, &e.spins_c)?;
    }
    if scheme.is_empty() {
        return Err(Error::arg("scheme", "partition scheme has no entries"));
    }
    Ok(())
}

/// `Q_top` through the non-redundant distributions `p̃_i` over `F̃_i`.
pub fn qtop_route_a(sector: &Sector, scheme: &PartitionScheme, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    check_scheme(sector, scheme)?;
    let mut q = std::f64::consts::LN_2;
    for e in &scheme.entries {
        let tables = coset_tables(sector, &e.spins_c)?;
        let (ent, _) = coset_entropy_term(sector, &tables, beta);
        q -= e.sign as f64 * ent;
    }
    Ok(q)
}

/// `Q_top = ln 2 - Σ_{f ∈ F̃} r(f) ln(s₊(f)/s₋(f))`, enumerating defect
/// patterns directly.
pub fn qtop_route_b(sector: &Sector, scheme: &PartitionScheme, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    check_scheme(sector, scheme)?;
    let n_terms = sector.num_terms();
    let x = sector.x(beta);
    let ln_x = -2.0 * beta * sector.coupling;
    let pow: Vec<f64> = (0..=n_terms).map(|w| x.powi(w as i32)).collect();
    let all = sector.syndrome_basis();
    budget("defect-pattern enumeration", all.len())?;
    let d_bases: Vec<Vec<BitVec>> = scheme
        .entries
        .iter()
        .map(|e| {
            let (_, d) = split(&e.spins_c);
            sector.defect.select_cols(&d).column_space_basis()
        })
        .collect();
    let mut w = 0.0;
    for_each_in_span(n_terms, &all, ENUMERATION_BUDGET_LOG2, |s| w += pow[s.count_ones()])?;
    let mut acc = 0.0;
    let mut err = None;
    for_each_in_span(n_terms, &all, ENUMERATION_BUDGET_LOG2, |s| {
        let r = pow[s.count_ones()] / w;
        if r == 0.0 {
            return;
        }
        let mut ln_ratio = 0.0;
        for (e, basis) in scheme.entries.iter().zip(&d_bases) {
            let mut sum = 0.0;
            let res = for_each_in_span(n_terms, basis, ENUMERATION_BUDGET_LOG2, |t| {
                let mut u = s.clone();
                u.xor_assign(t);
                sum += pow[u.count_ones()];
            });
            if let Err(e) = res {
                err = Some(e);
                return;
            }
            // Factor out x^{|s|} so the ratio stays finite at large β.
            ln_ratio += e.sign as f64 * (sum.ln() - s.count_ones() as f64 * ln_x);
        }
        acc += r * ln_ratio;
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(std::f64::consts::LN_2 - acc)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QtopReport {
    pub beta: f64,
    pub route_a: f64,
    pub route_b: f64,
    /// Set when the scheme lacks a separating collar.
    pub degenerate_geometry: bool,
}

pub fn qtop_exact(sector: &Sector, scheme: &PartitionScheme, beta: f64) -> Result<QtopReport> {
    Ok(QtopReport {
        beta,
        route_a: qtop_route_a(sector, scheme, beta)?,
        route_b: qtop_route_b(sector, scheme, beta)?,
        degenerate_geometry: scheme.degenerate,
    })
}

/// `S_top(T) = Q^(D,D-k)(T/λ) + Q^(D,k)(T/μ)` in nats, the first term
/// evaluated on the star sector.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FiniteTemperatureEntropy {
    pub q_star: f64,
    pub q_plaquette: f64,
    pub total_nats: f64,
    pub total_log2: f64,
}

pub fn stop_finite_t(model: &ModelSpec, scheme: &PartitionScheme, beta: f64) -> Result<FiniteTemperatureEntropy> {
    model.validate()?;
    let lattice = Lattice::new(model.lattice_spec());
    let a = Sector::star(&lattice, model.k, model.lambda)?;
    let b = Sector::plaquette(&lattice, model.k, model.mu)?;
    let q_star = qtop_route_b(&a, scheme, beta)?;
    let q_plaquette = qtop_route_b(&b, scheme, beta)?;
    let total = q_star + q_plaquette;
    Ok(FiniteTemperatureEntropy {
        q_star,
        q_plaquette,
        total_nats: total,
        total_log2: total / std::f64::consts::LN_2,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DualityReport {
    pub ln_z_primal: f64,
    pub ln_z_dual: f64,
    pub z_primal: f64,
    pub z_dual: f64,
    pub relative_difference: f64,
    pub passed: bool,
}

/// Compares `Z^(D,k)(β; λ, μ)` with `Z^(D,D-k)(β; μ, λ)`, each enumerated on
/// its own lattice.
pub fn duality_check(model: &ModelSpec, beta: f64) -> Result<DualityReport> {
    model.validate()?;
    let lattice = Lattice::new(model.lattice_spec());
    let dual = model.dual();
    let zp = full_partition_function(&lattice, model.k, beta, model.lambda, model.mu)?;
    let zd = full_partition_function(&lattice, dual.k, beta, dual.lambda, dual.mu)?;
    let rel = (zp.ln_z - zd.ln_z).exp_m1().abs();
    Ok(DualityReport {
        ln_z_primal: zp.ln_z,
        ln_z_dual: zd.ln_z,
        z_primal: zp.value(),
        z_dual: zd.value(),
        relative_difference: rel,
        passed: rel < 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;
    use crate::partitions::{build_partitions_relaxed, build_partitions_slabs};

    fn lat(d: usize, l: usize) -> Lattice {
        Lattice::new(LatticeSpec::new(d, l).unwrap())
    }

    #[test]
    fn gauge_z_at_infinite_temperature() {
        let s = Sector::plaquette(&lat(2, 2), 1, 1.0).unwrap();
        let z = gauge_partition_function(&s, 0.0).unwrap();
        assert!((z.value() - 32.0).abs() < 1e-9);
    }

    #[test]
    fn gauge_z_low_temperature_counts_vacua() {
        let s = Sector::plaquette(&lat(2, 2), 1, 1.0).unwrap();
        let beta = 30.0;
        let z = gauge_partition_function(&s, beta).unwrap();
        let classes = (z.ln_z - beta * 4.0).exp();
        // 2^{n - rA - rB} = 2^{8 - 3 - 3}
        assert!((classes - 4.0).abs() < 1e-9);
    }

    #[test]
    fn w_for_smallest_torus() {
        let s = Sector::plaquette(&lat(2, 2), 1, 1.0).unwrap();
        assert_eq!(s.weight_enumerator().unwrap(), vec![1, 0, 6, 0, 1]);
        assert_eq!(even_subset_enumerator(4), vec![1, 0, 6, 0, 1]);
        assert!((exact_w(&s, 0.0).unwrap() - 8.0).abs() < 1e-12);
        assert!((exact_w(&s, 40.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_normalization() {
        let l = lat(2, 2);
        let s = Sector::plaquette(&l, 1, 1.0).unwrap();
        let mut c = vec![false; 8];
        c[0] = true;
        c[4] = true;
        let beta = 0.4;
        let q = q_distribution(&s, &c, beta).unwrap();
        let total: f64 = q.iter().map(|e| e.p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let ln_gz = gauge_partition_function(&s, beta).unwrap().ln_z + 3.0 * std::f64::consts::LN_2;
        let sum_q: f64 = q.iter().map(|e| (e.ln_q - ln_gz).exp()).sum();
        assert!((sum_q - 1.0).abs() < 1e-12);
        let uniform = q_distribution(&s, &c, 0.0).unwrap();
        assert!(uniform.iter().all(|e| (e.p - 0.25).abs() < 1e-12));
    }

    #[test]
    fn coset_table_sizes() {
        let l = lat(2, 3);
        let s = Sector::plaquette(&l, 1, 1.0).unwrap();
        let scheme = build_partitions_relaxed(&l, 1, 3).unwrap();
        for e in &scheme.entries {
            let t = coset_tables(&s, &e.spins_c).unwrap();
            assert_eq!(t.log2_k_i + t.log2_h_i, t.log2_gauge_full);
            assert_eq!(t.log2_f_tilde(), (t.log2_f_i - t.log2_k_i) + (t.log2_e_i - t.log2_h_i));
            assert_eq!(t.f_tilde_i.len(), 1 << (t.log2_f_i - t.log2_k_i));
        }
    }

    #[test]
    fn routes_agree_and_limits() {
        let l = lat(2, 3);
        let s = Sector::plaquette(&l, 1, 1.0).unwrap();
        let scheme = build_partitions_relaxed(&l, 1, 3).unwrap();
        for beta in [0.2, 0.5, 1.0] {
            let r = qtop_exact(&s, &scheme, beta).unwrap();
            assert!((r.route_a - r.route_b).abs() < 1e-9, "{r:?}");
            assert!(r.degenerate_geometry);
        }
        let cold = qtop_route_b(&s, &scheme, 20.0).unwrap();
        assert!((cold - std::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn routes_agree_on_smallest_torus() {
        let l = lat(2, 2);
        let s = Sector::plaquette(&l, 1, 1.0).unwrap();
        let scheme = build_partitions_slabs(&l, 1).unwrap();
        for beta in [0.0, 0.2, 0.5, 1.0, 20.0] {
            let r = qtop_exact(&s, &scheme, beta).unwrap();
            assert!((r.route_a - r.route_b).abs() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn w_matches_even_subsets_on_three_torus() {
        let s = Sector::plaquette(&lat(2, 3), 1, 1.0).unwrap();
        let counts = s.weight_enumerator().unwrap();
        assert_eq!(counts, even_subset_enumerator(9));
        let x = (-1.0f64).exp();
        let closed = ((1.0 + x).powi(9) + (1.0 - x).powi(9)) / 2.0;
        assert!((exact_w(&s, 0.5).unwrap() - closed).abs() < 1e-12 * closed);
    }

    #[test]
    fn infinite_temperature_is_a_rank_count() {
        let l = lat(2, 3);
        let s = Sector::plaquette(&l, 1, 1.0).unwrap();
        let scheme = build_partitions_relaxed(&l, 1, 3).unwrap();
        let signed: i64 = scheme
            .entries
            .iter()
            .map(|e| e.sign as i64 * s.defect.select_cols(&e.spins_d_indices()).rank() as i64)
            .sum();
        let q = qtop_route_a(&s, &scheme, 0.0).unwrap();
        assert!((q - (1 - signed) as f64 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn energy_of_independent_plaquettes() {
        // Away from the global parity constraint each plaquette is ±1 with mean tanh(βμ).
        let s = Sector::plaquette(&lat(2, 3), 1, 1.0).unwrap();
        let e = exact_energy_per_term(&s, 0.4).unwrap();
        let t = 0.4f64.tanh();
        let exact = -(t + t.powi(8)) / (1.0 + t.powi(9));
        assert!((e - exact).abs() < 1e-12, "{e} vs {exact}");
    }

    #[test]
    fn budget_is_enforced() {
        let l = lat(3, 3);
        let s = Sector::plaquette(&l, 1, 1.0).unwrap();
        let c = vec![true; s.num_spins()];
        assert!(matches!(q_distribution(&s, &c, 0.1), Err(Error::Budget { .. })));
        assert!(matches!(
            gauge_partition_function(&s, -1.0),
            Err(Error::Argument { .. })
        ));
    }

    #[test]
    fn duality_small() {
        let m = ModelSpec::new(2, 1, 2, 1.0, 2.0).unwrap();
        assert!(duality_check(&m, 0.3).unwrap().passed);
        let m = ModelSpec::new(3, 1, 2, 1.0, 2.0).unwrap();
        assert!(duality_check(&m, 0.2).unwrap().passed);
    }
}
