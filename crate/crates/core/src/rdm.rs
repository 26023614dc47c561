//! Exact reduced-density-matrix spectra of free-fermion (and two-boson)
//! states for a spatial bipartition.
//!
//! The fast path diagonalizes the mode overlap matrix restricted to region A
//! and forms subset products of its eigenvalues; a literal partial-trace
//! construction on small lattices serves as the independent oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{LatticeGrid, SingleParticleMode};
use crate::numerics::{integrate_adaptive, QuadOptions};

/// Spectrum entries below this threshold are dropped (0·log 0 convention).
pub const EIGENVALUE_CUTOFF: f64 = 1e-12;

/// Region A of a bipartition: either an explicit set of lattice sites
/// (storage indices into the mode's grid) or a closed real interval.
#[derive(Debug, Clone, PartialEq)]
pub enum Bipartition {
    Sites(BTreeSet<usize>),
    Interval { lo: f64, hi: f64 },
}

impl Bipartition {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Domain(format!(
                "interval bipartition needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Bipartition::Interval { lo, hi })
    }

    pub fn sites(sites: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = sites.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Domain("site bipartition must be nonempty".into()));
        }
        Ok(Bipartition::Sites(set))
    }

    /// Lattice sites of `grid` belonging to region A.
    pub fn site_set(&self, grid: &LatticeGrid) -> Result<BTreeSet<usize>> {
        match self {
            Bipartition::Sites(set) => {
                if let Some(&bad) = set.iter().find(|&&j| j >= grid.site_count) {
                    return Err(Error::Usage(format!(
                        "site index {bad} outside the {}-site lattice",
                        grid.site_count
                    )));
                }
                Ok(set.clone())
            }
            Bipartition::Interval { lo, hi } => Ok((0..grid.site_count)
                .filter(|&j| {
                    let x = grid.position(j);
                    x >= lo - 1e-12 && x <= hi + 1e-12
                })
                .collect()),
        }
    }
}

/// Hermitian matrix of mode overlaps restricted to region A,
/// O_{ηβ} = Σ_{l∈A} ψ_l^{(η)} [ψ_l^{(β)}]* (lattice) or the corresponding
/// integral over A (continuum).
#[derive(Debug, Clone)]
pub struct OverlapMatrix {
    pub matrix: DMatrix<Complex64>,
    pub mode_labels: Vec<u32>,
}

impl OverlapMatrix {
    pub fn dim(&self) -> usize {
        self.mode_labels.len()
    }

    /// Max |O - O†| entry; the construction keeps this below 1e-12.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues (ascending). Certified to lie in [-1e-10, 1+1e-10] by
    /// `occupation_eigenvalues`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let se = self.matrix.clone().symmetric_eigen();
        let mut vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Eigenvalues validated against the [0, 1] occupation bound and clamped.
    pub fn occupation_eigenvalues(&self) -> Result<Vec<f64>> {
        let vals = self.eigenvalues();
        for &mu in &vals {
            if !(-1e-10..=1.0 + 1e-10).contains(&mu) {
                return Err(Error::Numerical(format!(
                    "overlap eigenvalue {mu} outside [0, 1]"
                )));
            }
        }
        Ok(vals.into_iter().map(|m| m.clamp(0.0, 1.0)).collect())
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.clone().lu().determinant()
    }

    /// Overlap matrix of the complementary region, I − O.
    /// Valid because the modes are orthonormal on the full system.
    pub fn complement(&self) -> OverlapMatrix {
        let n = self.dim();
        let ident = DMatrix::<Complex64>::identity(n, n);
        OverlapMatrix {
            matrix: ident - &self.matrix,
            mode_labels: self.mode_labels.clone(),
        }
    }
}

/// Map from particle-number sector k to the nonzero RDM eigenvalues in it,
/// sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct RdmSpectrum {
    pub sectors: BTreeMap<usize, Vec<f64>>,
    pub n_particles: usize,
}

impl RdmSpectrum {
    pub fn trace(&self) -> f64 {
        self.sectors.values().flatten().sum()
    }

    pub fn all_eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.sectors.values().flatten().copied().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    pub fn sector(&self, k: usize) -> &[f64] {
        self.sectors.get(&k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Subset-product spectrum from single-mode occupation probabilities:
    /// the subset S contributes Π_{i∈S} p_i Π_{i∉S} (1−p_i) to sector |S|.
    pub fn from_occupations(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        if n > 20 {
            return Err(Error::Resource(format!(
                "subset-product spectrum capped at 20 modes, got {n}"
            )));
        }
        for &p in probs {
            if !(-1e-10..=1.0 + 1e-10).contains(&p) {
                return Err(Error::Domain(format!("occupation {p} outside [0, 1]")));
            }
        }
        let probs: Vec<f64> = probs.iter().map(|p| p.clamp(0.0, 1.0)).collect();
        let mut sectors: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for mask in 0u32..(1u32 << n) {
            let mut value = 1.0;
            for (i, &p) in probs.iter().enumerate() {
                value *= if mask & (1 << i) != 0 { p } else { 1.0 - p };
            }
            if value >= EIGENVALUE_CUTOFF {
                sectors
                    .entry(mask.count_ones() as usize)
                    .or_default()
                    .push(value);
            }
        }
        for v in sectors.values_mut() {
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        }
        Ok(RdmSpectrum {
            sectors,
            n_particles: n,
        })
    }
}

fn check_distinct_labels(modes: &[SingleParticleMode]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for m in modes {
        if !seen.insert(m.eta) {
            return Err(Error::Usage(format!(
                "fermionic mode labels must be distinct; eta = {} repeats",
                m.eta
            )));
        }
    }
    Ok(())
}

fn continuum_pair_overlap(
    a: &SingleParticleMode,
    b: &SingleParticleMode,
    lo: f64,
    hi: f64,
) -> Result<Complex64> {
    let (sa, _) = a.support()?;
    let (_, sb_hi) = a.support()?;
    let mut lo_eff = lo.max(sa);
    let mut hi_eff = hi.min(sb_hi);
    if let Ok((blo, bhi)) = b.support() {
        lo_eff = lo_eff.max(blo);
        hi_eff = hi_eff.min(bhi);
    }
    if lo_eff >= hi_eff {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let panels = 2 * (a.oscillation_hint(lo_eff, hi_eff) + b.oscillation_hint(lo_eff, hi_eff)) + 8;
    let opts = QuadOptions::with_tol(1e-11).panels(panels.min(8192));
    integrate_adaptive(
        |x| a.eval(x).unwrap_or_default() * b.eval(x).unwrap_or_default().conj(),
        lo_eff,
        hi_eff,
        &opts,
    )
}

/// Overlap matrix of `modes` restricted to region A.
pub fn overlap_matrix(modes: &[SingleParticleMode], part: &Bipartition) -> Result<OverlapMatrix> {
    if modes.is_empty() {
        return Err(Error::Usage("overlap matrix needs at least one mode".into()));
    }
    check_distinct_labels(modes)?;
    let n = modes.len();
    let continuum = modes[0].is_continuum();
    if modes.iter().any(|m| m.is_continuum() != continuum) {
        return Err(Error::Usage(
            "all modes must share a representation (lattice or continuum)".into(),
        ));
    }
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    if continuum {
        let (lo, hi) = match part {
            Bipartition::Interval { lo, hi } => (*lo, *hi),
            Bipartition::Sites(_) => {
                return Err(Error::Usage(
                    "continuum modes need an interval bipartition".into(),
                ))
            }
        };
        for i in 0..n {
            for j in i..n {
                let v = continuum_pair_overlap(&modes[i], &modes[j], lo, hi)?;
                matrix[(i, j)] = v;
                matrix[(j, i)] = v.conj();
            }
        }
        // diagonal entries are real by construction of the integrand
        for i in 0..n {
            matrix[(i, i)] = Complex64::new(matrix[(i, i)].re, 0.0);
        }
    } else {
        let (grid0, _) = modes[0].lattice_parts()?;
        for m in modes {
            let (g, _) = m.lattice_parts()?;
            if g != grid0 {
                return Err(Error::Usage("modes live on different grids".into()));
            }
        }
        let sites = part.site_set(grid0)?;
        for i in 0..n {
            let (_, ai) = modes[i].lattice_parts()?;
            for j in i..n {
                let (_, aj) = modes[j].lattice_parts()?;
                let v: Complex64 = sites.iter().map(|&l| ai[l] * aj[l].conj()).sum();
                matrix[(i, j)] = v;
                matrix[(j, i)] = v.conj();
            }
        }
    }
    Ok(OverlapMatrix {
        matrix,
        mode_labels: modes.iter().map(|m| m.eta).collect(),
    })
}

/// N = 1 spectrum: sector 1 holds λ = O₁₁, sector 0 holds 1 − λ.
pub fn single_particle_spectrum(
    mode: &SingleParticleMode,
    part: &Bipartition,
) -> Result<RdmSpectrum> {
    let o = overlap_matrix(std::slice::from_ref(mode), part)?;
    RdmSpectrum::from_occupations(&[o.matrix[(0, 0)].re])
}

/// The single nonzero eigenvalue of the top sector ρ_{A,[k,k]}: det O.
pub fn sector_top_eigenvalue(o: &OverlapMatrix) -> f64 {
    o.determinant().re
}

/// Full RDM spectrum from the overlap-matrix eigenvalues μ_i: each subset S
/// of modes contributes Π_{i∈S} μ_i Π_{i∉S} (1−μ_i) to sector |S|.
///
/// Finite-lattice validity of this product form is established empirically
/// against `brute_force_rdm` rather than assumed.
pub fn rdm_spectrum_exact(
    modes: &[SingleParticleMode],
    part: &Bipartition,
) -> Result<RdmSpectrum> {
    let o = overlap_matrix(modes, part)?;
    let mu = o.occupation_eigenvalues()?;
    RdmSpectrum::from_occupations(&mu)
}

/// Dense N-particle amplitudes M_{l₁…l_N} = det[ψ^{(η_i)}_{l_j}] over ordered
/// site tuples l₁ < … < l_N.
#[derive(Debug, Clone)]
pub struct ManyBodyStateDense {
    pub tuples: Vec<Vec<usize>>,
    pub amplitudes: Vec<Complex64>,
    pub site_count: usize,
    pub n_particles: usize,
}

/// All k-subsets of 0..n in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl ManyBodyStateDense {
    /// Slater state of `modes` on their common grid. Checks Σ|M|² = 1.
    pub fn slater(modes: &[SingleParticleMode]) -> Result<Self> {
        check_distinct_labels(modes)?;
        let n = modes.len();
        let (grid, _) = modes[0].lattice_parts()?;
        let site_count = grid.site_count;
        let amps: Vec<&[Complex64]> = modes
            .iter()
            .map(|m| m.lattice_parts().map(|(_, a)| a))
            .collect::<Result<_>>()?;
        let tuples = k_subsets(site_count, n);
        let mut amplitudes = Vec::with_capacity(tuples.len());
        let mut norm = 0.0;
        for t in &tuples {
            let m = DMatrix::from_fn(n, n, |i, j| amps[i][t[j]]);
            let det = m.lu().determinant();
            norm += det.norm_sqr();
            amplitudes.push(det);
        }
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "many-body norm {norm} deviates from 1 by more than 1e-10; \
                 input modes are not orthonormal"
            )));
        }
        Ok(ManyBodyStateDense {
            tuples,
            amplitudes,
            site_count,
            n_particles: n,
        })
    }
}

/// Literal partial-trace construction of every particle-number sector of
/// ρ_A, diagonalized densely. Caps: ≤ 14 sites, N ≤ 4.
pub fn brute_force_rdm(
    modes: &[SingleParticleMode],
    grid: &LatticeGrid,
    part: &Bipartition,
) -> Result<RdmSpectrum> {
    let n = modes.len();
    if grid.site_count > 14 || n > 4 {
        return Err(Error::Resource(format!(
            "brute-force oracle capped at 14 sites and 4 particles, got {} sites / {}",
            grid.site_count, n
        )));
    }
    for m in modes {
        let (g, _) = m.lattice_parts()?;
        if g != grid {
            return Err(Error::Usage("modes live on a different grid".into()));
        }
    }
    let state = ManyBodyStateDense::slater(modes)?;
    let a_set = part.site_set(grid)?;
    let a_list: Vec<usize> = a_set.iter().copied().collect();

    // Index maps from A-sublists to sector-matrix indices, one per k.
    let mut a_index: Vec<HashMap<Vec<usize>, usize>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut map = HashMap::new();
        for (i, sub) in k_subsets(a_list.len(), k).into_iter().enumerate() {
            map.insert(sub.iter().map(|&p| a_list[p]).collect::<Vec<_>>(), i);
        }
        a_index.push(map);
    }

    // Group amplitudes by the B-configuration: rho_{A,[N,k]} = sum_b v_b v_b^dagger.
    let mut by_b: BTreeMap<(usize, Vec<usize>), Vec<(usize, Complex64)>> = BTreeMap::new();
    for (tuple, amp) in state.tuples.iter().zip(&state.amplitudes) {
        let mut a_part = Vec::new();
        let mut b_part = Vec::new();
        let mut crossings = 0usize;
        let mut b_seen_after = 0usize;
        // Count pairs (i < j) with t_i in A and t_j in B: iterate right to left.
        for &site in tuple.iter().rev() {
            if a_set.contains(&site) {
                crossings += b_seen_after;
                a_part.push(site);
            } else {
                b_seen_after += 1;
                b_part.push(site);
            }
        }
        a_part.reverse();
        b_part.reverse();
        let sign = if crossings % 2 == 0 { 1.0 } else { -1.0 };
        let k = a_part.len();
        let col = a_index[k][&a_part];
        by_b
            .entry((k, b_part))
            .or_default()
            .push((col, amp * sign));
    }

    let mut sectors: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for k in 0..=n {
        let dim = a_index[k].len();
        if dim == 0 {
            continue;
        }
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        let mut touched = false;
        for ((kk, _b), entries) in by_b.iter() {
            if *kk != k {
                continue;
            }
            touched = true;
            for &(i, vi) in entries {
                for &(j, vj) in entries {
                    rho[(i, j)] += vi * vj.conj();
                }
            }
        }
        if !touched {
            continue;
        }
        let se = rho.symmetric_eigen();
        let mut vals: Vec<f64> = se
            .eigenvalues
            .iter()
            .copied()
            .filter(|&v| v >= EIGENVALUE_CUTOFF)
            .collect();
        if let Some(&bad) = se.eigenvalues.iter().find(|&&v| v < -1e-10) {
            return Err(Error::Numerical(format!(
                "sector {k} produced negative eigenvalue {bad}"
            )));
        }
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if !vals.is_empty() {
            sectors.insert(k, vals);
        }
    }
    Ok(RdmSpectrum {
        sectors,
        n_particles: n,
    })
}

/// N = 2 identical bosons in mode η (continuum): the sector eigenvalues are
/// the binomial weights B(2, p) with p = ∫_A |ψ|².
pub fn bosonic_two_particle_spectrum(
    mode: &SingleParticleMode,
    part: &Bipartition,
) -> Result<RdmSpectrum> {
    if !mode.is_continuum() {
        return Err(Error::Usage(
            "bosonic spectrum is defined in the continuum (the doubly-occupied \
             amplitude is O(a) on the lattice)"
                .into(),
        ));
    }
    let o = overlap_matrix(std::slice::from_ref(mode), part)?;
    let p = o.matrix[(0, 0)].re.clamp(0.0, 1.0);
    let raw = [(0usize, (1.0 - p) * (1.0 - p)), (1, 2.0 * p * (1.0 - p)), (2, p * p)];
    let mut sectors = BTreeMap::new();
    for (k, v) in raw {
        if v >= EIGENVALUE_CUTOFF {
            sectors.insert(k, vec![v]);
        }
    }
    Ok(RdmSpectrum {
        sectors,
        n_particles: 2,
    })
}

/// Von Neumann entropy −Σ λ log λ in nats over all sectors.
pub fn entanglement_entropy(spec: &RdmSpectrum) -> Result<f64> {
    let mut s = 0.0;
    for &v in spec.sectors.values().flatten() {
        if v < -1e-10 {
            return Err(Error::Numerical(format!(
                "negative RDM eigenvalue {v} below tolerance"
            )));
        }
        if v > EIGENVALUE_CUTOFF {
            s -= v * v.ln();
        }
    }
    Ok(s)
}

/// Verify det(XᵀYᵀ) = Σ_S det X_S det Y_S over k-subsets S of the rows of X
/// (equivalently columns of Y). X is |A|×k, Y is k×|A|.
///
/// Returns (lhs, rhs, |lhs − rhs|); the rhs is computed by explicit subset
/// enumeration and serves as the oracle.
pub fn cauchy_binet_check(
    x: &DMatrix<Complex64>,
    y: &DMatrix<Complex64>,
) -> Result<(Complex64, Complex64, f64)> {
    let rows = x.nrows();
    let k = x.ncols();
    if y.nrows() != k || y.ncols() != rows {
        return Err(Error::Usage(format!(
            "shape mismatch: X is {}x{}, Y is {}x{}",
            rows,
            k,
            y.nrows(),
            y.ncols()
        )));
    }
    if k > rows {
        return Err(Error::Domain(format!(
            "k = {k} exceeds |A| = {rows}: determinant degenerates to zero"
        )));
    }
    let lhs = (y * x).lu().determinant();
    let mut rhs = Complex64::new(0.0, 0.0);
    for subset in k_subsets(rows, k) {
        let xs = DMatrix::from_fn(k, k, |i, j| x[(subset[i], j)]);
        let ys = DMatrix::from_fn(k, k, |i, j| y[(i, subset[j])]);
        rhs += xs.lu().determinant() * ys.lu().determinant();
    }
    Ok((lhs, rhs, (lhs - rhs).norm()))
}

/// Build ρ(Q) = Q Q†, diagonalize it, and certify its rank-one structure:
/// one eigenvalue |Q|², the rest below 1e-12. Returns the spectrum
/// (descending).
pub fn rank_one_sector_check(q: &[Complex64]) -> Result<Vec<f64>> {
    let n = q.len();
    if n == 0 || q.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::Domain("Q must be a nonzero vector".into()));
    }
    let rho = DMatrix::from_fn(n, n, |i, j| q[i] * q[j].conj());
    let se = rho.symmetric_eigen();
    let mut vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let q_norm_sqr: f64 = q.iter().map(|c| c.norm_sqr()).sum();
    let scale = q_norm_sqr.max(1.0);
    if (vals[0] - q_norm_sqr).abs() > 1e-12 * scale {
        return Err(Error::Numerical(format!(
            "leading eigenvalue {} deviates from |Q|^2 = {}",
            vals[0], q_norm_sqr
        )));
    }
    if vals.iter().skip(1).any(|&v| v.abs() > 1e-12 * scale) {
        return Err(Error::Numerical(
            "rank-one projector has a spurious second eigenvalue".into(),
        ));
    }
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{box_analytic_mode, box_continuum_mode, ModeForm, PhysicalParams};
    use approx::assert_abs_diff_eq;

    fn natural() -> PhysicalParams {
        PhysicalParams::natural()
    }

    #[test]
    fn box_half_interval_overlap_is_half() {
        // closed form: int_0^(1/2) 2 sin^2(pi eta x) dx = 1/2 for every eta
        for eta in [1u32, 2, 7, 23, 50] {
            let m = box_continuum_mode(1.0, eta, &natural()).unwrap();
            let part = Bipartition::interval(0.0, 0.5).unwrap();
            let o = overlap_matrix(std::slice::from_ref(&m), &part).unwrap();
            assert_abs_diff_eq!(o.matrix[(0, 0)].re, 0.5, epsilon = 1e-11);
        }
    }

    #[test]
    fn box_quarter_interval_overlap() {
        // 1/4 - 1/(2 pi) = 0.09084505691
        let m = box_continuum_mode(1.0, 1, &natural()).unwrap();
        let part = Bipartition::interval(0.0, 0.25).unwrap();
        let o = overlap_matrix(std::slice::from_ref(&m), &part).unwrap();
        assert_abs_diff_eq!(o.matrix[(0, 0)].re, 0.25 - 0.5 / std::f64::consts::PI, epsilon = 1e-11);
    }

    #[test]
    fn full_domain_overlap_is_identity() {
        let modes: Vec<_> = (1..=4)
            .map(|eta| box_continuum_mode(1.0, eta, &natural()).unwrap())
            .collect();
        let part = Bipartition::interval(0.0, 1.0).unwrap();
        let o = overlap_matrix(&modes, &part).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(o.matrix[(i, j)].re, expect, epsilon = 1e-10);
                assert_abs_diff_eq!(o.matrix[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn overlap_rejects_duplicate_labels() {
        let m = box_continuum_mode(1.0, 1, &natural()).unwrap();
        let part = Bipartition::interval(0.0, 0.5).unwrap();
        assert!(matches!(
            overlap_matrix(&[m.clone(), m], &part),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn single_particle_sectors() {
        let m = box_continuum_mode(1.0, 3, &natural()).unwrap();
        let part = Bipartition::interval(0.0, 0.5).unwrap();
        let spec = single_particle_spectrum(&m, &part).unwrap();
        assert_abs_diff_eq!(spec.sector(1)[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(spec.sector(0)[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(entanglement_entropy(&spec).unwrap(), 2.0f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn subset_products_match_hand_arithmetic() {
        let spec = RdmSpectrum::from_occupations(&[0.3, 0.6]).unwrap();
        assert_abs_diff_eq!(spec.sector(0)[0], 0.28, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.sector(1)[0], 0.42, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.sector(1)[1], 0.12, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.sector(2)[0], 0.18, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.trace(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn whole_line_gives_pure_top_sector() {
        let modes: Vec<_> = (1..=3)
            .map(|eta| box_continuum_mode(1.0, eta, &natural()).unwrap())
            .collect();
        let part = Bipartition::interval(0.0, 1.0).unwrap();
        let spec = rdm_spectrum_exact(&modes, &part).unwrap();
        assert_eq!(spec.sectors.len(), 1);
        assert_abs_diff_eq!(spec.sector(3)[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn sector_top_eigenvalue_2x2() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.1, -0.2),
                Complex64::new(0.5, 0.0),
            ],
        );
        let o = OverlapMatrix {
            matrix: m,
            mode_labels: vec![1, 2],
        };
        // det = 1/4 - |c|^2 with |c|^2 = 0.05
        assert_abs_diff_eq!(sector_top_eigenvalue(&o), 0.25 - 0.05, epsilon = 1e-14);
    }

    #[test]
    fn brute_force_two_site_single_particle() {
        // psi = (1/sqrt2, 1/sqrt2), A = {site 0} -> {0: [1/2], 1: [1/2]}
        let grid = LatticeGrid::new(1.0, 2, 0.0).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        let mode = SingleParticleMode {
            eta: 1,
            energy: 0.0,
            form: ModeForm::Lattice {
                grid,
                amplitudes: vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
            },
        };
        let part = Bipartition::sites([0usize]).unwrap();
        let spec = brute_force_rdm(std::slice::from_ref(&mode), &grid, &part).unwrap();
        assert_abs_diff_eq!(spec.sector(0)[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.sector(1)[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn brute_force_trace_and_determinant_identity() {
        let params = natural();
        let l = 6;
        let modes: Vec<_> = [1u32, 3]
            .iter()
            .map(|&eta| box_analytic_mode(l, eta, 1.0, &params).unwrap())
            .collect();
        let grid = *modes[0].lattice_parts().unwrap().0;
        let part = Bipartition::sites([0usize, 1, 2]).unwrap();
        let spec = brute_force_rdm(&modes, &grid, &part).unwrap();
        assert_abs_diff_eq!(spec.trace(), 1.0, epsilon = 1e-10);
        // lambda_[2,2] equals det of the overlap matrix on A
        let o = overlap_matrix(&modes, &part).unwrap();
        assert_abs_diff_eq!(spec.sector(2)[0], sector_top_eigenvalue(&o), epsilon = 1e-12);
    }

    #[test]
    fn product_form_matches_brute_force_small() {
        let params = natural();
        let l = 8;
        let modes: Vec<_> = [2u32, 5, 7]
            .iter()
            .map(|&eta| box_analytic_mode(l, eta, 1.0, &params).unwrap())
            .collect();
        let grid = *modes[0].lattice_parts().unwrap().0;
        let part = Bipartition::sites([1usize, 2, 4, 7]).unwrap();
        let fast = rdm_spectrum_exact(&modes, &part).unwrap();
        let slow = brute_force_rdm(&modes, &grid, &part).unwrap();
        for k in 0..=3 {
            let f = fast.sector(k);
            let s = slow.sector(k);
            assert_eq!(f.len(), s.len(), "sector {k}");
            for (a, b) in f.iter().zip(s) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn exchange_symmetry_between_regions() {
        let params = natural();
        let l = 10;
        let modes: Vec<_> = [1u32, 4]
            .iter()
            .map(|&eta| box_analytic_mode(l, eta, 1.0, &params).unwrap())
            .collect();
        let a_sites: BTreeSet<usize> = [0usize, 2, 5].into_iter().collect();
        let b_sites: BTreeSet<usize> = (0..l).filter(|j| !a_sites.contains(j)).collect();
        let spec_a = rdm_spectrum_exact(&modes, &Bipartition::Sites(a_sites)).unwrap();
        let spec_b = rdm_spectrum_exact(&modes, &Bipartition::Sites(b_sites)).unwrap();
        for k in 0..=2usize {
            let lhs = spec_a.sector(k);
            let rhs = spec_b.sector(2 - k);
            assert_eq!(lhs.len(), rhs.len());
            for (a, b) in lhs.iter().zip(rhs) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn bosonic_binomial_spectrum() {
        let m = box_continuum_mode(1.0, 1, &natural()).unwrap();
        let part = Bipartition::interval(0.0, 0.25).unwrap();
        let spec = bosonic_two_particle_spectrum(&m, &part).unwrap();
        let p = 0.25 - 0.5 / std::f64::consts::PI;
        assert_abs_diff_eq!(spec.sector(2)[0], p * p, epsilon = 1e-10);
        assert_abs_diff_eq!(spec.sector(1)[0], 2.0 * p * (1.0 - p), epsilon = 1e-10);
        assert_abs_diff_eq!(spec.sector(0)[0], (1.0 - p) * (1.0 - p), epsilon = 1e-10);
        // p = 1/2 case: entropy (3/2) log 2
        let part = Bipartition::interval(0.0, 0.5).unwrap();
        let spec = bosonic_two_particle_spectrum(&m, &part).unwrap();
        assert_abs_diff_eq!(
            entanglement_entropy(&spec).unwrap(),
            1.5 * 2.0f64.ln(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn bosonic_rejects_lattice_mode() {
        let m = box_analytic_mode(5, 1, 1.0, &natural()).unwrap();
        let part = Bipartition::interval(0.0, 2.0).unwrap();
        assert!(matches!(
            bosonic_two_particle_spectrum(&m, &part),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn entropy_saturation_and_pure_state() {
        let spec = RdmSpectrum::from_occupations(&[0.5, 0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(
            entanglement_entropy(&spec).unwrap(),
            3.0 * 2.0f64.ln(),
            epsilon = 1e-12
        );
        let pure = RdmSpectrum::from_occupations(&[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(entanglement_entropy(&pure).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cauchy_binet_scalar_and_identity() {
        // k = 1 reduces to a dot product
        let x = DMatrix::from_row_slice(3, 1, &[
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 1.0),
        ]);
        let y = DMatrix::from_row_slice(1, 3, &[
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(1.0, 1.0),
        ]);
        let (lhs, rhs, err) = cauchy_binet_check(&x, &y).unwrap();
        assert!(err < 1e-14, "lhs {lhs}, rhs {rhs}");
        // identity blocks
        let x = DMatrix::from_fn(4, 2, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        });
        let y = DMatrix::from_fn(2, 4, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        });
        let (lhs, _, err) = cauchy_binet_check(&x, &y).unwrap();
        assert!((lhs.re - 1.0).abs() < 1e-14 && err < 1e-14);
        // k > |A| rejected
        let x = DMatrix::zeros(2, 3);
        let y = DMatrix::zeros(3, 2);
        assert!(cauchy_binet_check(&x, &y).is_err());
    }

    #[test]
    fn rank_one_basics() {
        let spec = rank_one_sector_check(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        assert_abs_diff_eq!(spec[0], 1.0, epsilon = 1e-14);
        let s = 1.0 / 2.0f64.sqrt();
        let spec =
            rank_one_sector_check(&[Complex64::new(s, 0.0), Complex64::new(0.0, s)]).unwrap();
        assert_abs_diff_eq!(spec[0], 1.0, epsilon = 1e-13);
    }
}
