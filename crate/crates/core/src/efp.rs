//! Emptiness formation probability of a region B: the probability that B
//! holds no particles. Two routes are kept deliberately independent — the
//! finite-N determinant det[δ − O_B] over mode overlaps, and a Fredholm
//! determinant of the Christoffel–Darboux kernel discretized by a Nyström
//! rule on B — and cross-validated against each other.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::SingleParticleMode;
use crate::numerics::{gauss_legendre, integrate_adaptive, QuadOptions};
use crate::rdm::{overlap_matrix, Bipartition};

/// Christoffel–Darboux kernel K(x, y) = Σ_η [ψ^{(η)}(x)]* ψ^{(η)}(y) of the
/// occupied modes.
#[derive(Debug, Clone)]
pub struct CdKernel {
    pub modes: Vec<SingleParticleMode>,
}

impl CdKernel {
    pub fn new(modes: Vec<SingleParticleMode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Usage("kernel needs at least one mode".into()));
        }
        if modes.iter().any(|m| !m.is_continuum()) {
            return Err(Error::Usage("kernel modes must be continuum".into()));
        }
        Ok(CdKernel { modes })
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|m| m.eval(x).unwrap_or_default().conj() * m.eval(y).unwrap_or_default())
            .sum()
    }

    /// Defect of the reproducing property ∫ K(x, z) K(z, y) dz = K(x, y)
    /// over the full support, at one probe pair.
    pub fn reproducing_defect(&self, x: f64, y: f64) -> Result<f64> {
        let (lo, hi) = self.modes[0].support()?;
        let hint: usize = self
            .modes
            .iter()
            .map(|m| m.oscillation_hint(lo, hi))
            .sum();
        let opts = QuadOptions::with_tol(1e-10).panels(2 * hint + 8);
        let conv = integrate_adaptive(|z| self.eval(x, z) * self.eval(z, y), lo, hi, &opts)?;
        Ok((conv - self.eval(x, y)).norm())
    }

    fn max_eta(&self) -> u32 {
        self.modes.iter().map(|m| m.eta).max().unwrap_or(1)
    }
}

/// Quadrature rule on B backing the Nyström discretization.
#[derive(Debug, Clone)]
pub struct NystromGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl NystromGrid {
    /// Gauss–Legendre nodes mapped onto [lo, hi]; at least 16 nodes.
    pub fn gauss(lo: f64, hi: f64, node_count: usize) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Domain(format!("empty region [{lo}, {hi}]")));
        }
        let n = node_count.max(16);
        let (xs, ws) = gauss_legendre(n);
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        Ok(NystromGrid {
            nodes: xs.iter().map(|x| c + h * x).collect(),
            weights: ws.iter().map(|w| w * h).collect(),
        })
    }
}

fn check_probability(v: f64, what: &str) -> Result<f64> {
    if !(-1e-8..=1.0 + 1e-8).contains(&v) {
        return Err(Error::Numerical(format!(
            "{what} = {v} outside [0, 1] beyond tolerance"
        )));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// EFP by the finite-N identity: det_{η,β}[δ_{ηβ} − ∫_B ψ^{(η)} ψ^{(β)*} dx].
pub fn efp_determinant(modes: &[SingleParticleMode], region_b: (f64, f64)) -> Result<f64> {
    let part = Bipartition::interval(region_b.0, region_b.1)?;
    let o = overlap_matrix(modes, &part)?;
    let n = o.dim();
    let m = DMatrix::<Complex64>::identity(n, n) - &o.matrix;
    check_probability(m.lu().determinant().re, "EFP determinant")
}

/// EFP as the Fredholm determinant det(1 − K)|_B on one Nyström grid:
/// det of (I − W^{1/2} K W^{1/2}).
pub fn efp_fredholm(kernel: &CdKernel, grid: &NystromGrid) -> Result<f64> {
    let n = grid.nodes.len();
    let mut m = DMatrix::<Complex64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            let w = (grid.weights[i] * grid.weights[j]).sqrt();
            m[(i, j)] -= kernel.eval(grid.nodes[i], grid.nodes[j]) * w;
        }
    }
    check_probability(m.lu().determinant().re, "Nystrom determinant")
}

/// Fredholm route with the node count auto-scaled from the top mode's local
/// wavelength (≥ 8 nodes per oscillation) and doubled until two successive
/// grids agree within `tol`.
pub fn efp_fredholm_converged(kernel: &CdKernel, region_b: (f64, f64), tol: f64) -> Result<f64> {
    let (lo, hi) = region_b;
    let (slo, shi) = kernel.modes[0].support()?;
    let width = (shi - slo).max(1e-300);
    let halfwaves = kernel.max_eta() as f64 * (hi - lo) / width;
    let mut n = ((4.0 * halfwaves).ceil() as usize + 8).max(16);
    let mut prev = efp_fredholm(kernel, &NystromGrid::gauss(lo, hi, n)?)?;
    for _ in 0..6 {
        n *= 2;
        let next = efp_fredholm(kernel, &NystromGrid::gauss(lo, hi, n)?)?;
        if (next - prev).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical(format!(
        "Nystrom determinant did not converge to {tol:.1e} under node doubling (last n = {n})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{box_continuum_mode, PhysicalParams};
    use approx::assert_abs_diff_eq;

    fn box_modes(n: u32) -> Vec<SingleParticleMode> {
        (1..=n)
            .map(|eta| box_continuum_mode(1.0, eta, &PhysicalParams::natural()).unwrap())
            .collect()
    }

    #[test]
    fn single_mode_half_box() {
        let modes = box_modes(1);
        assert_abs_diff_eq!(
            efp_determinant(&modes, (0.5, 1.0)).unwrap(),
            0.5,
            epsilon = 1e-10
        );
        let kernel = CdKernel::new(modes).unwrap();
        let efp = efp_fredholm_converged(&kernel, (0.5, 1.0), 1e-8).unwrap();
        assert_abs_diff_eq!(efp, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn full_line_and_empty_region() {
        let modes = box_modes(3);
        // whole box: some mode always present
        assert_abs_diff_eq!(
            efp_determinant(&modes, (0.0, 1.0)).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        // near-empty region: EFP tends to 1
        let efp = efp_determinant(&modes, (0.5, 0.5 + 1e-9)).unwrap();
        assert!(efp > 1.0 - 1e-6);
    }

    #[test]
    fn routes_agree_for_small_n() {
        for n in [1u32, 2, 4] {
            let modes = box_modes(n);
            let det = efp_determinant(&modes, (0.6, 0.9)).unwrap();
            let kernel = CdKernel::new(modes).unwrap();
            let fred = efp_fredholm_converged(&kernel, (0.6, 0.9), 1e-8).unwrap();
            assert!(
                (det - fred).abs() < 1e-6,
                "N = {n}: det {det} vs fredholm {fred}"
            );
        }
    }

    #[test]
    fn efp_monotone_under_region_growth() {
        let modes = box_modes(3);
        let mut prev = 1.0;
        for k in 1..=8 {
            let b_lo = 0.95 - 0.06 * k as f64;
            let efp = efp_determinant(&modes, (b_lo, 0.95)).unwrap();
            assert!(efp <= prev + 1e-10, "EFP must not grow with B");
            prev = efp;
        }
    }

    #[test]
    fn kernel_reproduces_itself() {
        let kernel = CdKernel::new(box_modes(4)).unwrap();
        assert!(kernel.reproducing_defect(0.3, 0.7).unwrap() < 1e-8);
        assert!(kernel.reproducing_defect(0.21, 0.21).unwrap() < 1e-8);
    }

    #[test]
    fn classical_limit_product_form() {
        // large distinct labels: EFP(B) -> prod (1 - |B|)
        let params = PhysicalParams::natural();
        let modes: Vec<SingleParticleMode> = [50u32, 101, 153]
            .iter()
            .map(|&eta| box_continuum_mode(1.0, eta, &params).unwrap())
            .collect();
        let b = (0.55, 0.85);
        let efp = efp_determinant(&modes, b).unwrap();
        let classical = (1.0f64 - 0.3).powi(3);
        assert!((efp - classical).abs() < 0.02, "efp {efp} vs {classical}");
    }
}
