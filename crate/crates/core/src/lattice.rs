//! Single-particle problem: potentials, lattice discretization of the 1D
//! Schrödinger equation, eigenmodes and the continuum limit.
//!
//! The Hamiltonian on a chain with spacing `a` is tridiagonal with diagonal
//! V(x_j) + ħ²/(m a²) and constant off-diagonal −ħ²/(2 m a²); its low modes
//! converge to the continuum spectrum as a → 0 at fixed physical length.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{lowest_eigenpairs, UniformSamples};

/// ħ and the particle mass; both strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        Ok(PhysicalParams { hbar, mass })
    }

    /// ħ = m = 1 working units.
    pub fn natural() -> Self {
        PhysicalParams {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

/// Shape of the external potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// Hard-wall box on [0, length], V = 0 inside.
    Box { length: f64 },
    /// V(x) = ½ m ω² x².
    Harmonic { omega: f64 },
    /// V(x) = Σ c_k x^k with c_k = coefficients[k].
    Polynomial { coefficients: Vec<f64> },
    /// Piecewise-linear interpolation of samples (x strictly increasing).
    Tabulated { x: Vec<f64>, v: Vec<f64> },
}

/// A potential together with the closed interval on which it is defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub domain: (f64, f64),
}

impl PotentialSpec {
    pub fn hard_wall_box(length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Domain(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(PotentialSpec {
            kind: PotentialKind::Box { length },
            domain: (0.0, length),
        })
    }

    pub fn harmonic(omega: f64, half_width: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!(
                "harmonic frequency must be positive, got {omega}"
            )));
        }
        Ok(PotentialSpec {
            kind: PotentialKind::Harmonic { omega },
            domain: (-half_width, half_width),
        })
    }

    pub fn polynomial(coefficients: Vec<f64>, domain: (f64, f64)) -> Result<Self> {
        if domain.0 >= domain.1 {
            return Err(Error::Domain("empty potential domain".into()));
        }
        Ok(PotentialSpec {
            kind: PotentialKind::Polynomial { coefficients },
            domain,
        })
    }

    pub fn tabulated(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() != v.len() || x.len() < 2 {
            return Err(Error::Domain(
                "tabulated potential needs matching x/v samples (>= 2)".into(),
            ));
        }
        if !x.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain(
                "tabulated sample grid must be strictly increasing".into(),
            ));
        }
        let domain = (x[0], *x.last().unwrap());
        Ok(PotentialSpec {
            kind: PotentialKind::Tabulated { x, v },
            domain,
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain.0 - 1e-12 && x <= self.domain.1 + 1e-12
    }

    /// V(x); domain error outside the defining interval.
    pub fn value(&self, x: f64, params: &PhysicalParams) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "x = {x} outside potential domain [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        Ok(match &self.kind {
            PotentialKind::Box { .. } => 0.0,
            PotentialKind::Harmonic { omega } => 0.5 * params.mass * omega * omega * x * x,
            PotentialKind::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            PotentialKind::Tabulated { x: xs, v } => {
                let i = match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
                    Ok(i) => return Ok(v[i]),
                    Err(i) => i.clamp(1, xs.len() - 1),
                };
                let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                v[i - 1] + t * (v[i] - v[i - 1])
            }
        })
    }

    /// dV/dx, piecewise-constant for tabulated potentials.
    pub fn derivative(&self, x: f64, params: &PhysicalParams) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "x = {x} outside potential domain [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        Ok(match &self.kind {
            PotentialKind::Box { .. } => 0.0,
            PotentialKind::Harmonic { omega } => params.mass * omega * omega * x,
            PotentialKind::Polynomial { coefficients } => {
                let mut acc = 0.0;
                for (k, c) in coefficients.iter().enumerate().skip(1).rev() {
                    acc = acc * x + k as f64 * c;
                }
                acc
            }
            PotentialKind::Tabulated { x: xs, v } => {
                let i = xs.partition_point(|&p| p < x).clamp(1, xs.len() - 1);
                (v[i] - v[i - 1]) / (xs[i] - xs[i - 1])
            }
        })
    }

    /// Location of the potential minimum inside the domain (grid scan).
    /// Used as the default reference point of indefinite integrals.
    pub fn min_location(&self, params: &PhysicalParams) -> f64 {
        match &self.kind {
            PotentialKind::Box { length } => 0.5 * length,
            PotentialKind::Harmonic { .. } => 0.0,
            _ => {
                let (lo, hi) = self.domain;
                let mut best = (f64::INFINITY, lo);
                for i in 0..=4096 {
                    let x = lo + (hi - lo) * i as f64 / 4096.0;
                    if let Ok(v) = self.value(x, params) {
                        if v < best.0 {
                            best = (v, x);
                        }
                    }
                }
                best.1
            }
        }
    }

    pub fn is_hard_wall(&self) -> bool {
        matches!(self.kind, PotentialKind::Box { .. })
    }
}

/// Uniform chain of sites x_j = origin + spacing·j, j = 0..site_count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeGrid {
    pub spacing: f64,
    pub site_count: usize,
    pub origin: f64,
}

impl LatticeGrid {
    pub fn new(spacing: f64, site_count: usize, origin: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Domain(format!(
                "lattice spacing must be positive, got {spacing}"
            )));
        }
        if site_count == 0 {
            return Err(Error::Domain("lattice needs at least one site".into()));
        }
        Ok(LatticeGrid {
            spacing,
            site_count,
            origin,
        })
    }

    pub fn position(&self, j: usize) -> f64 {
        self.origin + self.spacing * j as f64
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.site_count).map(|j| self.position(j))
    }
}

/// Real symmetric tridiagonal single-particle Hamiltonian on a grid.
#[derive(Debug, Clone)]
pub struct TridiagonalHamiltonian {
    pub diagonal: Vec<f64>,
    pub off_diagonal: f64,
    pub grid: LatticeGrid,
}

impl TridiagonalHamiltonian {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn norm_inf(&self) -> f64 {
        self.diagonal
            .iter()
            .map(|d| d.abs() + 2.0 * self.off_diagonal.abs())
            .fold(0.0, f64::max)
    }
}

/// Storage backing a single-particle mode.
#[derive(Debug, Clone)]
pub enum ModeForm {
    /// Site amplitudes ψ_j on a lattice, Σ|ψ_j|² = 1.
    Lattice {
        grid: LatticeGrid,
        amplitudes: Vec<Complex64>,
    },
    /// Sampled continuum wave function, ∫|ψ|²dx = 1 by quadrature.
    ContinuumSampled { samples: UniformSamples },
    /// Closed-form box mode ψ(x) = √(2/ℓ) sin(πηx/ℓ) on [0, ℓ].
    ContinuumBox { length: f64 },
}

/// One eigenstate of the single-particle problem. η = 1 labels the ground
/// state; the spatial phase is fixed so the first appreciable amplitude is
/// real positive.
#[derive(Debug, Clone)]
pub struct SingleParticleMode {
    pub eta: u32,
    pub energy: f64,
    pub form: ModeForm,
}

impl SingleParticleMode {
    pub fn is_continuum(&self) -> bool {
        !matches!(self.form, ModeForm::Lattice { .. })
    }

    /// Evaluate a continuum mode at x (zero outside its support).
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        match &self.form {
            ModeForm::Lattice { .. } => Err(Error::Usage(
                "eval() requires a continuum mode; call to_continuum first".into(),
            )),
            ModeForm::ContinuumSampled { samples } => Ok(samples.eval(x)),
            ModeForm::ContinuumBox { length } => {
                if x <= 0.0 || x >= *length {
                    Ok(Complex64::new(0.0, 0.0))
                } else {
                    let amp = (2.0 / length).sqrt()
                        * (std::f64::consts::PI * self.eta as f64 * x / length).sin();
                    Ok(Complex64::new(amp, 0.0))
                }
            }
        }
    }

    /// Support of a continuum mode.
    pub fn support(&self) -> Result<(f64, f64)> {
        match &self.form {
            ModeForm::Lattice { .. } => Err(Error::Usage("lattice mode has no support interval".into())),
            ModeForm::ContinuumSampled { samples } => Ok((samples.x_min(), samples.x_max())),
            ModeForm::ContinuumBox { length } => Ok((0.0, *length)),
        }
    }

    /// Rough count of half-oscillations over [a, b]; sets the panel count
    /// of overlap quadratures.
    pub fn oscillation_hint(&self, a: f64, b: f64) -> usize {
        let (lo, hi) = match self.support() {
            Ok(s) => s,
            Err(_) => return self.eta as usize,
        };
        let width = (hi - lo).max(1e-300);
        let frac = ((b.min(hi) - a.max(lo)).max(0.0) / width).min(1.0);
        ((self.eta as f64 * frac).ceil() as usize).max(1)
    }

    pub fn lattice_parts(&self) -> Result<(&LatticeGrid, &[Complex64])> {
        match &self.form {
            ModeForm::Lattice { grid, amplitudes } => Ok((grid, amplitudes)),
            _ => Err(Error::Usage("expected a lattice mode".into())),
        }
    }
}

/// Assemble the tridiagonal Hamiltonian for a grid inside the potential.
pub fn build_hamiltonian(
    grid: &LatticeGrid,
    pot: &PotentialSpec,
    params: &PhysicalParams,
) -> Result<TridiagonalHamiltonian> {
    let a = grid.spacing;
    let kinetic = params.hbar * params.hbar / (params.mass * a * a);
    let mut diagonal = Vec::with_capacity(grid.site_count);
    for x in grid.positions() {
        if !pot.contains(x) {
            return Err(Error::Domain(format!(
                "grid site x = {x} lies outside the potential domain"
            )));
        }
        diagonal.push(pot.value(x, params)? + kinetic);
    }
    Ok(TridiagonalHamiltonian {
        diagonal,
        off_diagonal: -0.5 * kinetic,
        grid: *grid,
    })
}

fn fix_sign(v: &mut [Complex64]) {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|c| c.norm() > 1e-8 * max) {
        if first.re < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

/// Lowest `count` eigenmodes, ascending in energy, orthonormal, sign-fixed.
pub fn solve_modes(h: &TridiagonalHamiltonian, count: usize) -> Result<Vec<SingleParticleMode>> {
    if count > h.dim() {
        return Err(Error::Usage(format!(
            "requested {count} modes from a {}-site lattice",
            h.dim()
        )));
    }
    let off = vec![h.off_diagonal; h.dim() - 1];
    let (values, vectors) = lowest_eigenpairs(&h.diagonal, &off, count)?;
    let modes = values
        .into_iter()
        .zip(vectors)
        .enumerate()
        .map(|(k, (energy, v))| {
            let mut amplitudes: Vec<Complex64> =
                v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
            fix_sign(&mut amplitudes);
            SingleParticleMode {
                eta: (k + 1) as u32,
                energy,
                form: ModeForm::Lattice {
                    grid: h.grid,
                    amplitudes,
                },
            }
        })
        .collect();
    Ok(modes)
}

/// Closed-form box mode on a lattice of `l_sites` interior sites with walls
/// at x = 0 and x = (l_sites+1)·spacing: ψ_j ∝ sin(πηj/(L+1)).
pub fn box_analytic_mode(
    l_sites: usize,
    eta: u32,
    spacing: f64,
    params: &PhysicalParams,
) -> Result<SingleParticleMode> {
    if eta == 0 || eta as usize > l_sites {
        return Err(Error::Domain(format!(
            "box quantum number eta = {eta} outside 1..={l_sites}"
        )));
    }
    let lp1 = (l_sites + 1) as f64;
    let norm = (2.0 / lp1).sqrt();
    let amplitudes: Vec<Complex64> = (1..=l_sites)
        .map(|j| {
            Complex64::new(
                norm * (std::f64::consts::PI * eta as f64 * j as f64 / lp1).sin(),
                0.0,
            )
        })
        .collect();
    let kinetic = params.hbar * params.hbar / (params.mass * spacing * spacing);
    let energy = -kinetic * ((std::f64::consts::PI * eta as f64 / lp1).cos() - 1.0);
    let grid = LatticeGrid::new(spacing, l_sites, spacing)?;
    let mut amplitudes = amplitudes;
    fix_sign(&mut amplitudes);
    Ok(SingleParticleMode {
        eta,
        energy,
        form: ModeForm::Lattice { grid, amplitudes },
    })
}

/// Lattice dispersion of the box level η when the wall-to-wall length
/// ℓ = l_spacings·a is held fixed: E = −ħ²/(m a²)·[cos(πηa/ℓ) − 1].
///
/// `l_spacings` counts lattice spacings between the hard walls, so the chain
/// has l_spacings − 1 interior sites. As a → 0 at fixed ℓ the value tends to
/// ħ²π²η²/(2mℓ²) with an O(a²) defect.
pub fn continuum_limit_energy(
    l_spacings: usize,
    eta: u32,
    a: f64,
    params: &PhysicalParams,
) -> Result<f64> {
    if eta == 0 {
        return Err(Error::Domain("box quantum number eta must be >= 1".into()));
    }
    if l_spacings < 2 {
        return Err(Error::Domain("box needs at least 2 lattice spacings".into()));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("spacing must be positive, got {a}")));
    }
    let kinetic = params.hbar * params.hbar / (params.mass * a * a);
    Ok(-kinetic * ((std::f64::consts::PI * eta as f64 / l_spacings as f64).cos() - 1.0))
}

/// Rescale a lattice mode to its continuum representation ψ(x_j) = ψ_j/√a.
pub fn to_continuum(mode: &SingleParticleMode, grid: &LatticeGrid) -> Result<SingleParticleMode> {
    let (mode_grid, amplitudes) = mode.lattice_parts()?;
    if mode_grid != grid {
        return Err(Error::Usage("mode was solved on a different grid".into()));
    }
    let scale = 1.0 / grid.spacing.sqrt();
    let samples = UniformSamples {
        x0: grid.origin,
        dx: grid.spacing,
        values: amplitudes.iter().map(|c| c * scale).collect(),
    };
    Ok(SingleParticleMode {
        eta: mode.eta,
        energy: mode.energy,
        form: ModeForm::ContinuumSampled { samples },
    })
}

/// Exact continuum box mode ψ(x) = √(2/ℓ) sin(πηx/ℓ) with its continuum
/// energy ħ²π²η²/(2mℓ²).
pub fn box_continuum_mode(
    length: f64,
    eta: u32,
    params: &PhysicalParams,
) -> Result<SingleParticleMode> {
    if eta == 0 {
        return Err(Error::Domain("box quantum number eta must be >= 1".into()));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::Domain(format!(
            "box length must be positive, got {length}"
        )));
    }
    let pi = std::f64::consts::PI;
    let energy = params.hbar * params.hbar * pi * pi * (eta as f64) * (eta as f64)
        / (2.0 * params.mass * length * length);
    Ok(SingleParticleMode {
        eta,
        energy,
        form: ModeForm::ContinuumBox { length },
    })
}
