//! Stationary-phase analysis of semiclassical overlaps: oscillatory
//! quadrature of WKB mode products, the integration-by-parts boundary
//! asymptotics of the fast phase term, and checks that off-diagonal overlaps
//! vanish in the classical limit.
//!
//! With the actions A_η(x) = ∫_{x_l}^x p_η, the product of two WKB modes
//! splits into a slow e^{i(A_η−A_β)/ħ} piece and a fast −i·e^{i(A_η+A_β)/ħ}
//! piece (plus conjugates). The fast phase has no stationary points, so its
//! contribution reduces to O(ħ) boundary terms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{PhysicalParams, PotentialSpec, SingleParticleMode};
use crate::numerics::{integrate_adaptive, sign_change_brackets, QuadOptions};
use crate::rdm::{overlap_matrix, Bipartition};
use crate::semiclassics::{classical_probability, ClassicalOrbit};

/// Which part of the WKB overlap product to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapTerm {
    /// The full product ψ_S^{(η)*} ψ_S^{(β)}, normalizations included.
    Full,
    /// Only the bare fast term ∫ −i e^{i f/ħ} / √(p_η p_β) dx
    /// (no normalization prefactor).
    FastOnly,
}

/// Phase bookkeeping for a pair of orbits.
pub struct PhaseFunctions<'a> {
    pub orbit_eta: &'a ClassicalOrbit,
    pub orbit_beta: &'a ClassicalOrbit,
}

impl<'a> PhaseFunctions<'a> {
    pub fn new(orbit_eta: &'a ClassicalOrbit, orbit_beta: &'a ClassicalOrbit) -> Self {
        PhaseFunctions {
            orbit_eta,
            orbit_beta,
        }
    }

    /// f(x) = A_η(x) + A_β(x).
    pub fn f(&self, x: f64) -> Result<f64> {
        Ok(self.orbit_eta.action_from_left(x)? + self.orbit_beta.action_from_left(x)?)
    }

    /// g(x) = A_η(x) − A_β(x).
    pub fn g(&self, x: f64) -> Result<f64> {
        Ok(self.orbit_eta.action_from_left(x)? - self.orbit_beta.action_from_left(x)?)
    }

    /// f′ = p_η + p_β (> 0 inside both wells).
    pub fn f_prime(&self, x: f64) -> Result<f64> {
        Ok(self.orbit_eta.momentum(x)? + self.orbit_beta.momentum(x)?)
    }

    /// g′ = p_η − p_β.
    pub fn g_prime(&self, x: f64) -> Result<f64> {
        Ok(self.orbit_eta.momentum(x)? - self.orbit_beta.momentum(x)?)
    }
}

/// The slow/fast split of one WKB overlap over a region.
#[derive(Debug, Clone)]
pub struct OverlapDecomposition {
    /// (N_η N_β / 4) ∫ e^{i g/ħ} / √(p_η p_β) dx
    pub slow_part: Complex64,
    /// (N_η N_β / 4) ∫ −i e^{i f/ħ} / √(p_η p_β) dx
    pub fast_part: Complex64,
    /// slow + fast + their conjugates = the full real overlap.
    pub total: Complex64,
    pub region: (f64, f64),
}

fn check_region(
    orbit_eta: &ClassicalOrbit,
    orbit_beta: &ClassicalOrbit,
    lo: f64,
    hi: f64,
) -> Result<()> {
    if !(lo < hi) {
        return Err(Error::Domain(format!("degenerate region [{lo}, {hi}]")));
    }
    for orbit in [orbit_eta, orbit_beta] {
        let margin = crate::semiclassics::TURNING_POINT_MARGIN * orbit.width();
        if lo < orbit.x_left + margin || hi > orbit.x_right - margin {
            return Err(Error::Domain(format!(
                "region [{lo}, {hi}] must keep a {margin:.3e} margin inside the \
                 accessible region [{}, {}]",
                orbit.x_left, orbit.x_right
            )));
        }
    }
    Ok(())
}

fn phase_panels(phases: &PhaseFunctions, lo: f64, hi: f64, hbar: f64) -> Result<usize> {
    let df = (phases.f(hi)? - phases.f(lo)?).abs();
    let dg = (phases.g(hi)? - phases.g(lo)?).abs();
    // At least one GL15 panel per half period keeps > 12 nodes per period.
    let n = ((df + dg) / (std::f64::consts::PI * hbar)).ceil() as usize + 8;
    Ok(n.min(65_536))
}

/// Adaptive oscillatory quadrature of the WKB overlap (or its bare fast
/// term) over A = [lo, hi], to absolute tolerance 1e−6.
pub fn overlap_integral_numeric(
    orbit_eta: &ClassicalOrbit,
    orbit_beta: &ClassicalOrbit,
    region: (f64, f64),
    hbar: f64,
    term: OverlapTerm,
) -> Result<Complex64> {
    let (lo, hi) = region;
    check_region(orbit_eta, orbit_beta, lo, hi)?;
    let phases = PhaseFunctions::new(orbit_eta, orbit_beta);
    let panels = phase_panels(&phases, lo, hi, hbar)?;
    let opts = QuadOptions {
        abs_tol: 1e-8,
        initial_panels: panels,
        max_depth: 24,
    };
    match term {
        OverlapTerm::FastOnly => integrate_adaptive(
            |x| {
                let pe = orbit_eta.momentum(x).unwrap_or(f64::NAN);
                let pb = orbit_beta.momentum(x).unwrap_or(f64::NAN);
                let f = phases.f(x).unwrap_or(f64::NAN);
                Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, f / hbar)
                    / (pe * pb).sqrt()
            },
            lo,
            hi,
            &opts,
        ),
        OverlapTerm::Full => {
            let ne = 2.0 * (orbit_eta.params.mass / orbit_eta.period).sqrt();
            let nb = 2.0 * (orbit_beta.params.mass / orbit_beta.period).sqrt();
            let v = integrate_adaptive(
                |x| {
                    let pe = orbit_eta.momentum(x).unwrap_or(f64::NAN);
                    let pb = orbit_beta.momentum(x).unwrap_or(f64::NAN);
                    let ae = orbit_eta.action_from_left(x).unwrap_or(f64::NAN);
                    let ab = orbit_beta.action_from_left(x).unwrap_or(f64::NAN);
                    let q = std::f64::consts::FRAC_PI_4;
                    ne * nb / (pe * pb).sqrt()
                        * (ae / hbar - q).cos()
                        * (ab / hbar - q).cos()
                },
                lo,
                hi,
                &opts,
            )?;
            Ok(Complex64::new(v, 0.0))
        }
    }
}

/// Both pieces of the overlap plus their reassembled total.
pub fn decompose_overlap(
    orbit_eta: &ClassicalOrbit,
    orbit_beta: &ClassicalOrbit,
    region: (f64, f64),
    hbar: f64,
) -> Result<OverlapDecomposition> {
    let (lo, hi) = region;
    check_region(orbit_eta, orbit_beta, lo, hi)?;
    let phases = PhaseFunctions::new(orbit_eta, orbit_beta);
    let panels = phase_panels(&phases, lo, hi, hbar)?;
    let opts = QuadOptions {
        abs_tol: 1e-8,
        initial_panels: panels,
        max_depth: 24,
    };
    let ne = 2.0 * (orbit_eta.params.mass / orbit_eta.period).sqrt();
    let nb = 2.0 * (orbit_beta.params.mass / orbit_beta.period).sqrt();
    let pref = ne * nb / 4.0;
    let weight = |x: f64| {
        let pe = orbit_eta.momentum(x).unwrap_or(f64::NAN);
        let pb = orbit_beta.momentum(x).unwrap_or(f64::NAN);
        1.0 / (pe * pb).sqrt()
    };
    let slow = integrate_adaptive(
        |x| Complex64::from_polar(weight(x), phases.g(x).unwrap_or(f64::NAN) / hbar),
        lo,
        hi,
        &opts,
    )? * pref;
    let fast = integrate_adaptive(
        |x| {
            Complex64::new(0.0, -1.0)
                * Complex64::from_polar(weight(x), phases.f(x).unwrap_or(f64::NAN) / hbar)
        },
        lo,
        hi,
        &opts,
    )? * pref;
    let total = slow + fast + slow.conj() + fast.conj();
    Ok(OverlapDecomposition {
        slow_part: slow,
        fast_part: fast,
        total,
        region,
    })
}

/// First integration-by-parts boundary term of the fast integral:
/// I ≈ −ħ e^{i f/ħ} / [(p_η + p_β) √(p_η p_β)] evaluated between the two
/// endpoints of A. This is O(ħ) and vanishes in the classical limit.
pub fn boundary_term_asymptotic(
    orbit_eta: &ClassicalOrbit,
    orbit_beta: &ClassicalOrbit,
    region: (f64, f64),
    hbar: f64,
) -> Result<Complex64> {
    let (lo, hi) = region;
    check_region(orbit_eta, orbit_beta, lo, hi)?;
    let phases = PhaseFunctions::new(orbit_eta, orbit_beta);
    let endpoint = |x: f64| -> Result<Complex64> {
        let pe = orbit_eta.momentum(x)?;
        let pb = orbit_beta.momentum(x)?;
        let h = 1.0 / ((pe + pb) * (pe * pb).sqrt());
        Ok(Complex64::from_polar(h, phases.f(x)? / hbar))
    };
    Ok(-hbar * (endpoint(hi)? - endpoint(lo)?))
}

/// Roots of g′ = p_η − p_β inside A. Orbits of distinct energies in the same
/// potential cannot cross in phase space, so a nonempty result flags a model
/// violation.
pub fn stationary_point_scan(
    orbit_eta: &ClassicalOrbit,
    orbit_beta: &ClassicalOrbit,
    region: (f64, f64),
) -> Result<Vec<f64>> {
    let (lo, hi) = region;
    check_region(orbit_eta, orbit_beta, lo, hi)?;
    if (orbit_eta.energy - orbit_beta.energy).abs()
        < 1e-12 * orbit_eta.energy.abs().max(orbit_beta.energy.abs())
    {
        return Err(Error::Domain(
            "stationary-point scan needs distinct orbit energies \
             (equal energies make every point stationary)"
                .into(),
        ));
    }
    let phases = PhaseFunctions::new(orbit_eta, orbit_beta);
    let g = |x: f64| phases.g_prime(x).unwrap_or(f64::NAN);
    Ok(sign_change_brackets(g, lo, hi, 512)
        .into_iter()
        .map(|(a, b)| 0.5 * (a + b))
        .collect())
}

/// Overlap of two exact continuum modes over A against the classical target
/// δ_{ηβ} P_cl^{(η)}(A). Returns (overlap, target, |overlap − target|).
pub fn overlap_limit_check(
    mode_eta: &SingleParticleMode,
    mode_beta: &SingleParticleMode,
    part: &Bipartition,
    pot: &PotentialSpec,
    params: &PhysicalParams,
) -> Result<(Complex64, f64, f64)> {
    let value = if mode_eta.eta == mode_beta.eta {
        let o = overlap_matrix(std::slice::from_ref(mode_eta), part)?;
        o.matrix[(0, 0)]
    } else {
        let o = overlap_matrix(&[mode_eta.clone(), mode_beta.clone()], part)?;
        o.matrix[(0, 1)]
    };
    let target = if mode_eta.eta == mode_beta.eta {
        let orbit = ClassicalOrbit::new(pot, mode_eta.energy, params)?;
        classical_probability(part, &orbit)?
    } else {
        0.0
    };
    let err = (value - Complex64::new(target, 0.0)).norm();
    Ok((value, target, err))
}
