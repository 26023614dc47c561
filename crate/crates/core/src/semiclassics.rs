//! Classical orbit quantities, WKB wave functions with the first quantum
//! correction, and closed-form classical limits for spectra and entropies.
//!
//! All orbit integrals (action, traversal time) carry inverse-square-root
//! endpoint behavior at the turning points; they are computed after the
//! substitution x = x_t ∓ u², which makes the integrands smooth.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{LatticeGrid, PhysicalParams, PotentialKind, PotentialSpec};
use crate::numerics::{
    bisect_root, integrate_adaptive, sign_change_brackets, QuadOptions,
};
use crate::rdm::{Bipartition, RdmSpectrum};

/// Relative margin (in units of the well width) that evaluation points must
/// keep from either turning point when the O(ħ) correction is involved.
pub const TURNING_POINT_MARGIN: f64 = 1e-3;

/// √(2m(E − V(x))); classically forbidden points are a domain error.
pub fn classical_momentum(
    x: f64,
    energy: f64,
    pot: &PotentialSpec,
    params: &PhysicalParams,
) -> Result<f64> {
    let v = pot.value(x, params)?;
    let gap = energy - v;
    if gap < -1e-12 * energy.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "x = {x} is classically forbidden (E - V = {gap:.3e})"
        )));
    }
    Ok((2.0 * params.mass * gap.max(0.0)).sqrt())
}

/// Turning points of the orbit at `energy`: the pair of roots of E − V(x)
/// bracketing the well. Hard walls count as turning points for the box.
pub fn turning_points(
    pot: &PotentialSpec,
    energy: f64,
    params: &PhysicalParams,
) -> Result<(f64, f64)> {
    if let PotentialKind::Box { length } = pot.kind {
        if energy <= 0.0 {
            return Err(Error::Domain(format!(
                "box orbit needs positive energy, got {energy}"
            )));
        }
        return Ok((0.0, length));
    }
    let (lo, hi) = pot.domain;
    let f = |x: f64| energy - pot.value(x, params).unwrap_or(f64::NEG_INFINITY);
    let brackets = sign_change_brackets(f, lo, hi, 4096);
    match brackets.len() {
        0 | 1 => Err(Error::Domain(format!(
            "no classical well at energy {energy} inside [{lo}, {hi}]"
        ))),
        2 => {
            // Machine-precision roots: a residual offset delta pollutes the
            // endpoint-regularized orbit integrals at O(sqrt(delta)).
            let tol = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0);
            let root = |(a, b): (f64, f64)| {
                if a == b {
                    Ok(a)
                } else {
                    bisect_root(f, a, b, tol)
                }
            };
            Ok((root(brackets[0])?, root(brackets[1])?))
        }
        n => Err(Error::Domain(format!(
            "unsupported potential shape: {n} turning points at energy {energy}"
        ))),
    }
}

/// Cumulative integrals over one half of the well, parameterized by
/// u = √|x − x_t| so the integrands are regular.
#[derive(Debug, Clone)]
struct HalfTable {
    /// u grid step
    du: f64,
    /// cumulative ∫ p dx from the turning point, at u = k·du
    action: Vec<f64>,
    /// cumulative ∫ m/p dx from the turning point, at u = k·du
    time: Vec<f64>,
}

const HALF_PANELS: usize = 512;

/// One classical orbit: energy, turning points, period, and the cached
/// action/time integrals every other semiclassical quantity is built from.
#[derive(Debug, Clone)]
pub struct ClassicalOrbit {
    pub energy: f64,
    pub x_left: f64,
    pub x_right: f64,
    pub period: f64,
    pub potential: PotentialSpec,
    pub params: PhysicalParams,
    mid: f64,
    left: HalfTable,
    right: HalfTable,
}

impl ClassicalOrbit {
    pub fn new(pot: &PotentialSpec, energy: f64, params: &PhysicalParams) -> Result<Self> {
        let (mut x_left, mut x_right) = turning_points(pot, energy, params)?;
        // Nudge the stored endpoints onto the accessible side so every point
        // strictly inside (x_left, x_right) has a positive momentum.
        let gap = |x: f64| energy - pot.value(x, params).unwrap_or(f64::INFINITY);
        for _ in 0..64 {
            if gap(x_left) >= 0.0 {
                break;
            }
            x_left = x_left.next_up();
        }
        for _ in 0..64 {
            if gap(x_right) >= 0.0 {
                break;
            }
            x_right = x_right.next_down();
        }
        let mid = 0.5 * (x_left + x_right);
        let momentum = |x: f64| classical_momentum(x, energy, pot, params).unwrap_or(0.0);
        let build = |anchor: f64, towards_mid: f64| -> HalfTable {
            let u_max = (towards_mid - anchor).abs().sqrt();
            let du = u_max / HALF_PANELS as f64;
            let dir = (towards_mid - anchor).signum();
            let (nodes, weights) = crate::numerics::gauss_legendre(15);
            let mut action = Vec::with_capacity(HALF_PANELS + 1);
            let mut time = Vec::with_capacity(HALF_PANELS + 1);
            action.push(0.0);
            time.push(0.0);
            let mut acc_a = 0.0;
            let mut acc_t = 0.0;
            for k in 0..HALF_PANELS {
                let (ua, ub) = (k as f64 * du, (k + 1) as f64 * du);
                let c = 0.5 * (ua + ub);
                let h = 0.5 * (ub - ua);
                let mut pa = 0.0;
                let mut pt = 0.0;
                for (xn, w) in nodes.iter().zip(&weights) {
                    let u = c + h * xn;
                    let x = anchor + dir * u * u;
                    let p = momentum(x);
                    pa += w * p * 2.0 * u;
                    // m/p * 2u is regular: p ~ const·u near the turning point.
                    // Hard walls keep p finite so no special case is needed.
                    pt += w * (params.mass / p.max(1e-300)) * 2.0 * u;
                }
                acc_a += pa * h;
                acc_t += pt * h;
                action.push(acc_a);
                time.push(acc_t);
            }
            HalfTable { du, action, time }
        };
        let left = build(x_left, mid);
        let right = build(x_right, mid);
        let period = 2.0 * (left.time.last().unwrap() + right.time.last().unwrap());
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::Numerical(format!(
                "orbit period came out as {period} at energy {energy}"
            )));
        }
        Ok(ClassicalOrbit {
            energy,
            x_left,
            x_right,
            period,
            potential: pot.clone(),
            params: *params,
            mid,
            left,
            right,
        })
    }

    pub fn width(&self) -> f64 {
        self.x_right - self.x_left
    }

    pub fn momentum(&self, x: f64) -> Result<f64> {
        classical_momentum(x, self.energy, &self.potential, &self.params)
    }

    /// dp/dx = −m V′(x)/p(x).
    pub fn momentum_derivative(&self, x: f64) -> Result<f64> {
        let p = self.momentum(x)?;
        if p == 0.0 {
            return Err(Error::Domain(format!("momentum vanishes at x = {x}")));
        }
        Ok(-self.params.mass * self.potential.derivative(x, &self.params)? / p)
    }

    fn half_query(&self, table: &HalfTable, anchor: f64, dir: f64, x: f64) -> (f64, f64) {
        let u = ((x - anchor) * dir).max(0.0).sqrt();
        let k = ((u / table.du) as usize).min(HALF_PANELS - 1);
        let ua = k as f64 * table.du;
        let (nodes, weights) = crate::numerics::gauss_legendre(15);
        let c = 0.5 * (ua + u);
        let h = 0.5 * (u - ua);
        let mut pa = 0.0;
        let mut pt = 0.0;
        if h > 0.0 {
            for (xn, w) in nodes.iter().zip(&weights) {
                let uu = c + h * xn;
                let xx = anchor + dir * uu * uu;
                let p = self.momentum(xx).unwrap_or(0.0);
                pa += w * p * 2.0 * uu;
                pt += w * (self.params.mass / p.max(1e-300)) * 2.0 * uu;
            }
        }
        (table.action[k] + pa * h, table.time[k] + pt * h)
    }

    /// Modified action A(x) = ∫_{x_l}^x p dy for x in [x_l, x_r].
    pub fn action_from_left(&self, x: f64) -> Result<f64> {
        self.check_inside(x)?;
        if x <= self.mid {
            Ok(self.half_query(&self.left, self.x_left, 1.0, x).0)
        } else {
            let total = self.action_total();
            Ok(total - self.half_query(&self.right, self.x_right, -1.0, x).0)
        }
    }

    /// Full action ∫_{x_l}^{x_r} p dy over the well.
    pub fn action_total(&self) -> f64 {
        self.left.action.last().unwrap() + self.right.action.last().unwrap()
    }

    /// Traversal time m·∫_{x_l}^x dy/p(y); equals T/2 at the right turning point.
    pub fn time_from_left(&self, x: f64) -> Result<f64> {
        self.check_inside(x)?;
        if x <= self.mid {
            Ok(self.half_query(&self.left, self.x_left, 1.0, x).1)
        } else {
            Ok(0.5 * self.period - self.half_query(&self.right, self.x_right, -1.0, x).1)
        }
    }

    fn check_inside(&self, x: f64) -> Result<()> {
        let tol = 1e-9 * self.width();
        if x < self.x_left - tol || x > self.x_right + tol {
            return Err(Error::Domain(format!(
                "x = {x} outside the classically accessible region [{}, {}]",
                self.x_left, self.x_right
            )));
        }
        Ok(())
    }

    fn clamp_inside(&self, x: f64) -> f64 {
        x.clamp(self.x_left, self.x_right)
    }

    fn interval_of(&self, part: &Bipartition) -> Result<(f64, f64)> {
        match part {
            Bipartition::Interval { lo, hi } => Ok((*lo, *hi)),
            Bipartition::Sites(_) => Err(Error::Usage(
                "classical quantities need an interval bipartition".into(),
            )),
        }
    }
}

/// Period T = 2m ∫ dx/p of the orbit at `energy`.
pub fn orbit_period(pot: &PotentialSpec, energy: f64, params: &PhysicalParams) -> Result<f64> {
    Ok(ClassicalOrbit::new(pot, energy, params)?.period)
}

/// Fraction of the orbit period spent inside interval A:
/// P_cl(A) = (2/T) ∫_A m dx / p(x). A must lie inside the accessible region.
pub fn classical_probability(part: &Bipartition, orbit: &ClassicalOrbit) -> Result<f64> {
    let (lo, hi) = orbit.interval_of(part)?;
    orbit.check_inside(lo)?;
    orbit.check_inside(hi)?;
    let (lo, hi) = (orbit.clamp_inside(lo), orbit.clamp_inside(hi));
    if hi <= lo {
        return Ok(0.0);
    }
    let p = 2.0 * (orbit.time_from_left(hi)? - orbit.time_from_left(lo)?) / orbit.period;
    Ok(p.clamp(0.0, 1.0))
}

/// P_cl of the accessible region minus A, computed from its own time
/// integrals (not as 1 − P_cl(A)), so the two routes can be cross-checked.
pub fn classical_probability_complement(
    part: &Bipartition,
    orbit: &ClassicalOrbit,
) -> Result<f64> {
    let (lo, hi) = orbit.interval_of(part)?;
    orbit.check_inside(lo)?;
    orbit.check_inside(hi)?;
    let (lo, hi) = (orbit.clamp_inside(lo), orbit.clamp_inside(hi));
    let left = orbit.time_from_left(lo)?;
    let right = 0.5 * orbit.period - orbit.time_from_left(hi)?;
    Ok((2.0 * (left + right) / orbit.period).clamp(0.0, 1.0))
}

/// Phase-space density of states Γ(Φ_A) = ∫_A 2m dx/p restricted to A.
pub fn density_of_states(part: &Bipartition, orbit: &ClassicalOrbit) -> Result<f64> {
    Ok(classical_probability(part, orbit)? * orbit.period)
}

/// Microcanonical entropy of a particle observed only inside A:
/// S^m(A) = −log[Γ(Φ_A)/T] = −log P_cl(A). Returns +∞ when P_cl = 0.
pub fn microcanonical_entropy(part: &Bipartition, orbit: &ClassicalOrbit) -> Result<f64> {
    let p = classical_probability(part, orbit)?;
    if p == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-p.ln())
}

/// WKB wave function of one orbit at a given ħ; the normalization is the
/// orbit-averaged one, N = 2√(m/T).
#[derive(Debug, Clone)]
pub struct WkbMode<'a> {
    pub orbit: &'a ClassicalOrbit,
    pub hbar: f64,
    pub include_correction: bool,
    pub gamma_reference: f64,
}

impl<'a> WkbMode<'a> {
    pub fn new(orbit: &'a ClassicalOrbit, hbar: f64) -> Self {
        let gamma_reference = orbit.potential.min_location(&orbit.params);
        WkbMode {
            orbit,
            hbar,
            include_correction: false,
            gamma_reference,
        }
    }

    pub fn with_correction(mut self) -> Self {
        self.include_correction = true;
        self
    }

    pub fn normalization(&self) -> f64 {
        2.0 * (self.orbit.params.mass / self.orbit.period).sqrt()
    }
}

/// ψ_S(x) = N/√p · cos(A(x)/ħ − π/4), times (1 − iħγ) when the O(ħ)
/// correction is enabled.
pub fn wkb_wavefunction(x: f64, mode: &WkbMode) -> Result<Complex64> {
    let orbit = mode.orbit;
    if x <= orbit.x_left || x >= orbit.x_right {
        return Err(Error::Domain(format!(
            "x = {x} not strictly inside the accessible region ({}, {})",
            orbit.x_left, orbit.x_right
        )));
    }
    let p = orbit.momentum(x)?;
    let phase = orbit.action_from_left(x)? / mode.hbar - std::f64::consts::FRAC_PI_4;
    let base = mode.normalization() / p.sqrt() * phase.cos();
    if mode.include_correction {
        let g = gamma_correction(x, orbit, Some(mode.gamma_reference))?;
        Ok(Complex64::new(base, 0.0) * Complex64::new(1.0, -mode.hbar * g))
    } else {
        Ok(Complex64::new(base, 0.0))
    }
}

/// γ(x) = p′/(4p²) + (1/8)∫_ref^x p′²/p³ dt, the O(ħ) amplitude correction.
///
/// The reference point of the indefinite integral defaults to the potential
/// minimum; shifting it adds a constant, a pure O(ħ²) normalization effect.
/// For the harmonic well the definition integrates in closed form to
/// γ = ω s (s² − 6) / (48 E (1 − s²)^{3/2}) with s = x·√(mω²/(2E)), which is
/// used as a fast path (and as the oracle for the quadrature branch).
pub fn gamma_correction(x: f64, orbit: &ClassicalOrbit, reference: Option<f64>) -> Result<f64> {
    let margin = TURNING_POINT_MARGIN * orbit.width();
    if (x - orbit.x_left).abs() < margin || (orbit.x_right - x).abs() < margin {
        return Err(Error::Domain(format!(
            "x = {x} closer than {margin:.3e} to a turning point; \
             the correction integrand is singular there"
        )));
    }
    orbit.check_inside(x)?;
    let reference = reference.unwrap_or_else(|| orbit.potential.min_location(&orbit.params));
    if let PotentialKind::Harmonic { omega } = orbit.potential.kind {
        if reference.abs() < 1e-12 * orbit.width() {
            let m = orbit.params.mass;
            let e = orbit.energy;
            let s = x * (m * omega * omega / (2.0 * e)).sqrt();
            return Ok(omega * s * (s * s - 6.0) / (48.0 * e * (1.0 - s * s).powf(1.5)));
        }
    }
    let term1 = orbit.momentum_derivative(x)? / (4.0 * orbit.momentum(x)?.powi(2));
    let opts = QuadOptions::with_tol(1e-11).panels(32);
    let integral = integrate_adaptive(
        |t| {
            let p = orbit.momentum(t).unwrap_or(f64::NAN);
            let dp = orbit.momentum_derivative(t).unwrap_or(f64::NAN);
            dp * dp / (p * p * p)
        },
        reference,
        x,
        &opts,
    )?;
    Ok(term1 + integral / 8.0)
}

/// Occupation of A from the corrected WKB density:
/// λ = ∫_A |ψ_S|² (1 + ħ²γ²) dx with the orbit-averaged normalization
/// N = 2√(m/T) kept fixed (the paper's tail-neglecting convention).
/// Reduces to P_cl(A) as ħ → 0.
pub fn corrected_occupation(
    part: &Bipartition,
    orbit: &ClassicalOrbit,
    hbar: f64,
) -> Result<f64> {
    let (lo, hi) = orbit.interval_of(part)?;
    let margin = TURNING_POINT_MARGIN * orbit.width();
    if lo < orbit.x_left + margin || hi > orbit.x_right - margin {
        return Err(Error::Domain(format!(
            "A = [{lo}, {hi}] must keep a {margin:.3e} margin from the turning points"
        )));
    }
    let n2 = 4.0 * orbit.params.mass / orbit.period;
    let phase_span = (orbit.action_from_left(hi)? - orbit.action_from_left(lo)?) / hbar;
    let panels = ((phase_span / std::f64::consts::PI).ceil() as usize * 2 + 8).min(65536);
    let opts = QuadOptions::with_tol(1e-10).panels(panels);
    integrate_adaptive(
        |x| {
            let p = orbit.momentum(x).unwrap_or(f64::NAN);
            let phase = orbit.action_from_left(x).unwrap_or(f64::NAN) / hbar
                - std::f64::consts::FRAC_PI_4;
            let g = gamma_correction(x, orbit, None).unwrap_or(0.0);
            n2 / p * phase.cos().powi(2) * (1.0 + hbar * hbar * g * g)
        },
        lo,
        hi,
        &opts,
    )
}

/// Subset-product spectrum from per-particle probabilities P_cl.
pub fn classical_rdm_spectrum(p_list: &[f64]) -> Result<RdmSpectrum> {
    RdmSpectrum::from_occupations(p_list)
}

/// Shannon entropy of N independent bits: −Σ_r [p log p + (1−p) log(1−p)].
pub fn classical_entropy(p_list: &[f64]) -> f64 {
    p_list
        .iter()
        .map(|&p| {
            let mut s = 0.0;
            if p > 0.0 {
                s -= p * p.ln();
            }
            if p < 1.0 {
                s -= (1.0 - p) * (1.0 - p).ln();
            }
            s
        })
        .sum()
}

/// Shannon entropy of the binomial distribution B(N, p).
pub fn binomial_entropy(n: u32, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::Domain("binomial entropy needs N >= 1".into()));
    }
    let mut s = 0.0;
    let mut binom = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        let w = binom * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
        if w > 0.0 {
            s -= w * w.ln();
        }
    }
    Ok(s)
}

/// Classical prediction bundle for a set of orbits and one interval.
#[derive(Debug, Clone)]
pub struct ClassicalPrediction {
    pub p_cl: Vec<f64>,
    pub spectrum: RdmSpectrum,
    pub entropy: f64,
}

pub fn classical_prediction(
    orbits: &[ClassicalOrbit],
    part: &Bipartition,
) -> Result<ClassicalPrediction> {
    let p_cl: Vec<f64> = orbits
        .iter()
        .map(|o| classical_probability(part, o))
        .collect::<Result<_>>()?;
    let spectrum = classical_rdm_spectrum(&p_cl)?;
    let entropy = classical_entropy(&p_cl);
    Ok(ClassicalPrediction {
        p_cl,
        spectrum,
        entropy,
    })
}

/// Total well action ∫ p dx at a given energy (WKB level-counting helper).
fn total_action(pot: &PotentialSpec, energy: f64, params: &PhysicalParams) -> Result<f64> {
    Ok(ClassicalOrbit::new(pot, energy, params)?.action_total())
}

/// Pick a lattice able to resolve the lowest `count` eigenmodes of a
/// confining potential: the domain extends past the classical region until
/// the tunneling action reaches ~25ħ (so boundary amplitudes are < 1e−9),
/// and the spacing resolves the shortest local wavelength.
pub fn suggest_grid(
    pot: &PotentialSpec,
    params: &PhysicalParams,
    count: usize,
) -> Result<LatticeGrid> {
    if let PotentialKind::Box { length } = pot.kind {
        let spacings = (40 * count.max(4)).max(400);
        let a = length / spacings as f64;
        return LatticeGrid::new(a, spacings - 1, a);
    }
    let v_min = pot
        .value(pot.potential_min_x(params), params)
        .unwrap_or(0.0);
    // Bracket an energy whose WKB level count exceeds the request.
    let target = (count as f64 + 2.0) * std::f64::consts::PI * params.hbar;
    let mut e_up = v_min.abs().max(1.0) * 1e-3 + v_min;
    let mut ok = false;
    for _ in 0..60 {
        e_up = v_min + (e_up - v_min) * 2.0;
        match total_action(pot, e_up, params) {
            Ok(a) if a >= target => {
                ok = true;
                break;
            }
            Ok(_) => {}
            Err(_) => break,
        }
    }
    if !ok {
        return Err(Error::Domain(format!(
            "potential cannot confine {count} levels inside its domain"
        )));
    }
    let (xl, xr) = turning_points(pot, e_up, params)?;
    // Extend into the forbidden region until the decay action hits 25ħ.
    let tail = |from: f64, dir: f64| -> f64 {
        let mut x = from;
        let mut acc = 0.0;
        let (dlo, dhi) = pot.domain;
        let step = (xr - xl) * 0.01;
        while acc < 25.0 * params.hbar {
            let next = x + dir * step;
            if next < dlo || next > dhi {
                return if dir < 0.0 { dlo } else { dhi };
            }
            let v = pot.value(next, params).unwrap_or(f64::INFINITY);
            let q = (2.0 * params.mass * (v - e_up).max(0.0)).sqrt();
            acc += q * step;
            x = next;
        }
        x
    };
    let lo = tail(xl, -1.0);
    let hi = tail(xr, 1.0);
    let p_max = (2.0 * params.mass * (e_up - v_min)).sqrt();
    let lam_min = 2.0 * std::f64::consts::PI * params.hbar / p_max;
    let a = (lam_min / 80.0).min((hi - lo) / 600.0);
    let sites = ((hi - lo) / a).ceil() as usize - 1;
    if sites > 40_000 {
        return Err(Error::Resource(format!(
            "suggested grid needs {sites} sites (cap 40000)"
        )));
    }
    LatticeGrid::new(a, sites, lo + a)
}

impl PotentialSpec {
    fn potential_min_x(&self, params: &PhysicalParams) -> f64 {
        self.min_location(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn natural() -> PhysicalParams {
        PhysicalParams::natural()
    }

    fn harmonic_orbit(energy: f64) -> ClassicalOrbit {
        let pot = PotentialSpec::harmonic(1.0, 64.0).unwrap();
        ClassicalOrbit::new(&pot, energy, &natural()).unwrap()
    }

    #[test]
    fn momentum_values() {
        let p = natural();
        let free = PotentialSpec::hard_wall_box(10.0).unwrap();
        assert_abs_diff_eq!(classical_momentum(3.0, 2.0, &free, &p).unwrap(), 2.0);
        let harm = PotentialSpec::harmonic(1.0, 10.0).unwrap();
        assert_abs_diff_eq!(
            classical_momentum(0.0, 10.5, &harm, &p).unwrap(),
            21.0f64.sqrt(),
            epsilon = 1e-14
        );
        // forbidden point
        assert!(classical_momentum(9.0, 10.5, &harm, &p).is_err());
    }

    #[test]
    fn harmonic_turning_points() {
        let pot = PotentialSpec::harmonic(1.0, 10.0).unwrap();
        let (xl, xr) = turning_points(&pot, 10.5, &natural()).unwrap();
        assert_abs_diff_eq!(xl, -(21.0f64.sqrt()), epsilon = 1e-10);
        assert_abs_diff_eq!(xr, 21.0f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn quartic_turning_points() {
        let pot = PotentialSpec::polynomial(vec![0.0, 0.0, 0.0, 0.0, 1.0], (-3.0, 3.0)).unwrap();
        let (xl, xr) = turning_points(&pot, 1.0, &natural()).unwrap();
        assert_abs_diff_eq!(xl, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(xr, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn harmonic_period_is_energy_independent() {
        let t1 = harmonic_orbit(10.5).period;
        let t2 = harmonic_orbit(3.25).period;
        let tau = 2.0 * std::f64::consts::PI;
        assert_abs_diff_eq!(t1, tau, epsilon = 1e-7);
        assert_abs_diff_eq!(t2, tau, epsilon = 1e-7);
    }

    #[test]
    fn box_period_free_flight() {
        let pot = PotentialSpec::hard_wall_box(1.0).unwrap();
        // E = 2, m = 1 -> p = 2, T = 2 l m / p = 1
        assert_abs_diff_eq!(orbit_period(&pot, 2.0, &natural()).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn period_mass_scaling() {
        let pot = PotentialSpec::polynomial(vec![0.0, 0.0, 0.3, 0.0, 0.2], (-6.0, 6.0)).unwrap();
        let p1 = PhysicalParams::new(1.0, 1.0).unwrap();
        let p4 = PhysicalParams::new(1.0, 4.0).unwrap();
        let t1 = orbit_period(&pot, 2.0, &p1).unwrap();
        let t4 = orbit_period(&pot, 2.0, &p4).unwrap();
        assert_abs_diff_eq!(t4 / t1, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn box_probability_is_uniform() {
        let pot = PotentialSpec::hard_wall_box(1.0).unwrap();
        let orbit = ClassicalOrbit::new(&pot, 2.0, &natural()).unwrap();
        let part = Bipartition::interval(0.0, 0.3).unwrap();
        assert_abs_diff_eq!(
            classical_probability(&part, &orbit).unwrap(),
            0.3,
            epsilon = 1e-10
        );
    }

    #[test]
    fn harmonic_probability_closed_form() {
        let orbit = harmonic_orbit(10.5);
        let part = Bipartition::interval(-1.0, 1.0).unwrap();
        let expect = 2.0 * (1.0 / 21.0f64.sqrt()).asin() / std::f64::consts::PI;
        assert_abs_diff_eq!(
            classical_probability(&part, &orbit).unwrap(),
            expect,
            epsilon = 1e-9
        );
    }

    #[test]
    fn full_region_probability_is_one() {
        let orbit = harmonic_orbit(5.5);
        let part = Bipartition::interval(orbit.x_left, orbit.x_right).unwrap();
        assert_abs_diff_eq!(classical_probability(&part, &orbit).unwrap(), 1.0, epsilon = 1e-7);
    }

    #[test]
    fn complement_probabilities_sum_to_one() {
        let orbit = harmonic_orbit(7.5);
        let part = Bipartition::interval(-0.7, 1.9).unwrap();
        let p = classical_probability(&part, &orbit).unwrap();
        let q = classical_probability_complement(&part, &orbit).unwrap();
        assert_abs_diff_eq!(p + q, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn probability_requires_accessible_interval() {
        let orbit = harmonic_orbit(2.5);
        let part = Bipartition::interval(-50.0, 0.0).unwrap();
        assert!(classical_probability(&part, &orbit).is_err());
    }

    #[test]
    fn wkb_quarter_orbit_action() {
        // A(0) = pi E / 2 for the harmonic well
        let orbit = harmonic_orbit(10.5);
        assert_abs_diff_eq!(
            orbit.action_from_left(0.0).unwrap(),
            std::f64::consts::PI * 10.5 / 2.0,
            epsilon = 1e-8
        );
        let mode = WkbMode::new(&orbit, 1.0);
        let psi = wkb_wavefunction(0.0, &mode).unwrap();
        let expect = mode.normalization() / 21.0f64.powf(0.25)
            * (std::f64::consts::PI * 10.5 / 2.0 - std::f64::consts::FRAC_PI_4).cos();
        assert_abs_diff_eq!(psi.re, expect, epsilon = 1e-7);
    }

    #[test]
    fn wkb_phase_at_left_edge() {
        // A -> 0 at the left turning point, so the phase offset is -pi/4
        let orbit = harmonic_orbit(4.5);
        let x = orbit.x_left + 1e-7 * orbit.width();
        let a = orbit.action_from_left(x).unwrap();
        assert!(a.abs() < 1e-4);
    }

    #[test]
    fn wkb_norm_approaches_one_from_above() {
        // The orbit-averaged normalization leaves an O(hbar^(1/3)) excess
        // from the turning-point fringes; it decays slowly with energy.
        let norm_of = |e: f64| {
            let pot = PotentialSpec::harmonic(1.0, 128.0).unwrap();
            let orbit = ClassicalOrbit::new(&pot, e, &natural()).unwrap();
            let mode = WkbMode::new(&orbit, 1.0);
            let n2 = mode.normalization() * mode.normalization();
            let f = |x: f64| {
                let p = orbit.momentum(x).unwrap_or(f64::NAN);
                let ph = orbit.action_from_left(x).unwrap() - std::f64::consts::FRAC_PI_4;
                n2 / p * ph.cos().powi(2)
            };
            crate::numerics::integrate_sqrt_endpoints(
                f,
                orbit.x_left,
                orbit.x_right,
                &QuadOptions::with_tol(1e-8).panels((4.0 * e).ceil() as usize),
            )
            .unwrap()
        };
        let n_small = norm_of(9.5);
        let n_big = norm_of(2500.5);
        assert!((n_big - 1.0).abs() < 0.02, "norm at E=2500.5: {n_big}");
        assert!((n_big - 1.0).abs() < (n_small - 1.0).abs());
    }

    #[test]
    fn gamma_harmonic_closed_form_value() {
        // omega = E = m = 1, x = 1: gamma = -11/48 from the definition
        let pot = PotentialSpec::harmonic(1.0, 8.0).unwrap();
        let orbit = ClassicalOrbit::new(&pot, 1.0, &natural()).unwrap();
        let g = gamma_correction(1.0, &orbit, Some(0.0)).unwrap();
        assert_abs_diff_eq!(g, -11.0 / 48.0, epsilon = 1e-12);
        // odd in x: gamma(0) = 0
        assert_abs_diff_eq!(
            gamma_correction(0.0, &orbit, Some(0.0)).unwrap(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn gamma_generic_quadrature_matches_closed_form() {
        // evaluate on a polynomial copy of the harmonic well so the generic
        // branch runs, then compare against the closed form
        let pot = PotentialSpec::polynomial(vec![0.0, 0.0, 0.5], (-8.0, 8.0)).unwrap();
        let orbit = ClassicalOrbit::new(&pot, 1.0, &natural()).unwrap();
        let harm = PotentialSpec::harmonic(1.0, 8.0).unwrap();
        let horbit = ClassicalOrbit::new(&harm, 1.0, &natural()).unwrap();
        for &x in &[-1.1, -0.4, 0.3, 0.9, 1.25] {
            let generic = gamma_correction(x, &orbit, Some(0.0)).unwrap();
            let closed = gamma_correction(x, &horbit, Some(0.0)).unwrap();
            assert_abs_diff_eq!(generic, closed, epsilon = 1e-9);
        }
    }

    #[test]
    fn gamma_margin_enforced() {
        let orbit = harmonic_orbit(1.0);
        let near_edge = orbit.x_right - 1e-5;
        assert!(gamma_correction(near_edge, &orbit, None).is_err());
    }

    #[test]
    fn corrected_occupation_parity_and_limit() {
        let orbit = harmonic_orbit(10.5);
        let a = Bipartition::interval(-1.0, 1.0).unwrap();
        // hbar -> 0: result approaches P_cl
        let small = corrected_occupation(&a, &orbit, 1e-4).unwrap();
        let pcl = classical_probability(&a, &orbit).unwrap();
        assert!((small - pcl).abs() < 1e-3, "small-hbar {small} vs P_cl {pcl}");
        // symmetric interval: invariance under reflection
        let left = Bipartition::interval(-2.0, -0.5).unwrap();
        let right = Bipartition::interval(0.5, 2.0).unwrap();
        let l = corrected_occupation(&left, &orbit, 1.0).unwrap();
        let r = corrected_occupation(&right, &orbit, 1.0).unwrap();
        assert_abs_diff_eq!(l, r, epsilon = 1e-8);
    }

    #[test]
    fn classical_spectrum_and_entropy() {
        let spec = classical_rdm_spectrum(&[0.3, 0.6]).unwrap();
        assert_abs_diff_eq!(spec.sector(0)[0], 0.28, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.trace(), 1.0, epsilon = 1e-14);
        let all_half = classical_rdm_spectrum(&[0.5, 0.5, 0.5]).unwrap();
        for v in all_half.all_eigenvalues() {
            assert_abs_diff_eq!(v, 0.125, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(classical_entropy(&[0.5]), 2.0f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            classical_entropy(&[0.3]),
            0.6108643020548935,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            classical_entropy(&[0.5; 4]),
            4.0 * 2.0f64.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn microcanonical_identity() {
        let orbit = harmonic_orbit(6.5);
        let part = Bipartition::interval(-1.2, 0.4).unwrap();
        let pa = classical_probability(&part, &orbit).unwrap();
        let pb = classical_probability_complement(&part, &orbit).unwrap();
        let sa = microcanonical_entropy(&part, &orbit).unwrap();
        let sb = -pb.ln();
        assert_abs_diff_eq!(
            pa * sa + pb * sb,
            classical_entropy(&[pa]),
            epsilon = 1e-10
        );
        // -log(1/2) = log 2 sanity
        assert_abs_diff_eq!(-(0.5f64.ln()), 2.0f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn binomial_entropy_values() {
        assert_abs_diff_eq!(
            binomial_entropy(2, 0.5).unwrap(),
            1.5 * 2.0f64.ln(),
            epsilon = 1e-14
        );
        // N = 1 reduces to the binary entropy
        assert_abs_diff_eq!(
            binomial_entropy(1, 0.3).unwrap(),
            classical_entropy(&[0.3]),
            epsilon = 1e-14
        );
    }

    #[test]
    fn box_convergence_bound_in_eta() {
        // lambda(eta) = b - sin(2 pi eta b)/(2 pi eta); deviation bounded by 1/(2 pi eta)
        let b = 0.3;
        for eta in 1..=200u32 {
            let lam = b - (2.0 * std::f64::consts::PI * eta as f64 * b).sin()
                / (2.0 * std::f64::consts::PI * eta as f64);
            assert!((lam - b).abs() <= 1.0 / (2.0 * std::f64::consts::PI * eta as f64) + 1e-15);
        }
    }

    #[test]
    fn suggested_grid_resolves_harmonic_levels() {
        let pot = PotentialSpec::harmonic(1.0, 40.0).unwrap();
        let grid = suggest_grid(&pot, &natural(), 12).unwrap();
        let h = crate::lattice::build_hamiltonian(&grid, &pot, &natural()).unwrap();
        let modes = crate::lattice::solve_modes(&h, 12).unwrap();
        for (k, m) in modes.iter().enumerate() {
            assert!(
                (m.energy - (k as f64 + 0.5)).abs() < 5e-3,
                "eta = {}: E = {}",
                k + 1,
                m.energy
            );
        }
    }
}
