//! Local cubic interpolation of uniformly sampled wave functions.

use num_complex::Complex64;

/// Complex samples on a uniform grid x0 + k·dx, zero outside the sampled
/// window (hard walls or exponentially dead tails).
#[derive(Debug, Clone)]
pub struct UniformSamples {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

impl UniformSamples {
    /// 4-point Lagrange interpolation; one-sided stencils at the window edge.
    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.values.len();
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let t = (x - self.x0) / self.dx;
        if t < -1.0 || t > n as f64 {
            return Complex64::new(0.0, 0.0);
        }
        if n < 4 {
            // degenerate tiny grids: nearest sample
            let k = (t.round().max(0.0) as usize).min(n - 1);
            return self.values[k];
        }
        let j = (t.floor() as isize).clamp(1, n as isize - 3) as usize;
        let s = t - j as f64; // offset from node j, in cell units
        let vm1 = self.val_or_zero(j as isize - 1);
        let v0 = self.values[j];
        let v1 = self.values[j + 1];
        let v2 = self.val_or_zero(j as isize + 2);
        // Lagrange weights for nodes at -1, 0, 1, 2
        let wm1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let w0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let w1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let w2 = (s + 1.0) * s * (s - 1.0) / 6.0;
        vm1 * wm1 + v0 * w0 + v1 * w1 + v2 * w2
    }

    fn val_or_zero(&self, k: isize) -> Complex64 {
        if k < 0 || k as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[k as usize]
        }
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.dx * (self.values.len().saturating_sub(1)) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_exactly() {
        let f = |x: f64| 1.0 + x - 2.0 * x * x + 0.5 * x * x * x;
        let values: Vec<Complex64> = (0..50)
            .map(|k| Complex64::new(f(0.1 * k as f64), 0.0))
            .collect();
        let s = UniformSamples {
            x0: 0.0,
            dx: 0.1,
            values,
        };
        for &x in &[0.05, 0.333, 2.71, 4.8] {
            assert!((s.eval(x).re - f(x)).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn sine_accuracy() {
        let values: Vec<Complex64> = (0..=2000)
            .map(|k| Complex64::new((std::f64::consts::PI * 3.0 * 0.0005 * k as f64).sin(), 0.0))
            .collect();
        let s = UniformSamples {
            x0: 0.0,
            dx: 0.0005,
            values,
        };
        let mut worst: f64 = 0.0;
        for i in 0..999 {
            let x = 0.001 * i as f64 + 0.00025;
            let exact = (std::f64::consts::PI * 3.0 * x).sin();
            worst = worst.max((s.eval(x).re - exact).abs());
        }
        assert!(worst < 1e-9, "worst = {worst:.3e}");
    }
}
