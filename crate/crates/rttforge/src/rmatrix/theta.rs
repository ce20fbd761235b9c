//! Jacobi θ₁, the Kronecker kernel and the scalar kernels of the elliptic r-matrix.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Number of θ-series terms; with Im τ ≥ 0.5 the tail is below 1e−14.
pub const THETA_TERMS: usize = 30;

#[derive(Clone, Debug)]
pub struct EllipticKernel {
    pub n: usize,
    pub tau: Complex64,
    th1p0: Complex64,
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

impl EllipticKernel {
    pub fn new(n: usize, tau: Complex64) -> EllipticKernel {
        let mut k = EllipticKernel { n, tau, th1p0: Complex64::new(0.0, 0.0) };
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..THETA_TERMS {
            let e = (m as f64 + 0.5).powi(2);
            let s = if m % 2 == 0 { 1.0 } else { -1.0 };
            acc += s * (2 * m + 1) as f64 * (i() * PI * tau * e).exp();
        }
        k.th1p0 = 2.0 * PI * acc;
        k
    }

    /// θ₁(z|τ) = 2 Σ (−1)^m q^{(m+1/2)²} sin((2m+1)πz), q = e^{iπτ}.
    pub fn theta1(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..THETA_TERMS {
            let e = (m as f64 + 0.5).powi(2);
            let s = if m % 2 == 0 { 1.0 } else { -1.0 };
            acc += s * (i() * PI * self.tau * e).exp() * ((2 * m + 1) as f64 * PI * z).sin();
        }
        2.0 * acc
    }

    /// θ₁'(0)θ₁(w+v)/(θ₁(w)θ₁(v)); residue 1 at w = 0.
    pub fn kronecker(&self, w: Complex64, v: Complex64) -> Complex64 {
        self.th1p0 * self.theta1(w + v) / (self.theta1(w) * self.theta1(v))
    }

    /// φ_{pq}(u) = N e^{2πiqu} K(Nu, (p + qτ)/N), (p, q) ≠ (0, 0).
    pub fn phi(&self, p: i64, q: i64, u: Complex64) -> Complex64 {
        let n = self.n as f64;
        let v = (p as f64 + q as f64 * self.tau) / n;
        n * (2.0 * PI * i() * q as f64 * u).exp() * self.kronecker(n * u, v)
    }

    /// Distance from 0 to the nearest other pole of φ, i.e. of Γ = (Z + τZ)/N.
    pub fn pole_gap(&self) -> f64 {
        let n = self.n as f64;
        let mut best = f64::INFINITY;
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                if a == 0 && b == 0 {
                    continue;
                }
                let z = (a as f64 + b as f64 * self.tau) / n;
                best = best.min(z.norm());
            }
        }
        best
    }

    /// Taylor coefficients a_0..=a_kmax of φ_{pq}(u) − 1/u at 0, by a discrete
    /// Cauchy integral on a circle of half the pole gap.
    pub fn laurent(&self, p: i64, q: i64, kmax: usize) -> Vec<Complex64> {
        let rho = 0.5 * self.pole_gap();
        taylor_on_circle(|u| self.phi(p, q, u) - 1.0 / u, Complex64::new(0.0, 0.0), rho, kmax)
    }

    /// Points of Γ in the fundamental domain, as (a, b) with γ = (a + bτ)/N.
    pub fn gamma_points(&self) -> Vec<(i64, i64, Complex64)> {
        let n = self.n as i64;
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                out.push((a, b, (a as f64 + b as f64 * self.tau) / n as f64));
            }
        }
        out
    }
}

/// Laurent coefficients c_k (k = −kneg..=kpos) of f at `center` from samples on a circle.
pub fn laurent_on_circle(f: impl Fn(Complex64) -> Complex64, center: Complex64, rho: f64, kneg: usize, kpos: usize) -> Vec<(i64, Complex64)> {
    let m = 128usize.max(2 * (kneg + kpos + 8));
    let vals: Vec<(Complex64, Complex64)> = (0..m)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / m as f64;
            let z = Complex64::from_polar(1.0, th);
            (z, f(center + rho * z))
        })
        .collect();
    let mut out = Vec::new();
    for k in -(kneg as i64)..=kpos as i64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (z, v) in &vals {
            acc += v * z.powi(-k as i32);
        }
        out.push((k, acc / m as f64 / rho.powi(k as i32)));
    }
    out
}

fn taylor_on_circle(f: impl Fn(Complex64) -> Complex64, center: Complex64, rho: f64, kmax: usize) -> Vec<Complex64> {
    laurent_on_circle(f, center, rho, 0, kmax).into_iter().map(|(_, c)| c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_is_odd_and_quasiperiodic() {
        let k = EllipticKernel::new(2, Complex64::new(0.1, 1.0));
        let z = Complex64::new(0.23, 0.11);
        assert!((k.theta1(-z) + k.theta1(z)).norm() < 1e-13);
        // θ₁(z + 1) = −θ₁(z)
        assert!((k.theta1(z + 1.0) + k.theta1(z)).norm() < 1e-13);
        // θ₁(z + τ) = −e^{−iπτ − 2πiz} θ₁(z)
        let f = -(-i() * PI * k.tau - 2.0 * PI * i() * z).exp();
        assert!((k.theta1(z + k.tau) - f * k.theta1(z)).norm() < 1e-12);
    }

    #[test]
    fn kernel_has_unit_residue() {
        let k = EllipticKernel::new(3, Complex64::new(0.0, 1.0));
        for (p, q) in [(1, 0), (0, 1), (2, 1)] {
            let d = 1e-6;
            let u = Complex64::new(d, 0.0);
            assert!((u * k.phi(p, q, u) - 1.0).norm() < 1e-5);
        }
    }
}
