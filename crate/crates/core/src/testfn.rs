//! The radial test function `F` and its derivatives.
//!
//! `F(x) = ∫_{S²} e^{ω·x} dω` depends on `R = |x|` only and evaluates in
//! closed form to `F(R) = 4π sinh(R)/R`. It is positive, radially convex,
//! and solves `F'' + 2F'/R − F = 0` (it is an eigenfunction of the
//! Laplacian with eigenvalue 1). These properties are what make it a
//! useful weight for the averaged quantities computed in [`crate::diagnostics`].

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Below this radius `sinh(R)/R` is evaluated by a truncated Taylor series;
/// the direct quotient loses digits to cancellation as `R → 0`.
pub const SERIES_SWITCH_RADIUS: f64 = 0.5;

/// Reciprocal odd factorials `1/(2k+1)!` for `k = 0..=6`: the degree-12
/// Taylor coefficients of `sinh(R)/R` in `R²`. The truncation remainder at
/// the switch radius is below 5e-17 relative.
const SINHC_COEFFS: [f64; 7] = [
    1.0,
    1.0 / 6.0,
    1.0 / 120.0,
    1.0 / 5040.0,
    1.0 / 362_880.0,
    1.0 / 39_916_800.0,
    1.0 / 6_227_020_800.0,
];

/// Value and first two radial derivatives of `F` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile<T> {
    /// Euclidean radius `R = √(r² + z²)`.
    pub radius: T,
    /// `F(R) = 4π sinh(R)/R`.
    pub f: T,
    /// First radial derivative `F'(R)`; vanishes at `R = 0`.
    pub f_r: T,
    /// Second radial derivative `F''(R)`; strictly positive.
    pub f_rr: T,
}

impl<T: Real> RadialProfile<T> {
    /// Residual of the defining ODE, `F'' + 2F'/R − F`; meaningful for `R > 0`.
    pub fn ode_residual(&self) -> T {
        self.f_rr + T::cst(2.0) * self.f_r / self.radius - self.f
    }
}

/// Evaluate `F`, `F'`, `F''` at radius `R ≥ 0`.
pub fn eval_profile<T: Real>(radius: T) -> Result<RadialProfile<T>> {
    if !radius.is_finite() || radius < T::zero() {
        return Err(Error::Domain(format!(
            "test function radius must be finite and nonnegative, got {radius}"
        )));
    }
    let four_pi = T::four_pi();
    let (g, gp, gpp) = if radius < T::cst(SERIES_SWITCH_RADIUS) {
        sinhc_series(radius)
    } else {
        let r2 = radius * radius;
        let sinh = radius.sinh();
        let cosh = radius.cosh();
        let g = sinh / radius;
        let gp = (radius * cosh - sinh) / r2;
        let gpp = ((r2 + T::cst(2.0)) * sinh - T::cst(2.0) * radius * cosh) / (r2 * radius);
        (g, gp, gpp)
    };
    Ok(RadialProfile {
        radius,
        f: four_pi * g,
        f_r: four_pi * gp,
        f_rr: four_pi * gpp,
    })
}

/// Taylor evaluation of `g = sinh(R)/R` and its first two derivatives.
fn sinhc_series<T: Real>(radius: T) -> (T, T, T) {
    let r2 = radius * radius;
    let mut g = T::zero();
    let mut gp = T::zero();
    let mut gpp = T::zero();
    // Horner in R², highest power first.
    for k in (0..SINHC_COEFFS.len()).rev() {
        let c = T::cst(SINHC_COEFFS[k]);
        let two_k = T::cst(2.0 * k as f64);
        g = g * r2 + c;
        // d/dR Σ c_k R^{2k} = Σ 2k c_k R^{2k-1}; factor one R out so the
        // recurrences stay polynomial in R².
        gp = gp * r2 + two_k * c;
        gpp = gpp * r2 + two_k * (two_k - T::one()) * c;
    }
    (g, gp * radius, gpp)
}

/// Gradient `∇F(x) = F'(|x|) x/|x|`; zero at the origin.
pub fn grad_f<T: Real>(x: [T; 3]) -> Result<[T; 3]> {
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("gradient point must be finite".into()));
    }
    let radius = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if radius == T::zero() {
        return Ok([T::zero(); 3]);
    }
    let profile = eval_profile(radius)?;
    let scale = profile.f_r / radius;
    Ok([x[0] * scale, x[1] * scale, x[2] * scale])
}

/// Product quadrature of the surface integral `∫_{S²} e^{ω·x} dω`:
/// Gauss-Legendre in the polar cosine, periodic trapezoid in azimuth.
/// Spectrally accurate for this entire integrand family.
pub fn quad_f_oracle<T: Real>(x: [T; 3], n_polar: usize, n_azimuth: usize) -> Result<T> {
    let (nodes, weights) = polar_rule(n_polar, n_azimuth)?;
    let mut total = T::zero();
    let azimuth_weight = T::cst(2.0) * T::PI() / T::of_usize(n_azimuth);
    for (&c, &w) in nodes.iter().zip(weights.iter()) {
        let s = (T::one() - c * c).max(T::zero()).sqrt();
        let mut ring = T::zero();
        for m in 0..n_azimuth {
            let phi = T::cst(2.0) * T::PI() * T::of_usize(m) / T::of_usize(n_azimuth);
            let omega = [s * phi.cos(), s * phi.sin(), c];
            ring = ring + (omega[0] * x[0] + omega[1] * x[1] + omega[2] * x[2]).exp();
        }
        total = total + w * azimuth_weight * ring;
    }
    Ok(total)
}

/// Vector quadrature `∫_{S²} e^{ω·x} ω dω`, the oracle for [`grad_f`].
pub fn quad_grad_oracle<T: Real>(x: [T; 3], n_polar: usize, n_azimuth: usize) -> Result<[T; 3]> {
    let (nodes, weights) = polar_rule(n_polar, n_azimuth)?;
    let mut total = [T::zero(); 3];
    let azimuth_weight = T::cst(2.0) * T::PI() / T::of_usize(n_azimuth);
    for (&c, &w) in nodes.iter().zip(weights.iter()) {
        let s = (T::one() - c * c).max(T::zero()).sqrt();
        for m in 0..n_azimuth {
            let phi = T::cst(2.0) * T::PI() * T::of_usize(m) / T::of_usize(n_azimuth);
            let omega = [s * phi.cos(), s * phi.sin(), c];
            let kernel = (omega[0] * x[0] + omega[1] * x[1] + omega[2] * x[2]).exp();
            for d in 0..3 {
                total[d] = total[d] + w * azimuth_weight * kernel * omega[d];
            }
        }
    }
    Ok(total)
}

fn polar_rule<T: Real>(n_polar: usize, n_azimuth: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n_polar < 2 {
        return Err(Error::Config(format!(
            "quadrature needs n_polar >= 2, got {n_polar}"
        )));
    }
    if n_azimuth < 4 {
        return Err(Error::Config(format!(
            "quadrature needs n_azimuth >= 4, got {n_azimuth}"
        )));
    }
    Ok(gauss_legendre(n_polar))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let tol = T::epsilon() * T::cst(4.0);
    for i in 0..n {
        // Chebyshev-like initial guess.
        let theta = T::PI() * (T::of_usize(i) + T::cst(0.75)) / (T::of_usize(n) + T::cst(0.5));
        let mut x = theta.cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= tol {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = T::cst(2.0) / ((T::one() - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n` and derivative at `x` via the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::of_usize(k);
        let p2 = ((T::cst(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = T::of_usize(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// `F(R)·(1+R)·e^{−R}`, evaluated in overflow-safe form
/// `2π (1+R)(1 − e^{−2R})/R`. Decreases monotonically from `4π` at the
/// origin toward `2π` as `R → ∞`.
pub fn asymptotic_ratio<T: Real>(radius: T) -> T {
    debug_assert!(radius > T::zero() && radius.is_finite());
    let two_pi = T::cst(2.0) * T::PI();
    // sinh(R) e^{-R} = (1 - e^{-2R})/2, so the ratio never forms e^R.
    let one_m_exp = -(-(T::cst(2.0) * radius)).exp_m1();
    two_pi * (T::one() + radius) * one_m_exp / radius
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const FOUR_PI: f64 = 12.566370614359172;

    #[test]
    fn profile_at_origin() {
        let p = eval_profile(0.0_f64).unwrap();
        assert_relative_eq!(p.f, FOUR_PI, max_relative = 1e-15);
        assert_eq!(p.f_r, 0.0);
        assert_relative_eq!(p.f_rr, FOUR_PI / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn profile_at_one_matches_quadrature_oracle() {
        // Frozen from the 64x128 product quadrature of the surface integral
        // at |x| = 1; agrees with 4π sinh(1).
        let frozen = 14.768013745765291;
        let p = eval_profile(1.0_f64).unwrap();
        assert_relative_eq!(p.f, frozen, max_relative = 1e-12);
        let q = quad_f_oracle([0.0, 0.0, 1.0], 64, 128).unwrap();
        assert_relative_eq!(p.f, q, max_relative = 1e-12);
    }

    #[test]
    fn ode_residual_tiny_at_two() {
        let p = eval_profile(2.0_f64).unwrap();
        assert!(p.ode_residual().abs() <= 1e-12 * p.f);
    }

    #[test]
    fn ode_residual_over_log_spaced_scan() {
        for k in 0..1000 {
            let t = k as f64 / 999.0;
            let radius = 1e-3_f64 * (50.0_f64 / 1e-3).powf(t);
            let p = eval_profile(radius).unwrap();
            let tol = 1e-9 * p.f.max(1.0);
            assert!(
                p.ode_residual().abs() <= tol,
                "residual {} at R={radius}",
                p.ode_residual()
            );
            assert!(p.f > 0.0 && p.f_rr > 0.0, "positivity lost at R={radius}");
        }
    }

    #[test]
    fn series_and_closed_form_agree_at_switch() {
        let below = eval_profile(SERIES_SWITCH_RADIUS - 1e-12).unwrap();
        let above = eval_profile(SERIES_SWITCH_RADIUS + 1e-12).unwrap();
        assert_relative_eq!(below.f, above.f, max_relative = 1e-12);
        assert_relative_eq!(below.f_r, above.f_r, max_relative = 1e-10);
        assert_relative_eq!(below.f_rr, above.f_rr, max_relative = 1e-10);
    }

    #[test]
    fn quadrature_constant_integrand() {
        let q = quad_f_oracle([0.0_f64; 3], 8, 16).unwrap();
        assert_relative_eq!(q, FOUR_PI, max_relative = 1e-13);
    }

    #[test]
    fn quadrature_rotation_invariance() {
        let a = quad_f_oracle([3.0_f64, 4.0, 0.0], 64, 128).unwrap();
        let b = quad_f_oracle([0.0_f64, 0.0, 5.0], 64, 128).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
        let closed = eval_profile(5.0_f64).unwrap().f;
        assert_relative_eq!(b, closed, max_relative = 1e-10);
    }

    #[test]
    fn quadrature_agrees_with_closed_form_across_radii() {
        for radius in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
            let q = quad_f_oracle([0.0, 0.0, radius], 64, 128).unwrap();
            let c = eval_profile(radius).unwrap().f;
            assert_relative_eq!(q, c, max_relative = 1e-10);
        }
    }

    #[test]
    fn quadrature_node_validation() {
        assert!(quad_f_oracle([0.0_f64; 3], 1, 16).is_err());
        assert!(quad_f_oracle([0.0_f64; 3], 8, 3).is_err());
    }

    #[test]
    fn gradient_at_origin_and_on_axis() {
        assert_eq!(grad_f([0.0_f64; 3]).unwrap(), [0.0; 3]);
        let g = grad_f([0.0_f64, 0.0, 2.0]).unwrap();
        let p = eval_profile(2.0_f64).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 0.0);
        assert_relative_eq!(g[2], p.f_r, max_relative = 1e-14);
    }

    #[test]
    fn gradient_matches_vector_quadrature() {
        let x = [1.0_f64, 1.0, 1.0];
        let g = grad_f(x).unwrap();
        let q = quad_grad_oracle(x, 64, 128).unwrap();
        for d in 0..3 {
            assert_relative_eq!(g[d], q[d], max_relative = 1e-9);
        }
    }

    #[test]
    fn gradient_rejects_non_finite() {
        assert!(grad_f([f64::NAN, 0.0, 0.0]).is_err());
        assert!(eval_profile(-1.0_f64).is_err());
        assert!(eval_profile(f64::INFINITY).is_err());
    }

    #[test]
    fn asymptotic_ratio_limits_and_bracket() {
        // Frozen: 2π · (51/50) · (1 − e^{−100}).
        let frozen = 6.408849013323178;
        assert_relative_eq!(asymptotic_ratio(50.0_f64), frozen, max_relative = 1e-12);
        // Far limit approaches 2π like (1 + 1/R).
        let far = asymptotic_ratio(1.0e6_f64);
        assert_relative_eq!(far, 2.0 * std::f64::consts::PI, max_relative = 1e-5);
        // Near the origin the ratio approaches 4π.
        assert_relative_eq!(
            asymptotic_ratio(0.01_f64),
            FOUR_PI * 1.01 * (1.0 - (-0.02_f64).exp()) / 0.02,
            max_relative = 1e-12
        );
        // Monotone decreasing scan stays inside [2π, 4π].
        let mut prev = f64::INFINITY;
        for k in 0..500 {
            let t = k as f64 / 499.0;
            let radius = 0.01_f64 * (50.0_f64 / 0.01).powf(t);
            let val = asymptotic_ratio(radius);
            assert!(val > 0.0);
            assert!(val <= FOUR_PI * (1.0 + 1e-12) && val >= 2.0 * std::f64::consts::PI);
            assert!(val <= prev * (1.0 + 1e-12), "not monotone at R={radius}");
            prev = val;
        }
    }

    #[test]
    fn finite_differences_reproduce_derivatives_at_second_order() {
        let radius = 1.3_f64;
        let exact = eval_profile(radius).unwrap();
        let mut errs_1 = Vec::new();
        let mut errs_2 = Vec::new();
        let steps = [1e-2, 5e-3, 2.5e-3];
        for &h in &steps {
            let plus = eval_profile(radius + h).unwrap().f;
            let minus = eval_profile(radius - h).unwrap().f;
            let mid = exact.f;
            errs_1.push(((plus - minus) / (2.0 * h) - exact.f_r).abs());
            errs_2.push(((plus - 2.0 * mid + minus) / (h * h) - exact.f_rr).abs());
        }
        for errs in [errs_1, errs_2] {
            let order_a = (errs[0] / errs[1]).log2();
            let order_b = (errs[1] / errs[2]).log2();
            assert!(order_a > 1.9 && order_b > 1.9, "orders {order_a}, {order_b}");
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let p32 = eval_profile(1.0_f32).unwrap();
        let p64 = eval_profile(1.0_f64).unwrap();
        assert!((p32.f as f64 - p64.f).abs() < 1e-5 * p64.f);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre::<f64>(6);
        // Degree-11 monomial is exact for a 6-point rule.
        let quad: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * x.powi(10))
            .sum();
        assert_relative_eq!(quad, 2.0 / 11.0, max_relative = 1e-13);
        let total: f64 = weights.iter().sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-14);
    }
}
