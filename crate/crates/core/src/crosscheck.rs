//! Finite-difference cross-check of the cylindrical operator formulas.
//!
//! Every differential operator used by the reduced system has a closed
//! cylindrical form for axisymmetric fields. The harness lifts a smooth
//! axisymmetric field to Cartesian coordinates, evaluates each operator by
//! centered finite differences there, rotates the result back into the
//! `(e^r, e^θ, e^z)` frame, and compares against the cylindrical formula
//! evaluated from exact derivatives. Discrepancies must shrink at second
//! order in the step.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Discrepancies below this are considered rounding noise; a convergence
/// order cannot be measured there (identities with no differentiation, such
/// as the cross product, sit at this floor for every step size).
pub const ROUNDING_FLOOR: f64 = 1e-12;

/// One smooth separable term `a · r^m z^l · e^{−α r² − β z²}`.
#[derive(Debug, Clone, Copy)]
pub struct GaussTerm<T> {
    pub amp: T,
    pub pow_r: i32,
    pub pow_z: i32,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> GaussTerm<T> {
    fn radial(&self, r: T) -> (T, T, T) {
        envelope(r, self.pow_r, self.alpha)
    }

    fn axial(&self, z: T) -> (T, T, T) {
        envelope(z, self.pow_z, self.beta)
    }

    fn value(&self, r: T, z: T) -> T {
        self.amp * self.radial(r).0 * self.axial(z).0
    }

    fn d_r(&self, r: T, z: T) -> T {
        self.amp * self.radial(r).1 * self.axial(z).0
    }

    fn d_z(&self, r: T, z: T) -> T {
        self.amp * self.radial(r).0 * self.axial(z).1
    }

    fn d_rr(&self, r: T, z: T) -> T {
        self.amp * self.radial(r).2 * self.axial(z).0
    }

    fn d_zz(&self, r: T, z: T) -> T {
        self.amp * self.radial(r).0 * self.axial(z).2
    }
}

/// `x^k e^{−a x²}` with first and second derivatives; `k ≥ 0`.
fn envelope<T: Real>(x: T, k: i32, a: T) -> (T, T, T) {
    let e = (-a * x * x).exp();
    let kf = T::cst(k as f64);
    let two_a = T::cst(2.0) * a;
    let xk = x.powi(k);
    let v = xk * e;
    let d1_poly = if k >= 1 { kf * x.powi(k - 1) } else { T::zero() } - two_a * x.powi(k + 1);
    let d2_poly = if k >= 2 {
        kf * (kf - T::one()) * x.powi(k - 2)
    } else {
        T::zero()
    } - two_a * (T::cst(2.0 * k as f64) + T::one()) * xk
        + two_a * two_a * x.powi(k + 2);
    (v, d1_poly * e, d2_poly * e)
}

/// Closed-form axisymmetric scalar component with exact partials.
#[derive(Debug, Clone, Default)]
pub struct ScalarField2D<T> {
    pub terms: Vec<GaussTerm<T>>,
}

impl<T: Real> ScalarField2D<T> {
    pub fn value(&self, r: T, z: T) -> T {
        self.terms.iter().map(|t| t.value(r, z)).sum()
    }
    pub fn d_r(&self, r: T, z: T) -> T {
        self.terms.iter().map(|t| t.d_r(r, z)).sum()
    }
    pub fn d_z(&self, r: T, z: T) -> T {
        self.terms.iter().map(|t| t.d_z(r, z)).sum()
    }
    pub fn d_rr(&self, r: T, z: T) -> T {
        self.terms.iter().map(|t| t.d_rr(r, z)).sum()
    }
    pub fn d_zz(&self, r: T, z: T) -> T {
        self.terms.iter().map(|t| t.d_zz(r, z)).sum()
    }
}

/// Smooth axisymmetric vector/scalar field set: velocity and magnetic field
/// with all three cylindrical components plus a pressure-like scalar. The
/// components depend on `(r, z)` only.
#[derive(Debug, Clone)]
pub struct AxisymmetricField<T> {
    pub ur: ScalarField2D<T>,
    pub utheta: ScalarField2D<T>,
    pub uz: ScalarField2D<T>,
    pub br: ScalarField2D<T>,
    pub btheta: ScalarField2D<T>,
    pub bz: ScalarField2D<T>,
    pub pressure: ScalarField2D<T>,
}

/// Draw a random smooth field. Azimuthal components get at least one power
/// of `r` so the lifted Cartesian field stays smooth near the axis.
pub fn sample_field<T: Real, R: Rng>(rng: &mut R) -> AxisymmetricField<T> {
    let mut scalar = |min_pow_r: i32| {
        let n_terms = rng.gen_range(1..=2);
        let terms = (0..n_terms)
            .map(|_| GaussTerm {
                amp: T::cst(rng.gen_range(-1.0..1.0)),
                pow_r: rng.gen_range(min_pow_r..=min_pow_r + 2),
                pow_z: rng.gen_range(0..=2),
                alpha: T::cst(rng.gen_range(0.3..1.2)),
                beta: T::cst(rng.gen_range(0.3..1.2)),
            })
            .collect();
        ScalarField2D { terms }
    };
    AxisymmetricField {
        ur: scalar(0),
        utheta: scalar(1),
        uz: scalar(0),
        br: scalar(0),
        btheta: scalar(1),
        bz: scalar(0),
        pressure: scalar(0),
    }
}

#[derive(Debug, Clone, Copy)]
struct Frame<T> {
    r: T,
    z: T,
    e_r: [T; 3],
    e_theta: [T; 3],
    e_z: [T; 3],
}

fn frame_at<T: Real>(x: [T; 3]) -> Frame<T> {
    let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let (c, s) = (x[0] / r, x[1] / r);
    Frame {
        r,
        z: x[2],
        e_r: [c, s, T::zero()],
        e_theta: [-s, c, T::zero()],
        e_z: [T::zero(), T::zero(), T::one()],
    }
}

fn to_cart<T: Real>(frame: &Frame<T>, vr: T, vt: T, vz: T) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for d in 0..3 {
        out[d] = vr * frame.e_r[d] + vt * frame.e_theta[d] + vz * frame.e_z[d];
    }
    out
}

fn to_cyl<T: Real>(frame: &Frame<T>, v: [T; 3]) -> [T; 3] {
    let dot = |a: &[T; 3]| a[0] * v[0] + a[1] * v[1] + a[2] * v[2];
    [dot(&frame.e_r), dot(&frame.e_theta), dot(&frame.e_z)]
}

fn velocity_cart<T: Real>(field: &AxisymmetricField<T>, x: [T; 3]) -> [T; 3] {
    let f = frame_at(x);
    to_cart(
        &f,
        field.ur.value(f.r, f.z),
        field.utheta.value(f.r, f.z),
        field.uz.value(f.r, f.z),
    )
}

fn magnetic_cart<T: Real>(field: &AxisymmetricField<T>, x: [T; 3]) -> [T; 3] {
    let f = frame_at(x);
    to_cart(
        &f,
        field.br.value(f.r, f.z),
        field.btheta.value(f.r, f.z),
        field.bz.value(f.r, f.z),
    )
}

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn shifted<T: Real>(x: [T; 3], dir: usize, h: T) -> [T; 3] {
    let mut y = x;
    y[dir] = y[dir] + h;
    y
}

/// Centered-difference Jacobian `G_ij = ∂f_i/∂x_j`.
fn fd_jacobian<T: Real>(f: impl Fn([T; 3]) -> [T; 3], x: [T; 3], h: T) -> [[T; 3]; 3] {
    let mut g = [[T::zero(); 3]; 3];
    for j in 0..3 {
        let plus = f(shifted(x, j, h));
        let minus = f(shifted(x, j, -h));
        for i in 0..3 {
            g[i][j] = (plus[i] - minus[i]) / (T::cst(2.0) * h);
        }
    }
    g
}

fn fd_grad_scalar<T: Real>(f: impl Fn([T; 3]) -> T, x: [T; 3], h: T) -> [T; 3] {
    let mut g = [T::zero(); 3];
    for j in 0..3 {
        g[j] = (f(shifted(x, j, h)) - f(shifted(x, j, -h))) / (T::cst(2.0) * h);
    }
    g
}

fn fd_laplacian_vec<T: Real>(f: impl Fn([T; 3]) -> [T; 3], x: [T; 3], h: T) -> [T; 3] {
    let center = f(x);
    let mut lap = [T::zero(); 3];
    for j in 0..3 {
        let plus = f(shifted(x, j, h));
        let minus = f(shifted(x, j, -h));
        for i in 0..3 {
            lap[i] = lap[i] + (plus[i] - T::cst(2.0) * center[i] + minus[i]) / (h * h);
        }
    }
    lap
}

fn curl_from_jacobian<T: Real>(g: &[[T; 3]; 3]) -> [T; 3] {
    [
        g[2][1] - g[1][2],
        g[0][2] - g[2][0],
        g[1][0] - g[0][1],
    ]
}

fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), |acc, v| acc.max(v))
}

/// Discrepancy record for one operator identity.
#[derive(Debug, Clone)]
pub struct OperatorCheck<T> {
    pub name: &'static str,
    /// `(h, max-abs discrepancy)` per step.
    pub errors: Vec<(T, T)>,
    /// Least-squares slope of `log err` vs `log h`; `None` at the floor.
    pub order: Option<T>,
    /// All discrepancies below [`ROUNDING_FLOOR`]: nothing left to converge.
    pub at_floor: bool,
}

impl<T: Real> OperatorCheck<T> {
    /// The identity is verified if the discrepancy either converges at
    /// second order (within `min_order`) or is already rounding-level.
    pub fn passes(&self, min_order: T) -> bool {
        self.at_floor || self.order.map_or(false, |p| p >= min_order)
    }
}

struct Discrepancies<T> {
    names: Vec<&'static str>,
    values: Vec<T>,
}

/// Evaluate every operator discrepancy at one step size.
fn discrepancies_at<T: Real>(
    field: &AxisymmetricField<T>,
    x: [T; 3],
    h: T,
    include_laplacian: bool,
) -> Discrepancies<T> {
    let f = frame_at(x);
    let (r, z) = (f.r, f.z);

    let ur = field.ur.value(r, z);
    let ut = field.utheta.value(r, z);
    let uz = field.uz.value(r, z);
    let br = field.br.value(r, z);
    let bt = field.btheta.value(r, z);
    let bz = field.bz.value(r, z);

    let d = |s: &ScalarField2D<T>| (s.d_r(r, z), s.d_z(r, z));
    let (ur_r, ur_z) = d(&field.ur);
    let (ut_r, ut_z) = d(&field.utheta);
    let (uz_r, uz_z) = d(&field.uz);
    let (br_r, br_z) = d(&field.br);
    let (bt_r, bt_z) = d(&field.btheta);
    let (bz_r, bz_z) = d(&field.bz);

    let vel = |p| velocity_cart(field, p);
    let mag = |p| magnetic_cart(field, p);

    let mut names = Vec::new();
    let mut values = Vec::new();
    let mut push = |name, v| {
        names.push(name);
        values.push(v);
    };

    // Divergence: ∇·u = u^r/r + ∂_r u^r + ∂_z u^z.
    let jac_u = fd_jacobian(vel, x, h);
    let div_fd = jac_u[0][0] + jac_u[1][1] + jac_u[2][2];
    let div_formula = ur / r + ur_r + uz_z;
    push("divu", (div_fd - div_formula).abs());

    // Pressure gradient: (∂_r p, 0, ∂_z p).
    let grad_fd = to_cyl(&f, fd_grad_scalar(|p| field.pressure.value(frame_at(p).r, p[2]), x, h));
    let grad_formula = [field.pressure.d_r(r, z), T::zero(), field.pressure.d_z(r, z)];
    push("grap", max_abs_diff(&grad_fd, &grad_formula));

    // Velocity gradient tensor in the cylindrical frame.
    let mut grau_fd = [[T::zero(); 3]; 3];
    let basis = [f.e_r, f.e_theta, f.e_z];
    for (a, ea) in basis.iter().enumerate() {
        for (b, eb) in basis.iter().enumerate() {
            let mut acc = T::zero();
            for i in 0..3 {
                for j in 0..3 {
                    acc = acc + ea[i] * jac_u[i][j] * eb[j];
                }
            }
            grau_fd[a][b] = acc;
        }
    }
    let grau_formula = [
        [ur_r, -ut / r, ur_z],
        [ut_r, ur / r, ut_z],
        [uz_r, T::zero(), uz_z],
    ];
    let grau_err = grau_fd
        .iter()
        .flatten()
        .zip(grau_formula.iter().flatten())
        .map(|(&a, &b)| (a - b).abs())
        .fold(T::zero(), |acc, v| acc.max(v));
    push("grau", grau_err);

    // Advection u·∇u.
    let u_cart = vel(x);
    let mut adv_cart = [T::zero(); 3];
    for i in 0..3 {
        for j in 0..3 {
            adv_cart[i] = adv_cart[i] + u_cart[j] * jac_u[i][j];
        }
    }
    let adv_fd = to_cyl(&f, adv_cart);
    let adv_formula = [
        ur * ur_r - ut * ut / r + uz * ur_z,
        ur * ut_r + ut * ur / r + uz * ut_z,
        ur * uz_r + uz * uz_z,
    ];
    push("ugrau", max_abs_diff(&adv_fd, &adv_formula));

    // Curl of the magnetic field.
    let jac_b = fd_jacobian(mag, x, h);
    let curl_fd = to_cyl(&f, curl_from_jacobian(&jac_b));
    let curl_formula = [-bt_z, br_z - bz_r, bt_r + bt / r];
    push("curlB1", max_abs_diff(&curl_fd, &curl_formula));

    // Lorentz-type product (∇×B)×B.
    let b_cart = mag(x);
    let cbb_fd = to_cyl(&f, cross(curl_from_jacobian(&jac_b), b_cart));
    let cbb_formula = [
        br_z * bz - bz_r * bz - bt_r * bt - bt * bt / r,
        bt_z * bz + bt_r * br + br * bt / r,
        -bt_z * bt - br_z * br + bz_r * br,
    ];
    push("curlBB", max_abs_diff(&cbb_fd, &cbb_formula));

    // Cross product u×B: purely algebraic, sits at the rounding floor.
    let ub_fd = to_cyl(&f, cross(u_cart, b_cart));
    let ub_formula = [ut * bz - uz * bt, uz * br - ur * bz, ur * bt - ut * br];
    push("UB", max_abs_diff(&ub_fd, &ub_formula));

    // Induction term ∇×(u×B): the curl applied to E = u×B.
    let e_field = |p| cross(vel(p), mag(p));
    let jac_e = fd_jacobian(e_field, x, h);
    let cue_fd = to_cyl(&f, curl_from_jacobian(&jac_e));
    let e_r = ut * bz - uz * bt;
    let e_t = uz * br - ur * bz;
    let e_z = ur * bt - ut * br;
    let e_r_z = ut_z * bz + ut * bz_z - uz_z * bt - uz * bt_z;
    let e_t_r = uz_r * br + uz * br_r - ur_r * bz - ur * bz_r;
    let e_t_z = uz_z * br + uz * br_z - ur_z * bz - ur * bz_z;
    let e_z_r = ur_r * bt + ur * bt_r - ut_r * br - ut * br_r;
    let _ = e_r;
    let cue_formula = [-e_t_z, e_r_z - e_z_r, e_t_r + e_t / r];
    push("curlUB", max_abs_diff(&cue_fd, &cue_formula));

    if include_laplacian {
        let lap_fd = to_cyl(&f, fd_laplacian_vec(vel, x, h));
        let lap_formula = [
            field.ur.d_rr(r, z) + ur_r / r - ur / (r * r) + field.ur.d_zz(r, z),
            field.utheta.d_rr(r, z) + ut_r / r - ut / (r * r) + field.utheta.d_zz(r, z),
            field.uz.d_rr(r, z) + uz_r / r + field.uz.d_zz(r, z),
        ];
        push("laplacian_u", max_abs_diff(&lap_fd, &lap_formula));
    }

    Discrepancies { names, values }
}

/// Run the cross-check at each step size and measure convergence orders.
///
/// `include_laplacian` adds the vector Laplacian, which the reduced system
/// never uses; it rides along as an extra identity.
pub fn cartesian_crosscheck<T: Real>(
    field: &AxisymmetricField<T>,
    point: [T; 3],
    steps: &[T],
    include_laplacian: bool,
) -> Result<Vec<OperatorCheck<T>>> {
    if steps.is_empty() {
        return Err(Error::Config("crosscheck needs at least one step".into()));
    }
    let max_h = steps.iter().fold(T::zero(), |a, &h| a.max(h));
    let radius = (point[0] * point[0] + point[1] * point[1]).sqrt();
    if !(radius > T::cst(10.0) * max_h) {
        return Err(Error::Domain(format!(
            "crosscheck point too close to the axis: cylindrical radius {radius} <= 10h = {}",
            T::cst(10.0) * max_h
        )));
    }

    let mut per_h: Vec<Discrepancies<T>> = Vec::new();
    for &h in steps {
        per_h.push(discrepancies_at(field, point, h, include_laplacian));
    }

    let names = per_h[0].names.clone();
    let mut out = Vec::new();
    for (k, name) in names.iter().enumerate() {
        let errors: Vec<(T, T)> = steps
            .iter()
            .zip(per_h.iter())
            .map(|(&h, d)| (h, d.values[k]))
            .collect();
        let max_err = errors.iter().fold(T::zero(), |a, &(_, e)| a.max(e));
        let at_floor = max_err < T::cst(ROUNDING_FLOOR);
        let order = if at_floor || steps.len() < 2 {
            None
        } else {
            Some(log_log_slope(&errors))
        };
        out.push(OperatorCheck {
            name,
            errors,
            order,
            at_floor,
        });
    }
    Ok(out)
}

/// Least-squares slope of `ln err` against `ln h`.
fn log_log_slope<T: Real>(errors: &[(T, T)]) -> T {
    let n = T::of_usize(errors.len());
    let mut sx = T::zero();
    let mut sy = T::zero();
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for &(h, e) in errors {
        let x = h.ln();
        let y = e.max(T::cst(1e-300)).ln();
        sx = sx + x;
        sy = sy + y;
        sxx = sxx + x * x;
        sxy = sxy + x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bump_field() -> AxisymmetricField<f64> {
        // u = (r, 0, z)·e^{−r²−z²}, B = 0, p = e^{−r²−z²}.
        let term = |amp: f64, pr: i32, pz: i32| ScalarField2D {
            terms: vec![GaussTerm {
                amp,
                pow_r: pr,
                pow_z: pz,
                alpha: 1.0,
                beta: 1.0,
            }],
        };
        AxisymmetricField {
            ur: term(1.0, 1, 0),
            utheta: ScalarField2D::default(),
            uz: term(1.0, 0, 1),
            br: ScalarField2D::default(),
            btheta: ScalarField2D::default(),
            bz: ScalarField2D::default(),
            pressure: term(1.0, 0, 0),
        }
    }

    #[test]
    fn divergence_of_bump_velocity_close_at_small_step() {
        let field = bump_field();
        let checks =
            cartesian_crosscheck(&field, [0.9, 0.4, 0.3], &[1e-3], false).unwrap();
        let divu = checks.iter().find(|c| c.name == "divu").unwrap();
        assert!(divu.errors[0].1 < 1e-5, "divu err {}", divu.errors[0].1);
    }

    #[test]
    fn magnetic_bump_matches_reduced_lorentz_product() {
        // B^θ = r e^{−r²−z²} alone: (∇×B)×B reduces to
        // (−B ∂_r B − B²/r, 0, −B ∂_z B).
        let mut field = bump_field();
        field.ur = ScalarField2D::default();
        field.uz = ScalarField2D::default();
        field.btheta = ScalarField2D {
            terms: vec![GaussTerm {
                amp: 1.0,
                pow_r: 1,
                pow_z: 0,
                alpha: 1.0,
                beta: 1.0,
            }],
        };
        let checks =
            cartesian_crosscheck(&field, [1.1, -0.2, 0.5], &[1e-2, 5e-3, 2.5e-3], false).unwrap();
        let cbb = checks.iter().find(|c| c.name == "curlBB").unwrap();
        assert!(cbb.passes(1.9), "curlBB order {:?}", cbb.order);
    }

    #[test]
    fn zero_fields_zero_operators() {
        let field = AxisymmetricField::<f64> {
            ur: ScalarField2D::default(),
            utheta: ScalarField2D::default(),
            uz: ScalarField2D::default(),
            br: ScalarField2D::default(),
            btheta: ScalarField2D::default(),
            bz: ScalarField2D::default(),
            pressure: ScalarField2D::default(),
        };
        let checks = cartesian_crosscheck(&field, [1.0, 0.0, 0.0], &[1e-2], true).unwrap();
        for c in &checks {
            assert!(c.at_floor, "{} not at floor", c.name);
        }
    }

    #[test]
    fn random_fields_converge_at_second_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let steps = [1e-2, 5e-3, 2.5e-3];
        for _ in 0..2 {
            let field: AxisymmetricField<f64> = sample_field(&mut rng);
            for _ in 0..4 {
                let r = rng.gen_range(0.5..2.5);
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                let z = rng.gen_range(-1.5..1.5);
                let point = [r * theta.cos(), r * theta.sin(), z];
                let checks = cartesian_crosscheck(&field, point, &steps, true).unwrap();
                for c in &checks {
                    assert!(
                        c.passes(1.9),
                        "{} failed: order {:?}, errors {:?}",
                        c.name,
                        c.order,
                        c.errors
                    );
                }
            }
        }
    }

    #[test]
    fn near_axis_point_rejected() {
        let field = bump_field();
        assert!(cartesian_crosscheck(&field, [0.05, 0.0, 0.2], &[1e-2], false).is_err());
    }
}
