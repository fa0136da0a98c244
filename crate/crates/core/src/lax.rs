//! The overdetermined linear shift system whose compatibility condition
//! is the quad equation, its scalar three-point forms, and the
//! second-difference potentials of the u picture.
//!
//! Edge differences are picture-aware: in the u picture an n-step
//! difference carries `alpha0` and an m-step difference carries `beta0`,
//! so every formula here produces identical values on a window and on
//! its gauged image.

use crate::error::Error;
use crate::lattice::{LatticeWindow, Picture, QuadParams, Site};
use crate::numerics::Scalar;
use crate::Result;

/// Shift direction on the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    N,
    M,
}

impl Direction {
    pub fn step(self) -> Site {
        match self {
            Direction::N => (1, 0),
            Direction::M => (0, 1),
        }
    }

    /// The lattice parameter tied to shifts in this direction.
    pub fn lattice_parameter(self, params: &QuadParams) -> &Scalar {
        match self {
            Direction::N => &params.alpha1,
            Direction::M => &params.alpha2,
        }
    }

    /// The gauge constant folded into differences in this direction.
    pub fn gauge_shift(self, params: &QuadParams) -> &Scalar {
        match self {
            Direction::N => &params.alpha0,
            Direction::M => &params.beta0,
        }
    }
}

/// 2x2 scalar matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix2(pub [[Scalar; 2]; 2]);

impl Matrix2 {
    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        let a = &self.0;
        let b = &rhs.0;
        Matrix2(core::array::from_fn(|i| {
            core::array::from_fn(|j| {
                &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j])
            })
        }))
    }

    pub fn sub(&self, rhs: &Matrix2) -> Matrix2 {
        Matrix2(core::array::from_fn(|i| core::array::from_fn(|j| &self.0[i][j] - &rhs.0[i][j])))
    }

    pub fn apply(&self, v: &[Scalar; 2]) -> [Scalar; 2] {
        core::array::from_fn(|i| &(&self.0[i][0] * &v[0]) + &(&self.0[i][1] * &v[1]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|row| row.iter().all(Scalar::is_zero))
    }

    /// Largest entry magnitude (float kind).
    pub fn max_abs(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for row in &self.0 {
            for v in row {
                worst = worst.max(v.primal_abs()?);
            }
        }
        Ok(worst)
    }
}

/// Forward x-difference `x_{site + step} - x_{site}` read off a window in
/// either picture.
pub fn forward_diff(
    params: &QuadParams,
    window: &LatticeWindow,
    site: Site,
    dir: Direction,
) -> Result<Scalar> {
    let (dn, dm) = dir.step();
    let here = window.value(site.0, site.1)?;
    let there = window.value(site.0 + dn, site.1 + dm)?;
    let diff = there - here;
    match window.picture() {
        Picture::X => Ok(diff),
        Picture::U => Ok(&diff + &dir.gauge_shift(params).lift_like(&diff)),
    }
}

/// The shift matrix attached to `site` in direction `dir`:
/// unit diagonal, `x_here - x_next` top-right, and
/// `lambda * alpha / (x_here - x_next)` bottom-left.
pub fn lax_matrix(
    params: &QuadParams,
    window: &LatticeWindow,
    site: Site,
    dir: Direction,
    lambda: &Scalar,
) -> Result<Matrix2> {
    let d = -&forward_diff(params, window, site, dir)?;
    if d.is_zero() {
        return Err(Error::Pole { what: "lax edge difference" });
    }
    let one = d.one_like();
    let alpha = dir.lattice_parameter(params).lift_like(&d);
    let lower = (&lambda.lift_like(&d) * &alpha).try_div(&d, "lax edge difference")?;
    Ok(Matrix2([[one.clone(), d], [lower, one]]))
}

/// Compatibility residual at the plaquette rooted at `(n, m)`:
/// `L(n, m+1) M(n, m) - M(n+1, m) L(n, m)`. Exactly zero for every
/// `lambda` when the plaquette is on-shell, and zero at `lambda = 0`
/// regardless.
pub fn compat_residual(
    params: &QuadParams,
    window: &LatticeWindow,
    n: i64,
    m: i64,
    lambda: &Scalar,
) -> Result<Matrix2> {
    let l_up = lax_matrix(params, window, (n, m + 1), Direction::N, lambda)?;
    let m_here = lax_matrix(params, window, (n, m), Direction::M, lambda)?;
    let m_right = lax_matrix(params, window, (n + 1, m), Direction::M, lambda)?;
    let l_here = lax_matrix(params, window, (n, m), Direction::N, lambda)?;
    Ok(l_up.mul(&m_here).sub(&m_right.mul(&l_here)))
}

/// The two second-difference potentials at `(n, m)`:
/// `(u_{..+2} - 2 u_{..+1} + u) / (u_{..+1} - u + shift)` along each
/// direction. Written in forward differences they read
/// `(D_{s+1} - D_s) / D_s`, which evaluates identically in both pictures.
#[derive(Clone, Debug, PartialEq)]
pub struct Potentials {
    pub along_n: Scalar,
    pub along_m: Scalar,
}

pub fn potentials(params: &QuadParams, window: &LatticeWindow, n: i64, m: i64) -> Result<Potentials> {
    Ok(Potentials {
        along_n: potential_dir(params, window, (n, m), Direction::N)?,
        along_m: potential_dir(params, window, (n, m), Direction::M)?,
    })
}

pub fn potential_dir(
    params: &QuadParams,
    window: &LatticeWindow,
    site: Site,
    dir: Direction,
) -> Result<Scalar> {
    let (dn, dm) = dir.step();
    let d0 = forward_diff(params, window, site, dir)?;
    let d1 = forward_diff(params, window, (site.0 + dn, site.1 + dm), dir)?;
    (&d1 - &d0).try_div(&d0, "potential denominator")
}

/// Propagates a seed vector `steps` times along `dir` starting at
/// `site`, returning all intermediate vectors (`steps + 1` entries).
pub fn propagate(
    params: &QuadParams,
    window: &LatticeWindow,
    site: Site,
    dir: Direction,
    lambda: &Scalar,
    seed: [Scalar; 2],
    steps: usize,
) -> Result<alloc::vec::Vec<[Scalar; 2]>> {
    let (dn, dm) = dir.step();
    let mut out = alloc::vec::Vec::with_capacity(steps + 1);
    out.push(seed);
    for k in 0..steps {
        let at = (site.0 + dn * k as i64, site.1 + dm * k as i64);
        let mat = lax_matrix(params, window, at, dir, lambda)?;
        let next = mat.apply(out.last().expect("nonempty"));
        out.push(next);
    }
    Ok(out)
}

/// Residual of the three-point recursion in difference form:
/// `(x_s - x_{s+1}) psi_2 + (x_{s+2} - x_s) psi_1
///  + (1 - lambda alpha)(x_{s+1} - x_{s+2}) psi_0`.
/// Vanishes identically when `psi` are first components of a propagated
/// vector sequence.
pub fn three_point_residual(
    params: &QuadParams,
    window: &LatticeWindow,
    site: Site,
    dir: Direction,
    psi: &[Scalar; 3],
    lambda: &Scalar,
) -> Result<Scalar> {
    let (dn, dm) = dir.step();
    let d0 = forward_diff(params, window, site, dir)?;
    let d1 = forward_diff(params, window, (site.0 + dn, site.1 + dm), dir)?;
    let like = &psi[0];
    let alpha = dir.lattice_parameter(params).lift_like(like);
    let one = like.one_like();
    let gain = &one - &(&lambda.lift_like(like) * &alpha);
    let d0 = d0.lift_like(like);
    let d1 = d1.lift_like(like);
    Ok(&(&(-&d0) * &psi[2]) + &(&(&(&d0 + &d1) * &psi[1]) - &(&(&gain * &d1) * &psi[0])))
}

/// Residual of the potential form of the recursion:
/// `(1 + v) psi_2 - (2 + v) psi_1 + (1 - lambda alpha) psi_0`.
/// Vanishes identically when `psi` are *second* components of a
/// propagated vector sequence.
pub fn three_point_residual_potential(
    params: &QuadParams,
    window: &LatticeWindow,
    site: Site,
    dir: Direction,
    psi: &[Scalar; 3],
    lambda: &Scalar,
) -> Result<Scalar> {
    let v = potential_dir(params, window, site, dir)?.lift_like(&psi[0]);
    let like = &psi[0];
    let one = like.one_like();
    let two = Scalar::int_like(2, like);
    let alpha = dir.lattice_parameter(params).lift_like(like);
    let gain = &one - &(&lambda.lift_like(like) * &alpha);
    Ok(&(&(&one + &v) * &psi[2]) - &(&(&(&two + &v) * &psi[1]) - &(&gain * &psi[0])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::lattice::{gauge_to_u, LatticeWindow, QuadParams};
    use crate::sampling;

    fn int(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::rational(n, d)
    }

    fn params21() -> QuadParams {
        QuadParams::new(int(2), int(1)).unwrap()
    }

    fn window_from(vals: [[i64; 2]; 2]) -> LatticeWindow {
        // vals[i][j] is the value at (n0 + i, m0 + j)
        LatticeWindow::from_fn((0, 0), 2, 2, Picture::X, |n, m| int(vals[n as usize][m as usize]))
    }

    #[test]
    fn shift_matrix_template() {
        // x00 = 0, x10 = 1, alpha1 = 2, lambda = 1 -> [[1, -1], [-2, 1]]
        let p = params21();
        let w = window_from([[0, 0], [1, 0]]);
        let l = lax_matrix(&p, &w, (0, 0), Direction::N, &int(1)).unwrap();
        assert_eq!(l, Matrix2([[int(1), int(-1)], [int(-2), int(1)]]));
    }

    #[test]
    fn lambda_zero_is_upper_triangular() {
        let p = params21();
        let w = window_from([[0, 5], [1, 9]]);
        for dir in [Direction::N, Direction::M] {
            let m = lax_matrix(&p, &w, (0, 0), dir, &int(0)).unwrap();
            assert!(m.0[1][0].is_zero());
            assert_eq!(m.0[0][0], int(1));
            assert_eq!(m.0[1][1], int(1));
        }
    }

    #[test]
    fn equal_neighbors_pole() {
        let p = params21();
        let w = window_from([[3, 0], [3, 0]]);
        let err = lax_matrix(&p, &w, (0, 0), Direction::N, &int(1)).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
    }

    #[test]
    fn compatibility_vanishes_on_shell() {
        // the corner-solve oracle plaquette, then random solutions
        let p = params21();
        let w = LatticeWindow::from_values(
            (0, 0),
            2,
            2,
            Picture::X,
            alloc::vec![int(0), int(3), int(1), rat(3, 5)],
        );
        let r = compat_residual(&p, &w, 0, 0, &rat(5, 7)).unwrap();
        assert!(r.is_zero());

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let params = sampling::random_params(&mut rng);
            let w = sampling::evolved_window(&params, Picture::X, (0, 0), 3, 3, &mut rng, 15, 8)
                .unwrap();
            for _ in 0..5 {
                let lambda = sampling::rational_scalar(&mut rng, 12, 9);
                match compat_residual(&params, &w, 0, 0, &lambda) {
                    Ok(r) => assert!(r.is_zero()),
                    Err(Error::Pole { .. }) => {}
                    Err(e) => panic!("unexpected: {e}"),
                }
            }
        }
    }

    #[test]
    fn compatibility_at_lambda_zero_holds_off_shell() {
        let p = params21();
        let w = window_from([[0, 2], [1, 3]]);
        let r = compat_residual(&p, &w, 0, 0, &int(0)).unwrap();
        assert!(r.is_zero());
        // same data at generic lambda is incompatible
        let r = compat_residual(&p, &w, 0, 0, &int(1)).unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn potentials_known_values() {
        let p = QuadParams::with_gauge(int(4), int(1), int(1), false).unwrap();
        // constant field: both potentials vanish
        let w = LatticeWindow::constant((0, 0), 3, 3, Picture::U, rat(5, 9));
        let v = potentials(&p, &w, 0, 0).unwrap();
        assert!(v.along_n.is_zero());
        assert!(v.along_m.is_zero());
        // linear in n: still zero second difference
        let w = LatticeWindow::from_fn((0, 0), 3, 3, Picture::U, |n, _| int(3 * n));
        assert!(potential_dir(&p, &w, (0, 0), Direction::N).unwrap().is_zero());
        // u = (0, 1, 3) along n with alpha0 = 1 -> (3 - 2 + 0) / (1 - 0 + 1) = 1/2
        let w = LatticeWindow::from_fn((0, 0), 3, 1, Picture::U, |n, _| match n {
            0 => int(0),
            1 => int(1),
            _ => int(3),
        });
        assert_eq!(potential_dir(&p, &w, (0, 0), Direction::N).unwrap(), rat(1, 2));
    }

    #[test]
    fn potential_pole_reported() {
        let p = QuadParams::with_gauge(int(4), int(1), int(1), false).unwrap();
        // u_{n+1} - u_n + alpha0 = 0
        let w = LatticeWindow::from_fn((0, 0), 3, 1, Picture::U, |n, _| int(-n));
        let err = potential_dir(&p, &w, (0, 0), Direction::N).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
    }

    #[test]
    fn recursion_annihilates_propagated_first_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let p = params21();
        for _ in 0..20 {
            let w = sampling::free_window(Picture::X, (0, 0), 4, 1, &mut rng, 20, 9);
            let lambda = sampling::rational_scalar(&mut rng, 9, 7);
            let seed = [
                sampling::rational_scalar(&mut rng, 9, 5),
                sampling::rational_scalar(&mut rng, 9, 5),
            ];
            let psi = match propagate(&p, &w, (0, 0), Direction::N, &lambda, seed, 2) {
                Ok(v) => v,
                Err(Error::Pole { .. }) => continue,
                Err(e) => panic!("unexpected: {e}"),
            };
            let firsts = [psi[0][0].clone(), psi[1][0].clone(), psi[2][0].clone()];
            let r =
                three_point_residual(&p, &w, (0, 0), Direction::N, &firsts, &lambda).unwrap();
            assert!(r.is_zero());
            // second components satisfy the potential form instead
            let seconds = [psi[0][1].clone(), psi[1][1].clone(), psi[2][1].clone()];
            match three_point_residual_potential(&p, &w, (0, 0), Direction::N, &seconds, &lambda) {
                Ok(r) => assert!(r.is_zero()),
                Err(Error::Pole { .. }) => {}
                Err(e) => panic!("unexpected: {e}"),
            }
        }
    }

    #[test]
    fn recursion_special_lambda_still_vanishes() {
        // lambda = 1/alpha1 kills the psi_0 coefficient; the relation
        // drops to two terms and still annihilates propagated data
        let p = params21();
        let lambda = rat(1, 2);
        let w = LatticeWindow::from_fn((0, 0), 4, 1, Picture::X, |n, _| int(n * n + 1));
        let psi = propagate(&p, &w, (0, 0), Direction::N, &lambda, [int(1), int(2)], 2).unwrap();
        let firsts = [psi[0][0].clone(), psi[1][0].clone(), psi[2][0].clone()];
        let r = three_point_residual(&p, &w, (0, 0), Direction::N, &firsts, &lambda).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn recursion_rejects_unrelated_triples() {
        let p = params21();
        let w = LatticeWindow::from_fn((0, 0), 4, 1, Picture::X, |n, _| int(2 * n + 1));
        let psi = [int(1), int(1), int(1)];
        let r = three_point_residual(&p, &w, (0, 0), Direction::N, &psi, &int(3)).unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn residuals_agree_across_the_gauge() {
        // identical values whether differences come from the x window or
        // its gauged u image
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let p = QuadParams::with_gauge(int(4), int(1), int(1), false).unwrap();
        let x = sampling::evolved_window(&p, Picture::X, (0, 0), 4, 4, &mut rng, 12, 7).unwrap();
        let u = gauge_to_u(&p, &x).unwrap();
        let lambda = rat(3, 4);
        let psi = [int(2), int(5), int(11)];
        for dir in [Direction::N, Direction::M] {
            let rx = three_point_residual(&p, &x, (0, 0), dir, &psi, &lambda).unwrap();
            let ru = three_point_residual(&p, &u, (0, 0), dir, &psi, &lambda).unwrap();
            assert_eq!(rx, ru);
        }
        let cx = compat_residual(&p, &x, 1, 1, &lambda).unwrap();
        let cu = compat_residual(&p, &u, 1, 1, &lambda).unwrap();
        assert_eq!(cx, cu);
        assert!(cx.is_zero());
    }
}
