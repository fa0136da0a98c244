//! Time integration of symmetry flows on windows, solution-invariance
//! drift, commuting-flow tests, and the semi-discrete limit order check.
//!
//! Flows run in the float kind with a fixed-step classical Runge-Kutta
//! scheme: identity-grade tolerances at desk scale do not need step
//! control, and determinism is worth more.
//!
//! Every cell of the window is integrated. Where a stencil pokes out of
//! the window the missing neighbors are supplied by linear extrapolation
//! along the exiting axis, which keeps constant and linear profiles
//! exact. The returned window is eroded by the stencil reach once per
//! run; the extrapolated boundary layer still contaminates a margin of
//! cells, decaying factorially with depth, so drift *measurements* erode
//! further (see [`DEFAULT_DRIFT_BUFFER`]).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::lattice::{plaquette_residual, LatticeWindow, Picture, QuadParams, Site};
use crate::numerics::{BaseKind, Scalar};
use crate::symmetry::Characteristic;
use crate::Result;

/// Extra erosion, in multiples of the stencil reach per side, applied to
/// the region where drift is *measured*. The extrapolated boundary layer
/// perturbs the dynamics; at `eps = 0.1` that contamination decays with
/// the depth `d` like `(L eps)^d / (d+1)!`, and 32 stencil radii push it
/// below the double-precision noise floor even on rough windows where
/// the flow Jacobian `L` reaches O(30).
pub const DEFAULT_DRIFT_BUFFER: usize = 32;

struct Grid {
    origin: Site,
    nlen: usize,
    mlen: usize,
    data: Vec<f64>,
}

impl Grid {
    fn from_window(w: &LatticeWindow) -> Result<Grid> {
        let mut data = Vec::with_capacity(w.cells().len());
        for v in w.cells() {
            data.push(v.as_float()?);
        }
        Ok(Grid { origin: w.origin(), nlen: w.nlen(), mlen: w.mlen(), data })
    }

    fn to_window(&self, picture: Picture) -> LatticeWindow {
        LatticeWindow::from_values(
            self.origin,
            self.nlen,
            self.mlen,
            picture,
            self.data.iter().map(|&v| Scalar::Float(v)).collect(),
        )
    }

    fn idx(&self, n: i64, m: i64) -> usize {
        let i = (n - self.origin.0) as usize;
        let j = (m - self.origin.1) as usize;
        i * self.mlen + j
    }

    fn inside_n(&self, n: i64) -> bool {
        n >= self.origin.0 && n < self.origin.0 + self.nlen as i64
    }

    fn inside_m(&self, m: i64) -> bool {
        m >= self.origin.1 && m < self.origin.1 + self.mlen as i64
    }

    /// Value with linear extrapolation for sites outside the grid.
    fn sample(&self, n: i64, m: i64) -> f64 {
        if !self.inside_n(n) {
            let (edge, inner) = if n < self.origin.0 {
                (self.origin.0, self.origin.0 + 1)
            } else {
                let hi = self.origin.0 + self.nlen as i64 - 1;
                (hi, hi - 1)
            };
            debug_assert!(self.nlen >= 2, "ghost extrapolation needs two rows");
            let j = (n - edge).abs() as f64;
            return (1.0 + j) * self.sample(edge, m) - j * self.sample(inner, m);
        }
        if !self.inside_m(m) {
            let (edge, inner) = if m < self.origin.1 {
                (self.origin.1, self.origin.1 + 1)
            } else {
                let hi = self.origin.1 + self.mlen as i64 - 1;
                (hi, hi - 1)
            };
            debug_assert!(self.mlen >= 2, "ghost extrapolation needs two columns");
            let j = (m - edge).abs() as f64;
            return (1.0 + j) * self.data[self.idx(n, edge)] - j * self.data[self.idx(n, inner)];
        }
        self.data[self.idx(n, m)]
    }
}

fn step_count(eps: f64, h: f64) -> usize {
    assert!(h > 0.0 && eps.is_finite(), "positive step required");
    ((eps / h).abs().round() as usize).max(1)
}

fn rhs(params: &QuadParams, ch: &Characteristic, grid: &Grid) -> Result<Vec<f64>> {
    let access = |s: Site| -> Result<Scalar> { Ok(Scalar::Float(grid.sample(s.0, s.1))) };
    let mut out = Vec::with_capacity(grid.data.len());
    for i in 0..grid.nlen {
        for j in 0..grid.mlen {
            let site = (grid.origin.0 + i as i64, grid.origin.1 + j as i64);
            out.push(ch.eval_with(params, site, &access)?.as_float()?);
        }
    }
    Ok(out)
}

fn shifted(grid: &Grid, base: &[f64], k: &[f64], factor: f64) -> Grid {
    Grid {
        origin: grid.origin,
        nlen: grid.nlen,
        mlen: grid.mlen,
        data: base.iter().zip(k).map(|(x, dx)| x + factor * dx).collect(),
    }
}

/// Integrates `du/deps = char` on every site of the window with classical
/// fourth-order Runge-Kutta and fixed step `h` (rounded so the steps tile
/// `eps` exactly). Returns the window eroded by the stencil reach;
/// deterministic for identical inputs.
pub fn integrate_flow(
    params: &QuadParams,
    ch: &Characteristic,
    window: &LatticeWindow,
    eps: f64,
    h: f64,
) -> Result<LatticeWindow> {
    if window.cells().iter().any(|v| v.base_kind() != BaseKind::Float) {
        return Err(Error::KindMismatch { expected: "float window for flow integration" });
    }
    let fparams = params.to_float();
    let mut grid = Grid::from_window(window)?;
    let steps = step_count(eps, h);
    let dt = eps / steps as f64;
    // compensated accumulation keeps the state roundoff at O(1) ulps
    // over the whole run instead of a random walk across steps
    let mut comp = vec![0.0f64; grid.data.len()];
    for _ in 0..steps {
        let base = grid.data.clone();
        let k1 = rhs(&fparams, ch, &grid)?;
        let g2 = shifted(&grid, &base, &k1, dt / 2.0);
        let k2 = rhs(&fparams, ch, &g2)?;
        let g3 = shifted(&grid, &base, &k2, dt / 2.0);
        let k3 = rhs(&fparams, ch, &g3)?;
        let g4 = shifted(&grid, &base, &k3, dt);
        let k4 = rhs(&fparams, ch, &g4)?;
        for (i, x) in grid.data.iter_mut().enumerate() {
            let increment = dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            let y = increment - comp[i];
            let t = base[i] + y;
            comp[i] = (t - base[i]) - y;
            *x = t;
        }
    }
    let full = grid.to_window(window.picture());
    erode(&full, ch.reach())
}

fn erode(w: &LatticeWindow, reach: (i64, i64, i64, i64)) -> Result<LatticeWindow> {
    let n_lo = w.origin().0 + reach.0;
    let n_hi = w.origin().0 + w.nlen() as i64 - 1 - reach.1;
    let m_lo = w.origin().1 + reach.2;
    let m_hi = w.origin().1 + w.mlen() as i64 - 1 - reach.3;
    if n_lo > n_hi || m_lo > m_hi {
        return Err(Error::CoreEmpty);
    }
    w.subwindow(n_lo, n_hi, m_lo, m_hi)
}

/// Drift measurement: how far the flow carried an on-shell window off the
/// solution set.
#[derive(Clone, Debug)]
pub struct DriftOutcome {
    /// Largest plaquette residual magnitude over the measured core.
    pub drift: f64,
    /// Origin and extent of the measured core region.
    pub core_origin: Site,
    pub core_nlen: usize,
    pub core_mlen: usize,
    pub steps: usize,
}

/// Integrates the flow and measures the largest plaquette residual over
/// the core region, `buffer` stencil-reaches in from the eroded output.
pub fn invariance_drift(
    params: &QuadParams,
    ch: &Characteristic,
    window: &LatticeWindow,
    eps: f64,
    h: f64,
    buffer: usize,
) -> Result<DriftOutcome> {
    let after = integrate_flow(params, ch, window, eps, h)?;
    let r = ch.reach();
    let b = buffer as i64;
    let core = erode(&after, (r.0 * b, r.1 * b, r.2 * b, r.3 * b))?;
    if core.nlen() < 2 || core.mlen() < 2 {
        return Err(Error::CoreEmpty);
    }
    let drift = exact_max_residual(params, &core)?;
    Ok(DriftOutcome {
        drift,
        core_origin: core.origin(),
        core_nlen: core.nlen(),
        core_mlen: core.mlen(),
        steps: step_count(eps, h),
    })
}

/// Largest plaquette residual of a float window, evaluated exactly: the
/// cells are dyadic rationals, so casting them back to the exact kind
/// removes the cancellation noise of a float residual evaluation. The
/// measured drift then reflects the integrator alone.
pub fn exact_max_residual(params: &QuadParams, w: &LatticeWindow) -> Result<f64> {
    let exact = LatticeWindow::from_fn(w.origin(), w.nlen(), w.mlen(), w.picture(), |n, m| {
        let v = w.value(n, m).expect("in range").as_float().expect("float window");
        Scalar::Rational(
            crate::numerics::Rational::from_f64_exact(v).expect("finite state"),
        )
    });
    let eparams = exact_params(params);
    let mut drift = 0.0f64;
    for (n, m) in exact.plaquette_roots() {
        let res = plaquette_residual(&eparams, &exact, n, m)?;
        drift = drift.max(res.as_rational()?.abs().to_f64());
    }
    Ok(drift)
}

fn exact_params(params: &QuadParams) -> QuadParams {
    if params.base_kind() == BaseKind::Rational {
        return params.clone();
    }
    let conv = |s: &Scalar| -> Scalar {
        Scalar::Rational(
            crate::numerics::Rational::from_f64_exact(s.as_float().expect("float param"))
                .expect("finite parameter"),
        )
    };
    QuadParams {
        alpha1: conv(&params.alpha1),
        alpha2: conv(&params.alpha2),
        alpha0: conv(&params.alpha0),
        beta0: conv(&params.beta0),
    }
}

/// Max-norm of `(flow_a . flow_b - flow_b . flow_a)(window)` over the
/// doubly-eroded core (plus the measurement buffer).
pub fn commuting_flow_residual(
    params: &QuadParams,
    a: &Characteristic,
    b: &Characteristic,
    window: &LatticeWindow,
    eps: f64,
    h: f64,
    buffer: usize,
) -> Result<f64> {
    let ab = integrate_flow(params, a, &integrate_flow(params, b, window, eps, h)?, eps, h)?;
    let ba = integrate_flow(params, b, &integrate_flow(params, a, window, eps, h)?, eps, h)?;
    let ra = a.reach();
    let rb = b.reach();
    let bf = buffer as i64;
    let reach = (
        (ra.0 + rb.0) * bf,
        (ra.1 + rb.1) * bf,
        (ra.2 + rb.2) * bf,
        (ra.3 + rb.3) * bf,
    );
    let ca = erode(&ab, reach)?;
    let cb = erode(&ba, reach)?;
    debug_assert_eq!(ca.origin(), cb.origin());
    let mut worst = 0.0f64;
    for (n, m) in ca.sites() {
        let d = (ca.value(n, m)?.as_float()? - cb.value(n, m)?.as_float()?).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Right-hand side of the semi-discrete equation at interior site `k`:
/// `2 (x_{k+1} - x_k)(x_{k-1} - x_k) / (p (x_{k-1} - x_{k+1}))`.
pub fn semi_discrete_rhs(p: f64, x: &[f64], k: usize) -> Result<f64> {
    let den = p * (x[k - 1] - x[k + 1]);
    if den == 0.0 {
        return Err(Error::Pole { what: "x_prev - x_next" });
    }
    Ok(2.0 * (x[k + 1] - x[k]) * (x[k - 1] - x[k]) / den)
}

/// RK4 trajectory of the semi-discrete equation up to time `tau`; the two
/// boundary sites stay frozen, so accuracy holds in the interior away
/// from the ends.
pub fn semi_discrete_integrate(p: f64, x0: &[f64], tau: f64, h: f64) -> Result<Vec<f64>> {
    assert!(x0.len() >= 3, "need at least one interior site");
    let steps = step_count(tau, h);
    let dt = tau / steps as f64;
    let mut x = x0.to_vec();
    let len = x.len();
    let rhs_all = |x: &[f64]| -> Result<Vec<f64>> {
        let mut out = vec![0.0; len];
        for k in 1..len - 1 {
            out[k] = semi_discrete_rhs(p, x, k)?;
        }
        Ok(out)
    };
    for _ in 0..steps {
        let base = x.clone();
        let k1 = rhs_all(&x)?;
        let mix = |k: &[f64], f: f64| -> Vec<f64> {
            base.iter().zip(k).map(|(v, d)| v + f * d).collect()
        };
        let k2 = rhs_all(&mix(&k1, dt / 2.0))?;
        let k3 = rhs_all(&mix(&k2, dt / 2.0))?;
        let k4 = rhs_all(&mix(&k3, dt))?;
        for i in 0..len {
            x[i] = base[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(x)
}

/// What the limit check produced for one list of lattice-step values.
#[derive(Clone, Debug)]
pub struct LimitReport {
    pub deltas: Vec<f64>,
    /// Largest quad-equation residual of the sampled semi-discrete
    /// solution, per delta (`NaN` for degenerate entries).
    pub residuals: Vec<f64>,
    /// Empirical order between consecutive deltas:
    /// `ln(r_i / r_{i+1}) / ln(d_i / d_{i+1})`.
    pub orders: Vec<f64>,
    /// `delta = 0` collapses the parameters to the factorized case.
    pub degenerate: Vec<bool>,
}

/// Samples `x_{n,m} = xt_{n+m}(delta * m)` from the semi-discrete
/// trajectory and measures how fast the quad residual shrinks as `delta`
/// does. `alpha1 = (p - delta)^2`, `alpha2 = p^2`.
pub fn limit_order(
    p: f64,
    deltas: &[f64],
    seed: &dyn Fn(i64) -> f64,
    n_len: usize,
    m_len: usize,
    h_ode: f64,
) -> Result<LimitReport> {
    assert!(n_len >= 2 && m_len >= 2, "window must hold a plaquette");
    let margin: i64 = 14;
    let k_hi = (n_len + m_len - 2) as i64 + margin;
    let k_lo = -margin;

    let mut residuals = Vec::with_capacity(deltas.len());
    let mut degenerate = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        if delta == 0.0 {
            residuals.push(f64::NAN);
            degenerate.push(true);
            continue;
        }
        degenerate.push(false);
        let q = p - delta;
        let params = QuadParams::new(Scalar::Float(q * q), Scalar::Float(p * p))?;
        // snapshots of the trajectory at tau = delta * m
        let mut snaps: Vec<Vec<f64>> = Vec::with_capacity(m_len);
        let mut state: Vec<f64> = (k_lo..=k_hi).map(&seed).collect();
        snaps.push(state.clone());
        for _ in 1..m_len {
            state = semi_discrete_integrate(p, &state, delta, h_ode)?;
            snaps.push(state.clone());
        }
        let at = |mm: usize, k: i64| snaps[mm][(k - k_lo) as usize];
        let mut worst = 0.0f64;
        for n in 0..(n_len - 1) as i64 {
            for m in 0..(m_len - 1) as i64 {
                let k = n + m;
                let plaq = [
                    Scalar::Float(at(m as usize, k)),
                    Scalar::Float(at(m as usize, k + 1)),
                    Scalar::Float(at(m as usize + 1, k + 1)),
                    Scalar::Float(at(m as usize + 1, k + 2)),
                ];
                let r = crate::lattice::quad_residual(&params, Picture::X, &plaq)
                    .as_float()?
                    .abs();
                worst = worst.max(r);
            }
        }
        residuals.push(worst);
    }

    let mut orders = Vec::new();
    for i in 0..deltas.len().saturating_sub(1) {
        if degenerate[i] || degenerate[i + 1] {
            orders.push(f64::NAN);
            continue;
        }
        let ratio = residuals[i] / residuals[i + 1];
        orders.push(num_traits::Float::ln(ratio) / num_traits::Float::ln(deltas[i] / deltas[i + 1]));
    }
    Ok(LimitReport { deltas: deltas.to_vec(), residuals, orders, degenerate })
}

#[cfg(test)]
mod probe2 {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::hierarchy::{catalog_get, CatalogName};
    use crate::lax::Direction;
    use crate::sampling;

    #[test]
    #[ignore]
    fn mixed_probe() {
        let p = QuadParams::with_gauge(
            Scalar::from_int(4),
            Scalar::from_int(1),
            Scalar::from_int(1),
            true,
        )
        .unwrap();
        let mixed = catalog_get(CatalogName::Mixed, &p).characteristic;
        for (size, buffer) in [(42usize, 16usize), (58, 24), (74, 32), (90, 40)] {
            let mut rng = ChaCha8Rng::seed_from_u64(202);
            let half = (size / 2) as i64;
            let t0 = std::time::Instant::now();
            let w = match sampling::flow_window(&p, (-half, -half), size, size, &[Direction::N, Direction::M], &mut rng) {
                Ok(w) => w,
                Err(e) => { std::println!("size={size}: gen failed {e}"); continue; }
            };
            let gen = t0.elapsed();
            let wf = w.to_float();
            let t0 = std::time::Instant::now();
            match invariance_drift(&p, &mixed, &wf, 0.1, 1e-3, buffer) {
                Ok(out) => std::println!(
                    "MIXED size={size} buffer={buffer}: drift={:.3e} core={}x{} gen={gen:?} run={:?}",
                    out.drift, out.core_nlen, out.core_mlen, t0.elapsed()
                ),
                Err(e) => std::println!("size={size}: drift failed {e}"),
            }
        }
    }

    #[test]
    #[ignore]
    fn s1n_ratio_probe() {
        let p = QuadParams::with_gauge(
            Scalar::from_int(4),
            Scalar::from_int(1),
            Scalar::from_int(1),
            true,
        )
        .unwrap();
        let s1n = catalog_get(CatalogName::S1n, &p).characteristic;
        for seed in [301u64, 302, 303, 304] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = match sampling::flow_window(&p, (-37, 0), 74, 8, &[Direction::N], &mut rng) {
                Ok(w) => w.to_float(),
                Err(e) => { std::println!("seed={seed}: gen failed {e}"); continue; }
            };
            let d1 = invariance_drift(&p, &s1n, &w, 0.1, 1e-3, DEFAULT_DRIFT_BUFFER).unwrap().drift;
            let d2 = invariance_drift(&p, &s1n, &w, 0.1, 5e-4, DEFAULT_DRIFT_BUFFER).unwrap().drift;
            std::println!("S1n seed={seed}: d(h)={d1:.3e} d(h/2)={d2:.3e} factor={:.2}", d1 / d2);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::hierarchy::{catalog_get, CatalogName};
    use crate::lattice::LatticeWindow;
    use crate::lax::Direction;
    use crate::sampling;
    use crate::symmetry::mobius_apply;

    fn int(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn gauge_params() -> QuadParams {
        // the negative-beta0 gauge keeps quadrant evolution contracting
        QuadParams::with_gauge(int(4), int(1), int(1), true).unwrap()
    }

    #[test]
    fn constant_window_translates_exactly() {
        // the first flow on a constant field has constant velocity -2 a0
        let p = gauge_params();
        let ch = catalog_get(CatalogName::S1n, &p).characteristic;
        let w = LatticeWindow::constant((0, 0), 6, 4, Picture::U, Scalar::Float(1.5));
        let out = integrate_flow(&p, &ch, &w, 0.5, 1e-2).unwrap();
        assert_eq!(out.nlen(), 4); // eroded by reach 1 on each n side
        assert_eq!(out.mlen(), 4);
        for (n, m) in out.sites() {
            let v = out.value(n, m).unwrap().as_float().unwrap();
            assert!((v - 0.5).abs() < 1e-13, "expected 0.5, got {v}");
        }
    }

    #[test]
    fn translation_flow_shifts_values() {
        let p = gauge_params();
        let ch = catalog_get(CatalogName::X0, &p).characteristic;
        let w = LatticeWindow::from_fn((0, 0), 3, 3, Picture::X, |n, m| {
            Scalar::Float(0.3 * n as f64 - 0.1 * m as f64)
        });
        let out = integrate_flow(&p, &ch, &w, 0.3, 1e-3).unwrap();
        assert_eq!(out.nlen(), 3); // point flow: no erosion
        for (n, m) in out.sites() {
            let v = out.value(n, m).unwrap().as_float().unwrap();
            let expect = 0.3 * n as f64 - 0.1 * m as f64 + 0.3;
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling_flow_multiplies_by_exp() {
        let p = gauge_params();
        let ch = catalog_get(CatalogName::X1, &p).characteristic;
        let w = LatticeWindow::from_fn((0, 0), 3, 3, Picture::X, |n, m| {
            Scalar::Float(1.0 + 0.2 * n as f64 + 0.05 * m as f64)
        });
        let out = integrate_flow(&p, &ch, &w, 1.0, 1e-3).unwrap();
        let e = core::f64::consts::E;
        for (n, m) in out.sites() {
            let v = out.value(n, m).unwrap().as_float().unwrap();
            let x0 = 1.0 + 0.2 * n as f64 + 0.05 * m as f64;
            assert!(((v - x0 * e) / (x0 * e)).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_flow_matches_mobius_closed_form() {
        let p = gauge_params();
        let ch = catalog_get(CatalogName::X2, &p).characteristic;
        let eps = 0.2;
        let w = LatticeWindow::from_fn((0, 0), 3, 3, Picture::X, |n, m| {
            Scalar::Float(0.5 + 0.25 * n as f64 - 0.15 * m as f64)
        });
        let out = integrate_flow(&p, &ch, &w, eps, 1e-3).unwrap();
        for (n, m) in out.sites() {
            let v = out.value(n, m).unwrap().as_float().unwrap();
            let x0 = w.value(n, m).unwrap().clone();
            let closed = mobius_apply(
                &Scalar::Float(0.0),
                &Scalar::Float(0.0),
                &Scalar::Float(eps),
                &x0,
            )
            .unwrap()
            .as_float()
            .unwrap();
            assert!((v - closed).abs() < 1e-10, "flow {v} vs closed form {closed}");
        }
    }

    #[test]
    fn erosion_accounting_is_step_independent() {
        let p = gauge_params();
        let ch = catalog_get(CatalogName::S2n, &p).characteristic; // reach 2 along n
        let w = LatticeWindow::constant((3, -1), 9, 4, Picture::U, Scalar::Float(0.25));
        for h in [1e-1, 1e-2, 1e-3] {
            let out = integrate_flow(&p, &ch, &w, 0.1, h).unwrap();
            assert_eq!(out.origin(), (5, -1));
            assert_eq!(out.nlen(), 5);
            assert_eq!(out.mlen(), 4);
        }
    }

    #[test]
    fn flow_is_deterministic() {
        let p = gauge_params();
        let ch = catalog_get(CatalogName::S1n, &p).characteristic;
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let w = sampling::flow_window(&p, (-6, 0), 12, 4, &[Direction::N], &mut rng)
            .unwrap()
            .to_float();
        let a = integrate_flow(&p, &ch, &w, 0.1, 1e-3).unwrap();
        let b = integrate_flow(&p, &ch, &w, 0.1, 1e-3).unwrap();
        assert_eq!(a, b); // bit-identical
    }

    #[test]
    fn drift_checks_on_one_rough_window() {
        let p = gauge_params();
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let s1n = catalog_get(CatalogName::S1n, &p).characteristic;
        // reach 1 along n plus 32 buffer radii per side around an 8-cell core
        let w = sampling::flow_window(&p, (-37, 0), 74, 8, &[Direction::N], &mut rng)
            .unwrap()
            .to_float();
        let out = invariance_drift(&p, &s1n, &w, 0.1, 1e-3, DEFAULT_DRIFT_BUFFER).unwrap();
        assert_eq!(out.core_nlen, 8);
        assert_eq!(out.core_mlen, 8);
        assert!(out.drift <= 1e-8, "drift {}", out.drift);

        let g0n = catalog_get(CatalogName::G0n, &p).characteristic;
        let bad = invariance_drift(&p, &g0n, &w, 0.1, 1e-3, DEFAULT_DRIFT_BUFFER).unwrap();
        assert!(bad.drift >= 1e-4, "non-symmetry drift {}", bad.drift);

        // fourth-order convergence: halving h cuts the drift ~16x
        let half = invariance_drift(&p, &s1n, &w, 0.1, 5e-4, DEFAULT_DRIFT_BUFFER).unwrap();
        let factor = out.drift / half.drift;
        assert!(
            (8.0..=32.0).contains(&factor),
            "halving h gave factor {factor} (drifts {}, {})",
            out.drift,
            half.drift
        );
    }

    #[test]
    fn mixed_flow_preserves_solutions() {
        let p = gauge_params();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let mixed = catalog_get(CatalogName::Mixed, &p).characteristic;
        // reach 1 in all four directions; gentle windows keep the
        // Jacobian small enough for a 12-radius measurement buffer
        let w = sampling::flow_window(&p, (-17, -17), 34, 34, &[Direction::N, Direction::M], &mut rng)
            .unwrap()
            .to_float();
        let out = invariance_drift(&p, &mixed, &w, 0.1, 1e-3, 12).unwrap();
        assert_eq!(out.core_nlen, 8);
        assert!(out.drift <= 1e-8, "mixed drift {}", out.drift);
    }

    #[test]
    fn noncommuting_point_flows_match_closed_form() {
        let p = gauge_params();
        let x0 = catalog_get(CatalogName::X0, &p).characteristic;
        let x1 = catalog_get(CatalogName::X1, &p).characteristic;
        let eps = 0.1;
        let w = LatticeWindow::from_fn((0, 0), 4, 4, Picture::X, |n, m| {
            Scalar::Float(0.7 + 0.2 * n as f64 + 0.1 * m as f64)
        });
        let r = commuting_flow_residual(&p, &x0, &x1, &w, eps, 1e-3, DEFAULT_DRIFT_BUFFER).unwrap();
        let predicted = eps * (eps.exp() - 1.0);
        assert!((r - predicted).abs() < 1e-6, "residual {r} vs predicted {predicted}");
    }

    #[test]
    fn hierarchy_flows_commute() {
        let p = gauge_params();
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let s1n = catalog_get(CatalogName::S1n, &p).characteristic;
        let s2n = catalog_get(CatalogName::S2n, &p).characteristic;
        // combined reach 3 along n; measurement buffer 8 reaches per side
        let w = sampling::flow_window(&p, (-31, 0), 62, 6, &[Direction::N], &mut rng)
            .unwrap()
            .to_float();
        let r = commuting_flow_residual(&p, &s1n, &s2n, &w, 0.05, 1e-3, 8)
            .unwrap();
        assert!(r <= 1e-7, "commuting residual {r}");
    }

    #[test]
    fn semi_discrete_linear_profile_drifts_uniformly() {
        let p = 2.0;
        let x0: Vec<f64> = (0..41).map(|k| k as f64).collect();
        let x = semi_discrete_integrate(p, &x0, 0.5, 1e-3).unwrap();
        // interior sites away from the frozen ends follow k + tau / p
        for k in 14..=26 {
            let expect = k as f64 + 0.5 / p;
            assert!((x[k] - expect).abs() < 1e-10, "site {k}: {} vs {expect}", x[k]);
        }
    }

    #[test]
    fn semi_discrete_constant_profile_is_a_pole() {
        let x0 = vec![1.0; 7];
        let err = semi_discrete_integrate(2.0, &x0, 0.1, 1e-2).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
    }

    #[test]
    fn semi_discrete_reversal_symmetry() {
        // relabeling k -> -k maps trajectories to trajectories of the
        // time-reversed flow (the denominator is odd under the swap)
        let p = 1.5;
        let seed = |k: i64| k as f64 + 0.3 * (0.2 * k as f64).tanh();
        let x0: Vec<f64> = (-15..=15).map(seed).collect();
        let reversed: Vec<f64> = x0.iter().rev().copied().collect();
        let a = semi_discrete_integrate(p, &x0, 0.3, 1e-3).unwrap();
        let b = semi_discrete_integrate(p, &reversed, -0.3, 1e-3).unwrap();
        for (i, v) in a.iter().enumerate() {
            let mirror = b[b.len() - 1 - i];
            assert!((v - mirror).abs() < 1e-12);
        }
    }

    #[test]
    fn limit_order_at_least_one() {
        let seed = |k: i64| k as f64 + 0.4 * (0.3 * k as f64).tanh();
        let report = limit_order(1.0, &[0.1, 0.05, 0.025], &seed, 4, 4, 1e-3).unwrap();
        assert!(report.residuals.windows(2).all(|w| w[1] < w[0]), "monotone decrease");
        for order in &report.orders {
            assert!(*order >= 1.0, "empirical order {order}");
        }
    }

    #[test]
    fn limit_order_flags_degenerate_delta() {
        let seed = |k: i64| k as f64;
        let report = limit_order(1.0, &[0.1, 0.0], &seed, 3, 3, 1e-2).unwrap();
        assert!(!report.degenerate[0]);
        assert!(report.degenerate[1]);
    }
}
