//! Evolutionary vector fields on the lattice: prolongation residuals,
//! the sampled determining-equation solver for point symmetries, the
//! Moebius group action, and the evolutionary bracket.
//!
//! A characteristic assigns to every site a scalar built from finitely
//! many neighboring field values; the flow it generates moves every site
//! simultaneously. A characteristic is a symmetry when its prolongation
//! annihilates the quad residual on solutions.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::Error;
use crate::lattice::{
    plaquette, quad_residual, solve_corner, Corner, LatticeWindow, Picture, QuadParams, Site,
};
use crate::numerics::linalg::RatMatrix;
use crate::numerics::{Rational, Scalar};
use crate::sampling;
use crate::Result;

/// Site-indexed read access to field values. Absolute coordinates.
pub type Access<'a> = dyn Fn(Site) -> Result<Scalar> + 'a;

type EvalFn = dyn Fn(&QuadParams, Site, &Access<'_>) -> Result<Scalar> + Send + Sync;

/// An evolutionary vector-field entry: a named evaluator over a finite
/// stencil of lattice offsets, with explicit site dependence allowed.
///
/// The evaluator receives the parameter set each time, so a conjugated
/// view (see [`swap_nm`](crate::hierarchy::swap_nm)) can reroute which
/// slots it reads without rebuilding the formula.
#[derive(Clone)]
pub struct Characteristic {
    pub name: String,
    pub picture: Picture,
    pub stencil: Vec<Site>,
    params: QuadParams,
    eval: Arc<EvalFn>,
}

impl core::fmt::Debug for Characteristic {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Characteristic")
            .field("name", &self.name)
            .field("picture", &self.picture)
            .field("stencil", &self.stencil)
            .finish()
    }
}

impl Characteristic {
    pub fn new<F>(
        name: impl Into<String>,
        picture: Picture,
        stencil: Vec<Site>,
        params: QuadParams,
        eval: F,
    ) -> Self
    where
        F: Fn(&QuadParams, Site, &Access<'_>) -> Result<Scalar> + Send + Sync + 'static,
    {
        Characteristic {
            name: name.into(),
            picture,
            stencil: normalize_stencil(stencil),
            params,
            eval: Arc::new(eval),
        }
    }

    /// A point characteristic `phi(x) = sum_k coeffs[k] x^k`.
    pub fn point(name: impl Into<String>, picture: Picture, params: QuadParams, coeffs: Vec<Scalar>) -> Self {
        Characteristic::new(name, picture, vec![(0, 0)], params, move |_, site, get| {
            let x = get(site)?;
            let mut acc = x.zero_like();
            let mut power = x.one_like();
            for c in &coeffs {
                acc = &acc + &(&c.lift_like(&x) * &power);
                power = &power * &x;
            }
            Ok(acc)
        })
    }

    pub fn params(&self) -> &QuadParams {
        &self.params
    }

    /// Evaluates through an arbitrary accessor with an explicit parameter
    /// set (the conjugation and bracket machinery threads modified
    /// parameters through here).
    pub fn eval_with(&self, params: &QuadParams, site: Site, get: &Access<'_>) -> Result<Scalar> {
        (self.eval)(params, site, get)
    }

    /// Evaluates on a window with the characteristic's own parameters.
    pub fn eval_window(&self, window: &LatticeWindow, site: Site) -> Result<Scalar> {
        self.eval_with(&self.params, site, &window_access(window))
    }

    /// `factor * self`.
    pub fn scale(&self, factor: Scalar) -> Characteristic {
        let inner = self.clone();
        Characteristic {
            name: format!("{}*{}", factor, self.name),
            picture: self.picture,
            stencil: self.stencil.clone(),
            params: self.params.clone(),
            eval: Arc::new(move |p, site, get| {
                let v = inner.eval_with(p, site, get)?;
                Ok(&factor.lift_like(&v) * &v)
            }),
        }
    }

    /// `a * self + b * other` over the union stencil.
    pub fn linear_combination(
        &self,
        a: Scalar,
        other: &Characteristic,
        b: Scalar,
    ) -> Characteristic {
        assert_eq!(self.picture, other.picture, "pictures must agree");
        let mut stencil = self.stencil.clone();
        stencil.extend(other.stencil.iter().copied());
        let (f, g) = (self.clone(), other.clone());
        Characteristic {
            name: format!("{}*{} + {}*{}", a, f.name, b, g.name),
            picture: self.picture,
            stencil: normalize_stencil(stencil),
            params: self.params.clone(),
            eval: Arc::new(move |p, site, get| {
                let fv = f.eval_with(p, site, get)?;
                let gv = g.eval_with(p, site, get)?;
                Ok(&(&a.lift_like(&fv) * &fv) + &(&b.lift_like(&gv) * &gv))
            }),
        }
    }

    /// Stencil reach in each direction: `(n-, n+, m-, m+)`, all >= 0.
    pub fn reach(&self) -> (i64, i64, i64, i64) {
        let mut r = (0, 0, 0, 0);
        for &(dn, dm) in &self.stencil {
            r.0 = r.0.max(-dn);
            r.1 = r.1.max(dn);
            r.2 = r.2.max(-dm);
            r.3 = r.3.max(dm);
        }
        r
    }
}

fn normalize_stencil(mut stencil: Vec<Site>) -> Vec<Site> {
    stencil.sort_unstable();
    stencil.dedup();
    stencil
}

/// Read access backed by a window.
pub fn window_access(w: &LatticeWindow) -> impl Fn(Site) -> Result<Scalar> + '_ {
    move |s: Site| w.value(s.0, s.1).cloned()
}

/// Partial derivatives of the quad residual with respect to each corner,
/// computed with dual seeds.
pub fn corner_partials(params: &QuadParams, picture: Picture, plaq: &[Scalar; 4]) -> [Scalar; 4] {
    core::array::from_fn(|i| {
        let f = |seed: &Scalar| -> Result<Scalar> {
            let mut vals: [Scalar; 4] =
                core::array::from_fn(|j| Scalar::dual(plaq[j].clone(), plaq[j].zero_like()));
            vals[i] = seed.clone();
            Ok(quad_residual(params, picture, &vals))
        };
        crate::numerics::dual_partial(f, &plaq[i]).expect("polynomial residual has no poles")
    })
}

/// Prolongation residual at the plaquette rooted at `root`: the sum over
/// the four corners of `char(corner) * d(residual)/d(corner)`, with no
/// on-shell substitution. Needs the window to cover every corner's
/// stencil.
pub fn prolong_residual(
    params: &QuadParams,
    ch: &Characteristic,
    window: &LatticeWindow,
    root: Site,
) -> Result<Scalar> {
    assert_eq!(ch.picture, window.picture(), "characteristic picture must match window");
    let access = window_access(window);
    prolong_residual_with(params, ch, &access, window.picture(), root)
}

fn prolong_residual_with(
    params: &QuadParams,
    ch: &Characteristic,
    get: &Access<'_>,
    picture: Picture,
    root: Site,
) -> Result<Scalar> {
    let plaq: [Scalar; 4] = [
        get(root)?,
        get((root.0 + 1, root.1))?,
        get((root.0, root.1 + 1))?,
        get((root.0 + 1, root.1 + 1))?,
    ];
    let partials = corner_partials(params, picture, &plaq);
    let mut acc = plaq[0].zero_like();
    for corner in Corner::ALL {
        let (dn, dm) = corner.offset();
        let site = (root.0 + dn, root.1 + dm);
        let phi = ch.eval_with(params, site, get)?;
        acc = &acc + &(&phi * &partials[corner.index()]);
    }
    Ok(acc)
}

/// Prolongation residual with the far corner eliminated through the
/// equation: `x11 := solve_corner(x00, x10, x01)`. Zero for true
/// symmetries. Characteristics whose stencils reach beyond the plaquette
/// need the rest of the window on-shell as well.
pub fn on_shell_residual(
    params: &QuadParams,
    ch: &Characteristic,
    window: &LatticeWindow,
    root: Site,
) -> Result<Scalar> {
    assert_eq!(ch.picture, window.picture(), "characteristic picture must match window");
    let mut plaq = plaquette(window, root.0, root.1)?;
    let solved = solve_corner(params, window.picture(), &plaq, Corner::ShiftNM, root)?;
    plaq[Corner::ShiftNM.index()] = solved.clone();
    let far = (root.0 + 1, root.1 + 1);
    let base = window_access(window);
    let patched = move |s: Site| -> Result<Scalar> {
        if s == far {
            Ok(solved.clone())
        } else {
            base(s)
        }
    };
    prolong_residual_with(params, ch, &patched, window.picture(), root)
}

/// The one-parameter group of the point algebra:
/// `x -> (e0 + x) e^{e1} / (1 - e2 (e0 + x) e^{e1})`.
///
/// Exact in the rational kind when `e1 = 0`; otherwise the exponential
/// forces the float kind.
pub fn mobius_apply(e0: &Scalar, e1: &Scalar, e2: &Scalar, x: &Scalar) -> Result<Scalar> {
    let growth = e1.lift_like(x).exp()?;
    let shifted = &(&e0.lift_like(x) + x) * &growth;
    let denom = &x.one_like() - &(&e2.lift_like(x) * &shifted);
    shifted.try_div(&denom, "1 - e2 (e0 + x) e^{e1}")
}

/// Applies the same Moebius map to every cell.
pub fn mobius_window(
    e0: &Scalar,
    e1: &Scalar,
    e2: &Scalar,
    window: &LatticeWindow,
) -> Result<LatticeWindow> {
    let mut values = Vec::with_capacity(window.cells().len());
    for v in window.cells() {
        values.push(mobius_apply(e0, e1, e2, v)?);
    }
    Ok(LatticeWindow::from_values(
        window.origin(),
        window.nlen(),
        window.mlen(),
        window.picture(),
        values,
    ))
}

/// Derivative of `ch` at `site` with respect to the field value at
/// `target`, computed by seeding the accessor.
pub fn site_partial(
    ch: &Characteristic,
    params: &QuadParams,
    site: Site,
    target: Site,
    get: &Access<'_>,
) -> Result<Scalar> {
    let seeded = move |s: Site| -> Result<Scalar> {
        let v = get(s)?;
        let d = if s == target { v.one_like() } else { v.zero_like() };
        Ok(Scalar::dual(v, d))
    };
    match ch.eval_with(params, site, &seeded)? {
        Scalar::Dual(d) => Ok(d.derivative),
        _ => Ok(get(target)?.zero_like()),
    }
}

/// Evolutionary bracket of two characteristics:
/// `[f, g](s) = sum_k dg(s)/du_{s+k} f(s+k) - df(s)/du_{s+k} g(s+k)`.
///
/// The result is a new characteristic over the dilated union stencil; it
/// is antisymmetric and reduces to the pointwise Lie bracket on point
/// characteristics.
pub fn bracket(f: &Characteristic, g: &Characteristic) -> Characteristic {
    assert_eq!(f.picture, g.picture, "pictures must agree");
    let mut stencil: Vec<Site> = Vec::new();
    for &k in &g.stencil {
        stencil.push(k);
        for &j in &f.stencil {
            stencil.push((k.0 + j.0, k.1 + j.1));
        }
    }
    for &k in &f.stencil {
        stencil.push(k);
        for &j in &g.stencil {
            stencil.push((k.0 + j.0, k.1 + j.1));
        }
    }
    let name = format!("[{},{}]", f.name, g.name);
    let (fc, gc) = (f.clone(), g.clone());
    Characteristic {
        name,
        picture: f.picture,
        stencil: normalize_stencil(stencil),
        params: f.params.clone(),
        eval: Arc::new(move |p, site, get| {
            let mut acc: Option<Scalar> = None;
            let mut add = |term: Scalar| {
                acc = Some(match acc.take() {
                    Some(a) => &a + &term,
                    None => term,
                });
            };
            for &k in &gc.stencil {
                let target = (site.0 + k.0, site.1 + k.1);
                let dg = site_partial(&gc, p, site, target, get)?;
                if dg.is_zero() {
                    continue;
                }
                let fv = fc.eval_with(p, target, get)?;
                add(&dg * &fv);
            }
            for &k in &fc.stencil {
                let target = (site.0 + k.0, site.1 + k.1);
                let df = site_partial(&fc, p, site, target, get)?;
                if df.is_zero() {
                    continue;
                }
                let gv = gc.eval_with(p, target, get)?;
                add(-&(&df * &gv));
            }
            match acc {
                Some(v) => Ok(v),
                None => Ok(get(site)?.zero_like()),
            }
        }),
    }
}

/// Outcome of the sampled determining-equation solve.
#[derive(Clone, Debug)]
pub struct PointSymmetryReport {
    pub gamma_max: usize,
    /// `alpha1 = alpha2`: classification invalid, nullspace still reported.
    pub degenerate: bool,
    pub dimension: usize,
    /// Whether every nullspace vector carries identical coefficients at
    /// all four plaquette corners (the "coefficients are constants"
    /// conclusion).
    pub site_uniform: bool,
    /// Canonical nullspace basis over the per-corner unknowns,
    /// `4 * (gamma_max + 1)` entries per vector, corner-major.
    pub nullspace_basis: Vec<Vec<Rational>>,
    /// Present when `site_uniform`: canonical polynomial coefficient
    /// rows, degree-minor (`c0 + c1 x + c2 x^2 + ...`).
    pub polynomials: Option<Vec<Vec<Rational>>>,
    /// Every basis vector re-verified exactly at fresh random points.
    pub verified: bool,
}

/// Solves for all point characteristics `phi(x) = sum_k phi_k x^k` of
/// degree `<= gamma_max` whose prolongation vanishes on-shell, by
/// sampling the residual identity at random rational points and taking
/// an exact nullspace. Each corner of the plaquette gets independent
/// unknowns; site-independence is a *conclusion* read off the nullspace,
/// not an assumption.
pub fn point_symmetry_basis(
    params: &QuadParams,
    gamma_max: usize,
    rng: &mut impl RngCore,
) -> Result<PointSymmetryReport> {
    let unknowns = 4 * (gamma_max + 1);
    let degenerate = params.degenerate();

    let mut previous: Option<Vec<Vec<Rational>>> = None;
    for _attempt in 0..4 {
        let rows = assemble_rows(params, gamma_max, 3 * unknowns, rng)?;
        let basis = RatMatrix::from_rows(rows).nullspace();
        if let Some(prev) = &previous {
            if *prev == basis {
                return finish_report(params, gamma_max, degenerate, basis, rng);
            }
        }
        previous = Some(basis);
    }
    Err(Error::InconsistentFit)
}

fn assemble_rows(
    params: &QuadParams,
    gamma_max: usize,
    count: usize,
    rng: &mut impl RngCore,
) -> Result<Vec<Vec<Rational>>> {
    let mut rows = Vec::with_capacity(count);
    while rows.len() < count {
        let Some((plaq, partials)) = sample_on_shell_plaquette(params, rng) else {
            continue;
        };
        let mut row = Vec::with_capacity(4 * (gamma_max + 1));
        for corner in Corner::ALL {
            let x = plaq[corner.index()].as_rational()?.clone();
            let q = partials[corner.index()].as_rational()?.clone();
            let mut power = Rational::one();
            for _ in 0..=gamma_max {
                row.push(&power * &q);
                power = &power * &x;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn sample_on_shell_plaquette(
    params: &QuadParams,
    rng: &mut impl RngCore,
) -> Option<([Scalar; 4], [Scalar; 4])> {
    let mut plaq: [Scalar; 4] = core::array::from_fn(|_| sampling::rational_scalar(rng, 20, 10));
    let solved = solve_corner(params, Picture::X, &plaq, Corner::ShiftNM, (0, 0)).ok()?;
    plaq[Corner::ShiftNM.index()] = solved;
    let partials = corner_partials(params, Picture::X, &plaq);
    Some((plaq, partials))
}

fn finish_report(
    params: &QuadParams,
    gamma_max: usize,
    degenerate: bool,
    basis: Vec<Vec<Rational>>,
    rng: &mut impl RngCore,
) -> Result<PointSymmetryReport> {
    // Certify: every basis vector kills the residual at fresh points.
    let mut verified = true;
    'vectors: for vec in &basis {
        for _ in 0..15 {
            let Some((plaq, partials)) = sample_on_shell_plaquette(params, rng) else {
                continue;
            };
            let mut acc = Rational::zero();
            for corner in Corner::ALL {
                let x = plaq[corner.index()].as_rational()?;
                let q = partials[corner.index()].as_rational()?;
                let mut power = Rational::one();
                for k in 0..=gamma_max {
                    let c = &vec[corner.index() * (gamma_max + 1) + k];
                    acc = &acc + &(&(c * &power) * q);
                    power = &power * x;
                }
            }
            if !acc.is_zero() {
                verified = false;
                break 'vectors;
            }
        }
    }

    let site_uniform = basis.iter().all(|v| {
        let width = gamma_max + 1;
        (1..4).all(|s| (0..width).all(|k| v[s * width + k] == v[k]))
    });

    let polynomials = if site_uniform && !basis.is_empty() {
        let width = gamma_max + 1;
        let rows: Vec<Vec<Rational>> = basis.iter().map(|v| v[..width].to_vec()).collect();
        let mut m = RatMatrix::from_rows(rows.clone());
        m.rref();
        let canon: Vec<Vec<Rational>> = (0..rows.len())
            .map(|r| (0..width).map(|c| m.get(r, c).clone()).collect())
            .filter(|row: &Vec<Rational>| row.iter().any(|v| !v.is_zero()))
            .collect();
        Some(canon)
    } else {
        None
    };

    Ok(PointSymmetryReport {
        gamma_max,
        degenerate,
        dimension: basis.len(),
        site_uniform,
        nullspace_basis: basis,
        polynomials,
        verified,
    })
}

/// Exact commutator table of point characteristics given as polynomial
/// coefficient rows: `table[i][j]` holds the coordinates of
/// `[b_i, b_j]` in the basis. Errors with `NotProportional` when a
/// bracket leaves the span.
pub fn structure_constants(basis: &[Vec<Rational>]) -> Result<Vec<Vec<Vec<Rational>>>> {
    let width = basis.iter().map(Vec::len).max().unwrap_or(0);
    let padded: Vec<Vec<Rational>> = basis.iter().map(|b| pad(b, width)).collect();
    let mut table = Vec::with_capacity(basis.len());
    for f in &padded {
        let mut row = Vec::with_capacity(basis.len());
        for g in &padded {
            let br = poly_bracket(f, g);
            // bracket of degree-d polys has degree 2d-1; pad the basis up
            let target_width = br.len().max(width);
            let wide: Vec<Vec<Rational>> = padded.iter().map(|b| pad(b, target_width)).collect();
            let coords = crate::numerics::linalg::express_in_basis(&wide, &pad(&br, target_width))
                .ok_or(Error::NotProportional)?;
            row.push(coords);
        }
        table.push(row);
    }
    Ok(table)
}

fn pad(v: &[Rational], width: usize) -> Vec<Rational> {
    let mut out = v.to_vec();
    out.resize(width, Rational::zero());
    out
}

/// `[f, g] = g' f - f' g` on polynomial coefficient rows.
pub fn poly_bracket(f: &[Rational], g: &[Rational]) -> Vec<Rational> {
    let gp = poly_diff(g);
    let fp = poly_diff(f);
    poly_sub(&poly_mul(&gp, f), &poly_mul(&fp, g))
}

fn poly_diff(p: &[Rational]) -> Vec<Rational> {
    if p.len() <= 1 {
        return vec![Rational::zero()];
    }
    (1..p.len()).map(|k| &Rational::from_int(k as i64) * &p[k]).collect()
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            &x - &y
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::lattice::{eval_quad, window_on_shell};

    fn int(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::rational(n, d)
    }

    fn params21() -> QuadParams {
        QuadParams::new(int(2), int(1)).unwrap()
    }

    fn point_char(params: &QuadParams, degree: usize) -> Characteristic {
        // the monomial x^degree
        let mut coeffs = vec![int(0); degree + 1];
        coeffs[degree] = int(1);
        Characteristic::point(format!("x^{degree}"), Picture::X, params.clone(), coeffs)
    }

    fn random_window(rng: &mut ChaCha8Rng) -> LatticeWindow {
        sampling::free_window(Picture::X, (0, 0), 2, 2, rng, 25, 9)
    }

    #[test]
    fn translation_annihilates_off_shell() {
        let p = params21();
        let x0 = point_char(&p, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let w = random_window(&mut rng);
            let r = prolong_residual(&p, &x0, &w, (0, 0)).unwrap();
            assert!(r.is_zero());
        }
    }

    #[test]
    fn scaling_gives_twice_the_residual() {
        let p = params21();
        let x1 = point_char(&p, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let w = random_window(&mut rng);
            let r = prolong_residual(&p, &x1, &w, (0, 0)).unwrap();
            let q = eval_quad(
                &p,
                w.value(0, 0).unwrap(),
                w.value(1, 0).unwrap(),
                w.value(0, 1).unwrap(),
                w.value(1, 1).unwrap(),
            );
            assert_eq!(r, &int(2) * &q);
        }
    }

    #[test]
    fn quadratic_gives_corner_sum_times_residual() {
        let p = params21();
        let x2 = point_char(&p, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let w = random_window(&mut rng);
            let r = prolong_residual(&p, &x2, &w, (0, 0)).unwrap();
            let plaq = plaquette(&w, 0, 0).unwrap();
            let q = quad_residual(&p, Picture::X, &plaq);
            let sum = &(&plaq[0] + &plaq[1]) + &(&plaq[2] + &plaq[3]);
            assert_eq!(r, &sum * &q);
        }
    }

    #[test]
    fn quadratic_on_shell_residual_vanishes() {
        let p = params21();
        let x2 = point_char(&p, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let w = random_window(&mut rng);
            match on_shell_residual(&p, &x2, &w, (0, 0)) {
                Ok(r) => assert!(r.is_zero()),
                Err(Error::SingularCorner { .. }) => {}
                Err(e) => panic!("unexpected: {e}"),
            }
        }
    }

    #[test]
    fn mobius_known_values() {
        // pure translation
        let v = mobius_apply(&rat(2, 3), &int(0), &int(0), &int(1)).unwrap();
        assert_eq!(v, rat(5, 3));
        // (0, 0, 1/2) at x = 1 -> 1 / (1 - 1/2) = 2
        let v = mobius_apply(&int(0), &int(0), &rat(1, 2), &int(1)).unwrap();
        assert_eq!(v, int(2));
        // pole
        let err = mobius_apply(&int(0), &int(0), &int(1), &int(1)).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
    }

    #[test]
    fn mobius_preserves_solutions_exactly() {
        let p = params21();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let w = sampling::evolved_window(&p, Picture::X, (0, 0), 5, 5, &mut rng, 12, 7).unwrap();
            let e0 = sampling::rational_scalar(&mut rng, 5, 5);
            let e2 = sampling::rational_scalar(&mut rng, 1, 40);
            match mobius_window(&e0, &int(0), &e2, &w) {
                Ok(image) => assert!(window_on_shell(&p, &image).unwrap()),
                Err(Error::Pole { .. }) => {} // the map hit its pole on a cell; resample
                Err(e) => panic!("unexpected: {e}"),
            }
        }
    }

    #[test]
    fn bracket_of_point_basis_is_sl2() {
        let p = params21();
        let x0 = point_char(&p, 0);
        let x1 = point_char(&p, 1);
        let x2 = point_char(&p, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let w = random_window(&mut rng);
            let v = w.value(0, 0).unwrap().clone();
            let b01 = bracket(&x0, &x1).eval_window(&w, (0, 0)).unwrap();
            assert_eq!(b01, int(1)); // characteristic of x^0
            let b12 = bracket(&x1, &x2).eval_window(&w, (0, 0)).unwrap();
            assert_eq!(b12, &v * &v); // x^2
            let b02 = bracket(&x0, &x2).eval_window(&w, (0, 0)).unwrap();
            assert_eq!(b02, &int(2) * &v); // 2 x
            // antisymmetry
            let b00 = bracket(&x0, &x0).eval_window(&w, (0, 0)).unwrap();
            assert!(b00.is_zero());
            let b10 = bracket(&x1, &x0).eval_window(&w, (0, 0)).unwrap();
            assert_eq!(b10, -&b01);
        }
    }

    #[test]
    fn point_basis_dimension_three() {
        let p = params21();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let report = point_symmetry_basis(&p, 2, &mut rng).unwrap();
        assert!(!report.degenerate);
        assert_eq!(report.dimension, 3);
        assert!(report.site_uniform);
        assert!(report.verified);
        let polys = report.polynomials.unwrap();
        // canonical basis of {1, x, x^2}
        assert_eq!(polys.len(), 3);
        for (i, poly) in polys.iter().enumerate() {
            for (k, c) in poly.iter().enumerate() {
                let expect = if i == k { Rational::one() } else { Rational::zero() };
                assert_eq!(c, &expect);
            }
        }
    }

    #[test]
    fn point_basis_degree_one_restriction() {
        let p = params21();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let report = point_symmetry_basis(&p, 1, &mut rng).unwrap();
        assert_eq!(report.dimension, 2);
        assert!(report.site_uniform);
    }

    #[test]
    fn point_basis_degree_three_adds_nothing() {
        let p = params21();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let report = point_symmetry_basis(&p, 3, &mut rng).unwrap();
        assert_eq!(report.dimension, 3);
        assert!(report.site_uniform);
        // cubic coefficient forced to zero in every basis vector
        for v in &report.nullspace_basis {
            for s in 0..4 {
                assert!(v[s * 4 + 3].is_zero());
            }
        }
    }

    #[test]
    fn degenerate_parameters_flagged() {
        let p = QuadParams::new(int(3), int(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let report = point_symmetry_basis(&p, 2, &mut rng).unwrap();
        assert!(report.degenerate);
        assert!(report.dimension > 3); // the per-site freedom of the factorized case
        assert!(!report.site_uniform);
    }

    #[test]
    fn structure_constants_match_sl2() {
        let one = vec![Rational::one()];
        let x = vec![Rational::zero(), Rational::one()];
        let x2 = vec![Rational::zero(), Rational::zero(), Rational::one()];
        let table = structure_constants(&[one, x, x2]).unwrap();
        let coeff = |v: &Vec<Rational>| -> Vec<i64> {
            v.iter()
                .map(|r| {
                    assert!(r.denom() == &num_bigint::BigInt::from(1));
                    i64::try_from(r.numer().clone()).unwrap()
                })
                .collect()
        };
        assert_eq!(coeff(&table[0][1]), vec![1, 0, 0]); // [X0, X1] = X0
        assert_eq!(coeff(&table[1][2]), vec![0, 0, 1]); // [X1, X2] = X2
        assert_eq!(coeff(&table[0][2]), vec![0, 2, 0]); // [X0, X2] = 2 X1
        assert_eq!(coeff(&table[0][0]), vec![0, 0, 0]);
        assert_eq!(coeff(&table[2][1]), vec![0, 0, -1]); // antisymmetry
    }
}
