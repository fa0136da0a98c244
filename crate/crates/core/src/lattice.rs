//! Lattice field storage, the quad equation, corner solving, quadrant
//! evolution, and the gauge shift between the `x` and `u` pictures.
//!
//! Corner convention for a plaquette rooted at `(n, m)`:
//!
//! ```text
//!   index 2: (n, m+1)      index 3: (n+1, m+1)
//!   index 0: (n, m)        index 1: (n+1, m)
//! ```
//!
//! The quad residual in the `x` picture is
//! `alpha1 (x00 - x01)(x10 - x11) - alpha2 (x00 - x10)(x01 - x11)`;
//! in the `u` picture every m-difference is shifted by `beta0` and every
//! n-difference by `alpha0`, which is the same equation after
//! `x = u + beta0 m + alpha0 n`.

use alloc::vec::Vec;

use crate::error::Error;
use crate::numerics::{BaseKind, Scalar};
use crate::Result;

pub type Site = (i64, i64);

/// Which dependent variable a window stores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    X,
    U,
}

/// The four corners of a plaquette, in storage order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corner {
    Root,
    ShiftN,
    ShiftM,
    ShiftNM,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::Root, Corner::ShiftN, Corner::ShiftM, Corner::ShiftNM];

    pub fn index(self) -> usize {
        match self {
            Corner::Root => 0,
            Corner::ShiftN => 1,
            Corner::ShiftM => 2,
            Corner::ShiftNM => 3,
        }
    }

    pub fn offset(self) -> Site {
        match self {
            Corner::Root => (0, 0),
            Corner::ShiftN => (1, 0),
            Corner::ShiftM => (0, 1),
            Corner::ShiftNM => (1, 1),
        }
    }
}

/// The constants defining one instance of the equation. `alpha0` and
/// `beta0` only matter in the `u` picture, where they must satisfy
/// `alpha1 beta0^2 = alpha2 alpha0^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadParams {
    pub alpha1: Scalar,
    pub alpha2: Scalar,
    pub alpha0: Scalar,
    pub beta0: Scalar,
}

impl QuadParams {
    /// Parameters for x-picture work only; the gauge constants are zero
    /// (the constraint holds trivially).
    pub fn new(alpha1: Scalar, alpha2: Scalar) -> Result<Self> {
        let zero = alpha1.zero_like();
        Self::with_beta0_unchecked(alpha1, alpha2, zero.clone(), zero)
    }

    /// Derives `beta0 = sign * alpha0 * sqrt(alpha2 / alpha1)`. Exact for
    /// rationals (errors with `NonSquareRatio` when no exact root
    /// exists), numerical for floats.
    pub fn with_gauge(
        alpha1: Scalar,
        alpha2: Scalar,
        alpha0: Scalar,
        negative_beta0: bool,
    ) -> Result<Self> {
        let beta0 = match (&alpha1, &alpha2, &alpha0) {
            (Scalar::Rational(a1), Scalar::Rational(a2), Scalar::Rational(a0)) => {
                let ratio = a2.try_div(a1, "alpha1")?;
                let root = ratio.sqrt_exact().ok_or(Error::NonSquareRatio)?;
                let mut b = a0 * &root;
                if negative_beta0 {
                    b = -b;
                }
                Scalar::Rational(b)
            }
            (Scalar::Float(a1), Scalar::Float(a2), Scalar::Float(a0)) => {
                let ratio = a2 / a1;
                if !(ratio >= 0.0) {
                    return Err(Error::NonSquareRatio);
                }
                let mut b = a0 * num_traits::Float::sqrt(ratio);
                if negative_beta0 {
                    b = -b;
                }
                Scalar::Float(b)
            }
            _ => return Err(Error::KindMismatch { expected: "uniform parameter kind" }),
        };
        Self::with_beta0(alpha1, alpha2, alpha0, beta0)
    }

    /// Validates the constraint before accepting an explicit `beta0`.
    pub fn with_beta0(alpha1: Scalar, alpha2: Scalar, alpha0: Scalar, beta0: Scalar) -> Result<Self> {
        let p = Self::with_beta0_unchecked(alpha1, alpha2, alpha0, beta0)?;
        if !p.constraint_ok() {
            return Err(Error::ConstraintViolated);
        }
        Ok(p)
    }

    fn with_beta0_unchecked(
        alpha1: Scalar,
        alpha2: Scalar,
        alpha0: Scalar,
        beta0: Scalar,
    ) -> Result<Self> {
        if alpha1.is_zero() || alpha2.is_zero() {
            return Err(Error::InvalidParameters { what: "alpha1 and alpha2 must be nonzero" });
        }
        let k = alpha1.base_kind();
        if alpha2.base_kind() != k || alpha0.base_kind() != k || beta0.base_kind() != k {
            return Err(Error::KindMismatch { expected: "uniform parameter kind" });
        }
        Ok(QuadParams { alpha1, alpha2, alpha0, beta0 })
    }

    /// `alpha1 beta0^2 = alpha2 alpha0^2`, exact for rationals, within
    /// roundoff for floats.
    pub fn constraint_ok(&self) -> bool {
        let lhs = &self.alpha1 * &(&self.beta0 * &self.beta0);
        let rhs = &self.alpha2 * &(&self.alpha0 * &self.alpha0);
        match (&lhs, &rhs) {
            (Scalar::Float(a), Scalar::Float(b)) => {
                let scale = a.abs().max(b.abs()).max(1.0);
                (a - b).abs() <= 1e-12 * scale
            }
            _ => lhs == rhs,
        }
    }

    pub fn degenerate(&self) -> bool {
        self.alpha1 == self.alpha2
    }

    /// The same instance read through the `n <-> m` relabeling:
    /// `alpha1 <-> alpha2`, `alpha0 <-> beta0`.
    pub fn swapped(&self) -> Self {
        QuadParams {
            alpha1: self.alpha2.clone(),
            alpha2: self.alpha1.clone(),
            alpha0: self.beta0.clone(),
            beta0: self.alpha0.clone(),
        }
    }

    pub fn to_float(&self) -> Self {
        QuadParams {
            alpha1: self.alpha1.to_float(),
            alpha2: self.alpha2.to_float(),
            alpha0: self.alpha0.to_float(),
            beta0: self.beta0.to_float(),
        }
    }

    pub fn base_kind(&self) -> BaseKind {
        self.alpha1.base_kind()
    }
}

/// Dense rectangular window of field values.
///
/// Spans `n in [origin.0, origin.0 + nlen)` and
/// `m in [origin.1, origin.1 + mlen)`, stored row-major with `n` as the
/// slow index.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeWindow {
    origin: Site,
    nlen: usize,
    mlen: usize,
    picture: Picture,
    values: Vec<Scalar>,
}

impl LatticeWindow {
    pub fn from_fn<F>(origin: Site, nlen: usize, mlen: usize, picture: Picture, mut f: F) -> Self
    where
        F: FnMut(i64, i64) -> Scalar,
    {
        let mut values = Vec::with_capacity(nlen * mlen);
        for i in 0..nlen {
            for j in 0..mlen {
                values.push(f(origin.0 + i as i64, origin.1 + j as i64));
            }
        }
        LatticeWindow { origin, nlen, mlen, picture, values }
    }

    pub fn from_values(
        origin: Site,
        nlen: usize,
        mlen: usize,
        picture: Picture,
        values: Vec<Scalar>,
    ) -> Self {
        assert_eq!(values.len(), nlen * mlen, "cell count must match extent");
        LatticeWindow { origin, nlen, mlen, picture, values }
    }

    pub fn constant(origin: Site, nlen: usize, mlen: usize, picture: Picture, v: Scalar) -> Self {
        LatticeWindow::from_fn(origin, nlen, mlen, picture, |_, _| v.clone())
    }

    pub fn origin(&self) -> Site {
        self.origin
    }

    pub fn nlen(&self) -> usize {
        self.nlen
    }

    pub fn mlen(&self) -> usize {
        self.mlen
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn contains(&self, n: i64, m: i64) -> bool {
        n >= self.origin.0
            && n < self.origin.0 + self.nlen as i64
            && m >= self.origin.1
            && m < self.origin.1 + self.mlen as i64
    }

    fn idx(&self, n: i64, m: i64) -> Result<usize> {
        if !self.contains(n, m) {
            return Err(Error::OutOfWindow { n, m });
        }
        let i = (n - self.origin.0) as usize;
        let j = (m - self.origin.1) as usize;
        Ok(i * self.mlen + j)
    }

    pub fn value(&self, n: i64, m: i64) -> Result<&Scalar> {
        Ok(&self.values[self.idx(n, m)?])
    }

    pub fn set(&mut self, n: i64, m: i64, v: Scalar) -> Result<()> {
        let i = self.idx(n, m)?;
        self.values[i] = v;
        Ok(())
    }

    pub fn cells(&self) -> &[Scalar] {
        &self.values
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        let (n0, m0) = self.origin;
        let mlen = self.mlen as i64;
        (0..(self.nlen * self.mlen) as i64).map(move |k| (n0 + k / mlen, m0 + k % mlen))
    }

    /// Root sites of all plaquettes fully inside the window.
    pub fn plaquette_roots(&self) -> impl Iterator<Item = Site> + '_ {
        let (n0, m0) = self.origin;
        let nn = self.nlen.saturating_sub(1) as i64;
        let mm = self.mlen.saturating_sub(1) as i64;
        (0..nn * mm).map(move |k| (n0 + k / mm, m0 + k % mm))
    }

    pub fn to_float(&self) -> LatticeWindow {
        LatticeWindow {
            origin: self.origin,
            nlen: self.nlen,
            mlen: self.mlen,
            picture: self.picture,
            values: self.values.iter().map(Scalar::to_float).collect(),
        }
    }

    /// Sub-window `n in [n_lo, n_hi]`, `m in [m_lo, m_hi]` (inclusive).
    pub fn subwindow(&self, n_lo: i64, n_hi: i64, m_lo: i64, m_hi: i64) -> Result<LatticeWindow> {
        if n_lo > n_hi || m_lo > m_hi {
            return Err(Error::CoreEmpty);
        }
        let nlen = (n_hi - n_lo + 1) as usize;
        let mlen = (m_hi - m_lo + 1) as usize;
        let mut values = Vec::with_capacity(nlen * mlen);
        for n in n_lo..=n_hi {
            for m in m_lo..=m_hi {
                values.push(self.value(n, m)?.clone());
            }
        }
        Ok(LatticeWindow { origin: (n_lo, m_lo), nlen, mlen, picture: self.picture, values })
    }

    /// The window reflected across the diagonal: cell `(n, m)` of the
    /// result holds cell `(m, n)` of `self`.
    pub fn transpose(&self) -> LatticeWindow {
        let origin = (self.origin.1, self.origin.0);
        LatticeWindow::from_fn(origin, self.mlen, self.nlen, self.picture, |n, m| {
            self.value(m, n).expect("transpose stays in range").clone()
        })
    }
}

/// Residual of the quad equation on four corner values in the `x`
/// picture. Zero iff the plaquette is on-shell.
pub fn eval_quad(params: &QuadParams, x00: &Scalar, x10: &Scalar, x01: &Scalar, x11: &Scalar) -> Scalar {
    let a1 = params.alpha1.lift_like(x00);
    let a2 = params.alpha2.lift_like(x00);
    &(&a1 * &(&(x00 - x01) * &(x10 - x11))) - &(&a2 * &(&(x00 - x10) * &(x01 - x11)))
}

/// Picture-aware residual: in the `u` picture m-differences are shifted
/// by `beta0` and n-differences by `alpha0`.
pub fn quad_residual(params: &QuadParams, picture: Picture, plaq: &[Scalar; 4]) -> Scalar {
    let [v00, v10, v01, v11] = plaq;
    match picture {
        Picture::X => eval_quad(params, v00, v10, v01, v11),
        Picture::U => {
            let a0 = params.alpha0.lift_like(v00);
            let b0 = params.beta0.lift_like(v00);
            let a1 = params.alpha1.lift_like(v00);
            let a2 = params.alpha2.lift_like(v00);
            let lhs = &a1 * &(&(&(v00 - v01) - &b0) * &(&(v10 - v11) - &b0));
            let rhs = &a2 * &(&(&(v00 - v10) - &a0) * &(&(v01 - v11) - &a0));
            &lhs - &rhs
        }
    }
}

/// The wave-equation product `(x00 - x11)(x10 - x01)`. When
/// `alpha1 = alpha2 = alpha`, `eval_quad = alpha * factor_degenerate`
/// identically.
pub fn factor_degenerate(x00: &Scalar, x10: &Scalar, x01: &Scalar, x11: &Scalar) -> Scalar {
    &(x00 - x11) * &(x10 - x01)
}

/// Corner values of the plaquette rooted at `(n, m)`.
pub fn plaquette(window: &LatticeWindow, n: i64, m: i64) -> Result<[Scalar; 4]> {
    Ok([
        window.value(n, m)?.clone(),
        window.value(n + 1, m)?.clone(),
        window.value(n, m + 1)?.clone(),
        window.value(n + 1, m + 1)?.clone(),
    ])
}

/// Residual of the plaquette rooted at `(n, m)`, in the window's picture.
pub fn plaquette_residual(params: &QuadParams, window: &LatticeWindow, n: i64, m: i64) -> Result<Scalar> {
    let plaq = plaquette(window, n, m)?;
    Ok(quad_residual(params, window.picture(), &plaq))
}

/// True when every plaquette residual in the window is exactly zero.
pub fn window_on_shell(params: &QuadParams, window: &LatticeWindow) -> Result<bool> {
    for (n, m) in window.plaquette_roots() {
        if !plaquette_residual(params, window, n, m)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest plaquette-residual magnitude over the window (float kind).
pub fn max_residual(params: &QuadParams, window: &LatticeWindow) -> Result<f64> {
    let mut worst = 0.0f64;
    for (n, m) in window.plaquette_roots() {
        let r = plaquette_residual(params, window, n, m)?.primal_abs()?;
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// Plaquette-local gauge offset of a corner: zero in the `x` picture,
/// `alpha0 dn + beta0 dm` in the `u` picture (so `value + offset` is the
/// corner's x-value up to a common constant).
fn corner_offset(params: &QuadParams, picture: Picture, corner: Corner, like: &Scalar) -> Scalar {
    match picture {
        Picture::X => like.zero_like(),
        Picture::U => {
            let (dn, dm) = corner.offset();
            let shift = &(&params.alpha0 * &Scalar::int_like(dn, &params.alpha0))
                + &(&params.beta0 * &Scalar::int_like(dm, &params.beta0));
            shift.lift_like(like)
        }
    }
}

/// What a corner solve can find: a unique value, no constraint at all
/// (the residual vanishes identically in the free corner), or no
/// solution (nonzero constant residual).
#[derive(Clone, Debug, PartialEq)]
pub enum CornerSolve {
    Unique(Scalar),
    AnyValue,
    NoSolution,
}

/// The affine solve with all three outcomes exposed.
pub fn solve_corner_cases(
    params: &QuadParams,
    picture: Picture,
    plaq: &[Scalar; 4],
    free: Corner,
) -> CornerSolve {
    let like = &plaq[if free == Corner::Root { 1 } else { 0 }];
    let mut at_zero = plaq.clone();
    at_zero[free.index()] = like.zero_like();
    let b = quad_residual(params, picture, &at_zero);
    let mut at_one = plaq.clone();
    at_one[free.index()] = like.one_like();
    let a = &quad_residual(params, picture, &at_one) - &b;
    if a.is_zero() {
        if b.is_zero() {
            return CornerSolve::AnyValue;
        }
        return CornerSolve::NoSolution;
    }
    match (-&b).try_div(&a, "corner coefficient") {
        Ok(v) => CornerSolve::Unique(v),
        Err(_) => CornerSolve::NoSolution,
    }
}

/// Solves the quad equation for one corner given the other three. The
/// residual is affine in each corner, so the solve is a ratio of two
/// evaluations; `SingularCorner` when the linear coefficient vanishes.
///
/// One exception: when the corner is undetermined *and* the three known
/// corners carry equal x-values, the solve continues with the
/// constant-in-x value, so constant data evolves to constant data.
///
/// `plaq` supplies the three known corners; the entry at the free corner
/// is ignored. `site` is only used to label errors.
pub fn solve_corner(
    params: &QuadParams,
    picture: Picture,
    plaq: &[Scalar; 4],
    free: Corner,
    site: Site,
) -> Result<Scalar> {
    match solve_corner_cases(params, picture, plaq, free) {
        CornerSolve::Unique(v) => Ok(v),
        CornerSolve::AnyValue => constant_continuation(params, picture, plaq, free)
            .ok_or(Error::SingularCorner { n: site.0, m: site.1 }),
        CornerSolve::NoSolution => Err(Error::SingularCorner { n: site.0, m: site.1 }),
    }
}

/// `Some(value)` when the known corners share one x-value; the returned
/// value extends that constant to the free corner.
fn constant_continuation(
    params: &QuadParams,
    picture: Picture,
    plaq: &[Scalar; 4],
    free: Corner,
) -> Option<Scalar> {
    let mut shared: Option<Scalar> = None;
    for corner in Corner::ALL {
        if corner == free {
            continue;
        }
        let v = &plaq[corner.index()];
        let x = v + &corner_offset(params, picture, corner, v);
        match &shared {
            None => shared = Some(x),
            Some(s) if *s == x => {}
            Some(_) => return None,
        }
    }
    let x = shared?;
    Some(&x - &corner_offset(params, picture, free, &x))
}

/// Fills the quadrant above and to the right of the two boundary axes:
/// `row0[i] = value at (origin.0 + i, origin.1)` and
/// `col0[j] = value at (origin.0, origin.1 + j)`, with
/// `row0[0] == col0[0]`. Every interior plaquette of the result
/// satisfies the equation exactly.
pub fn evolve_quadrant(
    params: &QuadParams,
    picture: Picture,
    row0: &[Scalar],
    col0: &[Scalar],
    origin: Site,
) -> Result<LatticeWindow> {
    assert!(!row0.is_empty() && !col0.is_empty(), "boundary data required");
    assert_eq!(row0[0], col0[0], "shared corner must agree");
    let nlen = row0.len();
    let mlen = col0.len();
    let mut w = LatticeWindow::constant(origin, nlen, mlen, picture, row0[0].zero_like());
    for (i, v) in row0.iter().enumerate() {
        w.set(origin.0 + i as i64, origin.1, v.clone())?;
    }
    for (j, v) in col0.iter().enumerate() {
        w.set(origin.0, origin.1 + j as i64, v.clone())?;
    }
    for i in 1..nlen {
        for j in 1..mlen {
            let n = origin.0 + i as i64;
            let m = origin.1 + j as i64;
            let plaq = [
                w.value(n - 1, m - 1)?.clone(),
                w.value(n, m - 1)?.clone(),
                w.value(n - 1, m)?.clone(),
                w.value(n - 1, m - 1)?.zero_like(), // placeholder for the free corner
            ];
            let v = solve_corner(params, picture, &plaq, Corner::ShiftNM, (n - 1, m - 1))?;
            w.set(n, m, v)?;
        }
    }
    Ok(w)
}

/// `u = x - beta0 m - alpha0 n`, with absolute site indices. Requires the
/// gauge constraint; the inverse is [`gauge_to_x`].
pub fn gauge_to_u(params: &QuadParams, window: &LatticeWindow) -> Result<LatticeWindow> {
    assert_eq!(window.picture(), Picture::X, "gauge_to_u expects an x-picture window");
    if !params.constraint_ok() {
        return Err(Error::ConstraintViolated);
    }
    Ok(shift_window(params, window, Picture::U, -1))
}

/// `x = u + beta0 m + alpha0 n`.
pub fn gauge_to_x(params: &QuadParams, window: &LatticeWindow) -> Result<LatticeWindow> {
    assert_eq!(window.picture(), Picture::U, "gauge_to_x expects a u-picture window");
    if !params.constraint_ok() {
        return Err(Error::ConstraintViolated);
    }
    Ok(shift_window(params, window, Picture::X, 1))
}

fn shift_window(params: &QuadParams, window: &LatticeWindow, picture: Picture, sign: i64) -> LatticeWindow {
    LatticeWindow::from_fn(window.origin(), window.nlen(), window.mlen(), picture, |n, m| {
        let v = window.value(n, m).expect("in range");
        let shift = &(&params.alpha0 * &Scalar::int_like(n, &params.alpha0))
            + &(&params.beta0 * &Scalar::int_like(m, &params.beta0));
        v + &(&Scalar::int_like(sign, v) * &shift.lift_like(v))
    })
}
