//! The catalog of generalized and master symmetries, the Miura link to
//! the Volterra lattice, the `n <-> m` swap, and the swap-based
//! symmetry combiner.
//!
//! All catalog formulas are hard-coded closed forms; what gets verified
//! is not their derivation but their properties: on-shell residuals,
//! bracket relations, and the intertwining of flows under the Miura map.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::Error;
use crate::lattice::{LatticeWindow, Picture, QuadParams, Site};
use crate::lax::Direction;
use crate::numerics::Scalar;
use crate::sampling;
use crate::symmetry::{
    bracket, on_shell_residual, window_access, Access, Characteristic,
};
use crate::Result;

/// Names of the catalog entries. The `n` family acts along the first
/// lattice direction, the `m` family along the second; `X0..X2` are the
/// point characteristics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CatalogName {
    S1n,
    S2n,
    S1m,
    S2m,
    G0n,
    G0m,
    M1n,
    M1m,
    Mixed,
    X0,
    X1,
    X2,
}

impl CatalogName {
    pub const ALL: [CatalogName; 12] = [
        CatalogName::S1n,
        CatalogName::S2n,
        CatalogName::S1m,
        CatalogName::S2m,
        CatalogName::G0n,
        CatalogName::G0m,
        CatalogName::M1n,
        CatalogName::M1m,
        CatalogName::Mixed,
        CatalogName::X0,
        CatalogName::X1,
        CatalogName::X2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogName::S1n => "S1n",
            CatalogName::S2n => "S2n",
            CatalogName::S1m => "S1m",
            CatalogName::S2m => "S2m",
            CatalogName::G0n => "G0n",
            CatalogName::G0m => "G0m",
            CatalogName::M1n => "M1n",
            CatalogName::M1m => "M1m",
            CatalogName::Mixed => "MIXED",
            CatalogName::X0 => "X0",
            CatalogName::X1 => "X1",
            CatalogName::X2 => "X2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or(Error::UnknownName)
    }

    /// Partner under the `n <-> m` relabeling.
    pub fn swapped(self) -> Self {
        match self {
            CatalogName::S1n => CatalogName::S1m,
            CatalogName::S1m => CatalogName::S1n,
            CatalogName::S2n => CatalogName::S2m,
            CatalogName::S2m => CatalogName::S2n,
            CatalogName::G0n => CatalogName::G0m,
            CatalogName::G0m => CatalogName::G0n,
            CatalogName::M1n => CatalogName::M1m,
            CatalogName::M1m => CatalogName::M1n,
            other => other,
        }
    }
}

impl core::fmt::Display for CatalogName {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How an entry sits in the hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    Point,
    Isospectral,
    NonIsospectralLocal,
    Master,
    Mixed,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: CatalogName,
    pub kind: EntryKind,
    pub characteristic: Characteristic,
}

impl CatalogEntry {
    /// Entries of these kinds are symmetries (zero on-shell residual).
    pub fn is_symmetry(&self) -> bool {
        matches!(self.kind, EntryKind::Point | EntryKind::Isospectral | EntryKind::Mixed)
    }
}

fn dir_axis(dir: Direction) -> Site {
    dir.step()
}

fn site_index(site: Site, dir: Direction) -> i64 {
    match dir {
        Direction::N => site.0,
        Direction::M => site.1,
    }
}

/// First isospectral flow along `dir`:
/// `4 (u0 - u_prev + c)(u0 - u_next - c) / (u_next - u_prev + 2c)`,
/// where `c` is the gauge shift of the direction.
pub fn first_flow(params: &QuadParams, dir: Direction, site: Site, get: &Access<'_>) -> Result<Scalar> {
    let (dn, dm) = dir_axis(dir);
    let u0 = get(site)?;
    let next = get((site.0 + dn, site.1 + dm))?;
    let prev = get((site.0 - dn, site.1 - dm))?;
    let c = dir.gauge_shift(params).lift_like(&u0);
    let four = Scalar::int_like(4, &u0);
    let two = Scalar::int_like(2, &u0);
    let num = &four * &(&(&(&u0 - &prev) + &c) * &(&(&u0 - &next) - &c));
    let den = &(&next - &prev) + &(&two * &c);
    num.try_div(&den, "u_next - u_prev + 2 shift")
}

/// Second isospectral flow along `dir` (five-point stencil).
///
/// The relative sign of the two bracketed terms is pinned by two exact
/// identities: the evolutionary bracket of the master flow with the
/// first flow is `16` times this one, and its Miura image is `-1/16`
/// times the second Volterra flow. (It is also the only sign for which
/// the flow is odd under the reflection `u_k -> u_{-k}`,
/// `shift -> -shift`, as every flow of this hierarchy must be.)
pub fn second_flow(params: &QuadParams, dir: Direction, site: Site, get: &Access<'_>) -> Result<Scalar> {
    let (dn, dm) = dir_axis(dir);
    let at = |k: i64| get((site.0 + k * dn, site.1 + k * dm));
    let u0 = at(0)?;
    let up = at(1)?;
    let upp = at(2)?;
    let um = at(-1)?;
    let umm = at(-2)?;
    let c = dir.gauge_shift(params).lift_like(&u0);
    let two = Scalar::int_like(2, &u0);
    let twoc = &two * &c;

    let prefactor_num = &(&(&u0 - &um) + &c) * &(&(&u0 - &up) - &c);
    let denom = &(&up - &um) + &twoc;
    let prefactor = prefactor_num.try_div(&(&denom * &denom), "(u_next - u_prev + 2 shift)^2")?;

    let t1_num = &(&(&upp - &up) + &c) * &(&(&um - &u0) - &c);
    let t1 = t1_num.try_div(&(&(&upp - &u0) + &twoc), "u_{+2} - u_0 + 2 shift")?;
    let t2_num = &(&(&um - &umm) + &c) * &(&(&u0 - &up) - &c);
    let t2 = t2_num.try_div(&(&(&u0 - &umm) + &twoc), "u_0 - u_{-2} + 2 shift")?;

    Ok(&prefactor * &(&t1 + &t2))
}

/// The non-symmetry flow `u + shift * index` along `dir` (the
/// integration-constant factor of the non-isospectral hierarchy).
pub fn scaling_flow(params: &QuadParams, dir: Direction, site: Site, get: &Access<'_>) -> Result<Scalar> {
    let u0 = get(site)?;
    let c = dir.gauge_shift(params).lift_like(&u0);
    let idx = Scalar::int_like(site_index(site, dir), &u0);
    Ok(&u0 + &(&c * &idx))
}

/// The master flow `index * first_flow` along `dir`.
pub fn master_flow(params: &QuadParams, dir: Direction, site: Site, get: &Access<'_>) -> Result<Scalar> {
    let v = first_flow(params, dir, site, get)?;
    let idx = Scalar::int_like(site_index(site, dir), &v);
    Ok(&idx * &v)
}

fn stencil_axis(dir: Direction, reach: i64) -> Vec<Site> {
    let (dn, dm) = dir_axis(dir);
    (-reach..=reach).map(|k| (k * dn, k * dm)).collect()
}

/// Builds the named entry for the given parameter set. The u-family
/// entries expect gauge parameters satisfying the constraint; the point
/// entries act in the x picture.
pub fn catalog_get(name: CatalogName, params: &QuadParams) -> CatalogEntry {
    let p = params.clone();
    let ch = |picture, stencil, eval: fn(&QuadParams, Site, &Access<'_>) -> Result<Scalar>| {
        Characteristic::new(name.as_str(), picture, stencil, p.clone(), eval)
    };
    // monomials adapt to the window kind, so the same entry serves exact
    // identity checks and float flows
    let point = |degree: usize| {
        Characteristic::new(
            name.as_str(),
            Picture::X,
            vec![(0, 0)],
            params.clone(),
            move |_: &QuadParams, site: Site, get: &Access<'_>| {
                let x = get(site)?;
                let mut acc = x.one_like();
                for _ in 0..degree {
                    acc = &acc * &x;
                }
                Ok(acc)
            },
        )
    };
    let (kind, characteristic) = match name {
        CatalogName::S1n => (
            EntryKind::Isospectral,
            ch(Picture::U, stencil_axis(Direction::N, 1), |p, s, g| {
                first_flow(p, Direction::N, s, g)
            }),
        ),
        CatalogName::S1m => (
            EntryKind::Isospectral,
            ch(Picture::U, stencil_axis(Direction::M, 1), |p, s, g| {
                first_flow(p, Direction::M, s, g)
            }),
        ),
        CatalogName::S2n => (
            EntryKind::Isospectral,
            ch(Picture::U, stencil_axis(Direction::N, 2), |p, s, g| {
                second_flow(p, Direction::N, s, g)
            }),
        ),
        CatalogName::S2m => (
            EntryKind::Isospectral,
            ch(Picture::U, stencil_axis(Direction::M, 2), |p, s, g| {
                second_flow(p, Direction::M, s, g)
            }),
        ),
        CatalogName::G0n => (
            EntryKind::NonIsospectralLocal,
            ch(Picture::U, vec![(0, 0)], |p, s, g| scaling_flow(p, Direction::N, s, g)),
        ),
        CatalogName::G0m => (
            EntryKind::NonIsospectralLocal,
            ch(Picture::U, vec![(0, 0)], |p, s, g| scaling_flow(p, Direction::M, s, g)),
        ),
        CatalogName::M1n => (
            EntryKind::Master,
            ch(Picture::U, stencil_axis(Direction::N, 1), |p, s, g| {
                master_flow(p, Direction::N, s, g)
            }),
        ),
        CatalogName::M1m => (
            EntryKind::Master,
            ch(Picture::U, stencil_axis(Direction::M, 1), |p, s, g| {
                master_flow(p, Direction::M, s, g)
            }),
        ),
        CatalogName::Mixed => (
            EntryKind::Mixed,
            ch(
                Picture::U,
                vec![(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)],
                |p, s, g| {
                    let a = master_flow(p, Direction::N, s, g)?;
                    let b = master_flow(p, Direction::M, s, g)?;
                    Ok(&a + &b)
                },
            ),
        ),
        CatalogName::X0 => (EntryKind::Point, point(0)),
        CatalogName::X1 => (EntryKind::Point, point(1)),
        CatalogName::X2 => (EntryKind::Point, point(2)),
    };
    CatalogEntry { name, kind, characteristic }
}

/// Conjugates a characteristic by the discrete `n <-> m` symmetry: the
/// stencil and site dependence transpose and the evaluator reads the
/// swapped parameter slots (`alpha1 <-> alpha2`, `alpha0 <-> beta0`).
/// Applying it twice restores the original behavior.
pub fn swap_characteristic(ch: &Characteristic) -> Characteristic {
    let inner = ch.clone();
    let stencil: Vec<Site> = ch.stencil.iter().map(|&(dn, dm)| (dm, dn)).collect();
    Characteristic::new(
        format!("swap({})", ch.name),
        ch.picture,
        stencil,
        ch.params().clone(),
        move |p: &QuadParams, site: Site, get: &Access<'_>| {
            let swapped = p.swapped();
            let transposed = |s: Site| get((s.1, s.0));
            inner.eval_with(&swapped, (site.1, site.0), &transposed)
        },
    )
}

/// The catalog image of an entry under the discrete symmetry, with the
/// conjugated evaluator and the partner name.
pub fn swap_nm(entry: &CatalogEntry) -> CatalogEntry {
    let mut characteristic = swap_characteristic(&entry.characteristic);
    characteristic.name = String::from(entry.name.swapped().as_str());
    CatalogEntry { name: entry.name.swapped(), kind: entry.kind, characteristic }
}

/// The Volterra-side field produced by the Miura map along `dir`:
/// `4 (u_{+1} - u_0 + c)^2 / ((u_{+2} - u_0 + 2c)(u_{+1} - u_{-1} + 2c))`.
pub fn miura_a_with(
    params: &QuadParams,
    dir: Direction,
    site: Site,
    get: &Access<'_>,
) -> Result<Scalar> {
    let (dn, dm) = dir_axis(dir);
    let at = |k: i64| get((site.0 + k * dn, site.1 + k * dm));
    let u0 = at(0)?;
    let up = at(1)?;
    let upp = at(2)?;
    let um = at(-1)?;
    let c = dir.gauge_shift(params).lift_like(&u0);
    let two = Scalar::int_like(2, &u0);
    let four = Scalar::int_like(4, &u0);
    let twoc = &two * &c;
    let edge = &(&up - &u0) + &c;
    let num = &four * &(&edge * &edge);
    let den = &(&(&upp - &u0) + &twoc) * &(&(&up - &um) + &twoc);
    num.try_div(&den, "miura denominator")
}

/// [`miura_a_with`] read off a u-picture window.
pub fn miura_a(
    params: &QuadParams,
    window: &LatticeWindow,
    n: i64,
    m: i64,
    dir: Direction,
) -> Result<Scalar> {
    debug_assert_eq!(window.picture(), Picture::U);
    miura_a_with(params, dir, (n, m), &window_access(window))
}

/// A one-dimensional Volterra field `a_k`, with `k = first_index + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct VolterraField {
    pub values: Vec<Scalar>,
    pub first_index: i64,
}

impl VolterraField {
    pub fn get(&self, k: i64) -> Result<&Scalar> {
        let i = k - self.first_index;
        if i < 0 || i as usize >= self.values.len() {
            return Err(Error::OutOfWindow { n: k, m: 0 });
        }
        Ok(&self.values[i as usize])
    }
}

/// Extracts the Miura image of one lattice line: for `dir = N` the line
/// `m = fixed` with `k = n`, and symmetrically for `dir = M`.
pub fn miura_field(
    params: &QuadParams,
    window: &LatticeWindow,
    dir: Direction,
    fixed: i64,
    k_lo: i64,
    k_hi: i64,
) -> Result<VolterraField> {
    let mut values = Vec::with_capacity((k_hi - k_lo + 1) as usize);
    for k in k_lo..=k_hi {
        let (n, m) = match dir {
            Direction::N => (k, fixed),
            Direction::M => (fixed, k),
        };
        values.push(miura_a(params, window, n, m, dir)?);
    }
    Ok(VolterraField { values, first_index: k_lo })
}

/// First Volterra flow: `a_k (a_{k+1} - a_{k-1})`.
pub fn volterra_rhs(a: &VolterraField, k: i64) -> Result<Scalar> {
    let a0 = a.get(k)?;
    let ap = a.get(k + 1)?;
    let am = a.get(k - 1)?;
    Ok(a0 * &(ap - am))
}

/// Second Volterra flow:
/// `a_k [a_{k-1}(a_{k-2} + a_{k-1} + a_k - 4) - a_{k+1}(a_{k+2} + a_{k+1} + a_k - 4)]`.
pub fn volterra2_rhs(a: &VolterraField, k: i64) -> Result<Scalar> {
    let a0 = a.get(k)?;
    let ap = a.get(k + 1)?;
    let app = a.get(k + 2)?;
    let am = a.get(k - 1)?;
    let amm = a.get(k - 2)?;
    let four = Scalar::int_like(4, a0);
    let left = am * &(&(&(amm + am) + a0) - &four);
    let right = ap * &(&(&(app + ap) + a0) - &four);
    Ok(a0 * &(&left - &right))
}

/// The local non-isospectral Volterra flow, with explicit site index:
/// `a_k [a_k - (n - 1) a_{k-1} + (n + 2) a_{k+1} - 4]`.
pub fn volterra_noniso_rhs(a: &VolterraField, k: i64, site_index: i64) -> Result<Scalar> {
    let a0 = a.get(k)?;
    let ap = a.get(k + 1)?;
    let am = a.get(k - 1)?;
    let four = Scalar::int_like(4, a0);
    let cm = Scalar::int_like(site_index - 1, a0);
    let cp = Scalar::int_like(site_index + 2, a0);
    Ok(a0 * &(&(&(a0 - &(&cm * am)) + &(&cp * ap)) - &four))
}

/// Intertwining residual of the Miura map: the derivative of the image
/// field along `flow` minus the first Volterra flow at the image, with
/// the image lattice in reversed orientation (the map sends the first
/// u-flow to the *reversed-clock* Volterra flow, so the residual here is
/// `d(a)/deps + a (a_next - a_prev)`). Zero exactly when the map
/// intertwines the flows; linear in `flow`.
pub fn miura_intertwine_residual(
    params: &QuadParams,
    window: &LatticeWindow,
    n: i64,
    m: i64,
    flow: &Characteristic,
    dir: Direction,
) -> Result<Scalar> {
    debug_assert_eq!(window.picture(), Picture::U);
    let base = window_access(window);
    // directional derivative: seed every site with its flow velocity
    let seeded = |s: Site| -> Result<Scalar> {
        let v = base(s)?;
        let d = flow.eval_with(params, s, &base)?;
        Ok(Scalar::dual(v, d))
    };
    let da = match miura_a_with(params, dir, (n, m), &seeded)? {
        Scalar::Dual(d) => d.derivative,
        other => other.zero_like(),
    };
    let (dn, dm) = dir_axis(dir);
    let a0 = miura_a_with(params, dir, (n, m), &base)?;
    let ap = miura_a_with(params, dir, (n + dn, m + dm), &base)?;
    let am = miura_a_with(params, dir, (n - dn, m - dm), &base)?;
    let volterra = &a0 * &(&ap - &am);
    Ok(&da + &volterra)
}

/// A pointwise proportionality fit `numerator = c * denominator`.
#[derive(Clone, Debug)]
pub struct ProportionalFit {
    pub constant: Scalar,
    /// Every numerator sample was exactly zero (the fit degenerates to
    /// `c = 0`).
    pub zero_numerator: bool,
    pub samples: usize,
}

fn scalars_essentially_equal(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Float(x), Scalar::Float(y)) => {
            let scale = x.abs().max(y.abs()).max(1.0);
            (x - y).abs() <= 1e-9 * scale
        }
        _ => a == b,
    }
}

/// Fits one constant through `(numerator, denominator)` pairs, exact in
/// the rational kind. `NotProportional` when the ratios differ or a
/// denominator vanishes under a nonzero numerator.
pub fn proportionality_fit(pairs: &[(Scalar, Scalar)]) -> Result<ProportionalFit> {
    assert!(!pairs.is_empty(), "fit needs samples");
    if pairs.iter().all(|(num, _)| num.is_zero()) {
        return Ok(ProportionalFit {
            constant: pairs[0].0.zero_like(),
            zero_numerator: true,
            samples: pairs.len(),
        });
    }
    let mut constant: Option<Scalar> = None;
    for (num, den) in pairs {
        if den.is_zero() {
            if num.is_zero() {
                continue; // uninformative sample
            }
            return Err(Error::NotProportional);
        }
        let ratio = num.try_div(den, "fit denominator")?;
        match &constant {
            None => constant = Some(ratio),
            Some(c) => {
                if !scalars_essentially_equal(c, &ratio) {
                    return Err(Error::NotProportional);
                }
            }
        }
    }
    Ok(ProportionalFit {
        constant: constant.ok_or(Error::NotProportional)?,
        zero_numerator: false,
        samples: pairs.len(),
    })
}

/// Fits the constant in `bracket(master, s_low) = c * s_high` over
/// unconstrained random windows (the relation is an identity of flows,
/// not an on-shell statement).
pub fn master_bracket_constant(
    params: &QuadParams,
    master: &Characteristic,
    s_low: &Characteristic,
    s_high: &Characteristic,
    rng: &mut impl RngCore,
    trials: usize,
) -> Result<ProportionalFit> {
    let br = bracket(master, s_low);
    let mut reach = br.reach();
    let hr = s_high.reach();
    reach = (reach.0.max(hr.0), reach.1.max(hr.1), reach.2.max(hr.2), reach.3.max(hr.3));
    let mut pairs = Vec::with_capacity(trials);
    let mut attempts = 0;
    while pairs.len() < trials {
        attempts += 1;
        if attempts > 8 * trials {
            return Err(Error::InconsistentFit);
        }
        let root_n = sampling::int_in(rng, -5, 5);
        let root_m = sampling::int_in(rng, -5, 5);
        let origin = (root_n - reach.0, root_m - reach.2);
        let nlen = (reach.0 + reach.1 + 1) as usize;
        let mlen = (reach.2 + reach.3 + 1) as usize;
        let w = sampling::free_window(Picture::U, origin, nlen, mlen, rng, 10, 6);
        let num = match br.eval_with(params, (root_n, root_m), &window_access(&w)) {
            Ok(v) => v,
            Err(Error::Pole { .. }) => continue,
            Err(e) => return Err(e),
        };
        let den = match s_high.eval_with(params, (root_n, root_m), &window_access(&w)) {
            Ok(v) => v,
            Err(Error::Pole { .. }) => continue,
            Err(e) => return Err(e),
        };
        pairs.push((num, den));
    }
    proportionality_fit(&pairs)
}

/// Outcome of the swap-based combiner.
#[derive(Clone, Debug)]
pub struct Theorem1Outcome {
    /// Fitted ratio `rho = residual(swapped) / residual(original)`; the
    /// combined characteristic is `original - (1 / rho) * swapped`.
    pub ratio: Scalar,
    pub combined: Characteristic,
    /// The combined characteristic re-verified to have exactly zero
    /// on-shell residual at fresh windows.
    pub verified_zero: bool,
    pub samples: usize,
}

/// Builds a symmetry out of a non-symmetry whose on-shell residual is a
/// constant multiple of a swap-invariant function: fits the residual
/// ratio against the swapped partner and returns the difference
/// combination. `ZeroResidual` when the input is already a symmetry.
pub fn combine_theorem1(
    params: &QuadParams,
    entry: &CatalogEntry,
    rng: &mut impl RngCore,
    trials: usize,
) -> Result<Theorem1Outcome> {
    let zn = &entry.characteristic;
    let zm = swap_characteristic(zn);
    let mut pairs = Vec::with_capacity(trials);
    let mut all_zero = true;
    let mut attempts = 0;
    while pairs.len() < trials {
        attempts += 1;
        if attempts > 8 * trials {
            return Err(Error::InconsistentFit);
        }
        let Some((w, root)) = sample_residual_window(params, zn, &zm, rng) else {
            continue;
        };
        let rn = match on_shell_residual(params, zn, &w, root) {
            Ok(v) => v,
            Err(Error::Pole { .. }) | Err(Error::SingularCorner { .. }) => continue,
            Err(e) => return Err(e),
        };
        let rm = match on_shell_residual(params, &zm, &w, root) {
            Ok(v) => v,
            Err(Error::Pole { .. }) | Err(Error::SingularCorner { .. }) => continue,
            Err(e) => return Err(e),
        };
        if !rn.is_zero() {
            all_zero = false;
        }
        pairs.push((rm, rn));
    }
    if all_zero {
        return Err(Error::ZeroResidual);
    }
    // rho = rm / rn, constant across samples
    let fit = proportionality_fit(&pairs).map_err(|e| match e {
        Error::NotProportional => Error::InconsistentFit,
        other => other,
    })?;
    if fit.zero_numerator || fit.constant.is_zero() {
        return Err(Error::InconsistentFit);
    }
    let inv = fit.constant.recip("fitted ratio")?;
    let combined =
        zn.linear_combination(zn.params().alpha1.one_like(), &zm, -&inv);

    let mut verified_zero = true;
    let mut verified = 0;
    let mut attempts = 0;
    while verified < 10 && attempts < 200 {
        attempts += 1;
        let Some((w, root)) = sample_residual_window(params, zn, &zm, rng) else {
            continue;
        };
        match on_shell_residual(params, &combined, &w, root) {
            Ok(r) => {
                if !r.is_zero() {
                    verified_zero = false;
                    break;
                }
                verified += 1;
            }
            Err(Error::Pole { .. }) | Err(Error::SingularCorner { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(Theorem1Outcome { ratio: fit.constant, combined, verified_zero, samples: pairs.len() })
}

/// On-shell window big enough for a plaquette residual of both
/// characteristics, with a randomized root so explicit site dependence
/// is exercised.
fn sample_residual_window(
    params: &QuadParams,
    a: &Characteristic,
    b: &Characteristic,
    rng: &mut impl RngCore,
) -> Option<(LatticeWindow, Site)> {
    let ra = a.reach();
    let rb = b.reach();
    let reach = (ra.0.max(rb.0), ra.1.max(rb.1), ra.2.max(rb.2), ra.3.max(rb.3));
    let root_n = sampling::int_in(rng, -4, 4);
    let root_m = sampling::int_in(rng, -4, 4);
    let origin = (root_n - reach.0, root_m - reach.2);
    let nlen = (reach.0 + reach.1 + 2) as usize;
    let mlen = (reach.2 + reach.3 + 2) as usize;
    sampling::evolved_u_window(params, origin, nlen, mlen, rng, 8, 6)
        .ok()
        .map(|w| (w, (root_n, root_m)))
}
