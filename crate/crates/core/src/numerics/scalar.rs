//! The scalar tower: exact rationals for identity proofs, `f64` for
//! flows, and dual numbers for exact partial derivatives.
//!
//! Mixed-kind arithmetic is a programming error and panics; it is never
//! silently coerced. An identity claimed "exact" must never have touched
//! a float, so the only way from one base kind to another is an explicit
//! cast at a construction boundary (`QuadParams::to_float`,
//! `LatticeWindow::to_float`).
//!
//! Dual payloads are themselves scalars, so duals nest: seeding a value
//! that is already dual yields second-order sensitivities. The bracket of
//! two bracket characteristics relies on this.

use alloc::boxed::Box;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;
use crate::numerics::rational::Rational;

/// A first-order sensitivity: value plus derivative, both of the same
/// underlying kind. All arithmetic follows the chain rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual {
    pub value: Scalar,
    pub derivative: Scalar,
}

/// Tagged scalar value. The tag is the *kind*; operations require both
/// operands to carry the same kind, recursively through dual payloads.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Rational(Rational),
    Float(f64),
    Dual(Box<Dual>),
}

/// The base of the tower under any number of dual wrappers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseKind {
    Rational,
    Float,
}

impl Scalar {
    pub fn rational(n: i64, d: i64) -> Scalar {
        Scalar::Rational(Rational::new(n, d).expect("nonzero denominator"))
    }

    pub fn from_int(v: i64) -> Scalar {
        Scalar::Rational(Rational::from_int(v))
    }

    pub fn dual(value: Scalar, derivative: Scalar) -> Scalar {
        Scalar::Dual(Box::new(Dual { value, derivative }))
    }

    pub fn base_kind(&self) -> BaseKind {
        match self {
            Scalar::Rational(_) => BaseKind::Rational,
            Scalar::Float(_) => BaseKind::Float,
            Scalar::Dual(d) => d.value.base_kind(),
        }
    }

    /// Number of dual wrappers around the base value.
    pub fn dual_depth(&self) -> usize {
        match self {
            Scalar::Dual(d) => 1 + d.value.dual_depth(),
            _ => 0,
        }
    }

    /// Structural zero test: a dual is zero when value and derivative
    /// both are.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Float(v) => *v == 0.0,
            Scalar::Dual(d) => d.value.is_zero() && d.derivative.is_zero(),
        }
    }

    /// Zero of the same kind as `self`.
    pub fn zero_like(&self) -> Scalar {
        match self {
            Scalar::Rational(_) => Scalar::Rational(Rational::zero()),
            Scalar::Float(_) => Scalar::Float(0.0),
            Scalar::Dual(d) => Scalar::dual(d.value.zero_like(), d.value.zero_like()),
        }
    }

    /// One of the same kind as `self` (a constant: derivative parts are
    /// zero).
    pub fn one_like(&self) -> Scalar {
        match self {
            Scalar::Rational(_) => Scalar::Rational(Rational::one()),
            Scalar::Float(_) => Scalar::Float(1.0),
            Scalar::Dual(d) => Scalar::dual(d.value.one_like(), d.value.zero_like()),
        }
    }

    /// The integer `v` as a constant of the same kind as `like`.
    pub fn int_like(v: i64, like: &Scalar) -> Scalar {
        match like {
            Scalar::Rational(_) => Scalar::from_int(v),
            Scalar::Float(_) => Scalar::Float(v as f64),
            Scalar::Dual(d) => Scalar::dual(Scalar::int_like(v, &d.value), d.value.zero_like()),
        }
    }

    /// Lift `self` (a base-kind value) to the kind of `like` by wrapping
    /// it in constant duals. Panics when the base kinds differ: that is
    /// a cross-kind coercion, which is forbidden.
    pub fn lift_like(&self, like: &Scalar) -> Scalar {
        match like {
            Scalar::Dual(d) => {
                Scalar::dual(self.lift_like(&d.value), d.value.zero_like())
            }
            _ => {
                assert_eq!(
                    self.base_kind(),
                    like.base_kind(),
                    "cross-kind lift: {:?} into {:?} context",
                    self.base_kind(),
                    like.base_kind()
                );
                assert_eq!(self.dual_depth(), 0, "lift_like expects a base-kind value");
                self.clone()
            }
        }
    }

    /// Exact division; `Pole { what }` when the denominator vanishes.
    pub fn try_div(&self, rhs: &Scalar, what: &'static str) -> Result<Scalar, Error> {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => {
                Ok(Scalar::Rational(a.try_div(b, what)?))
            }
            (Scalar::Float(a), Scalar::Float(b)) => {
                if *b == 0.0 {
                    Err(Error::Pole { what })
                } else {
                    Ok(Scalar::Float(a / b))
                }
            }
            (Scalar::Dual(a), Scalar::Dual(b)) => {
                // (a/b)' = (a' - (a/b) b') / b
                let v = a.value.try_div(&b.value, what)?;
                let d = (&a.derivative - &(&v * &b.derivative)).try_div(&b.value, what)?;
                Ok(Scalar::dual(v, d))
            }
            _ => mixed_kind_panic("div", self, rhs),
        }
    }

    pub fn recip(&self, what: &'static str) -> Result<Scalar, Error> {
        self.one_like().try_div(self, what)
    }

    /// Exponential. Exact only at zero for the rational kind; any other
    /// rational input is a kind error because the result would not be
    /// rational.
    pub fn exp(&self) -> Result<Scalar, Error> {
        match self {
            Scalar::Rational(r) => {
                if r.is_zero() {
                    Ok(Scalar::Rational(Rational::one()))
                } else {
                    Err(Error::KindMismatch {
                        expected: "float argument for exp (rational exp is exact only at 0)",
                    })
                }
            }
            Scalar::Float(v) => Ok(Scalar::Float(num_traits::Float::exp(*v))),
            Scalar::Dual(d) => {
                let v = d.value.exp()?;
                let dd = &v * &d.derivative;
                Ok(Scalar::dual(v, dd))
            }
        }
    }

    /// The underlying float of a float-kind scalar.
    pub fn as_float(&self) -> Result<f64, Error> {
        match self {
            Scalar::Float(v) => Ok(*v),
            _ => Err(Error::KindMismatch { expected: "float" }),
        }
    }

    pub fn as_rational(&self) -> Result<&Rational, Error> {
        match self {
            Scalar::Rational(r) => Ok(r),
            _ => Err(Error::KindMismatch { expected: "rational" }),
        }
    }

    /// Explicit cast to the float kind (the one sanctioned crossing of
    /// the rational/float boundary).
    pub fn to_float(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Float(r.to_f64()),
            Scalar::Float(v) => Scalar::Float(*v),
            Scalar::Dual(d) => Scalar::dual(d.value.to_float(), d.derivative.to_float()),
        }
    }

    /// Magnitude of the primal value, for float-kind measurements.
    pub fn primal_abs(&self) -> Result<f64, Error> {
        match self {
            Scalar::Float(v) => Ok(v.abs()),
            Scalar::Dual(d) => d.value.primal_abs(),
            Scalar::Rational(r) => Ok(r.abs().to_f64()),
        }
    }
}

fn mixed_kind_panic(op: &str, a: &Scalar, b: &Scalar) -> ! {
    panic!(
        "mixed scalar kinds in {op}: {:?} (depth {}) vs {:?} (depth {})",
        a.base_kind(),
        a.dual_depth(),
        b.base_kind(),
        b.dual_depth()
    )
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a + b),
            (Scalar::Dual(a), Scalar::Dual(b)) => {
                Scalar::dual(&a.value + &b.value, &a.derivative + &b.derivative)
            }
            _ => mixed_kind_panic("add", self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a - b),
            (Scalar::Dual(a), Scalar::Dual(b)) => {
                Scalar::dual(&a.value - &b.value, &a.derivative - &b.derivative)
            }
            _ => mixed_kind_panic("sub", self, rhs),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a * b),
            (Scalar::Dual(a), Scalar::Dual(b)) => Scalar::dual(
                &a.value * &b.value,
                &(&a.derivative * &b.value) + &(&a.value * &b.derivative),
            ),
            _ => mixed_kind_panic("mul", self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Float(a) => Scalar::Float(-a),
            Scalar::Dual(a) => Scalar::dual(-&a.value, -&a.derivative),
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Float(v) => write!(f, "{v}"),
            Scalar::Dual(d) => write!(f, "dual({}, {})", d.value, d.derivative),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Derivative of a one-slot function at `at`, computed with a dual seed.
/// Exact for rational inputs through rational dual components.
pub fn dual_partial<F>(f: F, at: &Scalar) -> Result<Scalar, Error>
where
    F: FnOnce(&Scalar) -> Result<Scalar, Error>,
{
    let seed = Scalar::dual(at.clone(), at.one_like());
    match f(&seed)? {
        Scalar::Dual(d) => Ok(d.derivative),
        // The function never touched its argument: a constant.
        _ => Ok(at.zero_like()),
    }
}
