//! Number types the patch secular system is solved over.
//!
//! [`Jet`] is a truncated bivariate Taylor polynomial in a variation scale
//! `x` (degree ≤ 2) and the per-site phase `y` (degree ≤ 4), with complex
//! coefficients. Solving the patch system over jets yields exact Taylor
//! coefficients of the slow eigenvalue instead of finite-difference
//! estimates.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn from_complex(z: Complex64) -> Self;
    /// Value at the expansion point.
    fn constant_term(&self) -> Complex64;
    /// Largest coefficient magnitude.
    fn magnitude(&self) -> f64;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Scalar for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn from_complex(z: Complex64) -> Self {
        z
    }

    fn constant_term(&self) -> Complex64 {
        *self
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

pub const ETA_ORDER: usize = 2;
pub const PHASE_ORDER: usize = 4;

const NX: usize = ETA_ORDER + 1;
const NY: usize = PHASE_ORDER + 1;

#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    c: [[Complex64; NY]; NX],
}

impl Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.c.iter()).finish()
    }
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

impl Jet {
    pub fn constant(z: Complex64) -> Self {
        let mut c = [[ZERO; NY]; NX];
        c[0][0] = z;
        Self { c }
    }

    /// The variation scale `x`.
    pub fn eta_var() -> Self {
        let mut j = Self::constant(ZERO);
        j.c[1][0] = Complex64::new(1.0, 0.0);
        j
    }

    /// The per-site phase `y`.
    pub fn phase_var() -> Self {
        let mut j = Self::constant(ZERO);
        j.c[0][1] = Complex64::new(1.0, 0.0);
        j
    }

    /// `(cos(a·y), sin(a·y))` truncated at the phase order.
    pub fn cos_sin_phase(a: f64) -> (Self, Self) {
        let mut cos = Self::constant(ZERO);
        let mut sin = Self::constant(ZERO);
        let mut term = 1.0;
        for m in 0..NY {
            if m > 0 {
                term *= a / m as f64;
            }
            let v = match m % 4 {
                0 => term,
                1 => term,
                2 => -term,
                _ => -term,
            };
            if m % 2 == 0 {
                cos.c[0][m] = Complex64::new(v, 0.0);
            } else {
                sin.c[0][m] = Complex64::new(v, 0.0);
            }
        }
        (cos, sin)
    }

    /// Coefficient of `x^eta y^phase`.
    pub fn coeff(&self, eta: usize, phase: usize) -> Complex64 {
        self.c[eta][phase]
    }

    pub fn scale(mut self, a: Complex64) -> Self {
        for row in self.c.iter_mut() {
            for v in row.iter_mut() {
                *v *= a;
            }
        }
        self
    }

    fn recip(&self) -> Self {
        let a00 = self.c[0][0];
        let inv00 = 1.0 / a00;
        let mut b = [[ZERO; NY]; NX];
        for p in 0..NX {
            for m in 0..NY {
                let mut acc = if p == 0 && m == 0 { Complex64::new(1.0, 0.0) } else { ZERO };
                for i in 0..=p {
                    for j in 0..=m {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        acc -= self.c[i][j] * b[p - i][m - j];
                    }
                }
                b[p][m] = acc * inv00;
            }
        }
        Self { c: b }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for p in 0..NX {
            for m in 0..NY {
                self.c[p][m] += rhs.c[p][m];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for p in 0..NX {
            for m in 0..NY {
                self.c[p][m] -= rhs.c[p][m];
            }
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [[ZERO; NY]; NX];
        for i in 0..NX {
            for j in 0..NY {
                let a = self.c[i][j];
                if a == ZERO {
                    continue;
                }
                for p in 0..NX - i {
                    for m in 0..NY - j {
                        out[i + p][j + m] += a * rhs.c[p][m];
                    }
                }
            }
        }
        Jet { c: out }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Scalar for Jet {
    fn from_f64(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    fn from_complex(z: Complex64) -> Self {
        Self::constant(z)
    }

    fn constant_term(&self) -> Complex64 {
        self.c[0][0]
    }

    fn magnitude(&self) -> f64 {
        self.c.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
    }
}
