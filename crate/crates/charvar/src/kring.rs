//! Exact arithmetic in Z[q] localized at the multiplicative set generated by
//! q, q+1 and q-1.
//!
//! Every value is kept in a canonical form: the numerator polynomial carries
//! arbitrary-precision integer coefficients, and whenever a denominator
//! exponent is positive the numerator is not divisible by the corresponding
//! factor. This makes equality plain structural comparison.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum KringError {
    #[error("divisor is neither a unit of the localized ring nor an exact divisor")]
    NotAUnit,
    #[error("evaluation point {0} is a pole of the denominator")]
    PoleAtX(String),
}

/// Dense integer polynomial in q. Index = exponent; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Poly::from_coeffs(vec![c.into()])
    }

    pub fn one() -> Self {
        Poly::constant(1)
    }

    pub fn q() -> Self {
        Poly::monomial(1, 1)
    }

    pub fn monomial(exp: usize, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); exp + 1];
        coeffs[exp] = c;
        Poly { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    /// Low-to-high coefficient slice.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from(c.clone());
        }
        acc
    }

    /// Exact division; `None` when the division leaves a remainder or a
    /// non-integral coefficient.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let dn = divisor.coeffs.len();
        if self.coeffs.len() < dn {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let lead = &divisor.coeffs[dn - 1];
        let qn = rem.len() - dn + 1;
        let mut quot = vec![BigInt::zero(); qn];
        for i in (0..qn).rev() {
            let top = std::mem::take(&mut rem[i + dn - 1]);
            if top.is_zero() {
                continue;
            }
            if (&top % lead) != BigInt::zero() {
                return None;
            }
            let qc = &top / lead;
            for (j, d) in divisor.coeffs.iter().enumerate().take(dn - 1) {
                rem[i + j] -= &qc * d;
            }
            quot[i] = qc;
        }
        if rem.iter().take(dn - 1).all(|c| c.is_zero()) {
            Some(Poly::from_coeffs(quot))
        } else {
            None
        }
    }
}

fn factor_poly(idx: usize) -> Poly {
    match idx {
        0 => Poly::q(),
        1 => Poly::from_coeffs(vec![BigInt::one(), BigInt::one()]),
        2 => Poly::from_coeffs(vec![-BigInt::one(), BigInt::one()]),
        _ => unreachable!(),
    }
}

/// Element of Z[q] localized at {q, q+1, q-1}: `num / q^d0 (q+1)^d1 (q-1)^d2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LocalizedClass {
    num: Poly,
    den: [u32; 3],
}

impl LocalizedClass {
    pub fn zero() -> Self {
        LocalizedClass {
            num: Poly::zero(),
            den: [0; 3],
        }
    }

    pub fn one() -> Self {
        LocalizedClass::from_poly(Poly::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        LocalizedClass::from_poly(Poly::constant(n))
    }

    pub fn from_poly(num: Poly) -> Self {
        LocalizedClass::new(num, [0; 3])
    }

    pub fn q() -> Self {
        LocalizedClass::from_poly(Poly::q())
    }

    pub fn q_pow(k: usize) -> Self {
        LocalizedClass::from_poly(Poly::monomial(k, 1))
    }

    /// Canonicalizing constructor.
    pub fn new(num: Poly, den: [u32; 3]) -> Self {
        let mut v = LocalizedClass { num, den };
        v.canonicalize();
        v
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = [0; 3];
            return;
        }
        for i in 0..3 {
            let f = factor_poly(i);
            while self.den[i] > 0 {
                match self.num.div_exact(&f) {
                    Some(p) => {
                        self.num = p;
                        self.den[i] -= 1;
                    }
                    None => break,
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den == [0; 3]
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_exponents(&self) -> [u32; 3] {
        self.den
    }

    /// Numerator of the value as a polynomial, when the denominator is trivial.
    pub fn as_polynomial(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn add(&self, other: &LocalizedClass) -> LocalizedClass {
        let den = [
            self.den[0].max(other.den[0]),
            self.den[1].max(other.den[1]),
            self.den[2].max(other.den[2]),
        ];
        let lift = |v: &LocalizedClass| {
            let mut p = v.num.clone();
            for (i, &d) in den.iter().enumerate() {
                p = p.mul(&factor_poly(i).pow(d - v.den[i]));
            }
            p
        };
        LocalizedClass::new(lift(self).add(&lift(other)), den)
    }

    pub fn neg(&self) -> LocalizedClass {
        LocalizedClass {
            num: self.num.neg(),
            den: self.den,
        }
    }

    pub fn sub(&self, other: &LocalizedClass) -> LocalizedClass {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LocalizedClass) -> LocalizedClass {
        LocalizedClass::new(
            self.num.mul(&other.num),
            [
                self.den[0] + other.den[0],
                self.den[1] + other.den[1],
                self.den[2] + other.den[2],
            ],
        )
    }

    pub fn scale_int(&self, c: impl Into<BigInt>) -> LocalizedClass {
        LocalizedClass::new(self.num.scale(&c.into()), self.den)
    }

    pub fn pow(&self, n: u32) -> LocalizedClass {
        let mut acc = LocalizedClass::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact division. Succeeds when `other` is a unit of the localized ring
    /// (up to sign, a product of powers of q, q+1, q-1) or when polynomial
    /// division of the numerators is exact.
    pub fn divide_exact(&self, other: &LocalizedClass) -> Result<LocalizedClass, KringError> {
        if other.is_zero() {
            return Err(KringError::NotAUnit);
        }
        if self.is_zero() {
            return Ok(LocalizedClass::zero());
        }
        // Peel unit factors off the divisor numerator.
        let mut rest = other.num.clone();
        let mut unit = [0u32; 3];
        for (i, u) in unit.iter_mut().enumerate() {
            let f = factor_poly(i);
            while let Some(p) = rest.div_exact(&f) {
                rest = p;
                *u += 1;
            }
        }
        let mut num = self.num.clone();
        for i in 0..3 {
            num = num.mul(&factor_poly(i).pow(other.den[i]));
        }
        let num = num.div_exact(&rest).ok_or(KringError::NotAUnit)?;
        Ok(LocalizedClass::new(
            num,
            [
                self.den[0] + unit[0],
                self.den[1] + unit[1],
                self.den[2] + unit[2],
            ],
        ))
    }

    pub fn evaluate_at(&self, x: &BigRational) -> Result<BigRational, KringError> {
        let one = BigRational::one();
        let pole = |bad: bool| {
            if bad {
                Err(KringError::PoleAtX(x.to_string()))
            } else {
                Ok(())
            }
        };
        pole(self.den[0] > 0 && x.is_zero())?;
        pole(self.den[1] > 0 && *x == -one.clone())?;
        pole(self.den[2] > 0 && *x == one)?;
        let mut val = self.num.eval(x);
        for (i, factor) in [x.clone(), x + BigRational::one(), x - BigRational::one()]
            .iter()
            .enumerate()
        {
            for _ in 0..self.den[i] {
                val /= factor;
            }
        }
        Ok(val)
    }

    pub fn evaluate_at_int(&self, x: i64) -> Result<BigRational, KringError> {
        self.evaluate_at(&BigRational::from(BigInt::from(x)))
    }
}

// --- common fixed classes -------------------------------------------------

impl LocalizedClass {
    /// q^3 - q = q(q+1)(q-1), the class of SL(2,C) up to the PGL factor.
    pub fn q3_minus_q() -> Self {
        LocalizedClass::from_poly(Poly::from_coeffs(vec![
            BigInt::zero(),
            -BigInt::one(),
            BigInt::zero(),
            BigInt::one(),
        ]))
    }

    /// 1 / (q^3 - q)^n.
    pub fn inv_q3_minus_q(n: u32) -> Self {
        LocalizedClass::new(Poly::one(), [n, n, n])
    }

    /// q + 1.
    pub fn q_plus_1() -> Self {
        LocalizedClass::from_poly(Poly::from_coeffs(vec![BigInt::one(), BigInt::one()]))
    }

    /// q - 1.
    pub fn q_minus_1() -> Self {
        LocalizedClass::from_poly(Poly::from_coeffs(vec![-BigInt::one(), BigInt::one()]))
    }

    /// q^2 + q = [S_t], the class of a regular semisimple conjugacy class.
    pub fn q2_plus_q() -> Self {
        LocalizedClass::from_poly(Poly::from_coeffs(vec![
            BigInt::zero(),
            BigInt::one(),
            BigInt::one(),
        ]))
    }
}

// --- display --------------------------------------------------------------

fn fmt_poly(p: &Poly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (exp, c) in p.coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
        } else if c.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let show_coeff = !mag.is_one() || exp == 0;
        if show_coeff {
            write!(f, "{mag}")?;
        }
        match exp {
            0 => {}
            1 => write!(f, "q")?,
            _ => write!(f, "q^{exp}")?,
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(self, f)
    }
}

impl fmt::Display for LocalizedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == [0; 3] {
            return fmt_poly(&self.num, f);
        }
        let multi_term = self.num.coeffs.iter().filter(|c| !c.is_zero()).count() > 1;
        if multi_term {
            write!(f, "(")?;
            fmt_poly(&self.num, f)?;
            write!(f, ")")?;
        } else {
            fmt_poly(&self.num, f)?;
        }
        write!(f, "/")?;
        let names = ["q", "(q+1)", "(q-1)"];
        let factors: Vec<_> = (0..3).filter(|&i| self.den[i] > 0).collect();
        let wrap = factors.len() > 1
            || (factors.len() == 1 && self.den[factors[0]] == 1 && factors[0] == 0);
        let _ = wrap;
        for &i in &factors {
            match self.den[i] {
                1 => write!(f, "{}", names[i])?,
                e => write!(f, "{}^{}", names[i], e)?,
            }
        }
        Ok(())
    }
}

// --- serde ----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ClassRepr {
    num: Vec<(usize, String)>,
    den: [u32; 3],
}

impl Serialize for LocalizedClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let num = self
            .num
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, c.to_string()))
            .collect();
        ClassRepr { num, den: self.den }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocalizedClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ClassRepr::deserialize(d)?;
        let mut p = Poly::zero();
        for (exp, coeff) in repr.num {
            let c: BigInt = coeff
                .parse()
                .map_err(|_| D::Error::custom(format!("bad coefficient {coeff:?}")))?;
            p = p.add(&Poly::monomial(exp, c));
        }
        Ok(LocalizedClass::new(p, repr.den))
    }
}
