//! Decidable multiplicative eigenvalue groups and the trace-orbit indexing of
//! skyscraper generators.
//!
//! Three backends: exact nonzero rationals, roots of unity, and formal
//! (generic) eigenvalues. The only question the rest of the engine ever asks
//! is whether a product of eigenvalues equals +1 or -1, which all three
//! backends answer exactly. A skyscraper generator T_t is indexed by the
//! unordered orbit {lambda, lambda^-1} with t = lambda + lambda^-1.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum EigenError {
    #[error("eigenvalue must be nonzero")]
    ZeroEigenvalue,
    #[error("root-of-unity order must be >= 1")]
    BadOrder,
    #[error("symbolic generator index {index} outside declared count {count}")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("eigenvalue backends do not match")]
    BackendMismatch,
    #[error("{0} is not a valid trace orbit (eigenvalue is {0})")]
    NotAnOrbit(String),
    #[error("cannot parse eigenvalue syntax {0:?}")]
    ParseError(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitClass {
    IsOne,
    IsMinusOne,
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EigenClass {
    Rational(BigRational),
    /// zeta_order ^ exp with gcd(exp, order) = 1; the value 1 is (1, 0).
    RootOfUnity {
        order: u64,
        exp: u64,
    },
    /// sign * x_1^{e_1} ... x_m^{e_m} over formal generators.
    Symbolic {
        negative: bool,
        exps: Vec<i64>,
    },
}

impl EigenClass {
    pub fn rational(v: BigRational) -> Result<Self, EigenError> {
        if v.is_zero() {
            return Err(EigenError::ZeroEigenvalue);
        }
        Ok(EigenClass::Rational(v))
    }

    pub fn rational_int(n: i64, d: i64) -> Result<Self, EigenError> {
        if d == 0 {
            return Err(EigenError::ZeroEigenvalue);
        }
        Self::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn root_of_unity(order: u64, exp: u64) -> Result<Self, EigenError> {
        if order == 0 {
            return Err(EigenError::BadOrder);
        }
        let exp = exp % order;
        if exp == 0 {
            return Ok(EigenClass::RootOfUnity { order: 1, exp: 0 });
        }
        let g = exp.gcd(&order);
        Ok(EigenClass::RootOfUnity {
            order: order / g,
            exp: exp / g,
        })
    }

    pub fn symbolic_generator(index: usize, count: usize) -> Result<Self, EigenError> {
        if index >= count {
            return Err(EigenError::GeneratorOutOfRange { index, count });
        }
        let mut exps = vec![0i64; count];
        exps[index] = 1;
        Ok(EigenClass::Symbolic {
            negative: false,
            exps,
        })
    }

    fn backend_rank(&self) -> u8 {
        match self {
            EigenClass::Rational(_) => 0,
            EigenClass::RootOfUnity { .. } => 1,
            EigenClass::Symbolic { .. } => 2,
        }
    }

    pub fn same_backend(&self, other: &EigenClass) -> bool {
        match (self, other) {
            (EigenClass::Symbolic { exps: a, .. }, EigenClass::Symbolic { exps: b, .. }) => {
                a.len() == b.len()
            }
            _ => self.backend_rank() == other.backend_rank(),
        }
    }

    pub fn mul(&self, other: &EigenClass) -> Result<EigenClass, EigenError> {
        if !self.same_backend(other) {
            return Err(EigenError::BackendMismatch);
        }
        Ok(match (self, other) {
            (EigenClass::Rational(a), EigenClass::Rational(b)) => EigenClass::Rational(a * b),
            (
                EigenClass::RootOfUnity { order: n1, exp: k1 },
                EigenClass::RootOfUnity { order: n2, exp: k2 },
            ) => {
                let n = n1.lcm(n2);
                let k = (k1 * (n / n1) + k2 * (n / n2)) % n;
                EigenClass::root_of_unity(n, k)?
            }
            (
                EigenClass::Symbolic {
                    negative: s1,
                    exps: e1,
                },
                EigenClass::Symbolic {
                    negative: s2,
                    exps: e2,
                },
            ) => EigenClass::Symbolic {
                negative: s1 ^ s2,
                exps: e1.iter().zip(e2).map(|(a, b)| a + b).collect(),
            },
            _ => unreachable!(),
        })
    }

    pub fn inv(&self) -> EigenClass {
        match self {
            EigenClass::Rational(a) => EigenClass::Rational(a.recip()),
            EigenClass::RootOfUnity { order, exp } => {
                if *exp == 0 {
                    self.clone()
                } else {
                    EigenClass::RootOfUnity {
                        order: *order,
                        exp: order - exp,
                    }
                }
            }
            EigenClass::Symbolic { negative, exps } => EigenClass::Symbolic {
                negative: *negative,
                exps: exps.iter().map(|e| -e).collect(),
            },
        }
    }

    /// Multiplication by -1. For roots of unity of odd order n, the result
    /// lives at order 2n; every backend represents it.
    pub fn neg(&self) -> EigenClass {
        match self {
            EigenClass::Rational(a) => EigenClass::Rational(-a),
            EigenClass::RootOfUnity { .. } => {
                let minus_one = EigenClass::RootOfUnity { order: 2, exp: 1 };
                self.mul(&minus_one).expect("same backend")
            }
            EigenClass::Symbolic { negative, exps } => EigenClass::Symbolic {
                negative: !negative,
                exps: exps.clone(),
            },
        }
    }

    pub fn classify_unit(&self) -> UnitClass {
        match self {
            EigenClass::Rational(a) => {
                if a.is_one() {
                    UnitClass::IsOne
                } else if (-a).is_one() {
                    UnitClass::IsMinusOne
                } else {
                    UnitClass::Generic
                }
            }
            EigenClass::RootOfUnity { order, exp } => match (order, exp) {
                (1, _) => UnitClass::IsOne,
                (2, _) => UnitClass::IsMinusOne,
                _ => UnitClass::Generic,
            },
            EigenClass::Symbolic { negative, exps } => {
                if exps.iter().any(|e| *e != 0) {
                    UnitClass::Generic
                } else if *negative {
                    UnitClass::IsMinusOne
                } else {
                    UnitClass::IsOne
                }
            }
        }
    }

    /// A fixed total order on each backend, used to pick orbit
    /// representatives and to sort skyscraper keys deterministically.
    pub fn sort_key_cmp(&self, other: &EigenClass) -> Ordering {
        match (self, other) {
            (EigenClass::Rational(a), EigenClass::Rational(b)) => a
                .numer()
                .cmp(b.numer())
                .then_with(|| a.denom().cmp(b.denom())),
            (
                EigenClass::RootOfUnity { order: n1, exp: k1 },
                EigenClass::RootOfUnity { order: n2, exp: k2 },
            ) => n1.cmp(n2).then(k1.cmp(k2)),
            (
                EigenClass::Symbolic {
                    negative: s1,
                    exps: e1,
                },
                EigenClass::Symbolic {
                    negative: s2,
                    exps: e2,
                },
            ) => s1.cmp(s2).then_with(|| e1.cmp(e2)),
            _ => self.backend_rank().cmp(&other.backend_rank()),
        }
    }

    pub fn parse(s: &str) -> Result<EigenClass, EigenError> {
        let err = || EigenError::ParseError(s.to_string());
        if let Some(body) = s.strip_prefix("rat:") {
            let (n, d) = match body.split_once('/') {
                Some((n, d)) => (n, d),
                None => (body, "1"),
            };
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() || n.is_zero() {
                return Err(EigenError::ZeroEigenvalue);
            }
            EigenClass::rational(BigRational::new(n, d))
        } else if let Some(body) = s.strip_prefix("zeta:") {
            let (n, k) = body.split_once(':').ok_or_else(err)?;
            let n: u64 = n.trim().parse().map_err(|_| err())?;
            let k: u64 = k.trim().parse().map_err(|_| err())?;
            EigenClass::root_of_unity(n, k)
        } else if let Some(body) = s.strip_prefix("sym:") {
            parse_symbolic(body).ok_or_else(err)
        } else {
            Err(err())
        }
    }

    /// Parse a list, padding symbolic exponent vectors to a common length so
    /// they share one backend.
    pub fn parse_list(items: &[String]) -> Result<Vec<EigenClass>, EigenError> {
        let mut parsed: Vec<EigenClass> = items
            .iter()
            .map(|s| EigenClass::parse(s))
            .collect::<Result<_, _>>()?;
        let width = parsed
            .iter()
            .filter_map(|e| match e {
                EigenClass::Symbolic { exps, .. } => Some(exps.len()),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        for e in &mut parsed {
            if let EigenClass::Symbolic { exps, .. } = e {
                exps.resize(width, 0);
            }
        }
        Ok(parsed)
    }
}

fn parse_symbolic(body: &str) -> Option<EigenClass> {
    let (negative, rest) = match body.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, body),
    };
    let mut pairs: Vec<(usize, i64)> = Vec::new();
    if rest != "1" {
        for factor in rest.split('*') {
            let (var, exp) = match factor.split_once('^') {
                Some((v, e)) => (v, e.parse::<i64>().ok()?),
                None => (factor, 1),
            };
            let idx: usize = var.strip_prefix('x')?.parse().ok()?;
            if idx == 0 {
                return None;
            }
            pairs.push((idx - 1, exp));
        }
    }
    let width = pairs.iter().map(|(i, _)| i + 1).max().unwrap_or(0);
    let mut exps = vec![0i64; width];
    for (i, e) in pairs {
        exps[i] += e;
    }
    Some(EigenClass::Symbolic { negative, exps })
}

impl fmt::Display for EigenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenClass::Rational(a) => {
                if a.denom().is_one() {
                    write!(f, "rat:{}", a.numer())
                } else {
                    write!(f, "rat:{}/{}", a.numer(), a.denom())
                }
            }
            EigenClass::RootOfUnity { order, exp } => write!(f, "zeta:{order}:{exp}"),
            EigenClass::Symbolic { negative, exps } => {
                write!(f, "sym:")?;
                if *negative {
                    write!(f, "-")?;
                }
                let mut any = false;
                for (i, e) in exps.iter().enumerate() {
                    if *e == 0 {
                        continue;
                    }
                    if any {
                        write!(f, "*")?;
                    }
                    any = true;
                    if *e == 1 {
                        write!(f, "x{}", i + 1)?;
                    } else {
                        write!(f, "x{}^{}", i + 1, e)?;
                    }
                }
                if !any {
                    write!(f, "1")?;
                }
                Ok(())
            }
        }
    }
}

/// Canonical representative of the unordered pair {lambda, lambda^-1},
/// lambda != +-1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceOrbit(EigenClass);

impl TraceOrbit {
    pub fn of(a: &EigenClass) -> Result<TraceOrbit, EigenError> {
        if a.classify_unit() != UnitClass::Generic {
            return Err(EigenError::NotAnOrbit(a.to_string()));
        }
        let inv = a.inv();
        let rep = if a.sort_key_cmp(&inv) == Ordering::Greater {
            inv
        } else {
            a.clone()
        };
        Ok(TraceOrbit(rep))
    }

    pub fn representative(&self) -> &EigenClass {
        &self.0
    }

    /// Orbit of -lambda; always defined, since -lambda = +-1 would force
    /// lambda = +-1.
    pub fn negate(&self) -> TraceOrbit {
        TraceOrbit::of(&self.0.neg()).expect("negation of a generic eigenvalue is generic")
    }

    pub fn same_backend(&self, other: &TraceOrbit) -> bool {
        self.0.same_backend(&other.0)
    }
}

impl PartialOrd for TraceOrbit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TraceOrbit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.sort_key_cmp(&other.0)
    }
}

impl fmt::Display for TraceOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn orbit_of(a: &EigenClass) -> Result<TraceOrbit, EigenError> {
    TraceOrbit::of(a)
}
