//! The TQFT endomorphisms of the module: the reduction morphism eta and its
//! inverse, the three tube operators (semisimple, Jordan, handle), and the
//! assembly of a parabolic surface into the virtual class of its
//! representation variety.
//!
//! The semisimple tube is fully explicit. The handle and Jordan core
//! matrices are not hardcoded; they are fitted from finite-field counts (see
//! the `interpolate` module) and injected through [`OperatorData`]. Only
//! their skyscraper rewrite rules are explicit here.

use std::fmt;
use std::path::Path;

use crate::eigen::{EigenClass, EigenError, TraceOrbit, UnitClass};
use crate::kring::{KringError, LocalizedClass, Poly};
use crate::wmodule::{CoreGen, ModuleElement, CORE_GENS};

#[derive(Debug, thiserror::Error)]
pub enum OperatorError {
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Kring(#[from] KringError),
    #[error("no fitted operator data available: {0}")]
    MissingOperatorData(String),
    #[error("twisted case sigma = -1 with no semisimple puncture is out of scope")]
    OutOfScopeTwisted,
    #[error("assembled class is not a polynomial: {0} (implementation bug)")]
    NotPolynomial(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TubeKind {
    Handle,
    JordanPlus,
    JordanMinus,
    Semisimple(TraceOrbit),
}

/// Parabolic surface: genus plus puncture data. Jordan punctures are counted
/// per sign; semisimple punctures are given by their eigenvalues.
#[derive(Debug, Clone, Default)]
pub struct SurfaceSpec {
    pub genus: u32,
    pub r_plus: u32,
    pub r_minus: u32,
    pub minus_id: u32,
    pub semisimple: Vec<EigenClass>,
}

impl SurfaceSpec {
    pub fn s(&self) -> usize {
        self.semisimple.len()
    }

    /// +1 or -1 according to the parity of r_- plus the number of -Id
    /// punctures.
    pub fn sigma(&self) -> i32 {
        if (self.r_minus + self.minus_id).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        for (i, e) in self.semisimple.iter().enumerate() {
            if e.classify_unit() != UnitClass::Generic {
                return Err(OperatorError::InvalidSurface(format!(
                    "semisimple eigenvalue #{} is {} (+-1 is not a regular class)",
                    i + 1,
                    e
                )));
            }
            if i > 0 && !e.same_backend(&self.semisimple[0]) {
                return Err(OperatorError::InvalidSurface(
                    "semisimple eigenvalues mix backends".into(),
                ));
            }
        }
        Ok(())
    }
}

fn lc(coeffs: &[i64]) -> LocalizedClass {
    LocalizedClass::from_poly(Poly::from_coeffs(
        coeffs.iter().map(|&c| c.into()).collect(),
    ))
}

// --- eta ------------------------------------------------------------------

/// eta = tr_! tr^*: diagonal 1 on T_{+-2}, (q^2-1) on T_{+-}, the block
/// [[q^2, q], [q, q^2]] on (TTheta, S2xS-2) and on (S2, S-2), and the scalar
/// q^2+q on every skyscraper generator.
pub fn eta_apply(v: &ModuleElement) -> ModuleElement {
    let q = lc(&[0, 1]);
    let q2 = lc(&[0, 0, 1]);
    let q2m1 = lc(&[-1, 0, 1]);
    let q2pq = lc(&[0, 1, 1]);
    let mut out = ModuleElement::zero();
    let c = |g: CoreGen| v.coefficient_core(g).clone();
    out.add_core_term(CoreGen::T2, &c(CoreGen::T2));
    out.add_core_term(CoreGen::Tm2, &c(CoreGen::Tm2));
    out.add_core_term(CoreGen::Tp, &q2m1.mul(&c(CoreGen::Tp)));
    out.add_core_term(CoreGen::Tm, &q2m1.mul(&c(CoreGen::Tm)));
    out.add_core_term(
        CoreGen::TTheta,
        &q2.mul(&c(CoreGen::TTheta)).add(&q.mul(&c(CoreGen::S2Sm2))),
    );
    out.add_core_term(
        CoreGen::S2Sm2,
        &q.mul(&c(CoreGen::TTheta)).add(&q2.mul(&c(CoreGen::S2Sm2))),
    );
    out.add_core_term(
        CoreGen::S2,
        &q2.mul(&c(CoreGen::S2)).add(&q.mul(&c(CoreGen::Sm2))),
    );
    out.add_core_term(
        CoreGen::Sm2,
        &q.mul(&c(CoreGen::S2)).add(&q2.mul(&c(CoreGen::Sm2))),
    );
    for (orbit, coeff) in v.sky_terms() {
        out.add_sky_term(orbit, &q2pq.mul(coeff))
            .expect("backends preserved");
    }
    out
}

/// Inverse of eta over the localization; eta(eta_inverse(v)) = v exactly.
pub fn eta_inverse_apply(v: &ModuleElement) -> ModuleElement {
    let q = lc(&[0, 1]);
    let q2 = lc(&[0, 0, 1]);
    // 1/(q^2-1), 1/(q^4-q^2) = 1/(q^2 (q+1)(q-1)), 1/(q^2+q)
    let inv_q2m1 = LocalizedClass::new(Poly::one(), [0, 1, 1]);
    let inv_q4mq2 = LocalizedClass::new(Poly::one(), [2, 1, 1]);
    let inv_q2pq = LocalizedClass::new(Poly::one(), [1, 1, 0]);
    let mut out = ModuleElement::zero();
    let c = |g: CoreGen| v.coefficient_core(g).clone();
    out.add_core_term(CoreGen::T2, &c(CoreGen::T2));
    out.add_core_term(CoreGen::Tm2, &c(CoreGen::Tm2));
    out.add_core_term(CoreGen::Tp, &inv_q2m1.mul(&c(CoreGen::Tp)));
    out.add_core_term(CoreGen::Tm, &inv_q2m1.mul(&c(CoreGen::Tm)));
    // inverse of [[q^2, q], [q, q^2]] is [[q^2, -q], [-q, q^2]]/(q^4 - q^2)
    out.add_core_term(
        CoreGen::TTheta,
        &inv_q4mq2.mul(&q2.mul(&c(CoreGen::TTheta)).sub(&q.mul(&c(CoreGen::S2Sm2)))),
    );
    out.add_core_term(
        CoreGen::S2Sm2,
        &inv_q4mq2.mul(&q2.mul(&c(CoreGen::S2Sm2)).sub(&q.mul(&c(CoreGen::TTheta)))),
    );
    out.add_core_term(
        CoreGen::S2,
        &inv_q4mq2.mul(&q2.mul(&c(CoreGen::S2)).sub(&q.mul(&c(CoreGen::Sm2)))),
    );
    out.add_core_term(
        CoreGen::Sm2,
        &inv_q4mq2.mul(&q2.mul(&c(CoreGen::Sm2)).sub(&q.mul(&c(CoreGen::S2)))),
    );
    for (orbit, coeff) in v.sky_terms() {
        out.add_sky_term(orbit, &inv_q2pq.mul(coeff))
            .expect("backends preserved");
    }
    out
}

// --- semisimple tube ------------------------------------------------------

/// delta(mu): the contribution of the eigenvalue product mu in the
/// skyscraper rewrite rule of a semisimple tube. When mu is regular it is a
/// skyscraper; when it degenerates to +-1 the would-be skyscraper lands on
/// the trace +-2 strata instead.
fn delta(mu: &EigenClass) -> ModuleElement {
    let qm1 = lc(&[-1, 1]);
    let mut out = ModuleElement::zero();
    match mu.classify_unit() {
        UnitClass::IsOne => {
            out.add_core_term(CoreGen::T2, &LocalizedClass::one());
            out.add_core_term(CoreGen::Tp, &qm1);
        }
        UnitClass::IsMinusOne => {
            out.add_core_term(CoreGen::Tm2, &LocalizedClass::one());
            out.add_core_term(CoreGen::Tm, &qm1);
        }
        UnitClass::Generic => {
            out.add_sky_term(&TraceOrbit::of(mu).expect("generic"), &lc(&[0, 1]))
                .expect("fresh element");
        }
    }
    out
}

struct ColumnSpec {
    core: &'static [(CoreGen, &'static [i64])],
    sky_t0: &'static [i64],
    sky_neg_t0: &'static [i64],
}

/// Reduced semisimple tube matrix on core generators (prefactor q^3-q
/// extracted).
fn reduced_column(g: CoreGen) -> ColumnSpec {
    use CoreGen::*;
    match g {
        T2 => ColumnSpec {
            core: &[],
            sky_t0: &[0, 1, 1],
            sky_neg_t0: &[],
        },
        Tm2 => ColumnSpec {
            core: &[],
            sky_t0: &[],
            sky_neg_t0: &[0, 1, 1],
        },
        Tp => ColumnSpec {
            core: &[(Tp, &[0, 1]), (Tm, &[0, 1]), (TTheta, &[0, 1])],
            sky_t0: &[0, 1],
            sky_neg_t0: &[],
        },
        Tm => ColumnSpec {
            core: &[(Tp, &[0, 1]), (Tm, &[0, 1]), (TTheta, &[0, 1])],
            sky_t0: &[],
            sky_neg_t0: &[0, 1],
        },
        TTheta => ColumnSpec {
            core: &[
                (T2, &[1]),
                (Tm2, &[1]),
                (Tp, &[0, -1, 1]),
                (Tm, &[0, -1, 1]),
                (TTheta, &[1, -1, 1]),
                (S2Sm2, &[0, 1]),
            ],
            sky_t0: &[0, -1],
            sky_neg_t0: &[0, -1],
        },
        S2 | Sm2 => ColumnSpec {
            core: &[
                (T2, &[1]),
                (Tm2, &[1]),
                (TTheta, &[1, -1]),
                (S2, &[0, 1]),
                (Sm2, &[0, 1]),
            ],
            sky_t0: &[0, -1],
            sky_neg_t0: &[0, -1],
        },
        S2Sm2 => ColumnSpec {
            core: &[
                (T2, &[1]),
                (Tm2, &[1]),
                (Tp, &[1, -1]),
                (Tm, &[1, -1]),
                (TTheta, &[2, -1]),
                (S2Sm2, &[0, 1]),
            ],
            sky_t0: &[0, -1],
            sky_neg_t0: &[0, -1],
        },
    }
}

/// Unreduced semisimple tube matrix on core generators (prefactor
/// (q^2+q)(q^3-q) extracted).
fn unreduced_column(g: CoreGen) -> ColumnSpec {
    use CoreGen::*;
    match g {
        T2 => ColumnSpec {
            core: &[],
            sky_t0: &[1],
            sky_neg_t0: &[],
        },
        Tm2 => ColumnSpec {
            core: &[],
            sky_t0: &[],
            sky_neg_t0: &[1],
        },
        Tp => ColumnSpec {
            core: &[(Tp, &[-1, 1]), (Tm, &[-1, 1]), (TTheta, &[-1, 1])],
            sky_t0: &[-1, 1],
            sky_neg_t0: &[],
        },
        Tm => ColumnSpec {
            core: &[(Tp, &[-1, 1]), (Tm, &[-1, 1]), (TTheta, &[-1, 1])],
            sky_t0: &[],
            sky_neg_t0: &[-1, 1],
        },
        TTheta => ColumnSpec {
            core: &[
                (T2, &[1]),
                (Tm2, &[1]),
                (Tp, &[1, -2, 1]),
                (Tm, &[1, -2, 1]),
                (TTheta, &[2, -2, 1]),
                (S2Sm2, &[0, 1]),
            ],
            sky_t0: &[0, -1],
            sky_neg_t0: &[0, -1],
        },
        S2 | Sm2 => ColumnSpec {
            core: &[
                (T2, &[1]),
                (Tm2, &[1]),
                (TTheta, &[1, -1]),
                (S2, &[0, 1]),
                (Sm2, &[0, 1]),
            ],
            sky_t0: &[0, -1],
            sky_neg_t0: &[0, -1],
        },
        S2Sm2 => ColumnSpec {
            core: &[(T2, &[1]), (Tm2, &[1]), (TTheta, &[1]), (S2Sm2, &[0, 1])],
            sky_t0: &[0, -1],
            sky_neg_t0: &[0, -1],
        },
    }
}

/// Image of one skyscraper generator T_t, without the global prefactor:
/// (q-1)(T_+ + T_- + TTheta) + delta(l0*l) + delta(l0/l).
fn semisimple_sky_image(t0: &TraceOrbit, t: &TraceOrbit) -> Result<ModuleElement, EigenError> {
    let l0 = t0.representative();
    let l = t.representative();
    let qm1 = lc(&[-1, 1]);
    let mut out = ModuleElement::zero();
    out.add_core_term(CoreGen::Tp, &qm1);
    out.add_core_term(CoreGen::Tm, &qm1);
    out.add_core_term(CoreGen::TTheta, &qm1);
    out.add_scaled_in_place(&LocalizedClass::one(), &delta(&l0.mul(l)?))?;
    out.add_scaled_in_place(&LocalizedClass::one(), &delta(&l0.mul(&l.inv())?))?;
    Ok(out)
}

pub fn semisimple_tube_apply(
    t0: &TraceOrbit,
    v: &ModuleElement,
    reduced: bool,
) -> Result<ModuleElement, OperatorError> {
    let prefactor = if reduced {
        LocalizedClass::q3_minus_q()
    } else {
        LocalizedClass::q2_plus_q().mul(&LocalizedClass::q3_minus_q())
    };
    let neg_t0 = t0.negate();
    let mut out = ModuleElement::zero();
    for g in CORE_GENS {
        let coeff = v.coefficient_core(g);
        if coeff.is_zero() {
            continue;
        }
        let spec = if reduced {
            reduced_column(g)
        } else {
            unreduced_column(g)
        };
        let scale = prefactor.mul(coeff);
        for (target, entry) in spec.core {
            out.add_core_term(*target, &scale.mul(&lc(entry)));
        }
        if !spec.sky_t0.is_empty() {
            out.add_sky_term(t0, &scale.mul(&lc(spec.sky_t0)))?;
        }
        if !spec.sky_neg_t0.is_empty() {
            out.add_sky_term(&neg_t0, &scale.mul(&lc(spec.sky_neg_t0)))?;
        }
    }
    for (orbit, coeff) in v.sky_terms() {
        let image = semisimple_sky_image(t0, orbit)?;
        out.add_scaled_in_place(&prefactor.mul(coeff), &image)?;
    }
    Ok(out)
}

// --- handle and Jordan tubes ----------------------------------------------

/// 8x8 matrix of classes acting on the core generators; entry [row][col]
/// multiplies the coefficient of input generator `col` into output `row`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreMatrix(pub Box<[[LocalizedClass; 8]; 8]>);

impl CoreMatrix {
    pub fn zero() -> Self {
        CoreMatrix(Box::new(std::array::from_fn(|_| {
            std::array::from_fn(|_| LocalizedClass::zero())
        })))
    }

    pub fn entry(&self, row: CoreGen, col: CoreGen) -> &LocalizedClass {
        &self.0[row.index()][col.index()]
    }

    fn apply_core(&self, v: &ModuleElement, out: &mut ModuleElement) {
        for col in CORE_GENS {
            let coeff = v.coefficient_core(col);
            if coeff.is_zero() {
                continue;
            }
            for row in CORE_GENS {
                let e = &self.0[row.index()][col.index()];
                if !e.is_zero() {
                    out.add_core_term(row, &e.mul(coeff));
                }
            }
        }
    }
}

/// Fitted core matrices of the unreduced handle and Jordan tube operators.
#[derive(Debug, Clone)]
pub struct OperatorData {
    pub handle: CoreMatrix,
    pub jordan_plus: CoreMatrix,
    pub jordan_minus: CoreMatrix,
}

impl OperatorData {
    /// Load from the committed data file, falling back to the copy embedded
    /// in the binary.
    pub fn load(path: Option<&Path>) -> Result<OperatorData, OperatorError> {
        crate::interpolate::load_operator_data(path)
    }
}

fn q3mq_sq() -> LocalizedClass {
    LocalizedClass::q3_minus_q().pow(2)
}

/// Skyscraper rule of the unreduced Jordan tube: T_t maps to
/// (q^3-q)^2 (T_+ + T_- + TTheta + T_{+-t}).
fn jordan_sky_image(plus: bool, orbit: &TraceOrbit) -> ModuleElement {
    let pre = q3mq_sq();
    let mut out = ModuleElement::zero();
    out.add_core_term(CoreGen::Tp, &pre);
    out.add_core_term(CoreGen::Tm, &pre);
    out.add_core_term(CoreGen::TTheta, &pre);
    let target = if plus { orbit.clone() } else { orbit.negate() };
    out.add_sky_term(&target, &pre).expect("fresh element");
    out
}

/// Skyscraper rule of the unreduced handle tube.
fn handle_sky_image(orbit: &TraceOrbit) -> ModuleElement {
    let pre = q3mq_sq();
    let mut out = ModuleElement::zero();
    let terms: [(CoreGen, &[i64]); 8] = [
        (CoreGen::T2, &[1, 4, 1]),
        (CoreGen::Tm2, &[1, 4, 1]),
        // (q^2+2q+3)(q-1)q = q^4 + q^3 + q^2 - 3q
        (CoreGen::Tp, &[0, -3, 1, 1, 1]),
        (CoreGen::Tm, &[0, -3, 1, 1, 1]),
        (CoreGen::TTheta, &[1, 1, -1, 1, 1]),
        (CoreGen::S2, &[0, 0, 3]),
        (CoreGen::Sm2, &[0, 0, 3]),
        (CoreGen::S2Sm2, &[0, 1, 1, 1]),
    ];
    for (g, coeffs) in terms {
        out.add_core_term(g, &pre.mul(&lc(coeffs)));
    }
    out.add_sky_term(orbit, &pre.mul(&lc(&[0, 0, -1, 1])))
        .expect("fresh element");
    out
}

pub fn jordan_tube_apply(
    data: &OperatorData,
    plus: bool,
    v: &ModuleElement,
    reduced: bool,
) -> Result<ModuleElement, OperatorError> {
    let v = if reduced {
        eta_inverse_apply(v)
    } else {
        v.clone()
    };
    let matrix = if plus {
        &data.jordan_plus
    } else {
        &data.jordan_minus
    };
    let mut out = ModuleElement::zero();
    matrix.apply_core(&v, &mut out);
    for (orbit, coeff) in v.sky_terms() {
        out.add_scaled_in_place(coeff, &jordan_sky_image(plus, orbit))?;
    }
    Ok(out)
}

pub fn handle_tube_apply(
    data: &OperatorData,
    v: &ModuleElement,
    reduced: bool,
) -> Result<ModuleElement, OperatorError> {
    let v = if reduced {
        eta_inverse_apply(v)
    } else {
        v.clone()
    };
    let mut out = ModuleElement::zero();
    data.handle.apply_core(&v, &mut out);
    for (orbit, coeff) in v.sky_terms() {
        out.add_scaled_in_place(coeff, &handle_sky_image(orbit))?;
    }
    Ok(out)
}

pub fn tube_apply(
    kind: &TubeKind,
    data: &OperatorData,
    v: &ModuleElement,
    reduced: bool,
) -> Result<ModuleElement, OperatorError> {
    match kind {
        TubeKind::Handle => handle_tube_apply(data, v, reduced),
        TubeKind::JordanPlus => jordan_tube_apply(data, true, v, reduced),
        TubeKind::JordanMinus => jordan_tube_apply(data, false, v, reduced),
        TubeKind::Semisimple(t0) => semisimple_tube_apply(t0, v, reduced),
    }
}

// --- surface assembly -----------------------------------------------------

/// Apply the reduced tube pipeline of the bordism decomposition to T_2 and
/// extract the T_2 coefficient, normalized by (q^3-q)^N with N the number of
/// tubes. Holonomies are first reduced: -Id punctures cancel pairwise
/// against [J_-] signs, and a leftover global sign is pushed into the first
/// semisimple eigenvalue.
pub fn assemble_representation_class(
    spec: &SurfaceSpec,
    data: &OperatorData,
) -> Result<LocalizedClass, OperatorError> {
    spec.validate()?;
    let mut eigs = spec.semisimple.clone();
    if spec.sigma() == -1 {
        if eigs.is_empty() {
            return Err(OperatorError::OutOfScopeTwisted);
        }
        eigs[0] = eigs[0].neg();
    }
    let r = spec.r_plus + spec.r_minus;
    let mut v = ModuleElement::core_gen(CoreGen::T2);
    for e in &eigs {
        let t0 = TraceOrbit::of(e)?;
        v = semisimple_tube_apply(&t0, &v, true)?;
    }
    for _ in 0..r {
        v = jordan_tube_apply(data, true, &v, true)?;
    }
    for _ in 0..spec.genus {
        v = handle_tube_apply(data, &v, true)?;
    }
    let n = spec.genus + r + eigs.len() as u32;
    let coeff = v.coefficient_core(CoreGen::T2);
    let result = coeff.mul(&LocalizedClass::inv_q3_minus_q(n));
    if !result.is_polynomial() {
        return Err(OperatorError::NotPolynomial(result.to_string()));
    }
    Ok(result)
}

impl fmt::Display for TubeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TubeKind::Handle => write!(f, "handle"),
            TubeKind::JordanPlus => write!(f, "jordan-plus"),
            TubeKind::JordanMinus => write!(f, "jordan-minus"),
            TubeKind::Semisimple(t0) => write!(f, "semisimple[{t0}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wmodule::GenKey;

    fn orbit_rat(n: i64, d: i64) -> TraceOrbit {
        TraceOrbit::of(&EigenClass::rational_int(n, d).unwrap()).unwrap()
    }

    fn orbit_sym() -> TraceOrbit {
        TraceOrbit::of(&EigenClass::symbolic_generator(0, 2).unwrap()).unwrap()
    }

    fn orbit_zeta4() -> TraceOrbit {
        TraceOrbit::of(&EigenClass::root_of_unity(4, 1).unwrap()).unwrap()
    }

    #[test]
    fn eta_matrix_columns() {
        let t2 = ModuleElement::core_gen(CoreGen::T2);
        assert_eq!(eta_apply(&t2), t2);
        let theta = eta_apply(&ModuleElement::core_gen(CoreGen::TTheta));
        assert_eq!(*theta.coefficient_core(CoreGen::TTheta), lc(&[0, 0, 1]));
        assert_eq!(*theta.coefficient_core(CoreGen::S2Sm2), lc(&[0, 1]));
        let sky = eta_apply(&ModuleElement::sky_gen(orbit_rat(2, 1)));
        assert_eq!(
            sky.coefficient_of(&GenKey::Sky(orbit_rat(2, 1))),
            lc(&[0, 1, 1])
        );
    }

    #[test]
    fn eta_inverse_examples() {
        let tp = eta_inverse_apply(&ModuleElement::core_gen(CoreGen::Tp));
        assert_eq!(
            *tp.coefficient_core(CoreGen::Tp),
            LocalizedClass::new(Poly::one(), [0, 1, 1])
        );
        let theta = eta_inverse_apply(&ModuleElement::core_gen(CoreGen::TTheta));
        // (q^2 TTheta - q S2Sm2)/(q^4 - q^2)
        let inv = LocalizedClass::new(Poly::one(), [2, 1, 1]);
        assert_eq!(
            *theta.coefficient_core(CoreGen::TTheta),
            inv.mul(&lc(&[0, 0, 1]))
        );
        assert_eq!(
            *theta.coefficient_core(CoreGen::S2Sm2),
            inv.mul(&lc(&[0, -1]))
        );
    }

    #[test]
    fn eta_round_trip_on_generators() {
        for g in CORE_GENS {
            let v = ModuleElement::core_gen(g);
            assert_eq!(eta_apply(&eta_inverse_apply(&v)), v, "column {g}");
            assert_eq!(eta_inverse_apply(&eta_apply(&v)), v, "column {g}");
        }
        let v = ModuleElement::sky_gen(orbit_rat(3, 1));
        assert_eq!(eta_apply(&eta_inverse_apply(&v)), v);
    }

    #[test]
    fn reduced_t2_column() {
        let t0 = orbit_sym();
        let out = semisimple_tube_apply(&t0, &ModuleElement::core_gen(CoreGen::T2), true).unwrap();
        // (q^3-q)(q^2+q) T_{t0}
        let expected = LocalizedClass::q3_minus_q().mul(&lc(&[0, 1, 1]));
        assert_eq!(out.coefficient_of(&GenKey::Sky(t0.clone())), expected);
        assert_eq!(out.terms().len(), 1);
    }

    #[test]
    fn reduced_s2_column() {
        let t0 = orbit_sym();
        let out = semisimple_tube_apply(&t0, &ModuleElement::core_gen(CoreGen::S2), true).unwrap();
        let pre = LocalizedClass::q3_minus_q();
        assert_eq!(*out.coefficient_core(CoreGen::T2), pre);
        assert_eq!(*out.coefficient_core(CoreGen::Tm2), pre);
        assert_eq!(
            *out.coefficient_core(CoreGen::TTheta),
            pre.mul(&lc(&[1, -1]))
        );
        assert_eq!(*out.coefficient_core(CoreGen::S2), pre.mul(&lc(&[0, 1])));
        assert_eq!(*out.coefficient_core(CoreGen::Sm2), pre.mul(&lc(&[0, 1])));
        assert_eq!(
            out.coefficient_of(&GenKey::Sky(t0.clone())),
            pre.mul(&lc(&[0, -1]))
        );
        assert_eq!(
            out.coefficient_of(&GenKey::Sky(t0.negate())),
            pre.mul(&lc(&[0, -1]))
        );
    }

    #[test]
    fn trace_zero_sky_column() {
        // t0 = orbit(zeta_4): the image of T_0 collapses onto the core.
        let t0 = orbit_zeta4();
        let out = semisimple_tube_apply(&t0, &ModuleElement::sky_gen(t0.clone()), true).unwrap();
        let pre = LocalizedClass::q3_minus_q();
        assert_eq!(*out.coefficient_core(CoreGen::T2), pre);
        assert_eq!(*out.coefficient_core(CoreGen::Tm2), pre);
        assert_eq!(*out.coefficient_core(CoreGen::Tp), pre.mul(&lc(&[-2, 2])));
        assert_eq!(*out.coefficient_core(CoreGen::Tm), pre.mul(&lc(&[-2, 2])));
        assert_eq!(
            *out.coefficient_core(CoreGen::TTheta),
            pre.mul(&lc(&[-1, 1]))
        );
        assert_eq!(out.sky_terms().count(), 0);
    }

    #[test]
    fn reduced_is_unreduced_after_eta_inverse() {
        for t0 in [orbit_sym(), orbit_zeta4(), orbit_rat(2, 1)] {
            for g in CORE_GENS {
                let v = ModuleElement::core_gen(g);
                let reduced = semisimple_tube_apply(&t0, &v, true).unwrap();
                let composed = semisimple_tube_apply(&t0, &eta_inverse_apply(&v), false).unwrap();
                assert_eq!(reduced, composed, "t0={t0} column {g}");
            }
            let sky_key = match t0.representative() {
                EigenClass::Rational(_) => orbit_rat(3, 1),
                EigenClass::RootOfUnity { .. } => {
                    TraceOrbit::of(&EigenClass::root_of_unity(5, 1).unwrap()).unwrap()
                }
                EigenClass::Symbolic { .. } => {
                    TraceOrbit::of(&EigenClass::symbolic_generator(1, 2).unwrap()).unwrap()
                }
            };
            let v = ModuleElement::sky_gen(sky_key);
            let reduced = semisimple_tube_apply(&t0, &v, true).unwrap();
            let composed = semisimple_tube_apply(&t0, &eta_inverse_apply(&v), false).unwrap();
            assert_eq!(reduced, composed, "t0={t0} sky column");
        }
    }

    #[test]
    fn semisimple_tubes_commute() {
        let t0 = orbit_rat(2, 1);
        let t1 = orbit_rat(3, 1);
        for g in CORE_GENS {
            let v = ModuleElement::core_gen(g);
            let ab =
                semisimple_tube_apply(&t1, &semisimple_tube_apply(&t0, &v, true).unwrap(), true)
                    .unwrap();
            let ba =
                semisimple_tube_apply(&t0, &semisimple_tube_apply(&t1, &v, true).unwrap(), true)
                    .unwrap();
            assert_eq!(ab, ba, "column {g}");
        }
    }

    #[test]
    fn single_puncture_sphere_vanishes() {
        // g=0, s=1: C must equal Id which has the wrong trace, so [Rep] = 0.
        let data = OperatorData {
            handle: CoreMatrix::zero(),
            jordan_plus: CoreMatrix::zero(),
            jordan_minus: CoreMatrix::zero(),
        };
        let spec = SurfaceSpec {
            genus: 0,
            semisimple: vec![EigenClass::symbolic_generator(0, 1).unwrap()],
            ..Default::default()
        };
        let v = assemble_representation_class(&spec, &data).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn fitted_jordan_column_on_t2() {
        let data = OperatorData::load(None).unwrap();
        // Unreduced [J_+] tube on T_2 lands on (q^3-q)(q^2-1) T_+ plus
        // terms supported away from T_+; check the fitted T_+ entry.
        assert_eq!(
            *data.jordan_plus.entry(CoreGen::Tp, CoreGen::T2),
            lc(&[0, 1, 0, -2, 0, 1])
        );
    }

    #[test]
    fn assembled_one_holed_torus_benchmarks() {
        let data = OperatorData::load(None).unwrap();
        // g=1, one semisimple puncture with free eigenvalue:
        // q(q^2-1)(q^2+4q+1).
        let spec = SurfaceSpec {
            genus: 1,
            semisimple: vec![EigenClass::symbolic_generator(0, 1).unwrap()],
            ..Default::default()
        };
        let v = assemble_representation_class(&spec, &data).unwrap();
        assert_eq!(v, lc(&[0, -1, -4, 0, 4, 1]));
        // g=1, one [J_+] puncture and one semisimple puncture:
        // q^2(q-1)^2(q+1)(q^2+2q+3).
        let spec = SurfaceSpec {
            genus: 1,
            r_plus: 1,
            semisimple: vec![EigenClass::symbolic_generator(0, 1).unwrap()],
            ..Default::default()
        };
        let v = assemble_representation_class(&spec, &data).unwrap();
        assert_eq!(v, lc(&[0, 0, 3, -1, -4, 0, 1, 1]));
    }

    #[test]
    fn twisted_without_semisimple_is_out_of_scope() {
        let data = OperatorData {
            handle: CoreMatrix::zero(),
            jordan_plus: CoreMatrix::zero(),
            jordan_minus: CoreMatrix::zero(),
        };
        let spec = SurfaceSpec {
            genus: 1,
            minus_id: 1,
            ..Default::default()
        };
        assert!(matches!(
            assemble_representation_class(&spec, &data),
            Err(OperatorError::OutOfScopeTwisted)
        ));
    }
}
