//! Recovery of the handle and Jordan tube core matrices from finite-field
//! point counts: Lagrange interpolation of each matrix entry over a set of
//! primes, exact prefactor extraction, and validation against held-out
//! primes. Also handles (de)serialization of the committed operator data
//! file.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ffcount::{GroupData, SpanKind};
use crate::kring::{LocalizedClass, Poly};
use crate::operators::{CoreMatrix, OperatorData, OperatorError};
use crate::wmodule::CORE_GENS;

pub const OPERATOR_PREFACTOR: &str = "(q^3-q)^2";

const EMBEDDED_DATA: &str = include_str!("../data/operators.json");

#[derive(Debug, thiserror::Error)]
pub enum FitError {
    #[error("cannot produce an integer polynomial fit: {0}")]
    NonIntegralFit(String),
    #[error("fitted operator disagrees with held-out prime {prime} (entry {entry})")]
    ValidationFailed { prime: u64, entry: String },
    #[error(transparent)]
    Count(#[from] crate::ffcount::CountError),
}

/// One fitted 8x8 core matrix as committed to the data file. Entries are
/// integer coefficient lists, constant term first, giving the full operator
/// entry (no factor divided out: the columns do not share a common one —
/// e.g. the Jordan T2 column is (q^3-q)(q^2-1) T_+). The prefactor field
/// records the normalization convention of the companion skyscraper rules.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedOperator {
    pub kind: String,
    pub degree_bound: u32,
    pub primes: Vec<u64>,
    pub entries: Vec<Vec<Vec<i64>>>,
    pub prefactor: String,
    pub checksum: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub operators: Vec<FittedOperator>,
}

impl FittedOperator {
    /// Checksum over everything except the checksum field itself.
    pub fn compute_checksum(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.kind.as_bytes());
        hasher.update([0]);
        hasher.update(self.degree_bound.to_le_bytes());
        for p in &self.primes {
            hasher.update(p.to_le_bytes());
        }
        for row in &self.entries {
            for entry in row {
                for &c in entry {
                    hasher.update(c.to_le_bytes());
                }
                hasher.update([1]);
            }
        }
        hasher.update(self.prefactor.as_bytes());
        let mut out = String::new();
        for b in hasher.finalize() {
            write!(out, "{b:02x}").unwrap();
        }
        out
    }

    pub fn seal(&mut self) {
        self.checksum = self.compute_checksum();
    }

    fn to_core_matrix(&self) -> Result<CoreMatrix, OperatorError> {
        if self.entries.len() != 8 || self.entries.iter().any(|r| r.len() != 8) {
            return Err(OperatorError::MissingOperatorData(format!(
                "operator {:?} is not an 8x8 matrix",
                self.kind
            )));
        }
        if self.prefactor != OPERATOR_PREFACTOR {
            return Err(OperatorError::MissingOperatorData(format!(
                "operator {:?} has unsupported prefactor {:?}",
                self.kind, self.prefactor
            )));
        }
        if self.checksum != self.compute_checksum() {
            return Err(OperatorError::MissingOperatorData(format!(
                "operator {:?} failed its checksum",
                self.kind
            )));
        }
        let mut m = CoreMatrix::zero();
        for (i, row_gen) in CORE_GENS.iter().enumerate() {
            for (j, col_gen) in CORE_GENS.iter().enumerate() {
                let poly = Poly::from_coeffs(
                    self.entries[i][j]
                        .iter()
                        .map(|&c| BigInt::from(c))
                        .collect(),
                );
                m.0[row_gen.index()][col_gen.index()] = LocalizedClass::from_poly(poly);
            }
        }
        Ok(m)
    }
}

/// Default fitting / held-out prime sets.
///
/// Finite-field profile counts of an operator entry are not a single
/// polynomial in p: wherever the counting geometry presents a square root
/// of the negative of a cover discriminant, the count picks up a factor
/// chi(-1) = (-1)^((p-1)/2) that is identically +1 over the complex
/// numbers (where every constant is a square). Each entry is therefore
/// modeled as e0(q) + chi(-1) e1(q) and fitted as two independent
/// interpolations over the primes with chi(-1) = +1 (p = 1 mod 4) and
/// chi(-1) = -1 (p = 3 mod 4); the committed entry is the +1 branch, the
/// complex value. The handle entries have degree at most 12 and the Jordan
/// entries at most 8, so each branch needs 13 resp. 9 support primes; two
/// extra primes per branch are held out for validation.
pub const HANDLE_DEGREE_BOUND: u32 = 12;
pub const JORDAN_DEGREE_BOUND: u32 = 8;
pub const HANDLE_FIT_PRIMES: [u64; 26] = [
    7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101,
    103, 109, 113,
];
pub const HANDLE_HOLDOUT_PRIMES: [u64; 4] = [107, 127, 137, 149];
pub const JORDAN_FIT_PRIMES: [u64; 18] = [
    7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 73, 89,
];
pub const JORDAN_HOLDOUT_PRIMES: [u64; 4] = [71, 79, 97, 101];

fn kind_name(kind: SpanKind) -> &'static str {
    match kind {
        SpanKind::Handle => "handle",
        SpanKind::JordanPlus => "jordan-plus",
        SpanKind::JordanMinus => "jordan-minus",
        SpanKind::Semisimple(_) => unreachable!("semisimple tubes are closed-form, never fitted"),
    }
}

/// Exact Lagrange interpolation through `points`, coefficients constant term
/// first, trailing zeros trimmed.
fn lagrange(points: &[(u64, i128)]) -> Vec<BigRational> {
    let mut acc = vec![BigRational::zero(); points.len()];
    for (k, &(xk, yk)) in points.iter().enumerate() {
        let mut basis = vec![BigRational::one()];
        let mut den = BigRational::one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if j == k {
                continue;
            }
            let xj = BigRational::from(BigInt::from(xj));
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (d, c) in basis.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * &xj;
            }
            basis = next;
            den *= BigRational::from(BigInt::from(xk)) - xj;
        }
        let scale = BigRational::from(BigInt::from(yk)) / den;
        for (d, c) in basis.into_iter().enumerate() {
            acc[d] += c * &scale;
        }
    }
    while acc.len() > 1 && acc.last().unwrap().is_zero() {
        acc.pop();
    }
    acc
}

fn eval_coeffs(coeffs: &[i64], x: u64) -> i128 {
    let mut acc = BigInt::from(0);
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    i128::try_from(&acc).expect("entry evaluation fits in 128 bits")
}

fn entry_label(i: usize, j: usize) -> String {
    format!("{:?} <- {:?}", CORE_GENS[i], CORE_GENS[j])
}

fn fit_branch(
    points: &[(u64, i128)],
    degree_bound: u32,
    label: &dyn Fn() -> String,
) -> Result<Vec<i64>, FitError> {
    let coeffs = lagrange(points);
    if coeffs.len() > degree_bound as usize + 1 {
        return Err(FitError::NonIntegralFit(format!(
            "entry {} has degree {} > bound {degree_bound}",
            label(),
            coeffs.len() - 1
        )));
    }
    let ints: Option<Vec<i64>> = coeffs
        .iter()
        .map(|c| {
            if c.is_integer() {
                i64::try_from(&c.to_integer()).ok()
            } else {
                None
            }
        })
        .collect();
    let mut out = ints.ok_or_else(|| {
        FitError::NonIntegralFit(format!(
            "entry {} interpolates to non-integer coefficients",
            label()
        ))
    })?;
    if out == [0] {
        out.clear();
    }
    Ok(out)
}

/// Fit one tube's 8x8 core matrix from finite-field profile counts: count
/// the span at each fitting prime, interpolate every entry over each
/// chi(-1) residue branch as an exact integer polynomial in q, check both
/// branches against the held-out primes, and keep the chi(-1) = +1 branch
/// (the complex-geometry value).
pub fn fit_core_matrix(
    kind: SpanKind,
    primes: &[u64],
    holdout: &[u64],
    work_limit: u64,
) -> Result<FittedOperator, FitError> {
    let degree_bound = match kind {
        SpanKind::Handle => HANDLE_DEGREE_BOUND,
        _ => JORDAN_DEGREE_BOUND,
    };
    let needed = degree_bound as usize + 1;
    let branch_count =
        |set: &[u64], residue: u64| set.iter().filter(|&&p| p % 4 == residue).count();
    for residue in [1, 3] {
        if branch_count(primes, residue) < needed {
            return Err(FitError::NonIntegralFit(format!(
                "{} entries have degree up to {degree_bound}; need at least {needed} fitting \
                 primes with p = {residue} mod 4, got {}",
                kind_name(kind),
                branch_count(primes, residue)
            )));
        }
        if branch_count(holdout, residue) < 2 {
            return Err(FitError::NonIntegralFit(format!(
                "need at least 2 held-out primes with p = {residue} mod 4 for validation, got {}",
                branch_count(holdout, residue)
            )));
        }
    }
    let mut seen = primes.to_vec();
    seen.extend_from_slice(holdout);
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != primes.len() + holdout.len() {
        return Err(FitError::NonIntegralFit(
            "fitting and held-out primes must be pairwise distinct".into(),
        ));
    }

    let count_matrix = |p: u64| -> Result<[[i128; 8]; 8], FitError> {
        let group = GroupData::new(p)?;
        let tables = group.tables(work_limit)?;
        Ok(group.numeric_tube_matrix(&tables, kind)?)
    };
    let support: Vec<(u64, [[i128; 8]; 8])> = primes
        .iter()
        .map(|&p| Ok((p, count_matrix(p)?)))
        .collect::<Result<_, FitError>>()?;

    // entries[i][j]: the chi(-1) = +1 branch; twisted[i][j]: the -1 branch
    let mut entries = vec![vec![Vec::new(); 8]; 8];
    let mut twisted = vec![vec![Vec::new(); 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            let label = || entry_label(i, j);
            for (residue, slot) in [(1u64, &mut entries), (3, &mut twisted)] {
                let points: Vec<(u64, i128)> = support
                    .iter()
                    .filter(|(p, _)| p % 4 == residue)
                    .map(|&(p, ref m)| (p, m[i][j]))
                    .collect();
                slot[i][j] = fit_branch(&points, degree_bound, &label)?;
            }
        }
    }

    for &h in holdout {
        let observed = count_matrix(h)?;
        let branch = if h % 4 == 1 { &entries } else { &twisted };
        for i in 0..8 {
            for j in 0..8 {
                if eval_coeffs(&branch[i][j], h) != observed[i][j] {
                    return Err(FitError::ValidationFailed {
                        prime: h,
                        entry: entry_label(i, j),
                    });
                }
            }
        }
    }

    let mut op = FittedOperator {
        kind: kind_name(kind).to_string(),
        degree_bound,
        primes: primes.to_vec(),
        entries,
        prefactor: OPERATOR_PREFACTOR.to_string(),
        checksum: String::new(),
    };
    op.seal();
    Ok(op)
}

/// Fit all three counted tube operators with the default prime sets.
pub fn fit_all(work_limit: u64) -> Result<OperatorFile, FitError> {
    Ok(OperatorFile {
        operators: vec![
            fit_core_matrix(
                SpanKind::Handle,
                &HANDLE_FIT_PRIMES,
                &HANDLE_HOLDOUT_PRIMES,
                work_limit,
            )?,
            fit_core_matrix(
                SpanKind::JordanPlus,
                &JORDAN_FIT_PRIMES,
                &JORDAN_HOLDOUT_PRIMES,
                work_limit,
            )?,
            fit_core_matrix(
                SpanKind::JordanMinus,
                &JORDAN_FIT_PRIMES,
                &JORDAN_HOLDOUT_PRIMES,
                work_limit,
            )?,
        ],
    })
}

pub fn parse_operator_file(text: &str) -> Result<OperatorFile, OperatorError> {
    serde_json::from_str(text)
        .map_err(|e| OperatorError::MissingOperatorData(format!("malformed data file: {e}")))
}

fn find_kind(file: &OperatorFile, kind: &str) -> Result<CoreMatrix, OperatorError> {
    file.operators
        .iter()
        .find(|op| op.kind == kind)
        .ok_or_else(|| {
            OperatorError::MissingOperatorData(format!(
                "no fitted operator of kind {kind:?}; run fit-operators first"
            ))
        })?
        .to_core_matrix()
}

/// Load operator data from an explicit path, or from the copy embedded at
/// build time when no path is given.
pub fn load_operator_data(path: Option<&Path>) -> Result<OperatorData, OperatorError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| {
            OperatorError::MissingOperatorData(format!("cannot read {}: {e}", p.display()))
        })?,
        None => EMBEDDED_DATA.to_string(),
    };
    let file = parse_operator_file(&text)?;
    Ok(OperatorData {
        handle: find_kind(&file, "handle")?,
        jordan_plus: find_kind(&file, "jordan-plus")?,
        jordan_minus: find_kind(&file, "jordan-minus")?,
    })
}

/// Serialize an operator file deterministically (stable field order, two
/// space indentation, trailing newline).
pub fn render_operator_file(file: &OperatorFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("operator file serializes");
    text.push('\n');
    text
}
