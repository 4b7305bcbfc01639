//! Point counting in SL(2, F_p): the independent verification oracle.
//!
//! Two counting modes are provided. `count_representation_points` is a
//! deliberately naive brute-force count of solution tuples of the surface
//! relation, sharing no machinery with the symbolic engine. The
//! `fiber_profile_counts` family is the centralizer-accelerated counter
//! behind the operator fitter: it resolves the weighted span counts of the
//! tube operators per conjugacy stratum and, over the regular trace line,
//! against the four quadratic-character profiles.
//!
//! Only odd primes 3 <= p <= 151 are supported.

use std::fmt;

use crate::wmodule::{CoreGen, CORE_GENS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported bound {MAX_PRIME}")]
    PrimeTooLarge(u64),
    #[error("estimated work {needed} exceeds the limit {limit}")]
    WorkLimitExceeded { needed: u128, limit: u64 },
    #[error("quadratic-character profile system is singular at p = {0}")]
    ProfileSystemSingular(u64),
    #[error("nonzero residual in profile reconstruction at p = {0}")]
    ResidualNonzero(u64),
}

pub const MAX_PRIME: u64 = 151;

type Mat = [u64; 4];

const IDENT: Mat = [1, 0, 0, 1];

/// Conjugacy stratum of an element: the five-fold stratification by central
/// elements, the two unipotent-type loci and the regular trace line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassProfile {
    Id,
    MinusId,
    JPlus,
    JMinus,
    Theta(u64),
}

impl fmt::Display for ClassProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassProfile::Id => write!(f, "Id"),
            ClassProfile::MinusId => write!(f, "-Id"),
            ClassProfile::JPlus => write!(f, "[J+]"),
            ClassProfile::JMinus => write!(f, "[J-]"),
            ClassProfile::Theta(t) => write!(f, "trace {t}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassInfo {
    pub rep: Mat,
    pub size: u64,
    pub trace: u64,
    pub profile: ClassProfile,
}

/// Full enumeration of SL(2, F_p) with its conjugacy class structure. The
/// two unipotent classes of each trace +-2 are kept separate (class ids 2..5)
/// even though they merge in the stratification; regular classes follow in
/// ascending trace order, one per trace.
pub struct GroupData {
    pub p: u64,
    elements: Vec<Mat>,
    class_id: Vec<u16>,
    members: Vec<Vec<u32>>,
    inverse_class: Vec<u16>,
    pub classes: Vec<ClassInfo>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl GroupData {
    pub fn new(p: u64) -> Result<GroupData, CountError> {
        if p > MAX_PRIME {
            return Err(CountError::PrimeTooLarge(p));
        }
        if !is_prime(p) || p < 3 {
            return Err(CountError::NotPrime(p));
        }
        // enumerate ad - bc = 1 by solving for the fourth entry
        let mut inv_table = vec![0u64; p as usize];
        for x in 1..p {
            let mut y = 1u64;
            let mut base = x;
            let mut e = p - 2;
            while e > 0 {
                if e & 1 == 1 {
                    y = y * base % p;
                }
                base = base * base % p;
                e >>= 1;
            }
            inv_table[x as usize] = y;
        }
        let mut elements = Vec::with_capacity((p * p * p - p) as usize);
        for b in 1..p {
            let c = p - inv_table[b as usize];
            for d in 0..p {
                elements.push([0, b, c, d]);
            }
        }
        for a in 1..p {
            let ai = inv_table[a as usize];
            for b in 0..p {
                for c in 0..p {
                    let d = (1 + b * c % p) % p * ai % p;
                    elements.push([a, b, c, d]);
                }
            }
        }
        assert_eq!(elements.len() as u64, p * p * p - p);

        let regular_traces: Vec<u64> = (0..p).filter(|&t| t != 2 && t != p - 2).collect();
        let n_classes = 6 + regular_traces.len();

        let mut partial = GroupData {
            p,
            elements,
            class_id: Vec::new(),
            members: vec![Vec::new(); n_classes],
            inverse_class: Vec::new(),
            classes: Vec::new(),
        };
        let mut sizes = vec![0u64; n_classes];
        let mut reps: Vec<Option<Mat>> = vec![None; n_classes];
        let mut class_id = Vec::with_capacity(partial.elements.len());
        for idx in 0..partial.elements.len() {
            let m = partial.elements[idx];
            let id = partial.classify(m);
            class_id.push(id);
            sizes[id as usize] += 1;
            partial.members[id as usize].push(idx as u32);
            if reps[id as usize].is_none() {
                reps[id as usize] = Some(m);
            }
        }
        partial.class_id = class_id;
        assert_eq!(sizes.iter().sum::<u64>(), p * p * p - p, "class equation");
        assert_eq!(sizes[2], (p * p - 1) / 2);
        assert_eq!(sizes[3], (p * p - 1) / 2);

        partial.classes = (0..n_classes)
            .map(|i| {
                let rep = reps[i].expect("every class is populated");
                let trace = (rep[0] + rep[3]) % p;
                let profile = match i {
                    0 => ClassProfile::Id,
                    1 => ClassProfile::MinusId,
                    2 | 3 => ClassProfile::JPlus,
                    4 | 5 => ClassProfile::JMinus,
                    _ => ClassProfile::Theta(trace),
                };
                ClassInfo {
                    rep,
                    size: sizes[i],
                    trace,
                    profile,
                }
            })
            .collect();

        partial.inverse_class = (0..n_classes)
            .map(|i| partial.classify(partial.inv(partial.classes[i].rep)))
            .collect();

        Ok(partial)
    }

    /// Conjugacy class of an element, computed algebraically: central and
    /// regular classes are determined by the trace; the two fine unipotent
    /// classes of each trace +-2 are told apart by the quadratic residue of
    /// the conjugation-invariant entry of the nilpotent part (conjugating
    /// the elementary nilpotent E by g multiplies its lower-left entry by
    /// -gamma^2 and its upper-right entry by alpha^2).
    fn classify(&self, m: Mat) -> u16 {
        let p = self.p;
        let t = (m[0] + m[3]) % p;
        if t == 2 || t == p - 2 {
            // u = +-(Id + N) with N nilpotent
            let u = if t == 2 {
                m
            } else {
                [
                    (p - m[0]) % p,
                    (p - m[1]) % p,
                    (p - m[2]) % p,
                    (p - m[3]) % p,
                ]
            };
            let n21 = u[2];
            let n12 = u[1];
            if n21 == 0 && n12 == 0 {
                return if t == 2 { 0 } else { 1 };
            }
            let main = if n21 != 0 {
                self.chi(p - n21) == 1
            } else {
                self.chi(n12) == 1
            };
            match (t == 2, main) {
                (true, true) => 2,
                (true, false) => 3,
                (false, true) => 4,
                (false, false) => 5,
            }
        } else {
            // ascending regular traces, skipping the unipotent ones
            let skipped = (t > 2) as u64 + (t > p - 2) as u64;
            (6 + t - skipped) as u16
        }
    }

    pub fn order(&self) -> u64 {
        self.p * self.p * self.p - self.p
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn mul(&self, x: Mat, y: Mat) -> Mat {
        let p = self.p;
        [
            (x[0] * y[0] + x[1] * y[2]) % p,
            (x[0] * y[1] + x[1] * y[3]) % p,
            (x[2] * y[0] + x[3] * y[2]) % p,
            (x[2] * y[1] + x[3] * y[3]) % p,
        ]
    }

    pub fn inv(&self, x: Mat) -> Mat {
        let p = self.p;
        [
            x[3],
            if x[1] == 0 { 0 } else { p - x[1] },
            if x[2] == 0 { 0 } else { p - x[2] },
            x[0],
        ]
    }

    pub fn trace(&self, x: Mat) -> u64 {
        (x[0] + x[3]) % self.p
    }

    pub fn class_of(&self, m: Mat) -> u16 {
        self.classify(m)
    }

    /// Legendre symbol with chi(0) = 0, values in {-1, 0, 1}.
    pub fn chi(&self, x: u64) -> i64 {
        let x = x % self.p;
        if x == 0 {
            return 0;
        }
        let mut result = 1u64;
        let mut base = x;
        let mut e = (self.p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        if result == 1 {
            1
        } else {
            -1
        }
    }

    fn profile_matches(&self, profile: &PunctureKind, m: Mat) -> bool {
        let p = self.p;
        match profile {
            PunctureKind::JordanPlus => self.trace(m) == 2 && m != IDENT,
            PunctureKind::JordanMinus => self.trace(m) == p - 2 && m != [p - 1, 0, 0, p - 1],
            PunctureKind::MinusId => m == [p - 1, 0, 0, p - 1],
            PunctureKind::Semisimple(t) => self.trace(m) == t % p,
        }
    }

    fn stratum_members(&self, profile: &PunctureKind) -> Vec<Mat> {
        self.elements
            .iter()
            .copied()
            .filter(|&m| self.profile_matches(profile, m))
            .collect()
    }

    /// Brute-force count of tuples (A_1, B_1, ..., A_g, B_g, C_1, ..., C_k)
    /// with the C_j in the prescribed strata and
    /// prod [A_i, B_i] prod C_j = Id. The last puncture matrix is never
    /// enumerated: it is eliminated through the relation and checked for
    /// stratum membership.
    pub fn count_representation_points(
        &self,
        genus: u32,
        punctures: &[PunctureKind],
        work_limit: u64,
    ) -> Result<u128, CountError> {
        for pk in punctures {
            if let PunctureKind::Semisimple(t) = pk {
                assert!(
                    t % self.p != 2 && t % self.p != self.p - 2,
                    "semisimple puncture trace must be regular mod p"
                );
            }
        }
        let strata: Vec<Vec<Mat>> = punctures
            .iter()
            .map(|pk| self.stratum_members(pk))
            .collect();
        let enumerated = strata.len().saturating_sub(1);
        let mut work: u128 = 1;
        for _ in 0..2 * genus {
            work = work.saturating_mul(self.order() as u128);
        }
        for s in strata.iter().take(enumerated) {
            work = work.saturating_mul(s.len() as u128);
        }
        if work > work_limit as u128 {
            return Err(CountError::WorkLimitExceeded {
                needed: work,
                limit: work_limit,
            });
        }

        let mut count = 0u128;
        let mut stack: Vec<Mat> = Vec::new();
        self.count_handles(genus, &strata, &mut stack, IDENT, &mut count);
        Ok(count)
    }

    fn count_handles(
        &self,
        remaining: u32,
        strata: &[Vec<Mat>],
        stack: &mut Vec<Mat>,
        acc: Mat,
        count: &mut u128,
    ) {
        if remaining == 0 {
            self.count_punctures(strata, 0, acc, count);
            return;
        }
        for &a in &self.elements {
            let ai = self.inv(a);
            for &b in &self.elements {
                let comm = self.mul(self.mul(a, b), self.mul(ai, self.inv(b)));
                self.count_handles(remaining - 1, strata, stack, self.mul(acc, comm), count);
            }
        }
        let _ = stack;
    }

    fn count_punctures(&self, strata: &[Vec<Mat>], k: usize, acc: Mat, count: &mut u128) {
        if strata.is_empty() {
            if acc == IDENT {
                *count += 1;
            }
            return;
        }
        if k == strata.len() - 1 {
            // acc * C_last = Id, so C_last is forced; membership decides
            let forced = self.inv(acc);
            if strata[k].contains(&forced) {
                *count += 1;
            }
            return;
        }
        for &c in &strata[k] {
            self.count_punctures(strata, k + 1, self.mul(acc, c), count);
        }
    }

    /// Class product table and commutator distribution, the shared backbone
    /// of the accelerated span counts.
    pub fn tables(&self, work_limit: u64) -> Result<ClassTables, CountError> {
        let ncl = self.classes.len();
        let needed = (ncl as u128) * (self.elements.len() as u128);
        if needed > work_limit as u128 {
            return Err(CountError::WorkLimitExceeded {
                needed,
                limit: work_limit,
            });
        }
        let mut cnt = vec![vec![vec![0u32; ncl]; ncl]; ncl];
        for (ci, info) in self.classes.iter().enumerate() {
            let tgt = &mut cnt[ci];
            for (gi, &g) in self.elements.iter().enumerate() {
                let k1 = self.class_id[gi] as usize;
                let k2 = self.class_of(self.mul(self.inv(g), info.rep)) as usize;
                tgt[k1][k2] += 1;
            }
        }

        // commutator distribution: for g_1 in a class with representative r,
        // the commutators [g_1, g_2] sweep r * (class of r^{-1}) with
        // multiplicity |Z(g_1)|, so each swept element carries mass
        // |Z| * |class| = |G| when summed over the class of g_1
        let order = self.order() as u128;
        let mut mass = vec![0u128; ncl];
        for (k, info) in self.classes.iter().enumerate() {
            let rinv_class = self.inverse_class[k] as usize;
            for &mi in &self.members[rinv_class] {
                let c = self.mul(info.rep, self.elements[mi as usize]);
                mass[self.class_of(c) as usize] += order;
            }
        }
        assert_eq!(mass.iter().sum::<u128>(), order * order);
        let commutator_count: Vec<u64> = mass
            .iter()
            .zip(&self.classes)
            .map(|(&m, info)| {
                assert_eq!(m % info.size as u128, 0, "commutator mass per class");
                (m / info.size as u128) as u64
            })
            .collect();

        Ok(ClassTables {
            cnt,
            commutator_count,
        })
    }

    /// Weight of a core generator on a conjugacy class, as a function on the
    /// group: indicators of the five strata and the three quadratic
    /// characters of the trace supported on the regular locus.
    pub fn core_weight(&self, gen: CoreGen, class: &ClassInfo) -> i64 {
        let theta = matches!(class.profile, ClassProfile::Theta(_));
        match gen {
            CoreGen::T2 => (class.profile == ClassProfile::Id) as i64,
            CoreGen::Tm2 => (class.profile == ClassProfile::MinusId) as i64,
            CoreGen::Tp => (class.profile == ClassProfile::JPlus) as i64,
            CoreGen::Tm => (class.profile == ClassProfile::JMinus) as i64,
            CoreGen::TTheta => theta as i64,
            CoreGen::S2 => {
                if theta {
                    self.chi(class.trace + self.p - 2)
                } else {
                    0
                }
            }
            CoreGen::Sm2 => {
                if theta {
                    self.chi(class.trace + 2)
                } else {
                    0
                }
            }
            CoreGen::S2Sm2 => {
                if theta {
                    self.chi(class.trace * class.trace + 4 * self.p - 4)
                } else {
                    0
                }
            }
        }
    }
}

pub struct ClassTables {
    /// cnt[c][k1][k2] = #{g in class k1 : g^{-1} x in class k2} for a fixed
    /// representative x of class c.
    pub cnt: Vec<Vec<Vec<u32>>>,
    /// Number of pairs (g_1, g_2) with [g_1, g_2] in the given class, per
    /// class element.
    pub commutator_count: Vec<u64>,
}

/// Which tube span to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanKind {
    Handle,
    JordanPlus,
    JordanMinus,
    /// Semisimple tube with the given regular residue trace.
    Semisimple(u64),
}

/// Input weight of a span count: one of the eight core-basis weights, or
/// the indicator of a single regular trace (a skyscraper input).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputWeight {
    Core(CoreGen),
    Sky(u64),
}

/// Weighted span counts of one tube on one input generator, resolved per
/// output stratum. `theta` holds the coefficients of the profile basis
/// {1, chi(t-2), chi(t+2), chi(t^2-4)} over the regular locus; `sky` holds
/// trace-pinned deviations from that profile (present only for the
/// semisimple tube, at the traces +-t0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileCounts {
    pub id: i128,
    pub minus_id: i128,
    pub jplus: i128,
    pub jminus: i128,
    pub theta: [i128; 4],
    pub sky: Vec<(u64, i128)>,
}

impl ProfileCounts {
    /// The counts in core-basis order; sky deviations excluded.
    pub fn core_vector(&self) -> [i128; 8] {
        [
            self.id,
            self.minus_id,
            self.jplus,
            self.jminus,
            self.theta[0],
            self.theta[1],
            self.theta[2],
            self.theta[3],
        ]
    }
}

impl GroupData {
    /// Per-element weighted span count over each output class: the value of
    /// |G| * sum_g w(g) * (number of ways the remaining span factors carry g
    /// to the chosen representative).
    fn span_class_values(
        &self,
        tables: &ClassTables,
        kind: SpanKind,
        input: InputWeight,
    ) -> Vec<i128> {
        let ncl = self.classes.len();
        let order = self.order() as i128;
        let weights: Vec<i64> = self
            .classes
            .iter()
            .map(|c| match input {
                InputWeight::Core(gen) => self.core_weight(gen, c),
                InputWeight::Sky(t) => (c.profile == ClassProfile::Theta(t % self.p)) as i64,
            })
            .collect();
        let target_classes: Vec<usize> = match kind {
            SpanKind::Handle => Vec::new(),
            SpanKind::JordanPlus => vec![2, 3],
            SpanKind::JordanMinus => vec![4, 5],
            SpanKind::Semisimple(t) => {
                let t = t % self.p;
                assert!(
                    t != 2 && t != self.p - 2,
                    "semisimple trace must be regular"
                );
                vec![self
                    .classes
                    .iter()
                    .position(|c| c.profile == ClassProfile::Theta(t))
                    .expect("one regular class per trace")]
            }
        };
        (0..ncl)
            .map(|c| {
                let mut total: i128 = 0;
                for (k1, &w1) in weights.iter().enumerate() {
                    if w1 == 0 {
                        continue;
                    }
                    let inner: i128 = match kind {
                        SpanKind::Handle => (0..ncl)
                            .map(|k2| {
                                tables.cnt[c][k1][k2] as i128 * tables.commutator_count[k2] as i128
                            })
                            .sum(),
                        _ => target_classes
                            .iter()
                            .map(|&k2| tables.cnt[c][k1][k2] as i128)
                            .sum(),
                    };
                    total += w1 as i128 * inner;
                }
                order * total
            })
            .collect()
    }

    /// Stratum-resolved weighted counts of one span on one input weight,
    /// with the regular-locus counts solved against the four
    /// quadratic-character profiles and checked for zero residual at every
    /// regular trace.
    pub fn fiber_profile_counts(
        &self,
        tables: &ClassTables,
        kind: SpanKind,
        input: InputWeight,
    ) -> Result<ProfileCounts, CountError> {
        if let InputWeight::Sky(t) = input {
            let t = t % self.p;
            assert!(
                t != 2 && t != self.p - 2,
                "skyscraper input trace must be regular mod p"
            );
            assert!(
                !matches!(kind, SpanKind::Semisimple(_)),
                "semisimple span counts on skyscraper inputs are not supported"
            );
        }
        let values = self.span_class_values(tables, kind, input);

        // per-element values must agree across the two fine classes of each
        // unipotent stratum: the operators are GL(2)-equivariant
        if values[2] != values[3] || values[4] != values[5] {
            return Err(CountError::ResidualNonzero(self.p));
        }
        let total = |ids: &[usize]| -> i128 {
            ids.iter()
                .map(|&i| values[i] * self.classes[i].size as i128)
                .sum()
        };

        // traces that may legitimately carry skyscraper terms in the output
        let mut excluded: Vec<u64> = match kind {
            SpanKind::Semisimple(t) => {
                let t = t % self.p;
                vec![t, (self.p - t) % self.p]
            }
            SpanKind::Handle | SpanKind::JordanPlus => match input {
                InputWeight::Sky(t) => vec![t % self.p],
                InputWeight::Core(_) => Vec::new(),
            },
            SpanKind::JordanMinus => match input {
                InputWeight::Sky(t) => vec![(self.p - t % self.p) % self.p],
                InputWeight::Core(_) => Vec::new(),
            },
        };
        excluded.sort_unstable();
        excluded.dedup();

        // totals per regular trace, grouped by the sign pattern of
        // (chi(t-2), chi(t+2)); traces carrying skyscraper deviations are
        // withheld from the solve
        let mut sign_totals: [Option<i128>; 4] = [None; 4];
        let mut per_trace: Vec<(u64, i128)> = Vec::new();
        for (i, info) in self.classes.iter().enumerate() {
            let t = match info.profile {
                ClassProfile::Theta(t) => t,
                _ => continue,
            };
            let tot = values[i] * info.size as i128;
            per_trace.push((t, tot));
            if excluded.contains(&t) {
                continue;
            }
            let s2 = self.chi(t + self.p - 2);
            let sm2 = self.chi(t + 2);
            let slot = ((s2 < 0) as usize) * 2 + ((sm2 < 0) as usize);
            match sign_totals[slot] {
                None => sign_totals[slot] = Some(tot),
                Some(prev) if prev != tot => return Err(CountError::ResidualNonzero(self.p)),
                _ => {}
            }
        }
        let [pp, pm, mp, mm] = sign_totals;
        let (pp, pm, mp, mm) = match (pp, pm, mp, mm) {
            (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
            _ => return Err(CountError::ProfileSystemSingular(self.p)),
        };
        // invert the sign matrix {1, chi(t-2), chi(t+2), chi(t^2-4)} over
        // the four sign patterns
        let raw = [
            pp + pm + mp + mm,
            pp + pm - mp - mm,
            pp - pm + mp - mm,
            pp - pm - mp + mm,
        ];
        let mut theta = [0i128; 4];
        for (slot, r) in raw.into_iter().enumerate() {
            if r % 4 != 0 {
                return Err(CountError::ResidualNonzero(self.p));
            }
            theta[slot] = r / 4;
        }
        let mut sky = Vec::new();
        for (t, tot) in per_trace {
            let fit = theta[0]
                + theta[1] * self.chi(t + self.p - 2) as i128
                + theta[2] * self.chi(t + 2) as i128
                + theta[3] * self.chi(t * t + 4 * self.p - 4) as i128;
            let dev = tot - fit;
            if excluded.contains(&t) {
                if dev != 0 {
                    sky.push((t, dev));
                }
            } else if dev != 0 {
                return Err(CountError::ResidualNonzero(self.p));
            }
        }

        Ok(ProfileCounts {
            id: total(&[0]),
            minus_id: total(&[1]),
            jplus: total(&[2, 3]),
            jminus: total(&[4, 5]),
            theta,
            sky,
        })
    }

    /// The full 8x8 numeric core matrix of one tube at q = p: column j is
    /// the profile-count vector of input generator j. Fails if any column
    /// carries an unexplained skyscraper deviation.
    pub fn numeric_tube_matrix(
        &self,
        tables: &ClassTables,
        kind: SpanKind,
    ) -> Result<[[i128; 8]; 8], CountError> {
        let mut m = [[0i128; 8]; 8];
        for (j, gen) in CORE_GENS.iter().enumerate() {
            let counts = self.fiber_profile_counts(tables, kind, InputWeight::Core(*gen))?;
            if !matches!(kind, SpanKind::Semisimple(_)) && !counts.sky.is_empty() {
                return Err(CountError::ResidualNonzero(self.p));
            }
            for (i, v) in counts.core_vector().into_iter().enumerate() {
                m[i][j] = v;
            }
        }
        Ok(m)
    }
}

/// Semisimple puncture traces are residues; Jordan and -Id punctures are
/// stratum tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PunctureKind {
    JordanPlus,
    JordanMinus,
    MinusId,
    Semisimple(u64),
}
