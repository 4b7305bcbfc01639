//! Elements of the module spanned by the eight core generators of the
//! conjugation quotient of SL(2,C) plus skyscraper generators over regular
//! traces, with coefficients in the localized Grothendieck ring.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigen::{EigenError, TraceOrbit};
use crate::kring::LocalizedClass;

/// Core generators in their fixed order: units over {Id}, {-Id}, the two
/// Jordan classes and the regular locus, then the three quadratic-cover
/// classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoreGen {
    T2,
    Tm2,
    Tp,
    Tm,
    TTheta,
    S2,
    Sm2,
    S2Sm2,
}

pub const CORE_GENS: [CoreGen; 8] = [
    CoreGen::T2,
    CoreGen::Tm2,
    CoreGen::Tp,
    CoreGen::Tm,
    CoreGen::TTheta,
    CoreGen::S2,
    CoreGen::Sm2,
    CoreGen::S2Sm2,
];

impl CoreGen {
    pub fn index(self) -> usize {
        CORE_GENS.iter().position(|&g| g == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            CoreGen::T2 => "T2",
            CoreGen::Tm2 => "Tm2",
            CoreGen::Tp => "Tp",
            CoreGen::Tm => "Tm",
            CoreGen::TTheta => "TTheta",
            CoreGen::S2 => "S2",
            CoreGen::Sm2 => "Sm2",
            CoreGen::S2Sm2 => "S2Sm2",
        }
    }

    pub fn from_name(s: &str) -> Option<CoreGen> {
        CORE_GENS.iter().copied().find(|g| g.name() == s)
    }
}

impl fmt::Display for CoreGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKey {
    Core(CoreGen),
    Sky(TraceOrbit),
}

impl fmt::Display for GenKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKey::Core(g) => write!(f, "{g}"),
            GenKey::Sky(o) => write!(f, "T[{o}]"),
        }
    }
}

/// Sparse combination of generators. All skyscraper keys share one eigen
/// backend; zero coefficients are never stored in the sky map.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModuleElement {
    core: [LocalizedClass; 8],
    sky: BTreeMap<TraceOrbit, LocalizedClass>,
}

impl ModuleElement {
    pub fn zero() -> Self {
        ModuleElement::default()
    }

    pub fn core_gen(g: CoreGen) -> Self {
        let mut v = ModuleElement::zero();
        v.core[g.index()] = LocalizedClass::one();
        v
    }

    pub fn sky_gen(orbit: TraceOrbit) -> Self {
        let mut v = ModuleElement::zero();
        v.sky.insert(orbit, LocalizedClass::one());
        v
    }

    pub fn generator(key: GenKey) -> Self {
        match key {
            GenKey::Core(g) => ModuleElement::core_gen(g),
            GenKey::Sky(o) => ModuleElement::sky_gen(o),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.core.iter().all(LocalizedClass::is_zero) && self.sky.is_empty()
    }

    pub fn coefficient_core(&self, g: CoreGen) -> &LocalizedClass {
        &self.core[g.index()]
    }

    pub fn coefficient_of(&self, key: &GenKey) -> LocalizedClass {
        match key {
            GenKey::Core(g) => self.core[g.index()].clone(),
            GenKey::Sky(o) => self
                .sky
                .get(o)
                .cloned()
                .unwrap_or_else(LocalizedClass::zero),
        }
    }

    pub fn sky_terms(&self) -> impl Iterator<Item = (&TraceOrbit, &LocalizedClass)> {
        self.sky.iter()
    }

    fn check_backend(&self, orbit: &TraceOrbit) -> Result<(), EigenError> {
        match self.sky.keys().next() {
            Some(k) if !k.same_backend(orbit) => Err(EigenError::BackendMismatch),
            _ => Ok(()),
        }
    }

    /// self + c * src.
    pub fn add_scaled(
        &self,
        c: &LocalizedClass,
        src: &ModuleElement,
    ) -> Result<ModuleElement, EigenError> {
        let mut out = self.clone();
        out.add_scaled_in_place(c, src)?;
        Ok(out)
    }

    pub fn add_scaled_in_place(
        &mut self,
        c: &LocalizedClass,
        src: &ModuleElement,
    ) -> Result<(), EigenError> {
        if c.is_zero() {
            return Ok(());
        }
        for i in 0..8 {
            if !src.core[i].is_zero() {
                self.core[i] = self.core[i].add(&c.mul(&src.core[i]));
            }
        }
        for (orbit, coeff) in &src.sky {
            self.add_sky_term(orbit, &c.mul(coeff))?;
        }
        Ok(())
    }

    pub fn add_sky_term(
        &mut self,
        orbit: &TraceOrbit,
        coeff: &LocalizedClass,
    ) -> Result<(), EigenError> {
        if coeff.is_zero() {
            return Ok(());
        }
        self.check_backend(orbit)?;
        let entry = self
            .sky
            .entry(orbit.clone())
            .or_insert_with(LocalizedClass::zero);
        *entry = entry.add(coeff);
        if entry.is_zero() {
            self.sky.remove(orbit);
        }
        Ok(())
    }

    pub fn add_core_term(&mut self, g: CoreGen, coeff: &LocalizedClass) {
        self.core[g.index()] = self.core[g.index()].add(coeff);
    }

    pub fn add(&self, other: &ModuleElement) -> Result<ModuleElement, EigenError> {
        self.add_scaled(&LocalizedClass::one(), other)
    }

    pub fn sub(&self, other: &ModuleElement) -> Result<ModuleElement, EigenError> {
        self.add_scaled(&LocalizedClass::from_int(-1), other)
    }

    pub fn scale(&self, c: &LocalizedClass) -> ModuleElement {
        ModuleElement::zero()
            .add_scaled(c, self)
            .expect("scaling keeps backends untouched")
    }

    /// Deterministic iteration: core generators in fixed order, then sky
    /// orbits by canonical-representative order. Zero coefficients skipped.
    pub fn terms(&self) -> Vec<(GenKey, &LocalizedClass)> {
        let mut out = Vec::new();
        for g in CORE_GENS {
            let c = &self.core[g.index()];
            if !c.is_zero() {
                out.push((GenKey::Core(g), c));
            }
        }
        for (o, c) in &self.sky {
            out.push((GenKey::Sky(o.clone()), c));
        }
        out
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (key, coeff)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({coeff})*{key}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    core: BTreeMap<String, LocalizedClass>,
    sky: Vec<SkyRepr>,
}

#[derive(Serialize, Deserialize)]
struct SkyRepr {
    orbit: String,
    coeff: LocalizedClass,
}

impl Serialize for ModuleElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut core = BTreeMap::new();
        for g in CORE_GENS {
            let c = &self.core[g.index()];
            if !c.is_zero() {
                core.insert(g.name().to_string(), c.clone());
            }
        }
        let sky = self
            .sky
            .iter()
            .map(|(o, c)| SkyRepr {
                orbit: o.representative().to_string(),
                coeff: c.clone(),
            })
            .collect();
        ElementRepr { core, sky }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModuleElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(d)?;
        let mut out = ModuleElement::zero();
        for (name, coeff) in repr.core {
            let g = CoreGen::from_name(&name)
                .ok_or_else(|| D::Error::custom(format!("unknown core generator {name:?}")))?;
            out.add_core_term(g, &coeff);
        }
        for term in repr.sky {
            let eig = crate::eigen::EigenClass::parse(&term.orbit)
                .map_err(|e| D::Error::custom(e.to_string()))?;
            let orbit = TraceOrbit::of(&eig).map_err(|e| D::Error::custom(e.to_string()))?;
            out.add_sky_term(&orbit, &term.coeff)
                .map_err(|e| D::Error::custom(e.to_string()))?;
        }
        Ok(out)
    }
}
