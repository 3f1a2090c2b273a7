//! Bookkeeping for reductions to characteristic submanifolds over a closed
//! catalog of model spaces, terminal index evaluation, and the orientation
//! test t-ind(𝔰_X, u).
//!
//! A structure with parameters (n, s⁺, s⁻) and a transverse section of E₋
//! reduces to a structure with parameters (n − s⁻, s⁺, 0) on the zero locus.
//! The catalog stores, for every (structure, section) pair, the zero locus
//! and the spin structure it inherits.

use std::f64::consts::PI;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::group::GroupParams;
use crate::ko::{KOClass, KoError};
use crate::witten::models::{circle_operator, default_circle_fiber, CircleSpin};
use crate::witten::spectrum::spectrum;
use crate::witten::EigenOptions;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LedgerError {
    #[error("structure {0} is terminal (s⁻ = 0)")]
    Terminal(String),
    #[error("structure {0} is not terminal (s⁻ > 0)")]
    NotTerminal(String),
    #[error("unknown section menu entry {menu:?} for {structure}")]
    UnknownMenu { structure: String, menu: String },
    #[error("section {menu:?} on {structure} is not transverse: {reason}")]
    NotTransverse { structure: String, menu: String, reason: String },
    #[error("space tag {0} has no catalog evaluation")]
    OutsideCatalog(String),
    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),
    #[error("unknown gauge transformation {0:?}")]
    UnknownGauge(String),
    #[error("circle evaluation disagrees with the lattice index for {0}")]
    SpectralMismatch(String),
    #[error(transparent)]
    Ko(#[from] KoError),
}

/// Model spaces of the catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceTag {
    Point,
    S1Lie,
    S1Bounding,
    RP2,
    RP2xS1,
    RP3cRP3xS1,
    Product(Box<SpaceTag>, Box<SpaceTag>),
    Empty,
}

impl SpaceTag {
    pub fn product(a: SpaceTag, b: SpaceTag) -> SpaceTag {
        SpaceTag::Product(Box::new(a), Box::new(b))
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            SpaceTag::Point => Some(0),
            SpaceTag::S1Lie | SpaceTag::S1Bounding => Some(1),
            SpaceTag::RP2 => Some(2),
            SpaceTag::RP2xS1 => Some(3),
            SpaceTag::RP3cRP3xS1 => Some(4),
            SpaceTag::Product(a, b) => Some(a.dim()? + b.dim()?),
            SpaceTag::Empty => None,
        }
    }

    /// First Stiefel–Whitney class of the tangent bundle, as a bit.
    pub fn w1(&self) -> u8 {
        match self {
            SpaceTag::RP2 | SpaceTag::RP2xS1 => 1,
            SpaceTag::Product(a, b) => a.w1() ^ b.w1(),
            _ => 0,
        }
    }

    pub fn parse(s: &str) -> Result<SpaceTag, LedgerError> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        if let Some(inner) = lower.strip_prefix("product(").and_then(|r| r.strip_suffix(')')) {
            let mut depth = 0;
            for (i, c) in inner.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        return Ok(SpaceTag::product(SpaceTag::parse(&inner[..i])?, SpaceTag::parse(&inner[i + 1..])?))
                    }
                    _ => {}
                }
            }
        }
        match lower.as_str() {
            "point" | "pt" => Ok(SpaceTag::Point),
            "s1_lie" => Ok(SpaceTag::S1Lie),
            "s1_bounding" => Ok(SpaceTag::S1Bounding),
            "rp2" => Ok(SpaceTag::RP2),
            "rp2xs1" => Ok(SpaceTag::RP2xS1),
            "rp3#rp3xs1" | "rp3crp3xs1" => Ok(SpaceTag::RP3cRP3xS1),
            "empty" => Ok(SpaceTag::Empty),
            _ => Err(LedgerError::UnknownEntry(t.to_string())),
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTag::Point => write!(f, "point"),
            SpaceTag::S1Lie => write!(f, "S1_Lie"),
            SpaceTag::S1Bounding => write!(f, "S1_bounding"),
            SpaceTag::RP2 => write!(f, "RP2"),
            SpaceTag::RP2xS1 => write!(f, "RP2xS1"),
            SpaceTag::RP3cRP3xS1 => write!(f, "RP3#RP3xS1"),
            SpaceTag::Product(a, b) => write!(f, "product({a},{b})"),
            SpaceTag::Empty => write!(f, "empty"),
        }
    }
}

/// A structure over a catalog space, possibly several disjoint copies.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureDescriptor {
    /// Catalog key of the structure.
    pub name: String,
    pub params: GroupParams,
    pub space: SpaceTag,
    /// Number of disjoint copies of `space`.
    pub copies: usize,
    pub e_plus: String,
    pub e_minus: String,
    /// w1 bits of E⁺ and E⁻.
    pub w1_bundles: (u8, u8),
    /// Orientation sign of TY ⊕ E⁺ ⊕ E⁻ (relevant for points).
    pub orientation: i8,
}

impl StructureDescriptor {
    /// KO degree s⁻ − n − s⁺.
    pub fn degree(&self) -> i32 {
        self.params.s_minus as i32 - self.params.n as i32 - self.params.s_plus as i32
    }

    /// k with KO^{-k}.
    pub fn ko_k(&self) -> u32 {
        (-self.degree()).rem_euclid(8) as u32
    }

    /// Parameters agree with the space and TY ⊕ E⁺ ⊕ E⁻ is orientable.
    pub fn is_consistent(&self) -> bool {
        let dim_ok = self.space.dim().is_none_or(|d| d == self.params.n);
        let oriented = self.space.w1() ^ self.w1_bundles.0 ^ self.w1_bundles.1 == 0;
        dim_ok && oriented
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "params": [self.params.n, self.params.s_plus, self.params.s_minus],
            "space": self.space.to_string(),
            "copies": self.copies,
            "E_plus": self.e_plus,
            "E_minus": self.e_minus,
            "orientation": self.orientation,
            "degree": self.degree(),
        })
    }

    fn terminal(name: &str, space: SpaceTag, n: usize, copies: usize) -> Self {
        StructureDescriptor {
            name: name.into(),
            params: GroupParams::new(n, 0, 0),
            space,
            copies,
            e_plus: "0".into(),
            e_minus: "0".into(),
            w1_bundles: (0, 0),
            orientation: 1,
        }
    }
}

/// Catalog structures by key.
pub fn catalog_structure(key: &str) -> Result<StructureDescriptor, LedgerError> {
    let rp2 = || SpaceTag::RP2;
    let d = match key.to_ascii_lowercase().as_str() {
        // 𝔰₀: the spin structure on det T(RP²) ⊕ TS¹ ⊕ T(RP²) ⊕ det T(RP²) ⊕ T(RP²)
        "s0" | "rp2xs1" => StructureDescriptor {
            name: "s0".into(),
            params: GroupParams::new(3, 0, 2),
            space: SpaceTag::RP2xS1,
            copies: 1,
            e_plus: "0".into(),
            e_minus: "pullback of T(RP2)".into(),
            w1_bundles: (0, 1),
            orientation: 1,
        },
        "s0xrp2" | "product(rp2xs1,rp2)" => StructureDescriptor {
            name: "s0xrp2".into(),
            params: GroupParams::new(5, 0, 4),
            space: SpaceTag::product(SpaceTag::RP2xS1, rp2()),
            copies: 1,
            e_plus: "0".into(),
            e_minus: "pullback of T(RP2) ⊞ T(RP2)".into(),
            w1_bundles: (0, 0),
            orientation: 1,
        },
        "torus" | "product(s1_lie,s1_lie)" => StructureDescriptor {
            name: "torus".into(),
            params: GroupParams::new(2, 0, 1),
            space: SpaceTag::product(SpaceTag::S1Lie, SpaceTag::S1Lie),
            copies: 1,
            e_plus: "0".into(),
            e_minus: "trivial line".into(),
            w1_bundles: (0, 0),
            orientation: 1,
        },
        "s1_lie" => StructureDescriptor::terminal("S1_Lie", SpaceTag::S1Lie, 1, 1),
        "s1_bounding" => StructureDescriptor::terminal("S1_bounding", SpaceTag::S1Bounding, 1, 1),
        "point" | "point+" => StructureDescriptor::terminal("point", SpaceTag::Point, 0, 1),
        "point-" => StructureDescriptor { orientation: -1, ..StructureDescriptor::terminal("point-", SpaceTag::Point, 0, 1) },
        "empty" => StructureDescriptor::terminal("empty", SpaceTag::Empty, 1, 0),
        "rp3crp3xs1" | "rp3#rp3xs1" | "x" => StructureDescriptor {
            name: "rp3crp3xs1".into(),
            params: GroupParams::new(4, 0, 2),
            space: SpaceTag::RP3cRP3xS1,
            copies: 1,
            e_plus: "0".into(),
            e_minus: "E of the Spin^{c-} structure".into(),
            w1_bundles: (0, 0),
            orientation: 1,
        },
        other => return Err(LedgerError::UnknownEntry(other.to_string())),
    };
    Ok(d)
}

/// Keys of all catalog structures.
pub const CATALOG: [&str; 9] = ["s0", "s0xrp2", "torus", "s1_lie", "s1_bounding", "point", "point-", "empty", "rp3crp3xs1"];

/// A section of E₋ chosen from the per-structure menu.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionDescriptor {
    pub menu: String,
    pub description: String,
    /// Zero locus of one component and the number of components.
    pub zero_locus: SpaceTag,
    pub components: usize,
    /// Local indices of the zeros on the base surface, when the section is
    /// pulled back from a vector field.
    pub indices: Vec<i32>,
    pub transverse: bool,
    pub reason: Option<String>,
}

impl SectionDescriptor {
    pub fn to_json(&self) -> Value {
        json!({
            "menu": self.menu, "description": self.description, "zero_locus": self.zero_locus.to_string(),
            "components": self.components, "indices": self.indices, "transverse": self.transverse,
        })
    }
}

/// Euler characteristic of RP².
const CHI_RP2: i32 = 1;

fn vector_field_section(menu: &str, description: &str, indices: Vec<i32>, locus: SpaceTag) -> SectionDescriptor {
    let sum: i32 = indices.iter().sum();
    let transverse = sum == CHI_RP2;
    SectionDescriptor {
        menu: menu.into(),
        description: description.into(),
        zero_locus: if indices.is_empty() { SpaceTag::Empty } else { locus },
        components: indices.len(),
        reason: (!transverse).then(|| format!("zero indices sum to {sum}, but a transverse vector field on RP2 has index sum χ(RP2) = {CHI_RP2}")),
        indices,
        transverse,
    }
}

/// Menu entries offered for a catalog structure. Entries that cannot be
/// realized transversally are listed with `transverse = false`.
pub fn section_menu(structure: &StructureDescriptor) -> Vec<SectionDescriptor> {
    match structure.name.as_str() {
        "s0" => vec![
            vector_field_section("one-zero", "pullback of a vector field on RP2 with a single zero", vec![1], SpaceTag::S1Lie),
            vector_field_section(
                "one-zero-alt",
                "pullback of a second single-zero vector field on RP2, zero at another point",
                vec![1],
                SpaceTag::S1Lie,
            ),
            vector_field_section(
                "three-zero",
                "pullback of a vector field on RP2 with zeros of index +1, +1, −1",
                vec![1, 1, -1],
                SpaceTag::S1Lie,
            ),
            vector_field_section("two-zero", "pullback of a vector field on RP2 with two zeros", vec![1, 1], SpaceTag::S1Lie),
        ],
        "s0xrp2" => vec![
            vector_field_section(
                "one-zero",
                "product of single-zero vector fields on both RP2 factors",
                vec![1],
                SpaceTag::S1Lie,
            ),
            vector_field_section(
                "one-zero-alt",
                "single-zero field on the first RP2 factor and a three-zero field on the second",
                vec![1],
                SpaceTag::S1Lie,
            )
            .with_components(3),
        ],
        "torus" => vec![
            SectionDescriptor {
                menu: "nowhere-zero".into(),
                description: "constant section 1".into(),
                zero_locus: SpaceTag::Empty,
                components: 0,
                indices: vec![],
                transverse: true,
                reason: None,
            },
            SectionDescriptor {
                menu: "two-zero".into(),
                description: "sin θ along the second circle factor".into(),
                zero_locus: SpaceTag::S1Lie,
                components: 2,
                indices: vec![1, -1],
                transverse: true,
                reason: None,
            },
        ],
        _ => vec![],
    }
}

impl SectionDescriptor {
    fn with_components(mut self, c: usize) -> Self {
        self.components = c;
        self
    }
}

pub fn find_section(structure: &StructureDescriptor, menu: &str) -> Result<SectionDescriptor, LedgerError> {
    section_menu(structure).into_iter().find(|s| s.menu == menu).ok_or_else(|| LedgerError::UnknownMenu {
        structure: structure.name.clone(),
        menu: menu.to_string(),
    })
}

/// The structure induced on the zero locus of a transverse section.
pub fn reduce_structure(d: &StructureDescriptor, s: &SectionDescriptor) -> Result<StructureDescriptor, LedgerError> {
    if d.params.s_minus == 0 {
        return Err(LedgerError::Terminal(d.name.clone()));
    }
    let entry = find_section(d, &s.menu)?;
    if !entry.transverse {
        return Err(LedgerError::NotTransverse {
            structure: d.name.clone(),
            menu: s.menu.clone(),
            reason: entry.reason.unwrap_or_default(),
        });
    }
    let params = GroupParams::new(d.params.n - d.params.s_minus, d.params.s_plus, 0);
    let copies = d.copies * entry.components;
    let name = if copies == 0 { "empty".to_string() } else { entry.zero_locus.to_string() };
    Ok(StructureDescriptor {
        name,
        params,
        space: if copies == 0 { SpaceTag::Empty } else { entry.zero_locus },
        copies,
        e_plus: d.e_plus.clone(),
        e_minus: "0".into(),
        w1_bundles: (d.w1_bundles.0, 0),
        orientation: d.orientation,
    })
}

/// Lattice cross-check of a circle value: mod-2 index of c(dt)d/dt.
pub fn circle_lattice_index(spin: CircleSpin) -> Result<u8, LedgerError> {
    let op = circle_operator(spin, 32, 2.0 * PI, &default_circle_fiber())
        .map_err(|e| LedgerError::SpectralMismatch(e.to_string()))?;
    let r = spectrum(&op, 4, &EigenOptions::default()).map_err(|e| LedgerError::SpectralMismatch(e.to_string()))?;
    Ok(r.mod2_index)
}

/// Terminal class of a structure with s⁻ = 0, summed over its copies.
pub fn evaluate_index(d: &StructureDescriptor) -> Result<KOClass, LedgerError> {
    if d.params.s_minus != 0 {
        return Err(LedgerError::NotTerminal(d.name.clone()));
    }
    let k = d.ko_k();
    if d.copies == 0 || d.space == SpaceTag::Empty {
        return Ok(KOClass::zero(k));
    }
    let single = match &d.space {
        SpaceTag::S1Lie | SpaceTag::S1Bounding => {
            let (spin, bit) = if d.space == SpaceTag::S1Lie { (CircleSpin::Lie, 1) } else { (CircleSpin::Bounding, 0) };
            if circle_lattice_index(spin)? != bit {
                return Err(LedgerError::SpectralMismatch(d.space.to_string()));
            }
            KOClass::mod2(k, bit)
        }
        SpaceTag::Point => KOClass::integer(k, d.orientation as i64),
        other => return Err(LedgerError::OutsideCatalog(other.to_string())),
    };
    let mut acc = KOClass::zero(k);
    for _ in 0..d.copies {
        acc = acc.add(&single)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerStep {
    pub from: StructureDescriptor,
    pub section: SectionDescriptor,
    pub to: StructureDescriptor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ledger {
    pub start: StructureDescriptor,
    pub steps: Vec<LedgerStep>,
    pub terminal: KOClass,
}

impl Ledger {
    /// s⁻ − n − s⁺ is the same at every step.
    pub fn degree_conserved(&self) -> bool {
        self.steps.iter().all(|s| s.from.degree() == s.to.degree())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start": self.start.to_json(),
            "steps": self.steps.iter().map(|s| json!({
                "from": s.from.to_json(), "section": s.section.to_json(), "to": s.to.to_json(),
            })).collect::<Vec<_>>(),
            "terminal": self.terminal.to_json(),
            "degree_conserved": self.degree_conserved(),
        })
    }

    /// One line per step followed by the terminal class.
    pub fn trace_table(&self) -> String {
        let mut out = String::from("step  from                          section        to                            params\n");
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{:<5} {:<29} {:<14} {:<29} ({},{},{}) -> ({},{},{})\n",
                i + 1,
                s.from.space.to_string(),
                s.section.menu,
                format!("{} x{}", s.to.space, s.to.copies),
                s.from.params.n,
                s.from.params.s_plus,
                s.from.params.s_minus,
                s.to.params.n,
                s.to.params.s_plus,
                s.to.params.s_minus,
            ));
        }
        out.push_str(&format!("terminal: {}\n", self.terminal));
        out
    }
}

/// Applies the sections in order and evaluates the terminal structure.
pub fn run_ledger(d: &StructureDescriptor, sections: &[&str]) -> Result<Ledger, LedgerError> {
    let mut cur = d.clone();
    let mut steps = Vec::new();
    for menu in sections {
        let section = find_section(&cur, menu).or_else(|e| {
            if cur.params.s_minus == 0 {
                Err(LedgerError::Terminal(cur.name.clone()))
            } else {
                Err(e)
            }
        })?;
        let next = reduce_structure(&cur, &section)?;
        steps.push(LedgerStep { from: cur.clone(), section, to: next.clone() });
        cur = next;
    }
    let terminal = evaluate_index(&cur)?;
    Ok(Ledger { start: d.clone(), steps, terminal })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceRow {
    pub structure: String,
    pub menus: Vec<String>,
    pub classes: Vec<String>,
    pub agree: bool,
}

/// For every catalog structure with at least two transverse menu entries,
/// the terminal classes of the one-step ledgers.
pub fn section_independence() -> Result<Vec<IndependenceRow>, LedgerError> {
    let mut rows = Vec::new();
    for key in CATALOG {
        let d = catalog_structure(key)?;
        let menus: Vec<SectionDescriptor> = section_menu(&d).into_iter().filter(|s| s.transverse).collect();
        if menus.len() < 2 {
            continue;
        }
        let mut classes = Vec::new();
        for m in &menus {
            classes.push(run_ledger(&d, &[m.menu.as_str()])?.terminal);
        }
        rows.push(IndependenceRow {
            structure: d.name.clone(),
            menus: menus.iter().map(|m| m.menu.clone()).collect(),
            agree: classes.windows(2).all(|w| w[0] == w[1]),
            classes: classes.iter().map(KOClass::value_string).collect(),
        });
    }
    Ok(rows)
}

/// Gauge transformations u on the catalog 4-manifold, described by the
/// structure induced on u⁻¹(−1).
pub fn gauge_locus(x: &StructureDescriptor, u: &str) -> Result<StructureDescriptor, LedgerError> {
    if x.space != SpaceTag::RP3cRP3xS1 {
        return Err(LedgerError::OutsideCatalog(format!("no gauge transformations recorded on {}", x.space)));
    }
    match u {
        // u = −exp(iπ f) from the gluing construction: u⁻¹(−1) = RP²×S¹ with 𝔰₀
        "standard" => catalog_structure("s0"),
        "trivial" | "identity" => Ok(StructureDescriptor {
            name: "empty".into(),
            params: GroupParams::new(3, 0, 2),
            space: SpaceTag::Empty,
            copies: 0,
            e_plus: "0".into(),
            e_minus: "0".into(),
            w1_bundles: (0, 0),
            orientation: 1,
        }),
        other => Err(LedgerError::UnknownGauge(other.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TIndex {
    pub value: u8,
    pub locus: StructureDescriptor,
    pub ledger: Option<Ledger>,
}

impl TIndex {
    pub fn summary(&self) -> String {
        if self.value == 1 {
            "1 (non-orientable)".into()
        } else {
            "0 (orientable)".into()
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.value == 1 {
            "determinant bundle non-orientable"
        } else {
            "determinant bundle orientable along u"
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "t_ind": self.value,
            "summary": self.summary(),
            "verdict": self.verdict(),
            "locus": self.locus.to_json(),
            "ledger": self.ledger.as_ref().map(Ledger::to_json),
        })
    }
}

/// t-ind(𝔰_X, u) ∈ Ω₁^Spin(pt) ≅ Z/2: the index of the structure induced on
/// h⁻¹(0) ∩ u⁻¹(−1), which equals the index of the G⁺(3,0,2) structure on
/// u⁻¹(−1).
pub fn t_ind(x: &StructureDescriptor, u: &str, h: &str) -> Result<TIndex, LedgerError> {
    let locus = gauge_locus(x, u)?;
    if locus.copies == 0 {
        return Ok(TIndex { value: 0, locus, ledger: None });
    }
    let ledger = run_ledger(&locus, &[h])?;
    let value = match ledger.terminal.value {
        crate::ko::KOValue::Mod2(b) => b,
        _ => return Err(LedgerError::OutsideCatalog("terminal class outside KO^{-1}".into())),
    };
    Ok(TIndex { value, locus, ledger: Some(ledger) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ko::KOValue;

    #[test]
    fn s0_reduces_to_the_lie_circle() {
        let d = catalog_structure("s0").unwrap();
        assert!(d.is_consistent());
        let l = run_ledger(&d, &["one-zero"]).unwrap();
        assert_eq!(l.steps[0].to.space, SpaceTag::S1Lie);
        assert_eq!(l.steps[0].to.params, GroupParams::new(1, 0, 0));
        assert_eq!(l.terminal, KOClass::mod2(1, 1));
        assert!(l.degree_conserved());
    }

    #[test]
    fn five_four_entry_keeps_degree() {
        let d = catalog_structure("s0xrp2").unwrap();
        assert!(d.is_consistent());
        let l = run_ledger(&d, &["one-zero"]).unwrap();
        assert_eq!(l.steps[0].to.params, GroupParams::new(1, 0, 0));
        assert_eq!(l.terminal.degree, -1);
        assert_eq!(d.degree(), -1);
    }

    #[test]
    fn terminal_values() {
        let ev = |k: &str| evaluate_index(&catalog_structure(k).unwrap()).unwrap();
        assert_eq!(ev("s1_lie").value, KOValue::Mod2(1));
        assert_eq!(ev("s1_bounding").value, KOValue::Mod2(0));
        assert_eq!(ev("point").value_string(), "Z:1");
        assert_eq!(ev("point-").value_string(), "Z:-1");
        assert!(ev("empty").is_zero());
        assert!(matches!(evaluate_index(&catalog_structure("s0").unwrap()), Err(LedgerError::NotTerminal(_))));
    }

    #[test]
    fn empty_section_gives_zero() {
        let l = run_ledger(&catalog_structure("torus").unwrap(), &["nowhere-zero"]).unwrap();
        assert_eq!(l.steps[0].to.space, SpaceTag::Empty);
        assert_eq!(l.terminal, KOClass::mod2(1, 0));
    }

    #[test]
    fn sections_agree_on_every_entry() {
        let rows = section_independence().unwrap();
        assert!(rows.len() >= 3);
        assert!(rows.iter().all(|r| r.agree), "{rows:?}");
    }

    #[test]
    fn two_zero_field_on_rp2_is_rejected() {
        let d = catalog_structure("s0").unwrap();
        assert!(matches!(run_ledger(&d, &["two-zero"]), Err(LedgerError::NotTransverse { .. })));
        assert!(matches!(run_ledger(&d, &["spiral"]), Err(LedgerError::UnknownMenu { .. })));
    }

    #[test]
    fn terminal_structures_cannot_reduce() {
        let d = catalog_structure("s1_lie").unwrap();
        assert!(matches!(run_ledger(&d, &["one-zero"]), Err(LedgerError::Terminal(_))));
    }

    #[test]
    fn orientation_example() {
        let x = catalog_structure("rp3crp3xs1").unwrap();
        let t = t_ind(&x, "standard", "one-zero").unwrap();
        assert_eq!(t.summary(), "1 (non-orientable)");
        assert_eq!(t.verdict(), "determinant bundle non-orientable");
        assert_eq!(t_ind(&x, "trivial", "one-zero").unwrap().value, 0);
        assert_eq!(t_ind(&x, "standard", "three-zero").unwrap().value, 1);
        assert!(t_ind(&x, "standard", "two-zero").is_err());
    }

    #[test]
    fn tags_parse() {
        assert_eq!(SpaceTag::parse("product(S1_Lie,rp2)").unwrap(), SpaceTag::product(SpaceTag::S1Lie, SpaceTag::RP2));
        assert_eq!(SpaceTag::parse("rp3crp3xs1").unwrap(), SpaceTag::RP3cRP3xS1);
        assert!(SpaceTag::parse("klein").is_err());
        for key in CATALOG {
            assert!(catalog_structure(key).unwrap().is_consistent(), "{key}");
        }
    }
}
