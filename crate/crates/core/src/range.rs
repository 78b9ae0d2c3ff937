//! Closed-range classification of `M_u` and `C_T`.

use serde::Serialize;

use crate::error::Result;
use crate::measure::{radon_nikodym, Continuum, Formula, MeasurableFunction, MeasureSpace, Realized, Transformation};
use crate::operators::{comp_necessary, mult_necessary, Setting};
use crate::orlicz::{luxemburg_norm_realized, member_realized, pointwise_inverse};
use crate::verdict::LogEntry;
use crate::young::{check_growth, check_triple_inequality, Condition, YoungFunction, DEFAULT_CAP};

/// Families shorter than this are treated as finite lists.
const MIN_FAMILY: usize = 20;
/// Shrinking test sets listed in a non-closedness witness.
const WITNESS_SETS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `Φ₂(xy) ≤ Φ₁(x) + Φ₃(y)` with the symbol in `L^{Φ₃}`.
    A,
    /// `Φ₁(xy) ≤ Φ₂(x) + Φ₃(y)` with the reciprocal symbol in `L^{Φ₃}`.
    B,
}

/// `‖T χ_E‖ / ‖χ_E‖` along shrinking sets `E`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeWitness {
    pub sets: Vec<String>,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum RangeClass {
    FiniteRank { rank: usize },
    NotClosedRange { regime: Regime, witness: RangeWitness },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeReport {
    pub class: RangeClass,
    pub log: Vec<LogEntry>,
}

impl RangeReport {
    fn new(class: RangeClass, log: Vec<LogEntry>) -> Self {
        Self { class, log }
    }

    pub fn is_finite_rank(&self) -> bool {
        matches!(self.class, RangeClass::FiniteRank { .. })
    }

    pub fn is_not_closed(&self) -> bool {
        matches!(self.class, RangeClass::NotClosedRange { .. })
    }
}

fn note(log: &mut Vec<LogEntry>, criterion: &str, outcome: impl Into<String>, value: Option<f64>) {
    log.push(LogEntry {
        criterion: criterion.into(),
        outcome: outcome.into(),
        value,
    });
}

/// Atoms where `vals ≠ 0`, and whether nonzero values persist into the last
/// nine tenths of the realized family.
#[derive(Debug, Clone, PartialEq)]
struct Support {
    atoms: Vec<usize>,
    growing: bool,
}

fn support(r: &Realized, vals: &[f64]) -> Support {
    let atoms: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] != 0.0).collect();
    let fam = r.family_len();
    let split = r.explicit + fam.div_ceil(10);
    let growing = fam >= MIN_FAMILY && !r.underflow && atoms.iter().any(|&i| i >= split);
    Support { atoms, growing }
}

fn triple_holds(l: &YoungFunction, f: &YoungFunction, s: &YoungFunction, st: &Setting) -> bool {
    check_triple_inequality(l, f, s, st.grid).holds()
}

fn global(phi: &YoungFunction, c: Condition, st: &Setting) -> bool {
    check_growth(phi, c, st.grid, DEFAULT_CAP).is_global()
}

/// Atoms of the support picked along the family at decade positions, or the
/// whole explicit support when there is no family.
fn witness_atoms(sup: &Support) -> Vec<usize> {
    let n = sup.atoms.len();
    let mut picks: Vec<usize> = (0..)
        .map(|k| 10usize.pow(k).min(n) - 1)
        .take_while(|&i| i + 1 < n)
        .collect();
    picks.push(n - 1);
    picks.dedup();
    let skip = picks.len().saturating_sub(WITNESS_SETS);
    picks.into_iter().skip(skip).map(|i| sup.atoms[i]).collect()
}

/// `‖u χ_E‖_{Φ₂} / ‖χ_E‖_{Φ₁}` for shrinking intervals inside `[a, b]`.
#[allow(clippy::too_many_arguments)]
fn continuum_ratios(
    space: &MeasureSpace,
    g: &Formula,
    (a, b): (f64, f64),
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    st: &Setting,
) -> Result<RangeWitness> {
    let c = space.continuum().expect("support lies in the continuum");
    let mid = 0.5 * (a + b);
    let mut w = RangeWitness {
        sets: Vec::new(),
        ratios: Vec::new(),
    };
    // Each set is integrated as a space of its own so the quadrature sees it.
    for k in 1..=WITNESS_SETS as i32 {
        let h = 0.5 * (b - a) * 10f64.powi(-k);
        let (lo, hi) = (mid - h, mid + h);
        let sub = MeasureSpace::new(
            vec![],
            None,
            Some(Continuum {
                a: lo,
                b: hi,
                density: c.density.clone(),
            }),
        )?;
        let sr = sub.realize(&st.budget)?;
        let ind = MeasurableFunction::new(vec![], None, Some(Formula::constant(1.0)));
        let img = MeasurableFunction::new(vec![], None, Some(g.clone()));
        let d = luxemburg_norm_realized(&sub, &sr, &ind, None, phi1, st.tol, &st.budget)?.value;
        let n = luxemburg_norm_realized(&sub, &sr, &img, None, phi2, st.tol, &st.budget)?.value;
        w.sets.push(format!("[{lo}, {hi}]"));
        w.ratios.push(n / d);
    }
    Ok(w)
}

/// Classifies the range of `M_u: L^{Φ₁} → L^{Φ₂}`.
///
/// Finite support with `u = 0` on the continuum gives finite rank outright.
/// Otherwise the range is not closed when one of the regimes applies: A
/// (`Φ₁ ∈ Δ′`, `Φ₂(xy) ≤ Φ₁(x) + Φ₃(y)`, `u ∈ L^{Φ₃}`) or B (`Φ₂ ∈ Δ′`,
/// `Φ₁(xy) ≤ Φ₂(x) + Φ₃(y)`, `1/u ∈ L^{Φ₃}` on the support, `M_u` not
/// refuted).
pub fn classify_mult(
    space: &MeasureSpace,
    u: &MeasurableFunction,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: Option<&YoungFunction>,
    st: &Setting,
) -> Result<RangeReport> {
    u.check(space)?;
    let r = space.realize(&st.budget)?;
    let vals = u.atom_values(&r)?;
    let sup = support(&r, &vals);
    let cont = crate::operators::continuum_support(space, u.continuum_formula());
    let mut log = Vec::new();
    note(&mut log, "support_atoms", if sup.growing { "growing" } else { "finite" }, Some(sup.atoms.len() as f64));
    note(&mut log, "continuum_support", if cont.is_some() { "nonzero" } else { "zero" }, None);
    if !sup.growing && cont.is_none() {
        return Ok(RangeReport::new(RangeClass::FiniteRank { rank: sup.atoms.len() }, log));
    }
    let Some(phi3) = phi3 else {
        return Ok(RangeReport::new(
            RangeClass::Inconclusive {
                reason: "infinite support needs phi3 for either regime".into(),
            },
            log,
        ));
    };
    let regime_a = global(phi1, Condition::DeltaPrime, st)
        && triple_holds(phi2, phi1, phi3, st)
        && member_realized(space, &r, u, phi3, &st.budget)?.member;
    note(&mut log, "regime_a", if regime_a { "holds" } else { "fails" }, None);
    let regime = if regime_a {
        Some(Regime::A)
    } else {
        let reciprocal = u.map("1/u", |v| if v == 0.0 { 0.0 } else { 1.0 / v });
        let b = global(phi2, Condition::DeltaPrime, st)
            && triple_holds(phi1, phi2, phi3, st)
            && member_realized(space, &r, &reciprocal, phi3, &st.budget)?.member;
        note(&mut log, "regime_b", if b { "holds" } else { "fails" }, None);
        if b {
            let nec = mult_necessary(space, u, phi1, phi2, phi3, st)?;
            if nec.is_refuted() {
                return Ok(RangeReport::new(
                    RangeClass::Inconclusive {
                        reason: "M_u is not bounded, so its range is not classified".into(),
                    },
                    log,
                ));
            }
            Some(Regime::B)
        } else {
            None
        }
    };
    let Some(regime) = regime else {
        return Ok(RangeReport::new(
            RangeClass::Inconclusive {
                reason: "neither regime's preconditions hold".into(),
            },
            log,
        ));
    };
    let witness = match (cont, u.continuum_formula()) {
        (Some(ab), Some(g)) => continuum_ratios(space, g, ab, phi1, phi2, st)?,
        _ => {
            let picks = witness_atoms(&sup);
            RangeWitness {
                sets: picks.iter().map(|&i| atom_label(space, &r, i)).collect(),
                ratios: picks
                    .iter()
                    .map(|&i| vals[i].abs() * phi2.inverse_ln(-r.masses[i].ln()).recip() * phi1.inverse_ln(-r.masses[i].ln()))
                    .collect(),
            }
        }
    };
    Ok(RangeReport::new(RangeClass::NotClosedRange { regime, witness }, log))
}

fn atom_label(space: &MeasureSpace, r: &Realized, i: usize) -> String {
    if i < r.explicit {
        space.atoms()[i].id.clone()
    } else {
        let prefix = space.family().map_or("", |f| f.prefix.as_str());
        format!("{prefix}{}", r.family_n[i - r.explicit])
    }
}

/// Classifies the range of `C_T: L^{Φ₁} → L^{Φ₂}` through
/// `E_T = {n : μT⁻¹(A_n) > 0}` and `f₀` on the continuum.
///
/// Regime A needs `Φ₁ ∈ Δ′`, `Φ₂ ∈ ∇′`, `Φ₂(xy) ≤ Φ₁(x) + Φ₃(y)`,
/// `Φ₂⁻¹(f₀) ∈ L^{Φ₃}` and `T` onto the atoms; regime B needs
/// `Φ₁(xy) ≤ Φ₂(x) + Φ₃(y)`, `Φ₂ ∈ ∇′ ∩ Δ₂` and `C_T` not refuted.
pub fn classify_comp(
    space: &MeasureSpace,
    t: &Transformation,
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: Option<&YoungFunction>,
    st: &Setting,
) -> Result<RangeReport> {
    let (r, f0) = radon_nikodym(space, t, &st.budget)?;
    let push = t.pushforward(&r);
    let sup = support(&r, &push);
    let cont = crate::operators::continuum_support(space, t.continuum_weight());
    let mut log = Vec::new();
    note(&mut log, "e_t", if sup.growing { "growing" } else { "finite" }, Some(sup.atoms.len() as f64));
    note(&mut log, "f0_on_continuum", if cont.is_some() { "nonzero" } else { "zero" }, None);
    if !sup.growing && cont.is_none() {
        return Ok(RangeReport::new(RangeClass::FiniteRank { rank: sup.atoms.len() }, log));
    }
    let Some(phi3) = phi3 else {
        return Ok(RangeReport::new(
            RangeClass::Inconclusive {
                reason: "infinite E_T or continuum mass needs phi3 for either regime".into(),
            },
            log,
        ));
    };
    let onto = t.surjective_on_atoms(&r);
    note(&mut log, "t_onto_atoms", if onto { "yes" } else { "no" }, None);
    let regime_a = onto
        && global(phi1, Condition::DeltaPrime, st)
        && global(phi2, Condition::NablaPrime, st)
        && triple_holds(phi2, phi1, phi3, st)
        && member_realized(space, &r, &pointwise_inverse(&f0, phi2), phi3, &st.budget)?.member;
    note(&mut log, "regime_a", if regime_a { "holds" } else { "fails" }, None);
    let regime = if regime_a {
        Some(Regime::A)
    } else {
        let b = triple_holds(phi1, phi2, phi3, st)
            && global(phi2, Condition::NablaPrime, st)
            && check_growth(phi2, Condition::Delta2, st.grid, DEFAULT_CAP).holds();
        note(&mut log, "regime_b", if b { "holds" } else { "fails" }, None);
        if b {
            if crate::operators::soften(comp_necessary(space, t, phi1, phi2, st))?.is_refuted() {
                return Ok(RangeReport::new(
                    RangeClass::Inconclusive {
                        reason: "C_T is not bounded, so its range is not classified".into(),
                    },
                    log,
                ));
            }
            Some(Regime::B)
        } else {
            None
        }
    };
    let Some(regime) = regime else {
        return Ok(RangeReport::new(
            RangeClass::Inconclusive {
                reason: "neither regime's preconditions hold".into(),
            },
            log,
        ));
    };
    let witness = match (cont, t.continuum_weight()) {
        (Some(ab), Some(w)) => {
            let p2 = phi2.clone();
            let g = w.map("phi2^-1(f0)", move |v| p2.inverse(v, crate::young::DEFAULT_TOL));
            continuum_ratios(space, &g, ab, phi1, phi2, st)?
        }
        _ => {
            let picks = witness_atoms(&sup);
            RangeWitness {
                sets: picks.iter().map(|&i| atom_label(space, &r, i)).collect(),
                ratios: picks
                    .iter()
                    .map(|&i| phi1.inverse_ln(-r.masses[i].ln()) / phi2.inverse_ln(-push[i].ln()))
                    .collect(),
            }
        }
    };
    Ok(RangeReport::new(RangeClass::NotClosedRange { regime, witness }, log))
}

/// Spanning vectors of the range on the realized atoms: `χ_{A_i}` over the
/// support of `u`.
pub fn mult_range_span(space: &MeasureSpace, u: &MeasurableFunction, st: &Setting) -> Result<Vec<Vec<f64>>> {
    let r = space.realize(&st.budget)?;
    let vals = u.atom_values(&r)?;
    Ok(support(&r, &vals)
        .atoms
        .into_iter()
        .map(|i| {
            let mut v = vec![0.0; r.len()];
            v[i] = 1.0;
            v
        })
        .collect())
}

/// Spanning vectors of the range of `C_T` on the realized atoms:
/// `χ_{T⁻¹(A_n)}` for `n ∈ E_T`.
pub fn comp_range_span(space: &MeasureSpace, t: &Transformation, st: &Setting) -> Result<Vec<Vec<f64>>> {
    let (r, _) = radon_nikodym(space, t, &st.budget)?;
    let images = t.images(&r);
    let push = t.pushforward(&r);
    Ok(support(&r, &push)
        .atoms
        .into_iter()
        .map(|n| images.iter().map(|&j| if j == Some(n) { 1.0 } else { 0.0 }).collect())
        .collect())
}
