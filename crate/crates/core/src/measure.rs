//! σ-finite measure spaces: explicit atoms, an optional generated atom
//! family truncated at a budget, and an optional interval with a density.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{self, Integral};
use crate::trend::{series_trend, Budget, SeriesSum};

/// Number of grid points used for suprema over the continuum.
pub const CONTINUUM_GRID: usize = 4096;

type Eval = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A real formula in `(x, n)`: `x` is a point of the continuum or the point
/// attached to an atom, `n` the index of a generated atom (NaN when absent).
#[derive(Clone)]
pub struct Formula {
    label: String,
    eval: Eval,
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({})", self.label)
    }
}

impl Formula {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    pub fn of_x<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, move |x, _| f(x))
    }

    pub fn of_n<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, move |_, n| f(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_, _| c)
    }

    pub fn eval(&self, x: f64, n: f64) -> f64 {
        (self.eval)(x, n)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `g ∘ self`.
    pub fn map<G>(&self, name: &str, g: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        Self::new(format!("{name}({})", self.label), move |x, n| g(inner(x, n)))
    }

    pub fn product(&self, other: &Formula) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self::new(format!("({})*({})", self.label, other.label), move |x, n| {
            a(x, n) * b(x, n)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub id: String,
    pub mass: f64,
    /// Optional representative point, e.g. `ln n` for the atom `{ln n}`.
    pub point: Option<f64>,
}

impl Atom {
    pub fn new(id: impl Into<String>, mass: f64) -> Self {
        Self {
            id: id.into(),
            mass,
            point: None,
        }
    }

    pub fn at(id: impl Into<String>, mass: f64, point: f64) -> Self {
        Self {
            id: id.into(),
            mass,
            point: Some(point),
        }
    }
}

/// Atoms `A_n`, `n = start, start+1, ...`, with formula masses and points.
#[derive(Debug, Clone)]
pub struct AtomFamily {
    pub prefix: String,
    pub start: u64,
    pub mass: Formula,
    pub point: Option<Formula>,
}

#[derive(Debug, Clone)]
pub struct Continuum {
    pub a: f64,
    pub b: f64,
    /// Density with respect to Lebesgue measure; `None` means 1.
    pub density: Option<Formula>,
}

impl Continuum {
    pub fn lebesgue(a: f64, b: f64) -> Self {
        Self { a, b, density: None }
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.density.as_ref().map_or(1.0, |d| d.eval(x, f64::NAN))
    }

    /// Evenly spaced sample points including both endpoints.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        let n = points.max(2);
        (0..n)
            .map(|i| self.a + (self.b - self.a) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct MeasureSpace {
    atoms: Vec<Atom>,
    family: Option<AtomFamily>,
    continuum: Option<Continuum>,
}

/// The atoms of a space realized under a budget; global atom indices run
/// over explicit atoms first, then generated members in order.
#[derive(Debug, Clone)]
pub struct Realized {
    pub masses: Vec<f64>,
    pub points: Vec<Option<f64>>,
    pub explicit: usize,
    /// Family index `n` of each generated member.
    pub family_n: Vec<u64>,
    /// True when generation stopped because masses underflowed.
    pub underflow: bool,
}

impl Realized {
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn family_len(&self) -> usize {
        self.family_n.len()
    }

    /// `n` for global index `i` (NaN for explicit atoms).
    pub fn n_of(&self, i: usize) -> f64 {
        if i < self.explicit {
            f64::NAN
        } else {
            self.family_n[i - self.explicit] as f64
        }
    }

    fn index_of(&self, r: AtomRef) -> Option<usize> {
        match r {
            AtomRef::Explicit(i) => (i < self.explicit).then_some(i),
            AtomRef::Member(n) => {
                let first = *self.family_n.first()?;
                let k = n.checked_sub(first)? as usize;
                (k < self.family_n.len()).then_some(self.explicit + k)
            }
        }
    }

    /// Splits a per-atom vector into (explicit, family) slices.
    pub fn split<'a>(&self, v: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        v.split_at(self.explicit)
    }
}

impl MeasureSpace {
    pub fn new(atoms: Vec<Atom>, family: Option<AtomFamily>, continuum: Option<Continuum>) -> Result<Self> {
        let mut seen = HashSet::new();
        for a in &atoms {
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "atom {} has mass {}; masses must be positive and finite",
                    a.id, a.mass
                )));
            }
            if !seen.insert(a.id.clone()) {
                return Err(Error::InvalidParameter(format!("duplicate atom id {}", a.id)));
            }
        }
        if let Some(c) = &continuum {
            if !(c.a.is_finite() && c.b.is_finite() && c.a < c.b) {
                return Err(Error::InvalidParameter(format!(
                    "continuum interval [{}, {}] must be finite and nonempty",
                    c.a, c.b
                )));
            }
            if let Some(d) = &c.density {
                for x in c.grid(64) {
                    let v = d.eval(x, f64::NAN);
                    if v < 0.0 {
                        return Err(Error::InvalidParameter(format!(
                            "density {} is negative at {x}",
                            d.label()
                        )));
                    }
                }
            }
        }
        Ok(Self {
            atoms,
            family,
            continuum,
        })
    }

    /// Purely atomic space with ids `A1, A2, ...`.
    pub fn atomic(masses: &[f64]) -> Result<Self> {
        let atoms = masses
            .iter()
            .enumerate()
            .map(|(i, &m)| Atom::new(format!("A{}", i + 1), m))
            .collect();
        Self::new(atoms, None, None)
    }

    pub fn with_continuum(mut self, c: Continuum) -> Result<Self> {
        self.continuum = Some(c);
        Self::new(self.atoms, self.family, self.continuum)
    }

    pub fn with_family(mut self, f: AtomFamily) -> Self {
        self.family = Some(f);
        self
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn family(&self) -> Option<&AtomFamily> {
        self.family.as_ref()
    }

    pub fn continuum(&self) -> Option<&Continuum> {
        self.continuum.as_ref()
    }

    pub fn is_purely_atomic(&self) -> bool {
        self.continuum.is_none()
    }

    pub fn atom_index(&self, id: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.id == id)
    }

    /// Realizes explicit atoms plus up to `budget.n` family members, stopping
    /// early once generated masses underflow.
    pub fn realize(&self, budget: &Budget) -> Result<Realized> {
        let mut r = Realized {
            masses: self.atoms.iter().map(|a| a.mass).collect(),
            points: self.atoms.iter().map(|a| a.point).collect(),
            explicit: self.atoms.len(),
            family_n: Vec::new(),
            underflow: false,
        };
        if let Some(f) = &self.family {
            for k in 0..budget.n as u64 {
                let n = f.start + k;
                let m = f.mass.eval(f64::NAN, n as f64);
                if m.is_nan() || m < 0.0 || m.is_infinite() {
                    return Err(Error::InvalidParameter(format!(
                        "family mass {} gives {m} at n={n}",
                        f.mass.label()
                    )));
                }
                if m < f64::MIN_POSITIVE {
                    r.underflow = true;
                    break;
                }
                r.masses.push(m);
                r.points.push(f.point.as_ref().map(|p| p.eval(f64::NAN, n as f64)));
                r.family_n.push(n);
            }
        }
        Ok(r)
    }
}

/// A function constant on each atom, with a formula for generated atoms and
/// an evaluator on the continuum.
#[derive(Debug, Clone)]
pub struct MeasurableFunction {
    explicit: Vec<f64>,
    family: Option<Formula>,
    continuum: Option<Formula>,
}

impl MeasurableFunction {
    pub fn new(explicit: Vec<f64>, family: Option<Formula>, continuum: Option<Formula>) -> Self {
        Self {
            explicit,
            family,
            continuum,
        }
    }

    /// Values on the explicit atoms only.
    pub fn atomic(values: Vec<f64>) -> Self {
        Self::new(values, None, None)
    }

    /// The formula evaluated at each atom's point (or index) and on the continuum.
    pub fn from_formula(space: &MeasureSpace, f: &Formula) -> Result<Self> {
        let explicit = space
            .atoms
            .iter()
            .map(|a| {
                let v = f.eval(a.point.unwrap_or(f64::NAN), f64::NAN);
                if v.is_nan() {
                    Err(Error::InvalidParameter(format!(
                        "{} is undefined on atom {}",
                        f.label(),
                        a.id
                    )))
                } else {
                    Ok(v)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let family = space.family.as_ref().map(|fam| {
            let point = fam.point.clone();
            let g = f.clone();
            Formula::new(f.label().to_string(), move |_, n| {
                let x = point.as_ref().map_or(f64::NAN, |p| p.eval(f64::NAN, n));
                g.eval(x, n)
            })
        });
        let continuum = space.continuum.as_ref().map(|_| f.clone());
        Ok(Self::new(explicit, family, continuum))
    }

    pub fn constant(space: &MeasureSpace, c: f64) -> Self {
        Self::new(
            vec![c; space.atoms.len()],
            space.family.as_ref().map(|_| Formula::constant(c)),
            space.continuum.as_ref().map(|_| Formula::constant(c)),
        )
    }

    pub fn zero(space: &MeasureSpace) -> Self {
        Self::constant(space, 0.0)
    }

    /// `χ` of a set of realized atoms, optionally with the whole continuum.
    pub fn indicator(space: &MeasureSpace, r: &Realized, atoms: &[usize], continuum: bool) -> Self {
        let mut values = vec![0.0; r.len()];
        for &i in atoms {
            values[i] = 1.0;
        }
        let mut f = Self::from_realized(space, r, values, None);
        if continuum && space.continuum.is_some() {
            f.continuum = Some(Formula::constant(1.0));
        }
        f
    }

    /// Builds a function from per-atom values on a realization; family members
    /// beyond the realization get 0.
    pub fn from_realized(space: &MeasureSpace, r: &Realized, values: Vec<f64>, continuum: Option<Formula>) -> Self {
        let explicit = values[..r.explicit].to_vec();
        let family = space.family.as_ref().map(|_| {
            let table: Arc<Vec<f64>> = Arc::new(values[r.explicit..].to_vec());
            let first = r.family_n.first().copied().unwrap_or(0);
            Formula::new("table", move |_, n| {
                let k = n - first as f64;
                if k >= 0.0 && (k as usize) < table.len() {
                    table[k as usize]
                } else {
                    0.0
                }
            })
        });
        let continuum = match (&space.continuum, continuum) {
            (Some(_), Some(c)) => Some(c),
            (Some(_), None) => Some(Formula::constant(0.0)),
            (None, _) => None,
        };
        Self::new(explicit, family, continuum)
    }

    pub fn explicit_values(&self) -> &[f64] {
        &self.explicit
    }

    pub fn family_formula(&self) -> Option<&Formula> {
        self.family.as_ref()
    }

    pub fn continuum_formula(&self) -> Option<&Formula> {
        self.continuum.as_ref()
    }

    /// Value on the continuum at `x` (0 without a continuum part).
    pub fn at(&self, x: f64) -> f64 {
        self.continuum.as_ref().map_or(0.0, |c| c.eval(x, f64::NAN))
    }

    pub fn check(&self, space: &MeasureSpace) -> Result<()> {
        if self.explicit.len() != space.atoms.len() {
            return Err(Error::SpaceMismatch(format!(
                "function has {} atom values, space has {} atoms",
                self.explicit.len(),
                space.atoms.len()
            )));
        }
        if space.family.is_some() && self.family.is_none() {
            return Err(Error::SpaceMismatch("function has no rule for the generated atoms".into()));
        }
        if space.continuum.is_some() != self.continuum.is_some() {
            return Err(Error::SpaceMismatch(
                "continuum part present in exactly one of function and space".into(),
            ));
        }
        Ok(())
    }

    /// Values on all realized atoms.
    pub fn atom_values(&self, r: &Realized) -> Result<Vec<f64>> {
        if self.explicit.len() != r.explicit {
            return Err(Error::SpaceMismatch(format!(
                "function has {} atom values, space has {} atoms",
                self.explicit.len(),
                r.explicit
            )));
        }
        let mut v = self.explicit.clone();
        if !r.family_n.is_empty() {
            let f = self
                .family
                .as_ref()
                .ok_or_else(|| Error::SpaceMismatch("function has no rule for the generated atoms".into()))?;
            for (k, &n) in r.family_n.iter().enumerate() {
                let x = r.points[r.explicit + k].unwrap_or(f64::NAN);
                let value = f.eval(x, n as f64);
                if value.is_nan() {
                    return Err(Error::InvalidParameter(format!(
                        "{} is undefined on generated atom n={n}",
                        f.label()
                    )));
                }
                v.push(value);
            }
        }
        Ok(v)
    }

    /// Pointwise `g ∘ f`.
    pub fn map<G>(&self, name: &str, g: G) -> Self
    where
        G: Fn(f64) -> f64 + Clone + Send + Sync + 'static,
    {
        Self {
            explicit: self.explicit.iter().map(|&v| g(v)).collect(),
            family: self.family.as_ref().map(|f| f.map(name, g.clone())),
            continuum: self.continuum.as_ref().map(|f| f.map(name, g.clone())),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map("scale", move |v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map("abs", f64::abs)
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.explicit.len() != other.explicit.len()
            || self.family.is_some() != other.family.is_some()
            || self.continuum.is_some() != other.continuum.is_some()
        {
            return Err(Error::SpaceMismatch("factors live on different spaces".into()));
        }
        let both = |a: &Option<Formula>, b: &Option<Formula>| match (a, b) {
            (Some(a), Some(b)) => Some(a.product(b)),
            _ => None,
        };
        Ok(Self {
            explicit: self.explicit.iter().zip(&other.explicit).map(|(a, b)| a * b).collect(),
            family: both(&self.family, &other.family),
            continuum: both(&self.continuum, &other.continuum),
        })
    }
}

/// Reference to an atom by explicit position or family index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AtomRef {
    Explicit(usize),
    Member(u64),
}

type FamilyMap = Arc<dyn Fn(u64) -> AtomRef + Send + Sync>;

/// A non-singular transformation given by its action on atoms plus, on the
/// continuum, the Radon–Nikodym weight `f₀` supplied directly.
#[derive(Clone)]
pub struct Transformation {
    explicit: Vec<AtomRef>,
    family: Option<(String, FamilyMap)>,
    continuum_weight: Option<Formula>,
}

impl fmt::Debug for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transformation")
            .field("explicit", &self.explicit)
            .field("family", &self.family.as_ref().map(|x| &x.0))
            .field("continuum_weight", &self.continuum_weight)
            .finish()
    }
}

impl Transformation {
    pub fn new(explicit: Vec<AtomRef>) -> Self {
        Self {
            explicit,
            family: None,
            continuum_weight: None,
        }
    }

    /// Map on explicit atoms by position.
    pub fn atomic(map: &[usize]) -> Self {
        Self::new(map.iter().map(|&i| AtomRef::Explicit(i)).collect())
    }

    pub fn identity(space: &MeasureSpace) -> Self {
        let mut t = Self::atomic(&(0..space.atoms.len()).collect::<Vec<_>>());
        if space.family.is_some() {
            t = t.with_family_map("n", AtomRef::Member);
        }
        t
    }

    pub fn with_family_map<F>(mut self, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(u64) -> AtomRef + Send + Sync + 'static,
    {
        self.family = Some((label.into(), Arc::new(f)));
        self
    }

    pub fn with_continuum_weight(mut self, w: Formula) -> Self {
        self.continuum_weight = Some(w);
        self
    }

    pub fn continuum_weight(&self) -> Option<&Formula> {
        self.continuum_weight.as_ref()
    }

    pub fn check(&self, space: &MeasureSpace) -> Result<()> {
        if self.explicit.len() != space.atoms.len() {
            return Err(Error::InvalidParameter(format!(
                "transformation maps {} atoms, space has {}",
                self.explicit.len(),
                space.atoms.len()
            )));
        }
        for (i, r) in self.explicit.iter().enumerate() {
            let ok = match *r {
                AtomRef::Explicit(j) => j < space.atoms.len(),
                AtomRef::Member(n) => space.family.as_ref().is_some_and(|f| n >= f.start),
            };
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "image of atom {} does not exist",
                    space.atoms[i].id
                )));
            }
        }
        if space.family.is_some() && self.family.is_none() {
            return Err(Error::InvalidParameter("transformation has no rule for generated atoms".into()));
        }
        if let (Some(w), Some(c)) = (&self.continuum_weight, &space.continuum) {
            for x in c.grid(64) {
                if w.eval(x, f64::NAN) < 0.0 {
                    return Err(Error::InvalidParameter(format!("continuum weight negative at {x}")));
                }
            }
        }
        if self.continuum_weight.is_some() && space.continuum.is_none() {
            return Err(Error::InvalidParameter("continuum weight given but the space has no continuum".into()));
        }
        Ok(())
    }

    /// Global image index of each realized atom; `None` when the image lies
    /// beyond the realized budget.
    pub fn images(&self, r: &Realized) -> Vec<Option<usize>> {
        let mut out: Vec<Option<usize>> = self.explicit.iter().map(|&a| r.index_of(a)).collect();
        if let Some((_, f)) = &self.family {
            out.extend(r.family_n.iter().map(|&n| r.index_of(f(n))));
        }
        out
    }

    /// `μ∘T⁻¹(A_n)` for each realized atom.
    pub fn pushforward(&self, r: &Realized) -> Vec<f64> {
        let mut push = vec![0.0; r.len()];
        for (i, img) in self.images(r).into_iter().enumerate() {
            if let Some(j) = img {
                push[j] += r.masses[i];
            }
        }
        push
    }

    /// Whether every realized atom is hit (atoms whose image escapes the
    /// budget are ignored).
    pub fn surjective_on_atoms(&self, r: &Realized) -> bool {
        let mut hit = vec![false; r.len()];
        for j in self.images(r).into_iter().flatten() {
            hit[j] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// `f₀ = d(μ∘T⁻¹)/dμ`: pushforward mass over own mass on atoms, the supplied
/// weight (or 0) on the continuum.
pub fn radon_nikodym(space: &MeasureSpace, t: &Transformation, budget: &Budget) -> Result<(Realized, MeasurableFunction)> {
    t.check(space)?;
    let r = space.realize(budget)?;
    let push = t.pushforward(&r);
    let values: Vec<f64> = push.iter().zip(&r.masses).map(|(p, m)| p / m).collect();
    let f0 = MeasurableFunction::from_realized(space, &r, values, t.continuum_weight.clone());
    Ok((r, f0))
}

/// Outcome of an integral over the whole space.
#[derive(Debug, Clone, Serialize)]
pub struct Integration {
    /// `+inf` when either part diverged.
    pub value: f64,
    pub atoms: SeriesSum,
    /// `None` without a continuum part.
    pub continuum: Option<f64>,
    pub continuum_diverged: bool,
}

impl Integration {
    pub fn diverged(&self) -> bool {
        self.value.is_infinite()
    }
}

/// `Σ g(A_n) μ(A_n) + ∫_B g dμ` with divergence detection. The atom terms are
/// expected to be nonnegative for the trend test to be meaningful.
pub fn integrate(space: &MeasureSpace, g: &MeasurableFunction, budget: &Budget) -> Result<Integration> {
    let r = space.realize(budget)?;
    integrate_realized(space, &r, g, budget)
}

pub fn integrate_realized(space: &MeasureSpace, r: &Realized, g: &MeasurableFunction, budget: &Budget) -> Result<Integration> {
    g.check(space)?;
    let vals = g.atom_values(r)?;
    let terms: Vec<f64> = vals
        .iter()
        .zip(&r.masses)
        .map(|(v, m)| if *v == 0.0 { 0.0 } else { v * m })
        .collect();
    let (head, tail) = r.split(&terms);
    let atoms = series_trend(head, tail, budget.threshold);
    let mut value = atoms.trend.value();
    let (mut cont, mut cont_div) = (None, false);
    if let (Some(c), Some(gc)) = (&space.continuum, &g.continuum) {
        let f = |x: f64| {
            let v = gc.eval(x, f64::NAN);
            if v == 0.0 {
                0.0
            } else {
                v * c.density_at(x)
            }
        };
        match quadrature::integrate(&f, c.a, c.b, budget.threshold)? {
            Integral::Finite(v) => {
                cont = Some(v);
                value += v;
            }
            Integral::Divergent { partial } => {
                cont = Some(partial);
                cont_div = true;
                value = f64::INFINITY;
            }
        }
    }
    Ok(Integration {
        value,
        atoms,
        continuum: cont,
        continuum_diverged: cont_div,
    })
}

/// A set of realized atoms, optionally joined with the continuum part.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Region {
    pub atoms: Vec<usize>,
    pub continuum: bool,
}

/// `Q_T(F) = ess sup_F f₀`: maximum over the region's atoms joined with a
/// grid supremum over the continuum.
pub fn q_t(space: &MeasureSpace, r: &Realized, f0: &MeasurableFunction, region: &Region) -> Result<f64> {
    if region.atoms.is_empty() && !region.continuum {
        return Err(Error::InvalidParameter("empty region".into()));
    }
    let vals = f0.atom_values(r)?;
    let mut m = f64::NEG_INFINITY;
    for &i in &region.atoms {
        let v = *vals
            .get(i)
            .ok_or_else(|| Error::InvalidParameter(format!("atom index {i} out of range")))?;
        m = m.max(v);
    }
    if region.continuum {
        let c = space
            .continuum
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("region asks for a continuum the space lacks".into()))?;
        for x in c.grid(CONTINUUM_GRID) {
            let v = f0.at(x);
            if !v.is_nan() {
                m = m.max(v);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn integrate_examples() {
        let s = MeasureSpace::atomic(&[1.0, 2.0]).unwrap();
        let one = MeasurableFunction::constant(&s, 1.0);
        assert_eq!(integrate(&s, &one, &b()).unwrap().value, 3.0);

        let s = MeasureSpace::new(vec![], None, Some(Continuum::lebesgue(0.0, 1.0))).unwrap();
        let g = MeasurableFunction::from_formula(&s, &Formula::of_x("x", |x| x)).unwrap();
        assert!((integrate(&s, &g, &b()).unwrap().value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn cubic_family_partial_sums() {
        let fam = AtomFamily {
            prefix: "A".into(),
            start: 2,
            mass: Formula::of_n("1/n^3", |n| n.powi(-3)),
            point: None,
        };
        let s = MeasureSpace::new(vec![], Some(fam), None).unwrap();
        let g = MeasurableFunction::new(vec![], Some(Formula::of_n("n", |n| n)), None);
        for big_n in [10usize, 1000] {
            let budget = Budget { n: big_n - 1, threshold: 1e12 };
            let got = integrate(&s, &g, &budget).unwrap().atoms.partial;
            // oracle: Σ_{n=2}^{N} 1/n^2 summed in reverse for accuracy
            let oracle: f64 = (2..=big_n).rev().map(|n| 1.0 / (n as f64).powi(2)).sum();
            assert!((got - oracle).abs() < 1e-13, "{got} vs {oracle}");
        }
    }

    #[test]
    fn pointless_family_rejects_x_formulas() {
        let fam = AtomFamily {
            prefix: "A".into(),
            start: 1,
            mass: Formula::of_n("2^-n", |n| 2f64.powf(-n)),
            point: None,
        };
        let s = MeasureSpace::new(vec![], Some(fam), None).unwrap();
        let g = MeasurableFunction::from_formula(&s, &Formula::of_x("x", |x| x)).unwrap();
        let err = integrate(&s, &g, &b()).unwrap_err();
        assert!(err.to_string().contains("undefined on generated atom n=1"), "{err}");
    }

    #[test]
    fn factorial_masses_stop_at_underflow() {
        let fam = AtomFamily {
            prefix: "A".into(),
            start: 1,
            mass: Formula::of_n("1/n!", |n| (-ln_factorial(n)).exp()),
            point: None,
        };
        let s = MeasureSpace::new(vec![], Some(fam), None).unwrap();
        let r = s.realize(&b()).unwrap();
        assert!(r.underflow);
        assert!(r.family_len() > 100 && r.family_len() < 200);
    }

    fn ln_factorial(n: f64) -> f64 {
        (1..=n as u64).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn radon_nikodym_examples() {
        let s = MeasureSpace::atomic(&[1.0, 1.0]).unwrap();
        let t = Transformation::atomic(&[0, 0]);
        let (r, f0) = radon_nikodym(&s, &t, &b()).unwrap();
        assert_eq!(f0.atom_values(&r).unwrap(), vec![2.0, 0.0]);

        let s = MeasureSpace::atomic(&[2.0, 1.0]).unwrap();
        let t = Transformation::atomic(&[0, 0]);
        let (r, f0) = radon_nikodym(&s, &t, &b()).unwrap();
        assert_eq!(f0.atom_values(&r).unwrap(), vec![1.5, 0.0]);

        let s = MeasureSpace::atomic(&[0.3, 1.7, 2.5]).unwrap();
        let (r, f0) = radon_nikodym(&s, &Transformation::identity(&s), &b()).unwrap();
        assert_eq!(f0.atom_values(&r).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn bad_transformations_rejected() {
        let s = MeasureSpace::atomic(&[1.0, 1.0]).unwrap();
        assert!(Transformation::atomic(&[0, 5]).check(&s).is_err());
        assert!(Transformation::atomic(&[0]).check(&s).is_err());
        let w = Transformation::atomic(&[0, 1]).with_continuum_weight(Formula::constant(1.0));
        assert!(w.check(&s).is_err());
    }

    #[test]
    fn q_t_examples() {
        let s = MeasureSpace::atomic(&[1.0, 1.0]).unwrap();
        let r = s.realize(&b()).unwrap();
        let f0 = MeasurableFunction::atomic(vec![2.0, 0.0]);
        let both = Region { atoms: vec![0, 1], continuum: false };
        assert_eq!(q_t(&s, &r, &f0, &both).unwrap(), 2.0);
        let one = Region { atoms: vec![1], continuum: false };
        assert_eq!(q_t(&s, &r, &f0, &one).unwrap(), 0.0);

        let s = MeasureSpace::new(vec![], None, Some(Continuum::lebesgue(0.0, 1.0))).unwrap();
        let r = s.realize(&b()).unwrap();
        let f0 = MeasurableFunction::from_formula(&s, &Formula::of_x("x", |x| x)).unwrap();
        let c = Region { atoms: vec![], continuum: true };
        assert!((q_t(&s, &r, &f0, &c).unwrap() - 1.0).abs() < 1.0 / CONTINUUM_GRID as f64);
        assert!(q_t(&s, &r, &f0, &Region::default()).is_err());
    }

    #[test]
    fn invalid_spaces_rejected() {
        assert!(MeasureSpace::atomic(&[1.0, 0.0]).is_err());
        assert!(MeasureSpace::atomic(&[f64::INFINITY]).is_err());
        let dup = vec![Atom::new("a", 1.0), Atom::new("a", 2.0)];
        assert!(MeasureSpace::new(dup, None, None).is_err());
        assert!(MeasureSpace::new(vec![], None, Some(Continuum::lebesgue(1.0, 1.0))).is_err());
    }

    #[test]
    fn product_and_mismatch() {
        let u = MeasurableFunction::atomic(vec![1.0, 0.25]);
        let f = MeasurableFunction::atomic(vec![1.0, 2.0]);
        assert_eq!(u.product(&f).unwrap().explicit_values(), &[1.0, 0.5]);
        assert!(u.product(&MeasurableFunction::atomic(vec![1.0])).is_err());
    }
}
