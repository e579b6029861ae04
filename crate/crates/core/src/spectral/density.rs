use std::collections::BTreeMap;

use crate::numeric::{csum, ABS_TOL};

use super::monomial::SeriesClass;
use super::series::SumSettings;
use super::tail::Tail;
use super::SpectralError;

/// A spectral point `t` carrying trace mass `w = τ(e({t}))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(value: f64, weight: f64) -> Self {
        Self { value, weight }
    }
}

/// A positive L¹ element of a commutative model: atoms, analytic tails and
/// the trace of the identity of the ambient algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    atoms: Vec<Atom>,
    tails: Vec<Tail>,
    total_trace: f64,
}

/// Sort atoms and merge values within [`ABS_TOL`] by adding weights.
pub fn normalize_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if (a.value - last.value).abs() <= ABS_TOL => last.weight += a.weight,
            _ => out.push(a),
        }
    }
    out
}

fn check_number(x: f64, what: &str) -> Result<(), SpectralError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(SpectralError::NonFinite(format!("{what} = {x}")))
    }
}

impl SpectralDensity {
    /// Build and validate. Atoms are sorted and equal values merged first.
    pub fn new(atoms: Vec<Atom>, tails: Vec<Tail>, total_trace: f64) -> Result<Self, SpectralError> {
        for a in &atoms {
            check_number(a.value, "atom value")?;
            check_number(a.weight, "atom weight")?;
        }
        let d = SpectralDensity {
            atoms: normalize_atoms(atoms),
            tails,
            total_trace,
        };
        d.validate()?;
        Ok(d)
    }

    /// Atoms only, in an algebra of infinite trace.
    pub fn from_atoms(pairs: &[(f64, f64)]) -> Result<Self, SpectralError> {
        Self::new(
            pairs.iter().map(|&(t, w)| Atom::new(t, w)).collect(),
            Vec::new(),
            f64::INFINITY,
        )
    }

    pub fn zero() -> Self {
        SpectralDensity {
            atoms: Vec::new(),
            tails: Vec::new(),
            total_trace: f64::INFINITY,
        }
    }

    /// No sorting, merging or validation; for exercising [`Self::validate`].
    pub fn from_parts_unchecked(atoms: Vec<Atom>, tails: Vec<Tail>, total_trace: f64) -> Self {
        SpectralDensity {
            atoms,
            tails,
            total_trace,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn tails(&self) -> &[Tail] {
        &self.tails
    }

    pub fn total_trace(&self) -> f64 {
        self.total_trace
    }

    pub fn with_total_trace(&self, total: f64) -> Result<Self, SpectralError> {
        let d = SpectralDensity {
            total_trace: total,
            ..self.clone()
        };
        d.validate()?;
        Ok(d)
    }

    pub fn has_infinite_spectrum(&self) -> bool {
        self.tails.iter().any(Tail::has_unbounded_part)
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        self.validate_with(SumSettings::default())
    }

    pub fn validate_with(&self, settings: SumSettings) -> Result<(), SpectralError> {
        for a in &self.atoms {
            check_number(a.value, "atom value")?;
            check_number(a.weight, "atom weight")?;
            if a.value < 0.0 {
                return Err(SpectralError::NegativeValue(a.value));
            }
            if a.weight <= 0.0 {
                return Err(SpectralError::NonPositiveWeight {
                    value: a.value,
                    weight: a.weight,
                });
            }
        }
        for pair in self.atoms.windows(2) {
            if (pair[1].value - pair[0].value).abs() <= ABS_TOL {
                return Err(SpectralError::DuplicateValue(pair[0].value));
            }
            if pair[1].value < pair[0].value {
                return Err(SpectralError::Precondition("atoms are not in ascending order".into()));
            }
        }
        let mut labels = std::collections::BTreeSet::new();
        for tail in &self.tails {
            tail.check_shape()?;
            if !labels.insert(tail.grid) {
                return Err(SpectralError::InvalidTail(format!(
                    "two tails share grid label {}",
                    tail.grid
                )));
            }
            if tail.has_unbounded_part() && !tail.trace_class().converges() {
                return Err(SpectralError::TraceDivergence(format!(
                    "Σ t·w diverges for the {} tail",
                    tail.family.name()
                )));
            }
            let computed = tail.derive_declaration(settings)?;
            if computed.entropy != tail.declared.entropy {
                return Err(SpectralError::DeclarationMismatch {
                    field: "entropy",
                    declared: tail.declared.entropy.to_string(),
                    computed: computed.entropy.to_string(),
                });
            }
            let (dt, ct) = (tail.declared.trace, computed.trace);
            let agree = if dt.is_infinite() || ct.is_infinite() {
                dt == ct
            } else {
                (dt - ct).abs() <= 1e-6 * ct.abs().max(1.0)
            };
            if !agree {
                return Err(SpectralError::DeclarationMismatch {
                    field: "trace",
                    declared: dt.to_string(),
                    computed: ct.to_string(),
                });
            }
        }
        let t = self.total_trace;
        if t.is_nan() || t <= 0.0 {
            return Err(SpectralError::Precondition(format!("algebra trace must be positive, got {t}")));
        }
        if t.is_finite() {
            let mass = self.mass_with(settings)?;
            if mass > t * (1.0 + 1e-12) + ABS_TOL {
                return Err(SpectralError::MassExceedsAlgebra { weights: mass, total: t });
            }
        }
        Ok(())
    }

    /// τ(h).
    pub fn trace(&self) -> f64 {
        self.trace_with(SumSettings::default())
            .expect("trace of a validated density")
    }

    pub fn trace_with(&self, settings: SumSettings) -> Result<f64, SpectralError> {
        let mut parts = vec![csum(self.atoms.iter().map(|a| a.value * a.weight))];
        for tail in &self.tails {
            parts.push(tail.trace(settings)?.value);
        }
        Ok(csum(parts))
    }

    /// Σ weights: the trace of the support projection.
    pub fn mass_with(&self, settings: SumSettings) -> Result<f64, SpectralError> {
        let mut parts = vec![csum(self.atoms.iter().map(|a| a.weight))];
        for tail in &self.tails {
            parts.push(tail.mass(settings)?.value);
        }
        Ok(csum(parts))
    }

    /// τ(e({0})) = τ(𝟙) − Σ weights, which may be infinite.
    pub fn zero_mass(&self) -> Result<f64, SpectralError> {
        let mass = self.mass_with(SumSettings::default())?;
        if self.total_trace.is_infinite() {
            return Ok(f64::INFINITY);
        }
        let zero_atom: f64 = self.atoms.iter().filter(|a| a.value == 0.0).map(|a| a.weight).sum();
        Ok((self.total_trace - mass).max(0.0) + zero_atom)
    }

    /// All points when the spectrum is finite (bounded tail parts expanded).
    pub fn finite_points(&self) -> Option<Vec<(f64, f64)>> {
        if self.has_infinite_spectrum() {
            return None;
        }
        let mut pts: Vec<(f64, f64)> = self.atoms.iter().map(|a| (a.value, a.weight)).collect();
        for tail in &self.tails {
            pts.extend(tail.bounded_points());
        }
        Some(pts)
    }

    /// Same element with bounded tails expanded into atoms.
    pub fn flatten_bounded(&self) -> Result<Self, SpectralError> {
        let mut atoms = self.atoms.clone();
        let mut tails = Vec::new();
        for tail in &self.tails {
            if tail.has_unbounded_part() {
                tails.push(tail.clone());
            } else {
                atoms.extend(tail.bounded_points().into_iter().map(|(t, w)| Atom::new(t, w)));
            }
        }
        SpectralDensity::new(atoms, tails, self.total_trace)
    }

    /// Keep exactly the spectral points in `[m, M]`.
    pub fn truncate(&self, m: f64, big_m: f64) -> Result<Self, SpectralError> {
        if !(m > 0.0 && m < big_m) {
            return Err(SpectralError::Precondition(format!("need 0 < m < M, got m={m}, M={big_m}")));
        }
        let atoms = self
            .atoms
            .iter()
            .copied()
            .filter(|a| a.value >= m && a.value <= big_m)
            .collect();
        let mut tails = Vec::new();
        for tail in &self.tails {
            let dom = tail.indices_in(m, big_m)?;
            if !dom.is_empty() {
                tails.push(tail.restricted(dom, SumSettings::default())?);
            }
        }
        SpectralDensity::new(atoms, tails, self.total_trace)
    }

    /// `α·h`.
    pub fn scale(&self, alpha: f64) -> Result<Self, SpectralError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(SpectralError::Precondition(format!("scale factor must be positive, got {alpha}")));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(alpha * a.value, a.weight))
            .collect();
        let tails = self
            .tails
            .iter()
            .map(|t| {
                Tail {
                    scale: t.scale * alpha,
                    offset: t.offset * alpha,
                    ..t.clone()
                }
                .redeclared(SumSettings::default())
            })
            .collect::<Result<Vec<_>, _>>()?;
        SpectralDensity::new(atoms, tails, self.total_trace)
    }

    /// `h + 𝟙` in a finite algebra; the kernel of `h` becomes an atom at 1.
    pub fn shift_plus_identity(&self) -> Result<Self, SpectralError> {
        let total = self.total_trace;
        if total.is_infinite() {
            return Err(SpectralError::Precondition(
                "h + 1 needs an algebra of finite trace".into(),
            ));
        }
        for t in &self.tails {
            if t.has_unbounded_part() && !t.mass_class().converges() {
                return Err(SpectralError::Precondition(format!(
                    "the {} tail has infinite support trace and cannot live in a finite algebra",
                    t.family.name()
                )));
            }
        }
        let mass = self.mass_with(SumSettings::default())?;
        if mass > total * (1.0 + 1e-12) + ABS_TOL {
            return Err(SpectralError::MassExceedsAlgebra { weights: mass, total });
        }
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.value + 1.0, a.weight))
            .collect();
        let kernel = total - mass;
        if kernel > ABS_TOL {
            atoms.push(Atom::new(1.0, kernel));
        }
        let tails = self
            .tails
            .iter()
            .map(|t| {
                Tail {
                    offset: t.offset + 1.0,
                    ..t.clone()
                }
                .redeclared(SumSettings::default())
            })
            .collect::<Result<Vec<_>, _>>()?;
        SpectralDensity::new(atoms, tails, total)
    }

    /// Trace of the part of `h` strictly below `v` (`∫_{[0,v)} t dτ∘e`).
    pub fn trace_below(&self, v: f64) -> Result<f64, SpectralError> {
        self.trace_below_with(v, SumSettings::default())
    }

    pub fn trace_below_with(&self, v: f64, settings: SumSettings) -> Result<f64, SpectralError> {
        let mut parts = vec![csum(
            self.atoms
                .iter()
                .filter(|a| a.value < v)
                .map(|a| a.value * a.weight),
        )];
        for tail in &self.tails {
            let dom = tail.indices_below(v)?;
            let term = tail.kernel_term(|_| 1.0);
            parts.push(tail.sum_over(&dom, &term, tail.trace_class(), settings)?.value);
        }
        Ok(csum(parts))
    }

    /// Trace of the part of `h` strictly above `v`.
    pub fn trace_above(&self, v: f64) -> Result<f64, SpectralError> {
        self.trace_above_with(v, SumSettings::default())
    }

    pub fn trace_above_with(&self, v: f64, settings: SumSettings) -> Result<f64, SpectralError> {
        let mut parts = vec![csum(
            self.atoms
                .iter()
                .filter(|a| a.value > v)
                .map(|a| a.value * a.weight),
        )];
        for tail in &self.tails {
            let dom = tail.indices_above(v)?;
            let term = tail.kernel_term(|_| 1.0);
            parts.push(tail.sum_over(&dom, &term, tail.trace_class(), settings)?.value);
        }
        Ok(csum(parts))
    }

    /// τ(e([a, ∞))): support trace of the spectrum at or above `a`.
    pub fn mass_at_or_above(&self, a: f64) -> Result<f64, SpectralError> {
        let mut parts = vec![csum(self.atoms.iter().filter(|x| x.value >= a).map(|x| x.weight))];
        for tail in &self.tails {
            let dom = tail.indices_in(a, f64::INFINITY)?;
            let term = tail.mass_term();
            parts.push(tail.sum_over(&dom, &term, tail.mass_class(), SumSettings::default())?.value);
        }
        Ok(csum(parts))
    }
}

/// ‖h₁ − h₂‖₁ on a common projection grid.
///
/// Atoms of equal weight sit on interchangeable projections: within each
/// weight class both value lists are padded with zeros to a common length,
/// sorted and matched in order. Tails with the same grid label share
/// projections index by index; tails on distinct labels are orthogonal.
pub fn l1_distance(a: &SpectralDensity, b: &SpectralDensity) -> Result<f64, SpectralError> {
    l1_distance_with(a, b, SumSettings::default())
}

pub fn l1_distance_with(
    a: &SpectralDensity,
    b: &SpectralDensity,
    settings: SumSettings,
) -> Result<f64, SpectralError> {
    let mut parts = Vec::new();
    let mut classes: BTreeMap<u64, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for x in &a.atoms {
        classes.entry(x.weight.to_bits()).or_default().0.push(x.value);
    }
    for x in &b.atoms {
        classes.entry(x.weight.to_bits()).or_default().1.push(x.value);
    }
    for (bits, (mut u, mut v)) in classes {
        let w = f64::from_bits(bits);
        let len = u.len().max(v.len());
        u.resize(len, 0.0);
        v.resize(len, 0.0);
        u.sort_by(f64::total_cmp);
        v.sort_by(f64::total_cmp);
        parts.push(w * csum(u.iter().zip(&v).map(|(x, y)| (x - y).abs())));
    }

    for ta in &a.tails {
        match b.tails.iter().find(|tb| tb.grid == ta.grid) {
            None => parts.push(ta.trace(settings)?.value),
            Some(tb) => parts.push(tail_distance(ta, tb, settings)?),
        }
    }
    for tb in &b.tails {
        if !a.tails.iter().any(|ta| ta.grid == tb.grid) {
            parts.push(tb.trace(settings)?.value);
        }
    }
    Ok(csum(parts))
}

fn tail_distance(ta: &Tail, tb: &Tail, settings: SumSettings) -> Result<f64, SpectralError> {
    let (ca, cb) = ta.alignment(tb).ok_or_else(|| {
        SpectralError::NotAlignable(format!(
            "tails on grid {} have different weight or value shapes",
            ta.grid
        ))
    })?;
    let common = ta.domain.intersect(&tb.domain);
    let only_a = ta.domain.minus(&tb.domain);
    let only_b = tb.domain.minus(&ta.domain);
    let trace_term_a = ta.kernel_term(|_| 1.0);
    let trace_term_b = tb.kernel_term(|_| 1.0);
    let mut parts = vec![
        ta.sum_over(&only_a, &trace_term_a, ta.trace_class(), settings)?.value,
        tb.sum_over(&only_b, &trace_term_b, tb.trace_class(), settings)?.value,
    ];
    if !common.is_empty() {
        let d_off = ta.offset - tb.offset;
        let d_coef = (ca - cb) / ca;
        let w = ta.w_rule();
        let tw = ta.t_rule().mul(&w);
        let term = move |ln_x: f64, extra: f64| {
            let mut v = 0.0;
            if d_coef != 0.0 {
                v += d_coef * (tw.ln_at_ln(ln_x) + extra).exp();
            }
            if d_off != 0.0 {
                v += d_off * (w.ln_at_ln(ln_x) + extra).exp();
            }
            v.abs()
        };
        let mut class = SeriesClass::Geometric;
        if d_coef != 0.0 {
            class = worst(class, tw.series());
        }
        if d_off != 0.0 {
            class = worst(class, w.series());
        }
        parts.push(ta.sum_over(&common, &term, class, settings)?.value);
    }
    Ok(csum(parts))
}

fn worst(a: SeriesClass, b: SeriesClass) -> SeriesClass {
    match (a, b) {
        (SeriesClass::Divergent, _) | (_, SeriesClass::Divergent) => SeriesClass::Divergent,
        (SeriesClass::Convergent, _) | (_, SeriesClass::Convergent) => SeriesClass::Convergent,
        _ => SeriesClass::Geometric,
    }
}

/// A grid label not used by any tail of `d`.
pub fn fresh_grid_label(d: &SpectralDensity) -> u32 {
    d.tails.iter().map(|t| t.grid + 1).max().unwrap_or(1)
}
