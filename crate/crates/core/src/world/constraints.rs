//! Functional constraints and their hinge penalties.
//!
//! Each constraint contributes `weight * violation`, with the weight in
//! bytes-equivalent units so the total adds directly to a description
//! length.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::enclosure::enclosed_volume;
use super::stability::{unsupported_cells, DEFAULT_MAX_OVERHANG};
use super::structure::{Cell, VoxelStructure};
use super::WorldError;

#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintKind {
    Stability { max_overhang: usize },
    EnclosedVolumeAtLeast(usize),
    MaterialAtMost(usize),
    /// Inclusive box.
    WithinBox { min: Cell, max: Cell },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub weight: f64,
}

impl Constraint {
    pub fn new(kind: ConstraintKind, weight: f64) -> Self {
        Constraint { kind, weight }
    }

    pub fn stability(weight: f64) -> Self {
        Constraint::new(ConstraintKind::Stability { max_overhang: DEFAULT_MAX_OVERHANG }, weight)
    }

    /// Violation units of this constraint on `s`.
    pub fn violation(&self, s: &VoxelStructure) -> u64 {
        match &self.kind {
            ConstraintKind::Stability { max_overhang } => {
                let cells: Vec<Cell> = s.cells().collect();
                unsupported_cells(&cells, *max_overhang).len() as u64
            }
            ConstraintKind::EnclosedVolumeAtLeast(v_min) => v_min.saturating_sub(enclosed_volume(s)) as u64,
            ConstraintKind::MaterialAtMost(m_max) => s.len().saturating_sub(*m_max) as u64,
            ConstraintKind::WithinBox { min, max } => s
                .cells()
                .filter(|c| {
                    c.x < min.x || c.y < min.y || c.z < min.z || c.x > max.x || c.y > max.y || c.z > max.z
                })
                .count() as u64,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSet {
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PenaltyReport {
    pub violations: Vec<u64>,
    pub penalties: Vec<f64>,
    pub total: f64,
}

impl ConstraintSet {
    pub fn new(constraints: Vec<Constraint>) -> Result<Self, WorldError> {
        for c in &constraints {
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(WorldError::Constraint(format!("weight must be a finite value >= 0, got {}", c.weight)));
            }
        }
        Ok(ConstraintSet { constraints })
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self, WorldError> {
        let raw: Vec<RawConstraint> =
            serde_json::from_str(text).map_err(|e| WorldError::Constraint(e.to_string()))?;
        ConstraintSet::new(raw.into_iter().map(RawConstraint::into_constraint).collect::<Result<_, _>>()?)
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<RawConstraint> = self.constraints.iter().map(RawConstraint::from_constraint).collect();
        serde_json::to_string_pretty(&raw).expect("constraint list serializes")
    }
}

pub fn eval_constraints(s: &VoxelStructure, cs: &ConstraintSet) -> PenaltyReport {
    let violations: Vec<u64> = cs.constraints.iter().map(|c| c.violation(s)).collect();
    let penalties: Vec<f64> = cs
        .constraints
        .iter()
        .zip(&violations)
        .map(|(c, &v)| if v == 0 { 0.0 } else { c.weight * v as f64 })
        .collect();
    let total = penalties.iter().sum();
    PenaltyReport { violations, penalties, total }
}

#[derive(Serialize, Deserialize)]
struct RawConstraint {
    kind: String,
    #[serde(default)]
    params: Value,
    weight: f64,
}

impl RawConstraint {
    fn into_constraint(self) -> Result<Constraint, WorldError> {
        let bad = |what: &str| WorldError::Constraint(format!("{}: {what}", self.kind));
        let field = |name: &str| -> Result<u64, WorldError> {
            self.params
                .get(name)
                .and_then(Value::as_u64)
                .ok_or_else(|| bad(&format!("missing non-negative integer param `{name}`")))
        };
        let corner = |name: &str| -> Result<Cell, WorldError> {
            let v = self
                .params
                .get(name)
                .and_then(Value::as_array)
                .filter(|a| a.len() == 3)
                .ok_or_else(|| bad(&format!("param `{name}` must be [x, y, z]")))?;
            let mut xyz = [0i64; 3];
            for (slot, item) in xyz.iter_mut().zip(v) {
                *slot = item.as_i64().ok_or_else(|| bad(&format!("param `{name}` must hold integers")))?;
            }
            Ok(Cell::new(xyz[0], xyz[1], xyz[2]))
        };
        let kind = match self.kind.as_str() {
            "Stability" => {
                let max_overhang = if self.params.get("max_overhang").is_some() {
                    field("max_overhang")? as usize
                } else {
                    DEFAULT_MAX_OVERHANG
                };
                ConstraintKind::Stability { max_overhang }
            }
            "EnclosedVolumeAtLeast" => ConstraintKind::EnclosedVolumeAtLeast(field("v_min")? as usize),
            "MaterialAtMost" => ConstraintKind::MaterialAtMost(field("m_max")? as usize),
            "WithinBox" => ConstraintKind::WithinBox { min: corner("min")?, max: corner("max")? },
            other => return Err(WorldError::Constraint(format!("unknown constraint kind `{other}`"))),
        };
        Ok(Constraint::new(kind, self.weight))
    }

    fn from_constraint(c: &Constraint) -> Self {
        let (kind, params) = match &c.kind {
            ConstraintKind::Stability { max_overhang } => ("Stability", json!({ "max_overhang": max_overhang })),
            ConstraintKind::EnclosedVolumeAtLeast(v) => ("EnclosedVolumeAtLeast", json!({ "v_min": v })),
            ConstraintKind::MaterialAtMost(m) => ("MaterialAtMost", json!({ "m_max": m })),
            ConstraintKind::WithinBox { min, max } => (
                "WithinBox",
                json!({ "min": [min.x, min.y, min.z], "max": [max.x, max.y, max.z] }),
            ),
        };
        RawConstraint { kind: kind.to_string(), params, weight: c.weight }
    }
}
