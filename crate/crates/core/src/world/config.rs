//! Perception configuration: type prototypes, stackability rules and
//! geometric thresholds. Loaded from TOML; see `IrpConfig` for the schema.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::geometry::Dims;
use super::WorldError;
use crate::types::{TypeHierarchy, TypeTag};

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "IRP_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prototype {
    #[serde(rename = "type")]
    pub ty: TypeTag,
    pub dims: Dims,
    pub tolerance: Dims,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrototypeTable {
    pub prototypes: Vec<Prototype>,
}

impl Default for PrototypeTable {
    fn default() -> Self {
        let tol = Dims::new(0.015, 0.015, 0.015);
        PrototypeTable {
            prototypes: vec![
                Prototype { ty: TypeTag::base(), dims: Dims::new(0.18, 0.12, 0.03), tolerance: tol },
                Prototype { ty: TypeTag::cube(), dims: Dims::new(0.05, 0.05, 0.05), tolerance: tol },
                Prototype { ty: TypeTag::roof(), dims: Dims::new(0.10, 0.05, 0.04), tolerance: tol },
            ],
        }
    }
}

impl PrototypeTable {
    pub fn prototype(&self, ty: &TypeTag) -> Option<&Prototype> {
        self.prototypes.iter().find(|p| &p.ty == ty)
    }
}

/// Infers an object's leaf type from its bounding box: the unique prototype
/// whose every axis is within tolerance.
pub fn classify_type(dims: Dims, table: &PrototypeTable) -> Result<TypeTag, WorldError> {
    let d = dims.as_array();
    let matches: Vec<&Prototype> = table
        .prototypes
        .iter()
        .filter(|p| {
            let r = p.dims.as_array();
            let t = p.tolerance.as_array();
            (0..3).all(|i| (d[i] - r[i]).abs() <= t[i] + 1e-12)
        })
        .collect();
    match matches.as_slice() {
        [] => Err(WorldError::UnknownType(dims)),
        [one] => Ok(one.ty.clone()),
        many => Err(WorldError::AmbiguousType(many.iter().map(|p| p.ty.clone()).collect())),
    }
}

/// Type pairs `(object type, element type)` for which `stackable` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackabilityRules {
    pub rules: Vec<StackRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackRule {
    pub object: TypeTag,
    pub on: TypeTag,
}

impl StackRule {
    pub fn new(object: TypeTag, on: TypeTag) -> Self {
        StackRule { object, on }
    }
}

impl Default for StackabilityRules {
    /// Anything on a position; CUBE on BASE or CUBE; ROOF on CUBE. Nothing
    /// goes on a ROOF and a BASE only goes on positions.
    fn default() -> Self {
        StackabilityRules {
            rules: vec![
                StackRule::new(TypeTag::object(), TypeTag::position()),
                StackRule::new(TypeTag::cube(), TypeTag::base()),
                StackRule::new(TypeTag::cube(), TypeTag::cube()),
                StackRule::new(TypeTag::roof(), TypeTag::cube()),
            ],
        }
    }
}

impl StackabilityRules {
    pub fn allows(&self, types: &TypeHierarchy, object: &TypeTag, element: &TypeTag) -> bool {
        self.rules
            .iter()
            .any(|r| types.is_subtype(object, &r.object) && types.is_subtype(element, &r.on))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Horizontal distance under which an object counts as on a position.
    pub d: f64,
    /// Vertical tolerance for stacking contact.
    pub epsilon: f64,
    /// Radius for attaching a keyframe to a landmark frame.
    pub r_frame: f64,
    /// Radius around an object's center within which a close grasps it.
    pub grasp_radius: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { d: 0.05, epsilon: 0.01, r_frame: 0.2, grasp_radius: 0.04 }
    }
}

/// Everything tunable about perception and simulation.
///
/// ```toml
/// [thresholds]
/// d = 0.05
/// epsilon = 0.01
/// r_frame = 0.2
/// grasp_radius = 0.04
///
/// [[prototypes.prototypes]]
/// type = "cube"
/// dims = [0.05, 0.05, 0.05]
/// tolerance = [0.015, 0.015, 0.015]
///
/// [[stackable.rules]]
/// object = "object"
/// on = "position"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct IrpConfig {
    pub thresholds: Thresholds,
    pub prototypes: PrototypeTable,
    pub stackable: StackabilityRules,
}

impl IrpConfig {
    pub fn from_toml(text: &str) -> Result<Self, WorldError> {
        let cfg: IrpConfig = toml::from_str(text).map_err(|e| WorldError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, WorldError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| WorldError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Reads the file named by `IRP_CONFIG`, or the defaults when unset.
    pub fn from_env() -> Result<Self, WorldError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) => Self::load(Path::new(&p)),
            None => Ok(Self::default()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn check(&self) -> Result<(), WorldError> {
        let t = &self.thresholds;
        for (name, v) in [("d", t.d), ("epsilon", t.epsilon), ("r_frame", t.r_frame), ("grasp_radius", t.grasp_radius)] {
            if !(v > 0.0) {
                return Err(WorldError::Config(format!("threshold `{name}` must be positive")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classify_examples() {
        let t = PrototypeTable::default();
        assert_eq!(classify_type(Dims::new(0.05, 0.05, 0.05), &t).unwrap(), TypeTag::cube());
        assert_eq!(classify_type(Dims::new(0.18, 0.12, 0.03), &t).unwrap(), TypeTag::base());
        assert_eq!(classify_type(Dims::new(0.10, 0.05, 0.04), &t).unwrap(), TypeTag::roof());
        assert!(matches!(
            classify_type(Dims::new(1.0, 1.0, 1.0), &t),
            Err(WorldError::UnknownType(_))
        ));
    }

    #[test]
    fn classify_band_edges_are_inclusive() {
        let t = PrototypeTable::default();
        assert_eq!(classify_type(Dims::new(0.065, 0.035, 0.05), &t).unwrap(), TypeTag::cube());
        assert!(classify_type(Dims::new(0.066, 0.05, 0.05), &t).is_err());
    }

    #[test]
    fn overlapping_prototypes_are_ambiguous() {
        let mut t = PrototypeTable::default();
        t.prototypes.push(Prototype {
            ty: TypeTag::new("block"),
            dims: Dims::new(0.055, 0.05, 0.05),
            tolerance: Dims::new(0.015, 0.015, 0.015),
        });
        assert!(matches!(
            classify_type(Dims::new(0.05, 0.05, 0.05), &t),
            Err(WorldError::AmbiguousType(_))
        ));
    }

    proptest! {
        #[test]
        fn default_table_never_ambiguous(
            w in 0.0f64..0.3, l in 0.0f64..0.3, h in 0.0f64..0.3
        ) {
            let r = classify_type(Dims::new(w, l, h), &PrototypeTable::default());
            prop_assert!(!matches!(r, Err(WorldError::AmbiguousType(_))));
        }
    }

    #[test]
    fn default_stack_rules() {
        let h = TypeHierarchy::builtin();
        let r = StackabilityRules::default();
        assert!(r.allows(&h, &TypeTag::base(), &TypeTag::position()));
        assert!(r.allows(&h, &TypeTag::cube(), &TypeTag::base()));
        assert!(r.allows(&h, &TypeTag::roof(), &TypeTag::cube()));
        assert!(!r.allows(&h, &TypeTag::base(), &TypeTag::cube()));
        assert!(!r.allows(&h, &TypeTag::base(), &TypeTag::roof()));
        assert!(!r.allows(&h, &TypeTag::cube(), &TypeTag::roof()));
        assert!(!r.allows(&h, &TypeTag::roof(), &TypeTag::base()));
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = IrpConfig::default();
        let text = cfg.to_toml();
        assert_eq!(IrpConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_config_uses_defaults() {
        let cfg = IrpConfig::from_toml("[thresholds]\nd = 0.08\n").unwrap();
        assert_eq!(cfg.thresholds.d, 0.08);
        assert_eq!(cfg.thresholds.r_frame, 0.2);
        assert_eq!(cfg.prototypes, PrototypeTable::default());
        assert!(IrpConfig::from_toml("[thresholds]\nd = -1.0\n").is_err());
    }
}
