use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analysis::QuadOrder;
use crate::fem::MassMode;
use crate::surfaces::{LanternCoupling, MeshSpec, RefinementFamily, SurfaceError};

/// Largest accepted solver tolerance.
pub const MAX_TOL: f64 = 1e-4;

fn unit() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    1e-10
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Which experiment to run, with its family parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CaseConfig {
    Cap {
        theta0: f64,
        ring_levels: Vec<usize>,
        #[serde(rename = "R", default = "unit")]
        radius: f64,
    },
    Sphere {
        l: u32,
        m: i32,
        subdiv_levels: Vec<usize>,
        #[serde(rename = "R", default = "unit")]
        radius: f64,
    },
    Lantern {
        coupling: LanternCoupling,
        n_levels: Vec<usize>,
        #[serde(rename = "R", default = "unit")]
        radius: f64,
        #[serde(rename = "H", default = "two")]
        height: f64,
    },
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Cap,
    Sphere,
    Lantern,
}

impl std::str::FromStr for CaseKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cap" => Ok(CaseKind::Cap),
            "sphere" => Ok(CaseKind::Sphere),
            "lantern" => Ok(CaseKind::Lantern),
            other => Err(format!("unknown case {other:?} (expected cap, sphere or lantern)")),
        }
    }
}

impl CaseConfig {
    /// The reference experiment of each kind.
    pub fn default_for(kind: CaseKind) -> Self {
        match kind {
            CaseKind::Cap => CaseConfig::Cap { theta0: PI / 3.0, ring_levels: vec![8, 16, 32, 64], radius: 1.0 },
            CaseKind::Sphere => CaseConfig::Sphere { l: 2, m: 0, subdiv_levels: vec![2, 3, 4, 5], radius: 1.0 },
            CaseKind::Lantern => CaseConfig::lantern_default(LanternCoupling::Linear),
        }
    }

    pub fn lantern_default(coupling: LanternCoupling) -> Self {
        let n_levels = match coupling {
            LanternCoupling::Linear => vec![8, 16, 32, 64],
            LanternCoupling::Quadratic => vec![4, 6, 8, 11],
        };
        CaseConfig::Lantern { coupling, n_levels, radius: 1.0, height: 2.0 }
    }

    pub fn kind(&self) -> CaseKind {
        match self {
            CaseConfig::Cap { .. } => CaseKind::Cap,
            CaseConfig::Sphere { .. } => CaseKind::Sphere,
            CaseConfig::Lantern { .. } => CaseKind::Lantern,
        }
    }

    /// Short identifier used in CSV `case` columns.
    pub fn label(&self) -> String {
        match self {
            CaseConfig::Cap { .. } => "cap".into(),
            CaseConfig::Sphere { l, m, .. } => format!("sphere-l{l}m{m}"),
            CaseConfig::Lantern { coupling: LanternCoupling::Linear, .. } => "lantern-linear".into(),
            CaseConfig::Lantern { coupling: LanternCoupling::Quadratic, .. } => "lantern-quadratic".into(),
        }
    }

    pub fn levels(&self) -> &[usize] {
        match self {
            CaseConfig::Cap { ring_levels, .. } => ring_levels,
            CaseConfig::Sphere { subdiv_levels, .. } => subdiv_levels,
            CaseConfig::Lantern { n_levels, .. } => n_levels,
        }
    }

    pub fn levels_mut(&mut self) -> &mut Vec<usize> {
        match self {
            CaseConfig::Cap { ring_levels, .. } => ring_levels,
            CaseConfig::Sphere { subdiv_levels, .. } => subdiv_levels,
            CaseConfig::Lantern { n_levels, .. } => n_levels,
        }
    }

    pub fn family(&self) -> Result<RefinementFamily, SurfaceError> {
        self.family_with_levels(self.levels())
    }

    pub fn family_with_levels(&self, levels: &[usize]) -> Result<RefinementFamily, SurfaceError> {
        match *self {
            CaseConfig::Cap { theta0, radius, .. } => RefinementFamily::cap(radius, theta0, levels),
            CaseConfig::Sphere { l, m, radius, .. } => RefinementFamily::sphere(radius, l, m, levels),
            CaseConfig::Lantern { coupling, radius, height, .. } => {
                RefinementFamily::lantern(coupling, levels, radius, height)
            }
        }
    }

    /// Mesh of a single resolution (rings, subdivisions or axial count `n`).
    pub fn mesh_spec(&self, resolution: usize) -> Result<MeshSpec, SurfaceError> {
        let family = self.family_with_levels(&[resolution])?;
        Ok(family.levels[0])
    }
}

/// Full description of a study, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub case: CaseConfig,
    #[serde(default)]
    pub mass_mode: MassMode,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub quad_order: QuadOrder,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

impl StudyConfig {
    pub fn new(case: CaseConfig) -> Self {
        Self { case, mass_mode: MassMode::Consistent, tol: default_tol(), quad_order: QuadOrder::Four, output: default_output() }
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks tolerances and level counts; `min_levels` is 3 for convergence studies.
    pub fn validate(&self, min_levels: usize) -> Result<(), String> {
        if !(self.tol > 0.0 && self.tol <= MAX_TOL) {
            return Err(format!("tol must lie in (0, {MAX_TOL:e}], got {}", self.tol));
        }
        let levels = self.case.levels();
        if levels.len() < min_levels {
            return Err(format!("need at least {min_levels} levels, got {}", levels.len()));
        }
        let mut sorted = levels.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != levels.len() {
            return Err(format!("levels must be distinct: {levels:?}"));
        }
        match &self.case {
            CaseConfig::Cap { theta0, radius, ring_levels } => {
                if !(*theta0 > 0.0 && *theta0 < PI) {
                    return Err(format!("theta0 must lie in (0, π), got {theta0}"));
                }
                if ring_levels.contains(&0) || !(*radius > 0.0) {
                    return Err("cap needs ring counts ≥ 1 and a positive radius".into());
                }
            }
            CaseConfig::Sphere { l, m, radius, .. } => {
                if *l < 1 || m.unsigned_abs() > *l || !(*radius > 0.0) {
                    return Err(format!("sphere needs l ≥ 1, |m| ≤ l and a positive radius (l={l}, m={m})"));
                }
            }
            CaseConfig::Lantern { n_levels, radius, height, .. } => {
                if n_levels.iter().any(|&n| n < 1) || !(*radius > 0.0 && *height > 0.0) {
                    return Err("lantern needs n ≥ 1 and positive R, H".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_case_kind() {
        let cap = StudyConfig::from_json(
            r#"{"case": {"kind": "cap", "theta0": 1.0, "ring_levels": [4, 8, 16]}, "mass_mode": "lumped", "quad_order": 2}"#,
        )
        .unwrap();
        assert_eq!(cap.case, CaseConfig::Cap { theta0: 1.0, ring_levels: vec![4, 8, 16], radius: 1.0 });
        assert_eq!(cap.mass_mode, MassMode::Lumped);
        assert_eq!(cap.quad_order, QuadOrder::Two);
        assert_eq!(cap.tol, 1e-10);

        let lantern = StudyConfig::from_json(
            r#"{"case": {"kind": "lantern", "coupling": "quadratic", "n_levels": [4, 6, 8], "R": 2.0, "H": 3.0}, "output": "x"}"#,
        )
        .unwrap();
        assert_eq!(lantern.case.label(), "lantern-quadratic");
        assert_eq!(lantern.output, PathBuf::from("x"));

        let sphere =
            StudyConfig::from_json(r#"{"case": {"kind": "sphere", "l": 3, "m": -2, "subdiv_levels": [1, 2, 3]}}"#).unwrap();
        assert_eq!(sphere.case.label(), "sphere-l3m-2");
        assert!(sphere.validate(3).is_ok());
    }

    #[test]
    fn rejects_fields_of_other_kinds() {
        assert!(StudyConfig::from_json(r#"{"case": {"kind": "sphere", "theta0": 1.0, "l": 2, "m": 0, "subdiv_levels": [1]}}"#)
            .is_err());
        assert!(StudyConfig::from_json(r#"{"case": {"kind": "cap", "theta0": 1.0, "ring_levels": [1]}, "extra": 1}"#).is_err());
        assert!(StudyConfig::from_json(r#"{"case": {"kind": "torus"}}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut config = StudyConfig::new(CaseConfig::default_for(CaseKind::Cap));
        assert!(config.validate(3).is_ok());
        config.tol = 1e-3;
        assert!(config.validate(3).is_err());
        config.tol = 0.0;
        assert!(config.validate(3).is_err());
        config.tol = 1e-4;
        config.case = CaseConfig::Cap { theta0: 1.0, ring_levels: vec![4, 8], radius: 1.0 };
        assert!(config.validate(3).is_err());
        assert!(config.validate(1).is_ok());
        config.case = CaseConfig::Cap { theta0: 1.0, ring_levels: vec![4, 8, 8], radius: 1.0 };
        assert!(config.validate(3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let config = StudyConfig::new(CaseConfig::lantern_default(LanternCoupling::Quadratic));
        assert_eq!(StudyConfig::from_json(&config.to_json()).unwrap(), config);
    }
}
