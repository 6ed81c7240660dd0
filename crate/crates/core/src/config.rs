//! TOML run configuration with dotted `key=value` overrides.
//!
//! ```toml
//! tag = "demo"
//! [grid]
//! direction = "right"
//! length = 50.0
//! cells = 2048
//! [coupling]
//! alpha = 1.0
//! beta = 1.0
//! gamma = 1.0
//! [boundary]
//! f = { kind = "power_exp", power = 2 }
//! [initial]
//! u0 = { kind = "gaussian", center = 10.0, wavenumber = 1.0 }
//! [time]
//! dt = 2.5e-4
//! t_final = 1.0
//! stride = 4
//! ```

use std::path::Path;

use toml::Value;

use crate::error::{Error, Result};
use crate::stepper::SimConfig;

/// Parses a configuration document; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let value: Value = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    from_value(value)
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Loads a file and applies `key=value` overrides before validation.
pub fn load_with_overrides(path: &Path, overrides: &[String]) -> Result<SimConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut value: Value = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    from_value(value)
}

/// Applies overrides to an existing configuration. Closures in signals or
/// forcing cannot round-trip and are reported as a config error.
pub fn with_overrides(config: &SimConfig, overrides: &[String]) -> Result<SimConfig> {
    if overrides.is_empty() {
        return Ok(config.clone());
    }
    let mut value = Value::try_from(config).map_err(|e| Error::Config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let mut out = from_value(value)?;
    out.forcing = config.forcing.clone();
    Ok(out)
}

fn from_value(value: Value) -> Result<SimConfig> {
    let config: SimConfig = value.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Sets `a.b.c = value` inside a TOML tree, creating tables on the way.
/// The right-hand side is read as a TOML value when it parses as one and as
/// a bare string otherwise, so `grid.direction=left` works unquoted.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) =
        assignment.split_once('=').ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("override `{assignment}` has an empty key")));
    }
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or(Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}`: `{part}` is not inside a table")))?;
        node = table.entry(part.to_string()).or_insert_with(|| Value::Table(toml::Table::new()));
    }
    let table =
        node.as_table_mut().ok_or_else(|| Error::Config(format!("override `{key}` does not address a table entry")))?;
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Direction;
    use crate::profile::Profile;

    const SAMPLE: &str = r#"
tag = "demo"
[grid]
direction = "right"
length = 40.0
cells = 400
[coupling]
alpha = 1.0
beta = 1.0
gamma = 1.0
[initial]
u0 = { kind = "gaussian", center = 10.0, wavenumber = 1.0 }
[time]
dt = 0.01
t_final = 0.5
"#;

    #[test]
    fn parses_sample() {
        let c = parse_config(SAMPLE).unwrap();
        assert_eq!(c.tag, "demo");
        assert_eq!(c.grid.cells, 400);
        assert_eq!(c.time.stride, 1);
        assert_eq!(c.initial.v0, Profile::Zero);
        assert!(c.boundary.is_homogeneous());
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = SAMPLE.replace("cells = 400", "cells = 400\nspacing = 0.1");
        assert!(matches!(parse_config(&bad), Err(Error::Config(_))));
        let bad = SAMPLE.replace("[time]", "[timing]");
        assert!(matches!(parse_config(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_invalid_values() {
        let bad = SAMPLE.replace("gamma = 1.0", "gamma = 0.0");
        assert!(matches!(parse_config(&bad), Err(Error::Config(_))));
        let bad = SAMPLE.replace("dt = 0.01", "dt = -0.01");
        assert!(matches!(parse_config(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn overrides_nested_keys() {
        let c = parse_config(SAMPLE).unwrap();
        let o = with_overrides(
            &c,
            &[
                "grid.direction=left".into(),
                "coupling.gamma = -1".into(),
                "initial.u0.center=-10.0".into(),
                "time.stride=5".into(),
            ],
        )
        .unwrap();
        assert_eq!(o.grid.direction, Direction::Left);
        assert_eq!(o.coupling.gamma(), -1.0);
        assert_eq!(o.time.stride, 5);
        match o.initial.u0 {
            Profile::Gaussian { center, .. } => assert_eq!(center, -10.0),
            ref p => panic!("{p:?}"),
        }
    }

    #[test]
    fn bad_overrides_are_config_errors() {
        let c = parse_config(SAMPLE).unwrap();
        for o in ["grid.cells", "=3", "grid..cells=3", "grid.bogus=1", "tag.x=1"] {
            assert!(matches!(with_overrides(&c, &[o.into()]), Err(Error::Config(_))), "{o}");
        }
    }

    #[test]
    fn round_trips_through_toml() {
        let c = parse_config(SAMPLE).unwrap();
        let text = toml::to_string(&c).unwrap();
        let back = parse_config(&text).unwrap();
        assert_eq!(back.grid, c.grid);
        assert_eq!(back.initial, c.initial);
    }

    #[test]
    fn loads_from_file_with_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.toml");
        std::fs::write(&p, SAMPLE).unwrap();
        let c = load_with_overrides(&p, &["time.t_final=0.2".into()]).unwrap();
        assert_eq!(c.time.t_final, 0.2);
        assert!(load_config(&dir.path().join("missing.toml")).is_err());
    }
}
