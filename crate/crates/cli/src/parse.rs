//! Parsers for complex numbers, divisors, group files and config files.

use std::collections::HashMap;
use std::path::Path;

use arithmos_core::schottky::green::DivisorC;
use arithmos_core::schottky::{Circle, Moebius, SchottkyGroup};
use num_complex::Complex64 as C64;
use serde_json::Value;

/// Accepts `x`, `x,y`, `x+yi`, `x-yi`, `yi` and `i`.
pub fn complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read '{s}' as a complex number");
    if let Some((re, im)) = t.split_once(',') {
        return Ok(C64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let cut = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coef = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| bad()),
        }
    };
    match cut {
        Some(k) => Ok(C64::new(body[..k].parse().map_err(|_| bad())?, coef(&body[k..])?)),
        None => Ok(C64::new(0.0, coef(body)?)),
    }
}

/// `m@z;m@z;…`, e.g. `1@0.3+0.2i;-1@-1.1+0.4i`.
pub fn divisor(s: &str) -> Result<DivisorC, String> {
    let mut points = Vec::new();
    for part in s.split(';').filter(|p| !p.trim().is_empty()) {
        let (m, z) = part.split_once('@').ok_or_else(|| format!("divisor entry '{part}' is not of the form m@z"))?;
        let m: i64 = m.trim().parse().map_err(|_| format!("bad multiplicity in '{part}'"))?;
        points.push((complex(z)?, m));
    }
    Ok(DivisorC { points })
}

fn value_complex(v: &Value) -> Result<C64, String> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::String(s) => complex(s),
        Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(x), Some(y)) => Ok(C64::new(x, y)),
            _ => Err("complex entries must be numbers".into()),
        },
        _ => Err(format!("cannot read {v} as a complex number")),
    }
}

fn matrix(v: &Value) -> Result<Moebius, String> {
    let rows = v.as_array().filter(|r| r.len() == 2).ok_or("each generator must be a 2×2 matrix")?;
    let mut e = [C64::new(0.0, 0.0); 4];
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == 2).ok_or("each generator must be a 2×2 matrix")?;
        for (j, x) in row.iter().enumerate() {
            e[2 * i + j] = value_complex(x)?;
        }
    }
    Moebius::new(e[0], e[1], e[2], e[3]).map_err(|e| e.to_string())
}

/// A JSON list of 2×2 complex matrices, or an object with `generators`
/// and optional `circles` ({"center": z, "radius": r}).
pub fn group_json(v: &Value) -> Result<SchottkyGroup, String> {
    let (gens, circles) = match v {
        Value::Array(_) => (v, None),
        Value::Object(o) => (o.get("generators").ok_or("missing 'generators'")?, o.get("circles")),
        _ => return Err("group file must be a list or an object".into()),
    };
    let gens = gens.as_array().ok_or("'generators' must be a list")?.iter().map(matrix).collect::<Result<Vec<_>, _>>()?;
    let circles = match circles {
        None | Some(Value::Null) => None,
        Some(c) => Some(
            c.as_array()
                .ok_or("'circles' must be a list")?
                .iter()
                .map(|c| {
                    let center = value_complex(c.get("center").ok_or("circle needs a center")?)?;
                    let radius = c.get("radius").and_then(Value::as_f64).ok_or("circle needs a radius")?;
                    Ok(Circle { center, radius })
                })
                .collect::<Result<Vec<_>, String>>()?,
        ),
    };
    SchottkyGroup::new(gens, circles).map_err(|e| e.to_string())
}

/// `standard2`, `genus1:q`, or a path to a group file.
pub fn group(spec: &str) -> Result<SchottkyGroup, String> {
    if spec == "standard2" {
        return Ok(SchottkyGroup::standard_genus_two());
    }
    if let Some(q) = spec.strip_prefix("genus1:") {
        return SchottkyGroup::genus_one(complex(q)?).map_err(|e| e.to_string());
    }
    let text = std::fs::read_to_string(Path::new(spec)).map_err(|e| format!("cannot read group file '{spec}': {e}"))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("group file '{spec}' is not JSON: {e}"))?;
    group_json(&v)
}

/// `key = value` lines; `#` starts a comment.
#[derive(Default, Debug)]
pub struct Config(HashMap<String, String>);

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config '{}': {e}", path.display()))?;
        let mut map = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {} is not key = value", n + 1))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    /// The flag if given, else the config entry, else the default.
    pub fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.0.get(key) {
            Some(s) => s.parse().map_err(|_| format!("config value for '{key}' is invalid: {s}")),
            None => Ok(default),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(complex("0.5,0.2").unwrap(), C64::new(0.5, 0.2));
        assert_eq!(complex("0.5+0.2i").unwrap(), C64::new(0.5, 0.2));
        assert_eq!(complex("-1e-3-2i").unwrap(), C64::new(-1e-3, -2.0));
        assert_eq!(complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(complex("3i").unwrap(), C64::new(0.0, 3.0));
        assert_eq!(complex("1e+2+1e-2i").unwrap(), C64::new(100.0, 0.01));
        assert!(complex("abc").is_err());
    }

    #[test]
    fn divisor_form() {
        let d = divisor("1@0.3+0.2i; -1@-1.1+0.4i").unwrap();
        assert_eq!(d.points, vec![(C64::new(0.3, 0.2), 1), (C64::new(-1.1, 0.4), -1)]);
        assert!(divisor("1:0.3").is_err());
    }

    #[test]
    fn group_file_forms() {
        let v: Value = serde_json::from_str(r#"[[[2, 0], [0, 0.5]]]"#).unwrap();
        assert_eq!(group_json(&v).unwrap().genus(), 1);
        let v: Value = serde_json::from_str(
            r#"{"generators": [[["0.5", 0], [0, 2]]], "circles": [{"center": 0, "radius": 0.7}, {"center": [0, 0], "radius": 1.4}]}"#,
        )
        .unwrap();
        assert!(group_json(&v).is_err());
        assert!(group("genus1:0.2").is_ok());
    }

    #[test]
    fn config_precedence() {
        let c = Config(HashMap::from([("dim".to_string(), "32".to_string())]));
        assert_eq!(c.pick(Some(24usize), "dim", 16).unwrap(), 24);
        assert_eq!(c.pick(None, "dim", 16usize).unwrap(), 32);
        assert_eq!(c.pick(None, "len", 7usize).unwrap(), 7);
    }
}
