//! Polytope input: the JSON `PolytopeFile` and a vertices-only OFF reader.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use conevol::vector::Vector;
use conevol::Polytope64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<Halfspace>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn check_coords(field: &str, i: usize, dim: usize, c: &[f64]) -> Result<()> {
    if c.len() != dim {
        bail!("{field}[{i}]: expected {dim} coordinates, got {}", c.len());
    }
    if let Some(j) = c.iter().position(|x| !x.is_finite()) {
        bail!("{field}[{i}][{j}]: coordinate is not finite");
    }
    Ok(())
}

impl PolytopeFile {
    pub fn from_vertices(name: Option<String>, p: &Polytope64) -> Self {
        PolytopeFile {
            dim: p.dim(),
            vertices: Some(p.vertices().iter().map(|v| v.to_f64()).collect()),
            halfspaces: None,
            name,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            bail!("dim: must be at least 2, got {}", self.dim);
        }
        if self.vertices.is_none() && self.halfspaces.is_none() {
            bail!("at least one of `vertices` or `halfspaces` is required");
        }
        for (i, v) in self.vertices.iter().flatten().enumerate() {
            check_coords("vertices", i, self.dim, v)?;
        }
        for (i, h) in self.halfspaces.iter().flatten().enumerate() {
            check_coords("halfspaces.normal", i, self.dim, &h.normal)?;
            if !h.offset.is_finite() {
                bail!("halfspaces[{i}].offset: not finite");
            }
        }
        Ok(())
    }

    /// Vertices win when both representations are present.
    pub fn to_polytope(&self) -> Result<Polytope64> {
        self.validate()?;
        let p = if let Some(vs) = &self.vertices {
            let pts: Vec<_> = vs.iter().map(|v| Vector::new(v.clone())).collect();
            Polytope64::from_vertices(self.dim, &pts)?
        } else {
            let hs: Vec<_> = self
                .halfspaces
                .as_ref()
                .unwrap()
                .iter()
                .map(|h| (Vector::new(h.normal.clone()), h.offset))
                .collect();
            Polytope64::from_halfspaces(self.dim, &hs)?
        };
        Ok(p)
    }
}

pub fn parse_json(text: &str) -> Result<PolytopeFile> {
    let f: PolytopeFile = serde_json::from_str(text).map_err(|e| anyhow!("line {}, column {}: {e}", e.line(), e.column()))?;
    f.validate()?;
    Ok(f)
}

/// OFF with dimension 3; faces are ignored since the hull is recomputed.
pub fn parse_off(text: &str) -> Result<PolytopeFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, head) = lines.next().ok_or_else(|| anyhow!("empty OFF file"))?;
    let Some(rest) = head.strip_prefix("OFF").map(str::trim) else {
        bail!("line {ln}: expected `OFF` header");
    };
    let (ln, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| anyhow!("missing vertex/face counts"))?
    } else {
        (ln, rest)
    };
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|w| w.parse())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("line {ln}: bad counts"))?;
    let nv = *counts.first().ok_or_else(|| anyhow!("line {ln}: missing vertex count"))?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| anyhow!("expected {nv} vertices, file ended early"))?;
        let c: Vec<f64> = l
            .split_whitespace()
            .map(|w| w.parse())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("line {ln}: bad vertex"))?;
        if c.len() != 3 {
            bail!("line {ln}: expected 3 coordinates, got {}", c.len());
        }
        vertices.push(c);
    }
    let f = PolytopeFile {
        dim: 3,
        vertices: Some(vertices),
        halfspaces: None,
        name: None,
    };
    f.validate()?;
    Ok(f)
}

pub fn load(path: &Path) -> Result<PolytopeFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_off = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("off"));
    let parsed = if is_off { parse_off(&text) } else { parse_json(&text) };
    parsed.with_context(|| format!("parsing {}", path.display()))
}
