//! JSON formats for surfaces, origamis and cohomology classes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FlatError, Result};
use crate::geom::Vec2;
use crate::origami::Origami;
use crate::surface::{Edge, Polygon, TranslationSurface};

/// `{"polygons": [[[x,y],...],...], "gluings": [[[p,e],[p',e']],...]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceJson {
    pub polygons: Vec<Vec<Vec2>>,
    pub gluings: Vec<(Edge, Edge)>,
}

impl From<&TranslationSurface> for SurfaceJson {
    fn from(s: &TranslationSurface) -> Self {
        SurfaceJson {
            polygons: s.polygons().iter().map(|p| p.vertices.clone()).collect(),
            gluings: s.gluings(),
        }
    }
}

impl SurfaceJson {
    pub fn to_surface(&self) -> Result<TranslationSurface> {
        let polys = self.polygons.iter().map(|v| Polygon::new(v.clone())).collect();
        TranslationSurface::new(polys, &self.gluings)
    }
}

/// Either file format.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SurfaceInput {
    Origami(Origami),
    Polygons(SurfaceJson),
}

impl SurfaceInput {
    pub fn to_surface(&self) -> Result<TranslationSurface> {
        match self {
            SurfaceInput::Origami(o) => Ok(o.to_surface()),
            SurfaceInput::Polygons(p) => p.to_surface(),
        }
    }

    pub fn origami(&self) -> Option<&Origami> {
        match self {
            SurfaceInput::Origami(o) => Some(o),
            SurfaceInput::Polygons(_) => None,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> FlatError {
    FlatError::InvalidArgument(format!("{}: {e}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

pub fn read_surface(path: &Path) -> Result<SurfaceInput> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_regular_2ngon;

    #[test]
    fn surface_roundtrip() {
        let s = build_regular_2ngon(5).unwrap();
        let j = serde_json::to_string(&SurfaceJson::from(&s)).unwrap();
        assert!(j.starts_with("{\"polygons\":[[["));
        let back: SurfaceInput = serde_json::from_str(&j).unwrap();
        let b = back.to_surface().unwrap();
        assert_eq!(b.gluings(), s.gluings());
        assert!(b.polygons().iter().zip(s.polygons()).all(|(p, q)| p.vertices == q.vertices));
        let o: SurfaceInput = serde_json::from_str(r#"{"n":3,"h":[2,1,3],"v":[3,2,1]}"#).unwrap();
        assert_eq!(o.origami(), Some(&Origami::l_shape()));
    }
}
