//! Surface references used on the command line and in configs.
//!
//! `torus`, `l` (the 3-square L), `ngon:<n>` (the regular 2n-gon), `origami:<h>/<v>` with
//! comma-separated 1-based images, or a path to a surface or origami JSON file.

use std::path::Path;

use flatlab_core::io::read_surface;
use flatlab_core::marked::MarkedSurface;
use flatlab_core::{build_regular_2ngon, Origami, TranslationSurface};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceRef {
    Origami(Origami),
    Ngon(usize),
    File(String),
}

fn perm(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| HarnessError::InvalidConfig(format!("bad permutation entry {x:?}"))))
        .collect()
}

impl SurfaceRef {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "torus" => return Ok(SurfaceRef::Origami(Origami::torus())),
            "l" | "l-origami" => return Ok(SurfaceRef::Origami(Origami::l_shape())),
            _ => {}
        }
        if let Some(n) = s.strip_prefix("ngon:") {
            let n = n.parse().map_err(|_| HarnessError::InvalidConfig(format!("bad n in {s:?}")))?;
            return Ok(SurfaceRef::Ngon(n));
        }
        if let Some(rest) = s.strip_prefix("origami:") {
            let (h, v) = rest
                .split_once('/')
                .ok_or_else(|| HarnessError::InvalidConfig(format!("expected origami:<h>/<v>, got {s:?}")))?;
            return Ok(SurfaceRef::Origami(Origami::from_one_based(&perm(h)?, &perm(v)?)?));
        }
        if Path::new(s).exists() {
            return Ok(SurfaceRef::File(s.to_string()));
        }
        Err(HarnessError::InvalidConfig(format!("unknown surface {s:?}")))
    }

    pub fn surface(&self) -> Result<TranslationSurface> {
        Ok(match self {
            SurfaceRef::Origami(o) => o.to_surface(),
            SurfaceRef::Ngon(n) => build_regular_2ngon(*n)?,
            SurfaceRef::File(p) => read_surface(Path::new(p))?.to_surface()?,
        })
    }

    pub fn origami(&self) -> Result<Option<Origami>> {
        Ok(match self {
            SurfaceRef::Origami(o) => Some(o.clone()),
            SurfaceRef::Ngon(_) => None,
            SurfaceRef::File(p) => read_surface(Path::new(p))?.origami().cloned(),
        })
    }

    pub fn marked(&self) -> Result<MarkedSurface> {
        Ok(MarkedSurface::own(&self.surface()?)?.0)
    }

    /// Whether the surface is the one-square torus, where pushes can be done on lattices.
    pub fn is_unit_torus(&self) -> Result<bool> {
        Ok(self.origami()?.is_some_and(|o| o.n() == 1))
    }
}
