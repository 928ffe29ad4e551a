//! Potential file format.
//!
//! A potential is a JSON object tagged by `type`:
//!
//! ```json
//! {"type": "primitive-1d", "interval": [0, 1],
//!  "smooth": [0, 0], "deltas": [{"site": 0.5, "strength": 10}], "cells": 2}
//! ```
//!
//! describes `q = s'(x) + Σ strength·δ(x - site)` through its primitive
//! `u = s + Σ strength·H(x - site)`, with `s` the polynomial
//! `smooth[0] + smooth[1] x + …`. Complex numbers are either a plain number
//! or `{"re": .., "im": ..}`.
//!
//! ```json
//! {"type": "field-2d", "field": {"kind": "radial", "center": [0, 0], "power": -0.5}}
//! ```
//!
//! describes a planar field `V` with `q = div V`. Field kinds:
//! `constant` (`value`), `radial` (`scale·|x-c|^power` along `x - c`),
//! `layered` (a 1D primitive along `axis`) and `rotation` (`amplitude ·
//! rot(sin(kx) sin(ky))`, divergence free).

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use singspec_core::potentials::{primitive_from_deltas, Domain, Grid1D, Primitive1D, VectorField};
use singspec_core::C64;

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Parts {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl ComplexSpec {
    pub fn value(self) -> C64 {
        match self {
            Self::Real(x) => C64::new(x, 0.0),
            Self::Parts { re, im } => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSpec {
    pub site: f64,
    pub strength: ComplexSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Primitive1DSpec {
    pub interval: [f64; 2],
    /// Coefficients of the smooth part of the primitive, lowest degree first.
    #[serde(default)]
    pub smooth: Vec<ComplexSpec>,
    #[serde(default)]
    pub deltas: Vec<DeltaSpec>,
    /// Uniform cells of the primitive's grid, at least 2; delta sites are
    /// added as nodes. The smooth part is interpolated quadratically per cell.
    #[serde(default = "two")]
    pub cells: usize,
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant { value: [ComplexSpec; 2] },
    Radial {
        center: [f64; 2],
        power: f64,
        #[serde(default = "unit")]
        scale: ComplexSpec,
    },
    Layered { axis: usize, profile: Primitive1DSpec },
    Rotation {
        #[serde(default = "unit")]
        amplitude: ComplexSpec,
        #[serde(default = "unit_freq")]
        frequency: f64,
    },
}

fn unit() -> ComplexSpec {
    ComplexSpec::Real(1.0)
}

fn unit_freq() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Field2DSpec {
    pub field: FieldSpec,
    /// Declared integrability exponent `p` with `V ∈ L_p`; defaults to a
    /// value the field kind satisfies.
    #[serde(default)]
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PotentialSpec {
    #[serde(rename = "primitive-1d")]
    Primitive1D(Primitive1DSpec),
    #[serde(rename = "field-2d")]
    Field2D(Field2DSpec),
}

/// Inline potential or a path to a potential file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSource {
    File { path: String },
    Inline(PotentialSpec),
}

impl PotentialSource {
    pub fn load(&self, base: Option<&Path>) -> AppResult<PotentialSpec> {
        match self {
            Self::Inline(p) => Ok(p.clone()),
            Self::File { path } => {
                let full = match base {
                    Some(dir) if Path::new(path).is_relative() => dir.join(path),
                    _ => Path::new(path).to_path_buf(),
                };
                read_potential(&full)
            }
        }
    }
}

pub fn read_potential(path: &Path) -> AppResult<PotentialSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::config(format!("potential file {}: {e}", path.display())))?;
    parse_potential(&text).map_err(|e| AppError::config(format!("potential file {}: {e}", path.display())))
}

pub fn parse_potential(text: &str) -> Result<PotentialSpec, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

impl Primitive1DSpec {
    pub fn a(&self) -> f64 {
        self.interval[0]
    }

    pub fn b(&self) -> f64 {
        self.interval[1]
    }

    pub fn check(&self) -> AppResult<()> {
        let [a, b] = self.interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(AppError::config(format!("potential.interval: need a < b, got [{a}, {b}]")));
        }
        if self.cells < 2 {
            return Err(AppError::config("potential.cells: must be at least 2"));
        }
        for (i, d) in self.deltas.iter().enumerate() {
            if !(d.site > a && d.site < b) {
                return Err(AppError::config(format!("potential.deltas[{i}].site: {} not inside ({a}, {b})", d.site)));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> AppResult<Primitive1D> {
        self.check()?;
        let sites: Vec<f64> = self.deltas.iter().map(|d| d.site).collect();
        let grid = Grid1D::uniform_with(self.a(), self.b(), self.cells, &sites)?;
        let coeffs: Vec<C64> = self.smooth.iter().map(|c| c.value()).collect();
        let deltas: Vec<(f64, C64)> = self.deltas.iter().map(|d| (d.site, d.strength.value())).collect();
        let base = move |x: f64| coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c);
        Ok(primitive_from_deltas(base, &deltas, &grid)?)
    }
}

impl Field2DSpec {
    /// Declared exponent, defaulting per kind: bounded fields get 4,
    /// `|x|^power` fields the midpoint of the admissible range `p < 2/|power|`.
    pub fn exponent(&self) -> f64 {
        if let Some(p) = self.exponent {
            return p;
        }
        match &self.field {
            FieldSpec::Radial { power, .. } if *power < 0.0 => 0.5 * (2.0 + 2.0 / power.abs()),
            _ => 4.0,
        }
    }

    pub fn build(&self) -> AppResult<VectorField> {
        let p = self.exponent();
        if !(p > 1.0) {
            return Err(AppError::config(format!("potential.exponent: must exceed 1, got {p}")));
        }
        let field = match &self.field {
            FieldSpec::Constant { value } => {
                let v = [value[0].value(), value[1].value()];
                VectorField::new(2, Arc::new(move |_| [v[0], v[1], C64::new(0.0, 0.0)]), Vec::new(), p)?
            }
            FieldSpec::Radial { center, power, scale } => {
                let (c, pw, s) = (*center, *power, scale.value());
                let sites = if pw < 0.0 { vec![[c[0], c[1], 0.0]] } else { Vec::new() };
                VectorField::new(
                    2,
                    Arc::new(move |x: &[f64]| {
                        let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
                        let r = dx.hypot(dy);
                        if r == 0.0 {
                            return [C64::new(0.0, 0.0); 3];
                        }
                        let m = r.powf(pw - 1.0);
                        [s * (dx * m), s * (dy * m), C64::new(0.0, 0.0)]
                    }),
                    sites,
                    p,
                )?
            }
            FieldSpec::Layered { axis, profile } => {
                if *axis > 1 {
                    return Err(AppError::config("potential.field.axis: must be 0 or 1"));
                }
                VectorField::layered(2, profile.build()?, *axis, p)?
            }
            FieldSpec::Rotation { amplitude, frequency } => {
                let (a, k) = (amplitude.value(), *frequency);
                VectorField::new(
                    2,
                    Arc::new(move |x: &[f64]| {
                        let (sx, cx) = (k * x[0]).sin_cos();
                        let (sy, cy) = (k * x[1]).sin_cos();
                        [a * (k * sx * cy), a * (-k * cx * sy), C64::new(0.0, 0.0)]
                    }),
                    Vec::new(),
                    p,
                )?
            }
        };
        Ok(field)
    }
}

impl PotentialSpec {
    pub fn primitive(&self) -> AppResult<Primitive1D> {
        match self {
            Self::Primitive1D(p) => p.build(),
            Self::Field2D(_) => Err(AppError::config("potential.type: a 1D problem needs `primitive-1d`")),
        }
    }

    pub fn field(&self) -> AppResult<VectorField> {
        match self {
            Self::Field2D(f) => f.build(),
            Self::Primitive1D(_) => Err(AppError::config("potential.type: a 2D problem needs `field-2d`")),
        }
    }
}

/// Planar domain from a `rect:Lx,Ly,nx,ny` or `disk:R,level` descriptor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    Rect { lx: f64, ly: f64, nx: usize, ny: usize },
    Disk { radius: f64, level: usize },
}

impl DomainSpec {
    pub fn parse(s: &str) -> AppResult<Self> {
        let bad = || AppError::config(format!("domain: expected rect:Lx,Ly,nx,ny or disk:R,level, got `{s}`"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
        match (kind.trim(), parts.as_slice()) {
            ("rect", [lx, ly, nx, ny]) => Ok(Self::Rect {
                lx: lx.parse().map_err(|_| bad())?,
                ly: ly.parse().map_err(|_| bad())?,
                nx: nx.parse().map_err(|_| bad())?,
                ny: ny.parse().map_err(|_| bad())?,
            }),
            ("disk", [r, level]) => Ok(Self::Disk { radius: r.parse().map_err(|_| bad())?, level: level.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }

    pub fn mesh(&self) -> AppResult<singspec_core::femnd::Mesh2D> {
        Ok(match *self {
            Self::Rect { lx, ly, nx, ny } => singspec_core::femnd::mesh_rectangle(lx, ly, nx, ny)?,
            Self::Disk { radius, level } => singspec_core::femnd::mesh_disk(radius, level)?,
        })
    }

    /// The exact domain (the disk, not its polygon).
    pub fn domain(&self) -> Domain {
        match *self {
            Self::Rect { lx, ly, .. } => Domain::Rectangle { lo: [0.0, 0.0], hi: [lx, ly] },
            Self::Disk { radius, .. } => Domain::Disk { center: [0.0, 0.0], radius },
        }
    }

    pub fn volume(&self) -> f64 {
        self.domain().volume()
    }
}
