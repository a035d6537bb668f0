//! JSON form of weighted complexes and piecewise affine maps.
//!
//! ```json
//! {"ambient_dim": 2, "lineality": [],
//!  "vertices": [["0","0"]], "rays": [[-1,0],[0,-1],[1,1]],
//!  "cells": [{"dim": 1, "vertex_ids": [0], "ray_ids": [0], "weight": 1}, ...],
//!  "faces": [[3, 0], ...]}
//! ```
//! Coordinates may be given as integers or as `"p/q"` strings. Cells with a `null` weight are
//! lower-dimensional faces; `faces` lists `[facet, cell]` pairs by cell index. Both are
//! emitted only on request and ignored on input.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::cell::Cell;
use super::complex::WeightedComplex;
use super::map::{AffineMap, PLMap};
use crate::arith::rat::{fmt_rat, parse_rat, rat_to_i64, QVec, Rat};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
pub struct CellJson {
    pub dim: usize,
    pub vertex_ids: Vec<usize>,
    #[serde(default)]
    pub ray_ids: Vec<usize>,
    pub weight: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub ambient_dim: usize,
    #[serde(default)]
    pub lineality: Vec<Vec<Value>>,
    pub vertices: Vec<Vec<Value>>,
    #[serde(default)]
    pub rays: Vec<Vec<Value>>,
    pub cells: Vec<CellJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AffineJson {
    pub matrix: Vec<Vec<Value>>,
    pub translation: Vec<Value>,
}

/// A map given by one affine piece per weighted cell of `source`, in order.
#[derive(Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub source: ComplexJson,
    pub target_dim: usize,
    pub pieces: Vec<AffineJson>,
}

fn value_to_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(crate::arith::rat::rat)
            .ok_or_else(|| Error::Parse(format!("non-integer JSON number {n}; use a \"p/q\" string"))),
        Value::String(s) => parse_rat(s),
        other => Err(Error::Parse(format!("expected a coordinate, found {other}"))),
    }
}

fn vec_from_json(v: &[Value], n: usize) -> Result<QVec> {
    if v.len() != n {
        return Err(Error::Dimension(format!("coordinate vector of length {} in dimension {n}", v.len())));
    }
    v.iter().map(value_to_rat).collect()
}

fn rat_to_value(r: &Rat, as_string: bool) -> Value {
    match rat_to_i64(r) {
        Some(i) if !as_string => Value::from(i),
        _ => Value::from(fmt_rat(r)),
    }
}

fn vec_to_json(v: &[Rat], as_string: bool) -> Vec<Value> {
    v.iter().map(|r| rat_to_value(r, as_string)).collect()
}

struct Writer<'a> {
    x: &'a WeightedComplex,
    vid: HashMap<QVec, usize>,
    rid: HashMap<QVec, usize>,
    vertices: Vec<Vec<Value>>,
    rays: Vec<Vec<Value>>,
}

impl Writer<'_> {
    fn cell(&mut self, c: &Cell, weight: Option<i64>) -> CellJson {
        let mut vertex_ids = Vec::new();
        for v in c.vertices() {
            let id = *self.vid.entry(v.clone()).or_insert_with(|| {
                self.vertices.push(vec_to_json(v, true));
                self.vertices.len() - 1
            });
            vertex_ids.push(id);
        }
        // Cells may carry lineality beyond the global one; emit it as a pair of opposite rays.
        let ambient = self.x.ambient_dim();
        let extra: Vec<QVec> = c
            .lineality()
            .iter()
            .filter(|l| !crate::arith::linalg::in_span(self.x.lineality(), l, ambient))
            .flat_map(|l| [l.clone(), crate::arith::rat::neg(l)])
            .collect();
        let mut ray_ids = Vec::new();
        for r in c.rays().iter().chain(&extra) {
            let id = *self.rid.entry(r.clone()).or_insert_with(|| {
                self.rays.push(vec_to_json(r, false));
                self.rays.len() - 1
            });
            ray_ids.push(id);
        }
        CellJson { dim: c.dim(), vertex_ids, ray_ids, weight }
    }
}

pub fn to_json(x: &WeightedComplex, with_faces: bool) -> ComplexJson {
    let mut w = Writer { x, vid: HashMap::new(), rid: HashMap::new(), vertices: Vec::new(), rays: Vec::new() };
    let mut cells: Vec<CellJson> = x.weighted_cells().map(|(c, wt)| w.cell(c, Some(wt))).collect();
    let mut faces = Vec::new();
    if with_faces && !x.is_empty() {
        let fl = x.face_lattice();
        let top = fl.levels.len() - 1;
        // Global index of each face, maximal cells first then downwards.
        let mut ids: Vec<Vec<usize>> = vec![Vec::new(); fl.levels.len()];
        ids[top] = (0..fl.levels[top].len()).collect();
        for k in (0..top).rev() {
            for c in &fl.levels[k] {
                ids[k].push(cells.len());
                cells.push(w.cell(c, None));
            }
        }
        for k in 1..=top {
            for (i, fs) in fl.facets[k].iter().enumerate() {
                for &f in fs {
                    faces.push([ids[k - 1][f], ids[k][i]]);
                }
            }
        }
    }
    ComplexJson {
        ambient_dim: x.ambient_dim(),
        lineality: x.lineality().iter().map(|l| vec_to_json(l, false)).collect(),
        vertices: w.vertices,
        rays: w.rays,
        cells,
        faces,
    }
}

/// The weighted cells of `j` in order, without assembling the complex.
fn weighted_cells(j: &ComplexJson) -> Result<(Vec<QVec>, Vec<(Cell, i64)>)> {
    let n = j.ambient_dim;
    let lin: Vec<QVec> = j.lineality.iter().map(|v| vec_from_json(v, n)).collect::<Result<_>>()?;
    let verts: Vec<QVec> = j.vertices.iter().map(|v| vec_from_json(v, n)).collect::<Result<_>>()?;
    let rays: Vec<QVec> = j.rays.iter().map(|v| vec_from_json(v, n)).collect::<Result<_>>()?;
    let pick = |pool: &[QVec], ids: &[usize], what: &str| {
        ids.iter()
            .map(|&i| pool.get(i).cloned().ok_or_else(|| Error::Parse(format!("{what} index {i} out of range"))))
            .collect::<Result<Vec<_>>>()
    };
    let mut cells = Vec::new();
    for c in &j.cells {
        let Some(w) = c.weight else { continue };
        let cell = Cell::new(n, pick(&verts, &c.vertex_ids, "vertex")?, pick(&rays, &c.ray_ids, "ray")?, lin.clone())?;
        if cell.dim() != c.dim {
            return Err(Error::Parse(format!("cell declared of dimension {} has dimension {}", c.dim, cell.dim())));
        }
        cells.push((cell, w));
    }
    Ok((lin, cells))
}

pub fn from_json(j: &ComplexJson) -> Result<WeightedComplex> {
    let (lin, cells) = weighted_cells(j)?;
    let dim = cells.iter().map(|(c, _)| c.dim()).max().unwrap_or(lin.len());
    WeightedComplex::new(j.ambient_dim, dim, lin, cells)
}

pub fn to_json_string(x: &WeightedComplex, with_faces: bool) -> String {
    serde_json::to_string_pretty(&to_json(x, with_faces)).expect("complex serializes")
}

pub fn from_json_str(s: &str) -> Result<WeightedComplex> {
    let j: ComplexJson = serde_json::from_str(s)?;
    from_json(&j)
}

pub fn map_to_json(f: &PLMap) -> MapJson {
    let pieces = f
        .pieces
        .iter()
        .map(|p| AffineJson {
            matrix: p.matrix.iter().map(|r| vec_to_json(r, false)).collect(),
            translation: vec_to_json(&p.translation, false),
        })
        .collect();
    MapJson { source: to_json(&f.source, false), target_dim: f.target_dim, pieces }
}

pub fn map_from_json(j: &MapJson) -> Result<PLMap> {
    let (_, cells) = weighted_cells(&j.source)?;
    if cells.len() != j.pieces.len() {
        return Err(Error::Parse(format!("{} pieces for {} cells", j.pieces.len(), cells.len())));
    }
    let n = j.source.ambient_dim;
    let mut by_key = HashMap::new();
    for (i, (c, _)) in cells.iter().enumerate() {
        let a = &j.pieces[i];
        let matrix = a.matrix.iter().map(|r| vec_from_json(r, n)).collect::<Result<Vec<_>>>()?;
        let map = AffineMap::new(n, matrix, vec_from_json(&a.translation, j.target_dim)?)?;
        by_key.entry(c.key()).or_insert(map);
    }
    let source = from_json(&j.source)?;
    let pieces = source
        .cells()
        .iter()
        .map(|c| by_key.get(&c.key()).cloned().ok_or_else(|| Error::Parse("a cell of the source has no piece".into())))
        .collect::<Result<_>>()?;
    PLMap::new(source, j.target_dim, pieces)
}

pub fn map_to_json_string(f: &PLMap) -> String {
    serde_json::to_string_pretty(&map_to_json(f)).expect("map serializes")
}

pub fn map_from_json_str(s: &str) -> Result<PLMap> {
    let j: MapJson = serde_json::from_str(s)?;
    map_from_json(&j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::int_vec;
    use crate::polyhedral::ops::equal_mod_refinement;

    fn tripod() -> WeightedComplex {
        let rays = [int_vec(&[-1, 0]), int_vec(&[0, -1]), int_vec(&[1, 1])];
        let cells = rays.iter().map(|r| (Cell::cone(2, vec![r.clone()], vec![]).unwrap(), 2)).collect();
        WeightedComplex::new(2, 1, vec![], cells).unwrap()
    }

    #[test]
    fn round_trip() {
        let x = tripod();
        let s = to_json_string(&x, true);
        let y = from_json_str(&s).unwrap();
        assert!(equal_mod_refinement(&x, &y));
        assert_eq!(y.weights(), &[2, 2, 2]);
        let j = to_json(&x, true);
        assert_eq!(j.cells.len(), 4);
        assert_eq!(j.faces, vec![[3, 0], [3, 1], [3, 2]]);
    }

    #[test]
    fn rejects_bad_coordinates() {
        let s = r#"{"ambient_dim":1,"vertices":[["x"]],"cells":[{"dim":0,"vertex_ids":[0],"weight":1}]}"#;
        assert!(from_json_str(s).is_err());
    }

    #[test]
    fn map_round_trip() {
        let x = tripod();
        let pieces = (0..3).map(|i| AffineMap::from_ints(2, &[vec![i, 1]]).unwrap()).collect();
        let f = PLMap::new(x, 1, pieces).unwrap();
        let g = map_from_json_str(&map_to_json_string(&f)).unwrap();
        assert!(g.agrees_with(&f));
    }
}
