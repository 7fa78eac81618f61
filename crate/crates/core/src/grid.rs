//! Grid graphs P_Lx x P_Ly x P_Lz with 0-indexed integer coordinates.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("grid dimensions must be positive, got {0:?}")]
    ZeroDimension([u32; 3]),
    #[error("scale denominator must be positive")]
    ZeroScale,
    #[error("vertex {0} is outside the {1:?} grid")]
    OutOfBounds(Vertex, [u32; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        [Axis::X, Axis::Y, Axis::Z][i]
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 3]", into = "[u32; 3]")]
pub struct Vertex {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Vertex {
    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Vertex { x, y, z }
    }

    pub fn coords(self) -> [u32; 3] {
        [self.x, self.y, self.z]
    }

    pub fn coord(self, axis: Axis) -> u32 {
        self.coords()[axis.index()]
    }

    pub fn with_coord(self, axis: Axis, value: u32) -> Vertex {
        let mut c = self.coords();
        c[axis.index()] = value;
        c.into()
    }
}

impl From<[u32; 3]> for Vertex {
    fn from(c: [u32; 3]) -> Self {
        Vertex::new(c[0], c[1], c[2])
    }
}

impl From<Vertex> for [u32; 3] {
    fn from(v: Vertex) -> Self {
        v.coords()
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Undirected unit-step edge; `a` is the lexicographically smaller endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: Vertex,
    pub b: Vertex,
    pub axis: Axis,
}

impl Edge {
    /// Returns `None` unless `u` and `v` differ by one in exactly one coordinate.
    pub fn new(u: Vertex, v: Vertex) -> Option<Edge> {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        let (ca, cb) = (a.coords(), b.coords());
        let mut axis = None;
        for i in 0..3 {
            if ca[i] != cb[i] {
                if axis.is_some() || ca[i].abs_diff(cb[i]) != 1 {
                    return None;
                }
                axis = Some(Axis::from_index(i));
            }
        }
        axis.map(|axis| Edge { a, b, axis })
    }

    pub fn other(&self, v: Vertex) -> Vertex {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dims: [u32; 3],
    scale: u32,
}

impl GridSpec {
    pub fn new(lx: u32, ly: u32, lz: u32) -> Result<Self, GridError> {
        Self::scaled([lx, ly, lz], 1)
    }

    pub fn square(l: u32) -> Result<Self, GridError> {
        Self::new(l, l, 1)
    }

    /// The (L, L, 4L) host graph of the 3D routing scheme.
    pub fn tower(l: u32) -> Result<Self, GridError> {
        Self::new(l, l, 4 * l)
    }

    /// Lattice coordinates of the embedded graph (1/m)(P_{Lx} x P_{Ly} x P_{Lz}).
    pub fn scaled(dims: [u32; 3], m: u32) -> Result<Self, GridError> {
        if dims.contains(&0) {
            return Err(GridError::ZeroDimension(dims));
        }
        if m == 0 {
            return Err(GridError::ZeroScale);
        }
        Ok(GridSpec { dims, scale: m })
    }

    pub fn dims(&self) -> [u32; 3] {
        self.dims
    }

    pub fn scale_denominator(&self) -> u32 {
        self.scale
    }

    pub fn is_2d(&self) -> bool {
        self.dims[2] == 1
    }

    pub fn num_vertices(&self) -> u64 {
        self.dims.iter().map(|&d| d as u64).product()
    }

    /// (Lx-1)LyLz + Lx(Ly-1)Lz + LxLy(Lz-1).
    pub fn num_edges(&self) -> u64 {
        let [a, b, c] = self.dims.map(|d| d as u64);
        (a - 1) * b * c + a * (b - 1) * c + a * b * (c - 1)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.x < self.dims[0] && v.y < self.dims[1] && v.z < self.dims[2]
    }

    pub fn check(&self, v: Vertex) -> Result<(), GridError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GridError::OutOfBounds(v, self.dims))
        }
    }

    /// Lexicographic index of `v` by (x, y, z).
    pub fn vertex_index(&self, v: Vertex) -> usize {
        ((v.x as usize * self.dims[1] as usize) + v.y as usize) * self.dims[2] as usize + v.z as usize
    }

    pub fn vertex_at(&self, i: usize) -> Vertex {
        let lz = self.dims[2] as usize;
        let ly = self.dims[1] as usize;
        Vertex::new((i / (ly * lz)) as u32, ((i / lz) % ly) as u32, (i % lz) as u32)
    }

    pub fn manhattan_distance(&self, u: Vertex, v: Vertex) -> Result<u32, GridError> {
        self.check(u)?;
        self.check(v)?;
        Ok(manhattan(u, v))
    }
}

pub fn manhattan(u: Vertex, v: Vertex) -> u32 {
    u.x.abs_diff(v.x) + u.y.abs_diff(v.y) + u.z.abs_diff(v.z)
}

/// Materialized grid graph with a fixed lexicographic vertex order and edge numbering.
#[derive(Clone, Debug)]
pub struct GridGraph {
    spec: GridSpec,
    edges: Vec<Edge>,
    edge_ids: HashMap<Edge, usize>,
}

pub fn build_grid(spec: GridSpec) -> GridGraph {
    let mut edges = Vec::with_capacity(spec.num_edges() as usize);
    for i in 0..spec.num_vertices() as usize {
        let v = spec.vertex_at(i);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let c = v.coord(axis);
            if c + 1 < spec.dims[axis.index()] {
                edges.push(Edge { a: v, b: v.with_coord(axis, c + 1), axis });
            }
        }
    }
    let edge_ids = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    GridGraph { spec, edges, edge_ids }
}

impl GridGraph {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn num_vertices(&self) -> usize {
        self.spec.num_vertices() as usize
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.num_vertices()).map(|i| self.spec.vertex_at(i))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_id(&self, e: &Edge) -> Option<usize> {
        self.edge_ids.get(e).copied()
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<usize> {
        Edge::new(u, v).and_then(|e| self.edge_id(&e))
    }

    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(6);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let c = v.coord(axis);
            if c > 0 {
                out.push(v.with_coord(axis, c - 1));
            }
            if c + 1 < self.spec.dims[axis.index()] {
                out.push(v.with_coord(axis, c + 1));
            }
        }
        out
    }

    pub fn manhattan_distance(&self, u: Vertex, v: Vertex) -> Result<u32, GridError> {
        self.spec.manhattan_distance(u, v)
    }
}
