//! Fault-tolerant architecture planning: quantum buses as robust black boxes,
//! the colored cube assignment that gives every grid edge its own block of
//! auxiliary qubits, bus plans for 3D and quasi-2D pairings, qubit and depth
//! accounting for whole circuits, and a surrogate failure model for the buses.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::circuit::{extract_layer_pairing, AdaptiveCircuit, CircuitError};
use crate::grid::{build_grid, Axis, GridSpec, Vertex};
use crate::localize::ceil_sqrt;
use crate::noise::{
    bell_measure_layer, commute_through_adaptive, parallel_repetition_bound, random_nonidentity_pauli,
    reduce_bell_pair_error, sharded_support_count, strength_entanglement_swap, strength_teleport, swap_chain_control,
    LsReport, Monomial, NoiseError, NoiseStrength, RobustnessProfile, SupportCounter,
};
use crate::pauli::{PauliOp, SupportSet};
use crate::rng::SeedStream;
use crate::routing::{route_2d, route_3d_subset, Pairing, RoutePath, RoutingError};

/// Failure threshold of the odd and even bus constructions.
pub const BUS_P0: f64 = 1.0 / 5004.0;
pub const BUS_WIDTH_FACTOR: u64 = 82;
/// Layers of one bus: resource state (at most 10), measurement, correction.
pub const BUS_DEPTH: usize = 12;
/// Stitching Bell measurement plus correction.
pub const STITCH_DEPTH: usize = 4;
/// Bus layer, stitch layer, swap onto P, teleport.
pub const FT_PAIR_DEPTH: usize = BUS_DEPTH + STITCH_DEPTH + 1 + 4;
/// Bus layer, stitch layer, teleport back.
pub const FT_PAIR_INVERSE_DEPTH: usize = BUS_DEPTH + STITCH_DEPTH + 4;
pub const FT_GADGET_DEPTH: usize = FT_PAIR_DEPTH + 1 + FT_PAIR_INVERSE_DEPTH;

#[derive(Debug, Error, PartialEq)]
pub enum FtError {
    #[error("bus ({delta} x {delta} x {r}) violates delta >= 8 log2 R; needs delta >= {min_delta}")]
    BusCondition { delta: u64, r: u64, min_delta: u64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("threshold exceeded at stage {stage}: {source}")]
    Threshold { stage: String, source: NoiseError },
    #[error("internal check failed: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BusCase {
    R2,
    Odd,
    Even,
}

/// A Delta x Delta x R bus and its robustness profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BusSpec {
    pub delta: u64,
    pub r: u64,
    pub case: BusCase,
    pub profile: RobustnessProfile,
}

/// 2^a >= b^k, exactly.
fn pow2_at_least(a: u64, b: u64, k: u32) -> bool {
    let lhs = BigUint::from(1u8) << a;
    lhs >= BigUint::from(b).pow(k)
}

/// delta >= 8 log2 r, i.e. 2^delta >= r^8.
pub fn bus_condition_holds(delta: u64, r: u64) -> bool {
    pow2_at_least(delta, r, 8)
}

/// Smallest delta with 2^delta >= r^8.
pub fn min_bus_delta(r: u64) -> u64 {
    let r8 = BigUint::from(r).pow(8);
    let bits = r8.bits();
    // r^8 is a power of two iff r is
    if r.is_power_of_two() {
        bits - 1
    } else {
        bits
    }
}

pub fn bus_profile(delta: u64, r: u64) -> Result<BusSpec, FtError> {
    if r < 2 || delta < 1 {
        return Err(FtError::Parameter(format!("bus needs R >= 2 and delta >= 1, got R = {r}, delta = {delta}")));
    }
    let odd = |p0: f64, a: f64| RobustnessProfile::new(p0, Monomial::new(a, 1.0), 2, 1);
    if r == 2 {
        let profile = odd(1.0, 2.0).map_err(|e| FtError::Internal(e.to_string()))?;
        return Ok(BusSpec { delta, r, case: BusCase::R2, profile });
    }
    if !bus_condition_holds(delta, r) {
        return Err(FtError::BusCondition { delta, r, min_delta: min_bus_delta(r) });
    }
    let d = (delta + 1) / 2;
    let (case, r_cluster) = if r % 2 == 1 { (BusCase::Odd, r) } else { (BusCase::Even, r - 1) };
    // cluster distance d must satisfy 4 log2 R' <= d
    if !pow2_at_least(d, r_cluster, 4) {
        return Err(FtError::Internal(format!("4 log2 {r_cluster} > {d} although the bus condition holds")));
    }
    let profile = odd(BUS_P0, 1.0 / BUS_P0).map_err(|e| FtError::Internal(e.to_string()))?;
    Ok(BusSpec { delta, r, case, profile })
}

/// ceil(log2 l) for l >= 1.
pub fn ceil_log2(l: u64) -> u64 {
    if l <= 1 {
        0
    } else {
        64 - (l - 1).leading_zeros() as u64
    }
}

/// m = 82 ceil(log2 L).
pub fn bus_width(l: u64) -> u64 {
    BUS_WIDTH_FACTOR * ceil_log2(l)
}

/// The check m >= 8 log(10 m L), under both logarithms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthCheck {
    pub l: u64,
    pub m: u64,
    pub rhs_natural: f64,
    pub rhs_base2: f64,
    pub holds_natural: bool,
    pub holds_base2: bool,
}

pub fn width_check(l: u64, m: u64) -> WidthCheck {
    let x = 10.0 * m as f64 * l as f64;
    let rhs_natural = 8.0 * x.ln();
    WidthCheck {
        l,
        m,
        rhs_natural,
        rhs_base2: 8.0 * x.log2(),
        holds_natural: m as f64 >= rhs_natural,
        holds_base2: bus_condition_holds(m, 10 * m * l),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub fn of_axis(a: Axis) -> Color {
        match a {
            Axis::X => Color::Red,
            Axis::Y => Color::Green,
            Axis::Z => Color::Blue,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A qubit of the fine lattice: a color at a site in units of 1/m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FtQubit {
    pub color: Color,
    pub site: [u64; 3],
}

/// The half-open cube [c, c + side)^3 of one color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub color: Color,
    pub corner: [u64; 3],
    pub side: u64,
}

impl Cube {
    pub fn contains(&self, q: &FtQubit) -> bool {
        q.color == self.color && (0..3).all(|i| q.site[i] >= self.corner[i] && q.site[i] < self.corner[i] + self.side)
    }

    pub fn num_sites(&self) -> u64 {
        self.side.pow(3)
    }

    pub fn sites(&self) -> impl Iterator<Item = [u64; 3]> + '_ {
        let [a, b, c] = self.corner;
        let s = self.side;
        (a..a + s).flat_map(move |x| (b..b + s).flat_map(move |y| (c..c + s).map(move |z| [x, y, z])))
    }
}

/// Cube of the edge starting at its lower endpoint, colored by axis.
pub fn cube_of(e: &crate::grid::Edge, m: u64) -> Cube {
    let a = e.a;
    Cube { color: Color::of_axis(e.axis), corner: [a.x as u64 * m, a.y as u64 * m, a.z as u64 * m], side: m }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubeAssignment {
    pub spec: GridSpec,
    pub m: u64,
    /// Indexed by edge id of `build_grid(spec)`.
    pub cubes: Vec<Cube>,
}

/// Cubes for the (L, L, 4L) grid.
pub fn cube_assignment(l: u32, m: u64) -> Result<CubeAssignment, FtError> {
    if l < 2 {
        return Err(FtError::Parameter(format!("L = {l} < 2")));
    }
    let spec = GridSpec::tower(l).map_err(|e| FtError::Parameter(e.to_string()))?;
    cube_assignment_for(spec, m)
}

pub fn cube_assignment_for(spec: GridSpec, m: u64) -> Result<CubeAssignment, FtError> {
    if m == 0 {
        return Err(FtError::Parameter("m = 0".into()));
    }
    let g = build_grid(spec);
    Ok(CubeAssignment { spec, m, cubes: g.edges().iter().map(|e| cube_of(e, m)).collect() })
}

impl CubeAssignment {
    /// Fine-lattice extent (Lx m, Ly m, Lz m).
    pub fn lattice(&self) -> [u64; 3] {
        self.spec.dims().map(|d| d as u64 * self.m)
    }

    /// Marks every (color, site) in a bitmap; reports the first collision or
    /// a cube leaving the lattice.
    pub fn verify_disjoint_exhaustive(&self) -> Result<(), String> {
        let [lx, ly, lz] = self.lattice();
        let per_color = (lx * ly * lz) as usize;
        let mut seen = BitVec::zeros(3 * per_color);
        for (e, c) in self.cubes.iter().enumerate() {
            for s in c.sites() {
                if s[0] >= lx || s[1] >= ly || s[2] >= lz {
                    return Err(format!("cube of edge {e} leaves the lattice at {s:?}"));
                }
                let idx = c.color.index() * per_color + ((s[0] * ly + s[1]) * lz + s[2]) as usize;
                if seen.get(idx) {
                    let q = FtQubit { color: c.color, site: s };
                    let other = self.cubes.iter().position(|d| d.contains(&q)).unwrap();
                    return Err(format!("edges {other} and {e} share {:?} {s:?}", c.color));
                }
                seen.set(idx, true);
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FtMode {
    #[serde(rename = "3d")]
    ThreeD,
    #[serde(rename = "quasi2d")]
    Quasi2D,
}

impl fmt::Display for FtMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FtMode::ThreeD => "3d",
            FtMode::Quasi2D => "quasi2d",
        })
    }
}

impl FromStr for FtMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "3d" => Ok(FtMode::ThreeD),
            "quasi2d" | "quasi-2d" => Ok(FtMode::Quasi2D),
            _ => Err(format!("unknown mode {s:?}, expected 3d or quasi2d")),
        }
    }
}

impl FtMode {
    pub fn colors(self) -> u64 {
        match self {
            FtMode::ThreeD => 3,
            FtMode::Quasi2D => 2,
        }
    }

    pub fn max_buses_per_path(self) -> usize {
        match self {
            FtMode::ThreeD => 4,
            FtMode::Quasi2D => 2,
        }
    }

    pub fn grid(self, l: u32) -> Result<GridSpec, FtError> {
        match self {
            FtMode::ThreeD => GridSpec::tower(l),
            FtMode::Quasi2D => GridSpec::square(l),
        }
        .map_err(|e| FtError::Parameter(e.to_string()))
    }
}

/// One bus along a straight path segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedBus {
    pub path: usize,
    /// Position of the segment along its path.
    pub alpha: usize,
    pub axis: Axis,
    pub color: Color,
    pub from: Vertex,
    pub to: Vertex,
    pub edges: Vec<usize>,
    pub spec: BusSpec,
    /// Bell output at the `from` end.
    pub s: FtQubit,
    /// Bell output at the `to` end.
    pub t: FtQubit,
}

impl PlacedBus {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn num_qubits(&self, m: u64) -> u64 {
        self.edges.len() as u64 * m * m * m
    }

    pub fn contains(&self, q: &FtQubit, assignment: &CubeAssignment) -> bool {
        self.edges.iter().any(|&e| assignment.cubes[e].contains(q))
    }
}

/// Bell measurement joining consecutive buses of one path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stitch {
    pub path: usize,
    pub first: FtQubit,
    pub second: FtQubit,
    /// Fine-lattice Manhattan distance between the two qubits.
    pub distance: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtPath {
    pub i: usize,
    pub j: usize,
    pub from: Vertex,
    pub to: Vertex,
    pub length: usize,
    pub buses: Vec<usize>,
    pub output: (FtQubit, FtQubit),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtPlan {
    pub mode: FtMode,
    pub l: u32,
    pub m: u64,
    pub lattice: [u64; 3],
    pub sites: Vec<Vertex>,
    pub paths: Vec<FtPath>,
    pub buses: Vec<PlacedBus>,
    pub stitches: Vec<Stitch>,
    pub width_check: WidthCheck,
    /// colors x fine-lattice sites.
    pub aux_qubits: u64,
}

/// Splits a path into maximal straight runs.
pub fn straight_segments(path: &RoutePath) -> Vec<RoutePath> {
    let v = &path.vertices;
    let mut out = Vec::new();
    if v.len() < 2 {
        return out;
    }
    let axis_of = |a: Vertex, b: Vertex| crate::grid::Edge::new(a, b).map(|e| e.axis);
    let mut start = 0;
    for k in 1..v.len() - 1 {
        if axis_of(v[k - 1], v[k]) != axis_of(v[k], v[k + 1]) {
            out.push(RoutePath::new(v[start..=k].to_vec()));
            start = k;
        }
    }
    out.push(RoutePath::new(v[start..].to_vec()));
    out
}

/// The Bell output of a bus at one end of its segment: the first or last
/// fine site of the bus along its axis, at the low corner of the cross-section.
fn bus_end(axis: Axis, lo: Vertex, hi: Vertex, at: Vertex, m: u64) -> FtQubit {
    let mut site = [lo.x as u64 * m, lo.y as u64 * m, lo.z as u64 * m];
    if at == hi {
        site[axis.index()] = hi.coord(axis) as u64 * m - 1;
    }
    FtQubit { color: Color::of_axis(axis), site }
}

fn plan_paths(
    mode: FtMode,
    l: u32,
    sites: Vec<Vertex>,
    routed: Vec<(usize, usize, RoutePath)>,
) -> Result<FtPlan, FtError> {
    if l < 2 {
        return Err(FtError::Parameter(format!("L = {l} < 2")));
    }
    let m = bus_width(l as u64);
    let spec = mode.grid(l)?;
    let graph = build_grid(spec);
    let lattice = spec.dims().map(|d| d as u64 * m);
    let mut paths = Vec::new();
    let mut buses = Vec::new();
    let mut stitches = Vec::new();
    for (r, (i, j, path)) in routed.into_iter().enumerate() {
        let segs = straight_segments(&path);
        if segs.len() > mode.max_buses_per_path() {
            return Err(FtError::Internal(format!("path {r} has {} straight segments", segs.len())));
        }
        let mut ids = Vec::new();
        for (alpha, seg) in segs.iter().enumerate() {
            let (u, w) = (seg.start().unwrap(), seg.end().unwrap());
            let axis = seg.straight_axis().ok_or_else(|| FtError::Internal("segment is not straight".into()))?;
            let (lo, hi) = if u.coord(axis) < w.coord(axis) { (u, w) } else { (w, u) };
            let edges = seg
                .edges()
                .map(|e| graph.edge_id(&e).ok_or_else(|| FtError::Internal(format!("edge {e:?} not in grid"))))
                .collect::<Result<Vec<_>, _>>()?;
            let spec = bus_profile(m, m * edges.len() as u64)?;
            ids.push(buses.len());
            buses.push(PlacedBus {
                path: r,
                alpha,
                axis,
                color: Color::of_axis(axis),
                from: u,
                to: w,
                edges,
                spec,
                s: bus_end(axis, lo, hi, u, m),
                t: bus_end(axis, lo, hi, w, m),
            });
        }
        for w in ids.windows(2) {
            let (a, b) = (&buses[w[0]], &buses[w[1]]);
            stitches.push(Stitch { path: r, first: a.t, second: b.s, distance: lattice_distance(&a.t, &b.s) });
        }
        let output = (buses[ids[0]].s, buses[*ids.last().unwrap()].t);
        paths.push(FtPath {
            i,
            j,
            from: path.start().unwrap(),
            to: path.end().unwrap(),
            length: path.len(),
            buses: ids,
            output,
        });
    }
    let plan = FtPlan {
        mode,
        l,
        m,
        lattice,
        sites,
        paths,
        buses,
        stitches,
        width_check: width_check(l as u64, m),
        aux_qubits: mode.colors() * lattice.iter().product::<u64>(),
    };
    plan.verify()?;
    Ok(plan)
}

/// Bus plan for a pairing of bottom-floor vertices of the (L, L, 4L) grid.
pub fn plan_ft_entangle_3d(l: u32, pairing: &Pairing) -> Result<FtPlan, FtError> {
    if l < 2 {
        return Err(FtError::Parameter(format!("L = {l} < 2")));
    }
    let segmented = route_3d_subset(l, pairing)?;
    let sites: Vec<Vertex> = pairing.vertices().collect();
    let routed = segmented.iter().enumerate().map(|(r, s)| (2 * r, 2 * r + 1, s.path())).collect();
    plan_paths(FtMode::ThreeD, l, sites, routed)
}

/// Bus plan for a pairing of the diagonal sites (i, i, 0), given by index.
pub fn plan_ft_entangle_quasi2d(l: u32, pairs: &[(usize, usize)]) -> Result<FtPlan, FtError> {
    if l < 2 {
        return Err(FtError::Parameter(format!("L = {l} < 2")));
    }
    let sites: Vec<Vertex> = (0..l).map(|i| Vertex::new(i, i, 0)).collect();
    plan_for_sites(FtMode::Quasi2D, l, sites, pairs)
}

/// Plan for index pairs over an explicit site list.
pub fn plan_for_sites(mode: FtMode, l: u32, sites: Vec<Vertex>, pairs: &[(usize, usize)]) -> Result<FtPlan, FtError> {
    for &(i, j) in pairs {
        if i >= sites.len() || j >= sites.len() || i == j {
            return Err(FtError::Parameter(format!("pair ({i}, {j}) is not a pair of distinct sites")));
        }
    }
    let pairing = Pairing::new(pairs.iter().map(|&(i, j)| (sites[i], sites[j])).collect());
    let paths: Vec<RoutePath> = if pairs.is_empty() {
        Vec::new()
    } else {
        match mode {
            FtMode::Quasi2D => route_2d(l, &pairing)?,
            FtMode::ThreeD => route_3d_subset(l, &pairing)?.into_iter().map(|s| s.path()).collect(),
        }
    };
    let routed = pairs
        .iter()
        .zip(paths)
        .map(|(&(i, j), p)| (i, j, if p.start() == Some(sites[i]) { p } else { p.reversed() }))
        .collect();
    plan_paths(mode, l, sites, routed)
}

impl FtPlan {
    pub fn assignment(&self) -> CubeAssignment {
        cube_assignment_for(self.mode.grid(self.l).expect("plan grid is valid"), self.m).expect("m > 0")
    }

    /// Total with n data sites, each holding Q_j and P_j.
    pub fn total_qubits(&self, n: u64) -> u64 {
        2 * n + self.aux_qubits
    }

    /// Plan-time invariants: bus conditions, edge-disjoint buses (so the
    /// cube-owned qubit sets are disjoint), outputs inside their own bus and
    /// every stitch qubit used once.
    pub fn verify(&self) -> Result<(), FtError> {
        let mut used = HashSet::new();
        for (b, bus) in self.buses.iter().enumerate() {
            if bus.edges.is_empty() {
                return Err(FtError::Internal(format!("bus {b} is empty")));
            }
            if !bus_condition_holds(bus.spec.delta, bus.spec.r) {
                return Err(FtError::Internal(format!("bus {b} violates the width condition")));
            }
            for &e in &bus.edges {
                if !used.insert(e) {
                    return Err(FtError::Internal(format!("edge {e} carries two buses")));
                }
            }
        }
        if self.buses.len() > self.mode.max_buses_per_path() * self.paths.len() {
            return Err(FtError::Internal("too many buses".into()));
        }
        let assignment = self.assignment();
        let mut ends = HashSet::new();
        for (b, bus) in self.buses.iter().enumerate() {
            for q in [bus.s, bus.t] {
                if !bus.contains(&q, &assignment) {
                    return Err(FtError::Internal(format!("output {q:?} of bus {b} lies outside it")));
                }
                if !ends.insert(q) {
                    return Err(FtError::Internal(format!("qubit {q:?} is an output of two buses")));
                }
            }
        }
        let mut st = HashSet::new();
        for s in &self.stitches {
            if !st.insert(s.first) || !st.insert(s.second) {
                return Err(FtError::Internal("a stitch qubit is measured twice".into()));
            }
        }
        Ok(())
    }

    /// Sum of bus sizes and the size of their union, counted through the
    /// disjoint edge cubes.
    pub fn bus_qubit_counts(&self) -> (u64, u64) {
        let sum = self.buses.iter().map(|b| b.num_qubits(self.m)).sum();
        let distinct: BTreeSet<usize> = self.buses.iter().flat_map(|b| b.edges.iter().copied()).collect();
        (sum, distinct.len() as u64 * self.m.pow(3))
    }

    pub fn max_segment(&self) -> usize {
        self.buses.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    pub fn profiles(&self) -> Vec<RobustnessProfile> {
        self.buses.iter().map(|b| b.spec.profile).collect()
    }

    /// Threshold of the plan: the smallest bus p0.
    pub fn p0(&self) -> f64 {
        self.buses.iter().map(|b| b.spec.profile.p0).fold(1.0, f64::min)
    }

    /// Output register pairs as indices (2r, 2r + 1) of the surrogate output.
    pub fn output_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.paths.len()).map(|r| (2 * r, 2 * r + 1)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans always serialize")
    }

    pub fn from_json(s: &str) -> Result<FtPlan, FtError> {
        let plan: FtPlan = serde_json::from_str(s).map_err(|e| FtError::Circuit(CircuitError::Json(e.to_string())))?;
        plan.verify()?;
        Ok(plan)
    }
}

/// One effective-noise stage: its strength map and (optionally) its value at p.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseStage {
    pub stage: String,
    pub monomial: Monomial,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

/// Swap-chain length in buses per path used by the composition.
pub fn chain_length(mode: FtMode) -> usize {
    mode.max_buses_per_path()
}

/// bus profiles -> parallel repetition (Bell outputs, r~ = 1) -> entanglement
/// swapping -> teleportation, as monomials C p^c.
pub fn compose_noise(mode: FtMode) -> Vec<NoiseStage> {
    let bus = Monomial::new(1.0 / BUS_P0, 1.0);
    let rep = bus.repeated(1);
    let swap = rep.through_swap(chain_length(mode));
    let tele = swap.through_teleport();
    [("bus", bus), ("parallel_repetition", rep), ("entanglement_swap", swap), ("teleport", tele)]
        .into_iter()
        .map(|(s, m)| NoiseStage { stage: s.into(), monomial: m, value: None })
        .collect()
}

/// The same chain evaluated at p with the strength functions; fails at the
/// first stage whose threshold p exceeds.
pub fn effective_strength(mode: FtMode, p: NoiseStrength) -> Result<Vec<NoiseStage>, FtError> {
    let mut stages = compose_noise(mode);
    let spec = bus_profile(BUS_WIDTH_FACTOR, 3)?;
    let thr = |stage: &str, source: NoiseError| FtError::Threshold { stage: stage.into(), source };
    let bus = spec
        .profile
        .strength(p)
        .ok_or_else(|| thr("bus", NoiseError::ThresholdExceeded { index: 0, p: p.value(), p0: spec.profile.p0 }))?;
    let rep = parallel_repetition_bound(&[spec.profile], p, true).map_err(|e| thr("parallel_repetition", e))?;
    let swap = strength_entanglement_swap(rep, chain_length(mode)).map_err(|e| thr("entanglement_swap", e))?;
    let tele = strength_teleport(swap);
    for (s, v) in stages.iter_mut().zip([bus, rep, swap, tele]) {
        s.value = Some(v.value());
    }
    Ok(stages)
}

/// Per-layer accounting of a fault-tolerant localization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtLayerPlan {
    pub source_layer: usize,
    pub pairs: Vec<(usize, usize)>,
    pub buses: usize,
    pub stitches: usize,
    pub max_segment: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtLocalizedPlan {
    pub mode: FtMode,
    pub n_source: usize,
    pub n: usize,
    pub l: u32,
    pub m: u64,
    pub lattice: [u64; 3],
    pub sites: Vec<Vertex>,
    pub n_total: u64,
    pub source_depth: usize,
    pub depth: usize,
    pub gadget_depth: usize,
    pub layers: Vec<FtLayerPlan>,
    pub width_check: WidthCheck,
    pub noise: Vec<NoiseStage>,
}

/// Closed-form totals: 2n + 2 L^2 m^3 (quasi-2D), 2n + 12 (L m)^3 (3D).
pub fn ft_total_qubits(mode: FtMode, n: u64, l: u64, m: u64) -> u64 {
    match mode {
        FtMode::Quasi2D => 2 * n + 2 * l * l * m.pow(3),
        FtMode::ThreeD => 2 * n + 12 * (l * m).pow(3),
    }
}

/// L for n data qubits: n itself (quasi-2D) or ceil(sqrt n) (3D), at least 2.
pub fn ft_side(mode: FtMode, n: usize) -> u32 {
    match mode {
        FtMode::Quasi2D => n as u32,
        FtMode::ThreeD => ceil_sqrt(n),
    }
    .max(2)
}

pub fn ft_sites(mode: FtMode, n: usize, l: u32) -> Vec<Vertex> {
    match mode {
        FtMode::Quasi2D => (0..n as u32).map(|i| Vertex::new(i, i, 0)).collect(),
        FtMode::ThreeD => (0..n as u32).map(|j| Vertex::new(j / l, j % l, 0)).collect(),
    }
}

/// Plans the bus layers of every source layer; nothing is simulated.
pub fn ft_localize(circuit: &AdaptiveCircuit, mode: FtMode) -> Result<FtLocalizedPlan, FtError> {
    circuit.check()?;
    let src = circuit.padded_to_even();
    let n = src.n.max(2);
    let l = ft_side(mode, n);
    let sites = ft_sites(mode, n, l);
    let mut layers = Vec::with_capacity(src.depth());
    let mut width = width_check(l as u64, bus_width(l as u64));
    for (t, layer) in src.layers.iter().enumerate() {
        let lp = extract_layer_pairing(layer, n)?;
        let plan = plan_for_sites(mode, l, sites.clone(), &lp.pairs)?;
        width = plan.width_check;
        layers.push(FtLayerPlan {
            source_layer: t,
            pairs: lp.pairs,
            buses: plan.buses.len(),
            stitches: plan.stitches.len(),
            max_segment: plan.max_segment(),
        });
    }
    let m = bus_width(l as u64);
    let lattice = mode.grid(l)?.dims().map(|d| d as u64 * m);
    Ok(FtLocalizedPlan {
        mode,
        n_source: circuit.n,
        n,
        l,
        m,
        lattice,
        sites,
        n_total: 2 * n as u64 + mode.colors() * lattice.iter().product::<u64>(),
        source_depth: src.depth(),
        depth: FT_GADGET_DEPTH * src.depth(),
        gadget_depth: FT_GADGET_DEPTH,
        layers,
        width_check: width,
        noise: compose_noise(mode),
    })
}

/// Plan for a circuit with n qubits whose every layer pairs (2r, 2r+1);
/// used when only the geometry and counts are wanted.
pub fn ft_plan_for_n(mode: FtMode, n: usize) -> Result<FtPlan, FtError> {
    let n = (n + n % 2).max(2);
    let l = ft_side(mode, n);
    let pairs: Vec<(usize, usize)> = (0..n / 2).map(|r| (2 * r, 2 * r + 1)).collect();
    plan_for_sites(mode, l, ft_sites(mode, n, l), &pairs)
}

/// Bus-level and path-level errors of one surrogate draw.
#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateSample {
    /// Two qubits (S, T) per bus, in bus order.
    pub bus_errors: PauliOp,
    /// Two qubits (start, end) per path, after stitching.
    pub output: PauliOp,
}

/// Effective error on (S_0, T_{k-1}) of a chain of k Bell pairs joined by
/// Bell measurements, given the error on (S_0, T_0, ..., S_{k-1}, T_{k-1}).
pub fn stitch_chain(e: &PauliOp) -> PauliOp {
    let k = e.num_qubits() / 2;
    if k == 1 {
        return e.without_phase();
    }
    let st: Vec<(usize, usize)> = (0..k - 1).map(|a| (2 * a + 1, 2 * a + 2)).collect();
    let mut out = e.clone();
    for layer in bell_measure_layer(&st) {
        out = out.conjugate_by_layer(&layer).expect("disjoint layer");
    }
    let mut order = vec![0, 2 * k - 1];
    for a in 0..k - 1 {
        order.push(2 * a + 1);
        order.push(2 * a + 2);
    }
    let ctrl = swap_chain_control(k, 1).expect("k >= 2");
    commute_through_adaptive(&out.without_phase().restrict(&order), &ctrl).expect("dimensions match")
}

/// Every bus fails independently with probability min(1, f(p)) and then
/// deposits a uniform non-identity Pauli on its Bell output; stitching maps
/// the deposits onto the path outputs exactly.
pub fn surrogate_failure_sample<R: Rng + ?Sized>(
    plan: &FtPlan,
    p: NoiseStrength,
    rng: &mut R,
) -> Result<SurrogateSample, FtError> {
    let probs = bus_failure_probs(plan, p)?;
    Ok(surrogate_draw(plan, &probs, rng))
}

fn bus_failure_probs(plan: &FtPlan, p: NoiseStrength) -> Result<Vec<f64>, FtError> {
    plan.buses
        .iter()
        .enumerate()
        .map(|(index, b)| {
            b.spec.profile.strength(p).map(|s| s.value()).ok_or(FtError::Threshold {
                stage: "bus".into(),
                source: NoiseError::ThresholdExceeded { index, p: p.value(), p0: b.spec.profile.p0 },
            })
        })
        .collect()
}

fn surrogate_draw<R: Rng + ?Sized>(plan: &FtPlan, probs: &[f64], rng: &mut R) -> SurrogateSample {
    let nb = plan.buses.len();
    let mut bus_errors = PauliOp::identity(2 * nb);
    for (b, &f) in probs.iter().enumerate() {
        if f > 0.0 && rng.gen_bool(f.min(1.0)) {
            let d = random_nonidentity_pauli(2, rng);
            bus_errors = bus_errors.mul_unsigned(&d.embed(2 * nb, &[2 * b, 2 * b + 1])).expect("same size");
        }
    }
    let np = plan.paths.len();
    let mut output = PauliOp::identity(2 * np);
    for (r, path) in plan.paths.iter().enumerate() {
        let qs: Vec<usize> = path.buses.iter().flat_map(|&b| [2 * b, 2 * b + 1]).collect();
        let eff = stitch_chain(&bus_errors.restrict(&qs));
        output = output.mul_unsigned(&eff.embed(2 * np, &[2 * r, 2 * r + 1])).expect("same size");
    }
    SurrogateSample { bus_errors, output }
}

/// Surrogate Monte Carlo: bus outputs (reduced onto one qubit per Bell pair)
/// against the parallel-repetition bound, path outputs (likewise reduced)
/// against the entanglement-swapping bound.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SurrogateReport {
    pub bus: LsReport,
    pub output: LsReport,
}

impl SurrogateReport {
    pub fn pass(&self) -> bool {
        self.bus.pass() && self.output.pass()
    }

    pub fn rows(&self) -> Vec<&crate::noise::LsRow> {
        self.bus.rows.iter().chain(&self.output.rows).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        LsReport { rows: self.rows().into_iter().cloned().collect() }.write_csv(w)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SurrogateConfig {
    pub trials: u64,
    pub max_subset: usize,
    pub subsets_per_size: usize,
    pub sigma: f64,
}

fn subsets_of<R: Rng + ?Sized>(n: usize, cfg: &SurrogateConfig, rng: &mut R) -> Vec<SupportSet> {
    let mut out = Vec::new();
    for size in 1..=cfg.max_subset.min(n) {
        out.extend(crate::noise::sample_subsets(n, size, cfg.subsets_per_size, rng));
    }
    out
}

pub fn surrogate_montecarlo(
    plan: &FtPlan,
    p: NoiseStrength,
    cfg: SurrogateConfig,
    seeds: &SeedStream,
) -> Result<SurrogateReport, FtError> {
    if cfg.max_subset > 4 {
        return Err(FtError::Parameter(format!("max_subset {} exceeds 4", cfg.max_subset)));
    }
    if plan.buses.is_empty() {
        return Ok(SurrogateReport::default());
    }
    let probs = bus_failure_probs(plan, p)?;
    let bus_bound = parallel_repetition_bound(&plan.profiles(), p, true)
        .map_err(|e| FtError::Threshold { stage: "parallel_repetition".into(), source: e })?;
    let k_max = plan.paths.iter().map(|x| x.buses.len()).max().unwrap_or(1);
    let out_bound = if k_max >= 2 {
        strength_entanglement_swap(bus_bound, k_max)
            .map_err(|e| FtError::Threshold { stage: "entanglement_swap".into(), source: e })?
    } else {
        bus_bound
    };
    let bus_pairs: Vec<(usize, usize)> = (0..plan.buses.len()).map(|b| (2 * b, 2 * b + 1)).collect();
    let out_pairs = plan.output_pairs();
    let mut srng = seeds.rng(u64::MAX);
    let bus_sets = subsets_of(2 * plan.buses.len(), &cfg, &mut srng);
    let out_sets = subsets_of(2 * plan.paths.len(), &cfg, &mut srng);
    // one counter over both registers: bus qubits first, then outputs
    let nb = 2 * plan.buses.len();
    let mut all = bus_sets.clone();
    all.extend(out_sets.iter().map(|s| SupportSet::new(s.0.iter().map(|q| q + nb).collect())));
    let counter = sharded_support_count(all, cfg.trials, seeds, |rng| {
        let s = surrogate_draw(plan, &probs, rng);
        let a = reduce_bell_pair_error(&s.bus_errors, &bus_pairs);
        let b = reduce_bell_pair_error(&s.output, &out_pairs);
        concat(&a, &b)
    });
    let split = bus_sets.len();
    let part = |range: std::ops::Range<usize>, sets: Vec<SupportSet>| SupportCounter {
        subsets: sets,
        hits: counter.hits[range].to_vec(),
        samples: counter.samples,
    };
    let bus = part(0..split, bus_sets);
    let out = part(split..counter.hits.len(), out_sets);
    Ok(SurrogateReport {
        bus: LsReport { rows: bus.rows("bus", bus_bound, cfg.sigma) },
        output: LsReport { rows: out.rows("path_output", out_bound, cfg.sigma) },
    })
}

fn concat(a: &PauliOp, b: &PauliOp) -> PauliOp {
    let (na, nb) = (a.num_qubits(), b.num_qubits());
    let first: Vec<usize> = (0..na).collect();
    let second: Vec<usize> = (na..na + nb).collect();
    a.embed(na + nb, &first).mul_unsigned(&b.embed(na + nb, &second)).expect("same size")
}

/// k independent Bell-pair buses with the same profile, each failing with
/// probability min(1, f(p)) and depositing a uniform non-identity Pauli;
/// the result is reduced onto the first qubit of every pair.
pub fn synthetic_bus_sample<R: Rng + ?Sized>(
    profiles: &[RobustnessProfile],
    p: NoiseStrength,
    rng: &mut R,
) -> Result<PauliOp, FtError> {
    let k = profiles.len();
    let mut e = PauliOp::identity(2 * k);
    for (index, prof) in profiles.iter().enumerate() {
        let f = prof.strength(p).ok_or(FtError::Threshold {
            stage: "bus".into(),
            source: NoiseError::ThresholdExceeded { index, p: p.value(), p0: prof.p0 },
        })?;
        if f.value() > 0.0 && rng.gen_bool(f.value()) {
            let d = random_nonidentity_pauli(2, rng);
            e = e.mul_unsigned(&d.embed(2 * k, &[2 * index, 2 * index + 1])).expect("same size");
        }
    }
    let pairs: Vec<(usize, usize)> = (0..k).map(|b| (2 * b, 2 * b + 1)).collect();
    Ok(reduce_bell_pair_error(&e, &pairs))
}

/// Fine-lattice Manhattan distance between two plan qubits.
pub fn lattice_distance(a: &FtQubit, b: &FtQubit) -> u64 {
    (0..3).map(|k| a.site[k].abs_diff(b.site[k])).sum()
}
