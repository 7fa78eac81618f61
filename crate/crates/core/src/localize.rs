//! Geometric localization of adaptive circuits onto 2D and 3D grids.
//!
//! Every logical qubit j lives at a routed vertex v_j with a data register
//! Q_j and a partner register P_j. Each grid edge e = {u, v} carries two
//! edge registers R^e_u (at u) and R^e_v (at v). A source layer is replaced by
//! a fixed-depth sandwich: teleport one qubit of each interacting pair next to
//! the other, apply the layer locally, teleport it back.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{extract_layer_pairing, AdaptiveCircuit, CircuitError, OutcomeId, PrimOp};
use crate::grid::{build_grid, manhattan, GridError, GridGraph, GridSpec, Vertex};
use crate::pauli::{Gate1, Gate2, Pauli1};
use crate::routing::{route_2d, route_3d_subset, Pairing, RoutePath, RoutingError};

/// Depth of one localized source layer: q_pair, the local layer, q_pair_inverse.
pub const GADGET_DEPTH: usize = Q_PAIR_DEPTH + 1 + Q_PAIR_INVERSE_DEPTH;
pub const Q_ENTANGLE_DEPTH: usize = 8;
pub const Q_PAIR_DEPTH: usize = 12;
pub const Q_PAIR_INVERSE_DEPTH: usize = 11;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalizeError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("layout: {0}")]
    Layout(String),
    #[error("pair ({0}, {1}) is not a pair of distinct routed sites")]
    BadPair(usize, usize),
    #[error("layer {layer}: {msg}")]
    Unsupported { layer: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "3d")]
    ThreeD,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::TwoD => "2d",
            Mode::ThreeD => "3d",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "2d" => Ok(Mode::TwoD),
            "3d" => Ok(Mode::ThreeD),
            _ => Err(format!("unknown mode {s:?}, expected 2d or 3d")),
        }
    }
}

/// Smallest s with s*s >= n.
pub fn ceil_sqrt(n: usize) -> u32 {
    let mut s = (n as f64).sqrt() as u32;
    while (s as usize) * (s as usize) < n {
        s += 1;
    }
    while s > 0 && ((s - 1) as usize) * ((s - 1) as usize) >= n {
        s -= 1;
    }
    s
}

/// Register layout over a grid with k routed sites.
#[derive(Clone, Debug)]
pub struct QubitLayout {
    mode: Mode,
    graph: GridGraph,
    sites: Vec<Vertex>,
    site_of: HashMap<Vertex, usize>,
}

/// Serialized form of a layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutDoc {
    pub mode: Mode,
    pub dims: [u32; 3],
    pub sites: Vec<Vertex>,
    pub num_qubits: usize,
}

impl QubitLayout {
    /// 2D needs a square single-floor grid; 3D needs an (L, L, 4L) grid with
    /// every site on the bottom floor.
    pub fn new(mode: Mode, spec: GridSpec, sites: Vec<Vertex>) -> Result<Self, LocalizeError> {
        let [lx, ly, lz] = spec.dims();
        match mode {
            Mode::TwoD if lx != ly || lz != 1 => {
                return Err(LocalizeError::Layout(format!("2d mode needs an (L, L, 1) grid, got {:?}", spec.dims())))
            }
            Mode::ThreeD if lx != ly || lz != 4 * lx => {
                return Err(LocalizeError::Layout(format!("3d mode needs an (L, L, 4L) grid, got {:?}", spec.dims())))
            }
            _ => {}
        }
        let mut site_of = HashMap::new();
        for (k, &v) in sites.iter().enumerate() {
            spec.check(v)?;
            if mode == Mode::ThreeD && v.z != 0 {
                return Err(LocalizeError::Layout(format!("site {v:?} is not on the bottom floor")));
            }
            if site_of.insert(v, k).is_some() {
                return Err(LocalizeError::Layout(format!("site {v:?} listed twice")));
            }
        }
        Ok(QubitLayout { mode, graph: build_grid(spec), sites, site_of })
    }

    /// The standard layout for n logical qubits: the diagonal of an n x n grid,
    /// or the first n bottom-floor vertices of the s x s x 4s tower, s = ceil(sqrt n).
    pub fn for_qubits(n: usize, mode: Mode) -> Result<Self, LocalizeError> {
        if n == 0 {
            return Err(LocalizeError::Layout("no qubits".into()));
        }
        match mode {
            Mode::TwoD => {
                let spec = GridSpec::square(n as u32)?;
                let sites = (0..n as u32).map(|j| Vertex::new(j, j, 0)).collect();
                Self::new(mode, spec, sites)
            }
            Mode::ThreeD => {
                let s = ceil_sqrt(n).max(1);
                let spec = GridSpec::tower(s)?;
                let sites = (0..n as u32).map(|j| Vertex::new(j / s, j % s, 0)).collect();
                Self::new(mode, spec, sites)
            }
        }
    }

    pub fn from_doc(doc: &LayoutDoc) -> Result<Self, LocalizeError> {
        let [a, b, c] = doc.dims;
        let l = Self::new(doc.mode, GridSpec::new(a, b, c)?, doc.sites.clone())?;
        if l.num_qubits() != doc.num_qubits {
            return Err(LocalizeError::Layout(format!(
                "layout declares {} qubits but its grid gives {}",
                doc.num_qubits,
                l.num_qubits()
            )));
        }
        Ok(l)
    }

    pub fn to_doc(&self) -> LayoutDoc {
        LayoutDoc {
            mode: self.mode,
            dims: self.spec().dims(),
            sites: self.sites.clone(),
            num_qubits: self.num_qubits(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn spec(&self) -> GridSpec {
        self.graph.spec()
    }

    pub fn graph(&self) -> &GridGraph {
        &self.graph
    }

    pub fn sites(&self) -> &[Vertex] {
        &self.sites
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.edges().len()
    }

    /// 2k + 2|E|.
    pub fn num_qubits(&self) -> usize {
        2 * self.num_sites() + 2 * self.num_edges()
    }

    pub fn q(&self, j: usize) -> usize {
        j
    }

    pub fn p(&self, j: usize) -> usize {
        self.num_sites() + j
    }

    /// R^e_v; `None` unless v is an endpoint of edge e.
    pub fn edge_qubit(&self, e: usize, v: Vertex) -> Option<usize> {
        let edge = self.graph.edges().get(e)?;
        let base = 2 * self.num_sites() + 2 * e;
        if v == edge.a {
            Some(base)
        } else if v == edge.b {
            Some(base + 1)
        } else {
            None
        }
    }

    /// The vertex a register sits at.
    pub fn location(&self, qubit: usize) -> Option<Vertex> {
        let k = self.num_sites();
        if qubit < 2 * k {
            return Some(self.sites[qubit % k]);
        }
        let e = self.graph.edges().get((qubit - 2 * k) / 2)?;
        Some(if qubit % 2 == 0 { e.a } else { e.b })
    }

    pub fn site_index(&self, v: Vertex) -> Option<usize> {
        self.site_of.get(&v).copied()
    }

    /// Edge-disjoint paths from site i to site j for every pair (i, j).
    pub fn route(&self, pairs: &[(usize, usize)]) -> Result<Vec<RoutedPair>, LocalizeError> {
        let k = self.num_sites();
        for &(i, j) in pairs {
            if i >= k || j >= k || i == j {
                return Err(LocalizeError::BadPair(i, j));
            }
        }
        if pairs.is_empty() {
            return Ok(Vec::new());
        }
        let pairing = Pairing::new(pairs.iter().map(|&(i, j)| (self.sites[i], self.sites[j])).collect());
        let l = self.spec().dims()[0];
        let routed: Vec<(RoutePath, Option<u32>)> = match self.mode {
            Mode::TwoD => route_2d(l, &pairing)?.into_iter().map(|p| (p, None)).collect(),
            Mode::ThreeD => route_3d_subset(l, &pairing)?.into_iter().map(|s| (s.path(), Some(s.floor))).collect(),
        };
        Ok(pairs
            .iter()
            .zip(routed)
            .map(|(&(i, j), (path, floor))| {
                let path = if path.start() == Some(self.sites[i]) { path } else { path.reversed() };
                RoutedPair { i, j, path, floor }
            })
            .collect())
    }
}

/// A routed pair, with the path oriented from site i to site j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutedPair {
    pub i: usize,
    pub j: usize,
    pub path: RoutePath,
    pub floor: Option<u32>,
}

/// Fresh outcome ids, handed out in increasing order.
#[derive(Clone, Copy, Debug)]
struct Ids(OutcomeId);

impl Ids {
    fn next(&mut self) -> OutcomeId {
        let id = self.0;
        self.0 += 1;
        id
    }
}

/// Bell measurement on (first, second) over three layers: CNOT, H, measure.
/// Returns the outcome ids (z, x): z flags a Z correction, x an X correction.
fn bell_measure(layers: &mut [Vec<PrimOp>], first: usize, second: usize, ids: &mut Ids) -> (OutcomeId, OutcomeId) {
    let (z, x) = (ids.next(), ids.next());
    layers[0].push(PrimOp::Clifford2(Gate2::Cnot, first, second));
    layers[1].push(PrimOp::Clifford1(Gate1::H, first));
    layers[2].push(PrimOp::MeasureZ { qubit: first, outcome: z });
    layers[2].push(PrimOp::MeasureZ { qubit: second, outcome: x });
    (z, x)
}

fn correction(target: usize, x: Vec<OutcomeId>, z: Vec<OutcomeId>) -> Option<PrimOp> {
    let terms: Vec<(Pauli1, Vec<OutcomeId>)> =
        [(Pauli1::X, x), (Pauli1::Z, z)].into_iter().filter(|(_, s)| !s.is_empty()).collect();
    (!terms.is_empty()).then_some(PrimOp::CtrlPauli { target, terms })
}

/// Seven layers after which, for every route, the outer edge register at v_i
/// and the terminal edge register at v_j hold a Bell pair. Returns those
/// register pairs.
fn entangle_core(
    layout: &QubitLayout,
    routes: &[RoutedPair],
    ids: &mut Ids,
) -> (Vec<Vec<PrimOp>>, Vec<(usize, usize)>) {
    let mut layers: Vec<Vec<PrimOp>> = vec![Vec::new(); 7];
    let k2 = 2 * layout.num_sites();
    for e in 0..layout.num_edges() {
        let (a, b) = (k2 + 2 * e, k2 + 2 * e + 1);
        layers[0].push(PrimOp::PrepZero(a));
        layers[0].push(PrimOp::PrepZero(b));
        layers[1].push(PrimOp::Clifford1(Gate1::H, a));
        layers[2].push(PrimOp::Clifford2(Gate2::Cnot, a, b));
    }
    let mut ends = Vec::with_capacity(routes.len());
    for r in routes {
        let v = &r.path.vertices;
        let eid = |m: usize| layout.graph.edge_between(v[m], v[m + 1]).expect("routed paths follow grid edges");
        let reg = |m: usize, at: usize| layout.edge_qubit(eid(m), v[at]).unwrap();
        let last = v.len() - 2;
        let (mut xs, mut zs) = (Vec::new(), Vec::new());
        for m in 1..=last {
            let (z, x) = bell_measure(&mut layers[3..6], reg(m - 1, m), reg(m, m), ids);
            zs.push(z);
            xs.push(x);
        }
        let terminal = reg(last, last + 1);
        layers[6].extend(correction(terminal, xs, zs));
        ends.push((reg(0, 0), terminal));
    }
    (layers, ends)
}

fn routes_for(layout: &QubitLayout, pairs: &[(usize, usize)]) -> Result<Vec<RoutedPair>, LocalizeError> {
    layout.route(pairs)
}

fn entangle_layers(layout: &QubitLayout, routes: &[RoutedPair], ids: &mut Ids) -> Vec<Vec<PrimOp>> {
    let (mut layers, ends) = entangle_core(layout, routes, ids);
    let mut swaps = Vec::new();
    for (r, &(out_i, in_j)) in routes.iter().zip(&ends) {
        swaps.push(PrimOp::Clifford2(Gate2::Swap, layout.p(r.i), out_i));
        swaps.push(PrimOp::Clifford2(Gate2::Swap, layout.p(r.j), in_j));
    }
    layers.push(swaps);
    layers
}

/// Moves Q_j to P_i for every routed pair.
fn pair_layers(layout: &QubitLayout, routes: &[RoutedPair], ids: &mut Ids) -> Vec<Vec<PrimOp>> {
    let mut layers = entangle_layers(layout, routes, ids);
    let mut tail: Vec<Vec<PrimOp>> = vec![Vec::new(); 4];
    for r in routes {
        let (z, x) = bell_measure(&mut tail[..3], layout.q(r.j), layout.p(r.j), ids);
        tail[3].extend(correction(layout.p(r.i), vec![x], vec![z]));
    }
    layers.extend(tail);
    layers
}

/// Moves P_i back to Q_j over freshly generated entanglement.
fn pair_inverse_layers(layout: &QubitLayout, routes: &[RoutedPair], ids: &mut Ids) -> Vec<Vec<PrimOp>> {
    let (mut layers, ends) = entangle_core(layout, routes, ids);
    let mut tail: Vec<Vec<PrimOp>> = vec![Vec::new(); 4];
    for (r, &(out_i, in_j)) in routes.iter().zip(&ends) {
        let (z, x) = bell_measure(&mut tail[..3], layout.p(r.i), out_i, ids);
        tail[0].push(PrimOp::Clifford2(Gate2::Swap, layout.q(r.j), in_j));
        tail[3].extend(correction(layout.q(r.j), vec![x], vec![z]));
    }
    layers.extend(tail);
    layers
}

fn assemble(layout: &QubitLayout, layers: Vec<Vec<PrimOp>>) -> AdaptiveCircuit {
    let mut c = AdaptiveCircuit::new(layout.num_qubits());
    for l in layers {
        c.push(l);
    }
    c
}

/// Leaves a Bell pair on (P_i, P_j) for every pair (i, j) of sites.
pub fn q_entangle(layout: &QubitLayout, pairs: &[(usize, usize)]) -> Result<AdaptiveCircuit, LocalizeError> {
    let routes = routes_for(layout, pairs)?;
    Ok(assemble(layout, entangle_layers(layout, &routes, &mut Ids(0))))
}

/// Transfers the state of Q_j to P_i for every pair (i, j).
pub fn q_pair(layout: &QubitLayout, pairs: &[(usize, usize)]) -> Result<AdaptiveCircuit, LocalizeError> {
    let routes = routes_for(layout, pairs)?;
    Ok(assemble(layout, pair_layers(layout, &routes, &mut Ids(0))))
}

/// Transfers the state of P_i back to Q_j for every pair (i, j).
pub fn q_pair_inverse(layout: &QubitLayout, pairs: &[(usize, usize)]) -> Result<AdaptiveCircuit, LocalizeError> {
    let routes = routes_for(layout, pairs)?;
    Ok(assemble(layout, pair_inverse_layers(layout, &routes, &mut Ids(0))))
}

/// Where each source layer ended up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetBlock {
    pub source_layer: usize,
    pub start_layer: usize,
    pub depth: usize,
    pub pairs: Vec<(usize, usize)>,
    pub max_path_length: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizeStats {
    pub mode: Option<Mode>,
    pub n_source: usize,
    pub n_logical: usize,
    pub n_total: usize,
    pub num_edges: usize,
    pub grid_dims: [u32; 3],
    pub source_depth: usize,
    pub depth: usize,
    pub gadget_depth: usize,
    pub max_path_length: usize,
    pub floors_used: usize,
}

#[derive(Clone, Debug)]
pub struct LocalizedCircuit {
    pub circuit: AdaptiveCircuit,
    pub layout: QubitLayout,
    pub provenance: Vec<GadgetBlock>,
    pub stats: LocalizeStats,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalizedDoc {
    layout: LayoutDoc,
    provenance: Vec<GadgetBlock>,
    stats: LocalizeStats,
    circuit: serde_json::Value,
}

impl LocalizedCircuit {
    pub fn to_json(&self) -> String {
        let doc = LocalizedDoc {
            layout: self.layout.to_doc(),
            provenance: self.provenance.clone(),
            stats: self.stats.clone(),
            circuit: self.circuit.to_value(),
        };
        serde_json::to_string_pretty(&doc).expect("localized circuits always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, LocalizeError> {
        let doc: LocalizedDoc =
            serde_json::from_str(s).map_err(|e| LocalizeError::Circuit(CircuitError::Json(e.to_string())))?;
        let layout = QubitLayout::from_doc(&doc.layout)?;
        let circuit = AdaptiveCircuit::from_value(doc.circuit)?;
        if circuit.n != layout.num_qubits() {
            return Err(LocalizeError::Layout(format!(
                "circuit has {} qubits, layout has {}",
                circuit.n,
                layout.num_qubits()
            )));
        }
        Ok(LocalizedCircuit { circuit, layout, provenance: doc.provenance, stats: doc.stats })
    }
}

/// Replaces every source layer by q_pair, the layer acting on (Q_i, P_i), and
/// q_pair_inverse. Logical qubit j ends on register Q_j = j; gadget outcome
/// ids start above the largest source id.
pub fn localize_ideal(circuit: &AdaptiveCircuit, mode: Mode) -> Result<LocalizedCircuit, LocalizeError> {
    circuit.check()?;
    let src = circuit.padded_to_even();
    let n = src.n.max(2);
    let layout = QubitLayout::for_qubits(n, mode)?;
    let mut ids = Ids(circuit.max_outcome_id().map_or(0, |m| m + 1));
    let mut layers: Vec<Vec<PrimOp>> = Vec::with_capacity(GADGET_DEPTH * src.depth());
    let mut provenance = Vec::with_capacity(src.depth());
    let mut floors = std::collections::BTreeSet::new();
    let mut max_len = 0;
    for (t, layer) in src.layers.iter().enumerate() {
        if let Some(op) = layer.ops.iter().find(|op| op.targets().len() > 2) {
            return Err(LocalizeError::Unsupported { layer: t, msg: format!("{op} acts on more than two qubits") });
        }
        let lp = extract_layer_pairing(layer, n)?;
        let routes = layout.route(&lp.pairs)?;
        let start = layers.len();
        layers.extend(pair_layers(&layout, &routes, &mut ids));
        let mut local = Vec::new();
        for (&(i, j), ops) in lp.pairs.iter().zip(&lp.ops) {
            let (qi, pi) = (layout.q(i), layout.p(i));
            local.extend(ops.iter().map(|op| {
                op.relabel(|q| {
                    if q == i {
                        qi
                    } else if q == j {
                        pi
                    } else {
                        q
                    }
                })
            }));
        }
        layers.push(local);
        layers.extend(pair_inverse_layers(&layout, &routes, &mut ids));
        let block_len = routes.iter().map(|r| r.path.len()).max().unwrap_or(0);
        max_len = max_len.max(block_len);
        floors.extend(routes.iter().filter_map(|r| r.floor));
        provenance.push(GadgetBlock {
            source_layer: t,
            start_layer: start,
            depth: layers.len() - start,
            pairs: lp.pairs,
            max_path_length: block_len,
        });
    }
    let circuit_out = assemble(&layout, layers);
    let stats = LocalizeStats {
        mode: Some(mode),
        n_source: circuit.n,
        n_logical: n,
        n_total: layout.num_qubits(),
        num_edges: layout.num_edges(),
        grid_dims: layout.spec().dims(),
        source_depth: src.depth(),
        depth: circuit_out.depth(),
        gadget_depth: GADGET_DEPTH,
        max_path_length: max_len,
        floors_used: floors.len(),
    };
    Ok(LocalizedCircuit { circuit: circuit_out, layout, provenance, stats })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalityViolation {
    pub layer: usize,
    pub op: usize,
    pub qubits: Vec<usize>,
    pub message: String,
}

impl fmt::Display for LocalityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "layer {}, op {}: {}", self.layer, self.op, self.message)
    }
}

/// Multi-qubit ops must act within one vertex or across one grid edge.
pub fn locality_check(lc: &LocalizedCircuit) -> Vec<LocalityViolation> {
    check_circuit_locality(&lc.circuit, &lc.layout)
}

pub fn check_circuit_locality(c: &AdaptiveCircuit, layout: &QubitLayout) -> Vec<LocalityViolation> {
    let mut out = Vec::new();
    for (t, layer) in c.layers.iter().enumerate() {
        for (k, op) in layer.ops.iter().enumerate() {
            let qs = op.targets();
            let locs: Vec<Option<Vertex>> = qs.iter().map(|&q| layout.location(q)).collect();
            let mut bad =
                |message: String| out.push(LocalityViolation { layer: t, op: k, qubits: qs.clone(), message });
            if let Some(p) = locs.iter().position(|l| l.is_none()) {
                bad(format!("qubit {} has no location in the layout", qs[p]));
                continue;
            }
            let locs: Vec<Vertex> = locs.into_iter().flatten().collect();
            let far = locs.iter().enumerate().any(|(a, u)| locs[a + 1..].iter().any(|v| manhattan(*u, *v) > 1));
            let spread = {
                let mut d = locs.clone();
                d.sort();
                d.dedup();
                d.len() > 2
            };
            if far || spread {
                bad(format!("{op} spans {:?}", locs));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabsim::{check_bell, run, run_symbolic, symbolic_equivalent, Equivalence, Tableau};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ceil_sqrt_values() {
        let got: Vec<u32> = [1, 2, 4, 5, 8, 9, 10, 16, 17].iter().map(|&n| ceil_sqrt(n)).collect();
        assert_eq!(got, vec![1, 2, 2, 3, 3, 3, 4, 4, 5]);
    }

    #[test]
    fn qubit_count_n4_2d() {
        let l = QubitLayout::for_qubits(4, Mode::TwoD).unwrap();
        assert_eq!(l.num_edges(), 24);
        assert_eq!(l.num_qubits(), 56);
    }

    #[test]
    fn registers_sit_at_their_vertices() {
        let l = QubitLayout::for_qubits(4, Mode::ThreeD).unwrap();
        for e in 0..l.num_edges() {
            let edge = l.graph().edges()[e];
            assert_eq!(l.location(l.edge_qubit(e, edge.a).unwrap()), Some(edge.a));
            assert_eq!(l.location(l.edge_qubit(e, edge.b).unwrap()), Some(edge.b));
        }
        assert_eq!(l.location(l.p(3)), Some(l.sites()[3]));
        assert_eq!(l.location(l.num_qubits()), None);
    }

    #[test]
    fn adjacent_pair_has_no_interior_measurement() {
        let l = QubitLayout::for_qubits(2, Mode::ThreeD).unwrap();
        let (u, v) = (l.sites()[0], l.sites()[1]);
        assert_eq!(manhattan(u, v), 1);
        let routes = [RoutedPair { i: 0, j: 1, path: RoutePath::new(vec![u, v]), floor: None }];
        let c = assemble(&l, entangle_layers(&l, &routes, &mut Ids(0)));
        assert_eq!(c.count_ops(|op| matches!(op, PrimOp::MeasureZ { .. } | PrimOp::CtrlPauli { .. })), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (t, _) = run(&c, None, &mut rng).unwrap();
        assert!(check_bell(&t, l.p(0), l.p(1)));
    }

    #[test]
    fn entangle_diagonal_pairs_2d() {
        let l = QubitLayout::for_qubits(4, Mode::TwoD).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for pairs in [vec![(0, 3)], vec![(0, 2), (1, 3)], vec![(3, 0), (2, 1)]] {
            let c = q_entangle(&l, &pairs).unwrap();
            assert_eq!(c.depth(), Q_ENTANGLE_DEPTH);
            for _ in 0..10 {
                let (t, _) = run(&c, None, &mut rng).unwrap();
                for &(i, j) in &pairs {
                    assert!(check_bell(&t, l.p(i), l.p(j)));
                }
            }
        }
    }

    fn random_input(n_total: usize, data: usize, seed: u64) -> AdaptiveCircuit {
        use crate::circuit::{random_adaptive_circuit, RandomCircuitConfig};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prep = random_adaptive_circuit(
            RandomCircuitConfig { n: data, depth: 4, max_measurements: 0, density: 0.9 },
            &mut rng,
        );
        let mut c = AdaptiveCircuit::new(n_total);
        for l in prep.layers {
            c.push(l.ops);
        }
        c
    }

    fn concat(a: &AdaptiveCircuit, b: &AdaptiveCircuit, shift: OutcomeId) -> AdaptiveCircuit {
        let mut c = a.clone();
        for l in &b.layers {
            c.push(
                l.ops
                    .iter()
                    .map(|op| match op {
                        PrimOp::MeasureZ { qubit, outcome } => {
                            PrimOp::MeasureZ { qubit: *qubit, outcome: outcome + shift }
                        }
                        PrimOp::CtrlPauli { target, terms } => PrimOp::CtrlPauli {
                            target: *target,
                            terms: terms.iter().map(|(p, s)| (*p, s.iter().map(|x| x + shift).collect())).collect(),
                        },
                        other => other.clone(),
                    })
                    .collect(),
            );
        }
        c
    }

    #[test]
    fn q_pair_transfers_and_inverse_restores() {
        for mode in [Mode::TwoD, Mode::ThreeD] {
            let l = QubitLayout::for_qubits(4, mode).unwrap();
            let pairs = [(0, 2), (1, 3)];
            for seed in 0..4 {
                let input = random_input(l.num_qubits(), 4, seed);
                let fwd = concat(&input, &q_pair(&l, &pairs).unwrap(), 0);
                let before = run_symbolic(&input, None).unwrap();
                let after = run_symbolic(&fwd, None).unwrap();
                // Q_j moved onto P_i; Q_i untouched
                let keep_after = [l.q(0), l.q(1), l.p(0), l.p(1)];
                assert_eq!(
                    symbolic_equivalent(&before, &after, &[], &[0, 1, 2, 3], &keep_after).unwrap(),
                    Equivalence::Equal
                );
                let back = concat(&fwd, &q_pair_inverse(&l, &pairs).unwrap(), 10_000);
                let done = run_symbolic(&back, None).unwrap();
                assert_eq!(
                    symbolic_equivalent(&before, &done, &[], &[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap(),
                    Equivalence::Equal
                );
            }
        }
    }

    #[test]
    fn localized_cnot_matches_source() {
        let mut src = AdaptiveCircuit::new(2);
        src.push(vec![PrimOp::Clifford1(Gate1::H, 0)]);
        src.push(vec![PrimOp::Clifford2(Gate2::Cnot, 0, 1)]);
        src.push(vec![PrimOp::MeasureZ { qubit: 0, outcome: 0 }, PrimOp::MeasureZ { qubit: 1, outcome: 1 }]);
        for mode in [Mode::TwoD, Mode::ThreeD] {
            let lc = localize_ideal(&src, mode).unwrap();
            assert!(lc.circuit.check().is_ok());
            assert!(locality_check(&lc).is_empty());
            assert_eq!(lc.circuit.depth(), GADGET_DEPTH * 3);
            let a = run_symbolic(&src, None).unwrap();
            let b = run_symbolic(&lc.circuit, None).unwrap();
            assert_eq!(symbolic_equivalent(&a, &b, &[0, 1], &[0, 1], &[0, 1]).unwrap(), Equivalence::Equal);
        }
    }

    #[test]
    fn empty_circuit_gives_layout_only() {
        let lc = localize_ideal(&AdaptiveCircuit::new(4), Mode::TwoD).unwrap();
        assert_eq!(lc.circuit.depth(), 0);
        assert_eq!(lc.stats.n_total, 56);
    }

    #[test]
    fn long_range_cnot_is_flagged() {
        let l = QubitLayout::for_qubits(4, Mode::TwoD).unwrap();
        let mut c = AdaptiveCircuit::new(l.num_qubits());
        c.push(vec![PrimOp::Clifford1(Gate1::H, 0), PrimOp::Clifford1(Gate1::S, 3)]);
        assert!(check_circuit_locality(&c, &l).is_empty());
        c.push(vec![PrimOp::Clifford2(Gate2::Cnot, 0, 3)]);
        let v = check_circuit_locality(&c, &l);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].layer, v[0].op), (1, 0));
        // Q_0 and P_0 are co-located
        let mut ok = AdaptiveCircuit::new(l.num_qubits());
        ok.push(vec![PrimOp::Clifford2(Gate2::Cnot, l.q(0), l.p(0))]);
        assert!(check_circuit_locality(&ok, &l).is_empty());
    }

    #[test]
    fn json_round_trip() {
        let mut src = AdaptiveCircuit::new(3);
        src.push(vec![PrimOp::Clifford2(Gate2::Cz, 0, 2), PrimOp::MeasureZ { qubit: 1, outcome: 4 }]);
        let lc = localize_ideal(&src, Mode::ThreeD).unwrap();
        let back = LocalizedCircuit::from_json(&lc.to_json()).unwrap();
        assert_eq!(back.circuit, lc.circuit);
        assert_eq!(back.provenance, lc.provenance);
        assert_eq!(back.stats, lc.stats);
        assert!(lc.circuit.outcome_ids().iter().filter(|&&i| i != 4).all(|&i| i > 4));
    }

    #[test]
    fn tableau_dimension_matches_layout() {
        let l = QubitLayout::for_qubits(8, Mode::ThreeD).unwrap();
        assert_eq!(l.spec().dims(), [3, 3, 12]);
        let t: Tableau<bool> = Tableau::new(l.num_qubits());
        assert_eq!(t.n(), 2 * 8 + 2 * (12 * 27 - 9 * 9));
    }

    #[test]
    fn random_adaptive_circuits_localize_exactly() {
        use crate::circuit::{random_adaptive_circuit, RandomCircuitConfig};
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..12 {
            let src = random_adaptive_circuit(
                RandomCircuitConfig { n: 4, depth: 3, max_measurements: 5, density: 0.9 },
                &mut rng,
            );
            let ids = src.outcome_ids();
            let a = run_symbolic(&src, None).unwrap();
            for mode in [Mode::TwoD, Mode::ThreeD] {
                let lc = localize_ideal(&src, mode).unwrap();
                assert!(locality_check(&lc).is_empty());
                let b = run_symbolic(&lc.circuit, None).unwrap();
                assert_eq!(
                    symbolic_equivalent(&a, &b, &ids, &[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap(),
                    Equivalence::Equal
                );
            }
        }
    }
}
