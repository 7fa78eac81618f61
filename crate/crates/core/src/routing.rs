//! Edge-disjoint routing of vertex pairings: L-shaped paths in one floor and
//! up / mid / down paths through a greedily chosen floor of the (L, L, 4L) grid.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::grid::{manhattan, Axis, Edge, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RoutingError {
    #[error("pairs {0} and {1} share an X or Y coordinate")]
    Condition2d(usize, usize),
    #[error("pair {0} joins a vertex to itself")]
    Degenerate(usize),
    #[error("vertex {0} appears in more than one pair")]
    Repeated(Vertex),
    #[error("vertex {0} lies outside the routed region of side {1}")]
    OutOfBounds(Vertex, u32),
    #[error("vertex {0} is not on the bottom floor")]
    OffFloor(Vertex),
    #[error("pair {0} has endpoints on different floors")]
    MixedFloors(usize),
    #[error("3D routing needs an even side length, got {0}")]
    OddSide(u32),
    #[error("side length must be at least 2, got {0}")]
    SideTooSmall(u32),
    #[error("pairing covers {got} of the {want} bottom-floor vertices")]
    Incomplete { got: usize, want: usize },
    #[error("no admissible floor for pair {0}")]
    FloorsExhausted(usize),
    #[error("subset has odd size {0}")]
    OddSubset(usize),
    #[error("vertex {0} is not in the routed subset")]
    NotInSubset(Vertex),
}

/// Ordered pairs of distinct vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub pairs: Vec<(Vertex, Vertex)>,
}

impl Pairing {
    pub fn new(pairs: Vec<(Vertex, Vertex)>) -> Self {
        Pairing { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs are non-degenerate and pairwise disjoint.
    pub fn validate(&self) -> Result<(), RoutingError> {
        let mut seen = HashMap::new();
        for (r, &(u, v)) in self.pairs.iter().enumerate() {
            if u == v {
                return Err(RoutingError::Degenerate(r));
            }
            for w in [u, v] {
                if seen.insert(w, r).is_some() {
                    return Err(RoutingError::Repeated(w));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.pairs.iter().flat_map(|&(u, v)| [u, v])
    }
}

/// A walk given by its traversed vertices; the length is the number of edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RoutePath {
    pub vertices: Vec<Vertex>,
}

impl RoutePath {
    pub fn new(vertices: Vec<Vertex>) -> Self {
        RoutePath { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> Option<Vertex> {
        self.vertices.first().copied()
    }

    pub fn end(&self) -> Option<Vertex> {
        self.vertices.last().copied()
    }

    /// Panics if consecutive vertices are not adjacent; see `validate`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices.windows(2).map(|w| Edge::new(w[0], w[1]).expect("path steps are unit steps"))
    }

    /// Consecutive vertices are adjacent and no edge repeats.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = std::collections::HashSet::new();
        for w in self.vertices.windows(2) {
            let e = Edge::new(w[0], w[1]).ok_or_else(|| format!("{} and {} are not adjacent", w[0], w[1]))?;
            if !seen.insert(e) {
                return Err(format!("edge {}-{} repeats", e.a, e.b));
            }
        }
        Ok(())
    }

    pub fn reversed(&self) -> RoutePath {
        RoutePath::new(self.vertices.iter().rev().copied().collect())
    }

    /// Single axis of a straight nonempty path.
    pub fn straight_axis(&self) -> Option<Axis> {
        let (a, b) = (self.start()?, self.end()?);
        if a == b {
            return None;
        }
        let axes: Vec<Axis> = (0..3).map(Axis::from_index).filter(|&ax| a.coord(ax) != b.coord(ax)).collect();
        (axes.len() == 1 && self.len() as u32 == manhattan(a, b)).then_some(axes[0])
    }
}

fn straight(from: Vertex, axis: Axis, to: u32) -> Vec<Vertex> {
    let c = from.coord(axis);
    if to >= c {
        (c..=to).map(|t| from.with_coord(axis, t)).collect()
    } else {
        (to..=c).rev().map(|t| from.with_coord(axis, t)).collect()
    }
}

fn join(parts: &[&RoutePath]) -> RoutePath {
    let mut out: Vec<Vertex> = Vec::new();
    for p in parts {
        for &v in &p.vertices {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
    }
    RoutePath::new(out)
}

/// Path split into up, two in-floor runs, and down. Empty segments hold a
/// single vertex (the joint), so every segment has well-defined endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedPath {
    pub floor: u32,
    pub up: RoutePath,
    pub mid1: RoutePath,
    pub mid2: RoutePath,
    pub down: RoutePath,
}

impl SegmentedPath {
    pub fn segments(&self) -> [&RoutePath; 4] {
        [&self.up, &self.mid1, &self.mid2, &self.down]
    }

    pub fn path(&self) -> RoutePath {
        join(&self.segments())
    }

    pub fn len(&self) -> usize {
        self.segments().iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Shape checks: joints meet, segments are straight, up/down run along Z,
    /// the middle runs stay in floor `floor - 1`, and adjacent nonempty
    /// segments are orthogonal.
    pub fn check_shape(&self) -> Result<(), String> {
        let segs = self.segments();
        for w in segs.windows(2) {
            if w[0].end() != w[1].start() {
                return Err("segments do not meet".into());
            }
        }
        let z = self.floor.checked_sub(1).ok_or("floor must be at least 1")?;
        for (i, s) in segs.iter().enumerate() {
            if s.vertices.is_empty() {
                return Err(format!("segment {i} has no vertices"));
            }
            if s.is_empty() {
                continue;
            }
            let axis = s.straight_axis().ok_or_else(|| format!("segment {i} is not straight"))?;
            let vertical = i == 0 || i == 3;
            if vertical != (axis == Axis::Z) {
                return Err(format!("segment {i} runs along {axis:?}"));
            }
            if !vertical && s.vertices.iter().any(|v| v.z != z) {
                return Err(format!("segment {i} leaves floor {}", self.floor));
            }
        }
        let axes: Vec<Axis> = segs.iter().filter_map(|s| s.straight_axis()).collect();
        if axes.windows(2).any(|w| w[0] == w[1]) {
            return Err("adjacent segments are parallel".into());
        }
        self.path().validate()
    }
}

/// True iff X-sets and Y-sets of distinct pairs are disjoint.
pub fn check_condition_2d(pairs: &[(Vertex, Vertex)]) -> bool {
    condition_conflict(pairs).is_none()
}

/// First (earlier, later) pair indices violating the 2D condition.
pub fn condition_conflict(pairs: &[(Vertex, Vertex)]) -> Option<(usize, usize)> {
    let mut xs: HashMap<u32, usize> = HashMap::new();
    let mut ys: HashMap<u32, usize> = HashMap::new();
    for (r, &(u, v)) in pairs.iter().enumerate() {
        for (map, a, b) in [(&mut xs, u.x, v.x), (&mut ys, u.y, v.y)] {
            for c in [a, b] {
                if let Some(&q) = map.get(&c) {
                    if q != r {
                        return Some((q, r));
                    }
                }
            }
            map.insert(a, r);
            map.insert(b, r);
        }
    }
    None
}

/// Horizontal run at the start's Y, then a vertical run. The start is the
/// endpoint with smaller X (the first one on ties).
fn l_shape(u: Vertex, v: Vertex) -> (RoutePath, RoutePath) {
    let (s, e) = if v.x < u.x { (v, u) } else { (u, v) };
    let h = straight(s, Axis::X, e.x);
    let corner = *h.last().unwrap();
    let vert = straight(corner, Axis::Y, e.y);
    (RoutePath::new(h), RoutePath::new(vert))
}

fn check_in_square(l: u32, v: Vertex) -> Result<(), RoutingError> {
    if v.x >= l || v.y >= l {
        return Err(RoutingError::OutOfBounds(v, l));
    }
    Ok(())
}

/// Edge-disjoint L-shaped paths in an L x L floor. Each path starts at the
/// smaller-X endpoint and has length equal to the Manhattan distance.
pub fn route_2d(l: u32, pairing: &Pairing) -> Result<Vec<RoutePath>, RoutingError> {
    pairing.validate()?;
    for (r, &(u, v)) in pairing.pairs.iter().enumerate() {
        check_in_square(l, u)?;
        check_in_square(l, v)?;
        if u.z != v.z {
            return Err(RoutingError::MixedFloors(r));
        }
    }
    if let Some((p, q)) = condition_conflict(&pairing.pairs) {
        return Err(RoutingError::Condition2d(p, q));
    }
    Ok(pairing
        .pairs
        .iter()
        .map(|&(u, v)| {
            let (h, w) = l_shape(u, v);
            join(&[&h, &w])
        })
        .collect())
}

/// One floor index Z_r in 1..=4L per pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorAssignment {
    pub floors: Vec<u32>,
}

impl FloorAssignment {
    pub fn floors_used(&self) -> usize {
        let mut f = self.floors.clone();
        f.sort_unstable();
        f.dedup();
        f.len()
    }

    pub fn max_floor(&self) -> u32 {
        self.floors.iter().copied().max().unwrap_or(0)
    }
}

fn check_bottom(l: u32, pairing: &Pairing) -> Result<(), RoutingError> {
    if l < 2 {
        return Err(RoutingError::SideTooSmall(l));
    }
    pairing.validate()?;
    for v in pairing.vertices() {
        check_in_square(l, v)?;
        if v.z != 0 {
            return Err(RoutingError::OffFloor(v));
        }
    }
    Ok(())
}

fn check_full(l: u32, pairing: &Pairing) -> Result<(), RoutingError> {
    if l % 2 == 1 {
        return Err(RoutingError::OddSide(l));
    }
    check_bottom(l, pairing)?;
    let want = (l * l) as usize;
    if 2 * pairing.len() != want {
        return Err(RoutingError::Incomplete { got: 2 * pairing.len(), want });
    }
    Ok(())
}

/// Greedy floor assignment over a full pairing of the bottom floor.
pub fn assign_floors(l: u32, pairing: &Pairing) -> Result<FloorAssignment, RoutingError> {
    check_full(l, pairing)?;
    greedy_floors(l, pairing)
}

/// Each pair takes the lowest floor whose used X and Y coordinates avoid its own.
fn greedy_floors(l: u32, pairing: &Pairing) -> Result<FloorAssignment, RoutingError> {
    let nf = 4 * l as usize;
    let mut cols = vec![BitVec::zeros(l as usize); nf];
    let mut rows = vec![BitVec::zeros(l as usize); nf];
    let mut floors = Vec::with_capacity(pairing.len());
    for (r, &(u, v)) in pairing.pairs.iter().enumerate() {
        let (xs, ys) = ([u.x as usize, v.x as usize], [u.y as usize, v.y as usize]);
        let z = (0..nf)
            .find(|&z| xs.iter().all(|&x| !cols[z].get(x)) && ys.iter().all(|&y| !rows[z].get(y)))
            .ok_or(RoutingError::FloorsExhausted(r))?;
        for x in xs {
            cols[z].set(x, true);
        }
        for y in ys {
            rows[z].set(y, true);
        }
        floors.push(z as u32 + 1);
    }
    Ok(FloorAssignment { floors })
}

fn route_with_floors(pairing: &Pairing, fa: &FloorAssignment) -> Vec<SegmentedPath> {
    pairing
        .pairs
        .iter()
        .zip(&fa.floors)
        .map(|(&(u, v), &floor)| {
            let z = floor - 1;
            let up = RoutePath::new(straight(u, Axis::Z, z));
            let down = RoutePath::new(straight(v.with_coord(Axis::Z, z), Axis::Z, 0));
            let (a, b) = (u.with_coord(Axis::Z, z), v.with_coord(Axis::Z, z));
            let (h, w) = l_shape(a, b);
            let (mid1, mid2) = if b.x < a.x { (w.reversed(), h.reversed()) } else { (h, w) };
            SegmentedPath { floor, up, mid1, mid2, down }
        })
        .collect()
}

/// Full pairing of the bottom floor of the (L, L, 4L) grid, L even.
pub fn route_3d(l: u32, pairing: &Pairing) -> Result<Vec<SegmentedPath>, RoutingError> {
    let fa = assign_floors(l, pairing)?;
    Ok(route_with_floors(pairing, &fa))
}

/// Any pairing of bottom-floor vertices, any L >= 2. The greedy's counting
/// argument does not use completeness or parity, so it still never runs out
/// of floors.
pub fn route_3d_subset(l: u32, pairing: &Pairing) -> Result<Vec<SegmentedPath>, RoutingError> {
    check_bottom(l, pairing)?;
    let fa = greedy_floors(l, pairing)?;
    Ok(route_with_floors(pairing, &fa))
}

/// Routes pairings of a subset S' of the bottom floor by completing them
/// with dummy pairs (leftover vertices in lexicographic order) into full
/// pairings, then discarding the dummy paths.
#[derive(Clone, Debug)]
pub struct SubsetRouter {
    l: u32,
    subset: Vec<Vertex>,
    dummies: Vec<(Vertex, Vertex)>,
}

pub fn restrict_routable(l: u32, subset: &[Vertex]) -> Result<SubsetRouter, RoutingError> {
    if l % 2 == 1 {
        return Err(RoutingError::OddSide(l));
    }
    if subset.len() % 2 == 1 {
        return Err(RoutingError::OddSubset(subset.len()));
    }
    let mut inside = std::collections::HashSet::new();
    for &v in subset {
        check_in_square(l, v)?;
        if v.z != 0 {
            return Err(RoutingError::OffFloor(v));
        }
        if !inside.insert(v) {
            return Err(RoutingError::Repeated(v));
        }
    }
    let mut rest: Vec<Vertex> =
        (0..l).flat_map(|x| (0..l).map(move |y| Vertex::new(x, y, 0))).filter(|v| !inside.contains(v)).collect();
    rest.sort();
    let dummies = rest.chunks(2).map(|c| (c[0], c[1])).collect();
    Ok(SubsetRouter { l, subset: subset.to_vec(), dummies })
}

impl SubsetRouter {
    pub fn subset(&self) -> &[Vertex] {
        &self.subset
    }

    pub fn route(&self, pairing: &Pairing) -> Result<Vec<SegmentedPath>, RoutingError> {
        pairing.validate()?;
        for v in pairing.vertices() {
            if !self.subset.contains(&v) {
                return Err(RoutingError::NotInSubset(v));
            }
        }
        if 2 * pairing.len() != self.subset.len() {
            return Err(RoutingError::Incomplete { got: 2 * pairing.len(), want: self.subset.len() });
        }
        let mut full = pairing.clone();
        full.pairs.extend(self.dummies.iter().copied());
        let mut paths = route_3d(self.l, &full)?;
        paths.truncate(pairing.len());
        Ok(paths)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeConflict {
    pub edge: Edge,
    pub first: usize,
    pub second: usize,
}

/// Ok iff no undirected edge lies on two distinct paths.
pub fn verify_edge_disjoint(paths: &[RoutePath]) -> Result<(), EdgeConflict> {
    let mut owner: HashMap<Edge, usize> = HashMap::new();
    for (i, p) in paths.iter().enumerate() {
        for e in p.edges() {
            if let Some(&j) = owner.get(&e) {
                if j != i {
                    return Err(EdgeConflict { edge: e, first: j, second: i });
                }
            }
            owner.insert(e, i);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteStats {
    pub num_paths: usize,
    pub max_length: usize,
    pub total_length: usize,
    pub floors_used: usize,
    pub max_floor: u32,
}

impl RouteStats {
    pub fn of_paths(paths: &[RoutePath]) -> Self {
        RouteStats {
            num_paths: paths.len(),
            max_length: paths.iter().map(|p| p.len()).max().unwrap_or(0),
            total_length: paths.iter().map(|p| p.len()).sum(),
            floors_used: usize::from(!paths.is_empty()),
            max_floor: u32::from(!paths.is_empty()),
        }
    }

    pub fn of_segmented(paths: &[SegmentedPath]) -> Self {
        let flat: Vec<RoutePath> = paths.iter().map(|p| p.path()).collect();
        let mut s = Self::of_paths(&flat);
        let mut f: Vec<u32> = paths.iter().map(|p| p.floor).collect();
        f.sort_unstable();
        f.dedup();
        s.floors_used = f.len();
        s.max_floor = f.last().copied().unwrap_or(0);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: u32, y: u32) -> Vertex {
        Vertex::new(x, y, 0)
    }

    #[test]
    fn condition_examples() {
        assert!(check_condition_2d(&[(v(0, 1), v(2, 3))]));
        assert!(check_condition_2d(&[(v(1, 1), v(2, 2)), (v(3, 3), v(4, 4))]));
        assert!(!check_condition_2d(&[(v(3, 0), v(1, 1)), (v(3, 2), v(4, 4))]));
        assert_eq!(condition_conflict(&[(v(0, 0), v(1, 1)), (v(2, 2), v(5, 1))]), Some((0, 1)));
    }

    #[test]
    fn route_2d_examples() {
        assert_eq!(route_2d(4, &Pairing::new(vec![(v(0, 0), v(0, 0))])), Err(RoutingError::Degenerate(0)));
        let p = route_2d(4, &Pairing::new(vec![(v(0, 0), v(3, 0))])).unwrap();
        assert_eq!(p[0].len(), 3);
        assert_eq!(p[0].straight_axis(), Some(Axis::X));
        let p = route_2d(5, &Pairing::new(vec![(v(1, 1), v(4, 3))])).unwrap();
        assert_eq!(p[0].len(), 5);
        assert!(p[0].vertices.contains(&v(4, 1)));
        // start is reordered to the smaller X
        let p = route_2d(5, &Pairing::new(vec![(v(4, 3), v(1, 1))])).unwrap();
        assert_eq!(p[0].start(), Some(v(1, 1)));
        assert!(p[0].vertices.contains(&v(4, 1)));
        assert_eq!(
            route_2d(8, &Pairing::new(vec![(v(1, 2), v(3, 4)), (v(3, 5), v(6, 6))])),
            Err(RoutingError::Condition2d(0, 1))
        );
        assert!(matches!(route_2d(3, &Pairing::new(vec![(v(0, 0), v(3, 0))])), Err(RoutingError::OutOfBounds(..))));
    }

    #[test]
    fn floor_examples() {
        let one = Pairing::new(vec![(v(0, 0), v(1, 1)), (v(0, 1), v(1, 0))]);
        assert_eq!(assign_floors(2, &one).unwrap().floors, vec![1, 2]);
        let disjoint = Pairing::new(vec![(v(0, 0), v(1, 1)), (v(2, 2), v(3, 3))]);
        assert_eq!(greedy_floors(4, &disjoint).unwrap().floors, vec![1, 1]);
        assert_eq!(assign_floors(3, &one), Err(RoutingError::OddSide(3)));
        assert_eq!(assign_floors(4, &one), Err(RoutingError::Incomplete { got: 4, want: 16 }));
    }

    #[test]
    fn floor_one_pair_is_the_planar_l_shape() {
        let p = route_3d(2, &Pairing::new(vec![(v(0, 0), v(1, 1)), (v(0, 1), v(1, 0))])).unwrap();
        assert_eq!(p[0].floor, 1);
        assert!(p[0].up.is_empty() && p[0].down.is_empty());
        assert_eq!(p[0].len(), 2);
        assert_eq!(p[1].floor, 2);
        assert_eq!(p[1].len(), 4);
        for s in &p {
            s.check_shape().unwrap();
            assert!(s.len() <= 20);
        }
    }

    #[test]
    fn mid_runs_keep_direction_from_first_endpoint() {
        let p = route_3d_subset(4, &Pairing::new(vec![(v(3, 0), v(0, 2))])).unwrap();
        let path = p[0].path();
        assert_eq!(path.start(), Some(v(3, 0)));
        assert_eq!(path.end(), Some(v(0, 2)));
        assert_eq!(p[0].mid1.straight_axis(), Some(Axis::Y));
        assert_eq!(p[0].mid2.straight_axis(), Some(Axis::X));
        p[0].check_shape().unwrap();
    }

    #[test]
    fn verify_examples() {
        assert!(verify_edge_disjoint(&[]).is_ok());
        let a = RoutePath::new(vec![Vertex::new(0, 0, 0), Vertex::new(1, 0, 0)]);
        let b = RoutePath::new(vec![Vertex::new(1, 0, 0), Vertex::new(0, 0, 0), Vertex::new(0, 1, 0)]);
        let c = verify_edge_disjoint(&[a.clone(), b]).unwrap_err();
        assert_eq!(c.edge, Edge::new(Vertex::new(0, 0, 0), Vertex::new(1, 0, 0)).unwrap());
        assert_eq!((c.first, c.second), (0, 1));
        assert!(verify_edge_disjoint(&[a]).is_ok());
    }

    #[test]
    fn restrict_examples() {
        let r = restrict_routable(4, &[]).unwrap();
        assert!(r.route(&Pairing::default()).unwrap().is_empty());
        let r = restrict_routable(4, &[v(0, 3), v(2, 1)]).unwrap();
        let p = r.route(&Pairing::new(vec![(v(0, 3), v(2, 1))])).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].floor, 1);
        assert_eq!(p[0].len(), 4);
        assert_eq!(restrict_routable(4, &[v(0, 0)]).unwrap_err(), RoutingError::OddSubset(1));
        let all: Vec<Vertex> = (0..4).flat_map(|x| (0..4).map(move |y| v(x, y))).collect();
        let full = Pairing::new(all.chunks(2).map(|c| (c[0], c[1])).collect());
        let direct = route_3d(4, &full).unwrap();
        assert_eq!(restrict_routable(4, &all).unwrap().route(&full).unwrap(), direct);
    }

    fn shuffled_full(l: u32, seed: u64) -> Pairing {
        use rand::seq::SliceRandom;
        let mut rng = crate::rng::SeedStream::new(seed).rng(0);
        let mut all: Vec<Vertex> = (0..l).flat_map(|x| (0..l).map(move |y| v(x, y))).collect();
        all.shuffle(&mut rng);
        Pairing::new(all.chunks(2).map(|c| (c[0], c[1])).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn route_3d_is_edge_disjoint_and_short(half in 1u32..6, seed in any::<u64>()) {
            let l = 2 * half;
            let pairing = shuffled_full(l, seed);
            let paths = route_3d(l, &pairing).unwrap();
            let flat: Vec<RoutePath> = paths.iter().map(|p| p.path()).collect();
            prop_assert!(verify_edge_disjoint(&flat).is_ok());
            for (sp, &(a, b)) in paths.iter().zip(&pairing.pairs) {
                prop_assert!(sp.check_shape().is_ok());
                prop_assert!(sp.len() as u32 <= 10 * l);
                prop_assert!(sp.floor <= 4 * l);
                prop_assert_eq!(sp.path().start(), Some(a));
                prop_assert_eq!(sp.path().end(), Some(b));
            }
        }

        #[test]
        fn routing_is_deterministic(seed in any::<u64>()) {
            let pairing = shuffled_full(6, seed);
            prop_assert_eq!(route_3d(6, &pairing).unwrap(), route_3d(6, &pairing).unwrap());
        }
    }
}
