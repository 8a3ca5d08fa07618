//! The path network induced by a line set and its Cox points, and the
//! shortest path from the origin to the nearest Cox point.
//!
//! Nodes are line crossings, Cox points and the origin. Along every line the
//! nodes form a path graph ordered by coordinate, and an edge joins each pair
//! of consecutive nodes with weight equal to their separation. Nodes closer
//! than [`MERGE_TOL`] on a line are merged into one.
//!
//! The adjacency is not stored. Each line's sorted node list is built the
//! first time the search touches that line, so a query only pays for the
//! lines inside the ball it explores.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::hash::Hash;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{ModelParams, Window};
use crate::sampler::{self, palm_condition, stream_rng, CoxSample, LineSet, Palm};

/// Coordinates closer than this along a line denote the same node.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn l1_norm(&self) -> f64 {
        self.x.abs() + self.y.abs()
    }

    fn lex_cmp(&self, other: &Point2) -> Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    /// Crossing of vertical line `v` and horizontal line `h`.
    Crossing { v: u32, h: u32 },
    /// The `k`-th Cox point on vertical line `line`.
    OnVertical { line: u32, k: u32 },
    /// The `k`-th Cox point on horizontal line `line`.
    OnHorizontal { line: u32, k: u32 },
    /// The reference point of the typical-point case.
    Atom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Origin,
    Intersection,
    CoxPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub position: Point2,
    pub kind: NodeKind,
    /// True when a Cox point sits at this node, either as the node itself or
    /// merged into it. The typical-point atom never counts.
    pub carries_point: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum LineRef {
    V(u32),
    H(u32),
}

#[derive(Debug, Clone, Copy)]
struct Stop {
    pos: f64,
    node: NodeId,
    carries_point: bool,
}

/// Distance from the origin to its nearest Cox point along the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceResult {
    pub distance: f64,
    pub witness: Point2,
    /// The distance cannot be changed by anything outside the window.
    pub exact: bool,
}

pub struct PathNetwork<'a> {
    lines: &'a LineSet,
    points: &'a CoxSample,
    stops: Vec<OnceLock<Vec<Stop>>>,
    origin: NodeId,
    l_x: u32,
}

/// Wraps the line set and its Cox points as a path network rooted at the
/// origin. The line set must be Palm-conditioned so that the origin lies on
/// a line.
pub fn build_network<'a>(lines: &'a LineSet, points: &'a CoxSample) -> Result<PathNetwork<'a>> {
    let l_x = match (lines.palm(), lines.palm_horizontal_index()) {
        (Some(_), Some(h)) => h as u32,
        _ => return Err(Error::OriginNotOnNetwork),
    };
    let n_lines = lines.vertical_offsets().len() + lines.horizontal_offsets().len();
    let mut net = PathNetwork {
        lines,
        points,
        stops: (0..n_lines).map(|_| OnceLock::new()).collect(),
        origin: NodeId::Atom,
        l_x,
    };
    let on_axis = net.stops(LineRef::H(l_x));
    let at = on_axis.partition_point(|s| s.pos < -MERGE_TOL);
    net.origin = match on_axis.get(at) {
        Some(s) if s.pos.abs() <= MERGE_TOL => s.node,
        _ => match lines.palm_vertical_index() {
            Some(v) => NodeId::Crossing { v: v as u32, h: l_x },
            None => NodeId::Atom,
        },
    };
    Ok(net)
}

impl<'a> PathNetwork<'a> {
    pub fn origin(&self) -> NodeId {
        self.origin
    }

    pub fn lines(&self) -> &LineSet {
        self.lines
    }

    pub fn position(&self, id: NodeId) -> Point2 {
        let v = self.lines.vertical_offsets();
        let h = self.lines.horizontal_offsets();
        match id {
            NodeId::Crossing { v: i, h: j } => Point2 {
                x: v[i as usize],
                y: h[j as usize],
            },
            NodeId::OnVertical { line, k } => Point2 {
                x: v[line as usize],
                y: self.points.on_vertical(line as usize)[k as usize],
            },
            NodeId::OnHorizontal { line, k } => Point2 {
                x: self.points.on_horizontal(line as usize)[k as usize],
                y: h[line as usize],
            },
            NodeId::Atom => Point2 { x: 0.0, y: 0.0 },
        }
    }

    fn lines_through(&self, id: NodeId) -> ([Option<LineRef>; 2], [f64; 2]) {
        let p = self.position(id);
        match id {
            NodeId::Crossing { v, h } => ([Some(LineRef::V(v)), Some(LineRef::H(h))], [p.y, p.x]),
            NodeId::OnVertical { line, .. } => ([Some(LineRef::V(line)), None], [p.y, 0.0]),
            NodeId::OnHorizontal { line, .. } => ([Some(LineRef::H(line)), None], [p.x, 0.0]),
            NodeId::Atom => ([Some(LineRef::H(self.l_x)), None], [0.0, 0.0]),
        }
    }

    fn slot(&self, line: LineRef) -> usize {
        match line {
            LineRef::V(i) => i as usize,
            LineRef::H(i) => self.lines.vertical_offsets().len() + i as usize,
        }
    }

    fn stops(&self, line: LineRef) -> &[Stop] {
        self.stops[self.slot(line)].get_or_init(|| self.build_stops(line))
    }

    /// Sorted, merged node list along one line.
    fn build_stops(&self, line: LineRef) -> Vec<Stop> {
        // (position, priority, node, is a Cox point); crossings win a merge,
        // then the atom, then Cox points.
        let mut items: Vec<(f64, u8, NodeId, bool)> = Vec::new();
        match line {
            LineRef::V(v) => {
                for (h, &y) in self.lines.horizontal_offsets().iter().enumerate() {
                    items.push((y, 0, NodeId::Crossing { v, h: h as u32 }, false));
                }
                for (k, &y) in self.points.on_vertical(v as usize).iter().enumerate() {
                    items.push((y, 2, NodeId::OnVertical { line: v, k: k as u32 }, true));
                }
            }
            LineRef::H(h) => {
                for (v, &x) in self.lines.vertical_offsets().iter().enumerate() {
                    items.push((x, 0, NodeId::Crossing { v: v as u32, h }, false));
                }
                for (k, &x) in self.points.on_horizontal(h as usize).iter().enumerate() {
                    items.push((x, 2, NodeId::OnHorizontal { line: h, k: k as u32 }, true));
                }
                if h == self.l_x && self.lines.palm() == Some(Palm::TypicalPoint) {
                    items.push((0.0, 1, NodeId::Atom, false));
                }
            }
        }
        items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut stops: Vec<Stop> = Vec::with_capacity(items.len());
        let mut anchor = f64::NEG_INFINITY;
        let mut rank = u8::MAX;
        for (pos, prio, node, is_point) in items {
            match stops.last_mut() {
                Some(last) if pos - anchor <= MERGE_TOL => {
                    last.carries_point |= is_point;
                    if prio < rank {
                        last.node = node;
                        rank = prio;
                    }
                }
                _ => {
                    anchor = pos;
                    rank = prio;
                    stops.push(Stop {
                        pos,
                        node,
                        carries_point: is_point,
                    });
                }
            }
        }
        stops
    }

    fn stop_index(&self, stops: &[Stop], pos: f64, id: NodeId) -> Option<usize> {
        let start = stops.partition_point(|s| s.pos < pos - 2.0 * MERGE_TOL);
        stops[start..]
            .iter()
            .take_while(|s| s.pos <= pos + 2.0 * MERGE_TOL)
            .position(|s| s.node == id)
            .map(|i| start + i)
    }

    fn carries_point(&self, id: NodeId) -> bool {
        let (lines, pos) = self.lines_through(id);
        lines.iter().zip(pos).any(|(line, p)| {
            line.is_some_and(|l| {
                let stops = self.stops(l);
                self.stop_index(stops, p, id).is_some_and(|i| stops[i].carries_point)
            })
        })
    }

    fn kind(&self, id: NodeId) -> NodeKind {
        if id == self.origin {
            NodeKind::Origin
        } else if matches!(id, NodeId::Crossing { .. }) {
            NodeKind::Intersection
        } else {
            NodeKind::CoxPoint
        }
    }

    fn node(&self, id: NodeId) -> Node {
        Node {
            id,
            position: self.position(id),
            kind: self.kind(id),
            carries_point: self.carries_point(id),
        }
    }

    fn all_lines(&self) -> impl Iterator<Item = LineRef> {
        let nv = self.lines.vertical_offsets().len() as u32;
        let nh = self.lines.horizontal_offsets().len() as u32;
        (0..nv).map(LineRef::V).chain((0..nh).map(LineRef::H))
    }

    /// Every node of the network, sorted by id.
    pub fn nodes(&self) -> Vec<Node> {
        let mut ids: Vec<NodeId> = self
            .all_lines()
            .flat_map(|l| self.stops(l).iter().map(|s| s.node))
            .collect();
        ids.push(self.origin);
        ids.sort();
        ids.dedup();
        ids.into_iter().map(|id| self.node(id)).collect()
    }

    /// Every edge as `(from, to, length)`, consecutive nodes along each line.
    pub fn edges(&self) -> Vec<(NodeId, NodeId, f64)> {
        self.all_lines()
            .flat_map(|l| {
                self.stops(l)
                    .windows(2)
                    .map(|w| (w[0].node, w[1].node, w[1].pos - w[0].pos))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// Explicit adjacency-list copy of the network.
    pub fn materialize(&self) -> MaterializedNetwork {
        let nodes = self.nodes();
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (a, b, w) in self.edges() {
            let (ia, ib) = (index[&a], index[&b]);
            adjacency[ia].push((ib, w));
            adjacency[ib].push((ia, w));
        }
        MaterializedNetwork {
            positions: nodes.iter().map(|n| n.position).collect(),
            carries_point: nodes.iter().map(|n| n.carries_point).collect(),
            adjacency,
            origin: index[&self.origin],
        }
    }
}

/// A graph searched outward from an origin for the nearest node carrying a
/// Cox point.
pub(crate) trait SearchGraph {
    type Node: Copy + Eq + Hash + Ord;
    fn origin(&self) -> Self::Node;
    fn neighbors(&self, node: Self::Node, out: &mut Vec<(Self::Node, f64)>);
    fn witness(&self, node: Self::Node) -> Option<Point2>;
}

impl SearchGraph for PathNetwork<'_> {
    type Node = NodeId;

    fn origin(&self) -> NodeId {
        self.origin
    }

    fn neighbors(&self, node: NodeId, out: &mut Vec<(NodeId, f64)>) {
        let (lines, pos) = self.lines_through(node);
        for (line, p) in lines.iter().zip(pos) {
            let Some(line) = *line else { continue };
            let stops = self.stops(line);
            let Some(i) = self.stop_index(stops, p, node) else {
                continue;
            };
            if i > 0 {
                out.push((stops[i - 1].node, p - stops[i - 1].pos));
            }
            if let Some(next) = stops.get(i + 1) {
                out.push((next.node, next.pos - p));
            }
        }
    }

    fn witness(&self, node: NodeId) -> Option<Point2> {
        self.carries_point(node).then(|| self.position(node))
    }
}

/// An explicit copy of a [`PathNetwork`].
#[derive(Debug, Clone)]
pub struct MaterializedNetwork {
    positions: Vec<Point2>,
    carries_point: Vec<bool>,
    adjacency: Vec<Vec<(usize, f64)>>,
    origin: usize,
}

impl MaterializedNetwork {
    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Splits every edge in two with a pass-through node at fraction `t`
    /// of its length.
    pub fn subdivide(&self, t: f64) -> MaterializedNetwork {
        let mut positions = self.positions.clone();
        let mut carries_point = self.carries_point.clone();
        let mut adjacency = vec![Vec::new(); positions.len()];
        for a in 0..self.adjacency.len() {
            for &(b, w) in self.adjacency[a].iter().filter(|&&(b, _)| a < b) {
                let (pa, pb) = (self.positions[a], self.positions[b]);
                let mid = positions.len();
                positions.push(Point2 {
                    x: pa.x + t * (pb.x - pa.x),
                    y: pa.y + t * (pb.y - pa.y),
                });
                carries_point.push(false);
                adjacency.push(vec![(a, t * w), (b, (1.0 - t) * w)]);
                adjacency[a].push((mid, t * w));
                adjacency[b].push((mid, (1.0 - t) * w));
            }
        }
        MaterializedNetwork {
            positions,
            carries_point,
            adjacency,
            origin: self.origin,
        }
    }

    pub fn shortest_path_to_nearest(&self) -> Result<DistanceResult> {
        nearest(self, f64::INFINITY)
            .map(|(distance, witness)| DistanceResult {
                distance,
                witness,
                exact: true,
            })
            .ok_or(Error::NoPointFound)
    }
}

impl SearchGraph for MaterializedNetwork {
    type Node = usize;

    fn origin(&self) -> usize {
        self.origin
    }

    fn neighbors(&self, node: usize, out: &mut Vec<(usize, f64)>) {
        out.extend_from_slice(&self.adjacency[node]);
    }

    fn witness(&self, node: usize) -> Option<Point2> {
        self.carries_point[node].then(|| self.positions[node])
    }
}

#[derive(PartialEq)]
struct Entry<N>(f64, N);

impl<N: Eq> Eq for Entry<N> {}

impl<N: Ord> PartialOrd for Entry<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<N: Ord> Ord for Entry<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then_with(|| self.1.cmp(&other.1))
    }
}

/// Dijkstra from the origin. Returns the smallest distance at which a node
/// carries a Cox point, with ties broken by the lexicographically smallest
/// witness. Nodes farther than `limit` are never settled.
pub(crate) fn nearest<G: SearchGraph>(graph: &G, limit: f64) -> Option<(f64, Point2)> {
    let mut dist: HashMap<G::Node, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut scratch = Vec::new();
    let mut best: Option<(f64, Point2)> = None;

    let origin = graph.origin();
    dist.insert(origin, 0.0);
    heap.push(Reverse(Entry(0.0, origin)));

    while let Some(Reverse(Entry(d, u))) = heap.pop() {
        if d > dist[&u] {
            continue;
        }
        if d > limit || best.is_some_and(|(bd, _)| d > bd) {
            break;
        }
        if let Some(w) = graph.witness(u) {
            best = match best {
                Some((bd, bw)) if bw.lex_cmp(&w).is_le() => Some((bd, bw)),
                _ => Some((d, w)),
            };
            continue;
        }
        scratch.clear();
        graph.neighbors(u, &mut scratch);
        for &(v, w) in &scratch {
            let nd = d + w;
            if dist.get(&v).is_none_or(|&old| nd < old) {
                dist.insert(v, nd);
                heap.push(Reverse(Entry(nd, v)));
            }
        }
    }
    best
}

/// Shortest path from the origin to the nearest Cox point, searching the
/// whole network. The origin atom of the typical-point case is never a
/// candidate.
pub fn shortest_path_to_nearest(net: &PathNetwork<'_>) -> Result<DistanceResult> {
    let half_width = net.lines.window().half_width();
    nearest(net, f64::INFINITY)
        .map(|(distance, witness)| DistanceResult {
            distance,
            witness,
            exact: distance <= half_width,
        })
        .ok_or(Error::NoPointFound)
}

/// Smallest `|x| + |y|` over all Cox points, the atom excluded.
pub fn nearest_l1(lines: &LineSet, points: &CoxSample) -> Option<f64> {
    points
        .points(lines)
        .map(|(x, y)| x.abs() + y.abs())
        .min_by(f64::total_cmp)
}

/// Window growth policy for [`simulate_distance_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimConfig {
    /// First window half-width; `None` means `max(3 / lambda_c, 3 / lambda_l)`.
    pub initial_half_width: Option<f64>,
    /// Largest half-width tried; `None` means `1e4 / lambda_c`.
    pub max_half_width: Option<f64>,
}

impl SimConfig {
    pub fn initial(&self, params: &ModelParams) -> f64 {
        self.initial_half_width
            .unwrap_or_else(|| (3.0 / params.lambda_c()).max(3.0 / params.lambda_l()))
    }

    pub fn cap(&self, params: &ModelParams) -> f64 {
        self.max_half_width.unwrap_or(1e4 / params.lambda_c())
    }
}

/// One Monte-Carlo draw of the shortest path distance from the reference
/// point to the nearest Cox point.
pub fn simulate_distance(params: &ModelParams, mode: Palm, seed: u64) -> Result<DistanceResult> {
    simulate_distance_with(params, mode, seed, &SimConfig::default())
}

/// Like [`simulate_distance`] with an explicit window policy.
///
/// Attempt `k` samples a fresh realization in the window of half-width
/// `W_k = W_0 2^k` from stream `k` of `seed` and accepts it when the nearest
/// point lies within path distance `W_k`.
///
/// A path of length `d` from the origin never leaves the L1 ball of radius
/// `d`, and that ball lies inside the window when `d <= W_k`. Lines and
/// points outside the window can therefore neither shorten nor replace an
/// accepted answer, so the accepted distance is the one of the untruncated
/// process. Acceptance itself depends only on the realization inside that
/// ball, and every attempt is an independent draw of the same process, so
/// the accepted value is an exact sample.
pub fn simulate_distance_with(
    params: &ModelParams,
    mode: Palm,
    seed: u64,
    config: &SimConfig,
) -> Result<DistanceResult> {
    let cap = config.cap(params);
    let mut half_width = config.initial(params);
    for attempt in 0u64.. {
        if half_width > cap {
            return Err(Error::WindowOverflow { half_width, cap });
        }
        let window = Window::new(half_width)?;
        let mut rng = stream_rng(seed, attempt);
        let lines = sampler::sample_mplp_with(&mut rng, params, window);
        let lines = palm_condition(lines, mode)?;
        let points = sampler::sample_cox_with(&mut rng, &lines, params);
        let net = build_network(&lines, &points)?;
        if let Some((distance, witness)) = nearest(&net, half_width) {
            return Ok(DistanceResult {
                distance,
                witness,
                exact: true,
            });
        }
        half_width *= 2.0;
    }
    unreachable!("the window cap ends the loop")
}
