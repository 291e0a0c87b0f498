//! Layout selection and SWAP routing onto a physical coupling map.
//!
//! Layouts are full permutations of the device: logical indices below the
//! circuit width are the circuit's qubits, the rest label idle physical
//! qubits so that routing SWAPs through them stays bookkept.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};

/// Physical qubit adjacency graph of a device.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    name: String,
    n_physical: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl CouplingMap {
    /// Builds a map from undirected edges. Rejects self-loops, out-of-range
    /// indices and disconnected graphs.
    pub fn new(name: impl Into<String>, n_physical: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n_physical == 0 {
            return Err(Error::invalid("coupling map needs at least one qubit"));
        }
        let mut set = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n_physical];
        for &(a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop on physical qubit {a}")));
            }
            if a >= n_physical || b >= n_physical {
                return Err(Error::invalid(format!("edge ({a}, {b}) out of range for {n_physical} qubits")));
            }
            if set.insert((a.min(b), a.max(b))) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let map = CouplingMap { name: name.into(), n_physical, edges: set, adjacency };
        if map.distances_from(0).iter().any(Option::is_none) {
            return Err(Error::invalid(format!("coupling map {:?} is not connected", map.name)));
        }
        Ok(map)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    /// Edges as `(low, high)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adjacency[p]
    }

    pub fn degree(&self, p: usize) -> usize {
        self.adjacency[p].len()
    }

    fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_physical];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(p) = queue.pop_front() {
            let d = dist[p].unwrap_or(0);
            for &n in &self.adjacency[p] {
                if dist[n].is_none() {
                    dist[n] = Some(d + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    /// Hop distance between two physical qubits.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.distances_from(a)[b].expect("coupling map is connected")
    }

    /// BFS shortest path from `a` to `b`, inclusive of both ends. Neighbors
    /// are explored in ascending order, so the path is deterministic.
    pub fn shortest_path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; self.n_physical];
        prev[a] = a;
        let mut queue = VecDeque::from([a]);
        while let Some(p) = queue.pop_front() {
            if p == b {
                break;
            }
            for &n in &self.adjacency[p] {
                if prev[n] == usize::MAX {
                    prev[n] = p;
                    queue.push_back(n);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// Edge set of the 7-qubit I-shaped Falcon device family.
const FALCON_7: [(usize, usize); 6] = [(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)];

/// Built-in devices: `casablanca`, `jakarta`, `line-N`, `full-N`.
pub fn builtin_topology(name: &str) -> Result<CouplingMap> {
    let sized = |prefix: &str| -> Option<Result<usize>> {
        name.strip_prefix(prefix).map(|n| match n.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::invalid(format!("invalid size in topology name {name:?}"))),
        })
    };
    match name {
        "casablanca" | "jakarta" => CouplingMap::new(name, 7, &FALCON_7),
        _ => {
            if let Some(n) = sized("line-") {
                let n = n?;
                let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
                CouplingMap::new(name, n, &edges)
            } else if let Some(n) = sized("full-") {
                let n = n?;
                let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
                CouplingMap::new(name, n, &edges)
            } else {
                Err(Error::invalid(format!("unknown topology {name:?}")))
            }
        }
    }
}

/// Bijection between logical slots and physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    logical_to_physical: Vec<usize>,
    physical_to_logical: Vec<usize>,
}

impl Layout {
    /// From a logical→physical permutation.
    pub fn from_logical_to_physical(l2p: Vec<usize>) -> Result<Self> {
        let mut p2l = vec![usize::MAX; l2p.len()];
        for (l, &p) in l2p.iter().enumerate() {
            if p >= l2p.len() || p2l[p] != usize::MAX {
                return Err(Error::invalid("layout is not a permutation"));
            }
            p2l[p] = l;
        }
        Ok(Layout { logical_to_physical: l2p, physical_to_logical: p2l })
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.logical_to_physical[logical]
    }

    pub fn logical(&self, physical: usize) -> usize {
        self.physical_to_logical[physical]
    }

    pub fn logical_to_physical(&self) -> &[usize] {
        &self.logical_to_physical
    }

    fn swap_physical(&mut self, a: usize, b: usize) {
        let (la, lb) = (self.physical_to_logical[a], self.physical_to_logical[b]);
        self.physical_to_logical.swap(a, b);
        self.logical_to_physical[la] = b;
        self.logical_to_physical[lb] = a;
    }
}

/// A circuit mapped onto physical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct TranspiledCircuit {
    /// Ops over physical indices; width is the device size.
    pub circuit: Circuit,
    /// Width of the logical circuit.
    pub n_logical: usize,
    pub coupling: CouplingMap,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    /// Index of the logical op each transpiled op came from; `None` for
    /// routing SWAPs.
    pub site_provenance: Vec<Option<usize>>,
    layouts: Vec<Layout>,
    op_layout: Vec<usize>,
}

impl TranspiledCircuit {
    /// Layout in force when op `op_index` executes. The three CX of a
    /// routing SWAP all see the pre-SWAP layout.
    pub fn layout_at(&self, op_index: usize) -> &Layout {
        &self.layouts[self.op_layout[op_index]]
    }

    /// Logical slot held by each operand of op `op_index`.
    pub fn logical_operands(&self, op_index: usize) -> Vec<usize> {
        let layout = self.layout_at(op_index);
        self.circuit.ops()[op_index].qubits.iter().map(|&p| layout.logical(p)).collect()
    }

    /// Number of CX gates added by routing.
    pub fn routing_cx_count(&self) -> usize {
        self.site_provenance.iter().filter(|p| p.is_none()).count()
    }
}

fn interaction_weights(circuit: &Circuit) -> BTreeMap<(usize, usize), usize> {
    let mut w = BTreeMap::new();
    for op in circuit.ops().iter().filter(|op| op.kind.is_unitary() && op.qubits.len() == 2) {
        let (a, b) = (op.qubits[0], op.qubits[1]);
        *w.entry((a.min(b), a.max(b))).or_insert(0) += 1;
    }
    w
}

/// Greedy densest placement: heavily interacting logical qubits go first,
/// each onto the free physical qubit that covers the most interaction weight
/// with already-placed partners, then the least weighted distance, then the
/// most used neighbors, then the highest degree, then the lowest index.
fn choose_layout(circuit: &Circuit, coupling: &CouplingMap) -> Layout {
    let n = circuit.n_qubits();
    let weights = interaction_weights(circuit);
    let weight = |a: usize, b: usize| weights.get(&(a.min(b), a.max(b))).copied().unwrap_or(0);
    let weighted_degree: Vec<usize> = (0..n).map(|l| (0..n).map(|m| weight(l, m)).sum()).collect();
    let dist: Vec<Vec<usize>> = (0..coupling.n_physical())
        .map(|p| coupling.distances_from(p).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect())
        .collect();

    let mut l2p: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; coupling.n_physical()];
    for _ in 0..n {
        let placed: Vec<usize> = (0..n).filter(|&l| l2p[l].is_some()).collect();
        let next = (0..n)
            .filter(|&l| l2p[l].is_none())
            .max_by_key(|&l| {
                let conn: usize = placed.iter().map(|&m| weight(l, m)).sum();
                (conn, weighted_degree[l], core::cmp::Reverse(l))
            })
            .expect("unplaced logical qubit");
        let phys = (0..coupling.n_physical())
            .filter(|&p| !used[p])
            .max_by_key(|&p| {
                let mut covered = 0;
                let mut spread = 0;
                for &m in &placed {
                    let w = weight(next, m);
                    let pm = l2p[m].expect("placed");
                    if coupling.is_edge(p, pm) {
                        covered += w;
                    }
                    spread += w * dist[p][pm];
                }
                let dense = coupling.neighbors(p).iter().filter(|&&q| used[q]).count();
                (covered, core::cmp::Reverse(spread), dense, coupling.degree(p), core::cmp::Reverse(p))
            })
            .expect("free physical qubit");
        l2p[next] = Some(phys);
        used[phys] = true;
    }
    let mut full: Vec<usize> = l2p.into_iter().map(|p| p.expect("placed")).collect();
    full.extend((0..coupling.n_physical()).filter(|&p| !used[p]));
    Layout::from_logical_to_physical(full).expect("greedy placement is a permutation")
}

struct Router<'a> {
    coupling: &'a CouplingMap,
    out: Circuit,
    provenance: Vec<Option<usize>>,
    layouts: Vec<Layout>,
    op_layout: Vec<usize>,
    layout: Layout,
}

impl Router<'_> {
    fn emit(&mut self, op: GateOp, origin: Option<usize>) -> Result<()> {
        self.out.push(op)?;
        self.provenance.push(origin);
        self.op_layout.push(self.layouts.len() - 1);
        Ok(())
    }

    fn emit_swap(&mut self, a: usize, b: usize, origin: Option<usize>) -> Result<()> {
        self.emit(GateOp::cx(a, b), origin)?;
        self.emit(GateOp::cx(b, a), origin)?;
        self.emit(GateOp::cx(a, b), origin)
    }

    /// Moves logical `mover` along the shortest path until it is adjacent to
    /// the physical qubit holding `anchor`.
    fn bring_adjacent(&mut self, mover: usize, anchor: usize) -> Result<()> {
        let (pa, pb) = (self.layout.physical(mover), self.layout.physical(anchor));
        if self.coupling.is_edge(pa, pb) {
            return Ok(());
        }
        let path = self.coupling.shortest_path(pa, pb);
        for hop in path.windows(2).take(path.len() - 2) {
            self.emit_swap(hop[0], hop[1], None)?;
            self.layout.swap_physical(hop[0], hop[1]);
            self.layouts.push(self.layout.clone());
        }
        Ok(())
    }
}

/// Maps `circuit` onto `coupling`: chooses an initial layout, routes every
/// two-qubit gate onto an edge with SWAP chains (each SWAP expanded into three
/// CX), and moves measurements to the end, relabeled through the final
/// layout.
pub fn transpile(circuit: &Circuit, coupling: &CouplingMap) -> Result<TranspiledCircuit> {
    if circuit.n_qubits() > coupling.n_physical() {
        return Err(Error::resource(format!(
            "circuit needs {} qubits but {} has {}",
            circuit.n_qubits(),
            coupling.name(),
            coupling.n_physical()
        )));
    }
    let initial = choose_layout(circuit, coupling);
    let mut router = Router {
        coupling,
        out: Circuit::new(circuit.name(), coupling.n_physical(), circuit.n_clbits()),
        provenance: Vec::new(),
        layouts: vec![initial.clone()],
        op_layout: Vec::new(),
        layout: initial.clone(),
    };
    let mut measures = Vec::new();
    for (i, op) in circuit.ops().iter().enumerate() {
        match op.kind {
            GateKind::Measure => measures.push((i, op.qubits[0], op.clbit.expect("measure has clbit"))),
            GateKind::CX | GateKind::Swap => {
                let (a, b) = (op.qubits[0], op.qubits[1]);
                router.bring_adjacent(a, b)?;
                let (pa, pb) = (router.layout.physical(a), router.layout.physical(b));
                if op.kind == GateKind::CX {
                    router.emit(GateOp { qubits: vec![pa, pb], ..op.clone() }, Some(i))?;
                } else {
                    router.emit_swap(pa, pb, Some(i))?;
                }
            }
            _ => {
                let p = router.layout.physical(op.qubits[0]);
                router.emit(GateOp { qubits: vec![p], ..op.clone() }, Some(i))?;
            }
        }
    }
    for (i, q, c) in measures {
        let p = router.layout.physical(q);
        router.emit(GateOp::measure(p, c), Some(i))?;
    }
    Ok(TranspiledCircuit {
        circuit: router.out,
        n_logical: circuit.n_qubits(),
        coupling: coupling.clone(),
        initial_layout: initial,
        final_layout: router.layout,
        site_provenance: router.provenance,
        layouts: router.layouts,
        op_layout: router.op_layout,
    })
}

/// Pairs `(a, b)`, `a < b`, of circuit qubits whose initial physical
/// positions share a coupling edge.
pub fn neighbor_pairs(t: &TranspiledCircuit, coupling: &CouplingMap) -> BTreeSet<(usize, usize)> {
    let mut pairs = BTreeSet::new();
    for a in 0..t.n_logical {
        for b in a + 1..t.n_logical {
            if coupling.is_edge(t.initial_layout.physical(a), t.initial_layout.physical(b)) {
                pairs.insert((a, b));
            }
        }
    }
    pairs
}

/// Circuit qubits adjacent to `qubit` under the initial layout.
pub fn neighbors_of(t: &TranspiledCircuit, coupling: &CouplingMap, qubit: usize) -> Vec<usize> {
    if qubit >= t.n_logical {
        return Vec::new();
    }
    let p = t.initial_layout.physical(qubit);
    let mut out: Vec<usize> =
        coupling.neighbors(p).iter().map(|&n| t.initial_layout.logical(n)).filter(|&l| l < t.n_logical).collect();
    out.sort_unstable();
    out
}
