//! Per-configuration graph algorithms on the occupied bond DAG: reachability,
//! double connections, pivotal bonds, the events `E(b, x; C)` and the nested
//! event behind the expansion coefficients, and bond-disjoint occurrence
//! witnesses.
//!
//! Vertex sets are `u128` bit masks over vertex ids (time-major, so increasing
//! id is non-decreasing time); bond sets are `u64` masks over the global bond
//! enumeration.

use crate::error::{Error, Result};
use crate::model::{Bond, ModelSpec, Vertex};

pub const DEFAULT_PATH_BUDGET: usize = 100_000;

/// Precomputed bond structure shared across configurations.
pub struct BondTable {
    pub spec: ModelSpec,
    pub bonds: Vec<Bond>,
    /// Outgoing bond indices per vertex id.
    pub out: Vec<Vec<u32>>,
    pub n_vertices: usize,
}

impl BondTable {
    pub fn new(spec: &ModelSpec) -> Self {
        let bonds = crate::model::enumerate_bonds(spec);
        let n_vertices = spec.vertex_count();
        assert!(n_vertices <= 128, "vertex set exceeds the 128-bit reachability mask");
        let mut out = vec![Vec::new(); n_vertices];
        for b in &bonds {
            out[spec.vertex_id(b.tail)].push(b.index as u32);
        }
        BondTable { spec: spec.clone(), bonds, out, n_vertices }
    }

    pub fn vertex_id(&self, v: Vertex) -> usize {
        self.spec.vertex_id(v)
    }
}

/// One configuration under evaluation: bond structure plus occupation mask.
#[derive(Clone, Copy)]
pub struct Ctx<'a> {
    pub table: &'a BondTable,
    pub occupied: u64,
}

/// A primitive connection event for disjoint-occurrence checks: a chain of
/// vertices and mandatory bonds, e.g. `{b' -> u -> b -> x}`. Each `Through`
/// bond must itself be occupied and counts toward the witness bond set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    At(Vertex),
    Through(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionEvent {
    pub steps: Vec<Step>,
}

impl ConnectionEvent {
    pub fn connect(from: Vertex, to: Vertex) -> Self {
        ConnectionEvent { steps: vec![Step::At(from), Step::At(to)] }
    }

    pub fn via(from: Vertex, mid: Vertex, to: Vertex) -> Self {
        ConnectionEvent { steps: vec![Step::At(from), Step::At(mid), Step::At(to)] }
    }
}

impl<'a> Ctx<'a> {
    pub fn new(table: &'a BondTable, occupied: u64) -> Self {
        Ctx { table, occupied }
    }

    pub fn is_occupied(&self, bond: usize) -> bool {
        self.occupied >> bond & 1 == 1
    }

    /// Forward-reachable vertex set from `v` along occupied bonds, optionally
    /// excluding one bond. `v` itself is always included.
    pub fn reachable(&self, v: usize, forbidden: Option<usize>) -> u128 {
        let mut seen: u128 = 1 << v;
        // Vertex ids are time-major, so a single increasing sweep settles the DAG.
        for id in v..self.table.n_vertices {
            if seen >> id & 1 == 0 {
                continue;
            }
            for &bi in &self.table.out[id] {
                let bi = bi as usize;
                if !self.is_occupied(bi) || forbidden == Some(bi) {
                    continue;
                }
                seen |= 1 << self.table.spec.vertex_id(self.table.bonds[bi].head);
            }
        }
        seen
    }

    /// Maximum number of bond-disjoint occupied paths from v to x, capped at
    /// `limit` (Menger: equals the unit-capacity max-flow value).
    pub fn bond_disjoint_path_count(&self, v: usize, x: usize, limit: usize) -> usize {
        if v == x {
            return limit;
        }
        let nb = self.table.bonds.len();
        let mut used = vec![false; nb]; // bond carries flow tail->head
        let mut flow = 0;
        while flow < limit {
            // DFS for an augmenting path in the residual graph.
            let mut parent: Vec<Option<(usize, bool)>> = vec![None; self.table.n_vertices];
            let mut visited = vec![false; self.table.n_vertices];
            let mut stack = vec![v];
            visited[v] = true;
            while let Some(id) = stack.pop() {
                if id == x {
                    break;
                }
                for &bi in &self.table.out[id] {
                    let bi = bi as usize;
                    if !self.is_occupied(bi) || used[bi] {
                        continue;
                    }
                    let head = self.table.spec.vertex_id(self.table.bonds[bi].head);
                    if !visited[head] {
                        visited[head] = true;
                        parent[head] = Some((bi, true));
                        stack.push(head);
                    }
                }
                // Residual back edges: a bond with flow can be cancelled from
                // its head back to its tail.
                for (bi, b) in self.table.bonds.iter().enumerate() {
                    if used[bi] && self.table.spec.vertex_id(b.head) == id {
                        let tail = self.table.spec.vertex_id(b.tail);
                        if !visited[tail] {
                            visited[tail] = true;
                            parent[tail] = Some((bi, false));
                            stack.push(tail);
                        }
                    }
                }
            }
            if !visited[x] {
                break;
            }
            let mut id = x;
            while id != v {
                let (bi, fwd) = parent[id].unwrap();
                used[bi] = fwd;
                id = if fwd {
                    self.table.spec.vertex_id(self.table.bonds[bi].tail)
                } else {
                    self.table.spec.vertex_id(self.table.bonds[bi].head)
                };
            }
            flow += 1;
        }
        flow
    }

    /// Double connection v => x: two bond-disjoint occupied paths, true by
    /// convention at v = x.
    pub fn double_connected(&self, v: usize, x: usize) -> bool {
        if v == x {
            return true;
        }
        if self.reachable(v, None) >> x & 1 == 0 {
            return false;
        }
        self.bond_disjoint_path_count(v, x, 2) >= 2
    }

    /// Occupied bonds whose removal destroys the realized connection v -> x,
    /// in time order. Empty when the connection does not hold or v = x.
    pub fn pivotal_bonds(&self, v: usize, x: usize) -> Vec<usize> {
        if v == x || self.reachable(v, None) >> x & 1 == 0 {
            return Vec::new();
        }
        let mut piv = Vec::new();
        for bi in 0..self.table.bonds.len() {
            if self.is_occupied(bi) && self.reachable(v, Some(bi)) >> x & 1 == 0 {
                piv.push(bi);
            }
        }
        // Bond indices are lexicographic by (time, site, offset), so index
        // order is time order.
        piv
    }

    /// E(b, x; C): b occupied, head(b) -> x, x in C, and no pivotal bond b'
    /// of {head(b) -> x} has its tail in C.
    pub fn event_e(&self, bond: usize, x: usize, c: u128) -> bool {
        if !self.is_occupied(bond) || c >> x & 1 == 0 {
            return false;
        }
        let head = self.table.spec.vertex_id(self.table.bonds[bond].head);
        if self.reachable(head, None) >> x & 1 == 0 {
            return false;
        }
        for piv in self.pivotal_bonds(head, x) {
            let tail = self.table.spec.vertex_id(self.table.bonds[piv].tail);
            if c >> tail & 1 == 1 {
                return false;
            }
        }
        true
    }

    /// The nested event over an ordered bond sequence (b_1..b_N) terminating
    /// at x: {o => tail(b_1)} and, for each i, E(b_i, next tail; C-tilde).
    pub fn event_e_tilde(&self, bonds: &[usize], x: usize) -> bool {
        assert!(!bonds.is_empty());
        let o = self.table.spec.vertex_id(self.table.spec.origin());
        let first_tail = self.table.spec.vertex_id(self.table.bonds[bonds[0]].tail);
        if !self.double_connected(o, first_tail) {
            return false;
        }
        let mut prev_head = o;
        for (i, &b) in bonds.iter().enumerate() {
            let c = self.reachable(prev_head, Some(b));
            let target = if i + 1 < bonds.len() {
                self.table.spec.vertex_id(self.table.bonds[bonds[i + 1]].tail)
            } else {
                x
            };
            if !self.event_e(b, target, c) {
                return false;
            }
            prev_head = self.table.spec.vertex_id(self.table.bonds[b].head);
        }
        true
    }

    /// All directed occupied paths from `from` to `to`, as bond masks.
    /// Errors out when more than `budget` paths accumulate.
    pub fn enumerate_path_masks(&self, from: usize, to: usize, budget: usize) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        let mut stack: Vec<(usize, u64)> = vec![(from, 0)];
        while let Some((id, mask)) = stack.pop() {
            if id == to {
                out.push(mask);
                if out.len() > budget {
                    return Err(Error::PathBudgetExceeded { budget });
                }
                continue;
            }
            let tv = self.table.spec.vertex_of(id).t;
            if tv >= self.table.spec.vertex_of(to).t {
                continue;
            }
            for &bi in &self.table.out[id] {
                let bi = bi as usize;
                if self.is_occupied(bi) {
                    let head = self.table.spec.vertex_id(self.table.bonds[bi].head);
                    stack.push((head, mask | 1 << bi));
                }
            }
        }
        Ok(out)
    }

    /// Witness bond masks for one chain event, or None if the event fails.
    fn witness_masks(&self, ev: &ConnectionEvent, budget: usize) -> Result<Option<Vec<u64>>> {
        let mut masks: Vec<u64> = vec![0];
        let mut pos: Option<usize> = None;
        for step in &ev.steps {
            match step {
                Step::At(v) => {
                    let vid = self.table.vertex_id(*v);
                    if let Some(p) = pos {
                        let segs = self.enumerate_path_masks(p, vid, budget)?;
                        if segs.is_empty() {
                            return Ok(None);
                        }
                        masks = cross_union(&masks, &segs, budget)?;
                    }
                    pos = Some(vid);
                }
                Step::Through(b) => {
                    if !self.is_occupied(*b) {
                        return Ok(None);
                    }
                    let tail = self.table.spec.vertex_id(self.table.bonds[*b].tail);
                    let head = self.table.spec.vertex_id(self.table.bonds[*b].head);
                    if let Some(p) = pos {
                        let segs = self.enumerate_path_masks(p, tail, budget)?;
                        if segs.is_empty() {
                            return Ok(None);
                        }
                        masks = cross_union(&masks, &segs, budget)?;
                    }
                    for m in &mut masks {
                        *m |= 1 << *b;
                    }
                    pos = Some(head);
                }
            }
        }
        masks.sort_unstable();
        masks.dedup();
        Ok(Some(masks))
    }

    /// True iff all events hold with pairwise bond-disjoint witness bond sets
    /// (disjoint occurrence), decided by exhaustive combination.
    pub fn disjointly_connected(&self, events: &[ConnectionEvent], budget: usize) -> Result<bool> {
        assert!(events.len() <= 3, "only patterns of up to three events are supported");
        let mut all = Vec::with_capacity(events.len());
        for ev in events {
            match self.witness_masks(ev, budget)? {
                Some(masks) => all.push(masks),
                None => return Ok(false),
            }
        }
        // Fewest alternatives first keeps the combination search small.
        all.sort_by_key(|m| m.len());
        fn pick(all: &[Vec<u64>], level: usize, used: u64) -> bool {
            if level == all.len() {
                return true;
            }
            all[level].iter().any(|&m| m & used == 0 && pick(all, level + 1, used | m))
        }
        Ok(pick(&all, 0, 0))
    }
}

fn cross_union(a: &[u64], b: &[u64], budget: usize) -> Result<Vec<u64>> {
    if a.len().saturating_mul(b.len()) > budget {
        return Err(Error::PathBudgetExceeded { budget });
    }
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x | y);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
