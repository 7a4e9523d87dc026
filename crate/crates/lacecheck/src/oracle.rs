//! Ground-truth values on the finite model: the two-point function by wet-set
//! transfer, by exhaustive configuration enumeration, and by Monte Carlo; the
//! expansion coefficients by full enumeration over configurations and ordered
//! bond sequences.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connectivity::BondTable;
use crate::convolution::SpaceTimeFunction;
use crate::error::{Error, Result};
use crate::model::{ConfigEnumeration, Kahan, ModelSpec, DEFAULT_STATE_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Transfer,
    Enumeration,
    MonteCarlo,
}

/// The two-point function phi(v; x) as a function of the space-time difference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoPointTable {
    pub model_hash: String,
    pub method: Method,
    pub t_max: usize,
    /// values[dt * sites + dsite]
    pub values: Vec<f64>,
    /// Per-entry standard error, Monte Carlo only.
    pub stderr: Option<Vec<f64>>,
}

impl TwoPointTable {
    pub fn get(&self, spec: &ModelSpec, dsite: usize, dt: usize) -> f64 {
        self.values[dt * spec.sites() + dsite]
    }

    pub fn to_function(&self, spec: &ModelSpec) -> SpaceTimeFunction {
        SpaceTimeFunction {
            kernel: spec.kernel.clone(),
            t_max: self.t_max,
            vals: self.values.clone(),
            label: "phi".to_string(),
        }
    }
}

/// Lace-expansion coefficient table: values of pi^(N) or Pi^(N) per vertex x
/// (anchored at the origin).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub n: usize,
    pub model_hash: String,
    /// values[vertex_id(x)]
    pub values: Vec<f64>,
}

/// Exact two-point function by evolving the distribution of wet site sets one
/// time step at a time (the sites at t+1 are conditionally independent given
/// the wet set at t, so the step factorizes over sites).
pub fn two_point_transfer(spec: &ModelSpec, state_budget: usize) -> Result<TwoPointTable> {
    let s = spec.sites();
    if s > state_budget {
        return Err(Error::StateBudgetExceeded { sites: s, budget: state_budget });
    }
    let nstates = 1usize << s;
    let shifts: Vec<Vec<usize>> = spec
        .kernel
        .offsets
        .iter()
        .map(|(off, _)| (0..s).map(|site| spec.kernel.site_shift(site, off)).collect())
        .collect();
    let qs: Vec<f64> = spec.kernel.offsets.iter().map(|(_, w)| spec.p * w).collect();

    let mut values = vec![0.0f64; s * (spec.horizon + 1)];
    let mut cur = vec![0.0f64; nstates];
    cur[1] = 1.0; // single seed at the spatial origin
    values[0] = 1.0;

    let mut dry = vec![1.0f64; s];
    for t in 1..=spec.horizon {
        let mut next = vec![0.0f64; nstates];
        for a in 0..nstates {
            let pa = cur[a];
            if pa == 0.0 {
                continue;
            }
            for d in dry.iter_mut() {
                *d = 1.0;
            }
            for x in 0..s {
                if a >> x & 1 == 1 {
                    for (oi, q) in qs.iter().enumerate() {
                        dry[shifts[oi][x]] *= 1.0 - q;
                    }
                }
            }
            distribute(&mut next, &dry, pa, 0, 0);
        }
        cur = next;
        // Marginals: phi(x, t) = total weight of states containing site x.
        for x in 0..s {
            let mut acc = Kahan::default();
            for (a, &pa) in cur.iter().enumerate() {
                if a >> x & 1 == 1 {
                    acc.add(pa);
                }
            }
            values[t * s + x] = acc.value();
        }
    }

    Ok(TwoPointTable {
        model_hash: spec.hash(),
        method: Method::Transfer,
        t_max: spec.horizon,
        values,
        stderr: None,
    })
}

/// Spread `weight` over all wet-set outcomes, branching only on sites whose
/// wet probability is strictly between 0 and 1.
fn distribute(next: &mut [f64], dry: &[f64], weight: f64, site: usize, mask: usize) {
    if site == dry.len() {
        next[mask] += weight;
        return;
    }
    let d = dry[site];
    if d == 1.0 {
        distribute(next, dry, weight, site + 1, mask);
    } else if d == 0.0 {
        distribute(next, dry, weight, site + 1, mask | 1 << site);
    } else {
        distribute(next, dry, weight * d, site + 1, mask);
        distribute(next, dry, weight * (1.0 - d), site + 1, mask | 1 << site);
    }
}

/// Exact two-point function by summing config weights over all 2^B bond
/// configurations; the naive cross-check for the transfer method.
pub fn two_point_enumeration(spec: &ModelSpec, bond_budget: usize) -> Result<TwoPointTable> {
    let en = ConfigEnumeration::new(spec, bond_budget)?;
    let s = spec.sites();
    let t_max = spec.horizon;
    // Per-bond (tail site, head site, layer) for the forward sweep.
    let bonds = en.bonds();
    let probs = en.bond_probs();
    let mut acc = vec![Kahan::default(); s * (t_max + 1)];
    let mut wet = vec![0u64; t_max + 1];
    for mask in 0..en.count() {
        let mut w = 1.0f64;
        for (i, q) in probs.iter().enumerate() {
            w *= if mask >> i & 1 == 1 { *q } else { 1.0 - *q };
        }
        if w == 0.0 {
            continue;
        }
        for layer in wet.iter_mut() {
            *layer = 0;
        }
        wet[0] = 1;
        for (i, b) in bonds.iter().enumerate() {
            if mask >> i & 1 == 1 && wet[b.tail.t] >> b.tail.site & 1 == 1 {
                wet[b.head.t] |= 1 << b.head.site;
            }
        }
        for t in 0..=t_max {
            let mut layer = wet[t];
            while layer != 0 {
                let site = layer.trailing_zeros() as usize;
                acc[t * s + site].add(w);
                layer &= layer - 1;
            }
        }
    }
    Ok(TwoPointTable {
        model_hash: spec.hash(),
        method: Method::Enumeration,
        t_max,
        values: acc.iter().map(|k| k.value()).collect(),
        stderr: None,
    })
}

/// Plain Monte Carlo estimator of the two-point function with per-entry
/// standard errors. Reproducible: sample chunk `c` uses a ChaCha stream
/// seeded with `seed ^ (c * 0x9E3779B97F4A7C15)`, independent of scheduling.
pub fn two_point_mc(spec: &ModelSpec, samples: u64, seed: u64) -> TwoPointTable {
    assert!(samples >= 1);
    let s = spec.sites();
    assert!(s <= 64, "Monte Carlo wet front uses a 64-bit site mask");
    let t_max = spec.horizon;
    let shifts: Vec<Vec<usize>> = spec
        .kernel
        .offsets
        .iter()
        .map(|(off, _)| (0..s).map(|site| spec.kernel.site_shift(site, off)).collect())
        .collect();
    let qs: Vec<f64> = spec.kernel.offsets.iter().map(|(_, w)| spec.p * w).collect();

    const CHUNK: u64 = 4096;
    let mut counts = vec![0u64; s * (t_max + 1)];
    let mut chunk_start = 0u64;
    let mut chunk_index = 0u64;
    while chunk_start < samples {
        let n = CHUNK.min(samples - chunk_start);
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ chunk_index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for _ in 0..n {
            let mut wet: u64 = 1;
            counts[0] += 1;
            for t in 1..=t_max {
                let mut next: u64 = 0;
                let mut layer = wet;
                while layer != 0 {
                    let x = layer.trailing_zeros() as usize;
                    layer &= layer - 1;
                    for (oi, q) in qs.iter().enumerate() {
                        if rng.gen::<f64>() < *q {
                            next |= 1 << shifts[oi][x];
                        }
                    }
                }
                wet = next;
                let mut l2 = wet;
                while l2 != 0 {
                    let site = l2.trailing_zeros() as usize;
                    counts[t * s + site] += 1;
                    l2 &= l2 - 1;
                }
            }
        }
        chunk_start += n;
        chunk_index += 1;
    }

    let nf = samples as f64;
    let values: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let stderr: Vec<f64> = values.iter().map(|&p| (p * (1.0 - p) / nf).sqrt()).collect();
    TwoPointTable {
        model_hash: spec.hash(),
        method: Method::MonteCarlo,
        t_max,
        values,
        stderr: Some(stderr),
    }
}

/// Per-configuration scan state: reachability from every vertex, with and
/// without each single bond. Rebuilt per configuration, reusing buffers.
pub(crate) struct Scan<'a> {
    pub(crate) table: &'a BondTable,
    mask: u64,
    pub(crate) occupied: Vec<usize>,
    /// reach[v]: forward reachable set from v.
    pub(crate) reach: Vec<u128>,
    /// reach_wo[b * V + v]: reachable from v avoiding bond b.
    reach_wo: Vec<u128>,
}

impl<'a> Scan<'a> {
    pub(crate) fn new(table: &'a BondTable) -> Self {
        let v = table.n_vertices;
        let b = table.bonds.len();
        Scan { table, mask: 0, occupied: Vec::with_capacity(b), reach: vec![0; v], reach_wo: vec![0; b * v] }
    }

    fn bfs(&self, start: usize, forbidden: Option<usize>) -> u128 {
        let mut seen: u128 = 1 << start;
        for id in start..self.table.n_vertices {
            if seen >> id & 1 == 0 {
                continue;
            }
            for &bi in &self.table.out[id] {
                let bi = bi as usize;
                if self.mask >> bi & 1 == 0 || forbidden == Some(bi) {
                    continue;
                }
                seen |= 1 << self.table.spec.vertex_id(self.table.bonds[bi].head);
            }
        }
        seen
    }

    /// Full rebuild: reachability from every vertex, with and without each bond.
    pub(crate) fn load_full(&mut self, mask: u64) {
        self.load_sources(mask, None);
    }

    /// Rebuild restricted to the listed source vertices (others left stale).
    fn load_sources(&mut self, mask: u64, sources: Option<&[usize]>) {
        self.mask = mask;
        self.occupied.clear();
        for bi in 0..self.table.bonds.len() {
            if mask >> bi & 1 == 1 {
                self.occupied.push(bi);
            }
        }
        let v = self.table.n_vertices;
        let srcs: Vec<usize> = match sources {
            Some(s) => s.to_vec(),
            None => (0..v).collect(),
        };
        for &src in &srcs {
            self.reach[src] = self.bfs(src, None);
            for bi in 0..self.table.bonds.len() {
                self.reach_wo[bi * v + src] = if mask >> bi & 1 == 1 {
                    self.bfs(src, Some(bi))
                } else {
                    self.reach[src]
                };
            }
        }
    }

    /// Double connection via Menger: no single occupied bond is pivotal.
    pub(crate) fn double_connected(&self, v: usize, x: usize) -> bool {
        if v == x {
            return true;
        }
        if self.reach[v] >> x & 1 == 0 {
            return false;
        }
        let nv = self.table.n_vertices;
        self.occupied.iter().all(|&b| self.reach_wo[b * nv + v] >> x & 1 == 1)
    }

    /// Count of pivotal bonds for the realized connection v -> x.
    pub(crate) fn pivotal_count(&self, v: usize, x: usize) -> usize {
        if v == x || self.reach[v] >> x & 1 == 0 {
            return 0;
        }
        let nv = self.table.n_vertices;
        self.occupied.iter().filter(|&&b| self.reach_wo[b * nv + v] >> x & 1 == 0).count()
    }

    /// Is occupied bond b pivotal for the realized connection v -> x?
    pub(crate) fn is_pivotal(&self, b: usize, v: usize, x: usize) -> bool {
        if v == x || self.mask >> b & 1 == 0 {
            return false;
        }
        let nv = self.table.n_vertices;
        self.reach[v] >> x & 1 == 1 && self.reach_wo[b * nv + v] >> x & 1 == 0
    }

    /// E(b, x; C-tilde^b(y)) using the precomputed reachability tables.
    pub(crate) fn event_e(&self, b: usize, x: usize, c: u128) -> bool {
        if self.mask >> b & 1 == 0 || c >> x & 1 == 0 {
            return false;
        }
        let nv = self.table.n_vertices;
        let head = self.table.spec.vertex_id(self.table.bonds[b].head);
        if self.reach[head] >> x & 1 == 0 {
            return false;
        }
        if head != x {
            for &bp in &self.occupied {
                if self.reach_wo[bp * nv + head] >> x & 1 == 0 {
                    // bp is pivotal for head -> x.
                    let tail = self.table.spec.vertex_id(self.table.bonds[bp].tail);
                    if c >> tail & 1 == 1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub(crate) fn c_tilde(&self, b: usize, y: usize) -> u128 {
        self.reach_wo[b * self.table.n_vertices + y]
    }
}

/// pi^(N): N = 0 is the double-connection probability; N >= 1 sums the nested
/// event indicator over all ordered N-tuples of bonds.
pub fn pi_oracle(spec: &ModelSpec, n: usize, bond_budget: usize) -> Result<CoefficientTable> {
    let tables = coefficient_scan(spec, n, bond_budget, false)?;
    Ok(tables.pi)
}

/// Pi^(N) together with its decomposition: for each fixed j,
/// `fixed_j = pi^(N) + extra_j` where `extra_j` sums the events with an extra
/// bond pivotal between head(b_j) and the next tail; the total is the sum of
/// the fixed-j contributions.
#[derive(Debug, Clone)]
pub struct PiSplit {
    pub n: usize,
    pub pi: CoefficientTable,
    pub total: CoefficientTable,
    pub fixed_j: Vec<Vec<f64>>,
    pub extra_j: Vec<Vec<f64>>,
}

pub fn pi_with_pivotal_split(spec: &ModelSpec, n: usize, bond_budget: usize) -> Result<PiSplit> {
    if n < 1 {
        return Err(Error::InvalidArgument("Pi^(N) needs N >= 1".into()));
    }
    coefficient_scan(spec, n, bond_budget, true)
}

fn coefficient_scan(spec: &ModelSpec, n: usize, bond_budget: usize, split: bool) -> Result<PiSplit> {
    if split && n > 8 {
        return Err(Error::InvalidArgument("pivotal split supports N <= 8".into()));
    }
    let en = ConfigEnumeration::new(spec, bond_budget)?;
    let table = BondTable::new(spec);
    let nv = table.n_vertices;
    let o = spec.vertex_id(spec.origin());
    let mut scan = Scan::new(&table);

    let mut pi = vec![0.0f64; nv];
    let mut fixed_j = vec![vec![0.0f64; nv]; if split { n } else { 0 }];
    let mut extra_j = vec![vec![0.0f64; nv]; if split { n } else { 0 }];

    let mut chosen = vec![0usize; n.max(1)];
    for mask in 0..en.count() {
        let w = en.weight_of(mask);
        if w == 0.0 {
            continue;
        }
        if n == 0 {
            scan.load_sources(mask, Some(&[o]));
            for x in 0..nv {
                if scan.double_connected(o, x) {
                    pi[x] += w;
                }
            }
            continue;
        }
        scan.load_full(mask);
        tuple_scan(&scan, spec, o, n, w, &mut chosen, 0, &mut pi, &mut fixed_j, &mut extra_j);
    }

    let hash = spec.hash();
    let total_vals: Vec<f64> = if split {
        (0..nv).map(|x| fixed_j.iter().map(|f| f[x]).sum()).collect()
    } else {
        vec![0.0; nv]
    };
    Ok(PiSplit {
        n,
        pi: CoefficientTable { n, model_hash: hash.clone(), values: pi },
        total: CoefficientTable { n, model_hash: hash, values: total_vals },
        fixed_j,
        extra_j,
    })
}

/// Depth-first choice of the ordered bond tuple. At depth i the bonds
/// b_1..b_i are fixed and all events up to E(b_{i-1}, tail(b_i); ...) hold.
#[allow(clippy::too_many_arguments)]
fn tuple_scan(
    scan: &Scan,
    spec: &ModelSpec,
    o: usize,
    n: usize,
    w: f64,
    chosen: &mut Vec<usize>,
    depth: usize,
    pi: &mut [f64],
    fixed_j: &mut [Vec<f64>],
    extra_j: &mut [Vec<f64>],
) {
    if depth == n {
        // Terminal stage: for each x test E(b_N, x; C-tilde^{b_N}(prev head)).
        let b_n = chosen[n - 1];
        let prev = if n >= 2 {
            spec.vertex_id(scan.table.bonds[chosen[n - 2]].head)
        } else {
            o
        };
        let c = scan.c_tilde(b_n, prev);
        let split = !fixed_j.is_empty();
        // Pivotal-extra counts for the interior stages j < N are fixed by the
        // tuple; only j = N depends on x.
        let mut interior = [0usize; 8];
        if split {
            for j in 0..n - 1 {
                let head_j = spec.vertex_id(scan.table.bonds[chosen[j]].head);
                let target_j = spec.vertex_id(scan.table.bonds[chosen[j + 1]].tail);
                interior[j] = scan.pivotal_count(head_j, target_j);
            }
        }
        let head_n = spec.vertex_id(scan.table.bonds[b_n].head);
        for x in 0..scan.table.n_vertices {
            if !scan.event_e(b_n, x, c) {
                continue;
            }
            pi[x] += w;
            if split {
                for j in 0..n - 1 {
                    fixed_j[j][x] += w * (1 + interior[j]) as f64;
                    extra_j[j][x] += w * interior[j] as f64;
                }
                let e = scan.pivotal_count(head_n, x);
                fixed_j[n - 1][x] += w * (1 + e) as f64;
                extra_j[n - 1][x] += w * e as f64;
            }
        }
        return;
    }
    for &b in &scan.occupied {
        let tail = spec.vertex_id(scan.table.bonds[b].tail);
        if depth == 0 {
            if !scan.double_connected(o, tail) {
                continue;
            }
        } else {
            let b_prev = chosen[depth - 1];
            // Times must advance stage over stage.
            if scan.table.bonds[b].tail.t <= scan.table.bonds[b_prev].tail.t {
                continue;
            }
            let y = if depth >= 2 {
                spec.vertex_id(scan.table.bonds[chosen[depth - 2]].head)
            } else {
                o
            };
            if !scan.event_e(b_prev, tail, scan.c_tilde(b_prev, y)) {
                continue;
            }
        }
        chosen[depth] = b;
        tuple_scan(scan, spec, o, n, w, chosen, depth + 1, pi, fixed_j, extra_j);
    }
}

/// Exact pi^(0) and pi^(N) values depend only on bonds strictly below the
/// target time, so tables computed at a smaller horizon agree row-for-row.
pub fn default_state_budget() -> usize {
    DEFAULT_STATE_BUDGET
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelSpec, StepKernel, Vertex, DEFAULT_BOND_BUDGET};

    fn m0() -> ModelSpec {
        ModelSpec::new(StepKernel::nearest_neighbor(1, 4).unwrap(), 3, 0.5, 1.0).unwrap()
    }

    fn w4t2(p: f64) -> ModelSpec {
        ModelSpec::new(StepKernel::nearest_neighbor(1, 4).unwrap(), 2, p, 1.0).unwrap()
    }

    #[test]
    fn transfer_reference_values() {
        let t = two_point_transfer(&m0(), DEFAULT_STATE_BUDGET).unwrap();
        let spec = m0();
        assert_eq!(t.get(&spec, 0, 0), 1.0);
        assert!((t.get(&spec, 1, 1) - 0.25).abs() < 1e-15);
        assert!((t.get(&spec, 0, 2) - 31.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn enumeration_matches_transfer() {
        let spec = w4t2(0.5);
        let a = two_point_transfer(&spec, DEFAULT_STATE_BUDGET).unwrap();
        let b = two_point_enumeration(&spec, DEFAULT_BOND_BUDGET).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn p_zero_is_delta() {
        let spec = ModelSpec::new(StepKernel::nearest_neighbor(1, 4).unwrap(), 2, 0.0, 1.0).unwrap();
        for table in [
            two_point_transfer(&spec, DEFAULT_STATE_BUDGET).unwrap(),
            two_point_enumeration(&spec, DEFAULT_BOND_BUDGET).unwrap(),
            two_point_mc(&spec, 100, 7),
        ] {
            for (i, &v) in table.values.iter().enumerate() {
                assert_eq!(v, if i == 0 { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn deterministic_growth_at_q_one() {
        // p = 1/max(D) makes every bond probability one.
        let spec = ModelSpec::new(StepKernel::nearest_neighbor(1, 4).unwrap(), 2, 2.0, 1.0).unwrap();
        let t = two_point_transfer(&spec, DEFAULT_STATE_BUDGET).unwrap();
        // After two steps every site at even distance is hit with probability 1.
        assert_eq!(t.get(&spec, 1, 1), 1.0);
        assert_eq!(t.get(&spec, 3, 1), 1.0);
        assert_eq!(t.get(&spec, 0, 2), 1.0);
        assert_eq!(t.get(&spec, 2, 2), 1.0);
    }

    #[test]
    fn mc_is_reproducible_and_consistent() {
        let spec = m0();
        let a = two_point_mc(&spec, 20_000, 42);
        let b = two_point_mc(&spec, 20_000, 42);
        assert_eq!(a.values, b.values);
        let exact = two_point_transfer(&spec, DEFAULT_STATE_BUDGET).unwrap();
        let stderr = a.stderr.as_ref().unwrap();
        for i in 0..a.values.len() {
            let err = (a.values[i] - exact.values[i]).abs();
            assert!(err <= 4.0 * stderr[i] + 1e-12, "entry {i}: err {err} stderr {}", stderr[i]);
        }
    }

    #[test]
    fn monotone_in_p() {
        let grid = [0.2, 0.5, 0.8];
        let mut prev: Option<Vec<f64>> = None;
        for &p in &grid {
            let t = two_point_transfer(&w4t2(p), DEFAULT_STATE_BUDGET).unwrap();
            if let Some(prev) = &prev {
                for (lo, hi) in prev.iter().zip(&t.values) {
                    assert!(hi >= lo);
                }
            }
            prev = Some(t.values);
        }
    }

    #[test]
    fn pi0_reference_values() {
        let spec = w4t2(0.5);
        let t = pi_oracle(&spec, 0, DEFAULT_BOND_BUDGET).unwrap();
        let id = |site, tt| spec.vertex_id(Vertex { site, t: tt });
        // delta term at the origin.
        assert_eq!(t.values[id(0, 0)], 1.0);
        // Only one bond into (1,1) from o, so never doubly connected.
        assert_eq!(t.values[id(1, 1)], 0.0);
        assert_eq!(t.values[id(3, 1)], 0.0);
        // Both disjoint length-2 paths open: q^4.
        assert!((t.values[id(0, 2)] - 1.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn pi_zero_when_time_below_n() {
        let spec = ModelSpec::new(StepKernel::nearest_neighbor(1, 3).unwrap(), 2, 0.6, 1.0).unwrap();
        for n in 1..=2 {
            let t = pi_oracle(&spec, n, DEFAULT_BOND_BUDGET).unwrap();
            assert!(t.values.iter().all(|&v| v >= 0.0));
            for x in 0..spec.vertex_count() {
                if spec.vertex_of(x).t < n {
                    assert_eq!(t.values[x], 0.0, "x = {:?}", spec.vertex_of(x));
                }
            }
        }
    }

    #[test]
    fn pi_split_identity() {
        let spec = ModelSpec::new(StepKernel::nearest_neighbor(1, 3).unwrap(), 2, 0.6, 1.0).unwrap();
        for n in 1..=2 {
            let s = pi_with_pivotal_split(&spec, n, DEFAULT_BOND_BUDGET).unwrap();
            for j in 0..n {
                for x in 0..spec.vertex_count() {
                    let lhs = s.fixed_j[j][x];
                    let rhs = s.pi.values[x] + s.extra_j[j][x];
                    assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
                }
            }
            for x in 0..spec.vertex_count() {
                let total: f64 = (0..n).map(|j| s.fixed_j[j][x]).sum();
                assert_eq!(s.total.values[x], total);
            }
        }
    }

    #[test]
    fn pi_oracle_p_zero() {
        let spec = ModelSpec::new(StepKernel::nearest_neighbor(1, 3).unwrap(), 2, 0.0, 1.0).unwrap();
        let t = pi_oracle(&spec, 1, DEFAULT_BOND_BUDGET).unwrap();
        assert!(t.values.iter().all(|&v| v == 0.0));
        let s = pi_with_pivotal_split(&spec, 1, DEFAULT_BOND_BUDGET).unwrap();
        assert!(s.total.values.iter().all(|&v| v == 0.0));
    }
}
