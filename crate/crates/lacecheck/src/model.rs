//! Finite oriented-percolation model: a spatial torus `Z_W^d` crossed with
//! discrete time `{0..T}`, a step kernel `D`, and exact enumeration of bond
//! configurations.
//!
//! Bonds point one step forward in time. The bond from `v` to `x` (with
//! `tau_x = tau_v + 1`) is occupied independently with probability
//! `q = p * D(sigma_x - sigma_v)`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Default cap on the number of bonds for exact enumeration (2^26 configs).
pub const DEFAULT_BOND_BUDGET: usize = 26;

/// Default cap on the number of spatial sites for the wet-set transfer method.
pub const DEFAULT_STATE_BUDGET: usize = 20;

/// A space-time lattice point. `site` indexes the spatial torus in base-W
/// digits, `t` is the time coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub site: usize,
    pub t: usize,
}

/// A directed bond; `head.t == tail.t + 1` always holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub index: usize,
    pub tail: Vertex,
    pub head: Vertex,
    /// Step-kernel weight D of the spatial offset; occupation probability is
    /// `p * d_weight`.
    pub d_weight: f64,
}

/// Spatial step distribution on the torus.
///
/// Offsets are stored with their weights; the zero offset is excluded and the
/// weights sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepKernel {
    pub dim: usize,
    pub width: usize,
    /// Sorted list of (offset components, weight).
    pub offsets: Vec<(Vec<i64>, f64)>,
    /// Human-readable tag for hashing and reports ("nn", "spread-out L=2", ...).
    pub name: String,
}

impl StepKernel {
    pub fn new(dim: usize, width: usize, mut offsets: Vec<(Vec<i64>, f64)>, name: &str) -> Result<Self> {
        if width < 3 {
            return Err(Error::InvalidModel(format!("torus width {width} < 3")));
        }
        if dim == 0 {
            return Err(Error::InvalidModel("dimension must be >= 1".into()));
        }
        offsets.sort_by(|a, b| a.0.cmp(&b.0));
        let kernel = StepKernel { dim, width, offsets, name: name.to_string() };
        kernel.validate()?;
        Ok(kernel)
    }

    /// Uniform distribution on the 2d unit offsets.
    pub fn nearest_neighbor(dim: usize, width: usize) -> Result<Self> {
        let mut offsets = Vec::new();
        let w = 1.0 / (2 * dim) as f64;
        for axis in 0..dim {
            for sign in [-1i64, 1i64] {
                let mut off = vec![0i64; dim];
                off[axis] = sign;
                offsets.push((off, w));
            }
        }
        Self::new(dim, width, offsets, "nn")
    }

    /// Uniform distribution on the box [-L, L]^d minus the origin.
    pub fn spread_out(dim: usize, width: usize, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidModel("spread-out range L must be >= 1".into()));
        }
        let side = 2 * l + 1;
        let count = side.pow(dim as u32) - 1;
        let w = 1.0 / count as f64;
        let mut offsets = Vec::new();
        let mut idx = vec![0usize; dim];
        loop {
            let off: Vec<i64> = idx.iter().map(|&c| c as i64 - l as i64).collect();
            if off.iter().any(|&c| c != 0) {
                offsets.push((off.clone(), w));
            }
            let mut axis = 0;
            loop {
                idx[axis] += 1;
                if idx[axis] < side {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
                if axis == dim {
                    return Self::new(dim, width, offsets, &format!("spread-out L={l}"));
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let mut sum = 0.0;
        for (off, w) in &self.offsets {
            if off.len() != self.dim {
                return Err(Error::InvalidModel("offset dimension mismatch".into()));
            }
            if *w < 0.0 {
                return Err(Error::InvalidModel("negative kernel weight".into()));
            }
            if off.iter().all(|&c| c == 0) {
                return Err(Error::InvalidModel("kernel must have D(0) = 0".into()));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("kernel weights sum to {sum}, not 1")));
        }
        // Distinct offsets must stay distinct after reduction mod W, otherwise
        // two bonds would join the same vertex pair.
        let mut sites: Vec<usize> = self.offsets.iter().map(|(off, _)| self.offset_site(off)).collect();
        sites.sort_unstable();
        sites.dedup();
        if sites.len() != self.offsets.len() {
            return Err(Error::InvalidModel("kernel offsets collide on the torus".into()));
        }
        // Symmetry under negation; reflection sanity checks rely on this.
        for (off, w) in &self.offsets {
            let neg: Vec<i64> = off.iter().map(|&c| -c).collect();
            let neg_site = self.offset_site(&neg);
            let found = self
                .offsets
                .iter()
                .find(|(o, _)| self.offset_site(o) == neg_site)
                .map(|(_, w2)| *w2);
            if found != Some(*w) {
                return Err(Error::InvalidModel("kernel not symmetric under negation".into()));
            }
        }
        Ok(())
    }

    pub fn max_weight(&self) -> f64 {
        self.offsets.iter().map(|(_, w)| *w).fold(0.0, f64::max)
    }

    /// Number of spatial sites W^d.
    pub fn sites(&self) -> usize {
        self.width.pow(self.dim as u32)
    }

    /// Torus coordinates of a site index (base-W digits).
    pub fn coords(&self, site: usize) -> Vec<usize> {
        let mut c = Vec::with_capacity(self.dim);
        let mut s = site;
        for _ in 0..self.dim {
            c.push(s % self.width);
            s /= self.width;
        }
        c
    }

    pub fn site_index(&self, coords: &[usize]) -> usize {
        let mut s = 0usize;
        for &c in coords.iter().rev() {
            s = s * self.width + (c % self.width);
        }
        s
    }

    /// Reduce an integer offset vector to a site index mod W.
    pub fn offset_site(&self, off: &[i64]) -> usize {
        let w = self.width as i64;
        let coords: Vec<usize> = off.iter().map(|&c| (c.rem_euclid(w)) as usize).collect();
        self.site_index(&coords)
    }

    /// Shift a site by an offset (torus addition per component).
    pub fn site_shift(&self, site: usize, off: &[i64]) -> usize {
        let w = self.width as i64;
        let mut s = site;
        let mut out = 0usize;
        let mut mul = 1usize;
        for &o in off {
            let c = (s % self.width) as i64;
            let c2 = (c + o).rem_euclid(w) as usize;
            out += c2 * mul;
            mul *= self.width;
            s /= self.width;
        }
        out
    }

    /// Componentwise (a - b) mod W as a site index.
    pub fn site_diff(&self, a: usize, b: usize) -> usize {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let coords: Vec<usize> = ca
            .iter()
            .zip(&cb)
            .map(|(&x, &y)| (x + self.width - y) % self.width)
            .collect();
        self.site_index(&coords)
    }

    /// Componentwise (a + b) mod W as a site index.
    pub fn site_add(&self, a: usize, b: usize) -> usize {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let coords: Vec<usize> = ca.iter().zip(&cb).map(|(&x, &y)| (x + y) % self.width).collect();
        self.site_index(&coords)
    }

    /// D as a function of the spatial difference site.
    pub fn weight_at_site(&self, diff_site: usize) -> f64 {
        for (off, w) in &self.offsets {
            if self.offset_site(off) == diff_site {
                return *w;
            }
        }
        0.0
    }
}

/// The full model: geometry, step kernel, occupation intensity p and the time
/// weight m used by the weighted diagrams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kernel: StepKernel,
    /// Time horizon T; vertices live at times 0..=T, bonds at tails 0..T-1... 0..T.
    pub horizon: usize,
    pub p: f64,
    pub m: f64,
}

impl ModelSpec {
    pub fn new(kernel: StepKernel, horizon: usize, p: f64, m: f64) -> Result<Self> {
        let spec = ModelSpec { kernel, horizon, p, m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::InvalidModel("horizon T must be >= 1".into()));
        }
        if self.p < 0.0 {
            return Err(Error::InvalidModel("p must be >= 0".into()));
        }
        if self.p * self.kernel.max_weight() > 1.0 + 1e-12 {
            return Err(Error::InvalidModel(format!(
                "bond probability p*max(D) = {} exceeds 1",
                self.p * self.kernel.max_weight()
            )));
        }
        if !(self.m > 0.0) {
            return Err(Error::InvalidModel("m must be > 0".into()));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.kernel.sites()
    }

    /// Number of lattice vertices, sites * (T+1).
    pub fn vertex_count(&self) -> usize {
        self.sites() * (self.horizon + 1)
    }

    pub fn vertex_id(&self, v: Vertex) -> usize {
        v.t * self.sites() + v.site
    }

    pub fn vertex_of(&self, id: usize) -> Vertex {
        Vertex { site: id % self.sites(), t: id / self.sites() }
    }

    pub fn origin(&self) -> Vertex {
        Vertex { site: 0, t: 0 }
    }

    /// Bond occupation probability between two vertices; zero unless the times
    /// are adjacent and the spatial offset is in the kernel support.
    pub fn q_value(&self, from: Vertex, to: Vertex) -> f64 {
        if to.t != from.t + 1 {
            return 0.0;
        }
        let diff = self.kernel.site_diff(to.site, from.site);
        self.p * self.kernel.weight_at_site(diff)
    }

    pub fn bond_count(&self) -> usize {
        self.sites() * self.kernel.offsets.len() * self.horizon
    }

    /// Stable digest of all model fields, used to key caches.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"lacecheck-model-v1;");
        h.update(format!("d={};W={};T={};", self.kernel.dim, self.kernel.width, self.horizon));
        h.update(format!("kernel={};", self.kernel.name));
        for (off, w) in &self.kernel.offsets {
            h.update(format!("off={:?}:{:016x};", off, w.to_bits()));
        }
        h.update(format!("p={:016x};m={:016x};", self.p.to_bits(), self.m.to_bits()));
        hex::encode(&h.finalize()[..16])
    }

    /// Parse the plain-text config format (`key = value` lines, `#` comments).
    /// Keys: d, W, T, kernel (nn | spread-out), L, p, m.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut d = 1usize;
        let mut w = None;
        let mut t = None;
        let mut kernel_name = "nn".to_string();
        let mut l = 1usize;
        let mut p = None;
        let mut m = 1.0f64;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidModel(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let bad = |e: &dyn std::fmt::Display| Error::InvalidModel(format!("line {}: {}", lineno + 1, e));
            match key {
                "d" => d = value.parse().map_err(|e| bad(&e))?,
                "W" => w = Some(value.parse().map_err(|e| bad(&e))?),
                "T" => t = Some(value.parse().map_err(|e| bad(&e))?),
                "kernel" => kernel_name = value.to_string(),
                "L" => l = value.parse().map_err(|e| bad(&e))?,
                "p" => p = Some(value.parse().map_err(|e| bad(&e))?),
                "m" => m = value.parse().map_err(|e| bad(&e))?,
                other => return Err(Error::InvalidModel(format!("unknown key `{other}`"))),
            }
        }
        let w = w.ok_or_else(|| Error::InvalidModel("missing key W".into()))?;
        let t = t.ok_or_else(|| Error::InvalidModel("missing key T".into()))?;
        let p = p.ok_or_else(|| Error::InvalidModel("missing key p".into()))?;
        let kernel = match kernel_name.as_str() {
            "nn" => StepKernel::nearest_neighbor(d, w)?,
            "spread-out" | "spread_out" => StepKernel::spread_out(d, w, l)?,
            other => return Err(Error::InvalidModel(format!("unknown kernel `{other}`"))),
        };
        ModelSpec::new(kernel, t, p, m)
    }

    pub fn from_config_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }
}

/// Fixed global bond enumeration, lexicographic by (time, tail site, offset).
pub fn enumerate_bonds(spec: &ModelSpec) -> Vec<Bond> {
    let mut bonds = Vec::with_capacity(spec.bond_count());
    for t in 0..spec.horizon {
        for site in 0..spec.sites() {
            for (off, w) in &spec.kernel.offsets {
                let head_site = spec.kernel.site_shift(site, off);
                bonds.push(Bond {
                    index: bonds.len(),
                    tail: Vertex { site, t },
                    head: Vertex { site: head_site, t: t + 1 },
                    d_weight: *w,
                });
            }
        }
    }
    bonds
}

/// One realization of the bond set: bit i of `mask` is bond i's occupation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondConfig {
    pub mask: u64,
    pub weight: f64,
}

/// Exact enumeration of all 2^B configurations with their product weights.
///
/// The index space `0..count()` is plain; consumers may partition it into
/// ranges and reduce partial sums in fixed order for deterministic totals.
#[derive(Debug)]
pub struct ConfigEnumeration {
    bonds: Vec<Bond>,
    probs: Vec<f64>,
}

impl ConfigEnumeration {
    pub fn new(spec: &ModelSpec, bond_limit: usize) -> Result<Self> {
        let n = spec.bond_count();
        if n > bond_limit {
            return Err(Error::BondBudgetExceeded { actual: n, budget: bond_limit });
        }
        let bonds = enumerate_bonds(spec);
        let probs = bonds.iter().map(|b| spec.p * b.d_weight).collect();
        Ok(ConfigEnumeration { bonds, probs })
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond_probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn count(&self) -> u64 {
        1u64 << self.bonds.len()
    }

    pub fn weight_of(&self, mask: u64) -> f64 {
        let mut w = 1.0;
        for (i, q) in self.probs.iter().enumerate() {
            w *= if mask >> i & 1 == 1 { *q } else { 1.0 - *q };
        }
        w
    }

    pub fn config(&self, mask: u64) -> BondConfig {
        BondConfig { mask, weight: self.weight_of(mask) }
    }

    pub fn iter(&self) -> impl Iterator<Item = BondConfig> + '_ {
        (0..self.count()).map(move |m| self.config(m))
    }
}

/// Dual wave vector with components 2*pi*j_i / W.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveVector {
    pub indices: Vec<usize>,
    pub width: usize,
}

impl WaveVector {
    pub fn zero(dim: usize, width: usize) -> Self {
        WaveVector { indices: vec![0; dim], width }
    }

    pub fn is_zero(&self) -> bool {
        self.indices.iter().all(|&j| j == 0)
    }

    /// All W^d dual vectors in index order.
    pub fn grid(dim: usize, width: usize) -> Vec<WaveVector> {
        let n = width.pow(dim as u32);
        (0..n)
            .map(|mut s| {
                let mut indices = Vec::with_capacity(dim);
                for _ in 0..dim {
                    indices.push(s % width);
                    s /= width;
                }
                WaveVector { indices, width }
            })
            .collect()
    }

    /// k . sigma for the torus representative of a site.
    pub fn dot_site(&self, kernel: &StepKernel, site: usize) -> f64 {
        let coords = kernel.coords(site);
        let mut angle = 0.0;
        for (j, c) in self.indices.iter().zip(&coords) {
            angle += 2.0 * std::f64::consts::PI * (*j as f64) * (*c as f64) / self.width as f64;
        }
        angle
    }

    pub fn one_minus_cos(&self, kernel: &StepKernel, site: usize) -> f64 {
        1.0 - self.dot_site(kernel, site).cos()
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.indices.iter().map(|j| format!("{j}")).collect();
        format!("2pi/{}*({})", self.width, parts.join(","))
    }
}

/// Compensated (Kahan) accumulator for weight sums that must hold 1e-12.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
