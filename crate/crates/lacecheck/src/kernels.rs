//! Pair-kernel machinery for the diagrammatic chain bounds: the coefficient
//! pi^(N)(x) is bounded by an initial pair vector pushed through N pair
//! kernels and read off on the diagonal (x, x), and Pi^(N)(x) by the same
//! chain with one step widened by the pivotal-extra kernels.

use crate::convolution::{convolve, SpaceTimeFunction};
use crate::model::ModelSpec;

/// Two-point matrices on the vertex set that all pair kernels are built from.
pub struct PairIngredients {
    pub spec: ModelSpec,
    pub n_vertices: usize,
    /// phi(u; v), indexed u * V + v.
    pub phi: Vec<f64>,
    /// (q * phi)(u; v).
    pub a: Vec<f64>,
    /// (q * phi * q * phi)(u; v).
    pub aa: Vec<f64>,
    /// (phi * q * phi)(u; v).
    pub pqp: Vec<f64>,
}

impl PairIngredients {
    pub fn new(spec: &ModelSpec, phi: &SpaceTimeFunction) -> Self {
        let q = SpaceTimeFunction::q_fn(spec);
        let a = convolve(&q, phi);
        let aa = convolve(&a, &a);
        let pqp = convolve(phi, &a);
        let v = spec.vertex_count();
        let matrix = |f: &SpaceTimeFunction| -> Vec<f64> {
            let mut m = vec![0.0f64; v * v];
            for u in 0..v {
                for w in 0..v {
                    m[u * v + w] = f.at_diff(spec.vertex_of(u), spec.vertex_of(w));
                }
            }
            m
        };
        PairIngredients {
            spec: spec.clone(),
            n_vertices: v,
            phi: matrix(phi),
            a: matrix(&a),
            aa: matrix(&aa),
            pqp: matrix(&pqp),
        }
    }

    #[inline]
    fn at(m: &[f64], v: usize, a: usize, b: usize) -> f64 {
        m[a * v + b]
    }

    #[inline]
    pub fn xi_parallel(&self, u: usize, v: usize, up: usize, vp: usize) -> f64 {
        let n = self.n_vertices;
        Self::at(&self.a, n, u, up) * Self::at(&self.a, n, v, vp)
    }

    #[inline]
    pub fn xi_cross(&self, u: usize, v: usize, up: usize, vp: usize) -> f64 {
        let n = self.n_vertices;
        Self::at(&self.a, n, u, vp) * Self::at(&self.a, n, v, up)
    }

    #[inline]
    pub fn theta_parallel(&self, u: usize, v: usize, up: usize, vp: usize) -> f64 {
        let n = self.n_vertices;
        Self::at(&self.a, n, u, up) * Self::at(&self.aa, n, v, vp)
    }

    #[inline]
    pub fn theta_cross(&self, u: usize, v: usize, up: usize, vp: usize) -> f64 {
        let n = self.n_vertices;
        Self::at(&self.a, n, u, vp) * Self::at(&self.aa, n, v, up)
    }

    #[inline]
    fn phi_at(&self, a: usize, b: usize) -> f64 {
        self.phi[a * self.n_vertices + b]
    }
}

/// The pair kernels appearing in the chain bounds. `XiBareHalved` is the bare
/// (xi_par + xi_cross) factor with the diagonal halving kept, so that the
/// reorganized chains agree with the original one exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// (xi_par + xi_cross) phi(u'; v') / 2^{[u' = v']}
    Xi,
    /// phi(u; v) (xi_par + xi_cross) / 2^{[u' = v']}
    XiTilde,
    /// (xi_par + xi_cross) / 2^{[u' = v']}
    XiBareHalved,
    /// (theta_par + theta_cross) phi(u'; v') / 2^{[u' = v']}
    Theta,
    /// xi_cross-shaped factor times (phi * q * phi)(u'; v'); zero on the diagonal.
    ThetaPrime,
    /// Xi + Theta + ThetaPrime, the widened step in the Pi^(N) bound.
    XiThetaSum,
}

pub fn kernel_entry(
    ing: &PairIngredients,
    kind: KernelKind,
    u: usize,
    v: usize,
    up: usize,
    vp: usize,
) -> f64 {
    let half = if up == vp { 0.5 } else { 1.0 };
    match kind {
        KernelKind::Xi => {
            (ing.xi_parallel(u, v, up, vp) + ing.xi_cross(u, v, up, vp))
                * ing.phi_at(up, vp)
                * half
        }
        KernelKind::XiTilde => {
            ing.phi_at(u, v)
                * (ing.xi_parallel(u, v, up, vp) + ing.xi_cross(u, v, up, vp))
                * half
        }
        KernelKind::XiBareHalved => {
            (ing.xi_parallel(u, v, up, vp) + ing.xi_cross(u, v, up, vp)) * half
        }
        KernelKind::Theta => {
            (ing.theta_parallel(u, v, up, vp) + ing.theta_cross(u, v, up, vp))
                * ing.phi_at(up, vp)
                * half
        }
        KernelKind::ThetaPrime => {
            let n = ing.n_vertices;
            ing.a[u * n + vp] * ing.a[v * n + up] * ing.pqp[up * n + vp]
        }
        KernelKind::XiThetaSum => {
            kernel_entry(ing, KernelKind::Xi, u, v, up, vp)
                + kernel_entry(ing, KernelKind::Theta, u, v, up, vp)
                + kernel_entry(ing, KernelKind::ThetaPrime, u, v, up, vp)
        }
    }
}

/// Above this vertex count the (V^2)^2 dense kernel table is skipped and
/// entries are evaluated lazily; the two paths sum identical products in the
/// same order, so results agree bit for bit.
pub const DENSE_VERTEX_LIMIT: usize = 32;

pub struct PairKernel {
    pub kind: KernelKind,
    dense: Option<Vec<f64>>,
}

impl PairKernel {
    pub fn new(ing: &PairIngredients, kind: KernelKind) -> Self {
        Self::with_density(ing, kind, ing.n_vertices <= DENSE_VERTEX_LIMIT)
    }

    pub fn with_density(ing: &PairIngredients, kind: KernelKind, dense: bool) -> Self {
        let table = if dense {
            let n = ing.n_vertices;
            let np = n * n;
            let mut t = vec![0.0f64; np * np];
            for u in 0..n {
                for v in 0..n {
                    for up in 0..n {
                        for vp in 0..n {
                            t[(u * n + v) * np + up * n + vp] =
                                kernel_entry(ing, kind, u, v, up, vp);
                        }
                    }
                }
            }
            Some(t)
        } else {
            None
        };
        PairKernel { kind, dense: table }
    }

    /// out(u', v') = sum_{u, v} vec(u, v) K(u, v; u', v'), pairs in id order.
    pub fn apply(&self, ing: &PairIngredients, vec: &[f64]) -> Vec<f64> {
        let n = ing.n_vertices;
        let np = n * n;
        assert_eq!(vec.len(), np);
        let mut out = vec![0.0f64; np];
        for up in 0..n {
            for vp in 0..n {
                let mut s = 0.0f64;
                for u in 0..n {
                    for v in 0..n {
                        let x = vec[u * n + v];
                        if x == 0.0 {
                            continue;
                        }
                        let e = match &self.dense {
                            Some(t) => t[(u * n + v) * np + up * n + vp],
                            None => kernel_entry(ing, self.kind, u, v, up, vp),
                        };
                        s += x * e;
                    }
                }
                out[up * n + vp] = s;
            }
        }
        out
    }
}

/// phi(u_1) phi(u_1; v_1) phi(v_1): the triangle-shaped source of the chain.
pub fn initial_triangle(ing: &PairIngredients) -> Vec<f64> {
    let n = ing.n_vertices;
    let o = ing.spec.vertex_id(ing.spec.origin());
    let mut vec = vec![0.0f64; n * n];
    for u in 0..n {
        for v in 0..n {
            vec[u * n + v] = ing.phi_at(o, u) * ing.phi_at(u, v) * ing.phi_at(o, v);
        }
    }
    vec
}

/// phi(u_1) phi(v_1): the two bare legs used with the tilde kernels.
pub fn initial_legs(ing: &PairIngredients) -> Vec<f64> {
    let n = ing.n_vertices;
    let o = ing.spec.vertex_id(ing.spec.origin());
    let mut vec = vec![0.0f64; n * n];
    for u in 0..n {
        for v in 0..n {
            vec[u * n + v] = ing.phi_at(o, u) * ing.phi_at(o, v);
        }
    }
    vec
}

fn diagonal(ing: &PairIngredients, vec: &[f64]) -> Vec<f64> {
    let n = ing.n_vertices;
    (0..n).map(|x| vec[x * n + x]).collect()
}

fn chain_diagonal(ing: &PairIngredients, init: Vec<f64>, kinds: &[KernelKind]) -> Vec<f64> {
    let mut vec = init;
    for &k in kinds {
        let kernel = PairKernel::new(ing, k);
        vec = kernel.apply(ing, &vec);
    }
    diagonal(ing, &vec)
}

/// Bound on pi^(0)(x): delta_{x,o} + (q * phi)(x)^2, per vertex id.
pub fn pi0_bound(ing: &PairIngredients) -> Vec<f64> {
    let n = ing.n_vertices;
    let o = ing.spec.vertex_id(ing.spec.origin());
    (0..n)
        .map(|x| {
            let a = ing.a[o * n + x];
            if x == o { 1.0 + a * a } else { a * a }
        })
        .collect()
}

/// Chain bound on pi^(N)(x) for N >= 1: triangle source through N Xi steps.
pub fn pi_chain_bound(ing: &PairIngredients, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    chain_diagonal(ing, initial_triangle(ing), &vec![KernelKind::Xi; n])
}

/// Same chain with the triangle absorbed into tilde kernels: bare legs
/// through N XiTilde steps. Equal to `pi_chain_bound` entrywise.
pub fn pi_chain_bound_legs(ing: &PairIngredients, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    chain_diagonal(ing, initial_legs(ing), &vec![KernelKind::XiTilde; n])
}

/// Same chain reorganized around step j (1-based): j-1 Xi steps, one bare
/// halved step, then XiTilde steps. Equal to `pi_chain_bound` entrywise.
pub fn pi_chain_bound_split(ing: &PairIngredients, n: usize, j: usize) -> Vec<f64> {
    assert!(n >= 1 && (1..=n).contains(&j));
    let mut kinds = vec![KernelKind::Xi; j - 1];
    kinds.push(KernelKind::XiBareHalved);
    kinds.extend(vec![KernelKind::XiTilde; n - j]);
    chain_diagonal(ing, initial_triangle(ing), &kinds)
}

/// Chain bound on Pi^(N)(x): sum over j of the pi chain with step j widened
/// by the pivotal-extra kernels Theta and ThetaPrime.
pub fn pi_pivotal_chain_bound(ing: &PairIngredients, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    let nv = ing.n_vertices;
    let mut total = vec![0.0f64; nv];
    for j in 1..=n {
        let mut kinds = vec![KernelKind::Xi; j - 1];
        kinds.push(KernelKind::XiThetaSum);
        kinds.extend(vec![KernelKind::Xi; n - j]);
        let term = chain_diagonal(ing, initial_triangle(ing), &kinds);
        for (t, v) in total.iter_mut().zip(term) {
            *t += v;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelSpec, StepKernel, Vertex, DEFAULT_STATE_BUDGET};
    use crate::oracle::two_point_transfer;

    fn ingredients(spec: &ModelSpec) -> PairIngredients {
        let phi = two_point_transfer(spec, DEFAULT_STATE_BUDGET).unwrap().to_function(spec);
        PairIngredients::new(spec, &phi)
    }

    fn m0() -> ModelSpec {
        ModelSpec::new(StepKernel::nearest_neighbor(1, 4).unwrap(), 3, 0.5, 1.0).unwrap()
    }

    #[test]
    fn ingredient_reference_values() {
        let spec = m0();
        let ing = ingredients(&spec);
        let id = |site, t| spec.vertex_id(Vertex { site, t });
        let n = ing.n_vertices;
        let o = id(0, 0);
        // (q * phi)(o; (0,2)) = 2 * 0.25 * 0.25.
        assert!((ing.a[o * n + id(0, 2)] - 0.125).abs() < 1e-15);
        // xi_parallel(o, o; (1,1), (3,1)) = A(o;(1,1)) A(o;(3,1)) = 0.25^2.
        assert!((ing.xi_parallel(o, o, id(1, 1), id(3, 1)) - 0.0625).abs() < 1e-15);
        // Xi(o, o; (0,2), (0,2)) = 2 A^2 * 1 / 2 = 0.125^2.
        let e = kernel_entry(&ing, KernelKind::Xi, o, o, id(0, 2), id(0, 2));
        assert!((e - 0.015625).abs() < 1e-15);
    }

    #[test]
    fn dense_and_lazy_agree_bitwise() {
        let spec = m0();
        let ing = ingredients(&spec);
        let init = initial_triangle(&ing);
        for kind in [
            KernelKind::Xi,
            KernelKind::XiTilde,
            KernelKind::XiBareHalved,
            KernelKind::Theta,
            KernelKind::ThetaPrime,
            KernelKind::XiThetaSum,
        ] {
            let dense = PairKernel::with_density(&ing, kind, true).apply(&ing, &init);
            let lazy = PairKernel::with_density(&ing, kind, false).apply(&ing, &init);
            for (a, b) in dense.iter().zip(&lazy) {
                assert_eq!(a.to_bits(), b.to_bits(), "{kind:?}");
            }
        }
    }

    #[test]
    fn chain_rewrites_agree() {
        let spec = m0();
        let ing = ingredients(&spec);
        for n in 1..=2 {
            let base = pi_chain_bound(&ing, n);
            let legs = pi_chain_bound_legs(&ing, n);
            for (a, b) in base.iter().zip(&legs) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "legs n={n}");
            }
            for j in 1..=n {
                let split = pi_chain_bound_split(&ing, n, j);
                for (a, b) in base.iter().zip(&split) {
                    assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "split n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn theta_prime_vanishes_on_diagonal() {
        let spec = m0();
        let ing = ingredients(&spec);
        let n = ing.n_vertices;
        for u in 0..n {
            for v in 0..n {
                for x in 0..n {
                    assert_eq!(kernel_entry(&ing, KernelKind::ThetaPrime, u, v, x, x), 0.0);
                }
            }
        }
    }

    #[test]
    fn pivotal_chain_dominates_plain_chain() {
        let spec = m0();
        let ing = ingredients(&spec);
        for n in 1..=2 {
            let pi = pi_chain_bound(&ing, n);
            let pivotal = pi_pivotal_chain_bound(&ing, n);
            for (x, (a, b)) in pi.iter().zip(&pivotal).enumerate() {
                // Each of the N widened terms dominates the plain chain.
                assert!(*b >= n as f64 * a - 1e-12, "x={x} n={n}");
            }
        }
    }

    #[test]
    fn pi0_bound_reference() {
        let spec = m0();
        let ing = ingredients(&spec);
        let b = pi0_bound(&ing);
        let id = |site, t| spec.vertex_id(Vertex { site, t });
        assert!((b[id(0, 0)] - 1.0).abs() < 1e-15);
        assert!((b[id(0, 2)] - 0.015625).abs() < 1e-15);
        assert!((b[id(1, 1)] - 0.0625).abs() < 1e-15);
    }
}
