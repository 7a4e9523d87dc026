//! Scalar diagram functionals (triangles, weighted bubble, square, H shape)
//! built from convolutions of the step weights q and the two-point function,
//! plus the closed-form bounds on weighted coefficient sums expressed through
//! them.

use serde::{Deserialize, Serialize};

use crate::convolution::{convolve, cos_weight, weight_m, SpaceTimeFunction};
use crate::model::{ModelSpec, WaveVector};

/// Shared convolutions: a = q*phi, b = q*phi*phi, c = q*phi*phi*phi,
/// aa = q*phi*q*phi, pqp = phi*q*phi.
pub struct DiagramIngredients {
    pub spec: ModelSpec,
    pub a: SpaceTimeFunction,
    pub b: SpaceTimeFunction,
    pub c: SpaceTimeFunction,
    pub aa: SpaceTimeFunction,
    pub pqp: SpaceTimeFunction,
}

impl DiagramIngredients {
    pub fn new(spec: &ModelSpec, phi: &SpaceTimeFunction) -> Self {
        let q = SpaceTimeFunction::q_fn(spec);
        let a = convolve(&q, phi);
        let b = convolve(&a, phi);
        let c = convolve(&b, phi);
        let aa = convolve(&a, &a);
        let pqp = convolve(phi, &a);
        DiagramIngredients { spec: spec.clone(), a, b, c, aa, pqp }
    }
}

/// sup over anchor vertices x of sum_v anchored(v) m^{tau_v - tau_x}
/// outer(v - x), with difference lookups vanishing outside time 0..T.
fn sup_line_sum(
    spec: &ModelSpec,
    anchored: &SpaceTimeFunction,
    mexp: f64,
    outer: &SpaceTimeFunction,
) -> f64 {
    let s = spec.sites();
    let t_max = spec.horizon;
    let mut best = 0.0f64;
    for xt in 0..=t_max {
        for xs in 0..s {
            let mut sum = 0.0f64;
            for vt in xt..=t_max {
                let dt = vt - xt;
                let mw = mexp.powi(dt as i32);
                for vs in 0..s {
                    let av = anchored.get(vs, vt);
                    if av == 0.0 {
                        continue;
                    }
                    sum += av * mw * outer.get(spec.kernel.site_diff(vs, xs), dt);
                }
            }
            best = best.max(sum);
        }
    }
    best
}

/// Triangle: sup_x sum_v (q*phi*phi)(v) m^{tau_v - tau_x} (q*phi)(v - x).
pub fn triangle(ing: &DiagramIngredients, m: f64) -> f64 {
    sup_line_sum(&ing.spec, &ing.b, m, &ing.a)
}

/// Tilde triangle: sup_x sum_v (q*phi*q*phi)(v) (q*phi)(v - x).
pub fn triangle_tilde(ing: &DiagramIngredients) -> f64 {
    sup_line_sum(&ing.spec, &ing.aa, 1.0, &ing.a)
}

/// Square: sup_x sum_v (q*phi*phi*phi)(v) m^{tau_v - tau_x} (q*phi)(v - x).
pub fn square(ing: &DiagramIngredients, m: f64) -> f64 {
    sup_line_sum(&ing.spec, &ing.c, m, &ing.a)
}

/// Weighted bubble: the (1 - cos(k.sigma_v)) factor sits on the m-weighted
/// line for m < 1 and on the plain line for m >= 1; the two expressions
/// coincide at m = 1.
pub fn weighted_bubble(ing: &DiagramIngredients, m: f64, k: &WaveVector) -> f64 {
    if m < 1.0 {
        let anchored = cos_weight(&ing.a, k);
        sup_line_sum(&ing.spec, &anchored, m, &ing.a)
    } else {
        let anchored = cos_weight(&weight_m(&ing.a, m), k);
        sup_line_sum(&ing.spec, &anchored, 1.0, &ing.a)
    }
}

/// The bubble with the cosine factor replaced by its crude cap 2.
pub fn bubble_cap(ing: &DiagramIngredients, m: f64) -> f64 {
    let doubled = |f: &SpaceTimeFunction| {
        let mut g = f.clone();
        for v in g.vals.iter_mut() {
            *v *= 2.0;
        }
        g
    };
    if m < 1.0 {
        sup_line_sum(&ing.spec, &doubled(&ing.a), m, &ing.a)
    } else {
        sup_line_sum(&ing.spec, &doubled(&weight_m(&ing.a, m)), 1.0, &ing.a)
    }
}

/// H shape: sup over anchors x, y of
/// sum_{u,v,w} a(u) pqp(u;v) a(v-x) a(w-u) a((y+w)-v),
/// where a = q*phi and all difference lookups vanish outside time 0..T.
pub fn h_diagram(ing: &DiagramIngredients) -> f64 {
    let spec = &ing.spec;
    let s = spec.sites();
    let nv = spec.vertex_count();
    let at = |f: &SpaceTimeFunction, ds: usize, dt: i64| f.at_delta(ds, dt);
    let dim_site = |id: usize| (id % s, (id / s) as i64);

    // inner[y][u * nv + v] = sum_w a(w - u) a((y + w) - v); y + w may leave the
    // time window, in which case the difference lookup below is zero anyway.
    let mut inner = vec![0.0f64; nv * nv * nv];
    for y in 0..nv {
        let (ys, yt) = dim_site(y);
        for u in 0..nv {
            let (us, ut) = dim_site(u);
            for v in 0..nv {
                let (vs, vt) = dim_site(v);
                let mut sum = 0.0f64;
                for w in 0..nv {
                    let (ws, wt) = dim_site(w);
                    let first = at(&ing.a, spec.kernel.site_diff(ws, us), wt - ut);
                    if first == 0.0 {
                        continue;
                    }
                    let ss = spec.kernel.site_add(ys, ws);
                    sum += first * at(&ing.a, spec.kernel.site_diff(ss, vs), yt + wt - vt);
                }
                inner[(y * nv + u) * nv + v] = sum;
            }
        }
    }

    let mut best = 0.0f64;
    for x in 0..nv {
        let (xs, xt) = dim_site(x);
        for y in 0..nv {
            let mut sum = 0.0f64;
            for u in 0..nv {
                let (us, ut) = dim_site(u);
                let au = at(&ing.a, us, ut);
                if au == 0.0 {
                    continue;
                }
                for v in 0..nv {
                    let (vs, vt) = dim_site(v);
                    let mid = at(&ing.pqp, spec.kernel.site_diff(vs, us), vt - ut)
                        * at(&ing.a, spec.kernel.site_diff(vs, xs), vt - xt);
                    if mid == 0.0 {
                        continue;
                    }
                    sum += au * mid * inner[(y * nv + u) * nv + v];
                }
            }
            best = best.max(sum);
        }
    }
    best
}

/// All scalar diagrams for one (model, m), with the bubble over the dual grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramSet {
    pub model_hash: String,
    pub m: f64,
    pub triangle: f64,
    pub triangle_tilde: f64,
    pub square: f64,
    pub h: f64,
    /// Dual-grid labels, aligned with `bubble`.
    pub k_labels: Vec<String>,
    pub bubble: Vec<f64>,
}

impl DiagramSet {
    pub fn compute(spec: &ModelSpec, phi: &SpaceTimeFunction, m: f64) -> Self {
        let ing = DiagramIngredients::new(spec, phi);
        let grid = WaveVector::grid(spec.kernel.dim, spec.kernel.width);
        DiagramSet {
            model_hash: spec.hash(),
            m,
            triangle: triangle(&ing, m),
            triangle_tilde: triangle_tilde(&ing),
            square: square(&ing, m),
            h: h_diagram(&ing),
            k_labels: grid.iter().map(|k| k.label()).collect(),
            bubble: grid.iter().map(|k| weighted_bubble(&ing, m, k)).collect(),
        }
    }
}

fn pow_or_zero_exp(base: f64, e: i64) -> f64 {
    base.powi(e.max(0) as i32)
}

/// Closed-form bound on sum_x tau_x^ell pi^(N)(x) m^{tau_x}:
/// (N+1)^ell (1 + 2T)(2T)^{(N-1) v 0} * (T for ell <= 1, S for ell = 2).
pub fn pi_sum_bound(n: usize, ell: usize, t: f64, s: f64) -> f64 {
    assert!(ell <= 2);
    let tail = if ell <= 1 { t } else { s };
    ((n + 1) as f64).powi(ell as i32)
        * (1.0 + 2.0 * t)
        * pow_or_zero_exp(2.0 * t, n as i64 - 1)
        * tail
}

/// Sharp N = 0 variant: just T (ell <= 1) or S (ell = 2).
pub fn pi_sum_bound_sharp_n0(ell: usize, t: f64, s: f64) -> f64 {
    assert!(ell <= 2);
    if ell <= 1 { t } else { s }
}

/// Closed-form bound on sum_x (1 - cos(k.sigma_x)) pi^(N)(x) m^{tau_x}:
/// 3 (N+1)^2 (1 + 2T)(2T)^{(N-1) v 0} W(k).
pub fn pi_cos_sum_bound(n: usize, t: f64, w: f64) -> f64 {
    3.0 * ((n + 1) as f64).powi(2) * (1.0 + 2.0 * t) * pow_or_zero_exp(2.0 * t, n as i64 - 1) * w
}

/// Sharp N = 0 variant: W(k) itself.
pub fn pi_cos_sum_bound_sharp_n0(w: f64) -> f64 {
    w
}

/// Closed-form bound on sum_x Pi^(N)(x) at m = 1:
/// N (1 + 2T)((T + T~)(2T)^{N-1} + H (2T)^{(N-2) v 0}).
pub fn pivotal_sum_bound(n: usize, t1: f64, t_tilde: f64, h: f64) -> f64 {
    assert!(n >= 1);
    n as f64
        * (1.0 + 2.0 * t1)
        * ((t1 + t_tilde) * pow_or_zero_exp(2.0 * t1, n as i64 - 1)
            + h * pow_or_zero_exp(2.0 * t1, n as i64 - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{StepKernel, DEFAULT_STATE_BUDGET};
    use crate::oracle::two_point_transfer;

    fn spec_with(width: usize, horizon: usize, p: f64) -> ModelSpec {
        ModelSpec::new(StepKernel::nearest_neighbor(1, width).unwrap(), horizon, p, 1.0).unwrap()
    }

    fn ingredients(spec: &ModelSpec) -> DiagramIngredients {
        let phi = two_point_transfer(spec, DEFAULT_STATE_BUDGET).unwrap().to_function(spec);
        DiagramIngredients::new(spec, &phi)
    }

    #[test]
    fn all_zero_at_p_zero() {
        let spec = spec_with(4, 3, 0.0);
        let phi = two_point_transfer(&spec, DEFAULT_STATE_BUDGET).unwrap().to_function(&spec);
        for m in [0.8, 1.0, 1.25] {
            let ds = DiagramSet::compute(&spec, &phi, m);
            assert_eq!(ds.triangle, 0.0);
            assert_eq!(ds.triangle_tilde, 0.0);
            assert_eq!(ds.square, 0.0);
            assert_eq!(ds.h, 0.0);
            assert!(ds.bubble.iter().all(|&w| w == 0.0));
        }
    }

    #[test]
    fn positive_at_m0() {
        let spec = spec_with(4, 3, 0.5);
        let ing = ingredients(&spec);
        assert!(triangle(&ing, 1.0) > 0.0);
        assert!(triangle_tilde(&ing) > 0.0);
        assert!(square(&ing, 1.0) > 0.0);
        assert!(h_diagram(&ing) > 0.0);
    }

    #[test]
    fn bubble_at_zero_wave_vector_vanishes() {
        let spec = spec_with(4, 3, 0.5);
        let ing = ingredients(&spec);
        let k0 = WaveVector::zero(1, 4);
        for m in [0.8, 1.0, 1.25] {
            assert_eq!(weighted_bubble(&ing, m, &k0), 0.0);
        }
    }

    #[test]
    fn bubble_branches_agree_at_m_one() {
        let spec = spec_with(4, 3, 0.5);
        let ing = ingredients(&spec);
        for k in WaveVector::grid(1, 4) {
            // Evaluate both branch expressions by nudging around m = 1.
            let low = {
                let anchored = cos_weight(&ing.a, &k);
                sup_line_sum(&ing.spec, &anchored, 1.0, &ing.a)
            };
            let high = weighted_bubble(&ing, 1.0, &k);
            assert!((low - high).abs() <= 1e-12 * high.abs().max(1.0));
        }
    }

    #[test]
    fn bubble_below_crude_cap() {
        let spec = spec_with(4, 3, 0.5);
        let ing = ingredients(&spec);
        for m in [0.8, 1.0, 1.25] {
            let cap = bubble_cap(&ing, m);
            for k in WaveVector::grid(1, 4) {
                assert!(weighted_bubble(&ing, m, &k) <= cap + 1e-12);
            }
        }
    }

    #[test]
    fn diagrams_monotone_in_p() {
        let mut prev: Option<(f64, f64, f64, f64)> = None;
        for p in [0.2, 0.5, 0.8] {
            let spec = spec_with(3, 2, p);
            let ing = ingredients(&spec);
            let cur = (triangle(&ing, 1.0), triangle_tilde(&ing), square(&ing, 1.0), h_diagram(&ing));
            if let Some(prev) = prev {
                assert!(cur.0 >= prev.0 && cur.1 >= prev.1 && cur.2 >= prev.2 && cur.3 >= prev.3);
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn h_needs_two_time_steps() {
        // The H shape forces tau_u >= 1 and tau_v >= tau_u + 1, so it vanishes
        // for horizon 1 and is already positive at horizon 2.
        let ing1 = ingredients(&spec_with(3, 1, 0.6));
        assert_eq!(h_diagram(&ing1), 0.0);
        let ing2 = ingredients(&spec_with(3, 2, 0.6));
        assert!(h_diagram(&ing2) > 0.0);
    }

    #[test]
    fn closed_form_arithmetic() {
        assert!((pi_sum_bound(0, 0, 0.1, 0.4) - 0.12).abs() < 1e-15);
        assert!((pi_sum_bound(2, 2, 0.1, 0.4) - 0.864).abs() < 1e-15);
        assert_eq!(pi_sum_bound_sharp_n0(1, 0.1, 0.4), 0.1);
        assert_eq!(pi_sum_bound_sharp_n0(2, 0.1, 0.4), 0.4);
        assert!((pi_cos_sum_bound(1, 0.1, 0.05) - 0.72).abs() < 1e-15);
        assert_eq!(pi_cos_sum_bound_sharp_n0(0.05), 0.05);
        assert!((pivotal_sum_bound(1, 0.1, 0.2, 0.05) - 0.42).abs() < 1e-15);
        assert!((pivotal_sum_bound(2, 0.1, 0.2, 0.05) - 0.264).abs() < 1e-15);
        assert_eq!(pivotal_sum_bound(1, 0.0, 0.0, 0.0), 0.0);
    }
}
