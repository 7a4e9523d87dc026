//! Translation-invariant space-time functions on (Z_W^d, {0..T}) and their
//! convolution algebra. The two-argument notation f(v; x) of transfer-operator
//! formulas maps to f(x - v), spatial difference mod W, time difference exact.

use crate::model::{ModelSpec, StepKernel, WaveVector};

/// A real function of (spatial difference site, time difference), zero for
/// negative time differences by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeFunction {
    pub kernel: StepKernel,
    pub t_max: usize,
    /// Indexed vals[dt * sites + dsite].
    pub vals: Vec<f64>,
    pub label: String,
}

impl SpaceTimeFunction {
    pub fn zeros(kernel: &StepKernel, t_max: usize, label: &str) -> Self {
        SpaceTimeFunction {
            kernel: kernel.clone(),
            t_max,
            vals: vec![0.0; kernel.sites() * (t_max + 1)],
            label: label.to_string(),
        }
    }

    /// Kronecker delta at the space-time origin, the convolution identity.
    pub fn delta(kernel: &StepKernel, t_max: usize) -> Self {
        let mut f = Self::zeros(kernel, t_max, "delta");
        f.vals[0] = 1.0;
        f
    }

    /// The one-step bond kernel q_p as a space-time function.
    pub fn q_fn(spec: &ModelSpec) -> Self {
        let mut f = Self::zeros(&spec.kernel, spec.horizon, "q");
        if spec.horizon >= 1 {
            for (off, w) in &spec.kernel.offsets {
                let site = spec.kernel.offset_site(off);
                f.vals[spec.sites() + site] = spec.p * w;
            }
        }
        f
    }

    pub fn sites(&self) -> usize {
        self.kernel.sites()
    }

    pub fn get(&self, dsite: usize, dt: usize) -> f64 {
        self.vals[dt * self.sites() + dsite]
    }

    pub fn set(&mut self, dsite: usize, dt: usize, v: f64) {
        let s = self.sites();
        self.vals[dt * s + dsite] = v;
    }

    /// f(from; to) = f(to - from); zero outside the time window.
    pub fn at_diff(&self, from: crate::model::Vertex, to: crate::model::Vertex) -> f64 {
        if to.t < from.t || to.t - from.t > self.t_max {
            return 0.0;
        }
        self.get(self.kernel.site_diff(to.site, from.site), to.t - from.t)
    }

    /// Like `at_diff` but for an arbitrary signed time difference.
    pub fn at_delta(&self, dsite: usize, dt: i64) -> f64 {
        if dt < 0 || dt as usize > self.t_max {
            return 0.0;
        }
        self.get(dsite, dt as usize)
    }
}

/// Exact direct-sum convolution: (f*g)(x) = sum_v f(v) g(x - v). Time grading
/// truncates identically on both sides, so the result is exact on dt <= T.
pub fn convolve(f: &SpaceTimeFunction, g: &SpaceTimeFunction) -> SpaceTimeFunction {
    assert_eq!(f.kernel.width, g.kernel.width);
    assert_eq!(f.kernel.dim, g.kernel.dim);
    assert_eq!(f.t_max, g.t_max);
    let s = f.sites();
    let mut out = SpaceTimeFunction::zeros(&f.kernel, f.t_max, &format!("({})*({})", f.label, g.label));
    for dt in 0..=f.t_max {
        for ds in 0..s {
            let mut acc = 0.0;
            for r in 0..=dt {
                for u in 0..s {
                    let fv = f.get(u, r);
                    if fv == 0.0 {
                        continue;
                    }
                    acc += fv * g.get(f.kernel.site_diff(ds, u), dt - r);
                }
            }
            out.set(ds, dt, acc);
        }
    }
    out
}

/// Pointwise multiply by m^dt. A homomorphism of the convolution algebra since
/// the time grading is additive.
pub fn weight_m(f: &SpaceTimeFunction, m: f64) -> SpaceTimeFunction {
    assert!(m > 0.0);
    let mut out = f.clone();
    out.label = format!("m^t*({})", f.label);
    let s = f.sites();
    for dt in 0..=f.t_max {
        let w = m.powi(dt as i32);
        for ds in 0..s {
            out.vals[dt * s + ds] = f.get(ds, dt) * w;
        }
    }
    out
}

/// Pointwise multiply by (1 - cos(k . dsigma)) on the torus representative.
pub fn cos_weight(f: &SpaceTimeFunction, k: &WaveVector) -> SpaceTimeFunction {
    let mut out = f.clone();
    out.label = format!("(1-cos k)*({})", f.label);
    let s = f.sites();
    let factors: Vec<f64> = (0..s).map(|ds| k.one_minus_cos(&f.kernel, ds)).collect();
    for dt in 0..=f.t_max {
        for ds in 0..s {
            out.vals[dt * s + ds] = f.get(ds, dt) * factors[ds];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelSpec, StepKernel};
    use proptest::prelude::*;

    fn m0() -> ModelSpec {
        ModelSpec::new(StepKernel::nearest_neighbor(1, 4).unwrap(), 3, 0.5, 1.0).unwrap()
    }

    #[test]
    fn delta_is_identity() {
        let spec = m0();
        let q = SpaceTimeFunction::q_fn(&spec);
        let d = SpaceTimeFunction::delta(&spec.kernel, spec.horizon);
        assert_eq!(convolve(&d, &q).vals, q.vals);
        assert_eq!(convolve(&q, &d).vals, q.vals);
    }

    #[test]
    fn q_conv_q_example() {
        let spec = m0();
        let q = SpaceTimeFunction::q_fn(&spec);
        let qq = convolve(&q, &q);
        // Two intermediate sites, each path weight 0.25^2.
        assert!((qq.get(0, 2) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn weight_m_examples() {
        let spec = m0();
        let q = SpaceTimeFunction::q_fn(&spec);
        let d = SpaceTimeFunction::delta(&spec.kernel, spec.horizon);
        assert_eq!(weight_m(&d, 0.7).vals, d.vals);
        let wq = weight_m(&q, 0.7);
        for ds in 0..4 {
            assert!((wq.get(ds, 1) - 0.7 * q.get(ds, 1)).abs() < 1e-15);
        }
        assert_eq!(weight_m(&q, 1.0).vals, q.vals);
    }

    #[test]
    fn cos_weight_examples() {
        let spec = m0();
        let q = SpaceTimeFunction::q_fn(&spec);
        let d = SpaceTimeFunction::delta(&spec.kernel, spec.horizon);
        let k0 = WaveVector::zero(1, 4);
        assert!(cos_weight(&q, &k0).vals.iter().all(|&v| v == 0.0));
        let kpi = WaveVector { indices: vec![2], width: 4 };
        assert!(cos_weight(&d, &kpi).vals.iter().all(|&v| v == 0.0));
        let cq = cos_weight(&q, &kpi);
        assert!((cq.get(1, 1) - 2.0 * q.get(1, 1)).abs() < 1e-15);
    }

    fn arb_fn(seed: u64) -> SpaceTimeFunction {
        // Small deterministic pseudo-random function.
        let spec = m0();
        let mut f = SpaceTimeFunction::zeros(&spec.kernel, spec.horizon, "rand");
        let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        for v in &mut f.vals {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            *v = (state % 1000) as f64 / 1000.0;
        }
        f
    }

    proptest! {
        #[test]
        fn convolution_assoc_commut(a in 0u64..1000, b in 0u64..1000, c in 0u64..1000) {
            let (f, g, h) = (arb_fn(a), arb_fn(b), arb_fn(c));
            let fg = convolve(&f, &g);
            let gf = convolve(&g, &f);
            for (x, y) in fg.vals.iter().zip(&gf.vals) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
            let l = convolve(&fg, &h);
            let r = convolve(&f, &convolve(&g, &h));
            for (x, y) in l.vals.iter().zip(&r.vals) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }

        #[test]
        fn weight_m_is_homomorphism(a in 0u64..1000, b in 0u64..1000, m in 0.2f64..2.0) {
            let (f, g) = (arb_fn(a), arb_fn(b));
            let l = weight_m(&convolve(&f, &g), m);
            let r = convolve(&weight_m(&f, m), &weight_m(&g, m));
            for (x, y) in l.vals.iter().zip(&r.vals) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }

        #[test]
        fn convolution_preserves_nonnegativity(a in 0u64..1000, b in 0u64..1000) {
            let fg = convolve(&arb_fn(a), &arb_fn(b));
            prop_assert!(fg.vals.iter().all(|&v| v >= 0.0));
        }
    }
}
