//! Adaptive Gauss–Kronrod (7, 15) quadrature.
#![allow(clippy::excessive_precision)]

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Quad {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Quad {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let (f1, f2) = (f(c - h * XGK[j]), f(c + h * XGK[j]));
        k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    Quad { value: k * h, error: ((k - g) * h).abs() }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64, whole: Quad, depth: u32) -> Quad {
    let floor = 64.0 * f64::EPSILON * whole.value.abs();
    if whole.error <= tol.max(floor) || depth >= MAX_DEPTH {
        return whole;
    }
    let mid = 0.5 * (lo + hi);
    if mid <= lo || mid >= hi {
        return whole;
    }
    let (l, r) = (gk15(f, lo, mid), gk15(f, mid, hi));
    let l = adapt(f, lo, mid, 0.5 * tol, l, depth + 1);
    let r = adapt(f, mid, hi, 0.5 * tol, r, depth + 1);
    Quad { value: l.value + r.value, error: l.error + r.error }
}

/// `∫_lo^hi f` to absolute tolerance `tol`, with an error estimate.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Quad {
    if hi <= lo {
        return Quad { value: 0.0, error: 0.0 };
    }
    let whole = gk15(&f, lo, hi);
    adapt(&f, lo, hi, tol, whole, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_smooth() {
        let q = integrate(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, 1e-14);
        assert!((q.value - (32.0 - 8.0)).abs() < 1e-12);
        let q = integrate(f64::exp, 0.0, 1.0, 1e-14);
        assert!((q.value - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        let q = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((q.value - 2.0 / 3.0).abs() < 1e-11);
        assert!(q.error < 1e-11);
        assert_eq!(integrate(f64::exp, 1.0, 1.0, 1e-10).value, 0.0);
    }
}
