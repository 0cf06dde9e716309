//! 7-point Gauss / 15-point Kronrod rule on `[-1, 1]`.

/// Kronrod abscissae, non-negative half (the last one is the centre).
pub(crate) const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

pub(crate) const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];

/// Gauss weights for the odd-indexed Kronrod abscissae (1, 3, 5) and the centre.
pub(crate) const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// The 15 abscissae in increasing order with Kronrod and Gauss weights
/// (Gauss weight zero for Kronrod-only nodes).
pub(crate) fn nodes() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for i in 0..7 {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        out[i] = (-XK[i], WK[i], wg);
        out[14 - i] = (XK[i], WK[i], wg);
    }
    out[7] = (0.0, WK[7], WG[3]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials() {
        let n = nodes();
        for deg in 0..=13 {
            let k: f64 = n.iter().map(|&(x, wk, _)| wk * x.powi(deg)).sum();
            let g: f64 = n.iter().map(|&(x, _, wg)| wg * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((k - exact).abs() < 1e-14, "kronrod deg {deg}");
            assert!((g - exact).abs() < 1e-14, "gauss deg {deg}");
        }
    }
}
