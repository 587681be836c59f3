use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Controls for [`propagate_ode`] and [`propagate_system`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OdeOptions {
    /// Local relative error targeted per step.
    pub rel_tol: f64,
    /// When `max(|y|, |y'|)` exceeds this, the state is divided by it.
    pub rescale_threshold: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            rescale_threshold: 1e100,
            max_steps: 20_000_000,
        }
    }
}

/// Solution of `psi'' + q(x) psi = 0` at `x`, stored with a running log scale.
///
/// The true value is `y * exp(log_scale)` and likewise for the derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OdeState {
    pub x: f64,
    pub y: Complex64,
    pub yp: Complex64,
    pub log_scale: f64,
}

impl OdeState {
    /// Unscaled value; overflows to infinity once `log_scale` is large.
    pub fn value(&self) -> Complex64 {
        self.y * self.log_scale.exp()
    }

    pub fn derivative(&self) -> Complex64 {
        self.yp * self.log_scale.exp()
    }
}

type Pair = [Complex64; 2];

#[derive(Clone, Copy)]
struct State<const K: usize>([Pair; K]);

impl<const K: usize> State<K> {
    fn zero() -> Self {
        State([[Complex64::new(0.0, 0.0); 2]; K])
    }

    #[inline]
    fn deriv(&self, q: Complex64) -> Self {
        let mut out = Self::zero();
        for (o, s) in out.0.iter_mut().zip(&self.0) {
            o[0] = s[1];
            o[1] = -q * s[0];
        }
        out
    }

    /// `self + h * sum(c_i k_i)`
    #[inline]
    fn step(&self, h: f64, terms: &[(f64, &State<K>)]) -> Self {
        let mut out = *self;
        for (c, k) in terms {
            let w = h * c;
            for (o, kk) in out.0.iter_mut().zip(&k.0) {
                o[0] += kk[0] * w;
                o[1] += kk[1] * w;
            }
        }
        out
    }

    fn combo(terms: &[(f64, &State<K>)]) -> Self {
        Self::zero().step(1.0, terms)
    }

    fn max_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|p| p.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn scale_by(&mut self, s: f64) {
        for p in self.0.iter_mut() {
            p[0] *= s;
            p[1] *= s;
        }
    }

    fn sum_sq(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|p| p.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|p| p.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Integrates `psi'' + q(x) psi = 0` from `x0` to `x1` (either direction).
///
/// Adaptive 8th-order Dormand-Prince (DOP853) with log-domain rescaling; see
/// [`propagate_system`].
pub fn propagate_ode<Q: Fn(f64) -> Complex64>(
    q: Q,
    x0: f64,
    x1: f64,
    init: (Complex64, Complex64),
    opts: &OdeOptions,
) -> Result<OdeState> {
    let [s] = propagate_system(q, x0, x1, [init], opts)?;
    Ok(s)
}

/// Integrates `K` independent solutions of `psi'' + q(x) psi = 0` in lockstep.
///
/// All solutions share one step sequence and one log scale, so any fixed
/// linear combination of them keeps its zeros and sign structure through
/// every rescaling.
pub fn propagate_system<Q: Fn(f64) -> Complex64, const K: usize>(
    q: Q,
    x0: f64,
    x1: f64,
    init: [(Complex64, Complex64); K],
    opts: &OdeOptions,
) -> Result<[OdeState; K]> {
    if !(opts.rel_tol > 0.0) || !(opts.rescale_threshold > 1.0) {
        return Err(Error::domain(
            "ODE options need rel_tol > 0 and rescale_threshold > 1",
        ));
    }
    let mut y = State::<K>(init.map(|(a, b)| [a, b]));
    if !y.is_finite() {
        return Err(Error::domain("non-finite initial condition"));
    }
    let mut log_scale = 0.0;
    let finish = |x: f64, y: &State<K>, log_scale: f64| {
        y.0.map(|p| OdeState {
            x,
            y: p[0],
            yp: p[1],
            log_scale,
        })
    };
    if x0 == x1 {
        return Ok(finish(x0, &y, log_scale));
    }

    let eval_q = |x: f64| {
        let v = q(x);
        if v.re.is_nan() || v.im.is_nan() {
            Err(Error::NotANumber { x })
        } else {
            Ok(v)
        }
    };

    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let rtol = opts.rel_tol;
    let dim = (2 * K) as f64;
    let ln_threshold = opts.rescale_threshold.ln();

    let mut x = x0;
    let mut k1 = y.deriv(eval_q(x)?);
    let mut h = dir * span.min(0.05 / (1.0 + eval_q(x)?.norm().sqrt()));
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut steps = 0usize;

    loop {
        if dir * (x1 - x) <= 0.0 {
            break;
        }
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps {
                x,
                max_steps: opts.max_steps,
            });
        }
        steps += 1;
        let mut last = false;
        if dir * (x + h - x1) >= 0.0 {
            h = x1 - x;
            last = true;
        }
        if h.abs() <= 16.0 * f64::EPSILON * x.abs().max(1.0) {
            return Err(Error::StepUnderflow { x });
        }

        let k2 = y.step(h, &[(A21, &k1)]).deriv(eval_q(x + C2 * h)?);
        let k3 = y.step(h, &[(A31, &k1), (A32, &k2)]).deriv(eval_q(x + C3 * h)?);
        let k4 = y.step(h, &[(A41, &k1), (A43, &k3)]).deriv(eval_q(x + C4 * h)?);
        let k5 = y
            .step(h, &[(A51, &k1), (A53, &k3), (A54, &k4)])
            .deriv(eval_q(x + C5 * h)?);
        let k6 = y
            .step(h, &[(A61, &k1), (A64, &k4), (A65, &k5)])
            .deriv(eval_q(x + C6 * h)?);
        let k7 = y
            .step(h, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)])
            .deriv(eval_q(x + C7 * h)?);
        let k8 = y
            .step(h, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)])
            .deriv(eval_q(x + C8 * h)?);
        let k9 = y
            .step(
                h,
                &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)],
            )
            .deriv(eval_q(x + C9 * h)?);
        let k10 = y
            .step(
                h,
                &[
                    (A101, &k1),
                    (A104, &k4),
                    (A105, &k5),
                    (A106, &k6),
                    (A107, &k7),
                    (A108, &k8),
                    (A109, &k9),
                ],
            )
            .deriv(eval_q(x + C10 * h)?);
        let k11 = y
            .step(
                h,
                &[
                    (A111, &k1),
                    (A114, &k4),
                    (A115, &k5),
                    (A116, &k6),
                    (A117, &k7),
                    (A118, &k8),
                    (A119, &k9),
                    (A1110, &k10),
                ],
            )
            .deriv(eval_q(x + C11 * h)?);
        let x_new = if last { x1 } else { x + h };
        let k12 = y
            .step(
                h,
                &[
                    (A121, &k1),
                    (A124, &k4),
                    (A125, &k5),
                    (A126, &k6),
                    (A127, &k7),
                    (A128, &k8),
                    (A129, &k9),
                    (A1210, &k10),
                    (A1211, &k11),
                ],
            )
            .deriv(eval_q(x_new)?);
        let incr = State::combo(&[
            (B1, &k1),
            (B6, &k6),
            (B7, &k7),
            (B8, &k8),
            (B9, &k9),
            (B10, &k10),
            (B11, &k11),
            (B12, &k12),
        ]);
        let y_new = y.step(h, &[(1.0, &incr)]);

        // error estimate relative to the joint magnitude of the whole state
        let scale = rtol * y.max_norm().max(y_new.max_norm()).max(f64::MIN_POSITIVE);
        let err3 = State::combo(&[(1.0, &incr), (-BHH1, &k1), (-BHH2, &k9), (-BHH3, &k12)]);
        let err5 = State::combo(&[
            (ER1, &k1),
            (ER6, &k6),
            (ER7, &k7),
            (ER8, &k8),
            (ER9, &k9),
            (ER10, &k10),
            (ER11, &k11),
            (ER12, &k12),
        ]);
        let e5 = err5.sum_sq() / (scale * scale);
        let e3 = err3.sum_sq() / (scale * scale);
        let mut deno = e5 + 0.01 * e3;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * e5 * (1.0 / (deno * dim)).sqrt();
        if !err.is_finite() || !y_new.is_finite() {
            h *= 0.1;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(0.125);
        let fac = (fac11 / facold.powf(0.0) / SAFE).clamp(FACC2, FACC1);
        if err <= 1.0 {
            facold = err.max(1e-4);
            x = x_new;
            y = y_new;
            let m = y.max_norm();
            if m > opts.rescale_threshold {
                let s = 1.0 / opts.rescale_threshold;
                y.scale_by(s);
                log_scale += ln_threshold;
            } else if m > 0.0 && m < 1.0 / opts.rescale_threshold {
                y.scale_by(opts.rescale_threshold);
                log_scale -= ln_threshold;
            }
            k1 = y.deriv(eval_q(x)?);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = dir * h_new.abs().min(h.abs());
            }
            last_rejected = false;
            h = h_new;
        } else {
            h /= FACC1.min(fac11 / SAFE);
            last_rejected = true;
        }
    }
    Ok(finish(x1, &y, log_scale))
}

const SAFE: f64 = 0.9;
// step ratio limits: h_new / h in [1/3, 6]
const FACC1: f64 = 3.0;
const FACC2: f64 = 1.0 / 6.0;

// DOP853 tableau (Hairer, Norsett & Wanner).
const C2: f64 = 0.526_001_519_587_677_318_785_587_544_488e-1;
const C3: f64 = 0.789_002_279_381_515_978_178_381_316_732e-1;
const C4: f64 = 0.118_350_341_907_227_396_726_757_197_510;
const C5: f64 = 0.281_649_658_092_772_603_273_242_802_490;
const C6: f64 = 0.333_333_333_333_333_333_333_333_333_333;
const C7: f64 = 0.25;
const C8: f64 = 0.307_692_307_692_307_692_307_692_307_692;
const C9: f64 = 0.651_282_051_282_051_282_051_282_051_282;
const C10: f64 = 0.6;
const C11: f64 = 0.857_142_857_142_857_142_857_142_857_142;

const A21: f64 = 5.260_015_195_876_773_187_855_875_444_88e-2;
const A31: f64 = 1.972_505_698_453_789_945_445_953_291_83e-2;
const A32: f64 = 5.917_517_095_361_369_836_337_859_875_49e-2;
const A41: f64 = 2.958_758_547_680_684_918_168_929_937_75e-2;
const A43: f64 = 8.876_275_643_042_054_754_506_789_813_24e-2;
const A51: f64 = 2.413_651_341_592_666_855_023_697_986_65e-1;
const A53: f64 = -8.845_494_793_282_860_853_448_649_627_17e-1;
const A54: f64 = 9.248_340_032_617_920_031_157_379_665_43e-1;
const A61: f64 = 3.703_703_703_703_703_703_703_703_703_7e-2;
const A64: f64 = 1.708_286_087_294_738_712_796_044_821_73e-1;
const A65: f64 = 1.254_676_875_668_224_250_166_918_141_23e-1;
const A71: f64 = 3.710_937_5e-2;
const A74: f64 = 1.702_522_110_195_440_393_149_780_602_72e-1;
const A75: f64 = 6.021_653_898_045_596_068_502_193_972_83e-2;
const A76: f64 = -1.757_812_5e-2;
const A81: f64 = 3.709_200_011_850_479_271_087_793_198_36e-2;
const A84: f64 = 1.703_839_257_122_399_938_102_140_547_05e-1;
const A85: f64 = 1.072_620_304_463_732_846_518_091_991_68e-1;
const A86: f64 = -1.531_943_774_862_440_175_279_361_582_36e-2;
const A87: f64 = 8.273_789_163_814_022_887_584_737_660_02e-3;
const A91: f64 = 6.241_109_587_160_757_171_144_295_778_12e-1;
const A94: f64 = -3.360_892_629_446_941_294_068_571_098_25;
const A95: f64 = -8.682_193_468_417_260_068_181_898_914_53e-1;
const A96: f64 = 2.759_209_969_944_670_830_494_156_007_97e1;
const A97: f64 = 2.015_406_755_047_789_340_861_867_889_79e1;
const A98: f64 = -4.348_988_418_106_995_884_773_662_551_44e1;
const A101: f64 = 4.776_625_364_382_643_658_904_339_085_27e-1;
const A104: f64 = -2.488_114_619_971_667_641_926_425_864_68;
const A105: f64 = -5.902_908_268_368_429_963_714_464_757_43e-1;
const A106: f64 = 2.123_005_144_818_119_423_472_889_498_97e1;
const A107: f64 = 1.527_923_363_288_242_358_325_969_229_38e1;
const A108: f64 = -3.328_821_096_898_486_291_944_532_655_87e1;
const A109: f64 = -2.033_120_170_850_862_613_582_229_285_93e-2;
const A111: f64 = -9.371_424_300_859_873_257_170_402_165_8e-1;
const A114: f64 = 5.186_372_428_844_063_708_300_238_532_09;
const A115: f64 = 1.091_437_348_996_729_578_185_002_546_54;
const A116: f64 = -8.149_787_010_746_926_125_139_972_673_57;
const A117: f64 = -1.852_006_565_999_695_986_415_661_807_01e1;
const A118: f64 = 2.273_948_709_935_050_428_189_700_567_34e1;
const A119: f64 = 2.493_605_552_679_652_389_870_893_967_62;
const A1110: f64 = -3.046_764_471_898_219_500_382_366_902_2;
const A121: f64 = 2.273_310_147_516_538_207_923_597_684_49;
const A124: f64 = -1.053_449_546_673_725_019_840_666_898_79e1;
const A125: f64 = -2.000_872_058_224_862_499_096_757_184_44;
const A126: f64 = -1.795_893_186_311_879_891_727_659_505_34e1;
const A127: f64 = 2.794_888_452_941_996_005_084_998_088_37e1;
const A128: f64 = -2.858_998_277_135_023_694_740_655_086_74;
const A129: f64 = -8.872_856_933_530_629_544_332_892_892_58;
const A1210: f64 = 1.236_056_717_579_430_306_472_662_015_28e1;
const A1211: f64 = 6.433_927_460_157_635_303_559_704_840_46e-1;

const B1: f64 = 5.429_373_411_656_876_223_805_357_663_63e-2;
const B6: f64 = 4.450_312_892_752_408_881_441_139_505_66;
const B7: f64 = 1.891_517_899_314_500_383_042_815_990_44;
const B8: f64 = -5.801_203_960_010_584_781_467_211_422_7;
const B9: f64 = 3.111_643_669_578_198_944_089_160_623_7e-1;
const B10: f64 = -1.521_609_496_625_160_785_561_788_068_05e-1;
const B11: f64 = 2.013_654_008_040_303_483_747_765_375_01e-1;
const B12: f64 = 4.471_061_572_777_259_051_768_855_690_43e-2;

const BHH1: f64 = 0.244_094_488_188_976_377_952_755_905_512;
const BHH2: f64 = 0.733_846_688_281_611_857_341_361_741_547;
const BHH3: f64 = 0.220_588_235_294_117_647_058_823_529_412e-1;

const ER1: f64 = 0.131_200_449_941_948_807_325_010_299_6e-1;
const ER6: f64 = -0.122_515_644_637_620_444_072_056_975_3e1;
const ER7: f64 = -0.495_758_949_657_250_191_521_407_995_2;
const ER8: f64 = 0.166_437_718_245_498_653_696_153_041_5e1;
const ER9: f64 = -0.350_328_848_749_973_681_688_648_729;
const ER10: f64 = 0.334_179_118_713_017_479_029_731_884_1;
const ER11: f64 = 0.819_232_064_851_157_124_657_074_261_3e-1;
const ER12: f64 = -0.223_553_078_638_862_952_588_442_784_5e-1;

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn opts() -> OdeOptions {
        OdeOptions::default()
    }

    #[test]
    fn exponential_growth_is_cosh() {
        let s = propagate_ode(|_| c(-1.0), 0.0, 1.0, (c(1.0), c(0.0)), &opts()).unwrap();
        assert!((s.value().re - 1.0f64.cosh()).abs() < 1e-9);
        assert!((s.value().re - 1.543_080_6).abs() < 1e-7);
    }

    #[test]
    fn sine_to_quarter_period() {
        let s = propagate_ode(|_| c(1.0), 0.0, FRAC_PI_2, (c(0.0), c(1.0)), &opts()).unwrap();
        assert!((s.value() - c(1.0)).norm() <= 1e-9);
        assert!(s.derivative().norm() <= 1e-9);
    }

    #[test]
    fn harmonic_ground_state_outward() {
        // psi'' + (1 - x^2) psi = 0 has psi = exp(-x^2/2)
        let q = |x: f64| c(1.0 - x * x);
        let s = propagate_ode(q, 0.0, 5.0, (c(1.0), c(0.0)), &opts()).unwrap();
        let want = (-12.5f64).exp();
        assert!((s.value().re - want).abs() <= 1e-6, "{} vs {want}", s.value().re);
    }

    #[test]
    fn leftward_integration() {
        let s = propagate_ode(|_| c(1.0), 0.0, -FRAC_PI_2, (c(0.0), c(1.0)), &opts()).unwrap();
        assert!((s.value() + c(1.0)).norm() <= 1e-9);
    }

    #[test]
    fn rescaling_is_neutral() {
        let q = |x: f64| Complex64::new(-(x * x * x * x), 0.3 * x);
        let run = |thr: f64| {
            let o = OdeOptions {
                rescale_threshold: thr,
                ..opts()
            };
            propagate_ode(q, 0.0, 10.0, (c(1.0), c(0.5)), &o).unwrap()
        };
        let a = run(1e50);
        let b = run(1e200);
        assert!(a.log_scale > b.log_scale);
        // compare y e^{ls} in log form to avoid overflow
        let la = a.y.ln() + a.log_scale;
        let lb = b.y.ln() + b.log_scale;
        assert!((la.re - lb.re).abs() < 1e-9);
        assert!((la.im - lb.im).abs() < 1e-9);
    }

    #[test]
    fn linearity_in_initial_data() {
        let q = |x: f64| Complex64::new(2.0 - x * x, -0.4 * x * x * x);
        let base = propagate_ode(q, 0.0, 3.0, (c(1.0), Complex64::new(0.2, 0.1)), &opts()).unwrap();
        for alpha in [c(2.0), c(-1.0), Complex64::new(0.0, 1.0)] {
            let init = (alpha, alpha * Complex64::new(0.2, 0.1));
            let s = propagate_ode(q, 0.0, 3.0, init, &opts()).unwrap();
            let want = alpha * base.value();
            assert!((s.value() - want).norm() <= 1e-10 * want.norm());
        }
    }

    #[test]
    fn shared_scale_keeps_wronskian() {
        let q = |x: f64| Complex64::new(1.5 - x.powi(6), 0.0);
        let [u, v] = propagate_system(
            q,
            0.0,
            2.5,
            [(c(1.0), c(0.0)), (c(0.0), c(1.0))],
            &opts(),
        )
        .unwrap();
        assert_eq!(u.log_scale, v.log_scale);
        let terms = (u.y * v.yp).norm() + (u.yp * v.y).norm();
        let w = u.y * v.yp - u.yp * v.y;
        assert!((w - c(1.0)).norm() < 1e-8 * terms.max(1.0), "{w}");
    }

    #[test]
    fn nan_in_q_is_reported() {
        let q = |x: f64| if x > 0.5 { Complex64::new(f64::NAN, 0.0) } else { c(1.0) };
        let r = propagate_ode(q, 0.0, 1.0, (c(1.0), c(0.0)), &opts());
        assert!(matches!(r, Err(Error::NotANumber { .. })));
    }
}
