//! Globally adaptive Gauss–Kronrod integration on intervals.

use crate::error::{Error, Result};
use crate::scalar::Real;

// 21-point Kronrod extension of the 10-point Gauss rule (abscissae > 0, then 0).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_808_316_521,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// An integral estimate with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
}

#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> AdaptiveOptions<T> {
    pub fn absolute(tol: T) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: T::zero(),
            max_subdivisions: 4000,
        }
    }

    pub fn relative(tol: T) -> Self {
        Self {
            abs_tol: T::min_positive_value(),
            rel_tol: tol,
            max_subdivisions: 4000,
        }
    }
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    res_abs: T,
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    // Nodes that round onto the panel ends are skipped when f blows up there.
    let mut eval = |x: T| {
        let v = f(x);
        if !v.is_finite() && (x == a || x == b) {
            T::zero()
        } else {
            v
        }
    };
    let fc = eval(center);
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let x = half_len * T::lit(XGK[j]);
        let f1 = eval(center - x);
        let f2 = eval(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + T::lit(WGK[j]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let ratio = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if ratio < T::one() { res_asc * ratio } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor > err {
        err = floor;
    }
    Panel {
        a,
        b,
        value,
        error: err,
        res_abs,
    }
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// Intervals with the largest error estimate are bisected until the summed
/// error is below `max(abs_tol, rel_tol·|I|)`. Tolerances below the
/// rounding level of the summed integrand are raised to that level.
pub fn integrate_adaptive<T, F>(mut f: F, a: T, b: T, opts: AdaptiveOptions<T>) -> Result<Integral<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
        });
    }
    let mut panels = vec![kronrod(&mut f, a, b)];
    loop {
        let value: T = panels.iter().map(|p| p.value).sum();
        let error: T = panels.iter().map(|p| p.error).sum();
        let res_abs: T = panels.iter().map(|p| p.res_abs).sum();
        let target = opts
            .abs_tol
            .max(opts.rel_tol * value.abs())
            .max(T::lit(64.0) * T::epsilon() * res_abs);
        if !(value.is_finite() && error.is_finite()) {
            return Err(Error::Convergence {
                estimate: value.as_f64(),
                error: error.as_f64(),
                tol: target.as_f64(),
            });
        }
        if error <= target {
            return Ok(Integral { value, error });
        }
        let (worst, _) =
            panels.iter().enumerate().fold(
                (0, T::neg_infinity()),
                |acc, (i, p)| {
                    if p.error > acc.1 {
                        (i, p.error)
                    } else {
                        acc
                    }
                },
            );
        let p = panels.swap_remove(worst);
        let mid = T::lit(0.5) * (p.a + p.b);
        let resolvable = mid > p.a.min(p.b) && mid < p.a.max(p.b);
        if panels.len() + 2 > opts.max_subdivisions || !resolvable {
            return Err(Error::Convergence {
                estimate: value.as_f64(),
                error: error.as_f64(),
                tol: target.as_f64(),
            });
        }
        panels.push(kronrod(&mut f, p.a, mid));
        panels.push(kronrod(&mut f, mid, p.b));
    }
}

/// Adaptive integration with an absolute tolerance; errors when the
/// estimate stalls above `tol`.
pub fn integrate_radial<T, F>(f: F, a: T, b: T, tol: T) -> Result<Integral<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if a > b {
        return Err(Error::domain("a", a.as_f64(), "lower limit exceeds upper limit"));
    }
    integrate_adaptive(f, a, b, AdaptiveOptions::absolute(tol))
}

/// Integrates over `[a, b]` split at the given interior breakpoints, each
/// piece adaptively with the tolerance shared in proportion to its length.
pub fn integrate_pieces<T, F>(mut f: F, a: T, b: T, breakpoints: &[T], opts: AdaptiveOptions<T>) -> Result<Integral<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let mut cuts: Vec<T> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    cuts.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * (b - a));
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);
    let width = b - a;
    let mut total = Integral {
        value: T::zero(),
        error: T::zero(),
    };
    for w in edges.windows(2) {
        let share = (w[1] - w[0]) / width;
        let piece_opts = AdaptiveOptions {
            abs_tol: (opts.abs_tol * share).max(T::min_positive_value()),
            rel_tol: opts.rel_tol,
            max_subdivisions: opts.max_subdivisions,
        };
        let part = integrate_adaptive(&mut f, w[0], w[1], piece_opts)?;
        total.value = total.value + part.value;
        total.error = total.error + part.error;
    }
    Ok(total)
}

/// `∫_a^b f(r) dr` for `b < 1` where `f` blows up as `r → 1`, after the
/// substitution `r = 1 − e^{−u}`.
pub fn integrate_toward_unit<T, F>(mut f: F, a: T, b: T, tol: T) -> Result<Integral<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(a <= b && b < T::one()) {
        return Err(Error::domain("b", b.as_f64(), "need a <= b < 1"));
    }
    let ua = -(-a).ln_1p();
    let ub = -(-b).ln_1p();
    integrate_adaptive(
        |u: T| {
            let decay = (-u).exp();
            f(-(-u).exp_m1()) * decay
        },
        ua,
        ub,
        AdaptiveOptions {
            abs_tol: tol,
            rel_tol: T::zero(),
            max_subdivisions: 4000,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_through_degree_31() {
        for k in 0..=31 {
            let mut f = |x: f64| x.powi(k);
            let p = kronrod(&mut f, -1.0, 1.0);
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((p.value - exact).abs() < 1e-14, "degree {k}: {}", p.value);
        }
    }

    #[test]
    fn embedded_gauss_rule_is_exact_through_degree_19() {
        for k in (0..=19).step_by(2) {
            let g: f64 = (0..5).map(|j| 2.0 * WG[j] * XGK[2 * j + 1].powi(k as i32)).sum();
            assert!((g - 2.0 / (k as f64 + 1.0)).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn polynomial_and_trig() {
        let i = integrate_radial(|t: f64| t * t, 0.0, 1.0, 1e-12).unwrap();
        assert!((i.value - 1.0 / 3.0).abs() < 1e-14);
        let i = integrate_radial(f64::sin, 0.0, std::f64::consts::FRAC_PI_2, 1e-12).unwrap();
        assert!((i.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_rational_integrand() {
        // antiderivative 1/(2(1-r²)) - 1/2
        let expected = 0.5 * (1.0 / (1.0 - 0.81) - 1.0);
        let i = integrate_radial(|r: f64| r / (1.0 - r * r).powi(2), 0.0, 0.9, 1e-12).unwrap();
        assert!((i.value - expected).abs() < 1e-11);
        assert!((expected - 2.131_578_9).abs() < 1e-7);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let i = integrate_adaptive(
            |t: f64| 1.0 / (1.0 - t * t).sqrt(),
            0.0,
            1.0,
            AdaptiveOptions::absolute(1e-6),
        )
        .unwrap();
        assert!((i.value - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn stalls_are_reported() {
        let r = integrate_adaptive(
            |t: f64| 1.0 / t,
            0.0,
            1.0,
            AdaptiveOptions {
                abs_tol: 1e-10,
                rel_tol: 0.0,
                max_subdivisions: 50,
            },
        );
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }

    #[test]
    fn pieces_handle_jumps() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let i = integrate_pieces(step, 0.0, 1.0, &[0.3], AdaptiveOptions::absolute(1e-14)).unwrap();
        assert!((i.value - 1.7).abs() < 1e-14);
    }

    #[test]
    fn unit_endpoint_substitution() {
        // ∫_0^t r/(1-r²)² = 1/(2(1-t²)) - 1/2
        let t = 0.999;
        let i = integrate_toward_unit(|r: f64| r / (1.0 - r * r).powi(2), 0.0, t, 1e-9).unwrap();
        let exact = 0.5 / (1.0 - t * t) - 0.5;
        assert!((i.value - exact).abs() < 1e-8 * exact);
    }
}
