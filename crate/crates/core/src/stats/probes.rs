//! Frozen high-precision probe grid for the distribution tails.
//!
//! Expected values were computed once with an independent 60-digit
//! arbitrary-precision evaluation and frozen here. `selftest` checks the
//! kernel against this grid at 1e-10 relative error; it backs both the
//! test suite and the `stats selftest` CLI subcommand.

// the frozen constants intentionally carry more digits than f64 resolves
#![allow(clippy::excessive_precision)]

use super::special;

/// (x, k, expected survival probability)
pub const CHI2_SF: &[(f64, f64, f64)] = &[
    (0.5, 1.0, 0.479_500_122_186_953_46),
    (1.0, 1.0, 0.317_310_507_862_914_1),
    (3.841_458_820_694_124, 1.0, 0.050_000_000_000_000_06),
    (2.0, 2.0, 0.367_879_441_171_442_33),
    (5.0, 4.0, 0.287_297_495_183_645_8),
    (10.0, 5.0, 0.075_235_246_146_512_18),
    (23.2, 10.0, 0.010_031_938_382_424_134),
    (100.0, 50.0, 3.454_931_382_984_864e-5),
    (551.76, 1.0, 5.213_384_000_715_47e-122),
    (16.5, 16.0, 0.418_642_005_807_467_93),
    (11.0, 8.0, 0.201_699_198_702_528_64),
    (0.1, 3.0, 0.991_837_423_731_876_5),
    (75.0, 2.0, 5.175_555_005_801_869e-17),
];

/// (z, expected CDF)
pub const NORMAL_CDF: &[(f64, f64)] = &[
    (-5.0, 2.866_515_718_791_939e-7),
    (-2.5, 0.006_209_665_325_776_135),
    (-1.0, 0.158_655_253_931_457_05),
    (-0.5, 0.308_537_538_725_986_9),
    (0.0, 0.5),
    (0.5, 0.691_462_461_274_013_1),
    (1.0, 0.841_344_746_068_543),
    (1.959_963_984_540_054, 0.974_999_999_999_999_99),
    (4.0, 0.999_968_328_758_166_88),
];

/// (t, df, expected upper-tail probability)
pub const T_SF: &[(f64, f64, f64)] = &[
    (1.0, 1.0, 0.25),
    (2.0, 5.0, 0.050_969_739_414_929_18),
    (2.5, 10.0, 0.015_723_422_118_304_402),
    (-1.5, 7.0, 0.911_350_756_505_015),
    (0.0, 12.0, 0.5),
    (2.449_489_742_783_178, 6.0, 0.024_912_631_390_288_39),
    (1.885_618_083_164_126_7, 2.0, 0.100_000_000_000_000_001),
    (3.0, 29.0, 0.002_749_596_066_951_703),
    (5.0, 100.0, 1.225_086_706_751_900_2e-6),
];

/// (f, d1, d2, expected survival probability)
pub const F_SF: &[(f64, f64, f64, f64)] = &[
    (1.0, 2.0, 3.0, 0.464_758_001_544_890_03),
    (3.5, 4.0, 20.0, 0.025_385_230_866_441_275),
    (10.0, 5.0, 50.0, 1.128_506_310_290_626_2e-6),
    (27.0, 2.0, 6.0, 0.001),
    (0.5, 10.0, 10.0, 0.855_154_193_974_495_8),
    (6.0, 1.0, 6.0, 0.049_825_262_780_576_764),
    (2.2, 8.0, 120.0, 0.031_970_418_961_182_973),
];

/// (x, k, expected log10 of survival probability), for tails below f64 range
pub const CHI2_LOG10_SF: &[(f64, f64, f64)] = &[
    (551.76, 1.0, -121.282_880_285_191_96),
    (2807.4, 1.0, -611.441_530_892_713_2),
    (3000.0, 4.0, -648.265_342_162_634_5),
];

/// (z, expected log10 of survival probability)
pub const NORMAL_LOG10_SF: &[(f64, f64)] = &[
    (10.0, -23.118_053_405_486_076),
    (20.0, -88.560_095_343_075_59),
    (38.0, -315.539_789_703_962_5),
    (40.0, -349.437_006_459_345_84),
];

/// (t, df, expected log10 of upper-tail probability)
pub const T_LOG10_SF: &[(f64, f64, f64)] = &[
    (52.36, 226_936.0, -593.872_618_757_929_9),
    (60.0, 1_000_000.0, -782.502_902_806_729_1),
];

/// Outcome of one probe evaluation.
#[derive(Debug, Clone)]
pub struct ProbeOutcome {
    pub family: &'static str,
    pub params: String,
    pub expected: f64,
    pub got: f64,
    pub rel_err: f64,
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// Evaluate the whole grid; every entry must sit within `tol` relative error.
pub fn run_probe_grid() -> Vec<ProbeOutcome> {
    let mut out = Vec::new();
    for &(x, k, want) in CHI2_SF {
        let got = special::chi2_sf(x, k);
        out.push(ProbeOutcome {
            family: "chi2_sf",
            params: format!("x={x}, k={k}"),
            expected: want,
            got,
            rel_err: rel_err(got, want),
        });
    }
    for &(z, want) in NORMAL_CDF {
        let got = special::normal_cdf(z);
        out.push(ProbeOutcome {
            family: "normal_cdf",
            params: format!("z={z}"),
            expected: want,
            got,
            rel_err: rel_err(got, want),
        });
    }
    for &(t, df, want) in T_SF {
        let got = special::t_sf(t, df);
        out.push(ProbeOutcome {
            family: "t_sf",
            params: format!("t={t}, df={df}"),
            expected: want,
            got,
            rel_err: rel_err(got, want),
        });
    }
    for &(f, d1, d2, want) in F_SF {
        let got = special::f_sf(f, d1, d2);
        out.push(ProbeOutcome {
            family: "f_sf",
            params: format!("f={f}, d1={d1}, d2={d2}"),
            expected: want,
            got,
            rel_err: rel_err(got, want),
        });
    }
    for &(x, k, want) in CHI2_LOG10_SF {
        let got = special::log10_chi2_sf(x, k);
        out.push(ProbeOutcome {
            family: "log10_chi2_sf",
            params: format!("x={x}, k={k}"),
            expected: want,
            got,
            rel_err: rel_err(got, want),
        });
    }
    for &(z, want) in NORMAL_LOG10_SF {
        let got = special::log10_normal_sf(z);
        out.push(ProbeOutcome {
            family: "log10_normal_sf",
            params: format!("z={z}"),
            expected: want,
            got,
            rel_err: rel_err(got, want),
        });
    }
    for &(t, df, want) in T_LOG10_SF {
        let got = special::log10_t_sf(t, df);
        out.push(ProbeOutcome {
            family: "log10_t_sf",
            params: format!("t={t}, df={df}"),
            expected: want,
            got,
            rel_err: rel_err(got, want),
        });
    }
    out
}

/// Maximum relative error across the probe grid.
pub fn max_probe_error() -> f64 {
    run_probe_grid()
        .iter()
        .map(|p| p.rel_err)
        .fold(0.0, f64::max)
}
