//! Golden closed-form tables shared by the `tables` and `acceptance`
//! integration targets: 20 rows each for the regular and fixed-trace
//! smallest-eigenvalue densities at desk scale (n = 2..5, α = 0..4),
//! all compared with exact rational equality after polynomial expansion.

use num_bigint::BigInt;
use num_rational::BigRational;
use wishart_smin::params::EnsembleParams;
use wishart_smin::rational::RationalPolynomial;
use wishart_smin::{ft_closed_form, smin_closed_form, FtForm};

/// Regular-ensemble rows `(n, m, den, bracket)`: the density polynomial
/// part (the factor multiplying `e^{−nx}`) equals `x^{m−n}·bracket/den`
/// with `bracket` listed in ascending powers.
pub const REGULAR_ROWS: &[(u32, u32, i128, &[i128])] = &[
    (2, 3, 1, &[3, 1]),
    (2, 4, 6, &[12, 6, 1]),
    (2, 5, 72, &[60, 36, 9, 1]),
    (2, 6, 1440, &[360, 240, 72, 12, 1]),
    (3, 4, 2, &[12, 8, 1]),
    (3, 5, 48, &[240, 240, 96, 16, 1]),
    (3, 6, 2880, &[7200, 8640, 4680, 1440, 252, 24, 1]),
    (
        3,
        7,
        345600,
        &[302400, 403200, 253440, 97920, 25200, 4320, 480, 32, 1],
    ),
    (4, 5, 6, &[60, 60, 15, 1]),
    (4, 6, 720, &[7200, 10800, 6840, 2160, 360, 30, 1]),
    (
        4,
        7,
        259200,
        &[
            1512000, 2721600, 2268000, 1130400, 360720, 75600, 10380, 900, 45, 1,
        ],
    ),
    (
        4,
        8,
        217728000,
        &[
            508032000,
            1016064000,
            972518400,
            586656000,
            246456000,
            74995200,
            16790400,
            2773440,
            334800,
            28800,
            1680,
            60,
            1,
        ],
    ),
    (5, 6, 24, &[360, 480, 180, 24, 1]),
    (
        5,
        7,
        17280,
        &[302400, 604800, 524160, 241920, 64800, 10320, 960, 48, 1],
    ),
    (
        5,
        8,
        43545600,
        &[
            508032000,
            1219276800,
            1371686400,
            943488000,
            432734400,
            137894400,
            31157280,
            5019840,
            572400,
            45120,
            2340,
            72,
            1,
        ],
    ),
    (
        5,
        9,
        292626432000,
        &[
            1536288768000,
            4096770048000,
            5267275776000,
            4316239872000,
            2506629888000,
            1083937075200,
            358177075200,
            91755417600,
            18353563200,
            2870380800,
            349493760,
            32780160,
            2323440,
            120480,
            4320,
            96,
            1,
        ],
    ),
];

/// Fixed-trace rows `(n, m, constant, xpow, factors)` where each factor is
/// `(ascending coefficients, power)`; the expanded density equals
/// `constant · x^xpow · Π factorᵢ^powerᵢ`.
pub struct FtRow {
    pub n: u32,
    pub m: u32,
    pub constant: i128,
    pub xpow: usize,
    pub factors: &'static [(&'static [i128], u32)],
}

pub const FT_ROWS: &[FtRow] = &[
    FtRow {
        n: 2,
        m: 3,
        constant: 60,
        xpow: 1,
        factors: &[(&[1, -1], 1), (&[1, -2], 2)],
    },
    FtRow {
        n: 2,
        m: 4,
        constant: 420,
        xpow: 2,
        factors: &[(&[1, -1], 2), (&[1, -2], 2)],
    },
    FtRow {
        n: 2,
        m: 5,
        constant: 2520,
        xpow: 3,
        factors: &[(&[1, -1], 3), (&[1, -2], 2)],
    },
    FtRow {
        n: 2,
        m: 6,
        constant: 13860,
        xpow: 4,
        factors: &[(&[1, -1], 4), (&[1, -2], 2)],
    },
    FtRow {
        n: 3,
        m: 4,
        constant: 660,
        xpow: 1,
        factors: &[(&[1, 0, -3], 1), (&[1, -3], 7)],
    },
    FtRow {
        n: 3,
        m: 5,
        constant: 10920,
        xpow: 2,
        factors: &[(&[1, -1, -1, -9, 15], 1), (&[1, -3], 7)],
    },
    FtRow {
        n: 3,
        m: 6,
        constant: 28560,
        xpow: 3,
        factors: &[(&[5, -12, 12, -48, -48, 432, -411], 1), (&[1, -3], 7)],
    },
    FtRow {
        n: 3,
        m: 7,
        constant: 1627920,
        xpow: 4,
        factors: &[
            (&[1, -4, 8, -16, 0, 0, 320, -756, 489], 1),
            (&[1, -3], 7),
        ],
    },
    FtRow {
        n: 4,
        m: 5,
        constant: 3420,
        xpow: 1,
        factors: &[(&[1, 5, -20, 4], 1), (&[1, -4], 14)],
    },
    FtRow {
        n: 4,
        m: 6,
        constant: 106260,
        xpow: 2,
        factors: &[(&[1, 6, 1, -204, 486, -424, 356], 1), (&[1, -4], 14)],
    },
    FtRow {
        n: 4,
        m: 7,
        constant: 491400,
        xpow: 3,
        factors: &[
            (
                &[5, 27, 51, -683, -5286, 35910, -85295, 116895, -79980, -9196],
                1,
            ),
            (&[1, -4], 14),
        ],
    },
    FtRow {
        n: 4,
        m: 8,
        constant: 6796440,
        xpow: 4,
        factors: &[
            (
                &[
                    7, 28, 86, -540, -6775, -18416, 440876, -2012008, 4901710, -7145600, 5855692,
                    -3288592, 2386196,
                ],
                1,
            ),
            (&[1, -4], 14),
        ],
    },
    FtRow {
        n: 5,
        m: 6,
        constant: 12180,
        xpow: 1,
        factors: &[(&[1, 16, -39, -140, 220], 1), (&[1, -5], 23)],
    },
    FtRow {
        n: 5,
        m: 7,
        constant: 628320,
        xpow: 2,
        factors: &[
            (&[1, 22, 142, -1234, -580, 4676, 29788, -92420, 75355], 1),
            (&[1, -5], 23),
        ],
    },
    FtRow {
        n: 5,
        m: 8,
        constant: 23030280,
        xpow: 3,
        factors: &[
            (
                &[
                    1, 24, 243, 280, -19962, 50208, -31022, 649056, -1420095, -7867032, 35763831,
                    -53675640, 27627140,
                ],
                1,
            ),
            (&[1, -5], 23),
        ],
    },
    FtRow {
        n: 5,
        m: 9,
        constant: 97740720,
        xpow: 4,
        factors: &[
            (
                &[
                    7,
                    168,
                    1968,
                    9642,
                    -75517,
                    -1457898,
                    10143328,
                    -31939648,
                    134132583,
                    -323536148,
                    -511260568,
                    786421818,
                    22191959881,
                    -105911938466,
                    211492028376,
                    -203837200540,
                    80216630930,
                ],
                1,
            ),
            (&[1, -5], 23),
        ],
    },
];

fn poly_from_i128(coeffs: &[i128]) -> RationalPolynomial {
    RationalPolynomial::from_coeffs(
        coeffs
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect(),
    )
}

fn poly_pow(base: &RationalPolynomial, e: u32) -> RationalPolynomial {
    let mut acc = RationalPolynomial::one();
    for _ in 0..e {
        acc = acc.mul(base);
    }
    acc
}

/// Expected regular-ensemble density polynomial for one golden row.
pub fn regular_reference(den: i128, bracket: &[i128], alpha: u32) -> RationalPolynomial {
    poly_from_i128(bracket)
        .scale(&BigRational::new(BigInt::from(1), BigInt::from(den)))
        .shift_up(alpha as usize)
}

/// Expected fixed-trace expanded density polynomial for one golden row.
pub fn ft_reference(row: &FtRow) -> RationalPolynomial {
    let mut acc =
        RationalPolynomial::constant(BigRational::from_integer(BigInt::from(row.constant)))
            .shift_up(row.xpow);
    for (coeffs, power) in row.factors {
        acc = acc.mul(&poly_pow(&poly_from_i128(coeffs), *power));
    }
    acc
}

/// Square-case regular density polynomial: the single coefficient `n`.
pub fn regular_square_reference(n: u32) -> RationalPolynomial {
    RationalPolynomial::constant(BigRational::from_integer(BigInt::from(n)))
}

/// Square-case fixed-trace density: `n(n²−1)(1−nx)^{n²−2}`.
pub fn ft_square_reference(n: u32) -> RationalPolynomial {
    let c = i128::from(n) * (i128::from(n) * i128::from(n) - 1);
    poly_pow(&poly_from_i128(&[1, -i128::from(n)]), n * n - 2)
        .scale(&BigRational::from_integer(BigInt::from(c)))
}

/// Check every golden row of both tables; returns the list of mismatching
/// row labels (empty means all 40 rows reproduce exactly).
pub fn check_all_rows() -> Vec<String> {
    let mut bad = Vec::new();
    for &(n, m, den, bracket) in REGULAR_ROWS {
        let params = EnsembleParams::new(n, m).expect("valid row");
        let got = smin_closed_form(params).expect("construction").density_polynomial();
        let expect = regular_reference(den, bracket, params.alpha());
        if !got.sub(&expect).is_zero() {
            bad.push(format!("regular ({n},{m})"));
        }
    }
    for n in 2..=5u32 {
        let params = EnsembleParams::new(n, n).expect("valid square");
        let got = smin_closed_form(params).expect("construction").density_polynomial();
        if !got.sub(&regular_square_reference(n)).is_zero() {
            bad.push(format!("regular square ({n},{n})"));
        }
    }
    for row in FT_ROWS {
        let params = EnsembleParams::new(row.n, row.m).expect("valid row");
        let FtForm::Density(form) = ft_closed_form(params).expect("construction") else {
            bad.push(format!("fixed-trace ({},{}) degenerate", row.n, row.m));
            continue;
        };
        let got = form.expanded_polynomial();
        if !got.sub(&ft_reference(row)).is_zero() {
            bad.push(format!("fixed-trace ({},{})", row.n, row.m));
        }
    }
    for n in 2..=5u32 {
        let params = EnsembleParams::new(n, n).expect("valid square");
        let FtForm::Density(form) = ft_closed_form(params).expect("construction") else {
            bad.push(format!("fixed-trace square ({n},{n}) degenerate"));
            continue;
        };
        if !form
            .expanded_polynomial()
            .sub(&ft_square_reference(n))
            .is_zero()
        {
            bad.push(format!("fixed-trace square ({n},{n})"));
        }
    }
    bad
}
