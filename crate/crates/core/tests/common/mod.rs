#![allow(dead_code, clippy::approx_constant)]

use tcheb_design::linalg::SymMatrix;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let c = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += c * f(a + h * i as f64);
    }
    sum * h / 3.0
}

/// `∫_a^b g(x) / √((x-a)(b-x)) dx` through `x = mid + half·cos θ`, which
/// removes the endpoint singularity.
pub fn chebyshev_integral(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    simpson(
        |t| g(mid + half * t.cos()),
        0.0,
        std::f64::consts::PI,
        panels,
    )
}

/// Number of eigenvalues of `m` below `sigma`, from the signs of the pivots
/// of `m - σI` (Sylvester's law of inertia; the pivots are ratios of
/// consecutive leading principal minors of the characteristic matrix).
pub fn count_below(m: &SymMatrix, sigma: f64) -> usize {
    let n = m.order();
    let mut a: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            m.get(i, j) - if i == j { sigma } else { 0.0 }
        })
        .collect();
    let mut negatives = 0;
    for k in 0..n {
        let mut pivot = a[k * n + k];
        if pivot == 0.0 {
            pivot = -1e-300;
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    negatives
}

/// Smallest eigenvalue by bisection on the inertia count.
pub fn min_eigenvalue_oracle(m: &SymMatrix) -> f64 {
    // Gershgorin bounds
    let n = m.order();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r: f64 = (0..n).filter(|&j| j != i).map(|j| m.get(i, j).abs()).sum();
        lo = lo.min(m.get(i, i) - r);
        hi = hi.max(m.get(i, i) + r);
    }
    let (mut lo, mut hi) = (lo - 1e-12, hi + 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(m, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// A reference design row: `(w, m, support, masses, λ_min)`.
pub struct TableRow {
    pub weight: &'static str,
    pub m: usize,
    pub support: &'static [f64],
    pub masses: &'static [f64],
    pub lambda_min: f64,
}

pub const DETTE_ROWS: &[TableRow] = &[
    TableRow {
        weight: "1",
        m: 3,
        support: &[-1.0, 0.0, 1.0],
        masses: &[0.2, 0.6, 0.2],
        // oracle value; the tabulated 4.000e-1 is off by a factor of two
        lambda_min: 0.2,
    },
    TableRow {
        weight: "1",
        m: 10,
        support: &[
            -1.0, -0.9397, -0.7660, -0.5000, -0.1736, 0.1736, 0.5000, 0.7660, 0.9397, 1.0,
        ],
        masses: &[
            0.04011, 0.08563, 0.1020, 0.1263, 0.1460, 0.1460, 0.1263, 0.1020, 0.08563, 0.04011,
        ],
        lambda_min: 1.671e-6,
    },
    TableRow {
        weight: "1-x",
        m: 3,
        support: &[-1.0, -0.3090, 0.8090],
        masses: &[0.1238, 0.3955, 0.4807],
        lambda_min: 9.524e-2,
    },
    TableRow {
        weight: "1-x",
        m: 10,
        support: &[
            -1.0, -0.9458, -0.7891, -0.5469, -0.2455, 0.08258, 0.4017, 0.6773, 0.8795, 0.9864,
        ],
        masses: &[
            0.03642, 0.07706, 0.09006, 0.1108, 0.1321, 0.1410, 0.1311, 0.1099, 0.09082, 0.08071,
        ],
        lambda_min: 9.463e-7,
    },
    TableRow {
        weight: "1+x",
        m: 3,
        support: &[-0.8090, 0.3090, 1.0],
        masses: &[0.4807, 0.3955, 0.1238],
        lambda_min: 9.524e-2,
    },
    TableRow {
        weight: "1+x",
        m: 10,
        support: &[
            -0.9864, -0.8795, -0.6773, -0.4017, -0.08258, 0.2455, 0.5469, 0.7891, 0.9458, 1.0,
        ],
        // third mass taken from the mirrored 1-x row (tabulated as 0.01099)
        masses: &[
            0.08071, 0.09082, 0.1099, 0.1311, 0.1410, 0.1321, 0.1108, 0.09006, 0.07706, 0.03642,
        ],
        lambda_min: 9.463e-7,
    },
    TableRow {
        weight: "(1-x)*(1+x)",
        m: 3,
        support: &[-0.8660, 0.0, 0.8660],
        masses: &[0.3137, 0.3725, 0.3137],
        lambda_min: 5.882e-2,
    },
    TableRow {
        weight: "(1-x)*(1+x)",
        m: 10,
        support: &[
            -0.9877, -0.8910, -0.7071, -0.4540, -0.1564, 0.1564, 0.4540, 0.7071, 0.8910, 0.9877,
        ],
        masses: &[
            0.07329, 0.08127, 0.09702, 0.1169, 0.1315, 0.1315, 0.1169, 0.09702, 0.08127, 0.07329,
        ],
        lambda_min: 5.593e-7,
    },
];

pub const SQ_WEIGHT: &str = "(1-x)^0.5*(2+x)^0.5";

pub const APPROX_ROWS: &[TableRow] = &[
    TableRow {
        weight: SQ_WEIGHT,
        m: 3,
        support: &[-1.0, -0.1252, 0.9215],
        masses: &[0.1721, 0.4896, 0.3383],
        lambda_min: 7.693e-3,
    },
    TableRow {
        weight: SQ_WEIGHT,
        m: 10,
        support: &[
            -1.0, -0.9407, -0.7710, -0.5126, -0.1969, 0.1396, 0.4592, 0.7269, 0.9118, 0.9949,
        ],
        masses: &[
            0.03909, 0.08305, 0.09785, 0.1201, 0.1395, 0.1423, 0.1261, 0.1031, 0.08509, 0.06379,
        ],
        lambda_min: 1.714e-6,
    },
    TableRow {
        weight: "exp(x)",
        m: 3,
        support: &[-1.0, 0.2405, 1.0],
        masses: &[0.3204, 0.5360, 0.1436],
        lambda_min: 1.976e-1,
    },
    TableRow {
        weight: "exp(x)",
        m: 10,
        support: &[
            -1.0, -0.9326, -0.7416, -0.4566, -0.1190, 0.2267, 0.5399, 0.7876, 0.9457, 1.0,
        ],
        masses: &[
            0.04351, 0.09338, 0.1119, 0.1360, 0.1494, 0.1404, 0.1164, 0.09315, 0.07880, 0.03710,
        ],
        lambda_min: 1.660e-6,
    },
];

/// The six reference-table weights.
pub const TABLE_WEIGHTS: [&str; 6] = ["1", "1-x", "1+x", "(1-x)*(1+x)", SQ_WEIGHT, "exp(x)"];

/// `(α, β)` of the Dette-family weights in [`TABLE_WEIGHTS`] order.
pub const DETTE: [(&str, u8, u8); 4] = [
    ("1", 0, 0),
    ("1-x", 1, 0),
    ("1+x", 0, 1),
    ("(1-x)*(1+x)", 1, 1),
];

/// Largest absolute elementwise difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
