//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints exactly one PASS/FAIL line; failing sub-checks are listed beneath
//! their criterion. Exits nonzero if any criterion fails.

mod common;

use std::process::{Command, ExitCode};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::*;
use tcheb_design::design::{lambda_min, random_search_from, SearchConfig};
use tcheb_design::gram_schmidt::{orthogonalize, orthogonalize_det};
use tcheb_design::linalg::SymMatrix;
use tcheb_design::quadrature::InnerProductSpec;
use tcheb_design::tcheb::{
    approx_tcheb_function, exact_tcheb_function, TchebFunction, TchebOptions,
};
use tcheb_design::{criteria, tcheb_design, Design, WeightFn};

const TABLE_TOL: f64 = 5e-4;

#[derive(Default)]
struct Criterion {
    checks: usize,
    failures: Vec<String>,
}

impl Criterion {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn weight(src: &str) -> WeightFn {
    WeightFn::parse(src).expect("table weights parse")
}

fn approx(src: &str, m: usize) -> TchebFunction {
    approx_tcheb_function(m, &weight(src), (-1.0, 1.0), TchebOptions::default())
        .unwrap_or_else(|e| panic!("approximate κ for {src}, m = {m}: {e}"))
}

fn design_of(kappa: &TchebFunction) -> Design {
    tcheb_design(kappa, kappa.points())
        .expect("Tchebycheff design")
        .design
}

fn exact_for(src: &str, m: usize) -> TchebFunction {
    let &(_, alpha, beta) = DETTE
        .iter()
        .find(|(w, _, _)| *w == src)
        .expect("Dette weight");
    exact_tcheb_function(m, alpha, beta).expect("exact κ")
}

fn binary(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tchebdesign"))
        .args(args)
        .output()
        .expect("run tchebdesign");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 output"),
    )
}

fn compare_row(c: &mut Criterion, label: &str, row: &TableRow, d: &Design) {
    let ds = max_abs_diff(d.support(), row.support);
    c.check(ds <= TABLE_TOL, || {
        format!(
            "{label} {} m={}: support off by {ds:.3e} ({:?})",
            row.weight,
            row.m,
            d.support()
        )
    });
    let dm = max_abs_diff(d.masses(), row.masses);
    c.check(dm <= TABLE_TOL, || {
        format!(
            "{label} {} m={}: masses off by {dm:.3e} ({:?})",
            row.weight,
            row.m,
            d.masses()
        )
    });
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1() -> Criterion {
    let mut c = Criterion::default();
    for row in DETTE_ROWS {
        let exact = design_of(&exact_for(row.weight, row.m));
        compare_row(&mut c, "exact", row, &exact);
        let appr = design_of(&approx(row.weight, row.m));
        compare_row(&mut c, "approx", row, &appr);
    }
    let d = design_of(&exact_for("1", 3));
    let l = lambda_min(&d, 3, &WeightFn::unit()).unwrap();
    c.check((l - 0.2).abs() <= 1e-12, || {
        format!("w=1 m=3 λ_min = {l}, oracle 0.2")
    });
    c
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::default();
    for (src, m, want) in [
        ("1", 10, 1.671e-6),
        ("1-x", 3, 9.524e-2),
        ("1-x", 10, 9.463e-7),
        ("(1-x)*(1+x)", 3, 5.882e-2),
        ("(1-x)*(1+x)", 10, 5.593e-7),
    ] {
        let d = design_of(&exact_for(src, m));
        let l = lambda_min(&d, m, &weight(src)).unwrap();
        c.check(rel(l, want) <= 1e-3, || {
            format!("{src} m={m}: λ_min {l:.4e} vs {want:.3e}")
        });
    }
    c
}

fn criterion_3() -> Criterion {
    let mut c = Criterion::default();
    for row in APPROX_ROWS {
        let d = design_of(&approx(row.weight, row.m));
        compare_row(&mut c, "approx", row, &d);
        let l = lambda_min(&d, row.m, &weight(row.weight)).unwrap();
        c.check(rel(l, row.lambda_min) <= 1e-3, || {
            format!(
                "{} m={}: λ_min {l:.4e} vs reference {:.3e}",
                row.weight, row.m, row.lambda_min
            )
        });
    }
    c
}

fn criterion_4() -> Criterion {
    let mut c = Criterion::default();
    for (src, bounds) in [(SQ_WEIGHT, [2e-4, 1e-4]), ("exp(x)", [1e-5, 1e-5])] {
        let (code, out) = binary(&[
            "table",
            "--weight",
            src,
            "--m-list",
            "3",
            "10",
            "--with-efficiency",
            "--budget",
            "200000",
            "--seed",
            "1",
            "--format",
            "json",
        ]);
        c.check(code == 0, || format!("{src}: exit code {code}"));
        if code != 0 {
            continue;
        }
        let rows: Vec<Value> = serde_json::from_str(&out).expect("JSON table");
        for (row, bound) in rows.iter().zip(bounds) {
            let gap = row["reference"]["one_minus_efficiency"].as_f64().unwrap();
            let m = &row["request"]["m"];
            c.check(gap <= bound && gap >= -1e-12, || {
                format!("{src} m={m}: 1 - eff = {gap:.4e}, bound {bound:.0e}")
            });
        }
    }
    for (src, _, _) in DETTE {
        for m in [3, 10] {
            let appr = design_of(&approx(src, m));
            let exact = design_of(&exact_for(src, m));
            let w = weight(src);
            let gap = 1.0 - lambda_min(&appr, m, &w).unwrap() / lambda_min(&exact, m, &w).unwrap();
            c.check(gap.abs() <= 1e-8, || {
                format!("{src} m={m}: 1 - eff vs exact = {gap:.3e}")
            });
        }
    }
    c
}

fn criterion_5() -> Criterion {
    let mut c = Criterion::default();
    for src in TABLE_WEIGHTS {
        let spec = InnerProductSpec::with_default_nodes(-1.0, 1.0, weight(src)).unwrap();
        let seq = orthogonalize(8, &spec).unwrap();
        for (k, v) in seq.polys().iter().enumerate() {
            let det = orthogonalize_det(k + 1, &spec).unwrap();
            let n = v.coeffs().len().max(det.coeffs().len());
            let diff = (0..n)
                .map(|i| (v.coeff(i) - det.coeff(i)).abs())
                .fold(0.0, f64::max);
            c.check(diff <= 1e-6, || {
                format!("{src} v_{}: recurrence vs determinant {diff:.3e}", k + 1)
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let n = 1 + trial % 6;
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, rng.random_range(-1.0..1.0));
            }
        }
        let (got, want) = (m.min_eigenvalue(), min_eigenvalue_oracle(&m));
        c.check((got - want).abs() <= 1e-10, || {
            format!("matrix {trial}: Jacobi {got} vs bisection {want}")
        });
    }

    for (src, _, _) in DETTE {
        for m in 3..=10 {
            let (e, a) = (exact_for(src, m), approx(src, m));
            let sign = if e.eval(0.1).unwrap() * a.eval(0.1).unwrap() < 0.0 {
                -1.0
            } else {
                1.0
            };
            let diff = (0..=2000)
                .map(|i| -1.0 + i as f64 / 1000.0)
                .map(|x| (e.eval(x).unwrap() - sign * a.eval(x).unwrap()).abs())
                .fold(0.0, f64::max);
            c.check(diff <= 1e-6, || {
                format!("{src} m={m}: |κ - κ†| = {diff:.3e}")
            });
        }
    }
    c
}

fn criterion_6() -> Criterion {
    let mut c = Criterion::default();

    // quadrature exactness against closed-form Chebyshev moments
    let n = 8;
    let spec = InnerProductSpec::new(-1.0, 1.0, WeightFn::unit(), n).unwrap();
    let one = tcheb_design::Polynomial::constant(1.0);
    let mut moment = std::f64::consts::PI;
    for k in 0..2 * n {
        let want = if k % 2 == 0 { moment } else { 0.0 };
        let got = spec
            .inner_product(&tcheb_design::Polynomial::monomial(k), &one)
            .unwrap();
        c.check((got - want).abs() <= 1e-13, || {
            format!("quadrature x^{k}: {got} vs {want}")
        });
        if k % 2 == 0 {
            moment *= (k + 1) as f64 / (k + 2) as f64;
        }
    }

    // orthogonality of the Gram-Schmidt output
    for src in TABLE_WEIGHTS {
        let spec = InnerProductSpec::with_default_nodes(-1.0, 1.0, weight(src)).unwrap();
        let seq = orthogonalize(12, &spec).unwrap();
        let g = seq.gram_diag();
        for i in 0..seq.len() {
            for j in 0..i {
                let ip = spec
                    .inner_product(&seq.polys()[i], &seq.polys()[j])
                    .unwrap();
                c.check(ip.abs() <= 1e-8 * (g[i] * g[j]).sqrt(), || {
                    format!("{src}: ⟨v_{}, v_{}⟩ = {ip:.3e}", i + 1, j + 1)
                });
            }
        }
    }

    // equioscillation (Dette) and alternation (all table weights)
    for (src, _, _) in DETTE {
        for m in 3..=10 {
            let k = exact_for(src, m);
            let worst = k
                .points()
                .values()
                .iter()
                .map(|v| (v.abs() - 1.0).abs())
                .fold(0.0, f64::max);
            c.check(worst <= 1e-8, || {
                format!("{src} m={m}: |κ(s_i)| deviates from 1 by {worst:.3e}")
            });
        }
    }
    for src in TABLE_WEIGHTS {
        for m in 3..=10 {
            let k = approx(src, m);
            let v = k.points().values();
            let alternating = v.len() == m && v.windows(2).all(|p| p[0] * p[1] < 0.0);
            c.check(alternating, || {
                format!("{src} m={m}: extrema do not alternate: {v:?}")
            });
        }
    }

    // mirror and symmetry laws, λ_min·γᵀγ = 1, masses
    for m in 3..=10 {
        let minus = design_of(&exact_for("1-x", m));
        let plus = design_of(&exact_for("1+x", m));
        let mirrored = minus.mirrored();
        let diff = max_abs_diff(plus.support(), mirrored.support())
            .max(max_abs_diff(plus.masses(), mirrored.masses()));
        c.check(diff <= 1e-8, || format!("mirror m={m}: {diff:.3e}"));
        for src in ["1", "(1-x)*(1+x)", "1+x^2"] {
            let d = design_of(&approx(src, m));
            let r = d.mirrored();
            let diff =
                max_abs_diff(d.support(), r.support()).max(max_abs_diff(d.masses(), r.masses()));
            c.check(diff <= 1e-8, || format!("symmetry {src} m={m}: {diff:.3e}"));
        }
        for (src, _, _) in DETTE {
            let k = exact_for(src, m);
            let d = design_of(&k);
            let gg: f64 = k.gamma().iter().map(|g| g * g).sum();
            let prod = lambda_min(&d, m, &weight(src)).unwrap() * gg;
            c.check((prod - 1.0).abs() <= 1e-6, || {
                format!("{src} m={m}: λ_min·γᵀγ = {prod}")
            });
        }
        for src in TABLE_WEIGHTS {
            let d = design_of(&approx(src, m));
            let sum: f64 = d.masses().iter().sum();
            let ok = d.masses().iter().all(|&r| r >= 0.0) && (sum - 1.0).abs() <= 1e-12;
            c.check(ok, || format!("{src} m={m}: masses {:?}", d.masses()));
            let crit = criteria(&d, m, &weight(src)).unwrap();
            c.check(crit.e_value >= -1e-10, || {
                format!("{src} m={m}: λ_min {}", crit.e_value)
            });
        }
    }

    // search determinism and worker-count independence
    let w = weight(SQ_WEIGHT);
    let start = design_of(&approx(SQ_WEIGHT, 3));
    let mut cfg = SearchConfig::new(20_000, 1);
    let first = random_search_from(&start, 3, &w, (-1.0, 1.0), &cfg).unwrap();
    let second = random_search_from(&start, 3, &w, (-1.0, 1.0), &cfg).unwrap();
    c.check(first == second, || "search is not deterministic".into());
    cfg.workers = 4;
    let threaded = random_search_from(&start, 3, &w, (-1.0, 1.0), &cfg).unwrap();
    c.check(first == threaded, || {
        "search depends on the worker count".into()
    });

    // JSON byte stability
    let args = [
        "design",
        "--weight",
        "exp(x)",
        "--m",
        "5",
        "--with-efficiency",
        "--budget",
        "5000",
    ];
    let (a, b) = (binary(&args), binary(&args));
    c.check(a.0 == 0 && a == b, || {
        "design JSON differs between runs".into()
    });
    c
}

fn plot_points(out: &str) -> Vec<(f64, f64)> {
    out.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| {
            let (s, v) = l.split_once(',')?;
            Some((s.parse().ok()?, v.parse().ok()?))
        })
        .collect()
}

fn criterion_7() -> Criterion {
    let mut c = Criterion::default();
    let (code, out) = binary(&[
        "plotdata", "--weight", "1-x", "--m", "8", "--method", "jacobi",
    ]);
    c.check(code == 0, || format!("jacobi plotdata exit code {code}"));
    let pts = plot_points(&out);
    c.check(pts.len() == 8, || {
        format!("{} extrema instead of 8", pts.len())
    });
    let worst = pts
        .iter()
        .map(|(_, v)| (v.abs() - 1.0).abs())
        .fold(0.0, f64::max);
    c.check(worst <= 1e-8, || {
        format!("|κ| deviates from 1 by {worst:.3e}")
    });

    let (code, out) = binary(&["plotdata", "--weight", "(1-x)^1*(1.5+x)^0.5", "--m", "12"]);
    c.check(code == 0, || format!("approx plotdata exit code {code}"));
    let pts = plot_points(&out);
    c.check(pts.len() == 12, || {
        format!("{} extrema instead of 12", pts.len())
    });
    c.check(
        pts.windows(2)
            .all(|p| p[0].1 * p[1].1 < 0.0 && p[0].0 < p[1].0),
        || format!("extrema do not alternate: {pts:?}"),
    );
    let gap_line = out
        .lines()
        .find(|l| l.starts_with("# equioscillation gap:"));
    c.check(gap_line.is_some(), || {
        "no equioscillation gap reported".into()
    });
    if let Some(line) = gap_line {
        println!(
            "  (m = 12 figure configuration, {})",
            line.trim_start_matches("# ")
        );
    }
    c
}

type Suite = (&'static str, fn() -> Criterion);

fn main() -> ExitCode {
    let suites: [Suite; 7] = [
        ("Dette-family designs match the tables", criterion_1),
        ("Dette-family λ_min values", criterion_2),
        ("approximate designs for non-Dette weights", criterion_3),
        ("efficiency gaps", criterion_4),
        ("oracle equivalences", criterion_5),
        ("property suites", criterion_6),
        ("figure data", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in suites.iter().enumerate() {
        let c = run();
        let verdict = if c.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "criterion {}: {verdict}  {name} ({}/{} checks)",
            i + 1,
            c.checks - c.failures.len(),
            c.checks
        );
        for f in &c.failures {
            println!("    - {f}");
        }
        failed += usize::from(!c.failures.is_empty());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", suites.len());
        ExitCode::FAILURE
    }
}
