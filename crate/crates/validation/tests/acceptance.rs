//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tempfile::TempDir;
use twistmodel::{run, CommandOutcome};
use twistmodel_core::actuator::{
    motion_mode, potential_gradient, predict_twist_curve, predict_twist_curve_with, solve_equilibrium,
    solve_equilibrium_full_newton, total_potential, twist_radius, ActuatorGeometry, EquilibriumState, MaterialModel,
    MotionMode, Potential, StartStrategy, STATE_DIM,
};
use twistmodel_core::mocap::{sweep_volume, write_trajectories, write_trials, TrialSet};
use twistmodel_core::numerics::{
    convex_hull_3d, finite_diff_gradient, fit_circle_2d, hull_volume, is_positive_definite, Hull3D, Point3,
    SolverSettings,
};
use twistmodel_core::synthetic;

type Verdict = (bool, String);
type Criterion = (&'static str, &'static str, fn() -> Verdict);

const SWEEP: [f64; 13] = [18.0, 19.0, 20.0, 21.0, 22.0, 23.0, 24.0, 25.0, 26.0, 27.0, 28.0, 29.0, 30.0];

fn model() -> (ActuatorGeometry, MaterialModel) {
    (ActuatorGeometry::reference(), MaterialModel::REFERENCE)
}

fn gradient_correctness() -> Verdict {
    let (geom, mat) = model();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let state = EquilibriumState {
            e11: rng.gen_range(-0.05..0.05),
            e22: rng.gen_range(-0.05..0.05),
            e33: rng.gen_range(-0.05..0.05),
            k1: rng.gen_range(-0.005..0.005),
            k2: rng.gen_range(-0.005..0.005),
            q: rng.gen_range(-0.005..0.005),
            phi: rng.gen_range(0.0..PI),
        };
        let p = rng.gen_range(0.0..30.0);
        let g = potential_gradient(&geom, &mat, &state, p).unwrap();
        let fd = finite_diff_gradient(
            |x| total_potential(&geom, &mat, &EquilibriumState::from_slice(x), p).unwrap(),
            &state.to_array(),
            1e-6,
        );
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = g.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst = worst.max(err / scale);
    }
    (worst < 1e-5, format!("worst relative error {worst:.2e} over 100 random states"))
}

fn equilibrium_validity() -> Verdict {
    let (geom, mat) = model();
    let mut worst = 0.0f64;
    let mut all_spd = true;
    for p in SWEEP {
        let sol = solve_equilibrium(&geom, &mat, p, None).unwrap();
        worst = worst.max(sol.diagnostics.residual);
        let pot = Potential::new(&geom, &mat, p).unwrap();
        all_spd &= is_positive_definite(&pot.strain_hessian());
    }
    let zero = solve_equilibrium(&geom, &mat, 0.0, None).unwrap();
    let zero_ok = zero.state == EquilibriumState::zero() && zero.diagnostics.residual == 0.0;
    (
        worst < 1e-8 && all_spd && zero_ok,
        format!("max scaled residual {worst:.2e}, strain block SPD {all_spd}, P=0 exact zero {zero_ok}"),
    )
}

fn grid_half_widths(x: &[f64; STATE_DIM]) -> [f64; STATE_DIM] {
    let strain = x[..3].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let curv = x[3..6].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut h = [0.0; STATE_DIM];
    for i in 0..STATE_DIM {
        let group = match i {
            0..=2 => strain,
            3..=5 => curv,
            _ => 1.0,
        };
        h[i] = 0.2 * x[i].abs().max(group);
    }
    h
}

/// Lowest potential over a 5-point-per-axis grid spanning the +-20% box,
/// minus the potential at the center.
fn grid_gap(geom: &ActuatorGeometry, mat: &MaterialModel, p: f64, center: &EquilibriumState) -> f64 {
    let x = center.to_array();
    let h = grid_half_widths(&x);
    let pi0 = total_potential(geom, mat, center, p).unwrap();
    let mut lowest = f64::INFINITY;
    for mut code in 0..5usize.pow(STATE_DIM as u32) {
        let mut y = x;
        for i in 0..STATE_DIM {
            let step = (code % 5) as f64 - 2.0;
            code /= 5;
            y[i] += 0.5 * step * h[i];
        }
        if y == x {
            continue;
        }
        lowest = lowest.min(total_potential(geom, mat, &EquilibriumState::from_array(y), p).unwrap());
    }
    (lowest - pi0) / pi0.abs()
}

fn oracle_equivalence() -> Verdict {
    let (geom, mat) = model();
    let settings = SolverSettings::default();
    let mut worst_dual = 0.0f64;
    let mut worst_gap = f64::INFINITY;
    for p in SWEEP {
        let nested = solve_equilibrium(&geom, &mat, p, None).unwrap();
        let full = solve_equilibrium_full_newton(&geom, &mat, p, None, &settings).unwrap();
        let rn = twist_radius(&nested.state).unwrap();
        let rf = twist_radius(&full.state).unwrap();
        worst_dual = worst_dual.max((rn - rf).abs() / rn);
        worst_gap = worst_gap.min(grid_gap(&geom, &mat, p, &nested.state));
    }
    let warm = predict_twist_curve(&geom, &mat, &SWEEP).unwrap();
    let cold = predict_twist_curve_with(&geom, &mat, &SWEEP, StartStrategy::Cold).unwrap();
    let worst_cont = warm
        .samples
        .iter()
        .zip(&cold.samples)
        .map(|(w, c)| {
            let (a, b) = (w.twist_radius_mm().unwrap(), c.twist_radius_mm().unwrap());
            (a - b).abs() / b
        })
        .fold(0.0f64, f64::max);
    (
        worst_dual < 0.01 && worst_cont < 0.01 && worst_gap >= -1e-12,
        format!(
            "nested vs full Newton {worst_dual:.2e}, continuation vs cold {worst_cont:.2e}, \
             smallest relative grid excess {worst_gap:.2e}"
        ),
    )
}

fn twist_identities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k: f64 = rng.gen_range(1e-3..0.1);
        let other = k * rng.gen_range(-1.0..1.0);
        let phi = rng.gen_range(0.0..PI);
        let cases = [
            EquilibriumState { k1: k, k2: k, phi, ..Default::default() },
            EquilibriumState { k1: k, k2: other, phi: 0.0, ..Default::default() },
            EquilibriumState { k1: other, k2: k, phi: FRAC_PI_2, ..Default::default() },
        ];
        for c in cases {
            worst = worst.max((twist_radius(&c).unwrap() * k - 1.0).abs());
        }
    }
    (worst < 1e-12, format!("worst relative deviation {worst:.2e} over 3000 cases"))
}

fn pre_loop_flags() -> Verdict {
    let (geom, mat) = model();
    let pressures: Vec<f64> = (0..=30).map(f64::from).collect();
    let curve = predict_twist_curve(&geom, &mat, &pressures).unwrap();
    let wrong: Vec<f64> = curve
        .samples
        .iter()
        .filter(|s| s.pre_loop != (s.pressure_kpa < 18.0))
        .map(|s| s.pressure_kpa)
        .collect();
    (wrong.is_empty(), format!("0..30 kPa, misflagged pressures {wrong:?}"))
}

fn circle_fit() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_clean = 0.0f64;
    for _ in 0..100 {
        let r: f64 = rng.gen_range(1.0..200.0);
        let c = [rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0)];
        let start: f64 = rng.gen_range(0.0..2.0 * PI);
        let pts: Vec<[f64; 2]> = (0..12)
            .map(|i| {
                let u = start + 0.4 * i as f64;
                [c[0] + r * u.cos(), c[1] + r * u.sin()]
            })
            .collect();
        worst_clean = worst_clean.max((fit_circle_2d(&pts).unwrap().radius - r).abs());
    }
    let noise = Normal::new(0.0, 0.5).unwrap();
    let truth = 43.5;
    let mut hits = 0;
    for _ in 0..1000 {
        let pts: Vec<[f64; 2]> = (0..20)
            .map(|i| {
                let u = 2.0 * PI * i as f64 / 20.0;
                [10.0 + truth * u.cos() + noise.sample(&mut rng), -5.0 + truth * u.sin() + noise.sample(&mut rng)]
            })
            .collect();
        if (fit_circle_2d(&pts).unwrap().radius - truth).abs() <= 0.3 {
            hits += 1;
        }
    }
    (
        worst_clean < 1e-9 && hits >= 990,
        format!("noiseless error {worst_clean:.2e} mm, noisy within 0.3 mm in {hits}/1000"),
    )
}

fn flux_volume(hull: &Hull3D) -> f64 {
    (0..hull.facets.len())
        .map(|f| {
            let n = hull.facet_area_normal(f);
            let cx: f64 = hull.facets[f].iter().map(|&i| hull.vertices[i][0]).sum::<f64>() / 3.0;
            0.5 * n[0] * cx
        })
        .sum()
}

fn hull_volumes() -> Verdict {
    let cube: Vec<Point3> = (0..8)
        .map(|c| [10.0 * (c & 1) as f64, 10.0 * ((c >> 1) & 1) as f64, 10.0 * ((c >> 2) & 1) as f64])
        .collect();
    let vc = hull_volume(&convex_hull_3d(&cube).unwrap());
    let s = 0.5f64.sqrt();
    let tet = [[1.0, 0.0, -s], [-1.0, 0.0, -s], [0.0, 1.0, s], [0.0, -1.0, s]].map(|p| p.map(|v| v * 0.5));
    let vt = hull_volume(&convex_hull_3d(&tet).unwrap());
    let tet_err = (vt - 2f64.sqrt() / 12.0).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let pts: Vec<Point3> = (0..60).map(|_| [0; 3].map(|_| rng.gen_range(-50.0..50.0))).collect();
        let hull = convex_hull_3d(&pts).unwrap();
        let v = hull_volume(&hull);
        worst = worst.max(((v - flux_volume(&hull)) / v).abs());
    }
    (
        vc == 1000.0 && tet_err < 1e-12 && worst < 1e-9,
        format!("cube {vc}, tetrahedron error {tet_err:.2e}, random clouds vs flux formula {worst:.2e}"),
    )
}

fn fixture_volumes() -> Verdict {
    let vb = sweep_volume(&synthetic::bending_sweep(synthetic::BENDING_HALF_WIDTH_MM), 0..=u64::MAX).unwrap();
    let ve = sweep_volume(&synthetic::extension_sweep(synthetic::EXTENSION_STROKE_MM), 0..=u64::MAX).unwrap();
    let (eb, ee) = (vb / 10_035.0 - 1.0, ve / 5_019.0 - 1.0);
    (
        eb.abs() < 0.01 && ee.abs() < 0.01,
        format!("bending {vb:.3} mm^3 ({eb:+.1e}), extension {ve:.3} mm^3 ({ee:+.1e})"),
    )
}

const MODE_TARGETS: [(MotionMode, f64); 3] =
    [(MotionMode::Bending, 2.1), (MotionMode::Twisting, 3.29), (MotionMode::Extension, 1.1)];

/// Per-mode and overall rows of the repeatability command run on trials
/// constructed to the target per-mode means.
fn repeatability_rows() -> Vec<(String, f64)> {
    let dir = TempDir::new().unwrap();
    let sets: Vec<TrialSet> = MODE_TARGETS
        .iter()
        .enumerate()
        .map(|(i, &(mode, d))| synthetic::trials_with_mean_deviation(mode, [50.0 * i as f64, 20.0, 100.0], d, 30, 10 + i as u64))
        .collect();
    let trials = dir.path().join("trials.csv");
    write_trials(&sets, std::fs::File::create(&trials).unwrap()).unwrap();
    let out = dir.path().join("rep.csv");
    let o = cli(&["repeatability", trials.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.exit_code, 0, "{:?}", o.summary);
    let mut r = csv::Reader::from_path(&out).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].to_string(), rec[2].parse().unwrap())
        })
        .collect()
}

fn fixture_repeatability_modes() -> Verdict {
    let rows = repeatability_rows();
    let mut worst = 0.0f64;
    let mut found = Vec::new();
    for (mode, target) in MODE_TARGETS {
        let got = rows.iter().find(|(m, _)| *m == mode.to_string()).map(|r| r.1).unwrap_or(f64::NAN);
        found.push(format!("{mode} {got:.9}"));
        worst = worst.max((got - target).abs());
    }
    (worst < 1e-6, format!("{} (worst error {worst:.1e})", found.join(", ")))
}

fn fixture_repeatability_overall() -> Verdict {
    let rows = repeatability_rows();
    let overall = rows.iter().find(|(m, _)| m == "overall").unwrap().1;
    let err = (overall - 2.16).abs();
    (
        err < 1e-6,
        format!("overall {overall:.9} mm vs 2.16 (error {err:.1e}); the mean of 2.1, 3.29 and 1.1 is 2.163333..."),
    )
}

fn mode_table() -> Verdict {
    let table_ok = motion_mode(5.0, 5.0) == Ok(MotionMode::Bending)
        && motion_mode(45.0, 5.0) == Ok(MotionMode::Twisting)
        && motion_mode(5.0, 45.0) == Ok(MotionMode::Extension);
    let mut accepted = Vec::new();
    let temps: Vec<f64> = (0..=120).map(|i| -10.0 + 0.5 * i as f64).collect();
    for &a in &temps {
        for &b in &temps {
            let transition = |t: f64| t > 10.0 && t < 28.0;
            let rejected = transition(a) || transition(b) || (a >= 28.0 && b >= 28.0);
            if rejected && motion_mode(a, b).is_ok() {
                accepted.push((a, b));
            }
        }
    }
    (
        table_ok && accepted.is_empty(),
        format!("three configurations mapped {table_ok}, wrongly accepted inputs {}", accepted.len()),
    )
}

fn cli(args: &[&str]) -> CommandOutcome {
    run(std::iter::once("twistmodel").chain(args.iter().copied()))
}

fn cli_determinism() -> Verdict {
    let dir = TempDir::new().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let helix = p("helix.csv");
    write_trajectories(&synthetic::helix_markers(40.0, 7, true), std::fs::File::create(&helix).unwrap()).unwrap();
    let bend = p("bend.csv");
    write_trajectories(
        &synthetic::bending_sweep(synthetic::BENDING_HALF_WIDTH_MM),
        std::fs::File::create(&bend).unwrap(),
    )
    .unwrap();
    let trials = p("trials.csv");
    let sets: Vec<TrialSet> =
        MODE_TARGETS.iter().map(|&(m, d)| synthetic::trials_with_mean_deviation(m, [0.0; 3], d, 30, 3)).collect();
    write_trials(&sets, std::fs::File::create(&trials).unwrap()).unwrap();
    let one = p("one.csv");
    write_trials(&[TrialSet { mode: MotionMode::Bending, endpoints: vec![[0.0; 3]] }], std::fs::File::create(&one).unwrap())
        .unwrap();
    let empty = p("empty.csv");
    std::fs::write(&empty, "frame,time_s,marker_id,x_mm,y_mm,z_mm\n").unwrap();
    let sparse = synthetic::HELIX_SPARSE_FRAME.to_string();

    let mut unstable = Vec::new();
    let mut outputs: Vec<(&str, Vec<String>)> = Vec::new();
    let deterministic: [(&str, Vec<String>); 4] = [
        ("predict-twist", vec!["predict-twist".into(), "--pmin".into(), "10".into(), "--plot".into()]),
        ("fit-circle", vec!["fit-circle".into(), helix.clone(), "--best-frame".into(), "--reference".into(), "ref".into()]),
        ("sweep-volume", vec!["sweep-volume".into(), bend.clone(), "--plot".into()]),
        ("repeatability", vec!["repeatability".into(), trials.clone()]),
    ];
    for (name, base) in deterministic {
        let mut runs = Vec::new();
        for k in 0..2 {
            let mut args = base.clone();
            if args.last().map(String::as_str) == Some("--plot") {
                args.push(p(&format!("{name}-{k}.svg")));
            }
            args.extend(["--out".into(), p(&format!("{name}-{k}.csv"))]);
            let o = cli(&args.iter().map(String::as_str).collect::<Vec<_>>());
            let bytes: Vec<Vec<u8>> = o.artifacts.iter().map(|a| std::fs::read(a).unwrap()).collect();
            // summaries name the output paths, which differ between runs
            runs.push((o.exit_code, bytes));
        }
        if runs[0] != runs[1] || runs[0].0 != 0 {
            unstable.push(name);
        }
        outputs.push((name, base));
    }
    let mode_runs: Vec<_> = (0..2).map(|_| cli(&["mode", "--humofit1", "45", "--humofit2", "5"])).collect();
    if mode_runs[0] != mode_runs[1] {
        unstable.push("mode");
    }

    let missing_cfg = p("missing.ini");
    let out = p("x.csv");
    let matrix: Vec<(Vec<&str>, u8)> = vec![
        (vec!["predict-twist", "--pmin", "0", "--pmax", "0", "--out", &out], 0),
        (vec!["--config", &missing_cfg, "predict-twist", "--out", &out], 1),
        (vec!["predict-twist", "--step", "-1", "--out", &out], 1),
        (vec!["fit-circle", &helix, "--frame", &sparse, "--reference", "ref", "--out", &out], 2),
        (vec!["fit-circle", &helix, "--best-frame", "--out", &out], 0),
        (vec!["fit-circle", "no-such-file.csv", "--best-frame", "--out", &out], 1),
        (vec!["sweep-volume", &empty, "--out", &out], 2),
        (vec!["sweep-volume", &bend, "--out", &out], 0),
        (vec!["repeatability", &one, "--out", &out], 2),
        (vec!["repeatability", &trials, "--out", &out], 0),
        (vec!["mode", "--humofit1", "5", "--humofit2", "5"], 0),
        (vec!["mode", "--humofit1", "45", "--humofit2", "45"], 2),
        (vec!["mode", "--humofit1", "45"], 1),
        (vec!["frobnicate"], 1),
    ];
    let wrong: Vec<String> = matrix
        .iter()
        .filter_map(|(args, want)| {
            let got = cli(args).exit_code;
            (got != *want).then(|| format!("{} -> {got} (want {want})", args.join(" ")))
        })
        .collect();
    (
        unstable.is_empty() && wrong.is_empty(),
        format!(
            "{} subcommands byte-stable (unstable {unstable:?}), {} exit-code cases, mismatches {wrong:?}",
            outputs.len() + 1,
            matrix.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("1", "gradient correctness", gradient_correctness),
        ("2", "equilibrium validity", equilibrium_validity),
        ("3", "oracle equivalence", oracle_equivalence),
        ("4", "twist radius identities", twist_identities),
        ("5", "pre-loop flagging", pre_loop_flags),
        ("6", "circle fit", circle_fit),
        ("7", "hull volume", hull_volumes),
        ("8a", "sweep volume fixtures", fixture_volumes),
        ("8b", "per-mode repeatability fixtures", fixture_repeatability_modes),
        ("8c", "overall repeatability 2.16 mm", fixture_repeatability_overall),
        ("9", "mode table", mode_table),
        ("10", "CLI determinism and exit codes", cli_determinism),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let (pass, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        println!("criterion {id:<3} {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        failed += usize::from(!pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
