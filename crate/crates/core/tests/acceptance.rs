//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polariton::bands::{
    branch_frequencies, group_velocity, polariton_masses_at, rabi_splitting, resonant_lower_mass,
    Branch,
};
use polariton::cli;
use polariton::degeneracy::{degeneracy_temperature, thermal_wavelength};
use polariton::oracle::{compare_to_analytic, ORACLE_THRESHOLD};
use polariton::packet::{
    broadening_time, default_protocol, evolve, gaussian_packet, plateau_velocities,
    recentered_overlap, DetuningSchedule, EvolveOptions, Grid, Mode,
};
use polariton::params::{presets, CrystalParams, HBAR, K_B};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn two_pi_g_fig2() -> f64 {
    2.0 * PI * 2e9
}

/// Gap at the δω = 0 crossing of the reference crystal, kl = π/2.
fn rabi_gap() -> Outcome {
    let p = presets::fig2();
    assert_eq!(p.omega_ph, p.omega_ab);
    let k = FRAC_PI_2 / p.l;
    let expected = 2.0 * two_pi_g_fig2();
    let gap = rabi_splitting(&p, k);
    let gap_dev = rel(gap, expected);
    // The two branches are ~3e15 rad/s apart from zero; their difference is
    // limited by one ulp of each, not by the model.
    let (w1, w2) = branch_frequencies(&p, k);
    let ulp = w1 * f64::EPSILON;
    let sub_dev = ((w1 - w2) - expected).abs();
    outcome(
        gap_dev <= 1e-12 && sub_dev <= 2.0 * ulp,
        format!(
            "Omega1-Omega2 = {gap:.12e} rad/s, 2g = {expected:.12e}, rel dev {gap_dev:.2e} (tol 1e-12); \
             branch subtraction off by {sub_dev:.3} rad/s (<= 2 ulp = {:.3})",
            2.0 * ulp
        ),
    )
}

fn lower_mass() -> Outcome {
    let (m_ph, m_at) = (0.5e-35, 38.5e-27);
    let reference = 2.0 * m_ph * m_at / (m_ph + m_at);
    let p = presets::fig2();
    let m2_formula = resonant_lower_mass(m_ph, m_at);
    let m2_bands = polariton_masses_at(&p, 0.0).1;
    let dev = rel(m2_formula, 1.0e-35);
    outcome(
        dev <= 0.01 && rel(m2_formula, reference) < 1e-14 && rel(m2_bands, reference) < 1e-12,
        format!("m2 = {m2_formula:.6e} kg (target 1.0e-35, rel dev {dev:.2e}, tol 1e-2); band-derived {m2_bands:.6e}"),
    )
}

fn velocities() -> Outcome {
    let p = presets::fig2();
    let k = 1e5;
    let two_g = 2.0 * p.g;
    let photon_ratio = p.effective_detuning() / two_g;
    let v_photon = group_velocity(&p, k, Branch::Lower);
    let atomic = p.with_effective_detuning(-1e8 * p.g);
    let v_atom = group_velocity(&atomic, k, Branch::Lower);
    let dp = rel(v_photon, 2e6);
    let da = rel(v_atom, 2.6e-4);
    // free-particle limits ħk/m as an independent reference
    let free_ph = HBAR * k / p.m_ph();
    let free_at = HBAR * k / p.m_at();
    outcome(
        photon_ratio > 100.0 && dp <= 0.10 && da <= 0.10,
        format!(
            "photon-like (Dt/2g = {photon_ratio:.1e}) v2 = {v_photon:.4e} m/s vs 2e6 (dev {dp:.3}, hbar k/m_ph = {free_ph:.4e}); \
             atom-like v2 = {v_atom:.4e} m/s vs 2.6e-4 (dev {da:.3}, hbar k/m_at = {free_at:.4e}); tol 0.10"
        ),
    )
}

fn broadening() -> Outcome {
    let m_at = presets::fig2().m_at();
    let f = 1e-4;
    let tau_b = broadening_time(m_at, f).unwrap();
    let reference = m_at * f * f / HBAR;
    let dev = rel(tau_b, 3.7);
    outcome(
        dev <= 0.05 && rel(tau_b, reference) < 1e-15,
        format!("tau_b = {tau_b:.4} s vs 3.7 s (rel dev {dev:.3}, tol 0.05)"),
    )
}

fn degeneracy() -> Outcome {
    let n1 = 1e4 * 1e2;
    let m2 = 1e-35;
    let td = degeneracy_temperature(n1, m2).unwrap();
    let reference = 2.0 * PI * HBAR * HBAR * n1 * n1 / (m2 * K_B);
    let lam = thermal_wavelength(m2, td).unwrap();
    let identity = (n1 * lam - 1.0).abs();
    outcome(
        td >= 300.0 && identity <= 1e-12 && rel(td, reference) < 1e-14,
        format!("T_d = {td:.4} K (>= 300 K); |n1*Lambda_T(T_d) - 1| = {identity:.2e} (tol 1e-12)"),
    )
}

fn random_reduced(rng: &mut ChaCha8Rng, cells: usize) -> CrystalParams {
    CrystalParams {
        cells,
        l: 1.0,
        g: rng.gen_range(0.01..10.0),
        alpha: rng.gen_range(0.01..10.0),
        beta: rng.gen_range(0.01..10.0),
        omega_ph: rng.gen_range(5.0..50.0),
        omega_ab: rng.gen_range(5.0..50.0),
    }
    .validate()
    .unwrap()
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for cells in [4, 8, 16] {
        for _ in 0..20 {
            let p = random_reduced(&mut rng, cells);
            let cmp = compare_to_analytic(&p).unwrap();
            assert_eq!(cmp.eigenvalues.len(), 2 * cells);
            worst = worst.max(cmp.max_rel_dev);
            runs += 1;
        }
    }
    outcome(
        worst < ORACLE_THRESHOLD,
        format!(
            "{runs} diagonalisations, worst max_rel_dev = {worst:.2e} (tol {ORACLE_THRESHOLD:e})"
        ),
    )
}

fn band_edges() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [presets::fig2(), presets::reduced()] {
        let unit = 2.0 * p.alpha.max(p.beta) * p.l;
        for kl in [0.0, PI, -PI] {
            for branch in [Branch::Upper, Branch::Lower] {
                let v = group_velocity(&p, kl / p.l, branch) / unit;
                worst = worst.max(v.abs());
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |v|/(2 max(alpha,beta) l) at kl in {{0, +-pi}} = {worst:.2e} (tol 1e-12)"),
    )
}

fn derivative_consistency() -> Outcome {
    let p = presets::reduced();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let steps = [1e2, 1e1, 1e0];
    let unit = 2.0 * p.alpha.max(p.beta) * p.l;
    let mut sq = [[0.0f64; 3]; 2];
    let mut worst_fine: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.gen_range(-PI..PI) / p.l;
        for (b, branch) in [Branch::Upper, Branch::Lower].into_iter().enumerate() {
            let v = group_velocity(&p, k, branch);
            for (i, h) in steps.iter().enumerate() {
                let pick = |k: f64| {
                    let (w1, w2) = branch_frequencies(&p, k);
                    if b == 0 {
                        w1
                    } else {
                        w2
                    }
                };
                let fd = (pick(k + h) - pick(k - h)) / (2.0 * h);
                let err = (fd - v) / unit;
                sq[b][i] += err * err;
                if i == steps.len() - 1 {
                    worst_fine = worst_fine.max(err.abs());
                }
            }
        }
    }
    let mut orders = Vec::new();
    for row in &sq {
        for i in 0..steps.len() - 1 {
            let ratio = (row[i] / row[i + 1]).sqrt();
            orders.push(ratio.log10() / (steps[i] / steps[i + 1]).log10());
        }
    }
    let ok = orders.iter().all(|o| (o - 2.0).abs() <= 0.1) && worst_fine < 1e-6;
    outcome(
        ok,
        format!(
            "100 random k, h = 1e2/1e1/1e0 rad/m (l = 1e-3 m): observed orders {:?} (expect 2 +- 0.1); finest error {worst_fine:.2e}",
            orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn packet_physics() -> Outcome {
    let p = presets::fig2();
    let (n, length, carrier, width, f) = (2048, 64.0, 10.0, 1.0, 1e-4);
    let grid = Grid::new(n, length).unwrap();
    let packet = gaussian_packet(&grid, carrier, width, f).unwrap();
    let schedule = default_protocol();
    let mut notes = Vec::new();
    let mut ok = true;

    // (a) norm, both modes
    let mut parabolic_trace = None;
    for mode in [Mode::Parabolic, Mode::FullBand] {
        let opts = EvolveOptions {
            mode,
            ..EvolveOptions::default()
        };
        let trace = evolve(&packet, &schedule, &p, &opts).unwrap();
        let err = trace.max_norm_error();
        ok &= err <= 1e-10;
        notes.push(format!("(a) {mode} norm err {err:.1e}"));
        if mode == Mode::Parabolic {
            parabolic_trace = Some(trace);
        }
    }
    let trace = parabolic_trace.unwrap();

    // (b) constant-D spreading law
    let d = 2.0;
    let ratio = p.m_ph() / polariton_masses_at(&p, 2.0 * p.g * d).1;
    let constant = DetuningSchedule::constant(d, 2.0).unwrap();
    let fine = EvolveOptions {
        steps_per_segment: 20_000,
        trace_every: 100,
        ..EvolveOptions::default()
    };
    let spread = evolve(&packet, &constant, &p, &fine).unwrap();
    let mut worst_width: f64 = 0.0;
    for (tau, sigma) in spread.times.iter().zip(&spread.widths) {
        let s = tau * ratio / (2.0 * width * width);
        let law = width * (1.0 + s * s).sqrt();
        worst_width = worst_width.max(rel(*sigma, law));
    }
    ok &= worst_width <= 1e-6;
    notes.push(format!("(b) width law dev {worst_width:.1e}"));

    // (c) plateau velocities
    let plateaus = plateau_velocities(&trace, &schedule, &p, carrier);
    let mut stores = 0;
    for pv in &plateaus {
        let reference = carrier * p.m_ph() / polariton_masses_at(&p, 2.0 * p.g * pv.d).1;
        let dev = rel(pv.measured, reference);
        ok &= dev <= 0.02 && rel(pv.expected, reference) < 1e-12;
        if pv.d < 0.0 {
            stores += 1;
        }
        notes.push(format!(
            "(c) D={} v={:.5} expect {:.5} dev {dev:.1e}",
            pv.d, pv.measured, reference
        ));
    }
    ok &= plateaus.len() == 3 && stores == 1;

    // (d) round trip
    let overlap = recentered_overlap(&packet, &trace.final_state);
    ok &= overlap >= 0.99;
    let shift = trace.centers.last().unwrap() - trace.centers[0];
    notes.push(format!("(d) overlap {overlap:.5} after shift {shift:.3}"));
    outcome(ok, notes.join("; "))
}

fn fig2_reproduction() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bands.csv");
    let config = cli::parse_config([
        "polc",
        "bands",
        "--params",
        "fig2.json",
        "--n-points",
        "1001",
        "--quiet",
        "--out",
        path.to_str().unwrap(),
    ])
    .unwrap();
    cli::run(&config).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (c_kl, c_w1, c_w2) = (col("kl"), col("Omega_1"), col("Omega_2"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let (i_min, _) = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1[c_w2].total_cmp(&b.1[c_w2]))
        .unwrap();
    let kl_min = rows[i_min][c_kl];
    let min_gap = rows
        .iter()
        .map(|r| r[c_w1] - r[c_w2])
        .fold(f64::INFINITY, f64::min);
    let p = presets::fig2();
    let two_g = 2.0 * p.g;
    let dkl = 2.0 * PI / (rows.len() - 1) as f64;
    // largest δω a grid point can sit from a crossing, plus float resolution
    let slack = (2.0 * (p.alpha - p.beta).abs() * dkl / 2.0).hypot(two_g) - two_g;
    let resolution = 2.0 * rows[0][c_w1] * f64::EPSILON;
    let gap_dev = (min_gap - two_g).abs();
    outcome(
        rows.len() == 1001 && kl_min == 0.0 && gap_dev <= slack + resolution,
        format!(
            "{} rows; lower-branch minimum at kl = {kl_min}; min gap {min_gap:.6e} vs 2g {two_g:.6e} (|dev| {gap_dev:.3e} <= {:.3e})",
            rows.len(),
            slack + resolution
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 resonant Rabi gap", rabi_gap, Duration::from_secs(1)),
        ("2 lower-polariton mass", lower_mass, Duration::from_secs(1)),
        (
            "3 photon/atom-like velocity",
            velocities,
            Duration::from_secs(1),
        ),
        ("4 broadening time", broadening, Duration::from_secs(1)),
        ("5 degeneracy", degeneracy, Duration::from_secs(1)),
        ("6 oracle equivalence", oracle, Duration::from_secs(10)),
        (
            "7 band-edge localization",
            band_edges,
            Duration::from_secs(1),
        ),
        (
            "8 derivative consistency",
            derivative_consistency,
            Duration::from_secs(5),
        ),
        ("9 packet physics", packet_physics, Duration::from_secs(30)),
        (
            "10 reference band scan",
            fig2_reproduction,
            Duration::from_secs(2),
        ),
    ];
    let mut failures = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check);
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= budget, o.detail),
            Err(_) => (false, "panicked".to_string()),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.3} s, limit {} s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failures} failed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
