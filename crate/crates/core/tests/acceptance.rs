//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line with the measured quantity and its pinned tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use koopman_lab::config::default_m_box;
use koopman_lab::linflow::{closed_form_flow3, hyperbolic_generator};
use koopman_lab::polynomials::{compute_m, Box2};
use koopman_lab::surface::{build_surface, equilibria};
use koopman_lab::symspace::{basis_dim, delta_embed, lifted_flow, PolySpaceBasis};
use koopman_lab::verify::{
    conjugate_field, equivariance_suite, fit_koopman_matrix, graphlike_check, invariance_suite,
    koopman_eigencheck, obstruction_check, random_fibers, standard_observables, verify_taming,
    verify_transversality, TamingPair, TurnCount,
};

fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn criterion(n: usize, what: &str, pass: bool, detail: String) {
    println!(
        "[criterion {n:2}] {} - {what}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} failed - {what}: {detail}");
}

#[test]
fn criterion_01_dimension_claim() {
    let dim = basis_dim(3, 3).unwrap();
    criterion(1, "dim of degree-3 polynomial space on 3 variables", dim == 20, format!("basis_dim(3,3) = {dim}, expected exactly 20"));
}

#[test]
fn criterion_02_equivariance_of_the_degree_embedding() {
    let report = equivariance_suite(&[1, 2, 3], 200, 1e-8, &mut rng(2)).unwrap();
    criterion(
        2,
        "lifted flow commutes with the embedding (m = 1, 2, 3, 200 samples each)",
        report.pass,
        report.summary_line(),
    );
}

#[test]
fn criterion_03_invariance_and_conservation() {
    let report = invariance_suite(&[2, 3, 4], 0.5, 500, 1e-6, 1e-10, &mut rng(3)).unwrap();
    criterion(
        3,
        "500 random surface points per l stay on the surface and conserve x^2 - y^2",
        report.pass && report.samples == 1500,
        report.summary_line(),
    );
}

#[test]
fn criterion_04_equilibrium_census() {
    let mut worst = 0.0f64;
    let mut pass = true;
    let mut counts = Vec::new();
    for l in 2..=6usize {
        let spec = build_surface(l, 0.5).unwrap();
        let eq = equilibria(&spec);
        counts.push(eq.len());
        pass &= eq.len() == l;
        let m_const = compute_m(l, &default_m_box(l, 0.5).unwrap(), 0.05).unwrap();
        let pair = TamingPair::for_surface(l, m_const).unwrap();
        for e in &eq {
            let w = [e[1], pair.p.eval(e).unwrap()];
            let sample = conjugate_field(&spec, &pair, w).unwrap().expect("preimage exists");
            let magnitude = sample.field[0].abs().max(sample.field[1].abs());
            worst = worst.max(magnitude);
            pass &= magnitude <= 1e-10;
        }
    }
    criterion(
        4,
        "exactly l equilibria for l in 2..=6, each a conjugate-field zero to 1e-10",
        pass,
        format!("counts {counts:?}, worst |field| {worst:.3e}"),
    );
}

#[test]
fn criterion_05_taming_with_two_equilibria() {
    let spec = build_surface(2, 0.5).unwrap();
    let y_grid = [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0];
    let m_const = compute_m(2, &default_m_box(2, 0.5).unwrap(), 0.05).unwrap();
    let mut pass = true;
    let mut lines = Vec::new();
    for pair in [TamingPair::example2(), TamingPair::for_surface(2, m_const).unwrap()] {
        let taming = verify_taming(&spec, &pair, &y_grid, 1e-8).unwrap();
        pass &= taming.pass;
        lines.push(taming.summary_line());
        let fibers = random_fibers(&mut rng(5), 200);
        let trans = verify_transversality(&spec, &pair, &fibers, 1e-6).unwrap();
        pass &= trans.pass;
        lines.push(trans.summary_line());
    }
    criterion(
        5,
        "both degree-3 pairs tame the two-plane surface with positive margin and |det| >= 1e-6",
        pass,
        lines.join(" | "),
    );
}

#[test]
fn criterion_06_taming_with_four_equilibria_and_the_figure_constant() {
    let spec = build_surface(4, 0.5).unwrap();
    let pair = TamingPair::for_surface(4, 4.0).unwrap();
    let y_grid = [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0];
    let taming = verify_taming(&spec, &pair, &y_grid, 1e-8).unwrap();
    let fibers = random_fibers(&mut rng(6), 200);
    let trans = verify_transversality(&spec, &pair, &fibers, 1e-6).unwrap();

    // turns confined to |x| <= 1/2
    let mut max_turn = 0.0f64;
    for i in 0..=3000 {
        let z = 3.0 * i as f64 / 3000.0;
        max_turn = max_turn.max(spec.snake().g(z).abs());
    }

    // the tight box certifies M = 4: its maximum is 3.6875 < 4
    let bound = compute_m(4, &Box2::new(-1.0, 1.0, 0.25, 2.75).unwrap(), 0.0).unwrap();
    let pass = taming.pass
        && trans.pass
        && max_turn <= 0.5 + 1e-12
        && (bound - 3.6875).abs() <= 1e-6
        && bound < 4.0;
    criterion(
        6,
        "M = 4 tames the four-plane surface; box [-1,1]x[0.25,2.75] maximum is 3.6875 < 4",
        pass,
        format!(
            "{} | {} | max |turn| {max_turn} | bound {bound}",
            taming.summary_line(),
            trans.summary_line()
        ),
    );
}

#[test]
fn criterion_07_m_bound_sanity() {
    let wide = compute_m(4, &Box2::new(-1.0, 1.0, 0.0, 3.0).unwrap(), 0.0).unwrap();
    let small = compute_m(2, &Box2::new(-1.0, 1.0, 0.0, 1.0).unwrap(), 0.0).unwrap();
    let pass = (wide - 5.75).abs() <= 1e-6 && (small - 1.0).abs() <= 1e-9;
    criterion(
        7,
        "box maxima of |x Pi'|",
        pass,
        format!("l=4 on [-1,1]x[0,3]: {wide} (want 5.75 +/- 1e-6); l=2 on [-1,1]x[0,1]: {small} (want 1 +/- 1e-9)"),
    );
}

#[test]
fn criterion_08_koopman_eigenfunctions_and_invariant_span() {
    let spec = build_surface(2, 0.5).unwrap();
    let t_grid: Vec<f64> = (-10..=10).map(|i| i as f64 / 5.0).collect();
    let mut pass = true;
    let mut lines = Vec::new();
    for (psi, lambda) in standard_observables().iter().zip([1.0, -1.0, 0.0]) {
        let report =
            koopman_eigencheck(&spec, psi, lambda, 100, &t_grid, 1e-9, &mut rng(8)).unwrap();
        pass &= report.pass;
        lines.push(report.summary_line());
    }
    let mut worst_matrix_gap = 0.0f64;
    for t in [-1.0, 0.3, 1.0] {
        let fit =
            fit_koopman_matrix(&spec, &standard_observables(), t, 200, &mut rng(88)).unwrap();
        let expected = [[t.exp(), 0.0, 0.0], [0.0, (-t).exp(), 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                worst_matrix_gap =
                    worst_matrix_gap.max((fit.coefficients[i][j] - expected[i][j]).abs());
            }
        }
        pass &= fit.residual <= 1e-8;
    }
    pass &= worst_matrix_gap <= 1e-8;
    criterion(
        8,
        "x+y, x-y, z are eigenfunctions to 1e-9; their span fits diag(e^t, e^-t, 1) to 1e-8",
        pass,
        format!("{} | worst matrix gap {worst_matrix_gap:.3e}", lines.join(" | ")),
    );
}

#[test]
fn criterion_09_graphlike_projection() {
    let spec2 = build_surface(2, 0.5).unwrap();
    let r2 = graphlike_check(&spec2, &TamingPair::example2(), 2000, 1e-2, 1e-7, &mut rng(9))
        .unwrap();
    let spec4 = build_surface(4, 0.5).unwrap();
    let pair4 = TamingPair::for_surface(4, 4.0).unwrap();
    assert_eq!(pair4.degree, 7);
    let r4 = graphlike_check(&spec4, &pair4, 2000, 1e-2, 1e-7, &mut rng(99)).unwrap();
    criterion(
        9,
        "separated surface samples stay separated through the embedded projection (l=2 m=3, l=4 m=7)",
        r2.pass && r4.pass,
        format!("{} | {}", r2.summary_line(), r4.summary_line()),
    );
}

#[test]
fn criterion_10_degree_obstruction() {
    let mut pass = true;
    for turns in 1..=10u64 {
        for m in 1..=12u64 {
            let outcome = obstruction_check(TurnCount::Finite(turns), m);
            pass &= outcome.taming_possible == (m >= turns + 1);
        }
        pass &= !obstruction_check(TurnCount::Infinite, turns).taming_possible;
    }
    criterion(
        10,
        "a degree-m polynomial can tame `turns` turns exactly when m >= turns + 1; never infinitely many",
        pass,
        "truth table over turns 1..=10, m 1..=12, plus the infinite flag".into(),
    );
}

#[test]
fn criterion_11_figure_reproduction_is_deterministic() {
    let exe = env!("CARGO_BIN_EXE_koopman-lab");
    let base = std::env::temp_dir().join(format!("koopman-acceptance-{}", std::process::id()));
    let mut pass = true;
    let mut detail = Vec::new();
    for (l, tag) in [(2usize, "two-plane"), (4, "four-plane")] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = base.join(format!("l{l}-run{run}"));
            let status = std::process::Command::new(exe)
                .args([
                    "plot",
                    "--l",
                    &l.to_string(),
                    "--kind",
                    "cross_section",
                    "--y",
                    "0",
                    "--out",
                ])
                .arg(&out)
                .env_remove("KOOPMAN_LAB_OUT")
                .status()
                .expect("plot runs");
            pass &= status.success();
            outputs.push(std::fs::read(out.join("cross_section.svg")).expect("svg written"));
        }
        let identical = outputs[0] == outputs[1];
        pass &= identical;
        detail.push(format!(
            "{tag} svg: {} bytes, reruns {}",
            outputs[0].len(),
            if identical { "byte-identical" } else { "DIFFER" }
        ));
    }
    let _ = std::fs::remove_dir_all(&base);
    criterion(11, "section figures regenerate byte-identically", pass, detail.join(" | "));
}

/// Shared helper exercised alongside the criteria: the raw equivariance
/// inequality in the exact form with the stated scaling.
#[test]
fn criterion_02_pointwise_form() {
    let a = hyperbolic_generator(0);
    let mut rng = rng(22);
    let mut worst = 0.0f64;
    for m in 1..=3usize {
        let basis = PolySpaceBasis::new(3, m).unwrap();
        for _ in 0..200 {
            let t: f64 = rng.random_range(-2.0..2.0);
            let x = [
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            ];
            let embedded = delta_embed(&basis, &x).unwrap();
            let lhs = lifted_flow(&a, m, t).unwrap().matvec(embedded.coords()).unwrap();
            let rhs = delta_embed(&basis, &closed_form_flow3(t, x)).unwrap();
            let gap = lhs
                .iter()
                .zip(rhs.coords())
                .map(|(u, v)| (u - v).abs())
                .fold(0.0f64, f64::max);
            let allowed = 1e-8 * (1.0 + embedded.max_abs());
            worst = worst.max(gap / allowed);
        }
    }
    criterion(
        2,
        "pointwise ||lifted_flow . embed(x) - embed(flow(t, x))||_inf <= 1e-8 (1 + ||embed(x)||_inf)",
        worst <= 1.0,
        format!("worst gap / allowance = {worst:.3e}"),
    );
}
