//! Built-in example battery: quick closed-form and geometry checks with one
//! printed line per case.

use sfuc_core::analysis::{hyperbola_distance, s_k, weight_psi};
use sfuc_core::grid::{build_mask, generate_sequence, make_grid, BoundaryCondition, SequenceMode};
use sfuc_core::heat_obs::{exp_integral, kappa_bound, kappa_t};
use sfuc_core::operator::{assemble, PotentialField};
use sfuc_core::spectral::eigs_below;
use sfuc_core::ucp::{c_sfuc, ucp_constant_exact};
use sfuc_core::wegner::{eps_max_standard, wegner_bound};
use std::f64::consts::PI;

fn check(name: &str, ok: bool, failures: &mut usize) {
    if ok {
        println!("ok   - {name}");
    } else {
        println!("FAIL - {name}");
        *failures += 1;
    }
}

pub fn run() -> bool {
    let mut failures = 0usize;

    let g = make_grid(1, 1.0, 8, BoundaryCondition::Dirichlet).unwrap();
    check("grid: 7 interior nodes at -3/8..3/8", g.node_count() == 7 && g.axis_coord(0) == -0.375, &mut failures);
    let gp = make_grid(1, 1.0, 8, BoundaryCondition::Periodic).unwrap();
    check("grid: periodic 8 nodes from -1/2", gp.node_count() == 8 && gp.axis_coord(0) == -0.5, &mut failures);
    let g2 = make_grid(2, 2.0, 4, BoundaryCondition::Dirichlet).unwrap();
    check("grid: 2-d node count 49", g2.node_count() == 49, &mut failures);

    let seq = generate_sequence(1.0, 0.25, 1, 3.0, SequenceMode::Centered, 0).unwrap();
    check(
        "sequence: centered cells at -1,0,1",
        seq.points.iter().map(|(_, z)| z[0]).sum::<f64>().abs() < 1e-15 && seq.points.len() == 3,
        &mut failures,
    );
    let seq1 = generate_sequence(1.0, 0.25, 1, 1.0, SequenceMode::Centered, 0).unwrap();
    let mask = build_mask(&seq1, &g).unwrap();
    check("mask: m=8 marks 3 nodes, measure 3/8", mask.count() == 3 && (mask.measure() - 0.375).abs() < 1e-15, &mut failures);

    let op = assemble(&g, &PotentialField::zero(&g), 1.0).unwrap();
    let dense = op.to_dense();
    check("operator: tridiagonal 128 / -64", dense[(0, 0)] == 128.0 && dense[(0, 1)] == -64.0, &mut failures);

    let g32 = make_grid(1, 1.0, 32, BoundaryCondition::Dirichlet).unwrap();
    let op32 = assemble(&g32, &PotentialField::zero(&g32), 1.0).unwrap();
    let spec = eigs_below(&op32, 50.0, 1e-9).unwrap();
    let h = g32.spacing();
    check(
        "spectral: E1 within pi^4 h^2/12 of pi^2",
        (spec.eigenvalues[0] - PI * PI).abs() <= PI.powi(4) * h * h / 12.0 + 1e-9,
        &mut failures,
    );
    check("spectral: b below bottom gives k = 0", eigs_below(&op32, -1.0, 1e-9).unwrap().k() == 0, &mut failures);

    check(
        "ucp: c_sfuc(0.25, N=5) = 9.765625e-4",
        (c_sfuc(1, 0.25, 0.0, 0.0, 5.0).unwrap() - 9.765625e-4).abs() < 1e-18,
        &mut failures,
    );
    check(
        "ucp: b < 0 clamps to b = 0",
        c_sfuc(1, 0.3, -1.0, 0.5, 2.0).unwrap() == c_sfuc(1, 0.3, 0.0, 0.5, 2.0).unwrap(),
        &mut failures,
    );

    let spec1 = eigs_below(&op32, 15.0, 1e-9).unwrap();
    let mask32 = build_mask(&seq1, &g32).unwrap();
    let c = ucp_constant_exact(&spec1, &mask32).unwrap();
    check("ucp: k=1 constant in (0.7, 0.9)", c.value > 0.7 && c.value < 0.9, &mut failures);

    check(
        "wegner: bound(0.01,2,1,1,5) = 2.30259",
        (wegner_bound(0.01, 2.0, 1.0, 1, 5.0).unwrap() - 2.302585092994046).abs() < 1e-12,
        &mut failures,
    );
    let em = eps_max_standard(1.0, 5.0).unwrap();
    check("wegner: eps_max(1,5) = 9.577e-17", (em - 9.577002493974061e-17).abs() / em < 1e-12, &mut failures);

    let kb = kappa_bound(1.0, 0.25, 0.0, 5.0, 1.0).unwrap();
    check("heat: a0 = 1024, c* = 222.9489", kb.a0 == 1024.0 && (kb.c_star - 222.94885028141139).abs() < 1e-10, &mut failures);
    check("heat: I(0, 0.7) = 0.7", (exp_integral(0.0, 0.7) - 0.7).abs() < 1e-15, &mut failures);
    let kap = kappa_t(&spec1, &mask32, 1.0, Some(0.0)).unwrap();
    let e1 = spec1.eigenvalues[0];
    let expect = (-2.0 * e1).exp() / (c.value * exp_integral(2.0 * e1, 1.0));
    check("heat: scalar kappa matches closed form", (kap.value - expect).abs() / expect < 1e-10, &mut failures);

    check("analysis: s_k(0, 0.7) = 0.7", s_k(0.0, 0.7) == 0.7, &mut failures);
    check("analysis: s_k(1, 1) = sinh 1", (s_k(1.0, 1.0) - 1.1752011936438014).abs() < 1e-12, &mut failures);
    check("analysis: s_k(-pi^2, 1/2) = 1/pi", (s_k(-PI * PI, 0.5) - 1.0 / PI).abs() < 1e-12, &mut failures);
    check(
        "analysis: psi(1) = 0.450859 (series oracle)",
        (weight_psi(1.0).unwrap() - 0.45085946332322).abs() < 1e-9,
        &mut failures,
    );
    let hyp = hyperbola_distance(0.25).unwrap();
    check("analysis: hyperbola distance > delta^2/16 at 0.25", hyp.pass && hyp.distance > 0.00390625, &mut failures);

    println!();
    if failures == 0 {
        println!("selftest: all checks passed");
        true
    } else {
        println!("selftest: {failures} check(s) FAILED");
        false
    }
}
