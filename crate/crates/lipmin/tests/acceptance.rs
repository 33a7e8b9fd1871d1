//! Acceptance suite: runs every verification criterion at its stated
//! tolerance and prints one pass/fail line per criterion.
//!
//! Execute with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines; the test fails unless every criterion passes.

use lipmin::suite::run_suite;

const SEED: u64 = 20240810;

/// Criterion number -> the check names that make it up.
const CRITERIA: &[(u32, &str, &[&str])] = &[
    (1, "minorant equals O(n^2) brute force exactly on 1000 random grids", &[
        "c01_minorant_brute_force_equivalence",
    ]),
    (2, "mean excursion length vs 1/(2(alpha^2-beta^2)), both parameter sets", &[
        "c02_mean_zeta_alpha1_beta0",
        "c02_mean_zeta_alpha2_beta1",
    ]),
    (3, "mean L, zeta-L, W_zeta vs closed forms, both parameter sets", &[
        "c03_feature_means_alpha1_beta0",
        "c03_feature_means_alpha2_beta1",
    ]),
    (4, "zeta distribution (beta=0) vs quadrature CDF, KS p > 0.001", &[
        "c04_zeta_distribution_ks",
    ]),
    (5, "Laplace spot checks at lambda in {0.1, 0.5} within 3 SE", &[
        "c05_laplace_spot_lambda_0_1",
        "c05_laplace_spot_lambda_0_5",
    ]),
    (6, "pathwise vs direct zeta, two-sample KS p > 0.001 (slow)", &[
        "c06_pathwise_direct_zeta_ks",
    ]),
    (7, "U = -G/(D-G) uniform on [0,1), KS p > 0.001", &["c07_uniform_split_ks"]),
    (8, "E[D-G] within 3 SE of 2.0 = E[zeta^2]/E[zeta]", &["c08_size_biased_lifetime"]),
    (9, "Williams H_1 marginal vs Normal(mu,1), mu in {0.5, 2}", &[
        "c09_williams_h1_mu_0_5",
        "c09_williams_h1_mu_2",
    ]),
    (10, "Bessel-from-minimum marginal vs rejection-conditioned BM", &[
        "c10_bessel_from_min_marginal_ks",
    ]),
    (11, "frak-T law from the post-D cone crossing, KS p > 0.001", &["c11_frak_t_law_ks"]),
    (12, "mean Z_t vs empirical P(D>t) at t in {0.1,0.5,1,2}", &["c12_azema_z_vs_survival"]),
    (13, "Ito residual below calibrated bound and decreasing in dt", &[
        "c13_ito_identity_residual",
    ]),
    (14, "analytic identities: symmetry, scaling, normalizations, specializations", &[
        "c14_psi_time_reversal",
        "c14_psi_scaling_rho4_linear",
        "c14_integral_identity",
        "c14_density_normalizations",
        "c14_feature_laplace_specialization",
    ]),
    (15, "D-decomposition vs pathwise D, two-sample KS p > 0.001", &[
        "c15_d_decomposition_ks",
    ]),
];

#[test]
fn acceptance_criteria() {
    let report = run_suite("all", 10_000, SEED).expect("suite runs");

    let lookup = |name: &str| {
        report
            .checks
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("check {name} missing from the all suite"))
    };

    let mut all_pass = true;
    for (num, what, names) in CRITERIA {
        let pass = names.iter().all(|n| lookup(n).pass);
        all_pass &= pass;
        let status = if pass { "PASS" } else { "FAIL" };
        println!("criterion {num:>2}: {status} - {what}");
        for n in *names {
            let c = lookup(n);
            let detail = match c.p_value {
                Some(p) => format!("stat={:.5}, p={:.3e}", c.statistic, p),
                None => match c.tolerance {
                    Some(tol) => format!("stat={:.3e}, bound={:.2e}", c.statistic, tol),
                    None => format!("stat={:.5}", c.statistic),
                },
            };
            println!("      {} {} ({detail}{})", if c.pass { "ok " } else { "BAD" }, n,
                if c.rerun { ", rerun" } else { "" });
        }
    }

    // the remaining (unnumbered) property checks must hold as well
    for c in &report.checks {
        if !CRITERIA.iter().any(|(_, _, names)| names.contains(&c.name.as_str())) {
            let status = if c.pass { "PASS" } else { "FAIL" };
            println!("property    : {status} - {}", c.name);
            all_pass &= c.pass;
        }
    }

    println!(
        "acceptance: {} checks, wall {:.1}s",
        report.checks.len(),
        report.wall_time_secs
    );
    assert!(all_pass && report.pass, "acceptance criteria failed:\n{}", report.format_lines());
}
