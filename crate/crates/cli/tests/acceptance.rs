//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints its line; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use semirad::campaign::{run_campaign, CampaignConfig, CampaignReport, RankPolicy};
use semirad_core::ensembles::{random_a_unit, random_compatible, random_context, OperandKind};
use semirad_core::inequalities::{alpha_grid, CheckId};
use semirad_core::oracle::{buzano_sample, direct_a_sphere_tuple, direct_pair_ascent, OracleConfig};
use semirad_core::radii::{a_crawford, a_euclidean_radius, a_numerical_radius, a_op_norm, euclidean_radius, numerical_radius};
use semirad_core::rng::{ginibre, stream};
use semirad_core::{AContext, ComplexMatrix};

const SEED: u64 = 0x5eed_2024;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Context for instance `i`: dimension cycles through `1..=max_dim`, rank
/// through `1..=dim` (at least `min_rank` where possible).
fn ctx_for(i: usize, max_dim: usize, min_rank: usize, salt: u64) -> AContext {
    let dim = min_rank.max(1) + i % (max_dim + 1 - min_rank.max(1));
    let lo = min_rank.clamp(1, dim);
    let rank = lo + (i / max_dim) % (dim + 1 - lo);
    random_context(dim, rank, SEED ^ salt ^ ((i as u64) << 20)).unwrap()
}

fn generic(ctx: &AContext, seed: u64) -> ComplexMatrix {
    random_compatible(ctx, OperandKind::GenericACompatible, seed).unwrap()
}

fn criterion1(report: &CampaignReport) -> Verdict {
    let count: usize = report.checks.values().map(|a| a.count).sum();
    let passed: usize = report.checks.values().map(|a| a.pass_count).sum();
    let worst = report
        .checks
        .iter()
        .min_by(|a, b| a.1.min_margin.total_cmp(&b.1.min_margin))
        .map(|(id, a)| format!("{} margin {:.3e}", id.name(), a.min_margin))
        .unwrap_or_default();
    let full = report.checks.len() == CheckId::ALL.len() && count == 4 * 2 * 250 * CheckId::ALL.len();
    verdict(
        full && passed == count && report.all_pass(),
        format!("{passed}/{count} evaluations pass, {} failure records, tightest {worst}, {:.1}s", report.failures.len(), report.wall_time),
    )
}

fn criterion2() -> Verdict {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_rel = 0.0f64;
    for i in 0..200 {
        let ctx = ctx_for(i, 4, 1, 2);
        let b = generic(&ctx, SEED ^ (2 << 40) ^ (2 * i as u64));
        let c = generic(&ctx, SEED ^ (2 << 40) ^ (2 * i as u64 + 1));
        let we = a_euclidean_radius(&ctx, &b, &c).unwrap();
        let o = direct_a_sphere_tuple(&ctx, &[b, c], &OracleConfig::with_seed(i as u64)).unwrap().value;
        worst_excess = worst_excess.max(o - (we.value + we.certified_gap) - 1e-12 * (1.0 + we.value));
        worst_rel = worst_rel.max((we.value - o).abs() / we.value.max(1e-300));
    }
    verdict(
        worst_excess <= 0.0 && worst_rel <= 1e-3,
        format!("200 instances, oracle excess over bound {worst_excess:.2e}, worst relative disagreement {worst_rel:.2e}"),
    )
}

fn criterion3() -> Verdict {
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = 1 + i % 5;
        let mut rng = stream(SEED, &[3, i as u64]);
        let m1 = ginibre(&mut rng, n, n);
        let m2 = ginibre(&mut rng, n, n);
        let we = euclidean_radius(&m1, &m2).unwrap().value;
        let o = direct_pair_ascent(&m1, &m2, &OracleConfig::with_seed(i as u64)).unwrap().value;
        worst = worst.max((we - o).abs() / we);
    }
    let jordan = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let wj = numerical_radius(&jordan).unwrap().value;
    verdict(
        worst <= 1e-6 && (wj - 0.5).abs() <= 1e-8,
        format!("200 pairs, worst relative disagreement {worst:.2e}; Jordan block w = {wj:.15}"),
    )
}

fn criterion4() -> Verdict {
    let kinds = [OperandKind::GenericACompatible, OperandKind::ASelfadjoint, OperandKind::Nilpotent, OperandKind::RankOneA];
    let mut worst = 0.0f64;
    for i in 0..500 {
        let ctx = ctx_for(i, 6, 1, 4);
        let scale = [1.0, 0.1, 10.0][i % 3];
        let kind = kinds[(i / 3) % kinds.len()];
        let b = random_compatible(&ctx, kind, SEED ^ (4 << 40) ^ (2 * i as u64)).unwrap().scale_real(scale);
        let c = random_compatible(&ctx, OperandKind::GenericACompatible, SEED ^ (4 << 40) ^ (2 * i as u64 + 1)).unwrap().scale_real(scale);
        let lhs = a_euclidean_radius(&ctx, &(&b + &c), &(&b - &c)).unwrap().value.powi(2);
        let rhs = 2.0 * a_euclidean_radius(&ctx, &b, &c).unwrap().value.powi(2);
        let op_scale = 1.0 + rhs;
        worst = worst.max((lhs - rhs).abs() / op_scale);
    }
    verdict(worst <= 1e-6, format!("500 instances, worst |lhs - rhs| / scale {worst:.2e}"))
}

fn criterion5() -> Verdict {
    let mut worst = 0.0f64;
    let mut worst_branch = 0.0f64;
    let mut evaluations = 0;
    for i in 0..100 {
        let ctx = ctx_for(i, 6, 2, 5);
        let x = random_a_unit(&ctx, &mut stream(SEED, &[5, i as u64])).unwrap();
        let t = ctx.rank_one_a(&x).unwrap();
        let id = ComplexMatrix::identity(ctx.dim());
        for alpha in alpha_grid(&mut stream(SEED, &[5, i as u64, 1])) {
            let norm = a_op_norm(&ctx, &(&t.scale(alpha) - &id)).unwrap().value;
            let d = (alpha - 1.0).norm();
            worst = worst.max((norm - d.max(1.0)).abs());
            if d >= 1.0 {
                worst_branch = worst_branch.max((norm - d).abs());
            }
            evaluations += 1;
        }
    }
    verdict(
        worst <= 1e-7 && worst_branch <= 1e-7,
        format!("{evaluations} (x, alpha) pairs, worst deviation {worst:.2e}, in the |alpha-1| >= 1 branch {worst_branch:.2e}"),
    )
}

fn criterion6() -> Verdict {
    let mut worst = f64::INFINITY;
    for i in 0..20 {
        let ctx = ctx_for(i, 6, 1, 6);
        let alphas = alpha_grid(&mut stream(SEED, &[6, i as u64]));
        let alpha = alphas[i % alphas.len()];
        let cfg = OracleConfig { n_samples: 10_000, ..OracleConfig::with_seed(SEED ^ i as u64) };
        worst = worst.min(buzano_sample(&ctx, &cfg, alpha).unwrap());
    }
    verdict(worst >= -1e-10, format!("20 cells of 10^4 triples, minimum slack {worst:.2e}"))
}

fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm()
}

fn criterion7() -> Verdict {
    let mut fails: Vec<String> = Vec::new();
    let mut note = |ok: bool, what: &str, i: usize| {
        if !ok {
            fails.push(format!("{what}#{i}"));
        }
    };
    for i in 0..500 {
        let ctx = ctx_for(i, 5, 1, 7);
        let s = generic(&ctx, SEED ^ (7 << 40) ^ (3 * i as u64));
        let t = generic(&ctx, SEED ^ (7 << 40) ^ (3 * i as u64 + 1));
        let h = random_compatible(&ctx, OperandKind::ASelfadjoint, SEED ^ (7 << 40) ^ (3 * i as u64 + 2)).unwrap();
        let p = ctx.projector();

        let s1 = ctx.a_adjoint(&t).unwrap();
        let s2 = ctx.a_adjoint(&s1).unwrap();
        let s3 = ctx.a_adjoint(&s2).unwrap();
        note(dist(&s2, &(&(p * &t) * p)) <= 1e-8 * (1.0 + t.frobenius_norm()), "double-sharp", i);
        note(dist(&s3, &s1) <= 1e-8 * (1.0 + s1.frobenius_norm()), "triple-sharp", i);

        let (rs, rt) = (ctx.reduce(&s).unwrap(), ctx.reduce(&t).unwrap());
        let scale = (1.0 + rs.frobenius_norm()) * (1.0 + rt.frobenius_norm());
        note(dist(&ctx.reduce(&(&s * &t)).unwrap(), &(&rs * &rt)) <= 1e-8 * scale, "reduce-product", i);

        let w = a_numerical_radius(&ctx, &t).unwrap();
        let c = a_crawford(&ctx, &t).unwrap().value;
        let n = a_op_norm(&ctx, &t).unwrap().value;
        let tol = 1e-9 * (1.0 + n);
        note(c <= w.value + tol && w.value <= n + tol && n <= 2.0 * (w.value + w.certified_gap) + tol, "sandwich", i);

        let wt = w.value + w.certified_gap;
        let t2 = &t * &t;
        let w2 = a_numerical_radius(&ctx, &t2).unwrap().value;
        let w3 = a_numerical_radius(&ctx, &(&t2 * &t)).unwrap().value;
        note(w2 <= wt.powi(2) + 1e-8 * (1.0 + wt.powi(2)), "power-2", i);
        note(w3 <= wt.powi(3) + 1e-8 * (1.0 + wt.powi(3)), "power-3", i);

        let wh = a_numerical_radius(&ctx, &h).unwrap().value;
        let nh = a_op_norm(&ctx, &h).unwrap().value;
        note((wh - nh).abs() <= 1e-7 * (1.0 + nh), "selfadjoint-equality", i);
    }
    let detail = if fails.is_empty() {
        "500 instances: double/triple sharp, reduce multiplicativity, sandwich, powers 2 and 3, A-selfadjoint equality".to_string()
    } else {
        format!("{} violations, first {:?}", fails.len(), &fails[..fails.len().min(5)])
    };
    verdict(fails.is_empty(), detail)
}

fn criterion8(report: &CampaignReport) -> Verdict {
    let mut lines = Vec::new();
    let mut pass = true;
    for name in ["refines_half_w_b2_plus_c2", "refines_norm_bound"] {
        let (count, ok, margin) = report
            .checks
            .values()
            .filter_map(|a| a.parts.get(name))
            .fold((0, 0, f64::INFINITY), |(c, p, m), part| (c + part.count, p + part.pass_count, m.min(part.min_margin)));
        pass &= count > 0 && ok == count;
        lines.push(format!("{name} {ok}/{count} (min margin {margin:.2e})"));
    }
    verdict(pass, lines.join(", "))
}

fn main() -> ExitCode {
    let cfg = CampaignConfig::new(vec![2, 3, 4, 6], RankPolicy::Both, 250, SEED);
    let mut campaign: Option<CampaignReport> = None;
    let mut all = true;
    for k in 1..=8 {
        let start = Instant::now();
        let v = match k {
            1 | 8 => {
                let report = campaign.get_or_insert_with(|| run_campaign(&cfg).expect("campaign runs"));
                if k == 1 {
                    criterion1(report)
                } else {
                    criterion8(report)
                }
            }
            2 => criterion2(),
            3 => criterion3(),
            4 => criterion4(),
            5 => criterion5(),
            6 => criterion6(),
            _ => criterion7(),
        };
        all &= v.pass;
        println!(
            "criterion {k}: {} ({:.1}s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
