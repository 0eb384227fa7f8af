use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use netreduce_core::centrality::{
    congestion_criterion, extended_betweenness, net_ability, transmission_capacity, CriterionCode, NodeScoreVector,
};
use netreduce_core::evidential::{
    combine_evidence, comprehensive_rank, encode_ranking, evaluate_utility, AttributeWeights, BeliefDistribution,
    ComprehensiveRanking, GradeFrame,
};
use netreduce_core::export::{bottom_k_csv, fusion_csv, scores_csv};
use netreduce_core::grid::io::{parse_matpower, parse_native, to_matpower};
use netreduce_core::grid::{compute_ptdf, ieee30};
use netreduce_core::metrics::{errors_csv, relative_errors, topology_csv, topology_report};
use netreduce_core::reduction::{reduce_pipeline, Provenance, ReductionConfig};
use netreduce_core::{BusId, GridCase};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::output::write_atomic;
use crate::CliError;

pub fn load_case(spec: &str) -> Result<(GridCase, Option<Provenance>), CliError> {
    if spec.eq_ignore_ascii_case("ieee30") {
        return Ok((ieee30(), None));
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(CliError::usage(format!("case file not found: {spec}")));
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {spec}"))?;
    let parsed = if text.trim_start().starts_with('{') {
        parse_native(&text)
    } else {
        parse_matpower(&text).map(|c| (c, None))
    };
    parsed
        .with_context(|| format!("cannot load case {spec}"))
        .map_err(CliError::from)
}

struct Scores {
    vectors: BTreeMap<CriterionCode, NodeScoreVector>,
    fusion: Option<ComprehensiveRanking>,
}

fn score(case: &GridCase, codes: &[CriterionCode], cfg: &RunConfig) -> Result<Scores, CliError> {
    let need = |c: CriterionCode| codes.contains(&c) || (codes.contains(&CriterionCode::C1) && c != CriterionCode::C4);
    let mut vectors = BTreeMap::new();
    if need(CriterionCode::C2) {
        let ptdf = compute_ptdf(case, case.default_slack())?;
        let kappa = transmission_capacity(case, &ptdf)?;
        vectors.insert(CriterionCode::C2, extended_betweenness(case, &ptdf, &kappa));
    }
    if need(CriterionCode::C3) {
        vectors.insert(CriterionCode::C3, net_ability(case)?);
    }
    if need(CriterionCode::C4) {
        vectors.insert(CriterionCode::C4, congestion_criterion(case)?);
    }
    let mut fusion = None;
    if codes.contains(&CriterionCode::C1) {
        let inputs = [vectors[&CriterionCode::C2].clone(), vectors[&CriterionCode::C3].clone()];
        let fused = comprehensive_rank(&inputs, &cfg.weights, cfg.beta)?;
        vectors.insert(CriterionCode::C1, fused.ranking.clone());
        fusion = Some(fused);
    }
    vectors.retain(|c, _| codes.contains(c));
    Ok(Scores { vectors, fusion })
}

#[derive(Serialize)]
struct RankDocument<'a> {
    case: &'a str,
    belief_level: f64,
    weights: &'a [f64],
    criteria: BTreeMap<String, &'a NodeScoreVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fusion: Option<&'a ComprehensiveRanking>,
    bottom_k: BTreeMap<String, Vec<BusId>>,
}

pub fn rank(cfg: &RunConfig) -> Result<(), CliError> {
    let (case, _) = load_case(&cfg.case)?;
    if cfg.k > case.bus_count() {
        return Err(CliError::usage(format!(
            "--k {} exceeds the {} buses of the case",
            cfg.k,
            case.bus_count()
        )));
    }
    let scores = score(&case, &cfg.criteria, cfg)?;
    let columns: Vec<(String, &NodeScoreVector)> =
        scores.vectors.iter().map(|(c, v)| (c.to_string(), v)).collect();
    let table = bottom_k_csv(&columns, cfg.k);
    match cfg.format {
        Format::Csv => {
            for (code, v) in &scores.vectors {
                write_atomic(&cfg.out.join(format!("scores_{code}.csv")), &scores_csv(v))?;
            }
            if let Some(f) = &scores.fusion {
                write_atomic(&cfg.out.join("fusion_c1.csv"), &fusion_csv(f))?;
            }
            write_atomic(&cfg.out.join("bottom_k.csv"), &table)?;
        }
        Format::Json => {
            let doc = RankDocument {
                case: case.name(),
                belief_level: cfg.beta,
                weights: cfg.weights.as_slice(),
                criteria: scores.vectors.iter().map(|(c, v)| (c.to_string(), v)).collect(),
                fusion: scores.fusion.as_ref(),
                bottom_k: scores.vectors.iter().map(|(c, v)| (c.to_string(), v.bottom(cfg.k))).collect(),
            };
            write_atomic(&cfg.out.join("rank.json"), &to_json(&doc)?)?;
        }
    }
    println!("lowest-ranked {} buses of {} (1 = least important):", cfg.k, case.name());
    print!("{table}");
    Ok(())
}

fn to_json(value: &impl Serialize) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn reduce(cfg: &RunConfig, matpower: bool) -> Result<(), CliError> {
    let (case, _) = load_case(&cfg.case)?;
    if cfg.k + 2 > case.bus_count() {
        return Err(CliError::usage(format!(
            "--k must lie in 1..={} for this case",
            case.bus_count().saturating_sub(2)
        )));
    }
    let scores = score(&case, &[cfg.criterion], cfg)?;
    let ranking = &scores.vectors[&cfg.criterion];
    let config = ReductionConfig {
        x_max: cfg.x_max,
        retain_generators: cfg.retain_generators,
    };
    let outcome = reduce_pipeline(&case, ranking, cfg.k, &config)?;
    let label = format!("eq{}", cfg.criterion.number());
    write_atomic(&cfg.out.join(format!("{label}.json")), &outcome.reduced.to_json())?;
    match cfg.format {
        Format::Csv => write_atomic(&cfg.out.join(format!("{label}_report.txt")), &outcome.report.to_string())?,
        Format::Json => write_atomic(&cfg.out.join(format!("{label}_report.json")), &to_json(&outcome.report)?)?,
    }
    if matpower {
        write_atomic(&cfg.out.join(format!("{label}.m")), &to_matpower(&outcome.reduced.case))?;
    }
    print!("{}", outcome.report);
    Ok(())
}

/// Every bus of a model must come from the full case; with provenance the
/// retained and eliminated buses must cover it exactly.
fn check_universe(full: &GridCase, model: &GridCase, provenance: Option<&Provenance>) -> anyhow::Result<()> {
    let all: BTreeSet<BusId> = full.bus_ids().into_iter().collect();
    let ours: BTreeSet<BusId> = model.bus_ids().into_iter().collect();
    if let Some(extra) = ours.difference(&all).next() {
        return Err(anyhow!("bus {extra} is not in the full case"));
    }
    if let Some(p) = provenance {
        let mut covered = ours.clone();
        covered.extend(p.eliminated.iter().copied());
        if covered != all {
            return Err(anyhow!("retained and eliminated buses do not cover the full case"));
        }
    }
    Ok(())
}

fn model_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn compare(cfg: &RunConfig, models: &[PathBuf]) -> Result<(), CliError> {
    let (full, _) = load_case(&cfg.case)?;
    let full_report = topology_report(&full);
    let mut reports = vec![("ori".to_string(), full_report)];
    let mut errors = Vec::new();
    let mut failures = Vec::new();
    for path in models {
        let label = model_label(path);
        let loaded = load_case(&path.to_string_lossy()).map_err(|e| e.error).and_then(|(model, prov)| {
            check_universe(&full, &model, prov.as_ref())
                .with_context(|| format!("model {} does not match the full case", path.display()))?;
            Ok(model)
        });
        match loaded {
            Ok(model) => {
                let report = topology_report(&model);
                errors.push((label.clone(), relative_errors(&full_report, &report)));
                reports.push((label, report));
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                failures.push(path.display().to_string());
            }
        }
    }
    match cfg.format {
        Format::Csv => {
            write_atomic(&cfg.out.join("topology.csv"), &topology_csv(&reports))?;
            write_atomic(&cfg.out.join("errors.csv"), &errors_csv(&errors))?;
        }
        Format::Json => {
            write_atomic(&cfg.out.join("topology.json"), &to_json(&reports)?)?;
            write_atomic(&cfg.out.join("errors.json"), &to_json(&errors)?)?;
        }
    }
    print!("{}", topology_csv(&reports));
    if failures.is_empty() {
        Ok(())
    } else {
        Err(anyhow!("{} of {} models failed: {}", failures.len(), models.len(), failures.join(", ")).into())
    }
}

pub fn selftest(cfg: &RunConfig, fuzz: usize) -> Result<(), CliError> {
    let mut failed = 0;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    };

    let frame = GradeFrame::new(3)?;
    let a = encode_ranking(&[3, 2, 1], frame, 0.9)?;
    let b = encode_ranking(&[1, 2, 3], frame, 0.9)?;
    let w = AttributeWeights::new(vec![0.5, 0.5])?;
    let expected = [([0.452, 0.0, 0.452], 0.096), ([0.0, 0.93, 0.0], 0.07), ([0.452, 0.0, 0.452], 0.096)];
    let mut err: f64 = 0.0;
    for (i, (beliefs, unc)) in expected.iter().enumerate() {
        let c = combine_evidence(&[a[i].clone(), b[i].clone()], &w)?;
        for (x, y) in c.combined_beliefs.iter().zip(beliefs) {
            err = err.max((x - y).abs());
        }
        err = err.max((c.residual_uncertainty - unc).abs());
    }
    check("three-node fusion example", err <= 1e-3, format!("max error {err:.2e} (tol 1e-3)"));

    let t = topology_report(&ieee30());
    let ok = format!("{:.4}", t.density) == "0.0943"
        && format!("{:.4}", t.avg_degree) == "2.7333"
        && (t.avg_path_unweighted - 3.3057).abs() / 3.3057 <= 0.005
        && (t.betweenness_unweighted - 33.43).abs() / 33.43 <= 0.01;
    check(
        "30-bus topology",
        ok,
        format!(
            "rho {:.4}, d_avg {:.4}, l_0 {:.4}, B_0 {:.2}",
            t.density, t.avg_degree, t.avg_path_unweighted, t.betweenness_unweighted
        ),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..fuzz {
        let grades = rng.random_range(2..=12);
        let count = rng.random_range(1..=5);
        let dists: Vec<BeliefDistribution> = (0..count)
            .map(|_| {
                let raw: Vec<f64> = (0..grades).map(|_| rng.random_range(0.0..1.0)).collect();
                let total: f64 = raw.iter().sum();
                let keep = rng.random_range(0.0..=1.0);
                BeliefDistribution::new(raw.iter().map(|x| x / total * keep).collect())
            })
            .collect::<Result<_, _>>()?;
        let weights: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
        let c = combine_evidence(&dists, &AttributeWeights::new(weights.clone())?)?;
        worst = worst.max((c.combined_beliefs.iter().sum::<f64>() + c.residual_uncertainty - 1.0).abs());
        let mut order: Vec<usize> = (0..count).collect();
        order.shuffle(&mut rng);
        let d2: Vec<_> = order.iter().map(|&i| dists[i].clone()).collect();
        let w2 = AttributeWeights::new(order.iter().map(|&i| weights[i]).collect())?;
        let c2 = combine_evidence(&d2, &w2)?;
        for (x, y) in c.combined_beliefs.iter().zip(&c2.combined_beliefs) {
            worst = worst.max((x - y).abs());
        }
        let u = evaluate_utility(&c);
        if !(u.u_min <= u.u_avg && u.u_avg <= u.u_max) {
            worst = f64::INFINITY;
        }
    }
    check(
        "fusion fuzzing",
        worst <= 1e-9,
        format!("{fuzz} cases with seed {}, worst deviation {worst:.2e} (tol 1e-9)", cfg.seed),
    );

    if failed == 0 {
        Ok(())
    } else {
        Err(anyhow!("{failed} self-test checks failed").into())
    }
}
