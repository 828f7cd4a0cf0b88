use std::io::Read;
use std::path::Path;

use krgraph::census::{
    baranyai_covers, binomial, census, census_counts, frequency_bound, k_threshold,
    pattern_k_surrogate, CensusParams, CensusResult, CoverFamily, FrequencyBound, KThreshold,
};
use krgraph::enumeration::{
    aut_bound, automorphisms_with_limit, enumerate_unlabeled_with_limit, prob_class_bound,
    ratio_to_f64, rigidity_report, unlabeled_census, AutReport, ProbClassBound, RigidityReport,
    UnlabeledCensus,
};
use krgraph::formats::{parse_any, to_graph6, to_native};
use krgraph::incompress::{
    block_deviation_bound, calibration_offset, estimate_deficiency_calibrated, k_surrogate,
    random_fraction_bound, BlockBound, BlockStatParams, DeficiencyEstimate,
};
use krgraph::report::Real;
use krgraph::topology::{
    diameter, max_clique, node_connectivity, two_path_summary, Diameter, TwoPathSummary,
};
use krgraph::{Exec, Graph, PatternGraph};
use serde::Serialize;

use crate::config::{Command, Format, RunConfig};
use crate::output::{csv, emit, json, opt, real};
use crate::Failure;

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen { nodes, common } => {
            let mut cfg = RunConfig::new("gen", &common, Format::Native);
            cfg.n = Some(nodes as usize);
            gen(&cfg)
        }
        Command::Analyze {
            input,
            calibration_samples,
            common,
        } => {
            let mut cfg = RunConfig::new("analyze", &common, Format::Json);
            cfg.input = Some(input.display().to_string());
            cfg.calibration_samples = Some(calibration_samples);
            let g = read_graph(&input)?;
            cfg.n = Some(g.n());
            analyze(&cfg, &g, calibration_samples)
        }
        Command::Census {
            nodes,
            k,
            samples,
            input,
            delta,
            alpha,
            no_covers,
            common,
        } => {
            let mut cfg = RunConfig::new("census", &common, Format::Json);
            cfg.k = Some(k as usize);
            cfg.samples = samples;
            cfg.delta = Some(Real(delta));
            cfg.alpha = Some(alpha.into());
            cfg.covers = Some(!no_covers);
            let graphs = match &input {
                Some(path) => {
                    cfg.input = Some(path.display().to_string());
                    vec![read_graph(path)?]
                }
                None => Vec::new(),
            };
            cfg.n = Some(match graphs.first() {
                Some(g) => g.n(),
                None => nodes.expect("required without --input") as usize,
            });
            run_census(&cfg, graphs)
        }
        Command::Covers { nodes, k, common } => {
            let mut cfg = RunConfig::new("covers", &common, Format::Json);
            cfg.n = Some(nodes as usize);
            cfg.k = Some(k as usize);
            covers(&cfg)
        }
        Command::Enumerate { nodes, common } => {
            let mut cfg = RunConfig::new("enumerate", &common, Format::Json);
            cfg.n = Some(nodes as usize);
            enumerate(&cfg)
        }
        Command::Bounds {
            nodes,
            k,
            l,
            k_y,
            delta,
            alpha,
            common,
        } => {
            let mut cfg = RunConfig::new("bounds", &common, Format::Json);
            cfg.n = Some(nodes as usize);
            cfg.k = k.map(|k| k as usize);
            cfg.l = Some(l as usize);
            cfg.k_y = k_y.map(Real);
            cfg.delta = Some(Real(delta));
            cfg.alpha = Some(alpha.into());
            bounds(&cfg)
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?
    };
    Ok(parse_any(text.trim())?)
}

fn only(cfg: &RunConfig, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&cfg.format) {
        Ok(())
    } else {
        Err(Failure::Usage(
            format!("{} does not support --format {:?}", cfg.command, cfg.format).to_lowercase(),
        ))
    }
}

#[derive(Serialize)]
struct GraphDoc {
    n: usize,
    edge_count: usize,
    native: String,
    graph6: String,
}

impl GraphDoc {
    fn new(g: &Graph) -> Self {
        Self {
            n: g.n(),
            edge_count: g.edge_count(),
            native: to_native(g),
            graph6: to_graph6(g),
        }
    }
}

fn gen(cfg: &RunConfig) -> Result<(), Failure> {
    let g = Graph::random(cfg.n.expect("set"), cfg.seed)?;
    let text = match cfg.format {
        Format::Native => format!("{}\n", to_native(&g)),
        Format::Graph6 => format!("{}\n", to_graph6(&g)),
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                graph: GraphDoc,
            }
            json(
                cfg,
                &Doc {
                    graph: GraphDoc::new(&g),
                },
            )?
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = g
                .edges()
                .iter()
                .map(|&(i, j)| vec![i.to_string(), j.to_string()])
                .collect();
            csv(cfg, &["i", "j"], &rows)?
        }
    };
    emit(cfg, &text)
}

#[derive(Serialize)]
struct Degrees {
    min: usize,
    max: usize,
    mean: Real,
    sequence: Vec<usize>,
}

#[derive(Serialize)]
struct Analysis {
    graph: GraphDoc,
    deficiency: DeficiencyEstimate,
    degrees: Degrees,
    two_paths: TwoPathSummary,
    diameter: Diameter,
    /// `null` for a single node.
    node_connectivity: Option<usize>,
    max_clique: usize,
    /// `null` above the automorphism limit.
    automorphisms: Option<AutReport>,
    rigidity: Option<RigidityReport>,
}

fn analyze(cfg: &RunConfig, g: &Graph, calibration_samples: usize) -> Result<(), Failure> {
    only(cfg, &[Format::Json, Format::Csv])?;
    let offset = if calibration_samples > 0 {
        calibration_offset(
            &cfg.compressor_id,
            g.bit_len(),
            calibration_samples,
            cfg.seed,
        )?
    } else {
        0
    };
    let deficiency = estimate_deficiency_calibrated(g, &cfg.compressor_id, offset)?;
    let seq = g.degree_sequence();
    let degrees = Degrees {
        min: seq.iter().copied().min().unwrap_or(0),
        max: seq.iter().copied().max().unwrap_or(0),
        mean: Real(seq.iter().sum::<usize>() as f64 / g.n() as f64),
        sequence: seq,
    };
    let automorphisms = if g.n() <= cfg.limits.automorphisms {
        Some(automorphisms_with_limit(g, cfg.limits.automorphisms)?)
    } else {
        None
    };
    let rigidity = automorphisms
        .as_ref()
        .map(|a| rigidity_report(a, deficiency.delta_hat as f64));
    let report = Analysis {
        graph: GraphDoc::new(g),
        deficiency,
        degrees,
        two_paths: two_path_summary(g),
        diameter: diameter(g),
        node_connectivity: (g.n() >= 2).then(|| node_connectivity(g)).transpose()?,
        max_clique: max_clique(g),
        automorphisms,
        rigidity,
    };
    let text = match cfg.format {
        Format::Json => json(cfg, &report)?,
        _ => {
            let diam = match report.diameter {
                Diameter::Finite(d) => d.to_string(),
                Diameter::Disconnected => "disconnected".into(),
            };
            let row = vec![
                report.graph.n.to_string(),
                report.graph.edge_count.to_string(),
                report.deficiency.delta_hat.to_string(),
                report.deficiency.compressed_len.to_string(),
                report.deficiency.calibration_offset.to_string(),
                report.degrees.min.to_string(),
                report.degrees.max.to_string(),
                real(report.degrees.mean.0),
                report.two_paths.min.to_string(),
                report.two_paths.max.to_string(),
                diam,
                opt(report.node_connectivity),
                report.max_clique.to_string(),
                opt(report.automorphisms.as_ref().map(|a| a.aut_size)),
                opt(report.automorphisms.as_ref().map(|a| a.moved)),
                opt(report.rigidity.as_ref().map(|r| r.falsification_candidate)),
            ];
            csv(
                cfg,
                &[
                    "n",
                    "edge_count",
                    "delta_hat",
                    "compressed_len",
                    "calibration_offset",
                    "degree_min",
                    "degree_max",
                    "degree_mean",
                    "two_path_min",
                    "two_path_max",
                    "diameter",
                    "node_connectivity",
                    "max_clique",
                    "aut_size",
                    "moved",
                    "falsification_candidate",
                ],
                &[row],
            )?
        }
    };
    emit(cfg, &text)
}

#[derive(Serialize)]
struct SingleCensus {
    n: usize,
    k: usize,
    subsets: String,
    covers: Option<usize>,
    graph: GraphDoc,
    bound: Option<FrequencyBound>,
    rows: Vec<CensusResult>,
}

#[derive(Serialize)]
struct SampledRow {
    pattern: String,
    total_mean: Real,
    total_min: u64,
    total_max: u64,
    expected: Real,
    /// Fraction of samples with `|total - expected| <= bound`.
    within_fraction: Option<Real>,
}

#[derive(Serialize)]
struct SampledCensus {
    n: usize,
    k: usize,
    subsets: String,
    covers: Option<usize>,
    samples: u64,
    seeds: String,
    /// `Σ_i #H(G,i) = #H(G)` held for every pattern and sample.
    cover_sums_consistent: Option<bool>,
    bound: Option<FrequencyBound>,
    rows: Vec<SampledRow>,
}

fn census_one(
    g: &Graph,
    k: usize,
    patterns: &[PatternGraph],
    family: Option<&CoverFamily>,
    params: &CensusParams,
) -> krgraph::Result<Vec<CensusResult>> {
    let hist = census_counts(g, k)?;
    patterns
        .iter()
        .zip(&hist)
        .map(|(h, &t)| census(g, h, family, params, Some(t)))
        .collect()
}

fn run_census(cfg: &RunConfig, given: Vec<Graph>) -> Result<(), Failure> {
    only(cfg, &[Format::Json, Format::Csv])?;
    let n = cfg.n.expect("set");
    let k = cfg.k.expect("set");
    if k > n {
        return Err(Failure::Run(format!("pattern size k={k} exceeds n={n}")));
    }
    let family = if cfg.covers == Some(true) {
        Some(baranyai_covers(n, k)?)
    } else {
        None
    };
    let params = CensusParams {
        k_h: None,
        c_k: cfg.c_k.0,
        delta: cfg.delta.map_or(0.0, |d| d.0),
        c: cfg.c_const.0,
        variant: cfg.alpha.unwrap_or_default(),
    };
    let patterns = PatternGraph::all(k)?;
    let subsets = binomial(n, k).map_or_else(|| "overflow".into(), |b| b.to_string());
    let exec = Exec::default();

    if let Some(g) = given.first() {
        let rows = census_one(g, k, &patterns, family.as_ref(), &params)?;
        let doc = SingleCensus {
            n,
            k,
            subsets,
            covers: family.as_ref().map(CoverFamily::h),
            graph: GraphDoc::new(g),
            bound: rows.first().and_then(|r| r.bound),
            rows,
        };
        return emit(cfg, &single_census_text(cfg, &doc)?);
    }

    let seed = cfg.seed;
    let results = exec.map_range(0..cfg.samples, |i| {
        let g = Graph::random(n, seed.wrapping_add(i))?;
        census_one(&g, k, &patterns, family.as_ref(), &params)
    });
    let results: Vec<Vec<CensusResult>> = results.into_iter().collect::<krgraph::Result<_>>()?;
    if cfg.samples == 1 {
        let g = Graph::random(n, seed)?;
        let rows = results.into_iter().next().expect("one sample");
        let doc = SingleCensus {
            n,
            k,
            subsets,
            covers: family.as_ref().map(CoverFamily::h),
            graph: GraphDoc::new(&g),
            bound: rows.first().and_then(|r| r.bound),
            rows,
        };
        return emit(cfg, &single_census_text(cfg, &doc)?);
    }

    let count = results.len() as f64;
    let rows: Vec<SampledRow> = (0..patterns.len())
        .map(|p| {
            let totals: Vec<u64> = results.iter().map(|r| r[p].total).collect();
            let within: Option<Vec<bool>> = results.iter().map(|r| r[p].within).collect();
            SampledRow {
                pattern: results[0][p].pattern.clone(),
                total_mean: Real(totals.iter().sum::<u64>() as f64 / count),
                total_min: totals.iter().copied().min().unwrap_or(0),
                total_max: totals.iter().copied().max().unwrap_or(0),
                expected: Real(results[0][p].expected),
                within_fraction: within
                    .map(|w| Real(w.iter().filter(|&&x| x).count() as f64 / count)),
            }
        })
        .collect();
    let cover_sums_consistent = family.as_ref().map(|_| {
        results
            .iter()
            .flatten()
            .all(|r| r.per_cover.iter().map(|&c| c as u64).sum::<u64>() == r.total)
    });
    let doc = SampledCensus {
        n,
        k,
        subsets,
        covers: family.as_ref().map(CoverFamily::h),
        samples: cfg.samples,
        seeds: format!("{}..{}", seed, seed as u128 + cfg.samples as u128),
        cover_sums_consistent,
        bound: results[0].first().and_then(|r| r.bound),
        rows,
    };
    let text = match cfg.format {
        Format::Json => json(cfg, &doc)?,
        _ => {
            let bound = doc.bound.map(|b| real(b.bound)).unwrap_or_default();
            let rows: Vec<Vec<String>> = doc
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.pattern.clone(),
                        real(r.total_mean.0),
                        r.total_min.to_string(),
                        r.total_max.to_string(),
                        real(r.expected.0),
                        bound.clone(),
                        r.within_fraction.map(|w| real(w.0)).unwrap_or_default(),
                    ]
                })
                .collect();
            csv(
                cfg,
                &[
                    "pattern",
                    "total_mean",
                    "total_min",
                    "total_max",
                    "expected",
                    "bound",
                    "within_fraction",
                ],
                &rows,
            )?
        }
    };
    emit(cfg, &text)
}

fn single_census_text(cfg: &RunConfig, doc: &SingleCensus) -> Result<String, Failure> {
    match cfg.format {
        Format::Json => json(cfg, doc),
        _ => {
            let rows: Vec<Vec<String>> = doc
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.pattern.clone(),
                        r.total.to_string(),
                        real(r.expected),
                        r.bound.map(|b| real(b.bound)).unwrap_or_default(),
                        opt(r.within),
                        r.per_cover
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(" "),
                    ]
                })
                .collect();
            csv(
                cfg,
                &[
                    "pattern",
                    "total",
                    "expected",
                    "bound",
                    "within",
                    "per_cover",
                ],
                &rows,
            )
        }
    }
}

fn covers(cfg: &RunConfig) -> Result<(), Failure> {
    only(cfg, &[Format::Json, Format::Csv])?;
    let family = baranyai_covers(cfg.n.expect("set"), cfg.k.expect("set"))?;
    family.validate()?;
    let text = match cfg.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                h: usize,
                parts: usize,
                #[serde(flatten)]
                family: &'a CoverFamily,
            }
            json(
                cfg,
                &Doc {
                    h: family.h(),
                    parts: family.parts(),
                    family: &family,
                },
            )?
        }
        _ => {
            let mut rows = Vec::new();
            for (i, cover) in family.covers.iter().enumerate() {
                for (j, part) in cover.iter().enumerate() {
                    let nodes: Vec<String> = part.iter().map(|x| x.to_string()).collect();
                    rows.push(vec![
                        (i + 1).to_string(),
                        (j + 1).to_string(),
                        nodes.join(" "),
                    ]);
                }
            }
            csv(cfg, &["cover", "part", "nodes"], &rows)?
        }
    };
    emit(cfg, &text)
}

fn enumerate(cfg: &RunConfig) -> Result<(), Failure> {
    let n = cfg.n.expect("set");
    let limit = cfg.limits.enumeration;
    let exec = Exec::default();
    if matches!(cfg.format, Format::Graph6 | Format::Native) {
        let reps = enumerate_unlabeled_with_limit(n, limit, exec)?;
        let mut text = String::new();
        for g in reps.graphs() {
            text.push_str(&if cfg.format == Format::Graph6 {
                to_graph6(&g)
            } else {
                to_native(&g)
            });
            text.push('\n');
        }
        return emit(cfg, &text);
    }
    let mut rows: Vec<UnlabeledCensus> = Vec::with_capacity(n);
    for m in 1..=n {
        let reps = enumerate_unlabeled_with_limit(m, limit, exec)?;
        rows.push(unlabeled_census(&reps, exec)?);
    }
    let text = match cfg.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                rows: Vec<UnlabeledCensus>,
            }
            json(cfg, &Doc { rows })?
        }
        _ => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let c = &r.counts;
                    vec![
                        c.n.to_string(),
                        c.g_n.to_string(),
                        c.e_n.to_string(),
                        real(ratio_to_f64(&c.e_n)),
                        c.lower.to_string(),
                        c.upper.to_string(),
                        c.within_bounds().to_string(),
                        r.burnside_g_n.to_string(),
                        r.oracle_agrees.to_string(),
                        real(r.rigid_fraction),
                    ]
                })
                .collect();
            csv(
                cfg,
                &[
                    "n",
                    "g_n",
                    "E_n",
                    "E_n_decimal",
                    "lower",
                    "upper",
                    "within_bounds",
                    "burnside_g_n",
                    "oracle_agrees",
                    "rigid_fraction",
                ],
                &table,
            )?
        }
    };
    emit(cfg, &text)
}

#[derive(Serialize)]
struct ClassBoundRow {
    #[serde(flatten)]
    prob: ProbClassBound,
    /// `n^m`, decimal.
    aut_bound: String,
}

#[derive(Serialize)]
struct Bounds {
    /// Block deviation bound over the `n choose 2`-bit encoding.
    block: BlockBound,
    frequency: Option<FrequencyBound>,
    k_threshold: Option<KThreshold>,
    /// Lower bound on the fraction of graphs with deficiency at most `delta`.
    random_fraction: Real,
    classes: Vec<ClassBoundRow>,
}

fn bounds(cfg: &RunConfig) -> Result<(), Failure> {
    only(cfg, &[Format::Json, Format::Csv])?;
    let n = cfg.n.expect("set");
    let l = cfg.l.expect("set");
    let delta = cfg.delta.map_or(0.0, |d| d.0);
    let block = block_deviation_bound(BlockStatParams {
        n: n * (n - 1) / 2,
        l,
        k_y: cfg.k_y.map_or_else(|| k_surrogate(l, cfg.c_k.0), |k| k.0),
        delta,
        c: cfg.c_const.0,
    })?;
    let frequency = match cfg.k {
        Some(k) => Some(frequency_bound(
            n,
            k,
            pattern_k_surrogate(k, cfg.c_k.0),
            delta,
            cfg.c_const.0,
            cfg.alpha.unwrap_or_default(),
        )?),
        None => None,
    };
    let classes = (0..=n)
        .map(|m| {
            Ok(ClassBoundRow {
                prob: prob_class_bound(n, m)?,
                aut_bound: aut_bound(n, m).to_string(),
            })
        })
        .collect::<krgraph::Result<Vec<_>>>()?;
    let report = Bounds {
        block,
        frequency,
        k_threshold: (n >= 2).then(|| k_threshold(n, cfg.c_k.0)).transpose()?,
        random_fraction: Real(random_fraction_bound(delta)),
        classes,
    };
    let text = match cfg.format {
        Format::Json => json(cfg, &report)?,
        _ => {
            let rows: Vec<Vec<String>> = report
                .classes
                .iter()
                .map(|r| {
                    vec![
                        r.prob.m.to_string(),
                        r.aut_bound.clone(),
                        real(r.prob.log2),
                        real(r.prob.value),
                        r.prob.vacuous.to_string(),
                    ]
                })
                .collect();
            csv(
                cfg,
                &["m", "aut_bound", "log2_prob_bound", "prob_bound", "vacuous"],
                &rows,
            )?
        }
    };
    emit(cfg, &text)
}
