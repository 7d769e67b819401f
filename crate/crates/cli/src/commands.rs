//! Subcommand implementations. Every command validates its inputs and
//! parameters before starting any computation.

use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use localdepth::classify::{
    accuracy, cross_validate, default_k_grid, default_locality_grid, predict_grid, Family, LabeledDataset,
};
use localdepth::invariants::run_suite;
use localdepth::io::{self, create_output, fmt_num, read_dataset, LoadedData, ReadOptions};
use localdepth::outlier::{
    dissimilarity, flag_count, lof_scores, precision_at_known_rate, DepthMethod, DepthScorer, Direction,
    Dissimilarity, OutlierReport,
};
use localdepth::pild::{column_centrality, pild_similarity, PildBasis};
use localdepth::simdata::{generate_replicate, replicate, Generated, Scenario, ScenarioSpec, Summary};
use localdepth::{outlier, sample_profiles, Dataset, Error, LocalityGrid, WeightSpec};
use serde_json::{json, Value};

use crate::manifest::Manifest;
use crate::{
    CheckArgs, ClassifyArgs, Command, DepthArgs, OutliersArgs, PildArgs, ReplicateArgs, SimilarityArgs, SimulateArgs,
};

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    ChecksFailed(usize),
}

impl CliError {
    pub fn is_validation(&self) -> bool {
        match self {
            CliError::Lib(e) => e.is_validation(),
            CliError::ChecksFailed(_) => false,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => e.fmt(f),
            CliError::ChecksFailed(n) => write!(f, "{n} invariant check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(Error::Io(e))
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(command: Command, threads: usize) -> CliResult<()> {
    match command {
        Command::Depth(a) => depth(a, threads),
        Command::Pild(a) => pild(a, threads),
        Command::Similarity(a) => similarity(a, threads),
        Command::Classify(a) => classify(a, threads),
        Command::Outliers(a) => outliers(a, threads),
        Command::Simulate(a) => simulate(a, threads),
        Command::Replicate(a) => replicate_cmd(a, threads),
        Command::CheckInvariants(a) => check_invariants(a, threads),
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Lib(Error::InvalidParameter(msg.into()))
}

fn load(path: &Path) -> CliResult<Dataset> {
    Ok(read_dataset(path, &ReadOptions::default())?.dataset)
}

fn has_column(path: &Path, name: &str) -> CliResult<bool> {
    use std::io::BufRead as _;
    let mut header = String::new();
    std::io::BufReader::new(std::fs::File::open(path)?).read_line(&mut header)?;
    Ok(header.trim().split(',').any(|h| h.trim().trim_matches('"') == name))
}

fn depth(a: DepthArgs, threads: usize) -> CliResult<()> {
    let spec = WeightSpec::parse(&a.weights)?;
    let x = load(&a.data)?;
    let grid = LocalityGrid::new(x.len(), a.min_points)?;
    let w = spec.resolve(&grid)?;
    let profiles = sample_profiles(&x, &grid)?;
    let sild = profiles.iter().map(|p| p.sild(&w)).collect::<Result<Vec<_>, _>>()?;
    io::write_profiles(create_output(&a.out)?, &grid, &profiles, &sild)?;
    Manifest::new("depth", threads)
        .arg("data", a.data.display().to_string())
        .arg("weights", spec.to_string())
        .arg("min_points", a.min_points)
        .output(&a.out)
        .result("n", x.len())
        .result("levels", grid.len())
        .write(&a.out)?;
    Ok(())
}

fn pild(a: PildArgs, threads: usize) -> CliResult<()> {
    let spec = WeightSpec::parse(&a.weights)?;
    let x = load(&a.data)?;
    spec.resolve(&LocalityGrid::new(x.len(), a.min_points)?)?;
    let p = PildBasis::build(&x, a.min_points)?.matrix(&spec)?;
    io::write_matrix(create_output(&a.out)?, p.ids(), p.entries())?;
    let mut m = Manifest::new("pild", threads);
    m.arg("data", a.data.display().to_string())
        .arg("weights", spec.to_string())
        .arg("min_points", a.min_points)
        .output(&a.out);
    if let Some(path) = &a.centrality_out {
        let mut out = create_output(path)?;
        writeln!(out, "id,centrality")?;
        for (id, c) in p.ids().iter().zip(column_centrality(&p)) {
            writeln!(out, "{id},{}", fmt_num(c))?;
        }
        out.flush()?;
        m.output(path);
    }
    m.write(&a.out)?;
    Ok(())
}

fn similarity(a: SimilarityArgs, threads: usize) -> CliResult<()> {
    let spec = WeightSpec::parse(&a.weights)?;
    if a.kind != "pild" && a.kind != "sd" {
        return Err(invalid(format!("--kind must be pild or sd, got '{}'", a.kind)));
    }
    let x = load(&a.data)?;
    let s = if a.kind == "pild" {
        spec.resolve(&LocalityGrid::new(x.len(), a.min_points)?)?;
        pild_similarity(&PildBasis::build(&x, a.min_points)?.matrix(&spec)?)?
    } else {
        outlier::reflected_depth_similarity(&x)?
    };
    io::write_matrix(create_output(&a.out)?, s.ids(), s.entries())?;
    Manifest::new("similarity", threads)
        .arg("data", a.data.display().to_string())
        .arg("kind", a.kind.as_str())
        .arg("weights", spec.to_string())
        .output(&a.out)
        .write(&a.out)?;
    Ok(())
}

/// `None` for `cv`, otherwise the parsed or default parameter.
fn parse_param(family: Family, param: Option<&str>) -> CliResult<Option<f64>> {
    match (family, param) {
        (Family::MaxDepth, _) => Ok(Some(1.0)),
        // integrated methods default to the full locality range
        (Family::MaxIld | Family::Pild, None) => Ok(Some(1.0)),
        (_, None) => Err(invalid(format!("--param is required for {}", family.name()))),
        (_, Some("cv")) => Ok(None),
        (_, Some(v)) => v
            .parse::<f64>()
            .map(Some)
            .map_err(|_| invalid(format!("--param must be a number or 'cv', got '{v}'"))),
    }
}

fn cv_grid(family: Family, n: usize) -> Vec<f64> {
    if family == Family::DKnn {
        default_k_grid(n)
    } else {
        default_locality_grid()
    }
}

fn classify(a: ClassifyArgs, threads: usize) -> CliResult<()> {
    let family = Family::parse(&a.method)?;
    let param = parse_param(family, a.param.as_deref())?;
    let label_opts = ReadOptions {
        label_column: Some(a.label_col.clone()),
        ..Default::default()
    };
    let train = LabeledDataset::new(read_dataset(&a.train, &label_opts)?.dataset)?;
    let test_opts = if has_column(&a.test, &a.label_col)? {
        label_opts.clone()
    } else {
        ReadOptions::default()
    };
    let test = read_dataset(&a.test, &test_opts)?.dataset;

    let mut m = Manifest::new("classify", threads);
    m.seed(a.seed)
        .arg("method", family.name())
        .arg("param", a.param.clone().unwrap_or_default())
        .arg("train", a.train.display().to_string())
        .arg("test", a.test.display().to_string())
        .arg("folds", a.folds);
    let chosen = match param {
        Some(p) => p,
        None => {
            let grid = cv_grid(family, train.len());
            let report = cross_validate(&train, family, &grid, a.folds, a.seed)?;
            m.result("selected", report.selected)
                .result("cv_params", report.params.clone())
                .result("cv_mean_accuracy", report.mean_accuracies.clone());
            report.selected
        }
    };
    let preds = predict_grid(family, &train, &test, &[chosen])?.remove(0);
    io::write_predictions(create_output(&a.out)?, test.ids(), &preds)?;
    m.result("param_used", chosen).output(&a.out);
    if let Some(truth) = test.labels() {
        let acc = accuracy(&preds, truth);
        eprintln!("accuracy {}", fmt_num(acc));
        m.result("accuracy", acc);
    }
    m.write(&a.out)?;
    Ok(())
}

fn parse_k(k: Option<&str>) -> CliResult<Vec<usize>> {
    let k = k.ok_or_else(|| invalid("--k is required for lof"))?;
    let bad = || invalid(format!("--k must be an integer or sweep:lo..hi, got '{k}'"));
    if let Some(range) = k.strip_prefix("sweep:") {
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        Ok((lo..=hi).collect())
    } else {
        Ok(vec![k.trim().parse().map_err(|_| bad())?])
    }
}

fn parse_localities(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| {
            let b: f64 = v
                .trim()
                .parse()
                .map_err(|_| invalid(format!("invalid locality '{v}'")))?;
            if !(b > 0.0 && b <= 1.0) {
                return Err(invalid(format!("locality must be in (0, 1], got {b}")));
            }
            Ok(b)
        })
        .collect()
}

/// One evaluated parameter combination of the outlier sweep.
struct Candidate {
    locality: Option<f64>,
    k: Option<usize>,
    scores: Vec<f64>,
    precision: Option<f64>,
}

fn outliers(a: OutliersArgs, threads: usize) -> CliResult<()> {
    let method = a.method.as_str();
    if !["gd", "ld", "ild", "pildsum", "lof"].contains(&method) {
        return Err(invalid(format!("unknown outlier method '{method}'")));
    }
    let is_lof = method == "lof";
    let ks = if is_lof { parse_k(a.k.as_deref())? } else { vec![0] };
    let uses_locality = matches!(method, "ld" | "ild" | "pildsum") || (is_lof && a.dissim == "pild");
    let localities = parse_localities(&a.locality)?;
    if !uses_locality && localities.len() > 1 {
        return Err(invalid(format!("{method} with --dissim {} takes no locality sweep", a.dissim)));
    }
    let localities = if uses_locality { localities } else { vec![1.0] };
    if is_lof && !["euclid", "sd", "pild"].contains(&a.dissim.as_str()) {
        return Err(invalid(format!("--dissim must be euclid, sd or pild, got '{}'", a.dissim)));
    }
    let LoadedData { dataset: x, truth, .. } = read_dataset(
        &a.data,
        &ReadOptions {
            truth_column: a.truth_col.clone(),
            ..Default::default()
        },
    )?;
    let m = match (a.rate, &truth) {
        (Some(r), _) => flag_count(r, x.len())?,
        (None, Some(t)) => t.iter().filter(|&&v| v).count(),
        (None, None) => return Err(invalid("either --rate or --truth-col is required")),
    };
    let sweeping = ks.len() * localities.len() > 1;
    if sweeping && truth.is_none() {
        return Err(invalid("parameter sweeps select by precision and need --truth-col"));
    }
    if let Some(t) = &truth {
        if !t.iter().any(|&v| v) {
            return Err(Error::NoOutliers.into());
        }
    }
    let direction = if is_lof {
        Direction::HighIsOutlying
    } else {
        Direction::LowIsOutlying
    };
    let precision = |s: &[f64]| -> CliResult<Option<f64>> {
        match &truth {
            Some(t) => Ok(Some(precision_at_known_rate(s, x.ids(), direction, t)?)),
            None => Ok(None),
        }
    };

    let mut candidates = Vec::new();
    if is_lof {
        for &b in &localities {
            let kind = match a.dissim.as_str() {
                "euclid" => Dissimilarity::Euclidean,
                "sd" => Dissimilarity::ReflectedDepth,
                _ => Dissimilarity::Pild { upper: b },
            };
            let d = dissimilarity(&x, kind)?;
            for &k in &ks {
                let scores = lof_scores(&d, k)?;
                candidates.push(Candidate {
                    locality: uses_locality.then_some(b),
                    k: Some(k),
                    precision: precision(&scores)?,
                    scores,
                });
            }
        }
    } else {
        let mut scorer = DepthScorer::new(&x)?;
        for &b in &localities {
            let dm = match method {
                "gd" => DepthMethod::Global,
                "ld" => DepthMethod::Local { beta: b },
                "ild" => DepthMethod::Integrated { upper: b },
                _ => DepthMethod::PildColumnSum { upper: b },
            };
            let scores = scorer.scores(dm)?;
            candidates.push(Candidate {
                locality: uses_locality.then_some(b),
                k: None,
                precision: precision(&scores)?,
                scores,
            });
        }
    }
    // first maximum wins, so ties go to the smaller locality and k
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.precision > candidates[best].precision {
            best = i;
        }
    }
    let sweep: Vec<Value> = candidates
        .iter()
        .map(|c| json!({"locality": c.locality, "k": c.k, "precision": c.precision}))
        .collect();
    let chosen = candidates.swap_remove(best);
    let report = OutlierReport::new(x.ids(), chosen.scores, direction, m, truth.as_deref());
    io::write_outlier_report(create_output(&a.out)?, &report, truth.as_deref())?;
    if let Some(p) = report.precision {
        eprintln!("precision {}", fmt_num(p));
    }
    let mut man = Manifest::new("outliers", threads);
    man.arg("method", method)
        .arg("dissim", a.dissim.as_str())
        .arg("k", a.k.clone().unwrap_or_default())
        .arg("locality", a.locality.as_str())
        .arg("rate", a.rate)
        .arg("data", a.data.display().to_string())
        .output(&a.out)
        .result("flagged", m)
        .result("precision", report.precision)
        .result("locality_used", chosen.locality)
        .result("k_used", chosen.k);
    if sweeping {
        man.result("selection", "oracle: maximum precision over the sweep")
            .result("sweep", sweep);
    }
    man.write(&a.out)?;
    Ok(())
}

fn default_test_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    let ext = out.extension().map_or("csv".into(), |e| e.to_string_lossy());
    out.with_file_name(format!("{stem}_test.{ext}"))
}

fn simulate(a: SimulateArgs, threads: usize) -> CliResult<()> {
    let scenario: Scenario = a.scenario.parse()?;
    let spec = ScenarioSpec::new(scenario, a.seed);
    let mut m = Manifest::new("simulate", threads);
    m.seed(a.seed).arg("scenario", scenario.name()).arg("rep", a.rep);
    match generate_replicate(&spec, a.rep)? {
        Generated::Classification { train, test } => {
            let test_out = a.test_out.clone().unwrap_or_else(|| default_test_path(&a.out));
            io::write_dataset(create_output(&a.out)?, &train, None)?;
            io::write_dataset(create_output(&test_out)?, &test, None)?;
            m.output(&a.out).output(&test_out);
        }
        Generated::Outlier { data, is_outlier } => {
            let labels: Vec<usize> = is_outlier.iter().map(|&o| usize::from(o)).collect();
            io::write_dataset(create_output(&a.out)?, &data, Some(&labels))?;
            m.output(&a.out);
        }
    }
    m.write(&a.out)?;
    Ok(())
}

fn summary_values(s: &Summary) -> Vec<String> {
    [s.mean, s.median, s.q1, s.q3].iter().map(|&v| fmt_num(v)).collect()
}

fn replicate_cmd(a: ReplicateArgs, threads: usize) -> CliResult<()> {
    let scenario: Scenario = a.scenario.parse()?;
    if a.reps == 0 {
        return Err(invalid("--reps must be positive"));
    }
    let spec = ScenarioSpec::new(scenario, a.seed);
    let mut m = Manifest::new("replicate", threads);
    m.seed(a.seed)
        .arg("scenario", scenario.name())
        .arg("reps", a.reps)
        .arg("method", a.method.as_str());
    let (param_label, summaries) = if scenario.is_outlier_scenario() {
        let method = a.method.clone();
        if !["gd", "ld", "ild", "pildsum", "lof"].contains(&method.as_str()) {
            return Err(invalid(format!("unknown outlier method '{method}'")));
        }
        if !(a.locality > 0.0 && a.locality <= 1.0) {
            return Err(invalid(format!("locality must be in (0, 1], got {}", a.locality)));
        }
        let b = a.locality;
        let dissim = match a.dissim.as_str() {
            "euclid" => Dissimilarity::Euclidean,
            "sd" => Dissimilarity::ReflectedDepth,
            "pild" => Dissimilarity::Pild { upper: b },
            other => return Err(invalid(format!("--dissim must be euclid, sd or pild, got '{other}'"))),
        };
        let k = a.k;
        let summaries = replicate(&spec, a.reps, |_, g| {
            let Generated::Outlier { data, is_outlier } = g else {
                unreachable!("outlier scenario")
            };
            let precision = if method == "lof" {
                let s = lof_scores(&dissimilarity(data, dissim)?, k)?;
                precision_at_known_rate(&s, data.ids(), Direction::HighIsOutlying, is_outlier)?
            } else {
                let dm = match method.as_str() {
                    "gd" => DepthMethod::Global,
                    "ld" => DepthMethod::Local { beta: b },
                    "ild" => DepthMethod::Integrated { upper: b },
                    _ => DepthMethod::PildColumnSum { upper: b },
                };
                let s = DepthScorer::new(data)?.scores(dm)?;
                precision_at_known_rate(&s, data.ids(), Direction::LowIsOutlying, is_outlier)?
            };
            Ok(vec![precision])
        })?;
        m.arg("locality", b).arg("k", k).arg("dissim", a.dissim.as_str());
        let label = if method == "lof" { format!("k={k}") } else { format!("locality={}", fmt_num(b)) };
        (label, summaries)
    } else {
        let family = Family::parse(&a.method)?;
        let param = parse_param(family, a.param.as_deref())?;
        let folds = 5;
        let summaries = replicate(&spec, a.reps, |r, g| {
            let Generated::Classification { train, test } = g else {
                unreachable!("classification scenario")
            };
            let train = LabeledDataset::new(train.clone())?;
            let truth = test.labels().expect("generated labels");
            let chosen = match param {
                Some(p) => p,
                None => {
                    let seed = a.seed.wrapping_add(r as u64);
                    cross_validate(&train, family, &cv_grid(family, train.len()), folds, seed)?.selected
                }
            };
            let preds = predict_grid(family, &train, test, &[chosen])?.remove(0);
            Ok(vec![accuracy(&preds, truth), chosen])
        })?;
        m.arg("param", a.param.clone().unwrap_or_default());
        let label = match param {
            None => "cv".to_string(),
            Some(_) if family == Family::MaxDepth => String::new(),
            Some(p) => fmt_num(p),
        };
        (label, summaries)
    };
    let mut out = create_output(&a.out)?;
    writeln!(out, "scenario,method,param,reps,mean,median,q1,q3")?;
    let mut row = vec![scenario.name().to_string(), a.method.clone(), param_label, a.reps.to_string()];
    row.extend(summary_values(&summaries[0]));
    writeln!(out, "{}", row.join(","))?;
    out.flush()?;
    m.output(&a.out).result("values", summaries[0].values.clone());
    if summaries.len() > 1 && a.param.as_deref() == Some("cv") {
        m.result("selected_median", summaries[1].median)
            .result("selected", summaries[1].values.clone());
    }
    m.write(&a.out)?;
    Ok(())
}

fn check_invariants(a: CheckArgs, threads: usize) -> CliResult<()> {
    let checks = run_suite(a.seed, a.n)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut stdout = std::io::stdout().lock();
    for c in &checks {
        writeln!(stdout, "{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    if let Some(path) = &a.out {
        let mut out = create_output(path)?;
        writeln!(out, "check,passed,detail")?;
        for c in &checks {
            writeln!(out, "{},{},{}", c.name, c.passed, c.detail)?;
        }
        out.flush()?;
        Manifest::new("check-invariants", threads)
            .seed(a.seed)
            .arg("n", a.n)
            .output(path)
            .result("failed", failed)
            .write(path)?;
    }
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}
