use tipsy_core::chain::{
    absorption_split, expected_rounds, extract_transient, survival_probability, Expectation,
};
use tipsy_core::closedform::{escape_probability, expected_rounds_closed, up_probability};
use tipsy_core::joint::{build_joint_chain, lump, max_discrepancy, Lumping, LUMP_TOLERANCE};
use tipsy_core::montecarlo::{run, Estimate, SimConfig, Start};
use tipsy_core::schedules::{
    distance_cycle_chain, distance_tree_chain, time_varying_expectation, time_varying_survival,
    BoundaryTipsiness, DistanceSchedule, Schedule, SoberSplit, TimeSchedule,
};
use tipsy_core::tables::{reproduce_table, Tolerance, TABLE_IDS};
use tipsy_core::{Error, Graph, MarkovChain, SpinnerThree};

use crate::output::{Cell, Report};
use crate::scenario::{rules, Model, Spinner};
use crate::{
    config, AnalyzeArgs, BoundaryArg, CliError, ClosedFormArgs, FamilyKind, Outcome, ReproduceArgs,
    SimulateArgs, TieBreakArg, VerifyArgs,
};

/// Summation tolerance for time-varying expectations.
const SERIES_TOL: f64 = 1e-12;

fn survival_columns(rounds: &[u32]) -> impl Iterator<Item = String> + '_ {
    rounds.iter().map(|m| format!("G{m}"))
}

fn note_infinite(e: &Expectation, label: &str, notes: &mut Vec<String>) {
    if let Some(why) = e.note() {
        notes.push(format!("E({label}) is infinite: {why}"));
    }
}

/// One row per transient state: `G_M` for each requested `M`, then `E`, then the
/// escape/capture split when the chain has two exits.
fn static_report(
    chain: &MarkovChain,
    rounds: &[u32],
    split: Option<(&str, &str)>,
) -> Result<Report, CliError> {
    let ts = extract_transient(chain)?;
    let mut columns: Vec<String> = vec!["state".into()];
    columns.extend(survival_columns(rounds));
    columns.push("E".into());
    if split.is_some() {
        columns.extend(["R".into(), "C".into()]);
    }
    let mut report = Report::new(columns);
    for (i, label) in ts.labels().iter().enumerate() {
        let mut row: Vec<Cell> = vec![label.as_str().into()];
        for &m in rounds {
            row.push(survival_probability(&ts, i, u64::from(m))?.into());
        }
        let e = expected_rounds(&ts, i)?;
        note_infinite(&e, label, &mut report.notes);
        row.push(e.value().into());
        if let Some((escape, capture)) = split {
            let (r, c) = match absorption_split(&ts, i) {
                Ok(s) => (s.get(escape).unwrap_or(0.0), s.get(capture).unwrap_or(0.0)),
                Err(Error::Divergent { split: s, total }) => {
                    report
                        .notes
                        .push(format!("from {label} only {total} of the mass is absorbed"));
                    (s.get(escape).unwrap_or(0.0), s.get(capture).unwrap_or(0.0))
                }
                Err(e) => return Err(e.into()),
            };
            row.extend([r.into(), c.into()]);
        }
        report.push(row);
    }
    Ok(report)
}

/// Distance chain of a graph file when distance classes lump exactly, else the joint chain.
fn file_chain(g: &Graph, s: Spinner, tie: TieBreakArg) -> Result<(MarkovChain, String), CliError> {
    let joint = build_joint_chain(g, s.four(), rules(tie))?;
    match lump(&joint, &Lumping::by_distance(g)) {
        Ok(chain) => Ok((chain, "states are cop-robber distances (exactly lumpable)".into())),
        Err(Error::NotLumpable { class, first, second, discrepancy }) => Ok((
            joint.to_markov_chain()?,
            format!(
                "distance classes do not lump ({first} and {second} in class {class} differ by {discrepancy:.3e}); \
                 reporting every (cop, robber) pair"
            ),
        )),
        Err(e) => Err(e.into()),
    }
}

fn tree_exits(model: &Model) -> Option<(String, String)> {
    match model {
        Model::Tree { max_dist, .. } => Some((max_dist.to_string(), "0".into())),
        _ => None,
    }
}

pub fn analyze(a: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let model = Model::from_args(&a.graph)?;
    let exits = tree_exits(&model);
    let exits = exits.as_ref().map(|(r, c)| (r.as_str(), c.as_str()));
    let Some(text) = &a.schedule else {
        if a.robber_share.is_some() {
            return Err(config(
                "robber-share",
                "only applies together with --schedule",
            ));
        }
        let s = a.spinner.resolve()?;
        let (chain, note) = match &model {
            Model::File(g) => {
                let (chain, note) = file_chain(g, s, a.tie_break)?;
                (chain, Some(note))
            }
            m => (m.chain(s)?, None),
        };
        let mut report = static_report(&chain, &a.rounds, exits)?;
        report.notes.extend(note);
        return Ok(Outcome::ok(report));
    };

    if !a.spinner.is_empty() {
        return Err(config(
            "schedule",
            "a schedule sets the spinner each round; drop --c/--r/--t/--tc/--tr",
        ));
    }
    let share = a
        .robber_share
        .ok_or_else(|| config("robber-share", "required with --schedule"))?;
    let split = SoberSplit::new(share).map_err(|e| config("robber-share", e.to_string()))?;
    let sched: Schedule = text
        .parse()
        .map_err(|e: Error| config("schedule", e.to_string()))?;
    match sched {
        Schedule::Time(ts) => time_report(&model, split, &ts, &a.rounds, a.max_terms),
        Schedule::Distance(ds) => {
            let boundary = match a.boundary {
                BoundaryArg::Own => BoundaryTipsiness::OwnDistance,
                BoundaryArg::Previous => BoundaryTipsiness::PreviousDistance,
            };
            let (chain, warnings) = distance_chain(&model, split, &ds, boundary)?;
            let mut out = Outcome::ok(static_report(&chain, &a.rounds, exits)?);
            out.warnings = warnings;
            Ok(out)
        }
    }
}

fn distance_chain(
    model: &Model,
    split: SoberSplit,
    sched: &DistanceSchedule,
    boundary: BoundaryTipsiness,
) -> Result<(MarkovChain, Vec<String>), CliError> {
    match *model {
        Model::Cycle(n) => Ok((
            distance_cycle_chain(n, split, sched, boundary)?,
            sched.warnings(n / 2),
        )),
        Model::Tree { degree, max_dist } => Ok((
            distance_tree_chain(degree, max_dist, split, sched)?,
            sched.warnings(max_dist),
        )),
        _ => Err(config(
            "schedule",
            "distance schedules apply to --family cycle and --family tree",
        )),
    }
}

fn time_report(
    model: &Model,
    split: SoberSplit,
    sched: &TimeSchedule,
    rounds: &[u32],
    max_terms: u32,
) -> Result<Outcome, CliError> {
    if let Model::File(_) = model {
        return Err(config("schedule", "time schedules need a --family"));
    }
    let builder = |s: SpinnerThree| -> tipsy_core::Result<MarkovChain> {
        let spinner = match model {
            Model::Friendship(_) => Spinner::Four(s.to_four()),
            _ => Spinner::Three(s),
        };
        model.chain(spinner).map_err(|e| match e {
            CliError::Model(e) => e,
            other => Error::InvalidParameter(other.to_string()),
        })
    };
    let first = extract_transient(&builder(split.spinner(sched.at(1)?)?)?)?;
    let mut columns: Vec<String> = vec!["state".into()];
    columns.extend(survival_columns(rounds));
    columns.extend(["E".into(), "terms".into()]);
    let mut report = Report::new(columns);
    for (i, label) in first.labels().iter().enumerate() {
        let mut row: Vec<Cell> = vec![label.as_str().into()];
        for &m in rounds {
            row.push(time_varying_survival(&builder, split, sched, i, m)?.into());
        }
        let series = time_varying_expectation(&builder, split, sched, i, SERIES_TOL, max_terms)?;
        note_infinite(&series.value, label, &mut report.notes);
        if !series.converged && !series.value.is_infinite() {
            report.notes.push(format!(
                "E({label}) is the partial sum of {} terms",
                series.terms_used
            ));
        }
        row.extend([
            series.value.value().into(),
            u64::from(series.terms_used).into(),
        ]);
        report.push(row);
    }
    let mut out = Outcome::ok(report);
    out.warnings = sched.warnings(max_terms);
    Ok(out)
}

fn tolerance_text(t: Tolerance) -> String {
    match t {
        Tolerance::Absolute(x) => format!("±{x}"),
        Tolerance::Relative(x) => format!("±{}%", x * 100.0),
        Tolerance::LastDigit => "±1 last digit".into(),
    }
}

pub fn reproduce(a: &ReproduceArgs) -> Result<Outcome, CliError> {
    let ids: Vec<&str> = if a.id == "all" {
        TABLE_IDS.to_vec()
    } else {
        vec![a.id.as_str()]
    };
    let mut report = Report::new([
        "table",
        "measure",
        "state",
        "setting",
        "paper",
        "derived",
        "computed",
        "diff",
        "tolerance",
        "status",
        "note",
    ]);
    let mut all_ok = true;
    for id in ids {
        let rep = reproduce_table(id)?;
        let (mut failed, mut errata) = (0, 0);
        for c in &rep.cells {
            let status = match (c.ok, c.cell.erratum) {
                (false, _) => {
                    failed += 1;
                    "FAIL"
                }
                (true, true) => {
                    errata += 1;
                    "erratum"
                }
                (true, false) => "ok",
            };
            let derived = match (c.cell.erratum, c.cell.derived) {
                (true, Some(d)) => Cell::Num(d.value),
                _ => Cell::Text(String::new()),
            };
            report.push(vec![
                id.into(),
                c.cell.measure.as_str().into(),
                c.cell.state.as_str().into(),
                c.cell.setting.as_str().into(),
                c.cell.printed.as_str().into(),
                derived,
                c.computed.into(),
                c.abs_diff().into(),
                tolerance_text(c.tolerance).into(),
                status.into(),
                c.annotation().unwrap_or_default().into(),
            ]);
        }
        for line in &rep.description {
            report.notes.push(format!("{id}: {line}"));
        }
        report.notes.push(format!(
            "{id}: {} cells, {failed} outside tolerance, {errata} known misprints",
            rep.cells.len()
        ));
        all_ok &= rep.passed();
    }
    Ok(Outcome {
        report,
        within_tolerance: all_ok,
        warnings: Vec::new(),
    })
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    if a.family == FamilyKind::Tree {
        return Err(config(
            "family",
            "verify supports cycle, petersen, friendship and torus7",
        ));
    }
    let model = Model::family(a.family, a.n, None, None)?;
    let s = a.spinner.resolve()?;
    let hand = model.chain(s)?;
    let (graph, _) = model.graph()?;
    let lumping = match model {
        Model::Friendship(_) => Lumping::friendship(&graph),
        Model::Torus7 => Lumping::torus(7, 7),
        _ => Lumping::by_distance(&graph),
    };
    let joint = build_joint_chain(&graph, s.four(), rules(a.tie_break))?;
    let mut report = Report::new([
        "family",
        "joint_states",
        "classes",
        "max_discrepancy",
        "status",
    ]);
    let name = match model {
        Model::Cycle(n) => format!("cycle({n})"),
        Model::Friendship(n) => format!("friendship({n})"),
        Model::Petersen => "petersen".into(),
        _ => "torus(7,7)".into(),
    };
    let (disc, status) = match lump(&joint, &lumping) {
        Ok(lumped) => {
            let d = max_discrepancy(&lumped, &hand)?;
            (d, if d < LUMP_TOLERANCE { "ok" } else { "FAIL" })
        }
        Err(Error::NotLumpable {
            class,
            first,
            second,
            discrepancy,
        }) => {
            report.notes.push(format!(
                "class {class} is not lumpable: {first} and {second} aggregate differently (by {discrepancy:e})"
            ));
            (discrepancy, "not lumpable")
        }
        Err(e) => return Err(e.into()),
    };
    report.push(vec![
        name.into(),
        joint.len().into(),
        lumping.labels().len().into(),
        disc.into(),
        status.into(),
    ]);
    Ok(Outcome {
        report,
        within_tolerance: status == "ok",
        warnings: Vec::new(),
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    let model = Model::from_args(&a.graph)?;
    let s = a.spinner.resolve()?;
    if model.needs_four_way() && matches!(s, Spinner::Three(_)) {
        return Err(config("t", "friendship graphs need separate --tc and --tr"));
    }
    if let Some(&m) = a.rounds.iter().find(|&&m| m > a.max_rounds) {
        return Err(config(
            "rounds",
            format!("G{m} lies beyond --max-rounds {}", a.max_rounds),
        ));
    }
    let (graph, call_off) = model.graph()?;
    let start = match (a.cop, a.robber) {
        (Some(cop), Some(robber)) => Start::Positions { cop, robber },
        _ => Start::Distance(a.distance.unwrap_or(1)),
    };
    let mut cfg = SimConfig::new(&graph, s.four(), start);
    cfg.rules = rules(a.tie_break);
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.max_rounds = a.max_rounds;
    cfg.call_off = call_off;
    let rep = run(&cfg).map_err(|e| match e {
        Error::InvalidStart(_) | Error::InvalidParameter(_) => config("distance", e.to_string()),
        e => e.into(),
    })?;

    // exact values where the start state is a distance class of a hand-built chain
    let exact = match (&model, start) {
        (Model::Cycle(_) | Model::Petersen | Model::Tree { .. }, Start::Distance(d)) => {
            let ts = extract_transient(&model.chain(s)?)?;
            ts.index_of(&d.to_string()).map(|i| (ts, i))
        }
        _ => None,
    };
    let exact_cell = |v: tipsy_core::Result<f64>| -> Result<Cell, CliError> { Ok(Cell::Num(v?)) };
    let mut report = Report::new(["measure", "estimate", "std_error", "exact", "z"]);
    let mut push = |name: String, est: Estimate, exact: Option<Cell>| {
        let z = match &exact {
            Some(Cell::Num(v)) => Cell::Num(est.z_score(*v)),
            _ => Cell::Text(String::new()),
        };
        report.push(vec![
            name.into(),
            est.mean.into(),
            est.std_error.into(),
            exact.unwrap_or(Cell::Text(String::new())),
            z,
        ]);
    };
    for &m in &a.rounds {
        let ex = match &exact {
            Some((ts, i)) => Some(exact_cell(survival_probability(ts, *i, u64::from(m)))?),
            None => None,
        };
        push(format!("G{m}"), rep.survival[m as usize], ex);
    }
    let ex = match &exact {
        Some((ts, i)) => Some(exact_cell(expected_rounds(ts, *i).map(|e| e.value()))?),
        None => None,
    };
    push("E".into(), rep.mean_rounds, ex);
    let proportion = |p: f64| Estimate {
        mean: p,
        std_error: (p * (1.0 - p) / rep.trials as f64).sqrt(),
    };
    push("capture".into(), proportion(rep.capture_fraction), None);
    if call_off.is_some() {
        push("escape".into(), proportion(rep.escape_fraction), None);
    }
    push("censored".into(), proportion(rep.censored_fraction), None);

    let mut out = Outcome::ok(report);
    if rep.mean_is_lower_bound {
        out.warnings.push(format!(
            "{:.3}% of trials reached --max-rounds {}; E is a lower bound",
            100.0 * rep.censored_fraction,
            a.max_rounds
        ));
    }
    out.report.notes.push(format!(
        "{} trials, seed {}; trial k draws from ChaCha8 seeded with the seed, stream k",
        rep.trials, a.seed
    ));
    Ok(out)
}

pub fn closed_form(a: &ClosedFormArgs) -> Result<Outcome, CliError> {
    let n = a.max_dist;
    if n < 2 {
        return Err(config("max-dist", "must be at least 2"));
    }
    let p = match a.p {
        Some(p) if p > 0.0 && p < 1.0 => p,
        Some(p) => return Err(config("p", format!("must lie in (0, 1), got {p}"))),
        None => {
            let degree = a
                .delta
                .ok_or_else(|| config("delta", "give --delta with a spinner, or --p"))?;
            if degree < 2 {
                return Err(config("delta", "must be at least 2"));
            }
            up_probability(degree, a.spinner.resolve()?.merged()?)
        }
    };
    let ds: Vec<usize> = if a.d.is_empty() {
        (1..n).collect()
    } else {
        a.d.clone()
    };
    if let Some(&d) = ds.iter().find(|&&d| d == 0 || d >= n) {
        return Err(config(
            "d",
            format!("start distance {d} must lie in 1..{}", n - 1),
        ));
    }
    let mut report = Report::new(["d", "E", "R", "C", "E_unbounded"]);
    for d in ds {
        let win = escape_probability(d, n, p)?;
        let unbounded = if p < 0.5 {
            d as f64 / (1.0 - 2.0 * p)
        } else {
            f64::INFINITY
        };
        report.push(vec![
            d.into(),
            expected_rounds_closed(d, n, p)?.value().into(),
            win.escape.into(),
            win.capture.into(),
            unbounded.into(),
        ]);
    }
    report.notes.push(format!(
        "up-step probability p = {p}, call-off distance {n}"
    ));
    Ok(Outcome::ok(report))
}
