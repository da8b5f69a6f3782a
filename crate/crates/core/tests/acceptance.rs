//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p tipsy-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tipsy_core::chain::{
    absorption_split, expected_rounds, extract_transient, survival_probability,
};
use tipsy_core::closedform::{escape_probability, expected_rounds_closed, up_probability};
use tipsy_core::families::{
    cycle_chain, friendship_chain, petersen_chain, toroidal7_chain, tree_chain,
};
use tipsy_core::graph::{cycle, friendship, petersen, torus, tree_truncated};
use tipsy_core::joint::{build_joint_chain, lump, max_discrepancy, Lumping, StrategyRules};
use tipsy_core::montecarlo::{run, SimConfig, SimReport, Start};
use tipsy_core::tables::{paper_table, reproduce_table, tolerance, CellReport};
use tipsy_core::{Graph, MarkovChain, SpinnerFour, SpinnerThree};

type Outcome = Result<String, String>;

fn s3(c: f64, r: f64, t: f64) -> SpinnerThree {
    SpinnerThree::new(c, r, t).expect("valid spinner")
}

fn describe(cells: &[&CellReport]) -> String {
    cells
        .iter()
        .take(5)
        .map(|c| {
            format!(
                "{}({}) [{}]: printed {} computed {:.6}",
                c.cell.measure, c.cell.state, c.cell.setting, c.cell.printed, c.computed
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Every cell against the printed value.
fn literal(id: &str) -> Result<(usize, Vec<CellReport>), String> {
    let rep = reproduce_table(id).map_err(|e| e.to_string())?;
    let n = rep.cells.len();
    let bad = rep
        .cells
        .into_iter()
        .filter(|c| !c.matches_printed)
        .collect();
    Ok((n, bad))
}

fn literal_outcome(id: &str) -> Outcome {
    let (n, bad) = literal(id)?;
    if bad.is_empty() {
        Ok(format!("{n}/{n} cells"))
    } else {
        let refs: Vec<_> = bad.iter().collect();
        Err(format!(
            "{} of {n} cells off: {}",
            bad.len(),
            describe(&refs)
        ))
    }
}

fn criterion_1() -> Outcome {
    let s = s3(0.3, 0.4, 0.3);
    let (n, degree) = (10, 4);
    let p = up_probability(degree, s);
    let ts = extract_transient(&tree_chain(degree, n, s).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let mut worst_gap = 0.0f64;
    let mut bad = Vec::new();
    let cells = paper_table("tree3.1").map_err(|e| e.to_string())?;
    for cell in &cells {
        let d: usize = cell.state.parse().map_err(|_| "bad state".to_string())?;
        let i = ts.state(&cell.state).map_err(|e| e.to_string())?;
        let split = absorption_split(&ts, i).map_err(|e| e.to_string())?;
        let win = escape_probability(d, n, p).map_err(|e| e.to_string())?;
        let (chain_val, closed_val) = match cell.measure.as_str() {
            "E" => (
                expected_rounds(&ts, i).map_err(|e| e.to_string())?.value(),
                expected_rounds_closed(d, n, p)
                    .map_err(|e| e.to_string())?
                    .value(),
            ),
            "R" => (split.get("10").unwrap_or(f64::NAN), win.escape),
            "C" => (split.get("0").unwrap_or(f64::NAN), win.capture),
            m => return Err(format!("unexpected measure {m}")),
        };
        worst_gap = worst_gap.max((chain_val - closed_val).abs());
        let tol = tolerance("tree3.1", &cell.measure);
        for (path, v) in [("chain", chain_val), ("closed form", closed_val)] {
            if !tol.admits(v, cell.paper) {
                bad.push(format!(
                    "{path} {}({d}) = {v:.6} vs {}",
                    cell.measure, cell.printed
                ));
            }
        }
    }
    if worst_gap > 1e-6 {
        bad.push(format!("paths disagree by {worst_gap:e}"));
    }
    if bad.is_empty() {
        Ok(format!(
            "{} cells via both paths, max path gap {worst_gap:.1e}",
            cells.len()
        ))
    } else {
        Err(bad.join("; "))
    }
}

fn expect_exact(chain: MarkovChain, checks: &[(&str, f64)]) -> Result<(), String> {
    let ts = extract_transient(&chain).map_err(|e| e.to_string())?;
    for &(label, want) in checks {
        let i = ts.state(label).map_err(|e| e.to_string())?;
        let e = expected_rounds(&ts, i).map_err(|e| e.to_string())?.value();
        if (e - want).abs() > 1e-6 {
            return Err(format!("E({label}) = {e} expected {want}"));
        }
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let cells = literal_outcome("cycle5.2");
    expect_exact(
        cycle_chain(6, s3(0.0, 0.5, 0.5)).map_err(|e| e.to_string())?,
        &[("1", 34.0), ("2", 44.0), ("3", 46.0)],
    )?;
    cells.map(|m| format!("{m}; r=0.5 column exactly 34, 44, 46"))
}

fn criterion_3() -> Outcome {
    expect_exact(
        petersen_chain(s3(0.5, 0.0, 0.5)).map_err(|e| e.to_string())?,
        &[("1", 2.25), ("2", 3.75)],
    )?;
    literal_outcome("petersen6.1").map(|m| format!("{m}; r=0 column exactly 2.25, 3.75"))
}

fn criterion_4() -> Outcome {
    literal_outcome("friendship7.1")
}

fn criterion_5() -> Outcome {
    let rep = reproduce_table("torus8.1").map_err(|e| e.to_string())?;
    let (errata, regular): (Vec<_>, Vec<_>) = rep.cells.iter().partition(|c| c.cell.erratum);
    let bad: Vec<_> = regular
        .iter()
        .copied()
        .filter(|c| !c.matches_printed)
        .collect();
    if !bad.is_empty() {
        return Err(describe(&bad));
    }
    let [e32] = errata.as_slice() else {
        return Err(format!("expected one erratum cell, found {}", errata.len()));
    };
    if e32.cell.state != "(3,2)" || e32.cell.measure != "E" {
        return Err(format!(
            "unexpected erratum cell {}({})",
            e32.cell.measure, e32.cell.state
        ));
    }
    if !e32.ok || (e32.computed - 75.96).abs() > 0.01 || e32.annotation().is_none() {
        return Err(format!(
            "E(3,2) computed {:.4}, derived value not matched",
            e32.computed
        ));
    }
    Ok(format!(
        "{}/{} regular cells; E(3,2) = {:.4} annotated ({})",
        regular.len(),
        regular.len(),
        e32.computed,
        e32.annotation().unwrap_or_default()
    ))
}

fn criterion_6() -> Outcome {
    let mut summary = Vec::new();
    for id in ["time9.1", "time9.2"] {
        let rep = reproduce_table(id).map_err(|e| e.to_string())?;
        let bad: Vec<_> = rep.cells.iter().filter(|c| !c.matches_printed).collect();
        if !bad.is_empty() {
            return Err(format!("{id}: {}", describe(&bad)));
        }
        let full: Vec<_> = rep
            .cells
            .iter()
            .filter(|c| c.cell.setting == "share=1" && c.cell.measure == "E")
            .collect();
        if full.is_empty() || full.iter().any(|c| c.computed.is_finite()) {
            return Err(format!("{id}: 100% column not reported infinite"));
        }
        let finite = rep.cells.len() - full.len();
        summary.push(format!(
            "{id} {finite} finite cells, {} infinite",
            full.len()
        ));
    }
    Ok(summary.join("; "))
}

fn criterion_7() -> Outcome {
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for id in ["dist10.3a", "dist10.3b", "tree10.4a", "tree10.4b"] {
        let rep = reproduce_table(id).map_err(|e| e.to_string())?;
        let bad: Vec<_> = rep.cells.iter().filter(|c| !c.matches_printed).collect();
        if !bad.is_empty() {
            failures.push(format!("{id}: {}", describe(&bad)));
        }
        if id.starts_with("dist") {
            for c in rep.cells.iter().filter(|c| c.cell.setting == "share=1") {
                let good = match c.cell.measure.as_str() {
                    "E" => c.computed.is_infinite(),
                    _ => (c.computed - 1.0).abs() < 1e-12,
                };
                if !good {
                    failures.push(format!(
                        "{id}: 100% column {}({}) = {}",
                        c.cell.measure, c.cell.state, c.computed
                    ));
                }
            }
        }
        summary.push(format!("{id} {}", rep.cells.len()));
    }
    if failures.is_empty() {
        Ok(format!("cells {}", summary.join(", ")))
    } else {
        Err(failures.join("; "))
    }
}

fn random_three(rng: &mut ChaCha8Rng) -> SpinnerThree {
    let w: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
    let sum: f64 = w.iter().sum();
    let (c, r) = (w[0] / sum, w[1] / sum);
    s3(c, r, (1.0 - c - r).max(0.0))
}

fn random_four(rng: &mut ChaCha8Rng) -> SpinnerFour {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
    let sum: f64 = w.iter().sum();
    let (c, r, tc) = (w[0] / sum, w[1] / sum, w[2] / sum);
    SpinnerFour::new(c, r, tc, (1.0 - c - r - tc).max(0.0)).expect("valid spinner")
}

fn lumped(g: &Graph, s: SpinnerFour, lumping: &Lumping) -> Result<MarkovChain, String> {
    let j = build_joint_chain(g, s, StrategyRules::default()).map_err(|e| e.to_string())?;
    lump(&j, lumping).map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    const SPINNERS: usize = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut check = |name: String, a: MarkovChain, b: MarkovChain| -> Result<(), String> {
        let d = max_discrepancy(&a, &b).map_err(|e| format!("{name}: {e}"))?;
        worst = worst.max(d);
        cases += 1;
        if d < 1e-9 {
            Ok(())
        } else {
            Err(format!("{name}: discrepancy {d:e}"))
        }
    };
    let corners = [s3(1.0, 0.0, 0.0), s3(0.0, 0.0, 1.0), s3(0.0, 0.5, 0.5)];
    let threes: Vec<SpinnerThree> = corners
        .iter()
        .copied()
        .chain((0..SPINNERS).map(|_| random_three(&mut rng)))
        .collect();
    for n in 4..=12 {
        let g = cycle(n).map_err(|e| e.to_string())?;
        let by_dist = Lumping::by_distance(&g);
        for &s in &threes {
            check(
                format!("cycle({n})"),
                lumped(&g, s.to_four(), &by_dist)?,
                cycle_chain(n, s).map_err(|e| e.to_string())?,
            )?;
        }
    }
    let g = petersen().map_err(|e| e.to_string())?;
    let by_dist = Lumping::by_distance(&g);
    for &s in &threes {
        check(
            "petersen".into(),
            lumped(&g, s.to_four(), &by_dist)?,
            petersen_chain(s).map_err(|e| e.to_string())?,
        )?;
    }
    for n in 2..=6 {
        let g = friendship(n).map_err(|e| e.to_string())?;
        let classes = Lumping::friendship(&g);
        for _ in 0..SPINNERS {
            let s = random_four(&mut rng);
            check(
                format!("friendship({n})"),
                lumped(&g, s, &classes)?,
                friendship_chain(n, s).map_err(|e| e.to_string())?,
            )?;
        }
    }
    let started = Instant::now();
    let g = torus(7, 7).map_err(|e| e.to_string())?;
    let classes = Lumping::torus(7, 7);
    for &s in &threes {
        check(
            "torus(7,7)".into(),
            lumped(&g, s.to_four(), &classes)?,
            toroidal7_chain(s).map_err(|e| e.to_string())?,
        )?;
    }
    let torus_secs = started.elapsed().as_secs_f64();
    if torus_secs > 30.0 {
        return Err(format!("torus case took {torus_secs:.1} s"));
    }
    Ok(format!(
        "{cases} chains, max discrepancy {worst:.1e}, torus {torus_secs:.2} s"
    ))
}

#[derive(Clone, Copy)]
enum Measure {
    Expectation,
    Survival(u32),
}

struct Setting {
    name: String,
    graph: Graph,
    chain: MarkovChain,
    spinner: SpinnerFour,
    start: Start,
    state: String,
    measure: Measure,
    call_off: Option<u32>,
}

fn family_setting(
    name: &str,
    graph: Graph,
    chain: MarkovChain,
    spinner: SpinnerFour,
    start: Start,
    state: &str,
    measure: Measure,
) -> Setting {
    Setting {
        name: name.into(),
        graph,
        chain,
        spinner,
        start,
        state: state.into(),
        measure,
        call_off: None,
    }
}

fn battery() -> tipsy_core::Result<Vec<Setting>> {
    use Measure::{Expectation as E, Survival as G};
    let dist = |d| Start::Distance(d);
    let pos = |cop, robber| Start::Positions { cop, robber };
    let mut out = Vec::new();
    for (n, (c, r, t), d, m) in [
        (6, (0.0, 0.5, 0.5), 1, E),
        (6, (0.2, 0.3, 0.5), 3, G(7)),
        (7, (0.3, 0.3, 0.4), 2, E),
        (9, (0.25, 0.25, 0.5), 4, G(10)),
        (12, (0.4, 0.2, 0.4), 6, E),
        (5, (0.1, 0.5, 0.4), 2, G(5)),
    ] {
        let s = s3(c, r, t);
        out.push(family_setting(
            &format!("cycle({n}) c={c} r={r} t={t} d={d}"),
            cycle(n)?,
            cycle_chain(n, s)?,
            s.to_four(),
            dist(d),
            &d.to_string(),
            m,
        ));
    }
    for ((c, r, t), d, m) in [
        ((0.5, 0.0, 0.5), 1, G(7)),
        ((0.2, 0.3, 0.5), 1, E),
        ((0.6, 0.2, 0.2), 2, E),
        ((0.1, 0.4, 0.5), 2, G(3)),
    ] {
        let s = s3(c, r, t);
        out.push(family_setting(
            &format!("petersen c={c} r={r} t={t} d={d}"),
            petersen()?,
            petersen_chain(s)?,
            s.to_four(),
            dist(d),
            &d.to_string(),
            m,
        ));
    }
    for ((c, r, tc, tr), label, start, m) in [
        ((0.4, 0.25, 0.1, 0.25), "2", pos(1, 3), E),
        ((0.25, 0.25, 0.25, 0.25), "1rc", pos(1, 0), E),
        ((0.3, 0.4, 0.2, 0.1), "1cc", pos(0, 1), G(10)),
        ((0.2, 0.2, 0.5, 0.1), "1e", pos(1, 2), G(4)),
    ] {
        let s = SpinnerFour::new(c, r, tc, tr)?;
        out.push(family_setting(
            &format!("friendship(5) {label} c={c} r={r} tc={tc} tr={tr}"),
            friendship(5)?,
            friendship_chain(5, s)?,
            s,
            start,
            label,
            m,
        ));
    }
    for ((c, r, t), (a, b), m) in [
        ((0.3, 0.4, 0.3), (3, 3), E),
        ((0.5, 0.2, 0.3), (1, 0), G(10)),
        ((0.4, 0.3, 0.3), (2, 1), E),
    ] {
        let s = s3(c, r, t);
        let label = format!("({a},{b})");
        out.push(family_setting(
            &format!("torus(7,7) {label} c={c} r={r} t={t}"),
            torus(7, 7)?,
            toroidal7_chain(s)?,
            s.to_four(),
            pos(0, a * 7 + b),
            &label,
            m,
        ));
    }
    let tree = tree_truncated(3, 10)?;
    for ((c, r, t), d, m) in [
        ((0.5, 0.2, 0.3), 1, E),
        ((0.4, 0.3, 0.3), 2, G(5)),
        ((0.6, 0.1, 0.3), 3, E),
    ] {
        let s = s3(c, r, t);
        out.push(Setting {
            name: format!("tree(3) call-off 4 c={c} r={r} t={t} d={d}"),
            graph: tree.clone(),
            chain: tree_chain(3, 4, s)?,
            spinner: s.to_four(),
            start: dist(d),
            state: d.to_string(),
            measure: m,
            call_off: Some(4),
        });
    }
    Ok(out)
}

fn simulate(setting: &Setting, trials: u64) -> tipsy_core::Result<SimReport> {
    let mut cfg = SimConfig::new(&setting.graph, setting.spinner, setting.start);
    cfg.trials = trials;
    cfg.max_rounds = 20_000;
    cfg.seed = 0x5eed;
    cfg.call_off = setting.call_off;
    run(&cfg)
}

fn criterion_9() -> Outcome {
    const TRIALS: u64 = 100_000;
    let settings = battery().map_err(|e| e.to_string())?;
    let mut within = 0;
    let mut lines = Vec::new();
    for st in &settings {
        let ts = extract_transient(&st.chain).map_err(|e| e.to_string())?;
        let i = ts.state(&st.state).map_err(|e| e.to_string())?;
        let rep = simulate(st, TRIALS).map_err(|e| format!("{}: {e}", st.name))?;
        let (exact, est) = match st.measure {
            Measure::Expectation => {
                if rep.mean_is_lower_bound {
                    return Err(format!("{}: censored trials", st.name));
                }
                (
                    expected_rounds(&ts, i).map_err(|e| e.to_string())?.value(),
                    rep.mean_rounds,
                )
            }
            Measure::Survival(m) => (
                survival_probability(&ts, i, u64::from(m)).map_err(|e| e.to_string())?,
                rep.survival[m as usize],
            ),
        };
        let z = est.z_score(exact);
        if z <= 3.0 {
            within += 1;
        }
        lines.push(format!(
            "    {:<48} exact {exact:>10.5} mc {:>10.5} ± {:.5} z {z:.2}",
            st.name, est.mean, est.std_error
        ));
    }
    for l in &lines {
        println!("{l}");
    }

    let probe = &settings[1];
    let reference = simulate(probe, 20_000).map_err(|e| e.to_string())?;
    for threads in [1, 3, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let again = pool
            .install(|| simulate(probe, 20_000))
            .map_err(|e| e.to_string())?;
        if again != reference {
            return Err(format!("report differs on {threads} threads"));
        }
    }
    if within >= 18 {
        Ok(format!(
            "{within}/{} settings within 3 SE; reports identical on 1, 3 and 8 threads",
            settings.len()
        ))
    } else {
        Err(format!(
            "only {within}/{} settings within 3 SE",
            settings.len()
        ))
    }
}

#[derive(Debug, Clone)]
enum FamilyCase {
    Cycle(usize, SpinnerThree),
    Petersen(SpinnerThree),
    Friendship(usize, SpinnerFour),
    Torus(SpinnerThree),
    Tree(usize, usize, SpinnerThree),
}

impl FamilyCase {
    fn chain(&self) -> tipsy_core::Result<MarkovChain> {
        match *self {
            FamilyCase::Cycle(n, s) => cycle_chain(n, s),
            FamilyCase::Petersen(s) => petersen_chain(s),
            FamilyCase::Friendship(n, s) => friendship_chain(n, s),
            FamilyCase::Torus(s) => toroidal7_chain(s),
            FamilyCase::Tree(degree, n, s) => tree_chain(degree, n, s),
        }
    }
}

fn spinner3(min_c: f64) -> impl Strategy<Value = SpinnerThree> {
    (min_c..1.0, 0.0..1.0f64, 0.0..1.0f64).prop_map(move |(c, a, b)| {
        let rest = 1.0 - c;
        let r = rest * a / (a + b + 1e-12);
        s3(c, r, (rest - r).max(0.0))
    })
}

fn spinner4(min_c: f64) -> impl Strategy<Value = SpinnerFour> {
    (spinner3(min_c), 0.0..=1.0f64).prop_map(|(s, share)| {
        SpinnerFour::new(s.c(), s.r(), s.t() * share, s.t() * (1.0 - share)).expect("valid spinner")
    })
}

fn family_case(min_c: f64) -> impl Strategy<Value = FamilyCase> {
    prop_oneof![
        (3usize..=12, spinner3(min_c)).prop_map(|(n, s)| FamilyCase::Cycle(n, s)),
        spinner3(min_c).prop_map(FamilyCase::Petersen),
        (2usize..=6, spinner4(min_c)).prop_map(|(n, s)| FamilyCase::Friendship(n, s)),
        spinner3(min_c).prop_map(FamilyCase::Torus),
        (2usize..=6, 2usize..=15, spinner3(min_c)).prop_map(|(k, n, s)| FamilyCase::Tree(k, n, s)),
    ]
}

fn err(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn criterion_10() -> Outcome {
    const CASES: u32 = 1000;
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let mut ran = Vec::new();

    runner
        .run(&family_case(0.0), |case| {
            let chain = case.chain().map_err(err)?;
            let p = chain.matrix();
            for i in 0..chain.len() {
                let sum: f64 = p.row(i).iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-12, "row {i} sums to {sum}");
                prop_assert!(p.row(i).iter().all(|&x| (0.0..=1.0).contains(&x)));
            }
            Ok(())
        })
        .map_err(|e| format!("row-stochasticity: {e}"))?;
    ran.push("row-stochasticity");

    runner
        .run(&(family_case(0.0), 0usize..16), |(case, pick)| {
            let ts = extract_transient(&case.chain().map_err(err)?).map_err(err)?;
            let d = pick % ts.len();
            let mut prev = 1.0;
            for m in 1..=200 {
                let g = survival_probability(&ts, d, m).map_err(err)?;
                prop_assert!((0.0..=1.0 + 1e-12).contains(&g));
                prop_assert!(g <= prev + 1e-12, "G_{m} = {g} > G_{} = {prev}", m - 1);
                prev = g;
            }
            Ok(())
        })
        .map_err(|e| format!("survival monotonicity: {e}"))?;
    ran.push("survival monotone in M");

    runner
        .run(&(family_case(0.05), 0usize..16), |(case, pick)| {
            let ts = extract_transient(&case.chain().map_err(err)?).map_err(err)?;
            let d = pick % ts.len();
            let e = expected_rounds(&ts, d).map_err(err)?.value();
            let mut v = vec![0.0; ts.len()];
            v[d] = 1.0;
            let mut total = 0.0;
            for _ in 0..2_000_000 {
                let g: f64 = v.iter().sum();
                total += g;
                if g < 1e-15 {
                    break;
                }
                v = ts.t().vec_mul(&v);
            }
            prop_assert!((total - e).abs() <= 1e-8 * e, "sum of G = {total}, E = {e}");
            Ok(())
        })
        .map_err(|e| format!("E = sum G: {e}"))?;
    ran.push("E equals the survival sum");

    runner
        .run(&(family_case(0.0), 0usize..16), |(case, pick)| {
            let ts = extract_transient(&case.chain().map_err(err)?).map_err(err)?;
            let d = pick % ts.len();
            let split = absorption_split(&ts, d).map_err(err)?;
            prop_assert!(
                (split.total() - 1.0).abs() < 1e-9,
                "split totals {}",
                split.total()
            );
            if let FamilyCase::Tree(degree, n, s) = case {
                let w = escape_probability(d + 1, n, up_probability(degree, s)).map_err(err)?;
                let esc = split.get(&n.to_string()).unwrap_or(f64::NAN);
                prop_assert!(
                    (esc - w.escape).abs() < 1e-9,
                    "escape {esc} vs {}",
                    w.escape
                );
                prop_assert!((w.escape + w.capture - 1.0).abs() < 1e-15);
            }
            Ok(())
        })
        .map_err(|e| format!("absorption split: {e}"))?;
    ran.push("absorption sums to 1");

    let continuity = (2usize..=2000, 0.0..1.0f64, -9.0..-5.0f64, prop::bool::ANY);
    runner
        .run(&continuity, |(n, frac, log_eps, above)| {
            let d = 1 + ((n - 1) as f64 * frac) as usize % (n - 1);
            let eps = 10f64.powf(log_eps) * 1.0000001;
            let p = if above { 0.5 + eps } else { 0.5 - eps };
            let fair = (d * (n - d)) as f64;
            let e = expected_rounds_closed(d, n, p).map_err(err)?.value();
            let r = escape_probability(d, n, p).map_err(err)?.escape;
            let nf = n as f64;
            // slopes at p = 1/2: |dE/dp| <= n^3 and |dR/dp| <= 2n, up to constants
            prop_assert!(
                (e - fair).abs() <= 1e-9 * fair + eps * nf.powi(3),
                "E({d}; {n}, {p}) = {e} vs {fair}"
            );
            prop_assert!(
                (r - d as f64 / nf).abs() <= 1e-12 + 4.0 * eps * nf,
                "R({d}; {n}, {p}) = {r}"
            );
            let lower = expected_rounds_closed(d, n, 0.5 - eps)
                .map_err(err)?
                .value();
            let upper = expected_rounds_closed(d, n, 0.5 + eps)
                .map_err(err)?
                .value();
            prop_assert!((lower - upper).abs() <= 1e-9 * fair + 2.0 * eps * nf.powi(3));
            Ok(())
        })
        .map_err(|e| format!("fair continuity: {e}"))?;
    ran.push("continuity at p = 1/2");

    Ok(format!(
        "{} properties x {CASES} cases: {}",
        ran.len(),
        ran.join(", ")
    ))
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("gambler's-ruin table, chain and closed form", criterion_1),
        ("cycle table", criterion_2),
        ("Petersen table", criterion_3),
        ("friendship table", criterion_4),
        ("torus table with derived E(3,2)", criterion_5),
        ("time-varying tables", criterion_6),
        ("distance-varying tables", criterion_7),
        ("lumpability oracle", criterion_8),
        ("Monte-Carlo agreement and reproducibility", criterion_9),
        ("property suite", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = f();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name} ({secs:.1} s): {detail}",
                k + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name} ({secs:.1} s): {detail}",
                    k + 1
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
