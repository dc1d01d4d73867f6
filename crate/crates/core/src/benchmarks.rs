//! Built-in benchmark systems and a regression harness.
//!
//! Fourteen PDE models from fluid mechanics, space physics, chemical
//! engineering, and biology. Each case records the auxiliary set a known
//! good run found for it, so the suite can replay the search and check it
//! still reaches that order, and the verifier can re-check the recorded
//! sets directly without any search at all.

use std::time::{Duration, Instant};

use num_traits::One;

use crate::decompose::Heuristic;
use crate::jet::JetVar;
use crate::lift::{factor_denominator, polynomialize};
use crate::monomial::Monomial;
use crate::parse::parse;
use crate::report::{build_report, RunReport};
use crate::search::{auto_search, SearchConfig};
use crate::system::{AuxKind, ExtendedSystem};
use crate::verify::{verify_once, VerifyOutcome};

/// One built-in PDE model with its expected search outcome.
#[derive(Clone, Copy, Debug)]
pub struct BenchmarkCase {
    /// Identifier used by the command line and the suite filter.
    pub name: &'static str,
    /// Input document in the engine's equation language.
    pub source: &'static str,
    /// Size of the known auxiliary set, lifted inverses included.
    pub expected_order: u32,
    /// The known auxiliary variables, written over the input states.
    pub expected_aux: Option<&'static [&'static str]>,
    /// Excluded from default suite runs for cost.
    pub heavy: bool,
    /// Search tree size of the recorded reference run, for comparison only.
    pub reference_nodes: u64,
}

/// The built-in cases, cheapest reference run first.
pub fn cases() -> &'static [BenchmarkCase] {
    &CASES
}

/// Looks a case up by its exact name.
pub fn find_case(name: &str) -> Option<&'static BenchmarkCase> {
    CASES.iter().find(|c| c.name == name)
}

const CASES: [BenchmarkCase; 14] = [
    BenchmarkCase {
        name: "solar-wind",
        // Heliospheric wind speed. The angular coordinate is written x and
        // the radial one plays the role of t.
        source: "
            param OM = 2
            u_t = (OM * u_x) / u
        ",
        expected_order: 1,
        expected_aux: Some(&["1/u"]),
        heavy: false,
        reference_nodes: 1,
    },
    BenchmarkCase {
        name: "allen-cahn",
        source: "
            u_t = u_xx + u - u^3
        ",
        expected_order: 1,
        expected_aux: Some(&["u^2"]),
        heavy: false,
        reference_nodes: 3,
    },
    BenchmarkCase {
        name: "schlogl",
        source: "
            param k = 2
            u_t = u_xx - k*(u - 1/2)*(u - 1)*(u - 3/2)
        ",
        expected_order: 1,
        expected_aux: Some(&["u^2"]),
        heavy: false,
        reference_nodes: 3,
    },
    BenchmarkCase {
        name: "kdv",
        source: "
            param a = 2
            u_t = a*u^2*u_x - u_xxx
        ",
        expected_order: 1,
        expected_aux: Some(&["u^2"]),
        heavy: false,
        reference_nodes: 4,
    },
    BenchmarkCase {
        name: "euler",
        source: "
            param gamma = 3
            rho_t = -u*rho_x - rho*u_x
            u_t = -u_x*u - p_x/rho
            p_t = -gamma*u_x*p - u*p_x
        ",
        expected_order: 1,
        expected_aux: Some(&["1/rho"]),
        heavy: false,
        reference_nodes: 1,
    },
    BenchmarkCase {
        name: "fhn",
        source: "
            param eps = 1/50
            param b = 1/2
            param gamma = 2
            param c = 1/20
            v_t = eps*v_xx + (1/eps)*v*(v - 0.1)*(1 - v) - (1/eps)*u + (1/eps)*c
            u_t = b*v - gamma*u + c
        ",
        expected_order: 1,
        expected_aux: Some(&["v^2"]),
        heavy: false,
        reference_nodes: 3,
    },
    BenchmarkCase {
        name: "brusselator",
        source: "
            param d1 = 2
            param d2 = 3
            param lam = 5
            param a = 7
            param b = 11
            u_t = d1*u_x + lam*(1 - (b + 1)*u + b*u^2*v)
            v_t = d2*v_x + lam*a^2*(u - u^2*v)
        ",
        expected_order: 2,
        expected_aux: Some(&["u^2", "u*v"]),
        heavy: false,
        reference_nodes: 8,
    },
    BenchmarkCase {
        name: "heat",
        source: "
            u_t = u_xx + u^6
        ",
        expected_order: 3,
        expected_aux: Some(&["u^2", "u^4", "u^5"]),
        heavy: false,
        reference_nodes: 27,
    },
    BenchmarkCase {
        name: "schnakenberg",
        source: "
            param du = 2
            param duv = 3
            param dv = 5
            param dvu = 7
            param ka = 11
            param k2 = 13
            param k3 = 17
            param kb = 19
            u_t = du*u_xx + duv*v_xx + ka - k2*u + k3*u^2*v
            v_t = dv*v_xx + dvu*u_xx + kb - k3*u^2*v
        ",
        expected_order: 2,
        expected_aux: Some(&["u*v", "u^2"]),
        heavy: false,
        reference_nodes: 8,
    },
    BenchmarkCase {
        name: "dym",
        source: "
            u_t = u^3*u_xxx
        ",
        expected_order: 2,
        expected_aux: Some(&["u^3", "u*u_x^2"]),
        heavy: false,
        reference_nodes: 21,
    },
    BenchmarkCase {
        name: "reaction-d3",
        source: "
            param eps = 1/7
            param dd = 3
            param beta = 5
            param theta = 11
            param bb = 13
            param c0 = 2
            param c1 = 3
            param c2 = 5
            param c3 = 7
            u_t = eps*u_xx - u_x - dd*u*(c0 + c1*v + c2*v^2 + c3*v^3)
            v_t = eps*v_xx - v_x - beta*(v - theta) + bb*dd*u*(c0 + c1*v + c2*v^2 + c3*v^3)
        ",
        expected_order: 4,
        expected_aux: Some(&["u*v", "v^2", "u*v^2", "v^3"]),
        heavy: false,
        reference_nodes: 69,
    },
    BenchmarkCase {
        name: "reaction-d4",
        source: "
            param eps = 1/7
            param dd = 3
            param beta = 5
            param theta = 11
            param bb = 13
            param c0 = 2
            param c1 = 3
            param c2 = 5
            param c3 = 7
            param c4 = 11
            u_t = eps*u_xx - u_x - dd*u*(c0 + c1*v + c2*v^2 + c3*v^3 + c4*v^4)
            v_t = eps*v_xx - v_x - beta*(v - theta) + bb*dd*u*(c0 + c1*v + c2*v^2 + c3*v^3 + c4*v^4)
        ",
        expected_order: 5,
        expected_aux: Some(&["u*v", "v^2", "u*v^2", "v^4", "u*v^3"]),
        heavy: true,
        reference_nodes: 305,
    },
    BenchmarkCase {
        name: "arrhenius",
        // Tubular reactor with an exponential reaction rate. The state y
        // stands for that rate, which turns the model rational.
        source: "
            param eps = 1/7
            param dd = 3
            param beta = 5
            param theta = 11
            param bb = 13
            param gamma = 17
            u_t = eps*u_xx - u_x - dd*u*y
            v_t = eps*v_xx - v_x - beta*(v - theta) + bb*dd*u*y
            y_t = (gamma/v^2)*y*(eps*v_xx - v_x - beta*(v - theta) + bb*dd*u*y)
        ",
        expected_order: 7,
        expected_aux: Some(&["1/v", "1/v^2", "u*y", "u*y/v", "u*y/v^2", "y/v", "y/v^2"]),
        heavy: true,
        reference_nodes: 491,
    },
    BenchmarkCase {
        name: "reaction-d5",
        source: "
            param eps = 1/7
            param dd = 3
            param beta = 5
            param theta = 11
            param bb = 13
            param c0 = 2
            param c1 = 3
            param c2 = 5
            param c3 = 7
            param c4 = 11
            param c5 = 13
            u_t = eps*u_xx - u_x - dd*u*(c0 + c1*v + c2*v^2 + c3*v^3 + c4*v^4 + c5*v^5)
            v_t = eps*v_xx - v_x - beta*(v - theta) + bb*dd*u*(c0 + c1*v + c2*v^2 + c3*v^3 + c4*v^4 + c5*v^5)
        ",
        expected_order: 6,
        expected_aux: Some(&["u*v", "v^2", "v^3", "u*v^3", "u*v^4", "v^5"]),
        heavy: true,
        reference_nodes: 2107,
    },
];

fn prepare(case: &BenchmarkCase) -> (ExtendedSystem, Vec<String>) {
    let rational = parse(case.source).expect("built-in sources parse");
    let ext = polynomialize(&rational).expect("built-in denominators are nonzero");
    let states = rational.state_names().to_vec();
    (ext, states)
}

/// A recorded auxiliary variable mapped onto the lifted system.
enum RecordedVar {
    /// Matches an inverse the lift already registered.
    Inverse(u32),
    /// Becomes a candidate monomial over states, jets, and inverses.
    Extra(Monomial),
}

/// Parses a recorded variable such as `u*u_x^2` or `u*y/v^2` against the
/// lifted system. Numerator factors resolve to state jets; denominator
/// factors must match inverses introduced by the lift.
fn map_recorded(ext: &ExtendedSystem, states: &[String], text: &str) -> RecordedVar {
    // Reuse the input language by evaluating the variable as one extra
    // right-hand side next to the case's own states.
    let mut doc = String::new();
    for s in states {
        doc.push_str(s);
        doc.push_str("_t = 0\n");
    }
    doc.push_str("recorded_t = ");
    doc.push_str(text);
    doc.push('\n');
    let sys = parse(&doc).unwrap_or_else(|e| panic!("recorded variable `{}`: {}", text, e));
    let rf = sys.rhs().last().unwrap();

    let mut terms = rf.numerator().terms();
    let (mono, coef) = terms.next().expect("recorded variable is nonzero");
    assert!(
        terms.next().is_none() && coef.is_one(),
        "recorded variable `{}` is not a plain monomial",
        text
    );
    let mut powers: Vec<(JetVar, u32)> = mono.factors().to_vec();

    let den = factor_denominator(rf.denominator());
    assert!(den.content.is_one(), "recorded variable `{}` has scaled denominator", text);
    let single_inverse = powers.is_empty() && den.factors.len() == 1 && den.factors[0].1 == 1;
    for (f, mult) in den.factors {
        let id = ext
            .auxes()
            .iter()
            .find_map(|a| match &a.kind {
                AuxKind::Inverse(p) if *p == f => Some(a.id),
                _ => None,
            })
            .unwrap_or_else(|| panic!("recorded variable `{}` needs an unlifted inverse", text));
        if single_inverse {
            return RecordedVar::Inverse(id);
        }
        powers.push((JetVar::aux(id, 0), mult));
    }
    RecordedVar::Extra(Monomial::from_powers(powers.into_iter()))
}

/// Result of re-checking one recorded auxiliary set.
#[derive(Clone, Debug)]
pub struct RecordedSetRow {
    /// Case the set belongs to.
    pub name: &'static str,
    /// Total variables in the set, lifted inverses included.
    pub order: u32,
    /// Differential order at which the set closed, if any.
    pub verified_at: Option<u32>,
    /// Time spent on this row.
    pub wall: Duration,
}

/// Re-checks recorded auxiliary sets with the verifier alone.
///
/// The recorded variables are mapped onto the lifted system (inverses must
/// match what the lift registered, the rest become candidate monomials)
/// and verified at increasing differential order, starting from the
/// system's own order. No search is involved, so this passes or fails
/// independently of heuristics and pruning. `filter` keeps cases whose
/// name contains it; None checks all of them.
pub fn verify_recorded_sets(filter: Option<&str>) -> Vec<RecordedSetRow> {
    cases()
        .iter()
        .filter(|c| filter.map_or(true, |f| c.name.contains(f)))
        .map(verify_recorded_set)
        .collect()
}

/// Maps a case's recorded auxiliary set onto its lifted system: the lift's
/// own inverse symbols absorb the `1/f` entries, everything else comes back
/// as a monomial over base jets and inverse symbols.
pub fn recorded_set(case: &BenchmarkCase) -> (ExtendedSystem, Vec<Monomial>) {
    let (ext, states) = prepare(case);
    let vars = case.expected_aux.expect("every case records a known set");
    let mut inverse_ids: Vec<u32> = Vec::new();
    let mut extra: Vec<Monomial> = Vec::new();
    for text in vars {
        match map_recorded(&ext, &states, text) {
            RecordedVar::Inverse(id) => {
                assert!(!inverse_ids.contains(&id), "{}: repeated inverse", case.name);
                inverse_ids.push(id);
            }
            RecordedVar::Extra(m) => extra.push(m),
        }
    }
    assert_eq!(
        inverse_ids.len(),
        ext.auxes().len(),
        "{}: recorded inverses disagree with the lift",
        case.name
    );
    (ext, extra)
}

fn verify_recorded_set(case: &BenchmarkCase) -> RecordedSetRow {
    let start = Instant::now();
    let (ext, extra) = recorded_set(case);
    let vars = case.expected_aux.expect("every case records a known set");
    let h = ext.order();
    let mut verified_at = None;
    for k in h..=3 * h + 2 {
        if let Ok(VerifyOutcome::Success { .. }) = verify_once(&ext, &extra, k) {
            verified_at = Some(k);
            break;
        }
    }
    RecordedSetRow {
        name: case.name,
        order: vars.len() as u32,
        verified_at,
        wall: start.elapsed(),
    }
}

/// Settings for a suite run.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Child ordering rule passed to the search.
    pub heuristic: Heuristic,
    /// Run the cases marked heavy too.
    pub include_heavy: bool,
    /// Per-case node budget.
    pub node_limit: Option<u64>,
    /// Per-case time budget.
    pub time_limit: Option<Duration>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            heuristic: Heuristic::h3_default(),
            include_heavy: false,
            node_limit: None,
            time_limit: None,
        }
    }
}

/// One suite case outcome.
#[derive(Clone, Debug)]
pub struct SuiteRow {
    /// Case name.
    pub name: &'static str,
    /// Order the case is expected to reach.
    pub expected_order: u32,
    /// Total auxiliary count found, None when the search failed.
    pub found_order: Option<u32>,
    /// Nodes traversed by the closing round (the last round on failure).
    pub nodes: u64,
    /// Widening rounds used.
    pub rounds: u32,
    /// Total time for the case.
    pub wall: Duration,
    /// Found order meets the expected one and the result re-verifies.
    pub pass: bool,
    /// Machine-readable run description, same schema as the driver output.
    pub report: RunReport,
}

/// Replays the search over the built-in cases.
///
/// `filter` keeps cases whose name contains it. Heavy cases run only when
/// the config asks for them or the filter names one exactly. Every case
/// runs the widening schedule starting at its system's own order.
pub fn run_suite(filter: Option<&str>, cfg: &SuiteConfig) -> Vec<SuiteRow> {
    selected(filter, cfg.include_heavy)
        .into_iter()
        .map(|case| run_case(case, cfg))
        .collect()
}

fn selected(filter: Option<&str>, include_heavy: bool) -> Vec<&'static BenchmarkCase> {
    CASES
        .iter()
        .filter(|c| filter.map_or(true, |f| c.name.contains(f)))
        .filter(|c| !c.heavy || include_heavy || filter == Some(c.name))
        .collect()
}

fn run_case(case: &BenchmarkCase, cfg: &SuiteConfig) -> SuiteRow {
    let start = Instant::now();
    let rational = parse(case.source).expect("built-in sources parse");
    let ext = polynomialize(&rational).expect("built-in denominators are nonzero");
    let mut scfg = SearchConfig::for_system(&ext);
    scfg.heuristic = cfg.heuristic.clone();
    scfg.diff_order = ext.order();
    scfg.node_limit = cfg.node_limit;
    scfg.time_limit = cfg.time_limit;

    let (rounds, outcome) = auto_search(&ext, &scfg);
    let (found_order, nodes, pass) = match &outcome {
        Ok(res) => {
            let extra: Vec<Monomial> = res.aux_set[ext.auxes().len()..]
                .iter()
                .map(|def| match &def.kind {
                    AuxKind::Monomial(m) => m.clone(),
                    AuxKind::Inverse(_) => unreachable!("the search adds monomials only"),
                })
                .collect();
            let reverified = matches!(
                verify_once(&ext, &extra, res.diff_order_used),
                Ok(VerifyOutcome::Success { .. })
            );
            let order = res.stats.best_order;
            (
                Some(order),
                res.stats.nodes_traversed,
                reverified && order <= case.expected_order,
            )
        }
        Err(fail) => (None, fail.stats.nodes_traversed, false),
    };
    let attempted = rounds.last().map_or(scfg.diff_order, |r| r.diff_order);
    let report = build_report(&rational, &scfg, true, attempted, &outcome);
    SuiteRow {
        name: case.name,
        expected_order: case.expected_order,
        found_order,
        nodes,
        rounds: rounds.len() as u32,
        wall: start.elapsed(),
        pass,
        report,
    }
}

/// Renders suite rows as an aligned text table.
pub fn format_suite(rows: &[SuiteRow]) -> String {
    let mut out = format!(
        "{:<14} {:>5} {:>8} {:>7} {:>6} {:>10}  {}\n",
        "case", "found", "expected", "nodes", "rounds", "time", "status"
    );
    for r in rows {
        let found = r.found_order.map_or("-".to_string(), |o| o.to_string());
        out.push_str(&format!(
            "{:<14} {:>5} {:>8} {:>7} {:>6} {:>9.3}s  {}\n",
            r.name,
            found,
            r.expected_order,
            r.nodes,
            r.rounds,
            r.wall.as_secs_f64(),
            if r.pass { "pass" } else { "FAIL" }
        ));
    }
    out
}

/// Renders recorded-set rows as an aligned text table.
pub fn format_recorded_sets(rows: &[RecordedSetRow]) -> String {
    let mut out = format!(
        "{:<14} {:>5} {:>9} {:>10}  {}\n",
        "case", "order", "closes at", "time", "status"
    );
    for r in rows {
        let at = r.verified_at.map_or("-".to_string(), |k| format!("k={}", k));
        out.push_str(&format!(
            "{:<14} {:>5} {:>9} {:>9.3}s  {}\n",
            r.name,
            r.order,
            at,
            r.wall.as_secs_f64(),
            if r.verified_at.is_some() {
                "pass"
            } else {
                "FAIL"
            }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_name(name: &str) -> &'static BenchmarkCase {
        find_case(name).unwrap()
    }

    #[test]
    fn case_table_is_consistent() {
        let cs = cases();
        assert_eq!(cs.len(), 14);
        for (i, a) in cs.iter().enumerate() {
            for b in &cs[i + 1..] {
                assert_ne!(a.name, b.name);
            }
        }
        let heavy: Vec<&str> = cs.iter().filter(|c| c.heavy).map(|c| c.name).collect();
        assert_eq!(heavy, ["reaction-d4", "arrhenius", "reaction-d5"]);
        for c in cs {
            let aux = c.expected_aux.expect("all cases record a known set");
            assert_eq!(aux.len() as u32, c.expected_order, "{}", c.name);
            let sys = parse(c.source).unwrap_or_else(|e| panic!("{}: {}", c.name, e));
            polynomialize(&sys).unwrap_or_else(|e| panic!("{}: {}", c.name, e));
        }
    }

    #[test]
    fn degrees_and_orders_match_the_models() {
        let polynomial_pins = [
            ("allen-cahn", 3, 2),
            ("schlogl", 3, 2),
            ("kdv", 3, 3),
            ("fhn", 3, 2),
            ("brusselator", 3, 1),
            ("heat", 6, 2),
            ("schnakenberg", 3, 2),
            ("dym", 4, 3),
            ("reaction-d3", 4, 2),
            ("reaction-d4", 5, 2),
            ("reaction-d5", 6, 2),
        ];
        for (name, degree, order) in polynomial_pins {
            let sys = parse(by_name(name).source).unwrap().to_polynomial().unwrap();
            let deg = sys.rhs().iter().map(|p| p.degree()).max().unwrap();
            assert_eq!(deg, degree, "{}", name);
            assert_eq!(sys.order(), order, "{}", name);
        }
        for (name, order) in [("solar-wind", 1), ("euler", 1), ("arrhenius", 2)] {
            let (ext, _) = prepare(by_name(name));
            assert_eq!(ext.auxes().len(), 1, "{}", name);
            assert_eq!(ext.order(), order, "{}", name);
        }
    }

    #[test]
    fn recorded_sets_map_onto_the_lift() {
        let u = JetVar::base(0, 0);
        let ux = JetVar::base(0, 1);
        let (ext, states) = prepare(by_name("dym"));
        let cubes = match map_recorded(&ext, &states, "u^3") {
            RecordedVar::Extra(m) => m,
            RecordedVar::Inverse(_) => panic!("u^3 is no inverse"),
        };
        assert_eq!(cubes, Monomial::from_powers([(u, 3)].into_iter()));
        let slope = match map_recorded(&ext, &states, "u*u_x^2") {
            RecordedVar::Extra(m) => m,
            RecordedVar::Inverse(_) => panic!("u*u_x^2 is no inverse"),
        };
        assert_eq!(slope, Monomial::from_powers([(u, 1), (ux, 2)].into_iter()));

        let (ext, states) = prepare(by_name("arrhenius"));
        let vars = by_name("arrhenius").expected_aux.unwrap();
        let mut inverses = 0;
        let mut extras = Vec::new();
        for text in vars {
            match map_recorded(&ext, &states, text) {
                RecordedVar::Inverse(id) => {
                    inverses += 1;
                    assert_eq!(id, 0);
                }
                RecordedVar::Extra(m) => extras.push(m),
            }
        }
        assert_eq!(inverses, 1);
        assert_eq!(extras.len(), 6);
        let q = JetVar::aux(0, 0);
        assert_eq!(extras[0], Monomial::from_powers([(q, 2)].into_iter()));
    }

    #[test]
    fn inverse_only_sets_close_at_the_system_order() {
        for name in ["solar-wind", "euler"] {
            let row = verify_recorded_set(by_name(name));
            assert_eq!(row.verified_at, Some(1), "{}", name);
            assert_eq!(row.order, 1, "{}", name);
        }
    }

    #[test]
    fn heavy_cases_run_only_on_request() {
        assert_eq!(selected(None, false).len(), 11);
        assert_eq!(selected(None, true).len(), 14);
        let filtered = selected(Some("reaction"), false);
        assert_eq!(filtered.len(), 1);
        assert_eq!(filtered[0].name, "reaction-d3");
        let exact = selected(Some("reaction-d5"), false);
        assert_eq!(exact.len(), 1);
        assert_eq!(exact[0].name, "reaction-d5");
    }

    #[test]
    fn suite_smoke_on_the_cheapest_cases() {
        let rows = run_suite(Some("solar-wind"), &SuiteConfig::default());
        assert_eq!(rows.len(), 1);
        assert!(rows[0].pass);
        assert_eq!(rows[0].found_order, Some(1));
        assert_eq!(rows[0].nodes, 1);
        assert_eq!(rows[0].rounds, 1);

        let rows = run_suite(Some("allen-cahn"), &SuiteConfig::default());
        assert!(rows[0].pass);
        assert_eq!(rows[0].found_order, Some(1));
        assert_eq!(rows[0].report.result.aux_vars, ["w1 = u^2"]);
    }
}
