//! Command implementations. Each returns its process exit code: 0 for a
//! clean run, 1 for incoherence, a certified violation, or an oracle
//! mismatch, 3 when a query is unsupported on the given model (not
//! describable, not integrable, or a kind/model mismatch). Argument and
//! parse problems surface as errors and exit 2 in `main`.

use anyhow::{anyhow, bail, Context, Result};
use num_traits::Zero;

use envelope_core::algebra::{AtomSpace, Subalgebra};
use envelope_core::assessment::{rows_event, strategy_from_model, Prior, StatisticalModel, Strategy};
use envelope_core::capacity::{
    choquet, core_vertices, inner_measure, is_n_monotone, is_totally_monotone, mobius, Capacity,
    CapacityError,
};
use envelope_core::coherence::{extension_interval, ConditionalAssessment};
use envelope_core::countable::{
    fd_envelope_countable, fsc_lower, joint_bounds_countable, sc_envelope, CEvent, CountableError,
    ProfileModel,
};
use envelope_core::envelopes::{
    conditional_envelope, dis_extension_envelope, disintegrable_joint, fsc_envelope,
    fully_dis_envelope, sc_envelope_finite, EnvelopeError,
};
use envelope_core::rational::{q, q0, q1, Q};

use crate::modelfile::{countable_query, finite_query, FiniteInstance, LoadedModel};
use crate::rationals::{decimal, format_q, parse_q};
use crate::report::{render_text, to_json, BoundsReport, OracleOutcome, QueryReport, QueryStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Coherent,
    Dis,
    FullyDis,
    Sc,
    Fsc,
}

impl Kind {
    pub fn parse(text: &str) -> Result<Kind> {
        Ok(match text {
            "coherent" => Kind::Coherent,
            "dis" => Kind::Dis,
            "fully-dis" => Kind::FullyDis,
            "sc" => Kind::Sc,
            "fsc" => Kind::Fsc,
            other => bail!(
                "unknown kind {other:?}; expected coherent, dis, fully-dis, sc, or fsc"
            ),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Coherent => "coherent",
            Kind::Dis => "dis",
            Kind::FullyDis => "fully-dis",
            Kind::Sc => "sc",
            Kind::Fsc => "fsc",
        }
    }
}

/// The assembled pinned entries: prior blocks, model rows, and any extra
/// assessment entries from the file.
fn full_assessment(inst: &FiniteInstance) -> Result<ConditionalAssessment> {
    let mut a = ConditionalAssessment::from_prior_model(&inst.space, &inst.prior, &inst.model);
    for (f, k, v) in &inst.assessments {
        a.push(f.clone(), k.clone(), v.clone())
            .map_err(|e| anyhow!("assessment entry: {e}"))?;
    }
    Ok(a)
}

pub fn cmd_check(loaded: &LoadedModel, witness: bool, json: bool) -> Result<i32> {
    if let Some(inst) = &loaded.finite {
        let a = full_assessment(inst)?;
        let report = envelope_core::coherence::check_coherence(&a);
        if json {
            let mut obj = serde_json::json!({ "coherent": report.coherent });
            if let Some(layer) = report.infeasible_layer {
                obj["infeasible_layer"] = serde_json::json!(layer);
            }
            if witness {
                if let Some(w) = &report.witness {
                    obj["witness_layers"] = serde_json::json!(w
                        .layers
                        .iter()
                        .map(|l| l.iter().map(format_q).collect::<Vec<_>>())
                        .collect::<Vec<_>>());
                }
            }
            println!("{}", serde_json::to_string_pretty(&obj)?);
        } else if report.coherent {
            println!("coherent ({} pinned entries)", a.entries().len());
            if witness {
                if let Some(w) = &report.witness {
                    for (i, layer) in w.layers.iter().enumerate() {
                        let cells: Vec<String> = layer.iter().map(format_q).collect();
                        println!("  layer {}: [{}]", i, cells.join(", "));
                    }
                }
            }
        } else {
            println!(
                "incoherent: no agreeing layer exists at depth {}",
                report.infeasible_layer.unwrap_or(0)
            );
        }
        return Ok(if report.coherent { 0 } else { 1 });
    }
    if let Some(model) = &loaded.countable {
        // Validation happened at assembly; the prior/strategy pair of a
        // profile model admits extensions by construction.
        if json {
            println!(
                "{}",
                serde_json::json!({
                    "coherent": true,
                    "profiles": model.profiles().len(),
                    "named": model.named().len(),
                })
            );
        } else {
            println!(
                "profile model validated: {} profiles, {} named cells, {} prior blocks",
                model.profiles().len(),
                model.named().len(),
                model.cells().n_blocks()
            );
        }
        return Ok(0);
    }
    bail!("the file has no [space]/[prior]/[model] sections and no [profiles] section")
}

fn finite_bounds(
    inst: &FiniteInstance,
    kind: Kind,
    f: &envelope_core::algebra::Event,
    k: &envelope_core::algebra::Event,
) -> Result<QueryStatus> {
    let run = match kind {
        Kind::Coherent => conditional_envelope(&inst.space, &inst.prior, &inst.strategy, f, k),
        Kind::Dis => dis_extension_envelope(&inst.space, &inst.prior, &inst.strategy, f, k),
        Kind::FullyDis => fully_dis_envelope(&inst.space, &inst.prior, &inst.strategy, f, k),
        Kind::Fsc => fsc_envelope(&inst.space, &inst.prior, &inst.strategy, f, k),
        Kind::Sc => {
            if k != &inst.space.omega() {
                return Ok(QueryStatus::Unsupported {
                    reason: "the sc envelope is joint-only; condition on omega".into(),
                });
            }
            return Ok(QueryStatus::Bounds(Box::new(BoundsReport::from_envelope(
                &sc_envelope_finite(&inst.space, &inst.prior, &inst.strategy, f),
            ))));
        }
    };
    match run {
        Ok(r) => Ok(QueryStatus::Bounds(Box::new(BoundsReport::from_envelope(&r)))),
        Err(EnvelopeError::EmptyConditioning) => bail!("conditioning event is empty"),
        Err(e) => Ok(QueryStatus::Unsupported { reason: e.to_string() }),
    }
}

fn countable_bounds(model: &ProfileModel, kind: Kind, f: &CEvent, k: &CEvent) -> Result<QueryStatus> {
    let unsupported = |reason: String| Ok(QueryStatus::Unsupported { reason });
    let is_omega = k == &CEvent::full(model);
    let run = match kind {
        Kind::Coherent => {
            if !is_omega {
                return unsupported(
                    "conditional coherent envelopes on profile models are not computed; \
                     condition on omega for the joint bounds"
                        .into(),
                );
            }
            joint_bounds_countable(model, f)
        }
        Kind::Sc => {
            if !is_omega {
                return unsupported("the sc envelope is joint-only; condition on omega".into());
            }
            sc_envelope(model, f)
        }
        Kind::FullyDis => fd_envelope_countable(model, f, k),
        Kind::Fsc => {
            let lo = fsc_lower(model, f, k);
            let hi = fsc_lower(model, &f.complement(), k);
            match (lo, hi) {
                (Ok((lower, la)), Ok((co_lower, ua))) => {
                    let labels = |alloc: &[usize]| -> String {
                        let names: Vec<&str> = alloc
                            .iter()
                            .map(|&p| model.profiles()[p].label.as_str())
                            .collect();
                        names.join(",")
                    };
                    let b = BoundsReport {
                        lower,
                        upper: q1() - co_lower,
                        case_tag: None,
                        dual_case_tag: None,
                        index_sets: None,
                        witness: Some(format!(
                            "weight allocations: lower -> [{}], upper -> [{}]",
                            labels(&la),
                            labels(&ua)
                        )),
                        oracle: None,
                    };
                    assert!(b.lower <= b.upper, "bound crossing");
                    return Ok(QueryStatus::Bounds(Box::new(b)));
                }
                (Err(e), _) | (_, Err(e)) => {
                    return match e {
                        CountableError::EmptyConditioning => bail!("conditioning event is empty"),
                        other => unsupported(other.to_string()),
                    }
                }
            }
        }
        Kind::Dis => {
            return unsupported(
                "dis envelopes are defined on finite instances; use fully-dis or sc here".into(),
            )
        }
    };
    match run {
        Ok(r) => Ok(QueryStatus::Bounds(Box::new(BoundsReport::from_envelope(&r)))),
        Err(CountableError::EmptyConditioning) => bail!("conditioning event is empty"),
        Err(e) => Ok(QueryStatus::Unsupported { reason: e.to_string() }),
    }
}

/// Runs every query in the file at its requested kinds (defaulting to
/// `default_kind`), optionally cross-checking finite queries against the LP
/// oracle. Returns the reports and the exit code.
pub fn run_envelope(
    loaded: &LoadedModel,
    default_kind: Kind,
    oracle: bool,
) -> Result<(Vec<QueryReport>, i32)> {
    if loaded.file.queries.is_empty() {
        bail!("the file has no [[queries]]");
    }
    if loaded.finite.is_none() && loaded.countable.is_none() {
        bail!("the file has no [space]/[prior]/[model] sections and no [profiles] section");
    }
    let oracle_base = match (&loaded.finite, oracle) {
        (Some(inst), true) => {
            if !inst.assessments.is_empty() {
                bail!(
                    "--oracle cross-checks envelopes of the pure prior+model pair; \
                     remove the extra [[assessments]] entries"
                );
            }
            Some(ConditionalAssessment::from_prior_model(
                &inst.space,
                &inst.prior,
                &inst.model,
            ))
        }
        (None, true) => bail!("--oracle needs the finite sections [space], [prior], [model]"),
        _ => None,
    };

    let mut reports = Vec::new();
    let mut any_mismatch = false;
    let mut any_unsupported = false;
    for (qi, query) in loaded.file.queries.iter().enumerate() {
        let kinds: Vec<Kind> = match &query.kinds {
            Some(texts) => texts
                .iter()
                .map(|t| Kind::parse(t))
                .collect::<Result<Vec<Kind>>>()
                .with_context(|| format!("[[queries]][{qi}].kinds"))?,
            None => vec![default_kind],
        };
        for kind in kinds {
            let mut status = if let Some(inst) = &loaded.finite {
                let (f, k) = finite_query(&inst.space, &query.f, query.k.as_deref())?;
                if k.is_empty() {
                    bail!("[[queries]][{qi}]: conditioning event {:?} is empty", query.k);
                }
                let mut status = finite_bounds(inst, kind, &f, &k)?;
                if let (Some(base), QueryStatus::Bounds(b)) = (&oracle_base, &mut status) {
                    let (olo, ohi) = extension_interval(base, &f, &k)
                        .map_err(|e| anyhow!("oracle: {e}"))?;
                    let agree = match kind {
                        // The closed form must reproduce the LP exactly.
                        Kind::Coherent => b.lower == olo && b.upper == ohi,
                        // Smaller classes must sit inside the coherent hull.
                        _ => olo <= b.lower && b.upper <= ohi,
                    };
                    if !agree {
                        any_mismatch = true;
                    }
                    b.oracle = Some(if agree {
                        OracleOutcome::Agree
                    } else {
                        OracleOutcome::Mismatch { lower: olo, upper: ohi }
                    });
                }
                status
            } else {
                let model = loaded.countable.as_ref().expect("checked above");
                let (f, k) = countable_query(model, &query.f, query.k.as_deref())?;
                if k.is_empty() {
                    bail!("[[queries]][{qi}]: conditioning event {:?} is empty", query.k);
                }
                countable_bounds(model, kind, &f, &k)?
            };
            if let QueryStatus::Unsupported { .. } = &status {
                any_unsupported = true;
            }
            if let QueryStatus::Bounds(b) = &mut status {
                assert!(b.lower <= b.upper);
            }
            reports.push(QueryReport {
                f: query.f.clone(),
                k: query.k.clone().unwrap_or_else(|| "omega".into()),
                kind: kind.name().into(),
                status,
            });
        }
    }
    let code = if any_mismatch {
        1
    } else if any_unsupported {
        3
    } else {
        0
    };
    Ok((reports, code))
}

pub fn cmd_envelope(loaded: &LoadedModel, kind: Kind, oracle: bool, json: bool) -> Result<i32> {
    if let Some(inst) = &loaded.finite {
        if !inst.assessments.is_empty() && !oracle {
            eprintln!(
                "note: envelopes range over extensions of the prior and model only; \
                 the {} [[assessments]] entries constrain `check`, not `envelope`",
                inst.assessments.len()
            );
        }
    }
    let (reports, code) = run_envelope(loaded, kind, oracle)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&to_json(&reports))?);
    } else {
        print!("{}", render_text(&reports));
    }
    Ok(code)
}

/// Discretized-parameter instance: cells θ = j/grid for j = 0..=grid with a
/// uniform prior, columns counting successes among n trials.
pub fn bayes_instance(grid: usize, n: usize) -> Result<(AtomSpace, Prior, Strategy)> {
    if grid < 2 {
        bail!("--grid must be at least 2");
    }
    let cells = grid + 1;
    let space = AtomSpace::full(cells, n + 1);
    let prior = Prior::new(
        Subalgebra::discrete(cells),
        vec![q(1, cells as i64); cells],
    )
    .expect("uniform prior is valid");
    let mut rows = Vec::with_capacity(cells);
    for j in 0..cells {
        let theta = q(j as i64, grid as i64);
        let one_minus = q1() - &theta;
        let mut row = Vec::with_capacity(n + 1);
        for x in 0..=n {
            row.push(binomial(n, x) * power(&theta, x) * power(&one_minus, n - x));
        }
        rows.push(row);
    }
    let model = StatisticalModel::new(&space, rows).expect("binomial rows are probabilities");
    let strategy = strategy_from_model(&space, &model);
    Ok((space, prior, strategy))
}

fn binomial(n: usize, k: usize) -> Q {
    let mut v = q1();
    for i in 0..k {
        v = v * q((n - i) as i64, 1) / q((i + 1) as i64, 1);
    }
    v
}

fn power(base: &Q, exp: usize) -> Q {
    let mut v = q1();
    for _ in 0..exp {
        v *= base;
    }
    v
}

/// Exact posterior bound P(θ ∈ (t1, t2] | X = n) on the grid: the unique
/// fully disintegrable value, a ratio of power sums.
pub fn bayes_posterior(grid: usize, n: usize, t1: &Q, t2: &Q) -> Result<Q> {
    let (space, prior, strategy) = bayes_instance(grid, n)?;
    let in_range = |j: usize| -> bool {
        let theta = q(j as i64, grid as i64);
        &theta > t1 && &theta <= t2
    };
    let rows: Vec<usize> = (0..=grid).filter(|&j| in_range(j)).collect();
    if rows.is_empty() {
        bail!("no grid point lies in ({t1}, {t2}]");
    }
    let a = rows_event(&space, &rows);
    let b = space.col_event(n).expect("top column exists");
    let r = fully_dis_envelope(&space, &prior, &strategy, &a, &b)
        .map_err(|e| anyhow!("posterior envelope: {e}"))?;
    assert_eq!(r.lower, r.upper, "the grid posterior is a point value");
    Ok(r.lower)
}

/// P^d(X = n): the disintegrable joint mass of the all-successes column.
pub fn bayes_top_joint(grid: usize, n: usize) -> Result<Q> {
    let (space, prior, strategy) = bayes_instance(grid, n)?;
    let b = space.col_event(n).expect("top column exists");
    disintegrable_joint(&space, &prior, &strategy, &b).map_err(|e| anyhow!("{e}"))
}

fn on_grid(theta: &Q, grid: usize) -> bool {
    (theta * q(grid as i64, 1)).is_integer()
}

pub fn cmd_bayes(grid: usize, n: usize, theta1: &str, theta2: &str, json: bool) -> Result<i32> {
    let t1 = parse_q(theta1).context("--theta1")?;
    let t2 = parse_q(theta2).context("--theta2")?;
    if grid < 2 {
        bail!("--grid must be at least 2");
    }
    if t1 < q0() || t2 > q1() || t1 >= t2 {
        bail!("need 0 <= theta1 < theta2 <= 1");
    }
    if !on_grid(&t1, grid) || !on_grid(&t2, grid) {
        bail!("theta1 and theta2 must be multiples of 1/grid");
    }
    // Coarser prefixes of the same grid, for a visible refinement trend.
    let mut sizes: Vec<usize> = [grid.div_ceil(4), grid.div_ceil(2), grid]
        .into_iter()
        .filter(|&g| g >= 2 && on_grid(&t1, g) && on_grid(&t2, g))
        .collect();
    sizes.dedup();
    let limit = power(&t2, n + 1) - power(&t1, n + 1);
    let joint_limit = q(1, (n + 1) as i64);
    let mut rows = Vec::new();
    for &g in &sizes {
        let value = bayes_posterior(g, n, &t1, &t2)?;
        let err = abs(&(&value - &limit));
        rows.push((g, value, err));
    }
    let top = bayes_top_joint(grid, n)?;
    let top_err = abs(&(&top - &joint_limit));
    if json {
        let obj = serde_json::json!({
            "n": n,
            "theta1": format_q(&t1),
            "theta2": format_q(&t2),
            "analytic_limit": format_q(&limit),
            "rows": rows.iter().map(|(g, v, e)| serde_json::json!({
                "grid": g,
                "posterior": format_q(v),
                "posterior_decimal": decimal(v),
                "abs_error": decimal(e),
            })).collect::<Vec<_>>(),
            "joint": {
                "grid": grid,
                "value": format_q(&top),
                "value_decimal": decimal(&top),
                "limit": format_q(&joint_limit),
                "abs_error": decimal(&top_err),
            },
        });
        println!("{}", serde_json::to_string_pretty(&obj)?);
    } else {
        println!(
            "posterior of theta in ({}, {}] after {} successes; analytic limit {} (~{:.6})",
            format_q(&t1),
            format_q(&t2),
            n,
            format_q(&limit),
            decimal(&limit)
        );
        println!("{:>8}  {:>24}  {:>12}  {:>12}", "grid", "posterior", "decimal", "|error|");
        for (g, v, e) in &rows {
            println!(
                "{:>8}  {:>24}  {:>12.6}  {:>12.6}",
                g,
                format_q(v),
                decimal(v),
                decimal(e)
            );
        }
        println!(
            "joint P(X={}) at grid {}: {} (~{:.6}), limit {} (~{:.6}), |error| {:.6}",
            n,
            grid,
            format_q(&top),
            decimal(&top),
            format_q(&joint_limit),
            decimal(&joint_limit),
            decimal(&top_err)
        );
    }
    Ok(0)
}

fn abs(v: &Q) -> Q {
    if v < &q0() {
        -v.clone()
    } else {
        v.clone()
    }
}

fn subset_name(mask: usize, n: usize) -> String {
    let parts: Vec<String> = (0..n)
        .filter(|e| mask >> e & 1 == 1)
        .map(|e| (e + 1).to_string())
        .collect();
    if parts.is_empty() {
        "{}".into()
    } else {
        format!("{{{}}}", parts.join(","))
    }
}

/// Searches for a pair breaking the supermodular inequality.
fn two_monotone_witness(v: &Capacity) -> Option<(usize, usize)> {
    let full = v.full_mask();
    for s in 0..=full {
        for t in 0..=full {
            let lhs = v.value(s | t).clone() + v.value(s & t);
            let rhs = v.value(s).clone() + v.value(t);
            if lhs < rhs {
                return Some((s, t));
            }
        }
    }
    None
}

pub fn cmd_capacity(loaded: &LoadedModel, json: bool) -> Result<i32> {
    let (cap, x, source) = if let Some((cap, x)) = &loaded.capacity {
        (cap.clone(), x.clone(), "capacity section".to_string())
    } else if let Some(inst) = &loaded.finite {
        let cap = inner_measure(inst.prior.subalgebra(), inst.prior.masses())
            .map_err(|e| anyhow!("inner measure of the prior: {e}"))?;
        (cap, None, "inner measure of the prior".to_string())
    } else {
        bail!("the file has no [capacity] section and no [prior] to take an inner measure of");
    };
    let n = cap.n_ground();
    let m = mobius(&cap);
    let tm = is_totally_monotone(&cap);
    let two = match is_n_monotone(&cap, 2) {
        Ok(b) => Some(b),
        Err(CapacityError::GroundTooLarge { .. }) => None,
        Err(e) => return Err(anyhow!("{e}")),
    };
    let witness = match two {
        Some(false) => two_monotone_witness(&cap),
        _ => None,
    };
    let vertices = match core_vertices(&cap) {
        Ok(v) => Some(v),
        Err(CapacityError::NotTwoMonotone) | Err(CapacityError::GroundTooLarge { .. }) => None,
        Err(e) => return Err(anyhow!("{e}")),
    };
    let choquet_value = x.as_ref().map(|x| choquet(x, &cap));

    if json {
        let mut obj = serde_json::json!({
            "source": source,
            "ground": n,
            "totally_monotone": tm,
            "mobius": (0..(1usize << n)).filter(|&s| !m.mass(s).is_zero()).map(|s| {
                serde_json::json!({ "subset": subset_name(s, n), "mass": format_q(m.mass(s)) })
            }).collect::<Vec<_>>(),
        });
        if let Some(two) = two {
            obj["two_monotone"] = serde_json::json!(two);
        }
        if let Some((s, t)) = witness {
            obj["two_monotone_witness"] =
                serde_json::json!({ "s": subset_name(s, n), "t": subset_name(t, n) });
        }
        if let Some(vs) = &vertices {
            obj["core_vertices"] = serde_json::json!(vs
                .iter()
                .map(|v| v.iter().map(format_q).collect::<Vec<_>>())
                .collect::<Vec<_>>());
        }
        if let Some(c) = &choquet_value {
            obj["choquet"] = serde_json::json!(format_q(c));
            obj["choquet_decimal"] = serde_json::json!(decimal(c));
        }
        println!("{}", serde_json::to_string_pretty(&obj)?);
    } else {
        println!("capacity from {source} on {n} ground elements");
        println!("  totally monotone: {}", verdict(tm));
        match (two, witness) {
            (Some(true), _) => println!("  2-monotone: yes"),
            (Some(false), Some((s, t))) => println!(
                "  2-monotone: NO  (v(S)+v(T) > v(S∪T)+v(S∩T) at S={}, T={})",
                subset_name(s, n),
                subset_name(t, n)
            ),
            (Some(false), None) => println!("  2-monotone: NO"),
            (None, _) => println!("  2-monotone: not checked (ground too large)"),
        }
        let masses: Vec<String> = (0..(1usize << n))
            .filter(|&s| !m.mass(s).is_zero())
            .map(|s| format!("m({})={}", subset_name(s, n), format_q(m.mass(s))))
            .collect();
        println!("  mobius masses: {}", masses.join(" "));
        if let Some(vs) = &vertices {
            println!("  core vertices ({}):", vs.len());
            for v in vs {
                let cells: Vec<String> = v.iter().map(format_q).collect();
                println!("    ({})", cells.join(", "));
            }
        }
        if let Some(c) = &choquet_value {
            println!("  choquet(x) = {} (~{:.6})", format_q(c), decimal(c));
        }
    }
    Ok(0)
}

fn verdict(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
