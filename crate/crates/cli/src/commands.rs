//! Subcommand bodies. Each one builds a [`Report`]; only exact-count failures abort.

use anyhow::{bail, Result};
use loopcount::asymptotics::{
    conjecture_g2, dense_g, dense_gd_by_trace, dense_gd_total, naive_g2, sparse_g, sparse_gd,
    sparse_regular,
};
use loopcount::dist::{trace_law_dense, trace_law_exact, trace_law_sparse};
use loopcount::saddle::{ln_u_asymptotic, ln_u_row};
use loopcount::{
    log_big, q_dense, BigCount, DegreeSequence, Error, Formula, LogEstimate, LoopModel,
    LoopModelParams, Real, SparsePrefactor, SparseTraceParams, TraceLaw, WeightVector,
};

use crate::report::{Cell, Report};
use crate::{
    AsymptoticArgs, CompareArgs, Engine, ExactArgs, Input, Outcome, SaddleArgs, ScanArgs,
    TraceDistArgs,
};

/// Traces that can carry mass: all of `0..=n`, or those matching the parity of `S` when `D = 1`.
fn support(seq: &DegreeSequence, model: LoopModel) -> impl Iterator<Item = usize> {
    let parity = (seq.sum() % 2) as usize;
    let once = model == LoopModel::Once;
    (0..=seq.len()).filter(move |l| !once || l % 2 == parity)
}

/// `"parity: inapplicable (...)"` and similar.
fn inapplicable(e: &Error) -> String {
    let (kind, detail) = match e {
        Error::Parity(m) => ("parity", m.to_string()),
        Error::Density(m) => ("density", m.to_string()),
        Error::ZeroDegree(_) => ("zero-degree", e.to_string()),
        Error::Range(m) => ("range", m.clone()),
        Error::Hypothesis(m) => ("hypothesis", m.to_string()),
        other => ("error", other.to_string()),
    };
    format!("{kind}: inapplicable ({detail})")
}

fn prefactor(factorial: bool) -> SparsePrefactor {
    if factorial {
        SparsePrefactor::Factorial
    } else {
        SparsePrefactor::Power
    }
}

/// Whole-sequence formulas that fit the input family.
fn estimates(
    input: &Input,
    seq: &DegreeSequence,
    model: Option<LoopModel>,
    pre: SparsePrefactor,
) -> Vec<(Formula, loopcount::Result<LogEstimate>)> {
    let Some(model) = model else {
        return vec![
            (Formula::SparseSimple, sparse_g(seq)),
            (Formula::DenseSimple, dense_g(seq)),
        ];
    };
    let mut out = vec![(Formula::SparseLoopy, sparse_gd(seq, model, pre))];
    if let Some((n, d)) = input.regular_params(seq) {
        out.push((Formula::SparseRegular, sparse_regular(n, d, model, pre)));
    }
    out.push((Formula::DenseTotal, dense_gd_total(seq, model)));
    if let (Some((n, d)), LoopModel::Twice) = (input.regular_params(seq), model) {
        out.push((Formula::Conjecture, conjecture_g2(n, d)));
        out.push((Formula::Naive, naive_g2(n, d)));
    }
    out
}

fn log_or_none(c: &BigCount) -> Option<Real> {
    log_big(c).ok()
}

pub fn exact(a: &ExactArgs, engine: &Engine) -> Result<Outcome> {
    let seq = a.input.sequence()?;
    let counter = engine.counter();
    let model = a.model.model()?;
    let mut r;
    match model {
        None => {
            r = Report::new(&["count"]);
            r.push(vec![("count", Cell::big(&counter.count_simple(&seq)?))]);
        }
        Some(m) if a.by_trace => {
            r = Report::new(&["trace", "count"]);
            let counts = counter.trace_counts(&seq, m)?;
            let zero_total = m == LoopModel::Twice && seq.sum() % 2 == 1;
            for l in support(&seq, m) {
                let c = if zero_total {
                    BigCount::default()
                } else {
                    counts[l].clone()
                };
                r.push(vec![("trace", Cell::int(l)), ("count", Cell::big(&c))]);
            }
        }
        Some(m) => match a.trace {
            Some(l) => {
                r = Report::new(&["trace", "count"]);
                let c = counter.count_loopy_by_trace(&seq, m, l)?;
                r.push(vec![("trace", Cell::int(l)), ("count", Cell::big(&c))]);
            }
            None => {
                r = Report::new(&["count"]);
                r.push(vec![("count", Cell::big(&counter.count_loopy(&seq, m)?))]);
            }
        },
    }
    Ok(r.into())
}

pub fn asymptotic(a: &AsymptoticArgs) -> Result<Outcome> {
    let seq = a.input.sequence()?;
    let model = a.model.model()?;
    let mut r = Report::new(&["quantity", "trace", "value", "error_order", "note"]);
    r.push(vec![
        ("quantity", Cell::text("n")),
        ("value", Cell::int(seq.len())),
    ]);
    r.push(vec![
        ("quantity", Cell::text("S")),
        ("value", Cell::int(seq.sum())),
    ]);
    if let (Some(m), false) = (model, seq.is_empty()) {
        match LoopModelParams::new(&seq, m) {
            Ok(p) => {
                let n = seq.len() as f64;
                r.push(vec![
                    ("quantity", Cell::text("mu")),
                    ("value", Cell::num(p.mu_real().to_f64())),
                ]);
                r.push(vec![
                    ("quantity", Cell::text("lbar")),
                    ("value", Cell::num(p.lbar.to_f64())),
                ]);
                r.push(vec![
                    ("quantity", Cell::text("lbar/n")),
                    ("value", Cell::num(p.lbar.to_f64() / n)),
                ]);
                let q = q_dense(&seq, m, p.lbar);
                r.push(match q {
                    Ok(q) => vec![
                        ("quantity", Cell::text("q_at_lbar")),
                        ("value", Cell::num(q.to_f64())),
                    ],
                    Err(e) => vec![
                        ("quantity", Cell::text("q_at_lbar")),
                        ("note", Cell::text(inapplicable(&e))),
                    ],
                });
            }
            Err(e) => r.push(vec![
                ("quantity", Cell::text("lbar")),
                ("note", Cell::text(inapplicable(&e))),
            ]),
        }
    }
    for (f, est) in estimates(&a.input, &seq, model, prefactor(a.factorial)) {
        r.push(estimate_row(f, None, &est));
    }
    if let (Some(m), true) = (model, a.by_trace) {
        for l in support(&seq, m) {
            r.push(estimate_row(
                Formula::DenseByTrace,
                Some(l),
                &dense_gd_by_trace(&seq, m, l as u64),
            ));
        }
    }
    Ok(r.into())
}

fn estimate_row(
    f: Formula,
    trace: Option<usize>,
    est: &loopcount::Result<LogEstimate>,
) -> Vec<(&'static str, Cell)> {
    let mut row = vec![("quantity", Cell::text(f.id()))];
    if let Some(l) = trace {
        row.push(("trace", Cell::int(l)));
    }
    match est {
        Ok(e) => {
            row.push(("value", Cell::num(e.log_value.to_f64())));
            row.push(("error_order", Cell::text(e.error_order.tag())));
        }
        Err(e) => row.push(("note", Cell::text(inapplicable(e)))),
    }
    row
}

const COMPARE_COLUMNS: [&str; 10] = [
    "instance",
    "model",
    "formula",
    "trace",
    "exact",
    "log_exact",
    "log_estimate",
    "log_ratio",
    "error_order",
    "note",
];

pub fn compare(a: &CompareArgs, engine: &Engine) -> Result<Outcome> {
    let seq = a.input.sequence()?;
    let model = a.model.model()?;
    let counter = engine.counter();
    let id = a.input.instance_id(&seq);
    let model_cell = model.map_or(Cell::text("loopless"), |m| Cell::int(m.weight()));

    let traces = match model {
        Some(m) if a.by_trace => Some(counter.trace_counts(&seq, m)?),
        _ => None,
    };
    let total: BigCount = match (model, &traces) {
        (None, _) => counter.count_simple(&seq)?,
        (Some(LoopModel::Twice), _) if seq.sum() % 2 == 1 => BigCount::default(),
        (Some(_), Some(t)) => t.iter().sum(),
        (Some(m), None) => counter.count_loopy(&seq, m)?,
    };

    let mut r = Report::new(&COMPARE_COLUMNS);
    let mut push = |formula: Formula,
                    trace: Option<usize>,
                    exact: &BigCount,
                    est: Option<&loopcount::Result<LogEstimate>>| {
        let log_exact = log_or_none(exact);
        let mut row = vec![
            ("instance", Cell::text(id.clone())),
            ("model", model_cell.clone()),
            ("formula", Cell::text(formula.id())),
            ("exact", Cell::big(exact)),
            ("log_exact", Cell::opt_num(log_exact.map(Real::to_f64))),
        ];
        if let Some(l) = trace {
            row.push(("trace", Cell::int(l)));
        }
        match est {
            None => row.push(("note", Cell::text("skipped: empty sequence"))),
            Some(Err(e)) => row.push(("note", Cell::text(inapplicable(e)))),
            Some(Ok(e)) => {
                row.push(("log_estimate", Cell::num(e.log_value.to_f64())));
                row.push(("error_order", Cell::text(e.error_order.tag())));
                match log_exact {
                    Some(x) => row.push(("log_ratio", Cell::num((x - e.log_value).to_f64()))),
                    None => row.push(("note", Cell::text("exact count is zero"))),
                }
            }
        }
        r.push(row);
    };

    for (f, est) in estimates(&a.input, &seq, model, prefactor(a.factorial)) {
        push(f, None, &total, (!seq.is_empty()).then_some(&est));
    }
    if let (Some(m), Some(t)) = (model, &traces) {
        for l in support(&seq, m) {
            let c = if total == BigCount::default() {
                BigCount::default()
            } else {
                t[l].clone()
            };
            let est = dense_gd_by_trace(&seq, m, l as u64);
            push(
                Formula::DenseByTrace,
                Some(l),
                &c,
                (!seq.is_empty()).then_some(&est),
            );
        }
    }
    Ok(r.into())
}

pub fn trace_dist(a: &TraceDistArgs, engine: &Engine) -> Result<Outcome> {
    let seq = a.input.sequence()?;
    let model = LoopModel::from_weight(a.model)?;
    let exact = trace_law_exact(engine.counter(), &seq, model)?;
    let mut r = Report::new(&["law", "statistic", "trace", "value", "note"]);
    let traces: Vec<usize> = support(&seq, model).collect();

    let law_rows = |r: &mut Report, name: &'static str, law: &TraceLaw| {
        for &l in &traces {
            r.push(vec![
                ("law", Cell::text(name)),
                ("statistic", Cell::text("pmf")),
                ("trace", Cell::int(l)),
                ("value", Cell::num(law.prob(l))),
            ]);
        }
        r.push(vec![
            ("law", Cell::text(name)),
            ("statistic", Cell::text("mean")),
            ("value", Cell::num(law.mean())),
        ]);
        r.push(vec![
            ("law", Cell::text(name)),
            ("statistic", Cell::text("variance")),
            ("value", Cell::num(law.variance())),
        ]);
    };
    law_rows(&mut r, "exact", &exact);

    let approximations = [
        ("dense-binomial", trace_law_dense(&seq, model)),
        ("sparse-poisson-binomial", trace_law_sparse(&seq, model)),
    ];
    for (name, law) in approximations {
        match law {
            Ok(law) => {
                law_rows(&mut r, name, &law);
                r.push(vec![
                    ("law", Cell::text(name)),
                    ("statistic", Cell::text("tv_to_exact")),
                    ("value", Cell::num(law.tv_distance(&exact))),
                ]);
            }
            Err(e) => r.push(vec![
                ("law", Cell::text(name)),
                ("note", Cell::text(inapplicable(&e))),
            ]),
        }
    }
    if let Ok(p) = SparseTraceParams::new(&seq) {
        let (mean, var) = match model {
            LoopModel::Once => (p.expected_once(), p.variance_once()),
            LoopModel::Twice => (p.expected_twice(), p.variance_twice()),
        };
        r.push(vec![
            ("law", Cell::text("sparse-expansion")),
            ("statistic", Cell::text("mean")),
            ("value", Cell::num(mean)),
        ]);
        r.push(vec![
            ("law", Cell::text("sparse-expansion")),
            ("statistic", Cell::text("variance")),
            ("value", Cell::num(var)),
        ]);
    }
    Ok(r.into())
}

pub fn conjecture_scan(a: &ScanArgs, engine: &Engine) -> Result<Outcome> {
    if a.n_min > a.n_max {
        bail!("--n-min exceeds --n-max");
    }
    let mut r = Report::new(&[
        "n",
        "d",
        "exact",
        "log_exact",
        "log_conjecture",
        "residual",
        "residual_n2",
        "in_interval",
    ]);
    let mut violations = Vec::new();
    for n in a.n_min.max(1)..=a.n_max {
        let degrees: Vec<u64> = match a.degree {
            Some(d) => vec![d],
            None => (1..=n).collect(),
        };
        for d in degrees {
            if d == 0 || d > n || (n * d) % 2 == 1 {
                continue;
            }
            let seq = DegreeSequence::regular(n as usize, d as u32);
            let count = engine.counter().count_loopy(&seq, LoopModel::Twice)?;
            let log_exact = log_big(&count)?;
            let conj = conjecture_g2(n, d)?;
            let res = log_exact - conj.log_value;
            let n2 = Real::from(n * n);
            let inside = res < Real::ZERO && res * n2 > Real::from(-2.0);
            if n >= 4 && !inside {
                violations.push(format!("({n},{d})"));
            }
            r.push(vec![
                ("n", Cell::int(n)),
                ("d", Cell::int(d)),
                ("exact", Cell::big(&count)),
                ("log_exact", Cell::num(log_exact.to_f64())),
                ("log_conjecture", Cell::num(conj.log_value.to_f64())),
                ("residual", Cell::num(res.to_f64())),
                ("residual_n2", Cell::num((res * n2).to_f64())),
                ("in_interval", Cell::Bool(inside)),
            ]);
        }
    }
    let violation = (!violations.is_empty())
        .then(|| format!("residual outside (-2/n^2, 0) at {}", violations.join(" ")));
    Ok(Outcome {
        report: r,
        violation,
    })
}

pub fn saddle_check(a: &SaddleArgs) -> Result<Outcome> {
    let beta: Vec<f64> = if let Some(s) = &a.weights.beta {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| anyhow::anyhow!("bad exponent {t:?}: {e}"))
            })
            .collect::<Result<_>>()?
    } else {
        match a.weights.alternating.as_deref() {
            Some(&[n, amp]) if n >= 0.0 && n.fract() == 0.0 => (0..n as usize)
                .map(|j| if j % 2 == 0 { amp } else { -amp })
                .collect(),
            _ => bail!("--alternating takes a non-negative integer N and an amplitude A"),
        }
    };
    if beta.iter().any(|b| !b.is_finite()) {
        bail!("exponents must be finite");
    }
    let w = WeightVector::new(beta);
    let row = ln_u_row(&w);
    let traces: Vec<usize> = match a.trace {
        Some(l) if l > w.len() => bail!("trace {l} exceeds n = {}", w.len()),
        Some(l) => vec![l],
        None => (0..=w.len()).collect(),
    };
    let mut r = Report::new(&["trace", "ln_u_exact", "ln_u_asymptotic", "log_ratio"]);
    for l in traces {
        let approx = ln_u_asymptotic(&w, l);
        r.push(vec![
            ("trace", Cell::int(l)),
            ("ln_u_exact", Cell::num(row[l])),
            ("ln_u_asymptotic", Cell::num(approx)),
            ("log_ratio", Cell::num(row[l] - approx)),
        ]);
    }
    Ok(r.into())
}
