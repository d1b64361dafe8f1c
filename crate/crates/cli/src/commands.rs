//! Subcommand implementations.

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{self, Read};

use meanrefine_core::chain::RefinementChain;
use meanrefine_core::complexify::{self, Branch};
use meanrefine_core::discrete::{self, SequencePair};
use meanrefine_core::integral::{self, Direction, Integrand};
use meanrefine_core::iterate::{self, IterationScheme};
use meanrefine_core::mean_theory::{self, EnvelopeReport, PowerEnvelope};
use meanrefine_core::means::{self, AxiomReport, MeanKind};
use meanrefine_core::quadrature::QuadratureSpec;
use meanrefine_core::{sampling, special};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::Value;

use crate::args::*;
use crate::output::{csv_row, merge, num, object, to_value};
use crate::{io as input, CliError, Outcome};

type Res<T> = Result<T, CliError>;

/// Dotted command name for the envelope, e.g. `refine integral`.
pub fn name(command: &Command) -> String {
    match command {
        Command::Means(MeansCommand::Eval(_)) => "means eval",
        Command::Means(MeansCommand::Axioms(_)) => "means axioms",
        Command::MeanTheory(MeanTheoryCommand::Envelope(_)) => "mean-theory envelope",
        Command::MeanTheory(MeanTheoryCommand::Verify(_)) => "mean-theory verify",
        Command::Refine(RefineCommand::Discrete(_)) => "refine discrete",
        Command::Refine(RefineCommand::Integral(_)) => "refine integral",
        Command::Iterate(_) => "iterate",
        Command::GammaTable(_) => "gamma-table",
        Command::Elliptic(_) => "elliptic",
        Command::ThetaBound(_) => "theta-bound",
        Command::Uncertainty(_) => "uncertainty",
        Command::Complexify(ComplexifyCommand::Curve(_)) => "complexify curve",
        Command::Complexify(ComplexifyCommand::Classify(_)) => "complexify classify",
        Command::Aczel(_) => "aczel",
        Command::Jackson(_) => "jackson",
    }
    .to_string()
}

pub fn dispatch(cli: &Cli) -> Res<Outcome> {
    let perturb = cli.perturb_upper;
    match &cli.command {
        Command::Means(MeansCommand::Eval(a)) => means_eval(a),
        Command::Means(MeansCommand::Axioms(a)) => means_axioms(a),
        Command::MeanTheory(MeanTheoryCommand::Envelope(a)) => envelope(a),
        Command::MeanTheory(MeanTheoryCommand::Verify(a)) => verify(a),
        Command::Refine(RefineCommand::Discrete(a)) => refine_discrete(a, perturb),
        Command::Refine(RefineCommand::Integral(a)) => refine_integral(a, perturb),
        Command::Iterate(a) => iterate_cmd(a),
        Command::GammaTable(a) => gamma_table(a),
        Command::Elliptic(a) => elliptic(a),
        Command::ThetaBound(a) => theta_bound(a),
        Command::Uncertainty(a) => uncertainty(a),
        Command::Complexify(ComplexifyCommand::Curve(a)) => curve(a),
        Command::Complexify(ComplexifyCommand::Classify(a)) => classify(a),
        Command::Aczel(a) => aczel(a, perturb),
        Command::Jackson(a) => jackson(a, perturb),
    }
}

fn outcome(inputs: Value, result: Value, verdict: bool) -> Res<Outcome> {
    Ok(Outcome {
        inputs,
        result,
        verdict,
        raw: None,
    })
}

fn parse_mean(text: &str) -> Res<MeanKind> {
    text.parse::<MeanKind>()
        .map_err(|e| CliError::Usage(format!("bad --mean {text:?}: {e}")))
}

fn parse_integrand(flag: &str, text: &str) -> Res<Integrand> {
    Integrand::parse(text).map_err(|e| CliError::Usage(format!("bad --{flag} {text:?}: {e}")))
}

/// The chain with the test hook applied.
fn perturbed(chain: RefinementChain, perturb: bool) -> RefinementChain {
    if perturb {
        chain.with_upper(chain.middle * (1.0 - 1e-3))
    } else {
        chain
    }
}

/// Runs `chunk` over the fixed chunk decomposition of `samples` in parallel;
/// results come back in chunk order.
fn sweep<T: Send>(samples: usize, chunk: impl Fn(u64, usize) -> meanrefine_core::Result<T> + Sync) -> Res<Vec<T>> {
    let parts: Vec<(u64, usize)> = sampling::chunks(samples).collect();
    Ok(parts
        .into_par_iter()
        .map(|(j, len)| chunk(j, len))
        .collect::<meanrefine_core::Result<Vec<T>>>()?)
}

fn means_eval(a: &MeanEvalArgs) -> Res<Outcome> {
    let kind = parse_mean(&a.mean)?;
    let value = means::eval_mean(&kind, a.x, a.y)?;
    let result = object([
        ("mean", Value::String(kind.to_string())),
        ("x", num(a.x)),
        ("y", num(a.y)),
        ("value", num(value)),
    ]);
    outcome(to_value(a), result, true)
}

fn means_axioms(a: &AxiomsArgs) -> Res<Outcome> {
    let kind = parse_mean(&a.mean)?;
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let parts = sweep(a.samples, |j, len| means::check_axioms_chunk(&kind, a.seed, j, len))?;
    let mut report = AxiomReport {
        seed: a.seed,
        ..AxiomReport::default()
    };
    for p in parts {
        report.merge(p);
    }
    let passed = report.passed();
    let result = merge(
        to_value(&report),
        object([("mean", Value::String(kind.to_string())), ("passed", Value::Bool(passed))]),
    );
    outcome(to_value(a), result, passed)
}

fn envelope_value(env: &PowerEnvelope) -> Value {
    object([
        ("alpha", num(env.alpha)),
        ("lower", num(env.lower_exponent)),
        ("upper", num(env.upper_exponent)),
        ("regime", Value::String(env.regime.to_string())),
    ])
}

fn envelope(a: &EnvelopeArgs) -> Res<Outcome> {
    let env = mean_theory::rado_power_envelope(a.alpha)?;
    outcome(object([("alpha", num(a.alpha))]), envelope_value(&env), true)
}

fn verify(a: &VerifyArgs) -> Res<Outcome> {
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let env = mean_theory::rado_power_envelope(a.alpha)?;
    let parts = sweep(a.samples, |j, len| mean_theory::verify_envelope_chunk(a.alpha, a.seed, j, len))?;
    let mut report = EnvelopeReport {
        envelope: env,
        violations: Vec::new(),
        max_slack: f64::INFINITY,
        samples: 0,
    };
    for p in parts {
        report.merge(p);
    }
    let passed = report.violations.is_empty();
    let result = merge(
        envelope_value(&env),
        object([
            ("samples", Value::from(report.samples)),
            ("seed", Value::from(a.seed)),
            ("violations", to_value(&report.violations)),
            ("max_slack", num(report.max_slack)),
            ("passed", Value::Bool(passed)),
        ]),
    );
    let inputs = object([
        ("alpha", num(a.alpha)),
        ("samples", Value::from(a.samples)),
        ("seed", Value::from(a.seed)),
    ]);
    outcome(inputs, result, passed)
}

fn chain_value(chain: &RefinementChain) -> Value {
    merge(to_value(chain), object([("holds", Value::Bool(chain.holds()))]))
}

fn refine_discrete(a: &DiscreteArgs, perturb: bool) -> Res<Outcome> {
    let kind = parse_mean(&a.mean)?;
    let (xs, ys) = if a.input.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        input::read_pairs(text.as_bytes())?
    } else {
        let file = File::open(&a.input)
            .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", a.input.display())))?;
        input::read_pairs(file)?
    };
    let pair = SequencePair::new(xs, ys)?;
    let chain = perturbed(discrete::cde_refine(&kind, &pair)?, perturb);
    let result = merge(
        chain_value(&chain),
        object([("mean", Value::String(kind.to_string())), ("n", Value::from(pair.len()))]),
    );
    outcome(to_value(a), result, chain.holds())
}

/// Relative rounding floor added to the gap-identity check.
const IDENTITY_FLOOR: f64 = 1e-12;

fn refine_integral(a: &IntegralArgs, perturb: bool) -> Res<Outcome> {
    let kind = parse_mean(&a.mean)?;
    let f = parse_integrand("f", &a.f)?;
    let g = parse_integrand("g", &a.g)?;
    let quad = QuadratureSpec::adaptive(a.a, a.b)?;
    let head = object([
        ("mean", Value::String(kind.to_string())),
        ("f", Value::String(f.label().to_string())),
        ("g", Value::String(g.label().to_string())),
    ]);
    let (mut result, mut verdict) = if a.signed {
        if !matches!(kind, MeanKind::Min | MeanKind::Max) {
            return Err(CliError::Usage("--signed needs --mean min or --mean max".into()));
        }
        if a.q.is_some() {
            return Err(CliError::Usage("--signed and --q cannot be combined".into()));
        }
        let s = integral::minmax_refine_signed(&f, &g, &quad)?;
        let chain = perturbed(s.chain, perturb);
        let verdict = match s.direction {
            Direction::Forward => chain.holds(),
            _ => s.verdict.unwrap_or(true),
        };
        let extra = object([
            ("direction", to_value(&s.direction)),
            ("verdict", to_value(&s.verdict)),
            ("quad_error", num(s.quad_error)),
        ]);
        (merge(chain_value(&chain), extra), verdict)
    } else if let Some(q) = a.q {
        if a.a != 0.0 || a.b != 1.0 {
            return Err(CliError::Usage("--q integrates over (0, 1]; leave --a 0 --b 1".into()));
        }
        let chain = perturbed(integral::jackson_refine(&kind, &f, &g, q, 1e-15)?, perturb);
        (merge(chain_value(&chain), object([("q", num(q))])), chain.holds())
    } else {
        let report = integral::integral_refine_report(&kind, &f, &g, &quad)?;
        let chain = perturbed(report.chain, perturb);
        let extra = object([
            ("integrals", to_value(&report.integrals)),
            ("member_errors", to_value(&report.member_errors)),
        ]);
        (merge(chain_value(&chain), extra), chain.holds())
    };
    if a.identity {
        let id = integral::minmax_gap_identity(&f, &g, &quad)?;
        let floor = IDENTITY_FLOOR * (id.gap.abs() + id.product.abs());
        let holds = id.residual <= 10.0 * id.error_estimate + floor;
        verdict &= holds;
        let record = merge(to_value(&id), object([("holds", Value::Bool(holds))]));
        result = merge(result, object([("identity", record)]));
    }
    outcome(to_value(a), merge(result, head), verdict)
}

fn iterate_cmd(a: &IterateArgs) -> Res<Outcome> {
    let f = parse_integrand("f", &a.f)?;
    let g = parse_integrand("g", &a.g)?;
    let quad = QuadratureSpec::adaptive(a.a, a.b)?;
    let scheme = match a.rado {
        Some(beta) => IterationScheme::Rado { beta },
        None => IterationScheme::Power { alpha: a.alpha },
    };
    let trace = iterate::iterate_bounds_with(&f, &g, &quad, scheme, a.steps)?;
    let check = iterate::check_trace(&trace);
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        let io_err = |e: csv::Error| CliError::Io(io::Error::other(e));
        w.write_record(["n", "L", "G", "A"]).map_err(io_err)?;
        for n in 0..trace.a.len() {
            let mut row = vec![n.to_string()];
            row.extend(csv_row(&[trace.l[n], trace.g[n], trace.a[n]]));
            w.write_record(&row).map_err(io_err)?;
        }
        w.flush()?;
    }
    let result = merge(to_value(&trace), object([("check", to_value(&check))]));
    outcome(to_value(a), result, check.it1_holds)
}

fn gamma_table(a: &GammaTableArgs) -> Res<Outcome> {
    let args = input::parse_list(&a.a)?;
    let rows = args
        .iter()
        .map(|&x| special::gamma_turan_chain(x))
        .collect::<meanrefine_core::Result<Vec<_>>>()?;
    let holds = |r: &special::GammaChain| RefinementChain::new(r.lower, r.middle, r.upper).holds();
    let verdict = rows.iter().all(holds);
    if a.json {
        let list = rows
            .iter()
            .map(|r| merge(to_value(r), object([("holds", Value::Bool(holds(r)))])))
            .collect();
        return outcome(to_value(a), object([("rows", Value::Array(list))]), verdict);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Io(io::Error::other(e));
    w.write_record(["a", "g", "l", "gap"]).map_err(io_err)?;
    for r in &rows {
        w.write_record(csv_row(&[r.a, r.g_ratio, r.l_ratio, r.g_gap]))
            .map_err(io_err)?;
    }
    let raw = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(io::Error::other(e.to_string())))?)
        .expect("CSV of numbers is UTF-8");
    Ok(Outcome {
        inputs: to_value(a),
        result: Value::Null,
        verdict,
        raw: Some(raw),
    })
}

fn elliptic(a: &EllipticArgs) -> Res<Outcome> {
    let bounds = special::elliptic_bounds(a.x, a.level)?;
    let k = special::elliptic_k(a.x)?;
    let holds = bounds.lower <= k && k <= bounds.upper;
    let result = merge(to_value(&bounds), object([("k", num(k)), ("holds", Value::Bool(holds))]));
    outcome(to_value(a), result, holds)
}

fn theta_bound(a: &ThetaBoundArgs) -> Res<Outcome> {
    let tb = special::theta_min_bound(a.q)?;
    let ln_min = special::theta_min_ln(a.q)?;
    let holds = ln_min <= tb.log_bound;
    let mut result = object([
        ("q", num(a.q)),
        ("log10_bound", num(tb.log10_bound)),
        ("log10_min", num(ln_min / std::f64::consts::LN_10)),
        ("holds", Value::Bool(holds)),
    ]);
    if !a.log {
        let direct = special::theta3(FRAC_PI_2, a.q, 1e-17)?;
        result = merge(
            result,
            object([
                ("bound", num(tb.bound)),
                ("log_bound", num(tb.log_bound)),
                ("min_series", num(direct)),
            ]),
        );
    }
    if a.extended {
        result = merge(result, object([("extended", extended_min(a.q)?)]));
    }
    outcome(to_value(a), result, holds)
}

#[cfg(feature = "high-precision")]
fn extended_min(q: f64) -> Res<Value> {
    let bits = crate::precision::precision_bits()?;
    Ok(to_value(&crate::precision::theta_min_log10(&q.to_string(), bits)?))
}

#[cfg(not(feature = "high-precision"))]
fn extended_min(_q: f64) -> Res<Value> {
    Err(CliError::Usage("--extended needs the high-precision feature".into()))
}

fn uncertainty(a: &UncertaintyArgs) -> Res<Outcome> {
    let v = input::parse_complex_list(&a.vector)?;
    let u = discrete::dft_uncertainty(&v)?;
    outcome(to_value(a), to_value(&u), u.holds)
}

/// Largest relative quartic residual accepted on sampled curve points.
const CURVE_TOL: f64 = 1e-9;

fn curve(a: &CurveArgs) -> Res<Outcome> {
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let points = complexify::sample_curve(a.samples);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Io(io::Error::other(e));
    w.write_record(["phi", "branch", "x", "y", "residual"]).map_err(io_err)?;
    for p in &points {
        let nums = csv_row(&[p.x, p.y, p.residual]);
        w.write_record([crate::output::g17(p.phi), p.branch.to_string(), nums[0].clone(), nums[1].clone(), nums[2].clone()])
            .map_err(io_err)?;
    }
    let text = w.into_inner().map_err(|e| CliError::Io(io::Error::other(e.to_string())))?;
    let worst = points.iter().map(|p| p.relative_residual()).fold(0.0, f64::max);
    let verdict = worst <= CURVE_TOL;
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            let result = object([
                ("points", Value::from(points.len())),
                ("max_relative_residual", num(worst)),
                ("out", Value::String(path.display().to_string())),
            ]);
            outcome(to_value(a), result, verdict)
        }
        None => Ok(Outcome {
            inputs: to_value(a),
            result: Value::Null,
            verdict,
            raw: Some(String::from_utf8(text).expect("CSV of numbers is UTF-8")),
        }),
    }
}

/// Relative width of the boundary band in `complexify classify`.
const CLASSIFY_TOL: f64 = 1e-12;

fn classify(a: &ClassifyArgs) -> Res<Outcome> {
    let s = Complex64::new(a.re, a.im);
    let p = complexify::classify_point(s, CLASSIFY_TOL);
    let disk = complexify::classify_unit_disk(s);
    let crossings: Vec<Value> = [Branch::Plus, Branch::Minus]
        .into_iter()
        .map(|b| {
            let r = complexify::curve_radius(s.arg(), b);
            object([("branch", Value::String(b.to_string())), ("r", num(r))])
        })
        .collect();
    let result = object([
        ("re", num(a.re)),
        ("im", num(a.im)),
        ("lhs", num(p.lhs)),
        ("rhs", num(p.rhs)),
        ("region", Value::String(p.region.to_string())),
        ("holds", Value::Bool(p.holds())),
        ("curve_radii", Value::Array(crossings)),
        ("unit_disk", to_value(&disk)),
    ]);
    outcome(to_value(a), result, true)
}

fn aczel(a: &AczelArgs, perturb: bool) -> Res<Outcome> {
    let kind = parse_mean(&a.mean)?;
    let x = input::parse_list(&a.x)?;
    let y = input::parse_list(&a.y)?;
    let chain = perturbed(discrete::aczel_refine(&kind, &x, &y)?, perturb);
    let result = merge(chain_value(&chain), object([("mean", Value::String(kind.to_string()))]));
    outcome(to_value(a), result, chain.holds())
}

fn jackson(a: &JacksonArgs, perturb: bool) -> Res<Outcome> {
    let kind = parse_mean(&a.mean)?;
    let f = parse_integrand("f", &a.f)?;
    let g = parse_integrand("g", &a.g)?;
    let chain = perturbed(integral::jackson_refine(&kind, &f, &g, a.q, a.tail_tol)?, perturb);
    let jf = integral::jackson_integral(&f, a.q, a.tail_tol)?;
    let jg = integral::jackson_integral(&g, a.q, a.tail_tol)?;
    let result = merge(
        chain_value(&chain),
        object([
            ("mean", Value::String(kind.to_string())),
            ("integral_f", to_value(&jf)),
            ("integral_g", to_value(&jg)),
        ]),
    );
    outcome(to_value(a), result, chain.holds())
}
