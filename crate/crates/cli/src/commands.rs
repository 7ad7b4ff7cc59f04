use latfree::expr::{parse, print, Expr, ExprError};
use latfree::lattice::{
    contractivity_audit, extend_hom, make_element, operator_norm_bound, pullback_seminorm, FreeElement, LatticeMap,
    TargetLattice,
};
use latfree::norm::{
    maximality_audit, norm_bounds, norm_exact_polyhedral, standard_family, LatticeSeminorm, NormCertificate,
    NormError, NormOptions, PNorm, SpaceSpec,
};
use latfree::pwl::{equivalent, Equivalence, PwlError};
use latfree::rational::parse_rational;
use latfree::Rational;
use serde_json::{json, Value};

use crate::acceptance::{run_suite, SuiteConfig};
use crate::args::{Cli, Command, Method};
use crate::report::{self, object};

/// A failed command, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1: bad flags or unparsable input.
    Usage(String),
    /// Exit 2: an internal invariant did not hold.
    Fault(String),
    /// Exit 3: the command ran, but an audit or test failed.
    Failed(Value),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Fault(_) => 2,
            CliError::Failed(_) => 3,
        }
    }
}

impl From<NormError> for CliError {
    fn from(e: NormError) -> Self {
        match e {
            NormError::Fault(_) | NormError::Pwl(PwlError::Fault(_)) => CliError::Fault(e.to_string()),
            NormError::Pwl(PwlError::Degenerate | PwlError::UnboundedRegion) => CliError::Fault(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<PwlError> for CliError {
    fn from(e: PwlError) -> Self {
        CliError::from(NormError::Pwl(e))
    }
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub fn parse_vector(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(|t| parse_rational(t).ok_or_else(|| CliError::Usage(format!("invalid rational '{}'", t.trim()))))
        .collect()
}

pub fn parse_vectors(text: &str) -> Result<Vec<Vec<Rational>>, CliError> {
    text.split(';').filter(|t| !t.trim().is_empty()).map(parse_vector).collect()
}

fn space(cli: &Cli) -> Result<SpaceSpec, CliError> {
    let text = cli.space.as_deref().ok_or_else(|| CliError::Usage("--space is required".into()))?;
    text.parse().map_err(CliError::Usage)
}

fn exprs(cli: &Cli, count: usize) -> Result<&[String], CliError> {
    if cli.exprs.len() != count {
        let want = if count == 1 { "one --expr".to_string() } else { format!("{count} --expr flags") };
        return Err(CliError::Usage(format!("{} takes {want}, got {}", cli.command.name(), cli.exprs.len())));
    }
    Ok(&cli.exprs)
}

/// Vectors feeding the variables: `--vectors`, or the unit vectors.
fn input_vectors(cli: &Cli, space: &SpaceSpec) -> Result<Vec<Vec<Rational>>, CliError> {
    let d = space.dim();
    let vs = match &cli.vectors {
        Some(text) => parse_vectors(text)?,
        None => (0..d).map(|i| (0..d).map(|j| Rational::from_integer(((i == j) as i64).into())).collect()).collect(),
    };
    if vs.is_empty() {
        return Err(CliError::Usage("--vectors is empty".into()));
    }
    if let Some(bad) = vs.iter().find(|v| v.len() != d) {
        return Err(CliError::Usage(format!("vector of length {} in a space of dimension {d}", bad.len())));
    }
    Ok(vs)
}

fn element(cli: &Cli, space: &SpaceSpec, text: &str) -> Result<(Expr, FreeElement), CliError> {
    let vs = input_vectors(cli, space)?;
    let e = parse(text, vs.len())?;
    let elem = make_element(space, &vs, &e)?;
    Ok((e, elem))
}

fn options(cli: &Cli) -> Result<NormOptions, CliError> {
    if !(cli.tolerance > 0.0 && cli.tolerance < 1.0) {
        return Err(CliError::Usage(format!("--tolerance must lie in (0, 1), got {}", cli.tolerance)));
    }
    if cli.k_max == Some(0) {
        return Err(CliError::Usage("--k-max must be positive".into()));
    }
    Ok(NormOptions { k_max: cli.k_max, restarts: cli.restarts, seed: cli.seed, tolerance: cli.tolerance })
}

fn options_json(cli: &Cli) -> Value {
    json!({
        "k_max": cli.k_max,
        "restarts": cli.restarts,
        "seed": cli.seed,
        "tolerance": cli.tolerance,
        "method": format!("{:?}", cli.method).to_lowercase(),
    })
}

fn certify(cli: &Cli, elem: &FreeElement) -> Result<NormCertificate, CliError> {
    let opts = options(cli)?;
    let space = &elem.space;
    let cert = match cli.method {
        Method::Exact => norm_exact_polyhedral(elem.function(), space)?,
        Method::Bounds => norm_bounds(elem.function(), space, &opts)?,
        Method::Auto if space.is_polyhedral() => norm_exact_polyhedral(elem.function(), space)?,
        Method::Auto => norm_bounds(elem.function(), space, &opts)?,
    };
    Ok(cert)
}

fn target(cli: &Cli, r: usize) -> Result<TargetLattice, CliError> {
    let p: PNorm = cli.target.parse().map_err(CliError::Usage)?;
    Ok(TargetLattice::new(r, p))
}

fn lattice_map(cli: &Cli, space: &SpaceSpec) -> Result<Option<(LatticeMap, TargetLattice)>, CliError> {
    let Some(text) = &cli.map else { return Ok(None) };
    let images = parse_vectors(text)?;
    if images.len() != space.dim() {
        return Err(CliError::Usage(format!("--map gives {} images for a space of dimension {}", images.len(), space.dim())));
    }
    let map = LatticeMap::from_generator_images(&images)?;
    let target = target(cli, map.rows())?;
    Ok(Some((map, target)))
}

fn inputs(cli: &Cli, exprs: &[Expr], elems: &[&FreeElement]) -> Value {
    let mut pairs = vec![("exprs", json!(exprs.iter().map(print).collect::<Vec<_>>()))];
    if let Some(first) = elems.first() {
        pairs.push(("reduced", json!(elems.iter().map(|e| print(&e.expr)).collect::<Vec<_>>())));
        pairs.push(("vectors", report::vectors(&first.vectors)));
    }
    if matches!(cli.command, Command::Norm | Command::Audit) {
        pairs.push(("options", options_json(cli)));
    }
    object(pairs)
}

pub fn execute(cli: &Cli) -> Result<Value, CliError> {
    match cli.command {
        Command::Eval => eval(cli),
        Command::Equiv => equiv(cli),
        Command::Norm => norm(cli),
        Command::Extend => extend(cli),
        Command::Audit => audit(cli),
        Command::Selftest => selftest(cli),
    }
}

fn eval(cli: &Cli) -> Result<Value, CliError> {
    let text = &exprs(cli, 1)?[0];
    let at = parse_vector(cli.at.as_deref().ok_or_else(|| CliError::Usage("eval needs --at".into()))?)?;
    let arity = cli.arity.unwrap_or(at.len());
    if arity != at.len() {
        return Err(CliError::Usage(format!("--at has {} coordinates, --arity is {arity}", at.len())));
    }
    let e = parse(text, arity)?;
    let value = e.eval(&at)?;
    Ok(json!({
        "command": "eval",
        "inputs": {"expr": print(&e), "arity": arity, "at": report::vector(&at)},
        "value": report::q(&value),
    }))
}

fn equiv(cli: &Cli) -> Result<Value, CliError> {
    let space = space(cli)?;
    let texts = exprs(cli, 2)?;
    let (e1, f) = element(cli, &space, &texts[0])?;
    let (e2, g) = element(cli, &space, &texts[1])?;
    let verdict = equivalent(f.function(), g.function())?;
    let mut out = object(vec![
        ("command", json!("equiv")),
        ("space", json!(space.to_string())),
        ("inputs", inputs(cli, &[e1, e2], &[&f, &g])),
        ("equal", json!(verdict.is_equal())),
    ]);
    if let Equivalence::Unequal { witness, left, right } = verdict {
        let map = out.as_object_mut().expect("object");
        map.insert("witness".into(), report::vector(&witness));
        map.insert("left".into(), report::q(&left));
        map.insert("right".into(), report::q(&right));
    }
    Ok(out)
}

fn norm(cli: &Cli) -> Result<Value, CliError> {
    let space = space(cli)?;
    let (e, elem) = element(cli, &space, &exprs(cli, 1)?[0])?;
    let cert = certify(cli, &elem)?;
    Ok(object(vec![
        ("command", json!("norm")),
        ("space", json!(space.to_string())),
        ("inputs", inputs(cli, &[e], &[&elem])),
        ("certificate", report::certificate(&cert)),
    ]))
}

fn extend(cli: &Cli) -> Result<Value, CliError> {
    let space = space(cli)?;
    let (e, elem) = element(cli, &space, &exprs(cli, 1)?[0])?;
    let (map, target) = lattice_map(cli, &space)?.ok_or_else(|| CliError::Usage("extend needs --map".into()))?;
    let image = extend_hom(&elem, &map, &target)?;
    let bound = operator_norm_bound(&map, &space, &target)?;
    Ok(object(vec![
        ("command", json!("extend")),
        ("space", json!(space.to_string())),
        ("inputs", inputs(cli, &[e], &[&elem])),
        ("target", json!(format!("l{}^{}", target.p, target.r))),
        ("image", report::vector(&image)),
        ("image_norm", report::real(&target.norm(&image))),
        ("operator_norm", json!({"upper": report::q(&bound.upper), "exact": bound.exact})),
    ]))
}

fn audit(cli: &Cli) -> Result<Value, CliError> {
    let space = space(cli)?;
    let (e, elem) = element(cli, &space, &exprs(cli, 1)?[0])?;
    let cert = certify(cli, &elem)?;
    let mut family: Vec<Box<dyn LatticeSeminorm>> = standard_family(&space, cli.family, cli.seed);
    let map = lattice_map(cli, &space)?;
    if let Some((m, t)) = &map {
        family.push(Box::new(pullback_seminorm(m, &space, t)?));
    }
    let report = maximality_audit(elem.function(), &family, &cert)?;
    let violations: Vec<Value> = report
        .violations()
        .map(|v| json!({"seminorm": v.label, "value": report::real(&v.value)}))
        .collect();
    let mut passed = report.passed();
    let mut pairs = vec![
        ("command", json!("audit")),
        ("space", json!(space.to_string())),
        ("inputs", inputs(cli, &[e], &[&elem])),
        ("certificate", report::certificate(&cert)),
        (
            "maximality",
            json!({
                "bound": report::q(&report.bound),
                "checked": report.entries.len(),
                "violations": violations,
            }),
        ),
    ];
    if let Some((m, t)) = &map {
        let c = contractivity_audit(&elem, m, t, &cert)?;
        passed &= c.ok;
        pairs.push((
            "contractivity",
            json!({
                "image": report::vector(&c.image),
                "image_norm": report::real(&c.image_norm),
                "operator_bound": report::q(&c.operator_bound),
                "bound": report::q(&c.bound),
                "ok": c.ok,
            }),
        ));
    }
    pairs.push(("passed", json!(passed)));
    let out = object(pairs);
    if passed {
        Ok(out)
    } else {
        Err(CliError::Failed(out))
    }
}

fn selftest(cli: &Cli) -> Result<Value, CliError> {
    let only = match &cli.criteria {
        None => None,
        Some(text) => Some(
            text.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("invalid criterion '{t}'"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let cfg = SuiteConfig { seed: cli.seed, ..SuiteConfig::default() };
    let results = run_suite(&cfg, only.as_deref());
    let passed = results.iter().all(|r| r.passed);
    let rows: Vec<Value> = results
        .iter()
        .map(|r| {
            let mut row = object(vec![
                ("id", json!(r.id)),
                ("name", json!(r.name)),
                ("passed", json!(r.passed)),
                ("detail", json!(r.detail)),
            ]);
            if cli.timing {
                row.as_object_mut().expect("object").insert("elapsed_ms".into(), json!(r.elapsed.as_secs_f64() * 1e3));
            }
            row
        })
        .collect();
    let out = json!({"command": "selftest", "seed": cli.seed, "criteria": rows, "passed": passed});
    if passed {
        Ok(out)
    } else {
        Err(CliError::Failed(out))
    }
}
