use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use cubepsc_core::cubset::{reduced_product, text, CubeError, CubicalSet, IdentityViolation, MapViolation};
use cubepsc_core::geomcurv::{
    angle_chart_check, curvature_check, error_term_check, pre_gauge_check, rescaling_check, suspension_check, AngleChart,
    CurvError, MetricFamily, SlownessMode, ORACLE_TOL,
};
use cubepsc_core::kan::{
    certify_kan, is_contractible, is_kan, is_kan_fibration, pi0, pi_n, tables_isomorphic, AssignmentReport, KanError,
    SearchOrder, Verdict,
};
use cubepsc_core::levelset::{flow_decomposition_check, property_scan, DiceConfig, DiceError};
use cubepsc_core::specseq::{summarize, CoupleFile, SpecError};
use cubepsc_core::zlinalg::{cubical_chain_complex, AbelianInvariants};

use crate::report::{Failure, InputDigest, Outcome};
use crate::{Command, Mode, Options};

pub struct Context<'a> {
    opts: &'a Options,
    pub inputs: Vec<InputDigest>,
    pub seed_used: Option<u64>,
}

impl<'a> Context<'a> {
    pub fn new(opts: &'a Options) -> Self {
        Context { opts, inputs: Vec::new(), seed_used: None }
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("cannot read {}: {}", path.display(), e)))?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: format!("{:x}", Sha256::digest(&bytes)) });
        String::from_utf8(bytes).map_err(|e| Failure::input(format!("{} is not UTF-8: {}", path.display(), e)))
    }

    /// The first of the given path flags that is set.
    fn path(&self, flags: &[(&str, &Option<PathBuf>)]) -> Result<PathBuf, Failure> {
        flags
            .iter()
            .find_map(|(_, p)| (*p).clone())
            .ok_or_else(|| Failure::input(format!("missing --{}", flags[0].0)))
    }

    fn input_text(&mut self) -> Result<String, Failure> {
        let p = self.path(&[("input", &self.opts.input)])?;
        self.read(&p)
    }

    fn family_text(&mut self) -> Result<String, Failure> {
        let p = self.path(&[("family", &self.opts.family), ("input", &self.opts.input)])?;
        self.read(&p)
    }

    fn seed(&mut self, default: u64) -> u64 {
        let s = self.opts.seed.unwrap_or(default);
        self.seed_used = Some(s);
        s
    }
}

fn cube_err(e: CubeError) -> Failure {
    match e {
        CubeError::Parse { line, column, message } => Failure::at(line, column, message),
        other => Failure::input(other.to_string()),
    }
}

fn kan_err(e: KanError) -> Failure {
    match e {
        KanError::Cube(c) => cube_err(c),
        other => Failure::input(other.to_string()),
    }
}

fn curv_err(e: CurvError) -> Failure {
    match e {
        CurvError::Format { line, col, message } => Failure::at(line, col, message),
        other => Failure::input(other.to_string()),
    }
}

fn dice_err(e: DiceError) -> Failure {
    match e {
        DiceError::Config(m) => Failure::input(m),
        other => Failure::Internal(other.to_string()),
    }
}

fn spec_err(e: SpecError) -> Failure {
    match e {
        SpecError::Linear(z) => Failure::Internal(z.to_string()),
        other => Failure::input(other.to_string()),
    }
}

pub fn dispatch(command: Command, ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    match command {
        Command::Validate => validate(ctx),
        Command::Kan => kan(ctx),
        Command::Contractible => contractible(ctx),
        Command::Fibration => fibration(ctx),
        Command::Pi0 => components(ctx),
        Command::Pi => homotopy_group(ctx),
        Command::Homology => homology(ctx),
        Command::Product => product(ctx),
        Command::Specseq => specseq(ctx),
        Command::Curvature => curvature(ctx),
        Command::Suspension => suspension(ctx),
        Command::Rescale => rescale(ctx),
        Command::Pregauge => pregauge(ctx),
        Command::Angle => angle(ctx),
        Command::Dice => dice(ctx),
        Command::Flow => flow(ctx),
    }
}

#[derive(Serialize)]
struct SetSummary {
    name: String,
    generators: Vec<usize>,
    trunc_dim: usize,
    euler_characteristic: i64,
    violations: Vec<IdentityViolation>,
}

fn set_summary(name: &str, x: &CubicalSet) -> SetSummary {
    SetSummary {
        name: name.to_string(),
        generators: (0..=x.max_generator_dim()).map(|d| x.generator_count(d)).collect(),
        trunc_dim: x.trunc_dim(),
        euler_characteristic: x.euler_characteristic(),
        violations: x.validate(),
    }
}

fn validate(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let file = text::parse(&ctx.input_text()?).map_err(cube_err)?;
    let sets: Vec<SetSummary> = file.sets.iter().map(|(n, x)| set_summary(n, x)).collect();
    #[derive(Serialize)]
    struct MapSummary {
        name: String,
        violations: Vec<MapViolation>,
    }
    let maps: Vec<MapSummary> =
        file.maps.iter().map(|(n, m)| MapSummary { name: n.clone(), violations: m.validate() }).collect();
    let bad = sets.iter().map(|s| s.violations.len()).sum::<usize>() + maps.iter().map(|m| m.violations.len()).sum::<usize>();
    let verdict = if bad == 0 { "valid".to_string() } else { format!("{} identity violations", bad) };
    Ok(Outcome::new(bad == 0, verdict, json!({ "sets": sets, "maps": maps })))
}

/// The first set of the input, which must satisfy the cubical identities.
fn load_set(ctx: &mut Context<'_>) -> Result<CubicalSet, Failure> {
    let mut file = text::parse(&ctx.input_text()?).map_err(cube_err)?;
    if file.sets.is_empty() {
        return Err(Failure::input("the input holds no set"));
    }
    let (name, x) = file.sets.remove(0);
    require_valid(&name, &x)?;
    Ok(x)
}

fn require_valid(name: &str, x: &CubicalSet) -> Result<(), Failure> {
    match x.validate().first() {
        None => Ok(()),
        Some(v) => Err(Failure::input(format!("set `{}` violates the cubical identities: {:?}", name, v))),
    }
}

fn describe(r: &Option<AssignmentReport>) -> String {
    match r {
        Some(AssignmentReport { n, open: Some(o), .. }) => format!("dim-{} horn open at {} has no filler", n, o),
        Some(AssignmentReport { n: 0, .. }) => "the set is empty".to_string(),
        Some(AssignmentReport { n, open: None, .. }) => format!("dim-{} sphere has no filler", n),
        None => String::new(),
    }
}

fn kan(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let x = load_set(ctx)?;
    let up_to = ctx.opts.max_dim.unwrap_or(3);
    let v = is_kan(&x, up_to).map_err(kan_err)?;
    let verdict = if v.holds { format!("kan up to {}", up_to) } else { format!("not kan: {}", describe(&v.counterexample)) };
    let note = format!("{} horns checked", v.instances_checked);
    Ok(Outcome::new(v.holds, verdict, &v).note(note))
}

fn contractible(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let x = load_set(ctx)?;
    let up_to = ctx.opts.max_dim.unwrap_or(3);
    let c = is_contractible(&x, up_to).map_err(kan_err)?;
    let k = is_kan(&x, up_to).map_err(kan_err)?;
    let (passed, verdict) = match (c.holds, k.holds) {
        (true, true) => (true, format!("contractible up to {}", up_to)),
        (true, false) => (false, format!("contractible but not kan: {}", describe(&k.counterexample))),
        (false, _) => (false, format!("not contractible: {}", describe(&c.counterexample))),
    };
    #[derive(Serialize)]
    struct Both<'a> {
        contractible: &'a Verdict,
        kan: &'a Verdict,
    }
    Ok(Outcome::new(passed, verdict, Both { contractible: &c, kan: &k }))
}

fn fibration(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let file = text::parse(&ctx.input_text()?).map_err(cube_err)?;
    let (name, f) = file.maps.into_iter().next().ok_or_else(|| Failure::input("the input holds no map"))?;
    require_valid("source", &f.source)?;
    require_valid("target", &f.target)?;
    if let Some(v) = f.validate().first() {
        return Err(Failure::input(format!("map `{}` does not commute with faces: {:?}", name, v)));
    }
    let up_to = ctx.opts.max_dim.unwrap_or(2);
    let v = is_kan_fibration(&f, up_to).map_err(kan_err)?;
    let verdict = if v.holds {
        format!("kan fibration up to {}", up_to)
    } else {
        format!(
            "not a kan fibration: {} over {}",
            describe(&v.counterexample),
            v.base_cube.as_deref().unwrap_or("?")
        )
    };
    Ok(Outcome::new(v.holds, verdict, json!({ "map": name, "verdict": v })))
}

fn components(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let x = load_set(ctx)?;
    let comps = pi0(&x);
    Ok(Outcome::new(true, format!("{} components", comps.len()), json!({ "components": comps })))
}

fn homotopy_group(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let x = load_set(ctx)?;
    let n = ctx.opts.n.unwrap_or(1);
    let base = match &ctx.opts.base {
        Some(name) => x
            .find(name)
            .filter(|g| g.dim == 0)
            .ok_or_else(|| Failure::input(format!("basepoint `{}` is not a vertex", name)))?,
        None => x.generators(0).next().ok_or_else(|| Failure::input("the set has no vertices"))?,
    };
    let cert = match certify_kan(&x, n + 1).map_err(kan_err)? {
        Ok(c) => c,
        Err(v) => {
            let verdict = format!("pi_{} undefined: {}", n, describe(&v.counterexample));
            return Ok(Outcome::new(false, verdict, json!({ "kan": v })));
        }
    };
    let forward = pi_n(&x, &cert, base, n, SearchOrder::Forward);
    let reverse = pi_n(&x, &cert, base, n, SearchOrder::Reverse);
    match (forward, reverse) {
        (Ok(f), Ok(r)) => {
            let stable = f.order == r.order && tables_isomorphic(&f.table, &r.table);
            let verdict = if stable {
                format!("|pi_{}| = {}", n, f.order)
            } else {
                format!("pi_{} depends on the filler order", n)
            };
            let result = json!({ "group": f, "reverse_order": { "order": r.order, "isomorphic": stable } });
            Ok(Outcome::new(stable, verdict, result))
        }
        (Err(KanError::GroupAxiom(m)), _) | (_, Err(KanError::GroupAxiom(m))) => {
            Ok(Outcome::new(false, format!("group axiom violated: {}", m), json!({ "violation": m })))
        }
        (Err(e), _) | (_, Err(e)) => Err(kan_err(e)),
    }
}

#[derive(Serialize)]
struct HomologySummary {
    groups: Vec<AbelianInvariants>,
    boundary_squares_zero: bool,
    euler_cells: i64,
    euler_homology: i64,
}

fn homology_of(x: &CubicalSet) -> Result<HomologySummary, Failure> {
    let complex = cubical_chain_complex(x);
    let boundary_squares_zero = complex.check_square_zero().is_ok();
    let groups = complex.homology_invariants().map_err(|e| Failure::Internal(e.to_string()))?;
    let euler_homology = groups.iter().enumerate().map(|(n, g)| if n % 2 == 0 { g.free_rank as i64 } else { -(g.free_rank as i64) }).sum();
    Ok(HomologySummary { groups, boundary_squares_zero, euler_cells: complex.euler_characteristic(), euler_homology })
}

impl HomologySummary {
    fn holds(&self) -> bool {
        self.boundary_squares_zero && self.euler_cells == self.euler_homology
    }

    fn describe(&self) -> String {
        self.groups.iter().enumerate().map(|(n, g)| format!("H{}={}", n, g)).collect::<Vec<_>>().join(", ")
    }
}

fn homology(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let x = load_set(ctx)?;
    let h = homology_of(&x)?;
    let verdict = if h.holds() { h.describe() } else { format!("inconsistent: {}", h.describe()) };
    Ok(Outcome::new(h.holds(), verdict, &h))
}

fn product(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let file = text::parse(&ctx.input_text()?).map_err(cube_err)?;
    if file.sets.len() < 2 {
        return Err(Failure::input(format!("product needs two sets, found {}", file.sets.len())));
    }
    let ((xn, x), (yn, y)) = (&file.sets[0], &file.sets[1]);
    require_valid(xn, x)?;
    require_valid(yn, y)?;
    let p = reduced_product(x, y, ctx.opts.max_dim).map_err(cube_err)?;
    let summary = set_summary(&format!("{} ⊗ {}", xn, yn), &p);
    let h = homology_of(&p)?;
    let multiplicative =
        (ctx.opts.max_dim.is_none()).then(|| p.euler_characteristic() == x.euler_characteristic() * y.euler_characteristic());
    let passed = summary.violations.is_empty() && h.holds() && multiplicative != Some(false);
    let verdict = format!("cells {:?}; {}", summary.generators, h.describe());
    Ok(Outcome::new(passed, verdict, json!({ "product": summary, "homology": h, "euler_multiplicative": multiplicative })))
}

fn specseq(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let path = ctx.path(&[("couple", &ctx.opts.couple), ("input", &ctx.opts.input)])?;
    let text = ctx.read(&path)?;
    let file: CoupleFile = serde_json::from_str(&text).map_err(|e| Failure::at(e.line(), e.column(), e.to_string()))?;
    let pages = ctx.opts.pages.unwrap_or(3);
    let summary = match summarize(&file, pages) {
        Ok(s) => s,
        Err(e @ (SpecError::NotInZ { .. } | SpecError::IllDefined(_))) => {
            return Ok(Outcome::new(false, format!("ill-defined couple: {}", e), json!({ "error": e.to_string() })))
        }
        Err(e) => return Err(spec_err(e)),
    };
    let failed: usize = summary.checks.iter().map(|c| c.report.violations.len()).sum();
    let run: usize = summary.checks.iter().map(|c| c.report.checks_run).sum();
    let verdict = match (&summary.monoid, summary.passed) {
        (Some(m), true) => format!("M/f(L) is a group isomorphic to A ({} classes)", m.classes.len()),
        (Some(_), false) => "homomorphism theorem fails".to_string(),
        (None, true) => format!("{} checks pass", run),
        (None, false) => format!("{} of {} checks fail", failed, run),
    };
    Ok(Outcome::new(summary.passed, verdict, &summary))
}

/// Compact form for verdict lines.
fn num(x: f64) -> String {
    if x == 0.0 || (1e-3..1e4).contains(&x.abs()) {
        format!("{}", (x * 1e6).round() / 1e6)
    } else {
        format!("{:.2e}", x)
    }
}

fn family(ctx: &mut Context<'_>) -> Result<MetricFamily, Failure> {
    MetricFamily::parse(&ctx.family_text()?).map_err(curv_err)
}

fn curvature(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let fam = family(ctx)?;
    let seed = ctx.seed(fam.seed);
    let tol = ctx.opts.tol.unwrap_or(ORACLE_TOL);
    let r = curvature_check(&fam, ctx.opts.samples.unwrap_or(100), seed, tol).map_err(curv_err)?;
    let verdict = format!("max error {} (relative {})", num(r.max_abs_error), num(r.max_rel_error));
    Ok(Outcome::new(r.passed, verdict, &r))
}

fn suspension(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let fam = family(ctx)?;
    let seed = ctx.seed(fam.seed);
    let k = ctx.opts.samples.unwrap_or(100);
    let mode = match ctx.opts.mode.unwrap_or(Mode::Eighth) {
        Mode::Eighth => SlownessMode::Eighth,
        Mode::Chapter7 => SlownessMode::Chapter7,
    };
    let s = suspension_check(&fam, k, seed, mode).map_err(curv_err)?;
    let error_term = match error_term_check(&fam, k, seed) {
        Ok(r) => Some(r),
        Err(CurvError::Precondition(_)) => None,
        Err(e) => return Err(curv_err(e)),
    };
    let passed = s.passed && error_term.as_ref().map_or(true, |e| e.passed);
    let verdict = format!(
        "residual {}; {} of {} samples satisfy the predicate",
        num(s.max_residual),
        s.accepted,
        s.samples.len()
    );
    let note = match &error_term {
        Some(e) => format!("error term margin {}", num(e.min_margin)),
        None => "error term not checked: the eighth predicate fails somewhere".to_string(),
    };
    Ok(Outcome::new(passed, verdict, json!({ "suspension": s, "error_term": error_term })).note(note))
}

fn rescale(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let fam = family(ctx)?;
    let seed = ctx.seed(fam.seed);
    let tol = ctx.opts.tol.unwrap_or(ORACLE_TOL);
    let r = rescaling_check(&fam, &[1.0, 2.0, 4.0, 8.0], ctx.opts.samples.unwrap_or(20), seed, tol).map_err(curv_err)?;
    let verdict = match r.fitted_exponent {
        Some(e) => format!("decay exponent {}", num(e)),
        None => "scalar curvature vanishes".to_string(),
    };
    Ok(Outcome::new(r.passed, verdict, &r))
}

fn pregauge(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let seed = ctx.seed(0);
    let max_dim = ctx.opts.max_dim.unwrap_or(6);
    let r = pre_gauge_check(ctx.opts.samples.unwrap_or(200), seed, max_dim, 1e4, ctx.opts.tol.unwrap_or(1e-9))
        .map_err(curv_err)?;
    let verdict = format!("max residual {}, naturality {}", num(r.max_residual), num(r.max_naturality));
    Ok(Outcome::new(r.passed, verdict, &r))
}

fn angle(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let chart = AngleChart::parse(&ctx.input_text()?).map_err(curv_err)?;
    let seed = ctx.seed(chart.seed);
    let r = angle_chart_check(&chart, ctx.opts.samples.unwrap_or(100), seed, ctx.opts.tol.unwrap_or(1e-5))
        .map_err(curv_err)?;
    let verdict = match r.polar_radius_error {
        Some(p) => format!("max error {}, polar radius error {}", num(r.max_error), num(p)),
        None => format!("max error {}", num(r.max_error)),
    };
    Ok(Outcome::new(r.passed, verdict, &r))
}

fn dice_config(ctx: &Context<'_>) -> Result<DiceConfig, Failure> {
    DiceConfig::new(ctx.opts.n.unwrap_or(2), ctx.opts.rho.unwrap_or(21.0)).map_err(dice_err)
}

fn dice(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let cfg = dice_config(ctx)?;
    let seed = ctx.seed(0);
    let r = property_scan(&cfg, ctx.opts.samples.unwrap_or(10_000), seed);
    let total: usize = r.violation_counts.iter().sum();
    let verdict = format!("{} violations at {} level points", total, r.level_points);
    Ok(Outcome::new(r.passed, verdict, &r))
}

fn flow(ctx: &mut Context<'_>) -> Result<Outcome, Failure> {
    let cfg = dice_config(ctx)?;
    let seed = ctx.seed(0);
    let r = flow_decomposition_check(&cfg, ctx.opts.samples.unwrap_or(50), seed, 1e-3).map_err(dice_err)?;
    let verdict = format!(
        "level error {}, orthogonality {}, translation error {}",
        num(r.max_level_error),
        num(r.max_orthogonality),
        num(r.max_translation_error)
    );
    Ok(Outcome::new(r.passed, verdict, &r))
}
