//! The four subcommands as plain functions returning an exit code and text.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use setfix_core::contraction::{
    check_condition_global, check_condition_sampled, check_single_valued_global, ConditionForm,
    ConditionReport, ContractionParams,
};
use setfix_core::oracle::{
    certify_uniqueness, enumerate_fixed_points, generate_instance, InstanceProfile, MapKind,
    NotApplicable, ParamRanges, UniquenessVerdict,
};
use setfix_core::orbit::{
    solve, step_contraction_check, tail_bound_checks, Driver, OrbitStatus, SolveOptions,
};
use setfix_core::space::Violation;
use setfix_core::{Error as CoreError, PointId};

use crate::attrs;
use crate::document::{DocumentError, InstanceDocument, LoadedInstance};
use crate::report::{Format, Report};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_ANOMALY: u8 = 3;
pub const EXIT_GENERATION: u8 = 4;

/// Exhaustive checks beyond this many points must be asked for explicitly
/// with `--sample`.
pub const SAMPLING_THRESHOLD: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: u8, report: &Report, format: Format) -> Self {
        Outcome {
            code,
            stdout: report.render(format),
            stderr: String::new(),
        }
    }

    fn input_error(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Common {
    pub tol: f64,
    pub format: Format,
}

impl Default for Common {
    fn default() -> Self {
        Common {
            tol: setfix_core::DEFAULT_TOL,
            format: Format::Human,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    /// Evaluate the single-valued form; needs singleton images and `r = 1`.
    pub single_valued: bool,
    /// Override every `a_i` with `-1`.
    pub a_neg_one: bool,
    pub max_violations: usize,
    /// Check this many random tuples instead of all of them.
    pub sample: Option<usize>,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            single_valued: false,
            a_neg_one: false,
            max_violations: 10,
            sample: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolveFlags {
    /// Point label; the first point when absent.
    pub start: Option<String>,
    /// Metric position, metric name, or `aggregate`; the first metric when
    /// absent.
    pub index: Option<String>,
    pub max_steps: Option<usize>,
    pub allow_non_separating: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KindArg {
    Constant,
    Lifted,
    Random,
    Sink,
    LiftedSink,
}

impl From<KindArg> for MapKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Constant => MapKind::Constant,
            KindArg::Lifted => MapKind::LiftedSingleValued,
            KindArg::Random => MapKind::RandomMultivalued,
            KindArg::Sink => MapKind::Sink,
            KindArg::LiftedSink => MapKind::LiftedSink,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateFlags {
    pub kind: KindArg,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub r: u32,
    pub a: (f64, f64),
    pub budget: u32,
}

impl Default for GenerateFlags {
    fn default() -> Self {
        GenerateFlags {
            kind: KindArg::Sink,
            n: 5,
            m: 1,
            seed: 0,
            r: 1,
            a: (0.0, 0.0),
            budget: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleSource {
    File(PathBuf),
    Generate(GenerateFlags),
}

fn load(path: &Path) -> Result<LoadedInstance, DocumentError> {
    InstanceDocument::read(path)?.load()
}

fn check_tol(tol: f64) -> Result<(), Outcome> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Outcome::input_error(format!(
            "tolerance must be finite and nonnegative, got {tol}"
        )))
    }
}

/// Loads an instance that the later commands may rely on: readable, well
/// formed, satisfying the axioms.
fn load_valid(path: &Path, common: &Common) -> Result<LoadedInstance, Outcome> {
    check_tol(common.tol)?;
    let instance = load(path).map_err(Outcome::input_error)?;
    let validation = instance.family.validate(common.tol);
    if let Some(v) = validation.violations.first() {
        return Err(Outcome::input_error(format!(
            "instance violates the pseudometric axioms ({}); run validate for the full list",
            describe_violation(&instance, v)
        )));
    }
    Ok(instance)
}

fn require_params(instance: &LoadedInstance) -> Result<ContractionParams, Outcome> {
    instance
        .params
        .clone()
        .ok_or_else(|| Outcome::input_error("document has no params"))
}

fn describe_violation(instance: &LoadedInstance, v: &Violation) -> String {
    let l = |x: PointId| instance.label(x);
    let d = instance.metric(v.index());
    match *v {
        Violation::NonFinite { x, y, value, .. } => format!("{d}({}, {}) = {value} is not finite", l(x), l(y)),
        Violation::Negative { x, y, value, .. } => format!("{d}({}, {}) = {value} is negative", l(x), l(y)),
        Violation::NonZeroDiagonal { x, value, .. } => format!("{d}({0}, {0}) = {value} is not zero", l(x)),
        Violation::Asymmetric {
            x, y, forward, backward, ..
        } => format!("{d}({0}, {1}) = {forward} but {d}({1}, {0}) = {backward}", l(x), l(y)),
        Violation::Triangle {
            x, y, z, direct, via, ..
        } => format!(
            "triangle ({0}, {1}, {2}): {d}({0}, {2}) = {direct} > {d}({0}, {1}) + {d}({1}, {2}) = {via}",
            l(x),
            l(y),
            l(z)
        ),
    }
}

fn violation_attrs(instance: &LoadedInstance, v: &Violation) -> Vec<(String, String)> {
    let l = |x: PointId| instance.label(x).to_owned();
    let metric = instance.metric(v.index()).to_owned();
    match *v {
        Violation::NonFinite { x, y, value, .. } => {
            attrs!["kind" => "non_finite", "metric" => metric, "x" => l(x), "y" => l(y), "value" => value]
        }
        Violation::Negative { x, y, value, .. } => {
            attrs!["kind" => "negative", "metric" => metric, "x" => l(x), "y" => l(y), "value" => value]
        }
        Violation::NonZeroDiagonal { x, value, .. } => {
            attrs!["kind" => "diagonal", "metric" => metric, "x" => l(x), "value" => value]
        }
        Violation::Asymmetric {
            x,
            y,
            forward,
            backward,
            ..
        } => attrs![
            "kind" => "asymmetric", "metric" => metric, "x" => l(x), "y" => l(y),
            "forward" => forward, "backward" => backward,
        ],
        Violation::Triangle {
            x,
            y,
            z,
            direct,
            via,
            ..
        } => attrs![
            "kind" => "triangle", "metric" => metric, "x" => l(x), "y" => l(y), "z" => l(z),
            "direct" => direct, "via" => via,
        ],
    }
}

/// Axioms and separation of the metrics, plus document structure.
pub fn cmd_validate(path: &Path, common: &Common) -> Outcome {
    if let Err(out) = check_tol(common.tol) {
        return out;
    }
    let instance = match load(path) {
        Ok(instance) => instance,
        Err(e) => return Outcome::input_error(e),
    };
    let validation = instance.family.validate(common.tol);
    let mut report = Report::new();
    report
        .field("points", instance.family.point_count())
        .field("metrics", instance.family.index_count())
        .field(
            "params",
            if instance.params.is_some() {
                "present"
            } else {
                "absent"
            },
        )
        .field("violations", validation.violations.len());
    for (k, v) in validation.violations.iter().enumerate() {
        report.record("violation", k + 1, violation_attrs(&instance, v));
    }
    report.field("separating", validation.separating);
    for (x, y) in &validation.inseparable {
        report.record(
            "inseparable",
            format!("{},{}", instance.label(*x), instance.label(*y)),
            Vec::new(),
        );
    }
    report.field("valid", validation.is_valid());
    let code = if validation.is_valid() {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    Outcome::report(code, &report, common.format)
}

fn condition_fields(
    report: &mut Report,
    instance: &LoadedInstance,
    condition: &ConditionReport,
    limit: usize,
) {
    match condition.form {
        ConditionForm::Multivalued { r } => report.field("form", "multivalued").field("r", r),
        ConditionForm::SingleValued => report.field("form", "single_valued"),
    };
    report
        .field("tuples", condition.tuples_checked)
        .field("exhaustive", condition.exhaustive)
        .field("worst_margin", condition.worst_margin)
        .field("satisfied", condition.satisfied)
        .field("certified", condition.certifies())
        .field("violations", condition.violations.len());
    for (k, v) in condition.violations.iter().take(limit).enumerate() {
        report.record(
            "violation",
            k + 1,
            attrs![
                "x" => instance.label(v.x), "y" => instance.label(v.y),
                "metric" => instance.metric(v.index), "lhs" => v.lhs, "rhs" => v.rhs,
            ],
        );
    }
}

/// Evaluates the contraction condition on the instance.
pub fn cmd_check(path: &Path, common: &Common, options: &CheckOptions) -> Outcome {
    let instance = match load_valid(path, common) {
        Ok(instance) => instance,
        Err(out) => return out,
    };
    let mut params = match require_params(&instance) {
        Ok(params) => params,
        Err(out) => return out,
    };
    if options.a_neg_one {
        params = params.with_a(-1.0);
    }
    let n = instance.family.point_count();
    if options.sample.is_some() && n <= SAMPLING_THRESHOLD {
        return Outcome::input_error(format!(
            "--sample is only for more than {SAMPLING_THRESHOLD} points; this instance has {n}"
        ));
    }

    let (family, map, tol) = (&instance.family, &instance.map, common.tol);
    let condition = if options.single_valued {
        let Some(t) = map.as_single_valued() else {
            return Outcome::input_error("--single-valued needs every image to be a single point");
        };
        if params.r() != 1 {
            return Outcome::input_error("--single-valued needs r = 1");
        }
        match options.sample {
            // The lifted map gives the same sides tuple for tuple.
            Some(samples) => {
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                check_condition_sampled(family, map, &params, tol, samples, &mut rng)
            }
            None => check_single_valued_global(family, &t, &params, tol),
        }
    } else {
        match options.sample {
            Some(samples) => {
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                check_condition_sampled(family, map, &params, tol, samples, &mut rng)
            }
            None => check_condition_global(family, map, &params, tol),
        }
    };

    let mut report = Report::new();
    if options.a_neg_one {
        report.field("a", -1);
    }
    condition_fields(&mut report, &instance, &condition, options.max_violations);
    let code = if condition.satisfied {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    Outcome::report(code, &report, common.format)
}

fn parse_driver(instance: &LoadedInstance, index: Option<&str>) -> Result<Driver, Outcome> {
    let m = instance.family.index_count();
    match index {
        None => Ok(Driver::default()),
        Some("aggregate") => Ok(Driver::Aggregate),
        Some(s) => {
            let i = s
                .parse::<usize>()
                .ok()
                .or_else(|| instance.metric_names.iter().position(|name| name == s));
            match i {
                Some(i) if i < m => Ok(Driver::Index(i)),
                _ => Err(Outcome::input_error(format!(
                    "--index must be a metric position below {m}, a metric name, or aggregate; got {s:?}"
                ))),
            }
        }
    }
}

fn status_name(status: OrbitStatus) -> &'static str {
    match status {
        OrbitStatus::FixedPointFound => "fixed_point_found",
        OrbitStatus::ConvergedStationary => "converged_stationary",
        OrbitStatus::MaxStepsReached => "max_steps_reached",
    }
}

/// Certifies the condition, then follows the nearest-point orbit.
pub fn cmd_solve(path: &Path, common: &Common, flags: &SolveFlags) -> Outcome {
    let instance = match load_valid(path, common) {
        Ok(instance) => instance,
        Err(out) => return out,
    };
    let params = match require_params(&instance) {
        Ok(params) => params,
        Err(out) => return out,
    };
    let start = match &flags.start {
        None => PointId(0),
        Some(label) => match instance.point(label) {
            Some(x) => x,
            None => return Outcome::input_error(format!("unknown start label {label:?}")),
        },
    };
    let driver = match parse_driver(&instance, flags.index.as_deref()) {
        Ok(driver) => driver,
        Err(out) => return out,
    };
    let options = SolveOptions {
        driver,
        max_steps: flags.max_steps,
        tol: common.tol,
        allow_non_separating: flags.allow_non_separating,
    };
    let result = match solve(&instance.family, &instance.map, &params, start, &options) {
        Ok(result) => result,
        Err(CoreError::NotSeparating(x, y)) => {
            return Outcome::input_error(format!(
                "no metric separates {} and {}; pass --allow-non-separating to run anyway",
                instance.label(x),
                instance.label(y)
            ))
        }
        Err(e) => return Outcome::input_error(e),
    };

    let mut report = Report::new();
    condition_fields(&mut report, &instance, &result.condition, 10);
    let checked: Vec<usize> = match driver {
        Driver::Index(i) => {
            report.field("driver", instance.metric(i));
            vec![i]
        }
        Driver::Aggregate => {
            report.field("driver", "aggregate");
            (0..instance.family.index_count()).collect()
        }
    };
    report.field("start", instance.label(start));

    let orbit = &result.orbit;
    let contraction = step_contraction_check(orbit, &params, common.tol);
    for (step, pair) in orbit.points.windows(2).enumerate() {
        let mut attrs = attrs!["from" => instance.label(pair[0]), "to" => instance.label(pair[1])];
        for i in 0..instance.family.index_count() {
            attrs.push((
                format!("dist.{}", instance.metric(i)),
                orbit.step_distances[i][step].to_string(),
            ));
        }
        if step > 0 {
            for &i in &checked {
                let ok = contraction[i][step - 1];
                attrs.push((
                    format!("contraction.{}", instance.metric(i)),
                    if ok { "ok" } else { "fail" }.into(),
                ));
            }
        }
        report.record("step", step + 1, attrs);
    }
    for &i in &checked {
        let checks = tail_bound_checks(&instance.family, orbit, i, params.k(i), common.tol)
            .expect("k lies in (0, 1) for validated params");
        for check in checks {
            report.record(
                "tail",
                check.n,
                attrs![
                    "metric" => instance.metric(i), "gap" => check.worst_gap,
                    "bound" => check.bound, "holds" => check.holds,
                ],
            );
        }
    }

    report
        .field("status", status_name(result.status()))
        .field("point", instance.label(result.point))
        .field("steps", result.steps)
        .field("member", result.member);
    for (i, residual) in result.residuals.iter().enumerate() {
        report.record("residual", instance.metric(i), attrs!["value" => residual]);
    }
    report
        .field("degenerate", result.is_degenerate())
        .field("anomaly", result.is_anomaly());

    let code = if result.converged() && result.member {
        EXIT_OK
    } else if result.is_anomaly() {
        EXIT_ANOMALY
    } else {
        EXIT_FAILED
    };
    Outcome::report(code, &report, common.format)
}

/// Brute-force fixed points of a file instance, or a freshly generated
/// certified instance document.
pub fn cmd_oracle(source: &OracleSource, common: &Common, uniqueness: bool) -> Outcome {
    match source {
        OracleSource::Generate(flags) => generate(flags),
        OracleSource::File(path) => oracle_file(path, common, uniqueness),
    }
}

fn generate(flags: &GenerateFlags) -> Outcome {
    let profile = InstanceProfile {
        budget: flags.budget,
        ..InstanceProfile::new(flags.kind.into(), flags.n, flags.m, flags.seed).with_ranges(
            ParamRanges {
                a: flags.a,
                r: (flags.r, flags.r),
                ..ParamRanges::default()
            },
        )
    };
    match generate_instance(&profile) {
        Ok(instance) => Outcome {
            code: EXIT_OK,
            stdout: InstanceDocument::from_generated(&instance).render(),
            stderr: String::new(),
        },
        Err(e @ CoreError::GenerationFailed { .. }) => Outcome {
            code: EXIT_GENERATION,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Err(e) => Outcome::input_error(e),
    }
}

fn oracle_file(path: &Path, common: &Common, uniqueness: bool) -> Outcome {
    let instance = match load_valid(path, common) {
        Ok(instance) => instance,
        Err(out) => return out,
    };
    let fixed = enumerate_fixed_points(&instance.map);
    let mut report = Report::new();
    report.field("fixed_points", fixed.len());
    if fixed.is_empty() {
        report.field("result", "no fixed points");
    }
    for &x in &fixed {
        report.record("fixed_point", instance.label(x), Vec::new());
    }
    if !uniqueness {
        return Outcome::report(EXIT_OK, &report, common.format);
    }

    let params = match require_params(&instance) {
        Ok(params) => params,
        Err(out) => return out,
    };
    let verdict = match instance.map.as_single_valued() {
        Some(t) => certify_uniqueness(&instance.family, &t, &params, common.tol),
        None => {
            report
                .field("uniqueness", "not_applicable")
                .field("reason", "multivalued_map");
            return Outcome::report(EXIT_FAILED, &report, common.format);
        }
    };
    let code = match verdict {
        UniquenessVerdict::Unique(z) => {
            report
                .field("uniqueness", "unique")
                .field("unique_point", instance.label(z));
            EXIT_OK
        }
        UniquenessVerdict::Counterexample { .. } => {
            report.field("uniqueness", "counterexample");
            EXIT_ANOMALY
        }
        UniquenessVerdict::NotApplicable(reason) => {
            let reason = match reason {
                NotApplicable::ConditionFails => "condition_fails",
                NotApplicable::GateClosed => "no_index_with_a_above_c_above_zero",
                NotApplicable::NotSeparating => "not_separating",
            };
            report
                .field("uniqueness", "not_applicable")
                .field("reason", reason);
            EXIT_FAILED
        }
    };
    Outcome::report(code, &report, common.format)
}
