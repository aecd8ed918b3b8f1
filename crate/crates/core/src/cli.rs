//! Command-line front end: force curves, orientation sweeps, composites,
//! oracle verification and jump predictions, written as CSV, JSON or SVG.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::energetics::{
    self, effective_stroke, gamma_grid, normalized_stiffness, optimize_ratio, size_spring, sweep_orientation,
    ChargingProfile, CompositeSpring, SweepModel, DEFAULT_POINTS,
};
use crate::error::{Error, Result};
use crate::geometry::{LinkageGeometry, StrokeConfig};
use crate::oracle::{self, compare_with_oracle, ORACLE_TOLERANCE};
use crate::report::{Cell, Format, Table};
use crate::robots::{self, predict_improvement, RobotRecord, STANDARD_GRAVITY};
use crate::springs::{SpringKind, SpringSpec};

/// Exit status for a configuration or input error.
pub const EXIT_CONFIGURATION: i32 = 2;
/// Exit status when a closed form is singular in the requested range.
pub const EXIT_SINGULARITY: i32 = 3;
/// Exit status when closed forms and the oracle disagree.
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "spring-linkage", version, about = "Energy storage of springs in rhomboidal linkages")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Charging force and stored energy along one stroke.
    ForceCurve {
        #[command(flatten)]
        spring: SpringArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Stored energy and stiffness across positioning ratios.
    Sweep {
        /// Attachment family: a, b or c.
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Number of evenly spaced ratios on [0, 1].
        #[arg(long, default_value_t = 101)]
        gammas: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Superposed profile of several springs, sized to the force budget.
    Compose {
        /// Spring as `MODEL[:GAMMA][@STIFFNESS]`, e.g. `vertical@1`,
        /// `a:0.8@2`, `rotational@0.05`. Repeat for each spring.
        #[arg(long = "component", required = true)]
        components: Vec<String>,
        /// Choose the second spring's stiffness to maximize stored energy.
        #[arg(long)]
        optimize_ratio: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Closed-form forces against the virtual-work oracle.
    Verify {
        #[command(flatten)]
        spring: SpringArgs,
        /// Interior knee angles to compare at.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Jump heights of catalogued robots with an ideal spring-linkage.
    Predict {
        /// Robot catalogue; the bundled one when omitted.
        #[arg(long)]
        catalogue: Option<PathBuf>,
        #[arg(long, default_value_t = STANDARD_GRAVITY)]
        g: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Vertical,
    Horizontal,
    Rotational,
    A,
    B,
    C,
}

#[derive(Debug, Clone, Args)]
pub struct SpringArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Positioning ratio for models a, b and c.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Stiffness per translational spring, N/m. Solved from --fmax if absent.
    #[arg(long)]
    pub k: Option<f64>,
    /// Rotational stiffness about the knee angle, N m/rad.
    #[arg(long)]
    pub kr: Option<f64>,
    /// Number of identical springs in parallel.
    #[arg(long, default_value_t = 1)]
    pub count: u32,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Link length L, m.
    #[arg(long, default_value_t = 0.15)]
    pub link_length: f64,
    /// Standing knee angle, degrees.
    #[arg(long, default_value_t = 179.9)]
    pub theta_ini: f64,
    /// Charged knee angle, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub theta_end: f64,
    /// Peak charging force, N. Defaults to 1 when sizing springs, or to the
    /// profile's own peak when a stiffness is given.
    #[arg(long)]
    pub fmax: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    fn geometry(&self) -> Result<LinkageGeometry> {
        LinkageGeometry::new(self.link_length)
    }

    fn stroke(&self) -> Result<StrokeConfig> {
        StrokeConfig::from_degrees(self.theta_ini, self.theta_end)
    }

    fn stamp(&self, table: &mut Table, geom: &LinkageGeometry, stroke: &StrokeConfig) {
        table
            .param("link_length_m", geom.link_length())
            .param("d_m", geom.characteristic_length())
            .param("theta_ini_deg", stroke.theta_ini().to_degrees())
            .param("theta_end_deg", stroke.theta_end().to_degrees())
            .param("points", self.points as f64);
    }
}

impl ModelArg {
    fn sweep_model(self) -> Result<SweepModel> {
        match self {
            ModelArg::A => Ok(SweepModel::A),
            ModelArg::B => Ok(SweepModel::B),
            ModelArg::C => Ok(SweepModel::C),
            other => Err(Error::Configuration(format!(
                "sweeps take model a, b or c, not {}",
                other.to_possible_value().expect("named").get_name()
            ))),
        }
    }
}

fn spring_kind(model: ModelArg, gamma: Option<f64>) -> Result<SpringKind> {
    let need = |gamma: Option<f64>| gamma.ok_or_else(|| Error::Configuration("models a, b and c need --gamma".into()));
    let kind = match model {
        ModelArg::A => SpringKind::ModelA { gamma: need(gamma)? },
        ModelArg::B => SpringKind::ModelB { gamma: need(gamma)? },
        ModelArg::C => SpringKind::ModelC { gamma: need(gamma)? },
        ModelArg::Vertical | ModelArg::Horizontal | ModelArg::Rotational if gamma.is_some() => {
            return Err(Error::Configuration("--gamma applies only to models a, b and c".into()))
        }
        ModelArg::Vertical => SpringKind::Vertical,
        ModelArg::Horizontal => SpringKind::Horizontal,
        ModelArg::Rotational => SpringKind::Rotational,
    };
    // validates the ratio
    SpringSpec::new(kind, 1.0)?;
    Ok(kind)
}

impl SpringArgs {
    fn kind(&self) -> Result<SpringKind> {
        spring_kind(self.model, self.gamma)
    }

    /// Stiffness given on the command line, checked against the model.
    fn stiffness(&self, kind: &SpringKind) -> Result<Option<f64>> {
        match (kind.is_rotational(), self.k, self.kr) {
            (true, Some(_), _) => Err(Error::Configuration("rotational springs take --kr, not --k".into())),
            (false, _, Some(_)) => Err(Error::Configuration("translational springs take --k, not --kr".into())),
            (true, None, kr) => Ok(kr),
            (false, k, None) => Ok(k),
        }
    }
}

/// Parses `MODEL[:GAMMA][@STIFFNESS]`; stiffness defaults to 1.
pub fn parse_component(text: &str) -> Result<SpringSpec> {
    let bad = |why: String| Error::Configuration(format!("component `{text}`: {why}"));
    let (head, stiffness) = match text.split_once('@') {
        Some((h, k)) => (h, k.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?),
        None => (text, 1.0),
    };
    let (name, gamma) = match head.split_once(':') {
        Some((n, g)) => (n, Some(g.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?)),
        None => (head, None),
    };
    let model = ModelArg::from_str(name.trim(), true).map_err(bad)?;
    SpringSpec::new(spring_kind(model, gamma)?, stiffness)
}

/// Result of one command, before it is written out.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    /// Messages for standard error.
    pub diagnostics: Vec<String>,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Outcome {
            table,
            diagnostics: Vec::new(),
            exit_code: 0,
        }
    }
}

const PROFILE_COLUMNS: [&str; 7] = ["theta_deg", "y_m", "y_over_d", "F_c_n", "F_over_Fmax", "EPE_j", "EPE_over_Fmax_d"];

fn profile_row(profile: &ChargingProfile, i: usize) -> Vec<Cell> {
    let s = &profile.samples[i];
    vec![
        s.theta.to_degrees().into(),
        s.y.into(),
        (s.y / profile.d).into(),
        s.force.into(),
        (s.force / profile.f_max).into(),
        s.energy.into(),
        (s.energy / (profile.f_max * profile.d)).into(),
    ]
}

fn summarize_profile(table: &mut Table, profile: &ChargingProfile) {
    let peak = profile.peak().copied();
    table
        .summarize("f_max_n", profile.f_max)
        .summarize("epe_j", profile.final_energy())
        .summarize("normalized_energy", profile.normalized_energy())
        .summarize("peak_force_n", peak.map(|p| p.force))
        .summarize("peak_theta_deg", peak.map(|p| p.theta.to_degrees()));
}

fn capped_note(requested: &StrokeConfig, used: &StrokeConfig) -> Option<String> {
    (used.theta_ini() < requested.theta_ini()).then(|| {
        format!(
            "note: standing angle capped at {} deg where the closed form is finite",
            used.theta_ini().to_degrees()
        )
    })
}

pub fn force_curve(spring: &SpringArgs, run: &RunArgs) -> Result<Outcome> {
    let geom = run.geometry()?;
    let requested = run.stroke()?;
    let kind = spring.kind()?;
    let d = geom.characteristic_length();
    let (spec, stroke, profile) = match spring.stiffness(&kind)? {
        Some(k) => {
            let spec = SpringSpec::new(kind, k)?.with_count(spring.count)?;
            let stroke = effective_stroke(kind.singular_at_full_extension(), &requested)?;
            let probe = energetics::spring_profile(&spec, &geom, &stroke, 1.0, run.points)?;
            let f_max = match run.fmax {
                Some(f) => f,
                None if probe.peak_force() > 0.0 => probe.peak_force(),
                None => return Err(Error::Unsolvable(format!("{} never loads the linkage; pass --fmax", kind.label()))),
            };
            let profile = ChargingProfile { f_max, ..probe };
            (spec, stroke, profile)
        }
        None => {
            let sized = size_spring(kind, spring.count, &geom, &requested, run.fmax.unwrap_or(1.0), run.points)?;
            (sized.spec, sized.stroke, sized.profile)
        }
    };
    let mut table = Table::new("force-curve", &PROFILE_COLUMNS);
    table.param("model", kind.label()).param("gamma", kind.gamma());
    run.stamp(&mut table, &geom, &stroke);
    table
        .param("count", f64::from(spec.count()))
        .param("stiffness_per_spring", spec.stiffness())
        .param("f_max_n", profile.f_max)
        .param(
            "normalized_stiffness",
            normalized_stiffness(&kind, spec.effective_stiffness(), d, profile.f_max),
        );
    summarize_profile(&mut table, &profile);
    for i in 0..profile.samples.len() {
        table.push_row(profile_row(&profile, i));
    }
    table.plot("y_over_d", &["F_over_Fmax", "EPE_over_Fmax_d"]);
    let mut outcome = Outcome::ok(table);
    outcome.diagnostics.extend(capped_note(&requested, &stroke));
    Ok(outcome)
}

pub fn sweep(model: ModelArg, gammas: usize, run: &RunArgs) -> Result<Outcome> {
    let model = model.sweep_model()?;
    let geom = run.geometry()?;
    let stroke = run.stroke()?;
    let f_max = run.fmax.unwrap_or(1.0);
    let result = sweep_orientation(model, &geom, &stroke, f_max, &gamma_grid(gammas), run.points)?;
    let mut table = Table::new("sweep", &["gamma", "normalized_energy", "normalized_stiffness", "gap"]);
    table.param("model", format!("{model:?}").to_lowercase());
    run.stamp(&mut table, &geom, &stroke);
    table.param("f_max_n", f_max).param("gammas", gammas as f64);
    let best = result
        .points
        .iter()
        .filter_map(|p| Some((p.gamma, p.normalized_energy?)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    table
        .summarize("best_gamma", best.map(|b| b.0))
        .summarize("best_normalized_energy", best.map(|b| b.1))
        .summarize("gaps", result.points.iter().filter(|p| p.gap.is_some()).count() as f64);
    let mut diagnostics = Vec::new();
    for p in &result.points {
        if let Some(gap) = &p.gap {
            diagnostics.push(format!("gamma {}: {gap}", p.gamma));
        }
        table.push_row(vec![
            p.gamma.into(),
            p.normalized_energy.into(),
            p.normalized_stiffness.into(),
            p.gap.clone().map_or(Cell::Empty, Cell::Text),
        ]);
    }
    table.plot("gamma", &["normalized_energy"]);
    Ok(Outcome {
        table,
        diagnostics,
        exit_code: 0,
    })
}

pub fn compose(components: &[String], optimize: bool, run: &RunArgs) -> Result<Outcome> {
    let geom = run.geometry()?;
    let requested = run.stroke()?;
    let f_max = run.fmax.unwrap_or(1.0);
    let specs = components.iter().map(|c| parse_component(c)).collect::<Result<Vec<_>>>()?;
    let label = specs.iter().map(|s| s.kind.label()).collect::<Vec<_>>().join("+");
    let mut ratio = None;
    let sized = if optimize {
        let [base, partner] = specs[..] else {
            return Err(Error::Configuration("--optimize-ratio needs exactly two components".into()));
        };
        let best = optimize_ratio(base.kind, partner.kind, &geom, &requested, f_max, run.points)?;
        ratio = Some(best.ratio);
        best.sized
    } else {
        CompositeSpring::new(specs, label.clone())?.sized(&geom, &requested, f_max, run.points)?
    };
    let stroke = sized.stroke;
    let profile = &sized.profile;
    let parts = &sized.composite.components;

    let mut columns: Vec<String> = PROFILE_COLUMNS.iter().map(|c| c.to_string()).collect();
    columns.extend((1..=parts.len()).map(|i| format!("F_c{i}_n")));
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("compose", &column_refs);
    table.param("components", label);
    run.stamp(&mut table, &geom, &stroke);
    table.param("f_max_n", f_max);
    let d = geom.characteristic_length();
    for (i, c) in parts.iter().enumerate() {
        table
            .param(&format!("component{}", i + 1), c.kind.label())
            .param(&format!("component{}_stiffness", i + 1), c.effective_stiffness())
            .param(
                &format!("component{}_normalized_stiffness", i + 1),
                normalized_stiffness(&c.kind, c.effective_stiffness(), d, f_max),
            );
    }
    summarize_profile(&mut table, profile);
    table
        .summarize("force_cv", profile.force_variation())
        .summarize("optimized_ratio", ratio);
    for (i, s) in profile.samples.iter().enumerate() {
        let mut row = profile_row(profile, i);
        for c in parts {
            row.push(c.charging_force(&geom, &stroke, s.theta)?.into());
        }
        table.push_row(row);
    }
    table.plot("y_over_d", &["F_over_Fmax", "EPE_over_Fmax_d"]);
    let mut outcome = Outcome::ok(table);
    outcome.diagnostics.extend(capped_note(&requested, &stroke));
    Ok(outcome)
}

pub fn verify(spring: &SpringArgs, samples: usize, run: &RunArgs) -> Result<Outcome> {
    let geom = run.geometry()?;
    let stroke = run.stroke()?;
    let kind = spring.kind()?;
    let k = spring.stiffness(&kind)?.unwrap_or(1.0);
    let spec = SpringSpec::new(kind, k)?.with_count(spring.count)?;
    if samples == 0 {
        return Err(Error::Configuration("--samples must be at least 1".into()));
    }
    let comparison = compare_with_oracle(&spec, &geom, &stroke, samples)?;
    let model_a = matches!(kind, SpringKind::ModelA { .. });
    let mut columns = vec!["theta_deg", "closed_form_n", "oracle_n", "relative_error"];
    if model_a {
        columns.extend(["principal_branch_n", "principal_relative_error"]);
    }
    let mut table = Table::new("verify", &columns);
    table.param("model", kind.label()).param("gamma", kind.gamma());
    run.stamp(&mut table, &geom, &stroke);
    table
        .param("count", f64::from(spec.count()))
        .param("stiffness_per_spring", spec.stiffness())
        .param("samples", samples as f64)
        .param("step_m", oracle::default_step(&geom))
        .param("tolerance", ORACLE_TOLERANCE);
    let mut principal_worst: f64 = 0.0;
    for s in &comparison.samples {
        let mut row: Vec<Cell> = vec![
            s.theta.to_degrees().into(),
            s.closed_form.into(),
            s.oracle.into(),
            s.relative_error.into(),
        ];
        if let SpringKind::ModelA { gamma } = kind {
            let report = oracle::model_a_branch_report(&geom, &stroke, gamma, spec.effective_stiffness(), s.theta)?;
            principal_worst = principal_worst.max(report.principal_error());
            row.extend([report.principal_branch.into(), report.principal_error().into()]);
        }
        table.push_row(row);
    }
    let worst = comparison.max_relative_error();
    let passed = comparison.passes(ORACLE_TOLERANCE);
    table
        .summarize("max_relative_error", worst)
        .summarize("passed", if passed { "true" } else { "false" });
    let mut diagnostics: Vec<String> = comparison
        .discrepancies(ORACLE_TOLERANCE)
        .iter()
        .map(|w| {
            format!(
                "warning: {} at {:.4} deg: closed form {} vs oracle {} (relative error {:.3e})",
                w.label, w.theta_deg, w.closed_form, w.oracle, w.relative_error
            )
        })
        .collect();
    if model_a {
        table.summarize("principal_branch_max_relative_error", principal_worst);
        if principal_worst > ORACLE_TOLERANCE {
            diagnostics.push(format!(
                "note: the principal asin branch deviates from the oracle by up to {principal_worst:.3e}; \
                 the geometric branch is used for the closed form"
            ));
        }
    }
    table.plot("theta_deg", &["closed_form_n", "oracle_n"]);
    Ok(Outcome {
        table,
        diagnostics,
        exit_code: if passed { 0 } else { EXIT_VERIFICATION },
    })
}

const PREDICT_COLUMNS: [&str; 17] = [
    "name",
    "mass_kg",
    "f_max_n",
    "d_m",
    "energy_fraction",
    "v_to_mps",
    "source",
    "force_to_weight",
    "h_measured_m",
    "h_energy_m",
    "h_ideal_m",
    "h_improved_m",
    "h_measured_over_d",
    "h_energy_over_d",
    "h_ideal_over_d",
    "h_improved_over_d",
    "improvement_percent",
];

pub fn predict(records: &[RobotRecord], g: f64, catalogue: &str) -> Result<Outcome> {
    let mut table = Table::new("predict", &PREDICT_COLUMNS);
    table.param("catalogue", catalogue).param("g_mps2", g);
    let mut diagnostics = Vec::new();
    let mut predicted = 0usize;
    for r in records {
        let mut row: Vec<Cell> = vec![
            r.name.as_str().into(),
            r.mass_kg.into(),
            r.f_max_n.into(),
            r.d_m.into(),
            r.energy_fraction.into(),
            r.v_to_mps.into(),
            r.source.as_str().into(),
            r.force_to_weight(g).into(),
        ];
        match predict_improvement(r, g) {
            Ok(p) => {
                predicted += 1;
                row.extend(
                    [
                        p.h_measured,
                        p.h_energy,
                        p.h_ideal,
                        p.h_improved,
                        p.normalized_measured,
                        p.normalized_energy,
                        p.normalized_ideal,
                        p.normalized_improved,
                        p.improvement_percent(),
                    ]
                    .map(Cell::opt),
                );
            }
            Err(err @ Error::InsufficientData { .. }) => {
                diagnostics.push(format!("{}: {err}", r.name));
                row.extend(std::iter::repeat_n(Cell::Empty, 9));
            }
            Err(err) => return Err(err),
        }
        table.push_row(row);
    }
    table
        .summarize("records", records.len() as f64)
        .summarize("predicted", predicted as f64);
    Ok(Outcome {
        table,
        diagnostics,
        exit_code: 0,
    })
}

/// Runs a parsed command without writing anything.
pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::ForceCurve { spring, run } => force_curve(spring, run),
        Command::Sweep { model, gammas, run } => sweep(*model, *gammas, run),
        Command::Compose {
            components,
            optimize_ratio,
            run,
        } => compose(components, *optimize_ratio, run),
        Command::Verify { spring, samples, run } => verify(spring, *samples, run),
        Command::Predict { catalogue, g, .. } => match catalogue {
            Some(path) => predict(&robots::load_catalogue(path)?, *g, &path.display().to_string()),
            None => predict(&robots::bundled_catalogue(), *g, "bundled"),
        },
    }
}

fn destination(command: &Command) -> (Format, Option<&Path>) {
    match command {
        Command::ForceCurve { run, .. }
        | Command::Sweep { run, .. }
        | Command::Compose { run, .. }
        | Command::Verify { run, .. } => (run.format, run.out.as_deref()),
        Command::Predict { format, out, .. } => (*format, out.as_deref()),
    }
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Singularity { .. } => EXIT_SINGULARITY,
        _ => EXIT_CONFIGURATION,
    }
}

/// Executes `command` and writes its output; returns the exit status.
pub fn run(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = execute(command).and_then(|outcome| {
        let (format, out) = destination(command);
        let text = outcome.table.render(format)?;
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for line in &outcome.diagnostics {
                let _ = writeln!(stderr, "{line}");
            }
            outcome.exit_code
        }
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            exit_code(&err)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli.command, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()),
        Err(err) => {
            let _ = err.print();
            if err.use_stderr() {
                EXIT_CONFIGURATION
            } else {
                0
            }
        }
    }
}
