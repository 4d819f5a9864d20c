//! The five subcommands.

use std::f64::consts::{FRAC_PI_2, PI};

use holoq_core::holonomy::{
    compare, compile_to_segments, offresonant_chi, select_scheme, synthesize, CompileOptions,
    Evaluation, GateTarget, HolonomyResult, Program, SchemeKind, SchemeParams,
};
use holoq_core::labframe::{rwa_error_sweep, LabFrameSpec, RwaSweepRow};
use holoq_core::model::pulse_area;
use holoq_core::numkit::phase_insensitive_distance;
use holoq_core::{BlochAxis, CMat2, LoopSpec, SegmentSpec};

use crate::config::Request;
use crate::error::CliError;
use crate::report::{Cell, GateEntries, Output, Parameters, ReportRecord, Table};

/// A request turned into a pulse program.
struct Resolved {
    scheme: String,
    params: Option<SchemeParams>,
    program: Program,
    parameters: Parameters,
    target: Option<GateTarget>,
}

impl Resolved {
    /// Gate predicted by the scheme formula, or by closed-form composition
    /// for hand-written area lists.
    fn predicted(&self, closed: &HolonomyResult) -> Result<CMat2, CliError> {
        match &self.params {
            Some(p) => Ok(p.gate()?),
            None => Ok(closed.gate),
        }
    }

    fn record(&self, command: &str, gate: &CMat2, result: &HolonomyResult) -> ReportRecord {
        ReportRecord {
            command: command.to_string(),
            scheme: self.scheme.clone(),
            parameters: self.parameters.clone(),
            gate: GateEntries::from(gate),
            closure_defect: result.closure_defect,
            dyn_phase_max: Some(result.dyn_phase_max),
            gate_distance: None,
            target_distance: self
                .target
                .map(|t| phase_insensitive_distance(gate, &t.matrix())),
        }
    }
}

fn options(req: &Request) -> CompileOptions {
    CompileOptions {
        envelope: req.envelope.clone(),
        strict: req.strict,
        ..CompileOptions::default()
    }
}

fn axis_of(n: [f64; 3]) -> Result<BlochAxis, CliError> {
    Ok(BlochAxis::from_vector(n)?)
}

fn parameters_of(params: &SchemeParams, program: &Program) -> Result<Parameters, CliError> {
    let mut p = Parameters {
        areas: program_areas(program)?,
        ..Parameters::default()
    };
    let first = match *params {
        SchemeParams::SingleLoopPi { n } => n,
        SchemeParams::TwoLoopPi { n1, n2 } => {
            let a2 = axis_of(n2)?;
            p.theta2 = Some(a2.theta);
            p.phi2 = Some(a2.phi);
            n1
        }
        SchemeParams::OffResonant { n, ratio } => {
            p.ratio = Some(ratio);
            n
        }
        SchemeParams::MultiPulseL2 { n, eta } => {
            p.eta = Some(eta);
            n
        }
    };
    let a = axis_of(first)?;
    p.theta = Some(a.theta);
    p.phi = Some(a.phi);
    Ok(p)
}

fn program_areas(program: &Program) -> Result<Vec<f64>, CliError> {
    Ok(match program {
        Program::Loops { loops } => loops
            .iter()
            .flat_map(|l| l.segments.iter().map(|s| s.target_area))
            .collect(),
        Program::OffResonant { spec } => vec![pulse_area(&spec.envelope)?],
    })
}

fn explicit_params(req: &Request, kind: SchemeKind) -> Result<SchemeParams, CliError> {
    let n = req.axis.unwrap_or_else(BlochAxis::z).unit_vector();
    let missing = |what: &str| CliError::Invalid(format!("scheme {kind} needs {what}"));
    let params = match kind {
        SchemeKind::SingleLoopPi => SchemeParams::SingleLoopPi { n },
        SchemeKind::TwoLoopPi => SchemeParams::TwoLoopPi {
            n1: n,
            n2: req.axis2.ok_or_else(|| missing("--axis2"))?.unit_vector(),
        },
        SchemeKind::OffResonant => SchemeParams::OffResonant {
            n,
            ratio: req.ratio.ok_or_else(|| missing("--ratio"))?,
        },
        SchemeKind::MultiPulseL2 => SchemeParams::MultiPulseL2 {
            n,
            eta: req.eta.ok_or_else(|| missing("--eta"))?,
        },
    };
    params.validate()?;
    Ok(params)
}

fn target_of(req: &Request) -> Result<Option<GateTarget>, CliError> {
    req.angle
        .map(|alpha| GateTarget::from_bloch(&req.axis.unwrap_or_else(BlochAxis::z), alpha))
        .transpose()
        .map_err(CliError::from)
}

/// Area list first, then a target angle, then explicit scheme parameters.
fn resolve(req: &Request) -> Result<Resolved, CliError> {
    let target = target_of(req)?;
    if let Some(areas) = &req.areas {
        return resolve_areas(req, areas, target);
    }
    let params = match target {
        Some(t) => {
            let kind = req.scheme.unwrap_or_else(|| select_scheme(&t));
            synthesize(&t, kind)?
        }
        None => {
            let kind =
                match req.scheme {
                    Some(k) => k,
                    None if req.eta.is_some() => SchemeKind::MultiPulseL2,
                    None if req.ratio.is_some() => SchemeKind::OffResonant,
                    None if req.axis2.is_some() => SchemeKind::TwoLoopPi,
                    None => return Err(CliError::Invalid(
                        "nothing to run: give --angle, --areas, or --scheme with its parameters"
                            .into(),
                    )),
                };
            explicit_params(req, kind)?
        }
    };
    let program = compile_to_segments(&params, &options(req))?;
    let mut parameters = parameters_of(&params, &program)?;
    parameters.alpha = target.map(|t| t.angle);
    if let (None, Some(axis)) = (target, req.axis) {
        // Report the axis as given rather than its round trip through n.
        parameters.theta = Some(axis.theta);
        parameters.phi = Some(axis.phi);
    }
    Ok(Resolved {
        scheme: params.kind().name().to_string(),
        params: Some(params),
        program,
        parameters,
        target,
    })
}

fn resolve_areas(
    req: &Request,
    areas: &[f64],
    target: Option<GateTarget>,
) -> Result<Resolved, CliError> {
    let kind = req.scheme.unwrap_or(SchemeKind::MultiPulseL2);
    if !matches!(kind, SchemeKind::MultiPulseL2 | SchemeKind::SingleLoopPi) {
        return Err(CliError::Invalid(format!(
            "--areas describes a resonant loop; scheme {kind} does not take it"
        )));
    }
    if areas.is_empty() {
        return Err(CliError::Invalid("--areas is empty".into()));
    }
    let axis = req.axis.unwrap_or_else(BlochAxis::z);
    let eta = req.eta.unwrap_or(0.0);
    let segments = areas
        .iter()
        .enumerate()
        .map(|(i, &a)| SegmentSpec::new(&req.envelope, if i == 0 { 0.0 } else { eta }, a))
        .collect::<holoq_core::Result<Vec<_>>>()?;
    let program = Program::Loops {
        loops: vec![LoopSpec::new(axis.params(), segments)?],
    };
    Ok(Resolved {
        scheme: kind.name().to_string(),
        params: None,
        program,
        parameters: Parameters {
            theta: Some(axis.theta),
            phi: Some(axis.phi),
            alpha: target.map(|t| t.angle),
            eta: (areas.len() > 1).then_some(eta),
            areas: areas.to_vec(),
            ..Parameters::default()
        },
        target,
    })
}

pub fn cmd_compile(req: &Request) -> Result<Output, CliError> {
    let r = resolve(req)?;
    let closed = r.program.evaluate(&Evaluation::ClosedForm)?;
    let gate = r.predicted(&closed)?;
    Ok(Output::Record(Box::new(
        r.record("compile", &gate, &closed),
    )))
}

pub fn cmd_simulate(req: &Request) -> Result<Output, CliError> {
    let r = resolve(req)?;
    let numeric = r.program.evaluate(&Evaluation::Numeric(req.integrator))?;
    Ok(Output::Record(Box::new(r.record(
        "simulate",
        &numeric.gate,
        &numeric,
    ))))
}

/// The record is returned together with the first violated metric, if any.
pub fn cmd_verify(req: &Request) -> Result<(Output, Option<CliError>), CliError> {
    let r = resolve(req)?;
    let closed = r.program.evaluate(&Evaluation::ClosedForm)?;
    let predicted = r.predicted(&closed)?;
    let numeric = r.program.evaluate(&Evaluation::Numeric(req.integrator))?;
    let mut record = r.record("verify", &numeric.gate, &numeric);
    record.gate_distance = Some(phase_insensitive_distance(&numeric.gate, &predicted));

    let checks = [
        ("closure_defect", Some(record.closure_defect)),
        ("gate_distance", record.gate_distance),
        ("dyn_phase_max", record.dyn_phase_max),
        ("target_distance", record.target_distance),
    ];
    let failure = checks.into_iter().find_map(|(metric, value)| {
        let value = value?;
        (value.is_nan() || value > req.tolerance).then_some(CliError::Verification {
            metric,
            value,
            tolerance: req.tolerance,
        })
    });
    Ok((Output::Record(Box::new(record)), failure))
}

pub fn cmd_compare(req: &Request) -> Result<Output, CliError> {
    let target = target_of(req)?
        .ok_or_else(|| CliError::Invalid("compare needs a target: give --angle".into()))?;
    let columns = vec![
        "scheme",
        "parameter_count",
        "loops",
        "total_area",
        "square_required",
        "theta",
        "phi",
        "theta2",
        "phi2",
        "eta",
        "ratio",
    ];
    let mut rows = Vec::new();
    for row in compare(&target) {
        let p = match &row.params {
            Some(params) => {
                let program = compile_to_segments(params, &CompileOptions::default())?;
                parameters_of(params, &program)?
            }
            None => Parameters::default(),
        };
        rows.push(vec![
            Cell::Text(row.scheme),
            Cell::Int(row.parameter_count as i64),
            Cell::Int(row.loops as i64),
            Cell::Num(row.total_area),
            Cell::Bool(row.square_required),
            Cell::opt(p.theta),
            Cell::opt(p.phi),
            Cell::opt(p.theta2),
            Cell::opt(p.phi2),
            Cell::opt(p.eta),
            Cell::opt(p.ratio),
        ]);
    }
    Ok(Output::Table(Table {
        columns,
        csv_columns: None,
        rows,
    }))
}

pub const SWEEP_VARIABLES: &str = "eta, ratio, nu or area";

pub fn cmd_sweep(req: &Request) -> Result<Output, CliError> {
    let sweep = req
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Invalid("sweep needs --variable".into()))?;
    let values = &sweep.values;
    match sweep.variable.as_str() {
        "eta" => sweep_eta(req, values),
        "ratio" => sweep_ratio(req, values),
        "nu" => sweep_nu(req, values),
        "area" => sweep_area(req, values),
        other => Err(CliError::Invalid(format!(
            "unknown sweep variable `{other}`; expected {SWEEP_VARIABLES}"
        ))),
    }
}

fn failed_cells(n: usize, e: &CliError) -> (Vec<Cell>, Cell) {
    (vec![Cell::Num(f64::NAN); n], Cell::Text(e.to_string()))
}

/// One row per value, in the given order; failures fill the numeric columns
/// with NaN and the error column with the message.
fn point_table<F>(columns: Vec<&'static str>, values: &[f64], point: F) -> Table
where
    F: Fn(f64) -> Result<Vec<Cell>, CliError>,
{
    let numeric = columns.len() - 2;
    let rows = values
        .iter()
        .map(|&v| {
            let mut row = vec![Cell::Num(v)];
            match point(v) {
                Ok(cells) => {
                    row.extend(cells);
                    row.push(Cell::Empty);
                }
                Err(e) => {
                    log::warn!("sweep point {v} failed: {e}");
                    let (cells, err) = failed_cells(numeric, &e);
                    row.extend(cells);
                    row.push(err);
                }
            }
            row
        })
        .collect();
    Table {
        columns,
        csv_columns: None,
        rows,
    }
}

fn sweep_eta(req: &Request, values: &[f64]) -> Result<Output, CliError> {
    let n = req.axis.unwrap_or_else(BlochAxis::z).unit_vector();
    let opts = options(req);
    let columns = vec![
        "eta",
        "rotation_angle",
        "closure_defect",
        "dyn_phase_max",
        "gate_distance",
        "error",
    ];
    Ok(Output::Table(point_table(columns, values, |eta| {
        let params = SchemeParams::MultiPulseL2 { n, eta };
        let program = compile_to_segments(&params, &opts)?;
        let r = program.evaluate(&Evaluation::Numeric(req.integrator))?;
        Ok(vec![
            Cell::Num(r.gate.rotation_angle()),
            Cell::Num(r.closure_defect),
            Cell::Num(r.dyn_phase_max),
            Cell::Num(phase_insensitive_distance(&r.gate, &params.gate()?)),
        ])
    })))
}

fn sweep_ratio(req: &Request, values: &[f64]) -> Result<Output, CliError> {
    let n = req.axis.unwrap_or_else(BlochAxis::z).unit_vector();
    let opts = options(req);
    let columns = vec![
        "ratio",
        "chi",
        "rotation_angle",
        "total_area",
        "closure_defect",
        "dyn_phase_max",
        "gate_distance",
        "error",
    ];
    Ok(Output::Table(point_table(columns, values, |ratio| {
        let params = SchemeParams::OffResonant { n, ratio };
        let program = compile_to_segments(&params, &opts)?;
        let r = program.evaluate(&Evaluation::Numeric(req.integrator))?;
        Ok(vec![
            Cell::Num(offresonant_chi(ratio)),
            Cell::Num(r.gate.rotation_angle()),
            Cell::Num(program.total_area()?),
            Cell::Num(r.closure_defect),
            Cell::Num(r.dyn_phase_max),
            Cell::Num(phase_insensitive_distance(&r.gate, &params.gate()?)),
        ])
    })))
}

/// Per-segment area of the two-segment loop.
fn sweep_area(req: &Request, values: &[f64]) -> Result<Output, CliError> {
    let axis = req.axis.unwrap_or_else(BlochAxis::z);
    let eta = req.eta.unwrap_or(0.0);
    let columns = vec![
        "area",
        "total_area",
        "closure_defect",
        "is_loop",
        "dyn_phase_max",
        "error",
    ];
    Ok(Output::Table(point_table(columns, values, |area| {
        let lp = LoopSpec::new(
            axis.params(),
            vec![
                SegmentSpec::new(&req.envelope, 0.0, area)?,
                SegmentSpec::new(&req.envelope, eta, area)?,
            ],
        )?;
        let r =
            Program::Loops { loops: vec![lp] }.evaluate(&Evaluation::Numeric(req.integrator))?;
        Ok(vec![
            Cell::Num(2.0 * area),
            Cell::Num(r.closure_defect),
            Cell::Bool(r.is_loop),
            Cell::Num(r.dyn_phase_max),
        ])
    })))
}

/// Lab-frame runs at each transition frequency, sorted by ratio. The CSV
/// carries the fixed `ratio,infidelity,closure_defect` layout.
fn sweep_nu(req: &Request, values: &[f64]) -> Result<Output, CliError> {
    let axis = req.axis.unwrap_or_else(BlochAxis::z);
    let eta = req
        .eta
        .or(req.angle.map(|alpha| PI - alpha))
        .unwrap_or(FRAC_PI_2);
    let laser = axis.params();
    // The frequency is replaced per point; any valid value will do here.
    let template = LabFrameSpec::new(1.0, 1.0, laser.omega0(), laser.omega1(), eta, &req.envelope)?;
    let rows: Vec<Vec<Cell>> = rwa_error_sweep(&template, values, &req.integrator)
        .into_iter()
        .map(|row: RwaSweepRow| {
            vec![
                Cell::Num(row.nu),
                Cell::Num(row.ratio),
                Cell::Num(row.infidelity),
                Cell::Num(row.closure_defect),
                row.error.map(Cell::Text).unwrap_or(Cell::Empty),
            ]
        })
        .collect();
    Ok(Output::Table(Table {
        columns: vec!["nu", "ratio", "infidelity", "closure_defect", "error"],
        csv_columns: Some(RwaSweepRow::CSV_HEADER.split(',').collect()),
        rows,
    }))
}
