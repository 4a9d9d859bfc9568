//! The seven experiment runners. Each returns the rendered output and a
//! verdict status; nothing here touches the filesystem except `kraus:` files.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use recoherence_core::analytic::{BranchLedger, Ensemble};
use recoherence_core::classicality::{
    certify, decoherence_functional, lgi_k3, oracle_witness_distance, qd_report, sieve, CertifierConfig, Insertion,
};
use recoherence_core::lindblad::{exact_two_time, intervention_compare, regression_two_time};
use recoherence_core::model::{ControlChannel, Fragment, ModelParams, SystemAmplitudes};
use recoherence_core::ops::Mat2;
use recoherence_core::EntropyUnits;
use serde::Serialize;

use crate::config::{self, LoadedConfig, StateSpec, TimeGrid};
use crate::crosscheck::{Oracle, OracleMode};
use crate::error::CliError;
use crate::output::{num, round17, to_json, Csv, JsonComplex};

/// Self-check tolerance for histories and Leggett-Garg runs.
pub const SELF_CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    Sieve,
    Recohere,
    Darwinism,
    Histories,
    Lgi,
    Qrt,
    Certify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sieve => "sieve",
            Experiment::Recohere => "recohere",
            Experiment::Darwinism => "darwinism",
            Experiment::Histories => "histories",
            Experiment::Lgi => "lgi",
            Experiment::Qrt => "qrt",
            Experiment::Certify => "certify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    CertifierFail,
    SelfCheckViolation,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::CertifierFail => 3,
            Status::SelfCheckViolation => 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub status: Status,
}

impl Report {
    fn ok(text: String) -> Self {
        Self { text, status: Status::Success }
    }
}

pub struct RunContext<'a> {
    pub loaded: &'a LoadedConfig,
    pub units: EntropyUnits,
    pub oracle: OracleMode,
}

impl RunContext<'_> {
    fn units_name(&self) -> &'static str {
        match self.units {
            EntropyUnits::Nats => "nats",
            EntropyUnits::Bits => "bits",
        }
    }
}

pub fn run(experiment: Experiment, ctx: &RunContext) -> Result<Report, CliError> {
    if let Some(kind) = &ctx.loaded.config.experiment.kind {
        if kind != experiment.name() {
            return Err(CliError::Config(format!(
                "config experiment.kind = '{kind}' but subcommand is '{}'",
                experiment.name()
            )));
        }
    }
    match experiment {
        Experiment::Sieve => run_sieve(ctx),
        Experiment::Recohere => run_recohere(ctx),
        Experiment::Darwinism => run_darwinism(ctx),
        Experiment::Histories => run_histories(ctx),
        Experiment::Lgi => run_lgi(ctx),
        Experiment::Qrt => run_qrt(ctx),
        Experiment::Certify => run_certify(ctx),
    }
}

/// Total rate, when every particle is Lorentzian.
fn rate_of(params: &ModelParams) -> Option<f64> {
    params.total_rate().ok()
}

/// Grid from the config, or `[start, stop]` in units of `1/Gamma` (raw
/// time when the rate is undefined).
fn time_grid(
    given: Option<TimeGrid>,
    params: &ModelParams,
    start: f64,
    stop: f64,
    count: usize,
) -> Result<Vec<f64>, CliError> {
    let grid = given.unwrap_or_else(|| {
        let scale = rate_of(params).unwrap_or(1.0);
        TimeGrid { start: start / scale, stop: stop / scale, count }
    });
    grid.points()
}

fn state(spec: &Option<StateSpec>) -> Result<(SystemAmplitudes, String), CliError> {
    let spec = spec.clone().unwrap_or(StateSpec::Named("plus".into()));
    Ok((spec.build()?, spec.label()))
}

/// Control time from `t_star` or `gamma_t_star` (default `Gamma t* = 2`).
fn control_time(ctx: &RunContext, params: &ModelParams) -> Result<f64, CliError> {
    let e = &ctx.loaded.config.experiment;
    match (e.t_star, e.gamma_t_star) {
        (Some(_), Some(_)) => Err(CliError::Config("set at most one of t_star and gamma_t_star".into())),
        (Some(t), None) => Ok(t),
        (None, scaled) => {
            let rate = rate_of(params)
                .ok_or_else(|| CliError::Config("gamma_t_star needs a Lorentzian model; set t_star instead".into()))?;
            Ok(scaled.unwrap_or(2.0) / rate)
        }
    }
    .and_then(|t| {
        if t.is_finite() && t >= 0.0 {
            Ok(t)
        } else {
            Err(CliError::Config(format!("control time {t} must be finite and nonnegative")))
        }
    })
}

fn max_dev(acc: &mut f64, a: Complex64, b: Complex64) {
    *acc = acc.max((a - b).norm());
}

fn oracle(ctx: &RunContext, params: &ModelParams) -> Result<Option<Oracle>, CliError> {
    Oracle::for_mode(ctx.oracle, params)
}

fn run_sieve(ctx: &RunContext) -> Result<Report, CliError> {
    let params = ctx.loaded.model()?;
    let e = &ctx.loaded.config.experiment;
    let phis = e.phis.clone().unwrap_or_else(|| vec![0.0, PI / 8.0, PI / 6.0, PI / 4.0]);
    let times = time_grid(e.times, &params, 0.0, 5.0, 101)?;
    let rate = rate_of(&params);
    let oracle = oracle(ctx, &params)?;
    let table = sieve(params.clone(), &phis, &times)?;

    let mut columns = vec!["t".to_string()];
    if rate.is_some() {
        columns.push("gamma_t".into());
    }
    columns.extend(phis.iter().map(|p| format!("entropy_phi={}", num(*p))));
    if oracle.is_some() {
        columns.extend(phis.iter().map(|p| format!("oracle_entropy_phi={}", num(*p))));
    }
    let mut csv = Csv::new(&ctx.loaded.sha256, "sieve", &columns);
    csv.comment(&format!("units={}", ctx.units_name()));
    let mut deviation = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        row.extend(rate.map(|r| r * t));
        row.extend(table.entropy.iter().map(|col| ctx.units.from_nats(col[i])));
        if let Some(o) = &oracle {
            for (k, &phi) in phis.iter().enumerate() {
                let s = o.entropy(&SystemAmplitudes::rotated(phi), t)?;
                deviation = deviation.max((s - table.entropy[k][i]).abs());
                row.push(ctx.units.from_nats(s));
            }
        }
        csv.row(&row);
    }
    if oracle.is_some() {
        csv.comment(&format!("max_oracle_deviation={}", num(ctx.units.from_nats(deviation))));
    }
    Ok(Report::ok(csv.finish()))
}

/// `<O>(t)` without control and with `control` applied at `t_star`.
fn recoherence_curves(
    params: Arc<ModelParams>,
    sys: &SystemAmplitudes,
    control: &ControlChannel,
    observable: &Mat2,
    t_star: f64,
    times: &[f64],
) -> Result<Vec<(f64, f64)>, CliError> {
    let init = BranchLedger::initial(sys, params);
    let controlled = Ensemble::pure(init.clone()).evolve(t_star)?.apply_channel(control)?;
    times
        .iter()
        .map(|&t| {
            let free = Ensemble::pure(init.evolve(t)?).expectation(observable).re;
            let with = if t >= t_star { controlled.evolve(t - t_star)?.expectation(observable).re } else { free };
            Ok((with, free))
        })
        .collect()
}

fn run_recohere(ctx: &RunContext) -> Result<Report, CliError> {
    let params = ctx.loaded.model()?;
    let e = &ctx.loaded.config.experiment;
    let (sys, _) = state(&e.state)?;
    let times = time_grid(e.times, &params, 0.0, 6.0, 121)?;
    let requested = control_time(ctx, &params)?;
    let t_star = *times
        .iter()
        .find(|&&t| (t - requested).abs() <= 1e-9 * requested.max(1.0))
        .ok_or_else(|| CliError::Config(format!("control time t* = {requested} is not on the time grid")))?;
    let control_name = e.control.clone().unwrap_or_else(|| "flip".into());
    let control = config::channel(&control_name, ctx.loaded)?;
    let obs_name = e.observable.clone().unwrap_or_else(|| "sx".into());
    let observable = config::operator(&obs_name)?;
    let rate = rate_of(&params);
    let oracle = oracle(ctx, &params)?;

    let main = recoherence_curves(params.clone(), &sys, &control, &observable, t_star, &times)?;
    let n_values = e.n_values.clone().unwrap_or_default();
    let per_n = n_values
        .iter()
        .map(|&n| {
            let model = Arc::new(ctx.loaded.config.model.build_with_n(n)?);
            recoherence_curves(model, &sys, &control, &observable, t_star, &times)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut columns = vec!["t".to_string()];
    if rate.is_some() {
        columns.push("gamma_t".into());
    }
    columns.push(format!("{obs_name}_with_control"));
    columns.push(format!("{obs_name}_without_control"));
    for n in &n_values {
        columns.push(format!("{obs_name}_with_control_n{n}"));
        columns.push(format!("{obs_name}_without_control_n{n}"));
    }
    if oracle.is_some() {
        columns.push(format!("oracle_{obs_name}_with_control"));
        columns.push(format!("oracle_{obs_name}_without_control"));
    }
    let mut csv = Csv::new(&ctx.loaded.sha256, "recohere", &columns);
    csv.comment(&format!("t_star={} control={control_name}", num(t_star)));
    let mut deviation = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        row.extend(rate.map(|r| r * t));
        row.extend([main[i].0, main[i].1]);
        for curve in &per_n {
            row.extend([curve[i].0, curve[i].1]);
        }
        if let Some(o) = &oracle {
            let with = o.expectation(&sys, Some((&control, t_star)), &observable, t)?.re;
            let free = o.expectation(&sys, None, &observable, t)?.re;
            deviation = deviation.max((with - main[i].0).abs()).max((free - main[i].1).abs());
            row.extend([with, free]);
        }
        csv.row(&row);
    }
    if oracle.is_some() {
        csv.comment(&format!("max_oracle_deviation={}", num(deviation)));
    }
    Ok(Report::ok(csv.finish()))
}

fn run_darwinism(ctx: &RunContext) -> Result<Report, CliError> {
    let params = ctx.loaded.model()?;
    let e = &ctx.loaded.config.experiment;
    let (sys, _) = state(&e.state)?;
    let times = time_grid(e.times, &params, 0.0, 5.0, 51)?;
    let sizes = e.fragment_sizes.clone().unwrap_or_else(|| (1..params.len()).collect());
    if sizes.is_empty() {
        return Err(CliError::Config("darwinism needs at least one fragment size (model.n >= 2)".into()));
    }
    let rate = rate_of(&params);
    let oracle = oracle(ctx, &params)?;

    let mut columns: Vec<String> = vec!["t".into()];
    if rate.is_some() {
        columns.push("gamma_t".into());
    }
    columns.extend(["fragment_size".into(), "fragment_rate".into(), "overlap_re".into(), "overlap_im".into()]);
    columns.extend(["expected_overlap".into(), "mutual_information".into()]);
    if oracle.is_some() {
        columns.extend(["oracle_overlap_re".into(), "oracle_overlap_im".into(), "oracle_mutual_information".into()]);
    }
    let mut csv = Csv::new(&ctx.loaded.sha256, "darwinism", &columns);
    csv.comment(&format!("units={} fragments=prefix", ctx.units_name()));
    let mut deviation = 0.0f64;
    for &t in &times {
        for r in qd_report(params.clone(), &sys, t, &sizes)? {
            let mut row = vec![t];
            row.extend(rate.map(|g| g * t));
            row.extend([
                r.size as f64,
                r.fragment_rate.unwrap_or(f64::NAN),
                r.overlap.re,
                r.overlap.im,
                r.expected_overlap.unwrap_or(f64::NAN),
                ctx.units.from_nats(r.mutual_information),
            ]);
            if let Some(o) = &oracle {
                let frag = Fragment::prefix(r.size);
                let overlap = o.fragment_overlap(&frag, t)?;
                let mi = o.mutual_information(&sys, t, &frag)?;
                max_dev(&mut deviation, overlap, r.overlap);
                deviation = deviation.max((mi - r.mutual_information).abs());
                row.extend([overlap.re, overlap.im, ctx.units.from_nats(mi)]);
            }
            csv.row(&row);
        }
    }
    if oracle.is_some() {
        csv.comment(&format!("max_oracle_deviation={}", num(deviation)));
    }
    Ok(Report::ok(csv.finish()))
}

#[derive(Serialize)]
struct InsertionOut {
    time: f64,
    op: String,
}

#[derive(Serialize)]
struct HistoryOut {
    labels: Vec<usize>,
    probability: f64,
}

#[derive(Serialize)]
struct HistoriesOut {
    experiment: &'static str,
    config_sha256: String,
    initial_state: String,
    times: Vec<f64>,
    insertions: Vec<InsertionOut>,
    histories: Vec<HistoryOut>,
    decoherence_functional: Vec<Vec<JsonComplex>>,
    max_off_diagonal: f64,
    diagonal_sum: f64,
    self_check_passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_oracle_deviation: Option<f64>,
}

fn run_histories(ctx: &RunContext) -> Result<Report, CliError> {
    let params = ctx.loaded.model()?;
    let e = &ctx.loaded.config.experiment;
    let (sys, label) = state(&e.state)?;
    let scale = rate_of(&params).unwrap_or(1.0);
    let times = e.history_times.clone().unwrap_or_else(|| [0.5, 1.0, 1.5, 2.0].iter().map(|x| x / scale).collect());
    let specs = e.insertions.clone().unwrap_or_default();
    let insertions = specs
        .iter()
        .map(|s| Ok(Insertion { time: s.time, operator: config::operator(&s.op)? }))
        .collect::<Result<Vec<_>, CliError>>()?;
    let oracle = oracle(ctx, &params)?;
    let d = decoherence_functional(params, &sys, &times, &insertions)?;

    let max_oracle_deviation = match &oracle {
        Some(o) => {
            let m = o.decoherence_functional(&sys, &times, &insertions, &d.histories)?;
            let mut dev = 0.0f64;
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    max_dev(&mut dev, *v, d.matrix[(i, j)]);
                }
            }
            Some(round17(dev))
        }
        None => None,
    };
    let max_off = d.max_off_diagonal();
    let passed = max_off <= SELF_CHECK_TOL;
    let out = HistoriesOut {
        experiment: "histories",
        config_sha256: ctx.loaded.sha256.clone(),
        initial_state: label,
        times: times.iter().map(|&t| round17(t)).collect(),
        insertions: specs.iter().map(|s| InsertionOut { time: round17(s.time), op: s.op.clone() }).collect(),
        histories: d
            .histories
            .iter()
            .zip(d.probabilities())
            .map(|(labels, p)| HistoryOut { labels: labels.clone(), probability: round17(p) })
            .collect(),
        decoherence_functional: (0..d.matrix.nrows())
            .map(|i| (0..d.matrix.ncols()).map(|j| d.matrix[(i, j)].into()).collect())
            .collect(),
        max_off_diagonal: round17(max_off),
        diagonal_sum: round17(d.diagonal_sum()),
        self_check_passed: passed,
        max_oracle_deviation,
    };
    Ok(Report { text: to_json(&out), status: if passed { Status::Success } else { Status::SelfCheckViolation } })
}

fn run_lgi(ctx: &RunContext) -> Result<Report, CliError> {
    let params = ctx.loaded.model()?;
    let e = &ctx.loaded.config.experiment;
    let (sys, _) = state(&e.state)?;
    let triples = match &e.triples {
        Some(t) => t.clone(),
        None => {
            let grid = time_grid(e.times, &params, 0.0, 3.0, 7)?;
            grid.windows(3).map(|w| [w[0], w[1], w[2]]).collect()
        }
    };
    if triples.is_empty() {
        return Err(CliError::Config("lgi needs at least one time triple".into()));
    }
    let oracle = oracle(ctx, &params)?;
    let mut columns: Vec<String> =
        ["t1", "t2", "t3", "c21", "c32", "c31", "k3"].iter().map(|s| s.to_string()).collect();
    if oracle.is_some() {
        columns.push("oracle_k3".into());
    }
    let mut csv = Csv::new(&ctx.loaded.sha256, "lgi", &columns);
    let mut k_max = f64::NEG_INFINITY;
    let mut deviation = 0.0f64;
    for triple in triples {
        let r = lgi_k3(params.clone(), &sys, triple)?;
        k_max = k_max.max(r.k);
        let mut row = vec![triple[0], triple[1], triple[2], r.c21, r.c32, r.c31, r.k];
        if let Some(o) = &oracle {
            let [t1, t2, t3] = triple;
            let k = o.pointer_correlator(&sys, t1, t2)? + o.pointer_correlator(&sys, t2, t3)?
                - o.pointer_correlator(&sys, t1, t3)?;
            deviation = deviation.max((k - r.k).abs());
            row.push(k);
        }
        csv.row(&row);
    }
    let passed = k_max <= 1.0 + SELF_CHECK_TOL;
    csv.comment(&format!("max_k3={} self_check={}", num(k_max), if passed { "pass" } else { "fail" }));
    if oracle.is_some() {
        csv.comment(&format!("max_oracle_deviation={}", num(deviation)));
    }
    Ok(Report { text: csv.finish(), status: if passed { Status::Success } else { Status::SelfCheckViolation } })
}

#[derive(Serialize)]
struct PairOut {
    a: String,
    b: String,
    exact: JsonComplex,
    regression: JsonComplex,
    discrepancy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_exact: Option<JsonComplex>,
}

#[derive(Serialize)]
struct InterventionOut {
    channel: String,
    observable: String,
    control_time: f64,
    probe_time: f64,
    exact: JsonComplex,
    regression: JsonComplex,
    discrepancy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_exact: Option<JsonComplex>,
}

#[derive(Serialize)]
struct QrtOut {
    experiment: &'static str,
    config_sha256: String,
    initial_state: String,
    total_rate: f64,
    s: f64,
    t: f64,
    pairs: Vec<PairOut>,
    interventions: Vec<InterventionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_oracle_deviation: Option<f64>,
}

fn run_qrt(ctx: &RunContext) -> Result<Report, CliError> {
    let params = ctx.loaded.model()?;
    let rate = rate_of(&params).ok_or_else(|| CliError::Config("qrt needs a Lorentzian model".into()))?;
    let e = &ctx.loaded.config.experiment;
    let (sys, label) = state(&e.state)?;
    let names = e.operators.clone().unwrap_or_else(|| ["I", "sx", "sy", "sz"].iter().map(|s| s.to_string()).collect());
    let operators = names.iter().map(|n| config::operator(n)).collect::<Result<Vec<_>, _>>()?;
    let channel_names =
        e.channels.clone().unwrap_or_else(|| ["identity", "flip", "phase"].iter().map(|s| s.to_string()).collect());
    let channels = channel_names.iter().map(|n| config::channel(n, ctx.loaded)).collect::<Result<Vec<_>, _>>()?;
    let obs_name = e.observable.clone().unwrap_or_else(|| "sx".into());
    let observable = config::operator(&obs_name)?;
    let s = e.s.unwrap_or(1.0 / rate);
    let t = e.t.unwrap_or(2.0 / rate);
    let t_star = control_time(ctx, &params)?;
    let probe = 2.0 * t_star;
    let oracle = oracle(ctx, &params)?;
    let rho0 = sys.density();

    let mut deviation = 0.0f64;
    let mut pairs = Vec::new();
    for (an, a) in names.iter().zip(&operators) {
        for (bn, b) in names.iter().zip(&operators) {
            let exact = exact_two_time(a, b, t, s, &sys, params.clone())?;
            let regression = regression_two_time(a, b, t, s, &rho0, rate)?;
            let oracle_exact = match &oracle {
                Some(o) => {
                    let v = o.two_time(a, b, t, s, &sys)?;
                    max_dev(&mut deviation, v, exact);
                    Some(v.into())
                }
                None => None,
            };
            pairs.push(PairOut {
                a: an.clone(),
                b: bn.clone(),
                exact: exact.into(),
                regression: regression.into(),
                discrepancy: round17((exact - regression).norm()),
                oracle_exact,
            });
        }
    }
    let mut interventions = Vec::new();
    for (cn, channel) in channel_names.iter().zip(&channels) {
        let r = intervention_compare(channel, t_star, &observable, probe, &sys, params.clone())?;
        let oracle_exact = match &oracle {
            Some(o) => {
                let v = o.expectation(&sys, Some((channel, t_star)), &observable, probe)?;
                max_dev(&mut deviation, v, r.exact);
                Some(v.into())
            }
            None => None,
        };
        interventions.push(InterventionOut {
            channel: cn.clone(),
            observable: obs_name.clone(),
            control_time: round17(t_star),
            probe_time: round17(probe),
            exact: r.exact.into(),
            regression: r.regression.into(),
            discrepancy: round17(r.discrepancy),
            oracle_exact,
        });
    }
    let out = QrtOut {
        experiment: "qrt",
        config_sha256: ctx.loaded.sha256.clone(),
        initial_state: label,
        total_rate: round17(rate),
        s: round17(s),
        t: round17(t),
        pairs,
        interventions,
        max_oracle_deviation: oracle.map(|_| round17(deviation)),
    };
    Ok(Report::ok(to_json(&out)))
}

#[derive(Serialize)]
struct WitnessOut {
    controls: Vec<String>,
    control_times: Vec<f64>,
    probe_time: f64,
    initial_state: String,
    distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_distance: Option<f64>,
}

#[derive(Serialize)]
struct CertifyOut {
    experiment: &'static str,
    config_sha256: String,
    pass: bool,
    epsilon: f64,
    tau: f64,
    projectors: String,
    worst_distance: f64,
    evaluated: usize,
    skipped: usize,
    witness: Option<WitnessOut>,
}

fn run_certify(ctx: &RunContext) -> Result<Report, CliError> {
    let params = ctx.loaded.model()?;
    let c = &ctx.loaded.config.certify;
    let scale = rate_of(&params).unwrap_or(1.0);
    let control_names = c.controls.clone().unwrap_or_else(|| vec!["identity".into(), "flip".into()]);
    let controls = control_names.iter().map(|n| config::channel(n, ctx.loaded)).collect::<Result<Vec<_>, _>>()?;
    let state_specs = c
        .states
        .clone()
        .unwrap_or_else(|| ["plus", "zero", "plus_i"].iter().map(|s| StateSpec::Named(s.to_string())).collect());
    let initial_states = state_specs.iter().map(StateSpec::build).collect::<Result<Vec<_>, _>>()?;
    let projector_name = c.projectors.clone().unwrap_or_else(|| "z".into());
    let projectors = config::projector_set(&projector_name)?;
    let config = CertifierConfig {
        epsilon: c.epsilon.unwrap_or(0.1),
        tau: c.tau.unwrap_or(0.5 / scale),
        controls,
        max_ops: c.max_ops.unwrap_or(2),
        times: time_grid(c.times, &params, 0.0, 4.0, 17)?,
        initial_states,
    };
    let oracle = oracle(ctx, &params)?;
    let verdict = certify(params.clone(), &projectors, &config)?;
    let witness = match &verdict.witness {
        Some(w) => Some(WitnessOut {
            controls: w.controls.iter().map(|&i| control_names[i].clone()).collect(),
            control_times: w.control_times.iter().map(|&t| round17(t)).collect(),
            probe_time: round17(w.probe_time),
            initial_state: state_specs[w.initial_state].label(),
            distance: round17(w.distance),
            oracle_distance: match &oracle {
                Some(o) => Some(round17(oracle_witness_distance(o.params(), o.grid(), &projectors, &config, w)?)),
                None => None,
            },
        }),
        None => None,
    };
    let out = CertifyOut {
        experiment: "certify",
        config_sha256: ctx.loaded.sha256.clone(),
        pass: verdict.pass,
        epsilon: round17(config.epsilon),
        tau: round17(config.tau),
        projectors: projector_name,
        worst_distance: round17(verdict.worst_distance),
        evaluated: verdict.evaluated,
        skipped: verdict.skipped,
        witness,
    };
    Ok(Report { text: to_json(&out), status: if verdict.pass { Status::Success } else { Status::CertifierFail } })
}
