//! Runs one parsed command and collects its CSV output and a JSON summary.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use serde_json::{json, Value};

use scdec::channel::{shannon_threshold, ChannelFamily, TransferSlice, TransferTable};
use scdec::coupled::{
    exit_curve_coupled, forward_de_coupled, jit_threshold_coupled, reverse_de_with, shape_report_for,
    CoupledEnsemble, ForwardConfig, Outcome, ReverseConfig, Schedule,
};
use scdec::io;
use scdec::sim::{run_experiment, sample_graph, Experiment, GraphEnsemble};
use scdec::uncoupled::{exit_curve, forward_de, jit_threshold, lemma2_bound, RegularEnsemble};

use crate::{
    BoundsArgs, ChannelArgs, ChannelChoice, Command, ConstellationArgs, EnsembleArgs, ExitArgs, ForwardArgs,
    ScheduleChoice, SimulateArgs, ThresholdArgs,
};

/// Output of one command.
pub struct Artifact {
    pub csv: Vec<u8>,
    /// One line for stdout.
    pub headline: String,
    pub summary: Value,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub seeds: Vec<u64>,
    /// Further files, keyed by extension.
    pub extra: Vec<(&'static str, Vec<u8>)>,
}

impl Artifact {
    fn new(csv: Vec<u8>, headline: String, summary: Value) -> Self {
        Self { csv, headline, summary, tolerances: BTreeMap::new(), seeds: Vec::new(), extra: Vec::new() }
    }

    fn tolerance(mut self, name: &'static str, value: f64) -> Self {
        self.tolerances.insert(name, value);
        self
    }
}

enum Ensemble {
    Regular(RegularEnsemble),
    Coupled(CoupledEnsemble),
}

impl EnsembleArgs {
    fn resolve(&self) -> Result<Ensemble> {
        let base = RegularEnsemble::new(self.dl, self.dr)?;
        Ok(match (self.half_width, self.w) {
            (Some(l), Some(w)) => Ensemble::Coupled(CoupledEnsemble::from_base(base, l, w)?),
            (None, None) => Ensemble::Regular(base),
            _ => bail!("--L and --w go together"),
        })
    }

    fn coupled(&self) -> Result<CoupledEnsemble> {
        match self.resolve()? {
            Ensemble::Coupled(e) => Ok(e),
            Ensemble::Regular(_) => bail!("this command needs a coupled ensemble (--L and --w)"),
        }
    }

    fn label(&self) -> String {
        match (self.half_width, self.w) {
            (Some(l), Some(w)) => format!("({},{},{},{})", self.dl, self.dr, l, w),
            _ => format!("({},{})", self.dl, self.dr),
        }
    }
}

impl ChannelArgs {
    fn family(&self) -> Result<ChannelFamily> {
        match self.channel {
            ChannelChoice::Dec | ChannelChoice::Bec if !self.tables.is_empty() => {
                bail!("--table only applies to --channel custom")
            }
            ChannelChoice::Dec => Ok(ChannelFamily::Dec),
            ChannelChoice::Bec => Ok(ChannelFamily::Bec),
            ChannelChoice::Custom => {
                ensure!(!self.tables.is_empty(), "--channel custom needs at least one --table EPSILON=PATH");
                let slices = self
                    .tables
                    .iter()
                    .map(|spec| {
                        let (eps, path) = spec
                            .split_once('=')
                            .with_context(|| format!("table `{spec}` is not EPSILON=PATH"))?;
                        let eps: f64 = eps.trim().parse().with_context(|| format!("table `{spec}`: bad epsilon"))?;
                        TransferSlice::from_csv_path(eps, path.trim()).with_context(|| format!("reading table `{spec}`"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ChannelFamily::Custom(Arc::new(TransferTable::new(slices)?)))
            }
        }
    }

    fn name(&self) -> &'static str {
        match self.channel {
            ChannelChoice::Dec => "dec",
            ChannelChoice::Bec => "bec",
            ChannelChoice::Custom => "custom",
        }
    }
}

pub fn execute(command: &Command) -> Result<Artifact> {
    match command {
        Command::Threshold(a) => threshold(a),
        Command::Exit(a) => exit(a),
        Command::ForwardDe(a) => forward(a),
        Command::Constellation(a) => constellation(a),
        Command::Simulate(a) => simulate(a),
        Command::Bounds(a) => bounds(a),
        Command::Replay { .. } => bail!("a manifest cannot replay another manifest"),
    }
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().context("flushing csv")
}

fn threshold(a: &ThresholdArgs) -> Result<Artifact> {
    let family = a.channel.family()?;
    let value = match a.ensemble.resolve()? {
        Ensemble::Regular(e) => jit_threshold(&e, &family, a.tol)?,
        Ensemble::Coupled(e) => jit_threshold_coupled(&e, &family, a.tol)?,
    };
    let e = &a.ensemble;
    let csv = csv_rows(
        &["dl", "dr", "L", "w", "channel", "threshold"],
        [vec![
            e.dl.to_string(),
            e.dr.to_string(),
            e.half_width.map_or(String::new(), |v| v.to_string()),
            e.w.map_or(String::new(), |v| v.to_string()),
            a.channel.name().to_string(),
            value.to_string(),
        ]],
    )?;
    let headline = format!("threshold {} {}: {value:.7}", e.label(), a.channel.name());
    Ok(Artifact::new(csv, headline, json!({ "threshold": value })).tolerance("bisection", a.tol))
}

fn exit(a: &ExitArgs) -> Result<Artifact> {
    let family = a.channel.family()?;
    let mut csv = Vec::new();
    match a.ensemble.resolve()? {
        Ensemble::Regular(e) => {
            let curve = exit_curve(&e, &family, a.points)?;
            io::write_exit_csv(&mut csv, &curve)?;
            let solved = curve.iter().filter(|p| p.is_solved()).count();
            let leftmost = curve.iter().filter_map(|p| p.epsilon).fold(f64::INFINITY, f64::min);
            let headline = format!("exit {}: {solved} of {} points solved, leftmost epsilon {leftmost:.6}", a.ensemble.label(), curve.len());
            Ok(Artifact::new(csv, headline, json!({ "points": curve.len(), "solved": solved, "leftmost_epsilon": leftmost })))
        }
        Ensemble::Coupled(e) => {
            ensure!(a.chi_step > 0.0 && a.chi_step < 1.0, "--chi-step must lie in (0, 1)");
            let grid: Vec<f64> = (1..).map(|k| k as f64 * a.chi_step).take_while(|&c| c < 1.0 - 1e-12).collect();
            let config = ReverseConfig { tol: a.tol, ..ReverseConfig::default() };
            let curve = exit_curve_coupled(&e, &family, &grid, &config)?;
            io::write_coupled_exit_csv(&mut csv, &curve)?;
            let failed: Vec<Value> = curve
                .iter()
                .filter_map(|p| p.error.as_ref().map(|err| json!({ "chi": p.chi, "error": err })))
                .collect();
            let drop = scdec::coupled::drop_location(&curve);
            let headline = format!(
                "exit {}: {} of {} entropies solved, drop at {}",
                a.ensemble.label(),
                curve.len() - failed.len(),
                curve.len(),
                drop.map_or("n/a".into(), |d| format!("{d:.6}"))
            );
            Ok(Artifact::new(csv, headline, json!({ "drop_location": drop, "failed_points": failed }))
                .tolerance("reverse_de", a.tol))
        }
    }
}

fn forward(a: &ForwardArgs) -> Result<Artifact> {
    let family = a.channel.family()?;
    let ch = family.at(a.epsilon)?;
    let mut csv = Vec::new();
    match a.ensemble.resolve()? {
        Ensemble::Regular(e) => {
            let trace = forward_de(&e, &ch, 1.0, a.tol, a.max_iter, true)?;
            io::write_trace_csv(&mut csv, &trace)?;
            let headline = format!(
                "forward-de {} at {}: x = {:.6e} after {} iterations{}",
                a.ensemble.label(),
                a.epsilon,
                trace.final_x,
                trace.iterations,
                if trace.exhausted { " (iteration cap reached)" } else { "" }
            );
            let summary = json!({
                "final_x": trace.final_x,
                "iterations": trace.iterations,
                "converged_to_zero": trace.converged_to_zero,
                "exhausted": trace.exhausted,
            });
            Ok(Artifact::new(csv, headline, summary).tolerance("de", a.tol))
        }
        Ensemble::Coupled(e) => {
            let schedule = match a.schedule {
                ScheduleChoice::Parallel => Schedule::Parallel,
                ScheduleChoice::RoundRobin => Schedule::RoundRobin,
                ScheduleChoice::Random => Schedule::Random { seed: a.seed },
            };
            let config = ForwardConfig { schedule, tol: a.tol, max_iter: a.max_iter, ..ForwardConfig::default() };
            let fp = forward_de_coupled(&e, &ch, &config)?;
            io::write_constellation_csv(&mut csv, &fp.constellation)?;
            let headline = format!(
                "forward-de {} at {}: {:?} after {} iterations, entropy {:.6}",
                a.ensemble.label(),
                a.epsilon,
                fp.outcome,
                fp.iterations,
                fp.entropy
            );
            let summary = json!({
                "outcome": fp.outcome,
                "iterations": fp.iterations,
                "entropy": fp.entropy,
                "residual": fp.residual,
                "exhausted": fp.outcome == Outcome::Exhausted,
            });
            let mut art = Artifact::new(csv, headline, summary).tolerance("de", a.tol);
            if let Schedule::Random { seed } = schedule {
                art.seeds.push(seed);
            }
            Ok(art)
        }
    }
}

fn constellation(a: &ConstellationArgs) -> Result<Artifact> {
    let family = a.channel.family()?;
    let e = a.ensemble.coupled()?;
    let config = ReverseConfig { tol: a.tol, max_iter: a.max_iter };
    let fp = reverse_de_with(&e, &family, a.chi, &config, None)?;
    ensure!(
        fp.outcome == Outcome::FixedPoint,
        "reverse DE did not converge within {} iterations (residual {:.3e})",
        a.max_iter,
        fp.residual
    );
    let shape = shape_report_for(&fp, &e.base(), &family)?;
    let mut csv = Vec::new();
    io::write_constellation_csv(&mut csv, &fp.constellation)?;
    let headline = format!(
        "constellation {} at entropy {}: epsilon {:.6}, plateau {:.6}",
        a.ensemble.label(),
        a.chi,
        fp.epsilon,
        shape.plateau_value
    );
    let summary = json!({
        "epsilon": fp.epsilon,
        "entropy": fp.entropy,
        "residual": fp.residual,
        "iterations": fp.iterations,
        "shape": shape,
    });
    Ok(Artifact::new(csv, headline, summary).tolerance("reverse_de", a.tol))
}

fn simulate(a: &SimulateArgs) -> Result<Artifact> {
    let ensemble: GraphEnsemble = match a.ensemble.resolve()? {
        Ensemble::Regular(e) => e.into(),
        Ensemble::Coupled(e) => e.into(),
    };
    ensure!(!a.seeds.is_empty(), "--seeds must name at least one seed");
    let exp = Experiment {
        ensemble,
        vars_per_section: a.vars_per_section,
        epsilons: a.epsilons.clone(),
        seeds: a.seeds.clone(),
        max_iter: a.max_iter,
    };
    let trials = run_experiment(&exp)?;
    let mut csv = Vec::new();
    io::write_trials_csv(&mut csv, &trials)?;
    let per_epsilon: Vec<Value> = a
        .epsilons
        .iter()
        .map(|&eps| {
            let rows: Vec<_> = trials.iter().filter(|t| t.epsilon == eps).collect();
            let decoded = rows.iter().filter(|t| t.residual_erasure_fraction == 0.0).count();
            let mean = rows.iter().map(|t| t.residual_erasure_fraction).sum::<f64>() / rows.len() as f64;
            json!({ "epsilon": eps, "decoded": decoded, "trials": rows.len(), "mean_residual": mean })
        })
        .collect();
    let headline = format!("simulate {}: {} trials", a.ensemble.label(), trials.len());
    let mut art = Artifact::new(csv, headline, json!({ "per_epsilon": per_epsilon }));
    art.seeds = a.seeds.clone();
    if a.dump_graph {
        let g = sample_graph(ensemble, a.vars_per_section, a.seeds[0])?;
        let mut dump = Vec::new();
        g.write_edge_list(&mut dump)?;
        art.extra.push(("edges", dump));
    }
    Ok(art)
}

fn bounds(a: &BoundsArgs) -> Result<Artifact> {
    let mut rows: Vec<(&str, f64)> = Vec::new();
    let base = RegularEnsemble::new(a.ensemble.dl, a.ensemble.dr)?;
    let rate = match a.ensemble.resolve()? {
        Ensemble::Regular(e) => e.design_rate(),
        Ensemble::Coupled(e) => {
            rows.push(("lemma3_bound", e.lemma3_bound()));
            e.design_rate()?
        }
    };
    rows.insert(0, ("design_rate", rate));
    rows.insert(1, ("shannon_threshold", shannon_threshold(rate)?));
    rows.insert(2, ("lemma2_bound", lemma2_bound(&base)?));
    let csv = csv_rows(&["quantity", "value"], rows.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]))?;
    let summary: serde_json::Map<String, Value> = rows.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let headline = rows.iter().map(|(k, v)| format!("{k} {v:.6}")).collect::<Vec<_>>().join(", ");
    Ok(Artifact::new(csv, format!("bounds {}: {headline}", a.ensemble.label()), Value::Object(summary)))
}
