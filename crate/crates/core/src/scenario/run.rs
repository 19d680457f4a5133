//! Scenario execution and report emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::amenable::{folner_convergence, FolnerConfig};
use crate::continuum::{
    bathtub, berezin_li_yau, check_fourier_entropy, check_spectral_entropy_bound, density_ratio,
    sample_oscillator, LaplacianModel, LevelDistribution, MehlerOracle,
};
use crate::continuum::bathtub::{check_symbol, entropy_comparison};
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::inequality::random::{random_instance, random_step, trial_rng, Instance, InstanceSpec, OperatorKind};
use crate::inequality::{
    balance_audit, check_confined, check_entropy, check_lieb_thirring, check_log_sobolev, heat_theta,
    no_improvement_witness, sharpness_states, step_sandwich, BalanceId, Domain, IneqReport, Transform,
};
use crate::model::{PartitionSpec, Region};
use crate::monotone::{phi, psi, LogHull};
use crate::scenario::config::{InlineModel, Scenario, Source};

/// Command-line overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

/// One report with the trial that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub trial: Option<u64>,
    #[serde(flatten)]
    pub report: IneqReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub suite: &'static str,
    pub records: Vec<Record>,
    /// `(file name, CSV contents)`, written under `curves/`.
    pub curves: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub name: String,
    pub trials: usize,
    pub min_slack: Option<f64>,
    pub failures: usize,
    pub vacuous: usize,
}

impl ScenarioOutput {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.report.is_failure()).count()
    }

    /// 0 when no non-vacuous verdict failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failures() == 0 {
            0
        } else {
            1
        }
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut rows: BTreeMap<&str, SummaryRow> = BTreeMap::new();
        for r in &self.records {
            let row = rows.entry(&r.report.name).or_insert_with(|| SummaryRow {
                name: r.report.name.clone(),
                trials: 0,
                min_slack: None,
                failures: 0,
                vacuous: 0,
            });
            row.trials += 1;
            if r.report.is_failure() {
                row.failures += 1;
            }
            match r.report.slack {
                None => row.vacuous += 1,
                Some(s) => {
                    let s = s.to_f64();
                    row.min_slack = Some(row.min_slack.map_or(s, |m: f64| m.min(s)));
                }
            }
        }
        rows.into_values().collect()
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("name,trials,min_slack,failures,vacuous\n");
        for r in self.summary() {
            let slack = r.min_slack.map(|v| Ext::from_f64(v).to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{},{}", r.name, r.trials, slack, r.failures, r.vacuous);
        }
        s
    }

    pub fn jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            suite: &'a str,
            #[serde(flatten)]
            record: &'a Record,
        }
        let mut s = String::new();
        for r in &self.records {
            let line = serde_json::to_string(&Line { suite: self.suite, record: r }).expect("reports serialize");
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    /// Writes `report.jsonl`, `summary.csv` and `curves/*.csv` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |path: &Path| {
            let p = path.display().to_string();
            move |source| Error::Io { path: p, source }
        };
        let curves = dir.join("curves");
        fs::create_dir_all(&curves).map_err(io(&curves))?;
        let p = dir.join("report.jsonl");
        fs::write(&p, self.jsonl()).map_err(io(&p))?;
        let p = dir.join("summary.csv");
        fs::write(&p, self.summary_csv()).map_err(io(&p))?;
        for (name, body) in &self.curves {
            let p = curves.join(name);
            fs::write(&p, body).map_err(io(&p))?;
        }
        Ok(())
    }
}

fn config(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

enum Instances {
    Generated { seed: u64, trials: u64, spec: InstanceSpec },
    Inline(Box<Instance>),
}

fn inline_instance(m: &InlineModel) -> Result<Instance> {
    let a = m.operator.operator()?;
    let space = a.space().clone();
    let rho = match &m.state {
        Some(s) => s.state_on(&space)?,
        None => return Err(config("source.inline.state", "this suite needs a state")),
    };
    let omega = match &m.region {
        Some(idx) => Region::new(&space, idx.iter().copied())?,
        None => Region::new(&space, 0..space.points())?,
    };
    let coarse = match &m.partition {
        Some(cells) => PartitionSpec::from_indices(&space, cells)?,
        None => PartitionSpec::from_indices(&space, &[(0..space.points()).collect()])?,
    };
    let fine = match &m.fine {
        Some(cells) => PartitionSpec::from_indices(&space, cells)?,
        None => PartitionSpec::from_indices(&space, &(0..space.points()).map(|x| vec![x]).collect::<Vec<_>>())?,
    };
    Ok(Instance {
        a,
        rho,
        omega,
        coarse,
        fine,
        kind: OperatorKind::Generic,
    })
}

fn seed_and_trials(source: &Source, opts: &RunOptions) -> Result<(u64, u64)> {
    match source {
        Source::Generator(g) => {
            let seed = opts
                .seed
                .or(g.seed)
                .ok_or_else(|| config("source.generator.seed", "a seed is required for generated models"))?;
            let trials = opts
                .trials
                .or(g.trials)
                .ok_or_else(|| config("source.generator.trials", "a trial count is required"))?;
            Ok((seed, trials))
        }
        Source::Inline(_) => Ok((opts.seed.unwrap_or(0), 1)),
    }
}

fn instances(source: &Source, opts: &RunOptions, positive: bool, scalar: bool, unit_trace: bool) -> Result<Instances> {
    match source {
        Source::Generator(g) => {
            let (seed, trials) = seed_and_trials(source, opts)?;
            if g.max_dim < 2 {
                return Err(config("source.generator.max_dim", "must be at least 2"));
            }
            Ok(Instances::Generated {
                seed,
                trials,
                spec: InstanceSpec {
                    max_dim: g.max_dim,
                    positive: g.positive || positive,
                    scalar: g.scalar || scalar,
                    unit_trace,
                },
            })
        }
        Source::Inline(m) => {
            let mut inst = inline_instance(m)?;
            if unit_trace {
                inst.rho = inst.rho.normalized()?;
            }
            Ok(Instances::Inline(Box::new(inst)))
        }
    }
}

fn each(
    inst: &Instances,
    f: impl Fn(u64, u64, &Instance) -> Result<Vec<IneqReport>> + Sync,
) -> Result<Vec<Record>> {
    let per_trial: Vec<Vec<Record>> = match inst {
        Instances::Generated { seed, trials, spec } => (0..*trials)
            .into_par_iter()
            .map(|t| {
                let i = random_instance(*seed, t, *spec);
                Ok(f(*seed, t, &i)?
                    .into_iter()
                    .map(|report| Record { trial: Some(t), report })
                    .collect())
            })
            .collect::<Result<_>>()?,
        Instances::Inline(i) => vec![f(0, 0, i)?
            .into_iter()
            .map(|report| Record { trial: None, report })
            .collect()],
    };
    Ok(per_trial.into_iter().flatten().collect())
}

fn untrialed(reports: Vec<IneqReport>) -> Vec<Record> {
    reports.into_iter().map(|report| Record { trial: None, report }).collect()
}

fn curve_csv(header: &str, rows: impl IntoIterator<Item = (f64, Ext)>) -> String {
    let mut s = format!("{header}\n");
    for (x, y) in rows {
        let _ = writeln!(s, "{x},{y}");
    }
    s
}

fn grid(range: [f64; 2], samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n)
        .map(|i| range[0] + (range[1] - range[0]) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<ScenarioOutput> {
    let mut curves = Vec::new();
    let records = match scenario {
        Scenario::Confined(s) => {
            let inst = instances(&s.source, opts, false, false, false)?;
            each(&inst, |_, _, i| check_confined(&i.a, &i.rho, &i.omega))?
        }
        Scenario::Sharpness(s) => {
            let inst = instances(&s.source, opts, false, false, false)?;
            let lambdas = s.params.lambdas.clone();
            each(&inst, |seed, t, i| {
                let levels = match &lambdas {
                    Some(l) => l.clone(),
                    None => {
                        let ev = i.a.spectral().eigenvalues();
                        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
                        let mut rng = trial_rng(seed.wrapping_add(1), t);
                        vec![rng.random_range(lo - 0.5..hi + 0.5)]
                    }
                };
                let mut out = Vec::new();
                for l in levels {
                    out.extend(
                        sharpness_states(&i.a, &i.omega, l, None)?
                            .reports
                            .into_iter()
                            .map(|r| r.with("lambda", l)),
                    );
                }
                Ok(out)
            })?
        }
        Scenario::LiebThirring(s) => {
            let inst = instances(&s.source, opts, false, false, false)?;
            let p = &s.params;
            if p.ts.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
                return Err(config("params.ts", "every t must lie in (0, 1]"));
            }
            if p.max_jumps == 0 {
                return Err(config("params.max_jumps", "must be positive"));
            }
            each(&inst, |seed, t, i| {
                let mut out = check_lieb_thirring(&i.a, &i.rho, &i.coarse, &i.fine, &p.ts)?;
                let mut rng = trial_rng(seed.wrapping_add(2), t);
                for _ in 0..p.steps_per_trial {
                    let f = random_step(&mut rng, p.max_jumps, true);
                    let ys = if p.sample_points.is_empty() {
                        let m = f.sup();
                        vec![0.1 * m, 0.5 * m, m, 1.5 * m, 2.0 * m]
                    } else {
                        p.sample_points.clone()
                    };
                    out.extend(step_sandwich(&f, &ys)?);
                }
                Ok(out)
            })?
        }
        Scenario::Entropy(s) => {
            let inst = instances(&s.source, opts, false, false, true)?;
            each(&inst, |_, _, i| check_entropy(&i.a, &i.rho))?
        }
        Scenario::LogSobolev(s) => {
            let inst = instances(&s.source, opts, false, false, true)?;
            if s.params.ts.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
                return Err(config("params.ts", "every t must be positive"));
            }
            each(&inst, |_, _, i| check_log_sobolev(&i.a, &i.rho, &s.params.ts))?
        }
        Scenario::Heat(s) => {
            let inst = instances(&s.source, opts, true, true, false)?;
            each(&inst, |_, _, i| Ok(vec![heat_theta(&i.a, &i.omega)?]))?
        }
        Scenario::Balance(s) => {
            let inst = instances(&s.source, opts, false, false, true)?;
            let p = &s.params;
            let shifts: Vec<Transform> = p.shifts.iter().map(|&k| Transform::shift(k)).collect();
            let mut affine = shifts.clone();
            for &[scale, shift] in &p.affine {
                if !(scale > 0.0) {
                    return Err(config("params.affine", "scales must be positive"));
                }
                affine.push(Transform { scale, shift });
            }
            if p.eps.iter().any(|&e| !(e > 0.0)) {
                return Err(config("params.eps", "improvement factors must be positive"));
            }
            each(&inst, |_, _, i| {
                let region = Domain::Region(&i.omega);
                let mut out = balance_audit(BalanceId::Confined, &i.a, &i.rho, region, &shifts)?;
                out.extend(balance_audit(BalanceId::Counting, &i.a, &i.rho, region, &shifts)?);
                out.extend(balance_audit(
                    BalanceId::LiebThirring,
                    &i.a,
                    &i.rho,
                    Domain::Partition(&i.fine),
                    &shifts,
                )?);
                for id in [BalanceId::Entropy, BalanceId::LogSobolev] {
                    out.extend(balance_audit(id, &i.a, &i.rho, region, &affine)?);
                }
                for &e in &p.eps {
                    out.push(no_improvement_witness(&i.a, &i.rho, &i.omega, e)?.report);
                }
                Ok(out)
            })?
        }
        Scenario::Continuum(s) => {
            let p = &s.params;
            let mut out = Vec::new();
            for lengths in &p.boxes {
                for count in 1..=p.max_count {
                    out.push(berezin_li_yau(lengths, count)?.with("lengths", lengths));
                }
            }
            for &(n, l) in &p.density_levels {
                out.push(density_ratio(n, l)?);
            }
            for &n in &p.curve_dims {
                let m = LaplacianModel::new(n)?;
                let mut body = String::from("y,f_inv,phi,psi\n");
                for y in grid([0.0, 4.0], 401) {
                    let _ = writeln!(body, "{y},{},{},{}", m.f_inv(y), m.phi(y), m.psi(y));
                }
                curves.push((format!("laplacian_n{n}.csv"), body));
            }
            untrialed(out)
        }
        Scenario::Fourier(s) => {
            let p = &s.params;
            if p.samples < 8 {
                return Err(config("params.samples", "need at least 8 samples"));
            }
            let mut out = Vec::new();
            for &t in &p.ts {
                let o = MehlerOracle::new(1, t)?;
                let sampled = sample_oscillator(t, p.samples, p.half_width)?;
                let st = &sampled.state;
                let sx = st.spatial_entropy()?;
                let sxi = st.frequency_entropy()?;
                let vn: f64 = st.weights().iter().filter(|&&w| w > 0.0).map(|&w| -w * w.ln()).sum();
                out.push(IneqReport::eq_tol("oscillator_spatial_entropy", sx, o.s_x(), p.sampling_tol).with("t", t));
                out.push(
                    IneqReport::eq_tol("oscillator_frequency_entropy", sxi, o.s_xi(), p.sampling_tol).with("t", t),
                );
                out.push(IneqReport::eq_tol("oscillator_gap", sx + sxi - vn, o.gap(), p.sampling_tol).with("t", t));
                out.extend(check_fourier_entropy(st)?.into_iter().map(|r| r.with("t", t)));
                out.push(check_spectral_entropy_bound(st)?.with("t", t));
                let vols = vec![st.frequency_cell_volume(); st.cells()];
                let d = LevelDistribution::new(st.frequency_density(), &vols)?;
                curves.push((
                    format!("frequency_distribution_t{t}.csv"),
                    curve_csv("y,F", d.samples().into_iter().map(|(y, v)| (y, Ext::Finite(v)))),
                ));
            }
            untrialed(out)
        }
        Scenario::Bathtub(s) => {
            let (seed, trials) = seed_and_trials(&s.source, opts)?;
            if matches!(s.source, Source::Inline(_)) {
                return Err(config("source", "the bathtub suite draws its own densities"));
            }
            let p = &s.params;
            if p.cells == 0 {
                return Err(config("params.cells", "must be positive"));
            }
            let per: Vec<Vec<Record>> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(seed, t);
                    let g: Vec<f64> = (0..p.cells)
                        .map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..5.0f64).floor() * 0.5 + rng.random_range(0.0..1e-3) })
                        .collect();
                    // equal cells: the sorted filling is only minimal on a grid
                    let vol = vec![rng.random_range(0.01..2.0); p.cells];
                    let f = bathtub(&g, &vol)?;
                    let mut out = vec![f.report.clone()];
                    if g.iter().any(|&x| x > 0.0) {
                        out.push(entropy_comparison(&g, &vol)?);
                    }
                    for _ in 0..p.symbols_per_trial {
                        let sigma: Vec<f64> = (0..p.cells).map(|_| rng.random_range(0..p.cells) as f64).collect();
                        let r = check_symbol(&g, &vol, &sigma)?;
                        out.push(IneqReport::le("bathtub_minimal", f.entropy, r.rhs));
                        out.push(r);
                    }
                    Ok(out.into_iter().map(|report| Record { trial: Some(t), report }).collect())
                })
                .collect::<Result<_>>()?;
            per.into_iter().flatten().collect()
        }
        Scenario::Folner(s) => {
            let p = &s.params;
            let stencil = p.stencil.to_stencil()?;
            let study = folner_convergence(
                &stencil,
                &FolnerConfig {
                    lambda: p.lambda,
                    sizes: p.sizes.clone(),
                    panels: p.panels,
                },
            )?;
            curves.push(("folner.csv".to_string(), study.csv()));
            untrialed(
                study
                    .reports
                    .into_iter()
                    .map(|r| r.with("fitted_constant", study.fitted_constant))
                    .collect(),
            )
        }
        Scenario::Curves(s) => {
            let p = &s.params;
            let f = p.step.to_step()?;
            if p.mass_range[0] < 0.0 || p.mass_range[1] < p.mass_range[0] {
                return Err(config("params.mass_range", "need 0 ≤ lo ≤ hi"));
            }
            let xs = grid(p.energy_range, p.samples);
            let ys = grid(p.mass_range, p.samples);
            curves.push((
                "step.csv".into(),
                curve_csv("lambda,F", xs.iter().map(|&x| (x, Ext::Finite(f.eval(x))))),
            ));
            let ph = phi(&f, 1.0)?;
            curves.push(("phi.csv".into(), curve_csv("y,phi", ys.iter().map(|&y| (y, ph.eval(y))))));
            let ps = psi(&f)?;
            curves.push(("psi.csv".into(), curve_csv("y,psi", ys.iter().map(|&y| (y, ps.eval(y))))));
            for &t in &p.ts {
                let c = phi(&f, t)?;
                curves.push((format!("phi_t{t}.csv"), curve_csv("y,phi_t", ys.iter().map(|&y| (y, c.eval(y))))));
            }
            if !f.is_zero() {
                let hull = LogHull::new(&f)?;
                curves.push((
                    "log_hull.csv".into(),
                    curve_csv("lambda,hull", xs.iter().map(|&x| (x, hull.eval(x)))),
                ));
            }
            untrialed(step_sandwich(&f, &ys)?)
        }
    };
    Ok(ScenarioOutput {
        suite: scenario.suite(),
        records,
        curves,
    })
}

/// Shared handle for scenario inputs read once.
pub fn load_scenario(path: &Path) -> Result<Arc<Scenario>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Arc::new(crate::scenario::config::parse_scenario(&text)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::parse_scenario;

    fn run(json: &str) -> ScenarioOutput {
        run_scenario(&parse_scenario(json).unwrap(), &RunOptions::default()).unwrap()
    }

    #[test]
    fn confined_suite_is_deterministic() {
        let cfg = r#"{"suite":"confined","source":{"generator":{"seed":7,"trials":30}}}"#;
        let a = run(cfg);
        let b = run(cfg);
        assert_eq!(a.jsonl(), b.jsonl());
        assert_eq!(a.failures(), 0);
        assert_eq!(a.exit_code(), 0);
        assert!(a.summary_csv().lines().nth(1).unwrap().starts_with("confined_energy,30,"));
    }

    #[test]
    fn seed_is_mandatory() {
        let s = parse_scenario(r#"{"suite":"heat","source":{"generator":{"trials":3}}}"#).unwrap();
        assert!(matches!(
            run_scenario(&s, &RunOptions::default()),
            Err(Error::Config { field, .. }) if field == "source.generator.seed"
        ));
        let out = run_scenario(&s, &RunOptions { seed: Some(3), trials: None }).unwrap();
        assert_eq!(out.records.len(), 3);
    }

    #[test]
    fn empty_summary_has_header() {
        let out = ScenarioOutput {
            suite: "curves",
            records: Vec::new(),
            curves: Vec::new(),
        };
        assert_eq!(out.summary_csv(), "name,trials,min_slack,failures,vacuous\n");
        assert_eq!(out.jsonl(), "");
    }

    #[test]
    fn curves_reproduce_psi_value() {
        let out = run(
            r#"{"suite":"curves","params":{"step":[[1,1],[3,2]],"energy_range":[0,4],"mass_range":[0,4],"samples":5}}"#,
        );
        let psi = &out.curves.iter().find(|c| c.0 == "psi.csv").unwrap().1;
        let row = psi.lines().find(|l| l.starts_with("2,")).unwrap();
        let v: f64 = row[2..].parse().unwrap();
        assert!((v - (2f64.sqrt() + 8.0 - (6.0 / 2f64.sqrt() + 2.0 * 2f64.sqrt()))).abs() < 1e-12);
        assert_eq!(out.failures(), 0);
    }

    #[test]
    fn inline_model() {
        let out = run(
            r#"{"suite":"confined","source":{"inline":{
                "operator":{"weights":[1,1],"matrix":[1,0,0,3]},
                "state":{"weights":[1,1],"matrix":[1,0,0,0]},
                "region":[0]}}}"#,
        );
        assert!(out.records.iter().all(|r| r.trial.is_none()));
        assert_eq!(out.failures(), 0);
    }

    #[test]
    fn writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(r#"{"suite":"continuum","params":{"boxes":[[3.141592653589793]],"max_count":3,"curve_dims":[1]}}"#);
        out.write(dir.path()).unwrap();
        assert!(dir.path().join("report.jsonl").exists());
        assert!(dir.path().join("curves/laplacian_n1.csv").exists());
        assert_eq!(out.failures(), 0);
    }
}
