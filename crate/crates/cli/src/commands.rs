use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use liyorke_core::diophantine::{
    continued_fraction, convergents, near_half_subsequence, near_zero_within, RealWithError, SearchStrategy,
};
use liyorke_core::dynamics::{
    iterate_with, liyorke_verdict, Certificate, EngineConfig, LiYorkeVerdict, State, SystemHandle, VerdictOptions,
};
use liyorke_core::operator::{
    build_schedule, exact_growth_reaches, transient_growth_profile, truncated_apply, BlockMatrix, Probe,
    TruncatedVector,
};
use liyorke_core::plane::{conjugacy_residual, h_apply, orbit_transport_gap, IterateRequest, PlanePoint, PolarGrid};
use liyorke_core::scrambled::{certified_family, pairwise_theta, random_family, ScrambledFamily};
use liyorke_core::{Error, Module};

use crate::error::CliError;
use crate::params::Params;

type Writer = csv::Writer<std::fs::File>;

fn writer(path: &Path, header: &[&str]) -> Result<Writer, CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    Ok(w)
}

pub fn run(name: &str, params: &Params, precision: u32, output: &Path) -> Result<String, CliError> {
    // Fails with the precision exit code before any work is done.
    IterateRequest::new(0, precision)?;
    match name {
        "orbit" => orbit(params, precision, output),
        "pair" => pair(params, precision, output),
        "scrambled" => scrambled(params, precision, output),
        "conjugacy" => conjugacy(params, precision, output),
        "operator" => operator(params, output),
        "cf" => cf(params, output),
        other => Err(CliError::config("command", format!("unknown command `{other}`"))),
    }
}

fn system(params: &Params) -> Result<SystemHandle, CliError> {
    match params.raw("system") {
        "disk-f" => Ok(SystemHandle::DiskF),
        "disk-f-inverse" => Ok(SystemHandle::DiskFInverse),
        "plane-g" => Ok(SystemHandle::PlaneG),
        "plane-g-inverse" => Ok(SystemHandle::PlaneGInverse),
        other => Err(CliError::config("system", format!("unknown system `{other}`"))),
    }
}

/// Disk points feed the plane systems through the conjugacy.
fn lift(system: &SystemHandle, z: PlanePoint) -> Result<State, CliError> {
    Ok(State::Plane(match system {
        SystemHandle::PlaneG | SystemHandle::PlaneGInverse => h_apply(&z)?,
        _ => z,
    }))
}

fn engine(precision: u32) -> EngineConfig {
    EngineConfig {
        precision_digits: precision,
        ..EngineConfig::default()
    }
}

fn orbit(params: &Params, precision: u32, output: &Path) -> Result<String, CliError> {
    let system = system(params)?;
    let modulus: f64 = params.get("modulus")?;
    let angle: f64 = params.get("angle")?;
    let horizon: u64 = params.positive("horizon")?;
    let stride: u64 = params.positive("stride")?;
    let start = match system {
        SystemHandle::PlaneG | SystemHandle::PlaneGInverse => PlanePoint::plane(modulus, angle)?,
        _ => PlanePoint::disk(modulus, angle)?,
    };
    let x = State::Plane(start);
    let config = engine(precision);
    let mut w = writer(output, &["n", "modulus", "angle_turns", "log_modulus"])?;
    let mut rows = 0;
    let mut last = start;
    for n in (0..=horizon).step_by(stride as usize) {
        let State::Plane(p) = iterate_with(&system, &x, n as i64, &config)? else {
            unreachable!()
        };
        if !p.modulus().is_finite() {
            return Err(Error::NumericalRange {
                module: Module::Plane,
                index: n as i64,
                reason: "modulus exceeds f64 range".into(),
            }
            .into());
        }
        w.write_record([
            n.to_string(),
            p.modulus().to_string(),
            p.angle_turns().to_string(),
            p.log_modulus().to_string(),
        ])?;
        rows += 1;
        last = p;
    }
    w.flush()?;
    Ok(format!(
        "orbit system={} rows={rows} final_modulus={} final_angle_turns={}",
        system.name(),
        last.modulus(),
        last.angle_turns()
    ))
}

struct PairSettings {
    system: SystemHandle,
    hints: bool,
    search_bound: u64,
    strategy: SearchStrategy,
    options: VerdictOptions,
}

impl PairSettings {
    fn from_params(params: &Params, precision: u32) -> Result<Self, CliError> {
        let tail_fraction: f64 = params.get("tail-fraction")?;
        if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
            return Err(CliError::config("tail-fraction", "must lie in (0, 1]"));
        }
        let delta_low: f64 = params.get("delta-low")?;
        let delta_high: f64 = params.get("delta-high")?;
        if !(delta_low < delta_high) {
            return Err(CliError::config("delta-low", "must be below delta-high"));
        }
        Ok(Self {
            system: system(params)?,
            hints: params.flag("hints")?,
            search_bound: params.positive("search-bound")?,
            strategy: params.strategy("strategy")?,
            options: VerdictOptions {
                horizon: params.positive("horizon")?,
                stride: params.positive("stride")?,
                tail_fraction,
                delta_low,
                delta_high,
                engine: engine(precision),
                ..VerdictOptions::default()
            },
        })
    }
}

fn family(params: &Params, count: usize) -> Result<ScrambledFamily, CliError> {
    match params.raw("family") {
        "certified" => Ok(certified_family(
            count,
            params.irrational("base")?,
            params.get("center")?,
        )?),
        "random" => Ok(random_family(count, params.get("seed")?)?),
        other => Err(CliError::config("family", format!("unknown family `{other}`"))),
    }
}

struct PairOutcome {
    verdict: LiYorkeVerdict,
    theta: f64,
    kinds: BTreeMap<u64, &'static str>,
}

fn analyse_pair(fam: &ScrambledFamily, j: usize, k: usize, s: &PairSettings) -> Result<PairOutcome, CliError> {
    let theta = pairwise_theta(fam, j, k)?;
    let mut kinds = BTreeMap::new();
    if s.hints {
        let near_half = near_half_subsequence(&theta, 64, s.search_bound, s.strategy)?;
        for n in near_half.indices {
            kinds.insert(n, "near_half");
        }
        for n in near_zero_within(&theta, s.options.horizon)?.indices {
            kinds.insert(n, "near_zero");
        }
    }
    let hints: Vec<u64> = kinds.keys().copied().collect();
    let x = lift(&s.system, fam.disk_point(j)?)?;
    let y = lift(&s.system, fam.disk_point(k)?)?;
    let verdict = liyorke_verdict(&s.system, &x, &y, Some(&hints), &s.options)?;
    Ok(PairOutcome {
        verdict,
        theta: theta.to_f64(),
        kinds,
    })
}

fn certificate_name(c: &Option<Certificate>) -> &'static str {
    match c {
        None => "none",
        Some(Certificate::Identical) => "identical",
        Some(Certificate::Divergent { .. }) => "divergent",
        Some(Certificate::Convergent { .. }) => "convergent",
        Some(Certificate::SeparatedLimit { .. }) => "separated_limit",
        Some(Certificate::EmpiricalDecay { .. }) => "empirical_decay",
    }
}

fn pair(params: &Params, precision: u32, output: &Path) -> Result<String, CliError> {
    let settings = PairSettings::from_params(params, precision)?;
    let offsets: Vec<i64> = params.list("offsets")?;
    let [a, b] = offsets[..] else {
        return Err(CliError::config("offsets", "expected exactly two values"));
    };
    let (fam, j, k) = match params.raw("family") {
        "certified" => (
            liyorke_core::scrambled::certified_family_with_offsets(
                &[a, b],
                params.irrational("base")?,
                params.get("center")?,
            )?,
            0,
            1,
        ),
        _ => {
            let count: usize = params.positive("count")?;
            let idx = |v: i64| {
                usize::try_from(v)
                    .ok()
                    .filter(|&i| i < count)
                    .ok_or_else(|| CliError::config("offsets", format!("member {v} outside 0..{count}")))
            };
            (family(params, count)?, idx(a)?, idx(b)?)
        }
    };
    let out = analyse_pair(&fam, j, k, &settings)?;
    let v = &out.verdict;
    let mut w = writer(output, &["index", "n", "distance", "is_witness", "witness_kind"])?;
    for (row, (&n, &d)) in v.series.indices().iter().zip(v.series.values()).enumerate() {
        let kind = out.kinds.get(&n).copied();
        w.write_record([
            row.to_string(),
            n.to_string(),
            d.to_string(),
            kind.is_some().to_string(),
            kind.unwrap_or("none").to_string(),
        ])?;
    }
    w.flush()?;
    Ok(format!(
        "verdict={:?} system={} theta={} liminf={} limsup={} samples={} certificate={}",
        v.verdict,
        settings.system.name(),
        out.theta,
        v.liminf_estimate,
        v.limsup_estimate,
        v.series.len(),
        certificate_name(&v.certificate)
    ))
}

fn scrambled(params: &Params, precision: u32, output: &Path) -> Result<String, CliError> {
    let settings = PairSettings::from_params(params, precision)?;
    let count: usize = params.positive("count")?;
    let fam = family(params, count)?;
    let outcomes = fam
        .pairs()
        .into_par_iter()
        .map(|(j, k)| analyse_pair(&fam, j, k, &settings).map(|o| (j, k, o)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = writer(
        output,
        &["j", "k", "theta", "liminf", "limsup", "verdict", "certificate"],
    )?;
    let mut tally = BTreeMap::new();
    for (j, k, o) in &outcomes {
        let v = &o.verdict;
        *tally.entry(format!("{:?}", v.verdict)).or_insert(0usize) += 1;
        w.write_record([
            j.to_string(),
            k.to_string(),
            o.theta.to_string(),
            v.liminf_estimate.to_string(),
            v.limsup_estimate.to_string(),
            format!("{:?}", v.verdict),
            certificate_name(&v.certificate).to_string(),
        ])?;
    }
    w.flush()?;
    let counts: Vec<String> = tally.iter().map(|(k, n)| format!("{k}={n}")).collect();
    Ok(format!(
        "scrambled system={} points={} pairs={} {}",
        settings.system.name(),
        fam.len(),
        outcomes.len(),
        counts.join(" ")
    ))
}

fn conjugacy(params: &Params, precision: u32, output: &Path) -> Result<String, CliError> {
    let grid_raw = params.raw("grid");
    let (radial, angular) = grid_raw
        .split_once('x')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .ok_or_else(|| CliError::config("grid", format!("expected RxA, got `{grid_raw}`")))?;
    let rmax: f64 = params.get("rmax")?;
    let samples: usize = params.get("samples")?;
    let max_n: i64 = params.get("max-n")?;
    if max_n < 0 {
        return Err(CliError::config("max-n", "must be non-negative"));
    }
    let tol: f64 = params.get("tol")?;
    let report = conjugacy_residual(PolarGrid { radial, angular }, rmax)?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.get("seed")?);
    let points: Vec<PlanePoint> = (0..samples)
        .map(|_| PlanePoint::disk(rng.random_range(0.0..rmax), rng.random_range(0.0..1.0)))
        .collect::<Result<_, _>>()?;
    let rows = points
        .par_iter()
        .map(|z| {
            (0..=max_n)
                .map(|n| Ok(orbit_transport_gap(z, IterateRequest::new(n, precision)?)?))
                .collect::<Result<Vec<f64>, CliError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = writer(output, &["sample", "n", "modulus", "angle_turns", "gap"])?;
    let mut transport_max = 0.0f64;
    for (s, (z, gaps)) in points.iter().zip(&rows).enumerate() {
        for (n, g) in gaps.iter().enumerate() {
            transport_max = transport_max.max(*g);
            w.write_record([
                s.to_string(),
                n.to_string(),
                z.modulus().to_string(),
                z.angle_turns().to_string(),
                g.to_string(),
            ])?;
        }
    }
    w.flush()?;
    let relation = if report.max_residual <= tol { "<=" } else { ">" };
    Ok(format!(
        "conjugacy max_residual={:e} {relation} {tol:e} grid={radial}x{angular} rmax={rmax} transport_max={:e} samples={samples} max_n={max_n}",
        report.max_residual, transport_max
    ))
}

fn operator(params: &Params, output: &Path) -> Result<String, CliError> {
    let eps: f64 = params.get("eps")?;
    let c: Vec<f64> = params.list("c")?;
    let blocks: usize = params.positive("blocks")?;
    let n_max: usize = params.get("n-max")?;
    let schedule = Arc::new(build_schedule(eps, &c, blocks)?);
    let lengths: Vec<String> = schedule.blocks().iter().map(|b| b.growth_length.to_string()).collect();
    let dims: Vec<String> = schedule.blocks().iter().map(|b| b.dim.to_string()).collect();
    let head = format!(
        "operator blocks={blocks} L={} dims={}",
        lengths.join(","),
        dims.join(",")
    );
    match params.raw("table") {
        "schedule" => {
            let mut w = writer(output, &["block", "eps", "growth_length", "half_dim", "dim", "minimal"])?;
            for (b, &ci) in schedule.blocks().iter().zip(schedule.c()) {
                let minimal = exact_growth_reaches(b.eps, ci, b.growth_length)
                    && (b.growth_length == 1 || !exact_growth_reaches(b.eps, ci, b.growth_length - 1));
                w.write_record([
                    b.index.to_string(),
                    b.eps.to_string(),
                    b.growth_length.to_string(),
                    b.half_dim.to_string(),
                    b.dim.to_string(),
                    minimal.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(head)
        }
        "profile" => {
            let probe = match params.raw("probe") {
                "first" => Probe::FirstBasis,
                "last" => Probe::LastBasis,
                "uniform" => Probe::Uniform,
                other => return Err(CliError::config("probe", format!("unknown probe `{other}`"))),
            };
            let profiles: Vec<_> = schedule
                .blocks()
                .par_iter()
                .map(|p| transient_growth_profile(&BlockMatrix::from_parameters(p), probe, n_max))
                .collect();
            let mut w = writer(output, &["block", "n", "log_norm", "norm"])?;
            let mut peaks = Vec::new();
            for (p, prof) in schedule.blocks().iter().zip(&profiles) {
                for (n, l) in prof.log_norms.iter().enumerate() {
                    w.write_record([p.index.to_string(), n.to_string(), l.to_string(), l.exp().to_string()])?;
                }
                peaks.push(format!("{}@{}", prof.max_norm(), prof.argmax));
            }
            w.flush()?;
            Ok(format!("{head} peaks={}", peaks.join(",")))
        }
        "inverse" => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.get("seed")?);
            let mut x = TruncatedVector::random(&schedule, blocks, &mut rng)?;
            let mut w = writer(output, &["n", "log_norm"])?;
            w.write_record(["0".to_string(), x.log_norm().to_string()])?;
            for n in 1..=n_max {
                x = truncated_apply(&schedule, blocks, &x, -1)?;
                w.write_record([n.to_string(), x.log_norm().to_string()])?;
            }
            w.flush()?;
            Ok(format!("{head} inverse_log_norm={} at n={n_max}", x.log_norm()))
        }
        other => Err(CliError::config("table", format!("unknown table `{other}`"))),
    }
}

fn parse_theta(params: &Params) -> Result<RealWithError, CliError> {
    let raw = params.raw("theta");
    if let Some(named) = liyorke_core::NamedIrrational::parse(raw) {
        return Ok(named.real());
    }
    if let Some((p, q)) = raw.split_once('/') {
        let parse = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|e| CliError::config("theta", format!("bad ratio `{raw}`: {e}")))
        };
        return Ok(RealWithError::from_ratio(parse(p)?, parse(q)?)?);
    }
    let value: f64 = params.get("theta")?;
    let error: f64 = params.get("error")?;
    // A parsed decimal is off by at most half an ulp.
    let error = if error > 0.0 {
        error
    } else {
        value.abs() * f64::EPSILON * 0.5
    };
    Ok(RealWithError::from_f64(value, error)?)
}

fn cf(params: &Params, output: &Path) -> Result<String, CliError> {
    let theta = parse_theta(params)?;
    let depth: usize = params.positive("depth")?;
    let expansion = continued_fraction(&theta, depth - 1)?;
    let convs = convergents(&expansion)?;
    let mut w = writer(output, &["k", "a", "p", "q", "signed_error"])?;
    for (k, c) in convs.iter().enumerate().take(depth) {
        let a = if k == 0 {
            expansion.a0
        } else {
            expansion.quotients[k - 1] as i128
        };
        w.write_record([
            k.to_string(),
            a.to_string(),
            c.p.to_string(),
            c.q.to_string(),
            c.signed_err.to_f64().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(format!(
        "cf theta={} rows={} certified_depth={} terminated={}",
        params.raw("theta"),
        convs.len().min(depth),
        expansion.certified_depth,
        expansion.terminated
    ))
}
