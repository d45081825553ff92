use std::path::Path;

use rayon::prelude::*;
use rcf_core::gw::{haggstrom_check, shorted_resistance_sample, solve_gw_cdf};
use rcf_core::lp::{lp_limit, LinearOperator, MAX_SYMMETRIC_ORDER};
use rcf_core::lyapunov::critical_exponent;
use rcf_core::{
    certify_alpha_c, dimension_bound, fixed_point_m, lp_threshold, lyapunov_bracket, lyapunov_mc, monotone_start_check,
    rng, sample_mu, spectral_radius, support_type, CertifyOptions, Classification, Error, IteratedCdf,
    OffspringDistribution, SupportKind, TensorOp,
};

use crate::args::{AlphaSelect, AlphacArgs, CdfArgs, GwArgs, LpArgs, LyapunovArgs, SampleArgs, ShortedArgs};
use crate::error::{CliError, CliResult};
use crate::record::{ResultRecord, Value};

/// A finished record, plus the reason it is only partial when certification stalled.
pub struct Outcome {
    pub record: ResultRecord,
    pub undetermined: Option<String>,
}

impl From<ResultRecord> for Outcome {
    fn from(record: ResultRecord) -> Self {
        Self {
            record,
            undetermined: None,
        }
    }
}

const MAX_GRID_POINTS: usize = 1_000_000;

fn parse_f64(s: &str, what: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{what}: cannot parse '{s}' as a number")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("{what}: '{s}' is not finite")));
    }
    Ok(v)
}

/// `lo:hi:step` with both ends included.
pub fn parse_alpha_range(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(CliError::Usage(format!(
            "--alpha-range expects LO:HI:STEP, got '{spec}'"
        )));
    };
    let (lo, hi, step) = (
        parse_f64(lo, "--alpha-range")?,
        parse_f64(hi, "--alpha-range")?,
        parse_f64(step, "--alpha-range")?,
    );
    if !(lo < hi) {
        return Err(CliError::Usage(format!(
            "--alpha-range needs LO < HI, got {lo} and {hi}"
        )));
    }
    if !(step > 0.0) {
        return Err(CliError::Usage(format!(
            "--alpha-range needs a positive step, got {step}"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor();
    if n >= MAX_GRID_POINTS as f64 {
        return Err(CliError::Usage(format!(
            "--alpha-range has more than {MAX_GRID_POINTS} points"
        )));
    }
    Ok((0..=n as usize).map(|i| lo + i as f64 * step).collect())
}

/// `lo:hi` with `lo < hi`.
pub fn parse_interval(spec: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi] = parts[..] else {
        return Err(CliError::Usage(format!("--interval expects LO:HI, got '{spec}'")));
    };
    let (lo, hi) = (parse_f64(lo, "--interval")?, parse_f64(hi, "--interval")?);
    if !(lo < hi) {
        return Err(CliError::Usage(format!("--interval needs LO < HI, got {lo} and {hi}")));
    }
    Ok((lo, hi))
}

/// Comma-separated integers and inclusive ranges `a..b`.
pub fn parse_list(spec: &str, what: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("{what}: cannot parse '{spec}' as a list like 1,2,8..10"));
    let mut out = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        if let Some((a, b)) = item.split_once("..") {
            let (a, b): (usize, usize) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
            if a > b || b - a >= MAX_GRID_POINTS {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(item.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

fn alphas(sel: &AlphaSelect) -> CliResult<Vec<f64>> {
    match (&sel.alpha, &sel.alpha_range) {
        (Some(a), None) => Ok(vec![*a]),
        (None, Some(r)) => parse_alpha_range(r),
        _ => Err(CliError::Usage(
            "exactly one of --alpha and --alpha-range is required".into(),
        )),
    }
}

fn read_offspring(path: Option<&Path>) -> CliResult<OffspringDistribution> {
    let Some(path) = path else {
        return Ok(OffspringDistribution::binary());
    };
    let text = std::fs::read_to_string(path)?;
    let pairs: Vec<(usize, f64)> = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{}: expected a JSON array of [k, p_k] pairs ({e})",
            path.display()
        ))
    })?;
    Ok(OffspringDistribution::from_pairs(&pairs)?)
}

fn offspring_text(off: &OffspringDistribution) -> String {
    let pairs: Vec<String> = off
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(i, p)| format!("{}:{p}", i + 1))
        .collect();
    pairs.join(" ")
}

pub fn cmd_lyapunov(a: &LyapunovArgs) -> CliResult<Outcome> {
    let grid = alphas(&a.alphas)?;
    for &alpha in &grid {
        fixed_point_m(alpha)?;
    }
    let mut rec = ResultRecord::new(
        "lyapunov",
        &[
            "alpha",
            "depth",
            "lambda_lower",
            "lambda_upper",
            "mc_estimate",
            "mc_stderr",
            "dim_bound",
        ],
    );
    rec.param("alpha", a.alphas.alpha)
        .param("alpha_range", a.alphas.alpha_range.clone())
        .param("depth", a.depth)
        .param("steps", a.steps)
        .param("trials", a.trials)
        .param("seed", a.seed)
        .param("margin", a.margin);
    rec.summary("critical_exponent", critical_exponent());
    for alpha in grid {
        let bracket = match lyapunov_bracket(alpha, a.depth, a.margin) {
            Ok(b) => Some(b),
            Err(Error::Certification { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let mc = if a.steps > 0 && a.trials > 0 {
            Some(lyapunov_mc(alpha, a.steps, a.trials, a.seed)?)
        } else {
            None
        };
        let dim = bracket.and_then(|b| dimension_bound(b.lower - b.margin).ok());
        rec.push_row(vec![
            alpha.into(),
            a.depth.into(),
            bracket.map(|b| b.lower).into(),
            bracket.map(|b| b.upper).into(),
            mc.map(|m| m.estimate).into(),
            mc.map(|m| m.stderr).into(),
            dim.into(),
        ]);
    }
    Ok(rec.into())
}

fn class_name(c: Classification) -> &'static str {
    match c {
        Classification::Below => "below",
        Classification::Above => "above",
        Classification::Undetermined => "undetermined",
    }
}

pub fn cmd_alphac(a: &AlphacArgs) -> CliResult<Outcome> {
    let (lo, hi) = parse_interval(&a.interval)?;
    if !(lo > 1.0 / 6.0 && hi <= 0.5) {
        return Err(Error::Domain(format!("the search interval must lie in (1/6, 1/2], got [{lo}, {hi}]")).into());
    }
    let opts = CertifyOptions {
        start_depth: a.start_depth,
        depth_step: a.depth_step,
        max_depth: a.max_depth,
        margin: a.margin,
        resolution: a.tol,
    };
    let cert = certify_alpha_c(lo, hi, &opts)?;
    let mut rec = ResultRecord::new(
        "alphac",
        &["role", "alpha", "class", "depth", "lambda_lower", "lambda_upper"],
    );
    rec.param("interval", a.interval.clone())
        .param("start_depth", a.start_depth)
        .param("depth_step", a.depth_step)
        .param("max_depth", a.max_depth)
        .param("margin", a.margin)
        .param("tol", a.tol);
    rec.summary("alpha_lo", cert.alpha_lo)
        .summary("alpha_hi", cert.alpha_hi)
        .summary("width", cert.width())
        .summary("endpoints_certified", cert.is_complete())
        .summary("flagged", cert.undetermined.is_some())
        .summary("undetermined_lo", cert.undetermined.map(|u| u.0))
        .summary("undetermined_hi", cert.undetermined.map(|u| u.1))
        .summary("depth_used", cert.depth_used)
        .summary("probes", cert.probes.len());
    let roles = [("alpha_lo", &cert.lo_probe), ("alpha_hi", &cert.hi_probe)];
    for (role, p) in roles.into_iter().chain(cert.probes.iter().map(|p| ("probe", p))) {
        rec.push_row(vec![
            role.into(),
            p.alpha.into(),
            class_name(p.class).into(),
            p.bracket.depth.into(),
            p.bracket.lower.into(),
            p.bracket.upper.into(),
        ]);
    }
    let undetermined = (!cert.is_complete() || cert.undetermined.is_some()).then(|| match cert.undetermined {
        Some((u0, u1)) => format!("probes in [{u0}, {u1}] unresolved at depth {}", a.max_depth),
        None => "endpoint probes unresolved".to_string(),
    });
    Ok(Outcome {
        record: rec,
        undetermined,
    })
}

pub fn cmd_lp(a: &LpArgs) -> CliResult<Outcome> {
    let orders = parse_list(&a.r, "--r")?;
    for &r in &orders {
        if r == 0 {
            return Err(Error::Domain("order r must be at least 1".into()).into());
        }
        if r > MAX_SYMMETRIC_ORDER {
            return Err(Error::Resource(format!(
                "order {r}: the full operator has 2^{r} coordinates and the symmetric reduction is capped at r = {MAX_SYMMETRIC_ORDER}"
            ))
            .into());
        }
    }
    let mut columns = vec!["r", "p", "alpha_p", "gamma_at_threshold", "limit_gap"];
    if a.full {
        columns.push("gamma_full");
        // Fail before any work if the full operator cannot be built.
        for &r in &orders {
            TensorOp::new(0.0, r)?;
        }
    }
    let mut rec = ResultRecord::new("lp", &columns);
    rec.param("r", a.r.clone()).param("tol", a.tol).param("full", a.full);
    rec.summary("limit", lp_limit());
    for r in orders {
        let t = lp_threshold(r, a.tol)?;
        let mut row = vec![
            r.into(),
            t.p.into(),
            t.alpha_p.into(),
            t.gamma_at_threshold.into(),
            (t.alpha_p - lp_limit()).into(),
        ];
        if a.full {
            let op = TensorOp::new(t.alpha_p, r)?;
            debug_assert_eq!(op.dim(), 1 << r);
            row.push(spectral_radius(&op, 1e-14, 1_000_000)?.value.into());
        }
        rec.push_row(row);
    }
    Ok(rec.into())
}

fn positive(v: usize, flag: &str) -> CliResult<()> {
    if v == 0 {
        return Err(Error::Domain(format!("{flag} must be at least 1")).into());
    }
    Ok(())
}

pub fn cmd_sample(a: &SampleArgs) -> CliResult<Outcome> {
    let m = fixed_point_m(a.alpha)?;
    positive(a.depth, "--depth")?;
    positive(a.trials, "--trials")?;
    positive(a.bins, "--bins")?;
    let geometry = support_type(a.alpha)?;
    let draws: Vec<f64> = (0..a.trials as u64)
        .into_par_iter()
        .map(|i| sample_mu(a.alpha, a.depth, &mut rng::stream(a.seed, i)))
        .collect();
    let width = m / a.bins as f64;
    let mut counts = vec![0u64; a.bins];
    for &x in &draws {
        counts[((x / width) as usize).min(a.bins - 1)] += 1;
    }
    let (gap_lo, gap_hi) = (m / (1.0 + m), a.alpha / (1.0 + a.alpha));
    let in_gap = if geometry.kind == SupportKind::Cantor {
        Some(draws.iter().filter(|&&x| gap_lo < x && x < gap_hi).count())
    } else {
        None
    };

    let mut rec = ResultRecord::new("sample", &["bin_lo", "bin_hi", "count", "density"]);
    rec.param("alpha", a.alpha)
        .param("depth", a.depth)
        .param("trials", a.trials)
        .param("bins", a.bins)
        .param("seed", a.seed);
    rec.summary("m_alpha", m)
        .summary(
            "support",
            if geometry.kind == SupportKind::Cantor {
                "cantor"
            } else {
                "interval"
            },
        )
        .summary("gap", geometry.gap)
        .summary("draws_in_gap", in_gap);
    for (i, &c) in counts.iter().enumerate() {
        rec.push_row(vec![
            (i as f64 * width).into(),
            ((i + 1) as f64 * width).into(),
            c.into(),
            (c as f64 / (a.trials as f64 * width)).into(),
        ]);
    }
    Ok(rec.into())
}

pub fn cmd_cdf(a: &CdfArgs) -> CliResult<Outcome> {
    let m = fixed_point_m(a.alpha)?;
    let mut depths = parse_list(&a.depths, "--depths")?;
    depths.sort_unstable();
    depths.dedup();
    positive(a.grid, "--grid")?;
    let iterates = depths
        .iter()
        .map(|&d| IteratedCdf::new(a.alpha, d))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<f64> = (0..=a.grid).map(|i| m * i as f64 / a.grid as f64).collect();
    let tables: Vec<Vec<f64>> = iterates
        .iter()
        .map(|f| points.iter().map(|&s| f.eval(s)).collect())
        .collect();
    let decreasing = tables
        .windows(2)
        .all(|w| w[1].iter().zip(&w[0]).all(|(b, a)| *b <= a + 1e-13));

    let mut rec = ResultRecord::new("cdf", &["depth", "s", "cdf"]);
    rec.param("alpha", a.alpha)
        .param("depths", a.depths.clone())
        .param("grid", a.grid);
    rec.summary("m_alpha", m)
        .summary("monotone_start", monotone_start_check(a.alpha)?)
        .summary("decreasing_in_depth", decreasing);
    for (d, table) in depths.iter().zip(&tables) {
        for (s, v) in points.iter().zip(table) {
            rec.push_row(vec![(*d).into(), (*s).into(), (*v).into()]);
        }
    }
    Ok(rec.into())
}

pub fn cmd_gw(a: &GwArgs) -> CliResult<Outcome> {
    let off = read_offspring(a.offspring.as_deref())?;
    positive(a.bins, "--bins")?;
    let sol = solve_gw_cdf(&off, a.grid, a.tol, a.max_iter)?;
    let ks = if a.trials > 0 {
        Some(haggstrom_check(&sol.cdf, &off, a.depth, a.trials, a.seed)?)
    } else {
        None
    };

    let mut rec = ResultRecord::new("gw", &["s", "cdf"]);
    rec.param("offspring", offspring_text(&off))
        .param("grid", a.grid)
        .param("tol", a.tol)
        .param("max_iter", a.max_iter)
        .param("depth", a.depth)
        .param("trials", a.trials)
        .param("seed", a.seed)
        .param("bins", a.bins);
    rec.summary("residual", sol.residual)
        .summary("iterations", sol.iterations)
        .summary("converged", sol.residual < a.tol)
        .summary("median", sol.cdf.quantile(0.5))
        .summary("ks", ks);
    for i in 0..=a.bins {
        let s = i as f64 / a.bins as f64;
        rec.push_row(vec![s.into(), sol.cdf.eval(s).into()]);
    }
    Ok(rec.into())
}

pub fn cmd_shorted(a: &ShortedArgs) -> CliResult<Outcome> {
    let off = read_offspring(a.offspring.as_deref())?;
    positive(a.trials, "--trials")?;
    let samples = (0..a.trials as u64)
        .into_par_iter()
        .map(|i| shorted_resistance_sample(&off, a.depth, &mut rng::stream(a.seed, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rec = ResultRecord::new("shorted", &["trial", "resistance", "last_generation"]);
    rec.param("offspring", offspring_text(&off))
        .param("depth", a.depth)
        .param("trials", a.trials)
        .param("seed", a.seed);
    let mean = samples.iter().map(|s| s.resistance).sum::<f64>() / samples.len() as f64;
    rec.summary("mean_resistance", mean);
    for (i, s) in samples.iter().enumerate() {
        rec.push_row(vec![
            i.into(),
            s.resistance.into(),
            s.generation_sizes
                .last()
                .copied()
                .map(Value::from)
                .unwrap_or(Value::Missing),
        ]);
    }
    Ok(rec.into())
}
