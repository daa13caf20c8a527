use std::path::Path;

use pickdecomp_core::certify::{kernel_matrix, ladder_trend_ok, run_suite_with, PointSet, SuiteConfig};
use pickdecomp_core::decomp::{
    build_ks, build_ls, decompose, exact_difference_identity, max_abs, truncation_sweep,
    DecompositionSpec, Workspace,
};
use pickdecomp_core::kernel::{explicit_p, KernelHandle};
use pickdecomp_core::moments::{default_grid, MOMENT_CONVENTION};
use pickdecomp_core::poly::{check_stability_default, StabilityVerdict};
use pickdecomp_core::{MomentTable, MultiIndex, StablePolynomial, VarSet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{IoArgs, RunArgs};
use crate::cache::{CacheStatus, MomentCache};
use crate::error::{CliError, CliResult};
use crate::output::{emit_json, write_kernel_csv, Check};
use crate::polyjson::{read_polynomial, PolynomialJson};

/// Tolerance factor for claims that hold exactly at every truncation level.
const TOL_EXACT: f64 = 1e-9;

#[derive(Debug, Serialize)]
struct Report {
    command: &'static str,
    polynomial: PolynomialJson,
    config: Value,
    results: Value,
    checks: Vec<Check>,
    pass: bool,
}

impl Report {
    fn new(command: &'static str, p: &StablePolynomial, config: Value, results: Value, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Report {
            command,
            polynomial: PolynomialJson::from_polynomial(p),
            config,
            results,
            checks,
            pass,
        }
    }
}

fn verdict_json(v: &StabilityVerdict) -> Value {
    json!({
        "stable": v.stable,
        "margin": v.margin,
        "torus_max": v.torus_max,
        "grid": v.grid,
        "threshold": v.threshold,
        "stages": v.stages.iter().map(|s| json!({
            "variable": s.variable + 1,
            "slices": s.slices,
            "min_root_modulus": s.min_root_modulus,
            "degenerate": s.degenerate,
            "pass": s.pass,
        })).collect::<Vec<_>>(),
    })
}

fn stability_check(v: &StabilityVerdict) -> Check {
    Check {
        id: "stability".into(),
        paper_anchor: "p has no zeros on the closed polydisk".into(),
        kernel: "p".into(),
        n_points: v.grid,
        min_eig: None,
        max_residual: None,
        tol: v.threshold,
        pass: v.stable,
    }
}

fn residual_check(id: String, anchor: &str, kernel: String, n_points: usize, value: f64, tol: f64) -> Check {
    Check {
        id,
        paper_anchor: anchor.into(),
        kernel,
        n_points,
        min_eig: None,
        max_residual: Some(value),
        tol,
        pass: value <= tol,
    }
}

pub fn stability(args: &IoArgs) -> CliResult<bool> {
    let p = read_polynomial(&args.input)?;
    let v = check_stability_default(&p);
    let report = Report::new(
        "stability",
        &p,
        json!({ "grid": v.grid, "threshold": v.threshold }),
        verdict_json(&v),
        vec![stability_check(&v)],
    );
    emit_json(&report, args.output.as_deref())?;
    if v.stable {
        Ok(true)
    } else {
        Err(CliError::Unstable { margin: v.margin })
    }
}

/// Input shared by the measure-dependent subcommands.
struct Run {
    p: StablePolynomial,
    n: MultiIndex,
    ladder: Vec<usize>,
    cache: MomentCache,
}

impl Run {
    fn open(command: &'static str, args: &RunArgs) -> CliResult<Run> {
        let p = read_polynomial(&args.io.input)?;
        if args.ladder.is_empty() || args.ladder[0] == 0 || args.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("--N must be positive and strictly increasing".into()));
        }
        if let Some(m) = args.grid {
            if !m.is_power_of_two() {
                return Err(CliError::Config(format!("--M {m} is not a power of two")));
            }
        }
        let v = check_stability_default(&p);
        if !v.stable {
            let report = Report::new(command, &p, config_json(args), verdict_json(&v), vec![stability_check(&v)]);
            emit_json(&report, args.io.output.as_deref())?;
            return Err(CliError::Unstable { margin: v.margin });
        }
        let cache = if args.no_cache {
            MomentCache::disabled()
        } else {
            MomentCache::new(Some(args.cache_dir.clone().unwrap_or_else(MomentCache::default_dir)))
        };
        Ok(Run {
            n: p.degree().clone(),
            p,
            ladder: args.ladder.clone(),
            cache,
        })
    }

    fn d(&self) -> usize {
        self.p.dim()
    }

    fn top(&self) -> usize {
        *self.ladder.last().expect("validated")
    }

    fn grid_for(&self, range: &MultiIndex, args: &RunArgs) -> usize {
        args.grid.unwrap_or_else(|| {
            default_grid(range).max((self.p.degree().max_entry() as usize + 1).next_power_of_two())
        })
    }

    fn table(&self, range: &MultiIndex, grid: usize) -> CliResult<MomentTable> {
        let (table, status) = self.cache.get(&self.p, range, grid)?;
        if status == CacheStatus::Hit {
            eprintln!("moment cache hit (M = {grid})");
        }
        Ok(table)
    }

    fn points(&self, args: &RunArgs) -> CliResult<PointSet> {
        let s = args.points;
        Ok(PointSet::random(self.d(), s.count, s.radius, s.seed)?.with_structured())
    }

    fn partition(&self, args: &RunArgs) -> CliResult<Option<VarSet>> {
        let Some(vars) = &args.s else { return Ok(None) };
        let d = self.d();
        if let Some(v) = vars.iter().find(|&&v| v == 0 || v > d) {
            return Err(CliError::Config(format!("--S variable {v} is outside 1..={d}")));
        }
        let s = VarSet::from_vars(vars.iter().map(|v| v - 1));
        if s.is_empty() || s == VarSet::full(d) {
            return Err(CliError::Config("--S must be a nonempty proper subset of the variables".into()));
        }
        Ok(Some(s))
    }

    fn gkvw(&self, args: &RunArgs) -> CliResult<(usize, usize)> {
        let d = self.d();
        let j = args.j.unwrap_or(1);
        let k = args.k.unwrap_or(if j == 1 { 2 } else { 1 });
        if j == 0 || k == 0 || j > d || k > d || j == k {
            return Err(CliError::Config(format!("--j {j} --k {k} must be distinct variables in 1..={d}")));
        }
        Ok((j - 1, k - 1))
    }

    fn p_scale(&self, pts: &PointSet) -> CliResult<f64> {
        Ok(max_abs(&kernel_matrix(&explicit_p(&self.p, &self.n)?, pts)?).max(1.0))
    }
}

fn config_json(args: &RunArgs) -> Value {
    json!({
        "moment_convention": MOMENT_CONVENTION,
        "M": args.grid,
        "N": args.ladder,
        "S": args.s,
        "j": args.j,
        "k": args.k,
        "points": {
            "mode": "random",
            "count": args.points.count,
            "radius": args.points.radius,
            "seed": args.points.seed,
            "structured": true,
        },
        "tol_psd": args.tol_psd,
        "tol_identity": args.tol_identity,
        "tol_moment": args.tol_moment,
    })
}

fn aliasing_check(table: &MomentTable, tol: f64) -> Check {
    residual_check(
        "moments.aliasing".into(),
        "|C(M) - C(2M)| small",
        format!("C_gamma, M={}", table.grid()),
        0,
        table.aliasing_error_estimate(),
        tol,
    )
}

fn one_based(s: VarSet) -> Vec<usize> {
    s.iter().map(|j| j + 1).collect()
}

fn dump_kernels(dir: &Path, pts: &PointSet, kernels: &[(String, &KernelHandle)]) -> CliResult<()> {
    for (name, k) in kernels {
        let m = kernel_matrix(k, pts)?;
        write_kernel_csv(&dir.join(format!("{name}.csv")), pts.points(), &m)?;
    }
    Ok(())
}

fn label(s: VarSet) -> String {
    one_based(s).iter().map(|v| v.to_string()).collect::<Vec<_>>().join("")
}

pub fn moments(args: &RunArgs) -> CliResult<bool> {
    let run = Run::open("moments", args)?;
    let range = MultiIndex::splat(run.d(), run.top() as i64 - 1);
    let grid = run.grid_for(&range, args);
    let table = run.table(&range, grid)?;
    let defect = table.hermitian_defect();
    let checks = vec![
        aliasing_check(&table, args.tol_moment),
        residual_check(
            "moments.hermitian".into(),
            "C_{-g} = conj(C_g)",
            "C_gamma".into(),
            0,
            defect,
            1e-12,
        ),
    ];
    let results = json!({
        "poly_hash": table.poly_hash(),
        "R": table.range().entries(),
        "M": table.grid(),
        "aliasing_error_estimate": table.aliasing_error_estimate(),
        "hermitian_defect": defect,
        "C_0": [table.get(&MultiIndex::zeros(run.d()))?.re, table.get(&MultiIndex::zeros(run.d()))?.im],
        "n_values": table.values().len(),
    });
    let report = Report::new("moments", &run.p, config_json(args), results, checks);
    emit_json(&report, args.io.output.as_deref())?;
    Ok(report.pass)
}

pub fn decompose_cmd(args: &RunArgs) -> CliResult<bool> {
    let run = Run::open("decompose", args)?;
    let s = run.partition(args)?.unwrap_or(VarSet::singleton(0));
    let top = run.top();
    let range = MultiIndex::splat(run.d(), top as i64 - 1);
    let table = run.table(&range, run.grid_for(&range, args))?;
    let pts = run.points(args)?;
    let scale = run.p_scale(&pts)?;
    let mut checks = vec![aliasing_check(&table, args.tol_moment)];
    let mut ws = Workspace::new(table);
    let spec = DecompositionSpec::new(run.p.clone(), run.n.clone(), s, run.ladder[0])?;

    let mut rows = Vec::new();
    let mut residuals = Vec::new();
    for &level in &run.ladder {
        let at = spec.at(level);
        let r = decompose(&mut ws, &at, pts.points())?;
        let diff = exact_difference_identity(&mut ws, &at, pts.points())?;
        checks.push(residual_check(
            format!("identity.difference S={s} N={level}"),
            "K_S - L_S = K_T - L_T",
            "(K_S^N - L_S^N) - (K_T^N - L_T^N)".into(),
            pts.len(),
            diff,
            TOL_EXACT * scale,
        ));
        rows.push(json!({
            "N": level,
            "max_residual": r.max_residual,
            "max_diagonal_residual": r.max_diagonal_residual,
            "drop_factor": residuals.last().map(|prev: &f64| prev / r.max_residual),
            "difference_identity": diff,
        }));
        residuals.push(r.max_residual);
    }
    let last = *residuals.last().expect("nonempty ladder");
    checks.push(Check {
        pass: last <= args.tol_identity && ladder_trend_ok(&residuals, scale),
        ..residual_check(
            format!("identity.ladder S={s}"),
            "P = K_S + L_T",
            "P - K_S^N - L_T^N".into(),
            pts.len(),
            last,
            args.tol_identity,
        )
    });

    if let Some(dir) = &args.csv_kernels {
        let at = spec.at(top);
        let swapped = at.swapped();
        let (ks, ls) = (build_ks(&mut ws, &at)?, build_ls(&mut ws, &at)?);
        let (kt, lt) = (build_ks(&mut ws, &swapped)?, build_ls(&mut ws, &swapped)?);
        let pk = explicit_p(&run.p, &run.n)?;
        let t = label(s.complement(run.d()));
        let sl = label(s);
        dump_kernels(
            dir,
            &pts,
            &[
                (format!("P_N{top}"), &pk),
                (format!("K_S{sl}_N{top}"), &ks),
                (format!("L_S{sl}_N{top}"), &ls),
                (format!("K_S{t}_N{top}"), &kt),
                (format!("L_S{t}_N{top}"), &lt),
            ],
        )?;
    }

    let results = json!({
        "S": one_based(s),
        "M": ws.table().grid(),
        "aliasing_error_estimate": ws.table().aliasing_error_estimate(),
        "n_points": pts.len(),
        "p_scale": scale,
        "rows": rows,
    });
    let report = Report::new("decompose", &run.p, config_json(args), results, checks);
    emit_json(&report, args.io.output.as_deref())?;
    Ok(report.pass)
}

pub fn certify(args: &RunArgs) -> CliResult<bool> {
    let run = Run::open("certify", args)?;
    let d = run.d();
    if d < 2 {
        return Err(CliError::Config("certify needs at least two variables".into()));
    }
    let config = SuiteConfig {
        grid: args.grid,
        ladder: run.ladder.clone(),
        point_count: args.points.count,
        radius: args.points.radius,
        seed: args.points.seed,
        tol_limit: args.tol_psd,
        tol_identity: args.tol_identity,
        tol_aliasing: args.tol_moment,
        partitions: run.partition(args)?.map(|s| vec![s]),
        gkvw: run.gkvw(args)?,
        ..SuiteConfig::default()
    };
    let mut kept = None;
    let report = run_suite_with(&run.p, &run.n, &config, |range, grid| {
        let table = run.table(range, grid)?;
        kept = Some(table.clone());
        Ok::<_, CliError>(table)
    })?;

    if let (Some(dir), Some(table)) = (&args.csv_kernels, kept) {
        let pts = PointSet::random(d, config.point_count, config.radius, config.seed)?.with_structured();
        let mut ws = Workspace::new(table);
        let top = run.top();
        let pk = explicit_p(&run.p, &run.n)?;
        let mut kernels = vec![(format!("P_N{top}"), pk)];
        let parts: Vec<VarSet> = config
            .partitions
            .clone()
            .unwrap_or_else(|| VarSet::nonempty_proper_subsets(d).collect());
        for s in parts {
            let spec = DecompositionSpec::new(run.p.clone(), run.n.clone(), s, top)?;
            kernels.push((format!("K_S{}_N{top}", label(s)), build_ks(&mut ws, &spec)?));
            kernels.push((format!("L_S{}_N{top}", label(s)), build_ls(&mut ws, &spec)?));
        }
        let refs: Vec<(String, &KernelHandle)> = kernels.iter().map(|(n, k)| (n.clone(), k)).collect();
        dump_kernels(dir, &pts, &refs)?;
    }

    let results = json!({
        "M": report.grid,
        "aliasing_error_estimate": report.aliasing_error_estimate,
        "stability_margin": report.stability_margin,
        "n_points": report.n_points,
        "ladder": report.ladder,
        "seed": report.seed,
        "radius": report.radius,
    });
    let checks = report.records.iter().map(Check::from).collect();
    let out = Report::new("certify", &run.p, config_json(args), results, checks);
    emit_json(&out, args.io.output.as_deref())?;
    Ok(out.pass)
}

pub fn sweep(args: &RunArgs) -> CliResult<bool> {
    let run = Run::open("sweep", args)?;
    let s = run.partition(args)?.unwrap_or(VarSet::singleton(0));
    let top = run.top();
    let range = MultiIndex::splat(run.d(), top as i64 - 1);
    let table = run.table(&range, run.grid_for(&range, args))?;
    let pts = run.points(args)?;
    let scale = run.p_scale(&pts)?;
    let mut checks = vec![aliasing_check(&table, args.tol_moment)];
    let mut ws = Workspace::new(table);
    let spec = DecompositionSpec::new(run.p.clone(), run.n.clone(), s, run.ladder[0])?;
    let rows = truncation_sweep(&mut ws, &spec, &run.ladder, pts.points())?;

    let residuals: Vec<f64> = rows.iter().map(|r| r.max_residual).collect();
    let last = rows.last().expect("nonempty ladder");
    checks.push(Check {
        pass: last.max_residual <= args.tol_identity && ladder_trend_ok(&residuals, scale),
        ..residual_check(
            format!("identity.ladder S={s}"),
            "P = K_S + L_T",
            "P - K_S^N - L_T^N".into(),
            pts.len(),
            last.max_residual,
            args.tol_identity,
        )
    });
    let diag_scale = last.ks_diagonal.iter().cloned().fold(1.0, f64::max);
    let contractive_tol = args.tol_psd * diag_scale;
    checks.push(Check {
        id: format!("contractive S={s} N={top}"),
        paper_anchor: "(1 - z_j w_j*) K_S >= 0 and (1 - z_j w_j*) L_S >= 0 for j in S".into(),
        kernel: "(1 - z_j w_j*) K_S^N, L_S^N".into(),
        n_points: pts.len(),
        min_eig: Some(last.min_contractive_eig),
        max_residual: None,
        tol: contractive_tol,
        pass: last.min_contractive_eig >= -contractive_tol,
    });
    let slack = TOL_EXACT * scale;
    let trend = rows
        .windows(2)
        .all(|w| w[1].min_contractive_eig.min(0.0) >= w[0].min_contractive_eig.min(0.0) - slack);
    checks.push(Check {
        id: format!("contractive.trend S={s}"),
        paper_anchor: "min eigenvalue of (1 - z_j w_j*) K_S^N, L_S^N rises toward 0".into(),
        kernel: "(1 - z_j w_j*) K_S^N, L_S^N".into(),
        n_points: pts.len(),
        min_eig: Some(last.min_contractive_eig),
        max_residual: None,
        tol: slack,
        pass: trend,
    });

    if let Some(dir) = &args.csv_kernels {
        let at = spec.at(top);
        let ks = build_ks(&mut ws, &at)?;
        let ls = build_ls(&mut ws, &at)?;
        let sl = label(s);
        dump_kernels(dir, &pts, &[(format!("K_S{sl}_N{top}"), &ks), (format!("L_S{sl}_N{top}"), &ls)])?;
    }

    let results = json!({
        "S": one_based(s),
        "M": ws.table().grid(),
        "n_points": pts.len(),
        "rows": rows.iter().map(|r| json!({
            "N": r.truncation,
            "max_residual": r.max_residual,
            "min_contractive_eig": r.min_contractive_eig,
            "ks_diagonal": r.ks_diagonal,
        })).collect::<Vec<_>>(),
    });
    let report = Report::new("sweep", &run.p, config_json(args), results, checks);
    emit_json(&report, args.io.output.as_deref())?;
    Ok(report.pass)
}
