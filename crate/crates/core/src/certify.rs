//! PSD certification of sampled kernel matrices and the per-polynomial
//! certificate suite.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::{
    agler_pair, decompose, exact_difference_identity, gkvw_pair, max_abs, DecompositionSpec,
    KernelPair, Workspace,
};
use crate::error::{Error, Result};
use crate::gram::{build_gram, reproducing_property_residual};
use crate::kernel::{KernelHandle, Point};
use crate::lattice::{check_dim, contains, enumerate, IndexSetExpr, MultiIndex, VarSet};
use crate::linalg::hermitian_eigenvalues;
use crate::moments::{
    compute_moments, default_grid, ptilde_orthogonality_residual, ptilde_range, MomentTable,
};
use crate::poly::{check_stability_default, torus_extremes, StablePolynomial};

#[derive(Clone, Debug, PartialEq)]
pub enum PointMode {
    Random { count: usize, seed: u64 },
    Explicit,
}

/// Points of the open polydisk with `max_j |z_j| <= radius < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    mode: PointMode,
    radius: f64,
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("radius {radius} is not in (0, 1)")))
    }
}

impl PointSet {
    /// `count` points whose coordinates are uniform on the disk of the given
    /// radius.
    pub fn random(d: usize, count: usize, radius: f64, seed: u64) -> Result<Self> {
        check_radius(radius)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let r = radius * libm::sqrt(rng.gen::<f64>());
                        Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())
                    })
                    .collect()
            })
            .collect();
        Ok(PointSet {
            points,
            mode: PointMode::Random { count, seed },
            radius,
        })
    }

    /// Prepends the origin and, when the radius allows it, `(0.5, ..., 0.5)`.
    pub fn with_structured(mut self) -> Self {
        let d = self.points.first().map(|z| z.len());
        if let Some(d) = d {
            let mut extra = vec![vec![Complex64::new(0.0, 0.0); d]];
            if self.radius >= 0.5 {
                extra.push(vec![Complex64::new(0.5, 0.0); d]);
            }
            extra.append(&mut self.points);
            self.points = extra;
        }
        self
    }

    /// Twelve seeded random points plus the structured points.
    pub fn default_set(d: usize, radius: f64, seed: u64) -> Result<Self> {
        Ok(PointSet::random(d, 12, radius, seed)?.with_structured())
    }

    pub fn explicit(points: Vec<Point>, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        let d = points.first().map(|z| z.len()).unwrap_or(0);
        for z in &points {
            check_dim(d, z.len())?;
            if z.iter().any(|w| w.norm() > radius) {
                return Err(Error::OutsideDomain);
            }
        }
        Ok(PointSet {
            points,
            mode: PointMode::Explicit,
            radius,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn mode(&self) -> &PointMode {
        &self.mode
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One checked claim.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    /// The identity or inequality being checked, as a formula.
    pub anchor: String,
    pub kernel: String,
    pub n_points: usize,
    pub min_eig: Option<f64>,
    pub max_residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn residual(id: String, anchor: &str, kernel: String, n_points: usize, value: f64, tol: f64) -> Self {
        CheckRecord {
            id,
            anchor: anchor.into(),
            kernel,
            n_points,
            min_eig: None,
            max_residual: Some(value),
            pass: value <= tol,
            tol,
        }
    }
}

/// Every ladder step cuts the residual at least tenfold, except steps that
/// land below the floating-point floor `1e-12 * scale`.
pub fn ladder_trend_ok(residuals: &[f64], scale: f64) -> bool {
    let floor = 1e-12 * scale;
    residuals.windows(2).all(|w| w[1] <= floor || w[0] >= 10.0 * w[1])
}

pub fn kernel_matrix(k: &KernelHandle, pts: &PointSet) -> Result<DMatrix<Complex64>> {
    k.matrix(pts.points())
}

/// Spectrum endpoints of a Hermitian matrix and the verdict
/// `λ_min >= -tol · max(1, λ_max)`.
fn psd_verdict(m: &DMatrix<Complex64>, tol: f64) -> (f64, f64, bool) {
    let ev = hermitian_eigenvalues(m);
    let lo = ev.first().copied().unwrap_or(0.0);
    let hi = ev.last().copied().unwrap_or(0.0);
    (lo, hi, lo >= -tol * hi.max(1.0))
}

fn psd_record(id: String, anchor: &str, k: &KernelHandle, pts: &PointSet, tol: f64) -> Result<CheckRecord> {
    let m = kernel_matrix(k, pts)?;
    let (lo, _, pass) = psd_verdict(&m, tol);
    Ok(CheckRecord {
        id,
        anchor: anchor.into(),
        kernel: k.describe(),
        n_points: pts.len(),
        min_eig: Some(lo),
        max_residual: None,
        tol,
        pass,
    })
}

pub fn check_psd(k: &KernelHandle, pts: &PointSet, tol: f64) -> Result<CheckRecord> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    psd_record("psd".into(), "K >= 0", k, pts, tol)
}

/// PSD checks of `(1 - z_j conj ζ_j) K` for every `j ∈ S`.
pub fn check_contractive(k: &KernelHandle, s: VarSet, pts: &PointSet, tol: f64) -> Result<Vec<CheckRecord>> {
    if s.is_empty() {
        return Err(Error::InvalidPartition("contractivity needs a nonempty variable set"));
    }
    s.iter()
        .map(|j| {
            psd_record(
                format!("contractive j={}", j + 1),
                "(1 - z_j conj w_j) K >= 0",
                &KernelHandle::shift(j, k.clone()),
                pts,
                tol,
            )
        })
        .collect()
}

/// PSD check of `K1 - K2`.
pub fn check_ordering(k1: &KernelHandle, k2: &KernelHandle, pts: &PointSet, tol: f64) -> Result<CheckRecord> {
    psd_record(
        "ordering".into(),
        "K1 - K2 >= 0",
        &KernelHandle::difference(k1.clone(), k2.clone()),
        pts,
        tol,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    /// Moment grid; the default grid for the needed range when `None`.
    pub grid: Option<usize>,
    pub ladder: Vec<usize>,
    pub point_count: usize,
    pub radius: f64,
    pub seed: u64,
    /// Tolerance for claims that hold exactly at every truncation level.
    pub tol_exact: f64,
    /// Eigenvalue tolerance for claims that hold in the limit.
    pub tol_limit: f64,
    /// Bound on the decomposition and pair identity residuals at the top level.
    pub tol_identity: f64,
    /// Bound on the p̃-orthogonality residual.
    pub tol_orthogonality: f64,
    /// Bound on the moment grid-doubling estimate.
    pub tol_aliasing: f64,
    /// Partitions to certify (zero-based `S`); all nonempty proper subsets
    /// when `None`.
    pub partitions: Option<Vec<VarSet>>,
    /// Zero-based `(j, k)` for the GKVW pair.
    pub gkvw: (usize, usize),
    /// Torus grid for the Gram eigenvalue bounds; 512 for `d <= 2`, 128 above.
    pub sandwich_grid: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            grid: None,
            ladder: vec![4, 8, 16],
            point_count: 12,
            radius: 0.6,
            seed: 42,
            tol_exact: 1e-9,
            tol_limit: 1e-6,
            tol_identity: 1e-5,
            tol_orthogonality: 1e-8,
            tol_aliasing: 1e-10,
            partitions: None,
            gkvw: (0, 1),
            sandwich_grid: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self, d: usize) -> Result<()> {
        check_radius(self.radius)?;
        if self.ladder.is_empty() || self.ladder.windows(2).any(|w| w[0] >= w[1]) || self.ladder[0] == 0 {
            return Err(Error::InvalidParameter("ladder must be positive and strictly increasing".into()));
        }
        if let Some(m) = self.grid {
            if !m.is_power_of_two() {
                return Err(Error::InvalidGrid { grid: m, reason: "must be a power of two" });
            }
        }
        let (j, k) = self.gkvw;
        if j == k || j >= d || k >= d {
            return Err(Error::InvalidParameter("GKVW indices must be distinct variables".into()));
        }
        if let Some(parts) = &self.partitions {
            for s in parts {
                if s.is_empty() || s.span() > d || *s == VarSet::full(d) {
                    return Err(Error::InvalidPartition("S must be a nonempty proper subset"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub records: Vec<CheckRecord>,
    pub pass: bool,
    pub grid: Option<usize>,
    pub ladder: Vec<usize>,
    pub seed: u64,
    pub radius: f64,
    pub n_points: usize,
    pub aliasing_error_estimate: Option<f64>,
    pub stability_margin: f64,
}

/// Runs every check for `p` with degree bound `n`. An unstable `p` yields a
/// report holding only the failed stability record.
pub fn run_suite(p: &StablePolynomial, n: &MultiIndex, config: &SuiteConfig) -> Result<CertificateReport> {
    run_suite_with(p, n, config, |range, grid| compute_moments(p, range, grid))
}

/// [`run_suite`] with the moment table supplied by `moments(range, grid)`,
/// e.g. from a disk cache. The table must belong to `p` and cover `range`.
pub fn run_suite_with<F, E>(
    p: &StablePolynomial,
    n: &MultiIndex,
    config: &SuiteConfig,
    moments: F,
) -> core::result::Result<CertificateReport, E>
where
    F: FnOnce(&MultiIndex, usize) -> core::result::Result<MomentTable, E>,
    E: From<Error>,
{
    let d = p.dim();
    check_dim(d, n.dim())?;
    if d < 2 {
        return Err(Error::InvalidPartition("the suite needs at least two variables").into());
    }
    config.validate(d)?;
    p.reflect(n)?;

    let verdict = check_stability_default(p);
    let mut records = vec![CheckRecord {
        id: "stability".into(),
        anchor: "p has no zeros on the closed polydisk".into(),
        kernel: "p".into(),
        n_points: verdict.grid,
        min_eig: None,
        max_residual: None,
        tol: verdict.threshold,
        pass: verdict.stable,
    }];
    let mut report = CertificateReport {
        records: Vec::new(),
        pass: false,
        grid: None,
        ladder: config.ladder.clone(),
        seed: config.seed,
        radius: config.radius,
        n_points: 0,
        aliasing_error_estimate: None,
        stability_margin: verdict.margin,
    };
    if !verdict.stable {
        report.records = records;
        return Ok(report);
    }

    let top = *config.ladder.last().expect("validated");
    let alpha_box = MultiIndex::new(n.entries().iter().map(|&v| (2 * v).max(1)).collect());
    let beta_box = MultiIndex::new(n.entries().iter().map(|&v| v + 1).collect());
    let needed = ptilde_range(n, &alpha_box, &beta_box);
    let range = MultiIndex::new((0..d).map(|j| needed[j].max(top as i64 - 1)).collect());
    let grid = match config.grid {
        Some(m) => m,
        None => default_grid(&range).max((p.degree().max_entry() as usize + 1).next_power_of_two()),
    };
    let table = moments(&range, grid)?;
    if table.poly_hash() != p.identity_hash() || !table.covers(&range) {
        return Err(Error::InvalidParameter("supplied moment table does not match the suite".into()).into());
    }
    report.grid = Some(table.grid());
    report.aliasing_error_estimate = Some(table.aliasing_error_estimate());
    records.push(CheckRecord::residual(
        "moments.aliasing".into(),
        "|C(M) - C(2M)| small",
        format!("C_gamma, M={grid}"),
        0,
        table.aliasing_error_estimate(),
        config.tol_aliasing,
    ));
    records.push(CheckRecord::residual(
        "moments.ptilde_orthogonality".into(),
        "<z^a, z^b p~> = 0 for a in B",
        "C_gamma".into(),
        0,
        ptilde_orthogonality_residual(p, n, &table, &alpha_box, &beta_box)?,
        config.tol_orthogonality,
    ));

    let pts = PointSet::random(d, config.point_count, config.radius, config.seed)?.with_structured();
    report.n_points = pts.len();
    let mut ws = Workspace::new(table);

    records.push(sandwich_record(&mut ws, p, n, top, config)?);
    records.extend(lattice_records(n, top));

    let partitions: Vec<VarSet> = match &config.partitions {
        Some(v) => v.clone(),
        None => VarSet::nonempty_proper_subsets(d).collect(),
    };
    let p_kernel = crate::kernel::explicit_p(p, n)?;
    let p_scale = max_abs(&kernel_matrix(&p_kernel, &pts)?).max(1.0);
    for &s in &partitions {
        records.extend(partition_records(&mut ws, p, n, s, &pts, p_scale, config)?);
    }
    records.extend(ordering_records(&mut ws, n, &pts, config)?);

    let first = DecompositionSpec::new(p.clone(), n.clone(), partitions[0], top)?;
    records.push(reproducing_record(&mut ws, &first, &pts, config)?);
    records.push(extremal_record(&mut ws, &first, &pts, config)?);

    if d == 2 {
        let pair = agler_pair(&mut ws, p, n, top, pts.points())?;
        records.extend(pair_records("agler", "1 - f f* = sum_j (1 - z_j w_j*) G_j", &pair, &pts, top, config)?);
    }
    let (j, k) = config.gkvw;
    let pair = gkvw_pair(&mut ws, p, n, j, k, top, pts.points())?;
    let label = format!("gkvw j={} k={}", j + 1, k + 1);
    records.extend(pair_records(
        &label,
        "1 - f f* = prod_{r!=j}(1 - z_r w_r*) K + prod_{r!=k}(1 - z_r w_r*) K'",
        &pair,
        &pts,
        top,
        config,
    )?);

    report.pass = records.iter().all(|r| r.pass);
    report.records = records;
    Ok(report)
}

fn sandwich_record(
    ws: &mut Workspace,
    p: &StablePolynomial,
    n: &MultiIndex,
    top: usize,
    config: &SuiteConfig,
) -> Result<CheckRecord> {
    let d = p.dim();
    let torus = config.sandwich_grid.unwrap_or(if d <= 2 { 512 } else { 128 });
    let (lo, hi) = torus_extremes(p, torus);
    let indices = enumerate(&IndexSetExpr::BSet(n.clone()), &MultiIndex::splat(d, top as i64))?;
    let gram = build_gram(ws.table(), &indices)?;
    let ev = gram.eigenvalues();
    let (emin, emax) = (ev[0], ev[ev.len() - 1]);
    let (floor, ceil) = (1.0 / (hi * hi), 1.0 / (lo * lo));
    let violation = (floor - emin).max(emax - ceil).max(0.0);
    Ok(CheckRecord {
        id: format!("gram.sandwich N={top}"),
        anchor: "sup|p|^-2 <= C_B <= inf|p|^-2".into(),
        kernel: format!("Gram[B, {}]", gram.size()),
        n_points: torus,
        min_eig: Some(emin),
        max_residual: Some(violation),
        tol: config.tol_limit,
        pass: violation <= config.tol_limit,
    })
}

/// `z_j X_T ⊂ X_T` for `j ∉ T`, checked inside the box.
fn lattice_records(n: &MultiIndex, top: usize) -> Vec<CheckRecord> {
    let d = n.dim();
    let bx = MultiIndex::splat(d, top as i64);
    VarSet::nonempty_proper_subsets(d)
        .map(|t| {
            let expr = IndexSetExpr::XUnion(t, n.clone());
            let members = enumerate(&expr, &bx).unwrap_or_default();
            let mut bad = 0usize;
            for alpha in &members {
                for j in t.complement(d).iter() {
                    let shifted = alpha.with_entry(j, alpha[j] + 1);
                    if !contains(&expr, &shifted).unwrap_or(false) {
                        bad += 1;
                    }
                }
            }
            CheckRecord::residual(
                format!("lattice.shift_invariance T={t}"),
                "z_j X_T in X_T for j not in T",
                format!("X_T, {} indices", members.len()),
                0,
                bad as f64,
                0.0,
            )
        })
        .collect()
}

fn partition_records(
    ws: &mut Workspace,
    p: &StablePolynomial,
    n: &MultiIndex,
    s: VarSet,
    pts: &PointSet,
    p_scale: f64,
    config: &SuiteConfig,
) -> Result<Vec<CheckRecord>> {
    let ladder = &config.ladder;
    let top = *ladder.last().expect("validated");
    let base = DecompositionSpec::new(p.clone(), n.clone(), s, top)?;
    let mut out = Vec::new();
    let mut residuals = Vec::new();
    let mut contractive: Vec<f64> = Vec::new();
    let mut diagonals: Vec<Vec<f64>> = Vec::new();
    let mut scale = 1.0f64;

    for &level in ladder {
        let spec = base.at(level);
        let result = decompose(ws, &spec, pts.points())?;
        residuals.push(result.max_residual);

        let ks = kernel_matrix(&result.k_s, pts)?;
        scale = scale.max(max_abs(&ks));
        diagonals.push((0..pts.len()).map(|i| ks[(i, i)].re).collect());

        let diff = exact_difference_identity(ws, &spec, pts.points())?;
        out.push(CheckRecord::residual(
            format!("identity.difference S={s} N={level}"),
            "K_S - L_S = K_T - L_T",
            "(K_S - L_S) - (K_T - L_T)".into(),
            pts.len(),
            diff,
            config.tol_exact * scale,
        ));
        for (name, k) in [("K_S", &result.k_s), ("L_S", &result.l_s)] {
            out.push(psd_record(
                format!("psd.{name} S={s} N={level}"),
                "Gram-subspace kernels are PSD",
                k,
                pts,
                config.tol_exact,
            )?);
        }
        out.push(psd_record(
            format!("ordering.P_minus_K_S S={s} N={level}"),
            "P - K_S^N >= 0",
            &KernelHandle::difference(result.p_kernel.clone(), result.k_s.clone()),
            pts,
            config.tol_exact,
        )?);

        let mut lowest = f64::INFINITY;
        for j in s.iter() {
            for (name, k) in [("K_S", &result.k_s), ("L_S", &result.l_s)] {
                let shifted = KernelHandle::shift(j, k.clone());
                let m = kernel_matrix(&shifted, pts)?;
                let (lo, _, _) = psd_verdict(&m, config.tol_limit);
                lowest = lowest.min(lo);
                if level == top {
                    out.push(psd_record(
                        format!("contractive.{name} S={s} j={} N={level}", j + 1),
                        "(1 - z_j w_j*) K_S >= 0 and (1 - z_j w_j*) L_S >= 0 for j in S",
                        &shifted,
                        pts,
                        config.tol_limit,
                    )?);
                }
            }
        }
        contractive.push(lowest);
    }

    let trend_ok = ladder_trend_ok(&residuals, p_scale);
    let last = *residuals.last().expect("nonempty ladder");
    out.push(CheckRecord {
        id: format!("identity.ladder S={s}"),
        anchor: "P = K_S + L_T".into(),
        kernel: "P - K_S^N - L_T^N".into(),
        n_points: pts.len(),
        min_eig: None,
        max_residual: Some(last),
        tol: config.tol_identity,
        pass: last <= config.tol_identity && trend_ok,
    });

    let slack = config.tol_exact * scale;
    let trend = contractive
        .windows(2)
        .all(|w| w[1].min(0.0) >= w[0].min(0.0) - slack);
    out.push(CheckRecord {
        id: format!("contractive.trend S={s}"),
        anchor: "min eigenvalue of (1 - z_j w_j*) K_S^N, L_S^N rises toward 0".into(),
        kernel: "(1 - z_j w_j*) K_S^N, L_S^N".into(),
        n_points: pts.len(),
        min_eig: contractive.last().copied(),
        max_residual: None,
        tol: slack,
        pass: trend,
    });

    let monotone = diagonals
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).max(0.0)).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    out.push(CheckRecord::residual(
        format!("ladder.monotone S={s}"),
        "K_S^N(w,w) nondecreasing in N",
        "K_S^N".into(),
        pts.len(),
        monotone,
        config.tol_exact * scale,
    ));
    Ok(out)
}

/// `K_S^N - K_{S'}^N >= 0` for every nonempty `S ⊊ S'`, `S'` possibly the
/// full set, at every ladder level.
fn ordering_records(
    ws: &mut Workspace,
    n: &MultiIndex,
    pts: &PointSet,
    config: &SuiteConfig,
) -> Result<Vec<CheckRecord>> {
    let d = n.dim();
    let full = VarSet::full(d);
    let mut out = Vec::new();
    for &level in &config.ladder {
        let subsets: Vec<VarSet> = VarSet::nonempty_proper_subsets(d).chain([full]).collect();
        for &s in &subsets {
            if s == full {
                continue;
            }
            for &bigger in &subsets {
                if bigger == s || !s.is_subset(bigger) {
                    continue;
                }
                let k1 = ws.x_union(s.complement(d), n, level)?;
                let k2 = ws.x_union(bigger.complement(d), n, level)?;
                let mut rec = check_ordering(&k1, &k2, pts, config.tol_exact)?;
                rec.id = format!("ordering S={s} S'={bigger} N={level}");
                rec.anchor = "K_S >= K_S' for S in S'".into();
                out.push(rec);
            }
        }
    }
    Ok(out)
}

fn reproducing_record(
    ws: &mut Workspace,
    spec: &DecompositionSpec,
    pts: &PointSet,
    config: &SuiteConfig,
) -> Result<CheckRecord> {
    let indices = enumerate(
        &IndexSetExpr::XUnion(spec.t(), spec.n.clone()),
        &MultiIndex::splat(spec.dim(), spec.truncation as i64),
    )?;
    let gram = build_gram(ws.table(), &indices)?;
    let mut worst = 0.0f64;
    for z in pts.points() {
        worst = worst.max(reproducing_property_residual(&gram, ws.table(), z)?);
    }
    Ok(CheckRecord::residual(
        format!("gram.reproducing S={} N={}", spec.s, spec.truncation),
        "<g, K_w> = g(w)",
        format!("Gram[{}]", gram.size()),
        pts.len(),
        worst,
        config.tol_exact,
    ))
}

/// `K - ε K(·,η) K(η,·)` is PSD at `ε = 1/K(η,η)` and not beyond.
fn extremal_record(
    ws: &mut Workspace,
    spec: &DecompositionSpec,
    pts: &PointSet,
    config: &SuiteConfig,
) -> Result<CheckRecord> {
    let k = crate::decomp::build_ks(ws, spec)?;
    let m = kernel_matrix(&k, pts)?;
    let eta = pts.len() - 1;
    let keta = m[(eta, eta)].re;
    let update = |eps: f64| {
        DMatrix::from_fn(m.nrows(), m.ncols(), |a, b| m[(a, b)] - m[(a, eta)] * m[(eta, b)] * eps)
    };
    let (lo, _, ok) = psd_verdict(&update(1.0 / keta), config.tol_exact);
    let (_, _, beyond) = psd_verdict(&update(1.01 / keta), config.tol_exact);
    Ok(CheckRecord {
        id: format!("extremal.rank_one S={} N={}", spec.s, spec.truncation),
        anchor: "largest eps with K - eps K_eta K_eta* >= 0 is 1/K(eta,eta)".into(),
        kernel: k.describe(),
        n_points: pts.len(),
        min_eig: Some(lo),
        max_residual: None,
        tol: config.tol_exact,
        pass: ok && !beyond,
    })
}

fn pair_records(
    label: &str,
    anchor: &str,
    pair: &KernelPair,
    pts: &PointSet,
    top: usize,
    config: &SuiteConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = vec![CheckRecord::residual(
        format!("{label} identity N={top}"),
        anchor,
        format!("{}, {}", pair.first.describe(), pair.second.describe()),
        pts.len(),
        pair.residual,
        config.tol_identity,
    )];
    for (i, k) in [&pair.first, &pair.second].into_iter().enumerate() {
        out.push(psd_record(
            format!("{label} member{} psd N={top}", i + 1),
            anchor,
            k,
            pts,
            config.tol_limit,
        )?);
    }
    Ok(out)
}
