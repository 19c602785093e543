//! Subcommand implementations.
//!
//! Shared conventions: grids are `a:b:N` with inclusive endpoints; exact
//! rationals print as `num/den`; floats print with 17 significant digits so
//! they re-parse bit-exactly; every file-writing run leaves a
//! `<out>.manifest.json` sidecar with the flags, tool version, and wall time.

use crate::{
    CliError, DensityArgs, FtDensityArgs, GridFormat, KickedArgs, MarginalArgs, MarginalKind,
    McArgs, MomentsArgs, TwArgs,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;
use wishart_smin::exact::smin_closed_form;
use wishart_smin::fixed_trace::{ft_closed_form, FtClosedForm, FtForm};
use wishart_smin::grid::{format_float, linspace, GridDensity, GridMetadata};
use wishart_smin::kicked_tops::{
    cluster_z_scores, run_ensemble, CoherentAngles, TopParams,
};
use wishart_smin::marginal::{
    marginal_ft, marginal_ft_bin_probabilities, marginal_mp, marginal_regular,
    marginal_regular_sum, marginal_scaled,
};
use wishart_smin::montecarlo::{ks_statistic, smallest_eig_samples, SampleSet};
use wishart_smin::params::{EnsembleParams, MomentOrder};
use wishart_smin::tracy_widom::{
    rescaled_ft_density, rescaled_smin_density, tw2_density_with_nodes, tw_scaling,
};

type Result<T> = std::result::Result<T, CliError>;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

/// Prints one line to stdout, treating a closed pipe (e.g. `| head`) as a
/// clean early exit instead of a panic.
fn emit(text: impl std::fmt::Display) -> Result<()> {
    let mut out = std::io::stdout();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        return Err(CliError::from(e));
    }
    Ok(())
}

/// Parses the shared grid syntax `a:b:N` (inclusive endpoints, N points).
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "grid must be a:b:N with inclusive endpoints and N points (got '{spec}')"
        )));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|e| CliError::usage(format!("grid start '{}': {e}", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|e| CliError::usage(format!("grid stop '{}': {e}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|e| CliError::usage(format!("grid point count '{}': {e}", parts[2])))?;
    Ok(linspace(a, b, count)?)
}

/// Parses an exact rational: an integer (`3`, `-2`) or a fraction (`7/20`).
fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = |e: &dyn std::fmt::Display| CliError::usage(format!("rational '{text}': {e}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|e| bad(&e))?;
        let den: BigInt = den.trim().parse().map_err(|e| bad(&e))?;
        if den.is_zero() {
            return Err(CliError::usage(format!("rational '{text}': zero denominator")));
        }
        Ok(BigRational::new(num, den))
    } else {
        let num: BigInt = text.trim().parse().map_err(|e| bad(&e))?;
        Ok(BigRational::from_integer(num))
    }
}

/// Records one file-writing run: flags, outputs, tool version, wall time.
struct Manifest {
    command: &'static str,
    flags: Value,
    extra: Vec<(&'static str, Value)>,
    start: Instant,
}

impl Manifest {
    fn new(command: &'static str, flags: Value) -> Self {
        Manifest {
            command,
            flags,
            extra: Vec::new(),
            start: Instant::now(),
        }
    }

    fn insert(&mut self, key: &'static str, value: Value) {
        self.extra.push((key, value));
    }

    /// Writes `<out>.manifest.json` next to the primary output.
    fn write(self, out: &Path) -> Result<()> {
        let mut doc = json!({
            "command": self.command,
            "flags": self.flags,
            "output": out.display().to_string(),
            "tool": {
                "name": env!("CARGO_PKG_NAME"),
                "version": env!("CARGO_PKG_VERSION"),
            },
            "wall_time_ms": self.start.elapsed().as_millis() as u64,
        });
        let map = doc.as_object_mut().expect("manifest is an object");
        for (key, value) in self.extra {
            map.insert(key.to_string(), value);
        }
        let mut path = out.as_os_str().to_owned();
        path.push(".manifest.json");
        std::fs::write(PathBuf::from(path), format!("{doc:#}\n"))?;
        Ok(())
    }
}

/// Writes a grid in the requested format.
fn write_grid(grid: &GridDensity, out: &Path, format: GridFormat) -> Result<()> {
    let text = match format {
        GridFormat::Csv => grid.to_csv_string(),
        GridFormat::Json => format!("{:#}\n", grid.to_json()),
    };
    std::fs::write(out, text)?;
    Ok(())
}

/// Validates the optional grid/out/format combination shared by `density`
/// and `ft-density` before any computation runs.
fn resolve_grid_request(
    grid: &Option<String>,
    out: &Option<PathBuf>,
) -> Result<Option<Vec<f64>>> {
    match (grid, out) {
        (Some(spec), Some(_)) => Ok(Some(parse_grid(spec)?)),
        (Some(_), None) => Err(CliError::usage("--grid requires --out for the grid file")),
        (None, Some(_)) => Err(CliError::usage("--out requires --grid (the closed form itself goes to stdout)")),
        (None, None) => Ok(None),
    }
}

fn rational_string(r: &BigRational) -> String {
    r.to_string()
}

// ---------------------------------------------------------------------------
// density / ft-density
// ---------------------------------------------------------------------------

pub fn density(args: DensityArgs) -> Result<()> {
    let xs = resolve_grid_request(&args.grid, &args.out)?;
    let exact_at = args.exact_at.as_deref().map(parse_rational).transpose()?;
    if let Some(x) = &exact_at {
        if x.is_negative() {
            return Err(CliError::usage("--exact-at must be ≥ 0 (density support)"));
        }
    }
    let params = EnsembleParams::new(args.dims.n, args.dims.m)?;
    let form = smin_closed_form(params)?;

    let mut doc = form.to_json();
    if let Some(x) = exact_at {
        // Density = (polynomial in x) · e^{−nx}: the polynomial part is an
        // exact rational; the transcendental factor is reported symbolically.
        let poly = form.density_polynomial().eval_rational(&x);
        let nx = BigRational::from_integer(BigInt::from(params.n)) * &x;
        doc.as_object_mut().expect("closed form is an object").insert(
            "exact".into(),
            json!({
                "x": rational_string(&x),
                "polynomial_value": rational_string(&poly),
                "exponential_factor": format!("exp(-{})", rational_string(&nx)),
            }),
        );
    }
    emit(format!("{doc:#}"))?;

    if let (Some(xs), Some(out)) = (xs, args.out) {
        let manifest = Manifest::new("density", density_flags(&args.dims, &args.grid, &args.exact_at, args.format));
        let grid = GridDensity::from_fn(
            xs,
            GridMetadata::new("regular-density", Some(params)),
            |x| form.eval_density(x),
        )?;
        write_grid(&grid, &out, args.format)?;
        manifest.write(&out)?;
    }
    Ok(())
}

pub fn ft_density(args: FtDensityArgs) -> Result<()> {
    let xs = resolve_grid_request(&args.grid, &args.out)?;
    let exact_at = args.exact_at.as_deref().map(parse_rational).transpose()?;
    if let Some(x) = &exact_at {
        if x.is_negative() {
            return Err(CliError::usage("--exact-at must be ≥ 0 (density support)"));
        }
    }
    let params = EnsembleParams::new(args.dims.n, args.dims.m)?;
    let form = ft_closed_form(params)?;

    let mut doc = form.to_json();
    if let Some(x) = exact_at {
        let FtForm::Density(density) = &form else {
            return Err(CliError::usage(
                "n = 1 fixed-trace law is a point mass at 1 and has no density value",
            ));
        };
        let value = ft_exact_value(density, &x);
        doc.as_object_mut().expect("closed form is an object").insert(
            "exact".into(),
            json!({
                "x": rational_string(&x),
                "value": rational_string(&value),
            }),
        );
    }
    emit(format!("{doc:#}"))?;

    if let (Some(xs), Some(out)) = (xs, args.out) {
        let manifest = Manifest::new("ft-density", density_flags(&args.dims, &args.grid, &args.exact_at, args.format));
        let grid = GridDensity::from_fn(
            xs,
            GridMetadata::new("fixed-trace-density", Some(params)),
            |x| Ok(form.eval_ft_density(x)),
        )?;
        write_grid(&grid, &out, args.format)?;
        manifest.write(&out)?;
    }
    Ok(())
}

fn density_flags(
    dims: &crate::EnsembleArgs,
    grid: &Option<String>,
    exact_at: &Option<String>,
    format: GridFormat,
) -> Value {
    json!({
        "n": dims.n,
        "m": dims.m,
        "grid": grid,
        "exact_at": exact_at,
        "format": format_name(format),
    })
}

fn format_name(format: GridFormat) -> &'static str {
    match format {
        GridFormat::Csv => "csv",
        GridFormat::Json => "json",
    }
}

/// Exact fixed-trace density at a rational point: the density is the finite
/// sum Σ_j c_j x^{p_j} (1−nx)^{q_j} with rational c_j, so the value is a
/// single rational. Zero outside the support [0, 1/n].
fn ft_exact_value(form: &FtClosedForm, x: &BigRational) -> BigRational {
    let params = form.params();
    let n = BigRational::from_integer(BigInt::from(params.n));
    let edge = BigRational::one() - &n * x;
    if x.is_negative() || edge.is_negative() {
        return BigRational::zero();
    }
    let nm = params.nm();
    let mut total = BigRational::zero();
    for (j, h) in form.base().h_terms() {
        // Γ(nm)/Γ(nm−j) = (nm−j)(nm−j+1)…(nm−1), exactly j factors.
        let mut gamma_ratio = BigInt::one();
        for t in (nm - j)..nm {
            gamma_ratio *= BigInt::from(t);
        }
        let (pow_x, pow_edge) = form.exponent_pair(j);
        let term = h.0
            * BigRational::from_integer(gamma_ratio)
            * rational_pow(x, pow_x)
            * rational_pow(&edge, pow_edge);
        total += term;
    }
    total
}

fn rational_pow(base: &BigRational, exp: u64) -> BigRational {
    let mut out = BigRational::one();
    let mut factor = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            out *= &factor;
        }
        e >>= 1;
        if e > 0 {
            factor = &factor * &factor;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

pub fn moments(args: MomentsArgs) -> Result<()> {
    let params = EnsembleParams::new(args.dims.n, args.dims.m)?;
    let order = MomentOrder::new(args.eta)?;
    let value = if args.fixed_trace {
        wishart_smin::fixed_trace::ft_moment(params, order)?
    } else {
        smin_closed_form(params)?.moment(order)?
    };
    match value.as_exact() {
        Some(rational) => emit(&rational.0)?,
        None => emit(format_float(value.to_f64()))?,
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// marginal
// ---------------------------------------------------------------------------

pub fn marginal(args: MarginalArgs) -> Result<()> {
    let xs = parse_grid(&args.grid)?;
    let params = EnsembleParams::new(args.dims.n, args.dims.m)?;
    let (kind_name, eval): (&str, Box<dyn Fn(f64) -> wishart_smin::Result<f64>>) =
        match args.kind {
            MarginalKind::Regular => (
                "marginal-regular",
                Box::new(move |x| marginal_regular(params, x)),
            ),
            MarginalKind::Sum => (
                "marginal-sum",
                Box::new(move |x| marginal_regular_sum(params, x)),
            ),
            MarginalKind::FixedTrace => (
                "marginal-fixed-trace",
                Box::new(move |x| marginal_ft(params, x)),
            ),
            MarginalKind::Scaled => (
                "marginal-scaled",
                Box::new(move |x| marginal_scaled(params, x)),
            ),
            MarginalKind::Mp => ("marginal-mp", Box::new(move |x| Ok(marginal_mp(params, x)))),
        };
    let manifest = Manifest::new(
        "marginal",
        json!({
            "n": params.n,
            "m": params.m,
            "kind": kind_name,
            "grid": args.grid,
            "format": format_name(args.format),
        }),
    );
    let grid = GridDensity::from_fn(xs, GridMetadata::new(kind_name, Some(params)), |x| eval(x))?;
    write_grid(&grid, &args.out, args.format)?;
    manifest.write(&args.out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------

pub fn mc(args: McArgs) -> Result<()> {
    let params = EnsembleParams::new(args.dims.n, args.dims.m)?;
    if args.count == 0 {
        return Err(CliError::usage("--count must be ≥ 1"));
    }
    let mut manifest = Manifest::new(
        "mc",
        json!({
            "n": params.n,
            "m": params.m,
            "count": args.count,
            "seed": args.seed,
            "fixed_trace": args.fixed_trace,
        }),
    );
    let samples = smallest_eig_samples(params, args.count, args.seed, args.fixed_trace)?;
    let ks = mc_ks(&samples)?;
    samples.write_csv(&args.out)?;
    manifest.insert("ks_statistic", json!(ks));
    manifest.write(&args.out)?;
    emit(format!(
        "mc: wrote {} samples to {} (ks={})",
        args.count,
        args.out.display(),
        format_float(ks)
    ))?;
    Ok(())
}

/// KS distance of a sample set against its own ensemble's analytic CDF.
fn mc_ks(samples: &SampleSet) -> Result<f64> {
    if samples.fixed_trace {
        let form = ft_closed_form(samples.params)?;
        Ok(ks_statistic(samples, |x| form.ft_cdf(x)))
    } else {
        let form = smin_closed_form(samples.params)?;
        Ok(ks_statistic(samples, |x| {
            form.cdf(x).expect("cdf is defined on the sample support")
        }))
    }
}

// ---------------------------------------------------------------------------
// tw
// ---------------------------------------------------------------------------

pub fn tw(args: TwArgs) -> Result<()> {
    let xs = parse_grid(&args.grid)?;
    if args.nodes < 10 {
        return Err(CliError::usage("--nodes must be ≥ 10 for a usable determinant"));
    }
    let params = EnsembleParams::new(args.dims.n, args.dims.m)?;
    let mut manifest = Manifest::new(
        "tw",
        json!({
            "n": params.n,
            "m": params.m,
            "grid": args.grid,
            "nodes": args.nodes,
        }),
    );
    let scaling = tw_scaling(params)?;
    let regular = smin_closed_form(params)?;
    let FtForm::Density(fixed) = ft_closed_form(params)? else {
        return Err(CliError::usage(
            "n = 1 has no fixed-trace density to rescale",
        ));
    };

    let mut out = String::from("s,tracy_widom,rescaled_regular,rescaled_fixed_trace\n");
    let mut sup_regular: f64 = 0.0;
    let mut sup_fixed: f64 = 0.0;
    for &s in &xs {
        let tw_density = tw2_density_with_nodes(s, args.nodes);
        let rescaled_regular = rescaled_smin_density(&regular, scaling, s)?;
        let rescaled_fixed = rescaled_ft_density(&fixed, scaling, s);
        sup_regular = sup_regular.max((tw_density - rescaled_regular).abs());
        sup_fixed = sup_fixed.max((tw_density - rescaled_fixed).abs());
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_float(s),
            format_float(tw_density),
            format_float(rescaled_regular),
            format_float(rescaled_fixed)
        ));
    }
    std::fs::write(&args.out, out)?;
    manifest.insert("sup_distance_regular", json!(sup_regular));
    manifest.insert("sup_distance_fixed_trace", json!(sup_fixed));
    manifest.write(&args.out)?;
    emit(format!(
        "tw: wrote {} grid points to {} (sup distances: regular {}, fixed-trace {})",
        xs.len(),
        args.out.display(),
        format_float(sup_regular),
        format_float(sup_fixed)
    ))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// kicked
// ---------------------------------------------------------------------------

pub fn kicked(args: KickedArgs) -> Result<()> {
    let params = TopParams::new(args.j1, args.j2, args.k1, args.k2, args.eps)?;
    let angles1 = CoherentAngles::new(args.theta1, args.phi1)?;
    let angles2 = CoherentAngles::new(args.theta2, args.phi2)?;
    if args.count == 0 || args.stride == 0 {
        return Err(CliError::usage("--count and --stride must be ≥ 1"));
    }
    let mut manifest = Manifest::new(
        "kicked",
        json!({
            "j1": args.j1, "j2": args.j2,
            "k1": args.k1, "k2": args.k2, "eps": args.eps,
            "theta1": args.theta1, "phi1": args.phi1,
            "theta2": args.theta2, "phi2": args.phi2,
            "skip": args.skip, "stride": args.stride, "count": args.count,
            "seedless": args.seedless,
        }),
    );

    let run = run_ensemble(&params, angles1, angles2, args.skip, args.stride, args.count)?;
    let ensemble = params.ensemble();

    // Spectra file: one descending Schmidt spectrum per line.
    let n1 = params.n1() as usize;
    let mut file = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(file, "# n1: {}", params.n1())?;
    writeln!(file, "# n2: {}", params.n2())?;
    let header: Vec<String> = (1..=n1).map(|i| format!("mu_{i}")).collect();
    writeln!(file, "{}", header.join(","))?;
    for spectrum in &run.spectra {
        let row: Vec<String> = spectrum.mu.iter().map(|&v| format_float(v)).collect();
        writeln!(file, "{}", row.join(","))?;
    }
    file.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;

    // Fit summary against the fixed-trace predictions.
    let form = ft_closed_form(ensemble)?;
    let smallest = SampleSet {
        values: run.smallest_values(),
        params: ensemble,
        fixed_trace: true,
        seed: 0,
        count: args.count,
    };
    let ks = ks_statistic(&smallest, |x| form.ft_cdf(x));

    // Pooled-histogram fit: cluster-robust z-scores on 14 bins covering the
    // bulk of the smallest-eigenvalue law (≈3/N1, clamped to the support).
    let z_hi = (3.08 / f64::from(params.n1())).min(1.0);
    let max_z = if args.count >= 2 {
        let edges = linspace(0.0, z_hi, 15)?;
        let probs = marginal_ft_bin_probabilities(ensemble, &edges)?;
        let zs = cluster_z_scores(&run.spectra, &edges, &probs)?;
        Some(zs.iter().fold(0.0f64, |acc, z| acc.max(z.abs())))
    } else {
        None
    };

    let summary = json!({
        "n1": params.n1(),
        "n2": params.n2(),
        "count": args.count,
        "renormalizations": run.renormalizations,
        "ks_smallest_vs_ft": ks,
        "histogram_bins": 14,
        "histogram_hi": z_hi,
        "max_cluster_z": max_z,
    });
    emit(format!("{summary:#}"))?;
    manifest.insert("summary", summary);
    manifest.write(&args.out)?;
    Ok(())
}
