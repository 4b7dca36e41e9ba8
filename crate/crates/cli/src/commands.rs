use crate::args::{ConvergeArgs, HellingerArgs, KernelEvalArgs, Lattice, OrbitalArgs, SampleArgs, TailsArgs};
use crate::output::{num, opt, Report, Table};
use besselforge::kernels::{
    evaluate_lattice, linspace, sup_distance_on_lattice, tail_mass, zero_mass, Family, KernelSpec,
};
use besselforge::operators::{conjugate_sqrt_f, h_space_basis, limit_projector, trace_norm, weighted_projector};
use besselforge::pickrell::kakutani_scan;
use besselforge::sampling::{
    empirical_intensity, enumeration_chi_square, ginibre, orbital_average, real_inner, CMatrix, Configuration,
    DppSampler, RngState,
};
use besselforge::specfun::GridSpec;
use besselforge::{Error, Result};
use num_complex::Complex64;
use serde_json::{json, Value};

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn lattice_json(l: &Lattice) -> Value {
    json!({ "lo": l.lo, "hi": l.hi, "count": l.count })
}

fn grid_json(g: &GridSpec) -> Value {
    json!({ "x_min": g.x_min, "x_max": g.x_max, "panels_per_decade": g.panels_per_decade, "k": g.k })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

pub fn kernel_eval(a: &KernelEvalArgs) -> Result<Report> {
    let family: Family = a.family.parse()?;
    let n = match &a.n {
        Some(list) => Some(list.single("n").map_err(usage)?),
        None => None,
    };
    let spec = KernelSpec::new(family, n, a.s)?;
    let pts = linspace(a.lattice.lo, a.lattice.hi, a.lattice.count);
    let values = evaluate_lattice(&spec, &pts, &pts)?;
    let mut table = Table::new(&["x1", "x2", "value"]);
    let mut rows = Vec::with_capacity(values.len());
    for (i, &x1) in pts.iter().enumerate() {
        for (j, &x2) in pts.iter().enumerate() {
            let v = values[i * pts.len() + j];
            table.push(vec![num(x1), num(x2), num(v)]);
            rows.push(json!([x1, x2, v]));
        }
    }
    let summary = json!({
        "command": "kernel-eval",
        "family": family.name(),
        "n": spec.n,
        "s": a.s,
        "lattice": lattice_json(&a.lattice),
        "rows": rows,
    });
    Ok(Report { table, summary, failed_claim: None })
}

pub fn converge(a: &ConvergeArgs) -> Result<Report> {
    let ns = &a.n.0;
    if !strictly_increasing(ns) {
        return Err(usage(format!("--n must be strictly increasing, got {ns:?}")));
    }
    if !(a.beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {}", a.beta)));
    }
    let with_sup = a.s > -1.0;
    let limit_kernel = if with_sup { Some(KernelSpec::modified_bessel(a.s)?) } else { None };
    let (grid, limit_op) = if a.kernel_only || ns.is_empty() {
        (None, None)
    } else {
        let g = a.grid.build()?;
        let p = limit_projector(a.s, a.beta, &g)?;
        (Some(g), Some(p))
    };
    let mut sup = Vec::new();
    let mut local = Vec::new();
    let mut sqrt_f = Vec::new();
    for &n in ns {
        if let Some(lk) = &limit_kernel {
            let k = KernelSpec::rescaled(n, a.s)?;
            sup.push(sup_distance_on_lattice(&k, lk, a.lattice.lo, a.lattice.hi, a.lattice.count)?);
        }
        if let (Some(g), Some(lp)) = (&grid, &limit_op) {
            let diff = weighted_projector(n, a.s, a.beta, g)?.sub(lp)?;
            local.push(trace_norm(&diff.restrict(a.window.lo, a.window.hi)?));
            sqrt_f.push(trace_norm(&conjugate_sqrt_f(&diff)));
        }
    }
    let mut table = Table::new(&["n", "sup_lattice", "local_trace_norm", "sqrt_f_trace_norm"]);
    let mut rows = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        let (s1, s2, s3) = (sup.get(i).copied(), local.get(i).copied(), sqrt_f.get(i).copied());
        table.push(vec![n.to_string(), opt(s1), opt(s2), opt(s3)]);
        rows.push(json!({ "n": n, "sup_lattice": s1, "local_trace_norm": s2, "sqrt_f_trace_norm": s3 }));
    }
    let claim = |v: &Vec<f64>, present: bool| present.then(|| strictly_decreasing(v));
    let monotone = [
        ("sup_lattice", claim(&sup, with_sup)),
        ("local_trace_norm", claim(&local, grid.is_some())),
        ("sqrt_f_trace_norm", claim(&sqrt_f, grid.is_some())),
    ];
    let failed: Vec<&str> = monotone.iter().filter(|m| m.1 == Some(false)).map(|m| m.0).collect();
    let summary = json!({
        "command": "converge",
        "s": a.s,
        "beta": a.beta,
        "lattice": lattice_json(&a.lattice),
        "grid": grid_json(&a.grid),
        "window": { "lo": a.window.lo, "hi": a.window.hi },
        "rows": rows,
        "monotone": monotone.iter().map(|m| (m.0.to_string(), json!(m.1))).collect::<serde_json::Map<_, _>>(),
        "all_monotone": failed.is_empty(),
    });
    let failed_claim = (!failed.is_empty()).then(|| format!("not strictly decreasing in n: {}", failed.join(", ")));
    Ok(Report { table, summary, failed_claim })
}

pub fn tails(a: &TailsArgs) -> Result<Report> {
    let specs: Vec<(usize, KernelSpec<f64>)> =
        a.n.0.iter().map(|&n| Ok((n, KernelSpec::rescaled(n, a.s)?))).collect::<Result<_>>()?;
    let mut table = Table::new(&["quantity", "n", "cutoff", "value", "remainder", "total", "resolution_gap"]);
    let mut sections = serde_json::Map::new();
    for (quantity, cutoffs) in [("tail", &a.r.0), ("zero", &a.delta.0)] {
        let mut sups = Vec::new();
        for &c in cutoffs {
            let mut best: Option<(usize, f64)> = None;
            for (n, spec) in &specs {
                let m = if quantity == "tail" { tail_mass(spec, c, &a.grid)? } else { zero_mass(spec, c, &a.grid)? };
                let total = m.total();
                table.push(vec![
                    quantity.into(),
                    n.to_string(),
                    num(c),
                    num(m.value),
                    num(m.remainder),
                    num(total),
                    num(m.resolution_gap()),
                ]);
                if best.is_none_or(|b| total > b.1) {
                    best = Some((*n, total));
                }
            }
            if let Some((n, total)) = best {
                table.push(vec![quantity.into(), "sup".into(), num(c), String::new(), String::new(), num(total), String::new()]);
                sups.push(json!({ "cutoff": c, "sup_total": total, "argmax_n": n }));
            }
        }
        sections.insert(quantity.into(), Value::Array(sups));
    }
    let summary = json!({
        "command": "tails",
        "s": a.s,
        "n": a.n.0,
        "grid": grid_json(&a.grid),
        "tail": sections["tail"],
        "zero": sections["zero"],
    });
    Ok(Report { table, summary, failed_claim: None })
}

fn binomial(m: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

pub fn sample(a: &SampleArgs) -> Result<(Report, Vec<Configuration>)> {
    let rank = a.n.single("n").map_err(usage)?;
    if a.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    if !(a.bins.lo > 0.0) {
        return Err(usage("histogram bins are geometric and need lo > 0"));
    }
    let grid = a.grid.build()?;
    let sampler = DppSampler::new(&h_space_basis(rank, a.s, &grid, true)?)?;
    let atoms = sampler.sample_many_atoms(a.samples, &RngState::new(a.seed))?;
    let configs: Vec<Configuration> =
        atoms.iter().map(|set| Configuration::new(set.iter().map(|&i| grid.nodes[i]).collect())).collect();
    let ratio = a.bins.hi / a.bins.lo;
    let edges: Vec<f64> = (0..=a.bins.count)
        .map(|k| if k == a.bins.count { a.bins.hi } else { a.bins.lo * ratio.powf(k as f64 / a.bins.count as f64) })
        .collect();
    let theory = sampler.theory_intensity(&edges);
    let mut bins = empirical_intensity(&configs, &edges)?;
    for (b, t) in bins.iter_mut().zip(&theory) {
        b.theory = Some(*t);
    }
    let mut table = Table::new(&["bin_lo", "bin_hi", "mean_count", "stderr", "theory"]);
    for b in &bins {
        table.push(vec![num(b.lo), num(b.hi), num(b.mean_count), num(b.stderr), opt(b.theory)]);
    }
    let occupied = bins.iter().filter(|b| b.mean_count > 0.0).count();
    let within = bins.iter().filter(|b| b.mean_count > 0.0 && b.within(3.0)).count();
    let chi = if grid.len() <= 24 && binomial(grid.len(), rank) <= 10_000.0 {
        Some(enumeration_chi_square(&sampler, &atoms)?)
    } else {
        None
    };
    let summary = json!({
        "command": "sample",
        "rank": rank,
        "s": a.s,
        "grid": grid_json(&a.grid),
        "atoms": grid.len(),
        "samples": a.samples,
        "seed": a.seed,
        "exact_cardinality": configs.iter().all(|c| c.len() == rank),
        "occupied_bins": occupied,
        "bins_within_3_sigma": within,
        "bins": bins,
        "chi_square": chi,
    });
    Ok((Report { table, summary, failed_claim: None }, configs))
}

pub fn hellinger(a: &HellingerArgs) -> Result<Report> {
    let n_max = a.n.single("n").map_err(usage)?;
    let r = kakutani_scan(a.s, a.s2, n_max)?;
    let mut table = Table::new(&["n", "hel", "one_minus_hel", "partial_sum"]);
    for row in &r.per_n {
        table.push(vec![row.n.to_string(), num(row.hel), num(row.one_minus_hel), num(row.partial_sum)]);
    }
    let summary = json!({
        "command": "hellinger",
        "s": r.s,
        "s2": r.s2,
        "n_min": r.n_min,
        "n_max": r.n_max,
        "slope": r.slope,
        "r_squared": r.r_squared,
        "fitted_c": r.fitted_c,
        "candidate_difference": r.candidate_difference,
        "candidate_sum": r.candidate_sum,
        "verdict": r.verdict.name(),
    });
    Ok(Report { table, summary, failed_claim: None })
}

/// Seed of the Monte Carlo run for sweep point `idx` at size `n`.
fn point_seed(seed: u64, n: usize, idx: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((n as u64) << 32) ^ idx as u64
}

pub fn orbital(a: &OrbitalArgs) -> Result<Report> {
    if a.sweep.0.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) || !strictly_increasing(&a.sweep.0) {
        return Err(usage("--sweep must be increasing finite nonnegative values"));
    }
    if a.m == 0 || a.samples == 0 {
        return Err(usage("--m and --samples must be positive"));
    }
    let mut table = Table::new(&["n", "m", "sweep", "re_mean", "im_mean", "abs_one_minus", "stderr"]);
    let mut per_n = Vec::new();
    for &n in &a.n.0 {
        if a.m > n {
            return Err(usage(format!("corner size m = {} exceeds n = {n}", a.m)));
        }
        let raw = ginibre(n, n, &mut RngState::new(a.seed).stream(n as u64));
        // tr(z* z) = n^2, so the sweep value is tr(zeta* zeta)
        let z = &raw * Complex64::new(n as f64 / real_inner(&raw, &raw).sqrt(), 0.0);
        let mut delta = None;
        let mut all_below = true;
        let mut max_stderr = 0.0f64;
        let mut points = Vec::new();
        for (idx, &v) in a.sweep.0.iter().enumerate() {
            let zeta = CMatrix::identity(a.m, a.m) * Complex64::new((v / a.m as f64).sqrt(), 0.0);
            let e = orbital_average(&zeta, &z, a.samples, &RngState::new(point_seed(a.seed, n, idx)))?;
            let dev = (Complex64::new(1.0, 0.0) - e.mean).norm();
            max_stderr = max_stderr.max(e.stderr);
            all_below &= dev < a.tolerance;
            if all_below {
                delta = Some(v);
            }
            table.push(vec![
                n.to_string(),
                a.m.to_string(),
                num(v),
                num(e.mean.re),
                num(e.mean.im),
                num(dev),
                num(e.stderr),
            ]);
            points.push(json!({ "sweep": v, "re_mean": e.mean.re, "im_mean": e.mean.im, "abs_one_minus": dev, "stderr": e.stderr }));
        }
        per_n.push(json!({ "n": n, "delta": delta, "max_stderr": max_stderr, "points": points }));
    }
    let summary = json!({
        "command": "orbital",
        "m": a.m,
        "samples": a.samples,
        "seed": a.seed,
        "tolerance": a.tolerance,
        "per_n": per_n,
    });
    Ok(Report { table, summary, failed_claim: None })
}
