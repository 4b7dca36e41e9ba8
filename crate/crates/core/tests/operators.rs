use besselforge::kernels::KernelSpec;
use besselforge::operators::*;
use besselforge::specfun::{halfline_grid, legendre_grid};
use besselforge::{Error, Grid};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn wide_grid() -> &'static Grid {
    static G: OnceLock<Grid> = OnceLock::new();
    G.get_or_init(|| halfline_grid(1e-8, 1e8, 4, 16).unwrap())
}

fn bessel_grid() -> &'static Grid {
    static G: OnceLock<Grid> = OnceLock::new();
    G.get_or_init(|| halfline_grid(1e-8, 40.0, 6, 16).unwrap())
}

fn assert_projector(p: &DiscreteOperator, label: &str) {
    let scale = p.matrix.norm().max(1.0);
    let defect = p.idempotency_defect();
    assert!(defect <= 1e-6 * scale, "{label}: idempotency defect {defect}");
    let ev = p.eigenvalues();
    assert!(ev[0] >= -1e-8 && ev[ev.len() - 1] <= 1.0 + 1e-8, "{label}: spectrum [{}, {}]", ev[0], ev[ev.len() - 1]);
}

#[test]
fn hat_kernel_trace_is_degree() {
    let op = discretize(&KernelSpec::hat(6, 0.5).unwrap(), wide_grid()).unwrap();
    assert!((trace(&op) - 6.0).abs() < 1e-6, "trace {}", trace(&op));
    assert!((trace_norm(&op) - 6.0).abs() < 1e-6);
}

#[test]
fn rank_one_exponential() {
    let g = halfline_grid(1e-8, 60.0, 6, 16).unwrap();
    let op = discretize_fn(|x, y| (-x - y).exp(), &g);
    assert_eq!(op.rank(1e-10), 1);
    assert!((trace(&op) - 0.5).abs() < 1e-7);
}

#[test]
fn grid_doubling_leaves_trace_and_norm() {
    let spec = KernelSpec::rescaled(6, 0.5).unwrap();
    let coarse = discretize(&spec, &halfline_grid(1e-8, 1e6, 4, 16).unwrap()).unwrap();
    let fine = discretize(&spec, &halfline_grid(1e-8, 1e6, 4, 32).unwrap()).unwrap();
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    assert!(rel(trace(&coarse), trace(&fine)) < 1e-6);
    assert!(rel(trace_norm(&coarse), trace_norm(&fine)) < 1e-6);
}

#[test]
fn trace_norm_triangle_inequality() {
    let g = legendre_grid(4, 8, 0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut random_projector = |rank: usize| {
        let m = DMatrix::from_fn(g.len(), rank, |_, _| rng.random::<f64>() - 0.5);
        let q = m.qr().q();
        DiscreteOperator::new(&q * q.transpose(), g.clone()).unwrap()
    };
    let (a, b, c) = (random_projector(3), random_projector(5), random_projector(2));
    assert!((trace_norm(&a) - 3.0).abs() < 1e-10);
    let ab = trace_norm_distance(&a, &b).unwrap();
    let bc = trace_norm_distance(&b, &c).unwrap();
    let ac = trace_norm_distance(&a, &c).unwrap();
    assert!(ac <= ab + bc + 1e-12);
}

#[test]
fn distance_needs_matching_grids() {
    let a = discretize_fn(|_, _| 1.0, &legendre_grid(2, 4, 0.0, 1.0).unwrap());
    let b = discretize_fn(|_, _| 1.0, &legendre_grid(2, 5, 0.0, 1.0).unwrap());
    assert!(matches!(trace_norm_distance(&a, &b), Err(Error::Usage(_))));
}

#[test]
fn sqrt_f_conjugation() {
    let g = halfline_grid(1e-4, 10.0, 2, 8).unwrap();
    let op = discretize(&KernelSpec::rescaled(3, 0.5).unwrap(), &g).unwrap();
    let c = conjugate_sqrt_f(&op);
    let mut diag = 0.0;
    for i in 0..g.len() {
        diag += g.nodes[i].min(1.0) * op.matrix[(i, i)];
        for j in 0..g.len() {
            if g.nodes[i] >= 1.0 && g.nodes[j] >= 1.0 {
                assert_eq!(c.matrix[(i, j)], op.matrix[(i, j)]);
            }
        }
    }
    assert!((trace(&c) - diag).abs() < 1e-12);
}

#[test]
fn basis_and_kernel_give_the_same_projector() {
    let g = wide_grid();
    let from_basis = h_space_basis(5, 0.5, g, false).unwrap().projector().unwrap();
    let from_kernel = discretize(&KernelSpec::hat(5, 0.5).unwrap(), g).unwrap();
    let d = trace_norm_distance(&from_basis, &from_kernel).unwrap();
    assert!(d < 1e-6, "distance {d}");
}

#[test]
fn augmented_spaces_have_full_rank() {
    let g = halfline_grid(1e-6, 1e4, 4, 16).unwrap();
    for &(n, s) in &[(12usize, -1.5f64), (12, -3.2), (3, -1.0)] {
        let set = h_space_spanning_set(n, s, &g, false).unwrap();
        assert_eq!(set.numerical_rank(ORTHO_TOL), n, "n={n} s={s}");
        let basis = h_space_basis(n, s, &g, false).unwrap();
        assert_eq!(basis.len(), n);
        assert_projector(&basis.projector().unwrap(), "augmented");
    }
}

#[test]
fn v_family_contains_the_leading_power() {
    let g = halfline_grid(1e-6, 1e4, 4, 16).unwrap();
    let set = h_space_spanning_set(3, -1.0, &g, false).unwrap();
    let v_only: Vec<usize> = (0..set.len()).filter(|&k| set.labels[k].starts_with('V')).collect();
    let v = besselforge::operators::SubspaceBasis::new(
        v_only.iter().map(|&k| set.functions[k].clone()).collect(),
        v_only.iter().map(|&k| set.labels[k].clone()).collect(),
        g.clone(),
    )
    .unwrap();
    let p = v.projector().unwrap();
    let f: Vec<f64> = g.nodes.iter().zip(&g.weights).map(|(&x, &w)| w.sqrt() * (x + 1.0).powf(-0.5)).collect();
    let f = nalgebra::DVector::from_vec(f);
    let resid = (&f - &p.matrix * &f).norm() / f.norm();
    assert!(resid < 1e-10, "residual {resid}");
}

#[test]
fn rank_one_perturbation_structure() {
    let g = halfline_grid(1e-6, 1e4, 4, 16).unwrap();
    let big = h_space_basis(12, -1.5, &g, false).unwrap().projector().unwrap();
    let small = h_space_basis(11, 0.5, &g, false).unwrap().projector().unwrap();
    assert_eq!(big.rank(1e-8) - small.rank(1e-8), 1);
    let contained = (&big.matrix * &small.matrix - &small.matrix).norm();
    assert!(contained < 1e-8, "containment defect {contained}");
}

#[test]
fn rank_mismatch_is_a_construction_error() {
    // two nodes cannot carry five independent functions
    let g = legendre_grid(1, 2, 0.5, 2.0).unwrap();
    match h_space_basis(5, 0.5, &g, false) {
        Err(Error::Construction { expected, found, .. }) => assert_eq!((expected, found), (5, 2)),
        other => panic!("expected a construction error, got {other:?}"),
    }
}

#[test]
fn weighted_projector_is_a_rank_n_projector() {
    let g = halfline_grid(1e-8, 200.0, 8, 16).unwrap();
    let p = weighted_projector(8, -1.5, 1.0, &g).unwrap();
    assert!(p.idempotency_defect() <= 1e-8, "defect {}", p.idempotency_defect());
    assert!((trace(&p) - 8.0).abs() < 1e-8);
}

#[test]
fn weighted_projector_matches_reorthonormalized_basis() {
    let g = halfline_grid(1e-8, 200.0, 8, 16).unwrap();
    for &s in &[0.5f64, -1.5] {
        let direct = weighted_projector(8, s, 1.0, &g).unwrap();
        let basis = h_space_basis(8, s, &g, true).unwrap();
        let via_basis = basis.multiplied_by(|x| (-x / 2.0).exp()).projector().unwrap();
        let d = trace_norm_distance(&direct, &via_basis).unwrap();
        assert!(d < 1e-6, "s={s}: distance {d}");
    }
}

#[test]
fn weighted_projector_tends_to_unweighted() {
    let g = halfline_grid(1e-8, 1e4, 6, 16).unwrap();
    let plain = h_space_basis(5, 0.5, &g, true).unwrap().projector().unwrap();
    let d: Vec<f64> = [0.1, 0.01]
        .iter()
        .map(|&b| trace_norm_distance(&weighted_projector(5, 0.5, b, &g).unwrap(), &plain).unwrap())
        .collect();
    assert!(d[1] < d[0] && d[1] < 0.1, "distances {d:?}");
}

#[test]
fn limit_projector_is_an_exact_grid_projector() {
    let lp = LimitProjector::new(0.5, 1.0, bessel_grid()).unwrap();
    assert_projector(lp.operator(), "limit s=0.5");
    let t = trace(lp.operator());
    assert!(t.is_finite() && (t - lp.rank() as f64).abs() < 1e-8);
    assert_eq!(lp.added_rank(), 0);
}

#[test]
fn limit_projector_augmentation_adds_rank() {
    let lp = LimitProjector::new(-1.5, 1.0, bessel_grid()).unwrap();
    assert_projector(lp.operator(), "limit s=-1.5");
    assert!(lp.added_rank() >= 1 && lp.added_rank() <= 2, "added {}", lp.added_rank());
}

#[test]
fn limit_projector_trace_grows_as_beta_shrinks() {
    let t: Vec<f64> = [2.0, 1.0, 0.5]
        .iter()
        .map(|&b| {
            let p = limit_projector(0.5, b, bessel_grid()).unwrap();
            trace(&conjugate_sqrt_f(&p))
        })
        .collect();
    assert!(t[0] < t[1] && t[1] < t[2], "traces {t:?}");
}

#[test]
fn limit_projector_threshold_insensitivity() {
    let g = bessel_grid();
    let lo = LimitProjector::with_threshold(0.5, 1.0, 0.1, g).unwrap();
    let hi = LimitProjector::with_threshold(0.5, 1.0, 0.9, g).unwrap();
    let d = trace_norm(&conjugate_sqrt_f(&lo.operator().sub(hi.operator()).unwrap()));
    assert!(d < 1e-2, "sqrt(f) distance {d}");
}

#[test]
fn dump_roundtrip() {
    let g = halfline_grid(1e-3, 10.0, 2, 4).unwrap();
    let op = discretize(&KernelSpec::rescaled(2, 0.5).unwrap(), &g).unwrap();
    let mut buf = Vec::new();
    write_binary(&op, &mut buf).unwrap();
    let back = read_binary(buf.as_slice()).unwrap();
    assert_eq!(back.matrix, op.matrix);
    assert_eq!(back.grid.nodes, op.grid.nodes);
    let mut csv = Vec::new();
    write_csv(&op, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("node,weight,c0,"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row.len(), g.len() + 2);
    assert_eq!(row[0], g.nodes[0]);
    assert_eq!(row[2], op.matrix[(0, 0)]);
}

#[test]
fn binary_rejects_bad_magic() {
    assert!(read_binary(&b"NOTMAGIC\0\0\0\0\0\0\0\0"[..]).is_err());
}
