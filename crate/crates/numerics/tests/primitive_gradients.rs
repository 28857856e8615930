//! Adjoint correctness of every primitive, individually, against central
//! differences on random small tensors, plus forward-value spot checks.

use numerics::{
    grad_check, Axis, GradCheckConfig, Graph, MlpVars, NumericsError, ParamBinding, ParamStore,
    Result, Tensor, VarId,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn store_with(names: &[(&str, usize, usize)], seed: u64) -> ParamStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = ParamStore::new();
    for &(name, r, c) in names {
        store.insert(name, Tensor::randn(r, c, 1.0, &mut rng)).unwrap();
    }
    store
}

fn tight() -> GradCheckConfig {
    GradCheckConfig {
        epsilon: 1e-6,
        tolerance: 1e-6,
    }
}

/// Reduce any matrix to a scalar with nonuniform weights so no adjoint
/// symmetry hides an error.
fn spiky_scalar(g: &mut Graph, x: VarId) -> Result<VarId> {
    let (r, c) = g.value(x).shape();
    let weights = Tensor::new(
        r,
        c,
        (0..r * c).map(|i| 0.3 + 0.11 * i as f64).collect(),
    );
    let w = g.constant(weights)?;
    let prod = g.mul(x, w)?;
    let col = g.sum_axis(prod, Axis::Cols)?;
    g.sum_axis(col, Axis::Rows)
}

fn check<F>(store: &ParamStore, build: F)
where
    F: Fn(&mut Graph, &ParamBinding) -> Result<VarId>,
{
    let report = grad_check(store, build, &tight()).unwrap();
    assert!(
        report.passed,
        "gradient check failed: max rel err {:.3e}",
        report.max_rel_error()
    );
}

#[test]
fn matmul_adjoint() {
    let store = store_with(&[("a", 3, 4), ("b", 4, 2)], 1);
    check(&store, |g, bind| {
        let out = g.matmul(bind.var("a")?, bind.var("b")?)?;
        spiky_scalar(g, out)
    });
}

#[test]
fn transpose_adjoint() {
    let store = store_with(&[("a", 3, 2)], 2);
    check(&store, |g, bind| {
        let out = g.transpose(bind.var("a")?)?;
        spiky_scalar(g, out)
    });
}

#[test]
fn concat_and_slice_adjoint() {
    let store = store_with(&[("a", 2, 3), ("b", 2, 2)], 3);
    check(&store, |g, bind| {
        let cat = g.concat_cols(&[bind.var("a")?, bind.var("b")?])?;
        let piece = g.slice_cols(cat, 1, 4)?;
        spiky_scalar(g, piece)
    });
}

#[test]
fn masked_softmax_adjoint_including_temperature() {
    let store = store_with(&[("logits", 3, 4), ("tau_pre", 1, 1)], 4);
    check(&store, |g, bind| {
        let mask = g
            .value(bind.var("logits")?)
            .clone();
        let mask = {
            let mut m = Tensor::full(mask.rows(), mask.cols(), 1.0);
            m.set(0, 2, 0.0);
            m.set(2, 0, 0.0);
            m.set(2, 3, 0.0);
            m
        };
        // Positive temperature via sigmoid of an unconstrained scalar.
        let tau = g.sigmoid(bind.var("tau_pre")?)?;
        let sm = g.row_softmax_masked(bind.var("logits")?, &mask, tau)?;
        spiky_scalar(g, sm)
    });
}

#[test]
fn leaky_relu_and_sigmoid_adjoint() {
    let store = store_with(&[("a", 3, 3)], 5);
    check(&store, |g, bind| {
        let l = g.leaky_relu(bind.var("a")?, 0.2)?;
        let s = g.sigmoid(l)?;
        spiky_scalar(g, s)
    });
}

#[test]
fn elementwise_adjoints() {
    let store = store_with(&[("a", 2, 3), ("b", 2, 3)], 6);
    check(&store, |g, bind| {
        let a = bind.var("a")?;
        let b = bind.var("b")?;
        let sum = g.add(a, b)?;
        let diff = g.sub(sum, b)?;
        let prod = g.mul(diff, b)?;
        let scaled = g.scale(prod, -1.7)?;
        spiky_scalar(g, scaled)
    });
}

#[test]
fn bias_scale_rows_outer_add_adjoints() {
    let store = store_with(&[("a", 3, 2), ("bias", 1, 2), ("s", 3, 1), ("r", 4, 1)], 7);
    check(&store, |g, bind| {
        let x = g.add_row_bias(bind.var("a")?, bind.var("bias")?)?;
        let x = g.scale_rows(x, bind.var("s")?)?;
        let col = g.sum_axis(x, Axis::Cols)?;
        let e = g.outer_add(col, bind.var("r")?)?;
        spiky_scalar(g, e)
    });
}

#[test]
fn row_l2_norm_adjoint() {
    let store = store_with(&[("a", 4, 3)], 8);
    check(&store, |g, bind| {
        let n = g.row_l2_norm(bind.var("a")?)?;
        spiky_scalar(g, n)
    });
}

#[test]
fn reductions_adjoint() {
    let store = store_with(&[("a", 3, 4)], 9);
    check(&store, |g, bind| {
        let a = bind.var("a")?;
        let m = g.mean_axis(a, Axis::Rows)?;
        let s = g.sum_axis(a, Axis::Cols)?;
        let st = g.transpose(s)?;
        let both = g.concat_cols(&[m, st])?;
        spiky_scalar(g, both)
    });
}

#[test]
fn max_axis_adjoint() {
    let store = store_with(&[("a", 3, 4)], 10);
    check(&store, |g, bind| {
        let m = g.max_axis(bind.var("a")?, Axis::Rows)?;
        let n = g.max_axis(bind.var("a")?, Axis::Cols)?;
        let nt = g.transpose(n)?;
        let both = g.concat_cols(&[m, nt])?;
        spiky_scalar(g, both)
    });
}

#[test]
fn cosine_similarity_adjoint() {
    let store = store_with(&[("a", 3, 4), ("b", 5, 4)], 11);
    check(&store, |g, bind| {
        let s = g.cosine_similarity_matrix(bind.var("a")?, bind.var("b")?)?;
        spiky_scalar(g, s)
    });
}

#[test]
fn mlp_apply_adjoint() {
    let store = store_with(&[("x", 2, 3), ("w1", 3, 5), ("b1", 1, 5), ("w2", 5, 2), ("b2", 1, 2)], 12);
    check(&store, |g, bind| {
        let vars = MlpVars {
            w1: bind.var("w1")?,
            b1: bind.var("b1")?,
            w2: bind.var("w2")?,
            b2: bind.var("b2")?,
        };
        let out = g.mlp_apply(bind.var("x")?, &vars, 0.2)?;
        spiky_scalar(g, out)
    });
}

#[test]
fn softmax_forward_values() {
    let mut g = Graph::new();
    // Uniform logits over 3 unmasked entries -> each 1/3.
    let logits = g.input(Tensor::from_rows(&[vec![2.0, 2.0, 2.0, 2.0]])).unwrap();
    let mask = Tensor::from_rows(&[vec![1.0, 1.0, 0.0, 1.0]]);
    let one = g.constant(Tensor::scalar(1.0)).unwrap();
    let sm = g.row_softmax_masked(logits, &mask, one).unwrap();
    let v = g.value(sm);
    assert!((v.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(v.get(0, 2), 0.0);
    let row_sum: f64 = v.row(0).iter().sum();
    assert!((row_sum - 1.0).abs() < 1e-9);

    // Logits [1, 0] at temperature 1: [e/(1+e), 1/(1+e)].
    let mut g = Graph::new();
    let logits = g.input(Tensor::from_rows(&[vec![1.0, 0.0]])).unwrap();
    let mask = Tensor::full(1, 2, 1.0);
    let one = g.constant(Tensor::scalar(1.0)).unwrap();
    let sm = g.row_softmax_masked(logits, &mask, one).unwrap();
    let v = g.value(sm);
    assert!((v.get(0, 0) - 0.7310585786300049).abs() < 1e-12);
    assert!((v.get(0, 1) - 0.2689414213699951).abs() < 1e-12);
}

#[test]
fn softmax_rejects_fully_masked_rows_and_bad_temperature() {
    let mut g = Graph::new();
    let logits = g.input(Tensor::from_rows(&[vec![1.0, 2.0]])).unwrap();
    let mask = Tensor::zeros(1, 2);
    let one = g.constant(Tensor::scalar(1.0)).unwrap();
    assert!(matches!(
        g.row_softmax_masked(logits, &mask, one),
        Err(NumericsError::AllMaskedRow { row: 0 })
    ));

    let mut g = Graph::new();
    let logits = g.input(Tensor::from_rows(&[vec![1.0, 2.0]])).unwrap();
    let mask = Tensor::full(1, 2, 1.0);
    let zero = g.constant(Tensor::scalar(0.0)).unwrap();
    assert!(matches!(
        g.row_softmax_masked(logits, &mask, zero),
        Err(NumericsError::NonPositiveTemperature(_))
    ));
}

#[test]
fn cosine_self_similarity_diagonal_is_one() {
    let mut g = Graph::new();
    let x = g
        .input(Tensor::from_rows(&[vec![1.0, 2.0], vec![-0.5, 0.25], vec![3.0, -4.0]]))
        .unwrap();
    let s = g.cosine_similarity_matrix(x, x).unwrap();
    for i in 0..3 {
        assert!((g.value(s).get(i, i) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zero_norm_rows_have_zero_similarity() {
    let mut g = Graph::new();
    let a = g
        .input(Tensor::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]))
        .unwrap();
    let b = g.input(Tensor::from_rows(&[vec![1.0, 1.0]])).unwrap();
    let s = g.cosine_similarity_matrix(a, b).unwrap();
    assert_eq!(g.value(s).get(0, 0), 0.0);
    assert!(g.value(s).get(1, 0) > 0.0);
}

#[test]
fn non_finite_values_are_hard_errors() {
    let mut g = Graph::new();
    assert!(matches!(
        g.input(Tensor::scalar(f64::NAN)),
        Err(NumericsError::NonFinite { .. })
    ));

    let big = g.input(Tensor::scalar(f64::MAX)).unwrap();
    assert!(matches!(
        g.mul(big, big),
        Err(NumericsError::NonFinite { op: "mul" })
    ));
}

#[test]
fn backward_requires_scalar_loss() {
    let mut g = Graph::new();
    let x = g.input(Tensor::from_rows(&[vec![1.0, 2.0]])).unwrap();
    assert!(matches!(
        g.backward(x),
        Err(NumericsError::NonScalarLoss { .. })
    ));
}

#[test]
fn forward_values_are_deterministic() {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut g = Graph::new();
        let a = g.input(Tensor::randn(4, 4, 1.0, &mut rng)).unwrap();
        let b = g.input(Tensor::randn(4, 4, 1.0, &mut rng)).unwrap();
        let c = g.matmul(a, b).unwrap();
        let s = g.cosine_similarity_matrix(c, c).unwrap();
        let one = g.constant(Tensor::scalar(0.7)).unwrap();
        let sm = g.row_softmax_masked(s, &Tensor::full(4, 4, 1.0), one).unwrap();
        g.value(sm).data().to_vec()
    };
    let x = run();
    let y = run();
    assert_eq!(x, y, "identical seeds must give bit-identical values");
}
