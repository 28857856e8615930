//! Tape-based reverse-mode differentiation over dense matrices.
//!
//! Each primitive appends a node holding its forward value and the context
//! its adjoint needs; nodes are created in topological order, so one
//! reverse sweep propagates gradients. Gradients flow into every leaf,
//! including plain data inputs; callers simply read the ones they care
//! about.

use crate::{NumericsError, Result, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarId(usize);

/// Reduction axis: `Rows` collapses over rows (result 1xC), `Cols`
/// collapses over columns (result Rx1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

#[derive(Debug)]
enum Op {
    Input,
    MatMul {
        a: VarId,
        b: VarId,
    },
    Transpose {
        a: VarId,
    },
    ConcatCols {
        parts: Vec<VarId>,
    },
    SliceCols {
        a: VarId,
        start: usize,
    },
    /// Row-wise softmax of `logits / temperature` restricted to unmasked
    /// entries; masked entries get exactly zero probability.
    RowSoftmaxMasked {
        logits: VarId,
        temperature: VarId,
        mask: Vec<bool>,
    },
    LeakyRelu {
        a: VarId,
        slope: f64,
    },
    Sigmoid {
        a: VarId,
    },
    Add {
        a: VarId,
        b: VarId,
    },
    Sub {
        a: VarId,
        b: VarId,
    },
    Mul {
        a: VarId,
        b: VarId,
    },
    Scale {
        a: VarId,
        factor: f64,
    },
    AddRowBias {
        a: VarId,
        bias: VarId,
    },
    ScaleRows {
        a: VarId,
        scale: VarId,
    },
    OuterAdd {
        col: VarId,
        row: VarId,
    },
    RowL2Norm {
        a: VarId,
    },
    SumAxis {
        a: VarId,
        axis: Axis,
        mean: bool,
    },
    MaxAxis {
        a: VarId,
        axis: Axis,
        argmax: Vec<usize>,
    },
    CosineSim {
        a: VarId,
        b: VarId,
        a_hat: Tensor,
        b_hat: Tensor,
        a_norm: Vec<f64>,
        b_norm: Vec<f64>,
    },
}

struct Node {
    op: Op,
    value: Tensor,
}

/// Hidden-layer MLP parameters: `w1 (in x hidden)`, `b1 (1 x hidden)`,
/// `w2 (hidden x out)`, `b2 (1 x out)`.
#[derive(Debug, Clone, Copy)]
pub struct MlpVars {
    pub w1: VarId,
    pub b1: VarId,
    pub w2: VarId,
    pub b2: VarId,
}

#[derive(Default)]
pub struct Graph {
    nodes: Vec<Node>,
    grads: Vec<Option<Tensor>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: VarId) -> &Tensor {
        &self.nodes[v.0].value
    }

    /// Gradient accumulated by the last `backward` call, if any reached
    /// this node.
    pub fn grad(&self, v: VarId) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    fn push(&mut self, op: Op, value: Tensor, name: &'static str) -> Result<VarId> {
        if !value.is_finite() {
            return Err(NumericsError::NonFinite { op: name });
        }
        self.nodes.push(Node { op, value });
        Ok(VarId(self.nodes.len() - 1))
    }

    /// Introduce a leaf holding `value`. Inputs participate in the
    /// backward sweep like any node; whether their gradient is read is up
    /// to the caller.
    pub fn input(&mut self, value: Tensor) -> Result<VarId> {
        self.push(Op::Input, value, "input")
    }

    /// Leaf that exists for its value only (masks, targets, constants).
    pub fn constant(&mut self, value: Tensor) -> Result<VarId> {
        self.input(value)
    }

    pub fn matmul(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let (ar, ac) = self.value(a).shape();
        let (br, bc) = self.value(b).shape();
        if ac != br {
            return Err(NumericsError::shape(
                "matmul",
                format!("{ar}x{ac} times {br}x{bc}"),
            ));
        }
        let va = self.value(a);
        let vb = self.value(b);
        let mut out = Tensor::zeros(ar, bc);
        for i in 0..ar {
            for k in 0..ac {
                let aik = va.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                let brow = vb.row(k);
                let orow = &mut out.data_mut()[i * bc..(i + 1) * bc];
                for j in 0..bc {
                    orow[j] += aik * brow[j];
                }
            }
        }
        self.push(Op::MatMul { a, b }, out, "matmul")
    }

    pub fn transpose(&mut self, a: VarId) -> Result<VarId> {
        let v = self.value(a);
        let (r, c) = v.shape();
        let mut out = Tensor::zeros(c, r);
        for i in 0..r {
            for j in 0..c {
                out.set(j, i, v.get(i, j));
            }
        }
        self.push(Op::Transpose { a }, out, "transpose")
    }

    pub fn concat_cols(&mut self, parts: &[VarId]) -> Result<VarId> {
        if parts.is_empty() {
            return Err(NumericsError::shape("concat_cols", "no parts"));
        }
        let rows = self.value(parts[0]).rows();
        if parts.iter().any(|&p| self.value(p).rows() != rows) {
            return Err(NumericsError::shape("concat_cols", "row counts differ"));
        }
        let cols: usize = parts.iter().map(|&p| self.value(p).cols()).sum();
        let mut out = Tensor::zeros(rows, cols);
        for i in 0..rows {
            let mut offset = 0;
            for &p in parts {
                let v = self.value(p);
                for j in 0..v.cols() {
                    out.set(i, offset + j, v.get(i, j));
                }
                offset += v.cols();
            }
        }
        self.push(Op::ConcatCols { parts: parts.to_vec() }, out, "concat_cols")
    }

    pub fn slice_cols(&mut self, a: VarId, start: usize, end: usize) -> Result<VarId> {
        let v = self.value(a);
        let (r, c) = v.shape();
        if start >= end || end > c {
            return Err(NumericsError::shape(
                "slice_cols",
                format!("slice {start}..{end} of {c} columns"),
            ));
        }
        let mut out = Tensor::zeros(r, end - start);
        for i in 0..r {
            for j in start..end {
                out.set(i, j - start, v.get(i, j));
            }
        }
        self.push(Op::SliceCols { a, start }, out, "slice_cols")
    }

    /// Row-wise softmax of `logits / temperature` over unmasked entries.
    /// The row maximum (over unmasked entries only) is subtracted before
    /// exponentiation. `temperature` must be a positive 1x1 tensor;
    /// gradients flow to both the logits and the temperature.
    pub fn row_softmax_masked(&mut self, logits: VarId, mask: &Tensor, temperature: VarId) -> Result<VarId> {
        let v = self.value(logits);
        let (r, c) = v.shape();
        if mask.shape() != (r, c) {
            return Err(NumericsError::shape(
                "row_softmax_masked",
                format!("mask {}x{} for logits {r}x{c}", mask.rows(), mask.cols()),
            ));
        }
        let tau_t = self.value(temperature);
        if tau_t.shape() != (1, 1) {
            return Err(NumericsError::shape(
                "row_softmax_masked",
                "temperature must be 1x1",
            ));
        }
        let tau = tau_t.item();
        if tau <= 0.0 {
            return Err(NumericsError::NonPositiveTemperature(tau));
        }

        let allowed: Vec<bool> = mask.data().iter().map(|&m| m > 0.5).collect();
        let mut out = Tensor::zeros(r, c);
        for i in 0..r {
            let row = v.row(i);
            let mut max = f64::NEG_INFINITY;
            for j in 0..c {
                if allowed[i * c + j] {
                    max = max.max(row[j] / tau);
                }
            }
            if max == f64::NEG_INFINITY {
                return Err(NumericsError::AllMaskedRow { row: i });
            }
            let mut sum = 0.0;
            for j in 0..c {
                if allowed[i * c + j] {
                    let e = (row[j] / tau - max).exp();
                    out.set(i, j, e);
                    sum += e;
                }
            }
            for j in 0..c {
                if allowed[i * c + j] {
                    out.set(i, j, out.get(i, j) / sum);
                }
            }
        }
        self.push(
            Op::RowSoftmaxMasked {
                logits,
                temperature,
                mask: allowed,
            },
            out,
            "row_softmax_masked",
        )
    }

    pub fn leaky_relu(&mut self, a: VarId, slope: f64) -> Result<VarId> {
        let v = self.value(a);
        let data = v
            .data()
            .iter()
            .map(|&x| if x > 0.0 { x } else { slope * x })
            .collect();
        let out = Tensor::new(v.rows(), v.cols(), data);
        self.push(Op::LeakyRelu { a, slope }, out, "leaky_relu")
    }

    pub fn sigmoid(&mut self, a: VarId) -> Result<VarId> {
        let v = self.value(a);
        let data = v
            .data()
            .iter()
            .map(|&x| {
                if x >= 0.0 {
                    1.0 / (1.0 + (-x).exp())
                } else {
                    let e = x.exp();
                    e / (1.0 + e)
                }
            })
            .collect();
        let out = Tensor::new(v.rows(), v.cols(), data);
        self.push(Op::Sigmoid { a }, out, "sigmoid")
    }

    fn elementwise(
        &mut self,
        a: VarId,
        b: VarId,
        name: &'static str,
        f: impl Fn(f64, f64) -> f64,
        op: Op,
    ) -> Result<VarId> {
        let va = self.value(a);
        let vb = self.value(b);
        if va.shape() != vb.shape() {
            return Err(NumericsError::shape(
                name,
                format!("{:?} vs {:?}", va.shape(), vb.shape()),
            ));
        }
        let data = va.data().iter().zip(vb.data()).map(|(&x, &y)| f(x, y)).collect();
        let out = Tensor::new(va.rows(), va.cols(), data);
        self.push(op, out, name)
    }

    pub fn add(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        self.elementwise(a, b, "add", |x, y| x + y, Op::Add { a, b })
    }

    pub fn sub(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        self.elementwise(a, b, "sub", |x, y| x - y, Op::Sub { a, b })
    }

    pub fn mul(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        self.elementwise(a, b, "mul", |x, y| x * y, Op::Mul { a, b })
    }

    pub fn scale(&mut self, a: VarId, factor: f64) -> Result<VarId> {
        let v = self.value(a);
        let data = v.data().iter().map(|&x| factor * x).collect();
        let out = Tensor::new(v.rows(), v.cols(), data);
        self.push(Op::Scale { a, factor }, out, "scale")
    }

    /// Add a 1xC bias row to every row of an RxC matrix.
    pub fn add_row_bias(&mut self, a: VarId, bias: VarId) -> Result<VarId> {
        let v = self.value(a);
        let b = self.value(bias);
        if b.rows() != 1 || b.cols() != v.cols() {
            return Err(NumericsError::shape(
                "add_row_bias",
                format!("bias {:?} for input {:?}", b.shape(), v.shape()),
            ));
        }
        let mut out = v.clone();
        for i in 0..v.rows() {
            for j in 0..v.cols() {
                out.set(i, j, out.get(i, j) + b.get(0, j));
            }
        }
        self.push(Op::AddRowBias { a, bias }, out, "add_row_bias")
    }

    /// Multiply row `i` of an RxC matrix by entry `i` of an Rx1 column.
    pub fn scale_rows(&mut self, a: VarId, scale: VarId) -> Result<VarId> {
        let v = self.value(a);
        let s = self.value(scale);
        if s.cols() != 1 || s.rows() != v.rows() {
            return Err(NumericsError::shape(
                "scale_rows",
                format!("scale {:?} for input {:?}", s.shape(), v.shape()),
            ));
        }
        let mut out = v.clone();
        for i in 0..v.rows() {
            let f = s.get(i, 0);
            for j in 0..v.cols() {
                out.set(i, j, out.get(i, j) * f);
            }
        }
        self.push(Op::ScaleRows { a, scale }, out, "scale_rows")
    }

    /// Pairwise sums of an Rx1 column and an Mx1 column: out[i][j] =
    /// col[i] + row[j].
    pub fn outer_add(&mut self, col: VarId, row: VarId) -> Result<VarId> {
        let c = self.value(col);
        let r = self.value(row);
        if c.cols() != 1 || r.cols() != 1 {
            return Err(NumericsError::shape(
                "outer_add",
                format!("expected column vectors, got {:?} and {:?}", c.shape(), r.shape()),
            ));
        }
        let mut out = Tensor::zeros(c.rows(), r.rows());
        for i in 0..c.rows() {
            for j in 0..r.rows() {
                out.set(i, j, c.get(i, 0) + r.get(j, 0));
            }
        }
        self.push(Op::OuterAdd { col, row }, out, "outer_add")
    }

    /// Euclidean norm of each row, as an Rx1 column. For 1-column inputs
    /// this is the absolute value.
    pub fn row_l2_norm(&mut self, a: VarId) -> Result<VarId> {
        let v = self.value(a);
        let mut out = Tensor::zeros(v.rows(), 1);
        for i in 0..v.rows() {
            let norm = v.row(i).iter().map(|x| x * x).sum::<f64>().sqrt();
            out.set(i, 0, norm);
        }
        self.push(Op::RowL2Norm { a }, out, "row_l2_norm")
    }

    pub fn sum_axis(&mut self, a: VarId, axis: Axis) -> Result<VarId> {
        let out = self.reduce(a, axis, false);
        self.push(Op::SumAxis { a, axis, mean: false }, out, "sum_axis")
    }

    pub fn mean_axis(&mut self, a: VarId, axis: Axis) -> Result<VarId> {
        let out = self.reduce(a, axis, true);
        self.push(Op::SumAxis { a, axis, mean: true }, out, "mean_axis")
    }

    fn reduce(&self, a: VarId, axis: Axis, mean: bool) -> Tensor {
        let v = self.value(a);
        let (r, c) = v.shape();
        match axis {
            Axis::Rows => {
                let mut out = Tensor::zeros(1, c);
                for i in 0..r {
                    for j in 0..c {
                        out.set(0, j, out.get(0, j) + v.get(i, j));
                    }
                }
                if mean {
                    for j in 0..c {
                        out.set(0, j, out.get(0, j) / r as f64);
                    }
                }
                out
            }
            Axis::Cols => {
                let mut out = Tensor::zeros(r, 1);
                for i in 0..r {
                    let sum: f64 = v.row(i).iter().sum();
                    out.set(i, 0, if mean { sum / c as f64 } else { sum });
                }
                out
            }
        }
    }

    /// Maximum along an axis; the gradient routes to the first maximal
    /// entry of each slice.
    pub fn max_axis(&mut self, a: VarId, axis: Axis) -> Result<VarId> {
        let v = self.value(a);
        let (r, c) = v.shape();
        let (out, argmax) = match axis {
            Axis::Rows => {
                let mut out = Tensor::full(1, c, f64::NEG_INFINITY);
                let mut arg = vec![0usize; c];
                for j in 0..c {
                    for i in 0..r {
                        if v.get(i, j) > out.get(0, j) {
                            out.set(0, j, v.get(i, j));
                            arg[j] = i;
                        }
                    }
                }
                (out, arg)
            }
            Axis::Cols => {
                let mut out = Tensor::full(r, 1, f64::NEG_INFINITY);
                let mut arg = vec![0usize; r];
                for i in 0..r {
                    for j in 0..c {
                        if v.get(i, j) > out.get(i, 0) {
                            out.set(i, 0, v.get(i, j));
                            arg[i] = j;
                        }
                    }
                }
                (out, arg)
            }
        };
        self.push(Op::MaxAxis { a, axis, argmax }, out, "max_axis")
    }

    /// All-pairs cosine similarity of the rows of `a` (QxD) and `b` (GxD),
    /// giving QxG. Zero-norm rows have similarity zero to everything and
    /// receive zero gradient.
    pub fn cosine_similarity_matrix(&mut self, a: VarId, b: VarId) -> Result<VarId> {
        let va = self.value(a);
        let vb = self.value(b);
        if va.cols() != vb.cols() {
            return Err(NumericsError::shape(
                "cosine_similarity_matrix",
                format!("{:?} vs {:?}", va.shape(), vb.shape()),
            ));
        }
        let normalize = |t: &Tensor| {
            let mut hat = t.clone();
            let mut norms = vec![0.0; t.rows()];
            for i in 0..t.rows() {
                let norm = t.row(i).iter().map(|x| x * x).sum::<f64>().sqrt();
                norms[i] = norm;
                if norm > 0.0 {
                    for j in 0..t.cols() {
                        hat.set(i, j, hat.get(i, j) / norm);
                    }
                } else {
                    for j in 0..t.cols() {
                        hat.set(i, j, 0.0);
                    }
                }
            }
            (hat, norms)
        };
        let (a_hat, a_norm) = normalize(va);
        let (b_hat, b_norm) = normalize(vb);

        let mut out = Tensor::zeros(va.rows(), vb.rows());
        for i in 0..va.rows() {
            for j in 0..vb.rows() {
                let dot: f64 = a_hat.row(i).iter().zip(b_hat.row(j)).map(|(x, y)| x * y).sum();
                out.set(i, j, dot);
            }
        }
        self.push(
            Op::CosineSim {
                a,
                b,
                a_hat,
                b_hat,
                a_norm,
                b_norm,
            },
            out,
            "cosine_similarity_matrix",
        )
    }

    /// One-hidden-layer MLP: `leaky_relu(x w1 + b1) w2 + b2`.
    pub fn mlp_apply(&mut self, x: VarId, vars: &MlpVars, slope: f64) -> Result<VarId> {
        let h = self.matmul(x, vars.w1)?;
        let h = self.add_row_bias(h, vars.b1)?;
        let h = self.leaky_relu(h, slope)?;
        let out = self.matmul(h, vars.w2)?;
        self.add_row_bias(out, vars.b2)
    }

    /// Reverse sweep from a scalar loss: accumulates a gradient for every
    /// node the loss depends on. Overwrites gradients of a previous call.
    pub fn backward(&mut self, loss: VarId) -> Result<()> {
        let (r, c) = self.value(loss).shape();
        if (r, c) != (1, 1) {
            return Err(NumericsError::NonScalarLoss { rows: r, cols: c });
        }
        let mut grads: Vec<Option<Tensor>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(Tensor::scalar(1.0));

        for idx in (0..=loss.0).rev() {
            let Some(grad) = grads[idx].take() else {
                continue;
            };
            self.adjoint(idx, &grad, &mut grads)?;
            grads[idx] = Some(grad);
        }
        self.grads = grads;
        Ok(())
    }

    fn adjoint(&self, idx: usize, grad: &Tensor, grads: &mut [Option<Tensor>]) -> Result<()> {
        let acc = |grads: &mut [Option<Tensor>], id: VarId, delta: Tensor| {
            match &mut grads[id.0] {
                Some(existing) => {
                    for (e, d) in existing.data_mut().iter_mut().zip(delta.data()) {
                        *e += d;
                    }
                }
                slot => *slot = Some(delta),
            }
        };

        match &self.nodes[idx].op {
            Op::Input => {}
            Op::MatMul { a, b } => {
                let va = self.value(*a);
                let vb = self.value(*b);
                // dA = G B^T
                let mut da = Tensor::zeros(va.rows(), va.cols());
                for i in 0..va.rows() {
                    for k in 0..va.cols() {
                        let mut sum = 0.0;
                        for j in 0..vb.cols() {
                            sum += grad.get(i, j) * vb.get(k, j);
                        }
                        da.set(i, k, sum);
                    }
                }
                // dB = A^T G
                let mut db = Tensor::zeros(vb.rows(), vb.cols());
                for k in 0..vb.rows() {
                    for j in 0..vb.cols() {
                        let mut sum = 0.0;
                        for i in 0..va.rows() {
                            sum += va.get(i, k) * grad.get(i, j);
                        }
                        db.set(k, j, sum);
                    }
                }
                acc(grads, *a, da);
                acc(grads, *b, db);
            }
            Op::Transpose { a } => {
                let (r, c) = self.value(*a).shape();
                let mut da = Tensor::zeros(r, c);
                for i in 0..r {
                    for j in 0..c {
                        da.set(i, j, grad.get(j, i));
                    }
                }
                acc(grads, *a, da);
            }
            Op::ConcatCols { parts } => {
                let mut offset = 0;
                for &p in parts {
                    let (r, c) = self.value(p).shape();
                    let mut dp = Tensor::zeros(r, c);
                    for i in 0..r {
                        for j in 0..c {
                            dp.set(i, j, grad.get(i, offset + j));
                        }
                    }
                    offset += c;
                    acc(grads, p, dp);
                }
            }
            Op::SliceCols { a, start } => {
                let (r, c) = self.value(*a).shape();
                let mut da = Tensor::zeros(r, c);
                for i in 0..r {
                    for j in 0..grad.cols() {
                        da.set(i, start + j, grad.get(i, j));
                    }
                }
                acc(grads, *a, da);
            }
            Op::RowSoftmaxMasked {
                logits,
                temperature,
                mask,
            } => {
                let y = &self.nodes[idx].value;
                let x = self.value(*logits);
                let tau = self.value(*temperature).item();
                let (r, c) = y.shape();
                let mut dx = Tensor::zeros(r, c);
                let mut dtau = 0.0;
                for i in 0..r {
                    let mut inner = 0.0;
                    for j in 0..c {
                        if mask[i * c + j] {
                            inner += grad.get(i, j) * y.get(i, j);
                        }
                    }
                    for j in 0..c {
                        if mask[i * c + j] {
                            let dz = y.get(i, j) * (grad.get(i, j) - inner);
                            dx.set(i, j, dz / tau);
                            dtau -= dz * x.get(i, j) / (tau * tau);
                        }
                    }
                }
                acc(grads, *logits, dx);
                acc(grads, *temperature, Tensor::scalar(dtau));
            }
            Op::LeakyRelu { a, slope } => {
                let x = self.value(*a);
                let mut da = grad.clone();
                for (d, &xv) in da.data_mut().iter_mut().zip(x.data()) {
                    if xv <= 0.0 {
                        *d *= slope;
                    }
                }
                acc(grads, *a, da);
            }
            Op::Sigmoid { a } => {
                let y = &self.nodes[idx].value;
                let mut da = grad.clone();
                for (d, &yv) in da.data_mut().iter_mut().zip(y.data()) {
                    *d *= yv * (1.0 - yv);
                }
                acc(grads, *a, da);
            }
            Op::Add { a, b } => {
                acc(grads, *a, grad.clone());
                acc(grads, *b, grad.clone());
            }
            Op::Sub { a, b } => {
                acc(grads, *a, grad.clone());
                let mut db = grad.clone();
                for d in db.data_mut() {
                    *d = -*d;
                }
                acc(grads, *b, db);
            }
            Op::Mul { a, b } => {
                let va = self.value(*a);
                let vb = self.value(*b);
                let mut da = grad.clone();
                for (d, &y) in da.data_mut().iter_mut().zip(vb.data()) {
                    *d *= y;
                }
                let mut db = grad.clone();
                for (d, &x) in db.data_mut().iter_mut().zip(va.data()) {
                    *d *= x;
                }
                acc(grads, *a, da);
                acc(grads, *b, db);
            }
            Op::Scale { a, factor } => {
                let mut da = grad.clone();
                for d in da.data_mut() {
                    *d *= factor;
                }
                acc(grads, *a, da);
            }
            Op::AddRowBias { a, bias } => {
                acc(grads, *a, grad.clone());
                let mut db = Tensor::zeros(1, grad.cols());
                for i in 0..grad.rows() {
                    for j in 0..grad.cols() {
                        db.set(0, j, db.get(0, j) + grad.get(i, j));
                    }
                }
                acc(grads, *bias, db);
            }
            Op::ScaleRows { a, scale } => {
                let x = self.value(*a);
                let s = self.value(*scale);
                let mut da = grad.clone();
                for i in 0..grad.rows() {
                    let f = s.get(i, 0);
                    for j in 0..grad.cols() {
                        da.set(i, j, da.get(i, j) * f);
                    }
                }
                let mut ds = Tensor::zeros(s.rows(), 1);
                for i in 0..grad.rows() {
                    let mut sum = 0.0;
                    for j in 0..grad.cols() {
                        sum += grad.get(i, j) * x.get(i, j);
                    }
                    ds.set(i, 0, sum);
                }
                acc(grads, *a, da);
                acc(grads, *scale, ds);
            }
            Op::OuterAdd { col, row } => {
                let (n, m) = self.nodes[idx].value.shape();
                let mut dc = Tensor::zeros(n, 1);
                let mut dr = Tensor::zeros(m, 1);
                for i in 0..n {
                    for j in 0..m {
                        dc.set(i, 0, dc.get(i, 0) + grad.get(i, j));
                        dr.set(j, 0, dr.get(j, 0) + grad.get(i, j));
                    }
                }
                acc(grads, *col, dc);
                acc(grads, *row, dr);
            }
            Op::RowL2Norm { a } => {
                let x = self.value(*a);
                let norms = &self.nodes[idx].value;
                let mut da = Tensor::zeros(x.rows(), x.cols());
                for i in 0..x.rows() {
                    let n = norms.get(i, 0);
                    if n > 0.0 {
                        let g = grad.get(i, 0);
                        for j in 0..x.cols() {
                            da.set(i, j, g * x.get(i, j) / n);
                        }
                    }
                }
                acc(grads, *a, da);
            }
            Op::SumAxis { a, axis, mean } => {
                let (r, c) = self.value(*a).shape();
                let mut da = Tensor::zeros(r, c);
                match axis {
                    Axis::Rows => {
                        let f = if *mean { 1.0 / r as f64 } else { 1.0 };
                        for i in 0..r {
                            for j in 0..c {
                                da.set(i, j, grad.get(0, j) * f);
                            }
                        }
                    }
                    Axis::Cols => {
                        let f = if *mean { 1.0 / c as f64 } else { 1.0 };
                        for i in 0..r {
                            for j in 0..c {
                                da.set(i, j, grad.get(i, 0) * f);
                            }
                        }
                    }
                }
                acc(grads, *a, da);
            }
            Op::MaxAxis { a, axis, argmax } => {
                let (r, c) = self.value(*a).shape();
                let mut da = Tensor::zeros(r, c);
                match axis {
                    Axis::Rows => {
                        for j in 0..c {
                            da.set(argmax[j], j, grad.get(0, j));
                        }
                    }
                    Axis::Cols => {
                        for i in 0..r {
                            da.set(i, argmax[i], grad.get(i, 0));
                        }
                    }
                }
                acc(grads, *a, da);
            }
            Op::CosineSim {
                a,
                b,
                a_hat,
                b_hat,
                a_norm,
                b_norm,
            } => {
                let s = &self.nodes[idx].value;
                let (q, g) = s.shape();
                let d = a_hat.cols();
                let mut da = Tensor::zeros(q, d);
                for i in 0..q {
                    if a_norm[i] == 0.0 {
                        continue;
                    }
                    let mut gs = 0.0;
                    for j in 0..g {
                        gs += grad.get(i, j) * s.get(i, j);
                    }
                    for k in 0..d {
                        let mut gb = 0.0;
                        for j in 0..g {
                            gb += grad.get(i, j) * b_hat.get(j, k);
                        }
                        da.set(i, k, (gb - gs * a_hat.get(i, k)) / a_norm[i]);
                    }
                }
                let mut db = Tensor::zeros(g, d);
                for j in 0..g {
                    if b_norm[j] == 0.0 {
                        continue;
                    }
                    let mut gs = 0.0;
                    for i in 0..q {
                        gs += grad.get(i, j) * s.get(i, j);
                    }
                    for k in 0..d {
                        let mut ga = 0.0;
                        for i in 0..q {
                            ga += grad.get(i, j) * a_hat.get(i, k);
                        }
                        db.set(j, k, (ga - gs * b_hat.get(j, k)) / b_norm[j]);
                    }
                }
                acc(grads, *a, da);
                acc(grads, *b, db);
            }
        }
        Ok(())
    }
}
