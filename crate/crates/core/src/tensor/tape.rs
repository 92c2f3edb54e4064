//! The operation tape. Every primitive evaluates eagerly, appends a node with
//! whatever it needs for the adjoint, and returns a [`Var`] handle.

use ndarray::{ArrayView2, Axis};

use super::{Tensor, TensorError};

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    /// `a [n,m] + b [1,m]`, b broadcast over rows.
    AddRow(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    ScaleRows(Var, Vec<f64>),
    Relu(Var),
    Sum(Var),
    Mean(Var),
    Concat(Vec<Var>),
    GatherRows(Var, Vec<usize>),
    ScatterAddRows(Var, Vec<usize>),
    MseMasked {
        pred: Var,
        target: Vec<f64>,
        mask: Vec<f64>,
        count: f64,
    },
    BceWithLogits {
        logits: Var,
        target: Vec<f64>,
        mask: Vec<f64>,
        count: f64,
    },
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    op: Op,
    needs_grad: bool,
}

/// Single-owner record of a forward computation.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Gradients indexed by [`Var`]. Nodes that do not depend on any
/// differentiable leaf have no entry.
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    pub fn get(&self, v: Var) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    /// Takes ownership of a gradient, leaving `None` behind.
    pub fn take(&mut self, v: Var) -> Option<Tensor> {
        self.grads.get_mut(v.0).and_then(Option::take)
    }
}

fn view(t: &Tensor) -> ArrayView2<'_, f64> {
    ArrayView2::from_shape((t.rows(), t.cols()), t.data()).expect("row-major tensor")
}

fn matmul_raw(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Tensor {
    let c = a.dot(&b);
    let (r, k) = c.dim();
    let data = if c.is_standard_layout() {
        c.into_raw_vec_and_offset().0
    } else {
        c.iter().copied().collect()
    };
    Tensor::matrix(r, k, data).expect("matmul shape")
}

fn is_matrix(t: &Tensor) -> bool {
    t.shape().len() == 2
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    fn push(&mut self, value: Tensor, op: Op, needs_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op,
            needs_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn needs(&self, v: Var) -> bool {
        self.nodes[v.0].needs_grad
    }

    /// A differentiable input.
    pub fn param(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf, true)
    }

    /// A non-differentiable input.
    pub fn constant(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf, false)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var, TensorError> {
        let (ta, tb) = (self.value(a), self.value(b));
        if !is_matrix(ta) || !is_matrix(tb) || ta.cols() != tb.rows() {
            return Err(TensorError::ShapeMismatch {
                op: "matmul",
                left: ta.shape().to_vec(),
                right: tb.shape().to_vec(),
            });
        }
        let out = matmul_raw(view(ta), view(tb));
        let ng = self.needs(a) || self.needs(b);
        Ok(self.push(out, Op::MatMul(a, b), ng))
    }

    /// Elementwise sum. `b` may also be a single row `[1, m]` (or `[m]`),
    /// which is broadcast over the rows of `a`.
    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, TensorError> {
        let (ta, tb) = (self.value(a), self.value(b));
        let ng = self.needs(a) || self.needs(b);
        if ta.shape() == tb.shape() {
            let data = ta
                .data()
                .iter()
                .zip(tb.data())
                .map(|(x, y)| x + y)
                .collect();
            let out = Tensor::new(ta.shape().to_vec(), data)?;
            return Ok(self.push(out, Op::Add(a, b), ng));
        }
        let row_like = tb.len() == ta.cols() && (tb.shape().len() == 1 || tb.rows() == 1);
        if !is_matrix(ta) || !row_like {
            return Err(TensorError::ShapeMismatch {
                op: "add",
                left: ta.shape().to_vec(),
                right: tb.shape().to_vec(),
            });
        }
        let c = ta.cols();
        let bias = tb.data();
        let data = ta
            .data()
            .iter()
            .enumerate()
            .map(|(i, x)| x + bias[i % c])
            .collect();
        let out = Tensor::new(ta.shape().to_vec(), data)?;
        Ok(self.push(out, Op::AddRow(a, b), ng))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var, TensorError> {
        let (ta, tb) = (self.value(a), self.value(b));
        ta.same_shape(tb, "sub")?;
        let data = ta
            .data()
            .iter()
            .zip(tb.data())
            .map(|(x, y)| x - y)
            .collect();
        let out = Tensor::new(ta.shape().to_vec(), data)?;
        let ng = self.needs(a) || self.needs(b);
        Ok(self.push(out, Op::Sub(a, b), ng))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var, TensorError> {
        let (ta, tb) = (self.value(a), self.value(b));
        ta.same_shape(tb, "mul")?;
        let data = ta
            .data()
            .iter()
            .zip(tb.data())
            .map(|(x, y)| x * y)
            .collect();
        let out = Tensor::new(ta.shape().to_vec(), data)?;
        let ng = self.needs(a) || self.needs(b);
        Ok(self.push(out, Op::Mul(a, b), ng))
    }

    pub fn scale(&mut self, a: Var, k: f64) -> Var {
        let ta = self.value(a);
        let data = ta.data().iter().map(|x| x * k).collect();
        let out = Tensor::new(ta.shape().to_vec(), data).expect("same shape");
        let ng = self.needs(a);
        self.push(out, Op::Scale(a, k), ng)
    }

    /// Multiplies row `i` of `a` by the constant `factors[i]`.
    pub fn scale_rows(&mut self, a: Var, factors: Vec<f64>) -> Result<Var, TensorError> {
        let ta = self.value(a);
        if factors.len() != ta.rows() {
            return Err(TensorError::ShapeMismatch {
                op: "scale_rows",
                left: ta.shape().to_vec(),
                right: vec![factors.len()],
            });
        }
        let c = ta.cols();
        let data = ta
            .data()
            .iter()
            .enumerate()
            .map(|(i, x)| x * factors[i / c.max(1)])
            .collect();
        let out = Tensor::new(ta.shape().to_vec(), data)?;
        let ng = self.needs(a);
        Ok(self.push(out, Op::ScaleRows(a, factors), ng))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let ta = self.value(a);
        let data = ta.data().iter().map(|&x| x.max(0.0)).collect();
        let out = Tensor::new(ta.shape().to_vec(), data).expect("same shape");
        let ng = self.needs(a);
        self.push(out, Op::Relu(a), ng)
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let s = self.value(a).data().iter().sum();
        let ng = self.needs(a);
        self.push(Tensor::scalar(s), Op::Sum(a), ng)
    }

    /// Mean of all elements; 0 for an empty tensor.
    pub fn mean(&mut self, a: Var) -> Var {
        let ta = self.value(a);
        let m = if ta.is_empty() {
            0.0
        } else {
            ta.data().iter().sum::<f64>() / ta.len() as f64
        };
        let ng = self.needs(a);
        self.push(Tensor::scalar(m), Op::Mean(a), ng)
    }

    /// Column-wise concatenation of matrices with equal row counts.
    pub fn concat(&mut self, parts: &[Var]) -> Result<Var, TensorError> {
        let rows = parts.first().map_or(0, |&p| self.value(p).rows());
        for &p in parts {
            let t = self.value(p);
            if !is_matrix(t) || t.rows() != rows {
                return Err(TensorError::ShapeMismatch {
                    op: "concat",
                    left: self.value(parts[0]).shape().to_vec(),
                    right: t.shape().to_vec(),
                });
            }
        }
        let cols: usize = parts.iter().map(|&p| self.value(p).cols()).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for &p in parts {
                data.extend_from_slice(self.value(p).row(r));
            }
        }
        let out = Tensor::matrix(rows, cols, data)?;
        let ng = parts.iter().any(|&p| self.needs(p));
        Ok(self.push(out, Op::Concat(parts.to_vec()), ng))
    }

    /// Output row `i` is row `index[i]` of `a`.
    pub fn gather_rows(&mut self, a: Var, index: Vec<usize>) -> Result<Var, TensorError> {
        let ta = self.value(a);
        let bound = ta.rows();
        if !is_matrix(ta) {
            return Err(TensorError::ShapeMismatch {
                op: "gather_rows",
                left: ta.shape().to_vec(),
                right: vec![],
            });
        }
        let c = ta.cols();
        let mut data = Vec::with_capacity(index.len() * c);
        for &i in &index {
            if i >= bound {
                return Err(TensorError::IndexOutOfRange {
                    op: "gather_rows",
                    index: i,
                    bound,
                });
            }
            data.extend_from_slice(ta.row(i));
        }
        let out = Tensor::matrix(index.len(), c, data)?;
        let ng = self.needs(a);
        Ok(self.push(out, Op::GatherRows(a, index), ng))
    }

    /// Sums row `i` of `a` into output row `index[i]`; the output has `n_out` rows.
    pub fn scatter_add_rows(
        &mut self,
        a: Var,
        index: Vec<usize>,
        n_out: usize,
    ) -> Result<Var, TensorError> {
        let ta = self.value(a);
        if !is_matrix(ta) || index.len() != ta.rows() {
            return Err(TensorError::ShapeMismatch {
                op: "scatter_add_rows",
                left: ta.shape().to_vec(),
                right: vec![index.len()],
            });
        }
        let c = ta.cols();
        let mut data = vec![0.0; n_out * c];
        for (r, &i) in index.iter().enumerate() {
            if i >= n_out {
                return Err(TensorError::IndexOutOfRange {
                    op: "scatter_add_rows",
                    index: i,
                    bound: n_out,
                });
            }
            for (d, s) in data[i * c..(i + 1) * c].iter_mut().zip(ta.row(r)) {
                *d += s;
            }
        }
        let out = Tensor::matrix(n_out, c, data)?;
        let ng = self.needs(a);
        Ok(self.push(out, Op::ScatterAddRows(a, index), ng))
    }

    /// Mean squared error over cells whose mask is true. Zero when every cell is masked.
    pub fn mse_masked(
        &mut self,
        pred: Var,
        target: &Tensor,
        mask: &[bool],
    ) -> Result<Var, TensorError> {
        let tp = self.value(pred);
        tp.same_shape(target, "mse_masked")?;
        if mask.len() != tp.len() {
            return Err(TensorError::ShapeMismatch {
                op: "mse_masked",
                left: tp.shape().to_vec(),
                right: vec![mask.len()],
            });
        }
        let mask: Vec<f64> = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        let count: f64 = mask.iter().sum();
        let sse: f64 = tp
            .data()
            .iter()
            .zip(target.data())
            .zip(&mask)
            .filter(|(_, &m)| m > 0.0)
            .map(|((p, t), _)| (p - t).powi(2))
            .sum();
        let loss = if count > 0.0 { sse / count } else { 0.0 };
        let target = target.data().to_vec();
        let ng = self.needs(pred);
        Ok(self.push(
            Tensor::scalar(loss),
            Op::MseMasked {
                pred,
                target,
                mask,
                count,
            },
            ng,
        ))
    }

    /// Mean binary cross-entropy of `sigmoid(logits)` against 0/1 targets over masked cells.
    pub fn bce_with_logits(
        &mut self,
        logits: Var,
        target: &Tensor,
        mask: &[bool],
    ) -> Result<Var, TensorError> {
        let tl = self.value(logits);
        tl.same_shape(target, "bce_with_logits")?;
        if mask.len() != tl.len() {
            return Err(TensorError::ShapeMismatch {
                op: "bce_with_logits",
                left: tl.shape().to_vec(),
                right: vec![mask.len()],
            });
        }
        let mask: Vec<f64> = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        let count: f64 = mask.iter().sum();
        let total: f64 = tl
            .data()
            .iter()
            .zip(target.data())
            .zip(&mask)
            .filter(|(_, &m)| m > 0.0)
            .map(|((&x, &y), _)| x.max(0.0) - x * y + (-x.abs()).exp().ln_1p())
            .sum();
        let loss = if count > 0.0 { total / count } else { 0.0 };
        let target = target.data().to_vec();
        let ng = self.needs(logits);
        Ok(self.push(
            Tensor::scalar(loss),
            Op::BceWithLogits {
                logits,
                target,
                mask,
                count,
            },
            ng,
        ))
    }

    /// Reverse pass from a one-element output.
    pub fn backward(&self, output: Var) -> Result<Gradients, TensorError> {
        let out = self.value(output);
        if out.len() != 1 {
            return Err(TensorError::NotScalar(out.shape().to_vec()));
        }
        let mut grads: Vec<Option<Tensor>> = vec![None; self.nodes.len()];
        grads[output.0] = Some(Tensor::new(out.shape().to_vec(), vec![1.0])?);

        for i in (0..=output.0).rev() {
            let Some(g) = grads[i].take() else { continue };
            let node = &self.nodes[i];
            if !node.needs_grad {
                continue;
            }
            self.propagate(node, &g, &mut grads);
            grads[i] = Some(g);
        }
        Ok(Gradients { grads })
    }

    fn accumulate(&self, grads: &mut [Option<Tensor>], v: Var, delta: Tensor) {
        if !self.needs(v) {
            return;
        }
        match &mut grads[v.0] {
            Some(g) => {
                for (a, b) in g.data_mut().iter_mut().zip(delta.data()) {
                    *a += b;
                }
            }
            slot @ None => *slot = Some(delta),
        }
    }

    fn propagate(&self, node: &Node, g: &Tensor, grads: &mut [Option<Tensor>]) {
        let shaped = |v: Var, data: Vec<f64>| {
            Tensor::new(self.value(v).shape().to_vec(), data).expect("grad shape")
        };
        match &node.op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (ta, tb) = (self.value(*a), self.value(*b));
                if self.needs(*a) {
                    self.accumulate(grads, *a, matmul_raw(view(g), view(tb).t()));
                }
                if self.needs(*b) {
                    self.accumulate(grads, *b, matmul_raw(view(ta).t(), view(g)));
                }
            }
            Op::Add(a, b) => {
                self.accumulate(grads, *a, g.clone());
                self.accumulate(grads, *b, g.clone());
            }
            Op::AddRow(a, b) => {
                self.accumulate(grads, *a, g.clone());
                if self.needs(*b) {
                    let col_sums = view(g).sum_axis(Axis(0)).to_vec();
                    self.accumulate(grads, *b, shaped(*b, col_sums));
                }
            }
            Op::Sub(a, b) => {
                self.accumulate(grads, *a, g.clone());
                self.accumulate(grads, *b, shaped(*b, g.data().iter().map(|x| -x).collect()));
            }
            Op::Mul(a, b) => {
                let (ta, tb) = (self.value(*a), self.value(*b));
                let da = g.data().iter().zip(tb.data()).map(|(x, y)| x * y).collect();
                let db = g.data().iter().zip(ta.data()).map(|(x, y)| x * y).collect();
                self.accumulate(grads, *a, shaped(*a, da));
                self.accumulate(grads, *b, shaped(*b, db));
            }
            Op::Scale(a, k) => {
                self.accumulate(
                    grads,
                    *a,
                    shaped(*a, g.data().iter().map(|x| x * k).collect()),
                );
            }
            Op::ScaleRows(a, f) => {
                let c = g.cols().max(1);
                let d = g
                    .data()
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x * f[i / c])
                    .collect();
                self.accumulate(grads, *a, shaped(*a, d));
            }
            Op::Relu(a) => {
                let d = g
                    .data()
                    .iter()
                    .zip(node.value.data())
                    .map(|(x, &y)| if y > 0.0 { *x } else { 0.0 })
                    .collect();
                self.accumulate(grads, *a, shaped(*a, d));
            }
            Op::Sum(a) => {
                let n = self.value(*a).len();
                self.accumulate(grads, *a, shaped(*a, vec![g.data()[0]; n]));
            }
            Op::Mean(a) => {
                let n = self.value(*a).len();
                let v = if n == 0 { 0.0 } else { g.data()[0] / n as f64 };
                self.accumulate(grads, *a, shaped(*a, vec![v; n]));
            }
            Op::Concat(parts) => {
                let mut offset = 0;
                let total = g.cols();
                for &p in parts {
                    let c = self.value(p).cols();
                    if self.needs(p) {
                        let mut d = Vec::with_capacity(g.rows() * c);
                        for r in 0..g.rows() {
                            d.extend_from_slice(
                                &g.data()[r * total + offset..r * total + offset + c],
                            );
                        }
                        self.accumulate(grads, p, shaped(p, d));
                    }
                    offset += c;
                }
            }
            Op::GatherRows(a, index) => {
                let ta = self.value(*a);
                let c = ta.cols();
                let mut d = vec![0.0; ta.len()];
                for (r, &i) in index.iter().enumerate() {
                    for (x, y) in d[i * c..(i + 1) * c].iter_mut().zip(g.row(r)) {
                        *x += y;
                    }
                }
                self.accumulate(grads, *a, shaped(*a, d));
            }
            Op::ScatterAddRows(a, index) => {
                let c = g.cols();
                let mut d = Vec::with_capacity(index.len() * c);
                for &i in index {
                    d.extend_from_slice(g.row(i));
                }
                self.accumulate(grads, *a, shaped(*a, d));
            }
            Op::MseMasked {
                pred,
                target,
                mask,
                count,
            } => {
                let k = if *count > 0.0 {
                    2.0 * g.data()[0] / count
                } else {
                    0.0
                };
                let d = self
                    .value(*pred)
                    .data()
                    .iter()
                    .zip(target)
                    .zip(mask)
                    .map(|((p, t), m)| k * m * (p - t))
                    .collect();
                self.accumulate(grads, *pred, shaped(*pred, d));
            }
            Op::BceWithLogits {
                logits,
                target,
                mask,
                count,
            } => {
                let k = if *count > 0.0 {
                    g.data()[0] / count
                } else {
                    0.0
                };
                let d = self
                    .value(*logits)
                    .data()
                    .iter()
                    .zip(target)
                    .zip(mask)
                    .map(|((&x, y), m)| k * m * (sigmoid(x) - y))
                    .collect();
                self.accumulate(grads, *logits, shaped(*logits, d));
            }
        }
    }
}

/// Logistic function, evaluated without overflow for large |x|.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
