//! Central finite-difference check of tape gradients.

use super::{Tape, Tensor, TensorError, Var};

/// Max over components of `|g_ad − g_fd| / (|g_ad| + |g_fd| + 1e−8)` for a
/// scalar function of one tensor.
pub fn grad_check<F>(f: F, x: &Tensor, eps: f64) -> Result<f64, TensorError>
where
    F: Fn(&mut Tape, Var) -> Result<Var, TensorError>,
{
    grad_check_many(|tape, vars| f(tape, vars[0]), std::slice::from_ref(x), eps)
}

/// As [`grad_check`], over every component of every input.
pub fn grad_check_many<F>(f: F, xs: &[Tensor], eps: f64) -> Result<f64, TensorError>
where
    F: Fn(&mut Tape, &[Var]) -> Result<Var, TensorError>,
{
    let eval = |inputs: &[Tensor]| -> Result<f64, TensorError> {
        let mut tape = Tape::new();
        let vars: Vec<Var> = inputs.iter().map(|t| tape.param(t.clone())).collect();
        let out = f(&mut tape, &vars)?;
        tape.value(out).item()
    };

    let mut tape = Tape::new();
    let vars: Vec<Var> = xs.iter().map(|t| tape.param(t.clone())).collect();
    let out = f(&mut tape, &vars)?;
    let grads = tape.backward(out)?;

    let mut worst = 0.0f64;
    let mut inputs = xs.to_vec();
    for (k, &v) in vars.iter().enumerate() {
        for j in 0..xs[k].len() {
            let ad = grads.get(v).map_or(0.0, |g| g.data()[j]);
            let orig = xs[k].data()[j];
            inputs[k].data_mut()[j] = orig + eps;
            let up = eval(&inputs)?;
            inputs[k].data_mut()[j] = orig - eps;
            let down = eval(&inputs)?;
            inputs[k].data_mut()[j] = orig;
            let fd = (up - down) / (2.0 * eps);
            worst = worst.max((ad - fd).abs() / (ad.abs() + fd.abs() + 1e-8));
        }
    }
    Ok(worst)
}
