//! Adam with bias correction.

use super::{ParamStore, Tensor, TensorError};

/// First and second moment estimates for one parameter tensor.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

/// One Adam update of `params` in place.
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) -> Result<(), TensorError> {
    if params.len() != grads.len() {
        return Err(TensorError::ShapeMismatch {
            op: "adam_step",
            left: vec![params.len()],
            right: vec![grads.len()],
        });
    }
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(TensorError::NonFinite(format!("gradient component {i}")));
    }
    if state.m.len() != params.len() {
        state.m = vec![0.0; params.len()];
        state.v = vec![0.0; params.len()];
    }
    state.t += 1;
    let bc1 = 1.0 - beta1.powi(state.t as i32);
    let bc2 = 1.0 - beta2.powi(state.t as i32);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    states: Vec<AdamState>,
}

impl Adam {
    pub fn new(n_params: usize) -> Self {
        Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            states: vec![AdamState::default(); n_params],
        }
    }

    /// Updates every parameter that has a gradient, with learning rate
    /// `lr(param_index)`. A zero rate leaves the parameter and its moments
    /// untouched. Parameters are re-rounded to `f32` precision afterwards.
    pub fn step(
        &mut self,
        store: &mut ParamStore,
        grads: &[Option<Tensor>],
        lr: impl Fn(usize) -> f64,
    ) -> Result<(), TensorError> {
        for (i, g) in grads.iter().enumerate() {
            if let Some(g) = g {
                if !g.all_finite() {
                    return Err(TensorError::NonFinite(format!(
                        "gradient of {}",
                        store.name(i)
                    )));
                }
            }
        }
        for (i, g) in grads.iter().enumerate() {
            let (Some(g), rate) = (g, lr(i)) else {
                continue;
            };
            if rate == 0.0 {
                continue;
            }
            let p = store.tensor_mut(i);
            adam_step(
                p.data_mut(),
                g.data(),
                &mut self.states[i],
                rate,
                self.beta1,
                self.beta2,
                self.eps,
            )?;
            for x in p.data_mut() {
                *x = *x as f32 as f64;
            }
            if !p.all_finite() {
                return Err(TensorError::NonFinite(format!(
                    "parameter {} after update",
                    store.name(i)
                )));
            }
        }
        Ok(())
    }
}
