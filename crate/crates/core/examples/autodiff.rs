//! Reverse-mode gradients on a small MLP loss, checked against central
//! finite differences.

use molfm::tensor::{grad_check_many, Tape, Tensor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = Tensor::matrix(3, 2, vec![0.5, -1.0, 1.5, 0.2, -0.3, 0.8])?;
    let w1 = Tensor::matrix(2, 4, vec![0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7, -0.8])?;
    let w2 = Tensor::matrix(4, 1, vec![0.9, -0.1, 0.2, 0.3])?;
    let target = Tensor::matrix(3, 1, vec![1.0, 0.0, -1.0])?;
    let mask = vec![true, true, false];

    let loss = |tape: &mut Tape, p: &[molfm::tensor::Var]| {
        let h = tape.matmul(p[0], p[1])?;
        let h = tape.relu(h);
        let out = tape.matmul(h, p[2])?;
        tape.mse_masked(out, &target, &mask)
    };

    let mut tape = Tape::new();
    let vars: Vec<_> = [&x, &w1, &w2]
        .iter()
        .map(|t| tape.param((*t).clone()))
        .collect();
    let l = loss(&mut tape, &vars)?;
    let grads = tape.backward(l)?;
    println!("loss {:.6}", tape.value(l).item()?);
    println!("dL/dW2 {:?}", grads.get(vars[2]).map(|g| g.data().to_vec()));

    let err = grad_check_many(loss, &[x, w1, w2], 1e-6)?;
    println!("max relative error vs finite differences: {err:.2e}");
    Ok(())
}
