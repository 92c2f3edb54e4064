//! Directed message-passing neural network with a feed-forward readout head.
//!
//! Hidden states live on directed bonds. With `x` atom features and `e` bond
//! features:
//!
//! ```text
//! h0[v→w] = relu(W_i · [x_v ‖ e_vw])
//! m[v→w]  = Σ_{k ∈ N(v)} h[k→v] − h[w→v]
//! h[v→w]  = relu(h0[v→w] + W_h · m[v→w])          (depth − 1 times)
//! h_v     = relu(W_o · [x_v ‖ Σ_{k ∈ N(v)} h[k→v]] + b_o)
//! z       = mean_v h_v                              (the fingerprint)
//! y       = FNN(z)
//! ```

mod features;

pub use features::{
    atom_features, bond_features, featurize, BatchGraph, MolGraph, ATOM_DIM, BOND_DIM,
    FEATURES_VERSION,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::Molecule;
use crate::tensor::{Linear, Mlp, ParamStore, Tape, Tensor, TensorError, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MpnnError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("parameter mismatch: {0}")]
    Params(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpnnConfig {
    pub hidden_size: usize,
    /// Message-passing steps, counting the input layer.
    pub depth: usize,
    /// Hidden layers in the head, before the output layer.
    pub ffn_layers: usize,
    pub ffn_hidden: usize,
    pub output_dim: usize,
}

impl Default for MpnnConfig {
    fn default() -> Self {
        MpnnConfig {
            hidden_size: 128,
            depth: 3,
            ffn_layers: 3,
            ffn_hidden: 128,
            output_dim: 1,
        }
    }
}

impl MpnnConfig {
    pub fn validate(&self) -> Result<(), MpnnError> {
        let fields = [
            ("hidden_size", self.hidden_size),
            ("depth", self.depth),
            ("ffn_layers", self.ffn_layers),
            ("ffn_hidden", self.ffn_hidden),
            ("output_dim", self.output_dim),
        ];
        for (name, v) in fields {
            if v == 0 {
                return Err(MpnnError::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Model weights plus the layer layout that indexes into them.
#[derive(Debug, Clone, PartialEq)]
pub struct Mpnn {
    config: MpnnConfig,
    params: ParamStore,
    w_i: Linear,
    w_h: Linear,
    w_o: Linear,
    head: Mlp,
    n_encoder_params: usize,
}

/// Graph-level outputs of one forward pass.
#[derive(Debug, Clone, Copy)]
pub struct Forward {
    /// Final directed-edge states, `n_edges × hidden`.
    pub edges: Var,
    /// Molecule embeddings, `n_mols × hidden`.
    pub embedding: Var,
    /// Head outputs, `n_mols × output_dim`.
    pub output: Var,
}

impl Mpnn {
    /// Xavier-initialized model seeded by `seed`.
    pub fn new(config: MpnnConfig, seed: u64) -> Result<Self, MpnnError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = config.hidden_size;
        let mut params = ParamStore::new();
        let w_i = Linear::new(&mut params, "W_i", ATOM_DIM + BOND_DIM, h, false, &mut rng);
        let w_h = Linear::new(&mut params, "W_h", h, h, false, &mut rng);
        let w_o = Linear::new(&mut params, "W_o", ATOM_DIM + h, h, true, &mut rng);
        let n_encoder_params = params.len();
        let head = Mlp::new(&mut params, "ffn", &head_dims(&config), &mut rng);
        Ok(Mpnn {
            config,
            params,
            w_i,
            w_h,
            w_o,
            head,
            n_encoder_params,
        })
    }

    /// Rebuilds a model from stored weights, checking names and shapes.
    pub fn from_params(config: MpnnConfig, params: ParamStore) -> Result<Self, MpnnError> {
        let template = Mpnn::new(config, 0)?;
        if params.names() != template.params.names() {
            return Err(MpnnError::Params(
                "parameter names differ from the config layout".into(),
            ));
        }
        for (i, (a, b)) in params
            .tensors()
            .iter()
            .zip(template.params.tensors())
            .enumerate()
        {
            if a.shape() != b.shape() {
                return Err(MpnnError::Params(format!(
                    "{}: shape {:?}, expected {:?}",
                    params.name(i),
                    a.shape(),
                    b.shape()
                )));
            }
        }
        Ok(Mpnn { params, ..template })
    }

    /// Replaces the head with a freshly initialized one of `output_dim` outputs,
    /// keeping the message-passing weights.
    pub fn reset_head(&self, output_dim: usize, seed: u64) -> Result<Self, MpnnError> {
        let config = MpnnConfig {
            output_dim,
            ..self.config
        };
        config.validate()?;
        let mut fresh = Mpnn::new(config, seed)?;
        for i in 0..self.n_encoder_params {
            *fresh.params.tensor_mut(i) = self.params.tensors()[i].clone();
        }
        Ok(fresh)
    }

    pub fn config(&self) -> &MpnnConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamStore {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.params
    }

    /// True for message-passing weights, false for head weights.
    pub fn is_encoder_param(&self, i: usize) -> bool {
        i < self.n_encoder_params
    }

    /// Runs the network on `batch` with parameters already bound to `tape`.
    pub fn forward(
        &self,
        tape: &mut Tape,
        params: &[Var],
        batch: &BatchGraph,
    ) -> Result<Forward, MpnnError> {
        let n_atoms = batch.n_atoms;
        let n_edges = batch.n_edges();
        let x = tape.constant(Tensor::matrix(
            n_atoms,
            ATOM_DIM,
            batch.atom_features.clone(),
        )?);
        let e = tape.constant(Tensor::matrix(
            n_edges,
            BOND_DIM,
            batch.edge_features.clone(),
        )?);

        let x_src = tape.gather_rows(x, batch.edge_src.clone())?;
        let input = tape.concat(&[x_src, e])?;
        let pre = self.w_i.forward(tape, params, input)?;
        let h0 = tape.relu(pre);
        let mut h = h0;
        for _ in 1..self.config.depth {
            let incoming = tape.scatter_add_rows(h, batch.edge_dst.clone(), n_atoms)?;
            let at_src = tape.gather_rows(incoming, batch.edge_src.clone())?;
            let reverse = tape.gather_rows(h, batch.edge_rev.clone())?;
            let message = tape.sub(at_src, reverse)?;
            let update = self.w_h.forward(tape, params, message)?;
            let sum = tape.add(h0, update)?;
            h = tape.relu(sum);
        }

        let incoming = tape.scatter_add_rows(h, batch.edge_dst.clone(), n_atoms)?;
        let atom_in = tape.concat(&[x, incoming])?;
        let atom_pre = self.w_o.forward(tape, params, atom_in)?;
        let atom_h = tape.relu(atom_pre);
        let pooled = tape.scatter_add_rows(atom_h, batch.atom_mol.clone(), batch.n_mols())?;
        let inv_sizes = batch
            .mol_ranges
            .iter()
            .map(|r| 1.0 / r.len() as f64)
            .collect();
        let embedding = tape.scale_rows(pooled, inv_sizes)?;
        let output = self.head.forward(tape, params, embedding)?;
        Ok(Forward {
            edges: h,
            embedding,
            output,
        })
    }

    fn run(&self, batch: &BatchGraph) -> Result<(Tape, Forward), MpnnError> {
        let mut tape = Tape::new();
        let vars = self.params.bind_frozen(&mut tape);
        let f = self.forward(&mut tape, &vars, batch)?;
        Ok((tape, f))
    }

    /// Head outputs for every molecule in the batch, `n_mols × output_dim`.
    pub fn predict_batch(&self, batch: &BatchGraph) -> Result<Tensor, MpnnError> {
        let (tape, f) = self.run(batch)?;
        Ok(tape.value(f.output).clone())
    }

    /// Molecule embeddings, `n_mols × hidden`.
    pub fn embed_batch(&self, batch: &BatchGraph) -> Result<Tensor, MpnnError> {
        let (tape, f) = self.run(batch)?;
        Ok(tape.value(f.embedding).clone())
    }

    /// Final directed-edge hidden states, `n_edges × hidden`.
    pub fn edge_states(&self, batch: &BatchGraph) -> Result<Tensor, MpnnError> {
        let (tape, f) = self.run(batch)?;
        Ok(tape.value(f.edges).clone())
    }

    /// Embeddings for many molecules, computed in parallel chunks.
    pub fn fingerprints(&self, mols: &[Molecule]) -> Vec<Vec<f64>> {
        mols.par_chunks(64)
            .flat_map_iter(|chunk| {
                let graphs: Vec<MolGraph> = chunk.iter().map(featurize).collect();
                let t = self
                    .embed_batch(&BatchGraph::new(&graphs))
                    .expect("model shapes are consistent");
                (0..t.rows()).map(|r| t.row(r).to_vec()).collect::<Vec<_>>()
            })
            .collect()
    }
}

/// The learned representation of one molecule: the mean-pooled atom states
/// that feed the head.
pub fn fingerprint(m: &Molecule, model: &Mpnn) -> Vec<f64> {
    let t = model
        .embed_batch(&BatchGraph::new([&featurize(m)]))
        .expect("model shapes are consistent");
    t.row(0).to_vec()
}

fn head_dims(c: &MpnnConfig) -> Vec<usize> {
    let mut dims = vec![c.hidden_size];
    dims.extend(std::iter::repeat_n(c.ffn_hidden, c.ffn_layers));
    dims.push(c.output_dim);
    dims
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{canonical_reindex, parse_smiles};
    use crate::tensor::grad_check_many;

    fn small() -> MpnnConfig {
        MpnnConfig {
            hidden_size: 16,
            depth: 3,
            ffn_layers: 2,
            ffn_hidden: 12,
            output_dim: 3,
        }
    }

    fn batch(smiles: &[&str]) -> BatchGraph {
        let graphs: Vec<MolGraph> = smiles
            .iter()
            .map(|s| featurize(&parse_smiles(s).unwrap()))
            .collect();
        BatchGraph::new(&graphs)
    }

    #[test]
    fn config_validation() {
        assert!(MpnnConfig {
            depth: 0,
            ..small()
        }
        .validate()
        .is_err());
        assert!(Mpnn::new(
            MpnnConfig {
                hidden_size: 0,
                ..small()
            },
            1
        )
        .is_err());
    }

    #[test]
    fn single_atom_skips_message_passing() {
        let model = Mpnn::new(small(), 3).unwrap();
        let b = batch(&["C"]);
        let out = model.predict_batch(&b).unwrap();

        // relu(W_o·[x ‖ 0] + b_o), then the head
        let mut tape = Tape::new();
        let vars = model.params.bind_frozen(&mut tape);
        let x = tape.constant(Tensor::matrix(1, ATOM_DIM, b.atom_features.clone()).unwrap());
        let zeros = tape.constant(Tensor::zeros(&[1, 16]));
        let cat = tape.concat(&[x, zeros]).unwrap();
        let pre = model.w_o.forward(&mut tape, &vars, cat).unwrap();
        let atom = tape.relu(pre);
        let y = model.head.forward(&mut tape, &vars, atom).unwrap();
        assert_eq!(tape.value(y), &out);
    }

    #[test]
    fn deterministic_and_batch_independent() {
        let model = Mpnn::new(small(), 5).unwrap();
        let together = model
            .predict_batch(&batch(&["CCO", "c1ccccc1", "CC(=O)N"]))
            .unwrap();
        let alone = model.predict_batch(&batch(&["c1ccccc1"])).unwrap();
        for (a, b) in together.row(1).iter().zip(alone.row(0)) {
            assert!((a - b).abs() <= 1e-6);
        }
        assert_eq!(
            model.predict_batch(&batch(&["CCO"])).unwrap(),
            model.predict_batch(&batch(&["CCO"])).unwrap()
        );
    }

    #[test]
    fn fingerprint_permutation_invariance() {
        let model = Mpnn::new(small(), 9).unwrap();
        let m = parse_smiles("CC(=O)Nc1ccc(O)cc1").unwrap();
        let perm: Vec<usize> = (0..m.n_atoms()).rev().collect();
        let p = canonical_reindex(&m, &perm).unwrap();
        let (a, b) = (fingerprint(&m, &model), fingerprint(&p, &model));
        assert_eq!(a.len(), 16);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-5 * x.abs().max(1.0));
        }
    }

    #[test]
    fn fingerprints_match_single_calls() {
        let model = Mpnn::new(small(), 2).unwrap();
        let mols: Vec<Molecule> = ["C", "CCN", "c1ccncc1"]
            .iter()
            .map(|s| parse_smiles(s).unwrap())
            .collect();
        let many = model.fingerprints(&mols);
        for (m, fp) in mols.iter().zip(&many) {
            for (a, b) in fp.iter().zip(fingerprint(m, &model)) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn depth_one_sees_only_neighbors() {
        let model = Mpnn::new(
            MpnnConfig {
                depth: 1,
                ..small()
            },
            4,
        )
        .unwrap();
        // edge 0 is C0→C1; the far end of the chain changes element
        let a = model.edge_states(&batch(&["CCCCC"])).unwrap();
        let b = model.edge_states(&batch(&["CCCCN"])).unwrap();
        assert_eq!(a.row(0), b.row(0));
        let deep = Mpnn::new(
            MpnnConfig {
                depth: 4,
                ..small()
            },
            4,
        )
        .unwrap();
        let a = deep.edge_states(&batch(&["CCCCC"])).unwrap();
        let b = deep.edge_states(&batch(&["CCCCN"])).unwrap();
        assert_ne!(a.row(1), b.row(1));
    }

    #[test]
    fn reset_head_keeps_encoder() {
        let model = Mpnn::new(small(), 1).unwrap();
        let fresh = model.reset_head(1, 99).unwrap();
        assert_eq!(fresh.config().output_dim, 1);
        let m = parse_smiles("CCO").unwrap();
        assert_eq!(fingerprint(&m, &model), fingerprint(&m, &fresh));
        assert!(Mpnn::from_params(small(), fresh.params().clone()).is_err());
        assert!(Mpnn::from_params(small(), model.params().clone()).is_ok());
    }

    #[test]
    fn full_graph_gradient_check() {
        let cfg = MpnnConfig {
            hidden_size: 6,
            depth: 3,
            ffn_layers: 1,
            ffn_hidden: 5,
            output_dim: 2,
        };
        let model = Mpnn::new(cfg, 11).unwrap();
        let b = batch(&["CC(=O)O", "c1ccoc1", "N"]);
        let target = Tensor::matrix(3, 2, vec![0.5, -1.0, 2.0, 0.0, -0.5, 1.0]).unwrap();
        let mask = [true, true, false, true, true, true];
        let err = grad_check_many(
            |tape, vars| {
                let f = model.forward(tape, vars, &b).map_err(|e| match e {
                    MpnnError::Tensor(t) => t,
                    other => panic!("{other}"),
                })?;
                tape.mse_masked(f.output, &target, &mask)
            },
            model.params().tensors(),
            1e-6,
        )
        .unwrap();
        assert!(err < 1e-3, "{err}");
    }
}
