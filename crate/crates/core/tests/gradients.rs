use deidkit::faceswap::{reconstruction_loss, Identity, SwapGradients, SwapModel};
use deidkit::synth::{gen_identity_dataset, IdentitySpec};

const EPS: f64 = 1e-5;
/// Below this magnitude errors are judged absolutely; difference noise is ~1e-11.
const GRADIENT_FLOOR: f64 = 1e-6;

fn batch(identity: Identity, n: usize) -> Vec<Vec<f64>> {
    gen_identity_dataset::<f64>(&IdentitySpec::default_x(), &IdentitySpec::default_y(), n, 11)
        .unwrap()
        .into_iter()
        .filter(|s| s.identity == identity)
        .map(|s| s.pixels)
        .collect()
}

fn loss(model: &SwapModel<f64>, batch: &[&[f64]], identity: Identity) -> f64 {
    reconstruction_loss(model, batch, identity).unwrap()
}

/// Central differences for every parameter, in tensor order.
fn numeric_gradient(model: &SwapModel<f64>, batch: &[&[f64]], identity: Identity) -> Vec<Vec<f64>> {
    let mut probe = model.clone();
    let shapes: Vec<usize> = model.tensors().iter().map(|t| t.len()).collect();
    let mut out = Vec::new();
    for (t, &len) in shapes.iter().enumerate() {
        let mut g = vec![0.0; len];
        for (i, gi) in g.iter_mut().enumerate() {
            let orig = probe.tensors()[t][i];
            probe.tensors_mut()[t][i] = orig + EPS;
            let up = loss(&probe, batch, identity);
            probe.tensors_mut()[t][i] = orig - EPS;
            let down = loss(&probe, batch, identity);
            probe.tensors_mut()[t][i] = orig;
            *gi = (up - down) / (2.0 * EPS);
        }
        out.push(g);
    }
    out
}

fn max_relative_error(analytic: &SwapGradients<f64>, numeric: &[Vec<f64>]) -> (f64, f64) {
    let mut worst = 0.0f64;
    let mut worst_abs = 0.0f64;
    for (a, n) in analytic.tensors().iter().zip(numeric) {
        for (&a, &n) in a.iter().zip(n) {
            let denom = a.abs().max(n.abs()).max(GRADIENT_FLOOR);
            worst = worst.max((a - n).abs() / denom);
            worst_abs = worst_abs.max((a - n).abs());
        }
    }
    (worst, worst_abs)
}

#[test]
fn analytic_matches_central_differences() {
    let model = SwapModel::<f64>::init(5);
    for identity in [Identity::X, Identity::Y] {
        let data = batch(identity, 2);
        let refs: Vec<&[f64]> = data.iter().map(Vec::as_slice).collect();
        let (_, analytic) = model.loss_and_gradients(&refs, identity);
        let numeric = numeric_gradient(&model, &refs, identity);
        let (rel, abs) = max_relative_error(&analytic, &numeric);
        eprintln!("{identity:?}: max rel {rel:e} max abs {abs:e}");
        assert!(rel < 1e-4, "{identity:?}: max relative error {rel:e}");
    }
}

#[test]
fn other_decoder_receives_no_gradient() {
    let model = SwapModel::<f64>::init(9);
    let data = batch(Identity::X, 4);
    let refs: Vec<&[f64]> = data.iter().map(Vec::as_slice).collect();
    let (_, g) = model.loss_and_gradients(&refs, Identity::X);
    assert!(g.decoder_y.tensors().iter().all(|t| t.iter().all(|&v| v == 0.0)));
    assert!(g.decoder_x.tensors().iter().any(|t| t.iter().any(|&v| v != 0.0)));
    assert!(g.encoder.tensors().iter().any(|t| t.iter().any(|&v| v != 0.0)));
}
