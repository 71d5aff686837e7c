use rand::Rng;
use serde::{Deserialize, Serialize};

use super::stream_rng;
use crate::error::{Error, Result};
use crate::faceswap::{Identity, TinyFaceSample, IMAGE_SIDE, PIXELS};
use crate::scalar::Scalar;

const BACKGROUND: f64 = 0.1;
const FEATURE: f64 = 0.05;

/// Parameters of one rendered 16×16 cartoon face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceParams {
    pub center_x: f64,
    pub center_y: f64,
    pub axis_x: f64,
    pub axis_y: f64,
    pub eye_spacing: f64,
    /// Eye height relative to the face centre (negative is up).
    pub eye_y: f64,
    pub mouth_y: f64,
    /// Vertical offset of the mouth corners relative to its middle.
    pub mouth_curvature: f64,
    pub intensity: f64,
}

/// Half-widths of the uniform per-sample jitter ("expression").
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceJitter {
    pub shift: f64,
    pub axis: f64,
    pub eye: f64,
    pub mouth: f64,
    pub intensity: f64,
}

impl FaceJitter {
    pub const NONE: FaceJitter = FaceJitter {
        shift: 0.0,
        axis: 0.0,
        eye: 0.0,
        mouth: 0.0,
        intensity: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentitySpec {
    pub base: FaceParams,
    pub jitter: FaceJitter,
}

const DEFAULT_JITTER: FaceJitter = FaceJitter {
    shift: 0.4,
    axis: 0.3,
    eye: 0.3,
    mouth: 0.6,
    intensity: 0.05,
};

impl IdentitySpec {
    /// Broad bright face, wide-set eyes, smiling.
    pub fn default_x() -> Self {
        IdentitySpec {
            base: FaceParams {
                center_x: 7.5,
                center_y: 7.5,
                axis_x: 6.5,
                axis_y: 6.0,
                eye_spacing: 6.0,
                eye_y: -1.5,
                mouth_y: 3.0,
                mouth_curvature: -1.5,
                intensity: 0.85,
            },
            jitter: DEFAULT_JITTER,
        }
    }

    /// Narrow darker face, close-set high eyes, frowning.
    pub fn default_y() -> Self {
        IdentitySpec {
            base: FaceParams {
                center_x: 7.5,
                center_y: 7.5,
                axis_x: 4.5,
                axis_y: 7.3,
                eye_spacing: 3.5,
                eye_y: -2.8,
                mouth_y: 4.0,
                mouth_curvature: 1.5,
                intensity: 0.45,
            },
            jitter: DEFAULT_JITTER,
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> FaceParams {
        let mut j = |w: f64| if w > 0.0 { rng.random_range(-w..=w) } else { 0.0 };
        let b = self.base;
        let jt = self.jitter;
        FaceParams {
            center_x: b.center_x + j(jt.shift),
            center_y: b.center_y + j(jt.shift),
            axis_x: b.axis_x + j(jt.axis),
            axis_y: b.axis_y + j(jt.axis),
            eye_spacing: b.eye_spacing + j(jt.eye),
            eye_y: b.eye_y + j(jt.eye),
            mouth_y: b.mouth_y + j(jt.mouth) * 0.4,
            mouth_curvature: b.mouth_curvature + j(jt.mouth),
            intensity: b.intensity + j(jt.intensity),
        }
    }
}

fn blend(under: f64, over: f64, alpha: f64) -> f64 {
    under + alpha.clamp(0.0, 1.0) * (over - under)
}

/// Renders a face with anti-aliased edges; every pixel lies in `[0, 1]`.
pub fn render_face(p: &FaceParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(PIXELS);
    for row in 0..IMAGE_SIDE {
        for col in 0..IMAGE_SIDE {
            let (x, y) = (col as f64, row as f64);
            let (dx, dy) = (x - p.center_x, y - p.center_y);
            let r = ((dx / p.axis_x).powi(2) + (dy / p.axis_y).powi(2)).sqrt();
            let face_alpha = (1.0 - r) * p.axis_x.min(p.axis_y) + 0.5;
            let mut v = blend(BACKGROUND, p.intensity, face_alpha);
            for side in [-0.5, 0.5] {
                let ex = p.center_x + side * p.eye_spacing;
                let ey = p.center_y + p.eye_y;
                let d = ((x - ex).powi(2) + (y - ey).powi(2)).sqrt();
                v = blend(v, FEATURE, 1.6 - d);
            }
            if dx.abs() <= 3.2 {
                let curve = p.center_y + p.mouth_y + p.mouth_curvature * (dx / 3.0).powi(2);
                v = blend(v, FEATURE, 1.0 - (y - curve).abs() / 0.8);
            }
            out.push(v.clamp(0.0, 1.0));
        }
    }
    out
}

/// `n_per_identity` jittered faces of X followed by as many of Y.
pub fn gen_identity_dataset<T: Scalar>(
    spec_x: &IdentitySpec,
    spec_y: &IdentitySpec,
    n_per_identity: usize,
    seed: u64,
) -> Result<Vec<TinyFaceSample<T>>> {
    if n_per_identity == 0 {
        return Err(Error::InvalidArgument("need at least one sample per identity".into()));
    }
    let mut out = Vec::with_capacity(2 * n_per_identity);
    for (stream, (identity, spec)) in [(Identity::X, spec_x), (Identity::Y, spec_y)]
        .into_iter()
        .enumerate()
    {
        let mut rng = stream_rng(seed, stream as u64);
        for _ in 0..n_per_identity {
            let params = spec.sample(&mut rng);
            out.push(TinyFaceSample {
                pixels: render_face(&params).into_iter().map(T::lit).collect(),
                identity,
                params,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::{centroid, euclidean_distance};

    #[test]
    fn zero_jitter_gives_identical_faces() {
        let x = IdentitySpec {
            jitter: FaceJitter::NONE,
            ..IdentitySpec::default_x()
        };
        let data = gen_identity_dataset::<f64>(&x, &IdentitySpec::default_y(), 4, 0).unwrap();
        let xs: Vec<_> = data.iter().filter(|s| s.identity == Identity::X).collect();
        assert!(xs.iter().all(|s| s.pixels == xs[0].pixels));
        assert!(data.iter().all(|s| s.pixels.iter().all(|&v| (0.0..=1.0).contains(&v))));
    }

    #[test]
    fn same_seed_same_dataset() {
        let (x, y) = (IdentitySpec::default_x(), IdentitySpec::default_y());
        let a = gen_identity_dataset::<f64>(&x, &y, 20, 7).unwrap();
        assert_eq!(a, gen_identity_dataset::<f64>(&x, &y, 20, 7).unwrap());
        assert_ne!(a, gen_identity_dataset::<f64>(&x, &y, 20, 8).unwrap());
        assert!(gen_identity_dataset::<f64>(&x, &y, 0, 7).is_err());
    }

    #[test]
    fn classes_are_well_separated() {
        let data = gen_identity_dataset::<f64>(&IdentitySpec::default_x(), &IdentitySpec::default_y(), 200, 3).unwrap();
        let class = |id| -> Vec<&[f64]> {
            data.iter().filter(|s| s.identity == id).map(|s| s.pixels.as_slice()).collect()
        };
        let (xs, ys) = (class(Identity::X), class(Identity::Y));
        let mean_pairwise = |a: &[&[f64]], b: &[&[f64]], skip_diag: bool| {
            let (mut sum, mut n) = (0.0, 0usize);
            for (i, p) in a.iter().enumerate() {
                for (j, q) in b.iter().enumerate() {
                    if skip_diag && i == j {
                        continue;
                    }
                    sum += euclidean_distance(p, q).unwrap();
                    n += 1;
                }
            }
            sum / n as f64
        };
        let within = 0.5 * (mean_pairwise(&xs, &xs, true) + mean_pairwise(&ys, &ys, true));
        let between = mean_pairwise(&xs, &ys, false);
        assert!(between >= 3.0 * within, "between {between} within {within}");
        let cx = centroid(xs.iter().copied()).unwrap();
        let cy = centroid(ys.iter().copied()).unwrap();
        assert!(euclidean_distance(&cx, &cy).unwrap() > 2.0);
    }
}
