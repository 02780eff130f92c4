use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::data::idx::IMAGE_PIXELS;
use crate::error::{Error, Result};
use crate::rng::standard_normal;

/// Convergence threshold: an eigenpair is accepted once its residual
/// norm drops below this fraction of the covariance scale.
pub const PCA_TOL: f64 = 1e-7;
/// Iteration budget per component before giving up.
pub const PCA_MAX_ITERS: usize = 1000;

/// Scale applied to raw pixels before any statistics.
const PIXEL_SCALE: f64 = 255.0;

/// Mean image and the leading principal axes of a training set, used to map
/// 784-pixel images to short feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaProjector {
    /// Mean of the scaled (0..=1) training pixels.
    pub mean: Vec<f64>,
    /// Orthonormal rows, leading component first.
    pub components: Vec<Vec<f64>>,
    /// Sample variance captured by each component, same order.
    pub eigenvalues: Vec<f64>,
}

impl PcaProjector {
    /// Project one raw image onto the fitted axes.
    pub fn transform(&self, image: &[u8; IMAGE_PIXELS]) -> Vec<f64> {
        let mut centered = [0.0f64; IMAGE_PIXELS];
        for (i, (&px, &mu)) in image.iter().zip(&self.mean).enumerate() {
            centered[i] = px as f64 / PIXEL_SCALE - mu;
        }
        self.components
            .iter()
            .map(|comp| comp.iter().zip(&centered).map(|(c, x)| c * x).sum())
            .collect()
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }
}

fn mat_vec(cov: &[f64], dim: usize, v: &[f64], out: &mut [f64]) {
    for (r, o) in out.iter_mut().enumerate() {
        let row = &cov[r * dim..(r + 1) * dim];
        *o = row.iter().zip(v).map(|(c, x)| c * x).sum();
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Remove the projections onto already-found components, keeping the iterate
/// in the orthogonal complement despite rounding drift.
fn orthogonalize(v: &mut [f64], prior: &[Vec<f64>]) {
    for comp in prior {
        let dot: f64 = comp.iter().zip(v.iter()).map(|(c, x)| c * x).sum();
        for (x, c) in v.iter_mut().zip(comp) {
            *x -= dot * c;
        }
    }
}

/// Dominant eigenpair of a symmetric matrix by power iteration, restricted to
/// the complement of `prior`. Accepts the current unit vector and its Rayleigh
/// quotient once the residual `||Cv - lambda v||` drops below `tol * scale`.
/// `scale` must come from the undeflated matrix (e.g. its largest diagonal
/// entry) so that kernel directions and degenerate clusters, whose iterates
/// would otherwise wander on rounding noise forever, converge immediately.
pub(crate) fn power_iterate(
    cov: &[f64],
    dim: usize,
    prior: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
    scale: f64,
    tol: f64,
    max_iters: usize,
    component: usize,
) -> Result<(Vec<f64>, f64)> {
    let mut v = loop {
        let mut candidate: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
        orthogonalize(&mut candidate, prior);
        let n = norm(&candidate);
        if n > 1e-12 {
            for x in &mut candidate {
                *x /= n;
            }
            break candidate;
        }
    };
    let mut w = vec![0.0; dim];
    for _ in 0..max_iters {
        mat_vec(cov, dim, &v, &mut w);
        orthogonalize(&mut w, prior);
        let lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let mut residual_sq = 0.0;
        for (&vi, &wi) in v.iter().zip(&w) {
            let r = wi - lambda * vi;
            residual_sq += r * r;
        }
        if residual_sq.sqrt() <= tol * scale {
            // Covariances are PSD, so a negative quotient is rounding noise.
            return Ok((v, lambda.max(0.0)));
        }
        // residual > 0 forces ||w|| > 0, so the normalization is safe.
        let wn = norm(&w);
        for (x, &wi) in v.iter_mut().zip(&w) {
            *x = wi / wn;
        }
    }
    Err(Error::PcaNonConvergence { component })
}

/// Fix the overall sign so the entry of largest magnitude is positive
/// (lowest index wins ties), making fitted axes reproducible.
fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Fit a PCA projector on raw images: scale pixels to [0, 1], center, build
/// the sample covariance, and peel off the leading eigenvectors one at a time
/// with power iteration and deflation.
pub fn pca_fit(
    images: &[[u8; IMAGE_PIXELS]],
    n_components: usize,
    seed: u64,
) -> Result<PcaProjector> {
    if images.len() < 2 {
        return Err(Error::PcaTooFewImages(images.len()));
    }
    if n_components == 0 || n_components > IMAGE_PIXELS {
        return Err(Error::InvalidHyper(format!(
            "component count {n_components} outside 1..={IMAGE_PIXELS}"
        )));
    }
    let n = images.len() as f64;
    let mut mean = vec![0.0f64; IMAGE_PIXELS];
    for img in images {
        for (m, &px) in mean.iter_mut().zip(img.iter()) {
            *m += px as f64 / PIXEL_SCALE;
        }
    }
    for m in &mut mean {
        *m /= n;
    }

    // Sample covariance, accumulated on the upper triangle then mirrored.
    let mut cov = vec![0.0f64; IMAGE_PIXELS * IMAGE_PIXELS];
    let mut centered = [0.0f64; IMAGE_PIXELS];
    for img in images {
        for (c, (&px, &mu)) in centered.iter_mut().zip(img.iter().zip(&mean)) {
            *c = px as f64 / PIXEL_SCALE - mu;
        }
        for r in 0..IMAGE_PIXELS {
            let xr = centered[r];
            if xr == 0.0 {
                continue;
            }
            let row = &mut cov[r * IMAGE_PIXELS..(r + 1) * IMAGE_PIXELS];
            for c in r..IMAGE_PIXELS {
                row[c] += xr * centered[c];
            }
        }
    }
    let denom = n - 1.0;
    for r in 0..IMAGE_PIXELS {
        for c in r..IMAGE_PIXELS {
            let val = cov[r * IMAGE_PIXELS + c] / denom;
            cov[r * IMAGE_PIXELS + c] = val;
            cov[c * IMAGE_PIXELS + r] = val;
        }
    }

    // Convergence yardstick: the largest per-pixel variance, fixed before any
    // deflation so late (or kernel) components are judged against the same bar.
    let scale =
        (0..IMAGE_PIXELS).map(|i| cov[i * IMAGE_PIXELS + i]).fold(0.0f64, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut components: Vec<Vec<f64>> = Vec::with_capacity(n_components);
    let mut eigenvalues = Vec::with_capacity(n_components);
    for comp_idx in 0..n_components {
        let (mut v, lambda) = power_iterate(
            &cov,
            IMAGE_PIXELS,
            &components,
            &mut rng,
            scale,
            PCA_TOL,
            PCA_MAX_ITERS,
            comp_idx,
        )?;
        canonical_sign(&mut v);
        // Deflate: remove the captured variance from the working matrix.
        if lambda != 0.0 {
            for r in 0..IMAGE_PIXELS {
                let vr = lambda * v[r];
                let row = &mut cov[r * IMAGE_PIXELS..(r + 1) * IMAGE_PIXELS];
                for (entry, &vc) in row.iter_mut().zip(&v) {
                    *entry -= vr * vc;
                }
            }
        }
        components.push(v);
        eigenvalues.push(lambda);
    }
    Ok(PcaProjector { mean, components, eigenvalues })
}
