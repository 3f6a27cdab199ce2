//! Benchmark optimisation landscapes and random training transforms.
//!
//! Five classic continuous minimisation problems, each with known optimum
//! value zero so that a raw objective value is directly the error. During
//! training a landscape is wrapped with a per-axis random transform
//! (translate, scale, flip) so optimisers cannot memorise the optimum
//! location, feature spacing, or orientation.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{derive_stream, STREAM_INSTANCE};

/// Sum of squared components. Bowl-shaped, separable, unimodal.
pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|&c| c * c).sum()
}

/// Regularly spaced local optima curving towards a central bowl.
pub fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|&c| c * c - 10.0 * (2.0 * PI * c).cos() + 10.0)
        .sum()
}

/// Trigonometric system fit: `sum_i (A_i - B_i(x))^2` with integer
/// coefficient matrices `a`, `b` (row-major `d*d`) and target angles
/// `alpha`. Zero at `x = alpha`.
pub fn schwefel_2_13(x: &[f64], a: &[i64], b: &[i64], alpha: &[f64]) -> f64 {
    let d = x.len();
    debug_assert_eq!(a.len(), d * d);
    debug_assert_eq!(b.len(), d * d);
    debug_assert_eq!(alpha.len(), d);
    let mut total = 0.0;
    for i in 0..d {
        let mut ai = 0.0;
        let mut bi = 0.0;
        for j in 0..d {
            let (aij, bij) = (a[i * d + j] as f64, b[i * d + j] as f64);
            ai += aij * alpha[j].sin() + bij * alpha[j].cos();
            bi += aij * x[j].sin() + bij * x[j].cos();
        }
        total += (ai - bi) * (ai - bi);
    }
    total
}

fn f2(u: f64, v: f64) -> f64 {
    100.0 * (u * u - v) * (u * u - v) + (u - 1.0) * (u - 1.0)
}

fn f8(w: f64) -> f64 {
    w * w / 4000.0 - w.cos() + 1.0
}

/// Composition of Griewank's and Rosenbrock's functions over wrapped
/// component pairs, shifted so the optimum sits at the origin.
pub fn griewank_rosenbrock(x: &[f64]) -> f64 {
    let d = x.len();
    (0..d)
        .map(|i| {
            let u = x[i] + 1.0;
            let v = x[(i + 1) % d] + 1.0;
            f8(f2(u, v))
        })
        .sum()
}

fn schaffer_f6_pair(u: f64, v: f64) -> f64 {
    let s = u * u + v * v;
    let sin_term = s.sqrt().sin();
    let denom = 1.0 + 0.001 * s;
    0.5 + (sin_term * sin_term - 0.5) / (denom * denom)
}

/// Expanded Schaffer F6 over wrapped component pairs: concentric ridges
/// with little useful gradient.
pub fn expanded_schaffer_f6(x: &[f64]) -> f64 {
    let d = x.len();
    (0..d).map(|i| schaffer_f6_pair(x[i], x[(i + 1) % d])).sum()
}

#[derive(Debug, Clone)]
enum Kind {
    Sphere,
    Rastrigin,
    Schwefel213 {
        a: Vec<i64>,
        b: Vec<i64>,
        // A_i depends only on the target angles; cached at construction.
        target: Vec<f64>,
    },
    GriewankRosenbrock,
    SchafferF6,
}

/// An objective function with box bounds and a known optimum.
///
/// All bundled landscapes use the same bounds on every axis and have
/// optimum value zero, so `evaluate` directly reports the error.
#[derive(Debug, Clone)]
pub struct Landscape {
    name: &'static str,
    dim: usize,
    lower: f64,
    upper: f64,
    kind: Kind,
    optimum: Vec<f64>,
}

#[derive(Debug, Error)]
#[error("unknown landscape `{name}`; valid names: {}", LANDSCAPE_NAMES.join(", "))]
pub struct UnknownLandscape {
    pub name: String,
}

/// Names accepted by [`Landscape::by_name`].
pub const LANDSCAPE_NAMES: [&str; 5] = ["f1", "f9", "f12", "f13", "f14"];

impl Landscape {
    pub fn sphere(dim: usize) -> Self {
        assert!(dim >= 1);
        Landscape {
            name: "f1",
            dim,
            lower: -100.0,
            upper: 100.0,
            kind: Kind::Sphere,
            optimum: vec![0.0; dim],
        }
    }

    pub fn rastrigin(dim: usize) -> Self {
        assert!(dim >= 1);
        Landscape {
            name: "f9",
            dim,
            lower: -5.0,
            upper: 5.0,
            kind: Kind::Rastrigin,
            optimum: vec![0.0; dim],
        }
    }

    /// Builds a Schwefel 2.13 instance; coefficients and target angles are
    /// generated deterministically from `seed`.
    pub fn schwefel_2_13(dim: usize, seed: u64) -> Self {
        assert!(dim >= 1);
        let mut rng = derive_stream(seed, &[STREAM_INSTANCE]);
        let a: Vec<i64> = (0..dim * dim).map(|_| rng.gen_range(-100..=100)).collect();
        let b: Vec<i64> = (0..dim * dim).map(|_| rng.gen_range(-100..=100)).collect();
        let alpha: Vec<f64> = (0..dim).map(|_| rng.gen_range(-PI..=PI)).collect();
        let target = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        a[i * dim + j] as f64 * alpha[j].sin()
                            + b[i * dim + j] as f64 * alpha[j].cos()
                    })
                    .sum()
            })
            .collect();
        Landscape {
            name: "f12",
            dim,
            lower: -PI,
            upper: PI,
            optimum: alpha,
            kind: Kind::Schwefel213 { a, b, target },
        }
    }

    pub fn griewank_rosenbrock(dim: usize) -> Self {
        assert!(dim >= 1);
        Landscape {
            name: "f13",
            dim,
            lower: -3.0,
            upper: 1.0,
            kind: Kind::GriewankRosenbrock,
            optimum: vec![0.0; dim],
        }
    }

    pub fn schaffer_f6(dim: usize) -> Self {
        assert!(dim >= 1);
        Landscape {
            name: "f14",
            dim,
            lower: -100.0,
            upper: 100.0,
            kind: Kind::SchafferF6,
            optimum: vec![0.0; dim],
        }
    }

    /// Looks up a landscape by its registry name.
    pub fn by_name(name: &str, dim: usize, f12_seed: u64) -> Result<Self, UnknownLandscape> {
        match name {
            "f1" => Ok(Self::sphere(dim)),
            "f9" => Ok(Self::rastrigin(dim)),
            "f12" => Ok(Self::schwefel_2_13(dim, f12_seed)),
            "f13" => Ok(Self::griewank_rosenbrock(dim)),
            "f14" => Ok(Self::schaffer_f6(dim)),
            _ => Err(UnknownLandscape {
                name: name.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lower bound, identical on every axis.
    pub fn lower(&self) -> f64 {
        self.lower
    }

    /// Upper bound, identical on every axis.
    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn optimum(&self) -> &[f64] {
        &self.optimum
    }

    pub fn optimum_value(&self) -> f64 {
        0.0
    }

    /// Objective value at `x`. Panics if the dimension does not match.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(
            x.len(),
            self.dim,
            "landscape {} expects dimension {}",
            self.name,
            self.dim
        );
        match &self.kind {
            Kind::Sphere => sphere(x),
            Kind::Rastrigin => rastrigin(x),
            Kind::Schwefel213 { a, b, target, .. } => {
                let d = self.dim;
                let sins: Vec<f64> = x.iter().map(|c| c.sin()).collect();
                let coss: Vec<f64> = x.iter().map(|c| c.cos()).collect();
                let mut total = 0.0;
                for i in 0..d {
                    let mut bi = 0.0;
                    for j in 0..d {
                        bi += a[i * d + j] as f64 * sins[j] + b[i * d + j] as f64 * coss[j];
                    }
                    total += (target[i] - bi) * (target[i] - bi);
                }
                total
            }
            Kind::GriewankRosenbrock => griewank_rosenbrock(x),
            Kind::SchafferF6 => expanded_schaffer_f6(x),
        }
    }

    /// Error of `x`: objective value minus the known optimum value.
    pub fn error(&self, x: &[f64]) -> f64 {
        self.evaluate(x) - self.optimum_value()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().all(|&c| c >= self.lower && c <= self.upper)
    }
}

/// Per-axis random transform: translate by up to half the half-range,
/// scale by 50-200%, flip with probability one half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub translation: Vec<f64>,
    pub scale: Vec<f64>,
    pub flip: Vec<f64>,
}

impl TransformSpec {
    pub fn identity(dim: usize) -> Self {
        TransformSpec {
            translation: vec![0.0; dim],
            scale: vec![1.0; dim],
            flip: vec![1.0; dim],
        }
    }

    /// Samples a fresh transform for the given landscape.
    pub fn sample(rng: &mut ChaCha8Rng, landscape: &Landscape) -> Self {
        let dim = landscape.dim();
        let half_range = (landscape.upper() - landscape.lower()) / 2.0;
        let max_shift = 0.5 * half_range;
        let translation = (0..dim)
            .map(|_| rng.gen_range(-max_shift..=max_shift))
            .collect();
        let scale = (0..dim).map(|_| rng.gen_range(0.5..=2.0)).collect();
        let flip = (0..dim)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        TransformSpec {
            translation,
            scale,
            flip,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.translation.iter().all(|&t| t == 0.0)
            && self.scale.iter().all(|&s| s == 1.0)
            && self.flip.iter().all(|&f| f == 1.0)
    }
}

/// A landscape viewed through a [`TransformSpec`]: evaluating at `x`
/// evaluates the base at `flip_i * (x_i - t_i) / s_i` per axis. Bounds and
/// dimension are unchanged.
#[derive(Debug, Clone)]
pub struct TransformedLandscape<'a> {
    base: &'a Landscape,
    spec: TransformSpec,
}

impl<'a> TransformedLandscape<'a> {
    pub fn new(base: &'a Landscape, spec: TransformSpec) -> Self {
        assert_eq!(spec.translation.len(), base.dim());
        TransformedLandscape { base, spec }
    }

    pub fn untransformed(base: &'a Landscape) -> Self {
        TransformedLandscape {
            spec: TransformSpec::identity(base.dim()),
            base,
        }
    }

    pub fn base(&self) -> &Landscape {
        self.base
    }

    pub fn spec(&self) -> &TransformSpec {
        &self.spec
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.base.dim());
        let mut z = x.to_vec();
        for (i, c) in z.iter_mut().enumerate() {
            *c = self.spec.flip[i] * (*c - self.spec.translation[i]) / self.spec.scale[i];
        }
        self.base.evaluate(&z)
    }

    /// Where the base optimum lands after the transform.
    pub fn optimum(&self) -> Vec<f64> {
        self.base
            .optimum()
            .iter()
            .enumerate()
            .map(|(i, &o)| self.spec.translation[i] + self.spec.flip[i] * self.spec.scale[i] * o)
            .collect()
    }
}
