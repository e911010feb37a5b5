//! Appearance probabilities.

use alloc::sync::Arc;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::geometry::Point;
use crate::region::{Region, RegionSet};

/// Default number of Monte Carlo draws per object.
pub const DEFAULT_SAMPLES: usize = 700;

/// Location density over an uncertainty region. Densities need not integrate
/// to one; only ratios of sums are used.
#[derive(Clone)]
pub enum Pdf {
    Uniform,
    /// `exp(-d^2 / (2 sigma^2))` around `mean`, without the normalising
    /// constant.
    DistortedGaussian { mean: Point, sigma: f64 },
    Custom(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl Pdf {
    pub fn gaussian(mean: Point, sigma: f64) -> Result<Self, ProbabilityError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ProbabilityError::InvalidSigma(sigma));
        }
        Ok(Pdf::DistortedGaussian { mean, sigma })
    }

    pub fn custom<F: Fn(Point) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Pdf::Custom(Arc::new(f))
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, Pdf::Uniform)
    }

    pub fn evaluate(&self, p: Point) -> f64 {
        match self {
            Pdf::Uniform => 1.0,
            Pdf::DistortedGaussian { mean, sigma } => {
                let dx = p.x - mean.x;
                let dy = p.y - mean.y;
                libm::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))
            }
            Pdf::Custom(f) => f(p),
        }
    }
}

impl fmt::Debug for Pdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pdf::Uniform => write!(f, "Uniform"),
            Pdf::DistortedGaussian { mean, sigma } => f
                .debug_struct("DistortedGaussian")
                .field("mean", mean)
                .field("sigma", sigma)
                .finish(),
            Pdf::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    /// Clamps into `[0, 1]`; NaN maps to zero.
    pub fn new(v: f64) -> Self {
        if v.is_nan() {
            return Probability(0.0);
        }
        Probability(v.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbabilityError {
    ZeroArea,
    /// No draw landed inside the region.
    SampleStarvation,
    InvalidSampleCount,
    InvalidSigma(f64),
    /// The density returned a negative or non-finite value.
    InvalidDensity(f64),
}

impl fmt::Display for ProbabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbabilityError::ZeroArea => write!(f, "uncertainty region has zero area"),
            ProbabilityError::SampleStarvation => {
                write!(f, "no sample point fell inside the uncertainty region")
            }
            ProbabilityError::InvalidSampleCount => write!(f, "sample count must be at least 1"),
            ProbabilityError::InvalidSigma(s) => write!(f, "standard deviation {s} is not positive"),
            ProbabilityError::InvalidDensity(v) => write!(f, "density evaluated to {v}"),
        }
    }
}

impl core::error::Error for ProbabilityError {}

/// `area(s) / area(u)`.
pub fn probability_uniform(u: &Region, s: &RegionSet) -> Result<Probability, ProbabilityError> {
    let au = u.area();
    if !(au > 0.0) {
        return Err(ProbabilityError::ZeroArea);
    }
    Ok(Probability::new(s.area() / au))
}

/// Outcome of one Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub probability: Probability,
    /// Draws that fell inside `u`.
    pub accepted: usize,
    /// Accepted draws that also fell inside `s`.
    pub hits: usize,
}

/// Weighted fraction of points drawn from `u` that land in `s`.
pub fn probability_monte_carlo(
    u: &Region,
    s: &RegionSet,
    pdf: &Pdf,
    n1: usize,
    seed: u64,
) -> Result<Probability, ProbabilityError> {
    monte_carlo_estimate(u, s, pdf, n1, seed).map(|e| e.probability)
}

/// Draws `n1` points uniformly over the bounding box of `u`, keeps those in
/// `u`, and returns the density-weighted share that also lies in `s`.
pub fn monte_carlo_estimate(
    u: &Region,
    s: &RegionSet,
    pdf: &Pdf,
    n1: usize,
    seed: u64,
) -> Result<MonteCarloEstimate, ProbabilityError> {
    if n1 == 0 {
        return Err(ProbabilityError::InvalidSampleCount);
    }
    let b = *u.mbr();
    let (w, h) = (b.width(), b.height());
    if !(w > 0.0 && h > 0.0) {
        return Err(ProbabilityError::ZeroArea);
    }
    let s_box = s.mbr();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    let mut inside = 0.0;
    let mut accepted = 0usize;
    let mut hits = 0usize;
    for _ in 0..n1 {
        let p = Point::new(b.lo.x + w * unit(&mut rng), b.lo.y + h * unit(&mut rng));
        if !u.contains(p) {
            continue;
        }
        let f = pdf.evaluate(p);
        if !(f >= 0.0 && f.is_finite()) {
            return Err(ProbabilityError::InvalidDensity(f));
        }
        accepted += 1;
        total += f;
        if s_box.is_some_and(|sb| sb.contains_point(p)) && s.contains(p) {
            hits += 1;
            inside += f;
        }
    }
    if accepted == 0 {
        return Err(ProbabilityError::SampleStarvation);
    }
    let probability = if hits == 0 {
        Probability::ZERO
    } else if hits == accepted {
        Probability::ONE
    } else if total > 0.0 {
        Probability::new(inside / total)
    } else {
        Probability::ZERO
    };
    Ok(MonteCarloEstimate {
        probability,
        accepted,
        hits,
    })
}

/// Uniform in `[0, 1)` with 53 random bits.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Mbr, SimplePolygon};
    use crate::region::region_intersect_rect;
    use alloc::vec;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> SimplePolygon {
        SimplePolygon::rectangle(Mbr::from_coords(x0, y0, x1, y1)).unwrap()
    }

    fn holed() -> Region {
        Region::new(rect(0.0, 0.0, 4.0, 4.0), vec![rect(1.0, 1.0, 3.0, 3.0)]).unwrap()
    }

    #[test]
    fn uniform_examples() {
        let u = Region::from_polygon(rect(0.0, 0.0, 1.0, 1.0));
        let half = region_intersect_rect(&u, &rect(0.5, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(probability_uniform(&u, &half).unwrap().value(), 0.5);
        assert_eq!(
            probability_uniform(&u, &RegionSet::single(u.clone())).unwrap().value(),
            1.0
        );
        let u = holed();
        let strip = region_intersect_rect(&u, &rect(0.0, 0.0, 4.0, 1.0)).unwrap();
        let p = probability_uniform(&u, &strip).unwrap().value();
        assert!(libm::fabs(p - 1.0 / 3.0) < 1e-15);
    }

    #[test]
    fn monte_carlo_edges() {
        let u = holed();
        let all = RegionSet::single(u.clone());
        let p = probability_monte_carlo(&u, &all, &Pdf::Uniform, 500, 9).unwrap();
        assert_eq!(p.value(), 1.0);
        let g = Pdf::gaussian(Point::new(0.5, 0.5), 0.8).unwrap();
        assert_eq!(probability_monte_carlo(&u, &all, &g, 500, 9).unwrap().value(), 1.0);
        let p = probability_monte_carlo(&u, &RegionSet::empty(), &g, 500, 9).unwrap();
        assert_eq!(p.value(), 0.0);
        assert_eq!(
            probability_monte_carlo(&u, &all, &Pdf::Uniform, 0, 9),
            Err(ProbabilityError::InvalidSampleCount)
        );
    }

    #[test]
    fn monte_carlo_is_replayable() {
        let u = holed();
        let s = region_intersect_rect(&u, &rect(0.0, 0.0, 4.0, 1.0)).unwrap();
        let g = Pdf::gaussian(Point::new(0.5, 0.5), 0.8).unwrap();
        let a = monte_carlo_estimate(&u, &s, &g, 700, 42).unwrap();
        let b = monte_carlo_estimate(&u, &s, &g, 700, 42).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_estimate(&u, &s, &g, 700, 43).unwrap();
        assert_ne!(a.probability, c.probability);
    }

    #[test]
    fn probability_clamps() {
        assert_eq!(Probability::new(1.0 + 1e-15).value(), 1.0);
        assert_eq!(Probability::new(-1e-18).value(), 0.0);
        assert_eq!(Probability::new(f64::NAN).value(), 0.0);
    }
}
