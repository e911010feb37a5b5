//! Probabilistic range queries over uncertain moving objects in a plane with
//! restricted areas.
//!
//! Objects report a location and a maximum travel distance. The set of places
//! an object may currently be is a disc clipped by every restricted area it
//! cannot enter. A query asks which objects lie inside a rectangle and with
//! what probability.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod geometry;
mod overlay;
pub mod region;
pub mod rtree;
pub mod probability;
pub mod uncertainty;

pub use geometry::{
    point_in_polygon, polygon_area, span_of, Containment, GeometryError, Mbr, Point, Segment,
    SimplePolygon, Span, EPSILON,
};
pub use region::{
    point_in_region, region_area, region_difference, region_intersect, region_intersect_rect,
    region_subtract, regionset_area, regionset_subtract, BooleanError, Region, RegionSet,
};
pub use uncertainty::{
    approximate_circle, compute_uncertainty_basic, compute_uncertainty_basic_counted,
    compute_uncertainty_optimized, compute_uncertainty_optimized_counted, intersect_with_query,
    intersect_with_query_counted, AreaId, MovingObject, ObjectId, RestrictedArea,
    UncertaintyCounters, UncertaintyError,
};
pub use probability::{
    monte_carlo_estimate, probability_monte_carlo, probability_uniform, MonteCarloEstimate, Pdf,
    Probability, ProbabilityError, DEFAULT_SAMPLES,
};
pub use rtree::{node_bytes, AccessStats, IndexError, RTree, DEFAULT_FANOUT, PAGE_SIZE};
pub use engine::{
    object_seed, splitmix64, AnswerEntry, DensityFn, EngineConfig, EngineError, ObjectFailure, PdfModel,
    PrecomputeReport, QueryAnswer, QueryCounters, QueryOutcome, QueryRange, Strategy,
    UpdateEffect, Workspace, ZERO_AREA,
};
