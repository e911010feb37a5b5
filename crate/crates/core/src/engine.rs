//! Query strategies over a workspace of moving objects and restricted areas.
//!
//! * `B`: linear scans over objects and areas.
//! * `S`: index lookups, basic uncertainty regions, hole-by-hole clipping.
//! * `SO`: index lookups, optimized uncertainty regions and clipping.
//! * `PSO`: uncertainty regions computed ahead of time and indexed.
//!
//! All four return identical answers for the same inputs and seed.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{point_in_polygon, Containment, GeometryError, Mbr, Point, SimplePolygon};
use crate::probability::{
    monte_carlo_estimate, probability_uniform, Pdf, Probability, ProbabilityError,
    DEFAULT_SAMPLES,
};
use crate::region::{region_intersect_rect, Region, RegionSet};
use crate::rtree::{AccessStats, IndexError, RTree, DEFAULT_FANOUT};
use crate::uncertainty::{
    approximate_circle, compute_uncertainty_basic_counted, compute_uncertainty_optimized_counted,
    intersect_with_query_counted, AreaId, MovingObject, ObjectId, RestrictedArea,
    UncertaintyCounters, UncertaintyError,
};

/// Below this area an intersection counts as empty under the uniform density.
pub const ZERO_AREA: f64 = 1e-12;

/// Unnormalized density for an object at a point.
pub type DensityFn = Arc<dyn Fn(&MovingObject, Point) -> f64 + Send + Sync>;

/// Builds the density used for one object.
#[derive(Clone)]
pub enum PdfModel {
    Uniform,
    /// Gaussian centred on the recorded location with
    /// `sigma = sigma_fraction * tau`.
    DistortedGaussian { sigma_fraction: f64 },
    Custom(DensityFn),
}

impl PdfModel {
    /// Gaussian with `sigma = tau / 5`.
    pub fn gaussian() -> Self {
        PdfModel::DistortedGaussian {
            sigma_fraction: 0.2,
        }
    }

    pub fn custom<F: Fn(&MovingObject, Point) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        PdfModel::Custom(Arc::new(f))
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, PdfModel::Uniform)
    }

    pub fn pdf_for(&self, o: &MovingObject) -> Pdf {
        match self {
            PdfModel::Uniform => Pdf::Uniform,
            PdfModel::DistortedGaussian { sigma_fraction } => Pdf::DistortedGaussian {
                mean: o.location,
                sigma: sigma_fraction * o.tau,
            },
            PdfModel::Custom(f) => {
                let f = f.clone();
                let o = o.clone();
                Pdf::custom(move |p| f(&o, p))
            }
        }
    }
}

impl fmt::Debug for PdfModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdfModel::Uniform => write!(f, "Uniform"),
            PdfModel::DistortedGaussian { sigma_fraction } => {
                write!(f, "DistortedGaussian({sigma_fraction})")
            }
            PdfModel::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Edge count of the polygon replacing each circle.
    pub xi: usize,
    /// Monte Carlo draws per object for non-uniform densities.
    pub n1: usize,
    pub fanout: usize,
    pub pdf: PdfModel,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            xi: 32,
            n1: DEFAULT_SAMPLES,
            fanout: DEFAULT_FANOUT,
            pdf: PdfModel::Uniform,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    B,
    S,
    SO,
    PSO,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::B, Strategy::S, Strategy::SO, Strategy::PSO];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::B => "B",
            Strategy::S => "S",
            Strategy::SO => "SO",
            Strategy::PSO => "PSO",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Strategy {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "B" => Ok(Strategy::B),
            "S" => Ok(Strategy::S),
            "SO" => Ok(Strategy::SO),
            "PSO" => Ok(Strategy::PSO),
            _ => Err(EngineError::UnknownStrategy),
        }
    }
}

/// Axis-aligned query rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryRange {
    rect: SimplePolygon,
}

impl QueryRange {
    pub fn new(mbr: Mbr) -> Result<Self, GeometryError> {
        Ok(QueryRange {
            rect: SimplePolygon::rectangle(mbr)?,
        })
    }

    pub fn rect(&self) -> &SimplePolygon {
        &self.rect
    }

    pub fn mbr(&self) -> &Mbr {
        self.rect.mbr()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnswerEntry {
    pub id: ObjectId,
    pub probability: Probability,
}

/// Objects with nonzero probability, sorted by id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QueryAnswer {
    pub entries: Vec<AnswerEntry>,
}

impl QueryAnswer {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: ObjectId) -> Option<Probability> {
        self.entries
            .binary_search_by(|e| e.id.cmp(&id))
            .ok()
            .map(|i| self.entries[i].probability)
    }

    pub fn ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.entries.iter().map(|e| e.id)
    }

    /// Equal ids and bit-identical probabilities.
    pub fn bit_identical(&self, other: &QueryAnswer) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|(a, b)| {
                a.id == b.id && a.probability.value().to_bits() == b.probability.value().to_bits()
            })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryCounters {
    pub candidate_objects: u64,
    /// Sum over candidate objects of their candidate areas.
    pub candidate_areas: u64,
    pub geometry: UncertaintyCounters,
    pub mc_draws: u64,
    pub mc_accepted: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryOutcome {
    pub answer: QueryAnswer,
    pub stats: AccessStats,
    pub counters: QueryCounters,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObjectFailure {
    Uncertainty(UncertaintyError),
    Probability(ProbabilityError),
}

impl fmt::Display for ObjectFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectFailure::Uncertainty(e) => write!(f, "{e}"),
            ObjectFailure::Probability(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ObjectFailure {}

#[derive(Clone, Debug, PartialEq)]
pub enum EngineError {
    DuplicateObject(ObjectId),
    DuplicateArea(AreaId),
    UnknownObject(ObjectId),
    /// The location lies strictly inside a restricted area.
    RestrictedLocation { object: ObjectId, area: AreaId },
    NotPrecomputed,
    PrecomputeNotStarted,
    InvalidConfig(&'static str),
    UnknownStrategy,
    Geometry(GeometryError),
    Index(IndexError),
    Object { id: ObjectId, failure: ObjectFailure },
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::DuplicateObject(id) => write!(f, "object {id} appears twice"),
            EngineError::DuplicateArea(id) => write!(f, "restricted area {id} appears twice"),
            EngineError::UnknownObject(id) => write!(f, "no object with id {id}"),
            EngineError::RestrictedLocation { object, area } => {
                write!(f, "object {object} lies inside restricted area {area}")
            }
            EngineError::NotPrecomputed => write!(f, "uncertainty regions are not precomputed"),
            EngineError::PrecomputeNotStarted => write!(f, "precomputation has not been started"),
            EngineError::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            EngineError::UnknownStrategy => write!(f, "unknown strategy (expected B, S, SO or PSO)"),
            EngineError::Geometry(e) => write!(f, "{e}"),
            EngineError::Index(e) => write!(f, "{e}"),
            EngineError::Object { id, failure } => write!(f, "object {id}: {failure}"),
        }
    }
}

impl core::error::Error for EngineError {}

impl From<IndexError> for EngineError {
    fn from(e: IndexError) -> Self {
        EngineError::Index(e)
    }
}

impl From<GeometryError> for EngineError {
    fn from(e: GeometryError) -> Self {
        EngineError::Geometry(e)
    }
}

fn object_err(id: ObjectId) -> impl Fn(UncertaintyError) -> EngineError {
    move |e| EngineError::Object {
        id,
        failure: ObjectFailure::Uncertainty(e),
    }
}

/// Mixes a 64-bit value.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Monte Carlo seed for one object within one query; independent of the order
/// in which objects are processed.
pub fn object_seed(query_seed: u64, id: ObjectId) -> u64 {
    splitmix64(query_seed ^ splitmix64(id.0))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecomputeReport {
    pub objects_processed: u64,
    /// Regions recomputed because an already processed object moved.
    pub recomputed_on_update: u64,
    pub geometry: UncertaintyCounters,
}

#[derive(Clone, Debug)]
enum PrecomputeState {
    NotStarted,
    InProgress { queue: Vec<ObjectId>, next: usize },
    Done,
}

/// What `report_location` did with the precomputed region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateEffect {
    /// No precomputation is active.
    None,
    /// Region rebuilt immediately.
    Recomputed,
    /// Object not processed yet; it will be picked up with its new location.
    Deferred,
}

#[derive(Clone)]
pub struct Workspace {
    config: EngineConfig,
    objects: BTreeMap<ObjectId, MovingObject>,
    areas: BTreeMap<AreaId, RestrictedArea>,
    index_o: RTree,
    index_r: RTree,
    index_u: RTree,
    precomputed: BTreeMap<ObjectId, Region>,
    state: PrecomputeState,
    report: PrecomputeReport,
}

impl Workspace {
    pub fn new(
        config: EngineConfig,
        objects: Vec<MovingObject>,
        areas: Vec<RestrictedArea>,
    ) -> Result<Self, EngineError> {
        if config.xi < 3 {
            return Err(EngineError::InvalidConfig("xi must be at least 3"));
        }
        if config.n1 == 0 {
            return Err(EngineError::InvalidConfig("n1 must be at least 1"));
        }
        if let PdfModel::DistortedGaussian { sigma_fraction } = config.pdf {
            if !(sigma_fraction > 0.0 && sigma_fraction.is_finite()) {
                return Err(EngineError::InvalidConfig("sigma fraction must be positive"));
            }
        }
        let mut area_map = BTreeMap::new();
        for a in areas {
            let id = a.id;
            if area_map.insert(id, a).is_some() {
                return Err(EngineError::DuplicateArea(id));
            }
        }
        let index_r = RTree::build(
            area_map.values().map(|a| (*a.mbr(), a.id.0)).collect(),
            config.fanout,
        )?;
        let mut obj_map = BTreeMap::new();
        for o in objects {
            let id = o.id;
            if obj_map.insert(id, o).is_some() {
                return Err(EngineError::DuplicateObject(id));
            }
        }
        let index_o = RTree::build(
            obj_map.values().map(|o| (o.circle_mbr(), o.id.0)).collect(),
            config.fanout,
        )?;
        let index_u = RTree::new(config.fanout)?;
        let w = Workspace {
            config,
            objects: obj_map,
            areas: area_map,
            index_o,
            index_r,
            index_u,
            precomputed: BTreeMap::new(),
            state: PrecomputeState::NotStarted,
            report: PrecomputeReport::default(),
        };
        for o in w.objects.values() {
            w.check_location(o.id, o.location)?;
        }
        Ok(w)
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// Replaces the density model; regions and indexes are unaffected.
    pub fn set_pdf(&mut self, pdf: PdfModel) {
        self.config.pdf = pdf;
    }

    pub fn objects(&self) -> impl Iterator<Item = &MovingObject> {
        self.objects.values()
    }

    pub fn areas(&self) -> impl Iterator<Item = &RestrictedArea> {
        self.areas.values()
    }

    pub fn object(&self, id: ObjectId) -> Option<&MovingObject> {
        self.objects.get(&id)
    }

    pub fn area(&self, id: AreaId) -> Option<&RestrictedArea> {
        self.areas.get(&id)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn area_count(&self) -> usize {
        self.areas.len()
    }

    pub fn object_index(&self) -> &RTree {
        &self.index_o
    }

    pub fn area_index(&self) -> &RTree {
        &self.index_r
    }

    fn check_location(&self, id: ObjectId, l: Point) -> Result<(), EngineError> {
        if !l.is_finite() {
            return Err(EngineError::Geometry(GeometryError::NonFinite));
        }
        let mut st = AccessStats::default();
        for a in self.index_r.range_search(&Mbr::new(l, l), &mut st) {
            let area = &self.areas[&AreaId(a)];
            if point_in_polygon(l, &area.shape) == Containment::Inside {
                return Err(EngineError::RestrictedLocation {
                    object: id,
                    area: area.id,
                });
            }
        }
        Ok(())
    }

    /// Restricted areas whose boxes meet the object's circle box, by id.
    fn candidate_areas(&self, o: &MovingObject, stats: &mut AccessStats) -> Vec<&RestrictedArea> {
        let mut ids = self.index_r.range_search(&o.circle_mbr(), stats);
        ids.sort_unstable();
        ids.into_iter().map(|a| &self.areas[&AreaId(a)]).collect()
    }

    fn candidate_areas_scan(
        &self,
        o: &MovingObject,
        stats: &mut AccessStats,
    ) -> Vec<&RestrictedArea> {
        let b = o.circle_mbr();
        stats.records_scanned += self.areas.len() as u64;
        self.areas.values().filter(|a| a.mbr().intersects(&b)).collect()
    }

    fn circle(&self, o: &MovingObject) -> Result<SimplePolygon, EngineError> {
        approximate_circle(o.location, o.tau, self.config.xi).map_err(object_err(o.id))
    }

    pub fn query(&self, strategy: Strategy, r: &QueryRange, seed: u64) -> Result<QueryOutcome, EngineError> {
        match strategy {
            Strategy::B => self.query_b(r, seed),
            Strategy::S => self.query_s(r, seed),
            Strategy::SO => self.query_so(r, seed),
            Strategy::PSO => self.query_pso(r, seed),
        }
    }

    /// Linear scan over every object and, per candidate, every area.
    pub fn query_b(&self, r: &QueryRange, seed: u64) -> Result<QueryOutcome, EngineError> {
        let mut stats = AccessStats::default();
        let mut counters = QueryCounters::default();
        let mut answer = QueryAnswer::default();
        stats.records_scanned += self.objects.len() as u64;
        for o in self.objects.values() {
            if !o.circle_mbr().intersects(r.mbr()) {
                continue;
            }
            counters.candidate_objects += 1;
            let cands = self.candidate_areas_scan(o, &mut stats);
            counters.candidate_areas += cands.len() as u64;
            let e = self.circle(o)?;
            let u = compute_uncertainty_basic_counted(&e, &cands, o.location, &mut counters.geometry)
                .map_err(object_err(o.id))?;
            let s = region_intersect_rect(&u, r.rect())
                .map_err(|e| object_err(o.id)(UncertaintyError::Boolean(e)))?;
            self.push_entry(&mut answer, &mut counters, o, &u, &s, seed)?;
        }
        Ok(QueryOutcome {
            answer,
            stats,
            counters,
        })
    }

    /// Index lookups, basic uncertainty regions, and clipping that subtracts
    /// every hole in stored order.
    pub fn query_s(&self, r: &QueryRange, seed: u64) -> Result<QueryOutcome, EngineError> {
        let mut stats = AccessStats::default();
        let mut counters = QueryCounters::default();
        let mut answer = QueryAnswer::default();
        let mut ids = self.index_o.range_search(r.mbr(), &mut stats);
        ids.sort_unstable();
        for id in ids {
            let o = &self.objects[&ObjectId(id)];
            counters.candidate_objects += 1;
            let cands = self.candidate_areas(o, &mut stats);
            counters.candidate_areas += cands.len() as u64;
            let e = self.circle(o)?;
            let u = compute_uncertainty_basic_counted(&e, &cands, o.location, &mut counters.geometry)
                .map_err(object_err(o.id))?;
            let s = region_intersect_rect(&u, r.rect())
                .map_err(|e| object_err(o.id)(UncertaintyError::Boolean(e)))?;
            self.push_entry(&mut answer, &mut counters, o, &u, &s, seed)?;
        }
        Ok(QueryOutcome {
            answer,
            stats,
            counters,
        })
    }

    /// Index lookups with the optimized region construction and clipping.
    pub fn query_so(&self, r: &QueryRange, seed: u64) -> Result<QueryOutcome, EngineError> {
        let mut stats = AccessStats::default();
        let mut counters = QueryCounters::default();
        let mut answer = QueryAnswer::default();
        let mut ids = self.index_o.range_search(r.mbr(), &mut stats);
        ids.sort_unstable();
        for id in ids {
            let o = &self.objects[&ObjectId(id)];
            counters.candidate_objects += 1;
            let cands = self.candidate_areas(o, &mut stats);
            counters.candidate_areas += cands.len() as u64;
            let e = self.circle(o)?;
            let u = compute_uncertainty_optimized_counted(&e, &cands, o.location, &mut counters.geometry)
                .map_err(object_err(o.id))?;
            let s = intersect_with_query_counted(&u, r.rect(), &mut counters.geometry)
                .map_err(object_err(o.id))?;
            self.push_entry(&mut answer, &mut counters, o, &u, &s, seed)?;
        }
        Ok(QueryOutcome {
            answer,
            stats,
            counters,
        })
    }

    /// Lookups on the index of precomputed regions.
    pub fn query_pso(&self, r: &QueryRange, seed: u64) -> Result<QueryOutcome, EngineError> {
        if !matches!(self.state, PrecomputeState::Done) {
            return Err(EngineError::NotPrecomputed);
        }
        let mut stats = AccessStats::default();
        let mut counters = QueryCounters::default();
        let mut answer = QueryAnswer::default();
        let mut ids = self.index_u.range_search(r.mbr(), &mut stats);
        ids.sort_unstable();
        for id in ids {
            let id = ObjectId(id);
            let o = &self.objects[&id];
            let u = &self.precomputed[&id];
            counters.candidate_objects += 1;
            let s = intersect_with_query_counted(u, r.rect(), &mut counters.geometry)
                .map_err(object_err(id))?;
            self.push_entry(&mut answer, &mut counters, o, u, &s, seed)?;
        }
        Ok(QueryOutcome {
            answer,
            stats,
            counters,
        })
    }

    fn push_entry(
        &self,
        answer: &mut QueryAnswer,
        counters: &mut QueryCounters,
        o: &MovingObject,
        u: &Region,
        s: &RegionSet,
        seed: u64,
    ) -> Result<(), EngineError> {
        if s.is_empty() {
            return Ok(());
        }
        let prob_err = |e| EngineError::Object {
            id: o.id,
            failure: ObjectFailure::Probability(e),
        };
        let p = if self.config.pdf.is_uniform() {
            if s.area() < ZERO_AREA {
                return Ok(());
            }
            probability_uniform(u, s).map_err(prob_err)?
        } else {
            let pdf = self.config.pdf.pdf_for(o);
            let est = monte_carlo_estimate(u, s, &pdf, self.config.n1, object_seed(seed, o.id))
                .map_err(prob_err)?;
            counters.mc_draws += self.config.n1 as u64;
            counters.mc_accepted += est.accepted as u64;
            est.probability
        };
        if !p.is_zero() {
            answer.entries.push(AnswerEntry {
                id: o.id,
                probability: p,
            });
        }
        Ok(())
    }

    /// Uncertainty region of one object, built with the optimized method.
    pub fn uncertainty_region(&self, id: ObjectId) -> Result<Region, EngineError> {
        let o = self.objects.get(&id).ok_or(EngineError::UnknownObject(id))?;
        let mut st = AccessStats::default();
        let cands = self.candidate_areas(o, &mut st);
        let e = self.circle(o)?;
        compute_uncertainty_optimized_counted(&e, &cands, o.location, &mut UncertaintyCounters::default())
            .map_err(object_err(id))
    }

    fn compute_stored(&mut self, id: ObjectId) -> Result<Region, EngineError> {
        let o = &self.objects[&id];
        let mut st = AccessStats::default();
        let cands = self.candidate_areas(o, &mut st);
        let e = self.circle(o)?;
        let mut c = UncertaintyCounters::default();
        let u = compute_uncertainty_optimized_counted(&e, &cands, o.location, &mut c)
            .map_err(object_err(id))?;
        self.report.geometry.add(&c);
        Ok(u)
    }

    /// Starts (or restarts) precomputation; nothing is processed yet.
    pub fn begin_precompute(&mut self) -> Result<(), EngineError> {
        self.precomputed.clear();
        self.index_u = RTree::new(self.config.fanout)?;
        self.report = PrecomputeReport::default();
        self.state = PrecomputeState::InProgress {
            queue: self.objects.keys().copied().collect(),
            next: 0,
        };
        Ok(())
    }

    /// Processes up to `budget` objects; returns true once every object is
    /// done and the region index is built.
    pub fn precompute_step(&mut self, budget: usize) -> Result<bool, EngineError> {
        let (queue, mut next) = match &mut self.state {
            PrecomputeState::Done => return Ok(true),
            PrecomputeState::NotStarted => return Err(EngineError::PrecomputeNotStarted),
            PrecomputeState::InProgress { queue, next } => (core::mem::take(queue), *next),
        };
        let end = core::cmp::min(queue.len(), next + budget);
        let mut result = Ok(());
        while next < end {
            let id = queue[next];
            match self.compute_stored(id) {
                Ok(u) => {
                    self.precomputed.insert(id, u);
                    self.report.objects_processed += 1;
                    next += 1;
                }
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        let finished = next == queue.len() && result.is_ok();
        self.state = PrecomputeState::InProgress { queue, next };
        result?;
        if finished {
            self.index_u = RTree::build(
                self.precomputed.iter().map(|(id, u)| (*u.mbr(), id.0)).collect(),
                self.config.fanout,
            )?;
            self.state = PrecomputeState::Done;
        }
        Ok(finished)
    }

    /// Computes and indexes every object's uncertainty region.
    pub fn precompute_all(&mut self) -> Result<PrecomputeReport, EngineError> {
        self.begin_precompute()?;
        while !self.precompute_step(usize::MAX)? {}
        Ok(self.report.clone())
    }

    pub fn is_precomputed(&self) -> bool {
        matches!(self.state, PrecomputeState::Done)
    }

    pub fn precompute_report(&self) -> &PrecomputeReport {
        &self.report
    }

    pub fn precomputed_region(&self, id: ObjectId) -> Option<&Region> {
        self.precomputed.get(&id)
    }

    /// Records a new location. When precomputed regions exist, the object's
    /// region is rebuilt before this returns, unless precomputation has not
    /// reached the object yet.
    pub fn report_location(&mut self, id: ObjectId, new_l: Point) -> Result<UpdateEffect, EngineError> {
        if !self.objects.contains_key(&id) {
            return Err(EngineError::UnknownObject(id));
        }
        self.check_location(id, new_l)?;
        let o = self.objects.get_mut(&id).unwrap();
        o.location = new_l;
        let mbr = o.circle_mbr();
        self.index_o.remove(id.0)?;
        self.index_o.insert(mbr, id.0)?;

        let processed = match &self.state {
            PrecomputeState::NotStarted => return Ok(UpdateEffect::None),
            PrecomputeState::Done => true,
            PrecomputeState::InProgress { queue, next } => {
                queue[..*next].binary_search(&id).is_ok()
            }
        };
        if !processed {
            return Ok(UpdateEffect::Deferred);
        }
        let u = self.compute_stored(id)?;
        self.report.recomputed_on_update += 1;
        if matches!(self.state, PrecomputeState::Done) {
            self.index_u.remove(id.0)?;
            self.index_u.insert(*u.mbr(), id.0)?;
        }
        self.precomputed.insert(id, u);
        Ok(UpdateEffect::Recomputed)
    }
}
