//! Crow search localization of a position-unknown UAV.
//!
//! The global dynamic variant initializes the flock on a good point set and
//! lets the awareness probability decay quadratically over the run. The
//! classic crow search (uniform start, constant awareness) and a global-best
//! particle swarm are kept alongside for comparison under the same
//! evaluation budget.

mod objective;
mod pso;

pub use objective::{localization_objective, modelled_signal, LocalizationProblem};
pub use pso::{pso_locate, PsoParams};

use crate::geometry::Area;
use crate::{Error, Point, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GdcsaParams {
    pub population: usize,
    pub iter_max: usize,
    pub flight_length: f64,
    /// Initial awareness probability of the decaying schedule.
    pub beta: f64,
    /// Constant awareness probability of the classic crow search baseline.
    pub csa_awareness: f64,
    pub search_box: Area,
}

impl Default for GdcsaParams {
    fn default() -> Self {
        Self {
            population: 30,
            iter_max: 100,
            flight_length: 2.0,
            beta: 0.5,
            csa_awareness: 0.1,
            search_box: Area::default(),
        }
    }
}

impl GdcsaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::config("gdcsa.population", "must be at least 2"));
        }
        if self.iter_max < 1 {
            return Err(Error::config("gdcsa.iter_max", "must be at least 1"));
        }
        if !(self.flight_length > 0.0 && self.flight_length.is_finite()) {
            return Err(Error::config("gdcsa.flight_length", "must be positive"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::config("gdcsa.beta", "must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.csa_awareness) {
            return Err(Error::config("gdcsa.csa_awareness", "must lie in [0, 1]"));
        }
        if !self.search_box.is_valid() {
            return Err(Error::config("gdcsa.search_box", "must be a non-degenerate rectangle"));
        }
        Ok(())
    }

    /// Objective evaluations spent by one run.
    pub fn evaluation_budget(&self) -> usize {
        self.population * (self.iter_max + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crow {
    pub position: Point,
    /// Best position visited so far.
    pub memory: Point,
    /// Objective value at `memory`.
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocateResult {
    pub position: Point,
    pub fitness: f64,
    pub evaluations: usize,
    /// Best fitness after initialization and after each iteration.
    pub history: Vec<f64>,
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Smallest prime `p` with `(p - 3) / 2 >= dims`.
pub fn good_point_prime(dims: usize) -> usize {
    (2 * dims + 3..).find(|&p| is_prime(p)).expect("primes are unbounded")
}

/// Generators `2 cos(2πi/p)`, `i = 1..=dims`.
pub fn good_point_generators(dims: usize) -> Vec<f64> {
    let p = good_point_prime(dims) as f64;
    (1..=dims).map(|i| 2.0 * (2.0 * PI * i as f64 / p).cos()).collect()
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// `n` good points in the unit hypercube, `k = 1..=n`.
pub fn good_point_set_unit(n: usize, dims: usize) -> Vec<Vec<f64>> {
    let r = good_point_generators(dims);
    (1..=n)
        .map(|k| r.iter().map(|&ri| frac(ri * k as f64)).collect())
        .collect()
}

/// Two-dimensional good point set mapped into `area`.
pub fn good_point_set(n: usize, area: &Area) -> Vec<Point> {
    good_point_set_unit(n, 2)
        .into_iter()
        .map(|c| area.lerp(c[0], c[1]))
        .collect()
}

/// `β ((iter_max - t) / iter_max)²`.
pub fn dynamic_ap(t: usize, iter_max: usize, beta: f64) -> f64 {
    let remaining = iter_max.saturating_sub(t) as f64 / iter_max as f64;
    beta * remaining * remaining
}

pub fn uniform_point<R: Rng + ?Sized>(area: &Area, rng: &mut R) -> Point {
    area.lerp(rng.random(), rng.random())
}

/// One crow search move of `crow` toward `target_memory`, followed by the
/// memory update. `objective` is called exactly once.
pub fn crow_update<R, F>(
    crow: &Crow,
    target_memory: Point,
    ap: f64,
    flight_length: f64,
    area: &Area,
    rng: &mut R,
    objective: &mut F,
) -> Result<Crow>
where
    R: Rng + ?Sized,
    F: FnMut(Point) -> Result<f64>,
{
    let r: f64 = rng.random();
    let next = if r >= ap {
        let step = rng.random::<f64>() * flight_length;
        Point::new(
            crow.position.x + step * (target_memory.x - crow.position.x),
            crow.position.y + step * (target_memory.y - crow.position.y),
        )
    } else {
        uniform_point(area, rng)
    };
    let position = area.clamp(next);
    let f = objective(position)?;
    Ok(if f < crow.fitness {
        Crow {
            position,
            memory: position,
            fitness: f,
        }
    } else {
        Crow { position, ..*crow }
    })
}

/// Lowest fitness; ties resolve to the lowest index.
pub fn best_crow(crows: &[Crow]) -> usize {
    let mut best = 0;
    for (i, c) in crows.iter().enumerate().skip(1) {
        if c.fitness < crows[best].fitness {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initialization {
    GoodPointSet,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Awareness {
    /// Quadratic decay from `beta` to zero.
    Dynamic { beta: f64 },
    Constant(f64),
}

impl Awareness {
    pub fn at(&self, t: usize, iter_max: usize) -> f64 {
        match *self {
            Awareness::Dynamic { beta } => dynamic_ap(t, iter_max, beta),
            Awareness::Constant(ap) => ap,
        }
    }
}

/// Generic crow search over a 2-D box.
///
/// Each iteration moves every crow toward the memory of another randomly
/// chosen crow, where memories are read from the start of the iteration.
pub fn crow_search<R, F>(
    params: &GdcsaParams,
    init: Initialization,
    awareness: Awareness,
    rng: &mut R,
    mut objective: F,
) -> Result<LocateResult>
where
    R: Rng + ?Sized,
    F: FnMut(Point) -> Result<f64>,
{
    params.validate()?;
    let area = params.search_box;
    let starts: Vec<Point> = match init {
        Initialization::GoodPointSet => good_point_set(params.population, &area),
        Initialization::Uniform => (0..params.population).map(|_| uniform_point(&area, rng)).collect(),
    };
    let mut evaluations = 0;
    let mut crows = Vec::with_capacity(starts.len());
    for p in starts {
        evaluations += 1;
        crows.push(Crow {
            position: p,
            memory: p,
            fitness: objective(p)?,
        });
    }
    let mut history = vec![crows[best_crow(&crows)].fitness];
    let np = crows.len();
    for t in 0..params.iter_max {
        let ap = awareness.at(t, params.iter_max);
        let memories: Vec<Point> = crows.iter().map(|c| c.memory).collect();
        for i in 0..np {
            // any crow other than i
            let mut j = rng.random_range(0..np - 1);
            if j >= i {
                j += 1;
            }
            evaluations += 1;
            crows[i] = crow_update(&crows[i], memories[j], ap, params.flight_length, &area, rng, &mut objective)?;
        }
        history.push(crows[best_crow(&crows)].fitness);
    }
    let best = crows[best_crow(&crows)];
    Ok(LocateResult {
        position: best.memory,
        fitness: best.fitness,
        evaluations,
        history,
    })
}

/// Objective wrapper used by the localizers: a candidate sitting exactly on
/// an anchor (reachable through box clamping) scores as infinitely bad
/// instead of aborting the run.
pub(crate) fn guarded(problem: &LocalizationProblem) -> impl FnMut(Point) -> Result<f64> + '_ {
    move |p| match localization_objective(p, problem) {
        Err(Error::Singular(_)) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Global dynamic crow search.
pub fn locate<R: Rng + ?Sized>(problem: &LocalizationProblem, params: &GdcsaParams, rng: &mut R) -> Result<LocateResult> {
    problem.validate()?;
    crow_search(
        params,
        Initialization::GoodPointSet,
        Awareness::Dynamic { beta: params.beta },
        rng,
        guarded(problem),
    )
}

/// Classic crow search: uniform start, constant awareness probability.
pub fn csa_locate<R: Rng + ?Sized>(
    problem: &LocalizationProblem,
    params: &GdcsaParams,
    rng: &mut R,
) -> Result<LocateResult> {
    problem.validate()?;
    crow_search(
        params,
        Initialization::Uniform,
        Awareness::Constant(params.csa_awareness),
        rng,
        guarded(problem),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LinkBudget;
    use crate::phased_array::ArrayConfig;
    use crate::rng::{self, Stream};

    fn anchors() -> Vec<Point> {
        vec![Point::new(0.0, 0.0), Point::new(50.0, 50.0)]
    }

    fn noiseless(truth: Point) -> LocalizationProblem {
        LocalizationProblem::observe::<Stream>(truth, &anchors(), &LinkBudget::default(), &ArrayConfig::default(), None)
            .unwrap()
    }

    #[test]
    fn prime_and_generators() {
        assert_eq!(good_point_prime(1), 5);
        assert_eq!(good_point_prime(2), 7);
        assert_eq!(good_point_prime(5), 13);
        let r = good_point_generators(2);
        assert!((r[0] - 1.24698).abs() < 1e-5);
        assert!((r[1] + 0.44504).abs() < 1e-5);
    }

    #[test]
    fn first_good_point() {
        let p = good_point_set_unit(1, 2);
        assert!((p[0][0] - 0.24698).abs() < 1e-5);
        assert!((p[0][1] - 0.55496).abs() < 1e-5);
    }

    #[test]
    fn good_points_inside_box() {
        let area = Area::new(Point::new(-5.0, 10.0), Point::new(20.0, 12.0));
        for p in good_point_set(500, &area) {
            assert!(area.contains(p));
        }
    }

    #[test]
    fn awareness_schedule() {
        assert_eq!(dynamic_ap(0, 100, 0.5), 0.5);
        assert_eq!(dynamic_ap(100, 100, 0.5), 0.0);
        assert!((dynamic_ap(50, 100, 0.5) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn follow_branch_at_fixed_point() {
        let area = Area::default();
        let crow = Crow {
            position: Point::new(30.0, 40.0),
            memory: Point::new(30.0, 40.0),
            fitness: 1.0,
        };
        let mut rng = rng::stream(2, "t");
        let mut obj = |_p: Point| Ok(2.0);
        for _ in 0..100 {
            let next = crow_update(&crow, crow.position, 0.0, 2.0, &area, &mut rng, &mut obj).unwrap();
            assert_eq!(next.position, crow.position);
            assert_eq!(next.fitness, 1.0);
        }
    }

    #[test]
    fn updates_never_worsen_memory() {
        let problem = noiseless(Point::new(110.0, 80.0));
        let area = Area::default();
        let mut rng = rng::stream(5, "t");
        let mut obj = guarded(&problem);
        let start = Point::new(20.0, 100.0);
        let mut crow = Crow {
            position: start,
            memory: start,
            fitness: obj(start).unwrap(),
        };
        let mut target = Point::new(120.0, 60.0);
        for i in 0..1000 {
            let before = crow.fitness;
            crow = crow_update(&crow, target, 0.3, 2.0, &area, &mut rng, &mut obj).unwrap();
            assert!(crow.fitness <= before);
            assert!(area.contains(crow.position));
            assert_eq!(crow.fitness, obj(crow.memory).unwrap());
            if i % 7 == 0 {
                target = uniform_point(&area, &mut rng);
            }
        }
    }

    #[test]
    fn locates_noiseless_source() {
        let truth = Point::new(97.0, 121.0);
        let problem = noiseless(truth);
        let mut rng = rng::stream(1, rng::OPTIMIZER);
        let r = locate(&problem, &GdcsaParams::default(), &mut rng).unwrap();
        assert!(r.position.distance(truth) < 0.5, "{:?}", r.position);
        assert_eq!(r.evaluations, GdcsaParams::default().evaluation_budget());
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn seeded_runs_repeat() {
        let problem = noiseless(Point::new(70.0, 20.0));
        let run = || locate(&problem, &GdcsaParams::default(), &mut rng::stream(3, rng::OPTIMIZER)).unwrap();
        assert_eq!(run(), run());
    }

    #[test]
    fn csa_is_crow_search_with_constant_awareness() {
        let problem = noiseless(Point::new(70.0, 20.0));
        let params = GdcsaParams::default();
        let a = csa_locate(&problem, &params, &mut rng::stream(3, "x")).unwrap();
        let b = crow_search(
            &params,
            Initialization::Uniform,
            Awareness::Constant(params.csa_awareness),
            &mut rng::stream(3, "x"),
            guarded(&problem),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_params() {
        let problem = noiseless(Point::new(70.0, 20.0));
        let params = GdcsaParams { population: 1, ..GdcsaParams::default() };
        assert!(locate(&problem, &params, &mut rng::stream(0, "x")).is_err());
        let params = GdcsaParams { beta: 0.0, ..GdcsaParams::default() };
        assert!(params.validate().is_err());
    }
}
