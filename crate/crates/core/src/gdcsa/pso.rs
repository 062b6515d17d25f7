use super::{guarded, uniform_point, GdcsaParams, LocalizationProblem, LocateResult};
use crate::{Point, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Constriction-factor particle swarm settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            inertia: 0.729,
            cognitive: 1.494,
            social: 1.494,
        }
    }
}

/// Global-best particle swarm with the population and iteration budget of
/// `params`, so it spends exactly as many evaluations as the crow searches.
pub fn pso_locate<R: Rng + ?Sized>(
    problem: &LocalizationProblem,
    params: &GdcsaParams,
    pso: &PsoParams,
    rng: &mut R,
) -> Result<LocateResult> {
    problem.validate()?;
    params.validate()?;
    let area = params.search_box;
    let vmax = (area.width(), area.height());
    let mut objective = guarded(problem);
    let n = params.population;

    let mut pos: Vec<Point> = (0..n).map(|_| uniform_point(&area, rng)).collect();
    let mut vel = vec![Point::default(); n];
    let mut best_pos = pos.clone();
    let mut best_fit = Vec::with_capacity(n);
    for &p in &pos {
        best_fit.push(objective(p)?);
    }
    let mut evaluations = n;
    let mut g = argmin(&best_fit);
    let mut history = vec![best_fit[g]];

    for _ in 0..params.iter_max {
        let gbest = best_pos[g];
        for i in 0..n {
            let (r1, r2, r3, r4): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
            let vx = pso.inertia * vel[i].x
                + pso.cognitive * r1 * (best_pos[i].x - pos[i].x)
                + pso.social * r2 * (gbest.x - pos[i].x);
            let vy = pso.inertia * vel[i].y
                + pso.cognitive * r3 * (best_pos[i].y - pos[i].y)
                + pso.social * r4 * (gbest.y - pos[i].y);
            vel[i] = Point::new(vx.clamp(-vmax.0, vmax.0), vy.clamp(-vmax.1, vmax.1));
            let moved = Point::new(pos[i].x + vel[i].x, pos[i].y + vel[i].y);
            let clamped = area.clamp(moved);
            // stop the velocity component that hit a wall
            if clamped.x != moved.x {
                vel[i].x = 0.0;
            }
            if clamped.y != moved.y {
                vel[i].y = 0.0;
            }
            pos[i] = clamped;
            let f = objective(clamped)?;
            evaluations += 1;
            if f < best_fit[i] {
                best_fit[i] = f;
                best_pos[i] = clamped;
            }
        }
        g = argmin(&best_fit);
        history.push(best_fit[g]);
    }
    Ok(LocateResult {
        position: best_pos[g],
        fitness: best_fit[g],
        evaluations,
        history,
    })
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &f) in v.iter().enumerate().skip(1) {
        if f < v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LinkBudget;
    use crate::phased_array::ArrayConfig;
    use crate::rng::{self, Stream};

    #[test]
    fn pso_budget_and_box() {
        let problem = LocalizationProblem::observe::<Stream>(
            Point::new(60.0, 130.0),
            &[Point::new(0.0, 0.0), Point::new(50.0, 50.0)],
            &LinkBudget::default(),
            &ArrayConfig::default(),
            None,
        )
        .unwrap();
        let params = GdcsaParams::default();
        let r = pso_locate(&problem, &params, &PsoParams::default(), &mut rng::stream(1, "pso")).unwrap();
        assert_eq!(r.evaluations, params.evaluation_budget());
        assert!(params.search_box.contains(r.position));
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }
}
