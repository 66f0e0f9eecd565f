use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{EddyError, Result};
use crate::fourier::Mode;
use crate::rng::PathKey;

use super::{LevyMeasure, NoiseCoefficients};

/// One jump `ΔZ^k_t = z` of the driving noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub mode: Mode,
    pub size: f64,
}

/// Compound-Poisson skeleton of the noise on `[0, horizon]` keeping jumps
/// with `|z| ≥ eps`.
///
/// Each mode of the support draws from its own stream of `key`, so the
/// events of one mode do not depend on the rest of the support. Events are
/// sorted by time; equal times are ordered by support index.
///
/// For symmetric `ν` the compensator of the kept jumps vanishes, so no
/// drift accompanies the skeleton.
pub fn sample_jumps(
    nu: &LevyMeasure,
    theta: &NoiseCoefficients,
    horizon: f64,
    eps: f64,
    key: PathKey,
) -> Result<Vec<JumpEvent>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(EddyError::invalid("eps", format!("{eps} not in (0, 1)")));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(EddyError::invalid("T", format!("{horizon} must be positive")));
    }
    if theta.is_empty() {
        return Err(EddyError::invalid("theta", "empty support"));
    }
    let sizes = nu.size_sampler(eps);
    let mean = nu.intensity(eps) * horizon;
    if sizes.is_empty() || mean <= 0.0 {
        return Ok(Vec::new());
    }
    let poisson = Poisson::new(mean).map_err(|e| EddyError::invalid("eps", e.to_string()))?;
    let mut events: Vec<(usize, JumpEvent)> = Vec::new();
    for (i, &(mode, _)) in theta.support().iter().enumerate() {
        let mut rng = key.stream(i as u64);
        let count = poisson.sample(&mut rng) as usize;
        for _ in 0..count {
            let time = horizon * rng.random::<f64>();
            let size = sizes.sample(&mut rng);
            events.push((i, JumpEvent { time, mode, size }));
        }
    }
    events.sort_by(|a, b| a.1.time.total_cmp(&b.1.time).then(a.0.cmp(&b.0)));
    Ok(events.into_iter().map(|(_, e)| e).collect())
}

/// Checks that `events` are time-ordered and driven by modes of `theta`.
pub fn check_events(events: &[JumpEvent], theta: &NoiseCoefficients) -> Result<()> {
    for (i, e) in events.iter().enumerate() {
        if i > 0 && e.time < events[i - 1].time {
            return Err(EddyError::UnsortedEvents { index: i });
        }
        if theta.get(e.mode).is_none() {
            return Err(EddyError::ModeOutsideSupport(e.mode));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::make_theta;
    use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson as PoissonLaw};

    #[test]
    fn deterministic_and_sorted() {
        let nu = LevyMeasure::two_atom();
        let th = make_theta(3, 0.5).unwrap();
        let key = PathKey::new(11, 0, 4);
        let a = sample_jumps(&nu, &th, 2.0, 0.1, key).unwrap();
        let b = sample_jumps(&nu, &th, 2.0, 0.1, key).unwrap();
        assert_eq!(a, b);
        check_events(&a, &th).unwrap();
        assert!(a.iter().all(|e| e.size.abs() == 0.5 && e.time < 2.0));
        let c = sample_jumps(&nu, &th, 2.0, 0.1, PathKey::new(11, 0, 5)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn truncation_above_atoms_gives_nothing() {
        let th = make_theta(2, 0.5).unwrap();
        let ev = sample_jumps(&LevyMeasure::two_atom(), &th, 1.0, 0.6, PathKey::new(1, 0, 0)).unwrap();
        assert!(ev.is_empty());
    }

    #[test]
    fn rejects_bad_arguments() {
        let th = make_theta(1, 0.5).unwrap();
        let nu = LevyMeasure::two_atom();
        let key = PathKey::new(0, 0, 0);
        assert!(sample_jumps(&nu, &th, 1.0, 0.0, key).is_err());
        assert!(sample_jumps(&nu, &th, 1.0, 1.0, key).is_err());
        assert!(sample_jumps(&nu, &th, -1.0, 0.1, key).is_err());
    }

    #[test]
    fn check_events_reports_problems() {
        let th = make_theta(1, 0.5).unwrap();
        let k = Mode::new(1, 0).unwrap();
        let ev = [JumpEvent { time: 0.5, mode: k, size: 0.5 }, JumpEvent { time: 0.2, mode: k, size: 0.5 }];
        assert!(matches!(check_events(&ev, &th), Err(EddyError::UnsortedEvents { index: 1 })));
        let far = [JumpEvent { time: 0.5, mode: Mode::new(2, 0).unwrap(), size: 0.5 }];
        assert!(matches!(check_events(&far, &th), Err(EddyError::ModeOutsideSupport(_))));
    }

    #[test]
    fn counts_are_poisson() {
        // Chi-square goodness of fit of per-mode counts over 10⁴ paths.
        let nu = LevyMeasure::two_atom();
        let th = make_theta(1, 0.5).unwrap();
        let horizon = 1.5;
        let k = Mode::new(1, 0).unwrap();
        let bins = 7;
        let mut observed = vec![0.0; bins];
        let paths = 10_000;
        for p in 0..paths {
            let ev = sample_jumps(&nu, &th, horizon, 0.1, PathKey::new(3, 0, p)).unwrap();
            let c = ev.iter().filter(|e| e.mode == k).count();
            observed[c.min(bins - 1)] += 1.0;
        }
        let law = PoissonLaw::new(horizon).unwrap();
        let mut stat = 0.0;
        let mut tail = 1.0;
        for (c, &o) in observed.iter().enumerate() {
            let prob = if c + 1 == bins { tail } else { law.pmf(c as u64) };
            tail -= prob;
            let e = prob * paths as f64;
            stat += (o - e) * (o - e) / e;
        }
        let crit = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.99);
        assert!(stat < crit, "chi-square {stat} >= {crit}");
    }

    #[test]
    fn power_law_sizes() {
        let nu = LevyMeasure::power_law(1.0, 1.0).unwrap();
        let eps = 0.01;
        let sampler = nu.size_sampler(eps);
        let mut rng = crate::rng::seeded(21);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        assert!(draws.iter().all(|z| z.abs() >= eps && z.abs() <= 1.0));
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sd = (draws.iter().map(|z| z * z).sum::<f64>() / n as f64).sqrt();
        assert!(mean.abs() < 3.0 * sd / (n as f64).sqrt());
        let m2 = draws.iter().map(|z| z * z).sum::<f64>() / n as f64;
        // ∫_{ε≤|z|≤1} z²ν / λ_ε = 2(1−ε) / (2(1/ε − 1)) = ε.
        let oracle = eps;
        assert!((nu.conditional_second_moment(eps) - oracle).abs() < 1e-15);
        assert!((m2 - oracle).abs() < 0.02 * oracle, "{m2} vs {oracle}");
    }
}
