use std::fmt::Write;

use crate::{Error, Result};

/// Piecewise-linear anneal-fraction path `s(t)` over one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct SPath {
    points: Vec<(f64, f64)>,
}

impl SPath {
    /// Breakpoints `(time_us, s)`; times must start at zero and be
    /// nondecreasing, values must lie in `[0, 1]`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid(
                "schedule path needs at least one breakpoint",
            ));
        }
        if points[0].0 != 0.0 {
            return Err(Error::invalid("schedule path must start at time 0"));
        }
        for w in points.windows(2) {
            if !(w[1].0 >= w[0].0) {
                return Err(Error::invalid(format!(
                    "schedule times must be nondecreasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(t, s)) = points
            .iter()
            .find(|(t, s)| !(0.0..=1.0).contains(s) || !t.is_finite())
        {
            return Err(Error::invalid(format!(
                "anneal fraction {s} at time {t} is outside [0, 1]"
            )));
        }
        Ok(Self { points })
    }

    pub fn constant(s: f64, duration: f64) -> Result<Self> {
        Self::new(vec![(0.0, s), (duration, s)])
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn duration(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.0)
    }

    /// `s` at local time `t`, held constant outside the breakpoints.
    pub fn at(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        for w in pts.windows(2) {
            let ((t0, s0), (t1, s1)) = (w[0], w[1]);
            if t <= t1 {
                if t1 == t0 {
                    return s1;
                }
                return s0 + (s1 - s0) * (t - t0) / (t1 - t0);
            }
        }
        pts[pts.len() - 1].1
    }

    pub fn min_value(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.1)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Annealing schedule with per-group paths repeated over `cycles` cycles.
///
/// Every variable belongs to one group and follows that group's path. One
/// cycle lasts `cycle_time`; the whole anneal lasts `cycle_time * cycles`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    cycle_time: f64,
    cycles: usize,
    paths: Vec<SPath>,
    group_of: Vec<usize>,
    reversal_target: f64,
    reinitialize: bool,
}

impl AnnealSchedule {
    /// `group_of` may be empty, in which case every variable uses path 0.
    pub fn new(
        paths: Vec<SPath>,
        group_of: Vec<usize>,
        cycles: usize,
        reversal_target: f64,
        reinitialize: bool,
    ) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::invalid("schedule needs at least one path"));
        }
        if cycles == 0 {
            return Err(Error::invalid("cycle count must be at least 1"));
        }
        if !(0.0..=1.0).contains(&reversal_target) {
            return Err(Error::invalid(format!(
                "reversal target {reversal_target} is outside [0, 1]"
            )));
        }
        let cycle_time = paths[0].duration();
        if !(cycle_time > 0.0) {
            return Err(Error::invalid("cycle duration must be positive"));
        }
        if let Some(p) = paths
            .iter()
            .find(|p| (p.duration() - cycle_time).abs() > 1e-9)
        {
            return Err(Error::invalid(format!(
                "all group paths must span {cycle_time} us, one spans {}",
                p.duration()
            )));
        }
        if let Some(&g) = group_of.iter().find(|&&g| g >= paths.len()) {
            return Err(Error::invalid(format!(
                "group {g} has no path ({} paths)",
                paths.len()
            )));
        }
        Ok(Self {
            cycle_time,
            cycles,
            paths,
            group_of,
            reversal_target,
            reinitialize,
        })
    }

    /// Standard forward anneal from `s = 0` to `s = 1`.
    pub fn forward(total_time: f64) -> Result<Self> {
        Self::new(
            vec![SPath::new(vec![(0.0, 0.0), (total_time, 1.0)])?],
            Vec::new(),
            1,
            1.0,
            true,
        )
    }

    /// Reverse anneal: from `s = 1` down to `target`, hold for `pause`, and
    /// back to `s = 1`.
    pub fn reverse(total_time: f64, target: f64, pause: f64) -> Result<Self> {
        if !(pause >= 0.0 && pause < total_time) {
            return Err(Error::invalid("pause must be shorter than the anneal"));
        }
        let ramp = (total_time - pause) / 2.0;
        Self::new(
            vec![SPath::new(vec![
                (0.0, 1.0),
                (ramp, target),
                (ramp + pause, target),
                (total_time, 1.0),
            ])?],
            Vec::new(),
            1,
            target,
            true,
        )
    }

    /// Every variable held at `s = 1`: nothing can move.
    pub fn frozen(total_time: f64) -> Result<Self> {
        Self::new(
            vec![SPath::constant(1.0, total_time)?],
            Vec::new(),
            1,
            1.0,
            true,
        )
    }

    /// Inhomogeneous cyclic schedule: within each cycle the groups take turns,
    /// in order, dipping from `s = 1` to `reversal_target` and back while all
    /// other groups stay at `s = 1`. Each turn lasts `segment_time` with a
    /// quarter spent descending, half holding and a quarter returning.
    pub fn cyclic(
        group_of: Vec<usize>,
        n_groups: usize,
        cycles: usize,
        reversal_target: f64,
        segment_time: f64,
    ) -> Result<Self> {
        if n_groups == 0 {
            return Err(Error::invalid("cyclic schedule needs at least one group"));
        }
        if !(segment_time > 0.0) {
            return Err(Error::invalid("segment time must be positive"));
        }
        let cycle_time = segment_time * n_groups as f64;
        let paths = (0..n_groups)
            .map(|g| {
                let t0 = segment_time * g as f64;
                let mut pts = vec![(0.0, 1.0)];
                for p in [
                    (t0, 1.0),
                    (t0 + 0.25 * segment_time, reversal_target),
                    (t0 + 0.75 * segment_time, reversal_target),
                    (t0 + segment_time, 1.0),
                    (cycle_time, 1.0),
                ] {
                    if p.0 > pts.last().unwrap().0 {
                        pts.push(p);
                    }
                }
                SPath::new(pts)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(paths, group_of, cycles, reversal_target, true)
    }

    pub fn with_reinitialize(mut self, reinitialize: bool) -> Self {
        self.reinitialize = reinitialize;
        self
    }

    pub fn cycle_time(&self) -> f64 {
        self.cycle_time
    }

    pub fn total_time(&self) -> f64 {
        self.cycle_time * self.cycles as f64
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    pub fn reversal_target(&self) -> f64 {
        self.reversal_target
    }

    pub fn reinitialize(&self) -> bool {
        self.reinitialize
    }

    pub fn num_groups(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[SPath] {
        &self.paths
    }

    pub fn group_of(&self, var: usize) -> usize {
        self.group_of.get(var).copied().unwrap_or(0)
    }

    /// Checks the group assignment against a model size.
    pub fn check_vars(&self, n: usize) -> Result<()> {
        if !self.group_of.is_empty() && self.group_of.len() != n {
            return Err(Error::Dimension {
                expected: self.group_of.len(),
                got: n,
            });
        }
        Ok(())
    }

    /// Local time within the cycle containing `t`; the end of the anneal maps
    /// to the end of the last cycle.
    fn local_time(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.total_time());
        let c = ((t / self.cycle_time).floor() as usize).min(self.cycles - 1);
        t - c as f64 * self.cycle_time
    }

    pub fn group_s(&self, group: usize, t: f64) -> f64 {
        self.paths[group].at(self.local_time(t))
    }

    pub fn s(&self, var: usize, t: f64) -> f64 {
        self.group_s(self.group_of(var), t)
    }

    /// Whether the variable starts at `s = 1` and so needs a classical value.
    pub fn starts_classical(&self, var: usize) -> bool {
        self.s(var, 0.0) >= 1.0
    }

    /// Groups in the order in which they first drop below `s = 1`; groups
    /// that never do are omitted.
    pub fn dip_order(&self) -> Vec<usize> {
        let mut first: Vec<(f64, usize)> = self
            .paths
            .iter()
            .enumerate()
            .filter_map(|(g, p)| {
                let pts = p.points();
                if pts[0].1 < 1.0 {
                    return Some((0.0, g));
                }
                pts.windows(2).find(|w| w[1].1 < 1.0).map(|w| (w[0].0, g))
            })
            .collect();
        first.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        first.into_iter().map(|(_, g)| g).collect()
    }

    /// All distinct breakpoint times over the whole anneal, sorted.
    pub fn breakpoint_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = (0..self.cycles)
            .flat_map(|c| {
                let base = c as f64 * self.cycle_time;
                self.paths
                    .iter()
                    .flat_map(move |p| p.points().iter().map(move |&(t, _)| base + t))
            })
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        ts
    }

    /// CSV with header `time_us,variable_group,anneal_fraction` listing every
    /// group's breakpoints over all cycles.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_us,variable_group,anneal_fraction\n");
        for (g, p) in self.paths.iter().enumerate() {
            for c in 0..self.cycles {
                let base = c as f64 * self.cycle_time;
                for (k, &(t, s)) in p.points().iter().enumerate() {
                    if c > 0 && k == 0 {
                        continue;
                    }
                    let _ = writeln!(out, "{},{g},{s}", base + t);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_interpolation() {
        let p = SPath::new(vec![(0.0, 1.0), (2.0, 0.0), (4.0, 1.0)]).unwrap();
        assert_eq!(p.at(1.0), 0.5);
        assert_eq!(p.at(3.0), 0.5);
        assert_eq!(p.at(10.0), 1.0);
        assert!(SPath::new(vec![(0.0, 1.5)]).is_err());
        assert!(SPath::new(vec![(1.0, 0.5)]).is_err());
        assert!(SPath::new(vec![(0.0, 0.5), (2.0, 0.5), (1.0, 0.5)]).is_err());
    }

    #[test]
    fn cyclic_schedule_repeats_per_cycle() {
        let s = AnnealSchedule::cyclic(vec![0, 1], 2, 3, 0.0, 10.0).unwrap();
        assert_eq!(s.total_time(), 60.0);
        for c in 0..3 {
            let base = 20.0 * c as f64;
            assert_eq!(s.s(0, base + 5.0), 0.0);
            assert_eq!(s.s(1, base + 5.0), 1.0);
            assert_eq!(s.s(0, base + 15.0), 1.0);
            assert_eq!(s.s(1, base + 15.0), 0.0);
        }
        assert_eq!(s.s(0, 60.0), 1.0);
        assert!(s.starts_classical(0));
        assert_eq!(s.dip_order(), vec![0, 1]);
    }

    #[test]
    fn forward_and_reverse_shapes() {
        let f = AnnealSchedule::forward(20.0).unwrap();
        assert_eq!(f.s(3, 10.0), 0.5);
        assert!(!f.starts_classical(0));
        let r = AnnealSchedule::reverse(20.0, 0.4, 4.0).unwrap();
        assert_eq!(r.s(0, 8.0), 0.4);
        assert_eq!(r.s(0, 20.0), 1.0);
        assert!(r.starts_classical(0));
    }

    #[test]
    fn csv_lists_all_cycles() {
        let s = AnnealSchedule::cyclic(vec![0, 1], 2, 2, 0.0, 4.0).unwrap();
        let csv = s.to_csv();
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert!(rows.contains(&"13,1,0"));
        assert!(rows.contains(&"9,0,0"));
        assert!(rows.contains(&"11,0,0"));
        assert_eq!(s.breakpoint_times().last(), Some(&16.0));
    }

    #[test]
    fn validation() {
        assert!(AnnealSchedule::cyclic(vec![0, 2], 2, 1, 0.0, 1.0).is_err());
        assert!(AnnealSchedule::cyclic(vec![0], 1, 0, 0.0, 1.0).is_err());
        let s = AnnealSchedule::cyclic(vec![0, 1], 2, 1, 0.0, 1.0).unwrap();
        assert!(s.check_vars(3).is_err());
    }
}
