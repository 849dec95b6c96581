use crate::{Error, Result};

/// Shortest anneal the hardware model accepts, in microseconds.
pub const MIN_ANNEAL_US: f64 = 5.0;
pub const DEFAULT_PROGRAM_US: f64 = 9000.0;
pub const DEFAULT_READOUT_US: f64 = 120.0;

/// Emulated QPU access time `T = T_p + R (T_a + T_r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingReport {
    pub reads: usize,
    pub t_program: f64,
    pub t_anneal: f64,
    pub t_readout: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingModel {
    pub t_program: f64,
    pub t_readout: f64,
}

impl Default for TimingModel {
    fn default() -> Self {
        Self {
            t_program: DEFAULT_PROGRAM_US,
            t_readout: DEFAULT_READOUT_US,
        }
    }
}

impl TimingModel {
    pub fn report(&self, reads: usize, t_anneal: f64) -> Result<TimingReport> {
        if reads == 0 {
            return Err(Error::invalid("timing needs at least one read"));
        }
        if !(t_anneal >= MIN_ANNEAL_US) {
            return Err(Error::invalid(format!(
                "anneal time {t_anneal} us is below the {MIN_ANNEAL_US} us minimum"
            )));
        }
        if !(self.t_program >= 0.0 && self.t_readout >= 0.0) {
            return Err(Error::invalid(
                "programming and readout times must be nonnegative",
            ));
        }
        Ok(TimingReport {
            reads,
            t_program: self.t_program,
            t_anneal,
            t_readout: self.t_readout,
            total: self.t_program + reads as f64 * (t_anneal + self.t_readout),
        })
    }
}

/// Timing with the default programming (9 ms) and readout (120 us) times.
pub fn timing_report(reads: usize, t_anneal: f64) -> Result<TimingReport> {
    TimingModel::default().report(reads, t_anneal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(timing_report(100, 20.0).unwrap().total, 23000.0);
        assert_eq!(timing_report(1, 5.0).unwrap().total, 9125.0);
        assert!(timing_report(1, 4.9).is_err());
        assert!(timing_report(0, 20.0).is_err());
        let custom = TimingModel {
            t_program: 0.0,
            t_readout: 0.0,
        };
        assert_eq!(custom.report(3, 10.0).unwrap().total, 30.0);
    }
}
