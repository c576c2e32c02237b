use std::time::{Duration, Instant};

/// Which resource guard tripped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ResourceLimit {
    #[error("time limit exceeded")]
    Time,
    #[error("memory limit exceeded")]
    Memory,
}

/// Per-run resource guards. Memory is approximated by the running total of
/// factor table cells allocated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    pub time: Option<Duration>,
    pub max_cells: Option<u64>,
}

impl Limits {
    pub fn unlimited() -> Self {
        Self::default()
    }

    /// Ten seconds and ten megabytes of `f64` cells.
    pub fn desk() -> Self {
        Limits { time: Some(Duration::from_secs(10)), max_cells: Some(10 * 1024 * 1024 / 8) }
    }
}

/// Running count of numerical multiplications and additions, plus the
/// allocation counter used for the memory guard.
///
/// Counts follow a fixed model: a product charges one multiplication per
/// result cell; a combination charges `S * prod(d)` multiplications and
/// `S * prod(d) - S` additions, where `S` is the result size and `d` ranges
/// over shared convergent cardinalities; a marginalization charges input size
/// minus output size additions; slicing and normalization are free.
#[derive(Clone, Debug)]
pub struct CostLedger {
    multiplications: u64,
    additions: u64,
    cells: u64,
    limits: Limits,
    started: Instant,
}

impl Default for CostLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl CostLedger {
    pub fn new() -> Self {
        Self::with_limits(Limits::unlimited())
    }

    pub fn with_limits(limits: Limits) -> Self {
        CostLedger { multiplications: 0, additions: 0, cells: 0, limits, started: Instant::now() }
    }

    pub fn multiplications(&self) -> u64 {
        self.multiplications
    }

    pub fn additions(&self) -> u64 {
        self.additions
    }

    pub fn cells_allocated(&self) -> u64 {
        self.cells
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    pub(crate) fn charge(&mut self, multiplications: u64, additions: u64) {
        self.multiplications += multiplications;
        self.additions += additions;
    }

    /// Records a table allocation, failing if either guard is exceeded.
    pub fn allocate(&mut self, cells: usize) -> Result<(), ResourceLimit> {
        self.check_time()?;
        self.cells = self.cells.saturating_add(cells as u64);
        match self.limits.max_cells {
            Some(max) if self.cells > max => Err(ResourceLimit::Memory),
            _ => Ok(()),
        }
    }

    pub fn check_time(&self) -> Result<(), ResourceLimit> {
        match self.limits.time {
            Some(limit) if self.started.elapsed() > limit => Err(ResourceLimit::Time),
            _ => Ok(()),
        }
    }
}
