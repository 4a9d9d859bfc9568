use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::analytic::{global_overlap, BranchLedger};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SystemAmplitudes};
use crate::ops::{self, Mat2};

/// Largest number of projection times accepted by [`decoherence_functional`].
pub const MAX_HISTORY_LENGTH: usize = 6;

/// A local operator applied at a fixed time between projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Insertion {
    pub time: f64,
    pub operator: Mat2,
}

/// Pointer-basis history: projections `Pi_{z_i}` at times `t_i`, with
/// optional insertions. An insertion sharing its time with a projection is
/// applied before that projection.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySpec {
    times: Vec<f64>,
    labels: Vec<usize>,
    insertions: Vec<Insertion>,
}

impl HistorySpec {
    pub fn new(times: Vec<f64>, labels: Vec<usize>, mut insertions: Vec<Insertion>) -> Result<Self> {
        check_times(&times)?;
        if labels.len() != times.len() {
            return Err(Error::InvalidHistory("one label per projection time".into()));
        }
        if labels.iter().any(|&z| z > 1) {
            return Err(Error::InvalidHistory("pointer labels are 0 or 1".into()));
        }
        check_insertions(&insertions, *times.last().unwrap())?;
        insertions.sort_by(|a, b| a.time.total_cmp(&b.time));
        Ok(Self { times, labels, insertions })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn insertions(&self) -> &[Insertion] {
        &self.insertions
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidHistory("at least one projection time".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidHistory("times must be nonnegative and strictly increasing".into()));
    }
    Ok(())
}

fn check_insertions(insertions: &[Insertion], last: f64) -> Result<()> {
    for ins in insertions {
        if !(ins.time >= 0.0 && ins.time <= last) {
            return Err(Error::InvalidHistory(format!("insertion time {} outside [0, {last}]", ins.time)));
        }
        if !ops::is_finite(&ins.operator) {
            return Err(Error::NonFinite("insertion operator".into()));
        }
    }
    Ok(())
}

/// Unnormalized history state `Pi_{z_n} U ... Pi_{z_1} U |Psi(0)>`.
pub fn history_state(params: Arc<ModelParams>, sys: &SystemAmplitudes, spec: &HistorySpec) -> Result<BranchLedger> {
    enum Event<'a> {
        Insert(&'a Mat2),
        Project(usize),
    }
    let mut events: Vec<(f64, Event)> = spec.insertions.iter().map(|i| (i.time, Event::Insert(&i.operator))).collect();
    events.extend(spec.times.iter().zip(&spec.labels).map(|(&t, &z)| (t, Event::Project(z))));
    // stable: insertions precede projections at equal times
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ledger = BranchLedger::initial(sys, params);
    let mut now = 0.0;
    for (time, event) in events {
        ledger = ledger.evolve(time - now)?;
        now = time;
        ledger = match event {
            Event::Insert(m) => ledger.apply_operator(m, false)?,
            Event::Project(z) => ledger.apply_operator(&ops::pointer_projector(z), false)?,
        };
    }
    Ok(ledger)
}

/// `D(z, z') = <psi(z')|psi(z)>` over all `2^n` pointer histories.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceFunctional {
    /// Label sequences in lexicographic order (first time most significant).
    pub histories: Vec<Vec<usize>>,
    pub matrix: DMatrix<Complex64>,
}

impl DecoherenceFunctional {
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.matrix.nrows();
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.matrix[(i, j)].norm())
            .fold(0.0, f64::max)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|c| c.re).collect()
    }

    pub fn diagonal_sum(&self) -> f64 {
        self.probabilities().iter().sum()
    }
}

pub fn decoherence_functional(
    params: Arc<ModelParams>,
    sys: &SystemAmplitudes,
    times: &[f64],
    insertions: &[Insertion],
) -> Result<DecoherenceFunctional> {
    check_times(times)?;
    let n = times.len();
    if n > MAX_HISTORY_LENGTH {
        return Err(Error::InvalidHistory(format!("{n} projection times exceed {MAX_HISTORY_LENGTH}")));
    }
    let histories: Vec<Vec<usize>> =
        (0..1usize << n).map(|h| (0..n).map(|i| (h >> (n - 1 - i)) & 1).collect()).collect();
    let states = histories
        .iter()
        .map(|labels| {
            let spec = HistorySpec::new(times.to_vec(), labels.clone(), insertions.to_vec())?;
            history_state(params.clone(), sys, &spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = histories.len();
    let mut matrix = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            matrix[(i, j)] = global_overlap(&states[j], &states[i])?;
        }
    }
    Ok(DecoherenceFunctional { histories, matrix })
}
