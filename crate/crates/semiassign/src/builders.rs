//! Constructors that map applications onto semi-assignment instances:
//! the Wasserstein independence statistic for paired samples, two-marginal
//! transport with integer masses via row duplication, and one-to-many /
//! many-to-many assignment with zero-payoff padding.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::{SemiAssignProblem, SolveReport};
use crate::solver::{solve, SolveOptions};

/// Paired observation vectors `(y_i, z_i)`.
#[derive(Debug, Clone)]
pub struct SampleSet {
    y: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
}

impl SampleSet {
    pub fn new(y: Vec<Vec<f64>>, z: Vec<Vec<f64>>) -> Result<Self> {
        if y.is_empty() || z.is_empty() {
            return Err(Error::EmptySamples);
        }
        if y.len() != z.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} y samples but {} z samples",
                y.len(),
                z.len()
            )));
        }
        for (name, vecs) in [("y", &y), ("z", &z)] {
            let d = vecs[0].len();
            for (i, v) in vecs.iter().enumerate() {
                if v.len() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "{} sample {} has dimension {} but sample 0 has {}",
                        name,
                        i,
                        v.len(),
                        d
                    )));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidEntry { row: i, col: 0 });
                }
            }
        }
        Ok(Self { y, z })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &[Vec<f64>] {
        &self.y
    }

    pub fn z(&self) -> &[Vec<f64>] {
        &self.z
    }

    pub fn dim_y(&self) -> usize {
        self.y[0].len()
    }

    pub fn dim_z(&self) -> usize {
        self.z[0].len()
    }

    /// Same pairs with the roles of the two coordinates exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            y: self.z.clone(),
            z: self.y.clone(),
        }
    }
}

/// l_p norm of the coordinate-wise difference. Any order p >= 1 is accepted.
pub fn lp_distance(a: &[f64], b: &[f64], p: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if p == 1.0 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    } else if p == 2.0 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    } else {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// Ground metric between a product-measure atom `(y_i, z_j)` and a joint
/// atom `(y_k, z_k)`: the sum of the two marginal l_p distances.
pub fn pair_distance(samples: &SampleSet, i: usize, j: usize, k: usize, p: f64) -> f64 {
    lp_distance(&samples.y[i], &samples.y[k], p) + lp_distance(&samples.z[j], &samples.z[k], p)
}

/// Builds the transport instance whose optimum is the empirical Wasserstein
/// distance between the joint distribution of the pairs and the product of
/// their marginals.
///
/// Rows are the n^2 product atoms `(i, j)` in row-major order (i outer, j
/// inner); columns are the n joint atoms, each with capacity n.
pub fn build_independence_problem(samples: &SampleSet, p: f64) -> Result<SemiAssignProblem> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    let n = samples.len();
    let mut cost = Array2::zeros((n * n, n));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                cost[(i * n + j, k)] = pair_distance(samples, i, j, k, p);
            }
        }
    }
    SemiAssignProblem::new(cost, vec![n; n])
}

/// The independence-test statistic: the exact transport optimum of
/// [`build_independence_problem`] with its `1/n^2` masses restored.
pub fn wasserstein_independence_statistic(samples: &SampleSet, p: f64) -> Result<f64> {
    let problem = build_independence_problem(samples, p)?;
    let report = solve(&problem, &SolveOptions::default())?;
    let n = samples.len() as f64;
    Ok(report.objective / (n * n))
}

/// Two-marginal transport spec with positive integer masses on both sides.
#[derive(Debug, Clone)]
pub struct GeneralOTSpec {
    cost: Array2<f64>,
    row_masses: Vec<usize>,
    col_masses: Vec<usize>,
}

impl GeneralOTSpec {
    pub fn new(cost: Array2<f64>, row_masses: Vec<usize>, col_masses: Vec<usize>) -> Result<Self> {
        let (m, n) = cost.dim();
        if m == 0 || n == 0 {
            return Err(Error::EmptyProblem);
        }
        if row_masses.len() != m || col_masses.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "cost is {}x{} but there are {} row masses and {} column masses",
                m,
                n,
                row_masses.len(),
                col_masses.len()
            )));
        }
        if row_masses.contains(&0) || col_masses.contains(&0) {
            return Err(Error::InvalidParams("masses must be positive".into()));
        }
        let row_total: usize = row_masses.iter().sum();
        let col_total: usize = col_masses.iter().sum();
        if row_total != col_total {
            return Err(Error::MassMismatch {
                row_total,
                col_total,
            });
        }
        for ((i, j), &c) in cost.indexed_iter() {
            if !c.is_finite() {
                return Err(Error::InvalidEntry { row: i, col: j });
            }
        }
        Ok(Self {
            cost,
            row_masses,
            col_masses,
        })
    }

    pub fn cost(&self) -> &Array2<f64> {
        &self.cost
    }

    pub fn row_masses(&self) -> &[usize] {
        &self.row_masses
    }

    pub fn col_masses(&self) -> &[usize] {
        &self.col_masses
    }

    pub fn total_mass(&self) -> usize {
        self.row_masses.iter().sum()
    }
}

/// Map from duplicated rows back to their source rows: `offsets[i]..offsets[i+1]`
/// are the duplicates of source row `i`.
#[derive(Debug, Clone)]
pub struct RowDupMap {
    offsets: Vec<usize>,
}

impl RowDupMap {
    pub fn source_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total_rows(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn duplicates_of(&self, source_row: usize) -> std::ops::Range<usize> {
        self.offsets[source_row]..self.offsets[source_row + 1]
    }
}

/// Rewrites a general integer-mass transport spec as a semi-assignment
/// instance by duplicating row `i` of the cost matrix `row_masses[i]` times.
/// The duplicated optimum divided by the total mass is the transport optimum.
pub fn build_general_ot(spec: &GeneralOTSpec) -> Result<(SemiAssignProblem, RowDupMap)> {
    let total = spec.total_mass();
    let n = spec.cost.ncols();
    let mut offsets = Vec::with_capacity(spec.row_masses.len() + 1);
    offsets.push(0);
    let mut cost = Array2::zeros((total, n));
    let mut t = 0;
    for (i, &mass) in spec.row_masses.iter().enumerate() {
        for _ in 0..mass {
            for j in 0..n {
                cost[(t, j)] = spec.cost[(i, j)];
            }
            t += 1;
        }
        offsets.push(t);
    }
    let problem = SemiAssignProblem::new(cost, spec.col_masses.clone())?;
    Ok((problem, RowDupMap { offsets }))
}

/// Transport plan on the probability scale: row sums `row_masses[i]/M`,
/// column sums `col_masses[j]/M`.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub mass: Array2<f64>,
}

impl TransportPlan {
    pub fn objective(&self, cost: &Array2<f64>) -> f64 {
        self.mass
            .iter()
            .zip(cost.iter())
            .map(|(&x, &c)| x * c)
            .sum()
    }
}

/// Aggregates a duplicated-row solve back into a plan for the source spec:
/// entry `(i, j)` counts how many duplicates of row `i` went to column `j`,
/// divided by the total mass.
pub fn extract_plan(
    report: &SolveReport,
    dup: &RowDupMap,
    spec: &GeneralOTSpec,
) -> Result<TransportPlan> {
    let total = spec.total_mass();
    let (m, n) = spec.cost.dim();
    if dup.source_rows() != m || dup.total_rows() != total {
        return Err(Error::MapMismatch(format!(
            "duplication map covers {} source rows / {} duplicates, spec has {} rows / mass {}",
            dup.source_rows(),
            dup.total_rows(),
            m,
            total
        )));
    }
    if report.matching.m() != total || report.matching.n() != n {
        return Err(Error::MapMismatch(format!(
            "report matching is {}x{} but the duplicated instance is {}x{}",
            report.matching.m(),
            report.matching.n(),
            total,
            n
        )));
    }
    let mut mass = Array2::zeros((m, n));
    for i in 0..m {
        for t in dup.duplicates_of(i) {
            let j = report.matching.row_to_col()[t].ok_or(Error::NotPerfect)?;
            mass[(i, j)] += 1.0 / total as f64;
        }
    }
    Ok(TransportPlan { mass })
}

/// Marks padding added by the assignment builders so solutions can be read
/// back in the original terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadInfo {
    /// Zero-payoff role column appended by [`build_one_to_many`].
    pub dummy_col: Option<usize>,
    /// Zero-payoff task row appended by [`build_many_to_many`].
    pub dummy_row: Option<usize>,
}

fn validate_payoff(payoff: &Array2<f64>) -> Result<()> {
    for ((i, j), &v) in payoff.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::InvalidEntry { row: i, col: j });
        }
        if v < 0.0 {
            return Err(Error::NegativePayoff { row: i, col: j });
        }
    }
    Ok(())
}

/// One-to-many selection: choose players for roles to maximize total payoff.
/// `payoff[i][j]` is player i's evaluation for role j and `roles[j]` how many
/// players role j needs. Surplus players are absorbed by an appended
/// zero-payoff role.
pub fn build_one_to_many(
    payoff: &Array2<f64>,
    roles: &[usize],
) -> Result<(SemiAssignProblem, PadInfo)> {
    let (players, d) = payoff.dim();
    if roles.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "{} role counts for {} payoff columns",
            roles.len(),
            d
        )));
    }
    if roles.contains(&0) {
        return Err(Error::InvalidParams("role counts must be positive".into()));
    }
    validate_payoff(payoff)?;
    let slots: usize = roles.iter().sum();
    if players < slots {
        return Err(Error::TooFewPlayers { players, slots });
    }

    let dummy = players > slots;
    let n = if dummy { d + 1 } else { d };
    let mut padded = Array2::zeros((players, n));
    padded.slice_mut(ndarray::s![.., ..d]).assign(payoff);
    let max = padded.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cost = padded.mapv(|v| max - v);
    let mut caps: Vec<usize> = roles.to_vec();
    if dummy {
        caps.push(players - slots);
    }
    let problem = SemiAssignProblem::new(cost, caps)?;
    Ok((
        problem,
        PadInfo {
            dummy_col: dummy.then_some(d),
            dummy_row: None,
        },
    ))
}

/// Total payoff of a one-to-many solution, ignoring assignments to the
/// padding column.
pub fn one_to_many_payoff(report: &SolveReport, payoff: &Array2<f64>, pad: &PadInfo) -> f64 {
    report
        .matching
        .row_to_col()
        .iter()
        .enumerate()
        .filter_map(|(i, j)| {
            let j = (*j)?;
            if pad.dummy_col == Some(j) {
                None
            } else {
                Some(payoff[(i, j)])
            }
        })
        .sum()
}

/// Many-to-many assignment: task i needs `task_needs[i]` agent slots, agent j
/// offers up to `agent_caps[j]` slots, and `payoff[i][j]` is the value of one
/// slot of agent j on task i. Spare agent slots go to an appended zero-payoff
/// task.
pub fn build_many_to_many(
    payoff: &Array2<f64>,
    task_needs: &[usize],
    agent_caps: &[usize],
) -> Result<(GeneralOTSpec, PadInfo)> {
    let (tasks, agents) = payoff.dim();
    if task_needs.len() != tasks || agent_caps.len() != agents {
        return Err(Error::DimensionMismatch(format!(
            "payoff is {}x{} but there are {} task needs and {} agent capacities",
            tasks,
            agents,
            task_needs.len(),
            agent_caps.len()
        )));
    }
    if task_needs.contains(&0) || agent_caps.contains(&0) {
        return Err(Error::InvalidParams(
            "task needs and agent capacities must be positive".into(),
        ));
    }
    validate_payoff(payoff)?;
    let required: usize = task_needs.iter().sum();
    let available: usize = agent_caps.iter().sum();
    if required > available {
        return Err(Error::Infeasible {
            required,
            available,
        });
    }

    let dummy = required < available;
    let rows = if dummy { tasks + 1 } else { tasks };
    let mut padded = Array2::zeros((rows, agents));
    padded.slice_mut(ndarray::s![..tasks, ..]).assign(payoff);
    let max = padded.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cost = padded.mapv(|v| max - v);
    let mut needs = task_needs.to_vec();
    if dummy {
        needs.push(available - required);
    }
    let spec = GeneralOTSpec::new(cost, needs, agent_caps.to_vec())?;
    Ok((
        spec,
        PadInfo {
            dummy_col: None,
            dummy_row: dummy.then_some(tasks),
        },
    ))
}

/// Total payoff of a many-to-many plan, ignoring the padding task. The plan
/// carries probability-scale masses, so the total mass restores slot counts.
pub fn many_to_many_payoff(
    plan: &TransportPlan,
    payoff: &Array2<f64>,
    pad: &PadInfo,
    total_mass: usize,
) -> f64 {
    let mut sum = 0.0;
    for i in 0..plan.mass.nrows() {
        if pad.dummy_row == Some(i) {
            continue;
        }
        for j in 0..plan.mass.ncols() {
            sum += plan.mass[(i, j)] * total_mass as f64 * payoff[(i, j)];
        }
    }
    sum
}
