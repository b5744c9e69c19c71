//! The fractional relaxation: capacities `x ∈ [0,1]^E` such that every
//! failure scenario leaves an s-t flow of value 1. Solved exactly over the
//! rationals.
//!
//! Interchangeable parallel edges receive the same capacity (averaging any
//! optimum over their permutations keeps it optimal), so the program is
//! written over parallel classes and failure counts per class. Flow
//! constraints are replaced by their cut form and generated lazily: a
//! scenario whose max flow is below 1 yields the violated min cut.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::flow::augment;
use crate::oracle::{brute_force_opt, OracleConfig};
use crate::instance::{maximal_scenarios, parallel_classes, scenario_count, EdgeId, Instance, ParallelClass, DEFAULT_SCENARIO_CAP};

pub const DEFAULT_LP_CAP: u128 = 50_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityVector {
    /// Indexed by edge id.
    pub x: Vec<BigRational>,
    pub value: BigRational,
}

#[derive(Debug, Clone, Copy)]
pub struct FracConfig {
    pub scenario_cap: u128,
    /// Bound on reduced scenarios times parallel classes.
    pub lp_cap: u128,
    /// Merge interchangeable parallel edges into one variable.
    pub aggregate: bool,
}

impl Default for FracConfig {
    fn default() -> Self {
        FracConfig {
            scenario_cap: DEFAULT_SCENARIO_CAP,
            lp_cap: DEFAULT_LP_CAP,
            aggregate: true,
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn solve_frac(instance: &Instance) -> Result<CapacityVector> {
    solve_frac_with(instance, FracConfig::default())
}

pub fn solve_frac_with(instance: &Instance, config: FracConfig) -> Result<CapacityVector> {
    instance.validate()?;
    let instance = instance.canonical();
    let m = instance.edge_count();
    let raw = scenario_count(instance.faulty_ids().len(), instance.k);
    if raw > config.scenario_cap {
        return Err(Error::ScenarioSpaceTooLarge { count: raw, cap: config.scenario_cap });
    }
    let classes = if config.aggregate {
        parallel_classes(&instance)
    } else {
        instance
            .edges
            .iter()
            .map(|e| ParallelClass { u: e.u, v: e.v, w: e.w, faulty: e.faulty, ids: vec![e.id] })
            .collect()
    };
    let scenarios = reduced_scenarios(&classes, instance.k);
    let variables = (scenarios.len() as u128).saturating_mul(classes.len() as u128);
    if variables > config.lp_cap {
        return Err(Error::TooLargeForExactLP { variables, cap: config.lp_cap });
    }
    if instance.s == instance.t {
        return Ok(CapacityVector {
            x: vec![BigRational::zero(); m],
            value: BigRational::zero(),
        });
    }
    let all: Vec<EdgeId> = (0..m).collect();
    if !crate::instance::is_feasible(&instance, &all)? {
        return Err(Error::Infeasible);
    }

    let costs: Vec<BigRational> = classes.iter().map(|c| rat(c.w * c.ids.len() as i64)).collect();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let z = loop {
        let z = solve_covering(&rows, &costs)?;
        let before = rows.len();
        for failed in &scenarios {
            if let Some(row) = violated_cut(&instance, &classes, failed, &z) {
                rows.push(row);
            }
        }
        if rows.len() == before {
            break z;
        }
    };

    let mut x = vec![BigRational::zero(); m];
    for (c, zc) in classes.iter().zip(&z) {
        for &id in &c.ids {
            x[id] = zc.clone();
        }
    }
    let value = instance.edges.iter().map(|e| rat(e.w) * &x[e.id]).fold(BigRational::zero(), |a, b| a + b);
    Ok(CapacityVector { x, value })
}

// Failure counts per class with total min(k, |M|).
fn reduced_scenarios(classes: &[ParallelClass], k: usize) -> Vec<Vec<usize>> {
    let faulty: Vec<usize> = (0..classes.len()).filter(|&i| classes[i].faulty).collect();
    let total: usize = faulty.iter().map(|&i| classes[i].ids.len()).sum();
    let mut out = Vec::new();
    let mut cur = vec![0; classes.len()];
    fn rec(classes: &[ParallelClass], faulty: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some((&c, rest)) = faulty.split_first() else {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        };
        let room: usize = rest.iter().map(|&i| classes[i].ids.len()).sum();
        for j in left.saturating_sub(room)..=left.min(classes[c].ids.len()) {
            cur[c] = j;
            rec(classes, rest, left - j, cur, out);
        }
        cur[c] = 0;
    }
    rec(classes, &faulty, k.min(total), &mut cur, &mut out);
    out
}

fn violated_cut(instance: &Instance, classes: &[ParallelClass], failed: &[usize], z: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut arcs = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        let alive = (c.ids.len() - failed[i]) as i64;
        if alive == 0 {
            continue;
        }
        let cap = rat(alive) * &z[i];
        arcs.push((c.u, c.v, cap.clone()));
        if !instance.directed {
            arcs.push((c.v, c.u, cap));
        }
    }
    let out = augment(instance.vertex_count, &arcs, instance.s, instance.t, Some(BigRational::one()));
    if out.value >= BigRational::one() {
        return None;
    }
    let side = &out.source_side;
    let row = classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let crosses = if instance.directed { side[c.u] && !side[c.v] } else { side[c.u] != side[c.v] };
            if crosses {
                rat((c.ids.len() - failed[i]) as i64)
            } else {
                BigRational::zero()
            }
        })
        .collect();
    Some(row)
}

/// Minimizes `costs · z` subject to `row · z ≥ 1` for every row and
/// `z ≥ 0`, through the dual `max Σy, Σ_r y_r row_r ≤ costs, y ≥ 0`, whose
/// slack basis is feasible because costs are nonnegative. Bland's rule
/// keeps the pivoting finite. The primal optimum is read off the reduced
/// costs of the slack columns.
fn solve_covering(rows: &[Vec<BigRational>], costs: &[BigRational]) -> Result<Vec<BigRational>> {
    let (r, n) = (rows.len(), costs.len());
    let width = r + n;
    // constraint i (one per class): Σ_j rows[j][i] y_j + s_i = costs[i]
    let mut tab: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut line: Vec<BigRational> = rows.iter().map(|row| row[i].clone()).collect();
            line.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            line
        })
        .collect();
    let mut rhs = costs.to_vec();
    let mut basis: Vec<usize> = (r..width).collect();
    let mut reduced: Vec<BigRational> = (0..width).map(|j| if j < r { -BigRational::one() } else { BigRational::zero() }).collect();
    while let Some(enter) = reduced.iter().position(|d| d.is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..n {
            if tab[i][enter].is_positive() {
                let ratio = &rhs[i] / &tab[i][enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else {
            return Err(Error::Infeasible);
        };
        let pivot = tab[p][enter].clone();
        for v in tab[p].iter_mut() {
            *v /= &pivot;
        }
        rhs[p] /= &pivot;
        let pivot_row = tab[p].clone();
        let eliminate = |row: &mut [BigRational], f: &BigRational| {
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= f * pv;
                }
            }
        };
        for i in 0..n {
            if i != p && !tab[i][enter].is_zero() {
                let f = tab[i][enter].clone();
                eliminate(&mut tab[i], &f);
                let d = &f * &rhs[p];
                rhs[i] -= d;
            }
        }
        let f = reduced[enter].clone();
        eliminate(&mut reduced, &f);
        basis[p] = enter;
    }
    Ok(reduced[r..].to_vec())
}

/// Checks the defining condition directly: every maximal failure set leaves
/// a flow of value at least 1 under capacities `x`.
pub fn admits_unit_flow(instance: &Instance, x: &[BigRational], scenario_cap: u128) -> Result<bool> {
    let instance = instance.canonical();
    if x.len() != instance.edge_count() {
        return Err(Error::BadParameters(format!("{} capacities for {} edges", x.len(), instance.edge_count())));
    }
    if instance.s == instance.t {
        return Ok(true);
    }
    for scenario in maximal_scenarios(&instance, scenario_cap)? {
        let mut arcs = Vec::new();
        for e in instance.edges.iter().filter(|e| !scenario.failed.contains(&e.id)) {
            arcs.push((e.u, e.v, x[e.id].clone()));
            if !instance.directed {
                arcs.push((e.v, e.u, x[e.id].clone()));
            }
        }
        let out = augment(instance.vertex_count, &arcs, instance.s, instance.t, Some(BigRational::one()));
        if out.value < BigRational::one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(k+1)·x` on safe edges, `min(1, (k+1)·x)` on faulty ones.
pub fn rounding_vector(x: &CapacityVector, instance: &Instance) -> Vec<BigRational> {
    let scale = rat(instance.k as i64 + 1);
    let instance = instance.canonical();
    instance
        .edges
        .iter()
        .map(|e| {
            let y = &scale * &x.x[e.id];
            if e.faulty && y > BigRational::one() {
                BigRational::one()
            } else {
                y
            }
        })
        .collect()
}

/// `d` parallel faulty unit-cost edges between two vertices, budget `k`.
pub fn gap_family(d: usize, k: usize) -> Result<Instance> {
    if d < k + 1 {
        return Err(Error::BadParameters(format!("need at least k+1 = {} edges, got {d}", k + 1)));
    }
    let mut inst = Instance::new(false, 2, 0, 1, k);
    for _ in 0..d {
        inst.add_edge(0, 1, 1, true);
    }
    Ok(inst)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub integral_opt: i64,
    pub fractional_opt: BigRational,
    pub ratio: BigRational,
}

/// Integral optimum from the exhaustive oracle against the fractional one.
/// A zero fractional optimum forces a zero integral one; the ratio is then 1.
pub fn gap_report(instance: &Instance) -> Result<GapReport> {
    gap_report_with(instance, FracConfig::default(), OracleConfig::default())
}

pub fn gap_report_with(instance: &Instance, frac: FracConfig, oracle: OracleConfig) -> Result<GapReport> {
    let frac = solve_frac_with(instance, frac)?;
    let best = brute_force_opt(instance, oracle)?.best.ok_or(Error::Infeasible)?;
    let ratio = if frac.value.is_zero() {
        BigRational::one()
    } else {
        rat(best.cost) / &frac.value
    };
    Ok(GapReport {
        integral_opt: best.cost,
        fractional_opt: frac.value,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn gap_family_values() {
        let x = solve_frac(&gap_family(4, 1).unwrap()).unwrap();
        assert_eq!(x.value, q(4, 3));
        assert!(x.x.iter().all(|v| *v == q(1, 3)));
        assert_eq!(solve_frac(&gap_family(2, 1).unwrap()).unwrap().value, q(2, 1));
        assert_eq!(solve_frac(&gap_family(100, 3).unwrap()).unwrap().value, q(100, 97));
        assert!(matches!(gap_family(1, 1), Err(Error::BadParameters(_))));
    }

    #[test]
    fn gap_reports() {
        let r = gap_report(&gap_family(4, 1).unwrap()).unwrap();
        assert_eq!((r.integral_opt, r.fractional_opt, r.ratio), (2, q(4, 3), q(3, 2)));
        let r = gap_report(&gap_family(2, 1).unwrap()).unwrap();
        assert_eq!(r.ratio, q(1, 1));
        assert_eq!(gap_report(&gap_family(100, 3).unwrap()).unwrap().ratio, q(97, 25));
    }

    #[test]
    fn no_faulty_edges_gives_shortest_path() {
        let mut inst = Instance::new(true, 4, 0, 3, 2);
        inst.add_edge(0, 1, 1, false);
        inst.add_edge(1, 3, 1, false);
        inst.add_edge(0, 2, 1, false);
        inst.add_edge(2, 3, 3, false);
        inst.add_edge(0, 3, 5, false);
        let x = solve_frac(&inst).unwrap();
        assert_eq!(x.value, q(2, 1));
        assert_eq!(x.x, vec![q(1, 1), q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn rounding_on_gap_family() {
        let inst = gap_family(4, 1).unwrap();
        let x = solve_frac(&inst).unwrap();
        let y = rounding_vector(&x, &inst);
        assert!(y.iter().all(|v| *v == q(2, 3)));
        assert_eq!(y.iter().fold(BigRational::zero(), |a, b| a + b), q(8, 3));
        let safe = CapacityVector { x: vec![q(1, 1), q(0, 1)], value: q(1, 1) };
        let mut mixed = Instance::new(false, 2, 0, 1, 2);
        mixed.add_edge(0, 1, 1, false);
        mixed.add_edge(0, 1, 1, true);
        assert_eq!(rounding_vector(&safe, &mixed), vec![q(3, 1), q(0, 1)]);
    }

    #[test]
    fn infeasible_and_caps() {
        assert_eq!(solve_frac(&gap_family(3, 2).unwrap().with_k(3)), Err(Error::Infeasible));
        let cfg = FracConfig { scenario_cap: 10, ..Default::default() };
        assert!(matches!(solve_frac_with(&gap_family(10, 2).unwrap(), cfg), Err(Error::ScenarioSpaceTooLarge { .. })));
        let cfg = FracConfig { lp_cap: 0, ..Default::default() };
        assert!(matches!(solve_frac_with(&gap_family(10, 2).unwrap(), cfg), Err(Error::TooLargeForExactLP { .. })));
    }

    #[test]
    fn solution_satisfies_flow_condition() {
        // two disjoint routes, one safe and long, one faulty and short
        let mut inst = Instance::new(false, 4, 0, 3, 1);
        inst.add_edge(0, 1, 1, true);
        inst.add_edge(1, 3, 1, true);
        inst.add_edge(0, 2, 4, false);
        inst.add_edge(2, 3, 4, false);
        inst.add_edge(0, 3, 3, true);
        let x = solve_frac(&inst).unwrap();
        assert!(admits_unit_flow(&inst, &x.x, DEFAULT_SCENARIO_CAP).unwrap());
        assert!(x.x.iter().all(|v| !v.is_negative() && *v <= BigRational::one()));
    }
}
