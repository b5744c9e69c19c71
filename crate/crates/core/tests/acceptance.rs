//! Acceptance criteria. Runs without the test harness so that every
//! criterion prints its verdict line; exits non-zero if a hard criterion
//! fails.

use std::time::{Duration, Instant};

use ftp_core::approx::{approx_k, approx_kplus1};
use ftp_core::bipath::solve_1ftp;
use ftp_core::dag::{layerize, solve_kftp_dag};
use ftp_core::frac::{gap_family, solve_frac};
use ftp_core::gen::{random_dag, random_instance, random_srp, rng, GenParams};
use ftp_core::instance::DEFAULT_SCENARIO_CAP;
use ftp_core::oracle::{brute_force_feasible, brute_force_opt, OracleConfig};
use ftp_core::srp::{decompose_srp, solve_ftp_srp};
use ftp_core::{is_feasible, Error, Instance};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, &'static str, f64, fn() -> Verdict);

fn opt(inst: &Instance) -> Option<i64> {
    brute_force_opt(inst, OracleConfig::default()).unwrap().best.map(|s| s.cost)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> BigRational {
    q(n, 1)
}

fn small_params<R: Rng>(r: &mut R, k: usize, directed: bool) -> GenParams {
    GenParams {
        vertices: r.gen_range(2..=7),
        edges: r.gen_range(1..=12),
        k,
        directed,
        faulty_prob: r.gen_range(0.2..0.8),
        max_cost: 10,
    }
}

// plain Bellman-Ford over all edges
fn shortest_path(inst: &Instance) -> Option<i64> {
    let mut dist = vec![None; inst.vertex_count];
    dist[inst.s] = Some(0i64);
    for _ in 0..inst.vertex_count {
        for e in &inst.edges {
            let arcs = if inst.directed { vec![(e.u, e.v)] } else { vec![(e.u, e.v), (e.v, e.u)] };
            for (a, b) in arcs {
                if let Some(d) = dist[a] {
                    if dist[b].is_none_or(|x| d + e.w < x) {
                        dist[b] = Some(d + e.w);
                    }
                }
            }
        }
    }
    dist[inst.t]
}

fn gap_reproduction() -> Verdict {
    for (d, k) in [(2usize, 1usize), (4, 1), (10, 2), (100, 3)] {
        let inst = gap_family(d, k).unwrap();
        let (di, ki) = (d as i64, k as i64);
        let frac = solve_frac(&inst).unwrap().value;
        if frac != q(di, di - ki) {
            return Err(format!("D={d} k={k}: fractional {frac}, expected {}", q(di, di - ki)));
        }
        let integral = opt(&inst);
        if integral != Some(ki + 1) {
            return Err(format!("D={d} k={k}: integral {integral:?}, expected {}", k + 1));
        }
        let ratio = int(ki + 1) / &frac;
        if ratio != q((ki + 1) * (di - ki), di) {
            return Err(format!("D={d} k={k}: ratio {ratio}"));
        }
    }
    Ok("4 families exact, ratios 1, 3/2, 12/5, 97/25".into())
}

fn one_ftp_exactness() -> Verdict {
    let mut r = rng(101);
    let (mut feasible, mut total) = (0, 0);
    while feasible < 500 {
        let directed = r.gen_bool(0.5);
        let p = small_params(&mut r, 1, directed);
        let inst = random_instance(&mut r, p);
        let expected = opt(&inst);
        let got = match solve_1ftp(&inst) {
            Ok(sol) => Some(sol.cost),
            Err(Error::Infeasible) => None,
            Err(e) => return Err(format!("{e} on {inst:?}")),
        };
        if got != expected {
            return Err(format!("cost {got:?} vs oracle {expected:?} on {inst:?}"));
        }
        feasible += usize::from(expected.is_some());
        total += 1;
    }
    Ok(format!("{total} instances, {feasible} feasible, all equal"))
}

fn dag_exactness() -> Verdict {
    let mut r = rng(102);
    let wide = OracleConfig { edge_cap: 24, ..Default::default() };
    let (mut feasible, mut total) = (0, 0);
    while feasible < 300 {
        let k = r.gen_range(1..=2);
        let mut p = small_params(&mut r, k, true);
        p.edges = r.gen_range(3..=12);
        let inst = random_dag(&mut r, p);
        let expected = opt(&inst);
        let got = match solve_kftp_dag(&inst) {
            Ok(sol) => Some(sol.cost),
            Err(Error::Infeasible) => None,
            Err(e) => return Err(format!("{e} on {inst:?}")),
        };
        if got != expected {
            return Err(format!("cost {got:?} vs oracle {expected:?} on {inst:?}"));
        }
        let layered = layerize(&inst).unwrap().to_instance();
        let layered_opt = brute_force_opt(&layered, wide).map_err(|e| format!("layered oracle: {e}"))?.best.map(|s| s.cost);
        if layered_opt != expected {
            return Err(format!("layering changed the optimum {expected:?} -> {layered_opt:?} on {inst:?}"));
        }
        feasible += usize::from(expected.is_some());
        total += 1;
    }
    Ok(format!("{total} DAGs, {feasible} feasible, solver and layering exact"))
}

fn srp_exactness() -> Verdict {
    let mut r = rng(103);
    let mut entries = 0;
    for _ in 0..320 {
        let k = r.gen_range(0..=3);
        let p = GenParams { vertices: 0, edges: 0, k, directed: false, faulty_prob: r.gen_range(0.2..0.8), max_cost: 10 };
        let steps = r.gen_range(0..=11);
        let inst = random_srp(&mut r, steps, p);
        let tree = decompose_srp(&inst).map_err(|e| format!("{e} on {inst:?}"))?;
        let table = solve_ftp_srp(&inst, &tree).unwrap();
        for (j, entry) in table.costs().into_iter().enumerate() {
            let expected = opt(&inst.with_k(j));
            if entry != expected {
                return Err(format!("budget {j}: {entry:?} vs oracle {expected:?} on {inst:?}"));
            }
            entries += 1;
        }
        if table.costs()[0] != shortest_path(&inst) {
            return Err(format!("entry 0 is not the shortest path on {inst:?}"));
        }
    }
    Ok(format!("320 graphs, {entries} table entries equal"))
}

fn approximation_ratios() -> Verdict {
    let mut r = rng(104);
    let (mut feasible, mut k1) = (0, 0);
    while feasible < 520 {
        let k = r.gen_range(0..=2);
        let directed = r.gen_bool(0.5);
        let p = small_params(&mut r, k, directed);
        let inst = random_instance(&mut r, p);
        let Some(best) = opt(&inst) else { continue };
        feasible += 1;
        let ki = k as i64;
        let a1 = approx_kplus1(&inst).map_err(|e| format!("{e} on {inst:?}"))?;
        let ak = approx_k(&inst).map_err(|e| format!("{e} on {inst:?}"))?;
        for sol in [&a1, &ak] {
            if !is_feasible(&inst, &sol.edges).unwrap() {
                return Err(format!("infeasible output on {inst:?}"));
            }
        }
        if a1.cost > (ki + 1) * best {
            return Err(format!("(k+1)-approximation {} > {} x {best} on {inst:?}", a1.cost, ki + 1));
        }
        // with k = 0 the k-approximation is the exact shortest path
        if ak.cost > ki.max(1) * best {
            return Err(format!("k-approximation {} > {} x {best} on {inst:?}", ak.cost, ki.max(1)));
        }
        if k == 1 {
            k1 += 1;
            if ak.cost != best {
                return Err(format!("k-approximation {} != optimum {best} at k = 1 on {inst:?}", ak.cost));
            }
        }
    }
    Ok(format!("{feasible} feasible instances ({k1} with k = 1), zero violations"))
}

fn feasibility_equivalence() -> Verdict {
    let mut r = rng(105);
    let mut pairs = 0;
    let mut yes = 0;
    while pairs < 10_000 {
        let k = r.gen_range(0..=3);
        let directed = r.gen_bool(0.5);
        let p = small_params(&mut r, k, directed);
        let inst = random_instance(&mut r, p);
        for _ in 0..10 {
            let keep = r.gen_range(0.3..1.0);
            let subset: Vec<usize> = (0..inst.edge_count()).filter(|_| r.gen_bool(keep)).collect();
            let fast = is_feasible(&inst, &subset).unwrap();
            let brute = brute_force_feasible(&inst, &subset, DEFAULT_SCENARIO_CAP).unwrap();
            if fast != brute {
                return Err(format!("{subset:?}: flow says {fast}, enumeration says {brute} on {inst:?}"));
            }
            yes += usize::from(fast);
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs agree ({yes} feasible)"))
}

fn sandwich() -> Verdict {
    let mut r = rng(106);
    let mut checked = 0;
    let mut tight = 0;
    let mut cases: Vec<Instance> = [(2, 1), (4, 1), (10, 2), (100, 3), (7, 2)].iter().map(|&(d, k)| gap_family(d, k).unwrap()).collect();
    for _ in 0..300 {
        let k = r.gen_range(0..=2);
        let directed = r.gen_bool(0.5);
        let mut p = small_params(&mut r, k, directed);
        p.vertices = r.gen_range(2..=6);
        p.edges = r.gen_range(1..=10);
        cases.push(random_instance(&mut r, p));
    }
    // few vertices and mostly faulty edges: many parallel routes, real gaps
    for _ in 0..300 {
        let k = r.gen_range(1..=2);
        let p = GenParams {
            vertices: r.gen_range(2..=4),
            edges: r.gen_range(3..=10),
            k,
            directed: r.gen_bool(0.3),
            faulty_prob: r.gen_range(0.7..1.0),
            max_cost: 5,
        };
        cases.push(random_instance(&mut r, p));
    }
    for inst in cases {
        let frac = match solve_frac(&inst) {
            Ok(x) => x.value,
            Err(Error::Infeasible) => {
                if opt(&inst).is_some() {
                    return Err(format!("relaxation infeasible but integral feasible on {inst:?}"));
                }
                continue;
            }
            Err(e) => return Err(format!("{e} on {inst:?}")),
        };
        let best = int(opt(&inst).ok_or_else(|| format!("integral infeasible but relaxation feasible on {inst:?}"))?);
        let bound = int(inst.k as i64 + 1) * &frac;
        if !(frac <= best && best <= bound) {
            return Err(format!("{frac} <= {best} <= {bound} fails on {inst:?}"));
        }
        tight += usize::from(frac == best);
        checked += 1;
    }
    Ok(format!("{checked} instances, {tight} with no gap"))
}

fn srp_scaling() -> (bool, String) {
    let mut r = rng(107);
    let k = 3;
    let mut per_edge = Vec::new();
    for j in 10..=16u32 {
        let m = 1usize << j;
        let p = GenParams { vertices: 0, edges: 0, k, directed: false, faulty_prob: 0.5, max_cost: 100 };
        let inst = random_srp(&mut r, m - 1, p);
        let tree = decompose_srp(&inst).unwrap();
        let mut times: Vec<Duration> = (0..3)
            .map(|_| {
                let start = Instant::now();
                solve_ftp_srp(&inst, &tree).unwrap();
                start.elapsed()
            })
            .collect();
        times.sort();
        per_edge.push((j, times[1].as_secs_f64() / m as f64));
    }
    let base = per_edge[0].1;
    let worst = per_edge.iter().map(|(_, t)| t / base).fold(0.0, f64::max);
    let detail = per_edge.iter().map(|(j, t)| format!("2^{j}:{:.2}us", t * 1e6)).collect::<Vec<_>>().join(" ");
    (worst <= 3.0, format!("time per edge within {worst:.2}x of 2^10 ({detail})"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1", "integrality gap reproduction", 5.0, gap_reproduction),
        ("2", "1-FTP exactness", 60.0, one_ftp_exactness),
        ("3", "DAG exactness", 120.0, dag_exactness),
        ("4", "series-parallel exactness", 60.0, srp_exactness),
        ("5", "approximation ratios", 120.0, approximation_ratios),
        ("6", "feasibility checker equivalence", 60.0, feasibility_equivalence),
        ("7", "sandwich property", f64::INFINITY, sandwich),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match verdict {
            Ok(d) if secs <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took {secs:.2}s, limit {limit}s")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!("[{}] {id}. {name}: {detail} ({secs:.2}s)", if ok { "PASS" } else { "FAIL" });
    }
    let start = Instant::now();
    let (ok, detail) = srp_scaling();
    println!("[{}] 8. series-parallel runtime scaling: {detail} ({:.2}s)", if ok { "PASS" } else { "WARN" }, start.elapsed().as_secs_f64());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
