use ftp_core::approx::{approx_k, approx_kplus1, induced_flow};
use ftp_core::bipath::solve_1ftp;
use ftp_core::gen::{random_instance, rng, GenParams};
use ftp_core::instance::DEFAULT_SCENARIO_CAP;
use ftp_core::oracle::{brute_force_feasible, optimum};
use ftp_core::{is_feasible, Error, Instance};
use rand::Rng;

fn params<R: Rng>(r: &mut R, k: usize) -> GenParams {
    GenParams {
        vertices: r.gen_range(2..=7),
        edges: r.gen_range(1..=12),
        k,
        directed: r.gen_bool(0.5),
        faulty_prob: r.gen_range(0.2..0.9),
        max_cost: 10,
    }
}

#[test]
fn one_ftp_matches_oracle() {
    let mut r = rng(11);
    for _ in 0..300 {
        let p = params(&mut r, 1);
        let inst = random_instance(&mut r, p);
        let opt = optimum(&inst).unwrap();
        match solve_1ftp(&inst) {
            Ok(sol) => {
                assert_eq!(Some(sol.cost), opt, "{inst:?}");
                assert!(is_feasible(&inst, &sol.edges).unwrap());
            }
            Err(Error::Infeasible) => assert_eq!(opt, None, "{inst:?}"),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn approximations_respect_ratios() {
    let mut r = rng(12);
    for _ in 0..300 {
        let k = r.gen_range(0..=2);
        let p = params(&mut r, k);
        let inst = random_instance(&mut r, p);
        let Some(opt) = optimum(&inst).unwrap() else {
            assert_eq!(approx_kplus1(&inst), Err(Error::Infeasible));
            continue;
        };
        let a1 = approx_kplus1(&inst).unwrap();
        assert!(a1.cost <= (k as i64 + 1) * opt, "{inst:?}");
        assert!(is_feasible(&inst, &a1.edges).unwrap());
        let a = approx_k(&inst).unwrap();
        assert!(is_feasible(&inst, &a.edges).unwrap());
        match k {
            0 | 1 => assert_eq!(a.cost, opt, "{inst:?}"),
            _ => assert!(a.cost <= k as i64 * opt, "{inst:?}"),
        }
    }
}

fn minimalize(inst: &Instance, mut set: Vec<usize>) -> Vec<usize> {
    let mut i = 0;
    while i < set.len() {
        let mut without = set.clone();
        without.remove(i);
        if is_feasible(inst, &without).unwrap() {
            set = without;
        } else {
            i += 1;
        }
    }
    set
}

#[test]
fn induced_flow_bridges_are_cut_edges() {
    let mut r = rng(13);
    let mut checked = 0;
    for _ in 0..400 {
        let k = r.gen_range(1..=2);
        let p = params(&mut r, k);
        let inst = random_instance(&mut r, p);
        let subset: Vec<usize> = (0..inst.edge_count()).filter(|_| r.gen_bool(0.7)).collect();
        if !is_feasible(&inst, &subset).unwrap() {
            continue;
        }
        let minimal = minimalize(&inst, subset);
        let f = induced_flow(&inst, &minimal).unwrap();
        for &b in &f.bridges {
            let rest: Vec<usize> = minimal.iter().copied().filter(|&e| e != b).collect();
            assert!(!inst.connects(|e| rest.contains(&e.id)), "{inst:?} {minimal:?} bridge {b}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn feasibility_checker_matches_enumeration() {
    let mut r = rng(14);
    for _ in 0..300 {
        let k = r.gen_range(0..=2);
        let p = GenParams {
            vertices: 6,
            edges: 10,
            ..params(&mut r, k)
        };
        let inst = random_instance(&mut r, p);
        for _ in 0..8 {
            let subset: Vec<usize> = (0..inst.edge_count()).filter(|_| r.gen_bool(0.6)).collect();
            assert_eq!(
                is_feasible(&inst, &subset).unwrap(),
                brute_force_feasible(&inst, &subset, DEFAULT_SCENARIO_CAP).unwrap(),
                "{inst:?} {subset:?}"
            );
        }
    }
}

#[test]
fn dag_solver_matches_oracle() {
    use ftp_core::dag::{layerize, solve_kftp_dag};
    use ftp_core::gen::random_dag;
    let mut r = rng(15);
    let start = std::time::Instant::now();
    for _ in 0..150 {
        let k = r.gen_range(0..=2);
        let p = GenParams {
            vertices: r.gen_range(2..=7),
            edges: r.gen_range(1..=12),
            k,
            directed: true,
            faulty_prob: r.gen_range(0.2..0.9),
            max_cost: 10,
        };
        let inst = random_dag(&mut r, p);
        let opt = optimum(&inst).unwrap();
        match solve_kftp_dag(&inst) {
            Ok(sol) => {
                assert_eq!(Some(sol.cost), opt, "{inst:?}");
                assert!(is_feasible(&inst, &sol.edges).unwrap());
            }
            Err(Error::Infeasible) => assert_eq!(opt, None, "{inst:?}"),
            Err(e) => panic!("{e}"),
        }
        let layered = layerize(&inst).unwrap().to_instance();
        if layered.edge_count() <= 16 {
            assert_eq!(optimum(&layered).unwrap(), opt, "{inst:?}");
        }
    }
    eprintln!("dag: {:?}", start.elapsed());
}

#[test]
fn srp_table_matches_oracle_per_budget() {
    use ftp_core::gen::random_srp;
    use ftp_core::srp::{decompose_srp, solve_ftp_srp, DecompositionTree};
    let mut r = rng(14);
    for _ in 0..150 {
        let k = r.gen_range(0..=3);
        let p = GenParams { vertices: 0, edges: 0, k, directed: false, faulty_prob: r.gen_range(0.2..0.9), max_cost: 10 };
        let c = r.gen_range(0..=11);
        let inst = random_srp(&mut r, c, p);
        let tree = decompose_srp(&inst).unwrap();
        let text = tree.to_expression();
        assert_eq!(DecompositionTree::parse_expression(&text, &inst).unwrap().to_expression(), text);
        let table = solve_ftp_srp(&inst, &tree).unwrap();
        for (j, entry) in table.entries.iter().enumerate() {
            let opt = optimum(&inst.with_k(j)).unwrap();
            assert_eq!(entry.as_ref().map(|s| s.cost), opt, "budget {j} of {inst:?}");
            if let Some(sol) = entry {
                assert!(is_feasible(&inst.with_k(j), &sol.edges).unwrap());
            }
        }
    }
}

fn capacities_of(inst: &Instance, edges: &[usize]) -> Vec<num_rational::BigRational> {
    (0..inst.edge_count()).map(|e| num_rational::BigRational::from_integer(i64::from(edges.contains(&e)).into())).collect()
}

// every s-t vertex cut under `y` carries at least `need`
fn min_vertex_cut(inst: &Instance, y: &[num_rational::BigRational]) -> num_rational::BigRational {
    let n = inst.vertex_count;
    let mut best: Option<num_rational::BigRational> = None;
    for mask in 0u32..1 << n {
        let side = |v: usize| mask >> v & 1 == 1;
        if !side(inst.s) || side(inst.t) {
            continue;
        }
        let cap = inst
            .edges
            .iter()
            .filter(|e| if inst.directed { side(e.u) && !side(e.v) } else { side(e.u) != side(e.v) })
            .map(|e| y[e.id].clone())
            .sum::<num_rational::BigRational>();
        if best.as_ref().is_none_or(|b| cap < *b) {
            best = Some(cap);
        }
    }
    best.expect("s and t differ")
}

#[test]
fn fractional_relaxation_properties() {
    use ftp_core::frac::{admits_unit_flow, rounding_vector, solve_frac, solve_frac_with, FracConfig};
    use num_rational::BigRational;
    let mut r = rng(15);
    let mut checked = 0;
    for _ in 0..200 {
        let k = r.gen_range(0..=2);
        let mut p = params(&mut r, k);
        p.vertices = r.gen_range(2..=6);
        p.edges = r.gen_range(1..=9);
        p.max_cost = 4;
        let mut inst = random_instance(&mut r, p);
        // duplicate a few edges to exercise aggregation
        for _ in 0..r.gen_range(0..3) {
            if let Some(e) = inst.edges.get(r.gen_range(0..inst.edge_count())).cloned() {
                inst.add_edge(e.u, e.v, e.w, e.faulty);
            }
        }
        let opt = optimum(&inst).unwrap();
        let frac = match solve_frac(&inst) {
            Err(Error::Infeasible) => {
                assert_eq!(opt, None);
                continue;
            }
            other => other.unwrap(),
        };
        let opt = BigRational::from_integer(opt.expect("feasible").into());
        let k1 = BigRational::from_integer((inst.k as i64 + 1).into());
        assert!(frac.value <= opt && opt <= &k1 * &frac.value, "{inst:?}");
        assert!(admits_unit_flow(&inst, &frac.x, DEFAULT_SCENARIO_CAP).unwrap());
        let plain = solve_frac_with(&inst, FracConfig { aggregate: false, ..Default::default() }).unwrap();
        assert_eq!(plain.value, frac.value, "{inst:?}");
        if inst.s != inst.t {
            let y = rounding_vector(&frac, &inst);
            assert!(min_vertex_cut(&inst, &y) >= k1, "{inst:?}");
            let w_y: BigRational = inst.edges.iter().map(|e| BigRational::from_integer(e.w.into()) * &y[e.id]).sum();
            let approx = approx_kplus1(&inst).unwrap();
            assert!(BigRational::from_integer(approx.cost.into()) <= w_y);
        }
        // the relaxation is exact without failures
        if inst.k == 0 || inst.faulty_ids().is_empty() {
            assert_eq!(frac.value, opt);
        }
        // integral optima are feasible capacity vectors
        let best = ftp_core::oracle::brute_force_opt(&inst, Default::default()).unwrap().best.unwrap();
        assert!(admits_unit_flow(&inst, &capacities_of(&inst, &best.edges), DEFAULT_SCENARIO_CAP).unwrap());
        checked += 1;
    }
    assert!(checked > 60, "only {checked} feasible instances");
}

#[test]
fn class_search_agrees_with_subset_search() {
    use ftp_core::oracle::{brute_force_opt, OracleConfig};
    let mut r = rng(16);
    let mut compared = 0;
    for _ in 0..150 {
        let k = r.gen_range(0..=2);
        let mut p = params(&mut r, k);
        p.vertices = r.gen_range(2..=4);
        p.edges = r.gen_range(1..=5);
        p.max_cost = 2;
        let mut inst = random_instance(&mut r, p);
        for _ in 0..r.gen_range(0..6) {
            let e = inst.edges[r.gen_range(0..inst.edge_count())].clone();
            inst.add_edge(e.u, e.v, e.w, e.faulty);
        }
        let subsets = brute_force_opt(&inst, OracleConfig::default()).unwrap();
        let forced = OracleConfig { edge_cap: inst.edge_count() - 1, ..Default::default() };
        match brute_force_opt(&inst, forced) {
            Ok(classes) => {
                assert_eq!(classes.best, subsets.best, "{inst:?}");
                compared += 1;
            }
            Err(Error::InstanceTooLargeForOracle { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(compared >= 40, "only {compared} instances reached the class search");
}
