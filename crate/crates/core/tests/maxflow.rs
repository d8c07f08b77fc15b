//! Max-flow solver checks: hand-verified small networks, oracle agreement on
//! random networks, and flow/cut certificates.

mod common;

use rand::Rng;

use raycut::graph::{build_graph, CostGrid};
use raycut::maxflow::{
    max_flow_bk, parse_dimacs, reference_max_flow, write_dimacs, FlowNetwork,
};
use raycut::template::build_icosphere;

use common::{random_network, rng};

fn chain() -> FlowNetwork {
    // s=0, a=1, t=2
    let mut net = FlowNetwork::new(3, 0, 2);
    net.add_arc(0, 1, 3);
    net.add_arc(1, 2, 2);
    net
}

fn diamond() -> FlowNetwork {
    // s=0, a=1, b=2, t=3
    let mut net = FlowNetwork::new(4, 0, 3);
    net.add_arc(0, 1, 3);
    net.add_arc(0, 2, 2);
    net.add_arc(1, 3, 2);
    net.add_arc(2, 3, 3);
    net.add_arc(1, 2, 1);
    net
}

/// Minimum cut by enumerating every partition with s on one side and t on
/// the other.
fn brute_force_min_cut(net: &FlowNetwork) -> i64 {
    let inner: Vec<usize> =
        (0..net.node_count).filter(|&v| v != net.source && v != net.sink).collect();
    assert!(inner.len() <= 16);
    (0u32..1 << inner.len())
        .map(|bits| {
            let mut side = vec![false; net.node_count];
            side[net.source] = true;
            for (i, &v) in inner.iter().enumerate() {
                side[v] = bits >> i & 1 == 1;
            }
            net.cut_capacity(&side)
        })
        .min()
        .unwrap()
}

fn assert_certificates(net: &FlowNetwork) {
    let flow = max_flow_bk(net);
    // capacity and conservation
    let mut balance = vec![0i64; net.node_count];
    for (a, &f) in net.arcs.iter().zip(&flow.arc_flows) {
        assert!(f >= 0 && f <= a.capacity || a.from == a.to);
        balance[a.from] -= f;
        balance[a.to] += f;
    }
    for v in 0..net.node_count {
        if v != net.source && v != net.sink {
            assert_eq!(balance[v], 0, "conservation at {v}");
        }
    }
    assert_eq!(-balance[net.source], flow.value);
    assert_eq!(balance[net.sink], flow.value);
    // duality: the reachable set is a cut of exactly the flow value
    assert!(flow.source_side[net.source] && !flow.source_side[net.sink]);
    assert_eq!(net.cut_capacity(&flow.source_side), flow.value);
}

#[test]
fn chain_bottleneck() {
    let net = chain();
    let flow = max_flow_bk(&net);
    assert_eq!(flow.value, 2);
    assert!(flow.source_side[1]);
    assert_eq!(reference_max_flow(&net), 2);
}

#[test]
fn diamond_matches_enumeration() {
    let net = diamond();
    let expected = brute_force_min_cut(&net);
    assert_eq!(expected, 5);
    assert_eq!(max_flow_bk(&net).value, 5);
    assert_eq!(reference_max_flow(&net), 5);
    assert_certificates(&net);
}

#[test]
fn single_ray_with_base_forcing() {
    let t = build_icosphere(0).unwrap();
    // one "ray" graph built by hand: costs [5, 2, 9], weights [5, -3, 7]
    let c = CostGrid::new(0.0, 1, 3, vec![5.0, 2.0, 9.0]).unwrap();
    let mut net = FlowNetwork::new(5, 3, 4);
    let scale = raycut::graph::CAPACITY_SCALE as i64;
    let inf = scale * (1 + 5 + 3 + 7);
    net.add_arc(1, 0, inf);
    net.add_arc(2, 1, inf);
    net.add_arc(0, 4, 5 * scale);
    net.add_arc(3, 1, 3 * scale);
    net.add_arc(2, 4, 7 * scale);
    net.add_arc(3, 0, inf);
    let flow = max_flow_bk(&net);
    let boundary = raycut::maxflow::extract_boundary(&flow.source_side, 1, 3).unwrap();
    assert_eq!(boundary, vec![1]);
    // brute force over b in {0, 1, 2}: costs 5, 2, 9
    let best = (0..3).min_by(|&a, &b| c.get(0, a).total_cmp(&c.get(0, b))).unwrap();
    assert_eq!(best, 1);
    // flow = sum of positive weights minus the optimum surface cost... in scaled units
    assert_eq!(flow.value, reference_max_flow(&net));
    assert_eq!(brute_force_min_cut(&net), flow.value);

    // the same through build_graph on a 12-ray template with identical rays
    let c12 = CostGrid::new(0.0, 12, 3, [5.0, 2.0, 9.0].repeat(12)).unwrap();
    let g = build_graph(&c12, &t, 1);
    let cut = g.solve().unwrap();
    assert!(cut.boundary.iter().all(|&b| b == 1));
}

#[test]
fn terminals_only_without_forcing_is_zero() {
    let mut net = FlowNetwork::new(5, 3, 4);
    for v in 0..3 {
        net.add_arc(v, 4, 10);
    }
    assert_eq!(max_flow_bk(&net).value, 0);
    assert_eq!(reference_max_flow(&net), 0);
}

#[test]
fn random_graphs_agree_with_oracle_and_enumeration() {
    let mut rng = rng(0x5eed);
    for _ in 0..300 {
        let net = random_network(&mut rng, 12);
        let bk = max_flow_bk(&net).value;
        assert_eq!(bk, reference_max_flow(&net));
        assert_eq!(bk, brute_force_min_cut(&net));
        assert_certificates(&net);
    }
}

#[test]
fn larger_random_graphs_agree_with_oracle() {
    let mut rng = rng(42);
    for _ in 0..200 {
        let net = random_network(&mut rng, 500);
        assert_eq!(max_flow_bk(&net).value, reference_max_flow(&net));
        assert_certificates(&net);
    }
}

#[test]
fn solver_is_deterministic() {
    let mut rng = rng(9);
    let net = random_network(&mut rng, 300);
    assert_eq!(max_flow_bk(&net), max_flow_bk(&net));
}

#[test]
fn dimacs_dump_solves_identically() {
    let t = build_icosphere(1).unwrap();
    let mut rng = rng(3);
    let values: Vec<f64> = (0..42 * 6).map(|_| rng.random_range(0.0..100.0)).collect();
    let g = build_graph(&CostGrid::new(0.0, 42, 6, values).unwrap(), &t, 1);
    let parsed = parse_dimacs(&write_dimacs(&g.network)).unwrap();
    assert_eq!(parsed, g.network);
    assert_eq!(max_flow_bk(&parsed).value, reference_max_flow(&g.network));
}
