use netreduce_web::{fuse_rankings_json, rank_grid_json, reduce_grid_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn opposite_three_node_rankings() {
    let v = parse(fuse_rankings_json("3,2,1", "1,2,3", 0.5, 0.9).unwrap());
    let nodes = v["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 3);
    let middle = &nodes[1];
    assert!((middle["beliefs"][1].as_f64().unwrap() - 0.93).abs() < 1e-3);
    assert!((middle["uncertainty"].as_f64().unwrap() - 0.07).abs() < 1e-3);
    let outer = nodes[0]["u_avg"].as_f64().unwrap();
    assert!((outer - nodes[2]["u_avg"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn fusion_rejects_bad_input() {
    assert!(fuse_rankings_json("1,2", "1,2,3", 0.5, 0.9).is_err());
    assert!(fuse_rankings_json("1,1,3", "1,2,3", 0.5, 0.9).is_err());
    assert!(fuse_rankings_json("1,2,3", "1,2,3", 0.5, 0.0).is_err());
    assert!(fuse_rankings_json("1,x,3", "1,2,3", 0.5, 0.9).is_err());
}

#[test]
fn ranking_covers_every_bus() {
    let v = parse(rank_grid_json(0.5, 0.9).unwrap());
    assert_eq!(v["network"]["buses"].as_array().unwrap().len(), 30);
    assert_eq!(v["network"]["branches"].as_array().unwrap().len(), 41);
    let criteria = v["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 4);
    for c in criteria {
        let mut ranks: Vec<u64> = c["ranks"].as_array().unwrap().iter().map(|r| r.as_u64().unwrap()).collect();
        ranks.sort_unstable();
        assert_eq!(ranks, (1..=30).collect::<Vec<_>>());
    }
}

#[test]
fn reduction_summary() {
    let v = parse(reduce_grid_json("c1", 10, 1e3, true).unwrap());
    assert_eq!(v["eliminated"].as_array().unwrap().len(), 10);
    assert_eq!(v["reduced"]["buses"].as_array().unwrap().len(), 20);
    assert_eq!(v["equivalents"].as_array().unwrap().len(), 4);
    assert_eq!(v["errors"].as_array().unwrap().len(), 9);
    assert!(reduce_grid_json("c7", 10, 1e3, true).is_err());
    assert!(reduce_grid_json("c1", 29, 1e3, true).is_err());
}
