use punctlab::encode_d3::build_d3;
use punctlab::oracles::{Approx3, ApproxRow};

fn main() {
    let g3 = Approx3::new(
        vec![
            vec![ApproxRow::constant(4), ApproxRow { initial: 4, changes: vec![(3, 5)] }, ApproxRow::constant(5), ApproxRow::constant(5), ApproxRow::constant(5)],
            vec![ApproxRow::constant(7), ApproxRow { initial: 7, changes: vec![(2, 6)] }, ApproxRow { initial: 6, changes: vec![(5, 7)] }, ApproxRow::constant(7), ApproxRow::constant(7)],
        ],
        vec![1, 2],
    ).unwrap();
    let t0 = std::time::Instant::now();
    let out = build_d3(&g3, &[(3, 2), (5, 9)], 2000, false).unwrap();
    println!("horizon 2000 streamed: {:?}, A pass={} B pass={}", t0.elapsed(), out.report_a.passes(), out.report_b.passes());
    let t1 = std::time::Instant::now();
    let out2 = build_d3(&g3, &[], 500, true).unwrap();
    println!("horizon 500 full: {:?}, elements A={} B={}", t1.elapsed(), out2.labels_a.len(), out2.labels_b.len());
}
