use punctlab::pathological::*;
use punctlab::oracles::ClockedFn;

fn main() {
    let cfg = PathConfig {
        schemes: vec![
            PathScheme::Const(0),
            PathScheme::Entry(0),
            PathScheme::EntryMod(0, 2),
            PathScheme::EntrySumPlus(3),
        ],
        opponents: vec![
            OpponentSpec::Copier { delay: 2 },
            OpponentSpec::SizeFaker { size: 40, delay: 1 },
            OpponentSpec::Sparse,
        ],
        g: ClockedFn {
            values: vec![7, 9, 11, 13, 7, 9, 11, 13],
            convergence: vec![1, 2, 3, 1, 2, 3, 1, 2],
        },
        horizon: 400,
        test_inputs: 6,
    };
    let out = build_pathological(&cfg).unwrap();
    println!("settled: {:?}, frontier {}", out.settled, out.frontier);
    println!("acted: {:?}, retired {:?}", out.acted, out.retired_sizes);
    let s0 = out.settled[0];
    for x in s0..=s0+6 {
        println!("d({x}) = {:?} defined={}", out.d.current(x), out.d.defined(x));
    }
    let reopens: Vec<String> = out.trace.iter().filter_map(|e| match e {
        TraceEvent::Reopen { t, at_index, stage } => Some(format!("reopen@{stage} idx{at_index} t{t}")),
        _ => None,
    }).collect();
    println!("reopens: {:?}", reopens);
    let settles: Vec<String> = out.trace.iter().filter_map(|e| match e {
        TraceEvent::Settle { e, marker, .. } => Some(format!("settle P{e}@{marker}")),
        _ => None,
    }).collect();
    println!("settles: {:?}", settles);
}
