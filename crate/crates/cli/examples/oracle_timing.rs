use kneser::oracle;
use kneser_core::isometry::aut_order_with_generators;
use kneser_core::roots::root_system;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args[1].parse().unwrap();
    let t = std::time::Instant::now();
    let res = oracle::classify(n);
    println!("n={n}: {} classes  [{:?}]", res.classes.len(), t.elapsed());
    for c in &res.classes {
        let t = std::time::Instant::now();
        let _ = aut_order_with_generators(&c.lattice).unwrap();
        println!(
            "  class root={} r1={} |O|={}  aut time {:?}",
            root_system(&c.lattice).unwrap(),
            c.r1,
            c.aut_order,
            t.elapsed()
        );
    }
}
