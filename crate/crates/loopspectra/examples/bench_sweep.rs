//! Scratch benchmark: compile + power-iterate the dilute Brauer row.
use loopspectra::sweep::FreeEnergyEngine;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let l_max: u32 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(10);
    let w: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let n = 1.0 / 2.0_f64.sqrt();
    let mut eng = FreeEnergyEngine::new(n, w).unwrap();
    for l in (l_max - 2)..=l_max {
        let t = Instant::now();
        let f = eng.free_energy(l, 0.40).unwrap();
        println!("L={l}: f={f:.10}  first-call {:?}", t.elapsed());
        let t = Instant::now();
        let f2 = eng.free_energy(l, 0.401).unwrap();
        println!("L={l}: f={f2:.10}  warm-call {:?}", t.elapsed());
    }
    // a c_eff evaluation and peak timing estimate
    let t = Instant::now();
    let c = eng.ceff(l_max, 0.406, loopspectra::cft::CeffMode::ThreePoint).unwrap();
    println!("ceff(L={l_max}, K=0.406) = {c:.6}, took {:?} ({} evals total)", t.elapsed(), eng.evaluations);
}
