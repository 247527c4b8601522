use loopspectra::cft::CeffMode;
use loopspectra::sweep::FreeEnergyEngine;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let w: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let l: u32 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(9);
    let mut eng = FreeEnergyEngine::new(n, w).unwrap();
    for i in 0..13 {
        let k = 0.36 + 0.01 * i as f64;
        let c = eng.ceff(l, k, CeffMode::ThreePoint).unwrap();
        let c2 = eng.ceff(l, k, CeffMode::TwoPoint).unwrap();
        println!("K={k:.3}  c3pt={c:+.6}  c2pt={c2:+.6}");
    }
}
