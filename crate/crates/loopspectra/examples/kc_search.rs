use loopspectra::cft::extrapolate_inv_l2;
use loopspectra::sweep::{find_kc, FreeEnergyEngine};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1.0 / 2.0_f64.sqrt());
    let w: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.0);
    let lmax: u32 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(10);
    let lmin: u32 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(7);
    let t = Instant::now();
    let mut eng = FreeEnergyEngine::new(n, w).unwrap();
    let sizes: Vec<u32> = (lmin..=lmax).collect();
    let res = find_kc(&mut eng, &sizes, 0.36, 0.46, 9, 1e-7, 1).unwrap();
    for p in &res.points {
        println!("L={}: Kc(L)={:.7}  c(L)={:.6}", p.l, p.kc, p.c);
    }
    let kc_series: Vec<(u32, f64)> = res.points.iter().map(|p| (p.l, p.kc)).collect();
    let c_series: Vec<(u32, f64)> = res.points.iter().map(|p| (p.l, p.c)).collect();
    for order in 1..=3 {
        if kc_series.len() > order {
            let kc = extrapolate_inv_l2(&kc_series, order).unwrap();
            let c = extrapolate_inv_l2(&c_series, order).unwrap();
            println!(
                "order {order}: Kc = {:.7} ± {:.1e}   c = {:.6} ± {:.1e}",
                kc.value,
                kc.error.unwrap_or(f64::NAN),
                c.value,
                c.error.unwrap_or(f64::NAN)
            );
        }
    }
    println!("total {:?}, {} eigen-solves", t.elapsed(), eng.evaluations);
}
