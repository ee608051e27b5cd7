use shintani::testfn::*;
use std::time::Instant;
fn main() {
    let t0 = Instant::now();
    let table = SliceTable::build(6, 160.0, 30.0, 340, 210);
    println!("table build {:?}", t0.elapsed());
    let f = TestFnMinus::new(6);
    for &(b, a) in &[(0.0f64, 0.0f64), (0.5, 0.0), (0.07, 0.9), (1.3, 2.2), (5.0, 0.33), (0.6, 7.7), (0.0, 12.0), (16.0, 0.2)] {
        let exact = f.fhat4(b, a);
        let interp = table.eval(b, a);
        println!("G({b},{a}): interp {interp:.6e} vs adaptive {exact:.6e}  diff {:.2e}", (interp - exact).abs());
    }
}
