//! Prints the observed values behind the frozen regression constants.

use fareycount::arith::SieveTable;
use fareycount::counting::{check_count_bound, BOUND_SEED};
use fareycount::expsum::{moment_over_primes, ColumnDomain};
use fareycount::RunOptions;
fn main() {
    let t = SieveTable::new(800).unwrap();
    for n in [2u32, 3] {
        for h in [100u64, 200, 400, 800] {
            let m = t.totient_moment(h, n - 1).unwrap();
            println!("totient n={n} h={h} ratio={}", m as f64 / (h as f64).powi(n as i32));
        }
    }
    let o = RunOptions::default().with_workers(8);
    for n in [1u32, 2] {
        for q in [500u64, 1000, 2000, 4000] {
            let u = (q as f64).sqrt() as u64;
            let d = ColumnDomain::rectangle(u, u).unwrap();
            let m = moment_over_primes(1, q, n, &d, &o).unwrap();
            println!("moment n={n} q={q} ratio={}", m.ratio);
        }
    }
    let r = check_count_bound(2, 200, 40, BOUND_SEED, &o).unwrap();
    println!("bound max={}", r.max_ratio);
}
