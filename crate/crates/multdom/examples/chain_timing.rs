//! Times the main analysis stages on a mid-sized random channel.
//!
//! Run with `cargo run --release -p multdom --example chain_timing [d] [k]`.

use std::time::Instant;

use multdom::builders::random_unitary_mixture;
use multdom::domain::{mult_chain, mult_domain, stabilizing_algebra};
use multdom::linalg::{eigenvalues, Tolerance};

fn main() {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let t = Tolerance::default();
    let ch = random_unitary_mixture::<f64>(d, k, 1, &t);

    let mark = Instant::now();
    let s = ch.superop();
    println!("superoperator ({0}×{0}): {1:?}", d * d, mark.elapsed());

    let mark = Instant::now();
    let vals = eigenvalues(s.matrix()).unwrap();
    println!("eigenvalues ({}): {:?}", vals.len(), mark.elapsed());

    let mark = Instant::now();
    let m = mult_domain(&ch, &t).unwrap();
    println!("mult_domain (dim {}): {:?}", m.dimension(), mark.elapsed());

    let mark = Instant::now();
    let chain = mult_chain(&ch, None, &t).unwrap();
    println!("mult_chain (kappa {}): {:?}", chain.kappa, mark.elapsed());

    let mark = Instant::now();
    let stab = stabilizing_algebra(&ch, &t).unwrap();
    println!("stabilizing (dim {}): {:?}", stab.dimension(), mark.elapsed());
}
