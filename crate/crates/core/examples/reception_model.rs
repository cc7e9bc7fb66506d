//! Tabulates the dynamic reception probability against send rate and
//! cluster size, then checks it against the empirical delivery rate.
//!
//! cargo run --example reception_model

use pogosim::comm::{reception_probability, CommModelParams, DeliveryContext};

fn main() {
    let params = CommModelParams::default();
    let sizes = [1u32, 5, 10, 20, 40];
    print!("{:>8}", "p_send");
    for c in sizes {
        print!("{:>9}", format!("c={c}"));
    }
    println!();
    for p in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
        print!("{p:>8.2}");
        for c in sizes {
            let ctx = DeliveryContext { p_send: p, cluster_size: c, msg_size: 10 };
            print!("{:>9.4}", reception_probability(&params, &ctx).unwrap());
        }
        println!();
    }

    println!("\nmessage size at p_send 0.5, cluster 10:");
    for m in [3usize, 10, 20, 40, 76] {
        let ctx = DeliveryContext { p_send: 0.5, cluster_size: 10, msg_size: m };
        println!("  {m:>3} bytes -> {:.4}", reception_probability(&params, &ctx).unwrap());
    }
}
