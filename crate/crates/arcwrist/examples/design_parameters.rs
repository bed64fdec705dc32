//! Solve the link design equations for a few candidate geometries.

use arcwrist::solve_link_parameters;

fn main() {
    let candidates = [
        ("prototype", 27.35, 30.0, 27.35, 25.0),
        ("taller", 27.35, 30.0, 32.0, 25.0),
        ("compact", 20.0, 25.0, 20.0, 18.0),
    ];

    println!(
        "{:<10} {:>7} {:>7} {:>7} {:>7}   {:>9} {:>8} {:>8}",
        "name", "r1", "r2", "h", "rl", "theta0", "l1", "l2"
    );
    for (name, r1, r2, h, rl) in candidates {
        match solve_link_parameters(r1, r2, h, rl) {
            Ok(p) => println!(
                "{:<10} {:>7.2} {:>7.2} {:>7.2} {:>7.2}   {:>9.6} {:>8.4} {:>8.4}",
                name,
                p.r1(),
                p.r2(),
                p.h(),
                p.rl(),
                p.theta0(),
                p.l1(),
                p.l2()
            ),
            Err(e) => println!("{:<10} rejected: {}", name, e),
        }
    }

    // A linkage radius larger than r2 has no positive straight extension.
    match solve_link_parameters(27.35, 30.0, 27.35, 31.0) {
        Ok(_) => unreachable!(),
        Err(e) => println!("\noversized rl: {}", e),
    }
}
