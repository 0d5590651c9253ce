//! Grid convergence of the transformed elliptic solver against a
//! manufactured potential over a deflected plate.

use memsdyn::potential::ManufacturedCase;

fn main() -> memsdyn::Result<()> {
    for eps in [0.0, 0.3, 1.0] {
        let case = ManufacturedCase {
            eps,
            ..Default::default()
        };
        let (errs, orders) = case.convergence(15, 4, 1e-10)?;
        println!("eps = {eps}");
        let mut n = 15;
        for (i, e) in errs.iter().enumerate() {
            let order = if i == 0 { String::new() } else { format!("{:.3}", orders[i - 1]) };
            println!("  {n:>4}x{n:<4} max error {e:.4e}  order {order}");
            n = 2 * n + 1;
        }
    }
    Ok(())
}
