//! Maximum-weight bipartite matching, checked against exhaustive search.
//!
//!     cargo run -p memtrack --example assignment

use memtrack::assignment::{solve_assignment, WeightMatrix};
use memtrack::synth::brute_force_assignment;

fn main() -> memtrack::Result<()> {
    let square = WeightMatrix::from_rows(&[
        vec![0.9, 0.1, 0.2],
        vec![0.2, 0.8, 0.4],
        vec![0.3, 0.6, 0.7],
    ])?;
    let pairs = solve_assignment(&square)?;
    let (best, _) = brute_force_assignment(&square)?;
    println!(
        "pairs {pairs:?}, total {:.2}, exhaustive optimum {best:.2}",
        square.total(&pairs)
    );

    // more columns than rows: every row is matched, one column is left over
    let wide = WeightMatrix::from_rows(&[vec![0.1, 0.9, 0.5], vec![0.8, 0.7, 0.2]])?;
    println!("wide pairs {:?}", solve_assignment(&wide)?);

    // more rows than columns: padded rows never appear in the answer
    let tall = WeightMatrix::from_rows(&[vec![0.3], vec![0.9], vec![0.5]])?;
    println!("tall pairs {:?}", solve_assignment(&tall)?);
    Ok(())
}
