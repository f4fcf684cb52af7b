//! Solves plain and cyclic tridiagonal systems.

use fdcons::solver::{solve_tridiagonal, solve_tridiagonal_cyclic};

fn main() {
    let n = 6;
    let sub = vec![-1.0; n];
    let diag = vec![4.0; n];
    let sup = vec![-1.0; n];
    let rhs: Vec<f64> = (0..n).map(|i| i as f64).collect();
    println!("plain  {:?}", solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap());
    println!("cyclic {:?}", solve_tridiagonal_cyclic(&sub, &diag, &sup, (-1.0, -1.0), &rhs).unwrap());
}
