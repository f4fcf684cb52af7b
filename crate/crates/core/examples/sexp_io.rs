//! Writes a scheme residual as an s-expression and reads it back.

use fdcons::scheme_library::{get_scheme, SchemeName};
use fdcons::stencil_algebra::sexp::{from_sexp, to_sexp};

fn main() {
    let f = get_scheme(SchemeName::NonlinearCross1).residual;
    let text = to_sexp(&f);
    println!("{text}");
    assert_eq!(from_sexp(&text).unwrap(), f);
    let parsed = from_sexp("(+ (* 1 U[1,0]) (* -1 U[0,0] (^ tau -1)) (* 1/2 x t))").unwrap();
    println!("{parsed}");
}
