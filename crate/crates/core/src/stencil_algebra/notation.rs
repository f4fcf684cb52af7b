//! Index-free names for stencil quantities around the center `U = U[0,0]`.
//!
//! `hat`/`check` move one time level up/down, `plus`/`minus` one node
//! right/left. These helpers act on small fixed expressions that always fit
//! the default window, so they panic instead of returning errors.

use super::ops::{diff_op, shift, Dir};
use super::poly::DiffPoly;

pub fn u(k: i32, l: i32) -> DiffPoly {
    DiffPoly::grid(k, l)
}

pub fn center() -> DiffPoly {
    u(0, 0)
}

fn moved(p: &DiffPoly, dk: i32, dl: i32) -> DiffPoly {
    shift(p, dk, dl).expect("notation helpers stay inside the default window")
}

pub fn hat(p: &DiffPoly) -> DiffPoly {
    moved(p, 1, 0)
}

pub fn check(p: &DiffPoly) -> DiffPoly {
    moved(p, -1, 0)
}

pub fn plus(p: &DiffPoly) -> DiffPoly {
    moved(p, 0, 1)
}

pub fn minus(p: &DiffPoly) -> DiffPoly {
    moved(p, 0, -1)
}

fn d(p: &DiffPoly, dir: Dir) -> DiffPoly {
    diff_op(p, dir).expect("notation helpers stay inside the default window")
}

/// `D+h`
pub fn dxp(p: &DiffPoly) -> DiffPoly {
    d(p, Dir::PlusH)
}

/// `D-h`
pub fn dxm(p: &DiffPoly) -> DiffPoly {
    d(p, Dir::MinusH)
}

/// `D+tau`
pub fn dtp(p: &DiffPoly) -> DiffPoly {
    d(p, Dir::PlusTau)
}

/// `D-tau`
pub fn dtm(p: &DiffPoly) -> DiffPoly {
    d(p, Dir::MinusTau)
}

/// `U_x = (U_+ - U)/h`
pub fn ux() -> DiffPoly {
    dxp(&center())
}

/// `U_xbar = (U - U_-)/h`
pub fn ux_bar() -> DiffPoly {
    dxm(&center())
}

/// `U_t = (Uhat - U)/tau`
pub fn ut() -> DiffPoly {
    dtp(&center())
}

/// `Ucheck_t = (U - Ucheck)/tau`
pub fn ut_check() -> DiffPoly {
    dtm(&center())
}

/// `U_{x xbar}`, the central second difference in space.
pub fn uxx() -> DiffPoly {
    dxp(&ux_bar())
}

/// `U_{t tcheck}`, the central second difference in time.
pub fn utt() -> DiffPoly {
    dtp(&ut_check())
}

/// `t + tau`
pub fn t_hat() -> DiffPoly {
    hat(&DiffPoly::t())
}

/// `x + h`
pub fn x_plus() -> DiffPoly {
    plus(&DiffPoly::x())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_differences_match_expanded_forms() {
        let expect_t = (&(&u(1, 0) - &u(0, 0).scale_int(2)) + &u(-1, 0)).mul_steps(0, -2);
        assert_eq!(utt(), expect_t);
        let expect_x = (&(&u(0, 1) - &u(0, 0).scale_int(2)) + &u(0, -1)).mul_steps(-2, 0);
        assert_eq!(uxx(), expect_x);
    }

    #[test]
    fn shifted_differences() {
        // Ucheck_t^+ = (U_+ - Ucheck_+)/tau
        let lhs = plus(&ut_check());
        let rhs = (&u(0, 1) - &u(-1, 1)).mul_steps(0, -1);
        assert_eq!(lhs, rhs);
        assert_eq!(hat(&ux()), (&u(1, 1) - &u(1, 0)).mul_steps(-1, 0));
    }
}
