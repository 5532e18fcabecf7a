use super::{Cell, CellKind, Resolution, ResolveError};
use crate::amodule::atilde_quotient;
use crate::f2::BitVec;
use crate::milnor::{MilnorIndex, Profile};

/// The 2-periodic resolution of Ã(1) over A(1): stage `n` is free on
/// `x_n` in `(2n, n)` and `y_n` in `(2n + 2, n)` with
///
/// `d x_n = Sq² x_{n-1} + τ y_{n-1}`, `d y_n = Sq³Sq¹ x_{n-1} + Sq² y_{n-1}`,
///
/// and `x_0 ↦ a`, `y_0 ↦ b`. Built directly, not by kernel search, so that
/// [`Resolution::verify`] is an independent check.
pub fn periodic_a1_resolution(n_max: usize) -> Result<Resolution, ResolveError> {
    let max_t = 2 * n_max as i32 + 8;
    let q = atilde_quotient(Profile::A1, max_t)?;
    let pres = q.presentation.clone();
    let a = pres.index_of("a").expect("generator a");
    let b = pres.index_of("b").expect("generator b");
    let mut r = Resolution::new(pres, Profile::A1, false)?;
    let m = r.target.clone();
    let unit_in = |deg: i32, g: usize| BitVec::unit(m.dim(deg), m.position(g));

    let alg = r.algebra.clone();
    let id = |s: &[u32]| alg.id(&MilnorIndex::new(s.to_vec())).expect("in A(1)");
    let (sq1, sq2, sq3) = (id(&[1]), id(&[2]), id(&[3]));

    r.stages = vec![vec![
        Cell { deg: 0, wt: 0, kind: CellKind::A, d: unit_in(0, a), d_b: None },
        Cell { deg: 2, wt: 0, kind: CellKind::A, d: unit_in(2, b), d_b: None },
    ]];
    r.slices = vec![Vec::new()];
    r.kernel_gens = vec![Vec::new()];
    let rebuild = |r: &mut Resolution, f: usize| {
        for t in r.lo..=max_t {
            let s = r.build_slice(f, t);
            r.set_slice(f, t, s);
        }
    };
    rebuild(&mut r, 0);
    for n in 1..=n_max {
        let f = n - 1;
        let (x, y) = (0usize, 1usize);
        let dx_deg = 2 * n as i32;
        let s_lo = r.slice(f, dx_deg - 2);
        let s_y = r.slice(f, dx_deg);
        let x_prev = BitVec::unit(s_lo.len(), s_lo.index(x, 0));
        let y_prev = BitVec::unit(s_y.len(), s_y.index(y, 0));
        let mut dx = r.act(f as isize, sq2, dx_deg - 2, &x_prev);
        dx.xor_assign(&y_prev);
        let mut dy = BitVec::zeros(r.dim(f as isize, dx_deg + 2));
        for &p in alg.product(sq3, sq1).iter() {
            dy.xor_assign(&r.act(f as isize, p, dx_deg - 2, &x_prev));
        }
        dy.xor_assign(&r.act(f as isize, sq2, dx_deg, &y_prev));
        r.stages.push(vec![
            Cell { deg: dx_deg, wt: n as i32, kind: CellKind::A, d: dx, d_b: None },
            Cell { deg: dx_deg + 2, wt: n as i32, kind: CellKind::A, d: dy, d_b: None },
        ]);
        r.slices.push(Vec::new());
        r.kernel_gens.push(Vec::new());
        rebuild(&mut r, n);
    }
    r.done = Some((max_t, n_max));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_is_exact() {
        let r = periodic_a1_resolution(5).unwrap();
        let rep = r.verify();
        assert!(rep.all_ok(), "{:?}", rep.failures());
        assert_eq!(r.generator_table(3), vec![(6, 3, CellKind::A), (8, 3, CellKind::A)]);
    }
}
