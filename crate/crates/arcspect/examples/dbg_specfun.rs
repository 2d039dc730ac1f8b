fn main() {
    use arcspect::specfun::*;
    use arcspect::Complex64;
    // reference: J0(1)=0.7651976865579666, Y0(1)=0.08825696421567696
    for (m, re, im) in [(0u32, 1.0, 0.0), (1, 1.0, 0.0), (0, 11.9, 0.0), (0, 12.1, 0.0), (5, 4.2, 1.7), (5, 4.2, -1.7), (3, 30.0, 2.0)] {
        let z = Complex64::new(re, im);
        let j = cyl_bessel(BesselKind::J, m, z).unwrap();
        let y = cyl_bessel(BesselKind::Y, m, z).unwrap();
        println!("m={m} z={re}+{im}i  J={:+.15e} {:+.15e}  Y={:+.15e} {:+.15e}", j.re, j.im, y.re, y.im);
    }
    // conjugation test case
    let z = Complex64::new(4.2, 1.7);
    for m in [0u32, 1, 5, 11] {
        let a = cyl_bessel(BesselKind::J, m, z.conj()).unwrap();
        let b = cyl_bessel(BesselKind::J, m, z).unwrap().conj();
        println!("m={m}: J(conj z)={:+.6e}{:+.6e}i conj(J(z))={:+.6e}{:+.6e}i diff={:.3e}", a.re, a.im, b.re, b.im, (a-b).norm());
    }
    // zeros
    for idx in 1..=6 {
        match bessel_j_zero(4, idx) {
            Ok(z) => {
                let v = cyl_bessel(BesselKind::J, 4, Complex64::new(z, 0.0)).unwrap();
                println!("j_4,{idx} = {z:.12}  J_4 = {:.3e}", v.re);
            }
            Err(e) => println!("j_4,{idx} FAILED: {e}"),
        }
    }
}
