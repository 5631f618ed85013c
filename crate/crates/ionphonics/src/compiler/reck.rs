//! Triangular decomposition of passive (orthogonal-symplectic) operations
//! into two-mode rotations and single-mode phases.

use nalgebra::Complex;

use crate::error::Result;
use crate::gaussian::SymplecticMatrix;

use super::euler::{to_unitary, CMatrix};

/// Passive primitive acting on ladder operators.
///
/// `Phase { mode, phi }` maps a_mode -> e^{-i phi} a_mode (a phase-space
/// rotation by phi). `Rotation { a, b, theta, phase }` is the two-mode Givens
/// block [[cos t, sin t e^{-i phase}], [-sin t e^{i phase}, cos t]] on (a, b);
/// `phase = 0` is the plain real rotation that mixes x with x and p with p.
#[derive(Debug, Clone, PartialEq)]
pub enum Passive {
    Rotation { a: usize, b: usize, theta: f64, phase: f64 },
    Phase { mode: usize, phi: f64 },
}

impl Passive {
    pub fn unitary(&self, n: usize) -> CMatrix {
        let mut u = CMatrix::identity(n, n);
        match *self {
            Passive::Phase { mode, phi } => {
                u[(mode, mode)] = Complex::from_polar(1.0, -phi);
            }
            Passive::Rotation { a, b, theta, phase } => {
                let (s, c) = theta.sin_cos();
                u[(a, a)] = Complex::new(c, 0.0);
                u[(b, b)] = Complex::new(c, 0.0);
                u[(a, b)] = Complex::from_polar(s, -phase);
                u[(b, a)] = -Complex::from_polar(s, phase);
            }
        }
        u
    }
}

/// Recompose a primitive program (listed in application order) into the
/// unitary it implements.
pub fn recompose_unitary(n: usize, program: &[Passive]) -> CMatrix {
    let mut u = CMatrix::identity(n, n);
    for p in program {
        u = p.unitary(n) * u;
    }
    u
}

/// Decompose a passive symplectic into at most n(n-1)/2 rotations and n
/// phases, returned in application order.
pub fn reck_decompose(o: &SymplecticMatrix) -> Result<Vec<Passive>> {
    let mut u = to_unitary(o)?;
    let n = u.nrows();
    let mut givens: Vec<(usize, usize, f64, f64)> = Vec::new();

    for c in 0..n {
        for r in (c + 1)..n {
            let x = u[(r, c)];
            if x.norm() < 1e-13 {
                continue;
            }
            let p = u[(c, c)];
            let theta = x.norm().atan2(p.norm());
            let phase = if p.norm() < 1e-300 { x.arg() } else { x.arg() - p.arg() };
            // left-multiply by T(c, r, theta, phase): zeroes u[(r, c)]
            let (s, co) = theta.sin_cos();
            let e_m = Complex::from_polar(1.0, -phase);
            let e_p = Complex::from_polar(1.0, phase);
            for col in 0..n {
                let uc = u[(c, col)];
                let ur = u[(r, col)];
                u[(c, col)] = uc * co + ur * s * e_m;
                u[(r, col)] = -uc * s * e_p + ur * co;
            }
            givens.push((c, r, theta, phase));
        }
    }

    // u is now diagonal (unitary upper triangular); read off the phases
    let mut program: Vec<Passive> = Vec::new();
    for k in 0..n {
        let phi = -u[(k, k)].arg();
        if phi.abs() > 1e-12 {
            program.push(Passive::Phase { mode: k, phi });
        }
    }
    // U = T_1^† ... T_m^† D: after D, the adjoints apply in reverse order;
    // T(θ, φ)^† = T(-θ, φ) = T(θ, φ + pi)
    for &(a, b, theta, phase) in givens.iter().rev() {
        if theta.abs() > 1e-12 {
            program.push(Passive::Rotation {
                a,
                b,
                theta,
                phase: normalize_angle(phase + std::f64::consts::PI),
            });
        }
    }
    Ok(program)
}

pub fn normalize_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a % two_pi;
    if x > std::f64::consts::PI {
        x -= two_pi;
    } else if x <= -std::f64::consts::PI {
        x += two_pi;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::euler::{euler_decompose, from_unitary};
    use crate::gaussian::propagator;
    use nalgebra::DMatrix;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_passive(n: usize, rng: &mut StdRng) -> SymplecticMatrix {
        let m = DMatrix::from_fn(2 * n, 2 * n, |_, _| rng.gen_range(-0.5..0.5));
        let h = (&m + m.transpose()) * 0.5;
        let s = propagator(&h, 1.0).unwrap();
        let (o1, _, _) = euler_decompose(&s).unwrap();
        o1
    }

    #[test]
    fn identity_gives_an_empty_program() {
        let id = SymplecticMatrix::identity(4);
        assert!(reck_decompose(&id).unwrap().is_empty());
    }

    #[test]
    fn a_pure_rotation_decomposes_into_itself() {
        let theta = 0.6f64;
        let prim = Passive::Rotation { a: 0, b: 1, theta, phase: 0.0 };
        let o = from_unitary(&prim.unitary(2));
        let program = reck_decompose(&o).unwrap();
        assert_eq!(program.len(), 1);
        match &program[0] {
            Passive::Rotation { a, b, theta: t, phase } => {
                assert_eq!((*a, *b), (0, 1));
                assert!((t - theta).abs() < 1e-12);
                assert!(normalize_angle(*phase).abs() < 1e-12);
            }
            other => panic!("expected a rotation, got {other:?}"),
        }
    }

    #[test]
    fn random_passives_roundtrip_below_1e9() {
        let mut rng = StdRng::seed_from_u64(4242);
        for n in 2..=4 {
            for _ in 0..8 {
                let o = random_passive(n, &mut rng);
                let program = reck_decompose(&o).unwrap();
                let rot_count =
                    program.iter().filter(|p| matches!(p, Passive::Rotation { .. })).count();
                let phase_count =
                    program.iter().filter(|p| matches!(p, Passive::Phase { .. })).count();
                assert!(rot_count <= n * (n - 1) / 2);
                assert!(phase_count <= n);
                let u = recompose_unitary(n, &program);
                let back = from_unitary(&u);
                let err = (back.matrix() - o.matrix()).norm();
                assert!(err < 1e-9, "n={n}: roundtrip error {err:.2e}");
            }
        }
    }

    #[test]
    fn composed_programs_are_recovered_up_to_matrix_equality() {
        let program = vec![
            Passive::Phase { mode: 2, phi: 1.1 },
            Passive::Rotation { a: 0, b: 2, theta: 0.4, phase: 0.3 },
            Passive::Rotation { a: 1, b: 2, theta: 1.2, phase: -0.8 },
        ];
        let u = recompose_unitary(3, &program);
        let o = from_unitary(&u);
        let again = reck_decompose(&o).unwrap();
        let u2 = recompose_unitary(3, &again);
        assert!((u2 - u).norm() < 1e-10);
    }
}
