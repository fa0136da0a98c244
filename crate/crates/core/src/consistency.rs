//! Consistency around the cube: the equation imposed on every face of a
//! 3D cube with direction-dependent parameters must determine the eighth
//! corner uniquely.

use crate::error::Error;
use crate::lattice::{
    quad_residual, solve_corner, solve_corner_cases, Corner, CornerSolve, Picture, QuadParams,
};
use crate::numerics::Scalar;
use crate::Result;

/// Initial data on a cube: the base corner, its three edge-adjacent
/// values, and one lattice parameter per direction.
#[derive(Clone, Debug)]
pub struct CubeData {
    pub x: Scalar,
    pub x1: Scalar,
    pub x2: Scalar,
    pub x3: Scalar,
    pub alphas: [Scalar; 3],
}

/// What a cube check produced: the three face values, the three
/// candidate eighth corners, and whether they agree exactly.
#[derive(Clone, Debug)]
pub struct CacOutcome {
    pub x12: Scalar,
    pub x13: Scalar,
    pub x23: Scalar,
    pub candidates: [Scalar; 3],
    pub agree: bool,
}

fn face_params(ai: &Scalar, aj: &Scalar) -> QuadParams {
    QuadParams::new(ai.clone(), aj.clone()).expect("cube parameters nonzero")
}

fn face_solve(
    ai: &Scalar,
    aj: &Scalar,
    base: &Scalar,
    along_i: &Scalar,
    along_j: &Scalar,
    face: &'static str,
) -> Result<Scalar> {
    let params = face_params(ai, aj);
    let plaq = [base.clone(), along_i.clone(), along_j.clone(), base.zero_like()];
    solve_corner(&params, Picture::X, &plaq, Corner::ShiftNM, (0, 0)).map_err(|e| match e {
        Error::SingularCorner { .. } => Error::SingularFace { face },
        other => other,
    })
}

/// Solves the three bottom faces for `x12`, `x13`, `x23`, then the three
/// top faces for `x123` independently. For a consistent equation the
/// three candidates agree exactly.
///
/// A top face whose residual vanishes identically in `x123` constrains
/// nothing; such a face is consistent with any value and inherits the
/// common candidate of the determined faces (or the constant
/// continuation when all three degenerate, as on a constant cube).
pub fn cac_check(data: &CubeData) -> Result<CacOutcome> {
    if data.alphas.iter().any(Scalar::is_zero) {
        return Err(Error::InvalidParameters { what: "cube parameters must be nonzero" });
    }
    let [a1, a2, a3] = &data.alphas;
    let x12 = face_solve(a1, a2, &data.x, &data.x1, &data.x2, "12")?;
    let x13 = face_solve(a1, a3, &data.x, &data.x1, &data.x3, "13")?;
    let x23 = face_solve(a2, a3, &data.x, &data.x2, &data.x3, "23")?;
    // top faces: shift the (j,k) face one step along direction i
    let tops: [(CornerSolve, &'static str); 3] = [
        (face_cases(a2, a3, &data.x1, &x12, &x13), "23 shifted along 1"),
        (face_cases(a1, a3, &data.x2, &x12, &x23), "13 shifted along 2"),
        (face_cases(a1, a2, &data.x3, &x13, &x23), "12 shifted along 3"),
    ];
    let mut determined: Option<Scalar> = None;
    let mut agree = true;
    for (solve, _) in &tops {
        if let CornerSolve::Unique(v) = solve {
            match &determined {
                None => determined = Some(v.clone()),
                Some(d) if d == v => {}
                Some(_) => agree = false,
            }
        }
    }
    let fallback = match &determined {
        Some(v) => v.clone(),
        // all three faces degenerate: continue the constant cube
        None => face_solve(a2, a3, &data.x1, &x12, &x13, "23 shifted along 1")?,
    };
    let mut candidates: [Scalar; 3] =
        [fallback.clone(), fallback.clone(), fallback.clone()];
    for (i, (solve, face)) in tops.iter().enumerate() {
        match solve {
            CornerSolve::Unique(v) => candidates[i] = v.clone(),
            CornerSolve::AnyValue => {}
            CornerSolve::NoSolution => return Err(Error::SingularFace { face }),
        }
    }
    Ok(CacOutcome { x12, x13, x23, candidates, agree })
}

fn face_cases(
    ai: &Scalar,
    aj: &Scalar,
    base: &Scalar,
    along_i: &Scalar,
    along_j: &Scalar,
) -> CornerSolve {
    let params = face_params(ai, aj);
    let plaq = [base.clone(), along_i.clone(), along_j.clone(), base.zero_like()];
    solve_corner_cases(&params, Picture::X, &plaq, Corner::ShiftNM)
}

/// Residual of one face equation, for diagnostics.
pub fn face_residual(ai: &Scalar, aj: &Scalar, plaq: &[Scalar; 4]) -> Scalar {
    quad_residual(&face_params(ai, aj), Picture::X, plaq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::sampling;

    fn int(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn random_cube(rng: &mut ChaCha8Rng) -> CubeData {
        loop {
            let a1 = sampling::nonzero_rational(rng, 9, 5);
            let a2 = sampling::nonzero_rational(rng, 9, 5);
            let a3 = sampling::nonzero_rational(rng, 9, 5);
            if a1 == a2 || a2 == a3 || a1 == a3 {
                continue;
            }
            return CubeData {
                x: sampling::rational_scalar(rng, 20, 9),
                x1: sampling::rational_scalar(rng, 20, 9),
                x2: sampling::rational_scalar(rng, 20, 9),
                x3: sampling::rational_scalar(rng, 20, 9),
                alphas: [Scalar::Rational(a1), Scalar::Rational(a2), Scalar::Rational(a3)],
            };
        }
    }

    #[test]
    fn three_way_agreement_on_random_cubes() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 100 {
            let cube = random_cube(&mut rng);
            match cac_check(&cube) {
                Ok(out) => {
                    assert!(out.agree, "candidates diverged: {:?}", out.candidates);
                    checked += 1;
                }
                Err(Error::SingularFace { .. }) => {}
                Err(e) => panic!("unexpected: {e}"),
            }
        }
    }

    #[test]
    fn constant_cube_is_fixed() {
        let c = Scalar::rational(5, 3);
        let cube = CubeData {
            x: c.clone(),
            x1: c.clone(),
            x2: c.clone(),
            x3: c.clone(),
            alphas: [int(2), int(3), int(5)],
        };
        let out = cac_check(&cube).unwrap();
        assert_eq!(out.x12, c);
        assert_eq!(out.x13, c);
        assert_eq!(out.x23, c);
        assert!(out.agree);
        assert_eq!(out.candidates[0], c);
    }

    #[test]
    fn singular_face_is_named() {
        // equal parameters with x1 = x2 make the (1,2) face singular
        let cube = CubeData {
            x: int(0),
            x1: int(1),
            x2: int(1),
            x3: int(2),
            alphas: [int(3), int(3), int(5)],
        };
        let err = cac_check(&cube).unwrap_err();
        assert_eq!(err, Error::SingularFace { face: "12" });
    }

    #[test]
    fn direction_relabeling_leaves_corner_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..25 {
            let cube = random_cube(&mut rng);
            let swapped = CubeData {
                x: cube.x.clone(),
                x1: cube.x2.clone(),
                x2: cube.x1.clone(),
                x3: cube.x3.clone(),
                alphas: [cube.alphas[1].clone(), cube.alphas[0].clone(), cube.alphas[2].clone()],
            };
            match (cac_check(&cube), cac_check(&swapped)) {
                (Ok(a), Ok(b)) => assert_eq!(a.candidates[0], b.candidates[0]),
                (Err(Error::SingularFace { .. }), _) | (_, Err(Error::SingularFace { .. })) => {}
                (Err(e), _) | (_, Err(e)) => panic!("unexpected: {e}"),
            }
        }
    }
}
