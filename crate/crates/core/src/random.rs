//! Random states and Haar-random unitaries.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::state::{PartyStructure, StateVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniformly distributed pure state (normalized complex Gaussian vector).
pub fn random_state<R: Rng + ?Sized>(structure: &PartyStructure, rng: &mut R) -> StateVector {
    let amps = (0..structure.total_dim()).map(|_| gaussian(rng)).collect();
    StateVector::normalized(structure.clone(), amps).expect("gaussian vector is nonzero")
}

/// Tensor product of independent random pure states, one per party.
pub fn random_product_state<R: Rng + ?Sized>(
    structure: &PartyStructure,
    rng: &mut R,
) -> StateVector {
    let locals: Vec<StateVector> = structure
        .dims()
        .iter()
        .map(|&n| {
            let s = PartyStructure::new(vec![n]).expect("dim >= 2");
            random_state(&s, rng)
        })
        .collect();
    let mut state = locals[0].clone();
    for local in &locals[1..] {
        state = state.tensor(local);
    }
    state
        .with_labels(structure.labels().to_vec())
        .expect("same party count")
}

/// Haar-random `n×n` unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniform random phases in `[0, 2π)`.
pub fn random_phases<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..6 {
            let u = haar_unitary(n, &mut rng);
            let dev = (u.adjoint() * &u - DMatrix::identity(n, n)).norm();
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn product_states_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = PartyStructure::new(vec![2, 3, 2]).unwrap();
        let p = random_product_state(&s, &mut rng);
        assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(p.dims(), &[2, 3, 2]);
    }
}
