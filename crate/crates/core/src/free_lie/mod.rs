//! Exact truncated free Lie algebras in the Lyndon basis and the truncated
//! Baker–Campbell–Hausdorff product.
//!
//! Everything here is exact: coefficients live in a [`Field`](crate::scalar::Field),
//! normally [`BigRational`](num_rational::BigRational). An algebra on `s`
//! generators truncated at `order` is a [`FreeLieAlgebra`]; elements carry an
//! `Arc` to it and silently drop terms above the truncation order.

mod algebra;
mod element;
mod lyndon;
mod tensor;
mod text;

pub use algebra::{BchCache, FreeLieAlgebra, MAX_ORDER};
pub use element::{FreeLieElement, Valuation};
pub use lyndon::{is_lyndon, lyndon_basis, witt_dimension, Bracketing, LyndonWord};
pub use tensor::TensorSeries;
pub use text::parse_element;

pub(crate) use tensor::ScaledIntegerSeries;

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;
    use std::sync::Arc;

    use crate::scalar::Field;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn alg(s: usize, order: usize) -> Arc<FreeLieAlgebra<Q>> {
        FreeLieAlgebra::new(s, order).unwrap()
    }

    fn gens(a: &Arc<FreeLieAlgebra<Q>>) -> Vec<FreeLieElement<Q>> {
        (0..a.generators()).map(|i| FreeLieElement::generator(a, i)).collect()
    }

    /// Dynkin's formula evaluated in the associative algebra: each right-nested
    /// bracket is expanded as a noncommutative polynomial. Shares no code with
    /// the Lie-side summation beyond the final projection.
    fn dynkin_oracle(a: &Arc<FreeLieAlgebra<Q>>, order: usize) -> FreeLieElement<Q> {
        let x = TensorSeries::<Q>::letter(2, a.order(), 0);
        let y = TensorSeries::<Q>::letter(2, a.order(), 1);
        let mut total = TensorSeries::<Q>::zero(2, a.order());
        let mut seqs = Vec::new();
        fn rec(budget: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
            for t in 1..=budget {
                for r in 0..=t {
                    cur.push((r, t - r));
                    out.push(cur.clone());
                    rec(budget - t, cur, out);
                    cur.pop();
                }
            }
        }
        rec(order, &mut Vec::new(), &mut seqs);
        let fact = |n: usize| -> i64 { (1..=n as i64).product() };
        for seq in seqs {
            let letters: Vec<&TensorSeries<Q>> = seq
                .iter()
                .flat_map(|&(r, s)| std::iter::repeat_n(&x, r).chain(std::iter::repeat_n(&y, s)))
                .collect();
            let mut acc = letters.last().unwrap().to_owned().clone();
            for l in letters[..letters.len() - 1].iter().rev() {
                acc = l.commutator(&acc);
            }
            let n = seq.len() as i64;
            let den: i64 =
                seq.iter().map(|&(r, s)| fact(r) * fact(s)).product::<i64>() * n * letters.len() as i64;
            let sign = if n % 2 == 1 { 1 } else { -1 };
            total.add_assign(&acc, &q(sign, den));
        }
        a.element_from_series(&total).unwrap()
    }

    #[test]
    fn generator_brackets() {
        let a = alg(3, 4);
        let g = gens(&a);
        assert!(g[0].bracket(&g[0]).unwrap().is_zero());
        let b = g[0].bracket(&g[1]).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.coefficient(&[0, 1]), q(1, 1));
        assert_eq!(g[1].bracket(&g[0]).unwrap(), b.neg());
    }

    #[test]
    fn jacobi_on_generators() {
        let a = alg(3, 4);
        let g = gens(&a);
        let cyc = |i: usize, j: usize, k: usize| {
            g[i].bracket(&g[j].bracket(&g[k]).unwrap()).unwrap()
        };
        let sum = cyc(0, 1, 2).add(&cyc(1, 2, 0)).add(&cyc(2, 0, 1));
        assert!(sum.is_zero());
    }

    #[test]
    fn jacobi_on_all_basis_triples() {
        let a = alg(2, 6);
        let n = a.dimension();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if a.degree(i) + a.degree(j) + a.degree(k) > a.order() {
                        continue;
                    }
                    let (x, y, z) = (
                        FreeLieElement::basis_element(&a, i),
                        FreeLieElement::basis_element(&a, j),
                        FreeLieElement::basis_element(&a, k),
                    );
                    let t1 = x.bracket(&y.bracket(&z).unwrap()).unwrap();
                    let t2 = y.bracket(&z.bracket(&x).unwrap()).unwrap();
                    let t3 = z.bracket(&x.bracket(&y).unwrap()).unwrap();
                    assert!(t1.add(&t2).add(&t3).is_zero(), "({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn structure_constants_reexpand_to_commutators() {
        let a = alg(3, 4);
        for i in 0..a.dimension() {
            for j in 0..a.dimension() {
                if a.degree(i) + a.degree(j) > a.order() {
                    continue;
                }
                let x = FreeLieElement::basis_element(&a, i);
                let y = FreeLieElement::basis_element(&a, j);
                let lie = x.bracket(&y).unwrap().to_series();
                let assoc = x.to_series().commutator(&y.to_series());
                assert_eq!(lie, assoc);
            }
        }
    }

    #[test]
    fn bch_order_two() {
        let a = alg(2, 5);
        let g = gens(&a);
        let z = g[0].bch(&g[1], 2).unwrap();
        let expected = g[0].add(&g[1]).add(&g[0].bracket(&g[1]).unwrap().scale(&q(1, 2)));
        assert_eq!(z, expected);
        assert_eq!(z.to_string(), "x1 + x2 + 1/2 [x1,x2]");
    }

    #[test]
    fn bch_order_three_matches_both_oracles() {
        let a = alg(2, 3);
        let g = gens(&a);
        let z = g[0].bch(&g[1], 3).unwrap();
        assert_eq!(z, dynkin_oracle(&a, 3));
        let via_exp = a
            .element_from_series(&g[0].to_series().exp().mul(&g[1].to_series().exp()).log())
            .unwrap();
        assert_eq!(z, via_exp);
        let cubic = z.homogeneous_part(3);
        let x = &g[0];
        let y = &g[1];
        let expected = x
            .bracket(&x.bracket(y).unwrap())
            .unwrap()
            .scale(&q(1, 12))
            .add(&y.bracket(&y.bracket(x).unwrap()).unwrap().scale(&q(1, 12)));
        assert_eq!(cubic, expected);
        assert_eq!(cubic.to_string(), "1/12 [x1,[x1,x2]] + 1/12 [[x1,x2],x2]");
    }

    #[test]
    fn bch_matches_exponential_route_at_order_six() {
        let a = alg(2, 6);
        let g = gens(&a);
        let z = g[0].bch(&g[1], 6).unwrap();
        let via_exp = a
            .element_from_series(&g[0].to_series().exp().mul(&g[1].to_series().exp()).log())
            .unwrap();
        assert_eq!(z, via_exp);
        // Known value: the degree-4 term is -1/24 [x2,[x1,[x1,x2]]].
        let x = &g[0];
        let y = &g[1];
        let expected4 = y
            .bracket(&x.bracket(&x.bracket(y).unwrap()).unwrap())
            .unwrap()
            .scale(&q(-1, 24));
        assert_eq!(z.homogeneous_part(4), expected4);
    }

    #[test]
    fn bch_identity_and_inverse() {
        let a = alg(2, 5);
        let g = gens(&a);
        let zero = FreeLieElement::zero(&a);
        assert_eq!(g[0].bch(&zero, 5).unwrap(), g[0]);
        assert_eq!(g[0].star_inverse(), g[0].neg());
        assert!(g[0].bch(&g[0].neg(), 5).unwrap().is_zero());
        let z = g[0].bch(&g[1], 4).unwrap();
        assert!(z.bch(&z.star_inverse(), 4).unwrap().is_zero());
    }

    #[test]
    fn bch_rejects_bad_orders_and_algebras() {
        let a = alg(2, 3);
        let b = alg(3, 3);
        let x = FreeLieElement::generator(&a, 0);
        let y = FreeLieElement::generator(&b, 0);
        assert!(x.bch(&x, 4).is_err());
        assert!(x.bch(&y, 2).is_err());
        assert!(x.bracket(&y).is_err());
    }

    #[test]
    fn valuations() {
        let a = alg(2, 4);
        let g = gens(&a);
        let e = g[0].add(&g[0].bracket(&g[1]).unwrap().scale(&q(1, 2)));
        assert_eq!(e.valuation(), Valuation::Degree(1));
        assert_eq!(FreeLieElement::zero(&a).valuation(), Valuation::Zero);
        let defect = g[0].bch(&g[1], 3).unwrap().sub(&g[0]).sub(&g[1]);
        assert_eq!(defect.valuation(), Valuation::Degree(2));
        assert_eq!(Valuation::Zero.to_string(), "zero");
        assert!(Valuation::Zero > Valuation::Degree(100));
    }

    #[test]
    fn scale_degrees_is_substitution() {
        let a = alg(2, 4);
        let g = gens(&a);
        let half = q(1, 2);
        let lhs = g[0].bch(&g[1], 4).unwrap().scale_degrees(&half);
        let rhs = g[0].scale(&half).bch(&g[1].scale(&half), 4).unwrap();
        assert_eq!(lhs, rhs);
    }

    fn arb_element(a: Arc<FreeLieAlgebra<Q>>, max_degree: usize) -> impl Strategy<Value = FreeLieElement<Q>> {
        let n = a.degree_range(max_degree).end;
        proptest::collection::vec((0..n, -6i64..=6, 1i64..=4), 1..6).prop_map(move |raw| {
            FreeLieElement::from_terms(&a, raw.into_iter().map(|(i, p, d)| (i, q(p, d))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn antisymmetry(
            (x, y) in (arb_element(alg(2, 5), 5), arb_element(alg(2, 5), 5))
        ) {
            let lhs = x.bracket(&y).unwrap();
            let rhs = y.bracket(&x).unwrap();
            prop_assert!(lhs.add(&rhs).is_zero());
        }

        #[test]
        fn bch_is_associative(
            (x, y, z) in (arb_element(alg(2, 5), 3), arb_element(alg(2, 5), 3), arb_element(alg(2, 5), 3)),
            order in 1usize..=5,
        ) {
            let left = x.bch(&y, order).unwrap().bch(&z, order).unwrap();
            let right = x.bch(&y.bch(&z, order).unwrap(), order).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn text_round_trip(x in arb_element(alg(3, 4), 4)) {
            let text = x.to_string();
            prop_assert_eq!(parse_element(x.algebra(), &text).unwrap(), x);
        }
    }
}
