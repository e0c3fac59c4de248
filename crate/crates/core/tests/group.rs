use grouprg::group::{
    self, all_subgroups, build_group, catalog_group, classify_p_group, direct_product, index_p_normal_subgroup,
    is_dedekind_literal_form, is_dedekind_structural, is_normal, FiniteGroup, GroupError,
};
use proptest::prelude::*;

fn z(m: usize) -> FiniteGroup {
    catalog_group(&format!("Z{m}")).unwrap()
}

/// Brute-force isomorphism search for tiny groups.
fn isomorphic(g: &FiniteGroup, h: &FiniteGroup) -> bool {
    if g.order() != h.order() {
        return false;
    }
    let n = g.order();
    let mut perm: Vec<usize> = (0..n).collect();
    fn rec(k: usize, perm: &mut Vec<usize>, g: &FiniteGroup, h: &FiniteGroup) -> bool {
        let n = perm.len();
        if k == n {
            return (0..n).all(|a| (0..n).all(|b| perm[g.mul(a, b)] == h.mul(perm[a], perm[b])));
        }
        for i in k..n {
            perm.swap(k, i);
            if rec(k + 1, perm, g, h) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    rec(0, &mut perm, g, h)
}

#[test]
fn trivial_and_cyclic_tables() {
    let t = build_group(&[vec![0]]).unwrap();
    assert_eq!(t.order(), 1);
    assert_eq!(t.identity(), 0);
    let z3 = build_group(&[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
    assert_eq!(z3.order(), 3);
    assert_eq!(z3.identity(), 0);
}

#[test]
fn out_of_range_cell_is_rejected() {
    let mut rows = z(4).table_rows();
    rows[3][3] = 7;
    assert!(matches!(build_group(&rows), Err(GroupError::NotClosed { row: 3, col: 3, value: 7 })));
}

#[test]
fn single_cell_perturbations_of_z4() {
    let base = z(4).table_rows();
    let mut named_triples = 0;
    for r in 0..4 {
        for c in 0..4 {
            for v in 0..4 {
                if base[r][c] == v {
                    continue;
                }
                let mut rows = base.clone();
                rows[r][c] = v;
                let m = |x: usize, y: usize| rows[x][y];
                let brute = (0..4).any(|a| (0..4).any(|b| (0..4).any(|c| m(m(a, b), c) != m(a, m(b, c)))));
                match build_group(&rows) {
                    Ok(_) => panic!("perturbed table accepted"),
                    Err(GroupError::NotAssociative { a, b, c }) => {
                        assert!(brute);
                        assert_ne!(m(m(a, b), c), m(a, m(b, c)));
                        named_triples += 1;
                    }
                    Err(_) => {}
                }
            }
        }
    }
    assert!(named_triples > 0);
}

#[test]
fn catalog_orders_and_names() {
    for (name, order) in [("Q8", 8), ("Z2wrZ2", 8), ("D(4)", 8), ("S3", 6), ("UT3(3)", 27), ("Q8xZ2^2", 32), ("Z(5)", 5)] {
        let g = catalog_group(name).unwrap();
        assert_eq!(g.order(), order, "{name}");
    }
    assert!(matches!(catalog_group("Q9"), Err(GroupError::UnknownName(_))));
    assert!(matches!(catalog_group("UT3(4)"), Err(GroupError::UnknownName(_))));
    assert_eq!(catalog_group("Z2^3").unwrap().name(), "Z2xZ2xZ2");
}

#[test]
fn quaternion_relations() {
    let q = catalog_group("Q8").unwrap();
    let (i, j, k, m1) = (q.find("i").unwrap(), q.find("j").unwrap(), q.find("k").unwrap(), q.find("-1").unwrap());
    assert_eq!(q.mul(i, j), k);
    assert_eq!(q.mul(j, i), q.find("-k").unwrap());
    assert_eq!(q.mul(i, i), m1);
    assert_eq!(q.mul(q.mul(i, j), k), m1);
}

#[test]
fn wreath_multiplication_rule() {
    let g = catalog_group("Z2wrZ2").unwrap();
    let el = |a: usize, b: usize, z: usize| g.find(&format!("({a},{b};{z})")).unwrap();
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for (a2, b2, z2) in [(0, 1, 0), (1, 1, 1), (1, 0, 0), (0, 0, 1)] {
            assert_eq!(g.mul(el(a, b, 1), el(a2, b2, z2)), el((a + b2) % 2, (b + a2) % 2, (1 + z2) % 2));
        }
    }
}

#[test]
fn products() {
    let z6 = z(6);
    let p = direct_product(&z(2), &z(3));
    assert_eq!(p.order(), 6);
    assert!(isomorphic(&p, &z6));
    assert!(!isomorphic(&catalog_group("S3").unwrap(), &z6));
    let triv = build_group(&[vec![0]]).unwrap().with_name("Z1");
    let q = catalog_group("Q8").unwrap();
    assert_eq!(direct_product(&q, &triv).table_rows(), q.table_rows());
    let q2 = catalog_group("Q8xZ2").unwrap();
    assert_eq!(q2.order(), 16);
    assert!(is_dedekind_structural(&q2).unwrap());
}

#[test]
fn subgroup_counts() {
    assert_eq!(all_subgroups(&z(4)).unwrap(), vec![vec![0], vec![0, 2], vec![0, 1, 2, 3]]);
    let s3 = all_subgroups(&catalog_group("S3").unwrap()).unwrap();
    let sizes: Vec<usize> = s3.iter().map(|s| s.len()).collect();
    assert_eq!(sizes, vec![1, 2, 2, 2, 3, 6]);
    assert_eq!(all_subgroups(&build_group(&[vec![0]]).unwrap()).unwrap().len(), 1);
    // Q8: trivial, centre, three cyclic of order 4, whole group
    assert_eq!(all_subgroups(&catalog_group("Q8").unwrap()).unwrap().len(), 6);
}

#[test]
fn normality() {
    let s3 = catalog_group("S3").unwrap();
    let transposition = s3.find("(1 2)").unwrap();
    assert!(!is_normal(&s3, &[0, transposition]).unwrap());
    let q = catalog_group("Q8").unwrap();
    assert!(is_normal(&q, &[0, 1]).unwrap());
    assert_eq!(is_normal(&q, &[0, 2]), Err(GroupError::NotASubgroup));
    for s in all_subgroups(&z(12)).unwrap() {
        assert!(is_normal(&z(12), &s).unwrap());
    }
}

#[test]
fn p_groups() {
    assert_eq!(classify_p_group(&catalog_group("Q8").unwrap()), Some((2, 3)));
    assert_eq!(classify_p_group(&build_group(&[vec![0]]).unwrap()), None);
    assert_eq!(classify_p_group(&z(6)), None);
    assert_eq!(classify_p_group(&catalog_group("UT3(3)xZ9").unwrap()), Some((3, 5)));
    assert_eq!(index_p_normal_subgroup(&z(4)).unwrap(), vec![0, 2]);
    assert_eq!(index_p_normal_subgroup(&z(2)).unwrap(), vec![0]);
    let q = catalog_group("Q8").unwrap();
    let h = index_p_normal_subgroup(&q).unwrap();
    assert_eq!(h, vec![0, 1, 2, 3]);
    assert!(is_normal(&q, &h).unwrap());
    assert!(matches!(index_p_normal_subgroup(&z(6)), Err(GroupError::NotAPGroup { order: 6 })));
}

#[test]
fn dedekind_verdicts() {
    for name in ["Q8", "Z2^3", "Z7", "Q8xZ2^2", "Q8xZ3", "Z4xZ2"] {
        assert!(is_dedekind_structural(&catalog_group(name).unwrap()).unwrap(), "{name}");
    }
    for name in ["S3", "D(4)", "Z2wrZ2", "UT3(3)"] {
        assert!(!is_dedekind_structural(&catalog_group(name).unwrap()).unwrap(), "{name}");
    }
    assert!(is_dedekind_literal_form(&catalog_group("Q8xZ3").unwrap()).unwrap());
    assert!(!is_dedekind_literal_form(&z(5)).unwrap());
}

#[test]
fn json_round_trip() {
    let q = catalog_group("Q8").unwrap();
    let back = group::io::from_json(&group::io::to_json(&q)).unwrap();
    assert_eq!(back, q);
}

#[test]
fn subgroup_as_group_relabels() {
    let q = catalog_group("Q8").unwrap();
    let (h, map) = q.subgroup_as_group(&[0, 1, 2, 3]).unwrap();
    assert_eq!(h.order(), 4);
    assert!(isomorphic(&h, &z(4)));
    assert_eq!(map, vec![0, 1, 2, 3]);
}

const CATALOG: &[&str] = &["Z1", "Z2", "Z5", "Z8", "Q8", "D(3)", "D(4)", "D(5)", "S3", "Z2wrZ2", "UT3(3)", "Z2xZ3", "Q8xZ2"];

#[test]
fn catalog_axioms_exhaustive() {
    for name in CATALOG {
        let g = catalog_group(name).unwrap();
        let n = g.order();
        let e = g.identity();
        for a in 0..n {
            assert_eq!(g.mul(e, a), a);
            assert_eq!(g.mul(a, g.inv(a)), e);
            let mut row: Vec<usize> = (0..n).map(|b| g.mul(a, b)).collect();
            row.sort();
            assert_eq!(row, (0..n).collect::<Vec<_>>());
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)), "{name}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn product_of_p_groups_adds_exponents(i in 0usize..4, j in 0usize..4) {
        let names = ["Z2", "Z4", "Q8", "D(4)"];
        let g = catalog_group(names[i]).unwrap();
        let h = catalog_group(names[j]).unwrap();
        let (p, a) = classify_p_group(&g).unwrap();
        let (_, b) = classify_p_group(&h).unwrap();
        prop_assert_eq!(classify_p_group(&direct_product(&g, &h)), Some((p, a + b)));
    }

    #[test]
    fn index_p_subgroup_is_normal(i in 0usize..7) {
        let names = ["Z2", "Z9", "Q8", "D(4)", "Z2wrZ2", "UT3(3)", "Z2^3"];
        let g = catalog_group(names[i]).unwrap();
        let (p, _) = classify_p_group(&g).unwrap();
        let h = index_p_normal_subgroup(&g).unwrap();
        prop_assert_eq!(h.len() * p, g.order());
        prop_assert!(is_normal(&g, &h).unwrap());
    }
}
