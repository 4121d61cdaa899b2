use std::collections::BTreeMap;

use pcoupling::calculus::{is_casimir, lichnerowicz_delta, MultiVector};
use pcoupling::cohomology::*;
use pcoupling::corpus::{self, Fiber};
use pcoupling::coupling::extract_data;
use pcoupling::fibration::{project_poisson, Connection};
use pcoupling::linalg::ExactMatrix;
use pcoupling::ring::{parse_expr, Chart, ChartRef, VarSpec, Q};
use pcoupling::Error;

fn monomials(deg: u32) -> Vec<String> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            out.push(format!("x1^{}*x2^{}*x3^{}", a, b, deg - a - b));
        }
    }
    out
}

fn fields(ch: &ChartRef, k: usize, deg: u32) -> Vec<MultiVector> {
    let frames: Vec<Vec<usize>> = match k {
        0 => vec![vec![]],
        1 => (0..3).map(|i| vec![i]).collect(),
        _ => unreachable!(),
    };
    let mut out = Vec::new();
    for f in &frames {
        for m in monomials(deg) {
            let e = parse_expr(&m, ch).unwrap();
            let mut mv = MultiVector::zero(ch, k);
            if k == 0 {
                mv = MultiVector::function(e);
            } else {
                mv.add_component(f, e).unwrap();
            }
            out.push(mv);
        }
    }
    out
}

/// Rank of a family of polynomial multivectors through a dense Bareiss elimination.
fn dense_rank(xs: &[MultiVector]) -> usize {
    let mut cols: BTreeMap<String, usize> = BTreeMap::new();
    let mut rows: Vec<BTreeMap<usize, Q>> = Vec::new();
    for x in xs {
        let mut row = BTreeMap::new();
        for (idx, f) in x.terms() {
            let d = f.denom().constant_value().unwrap();
            for (m, c) in f.numer().terms() {
                let key = format!("{:?}{:?}", idx, m);
                let n = cols.len();
                let j = *cols.entry(key).or_insert(n);
                row.insert(j, c / &d);
            }
        }
        rows.push(row);
    }
    if cols.is_empty() {
        return 0;
    }
    let mut m = ExactMatrix::zeros(rows.len(), cols.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r {
            m.set(i, *j, v.clone());
        }
    }
    m.rank()
}

fn delta_all(pi: &MultiVector, xs: &[MultiVector]) -> Vec<MultiVector> {
    xs.iter().map(|x| lichnerowicz_delta(pi, x).unwrap()).collect()
}

fn assert_rows_consistent(r: &CohomologyReport) {
    assert!(r.composite_zero);
    for row in &r.rows {
        assert_eq!(row.kernel - row.image, row.dim);
        assert!(row.kernel <= row.cochains);
    }
    assert_eq!(r.representatives.len(), r.dim());
}

#[test]
fn open_book_h1_by_degree_matches_dense_oracle() {
    let ex = corpus::open_book().unwrap();
    let rep = lichnerowicz_cohomology(&ex.pi, 1, 2).unwrap();
    assert_rows_consistent(&rep);
    assert!(rep.exact);
    let got: Vec<(i32, usize)> = rep.dims_by_label();
    let mut oracle = Vec::new();
    for d in 0..=2u32 {
        let vf = fields(&ex.chart, 1, d);
        let kernel = vf.len() - dense_rank(&delta_all(&ex.pi, &vf));
        let image = dense_rank(&delta_all(&ex.pi, &fields(&ex.chart, 0, d)));
        oracle.push((d as i32, kernel - image));
    }
    assert_eq!(got, oracle);
    assert_eq!(got, vec![(0, 1), (1, 3), (2, 0)]);
}

#[test]
fn open_book_h1_representatives_span_z_fields() {
    let ex = corpus::open_book().unwrap();
    let rep = lichnerowicz_cohomology(&ex.pi, 1, 1).unwrap();
    let reps: Vec<MultiVector> = rep
        .representatives
        .iter()
        .map(|(_, r)| match r {
            Rep::Field(x) => x.clone(),
            Rep::Bigraded(_) => panic!("field expected"),
        })
        .collect();
    let z = corpus::z_fields(&ex.chart, ["x1", "x2", "x3"]).unwrap();
    let hams = delta_all(&ex.pi, &[fields(&ex.chart, 0, 1), fields(&ex.chart, 0, 2)].concat());
    let base = dense_rank(&hams);
    let with_reps = dense_rank(&[hams.clone(), reps.clone()].concat());
    let with_z = dense_rank(&[hams.clone(), z.to_vec()].concat());
    let all = dense_rank(&[hams, reps, z.to_vec()].concat());
    assert_eq!(with_reps - base, 4);
    assert_eq!(with_z - base, 4);
    assert_eq!(all, with_z);
}

#[test]
fn casimirs_of_open_book_and_so3() {
    let ex = corpus::open_book().unwrap();
    let h0 = lichnerowicz_cohomology(&ex.pi, 0, 6).unwrap();
    assert_rows_consistent(&h0);
    assert_eq!(h0.dim(), 1);

    let p = corpus::product_r2(Fiber::So3).unwrap();
    let (_, lam) = project_poisson(&p.vertical, &p.bundle).unwrap();
    let h0 = lichnerowicz_cohomology(&lam, 0, 4).unwrap();
    assert_eq!(h0.dim(), 3);
    let ch = lam.chart();
    let expected: Vec<MultiVector> = ["1", "x1^2+x2^2+x3^2", "(x1^2+x2^2+x3^2)^2"]
        .iter()
        .map(|s| MultiVector::function(parse_expr(s, ch).unwrap()))
        .collect();
    let reps: Vec<MultiVector> = h0
        .representatives
        .iter()
        .map(|(_, r)| match r {
            Rep::Field(x) => x.clone(),
            Rep::Bigraded(_) => unreachable!(),
        })
        .collect();
    for r in &reps {
        assert!(is_casimir(&lam, &r.as_function()).unwrap());
    }
    assert_eq!(dense_rank(&reps), 3);
    assert_eq!(dense_rank(&[reps, expected].concat()), 3);
}

#[test]
fn inhomogeneous_tensor_uses_truncation() {
    let ch = Chart::new(vec![VarSpec::fiber("x"), VarSpec::fiber("y")]).unwrap();
    let mut pi = MultiVector::zero(&ch, 2);
    pi.add_component(&[0, 1], parse_expr("1 + x", &ch).unwrap()).unwrap();
    let h0 = lichnerowicz_cohomology(&pi, 0, 3).unwrap();
    assert!(!h0.exact && h0.grading.is_none());
    assert_eq!(h0.dim(), 1);
    let h1 = lichnerowicz_cohomology(&pi, 1, 2).unwrap();
    assert_rows_consistent(&h1);
}

#[test]
fn symbolic_parameters_are_rejected() {
    let ex = corpus::so3_leaf("0", "0", None).unwrap();
    assert!(matches!(lichnerowicz_cohomology(&ex.pi, 1, 1), Err(Error::Unsupported(_))));
}

#[test]
fn curved_cylinder_admits_no_grading() {
    let ex = corpus::cylinder("x2", "t*x1").unwrap();
    let data = extract_data(&ex.pi, &ex.bundle).unwrap();
    assert!(grade_data(&data).is_none());
    assert!(matches!(h1_split(&data, 1), Err(Error::Unsupported(_))));
}

#[test]
fn product_split_and_spectral_terms() {
    let ex = corpus::product_r2(Fiber::La2).unwrap();
    let data = extract_data(&ex.pi, &ex.bundle).unwrap();
    let g = grade_data(&data).unwrap();
    assert_eq!(g.shift, -2);
    let s = h1_split(&data, 2).unwrap();
    assert_eq!((s.left(), s.right()), (4, 4));
    assert_eq!(s.hbar.dim(), 0);
    assert_eq!(s.rho.dim(), 4);
    assert!(s.reps_match);
    for row in &s.rows {
        assert_eq!(row.hbar + row.rho, row.lichnerowicz);
    }
    let sp = spectral_terms(&data, 2).unwrap();
    assert_eq!((sp.e2_10(), sp.einf_01(), sp.h1()), (0, 4, 4));
}

#[test]
fn flat_cylinder_split_and_spectral_terms() {
    let ex = corpus::cylinder("0", "0").unwrap();
    let data = extract_data(&ex.pi, &ex.bundle).unwrap();
    let s = h1_split(&data, 2).unwrap();
    assert_eq!((s.hbar.dim(), s.rho.dim(), s.right()), (1, 4, 5));
    assert!(s.reps_match);
    let sp = spectral_terms(&data, 2).unwrap();
    assert_eq!((sp.e2_10(), sp.einf_01()), (1, 4));
    let hb = hbar_cohomology(&data, 1, 2).unwrap();
    assert_rows_consistent(&hb);
    assert_eq!(hb.dim(), 1);
}

#[test]
fn so3_leaf_over_sphere_chart() {
    let ex = corpus::so3_leaf("0", "0", Some(Q::from_integer(0.into()))).unwrap();
    let data = extract_data(&ex.pi, &ex.bundle).unwrap();
    let g = grade_data(&data).unwrap();
    let x1 = ex.chart.require("x1").unwrap();
    let p = ex.chart.require("p").unwrap();
    assert_eq!((g.weights[x1], g.weights[p], g.shift), (2, 1, -2));
    let s = h1_split(&data, 1).unwrap();
    assert_eq!(s.left(), s.right());
    assert!(s.reps_match);
}

#[test]
fn vanishing_hypotheses() {
    let so3 = corpus::product_r2(Fiber::So3).unwrap();
    let data = extract_data(&so3.pi, &so3.bundle).unwrap();
    let v = vanishing_conditions(&data, &Connection::trivial(&so3.bundle), 3).unwrap();
    assert!(v.zx0 && v.consistent && v.a4_holds());
    assert!(v.zx1.rows.iter().all(|r| r.dim == 0));
    assert_eq!((v.zx2.dim(), v.zx3.dim()), (0, 0));

    let la2 = corpus::product_r2(Fiber::La2).unwrap();
    let data = extract_data(&la2.pi, &la2.bundle).unwrap();
    let v = vanishing_conditions(&data, &Connection::trivial(&la2.bundle), 2).unwrap();
    assert!(!v.consistent);
    assert_eq!(v.zx1.dim(), 4);

    let zero_p = corpus::non_closed_sigma("1").unwrap();
    let flat = Connection::trivial(&zero_p.bundle());
    let v = vanishing_conditions(&zero_p, &flat, 2).unwrap();
    assert!(!v.consistent);
    assert!(v.zx1.dim() > 0);
    assert_eq!(v.zx1.rows[0].cochains, v.zx1.rows[0].kernel);
}

#[test]
fn vanishing_rejects_curved_connection() {
    let ex = corpus::cylinder("x2", "t*x1").unwrap();
    let data = extract_data(&ex.pi, &ex.bundle).unwrap();
    let curved = data.connection().clone();
    assert!(matches!(vanishing_conditions(&data, &curved, 1), Err(Error::Precondition(_))));
}
