//! Acceptance sweep: one test per advertised guarantee of the crate, each
//! printing a single pass line.  These exercise the public API end to end
//! on the reference equations and on randomized synthetic data.

use hyperfibre::arena::Arena;
use hyperfibre::certify::{certify, CurveInput, StarCertificate, Verdict};
use hyperfibre::cluster::{
    cross_valuation_sum, odd_p_picture, picture_from_certificate, shifted_picture, vp_int,
    ClusterPicture,
};
use hyperfibre::factor::{self, DEFAULT_FACTOR_SEED};
use hyperfibre::fibre::{node_split_by_search, node_split_by_trace, nodes, stable_model};
use hyperfibre::fq::{FqElem, FqEmbedding, FqField};
use hyperfibre::graph::{cycle_rank, minimal_regular_graph, orbit_report, stable_graph};
use hyperfibre::hensel;
use hyperfibre::poly::{self, Poly};
use hyperfibre::two_torsion::{full_two_torsion, reduction_kernel, TwoTorsionElt};
use hyperfibre::unram::{int_poly_in, reduce_poly, truncate_poly, UnramElem, UnramRing};
use hyperfibre::val::Val;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GLOBAL_F: [i64; 7] = [28, -232, 221, 66, -61, -2, 1];
const EX111_F: [i64; 7] = [-2184, 240, 505, -46, -37, 2, 1];
const STAR_G2_F: [i64; 7] = [-84, 24, 41, -14, -9, 2, 1];
const STAR_G3_F: [i64; 9] = [252, 96, -255, -16, 96, -2, -16, 0, 1];
const STAR_G4_F: [i64; 11] = [-1188, -480, 1489, 432, -598, -166, 127, 30, -17, -2, 1];
const X6_PLUS_1: [i64; 7] = [1, 0, 0, 0, 0, 0, 1];

fn curve(c: i64, f: &[i64]) -> CurveInput {
    CurveInput::from_i64(c, f, 1).expect("fixture equations are valid")
}

/// The three integer quadratics whose product is the degree six reference
/// polynomial, usable at every odd prime.
fn odd_factors() -> Vec<Vec<BigInt>> {
    [[-4i64, 0, 1], [-1, 7, 1], [7, -9, 1]]
        .iter()
        .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn f2_poly(bits: &[u64]) -> Poly<FqElem> {
    let k = FqField::new(2, 1);
    Poly::from_coeffs(bits.iter().map(|&b| k.from_prime(b)).collect())
}

fn child_profiles(pic: &ClusterPicture) -> Vec<(Val, usize, usize)> {
    pic.root
        .children
        .iter()
        .map(|c| (c.depth, c.leaf_count, c.free_leaves))
        .collect()
}

#[test]
fn criterion_1_global_curve_two_adic_route() {
    let cert = certify(&curve(1, &GLOBAL_F)).unwrap();
    assert_eq!(cert.verdict, Verdict::StarStar);

    let pic = picture_from_certificate(&cert);
    assert_eq!(pic.root.depth, Val::int(0));
    assert_eq!(
        child_profiles(&pic),
        vec![(Val::int(2), 2, 2), (Val::int(3), 2, 2), (Val::int(3), 2, 2)]
    );

    let at11 = odd_p_picture(11, &odd_factors(), None).unwrap();
    assert_eq!(shifted_picture(&pic).canonical_json(), at11.canonical_json());

    let model = stable_model(&cert);
    let st = stable_graph(&cert, &model);
    assert_eq!(st.vertices.len(), 1);
    assert_eq!(st.vertices[0].genus, 0);
    assert_eq!(st.edges.len(), 2);
    assert!(st.edges.iter().all(|e| e.ends == (0, 0) && e.thickness == 2));

    let mr = minimal_regular_graph(&st);
    assert_eq!((mr.vertices.len(), mr.edges.len()), (3, 4));
    assert_eq!(cycle_rank(&mr), 2);
    assert!(mr.edges.iter().all(|e| e.thickness == 1));

    println!("criterion 1 pass: global curve certifies StarStar, twin depths 2/3/3, shifted picture matches p=11, loops subdivide to cycle rank 2");
}

#[test]
fn criterion_2_odd_prime_cluster_pictures() {
    let factors = odd_factors();
    for p in [7u64, 17, 29] {
        let pic = odd_p_picture(p, &factors, None).unwrap();
        assert_eq!(pic.root.depth, Val::int(0), "p = {p}");
        assert_eq!(pic.root.free_leaves, 4, "p = {p}");
        assert_eq!(child_profiles(&pic), vec![(Val::int(1), 2, 2)], "p = {p}");
    }
    let pic = odd_p_picture(11, &factors, None).unwrap();
    assert_eq!(pic.root.free_leaves, 2);
    assert_eq!(
        child_profiles(&pic),
        vec![(Val::int(1), 2, 2), (Val::int(1), 2, 2)]
    );
    let pic = odd_p_picture(53, &factors, None).unwrap();
    assert_eq!(pic.root.free_leaves, 2);
    assert_eq!(
        child_profiles(&pic),
        vec![(Val::half(1), 2, 2), (Val::half(1), 2, 2)]
    );
    println!("criterion 2 pass: odd prime pictures show one depth-1 twin at 7/17/29, two depth-1 twins at 11, two depth-1/2 twins at 53");
}

#[test]
fn criterion_3_ex111_analysis_chain() {
    let cert = certify(&curve(5, &EX111_F)).unwrap();
    assert_eq!(cert.verdict, Verdict::StarStar);
    assert_eq!(cert.a, BigInt::from(1));

    // Residue points are 0 and the two primitive cube roots of unity.
    let k4 = cert.pairs[1].r.field().clone();
    assert!(cert.pairs[0].r.is_zero());
    let zeta = &cert.pairs[1].r;
    assert_eq!(zeta.square().add(zeta).add(&k4.one()), k4.zero());
    assert_eq!(cert.pairs[2].r, zeta.square());

    let vals: Vec<u32> = cert.pairs.iter().map(|p| p.eta_valuation).collect();
    assert_eq!(vals, [1, 2, 2]);
    let depths: Vec<Val> = cert.pairs.iter().map(|p| p.depth).collect();
    assert_eq!(depths, [Val::half(5), Val::int(3), Val::int(3)]);
    assert_eq!(cert.frobenius_perm, [0, 2, 1]);

    let model = stable_model(&cert);
    assert_eq!(model.qbar, f2_poly(&[0, 1, 1, 1]));
    assert_eq!(model.pbar, model.qbar.mul(&model.qbar));

    let ns = nodes(&cert);
    assert_eq!(ns.len(), 3);
    assert!(ns[0].r.is_zero() && !ns[0].split && ns[0].thickness == 1);
    assert!(ns[1].split && ns[1].thickness == 2 && ns[1].residue_degree == 2);
    assert!(ns[2].split && ns[2].thickness == 2 && ns[2].residue_degree == 2);

    let st = stable_graph(&cert, &model);
    assert_eq!(st.vertices.len(), 2);
    assert!(st.vertices.iter().all(|v| v.genus == 0));
    assert_eq!(st.edges.len(), 3);
    assert!(st.edges.iter().all(|e| e.ends == (0, 1)));
    assert_eq!(st.frobenius.vertex_perm, [1, 0], "components are swapped");

    let mr = minimal_regular_graph(&st);
    assert_eq!(mr.vertices.len(), 4);
    let orbits = orbit_report(&mr);
    let mut sizes: Vec<usize> = orbits.vertex_orbits.iter().map(|o| o.len()).collect();
    sizes.sort();
    assert_eq!(sizes, [2, 2]);

    println!("criterion 3 pass: ex111 gives a = 1, residue points 0 and the cube roots of unity, eta valuations 1/2/2, Pbar = Qbar^2, one non-split and two conjugate split nodes, swapped components, and 2+2 vertex orbits");
}

fn random_unit(ring: &UnramRing, rng: &mut ChaCha8Rng) -> UnramElem {
    loop {
        let coords: Vec<BigUint> = (0..ring.degree()).map(|_| BigUint::from(rng.next_u64())).collect();
        let e = ring.elem(&coords);
        if !e.reduce().is_zero() {
            return e;
        }
    }
}

fn random_elem(ring: &UnramRing, rng: &mut ChaCha8Rng) -> UnramElem {
    let coords: Vec<BigUint> = (0..ring.degree()).map(|_| BigUint::from(rng.next_u64())).collect();
    ring.elem(&coords)
}

/// One synthetic stable-model instance: random pairing data over an
/// unramified ring, then the exact identity `4 P = c f - Q^2` and the
/// closed form of `Pbar` are checked against direct computation.
fn identity_instance(g: usize, m: usize, rng: &mut ChaCha8Rng) {
    let n = 64u32;
    let ring = UnramRing::new(2, m, n);
    let k = ring.residue_field().clone();

    let mut residues: Vec<FqElem> = Vec::new();
    while residues.len() < g + 1 {
        let coords: Vec<u64> = (0..m).map(|_| rng.gen_range(0..2u64)).collect();
        let cand = k.elem(&coords);
        if !residues.contains(&cand) {
            residues.push(cand);
        }
    }

    let two = BigUint::from(2u32);
    let four = BigUint::from(4u32);
    let gammas: Vec<UnramElem> = residues
        .iter()
        .map(|r| ring.lift(r).add(&random_elem(&ring, rng).scale(&two)))
        .collect();
    let etas: Vec<UnramElem> = (0..=g)
        .map(|_| {
            let v = rng.gen_range(0..=4u32);
            random_unit(&ring, rng).scale(&(BigUint::from(1u32) << v))
        })
        .collect();
    let a_int = rng.gen_range(-20i64..=20);
    let c = ring.from_i64(1 + 4 * a_int);

    // f is the monic product of the pair quadratics; the model equation
    // uses c f, so the closed form of Pbar acquires an abar Qbar^2 term.
    let mut f = Poly::constant(ring.one());
    let mut q = Poly::constant(ring.one());
    for i in 0..=g {
        let c0 = gammas[i].square().sub(&etas[i].scale(&four));
        f = f.mul(&Poly::from_coeffs(vec![c0, gammas[i].scale(&two).neg(), ring.one()]));
        q = q.mul(&Poly::from_coeffs(vec![gammas[i].neg(), ring.one()]));
    }

    let diff = f.mul_scalar(&c).sub(&q.mul(&q));
    let lo = ring.truncated(n - 2);
    let p = Poly::from_coeffs(
        diff.coeffs()
            .iter()
            .map(|co| co.div_exact_pow_p(2, &lo).expect("c f - Q^2 is divisible by 4"))
            .collect::<Vec<_>>(),
    );
    let lhs = p.map(|co| co.scale(&four));
    let rhs = truncate_poly(&diff, &lo);
    assert_eq!(lhs, rhs, "4 P must reproduce c f - Q^2 exactly");

    let qbar = reduce_poly(&q);
    let abar = ring.from_i64(a_int).reduce();
    let mut closed = qbar.mul(&qbar).mul_scalar(&abar);
    for i in 0..=g {
        let mut term = Poly::constant(etas[i].reduce());
        for (j, r) in residues.iter().enumerate() {
            if j != i {
                let lin = Poly::x_minus(r);
                term = term.mul(&lin).mul(&lin);
            }
        }
        closed = closed.add(&term);
    }
    assert_eq!(reduce_poly(&p), closed, "Pbar must match its closed form");
}

#[test]
fn criterion_4_stable_model_identity_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1dea_5137);
    let combos = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (4, 3), (4, 4)];
    let total = 500;
    for i in 0..total {
        let (g, m) = combos[i % combos.len()];
        identity_instance(g, m, &mut rng);
    }
    println!("criterion 4 pass: {total} randomized instances satisfy 4P = cf - Q^2 exactly and Pbar matches its closed form");
}

#[test]
fn criterion_5_split_oracle_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dd_ba11);
    let mut checked = 0usize;
    while checked < 200 {
        let m = rng.gen_range(2..=8usize);
        let k = FqField::new(2, m);
        let max_roots = 6.min(1usize << m);
        let n_roots = rng.gen_range(3..=max_roots);
        let mut roots: Vec<FqElem> = Vec::new();
        while roots.len() < n_roots {
            let coords: Vec<u64> = (0..m).map(|_| rng.gen_range(0..2u64)).collect();
            let cand = k.elem(&coords);
            if !roots.contains(&cand) {
                roots.push(cand);
            }
        }
        let etas: Vec<FqElem> = (0..n_roots)
            .map(|_| {
                if rng.gen_range(0..3u32) == 0 {
                    k.zero()
                } else {
                    let coords: Vec<u64> = (0..m).map(|_| rng.gen_range(0..2u64)).collect();
                    k.elem(&coords)
                }
            })
            .collect();
        let coords: Vec<u64> = (0..m).map(|_| rng.gen_range(0..2u64)).collect();
        let abar = k.elem(&coords);
        for i in 0..n_roots {
            let by_trace = node_split_by_trace(&abar, &roots, &etas, i, m);
            let by_search = node_split_by_search(&abar, &roots, &etas, i, m);
            assert_eq!(by_trace, by_search, "split tests disagree at m = {m}, i = {i}");
            checked += 1;
        }
    }
    println!("criterion 5 pass: trace and exhaustive-search split tests agree on {checked} random node configurations");
}

/// Rebuilds the squared-linear seed lift of a fixture at the given
/// precision, returning the lifted quadratics and their ring.
fn lift_fixture(f: &[i64], n: u32) -> (Vec<Poly<UnramElem>>, UnramRing) {
    let k1 = FqField::new(2, 1);
    let fbar = Poly::from_coeffs(
        f.iter()
            .map(|&c| k1.from_prime(c.rem_euclid(2) as u64))
            .collect::<Vec<_>>(),
    );
    let qbar = factor::char2_poly_sqrt(&fbar).expect("fixture reduces to a square");
    let m = factor::factor_with_seed(&qbar, DEFAULT_FACTOR_SEED)
        .iter()
        .fold(1usize, |acc, (fac, _)| acc.lcm(&fac.deg()));
    let big = FqField::new(2, m);
    let qbar_big = if m == 1 {
        qbar
    } else {
        FqEmbedding::new(&k1, &big).embed_poly(&qbar)
    };
    let mut roots = factor::roots_in_field(&qbar_big);
    roots.sort();
    let ring = UnramRing::new(2, m, n);
    let fw = int_poly_in(&ring, f);
    let seeds: Vec<Poly<FqElem>> = roots
        .iter()
        .map(|r| Poly::from_coeffs(vec![r.square(), big.zero(), big.one()]))
        .collect();
    let lifted = hensel::lift_factors(&fw, &seeds).expect("squared linear seeds lift");
    (lifted, ring)
}

#[test]
fn criterion_6_hensel_product_and_idempotence() {
    let fixtures: [&[i64]; 6] = [&GLOBAL_F, &EX111_F, &STAR_G2_F, &STAR_G3_F, &STAR_G4_F, &X6_PLUS_1];
    for f in fixtures {
        let (lifted, ring) = lift_fixture(f, 64);
        let mut product = Poly::constant(ring.one());
        for factor in &lifted {
            assert_eq!(factor.deg(), 2);
            assert!(factor.is_monic());
            product = product.mul(factor);
        }
        assert_eq!(product, int_poly_in(&ring, f), "factors must multiply back to f");

        let (wide, _) = lift_fixture(f, 128);
        for (narrow, w) in lifted.iter().zip(&wide) {
            assert_eq!(
                truncate_poly(w, &ring),
                *narrow,
                "lifting at doubled precision must refine, not change, the factors"
            );
        }
    }
    println!("criterion 6 pass: Hensel factors multiply back to f mod 2^64 on all six fixtures and are stable under precision doubling");
}

#[test]
fn criterion_7_valuation_oracle_at_odd_primes() {
    let factors = odd_factors();
    let polys: Vec<Poly<BigInt>> = factors
        .iter()
        .map(|c| Poly::from_coeffs(c.clone()))
        .collect();
    let f = polys
        .iter()
        .fold(Poly::constant(BigInt::from(1)), |acc, p| acc.mul(p));
    for p in [7u64, 11, 17, 29, 53] {
        let precision = vp_int(p, &poly::discriminant(&f)) + 6;
        let arena = Arena::new(p, precision);
        let roots: Vec<Vec<_>> = factors
            .iter()
            .map(|c| arena.roots_of_factor(c).expect("quadratic splits in the arena"))
            .collect();
        for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                let res = poly::resultant(&polys[i], &polys[j]);
                let cross = cross_valuation_sum(&roots[i], &roots[j]).expect("finite valuation");
                assert_eq!(
                    cross,
                    Val::int(vp_int(p, &res) as i64),
                    "resultant valuation mismatch at p = {p} between factors {i} and {j}"
                );
            }
        }
        for (i, poly_i) in polys.iter().enumerate() {
            let disc = poly::discriminant(poly_i);
            let pair_val = roots[i][0].sub(&roots[i][1]).valuation().expect("finite valuation");
            assert_eq!(
                pair_val + pair_val,
                Val::int(vp_int(p, &disc) as i64),
                "discriminant valuation mismatch at p = {p} for factor {i}"
            );
        }
    }
    println!("criterion 7 pass: arena root valuations reproduce v_p of all pairwise resultants and factor discriminants at p = 7, 11, 17, 29, 53");
}

#[test]
fn criterion_8_two_torsion_dimensions_and_span() {
    for (f, g) in [(&STAR_G2_F[..], 2usize), (&STAR_G3_F[..], 3), (&STAR_G4_F[..], 4)] {
        let cert = certify(&curve(1, f)).unwrap();
        assert_eq!(cert.verdict, Verdict::Star);

        let full = full_two_torsion(g);
        assert_eq!(full.dim(), 2 * g);
        let kernel = reduction_kernel(&cert).unwrap();
        assert_eq!(kernel.dim(), g);
        assert!(full.contains_subgroup(&kernel));
        assert_eq!(kernel.elements().len(), 1 << g);

        // Membership must agree with the combinatorial description: a class
        // lies in the kernel exactly when it or its complement is a union
        // of root pairs {2i, 2i+1}.
        let size = 2 * g + 2;
        let everything = (1u64 << size) - 1;
        let union_of_pairs = |mask: u64| {
            (0..=g).all(|i| {
                let pair = 0b11u64 << (2 * i);
                mask & pair == 0 || mask & pair == pair
            })
        };
        for mask in 0..=everything {
            if mask.count_ones() % 2 != 0 {
                continue;
            }
            let elt = TwoTorsionElt::from_mask(size, mask).unwrap();
            let expected = union_of_pairs(mask) || union_of_pairs(mask ^ everything);
            assert_eq!(kernel.contains(&elt), expected, "mask {mask:#b} at genus {g}");
        }
    }
    println!("criterion 8 pass: two-torsion has dimension 2g, the kernel of reduction has dimension g, and membership matches the root-pair span for g = 2, 3, 4");
}

fn reduction_profile(cert: &StarCertificate) -> (Verdict, Vec<Val>, Vec<(u32, usize, bool)>, serde_json::Value) {
    let mut depths: Vec<Val> = cert.pairs.iter().map(|p| p.depth).collect();
    depths.sort();
    let mut node_data: Vec<(u32, usize, bool)> = nodes(cert)
        .iter()
        .map(|n| (n.thickness, n.residue_degree, n.split))
        .collect();
    node_data.sort();
    let shifted = shifted_picture(&picture_from_certificate(cert)).canonical_json();
    (cert.verdict, depths, node_data, shifted)
}

#[test]
fn criterion_9_translation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a61_0ff5);
    let fixtures: [(i64, &[i64]); 5] = [
        (1, &GLOBAL_F),
        (5, &EX111_F),
        (1, &STAR_G2_F),
        (1, &STAR_G3_F),
        (1, &STAR_G4_F),
    ];
    for (c, f) in fixtures {
        let base = curve(c, f);
        let reference = reduction_profile(&certify(&base).unwrap());
        for _ in 0..20 {
            let u = rng.gen_range(-50i64..=50);
            let cert = certify(&base.translated(u)).unwrap();
            assert_eq!(
                reduction_profile(&cert),
                reference,
                "translation by {u} changed the reduction profile"
            );
        }
    }
    println!("criterion 9 pass: 20 random integer translations per fixture preserve verdict, depth multiset, node data, and the shifted cluster picture");
}
