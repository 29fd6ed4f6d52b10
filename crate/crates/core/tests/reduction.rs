use paradot::counting::reduction_equiv;
use paradot::varieties::{enum_paraboloid, DEFAULT_CAP};
use paradot::FieldSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn exhaustive_on_three_dim_paraboloids() {
    for p in [3u64, 7, 11] {
        let k = FieldSpec::new(p).unwrap();
        let parab = enum_paraboloid(&k, 3, DEFAULT_CAP).unwrap();
        let mut checked = 0u64;
        for x in parab.iter().filter(|x| k.norm_raw(&x[..2]) != 0) {
            for y in parab.iter() {
                for z in parab.iter() {
                    let (lhs, rhs) = reduction_equiv(&k, x, y, z).unwrap();
                    assert_eq!(lhs, rhs, "p={p} x={x:?} y={y:?} z={z:?}");
                    checked += 1;
                }
            }
        }
        let base = p * p - if p % 4 == 1 { 2 * p - 1 } else { 1 };
        assert_eq!(checked, base * (p * p) * (p * p));
    }
}

#[test]
fn sampled_on_five_dim_paraboloid() {
    let k = FieldSpec::new(7).unwrap();
    let parab = enum_paraboloid(&k, 5, DEFAULT_CAP).unwrap();
    let apexes: Vec<usize> = (0..parab.len())
        .filter(|&i| k.norm_raw(&parab.point(i)[..4]) != 0)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100_000 {
        let x = parab.point(apexes[rng.gen_range(0..apexes.len())]);
        let y = parab.point(rng.gen_range(0..parab.len()));
        let z = parab.point(rng.gen_range(0..parab.len()));
        let (lhs, rhs) = reduction_equiv(&k, x, y, z).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn isotropic_base_is_rejected() {
    let k = FieldSpec::new(13).unwrap();
    // (1, 5) has norm 26 ≡ 0
    assert!(reduction_equiv(&k, &[1, 5, 0], &[0, 0, 0], &[1, 0, 1]).is_err());
}
