//! Frozen values of the deterministic phantoms.

use cure_core::pipeline::{edge_fraction, make_phantom, PhantomKind};
use sha2::{Digest, Sha256};

fn digest(kind: PhantomKind, size: usize) -> String {
    let p = make_phantom(kind, size).unwrap();
    let mut h = Sha256::new();
    for v in p.data() {
        h.update(v.to_le_bytes());
    }
    format!("{:x}", h.finalize())
}

#[test]
fn shepp_logan_128_is_frozen() {
    let p = make_phantom(PhantomKind::SheppLogan, 128).unwrap();
    assert!(p.data().iter().all(|v| (0.0..=255.0).contains(v)));
    assert_eq!(p.sum(), 517_997.0);
    assert_eq!(
        digest(PhantomKind::SheppLogan, 128),
        "1f1be7391c3f0b8cce35ec96e31f6f45878489011ef5ae4f27324a98740fe060"
    );
}

#[test]
fn piecewise_128_is_frozen() {
    let p = make_phantom(PhantomKind::Piecewise, 128).unwrap();
    let frac = edge_fraction(&p);
    assert!(frac > 0.0 && frac < 0.3);
    assert_eq!(frac, 2355.0 / 16384.0);
    assert_eq!(p.sum(), 1_439_210.0);
    assert_eq!(
        digest(PhantomKind::Piecewise, 128),
        "c94e0ec8a731e511ea0d6edeb456c102c132609d00339e2f69e97db6f80591f5"
    );
}
