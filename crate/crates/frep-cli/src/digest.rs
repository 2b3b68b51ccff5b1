//! Canonical SHA-256 digests of representations and algebra elements,
//! recorded in reports so a run can be tied to its exact inputs.

use frep_core::{GroupAlgebraElement, Representation};
use sha2::{Digest, Sha256};

fn push_f64(h: &mut Sha256, v: f64) {
    h.update(v.to_le_bytes());
}

pub fn representation_digest(rep: &Representation) -> String {
    let mut h = Sha256::new();
    h.update(b"rep");
    h.update((rep.k() as u64).to_le_bytes());
    h.update((rep.dim() as u64).to_le_bytes());
    for g in rep.generators() {
        for r in 0..rep.dim() {
            for c in 0..rep.dim() {
                push_f64(&mut h, g[(r, c)].re);
                push_f64(&mut h, g[(r, c)].im);
            }
        }
    }
    hex::encode(h.finalize())
}

pub fn element_digest(f: &GroupAlgebraElement) -> String {
    let mut h = Sha256::new();
    h.update(b"elt");
    h.update((f.k() as u64).to_le_bytes());
    for (w, c) in f.terms() {
        let s = w.to_string();
        h.update((s.len() as u64).to_le_bytes());
        h.update(s.as_bytes());
        push_f64(&mut h, c.re);
        push_f64(&mut h, c.im);
    }
    hex::encode(h.finalize())
}
