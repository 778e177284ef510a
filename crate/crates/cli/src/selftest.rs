//! Golden checks run by `pcf selftest`.

use std::io::{self, Write};

use pcf::cfrac::{expand, Algorithm, Epsilon, Limits};
use pcf::field::{FieldElement, MinPoly, VectorElement};
use pcf::hensel::EmbeddingContext;
use pcf::lab::{default_z_set, source_bytes, BitSource};
use pcf::matrix::RationalMatrix;
use pcf::preduce::p_reduce;
use pcf::rational::{parse_rational, Prime};

fn matrix(rows: &[&[&str]]) -> RationalMatrix {
    RationalMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|x| parse_rational(x).unwrap()).collect())
            .collect(),
    )
}

fn preduce_golden() -> bool {
    let m = matrix(&[&["10", "3/2"], &["-5", "7"]]);
    let Ok((reduced, n)) = p_reduce(&m, Prime::new(2).unwrap()) else {
        return false;
    };
    reduced == matrix(&[&["1", "0"], &["0", "1/2"]])
        && n == matrix(&[&["14/155", "-3/155"], &["1/31", "2/31"]])
}

fn zset_counts() -> bool {
    [(2, 2, 78), (23, 2, 200), (2, 3, 84)]
        .iter()
        .all(|&(p, d, n)| {
            default_z_set(Prime::new(p).unwrap(), d)
                .map(|s| s.len())
                .ok()
                == Some(n)
        })
}

fn rational_finite() -> bool {
    let field = MinPoly::rational(Prime::new(3).unwrap()).into_field();
    let ctx = EmbeddingContext::new(field.clone());
    ["2/3", "-7/5", "100/81"].iter().all(|x| {
        let v = VectorElement::from_rationals(&field, &[parse_rational(x).unwrap()]).unwrap();
        expand(
            &ctx,
            &v,
            Algorithm::Phi0 {
                epsilon: Epsilon::Minus,
            },
            &Limits::default(),
        )
        .status
        .is_finite()
    })
}

fn quadratic_periodic() -> bool {
    let Ok(set) = default_z_set(Prime::new(5).unwrap(), 2) else {
        return false;
    };
    set.into_iter().take(10).all(|m| {
        let field = m.into_field();
        let ctx = EmbeddingContext::new(field.clone());
        let z = VectorElement::new(vec![FieldElement::generator(&field)]).unwrap();
        expand(
            &ctx,
            &z,
            Algorithm::Phi1 {
                epsilon: Epsilon::Plus,
            },
            &Limits::default(),
        )
        .status
        .is_periodic()
    })
}

/// `(z^s + ... + z, ..., z)` reaches `(z^s, ..., z)` in one `Φ3` step.
fn phi3_instance() -> bool {
    (3..=5).all(|degree| {
        let Some(m) = default_z_set(Prime::new(2).unwrap(), degree)
            .ok()
            .and_then(|s| s.into_iter().next())
        else {
            return false;
        };
        let field = m.into_field();
        let s = field.dimension();
        let z = FieldElement::generator(&field);
        let start: Vec<FieldElement> = (1..=s)
            .map(|i| {
                (i..=s).fold(FieldElement::zero(&field), |acc, j| {
                    &acc + &z.pow((s - j + 1) as u32)
                })
            })
            .collect();
        let target: Vec<FieldElement> = (0..s).map(|i| z.pow((s - i) as u32)).collect();
        let ctx = EmbeddingContext::new(field.clone());
        let rec = expand(
            &ctx,
            &VectorElement::new(start).unwrap(),
            Algorithm::phi3(),
            &Limits::default(),
        );
        rec.status.is_periodic()
            && rec.remainders.get(1).map(|r| r.components()) == Some(&target[..])
    })
}

fn first_bytes() -> bool {
    source_bytes(BitSource::GOLDEN, 1) == [121] && source_bytes(BitSource::shifted(1), 1) == [86]
}

type Check = (&'static str, fn() -> bool);

/// Prints one line per check and returns the number that failed.
pub fn run(out: &mut impl Write) -> io::Result<usize> {
    let checks: [Check; 6] = [
        (
            "p-reduction of [[10, 3/2], [-5, 7]] at p = 2",
            preduce_golden,
        ),
        ("generator counts", zset_counts),
        ("rationals have finite expansions", rational_finite),
        ("quadratic generators are periodic", quadratic_periodic),
        ("one-step instance of the Φ3 theorem", phi3_instance),
        ("first bytes of the bit streams", first_bytes),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let ok = check();
        failed += usize::from(!ok);
        writeln!(out, "[{}] {name}", if ok { "PASS" } else { "FAIL" })?;
    }
    Ok(failed)
}
