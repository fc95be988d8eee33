//! Reed–Solomon coding over GF(256) as used by QR Code: generator roots
//! alpha^0 .. alpha^(ec-1), codeword bytes ordered highest degree first.

use crate::gf256;

/// Generator polynomial coefficients, highest degree first, leading 1 omitted.
fn generator(ec_len: usize) -> Vec<u8> {
    let mut poly = vec![0u8; ec_len];
    poly[ec_len - 1] = 1;
    let mut root = 1u8;
    for _ in 0..ec_len {
        for j in 0..ec_len {
            poly[j] = gf256::mul(poly[j], root);
            if j + 1 < ec_len {
                poly[j] ^= poly[j + 1];
            }
        }
        root = gf256::mul(root, 0x02);
    }
    poly
}

/// Error-correction codewords for one block.
pub fn encode(data: &[u8], ec_len: usize) -> Vec<u8> {
    let divisor = generator(ec_len);
    let mut rem = vec![0u8; ec_len];
    for &b in data {
        let factor = b ^ rem[0];
        rem.remove(0);
        rem.push(0);
        for (r, &d) in rem.iter_mut().zip(&divisor) {
            *r ^= gf256::mul(d, factor);
        }
    }
    rem
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Uncorrectable;

fn syndromes(block: &[u8], ec_len: usize) -> Vec<u8> {
    (0..ec_len)
        .map(|j| {
            // Horner evaluation at alpha^j.
            let x = gf256::exp(j);
            block.iter().fold(0u8, |acc, &c| gf256::mul(acc, x) ^ c)
        })
        .collect()
}

/// Evaluate an ascending-order polynomial.
fn eval_ascending(poly: &[u8], x: u8) -> u8 {
    poly.iter().rev().fold(0u8, |acc, &c| gf256::mul(acc, x) ^ c)
}

/// Corrects `block` (data followed by `ec_len` EC codewords) in place.
/// Returns the number of corrected codewords.
pub fn decode(block: &mut [u8], ec_len: usize) -> Result<usize, Uncorrectable> {
    let n = block.len();
    let synd = syndromes(block, ec_len);
    if synd.iter().all(|&s| s == 0) {
        return Ok(0);
    }

    // Berlekamp–Massey; polynomials in ascending order.
    let mut locator = vec![1u8];
    let mut prev = vec![1u8];
    let mut degree = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = 1u8;
    for step in 0..ec_len {
        let mut disc = synd[step];
        for i in 1..=degree.min(locator.len() - 1) {
            disc ^= gf256::mul(locator[i], synd[step - i]);
        }
        if disc == 0 {
            shift += 1;
            continue;
        }
        let coef = gf256::div(disc, prev_disc);
        let mut next = locator.clone();
        if next.len() < prev.len() + shift {
            next.resize(prev.len() + shift, 0);
        }
        for (i, &p) in prev.iter().enumerate() {
            next[i + shift] ^= gf256::mul(coef, p);
        }
        if 2 * degree <= step {
            prev = std::mem::replace(&mut locator, next);
            degree = step + 1 - degree;
            prev_disc = disc;
            shift = 1;
        } else {
            locator = next;
            shift += 1;
        }
    }
    locator.truncate(degree + 1);
    if degree == 0 || 2 * degree > ec_len {
        return Err(Uncorrectable);
    }

    // Chien search over the positions that exist in this block.
    let mut powers = Vec::with_capacity(degree);
    for p in 0..n {
        let x_inv = gf256::exp(255 - p % 255);
        if eval_ascending(&locator, x_inv) == 0 {
            powers.push(p);
        }
    }
    if powers.len() != degree {
        return Err(Uncorrectable);
    }

    // Forney: omega = S(x) * locator(x) mod x^ec_len.
    let mut omega = vec![0u8; ec_len];
    for (i, &s) in synd.iter().enumerate() {
        for (j, &l) in locator.iter().enumerate() {
            if i + j < ec_len {
                omega[i + j] ^= gf256::mul(s, l);
            }
        }
    }
    let derivative: Vec<u8> = locator
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
        .collect();

    for &p in &powers {
        let x = gf256::exp(p);
        let x_inv = gf256::inv(x);
        let denom = eval_ascending(&derivative, x_inv);
        if denom == 0 {
            return Err(Uncorrectable);
        }
        let magnitude = gf256::mul(x, gf256::div(eval_ascending(&omega, x_inv), denom));
        block[n - 1 - p] ^= magnitude;
    }

    if syndromes(block, ec_len).iter().any(|&s| s != 0) {
        return Err(Uncorrectable);
    }
    Ok(degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn codeword(rng: &mut StdRng, data_len: usize, ec_len: usize) -> Vec<u8> {
        let data: Vec<u8> = (0..data_len).map(|_| rng.gen()).collect();
        let mut block = data.clone();
        block.extend(encode(&data, ec_len));
        block
    }

    #[test]
    fn known_vector_from_standard_annex() {
        // Version 1-M "01234567" example: 16 data codewords, 10 EC codewords.
        let data = [
            0x10, 0x20, 0x0C, 0x56, 0x61, 0x80, 0xEC, 0x11, 0xEC, 0x11, 0xEC, 0x11, 0xEC, 0x11,
            0xEC, 0x11,
        ];
        let ec = encode(&data, 10);
        assert_eq!(ec, [0xA5, 0x24, 0xD4, 0xC1, 0xED, 0x36, 0xC7, 0x87, 0x2C, 0x55]);
    }

    #[test]
    fn clean_codeword_has_zero_syndromes() {
        let mut rng = StdRng::seed_from_u64(7);
        for ec in [7, 10, 22, 28, 30] {
            let block = codeword(&mut rng, 40, ec);
            assert!(syndromes(&block, ec).iter().all(|&s| s == 0));
        }
    }

    #[test]
    fn corrects_up_to_half_the_ec_codewords() {
        let mut rng = StdRng::seed_from_u64(11);
        for ec in [10usize, 22, 28, 30] {
            for _ in 0..200 {
                let data_len = 15 + rng.gen_range(0..100);
                let clean = codeword(&mut rng, data_len, ec);
                let errors = rng.gen_range(1..=ec / 2);
                let mut damaged = clean.clone();
                let mut positions: Vec<usize> = (0..clean.len()).collect();
                for i in 0..errors {
                    let j = rng.gen_range(i..positions.len());
                    positions.swap(i, j);
                    damaged[positions[i]] ^= rng.gen_range(1..=255u8);
                }
                assert_eq!(decode(&mut damaged, ec), Ok(errors));
                assert_eq!(damaged, clean);
            }
        }
    }

    #[test]
    fn heavy_damage_is_reported_not_miscorrected() {
        let mut rng = StdRng::seed_from_u64(13);
        let ec = 28;
        for _ in 0..500 {
            let clean = codeword(&mut rng, 15, ec);
            let mut damaged = clean.clone();
            for b in damaged.iter_mut().take(30) {
                *b ^= rng.gen_range(1..=255u8);
            }
            assert_eq!(decode(&mut damaged, ec), Err(Uncorrectable));
        }
    }
}
