use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::pebbling::Configuration;

/// Largest dimension for which the full automorphism group is enumerated.
pub const MAX_CANONICAL_DIM: u32 = 4;

/// Split of `Q^d` along one coordinate. `top` holds the vertices whose bit
/// `coordinate` is 1, `bottom` those where it is 0; both are ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeCut {
    pub dimension: u32,
    pub coordinate: u32,
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
}

impl CubeCut {
    pub fn new(d: u32, j: u32) -> Result<CubeCut> {
        if d == 0 || j >= d {
            return Err(Error::InvalidParameter(format!("no coordinate {j} in a {d}-cube")));
        }
        let bit = 1usize << j;
        let (top, bottom): (Vec<usize>, Vec<usize>) = (0..1usize << d).partition(|v| v & bit != 0);
        Ok(CubeCut { dimension: d, coordinate: j, top, bottom })
    }

    /// The vertex across the cut edge.
    #[inline]
    pub fn mirror(&self, v: usize) -> usize {
        v ^ (1 << self.coordinate)
    }

    pub fn is_top(&self, v: usize) -> bool {
        v & (1 << self.coordinate) != 0
    }

    /// Index of `v` inside its half, read as a vertex of `Q^(d-1)`.
    #[inline]
    pub fn to_local(&self, v: usize) -> usize {
        let j = self.coordinate;
        let low = v & ((1 << j) - 1);
        ((v >> (j + 1)) << j) | low
    }

    /// Inverse of [`CubeCut::to_local`] for the chosen half.
    #[inline]
    pub fn from_local(&self, local: usize, top: bool) -> usize {
        let j = self.coordinate;
        let low = local & ((1 << j) - 1);
        ((local >> j) << (j + 1)) | (usize::from(top) << j) | low
    }
}

/// A hypercube automorphism `v -> permute_bits(v) ^ mask`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeSymmetry {
    /// Bit `i` of the input moves to bit `perm[i]`.
    pub perm: Vec<u32>,
    pub mask: usize,
}

impl CubeSymmetry {
    pub fn apply(&self, v: usize) -> usize {
        let mut out = 0;
        for (i, &p) in self.perm.iter().enumerate() {
            out |= ((v >> i) & 1) << p;
        }
        out ^ self.mask
    }

    /// Image of a configuration: `(g.c)[g(v)] = c[v]`.
    pub fn act(&self, c: &Configuration) -> Configuration {
        let mut counts = vec![0; c.len()];
        for (v, &k) in c.counts().iter().enumerate() {
            counts[self.apply(v)] = k;
        }
        Configuration::new(counts)
    }
}

fn permutations(d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = (0..d).collect();
    heap_permute(&mut current, d as usize, &mut out);
    out.sort();
    out
}

fn heap_permute(a: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k {
        heap_permute(a, k - 1, out);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

/// All `d! * 2^d` automorphisms of `Q^d`.
pub fn cube_group(d: u32) -> Result<Vec<CubeSymmetry>> {
    if d > MAX_CANONICAL_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut group = Vec::new();
    for perm in permutations(d) {
        for mask in 0..1usize << d {
            group.push(CubeSymmetry { perm: perm.clone(), mask });
        }
    }
    Ok(group)
}

/// Inverse vertex maps, one per group element: `image[i] = c[inv[i]]`.
fn inverse_maps(d: u32) -> Result<&'static [Vec<usize>]> {
    static CACHE: [OnceLock<Vec<Vec<usize>>>; MAX_CANONICAL_DIM as usize + 1] =
        [const { OnceLock::new() }; MAX_CANONICAL_DIM as usize + 1];
    if d > MAX_CANONICAL_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    Ok(CACHE[d as usize].get_or_init(|| {
        let n = 1usize << d;
        cube_group(d)
            .expect("dimension checked")
            .iter()
            .map(|g| {
                let mut inv = vec![0; n];
                for v in 0..n {
                    inv[g.apply(v)] = v;
                }
                inv
            })
            .collect()
    }))
}

fn check_len(d: u32, c: &Configuration) -> Result<()> {
    if d > MAX_CANONICAL_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    if c.len() != 1 << d {
        return Err(Error::InvalidConfiguration(format!(
            "expected {} entries for a {d}-cube, got {}",
            1usize << d,
            c.len()
        )));
    }
    Ok(())
}

/// Orbit representative: the lexicographically greatest image of `c` under
/// the automorphism group, so the heaviest vertex lands on index 0.
pub fn cube_canonical(d: u32, c: &Configuration) -> Result<Configuration> {
    check_len(d, c)?;
    let counts = c.counts();
    let mut best = counts.to_vec();
    let mut image = vec![0; counts.len()];
    for inv in inverse_maps(d)? {
        for (slot, &src) in image.iter_mut().zip(inv) {
            *slot = counts[src];
        }
        if image > best {
            best.copy_from_slice(&image);
        }
    }
    Ok(Configuration::new(best))
}

/// True when no image of `c` is lexicographically greater than `c`.
pub fn is_cube_canonical(d: u32, counts: &[u32]) -> Result<bool> {
    if d > MAX_CANONICAL_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    if counts.len() != 1 << d {
        return Err(Error::InvalidConfiguration("length does not match the cube".into()));
    }
    'group: for inv in inverse_maps(d)? {
        for (i, &src) in inv.iter().enumerate() {
            let (img, own) = (counts[src], counts[i]);
            if img > own {
                return Ok(false);
            }
            if img < own {
                continue 'group;
            }
        }
    }
    Ok(true)
}
