//! Seeded sampling of vertices, pairs and tuples.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metric_core::DomainSample;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct vertices (all of them when `count >= n`), sorted.
pub fn sample_vertices<R: Rng>(n: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let mut v = if count >= n {
        (0..n).collect()
    } else {
        index::sample(rng, n, count).into_vec()
    };
    v.sort_unstable();
    v
}

/// About `count` distinct-endpoint pairs, drawn as `~sqrt(count)` sources times
/// `~sqrt(count)` targets so that shortest-path trees can be shared.
pub fn sample_pairs<R: Rng>(n: usize, count: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if n < 2 || count == 0 {
        return Vec::new();
    }
    let sources = ((count as f64).sqrt().ceil() as usize).clamp(1, n);
    let per = count.div_ceil(sources);
    let mut out = Vec::with_capacity(sources * per);
    for s in sample_vertices(n, sources, rng) {
        let mut taken = 0;
        while out.len() < count && taken < per {
            let t = rng.gen_range(0..n);
            if t != s {
                out.push((s, t));
                taken += 1;
            }
        }
    }
    out
}

/// `count` tuples of `K` indices into `0..n` (entries may repeat).
pub fn sample_tuples<const K: usize, R: Rng>(n: usize, count: usize, rng: &mut R) -> Vec<[usize; K]> {
    (0..count)
        .map(|_| std::array::from_fn(|_| rng.gen_range(0..n)))
        .collect()
}

/// `count` tuples of `K` pairwise-distinct indices into `0..n`.
pub fn sample_distinct_tuples<const K: usize, R: Rng>(n: usize, count: usize, rng: &mut R) -> Vec<[usize; K]> {
    assert!(n >= K, "need at least {K} points");
    (0..count)
        .map(|_| {
            let idx = index::sample(rng, n, K);
            std::array::from_fn(|k| idx.index(k))
        })
        .collect()
}

/// Pool of vertices chosen from continuous coordinates (uniform in the shape,
/// at depth `>= min_depth`) and snapped to the nearest vertex. The same seed
/// gives nearby pools on grids of different resolution.
///
/// Domains without a shape fall back to [`sample_vertices`].
pub fn continuous_pool<R: Rng>(d: &DomainSample, count: usize, min_depth: f64, rng: &mut R) -> Vec<usize> {
    let Some(spec) = d.shape() else {
        return sample_vertices(d.num_points(), count, rng);
    };
    let (lo, hi) = spec.shape.bounding_box();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let p = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
        if !spec.shape.contains(p) || d.boundary_distance_at(p) < min_depth {
            continue;
        }
        let v = d.nearest_vertex(p);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}
