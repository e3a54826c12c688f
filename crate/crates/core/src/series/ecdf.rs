//! Empirical CDF over sample pairs.
//!
//! Marginal queries are binary searches over the sorted coordinates. Joint
//! queries are 2-D dominance counts `#{i : x_i <= x and y_i <= y}` answered
//! in O(log n) by a wavelet tree over y-ranks laid out in x-sorted order.
//! Ties are counted with multiplicity; no jittering.

use super::{Axis, BivariateCdf, SamplePairs};

/// Step-function estimate of the joint CDF F(x, y) and both marginals,
/// immutable after construction and safe for concurrent readers.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    xs_sorted: Vec<f64>,
    ys_sorted: Vec<f64>,
    tree: WaveletTree,
    n: usize,
}

impl EmpiricalCdf {
    pub fn from_pairs(samples: &SamplePairs) -> Self {
        let n = samples.len();
        let xs = samples.xs();
        let ys = samples.ys();

        // Stable x-order so tied x's occupy a contiguous prefix.
        let mut x_order: Vec<u32> = (0..n as u32).collect();
        x_order.sort_by(|&a, &b| xs[a as usize].partial_cmp(&xs[b as usize]).unwrap());

        // Distinct y-ranks via stable sort; tied y's get consecutive ranks,
        // so `rank < upper_bound(ys_sorted, y)` is exactly `y_i <= y`.
        let mut y_order: Vec<u32> = (0..n as u32).collect();
        y_order.sort_by(|&a, &b| ys[a as usize].partial_cmp(&ys[b as usize]).unwrap());
        let mut y_rank = vec![0u32; n];
        for (rank, &idx) in y_order.iter().enumerate() {
            y_rank[idx as usize] = rank as u32;
        }

        let seq: Vec<u32> = x_order.iter().map(|&i| y_rank[i as usize]).collect();
        let xs_sorted = x_order.iter().map(|&i| xs[i as usize]).collect();
        let ys_sorted = y_order.iter().map(|&i| ys[i as usize]).collect();

        EmpiricalCdf {
            xs_sorted,
            ys_sorted,
            tree: WaveletTree::new(seq),
            n,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // SamplePairs guarantees n >= 2
    }
}

impl BivariateCdf for EmpiricalCdf {
    fn joint(&self, x: f64, y: f64) -> f64 {
        let k = upper_bound(&self.xs_sorted, x);
        let r = upper_bound(&self.ys_sorted, y);
        self.tree.count_lt(k, r as u32) as f64 / self.n as f64
    }

    fn marginal(&self, axis: Axis, v: f64) -> f64 {
        let sorted = match axis {
            Axis::X => &self.xs_sorted,
            Axis::Y => &self.ys_sorted,
        };
        upper_bound(sorted, v) as f64 / self.n as f64
    }
}

/// Number of elements <= v in an ascending slice.
fn upper_bound(sorted: &[f64], v: f64) -> usize {
    sorted.partition_point(|&e| e <= v)
}

/// Bit vector with O(1) rank support (cumulative popcount per 64-bit word).
#[derive(Debug, Clone)]
struct BitRank {
    words: Vec<u64>,
    prefix: Vec<u32>,
}

impl BitRank {
    fn from_bits(bits: &[bool]) -> Self {
        let n_words = bits.len().div_ceil(64);
        let mut words = vec![0u64; n_words];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1u64 << (i % 64);
            }
        }
        let mut prefix = Vec::with_capacity(n_words + 1);
        let mut acc = 0u32;
        prefix.push(0);
        for w in &words {
            acc += w.count_ones();
            prefix.push(acc);
        }
        BitRank { words, prefix }
    }

    /// Ones in positions [0, pos).
    fn rank1(&self, pos: usize) -> usize {
        let w = pos / 64;
        let b = pos % 64;
        let mut r = self.prefix[w] as usize;
        if b != 0 {
            r += (self.words[w] & ((1u64 << b) - 1)).count_ones() as usize;
        }
        r
    }

    fn rank0(&self, pos: usize) -> usize {
        pos - self.rank1(pos)
    }
}

/// Pointerless wavelet tree over a sequence of distinct values in [0, n).
///
/// Level `l` stores bit `bits-1-l` of every element; each node's segment is
/// stably re-partitioned in place (zeros left, ones right) when descending,
/// so a node occupying [s, e) at one level occupies the same positions split
/// at `s + zeros` on the next.
#[derive(Debug, Clone)]
struct WaveletTree {
    levels: Vec<BitRank>,
    n: usize,
    bits: u32,
}

impl WaveletTree {
    fn new(mut seq: Vec<u32>) -> Self {
        let n = seq.len();
        let max = n.saturating_sub(1) as u32;
        let bits = if max == 0 {
            1
        } else {
            32 - max.leading_zeros()
        };
        let mut level_bits: Vec<Vec<bool>> = vec![vec![false; n]; bits as usize];
        let mut scratch = vec![0u32; n];
        build_level(&mut seq, &mut scratch, 0, bits, &mut level_bits, 0);
        let levels = level_bits.iter().map(|b| BitRank::from_bits(b)).collect();
        WaveletTree { levels, n, bits }
    }

    /// #{pos < end : seq[pos] < bound}.
    fn count_lt(&self, end: usize, bound: u32) -> usize {
        if end == 0 || bound == 0 {
            return 0;
        }
        if bound as usize >= self.n {
            return end;
        }
        let mut acc = 0usize;
        let mut node_start = 0usize;
        let mut node_end = self.n;
        let mut within = end; // prefix length inside the current node
        for level in 0..self.bits {
            let br = &self.levels[level as usize];
            let bit = (bound >> (self.bits - 1 - level)) & 1;
            let zeros_node = br.rank0(node_end) - br.rank0(node_start);
            let zeros_pref = br.rank0(node_start + within) - br.rank0(node_start);
            if bit == 1 {
                // Every prefix element with a 0 here is below the bound.
                acc += zeros_pref;
                node_start += zeros_node;
                within -= zeros_pref;
            } else {
                node_end = node_start + zeros_node;
                within = zeros_pref;
            }
            if within == 0 {
                break;
            }
        }
        acc
    }
}

fn build_level(
    seq: &mut [u32],
    scratch: &mut [u32],
    level: u32,
    bits: u32,
    level_bits: &mut [Vec<bool>],
    offset: usize,
) {
    if level == bits || seq.is_empty() {
        return;
    }
    let shift = bits - 1 - level;
    let mut zeros = 0usize;
    for (i, &v) in seq.iter().enumerate() {
        let one = (v >> shift) & 1 == 1;
        level_bits[level as usize][offset + i] = one;
        if !one {
            zeros += 1;
        }
    }
    // Stable partition into scratch, then copy back.
    let mut lo = 0usize;
    let mut hi = zeros;
    for &v in seq.iter() {
        if (v >> shift) & 1 == 0 {
            scratch[lo] = v;
            lo += 1;
        } else {
            scratch[hi] = v;
            hi += 1;
        }
    }
    seq.copy_from_slice(&scratch[..seq.len()]);
    let (left, right) = seq.split_at_mut(zeros);
    build_level(left, scratch, level + 1, bits, level_bits, offset);
    build_level(right, scratch, level + 1, bits, level_bits, offset + zeros);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cdf_of(pts: &[(f64, f64)]) -> EmpiricalCdf {
        let xs = pts.iter().map(|p| p.0).collect();
        let ys = pts.iter().map(|p| p.1).collect();
        EmpiricalCdf::from_pairs(&SamplePairs::new(xs, ys).unwrap())
    }

    fn brute_joint(pts: &[(f64, f64)], x: f64, y: f64) -> f64 {
        pts.iter().filter(|p| p.0 <= x && p.1 <= y).count() as f64 / pts.len() as f64
    }

    #[test]
    fn wavelet_count_matches_brute_force_on_permutations() {
        use rand::seq::SliceRandom;
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(12345);
        for _ in 0..3000 {
            let n = rng.random_range(2usize..70);
            let mut seq: Vec<u32> = (0..n as u32).collect();
            seq.shuffle(&mut rng);
            let tree = WaveletTree::new(seq.clone());
            for _ in 0..12 {
                let end = rng.random_range(0..=n);
                let bound = rng.random_range(0..=n as u32 + 2);
                let got = tree.count_lt(end, bound);
                let want = seq[..end].iter().filter(|&&v| v < bound).count();
                assert_eq!(got, want, "n={n} end={end} bound={bound} seq={seq:?}");
            }
        }
    }

    #[test]
    fn two_point_sample_counts_exactly() {
        let cdf = cdf_of(&[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(cdf.joint(0.5, 0.5), 0.5);
        assert_eq!(cdf.joint(2.0, 2.0), 1.0);
        assert_eq!(cdf.joint(-1.0, -1.0), 0.0);
    }

    #[test]
    fn marginal_counts_exactly() {
        // x_i = y_i = i/10 for i = 1..10
        let vals: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let cdf = cdf_of(&vals.iter().map(|&v| (v, v)).collect::<Vec<_>>());
        assert_eq!(cdf.marginal(Axis::X, 0.5), 0.5);
        assert_eq!(cdf.marginal(Axis::Y, 0.05), 0.0);
        assert_eq!(cdf.marginal(Axis::Y, 1.0), 1.0);
    }

    #[test]
    fn weak_inequality_on_ties() {
        let cdf = cdf_of(&[(1.0, 1.0), (1.0, 1.0), (1.0, 2.0), (2.0, 1.0)]);
        assert_eq!(cdf.joint(1.0, 1.0), 0.5);
        assert_eq!(cdf.marginal(Axis::X, 1.0), 0.75);
    }

    #[test]
    fn saturates_at_extremes() {
        let cdf = cdf_of(&[(0.0, 3.0), (1.0, 2.0), (-4.0, 0.5)]);
        assert_eq!(cdf.joint(1.0, 3.0), 1.0);
        assert_eq!(cdf.joint(f64::INFINITY, f64::INFINITY), 1.0);
        assert_eq!(cdf.joint(-5.0, 0.0), 0.0);
    }

    proptest! {
        #[test]
        fn joint_matches_brute_force(
            pts in prop::collection::vec((-5i32..5, -5i32..5), 2..120),
            queries in prop::collection::vec((-6i32..6, -6i32..6), 1..40),
        ) {
            // Integer coordinates force plenty of ties.
            let pts: Vec<(f64, f64)> =
                pts.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
            let cdf = cdf_of(&pts);
            for &(qx, qy) in &queries {
                let (qx, qy) = (qx as f64 + 0.5, qy as f64 + 0.5);
                prop_assert_eq!(cdf.joint(qx, qy), brute_joint(&pts, qx, qy));
                let bx = pts.iter().filter(|p| p.0 <= qx).count() as f64 / pts.len() as f64;
                prop_assert_eq!(cdf.marginal(Axis::X, qx), bx);
            }
        }

        #[test]
        fn monotone_and_rectangle_mass_nonnegative(
            pts in prop::collection::vec((-50i32..50, -50i32..50), 2..80),
            rect in (-60i32..60, -60i32..60, 0i32..30, 0i32..30),
        ) {
            let pts: Vec<(f64, f64)> =
                pts.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
            let cdf = cdf_of(&pts);
            let (a, b, w, h) = rect;
            let (a, b) = (a as f64, b as f64);
            let (c, d) = (a + w as f64, b + h as f64);
            prop_assert!(cdf.joint(a, b) <= cdf.joint(c, d));
            // Each query is an exactly-counted integer over n; the alternating
            // sum can dip below zero only by division rounding (~4 ulp).
            let mass = cdf.joint(c, d) - cdf.joint(a, d) - cdf.joint(c, b) + cdf.joint(a, b);
            prop_assert!(mass >= -1e-15);
        }

        #[test]
        fn joint_at_componentwise_max_is_one(
            pts in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..50),
        ) {
            let cdf = cdf_of(&pts);
            let mx = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            let my = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(cdf.joint(mx, my), 1.0);
        }

        #[test]
        fn marginal_is_joint_with_other_axis_saturated(
            pts in prop::collection::vec((-9i32..9, -9i32..9), 2..60),
            q in -10i32..10,
        ) {
            let pts: Vec<(f64, f64)> =
                pts.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
            let cdf = cdf_of(&pts);
            let q = q as f64;
            prop_assert_eq!(cdf.marginal(Axis::X, q), cdf.joint(q, f64::INFINITY));
            prop_assert_eq!(cdf.marginal(Axis::Y, q), cdf.joint(f64::INFINITY, q));
        }
    }
}
