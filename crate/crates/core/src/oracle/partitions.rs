//! Set partitions of a small user set under the one-user-per-cell rule, and
//! the counts needed to cross-check the exhaustive search.

/// Bitmask of users `0..n`.
pub type Mask = u32;

/// True when no two users in `block` share a cell.
pub fn block_admissible(block: Mask, hap_of: &[usize]) -> bool {
    let mut seen: u64 = 0;
    let mut b = block;
    while b != 0 {
        let u = b.trailing_zeros() as usize;
        let bit = 1u64 << hap_of[u];
        if seen & bit != 0 {
            return false;
        }
        seen |= bit;
        b &= b - 1;
    }
    true
}

/// Admissible non-empty subsets of `set`, in increasing mask order.
pub fn admissible_blocks(set: Mask, hap_of: &[usize]) -> Vec<Mask> {
    let mut out = Vec::new();
    let mut sub = set;
    while sub != 0 {
        if block_admissible(sub, hap_of) {
            out.push(sub);
        }
        sub = (sub - 1) & set;
    }
    out.reverse();
    out
}

pub fn members_of(block: Mask) -> Vec<usize> {
    let mut out = Vec::with_capacity(block.count_ones() as usize);
    let mut b = block;
    while b != 0 {
        out.push(b.trailing_zeros() as usize);
        b &= b - 1;
    }
    out
}

/// Every admissible partition of all users, each as a list of blocks sorted
/// by lowest member. The block holding the lowest remaining user is chosen
/// first, so each partition appears once.
pub fn admissible_partitions(hap_of: &[usize]) -> Vec<Vec<Mask>> {
    fn rec(rest: Mask, hap_of: &[usize], cur: &mut Vec<Mask>, out: &mut Vec<Vec<Mask>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        let low = rest & rest.wrapping_neg();
        for b in admissible_blocks(rest & !low, hap_of) {
            let block = b | low;
            if block_admissible(block, hap_of) {
                cur.push(block);
                rec(rest & !block, hap_of, cur, out);
                cur.pop();
            }
        }
        if block_admissible(low, hap_of) {
            cur.push(low);
            rec(rest & !low, hap_of, cur, out);
            cur.pop();
        }
    }
    let full = full_mask(hap_of.len());
    let mut out = Vec::new();
    rec(full, hap_of, &mut Vec::new(), &mut out);
    out
}

pub fn full_mask(n: usize) -> Mask {
    assert!(n < 32, "masks hold at most 31 users");
    ((1u64 << n) - 1) as Mask
}

/// `counts[z]` = number of admissible partitions with exactly `z` blocks,
/// by dynamic programming over subsets (lowest user anchors its block).
pub fn partition_counts_by_blocks(hap_of: &[usize]) -> Vec<u128> {
    let n = hap_of.len();
    let full = full_mask(n);
    // table[mask][z]
    let mut table = vec![vec![0u128; n + 1]; full as usize + 1];
    table[0][0] = 1;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask & !low;
        let mut sub = rest;
        loop {
            let block = sub | low;
            if block_admissible(block, hap_of) {
                let remain = (mask & !block) as usize;
                for z in 1..=n {
                    table[mask as usize][z] += table[remain][z - 1];
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    table[full as usize].clone()
}

/// Number of block orderings over all admissible partitions:
/// `sum_z counts[z] * z!`.
pub fn ordered_count(hap_of: &[usize]) -> u128 {
    partition_counts_by_blocks(hap_of)
        .iter()
        .enumerate()
        .map(|(z, c)| c * factorial(z))
        .sum()
}

/// Number of ordered admissible partitions of every subset, indexed by mask.
pub(crate) fn ordered_count_table(hap_of: &[usize]) -> Vec<u128> {
    let full = full_mask(hap_of.len());
    let mut f = vec![0u128; full as usize + 1];
    f[0] = 1;
    for mask in 1..=full {
        let mut sub = mask;
        let mut acc = 0;
        while sub != 0 {
            if block_admissible(sub, hap_of) {
                acc += f[(mask & !sub) as usize];
            }
            sub = (sub - 1) & mask;
        }
        f[mask as usize] = acc;
    }
    f
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Bell numbers by `B_{j} = sum_z C(j-1, z) B_z`.
pub fn bell_number(n: usize) -> u128 {
    let mut bell = vec![1u128];
    for j in 1..=n {
        let b = (0..j).map(|z| binomial(j - 1, z) * bell[z]).sum();
        bell.push(b);
    }
    bell[n]
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i as u128 + 1);
    }
    r
}

/// Stirling numbers of the second kind, `S(n, z)`, for the unrestricted
/// block-count check.
pub fn stirling2(n: usize, z: usize) -> u128 {
    let mut s = vec![vec![0u128; n + 1]; n + 1];
    s[0][0] = 1;
    for i in 1..=n {
        for k in 1..=i {
            s[i][k] = k as u128 * s[i - 1][k] + s[i - 1][k - 1];
        }
    }
    if z > n {
        0
    } else {
        s[n][z]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_sequence() {
        let want = [1u128, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(bell_number(n), *w);
        }
    }

    #[test]
    fn all_distinct_cells_is_unrestricted() {
        for n in 1..=7 {
            let hap_of: Vec<usize> = (0..n).collect();
            assert_eq!(admissible_partitions(&hap_of).len() as u128, bell_number(n));
            let by_z = partition_counts_by_blocks(&hap_of);
            for (z, c) in by_z.iter().enumerate() {
                assert_eq!(*c, stirling2(n, z));
            }
        }
        // ordered Bell (Fubini) numbers
        let fubini = [1u128, 1, 3, 13, 75, 541, 4683, 47293];
        for (n, w) in fubini.iter().enumerate().skip(1) {
            let hap_of: Vec<usize> = (0..n).collect();
            assert_eq!(ordered_count(&hap_of), *w);
            assert_eq!(*ordered_count_table(&hap_of).last().unwrap(), *w);
        }
    }

    #[test]
    fn single_cell_forces_singletons() {
        let hap_of = vec![0; 4];
        let parts = admissible_partitions(&hap_of);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].len(), 4);
        assert_eq!(ordered_count(&hap_of), 24);
    }

    #[test]
    fn two_users_two_cells() {
        assert_eq!(admissible_partitions(&[0, 1]).len(), 2);
        assert_eq!(ordered_count(&[0, 1]), 3);
        assert_eq!(ordered_count(&[0, 0]), 2);
    }

    #[test]
    fn enumeration_matches_dp() {
        for hap_of in [vec![0, 0, 1, 1, 2], vec![0, 1, 0, 1, 0, 2, 2], vec![0, 0, 0, 1, 1, 1]] {
            let parts = admissible_partitions(&hap_of);
            let by_z = partition_counts_by_blocks(&hap_of);
            assert_eq!(parts.len() as u128, by_z.iter().sum::<u128>());
            let enumerated: u128 = parts.iter().map(|p| factorial(p.len())).sum();
            assert_eq!(enumerated, ordered_count(&hap_of));
            for p in &parts {
                let union = p.iter().fold(0, |a, b| a | b);
                assert_eq!(union, full_mask(hap_of.len()));
                assert!(p.iter().all(|&b| block_admissible(b, &hap_of)));
            }
        }
    }
}
