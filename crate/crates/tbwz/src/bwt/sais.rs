//! Linear-time suffix array construction by induced sorting (SA-IS).
//!
//! Input must end with a unique, strictly smallest symbol. Values must be
//! less than `sigma`. Positions and output are 0-based.

const EMPTY: u32 = u32::MAX;

pub(crate) fn suffix_array(s: &[u32], sigma: usize) -> Vec<u32> {
    let mut sa = vec![EMPTY; s.len()];
    sais(s, sigma, &mut sa);
    sa
}

fn sais(s: &[u32], sigma: usize, sa: &mut [u32]) {
    let n = s.len();
    debug_assert_eq!(n, sa.len());
    match n {
        0 => return,
        1 => {
            sa[0] = 0;
            return;
        }
        _ => {}
    }

    // suffix types: true = S (smaller than successor), false = L
    let mut is_s = vec![false; n];
    is_s[n - 1] = true;
    for i in (0..n - 1).rev() {
        is_s[i] = s[i] < s[i + 1] || (s[i] == s[i + 1] && is_s[i + 1]);
    }
    let is_lms = |i: usize| i > 0 && is_s[i] && !is_s[i - 1];

    // bucket boundaries: bucket[c] = start of bucket c, bucket[c + 1] = end
    let mut bucket = vec![0u32; sigma + 1];
    for &c in s {
        bucket[c as usize + 1] += 1;
    }
    for c in 0..sigma {
        bucket[c + 1] += bucket[c];
    }

    // pass 1: seed LMS positions at bucket tails (text order), induce, which
    // leaves LMS entries in sorted LMS-substring order
    sa.fill(EMPTY);
    {
        let mut tails = bucket[1..=sigma].to_vec();
        for i in (1..n).rev() {
            if is_lms(i) {
                let c = s[i] as usize;
                tails[c] -= 1;
                sa[tails[c] as usize] = i as u32;
            }
        }
    }
    induce(s, sigma, &bucket, &is_s, sa);

    // collect sorted LMS positions, name their substrings
    let lms_text_order: Vec<u32> = (1..n).filter(|&i| is_lms(i)).map(|i| i as u32).collect();
    let m = lms_text_order.len();
    if m == 0 {
        return; // only possible for n == 1, handled above; keeps the compiler happy
    }
    // rank of an LMS position among LMS positions in text order
    let mut lms_rank = vec![0u32; n];
    for (k, &p) in lms_text_order.iter().enumerate() {
        lms_rank[p as usize] = k as u32;
    }
    // end of the LMS substring starting at lms_text_order[k]
    let lms_end = |k: usize| -> usize {
        if k + 1 < m {
            lms_text_order[k + 1] as usize
        } else {
            n - 1
        }
    };

    let mut names = vec![EMPTY; m];
    let mut name_count = 0u32;
    let mut prev: Option<usize> = None; // previous LMS rank in sorted order
    for &j in sa.iter() {
        let j = j as usize;
        if j == EMPTY as usize || !is_lms(j) {
            continue;
        }
        let k = lms_rank[j] as usize;
        let equal = match prev {
            None => false,
            Some(pk) => {
                let (a0, a1) = (lms_text_order[pk] as usize, lms_end(pk));
                let (b0, b1) = (lms_text_order[k] as usize, lms_end(k));
                a1 - a0 == b1 - b0 && s[a0..=a1] == s[b0..=b1]
            }
        };
        if !equal {
            name_count += 1;
        }
        names[k] = name_count - 1;
        prev = Some(k);
    }

    // order the LMS suffixes
    let lms_sorted: Vec<u32> = if name_count as usize == m {
        // all names distinct: the substring order is the suffix order
        let mut order = vec![0u32; m];
        for (k, &nm) in names.iter().enumerate() {
            order[nm as usize] = lms_text_order[k];
        }
        order
    } else {
        let reduced: Vec<u32> = names;
        let mut sub_sa = vec![EMPTY; m];
        sais(&reduced, name_count as usize, &mut sub_sa);
        sub_sa
            .iter()
            .map(|&k| lms_text_order[k as usize])
            .collect()
    };

    // pass 2: seed the *sorted* LMS suffixes at bucket tails, induce the rest
    sa.fill(EMPTY);
    {
        let mut tails = bucket[1..=sigma].to_vec();
        for &p in lms_sorted.iter().rev() {
            let c = s[p as usize] as usize;
            tails[c] -= 1;
            sa[tails[c] as usize] = p;
        }
    }
    induce(s, sigma, &bucket, &is_s, sa);
}

/// One round of induced sorting: L-type left-to-right from bucket heads,
/// then S-type right-to-left from bucket tails.
fn induce(s: &[u32], sigma: usize, bucket: &[u32], is_s: &[bool], sa: &mut [u32]) {
    let n = s.len();
    let mut heads = bucket[..sigma].to_vec();
    for i in 0..n {
        let j = sa[i];
        if j != EMPTY && j > 0 {
            let p = (j - 1) as usize;
            if !is_s[p] {
                let c = s[p] as usize;
                sa[heads[c] as usize] = j - 1;
                heads[c] += 1;
            }
        }
    }
    let mut tails = bucket[1..=sigma].to_vec();
    for i in (0..n).rev() {
        let j = sa[i];
        if j != EMPTY && j > 0 {
            let p = (j - 1) as usize;
            if is_s[p] {
                let c = s[p] as usize;
                tails[c] -= 1;
                sa[tails[c] as usize] = j - 1;
            }
        }
    }
}
