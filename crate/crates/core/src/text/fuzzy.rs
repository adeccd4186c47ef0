/// Minimum normalized similarity for a fuzzy gazetteer hit.
pub const FUZZY_THRESHOLD: f64 = 0.8;

/// Character-level edit distance (insert, delete, substitute; unit costs).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - distance / max(len)`, in `[0, 1]`. Two empty strings are identical.
pub fn similarity(a: &str, b: &str) -> f64 {
    let max = a.chars().count().max(b.chars().count());
    if max == 0 {
        return 1.0;
    }
    (max - levenshtein(a, b)) as f64 / max as f64
}

/// Exact rational test of `similarity >= 0.8`, free of float rounding.
pub fn within_threshold(a: &str, b: &str) -> bool {
    let max = a.chars().count().max(b.chars().count());
    10 * (max - levenshtein(a, b).min(max)) >= 8 * max
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_computed() {
        assert_eq!(levenshtein("roms", "rooms"), 1);
        assert_eq!(similarity("roms", "rooms"), 0.8);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(similarity("", ""), 1.0);
        assert!(within_threshold("roms", "rooms"));
        assert!(!within_threshold("car", "cars"));
    }

    proptest! {
        #[test]
        fn matches_reference(a in "[a-z]{0,10}", b in "[a-z]{0,10}") {
            prop_assert_eq!(levenshtein(&a, &b), strsim::levenshtein(&a, &b));
        }
    }
}
