use crate::error::{invalid_arg, Result};

/// Williams balanced Latin square over symbols `0..n`.
///
/// Even `n` gives `n` rows; odd `n` appends each row reversed for `2n` rows.
/// Each symbol appears once per row and equally often per column, and every
/// ordered pair of distinct symbols is adjacent equally often.
pub fn balanced_latin_square(n: usize) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(invalid_arg(format!("latin square needs n >= 2, got {n}")));
    }
    // 0, 1, n-1, 2, n-2, ...
    let first: Vec<usize> = (0..n)
        .map(|j| if j % 2 == 1 { j.div_ceil(2) } else { (n - j / 2) % n })
        .collect();
    let mut rows: Vec<Vec<usize>> = (0..n)
        .map(|i| first.iter().map(|&s| (s + i) % n).collect())
        .collect();
    if n % 2 == 1 {
        let reversed: Vec<Vec<usize>> = rows
            .iter()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        rows.extend(reversed);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_squares() {
        assert_eq!(balanced_latin_square(2).unwrap(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(
            balanced_latin_square(4).unwrap(),
            vec![vec![0, 1, 3, 2], vec![1, 2, 0, 3], vec![2, 3, 1, 0], vec![3, 0, 2, 1]]
        );
        assert_eq!(balanced_latin_square(3).unwrap().len(), 6);
        assert!(balanced_latin_square(1).is_err());
        assert!(balanced_latin_square(0).is_err());
    }

    #[test]
    fn balance_by_brute_force() {
        for n in 2..=12 {
            let sq = balanced_latin_square(n).unwrap();
            let rows = sq.len();
            let mut pairs = vec![vec![0usize; n]; n];
            for row in &sq {
                let mut seen = row.clone();
                seen.sort_unstable();
                assert_eq!(seen, (0..n).collect::<Vec<_>>());
                for w in row.windows(2) {
                    pairs[w[0]][w[1]] += 1;
                }
            }
            for col in 0..n {
                let mut count = vec![0; n];
                for row in &sq {
                    count[row[col]] += 1;
                }
                assert!(count.iter().all(|&c| c == rows / n));
            }
            let expected = if n % 2 == 0 { 1 } else { 2 };
            for (a, row) in pairs.iter().enumerate() {
                for (b, &c) in row.iter().enumerate() {
                    assert_eq!(c, if a == b { 0 } else { expected }, "n={n} pair {a}->{b}");
                }
            }
        }
    }
}
