//! Dense bit matrix used for the reflexive-transitive closure of the order.

#[derive(Clone, Debug)]
pub(crate) struct BitMatrix {
    rows: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix {
            rows,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows);
        self.bits[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows);
        self.bits[r * self.words_per_row + c / 64] |= 1 << (c % 64);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// row(dst) |= row(src)
    pub fn or_row_into(&mut self, src: usize, dst: usize) {
        let w = self.words_per_row;
        let (a, b) = (src * w, dst * w);
        for k in 0..w {
            let v = self.bits[a + k];
            self.bits[b + k] |= v;
        }
    }

    /// Smallest index set in both rows, if any.
    pub fn first_common(&self, r1: usize, r2: usize) -> Option<usize> {
        let (a, b) = (self.row(r1), self.row(r2));
        for k in 0..self.words_per_row {
            let w = a[k] & b[k];
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices set in row `r`, ascending.
    pub fn iter_row(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(r);
        row.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }

    pub fn transpose(&self, cols: usize) -> BitMatrix {
        let mut t = BitMatrix::new(cols, self.rows);
        for r in 0..self.rows {
            for c in self.iter_row(r) {
                t.set(c, r);
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_iterate() {
        let mut m = BitMatrix::new(3, 130);
        m.set(1, 0);
        m.set(1, 64);
        m.set(1, 129);
        assert!(m.get(1, 64));
        assert!(!m.get(0, 64));
        assert_eq!(m.iter_row(1).collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(m.first_common(0, 1), None);
        m.set(0, 129);
        assert_eq!(m.first_common(0, 1), Some(129));
    }

    #[test]
    fn transpose_inverts_edges() {
        let mut m = BitMatrix::new(2, 3);
        m.set(0, 2);
        m.set(1, 1);
        let t = m.transpose(3);
        assert!(t.get(2, 0));
        assert!(t.get(1, 1));
        assert!(!t.get(0, 0));
    }
}
