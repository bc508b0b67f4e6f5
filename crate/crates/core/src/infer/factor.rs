/// A non-negative table over an ordered scope of discrete variables.
///
/// Entries are stored row-major (last scope variable fastest). The represented
/// function is `exp(log_scale) * table`, which lets sum-product code keep the
/// table near unit mass without losing the magnitude.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    scope: Vec<usize>,
    cards: Vec<usize>,
    table: Vec<f64>,
    log_scale: f64,
}

impl Factor {
    pub fn new(scope: Vec<usize>, cards: Vec<usize>, table: Vec<f64>) -> Self {
        assert_eq!(scope.len(), cards.len(), "scope and cardinalities differ in length");
        assert_eq!(
            table.len(),
            cards.iter().product::<usize>(),
            "table size does not match scope"
        );
        debug_assert!(table.iter().all(|&v| v >= 0.0), "negative factor entry");
        Factor {
            scope,
            cards,
            table,
            log_scale: 0.0,
        }
    }

    pub fn ones(scope: Vec<usize>, cards: Vec<usize>) -> Self {
        let size = cards.iter().product();
        Factor::new(scope, cards, vec![1.0; size])
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut [f64] {
        &mut self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn add_log_scale(&mut self, delta: f64) {
        self.log_scale += delta;
    }

    /// Sum of the stored table (without the scale).
    pub fn mass(&self) -> f64 {
        self.table.iter().sum()
    }

    /// Log of the total represented mass.
    pub fn log_total(&self) -> f64 {
        self.mass().ln() + self.log_scale
    }

    /// Rescales the table to unit mass, moving the mass into `log_scale`.
    /// Returns the removed mass; a zero-mass factor is left untouched.
    pub fn normalize(&mut self) -> f64 {
        let mass = self.mass();
        if mass > 0.0 && mass.is_finite() {
            let inv = 1.0 / mass;
            self.table.iter_mut().for_each(|v| *v *= inv);
            self.log_scale += mass.ln();
        }
        mass
    }

    /// For each entry of this factor, the index of the matching entry of a factor over
    /// `target` (which must be a subset of this scope, in any order).
    pub fn projection_map(&self, target: &[usize]) -> Vec<u32> {
        let mut target_strides = vec![0usize; target.len()];
        let mut stride = 1;
        for i in (0..target.len()).rev() {
            target_strides[i] = stride;
            let pos = self
                .scope
                .iter()
                .position(|&v| v == target[i])
                .expect("projection target must be a subset of the scope");
            stride *= self.cards[pos];
        }
        let strides: Vec<usize> = self
            .scope
            .iter()
            .map(|v| target.iter().position(|t| t == v).map_or(0, |i| target_strides[i]))
            .collect();
        odometer_map(&self.cards, &strides)
    }

    /// Sums out every variable not in `target`; the result is ordered like `target`.
    pub fn marginalize_onto(&self, target: &[usize]) -> Factor {
        let cards: Vec<usize> = target
            .iter()
            .map(|t| self.cards[self.scope.iter().position(|v| v == t).expect("target within scope")])
            .collect();
        let mut out = Factor::new(target.to_vec(), cards.clone(), vec![0.0; cards.iter().product()]);
        for (v, &i) in self.table.iter().zip(&self.projection_map(target)) {
            out.table[i as usize] += v;
        }
        out.log_scale = self.log_scale;
        out
    }

    /// Pointwise product over the union scope (this scope first, then new variables of `other`).
    pub fn product(&self, other: &Factor) -> Factor {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (&v, &c) in other.scope.iter().zip(&other.cards) {
            if !scope.contains(&v) {
                scope.push(v);
                cards.push(c);
            }
        }
        let mut out = Factor::ones(scope, cards);
        out.multiply_in(self);
        out.multiply_in(other);
        out
    }

    /// Multiplies a factor whose scope is a subset of this one into this factor.
    pub fn multiply_in(&mut self, other: &Factor) {
        let map = self.projection_map(&other.scope);
        self.multiply_mapped(&other.table, &map);
        self.log_scale += other.log_scale;
    }

    /// `table[e] *= values[map[e]]`.
    pub(crate) fn multiply_mapped(&mut self, values: &[f64], map: &[u32]) {
        for (t, &i) in self.table.iter_mut().zip(map) {
            *t *= values[i as usize];
        }
    }

    /// Zeroes every entry inconsistent with `var = value`; no-op if `var` is out of scope.
    pub fn reduce(&mut self, var: usize, value: usize) {
        let Some(pos) = self.scope.iter().position(|&v| v == var) else {
            return;
        };
        let stride: usize = self.cards[pos + 1..].iter().product();
        let card = self.cards[pos];
        for (e, t) in self.table.iter_mut().enumerate() {
            if (e / stride) % card != value {
                *t = 0.0;
            }
        }
    }
}

/// Enumerates a row-major table with the given cardinalities and returns, for each
/// entry, `Σ digit_i * strides[i]`.
pub(crate) fn odometer_map(cards: &[usize], strides: &[usize]) -> Vec<u32> {
    let size: usize = cards.iter().product();
    assert!(size <= u32::MAX as usize, "table too large");
    let mut out = Vec::with_capacity(size);
    let mut digits = vec![0usize; cards.len()];
    let mut index = 0usize;
    for _ in 0..size {
        out.push(index as u32);
        for i in (0..cards.len()).rev() {
            digits[i] += 1;
            index += strides[i];
            if digits[i] < cards[i] {
                break;
            }
            index -= strides[i] * cards[i];
            digits[i] = 0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Factor {
        // A in {0,1}, B in {0,1,2}
        Factor::new(vec![0, 1], vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    }

    #[test]
    fn marginalize_and_reorder() {
        let f = ab();
        assert_eq!(f.marginalize_onto(&[0]).table(), &[6.0, 15.0]);
        assert_eq!(f.marginalize_onto(&[1]).table(), &[5.0, 7.0, 9.0]);
        assert_eq!(f.marginalize_onto(&[1, 0]).table(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        assert_eq!(f.marginalize_onto(&[]).table(), &[21.0]);
    }

    #[test]
    fn product_matches_pointwise_definition() {
        let f = ab();
        let g = Factor::new(vec![1, 2], vec![3, 2], vec![1.0, 0.5, 2.0, 0.0, 1.0, 3.0]);
        let h = f.product(&g);
        assert_eq!(h.scope(), &[0, 1, 2]);
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    let expected = f.table()[a * 3 + b] * g.table()[b * 2 + c];
                    assert_eq!(h.table()[(a * 3 + b) * 2 + c], expected);
                }
            }
        }
    }

    #[test]
    fn normalize_preserves_total() {
        let mut f = ab();
        let before = f.log_total();
        assert_eq!(f.normalize(), 21.0);
        assert!((f.mass() - 1.0).abs() < 1e-15);
        assert!((f.log_total() - before).abs() < 1e-14);
    }

    #[test]
    fn reduce_zeroes_other_values() {
        let mut f = ab();
        f.reduce(1, 2);
        assert_eq!(f.table(), &[0.0, 0.0, 3.0, 0.0, 0.0, 6.0]);
        f.reduce(7, 0);
        assert_eq!(f.mass(), 9.0);
    }
}
