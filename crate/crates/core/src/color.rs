use std::fmt;

/// Largest supported number of primary colors.
pub const MAX_COLORS: usize = 16;

/// A subset of the primary colors `1..=k`.
///
/// Color `c` is stored in bit `c - 1`. The empty set only shows up as the
/// shared color of two points with disjoint memberships.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ColorSet(u16);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    pub fn from_bits(bits: u16) -> Self {
        ColorSet(bits)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    /// Set containing the single primary color `c` (1-based).
    pub fn single(c: usize) -> Self {
        debug_assert!((1..=MAX_COLORS).contains(&c));
        ColorSet(1 << (c - 1))
    }

    /// All colors `1..=k`.
    pub fn full(k: usize) -> Self {
        debug_assert!(k <= MAX_COLORS);
        if k == MAX_COLORS {
            ColorSet(u16::MAX)
        } else {
            ColorSet((1u16 << k) - 1)
        }
    }

    pub fn from_colors<I: IntoIterator<Item = usize>>(colors: I) -> Self {
        colors
            .into_iter()
            .fold(ColorSet::EMPTY, |acc, c| acc.union(ColorSet::single(c)))
    }

    pub fn contains(self, c: usize) -> bool {
        (1..=MAX_COLORS).contains(&c) && self.0 & (1 << (c - 1)) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn intersection(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 & other.0)
    }

    pub fn union(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: ColorSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_multichromatic(self) -> bool {
        self.len() > 1
    }

    /// Largest color index present, 0 for the empty set.
    pub fn max_color(self) -> usize {
        16 - self.0.leading_zeros() as usize
    }

    /// Colors in increasing order, 1-based.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (1..=MAX_COLORS).filter(move |&c| self.contains(c))
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}
