//! Finite strict partial orders on `0..n`.
//!
//! A [`Poset`] stores its strict relation as a dense bit matrix that is kept
//! transitively closed at all times. Every operation returns a fresh value;
//! element indices are always contiguous and, after removal or composition,
//! follow the original order of the operands.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("element {index} out of range for a poset with {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("relations force {a} < {b} and {b} < {a}")]
    Cycle { a: usize, b: usize },
    #[error("element {0} is not maximal")]
    NotMaximal(usize),
    #[error("element {0} is not minimal")]
    NotMinimal(usize),
    #[error("elements {0} and {1} are already comparable")]
    AlreadyComparable(usize, usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A finite strict partial order, transitively closed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    n: usize,
    words: usize,
    // Row `i` holds bit `j` iff `i < j`.
    above: Vec<u64>,
}

impl Poset {
    fn blank(n: usize) -> Self {
        let words = words_for(n);
        Poset {
            n,
            words,
            above: vec![0; n * words],
        }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.above[i * self.words..(i + 1) * self.words]
    }

    fn set(&mut self, i: usize, j: usize) {
        self.above[i * self.words + j / WORD] |= 1 << (j % WORD);
    }

    /// Warshall closure over bit rows, then validates irreflexivity.
    fn close(mut self) -> Result<Self, PosetError> {
        let w = self.words;
        for k in 0..self.n {
            let row_k: Vec<u64> = self.row(k).to_vec();
            for i in 0..self.n {
                if self.lt(i, k) {
                    let row_i = &mut self.above[i * w..(i + 1) * w];
                    for (a, b) in row_i.iter_mut().zip(&row_k) {
                        *a |= *b;
                    }
                }
            }
        }
        for i in 0..self.n {
            if self.lt(i, i) {
                let j = (0..self.n)
                    .find(|&j| j != i && self.lt(i, j) && self.lt(j, i))
                    .unwrap_or(i);
                return Err(PosetError::Cycle {
                    a: i.min(j),
                    b: i.max(j),
                });
            }
        }
        Ok(self)
    }

    pub fn empty() -> Self {
        Self::blank(0)
    }

    pub fn singleton() -> Self {
        Self::blank(1)
    }

    pub fn antichain(n: usize) -> Self {
        Self::blank(n)
    }

    /// The chain `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Self {
        let mut p = Self::blank(n);
        for i in 0..n {
            for j in i + 1..n {
                p.set(i, j);
            }
        }
        p
    }

    /// Builds the transitive closure of `covers`, where `(i, j)` means `i < j`.
    pub fn from_cover_relations(n: usize, covers: &[(usize, usize)]) -> Result<Self, PosetError> {
        let mut p = Self::blank(n);
        for &(i, j) in covers {
            for index in [i, j] {
                if index >= n {
                    return Err(PosetError::IndexOutOfRange { index, len: n });
                }
            }
            if i == j {
                return Err(PosetError::Cycle { a: i, b: j });
            }
            p.set(i, j);
        }
        p.close()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `i < j` in the poset. Panics if either index is out of range.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n, "element out of range");
        self.above[i * self.words + j / WORD] >> (j % WORD) & 1 == 1
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        i == j || self.lt(i, j) || self.lt(j, i)
    }

    fn check(&self, index: usize) -> Result<(), PosetError> {
        if index < self.n {
            Ok(())
        } else {
            Err(PosetError::IndexOutOfRange { index, len: self.n })
        }
    }

    /// All strict pairs `(i, j)` with `i < j`, in row-major order.
    pub fn relations(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.above_iter(i).map(move |j| (i, j)))
    }

    pub fn relation_count(&self) -> usize {
        self.above.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Elements strictly above `i`.
    pub fn above_iter(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(i);
        (0..self.n).filter(move |&j| row[j / WORD] >> (j % WORD) & 1 == 1)
    }

    /// Elements strictly below `i`.
    pub fn below_iter(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.lt(j, i))
    }

    /// Bitmask of the elements strictly below `i`; requires `len() <= 64`.
    pub fn below_mask(&self, i: usize) -> u64 {
        assert!(self.n <= WORD, "below_mask needs at most 64 elements");
        (0..self.n).filter(|&j| self.lt(j, i)).fold(0, |m, j| m | 1 << j)
    }

    pub fn is_minimal(&self, i: usize) -> bool {
        (0..self.n).all(|j| !self.lt(j, i))
    }

    pub fn is_maximal(&self, i: usize) -> bool {
        self.row(i).iter().all(|&w| w == 0)
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.is_minimal(i)).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.is_maximal(i)).collect()
    }

    pub fn is_chain(&self) -> bool {
        self.relation_count() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn is_antichain(&self) -> bool {
        self.relation_count() == 0
    }

    /// `P + Q`: `other` is re-indexed after `self`, no cross relations.
    pub fn disjoint_sum(&self, other: &Poset) -> Poset {
        let n = self.n + other.n;
        let mut p = Self::blank(n);
        for (i, j) in self.relations() {
            p.set(i, j);
        }
        for (i, j) in other.relations() {
            p.set(self.n + i, self.n + j);
        }
        p
    }

    /// `P ⊕ Q`: every element of `self` lies below every element of `other`.
    pub fn direct_sum(&self, other: &Poset) -> Poset {
        let mut p = self.disjoint_sum(other);
        for i in 0..self.n {
            for j in 0..other.n {
                p.set(i, self.n + j);
            }
        }
        p
    }

    /// `P ⊕_{top,bottom} Q`: the direct sum with the single relation
    /// `top < bottom` deleted. `top` must be maximal in `self` and `bottom`
    /// minimal in `other` (indices are local to each operand).
    pub fn pinned_direct_sum(&self, top: usize, other: &Poset, bottom: usize) -> Result<Poset, PosetError> {
        self.check(top)?;
        other.check(bottom)?;
        if !self.is_maximal(top) {
            return Err(PosetError::NotMaximal(top));
        }
        if !other.is_minimal(bottom) {
            return Err(PosetError::NotMinimal(bottom));
        }
        let mut p = self.direct_sum(other);
        let j = self.n + bottom;
        p.above[top * p.words + j / WORD] &= !(1 << (j % WORD));
        Ok(p)
    }

    /// `P[x < y]` for incomparable `x`, `y`.
    pub fn add_relation(&self, x: usize, y: usize) -> Result<Poset, PosetError> {
        self.check(x)?;
        self.check(y)?;
        if self.comparable(x, y) {
            return Err(PosetError::AlreadyComparable(x, y));
        }
        let mut p = self.clone();
        // Everything at or below x goes below everything at or above y.
        let lower: Vec<usize> = std::iter::once(x).chain(self.below_iter(x)).collect();
        let upper: Vec<usize> = std::iter::once(y).chain(self.above_iter(y)).collect();
        for &a in &lower {
            for &b in &upper {
                p.set(a, b);
            }
        }
        Ok(p)
    }

    /// The induced subposet on `keep`, re-indexed in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Poset, PosetError> {
        for &k in keep {
            self.check(k)?;
        }
        let mut p = Self::blank(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                if self.lt(i, j) {
                    p.set(a, b);
                }
            }
        }
        Ok(p)
    }

    /// `P ∖ {x}`, remaining elements keep their relative order.
    pub fn remove_element(&self, x: usize) -> Result<Poset, PosetError> {
        self.check(x)?;
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != x).collect();
        self.restrict(&keep)
    }

    /// The order-reversed poset on the same indices.
    pub fn dual(&self) -> Poset {
        let mut p = Self::blank(self.n);
        for (i, j) in self.relations() {
            p.set(j, i);
        }
        p
    }

    /// Element sets of the connected components of the comparability
    /// graph, each sorted, ordered by smallest element.
    pub fn component_indices(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n];
        let mut parts = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = parts.len();
            let mut part = vec![start];
            label[start] = id;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for (u, lab) in label.iter_mut().enumerate() {
                    if *lab == usize::MAX && (self.lt(u, v) || self.lt(v, u)) {
                        *lab = id;
                        part.push(u);
                        stack.push(u);
                    }
                }
            }
            part.sort_unstable();
            parts.push(part);
        }
        parts
    }

    /// The finest decomposition `P = P₁ + … + P_k`.
    pub fn components(&self) -> Vec<Poset> {
        self.component_indices()
            .iter()
            .map(|idx| self.restrict(idx).expect("component indices are in range"))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.component_indices().len() <= 1
    }

    /// Cover pairs `(i, j)` (`j` covers `i`), i.e. the transitive reduction.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        self.relations()
            .filter(|&(i, j)| !self.above_iter(i).any(|k| self.lt(k, j)))
            .collect()
    }

    fn max_matching(&self) -> Vec<Option<usize>> {
        // Kuhn's augmenting paths on the bipartite graph i -> j for i < j.
        fn augment(p: &Poset, i: usize, seen: &mut [bool], matched_to: &mut [Option<usize>]) -> bool {
            for j in p.above_iter(i).collect::<Vec<_>>() {
                if seen[j] {
                    continue;
                }
                seen[j] = true;
                if matched_to[j].is_none_or(|k| augment(p, k, seen, matched_to)) {
                    matched_to[j] = Some(i);
                    return true;
                }
            }
            false
        }
        let mut matched_to = vec![None; self.n];
        for i in 0..self.n {
            let mut seen = vec![false; self.n];
            augment(self, i, &mut seen, &mut matched_to);
        }
        matched_to
    }

    /// A minimum partition into chains (Dilworth), each listed bottom to
    /// top; the number of chains equals [`Poset::width`].
    pub fn chain_cover(&self) -> Vec<Vec<usize>> {
        let pred = self.max_matching();
        let mut succ = vec![None; self.n];
        for (j, p) in pred.iter().enumerate() {
            if let Some(i) = *p {
                succ[i] = Some(j);
            }
        }
        let mut chains = Vec::new();
        for start in (0..self.n).filter(|&j| pred[j].is_none()) {
            let mut chain = vec![start];
            let mut cur = start;
            while let Some(next) = succ[cur] {
                chain.push(next);
                cur = next;
            }
            chains.push(chain);
        }
        chains
    }

    /// Size of a maximum antichain.
    pub fn width(&self) -> usize {
        let matched = self.max_matching().iter().filter(|m| m.is_some()).count();
        self.n - matched
    }

    /// Serializes to the `poset v1` text format, covers in sorted order.
    pub fn to_text(&self) -> String {
        let mut out = format!("poset v1\nelements {}\n", self.n);
        for (i, j) in self.hasse_edges() {
            out.push_str(&format!("cover {i} {j}\n"));
        }
        out
    }

    /// Parses the `poset v1` text format. Blank lines and `#` comments are
    /// ignored.
    pub fn parse_text(text: &str) -> Result<Poset, PosetError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: &str| PosetError::Parse {
            line,
            message: message.to_string(),
        };
        match lines.next() {
            Some((_, "poset v1")) => {}
            Some((line, _)) => return Err(err(line, "expected header `poset v1`")),
            None => return Err(err(0, "empty input")),
        }
        let n = match lines.next() {
            Some((line, l)) => match l.split_whitespace().collect::<Vec<_>>()[..] {
                ["elements", count] => count.parse::<usize>().map_err(|_| err(line, "invalid element count"))?,
                _ => return Err(err(line, "expected `elements <n>`")),
            },
            None => return Err(err(0, "missing `elements <n>` line")),
        };
        let mut covers = Vec::new();
        for (line, l) in lines {
            match l.split_whitespace().collect::<Vec<_>>()[..] {
                ["cover", a, b] => {
                    let a = a.parse().map_err(|_| err(line, "invalid element index"))?;
                    let b = b.parse().map_err(|_| err(line, "invalid element index"))?;
                    covers.push((a, b));
                }
                _ => return Err(err(line, "expected `cover <i> <j>`")),
            }
        }
        Poset::from_cover_relations(n, &covers)
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset({}; {:?})", self.n, self.hasse_edges())
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Poset {
    type Err = PosetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Poset::parse_text(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n_poset() -> Poset {
        // a=0, b=1, c=2, d=3 with a<c, b<c, b<d
        Poset::from_cover_relations(4, &[(0, 2), (1, 2), (1, 3)]).unwrap()
    }

    fn diamond() -> Poset {
        Poset::from_cover_relations(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn assert_valid(p: &Poset) {
        for i in 0..p.len() {
            assert!(!p.lt(i, i));
            for j in 0..p.len() {
                assert!(!(p.lt(i, j) && p.lt(j, i)));
                for k in 0..p.len() {
                    if p.lt(i, j) && p.lt(j, k) {
                        assert!(p.lt(i, k));
                    }
                }
            }
        }
    }

    #[test]
    fn cover_relations_are_closed() {
        let p = Poset::from_cover_relations(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.lt(0, 2));
        assert_eq!(p, Poset::chain(3));
        assert_eq!(Poset::from_cover_relations(4, &[]).unwrap(), Poset::antichain(4));
    }

    #[test]
    fn cover_relation_errors() {
        assert!(matches!(
            Poset::from_cover_relations(2, &[(0, 1), (1, 0)]),
            Err(PosetError::Cycle { a: 0, b: 1 })
        ));
        assert!(matches!(
            Poset::from_cover_relations(3, &[(0, 1), (1, 2), (2, 0)]),
            Err(PosetError::Cycle { .. })
        ));
        assert_eq!(
            Poset::from_cover_relations(2, &[(0, 2)]),
            Err(PosetError::IndexOutOfRange { index: 2, len: 2 })
        );
        assert!(Poset::from_cover_relations(2, &[(1, 1)]).is_err());
    }

    #[test]
    fn sums() {
        let p = Poset::chain(2).disjoint_sum(&Poset::singleton());
        assert_eq!(p.len(), 3);
        assert_eq!(p.relation_count(), 1);
        assert_eq!(
            Poset::antichain(2).disjoint_sum(&Poset::antichain(3)),
            Poset::antichain(5)
        );
        assert_eq!(Poset::chain(2).direct_sum(&Poset::chain(2)), Poset::chain(4));
        assert_eq!(n_poset().direct_sum(&Poset::empty()), n_poset());
        assert_eq!(Poset::empty().direct_sum(&n_poset()), n_poset());
        let v = Poset::singleton().direct_sum(&Poset::antichain(3));
        assert_eq!(v.relation_count(), 3);
        assert_valid(&v);
    }

    #[test]
    fn pinned_direct_sum_removes_one_relation() {
        // {x} ⊕_{x,L} (L < R): x < R, L < R, x ∥ L
        let p = Poset::singleton().pinned_direct_sum(0, &Poset::chain(2), 0).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.lt(0, 2) && p.lt(1, 2));
        assert!(!p.comparable(0, 1));
        let q = Poset::singleton().pinned_direct_sum(0, &Poset::singleton(), 0).unwrap();
        assert_eq!(q, Poset::antichain(2));
        assert_eq!(
            Poset::chain(2).pinned_direct_sum(0, &Poset::chain(2), 0),
            Err(PosetError::NotMaximal(0))
        );
        assert_eq!(
            Poset::chain(2).pinned_direct_sum(1, &Poset::chain(2), 1),
            Err(PosetError::NotMinimal(1))
        );
        let r = Poset::chain(2).pinned_direct_sum(1, &Poset::chain(2), 0).unwrap();
        assert_valid(&r);
        assert_eq!(r.add_relation(1, 2).unwrap(), Poset::chain(4));
    }

    #[test]
    fn add_relation_closes() {
        assert_eq!(Poset::antichain(2).add_relation(0, 1).unwrap(), Poset::chain(2));
        let p = n_poset();
        let q = p.add_relation(0, 1).unwrap();
        assert!(q.lt(0, 3));
        assert_valid(&q);
        assert_eq!(p.add_relation(0, 2), Err(PosetError::AlreadyComparable(0, 2)));
        assert_eq!(p.add_relation(1, 1), Err(PosetError::AlreadyComparable(1, 1)));
    }

    #[test]
    fn remove_element_reindexes() {
        assert_eq!(Poset::chain(3).remove_element(1).unwrap(), Poset::chain(2));
        for k in 0..4 {
            assert_eq!(Poset::antichain(4).remove_element(k).unwrap(), Poset::antichain(3));
        }
        assert!(Poset::chain(3).remove_element(3).is_err());
        let p = n_poset().remove_element(0).unwrap();
        // b<c, b<d relabelled 0<1, 0<2
        assert_eq!(p, Poset::from_cover_relations(3, &[(0, 1), (0, 2)]).unwrap());
    }

    #[test]
    fn extremal_elements() {
        assert_eq!(Poset::chain(3).minimal_elements(), vec![0]);
        assert_eq!(Poset::chain(3).maximal_elements(), vec![2]);
        assert_eq!(Poset::antichain(3).minimal_elements(), vec![0, 1, 2]);
        assert_eq!(Poset::antichain(3).maximal_elements(), vec![0, 1, 2]);
        assert_eq!(n_poset().minimal_elements(), vec![0, 1]);
        assert_eq!(n_poset().maximal_elements(), vec![2, 3]);
    }

    #[test]
    fn components_split_disjoint_sums() {
        assert_eq!(Poset::antichain(4).components().len(), 4);
        assert_eq!(Poset::chain(4).components().len(), 1);
        let p = Poset::chain(2).disjoint_sum(&Poset::antichain(2));
        let sizes: Vec<usize> = p.components().iter().map(Poset::len).collect();
        assert_eq!(sizes, vec![2, 1, 1]);
        assert!(n_poset().is_connected());
        assert!(Poset::empty().is_connected());
    }

    #[test]
    fn hasse_edges_reduce() {
        assert_eq!(Poset::chain(4).hasse_edges().len(), 3);
        assert!(Poset::antichain(5).hasse_edges().is_empty());
        assert_eq!(diamond().relation_count(), 5);
        assert_eq!(diamond().hasse_edges(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn width_and_chain_cover() {
        assert_eq!(Poset::chain(7).width(), 1);
        assert_eq!(Poset::antichain(7).width(), 7);
        assert_eq!(n_poset().width(), 2);
        assert_eq!(diamond().width(), 2);
        assert_eq!(Poset::empty().width(), 0);
        let cover = diamond().chain_cover();
        assert_eq!(cover.len(), 2);
        let mut all: Vec<usize> = cover.concat();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
        for chain in &cover {
            for w in chain.windows(2) {
                assert!(diamond().lt(w[0], w[1]));
            }
        }
    }

    #[test]
    fn dual_reverses() {
        let p = n_poset().dual();
        assert!(p.lt(2, 0) && p.lt(3, 1));
        assert_eq!(p.dual(), n_poset());
    }

    #[test]
    fn text_format() {
        let text = n_poset().to_text();
        assert_eq!(text, "poset v1\nelements 4\ncover 0 2\ncover 1 2\ncover 1 3\n");
        assert_eq!(text.parse::<Poset>().unwrap(), n_poset());
        let p: Poset = "poset v1\n# diamond\nelements 4\ncover 2 3\ncover 0 1\n\ncover 1 3\ncover 0 2\n"
            .parse()
            .unwrap();
        assert_eq!(p, diamond());
        assert!(matches!(
            "poset v2\n".parse::<Poset>(),
            Err(PosetError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            "poset v1\nelements 2\ncover 0 x\n".parse::<Poset>(),
            Err(PosetError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            "poset v1\nelements 2\ncover 0 5\n".parse::<Poset>(),
            Err(PosetError::IndexOutOfRange { .. })
        ));
        assert!("".parse::<Poset>().is_err());
    }

    #[test]
    fn large_posets_use_multiple_words() {
        let p = Poset::chain(130);
        assert!(p.lt(0, 129));
        assert!(p.lt(64, 65));
        assert_eq!(p.hasse_edges().len(), 129);
        assert_eq!(p.width(), 1);
        let q = p.disjoint_sum(&Poset::chain(70));
        assert_eq!(q.width(), 2);
        assert_eq!(q.components().len(), 2);
    }
}
