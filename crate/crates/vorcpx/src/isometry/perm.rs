//! Permutations and Schreier-Sims stabilizer chains.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;

/// Permutation of 0..degree given by its image table.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Self {
        debug_assert!({
            let mut seen = vec![false; images.len()];
            images.iter().all(|&i| {
                let ok = (i as usize) < images.len() && !seen[i as usize];
                if ok {
                    seen[i as usize] = true;
                }
                ok
            })
        });
        Perm(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, p: usize) -> usize {
        self.0[p] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// self followed by other.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }
}

struct Level {
    point: usize,
    /// orbit point -> transversal element mapping `point` to it
    transversal: HashMap<usize, Perm>,
    gens: Vec<Perm>,
}

/// Deterministic Schreier-Sims chain; small degrees only.
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize) -> Self {
        StabChain { degree, levels: Vec::new() }
    }

    pub fn from_gens(degree: usize, gens: &[Perm]) -> Self {
        let mut chain = Self::new(degree);
        for g in gens {
            chain.extend(g);
        }
        chain
    }

    pub fn order(&self) -> BigInt {
        let mut o = BigInt::one();
        for level in &self.levels {
            o *= BigInt::from(level.transversal.len());
        }
        o
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.sift(p).is_identity()
    }

    /// Residue of p after stripping transversal factors level by level.
    fn sift(&self, p: &Perm) -> Perm {
        let mut cur = p.clone();
        for level in &self.levels {
            let image = cur.apply(level.point);
            match level.transversal.get(&image) {
                None => return cur,
                Some(t) => cur = cur.then(&t.inverse()),
            }
        }
        cur
    }

    /// Adds a generator if it is new; returns true when the group grew.
    pub fn extend(&mut self, p: &Perm) -> bool {
        assert_eq!(p.degree(), self.degree);
        if self.contains(p) {
            return false;
        }
        self.extend_at(0, p.clone());
        true
    }

    fn extend_at(&mut self, depth: usize, p: Perm) {
        if p.is_identity() {
            return;
        }
        if depth == self.levels.len() {
            let point = (0..self.degree).find(|&i| p.apply(i) != i).expect("non-identity");
            let mut transversal = HashMap::new();
            transversal.insert(point, Perm::identity(self.degree));
            self.levels.push(Level { point, transversal, gens: Vec::new() });
        }
        self.levels[depth].gens.push(p);
        self.close_level(depth);
    }

    /// Recomputes the orbit/transversal at `depth` and sifts all Schreier
    /// generators into the next level.
    fn close_level(&mut self, depth: usize) {
        let point = self.levels[depth].point;
        let gens = self.levels[depth].gens.clone();
        let mut transversal: HashMap<usize, Perm> = HashMap::new();
        transversal.insert(point, Perm::identity(self.degree));
        let mut queue = vec![point];
        let mut schreier: Vec<Perm> = Vec::new();
        while let Some(u) = queue.pop() {
            let tu = transversal[&u].clone();
            for g in &gens {
                let v = g.apply(u);
                match transversal.get(&v) {
                    None => {
                        transversal.insert(v, tu.then(g));
                        queue.push(v);
                    }
                    Some(tv) => {
                        let s = tu.then(g).then(&tv.inverse());
                        if !s.is_identity() {
                            schreier.push(s);
                        }
                    }
                }
            }
        }
        self.levels[depth].transversal = transversal;
        for s in schreier {
            let deeper = self.sift_from(depth + 1, &s);
            if !deeper.is_identity() {
                self.extend_at(depth + 1, deeper);
            }
        }
    }

    fn sift_from(&self, depth: usize, p: &Perm) -> Perm {
        let mut cur = p.clone();
        for level in &self.levels[depth..] {
            let image = cur.apply(level.point);
            match level.transversal.get(&image) {
                None => return cur,
                Some(t) => cur = cur.then(&t.inverse()),
            }
        }
        cur
    }
}

/// Exact group order from a generating set.
pub fn group_order(degree: usize, gens: &[Perm]) -> BigInt {
    StabChain::from_gens(degree, gens).order()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(degree: usize, points: &[usize]) -> Perm {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for i in 0..points.len() {
            images[points[i]] = points[(i + 1) % points.len()] as u32;
        }
        Perm::from_images(images)
    }

    #[test]
    fn trivial_and_cyclic() {
        assert_eq!(group_order(5, &[]), BigInt::from(1));
        assert_eq!(group_order(5, &[cycle(5, &[0, 1, 2])]), BigInt::from(3));
    }

    #[test]
    fn symmetric_group() {
        for n in 2..=7usize {
            let gens = vec![cycle(n, &[0, 1]), cycle(n, &(0..n).collect::<Vec<_>>())];
            let expected: u64 = (1..=n as u64).product();
            assert_eq!(group_order(n, &gens), BigInt::from(expected));
        }
    }

    #[test]
    fn membership() {
        let gens = vec![cycle(4, &[0, 1]), cycle(4, &[0, 1, 2, 3])];
        let chain = StabChain::from_gens(4, &gens);
        assert!(chain.contains(&cycle(4, &[2, 3])));
        assert_eq!(chain.order(), BigInt::from(24));
    }

    #[test]
    fn matches_brute_force_order() {
        // dihedral group on a square: rotation + reflection
        let rot = cycle(4, &[0, 1, 2, 3]);
        let refl = Perm::from_images(vec![1, 0, 3, 2]);
        assert_eq!(group_order(4, &[rot.clone(), refl.clone()]), BigInt::from(8));
        // brute force closure
        let mut elems = vec![Perm::identity(4)];
        loop {
            let mut grew = false;
            let snapshot = elems.clone();
            for a in &snapshot {
                for g in [&rot, &refl] {
                    let b = a.then(g);
                    if !elems.contains(&b) {
                        elems.push(b);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        assert_eq!(elems.len(), 8);
    }
}
