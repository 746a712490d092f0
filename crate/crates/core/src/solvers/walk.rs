use crate::anonymity::AttackerSet;
use crate::graph::DistanceMatrix;

/// One start node's run of the class-absorption loop.
///
/// Holds the attacker set `V'` and the partition of `V \ V'` by metric vector.
/// Absorbing nodes only ever refines the partition, so each new member splits
/// the existing classes by its distance row instead of regrouping from scratch.
pub(crate) struct Walk<'a> {
    d: &'a DistanceMatrix,
    members: Vec<usize>,
    classes: Vec<Vec<u32>>,
    remaining: usize,
}

impl<'a> Walk<'a> {
    pub fn new(d: &'a DistanceMatrix, start: usize) -> Self {
        let n = d.n();
        let others: Vec<u32> = (0..n as u32).filter(|&v| v as usize != start).collect();
        let mut walk = Walk { d, members: vec![start], classes: vec![others], remaining: n - 1 };
        if walk.remaining == 0 {
            walk.classes.clear();
        }
        walk.refine(start);
        walk
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Smallest class size; zero once every node has been absorbed.
    pub fn mu(&self) -> usize {
        self.classes.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining == 0
    }

    /// Moves every class of minimum size into the attacker set.
    pub fn absorb_minimum(&mut self) {
        let mu = self.mu();
        if mu == 0 {
            return;
        }
        let mut absorbed = Vec::new();
        self.classes.retain(|c| {
            if c.len() == mu {
                absorbed.extend(c.iter().map(|&v| v as usize));
                false
            } else {
                true
            }
        });
        self.remaining -= absorbed.len();
        self.members.extend_from_slice(&absorbed);
        for a in absorbed {
            self.refine(a);
        }
    }

    fn refine(&mut self, a: usize) {
        let row = self.d.row(a);
        let mut out = Vec::with_capacity(self.classes.len());
        for mut class in self.classes.drain(..) {
            if class.len() == 1 {
                out.push(class);
                continue;
            }
            class.sort_unstable_by_key(|&x| row[x as usize]);
            let first = row[class[0] as usize];
            let last = row[class[class.len() - 1] as usize];
            if first == last {
                out.push(class);
                continue;
            }
            out.extend(class.chunk_by(|&x, &y| row[x as usize] == row[y as usize]).map(<[u32]>::to_vec));
        }
        self.classes = out;
    }

    pub fn attacker_set(&self) -> AttackerSet {
        AttackerSet::new(self.members.iter().copied(), self.d.n())
            .expect("walk holds a non-empty proper subset while nodes remain")
    }
}
