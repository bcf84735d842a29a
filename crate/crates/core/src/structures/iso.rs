use std::collections::{BTreeMap, BTreeSet};

use super::{Elem, Structure, StructureError};

/// Finds the lexicographically least isomorphism from `m` to `n`, as a map
/// on the universes that sends each sort domain onto the corresponding one.
pub fn isomorphism(
    m: &Structure,
    n: &Structure,
) -> Result<Option<BTreeMap<Elem, Elem>>, StructureError> {
    if m.voc != n.voc {
        return Err(StructureError::VocabularyMismatch);
    }
    let um: Vec<Elem> = m.universe().into_iter().collect();
    let un: Vec<Elem> = n.universe().into_iter().collect();
    if um.len() != un.len() {
        return Ok(None);
    }
    for s in &m.voc.sorts {
        if m.domain(*s).len() != n.domain(*s).len() {
            return Ok(None);
        }
    }
    // Facts as (symbol index, tuple) where functions contribute their graphs.
    let facts = |s: &Structure| -> Vec<(usize, Vec<Elem>)> {
        let mut out = Vec::new();
        for (i, ts) in s.relations.values().enumerate() {
            out.extend(ts.iter().map(|t| (i, t.clone())));
        }
        let base = s.relations.len();
        for (i, tab) in s.functions.values().enumerate() {
            for (a, v) in tab {
                let mut t = a.clone();
                t.push(*v);
                out.push((base + i, t));
            }
        }
        out
    };
    let fm = facts(m);
    let fnn: BTreeSet<(usize, Vec<Elem>)> = facts(n).into_iter().collect();
    if fm.len() != fnn.len() {
        return Ok(None);
    }
    let pos: BTreeMap<Elem, usize> = um.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    // Facts become checkable once their last element (in `um` order) is assigned.
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); um.len()];
    for (k, (_, t)) in fm.iter().enumerate() {
        let last = t.iter().map(|e| pos[e]).max().unwrap_or(0);
        due[last].push(k);
    }
    let mut fixed: BTreeMap<Elem, Elem> = BTreeMap::new();
    for (c, e) in &m.constants {
        let target = n.constants[c];
        if let Some(prev) = fixed.insert(*e, target) {
            if prev != target {
                return Ok(None);
            }
        }
    }
    let sig_m: Vec<BTreeSet<u32>> = um.iter().map(|e| m.sorts_of(*e)).collect();
    let sig_n: BTreeMap<Elem, BTreeSet<u32>> = un.iter().map(|e| (*e, n.sorts_of(*e))).collect();

    struct Search<'a> {
        um: &'a [Elem],
        un: &'a [Elem],
        fm: &'a [(usize, Vec<Elem>)],
        fnn: &'a BTreeSet<(usize, Vec<Elem>)>,
        due: &'a [Vec<usize>],
        fixed: &'a BTreeMap<Elem, Elem>,
        sig_m: &'a [BTreeSet<u32>],
        sig_n: &'a BTreeMap<Elem, BTreeSet<u32>>,
        map: BTreeMap<Elem, Elem>,
        used: BTreeSet<Elem>,
    }

    impl Search<'_> {
        fn go(&mut self, i: usize) -> bool {
            if i == self.um.len() {
                return true;
            }
            let e = self.um[i];
            let candidates: Vec<Elem> = match self.fixed.get(&e) {
                Some(t) => vec![*t],
                None => self.un.to_vec(),
            };
            for t in candidates {
                if self.used.contains(&t) || self.sig_n[&t] != self.sig_m[i] {
                    continue;
                }
                if self.fixed.values().any(|v| *v == t) && self.fixed.get(&e) != Some(&t) {
                    continue;
                }
                self.map.insert(e, t);
                self.used.insert(t);
                let ok = self.due[i].iter().all(|k| {
                    let (sym, tuple) = &self.fm[*k];
                    let img: Vec<Elem> = tuple.iter().map(|x| self.map[x]).collect();
                    self.fnn.contains(&(*sym, img))
                });
                if ok && self.go(i + 1) {
                    return true;
                }
                self.map.remove(&e);
                self.used.remove(&t);
            }
            false
        }
    }

    let mut search = Search {
        um: &um,
        un: &un,
        fm: &fm,
        fnn: &fnn,
        due: &due,
        fixed: &fixed,
        sig_m: &sig_m,
        sig_n: &sig_n,
        map: BTreeMap::new(),
        used: BTreeSet::new(),
    };
    Ok(if search.go(0) { Some(search.map) } else { None })
}
