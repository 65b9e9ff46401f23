use std::collections::HashMap;

use crate::error::{Error, Result};

/// A one-sided subshift of finite type over `{1, .., symbols}` given by a
/// finite list of forbidden words.
///
/// Internally it is the graph whose vertices are the admissible words of
/// length `memory = max forbidden length - 1` and whose edges append one
/// symbol. Words with no forbidden factor that can be continued forever are
/// exactly the finite paths in this graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Sft {
    symbols: u8,
    forbidden: Vec<Vec<u8>>,
    memory: usize,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    succ: Vec<Vec<(u8, usize)>>,
}

impl Sft {
    pub fn new(symbols: u8, forbidden: Vec<Vec<u8>>) -> Result<Self> {
        if symbols == 0 {
            return Err(Error::Validation("alphabet must be nonempty".into()));
        }
        for w in &forbidden {
            if w.is_empty() {
                return Err(Error::Validation("empty forbidden word".into()));
            }
            if let Some(&s) = w.iter().find(|&&s| s == 0 || s > symbols) {
                return Err(Error::Validation(format!(
                    "forbidden word uses symbol {s} outside 1..={symbols}"
                )));
            }
        }
        let memory = forbidden
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1);
        let ok = |w: &[u8]| !forbidden.iter().any(|f| contains(w, f));

        let mut states: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..memory {
            let mut next = Vec::new();
            for s in &states {
                for a in 1..=symbols {
                    let mut w = s.clone();
                    w.push(a);
                    if ok(&w) {
                        next.push(w);
                    }
                }
            }
            states = next;
        }
        let index: HashMap<Vec<u8>, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut succ = vec![Vec::new(); states.len()];
        for (i, s) in states.iter().enumerate() {
            for a in 1..=symbols {
                let mut w = s.clone();
                w.push(a);
                if !ok(&w) {
                    continue;
                }
                let tail = w[w.len() - memory..].to_vec();
                if let Some(&j) = index.get(&tail) {
                    succ[i].push((a, j));
                }
            }
        }
        if let Some((i, _)) = succ.iter().enumerate().find(|(_, s)| s.is_empty()) {
            return Err(Error::Validation(format!(
                "dead state {:?}: no admissible continuation",
                states[i]
            )));
        }
        if states.is_empty() {
            return Err(Error::Validation("no admissible words".into()));
        }
        Ok(Self {
            symbols,
            forbidden,
            memory,
            states,
            index,
            succ,
        })
    }

    /// Builds the SFT whose allowed one-step transitions are `allowed[a][b]`.
    pub fn from_transitions(allowed: &[Vec<bool>]) -> Result<Self> {
        let m = allowed.len();
        if m == 0 || m > u8::MAX as usize || allowed.iter().any(|r| r.len() != m) {
            return Err(Error::Validation(
                "transition matrix must be square and nonempty".into(),
            ));
        }
        let mut forbidden = Vec::new();
        for (a, row) in allowed.iter().enumerate() {
            if !row.iter().any(|&b| b) {
                return Err(Error::Validation(format!(
                    "dead symbol {}: no allowed transition",
                    a + 1
                )));
            }
            for (b, &ok) in row.iter().enumerate() {
                if !ok {
                    forbidden.push(vec![a as u8 + 1, b as u8 + 1]);
                }
            }
        }
        Self::new(m as u8, forbidden)
    }

    /// The golden-mean shift: symbols {1, 2}, forbidden word `11`.
    pub fn golden_mean() -> Self {
        Self::new(2, vec![vec![1, 1]]).expect("golden mean shift is valid")
    }

    pub fn symbols(&self) -> u8 {
        self.symbols
    }

    pub fn forbidden(&self) -> &[Vec<u8>] {
        &self.forbidden
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn is_admissible(&self, word: &[u8]) -> bool {
        word.iter().all(|&s| (1..=self.symbols).contains(&s))
            && !self.forbidden.iter().any(|f| contains(word, f))
            && self.continues(word)
    }

    /// Whether `word` (already free of forbidden factors) can be extended
    /// to the right forever.
    fn continues(&self, word: &[u8]) -> bool {
        if word.len() >= self.memory {
            return self.index.contains_key(&word[word.len() - self.memory..]);
        }
        self.states.iter().any(|s| s.ends_with(word))
    }

    /// Lexicographically least admissible word agreeing with `pattern` on
    /// every fixed position.
    pub fn complete(&self, pattern: &[Option<u8>]) -> Option<Vec<u8>> {
        let n = pattern.len();
        if n == 0 {
            return Some(Vec::new());
        }
        let fits = |i: usize, a: u8| pattern[i].is_none_or(|p| p == a);
        if n <= self.memory {
            return self
                .enumerate(n)
                .into_iter()
                .find(|w| w.iter().enumerate().all(|(i, &a)| fits(i, a)));
        }
        // Positions 0..memory fix the initial state; afterwards each edge
        // appends one symbol. alive[k][q]: state q after position
        // memory + k - 1 can be completed to the end of the pattern.
        let first_states: Vec<usize> = (0..self.states.len())
            .filter(|&q| self.states[q].iter().enumerate().all(|(i, &a)| fits(i, a)))
            .collect();
        let steps = n - self.memory;
        let mut alive = vec![vec![false; self.states.len()]; steps + 1];
        alive[steps].iter_mut().for_each(|x| *x = true);
        for k in (0..steps).rev() {
            let pos = self.memory + k;
            for q in 0..self.states.len() {
                alive[k][q] = self.succ[q]
                    .iter()
                    .any(|&(a, r)| fits(pos, a) && alive[k + 1][r]);
            }
        }
        let mut q = *first_states.iter().find(|&&q| alive[0][q])?;
        let mut word = self.states[q].clone();
        for k in 0..steps {
            let pos = self.memory + k;
            let &(a, r) = self.succ[q]
                .iter()
                .find(|&&(a, r)| fits(pos, a) && alive[k + 1][r])?;
            word.push(a);
            q = r;
        }
        Some(word)
    }

    /// Extends an admissible word to length `len` by appending the least
    /// admissible symbol at every step.
    pub fn extend(&self, word: &[u8], len: usize) -> Option<Vec<u8>> {
        if !self.is_admissible(word) {
            return None;
        }
        let mut q = if word.len() >= self.memory {
            self.index[&word[word.len() - self.memory..]]
        } else {
            // Constraints on what follows only involve the last `memory`
            // symbols, so any state ending in `word` is a valid stand-in.
            self.states.iter().position(|s| s.ends_with(word))?
        };
        let mut out = word.to_vec();
        while out.len() < len {
            let (a, r) = self.succ[q][0];
            out.push(a);
            q = r;
        }
        Some(out)
    }

    /// Number of admissible words of each length `0..=max_len`.
    pub fn word_counts(&self, max_len: usize) -> Vec<u128> {
        let mut out = Vec::with_capacity(max_len + 1);
        for len in 0..=max_len.min(self.memory) {
            out.push(self.enumerate(len).len() as u128);
        }
        if max_len > self.memory {
            let mut v = vec![1u128; self.states.len()];
            for _ in self.memory..max_len {
                let mut nv = vec![0u128; self.states.len()];
                for (q, &c) in v.iter().enumerate() {
                    for &(_, r) in &self.succ[q] {
                        nv[r] = nv[r].saturating_add(c);
                    }
                }
                v = nv;
                out.push(v.iter().fold(0u128, |a, &b| a.saturating_add(b)));
            }
        }
        out
    }

    /// All admissible words of length `len`, in lexicographic order.
    pub fn enumerate(&self, len: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut w = Vec::with_capacity(len);
        self.enumerate_rec(len, &mut w, &mut out);
        out
    }

    fn enumerate_rec(&self, len: usize, w: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if w.len() == len {
            out.push(w.clone());
            return;
        }
        for a in 1..=self.symbols {
            w.push(a);
            let tail_ok = !self.forbidden.iter().any(|f| w.ends_with(f));
            if tail_ok && self.continues(w) {
                self.enumerate_rec(len, w, out);
            }
            w.pop();
        }
    }

    /// Shortest admissible connector `c` with `a·c·b` admissible, by BFS on
    /// the state graph.
    pub fn connector(&self, a: &[u8], b: &[u8], max_len: usize) -> Option<Vec<u8>> {
        for len in 0..=max_len {
            let mut pat: Vec<Option<u8>> = a.iter().map(|&s| Some(s)).collect();
            pat.extend(std::iter::repeat_n(None, len));
            pat.extend(b.iter().map(|&s| Some(s)));
            if let Some(w) = self.complete(&pat) {
                return Some(w[a.len()..a.len() + len].to_vec());
            }
        }
        None
    }
}

fn contains(hay: &[u8], needle: &[u8]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}
