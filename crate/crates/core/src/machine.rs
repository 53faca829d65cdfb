//! Simulation of the one-stack Stacksort and of the σ-machine: a σ-avoiding
//! stack followed by an increasing stack, driven right-greedily.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{PatternMatcher, Permutation};

/// A stack whose contents, read from top to bottom, avoid a fixed pattern.
///
/// Elements are stored so that the top-to-bottom reading is a contiguous
/// slice (`buf[top..]`). The slot just before `top` is scratch space for the
/// candidate of a push test.
#[derive(Debug, Clone)]
pub struct RestrictedStack {
    restriction: Permutation,
    matcher: PatternMatcher,
    buf: Vec<u32>,
    top: usize,
}

impl RestrictedStack {
    /// Fails when the restriction has fewer than two entries: no element
    /// could ever be pushed.
    pub fn new(restriction: &Permutation) -> Result<Self> {
        check_sigma(restriction)?;
        Ok(RestrictedStack {
            restriction: restriction.clone(),
            matcher: PatternMatcher::new(restriction),
            buf: vec![0],
            top: 1,
        })
    }

    pub fn restriction(&self) -> &Permutation {
        &self.restriction
    }

    pub fn len(&self) -> usize {
        self.buf.len() - self.top
    }

    pub fn is_empty(&self) -> bool {
        self.top == self.buf.len()
    }

    pub fn peek(&self) -> Option<u32> {
        self.buf.get(self.top).copied()
    }

    /// Contents from top to bottom.
    pub fn reading(&self) -> &[u32] {
        &self.buf[self.top..]
    }

    /// Contents from bottom to top.
    pub fn contents(&self) -> Vec<u32> {
        self.reading().iter().rev().copied().collect()
    }

    pub fn clear(&mut self) {
        self.top = self.buf.len();
    }

    /// Resets the stack and makes room for `n` elements.
    pub fn reset(&mut self, n: usize) {
        if self.buf.len() < n + 1 {
            self.buf.resize(n + 1, 0);
        }
        self.clear();
    }

    fn make_room(&mut self) {
        if self.top == 0 {
            let grow = self.buf.len().max(4);
            let mut fresh = vec![0u32; grow];
            fresh.extend_from_slice(&self.buf);
            self.buf = fresh;
            self.top += grow;
        }
    }

    /// Whether `x` followed by the current reading avoids the restriction,
    /// recomputed from scratch on the full reading.
    pub fn can_push(&mut self, x: u32) -> bool {
        self.make_room();
        self.buf[self.top - 1] = x;
        !self.matcher.occurs(&self.buf[self.top - 1..])
    }

    /// Same verdict as [`can_push`](Self::can_push), but only searches
    /// occurrences that start at the candidate. The current reading avoids the
    /// restriction, so any new occurrence must use the candidate.
    fn can_push_incremental(&mut self, x: u32) -> bool {
        self.make_room();
        self.buf[self.top - 1] = x;
        !self.matcher.occurs_anchored(&self.buf[self.top - 1..])
    }

    /// Pushes `x` if legal.
    pub fn try_push(&mut self, x: u32) -> bool {
        if self.can_push_incremental(x) {
            self.top -= 1;
            self.check_restriction();
            true
        } else {
            false
        }
    }

    pub fn pop(&mut self) -> Option<u32> {
        let v = self.peek()?;
        self.top += 1;
        Some(v)
    }

    #[inline]
    fn check_restriction(&self) {
        if cfg!(any(test, feature = "check-invariants")) {
            assert!(
                !self.matcher.occurs(self.reading()),
                "stack reading {:?} contains {}",
                self.reading(),
                self.restriction
            );
        }
    }
}

/// Push legality for a restricted stack: `x` on top of the current contents
/// must avoid the restriction.
pub fn can_push(stack: &mut RestrictedStack, x: u32) -> bool {
    stack.can_push(x)
}

fn check_sigma(sigma: &Permutation) -> Result<()> {
    if sigma.len() < 2 {
        return Err(Error::PatternTooShort { pattern: sigma.to_string(), len: sigma.len(), min: 2 });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// Push the next input entry into the σ-avoiding stack.
    #[serde(rename = "Sσ")]
    PushSigma,
    /// Move the top of the σ-avoiding stack into the increasing stack.
    #[serde(rename = "SI")]
    PushIncreasing,
    /// Move the top of the increasing stack to the output.
    #[serde(rename = "O")]
    Output,
}

impl Move {
    pub fn symbol(self) -> &'static str {
        match self {
            Move::PushSigma => "Sσ",
            Move::PushIncreasing => "SI",
            Move::Output => "O",
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Sσ" => Ok(Move::PushSigma),
            "SI" => Ok(Move::PushIncreasing),
            "O" => Ok(Move::Output),
            _ => Err(Error::Parse { position: 1, message: format!("unknown move {s:?}") }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    #[serde(rename = "move")]
    pub mv: Move,
    pub value: u32,
}

/// Ordered move log of one run of the σ-machine.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MachineTrace {
    pub steps: Vec<TraceStep>,
}

impl MachineTrace {
    fn record(&mut self, mv: Move, value: u32) {
        let step = self.steps.len();
        self.steps.push(TraceStep { step, mv, value });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn count(&self, mv: Move) -> usize {
        self.steps.iter().filter(|s| s.mv == mv).count()
    }

    /// Re-executes the moves against `input`, checking that each annotated
    /// value is the one actually moved, and returns the output.
    pub fn replay(&self, input: &Permutation) -> Result<Permutation> {
        let mut next = input.values().iter();
        let mut first: Vec<u32> = Vec::new();
        let mut second: Vec<u32> = Vec::new();
        let mut out = Vec::with_capacity(input.len());
        for s in &self.steps {
            let moved = match s.mv {
                Move::PushSigma => next.next().copied().inspect(|&v| first.push(v)),
                Move::PushIncreasing => first.pop().inspect(|&v| second.push(v)),
                Move::Output => second.pop().inspect(|&v| out.push(v)),
            };
            match moved {
                Some(v) if v == s.value => {}
                Some(v) => {
                    return Err(Error::Precondition(format!(
                        "step {}: trace says {} {} but {} was moved",
                        s.step, s.mv, s.value, v
                    )))
                }
                None => {
                    return Err(Error::Precondition(format!(
                        "step {}: {} from an empty source",
                        s.step, s.mv
                    )))
                }
            }
        }
        if next.next().is_some() || !first.is_empty() || !second.is_empty() {
            return Err(Error::Precondition("trace ends before the machine is empty".into()));
        }
        Permutation::new(out)
    }

    /// One move per line: `Sσ 4`, `SI 3`, `O 1`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for step in &self.steps {
            s.push_str(&format!("{} {}\n", step.mv, step.value));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut trace = MachineTrace::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { position: lineno + 1, message };
            let (mv, v) = line.split_once(' ').ok_or_else(|| err(format!("expected `<move> <value>`, found {line:?}")))?;
            let mv: Move = mv.parse().map_err(|_| err(format!("unknown move {mv:?}")))?;
            let value = v.trim().parse().map_err(|_| err(format!("bad value {v:?}")))?;
            trace.record(mv, value);
        }
        Ok(trace)
    }
}

/// The σ-machine for a fixed σ, with scratch buffers reused across runs.
#[derive(Debug, Clone)]
pub struct SigmaMachine {
    first: RestrictedStack,
    second: Vec<u32>,
}

impl SigmaMachine {
    pub fn new(sigma: &Permutation) -> Result<Self> {
        Ok(SigmaMachine { first: RestrictedStack::new(sigma)?, second: Vec::new() })
    }

    pub fn sigma(&self) -> &Permutation {
        self.first.restriction()
    }

    /// Runs the two-stack algorithm literally. `on_move` sees every move and
    /// may abort the run by returning `false`; the return value tells whether
    /// the run completed.
    fn simulate(&mut self, input: &[u32], mut on_move: impl FnMut(Move, u32) -> bool) -> bool {
        self.first.reset(input.len());
        self.second.clear();
        let mut i = 0;
        while i < input.len() {
            if self.first.try_push(input[i]) {
                if !on_move(Move::PushSigma, input[i]) {
                    return false;
                }
                i += 1;
            } else if !self.transfer_or_output(&mut on_move) {
                return false;
            }
        }
        while !self.first.is_empty() {
            if !self.transfer_or_output(&mut on_move) {
                return false;
            }
        }
        while let Some(v) = self.second.pop() {
            if !on_move(Move::Output, v) {
                return false;
            }
        }
        true
    }

    #[inline]
    fn transfer_or_output(&mut self, on_move: &mut impl FnMut(Move, u32) -> bool) -> bool {
        let top = self.first.peek().expect("a blocked push implies a nonempty stack");
        match self.second.last() {
            Some(&t) if top > t => {
                let v = self.second.pop().unwrap();
                on_move(Move::Output, v)
            }
            _ => {
                self.first.pop();
                self.second.push(top);
                on_move(Move::PushIncreasing, top)
            }
        }
    }

    pub fn run(&mut self, pi: &Permutation) -> (Permutation, MachineTrace) {
        let mut trace = MachineTrace::default();
        let mut out = Vec::with_capacity(pi.len());
        self.simulate(pi.values(), |mv, v| {
            trace.record(mv, v);
            if mv == Move::Output {
                out.push(v);
            }
            true
        });
        (Permutation::from_vec_unchecked(out), trace)
    }

    /// True iff the machine outputs `1 2 … n`. Stops at the first misplaced output.
    pub fn sorts(&mut self, input: &[u32]) -> bool {
        let mut expected = 1;
        self.simulate(input, |mv, v| {
            if mv != Move::Output {
                return true;
            }
            let ok = v == expected;
            expected += 1;
            ok
        })
    }

    /// Output of one right-greedy pass through the σ-avoiding stack alone.
    pub fn first_pass(&mut self, input: &[u32]) -> Vec<u32> {
        self.first.reset(input.len());
        let mut out = Vec::with_capacity(input.len());
        for &x in input {
            while !self.first.try_push(x) {
                out.push(self.first.pop().expect("a blocked push implies a nonempty stack"));
            }
        }
        while let Some(v) = self.first.pop() {
            out.push(v);
        }
        out
    }
}

pub fn first_pass(pi: &Permutation, sigma: &Permutation) -> Result<Permutation> {
    let mut m = SigmaMachine::new(sigma)?;
    Ok(Permutation::from_vec_unchecked(m.first_pass(pi.values())))
}

pub fn run_machine(pi: &Permutation, sigma: &Permutation) -> Result<(Permutation, MachineTrace)> {
    Ok(SigmaMachine::new(sigma)?.run(pi))
}

pub fn is_sortable(pi: &Permutation, sigma: &Permutation) -> Result<bool> {
    Ok(SigmaMachine::new(sigma)?.sorts(pi.values()))
}

/// Knuth's greedy single-stack pass: push while the incoming entry is smaller
/// than the top, otherwise pop to the output.
pub fn stacksort(pi: &Permutation) -> Permutation {
    let mut stack: Vec<u32> = Vec::with_capacity(pi.len());
    let mut out = Vec::with_capacity(pi.len());
    for &x in pi.values() {
        while let Some(&t) = stack.last() {
            if x < t {
                break;
            }
            out.push(t);
            stack.pop();
        }
        stack.push(x);
    }
    out.extend(stack.into_iter().rev());
    Permutation::from_vec_unchecked(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{all_permutations, perm};

    fn stack_with(sigma: &str, top_to_bottom: &[u32]) -> RestrictedStack {
        let mut s = RestrictedStack::new(&perm(sigma)).unwrap();
        for &v in top_to_bottom.iter().rev() {
            assert!(s.try_push(v));
        }
        assert_eq!(s.reading(), top_to_bottom);
        s
    }

    #[test]
    fn can_push_examples() {
        let mut s = stack_with("123", &[3, 1, 4]);
        assert!(!can_push(&mut s, 2));
        assert!(perm("2314").contains(&perm("123")).is_some());
        let mut empty = RestrictedStack::new(&perm("123")).unwrap();
        assert!((1..=9).all(|x| can_push(&mut empty, x)));
        let mut s = stack_with("12", &[2]);
        assert!(!can_push(&mut s, 1));
        assert_eq!(s.len(), 1);
        assert_eq!(s.contents(), vec![2]);
    }

    #[test]
    fn short_sigma_is_rejected() {
        assert!(matches!(SigmaMachine::new(&perm("1")), Err(Error::PatternTooShort { .. })));
        assert!(SigmaMachine::new(&Permutation::empty()).is_err());
        assert!(first_pass(&perm("21"), &perm("1")).is_err());
    }

    #[test]
    fn incremental_push_test_matches_full_recount() {
        for sigma in ["12", "21", "123", "132", "231", "321", "2413", "3142"] {
            let sigma = perm(sigma);
            for pi in all_permutations(7) {
                let mut full = RestrictedStack::new(&sigma).unwrap();
                let mut fast = RestrictedStack::new(&sigma).unwrap();
                for &x in pi.values() {
                    let a = full.can_push(x);
                    let b = fast.can_push_incremental(x);
                    assert_eq!(a, b);
                    if a {
                        full.try_push(x);
                        fast.try_push(x);
                    } else {
                        full.pop();
                        fast.pop();
                    }
                }
            }
        }
    }

    #[test]
    fn first_pass_examples() {
        assert_eq!(first_pass(&perm("4132"), &perm("123")).unwrap(), perm("3214"));
        assert_eq!(first_pass(&perm("132"), &perm("123")).unwrap(), perm("231"));
        assert_eq!(first_pass(&Permutation::empty(), &perm("12")).unwrap(), Permutation::empty());
    }

    #[test]
    fn first_pass_reverses_sigma_reverse_avoiders() {
        for sigma in ["123", "132", "213", "231", "312", "321", "1324", "2143"] {
            let sigma = perm(sigma);
            let sr = sigma.reverse();
            for pi in all_permutations(6).filter(|p| p.avoids(&sr)) {
                assert_eq!(first_pass(&pi, &sigma).unwrap(), pi.reverse());
            }
        }
    }

    #[test]
    fn run_machine_examples() {
        for n in 0..=6 {
            let id = Permutation::identity(n);
            assert_eq!(run_machine(&id, &perm("123")).unwrap().0, id);
        }
        assert_eq!(run_machine(&perm("4132"), &perm("123")).unwrap().0, perm("1234"));
        assert_eq!(run_machine(&perm("2413"), &perm("132")).unwrap().0, perm("1234"));
    }

    #[test]
    fn run_machine_equals_two_pass_composition() {
        // σ-pass followed by Stacksort of its output
        for sigma in ["12", "21", "123", "132", "213", "231", "312", "321", "1432"] {
            let sigma = perm(sigma);
            for pi in all_permutations(6) {
                let two_pass = stacksort(&first_pass(&pi, &sigma).unwrap());
                assert_eq!(run_machine(&pi, &sigma).unwrap().0, two_pass, "{pi} {sigma}");
            }
        }
    }

    #[test]
    fn sortability_examples() {
        let s = |p: &str, q: &str| is_sortable(&perm(p), &perm(q)).unwrap();
        assert!(s("4132", "123"));
        assert!(!s("132", "123"));
        assert!(s("361425", "231"));
        assert!(!s("1324", "231"));
        assert!(s("2413", "132"));
    }

    #[test]
    fn stacksort_examples() {
        assert_eq!(stacksort(&perm("231")), perm("213"));
        assert_eq!(stacksort(&Permutation::identity(6)), Permutation::identity(6));
        assert_eq!(stacksort(&perm("321")), perm("123"));
    }

    #[test]
    fn trace_counts_and_replay() {
        let sigmas = ["12", "123", "231", "2413"].map(perm);
        for pi in all_permutations(6) {
            for sigma in &sigmas {
                let (out, trace) = run_machine(&pi, sigma).unwrap();
                let n = pi.len();
                assert_eq!(trace.count(Move::PushSigma), n);
                assert_eq!(trace.count(Move::PushIncreasing), n);
                assert_eq!(trace.count(Move::Output), n);
                assert_eq!(trace.replay(&pi).unwrap(), out);
                let mut sorted = out.values().to_vec();
                sorted.sort_unstable();
                assert_eq!(sorted, Permutation::identity(n).into_values());
            }
        }
    }

    #[test]
    fn trace_text_and_json() {
        let (_, trace) = run_machine(&perm("4132"), &perm("123")).unwrap();
        let text = trace.to_text();
        assert!(text.starts_with("Sσ 4\nSσ 1\nSσ 3\nSI 3\n"));
        assert_eq!(MachineTrace::from_text(&text).unwrap(), trace);
        let json = serde_json::to_value(&trace).unwrap();
        assert_eq!(json[0], serde_json::json!({"step": 0, "move": "Sσ", "value": 4}));
        let back: MachineTrace = serde_json::from_value(json).unwrap();
        assert_eq!(back, trace);
        assert!(MachineTrace::from_text("Sx 3").is_err());
    }

    #[test]
    fn replay_rejects_tampered_trace() {
        let pi = perm("4132");
        let (_, mut trace) = run_machine(&pi, &perm("123")).unwrap();
        trace.steps[3].value = 4;
        assert!(trace.replay(&pi).is_err());
        let (_, mut trace) = run_machine(&pi, &perm("123")).unwrap();
        trace.steps.pop();
        assert!(trace.replay(&pi).is_err());
    }
}
