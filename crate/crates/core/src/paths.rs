//! Dyck and Schröder paths and the bijections linking them to sortable
//! permutations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::machine::SigmaMachine;
use crate::perm::{perm, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    /// `(1, 1)`
    U,
    /// `(1, -1)`
    D,
    /// The double horizontal step `(2, 0)`.
    H,
}

impl Step {
    fn letter(self) -> char {
        match self {
            Step::U => 'U',
            Step::D => 'D',
            Step::H => 'H',
        }
    }
}

fn parse_steps(s: &str, allow_h: bool) -> Result<Vec<Step>> {
    let mut steps = Vec::new();
    for (i, c) in s.chars().enumerate() {
        let step = match c {
            'U' | 'u' => Step::U,
            'D' | 'd' => Step::D,
            'H' | 'h' if allow_h => Step::H,
            c if c.is_whitespace() || c == '2' => continue,
            _ => {
                return Err(Error::Parse { position: i + 1, message: format!("unexpected step letter {c:?}") });
            }
        };
        steps.push(step);
    }
    Ok(steps)
}

/// Checks `#U = #D` and that no prefix dips below the axis.
fn check_balanced(steps: &[Step]) -> Result<()> {
    let mut h: i64 = 0;
    for (i, s) in steps.iter().enumerate() {
        match s {
            Step::U => h += 1,
            Step::D => h -= 1,
            Step::H => {}
        }
        if h < 0 {
            return Err(Error::MalformedPath(format!("path falls below the axis at step {}", i + 1)));
        }
    }
    if h != 0 {
        return Err(Error::MalformedPath(format!("path ends at height {h}")));
    }
    Ok(())
}

/// For each step index, the index of its matching partner (U ↔ D); `None` for H.
fn matching(steps: &[Step]) -> Vec<Option<usize>> {
    let mut partner = vec![None; steps.len()];
    let mut open = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        match s {
            Step::U => open.push(i),
            Step::D => {
                let j = open.pop().expect("balanced path");
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
            Step::H => {}
        }
    }
    partner
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DyckPath {
    steps: Vec<Step>,
}

impl DyckPath {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if steps.contains(&Step::H) {
            return Err(Error::MalformedPath("a Dyck path has no horizontal steps".into()));
        }
        check_balanced(&steps)?;
        Ok(DyckPath { steps })
    }

    pub fn empty() -> Self {
        DyckPath::default()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn semilength(&self) -> usize {
        self.steps.len() / 2
    }

    /// Maximum height reached.
    pub fn height(&self) -> usize {
        let mut h = 0usize;
        let mut best = 0;
        for s in &self.steps {
            match s {
                Step::U => {
                    h += 1;
                    best = best.max(h);
                }
                _ => h -= 1,
            }
        }
        best
    }

    /// Every Dyck path of the given semilength, `U` before `D` lexicographically.
    pub fn all(semilength: usize) -> Vec<DyckPath> {
        fn go(up: usize, down: usize, cur: &mut Vec<Step>, out: &mut Vec<DyckPath>) {
            if up == 0 && down == 0 {
                out.push(DyckPath { steps: cur.clone() });
                return;
            }
            if up > 0 {
                cur.push(Step::U);
                go(up - 1, down, cur, out);
                cur.pop();
            }
            if down > up {
                cur.push(Step::D);
                go(up, down - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(semilength, semilength, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SchroderPath {
    steps: Vec<Step>,
}

impl SchroderPath {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        check_balanced(&steps)?;
        Ok(SchroderPath { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// `#U + #H`.
    pub fn semilength(&self) -> usize {
        self.steps.iter().filter(|&&s| s != Step::D).count()
    }

    pub fn concat(parts: &[&[Step]]) -> Result<Self> {
        SchroderPath::new(parts.concat())
    }

    /// Every Schröder path of the given semilength.
    pub fn all(semilength: usize) -> Vec<SchroderPath> {
        fn go(budget: usize, height: usize, cur: &mut Vec<Step>, out: &mut Vec<SchroderPath>) {
            if budget == 0 && height == 0 {
                out.push(SchroderPath { steps: cur.clone() });
                return;
            }
            if budget > 0 {
                cur.push(Step::U);
                go(budget - 1, height + 1, cur, out);
                cur.pop();
                cur.push(Step::H);
                go(budget - 1, height, cur, out);
                cur.pop();
            }
            if height > 0 {
                cur.push(Step::D);
                go(budget, height - 1, cur, out);
                cur.pop();
            }
        }
        // `budget` counts the U and H steps still to place
        let mut out = Vec::new();
        go(semilength, 0, &mut Vec::new(), &mut out);
        out
    }

    /// Splits a path of shape `H^a Q H^b` into `(a, Q, b)`; `None` if it has another shape.
    /// An all-`H` path is reported with `b = 0`.
    pub fn split_h_dyck_h(&self) -> Option<(usize, DyckPath, usize)> {
        let lead = self.steps.iter().take_while(|&&s| s == Step::H).count();
        if lead == self.steps.len() {
            return Some((lead, DyckPath::empty(), 0));
        }
        let trail = self.steps.iter().rev().take_while(|&&s| s == Step::H).count();
        let core = &self.steps[lead..self.steps.len() - trail];
        if core.contains(&Step::H) {
            return None;
        }
        Some((lead, DyckPath::new(core.to_vec()).ok()?, trail))
    }
}

/// No `U`, `H`, `D` at increasing indices.
pub fn avoids_uhd(path: &SchroderPath) -> bool {
    let mut seen_u = false;
    let mut seen_uh = false;
    for s in path.steps() {
        match s {
            Step::U => seen_u = true,
            Step::H if seen_u => seen_uh = true,
            Step::D if seen_uh => return false,
            _ => {}
        }
    }
    true
}

/// Structural form of [`avoids_uhd`]: every `H` comes before all `U` steps or after all `D` steps.
pub fn avoids_uhd_structural(path: &SchroderPath) -> bool {
    let s = path.steps();
    let first_u = s.iter().position(|&x| x == Step::U);
    let last_d = s.iter().rposition(|&x| x == Step::D);
    s.iter().enumerate().filter(|&(_, &x)| x == Step::H).all(|(i, _)| {
        first_u.is_none_or(|u| i < u) || last_d.is_none_or(|d| i > d)
    })
}

/// Labels down steps `1..k` from right to left, gives each up step the label
/// of its matching down step, and reads the up-step labels left to right.
pub fn av213_from_dyck(path: &DyckPath) -> Permutation {
    let (labels, _) = up_labels(path.steps());
    Permutation::from_vec_unchecked(labels)
}

/// Up-step labels in path order, plus the label of every step (0 for `H`).
fn up_labels(steps: &[Step]) -> (Vec<u32>, Vec<u32>) {
    let partner = matching(steps);
    let mut label = vec![0u32; steps.len()];
    let mut next = 1;
    for i in (0..steps.len()).rev() {
        if steps[i] == Step::D {
            label[i] = next;
            label[partner[i].unwrap()] = next;
            next += 1;
        }
    }
    let ups = (0..steps.len()).filter(|&i| steps[i] == Step::U).map(|i| label[i]).collect();
    (ups, label)
}

/// Inverse of [`av213_from_dyck`].
pub fn dyck_from_av213(rho: &Permutation) -> Result<DyckPath> {
    if let Some(w) = rho.contains(&perm("213")) {
        return Err(Error::Precondition(format!("{rho} contains 213 at positions {:?}", w.positions)));
    }
    // Down labels appear as k, k-1, …, 1 from left to right, and a down step
    // closes the most recent open up step; closing greedily is forced.
    let k = rho.len() as u32;
    let mut steps = Vec::with_capacity(2 * rho.len());
    let mut open: Vec<u32> = Vec::new();
    let mut next_down = k;
    for &v in rho.values() {
        steps.push(Step::U);
        open.push(v);
        while open.last() == Some(&next_down) {
            open.pop();
            steps.push(Step::D);
            next_down -= 1;
        }
    }
    if !open.is_empty() {
        return Err(Error::Precondition(format!("{rho} is not the image of a Dyck path")));
    }
    DyckPath::new(steps)
}

fn sortable123(pi: &Permutation) -> bool {
    SigmaMachine::new(&perm("123")).unwrap().sorts(pi.values())
}

fn starts_with_descent(pi: &Permutation) -> bool {
    pi.len() >= 2 && pi.values()[0] > pi.values()[1]
}

/// Inserts the new maximum `n` after `n-1`, or after `n-2` when `π1 = n-1`.
pub fn phi(pi: &Permutation) -> Result<Permutation> {
    if !starts_with_descent(pi) || !sortable123(pi) {
        return Err(Error::Precondition(format!("{pi} is not a 123-sortable permutation starting with a descent")));
    }
    let m = pi.len() as u32;
    let anchor = if pi.values()[0] == m { m - 1 } else { m };
    pi.insert_max_after(pi.position_of(anchor).unwrap())
}

/// Deletes the maximum; inverse of [`phi`] on its image.
pub fn psi(alpha: &Permutation) -> Result<Permutation> {
    let n = alpha.len() as u32;
    if !starts_with_descent(alpha) || alpha.values()[0] == n || !sortable123(alpha) {
        return Err(Error::Precondition(format!(
            "{alpha} is not a 123-sortable permutation starting with a descent and with at least two LTR maxima"
        )));
    }
    alpha.delete_at(alpha.position_of(n).unwrap())
}

/// The bijection from `Sort_n(123)` to `UHD`-avoiding Schröder paths of semilength `n - 1`.
pub fn schroder_from_sortable123(pi: &Permutation) -> Result<SchroderPath> {
    if pi.is_empty() || !sortable123(pi) {
        return Err(Error::Precondition(format!("{pi} is not a nonempty 123-sortable permutation")));
    }
    let (r, mut w) = pi.deflate_leading_run()?;
    let mut s = 0;
    while w.values()[0] != w.len() as u32 {
        w = w.delete_at(w.position_of(w.len() as u32).unwrap())?;
        s += 1;
    }
    let core = w.delete_at(1)?;
    let dyck = dyck_from_av213(&core)?;
    let h = [Step::H];
    let lead: Vec<Step> = h.repeat(r);
    let trail: Vec<Step> = h.repeat(s);
    SchroderPath::concat(&[&lead, dyck.steps(), &trail])
}

/// Inverse of [`schroder_from_sortable123`].
pub fn sortable123_from_schroder(path: &SchroderPath) -> Result<Permutation> {
    if !avoids_uhd(path) {
        return Err(Error::Precondition("path contains the pattern U H D".into()));
    }
    let (r, q, s) = path.split_h_dyck_h().expect("UHD-avoiding paths are H^a Q H^b");
    let core = av213_from_dyck(&q);
    let k = core.len() as u32;
    let mut rho = Vec::with_capacity(core.len() + 1);
    rho.push(k + 1);
    rho.extend_from_slice(core.values());
    let mut pi = Permutation::from_vec_unchecked(rho);
    for _ in 0..s {
        pi = phi(&pi)?;
    }
    pi.inflate(1, r + 1)
}

impl fmt::Display for DyckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.steps.iter().try_for_each(|s| write!(f, "{}", s.letter()))
    }
}

impl fmt::Display for SchroderPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.steps.iter().try_for_each(|s| write!(f, "{}", s.letter()))
    }
}

impl FromStr for DyckPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DyckPath::new(parse_steps(s, false)?)
    }
}

/// Accepts `H` for the double horizontal step; `H2` is tolerated as an alias.
impl FromStr for SchroderPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SchroderPath::new(parse_steps(s, true)?)
    }
}

macro_rules! serde_as_string {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_as_string!(DyckPath);
serde_as_string!(SchroderPath);

/// Step letters as a JSON array, e.g. `["H","U","D"]`.
pub fn steps_json(steps: &[Step]) -> serde_json::Value {
    serde_json::Value::Array(steps.iter().map(|s| s.letter().to_string().into()).collect())
}

/// Labels drawn on a rendered path: Dyck up steps carry their
/// [`av213_from_dyck`] labels; other steps are unlabeled.
fn render_labels(steps: &[Step]) -> Vec<Option<u32>> {
    let (_, labels) = if steps.contains(&Step::H) {
        // only the UD skeleton is labeled
        let skeleton: Vec<usize> = (0..steps.len()).filter(|&i| steps[i] != Step::H).collect();
        let sub: Vec<Step> = skeleton.iter().map(|&i| steps[i]).collect();
        let (_, sub_labels) = up_labels(&sub);
        let mut all = vec![0; steps.len()];
        for (j, &i) in skeleton.iter().enumerate() {
            all[i] = sub_labels[j];
        }
        (Vec::new(), all)
    } else {
        up_labels(steps)
    };
    steps.iter().zip(labels).map(|(s, l)| (*s == Step::U).then_some(l)).collect()
}

/// ASCII drawing with `/`, `\` and `__`, up-step labels above each `/`.
pub fn render_ascii(steps: &[Step]) -> String {
    let labels = render_labels(steps);
    let max_h = {
        let mut h = 0i64;
        let mut m = 0;
        for s in steps {
            match s {
                Step::U => h += 1,
                Step::D => h -= 1,
                Step::H => {}
            }
            m = m.max(h);
        }
        m as usize
    };
    let width: usize = steps.iter().map(|s| if *s == Step::H { 2 } else { 1 }).sum();
    // one extra row on top for labels
    let rows = max_h + 1;
    let mut grid = vec![vec![' '; width.max(1)]; rows + 1];
    let (mut x, mut h) = (0usize, 0usize);
    for (s, label) in steps.iter().zip(&labels) {
        match s {
            Step::U => {
                let row = rows - 1 - h;
                grid[row][x] = '/';
                if let Some(l) = label {
                    let c = std::char::from_digit(*l % 36, 36).unwrap_or('*');
                    grid[row - 1][x] = c;
                }
                h += 1;
                x += 1;
            }
            Step::D => {
                h -= 1;
                grid[rows - 1 - h][x] = '\\';
                x += 1;
            }
            Step::H => {
                grid[rows - 1 - h][x] = '_';
                grid[rows - 1 - h][x + 1] = '_';
                x += 2;
            }
        }
    }
    let mut out = String::new();
    for row in grid {
        let line: String = row.into_iter().collect();
        let trimmed = line.trim_end();
        if !trimmed.is_empty() {
            out.push_str(trimmed);
            out.push('\n');
        }
    }
    out
}

/// Minimal standalone SVG of the path with up-step labels.
pub fn render_svg(steps: &[Step]) -> String {
    const UNIT: i64 = 30;
    let labels = render_labels(steps);
    let width: i64 = steps.iter().map(|s| if *s == Step::H { 2 } else { 1 }).sum();
    let mut h = 0i64;
    let mut max_h = 0;
    for s in steps {
        h += match s {
            Step::U => 1,
            Step::D => -1,
            Step::H => 0,
        };
        max_h = max_h.max(h);
    }
    let (w_px, h_px) = ((width + 2) * UNIT, (max_h + 2) * UNIT);
    let to_px = |x: i64, y: i64| (UNIT + x * UNIT, h_px - UNIT - y * UNIT);
    let mut points = vec![to_px(0, 0)];
    let mut text = String::new();
    let (mut x, mut y) = (0i64, 0i64);
    for (s, label) in steps.iter().zip(&labels) {
        let (dx, dy) = match s {
            Step::U => (1, 1),
            Step::D => (1, -1),
            Step::H => (2, 0),
        };
        if let Some(l) = label {
            let (px, py) = to_px(x, y);
            text.push_str(&format!(
                "  <text x=\"{}\" y=\"{}\" font-size=\"14\" font-weight=\"bold\">{l}</text>\n",
                px + 2,
                py - 12
            ));
        }
        x += dx;
        y += dy;
        points.push(to_px(x, y));
    }
    let poly: Vec<String> = points.iter().map(|(a, b)| format!("{a},{b}")).collect();
    let (ax0, ay) = to_px(0, 0);
    let (ax1, _) = to_px(width, 0);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w_px}\" height=\"{h_px}\">\n  \
         <line x1=\"{ax0}\" y1=\"{ay}\" x2=\"{ax1}\" y2=\"{ay}\" stroke=\"#999\" stroke-width=\"1\"/>\n  \
         <polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n{text}</svg>\n",
        poly.join(" ")
    )
}
