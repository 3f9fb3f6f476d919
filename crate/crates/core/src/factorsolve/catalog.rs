//! Exchange templates over one, two or three paths.
//!
//! Vertices are named by slot and position: `a1..ak` for the first path,
//! `b1..` and `c1..` for the others. A slot's type is oriented: `a1a2` carries
//! the first sign. Preconditions fix the label of every added edge (and of any
//! chord the exchange relies on), so each template has a fixed delta.

use std::fmt;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role {
    pub slot: u8,
    pub pos: u8,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.slot) as char, self.pos + 1)
    }
}

pub type RoleEdge = (Role, Role);

#[derive(Clone, Debug)]
pub struct Template {
    pub name: String,
    /// Family the template belongs to, named by its slot types.
    pub family: String,
    pub k: usize,
    pub slots: Vec<Vec<i8>>,
    pub pre: Vec<(Role, Role, i8)>,
    pub out: Vec<RoleEdge>,
    pub inn: Vec<RoleEdge>,
    pub delta: i64,
}

impl Template {
    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    /// Label of a role edge when it is a slot edge or a precondition.
    pub fn known_label(&self, a: Role, b: Role) -> Option<i8> {
        if a.slot == b.slot && a.pos.abs_diff(b.pos) == 1 {
            return Some(self.slots[a.slot as usize][a.pos.min(b.pos) as usize]);
        }
        self.pre
            .iter()
            .find(|&&(x, y, _)| (x, y) == (a, b) || (y, x) == (a, b))
            .map(|&(_, _, s)| s)
    }

    /// One line per template, used by the snapshot test.
    pub fn describe(&self) -> String {
        let ty = |t: &Vec<i8>| t.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect::<String>();
        let slots: Vec<String> = self.slots.iter().map(ty).collect();
        let edge = |&(a, b): &RoleEdge| format!("{a}{b}");
        let pre: Vec<String> =
            self.pre.iter().map(|&(a, b, s)| format!("{a}{b}{}", if s > 0 { '+' } else { '-' })).collect();
        format!(
            "{} [{}] pre {} | -{{{}}} +{{{}}} delta {}",
            self.name,
            slots.join(","),
            pre.join(" "),
            self.out.iter().map(edge).collect::<Vec<_>>().join(","),
            self.inn.iter().map(edge).collect::<Vec<_>>().join(","),
            self.delta
        )
    }
}

fn role(tok: &str) -> Role {
    let b = tok.as_bytes();
    assert!(b.len() == 2 && (b'a'..=b'c').contains(&b[0]) && (b'1'..=b'4').contains(&b[1]), "bad role {tok}");
    Role { slot: b[0] - b'a', pos: b[1] - b'1' }
}

fn role_edge(tok: &str) -> RoleEdge {
    (role(&tok[..2]), role(&tok[2..4]))
}

fn signs(ty: &str) -> Vec<i8> {
    ty.chars().map(|c| if c == '+' { 1 } else { -1 }).collect()
}

struct Builder {
    k: usize,
    out: Vec<Template>,
}

impl Builder {
    #[allow(clippy::too_many_arguments)]
    fn add(&mut self, family: &str, tag: &str, slots: &[&str], pre: &str, out: &str, inn: &str, delta: i64) {
        let pre = pre
            .split_whitespace()
            .map(|t| {
                let (e, s) = t.split_at(4);
                let (a, b) = role_edge(e);
                (a, b, if s == "+" { 1 } else { -1 })
            })
            .collect();
        let slots: Vec<Vec<i8>> = slots.iter().map(|s| signs(s)).collect();
        for s in &slots {
            assert_eq!(s.len() + 1, self.k);
        }
        self.out.push(Template {
            name: format!("{family}/{tag}"),
            family: family.to_string(),
            k: self.k,
            slots,
            pre,
            out: out.split_whitespace().map(role_edge).collect(),
            inn: inn.split_whitespace().map(role_edge).collect(),
            delta,
        });
    }
}

fn cross(xs: &[&str], ys: &[&str]) -> Vec<String> {
    xs.iter().flat_map(|x| ys.iter().map(move |y| format!("{x}{y}"))).collect()
}

fn p3_catalog() -> Vec<Template> {
    let mut b = Builder { k: 3, out: Vec::new() };
    for t in ["++", "+-"] {
        b.add(&format!("p3:{t}"), "chord", &[t], "a1a3-", "a1a2", "a1a3", -2);
    }
    let f = "p3:++/+-";
    b.add(f, "1", &["++", "+-"], "a1b1- a3b3-", "a1a2 b2b3", "a1b1 a3b3", -2);
    b.add(f, "2", &["++", "+-"], "a1b1- a3b3+", "a2a3 b1b2", "a1b1 a3b3", -2);
    b.add(f, "3", &["++", "+-"], "a1b1+ a3b3-", "a2a3 b1b2", "a1b1 a3b3", -2);
    let f = "p3:++/--";
    b.add(f, "1", &["++", "--"], "a1b1- a3b3-", "a1a2 b2b3", "a1b1 a3b3", -2);
    b.add(f, "2", &["++", "--"], "a1b1- a2b2- a1a3+", "a1a2 a2a3 b1b2", "a1b1 a1a3 a2b2", -2);
    let f = "p3:+-/+-";
    b.add(f, "1", &["+-", "+-"], "a1b1- a3b3-", "a2a3 b1b2", "a1b1 a3b3", -2);
    b.add(f, "2", &["+-", "+-"], "a1b1- a1b2- a3b3+", "a1a2 b1b2 b2b3", "a1b1 a1b2 a3b3", -2);
    b.add(f, "3", &["+-", "+-"], "a1b1+ a1b2- a2b3-", "a1a2 b1b2 b2b3", "a1b1 a1b2 a2b3", -2);
    let f = "p3:++/++";
    b.add(f, "1", &["++", "++"], "a1b1- a3b3+", "a1a2 b2b3", "a1b1 a3b3", -2);
    b.add(f, "swing", &["++", "++"], "a1b1- a3b3-", "a1a2 b2b3", "a1b1 a3b3", -4);
    b.out
}

fn p4_catalog() -> Vec<Template> {
    let mut b = Builder { k: 4, out: Vec::new() };
    const POS_TYPES: [&str; 5] = ["+++", "++-", "+-+", "+--", "-+-"];
    for t in POS_TYPES {
        for (i, e) in ["a1a2", "a2a3", "a3a4"].iter().enumerate() {
            if t.as_bytes()[i] == b'+' {
                b.add(&format!("p4:{t}"), &format!("close-{e}"), &[t], "a1a4-", e, "a1a4", -2);
            }
        }
    }
    for t in ["+++", "++-", "-+-"] {
        for e in ["a1a3", "a2a4"] {
            b.add(&format!("p4:{t}"), &format!("chord-{e}"), &[t], &format!("{e}-"), "a2a3", e, -2);
        }
    }

    let (hi_a, lo_a) = (["a3", "a4"], ["a1", "a2"]);
    let (hi_b, lo_b) = (["b3", "b4"], ["b1", "b2"]);

    let f = "p4:+++/++-";
    let s = &["+++", "++-"];
    for e in cross(&hi_a, &hi_b) {
        for e2 in cross(&lo_a, &lo_b) {
            b.add(f, &format!("1[{e},{e2}]"), s, &format!("{e}- {e2}+"), "a2a3 b2b3", &format!("{e} {e2}"), -2);
        }
    }
    for (bh, bl) in [("b3", "b1"), ("b4", "b2")] {
        for e in cross(&hi_a, &[bh]) {
            for e2 in cross(&lo_a, &[bl]) {
                b.add(
                    f,
                    &format!("2[{e},{e2}]"),
                    s,
                    &format!("{e}- {e2}- b1b4+"),
                    "a2a3 b1b2 b3b4",
                    &format!("{e} {e2} b1b4"),
                    -2,
                );
            }
        }
    }
    for (bh, bl) in [("b3", "b2"), ("b4", "b1")] {
        for e in cross(&hi_a, &[bh]) {
            for e2 in cross(&lo_a, &[bl]) {
                b.add(
                    f,
                    &format!("3[{e},{e2}]"),
                    s,
                    &format!("{e}- {e2}- b1b3+ b2b4+"),
                    "a2a3 b1b2 b2b3 b3b4",
                    &format!("{e} {e2} b1b3 b2b4"),
                    -2,
                );
            }
        }
    }
    for e in cross(&lo_a, &lo_b) {
        b.add(f, &format!("4[{e}]"), s, &format!("{e}- a4b4+"), "a2a3 b2b3", &format!("{e} a4b4"), -2);
    }

    let f = "p4:+++/-+-";
    let s = &["+++", "-+-"];
    b.add(f, "1", s, "a2b2- a4b4- a1a3+ b1b3+", "a1a2 a2a3 b2b3 b3b4", "a2b2 a4b4 a1a3 b1b3", -2);
    b.add(f, "2", s, "a2b2- a4b4+", "a2a3 b2b3", "a2b2 a4b4", -2);
    b.add(f, "3", s, "a1b1- a3b3+", "a2a3 b2b3", "a1b1 a3b3", -2);

    for (f, s) in [("p4:++-/-+-", &["++-", "-+-"]), ("p4:++-/++-", &["++-", "++-"])] {
        b.add(f, "1", s, "a2b2- a4b4- a1a4+", "a1a2 a3a4 b2b3", "a2b2 a4b4 a1a4", -2);
        b.add(f, "2", s, "a2b2+ a4b4-", "a2a3 b2b3", "a2b2 a4b4", -2);
        b.add(f, "3", s, "a2b2- a4b4+", "a2a3 b2b3", "a2b2 a4b4", -2);
    }
    let f = "p4:++-/++-";
    let s = &["++-", "++-"];
    b.add(f, "4", s, "a3b2- a2b3+", "a2a3 b2b3", "a3b2 a2b3", -2);
    b.add(f, "5", s, "a3b2- a2b3- a1a3+ a2a4+", "a1a2 a2a3 a3a4 b2b3", "a3b2 a2b3 a1a3 a2a4", -2);

    let f = "p4:+++/+++";
    b.add(f, "1", &["+++", "+++"], "a2b2- a4b4+", "a2a3 b2b3", "a2b2 a4b4", -2);
    for c in ["++-", "-+-", "+--"] {
        b.add(
            f,
            &format!("2[{c}]"),
            &["+++", "+++", c],
            "a1b2- a2b1- c1c4+",
            "a1a2 b1b2 c3c4",
            "a1b2 a2b1 c1c4",
            -2,
        );
    }

    for (f, s) in [("p4:+++/---", ["+++", "---"]), ("p4:++-/---", ["++-", "---"]), ("p4:-+-/---", ["-+-", "---"])] {
        for e in cross(&lo_a, &lo_b) {
            for e2 in cross(&hi_a, &hi_b) {
                b.add(f, &format!("1[{e},{e2}]"), &s, &format!("{e}- {e2}-"), "a2a3 b2b3", &format!("{e} {e2}"), -2);
            }
        }
    }
    let f = "p4:+++/---";
    b.add(
        f,
        "2",
        &["+++", "---"],
        "a1b1- a2b1- a2b2- a3b3+",
        "a1a2 a2a3 b1b2 b2b3",
        "a1b1 a2b1 a2b2 a3b3",
        -2,
    );

    let f = "p4:+++/+--";
    let s = &["+++", "+--"];
    b.add(f, "1", s, "a1b1- a2b2- a1a4+ b1b4+", "a1a2 a3a4 b1b2 b3b4", "a1b1 a2b2 a1a4 b1b4", -2);
    b.add(f, "2", s, "a1b1- a2b2+ a1a3+", "a1a2 a2a3 b1b2", "a1b1 a2b2 a1a3", -2);
    b.add(f, "3", s, "a4b4- a1b1+", "a3a4 b1b2", "a1b1 a4b4", -2);

    let f = "p4:++-/+--";
    let s = &["++-", "+--"];
    b.add(f, "1", s, "a3b1- a2b4-", "a2a3 b2b3", "a3b1 a2b4", -2);
    b.add(f, "2", s, "a3b1- a2b4+ a1a4+", "a1a2 a2a3 b1b2", "a3b1 a2b4 a1a4", -2);
    b.add(f, "3", s, "a1b2+ a2b1-", "a1a2 b1b2", "a1b2 a2b1", -2);
    b.add(f, "4", s, "a1b2- a2b1- a1a4+ b1b4+", "a1a2 a2a3 b1b2 b2b3", "a1b2 a2b1 a1a4 b1b4", -2);
    b.add(f, "5", s, "a1b2- a2b1+", "a1a2 b1b2", "a1b2 a2b1", -2);

    let f = "p4:-+-/+--";
    let s = &["-+-", "+--"];
    for e in cross(&lo_a, &["b2"]) {
        for e2 in cross(&hi_a, &["b4"]) {
            b.add(
                f,
                &format!("1[{e},{e2}]"),
                s,
                &format!("{e}- {e2}- b1b4+"),
                "a2a3 b1b2 b3b4",
                &format!("{e} {e2} b1b4"),
                -2,
            );
        }
    }
    for e in cross(&lo_a, &["b1"]) {
        for e2 in cross(&hi_a, &["b3"]) {
            b.add(f, &format!("2[{e},{e2}]"), s, &format!("{e}- {e2}-"), "a2a3 b2b3", &format!("{e} {e2}"), -2);
        }
    }

    let f = "p4:+--/---";
    let s = &["+--", "---"];
    for e in cross(&["a1"], &["b1", "b3"]) {
        for e2 in cross(&["a2", "a4"], &["b4"]) {
            b.add(f, &format!("1[{e},{e2}]"), s, &format!("{e}- {e2}-"), "a1a2 b3b4", &format!("{e} {e2}"), -2);
        }
    }
    for e in cross(&["a1"], &["b2", "b4"]) {
        for e2 in cross(&["a2", "a4"], &["b1"]) {
            b.add(f, &format!("2[{e},{e2}]"), s, &format!("{e}- {e2}-"), "a1a2 b1b2", &format!("{e} {e2}"), -2);
        }
    }

    let f = "p4:-+-/-+-";
    let s = &["-+-", "-+-"];
    b.add(f, "1", s, "a1b1- a3b3+", "a2a3 b2b3", "a1b1 a3b3", -2);
    b.add(f, "swing", s, "a1b1- a3b3-", "a2a3 b2b3", "a1b1 a3b3", -4);

    let f = "p4:+--/+--";
    let s = &["+--", "+--"];
    b.add(f, "1", s, "a2b1- a1b2+", "a1a2 b1b2", "a2b1 a1b2", -2);
    b.add(f, "1-swing", s, "a2b1- a1b2-", "a1a2 b1b2", "a2b1 a1b2", -4);
    b.add(f, "2", s, "a1b1- a3b1- a2b2+", "a1a2 a2a3 b1b2", "a1b1 a3b1 a2b2", -2);
    b.add(f, "2-swing", s, "a1b1- a3b1- a2b2-", "a1a2 a2a3 b1b2", "a1b1 a3b1 a2b2", -4);
    b.out
}

/// All templates for paths on `k` vertices (empty for other `k`).
pub fn catalog(k: usize) -> &'static [Template] {
    static P3: OnceLock<Vec<Template>> = OnceLock::new();
    static P4: OnceLock<Vec<Template>> = OnceLock::new();
    match k {
        3 => P3.get_or_init(p3_catalog),
        4 => P4.get_or_init(p4_catalog),
        _ => &[],
    }
}

/// Text listing of a catalog, one template per line.
pub fn snapshot(k: usize) -> String {
    catalog(k).iter().map(|t| t.describe() + "\n").collect()
}
