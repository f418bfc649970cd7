//! Disjoint-pair combinatorics of a column.
//!
//! Triangles stacked in a column are labeled bottom to top; odd labels are
//! R-triangles, even labels L-triangles, and two triangles share an edge
//! exactly when their labels are consecutive. A disjoint L/R pair is then a
//! couple of one even and one odd label differing by more than 1.
//!
//! Two operations live here: exact maximum extraction of disjoint pairs
//! from an occupancy pattern, and the constructive three-coloring of N
//! couples such that no two numbers in same-colored couples are adjacent
//! and every color is used at least `floor(N/3)` times. The coloring
//! follows the gluing-and-shifting reduction to at most two runs of
//! consecutive integers, colors the runs by a periodic base scheme, patches
//! the remainders, and pulls colors back to the original labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Occupancy pattern of a column: `positions` triangles labeled `1..=K`
/// bottom to top, of which the odd subset (R-triangles) and the even subset
/// (L-triangles) are actually present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnOccupancy {
    positions: u32,
    odds: Vec<i64>,
    evens: Vec<i64>,
}

impl ColumnOccupancy {
    pub fn new(positions: u32, odds: Vec<i64>, evens: Vec<i64>) -> Result<Self> {
        let check = |name: &str, v: &[i64], parity: i64| -> Result<()> {
            let mut seen = std::collections::BTreeSet::new();
            for &x in v {
                if x < 1 || x > positions as i64 {
                    return Err(Error::MalformedPairing(format!(
                        "{name} label {x} outside 1..={positions}"
                    )));
                }
                if x.rem_euclid(2) != parity {
                    return Err(Error::MalformedPairing(format!(
                        "{name} label {x} has the wrong parity"
                    )));
                }
                if !seen.insert(x) {
                    return Err(Error::MalformedPairing(format!("duplicate label {x}")));
                }
            }
            Ok(())
        };
        check("odd", &odds, 1)?;
        check("even", &evens, 0)?;
        Ok(ColumnOccupancy {
            positions,
            odds,
            evens,
        })
    }

    /// Pattern from a presence bitmask over positions `1..=K`.
    pub fn from_mask(positions: u32, mask: u32) -> Result<Self> {
        let mut odds = Vec::new();
        let mut evens = Vec::new();
        for pos in 1..=positions as i64 {
            if mask & (1 << (pos - 1)) != 0 {
                if pos % 2 == 1 {
                    odds.push(pos);
                } else {
                    evens.push(pos);
                }
            }
        }
        ColumnOccupancy::new(positions, odds, evens)
    }

    pub fn odds(&self) -> &[i64] {
        &self.odds
    }

    pub fn evens(&self) -> &[i64] {
        &self.evens
    }
}

/// Maximum-cardinality set of disjoint (even, odd) couples: an even and an
/// odd label may be coupled iff they differ by more than 1, and each label
/// belongs to at most one couple. Exact augmenting-path matching; column
/// occupancies are small.
pub fn max_delta_pairs(occupancy: &ColumnOccupancy) -> Vec<(i64, i64)> {
    let evens = &occupancy.evens;
    let odds = &occupancy.odds;
    let compatible = |e: i64, o: i64| -> bool { (e - o).abs() > 1 };
    let mut matched_odd: Vec<Option<usize>> = vec![None; odds.len()];
    let mut matched_even: Vec<Option<usize>> = vec![None; evens.len()];

    fn augment(
        e: usize,
        evens: &[i64],
        odds: &[i64],
        compatible: &impl Fn(i64, i64) -> bool,
        visited: &mut [bool],
        matched_odd: &mut [Option<usize>],
        matched_even: &mut [Option<usize>],
    ) -> bool {
        for (o, &odd) in odds.iter().enumerate() {
            if !visited[o] && compatible(evens[e], odd) {
                visited[o] = true;
                let free = match matched_odd[o] {
                    None => true,
                    Some(prev) => augment(
                        prev,
                        evens,
                        odds,
                        compatible,
                        visited,
                        matched_odd,
                        matched_even,
                    ),
                };
                if free {
                    matched_odd[o] = Some(e);
                    matched_even[e] = Some(o);
                    return true;
                }
            }
        }
        false
    }

    for e in 0..evens.len() {
        let mut visited = vec![false; odds.len()];
        augment(
            e,
            evens,
            odds,
            &compatible,
            &mut visited,
            &mut matched_odd,
            &mut matched_even,
        );
    }
    matched_even
        .iter()
        .enumerate()
        .filter_map(|(e, o)| o.map(|o| (evens[e], odds[o])))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairColor {
    Red,
    Green,
    Blue,
}

const COLORS: [PairColor; 3] = [PairColor::Red, PairColor::Green, PairColor::Blue];

/// One coupled (even, odd) pair, possibly colored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Couple {
    pub even: i64,
    pub odd: i64,
    pub color: Option<PairColor>,
}

/// A set of disjoint couples with a (possibly partial) three-coloring.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ColoredPairing {
    pub couples: Vec<Couple>,
}

/// Verifies the pairing invariants literally; returns the list of
/// violations (empty when the pairing is valid):
/// labels must come from the inputs with the right parity, no label may be
/// used twice, within every color class each even label must differ from
/// each odd label by more than 1, and every color must be used at least
/// `floor(#couples / 3)` times.
pub fn check_coloring(odds: &[i64], evens: &[i64], pairing: &ColoredPairing) -> Vec<String> {
    let mut violations = Vec::new();
    let odd_set: std::collections::BTreeSet<i64> = odds.iter().copied().collect();
    let even_set: std::collections::BTreeSet<i64> = evens.iter().copied().collect();
    let mut used = std::collections::BTreeSet::new();
    for c in &pairing.couples {
        if !even_set.contains(&c.even) {
            violations.push(format!("even label {} is not an input even", c.even));
        }
        if !odd_set.contains(&c.odd) {
            violations.push(format!("odd label {} is not an input odd", c.odd));
        }
        for label in [c.even, c.odd] {
            if !used.insert(label) {
                violations.push(format!("label {label} reused across couples"));
            }
        }
    }
    for color in COLORS {
        let class: Vec<&Couple> = pairing
            .couples
            .iter()
            .filter(|c| c.color == Some(color))
            .collect();
        for a in &class {
            for b in &class {
                if (a.even - b.odd).abs() <= 1 {
                    violations.push(format!(
                        "same-color ({color:?}) labels {} and {} are adjacent",
                        a.even, b.odd
                    ));
                }
            }
        }
    }
    let floor_third = pairing.couples.len() / 3;
    for color in COLORS {
        let size = pairing
            .couples
            .iter()
            .filter(|c| c.color == Some(color))
            .count();
        if size < floor_third {
            violations.push(format!(
                "color {color:?} used {size} times, below floor(N/3) = {floor_third}"
            ));
        }
    }
    violations
}

/// A label with its current position on the working line.
#[derive(Debug, Clone, Copy)]
struct Slot {
    label: i64,
    pos: i64,
}

/// A maximal run of consecutive positions, as a range of indices into the
/// position-sorted slot list.
#[derive(Debug, Clone, Copy)]
struct Run {
    first_slot: usize,
    len: usize,
    start: i64,
    end: i64,
}

fn runs_of(slots: &[Slot]) -> Vec<Run> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < slots.len() {
        let mut j = i + 1;
        while j < slots.len() && slots[j].pos == slots[j - 1].pos + 1 {
            j += 1;
        }
        runs.push(Run {
            first_slot: i,
            len: j - i,
            start: slots[i].pos,
            end: slots[j - 1].pos,
        });
        i = j;
    }
    runs
}

/// Constructive three-coloring of `N` odds and `N` evens.
///
/// Reduction: repeatedly glue the two leftmost runs whose endpoint parities
/// allow the alternation to continue across the seam, shifting the glued
/// run right by the smallest even amount keeping it two apart from the
/// rest. Even shifts preserve every label's parity, so at most two
/// alternating runs of even length remain. These are colored by the
/// periodic base scheme (couples at offsets (0,3), (1,4), (2,5) within each
/// block of six), the remainder patch adds one extra couple per color where
/// the leftover counts demand it, and colors transfer back through the
/// recorded positions.
pub fn three_color_pairing(odds: &[i64], evens: &[i64]) -> Result<ColoredPairing> {
    if odds.len() != evens.len() {
        return Err(Error::MalformedPairing(format!(
            "need equally many odds and evens, got {} and {}",
            odds.len(),
            evens.len()
        )));
    }
    let distinct = |v: &[i64]| {
        let set: std::collections::BTreeSet<i64> = v.iter().copied().collect();
        set.len() == v.len()
    };
    if !distinct(odds) || !distinct(evens) {
        return Err(Error::MalformedPairing("duplicate labels".into()));
    }
    if let Some(&x) = odds.iter().find(|x| x.rem_euclid(2) != 1) {
        return Err(Error::MalformedPairing(format!("{x} is not odd")));
    }
    if let Some(&x) = evens.iter().find(|x| x.rem_euclid(2) != 0) {
        return Err(Error::MalformedPairing(format!("{x} is not even")));
    }
    // The gluing shifts stay within a few spans of the input range; this
    // bound keeps all position arithmetic far from i64 overflow.
    if let Some(&x) = odds
        .iter()
        .chain(evens.iter())
        .find(|x| x.unsigned_abs() > 1 << 40)
    {
        return Err(Error::MalformedPairing(format!(
            "label {x} exceeds the supported magnitude 2^40"
        )));
    }
    if odds.is_empty() {
        return Ok(ColoredPairing::default());
    }

    let mut slots: Vec<Slot> = odds
        .iter()
        .chain(evens.iter())
        .map(|&label| Slot { label, pos: label })
        .collect();
    slots.sort_by_key(|s| s.pos);

    // Gluing loop: each pass merges two runs, so it terminates.
    loop {
        let runs = runs_of(&slots);
        let Some((j1, j2)) = find_glueable(&runs) else {
            break;
        };
        let (r1, r2) = (runs[j1], runs[j2]);
        let glued_len = (r1.end - r1.start) + (r2.end - r2.start) + 2;
        let others: Vec<&Run> = runs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j1 && *i != j2)
            .map(|(_, r)| r)
            .collect();
        let mut shift = 0i64;
        loop {
            let lo = r1.start + shift;
            let hi = r1.start + shift + glued_len - 1;
            if others.iter().all(|r| r.start - hi >= 2 || lo - r.end >= 2) {
                break;
            }
            shift += 2;
        }
        let second_shift = r1.end - r2.start + 1 + shift;
        for slot in &mut slots {
            if (r1.start..=r1.end).contains(&slot.pos) {
                slot.pos += shift;
            } else if (r2.start..=r2.end).contains(&slot.pos) {
                slot.pos += second_shift;
            }
        }
        slots.sort_by_key(|s| s.pos);
        debug_assert!(slots
            .iter()
            .all(|s| s.pos.rem_euclid(2) == s.label.rem_euclid(2)));
    }

    let runs = runs_of(&slots);
    debug_assert!(runs.len() <= 2);
    debug_assert!(runs.iter().all(|r| r.len % 2 == 0));

    let mut couples = Vec::new();
    // Periodic base scheme inside each run: blocks of six consecutive
    // labels yield one couple per color at offsets (0,3), (1,4), (2,5).
    for run in &runs {
        let members = &slots[run.first_slot..run.first_slot + run.len];
        let complete_blocks = run.len / 6;
        for block in 0..complete_blocks {
            for (offset, color) in COLORS.iter().enumerate() {
                let a = members[6 * block + offset];
                let b = members[6 * block + offset + 3];
                couples.push(make_couple(a, b, Some(*color)));
            }
        }
    }
    // Remainder patch: with two runs whose half-length remainders are
    // (1,2), (2,1) or (2,2), one more couple per color comes from the
    // uncoupled tails (plus a spare red couple in the (2,2) case).
    if runs.len() == 2 {
        let rem = |run: &Run| (run.len / 2) % 3;
        let tail = |run: &Run, take: usize| -> &[Slot] {
            &slots[run.first_slot + run.len - take..run.first_slot + run.len]
        };
        let (ra, rb) = (rem(&runs[0]), rem(&runs[1]));
        match (ra, rb) {
            (1, 2) | (2, 1) => {
                let (short, long) = if ra == 1 {
                    (&runs[0], &runs[1])
                } else {
                    (&runs[1], &runs[0])
                };
                let a = tail(short, 2);
                let b = tail(long, 4);
                couples.push(make_couple(b[0], b[3], Some(PairColor::Red)));
                couples.push(make_couple(a[0], b[2], Some(PairColor::Green)));
                couples.push(make_couple(a[1], b[1], Some(PairColor::Blue)));
            }
            (2, 2) => {
                let a = tail(&runs[0], 4);
                let b = tail(&runs[1], 4);
                couples.push(make_couple(a[0], a[3], Some(PairColor::Red)));
                couples.push(make_couple(b[0], b[3], Some(PairColor::Red)));
                couples.push(make_couple(a[1], b[1], Some(PairColor::Green)));
                couples.push(make_couple(a[2], b[2], Some(PairColor::Blue)));
            }
            _ => {}
        }
    }
    Ok(ColoredPairing { couples })
}

fn make_couple(a: Slot, b: Slot, color: Option<PairColor>) -> Couple {
    if a.label.rem_euclid(2) == 0 {
        debug_assert_eq!(b.label.rem_euclid(2), 1);
        Couple {
            even: a.label,
            odd: b.label,
            color,
        }
    } else {
        debug_assert_eq!(b.label.rem_euclid(2), 0);
        Couple {
            even: b.label,
            odd: a.label,
            color,
        }
    }
}

/// The two leftmost runs whose endpoint parities let the alternation
/// continue across the seam: scan run pairs left to right, trying both
/// gluing orders.
fn find_glueable(runs: &[Run]) -> Option<(usize, usize)> {
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            if (runs[i].end + runs[j].start).rem_euclid(2) == 1 {
                return Some((i, j));
            }
            if (runs[j].end + runs[i].start).rem_euclid(2) == 1 {
                return Some((j, i));
            }
        }
    }
    None
}
