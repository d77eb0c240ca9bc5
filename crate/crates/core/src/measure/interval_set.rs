use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::real::Real;

/// An interval with independently open or closed ends. `lo == hi` is
/// allowed only for a closed point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Real,
    pub hi: Real,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: Real, hi: Real, lo_open: bool, hi_open: bool) -> Interval {
        Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        }
    }

    pub fn open(lo: Real, hi: Real) -> Interval {
        Interval::new(lo, hi, true, true)
    }

    pub fn closed(lo: Real, hi: Real) -> Interval {
        Interval::new(lo, hi, false, false)
    }

    pub fn point(x: Real) -> Interval {
        Interval::closed(x.clone(), x)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    pub fn length(&self) -> Real {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Real) -> bool {
        let above = if self.lo_open {
            *x > self.lo
        } else {
            *x >= self.lo
        };
        let below = if self.hi_open {
            *x < self.hi
        } else {
            *x <= self.hi
        };
        above && below
    }

    pub fn is_open(&self) -> bool {
        self.lo_open && self.hi_open
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_open) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_open),
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_open),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_open),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_open),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_open || other.hi_open),
        };
        let iv = Interval::new(lo, hi, lo_open, hi_open);
        (!iv.is_empty()).then_some(iv)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// A finite union of disjoint intervals, kept sorted and merged.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntervalSet {
    components: Vec<Interval>,
    measure: Real,
}

impl IntervalSet {
    pub fn empty() -> IntervalSet {
        IntervalSet::default()
    }

    pub fn single(iv: Interval) -> IntervalSet {
        IntervalSet::from_intervals(vec![iv])
    }

    /// Normalizes arbitrary intervals: drops empty ones, sorts, merges any
    /// that overlap or touch at a point one of them contains.
    pub fn from_intervals(mut ivs: Vec<Interval>) -> IntervalSet {
        ivs.retain(|iv| !iv.is_empty());
        ivs.sort_by(|x, y| x.lo.cmp(&y.lo).then(x.lo_open.cmp(&y.lo_open)));
        let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            if let Some(cur) = out.last_mut() {
                let joins = iv.lo < cur.hi || (iv.lo == cur.hi && (!cur.hi_open || !iv.lo_open));
                if joins {
                    match iv.hi.cmp(&cur.hi) {
                        std::cmp::Ordering::Greater => {
                            cur.hi = iv.hi;
                            cur.hi_open = iv.hi_open;
                        }
                        std::cmp::Ordering::Equal => cur.hi_open = cur.hi_open && iv.hi_open,
                        std::cmp::Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        let measure = out.iter().fold(Real::zero(), |acc, iv| acc + iv.length());
        IntervalSet {
            components: out,
            measure,
        }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Interval> {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Lebesgue measure: the sum of component lengths.
    pub fn measure(&self) -> &Real {
        &self.measure
    }

    /// `(inf, sup)` of the set.
    pub fn hull(&self) -> Option<(Real, Real)> {
        Some((
            self.components.first()?.lo.clone(),
            self.components.last()?.hi.clone(),
        ))
    }

    pub fn contains(&self, x: &Real) -> bool {
        let i = self.components.partition_point(|iv| iv.hi < *x);
        self.components[i..].iter().take(2).any(|iv| iv.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.components.clone();
        all.extend(other.components.iter().cloned());
        IntervalSet::from_intervals(all)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.components, &other.components);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(iv) = a[i].intersect(&b[j]) {
                out.push(iv);
            }
            let a_first = match a[i].hi.cmp(&b[j].hi) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => a[i].hi_open,
            };
            if a_first {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn intersect_interval(&self, iv: &Interval) -> IntervalSet {
        self.intersection(&IntervalSet::single(iv.clone()))
    }

    /// `[lo, hi]` minus the set.
    pub fn complement_within(&self, lo: &Real, hi: &Real) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = lo.clone();
        let mut cursor_open = false;
        for iv in &self.components {
            out.push(Interval::new(
                cursor.clone(),
                iv.lo.clone(),
                cursor_open,
                !iv.lo_open,
            ));
            cursor = iv.hi.clone();
            cursor_open = !iv.hi_open;
        }
        out.push(Interval::new(cursor, hi.clone(), cursor_open, false));
        IntervalSet::from_intervals(out)
            .intersect_interval(&Interval::closed(lo.clone(), hi.clone()))
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let Some((lo, hi)) = self.hull() else {
            return IntervalSet::empty();
        };
        let lo = match other.hull() {
            Some((l, _)) => lo.min(l),
            None => lo,
        };
        let hi = match other.hull() {
            Some((_, h)) => hi.max(h),
            None => hi,
        };
        self.intersection(&other.complement_within(&lo, &hi))
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Removes each of `points` lying strictly inside a component, splitting
    /// it in two. The measure is unchanged.
    pub fn split_at(&self, points: &[Real]) -> IntervalSet {
        let mut out = Vec::new();
        for iv in &self.components {
            let mut cuts: Vec<&Real> = points
                .iter()
                .filter(|p| **p > iv.lo && **p < iv.hi)
                .collect();
            cuts.sort();
            cuts.dedup();
            let mut lo = iv.lo.clone();
            let mut lo_open = iv.lo_open;
            for c in cuts {
                out.push(Interval::new(lo, c.clone(), lo_open, true));
                lo = c.clone();
                lo_open = true;
            }
            out.push(Interval::new(lo, iv.hi.clone(), lo_open, iv.hi_open));
        }
        // rebuilt directly: from_intervals would keep them apart anyway
        let measure = self.measure.clone();
        IntervalSet {
            components: out,
            measure,
        }
    }

    /// A disjoint open cover with measure below `measure + slack`.
    ///
    /// Component `i` of length `l_i` gets a budget
    /// `max(slack / (4m), (slack / 2) * l_i / L)` split evenly between its two
    /// sides; overlapping inflations are merged.
    pub fn open_cover(&self, slack: &Real) -> IntervalSet {
        let m = self.components.len();
        if m == 0 {
            return IntervalSet::empty();
        }
        let mr = Real::int(m as i64);
        let floor = slack / &(Real::int(4) * &mr);
        let half = slack / &Real::int(2);
        let total = &self.measure;
        let ivs = self
            .components
            .iter()
            .map(|iv| {
                let share = if total.is_zero() {
                    &half / &mr
                } else {
                    &half * &iv.length() / total
                };
                let budget = share.max(floor.clone());
                let pad = &budget / &Real::int(2);
                Interval::open(&iv.lo - &pad, &iv.hi + &pad)
            })
            .collect();
        IntervalSet::from_intervals(ivs)
    }

    /// The image under `x -> s - x`.
    pub fn reflected(&self, s: &Real) -> IntervalSet {
        IntervalSet::from_intervals(
            self.components
                .iter()
                .map(|iv| Interval::new(s - &iv.hi, s - &iv.lo, iv.hi_open, iv.lo_open))
                .collect(),
        )
    }

    /// Maps each component affinely from `[0, 1]` onto `[a, b]`.
    pub fn scale_unit_into(&self, a: &Real, b: &Real) -> IntervalSet {
        let w = b - a;
        IntervalSet::from_intervals(
            self.components
                .iter()
                .map(|iv| {
                    Interval::new(
                        a + &(&w * &iv.lo),
                        a + &(&w * &iv.hi),
                        iv.lo_open,
                        iv.hi_open,
                    )
                })
                .collect(),
        )
    }

    pub fn to_float(&self) -> IntervalSet {
        IntervalSet::from_intervals(
            self.components
                .iter()
                .map(|iv| Interval::new(iv.lo.to_float(), iv.hi.to_float(), iv.lo_open, iv.hi_open))
                .collect(),
        )
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.components.iter().map(|iv| iv.to_string()).collect();
        write!(f, "{}", parts.join(" U "))
    }
}

#[derive(Serialize)]
struct IntervalSetOut<'a> {
    components: &'a [Interval],
    measure: &'a Real,
}

#[derive(Deserialize)]
struct IntervalSetIn {
    components: Vec<Interval>,
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalSetOut {
            components: &self.components,
            measure: &self.measure,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(IntervalSet::from_intervals(
            IntervalSetIn::deserialize(d)?.components,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Real {
        Real::ratio(n, d)
    }

    #[test]
    fn measure_examples() {
        assert_eq!(*IntervalSet::empty().measure(), Real::zero());
        let s = IntervalSet::from_intervals(vec![
            Interval::open(q(0, 1), q(1, 3)),
            Interval::open(q(2, 3), q(1, 1)),
        ]);
        assert_eq!(*s.measure(), q(2, 3));
    }

    #[test]
    fn touching_open_ends_stay_apart() {
        let s = IntervalSet::from_intervals(vec![
            Interval::open(q(0, 1), q(1, 2)),
            Interval::open(q(1, 2), q(1, 1)),
        ]);
        assert_eq!(s.len(), 2);
        let s = IntervalSet::from_intervals(vec![
            Interval::new(q(0, 1), q(1, 2), true, false),
            Interval::open(q(1, 2), q(1, 1)),
        ]);
        assert_eq!(s.components(), &[Interval::open(q(0, 1), q(1, 1))]);
    }

    #[test]
    fn set_algebra() {
        let a = IntervalSet::single(Interval::closed(q(0, 1), q(1, 1)));
        let b = IntervalSet::single(Interval::open(q(1, 4), q(1, 2)));
        let d = a.difference(&b);
        assert_eq!(
            d.components(),
            &[
                Interval::closed(q(0, 1), q(1, 4)),
                Interval::closed(q(1, 2), q(1, 1)),
            ]
        );
        assert_eq!(*d.measure(), q(3, 4));
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.intersection(&b), b);
        assert_eq!(d.union(&b), a);
        assert!(d.contains(&q(1, 4)) && !d.contains(&q(1, 3)));
    }

    #[test]
    fn split_keeps_measure() {
        let a = IntervalSet::single(Interval::open(q(0, 1), q(1, 1)));
        let s = a.split_at(&[q(1, 2), q(0, 1), q(2, 1)]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.measure(), a.measure());
        assert!(!s.contains(&q(1, 2)));
    }

    #[test]
    fn open_cover_of_half_interval() {
        let e = IntervalSet::single(Interval::closed(Real::zero(), q(1, 2)));
        let c = e.open_cover(&q(1, 100));
        assert_eq!(c.components(), &[Interval::open(q(-1, 400), q(201, 400))]);
        assert_eq!(*c.measure(), q(101, 200));
    }

    #[test]
    fn open_cover_of_a_point() {
        let e = IntervalSet::single(Interval::point(Real::zero()));
        let c = e.open_cover(&q(1, 100));
        assert_eq!(c.len(), 1);
        assert!(c.contains(&Real::zero()));
        assert!(*c.measure() < q(1, 100));
    }

    #[test]
    fn json_round_trip() {
        let s = IntervalSet::from_intervals(vec![
            Interval::open(q(0, 1), q(1, 3)),
            Interval::closed(q(2, 3), q(1, 1)),
        ]);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"measure\":\"2/3\""));
        let back: IntervalSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
