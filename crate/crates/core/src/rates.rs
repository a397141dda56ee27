//! Normalized-rate formulas and the comparison against the scalar linear
//! baseline `(N-s+1)/N`. All arithmetic is exact.

use std::fmt;
use std::io::Write;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::ser::SerializeTuple;
use serde::Serialize;

use crate::codec::{sub_packetization_level, Case};
use crate::error::{Error, Result};

pub type Rational = Ratio<u64>;

/// Bits broadcast over total message bits for the sub-packetized code:
/// `1/z` in Case A, `(z-1)/z` in Case B.
pub fn achievable_rate(n: usize, s: usize) -> Result<Rational> {
    let sub = sub_packetization_level(n, s)?;
    let z = sub.z as u64;
    Ok(match sub.case {
        Case::A => Ratio::new(1, z),
        Case::B => Ratio::new(z - 1, z),
    })
}

/// Optimal scalar linear code length `N-s+1`, normalized by `N`.
pub fn scalar_baseline_rate(n: usize, s: usize) -> Result<Rational> {
    if n < 3 || !(2..n).contains(&s) {
        return Err(Error::Domain { n, s });
    }
    Ok(Ratio::new((n - s + 1) as u64, n as u64))
}

/// Lower bound `(M-s+1)/M` on scalar solutions to cooperative data exchange.
pub fn cde_lower_bound(m: usize, s: usize) -> Result<Rational> {
    if m == 0 || !(1..=m).contains(&s) {
        return Err(Error::Domain { n: m, s });
    }
    Ok(Ratio::new((m - s + 1) as u64, m as u64))
}

/// Sufficient conditions for beating the scalar baseline, in listing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Condition {
    /// `(s-1) | (N-1)`
    DividesS1,
    /// `(N-s) | (N-1)`
    DividesNS,
    /// `s > (2N+1-sqrt(4N+1))/2`
    Threshold,
    None,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::DividesS1 => "DividesS1",
            Condition::DividesNS => "DividesNS",
            Condition::Threshold => "Threshold",
            Condition::None => "None",
        })
    }
}

/// `s > (2N+1-sqrt(4N+1))/2`, decided on integers: with `g = 2N+1-2s`, the
/// inequality is `g < sqrt(4N+1)`, i.e. `g <= 0` or `g^2 < 4N+1`.
pub fn above_threshold(n: usize, s: usize) -> bool {
    let g = 2 * n as i128 + 1 - 2 * s as i128;
    g <= 0 || g * g < 4 * n as i128 + 1
}

/// Every satisfied condition, in listing order. Empty when none holds.
pub fn improvement_conditions(n: usize, s: usize) -> Result<Vec<Condition>> {
    if n < 3 || !(2..n).contains(&s) {
        return Err(Error::Domain { n, s });
    }
    let mut out = Vec::new();
    if (n - 1).is_multiple_of(s - 1) {
        out.push(Condition::DividesS1);
    }
    if (n - 1).is_multiple_of(n - s) {
        out.push(Condition::DividesNS);
    }
    if above_threshold(n, s) {
        out.push(Condition::Threshold);
    }
    Ok(out)
}

pub fn improvement_condition(n: usize, s: usize) -> Result<Condition> {
    Ok(improvement_conditions(n, s)?
        .first()
        .copied()
        .unwrap_or(Condition::None))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateComparison {
    pub n: usize,
    pub s: usize,
    pub case: Case,
    pub z: usize,
    pub ours: Rational,
    pub baseline: Rational,
    pub cde_bound: Rational,
    pub condition: Condition,
    pub conditions: Vec<Condition>,
    pub strictly_better: bool,
    /// Filled only where no sufficient condition applies and `s > N/2`, the
    /// region where the construction is conjectured (not proven) to win.
    pub conjecture_holds: Option<bool>,
}

pub fn compare(n: usize, s: usize) -> Result<RateComparison> {
    let sub = sub_packetization_level(n, s)?;
    let ours = achievable_rate(n, s)?;
    let baseline = scalar_baseline_rate(n, s)?;
    let conditions = improvement_conditions(n, s)?;
    let condition = conditions.first().copied().unwrap_or(Condition::None);
    let strictly_better = ours < baseline;
    Ok(RateComparison {
        n,
        s,
        case: sub.case,
        z: sub.z,
        ours,
        baseline,
        cde_bound: cde_lower_bound(n, s)?,
        condition,
        conditions,
        strictly_better,
        conjecture_holds: (condition == Condition::None && 2 * s > n).then_some(strictly_better),
    })
}

/// One row per `(N, s)`, `N` then `s` ascending.
pub fn sweep(n_min: usize, n_max: usize) -> Result<Vec<RateComparison>> {
    if n_min < 3 || n_min > n_max {
        return Err(Error::Domain { n: n_min, s: n_max });
    }
    let pairs: Vec<(usize, usize)> = (n_min..=n_max)
        .flat_map(|n| (2..n).map(move |s| (n, s)))
        .collect();
    pairs.par_iter().map(|&(n, s)| compare(n, s)).collect()
}

pub const CSV_HEADER: &str = "N,s,case,z,ours_num,ours_den,baseline_num,baseline_den,condition,strictly_better,conjecture_holds";

impl RateComparison {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.s,
            self.case,
            self.z,
            self.ours.numer(),
            self.ours.denom(),
            self.baseline.numer(),
            self.baseline.denom(),
            self.condition,
            self.strictly_better,
            self.conjecture_holds
                .map_or(String::new(), |b| b.to_string()),
        )
    }
}

pub fn write_csv<W: Write>(rows: &[RateComparison], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn write_table<W: Write>(rows: &[RateComparison], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{:>4} {:>4} {:>4} {:>4} {:>9} {:>9} {:>10} {:>6} {:>10}",
        "N", "s", "case", "z", "ours", "baseline", "condition", "better", "conjecture"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:>4} {:>4} {:>4} {:>4} {:>9} {:>9} {:>10} {:>6} {:>10}",
            r.n,
            r.s,
            r.case.to_string(),
            r.z,
            r.ours.to_string(),
            r.baseline.to_string(),
            r.condition.to_string(),
            r.strictly_better,
            r.conjecture_holds
                .map_or("-".to_string(), |b| b.to_string()),
        )?;
    }
    Ok(())
}

/// Serializes a rational as `[numerator, denominator]`.
pub struct RationalPair<'a>(pub &'a Rational);

impl Serialize for RationalPair<'_> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = ser.serialize_tuple(2)?;
        t.serialize_element(self.0.numer())?;
        t.serialize_element(self.0.denom())?;
        t.end()
    }
}

impl Serialize for RateComparison {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("RateComparison", 11)?;
        st.serialize_field("N", &self.n)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("case", &self.case)?;
        st.serialize_field("z", &self.z)?;
        st.serialize_field("ours", &RationalPair(&self.ours))?;
        st.serialize_field("baseline", &RationalPair(&self.baseline))?;
        st.serialize_field("cde_bound", &RationalPair(&self.cde_bound))?;
        st.serialize_field("condition", &self.condition)?;
        st.serialize_field("conditions", &self.conditions)?;
        st.serialize_field("strictly_better", &self.strictly_better)?;
        st.serialize_field("conjecture_holds", &self.conjecture_holds)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: u64, b: u64) -> Rational {
        Ratio::new(a, b)
    }

    #[test]
    fn worked_example_rates() {
        assert_eq!(achievable_rate(5, 3).unwrap(), r(1, 2));
        assert_eq!(achievable_rate(4, 2).unwrap(), r(2, 3));
        assert_eq!(achievable_rate(7, 4).unwrap(), r(1, 2));
        assert!(achievable_rate(5, 5).is_err());
    }

    #[test]
    fn baselines() {
        assert_eq!(scalar_baseline_rate(5, 3).unwrap(), r(3, 5));
        assert_eq!(scalar_baseline_rate(7, 4).unwrap(), r(4, 7));
        assert_eq!(scalar_baseline_rate(4, 2).unwrap(), r(3, 4));
        assert_eq!(cde_lower_bound(5, 3).unwrap(), r(3, 5));
        assert_eq!(cde_lower_bound(10, 10).unwrap(), r(1, 10));
        assert_eq!(cde_lower_bound(7, 4).unwrap(), r(4, 7));
        assert!(cde_lower_bound(7, 0).is_err());
        assert!(cde_lower_bound(7, 8).is_err());
    }

    #[test]
    fn conditions() {
        assert_eq!(improvement_condition(5, 3).unwrap(), Condition::DividesS1);
        // (2*5+1-2*4)^2 = 9 < 21, but (N-s) = 1 divides 4 and is listed first.
        assert!(above_threshold(5, 4));
        assert_eq!(improvement_condition(5, 4).unwrap(), Condition::DividesNS);
        assert_eq!(
            improvement_conditions(5, 4).unwrap(),
            vec![Condition::DividesNS, Condition::Threshold]
        );
        // N=14, s=11: 10∤13, 3∤13, (29-22)^2 = 49 < 57.
        assert_eq!(
            improvement_conditions(14, 11).unwrap(),
            vec![Condition::Threshold]
        );
        assert_eq!(achievable_rate(5, 4).unwrap(), r(1, 4));
        assert!(r(1, 4) < scalar_baseline_rate(5, 4).unwrap());
        // 1 | 3 holds, 2 ∤ 3.
        assert_eq!(improvement_condition(4, 2).unwrap(), Condition::DividesS1);
        assert_eq!(
            improvement_conditions(4, 2).unwrap(),
            vec![Condition::DividesS1]
        );
        // N=10, s=6: 5∤9, 4∤9, (21-12)^2 = 81 >= 41.
        assert_eq!(improvement_condition(10, 6).unwrap(), Condition::None);
        assert!(improvement_condition(10, 10).is_err());
    }

    #[test]
    fn threshold_agrees_with_float_away_from_the_boundary() {
        for n in 3..300usize {
            let s2 = (2.0 * n as f64 + 1.0 - (4.0 * n as f64 + 1.0).sqrt()) / 2.0;
            for s in 2..n {
                if (s as f64 - s2).abs() > 1e-9 {
                    assert_eq!(above_threshold(n, s), s as f64 > s2, "N={n} s={s}");
                }
            }
        }
    }

    #[test]
    fn threshold_boundary_is_exclusive() {
        // 4N+1 a perfect square: N=2 gives 9, N=6 gives 25, N=12 gives 49.
        // N=6: s2 = (13-5)/2 = 4 exactly, so s=4 is not above it.
        assert!(!above_threshold(6, 4));
        assert!(above_threshold(6, 5));
        // N=12: s2 = (25-7)/2 = 9.
        assert!(!above_threshold(12, 9));
        assert!(above_threshold(12, 10));
    }

    #[test]
    fn comparisons() {
        let c = compare(5, 3).unwrap();
        assert_eq!(
            (c.ours, c.baseline, c.strictly_better),
            (r(1, 2), r(3, 5), true)
        );
        assert_eq!(c.csv_row(), "5,3,A,2,1,2,3,5,DividesS1,true,");
        let c = compare(7, 4).unwrap();
        assert_eq!(
            (c.ours, c.baseline, c.strictly_better),
            (r(1, 2), r(4, 7), true)
        );
        let c = compare(10, 6).unwrap();
        assert_eq!(c.conjecture_holds, Some(false));
        assert_eq!(compare(7, 3).unwrap().ours, r(4, 6));
        assert_eq!(compare(7, 3).unwrap().ours, r(7 - 3, 7 - 1));
    }

    #[test]
    fn multiple_conditions_report_first() {
        // N=7, s=4: 3|6 and 3|6.
        let c = compare(7, 4).unwrap();
        assert_eq!(c.condition, Condition::DividesS1);
        assert_eq!(
            c.conditions[..2],
            [Condition::DividesS1, Condition::DividesNS]
        );
    }

    #[test]
    fn sweep_sizes_and_order() {
        assert_eq!(sweep(5, 5).unwrap().len(), 3);
        let rows = sweep(4, 5).unwrap();
        assert_eq!(rows.len(), 5);
        let keys: Vec<_> = rows.iter().map(|r| (r.n, r.s)).collect();
        assert_eq!(keys, vec![(4, 2), (4, 3), (5, 2), (5, 3), (5, 4)]);
        assert!(sweep(2, 5).is_err());
        assert!(sweep(6, 5).is_err());
    }

    #[test]
    fn csv_and_json_shapes() {
        let mut buf = Vec::new();
        write_csv(&sweep(5, 5).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.nth(1), Some("5,3,A,2,1,2,3,5,DividesS1,true,"));
        let json = serde_json::to_value(compare(5, 3).unwrap()).unwrap();
        assert_eq!(json["ours"], serde_json::json!([1, 2]));
        assert_eq!(json["conjecture_holds"], serde_json::Value::Null);
    }
}
