//! Ternary algebra, behavioral gate models, and radix-3 arithmetic.
//!
//! Everything in this module is a pure function over [`Trit`] values. These
//! functions serve as the ground-truth oracles against which the switch-level
//! netlists in [`crate::stdlib`] are verified.

use std::fmt;

use thiserror::Error;

/// One ternary digit: logic level 0, 1, or 2.
///
/// Levels correspond to the voltages 0, VDD/2, and VDD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trit {
    /// Logic 0 (ground).
    Zero,
    /// Logic 1 (half supply).
    One,
    /// Logic 2 (full supply).
    Two,
}

impl Trit {
    /// All three levels in ascending order.
    pub const ALL: [Trit; 3] = [Trit::Zero, Trit::One, Trit::Two];

    pub fn from_u8(v: u8) -> Option<Trit> {
        match v {
            0 => Some(Trit::Zero),
            1 => Some(Trit::One),
            2 => Some(Trit::Two),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Trit::Zero => 0,
            Trit::One => 1,
            Trit::Two => 2,
        }
    }

    /// Voltage of this level under the given supply.
    pub fn voltage(self, vdd: f64) -> f64 {
        match self {
            Trit::Zero => 0.0,
            Trit::One => vdd / 2.0,
            Trit::Two => vdd,
        }
    }
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// A ternary value extended with the high-impedance marker.
///
/// `Hz` is not a fourth logic level: it means the node has no conducting
/// path to any driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TritHz {
    Value(Trit),
    Hz,
}

impl TritHz {
    pub fn is_hz(self) -> bool {
        matches!(self, TritHz::Hz)
    }

    pub fn value(self) -> Option<Trit> {
        match self {
            TritHz::Value(t) => Some(t),
            TritHz::Hz => None,
        }
    }

    /// Symbol used in all text output: `0`, `1`, `2`, or `Z`.
    pub fn symbol(self) -> char {
        match self {
            TritHz::Value(t) => char::from(b'0' + t.as_u8()),
            TritHz::Hz => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<TritHz> {
        match c {
            '0' => Some(TritHz::Value(Trit::Zero)),
            '1' => Some(TritHz::Value(Trit::One)),
            '2' => Some(TritHz::Value(Trit::Two)),
            'Z' | 'z' => Some(TritHz::Hz),
            _ => None,
        }
    }
}

impl From<Trit> for TritHz {
    fn from(t: Trit) -> Self {
        TritHz::Value(t)
    }
}

impl fmt::Display for TritHz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Errors from the behavioral arithmetic models.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    /// Carry-in must be 0 or 1; two-operand radix-3 addition never carries 2.
    #[error("carry-in must be 0 or 1, got {0}")]
    InvalidCarry(Trit),
    /// Add/subtract mode select must be 0 (add) or 2 (subtract).
    #[error("mode must be 0 (add) or 2 (subtract), got {0}")]
    InvalidMode(Trit),
    #[error("operand widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("value {value} does not fit in {width} trits")]
    ValueOutOfRange { value: u64, width: usize },
}

/// Ternary OR: the larger of the two levels.
pub fn t_max(a: Trit, b: Trit) -> Trit {
    a.max(b)
}

/// Ternary AND: the smaller of the two levels.
pub fn t_min(a: Trit, b: Trit) -> Trit {
    a.min(b)
}

/// Ternary NOT: `2 - a` (the standard ternary inverter).
pub fn t_not(a: Trit) -> Trit {
    match a {
        Trit::Zero => Trit::Two,
        Trit::One => Trit::One,
        Trit::Two => Trit::Zero,
    }
}

/// Positive ternary inverter: 0,1 -> 2; 2 -> 0.
pub fn pti(a: Trit) -> Trit {
    match a {
        Trit::Zero | Trit::One => Trit::Two,
        Trit::Two => Trit::Zero,
    }
}

/// Negative ternary inverter: 0 -> 2; 1,2 -> 0.
pub fn nti(a: Trit) -> Trit {
    match a {
        Trit::Zero => Trit::Two,
        Trit::One | Trit::Two => Trit::Zero,
    }
}

/// Standard ternary inverter; same function as [`t_not`].
pub fn sti(a: Trit) -> Trit {
    t_not(a)
}

/// Tri-state buffer/inverter: `s=0` buffers, `s=2` inverts, `s=1` floats.
pub fn tri_buffer_not(s: Trit, input: Trit) -> TritHz {
    match s {
        Trit::Zero => TritHz::Value(input),
        Trit::One => TritHz::Hz,
        Trit::Two => TritHz::Value(t_not(input)),
    }
}

/// Tri-state AND/NAND: `s=0` AND, `s=2` NAND, `s=1` floats.
pub fn tri_and_nand(s: Trit, a: Trit, b: Trit) -> TritHz {
    match s {
        Trit::Zero => TritHz::Value(t_min(a, b)),
        Trit::One => TritHz::Hz,
        Trit::Two => TritHz::Value(t_not(t_min(a, b))),
    }
}

/// Tri-state OR/NOR: `s=0` OR, `s=2` NOR, `s=1` floats.
pub fn tri_or_nor(s: Trit, a: Trit, b: Trit) -> TritHz {
    match s {
        Trit::Zero => TritHz::Value(t_max(a, b)),
        Trit::One => TritHz::Hz,
        Trit::Two => TritHz::Value(t_not(t_max(a, b))),
    }
}

/// Radix-3 full adder on single digits.
///
/// Carry-in is restricted to {0, 1}: the sum of two trits and such a carry
/// is at most 5, so the carry-out is again 0 or 1.
pub fn full_add(a: Trit, b: Trit, cin: Trit) -> Result<(Trit, Trit), ArithError> {
    if cin == Trit::Two {
        return Err(ArithError::InvalidCarry(cin));
    }
    let total = a.as_u8() + b.as_u8() + cin.as_u8();
    let sum = Trit::from_u8(total % 3).unwrap();
    let cout = Trit::from_u8(total / 3).unwrap();
    Ok((sum, cout))
}

/// A fixed-width little-endian ternary word: `digits[0]` is least significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryWord {
    digits: Vec<Trit>,
}

impl TernaryWord {
    /// Builds a word from little-endian digits. Width is the digit count.
    pub fn new(digits: Vec<Trit>) -> TernaryWord {
        assert!(!digits.is_empty(), "ternary word must have at least one digit");
        TernaryWord { digits }
    }

    /// Encodes an unsigned integer; fails if it does not fit in `width` trits.
    pub fn from_u64(mut value: u64, width: usize) -> Result<TernaryWord, ArithError> {
        assert!(width > 0);
        let original = value;
        let mut digits = Vec::with_capacity(width);
        for _ in 0..width {
            digits.push(Trit::from_u8((value % 3) as u8).unwrap());
            value /= 3;
        }
        if value != 0 {
            return Err(ArithError::ValueOutOfRange { value: original, width });
        }
        Ok(TernaryWord { digits })
    }

    pub fn to_u64(&self) -> u64 {
        self.digits
            .iter()
            .rev()
            .fold(0u64, |acc, d| acc * 3 + u64::from(d.as_u8()))
    }

    pub fn width(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[Trit] {
        &self.digits
    }

    pub fn digit(&self, i: usize) -> Trit {
        self.digits[i]
    }
}

/// Ripple add/subtract over equal-width words.
///
/// `mode=0` computes `a + b` with carry-out. `mode=2` complements each digit
/// of `a` and injects carry-in 1, yielding the radix-complement difference
/// `b - a` (mod `3^width`); the returned carry is 1 exactly when `b >= a`.
/// `mode=1` is rejected: the buffer/inverter stage would float.
pub fn add_sub(
    mode: Trit,
    a: &TernaryWord,
    b: &TernaryWord,
) -> Result<(TernaryWord, Trit), ArithError> {
    if a.width() != b.width() {
        return Err(ArithError::WidthMismatch(a.width(), b.width()));
    }
    let (xform, mut carry): (fn(Trit) -> Trit, Trit) = match mode {
        Trit::Zero => (|d| d, Trit::Zero),
        Trit::Two => (t_not, Trit::One),
        Trit::One => return Err(ArithError::InvalidMode(mode)),
    };
    let mut digits = Vec::with_capacity(a.width());
    for i in 0..a.width() {
        let (sum, cout) = full_add(xform(a.digit(i)), b.digit(i), carry)?;
        digits.push(sum);
        carry = cout;
    }
    Ok((TernaryWord::new(digits), carry))
}

/// The four gate-control signals decoded from the ALU operation select.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ControlWord {
    pub c1: Trit,
    pub c2: Trit,
    pub c3: Trit,
    pub c4: Trit,
}

/// Decodes (s0, s1) into the control word driving the tri-state units.
///
/// `c1`, `c2`, `c3` gate the buffer/NOT, AND/NAND, and OR/NOR units: each
/// equals `s0` when `s1` selects that unit and 1 (high impedance) otherwise.
/// `c4` gates the arithmetic unit: 0 when `s0 = 1`, else 1.
pub fn control_signals(s0: Trit, s1: Trit) -> ControlWord {
    let gate = |unit: Trit| if s1 == unit { s0 } else { Trit::One };
    ControlWord {
        c1: gate(Trit::Zero),
        c2: gate(Trit::One),
        c3: gate(Trit::Two),
        c4: if s0 == Trit::One { Trit::Zero } else { Trit::One },
    }
}

/// The ALU operation selected by (s0, s1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AluOp {
    Add,
    Increase,
    Subtract,
    Buffer,
    And,
    Or,
    Not,
    Nand,
    Nor,
}

impl AluOp {
    /// Operation decode: `s0=1` selects arithmetic by `s1`, `s0=0` the true
    /// logic functions, `s0=2` their complements.
    pub fn decode(s0: Trit, s1: Trit) -> AluOp {
        match (s0, s1) {
            (Trit::One, Trit::Zero) => AluOp::Add,
            (Trit::One, Trit::One) => AluOp::Increase,
            (Trit::One, Trit::Two) => AluOp::Subtract,
            (Trit::Zero, Trit::Zero) => AluOp::Buffer,
            (Trit::Zero, Trit::One) => AluOp::And,
            (Trit::Zero, Trit::Two) => AluOp::Or,
            (Trit::Two, Trit::Zero) => AluOp::Not,
            (Trit::Two, Trit::One) => AluOp::Nand,
            (Trit::Two, Trit::Two) => AluOp::Nor,
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, AluOp::Add | AluOp::Increase | AluOp::Subtract)
    }
}

/// Single-digit ALU result: main output plus carry.
///
/// Exactly one of the logic and arithmetic units drives in any configuration,
/// so `out` is never high impedance; `cout` is high impedance on logic rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AluResult {
    pub out: TritHz,
    pub cout: TritHz,
}

/// Behavioral one-digit ALU over the nine (s0, s1) operation rows.
///
/// Arithmetic rows: Add is `a + b + cin`, Increase is `a + 1` (carry-in
/// forced, `b` ignored), Subtract is the per-digit radix complement
/// `(2 - a) + b + 1` computing `b - a`. Logic rows produce the gate function
/// with a floating carry.
pub fn alu_behavioral(
    s0: Trit,
    s1: Trit,
    a: Trit,
    b: Trit,
    cin: Trit,
) -> Result<AluResult, ArithError> {
    if cin == Trit::Two {
        return Err(ArithError::InvalidCarry(cin));
    }
    let op = AluOp::decode(s0, s1);
    let result = match op {
        AluOp::Add => {
            let (sum, cout) = full_add(a, b, cin)?;
            AluResult { out: sum.into(), cout: cout.into() }
        }
        AluOp::Increase => {
            let (sum, cout) = full_add(a, Trit::Zero, Trit::One)?;
            AluResult { out: sum.into(), cout: cout.into() }
        }
        AluOp::Subtract => {
            let (sum, cout) = full_add(t_not(a), b, Trit::One)?;
            AluResult { out: sum.into(), cout: cout.into() }
        }
        AluOp::Buffer => AluResult { out: a.into(), cout: TritHz::Hz },
        AluOp::And => AluResult { out: t_min(a, b).into(), cout: TritHz::Hz },
        AluOp::Or => AluResult { out: t_max(a, b).into(), cout: TritHz::Hz },
        AluOp::Not => AluResult { out: t_not(a).into(), cout: TritHz::Hz },
        AluOp::Nand => AluResult { out: t_not(t_min(a, b)).into(), cout: TritHz::Hz },
        AluOp::Nor => AluResult { out: t_not(t_max(a, b)).into(), cout: TritHz::Hz },
    };
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Trit::{One, Two, Zero};

    const Z: TritHz = TritHz::Hz;

    fn v(t: Trit) -> TritHz {
        TritHz::Value(t)
    }

    #[test]
    fn max_min_not_basics() {
        assert_eq!(t_max(Zero, Zero), Zero);
        assert_eq!(t_max(One, Two), Two);
        assert_eq!(t_max(Two, Zero), Two);
        assert_eq!(t_min(Two, Two), Two);
        assert_eq!(t_min(One, Two), One);
        assert_eq!(t_min(Zero, Two), Zero);
        assert_eq!(t_not(Zero), Two);
        assert_eq!(t_not(One), One);
        assert_eq!(t_not(Two), Zero);
    }

    #[test]
    fn inverter_truth_tables() {
        // (input, pti, nti, sti)
        let table = [
            (Zero, Two, Two, Two),
            (One, Two, Zero, One),
            (Two, Zero, Zero, Zero),
        ];
        for (a, p, n, s) in table {
            assert_eq!(pti(a), p, "pti({a})");
            assert_eq!(nti(a), n, "nti({a})");
            assert_eq!(sti(a), s, "sti({a})");
        }
    }

    #[test]
    fn algebra_laws_exhaustive() {
        for a in Trit::ALL {
            assert_eq!(t_not(t_not(a)), a, "involution");
            assert_eq!(t_max(a, a), a, "max idempotent");
            assert_eq!(t_min(a, a), a, "min idempotent");
            for b in Trit::ALL {
                assert_eq!(t_max(a, b), t_max(b, a), "max commutative");
                assert_eq!(t_min(a, b), t_min(b, a), "min commutative");
                assert_eq!(t_min(a, t_max(a, b)), a, "absorption");
                assert_eq!(t_max(a, t_min(a, b)), a, "absorption dual");
                assert_eq!(
                    t_not(t_min(a, b)),
                    t_max(t_not(a), t_not(b)),
                    "de morgan"
                );
                assert_eq!(
                    t_not(t_max(a, b)),
                    t_min(t_not(a), t_not(b)),
                    "de morgan dual"
                );
                for c in Trit::ALL {
                    assert_eq!(t_max(t_max(a, b), c), t_max(a, t_max(b, c)));
                    assert_eq!(t_min(t_min(a, b), c), t_min(a, t_min(b, c)));
                }
            }
        }
    }

    #[test]
    fn buffer_not_gate_table() {
        let table = [
            (Zero, Zero, v(Zero)),
            (Zero, One, v(One)),
            (Zero, Two, v(Two)),
            (One, Zero, Z),
            (One, One, Z),
            (One, Two, Z),
            (Two, Zero, v(Two)),
            (Two, One, v(One)),
            (Two, Two, v(Zero)),
        ];
        for (s, input, expect) in table {
            assert_eq!(tri_buffer_not(s, input), expect, "s={s} in={input}");
        }
    }

    #[test]
    fn and_nand_or_nor_examples() {
        assert_eq!(tri_and_nand(Zero, Two, One), v(One));
        assert_eq!(tri_and_nand(Two, Two, Two), v(Zero));
        assert_eq!(tri_and_nand(One, Zero, Two), Z);
        assert_eq!(tri_or_nor(Zero, One, Zero), v(One));
        assert_eq!(tri_or_nor(Two, Zero, Zero), v(Two));
        assert_eq!(tri_or_nor(One, Two, Two), Z);
    }

    #[test]
    fn complement_pair_property() {
        // Every gate computes its complement when switched from s=0 to s=2,
        // and floats at s=1.
        for a in Trit::ALL {
            for b in Trit::ALL {
                let pairs = [
                    (tri_and_nand(Zero, a, b), tri_and_nand(Two, a, b)),
                    (tri_or_nor(Zero, a, b), tri_or_nor(Two, a, b)),
                    (tri_buffer_not(Zero, a), tri_buffer_not(Two, a)),
                ];
                for (func, comp) in pairs {
                    assert_eq!(comp, v(t_not(func.value().unwrap())));
                }
                assert!(tri_and_nand(One, a, b).is_hz());
                assert!(tri_or_nor(One, a, b).is_hz());
                assert!(tri_buffer_not(One, a).is_hz());
            }
        }
    }

    #[test]
    fn full_add_identity_exhaustive() {
        for a in Trit::ALL {
            for b in Trit::ALL {
                for cin in [Zero, One] {
                    let (sum, cout) = full_add(a, b, cin).unwrap();
                    assert_eq!(
                        sum.as_u8() + 3 * cout.as_u8(),
                        a.as_u8() + b.as_u8() + cin.as_u8()
                    );
                }
            }
        }
        assert_eq!(full_add(Zero, Zero, Zero).unwrap(), (Zero, Zero));
        assert_eq!(full_add(Two, Two, One).unwrap(), (Two, One));
        assert_eq!(full_add(One, Two, Zero).unwrap(), (Zero, One));
        assert_eq!(full_add(Zero, Zero, Two), Err(ArithError::InvalidCarry(Two)));
    }

    #[test]
    fn word_round_trip() {
        for width in 1..=4usize {
            for value in 0..3u64.pow(width as u32) {
                let w = TernaryWord::from_u64(value, width).unwrap();
                assert_eq!(w.to_u64(), value);
                assert_eq!(w.width(), width);
            }
        }
        assert!(TernaryWord::from_u64(9, 2).is_err());
    }

    #[test]
    fn add_sub_examples() {
        let w = |v| TernaryWord::from_u64(v, 2).unwrap();
        // 8 + 8 = 16 = 7 + 9
        assert_eq!(add_sub(Zero, &w(8), &w(8)).unwrap(), (w(7), One));
        // 5 - 2 = 3 with end carry
        assert_eq!(add_sub(Two, &w(2), &w(5)).unwrap(), (w(3), One));
        // 0 - 0 = 0 with end carry
        assert_eq!(add_sub(Two, &w(0), &w(0)).unwrap(), (w(0), One));
        assert_eq!(add_sub(One, &w(0), &w(0)), Err(ArithError::InvalidMode(One)));
        assert!(matches!(
            add_sub(Zero, &w(0), &TernaryWord::from_u64(0, 3).unwrap()),
            Err(ArithError::WidthMismatch(2, 3))
        ));
    }

    #[test]
    fn add_sub_exhaustive_width_2() {
        for ai in 0..9u64 {
            for bi in 0..9u64 {
                let a = TernaryWord::from_u64(ai, 2).unwrap();
                let b = TernaryWord::from_u64(bi, 2).unwrap();
                let (sum, cout) = add_sub(Zero, &a, &b).unwrap();
                assert_eq!(sum.to_u64() + 9 * u64::from(cout.as_u8()), ai + bi);
                let (diff, borrow) = add_sub(Two, &a, &b).unwrap();
                assert_eq!(diff.to_u64(), (9 + bi - ai) % 9, "{bi} - {ai}");
                assert_eq!(borrow == One, bi >= ai, "carry flags {bi} >= {ai}");
            }
        }
    }

    #[test]
    fn control_word_rows() {
        let rows = [
            ((One, Zero), (One, One, One, Zero)),
            ((One, One), (One, One, One, Zero)),
            ((One, Two), (One, One, One, Zero)),
            ((Zero, Zero), (Zero, One, One, One)),
            ((Zero, One), (One, Zero, One, One)),
            ((Zero, Two), (One, One, Zero, One)),
            ((Two, Zero), (Two, One, One, One)),
            ((Two, One), (One, Two, One, One)),
            ((Two, Two), (One, One, Two, One)),
        ];
        for ((s0, s1), (c1, c2, c3, c4)) in rows {
            let w = control_signals(s0, s1);
            assert_eq!((w.c1, w.c2, w.c3, w.c4), (c1, c2, c3, c4), "s0={s0} s1={s1}");
        }
    }

    #[test]
    fn alu_rows() {
        // NOT row
        let r = alu_behavioral(Two, Zero, One, Two, Zero).unwrap();
        assert_eq!((r.out, r.cout), (v(One), Z));
        // OR row
        let r = alu_behavioral(Zero, Two, Zero, Two, Zero).unwrap();
        assert_eq!((r.out, r.cout), (v(Two), Z));
        // Subtract row: 1 - 2 per digit = (2-2) + 1 + 1 = 2, no carry
        let r = alu_behavioral(One, Two, Two, One, Zero).unwrap();
        assert_eq!((r.out, r.cout), (v(Two), v(Zero)));
        // Increase row ignores b
        let r = alu_behavioral(One, One, Two, Two, Zero).unwrap();
        assert_eq!((r.out, r.cout), (v(Zero), v(One)));
        assert!(alu_behavioral(One, Zero, Zero, Zero, Two).is_err());
    }

    #[test]
    fn alu_single_driver_per_row() {
        // Exactly one of the main/arithmetic outputs is driven in every row.
        for s0 in Trit::ALL {
            for s1 in Trit::ALL {
                for a in Trit::ALL {
                    for b in Trit::ALL {
                        let r = alu_behavioral(s0, s1, a, b, Zero).unwrap();
                        assert!(!r.out.is_hz());
                        let op = AluOp::decode(s0, s1);
                        assert_eq!(r.cout.is_hz(), !op.is_arithmetic());
                    }
                }
            }
        }
    }
}
