//! Embedded reference values for the built-in oscillators.
//!
//! These are regression data, quoted as printed (truncated at the last
//! stable digit), not computed ground truth. Imaginary parts of "0" mean
//! the root is real at that dimension.

/// One row of the g = 0.14 convergence table: (D, Re, Im).
pub type ConvergenceRow = (usize, &'static str, &'static str);

/// One row of a resonance-vs-coupling table: (g, Re, Im, ratio).
pub type ResonanceRow = (&'static str, &'static str, &'static str, &'static str);

/// Hankel sequence E^[D,0] for the triple well at g = 0.14.
pub const TRIPLE_WELL_CONVERGENCE: [ConvergenceRow; 14] = [
    (2, "0.96913474062929793208", "0"),
    (3, "0.96912933030952144688", "0"),
    (4, "0.96912932029284635448", "0"),
    (5, "0.96912932006642961226", "3.6781221743857153252e-10"),
    (6, "0.96912932002647227146", "3.3990326234127550889e-10"),
    (7, "0.96912932002710973379", "3.3801038698293392418e-10"),
    (8, "0.96912932002717289039", "3.3798079586780234680e-10"),
    (9, "0.96912932002717518442", "3.3798093143407212241e-10"),
    (10, "0.96912932002717525409", "3.3798095397280767486e-10"),
    (11, "0.96912932002717525622", "3.3798095479442123313e-10"),
    (12, "0.96912932002717525629", "3.3798095481219295624e-10"),
    (13, "0.96912932002717525629", "3.3798095481219029216e-10"),
    (14, "0.96912932002717525629", "3.3798095481216587093e-10"),
    (15, "0.96912932002717525629", "3.3798095481216435223e-10"),
];

/// Lowest complex eigenvalue of the triple well; ratio column is
/// Im E * g^2 * exp(1/(2 g^2)).
pub const TRIPLE_WELL_RESONANCES: [ResonanceRow; 13] = [
    (
        "0.08",
        "0.99025645954150600314",
        "1.16994e-32",
        "0.6362094894",
    ),
    (
        "0.09",
        "0.98761765110834730415",
        "1.28623698e-25",
        "0.6700502315",
    ),
    (
        "0.10",
        "0.98464158830285882643",
        "1.3513930260e-20",
        "0.7006574893",
    ),
    (
        "0.12",
        "0.97763491479323529157",
        "4.3530125379031e-14",
        "0.7530467190",
    ),
    (
        "0.14",
        "0.96912932002717525629",
        "3.37980954812164e-10",
        "0.7944913345",
    ),
    (
        "0.16",
        "0.95896997046169207832",
        "1.0619001732959989e-7",
        "0.8253492417",
    ),
    (
        "0.18",
        "0.94691604067745932355",
        "5.18077667159013113e-6",
        "0.8453084682",
    ),
    (
        "0.20",
        "0.93255571582477452180",
        "7.94775543996767651e-5",
        "0.8530716514",
    ),
    (
        "0.22",
        "0.91525354748034208273",
        "5.70253065914296141e-4",
        "0.8461088416",
    ),
    (
        "0.24",
        "0.89442055320991452496",
        "2.424632840047890532e-3",
        "0.8222158493",
    ),
    (
        "0.26",
        "0.87011531157430539225",
        "7.104058338260953225e-3",
        "0.7828715436",
    ),
    (
        "0.28",
        "0.84333442392342060412",
        "1.5915859465250206010e-2",
        "0.7343132667",
    ),
    (
        "0.30",
        "0.81560795814733914293",
        "2.9400216892153485663e-2",
        "0.6844475376",
    ),
];

/// Lowest resonance of the double well; ratio column is
/// Im E * g * exp(1/(3 g^2)).
pub const DOUBLE_WELL_RESONANCES: [ResonanceRow; 13] = [
    (
        "0.08",
        "0.99017315154568105030",
        "4.66667951e-22",
        "1.554541174",
    ),
    (
        "0.09",
        "0.98748105548308533216",
        "2.3014736620e-17",
        "1.543296673",
    ),
    (
        "0.10",
        "0.98442766976525540084",
        "5.1093948883947e-14",
        "1.530566484",
    ),
    (
        "0.12",
        "0.97716020191841551216",
        "1.1063680213861671e-9",
        "1.500354438",
    ),
    (
        "0.14",
        "0.96816424784205963513",
        "4.297124100601175228e-7",
        "1.463074727",
    ),
    (
        "0.16",
        "0.95708500653988706061",
        "1.9606870293524100682e-5",
        "1.417112487",
    ),
    (
        "0.18",
        "0.94328218799381038166",
        "2.5699864836055797687e-4",
        "1.35910675",
    ),
    (
        "0.20",
        "0.92594246107314318252",
        "1.5440221243204925966e-3",
        "1.284707315",
    ),
    (
        "0.22",
        "0.90482508551985951067",
        "5.5395017058573660278e-3",
        "1.193719284",
    ),
    (
        "0.24",
        "0.88093011197386366807",
        "1.3978475279423154843e-2",
        "1.093828654",
    ),
    (
        "0.26",
        "0.85613353763295142744",
        "2.767004146177769213e-2",
        "0.9964939951",
    ),
    (
        "0.28",
        "0.83225989985769363726",
        "4.6300611971065823176e-2",
        "0.9104055713",
    ),
    (
        "0.30",
        "0.81052712217939364397",
        "6.8908503646837670242e-2",
        "0.839251556",
    ),
];

/// Significant digits in a printed decimal (sign, point and exponent
/// excluded; leading zeros excluded).
pub fn printed_digits(s: &str) -> u32 {
    let body = s.split(['e', 'E']).next().unwrap_or(s);
    let mut seen_nonzero = false;
    let mut count = 0u32;
    for c in body.chars() {
        if c.is_ascii_digit() {
            if c != '0' {
                seen_nonzero = true;
            }
            if seen_nonzero {
                count += 1;
            }
        }
    }
    count
}
