/// Gain-correction rule table, rows e = NB..PB, columns ec = NB..PB.
pub const GOLDEN_RULES: &str = "\
PB/NB/PS PB/NB/NS PM/NM/NB PM/NM/NB PS/NS/NB ZO/ZO/NM ZO/ZO/PS
PB/NB/ZO PB/NM/NS PM/NS/NM PS/NS/NM PS/ZO/NS ZO/PS/NS NS/PS/ZO
PM/NM/ZO PM/NM/NS PM/NS/NS PS/ZO/NS ZO/PS/NS NS/PM/NS NS/PM/ZO
PM/NM/ZO PM/NS/ZO PS/ZO/ZO ZO/PS/ZO NS/PS/ZO NM/PM/ZO NM/PB/ZO
PS/ZO/PB PS/ZO/NS ZO/PS/PS NS/PS/PS NS/PM/PS NM/PB/PS NM/PB/PB
PS/ZO/PB ZO/ZO/PM NS/PS/PM NM/PM/PM NM/PM/PS NM/PB/PS NB/PB/PB
ZO/NB/PS ZO/NB/NS NM/NM/NB NM/NM/NB NM/NS/NB NB/ZO/NM NB/ZO/PS";
