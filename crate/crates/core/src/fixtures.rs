//! Small hand-built games used throughout the tests, the CLI generators and
//! the documentation.

use crate::games::NormalFormGame;

fn build(name: &str, rows: &[&str], cols: &[&str], table: &[&[(i64, i64)]]) -> NormalFormGame {
    NormalFormGame::bimatrix(name, rows, cols, table).expect("fixture tables are well formed")
}

/// Prisoner's dilemma: C = cooperate, D = defect.
pub fn prisoners_dilemma() -> NormalFormGame {
    build(
        "PD",
        &["C", "D"],
        &["C", "D"],
        &[&[(3, 3), (0, 4)], &[(4, 0), (1, 1)]],
    )
}

/// Chicken (`Gb`), Chicken with an extra dominated row `C'` (`Ga`), and the
/// affine image of `Gb` under `x ↦ 2x + 4` with actions renamed to E, F (`Gc`).
pub fn trio() -> (NormalFormGame, NormalFormGame, NormalFormGame) {
    let ga = build(
        "Ga",
        &["C", "D", "C'"],
        &["C", "D"],
        &[&[(3, 3), (1, 4)], &[(4, 1), (0, 0)], &[(2, 3), (0, 4)]],
    );
    let gb = build(
        "Gb",
        &["C", "D"],
        &["C", "D"],
        &[&[(3, 3), (1, 4)], &[(4, 1), (0, 0)]],
    );
    let gc = build(
        "Gc",
        &["E", "F"],
        &["E", "F"],
        &[&[(10, 10), (6, 12)], &[(12, 6), (4, 4)]],
    );
    (ga, gb, gc)
}

/// Stag hunt with a risky efficient equilibrium (H,H) and a safe one (L,L).
pub fn stag_hunt_left() -> NormalFormGame {
    build(
        "SH",
        &["H", "L"],
        &["H", "L"],
        &[&[(8, 8), (0, 4)], &[(4, 0), (7, 7)]],
    )
}

/// The less risky counterpart of [`stag_hunt_left`].
pub fn stag_hunt_right() -> NormalFormGame {
    build(
        "SH2",
        &["H", "L"],
        &["H", "L"],
        &[&[(9, 8), (1, 3)], &[(4, 1), (7, 7)]],
    )
}

pub fn matching_pennies() -> NormalFormGame {
    build(
        "MP",
        &["h", "t"],
        &["h", "t"],
        &[&[(1, -1), (-1, 1)], &[(-1, 1), (1, -1)]],
    )
}

/// Pure coordination with identical payoffs; its automorphisms are the
/// identity and the simultaneous swap of both players' actions.
pub fn coordination() -> NormalFormGame {
    build(
        "Coord",
        &["a", "b"],
        &["a", "b"],
        &[&[(1, 1), (0, 0)], &[(0, 0), (1, 1)]],
    )
}

/// The two-action game used as the improvement target of the hardness reduction.
pub fn reduction_base() -> NormalFormGame {
    build(
        "G",
        &["a1", "a2"],
        &["a1", "a2"],
        &[&[(4, 0), (0, 0)], &[(0, 0), (2, 1)]],
    )
}

/// Single-outcome game paying (3, 2).
pub fn reduction_candidate() -> NormalFormGame {
    build("G_prime", &["a1"], &["a1"], &[&[(3, 2)]])
}
