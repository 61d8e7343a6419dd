"""Heavy-atom residue templates for peptide graph construction.

Each template describes one residue as it appears inside a chain: the four
backbone atoms (N, CA, C, carbonyl O) plus the side chain, with explicit bond
orders.  The C-terminal carboxyl oxygen (OXT) is added at build time, so a
free amino acid has one more heavy atom than its template.
"""

from dataclasses import dataclass

SINGLE = "single"
DOUBLE = "double"
AROMATIC = "aromatic"

BOND_ORDERS = (SINGLE, DOUBLE, AROMATIC)

BACKBONE_ATOMS = [("N", "N"), ("CA", "C"), ("C", "C"), ("O", "O")]
BACKBONE_BONDS = [("N", "CA", SINGLE), ("CA", "C", SINGLE), ("C", "O", DOUBLE)]


@dataclass(frozen=True)
class ResidueTemplate:
    letter: str
    atoms: tuple  # (name, element, aromatic) triples
    bonds: tuple  # (name_a, name_b, order) triples
    ring_count: int


def _template(letter, side_atoms, side_bonds, ring_count=0, aromatic_atoms=()):
    atoms = tuple(
        (name, elem, name in aromatic_atoms)
        for name, elem in BACKBONE_ATOMS + side_atoms
    )
    bonds = tuple(BACKBONE_BONDS + side_bonds)
    return ResidueTemplate(letter, atoms, bonds, ring_count)


def _chain(*names):
    """Single bonds CA - names[0] - names[1] - ..."""
    prev = "CA"
    bonds = []
    for name in names:
        bonds.append((prev, name, SINGLE))
        prev = name
    return bonds


TEMPLATES = {
    "G": _template("G", [], []),
    "A": _template("A", [("CB", "C")], _chain("CB")),
    "S": _template("S", [("CB", "C"), ("OG", "O")], _chain("CB", "OG")),
    "C": _template("C", [("CB", "C"), ("SG", "S")], _chain("CB", "SG")),
    "T": _template(
        "T",
        [("CB", "C"), ("OG1", "O"), ("CG2", "C")],
        _chain("CB", "OG1") + [("CB", "CG2", SINGLE)],
    ),
    "V": _template(
        "V",
        [("CB", "C"), ("CG1", "C"), ("CG2", "C")],
        _chain("CB", "CG1") + [("CB", "CG2", SINGLE)],
    ),
    "L": _template(
        "L",
        [("CB", "C"), ("CG", "C"), ("CD1", "C"), ("CD2", "C")],
        _chain("CB", "CG", "CD1") + [("CG", "CD2", SINGLE)],
    ),
    "I": _template(
        "I",
        [("CB", "C"), ("CG1", "C"), ("CG2", "C"), ("CD1", "C")],
        _chain("CB", "CG1", "CD1") + [("CB", "CG2", SINGLE)],
    ),
    "M": _template(
        "M",
        [("CB", "C"), ("CG", "C"), ("SD", "S"), ("CE", "C")],
        _chain("CB", "CG", "SD", "CE"),
    ),
    "D": _template(
        "D",
        [("CB", "C"), ("CG", "C"), ("OD1", "O"), ("OD2", "O")],
        _chain("CB", "CG")
        + [("CG", "OD1", DOUBLE), ("CG", "OD2", SINGLE)],
    ),
    "N": _template(
        "N",
        [("CB", "C"), ("CG", "C"), ("OD1", "O"), ("ND2", "N")],
        _chain("CB", "CG")
        + [("CG", "OD1", DOUBLE), ("CG", "ND2", SINGLE)],
    ),
    "E": _template(
        "E",
        [("CB", "C"), ("CG", "C"), ("CD", "C"), ("OE1", "O"), ("OE2", "O")],
        _chain("CB", "CG", "CD")
        + [("CD", "OE1", DOUBLE), ("CD", "OE2", SINGLE)],
    ),
    "Q": _template(
        "Q",
        [("CB", "C"), ("CG", "C"), ("CD", "C"), ("OE1", "O"), ("NE2", "N")],
        _chain("CB", "CG", "CD")
        + [("CD", "OE1", DOUBLE), ("CD", "NE2", SINGLE)],
    ),
    "K": _template(
        "K",
        [("CB", "C"), ("CG", "C"), ("CD", "C"), ("CE", "C"), ("NZ", "N")],
        _chain("CB", "CG", "CD", "CE", "NZ"),
    ),
    "R": _template(
        "R",
        [
            ("CB", "C"), ("CG", "C"), ("CD", "C"), ("NE", "N"),
            ("CZ", "C"), ("NH1", "N"), ("NH2", "N"),
        ],
        _chain("CB", "CG", "CD", "NE", "CZ")
        + [("CZ", "NH1", DOUBLE), ("CZ", "NH2", SINGLE)],
    ),
    "H": _template(
        "H",
        [
            ("CB", "C"), ("CG", "C"), ("ND1", "N"),
            ("CD2", "C"), ("CE1", "C"), ("NE2", "N"),
        ],
        _chain("CB", "CG")
        + [
            ("CG", "ND1", AROMATIC), ("ND1", "CE1", AROMATIC),
            ("CE1", "NE2", AROMATIC), ("NE2", "CD2", AROMATIC),
            ("CD2", "CG", AROMATIC),
        ],
        ring_count=1,
        aromatic_atoms={"CG", "ND1", "CD2", "CE1", "NE2"},
    ),
    "F": _template(
        "F",
        [
            ("CB", "C"), ("CG", "C"), ("CD1", "C"), ("CD2", "C"),
            ("CE1", "C"), ("CE2", "C"), ("CZ", "C"),
        ],
        _chain("CB", "CG")
        + [
            ("CG", "CD1", AROMATIC), ("CD1", "CE1", AROMATIC),
            ("CE1", "CZ", AROMATIC), ("CZ", "CE2", AROMATIC),
            ("CE2", "CD2", AROMATIC), ("CD2", "CG", AROMATIC),
        ],
        ring_count=1,
        aromatic_atoms={"CG", "CD1", "CD2", "CE1", "CE2", "CZ"},
    ),
    "Y": _template(
        "Y",
        [
            ("CB", "C"), ("CG", "C"), ("CD1", "C"), ("CD2", "C"),
            ("CE1", "C"), ("CE2", "C"), ("CZ", "C"), ("OH", "O"),
        ],
        _chain("CB", "CG")
        + [
            ("CG", "CD1", AROMATIC), ("CD1", "CE1", AROMATIC),
            ("CE1", "CZ", AROMATIC), ("CZ", "CE2", AROMATIC),
            ("CE2", "CD2", AROMATIC), ("CD2", "CG", AROMATIC),
            ("CZ", "OH", SINGLE),
        ],
        ring_count=1,
        aromatic_atoms={"CG", "CD1", "CD2", "CE1", "CE2", "CZ"},
    ),
    "W": _template(
        "W",
        [
            ("CB", "C"), ("CG", "C"), ("CD1", "C"), ("CD2", "C"),
            ("NE1", "N"), ("CE2", "C"), ("CE3", "C"),
            ("CZ2", "C"), ("CZ3", "C"), ("CH2", "C"),
        ],
        _chain("CB", "CG")
        + [
            ("CG", "CD1", AROMATIC), ("CD1", "NE1", AROMATIC),
            ("NE1", "CE2", AROMATIC), ("CE2", "CD2", AROMATIC),
            ("CD2", "CG", AROMATIC),
            ("CE2", "CZ2", AROMATIC), ("CZ2", "CH2", AROMATIC),
            ("CH2", "CZ3", AROMATIC), ("CZ3", "CE3", AROMATIC),
            ("CE3", "CD2", AROMATIC),
        ],
        ring_count=2,
        aromatic_atoms={
            "CG", "CD1", "CD2", "NE1", "CE2", "CE3", "CZ2", "CZ3", "CH2",
        },
    ),
    "P": _template(
        "P",
        [("CB", "C"), ("CG", "C"), ("CD", "C")],
        _chain("CB", "CG", "CD") + [("CD", "N", SINGLE)],
        ring_count=1,
    ),
}

#: heavy-atom counts of the free (uncondensed) amino acids, used as the
#: independent molecular-formula oracle in tests
FREE_HEAVY_ATOMS = {
    "G": 5, "A": 6, "S": 7, "P": 8, "V": 8, "T": 8, "C": 7, "L": 9, "I": 9,
    "N": 9, "D": 9, "Q": 10, "K": 10, "E": 10, "M": 9, "H": 11, "F": 12,
    "R": 12, "Y": 13, "W": 15,
}

RING_COUNTS = {letter: t.ring_count for letter, t in TEMPLATES.items()}

#: ambiguity-code substitutions applied before template lookup
SUBSTITUTIONS = {"B": "N", "Z": "Q", "U": "C", "O": "K"}
