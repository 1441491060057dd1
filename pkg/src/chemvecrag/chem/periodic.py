"""Element data: symbols, standard atomic weights, SMILES valence rules."""

from __future__ import annotations

from typing import Final

# Standard atomic weights (g/mol), 4 decimal places. Elements without a
# standard weight carry the mass number of their most stable isotope.
ATOMIC_WEIGHTS: Final[dict[str, float]] = {
    "H": 1.008, "He": 4.0026,
    "Li": 6.94, "Be": 9.0122, "B": 10.81, "C": 12.011, "N": 14.007,
    "O": 15.999, "F": 18.9984, "Ne": 20.1797,
    "Na": 22.9898, "Mg": 24.305, "Al": 26.9815, "Si": 28.085, "P": 30.9738,
    "S": 32.06, "Cl": 35.45, "Ar": 39.948,
    "K": 39.0983, "Ca": 40.078, "Sc": 44.9559, "Ti": 47.867, "V": 50.9415,
    "Cr": 51.9961, "Mn": 54.938, "Fe": 55.845, "Co": 58.9332, "Ni": 58.6934,
    "Cu": 63.546, "Zn": 65.38, "Ga": 69.723, "Ge": 72.63, "As": 74.9216,
    "Se": 78.971, "Br": 79.904, "Kr": 83.798,
    "Rb": 85.4678, "Sr": 87.62, "Y": 88.9058, "Zr": 91.224, "Nb": 92.9064,
    "Mo": 95.95, "Tc": 97.0, "Ru": 101.07, "Rh": 102.9055, "Pd": 106.42,
    "Ag": 107.8682, "Cd": 112.414, "In": 114.818, "Sn": 118.71,
    "Sb": 121.76, "Te": 127.6, "I": 126.9045, "Xe": 131.293,
    "Cs": 132.9055, "Ba": 137.327, "La": 138.9055, "Ce": 140.116,
    "Pr": 140.9077, "Nd": 144.242, "Pm": 145.0, "Sm": 150.36,
    "Eu": 151.964, "Gd": 157.25, "Tb": 158.9254, "Dy": 162.5,
    "Ho": 164.9303, "Er": 167.259, "Tm": 168.9342, "Yb": 173.045,
    "Lu": 174.9668, "Hf": 178.486, "Ta": 180.9479, "W": 183.84,
    "Re": 186.207, "Os": 190.23, "Ir": 192.217, "Pt": 195.084,
    "Au": 196.9666, "Hg": 200.592, "Tl": 204.38, "Pb": 207.2,
    "Bi": 208.9804, "Po": 209.0, "At": 210.0, "Rn": 222.0,
    "Fr": 223.0, "Ra": 226.0, "Ac": 227.0, "Th": 232.0377,
    "Pa": 231.0359, "U": 238.0289, "Np": 237.0, "Pu": 244.0,
    "Am": 243.0, "Cm": 247.0, "Bk": 247.0, "Cf": 251.0, "Es": 252.0,
    "Fm": 257.0, "Md": 258.0, "No": 259.0, "Lr": 266.0, "Rf": 267.0,
    "Db": 268.0, "Sg": 269.0, "Bh": 270.0, "Hs": 277.0, "Mt": 278.0,
    "Ds": 281.0, "Rg": 282.0, "Cn": 285.0, "Nh": 286.0, "Fl": 289.0,
    "Mc": 290.0, "Lv": 293.0, "Ts": 294.0, "Og": 294.0,
    # Wildcard attachment atoms carry no mass by convention.
    "*": 0.0,
}

ELEMENTS: Final[frozenset[str]] = frozenset(ATOMIC_WEIGHTS)

# Atoms writable without brackets, per the SMILES organic subset.
ORGANIC_SUBSET: Final[frozenset[str]] = frozenset(
    {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "*"}
)

# Elements that may carry the aromatic (lowercase) flag.
AROMATIC_ELEMENTS: Final[frozenset[str]] = frozenset(
    {"B", "C", "N", "O", "P", "S", "Se", "As", "Te"}
)
# Lowercase symbols accepted outside brackets.
AROMATIC_ORGANIC: Final[frozenset[str]] = frozenset({"b", "c", "n", "o", "p", "s"})

# SMILES default valences used for implicit-hydrogen inference, smallest
# first. Only organic-subset atoms written without brackets use these.
DEFAULT_VALENCES: Final[dict[str, tuple[int, ...]]] = {
    "B": (3,),
    "C": (4,),
    "N": (3, 5),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

# Aromatic atoms that contribute a pi bond to the ring system get one
# extra unit of used valence; lone-pair donors (O, S, Se, Te) do not.
AROMATIC_PI_ELEMENTS: Final[frozenset[str]] = frozenset({"B", "C", "N", "P", "As"})


def atomic_weight(symbol: str) -> float:
    """Standard atomic weight for a symbol; wildcard atoms weigh 0."""
    return ATOMIC_WEIGHTS[symbol]


def is_known_element(symbol: str) -> bool:
    return symbol in ELEMENTS


def implied_hydrogens(
    element: str, aromatic: bool, order_sum: int, has_multiple_bond: bool = False
) -> int | None:
    """Implicit H count for a bare (non-bracket) atom, or None when the
    bond order sum exceeds every default valence.

    ``order_sum`` counts aromatic bonds as 1. Aromatic pi-bond elements
    get one extra unit of used valence unless an explicit double/triple
    bond already accounts for their pi electron (e.g. aromatic ``c(=O)``).
    """
    if element == "*":
        return 0
    valences = DEFAULT_VALENCES.get(element)
    if valences is None:
        return None
    used = order_sum
    if aromatic and element in AROMATIC_PI_ELEMENTS and not has_multiple_bond:
        used += 1
    for valence in valences:
        if valence >= used:
            return valence - used
    return None
