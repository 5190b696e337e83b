"""Reference states shared by the test suite and the scripts."""

from fractions import Fraction

import numpy as np

from .dsl import state
from .states import DensityMatrix, density_from_pure, tensor_all

# (expression, exact entanglement rate)
TABLE1 = [
    ("bell^5", Fraction(1, 9)),
    ("ghz(3)^5", Fraction(1, 7)),
    ("ghz(5) x ghz(4)", Fraction(4, 9)),
    ("ghz(5) x bell^4", Fraction(7, 39)),
]

# |GHZ> on A,B,C times |Phi+> on D,E
GHZ_BELL = "ghz(3) x bell"

# pure states with at most six sites
PURE_CORPUS = [
    "|0>",
    "|000>",
    "|010>",
    "|0000>",
    "bell",
    "phi-",
    "psi+",
    "psi-",
    "ghz(3)",
    "ghz(4)",
    "ghz(2,3)",
    "ghz(3,3)",
    "w(3)",
    "w(4)",
    "ghz(3) x bell",
    "bell x bell",
    "bell x |0> x psi-",
    "(|0> + |1>)/sqrt(2) x w(3)",
    "((|0> + |1>)/sqrt(2))^4",
    "ghz(2,3) x |1> x w(3)",
    "|01,2> x bell",
    "1/sqrt(3)*|00> + 1/sqrt(3)*|11> + 1/sqrt(3)*|22>",
    "3/5*|00> + 4/5*|11>",
    "bell x bell x bell",
    "ghz(6)",
    "w(3) x ghz(3)",
]

# expressions that must parse, covering every grammar production
GRAMMAR_EXAMPLES = [
    "ghz(3) x bell",
    "ghz(3) ⊗ bell",
    "(|000> + |111>)/sqrt(2)",
    "mix(0.5: |00>, 0.5: bell)",
    "mix(1/4: |00>, 3/4: phi-)",
    "mix(1: ghz(3))",
    "ghz(5) x bell x bell x bell x bell",
    "ghz(3)^5",
    "bell^5",
    "ghz(2,3)",
    "w(4)",
    "phi+ x phi- x psi+ x psi-",
    "1/sqrt(2)*|01> - 1/sqrt(2)*|10>",
    "0.6*|0> + 0.8*|1>",
    "3/5*|0> - 4/5*|1>",
    "-|1>",
    "|1,0,12>",
    "(ghz(3) x bell)",
    "((|0> + |1>)/sqrt(2))^3",
    "mix(0.5: |0>, 0.5: |1>) x bell",
    "mix(0.5: mix(0.5: |0>, 0.5: |1>), 0.5: |0>)",
    "BELL x GHZ(2)",
]

MALFORMED = [
    "",
    "ghz(",
    "ghz(3",
    "ghz()",
    "ghz(0)",
    "ghz(3,1)",
    "foo(3)",
    "|01",
    "|0a>",
    "||0>",
    "bell x",
    "x bell",
    "bell bell",
    "mix(0.5 |0>)",
    "mix(0.5: |0>, 0.5: |00>)",
    "mix(0.5: |0> 0.5: |1>)",
    "(|0> + |1>)/2",
    "(|0> + |1>)/sqrt(2",
    "|0> + |00>",
    "bell ^ x",
    "1/sqrt(2) |0>",
    "ghz(3) $ bell",
    "mix(-0.5: |0>)",
    "w",
    "mix(0.5: |0>)",
]


def mixed_fixture() -> DensityMatrix:
    """|0><0| (x) I/2 (x) |Phi+><Phi+| on four qubits."""
    zero = np.diag([1.0, 0.0])
    return tensor_all([
        DensityMatrix((2,), zero),
        DensityMatrix((2,), np.eye(2) / 2),
        density_from_pure(state("bell")),
    ])


def maximally_mixed_pair() -> DensityMatrix:
    return DensityMatrix((2, 2), np.eye(4) / 4)
