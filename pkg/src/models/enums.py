'''
Fixed-value enums shared by the config schemas, the optimizers and the harness.
'''

from enum import Enum


class Link(str, Enum):
    """Alice's three outgoing links."""
    BOB = "b"
    EVE = "e"
    WILLIE = "w"


class LambertBranch(str, Enum):
    """Real branches of the Lambert W function."""
    PRINCIPAL = "principal"
    MINUS_ONE = "minus_one"


class SchemeName(str, Enum):
    """Antenna-placement schemes compared in the sweeps."""
    PROPOSED = "proposed"
    FPA = "fpa"
    RPA = "rpa"
    EAS = "eas"


class SweepAxis(str, Enum):
    """Parameter swept by an experiment."""
    PMAX = "pmax"
    EPSILON = "epsilon"


class TrialStatus(str, Enum):
    OK = "ok"
    FAILED = "failed"
