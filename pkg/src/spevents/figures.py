"""Built-in scenarios for the figures: Bell pair, entanglement swapping and its variants,
the two-particle preparation test, a polarizer chain and a single prepare/measure run.

Each is written in the scenario language and parsed on demand.
"""

from __future__ import annotations

import re

from . import dsl
from .errors import UnknownNameError
from .scenario import Scenario

BELL_PAIR = """\
scenario bell_pair "Bell pair from one source, both photons detected"
particle a at (0, 0) vel -1
particle b at (0, 0) vel 1
node pair at (0, 0) on a, b kind=PsiMinus
node detector at (10, -10) on a
node detector at (10, 10) on b
"""

_SWAP_PARTICLES = """\
particle 1 at (-10, -10) vel -1
particle 2 at (-10, -10) vel 1 vel -1
particle 3 at (-10, 10) vel -1 vel 1
particle 4 at (-10, 10) vel 1
node pair at (-10, -10) on 1, 2 kind=PsiMinus
node pair at (-10, 10) on 3, 4 kind=PsiMinus
"""

SWAP_BS = f"""\
scenario swap_bs "entanglement swapping: Bell measurement on 2,3 at a beam splitter"
{_SWAP_PARTICLES}node bs at (0, 0) on 2, 3 outcome=PsiMinus
node detector at (5, -5) on 2
node detector at (5, 5) on 3
node detector at (10, -30) on 1 outcome=0
node detector at (10, 30) on 4 outcome=1
"""

SWAP_MIRROR = f"""\
scenario swap_mirror "swap layout with a mirror in place of the beam splitter"
{_SWAP_PARTICLES}node mirror at (0, 0) on 2, 3 outcome=3
node detector at (5, -5) on 2
node detector at (5, 5) on 3
node detector at (10, -30) on 1 outcome=0
node detector at (10, 30) on 4 outcome=1
"""

SWAP_DELAYED = f"""\
scenario swap_delayed "entanglement swapping with 1 and 4 detected before the beam splitter"
{_SWAP_PARTICLES}node detector at (-5, -15) on 1 outcome=0
node detector at (-5, 15) on 4 outcome=1
node bs at (0, 0) on 2, 3 outcome=PsiMinus
node detector at (5, -5) on 2
node detector at (5, 5) on 3
"""

_PBR = """\
scenario {name} "independent preparations {label} followed by an entangled measurement"
particle A at (-10, -10) vel 1 vel -1
particle B at (-10, 10) vel -1 vel 1
{preps}node bs at (0, 0) on A, B outcome=PhiPlus
node detector at (5, -5) on A
node detector at (5, 5) on B
"""

# H X |0> = |->
_MINUS_PREP = "matrix=[[sqrt(1/2), sqrt(1/2)], [-sqrt(1/2), sqrt(1/2)]]"

PBR_PREP_00 = _PBR.format(name="pbr_prep_00", label="|00>", preps="")
PBR_PREP_MM = _PBR.format(
    name="pbr_prep_mm",
    label="|-->",
    preps=f"node gate at (-10, -10) on A {_MINUS_PREP}\nnode gate at (-10, 10) on B {_MINUS_PREP}\n",
)

SINGLE_PREP_MEASURE = """\
scenario single_prep_measure "one particle prepared at t=0, evolved, measured at t=1"
particle q at (0, 0) vel 0
node gate at (0.5, 0) on q op=H
node detector at (1, 0) on q
"""


def polarizer_chain_text(n: int) -> str:
    if n < 1:
        raise UnknownNameError("polarizer_chain needs at least one polarizer")
    lines = [
        f'scenario polarizer_chain_{n} "photon through {n} polarizers at angles 0.3*i"',
        "particle photon at (0, 0) vel 0",
    ]
    lines += [f"node polarizer at ({i}, 0) on photon angle=0.3*{i} outcome=pass" for i in range(1, n + 1)]
    lines.append(f"node detector at ({n + 1}, 0) on photon")
    return "\n".join(lines) + "\n"


_TEXTS = {
    "bell_pair": BELL_PAIR,
    "swap_bs": SWAP_BS,
    "swap_mirror": SWAP_MIRROR,
    "swap_delayed": SWAP_DELAYED,
    "pbr_prep_00": PBR_PREP_00,
    "pbr_prep_mm": PBR_PREP_MM,
    "single_prep_measure": SINGLE_PREP_MEASURE,
}
DEFAULT_CHAIN = 3
BUILTIN_NAMES = tuple(_TEXTS) + ("polarizer_chain(n)",)
# concrete names used when every builtin has to be enumerated (renders, determinism checks)
BUILTIN_INSTANCES = tuple(_TEXTS) + (f"polarizer_chain_{DEFAULT_CHAIN}",)

_CHAIN = re.compile(r"polarizer_chain(?:\((\d+)\)|_(\d+))?$")


def builtin_text(name: str) -> str:
    key = name.strip()
    if key in _TEXTS:
        return _TEXTS[key]
    m = _CHAIN.match(key)
    if m:
        n = int(m.group(1) or m.group(2) or DEFAULT_CHAIN)
        return polarizer_chain_text(n)
    raise UnknownNameError(f"unknown builtin {name!r}; valid names: {', '.join(BUILTIN_NAMES)}")


def builtin(name: str) -> Scenario:
    return dsl.parse(builtin_text(name))
