"""Elementary cellular automata, their mirror images, and cyclic-window rasters.

Wolfram convention: the neighbourhood ``(l, c, r)`` is read as ``4l + 2c + r``
and the output is that bit of the rule number.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .automorphisms import phi_ca
from .errors import StructureError
from .gca import Gca, to_table
from .groups import GroupHom, build_cyclic, identity_hom
from .report import Certificate

__all__ = [
    "EcaRule",
    "eca_mirror",
    "eca_run",
    "eca_gca",
    "mirror_via_inversion",
    "raster_to_pgm",
    "raster_to_json",
    "mirror_table_csv",
    "raster_reversal_agrees",
    "verify_mirror",
]


@dataclass(frozen=True)
class EcaRule:
    number: int

    def __post_init__(self):
        if not 0 <= self.number < 256:
            raise StructureError(f"ECA rule number {self.number} outside 0..255")

    @property
    def table(self) -> tuple[int, ...]:
        """Output for neighbourhood ``4l + 2c + r``, indexed 0..7."""
        return tuple((self.number >> k) & 1 for k in range(8))

    def __call__(self, l: int, c: int, r: int) -> int:
        return (self.number >> (4 * l + 2 * c + r)) & 1

    @classmethod
    def from_table(cls, table) -> "EcaRule":
        return cls(sum(int(b) << k for k, b in enumerate(table)))


def eca_mirror(rule: EcaRule | int) -> EcaRule:
    """The rule with ``mu'(l, c, r) = mu(r, c, l)``."""
    rule = rule if isinstance(rule, EcaRule) else EcaRule(rule)
    return EcaRule.from_table(rule(r, c, l) for l, c, r in _neighbourhoods())


def _neighbourhoods():
    # index k = 4l + 2c + r
    return [((k >> 2) & 1, (k >> 1) & 1, k & 1) for k in range(8)]


def eca_run(rule: EcaRule | int, width: int, steps: int, initial=None) -> np.ndarray:
    """Space-time raster of ``steps + 1`` rows on a cyclic row of ``width`` cells.

    ``initial`` defaults to a single 1 in the middle cell.
    """
    rule = rule if isinstance(rule, EcaRule) else EcaRule(rule)
    if width < 3:
        raise StructureError("ECA width must be at least 3")
    if steps < 0:
        raise StructureError("steps must be non-negative")
    if initial is None:
        row = np.zeros(width, dtype=np.uint8)
        row[width // 2] = 1
    else:
        row = np.asarray(initial, dtype=np.uint8)
        if row.shape != (width,) or np.any(row > 1):
            raise StructureError(f"initial row must be {width} binary cells")
    return _run_batch(rule, row[None, :], steps)[0]


def _run_batch(rule: EcaRule, rows: np.ndarray, steps: int) -> np.ndarray:
    """Rasters for a stack of initial rows, shape ``(batch, steps + 1, width)``."""
    lut = np.array(rule.table, dtype=np.uint8)
    out = np.empty((rows.shape[0], steps + 1, rows.shape[1]), dtype=np.uint8)
    out[:, 0] = rows
    for t in range(steps):
        x = out[:, t]
        out[:, t + 1] = lut[4 * np.roll(x, 1, axis=1) + 2 * x + np.roll(x, -1, axis=1)]
    return out


def eca_gca(rule: EcaRule | int, n: int) -> Gca:
    """The rule as a classical CA on ``Z_n`` with memory ``{0, 1, n-1}``.

    Patterns over the sorted support read ``(x(g), x(g+1), x(g-1)) = (c, r, l)``.
    """
    rule = rule if isinstance(rule, EcaRule) else EcaRule(rule)
    if n < 3:
        raise StructureError("need n >= 3 so that -1, 0, 1 are distinct in Z_n")
    G = build_cyclic(n)
    local = [rule(l, c, r) for c in (0, 1) for r in (0, 1) for l in (0, 1)]
    return Gca(identity_hom(G), (0, 1, n - 1), tuple(local), 2)


def mirror_via_inversion(rule: EcaRule | int, n: int = 5) -> bool:
    """Conjugating by ``k -> -k`` on ``Z_n`` gives the same map as the mirrored rule number."""
    tau = eca_gca(rule, n)
    G = tau.G
    inversion = GroupHom(G, G, tuple((-k) % n for k in range(n)))
    conj = phi_ca(inversion, to_table(tau))
    return conj == to_table(eca_gca(eca_mirror(rule), n))


def raster_to_pgm(raster: np.ndarray) -> bytes:
    """Binary PGM (P5); symbol 0 is white and the largest symbol is black."""
    raster = np.asarray(raster)
    top = max(1, int(raster.max()) if raster.size else 1)
    pix = (255 - (raster.astype(np.int64) * 255) // top).astype(np.uint8)
    h, w = pix.shape
    return f"P5\n{w} {h}\n255\n".encode() + pix.tobytes()


def raster_to_json(raster: np.ndarray) -> str:
    return json.dumps(np.asarray(raster).tolist()) + "\n"


def mirror_table_csv() -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rule", "mirror"])
    for r in range(256):
        w.writerow([r, eca_mirror(r).number])
    return buf.getvalue()


def raster_reversal_agrees(rule: EcaRule | int, width: int, steps: int, initial=None) -> bool:
    """Running the mirror on the reversed row gives the reversed raster."""
    rule = rule if isinstance(rule, EcaRule) else EcaRule(rule)
    fwd = eca_run(rule, width, steps, initial)
    back = eca_run(eca_mirror(rule), width, steps, fwd[0][::-1])
    return bool(np.array_equal(fwd[:, ::-1], back))


def _brute_mirror(number: int) -> int:
    # spell each neighbourhood out as a string and reverse it
    out = 0
    for k in range(8):
        reversed_k = int(format(k, "03b")[::-1], 2)
        out |= ((number >> reversed_k) & 1) << k
    return out


def verify_mirror(width: int = 8, steps: int = 8, n: int = 5) -> Certificate:
    """Mirror is an involution, matches the string-reversal oracle, reverses
    rasters from every initial row, and equals conjugation by inversion on Z_n."""
    cert = Certificate("mirror", {"width": width, "steps": steps, "n": n})
    rows = np.array([[(i >> (width - 1 - c)) & 1 for c in range(width)] for i in range(2**width)], dtype=np.uint8)
    raster_checks = 0
    for r in range(256):
        m = eca_mirror(r).number
        if eca_mirror(m).number != r:
            cert.violation("not an involution", rule=r)
        if m != _brute_mirror(r):
            cert.violation("oracle", rule=r, mirror=m)
        fwd = _run_batch(EcaRule(r), rows, steps)
        back = _run_batch(EcaRule(m), rows[:, ::-1], steps)
        bad = np.flatnonzero(np.any(fwd[:, :, ::-1] != back, axis=(1, 2)))
        raster_checks += rows.shape[0]
        if bad.size:
            cert.violation("raster reversal", rule=r, initial=rows[bad[0]].tolist())
        if not mirror_via_inversion(r, n):
            cert.violation("inversion conjugation", rule=r)
    cert.counts = {"rules": 256, "raster_checks": raster_checks}
    cert.witnesses = {"mirror_110": eca_mirror(110).number, "mirror_30": eca_mirror(30).number}
    cert.clauses = {"involution_and_oracle": not cert.violations}
    return cert
