"""Almost paraquaternionic Hermitian structures on a polynomial chart."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .jet import Jet, invert_jet, jeinsum
from .poly import PolyField, PolyTensor, eval_jet
from .tensor import EPS, standard_structure


@dataclass(frozen=True, eq=False)
class ParaHermitianStructure:
    """``(g, J_1, J_2, J_3)`` on a chart of dimension ``4n``.

    The fields are generated from constant adapted data ``(g0, J0)`` by an
    optional polynomial coframe ``P`` (or its inverse, the frame ``E``) and
    an optional polynomial conformal factor ``f``::

        g = f * P^T g0 P,    J_alpha = P^-1 J0_alpha P,    E = P^-1.

    Only one of ``coframe`` / ``frame`` may be given.  When ``frame`` is used
    the metric is rational in the coordinates and is handled through jets of
    ``E`` and the jet inverse, never as a polynomial.
    """

    n: int
    g0: np.ndarray
    J0: np.ndarray
    coframe: PolyTensor | None = None
    frame: PolyTensor | None = None
    factor: PolyField | None = None
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        m = 4 * self.n
        if self.g0.shape != (m, m) or self.J0.shape != (3, m, m):
            raise ShapeError("constant data does not match dimension 4n")
        if self.coframe is not None and self.frame is not None:
            raise ShapeError("give either a coframe or a frame, not both")
        for pt in (self.coframe, self.frame):
            if pt is not None and (pt.shape != (m, m) or pt.dim != m):
                raise ShapeError("coframe/frame must be a (4n x 4n) polynomial matrix on a 4n chart")
        if self.factor is not None and self.factor.dim != m:
            raise ShapeError("conformal factor lives on a chart of the wrong dimension")

    @property
    def dim(self):
        return 4 * self.n

    @property
    def epsilon(self):
        return EPS

    def jets(self, p, order):
        """Jets ``(g, [J1, J2, J3])`` at ``p``."""
        p = np.asarray(p, dtype=float)
        m = self.dim
        if p.shape != (m,):
            raise ShapeError(f"point has shape {p.shape}, chart dimension is {m}")
        if self.coframe is not None:
            P = eval_jet(self.coframe, p, order)
            Pinv = invert_jet(P)
        elif self.frame is not None:
            Pinv = eval_jet(self.frame, p, order)
            P = invert_jet(Pinv)
        else:
            P = Pinv = None
        if P is None:
            g = Jet.constant(self.g0, m, order)
            J = [Jet.constant(self.J0[a], m, order) for a in range(3)]
        else:
            g = jeinsum("ca,cd,db->ab", P, self.g0, P)
            J = [jeinsum("ac,cd,db->ab", Pinv, self.J0[a], P) for a in range(3)]
        if self.factor is not None:
            f = eval_jet(self.factor, p, order)
            g = jeinsum(",ab->ab", f, g)
        return g, J

    def values(self, p):
        g, J = self.jets(p, 0)
        return g.value, np.stack([j.value for j in J])

    def to_dict(self):
        """JSON-ready description (used for manifests and report hashes)."""
        out = {"kind": self.kind, "n": self.n}
        out.update(self.params)
        return out

    def fingerprint(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def flat_structure(n, kind="flat"):
    g0, J0 = standard_structure(n)
    return ParaHermitianStructure(n, g0, J0, kind=kind)
