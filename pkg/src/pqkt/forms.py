"""Lee forms, the dF type decomposition and classification predicates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connections import EXISTENCE_TOL, existence_residuals
from .errors import NoPQKTStructureError, UnsupportedDimensionError
from .frameview import FrameView
from .geometry import ext_d, jform_jet, local_geometry
from .tensor import CYCLIC, EPS, check_3form_type, wedge12

PASS_TOL = 1e-8
FAIL_TOL = 1e-5


def _max(x):
    return float(np.max(np.abs(x), initial=0.0))


def _jf(J, v):
    return -np.asarray(v) @ J


@dataclass(frozen=True)
class LeeData:
    """Lee forms ``theta_a``, the nine ``theta_{a,b}`` and ``dF_a = dF+_a + dF-_a``."""

    theta: tuple
    theta_cross: tuple
    dF_plus: tuple
    dF_minus: tuple

    def diagonal_residual(self):
        """``max |theta_{a,a} - theta_a|``."""
        return max(_max(self.theta_cross[a][a] - self.theta[a]) for a in range(3))


def lee_data(S, p, geom=None) -> LeeData:
    G = local_geometry(S, p, 2, geom)
    return LeeData(
        tuple(x.value for x in G.theta),
        tuple(tuple(G.theta_cross[a][b].value for b in range(3)) for a in range(3)),
        tuple(pm[0].value for pm in G.dF_split),
        tuple(pm[1].value for pm in G.dF_split),
    )


def dF_split(S, p, geom=None):
    """``[(dF+_a, dF-_a)]``: the (2,1)+(1,2) part and the (3,0)+(0,3) part."""
    G = local_geometry(S, p, 2, geom)
    return [(pm[0].value, pm[1].value) for pm in G.dF_split]


def split_residuals(S, p, geom=None):
    """Partition and type residuals of the dF decomposition."""
    G = local_geometry(S, p, 2, geom)
    part = typ = 0.0
    for a, (plus, minus) in enumerate(G.dF_split):
        J = G.J[a].value
        part = max(part, _max(plus.value + minus.value - G.dF[a].value))
        typ = max(typ, check_3form_type(plus.value, J, EPS[a], G.frame))
    return {"dF.partition": part, "dF.plus-type": typ}


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def tier(residual, pass_tol=PASS_TOL, fail_tol=FAIL_TOL):
    """``True`` below ``pass_tol``, ``False`` above ``fail_tol``, ``None`` in between."""
    if residual < pass_tol:
        return True
    if residual > fail_tol:
        return False
    return None


@dataclass(frozen=True)
class Predicate:
    name: str
    residual: float
    flag: bool | None

    @property
    def status(self):
        return {True: "true", False: "false", None: "indeterminate"}[self.flag]


def _hpkt_combo(G, k):
    """Jets of ``theta_a + eps_a J_b theta_{a,c}`` truncated to order ``k``."""
    out = []
    for a, b, c in CYCLIC:
        th = G.theta[a].truncate(k)
        tc = G.theta_cross[a][c].truncate(k)
        out.append(th + jform_jet(G.J[b].truncate(k), tc) * EPS[a])
    return out


def classification_residuals(S, p, geom=None):
    """Residuals behind the structure predicates (adapted-frame components).

    Keys: ``hpkt`` (the Lee-form criterion), ``hpkt.omega``, ``hpkt.dF``,
    ``lcpqk.u3``, ``lcpqk.dt``, ``lchpkt`` (closedness), ``lchpk.trace``
    and ``integrable`` (equal Lee forms).
    """
    if S.n < 2:
        raise UnsupportedDimensionError("the classification criteria need n >= 2")
    G = local_geometry(S, p, 2, geom)
    n = S.n
    V = FrameView(G.frame, [j.value for j in G.J])
    F = [x.value for x in G.F]
    th = [x.value for x in G.theta]
    combo = _hpkt_combo(G, 1)
    t = G.t.value
    ta = [x.value for x in G.t_alpha]
    out = {}
    out["hpkt"] = max(_max(V.cov(c.value)) for c in combo)
    out["hpkt.omega"] = max(_max(V.cov(w.value)) for w in G.omega_pqkt)
    dap = [x.value for x in G.dalphaF_plus]
    out["hpkt.dF"] = max(_max(V.cov(dap[a] - dap[b])) for a, b, _ in CYCLIC)
    u3 = G.T.value - sum(wedge12(ta[a], F[a]) for a in range(3)) / (2 * n + 1)
    out["lcpqk.u3"] = _max(V.cov(u3))
    out["lcpqk.dt"] = _max(V.cov(G.dt.value))
    out["lchpkt"] = max(_max(V.cov(ext_d(c).value)) for c in combo)
    out["lchpk.trace"] = max(_max(V.cov(c.value - 2 * (1 - n) / (2 * n + 1) * t)) for c in combo)
    out["integrable"] = max(_max(V.cov(th[a] - th[b])) for a, b, _ in CYCLIC)
    return out


def classify(S, p, geom=None, pass_tol=PASS_TOL, fail_tol=FAIL_TOL):
    """Structure predicates at ``p`` with two-tier flags.

    ``HPKT`` uses the Lee-form criterion, ``l.c.PQK`` the closed-form torsion
    together with ``dt = 0``, ``l.c.HPKT`` the closedness of
    ``theta_a + eps_a J_b theta_{a,c}``, ``l.c.HPK`` the closed-form torsion
    together with the trace relation, ``integrable`` the equality of the
    three Lee forms.  Raises when the structure admits no PQKT connection.
    """
    G = local_geometry(S, p, 2, geom)
    res = max(existence_residuals(G))
    if res > EXISTENCE_TOL:
        raise NoPQKTStructureError(f"no PQKT connection at p (existence residual {res:.3e})")
    r = classification_residuals(S, p, G)
    combos = {
        "HPKT": r["hpkt"],
        "l.c.PQK": max(r["lcpqk.u3"], r["lcpqk.dt"]),
        "l.c.HPKT": r["lchpkt"],
        "l.c.HPK": max(r["lcpqk.u3"], r["lchpk.trace"]),
        "integrable": r["integrable"],
    }
    return {k: Predicate(k, v, tier(v, pass_tol, fail_tol)) for k, v in combos.items()}


def lee_identities(S, p, geom=None):
    """Identities of the Lee data on any paraquaternionic Hermitian structure.

    ``lee.diagonal`` compares ``theta_a`` (codifferential route) with
    ``theta_{a,a}`` (``dF+`` trace route).
    """
    G = local_geometry(S, p, 2, geom)
    V = FrameView(G.frame, [j.value for j in G.J])
    tc = [[G.theta_cross[a][b].value for b in range(3)] for a in range(3)]
    th = [x.value for x in G.theta]
    out = {"lee.diagonal": max(_max(V.cov(tc[a][a] - th[a])) for a in range(3))}
    out.update(split_residuals(S, p, G))
    return out
