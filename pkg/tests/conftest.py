import numpy as np
import pytest

from pqkt.catalog import preset, sample_points
from pqkt.frameview import FrameView
from pqkt.geometry import local_geometry

N = 2
PQKT_MODELS = ("flat", "conformal", "diffeo-pushforward", "sp1-rotation")
ALL_MODELS = PQKT_MODELS + ("frame-deformed",)


@pytest.fixture(scope="session")
def models():
    return {name: preset(name, N) for name in ALL_MODELS}


@pytest.fixture(scope="session")
def points():
    return sample_points(N, count=25)


@pytest.fixture(scope="session")
def few_points(points):
    return points[:4]


class GeomCache:
    """Order-3 local geometries shared across tests (they are immutable)."""

    def __init__(self, models):
        self.models = models
        self._cache = {}

    def __call__(self, name, p, order=3):
        key = (name, tuple(np.round(p, 14)), order)
        if key not in self._cache:
            self._cache[key] = local_geometry(self.models[name], p, order)
        return self._cache[key]

    def view(self, name, p):
        G = self(name, p)
        return G, FrameView(G.frame, [j.value for j in G.J])


@pytest.fixture(scope="session")
def geoms(models):
    return GeomCache(models)
