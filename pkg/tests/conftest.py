import functools

import pytest

from equiripple.solutions import forward_construct
from equiripple.verify import verify_solution

# one parameter point per family: (t, n, m, extra)
FORWARD_CASES = {
    "Genus1Zolotarev": (0.4, 4, 1, {"v1": 1.3, "v2": 1.7}),
    "Genus2Stiefel": (0.4, 5, 2, {"h": 0.3, "v": 2}),
    "Genus3TwoSlit": (0.4, 5, 2, {"h1": 0.3, "h2": -0.2}),
    "Genus3Octagon": (0.4, 5, 2, {"c_re": 0.2, "c_im": 1.0}),
    "Genus3DecagonPlus": (0.4, 5, 2, {"h1": -0.2, "h2": 0.3}),
    "Genus3DecagonMinus": (0.4, 5, 1, {"h1": -0.2, "h2": 0.3}),
}


@functools.lru_cache(maxsize=None)
def forward(family):
    t, n, m, extra = FORWARD_CASES[family]
    return forward_construct(family, t, n, m, dict(extra))


@functools.lru_cache(maxsize=None)
def report(family):
    sol, bands = forward(family)
    return verify_solution(sol, bands)


@pytest.fixture(params=list(FORWARD_CASES))
def family(request):
    return request.param
