import pytest
from hypothesis import HealthCheck, settings

from pfsdm.config import RunConfig
from pfsdm.eikonal import solve_eikonal
from pfsdm.moments import angular_moments, distance_matrix, normalizing_constants
from pfsdm.pushforward import PfSdfField, fit_deformation
from pfsdm.shapes import SHAPE_KINDS, generate_shape

settings.register_profile(
    "pfsdm",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("pfsdm")


@pytest.fixture(scope="session")
def run_cfg():
    return RunConfig()


@pytest.fixture(scope="session")
def five_contours():
    return {kind: generate_shape(kind, 256, 0) for kind in SHAPE_KINDS}


@pytest.fixture(scope="session")
def five_models(five_contours):
    return {kind: solve_eikonal(c) for kind, c in five_contours.items()}


@pytest.fixture(scope="session")
def five_fields(five_contours, five_models):
    return {
        kind: PfSdfField(five_models[kind], fit_deformation(five_contours[kind], 10))
        for kind in SHAPE_KINDS
    }


@pytest.fixture(scope="session")
def five_curves(five_fields):
    return {kind: angular_moments(f, 3, shape_id=kind) for kind, f in five_fields.items()}


@pytest.fixture(scope="session")
def cohort(five_curves):
    curves = [five_curves[kind] for kind in SHAPE_KINDS]
    consts = normalizing_constants(curves)
    return curves, consts, distance_matrix(curves, consts, 3)


@pytest.fixture(scope="session")
def exp2_result(tmp_path_factory):
    import time

    from pfsdm.analysis import run_experiment2

    out = tmp_path_factory.mktemp("exp2")
    start = time.monotonic()
    result = run_experiment2(42, out, RunConfig(), jobs=2)
    elapsed = time.monotonic() - start
    return result, out, elapsed
