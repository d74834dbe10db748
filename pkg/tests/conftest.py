import pytest

from plateforce import CorrectionParams, Geometry, PlateStack
from plateforce.casimir import LifshitzSettings
from plateforce.permittivity import DrudeParams, PermittivityModel


@pytest.fixture(scope="session")
def geometry():
    return Geometry()


@pytest.fixture(scope="session")
def drude_gold_model():
    return PermittivityModel.drude()


@pytest.fixture(scope="session")
def near_ideal_model():
    # effectively a perfect conductor at micrometer separations
    return PermittivityModel.drude(DrudeParams.from_ev(1000.0, 0.0))


@pytest.fixture(scope="session")
def settings_300k():
    return LifshitzSettings(temperature=300.0)


@pytest.fixture(scope="session")
def settings_1k():
    return LifshitzSettings(temperature=1.0)


@pytest.fixture(scope="session")
def coated_stack():
    return PlateStack.gold_titanium_glass()


@pytest.fixture
def correction():
    return CorrectionParams(delta=40e-9, sigma_delta=20e-9)
