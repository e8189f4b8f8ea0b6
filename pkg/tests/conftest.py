import numpy as np
import pytest

from optoshape import ChainModel, OptoSensorModel, UnitGeometry


@pytest.fixture
def default_geometry():
    return UnitGeometry.default()


@pytest.fixture
def default_model():
    return OptoSensorModel()


@pytest.fixture
def quiet_model():
    return OptoSensorModel(noise_sigma_volts=0.0)


@pytest.fixture
def default_chain():
    return ChainModel.default()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
