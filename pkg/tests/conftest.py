import pytest

from fcmkit.core import (
    Concept,
    Edge,
    FcmModel,
    Range,
    SimulationConfig,
    ThresholdKind,
    ThresholdSpec,
)


@pytest.fixture
def sign_map() -> FcmModel:
    """Two concepts chasing each other's sign: a 4-state rotation under
    bivalent updates with k2=0."""
    return FcmModel(
        name="sign-map",
        concepts=(Concept("x1", initial=1.0), Concept("x2", initial=1.0)),
        edges=(Edge("x1", "x2", 1.0), Edge("x2", "x1", -1.0)),
        range=Range.BIPOLAR,
    )


@pytest.fixture
def sign_map_config() -> SimulationConfig:
    return SimulationConfig(
        threshold=ThresholdSpec(ThresholdKind.BIVALENT), k1=1.0, k2=0.0
    )


@pytest.fixture
def clamp_config() -> SimulationConfig:
    return SimulationConfig(threshold=ThresholdSpec(ThresholdKind.CLAMP), k1=1.0, k2=1.0)
