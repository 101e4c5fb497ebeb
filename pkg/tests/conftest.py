import numpy as np
import pytest

from neuroarm.cable import CableParams
from neuroarm.geometry import GeometryConfig, build_arm
from neuroarm.simulation import CoupledSimulation


@pytest.fixture(scope="session")
def arm():
    return build_arm(GeometryConfig())


@pytest.fixture(scope="session")
def cable_params():
    return CableParams()


@pytest.fixture(scope="session", autouse=True)
def warm_kernel(arm, cable_params):
    """Trigger JIT compilation outside any timed section."""
    from neuroarm import _kernel

    sim = CoupledSimulation(arm, cable_params, law="sensory-feedback",
                            target=np.array([0.2, 0.1]))
    sim._advance_kernel(2)
    n = arm.n
    V = np.zeros(n + 1)
    W = np.zeros(n + 1)
    _kernel.cable_window(
        V, W, np.zeros(n + 1), False, np.zeros(0), 0.0, 0.0,
        n, arm.ds, 1e-6, cable_params.tau, cable_params.tau_adapt,
        cable_params.lam**2, cable_params.b, 1, 0.0, 0.0, 2,
    )
