import pytest

from cavreset import DriveSegment, PulseSchedule, default_device, ring_up_segment

READOUT_DURATION = 900.0
RESET_DURATION = 50.0
READOUT_PHOTONS = 5.0


@pytest.fixture(scope="session")
def device():
    return default_device()


@pytest.fixture(scope="session")
def device2():
    return default_device(qubit=2)


@pytest.fixture(scope="session")
def readout(device):
    # steady state of 5 photons for the ground state, long enough to settle
    return ring_up_segment(device, 0, READOUT_PHOTONS, READOUT_DURATION)


@pytest.fixture(scope="session")
def readout_schedule(readout):
    return PulseSchedule((readout,), label="square")


@pytest.fixture()
def short_segment():
    return DriveSegment(amplitude=0.01, phase=0.5, duration=40.0)
