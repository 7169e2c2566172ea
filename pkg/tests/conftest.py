import random

import pytest

from encctl.modgroup import GroupParams, generate_group_params

# smallest safe-prime group; subgroup members are {1,2,3,4,6,8,9,12,13,16,18}
TOY = GroupParams(p=23, q=11, g=2)


class ScriptedRng:
    """Feeds predetermined values to code expecting random.Random."""

    def __init__(self, *values):
        self.values = list(values)

    def randrange(self, *args):
        return self.values.pop(0)


@pytest.fixture(scope="session")
def toy_group():
    return TOY


@pytest.fixture(scope="session")
def group64():
    return generate_group_params(64, random.Random(0xC0FFEE))


@pytest.fixture(scope="session")
def group712():
    return generate_group_params(712, random.Random(0x5EED))
