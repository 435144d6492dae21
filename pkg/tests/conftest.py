import pytest

from envyprice.core import UtilityMatrix


@pytest.fixture
def w3():
    # Worst 3x3 instance: one agent concentrates on the first two items,
    # the other two are indifferent. Ratio 8/7.
    return UtilityMatrix.from_strings([
        ["1/2", "1/2", "0"],
        ["1/3", "1/3", "1/3"],
        ["1/3", "1/3", "1/3"],
    ])
