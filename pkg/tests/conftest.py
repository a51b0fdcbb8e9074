import numpy as np
import pytest

from imcflab.geometry import build_atlas

# atlases are immutable and expensive at high levels; share them per session


@pytest.fixture(scope="session")
def icosphere():
    cache = {}

    def get(level):
        if level not in cache:
            cache[level] = build_atlas("icosphere", level)
        return cache[level]

    return get


@pytest.fixture(scope="session")
def circle():
    cache = {}

    def get(count):
        if count not in cache:
            cache[count] = build_atlas("circle", count)
        return cache[count]

    return get
