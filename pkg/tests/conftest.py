import pytest

import helpers


@pytest.fixture
def store():
    return helpers.fresh_store()


@pytest.fixture
def operator(store):
    return helpers.add_operator(store)
