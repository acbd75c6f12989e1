import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from pplp import crypto
from pplp.protocols import ProtocolConfig

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("pplp", deadline=None, max_examples=60)
settings.load_profile("pplp")

TEST_KEY_BITS = 256


@pytest.fixture(scope="session")
def keypair():
    return crypto.keygen(TEST_KEY_BITS, random.Random("session-key"))


@pytest.fixture(scope="session")
def other_keypair():
    return crypto.keygen(TEST_KEY_BITS, random.Random("other-key"))


@pytest.fixture(scope="session")
def pk(keypair):
    return keypair.public_key


@pytest.fixture(scope="session")
def sk(keypair):
    return keypair.private_key


@pytest.fixture
def cfg():
    return ProtocolConfig(key_bits=TEST_KEY_BITS)
