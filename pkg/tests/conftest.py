import hashlib
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kcdm import MasterKey, Nonce

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture
def zero_key():
    return MasterKey(bytes(32))


@pytest.fixture
def zero_nonce():
    return Nonce(bytes(16))


def fixed_key(tag: str) -> MasterKey:
    """Deterministic test key derived from a label; test-local convention."""
    return MasterKey(hashlib.sha256(b"kcdm-test-key:" + tag.encode()).digest())


def fixed_nonce(tag: str) -> Nonce:
    return Nonce(hashlib.sha256(b"kcdm-test-nonce:" + tag.encode()).digest()[:16])
