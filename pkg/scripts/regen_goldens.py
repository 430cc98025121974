"""Regenerate the frozen golden fixtures under tests/golden/.

Run only when the normative formats or draw orders deliberately change;
commit the resulting bytes. The mask values are cross-checked against the
independent scalar oracle before anything is written.
"""

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from kcdm import MapKind, MasterKey, Nonce, tensorio
from kcdm.cipher import CipherOptions, encrypt_to_container, generate_mask

from reference_impl import ref_resolve_and_mask

GOLDEN = ROOT / "tests" / "golden"

FIXTURE_OPTIONS = CipherOptions(map_kind=MapKind.LOGISTIC, family="er", p=0.2)


def fixture_tensor():
    return np.linspace(-1.0, 1.0, 8).reshape(2, 4)


def main():
    GOLDEN.mkdir(exist_ok=True)
    zero_key = MasterKey(bytes(32))
    zero_nonce = Nonce(bytes(16))

    mask = generate_mask(zero_key, zero_nonce, (2, 4), FIXTURE_OPTIONS)
    oracle = ref_resolve_and_mask(
        bytes(32), bytes(16), (2, 4), pinned={"map": "logistic", "family": "er", "p": 0.2}
    )["mask"]
    if mask.tolist() != oracle:
        raise SystemExit("mask disagrees with the scalar oracle; refusing to write goldens")

    (GOLDEN / "mask_zero_pinned.kten").write_bytes(tensorio.tensor_bytes(mask))
    (GOLDEN / "plain_fixture.kten").write_bytes(tensorio.tensor_bytes(fixture_tensor()))
    (GOLDEN / "container_zero_auto.kcdm").write_bytes(
        encrypt_to_container(fixture_tensor(), zero_key, zero_nonce)
    )
    for name in ("mask_zero_pinned.kten", "plain_fixture.kten", "container_zero_auto.kcdm"):
        print(f"wrote {name}: {len((GOLDEN / name).read_bytes())} bytes")


if __name__ == "__main__":
    main()
