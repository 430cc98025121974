"""Resolve keyed systems, generate masks, encrypt and decrypt tensors.

Encryption is X + S, decryption is X - S, where the mask S is a pure
function of (key, nonce, tensor shape, public options). The last tensor axis
sets the node count d; the product of the leading axes sets the number of
retained trajectory rows n (1 for rank-1 tensors), so a rank-(r) tensor is
masked as its natural (n, d) matrix view.

Auto (unpinned) configuration is drawn from the params stream in a fixed,
normative order: map kind, active map parameter, graph family, family
parameters (ER: p; WS: k then beta), coupling strength eps_c. Pinned values
consume no draws. Wrong keys are deliberately undetectable: decryption with
a wrong key yields garbage, never an error.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

import numpy as np

from . import tensorio
from .dynamics import (
    MAP_ORDER,
    PARAM_RANGES,
    MapKind,
    MapParams,
    SystemConfig,
    init_state,
    simulate,
)
from .errors import (
    ChaosVerificationFailed,
    ConfigMismatch,
    InvalidInput,
    InvalidOptions,
    InvalidShape,
)
from .graphgen import FAMILY_ER, FAMILY_WS, GraphSpec, sample_graph
from .keystream import KeyedStream, MasterKey, Nonce, SubKeys, derive_subkeys

DEFAULT_T_BURN = 100
DEFAULT_SIGMA = 1e-3
DEFAULT_ALPHA = 1.0

# Auto-sampling ranges for sparse-but-connected graphs.
ER_P_RANGE = (0.05, 0.3)
WS_BETA_RANGE = (0.1, 0.5)
WS_K_CHOICES = (2, 4, 6)
EPS_C_RANGE = (0.05, 0.3)

_MAP_IDS = {kind: i + 1 for i, kind in enumerate(MAP_ORDER)}
_MAP_FROM_ID = {i + 1: kind for i, kind in enumerate(MAP_ORDER)}
_FAMILY_IDS = {FAMILY_ER: 1, FAMILY_WS: 2}
_FAMILY_FROM_ID = {1: FAMILY_ER, 2: FAMILY_WS}


@dataclass(frozen=True)
class CipherOptions:
    """Public cipher configuration; every None field is auto-sampled."""

    map_kind: MapKind | None = None
    family: str | None = None
    r: float | None = None
    mu: float | None = None
    s: float | None = None
    K: float | None = None
    p: float | None = None
    k: int | None = None
    beta: float | None = None
    eps_c: float | None = None
    t_burn: int = DEFAULT_T_BURN
    noise_sigma: float = DEFAULT_SIGMA
    alpha: float = DEFAULT_ALPHA
    verify_chaos: bool = False

    def validate(self) -> None:
        for name in ("r", "mu", "s", "K"):
            value = getattr(self, name)
            if value is None:
                continue
            lo, hi = PARAM_RANGES[name]
            if not lo <= value <= hi:
                raise InvalidOptions(f"pinned {name}={value} outside [{lo}, {hi}]")
        if self.p is not None and not 0.0 < self.p < 1.0:
            raise InvalidOptions(f"pinned p={self.p} outside (0, 1)")
        if self.k is not None and (self.k % 2 != 0 or self.k < 2):
            raise InvalidOptions(f"pinned k={self.k} must be even and >= 2")
        if self.beta is not None and not 0.0 <= self.beta <= 1.0:
            raise InvalidOptions(f"pinned beta={self.beta} outside [0, 1]")
        if self.eps_c is not None and not 0.0 < self.eps_c < 1.0:
            raise InvalidOptions(f"pinned eps_c={self.eps_c} outside (0, 1)")
        if self.family is not None and self.family not in (FAMILY_ER, FAMILY_WS):
            raise InvalidOptions(f"unknown family {self.family!r}")
        if self.t_burn < 0:
            raise InvalidOptions(f"t_burn must be >= 0, got {self.t_burn}")
        if self.noise_sigma < 0.0:
            raise InvalidOptions(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.alpha <= 0.0:
            raise InvalidOptions(f"alpha must be > 0, got {self.alpha}")

    def to_block(self) -> bytes:
        """Serialize to the normative 87-byte options block."""
        self.validate()
        map_id = 0 if self.map_kind is None else _MAP_IDS[self.map_kind]
        family_id = 0 if self.family is None else _FAMILY_IDS[self.family]
        flags = 0
        values = []
        for bit, name in enumerate(tensorio.PIN_FIELDS):
            value = getattr(self, name)
            if value is not None:
                flags |= 1 << bit
                values.append(float(value))
            else:
                values.append(0.0)
        return (
            struct.pack("<BBB", map_id, family_id, flags)
            + struct.pack("<8d", *values)
            + struct.pack("<I", self.t_burn)
            + struct.pack("<dd", self.noise_sigma, self.alpha)
        )

    @classmethod
    def from_block(cls, block: bytes) -> "CipherOptions":
        if len(block) != tensorio.OPTIONS_BLOCK_LEN:
            raise ConfigMismatch(
                f"options block must be {tensorio.OPTIONS_BLOCK_LEN} bytes, got {len(block)}"
            )
        map_id, family_id, flags = struct.unpack("<BBB", block[:3])
        values = struct.unpack("<8d", block[3:67])
        t_burn = struct.unpack("<I", block[67:71])[0]
        sigma, alpha = struct.unpack("<dd", block[71:87])
        if map_id not in _MAP_FROM_ID and map_id != 0:
            raise ConfigMismatch(f"unknown map id {map_id}")
        if family_id not in _FAMILY_FROM_ID and family_id != 0:
            raise ConfigMismatch(f"unknown family id {family_id}")
        pins: dict[str, float | int | None] = {}
        for bit, name in enumerate(tensorio.PIN_FIELDS):
            pins[name] = values[bit] if flags & (1 << bit) else None
        if pins["k"] is not None:
            pins["k"] = int(pins["k"])
        opts = cls(
            map_kind=_MAP_FROM_ID.get(map_id),
            family=_FAMILY_FROM_ID.get(family_id),
            t_burn=t_burn,
            noise_sigma=sigma,
            alpha=alpha,
            **pins,
        )
        try:
            opts.validate()
        except InvalidOptions as exc:
            raise ConfigMismatch(f"options block fails validation: {exc}") from exc
        return opts

    def fingerprint(self) -> bytes:
        return tensorio.fingerprint_of(self.to_block())


@dataclass(frozen=True)
class ResolvedSystem:
    """Everything simulate needs, plus the subkeys that seeded it."""

    config: SystemConfig
    weights: np.ndarray = field(repr=False)
    adjacency: np.ndarray = field(repr=False)
    x0: np.ndarray = field(repr=False)
    subkeys: SubKeys = field(repr=False)


def _draw_map_params(kind: MapKind, options: CipherOptions, params_stream: KeyedStream) -> MapParams:
    def pick(name: str) -> float:
        pinned = getattr(options, name)
        if pinned is not None:
            return float(pinned)
        lo, hi = PARAM_RANGES[name]
        return params_stream.uniform(lo, hi)

    if kind is MapKind.LOGISTIC:
        return MapParams(r=pick("r"))
    if kind is MapKind.TENT:
        return MapParams(mu=pick("mu"))
    if kind is MapKind.BAKER:
        return MapParams(s=pick("s"))
    if kind is MapKind.STANDARD:
        return MapParams(K=pick("K"))
    return MapParams()  # cat map has no free parameters


def resolve_config(
    key: MasterKey,
    nonce: Nonce,
    d: int,
    options: CipherOptions | None = None,
) -> ResolvedSystem:
    """Derive subkeys and sample the full system for a width-d tensor.

    Params-stream draw order (normative): map kind if auto; the active map's
    parameter if not pinned; graph family if auto (forced to ER without a
    draw when d < 3, where WS is undefined); ER p or WS k then beta, each
    only if not pinned; eps_c if not pinned. Adjacency then weights come from
    the graph stream, the initial state from the init stream.
    """
    if options is None:
        options = CipherOptions()
    options.validate()
    if d < 1:
        raise InvalidShape(f"node count must be >= 1, got {d}")
    subkeys = derive_subkeys(key, nonce)
    params_stream = KeyedStream(subkeys.params)

    if options.map_kind is not None:
        kind = options.map_kind
    else:
        kind = MAP_ORDER[params_stream.index(len(MAP_ORDER))]
    map_params = _draw_map_params(kind, options, params_stream)

    if options.family is not None:
        family = options.family
    elif d < 3:
        family = FAMILY_ER
    else:
        family = (FAMILY_ER, FAMILY_WS)[params_stream.index(2)]

    p = 0.0
    k = 0
    beta = 0.0
    if family == FAMILY_ER:
        p = options.p if options.p is not None else params_stream.uniform(*ER_P_RANGE)
    else:
        if options.k is not None:
            k = options.k
        else:
            choices = [c for c in WS_K_CHOICES if c < d]
            if not choices:
                raise InvalidOptions(f"no valid WS degree below d={d}")
            k = choices[params_stream.index(len(choices))]
        if k >= d:
            raise InvalidOptions(f"pinned WS degree k={k} must be < d={d}")
        beta = options.beta if options.beta is not None else params_stream.uniform(*WS_BETA_RANGE)
    eps_c = options.eps_c if options.eps_c is not None else params_stream.uniform(*EPS_C_RANGE)

    graph = GraphSpec(family=family, d=d, p=p, k=k, beta=beta, eps_c=eps_c)
    adjacency, weights = sample_graph(graph, KeyedStream(subkeys.graph))

    cfg = SystemConfig(
        graph=graph,
        map_kind=kind,
        params=map_params,
        d=d,
        t_burn=options.t_burn,
        noise_sigma=options.noise_sigma,
        alpha=options.alpha,
    )
    cfg.validate()
    x0 = init_state(cfg, KeyedStream(subkeys.init))
    resolved = ResolvedSystem(
        config=cfg, weights=weights, adjacency=adjacency, x0=x0, subkeys=subkeys
    )
    if options.verify_chaos:
        from .diagnostics import estimate_lyapunov

        noise_free = replace(cfg, noise_sigma=0.0)
        report = estimate_lyapunov(noise_free, weights, x0, T=2000, eps=1e-8)
        if not report.lambda_hat > 0.0:
            raise ChaosVerificationFailed(report.lambda_hat)
    return resolved


def _mask_shape(shape: tuple[int, ...]) -> tuple[int, int]:
    if len(shape) == 0:
        raise InvalidShape("tensor must have at least one axis")
    count = 1
    for n in shape:
        count *= int(n)
    if count < 1:
        raise InvalidShape(f"tensor must have at least one element, got shape {shape}")
    d = int(shape[-1])
    n = count // d
    return n, d


def generate_mask(
    key: MasterKey,
    nonce: Nonce,
    shape: tuple[int, ...],
    options: CipherOptions | None = None,
) -> np.ndarray:
    """Mask matrix for a tensor of the given shape: n rows by d columns."""
    n, d = _mask_shape(tuple(shape))
    resolved = resolve_config(key, nonce, d, options)
    noise_stream = KeyedStream(resolved.subkeys.noise)
    return simulate(resolved.config, resolved.weights, resolved.x0, noise_stream, n)


def encrypt(
    x: np.ndarray,
    key: MasterKey,
    nonce: Nonce,
    options: CipherOptions | None = None,
) -> np.ndarray:
    """Mask a tensor: elementwise X + S, same shape out as in."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise InvalidInput("input tensor contains non-finite values")
    mask = generate_mask(key, nonce, x.shape, options)
    return x + mask.reshape(x.shape)


def decrypt(
    masked: np.ndarray,
    key: MasterKey,
    nonce: Nonce,
    options: CipherOptions | None = None,
    fingerprint: bytes | None = None,
) -> np.ndarray:
    """Unmask a tensor: regenerate S from the public header and subtract.

    When a container fingerprint is supplied, it must match the options'
    own fingerprint (tamper evidence for the public header). A wrong key is
    not detectable: it silently yields garbage.
    """
    masked = np.asarray(masked, dtype=np.float64)
    if options is None:
        options = CipherOptions()
    if fingerprint is not None and fingerprint != options.fingerprint():
        raise ConfigMismatch("container fingerprint does not match its options block")
    mask = generate_mask(key, nonce, masked.shape, options)
    return masked - mask.reshape(masked.shape)


def encrypt_to_container(
    x: np.ndarray,
    key: MasterKey,
    nonce: Nonce,
    options: CipherOptions | None = None,
) -> bytes:
    """Encrypt and serialize to the normative container bytes."""
    if options is None:
        options = CipherOptions()
    masked = encrypt(x, key, nonce, options)
    return tensorio.container_bytes(masked, nonce.bytes, options.to_block())


def decrypt_from_container(data: bytes, key: MasterKey) -> np.ndarray:
    """Parse container bytes, verify the fingerprint, regenerate and subtract."""
    masked, meta = tensorio.parse_container(data)
    if tensorio.fingerprint_of(meta.options_block) != meta.fingerprint:
        raise ConfigMismatch("container fingerprint does not match its options block")
    options = CipherOptions.from_block(meta.options_block)
    return decrypt(masked, key, Nonce(meta.nonce), options)
