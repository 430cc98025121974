"""Command-line front end: encrypt, decrypt, mask, diagnose, inspect, demo.

Exit codes are fixed so shell pipelines can branch on failure class:
0 success, 2 invalid arguments, 3 I/O or format errors, 4 chaos verification
failed, 5 container fingerprint mismatch, 6 diagnose found lambda <= 0.

The key is taken from KCD_KEY when set (the non-history-leaking path),
otherwise from --key. --gen-nonce is the only entropy source in the binary;
every other output is deterministic given explicit --nonce. No command ever
writes key material to any file or stream.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import tensorio
from .cipher import (
    CipherOptions,
    decrypt,
    encrypt,
    generate_mask,
    resolve_config,
)
from .dynamics import MapKind, SystemConfig
from .diagnostics import estimate_lyapunov
from .errors import (
    ChaosVerificationFailed,
    ConfigMismatch,
    InvalidInput,
    InvalidKeyMaterial,
    InvalidOptions,
    InvalidRange,
    InvalidShape,
    KCDMError,
)
from .graphgen import FAMILY_ER, FAMILY_WS
from .keystream import MasterKey, Nonce

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CHAOS = 4
EXIT_MISMATCH = 5
EXIT_NOT_CHAOTIC = 6

_MAP_NAMES = {
    "logistic": MapKind.LOGISTIC,
    "tent": MapKind.TENT,
    "baker": MapKind.BAKER,
    "standard": MapKind.STANDARD,
    "cat": MapKind.CAT,
}


def _load_key(args) -> MasterKey:
    text = os.environ.get("KCD_KEY") or getattr(args, "key", None)
    if not text:
        raise InvalidKeyMaterial("no key given: set KCD_KEY or pass --key")
    return MasterKey.from_hex(text)


def _load_nonce(args) -> Nonce:
    if getattr(args, "gen_nonce", False):
        return Nonce(os.urandom(16))
    text = getattr(args, "nonce", None)
    if not text:
        raise InvalidKeyMaterial("no nonce given: pass --nonce or --gen-nonce")
    return Nonce.from_hex(text)


def _add_key_args(p: argparse.ArgumentParser, gen_nonce: bool = False) -> None:
    p.add_argument("--key", help="64 hex chars; KCD_KEY env var wins when set")
    p.add_argument("--nonce", help="32 hex chars, public")
    if gen_nonce:
        p.add_argument("--gen-nonce", action="store_true", help="draw a fresh nonce from OS entropy")


def _add_option_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", choices=sorted(_MAP_NAMES), help="pin the node map")
    p.add_argument("--graph", choices=[FAMILY_ER, FAMILY_WS], help="pin the graph family")
    p.add_argument("--alpha", type=float, help="mask amplitude (default 1.0)")
    p.add_argument("--sigma", type=float, help="noise amplitude (default 1e-3)")
    p.add_argument("--burn", type=int, help="burn-in steps (default 100)")
    p.add_argument("--verify-chaos", action="store_true", help="reject non-chaotic systems")
    p.add_argument("--er-p", type=float, help="pin ER edge probability")
    p.add_argument("--ws-k", type=int, help="pin WS lattice degree (even)")
    p.add_argument("--ws-beta", type=float, help="pin WS rewiring probability")
    p.add_argument("--eps-c", type=float, help="pin coupling strength")
    p.add_argument("--map-r", type=float, help="pin logistic rate")
    p.add_argument("--map-mu", type=float, help="pin tent break point")
    p.add_argument("--map-s", type=float, help="pin baker fold point")
    p.add_argument("--map-kick", type=float, help="pin standard-map kick strength")


def _options_from(args) -> CipherOptions:
    kwargs = {}
    if args.map:
        kwargs["map_kind"] = _MAP_NAMES[args.map]
    if args.graph:
        kwargs["family"] = args.graph
    if args.alpha is not None:
        kwargs["alpha"] = args.alpha
    if args.sigma is not None:
        kwargs["noise_sigma"] = args.sigma
    if args.burn is not None:
        kwargs["t_burn"] = args.burn
    for attr, name in (
        ("er_p", "p"),
        ("ws_k", "k"),
        ("ws_beta", "beta"),
        ("eps_c", "eps_c"),
        ("map_r", "r"),
        ("map_mu", "mu"),
        ("map_s", "s"),
        ("map_kick", "K"),
    ):
        value = getattr(args, attr)
        if value is not None:
            kwargs[name] = value
    kwargs["verify_chaos"] = bool(getattr(args, "verify_chaos", False))
    return CipherOptions(**kwargs)


def cmd_encrypt(args) -> int:
    key = _load_key(args)
    nonce = _load_nonce(args)
    options = _options_from(args)
    x = tensorio.read_tensor(args.infile)
    masked = encrypt(x, key, nonce, options)
    tensorio.write_container(args.outfile, masked, nonce.bytes, options.to_block())
    print(f"nonce={nonce.hex()}")
    print(f"fingerprint={options.fingerprint().hex()}")
    if args.check:
        recovered = decrypt(masked, key, nonce, options)
        print(f"roundtrip_max_error={float(np.max(np.abs(recovered - x))):.3e}")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    key = _load_key(args)
    masked, meta = tensorio.read_container(args.infile)
    if tensorio.fingerprint_of(meta.options_block) != meta.fingerprint:
        raise ConfigMismatch("container fingerprint does not match its options block")
    options = CipherOptions.from_block(meta.options_block)
    recovered = decrypt(masked, key, Nonce(meta.nonce), options)
    tensorio.write_tensor(args.outfile, recovered)
    print(f"nonce={meta.nonce.hex()}")
    print(f"shape={'x'.join(map(str, recovered.shape))}")
    return EXIT_OK


def cmd_mask(args) -> int:
    key = _load_key(args)
    nonce = _load_nonce(args)
    options = _options_from(args)
    try:
        shape = tuple(int(part) for part in args.shape.split(","))
    except ValueError as exc:
        raise InvalidShape(f"bad --shape: {exc}") from exc
    mask = generate_mask(key, nonce, shape, options)
    tensorio.write_tensor(args.outfile, mask)
    print(f"nonce={nonce.hex()}")
    print(f"mask_shape={'x'.join(map(str, mask.shape))}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    key = _load_key(args)
    nonce = _load_nonce(args)
    options = _options_from(args)
    resolved = resolve_config(key, nonce, args.d, options)
    cfg = resolved.config
    noise_free = SystemConfig(
        graph=cfg.graph,
        map_kind=cfg.map_kind,
        params=cfg.params,
        d=cfg.d,
        t_burn=cfg.t_burn,
        noise_sigma=0.0,
        alpha=cfg.alpha,
    )
    report = estimate_lyapunov(noise_free, resolved.weights, resolved.x0, T=args.steps)
    print(f"map={cfg.map_kind.value}")
    print(f"family={cfg.graph.family}")
    print(f"d={cfg.d}")
    print(f"lambda_hat={report.lambda_hat:.6f}")
    print(f"lambda_hat_all={report.lambda_hat_all:.6f}")
    print(f"steps={report.steps}")
    print(f"epsilon={report.epsilon:.3e}")
    print(f"discarded={report.discarded}")
    print(f"chaotic={'yes' if report.lambda_hat > 0 else 'no'}")
    if args.logs_csv:
        tensorio.write_csv(args.logs_csv, report.per_step_logs)
    return EXIT_OK if report.lambda_hat > 0 else EXIT_NOT_CHAOTIC


def cmd_inspect(args) -> int:
    if args.container:
        data, meta = tensorio.read_container(args.container)
        options = CipherOptions.from_block(meta.options_block)
        print(f"nonce={meta.nonce.hex()}")
        print(f"fingerprint={meta.fingerprint.hex()}")
        print(f"fingerprint_ok={tensorio.fingerprint_of(meta.options_block) == meta.fingerprint}")
        print(f"shape={'x'.join(map(str, data.shape))}")
        print(f"map={'auto' if options.map_kind is None else options.map_kind.value}")
        print(f"family={options.family or 'auto'}")
        print(f"t_burn={options.t_burn}")
        print(f"sigma={options.noise_sigma!r}")
        print(f"alpha={options.alpha!r}")
        return EXIT_OK
    key = _load_key(args)
    nonce = _load_nonce(args)
    options = _options_from(args)
    resolved = resolve_config(key, nonce, args.d, options)
    cfg = resolved.config
    print(f"map={cfg.map_kind.value}")
    print(f"params r={cfg.params.r!r} mu={cfg.params.mu!r} s={cfg.params.s!r} K={cfg.params.K!r}")
    g = cfg.graph
    print(f"family={g.family}")
    print(f"d={g.d}")
    print(f"p={g.p!r} k={g.k} beta={g.beta!r} eps_c={g.eps_c!r}")
    print(f"edges={int(resolved.adjacency.sum()) // 2}")
    print(f"fingerprint={options.fingerprint().hex()}")
    if args.adjacency_csv:
        tensorio.write_csv(args.adjacency_csv, resolved.adjacency.astype(np.float64))
    if args.weights_csv:
        tensorio.write_csv(args.weights_csv, resolved.weights)
    return EXIT_OK


def _toy_model(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Fixed linear layer y = x @ M + b; key-independent by construction."""
    i = np.arange(d, dtype=np.float64)
    m = 0.05 * np.cos(0.7 * (i[:, None] + 2.0 * i[None, :]) + 0.3)
    b = 0.1 * np.sin(0.9 * i + 1.1)
    return m, b


def cmd_demo(args) -> int:
    key = _load_key(args)
    x = tensorio.read_tensor(args.infile)
    if x.ndim != 2:
        raise InvalidShape("demo expects a rank-2 tensor")
    options = CipherOptions()
    nonce_in = Nonce(bytes(15) + b"\x01")
    nonce_out = Nonce(bytes(15) + b"\x02")
    m, b = _toy_model(x.shape[1])

    # Client masks the input; server unmasks, runs the model, masks the
    # output under a second nonce; client unmasks the result.
    masked_in = encrypt(x, key, nonce_in, options)
    server_x = decrypt(masked_in, key, nonce_in, options)
    y = server_x @ m + b
    masked_out = encrypt(y, key, nonce_out, options)
    client_y = decrypt(masked_out, key, nonce_out, options)

    truth = x @ m + b
    err_good = float(np.max(np.abs(client_y - truth)))

    wrong = bytearray(key.bytes)
    wrong[0] ^= 0x01
    wrong_key = MasterKey(bytes(wrong))
    intruder_x = decrypt(masked_in, wrong_key, nonce_in, options)
    y_bad = intruder_x @ m + b
    err_bad = float(np.mean(np.abs(y_bad - truth)))

    print(f"correct_key_output_error={err_good:.3e}")
    print(f"wrong_key_output_error={err_bad:.3e}")
    print(f"authenticated={'yes' if err_good < 1e-9 and err_bad > 1e-3 else 'no'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kcdm",
        description="Mask real-valued tensors with key-conditioned chaotic graph dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encrypt", help="mask a tensor file into a container")
    _add_key_args(p, gen_nonce=True)
    _add_option_args(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--check", action="store_true", help="report in-memory round-trip error")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="unmask a container into a tensor file")
    p.add_argument("--key")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("mask", help="write the raw mask for a shape")
    _add_key_args(p, gen_nonce=True)
    _add_option_args(p)
    p.add_argument("--shape", required=True, help="comma-separated dims, e.g. 2,4")
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("diagnose", help="estimate the largest Lyapunov exponent")
    _add_key_args(p)
    _add_option_args(p)
    p.add_argument("--d", type=int, required=True, help="node count")
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--logs-csv", help="write per-step logs as CSV")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("inspect", help="dump a resolved system or container header")
    _add_key_args(p)
    _add_option_args(p)
    p.add_argument("--d", type=int, default=8, help="node count (system mode)")
    p.add_argument("--container", help="inspect this container instead")
    p.add_argument("--adjacency-csv", help="write adjacency as CSV")
    p.add_argument("--weights-csv", help="write weights as CSV")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("demo", help="two-nonce authenticated-inference round trip")
    p.add_argument("--key")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ChaosVerificationFailed as exc:
        print(f"error: chaos verification failed (lambda_hat={exc.lambda_hat})", file=sys.stderr)
        return EXIT_CHAOS
    except ConfigMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (InvalidKeyMaterial, InvalidOptions, InvalidShape, InvalidInput, InvalidRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, KCDMError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
