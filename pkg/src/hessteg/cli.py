"""Command-line entry point.

Exit status: 0 success, 2 usage error, 3 bad image file, 4 invalid diff,
5 kernel error, 6 convolution error, 7 field error, 8 cost error,
9 embedding error, 10 extraction error, 11 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from hessteg import kernels
from hessteg.embedding import (
    DEFAULT_HEIGHT,
    EmbedParams,
    Message,
    StegoKey,
    change_stats,
    compute_costs,
    embed,
    extract,
    pad_message,
    simulate,
)
from hessteg.errors import PayloadError, StegoError
from hessteg.image_io import atomic_write, diff, load_image, save_image

IO_ERROR = 11

log = logging.getLogger("hessteg")


class UsageError(Exception):
    """Flag combination that argparse cannot reject on its own."""


def sidecar_path(stego_path) -> Path:
    p = Path(stego_path)
    return p.with_name(p.name + ".json")


def _family(value: str) -> str:
    return kernels.normalize_family(value)


def _add_cost_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", type=str.lower, choices=("ky", "ko"), default="ky")
    p.add_argument("--N", type=int, default=None, help="max kernel scale (default 4 for ky, 12 for ko)")
    p.add_argument("--p", type=float, default=-1.0, help="negative Holder exponent")
    p.add_argument("--wet-cost", type=float, default=1e10)
    p.add_argument("--border", choices=("mirror", "replicate"), default="mirror")


def _params(args, alpha: float = 1.0, mode: str = "coded", height: int = DEFAULT_HEIGHT) -> EmbedParams:
    return EmbedParams(
        alpha=alpha,
        family=_family(args.family),
        N=args.N,
        p=args.p,
        mode=mode,
        constraint_height=height,
        wet_cost=args.wet_cost,
        border=args.border,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hessteg", description="Second-order derivative steganography toolkit."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernels", help="print an exact rational kernel")
    p.add_argument("--family", type=str.lower, choices=("classic", "ky", "ko"), required=True)
    p.add_argument("--kind", choices=("x2", "y2", "xy", "first_x", "first_y"), required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--name", choices=kernels.CLASSIC_NAMES, default="Sobel", help="classic operator")

    p = sub.add_parser("costmap", help="compute the distortion cost map")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help=".f32 raster")
    p.add_argument("--viz", help="optional 8-bit PGM visualization")
    _add_cost_flags(p)

    p = sub.add_parser("embed", help="syndrome-code a message file into a cover")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--msg", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--key", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--height", type=int, default=DEFAULT_HEIGHT, help="trellis constraint height")
    _add_cost_flags(p)

    p = sub.add_parser("extract", help="recover a message from a stego image")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--key", type=int)
    p.add_argument("--len-bits", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, help="embedding payload (default: from sidecar)")
    p.add_argument("--height", type=int)
    p.add_argument("--sidecar", help="sidecar record (default: <stego>.json when present)")

    p = sub.add_parser("simulate", help="simulate optimal embedding at a payload")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--key", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_cost_flags(p)

    p = sub.add_parser("diffmap", help="render stego-minus-cover as a mid-gray image")
    p.add_argument("--cover", required=True)
    p.add_argument("--stego", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("stats", help="summarize where the changes fell")
    p.add_argument("--cover", required=True)
    p.add_argument("--stego", required=True)
    _add_cost_flags(p)
    return parser


def _write_sidecar(stego_path, record: dict) -> None:
    atomic_write(sidecar_path(stego_path), (json.dumps(record, indent=2, sort_keys=True) + "\n").encode())


def cmd_kernels(args) -> None:
    if args.family == "classic":
        if args.kind == "first_x":
            k = kernels.classic_gradient(args.name)
        elif args.kind == "first_y":
            k = kernels.rotate_90(kernels.classic_gradient(args.name))
        elif args.kind == "y2":
            k = kernels.rotate_90(kernels.classic_second_order(args.name, "x2"))
        else:
            k = kernels.classic_second_order(args.name, args.kind)
    else:
        if args.kind.startswith("first"):
            raise kernels.KernelError(f"{args.family} family has no first-order kernels")
        k = kernels.second_order_kernel(_family(args.family), args.kind, args.n)
    sys.stdout.write(k.dump())


def cmd_costmap(args) -> None:
    img = load_image(args.input)
    costs = compute_costs(img, _params(args, mode="simulate"))
    costs.save(args.out)
    if args.viz:
        save_image(costs.visualization(), args.viz)


def cmd_embed(args) -> None:
    cover = load_image(args.input)
    params = _params(args, alpha=args.alpha, height=args.height)
    if params.alpha > 0.5:
        raise PayloadError(f"coded embedding supports alpha <= 0.5, got {params.alpha}")
    payload_bits = params.message_length(cover.size)
    data = Path(args.msg).read_bytes()
    key = StegoKey(args.key)
    msg = Message.from_bytes(data)
    full = pad_message(msg, payload_bits, key)
    costs = compute_costs(cover, params)
    stego = embed(cover, costs, full, key, params.constraint_height, alpha=params.alpha)
    save_image(stego, args.out)
    record = params.to_dict()
    record.update(seed=key.seed, payload_bits=payload_bits, message_bits=len(msg))
    _write_sidecar(args.out, record)


def cmd_extract(args) -> None:
    stego = load_image(args.input)
    side = {}
    side_file = Path(args.sidecar) if args.sidecar else sidecar_path(args.input)
    if args.sidecar or side_file.exists():
        side = json.loads(side_file.read_text())
    seed = args.key if args.key is not None else side.get("seed")
    length = args.len_bits if args.len_bits is not None else side.get("message_bits")
    height = args.height if args.height is not None else side.get("constraint_height", DEFAULT_HEIGHT)
    if seed is None or length is None:
        raise UsageError("extract needs --key and --len-bits (or a sidecar record)")
    if args.alpha is not None:
        payload_bits = int(round(args.alpha * stego.size))
    else:
        payload_bits = side.get("payload_bits", length)
    if length > payload_bits:
        raise UsageError(f"--len-bits {length} exceeds the embedded payload of {payload_bits} bits")
    msg = extract(stego, StegoKey(seed), payload_bits, height)
    atomic_write(args.out, Message(msg.bits[:length]).to_bytes())


def cmd_simulate(args) -> None:
    cover = load_image(args.input)
    params = _params(args, alpha=args.alpha, mode="simulate")
    key = StegoKey(args.key)
    costs = compute_costs(cover, params)
    stego = simulate(cover, costs, params.alpha, key)
    save_image(stego, args.out)
    record = params.to_dict()
    record.update(seed=key.seed)
    _write_sidecar(args.out, record)


def cmd_diffmap(args) -> None:
    d = diff(load_image(args.cover), load_image(args.stego))
    save_image(d.to_image(), args.out)


def cmd_stats(args) -> None:
    cover = load_image(args.cover)
    stego = load_image(args.stego)
    costs = compute_costs(cover, _params(args, mode="simulate"))
    stats = change_stats(cover, stego, costs)
    print(json.dumps(stats.to_dict(), sort_keys=True))


COMMANDS = {
    "kernels": cmd_kernels,
    "costmap": cmd_costmap,
    "embed": cmd_embed,
    "extract": cmd_extract,
    "simulate": cmd_simulate,
    "diffmap": cmd_diffmap,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"hessteg: error: {exc}", file=sys.stderr)
        return 2
    except StegoError as exc:
        print(f"hessteg: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"hessteg: error: {exc}", file=sys.stderr)
        return IO_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
