"""Command line surface: encode/decode files, verification, benches, graphs.

Every run is driven by a SessionConfig assembled from an optional JSON
config file, command line flags (flags win), and the UCS_BUDGET
environment variable, which overrides every solver cap at once.  Report
artifacts echo the config so a result file is self-describing.  Exit
codes are part of the interface:

    0  success
    2  bad input (unreadable file, invalid distribution, bad flags)
    4  message id outside the prior's support
    5  encoder refusal (or decoding a refusal wire)
    6  decode failure or verification failure
    7  a configured budget or cap was exhausted
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .bits import Bottom, pad_to_bytes, unpad_from_bytes
from .chains import DEFAULT_ENUM_CAP
from .codec_low import (
    DEFAULT_VISIT_CAP,
    decode_low,
    encode_low,
    parse_low,
    serialize_low,
)
from .codec_reduce import decode_reduced, encode_reduced, parse_reduced
from .codec_simple import decode_simple, encode_simple
from .dist import Dist, dist_from_json, entropy, make_dist
from .errors import BudgetExhausted, CapExceeded, CodecError
from .graphs import (
    DEFAULT_SOLVER_NODES,
    build_shift_graph,
    build_unc_graph,
    exact_chromatic,
    frac_cover_color,
    iterated_hash_color,
)
from .hashing import DEFAULT_ISOLATION_BUDGET, PROTOCOL_SEED
from .oracle import SCHEMES, verify_roundtrip_instance, verify_scheme

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_UNKNOWN_MESSAGE = 4
EXIT_REFUSED = 5
EXIT_DECODE_FAILED = 6
EXIT_BUDGET = 7


@dataclass(frozen=True)
class SessionConfig:
    n: int | None = None
    delta: int = 0
    epsilon: Fraction = Fraction(0)
    scheme: str = "simple"
    seed: int = PROTOCOL_SEED
    denominator_bits: int = 3
    search_budget: int = DEFAULT_ISOLATION_BUDGET
    enum_cap: int = DEFAULT_ENUM_CAP
    visit_cap: int = DEFAULT_VISIT_CAP
    solver_nodes: int = DEFAULT_SOLVER_NODES

    def as_json(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "epsilon": str(self.epsilon),
            "scheme": self.scheme,
            "seed": hex(self.seed),
            "denominator_bits": self.denominator_bits,
            "search_budget": self.search_budget,
            "enum_cap": self.enum_cap,
            "visit_cap": self.visit_cap,
            "solver_nodes": self.solver_nodes,
        }


def _error(code: str, detail: str) -> None:
    json.dump({"error": code, "detail": detail}, sys.stderr)
    sys.stderr.write("\n")


def load_config(args: argparse.Namespace) -> SessionConfig:
    config = SessionConfig()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            raw = json.load(fh)
        fields = {}
        for name in ("n", "delta", "denominator_bits", "search_budget",
                     "enum_cap", "visit_cap", "solver_nodes"):
            if name in raw:
                fields[name] = int(raw[name])
        if "epsilon" in raw:
            fields["epsilon"] = Fraction(str(raw["epsilon"]))
        if "scheme" in raw:
            fields["scheme"] = str(raw["scheme"])
        if "seed" in raw:
            fields["seed"] = int(str(raw["seed"]), 16)
        config = replace(config, **fields)
    overrides = {}
    if getattr(args, "delta", None) is not None:
        overrides["delta"] = args.delta
    if getattr(args, "epsilon", None) is not None:
        overrides["epsilon"] = Fraction(args.epsilon)
    if getattr(args, "scheme", None) is not None:
        overrides["scheme"] = args.scheme
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = int(args.seed, 16)
    if overrides:
        config = replace(config, **overrides)
    env_budget = os.environ.get("UCS_BUDGET")
    if env_budget:
        cap = int(env_budget)
        config = replace(
            config,
            search_budget=cap,
            enum_cap=cap,
            visit_cap=cap,
            solver_nodes=cap,
        )
    if config.scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {config.scheme!r}")
    if config.delta < 0 or config.epsilon < 0:
        raise ValueError("delta and epsilon must be nonnegative")
    return config


def _load_dist(path: str, config: SessionConfig) -> Dist:
    with open(path) as fh:
        p = dist_from_json(json.load(fh))
    if config.n is not None and config.n != p.n:
        raise ValueError(f"config says n={config.n} but distribution has n={p.n}")
    return p


def _encode_wire(config: SessionConfig, p: Dist, m: int) -> tuple[str, bool]:
    """Wire bits and whether the encoder refused."""
    eps = float(config.epsilon)
    if config.scheme == "simple":
        bits = encode_simple(p, m, config.delta, seed=config.seed,
                             search_budget=config.search_budget)
        return bits, False
    if config.scheme == "low":
        codeword = encode_low(p, m, config.delta, epsilon=eps, seed=config.seed,
                              enum_cap=config.enum_cap,
                              search_budget=config.search_budget)
        return serialize_low(codeword), isinstance(codeword, Bottom)
    inner = config.scheme.split("+", 1)[1]
    if inner == "simple":
        options = {"search_budget": config.search_budget}
    else:
        options = {"enum_cap": config.enum_cap, "search_budget": config.search_budget}
    bits = encode_reduced(p, m, config.delta, inner, eps, seed=config.seed, **options)
    refused = False
    if inner == "low":
        refused = isinstance(parse_low(parse_reduced(bits).payload, p.n), Bottom)
    return bits, refused


def _decode_wire(config: SessionConfig, q: Dist, bits: str):
    if config.scheme == "simple":
        return decode_simple(q, bits, seed=config.seed)
    if config.scheme == "low":
        codeword = parse_low(bits, q.n)
        return decode_low(q, codeword, config.delta, seed=config.seed,
                          visit_cap=config.visit_cap, enum_cap=config.enum_cap,
                          search_budget=config.search_budget)
    inner = config.scheme.split("+", 1)[1]
    if inner == "simple":
        options = {}
    else:
        options = {"visit_cap": config.visit_cap, "enum_cap": config.enum_cap,
                   "search_budget": config.search_budget}
    return decode_reduced(q, bits, config.delta, inner, seed=config.seed, **options)


def cmd_encode(args: argparse.Namespace) -> int:
    config = load_config(args)
    p = _load_dist(args.dist, config)
    m = args.message
    if not 1 <= m <= p.n or p.prob(m) == 0:
        _error("unknown-message", f"message {m} is outside the support")
        return EXIT_UNKNOWN_MESSAGE
    bits, refused = _encode_wire(config, p, m)
    Path(args.out).write_bytes(pad_to_bytes(bits))
    print(len(bits))
    if refused:
        _error("refused", "encoder declined this message under the slack budget")
        return EXIT_REFUSED
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    config = load_config(args)
    q = _load_dist(args.dist, config)
    bits = unpad_from_bytes(Path(args.codeword).read_bytes())
    out = _decode_wire(config, q, bits)
    if isinstance(out, Bottom):
        _error("refused", "codeword is a refusal")
        return EXIT_REFUSED
    print(out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = load_config(args)
    if config.n is None:
        raise ValueError("verification needs n in the config")
    report = verify_scheme(
        config.scheme,
        config.n,
        config.delta,
        float(config.epsilon),
        config.denominator_bits,
        config.seed,
    )
    payload = report.to_json()
    payload["session"] = config.as_json()
    base = Path(args.out)
    base.parent.mkdir(parents=True, exist_ok=True)
    with open(base.with_suffix(".json"), "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    report.write_csv(base.with_suffix(".csv"))
    print("pass" if report.passed else "fail")
    return EXIT_OK if report.passed else EXIT_DECODE_FAILED


def cmd_bench(args: argparse.Namespace) -> int:
    config = load_config(args)
    with open(args.grid) as fh:
        grid = json.load(fh)
    rows = []
    for cell in grid:
        p = make_dist(cell["family"], int(cell["n"]), cell["param"])
        delta = int(cell.get("delta", config.delta))
        epsilon = Fraction(str(cell.get("epsilon", config.epsilon)))
        scheme = cell.get("scheme", config.scheme)
        profile = verify_roundtrip_instance(
            scheme, p, [], delta, float(epsilon), config.seed
        )
        rows.append(
            [cell["n"], delta, cell["family"], f"{entropy(p):.6f}",
             f"{profile['expected_length']:.6f}", f"{profile['bottom_mass']:.6f}"]
        )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        fh.write("# session " + json.dumps(config.as_json()) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["n", "delta", "family", "entropy", "mean_length", "bottom_rate"])
        writer.writerows(rows)
    print(len(rows))
    return EXIT_OK


def cmd_graph(args: argparse.Namespace) -> int:
    config = load_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.kind == "shift":
        graph = build_shift_graph(args.n, args.k)
        header = f"# kind=shift n={args.n} k={args.k}"
    else:
        graph = build_unc_graph(args.n, args.closeness, args.k)
        header = f"# kind=uncertainty n={args.n} closeness={args.closeness} k={args.k}"
    with open(out_dir / "graph.txt", "w") as fh:
        fh.write(header + "\n")
        for i, v in enumerate(graph.vertices):
            name = ",".join(str(x) for x in v)
            nbrs = " ".join(",".join(str(x) for x in graph.vertices[j]) for j in sorted(graph.adj[i]))
            fh.write(f"{name}: {nbrs}\n")
    payload = {"session": config.as_json(), "kind": args.kind,
               "n": args.n, "closeness": args.closeness, "k": args.k}
    if args.method == "exact":
        chi = exact_chromatic(graph, node_budget=config.solver_nodes)
        payload["chi"] = chi
        with open(out_dir / "chi.json", "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        print(chi)
        return EXIT_OK
    if args.method == "iterated":
        result = iterated_hash_color(args.n, args.closeness, args.k, config.seed,
                                     search_budget=config.search_budget)
    else:
        result = frac_cover_color(graph, args.closeness, config.seed)
    payload["coloring"] = result.as_json()
    payload["color_count"] = result.color_count
    with open(out_dir / "coloring.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(result.color_count)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="priorcode",
        description="Compression that survives sender/receiver prior mismatch.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON session config file")
    common.add_argument("--delta", type=int, help="closeness bound")
    common.add_argument("--epsilon", help="refusal budget as a rational, e.g. 1/8")
    common.add_argument("--scheme", choices=SCHEMES, help="codec to use")
    common.add_argument("--seed", help="hash seed as hex")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", parents=[common], help="encode a message id")
    enc.add_argument("--dist", required=True, help="prior distribution JSON file")
    enc.add_argument("--message", type=int, required=True)
    enc.add_argument("--out", required=True, help="codeword output file")
    enc.set_defaults(func=cmd_encode)

    dec = sub.add_parser("decode", parents=[common], help="decode a codeword file")
    dec.add_argument("--dist", required=True, help="prior distribution JSON file")
    dec.add_argument("--codeword", required=True, help="codeword input file")
    dec.set_defaults(func=cmd_decode)

    ver = sub.add_parser("verify", parents=[common], help="exhaustive grid verification")
    ver.add_argument("--out", default="verify_report", help="report base path")
    ver.set_defaults(func=cmd_verify)

    ben = sub.add_parser("bench", parents=[common], help="measure lengths over a grid")
    ben.add_argument("--grid", required=True, help="bench grid JSON file")
    ben.add_argument("--out", required=True, help="CSV output path")
    ben.set_defaults(func=cmd_bench)

    gra = sub.add_parser("graph", parents=[common], help="graph dumps and colorings")
    gra.add_argument("--kind", choices=["uncertainty", "shift"], default="uncertainty")
    gra.add_argument("--n", type=int, required=True)
    gra.add_argument("--closeness", type=int, default=1)
    gra.add_argument("--k", type=int, required=True)
    gra.add_argument("--method", choices=["exact", "iterated", "cover"], default="exact")
    gra.add_argument("--out", required=True, help="output directory")
    gra.set_defaults(func=cmd_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BudgetExhausted, CapExceeded) as exc:
        _error("budget", str(exc))
        return EXIT_BUDGET
    except CodecError as exc:
        _error("codec", str(exc))
        return EXIT_DECODE_FAILED
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _error("bad-input", str(exc))
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
