"""Command-line client for the multiplication service.

Every subcommand except `serve` is a thin HTTP client: it builds a request,
posts it to a server (--server URL), and formats the response.  Without
--server the service app is mounted in-process, so the commands work
standalone with identical behavior.

Exit codes: 0 success, 1 parse or I/O problem, 2 exponent overflow.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import random
import sys

import httpx

EXIT_PARSE = 1
EXIT_OVERFLOW = 2


def _post(server: str | None, path: str, payload: dict):
    if server:
        resp = httpx.post(server.rstrip("/") + path, json=payload, timeout=None)
        return resp.status_code, resp.json()

    from .service import create_app

    async def go():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://polymul.internal") as client:
            resp = await client.post(path, json=payload, timeout=None)
            return resp.status_code, resp.json()

    return asyncio.run(go())


def _fail(body: dict) -> int:
    kind = body.get("error", "parse")
    message = body.get("message") or body.get("detail") or str(body)
    print(f"error ({kind}): {message}", file=sys.stderr)
    return EXIT_OVERFLOW if kind == "overflow" else EXIT_PARSE


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("POLYMUL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            print(f"ignoring malformed POLYMUL_THREADS={env!r}", file=sys.stderr)
    return 1


def _poly_input(path: str | None, expr: str | None, side: str) -> dict:
    if (path is None) == (expr is None):
        raise SystemExit(f"give exactly one of --{side} or --expr-{side}")
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return {"text": fh.read()}
        except OSError as exc:
            print(f"error (io): {exc}", file=sys.stderr)
            raise SystemExit(EXIT_PARSE) from None
    return {"expr": expr}


def _options(args) -> dict:
    return {"l": args.l, "threads": _threads(args),
            "merger": args.merger, "coeff": args.coeff}


def _write_result(text: str, out: str | None):
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error (io): {exc}", file=sys.stderr)
            raise SystemExit(EXIT_PARSE) from None
    else:
        sys.stdout.write(text)


def _split_names(raw: str | None):
    if raw is None:
        return None
    return [name for chunk in raw.split(",") for name in chunk.split()] or None


def cmd_mul(args) -> int:
    payload = {
        "a": _poly_input(args.a, args.expr_a, "a"),
        "b": _poly_input(args.b, args.expr_b, "b"),
        "vars": _split_names(args.vars),
        "options": _options(args),
        "include_result": True,
    }
    status, body = _post(args.server, "/multiply", payload)
    if status != 200:
        return _fail(body)
    _write_result(body["result"], args.out)
    for key in ("a_terms", "b_terms", "result_terms", "time_ms"):
        print(f"{key}={body[key]}", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    if args.threads:
        threads = [int(t) for t in args.threads.split(",")]
    else:
        env = os.environ.get("POLYMUL_THREADS")
        threads = [max(1, int(env))] if env and env.isdigit() else [1]
    payload = {
        "example": args.example,
        "power": args.scale,
        "l": args.l,
        "threads": threads,
        "mergers": args.merger.split(","),
        "repetitions": args.reps,
        "coeff": args.coeff,
        "full": args.full,
    }
    status, body = _post(args.server, "/bench", payload)
    if status != 200:
        return _fail(body)
    for key in ("example", "power", "f_terms", "g_terms", "result_terms", "verified"):
        print(f"{key}={body[key]}")
    for row in body["rows"]:
        print(f"merger={row['merger']} threads={row['threads']} "
              f"rep={row['repetition']} time_ms={row['time_ms']:.3f}")
    return 0


def cmd_tune(args) -> int:
    lo, hi = (int(part) for part in args.terms.split(":"))
    rng = random.Random(args.seed)
    sizes = [rng.randint(lo, hi) for _ in range(args.products)]
    parts = [int(p) for p in args.l_range.split(":")]
    l_lo, l_hi = parts[0], parts[1]
    step = parts[2] if len(parts) > 2 else 1
    payload = {
        "seed": args.seed,
        "sizes": sizes,
        "l_values": list(range(l_lo, l_hi + 1, step)),
        "threads": _threads(args),
        "merger": args.merger,
        "warmups": args.warmups,
    }
    status, body = _post(args.server, "/tune", payload)
    if status != 200:
        return _fail(body)
    for l, count in sorted(body["histogram"].items(), key=lambda kv: int(kv[0])):
        print(f"hist_l_{l}={count}")
    print(f"recommended_l={body['recommended_l']}")
    return 0


def cmd_gen(args) -> int:
    names = _split_names(args.var_names)
    payload = {
        "seed": args.seed,
        "vars": names if names else args.vars,
        "terms": args.terms,
        "max_deg": args.max_deg,
        "coeff": args.coeff,
    }
    status, body = _post(args.server, "/generate", payload)
    if status != 200:
        return _fail(body)
    _write_result(body["text"], args.out)
    print(f"terms={body['terms']}", file=sys.stderr)
    return 0


def cmd_cluster(args) -> int:
    payload = {
        "a": _poly_input(args.a, args.expr_a, "a"),
        "b": _poly_input(args.b, args.expr_b, "b"),
        "vars": _split_names(args.vars),
        "nodes": args.nodes,
        "options": _options(args),
        "include_result": True,
    }
    status, body = _post(args.server, "/cluster", payload)
    if status != 200:
        return _fail(body)
    if args.out:
        _write_result(body["result"], args.out)
    print(f"result_terms={body['result_terms']}")
    for rank, ops in enumerate(body["node_ops"]):
        print(f"node_{rank}_ops={ops}")
    print(f"msgs={body['messages']}")
    print(f"bytes={body['bytes']}")
    print(f"time_ms={body['time_ms']:.3f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def _add_operand_flags(sub):
    sub.add_argument("--a", help="polynomial file for the left operand")
    sub.add_argument("--b", help="polynomial file for the right operand")
    sub.add_argument("--expr-a", help="expression for the left operand")
    sub.add_argument("--expr-b", help="expression for the right operand")
    sub.add_argument("--vars", help="comma-separated variable order override")
    sub.add_argument("--out", help="write the product here instead of stdout")


def _add_run_flags(sub):
    sub.add_argument("--merger", default="heap", help="heap or tree")
    sub.add_argument("--l", type=int, default=64, help="grid density")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker count (default: POLYMUL_THREADS or 1)")
    sub.add_argument("--coeff", choices=("int", "f64"), default="int")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polymul",
        description="sparse polynomial multiplication (client for the polymul service)")
    parser.add_argument("--server", help="service URL; omit to run in-process")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("mul", help="multiply two polynomials")
    _add_operand_flags(p)
    _add_run_flags(p)
    p.set_defaults(fn=cmd_mul)

    p = commands.add_parser("bench", help="run a benchmark example")
    p.add_argument("--example", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--scale", type=int, default=8, help="power of the example operands")
    p.add_argument("--full", action="store_true",
                   help="allow full-scale powers (long runtimes, lots of memory)")
    p.add_argument("--merger", default="heap", help="comma-separated mergers to time")
    p.add_argument("--threads", default=None, help="comma-separated worker counts")
    p.add_argument("--l", type=int, default=64)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--coeff", choices=("int", "f64"), default="int")
    p.set_defaults(fn=cmd_bench)

    p = commands.add_parser("tune", help="sweep grid densities on random products")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--products", type=int, default=20)
    p.add_argument("--terms", default="100:200", help="operand size range LO:HI")
    p.add_argument("--l-range", default="4:64", help="density sweep LO:HI[:STEP]")
    p.add_argument("--warmups", type=int, default=1)
    p.add_argument("--merger", default="heap")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=cmd_tune)

    p = commands.add_parser("gen", help="generate a random sparse polynomial")
    p.add_argument("--vars", type=int, default=4, help="variable count")
    p.add_argument("--var-names", help="explicit variable names (overrides --vars)")
    p.add_argument("--terms", type=int, default=100)
    p.add_argument("--max-deg", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coeff", choices=("int", "f64"), default="int")
    p.add_argument("--out", help="write the polynomial here instead of stdout")
    p.set_defaults(fn=cmd_gen)

    p = commands.add_parser("cluster", help="multiply on simulated cluster nodes")
    _add_operand_flags(p)
    _add_run_flags(p)
    p.add_argument("--nodes", type=int, default=1)
    p.set_defaults(fn=cmd_cluster)

    p = commands.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8077)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_PARSE
    except ValueError as exc:  # malformed flag values like --l-range "a:b"
        print(f"error (parse): {exc}", file=sys.stderr)
        return EXIT_PARSE
    except httpx.HTTPError as exc:
        print(f"error (io): {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
