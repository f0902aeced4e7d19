"""Command-line front end.

The CLI is a thin client of the HTTP service: every subcommand builds a
request, sends it to an in-process application instance (or to a running
server when ``--server URL`` is given), writes the returned CSV/SVG
artifacts, and prints the JSON summary to stdout.

Exit codes: 0 success, 2 parse/usage error, 3 domain error (valid JSON,
mathematically invalid values), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

__all__ = ["main", "build_parser"]

_EXIT_OK = 0
_EXIT_PARSE = 2
_EXIT_DOMAIN = 3
_EXIT_IO = 4

_KIND_EXIT = {"parse": _EXIT_PARSE, "domain": _EXIT_DOMAIN}


def _parse_grid(text: str) -> dict:
    """``t_min,t_max,count,{lin|log}`` -> grid request fragment."""
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"--grid wants t_min,t_max,count,{{lin|log}}, got {text!r}"
        )
    t_min_s, t_max_s, count_s, kind = parts
    if kind not in ("lin", "log"):
        raise argparse.ArgumentTypeError(f"grid kind must be 'lin' or 'log', got {kind!r}")
    try:
        t_min, t_max, count = float(t_min_s), float(t_max_s), int(count_s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --grid value: {exc}") from None
    return {"t_min": t_min, "t_max": t_max, "count": count, "kind": kind}


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impatience",
        description="Analyze discount functions: classification, comparative "
        "impatience, mixtures, and certainty-equivalent rates.",
    )
    parser.add_argument(
        "--server",
        metavar="URL",
        default=None,
        help="send requests to a running service instead of in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common_output(p):
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory (default: $IMPATIENCE_OUT or '.')")
        p.add_argument("--svg", action="store_true", help="also render SVG charts")

    def common_analysis(p):
        p.add_argument("--grid", type=_parse_grid, default=None,
                       metavar="T_MIN,T_MAX,COUNT,{lin|log}")
        p.add_argument("--tol", type=_positive_float, default=None,
                       help="classification tolerance override")

    p = sub.add_parser("analyze", help="classify one discount spec")
    p.add_argument("spec", metavar="SPEC.json")
    common_analysis(p)
    p.add_argument("--fd-step", type=_positive_float, default=None,
                   help="use finite differences with this step")
    common_output(p)

    p = sub.add_parser("compare", help="order two specs by impatience decline")
    p.add_argument("first", metavar="A.json")
    p.add_argument("second", metavar="B.json")
    common_analysis(p)
    common_output(p)

    p = sub.add_parser("mix", help="decompose a mixture's index of decline")
    p.add_argument("mixture", metavar="MIXTURE.json")
    common_analysis(p)
    common_output(p)

    p = sub.add_parser("ce", help="certainty-equivalent hyperbolic rate of a bundle")
    p.add_argument("bundle", metavar="BUNDLE.json")
    p.add_argument("--grid", type=_parse_grid, default=None,
                   metavar="T_MIN,T_MAX,COUNT,{lin|log}")
    common_output(p)

    # presets are parameter-locked: no grid/tolerance flags on purpose,
    # so attempting to override them is a usage error (exit 2)
    p = sub.add_parser("figure", help="reproduce a built-in figure preset")
    p.add_argument("number", type=int, choices=(1, 2, 3))
    common_output(p)

    p = sub.add_parser("household", help="two-member household choice demo")
    p.add_argument("--horizon", type=int, default=50,
                   help="number of delay periods to tabulate (default 50)")
    common_output(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(f"cannot read {path}: {exc}", "io")
        raise SystemExit(_EXIT_IO)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(f"{path} is not valid JSON: {exc}", "parse")
        raise SystemExit(_EXIT_PARSE)


def _fail(message: str, kind: str) -> None:
    print(json.dumps({"error": message, "kind": kind}), file=sys.stderr)


def _open_client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=60.0)
    with warnings.catch_warnings():
        # starlette warns about the sandbox's httpx version at import time
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _write_artifacts(files: dict, outdir: str) -> list[str]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in sorted(files.items()):
        target = out / name
        target.write_text(text, encoding="utf-8", newline="")
        written.append(str(target))
    return written


def _dispatch(client, args) -> "tuple[int, dict | None]":
    """Send the request for ``args``; return (exit code, response body)."""
    if args.command == "analyze":
        payload = {"spec": _load_json(args.spec), "svg": args.svg}
        if args.grid:
            payload["grid"] = args.grid
        if args.tol is not None:
            payload["tol"] = args.tol
        if args.fd_step is not None:
            payload["fd_step"] = args.fd_step
        resp = client.post("/analyze", json=payload)
    elif args.command == "compare":
        payload = {
            "first": _load_json(args.first),
            "second": _load_json(args.second),
            "svg": args.svg,
        }
        if args.grid:
            payload["grid"] = args.grid
        if args.tol is not None:
            payload["tol"] = args.tol
        resp = client.post("/compare", json=payload)
    elif args.command == "mix":
        payload = {"mixture": _load_json(args.mixture), "svg": args.svg}
        if args.grid:
            payload["grid"] = args.grid
        if args.tol is not None:
            payload["tol"] = args.tol
        resp = client.post("/mix", json=payload)
    elif args.command == "ce":
        payload = {"bundle": _load_json(args.bundle), "svg": args.svg}
        if args.grid:
            payload["grid"] = args.grid
        resp = client.post("/ce", json=payload)
    elif args.command == "figure":
        resp = client.get(f"/figure/{args.number}", params={"svg": args.svg})
    elif args.command == "household":
        resp = client.get(
            "/household", params={"horizon": args.horizon, "svg": args.svg}
        )
    else:  # pragma: no cover - argparse enforces the choices
        raise AssertionError(args.command)

    body = resp.json()
    if resp.status_code != 200:
        kind = body.get("kind", "parse") if isinstance(body, dict) else "parse"
        _fail(body.get("error", f"HTTP {resp.status_code}") if isinstance(body, dict)
              else f"HTTP {resp.status_code}", kind)
        return _KIND_EXIT.get(kind, _EXIT_PARSE), None
    return _EXIT_OK, body


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return _EXIT_OK

    try:
        client = _open_client(args.server)
    except Exception as exc:  # unreachable server URL and similar
        _fail(f"cannot open client: {exc}", "io")
        return _EXIT_IO

    try:
        code, body = _dispatch(client, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    finally:
        client.close()
    if code != _EXIT_OK:
        return code

    outdir = args.out or os.environ.get("IMPATIENCE_OUT") or "."
    try:
        written = _write_artifacts(body.get("files", {}), outdir)
    except OSError as exc:
        _fail(f"cannot write artifacts to {outdir}: {exc}", "io")
        return _EXIT_IO

    summary = dict(body.get("summary", {}))
    summary["artifacts"] = written
    print(json.dumps(summary, indent=2))
    return _EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
