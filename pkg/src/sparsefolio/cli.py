"""Command-line client for the solve/sweep service.

Subcommands:
  solve   one solve on a price CSV or a synthetic dataset
  sweep   solve sparse + baseline across a beta1 grid, fit regressions
  serve   run the HTTP service

By default requests are dispatched to an in-process copy of the service;
`--server URL` sends them to a remote instance instead. Exit codes:
0 converged, 2 iteration cap reached (outputs still written), 1 solver or
transport failure, 64 usage error, 65 data error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from decimal import Decimal, InvalidOperation

import httpx

from .serialize import csv_lines, dumps

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ITERATION_CAP = 2
EXIT_USAGE = 64
EXIT_DATA = 65

_REGRESSION_NAMES = ("expected_return", "variance_risk", "sparsity")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract here is 64.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _synthetic_spec(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            "expected --synthetic n,T,seed,sectors"
        )
    try:
        n, t, seed, sectors = (int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--synthetic needs four integers, got {text!r}"
        ) from None
    return {"n": n, "periods": t, "seed": seed, "sectors": sectors}


def _beta1_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected --beta1-grid a:b:step")
    try:
        a, b, step = (Decimal(p) for p in parts)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(
            f"--beta1-grid needs three numbers, got {text!r}"
        ) from None
    if step <= 0:
        raise argparse.ArgumentTypeError("--beta1-grid step must be positive")
    if a > b:
        raise argparse.ArgumentTypeError("--beta1-grid start exceeds end")
    grid = []
    v = a
    while v <= b:
        grid.append(float(v))
        v += step
    return grid


def _add_common(p: _Parser, sweep: bool):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--prices", metavar="CSV", help="price table path")
    src.add_argument(
        "--synthetic",
        type=_synthetic_spec,
        metavar="n,T,seed,sectors",
        help="generate a seeded synthetic dataset",
    )
    if sweep:
        p.add_argument(
            "--beta1-grid",
            type=_beta1_grid,
            required=True,
            metavar="a:b:step",
            help="inclusive risk-weight grid",
        )
        p.add_argument(
            "--jobs",
            type=int,
            default=None,
            help="worker processes (default: min(rows, cpu count))",
        )
    else:
        p.add_argument("--beta1", type=float, required=True, help="risk weight")
    p.add_argument("--beta2", type=float, default=1.0, help="ridge weight")
    p.add_argument("--r", type=float, default=0.1, help="minimum return")
    p.add_argument("--rho", type=float, default=5.0, help="budget penalty")
    p.add_argument(
        "--sigma",
        type=float,
        default=None,
        help="cardinality trade-off (default: 1/(8 n^2))",
    )
    p.add_argument("--eps", type=float, default=1e-7, help="gradient tolerance")
    p.add_argument("--max-iter", type=int, default=10000, help="iteration cap")
    p.add_argument(
        "--projection",
        choices=("paper", "euclidean"),
        default="paper",
        help="return projection rule: scale along the ray (paper) or "
        "project onto the half-space (euclidean)",
    )
    p.add_argument("--out", required=True, metavar="PREFIX", help="output prefix")
    p.add_argument(
        "--format",
        choices=("json", "csv"),
        default=None,
        help="output format (solve default: json; sweep always writes the "
        "CSV, json adds a structured dump)",
    )
    p.add_argument("--server", default=None, help="remote service URL")


def build_parser() -> _Parser:
    parser = _Parser(prog="sparsefolio", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("solve", help="single solve"), sweep=False)
    _add_common(sub.add_parser("sweep", help="beta1 sweep"), sweep=True)
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _client(server: str | None):
    if server is not None:
        return httpx.Client(base_url=server, timeout=600.0)
    # In-process dispatch against the same ASGI app the server runs. The
    # import warns about a pending starlette/httpx split; that is noise for
    # a client that never touches the network.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _dataset_payload(args) -> dict | int:
    if args.synthetic is not None:
        return {"synthetic": args.synthetic}
    try:
        with open(args.prices, encoding="utf-8") as fh:
            content = fh.read()
    except OSError as e:
        print(f"{args.prices}: {e.strerror or e}", file=sys.stderr)
        return EXIT_DATA
    return {"prices_csv": content, "name": args.prices}


def _solver_payload(args) -> dict:
    return {
        "rho": args.rho,
        "sigma": args.sigma,
        "epsilon": args.eps,
        "max_iter": args.max_iter,
        "projection": args.projection,
    }


def _post(client, path: str, payload: dict):
    """POST and map HTTP failures to exit codes; returns dict or int."""
    try:
        resp = client.post(path, json=payload)
    except httpx.HTTPError as e:
        print(f"service request failed: {e}", file=sys.stderr)
        return EXIT_ERROR
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail")
    except ValueError:
        detail = resp.text
    print(f"service error ({resp.status_code}): {detail}", file=sys.stderr)
    if resp.status_code == 400:
        return EXIT_DATA
    if resp.status_code == 422:
        return EXIT_USAGE
    return EXIT_ERROR


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _cmd_solve(args) -> int:
    dataset = _dataset_payload(args)
    if isinstance(dataset, int):
        return dataset
    payload = {
        "dataset": dataset,
        "beta1": args.beta1,
        "beta2": args.beta2,
        "r_min": args.r,
        "solver": _solver_payload(args),
    }
    with _client(args.server) as client:
        body = _post(client, "/solve", payload)
    if isinstance(body, int):
        return body

    fmt = args.format or "json"
    if fmt == "json":
        doc = {
            "config": body["config"],
            "dataset": body["dataset"],
            "result": {
                "termination": body["termination"],
                "iterations": body["iterations"],
                "lambda_final": body["lambda_final"],
                "budget_violation": body["budget_violation"],
                "fixed_point_residual": body["fixed_point_residual"],
                "asset_ids": body["asset_ids"],
                "weights": body["weights"],
                "objective_trace": body["objective_trace"],
            },
            "report": body["report"],
        }
        _write(f"{args.out}.json", dumps(doc))
    else:
        comments = dict(body["config"])
        comments.update(
            {f"dataset_{k}": v for k, v in body["dataset"].items() if k != "meta"}
        )
        comments.update({f"report_{k}": v for k, v in body["report"].items()})
        comments["termination"] = body["termination"]
        comments["iterations"] = body["iterations"]
        rows = list(zip(body["asset_ids"], body["weights"]))
        _write(f"{args.out}.csv", csv_lines(["asset", "weight"], rows, comments))

    if body["termination"] == "iteration_cap":
        return EXIT_ITERATION_CAP
    return EXIT_OK


def _cmd_sweep(args) -> int:
    dataset = _dataset_payload(args)
    if isinstance(dataset, int):
        return dataset
    jobs = args.jobs
    if jobs is None:
        jobs = max(1, min(len(args.beta1_grid), os.cpu_count() or 1))
    elif jobs < 1:
        print("--jobs must be positive", file=sys.stderr)
        return EXIT_USAGE
    payload = {
        "dataset": dataset,
        "beta1_grid": args.beta1_grid,
        "beta2": args.beta2,
        "r_min": args.r,
        "solver": _solver_payload(args),
        "jobs": jobs,
    }
    with _client(args.server) as client:
        body = _post(client, "/sweep", payload)
    if isinstance(body, int):
        return body

    _write(f"{args.out}_sweep.csv", body["csv"])
    for name in _REGRESSION_NAMES:
        doc = {"config": body["config"], "dataset": body["dataset"]}
        if name in body["regressions"]:
            doc["regression"] = body["regressions"][name]
        else:
            doc["error"] = body["regression_errors"].get(name, "fit unavailable")
        _write(f"{args.out}_regression_{name}.json", dumps(doc))
    if args.format == "json":
        doc = {
            "config": body["config"],
            "dataset": body["dataset"],
            "rows": body["rows"],
        }
        _write(f"{args.out}_sweep.json", dumps(doc))

    failed = [r for r in body["rows"] if r.get("error")]
    if failed:
        for r in failed:
            print(f"beta1={r['beta1']}: {r['error']}", file=sys.stderr)
        return EXIT_ERROR
    capped = any(
        r["diagnostics_sepo"]["termination"] == "iteration_cap"
        or r["diagnostics_mvo"]["termination"] == "iteration_cap"
        for r in body["rows"]
    )
    return EXIT_ITERATION_CAP if capped else EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "sweep":
        return _cmd_sweep(args)
    return _cmd_serve(args)


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
