"""Command-line front end.

A thin client over the service layer: every subcommand loads JSON files,
builds the corresponding request, and dispatches either in-process (the
default) or to a running gridcube service via ``--server URL``. Output
files use the same schemas the service speaks.

Exit codes: 0 success, 1 failed verification or generic error,
2 precondition violation, 3 degeneracy, 4 size cap exceeded.
"""

import argparse
import json
import sys

from .errors import GridcubeError

EXIT_BY_TYPE = {
    "PreconditionError": 2,
    "InvalidSelectorError": 2,
    "DimensionError": 2,
    "NotStochasticKError": 2,
    "NotPMatrixError": 2,
    "DegenerateInstanceError": 3,
    "TooLargeError": 4,
}


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _emit(payload, out_path):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


class Client:
    """Dispatches requests in-process or to a remote service."""

    def __init__(self, server=None):
        self.server = server.rstrip("/") if server else None

    def call(self, endpoint, payload):
        if self.server is None:
            from .service.app import (
                handle_classify,
                handle_recover,
                handle_reduce,
                handle_solve,
                handle_uso,
                handle_verify,
                handle_witness,
            )

            handlers = {
                "classify": lambda p: handle_classify(p["matrix"]),
                "witness": lambda p: handle_witness(p["matrix"]),
                "solve": lambda p: handle_solve(
                    p["problem"], p.get("method"), p.get("rule", "least-index"), p.get("oracle", False)
                ),
                "reduce": lambda p: handle_reduce(p["problem"], p["target"]),
                "recover": lambda p: handle_recover(p["trace"], p["solution"]),
                "uso": lambda p: handle_uso(
                    p["problem"], p.get("check", False), p.get("dot", False)
                ),
                "verify": lambda p: handle_verify(p["problem"], p["solution"]),
            }
            return handlers[endpoint](payload)
        import httpx

        try:
            resp = httpx.post(f"{self.server}/{endpoint}", json=payload, timeout=600.0)
        except httpx.TransportError as exc:
            print(f"error: cannot reach {self.server}: {exc}", file=sys.stderr)
            sys.exit(1)
        if resp.status_code >= 400:
            detail = resp.json().get("detail", {})
            if isinstance(detail, dict) and "exit_code" in detail:
                print(f"error: {detail.get('message', '')}", file=sys.stderr)
                sys.exit(detail["exit_code"])
            print(f"error: {resp.text}", file=sys.stderr)
            sys.exit(1)
        return resp.json()


def cmd_classify(client, args):
    res = client.call("classify", {"matrix": _load(args.file)})
    res = _plain(res)
    print(res["text"])
    if args.out:
        _emit(res["report"], args.out)
    return 0


def cmd_witness(client, args):
    res = _plain(client.call("witness", {"matrix": _load(args.file)}))
    if not res["hidden_k"]:
        print("not hidden K")
        return 1
    payload = {"kind": "witness", "gamma": res["gamma"], "X": res["X"]}
    _emit(payload, args.out)
    if args.out:
        print(f"hidden K with minimum factor {res['gamma']}; witness written to {args.out}")
    return 0


def cmd_solve(client, args):
    res = _plain(
        client.call(
            "solve",
            {
                "problem": _load(args.file),
                "method": args.method,
                "rule": args.rule,
                "oracle": args.oracle,
            },
        )
    )
    _emit(res["solution"], args.out)
    notes = []
    if res.get("pivots") is not None:
        notes.append(f"pivots={res['pivots']}")
    if res.get("oracle_checked"):
        notes.append("oracle-checked")
    if notes and args.out:
        print(", ".join(notes))
    return 0


def cmd_reduce(client, args):
    res = _plain(client.call("reduce", {"problem": _load(args.file), "target": args.target}))
    _emit(res["reduced"], args.out)
    if args.trace:
        _emit(res["trace"], args.trace)
    if args.witness_out and res.get("witness"):
        _emit(res["witness"], args.witness_out)
    return 0


def cmd_recover(client, args):
    res = _plain(
        client.call("recover", {"trace": _load(args.trace), "solution": _load(args.solution)})
    )
    _emit(res["solution"], args.out)
    if not res["verified"]:
        print("recovered solution failed verification", file=sys.stderr)
        return 1
    if args.out:
        print("recovered solution verified on the original instance")
    return 0


def cmd_uso(client, args):
    res = _plain(
        client.call(
            "uso",
            {"problem": _load(args.file), "check": args.check, "dot": bool(args.dot)},
        )
    )
    _emit(res["uso"], args.out)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(res["dot"] + "\n")
    if args.check:
        print(f"unique-sink: {'yes' if res['is_uso'] else 'NO'}")
        if not res["is_uso"]:
            return 1
    return 0


def cmd_verify(client, args):
    res = _plain(
        client.call("verify", {"problem": _load(args.file), "solution": _load(args.solution)})
    )
    print(f"valid: {'yes' if res['valid'] else 'NO'} ({res['detail']})")
    return 0 if res["valid"] else 1


def cmd_serve(client, args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _plain(res):
    """Pydantic models and dicts both arrive here; normalize to dicts."""
    if hasattr(res, "model_dump"):
        return res.model_dump(by_alias=True)
    return res


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gridcube",
        description="Exact solvers and reductions for grid LPs, GLCPs, MDPs, and stochastic games.",
    )
    parser.add_argument("--server", help="URL of a running gridcube service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="P/Z/K/stochastic-K/hidden-K report for a matrix file")
    p.add_argument("file")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("witness", help="minimum-factor hidden K witness")
    p.add_argument("file")
    p.add_argument("--out", help="write the witness JSON here")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("solve", help="solve a glcp/gridlp/mdp/game file")
    p.add_argument("file")
    p.add_argument("--method", help="glcp: pivot|brute; mdp: policy-iteration|brute-force")
    p.add_argument("--rule", default="least-index", choices=["least-index", "most-negative"])
    p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    p.add_argument("--out", help="write the solution JSON here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reduce", help="apply a reduction pipeline")
    p.add_argument("file")
    p.add_argument(
        "--target",
        required=True,
        choices=["plcp", "binary-kglcp", "hiddenk-lcp", "cube-lp", "binary-mdp", "binary-game"],
    )
    p.add_argument("--out", help="write the reduced instance here")
    p.add_argument("--trace", help="write the reduction trace here")
    p.add_argument("--witness-out", help="write the final witness here (hiddenk-lcp, cube-lp)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("recover", help="map a reduced solution back through a trace")
    p.add_argument("trace")
    p.add_argument("solution")
    p.add_argument("--out", help="write the recovered solution here")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("uso", help="orientation induced by a glcp or gridlp file")
    p.add_argument("file")
    p.add_argument("--dot", help="write a GraphViz DOT rendering here")
    p.add_argument("--check", action="store_true", help="verify the unique-sink property")
    p.add_argument("--out", help="write the USO JSON here")
    p.set_defaults(func=cmd_uso)

    p = sub.add_parser("verify", help="verify a solution file against a problem file")
    p.add_argument("file")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    client = Client(args.server)
    try:
        return args.func(client, args)
    except GridcubeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON input ({exc})", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
