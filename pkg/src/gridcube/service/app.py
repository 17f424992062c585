"""FastAPI service exposing every gridcube operation.

The handlers are thin: parse the payload, call the library, serialize
the result. The CLI calls the same ``handle_*`` functions in-process;
over HTTP, domain errors surface as JSON error bodies with a status per
error family (422 precondition, 409 degeneracy, 413 size cap).
"""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import core, games, glcp, lpgrid, mdp, reductions, serialize, uso, witness
from ..errors import (
    DegenerateInstanceError,
    GridcubeError,
    PreconditionError,
    TooLargeError,
)
from . import models

STATUS_BY_EXIT = {2: 422, 3: 409, 4: 413}


def handle_classify(matrix_payload):
    m = serialize.parse_matrix(matrix_payload)
    is_z = core.is_z_matrix(m)
    violation = core.p_violation(m)
    is_p = violation is None
    k_cert = core.k_certificate(m) if is_z else None
    report = {
        "is_z": is_z,
        "is_p": is_p,
        "is_k": is_z and k_cert is not None,
        "k_certificate": serialize.dump_vector(k_cert) if k_cert else None,
        "p_violation": None,
        "stochastic_k": None,
        "stochastic_k_violation": None,
        "hidden_k": False,
        "hidden_k_gamma": None,
        "hidden_k_witness": None,
    }
    if violation is not None:
        rows, minor = violation
        where = ", ".join(f"({j + 1},{i + 1})" for j, i in rows)
        report["p_violation"] = f"minor {minor} at rows {where}"
    try:
        form = core.as_stochastic_k(m)
        report["stochastic_k"] = {
            "gamma": serialize.dump_rational(form.gamma),
            "P": serialize.dump_matrix(form.p),
        }
    except PreconditionError as exc:
        report["stochastic_k_violation"] = str(exc)
    res = witness.compute_min_factor_witness(m)
    if res is not None:
        gamma, x = res
        report["hidden_k"] = True
        report["hidden_k_gamma"] = serialize.dump_rational(gamma)
        report["hidden_k_witness"] = serialize.dump_square(x)
    lines = [
        f"Z: {'yes' if report['is_z'] else 'no'}",
        f"P: {'yes' if report['is_p'] else 'no'}"
        + (f" ({report['p_violation']})" if report["p_violation"] else ""),
        "K: "
        + (
            f"yes (x=({', '.join(report['k_certificate'])}))"
            if report["is_k"]
            else "no"
        ),
        "stochastic-K: "
        + (
            f"yes (gamma={report['stochastic_k']['gamma']})"
            if report["stochastic_k"]
            else f"no ({report['stochastic_k_violation']})"
        ),
        "hidden-K: "
        + (f"yes (gamma*={report['hidden_k_gamma']}, X emitted)" if report["hidden_k"] else "no"),
    ]
    return {"report": report, "text": "\n".join(lines)}


def handle_witness(matrix_payload):
    m = serialize.parse_matrix(matrix_payload)
    res = witness.compute_min_factor_witness(m)
    if res is None:
        return {"hidden_k": False, "gamma": None, "X": None}
    gamma, x = res
    return {
        "hidden_k": True,
        "gamma": serialize.dump_rational(gamma),
        "X": serialize.dump_square(x),
    }


def handle_solve(problem_payload, method=None, rule="least-index", oracle=False):
    kind, problem = serialize.parse_problem(problem_payload)
    if kind == "glcp":
        return _solve_glcp(problem, method, rule, oracle)
    if kind == "gridlp":
        res = lpgrid.grid_simplex(problem, rule=rule)
        sol = serialize.dump_basis_solution(res)
        checked = False
        if oracle:
            dual_sols = glcp.brute_force_solve(lpgrid.glcp_from_grid_lp(problem))
            assert any(s.nonbasic == res.basis for s, _ in dual_sols)
            checked = True
        return {"solution": sol, "oracle_checked": checked, "pivots": res.pivots}
    if kind == "mdp":
        m = problem
        sets, v = mdp.solve_optimal(m, method=method or "policy-iteration")
        checked = False
        if oracle:
            sets_b, v_b = mdp.solve_optimal(m, method="brute-force")
            assert v_b == v and sets_b == sets
            checked = True
        return {
            "solution": serialize.dump_value_solution("mdp", v, sets),
            "oracle_checked": checked,
        }
    if kind == "game":
        g = problem
        _, v = games.strategy_iteration(g)
        sets = games.optimal_action_sets(g, v)
        checked = False
        if oracle:
            sets_b, v_b = games.solve_brute_force(g)
            assert v_b == v and sets_b == sets
            checked = True
        return {
            "solution": serialize.dump_value_solution("game", v, sets),
            "oracle_checked": checked,
        }
    raise PreconditionError(f"cannot solve files of kind {kind!r}")


def _solve_glcp(inst, method, rule, oracle):
    if method in (None, "auto"):
        try:
            res = glcp.principal_pivot_solve(inst, rule=rule)
        except DegenerateInstanceError:
            res = glcp.principal_pivot_solve(inst, rule=rule, perturb=True)
        sol, basis, pivots = res.solution, res.basis, res.pivots
    elif method == "pivot":
        res = glcp.principal_pivot_solve(inst, rule=rule)
        sol, basis, pivots = res.solution, res.basis, res.pivots
    elif method == "pivot-perturbed":
        res = glcp.principal_pivot_solve(inst, rule=rule, perturb=True)
        sol, basis, pivots = res.solution, res.basis, res.pivots
    elif method in ("brute", "brute-force"):
        sols = glcp.brute_force_solve(inst)
        if not sols:
            raise PreconditionError("instance has no solution")
        basis, sol = sols[0]
        pivots = None
    else:
        raise PreconditionError(f"unknown method {method!r} for glcp")
    checked = False
    if oracle:
        sols = glcp.brute_force_solve(inst)
        assert any(s == sol for _, s in sols)
        checked = True
    return {
        "solution": serialize.dump_glcp_solution(sol, basis),
        "oracle_checked": checked,
        "pivots": pivots,
    }


def handle_reduce(problem_payload, target):
    kind, problem = serialize.parse_problem(problem_payload)
    wit = None
    if target == "plcp":
        _require(kind == "glcp", f"target plcp needs a glcp file, got {kind}")
        reduced, trace = reductions.pglcp_to_plcp(problem)
    elif target == "binary-kglcp":
        _require(kind == "glcp", f"target binary-kglcp needs a glcp file, got {kind}")
        reduced, trace = reductions.kglcp_to_binary(problem, rhs_order=True)
    elif target == "hiddenk-lcp":
        _require(kind == "glcp", f"target hiddenk-lcp needs a glcp file, got {kind}")
        res = witness.compute_min_factor_witness(problem.m)
        _require(res is not None, "matrix is not hidden K")
        reduced, x_final, trace = reductions.hiddenk_glcp_to_hiddenk_lcp(problem, res[1])
        wit = {"kind": "witness", "X": serialize.dump_square(x_final)}
    elif target == "cube-lp":
        _require(kind == "gridlp", f"target cube-lp needs a gridlp file, got {kind}")
        reduced, x_final, trace = reductions.grid_lp_to_cube_lp(problem)
        wit = {"kind": "witness", "X": serialize.dump_square(x_final)}
    elif target == "binary-mdp":
        _require(kind == "mdp", f"target binary-mdp needs an mdp file, got {kind}")
        reduced, trace = reductions.mdp_to_binary_mdp(problem)
    elif target == "binary-game":
        _require(kind == "game", f"target binary-game needs a game file, got {kind}")
        reduced, records = games.game_to_binary(problem)
        trace = serialize.game_trace(problem, records)
    else:
        raise PreconditionError(f"unknown target {target!r}")
    return {
        "reduced": serialize.dump_problem(reduced),
        "trace": serialize.dump_trace(trace),
        "witness": wit,
    }


def _require(cond, message):
    if not cond:
        raise PreconditionError(message)


def handle_recover(trace_payload, solution_payload):
    trace = serialize.parse_trace(trace_payload)
    sol = serialize.parse_solution(solution_payload)
    recovered = trace.recover(sol)
    original = trace.original
    if isinstance(recovered, reductions.GlcpSol):
        solution = glcp.GLCPSolution.of(recovered.w, recovered.z)
        verified = glcp.verify_solution(original, solution)
        payload = serialize.dump_glcp_solution(solution)
    elif isinstance(recovered, reductions.ValueSol):
        if isinstance(original, games.StochasticGame):
            verified = games.check_optimality(original, recovered.v)
            sets = games.optimal_action_sets(original, recovered.v)
            payload = serialize.dump_value_solution("game", recovered.v, sets)
        else:
            verified = mdp.is_optimal(original, recovered.v)
            sets = mdp.argmax_actions(original, recovered.v)
            payload = serialize.dump_value_solution("mdp", recovered.v, sets)
    elif isinstance(recovered, reductions.BasisSol):
        point = lpgrid.basis_point(original, recovered.vertex)
        verified = point is not None and all(v > 0 for v in point)
        if verified:
            rc = lpgrid.reduced_costs(original, recovered.vertex)
            verified = all(v >= 0 for v in rc.values())
        payload = serialize.dump_basis_solution(
            lpgrid.SimplexResult(recovered.vertex, recovered.u, recovered.value, 0)
        )
    else:
        raise PreconditionError("unsupported recovered solution type")
    return {"solution": payload, "verified": verified}


def handle_uso(problem_payload, check=False, dot=False):
    kind, problem = serialize.parse_problem(problem_payload)
    if kind == "glcp":
        o = uso.uso_from_glcp(problem)
    elif kind == "gridlp":
        o = uso.uso_from_grid_lp(problem)
    elif kind == "uso":
        o = problem
    else:
        raise PreconditionError(f"cannot orient files of kind {kind!r}")
    out = {"uso": serialize.dump_uso(o), "is_uso": None, "dot": None, "sink": None}
    if check:
        out["is_uso"] = uso.is_uso(o)
    if dot:
        out["dot"] = uso.to_dot(o)
    sinks = [v for v, moves in o.out.items() if not moves]
    if len(sinks) == 1:
        out["sink"] = [[j + 1, i + 1] for j, i in enumerate(sinks[0])]
    return out


def handle_verify(problem_payload, solution_payload):
    kind, problem = serialize.parse_problem(problem_payload)
    if kind == "glcp":
        sol = serialize.parse_glcp_solution(solution_payload)
        ok = glcp.verify_solution(problem, glcp.GLCPSolution.of(sol.w, sol.z))
        return {"valid": ok, "detail": "glcp solution check"}
    if kind == "mdp":
        sol = serialize.parse_value_solution(solution_payload)
        return {"valid": mdp.is_optimal(problem, sol.v), "detail": "Bellman equations"}
    if kind == "game":
        sol = serialize.parse_value_solution(solution_payload)
        return {
            "valid": games.check_optimality(problem, sol.v),
            "detail": "two-player optimality equations",
        }
    if kind == "gridlp":
        sol = serialize.parse_basis_solution(solution_payload)
        point = lpgrid.basis_point(problem, sol.vertex)
        ok = point is not None and all(v > 0 for v in point)
        if ok:
            rc = lpgrid.reduced_costs(problem, sol.vertex)
            ok = all(v >= 0 for v in rc.values())
        return {"valid": ok, "detail": "feasible basis with nonnegative reduced costs"}
    raise PreconditionError(f"cannot verify files of kind {kind!r}")


def create_app():
    app = FastAPI(title="gridcube", version="0.1.0")

    @app.exception_handler(GridcubeError)
    async def domain_error(request: Request, exc: GridcubeError):
        status = STATUS_BY_EXIT.get(exc.exit_code, 400)
        return JSONResponse(
            status_code=status,
            content={
                "detail": {
                    "type": type(exc).__name__,
                    "message": str(exc),
                    "exit_code": exc.exit_code,
                }
            },
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/classify", response_model=models.ClassifyResponse)
    def classify(req: models.ClassifyRequest):
        return handle_classify(req.matrix.model_dump())

    @app.post("/witness", response_model=models.WitnessResponse, response_model_by_alias=True)
    def witness_ep(req: models.WitnessRequest):
        return handle_witness(req.matrix.model_dump())

    @app.post("/solve", response_model=models.SolveResponse)
    def solve(req: models.SolveRequest):
        return handle_solve(
            req.problem.model_dump(exclude_none=True), req.method, req.rule, req.oracle
        )

    @app.post("/reduce", response_model=models.ReduceResponse)
    def reduce_ep(req: models.ReduceRequest):
        return handle_reduce(req.problem.model_dump(exclude_none=True), req.target)

    @app.post("/recover", response_model=models.RecoverResponse)
    def recover(req: models.RecoverRequest):
        return handle_recover(req.trace, req.solution)

    @app.post("/uso", response_model=models.UsoResponse)
    def uso_ep(req: models.UsoRequest):
        return handle_uso(req.problem.model_dump(exclude_none=True), req.check, req.dot)

    @app.post("/verify", response_model=models.VerifyResponse)
    def verify(req: models.VerifyRequest):
        return handle_verify(req.problem.model_dump(exclude_none=True), req.solution)

    return app


app = create_app()
