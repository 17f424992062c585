"""JSON schemas for problems, solutions, witnesses, USOs, and traces.

Rationals travel as "p/q" strings (bare integers are accepted on input);
all indices are 1-based on the wire and 0-based in memory. Parsing and
dumping round-trip exactly, so files can be diffed.
"""

from fractions import Fraction

from . import core, games, glcp, lpgrid, mdp, reductions, uso
from .errors import PreconditionError


def parse_rational(x):
    if isinstance(x, bool) or isinstance(x, float):
        raise PreconditionError(f"rationals must be strings or integers, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"cannot parse rational {x!r}") from exc


def dump_rational(x):
    return str(Fraction(x))


def parse_vector(xs):
    return [parse_rational(x) for x in xs]


def dump_vector(xs):
    return [dump_rational(x) for x in xs]


def parse_square(rows):
    return [parse_vector(r) for r in rows]


def dump_square(rows):
    return [dump_vector(r) for r in rows]


# ---------------------------------------------------------------------------
# problems


def parse_matrix(d):
    if "blocks" not in d:
        raise PreconditionError("matrix JSON needs a 'blocks' field")
    return core.BlockMatrix([[parse_vector(row) for row in blk] for blk in d["blocks"]])


def dump_matrix(m):
    return {
        "kind": "matrix",
        "blocks": [[dump_vector(row) for row in blk] for blk in m.blocks],
    }


def parse_glcp(d):
    return glcp.GLCPInstance(parse_matrix(d["M"]), parse_vector(d["q"]))


def dump_glcp(inst):
    return {"kind": "glcp", "M": dump_matrix(inst.m), "q": dump_vector(inst.q)}


def parse_gridlp(d):
    return lpgrid.GridLP(parse_matrix(d["M"]), tuple(parse_vector(d["p"])), tuple(parse_vector(d["q"])))


def dump_gridlp(lp):
    return {
        "kind": "gridlp",
        "M": dump_matrix(lp.m),
        "p": dump_vector(lp.p),
        "q": dump_vector(lp.q),
    }


def _parse_mdp_parts(d):
    blocks = []
    rewards = []
    for state in d["states"]:
        rows = []
        for action in state["actions"]:
            rows.append(parse_vector(action["probs"]))
            rewards.append(parse_rational(action["reward"]))
        blocks.append(rows)
    return core.BlockMatrix(blocks), tuple(rewards), parse_rational(d["gamma"])


def parse_mdp(d):
    p, r, gamma = _parse_mdp_parts(d)
    return mdp.DiscountedMDP(p, r, gamma)


def _dump_states(p, r):
    states = []
    pos = 0
    for block in p.blocks:
        actions = []
        for row in block:
            actions.append({"reward": dump_rational(r[pos]), "probs": dump_vector(row)})
            pos += 1
        states.append({"actions": actions})
    return states


def dump_mdp(m):
    return {"kind": "mdp", "gamma": dump_rational(m.gamma), "states": _dump_states(m.p, m.r)}


def parse_game(d):
    p, r, gamma = _parse_mdp_parts(d)
    return games.StochasticGame(p, r, gamma, tuple(d["owner"]))


def dump_game(g):
    out = dump_mdp(g.as_mdp())
    out["kind"] = "game"
    out["owner"] = list(g.owner)
    return out


def vertex_key(vertex):
    return "|".join(f"{j + 1},{i + 1}" for j, i in enumerate(vertex))


def parse_vertex_key(key):
    picks = []
    for part in key.split("|"):
        j, i = part.split(",")
        picks.append(int(i) - 1)
    return tuple(picks)


def parse_uso(d):
    out = {
        parse_vertex_key(k): frozenset((j - 1, i - 1) for j, i in moves)
        for k, moves in d["out"].items()
    }
    return uso.GridUSO(tuple(d["b"]), out)


def dump_uso(o):
    return {
        "kind": "uso",
        "b": list(o.b),
        "out": {
            vertex_key(v): sorted([j + 1, k + 1] for j, k in o.out[v]) for v in sorted(o.out)
        },
    }


def parse_witness_x(d):
    return parse_square(d["X"])


def dump_witness(gamma, x):
    return {"kind": "witness", "gamma": dump_rational(gamma), "X": dump_square(x)}


PROBLEM_PARSERS = {
    "matrix": parse_matrix,
    "glcp": parse_glcp,
    "gridlp": parse_gridlp,
    "mdp": parse_mdp,
    "game": parse_game,
    "uso": parse_uso,
}


def sniff_kind(d):
    if "kind" in d:
        return d["kind"]
    if "blocks" in d:
        return "matrix"
    if "states" in d:
        return "game" if "owner" in d else "mdp"
    if "M" in d and "p" in d:
        return "gridlp"
    if "M" in d and "q" in d:
        return "glcp"
    if "out" in d and "b" in d:
        return "uso"
    if "steps" in d:
        return "trace"
    raise PreconditionError("cannot determine the kind of the input file")


def _guard(fn, d, what):
    try:
        return fn(d)
    except (KeyError, TypeError, ValueError, AttributeError, IndexError) as exc:
        raise PreconditionError(f"malformed {what} document: {exc!r}") from exc


def parse_problem(d):
    kind = sniff_kind(d)
    if kind == "trace":
        return kind, _guard(parse_trace, d, "trace")
    if kind not in PROBLEM_PARSERS:
        raise PreconditionError(f"unsupported kind {kind!r}")
    return kind, _guard(PROBLEM_PARSERS[kind], d, kind)


def dump_problem(obj):
    if isinstance(obj, core.BlockMatrix):
        return dump_matrix(obj)
    if isinstance(obj, glcp.GLCPInstance):
        return dump_glcp(obj)
    if isinstance(obj, lpgrid.GridLP):
        return dump_gridlp(obj)
    if isinstance(obj, games.StochasticGame):
        return dump_game(obj)
    if isinstance(obj, mdp.DiscountedMDP):
        return dump_mdp(obj)
    if isinstance(obj, uso.GridUSO):
        return dump_uso(obj)
    raise PreconditionError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# solutions


def dump_glcp_solution(sol, basis=None):
    out = {
        "kind": "glcp-solution",
        "w": [dump_vector(block) for block in sol.w],
        "z": dump_vector(sol.z),
    }
    if basis is not None:
        out["basis"] = [[j + 1, i + 1] for j, i in enumerate(basis.nonbasic)]
    return out


def parse_glcp_solution(d):
    w = tuple(tuple(parse_vector(block)) for block in d["w"])
    z = tuple(parse_vector(d["z"]))
    return reductions.GlcpSol(w, z)


def dump_value_solution(kind, values, optimal_actions=None):
    out = {"kind": f"{kind}-solution", "values": dump_vector(values)}
    if optimal_actions is not None:
        out["optimal_actions"] = [[i + 1 for i in acts] for acts in optimal_actions]
    return out


def parse_value_solution(d):
    return reductions.ValueSol(tuple(parse_vector(d["values"])))


def dump_basis_solution(result):
    return {
        "kind": "gridlp-solution",
        "basis": [[j + 1, i + 1] for j, i in enumerate(result.basis)],
        "u": dump_vector(result.u),
        "value": dump_rational(result.value),
    }


def parse_basis_solution(d):
    vertex = tuple(i - 1 for _, i in d["basis"])
    u = tuple(parse_vector(d["u"]))
    return reductions.BasisSol(vertex, u, parse_rational(d["value"]))


def parse_solution(d):
    kind = d.get("kind", "") if hasattr(d, "get") else ""
    if kind == "glcp-solution":
        return _guard(parse_glcp_solution, d, kind)
    if kind in ("mdp-solution", "game-solution"):
        return _guard(parse_value_solution, d, kind)
    if kind == "gridlp-solution":
        return _guard(parse_basis_solution, d, kind)
    raise PreconditionError(f"unsupported solution kind {kind!r}")


# ---------------------------------------------------------------------------
# traces


def dump_step(step):
    k = step.kind
    if k == "glcp_scale":
        return {"kind": k, "left": dump_vector(step.left), "right": dump_vector(step.right)}
    if k == "permute_rows":
        return {"kind": k, "block": step.block + 1, "perm": [t + 1 for t in step.perm]}
    if k in ("p_split", "k_split"):
        return {"kind": k, "block": step.block + 1}
    if k == "hiddenk_to_k":
        return {"kind": k, "X": dump_square(step.x), "f": dump_vector(step.f)}
    if k == "k_to_hiddenk":
        return {"kind": k, "C": [[j + 1, i + 1] for j, i in enumerate(step.picks)]}
    if k == "mdp_to_kglcp":
        return {"kind": k, "d": dump_rational(step.d)}
    if k in ("kglcp_to_mdp", "grid_lp_to_glcp"):
        return {"kind": k}
    if k == "glcp_to_grid_lp":
        return {"kind": k, "p": dump_vector(step.p)}
    if k == "game_split":
        return {
            "kind": k,
            "state": step.state + 1,
            "owner": step.owner,
            "delta": dump_rational(step.delta),
            "n_before": step.n_before,
        }
    raise PreconditionError(f"cannot serialize step {k!r}")


def parse_step(d):
    k = d["kind"]
    if k == "glcp_scale":
        return reductions.GlcpScale(tuple(parse_vector(d["left"])), tuple(parse_vector(d["right"])))
    if k == "permute_rows":
        return reductions.PermuteRows(d["block"] - 1, tuple(t - 1 for t in d["perm"]))
    if k == "p_split":
        return reductions.PSplit(d["block"] - 1)
    if k == "k_split":
        return reductions.KSplit(d["block"] - 1)
    if k == "hiddenk_to_k":
        return reductions.HiddenkToK(
            tuple(tuple(r) for r in parse_square(d["X"])), tuple(parse_vector(d["f"]))
        )
    if k == "k_to_hiddenk":
        return reductions.KToHiddenk(tuple(i - 1 for _, i in d["C"]))
    if k == "mdp_to_kglcp":
        return reductions.MdpToKglcp(parse_rational(d["d"]))
    if k == "kglcp_to_mdp":
        return reductions.KglcpToMdp()
    if k == "grid_lp_to_glcp":
        return reductions.GridLpToGlcp()
    if k == "glcp_to_grid_lp":
        return reductions.GlcpToGridLp(tuple(parse_vector(d["p"])))
    if k == "game_split":
        return GameSplitStep(
            d["state"] - 1, d["owner"], parse_rational(d["delta"]), d["n_before"]
        )
    raise PreconditionError(f"unsupported step kind {k!r}")


class GameSplitStep(games.SplitRecord):
    """SplitRecord adapter with the step apply/recover interface."""

    kind = "game_split"

    def apply(self, g):
        out, rec = games.game_split_step(g, self.state)
        if (rec.delta, rec.n_before) != (self.delta, self.n_before):
            raise PreconditionError("trace does not match the game being replayed")
        return out

    def recover(self, before, s):
        return reductions.ValueSol(games.recover_split_values(self, s.v))


def game_trace(g, records):
    steps = tuple(GameSplitStep(r.state, r.owner, r.delta, r.n_before) for r in records)
    return reductions.ReductionTrace(g, steps)


def dump_trace(trace):
    return {
        "kind": "trace",
        "original": dump_problem(trace.original),
        "steps": [dump_step(s) for s in trace.steps],
    }


def parse_trace(d):
    _, original = parse_problem(d["original"])
    steps = tuple(parse_step(s) for s in d["steps"])
    return reductions.ReductionTrace(original, steps)
