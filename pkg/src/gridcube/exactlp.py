"""Self-contained exact-arithmetic LP solver.

Two-phase tableau simplex over rationals with Bland's least-index rule,
which makes every solve finite and cycle-free. Free variables are split,
every row receives an artificial in phase one, and certificates are
produced for the infeasible (Farkas vector) and unbounded (ray) outcomes.
Built for correctness at desk scale, not for speed.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .errors import DimensionError

LE, GE, EQ = "<=", ">=", "=="


@dataclass
class LinearProgram:
    direction: str = "min"  # "min" | "max"
    objective: list = field(default_factory=list)
    rows: list = field(default_factory=list)  # (coeffs, sense, rhs)
    nonneg: list = field(default_factory=list)  # per variable; False = free

    def add_var(self, obj=0, nonneg=True):
        self.objective.append(linalg.to_fraction(obj))
        self.nonneg.append(bool(nonneg))
        return len(self.objective) - 1

    def add_row(self, coeffs, sense, rhs):
        if sense not in (LE, GE, EQ):
            raise DimensionError(f"unknown sense {sense!r}")
        row = [linalg.to_fraction(c) for c in coeffs]
        if len(row) != len(self.objective):
            raise DimensionError("constraint width differs from variable count")
        self.rows.append((row, sense, linalg.to_fraction(rhs)))


@dataclass
class LPOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction = None
    x: list = None
    basis: tuple = None  # labels of basic columns at the optimum
    certificate: list = None  # Farkas vector or unbounded ray (original vars)


def _pivot(tab, r, c):
    pr = tab[r]
    pv = pr[c]
    tab[r] = [x / pv for x in pr]
    pr = tab[r]
    for i, row in enumerate(tab):
        if i != r and row[c] != 0:
            f = row[c]
            tab[i] = [x - f * y for x, y in zip(row, pr)]


def _run_simplex(tab, basis, costs, ncols):
    """Bland simplex on tableau rows [A | b]; returns entering col on unbounded."""
    nrows = len(tab)
    while True:
        duals = [costs[basis[i]] for i in range(nrows)]
        entering = None
        for j in range(ncols):
            red = costs[j] - sum(duals[i] * tab[i][j] for i in range(nrows))
            if red < 0:
                entering = j
                break
        if entering is None:
            return None
        leave = None
        best = None
        for i in range(nrows):
            if tab[i][entering] > 0:
                ratio = tab[i][ncols] / tab[i][entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return entering
        _pivot(tab, leave, entering)
        basis[leave] = entering


def solve(lp):
    """Classify and solve an exact LP; never raises on well-formed input."""
    nvars = len(lp.objective)
    minimize = lp.direction != "max"
    # Column layout: one or two columns per original variable, then slacks.
    col_var = []  # (var index, sign) per structural column
    for j, nn in enumerate(lp.nonneg):
        col_var.append((j, 1))
        if not nn:
            col_var.append((j, -1))
    nstruct = len(col_var)
    nslack = sum(1 for _, sense, _ in lp.rows if sense != EQ)
    ncols = nstruct + nslack
    nrows = len(lp.rows)

    tab = []
    srow = 0
    for coeffs, sense, rhs in lp.rows:
        row = [coeffs[j] * s for j, s in col_var]
        row += [Fraction(0)] * nslack
        if sense != EQ:
            row[nstruct + srow] = Fraction(1 if sense == LE else -1)
            srow += 1
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
        tab.append(row + [rhs])
    # Artificial basis: one per row, columns ncols..ncols+nrows-1.
    for i in range(nrows):
        tab[i] = tab[i][:ncols] + [Fraction(int(k == i)) for k in range(nrows)] + [tab[i][ncols]]
    total = ncols + nrows
    basis = [ncols + i for i in range(nrows)]

    # Phase one: minimize the sum of artificials.
    art_costs = [Fraction(0)] * ncols + [Fraction(1)] * nrows
    _run_simplex(tab, basis, art_costs, total)
    infeas = sum(tab[i][total] for i in range(nrows) if basis[i] >= ncols)
    if infeas > 0:
        # Farkas vector from phase-one duals: y A <= 0 columnwise, y b > 0.
        y = [sum(art_costs[basis[i]] * tab[i][ncols + r] for i in range(nrows)) for r in range(nrows)]
        return LPOutcome(status="infeasible", certificate=y)
    # Drive leftover artificials out of the basis; drop redundant rows.
    keep = []
    for i in range(nrows):
        if basis[i] >= ncols:
            piv = next((j for j in range(ncols) if tab[i][j] != 0), None)
            if piv is None:
                continue  # redundant row
            _pivot(tab, i, piv)
            basis[i] = piv
        keep.append(i)
    tab = [tab[i][:ncols] + [tab[i][total]] for i in keep]
    basis = [basis[i] for i in keep]
    nrows = len(tab)

    costs = [Fraction(0)] * ncols
    for c, (j, s) in enumerate(col_var):
        costs[c] = lp.objective[j] * s * (1 if minimize else -1)
    entering = _run_simplex(tab, basis, costs, ncols)
    if entering is not None:
        ray = [Fraction(0)] * nvars
        j, s = col_var[entering] if entering < nstruct else (None, None)
        if j is not None:
            ray[j] += s
        for i in range(nrows):
            if basis[i] < nstruct and tab[i][entering] != 0:
                bj, bs = col_var[basis[i]]
                ray[bj] -= bs * tab[i][entering]
        return LPOutcome(status="unbounded", certificate=ray)

    x = [Fraction(0)] * nvars
    for i in range(nrows):
        if basis[i] < nstruct:
            j, s = col_var[basis[i]]
            x[j] += s * tab[i][ncols]
    value = sum(c * v for c, v in zip(lp.objective, x))
    labels = []
    for bi in sorted(basis):
        if bi < nstruct:
            labels.append(("x", col_var[bi][0]))
        else:
            labels.append(("slack", bi - nstruct))
    return LPOutcome(status="optimal", value=value, x=x, basis=tuple(labels))


def strict_feasibility(a_rows):
    """Find x > 0 with Ax > 0, or None.

    Solves max t subject to Ax >= t, x >= t, t <= 1; by homogeneity the
    strict system is feasible exactly when the optimum is positive. The
    returned certificate is re-verified componentwise before returning.
    """
    rows = [linalg.vec(r) for r in a_rows]
    n = len(rows[0]) if rows else 0
    lp = LinearProgram(direction="max")
    for _ in range(n):
        lp.add_var(0, nonneg=False)
    t = lp.add_var(1, nonneg=False)
    for r in rows:
        lp.add_row(list(r) + [Fraction(-1)], GE, 0)
    for j in range(n):
        coeffs = [Fraction(0)] * (n + 1)
        coeffs[j] = Fraction(1)
        coeffs[t] = Fraction(-1)
        lp.add_row(coeffs, GE, 0)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[t] = Fraction(1)
    lp.add_row(coeffs, LE, 1)
    out = solve(lp)
    if out.status != "optimal" or out.x[t] <= 0:
        return None
    x = out.x[:n]
    assert all(v > 0 for v in x)
    assert all(linalg.dot(r, x) > 0 for r in rows)
    return x
