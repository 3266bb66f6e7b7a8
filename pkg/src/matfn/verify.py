"""Randomized residual suites over seeded corpora.

Every check builds an identity's two sides through genuinely different
code paths (interpolation vs closed forms, symbolic vs finite
differences, tensor pairing vs enumeration) and records the residual
against a pinned bound. The command line's ``verify`` subcommand and the
acceptance tests both run these functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import algebraic_ops as aops
from . import antisym as asym
from . import calculus as calc
from . import scalarfield as sf
from .funcalc import (
    chain_contract,
    f_otimes,
    f_otimes_diagonalizable,
    jordan_closed_form,
    jordan_matrix,
    matrix_function,
)
from .scalarfield import MultiPoly, parse_field
from .spectral import analyze, minimal_polynomial
from .tensor import poly_tensor_eval


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    residual: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.bound

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (
            f"[{status}] {self.suite}/{self.name}: "
            f"residual {self.residual:.6e} vs bound {self.bound:.6e}"
        )


# ---------------------------------------------------------------------------
# corpus generators


def _separated_points(rng, count, min_gap=0.4, real=False, box=2.0):
    for _ in range(200):
        if real:
            pts = box * (2 * rng.random(count) - 1)
            pts = pts.astype(complex)
        else:
            pts = box * (2 * rng.random(count) - 1) + 1j * (2 * rng.random(count) - 1)
        ok = True
        for a, b in itertools.combinations(pts, 2):
            if abs(a - b) < min_gap:
                ok = False
                break
        if ok:
            return [complex(p) for p in pts]
    raise RuntimeError("could not draw separated points")


def _conjugator(rng, d, skew=0.25):
    Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    return Q @ (np.eye(d) + skew * rng.normal(size=(d, d)))


def random_diagonalizable(rng, d, *, min_gap=0.4, real_spectrum=False):
    lams = _separated_points(rng, d, min_gap=min_gap, real=real_spectrum)
    V = _conjugator(rng, d)
    return V @ np.diag(lams) @ np.linalg.inv(V)


def random_jordan_blocks(rng, *, max_dim=4, max_block=3):
    """Block list for a random Jordan matrix, eigenvalues well separated."""
    dim = int(rng.integers(2, max_dim + 1))
    sizes = []
    left = dim
    while left > 0:
        s = int(rng.integers(1, min(max_block, left) + 1))
        sizes.append(s)
        left -= s
    lams = _separated_points(rng, len(sizes), min_gap=0.5)
    return list(zip(lams, sizes))


def random_symmetric(rng, d, scale=1.0):
    A = rng.normal(size=(d, d)) * scale
    return (A + A.T) / 2


_X = sf.variable(0, 1)


def _pool_univariate():
    return [
        _X**2,
        _X**3 - 2 * _X,
        sf.exp(_X),
        1 / (_X + 5),
        sf.exp(-1 * _X) + _X**2,
    ]


def _pool_bivariate():
    x1, x2 = sf.variable(0, 2), sf.variable(1, 2)
    return [
        x1 * x2,
        x1 + x2,
        (x1 + x2) ** 2,
        sf.exp(x1 + x2),
        1 / (x1 + x2 + 5),
        x1**2 * x2 - x2 + 1,
    ]


def _pool_trivariate():
    x1, x2, x3 = (sf.variable(i, 3) for i in range(3))
    # exp is damped so matrix views stay small enough for the absolute
    # commutator bound in the product suite
    return [
        x1 * x2 * x3,
        x1 + x2 + x3,
        sf.exp(0.5 * (x1 + x2 + x3)),
        x1 * x3 + x2**2,
    ]


def _pool_quadrivariate():
    xs = [sf.variable(i, 4) for i in range(4)]
    total = xs[0] + xs[1] + xs[2] + xs[3]
    return [
        xs[0] * xs[1] * xs[2] * xs[3],
        total,
        total**2,
        xs[0] * xs[2] + xs[1] * xs[3],
    ]


def _pool(k):
    return {
        1: _pool_univariate(),
        2: _pool_bivariate(),
        3: _pool_trivariate(),
        4: _pool_quadrivariate(),
    }[k]


# ---------------------------------------------------------------------------
# finite differences


_RICHARDSON_STEPS = {1: 1e-3, 2: 1e-2, 3: 5e-2}


def _central_difference(F, z, h, n):
    if n == 1:
        return (F(z + h) - F(z - h)) / (2 * h)
    if n == 2:
        return (F(z + h) - 2 * F(z) + F(z - h)) / h**2
    if n == 3:
        return (F(z + 2 * h) - 2 * F(z + h) + 2 * F(z - h) - F(z - 2 * h)) / (2 * h**3)
    raise ValueError("orders 1..3 only")


def richardson_derivative(F, z, n, h=None):
    """Central differences at h and h/2, extrapolated one step."""
    if h is None:
        h = _RICHARDSON_STEPS[n]
    coarse = _central_difference(F, z, h, n)
    fine = _central_difference(F, z, h / 2, n)
    return (4 * fine - coarse) / 3


# ---------------------------------------------------------------------------
# suites


def suite_paths(seed, trials=30):
    """Route agreement: Jordan closed form, eigenbasis sum, chain identities."""
    out = []
    rng = np.random.default_rng(seed)
    k_cycle = [1, 2]
    for t in range(trials):
        k = k_cycle[t % len(k_cycle)]
        blocks = [random_jordan_blocks(rng, max_dim=4, max_block=3) for _ in range(k)]
        mats = [jordan_matrix(b) for b in blocks]
        f = _pool(k)[int(rng.integers(len(_pool(k))))]
        via_interp = f_otimes(f, mats)
        via_jordan = jordan_closed_form(f, mats, blocks)
        scale = max(via_jordan.hs_norm(), 1e-30)
        res = float(np.linalg.norm(via_interp.data - via_jordan.data)) / scale
        out.append(CheckResult("paths", f"jordan-{t}", res, 1e-8))
    for t in range(trials):
        k = k_cycle[t % len(k_cycle)]
        dims = [int(rng.integers(2, 5)) for _ in range(k)]
        mats = [random_diagonalizable(rng, d) for d in dims]
        f = _pool(k)[int(rng.integers(len(_pool(k))))]
        via_interp = f_otimes(f, mats)
        via_diag = f_otimes_diagonalizable(f, mats)
        scale = max(via_diag.hs_norm(), 1e-30)
        res = float(np.linalg.norm(via_interp.data - via_diag.data)) / scale
        out.append(CheckResult("paths", f"diag-{t}", res, 1e-8))

    # Chain contraction: the unique solution of A X + X B = 1 comes from
    # the tensor extension of 1/(x1 + x2).
    for t in range(4):
        d = int(rng.integers(2, 4))
        A = random_diagonalizable(rng, d) + 2.5 * np.eye(d)
        B = random_diagonalizable(rng, d) + 2.5 * np.eye(d)
        inv_sum = parse_field("1/(x1 + x2)")
        X = chain_contract(f_otimes(inv_sum, [A, B]))
        res = float(np.linalg.norm(A @ X + X @ B - np.eye(d)))
        out.append(CheckResult("paths", f"sylvester-{t}", res, 1e-8))
        sq = parse_field("(x1 + x2)^2")
        S = chain_contract(f_otimes(sq, [A, B]))
        expected = A @ A + 2 * A @ B + B @ B
        res2 = float(np.linalg.norm(S - expected)) / max(np.linalg.norm(expected), 1.0)
        out.append(CheckResult("paths", f"chain-square-{t}", res2, 1e-10))
    return out


def suite_product(seed, trials=20):
    out = []
    rng = np.random.default_rng(seed)
    k_cycle = [1, 2, 3, 2]
    for t in range(trials):
        k = k_cycle[t % len(k_cycle)]
        mats = []
        for _ in range(k):
            d = int(rng.integers(2, 4))
            if rng.random() < 0.25:
                mats.append(jordan_matrix(random_jordan_blocks(rng, max_dim=d if d > 1 else 2)))
            else:
                mats.append(random_diagonalizable(rng, d))
        pool = _pool(k)
        f1 = pool[int(rng.integers(len(pool)))]
        f2 = pool[int(rng.integers(len(pool)))]
        check = aops.product_identity_check(f1, f2, mats)
        out.append(
            CheckResult("product", f"product-{t}", check.product_residual, 1e-8 * check.scale)
        )
        out.append(CheckResult("product", f"commutator-{t}", check.commutator_norm, 1e-8))
    return out


def _compose_instance(rng, r, defective):
    """Inner fields and matrix groups whose derived values separate well.

    The outer interpolation grid lives on values of the inner fields at
    eigenvalue tuples, so instances where two such values nearly collide
    (without exactly colliding) are redrawn: they test conditioning, not
    the identity.
    """
    x1 = sf.variable(0, 2)
    x2 = sf.variable(1, 2)
    inner_pools = {
        1: [_X**2, _X**3 - 2 * _X, 1 / (_X + 5), _X**2 - _X],
        2: [x1 * x2, x1 + x2, x1**2 * x2 - x2 + 1, 1 / (x1 + x2 + 5)],
    }
    for _ in range(60):
        inners = []
        groups = []
        ok = True
        for q in range(r):
            kq = 1 + int(rng.integers(2))
            pool = inner_pools[kq]
            fq = pool[int(rng.integers(len(pool)))]
            grp = []
            for j in range(kq):
                if defective and q == 0 and j == 0:
                    grp.append(jordan_matrix([(complex(rng.normal()), 2)]))
                else:
                    d = int(rng.integers(2, 4))
                    grp.append(random_diagonalizable(rng, d, min_gap=0.4))
            spectra = [analyze(M) for M in grp]
            derived = aops.derived_spectrum(fq, spectra)
            vals = derived.values
            if max(abs(v) for v in vals) > 3.0:
                ok = False
                break
            if any(
                abs(a - b) < 0.05 for a, b in itertools.combinations(vals, 2)
            ):
                ok = False
                break
            inners.append(fq)
            groups.append(grp)
        if ok:
            return inners, groups
    raise RuntimeError("could not draw a well-separated composition instance")


def suite_compose(seed, trials=10):
    out = []
    rng = np.random.default_rng(seed)
    x1_of_2, x2_of_2 = sf.variable(0, 2), sf.variable(1, 2)
    for t in range(trials):
        r = 1 + t % 2
        if r == 1:
            g = [_X**2, sf.exp(_X), _X**3][t % 3]
        else:
            g = [x1_of_2 * x2_of_2, x1_of_2 + x2_of_2, (x1_of_2 + x2_of_2) ** 2][t % 3]
        inners, groups = _compose_instance(rng, r, defective=(t == trials - 1))
        check = aops.compose_identity_check(g, inners, groups)
        out.append(CheckResult("compose", f"compose-{t}", check.residual, 1e-7))
    return out


def suite_contr(seed, trials=8):
    out = []
    rng = np.random.default_rng(seed)
    for t in range(trials):
        k = 2 + t % 2
        dims = [int(rng.integers(2, 4)) for _ in range(k)]
        mats = [random_diagonalizable(rng, d) for d in dims]
        pool = _pool(k)
        f = pool[int(rng.integers(len(pool)))]
        slot = t % k
        check = aops.contract_trace_theorem(f, mats, slot)
        out.append(CheckResult("contr", f"trace-{t}", check.residual, 1e-8))
    for t in range(trials):
        k = 2 + t % 2
        if t % 3 == 0:
            shared = jordan_matrix(random_jordan_blocks(rng, max_dim=3, max_block=2))
        else:
            shared = random_diagonalizable(rng, int(rng.integers(2, 4)))
        d = shared.shape[0]
        mats = [shared] + (
            [random_diagonalizable(rng, int(rng.integers(2, 4)))] if k == 3 else []
        ) + [shared]
        pool = _pool(k)
        f = pool[int(rng.integers(len(pool)))]
        check = aops.contract_equal_slots_theorem(f, mats, 0, k - 1)
        out.append(CheckResult("contr", f"equal-orders-{t}", check.order_residual, 1e-8))
        out.append(CheckResult("contr", f"equal-reduced-{t}", check.reduced_residual, 1e-8))
    for t in range(trials // 2):
        d = int(rng.integers(2, 4))
        M = random_diagonalizable(rng, d)
        N = 0.7 * M @ M - 1.3 * M + 0.4 * np.eye(d)
        f = _pool(2)[int(rng.integers(len(_pool(2))))]
        check = aops.commuting_swap_check(f, [M, N], 0, 1)
        out.append(CheckResult("contr", f"swap-{t}", check.residual, 1e-8))
    return out


def suite_diff(seed, trials=6):
    out = []
    rng = np.random.default_rng(seed)

    # directional derivative against central differences
    for t in range(trials):
        k = 1 + t % 2
        dims = [int(rng.integers(2, 4)) for _ in range(k)]
        mats = [random_diagonalizable(rng, d) for d in dims]
        slot = t % k
        H = rng.normal(size=mats[slot].shape) + 1j * rng.normal(size=mats[slot].shape)
        H /= np.linalg.norm(H)
        pool = _pool(k)
        f = pool[int(rng.integers(len(pool)))]
        D = calc.frechet_derivative(f, mats, slot, H)
        h = 1e-5

        def shifted(step):
            moved = list(mats)
            moved[slot] = mats[slot] + step * H
            return f_otimes(f, moved).data

        fd = (shifted(h) - shifted(-h)) / (2 * h)
        rel = float(np.linalg.norm(D.data - fd)) / max(float(np.linalg.norm(D.data)), 1e-12)
        out.append(CheckResult("diff", f"frechet-fd-{t}", rel, 1e-6))

    # curve derivatives against Richardson extrapolation
    for t in range(trials):
        n = 1 + t % 3
        d = int(rng.integers(2, 4))
        M = random_diagonalizable(rng, d)
        H = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        H /= np.linalg.norm(H)
        f = _pool(1)[int(rng.integers(len(_pool(1))))]
        z0 = 0.1
        exact = calc.nth_derivative_curve(f, M, H, n, z0)

        def F(z):
            return matrix_function(f, M + z * H)

        approx = richardson_derivative(F, z0, n)
        res = float(np.linalg.norm(exact - approx)) / max(
            1.0, float(np.linalg.norm(exact))
        )
        out.append(CheckResult("diff", f"curve-richardson-n{n}-{t}", res, 1e-4))

    # commuting direction: closed form f^(n)(A) H^n
    for t in range(3):
        n = 1 + t
        d = int(rng.integers(2, 4))
        M = random_diagonalizable(rng, d)
        H = 0.6 * M + 0.3 * np.eye(d)
        f = sf.exp(_X)
        exact = calc.nth_derivative_curve(f, M, H, n, 0.0)
        fn = f
        for _ in range(n):
            fn = fn.partial(0)
        closed = matrix_function(fn, M) @ np.linalg.matrix_power(H, n)
        res = float(np.linalg.norm(exact - closed)) / max(
            1.0, float(np.linalg.norm(closed))
        )
        out.append(CheckResult("diff", f"commuting-closed-{n}", res, 1e-8))

    # cyclic identity of the doubled-node fields, and the trace derivative
    for t in range(trials):
        n = 1 + t % 3
        f = _pool(1)[int(rng.integers(len(_pool(1))))]
        fprime = f.partial(0)
        lhs_field = calc.divided_difference_field(fprime, n - 1)
        pts = [complex(rng.normal(), rng.normal()) for _ in range(n)]
        lhs = lhs_field(*pts)
        rhs = 0j
        for kk in range(n):
            rhs += calc.doubled_node_difference_field(f, n, kk)(*pts)
        res = abs(lhs - rhs) / max(1.0, abs(lhs))
        out.append(CheckResult("diff", f"cyclic-field-n{n}-{t}", res, 1e-8))

        d = int(rng.integers(2, 4))
        M = random_diagonalizable(rng, d)
        H = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        H /= np.linalg.norm(H)
        via_trace = calc.trace_derivative(f, M, H, n, 0.05)
        via_curve = complex(np.trace(calc.nth_derivative_curve(f, M, H, n, 0.05)))
        res2 = abs(via_trace - via_curve) / max(1.0, abs(via_curve))
        out.append(CheckResult("diff", f"trace-vs-curve-n{n}-{t}", res2, 1e-8))

    # eigenvalue and projector perturbation against tracked finite differences
    for t in range(3):
        d = 3
        M = random_diagonalizable(rng, d, min_gap=0.8)
        H = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        H /= np.linalg.norm(H)
        base = analyze(M)
        lams = base.eigenvalues

        def tracked(z):
            w = np.linalg.eigvals(M + z * H)
            picked = []
            for lam in lams:
                picked.append(w[int(np.argmin(np.abs(w - lam)))])
            return picked

        h1, h2 = 1e-5, 1e-4
        sum_first = 0j
        for which in range(d):
            d1 = calc.eigenvalue_derivative(M, H, which, 1)
            sum_first += d1
            fd1 = (tracked(h1)[which] - tracked(-h1)[which]) / (2 * h1)
            out.append(
                CheckResult("diff", f"eig-d1-{t}-{which}", abs(d1 - fd1), 1e-4)
            )
            d2 = calc.eigenvalue_derivative(M, H, which, 2)
            fd2 = (
                tracked(h2)[which] - 2 * tracked(0.0)[which] + tracked(-h2)[which]
            ) / h2**2
            out.append(
                CheckResult("diff", f"eig-d2-{t}-{which}", abs(d2 - fd2), 1e-4)
            )
        out.append(
            CheckResult(
                "diff", f"eig-sum-trace-{t}", abs(sum_first - np.trace(H)), 1e-10
            )
        )

        def projector(z, which):
            w, V = np.linalg.eig(M + z * H)
            W = np.linalg.inv(V)
            i = int(np.argmin(np.abs(w - lams[which])))
            return np.outer(V[:, i], W[i, :])

        for which in range(d):
            dp = calc.projector_derivative(M, H, which, 1)
            fdp = (projector(h1, which) - projector(-h1, which)) / (2 * h1)
            res = float(np.linalg.norm(dp - fdp))
            out.append(CheckResult("diff", f"proj-d1-{t}-{which}", res, 1e-4))
        dp2 = calc.projector_derivative(M, H, 0, 2)
        fdp2 = richardson_derivative(lambda z: projector(z, 0), 0.0, 2, h=1e-3)
        res2 = float(np.linalg.norm(dp2 - fdp2))
        out.append(CheckResult("diff", f"proj-d2-{t}", res2, 1e-4))
    return out


def suite_lipschitz(seed, trials=20):
    out = []
    rng = np.random.default_rng(seed)
    absf = sf.absval(_X)
    minf = sf.min_const(_X, 0.25)
    for t in range(trials):
        M1 = random_symmetric(rng, 4)
        M2 = M1 + random_symmetric(rng, 4, scale=0.5)
        dist = float(np.linalg.norm(M1 - M2))
        FA = matrix_function(absf, M1, route="diag")
        FB = matrix_function(absf, M2, route="diag")
        gap = float(np.linalg.norm(FA - FB)) - dist
        out.append(CheckResult("lipschitz", f"abs-{t}", gap, 1e-8))
        GA = matrix_function(minf, M1, route="diag")
        GB = matrix_function(minf, M2, route="diag")
        gap2 = float(np.linalg.norm(GA - GB)) - dist
        out.append(CheckResult("lipschitz", f"min-{t}", gap2, 1e-8))
    return out


def suite_antisym(seed, trials=10):
    out = []
    rng = np.random.default_rng(seed)
    specials = [
        np.diag([1.0, 2.0]),
        np.diag([3.0, 3.0]),
        np.diag([3.0, 3.0, 1.0]),
        np.diag([1.0, 2.0, -1.0, 3.0]),
        jordan_matrix([(0.8, 2), (2.0, 1)]),
    ]
    for t in range(trials):
        if t < len(specials):
            M = specials[t]
        else:
            M = random_diagonalizable(rng, int(rng.integers(2, 5)))
        d = M.shape[0]
        for k in range(1, min(d, 4) + 1):
            pool = _pool(k)
            f = pool[int(rng.integers(len(pool)))]
            got = asym.distinct_tuple_sum(f, M, k)
            w = np.linalg.eigvals(M)
            brute = 0j
            for idx in itertools.permutations(range(d), k):
                brute += f(*(w[i] for i in idx))
            res = abs(got - brute) / max(1.0, abs(brute))
            out.append(CheckResult("antisym", f"distinct-{t}-k{k}", res, 1e-8))
    for t in range(trials):
        d = int(rng.integers(2, 6))
        M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        got = asym.det_from_traces(M)
        ref = complex(np.linalg.det(M))
        res = abs(got - ref) / max(1.0, abs(ref))
        out.append(CheckResult("antisym", f"det-{t}", res, 1e-8))
    return out


def suite_zero(seed, trials=20):
    out = []
    rng = np.random.default_rng(seed)
    for t in range(trials):
        k = 1 + t % 2
        mats = []
        for _ in range(k):
            if rng.random() < 0.4:
                mats.append(jordan_matrix(random_jordan_blocks(rng, max_dim=3)))
            else:
                mats.append(random_diagonalizable(rng, int(rng.integers(2, 4))))
        sd = analyze(mats[0])
        mu = minimal_polynomial(sd)
        # lift to k variables in x1, multiply by a random polynomial
        lifted = MultiPoly(
            k, {(a[0],) + (0,) * (k - 1): c for a, c in mu.coeffs.items()}
        )
        q_terms = {}
        for _ in range(3):
            alpha = tuple(int(rng.integers(0, 3)) for _ in range(k))
            q_terms[alpha] = complex(rng.normal(), rng.normal())
        Q = MultiPoly(k, q_terms)
        if Q.is_zero():
            Q = MultiPoly(k, {(0,) * k: 1.0})
        P = lifted * Q
        T = poly_tensor_eval(P, mats)
        norms = [float(np.linalg.norm(M, 2)) for M in mats]
        scale = 0.0
        for alpha, c in P.coeffs.items():
            term = abs(c)
            for nl, a in zip(norms, alpha):
                term *= nl**a
            scale += term
        out.append(CheckResult("zero", f"annihilate-{t}", T.hs_norm(), 1e-8 * scale))
    return out


SUITES = {
    "paths": suite_paths,
    "product": suite_product,
    "compose": suite_compose,
    "contr": suite_contr,
    "diff": suite_diff,
    "lipschitz": suite_lipschitz,
    "antisym": suite_antisym,
    "zero": suite_zero,
}


def run_suites(names, seed=0, trials=None):
    """Run the named suites (or all) and return every check result."""
    if "all" in names:
        chosen = list(SUITES)
    else:
        unknown = [n for n in names if n not in SUITES]
        if unknown:
            raise ValueError(f"unknown suites: {unknown}; valid: {sorted(SUITES)} or all")
        chosen = list(names)
    results = []
    for offset, name in enumerate(chosen):
        fn = SUITES[name]
        kwargs = {}
        if trials is not None:
            kwargs["trials"] = trials
        results.extend(fn(seed + 1000 * offset, **kwargs))
    return results
