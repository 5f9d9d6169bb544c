"""Seeded identity checks grouped into suites.

Every check is tied to one numbered acceptance criterion and carries a short
anchor string naming the identity it verifies.  Checks return
:class:`CheckResult` records; a criterion passes when all of its checks do.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import chaos as ch
from . import fock
from . import malliavin as mv
from . import oracle
from .chaos import ChaosExpansion
from .config import using
from .instances import (make_rng, random_chaos, random_direction, random_increasing_chaos,
                        random_kernel, random_word)
from .kernel import Kernel
from .serialize import to_record

EPS = np.finfo(float).eps

CRITERIA = {
    1: "Wigner-Ito isometry",
    2: "product formula and non-crossing Wick moments",
    3: "Chebyshev polynomials of semicircular elements",
    4: "free Stroock formula",
    5: "divergence coherence",
    6: "commutation relations",
    7: "Clark-Ocone formula",
    8: "variance identities",
    9: "Sobolev chaotic characterization",
    10: "r* commutator identity",
    11: "Haagerup inequality",
    12: "hypercontractivity and chaos projection continuity",
    13: "dilation limit of the OU generator",
    14: "rotation automorphism",
}

SUITES = ("isometry", "product", "malliavin", "stroock", "clark-ocone", "variance",
          "cebron", "fock", "commutators", "gue")


@dataclass
class SuiteConfig:
    basis: int = 6
    max_degree: int = 5
    fock_level: int = 10
    tol: float | None = None
    seed: int = 42
    suites: tuple = SUITES
    gue_dim: int = 500
    gue_samples: int = 2

    def validate(self) -> None:
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tolerance must be positive")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
        if self.basis < 2:
            raise ValueError("basis size must be at least 2")
        if not 1 <= self.max_degree:
            raise ValueError("max degree must be at least 1")
        if {"fock", "commutators"} & set(self.suites) and self.max_degree > self.fock_level:
            raise ValueError(f"max degree {self.max_degree} exceeds Fock level {self.fock_level}")
        if self.gue_dim < 2 or self.gue_samples < 1:
            raise ValueError("GUE dimension must be >= 2 and sample count >= 1")

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol


@dataclass
class CheckResult:
    suite: str
    check_id: str
    criterion: int
    anchor: str
    passed: bool
    max_residual: float
    tolerance: float
    detail: str = ""
    elapsed: float = 0.0
    inputs: object = None

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        out = {"suite": self.suite, "check_id": self.check_id, "criterion": self.criterion,
               "anchor": self.anchor, "status": self.status,
               "max_residual": _json_number(self.max_residual), "tolerance": float(self.tolerance),
               "detail": self.detail, "elapsed": round(self.elapsed, 6)}
        if not self.passed and self.inputs is not None:
            out["inputs"] = self.inputs
        return out


@dataclass
class _Check:
    suite: str
    check_id: str
    criterion: int
    anchor: str
    fn: Callable


REGISTRY: list[_Check] = []


def check(suite: str, check_id: str, criterion: int, anchor: str):
    def deco(fn):
        REGISTRY.append(_Check(suite, check_id, criterion, anchor, fn))
        return fn
    return deco


class _Worst:
    """Track the largest residual and the input that produced it."""

    def __init__(self):
        self.value = 0.0
        self.inputs = None

    def update(self, residual: float, *objs) -> None:
        residual = float(residual)
        if residual > self.value or (math.isnan(residual) and not math.isnan(self.value)):
            self.value = residual
            self.inputs = [to_record(o) if not isinstance(o, (int, float, str)) else o for o in objs]


def _json_number(x: float):
    return float(x) if math.isfinite(x) else str(x)


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


# -- criterion 1 ------------------------------------------------------------

@check("isometry", "isometry.wigner-ito", 1, "Wigner-Ito isometry tau(I_n(f)* I_m(g)) = delta <g, f>")
def _isometry(cfg: SuiteConfig, count: int = 200):
    rng = make_rng(cfg.seed, 1)
    worst = _Worst()
    tol = cfg.tolerance(1e-12)
    with using(max_degree=2 * cfg.max_degree):
        for _ in range(count):
            n, m = rng.integers(0, cfg.max_degree + 1, size=2)
            f = random_kernel(rng, int(n), cfg.basis)
            g = random_kernel(rng, int(m), cfg.basis)
            lhs = ch.multiply(ChaosExpansion.integral(f).adjoint(), ChaosExpansion.integral(g)).trace()
            rhs = g.inner(f) if n == m else 0
            worst.update(abs(lhs - rhs), f, g)
    return worst, tol, f"{count} random kernel pairs, degrees <= {cfg.max_degree}"


# -- criterion 2 ------------------------------------------------------------

@check("product", "product.fock-oracle", 2, "product formula vs Fock vacuum moments")
def _product_fock(cfg: SuiteConfig, count: int = 100):
    rng = make_rng(cfg.seed, 2, 1)
    worst = _Worst()
    tol = cfg.tolerance(1e-10)
    deg = min(3, cfg.max_degree)
    space = fock.FockSpace(cfg.basis, 2 * deg)
    with using(max_degree=2 * deg):
        for _ in range(count):
            F = random_chaos(rng, int(rng.integers(0, deg + 1)), cfg.basis)
            G = random_chaos(rng, int(rng.integers(0, deg + 1)), cfg.basis)
            lhs = ch.multiply(F, G).trace()
            v = fock.apply_chaos(G, space, space.vacuum(), extend=False)
            v = fock.apply_chaos(F, space, v, extend=False)
            worst.update(abs(lhs - v[0]), F, G)
    return worst, tol, f"{count} random pairs, degrees <= {deg}, Fock d={cfg.basis} L={2 * deg}"


@check("product", "product.nc-wick-words", 2, "word moments vs non-crossing pairing oracle")
def _product_words(cfg: SuiteConfig, count: int = 60):
    rng = make_rng(cfg.seed, 2, 2)
    worst = _Worst()
    tol = cfg.tolerance(1e-10)
    with using(max_degree=10):
        for _ in range(count):
            word = random_word(rng, int(rng.integers(0, 11)), cfg.basis)
            a, b = ch.word_moment(word), oracle.wick_moment(word)
            worst.update(_rel(a, b), *word)
    return worst, tol, f"{count} random words of length <= 10 (relative residual)"


# -- criterion 3 ------------------------------------------------------------

@check("product", "product.chebyshev", 3, "U_p(S(e)) = I_p(e^p)")
def _chebyshev(cfg: SuiteConfig):
    worst = _Worst()
    e = Kernel.basis(1)
    with using(max_degree=max(8, cfg.max_degree)):
        for p in range(1, 9):
            U = ch.chebyshev_eval(p, e)
            target = ChaosExpansion.integral(Kernel.basis(*([1] * p)))
            worst.update(0.0 if U == target else max(U.max_abs_diff(target), EPS), p)
    return worst, 0.0, "p = 1..8, exact equality"


# -- criterion 4 ------------------------------------------------------------

@check("stroock", "stroock.round-trip", 4, "free Stroock formula: f_n = tau^(n+1)(nabla^n F)")
def _stroock(cfg: SuiteConfig, count: int = 100):
    rng = make_rng(cfg.seed, 4)
    worst = _Worst()
    for _ in range(count):
        F = random_chaos(rng, cfg.max_degree, cfg.basis)
        R = mv.stroock_reconstruct(F)
        worst.update(0.0 if R == F else max(R.max_abs_diff(F), EPS), F)
    return worst, 0.0, f"{count} random F, exact equality"


@check("stroock", "stroock.symmetrized", 4, "free Stroock formula with D^n carries 1/n!")
def _stroock_sym(cfg: SuiteConfig, count: int = 100):
    rng = make_rng(cfg.seed, 4)
    worst = _Worst()
    for _ in range(count):
        F = random_chaos(rng, cfg.max_degree, cfg.basis)
        R = mv.stroock_reconstruct(F, symmetrized=True)
        worst.update(R.max_abs_diff(F), F)
    # scaling by n! and back rounds twice; coefficients lie in the unit disk
    return worst, cfg.tolerance(4 * EPS), f"{count} random F, rounding-level agreement"


# -- criterion 5 ------------------------------------------------------------

@check("malliavin", "malliavin.divergence-deterministic", 5, "delta^p(f 1^(p+1)) = I_p(f)")
def _div_det(cfg: SuiteConfig, count: int = 20):
    rng = make_rng(cfg.seed, 5, 1)
    worst = _Worst()
    for _ in range(count):
        for p in range(1, 5):
            f = random_kernel(rng, p, cfg.basis)
            U = mv.deterministic_multiprocess(f)
            a = mv.divergence_adjoint(U)
            b = mv.divergence_adjoint(U, method="matrix")
            c = mv.divergence_deterministic(f)
            worst.update(0.0 if a == c else max(a.max_abs_diff(c), EPS), f)
            worst.update(b.max_abs_diff(c), f)
    return worst, cfg.tolerance(1e-12), f"{count} kernels per order p = 1..4, two divergence routes"


@check("malliavin", "malliavin.voiculescu", 5, "Voiculescu formula vs adjoint divergence")
def _voiculescu(cfg: SuiteConfig, count: int = 30):
    rng = make_rng(cfg.seed, 5, 2)
    worst = _Worst()
    deg = min(3, cfg.max_degree)
    with using(max_degree=2 * deg + 1):
        for _ in range(count):
            A = random_chaos(rng, int(rng.integers(0, deg + 1)), cfg.basis)
            B = random_chaos(rng, int(rng.integers(0, deg + 1)), cfg.basis)
            h = random_direction(rng, cfg.basis)
            a = mv.divergence_elementary(A, B, h)
            b = mv.divergence_adjoint(mv.elementary_biprocess(A, B, h))
            worst.update(a.max_abs_diff(b), A, B, h)
    return worst, cfg.tolerance(1e-10), f"{count} random (A, B, h)"


@check("malliavin", "malliavin.duality", 5, "duality <nabla^p F, U> = <F, delta^p U>")
def _duality(cfg: SuiteConfig, count: int = 30):
    rng = make_rng(cfg.seed, 5, 3)
    worst = _Worst()
    for _ in range(count):
        p = int(rng.integers(1, 5))
        F = random_chaos(rng, cfg.max_degree, cfg.basis)
        U = mv.gradient(random_chaos(rng, cfg.max_degree, cfg.basis), p) * complex(*rng.standard_normal(2))
        lhs = mv.gradient(F, p).inner(U)
        rhs = ch.inner(F, mv.divergence_adjoint(U))
        worst.update(_rel(lhs, rhs), F, U)
    return worst, cfg.tolerance(1e-10), f"{count} random (F, U), p = 1..4"


# -- criterion 6 ------------------------------------------------------------

@check("malliavin", "malliavin.ou-commutation", 6, "nabla^k P_t = e^(-kt) P_t^(k+1) nabla^k")
def _ou_comm(cfg: SuiteConfig, count: int = 20):
    rng = make_rng(cfg.seed, 6, 1)
    worst = _Worst()
    exponent_ok = True
    for _ in range(count):
        F = random_chaos(rng, cfg.max_degree, cfg.basis)
        t = float(rng.uniform(0.05, 2.0))
        for k in range(1, 4):
            lhs = mv.gradient(ch.apply_spectral(F, ch.SpectralMode.OU, t), k)
            base = mv.gradient(F, k)
            rhs = base.scale_blocks(lambda deg: math.exp(-k * t) * math.exp(-sum(deg) * t))
            # exponent bookkeeping: k + sum(deg) must equal the source degree
            exponent_ok &= all(k + sum(deg) == blk.order for deg, blk in base.blocks.items())
            scale = max((float(np.abs(b.val).max()) for b in base.blocks.values()), default=1.0)
            worst.update(lhs.max_abs_diff(rhs) / max(scale, 1.0), F, t)
    if not exponent_ok:
        worst.update(float("inf"))
    return worst, cfg.tolerance(1e-12), f"{count} random F, k = 1..3, exact exponents"


@check("malliavin", "malliavin.heisenberg", 6, "nabla_t delta(U) = U_t + delta_s(nabla_t U_s)")
def _heisenberg(cfg: SuiteConfig, count: int = 30):
    rng = make_rng(cfg.seed, 6, 2)
    worst = _Worst()
    for _ in range(count):
        U = mv.gradient(random_chaos(rng, cfg.max_degree, cfg.basis), 1)
        lhs = mv.gradient(mv.divergence_adjoint(U), 1)
        worst.update(lhs.max_abs_diff(mv.heisenberg_rhs(U)), U)
    return worst, cfg.tolerance(1e-10), f"{count} random order-1 gradients"


@check("malliavin", "malliavin.conditional-commutation", 6,
       "nabla_j E_A F = 1_A(j) (E_A x E_A) nabla_j F")
def _cond_comm(cfg: SuiteConfig, count: int = 30):
    rng = make_rng(cfg.seed, 6, 3)
    worst = _Worst()
    for _ in range(count):
        F = random_chaos(rng, cfg.max_degree, cfg.basis)
        A = sorted(int(a) for a in np.flatnonzero(rng.random(cfg.basis) < 0.5))
        lhs = mv.gradient(ch.conditional_expectation(F, A), 1)
        rhs = mv.gradient(F, 1).restrict_legs(A).filter(lambda idx, deg: np.isin(idx[:, 0], A))
        worst.update(0.0 if lhs == rhs else max(lhs.max_abs_diff(rhs), EPS), F, str(A))
    return worst, 0.0, f"{count} random (F, A), exact equality"


# -- criterion 7 ------------------------------------------------------------

@check("clark-ocone", "clark-ocone.reconstruction", 7, "F = tau(F) + delta(Gamma nabla F)")
def _clark_ocone(cfg: SuiteConfig, count: int = 50):
    rng = make_rng(cfg.seed, 7)
    worst = _Worst()
    deg = min(4, cfg.max_degree)
    for _ in range(count):
        F = random_increasing_chaos(rng, int(rng.integers(0, deg + 1)), cfg.basis)
        t, G = mv.clark_ocone(F)
        R = ChaosExpansion.constant(t) + mv.ito_integral(G)
        worst.update(0.0 if R == F else max(R.max_abs_diff(F), EPS), F)
    return worst, 0.0, f"{count} strictly increasing functionals, degree <= {deg}, exact"


# -- criterion 8 ------------------------------------------------------------

@check("variance", "variance.poincare", 8, "free Poincare inequality")
def _poincare(cfg: SuiteConfig, count: int = 200):
    rng = make_rng(cfg.seed, 8, 1)
    worst = _Worst()
    for _ in range(count):
        F = random_chaos(rng, int(rng.integers(0, cfg.max_degree + 1)), cfg.basis)
        gap = mv.gradient(F, 1).norm_squared() - F.centered().norm() ** 2
        worst.update(max(0.0, -gap), F)
    return worst, cfg.tolerance(1e-12), f"{count} random F, residual = max(0, -gap)"


@check("variance", "variance.covariance-ou", 8, "covariance via the OU semigroup")
def _covariance(cfg: SuiteConfig, count: int = 50, product_count: int = 10):
    rng = make_rng(cfg.seed, 8, 2)
    worst = _Worst()
    # tau(FG) through the isometry on every pair, through the full product on a subset
    for i in range(count):
        F = random_chaos(rng, cfg.max_degree, cfg.basis)
        G = random_chaos(rng, cfg.max_degree, cfg.basis)
        cov = mv.covariance_ou(F, G)
        direct = ch.inner(G, F.adjoint()) - F.trace() * G.trace()
        worst.update(_rel(cov, direct), F, G)
        if i < product_count:
            lo = min(3, cfg.max_degree)
            F3, G3 = (ChaosExpansion({n: k for n, k in X.components.items() if n <= lo}) for X in (F, G))
            with using(max_degree=2 * lo):
                direct = ch.multiply(F3, G3).trace() - F3.trace() * G3.trace()
            worst.update(_rel(mv.covariance_ou(F3, G3), direct), F3, G3)
    return worst, cfg.tolerance(1e-10), \
        f"{count} random pairs via the isometry, {product_count} truncated pairs via the product"


@check("variance", "variance.stroock-series", 8, "variance as a series of Stroock kernels")
def _variance_series(cfg: SuiteConfig, count: int = 50):
    rng = make_rng(cfg.seed, 8, 3)
    worst = _Worst()
    for _ in range(count):
        F = random_chaos(rng, cfg.max_degree, cfg.basis)
        worst.update(_rel(mv.variance_stroock(F), F.centered().norm() ** 2), F)
    return worst, cfg.tolerance(1e-12), f"{count} random F"


@check("cebron", "cebron.generalized", 8, "generalized Cebron formulas")
def _cebron(cfg: SuiteConfig, count: int = 10):
    rng = make_rng(cfg.seed, 8, 4)
    worst = _Worst()
    top = min(4, cfg.max_degree)
    d = min(cfg.basis, 4)
    with using(max_degree=2 * top):
        for _ in range(count):
            for p in (1, 2, 3):
                if p > top:
                    continue
                a = int(rng.integers(p, top + 1))
                A = random_chaos(rng, top, d, degrees=range(a, top + 1))
                B = random_chaos(rng, top, d, degrees=range(a, top + 1))
                worst.update(_rel(mv.cebron_product(A, B, p), ch.multiply(A, B).trace()), A, B, p)
    return worst, cfg.tolerance(1e-10), f"{count} random pairs per p in (1, 2, 3), basis {d}"


# -- criterion 9 ------------------------------------------------------------

@check("stroock", "stroock.sobolev-closed-form", 9,
       "||D^p F||^2 = sum_n n(n-1)...(n-p+1) ||f_n||^2")
def _sobolev(cfg: SuiteConfig, count: int = 20):
    rng = make_rng(cfg.seed, 9, 1)
    worst = _Worst()
    per_p = {}
    for _ in range(count):
        F = random_chaos(rng, cfg.max_degree, cfg.basis)
        for p in range(1, 5):
            r = _rel(mv.sobolev_seminorm(F, p, symmetrized=True), mv.sobolev_closed_form(F, p))
            per_p[p] = max(per_p.get(p, 0.0), r)
            worst.update(r, F, p)
    detail = ", ".join(f"p={p}: {r:.3g}" for p, r in sorted(per_p.items()))
    return worst, cfg.tolerance(1e-12), f"{count} random F, relative residual per order: {detail}"


@check("stroock", "stroock.gradient-kernel", 9, "nabla^p F = 0 implies deg F <= p-1")
def _grad_kernel(cfg: SuiteConfig):
    rng = make_rng(cfg.seed, 9, 2)
    worst = _Worst()
    for p in range(1, 5):
        below = random_chaos(rng, p - 1, cfg.basis)
        if not mv.gradient(below, p).is_zero():
            worst.update(1.0, below, p)
        above = below + ChaosExpansion.integral(random_kernel(rng, p, cfg.basis))
        if mv.gradient(above, p).is_zero():
            worst.update(1.0, above, p)
    return worst, 0.0, "constructed cases p = 1..4"


# -- criterion 10 -----------------------------------------------------------

@check("commutators", "commutators.rstar", 10, "[r*(h), F] = nabla^h F # P_1")
def _commutator(cfg: SuiteConfig, count: int = 10):
    rng = make_rng(cfg.seed, 10)
    worst = _Worst()
    d, L = 3, min(8, cfg.fock_level)
    space = fock.FockSpace(d, L)
    cols = fock.faithful_columns(space, 3)
    for _ in range(count):
        F = random_chaos(rng, 3, d)
        h = random_direction(rng, d)
        lhs = fock.commutator_rstar(h, F, space)
        rhs = fock.commutator_rstar_rhs(mv.directional(F, h), space)
        worst.update(lhs.max_abs_diff(rhs, cols), F, h)
    return worst, cfg.tolerance(1e-10), \
        f"{count} random F in P_3, d={d}, L={L}, columns of length <= {L - 3}"


# -- criterion 11 -----------------------------------------------------------

@check("fock", "fock.haagerup", 11, "Haagerup inequality on truncated Fock space")
def _haagerup_fock(cfg: SuiteConfig, count: int = 50):
    rng = make_rng(cfg.seed, 11, 1)
    worst = _Worst()
    d, L = 3, min(5, cfg.fock_level)
    space = fock.FockSpace(d, L)
    for _ in range(count):
        n = int(rng.integers(1, 5))
        f = random_kernel(rng, n, d)
        norm = fock.operator_norm(fock.chaos_to_operator(ChaosExpansion.integral(f), space))
        worst.update(max(0.0, norm - (n + 1) * f.norm()), f)
    return worst, cfg.tolerance(1e-9), f"{count} random I_n(f), n <= 4, d={d}, L={L}; residual = excess"


@check("gue", "gue.haagerup", 11, "Haagerup inequality on GUE matrices")
def _haagerup_gue(cfg: SuiteConfig, count: int = 4):
    rng = make_rng(cfg.seed, 11, 2)
    worst = _Worst()
    gcfg = oracle.GueConfig(cfg.gue_dim, cfg.gue_samples, cfg.seed)
    ratios = []
    for n in range(1, count + 1):
        f = random_kernel(rng, n, 2)
        est, _ = oracle.gue_estimate(ChaosExpansion.integral(f), gcfg, oracle.Statistic.OPNORM)
        bound = 1.1 * (n + 1) * f.norm()
        ratios.append(est / ((n + 1) * f.norm()))
        worst.update(max(0.0, est - bound), f)
    return worst, 0.0, (f"N={cfg.gue_dim}, M={cfg.gue_samples}, n=1..{count}; "
                        f"norm/bound ratios {', '.join(f'{r:.3f}' for r in ratios)}")


@check("gue", "gue.trace-words", 2, "GUE normalized traces vs non-crossing moments")
def _gue_words(cfg: SuiteConfig, count: int = 6):
    rng = make_rng(cfg.seed, 2, 3)
    worst = _Worst()
    gcfg = oracle.GueConfig(min(cfg.gue_dim, 200), max(cfg.gue_samples, 20), cfg.seed)
    for k in range(count):
        word = random_word(rng, 2 + (k % 3) * 2, 2, basis_only=True)
        est, err = oracle.gue_estimate(word, gcfg, oracle.Statistic.TRACE)
        target = oracle.wick_moment(word).real
        worst.update(max(0.0, abs(est - target) - 4 * err), len(word))
    return worst, 0.0, f"{count} basis words, N={gcfg.N}, M={gcfg.M}, 4-sigma band"


# -- criterion 12 -----------------------------------------------------------

@check("fock", "fock.hypercontractivity", 12, "||P_t F||_4 <= ||F||_2 at t = ln(3)/2")
def _hypercontractivity(cfg: SuiteConfig, count: int = 50):
    rng = make_rng(cfg.seed, 12, 1)
    worst = _Worst()
    d, L = 2, cfg.fock_level
    deg = min(cfg.max_degree, L // 2)
    space = fock.FockSpace(d, L)
    t = 0.5 * math.log(3)
    for _ in range(count):
        F = random_chaos(rng, int(rng.integers(1, deg + 1)), d)
        lhs = fock.lp_norm_chaos(ch.apply_spectral(F, ch.SpectralMode.OU, t), 4, space)
        worst.update(max(0.0, lhs - F.norm()), F)
    return worst, cfg.tolerance(1e-9), f"{count} random F, degree <= {deg}, d={d}, L={L}"


@check("fock", "fock.projection-continuity", 12, "||pi_n F||_4 <= 3^(n/2) ||F||_4")
def _projection(cfg: SuiteConfig, count: int = 50):
    rng = make_rng(cfg.seed, 12, 2)
    worst = _Worst()
    d, L = 2, cfg.fock_level
    deg = min(cfg.max_degree, L // 2)
    space = fock.FockSpace(d, L)
    for _ in range(count):
        F = random_chaos(rng, int(rng.integers(1, deg + 1)), d)
        full = fock.lp_norm_chaos(F, 4, space)
        for n in F.components:
            part = fock.lp_norm_chaos(ch.project_chaos(F, n), 4, space)
            worst.update(max(0.0, part - 3 ** (n / 2) * full), F, n)
    return worst, cfg.tolerance(1e-9), f"{count} random F, degree <= {deg}, d={d}, L={L}"


# -- criterion 13 -----------------------------------------------------------

def dilation_constant(F: ChaosExpansion) -> float:
    """``binom(D, 2) ||F - tau F||_2`` with ``D`` the degree of ``F``.

    Bounds ``||(F_{1-eps} - F)/eps - LF||_2 / eps`` because
    ``|((1-eps)^n - 1)/eps + n| <= binom(n, 2) eps`` for ``0 < eps < 1``.
    """
    return math.comb(F.degree, 2) * F.centered().norm()


@check("malliavin", "malliavin.dilation", 13, "(F_(1-eps) - F)/eps -> LF")
def _dilation(cfg: SuiteConfig, count: int = 50, eps: float = 1e-4):
    rng = make_rng(cfg.seed, 13)
    worst = _Worst()
    for _ in range(count):
        F = random_chaos(rng, cfg.max_degree, cfg.basis)
        diff = (ch.dilate(F, 1 - eps) - F) * (1 / eps) - ch.apply_spectral(F, ch.SpectralMode.GENERATOR)
        bound = dilation_constant(F) * eps
        worst.update(max(0.0, diff.norm() - bound), F)
    return worst, cfg.tolerance(0.0), f"{count} random F, eps={eps}, residual = excess over C(D) eps"


# -- criterion 14 -----------------------------------------------------------

@check("product", "product.rotation", 14, "tau(alpha_t(w)) = tau(w)")
def _rotation(cfg: SuiteConfig, count: int = 50):
    rng = make_rng(cfg.seed, 14)
    worst = _Worst()
    d = cfg.basis
    for _ in range(count):
        word = random_word(rng, int(rng.integers(0, 9)), d)
        base = oracle.wick_moment(word)
        for t in (0.3, 1.2):
            rotated = [ch.rotate_kernel(h, t, d) for h in word]
            worst.update(_rel(oracle.wick_moment(rotated), base), len(word), t)
    return worst, cfg.tolerance(1e-10), f"{count} random words, t in (0.3, 1.2), Wick oracle"


def run_checks(cfg: SuiteConfig, selected: Callable[[_Check], bool] | None = None) -> list[CheckResult]:
    cfg.validate()
    results = []
    for c in REGISTRY:
        if c.suite not in cfg.suites or (selected is not None and not selected(c)):
            continue
        start = time.perf_counter()
        worst, tol, detail = c.fn(cfg)
        elapsed = time.perf_counter() - start
        passed = bool(worst.value <= tol)
        results.append(CheckResult(c.suite, c.check_id, c.criterion, c.anchor, passed,
                                   worst.value, tol, detail, elapsed,
                                   None if passed else worst.inputs))
    return sorted(results, key=lambda r: r.check_id)


def criteria_status(results: list[CheckResult]) -> dict[int, bool]:
    out: dict[int, bool] = {}
    for r in results:
        out[r.criterion] = out.get(r.criterion, True) and r.passed
    return dict(sorted(out.items()))
