"""Crystallographic groups Z^n x| Z/p with fixed-point-free twist.

Validates the defining data (prime order, order-p integral action with no
nonzero fixed vector), derives the structural constants (k, the count of
conjugacy classes of finite subgroups, torus fixed points, Euler
characteristic of the orbit space), and evaluates every closed-form
invariant: integral (co)homology, complex K-theory, real KO-theory and
connective ko-theory of the classifying space and of the orbit space, the
K-theory of the reduced group C*-algebras, and the equivariant groups of
the proper classifying space.  A spectral assembly from the module layer
provides an independent derivation of the cohomology for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exact_linalg as la
from . import repring, zpmod
from .abelian import (FGAbelianGroup, GroupExpression, KOPoint, KoPoint,
                      PAdic, Pruefer, UnknownPTorsion, direct_sum,
                      expr_evaluate, fg_expression)


class GammaError(ValueError):
    """Validation failure; `code` names the violated invariant."""

    code = "Invalid"

    def __str__(self):
        return f"{self.code}: {super().__str__()}"


class NotPrimeError(GammaError):
    code = "NotPrime"


class WrongOrderError(GammaError):
    code = "WrongOrder"


class NotFreeError(GammaError):
    code = "NotFree"


class BadRankError(GammaError):
    code = "BadRank"


class CokernelMismatchError(GammaError):
    code = "CokernelMismatch"


class OddPrimeRequiredError(GammaError):
    code = "POdd"


@dataclass(frozen=True, eq=False)
class GammaDescriptor:
    p: int
    n: int
    k: int
    rho: np.ndarray
    canonical: bool
    _cache: dict = field(default_factory=dict, repr=False)

    def module(self) -> zpmod.ZpModule:
        """The lattice with its twist action as a module object."""
        m = self._cache.get("module")
        if m is None:
            m = zpmod.ZpModule(self.p, self.rho, check=False)
            self._cache["module"] = m
        return m

    def dual_module(self) -> zpmod.ZpModule:
        m = self._cache.get("dual")
        if m is None:
            m = zpmod.dual(self.module())
            self._cache["dual"] = m
        return m

    def exterior(self, j: int) -> zpmod.ZpModule:
        """j-th exterior power of the lattice module, cached per degree."""
        m = self._cache.get(("ext", j))
        if m is None:
            m = zpmod.exterior_power(self.module(), j)
            self._cache[("ext", j)] = m
        return m

    def exterior_dual(self, j: int) -> zpmod.ZpModule:
        """j-th exterior power of the dual module, cached per degree."""
        m = self._cache.get(("ext_dual", j))
        if m is None:
            m = zpmod.exterior_power(self.dual_module(), j)
            self._cache[("ext_dual", j)] = m
        return m

    def r(self) -> tuple[int, ...]:
        rv = self._cache.get("r")
        if rv is None:
            rv = repring.r_vector(self.p, self.k)
            self._cache["r"] = rv
        return rv

    def s(self, m: int) -> int:
        return repring.s_m(self.p, self.k, m)

    def r_even_sum(self) -> int:
        return sum(self.r()[0::2])

    def r_odd_sum(self) -> int:
        return sum(self.r()[1::2])

    def rho_rows(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.rho]


def validate_gamma(p: int, rho) -> GammaDescriptor:
    """Check the defining data and derive k; raises GammaError subclasses."""
    if not repring.is_prime(p):
        raise NotPrimeError(f"p = {p} must be prime")
    rho = la.intmat(rho)
    if rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise BadRankError("action matrix must be square and nonempty")
    n = rho.shape[0]
    ident = la.eye(n)
    power = ident
    for _ in range(p):
        power = power @ rho
    if np.any(power != ident):
        raise WrongOrderError(f"matrix does not have order {p}: rho^{p} != id")
    if not np.any(rho != ident):
        raise WrongOrderError("matrix is the identity, order 1")
    kern = la.kernel_basis(rho - ident)
    if kern.shape[1]:
        vec = tuple(int(x) for x in kern[:, 0])
        raise NotFreeError(f"fixed vector {vec}")
    if n % (p - 1):
        raise BadRankError(f"rank {n} is not divisible by p - 1 = {p - 1}")
    k = n // (p - 1)
    canonical = _is_canonical(p, k, rho)
    return GammaDescriptor(p, n, k, rho, canonical)


def _is_canonical(p: int, k: int, rho: np.ndarray) -> bool:
    block = zpmod.make_cyclotomic(p).action
    size = p - 1
    expect = la.zeros(k * size, k * size)
    for i in range(k):
        expect[i * size:(i + 1) * size, i * size:(i + 1) * size] = block
    return not np.any(rho != expect)


def canonical_gamma(p: int, k: int) -> GammaDescriptor:
    """Descriptor for the k-fold sum of the cyclotomic twist."""
    if k < 1:
        raise BadRankError(f"k = {k} must be >= 1")
    if not repring.is_prime(p):
        raise NotPrimeError(f"p = {p} must be prime")
    mods = [zpmod.make_cyclotomic(p) for _ in range(k)]
    action = zpmod.direct_sum_modules(mods).action if k > 1 else mods[0].action
    return validate_gamma(p, action)


@dataclass(frozen=True)
class FiniteSubgroupData:
    cokernel: FGAbelianGroup
    class_count: int
    fixed_point_count: int


def finite_subgroup_data(G: GammaDescriptor) -> FiniteSubgroupData:
    """Cokernel of (rho - id) and the finite-subgroup / fixed-point counts."""
    cok = la.cokernel_structure(G.rho - la.eye(G.n))
    expected = FGAbelianGroup.elementary(G.p, G.k)
    if cok != expected:
        raise CokernelMismatchError(
            f"coker(rho - id) = {cok}, expected {expected}")
    count = G.p ** G.k
    return FiniteSubgroupData(cok, count, count)


def abelianization(G: GammaDescriptor) -> FGAbelianGroup:
    """Largest abelian quotient; always elementary of rank k + 1."""
    ab = direct_sum(finite_subgroup_data(G).cokernel,
                    FGAbelianGroup.cyclic(G.p))
    expected = FGAbelianGroup.elementary(G.p, G.k + 1)
    if ab != expected:
        raise CokernelMismatchError(f"abelianization {ab} != {expected}")
    return ab


def euler_characteristic_quotient(G: GammaDescriptor) -> int:
    """Euler characteristic of the orbit space of the torus action."""
    value = (G.p - 1) * G.p ** (G.k - 1)
    alt = repring.r_sum_identities(G.p, G.k)["alternating"]
    if value != alt:
        raise ArithmeticError(
            f"Euler characteristic {value} disagrees with alternating "
            f"rank sum {alt}")
    return value


# --------------------------------------------------------------------------
# (co)homology of the classifying space and the orbit space


def _r_at(G: GammaDescriptor, m: int) -> int:
    rv = G.r()
    return rv[m] if 0 <= m <= G.n else 0


def cohomology_bgamma(G: GammaDescriptor, m: int) -> GroupExpression:
    if m < 0:
        raise ValueError("negative degree")
    if m % 2 == 0:
        return fg_expression(_r_at(G, m), G.p, G.s(m))
    return fg_expression(_r_at(G, m))


def homology_bgamma(G: GammaDescriptor, m: int) -> GroupExpression:
    if m < 0:
        raise ValueError("negative degree")
    if m % 2 == 0:
        return fg_expression(_r_at(G, m))
    return fg_expression(_r_at(G, m), G.p, G.s(m + 1))


def cohomology_quotient(G: GammaDescriptor, m: int) -> GroupExpression:
    if m < 0:
        raise ValueError("negative degree")
    if m == 1:
        return GroupExpression.zero()
    if m % 2 == 0:
        return fg_expression(_r_at(G, m))
    return fg_expression(_r_at(G, m), G.p, G.p ** G.k - G.s(m))


def homology_quotient(G: GammaDescriptor, m: int) -> GroupExpression:
    if m < 0:
        raise ValueError("negative degree")
    if m == 0:
        return GroupExpression.free(1)
    if m % 2 == 1:
        return fg_expression(_r_at(G, m))
    return fg_expression(_r_at(G, m), G.p, G.p ** G.k - G.s(m + 1))


@dataclass(frozen=True)
class RestrictionData:
    kernel: GroupExpression
    image_torsion: GroupExpression


def restriction_map_data(G: GammaDescriptor, m: int) -> RestrictionData:
    """Kernel of restriction to the lattice and image on finite subgroups."""
    if m % 2 == 1:
        return RestrictionData(GroupExpression.zero(), GroupExpression.zero())
    kernel = fg_expression(0, G.p, G.s(m))
    if m == 0:
        return RestrictionData(kernel, GroupExpression.zero())
    return RestrictionData(kernel, fg_expression(0, G.p, G.s(m + 1)))


# --------------------------------------------------------------------------
# complex K-theory


def _t1_unknown(G: GammaDescriptor) -> GroupExpression:
    bounds = tuple(G.p ** G.k - G.s(2 * i + 1) for i in range(1, G.n // 2 + 1))
    return GroupExpression((UnknownPTorsion("T1", bounds),))


def k_theory_bgamma(G: GammaDescriptor, m: int,
                    variant: str = "cohomology") -> GroupExpression:
    _check_variant(variant)
    even = m % 2 == 0
    if variant == "cohomology":
        if even:
            return (GroupExpression.free(G.r_even_sum())
                    + GroupExpression((PAdic(G.p, (G.p - 1) * G.p ** G.k),)))
        return GroupExpression.free(G.r_odd_sum())
    if even:
        return GroupExpression.free(G.r_even_sum())
    return (GroupExpression.free(G.r_odd_sum())
            + GroupExpression((Pruefer(G.p, (G.p - 1) * G.p ** G.k),)))


def k_theory_quotient(G: GammaDescriptor, m: int,
                      variant: str = "cohomology") -> GroupExpression:
    _check_variant(variant)
    even = m % 2 == 0
    if variant == "cohomology":
        if even:
            return GroupExpression.free(G.r_even_sum())
        return GroupExpression.free(G.r_odd_sum()) + _t1_unknown(G)
    if even:
        return GroupExpression.free(G.r_even_sum()) + _t1_unknown(G)
    return GroupExpression.free(G.r_odd_sum())


def _check_variant(variant: str) -> None:
    if variant not in ("cohomology", "homology"):
        raise ValueError(f"variant must be cohomology|homology, got {variant!r}")


def _check_space(space: str) -> None:
    if space not in ("bgamma", "quotient"):
        raise ValueError(f"space must be bgamma|quotient, got {space!r}")


def _require_odd(G: GammaDescriptor) -> None:
    if G.p == 2:
        raise OddPrimeRequiredError("p odd required for KO/ko computations")


# --------------------------------------------------------------------------
# real K-theory
#
# Point groups are tabulated homologically; the cohomological point group
# in degree j is the homological one in degree -j.


def _ko_sum_cohomology(G: GammaDescriptor, m: int) -> GroupExpression:
    rv = G.r()
    return GroupExpression(tuple(KOPoint(l - m, rv[l])
                                 for l in range(G.n + 1) if rv[l]))


def _ko_sum_homology(G: GammaDescriptor, m: int) -> GroupExpression:
    rv = G.r()
    return GroupExpression(tuple(KOPoint(m - l, rv[l])
                                 for l in range(G.n + 1) if rv[l]))


def _to_unknown(G: GammaDescriptor, degree: int) -> GroupExpression:
    """Unknown torsion attached in odd cohomological degree `degree`."""
    d = degree % 8
    eps = 1 if d % 4 == 1 else -1
    layers = (G.n + 4 - eps) // 4
    bounds = tuple(G.p ** G.k - G.s(4 * i + eps) for i in range(1, layers))
    return GroupExpression((UnknownPTorsion(f"TO^{d}", bounds),))


def ko_theory(G: GammaDescriptor, m: int, space: str = "bgamma",
              variant: str = "cohomology") -> GroupExpression:
    """Periodic real K-theory of the classifying or orbit space."""
    _require_odd(G)
    _check_space(space)
    _check_variant(variant)
    even = m % 2 == 0
    half = G.p ** G.k * (G.p - 1) // 2
    if space == "bgamma":
        if variant == "cohomology":
            out = _ko_sum_cohomology(G, m)
            if even:
                out = out + GroupExpression((PAdic(G.p, half),))
            return out
        out = _ko_sum_homology(G, m)
        if not even:
            out = out + GroupExpression((Pruefer(G.p, half),))
        return out
    if variant == "cohomology":
        out = _ko_sum_cohomology(G, m)
        if not even:
            out = out + _to_unknown(G, m)
        return out
    out = _ko_sum_homology(G, m)
    if even:
        out = out + _to_unknown(G, m + 5)
    return out


# --------------------------------------------------------------------------
# group C*-algebra K-theory and equivariant groups


def d_even(G: GammaDescriptor) -> int:
    if G.p == 2:
        value = 3 * 2 ** (G.n - 1)
    else:
        base = 2 ** ((G.p - 1) * G.k)
        value = ((base + G.p - 1) // (2 * G.p)
                 + (G.p - 1) * G.p ** (G.k - 1) // 2
                 + (G.p - 1) * G.p ** G.k)
    check = (G.p - 1) * G.p ** G.k + G.r_even_sum()
    if value != check:
        raise ArithmeticError(f"d_ev mismatch: {value} != {check}")
    return value


def d_odd(G: GammaDescriptor) -> int:
    if G.p == 2:
        value = 0
    else:
        base = 2 ** ((G.p - 1) * G.k)
        value = ((base + G.p - 1) // (2 * G.p)
                 - (G.p - 1) * G.p ** (G.k - 1) // 2)
    check = G.r_odd_sum()
    if value != check:
        raise ArithmeticError(f"d_odd mismatch: {value} != {check}")
    return value


def cstar_k_theory(G: GammaDescriptor, m: int,
                   field_kind: str = "complex") -> GroupExpression:
    """K-theory of the reduced group C*-algebra (complex or real scalars)."""
    if field_kind == "complex":
        return GroupExpression.free(d_even(G) if m % 2 == 0 else d_odd(G))
    if field_kind != "real":
        raise ValueError(f"field must be complex|real, got {field_kind!r}")
    _require_odd(G)
    half = G.p ** G.k * (G.p - 1) // 2
    out = _ko_sum_homology(G, m)
    if m % 2 == 0:
        out = GroupExpression.free(half) + out
    return out


def equivariant_k(G: GammaDescriptor, m: int) -> GroupExpression:
    """Equivariant complex K of the proper classifying space (either variant)."""
    if m % 2 == 0:
        return GroupExpression.free((G.p - 1) * G.p ** G.k + G.r_even_sum())
    return GroupExpression.free(G.r_odd_sum())


def equivariant_ko(G: GammaDescriptor, m: int) -> GroupExpression:
    """Equivariant KO-cohomology of the proper classifying space."""
    _require_odd(G)
    out = _ko_sum_cohomology(G, m)
    if m % 2 == 0:
        out = GroupExpression.free(G.p ** G.k * (G.p - 1) // 2) + out
    return out


@dataclass(frozen=True)
class ExactSequence:
    left: GroupExpression
    middle: GroupExpression
    right: GroupExpression


@dataclass(frozen=True)
class EquivariantSequences:
    complex_seq: ExactSequence
    real_seq: ExactSequence | None


def equivariant_exact_sequences(G: GammaDescriptor,
                                m: int = 0) -> EquivariantSequences:
    """The even-degree restriction sequences onto the orbit space.

    Both sequences have free left-hand terms, so free ranks must be
    additive; that is asserted here.
    """
    if m % 2:
        raise ValueError("the sequences live in even degrees")
    cplx = ExactSequence(
        GroupExpression.free((G.p - 1) * G.p ** G.k),
        cstar_k_theory(G, m, "complex"),
        k_theory_quotient(G, m, "homology"))
    _assert_rank_additivity(cplx)
    real = None
    if G.p != 2:
        real = ExactSequence(
            GroupExpression.free(G.p ** G.k * (G.p - 1) // 2),
            cstar_k_theory(G, m, "real"),
            ko_theory(G, m, "quotient", "homology"))
        _assert_rank_additivity(real)
    return EquivariantSequences(cplx, real)


def _assert_rank_additivity(seq: ExactSequence) -> None:
    def rank(e: GroupExpression) -> int:
        return expr_evaluate(e).free_rank
    if rank(seq.middle) != rank(seq.left) + rank(seq.right):
        raise ArithmeticError(
            f"free ranks not additive: {seq.middle} vs "
            f"{seq.left} and {seq.right}")


# --------------------------------------------------------------------------
# connective real K-homology


def connective_ko(G: GammaDescriptor, m: int,
                  space: str = "bgamma") -> GroupExpression:
    """Connective ko-homology; undetermined torsion is tagged symbolically."""
    _require_odd(G)
    _check_space(space)
    if m < 0:
        raise ValueError("connective theories vanish in negative degrees")
    rv = G.r()
    out = GroupExpression(tuple(KoPoint(m - i, rv[i])
                                for i in range(G.n + 1) if rv[i]))
    odd = m % 2 == 1
    if space == "bgamma" and odd:
        out = out + GroupExpression((UnknownPTorsion(f"to_{m}", None),))
    if space == "quotient" and not odd and m >= 2:
        # in degree 0 the boundary lands in negative connective degrees
        out = out + GroupExpression((UnknownPTorsion(f"to_{m}", None),))
    return out


# --------------------------------------------------------------------------
# independent spectral assembly of the cohomology


def brute_force_cohomology_bgamma(G: GammaDescriptor, m: int) -> GroupExpression:
    """Assemble degree m from invariants and Tate groups of wedge powers.

    Completely independent of the closed forms: every summand comes from
    exact kernel/cokernel computations on the supplied action matrix.
    """
    if m < 0:
        raise ValueError("negative degree")
    free = 0
    torsion = FGAbelianGroup.trivial()
    for j in range(0, min(m, G.n) + 1):
        i = m - j
        mod = G.exterior_dual(j)
        if i == 0:
            free += zpmod.fixed_rank(mod)
        else:
            torsion = direct_sum(torsion, zpmod.tate(mod, i))
    expr = GroupExpression.free(free)
    return expr + torsion.to_expression()


# --------------------------------------------------------------------------
# report assembly


@dataclass
class TheoremReport:
    descriptor: GammaDescriptor
    scalars: dict
    groups: dict
    warnings: list

    def to_json_dict(self) -> dict:
        return {
            "descriptor": {
                "p": self.descriptor.p,
                "n": self.descriptor.n,
                "k": self.descriptor.k,
                "canonical": self.descriptor.canonical,
                "rho": self.descriptor.rho_rows(),
            },
            "scalars": dict(self.scalars),
            "groups": {name: {str(m): expr.render()
                              for m, expr in sorted(degrees.items())}
                       for name, degrees in self.groups.items()},
            "warnings": list(self.warnings),
        }


def build_report(G: GammaDescriptor, window: tuple[int, int] | None = None,
                 cross_check: bool | None = None) -> TheoremReport:
    """Evaluate every theorem family over its degree window.

    For non-canonical actions the closed forms depend only on (p, k); the
    spectral assembly then runs on the supplied matrix and any disagreement
    is recorded as a warning rather than an error.
    """
    fsd = finite_subgroup_data(G)
    abelianization(G)
    scalars = {
        "d_ev": d_even(G),
        "d_odd": d_odd(G),
        "class_count": fsd.class_count,
        "euler": euler_characteristic_quotient(G),
        "fixed_points": fsd.fixed_point_count,
    }
    if window is not None and window[0] > window[1]:
        raise ValueError(f"empty degree window {window}")
    h_window = window or (0, G.n)
    k_window = window or (0, 1)
    ko_window = window or (0, 7)

    def degrees(w, bounded_below=True):
        lo = max(w[0], 0) if bounded_below else w[0]
        return range(lo, w[1] + 1)

    groups: dict[str, dict[int, GroupExpression]] = {}
    groups["H^*(BGamma)"] = {m: cohomology_bgamma(G, m) for m in degrees(h_window)}
    groups["H_*(BGamma)"] = {m: homology_bgamma(G, m) for m in degrees(h_window)}
    groups["H^*(quotient)"] = {m: cohomology_quotient(G, m) for m in degrees(h_window)}
    groups["H_*(quotient)"] = {m: homology_quotient(G, m) for m in degrees(h_window)}
    periodic = dict(bounded_below=False)
    groups["K^*(BGamma)"] = {m: k_theory_bgamma(G, m, "cohomology") for m in degrees(k_window, **periodic)}
    groups["K_*(BGamma)"] = {m: k_theory_bgamma(G, m, "homology") for m in degrees(k_window, **periodic)}
    groups["K^*(quotient)"] = {m: k_theory_quotient(G, m, "cohomology") for m in degrees(k_window, **periodic)}
    groups["K_*(quotient)"] = {m: k_theory_quotient(G, m, "homology") for m in degrees(k_window, **periodic)}
    warnings: list[str] = []
    if G.p != 2:
        groups["KO^*(BGamma)"] = {m: ko_theory(G, m, "bgamma", "cohomology") for m in degrees(ko_window, **periodic)}
        groups["KO_*(BGamma)"] = {m: ko_theory(G, m, "bgamma", "homology") for m in degrees(ko_window, **periodic)}
        groups["KO^*(quotient)"] = {m: ko_theory(G, m, "quotient", "cohomology") for m in degrees(ko_window, **periodic)}
        groups["KO_*(quotient)"] = {m: ko_theory(G, m, "quotient", "homology") for m in degrees(ko_window, **periodic)}
    else:
        warnings.append("KO/ko sections omitted: p odd required")
    groups["K_*(Cstar)"] = {m: cstar_k_theory(G, m, "complex") for m in degrees(k_window, **periodic)}
    if G.p != 2:
        groups["KO_*(CstarR)"] = {m: cstar_k_theory(G, m, "real") for m in degrees(ko_window, **periodic)}
    groups["K^*(equivariant)"] = {m: equivariant_k(G, m) for m in degrees(k_window, **periodic)}
    if G.p != 2:
        groups["KO^*(equivariant)"] = {m: equivariant_ko(G, m) for m in degrees(ko_window, **periodic)}
        groups["ko_*(BGamma)"] = {m: connective_ko(G, m, "bgamma")
                                  for m in degrees(ko_window)}
        groups["ko_*(quotient)"] = {m: connective_ko(G, m, "quotient")
                                    for m in degrees(ko_window)}
    if cross_check is None:
        cross_check = not G.canonical
    if cross_check:
        warnings.extend(_cross_check_cohomology(G, h_window))
    groups = {name: {m: expr_evaluate(e) for m, e in degs.items()}
              for name, degs in groups.items()}
    return TheoremReport(G, scalars, groups, warnings)


def _cross_check_cohomology(G: GammaDescriptor,
                            window: tuple[int, int]) -> list[str]:
    out = []
    for m in range(max(window[0], 0), min(window[1], G.n) + 1):
        try:
            assembled = brute_force_cohomology_bgamma(G, m)
        except ValueError:
            out.append(f"cross-check skipped in degree {m}: "
                       "exterior dimension guardrail")
            break
        closed = cohomology_bgamma(G, m)
        if assembled != closed:
            out.append(
                f"degree {m}: assembled cohomology {assembled} disagrees "
                f"with closed form {closed}")
    return out
