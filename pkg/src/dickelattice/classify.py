"""Pattern taxonomy of steady states and symmetry canonicalization.

Labels: NP / InvertedNP (dark states), P1 (homogeneous, ring only), P2
(pair plus opposite-sign third, three-site ring), O1-O4 (three-site open
chain), OTHER (fallback with a site-profile fingerprint).  Template
matching uses eps_pattern for amplitude equality, and asserts a sign for
Re a_j only when |Re a_j| > eps_pattern.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .model import (BoundaryCondition, LatticeParams, MeanFieldState,
                    params_to_jsonable, state_to_jsonable, symmetry_orbit)
from .steady_state import FixedPoint, RootSearchResult
from .stability import (EPS_MARGINAL, EPS_ZERO, StabilityReport, Verdict,
                        classify as stability_classify)

EPS_PATTERN = 1e-5
CANON_TOL = 1e-7


class PatternKind(enum.Enum):
    NP = "NP"
    InvertedNP = "InvertedNP"
    P1 = "P1"
    P2 = "P2"
    O1 = "O1"
    O2 = "O2"
    O3 = "O3"
    O4 = "O4"
    OTHER = "OTHER"


@dataclass(frozen=True)
class PatternLabel:
    kind: PatternKind
    detail: str

    def __str__(self):
        return self.kind.value


def _as_state(fp) -> MeanFieldState:
    if isinstance(fp, FixedPoint):
        return fp.state
    return fp


def _fingerprint(a, eps):
    """Site-equality classes of the amplitude profile, dark sites as 0."""
    letters = []
    reps = []        # (letter, amplitude) in first-occurrence order
    for aj in a:
        if abs(aj) < eps:
            letters.append("0")
            continue
        for letter, rep in reps:
            if abs(aj - rep) < eps:
                letters.append(letter)
                break
        else:
            letter = chr(ord("a") + len(reps))
            reps.append((letter, aj))
            letters.append(letter)
    return "".join(letters)


def label(fp, params: LatticeParams, eps_pattern: float = EPS_PATTERN) -> PatternLabel:
    """Deterministic template match, most to least constrained.

    Precedence: NP / InvertedNP -> P1 -> P2 -> O2 -> O1 -> O4 -> O3 ->
    OTHER.  P1 requires the ring (no homogeneous states exist on the open
    chain); P2 the three-site ring; O1-O4 the three-site open chain.
    """
    state = _as_state(fp)
    a = state.a
    z = state.z
    n = state.n
    eps = eps_pattern
    periodic = params.bc is BoundaryCondition.Periodic

    dark = bool(np.all(np.abs(a) < eps))
    if dark and np.all(np.abs(z + 0.5) < eps):
        return PatternLabel(PatternKind.NP, "all sites dark, inversion -1/2")
    if dark and np.all(np.abs(z - 0.5) < eps):
        return PatternLabel(PatternKind.InvertedNP, "all sites dark, inversion +1/2")

    if periodic and not dark:
        same_a = np.max(np.abs(a - a[0])) < eps
        same_s = np.max(np.abs(state.s - state.s[0])) < eps
        same_z = np.max(np.abs(z - z[0])) < eps
        if same_a and same_s and same_z:
            return PatternLabel(PatternKind.P1, "homogeneous, all sites identical")

    if periodic and n == 3:
        for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
            if (abs(a[i] - a[j]) < eps and abs(a[i] - a[k]) >= eps
                    and abs(a[i].real) > eps and abs(a[k].real) > eps
                    and a[i].real * a[k].real < 0):
                return PatternLabel(
                    PatternKind.P2,
                    f"sites {i + 1},{j + 1} equal, site {k + 1} opposite sign")

    if not periodic and n == 3:
        re = a.real
        if abs(a[1]) < eps and abs(a[0] + a[2]) < eps and abs(a[0]) >= eps:
            return PatternLabel(
                PatternKind.O2, "end sites antisymmetric, middle site dark")
        if np.all(np.abs(re) > eps) and (np.all(re > 0) or np.all(re < 0)):
            return PatternLabel(PatternKind.O1, "all real parts share one sign")
        if (np.all(np.abs(re) > eps) and re[0] * re[2] > 0
                and re[0] * re[1] < 0):
            return PatternLabel(
                PatternKind.O4, "end sites share one sign, middle site opposite")
        if (np.all(np.abs(a) >= eps) and abs(a[0] - a[1]) >= eps
                and abs(a[1] - a[2]) >= eps and abs(a[0] - a[2]) >= eps):
            return PatternLabel(PatternKind.O3, "all sites distinct and nonzero")

    return PatternLabel(PatternKind.OTHER,
                        f"profile classes {_fingerprint(a, eps)}")


# ---------------------------------------------------------------------------
# canonical representatives

def _lex_less(x, y, tol):
    # lexicographic order that treats coordinates within tol as tied, so
    # the chosen representative is stable against root-solver noise
    for xv, yv in zip(x, y):
        if xv < yv - tol:
            return True
        if xv > yv + tol:
            return False
    return False


def canonicalize(fp, params: LatticeParams, tol: float = CANON_TOL) -> MeanFieldState:
    """Smallest orbit member under a fixed coordinate-wise total order.

    The orbit is sign flip x cyclic shifts (ring) or sign flip x
    reflection (open chain); orbit members of one numeric root are exact
    images, so the minimum is well defined up to tol.
    """
    if isinstance(fp, FixedPoint) and not fp.converged:
        raise ValueError("canonicalize requires a converged fixed point")
    state = _as_state(fp)
    best = state
    best_y = state.pack()
    for cand in symmetry_orbit(state, params.bc)[1:]:
        y = cand.pack()
        if _lex_less(y, best_y, tol):
            best, best_y = cand, y
    return best


def stable_class_set(roots, reports, params: LatticeParams, *,
                     eps_pattern: float = EPS_PATTERN,
                     dedup_tol: float = 1e-5,
                     canon_tol: float = CANON_TOL) -> Counter:
    """Multiset of pattern labels over the distinct stable orbit classes.

    roots and reports run in parallel; symmetry partners collapse onto one
    canonical representative each, so a six-member broken-symmetry family
    counts once.  Returns Counter {kind string: multiplicity}; its total
    is 1 for monostable cells, 2 for bistable, 3 for tristable.
    """
    classes = []   # (canonical packed vector, representative state)
    for fp, rep in zip(roots, reports):
        if rep.verdict is not Verdict.Stable:
            continue
        canon = canonicalize(fp, params, tol=canon_tol)
        y = canon.pack()
        if any(np.max(np.abs(y - y0)) < dedup_tol for y0, _ in classes):
            continue
        classes.append((y, canon))
    out = Counter()
    for _, canon in classes:
        out[label(canon, params, eps_pattern).kind.value] += 1
    return out


# Letter names for the three-site phase regions.  The mapping below was
# reconstructed from reproduction runs of the stable-class sets; it is
# reported as "inferred" in output metadata, and combinations not listed
# are emitted verbatim as their label multiset.
_LETTERS_PERIODIC = {
    ("NP",): "A",
    ("P1",): "B",
    ("P2",): "C",
    ("P1", "P2"): "D",
}
_LETTERS_OPEN = {
    ("NP",): "A",
    ("O1",): "B",
    ("O2",): "C",
    ("O3",): "D",
    ("O1", "O3"): "F",
    ("O3", "O4"): "H",
    ("O1", "O3", "O4"): "I",
}
LETTER_TABLE_PROVENANCE = "inferred from reproduction runs"


def phase_letter(class_counts: Counter, bc: BoundaryCondition):
    """Region letter for a stable-class multiset, or None if not listed."""
    key = tuple(sorted(class_counts.elements()))
    table = _LETTERS_PERIODIC if bc is BoundaryCondition.Periodic else _LETTERS_OPEN
    return table.get(key)


# ---------------------------------------------------------------------------
# JSON-friendly root dossier

def root_dossier(params: LatticeParams, result: RootSearchResult, *,
                 eps_pattern: float = EPS_PATTERN,
                 eps_marginal: float = EPS_MARGINAL,
                 eps_zero: float = EPS_ZERO) -> dict:
    """Full account of a root search: states, verdicts, labels, classes."""
    entries = []
    reports = []
    for fp in result.roots:
        try:
            rep = stability_classify(fp, params, eps_marginal=eps_marginal,
                                     eps_zero=eps_zero)
            verdict = rep.verdict.value
            abscissa = rep.spectral_abscissa
        except Exception as exc:   # degenerate inputs stay visible, not fatal
            rep = None
            verdict = f"error: {exc}"
            abscissa = None
        reports.append(rep)
        lab = label(fp, params, eps_pattern)
        entries.append({
            "state": state_to_jsonable(fp.state),
            "residual": fp.residual,
            "converged": fp.converged,
            "seed_tag": fp.seed_tag,
            "verdict": verdict,
            "spectral_abscissa": abscissa,
            "label": lab.kind.value,
            "label_detail": lab.detail,
        })

    ok = [(fp, rep) for fp, rep in zip(result.roots, reports) if rep is not None]
    counts = stable_class_set([fp for fp, _ in ok], [rep for _, rep in ok],
                              params, eps_pattern=eps_pattern)
    letter = phase_letter(counts, params.bc)
    return {
        "params": params_to_jsonable(params),
        "roots": entries,
        "stable_classes": dict(counts),
        "n_stable_classes": sum(counts.values()),
        "phase_letter": letter,
        "letter_table": LETTER_TABLE_PROVENANCE,
        "seed_metadata": result.seed_metadata,
    }
