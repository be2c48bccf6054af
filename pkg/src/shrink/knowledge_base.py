"""Merging cones into sub-bases and picking each sub-base's compact slope.

Cones sharing a quantized origin are sorted by lower slope and greedily
merged while their spans keep a common intersection; on 1-D intervals this
greedy sweep yields the minimum possible number of groups.  The slope kept
for a merged span is a short decimal: either the mean rounded to one
decimal digit (bounds with different integer parts) or the bounds' shared
digit prefix extended by the floor-mean of their first divergent digits.
"""

from __future__ import annotations

from .model import Cone, KnowledgeBase, SubBase

__all__ = ["build_base", "choose_slope"]

_MAX_SIG_DIGITS = 17


def _one_decimal_mean(lo: float, hi: float) -> float:
    return round((lo + hi) / 2.0, 1)


def _frac_digits(magnitude: float) -> str:
    """Decimal digits after the point of a non-negative float, 40 places."""
    return format(magnitude, ".40f").split(".")[1]


def digit_candidate(lo: float, hi: float) -> float:
    """The raw candidate-line slope before the containment guard.

    Exposed separately so tests can count how often the guard has to snap
    the candidate back into the span.
    """
    if lo == hi:
        return lo
    if (lo < 0) != (hi < 0):
        # mixed-sign span: digit walks are undefined across zero
        return _one_decimal_mean(lo, hi)
    negative = lo < 0
    # order by magnitude (flips for negative spans)
    a, b = (abs(hi), abs(lo)) if negative else (abs(lo), abs(hi))
    int_a, int_b = int(a), int(b)
    if int_a != int_b:
        return _one_decimal_mean(lo, hi)

    sig = len(str(int_a)) if int_a > 0 else 0
    prefix = []
    for da, db in zip(_frac_digits(a), _frac_digits(b)):
        if sig >= _MAX_SIG_DIGITS:
            break
        if da == db:
            prefix.append(da)
            if sig > 0 or da != "0":
                sig += 1
            continue
        mean_digit = (int(da) + int(db)) // 2
        value = float(f"{int_a}.{''.join(prefix)}{mean_digit}")
        return -value if negative else value
    # expansions agree through the significance cap; lo is inside the span
    return lo


def choose_slope(span_lo: float, span_hi: float) -> float:
    """Pick the sub-base's stored slope; always lies within [span_lo, span_hi]."""
    if span_lo > span_hi:
        raise ValueError(f"empty span [{span_lo}, {span_hi}]")
    candidate = digit_candidate(span_lo, span_hi)
    if candidate < span_lo:
        return span_lo
    if candidate > span_hi:
        return span_hi
    return candidate


def _validate_coverage(cones: list[Cone], n: int) -> None:
    pos = 0
    for c in sorted(cones, key=lambda c: c.start):
        if c.start != pos:
            raise ValueError(f"cones do not tile [0, {n}): gap/overlap at index {pos}")
        pos = c.start + c.length
    if pos != n:
        raise ValueError(f"cones cover [0, {pos}), series has {n} points")


def build_base(cones: list[Cone], n: int, *, eps_b: float, lam: float) -> KnowledgeBase:
    """Group cones by origin, merge intersecting spans, choose slopes.

    Output ordering is deterministic: sub-bases sorted by (origin, span_lo,
    first start); within a group, cones are scanned in (span_lo, start)
    order and runs of pairwise-intersecting spans collapse into one
    SubBase whose span is the running intersection.
    """
    if not cones:
        raise ValueError("no cones to merge")
    _validate_coverage(cones, n)

    groups: dict[float, list[Cone]] = {}
    for c in cones:
        groups.setdefault(c.origin, []).append(c)

    sub_bases: list[SubBase] = []
    for origin in sorted(groups):
        members = sorted(groups[origin], key=lambda c: (c.span_lo, c.start))
        run: list[Cone] = [members[0]]
        run_lo, run_hi = members[0].span_lo, members[0].span_hi
        for c in members[1:]:
            lo = max(run_lo, c.span_lo)
            hi = min(run_hi, c.span_hi)
            if lo <= hi:
                run_lo, run_hi = lo, hi
                run.append(c)
            else:
                sub_bases.append(_emit(origin, run_lo, run_hi, run))
                run = [c]
                run_lo, run_hi = c.span_lo, c.span_hi
        sub_bases.append(_emit(origin, run_lo, run_hi, run))

    return KnowledgeBase(
        sub_bases=tuple(sub_bases),
        n=n,
        eps_b=eps_b,
        lam=lam,
        eps_hat_max=max(c.eps_hat for c in cones),
    )


def _emit(origin: float, lo: float, hi: float, run: list[Cone]) -> SubBase:
    starts = tuple(sorted((c.start, c.length) for c in run))
    return SubBase(
        origin=origin,
        span_lo=lo,
        span_hi=hi,
        slope=choose_slope(lo, hi),
        starts=starts,
    )
