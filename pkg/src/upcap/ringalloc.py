"""Ring-constrained resource allocation.

N providers sit on a ring; provider i may serve only consumers i and
(i+1) mod N, under per-provider supply caps S(i) and per-consumer demand
caps P(i).  With x units fixed from provider 0 to consumer 0, a single
greedy pass maximizes the total allocation, and the whole profile
rsum(x) for x in [0, XMAX] has a rise/plateau/fall shape with unit slopes.

Four routes to the profile, in increasing cleverness:
  * brute_force_oracle - exhaustive enumeration (small instances only),
  * rsum_naive         - one greedy pass per x,
  * rsum_sweep         - breakpoint events over the piecewise-unit f/g chain,
  * rsum_closed_form   - the whole profile from three or four greedy calls.
"""

from __future__ import annotations

from dataclasses import dataclass

ORACLE_GUARD = 10**7


class InstanceTooLarge(ValueError):
    pass


class ShapeViolation(AssertionError):
    """The empirically-validated piecewise structure failed for an instance."""


@dataclass(frozen=True)
class AllocationInstance:
    s: tuple[int, ...]
    p: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", tuple(int(v) for v in self.s))
        object.__setattr__(self, "p", tuple(int(v) for v in self.p))
        if len(self.s) != len(self.p):
            raise ValueError("S and P must have the same length")
        if len(self.s) < 2:
            raise ValueError("need N >= 2 (at N=1 both targets of provider 0 coincide)")
        if any(v < 0 for v in self.s) or any(v < 0 for v in self.p):
            raise ValueError("capacities must be non-negative")

    @property
    def n(self) -> int:
        return len(self.s)

    @property
    def xmax(self) -> int:
        return min(self.s[0], self.p[0])


@dataclass(frozen=True)
class AllocationResult:
    own: tuple[int, ...]    # ralloc(i, i)
    next: tuple[int, ...]   # ralloc(i, (i+1) mod N)
    total: int

    def check_feasible(self, inst: AllocationInstance) -> None:
        n = inst.n
        for i in range(n):
            if self.own[i] < 0 or self.next[i] < 0:
                raise AssertionError("negative allocation")
            if self.own[i] + self.next[i] > inst.s[i]:
                raise AssertionError(f"supply constraint violated at provider {i}")
            if self.own[i] + self.next[(i - 1) % n] > inst.p[i]:
                raise AssertionError(f"demand constraint violated at consumer {i}")
        if self.total != sum(self.own) + sum(self.next):
            raise AssertionError("total does not match the allocation vectors")


def greedy_total(s, p, x: int) -> int:
    """Total allocation of the greedy pass with ralloc(0,0)=x.  Hot path for
    the naive profile; bare sequences in, int out."""
    n = len(s)
    total = x
    prev_next = 0
    for i in range(n):
        if i:
            own = s[i]
            cap = p[i] - prev_next
            if cap < own:
                own = cap
            total += own
        else:
            own = x
        nxt = s[i] - own
        cap = p[0] - x if i == n - 1 else p[i + 1]
        if cap < nxt:
            nxt = cap
        total += nxt
        prev_next = nxt
    return total


def greedy_algo(inst: AllocationInstance, x: int) -> AllocationResult:
    """Greedy pass over providers 0..N-1: fill consumer i, then spill the
    remainder to consumer (i+1) mod N."""
    if not (0 <= x <= inst.xmax):
        raise ValueError(f"x must lie in [0, {inst.xmax}]")
    s, p, n = inst.s, inst.p, inst.n
    own = [0] * n
    nxt = [0] * n
    own[0] = x
    prev_next = 0
    for i in range(n):
        if i:
            own[i] = min(s[i], p[i] - prev_next)
        spill_cap = p[0] - x if i == n - 1 else p[i + 1]
        nxt[i] = min(s[i] - own[i], spill_cap)
        prev_next = nxt[i]
    result = AllocationResult(tuple(own), tuple(nxt), sum(own) + sum(nxt))
    result.check_feasible(inst)
    return result


def brute_force_oracle(inst: AllocationInstance, x: int) -> int:
    """Maximum total over every feasible integer assignment with own(0)=x.

    Pure enumeration (with an admissible upper-bound prune); kept fully
    independent of the greedy so the two can cross-check each other.
    """
    if not (0 <= x <= inst.xmax):
        raise ValueError(f"x must lie in [0, {inst.xmax}]")
    s, p, n = inst.s, inst.p, inst.n
    combos = 1
    for si in s:
        combos *= (si + 1) * (si + 1)
        if combos > ORACLE_GUARD:
            raise InstanceTooLarge(f"more than {ORACLE_GUARD} candidate assignments")
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + s[i]
    best = -1

    def rec(i: int, prev_next: int, total: int) -> None:
        nonlocal best
        if total + suffix[i] <= best:
            return
        if i == n:
            best = total
            return
        own_hi = x if i == 0 else min(s[i], p[i] - prev_next)
        own_lo = x if i == 0 else 0
        for own in range(own_hi, own_lo - 1, -1):
            spill_cap = p[0] - x if i == n - 1 else p[i + 1]
            for nx in range(min(s[i] - own, spill_cap), -1, -1):
                rec(i + 1, nx, total + own + nx)

    rec(0, 0, 0)
    return best


def rsum_naive(inst: AllocationInstance) -> list[int]:
    s, p = inst.s, inst.p
    return [greedy_total(s, p, x) for x in range(inst.xmax + 1)]


# -- piecewise-unit functions and the breakpoint sweep --------------------


@dataclass(frozen=True)
class PiecewiseUnitFn:
    """Integer function on [0, xmax] whose unit steps are run-length encoded:
    runs of (count, slope) with slope in {-1, 0, +1}."""

    xmax: int
    v0: int
    runs: tuple[tuple[int, int], ...]

    @staticmethod
    def constant(xmax: int, c: int) -> "PiecewiseUnitFn":
        return PiecewiseUnitFn(xmax, c, ((xmax, 0),) if xmax else ())

    @staticmethod
    def line(xmax: int, v0: int, slope: int) -> "PiecewiseUnitFn":
        return PiecewiseUnitFn(xmax, v0, ((xmax, slope),) if xmax else ())

    @staticmethod
    def from_values(vals) -> "PiecewiseUnitFn":
        runs: list[list[int]] = []
        for a, b in zip(vals, vals[1:]):
            d = b - a
            if abs(d) > 1:
                raise ValueError("steps must have unit magnitude")
            if runs and runs[-1][1] == d:
                runs[-1][0] += 1
            else:
                runs.append([1, d])
        return PiecewiseUnitFn(len(vals) - 1, vals[0], tuple((c, s) for c, s in runs))

    def values(self) -> list[int]:
        out = [self.v0]
        v = self.v0
        for count, slope in self.runs:
            for _ in range(count):
                v += slope
                out.append(v)
        return out

    def value(self, x: int) -> int:
        if not (0 <= x <= self.xmax):
            raise ValueError("x outside the domain")
        v = self.v0
        pos = 0
        for count, slope in self.runs:
            take = min(count, x - pos)
            if take <= 0:
                break
            v += slope * take
            pos += take
        return v

    def nonzero_slope_runs(self) -> list[int]:
        """Slopes of the non-constant runs, after merging; used for shape checks."""
        out: list[int] = []
        for count, slope in self.runs:
            if count > 0 and slope != 0:
                if not out or out[-1] != slope:
                    out.append(slope)
                else:
                    out[-1] = slope
        # merge consecutive identical handled above; nothing else to do
        return out


def _normalize(runs: list[list[int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for count, slope in runs:
        if count <= 0:
            continue
        if out and out[-1][1] == slope:
            out[-1][0] += count
        else:
            out.append([count, slope])
    return tuple((c, s) for c, s in out)


def pw_complement(c: int, fn: PiecewiseUnitFn) -> PiecewiseUnitFn:
    """c - fn(x), run by run."""
    return PiecewiseUnitFn(fn.xmax, c - fn.v0, _normalize([[cnt, -s] for cnt, s in fn.runs]))


def pw_min(f: PiecewiseUnitFn, g: PiecewiseUnitFn) -> PiecewiseUnitFn:
    """Pointwise min of two piecewise-unit functions, in O(runs) time.

    Within a stretch where both slopes are constant the difference f-g is
    linear, so the winner changes at most once; the only subtle step is a
    strict sign flip (slope difference 2), where the min switches functions
    mid-step.
    """
    if f.xmax != g.xmax:
        raise ValueError("domain mismatch")
    # materialize aligned stretches
    bounds = {0, f.xmax}
    for fn in (f, g):
        pos = 0
        for count, _ in fn.runs:
            pos += count
            bounds.add(pos)
    cuts = sorted(bounds)

    def slope_at(fn: PiecewiseUnitFn, pos: int) -> int:
        # slope of the step from pos to pos+1
        p = 0
        for count, slope in fn.runs:
            if pos < p + count:
                return slope
            p += count
        return 0

    runs: list[list[int]] = []
    vf, vg = f.v0, g.v0
    v_min = min(vf, vg)
    for a, b in zip(cuts, cuts[1:]):
        L = b - a
        sf, sg = slope_at(f, a), slope_at(g, a)
        d0 = vf - vg
        ds = sf - sg
        # split the stretch into sub-runs of the min
        t = 0
        while t < L:
            d_here = d0 + t * ds
            if ds == 0:
                slope = sf if d_here <= 0 else sg
                runs.append([L - t, slope])
                t = L
            elif ds > 0:
                if d_here > 0:
                    runs.append([L - t, sg])
                    t = L
                else:
                    # steps stay on f while d <= 0
                    t_neg = min(L, t + (-d_here) // ds)
                    if t_neg > t:
                        runs.append([t_neg - t, sf])
                        t = t_neg
                    elif t_neg == t:
                        # next step crosses: d goes negative -> positive
                        d_next = d0 + (t + 1) * ds
                        if d_next <= 0:
                            runs.append([1, sf])
                        elif d_here == 0:
                            runs.append([1, sg])
                        else:
                            runs.append([1, sf - d_next])
                        t += 1
            else:  # ds < 0, g overtaken by f
                if d_here < 0:
                    runs.append([L - t, sf])
                    t = L
                else:
                    t_pos = min(L, t + d_here // (-ds))
                    if t_pos > t:
                        runs.append([t_pos - t, sg])
                        t = t_pos
                    elif t_pos == t:
                        d_next = d0 + (t + 1) * ds
                        if d_next >= 0:
                            runs.append([1, sg])
                        elif d_here == 0:
                            runs.append([1, sf])
                        else:
                            runs.append([1, sg + d_next])
                        t += 1
        vf += sf * L
        vg += sg * L
    result = PiecewiseUnitFn(f.xmax, v_min, _normalize(runs))
    return result


def _check_shape(fn: PiecewiseUnitFn, allowed: list[list[int]], what: str) -> None:
    sig = fn.nonzero_slope_runs()
    if sig not in allowed:
        raise ShapeViolation(f"{what} has slope pattern {sig}")


def compute_fg(inst: AllocationInstance) -> tuple[list[PiecewiseUnitFn], list[PiecewiseUnitFn]]:
    """The per-provider own/spill allocation functions of x, built by O(1)
    piecewise composition in ring order (g(1) from f(0), f(1) from g(1), ...,
    g(0) last).  Their 3-piece (4-piece for g(0)) structure is asserted."""
    s, p, n = inst.s, inst.p, inst.n
    xmax = inst.xmax
    f: list[PiecewiseUnitFn | None] = [None] * n
    g: list[PiecewiseUnitFn | None] = [None] * n
    f[0] = PiecewiseUnitFn.line(xmax, 0, +1)
    for i in range(1, n):
        g[i] = pw_min(pw_complement(s[i - 1], f[i - 1]), PiecewiseUnitFn.constant(xmax, p[i]))
        f[i] = pw_min(pw_complement(p[i], g[i]), PiecewiseUnitFn.constant(xmax, s[i]))
    g[0] = pw_min(pw_complement(s[n - 1], f[n - 1]), PiecewiseUnitFn.line(xmax, p[0], -1))
    for i in range(n):
        _check_shape(f[i], [[], [1]], f"f({i})")
    for i in range(1, n):
        _check_shape(g[i], [[], [-1]], f"g({i})")
    _check_shape(g[0], [[], [-1], [-1, -1]], "g(0)")
    return f, g  # type: ignore[return-value]


def rsum_sweep(inst: AllocationInstance) -> list[int]:
    """Profile via slope-change events of the f/g chain: one running slope
    total Dif, updated per event, fills the gaps between breakpoints."""
    f, g = compute_fg(inst)
    fns = f + g
    events: list[tuple[int, int, int]] = []
    for fid, fn in enumerate(fns):
        pos = 0
        prev = 0
        for count, slope in fn.runs:
            if count == 0:
                continue
            if slope != prev:
                events.append((pos, fid, slope))
                prev = slope
            pos += count
    events.sort(key=lambda e: e[0])
    xmax = inst.xmax
    out = [0] * (xmax + 1)
    total = sum(fn.v0 for fn in fns)
    out[0] = total
    dif = 0
    slopes = [0] * len(fns)
    cur = 0
    for ex, fid, slope in events:
        for x in range(cur + 1, ex + 1):
            out[x] = total + dif * (x - cur)
        total += dif * (ex - cur)
        cur = ex
        dif += slope - slopes[fid]
        slopes[fid] = slope
    for x in range(cur + 1, xmax + 1):
        out[x] = total + dif * (x - cur)
    return out


# -- closed form ----------------------------------------------------------


@dataclass(frozen=True)
class RsumProfile:
    xmax: int
    y1: int      # rsum(0)
    y2: int      # rsum(XMAX)
    x1: int
    x2: int
    yx1: int
    yx2: int
    d1: int
    d2: int

    @property
    def rise_end(self) -> int:
        return self.x1 - self.d1

    @property
    def plateau_end(self) -> int:
        return self.x2 + self.d2

    @property
    def plateau_value(self) -> int:
        return self.yx1

    def expand(self) -> list[int]:
        out = []
        for x in range(self.xmax + 1):
            if x <= self.rise_end:
                out.append(self.y1 + x)
            elif x <= self.plateau_end:
                out.append(self.yx1)
            else:
                out.append(self.y2 + (self.xmax - x))
        return out


def rsum_closed_form(inst: AllocationInstance) -> RsumProfile:
    """Whole profile from greedy evaluations at 0, XMAX and one or two
    midpoints: the rise/plateau/fall shape leaves only the corner offsets
    d1, d2 to pin down."""
    s, p = inst.s, inst.p
    xmax = inst.xmax
    y1 = greedy_total(s, p, 0)
    y2 = greedy_total(s, p, xmax)
    span = y2 - y1 + xmax
    x1 = span // 2  # floor division; span may be negative but |y2-y1| <= xmax keeps x1 in range
    yx1 = greedy_total(s, p, x1)
    if span % 2:
        x2 = x1 + 1
        yx2 = greedy_total(s, p, x2)
    else:
        x2, yx2 = x1, yx1
    d1 = y1 + x1 - yx1
    d2 = y2 + (xmax - x2) - yx2
    return RsumProfile(xmax, y1, y2, x1, x2, yx1, yx2, d1, d2)


def rsum_max(inst: AllocationInstance) -> tuple[int, int]:
    """(smallest maximizing x, maximum total)."""
    prof = rsum_closed_form(inst)
    return max(0, prof.rise_end), prof.plateau_value


# -- text formats ---------------------------------------------------------


def parse_instance(text: str) -> AllocationInstance:
    """Two-line format: 'S: a b c' / 'P: a b c' (order-insensitive)."""
    s = p = None
    for line in text.strip().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(":")
        vals = [int(tok) for tok in rest.replace(",", " ").split()]
        if key.strip().upper() == "S":
            s = vals
        elif key.strip().upper() == "P":
            p = vals
        else:
            raise ValueError(f"unrecognized line {line!r}")
    if s is None or p is None:
        raise ValueError("instance needs both an S: and a P: line")
    return AllocationInstance(tuple(s), tuple(p))


def format_instance(inst: AllocationInstance) -> str:
    return "S: " + " ".join(map(str, inst.s)) + "\nP: " + " ".join(map(str, inst.p)) + "\n"
