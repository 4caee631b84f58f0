"""Exhaustive checks of the identities linking T and the F_n family.

Every verifier sweeps a finite grid with exact integer/rational arithmetic
and returns a :class:`VerificationReport`. Grids are split by their first
axis into chunks that can run in worker processes; chunk reports merge
associatively.
"""
from __future__ import annotations

import enum
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Iterable, Sequence

from .analysis import closed_forms, format_fraction, parity_vector
from .dynamics import CollatzT, FamilyF, StopReason, f_orbit, run_until, t_orbit

MAX_REPORTED_FAILURES = 100


class Identity(str, enum.Enum):
    CONJUGACY = "conjugacy"
    AVERAGE = "average"
    PARTIAL_MEAN = "partial-mean"
    OFFSET = "offset"
    BOUND_TRANSFER = "bound-transfer"
    PARITY = "parity"
    PARITY_COUNT = "parity-count"
    COEFF = "coeff"
    COEFF_PAIR = "coeff-pair"
    LOWER_BOUND = "lower-bound"
    REACH = "reach"
    CHROMA = "chroma"


# Short names used in the literature for the same statements; accepted by the CLI.
IDENTITY_ALIASES = {
    "thm2.1": Identity.CONJUGACY,
    "prop2.2": Identity.AVERAGE,
    "thm2.2": Identity.PARTIAL_MEAN,
    "cor2.1": Identity.OFFSET,
    "cor2.2": Identity.OFFSET,
    "cor2.3": Identity.BOUND_TRANSFER,
    "cor2.4": Identity.PARITY,
    "cor2.5": Identity.PARITY_COUNT,
    "cor2.6": Identity.COEFF_PAIR,
    "prop2.3": Identity.COEFF,
    "cor2.8": Identity.LOWER_BOUND,
    "thm2.3": Identity.REACH,
}


def resolve_identity(name: str) -> Identity:
    key = name.strip().lower()
    if key in IDENTITY_ALIASES:
        return IDENTITY_ALIASES[key]
    return Identity(key)


@dataclass
class VerificationReport:
    identity: Identity
    params: dict
    checked: int = 0
    failures: list[tuple] = field(default_factory=list)
    failure_count: int = 0
    observed: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def fail(self, *point) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_REPORTED_FAILURES:
            self.failures.append(tuple(point))

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        if other.identity != self.identity:
            raise ValueError("cannot merge reports of different identities")
        out = VerificationReport(self.identity, dict(self.params))
        out.checked = self.checked + other.checked
        out.failures = (self.failures + other.failures)[:MAX_REPORTED_FAILURES]
        out.failure_count = self.failure_count + other.failure_count
        out.observed = _merge_observed(self.observed, other.observed)
        return out

    def to_dict(self) -> dict:
        return {
            "identity": self.identity.value,
            "passed": self.passed,
            "params": self.params,
            "checked": self.checked,
            "failure_count": self.failure_count,
            "failures": [list(f) for f in self.failures],
            "observed": self.observed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        return cls(
            identity=Identity(data["identity"]),
            params=dict(data["params"]),
            checked=data["checked"],
            failures=[tuple(f) for f in data["failures"]],
            failure_count=data["failure_count"],
            observed=dict(data["observed"]),
        )


def _merge_observed(a: dict, b: dict) -> dict:
    out = dict(a)
    for key, value in b.items():
        if key not in out:
            out[key] = value
        elif key == "max_steps":
            out[key] = max(out[key], value)
        elif key == "histogram":
            merged = Counter({int(s): c for s, c in out[key].items()})
            merged.update({int(s): c for s, c in value.items()})
            out[key] = {str(s): merged[s] for s in sorted(merged)}
        elif isinstance(value, dict):
            out[key] = _merge_observed(out[key], value)
        elif isinstance(value, list):
            out[key] = sorted(set(out[key]) | set(value))
        else:
            out[key] = value
    return out


def describe_range(values: Sequence[int]) -> str:
    values = list(values)
    if not values:
        return "empty"
    if len(values) == 1:
        return str(values[0])
    if values == list(range(values[0], values[-1] + 1)):
        return f"{values[0]}..{values[-1]}"
    return ",".join(map(str, values))


def default_workers() -> int:
    return os.cpu_count() or 1


def _sweep(
    identity: Identity,
    params: dict,
    chunk_fn: Callable[[Sequence[int]], VerificationReport],
    items: Sequence[int],
    workers: int | None,
) -> VerificationReport:
    items = list(items)
    workers = default_workers() if workers is None else max(1, workers)
    report = VerificationReport(identity, params)
    if not items:
        return report
    if workers == 1 or len(items) == 1:
        return report.merge(chunk_fn(items))
    size = max(1, -(-len(items) // (workers * 4)))
    chunks = [items[i : i + size] for i in range(0, len(items), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(chunk_fn, chunks):
            report = report.merge(part)
    return report


def _positive(values: Iterable[int]) -> list[int]:
    values = list(values)
    if any(v < 1 for v in values):
        raise ValueError("N values must be positive integers")
    return values


def _check_k(k_max: int) -> None:
    if k_max < 0:
        raise ValueError("k_max must be >= 0")


# --- conjugacy: T^k(N) + A_n == F_n^k(N + A_n) ---------------------------------


def _conjugacy_chunk(Ns, ns, k_max):
    report = VerificationReport(Identity.CONJUGACY, {})
    for N in Ns:
        t = t_orbit(N, k_max)
        for n in ns:
            shift = 2 * n + 1
            f = f_orbit(n, N + shift, k_max)
            if f != [x + shift for x in t]:
                for k, (fk, tk) in enumerate(zip(f, t)):
                    if fk - shift != tk:
                        report.fail(N, n, k, fk - shift, tk)
            report.checked += k_max + 1
    return report


def verify_conjugacy(N_range, n_range, k_max: int, workers: int | None = None) -> VerificationReport:
    """T^k(N) + A_n == F_n^k(N + A_n) on the whole (N, n, k) grid.

    Failure tuples are ``(N, n, k, F_n^k(N+A_n) - A_n, T^k(N))``.
    """
    _check_k(k_max)
    Ns, ns = _positive(N_range), list(n_range)
    params = {"N": describe_range(Ns), "n": describe_range(ns), "k": f"0..{k_max}"}
    return _sweep(Identity.CONJUGACY, params, partial(_conjugacy_chunk, ns=ns, k_max=k_max), Ns, workers)


# --- averaging of the symmetric pair F_n, F_{-n-1} ------------------------------


def _average_chunk(Ns, ns, k_max):
    report = VerificationReport(Identity.AVERAGE, {})
    for N in Ns:
        t = t_orbit(N, k_max)
        for n in ns:
            m = -n - 1
            up = f_orbit(n, N + 2 * n + 1, k_max)
            down = f_orbit(m, N + 2 * m + 1, k_max)
            for k in range(k_max + 1):
                if up[k] + down[k] != 2 * t[k]:
                    mean = Fraction(up[k] + down[k], 2)
                    report.fail(N, n, k, format_fraction(mean), t[k])
            report.checked += k_max + 1
    return report


def verify_average(N_range, n_range, k_max: int, workers: int | None = None) -> VerificationReport:
    """T^k(N) == (F_n^k(N+A_n) + F_{-n-1}^k(N+A_{-n-1})) / 2, exactly."""
    _check_k(k_max)
    Ns, ns = _positive(N_range), list(n_range)
    params = {"N": describe_range(Ns), "n": describe_range(ns), "k": f"0..{k_max}"}
    return _sweep(Identity.AVERAGE, params, partial(_average_chunk, ns=ns, k_max=k_max), Ns, workers)


def partial_means(N: int, k: int, n_max: int) -> list[Fraction]:
    """Mean over the symmetric pairs j = 0..n, for every truncation n <= n_max."""
    total = 0
    out = []
    for j in range(n_max + 1):
        total += f_orbit(j, N + 2 * j + 1, k)[k]
        total += f_orbit(-j - 1, N - 2 * j - 1, k)[k]
        out.append(Fraction(total, 2 * (j + 1)))
    return out


def verify_partial_mean(N: int, k: int, n_max: int) -> VerificationReport:
    """Every truncated symmetric mean equals T^k(N); the limit is exact constancy."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    _check_k(k)
    _positive([N])
    report = VerificationReport(
        Identity.PARTIAL_MEAN, {"N": str(N), "k": str(k), "n_max": str(n_max)}
    )
    target = t_orbit(N, k)[k]
    means = partial_means(N, k, n_max)
    for n, mean in enumerate(means):
        if mean != target:
            report.fail(N, k, n, format_fraction(mean), target)
        report.checked += 1
    report.observed["means"] = sorted({format_fraction(m) for m in means})
    return report


def verify_partial_means(N_range, k_max: int, n_max: int, workers: int | None = None) -> VerificationReport:
    """:func:`verify_partial_mean` for every N in the range and every k <= k_max."""
    _check_k(k_max)
    Ns = _positive(N_range)
    params = {"N": describe_range(Ns), "k": f"0..{k_max}", "n_max": str(n_max)}
    return _sweep(Identity.PARTIAL_MEAN, params, partial(_partial_mean_chunk, k_max=k_max, n_max=n_max), Ns, workers)


def _partial_mean_chunk(Ns, k_max, n_max):
    report = VerificationReport(Identity.PARTIAL_MEAN, {})
    for N in Ns:
        t = t_orbit(N, k_max)
        sums = [0] * (k_max + 1)
        for j in range(n_max + 1):
            up = f_orbit(j, N + 2 * j + 1, k_max)
            down = f_orbit(-j - 1, N - 2 * j - 1, k_max)
            for k in range(k_max + 1):
                sums[k] += up[k] + down[k]
                # sums[k] / (2(j+1)) == t[k], cross-multiplied
                if sums[k] != 2 * (j + 1) * t[k]:
                    report.fail(N, k, j, format_fraction(Fraction(sums[k], 2 * (j + 1))), t[k])
                report.checked += 1
    return report


# --- offset constancy between two members of the family ------------------------


def _pair_key(n: int, m: int) -> str:
    return f"{n},{m}"


def _offset_chunk(Ns, pairs, k_max):
    report = VerificationReport(Identity.OFFSET, {})
    seen: dict[str, set] = {}
    for N in Ns:
        for n, m in pairs:
            an, am = 2 * n + 1, 2 * m + 1
            fn = f_orbit(n, N + an, k_max)
            fm = f_orbit(m, N + am, k_max)
            diffs = seen.setdefault(_pair_key(n, m), set())
            for k in range(k_max + 1):
                d = fn[k] - fm[k]
                diffs.add(d)
                if d != an - am or fn[k] - an != fm[k] - am:
                    report.fail(N, n, m, k, d, an - am)
            report.checked += k_max + 1
    report.observed["differences"] = {key: sorted(v) for key, v in seen.items()}
    return report


def verify_offset_constancy(N_range, pairs, k_max: int, workers: int | None = None) -> VerificationReport:
    """F_n^k(N+A_n) - F_m^k(N+A_m) == A_n - A_m for all N and k.

    ``observed["differences"]`` lists the distinct differences seen per pair.
    """
    _check_k(k_max)
    Ns = _positive(N_range)
    pairs = [tuple(p) for p in pairs]
    params = {"N": describe_range(Ns), "pairs": [list(p) for p in pairs], "k": f"0..{k_max}"}
    return _sweep(Identity.OFFSET, params, partial(_offset_chunk, pairs=pairs, k_max=k_max), Ns, workers)


def _bound_chunk(Ns, pairs, k_max):
    report = VerificationReport(Identity.BOUND_TRANSFER, {})
    seen: dict[str, set] = {}
    for N in Ns:
        for n, m in pairs:
            an, am = 2 * n + 1, 2 * m + 1
            fn = f_orbit(n, N + an, k_max)
            fm = f_orbit(m, N + am, k_max)
            top, bottom = max(fn) - max(fm), min(fn) - min(fm)
            shifts = seen.setdefault(_pair_key(n, m), set())
            shifts.update((top, bottom))
            if top != an - am or bottom != an - am:
                report.fail(N, n, m, top, bottom, an - am)
            report.checked += 1
    report.observed["shifts"] = {key: sorted(v) for key, v in seen.items()}
    return report


def verify_bound_transfer(N_range, pairs, k_max: int, workers: int | None = None) -> VerificationReport:
    """Finite-horizon boundedness transfer: the running max and min of two
    conjugate orbits differ by exactly A_n - A_m.

    Divergence to +/- infinity is not decidable on a finite horizon; it is
    implied by the translation checked here.
    """
    _check_k(k_max)
    Ns = _positive(N_range)
    pairs = [tuple(p) for p in pairs]
    params = {"N": describe_range(Ns), "pairs": [list(p) for p in pairs], "k": f"0..{k_max}"}
    return _sweep(
        Identity.BOUND_TRANSFER, params, partial(_bound_chunk, pairs=pairs, k_max=k_max), Ns, workers
    )


# --- parity --------------------------------------------------------------------


def _parity_chunk(Ns, ns, k_max):
    report = VerificationReport(Identity.PARITY, {})
    for N in Ns:
        t = t_orbit(N, k_max)
        for n in ns:
            f = f_orbit(n, N + 2 * n + 1, k_max)
            for k in range(k_max + 1):
                if (t[k] - f[k]) & 1 == 0:
                    report.fail(N, n, k, t[k], f[k])
            report.checked += k_max + 1
    return report


def verify_parity_opposition(N_range, n_range, k_max: int, workers: int | None = None) -> VerificationReport:
    """T^k(N) and F_n^k(N + A_n) always have opposite parity."""
    _check_k(k_max)
    Ns, ns = _positive(N_range), list(n_range)
    params = {"N": describe_range(Ns), "n": describe_range(ns), "k": f"0..{k_max}"}
    return _sweep(Identity.PARITY, params, partial(_parity_chunk, ns=ns, k_max=k_max), Ns, workers)


def _parity_count_chunk(Ns, ns, k_max):
    report = VerificationReport(Identity.PARITY_COUNT, {})
    T = CollatzT()
    for N in Ns:
        u = parity_vector(T, N, k_max).bits
        beta = _prefix_sums(u)
        for n in ns:
            v = parity_vector(FamilyF.of(n), N + 2 * n + 1, k_max).bits
            if u != v:
                for j, (a, b) in enumerate(zip(u, v)):
                    if a != b:
                        report.fail(N, n, j, "bit", a, b)
            alpha = _prefix_sums(v)
            for k in range(k_max + 1):
                if beta[k] != alpha[k]:
                    report.fail(N, n, k, "count", beta[k], alpha[k])
            report.checked += k_max + 1
    return report


def _prefix_sums(bits) -> list[int]:
    out = [0]
    for b in bits:
        out.append(out[-1] + b)
    return out


def verify_parity_duality(N_range, n_range, k_max: int, workers: int | None = None) -> VerificationReport:
    """Parity vectors of T from N and of F_n from N + A_n agree bit by bit,
    so the odd count of one equals the even count of the other for every k.

    Failure tuples are ``(N, n, j, "bit", i_j, f_j)`` or ``(N, n, k, "count", beta, alpha)``.
    """
    _check_k(k_max)
    Ns, ns = _positive(N_range), list(n_range)
    params = {"N": describe_range(Ns), "n": describe_range(ns), "k": f"0..{k_max}"}
    return _sweep(Identity.PARITY_COUNT, params, partial(_parity_count_chunk, ns=ns, k_max=k_max), Ns, workers)


# --- adjustment coefficients ---------------------------------------------------


def _coeff_chunk(Ns, ns, k_max, pairs):
    report = VerificationReport(Identity.COEFF, {})
    T = CollatzT()
    for N in Ns:
        t_forms = closed_forms(T, N, k_max)
        f_forms = {n: closed_forms(FamilyF.of(n), N + 2 * n + 1, k_max) for n in ns}
        for n in ns:
            shift = 2 * n + 1
            for k in range(k_max + 1):
                tf, ff = t_forms[k], f_forms[n][k]
                if tf.lead != ff.lead:
                    report.fail(N, n, k, "lead", format_fraction(tf.lead), format_fraction(ff.lead))
                rhs = ff.adjustment + shift * (tf.lead - 1)
                if tf.adjustment != rhs:
                    report.fail(N, n, k, "adjustment", format_fraction(tf.adjustment), format_fraction(rhs))
                report.checked += 1
        for n, m in pairs:
            if n not in f_forms or m not in f_forms:
                continue
            _check_coeff_pair(report, N, n, m, t_forms, f_forms[n], f_forms[m])
    return report


def _check_coeff_pair(report, N, n, m, t_forms, n_forms, m_forms):
    gap = (2 * n + 1) - (2 * m + 1)
    for k, tf in enumerate(t_forms):
        lhs = tf.lead * gap + n_forms[k].adjustment - m_forms[k].adjustment
        if lhs != gap:
            report.fail(N, n, m, k, "pair", format_fraction(lhs), gap)
        report.checked += 1


def default_coeff_pairs(ns: Sequence[int]) -> list[tuple[int, int]]:
    ns = list(ns)
    if len(ns) < 2:
        return []
    pairs = list(zip(ns, ns[1:]))
    pairs.append((ns[-1], ns[0]))
    return pairs


def verify_coeff_relation(
    N_range, n_range, k_max: int, pairs=None, workers: int | None = None
) -> VerificationReport:
    """Leading coefficients agree and r_k(N) == phi_{n,k}(N+A_n) + A_n (3^beta/2^k - 1).

    ``pairs`` (default: neighbouring n plus one wrap-around pair) are also
    checked for the two-map relation between phi_n and phi_m. Everything is
    exact :class:`fractions.Fraction` arithmetic.
    """
    _check_k(k_max)
    Ns, ns = _positive(N_range), list(n_range)
    pairs = default_coeff_pairs(ns) if pairs is None else [tuple(p) for p in pairs]
    params = {
        "N": describe_range(Ns),
        "n": describe_range(ns),
        "k": f"0..{k_max}",
        "pairs": [list(p) for p in pairs],
    }
    return _sweep(
        Identity.COEFF, params, partial(_coeff_chunk, ns=ns, k_max=k_max, pairs=pairs), Ns, workers
    )


def _coeff_pair_chunk(Ns, pairs, k_max):
    report = VerificationReport(Identity.COEFF_PAIR, {})
    T = CollatzT()
    for N in Ns:
        t_forms = closed_forms(T, N, k_max)
        for n, m in pairs:
            n_forms = closed_forms(FamilyF.of(n), N + 2 * n + 1, k_max)
            m_forms = closed_forms(FamilyF.of(m), N + 2 * m + 1, k_max)
            _check_coeff_pair(report, N, n, m, t_forms, n_forms, m_forms)
    return report


def verify_coeff_pairs(N_range, pairs, k_max: int, workers: int | None = None) -> VerificationReport:
    """3^beta/2^k (A_n - A_m) + phi_n - phi_m == A_n - A_m for the given (n, m) pairs."""
    _check_k(k_max)
    Ns = _positive(N_range)
    pairs = [tuple(p) for p in pairs]
    params = {"N": describe_range(Ns), "pairs": [list(p) for p in pairs], "k": f"0..{k_max}"}
    return _sweep(Identity.COEFF_PAIR, params, partial(_coeff_pair_chunk, pairs=pairs, k_max=k_max), Ns, workers)


# --- domain statements ---------------------------------------------------------


def _lower_bound_chunk(ns, max_offset, k_max):
    report = VerificationReport(Identity.LOWER_BOUND, {})
    for n in ns:
        floor = 2 * n + 2
        for p in range(floor, floor + max_offset + 1):
            low = min(f_orbit(n, p, k_max))
            if low < floor:
                report.fail(n, p, low, floor)
            report.checked += 1
    return report


def verify_lower_bound(n_range, max_offset: int, k_max: int, workers: int | None = None) -> VerificationReport:
    """Orbits of F_n started in D(n) never drop below 2n + 2."""
    _check_k(k_max)
    ns = list(n_range)
    params = {"n": describe_range(ns), "P_offset": f"0..{max_offset}", "k": f"0..{k_max}"}
    return _sweep(
        Identity.LOWER_BOUND, params, partial(_lower_bound_chunk, max_offset=max_offset, k_max=k_max), ns, workers
    )


def _reach_chunk(starts, n, budget, per_start):
    report = VerificationReport(Identity.REACH, {})
    kind = FamilyF.of(n)
    hist: Counter = Counter()
    steps_by_start = {}
    for p in starts:
        traj = run_until(kind, p, budget)
        if traj.stop is StopReason.REACHED_ANCHOR:
            hist[traj.steps] += 1
            if per_start:
                steps_by_start[str(p)] = traj.steps
        else:
            report.fail(p, traj.stop.value, list(traj.cycle) if traj.cycle else None)
        report.checked += 1
    report.observed["max_steps"] = max(hist, default=0)
    report.observed["histogram"] = {str(s): hist[s] for s in sorted(hist)}
    if per_start:
        report.observed["steps"] = steps_by_start
    return report


def verify_reach(
    n: int, max_offset: int, budget: int, per_start: bool = False, workers: int | None = None
) -> VerificationReport:
    """Every P in [2n+2, 2n+2+max_offset] reaches 2n+2 within ``budget`` steps.

    ``observed`` carries the maximum stopping time and a histogram of
    stopping times; ``per_start`` adds the step count of every start.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    anchor = 2 * n + 2
    starts = range(anchor, anchor + max_offset + 1)
    params = {"n": str(n), "P": describe_range(starts), "budget": str(budget)}
    report = _sweep(
        Identity.REACH, params, partial(_reach_chunk, n=n, budget=budget, per_start=per_start), starts, workers
    )
    report.observed.setdefault("max_steps", 0)
    report.observed.setdefault("histogram", {})
    report.observed["anchor"] = anchor
    return report
