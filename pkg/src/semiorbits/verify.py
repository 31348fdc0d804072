"""Experiment harnesses for the orbit statistics and their bound shapes.

Each runner sweeps a configured grid (primes, initial points, index caps),
computes an exactly-evaluated quantity next to the bound term it should be
compared against, and emits a deterministic report.  Bounds with unknown
implied constants are reported as ratios, never asserted; explicit
inequalities (the height bound, the gap and pair counts) are asserted hard,
because a violation there is an implementation bug.

Reports serialize to CSV (header row, "." for not-applicable cells) and
JSON ({"config", "columns", "rows", "summary"}); reals are printed with 12
significant digits and the timestamp lives outside the body, so a fixed
config reproduces byte-identical bodies.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .combinatorics import b_tree_size, build_graph, find_witness_words
from .errors import ConfigError, EmptyReport, SpecialGenerator, TooLarge
from .ff import (
    FieldContext,
    euler_phi,
    is_prime,
    make_extension_field,
    make_prime_field,
    mul_order,
    small_order_set,
)
from .intpoly import (
    NON_SPECIAL,
    IntPolynomial,
    composition_height_bound,
    cyclotomic,
    format_poly,
    height,
    is_special,
    parse_poly,
    resultant,
)
from .orbits import (
    DEFAULT_ORBIT_CAP,
    GeneratorSet,
    WordStream,
    count_small_order_points,
    greedy_sequence_cover,
    m_count,
    orbit,
    stream_from_config,
    sup_m_over_sequences,
    theorem46_lhs,
)

COMPOSITION_DEGREE_CAP = 3**5
CYCLOTOMIC_COMPOSE_CAP = 4000


@dataclass
class ExperimentConfig:
    """One experiment run: which theorem harness, over which grid.

    t_rule: give either an absolute ``t`` or ``t_exponent`` e in (0, 1/2),
    which sets t = max(1, floor((log p)^e)) per prime (for the fixed-P scan
    it is applied to P instead, matching that theorem's hypothesis).
    """

    experiment: str
    generators: Tuple[str, ...] = ()
    s: int = 1
    primes: Optional[Tuple[int, ...]] = None
    prime_min: int = 2
    prime_max: Optional[int] = None
    starts: Optional[Tuple[int, ...]] = None
    sample: Optional[int] = None
    seed: int = 0
    t: Optional[int] = None
    t_exponent: Optional[float] = None
    N: Optional[int] = None
    h: Optional[int] = None
    l: Optional[int] = None
    h_from_n: bool = False
    stream: Optional[dict] = None
    C: float = 1.0
    c: float = 1.0
    c1: float = 0.0
    r_max: int = 6
    s_max: int = 6
    n_max: int = 3
    trials: int = 50
    include_level_0: bool = False
    allow_special: bool = False
    diagnostics: bool = False
    orbit_cap: int = DEFAULT_ORBIT_CAP
    diag_degree_cap: int = 4096
    loglog_floor: float = 0.1

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError("unknown config fields: %s" % ", ".join(unknown))
        if "experiment" not in data:
            raise ConfigError("config needs an 'experiment' field")
        cfg = cls(**data)
        cfg._normalize()
        return cfg

    def _normalize(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                "unknown experiment %r; valid: %s"
                % (self.experiment, ", ".join(sorted(EXPERIMENTS)))
            )
        self.generators = tuple(self.generators)
        if self.primes is not None:
            self.primes = tuple(int(p) for p in self.primes)
        if self.starts is not None:
            self.starts = tuple(int(w) for w in self.starts)
        if self.t is not None and self.t < 1:
            raise ConfigError("t must be >= 1")
        if self.t_exponent is not None and not 0 < self.t_exponent < 0.5:
            raise ConfigError("t_exponent must lie strictly in (0, 1/2)")
        if self.s < 1:
            raise ConfigError("s must be >= 1")
        if not self.generators:
            raise ConfigError("config needs at least one generator")
        if self.loglog_floor <= 0:
            raise ConfigError("loglog_floor must be positive")

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("generators", "primes", "starts"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out


def _canon(value):
    """Round floats to 12 significant digits so serialization is stable."""
    if isinstance(value, float):
        return float("%.12g" % value)
    if isinstance(value, dict):
        return {k: _canon(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canon(v) for v in value]
    return value


def _cell(value) -> str:
    if value is None:
        return "."
    if isinstance(value, float):
        return "%.12g" % value
    return str(value)


@dataclass
class ExperimentReport:
    config: dict
    columns: Tuple[str, ...]
    rows: List[tuple]
    summary: dict
    created: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def body_dict(self) -> dict:
        return _canon(
            {
                "config": self.config,
                "columns": list(self.columns),
                "rows": [list(r) for r in self.rows],
                "summary": self.summary,
            }
        )

    def body_json(self) -> str:
        return json.dumps(self.body_dict(), sort_keys=True, separators=(",", ":"))

    def to_json(self) -> str:
        doc = dict(self.body_dict())
        doc["header"] = {"created": self.created, "tool": _tool_version()}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def summary_line(self) -> str:
        parts = ["experiment=%s" % self.config.get("experiment"), "rows=%d" % len(self.rows)]
        for key in sorted(self.summary):
            if key != "rows":
                parts.append("%s=%s" % (key, _cell(_canon(self.summary[key]))))
        return " ".join(parts)


def _tool_version() -> str:
    from . import __version__

    return __version__


def fit_constants(report: ExperimentReport, column: str = "ratio") -> dict:
    """Empirical implied constant of a ratio column: max and nearest-rank p95."""
    try:
        i = report.columns.index(column)
    except ValueError:
        raise EmptyReport("report has no %r column" % column) from None
    vals = sorted(float(r[i]) for r in report.rows if r[i] is not None)
    if not vals:
        raise EmptyReport("no %r values to fit" % column)
    p95 = vals[max(0, math.ceil(0.95 * len(vals)) - 1)]
    return {"max": vals[-1], "p95": p95, "n": len(vals)}


# ---------------------------------------------------------------------------
# grid helpers


def _system(cfg: ExperimentConfig) -> GeneratorSet:
    return GeneratorSet([parse_poly(text) for text in cfg.generators])


def _special_warnings(
    cfg: ExperimentConfig, F: GeneratorSet, strict: bool = False
) -> List[str]:
    """Detect special generators.

    Strict runs reject them unless the config opts in; everywhere else they
    are recorded as warnings so the harness doubles as a negative control
    (the bounds are expected to degrade for monomials and Chebyshev).
    """
    notes = []
    for f in F.polys:
        kind = is_special(f).kind
        if kind != NON_SPECIAL:
            if strict and not cfg.allow_special:
                raise SpecialGenerator(
                    "generator %s is %s; set allow_special to run anyway"
                    % (format_poly(f), kind)
                )
            notes.append("%s is %s" % (format_poly(f), kind))
    return notes


def _context(cfg: ExperimentConfig, p: int) -> FieldContext:
    if cfg.s == 1:
        return make_prime_field(p)
    return make_extension_field(p, cfg.s)


def _resolve_primes(cfg: ExperimentConfig) -> List[int]:
    if cfg.primes is not None:
        bad = [p for p in cfg.primes if not is_prime(p)]
        if bad:
            raise ConfigError("not prime: %s" % ", ".join(map(str, bad)))
        return list(cfg.primes)
    if cfg.prime_max is None:
        raise ConfigError("config needs 'primes' or 'prime_max'")
    return [p for p in range(max(2, cfg.prime_min), cfg.prime_max + 1) if is_prime(p)]


def _t_for(cfg: ExperimentConfig, base: int) -> int:
    """Resolve the t-rule against log(base) (or base itself for fixed-P)."""
    if cfg.t is not None:
        return cfg.t
    if cfg.t_exponent is None:
        raise ConfigError("config needs 't' or 't_exponent'")
    return max(1, int(math.log(base) ** cfg.t_exponent))


def _t_for_big(cfg: ExperimentConfig, P: int) -> int:
    if cfg.t is not None:
        return cfg.t
    if cfg.t_exponent is None:
        raise ConfigError("config needs 't' or 't_exponent'")
    return max(1, int(P**cfg.t_exponent))


def _starts(cfg: ExperimentConfig, q: int) -> List[int]:
    if cfg.starts is not None:
        return [w % q for w in cfg.starts]
    if cfg.sample is None or q <= cfg.sample:
        return list(range(q))
    rng = random.Random(cfg.seed)
    return sorted(rng.sample(range(q), cfg.sample))


def _need(cfg: ExperimentConfig, name: str):
    value = getattr(cfg, name)
    if value is None:
        raise ConfigError("experiment %s needs %r" % (cfg.experiment, name))
    return value


def _loglog_denom(cfg: ExperimentConfig, p: int) -> float:
    # log log p <= 0 for tiny p; floor keeps the bound term finite
    return max(math.log(math.log(p)), cfg.loglog_floor)


def _log_denom(cfg: ExperimentConfig, p: int) -> float:
    return max(math.log(p), cfg.loglog_floor)


def _word_str(word: Sequence[int]) -> str:
    return "-".join(str(i) for i in word)


def _report(cfg, columns, rows, summary) -> ExperimentReport:
    return ExperimentReport(cfg.to_dict(), tuple(columns), rows, summary)


# ---------------------------------------------------------------------------
# runners


def run_thm44i(cfg: ExperimentConfig) -> ExperimentReport:
    """Sup over sequences of the small-order count, against
    max{N^(1/2), N/log log p}."""
    F = _system(cfg)
    notes = _special_warnings(cfg, F, strict=True)
    N = _need(cfg, "N")
    columns = ("p", "s", "w", "t", "N", "M", "bound", "ratio", "word")
    rows = []
    for p in _resolve_primes(cfg):
        ctx = _context(cfg, p)
        t = _t_for(cfg, p)
        bound = max(math.sqrt(N), N / _loglog_denom(cfg, p))
        for w in _starts(cfg, ctx.q):
            M, word = sup_m_over_sequences(F, ctx.from_index(w), t, N)
            rows.append((p, cfg.s, w, t, N, M, bound, M / bound, _word_str(word)))
    summary: dict = {"rows": len(rows)}
    if notes:
        summary["special_generators"] = "; ".join(notes)
    if rows:
        summary.update(fit_constants(_report(cfg, columns, rows, {})))
    return _report(cfg, columns, rows, summary)


def run_thm44ii(cfg: ExperimentConfig) -> ExperimentReport:
    """Fixed stream, all primes p <= P: count primes where M exceeds
    C * max{N^(1/2), N/log p}."""
    F = _system(cfg)
    notes = _special_warnings(cfg, F, strict=True)
    N = _need(cfg, "N")
    if cfg.stream is None:
        raise ConfigError("experiment thm44ii needs a 'stream'")
    if cfg.prime_max is None:
        raise ConfigError("experiment thm44ii needs 'prime_max' (the P)")
    stream = stream_from_config(cfg.stream)
    P = cfg.prime_max
    t = _t_for_big(cfg, P)
    columns = ("p", "t", "N", "starts", "max_M", "argmax_w", "bound", "ratio", "exceptional")
    rows = []
    exceptional = 0
    for p in _resolve_primes(cfg):
        ctx = _context(cfg, p)
        bound = cfg.C * max(math.sqrt(N), N / _log_denom(cfg, p))
        best, argw = -1, None
        ws = _starts(cfg, ctx.q)
        for w in ws:
            M = m_count(F, stream, ctx.from_index(w), t, N)
            if M > best:
                best, argw = M, w
        flag = 1 if best > bound else 0
        exceptional += flag
        rows.append((p, t, N, len(ws), best, argw, bound, best / bound, flag))
    summary: dict = {"rows": len(rows), "exceptional": exceptional}
    if notes:
        summary["special_generators"] = "; ".join(notes)
    if P >= 3:
        summary["p_over_log_p"] = P / math.log(P)
        summary["exceptional_fraction"] = exceptional / (P / math.log(P))
    return _report(cfg, columns, rows, summary)


def run_cor45(cfg: ExperimentConfig) -> ExperimentReport:
    """Distinct small-order points across levels 1..N, against
    max{N^(1/2) k^N, N k^N / log log p}.

    The count is trivially capped by q itself, so the q column is emitted
    next to the bound to expose its slack at small scale.
    """
    F = _system(cfg)
    notes = _special_warnings(cfg, F)
    N = _need(cfg, "N")
    columns = ("p", "s", "w", "t", "N", "count", "q", "bound", "ratio")
    rows = []
    for p in _resolve_primes(cfg):
        ctx = _context(cfg, p)
        t = _t_for(cfg, p)
        kN = float(F.k) ** N
        bound = max(math.sqrt(N) * kN, N * kN / _loglog_denom(cfg, p))
        for w in _starts(cfg, ctx.q):
            cnt = count_small_order_points(
                F, ctx.from_index(w), t, N, include_start=cfg.include_level_0
            )
            rows.append((p, cfg.s, w, t, N, cnt, ctx.q, bound, cnt / bound))
    summary: dict = {
        "rows": len(rows),
        "bound_note": "count <= q everywhere; ratios expose the k^N slack",
    }
    if notes:
        summary["special_generators"] = "; ".join(notes)
    if rows:
        summary.update(fit_constants(_report(cfg, columns, rows, {})))
    return _report(cfg, columns, rows, summary)


def _collision_diagnostic(cfg: ExperimentConfig, F: GeneratorSet, ctx, w: int):
    """First collision on the constant-1 walk from w, and the cyclotomic
    resultant the proof divides by p.

    Ψ is the constant-1 sequence, so Ψ^(m) is the m-fold composite of the
    first generator; the collision Ψ^(m)(w) = Ψ^(l)(w) makes w a shared
    root mod p of Ψ^(m) - Ψ^(l) and (with n the order of w) of Φ_n, hence
    p divides their resultant.
    """
    phi = F.polys[0]
    red = F.reduced(ctx)[0]
    x = ctx.from_index(w)
    seen = {x: 0}
    v = x
    m, l = 0, 0
    for j in range(1, ctx.q + 1):
        v = red.eval(v)
        if v in seen:
            m, l = j, seen[v]
            break
        seen[v] = j
    n = mul_order(x)
    if phi.degree**m > cfg.diag_degree_cap:
        return m, l, n, None
    comp = IntPolynomial((0, 1))
    powers = [comp]
    for _ in range(m):
        comp = phi.compose(comp)
        powers.append(comp)
    diff = powers[m] - powers[l]
    q_val = 0 if diff.is_zero else resultant(diff, cyclotomic(n))
    return m, l, n, q_val % ctx.p


def run_thm46(cfg: ExperimentConfig) -> ExperimentReport:
    """Orbit size, order, and cover count per start, testing
    T log d + s log tau >= s log(c log p)."""
    F = _system(cfg)
    notes = _special_warnings(cfg, F)
    if cfg.c <= 0:
        raise ConfigError("thm46 needs c > 0")
    columns = (
        "p", "w", "T", "tau", "s_cover", "lhs", "rhs", "exception",
        "coll_m", "coll_l", "ord_n", "res_mod_p",
    )
    rows = []
    exceptions = 0
    zeros = 0
    for p in _resolve_primes(cfg):
        ctx = _context(cfg, p)
        for w in _starts(cfg, ctx.q):
            x = ctx.from_index(w)
            if x.is_zero:
                zeros += 1
                continue
            T = orbit(F, x, cfg.orbit_cap).T
            tau = mul_order(x)
            s_cover = greedy_sequence_cover(F, x, cfg.orbit_cap)
            lhs = theorem46_lhs(F.d, T, tau, s_cover)
            rhs = s_cover * math.log(cfg.c * math.log(p))
            flag = 1 if lhs < rhs else 0
            exceptions += flag
            diag = (None, None, None, None)
            if cfg.diagnostics:
                diag = _collision_diagnostic(cfg, F, ctx, w)
            rows.append((p, w, T, tau, s_cover, lhs, rhs, flag) + diag)
    summary: dict = {"rows": len(rows), "exceptions": exceptions, "zeros_skipped": zeros}
    if notes:
        summary["special_generators"] = "; ".join(notes)
    if rows:
        summary["min_margin"] = min(r[5] - r[6] for r in rows)
    return _report(cfg, columns, rows, summary)


def run_thm61(cfg: ExperimentConfig) -> ExperimentReport:
    """Graph-side count of reachable small-order points against
    max{B^(l+1)/h, B^(l+1)/log log p}, plus the witness-word inequality."""
    F = _system(cfg)
    notes = _special_warnings(cfg, F)
    N = _need(cfg, "N")
    l = _need(cfg, "l")
    if cfg.h is not None:
        h = cfg.h
    elif cfg.h_from_n:
        if F.k < 2:
            raise ConfigError("h_from_n preset needs k >= 2")
        h = max(1, int((math.log(N) / math.log(F.k)) ** (1.0 / (l + 1))))
    else:
        raise ConfigError("experiment thm61 needs 'h' (or h_from_n)")
    B = b_tree_size(F.k, h)
    columns = (
        "p", "w", "t", "N", "h", "l", "B", "hypothesis", "count", "bound",
        "ratio", "L_N", "target", "eq61_ratio", "words",
    )
    rows = []
    hyp_ok = 0
    for p in _resolve_primes(cfg):
        ctx = _context(cfg, p)
        t = _t_for(cfg, p)
        gamma = small_order_set(ctx, t)
        graph = build_graph(F, ctx)
        bound = max(B ** (l + 1) / h, B ** (l + 1) / _loglog_denom(cfg, p))
        for w in _starts(cfg, ctx.q):
            u = ctx.from_index(w)
            cnt = count_small_order_points(
                F, u, t, N, include_start=cfg.include_level_0
            )
            res = find_witness_words(graph, u, gamma, N, h, l, c=cfg.c1)
            hyp = 1 if (res.hypothesis_met and h >= 3 * l) else 0
            hyp_ok += hyp
            eq61 = res.count / res.target if res.target > 0 else None
            rows.append(
                (
                    p, w, t, N, h, l, B, hyp, cnt, bound, cnt / bound,
                    res.count, res.target, eq61,
                    "|".join(_word_str(word) for word in res.words),
                )
            )
    summary: dict = {"rows": len(rows), "hypothesis_met": hyp_ok}
    if notes:
        summary["special_generators"] = "; ".join(notes)
    if rows:
        summary.update(fit_constants(_report(cfg, columns, rows, {})))
    return _report(cfg, columns, rows, summary)


def run_lemma41(cfg: ExperimentConfig) -> ExperimentReport:
    """log|Res(Phi_r, Phi_s(F))| normalized by r s (h(F) + deg F).

    Zero resultants are flagged, not folded into the ratio; they mark the
    cyclotomic-preimage coincidences the surrounding theory feeds on.
    """
    gens = [parse_poly(text) for text in cfg.generators]
    if cfg.r_max < 1 or cfg.s_max < 1:
        raise ConfigError("lemma41 needs r_max >= 1 and s_max >= 1")
    for f in gens:
        if f.degree < 1:
            raise ConfigError("lemma41 generators must be nonconstant")
        for s in range(1, cfg.s_max + 1):
            if euler_phi(s) * f.degree > CYCLOTOMIC_COMPOSE_CAP:
                raise TooLarge(
                    "cyclotomic composite guard: phi(s)*deg F must stay <= %d"
                    % CYCLOTOMIC_COMPOSE_CAP
                )
    columns = ("generator", "r", "s", "zero", "log_abs_res", "constant")
    rows = []
    zero_count = 0
    for f in gens:
        text = format_poly(f)
        denom_base = height(f) + f.degree
        for r in range(1, cfg.r_max + 1):
            phi_r = cyclotomic(r)
            for s in range(1, cfg.s_max + 1):
                value = resultant(phi_r, cyclotomic(s).compose(f))
                if value == 0:
                    zero_count += 1
                    rows.append((text, r, s, 1, None, None))
                else:
                    log_res = math.log(abs(value))
                    rows.append(
                        (text, r, s, 0, log_res, log_res / (r * s * denom_base))
                    )
    summary: dict = {"rows": len(rows), "zero_resultants": zero_count}
    nonzero = [r for r in rows if r[3] == 0]
    if nonzero:
        summary.update(fit_constants(_report(cfg, columns, nonzero, {}), "constant"))
    return _report(cfg, columns, rows, summary)


def run_prop21(cfg: ExperimentConfig) -> ExperimentReport:
    """Random compositions versus the explicit height bound; the
    inequality is a theorem and is asserted, with the slack reported."""
    F = _system(cfg)
    if cfg.n_max < 1 or cfg.trials < 0:
        raise ConfigError("prop21 needs n_max >= 1 and trials >= 0")
    if F.d**cfg.n_max > COMPOSITION_DEGREE_CAP:
        raise TooLarge(
            "composition degree guard: d^n_max must stay <= %d"
            % COMPOSITION_DEGREE_CAP
        )
    coeff_cap = max(
        max(abs(c) for c in f.primitive().coeffs) for f in F.polys
    )
    rng = random.Random(cfg.seed)
    columns = ("trial", "n", "word", "degree", "height", "bound", "ratio")
    rows = []
    for trial in range(cfg.trials):
        n = rng.randint(1, cfg.n_max)
        word = tuple(rng.randint(1, F.k) for _ in range(n))
        comp = F.polys[word[0] - 1]
        for letter in word[1:]:
            comp = F.polys[letter - 1].compose(comp)
        lhs = height(comp)
        bound = composition_height_bound(n, F.d, F.hF)
        # exact integer form of the bound: max |coeff| of the primitive
        # composite is at most coeff_cap^c1 * 8^c2
        c1 = (F.d**n - 1) // (F.d - 1)
        c2 = F.d * F.d * ((F.d ** (n - 1) - 1) // (F.d - 1))
        m_comp = max(abs(c) for c in comp.primitive().coeffs)
        assert m_comp <= coeff_cap**c1 * 8**c2, "height bound violated"
        ratio = lhs / bound if bound > 0 else None
        rows.append((trial, n, _word_str(word), comp.degree, lhs, bound, ratio))
    summary: dict = {"rows": len(rows), "violations": 0}
    if any(r[6] is not None for r in rows):
        summary.update(fit_constants(_report(cfg, columns, rows, {})))
    return _report(cfg, columns, rows, summary)


EXPERIMENTS: Dict[str, Callable[[ExperimentConfig], ExperimentReport]] = {
    "thm44i": run_thm44i,
    "thm44ii": run_thm44ii,
    "cor45": run_cor45,
    "thm46": run_thm46,
    "thm61": run_thm61,
    "lemma41": run_lemma41,
    "prop21": run_prop21,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    return EXPERIMENTS[cfg.experiment](cfg)
