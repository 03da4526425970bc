"""Suite orchestration, check records and report serialisation."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .baselines import Baselines
from .bounds import (
    BudgetExceededError as TopTypeBudgetError,
    ExcludedTypeError,
    check_eqclass,
    check_final_inequality,
    check_prop_nil,
    nilpotent_target,
    p_form_target,
    reduction_chain,
    simple_locus_dimension,
)
from .fq_counter import (
    BudgetExceededError,
    brute_force_count,
    count_jet_points,
    count_jets_over_fixed,
    count_moment_points,
    estimate_dimension,
    fixed_locus_prediction,
)
from .groups import GroupCapError, commutator_distribution, convolve_power, enumerate_group, fiber_report
from .polysys import moment_system
from .quiver import Quiver, build_class_c_quiver, class_c_literal_cross, p_loops, p_value
from .reptypes import (
    RepType,
    check_iteration_consistency,
    enumerate_rep_types,
    iteration_pairs,
    local_quiver,
    random_iteration_pairs,
)

OUTCOMES = ("pass", "fail", "info")

# Statement tags, one per claim the suite exercises.
STATEMENT_TAGS = (
    "pairing-and-p",
    "class-c-arrow-count",
    "local-quiver-p-invariant",
    "local-quiver-iteration",
    "nilpotent-fibre-bound",
    "nilpotent-target-forms",
    "eqclass-criterion",
    "simple-locus-dimension",
    "final-inequality-chain",
    "moment-count-oracle",
    "affine-space-jets",
    "fixed-locus-jets",
    "dimension-heuristic",
    "group-mass",
    "commuting-pairs",
    "group-fibres",
    "baseline-regression",
)


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    g_values: list[int] = field(default_factory=lambda: [2, 3])
    n_max: int = 6
    iteration_exhaustive: list[int] = field(default_factory=lambda: [2, 4])
    iteration_random: list[int] = field(default_factory=lambda: [3, 5, 100])
    seed: int = 0
    extra_types: list[list] = field(default_factory=list)
    oracle_cases: list[list[int]] = field(default_factory=lambda: [[1, 2, 2], [2, 2, 2]])
    affine_primes: list[int] = field(default_factory=lambda: [2, 3, 5])
    affine_m_max: int = 3
    fixed_g: int = 2
    fixed_n: int = 2
    fixed_primes: list[int] = field(default_factory=lambda: [2, 3])
    fixed_m_max: int = 3
    dimension_primes: list[int] = field(default_factory=lambda: [2, 3, 5])
    dimension_band: list[float] = field(default_factory=lambda: [0.25, 4.0])
    groups: list[list] = field(
        default_factory=lambda: [[2, 2, "GL"], [3, 2, "SL"], [3, 2, "GL"], [5, 2, "SL"]]
    )
    group_g: list[int] = field(default_factory=lambda: [1, 2])
    top_type_budget: int = 12
    count_budget: int = 2**26
    workers: int | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "SuiteConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


@dataclass
class CheckRecord:
    name: str
    statement_tag: str
    inputs: dict
    outcome: str
    data: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.statement_tag not in STATEMENT_TAGS:
            raise ValueError(f"unknown statement tag {self.statement_tag!r}")
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")


@dataclass
class SuiteReport:
    version: str = __version__
    parameters: dict = field(default_factory=dict)
    checks: list[CheckRecord] = field(default_factory=list)
    baseline_diffs: list[dict] = field(default_factory=list)

    def add(self, name: str, tag: str, inputs: dict, outcome: str, **data: Any) -> CheckRecord:
        rec = CheckRecord(name, tag, inputs, outcome, data)
        self.checks.append(rec)
        return rec

    @property
    def failed(self) -> list[CheckRecord]:
        return [c for c in self.checks if c.outcome == "fail"]

    def exit_code(self) -> int:
        return 1 if self.failed else 0


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


class _Run:
    def __init__(self, config: SuiteConfig, baselines: Baselines, freeze: bool) -> None:
        self.config = config
        self.baselines = baselines
        self.freeze = freeze
        params = asdict(config)
        # worker count affects scheduling only, never results
        params.pop("workers")
        self.report = SuiteReport(parameters=params)

    def regress(self, kind: str, count: int, **params) -> None:
        if self.freeze:
            self.baselines.set(kind, count, **params)
            return
        frozen = self.baselines.get(kind, **params)
        inputs = {"kind": kind, **params}
        if frozen is None:
            self.report.add("baseline", "baseline-regression", inputs, "info", message="no frozen baseline", count=count)
        elif frozen != count:
            self.report.baseline_diffs.append({**inputs, "frozen": frozen, "count": count})
            self.report.add("baseline", "baseline-regression", inputs, "fail", frozen=frozen, count=count)
        else:
            self.report.add("baseline", "baseline-regression", inputs, "pass", count=count)

    def guarded(self, name: str, tag: str, inputs: dict, body: Callable[[], None]) -> None:
        try:
            body()
        except (BudgetExceededError, TopTypeBudgetError, GroupCapError) as exc:
            self.report.add(name, tag, inputs, "info", message=f"budget: {exc}")
        except ExcludedTypeError as exc:
            self.report.add(name, tag, inputs, "fail", message=f"excluded type: {exc}")

    # ---- combinatorics -------------------------------------------------

    def class_c(self) -> None:
        for g in self.config.g_values:
            for betas in ([1], [1, 1], [1, 2], [2, 1, 1]):
                q = build_class_c_quiver(g, betas)
                ok = True
                for e in ([1] * len(betas), list(range(1, len(betas) + 1)), [2] * len(betas)):
                    total = sum(x * b for x, b in zip(e, betas))
                    ok &= p_value(q, e) == 1 + (g - 1) * total * total
                self.report.add(
                    "class-c-p-invariant", "class-c-arrow-count", {"g": g, "betas": betas}, _verdict(ok)
                )
            self.report.add(
                "class-c-literal-count",
                "class-c-arrow-count",
                {"g": g, "betas": [1, 1]},
                "info",
                message="the literal cross count (g-1)*b_i*b_j breaks the p invariant; 2(g-1)*b_i*b_j restores it",
                printed=class_c_literal_cross(g, 1, 1),
                forced=2 * (g - 1),
            )

    def p_invariant(self) -> None:
        for g in self.config.g_values:
            for n in range(1, self.config.n_max + 1):
                q = Quiver.loops(g)
                bad = []
                types = enumerate_rep_types(g, n)
                for tau in types:
                    lq = local_quiver(q, tau)
                    if p_value(lq.quiver, lq.dims) != p_loops(g, n):
                        bad.append(tau.encode())
                self.report.add(
                    "p-invariant",
                    "local-quiver-p-invariant",
                    {"g": g, "n": n},
                    _verdict(not bad),
                    types=len(types),
                    mismatches=bad,
                )

    def iteration(self) -> None:
        g, n_max = self.config.iteration_exhaustive
        pairs = list(iteration_pairs(g, n_max))
        bad = [
            (tau.encode(), tp.encode())
            for q, tau, tp in pairs
            if not check_iteration_consistency(q, tau, tp).consistent
        ]
        self.report.add(
            "iteration-exhaustive",
            "local-quiver-iteration",
            {"g": g, "n_max": n_max},
            _verdict(not bad),
            pairs=len(pairs),
            mismatches=bad,
        )
        g, n_max, count = self.config.iteration_random
        sample = random_iteration_pairs(g, n_max, count, self.config.seed)
        bad = [
            (tau.encode(), tp.encode())
            for q, tau, tp in sample
            if not check_iteration_consistency(q, tau, tp).consistent
        ]
        self.report.add(
            "iteration-random",
            "local-quiver-iteration",
            {"g": g, "n_max": n_max, "samples": count, "seed": self.config.seed},
            _verdict(not bad),
            mismatches=bad,
        )

    def prop_nil(self) -> None:
        budget = self.config.top_type_budget
        grid = []
        for g in self.config.g_values:
            for n in range(2, self.config.n_max + 1):
                grid.extend((g, n, tau) for tau in enumerate_rep_types(g, n) if not tau.is_simple())
        for g, n, text in self.config.extra_types:
            grid.append((g, n, RepType.decode(text)))
        for g, n, tau in grid:
            inputs = {"g": g, "n": n, "tau": tau.encode()}
            self.guarded("prop-nil", "nilpotent-fibre-bound", inputs, lambda: self._one_prop_nil(g, n, tau, budget))

    def _one_prop_nil(self, g: int, n: int, tau: RepType, budget: int) -> None:
        inputs = {"g": g, "n": n, "tau": tau.encode()}
        rep = check_prop_nil(g, n, tau, budget)
        self.report.add(
            "prop-nil",
            "nilpotent-fibre-bound",
            inputs,
            _verdict(rep.passed),
            max_bound=rep.max_bound,
            target=rep.target,
            top_types=len(rep.per_top_type),
            argmax=[list(s) for s in rep.argmax],
        )
        closed = nilpotent_target(g, n, tau)
        pform = p_form_target(g, n, tau)
        if closed != pform:
            self.report.add(
                "target-forms",
                "nilpotent-target-forms",
                inputs,
                "info",
                message="closed form 2(g-1)(n^2-sum b^2) differs from 2p_Q(n)-2sum p_Q(b_i)",
                closed_form=closed,
                p_form=pform,
                max_bound=rep.max_bound,
                strict_against_p_form=rep.p_form_passed,
            )
        lq = local_quiver(Quiver.loops(g), tau)
        ec = check_eqclass(lq, rep.max_bound)
        self.report.add(
            "eqclass",
            "eqclass-criterion",
            inputs,
            "pass" if ec.holds else "info",
            holds=ec.holds,
            fibre_bound=ec.fiber_bound,
            threshold=ec.threshold,
            z_dim_bound=ec.z_dim_bound,
            two_p=2 * ec.p,
            z_bound_below_two_p=ec.certifies_z,
            **({} if ec.holds else {"message": "criterion sits at or above its threshold with this fibre bound"}),
        )

    def simple_locus(self) -> None:
        for g in self.config.g_values:
            for n in range(1, self.config.n_max + 1):
                d = simple_locus_dimension(g, n)
                self.report.add(
                    "simple-locus",
                    "simple-locus-dimension",
                    {"g": g, "n": n},
                    _verdict(d >= 2 * p_loops(g, n)),
                    dimension=d,
                    two_p=2 * p_loops(g, n),
                )

    def final_inequality(self) -> None:
        fixed_cases = [("r=2, A=beta=(1,1)", [1, 1], [1, 1]), ("r=1, A=(2), beta=(2)", [2], [2])]
        fixed_cases += [(f"r=1, A=({n}), beta=(1)", [n], [1]) for n in range(2, self.config.n_max + 1)]
        for label, a, b in fixed_cases:
            s = check_final_inequality(a, b)
            kind = "strict" if s.strict else ("equality" if s.lhs == s.rhs else "failure")
            relation = {"strict": "<", "equality": "=", "failure": ">"}[kind]
            self.report.add(
                "final-inequality-edge",
                "final-inequality-chain",
                {"A": a, "beta": b},
                "info",
                message=f"{kind} at {label}: {s.lhs} {relation} {s.rhs}",
                lhs=s.lhs,
                rhs=s.rhs,
                strict=s.strict,
            )
        for g in self.config.g_values:
            for n in range(2, self.config.n_max + 1):
                nonstrict = []
                for tau in enumerate_rep_types(g, n):
                    if tau.is_simple():
                        continue
                    s = check_final_inequality(tau.mults, [d[0] for d in tau.dims])
                    if not s.strict:
                        nonstrict.append({"tau": tau.encode(), "lhs": s.lhs, "rhs": s.rhs})
                chain_ok = True
                for tau in enumerate_rep_types(g, n):
                    if tau.is_simple() or sum(tau.mults) > self.config.top_type_budget:
                        continue
                    rep = check_prop_nil(g, n, tau, self.config.top_type_budget)
                    for t, _ in rep.per_top_type:
                        chain = reduction_chain(g, tau, t)
                        chain_ok &= chain["tt2"].strict
                self.report.add(
                    "reduction-chain",
                    "final-inequality-chain",
                    {"g": g, "n": n},
                    "info",
                    message=(
                        "final-form inequality is not strict for the listed types; the direct bound is authoritative"
                        if nonstrict
                        else "final-form inequality strict for every type"
                    ),
                    final_form_nonstrict=nonstrict,
                    general_g_form_strict_everywhere=chain_ok,
                )

    # ---- counting ------------------------------------------------------

    def oracle(self) -> None:
        for g, n, p in self.config.oracle_cases:
            inputs = {"g": g, "n": n, "p": p}

            def body(g=g, n=n, p=p, inputs=inputs) -> None:
                q = Quiver.loops(g)
                fast = count_moment_points(q, (n,), p, self.config.count_budget, self.config.workers).count
                slow = brute_force_count(moment_system(q, (n,)), p)
                self.report.add("moment-oracle", "moment-count-oracle", inputs, _verdict(fast == slow), rank_sum=fast, enumeration=slow)
                self.regress("moment", fast, g=g, n=n, p=p)

            self.guarded("moment-oracle", "moment-count-oracle", inputs, body)

    def affine(self) -> None:
        for g in self.config.g_values:
            for p in self.config.affine_primes:
                for m in range(self.config.affine_m_max + 1):
                    res = count_jet_points(Quiver.loops(g), (1,), p, m, self.config.count_budget, self.config.workers)
                    expect = p ** (2 * g * (m + 1))
                    self.report.add(
                        "affine-jets",
                        "affine-space-jets",
                        {"g": g, "n": 1, "p": p, "m": m},
                        _verdict(res.count == expect),
                        count=res.count,
                        expected=expect,
                    )

    def fixed_locus(self) -> None:
        g, n = self.config.fixed_g, self.config.fixed_n
        q = Quiver.loops(g)
        for p in self.config.fixed_primes:
            lower: dict[int, int] = {}
            for m in range(1, self.config.fixed_m_max + 1):
                inputs = {"g": g, "n": n, "p": p, "m": m}

                def body(p=p, m=m, inputs=inputs) -> None:
                    if m >= 2 and (m - 2) not in lower:
                        res = count_jet_points(q, (n,), p, m - 2, self.config.count_budget, self.config.workers)
                        lower[m - 2] = res.count
                        self.regress("jets", res.count, g=g, n=n, p=p, m=m - 2)
                    lhs = count_jets_over_fixed(q, (n,), p, m, self.config.count_budget, self.config.workers).count
                    rhs = fixed_locus_prediction(q, (n,), p, m, lower.get(m - 2))
                    self.report.add("fixed-locus", "fixed-locus-jets", inputs, _verdict(lhs == rhs), lhs=lhs, rhs=rhs)

                self.guarded("fixed-locus", "fixed-locus-jets", inputs, body)

    def dimension(self) -> None:
        g, n = self.config.fixed_g, self.config.fixed_n
        q = Quiver.loops(g)
        counts = []
        for p in self.config.dimension_primes:
            try:
                res = count_moment_points(q, (n,), p, self.config.count_budget, self.config.workers)
            except BudgetExceededError as exc:
                self.report.add("dimension", "dimension-heuristic", {"g": g, "n": n, "p": p}, "info", message=f"budget: {exc}")
                continue
            counts.append(res)
            self.regress("moment", res.count, g=g, n=n, p=p)
        if len(counts) >= 2:
            rep = estimate_dimension(counts, tuple(self.config.dimension_band))
            self.report.add(
                "dimension",
                "dimension-heuristic",
                {"g": g, "n": n, "primes": [c.p for c in counts]},
                "info",
                message=rep.note,
                target=rep.target,
                rows=rep.rows,
                band=list(rep.band),
                outside_band=rep.flagged,
            )

    def groups(self) -> None:
        for p, n, variant in self.config.groups:
            inputs = {"p": p, "n": n, "variant": variant}
            try:
                grp = enumerate_group(p, n, variant)
            except GroupCapError as exc:
                self.report.add("group", "group-mass", inputs, "info", message=f"budget: {exc}")
                continue
            c = commutator_distribution(grp)
            classes = grp.conjugacy_classes()
            self.report.add(
                "commuting-pairs",
                "commuting-pairs",
                inputs,
                _verdict(int(c[grp.identity]) == grp.order * len(classes)),
                identity_fibre=int(c[grp.identity]),
                order=grp.order,
                classes=len(classes),
            )
            for g in self.config.group_g:
                fib = convolve_power(c, g, grp)
                total = int(sum(fib))
                self.report.add(
                    "group-mass",
                    "group-mass",
                    {**inputs, "g": g},
                    _verdict(total == grp.order ** (2 * g)),
                    total=total,
                    expected=grp.order ** (2 * g),
                    identity_fibre=int(fib[grp.identity]),
                )
                self.regress("group-identity-fibre", int(fib[grp.identity]), p=p, n=n, variant=variant, g=g)
                fr = fiber_report(grp, g)
                self.report.add(
                    "group-fibres",
                    "group-fibres",
                    {**inputs, "g": g},
                    "info",
                    message=fr.note,
                    classes=fr.classes,
                    min_ratio=fr.min_ratio,
                    max_ratio=fr.max_ratio,
                )


SECTIONS = (
    "class_c",
    "p_invariant",
    "iteration",
    "prop_nil",
    "simple_locus",
    "final_inequality",
    "oracle",
    "affine",
    "fixed_locus",
    "dimension",
    "groups",
)


def run_suite(
    config: SuiteConfig | None = None,
    baselines: Baselines | None = None,
    freeze: bool = False,
    sections: tuple[str, ...] = SECTIONS,
) -> SuiteReport:
    config = config or SuiteConfig()
    run = _Run(config, baselines or Baselines(), freeze)
    for name in sections:
        getattr(run, name)()
    if freeze:
        run.baselines.save()
    return run.report


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def report_dict(report: SuiteReport) -> dict:
    return _jsonable(
        {
            "version": report.version,
            "parameters": report.parameters,
            "checks": [asdict(c) for c in report.checks],
            "baseline_diffs": report.baseline_diffs,
            "summary": {o: sum(c.outcome == o for c in report.checks) for o in OUTCOMES},
        }
    )


def format_report(report: SuiteReport, fmt: str = "text") -> str:
    data = report_dict(report)
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"quivjet {data['version']}", ""]
    for c in data["checks"]:
        inputs = " ".join(f"{k}={v}" for k, v in c["inputs"].items())
        line = f"[{c['outcome'].upper():4}] {c['name']} ({c['statement_tag']}) {inputs}"
        if "message" in c["data"]:
            line += f" :: {c['data']['message']}"
        lines.append(line.rstrip())
    s = data["summary"]
    lines += ["", f"pass={s['pass']} fail={s['fail']} info={s['info']}"]
    for d in data["baseline_diffs"]:
        lines.append("baseline diff: " + json.dumps(d, sort_keys=True))
    return "\n".join(lines) + "\n"


def emit_report(report: SuiteReport, fmt: str = "text", path: str | Path | None = None) -> int:
    text = format_report(report, fmt)
    if path is None:
        import sys

        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return report.exit_code()
