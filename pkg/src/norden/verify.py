"""Verification suites: batteries of checks over the family, named fixtures and synthetic tensors.

Every suite is a list of independent tasks.  Tasks return plain dictionaries
so that they can run in worker processes; results are merged in task order,
which makes the final report independent of ``jobs``.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .algebra import EXACT, Arithmetic, Tensor, max_abs
from .catalog import abelian, named_specs
from .curvature import curvature_report, quadratic_bianchi_check, random_rational
from .family import (
    FamilyParams,
    family_spec,
    kahler_locus_report,
    locus_params,
    off_locus_params,
    propositions_report,
    random_params,
)
from .levi_civita import classify, square_norm_report
from .lie import ManifoldSpec
from .report import Check, Report
from .skew import build_bundle, skew_connection_report
from .torsion import TorsionTensor, project_torsion

REFERENCE_POINTS = (
    "1,0,0,0",
    "0,1,0,0",
    "0,0,1,0",
    "0,0,0,1",
    "3,4,5,0",
    "1,2,3,4",
    "2,-1,3,5",
    "0,0,0,0",
)
SUITES = ("paper", "random")


def family_battery(p: FamilyParams, arith: Arithmetic = EXACT) -> Report:
    """Propositions, skew-connection and curvature checks at one parameter point."""
    spec = family_spec(p, arith)
    rep = Report(f"family[{p}]")
    rep.sections.append(propositions_report(p, arith))
    rep.sections.append(skew_connection_report(spec, expect_proportional=True))
    bundle = build_bundle(spec)
    rep.sections.append(curvature_report(spec, bundle))
    rep.data["tau_star_star_plus_tau"] = rep.sections[-1].data["tau"] + rep.sections[-1].data["tau_star_star"]
    return rep


def spec_battery(spec: ManifoldSpec, title: str = "spec") -> Report:
    """Everything that applies to an arbitrary valid manifold."""
    rep = Report(title)
    validation = spec.report
    rep.data["validation"] = validation.to_dict()
    rep.add(Check.of("valid_structure", validation.ok))
    if not validation.ok:
        return rep
    verdict = classify(spec)
    norm = square_norm_report(spec)
    rep.data.update({"class": verdict.label, "square_norm": norm.value, "swapped_square_norm": norm.swapped_form})
    rep.add(Check.info("square_norm_forms_agree", abs(norm.value - norm.swapped_form),
                       required=norm.checked, agree=norm.forms_agree))
    rep.sections.append(skew_connection_report(spec))
    bundle = build_bundle(spec) if verdict.is_quasi_kahler else None
    rep.sections.append(curvature_report(spec, bundle))
    return rep


def decomposition_check(dim: int, samples: int, seed: int, arith: Arithmetic = EXACT) -> Report:
    """p1 + p2 + p3 + p4 = T for random tensors skew in their first two slots."""
    rng = random.Random(seed)
    frame = abelian(dim, arith)  # the projectors only read J
    worst = 0
    for _ in range(samples):
        raw = arith.array([[[random_rational(rng) for _ in range(dim)] for _ in range(dim)] for _ in range(dim)])
        T = raw - np.transpose(raw, (1, 0, 2))
        parts = project_torsion(frame, TorsionTensor(Tensor.covariant(T)))
        worst = max(worst, max_abs(parts.total().data - T))
    rep = Report(f"torsion_decomposition_dim{dim}")
    rep.data.update(samples=samples, seed=seed)
    rep.add(Check.of("projections_sum_to_torsion", arith.is_zero(worst), worst))
    return rep


@dataclass(frozen=True)
class Task:
    kind: str
    args: tuple
    mode: str


def _run(task: Task) -> dict:
    arith = Arithmetic(task.mode)
    if task.kind == "family":
        return family_battery(FamilyParams.parse(task.args[0]), arith).to_dict()
    if task.kind == "locus":
        return kahler_locus_report(FamilyParams.parse(task.args[0]), arith).to_dict()
    if task.kind == "named":
        return spec_battery(named_specs(arith)[task.args[0]], task.args[0]).to_dict()
    if task.kind == "quadratic":
        return quadratic_bianchi_check(*task.args, arith=arith).to_dict()
    if task.kind == "decomposition":
        return decomposition_check(*task.args, arith=arith).to_dict()
    raise ValueError(f"unknown task kind {task.kind!r}")


def suite_tasks(suite: str, samples: int, seed: int, mode: str) -> list[Task]:
    if suite == "paper":
        tasks = [Task("family", (pt,), mode) for pt in REFERENCE_POINTS]
        tasks += [Task("named", (name,), mode) for name in named_specs()]
        tasks += [
            Task("quadratic", (4, 50, seed), mode),
            Task("quadratic", (6, 20, seed), mode),
            Task("decomposition", (4, 100, seed), mode),
            Task("decomposition", (6, 100, seed), mode),
        ]
        return tasks
    if suite == "random":
        rng = random.Random(seed)
        tasks = [Task("family", (str(random_params(rng)),), mode) for _ in range(samples)]
        n_locus = max(1, samples // 10)
        tasks += [Task("locus", (str(locus_params(rng)),), mode) for _ in range(n_locus)]
        tasks += [Task("locus", (str(off_locus_params(rng)),), mode) for _ in range(n_locus)]
        return tasks
    raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")


def run_tasks(tasks: list[Task], jobs: int = 1) -> list[Report]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            docs = list(pool.map(_run, tasks))
    else:
        docs = [_run(t) for t in tasks]
    return [Report.from_dict(d) for d in docs]


def run_suite(suite: str = "paper", samples: int = 100, seed: int = 0, jobs: int = 1,
              arith: Arithmetic = EXACT) -> Report:
    rep = Report(f"verify_{suite}")
    rep.data.update(suite=suite, seed=seed, mode=arith.mode)
    if suite == "random":
        rep.data["samples"] = samples
    rep.sections.extend(run_tasks(suite_tasks(suite, samples, seed, arith.mode), jobs))
    summarize(rep)
    return rep


def verify_spec(spec: ManifoldSpec, title: str = "spec") -> Report:
    rep = Report("verify_spec")
    rep.data["mode"] = spec.arith.mode
    # round-trip through the serialized form, exactly like suite tasks
    rep.sections.append(Report.from_dict(spec_battery(spec, title).to_dict()))
    summarize(rep)
    return rep


def summarize(rep: Report) -> None:
    counts: dict[str, int] = {}
    for c in rep.all_checks():
        counts[c.status] = counts.get(c.status, 0) + 1
    rep.data["counts"] = dict(sorted(counts.items()))
    rep.data["first_failure"] = failure_path(rep)


def failure_path(rep: Report) -> str | None:
    """``section/.../check`` for the first failing check, outermost first."""

    def walk(r: Report, trail: list[str]):
        for c in r.checks:
            if c.failed:
                return trail + [r.title, c.name]
        for s in r.sections:
            hit = walk(s, trail + [r.title])
            if hit:
                return hit
        return None

    hit = walk(rep, [])
    return "/".join(hit[1:]) if hit else None


def failing_checks(rep: Report) -> list[str]:
    out = []

    def walk(r: Report, trail: list[str]):
        for c in r.checks:
            if c.failed:
                out.append("/".join(trail + [r.title, c.name]))
        for s in r.sections:
            walk(s, trail + [r.title])

    walk(rep, [])
    return [path.split("/", 1)[1] for path in out]
