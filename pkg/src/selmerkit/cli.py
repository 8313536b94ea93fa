"""Command line driver: curve ingestion, pipeline orchestration, JSON reports.

The library computes; this module plumbs.  Curve files are JSON lines, one
record per line, schema-validated on ingest.  Every subcommand emits a single
self-contained JSON document (deterministic key order, embedded config and
code-version hash) so that number-theoretic claims are reproducible from the
report alone.  Exit codes: 0 success, 2 hypothesis or input problem, 3
inconclusive search region, 4 broken internal invariant.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .analytic import numeric_plus
from .arith import is_fundamental_discriminant, isprime
from .bipartite_algebra import ArtinianContext, generate_system, lambda_profile
from .curves import EllipticCurve, quadratic_twist, split_conductor
from .errors import HypothesisError, InputError, InternalInvariantError, SelmerkitError
from .gross_points import (
    gross_point_component,
    local_embedding_J,
    local_embedding_theta,
    make_theta,
    relation_report,
)
from .kurihara import DeltaStats, RegionSpec, delta_stats, kurihara_number
from .modsym import isolate_eigensymbol
from .selmer_predict import (
    ModuleShape,
    predict_heegner_profile,
    predict_selmer_Q,
    predict_waldspurger_profile,
)
from .sieves import build_indices, dump_primes_jsonl, sieve

logger = logging.getLogger("selmerkit.cli")

SCHEMA_VERSION = 1
DEFAULT_MAX_EVALUATIONS = 5_000_000
_PARALLEL_THRESHOLD = 32


# ---------------------------------------------------------------------------
# curve records


_RECORD_REQUIRED = ("label", "ainvs", "conductor")
_RECORD_OPTIONAL = ("root_number", "known_rank", "known_sha_order", "p_flags", "tamagawa")
_FLAG_KEYS = ("surjective", "manin_ok", "condition_cr")


@dataclass
class CurveRecord:
    """One ingested curve with its asserted (not computed) arithmetic facts.

    root_number, known_rank, known_sha_order, the per-p hypothesis flags and
    the Tamagawa numbers are table data carried for gating and cross-checks;
    nothing here recomputes them.
    """

    label: str
    ainvs: tuple[int, int, int, int, int]
    conductor: int
    root_number: int | None = None
    known_rank: int | None = None
    known_sha_order: int | None = None
    p_flags: dict = field(default_factory=dict)
    tamagawa: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise InputError("curve record needs a non-empty string label")
        self.ainvs = tuple(int(a) for a in self.ainvs)
        if len(self.ainvs) != 5:
            raise InputError(f"{self.label}: ainvs must have exactly 5 entries")
        if int(self.conductor) < 1:
            raise InputError(f"{self.label}: conductor must be positive")
        if self.root_number not in (None, 1, -1):
            raise InputError(f"{self.label}: root_number must be +1 or -1")
        if self.known_rank is not None and int(self.known_rank) < 0:
            raise InputError(f"{self.label}: known_rank must be non-negative")
        if self.known_sha_order is not None and int(self.known_sha_order) < 1:
            raise InputError(f"{self.label}: known_sha_order must be positive")
        for key, value in self.tamagawa.items():
            if not isprime(int(key)) or int(value) < 1:
                raise InputError(f"{self.label}: bad tamagawa entry {key}: {value}")

    @classmethod
    def from_json_dict(cls, data: dict, strict: bool = True, where: str = "record") -> "CurveRecord":
        if not isinstance(data, dict):
            raise InputError(f"{where}: record must be a JSON object")
        missing = [k for k in _RECORD_REQUIRED if k not in data]
        if missing:
            raise InputError(f"{where}: missing required fields {missing}")
        unknown = sorted(set(data) - set(_RECORD_REQUIRED) - set(_RECORD_OPTIONAL))
        if unknown:
            msg = f"{where}: unknown fields {unknown}"
            if strict:
                raise InputError(msg)
            logger.warning(msg)
        p_flags = data.get("p_flags", {})
        if not isinstance(p_flags, dict):
            raise InputError(f"{where}: p_flags must be an object")
        for p_key, flags in p_flags.items():
            if not isinstance(flags, dict):
                raise InputError(f"{where}: p_flags[{p_key}] must be an object")
            bad = sorted(set(flags) - set(_FLAG_KEYS))
            if bad:
                msg = f"{where}: unknown p_flags keys {bad} at p = {p_key}"
                if strict:
                    raise InputError(msg)
                logger.warning(msg)
        try:
            return cls(
                label=data["label"],
                ainvs=tuple(data["ainvs"]),
                conductor=int(data["conductor"]),
                root_number=None if data.get("root_number") is None else int(data["root_number"]),
                known_rank=None if data.get("known_rank") is None else int(data["known_rank"]),
                known_sha_order=(
                    None if data.get("known_sha_order") is None else int(data["known_sha_order"])
                ),
                p_flags={str(k): dict(v) for k, v in p_flags.items()},
                tamagawa={str(k): int(v) for k, v in data.get("tamagawa", {}).items()},
            )
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}: {exc}") from exc

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "ainvs": list(self.ainvs),
            "conductor": self.conductor,
            "root_number": self.root_number,
            "known_rank": self.known_rank,
            "known_sha_order": self.known_sha_order,
            "p_flags": {k: dict(v) for k, v in sorted(self.p_flags.items())},
            "tamagawa": {k: v for k, v in sorted(self.tamagawa.items())},
        }

    def to_curve(self) -> EllipticCurve:
        return EllipticCurve(
            *self.ainvs,
            conductor=self.conductor,
            label=self.label,
            p_flags=self.p_flags,
            known_rank=self.known_rank,
            known_sha_order=self.known_sha_order,
        )


def ingest(path: str, strict: bool = True) -> list[CurveRecord]:
    """Read a JSON-lines curve file in deterministic order.

    Strict mode rejects unknown fields and duplicate labels; lenient mode
    logs warnings and keeps going.  Malformed lines are errors in both modes
    and carry the line number.
    """
    records: list[CurveRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            record = CurveRecord.from_json_dict(data, strict=strict, where=f"{path}:{lineno}")
            if record.label in seen:
                msg = f"{path}:{lineno}: duplicate label {record.label!r}"
                if strict:
                    raise InputError(msg)
                logger.warning(msg)
            seen.add(record.label)
            records.append(record)
    return records


def write_records(records: list[CurveRecord], fh) -> None:
    for record in records:
        fh.write(json.dumps(record.to_json_dict(), sort_keys=True))
        fh.write("\n")


# ---------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    """Everything a pipeline run depends on, embedded verbatim in reports.

    D_K is normalized to the signed convention (negative fundamental
    discriminant) whichever sign the caller passes.  p < 5 violates the
    standing hypothesis and is refused unless allow_small_p is set, in which
    case the emitted report carries a taint marker.  cache_dir and
    max_evaluations steer execution, not mathematics, so they stay out of
    the config fingerprint and the report.
    """

    p: int
    k: int = 1
    prime_bound: int = 300
    max_nu: int = 1
    max_n: int = 10_000_000
    D_K: int | None = None
    label: str = ""
    cache_dir: str | None = None
    seed: int = 0
    allow_small_p: bool = False
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS

    def __post_init__(self):
        if not isprime(self.p):
            raise InputError(f"p = {self.p} is not prime")
        if self.p < 5 and not self.allow_small_p:
            raise HypothesisError(
                f"p = {self.p} violates the standing hypothesis p >= 5; "
                "pass --allow-small-p to run anyway (the report will be tainted)"
            )
        if self.k < 1:
            raise InputError("k must be at least 1")
        if self.prime_bound < 3 or self.max_nu < 0 or self.max_n < 1:
            raise InputError("degenerate region bounds")
        if self.max_evaluations < 1:
            raise InputError("max_evaluations must be positive")
        if self.D_K is not None:
            normalized = -abs(int(self.D_K))
            if not is_fundamental_discriminant(normalized):
                raise InputError(
                    f"{normalized} is not an imaginary quadratic field discriminant"
                )
            self.D_K = normalized

    @property
    def tainted(self) -> bool:
        return self.p < 5

    def region(self) -> RegionSpec:
        return RegionSpec(
            p=self.p,
            k=self.k,
            prime_bound=self.prime_bound,
            max_nu=self.max_nu,
            max_n=self.max_n,
            label=self.label,
        )

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "prime_bound": self.prime_bound,
            "max_nu": self.max_nu,
            "max_n": self.max_n,
            "D_K": self.D_K,
            "label": self.label,
            "seed": self.seed,
            "allow_small_p": self.allow_small_p,
        }


def code_version() -> str:
    """Hash of the package sources, so reports pin the code that made them."""
    root = Path(__file__).resolve().parent
    digest = hashlib.sha256()
    for path in sorted(root.glob("*.py")):
        digest.update(path.name.encode())
        digest.update(b"\x00")
        digest.update(path.read_bytes())
    return digest.hexdigest()[:12]


def render_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class PipelineData:
    """Intermediate products of one curve run, before report assembly."""

    region: RegionSpec
    primes: list
    indices: list
    collection: list
    stats: DeltaStats
    notes: list[str]
    estimated_evaluations: int


def _hypothesis_gate(E: EllipticCurve, p: int) -> list[str]:
    """Refuse explicit hypothesis failures; note unasserted flags."""
    flags = E.flags_for(p)
    notes = []
    for key in ("surjective", "manin_ok"):
        value = flags.get(key)
        if value is False:
            raise HypothesisError(
                f"{E.label or E.ainvs}: hypothesis flag {key!r} is false at p = {p}"
            )
        if value is None:
            notes.append(f"flag {key!r} not asserted at p = {p}")
    if flags.get("condition_cr") is False:
        notes.append(f"condition_cr asserted false at p = {p}")
    return notes


def _estimate_evaluations(indices) -> int:
    # each delta_n sums over a mod n, plus one discrete-log table per prime
    evaluations = sum(ix.n for ix in indices)
    tables = sum({f.q for ix in indices for f in ix.factors})
    return evaluations + tables


def _collect(sym, indices, p, valuation_cap: int = 12) -> list:
    """Kurihara numbers for all indices, order-preserving.

    Large batches fan out over a small thread pool; results are gathered in
    index order so the output is identical to the serial run.
    """
    if len(indices) < _PARALLEL_THRESHOLD:
        return [kurihara_number(sym, ix, p, valuation_cap=valuation_cap) for ix in indices]
    workers = min(4, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(kurihara_number, sym, ix, p, valuation_cap=valuation_cap)
            for ix in indices
        ]
        return [f.result() for f in futures]


def _gather(E: EllipticCurve, config: RunConfig) -> PipelineData:
    notes = _hypothesis_gate(E, config.p)
    region = config.region()
    primes = sieve("cyc", E, config.p, config.k, config.prime_bound)
    indices = build_indices(primes, config.max_nu, config.max_n)
    estimated = _estimate_evaluations(indices)
    if estimated > config.max_evaluations:
        raise InputError(
            f"region needs about {estimated} symbol evaluations, over the "
            f"budget {config.max_evaluations}; shrink the region or raise "
            "--max-evaluations"
        )
    sym = isolate_eigensymbol(E)
    collection = _collect(sym, indices, config.p)
    stats = delta_stats(collection, region)
    return PipelineData(
        region=region,
        primes=primes,
        indices=indices,
        collection=collection,
        stats=stats,
        notes=notes,
        estimated_evaluations=estimated,
    )


def _pipeline_report(record: CurveRecord, config: RunConfig, data: PipelineData, prediction) -> dict:
    report = {
        "kind": "pipeline",
        "schema": SCHEMA_VERSION,
        "code_version": code_version(),
        "config": config.to_json_dict(),
        "curve": record.to_json_dict(),
        "region": data.region.describe(),
        "hypothesis_notes": data.notes,
        "prime_count": len(data.primes),
        "primes": [q.to_json_dict() for q in data.primes],
        "index_count": len(data.indices),
        "estimated_evaluations": data.estimated_evaluations,
        "kurihara": [kn.to_json_dict() for kn in data.collection],
        "stats": data.stats.to_json_dict(),
        "prediction": prediction.to_json_dict(),
    }
    if config.tainted:
        report["taint"] = (
            f"p = {config.p} violates the standing hypothesis p >= 5; "
            "results are outside the proven range"
        )
    if record.known_rank is not None:
        report["consistency"] = {
            "known_rank": record.known_rank,
            "predicted_corank": prediction.shape.corank,
            "agrees": prediction.shape.corank == record.known_rank,
        }
    return report


def _execute(record: CurveRecord, config: RunConfig) -> tuple[dict, DeltaStats]:
    E = record.to_curve()
    data = _gather(E, config)
    prediction = predict_selmer_Q(data.stats)
    return _pipeline_report(record, config, data, prediction), data.stats


def _cache_key(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:24]


def _cache_read(cache_dir: str | None, key: str) -> dict | None:
    if cache_dir is None:
        return None
    path = Path(cache_dir) / f"{key}.json"
    if not path.exists():
        return None
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _cache_write(cache_dir: str | None, key: str, report: dict) -> None:
    if cache_dir is None:
        return
    directory = Path(cache_dir)
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(render_report(report))
        # atomic publish: concurrent readers see the old file or the new one
        os.replace(tmp, directory / f"{key}.json")
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def run_pipeline(record: CurveRecord, config: RunConfig) -> dict:
    """curves -> modsym -> sieves -> kurihara -> prediction, as one report.

    The report is a plain JSON-compatible dict; rendering it with
    render_report is byte-identical across runs of the same (record, config,
    code) triple, which is also the cache key.
    """
    key = _cache_key(
        {
            "kind": "pipeline",
            "record": record.to_json_dict(),
            "config": config.to_json_dict(),
            "code": code_version(),
        }
    )
    cached = _cache_read(config.cache_dir, key)
    if cached is not None:
        return cached
    report, _ = _execute(record, config)
    _cache_write(config.cache_dir, key, report)
    return report


def gz_pair(record_E: CurveRecord, D_K: int, config: RunConfig) -> dict:
    """Run E and its quadratic twist, then the dictionary the parity selects.

    nu(N^-) even is the indefinite setting (Heegner-point dictionary, needs
    the root number of E); odd is the definite setting (toric-period
    dictionary).  Both sub-pipelines must certify their vanishing orders.
    """
    D = -abs(int(D_K))
    if not is_fundamental_discriminant(D):
        raise InputError(f"{D} is not an imaginary quadratic field discriminant")
    if D % config.p == 0:
        raise HypothesisError(f"p = {config.p} ramifies in the field of discriminant {D}")
    E = record_E.to_curve()
    splitting = split_conductor(E, D)
    twist = quadratic_twist(E, D)
    twist_record = CurveRecord(
        label=f"{record_E.label}x{D}",
        ainvs=twist.ainvs,
        conductor=twist.conductor,
    )
    key = _cache_key(
        {
            "kind": "gz_pair",
            "record": record_E.to_json_dict(),
            "D_K": D,
            "config": config.to_json_dict(),
            "code": code_version(),
        }
    )
    cached = _cache_read(config.cache_dir, key)
    if cached is not None:
        return cached

    report_E, stats_E = _execute(record_E, config)
    report_T, stats_T = _execute(twist_record, config)
    if splitting.nu_minus % 2 == 0:
        if record_E.root_number is None:
            raise InputError(
                f"{record_E.label}: the indefinite dictionary needs root_number in the record"
            )
        branch = "heegner"
        prediction = predict_heegner_profile(stats_E, stats_T, W=record_E.root_number)
    else:
        branch = "waldspurger"
        prediction = predict_waldspurger_profile(stats_E, stats_T)

    report = {
        "kind": "gz_pair",
        "schema": SCHEMA_VERSION,
        "code_version": code_version(),
        "config": config.to_json_dict(),
        "branch": branch,
        "field": {
            "D_K": splitting.D_K,
            "n_plus": splitting.n_plus,
            "n_minus": splitting.n_minus,
            "nu_minus": splitting.nu_minus,
        },
        "curve": report_E,
        "twist": report_T,
        "prediction": prediction.to_json_dict(),
    }
    if config.tainted:
        report["taint"] = report_E.get("taint")
    _cache_write(config.cache_dir, key, report)
    return report


# ---------------------------------------------------------------------------
# subcommands


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _selected_records(args) -> list[CurveRecord]:
    records = ingest(args.curves, strict=not args.lenient)
    if not args.label:
        return records
    by_label = {r.label: r for r in records}
    missing = [lab for lab in args.label if lab not in by_label]
    if missing:
        raise InputError(f"labels {missing} not found in {args.curves}")
    return [by_label[lab] for lab in args.label]


def _single_record(args) -> CurveRecord:
    records = _selected_records(args)
    if len(records) != 1:
        raise InputError(
            f"this subcommand works on one curve; got {len(records)}, select with --label"
        )
    return records[0]


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        p=args.p,
        k=args.k,
        prime_bound=args.prime_bound,
        max_nu=args.max_nu,
        max_n=args.max_n,
        D_K=args.DK,
        label=args.region_label,
        cache_dir=args.cache_dir,
        seed=args.seed,
        allow_small_p=args.allow_small_p,
        max_evaluations=args.max_evaluations,
    )


def cmd_sieve(args) -> None:
    record = _single_record(args)
    config = _config_from_args(args)
    E = record.to_curve()
    primes = sieve(
        args.family, E, config.p, config.k, config.prime_bound, D_K=config.D_K
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            dump_primes_jsonl(primes, fh)
    else:
        dump_primes_jsonl(primes, sys.stdout)


def cmd_delta(args) -> None:
    record = _single_record(args)
    config = _config_from_args(args)
    data = _gather(record.to_curve(), config)
    report = {
        "kind": "delta",
        "schema": SCHEMA_VERSION,
        "code_version": code_version(),
        "config": config.to_json_dict(),
        "curve": record.to_json_dict(),
        "region": data.region.describe(),
        "kurihara": [kn.to_json_dict() for kn in data.collection],
    }
    _emit(args, render_report(report))


def cmd_stats(args) -> None:
    record = _single_record(args)
    config = _config_from_args(args)
    data = _gather(record.to_curve(), config)
    report = {
        "kind": "stats",
        "schema": SCHEMA_VERSION,
        "code_version": code_version(),
        "config": config.to_json_dict(),
        "curve": record.to_json_dict(),
        "region": data.region.describe(),
        "stats": data.stats.to_json_dict(),
    }
    _emit(args, render_report(report))


def cmd_predict(args) -> None:
    records = _selected_records(args)
    config = _config_from_args(args)
    if len(records) == 1:
        _emit(args, render_report(run_pipeline(records[0], config)))
        return
    # distinct curves are independent; the a_q cache and dlog tables are
    # thread-safe, so fan out and reassemble in input order
    with ThreadPoolExecutor(max_workers=min(4, len(records))) as pool:
        futures = [pool.submit(run_pipeline, r, config) for r in records]
        reports = [f.result() for f in futures]
    _emit(args, render_report({"kind": "batch", "schema": SCHEMA_VERSION, "reports": reports}))


def _run_gz(args, want_branch: str) -> None:
    record = _single_record(args)
    config = _config_from_args(args)
    if config.D_K is None:
        raise InputError("this subcommand needs --DK")
    report = gz_pair(record, config.D_K, config)
    if report["branch"] != want_branch:
        other = "waldspurger" if want_branch == "heegner" else "gz"
        raise InputError(
            f"nu(N^-) = {report['field']['nu_minus']} selects the "
            f"{report['branch']} dictionary for this field; use the {other} subcommand"
        )
    _emit(args, render_report(report))


def cmd_gz(args) -> None:
    _run_gz(args, "heegner")


def cmd_waldspurger(args) -> None:
    _run_gz(args, "waldspurger")


def cmd_bipartite_sim(args) -> None:
    ctx = ArtinianContext(p=args.p, k=args.k)
    shape = None
    if args.shape:
        exponents = tuple(int(part) for part in args.shape.split(",") if part.strip())
        shape = ModuleShape(0, exponents)
    system = generate_system(
        ctx, shape=shape, delta=args.delta, extra_steps=args.steps, seed=args.seed
    )
    steps = []
    for i, state in enumerate(system.states):
        entry = {
            "level": len(state.n),
            "parity": "def" if state.is_definite else "ind",
            "rho": state.rho,
            "e": state.e,
            "m_length": state.m_length,
            "value_index": system.value_index(state),
        }
        if i > 0:
            entry["a"] = system.a_sequence[i - 1]
        steps.append(entry)
    stub_ok = system.stub_bound_holds()
    rigidity = system.observed_rigidity()
    report = {
        "kind": "bipartite-sim",
        "schema": SCHEMA_VERSION,
        "code_version": code_version(),
        "p": args.p,
        "k": args.k,
        "seed": args.seed,
        "shape": system.shape.to_json_dict(),
        "delta": system.delta,
        "profile": {str(r): v for r, v in sorted(lambda_profile(system.shape, system.delta, ctx).items())},
        "steps": steps,
        "assertions": {
            "stub_bound_holds": stub_ok,
            "observed_rigidity": rigidity,
            "rigidity_matches_delta": rigidity == min(ctx.k, system.delta),
        },
    }
    _emit(args, render_report(report))
    if not stub_ok:
        raise InternalInvariantError("a simulated value escaped its stub submodule")
    if rigidity != min(ctx.k, system.delta):
        raise InternalInvariantError("observed rigidity constant differs from delta")


def cmd_gross_points(args) -> None:
    data = make_theta(abs(args.DK))
    theta = local_embedding_theta(args.q, data, args.precision)
    report = {
        "kind": "gross-points",
        "schema": SCHEMA_VERSION,
        "code_version": code_version(),
        "D_K": data.D_K,
        "q": args.q,
        "precision": args.precision,
        "theta": {"trace": data.theta_trace, "norm": data.theta_norm},
        "embedding_theta": {"entries": list(theta.entries), "display": str(theta)},
    }
    if args.beta is not None:
        jmat = local_embedding_J(args.q, data, args.beta, args.precision)
        report["beta"] = args.beta
        report["embedding_J"] = {"entries": list(jmat.entries), "display": str(jmat)}
        report["relations"] = relation_report(args.q, data, args.beta, args.precision)
    if args.case:
        component = gross_point_component(args.q, args.case, data, args.precision)
        report["component"] = {
            "case": component.case,
            "entries": list(component.matrix.entries),
            "display": str(component),
            "denominator_square": component.denominator_square,
        }
    _emit(args, render_report(report))


def cmd_oracle_check(args) -> None:
    records = _selected_records(args)
    rows = []
    for record in records:
        E = record.to_curve()
        sym = isolate_eigensymbol(E)
        algebraic = sym.eval_plus(0, 1)
        numeric = numeric_plus(E, 0, 1, tol=args.tol)
        error = abs(float(algebraic) - numeric)
        scale = abs(float(algebraic))
        relative = error / scale if scale else error
        rows.append(
            {
                "label": record.label,
                "algebraic": str(algebraic),
                "numeric": numeric,
                "relative_error": relative,
                "ok": relative <= args.tol,
            }
        )
    report = {
        "kind": "oracle-check",
        "schema": SCHEMA_VERSION,
        "code_version": code_version(),
        "tolerance": args.tol,
        "rows": rows,
        "ok": all(row["ok"] for row in rows),
    }
    _emit(args, render_report(report))
    if not report["ok"]:
        bad = [row["label"] for row in rows if not row["ok"]]
        raise InternalInvariantError(f"numeric oracle disagrees with the eigensymbol on {bad}")


# ---------------------------------------------------------------------------
# parser


def _add_curve_args(sub) -> None:
    sub.add_argument("--curves", required=True, help="JSON-lines curve file")
    sub.add_argument("--label", action="append", help="curve label; repeatable")
    sub.add_argument("--lenient", action="store_true", help="warn instead of rejecting unknown fields")


def _add_config_args(sub) -> None:
    sub.add_argument("--p", type=int, required=True, help="the working prime")
    sub.add_argument("--k", type=int, default=1, help="congruence depth")
    sub.add_argument("--prime-bound", type=int, default=300)
    sub.add_argument("--max-nu", type=int, default=1)
    sub.add_argument("--max-n", type=int, default=10_000_000)
    sub.add_argument("--DK", type=int, default=None, help="imaginary quadratic discriminant (sign normalized)")
    sub.add_argument("--region-label", default="")
    sub.add_argument("--cache-dir", default=None)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--allow-small-p", action="store_true")
    sub.add_argument("--max-evaluations", type=int, default=DEFAULT_MAX_EVALUATIONS)


def _add_out_arg(sub) -> None:
    sub.add_argument("--out", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selmerkit",
        description="Kurihara numbers, divisibility statistics, and Selmer predictions",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("sieve", help="list Kolyvagin-type primes for one curve")
    _add_curve_args(sub)
    _add_config_args(sub)
    _add_out_arg(sub)
    sub.add_argument("--family", choices=("cyc", "ac", "adm"), default="cyc")
    sub.set_defaults(func=cmd_sieve)

    sub = subs.add_parser("delta", help="Kurihara numbers over the region")
    _add_curve_args(sub)
    _add_config_args(sub)
    _add_out_arg(sub)
    sub.set_defaults(func=cmd_delta)

    sub = subs.add_parser("stats", help="divisibility statistics over the region")
    _add_curve_args(sub)
    _add_config_args(sub)
    _add_out_arg(sub)
    sub.set_defaults(func=cmd_stats)

    sub = subs.add_parser("predict", help="full pipeline: stats plus Selmer prediction")
    _add_curve_args(sub)
    _add_config_args(sub)
    _add_out_arg(sub)
    sub.set_defaults(func=cmd_predict)

    sub = subs.add_parser("gz", help="curve/twist pair, indefinite (Heegner) dictionary")
    _add_curve_args(sub)
    _add_config_args(sub)
    _add_out_arg(sub)
    sub.set_defaults(func=cmd_gz)

    sub = subs.add_parser("waldspurger", help="curve/twist pair, definite dictionary")
    _add_curve_args(sub)
    _add_config_args(sub)
    _add_out_arg(sub)
    sub.set_defaults(func=cmd_waldspurger)

    sub = subs.add_parser("bipartite-sim", help="synthetic bipartite Selmer walk")
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--shape", default="", help="comma-separated exponents, e.g. 3,1")
    sub.add_argument("--delta", type=int, default=None)
    sub.add_argument("--steps", type=int, default=20)
    sub.add_argument("--seed", type=int, default=0)
    _add_out_arg(sub)
    sub.set_defaults(func=cmd_bipartite_sim)

    sub = subs.add_parser("gross-points", help="local embedding and component matrices")
    sub.add_argument("--DK", type=int, required=True)
    sub.add_argument("--q", type=int, required=True)
    sub.add_argument("--case", choices=("away", "split_Nplus", "p_split", "p_inert"), default=None)
    sub.add_argument("--beta", type=int, default=None)
    sub.add_argument("--precision", type=int, default=10)
    _add_out_arg(sub)
    sub.set_defaults(func=cmd_gross_points)

    sub = subs.add_parser("oracle-check", help="eigensymbol vs numeric series at the central point")
    _add_curve_args(sub)
    _add_out_arg(sub)
    sub.add_argument("--tol", type=float, default=1e-6)
    sub.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except SelmerkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
