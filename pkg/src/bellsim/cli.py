"""``bell`` command-line entry point.

Subcommands::

    bell chsh --model quantum|lhv-sign|contextual --sampling shared|per-context
              --angles r1,r2,r3,r4 --samples N --seed S [--out PATH --format json|csv]
    bell algebra --input FILE [--check-admissible FILE]
    bell ks --triads FILE
    bell spin1 --flip-prob P --samples N --seed S

Exit status: 0 on success, 2 on invalid input, 3 on I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass

from . import contextuality, hidden, measure, quantum
from .errors import DomainError
from .report import chsh_document, emit_report
from .rng import MASK64, RandomStream

log = logging.getLogger("bellsim")

COMMANDS = ("chsh", "algebra", "ks", "spin1")
MODELS = ("quantum", "lhv-sign", "contextual")
SAMPLINGS = ("shared", "per-context")
FORMATS = ("json", "csv")
SHARED_STREAM = 0


@dataclass
class ExperimentConfig:
    command: str = "chsh"
    model: str = "lhv-sign"
    angles: tuple[float, float, float, float] = quantum.TSIRELSON_ANGLES
    sampling: str = "shared"
    samples: int = 100_000
    seed: int = 0
    output_path: str | None = None
    format: str = "json"
    timing: bool = False
    # non-chsh inputs
    input_path: str | None = None
    admissible_path: str | None = None
    triads_path: str | None = None
    flip_prob: float = 0.0
    p_one: float = contextuality.DEFAULT_P_ONE

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}")
        if self.sampling not in SAMPLINGS:
            raise DomainError(f"unknown sampling {self.sampling!r}")
        if self.format not in FORMATS:
            raise DomainError(f"unknown format {self.format!r}")
        if len(self.angles) != 4:
            raise DomainError("exactly four angles are required")
        if not 0 <= self.seed <= MASK64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.command == "chsh":
            if self.samples < 2:
                raise DomainError("samples must be at least 2")
            if self.model == "contextual" and self.sampling == "shared":
                raise DomainError("the contextual model has a separate measure per context; "
                                  "use --sampling per-context")
        if self.command == "spin1" and self.samples < 1:
            raise DomainError("samples must be at least 1")
        if self.format == "csv" and self.command != "chsh":
            raise DomainError("CSV output is only available for chsh")


def run_chsh(cfg: ExperimentConfig) -> hidden.ChshReport:
    a, b, a2, b2 = cfg.angles
    if cfg.model == "quantum":
        terms = {label: hidden.CorrelationEstimate(quantum.quantum_correlation(x, y), 0.0, 1)
                 for label, (x, y) in zip(hidden.CONTEXT_LABELS,
                                          ((a, b), (a, b2), (a2, b), (a2, b2)))}
        value = quantum.chsh_from_terms(*(terms[k].value for k in hidden.CONTEXT_LABELS))
        angles = tuple(quantum.Direction(x).angle for x in cfg.angles)
        return hidden.ChshReport(angles, terms, value, 0.0, cfg.sampling, exact=True)
    stream = RandomStream(cfg.seed, SHARED_STREAM)
    if cfg.sampling == "shared":
        lam, _ = hidden.sample_lambdas(stream, cfg.samples)
        return hidden.chsh_shared_report(hidden.bell_sign_model(), a, b, a2, b2, lam)
    sampler = (hidden.contextual_sampler if cfg.model == "contextual"
               else hidden.model_sampler(hidden.bell_sign_model()))
    return hidden.chsh_disjoint(sampler, a, b, a2, b2, cfg.samples, stream)


def chsh_config_echo(cfg: ExperimentConfig) -> dict:
    return {"model": cfg.model, "sampling": cfg.sampling, "angles": [float(x) for x in cfg.angles],
            "samples": cfg.samples, "seed": cfg.seed}


def _event_doc(space: measure.SampleSpace, e: measure.Event) -> dict:
    return {"members": space.sorted_members(e), "tags": sorted(e.tags)}


def run_algebra(cfg: ExperimentConfig) -> dict:
    algebra, p = measure.load_algebra_document(measure.read_json(cfg.input_path))
    space = algebra.space
    doc = {
        "command": "algebra",
        "space_size": len(space),
        "atoms": [space.sorted_members(measure.Event(a)) for a in algebra.atoms],
        "n_events": len(algebra),
        "events": [_event_doc(space, e) for e in algebra.events],
        "closure_verified": measure.verify_closure(algebra),
    }
    if p is not None:
        m = measure.verify_measure(p).to_dict(space)
        m["atom_weights"] = [str(w) for w in p.weights]
        doc["measure"] = m
    if cfg.admissible_path:
        rel = measure.load_compatibility_document(measure.read_json(cfg.admissible_path))
        ok, bad = measure.is_physically_admissible(algebra, rel)
        doc["admissibility"] = {"admissible": ok, "offending": [_event_doc(space, e) for e in bad]}
    return doc


def run_ks(cfg: ExperimentConfig) -> dict:
    directions, triads = contextuality.load_triad_document(measure.read_json(cfg.triads_path))
    found = contextuality.find_noncontextual_assignment(triads, directions)
    return {
        "command": "ks",
        "satisfiable": found is not None,
        "assignment": None if found is None else dict(found.values),
        "n_directions": len(directions),
        "n_triads": len(triads),
    }


def run_spin1(cfg: ExperimentConfig) -> dict:
    stat = contextuality.simulate_spin1_agreement(cfg.flip_prob, cfg.samples,
                                                  RandomStream(cfg.seed), cfg.p_one)
    return {
        "command": "spin1",
        "config": {"flip_prob": cfg.flip_prob, "p_one": cfg.p_one,
                   "samples": cfg.samples, "seed": cfg.seed},
        "agreement": stat.rate,
        "std_error": stat.std_error,
        "n": stat.n,
        "agreements": stat.agreements,
        "expected": 1.0 - cfg.flip_prob,
    }


def run(cfg: ExperimentConfig) -> dict:
    """Execute one configured experiment and return its report document."""
    cfg.validate()
    t0 = time.perf_counter()
    if cfg.command == "chsh":
        doc = chsh_document(run_chsh(cfg), chsh_config_echo(cfg))
    elif cfg.command == "algebra":
        doc = run_algebra(cfg)
    elif cfg.command == "ks":
        doc = run_ks(cfg)
    else:
        doc = run_spin1(cfg)
    elapsed = (time.perf_counter() - t0) * 1000.0
    log.info("%s finished in %.1f ms", cfg.command, elapsed)
    if cfg.timing and cfg.command in ("chsh", "spin1"):
        doc["wall_time_ms"] = elapsed
    return doc


# ----------------------------------------------------------------- parsing


def _angles(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"angles must be decimal radians, got {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("exactly four comma-separated angles are required")
    return vals


def _seed(text: str) -> int:
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= s <= MASK64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return s


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bell", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def outputs(p, formats=("json",)):
        p.add_argument("--out", dest="output_path", help="write the report here instead of stdout")
        p.add_argument("--format", choices=formats, default="json")

    p = sub.add_parser("chsh", help="estimate the CHSH statistic")
    p.add_argument("--model", choices=MODELS, default="lhv-sign")
    p.add_argument("--sampling", choices=SAMPLINGS, default="shared")
    p.add_argument("--angles", type=_angles, default=quantum.TSIRELSON_ANGLES,
                   help="a,b,a',b' in radians (default 0,π/4,π/2,3π/4)")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--timing", action="store_true", help="include wall_time_ms in the report")
    outputs(p, FORMATS)

    p = sub.add_parser("algebra", help="generate a finite algebra and check a measure")
    p.add_argument("--input", dest="input_path", required=True)
    p.add_argument("--check-admissible", dest="admissible_path",
                   help="compatibility relation document")
    outputs(p)

    p = sub.add_parser("ks", help="search a triad system for a noncontextual assignment")
    p.add_argument("--triads", dest="triads_path", required=True)
    outputs(p)

    p = sub.add_parser("spin1", help="two-device-type spin-1 agreement experiment")
    p.add_argument("--flip-prob", type=float, required=True)
    p.add_argument("--p-one", type=float, default=contextuality.DEFAULT_P_ONE)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--timing", action="store_true")
    outputs(p)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    values = {k: v for k, v in vars(args).items() if k in known and v is not None}
    return ExperimentConfig(**values)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = config_from_args(args)
    try:
        doc = run(cfg)
        text = emit_report(doc, cfg.format, cfg.output_path)
    except DomainError as exc:
        print(f"bell: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"bell: I/O error: {exc}", file=sys.stderr)
        return 3
    if cfg.output_path is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
