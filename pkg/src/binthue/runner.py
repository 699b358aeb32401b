"""Batch sweeps over ranges of m with ordered output and checkpoint/resume.

Each m is one work unit.  Results come back through an ordered ``imap`` so the
CSV is written in (m, y) order whatever the scheduling.  The checkpoint records
the longest completed prefix of the range and the number of rows written for
it; on resume the output is cut back to that many rows and the rest redone.
"""

from __future__ import annotations

import csv
import functools
import hashlib
import logging
import multiprocessing
import os
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import CheckpointMismatch, FixtureParseError, PrecisionExhausted
from .numerics import PrecisionPolicy
from .thue_core import (
    DEFAULT_C,
    EquationInstance,
    SolutionTriple,
    check_exponent,
    is_irreducible,
    solve_with_expansion,
    verify_exact,
)

log = logging.getLogger(__name__)

CSV_HEADER = "n,m,x,y,rhs"
CHECKPOINT_INTERVAL = 2.0  # seconds between checkpoint writes; BINTHUE_CHECKPOINT_SECONDS overrides

PathLike = Union[str, os.PathLike]


def parse_bound(text: Union[str, int]) -> int:
    """Parse a height bound written as an integer or as ``10^k``/``10**k``."""
    if isinstance(text, int):
        value = text
    else:
        s = text.strip().replace("_", "")
        match = re.fullmatch(r"(\d+)\s*(?:\^|\*\*)\s*(\d+)", s)
        if match:
            value = int(match.group(1)) ** int(match.group(2))
        elif re.fullmatch(r"\d+", s):
            value = int(s)
        else:
            raise ValueError(f"cannot parse bound {text!r}; use an integer or 10^k")
    if value < 1:
        raise ValueError(f"bound must be >= 1, got {value}")
    return value


def format_bound(C: int) -> str:
    """``10^k`` when C is a power of ten, else the decimal value."""
    s = str(C)
    if s[0] == "1" and s.strip("0") == "1" and len(s) > 1:
        return f"10^{len(s) - 1}"
    return s


@dataclass(frozen=True)
class SweepConfig:
    n: int
    m_lo: int
    m_hi: int
    output_path: PathLike
    C: int = DEFAULT_C
    policy: PrecisionPolicy = field(default_factory=PrecisionPolicy)
    workers: int = 1
    checkpoint_path: Optional[PathLike] = None
    fixture_path: Optional[PathLike] = None

    def __post_init__(self):
        check_exponent(self.n)
        if not 2 <= self.m_lo <= self.m_hi:
            raise ValueError(f"need 2 <= m_lo <= m_hi, got [{self.m_lo}, {self.m_hi}]")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.C < 1:
            raise ValueError(f"C must be >= 1, got {self.C}")

    def config_hash(self) -> str:
        # Everything that changes the output; worker count and paths do not.
        p = self.policy
        key = f"{self.n}|{self.m_lo}|{self.m_hi}|{self.C}|{p.initial_digits}|{p.growth_factor}|{p.max_digits}"
        return hashlib.sha256(key.encode()).hexdigest()[:16]


@dataclass
class SweepReport:
    solved_count: int = 0
    skipped_reducible_count: int = 0
    solutions_found: int = 0
    wall_time: float = 0.0
    max_digits_used: int = 0
    # m values that needed more than the initial precision, with the digits used
    escalations: dict[int, int] = field(default_factory=dict)
    fixture_diff: Optional[tuple[list[SolutionTriple], list[SolutionTriple]]] = None
    resumed_from: Optional[int] = None


# worker side


def _solve_m(m: int, n: int, C: int, policy: PrecisionPolicy):
    """One work unit.  Returns a picklable tuple rather than raising."""
    if not is_irreducible(n, m):
        return m, "reducible", (), 0
    try:
        triples, expansion = solve_with_expansion(EquationInstance(n, m, C), policy)
    except PrecisionExhausted as exc:
        return m, "exhausted", (exc.j,), exc.digits
    rows = tuple((t.x, t.y, t.rhs) for t in triples)
    return m, "ok", rows, expansion.digits


# checkpoint


@dataclass(frozen=True)
class Checkpoint:
    n: int
    C: int
    digits: int
    config_hash: str
    last_complete_m: int
    rows_written: int

    def render(self) -> str:
        return (
            f"n={self.n} C={format_bound(self.C)} digits={self.digits} "
            f"config_hash={self.config_hash} last_complete_m={self.last_complete_m} "
            f"rows_written={self.rows_written}\n"
        )

    @classmethod
    def parse(cls, text: str) -> "Checkpoint":
        try:
            fields = dict(part.split("=", 1) for part in text.split())
            return cls(
                n=int(fields["n"]),
                C=parse_bound(fields["C"]),
                digits=int(fields["digits"]),
                config_hash=fields["config_hash"],
                last_complete_m=int(fields["last_complete_m"]),
                rows_written=int(fields["rows_written"]),
            )
        except (KeyError, ValueError) as exc:
            raise CheckpointMismatch(f"malformed checkpoint record {text.strip()!r}") from exc


def write_checkpoint(path: PathLike, ckpt: Checkpoint) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write(ckpt.render())
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_checkpoint(path: PathLike) -> Optional[Checkpoint]:
    path = Path(path)
    if not path.exists():
        return None
    return Checkpoint.parse(path.read_text())


def _truncate_rows(path: Path, rows: int) -> None:
    # keep the header and the first `rows` data lines
    with open(path, "rb+") as fh:
        header = fh.readline()
        if header.rstrip(b"\n").decode() != CSV_HEADER:
            raise CheckpointMismatch(f"{path}: unexpected header {header!r}")
        for i in range(rows):
            if not fh.readline().endswith(b"\n"):
                raise CheckpointMismatch(f"{path}: only {i} rows, checkpoint says {rows}")
        fh.truncate(fh.tell())


# fixtures


def _normalize(n: int, m: int, x: int, y: int) -> tuple[int, int]:
    if n % 2 == 0:
        return abs(x), abs(y)
    if y < 0:
        return -x, -y
    return x, y


def read_solutions(path: PathLike, m_range: Optional[tuple[int, int]] = None) -> list[SolutionTriple]:
    """Parse a solutions CSV into normalized triples, optionally keeping an m-range."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or ",".join(header) != CSV_HEADER:
            raise FixtureParseError(path, 1, f"expected header {CSV_HEADER!r}, got {header!r}")
        for row in reader:
            line = reader.line_num
            if len(row) != 5:
                raise FixtureParseError(path, line, f"expected 5 fields, got {len(row)}")
            try:
                n, m, x, y, _ = (int(v) for v in row)
            except ValueError:
                raise FixtureParseError(path, line, f"non-integer field in {row!r}") from None
            if m_range is not None and not m_range[0] <= m <= m_range[1]:
                continue
            x, y = _normalize(n, m, x, y)
            rhs = verify_exact(n, m, x, y) if y >= 1 and x >= 1 else None
            if rhs is None:
                raise FixtureParseError(path, line, f"row {row!r} is not a nontrivial solution")
            out.append(SolutionTriple(n, m, x, y, rhs))
    return out


def compare_fixture(
    output_path: PathLike,
    fixture_path: PathLike,
    m_range: Optional[tuple[int, int]] = None,
) -> tuple[list[SolutionTriple], list[SolutionTriple]]:
    """(rows of the fixture absent from the output, rows of the output absent from the fixture).

    Rows match up to the sign change (x, y) -> (-x, -y).  With ``m_range`` only
    fixture rows inside that inclusive range are expected.
    """
    ours = set(read_solutions(output_path))
    theirs = set(read_solutions(fixture_path, m_range))
    order = lambda t: (t.n, t.m, t.y, t.x)  # noqa: E731
    return sorted(theirs - ours, key=order), sorted(ours - theirs, key=order)


def packaged_fixture(n: int) -> Path:
    """Path of the shipped table of published solutions for exponent n."""
    ref = resources.files("binthue") / "fixtures" / f"n{n}.csv"
    if not ref.is_file():
        raise FileNotFoundError(f"no packaged fixture for n={n}")
    return Path(str(ref))


# the sweep


def _results(cfg: SweepConfig, start: int) -> Iterable[tuple]:
    work = functools.partial(_solve_m, n=cfg.n, C=cfg.C, policy=cfg.policy)
    ms = range(start, cfg.m_hi + 1)
    if cfg.workers == 1:
        yield from map(work, ms)
        return
    # small chunks keep the load balanced when a few m are expensive
    chunk = max(1, min(64, len(ms) // (cfg.workers * 32)))
    with multiprocessing.Pool(cfg.workers) as pool:
        yield from pool.imap(work, ms, chunksize=chunk)


def _resume_point(cfg: SweepConfig, out: Path, report: SweepReport) -> tuple[int, int]:
    """First m still to do and the rows already in the output."""
    if cfg.checkpoint_path is None:
        return cfg.m_lo, 0
    ckpt = read_checkpoint(cfg.checkpoint_path)
    if ckpt is None:
        return cfg.m_lo, 0
    if ckpt.config_hash != cfg.config_hash() or ckpt.n != cfg.n:
        raise CheckpointMismatch(
            f"{cfg.checkpoint_path} belongs to a different sweep "
            f"(hash {ckpt.config_hash}, expected {cfg.config_hash()})"
        )
    if not out.exists():
        raise CheckpointMismatch(f"checkpoint {cfg.checkpoint_path} present but {out} is missing")
    _truncate_rows(out, ckpt.rows_written)
    done = range(cfg.m_lo, ckpt.last_complete_m + 1)
    skipped = sum(1 for m in done if not is_irreducible(cfg.n, m))
    report.skipped_reducible_count = skipped
    report.solved_count = len(done) - skipped
    report.solutions_found = ckpt.rows_written
    report.resumed_from = ckpt.last_complete_m
    log.info("resuming n=%d after m=%d with %d rows", cfg.n, ckpt.last_complete_m, ckpt.rows_written)
    return ckpt.last_complete_m + 1, ckpt.rows_written


def sweep(cfg: SweepConfig) -> SweepReport:
    """Solve every m in ``[m_lo, m_hi]`` and write the solutions CSV.

    Raises :class:`PrecisionExhausted` naming the offending m if any quotient
    cannot be certified; the checkpoint then covers everything before it.
    """
    t0 = time.perf_counter()
    report = SweepReport()
    out = Path(cfg.output_path)
    start, rows = _resume_point(cfg, out, report)
    last_done = start - 1

    def checkpoint(fh) -> None:
        if cfg.checkpoint_path is None:
            return
        fh.flush()
        os.fsync(fh.fileno())
        write_checkpoint(
            cfg.checkpoint_path,
            Checkpoint(cfg.n, cfg.C, cfg.policy.initial_digits, cfg.config_hash(), last_done, rows),
        )

    mode = "a" if rows or report.resumed_from is not None else "w"
    with open(out, mode, newline="\n") as fh:
        if mode == "w":
            fh.write(CSV_HEADER + "\n")
        interval = float(os.environ.get("BINTHUE_CHECKPOINT_SECONDS", CHECKPOINT_INTERVAL))
        last_ckpt = time.monotonic()
        for m, status, payload, digits in _results(cfg, start):
            if status == "exhausted":
                checkpoint(fh)
                raise PrecisionExhausted(m, cfg.n, payload[0], digits)
            if status == "reducible":
                report.skipped_reducible_count += 1
            else:
                report.solved_count += 1
                for x, y, rhs in payload:
                    fh.write(f"{cfg.n},{m},{x},{y},{rhs}\n")
                rows += len(payload)
                report.max_digits_used = max(report.max_digits_used, digits)
                if digits > cfg.policy.initial_digits:
                    report.escalations[m] = digits
            last_done = m
            if time.monotonic() - last_ckpt >= interval:
                checkpoint(fh)
                last_ckpt = time.monotonic()
        checkpoint(fh)

    report.solutions_found = rows
    report.wall_time = time.perf_counter() - t0
    if cfg.fixture_path is not None:
        report.fixture_diff = compare_fixture(out, cfg.fixture_path, (cfg.m_lo, cfg.m_hi))
    return report
