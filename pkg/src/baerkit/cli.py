"""Command-line front end.

Commands:
    multiplier --file F --class-c C [--class-bound K] [--kmax N]
    semidirect --file F --class-c C [--verify] [--class-bound K] [--kmax N]
    lyndon     --letters N --weight M
    selftest   [--format machine]

Exit codes: 0 ok/pass, 1 a verdict failed, 2 parse error, 3 class
undetermined, 4 capacity guard, 5 action invalid.  The environment variable
BAERKIT_CAP_GUARD overrides the monomial budget.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from .baer import BaerJob, baer_invariant, certified_class_bound, detect_class, verify_class_bound
from .errors import (
    ActionError,
    CapacityError,
    CertificateError,
    ClassUndeterminedError,
    ParseError,
)
from .lyndon import bracket_shape, lyndon_words, witt_dimension
from .presentations import parse_input_file
from .selftest import SelftestConfig, run_selftest
from .semidirect import build_semidirect, validate_action, verify_direct_factor
from .subgroups import DEFAULT_MONOMIAL_BUDGET

EXIT_OK = 0
EXIT_VERDICT_FAIL = 1
EXIT_PARSE = 2
EXIT_CLASS = 3
EXIT_CAPACITY = 4
EXIT_ACTION = 5


@dataclass
class RunConfig:
    command: str
    file: str | None = None
    c: int = 1
    class_bound: int | None = None
    k_max: int = 6
    cap_guard: int = DEFAULT_MONOMIAL_BUDGET
    fmt: str = "text"
    verify: bool = False
    letters: int | None = None
    weight: int | None = None

    def __post_init__(self):
        if self.c < 1 or self.k_max < 1 or self.cap_guard < 1:
            raise ValueError("c, kmax, and the cap guard must be >= 1")


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baerkit",
        description="Exact Baer invariants of nilpotent groups and "
        "semidirect-product decomposition checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_file=True):
        if with_file:
            p.add_argument("--file", required=True, help="presentation file")
            p.add_argument(
                "--class-c", dest="c", type=_positive, default=1,
                help="nilpotency variety parameter c (default 1)",
            )
            p.add_argument(
                "--class-bound", dest="class_bound", type=_positive,
                help="verified nilpotency class bound; required for infinite groups",
            )
            p.add_argument(
                "--kmax", dest="k_max", type=_positive, default=6,
                help="largest class bound tried by detection (default 6)",
            )
        p.add_argument(
            "--format", dest="fmt", choices=("text", "machine"), default="text"
        )

    p = sub.add_parser("multiplier", help="Baer invariant of one presented group")
    common(p)

    p = sub.add_parser("semidirect", help="build a semidirect presentation")
    common(p)
    p.add_argument(
        "--verify", action="store_true",
        help="also verify the direct-factor decomposition",
    )

    p = sub.add_parser("lyndon", help="list Lyndon words of one degree")
    p.add_argument("--letters", type=_positive, required=True)
    p.add_argument("--weight", type=_positive, required=True)
    common(p, with_file=False)

    p = sub.add_parser("selftest", help="run the built-in verification suite")
    common(p, with_file=False)
    return parser


def _config_from_args(argv) -> RunConfig:
    args = _build_parser().parse_args(argv)
    guard = int(os.environ.get("BAERKIT_CAP_GUARD", DEFAULT_MONOMIAL_BUDGET))
    return RunConfig(
        command=args.command,
        file=getattr(args, "file", None),
        c=getattr(args, "c", 1),
        class_bound=getattr(args, "class_bound", None),
        k_max=getattr(args, "k_max", 6),
        cap_guard=guard,
        fmt=args.fmt,
        verify=getattr(args, "verify", False),
        letters=getattr(args, "letters", None),
        weight=getattr(args, "weight", None),
    )


def _read_input(config: RunConfig):
    try:
        with open(config.file, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ParseError(f"cannot read {config.file!r}: {exc}") from None
    return parse_input_file(text)


def _resolve_bound(pres, config: RunConfig, echo) -> int:
    if config.class_bound is not None:
        res = verify_class_bound(pres, config.class_bound, config.cap_guard)
        if not res.ok:
            raise CertificateError(
                f"--class-bound {config.class_bound} fails verification for "
                f"{pres.name!r} (lattice deficient at degree {res.fail_degree})"
            )
        echo(f"class-bound: k={config.class_bound} (supplied, certified)")
        return config.class_bound
    k = detect_class(pres, config.k_max, config.cap_guard)
    if k is None:
        raise ClassUndeterminedError(
            f"could not determine a class bound for {pres.name!r} with "
            f"kmax={config.k_max}; supply --class-bound explicitly "
            f"(required for infinite groups)"
        )
    echo(f"class-bound: k={k} (detected)")
    return k


def cmd_multiplier(config: RunConfig, echo) -> int:
    parsed = _read_input(config)
    if len(parsed.presentations) != 1 or parsed.action is not None:
        raise ParseError("multiplier expects exactly one group block")
    pres = parsed.presentations[0]
    machine = config.fmt == "machine"
    trace = (lambda _msg: None) if machine else echo
    trace(f"group {pres.name}: {pres.rank} generators, {len(pres.relators)} relators")
    k = _resolve_bound(pres, config, trace)
    trace(f"cap: {k + config.c}")
    inv = baer_invariant(BaerJob(pres, config.c, k, config.cap_guard))
    if machine:
        echo("command=multiplier")
        echo(f"group={pres.name}")
        echo(f"class_c={config.c}")
        echo(f"class_bound={k}")
        echo(f"free_rank={inv.free_rank}")
        echo(f"torsion={','.join(str(d) for d in inv.torsion)}")
    else:
        echo(f"invariants: {inv.describe()}")
    return EXIT_OK


def cmd_semidirect(config: RunConfig, echo) -> int:
    parsed = _read_input(config)
    if len(parsed.presentations) != 2 or parsed.action is None:
        raise ParseError("semidirect expects two group blocks and one action block")
    spec = parsed.action
    machine = config.fmt == "machine"
    trace = (lambda _msg: None) if machine else echo

    k_acted = detect_class(spec.acted, config.k_max, config.cap_guard)
    if k_acted is None:
        k_acted = certified_class_bound(spec.acted, config.k_max, config.cap_guard)
    if k_acted is None:
        raise ClassUndeterminedError(
            f"cannot certify a class bound for the acted group "
            f"{spec.acted.name!r}; it must be nilpotent"
        )
    problems = validate_action(spec, k_acted, config.cap_guard)
    if problems:
        raise ActionError(problems)
    trace(f"action: certified on {spec.acted.name!r} at class bound {k_acted}")

    sp = build_semidirect(spec)
    if machine:
        echo("command=semidirect")
        echo(f"group={sp.combined.name}")
        echo(f"generators={','.join(sp.combined.alphabet.names())}")
        echo(f"relators_acted={';'.join(w.render() for w in sp.rel_acted)}")
        echo(f"relators_acting={';'.join(w.render() for w in sp.rel_acting)}")
        echo(f"relators_twist={';'.join(w.render() for w in sp.rel_twist)}")
    else:
        echo(f"combined group {sp.combined.name}:")
        echo(f"  generators: {' '.join(sp.combined.alphabet.names())}")
        echo(f"  relators (acted):  {', '.join(w.render() for w in sp.rel_acted) or '-'}")
        echo(f"  relators (acting): {', '.join(w.render() for w in sp.rel_acting) or '-'}")
        echo(f"  relators (twist):  {', '.join(w.render() for w in sp.rel_twist)}")
    if not config.verify:
        return EXIT_OK

    k = _resolve_bound(sp.combined, config, trace)
    report = verify_direct_factor(
        sp, config.c, k, monomial_budget=config.cap_guard
    )
    if machine:
        echo(f"class_c={config.c}")
        echo(f"class_bound={k}")
        for name, ok in report.checks.items():
            echo(f"check_{name}={'pass' if ok else 'fail'}")
        echo(f"group_free_rank={report.invariants_group.free_rank}")
        echo(f"group_torsion={','.join(map(str, report.invariants_group.torsion))}")
        echo(f"acting_free_rank={report.invariants_acting.free_rank}")
        echo(f"acting_torsion={','.join(map(str, report.invariants_acting.torsion))}")
        echo(f"complement_free_rank={report.invariants_complement.free_rank}")
        echo(
            f"complement_torsion="
            f"{','.join(map(str, report.invariants_complement.torsion))}"
        )
        echo(f"verdict={'pass' if report.passed else 'fail'}")
    else:
        for name, ok in report.checks.items():
            echo(f"check {name}: {'PASS' if ok else 'FAIL'}")
        echo(f"invariants group:      {report.invariants_group.describe()}")
        echo(f"invariants acting:     {report.invariants_acting.describe()}")
        echo(f"invariants complement: {report.invariants_complement.describe()}")
        echo(f"verdict: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_VERDICT_FAIL


_LETTER_NAMES = "abcdefghijklmnopqrstuvwxyz"


def _shape_str(shape) -> str:
    if isinstance(shape, int):
        return _LETTER_NAMES[shape] if shape < 26 else f"g{shape}"
    u, v = shape
    return f"[{_shape_str(u)},{_shape_str(v)}]"


def cmd_lyndon(config: RunConfig, echo) -> int:
    n, m = config.letters, config.weight
    if n ** m > config.cap_guard:
        raise CapacityError(
            f"degree-{m} basis over {n} letters needs {n ** m} monomials, "
            f"budget is {config.cap_guard}"
        )
    words = lyndon_words(n, m)
    if config.fmt == "machine":
        echo("command=lyndon")
        echo(f"letters={n}")
        echo(f"weight={m}")
        echo(f"witt={witt_dimension(n, m)}")
        for w in words:
            spelled = "".join(
                _LETTER_NAMES[i] if i < 26 else f"(g{i})" for i in w
            )
            echo(f"word={spelled} bracketing={_shape_str(bracket_shape(w))}")
    else:
        echo(f"letters={n} weight={m} witt={witt_dimension(n, m)}")
        for w in words:
            spelled = "".join(
                _LETTER_NAMES[i] if i < 26 else f"(g{i})" for i in w
            )
            echo(f"  {spelled}  {_shape_str(bracket_shape(w))}")
    return EXIT_OK


def cmd_selftest(config: RunConfig, echo) -> int:
    return run_selftest(
        SelftestConfig(monomial_budget=config.cap_guard, fmt=config.fmt), echo
    )


def main(argv=None) -> int:
    try:
        config = _config_from_args(argv if argv is not None else sys.argv[1:])
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    handler = {
        "multiplier": cmd_multiplier,
        "semidirect": cmd_semidirect,
        "lyndon": cmd_lyndon,
        "selftest": cmd_selftest,
    }[config.command]
    try:
        return handler(config, print)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ClassUndeterminedError, CertificateError) as exc:
        print(f"class bound: {exc}", file=sys.stderr)
        return EXIT_CLASS
    except CapacityError as exc:
        print(f"capacity guard: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ActionError as exc:
        print("action validation failed:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)
        return EXIT_ACTION


if __name__ == "__main__":
    sys.exit(main())
