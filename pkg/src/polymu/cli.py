"""Command-line interface.

Exit codes: 0 success, 1 ``check`` verdict false, 2 engines disagree or a
sweep had failures, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .alternation import alternation_depth
from .formula import BindingError, Formula, arity, format_formula, is_normalized, normalize_replacements
from .lts import LTS, LTSFormatError, parse_lts
from .syntax import FormulaSyntaxError, parse_formula

EXIT_OK, EXIT_FALSE, EXIT_DISAGREE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict
    run: int = 0
    passed: int = 0
    seconds: float = 0.0
    verdicts: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.run

    def summary(self) -> str:
        lines = [f"{self.command}: {self.passed}/{self.run} passed in {self.seconds:.2f}s"]
        for f in self.failures:
            lines.append("  FAIL " + json.dumps(f, sort_keys=True))
        return "\n".join(lines)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def load_formula(source: str, inline: bool = False) -> Formula:
    text = source if inline else _read(source)
    try:
        return parse_formula(text)
    except (FormulaSyntaxError, BindingError) as e:
        raise InputError(f"formula: {e}") from None


def load_lts(path: str) -> LTS:
    try:
        return parse_lts(_read(path))
    except LTSFormatError as e:
        raise InputError(f"{path}: {e}") from None


def _formula_arg(args) -> Formula:
    return load_formula(args.formula, inline=args.expr)


def _csv(text: str | None) -> list[str] | None:
    return None if text is None else [t for t in text.split(",") if t]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    from .games import check_via_game
    from .semantics import check

    phi = _formula_arg(args)
    lts = load_lts(args.lts)
    if not phi.is_closed():
        raise InputError(f"formula has free variables {sorted(phi.free)}")
    if args.tuple:
        try:
            tup = tuple(int(x) for x in args.tuple.split(","))
        except ValueError:
            raise InputError(f"malformed tuple {args.tuple!r}") from None
    else:
        tup = (lts.initial,) * arity(phi)
    if len(tup) < arity(phi):
        raise InputError(f"tuple has length {len(tup)} but the formula has arity {arity(phi)}")
    if len(tup) > args.max_arity:
        raise InputError(f"arity {len(tup)} exceeds --max-arity {args.max_arity}")
    for s in tup:
        if not 0 <= s < lts.n_states:
            raise InputError(f"unknown state {s}")
    engines = ["naive", "game"] if args.both else [args.engine]
    verdicts = {}
    for e in engines:
        verdicts[e] = check(phi, lts, tup) if e == "naive" else check_via_game(phi, lts, tup)
    if args.both:
        for e, v in verdicts.items():
            print(f"{e}: {str(v).lower()}")
        if len(set(verdicts.values())) > 1:
            print("engines disagree", file=sys.stderr)
            return EXIT_DISAGREE
    else:
        print(str(verdicts[args.engine]).lower())
    return EXIT_OK if all(verdicts.values()) else EXIT_FALSE


def cmd_analyze(args) -> int:
    phi = _formula_arg(args)
    info = alternation_depth(phi)
    print(f"formula: {format_formula(phi)}")
    print(f"arity: {arity(phi)}")
    print(f"normalized: {str(is_normalized(phi)).lower()}")
    print("variable  type  depth")
    for x in sorted(info.depth, key=lambda v: (-info.depth[v], v)):
        print(f"{x:<9} {info.types[x]:<5} {info.depth[x]}")
    print("alternation type: (" + ", ".join(info.alternation_type) + ")")
    print(f"least Sigma level: {info.sigma_level}")
    print(f"least Pi level: {info.pi_level}")
    return EXIT_OK


def cmd_normalize(args) -> int:
    print(format_formula(normalize_replacements(_formula_arg(args))))
    return EXIT_OK


def cmd_encode(args) -> int:
    phi = _formula_arg(args)
    try:
        if args.fixed:
            from .fixed_sig import encode_lts_fixed

            lts = encode_lts_fixed(phi, args.k)
        else:
            from .diagonal import encode_lts

            lts = encode_lts(phi, _csv(args.props))
    except ValueError as e:
        raise InputError(str(e)) from None
    sys.stdout.write(lts.to_text())
    return EXIT_OK


def cmd_diagonal(args) -> int:
    try:
        if args.fixed:
            from .fixed_sig import diagonal_formula_fixed

            phi = diagonal_formula_fixed(args.k, args.m, dual=args.dual)
        else:
            from .diagonal import diagonal_formula

            phi = diagonal_formula(args.k, args.m, _csv(args.props) or ["q"], dual=args.dual)
    except ValueError as e:
        raise InputError(str(e)) from None
    print(format_formula(phi))
    return EXIT_OK


def _diag_instance(job: tuple) -> dict:
    from .diagonal import diagonal_check
    from .fixed_sig import PROP1, diagonal_check_fixed
    from .generator import GenConfig, gen_formula

    k, m, fixed, dual, engine, seed, max_nodes = job
    cfg = GenConfig(
        k=k,
        m=m,
        cls="pi" if dual else "sigma",
        max_nodes=max_nodes,
        n_props=3,
        props=PROP1 if fixed else None,
        seed=seed,
    )
    phi = gen_formula(cfg)
    if fixed:
        r = diagonal_check_fixed(phi, m=m, k=k, dual=dual, engine=engine)
    else:
        r = diagonal_check(phi, list(cfg.prop_names), m=m, k=k, dual=dual, engine=engine)
    return {
        "seed": seed,
        "formula": format_formula(phi),
        "phi_holds": r.phi_holds,
        "Phi_holds": r.Phi_holds,
        "ok": not r.violation,
    }


def _map(fn, jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def diag_sweep(k, m, fixed, count, seed, engine="naive", dual=False, jobs=1, max_nodes=10) -> RunReport:
    report = RunReport(
        "diagcheck",
        {"k": k, "m": m, "fixed": fixed, "dual": dual, "count": count, "seed": seed, "engine": engine},
    )
    start = time.perf_counter()
    work = [(k, m, fixed, dual, engine, seed * 1_000_003 + i, max_nodes) for i in range(count)]
    for res in _map(_diag_instance, work, jobs):
        report.run += 1
        report.passed += res["ok"]
        report.verdicts.append([res["phi_holds"], res["Phi_holds"]])
        if not res["ok"]:
            report.failures.append(res)
    report.seconds = time.perf_counter() - start
    return report


def cmd_diagcheck(args) -> int:
    if args.formula is not None:
        phi = _formula_arg(args)
        try:
            if args.fixed:
                from .fixed_sig import diagonal_check_fixed

                r = diagonal_check_fixed(phi, m=args.m, k=args.k, dual=args.dual, engine=args.engine)
            else:
                from .diagonal import diagonal_check

                r = diagonal_check(phi, _csv(args.props), m=args.m, k=args.k, dual=args.dual, engine=args.engine)
        except ValueError as e:
            raise InputError(str(e)) from None
        print(f"k={r.k} m={r.m} states={r.n_states}")
        print(f"phi holds: {str(r.phi_holds).lower()}")
        print(f"diagonal holds: {str(r.Phi_holds).lower()}")
        print("violation" if r.violation else "ok: exactly one holds")
        return EXIT_DISAGREE if r.violation else EXIT_OK
    k = args.k or 1
    m = args.m or 1
    if k < 1 or m < 1:
        raise InputError("--k and --m must be at least 1")
    report = diag_sweep(k, m, args.fixed, args.count, args.seed, args.engine, args.dual, args.jobs)
    _emit(report, args.json)
    return EXIT_OK if report.ok else EXIT_DISAGREE


def cmd_bisim(args) -> int:
    from .bisim import bisim_formula, bisimilar

    lts = load_lts(args.lts)
    for s in (args.s, args.t):
        if not 0 <= s < lts.n_states:
            raise InputError(f"unknown state {s}")
    verdict = bisimilar(lts, args.s, args.t)
    print(f"partition refinement: {str(verdict).lower()}")
    if args.formula_check:
        from .games import check_via_game
        from .semantics import check

        acts = sorted(lts.actions)
        if not acts:
            raise InputError("the LTS has no transitions; the formula needs an action")
        phi = bisim_formula(sorted(lts.props), acts)
        others = {"naive": check(phi, lts, (args.s, args.t)), "game": check_via_game(phi, lts, (args.s, args.t))}
        for e, v in others.items():
            print(f"formula ({e}): {str(v).lower()}")
        if any(v != verdict for v in others.values()):
            return EXIT_DISAGREE
    return EXIT_OK


def cmd_gen(args) -> int:
    from .generator import GenConfig, gen_formula, gen_lts

    for i in range(args.count):
        try:
            cfg = GenConfig(
                k=args.k or 1,
                m=args.m or 1,
                cls=args.cls,
                max_nodes=args.max_nodes,
                n_props=args.n_props,
                n_acts=args.n_acts,
                states=args.states,
                seed=args.seed + i,
                normalized=not args.nonsimple,
                nonsimple=args.nonsimple,
            )
        except ValueError as e:
            raise InputError(str(e)) from None
        if args.kind == "formula":
            print(format_formula(gen_formula(cfg)))
        else:
            if args.count > 1:
                print(f"# seed {cfg.seed}")
            sys.stdout.write(gen_lts(cfg).to_text())
    return EXIT_OK


def cmd_solve_game(args) -> int:
    from .games import PLAYER_NAMES, GameError, parse_game, solve_parity

    try:
        game = parse_game(_read(args.game))
    except GameError as e:
        raise InputError(f"{args.game}: {e}") from None
    sol = solve_parity(game)
    for v in range(len(game)):
        move = sol.strategy.get(v)
        extra = f" -> {move}" if move is not None else ""
        print(f"{v} {PLAYER_NAMES[sol.winner[v]]}{extra}")
    return EXIT_OK


def _engine_instance(seed: int) -> dict:
    from .games import check_via_game
    from .generator import GenConfig, gen_formula, gen_lts
    from .semantics import check

    rng = random.Random(seed)
    k = rng.randint(1, 3)
    cfg = GenConfig(k=k, m=rng.randint(1, 2), cls=rng.choice(["sigma", "pi"]), max_nodes=12,
                    n_props=2, n_acts=2, states=5, normalized=False, seed=seed)
    phi = gen_formula(cfg, rng)
    lts = gen_lts(cfg, rng)
    tup = tuple(rng.randrange(lts.n_states) for _ in range(k))
    a, b = check(phi, lts, tup), check_via_game(phi, lts, tup)
    return {"seed": seed, "formula": format_formula(phi), "lts": lts.to_text(), "tuple": tup, "ok": a == b}


def engine_sweep(count: int, seed: int, jobs: int = 1) -> RunReport:
    report = RunReport("engines", {"count": count, "seed": seed})
    start = time.perf_counter()
    for res in _map(_engine_instance, [seed * 1_000_003 + i for i in range(count)], jobs):
        report.run += 1
        report.passed += res["ok"]
        if not res["ok"]:
            report.failures.append(res)
    report.seconds = time.perf_counter() - start
    return report


def cmd_selftest(args) -> int:
    reports = [engine_sweep(args.count, args.seed, args.jobs)]
    for fixed in (False, True):
        for k in (1, 2):
            for m in (1, 2):
                reports.append(diag_sweep(k, m, fixed, max(1, args.count // 10), args.seed, jobs=args.jobs))
    for r in reports:
        _emit(r, args.json)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_DISAGREE


def _emit(report: RunReport, as_json: bool):
    if as_json:
        print(json.dumps(asdict(report), sort_keys=True))
    else:
        print(report.summary())


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polymu", description="Polyadic mu-calculus toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def formula_arg(sp, optional=False):
        if optional:
            sp.add_argument("formula", nargs="?", help="formula file, '-' for stdin")
        else:
            sp.add_argument("formula", help="formula file, '-' for stdin")
        sp.add_argument("-e", "--expr", action="store_true", help="treat FORMULA as formula text")

    sp = sub.add_parser("check", help="model-check a formula at a tuple of states")
    formula_arg(sp)
    sp.add_argument("lts")
    sp.add_argument("tuple", nargs="?", help="comma-separated state ids (default: initial state repeated)")
    sp.add_argument("--engine", choices=["naive", "game"], default="naive")
    sp.add_argument("--both", action="store_true", help="run both engines and compare")
    sp.add_argument("--max-arity", type=int, default=4)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("analyze", help="alternation depths and class membership")
    formula_arg(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("normalize", help="rewrite replacements into simple ones")
    formula_arg(sp)
    sp.set_defaults(func=cmd_normalize)

    sp = sub.add_parser("encode", help="print the LTS encoding of a formula")
    formula_arg(sp)
    sp.add_argument("--fixed", action="store_true", help="use the fixed ten-letter signature")
    sp.add_argument("--props", help="comma-separated proposition order")
    sp.add_argument("--k", type=int)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("diagonal", help="print the diagonal formula")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--props", help="comma-separated propositions")
    sp.add_argument("--fixed", action="store_true")
    sp.add_argument("--dual", action="store_true")
    sp.set_defaults(func=cmd_diagonal)

    sp = sub.add_parser("diagcheck", help="check the diagonal property on one formula or a random sweep")
    formula_arg(sp, optional=True)
    sp.add_argument("--fixed", action="store_true")
    sp.add_argument("--dual", action="store_true")
    sp.add_argument("--props")
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--engine", choices=["naive", "game"], default="naive")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_diagcheck)

    sp = sub.add_parser("bisim", help="decide bisimilarity of two states")
    sp.add_argument("lts")
    sp.add_argument("s", type=int)
    sp.add_argument("t", type=int)
    sp.add_argument("--formula-check", action="store_true", help="also evaluate the bisimilarity formula")
    sp.set_defaults(func=cmd_bisim)

    sp = sub.add_parser("gen", help="random formulas or transition systems")
    sp.add_argument("kind", choices=["formula", "lts"])
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--cls", choices=["sigma", "pi"], default="sigma")
    sp.add_argument("--max-nodes", type=int, default=12)
    sp.add_argument("--n-props", type=int, default=2)
    sp.add_argument("--n-acts", type=int, default=1)
    sp.add_argument("--states", type=int, default=4)
    sp.add_argument("--nonsimple", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=1)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("solve-game", help="solve a parity game in dump format")
    sp.add_argument("game")
    sp.set_defaults(func=cmd_solve_game)

    sp = sub.add_parser("selftest", help="seeded engine and diagonal sweeps")
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
