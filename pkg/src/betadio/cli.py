"""Command-line front end.

Reproducible batch runs over the library: every JSON output embeds the
resolved run configuration and the library version, digit outputs use the
``base=<b>`` file format, and constructions always write a JSON sidecar with
the full schedule next to the digit file.

Exit codes: 0 success, 1 usage error, 2 infeasible/domain error,
3 precision exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .bary import (
    DigitSet,
    check_relations,
    expand_lacunary,
    expand_rational,
    exponents_of_word,
)
from .beta_shift import (
    BetaSystem,
    count_admissible,
    cylinder,
    expansion_of_one_star,
    greedy_expand,
    is_admissible,
    is_self_admissible,
    parry_invert,
    renyi_bounds_check,
)
from .constructions import (
    BetaLayout,
    ConstructionSpec,
    FillPolicy,
    ScheduledRuns,
    generate_bary,
    generate_beta,
    generate_parameter_space,
    generate_restricted,
)
from .errors import DomainError, PrecisionError
from .measures_dim import (
    critical_exponent_s0,
    digit_set_scale,
    dim_formula,
    dim_formula_sup,
    local_dimension_bary,
    local_dimension_beta,
    measure_bary,
    measure_beta,
    report_to_json,
    reprove_dim_limit,
)
from .numerics import Scalar
from .words import DigitWord, read_digit_file, write_digit_file

F = Fraction


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return F(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational: {text!r} ({exc})")


def _word(text: str) -> list[int]:
    seps = "," if "," in text else None
    return [int(t) for t in text.split(seps)]


def _digit_set(text: str, base: int) -> DigitSet:
    return DigitSet(base, frozenset(int(t) for t in text.split(",")))


def default_precision() -> int:
    return int(os.environ.get("BETADIO_PRECISION", "256"))


def _emit(args, payload: dict, config: dict, plain=None):
    """JSON (with embedded config and version) to files; for stdout, a bare
    value when the command has a natural one-liner."""
    config.setdefault("precision_bits", default_precision())
    payload = {"version": __version__, "config": config, **payload}
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(json.dumps(payload, indent=2) + "\n")
    elif plain is not None:
        print(plain)
    else:
        print(json.dumps(payload, indent=2))


def _emit_digits(args, word: DigitWord, sidecar: dict, config: dict):
    config.setdefault("precision_bits", default_precision())
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            write_digit_file(fh, word.base, word)
        side = {"version": __version__, "config": config, **sidecar}
        with open(args.output + ".json", "w") as fh:
            json.dump(side, fh, indent=2)
            fh.write("\n")
    else:
        write_digit_file(sys.stdout, word.base, word)


def _scalar_dict(s) -> dict:
    return {"lower": f"{s.lo.value.numerator}/{s.lo.value.denominator}",
            "upper": f"{s.hi.value.numerator}/{s.hi.value.denominator}",
            "float": float(s.mid)}


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_expand(args):
    cfg = {"cmd": "expand", "digits": args.digits}
    if args.base and not args.beta:
        cfg["base"] = args.base
        if args.lacunary:
            cfg["lacunary"] = args.lacunary
            rule = "squared-power" if args.lacunary == "squared-power" else _fraction(args.lacunary)
            word = expand_lacunary(args.base, rule, args.digits)
        else:
            x = _fraction(args.x)
            cfg["x"] = str(x)
            word = expand_rational(x.numerator, x.denominator, args.base, args.digits)
    else:
        if not args.beta:
            raise UsageError("need --base or --beta")
        cfg["beta"] = args.beta
        x = _fraction(args.x)
        cfg["x"] = str(x)
        system = BetaSystem.parse(args.beta, default_precision())
        word = greedy_expand(system, x, args.digits)
    _emit_digits(args, word, {}, cfg)
    return 0


def _cmd_expand_one(args):
    system = BetaSystem.parse(args.beta, default_precision())
    word = expansion_of_one_star(system, args.digits)
    _emit_digits(args, word, {}, {"cmd": "expand-one", "beta": args.beta,
                                  "digits": args.digits})
    return 0


def _cmd_admissible(args):
    system = BetaSystem.parse(args.beta, default_precision())
    cfg = {"cmd": f"admissible {args.action}", "beta": args.beta}
    if args.action == "count":
        count = count_admissible(system, args.len)
        payload = {"n": args.len, "count": count}
        plain = str(count)
        if args.renyi:
            payload["renyi"] = {k: v for k, v in renyi_bounds_check(system, args.len).items()
                                if k != "count"}
            plain = None
        _emit(args, payload, cfg, plain=plain)
    elif args.action == "list":
        if system.automaton is None:
            raise DomainError("listing needs a finite-type base")
        words = system.automaton.enumerate_words(args.len)
        if args.output:
            _emit(args, {"n": args.len,
                         "words": [" ".join(map(str, w)) for w in words]}, cfg)
        else:
            for w in words:  # stream; counts never materialize word lists
                print(" ".join(map(str, w)))
    else:
        word = _word(args.word)
        ok = is_admissible(system, word)
        _emit(args, {"word": word, "admissible": ok}, cfg, plain=str(ok).lower())
    return 0


def _cmd_cylinder(args):
    system = BetaSystem.parse(args.beta, default_precision())
    word = _word(args.word)
    c = cylinder(system, word, bits=default_precision())
    _emit(args, {"word": word, "left": _scalar_dict(c.left),
                 "right": _scalar_dict(c.right), "length": _scalar_dict(c.length),
                 "full": c.full},
          {"cmd": "cylinder", "beta": args.beta})
    return 0


def _cmd_exponents(args):
    with open(args.input) as fh:
        word = read_digit_file(fh)
    kinds = ("zeros",) if args.zeros_only else ("zeros", "top")
    est = exponents_of_word(word, kinds=kinds)
    rel = check_relations(est, tol=F(1, 100))
    payload = {
        "horizon": est.horizon,
        "v_lower": str(est.v_lower),
        "v_hat_lower": str(est.v_hat_lower),
        "window": est.window,
        "k_over_log_n": est.k_over_log_n,
        "relations": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in rel.items()},
    }
    if args.trajectory:
        payload["trajectory"] = [[k, str(rv), None if rh is None else str(rh)]
                                 for k, rv, rh in est.trajectory]
    _emit(args, payload, {"cmd": "exponents", "input": args.input,
                          "zeros_only": args.zeros_only})
    return 0


def _fill_from_args(args) -> FillPolicy:
    return FillPolicy.parse(args.fill, seed=args.seed)


def _cmd_construct(args):
    cfg = {"cmd": f"construct {args.flavor}", "theta": args.theta, "vhat": args.vhat,
           "stages": args.stages, "fill": args.fill, "seed": args.seed}
    theta, vhat = _fraction(args.theta), _fraction(args.vhat)
    if args.flavor == "bary":
        spec = ConstructionSpec(theta=theta, v_hat=vhat, stages=args.stages,
                                base=args.base, fill=_fill_from_args(args))
        out = generate_bary(spec)
        cfg["base"] = args.base
        _emit_digits(args, out.word, out.to_dict(), cfg)
    elif args.flavor == "restricted":
        ds = _digit_set(args.digit_set, args.base)
        spec = ConstructionSpec(theta=theta, v_hat=vhat, stages=args.stages,
                                base=args.base, digit_set=ds, fill=_fill_from_args(args))
        out = generate_restricted(spec)
        cfg.update({"base": args.base, "digit_set": args.digit_set})
        _emit_digits(args, out.word, out.to_dict(), cfg)
    elif args.flavor == "beta":
        system = BetaSystem.parse(args.beta, default_precision())
        out = generate_beta(system, args.N, theta, vhat, args.stages,
                            _fill_from_args(args))
        cfg.update({"beta": args.beta, "N": args.N})
        _emit_digits(args, out.word, out.to_dict(), cfg)
    else:  # param
        b0 = BetaSystem.parse(args.beta0, default_precision())
        b1 = BetaSystem.parse(args.beta1, default_precision())
        b2 = BetaSystem.parse(args.beta2, default_precision())
        res = generate_parameter_space(b0, b1, b2, args.N, theta, vhat,
                                       args.stages, _fill_from_args(args))
        cfg.update({"beta0": args.beta0, "beta1": args.beta1, "beta2": args.beta2,
                    "N": args.N})
        side = {"recovered_base": _scalar_dict(res.root.as_scalar(96)),
                "prefix": list(res.prefix),
                "approximant": res.approximant_spec,
                "construction": res.construction.to_dict()}
        _emit_digits(args, res.word, side, cfg)
    return 0


def _cmd_measure(args):
    with open(args.sidecar) as fh:
        side = json.load(fh)
    sched = side["schedule"]
    cfg = {"cmd": "measure", "sidecar": args.sidecar, "n": args.n}
    if side.get("kind") == "beta" or "N" in sched:
        layout = BetaLayout.from_dict(sched)
        sub = BetaSystem.parse(side["approximant"], default_precision())
        mv = measure_beta(layout, sub, args.n)
        lm = mv.log_mu(default_precision())
        _emit(args, {"n": args.n,
                     "factors": [[length, mult] for length, _c, mult in mv.factors],
                     "log_mu": _scalar_dict(lm)}, cfg)
    else:
        runs = ScheduledRuns.from_dict(sched)
        base = side.get("base", 0)
        if side.get("digit_set"):
            base = DigitSet(side["base"], frozenset(side["digit_set"]))
        mv = measure_bary(runs, base, args.n, pair=side.get("base") == 2)
        _emit(args, {"n": args.n, "base": mv.base, "exponent": mv.exponent}, cfg)
    return 0


def _cmd_dim(args):
    if args.what == "formula":
        vhat = _fraction(args.vhat)
        cfg = {"cmd": "dim formula", "vhat": args.vhat}
        if args.sup or args.theta is None:
            value, theta0 = dim_formula_sup(vhat)
            payload = {"value": str(value), "theta0": None if theta0 is None else str(theta0)}
        else:
            theta = _fraction(args.theta)
            cfg["theta"] = args.theta
            value = dim_formula(theta, vhat)
            payload = {"value": str(value)}
        plain = str(value)
        if args.digit_set:
            ds = _digit_set(args.digit_set, args.base)
            scale = digit_set_scale(ds, default_precision())
            scaled = scale * Scalar.from_fraction(value)
            payload["scale"] = _scalar_dict(scale)
            payload["scaled_value"] = _scalar_dict(scaled)
            cfg.update({"base": args.base, "digit_set": args.digit_set})
            plain = f"{float(scaled.mid):.10f} * (exact rational factor {value})"
        _emit(args, payload, cfg, plain=plain)
    elif args.what == "local":
        if not args.theta:
            raise UsageError("dim local needs --theta")
        theta, vhat = _fraction(args.theta), _fraction(args.vhat)
        tol = _fraction(args.tolerance)
        if args.beta:
            system = BetaSystem.parse(args.beta, default_precision())
            rep = local_dimension_beta(system, args.N, theta, vhat, args.stages, tol)
        elif args.digit_set:
            ds = _digit_set(args.digit_set, args.base)
            rep = local_dimension_bary(theta, vhat, ds, args.stages, tol)
        else:
            rep = local_dimension_bary(theta, vhat, args.base, args.stages, tol)
        if args.format == "csv":
            text = rep.to_csv()
            if args.output:
                with open(args.output, "w") as fh:
                    fh.write(text)
            else:
                print(text, end="")
        else:
            payload = json.loads(report_to_json(rep))
            _emit(args, payload, {"cmd": "dim local", "theta": args.theta,
                                  "vhat": args.vhat, "stages": args.stages,
                                  "beta": args.beta, "base": args.base,
                                  "digit_set": args.digit_set, "N": args.N})
    else:  # s0
        if not args.theta:
            raise UsageError("dim s0 needs --theta")
        theta, vhat, eps = _fraction(args.theta), _fraction(args.vhat), _fraction(args.eps)
        value = critical_exponent_s0(theta, vhat, eps)
        _emit(args, {"s0": str(value)},
              {"cmd": "dim s0", "theta": args.theta, "vhat": args.vhat, "eps": args.eps},
              plain=str(value))
    return 0


def _cmd_parry(args):
    word_text = args.word
    if "(" in word_text:
        head, _, tail = word_text.partition("(")
        from .words import PeriodicWord
        pre = tuple(int(t) for t in head.rstrip(",").split(",")) if head.strip(",") else ()
        per = tuple(int(t) for t in tail.rstrip(")").split(","))
        word = PeriodicWord(pre, per)
        word_desc = {"pre": list(pre), "per": list(per)}
    else:
        word = _word(word_text)
        word_desc = {"digits": list(word)}
    cfg = {"cmd": f"parry {args.action}", "word": args.word}
    if args.action == "check":
        ok = is_self_admissible(word)
        _emit(args, {"word": word_desc, "self_admissible": ok}, cfg, plain=str(ok).lower())
    else:
        root = parry_invert(word, precision=args.bits)
        s = root.as_scalar(args.bits)
        _emit(args, {"word": word_desc, "beta": _scalar_dict(s)}, cfg,
              plain=f"{float(s.mid):.15f}")
    return 0


def _cmd_reprove(args):
    rep = reprove_dim_limit(_fraction(args.v), [_fraction(t) for t in args.thetas])
    _emit(args, {"limit": str(rep["limit"]), "monotone": rep["monotone"],
                 "values": [[str(t), str(v)] for t, v in rep["values"]]},
          {"cmd": "dim reprove", "v": args.v, "thetas": args.thetas})
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def build_parser() -> _Parser:
    p = _Parser(prog="betadio", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_output(sp):
        sp.add_argument("--output", "-o", help="write to file instead of stdout")

    sp = sub.add_parser("expand", help="digits of x in an integer or real base")
    sp.add_argument("--base", type=int)
    sp.add_argument("--beta")
    sp.add_argument("--x", default="0")
    sp.add_argument("--lacunary", help="rational v for the sparse series, or squared-power")
    sp.add_argument("--digits", type=int, required=True)
    add_output(sp)
    sp.set_defaults(fn=_cmd_expand)

    sp = sub.add_parser("expand-one", help="infinite expansion of 1")
    sp.add_argument("--beta", required=True)
    sp.add_argument("--digits", type=int, required=True)
    add_output(sp)
    sp.set_defaults(fn=_cmd_expand_one)

    sp = sub.add_parser("admissible", help="count/list/check admissible words")
    sp.add_argument("action", choices=["count", "list", "check"])
    sp.add_argument("--beta", required=True)
    sp.add_argument("--len", type=int)
    sp.add_argument("--word")
    sp.add_argument("--renyi", action="store_true", help="attach the count bounds check")
    add_output(sp)
    sp.set_defaults(fn=_cmd_admissible)

    sp = sub.add_parser("cylinder", help="certified basic-interval endpoints")
    sp.add_argument("--beta", required=True)
    sp.add_argument("--word", required=True)
    add_output(sp)
    sp.set_defaults(fn=_cmd_cylinder)

    sp = sub.add_parser("exponents", help="run analysis of a digit file")
    sp.add_argument("--input", required=True)
    sp.add_argument("--zeros-only", action="store_true")
    sp.add_argument("--trajectory", action="store_true")
    add_output(sp)
    sp.set_defaults(fn=_cmd_exponents)

    sp = sub.add_parser("construct", help="generate construction digit words")
    sp.add_argument("flavor", choices=["bary", "beta", "param", "restricted"])
    sp.add_argument("--theta", required=True)
    sp.add_argument("--vhat", required=True)
    sp.add_argument("--stages", type=int, default=8)
    sp.add_argument("--fill", default="const:1")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--base", type=int)
    sp.add_argument("--digit-set", dest="digit_set")
    sp.add_argument("--beta")
    sp.add_argument("--beta0")
    sp.add_argument("--beta1")
    sp.add_argument("--beta2")
    sp.add_argument("--N", type=int, default=3)
    add_output(sp)
    sp.set_defaults(fn=_cmd_construct)

    sp = sub.add_parser("measure", help="cylinder mass from a construction sidecar")
    sp.add_argument("--sidecar", required=True)
    sp.add_argument("--n", type=int, required=True)
    add_output(sp)
    sp.set_defaults(fn=_cmd_measure)

    sp = sub.add_parser("dim", help="dimension formulas and trajectories")
    sp.add_argument("what", choices=["formula", "local", "s0"])
    sp.add_argument("--theta")
    sp.add_argument("--vhat", required=True)
    sp.add_argument("--sup", action="store_true")
    sp.add_argument("--eps", default="0")
    sp.add_argument("--base", type=int, default=3)
    sp.add_argument("--digit-set", dest="digit_set")
    sp.add_argument("--beta")
    sp.add_argument("--N", type=int, default=3)
    sp.add_argument("--stages", type=int, default=12)
    sp.add_argument("--tolerance", default="1/50")
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    add_output(sp)
    sp.set_defaults(fn=_cmd_dim)

    sp = sub.add_parser("parry", help="self-admissibility and base inversion")
    sp.add_argument("action", choices=["check", "invert"])
    sp.add_argument("--word", required=True)
    sp.add_argument("--bits", type=int, default=128)
    add_output(sp)
    sp.set_defaults(fn=_cmd_parry)

    sp = sub.add_parser("reprove", help="prescribed-pair limit along a theta grid")
    sp.add_argument("--v", required=True)
    sp.add_argument("--thetas", nargs="+", required=True)
    add_output(sp)
    sp.set_defaults(fn=_cmd_reprove)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
