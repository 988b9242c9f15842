"""Command-line surface over the exact pipeline.

Every command resolves its parameters from flags, then the workspace config
file, then hard defaults, computes through the library, and stores a
canonical JSON artifact in the content-addressed cache.  Report-shaped
commands also write a CSV table and render a PNG figure alongside it.
Rational numbers appear as "p/q" strings everywhere; no floating point
enters tier-1 outputs.  Artifacts embed the normalization conventions so
they are readable without the source.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import sympy

from . import linalg, oracle, report
from .cocycle import CocycleRes
from .modsym import MSSpace
from .polyact import scalar_from_str, scalar_to_str
from .qforms import class_list_json, classes_for_disc, enumerate_classes
from .shintani import equivariance_report, icoeff, lift, lift_pm
from .workspace import Workspace

CONVENTIONS = {
    "hecke": "T_l sums plain substitutions over the l+1 standard cosets, no determinant scaling",
    "u_p": "U_p drops the lower-triangular coset; equals -p^(k-1) w_p on the p-new part",
    "w_p": "substitution by [[0,-1],[p,0]] scaled by |det|^(1-k); an involution",
    "w_inf": "substitution by diag(-1,1); even and odd parts are its +1 and -1 eigenspaces",
    "automorph": "built on the primitive part from the fundamental t^2 - D u^2 = 4 with t, u > 0",
    "pairing": "degree 2k-2 polynomials pair by the alternating binomial-weighted coefficient sum",
    "lift": "coefficient at n = D/p is (2k-2)! times the class sum of pairings against Q^(k-1)",
    "chi2_mode": "the l = 2 half-integral operator takes its middle character value from the Kronecker symbol",
}


class CommandError(Exception):
    """User-facing failure; message goes to stderr, exit code 2."""


def _require_prime(p: int) -> int:
    if not sympy.isprime(p):
        raise CommandError("p must be prime")
    return p


def _resolve(ws: Workspace, name: str, flag_value: int | None) -> int:
    return flag_value if flag_value is not None else ws.setting_int(name)


def _bool_word(flag: bool) -> str:
    return "true" if flag else "false"


def _print_artifact(path: Path, hit: bool) -> None:
    print(f"artifact: {path}" + (" (cache hit)" if hit else ""))


# ---------------------------------------------------------------------------
# symbol selection


def _load_cocycle_file(path: str, space: MSSpace) -> CocycleRes:
    obj = json.loads(Path(path).read_text())
    if int(obj["p"]) != space.p or int(obj["k"]) != space.k:
        raise CommandError(
            f"cocycle file is for (p, k) = ({obj['p']}, {obj['k']}), "
            f"not ({space.p}, {space.k})"
        )
    coords = [scalar_from_str(c) for c in obj["coords"]]
    return CocycleRes.from_coords(space, coords)


def _select_cocycle(space: MSSpace, selector: str) -> CocycleRes:
    """Resolve 'odd:i', 'even:i', 'pnew:i', or 'file:PATH' to a cocycle."""
    family, _, rest = selector.partition(":")
    if family == "file":
        if not rest:
            raise CommandError("selector 'file:' needs a path")
        return _load_cocycle_file(rest, space)
    if family == "eisenstein":
        raise CommandError(
            "refusing a boundary selection: the lift is only defined for "
            "cuspidal p-new classes, and eisenstein symbols are not cuspidal"
        )
    try:
        index = int(rest) if rest else 0
    except ValueError:
        raise CommandError(f"selector index {rest!r} is not an integer") from None
    span = space.pnew_cuspidal_basis()
    if family in ("even", "odd"):
        even, odd = space.even_odd_split(span)
        span = even if family == "even" else odd
    elif family != "pnew":
        raise CommandError(
            f"unknown selector family {family!r}; use odd, even, pnew, or file"
        )
    if not 0 <= index < len(span):
        raise CommandError(
            f"selector {selector!r} out of range: the {family} span has "
            f"dimension {len(span)}"
        )
    return CocycleRes.from_coords(space, span[index])


# ---------------------------------------------------------------------------
# qf


def cmd_qf_enum(ws: Workspace, args) -> int:
    p = _require_prime(_resolve(ws, "p", args.p))
    dmax = _resolve(ws, "dmax", args.dmax)

    def build() -> dict:
        classes = enumerate_classes(p, dmax)
        return {
            "p": p,
            "dmax": dmax,
            "classes": [class_list_json(p, d, reps) for d, reps in classes],
            "conventions": CONVENTIONS,
        }

    path, hit = ws.fetch("classes", {"p": p, "dmax": dmax}, build)
    obj = json.loads(path.read_text())
    nclasses = sum(len(c["reps"]) for c in obj["classes"])
    print(f"p={p} dmax={dmax}: {len(obj['classes'])} discriminants, {nclasses} classes")
    _print_artifact(path, hit)
    return 0


# ---------------------------------------------------------------------------
# ms


def cmd_ms_basis(ws: Workspace, args) -> int:
    p = _require_prime(_resolve(ws, "p", args.p))
    k = _resolve(ws, "k", args.k)
    if k < 1:
        raise CommandError("k must be at least 1")

    def build() -> dict:
        space = MSSpace.build(p, k)
        span = space.pnew_cuspidal_basis()
        even, odd = space.even_odd_split(span)
        return {
            "p": p,
            "k": k,
            "dim": space.dim,
            "eisenstein": len(space.eisenstein_basis()),
            "cuspidal": len(space.cuspidal_basis()),
            "pnew": len(space.pnew_basis()),
            "pnew_cuspidal": len(span),
            "even": len(even),
            "odd": len(odd),
            "conventions": CONVENTIONS,
        }

    path, hit = ws.fetch("ms-basis", {"p": p, "k": k}, build)
    obj = json.loads(path.read_text())
    print(
        f"p={p} k={k}: dim {obj['dim']}, cuspidal {obj['cuspidal']}, "
        f"pnew cuspidal {obj['pnew_cuspidal']} ({obj['even']} even, {obj['odd']} odd)"
    )
    _print_artifact(path, hit)
    return 0


def cmd_ms_hecke(ws: Workspace, args) -> int:
    p = _require_prime(_resolve(ws, "p", args.p))
    k = _resolve(ws, "k", args.k)
    ell = args.l
    if k < 1:
        raise CommandError("k must be at least 1")
    if not sympy.isprime(ell):
        raise CommandError("l must be prime")

    def build() -> dict:
        space = MSSpace.build(p, k)
        mat = space.hecke_matrix(ell)
        winf = space.w_inf_matrix()
        commutes = linalg.mat_mul(mat, winf) == linalg.mat_mul(winf, mat)
        return {
            "p": p,
            "k": k,
            "l": ell,
            "dim": space.dim,
            "matrix": [[scalar_to_str(x) for x in row] for row in mat],
            "commutes_with_w_inf": commutes,
            "conventions": CONVENTIONS,
        }

    path, hit = ws.fetch("ms-hecke", {"p": p, "k": k, "l": ell}, build)
    obj = json.loads(path.read_text())
    print(
        f"T_{ell} on p={p} k={k}: {obj['dim']}x{obj['dim']}, "
        f"commutes with w_inf: {_bool_word(obj['commutes_with_w_inf'])}"
    )
    _print_artifact(path, hit)
    return 0


# ---------------------------------------------------------------------------
# lift


def cmd_lift_compute(ws: Workspace, args) -> int:
    p = _require_prime(_resolve(ws, "p", args.p))
    k = _resolve(ws, "k", args.k)
    dmax = _resolve(ws, "dmax", args.dmax)
    selector = args.select

    def build() -> dict:
        space = MSSpace.build(p, k)
        J = _select_cocycle(space, selector)
        full = lift(J, dmax)
        plus, minus = lift_pm(J, dmax)
        support_ok = all((n * p) % 4 in (0, 1) for n in full.support())
        return {
            "p": p,
            "k": k,
            "dmax": dmax,
            "selector": selector,
            "ap": scalar_to_str(J.ap()),
            "lift": full.to_json(),
            "plus_lift": plus.to_json(),
            "minus_lift": minus.to_json(),
            "lift_zero": full.is_zero(),
            "plus_lift_zero": plus.is_zero(),
            "support_ok": support_ok,
            "conventions": CONVENTIONS,
        }

    params = {"p": p, "k": k, "dmax": dmax, "selector": selector}
    path, hit = ws.fetch("lift", params, build)
    obj = json.loads(path.read_text())
    coeffs = {int(n): scalar_from_str(c) for n, c in obj["lift"]["coeffs"].items()}
    rows = [(n, n * p, scalar_to_str(coeffs[n])) for n in sorted(coeffs)]
    csv_path = path.with_suffix(".csv")
    png_path = path.with_suffix(".png")
    report.write_delimited(csv_path, ("n", "D", "coefficient"), rows)
    report.coefficient_figure(
        png_path,
        sorted(coeffs),
        [coeffs[n] for n in sorted(coeffs)],
        f"lift coefficients, p={p} k={k} {selector}",
    )
    print(f"plus-lift zero: {_bool_word(obj['plus_lift_zero'])}")
    print(f"lift is zero up to Dmax: {_bool_word(obj['lift_zero'])}")
    print(f"support check: {_bool_word(obj['support_ok'])}")
    _print_artifact(path, hit)
    print(f"table: {csv_path}")
    print(f"figure: {png_path}")
    return 0


def cmd_lift_check_hecke(ws: Workspace, args) -> int:
    p = _require_prime(_resolve(ws, "p", args.p))
    k = _resolve(ws, "k", args.k)
    dmax = _resolve(ws, "dmax", args.dmax)
    ell = args.l
    selector = args.select
    if not sympy.isprime(ell) or ell == p:
        raise CommandError("l must be a prime different from p")

    def build() -> dict:
        space = MSSpace.build(p, k)
        J = _select_cocycle(space, selector)
        rep = equivariance_report(J, ell, dmax)
        return {"selector": selector, "report": rep.to_json(), "conventions": CONVENTIONS}

    params = {"p": p, "k": k, "dmax": dmax, "l": ell, "selector": selector}
    path, hit = ws.fetch("lift-hecke-check", params, build)
    obj = json.loads(path.read_text())["report"]
    word = "pass" if obj["passed"] else "FAIL"
    print(f"hecke equivariance l={ell}: {word} (sound range n <= {obj['sound_nmax']})")
    _print_artifact(path, hit)
    return 0 if obj["passed"] else 1


def cmd_lift_check_even(ws: Workspace, args) -> int:
    p = _require_prime(_resolve(ws, "p", args.p))
    k = _resolve(ws, "k", args.k)
    dmax = _resolve(ws, "dmax", args.dmax)

    def build() -> dict:
        space = MSSpace.build(p, k)
        results = []
        for i in range(len(space.pnew_cuspidal_basis())):
            J = _select_cocycle(space, f"pnew:{i}")
            plus, _ = lift_pm(J, dmax)
            results.append({"selector": f"pnew:{i}", "plus_lift_zero": plus.is_zero()})
        return {
            "p": p,
            "k": k,
            "dmax": dmax,
            "results": results,
            "all_zero": all(r["plus_lift_zero"] for r in results),
            "conventions": CONVENTIONS,
        }

    path, hit = ws.fetch("lift-even-check", {"p": p, "k": k, "dmax": dmax}, build)
    obj = json.loads(path.read_text())
    for row in obj["results"]:
        print(f"{row['selector']} plus-lift zero: {_bool_word(row['plus_lift_zero'])}")
    _print_artifact(path, hit)
    return 0 if obj["all_zero"] else 1


# ---------------------------------------------------------------------------
# cocycle


def cmd_cocycle_new(ws: Workspace, args) -> int:
    src = Path(args.from_ms)
    if not src.is_file():
        raise CommandError(f"no such file: {src}")
    obj = json.loads(src.read_text())
    p = _require_prime(int(obj["p"]))
    k = int(obj["k"])
    space = MSSpace.build(p, k)
    coords = [scalar_from_str(c) for c in obj["coords"]]
    try:
        J = CocycleRes.from_coords(space, coords)
    except ValueError as exc:
        raise CommandError(str(exc)) from None

    def build() -> dict:
        return {
            **J.to_json(),
            "harmonic": J.is_harmonic(),
            "conventions": CONVENTIONS,
        }

    params = {"p": p, "k": k, "coords": [scalar_to_str(c) for c in coords]}
    path, hit = ws.fetch("cocycle", params, build)
    got = json.loads(path.read_text())
    print(f"p={p} k={k}: harmonic: {_bool_word(got['harmonic'])}, cuspidal: {_bool_word(got['cuspidal'])}")
    _print_artifact(path, hit)
    return 0


# ---------------------------------------------------------------------------
# oracle passthrough


def cmd_oracle_orbits(ws: Workspace, args) -> int:
    p = _require_prime(_resolve(ws, "p", args.p))
    d = args.D
    h = args.H

    def build() -> dict:
        rep = oracle.orbit_oracle(p, d, h)
        return {**rep.to_json(), "verified": rep.certificates_verified()}

    path, hit = ws.fetch("oracle-orbits", {"p": p, "D": d, "H": h}, build)
    obj = json.loads(path.read_text())
    print(
        f"p={p} D={d} H={obj['H']}: {len(obj['classes'])} classes, "
        f"certificates verified: {_bool_word(obj['verified'])}"
    )
    _print_artifact(path, hit)
    return 0


def cmd_oracle_dims(ws: Workspace, args) -> int:
    p = _require_prime(_resolve(ws, "p", args.p))
    k = _resolve(ws, "k", args.k)
    try:
        dim, cusps = oracle.dim_formula(p, k)
    except ValueError as exc:
        raise CommandError(str(exc)) from None

    def build() -> dict:
        return {"p": p, "k": k, "dim": dim, "cusps": cusps}

    path, hit = ws.fetch("oracle-dims", {"p": p, "k": k}, build)
    print(f"p={p} k={k}: cusp dimension {dim}, cusps {cusps}")
    _print_artifact(path, hit)
    return 0


def cmd_oracle_periods(ws: Workspace, args) -> int:
    p = _require_prime(_resolve(ws, "p", args.p))
    k = _resolve(ws, "k", args.k)
    d = args.D
    prec = args.prec if args.prec is not None else ws.setting_int("precision")
    digits = args.digits
    selector = args.select

    def build() -> dict:
        space = MSSpace.build(p, k)
        J = _select_cocycle(space, selector)
        pairs = []
        for q in classes_for_disc(p, d):
            v = icoeff(J, q)
            if v != 0:
                pairs.append((q, v))
        if not pairs:
            raise CommandError(
                f"every class of D={d} pairs to zero against {selector}; "
                "nothing to compare"
            )
        data = oracle.EigenData.from_symbol(J.symbol)
        rep = oracle.period_ratio_report(data, pairs, precision=prec, digits=digits)
        return {"selector": selector, **rep.to_json(), "conventions": CONVENTIONS}

    params = {"p": p, "k": k, "D": d, "prec": prec, "digits": digits, "selector": selector}
    path, hit = ws.fetch("oracle-periods", params, build)
    obj = json.loads(path.read_text())
    labels = ["({a},{b},{c})".format(**q) for q in obj["forms"]]
    rows = list(zip(labels, obj["exact"], obj["ratios"]))
    csv_path = path.with_suffix(".csv")
    png_path = path.with_suffix(".png")
    report.write_delimited(csv_path, ("form", "exact", "ratio"), rows)
    base = complex(obj["ratios"][0].replace(" ", ""))
    devs = [abs(complex(r.replace(" ", "")) - base) / abs(base) for r in obj["ratios"]]
    report.deviation_figure(png_path, labels, devs, f"period ratio deviations, p={p} k={k} D={d}")
    word = "pass" if obj["passed"] else "FAIL"
    print(f"period ratio constant to {digits} digits: {word}")
    print(f"max deviation: {obj['max_deviation']:.3e}")
    _print_artifact(path, hit)
    print(f"table: {csv_path}")
    print(f"figure: {png_path}")
    return 0 if obj["passed"] else 1


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="rslift", description=__doc__)
    top.add_argument("--workspace", default=".", help="workspace root (config + default cache)")
    top.add_argument("--cache-dir", default=None, help="cache directory override")
    sub = top.add_subparsers(dest="group", required=True)

    def add(group, name, fn, flags):
        cmd = group.add_parser(name)
        for flag, kwargs in flags:
            cmd.add_argument(flag, **kwargs)
        cmd.set_defaults(fn=fn)
        return cmd

    intf = {"type": int, "default": None}

    qf = sub.add_parser("qf").add_subparsers(dest="cmd", required=True)
    add(qf, "enum", cmd_qf_enum, [("--p", intf), ("--dmax", intf)])

    ms = sub.add_parser("ms").add_subparsers(dest="cmd", required=True)
    add(ms, "basis", cmd_ms_basis, [("--p", intf), ("--k", intf)])
    add(ms, "hecke", cmd_ms_hecke, [("--p", intf), ("--k", intf), ("--l", {"type": int, "required": True})])

    lf = sub.add_parser("lift").add_subparsers(dest="cmd", required=True)
    sel = {"default": "odd:0", "help": "odd:i, even:i, pnew:i, or file:PATH"}
    add(lf, "compute", cmd_lift_compute, [("--p", intf), ("--k", intf), ("--dmax", intf), ("--select", sel)])
    add(
        lf,
        "check-hecke",
        cmd_lift_check_hecke,
        [("--p", intf), ("--k", intf), ("--dmax", intf), ("--l", {"type": int, "required": True}), ("--select", sel)],
    )
    add(lf, "check-even", cmd_lift_check_even, [("--p", intf), ("--k", intf), ("--dmax", intf)])

    co = sub.add_parser("cocycle").add_subparsers(dest="cmd", required=True)
    add(co, "new", cmd_cocycle_new, [("--from-ms", {"required": True, "dest": "from_ms"})])

    orc = sub.add_parser("oracle").add_subparsers(dest="cmd", required=True)
    add(orc, "orbits", cmd_oracle_orbits, [("--p", intf), ("--D", {"type": int, "required": True}), ("--H", intf)])
    add(orc, "dims", cmd_oracle_dims, [("--p", intf), ("--k", intf)])
    add(
        orc,
        "periods",
        cmd_oracle_periods,
        [
            ("--p", intf),
            ("--k", intf),
            ("--D", {"type": int, "required": True}),
            ("--prec", intf),
            ("--digits", {"type": int, "default": 10}),
            ("--select", sel),
        ],
    )
    return top


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        ws = Workspace.open(args.workspace, args.cache_dir)
        return args.fn(ws, args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
