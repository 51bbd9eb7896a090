"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 numerical postcondition failure.
The default tolerance can be set with ``PPAV_TOL``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import genus, hodge, io, siegel, theta
from .errors import NumericalError, ValidationError
from .forms import MetricForm, SkewForm, induced_metric, is_coherent, tame
from .lattice import IntegralSkewForm, build_ppav, is_unimodular, symplectic_lattice_basis

TOL_RANGE = (1e-14, 1e-3)


def _default_tol() -> float:
    raw = os.environ.get("PPAV_TOL")
    if raw is None:
        return 1e-9
    try:
        return float(raw)
    except ValueError as exc:
        raise ValidationError(f"PPAV_TOL is not a number: {raw!r}") from exc


def _load(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex number {text!r}") from exc


def _cstr(z: complex, digits: int = 12) -> str:
    z = complex(z)
    re = round(z.real, digits) + 0.0
    im = round(z.imag, digits) + 0.0
    return f"{re:.{digits}g}{'+' if im >= 0 else '-'}{abs(im):.{digits}g}i"


def _siegel_for_lattice(omega: SkewForm, J):
    """Period point when ``omega`` is integral and unimodular on Z^{2g}, else None."""
    w = omega.gram
    if not np.allclose(w, np.round(w), atol=0):
        return None
    iw = IntegralSkewForm(np.round(w).astype(int).tolist())
    if not is_unimodular(iw):
        return None
    p = symplectic_lattice_basis(iw).astype(float)
    gm = induced_metric(omega, J).gram
    return siegel.pair_to_siegel(MetricForm(p.T @ gm @ p))


# --------------------------------------------------------------------------
# commands; each returns (payload, text lines)


def cmd_tame(args):
    if args.fixture == "standard":
        n = args.dim
        b, w = MetricForm(np.eye(2 * n)), SkewForm.standard(n)
    elif args.fixture == "siegel-2i":
        _, b = siegel.siegel_to_structure(siegel.SiegelPoint(np.array([[2j]])))
        w = SkewForm.standard(1)
    elif args.pair:
        data = _load(args.pair)
        try:
            b = io.form_from_json(data["metric"], "metric")
            w = io.form_from_json(data["skew"], "skew")
        except (KeyError, TypeError) as exc:
            raise ValidationError("pair JSON needs 'metric' and 'skew'") from exc
    else:
        raise ValidationError("give a pair file or --fixture")
    J = tame(b, w, args.tol)
    gm = induced_metric(w, J, args.tol)
    lam = is_coherent(b, w, args.tol)
    Z = _siegel_for_lattice(w, J)
    payload = {
        "J": J.matrix,
        "induced_metric": gm.gram,
        "coherent": lam is not None,
        "scale": lam,
        "siegel_point": io.siegel_to_json(Z) if Z is not None else None,
    }
    text = [f"J =\n{np.array2string(J.matrix, precision=10, suppress_small=True)}",
            f"coherent: {lam is not None}" + (f" (b = {lam:.12g} * omega(., J.))" if lam is not None else "")]
    if Z is not None:
        text.append("Siegel point Z = " + np.array2string(Z.Z, precision=10, suppress_small=True))
    return payload, text


def _read_siegel(args) -> siegel.SiegelPoint:
    if args.period:
        return io.siegel_from_json(_load(args.period))
    if args.tau:
        return siegel.SiegelPoint(np.array([[_complex(args.tau)]]))
    raise ValidationError("give --period FILE or --tau")


def cmd_period(args):
    Z = _read_siegel(args)
    J, b = siegel.siegel_to_structure(Z)
    back = siegel.pair_to_siegel(b, args.tol)
    payload = {
        "T": siegel.period_transform(Z),
        "J": J.matrix,
        "metric": b.gram,
        "round_trip": io.siegel_to_json(back),
        "round_trip_error": float(np.linalg.norm(back.Z - Z.Z)),
    }
    if args.report:
        payload["report"] = siegel.dictionary_report(Z)
    text = [f"J =\n{np.array2string(J.matrix, precision=10, suppress_small=True)}",
            f"round trip Z = {np.array2string(back.Z, precision=12, suppress_small=True)}"]
    if args.report:
        text.append(json.dumps(payload["report"], indent=2, sort_keys=True, default=str))
    return payload, text


def _cp3_lattice():
    model = genus.cp3_model()
    a = genus.a_hat_class(model, genus.cp_pontryagin(model))
    return model, a, genus.unimodularity_report(model, a)


def cmd_ppav(args):
    if args.fixture == "cp3":
        _, _, rep = _cp3_lattice()
        omega = IntegralSkewForm(rep.gram)
        b = MetricForm(np.eye(omega.rank))
    elif args.pair:
        data = _load(args.pair)
        try:
            b = io.form_from_json(data["metric"], "metric")
            omega = IntegralSkewForm(io.exact_matrix_from_json(data["omega"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError("ppav JSON needs 'metric' and 'omega'") from exc
    else:
        raise ValidationError("give a pair file or --fixture cp3")
    av = build_ppav(b, omega, args.tol)
    Z = av.siegel_point() if av.principal else None
    payload = {
        "J": av.J.matrix,
        "omega": io.matrix_to_json(omega.gram),
        "principal": av.principal,
        "siegel_point": io.siegel_to_json(Z) if Z is not None else None,
    }
    text = [f"rank {av.rank}, principal: {av.principal}"]
    if Z is not None:
        text.append("Siegel point Z = " + np.array2string(Z.Z, precision=10, suppress_small=True))
    return payload, text


def _parse_z(text: str | None, g: int) -> np.ndarray:
    if not text:
        return np.zeros(g, dtype=complex)
    try:
        nums = [float(x) for x in text.replace(";", ",").split(",")]
    except ValueError as exc:
        raise ValidationError("--z expects comma-separated re,im pairs") from exc
    if len(nums) != 2 * g:
        raise ValidationError(f"--z needs {g} re,im pairs")
    return np.array([complex(nums[2 * i], nums[2 * i + 1]) for i in range(g)])


def cmd_theta(args):
    Z = _read_siegel(args)
    ch = theta.Characteristic.parse(args.char) if args.char else theta.Characteristic.zero(Z.g)
    res = theta.theta_series(Z, ch, _parse_z(args.z, Z.g), args.tol)
    payload = {"value": res.value, "radius": res.radius, "terms": res.terms, "parity": theta.parity(ch)}
    text = [f"theta[{ch}] = {_cstr(res.value, 15)}  (radius {res.radius:g}, {res.terms} terms, {theta.parity(ch)})"]
    return payload, text


def _ring_and_multiplier(args):
    if args.model:
        model = io.ring_model_from_json(_load(args.model))
        if args.multiplier:
            a = model.element([Fraction(x) for x in args.multiplier.split(",")])
        else:
            a = model.one()
        return model, a
    model = genus.cp_model(args.n)
    return model, genus.a_hat_class(model, genus.cp_pontryagin(model))


def cmd_genus(args):
    if args.genus_cmd == "ahat":
        polys = genus.a_hat_series(args.order)
        return {"order": args.order, "terms": [str(p) for p in polys]}, [" ; ".join(str(p) for p in polys)]
    if args.genus_cmd == "ch":
        terms = genus.chern_character(args.rank, args.order)
        return {"rank": args.rank, "terms": [str(t) for t in terms]}, [f"ch_{k} = {t}" for k, t in enumerate(terms)]
    model, a = _ring_and_multiplier(args)
    if args.genus_cmd == "pair":
        gens = model.lattice_elements()
        if args.s is not None and args.t is not None:
            h = model.basis(1)
            x, y = (h * args.s).exp(), (h * args.t).exp()
            val = genus.twisted_k_pairing(model, a, x, y)
            return {"s": args.s, "t": args.t, "value": val}, [f"pairing(ch O({args.s}), ch O({args.t})) = {val}"]
        gram = [[genus.twisted_k_pairing(model, a, x, y) for y in gens] for x in gens]
        return {"multiplier": [str(c) for c in a.coeffs], "gram": gram}, [" ".join(f"{v!s:>5}" for v in row) for row in gram]
    # unimodular
    gens = model.lattice_elements()
    if args.index2:
        gens = [gens[0] * 2] + gens[1:]
    rep = genus.unimodularity_report(model, a, gens)
    payload = {"gram": [list(r) for r in rep.gram], "det": rep.det, "unimodular": rep.unimodular,
               "normalized": genus.is_normalized_multiplier(model, a, gens)}
    text = [" ".join(f"{v:>4}" for v in row) for row in rep.gram] + [f"det = {rep.det}, unimodular: {rep.unimodular}"]
    return payload, text


def cmd_hodge(args):
    sub = args.hodge_cmd
    if sub == "etau":
        tau = _complex(args.tau)
        fx = hodge.etau_build(tau)
        det = complex(np.linalg.det(fx.stacked))
        closed = hodge.etau_det_closed_form(tau)
        payload = {"tau": tau, "det": det, "det_closed_form": closed, "det_rel_error": abs(det - closed) / abs(closed)}
        text = [f"det(M;N) = {_cstr(det, 12)}", f"closed form = {_cstr(closed, 12)}"]
        d1, d2 = hodge.etau_plucker(tau)
        payload["plucker"] = [d1, d2]
        if abs(tau.real) > 1e-12:
            ratio = hodge.plucker_ratio(tau)
            dbar, d = hodge.nonholomorphy_probe(tau, args.step)
            payload.update({"ratio": ratio, "d_taubar": dbar, "d_tau": d})
            text += [f"ratio = {_cstr(ratio)}", f"|d/dtaubar| = {abs(dbar):.6g}, |d/dtau| = {abs(d):.6g}"]
        else:
            text.append("ratio: pole on the imaginary axis")
        return payload, text
    if sub == "lefschetz":
        lm = hodge.torus_lefschetz(args.d) if args.fixture == "torus" else io.lefschetz_from_json(_load(args.module))
        rows = []
        for k in range(lm.d + 1):
            G = hodge.riemann_form_gram(lm, k)
            kind = "antisymmetric" if np.allclose(G, -G.T) else "symmetric" if np.allclose(G, G.T) else "neither"
            entry = {"degree": k, "Q_parity": kind}
            if k in lm.weil:
                B = hodge.hodge_metric_gram(lm, k)
                entry["hodge_metric_min_eig"] = float(np.linalg.eigvalsh(0.5 * (B + B.T))[0])
            rows.append(entry)
        return {"d": lm.d, "dims": list(lm.dims), "degrees": rows}, [json.dumps(r, sort_keys=True) for r in rows]
    hs = io.hodge_from_json(_load(args.structure))
    if sub == "weil":
        C = hodge.weil_operator(hs).C
        payload = {"C": C, "hodge_numbers": {f"{p},{q}": n for (p, q), n in hs.hodge_numbers().items()}}
        if args.Q:
            Q = hodge.PolarizationForm(io.exact_matrix_from_json(_load(args.Q)), hs.weight)
            payload["riemann"] = list(hodge.check_riemann(hs, Q))
        return payload, [np.array2string(C, precision=10, suppress_small=True)]
    # even
    if not args.Q:
        raise ValidationError("hodge even needs --Q")
    Q = hodge.PolarizationForm(io.exact_matrix_from_json(_load(args.Q)), hs.weight)
    out = hodge.even_to_weight_one(hs, Q)
    from .lattice import exact_det

    det = exact_det(out.q)
    payload = {"dim": out.dim, "J": out.J, "q": io.matrix_to_json(out.q), "q_det": det}
    return payload, [f"dim V = {out.dim}, det q = {det}"]


def _parse_signs(text: str) -> list[int]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in ("+", "+1", "1"):
            out.append(1)
        elif tok in ("-", "-1"):
            out.append(-1)
        else:
            raise ValidationError(f"bad sign {tok!r}")
    return out


def cmd_multiplier(args):
    if args.mult_cmd == "enum":
        rows = []
        for eps, m, ch in theta.enumerate_multipliers(args.g):
            rows.append({"eps": list(eps), "theta": list(m.theta), "characteristic": str(ch), "parity": theta.parity(ch)})
        text = [f"{' '.join('+' if e > 0 else '-' for e in r['eps'])}  theta={''.join(map(str, r['theta']))}  ({r['characteristic']})  {r['parity']}" for r in rows]
        return {"g": args.g, "multipliers": rows}, text
    if args.mult_cmd == "char":
        eps = _parse_signs(args.eps)
        if len(eps) % 2:
            raise ValidationError("need an even number of signs")
        m = theta.multiplier_from_basis(eps, IntegralSkewForm.standard(len(eps) // 2))
        ch = theta.characteristic_from_multiplier(m)
        return {"theta": list(m.theta), "characteristic": str(ch), "parity": theta.parity(ch)}, [f"{ch} ({theta.parity(ch)})"]
    # check
    eps = _parse_signs(args.eps)
    if len(eps) % 2:
        raise ValidationError("need an even number of signs")
    m = theta.multiplier_from_basis(eps, IntegralSkewForm.standard(len(eps) // 2))
    rng = np.random.default_rng(args.seed)
    bad = 0
    for _ in range(args.samples):
        x = rng.integers(-5, 6, size=len(eps))
        y = rng.integers(-5, 6, size=len(eps))
        bad += m.cocycle_defect(x, y)
    return {"samples": args.samples, "violations": bad}, [f"{args.samples} samples, {bad} cocycle violations"]


# --------------------------------------------------------------------------


def _tolerance(text: str) -> float:
    try:
        t = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from exc
    return t


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--tol", type=_tolerance, default=None, help="tolerance in [1e-14, 1e-3] (default $PPAV_TOL or 1e-9)")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="ppav", description="Polarized abelian varieties from metrics and symplectic forms.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tame", parents=[common], help="taming complex structure of a (metric, skew) pair")
    p.add_argument("pair", nargs="?")
    p.add_argument("--fixture", choices=("standard", "siegel-2i"))
    p.add_argument("--dim", type=int, default=1, help="half dimension for the standard fixture")
    p.set_defaults(func=cmd_tame)

    p = sub.add_parser("period", parents=[common], help="structure and metric of a Siegel point")
    p.add_argument("--period")
    p.add_argument("--tau")
    p.add_argument("--report", action="store_true")
    p.set_defaults(func=cmd_period)

    p = sub.add_parser("ppav", parents=[common], help="assemble a polarized abelian variety")
    p.add_argument("pair", nargs="?")
    p.add_argument("--fixture", choices=("cp3",))
    p.set_defaults(func=cmd_ppav)

    p = sub.add_parser("theta", parents=[common], help="theta function with characteristic")
    p.add_argument("--period")
    p.add_argument("--tau")
    p.add_argument("--char")
    p.add_argument("--z")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("genus", help="characteristic classes")
    gsub = p.add_subparsers(dest="genus_cmd", required=True)
    q = gsub.add_parser("ahat", parents=[common])
    q.add_argument("--order", type=int, default=2)
    q = gsub.add_parser("ch", parents=[common])
    q.add_argument("--order", type=int, default=3)
    q.add_argument("--rank", type=int, default=2)
    for name in ("pair", "unimodular"):
        q = gsub.add_parser(name, parents=[common])
        q.add_argument("--fixture", choices=("cp3",), default="cp3")
        q.add_argument("--n", type=int, default=3, help="complex dimension of the projective-space fixture")
        q.add_argument("--model")
        q.add_argument("--multiplier", help="coefficients of a on the model basis")
        if name == "pair":
            q.add_argument("--s", type=int)
            q.add_argument("--t", type=int)
        else:
            q.add_argument("--index2", action="store_true", help="replace the first generator by twice itself")
    p.set_defaults(func=cmd_genus)

    p = sub.add_parser("hodge", help="Hodge structures")
    hsub = p.add_subparsers(dest="hodge_cmd", required=True)
    for name in ("weil", "even"):
        q = hsub.add_parser(name, parents=[common])
        q.add_argument("structure")
        q.add_argument("--Q")
    q = hsub.add_parser("lefschetz", parents=[common])
    q.add_argument("module", nargs="?")
    q.add_argument("--fixture", choices=("torus",))
    q.add_argument("--d", type=int, default=2)
    q = hsub.add_parser("etau", parents=[common])
    q.add_argument("--tau", default="1+1i")
    q.add_argument("--step", type=float, default=1e-4)
    q.add_argument("--fixture", choices=("etau",))
    p.set_defaults(func=cmd_hodge)

    p = sub.add_parser("multiplier", help="multipliers and theta characteristics")
    msub = p.add_subparsers(dest="mult_cmd", required=True)
    q = msub.add_parser("enum", parents=[common])
    q.add_argument("--g", type=int, default=1)
    q = msub.add_parser("char", parents=[common])
    q.add_argument("--eps", required=True, help="basis signs, e.g. -,-")
    q = msub.add_parser("check", parents=[common])
    q.add_argument("--eps", required=True)
    q.add_argument("--samples", type=int, default=500)
    p.set_defaults(func=cmd_multiplier)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.tol is None:
            args.tol = _default_tol()
        if not TOL_RANGE[0] <= args.tol <= TOL_RANGE[1]:
            raise ValidationError(f"tolerance {args.tol} outside [{TOL_RANGE[0]}, {TOL_RANGE[1]}]")
        if args.command == "multiplier" and getattr(args, "g", 1) < 1:
            raise ValidationError("g must be at least 1")
        payload, text = args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    if args.format == "json":
        print(io.dumps(payload))
    else:
        print("\n".join(text))
    return 0


if __name__ == "__main__":
    sys.exit(main())
