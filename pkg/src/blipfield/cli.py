"""Command-line front end.

Every subcommand writes one CSV or JSON file whose header embeds the
fully resolved configuration.  Floats are written with 17 significant
digits so that identical flags give byte-identical files.

Exit codes: 0 ok, 2 invalid input, 3 I/O failure, 4 non-finite result.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import casimir as cas
from .core import BlipFieldError, SpatialGrid, Units, gaussian_packet
from .dynamics import PROPAGATORS, evolve, light_cone_leakage
from .fermi import ExperimentGeometry, causality_report

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_NONFINITE = 0, 2, 3, 4


class NonFiniteError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise BlipFieldError(message)


# --- flag parsing ---------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return vals


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _grid(text: str) -> tuple[float, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("grid must be L,N")
    try:
        return float(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")


def _packet(text: str) -> dict:
    kind, _, rest = text.partition(":")
    if kind != "gaussian":
        raise argparse.ArgumentTypeError(f"unknown packet kind {kind!r}")
    vals = _floats(rest)
    if len(vals) not in (2, 3, 4):
        raise argparse.ArgumentTypeError("packet must be gaussian:x0,sigma[,k0[,s]]")
    x0, sigma = vals[0], vals[1]
    k0 = vals[2] if len(vals) > 2 else 0.0
    s = vals[3] if len(vals) > 3 else 1.0
    if s not in (1.0, -1.0):
        raise argparse.ArgumentTypeError("propagation sign must be 1 or -1")
    return {"kind": "gaussian", "x0": x0, "sigma": sigma, "k0": k0, "s": int(s)}


def _complex(text: str) -> complex:
    try:
        z = complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex number {text!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise argparse.ArgumentTypeError("alpha must be finite")
    return z


def _add_common(p):
    p.add_argument("--out", required=True, help="output file, or - for stdout")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="default: from the --out extension, else csv")
    for name in ("hbar", "c", "eps0", "area"):
        p.add_argument(f"--{name}", type=float, default=1.0)


def _add_packet(p, packet="gaussian:0,1,0", grid="200,4096"):
    p.add_argument("--packet", type=_packet, default=_packet(packet), help="gaussian:x0,sigma[,k0[,s]]")
    p.add_argument("--grid", type=_grid, default=_grid(grid), help="L,N with N a power of two")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blipfield", description="Localized-photon field experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("propagate", help="evolve a packet and dump |psi|^2")
    _add_packet(p)
    p.add_argument("--model", choices=PROPAGATORS, default="blip")
    p.add_argument("--times", type=_floats, default=[0.0])
    _add_common(p)

    p = sub.add_parser("fermi", help="two-detector signalling experiment")
    _add_packet(p, packet="gaussian:-10,1,0", grid="512,4096")
    p.add_argument("--model", choices=PROPAGATORS, default="blip")
    p.add_argument("--alpha", type=_complex, default=1.0)
    p.add_argument("--L1", type=float, default=20.0)
    p.add_argument("--L2", type=float, default=60.0)
    p.add_argument("--width", type=float, default=12.0)
    p.add_argument("--t1", type=_floats, default=[27.0, 31.0, 35.0, 39.0, 43.0])
    p.add_argument("--n-early", type=int, default=16)
    _add_common(p)

    p = sub.add_parser("casimir", help="cavity zero-point energy and force")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--D", type=float, default=1.0)
    p.add_argument("--mmax", type=int, default=None, help="default 1e6 in 1D, 1e4 in 3D")
    p.add_argument("--eps-ladder", type=_floats, default=None,
                   help="also extrapolate the regulated image-kernel energy along these eps")
    p.add_argument("--oracle", action="store_true", help="also report the image-reduction oracle")
    _add_common(p)

    p = sub.add_parser("kernel", help="tabulate regulated kernels")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--delta", type=_floats, default=[1.0])
    p.add_argument("--eps", type=_floats, default=[1e-2, 1e-3, 1e-4])
    _add_common(p)

    p = sub.add_parser("cavity-field", help="folded E or B profile inside a cavity")
    _add_packet(p, packet="gaussian:0,0.05,0", grid="4,1024")
    p.add_argument("--D", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--nimg", type=int, default=8)
    p.add_argument("--alpha", type=_complex, default=1.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--observable", choices=("E", "B"), default="E")
    p.add_argument("--method", choices=("images", "periodic"), default="images")
    p.add_argument("--points", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("images-oracle", help="image double-sum reduction check")
    p.add_argument("--D", type=float, default=1.0)
    p.add_argument("--ntrunc", type=_ints, default=[2, 4, 6])
    p.add_argument("--quad", type=int, default=40)
    _add_common(p)
    return parser


# --- output -------------------------------------------------------------

def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not math.isfinite(v):
        raise NonFiniteError(f"non-finite value {v!r} in output")
    return "%.17g" % v


def _json(obj, indent=0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_json(v) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + _json(v, indent + 1) for v in seq) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return _json({"re": obj.real, "im": obj.imag}, indent)
    return _num(obj)


def _render(fmt: str, config: dict, columns: list[str], rows, extra: dict) -> str:
    if fmt == "json":
        data = {name: [r[i] for r in rows] for i, name in enumerate(columns)}
        return _json({"config": config, **extra, "data": data}) + "\n"
    lines = ["# config " + _json(config).replace("\n", "").replace("  ", "")]
    for k, v in extra.items():
        lines.append(f"# {k} " + _json(v).replace("\n", "").replace("  ", ""))
    lines.append(",".join(columns))
    lines.extend(",".join(_num(v) for v in r) for r in rows)
    return "\n".join(lines) + "\n"


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --- commands -------------------------------------------------------------

def _units(a) -> Units:
    return Units(hbar=a.hbar, c=a.c, eps0=a.eps0, area=a.area)


def _make_packet(a):
    L, n = a.grid
    grid = SpatialGrid(L, n)
    pk = a.packet
    return gaussian_packet(grid, pk["x0"], pk["sigma"], pk["k0"], s=pk["s"])


def cmd_propagate(a, units):
    if any(t < 0 for t in a.times):
        raise BlipFieldError("times must be >= 0")
    psi = _make_packet(a)
    rows, leak = [], []
    for t in a.times:
        out = evolve(psi, t, a.model, units)
        leak.append(light_cone_leakage(psi, t, a.model, units))
        rows.extend((t, x, d, z.real, z.imag) for x, d, z in zip(psi.grid.x, out.density, out.amp))
    return ["t", "x", "abs_psi_sq", "re_psi", "im_psi"], rows, {"light_cone_leakage": leak}


def cmd_fermi(a, units):
    psi = _make_packet(a)
    geo = ExperimentGeometry(a.L1, a.L2, a.width)
    rep = causality_report(a.model, psi, geo, a.alpha, a.t1, units, n_early=a.n_early)
    rows = list(zip(rep.t1, rep.p1, rep.t2, rep.p2, rep.ratio))
    extra = {
        "ratio_spread": rep.ratio_spread,
        "early_click_mass": rep.early_click_mass,
        "causal_arrival": rep.causal_arrival,
        "formula_faithful_only": rep.formula_faithful_only,
    }
    return ["t1", "P1", "t2", "P2", "ratio"], rows, extra


def cmd_casimir(a, units):
    if a.dim not in (1, 3):
        raise BlipFieldError(f"--dim must be 1 or 3, got {a.dim}")
    mmax = a.mmax if a.mmax is not None else (10**6 if a.dim == 1 else 10**4)
    a.mmax = mmax
    spec = cas.CavitySpec(a.D, m_max=mmax, units=units)
    res = cas.casimir_1d(spec) if a.dim == 1 else cas.casimir_3d(spec)
    extra = res.as_dict()
    if a.eps_ladder:
        if any(e <= 0 or e >= a.D / 10 for e in a.eps_ladder):
            raise BlipFieldError("eps ladder values must lie in (0, D/10)")
        vals = [cas.regulated_casimir_energy(a.dim, a.D, e, units=units) for e in a.eps_ladder]
        extra["regulated_energy"] = vals
        extra["regulated_energy_limit"] = cas.richardson_limit(a.eps_ladder, vals, 2.0)
    if a.oracle:
        extra["images_oracle_discrepancy"] = cas.appendix_c_oracle(a.D, 6)
    row = (res.dim, res.D, res.m_max, res.energy_correction, res.force, res.truncation_error_estimate)
    return ["dim", "D", "m_max", "energy_correction", "force", "truncation_error_estimate"], [row], extra


def cmd_kernel(a, units):
    if a.dim not in (1, 3):
        raise BlipFieldError(f"--dim must be 1 or 3, got {a.dim}")
    if any(e <= 0 for e in a.eps):
        raise BlipFieldError("eps values must be > 0")
    kern = cas.kernel1d if a.dim == 1 else cas.kernel3d
    rows = [(d, e, kern(d, e)) for d in a.delta for e in a.eps]
    limits = {"delta": a.delta, "limit": [cas.kernel_limit(kern, d, a.eps) for d in a.delta]}
    return ["delta", "eps", "value"], rows, {"eps_limit": limits}


def cmd_cavity_field(a, units):
    psi = _make_packet(a)
    spec = cas.CavitySpec(a.D, n_img=a.nimg, eps=a.eps, units=units)
    x, vals = cas.folded_field_profile(psi, a.alpha, spec, a.t, a.observable, a.points, a.method)
    extra = {"image_tail_bound": cas.image_tail_bound(psi, a.alpha, spec, a.nimg, a.observable, a.points, a.t)}
    return ["x", a.observable], list(zip(x, vals)), extra


def cmd_images_oracle(a, units):
    if not a.D > 0:
        raise BlipFieldError("D must be > 0")
    if a.quad < 2:
        raise BlipFieldError("--quad must be >= 2")
    rows = [(n, cas.appendix_c_oracle(a.D, n, a.quad)) for n in a.ntrunc]
    return ["n_trunc", "discrepancy"], rows, {}


COMMANDS = {
    "propagate": cmd_propagate,
    "fermi": cmd_fermi,
    "casimir": cmd_casimir,
    "kernel": cmd_kernel,
    "cavity-field": cmd_cavity_field,
    "images-oracle": cmd_images_oracle,
}


def _resolved(a) -> dict:
    cfg = {}
    for k, v in sorted(vars(a).items()):
        if k in ("out", "format"):
            continue
        cfg[k] = list(v) if isinstance(v, tuple) else v
    return cfg


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        units = _units(a)
        fmt = a.format or ("json" if a.out.endswith(".json") else "csv")
        columns, rows, extra = COMMANDS[a.command](a, units)
        text = _render(fmt, _resolved(a), columns, rows, extra)
    except BlipFieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    try:
        _write(a.out, text)
    except OSError as exc:
        print(f"error: cannot write {a.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
