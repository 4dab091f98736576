"""Command-line front end; the only module that touches the filesystem.

Commands compute everything in memory first and write declared output
paths only on success, so a failing run leaves no partial artifacts.
Exit codes: 0 success, 1 domain error (singular offset, unrealizable
patch, ...), 2 configuration error, 3 internal assertion failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .acceptance import acceptance_domain, extract_patch, localizing_patch, verify_acceptance
from .deform import (
    LinearInternal,
    LocalRule,
    SumGenerator,
    apply_generator,
    decompose_generator,
    meyer_report,
    nonslip_probe,
    rank_fraction_table,
)
from .errors import ConfigError, DomainError, InternalCheckError, ModelSetError
from .intervals import Cell, IntervalSet
from .quadfield import QuadReal, parse_quadreal
from .scheme import (
    enumerate_model_set,
    is_nonsingular,
    min_candidate_spacing,
    reproject,
    sample_to_text,
    scheme_from_config,
    validate_scheme,
)
from .substitution import (
    SubstitutionSystem,
    abelianization_matrix,
    char_poly,
    deformed_lengths,
    doubled_fibonacci,
    eigen_system,
    expand,
    natural_lengths,
    realize,
    section7_experiment,
)
from . import svg as svgmod

__all__ = ["main"]


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None


def _scheme_triple(args):
    cfg = _load_config(args.config)
    return scheme_from_config(cfg)


def _subst_system(args) -> SubstitutionSystem:
    cfg = _load_config(args.config) if args.config else {}
    block = cfg.get("substitution")
    if block is None:
        return doubled_fibonacci()
    if "field_D" not in block and "field_D" in cfg:
        block = dict(block, field_D=cfg["field_D"])
    return SubstitutionSystem.from_config(block)


def _parse_box(text: str, D: int):
    try:
        lo_s, hi_s = text.split(":")
    except ValueError:
        raise ConfigError(f"box must be lo:hi, got {text!r}") from None
    return parse_quadreal(lo_s, D), parse_quadreal(hi_s, D)


def _parse_radii(text: str, D: int):
    out = [parse_quadreal(tok, D) for tok in text.split(",") if tok.strip()]
    if not out:
        raise ConfigError("empty radius list")
    return out


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _qr_json(v: QuadReal) -> dict:
    return {"exact": v.serialize(), "float": v.to_float()}


def _gap_rule(sample, text: str):
    """LocalRule from "radius,eps": add eps where the right gap is 1."""
    D = sample.scheme.field_D
    try:
        r_s, e_s = text.split(",")
    except ValueError:
        raise ConfigError(f"rule must be radius,eps, got {text!r}") from None
    radius = parse_quadreal(r_s, D)
    eps = parse_quadreal(e_s, D)
    one = QuadReal(1, 0, D)
    zero = QuadReal(0, 0, D)

    def fn(disp):
        right = None
        for d in disp:
            if d.sign() > 0 and (right is None or (d - right).sign() < 0):
                right = d
        return eps if right is not None and (right - one).sign() == 0 else zero

    return LocalRule.from_function(sample, radius, fn)


def _build_generator(args, sample):
    parts = []
    if getattr(args, "linear", None):
        parts.append(LinearInternal(parse_quadreal(args.linear, sample.scheme.field_D)))
    if getattr(args, "gap_rule", None):
        parts.append(_gap_rule(sample, args.gap_rule))
    if getattr(args, "rank_table", False):
        return rank_fraction_table()
    if not parts:
        raise ConfigError("no generator selected (use --linear / --gap-rule / --rank-table)")
    return parts[0] if len(parts) == 1 else SumGenerator(tuple(parts))


# ---------------------------------------------------------------------------
# command bodies: each returns [(path, text), ...]


def cmd_scheme_validate(args):
    scheme, window, xi = _scheme_triple(args)
    diag = validate_scheme(scheme, bound=args.bound)
    verdict = is_nonsingular(scheme, window, xi)
    report = {
        "determinant": _qr_json(diag["determinant"]),
        "injectivity": diag["injectivity"],
        "zero_physical_witness": diag["zero_physical_witness"],
        "min_internal_abs": _qr_json(diag["min_internal_abs"]),
        "min_internal_witness": list(diag["min_internal_witness"]),
        "density_ok": diag["density_ok"],
        "search_bound": diag["bound"],
        "offset": {
            "verdict": verdict[0],
            "detail": (list(verdict[1]) if verdict[0] == "singular"
                       else verdict[1]),
        },
    }
    return [(args.out, _dump_json(report))]


def cmd_generate(args):
    scheme, window, xi = _scheme_triple(args)
    box = _parse_box(args.box, scheme.field_D)
    sample = enumerate_model_set(scheme, window, xi, box)
    outputs = [(args.out, sample_to_text(sample))]
    if args.report:
        rep = {
            "count": len(sample),
            "box": [_qr_json(box[0]), _qr_json(box[1])],
            "min_gap": None if sample.min_gap is None else _qr_json(sample.min_gap),
        }
        outputs.append((args.report, _dump_json(rep)))
    return outputs


def _domain_report(scheme, window, sample, patch, dom):
    return {
        "patch": {
            "points": [_qr_json(p) for p in patch.points],
            "radius": _qr_json(patch.radius),
            "anchor_index": patch.anchor_index,
        },
        "domain": dom.to_jsonable(),
        "window": [
            [c.lo.serialize(), c.hi.serialize()]
            for c in window.component(()).cells
        ],
    }


def _domain_svg(window, dom, sample):
    W = window.component(())
    bars = [
        ("window", [(c.lo.to_float(), c.hi.to_float()) for c in W.cells]),
        ("domain", [(c.lo.to_float(), c.hi.to_float()) for c in dom.cells.cells]),
    ]
    stars = [sample.star(p).to_float() for p in sample.points[:400]]
    return svgmod.interval_bars_svg(
        bars, ticks=[("stars", stars)], title="acceptance domain"
    )


def cmd_acceptance(args):
    scheme, window, xi = _scheme_triple(args)
    box = _parse_box(args.box, scheme.field_D)
    sample = enumerate_model_set(scheme, window, xi, box)
    anchor = args.anchor_index if args.anchor_index is not None else len(sample) // 2
    patch = extract_patch(sample, anchor, parse_quadreal(args.radius, scheme.field_D))
    dom = acceptance_domain(scheme, window, patch)
    outputs = [(args.out, _dump_json(_domain_report(scheme, window, sample, patch, dom)))]
    if args.svg:
        outputs.append((args.svg, _domain_svg(window, dom, sample)))
    return outputs


def cmd_verify_acceptance(args):
    scheme, window, xi = _scheme_triple(args)
    box = _parse_box(args.box, scheme.field_D)
    sample = enumerate_model_set(scheme, window, xi, box)
    anchor = args.anchor_index if args.anchor_index is not None else len(sample) // 2
    patch = extract_patch(sample, anchor, parse_quadreal(args.radius, scheme.field_D))
    dom = acceptance_domain(scheme, window, patch)
    ver = verify_acceptance(sample, patch, dom)
    report = _domain_report(scheme, window, sample, patch, dom)
    report["verification"] = ver
    return [(args.out, _dump_json(report))]


def cmd_localize(args):
    scheme, window, xi = _scheme_triple(args)
    box = _parse_box(args.box, scheme.field_D)
    lo, hi = _parse_box(args.target, scheme.field_D)
    target = IntervalSet([Cell(lo, hi, lo_open=True, hi_open=True)])
    sample = enumerate_model_set(scheme, window, xi, box)
    patch = localizing_patch(scheme, window, sample, target)
    dom = acceptance_domain(scheme, window, patch)
    report = _domain_report(scheme, window, sample, patch, dom)
    report["target"] = [lo.serialize(), hi.serialize()]
    report["contained"] = dom.cells.is_subset_of(target)
    return [(args.out, _dump_json(report))]


def cmd_reproject(args):
    scheme, window, xi = _scheme_triple(args)
    box = _parse_box(args.box, scheme.field_D)
    sample = enumerate_model_set(scheme, window, xi, box)
    deformed = reproject(sample, parse_quadreal(args.L, scheme.field_D))
    return [(args.out, sample_to_text(deformed))]


def cmd_deform(args):
    scheme, window, xi = _scheme_triple(args)
    box = _parse_box(args.box, scheme.field_D)
    sample = enumerate_model_set(scheme, window, xi, box)
    F = _build_generator(args, sample)
    if callable(F) and not hasattr(F, "value_at"):
        F = F(sample)
    deformed = apply_generator(sample, F)
    return [(args.out, sample_to_text(deformed))]


def cmd_meyer(args):
    scheme, window, xi = _scheme_triple(args)
    box = _parse_box(args.box, scheme.field_D)
    sample = enumerate_model_set(scheme, window, xi, box)
    radii = _parse_radii(args.radii, scheme.field_D)
    labels = None
    if args.labels:
        labels = [float(t) for t in args.labels.split(",") if t.strip()]
    points = sample
    if args.linear:
        points = reproject(sample, parse_quadreal(args.linear, scheme.field_D))
    rep = meyer_report(points, radii, gen_labels=labels)
    rep_json = rep.to_jsonable()
    rep_json["certified_floor"] = _qr_json(
        min_candidate_spacing(scheme, window, radii[-1])
    ) if args.linear is None else None
    outputs = [(args.out, _dump_json(rep_json))]
    if args.svg:
        xs = rep_json["gen_labels"] or rep_json["radii"]
        outputs.append(
            (args.svg, svgmod.decay_plot_svg(
                xs, rep_json["min_gap_float"], title="minimum difference gap",
                x_label="generation" if rep_json["gen_labels"] else "radius",
            ))
        )
    return outputs


def cmd_nonslip_probe(args):
    scheme, window, xi = _scheme_triple(args)
    box = _parse_box(args.box, scheme.field_D)
    radii = [int(t) for t in args.radii.split(",") if t.strip()]
    if args.rank_table:
        F = rank_fraction_table()
    else:
        # linear / local-rule generators need a sample to tabulate on;
        # build the rule against the plus-convention set inside the probe
        def F(sample):
            return _build_generator(args, sample)

        if args.linear and not args.gap_rule:
            F = LinearInternal(parse_quadreal(args.linear, scheme.field_D))
    rep = nonslip_probe(scheme, window, xi, F, radii, box)
    return [(args.out, _dump_json(rep.to_jsonable()))]


def cmd_decompose(args):
    scheme, window, xi = _scheme_triple(args)
    box = _parse_box(args.box, scheme.field_D)
    sample = enumerate_model_set(scheme, window, xi, box)
    F = _build_generator(args, sample)
    result = decompose_generator(sample, F, args.r_max)
    return [(args.out, _dump_json(result.to_jsonable()))]


def cmd_subst_expand(args):
    system = _subst_system(args)
    word = expand(system, args.letter, args.n)
    return [(args.out, " ".join(word) + "\n")]


def cmd_subst_matrix(args):
    system = _subst_system(args)
    report = {
        "alphabet": list(system.alphabet),
        "matrix": abelianization_matrix(system),
        "char_poly": [str(c) for c in char_poly(system)],
    }
    return [(args.out, _dump_json(report))]


def cmd_subst_eigen(args):
    system = _subst_system(args)
    return [(args.out, _dump_json(eigen_system(system).to_jsonable()))]


def _select_lengths(system, text: str):
    base = natural_lengths(system)
    if text == "natural":
        return base
    try:
        kind, eps_s = text.split(":")
    except ValueError:
        raise ConfigError(f"lengths must be natural|repr:eps|slip:eps, got {text!r}") from None
    eps = parse_quadreal(eps_s, system.field_D)
    eig = eigen_system(system)
    key = {"repr": "PF-conjugate", "slip": "contracting-non-conjugate"}.get(kind)
    if key is None:
        raise ConfigError(f"unknown length family {kind!r}")
    return deformed_lengths(base, eig.by_classification(key).left_vector, eps)


def cmd_subst_realize(args):
    system = _subst_system(args)
    lengths = _select_lengths(system, args.lengths)
    marker = args.marker.split(",") if "," in args.marker else args.marker
    pts = realize(system, lengths, args.n, args.seed, marker)
    lines = [f"{p.serialize()}\t{p.to_float():.12f}" for p in pts]
    return [(args.out, "\n".join(lines) + ("\n" if lines else ""))]


def cmd_experiment_section7(args):
    eps = parse_quadreal(args.eps, 5)
    report = section7_experiment(n_max=args.n_max, eps=eps)
    outputs = [(args.out, _dump_json(report))]
    if args.svg_prefix:
        for key, tag in (("slipping", "slip"), ("reprojection", "repr")):
            rep = report["branches"][key]["report"]
            outputs.append(
                (f"{args.svg_prefix}.{tag}.svg", svgmod.decay_plot_svg(
                    rep["gen_labels"], rep["min_gap_float"],
                    title=f"{key} branch gap decay", x_label="generation",
                ))
            )
    return outputs


def cmd_plot(args):
    if args.kind == "decay":
        with open(args.input) as fh:
            data = json.load(fh)
        if "branches" in data:
            if not args.branch:
                raise ConfigError("section7 reports need --branch slipping|reprojection")
            data = data["branches"][args.branch]["report"]
        xs = data.get("gen_labels") or data["radii"]
        return [(args.out, svgmod.decay_plot_svg(
            xs, data["min_gap_float"], title="minimum difference gap",
            x_label="generation" if data.get("gen_labels") else "radius",
        ))]
    if args.kind == "points":
        try:
            with open(args.input) as fh:
                xs = [float(line.split("\t")[1]) for line in fh if line.strip()]
        except (OSError, IndexError, ValueError) as e:
            raise ConfigError(f"cannot read points file: {e}") from None
        return [(args.out, svgmod.tick_rows_svg([("points", xs)], title="point set"))]
    raise ConfigError(f"unknown plot kind {args.kind!r}")


# ---------------------------------------------------------------------------
# wiring


def _add_scheme_io(p, box=True):
    p.add_argument("--config", required=True, help="JSON config path")
    if box:
        p.add_argument("--box", required=True, help="physical box lo:hi")
    p.add_argument("--out", required=True, help="output path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="modelset",
        description="cut-and-project sets, deformations, and substitution experiments",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_scheme = sub.add_parser("scheme", help="scheme-level checks")
    scheme_sub = p_scheme.add_subparsers(dest="subcommand", required=True)
    p = scheme_sub.add_parser("validate", help="diagnostics and offset check")
    _add_scheme_io(p, box=False)
    p.add_argument("--bound", type=int, default=10**4)
    p.set_defaults(fn=cmd_scheme_validate)

    p = sub.add_parser("generate", help="enumerate a projection set")
    _add_scheme_io(p)
    p.add_argument("--report", help="optional JSON summary path")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("acceptance", help="acceptance domain of a patch")
    _add_scheme_io(p)
    p.add_argument("--radius", required=True)
    p.add_argument("--anchor-index", type=int)
    p.add_argument("--svg", help="optional SVG path")
    p.set_defaults(fn=cmd_acceptance)

    p = sub.add_parser("verify-acceptance", help="two-way patch/domain check")
    _add_scheme_io(p)
    p.add_argument("--radius", required=True)
    p.add_argument("--anchor-index", type=int)
    p.set_defaults(fn=cmd_verify_acceptance)

    p = sub.add_parser("localize", help="patch whose domain fits a target")
    _add_scheme_io(p)
    p.add_argument("--target", required=True, help="open target cell lo:hi")
    p.set_defaults(fn=cmd_localize)

    p = sub.add_parser("reproject", help="shear the projection direction")
    _add_scheme_io(p)
    p.add_argument("--L", required=True, help="internal-to-physical coefficient")
    p.set_defaults(fn=cmd_reproject)

    p = sub.add_parser("deform", help="apply a generator to a sample")
    _add_scheme_io(p)
    p.add_argument("--linear", help="linear star coefficient")
    p.add_argument("--gap-rule", help="radius,eps local rule on right gap 1")
    p.set_defaults(fn=cmd_deform, rank_table=False)

    p = sub.add_parser("meyer", help="difference-set gap report")
    _add_scheme_io(p)
    p.add_argument("--radii", required=True, help="comma-separated radii")
    p.add_argument("--labels", help="comma-separated fit labels")
    p.add_argument("--linear", help="deform first with this coefficient")
    p.add_argument("--svg", help="optional decay plot path")
    p.set_defaults(fn=cmd_meyer)

    p = sub.add_parser("nonslip-probe", help="generator vs singular pair")
    _add_scheme_io(p)
    p.add_argument("--radii", required=True, help="comma-separated integer radii")
    p.add_argument("--linear")
    p.add_argument("--gap-rule")
    p.add_argument("--rank-table", action="store_true")
    p.set_defaults(fn=cmd_nonslip_probe)

    p = sub.add_parser("decompose", help="split generator into linear + local")
    _add_scheme_io(p)
    p.add_argument("--linear")
    p.add_argument("--gap-rule")
    p.add_argument("--r-max", type=int, default=8)
    p.set_defaults(fn=cmd_decompose, rank_table=False)

    p_subst = sub.add_parser("subst", help="substitution engine")
    subst_sub = p_subst.add_subparsers(dest="subcommand", required=True)

    p = subst_sub.add_parser("expand", help="expand a letter")
    p.add_argument("--config", help="config with a substitution block")
    p.add_argument("--letter", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_subst_expand)

    p = subst_sub.add_parser("matrix", help="letter-count matrix")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_subst_matrix)

    p = subst_sub.add_parser("eigen", help="eigenvalues and eigenvectors")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_subst_eigen)

    p = subst_sub.add_parser("realize", help="lay out a supertile")
    p.add_argument("--config")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", default="a1")
    p.add_argument("--marker", default="a1", help="letter or comma list")
    p.add_argument("--lengths", default="natural",
                   help="natural | repr:eps | slip:eps")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_subst_realize)

    p_exp = sub.add_parser("experiment", help="packaged experiments")
    exp_sub = p_exp.add_subparsers(dest="subcommand", required=True)
    p = exp_sub.add_parser("section7", help="two-branch deformation study")
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--eps", default="1/8")
    p.add_argument("--out", required=True)
    p.add_argument("--svg-prefix", help="write decay plots with this prefix")
    p.set_defaults(fn=cmd_experiment_section7)

    p = sub.add_parser("plot", help="figures from existing outputs")
    p.add_argument("--kind", required=True, choices=["decay", "points"])
    p.add_argument("--input", required=True)
    p.add_argument("--branch", help="branch key for section7 reports")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_plot)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        outputs = args.fn(args)
        for path, text in outputs:
            with open(path, "w") as fh:
                fh.write(text)
        for path, _ in outputs:
            print(f"wrote {path}")
        return 0
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 1
    except InternalCheckError as e:
        print(f"internal check failed: {e}", file=sys.stderr)
        return 3
    except ModelSetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
