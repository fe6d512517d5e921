"""stagemark command line.

Exit codes: 0 success, 1 domain or I/O error, 2 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import attacks, chaos, imageio, metrics, staging, wavelet
from .errors import StagemarkError

SEED_ENV = "STAGEMARK_SEED"


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _seed(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def load_watermark(path, threshold: int = 128) -> imageio.BinaryImage:
    return imageio.to_binary(imageio.to_gray(imageio.load(path)), threshold)


def cmd_genkey(args) -> int:
    key = chaos.generate_key(_seed(args), args.wm_size, args.wm_height)
    chaos.save_key(args.output, key)
    print(f"wrote key for {key.wm_width}x{key.wm_height} watermark to {args.output}")
    return 0


def cmd_embed(args) -> int:
    key = chaos.load_key(args.key)
    host = imageio.load(args.host)
    wm = load_watermark(args.watermark, args.threshold)
    marked = staging.embed(host, wm, key).image
    imageio.save(args.output, marked)
    print(f"embedded {staging.TOTAL_COPIES} copies; PSNR {metrics.psnr(host, marked):.2f} dB")
    return 0


def cmd_extract(args) -> int:
    key = chaos.load_key(args.key)
    wm = staging.extract(imageio.load(args.image), key)
    imageio.save(args.output, imageio.from_binary(wm))
    return 0


def cmd_detect(args) -> int:
    key = chaos.load_key(args.key)
    wm = load_watermark(args.watermark, args.threshold)
    present, confidence = staging.detect(imageio.load(args.image), wm, key, args.tau)
    print(f"present={'true' if present else 'false'} confidence={confidence:.6f}")
    return 0


def cmd_attack(args) -> int:
    spec = attacks.parse_attack(args.spec, default_seed=_seed(args))
    out = attacks.apply_attack(imageio.load(args.image), spec)
    imageio.save(args.output, out)
    return 0


def _safe_name(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in label)


def evaluate(host, wm, key, specs, tau=0.75):
    """Embed once, then attack/extract/score per spec.

    Returns (marked, [(report, attacked, extracted), ...]).
    """
    marked = staging.embed(host, wm, key).image
    base_psnr = metrics.psnr(host, marked)
    results = []
    for spec in specs:
        attacked = attacks.apply_attack(marked, spec)
        extracted = staging.extract(attacked, key)
        score = metrics.nc(wm, extracted)
        rep = metrics.EvaluationReport(
            attack=spec.label(),
            psnr_host_vs_marked=base_psnr,
            psnr_marked_vs_attacked=metrics.psnr(marked, attacked),
            ber=metrics.ber(wm, extracted),
            nc=score,
            present=score >= tau,
            tau=tau,
        )
        results.append((rep, attacked, extracted))
    return marked, results


def cmd_evaluate(args) -> int:
    labels = attacks.split_attack_list(args.attacks)
    if not labels:
        raise UsageError("empty attack list")
    seed = _seed(args)
    specs = [attacks.parse_attack(s, default_seed=seed) for s in labels]
    key = chaos.load_key(args.key)
    host = imageio.load(args.host)
    wm = load_watermark(args.watermark, args.threshold)
    marked, results = evaluate(host, wm, key, specs, args.tau)

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    imageio.save(out / "watermarked.pnm", marked)
    for i, (rep, attacked, extracted) in enumerate(results):
        stem = f"{i:02d}_{_safe_name(rep.attack)}"
        imageio.save(out / f"{stem}_attacked.pnm", attacked)
        imageio.save(out / f"{stem}_watermark.pgm", imageio.from_binary(extracted))
    rows = [r for r, _, _ in results]
    tsv = metrics.reports_to_tsv(rows)
    (out / "report.tsv").write_text(tsv)
    (out / "report.json").write_text(
        metrics.reports_to_json(rows, host=str(args.host), watermark=str(args.watermark))
    )
    if not args.no_figure:
        from .plotting import evaluation_figure

        evaluation_figure(out / "evaluation.png", host, marked, wm, results)
    sys.stdout.write(tsv)
    return 0


def cmd_selfmark(args) -> int:
    wm = wavelet.self_watermark(imageio.load(args.host), args.levels)
    imageio.save(args.output, imageio.from_binary(wm))
    print(f"wrote {wm.width}x{wm.height} self-derived watermark to {args.output}")
    return 0


def cmd_analyze_period(args) -> int:
    if args.modulus < 2:
        raise UsageError("N must be >= 2")
    key = chaos.load_key(args.key)
    rep = chaos.analyze_periods(key.cat.with_modulus(args.modulus))
    print(f"modulus={rep.modulus} n_iter={rep.n_iter}")
    print(f"min_period={rep.min_period} max_period={rep.max_period} "
          f"global_period={rep.global_period}")
    print("period\tpoints")
    for period, count in rep.histogram.items():
        print(f"{period}\t{count}")
    if rep.hazard:
        print(
            f"warning: n_iter={rep.n_iter} is a multiple of the period of "
            f"{rep.hazard_fraction:.1%} of grid points; those points are not moved",
            file=sys.stderr,
        )
    if args.plot:
        from .plotting import period_histogram

        period_histogram(args.plot, rep)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stagemark", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("genkey", help="write a seeded random secret key")
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--seed", type=int, help=f"default: ${SEED_ENV} or 0")
    g.add_argument("--wm-size", type=int, default=32, help="watermark side in pixels")
    g.add_argument("--wm-height", type=int, help=argparse.SUPPRESS)
    g.set_defaults(func=cmd_genkey)

    def key_arg(sp):
        sp.add_argument("-k", "--key", required=True, help="secret key file")

    def threshold_arg(sp):
        sp.add_argument("--threshold", type=int, default=128,
                        help="binarisation threshold for the watermark image")

    e = sub.add_parser("embed", help="embed a watermark into a host image")
    e.add_argument("host")
    e.add_argument("watermark")
    e.add_argument("-o", "--output", required=True)
    key_arg(e)
    threshold_arg(e)
    e.set_defaults(func=cmd_embed)

    x = sub.add_parser("extract", help="extract the watermark (majority vote)")
    x.add_argument("image")
    x.add_argument("-o", "--output", required=True)
    key_arg(x)
    x.set_defaults(func=cmd_extract)

    d = sub.add_parser("detect", help="blind detection with an NC threshold")
    d.add_argument("image")
    d.add_argument("watermark")
    d.add_argument("--tau", type=float, default=0.75)
    key_arg(d)
    threshold_arg(d)
    d.set_defaults(func=cmd_detect)

    a = sub.add_parser("attack", help="apply one attack, e.g. mean:3 or crop:0,0,64,64")
    a.add_argument("image")
    a.add_argument("spec")
    a.add_argument("-o", "--output", required=True)
    a.add_argument("--seed", type=int, help="default seed for stochastic attacks")
    a.set_defaults(func=cmd_attack)

    v = sub.add_parser("evaluate", help="embed, attack, extract and report")
    v.add_argument("host")
    v.add_argument("watermark")
    v.add_argument("--attacks", required=True, help='comma list, e.g. "none,mean:3,median:3"')
    v.add_argument("-o", "--output-dir", required=True)
    v.add_argument("--tau", type=float, default=0.75)
    v.add_argument("--seed", type=int, help="default seed for stochastic attacks")
    v.add_argument("--no-figure", action="store_true", help="skip the PNG panel figure")
    key_arg(v)
    threshold_arg(v)
    v.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("selfmark", help="derive a watermark from the host's wavelet approximation")
    s.add_argument("host")
    s.add_argument("--levels", type=int, default=4)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_selfmark)

    r = sub.add_parser("analyze-period", help="cat-map orbit periods over an N x N grid")
    key_arg(r)
    r.add_argument("-N", "--modulus", type=int, required=True)
    r.add_argument("--plot", help="also write a period histogram PNG")
    r.set_defaults(func=cmd_analyze_period)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"stagemark: error: {exc}", file=sys.stderr)
        return 2
    except (StagemarkError, OSError) as exc:
        print(f"stagemark: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
