"""Command line interface.

Subcommands mirror the library layers: ``matrix`` and ``forward`` expose
the detector model, ``witness`` and ``invert`` the analysis side,
``sample`` draws noisy count records, and ``catalysis`` / ``tmsv`` run the
full simulated experiments.  All randomness flows from ``--seed``; rerunning
any command with the same arguments writes byte-identical output.

Domain errors exit with status 1 and a single ``error: <code>: <message>``
line on stderr; argparse usage errors keep their usual status 2.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import io as cio
from .detector import (
    ClickDistribution,
    CountRecord,
    click_matrix,
    forward_clicks,
    sample_counts,
)
from .errors import ClickStatsError, InvalidArgumentError
from .experiments import run_catalysis_sweep, run_tmsv
from .inversion import (
    invert_clicks,
    mc_q_mandel_from_clicks,
    q_mandel_from_clicks,
)
from .witnesses import mc_witness, q_binomial, q_fake


def _write_output(args, text: str) -> None:
    if args.output is None or args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


def _read_input(path: str) -> str:
    return Path(path).read_text()


def _require_detector(spec: str):
    det = cio.parse_detector_spec(spec)
    if det is None:
        raise InvalidArgumentError("'pnr' is only valid as a herald; give a binned detector")
    return det


def _cmd_matrix(args) -> int:
    det = _require_detector(args.detector)
    L = click_matrix(det, args.n_max)
    if args.format == "json":
        payload = {
            "schema_version": cio.SCHEMA_VERSION,
            "kind": "click_matrix",
            "detector": cio.detector_to_dict(det),
            "n_max": args.n_max,
            "matrix": [[float(x) for x in row] for row in L],
        }
        _write_output(args, cio.to_json(payload))
    else:
        _write_output(args, cio.matrix_to_csv(L))
    return 0


def _source_distribution(args):
    if args.source is not None:
        return cio.parse_source_spec(args.source, n_max=args.n_max)
    return cio.photon_distribution_from_csv(_read_input(args.input))


def _cmd_forward(args) -> int:
    det = _require_detector(args.detector)
    p = _source_distribution(args)
    c = forward_clicks(p, det)
    _write_output(args, cio.click_distribution_to_csv(c))
    return 0


def _cmd_witness(args) -> int:
    data = cio.sniff_click_csv(_read_input(args.input))
    payload = {"schema_version": cio.SCHEMA_VERSION, "kind": "witness", "witness": args.witness}
    if args.witness == "Q_M":
        if args.detector is None:
            raise InvalidArgumentError("witness Q_M needs --detector for the inversion")
        det = _require_detector(args.detector)
        n_max = args.n_max if args.n_max is not None else det.n_bins
        if isinstance(data, CountRecord):
            est = mc_q_mandel_from_clicks(
                data, det, n_max, n_replicas=args.replicas, seed=args.seed
            )
            payload.update(cio.estimate_to_dict(est))
        else:
            payload["value"] = q_mandel_from_clicks(data, det, n_max)
    elif isinstance(data, CountRecord):
        est = mc_witness(data, args.witness, n_replicas=args.replicas, seed=args.seed)
        payload.update(cio.estimate_to_dict(est))
    else:
        payload["value"] = q_binomial(data) if args.witness == "Q_B" else q_fake(data)
    _write_output(args, cio.to_json(payload))
    return 0


def _cmd_invert(args) -> int:
    data = cio.sniff_click_csv(_read_input(args.input))
    if isinstance(data, CountRecord):
        counts = np.asarray(data.counts, dtype=float)
        if counts.sum() <= 0:
            raise InvalidArgumentError("count record is empty")
        clicks = ClickDistribution(counts / counts.sum())
    else:
        clicks = data
    det = _require_detector(args.detector)
    result = invert_clicks(clicks, det, args.n_max, method=args.method)
    if args.format == "csv":
        dist = result.distribution()
        _write_output(args, cio.photon_distribution_to_csv(dist))
        return 0
    payload = {
        "schema_version": cio.SCHEMA_VERSION,
        "kind": "inversion",
        "method": result.method,
        "probs": [float(x) for x in result.probs],
        "residual_norm": result.residual_norm,
        "condition_number": result.condition_number,
        "negative_mass": result.negative_mass,
    }
    _write_output(args, cio.to_json(payload))
    return 0


def _cmd_sample(args) -> int:
    if args.source is not None:
        if args.detector is None:
            raise InvalidArgumentError("--source needs --detector to produce clicks")
        det = _require_detector(args.detector)
        p = cio.parse_source_spec(args.source, n_max=args.n_max)
        c = forward_clicks(p, det)
    else:
        c = cio.click_distribution_from_csv(_read_input(args.input))
    record = sample_counts(c, args.events, args.seed)
    _write_output(args, cio.count_record_to_csv(record))
    return 0


def _load_config(path, from_dict, overrides):
    raw = cio.parse_config(_read_input(path)) if path is not None else {}
    config = from_dict(raw)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(config, **overrides) if overrides else config


def _cmd_catalysis(args) -> int:
    config = _load_config(
        args.config,
        cio.catalysis_config_from_dict,
        {
            "seed": args.seed,
            "n_replicas": args.replicas,
            "expected_events": args.events,
        },
    )
    result = run_catalysis_sweep(config)
    text = (
        cio.catalysis_result_to_csv(result)
        if args.format == "csv"
        else cio.to_json(cio.catalysis_result_to_dict(result))
    )
    _write_output(args, text)
    return 0


def _cmd_tmsv(args) -> int:
    config = _load_config(
        args.config,
        cio.tmsv_config_from_dict,
        {
            "seed": args.seed,
            "n_replicas": args.replicas,
            "expected_events": args.events,
        },
    )
    result = run_tmsv(config)
    text = (
        cio.tmsv_result_to_csv(result)
        if args.format == "csv"
        else cio.to_json(cio.tmsv_result_to_dict(result))
    )
    _write_output(args, text)
    return 0


def _add_output_options(sub, default_format="csv"):
    sub.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    sub.add_argument(
        "--format",
        choices=("csv", "json"),
        default=default_format,
        help=f"output format (default: {default_format})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clickstats",
        description="Click statistics of multiplexed single-photon detectors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix", help="print the conditional click law P(clicks | photons)")
    p.add_argument("--detector", required=True, help="ideal:N or uniform:N,ETA[,DARK]")
    p.add_argument("--n-max", type=int, required=True, help="largest photon number column")
    _add_output_options(p)
    p.set_defaults(func=_cmd_matrix)

    p = sub.add_parser("forward", help="map a photon distribution to click statistics")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--source", help="coherent:MU, thermal:MU or fock:N")
    group.add_argument("--input", help="photon distribution CSV (n,probability)")
    p.add_argument("--n-max", type=int, default=None, help="cutoff for --source")
    p.add_argument("--detector", required=True)
    _add_output_options(p)
    p.set_defaults(func=_cmd_forward)

    p = sub.add_parser("witness", help="score a click CSV with a witness")
    p.add_argument("--input", required=True, help="clicks CSV (probabilities or counts)")
    p.add_argument("--witness", choices=("Q_B", "Q_F", "Q_M"), default="Q_B")
    p.add_argument("--detector", default=None, help="required for Q_M (inversion)")
    p.add_argument("--n-max", type=int, default=None, help="inversion support for Q_M")
    p.add_argument("--replicas", type=int, default=10_000, help="bootstrap size for counts input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_witness, format="json")

    p = sub.add_parser("invert", help="recover photon statistics from clicks")
    p.add_argument("--input", required=True, help="clicks CSV (probabilities or counts)")
    p.add_argument("--detector", required=True)
    p.add_argument("--n-max", type=int, required=True, help="largest photon number to solve for")
    p.add_argument("--method", choices=("constrained", "pseudo_inverse"), default="constrained")
    _add_output_options(p, default_format="json")
    p.set_defaults(func=_cmd_invert)

    p = sub.add_parser("sample", help="draw a Poissonian count record")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--source", help="coherent:MU, thermal:MU or fock:N (needs --detector)")
    group.add_argument("--input", help="click distribution CSV")
    p.add_argument("--detector", default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--events", type=float, required=True, help="expected total event count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("catalysis", help="reflectivity sweep of single-photon catalysis")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--events", type=float, default=None)
    _add_output_options(p, default_format="json")
    p.set_defaults(func=_cmd_catalysis)

    p = sub.add_parser("tmsv", help="two-mode squeezed vacuum witness table")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--events", type=float, default=None)
    _add_output_options(p, default_format="json")
    p.set_defaults(func=_cmd_tmsv)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ClickStatsError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
