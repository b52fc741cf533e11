"""Command-line front end.

Subcommands: ``test`` (two CSV samples -> test result JSON), ``diagnose``
(graph condition report JSON), ``simulate`` (experiment config -> CSV +
summary JSON), ``stein`` (Stein-bound curve CSV).  Every file-producing run
writes a RunManifest next to its outputs; re-running ``simulate`` on a
manifest reproduces the outputs bit for bit at a fixed worker count.

Exit codes: 0 success, 2 usage/config error, 3 data error, 4 internal
inconsistency.
"""

from __future__ import annotations

import datetime
import functools
import importlib.resources
import json
import os
import sys

import click
import numpy as np

from . import __version__
from .construct import euclidean_distances, kmst, knng
from .errors import (
    DataError,
    InternalInconsistencyError,
    InvalidArgumentError,
)
from .experiments import run_experiment, run_stein_experiment
from .graph import condition_report
from .io import (
    read_distances,
    read_graph_text,
    read_labels_text,
    read_point_csv,
    sha256_file,
    write_json_atomic,
)
from .rng import fresh_seed
from .twosample import Labels, run_test

_EXIT_USAGE = 2
_EXIT_DATA = 3
_EXIT_INTERNAL = 4


def _manifest(subcommand: str, config: dict, base_seed: int, inputs, outputs) -> dict:
    return {
        "tool": "edgecount",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "base_seed": base_seed,
        "inputs": [{"path": str(p), "sha256": sha256_file(p)} for p in inputs],
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": [str(o) for o in outputs],
    }


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InvalidArgumentError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_EXIT_USAGE)
        except DataError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_EXIT_DATA)
        except InternalInconsistencyError as exc:
            click.echo(f"internal inconsistency: {exc}", err=True)
            sys.exit(_EXIT_INTERNAL)

    return wrapper


def _build_graph(points: np.ndarray, graph: str, k: int):
    dm = euclidean_distances(points)
    if graph == "kmst":
        return kmst(dm, k)
    return knng(dm, k)


def _load_two_samples(x_csv: str, y_csv: str):
    x = read_point_csv(x_csv)
    y = read_point_csv(y_csv)
    if x.shape[1] != y.shape[1]:
        raise DataError(
            f"dimension mismatch: {x_csv} has {x.shape[1]} columns, "
            f"{y_csv} has {y.shape[1]}"
        )
    return x, y


@click.group()
@click.version_option(version=__version__, prog_name="edgecount")
def main():
    """Graph-based two-sample tests, diagnostics, and simulation studies."""


@main.command("test")
@click.argument("x_csv", type=click.Path(exists=True, dir_okay=False), required=False)
@click.argument("y_csv", type=click.Path(exists=True, dir_okay=False), required=False)
@click.option("--graph", type=click.Choice(["kmst", "knng"]), default="kmst",
              show_default=True, help="Similarity graph on the pooled sample.")
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--graph-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Pre-built edge-list graph (skips construction).")
@click.option("--labels", "labels_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Labels file (one 1 or 2 per line) for --graph-file.")
@click.option("--test", "test_name", type=click.Choice(["oet", "get", "wet", "met"]),
              default="get", show_default=True)
@click.option("--pvalue", type=click.Choice(["asymptotic", "perm"]),
              default="asymptotic", show_default=True)
@click.option("--perms", type=int, default=1000, show_default=True,
              help="Permutation count when --pvalue perm.")
@click.option("--seed", type=int, default=None, help="Base seed (entropy if absent).")
@click.option("--met-abs-zd", is_flag=True,
              help="MET variant using |Z_d| instead of Z_d.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the result JSON here (with a manifest) instead of stdout only.")
@_handle_errors
def cmd_test(x_csv, y_csv, graph, k, graph_file, labels_file, test_name, pvalue,
             perms, seed, met_abs_zd, out):
    """Run an edge-count test on two CSV samples, or on a graph + labels file."""
    if graph_file is not None or labels_file is not None:
        if graph_file is None or labels_file is None or x_csv or y_csv:
            raise InvalidArgumentError(
                "give either two CSV samples or --graph-file with --labels"
            )
        g = read_graph_text(graph_file)
        lab = Labels(read_labels_text(labels_file))
        if len(lab.assignment) != g.n_nodes:
            raise DataError(
                f"labels file has {len(lab.assignment)} entries for "
                f"{g.n_nodes} nodes"
            )
        inputs = [graph_file, labels_file]
        graph_info = {"type": "file", "k": None}
    else:
        if x_csv is None or y_csv is None:
            raise InvalidArgumentError("give two CSV samples (or --graph-file/--labels)")
        x, y = _load_two_samples(x_csv, y_csv)
        g = _build_graph(np.vstack([x, y]), graph, k)
        lab = Labels.from_sizes(len(x), len(y))
        inputs = [x_csv, y_csv]
        graph_info = {"type": graph, "k": k}
    base_seed = fresh_seed() if seed is None else seed
    result = run_test(
        g, lab,
        test=test_name,
        method="asymptotic" if pvalue == "asymptotic" else "permutation",
        n_permutations=perms,
        seed=base_seed,
        met_abs_zd=met_abs_zd,
    )
    payload = result.to_dict()
    payload["graph"] = {
        **graph_info, "n_nodes": g.n_nodes, "num_edges": g.num_edges,
        "m": lab.m, "n": lab.n,
    }
    click.echo(json.dumps(payload, indent=2, sort_keys=True))
    if out:
        write_json_atomic(payload, out)
        config = {
            "x_csv": x_csv, "y_csv": y_csv, "graph_file": graph_file,
            "labels": labels_file, "graph": graph, "k": k,
            "test": test_name, "pvalue": pvalue, "perms": perms,
            "met_abs_zd": met_abs_zd,
        }
        write_json_atomic(
            _manifest("test", config, base_seed, inputs, [out]),
            str(out) + ".manifest.json",
        )


_CONDITION_NOTES = [
    ("c1_ratio_a", "C.1: sum|G_i|^2 / |G|^1.5, should trend to 0"),
    ("c1_ratio_b", "C.1: N_sq / |G|^2, should trend to 0"),
    ("c2_ratio_a", "C.2: sum|dt_i|^3 / V_G^1.5, should trend to 0"),
    ("c2_ratio_b", "C.2: sum dt_i^3 / (V_G sqrt|G|), should trend to 0"),
    ("c2_ratio_c", "C.2: crosspair / (|G| V_G), should trend to 0"),
    ("c3_ratio", "C.3: max dt_i^2 / V_G, should trend to 0"),
    ("c4_ratio_a", "C.4: sum|G_i|^2 / T^1.5, should trend to 0"),
    ("c4_ratio_b", "C.4: sum|dt_i|^3 / T^1.5, should trend to 0"),
    ("c4_ratio_c", "C.4: crosspair / T^2, should trend to 0"),
    ("legacy_ae2", "legacy: sum|A_e|^2 / (|G| sqrt N), prior work needs o(1)"),
    ("legacy_aebe", "legacy: sum|A_e||B_e| / |G|^1.5, prior work needs o(1)"),
]


@main.command("diagnose")
@click.option("--graph-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Edge-list graph file ('N <n>' header).")
@click.option("--data", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Point CSV to build the graph on.")
@click.option("--distances", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Distance matrix (EDM1 binary or EDM-TEXT).")
@click.option("--graph", type=click.Choice(["kmst", "knng"]), default="kmst",
              show_default=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--induced-squares", is_flag=True,
              help="Also count chord-free 4-cycles (slow on dense graphs).")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_handle_errors
def cmd_diagnose(graph_file, data, distances, graph, k, induced_squares, out):
    """Report the graph-condition ratios for a graph or a dataset.

    The ratios are finite-graph numbers for asymptotic o(.) conditions, so
    no verdict is attached; reference guidance goes to stderr.
    """
    sources = [s for s in (graph_file, data, distances) if s is not None]
    if len(sources) != 1:
        raise InvalidArgumentError(
            "give exactly one of --graph-file, --data, or --distances"
        )
    if graph_file:
        g = read_graph_text(graph_file)
    elif data:
        g = _build_graph(read_point_csv(data), graph, k)
    else:
        dm = read_distances(distances)
        g = kmst(dm, k) if graph == "kmst" else knng(dm, k)
    report = condition_report(g, include_induced_squares=induced_squares).to_dict()
    click.echo(json.dumps(report, indent=2, sort_keys=True))
    for key, note in _CONDITION_NOTES:
        value = report[key]
        shown = "undefined (regular graph)" if value is None else f"{value:.4g}"
        click.echo(f"# {key} = {shown:<26} {note}", err=True)
    if out:
        write_json_atomic(report, out)
        config = {"graph_file": graph_file, "data": data, "distances": distances,
                  "graph": graph, "k": k, "induced_squares": induced_squares}
        write_json_atomic(
            _manifest("diagnose", config, 0, sources, [out]),
            str(out) + ".manifest.json",
        )


def _resolve_config_path(config_path: str) -> str:
    """A real path, or the name of a bundled config (e.g. table2_cell.json)."""
    if os.path.exists(config_path):
        return config_path
    bundled = importlib.resources.files("edgecount") / "configs" / config_path
    if bundled.is_file():
        return str(bundled)
    raise DataError(f"config file not found: {config_path}")


@main.command("simulate")
@click.argument("config_path")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--workers", type=int, default=None,
              help="Worker processes (default: EDGECOUNT_THREADS or all cores).")
@_handle_errors
def cmd_simulate(config_path, out_dir, workers):
    """Run a simulation experiment from a JSON config (or a prior manifest).

    CONFIG_PATH may also name a bundled config such as table2_cell.json or
    fig7_stein.json.
    """
    path = _resolve_config_path(config_path)
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot parse config: {exc}") from exc
    if isinstance(config, dict) and config.get("tool") == "edgecount":
        config = config["config"]  # rerun from a manifest
    if "seed" not in config:
        config["seed"] = fresh_seed()
    result = run_experiment(config, workers)
    os.makedirs(out_dir, exist_ok=True)
    stem = result.experiment
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    summary_path = os.path.join(out_dir, f"{stem}_summary.json")
    result.write_csv(csv_path)
    write_json_atomic(result.summary(), summary_path)
    write_json_atomic(
        _manifest("simulate", result.config, result.config["seed"], [path],
                  [csv_path, summary_path]),
        os.path.join(out_dir, f"{stem}.manifest.json"),
    )
    click.echo(f"wrote {csv_path}")
    click.echo(f"wrote {summary_path}")


@main.command("stein")
@click.option("--d", "dim", default="100", show_default=True,
              help="Data dimension (integer, or 'n' for d = N).")
@click.option("--k", default="5", show_default=True,
              help="K of the K-MST (integer, or 'sqrt' for ceil(sqrt(N))).")
@click.option("--n-values", required=True,
              help="Comma-separated pooled sizes, e.g. 200,1000.")
@click.option("--direction", default="1,1,1", show_default=True,
              help="Comma-separated (a1,a2,a3); normalized by the caller if desired.")
@click.option("--m-frac", type=float, default=0.5, show_default=True)
@click.option("--samples", type=int, default=20000, show_default=True)
@click.option("--replicates", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--workers", type=int, default=None)
@_handle_errors
def cmd_stein(dim, k, n_values, direction, m_frac, samples, replicates, seed,
              out_dir, workers):
    """Stein-bound curve on K-MSTs of Gaussian data; one CSV row per replicate."""
    try:
        n_list = [int(tok) for tok in n_values.split(",") if tok.strip()]
        a = [float(tok) for tok in direction.split(",")]
    except ValueError as exc:
        raise InvalidArgumentError(f"bad numeric list: {exc}") from exc
    config = {
        "experiment": "stein",
        "seed": fresh_seed() if seed is None else seed,
        "d": dim if dim == "n" else int(dim),
        "k": k if k == "sqrt" else int(k),
        "n_values": n_list,
        "direction": a,
        "m_frac": m_frac,
        "mc_samples": samples,
        "replicates": replicates,
    }
    result = run_stein_experiment(config, workers)
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "stein.csv")
    summary_path = os.path.join(out_dir, "stein_summary.json")
    result.write_csv(csv_path)
    write_json_atomic(result.summary(), summary_path)
    write_json_atomic(
        _manifest("stein", result.config, result.config["seed"], [],
                  [csv_path, summary_path]),
        os.path.join(out_dir, "stein.manifest.json"),
    )
    click.echo(f"wrote {csv_path}")


if __name__ == "__main__":
    main()
