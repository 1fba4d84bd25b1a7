"""Command-line front end: batch diagnosis, query computation, simulated
sessions, the HTTP server, and fixture verification."""

from __future__ import annotations

import json
import sys

import click

from . import logic
from .circuit import parse_netlist, reduce
from .diagnoses import hs_tree
from .dpi import Diagnosis, DpiError, parse_dpi, partition, serialize_dpi, solution_kb
from .engine import (EngineConfig, Goal, SessionState, SimulatedOracle, run)
from .fixtures import FIXTURE_NAMES, circuit_dpi, exk_dpi, named_fixture
from .qpartition import (QsmConfig, enumerate_cqps, search_optimal_qp)
from .queryexpand import min_q, MinQTrace
from .querycost import QcmConfig, optimal_query_ids
from .logic import parse, serialize


def _load_dpi(path: str):
    with open(path) as fh:
        return parse_dpi(fh.read())


def _engine_config(n, qsm, threshold, qcm, enhance, dpi) -> EngineConfig:
    return EngineConfig(n_leading=n, qsm=QsmConfig(qsm.upper(), threshold),
                        qcm=QcmConfig.of(qcm.upper(), dpi.costs),
                        enhance=enhance)


def _print_leading(dpi, leading) -> None:
    for d in leading:
        texts = "; ".join(serialize(dpi.sentence(s)) for s in sorted(d.ids))
        click.echo("%-12s p=%.6f  %s"
                   % (",".join(map(str, sorted(d.ids))), leading.prob(d), texts))


@click.group()
def main():
    """Interactive sequential diagnosis toolkit."""


@main.command()
@click.argument("dpi_file", type=click.Path(exists=True))
@click.option("-n", "n_leading", default=10, show_default=True,
              help="maximum number of leading diagnoses")
def diagnose(dpi_file, n_leading):
    """Print the leading minimal diagnoses of a problem instance."""
    dpi = _load_dpi(dpi_file)
    _print_leading(dpi, hs_tree(dpi, n_leading))


@main.command()
@click.argument("dpi_file", type=click.Path(exists=True))
@click.option("-n", "n_leading", default=10, show_default=True)
@click.option("--qsm", default="ent", type=click.Choice(["ent", "spl"]),
              show_default=True)
@click.option("--threshold", default=0.01, show_default=True)
def qpartition(dpi_file, n_leading, qsm, threshold):
    """Print the optimal q-partition of the leading diagnoses."""
    dpi = _load_dpi(dpi_file)
    leading = hs_tree(dpi, n_leading)
    qp, value = search_optimal_qp(leading, QsmConfig(qsm.upper(), threshold))
    click.echo("D+: %s" % sorted(sorted(d.ids) for d in qp.dplus))
    click.echo("D-: %s" % sorted(sorted(d.ids) for d in qp.dminus))
    click.echo("%s value: %.6f" % (qsm.upper(), value))


@main.command()
@click.argument("dpi_file", type=click.Path(exists=True))
@click.option("-n", "n_leading", default=10, show_default=True)
@click.option("--qsm", default="ent", type=click.Choice(["ent", "spl"]),
              show_default=True)
@click.option("--threshold", default=0.01, show_default=True)
@click.option("--qcm", default="sum", type=click.Choice(["sum", "max", "card"]),
              show_default=True)
@click.option("--enhance", is_flag=True,
              help="enrich with implicit consequences and minimize")
def query(dpi_file, n_leading, qsm, threshold, qcm, enhance):
    """Print the next query to ask for a problem instance."""
    from .engine import calc_query
    dpi = _load_dpi(dpi_file)
    leading = hs_tree(dpi, n_leading)
    config = EngineConfig(n_leading=n_leading,
                          qsm=QsmConfig(qsm.upper(), threshold),
                          qcm=QcmConfig.of(qcm.upper(), dpi.costs),
                          enhance=enhance)
    q, qp = calc_query(dpi, leading, config)
    click.echo("D+: %s" % sorted(sorted(d.ids) for d in qp.dplus))
    click.echo("D-: %s" % sorted(sorted(d.ids) for d in qp.dminus))
    click.echo("query:")
    for text in q.texts():
        click.echo("  %s" % text)


@main.command("reduce")
@click.argument("netlist_file", type=click.Path(exists=True))
def reduce_cmd(netlist_file):
    """Turn a gate-level netlist with observations into a problem instance."""
    with open(netlist_file) as fh:
        dpi, comp_map = reduce(parse_netlist(fh.read()))
    click.echo(serialize_dpi(dpi), nl=False)
    click.echo("# components: %s"
               % ", ".join("%d=%s" % (sid, name)
                           for sid, name in sorted(comp_map.items())))


@main.command()
@click.argument("dpi_file", type=click.Path(exists=True))
@click.option("--simulate", is_flag=True, required=True,
              help="answer queries from a reference model")
@click.option("--reference", type=click.Path(exists=True),
              help="file with one reference sentence per line")
@click.option("--target", help="comma-separated sentence ids of the true "
                               "diagnosis, e.g. 2,3")
@click.option("-n", "n_leading", default=10, show_default=True)
@click.option("--qsm", default="ent", type=click.Choice(["ent", "spl"]),
              show_default=True)
@click.option("--threshold", default=0.01, show_default=True)
@click.option("--qcm", default="sum", type=click.Choice(["sum", "max", "card"]),
              show_default=True)
@click.option("--enhance", is_flag=True)
def session(dpi_file, simulate, reference, target, n_leading, qsm, threshold,
            qcm, enhance):
    """Run a full simulated diagnosis session and print the transcript."""
    dpi = _load_dpi(dpi_file)
    if (reference is None) == (target is None):
        raise click.UsageError("provide exactly one of --reference/--target")
    if reference is not None:
        with open(reference) as fh:
            sentences = [parse(line.strip()) for line in fh
                         if line.strip() and not line.startswith("#")]
        oracle = SimulatedOracle(sentences)
    else:
        ids = [int(part) for part in target.split(",") if part.strip()]
        oracle = SimulatedOracle.for_target(dpi, Diagnosis.of(*ids))
    config = _engine_config(n_leading, qsm, threshold, qcm, enhance, dpi)
    result, transcript = run(dpi, oracle, config)
    click.echo(json.dumps({
        "diagnosis": sorted(result.ids),
        "sentences": [serialize(dpi.sentence(s)) for s in sorted(result.ids)],
        "transcript": transcript,
    }, indent=2))


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, host):
    """Start the HTTP session service."""
    import uvicorn
    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


@main.command()
@click.option("--verify", is_flag=True, required=True,
              help="re-derive and check the reference fixture results")
def fixtures(verify):
    """Check the built-in fixtures against their frozen expected results."""
    failures = 0

    def check(label, ok):
        nonlocal failures
        click.echo("%s %s" % ("PASS" if ok else "FAIL", label))
        if not ok:
            failures += 1

    exk = exk_dpi()
    leading = hs_tree(exk, 10)
    check("exk: 6 minimal diagnoses",
          {tuple(sorted(d.ids)) for d in leading} ==
          {(2, 3), (2, 5), (2, 6), (2, 7), (1, 4, 7), (3, 4, 7)})
    check("exk: 29 canonical q-partitions",
          len(enumerate_cqps(list(leading))) == 29)

    probs = {d: p for d, p in zip(
        sorted(leading, key=Diagnosis.sort_key),
        [0.41, 0.01, 0.33, 0.14, 0.07, 0.04])}
    from .diagnoses import LeadingDiagnoses
    ref = LeadingDiagnoses(sorted(probs, key=lambda d: -probs[d]), probs)
    qp, value = search_optimal_qp(ref, QsmConfig("ENT", 0.01))
    check("exk: partition search splits 0.48/0.52",
          sorted(sorted(d.ids) for d in qp.dplus) == [[1, 4, 7], [2, 7]]
          and 0.0005 <= value <= 0.0020)
    check("exk: cheapest query for it is {3,5,6}",
          optimal_query_ids(qp, QcmConfig("CARD")) == frozenset({3, 5, 6}))

    circuit, comp_map = circuit_dpi()
    cl = hs_tree(circuit, 10)
    by_ids = {tuple(sorted(d.ids)): cl.prob(d) for d in cl}
    check("circuit: diagnoses {1},{2,4},{2,5}",
          set(by_ids) == {(1,), (2, 4), (2, 5)})
    check("circuit: probabilities 0.93/0.05/0.02",
          abs(by_ids.get((1,), 0) - 0.93) <= 0.005
          and abs(by_ids.get((2, 4), 0) - 0.05) <= 0.005
          and abs(by_ids.get((2, 5), 0) - 0.02) <= 0.005)
    oracle = SimulatedOracle.for_target(circuit, Diagnosis.of(1))
    result, transcript = run(circuit, oracle, EngineConfig(enhance=True))
    answered = [h for h in transcript if h["answer"] in ("true", "false")]
    check("circuit: one probe isolates the broken gate",
          result == Diagnosis.of(1) and len(answered) == 1
          and answered[0]["query"] == ["!outX1"])

    if failures:
        raise SystemExit("%d check(s) failed" % failures)
    click.echo("all fixture checks passed")


if __name__ == "__main__":
    main()
