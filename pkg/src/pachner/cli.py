"""Command-line surface: enumeration, classification, level graphs, flip
paths and certificate verification.

Exit codes: 0 success, 2 usage, 3 validation, 4 verification failure.
``PACHNER_MAX_N`` overrides the enumeration size cap.  Identical invocations
produce byte-identical output regardless of ``--threads``.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import canonical, classify, explorer, flag_path, stacked_path
from .errors import PachnerError
from .moves import Certificate, verify_certificate


def _threads_option(f):
    return click.option(
        "--threads", type=int, default=os.cpu_count() or 1,
        show_default="all cores",
        help="Worker processes for enumeration (output is unaffected).")(f)


def _load_sphere(sig):
    return canonical.from_signature(sig)


def _die(code, message):
    click.echo(f"error: {message}", err=True)
    raise SystemExit(code)


class _ErrorMappingGroup(click.Group):
    """Translate library errors into the documented exit code 3."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except PachnerError as exc:
            _die(3, str(exc))


@click.group(cls=_ErrorMappingGroup)
def main():
    """Triangulated 2-spheres: flip graphs and flip-path certificates."""


@main.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--class", "class_tag", default="all",
              type=click.Choice(explorer.CLASS_TAGS))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the signature file here instead of stdout.")
@_threads_option
def gen(n, class_tag, out, threads):
    """Enumerate the class at level n as a signature list."""
    sigs = explorer.class_members(n, class_tag, threads)
    header = f"# pachner-level n={n} class={class_tag} count={len(sigs)}"
    if out:
        explorer.write_signature_file(sigs, n, class_tag, out)
    else:
        click.echo(header)
        for sig in sigs:
            click.echo(sig)


@main.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--class", "class_tag", default="all",
              type=click.Choice(explorer.CLASS_TAGS))
@click.option("--json", "json_out", type=click.Path(dir_okay=False),
              default=None, help="Also write the report as JSON.")
@_threads_option
def components(n, class_tag, json_out, threads):
    """Connected components of the level flip graph of a class."""
    graph = explorer.build_level_graph(n, class_tag, threads)
    report = explorer.components(graph)
    sizes = ",".join(str(s) for s in report.component_sizes)
    click.echo(f"n={n} class={class_tag} count={report.total_count} "
               f"components={len(report.component_sizes)} sizes={sizes}")
    if json_out:
        explorer.export_json(report, json_out)


@main.command(name="classify")
@click.option("--sig", "sig", default=None)
@click.option("--file", "path", type=click.Path(exists=True, dir_okay=False),
              default=None)
def classify_cmd(sig, path):
    """Class membership report for one sphere (or one per file line)."""
    if (sig is None) == (path is None):
        raise click.UsageError("provide exactly one of --sig or --file")
    sigs = [sig]
    if path:
        with open(path) as fh:
            sigs = [line.strip() for line in fh
                    if line.strip() and not line.startswith("#")]
    for s in sigs:
        t = _load_sphere(s)
        report = {
            "sig": canonical.signature(t),
            "flag": classify.is_flag(t),
            "stacked": classify.is_stacked(t),
            "hamiltonian": classify.is_hamiltonian(t),
            "stacked0": classify.is_stacked0(t),
            "gamma": t.n >= 5 and canonical.isomorphic(
                t, classify.double_cone(t.n)),
            "an": t.n >= 7 and canonical.isomorphic(
                t, classify.flag_target(t.n)),
        }
        click.echo(json.dumps(report))


@main.command(name="flip-graph")
@click.option("--n", "n", type=int, required=True)
@click.option("--class", "class_tag", default="all",
              type=click.Choice(explorer.CLASS_TAGS))
@click.option("--dot", "dot_out", type=click.Path(dir_okay=False),
              required=True)
@_threads_option
def flip_graph(n, class_tag, dot_out, threads):
    """Export the level flip graph of a class in DOT format."""
    graph = explorer.build_level_graph(n, class_tag, threads)
    explorer.export_dot(graph, dot_out)
    click.echo(f"wrote {dot_out}: {len(graph.nodes)} nodes, "
               f"{len(graph.arcs)} arcs")


@main.command(name="path-flag")
@click.option("--from", "sig", required=True)
@click.option("--verify", "check", is_flag=True,
              help="Re-verify the certificate before printing it.")
def path_flag(sig, check):
    """Flag-preserving flip certificate to the canonical flag sphere."""
    t = _load_sphere(sig)
    cert = flag_path.to_canonical_an(t)
    if check:
        report = verify_certificate(cert)
        if not report.ok:
            _die(4, f"certificate failed verification at step "
                    f"{report.step}: {report.reason}")
    click.echo(cert.to_json())


@main.command(name="path-stacked")
@click.option("--from", "sig", required=True)
@click.option("--verify", "check", is_flag=True,
              help="Re-verify the certificate before printing it.")
def path_stacked(sig, check):
    """Stackedness-preserving certificate to the canonical stacked sphere."""
    t = _load_sphere(sig)
    cert = stacked_path.stacked_canonical_path(t)
    if check:
        report = verify_certificate(cert)
        if not report.ok:
            _die(4, f"certificate failed verification at step "
                    f"{report.step}: {report.reason}")
    click.echo(cert.to_json())


@main.command()
@click.option("--cert", "path", type=click.Path(exists=True, dir_okay=False),
              required=True)
def verify(path):
    """Replay a certificate file; exit 4 if it does not verify."""
    with open(path) as fh:
        cert = Certificate.from_json(fh.read())
    report = verify_certificate(cert)
    if not report.ok:
        _die(4, f"step {report.step}: {report.reason}")
    click.echo(f"ok: {report.length} moves, class {cert.class_tag!r}, "
               f"{cert.start} -> {cert.end}")


@main.command()
@click.option("--gamma", "gamma_n", type=int, default=None)
@click.option("--an", "an_n", type=int, default=None)
@click.option("--delta", "delta_n", type=int, default=None)
@click.option("--klee", "klee_sig", default=None)
@click.option("--isolated", "isolated_m", type=int, default=None)
def special(gamma_n, an_n, delta_n, klee_sig, isolated_m):
    """Signatures of the named constructions."""
    chosen = [x for x in (gamma_n, an_n, delta_n, klee_sig, isolated_m)
              if x is not None]
    if len(chosen) != 1:
        raise click.UsageError(
            "provide exactly one of --gamma/--an/--delta/--klee/--isolated")
    if gamma_n is not None:
        click.echo(canonical.signature(classify.double_cone(gamma_n)))
    elif an_n is not None:
        click.echo(canonical.signature(classify.flag_target(an_n)))
    elif delta_n is not None:
        click.echo(canonical.signature(
            classify.canonical_stacked_sphere(delta_n)))
    elif klee_sig is not None:
        t = _load_sphere(klee_sig)
        click.echo(canonical.signature(classify.klee(t)))
    else:
        for shape in stacked_path.enumerate_deg4_trees(isolated_m):
            sphere = stacked_path.build_isolated_sphere(shape)
            click.echo(canonical.signature(sphere))


@main.command()
@click.option("--max-n", "max_n", type=int, required=True)
@_threads_option
def table(max_n, threads):
    """Stacked-level component table: n, count, #components, sizes."""
    for n in range(4, max_n + 1):
        graph = explorer.build_level_graph(n, "stacked", threads)
        report = explorer.components(graph)
        sizes = ",".join(str(s) for s in report.component_sizes)
        click.echo(f"{n} {report.total_count} "
                   f"{len(report.component_sizes)} {sizes}")


if __name__ == "__main__":
    main()
